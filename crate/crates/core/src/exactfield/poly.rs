use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

use super::{FieldSpec, Scalar};

/// A univariate polynomial with coefficients in ascending degree order.
///
/// The zero polynomial has no coefficients and `degree() == None`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(field: FieldSpec, coeffs: Vec<Scalar>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.field() == field));
        let mut p = Poly { field, coeffs };
        p.normalize();
        p
    }

    pub fn from_i64(field: FieldSpec, coeffs: &[i64]) -> Self {
        Poly::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: FieldSpec) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: FieldSpec) -> Self {
        Poly::constant(field.one())
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(c.field(), vec![c])
    }

    /// `x`
    pub fn x(field: FieldSpec) -> Self {
        Poly::new(field, vec![field.zero(), field.one()])
    }

    /// `x - a`
    pub fn linear(a: &Scalar) -> Self {
        let f = a.field();
        Poly::new(f, vec![-a, f.one()])
    }

    /// `x^n`
    pub fn monomial(field: FieldSpec, n: usize) -> Self {
        let mut c = vec![field.zero(); n + 1];
        c[n] = field.one();
        Poly::new(field, c)
    }

    /// `Π (x - a)^m` over the given roots.
    pub fn from_roots(field: FieldSpec, roots: &[(Scalar, usize)]) -> Self {
        let mut acc = Poly::one(field);
        for (a, m) in roots {
            for _ in 0..*m {
                acc = &acc * &Poly::linear(a);
            }
        }
        acc
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(lc) => self.scale(&lc.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn eval(&self, at: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * at) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &self.field.from_i64(i as i64))
            .collect();
        Poly::new(self.field, coeffs)
    }

    fn check_field(&self, other: &Poly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc_inv = divisor.coeffs[dd].inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Poly::zero(self.field), Poly::zero(self.field));
        };
        if nd < dd {
            return (Poly::zero(self.field), self.clone());
        }
        let mut quot = vec![self.field.zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * d);
            }
            quot[k] = c;
        }
        (Poly::new(self.field, quot), Poly::new(self.field, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Exact quotient when `divisor` divides `self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    pub fn pow(&self, n: usize) -> Poly {
        let mut acc = Poly::one(self.field);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `x -> x + shift`.
    pub fn taylor_shift(&self, shift: &Scalar) -> Poly {
        let mut acc = Poly::zero(self.field);
        let xs = Poly::new(self.field, vec![shift.clone(), self.field.one()]);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &xs) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Parses the text syntax `x^3 - 2*x + 1`, with coefficients written as
    /// integers or `a/b`.
    pub fn parse(field: FieldSpec, text: &str) -> Result<Poly> {
        parse_poly(field, text)
    }
}

/// Returns `(d, u, w)` with `d = gcd(f, g)` monic and `u*f + w*g = d`.
pub fn poly_ext_gcd(f: &Poly, g: &Poly) -> Result<(Poly, Poly, Poly)> {
    f.check_field(g)?;
    if f.is_zero() && g.is_zero() {
        return Err(Error::BothZero);
    }
    let field = f.field;
    let (mut r0, mut r1) = (f.clone(), g.clone());
    let (mut s0, mut s1) = (Poly::one(field), Poly::zero(field));
    let (mut t0, mut t1) = (Poly::zero(field), Poly::one(field));
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s2 = &s0 - &(&q * &s1);
        let t2 = &t0 - &(&q * &t1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let lc_inv = r0.leading().expect("nonzero gcd").inv().expect("unit");
    Ok((r0.scale(&lc_inv), s0.scale(&lc_inv), t0.scale(&lc_inv)))
}

/// Monic gcd; the gcd of two zero polynomials is taken to be zero.
pub fn poly_gcd(f: &Poly, g: &Poly) -> Poly {
    match poly_ext_gcd(f, g) {
        Ok((d, _, _)) => d,
        Err(_) => Poly::zero(f.field),
    }
}

pub fn poly_lcm(f: &Poly, g: &Poly) -> Poly {
    if f.is_zero() || g.is_zero() {
        return Poly::zero(f.field);
    }
    let d = poly_gcd(f, g);
    (f * &g.exact_div(&d).expect("gcd divides")).monic()
}

/// For pairwise coprime nonconstant `fs`, returns `h_i` with
/// `Σ h_i * Π_{j≠i} f_j = 1`.
pub fn bezout_family(fs: &[Poly]) -> Result<Vec<Poly>> {
    let Some(first) = fs.first() else {
        return Ok(Vec::new());
    };
    let field = first.field;
    for f in fs {
        first.check_field(f)?;
        if f.is_constant() {
            return Err(Error::ConstantPolynomial);
        }
    }
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            let d = poly_gcd(&fs[i], &fs[j]);
            if !d.is_one() {
                return Err(Error::NotCoprime {
                    left: fs[i].clone(),
                    right: fs[j].clone(),
                    gcd: d,
                });
            }
        }
    }
    // h_i = g_i^{-1} mod f_i. The sum Σ h_i g_i is 1 modulo every f_j and
    // has degree below deg Π f_j, so it equals 1 exactly.
    let total = fs.iter().fold(Poly::one(field), |acc, f| &acc * f);
    fs.iter()
        .map(|f| {
            let g = total.exact_div(f).expect("factor divides product");
            let (_, u, _) = poly_ext_gcd(&g, f)?;
            Ok(u.rem(f))
        })
        .collect()
}

/// Product of the distinct monic irreducible factors of `f`.
pub fn squarefree_part(f: &Poly) -> Result<Poly> {
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    Ok(radical(&f.monic()))
}

fn radical(f: &Poly) -> Poly {
    if f.is_constant() {
        return Poly::one(f.field);
    }
    let df = f.derivative();
    if df.is_zero() {
        // f = g(x^p) = h(x)^p with h obtained by dividing exponents by p
        // (coefficients are their own p-th roots in F_p).
        let p = f.field.characteristic() as usize;
        let coeffs = f.coeffs.iter().step_by(p).cloned().collect();
        return radical(&Poly::new(f.field, coeffs));
    }
    let c = poly_gcd(f, &df);
    let w = f.exact_div(&c).expect("gcd divides").monic();
    poly_lcm(&w, &radical(&c))
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect();
        Poly::new(self.field, coeffs)
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect();
        Poly::new(self.field, coeffs)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(self.field, out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut text = c.to_string();
            let negative = text.starts_with('-');
            if negative {
                text.remove(0);
            }
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            first = false;
            let unit = text == "1";
            match i {
                0 => write!(f, "{text}")?,
                _ => {
                    if !unit {
                        write!(f, "{text}*")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self, self.field)
    }
}

fn parse_poly(field: FieldSpec, text: &str) -> Result<Poly> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let bad = |msg: &str| Error::Parse(format!("{msg} in polynomial `{text}`"));
    // Split into signed terms at every '+'/'-'; exponents are unsigned.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for (i, ch) in compact.chars().enumerate() {
        if ch == '+' || ch == '-' {
            if !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
            } else if i != 0 {
                return Err(bad("dangling sign"));
            }
            negative = ch == '-';
        } else {
            current.push(ch);
        }
    }
    if current.is_empty() {
        return Err(bad("trailing sign"));
    }
    terms.push((negative, current));

    let mut acc = Poly::zero(field);
    for (negative, term) in terms {
        let (coeff_text, power) = match term.find('x') {
            None => (term.as_str(), 0usize),
            Some(pos) => {
                let (lhs, rhs) = term.split_at(pos);
                let lhs = lhs.strip_suffix('*').unwrap_or(lhs);
                if lhs.ends_with('*') {
                    return Err(bad("doubled `*`"));
                }
                let rest = &rhs[1..];
                let power = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(|| bad("expected `^` after x"))?
                        .parse::<usize>()
                        .map_err(|_| bad("bad exponent"))?
                };
                (if lhs.is_empty() { "1" } else { lhs }, power)
            }
        };
        let mut c = field.parse_scalar(coeff_text)?;
        if negative {
            c = -c;
        }
        let mut coeffs = vec![field.zero(); power + 1];
        coeffs[power] = c;
        acc = &acc + &Poly::new(field, coeffs);
    }
    Ok(acc)
}
