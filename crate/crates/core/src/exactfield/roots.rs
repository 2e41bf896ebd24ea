use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::poly::poly_gcd;
use super::{FieldSpec, Poly, Scalar};

/// Largest prime for which roots are found by exhaustive evaluation.
pub const MAX_EXHAUSTIVE_PRIME: u64 = 1 << 16;

/// A polynomial that does not factor into linear terms, together with a
/// nonlinear factor that has no roots in the base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitFailure {
    /// Monic, root-free, degree at least 2.
    pub factor: Poly,
    /// Whether `factor` is certified irreducible. Always true over `F_p`;
    /// over `Q` true up to degree 3 (root-free there implies irreducible).
    pub irreducible: bool,
    /// The linear part that did split off, `(root, multiplicity)`.
    pub partial_roots: Vec<(Scalar, usize)>,
}

/// Outcome of linear splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitResult {
    /// Roots in canonical scalar order with their multiplicities.
    Split(Vec<(Scalar, usize)>),
    Failure(SplitFailure),
}

impl SplitResult {
    pub fn roots(&self) -> Option<&[(Scalar, usize)]> {
        match self {
            SplitResult::Split(r) => Some(r),
            SplitResult::Failure(_) => None,
        }
    }

    pub fn into_result(self) -> std::result::Result<Vec<(Scalar, usize)>, SplitFailure> {
        match self {
            SplitResult::Split(r) => Ok(r),
            SplitResult::Failure(f) => Err(f),
        }
    }
}

/// Splits `f` into linear factors, or reports a root-free nonlinear factor.
pub fn split_linear(f: &Poly) -> Result<SplitResult> {
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let field = f.field();
    let candidates = match field {
        FieldSpec::Prime(p) => {
            if p > MAX_EXHAUSTIVE_PRIME {
                return Err(Error::FieldTooLarge(p));
            }
            field.elements().expect("finite field").collect::<Vec<_>>()
        }
        FieldSpec::Rationals => rational_root_candidates(f),
    };
    let mut rest = f.monic();
    let mut roots = Vec::new();
    for a in candidates {
        if rest.is_constant() {
            break;
        }
        let lin = Poly::linear(&a);
        let mut mult = 0;
        while let Some(q) = rest.exact_div(&lin) {
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            roots.push((a, mult));
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    if rest.is_constant() {
        return Ok(SplitResult::Split(roots));
    }
    let (factor, irreducible) = match field {
        FieldSpec::Prime(_) => (smallest_irreducible_factor_fp(&rest), true),
        FieldSpec::Rationals => {
            let deg = rest.degree().unwrap_or(0);
            (rest, deg <= 3)
        }
    };
    Ok(SplitResult::Failure(SplitFailure {
        factor,
        irreducible,
        partial_roots: roots,
    }))
}

/// Candidate rational roots `±r/s` from the primitive integer form, plus 0.
fn rational_root_candidates(f: &Poly) -> Vec<Scalar> {
    let coeffs: Vec<&BigRational> = f
        .coeffs()
        .iter()
        .map(|c| c.as_rational().expect("rational polynomial"))
        .collect();
    let den_lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&den_lcm / c.denom()))
        .collect();
    let mut out = vec![FieldSpec::Rationals.zero()];
    let lowest = ints.iter().position(|c| !c.is_zero()).expect("nonzero poly");
    let a0 = ints[lowest].abs();
    let an = ints.last().expect("nonzero poly").abs();
    let num_divs = divisors(&a0);
    let den_divs = divisors(&an);
    for r in &num_divs {
        for s in &den_divs {
            let q = BigRational::new(r.clone(), s.clone());
            out.push(Scalar::Rational(q.clone()));
            out.push(Scalar::Rational(-q));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &(&d * &d) <= n {
        if (n % &d).is_zero() {
            let other = n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `base^exp mod modulus` for polynomials.
fn powmod(base: &Poly, mut exp: u128, modulus: &Poly) -> Poly {
    let mut acc = Poly::one(base.field());
    let mut b = base.rem(modulus);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (&acc * &b).rem(modulus);
        }
        b = (&b * &b).rem(modulus);
        exp >>= 1;
    }
    acc
}

/// A monic irreducible factor of least degree of a root-free `g` over `F_p`,
/// by distinct-degree then equal-degree factorization.
fn smallest_irreducible_factor_fp(g: &Poly) -> Poly {
    let field = g.field();
    let p = field.characteristic() as u128;
    let g = g.monic();
    let x = Poly::x(field);
    let mut h = x.clone();
    let deg = g.degree().expect("nonconstant");
    for d in 1..=deg {
        h = powmod(&h, p, &g);
        let gd = poly_gcd(&g, &(&h - &x));
        if !gd.is_one() {
            return equal_degree_split(&gd, d);
        }
    }
    g
}

fn equal_degree_split(f: &Poly, d: usize) -> Poly {
    if f.degree() == Some(d) {
        return f.clone();
    }
    let field = f.field();
    let p = field.characteristic();
    let n = f.degree().expect("nonconstant");
    let mut state = 0x5eed_u64;
    loop {
        let coeffs = (0..n)
            .map(|_| field.from_i64((splitmix64(&mut state) % p) as i64))
            .collect();
        let a = Poly::new(field, coeffs);
        if a.is_constant() {
            continue;
        }
        let b = if p == 2 {
            // Trace map a + a^2 + ... + a^(2^(d-1)).
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = (&t * &t).rem(f);
                acc = &acc + &t;
            }
            acc
        } else {
            // a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
            let mut t = a.rem(f);
            let mut norm = t.clone();
            for _ in 1..d {
                t = powmod(&t, p as u128, f);
                norm = (&norm * &t).rem(f);
            }
            &powmod(&norm, ((p - 1) / 2) as u128, f) - &Poly::one(field)
        };
        let g = poly_gcd(f, &b);
        if !g.is_one() && g.degree() != f.degree() && !g.is_zero() {
            let other = f.exact_div(&g).expect("gcd divides").monic();
            let pick = if g.degree() <= other.degree() { g } else { other };
            return equal_degree_split(&pick, d);
        }
    }
}

pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Re-expands a root multiset into `Π (x - a)^m`.
pub fn expand_roots(field: FieldSpec, roots: &[(Scalar, usize)]) -> Poly {
    Poly::from_roots(field, roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: &[i64]) -> Poly {
        Poly::from_i64(FieldSpec::Rationals, c)
    }

    #[test]
    fn difference_of_squares() {
        let r = split_linear(&q(&[-1, 0, 1])).unwrap();
        let qf = FieldSpec::Rationals;
        assert_eq!(r, SplitResult::Split(vec![(qf.from_i64(-1), 1), (qf.from_i64(1), 1)]));
    }

    #[test]
    fn x2_plus_1_over_q_fails() {
        match split_linear(&q(&[1, 0, 1])).unwrap() {
            SplitResult::Failure(f) => {
                assert_eq!(f.factor, q(&[1, 0, 1]));
                assert!(f.irreducible);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn x2_plus_1_over_f5_splits() {
        let f5 = FieldSpec::Prime(5);
        let r = split_linear(&Poly::from_i64(f5, &[1, 0, 1])).unwrap();
        assert_eq!(r, SplitResult::Split(vec![(f5.from_i64(2), 1), (f5.from_i64(3), 1)]));
    }

    #[test]
    fn rational_roots_with_denominators() {
        // (2x - 1)^2 (3x + 2) x
        let f = &(&q(&[-1, 2]).pow(2) * &q(&[2, 3])) * &q(&[0, 1]);
        let roots = split_linear(&f).unwrap().into_result().unwrap();
        let qf = FieldSpec::Rationals;
        assert_eq!(
            roots,
            vec![
                (qf.from_ratio(-2, 3).unwrap(), 1),
                (qf.zero(), 1),
                (qf.from_ratio(1, 2).unwrap(), 2)
            ]
        );
        assert_eq!(expand_roots(qf, &roots), f.monic());
    }

    #[test]
    fn partial_split_keeps_linear_part() {
        let f = &q(&[-3, 1]) * &q(&[2, 0, 1]);
        match split_linear(&f).unwrap() {
            SplitResult::Failure(fail) => {
                assert_eq!(fail.factor, q(&[2, 0, 1]));
                assert_eq!(fail.partial_roots.len(), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn irreducible_factor_over_f2_from_product() {
        // (x^2 + x + 1)(x^3 + x + 1) over F_2: witness is the quadratic.
        let f2 = FieldSpec::Prime(2);
        let f = &Poly::from_i64(f2, &[1, 1, 1]) * &Poly::from_i64(f2, &[1, 1, 0, 1]);
        match split_linear(&f).unwrap() {
            SplitResult::Failure(fail) => assert_eq!(fail.factor, Poly::from_i64(f2, &[1, 1, 1])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equal_degree_split_over_f3() {
        // x^4 + 1 over F_3 is a product of two irreducible quadratics.
        let f3 = FieldSpec::Prime(3);
        let f = Poly::from_i64(f3, &[1, 0, 0, 0, 1]);
        match split_linear(&f).unwrap() {
            SplitResult::Failure(fail) => {
                assert_eq!(fail.factor.degree(), Some(2));
                assert!(f.exact_div(&fail.factor).is_some());
                for a in f3.elements().unwrap() {
                    assert!(!fail.factor.eval(&a).is_zero());
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(split_linear(&q(&[4])), Err(Error::ConstantPolynomial)));
        let big = FieldSpec::prime(65537).unwrap();
        assert!(matches!(
            split_linear(&Poly::x(big)),
            Err(Error::FieldTooLarge(65537))
        ));
    }
}
