//! Brute-force oracles over small prime fields, written against raw `u64`
//! residue arithmetic so they share no code with the main algorithms, plus
//! the seeded matrix streams used by the property suites.

use crate::error::{Error, Result};
use crate::exactfield::{poly_gcd, splitmix64, FieldSpec, Poly};
use crate::linspace::{FlagChain, Matrix, SubspaceBasis};
use crate::operators::Operator;
use crate::triangulate::{verify_triangular, OrderedBasis};

/// Largest number of vectors an exhaustive oracle will enumerate.
pub const MAX_ENUMERATION: u64 = 1 << 16;

type Raw = Vec<Vec<u64>>;

fn prime_of(field: FieldSpec) -> Result<u64> {
    match field {
        FieldSpec::Prime(p) => Ok(p),
        FieldSpec::Rationals => Err(Error::DomainTooLarge("exhaustive oracles need a finite field".into())),
    }
}

fn raw_matrix(m: &Matrix) -> Raw {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|c| c.residue().expect("prime field")).collect())
        .collect()
}

fn check_size(p: u64, n: usize) -> Result<()> {
    let total = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > MAX_ENUMERATION as u128 {
        return Err(Error::DomainTooLarge(format!("{p}^{n} vectors exceed the enumeration budget")));
    }
    Ok(())
}

fn mat_vec(m: &Raw, v: &[u64], p: u64) -> Vec<u64> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(0, |acc, (a, b)| (acc + a * b) % p))
        .collect()
}

fn mat_mul(a: &Raw, b: &Raw, p: u64) -> Raw {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(0, |acc, k| (acc + a[i][k] * b[k][j]) % p))
                .collect()
        })
        .collect()
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i128) as u64
}

/// Every vector of `F_p^n`, in lexicographic order.
fn all_vectors(p: u64, n: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = p.pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0; n];
        for c in v.iter_mut().rev() {
            *c = idx % p;
            idx /= p;
        }
        v
    })
}

/// Whether a complete invariant flag exists, by searching for an invariant
/// line and recursing into the quotient.
fn has_complete_flag(m: &Raw, p: u64) -> bool {
    let k = m.len();
    if k <= 1 {
        return true;
    }
    for v in all_vectors(p, k) {
        // One representative per line: leading nonzero coordinate 1.
        let Some(piv) = v.iter().position(|&c| c != 0) else { continue };
        if v[piv] != 1 {
            continue;
        }
        let mv = mat_vec(m, &v, p);
        let lambda = mv[piv];
        if mv.iter().zip(&v).any(|(a, b)| *a != lambda * b % p) {
            continue;
        }
        // Quotient by span{v}, with the standard basis minus e_piv.
        let keep: Vec<usize> = (0..k).filter(|&j| j != piv).collect();
        let q: Raw = keep
            .iter()
            .map(|&i| {
                keep.iter()
                    .map(|&j| (m[i][j] + p - m[piv][j] * v[i] % p) % p)
                    .collect()
            })
            .collect();
        if has_complete_flag(&q, p) {
            return true;
        }
    }
    false
}

/// True iff `m` over `F_p` admits a complete flag of invariant subspaces.
pub fn brute_force_triangularizable(m: &Matrix) -> Result<bool> {
    let p = prime_of(m.field())?;
    if !m.is_square() {
        return Err(Error::Shape("square matrix expected".into()));
    }
    check_size(p, m.nrows())?;
    Ok(has_complete_flag(&raw_matrix(m), p))
}

/// The chain of prefix spans of an ordered basis.
#[derive(Clone, Debug)]
pub struct InvariantFlag {
    pub chain: FlagChain,
    /// Every space in the chain is invariant.
    pub invariant: bool,
    /// The chain runs from 0 to the whole space in steps of one dimension.
    pub maximal: bool,
}

/// Flag of all prefix spans of `b`.
pub fn invariant_flag(t: &Operator, b: &OrderedBasis) -> Result<InvariantFlag> {
    let lengths: Vec<usize> = (0..=b.len()).collect();
    invariant_flag_from_prefixes(t, b, &lengths)
}

/// Flag of the prefix spans of the given lengths. The whole space is the
/// domain of `t` when finite, the span of `b` otherwise.
pub fn invariant_flag_from_prefixes(t: &Operator, b: &OrderedBasis, lengths: &[usize]) -> Result<InvariantFlag> {
    if !verify_triangular(t, b)?.triangular {
        return Err(Error::Precondition("operator is not triangular in this basis".into()));
    }
    let vectors = b.vectors();
    let mut spaces = Vec::with_capacity(lengths.len());
    let mut invariant = true;
    for &len in lengths {
        let s = SubspaceBasis::span(t.field(), t.domain(), &vectors[..len])?;
        for row in s.rows() {
            invariant &= s.contains(&t.apply(row)?);
        }
        spaces.push(s);
    }
    let chain = FlagChain::new(spaces)?;
    let total = t.finite_dim().unwrap_or(b.len());
    let maximal = chain.is_complete(total);
    Ok(InvariantFlag {
        chain,
        invariant,
        maximal,
    })
}

fn raw_poly_at(f: &Poly, m: &Raw, p: u64) -> Raw {
    let n = m.len();
    let mut acc: Raw = vec![vec![0; n]; n];
    for c in f.coeffs().iter().rev() {
        acc = mat_mul(&acc, m, p);
        let c = c.residue().expect("prime field");
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] = (row[i] + c) % p;
        }
    }
    acc
}

/// Enumerates `F_p^n` to confirm `ker Π f_i(M) = ⊕ ker f_i(M)` pointwise:
/// every kernel vector is a sum of one vector from each factor kernel in
/// exactly one way.
pub fn exhaustive_kernel_decomp_check(m: &Matrix, factors: &[Poly]) -> Result<bool> {
    let p = prime_of(m.field())?;
    let n = m.nrows();
    check_size(p, n)?;
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            let g = poly_gcd(&factors[i], &factors[j]);
            if !g.is_constant() {
                return Err(Error::NotCoprime {
                    left: factors[i].clone(),
                    right: factors[j].clone(),
                    gcd: g,
                });
            }
        }
    }
    let raw = raw_matrix(m);
    let product = factors.iter().fold(Poly::one(m.field()), |acc, f| &acc * f);
    let s = raw_poly_at(&product, &raw, p);
    let kernel_of = |a: &Raw| -> Vec<Vec<u64>> {
        all_vectors(p, n).filter(|v| mat_vec(a, v, p).iter().all(|&c| c == 0)).collect()
    };
    let ker_s = kernel_of(&s);
    let parts: Vec<Vec<Vec<u64>>> = factors.iter().map(|f| kernel_of(&raw_poly_at(f, &raw, p))).collect();
    // Tally the sums of all tuples.
    let index = |v: &[u64]| v.iter().fold(0usize, |acc, &c| acc * p as usize + c as usize);
    let mut hits = vec![0u32; p.pow(n as u32) as usize];
    let mut sums: Vec<Vec<u64>> = vec![vec![0; n]];
    for part in &parts {
        let mut next = Vec::with_capacity(sums.len() * part.len());
        for s in &sums {
            for k in part {
                next.push(s.iter().zip(k).map(|(a, b)| (a + b) % p).collect());
            }
        }
        sums = next;
    }
    for s in &sums {
        hits[index(s)] += 1;
    }
    let in_kernel: Vec<bool> = {
        let mut flags = vec![false; hits.len()];
        for v in &ker_s {
            flags[index(v)] = true;
        }
        flags
    };
    Ok(hits
        .iter()
        .zip(&in_kernel)
        .all(|(&h, &k)| if k { h == 1 } else { h == 0 }))
}

/// The SplitMix64 generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        splitmix64(&mut self.state)
    }

    /// Value in `0..bound`, taken from the high bits by a widening multiply.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Value in `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// Deterministic stream of `n x n` matrices, fixed by `(field, n, seed)`.
/// Over `F_p` entries are uniform residues; over `Q` they are integers in
/// `[-bound, bound]`.
#[derive(Clone, Debug)]
pub struct MatrixStream {
    field: FieldSpec,
    n: usize,
    bound: i64,
    rng: SplitMix64,
}

impl MatrixStream {
    pub fn new(field: FieldSpec, n: usize, seed: u64) -> Self {
        MatrixStream {
            field,
            n,
            bound: 3,
            rng: SplitMix64::new(seed),
        }
    }

    pub fn with_bound(mut self, bound: i64) -> Self {
        self.bound = bound;
        self
    }
}

impl Iterator for MatrixStream {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        let n = self.n;
        let mut m = Matrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                let v = match self.field {
                    FieldSpec::Prime(p) => self.rng.below(p) as i64,
                    FieldSpec::Rationals => self.rng.range_i64(-self.bound, self.bound),
                };
                m.set(i, j, self.field.from_i64(v));
            }
        }
        Some(m)
    }
}

/// Stream of `n x n` matrices over `F_p` fixed by `(n, p, seed)`.
pub fn seeded_matrix_stream(n: usize, p: u64, seed: u64) -> Result<MatrixStream> {
    Ok(MatrixStream::new(FieldSpec::prime(p)?, n, seed))
}

/// Every `n x n` matrix over `F_p`, in lexicographic order of the
/// row-major entries.
pub fn all_matrices(field: FieldSpec, n: usize) -> Result<impl Iterator<Item = Matrix>> {
    let p = prime_of(field)?;
    check_size(p, n * n)?;
    Ok(all_vectors(p, n * n).map(move |entries| {
        let rows = entries
            .chunks(n)
            .map(|r| r.iter().map(|&c| field.from_i64(c as i64)).collect())
            .collect();
        Matrix::from_rows(field, rows).expect("square")
    }))
}

/// Whether `f` over `F_p` has no root, by evaluating at every residue.
pub fn has_no_root_exhaustive(f: &Poly) -> Result<bool> {
    let p = prime_of(f.field())?;
    check_size(p, 1)?;
    let coeffs: Vec<u64> = f.coeffs().iter().map(|c| c.residue().expect("prime field")).collect();
    Ok((0..p).all(|x| coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) != 0))
}

/// Whether `f` over `F_p` is irreducible, by trial division by every monic
/// polynomial of degree at most `deg f / 2` (raw arithmetic).
pub fn is_irreducible_exhaustive(f: &Poly) -> Result<bool> {
    let p = prime_of(f.field())?;
    let Some(deg) = f.degree() else { return Ok(false) };
    if deg == 0 {
        return Ok(false);
    }
    let coeffs: Vec<u64> = f.coeffs().iter().map(|c| c.residue().expect("prime field")).collect();
    for d in 1..=deg / 2 {
        check_size(p, d)?;
        for low in all_vectors(p, d) {
            let mut g = low;
            g.push(1);
            if raw_rem(&coeffs, &g, p).iter().all(|&c| c == 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn raw_rem(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    let lead_inv = inv_mod(g[dg], p);
    while r.len() > dg {
        let top = *r.last().expect("nonempty");
        let c = top * lead_inv % p;
        let shift = r.len() - 1 - dg;
        for (i, &gi) in g.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * gi % p) % p;
        }
        r.pop();
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linspace::{Domain, SparseVec};

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let f2 = f(2);
        assert!(brute_force_triangularizable(&Matrix::zeros(f2, 2, 2)).unwrap());
        assert!(brute_force_triangularizable(&Matrix::from_i64(f2, &[&[0, 1], &[1, 0]])).unwrap());
        let c = Matrix::companion(&Poly::from_i64(f2, &[1, 1, 1])).unwrap();
        assert!(!brute_force_triangularizable(&c).unwrap());
    }

    #[test]
    fn flags() {
        let q = FieldSpec::Rationals;
        let j = Operator::matrix(Matrix::jordan_block(q, &q.zero(), 2)).unwrap();
        let e = |i| SparseVec::basis(q, Domain::Finite(2), i).unwrap();
        let b = OrderedBasis::from_vectors(vec![e(0), e(1)]).unwrap();
        let flag = invariant_flag(&j, &b).unwrap();
        assert!(flag.invariant && flag.maximal);
        assert_eq!(flag.chain.dims(), vec![0, 1, 2]);
        let skipped = invariant_flag_from_prefixes(&j, &b, &[0, 2]).unwrap();
        assert!(skipped.invariant && !skipped.maximal);
        let d = Operator::from_i64(q, &[&[3, 0, 0], &[0, 1, 0], &[0, 0, 2]]).unwrap();
        let b3 = OrderedBasis::from_vectors(
            [1, 2, 0].iter().map(|&i| SparseVec::basis(q, Domain::Finite(3), i).unwrap()).collect(),
        )
        .unwrap();
        assert!(invariant_flag(&d, &b3).unwrap().maximal);
    }

    #[test]
    fn kernel_decomposition_examples() {
        let f3 = f(3);
        let d = Matrix::from_i64(f3, &[&[0, 0], &[0, 1]]);
        let x = Poly::x(f3);
        let xm1 = Poly::linear(&f3.one());
        assert!(exhaustive_kernel_decomp_check(&d, &[x.clone(), xm1.clone()]).unwrap());
        assert!(exhaustive_kernel_decomp_check(&d, &[d.minimal_polynomial()]).unwrap());
        let f2 = f(2);
        let j = Matrix::jordan_block(f2, &f2.zero(), 2);
        assert!(exhaustive_kernel_decomp_check(&j, &[Poly::x(f2), Poly::linear(&f2.one())]).unwrap());
        assert!(matches!(
            exhaustive_kernel_decomp_check(&d, &[x.clone(), x]),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<Matrix> = seeded_matrix_stream(2, 2, 0).unwrap().take(5).collect();
        let b: Vec<Matrix> = seeded_matrix_stream(2, 2, 0).unwrap().take(5).collect();
        assert_eq!(a, b);
        let c = seeded_matrix_stream(3, 5, 1).unwrap().next().unwrap();
        let d = seeded_matrix_stream(3, 5, 2).unwrap().next().unwrap();
        assert_ne!(c, d);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(all_matrices(f(2), 2).unwrap().count(), 16);
        assert_eq!(all_matrices(f(3), 2).unwrap().count(), 81);
        assert!(all_matrices(FieldSpec::Rationals, 2).is_err());
    }

    #[test]
    fn irreducibility() {
        let f2 = f(2);
        assert!(is_irreducible_exhaustive(&Poly::from_i64(f2, &[1, 1, 1])).unwrap());
        assert!(!is_irreducible_exhaustive(&Poly::from_i64(f2, &[1, 0, 1])).unwrap());
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 has no root but is reducible.
        let r = Poly::from_i64(f2, &[1, 0, 1, 0, 1]);
        assert!(has_no_root_exhaustive(&r).unwrap());
        assert!(!is_irreducible_exhaustive(&r).unwrap());
    }
}
