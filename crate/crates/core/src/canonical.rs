//! Cyclic decompositions and shift-block (Jordan) forms on finite
//! invariant hulls.

use crate::error::{Error, Result};
use crate::exactfield::{poly_gcd, FieldSpec, Poly, Scalar};
use crate::linspace::{kernel_basis, Domain, Matrix, SparseVec, SubspaceBasis};
use crate::operators::{InvariantHull, Operator};
use crate::triangulate::primary_components;

/// A chain `v_0, ..., v_n` with `(T - a)v_i = v_{i-1}` and `(T - a)v_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftBlock {
    pub eigenvalue: Scalar,
    pub vectors: Vec<SparseVec>,
}

impl ShiftBlock {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Checks the chain relations exactly.
    pub fn verify(&self, t: &Operator) -> Result<bool> {
        for (i, v) in self.vectors.iter().enumerate() {
            let mut image = t.apply(v)?;
            image.axpy(&-&self.eigenvalue, v);
            let ok = match i {
                0 => image.is_zero(),
                _ => image == self.vectors[i - 1],
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The span of `v, Tv, ..., T^(d-1) v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicBlock {
    pub generator: SparseVec,
    pub span_dim: usize,
}

impl CyclicBlock {
    /// The orbit vectors `v, Tv, ..., T^(d-1) v`.
    pub fn orbit(&self, t: &Operator) -> Result<Vec<SparseVec>> {
        let mut out = Vec::with_capacity(self.span_dim);
        let mut v = self.generator.clone();
        for _ in 0..self.span_dim {
            let next = t.apply(&v)?;
            out.push(v);
            v = next;
        }
        Ok(out)
    }
}

fn dense(v: &SparseVec, n: usize) -> Vec<Scalar> {
    v.to_dense(n)
}

/// Removes from `f` every prime factor it shares with `h`.
fn strip_common(f: &Poly, h: &Poly) -> Poly {
    let mut c = f.clone();
    loop {
        let g = poly_gcd(&c, h);
        if g.is_constant() {
            return c;
        }
        c = c.exact_div(&g).expect("gcd divides");
    }
}

/// Given `v` with annihilator `a` and `e` with annihilator `b`, a vector
/// whose annihilator is `lcm(a, b)`.
fn merge_orbits(m: &Matrix, v: &[Scalar], a: &Poly, e: &[Scalar], b: &Poly) -> Vec<Scalar> {
    let h = b.exact_div(&poly_gcd(a, b)).expect("gcd divides");
    // u | a and w | b coprime with u*w = lcm(a, b): w collects the primes
    // where b has the larger multiplicity.
    let u = strip_common(a, &h);
    let w = b.exact_div(&strip_common(b, &h)).expect("divides");
    let x = m.eval_poly(&a.exact_div(&u).expect("u | a")).mul_vec(v);
    let y = m.eval_poly(&b.exact_div(&w).expect("w | b")).mul_vec(e);
    x.iter().zip(&y).map(|(p, q)| p + q).collect()
}

/// Solves `rows * f = target` for some `f`; `rows` must be independent.
fn solve_dual(field: FieldSpec, rows: &[Vec<Scalar>], target: &[Scalar], n: usize) -> Vec<Scalar> {
    let mut aug = Matrix::zeros(field, rows.len(), n + 1);
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in r.iter().enumerate() {
            aug.set(i, j, c.clone());
        }
        aug.set(i, n, target[i].clone());
    }
    let (r, pivots) = aug.rref();
    let mut f = vec![field.zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        assert!(p < n, "independent rows give a consistent system");
        f[p] = r.get(i, n).clone();
    }
    f
}

/// Splits the invariant subspace `s` of `Finite(n)` into cyclic pieces.
fn cyclic_split(m: &Matrix, s: SubspaceBasis, out: &mut Vec<(Vec<Scalar>, usize)>) -> Result<()> {
    let field = m.field();
    let n = m.nrows();
    if s.is_zero() {
        return Ok(());
    }
    // A maximal vector: its annihilator is the minimal polynomial on s.
    let mut v = dense(&s.rows()[0], n);
    let mut a = m.vector_min_poly(&v);
    for row in &s.rows()[1..] {
        let e = dense(row, n);
        let b = m.vector_min_poly(&e);
        if a.rem(&b).is_zero() {
            continue;
        }
        v = merge_orbits(m, &v, &a, &e, &b);
        a = m.vector_min_poly(&v);
    }
    let d = a.degree().expect("nonzero annihilator");
    let mut orbit = Vec::with_capacity(d);
    let mut cur = v.clone();
    for _ in 0..d {
        let next = m.mul_vec(&cur);
        orbit.push(cur);
        cur = next;
    }
    out.push((v, d));
    if d == s.dim() {
        return Ok(());
    }
    // f vanishes on v, ..., T^(d-2) v and is 1 on T^(d-1) v; the vectors x
    // with f(T^i x) = 0 for all i < d form an invariant complement.
    let mut target = vec![field.zero(); d];
    target[d - 1] = field.one();
    let f = solve_dual(field, &orbit, &target, n);
    let mt = m.transpose();
    let mut functionals = Vec::with_capacity(d);
    let mut g = f;
    for _ in 0..d {
        let next = mt.mul_vec(&g);
        functionals.push(g);
        g = next;
    }
    let mut constraints = Matrix::zeros(field, d, s.dim());
    for (i, phi) in functionals.iter().enumerate() {
        for (j, row) in s.rows().iter().enumerate() {
            let val = row
                .iter_ranks()
                .fold(field.zero(), |acc, (r, c)| &acc + &(c * &phi[r as usize]));
            constraints.set(i, j, val);
        }
    }
    let ker = kernel_basis(&constraints);
    let lifted: Vec<SparseVec> = ker.rows().iter().map(|k| s.lift(&k.to_dense(s.dim()))).collect();
    let complement = SubspaceBasis::span(field, Domain::Finite(n), &lifted)?;
    debug_assert_eq!(complement.dim() + d, s.dim());
    cyclic_split(m, complement, out)
}

/// Decomposes the hull into a direct sum of cyclic subspaces, given a
/// polynomial `p` that annihilates it.
pub fn cyclic_decomposition(h: &InvariantHull, p: &Poly) -> Result<Vec<CyclicBlock>> {
    let m = &h.matrix;
    let n = m.nrows();
    if !m.eval_poly(p).is_zero() {
        return Err(Error::NotAnnihilating(p.clone()));
    }
    let mut raw = Vec::new();
    cyclic_split(m, SubspaceBasis::full(m.field(), n), &mut raw)?;
    Ok(raw
        .into_iter()
        .map(|(v, d)| CyclicBlock {
            generator: h.basis.lift(&v),
            span_dim: d,
        })
        .collect())
}

/// Jordan chains of `n` inside `ker n^mult`, longest first. Tops at each level are echelon completions of the lower
/// kernel plus the images of longer chains.
fn jordan_chains(n: &Matrix, mult: usize) -> Vec<Vec<Vec<Scalar>>> {
    let field = n.field();
    let dim = n.nrows();
    let mut kernels = vec![SubspaceBasis::zero(field, Domain::Finite(dim))];
    let mut power = Matrix::identity(field, dim);
    for _ in 0..mult {
        power = power.mul(n);
        kernels.push(kernel_basis(&power));
    }
    let mut tops: Vec<(usize, Vec<Scalar>)> = Vec::new();
    for level in (1..=mult).rev() {
        let mut span_mod = kernels[level - 1].clone();
        for (top_level, t) in &tops {
            let pushed = n.pow(top_level - level).mul_vec(t);
            span_mod.insert(&SparseVec::from_dense(field, &pushed)).expect("same space");
        }
        for row in kernels[level].rows() {
            if let Some(new) = span_mod.insert(row).expect("same space") {
                tops.push((level, new.to_dense(dim)));
            }
        }
    }
    tops.into_iter()
        .map(|(level, t)| {
            let mut chain = Vec::with_capacity(level);
            let mut v = t;
            for _ in 0..level {
                let next = n.mul_vec(&v);
                chain.push(v);
                v = next;
            }
            chain.reverse();
            chain
        })
        .collect()
}

/// Shift blocks covering the hull, grouped by eigenvalue in canonical
/// order. Fails with [`Error::Split`] when the minimal polynomial does not
/// split.
pub fn shift_block_form(h: &InvariantHull) -> Result<Vec<ShiftBlock>> {
    let comps = primary_components(h)?;
    let mut blocks = Vec::new();
    for c in comps {
        let n = h.matrix.shift(&c.eigenvalue);
        for chain in jordan_chains(&n, c.multiplicity) {
            blocks.push(ShiftBlock {
                eigenvalue: c.eigenvalue.clone(),
                vectors: chain.iter().map(|v| h.basis.lift(v)).collect(),
            });
        }
    }
    Ok(blocks)
}

/// The block-diagonal matrix of Jordan blocks described by `blocks`.
pub fn shift_form_matrix(field: FieldSpec, blocks: &[ShiftBlock]) -> Matrix {
    let parts: Vec<Matrix> = blocks
        .iter()
        .map(|b| Matrix::jordan_block(field, &b.eigenvalue, b.len()))
        .collect();
    Matrix::block_diag(field, &parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linspace::direct_sum_check;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn hull(m: Matrix) -> InvariantHull {
        InvariantHull {
            basis: SubspaceBasis::full(m.field(), m.nrows()),
            matrix: m,
        }
    }

    fn spans(t: &Operator, blocks: &[CyclicBlock]) -> Vec<SubspaceBasis> {
        blocks
            .iter()
            .map(|b| SubspaceBasis::span(t.field(), t.domain(), &b.orbit(t).unwrap()).unwrap())
            .collect()
    }

    fn e(n: usize, i: usize) -> SparseVec {
        SparseVec::basis(Q, Domain::Finite(n), i as i64).unwrap()
    }

    #[test]
    fn zero_matrix_singletons() {
        let m = Matrix::zeros(Q, 3, 3);
        let b = cyclic_decomposition(&hull(m), &Poly::x(Q)).unwrap();
        assert_eq!(b.len(), 3);
        assert!(b.iter().all(|b| b.span_dim == 1));
    }

    #[test]
    fn jordan_block_is_cyclic() {
        let m = Matrix::jordan_block(Q, &Q.zero(), 3);
        let b = cyclic_decomposition(&hull(m.clone()), &Poly::monomial(Q, 3)).unwrap();
        assert_eq!(b, vec![CyclicBlock { generator: e(3, 2), span_dim: 3 }]);
        let t = Operator::matrix(m).unwrap();
        assert_eq!(b[0].orbit(&t).unwrap(), vec![e(3, 2), e(3, 1), e(3, 0)]);
    }

    #[test]
    fn diagonal_plane() {
        let m = Matrix::from_i64(Q, &[&[1, 0], &[0, 2]]);
        let p = Poly::from_roots(Q, &[(Q.from_i64(1), 1), (Q.from_i64(2), 1)]);
        let b = cyclic_decomposition(&hull(m.clone()), &p).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].span_dim, 2);
        let t = Operator::matrix(m).unwrap();
        assert!(direct_sum_check(&spans(&t, &b)).unwrap());
    }

    #[test]
    fn non_annihilating_rejected() {
        let m = Matrix::identity(Q, 2);
        assert!(matches!(
            cyclic_decomposition(&hull(m), &Poly::x(Q)),
            Err(Error::NotAnnihilating(_))
        ));
    }

    #[test]
    fn greedy_pitfall_is_avoided() {
        // diag(J_2(0), 0): e0 + e2 is not a good first generator, but the
        // complement construction still yields a direct sum.
        let m = Matrix::from_i64(Q, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let t = Operator::matrix(m.clone()).unwrap();
        let b = cyclic_decomposition(&hull(m), &Poly::monomial(Q, 2)).unwrap();
        let dims: Vec<usize> = b.iter().map(|b| b.span_dim).collect();
        assert_eq!(dims, vec![2, 1]);
        assert!(direct_sum_check(&spans(&t, &b)).unwrap());
    }

    #[test]
    fn shift_blocks() {
        let j = Matrix::jordan_block(Q, &Q.zero(), 3);
        let b = shift_block_form(&hull(j.clone())).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].len(), 3);
        assert!(b[0].verify(&Operator::matrix(j).unwrap()).unwrap());

        let u = Matrix::from_i64(Q, &[&[1, 1], &[0, 1]]);
        let b = shift_block_form(&hull(u.clone())).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].eigenvalue, Q.one());
        assert_eq!(b[0].vectors, vec![e(2, 0), e(2, 1)]);
        assert!(b[0].verify(&Operator::matrix(u).unwrap()).unwrap());

        let c = Matrix::companion(&Poly::from_i64(Q, &[1, 0, 1])).unwrap();
        assert!(matches!(shift_block_form(&hull(c)), Err(Error::Split(_))));
    }

    #[test]
    fn reassembly() {
        let m = Matrix::from_i64(Q, &[&[2, 1, 0, 0], &[0, 2, 0, 0], &[1, 0, 2, 0], &[0, 0, 0, 3]]);
        let blocks = shift_block_form(&hull(m.clone())).unwrap();
        let cols: Vec<Vec<Scalar>> = blocks.iter().flat_map(|b| b.vectors.iter().map(|v| v.to_dense(4))).collect();
        let p = Matrix::from_columns(Q, 4, &cols);
        let j = shift_form_matrix(Q, &blocks);
        assert_eq!(p.inverse().unwrap().mul(&m).mul(&p), j);
    }
}
