//! Centralizers, double centralizers and polynomial algebras of finite
//! matrices, and membership of operators in the closure of `k[T]`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Poly, Scalar};
use crate::linspace::{kernel_basis, Domain, Matrix, SparseVec, SubspaceBasis};
use crate::operators::Operator;
use crate::triangulate::{saturate_vectors, Saturation};

/// A subspace of `n x n` matrices, held in echelon form under row-major
/// vectorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixSpaceBasis {
    n: usize,
    space: SubspaceBasis,
}

fn vectorize(m: &Matrix) -> SparseVec {
    SparseVec::from_dense(m.field(), m.entries())
}

impl MatrixSpaceBasis {
    pub fn span(field: FieldSpec, n: usize, elements: &[Matrix]) -> Result<Self> {
        let mut space = SubspaceBasis::zero(field, Domain::Finite(n * n));
        for m in elements {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Shape(format!("expected {n}x{n} matrices")));
            }
            space.insert(&vectorize(m))?;
        }
        Ok(MatrixSpaceBasis { n, space })
    }

    fn from_space(n: usize, space: SubspaceBasis) -> Self {
        MatrixSpaceBasis { n, space }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn elements(&self) -> Vec<Matrix> {
        let field = self.space.field();
        self.space
            .rows()
            .iter()
            .map(|r| {
                let flat = r.to_dense(self.n * self.n);
                Matrix::from_rows(field, flat.chunks(self.n).map(<[Scalar]>::to_vec).collect())
                    .expect("square")
            })
            .collect()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        m.nrows() == self.n && m.ncols() == self.n && self.space.contains(&vectorize(m))
    }

    pub fn contains_space(&self, other: &MatrixSpaceBasis) -> bool {
        self.n == other.n && self.space.contains_subspace(&other.space)
    }
}

/// Matrix of `X -> MX - XM` on row-major vectorized `X`.
fn commutator_map(m: &Matrix) -> Matrix {
    let n = m.nrows();
    let field = m.field();
    let mut out = Matrix::zeros(field, n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                // (MX)_ij picks up M_ik X_kj, (XM)_ij picks up X_ik M_kj.
                let a = m.get(i, k);
                if !a.is_zero() {
                    let col = k * n + j;
                    let cur = out.get(row, col) + a;
                    out.set(row, col, cur);
                }
                let b = m.get(k, j);
                if !b.is_zero() {
                    let col = i * n + k;
                    let cur = out.get(row, col) - b;
                    out.set(row, col, cur);
                }
            }
        }
    }
    out
}

fn stacked_kernel(n: usize, field: FieldSpec, maps: &[Matrix]) -> MatrixSpaceBasis {
    let rows: Vec<Vec<Scalar>> = maps.iter().flat_map(|c| c.to_rows()).collect();
    if rows.is_empty() {
        return MatrixSpaceBasis::from_space(n, SubspaceBasis::full(field, n * n));
    }
    let stacked = Matrix::from_rows(field, rows).expect("equal widths");
    MatrixSpaceBasis::from_space(n, kernel_basis(&stacked))
}

fn check_square(m: &Matrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Shape(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())))
    }
}

/// `{X : MX = XM}`
pub fn centralizer_basis(m: &Matrix) -> Result<MatrixSpaceBasis> {
    check_square(m)?;
    Ok(stacked_kernel(m.nrows(), m.field(), &[commutator_map(m)]))
}

/// Matrices commuting with every element of a basis of the centralizer.
pub fn double_centralizer_basis(m: &Matrix) -> Result<MatrixSpaceBasis> {
    let c = centralizer_basis(m)?;
    let maps: Vec<Matrix> = c.elements().iter().map(commutator_map).collect();
    Ok(stacked_kernel(m.nrows(), m.field(), &maps))
}

/// `span{I, M, ..., M^(d-1)}` with `d` the degree of the minimal polynomial.
pub fn poly_algebra_basis(m: &Matrix) -> Result<MatrixSpaceBasis> {
    check_square(m)?;
    let n = m.nrows();
    let d = m.minimal_polynomial().degree().unwrap_or(0);
    let mut powers = Vec::with_capacity(d);
    let mut p = Matrix::identity(m.field(), n);
    for _ in 0..d {
        let next = p.mul(m);
        powers.push(p);
        p = next;
    }
    MatrixSpaceBasis::span(m.field(), n, &powers)
}

/// Whether `C(C(M)) = k[M]`, with both dimensions.
pub fn double_cent_equals_poly(m: &Matrix) -> Result<(bool, (usize, usize))> {
    let dc = double_centralizer_basis(m)?;
    let pa = poly_algebra_basis(m)?;
    Ok((dc == pa, (dc.dim(), pa.dim())))
}

/// Least-degree `q` with `q(T)(w) = target(w)` for all `w` in `rows`,
/// searching degrees below `bound`.
fn interpolate(
    t: &Operator,
    rows: &[SparseVec],
    images: &[SparseVec],
    bound: usize,
) -> Result<Option<Poly>> {
    let field = t.field();
    // powers[k][j] = T^k rows[j]
    let mut powers: Vec<Vec<SparseVec>> = vec![rows.to_vec()];
    for k in 0..bound {
        // Unknowns c_0..c_k; equations indexed by (row j, basis rank r).
        let mut keys: Vec<(usize, u64)> = Vec::new();
        for (j, img) in images.iter().enumerate() {
            keys.extend(img.iter_ranks().map(|(r, _)| (j, r)));
            for p in &powers {
                keys.extend(p[j].iter_ranks().map(|(r, _)| (j, r)));
            }
        }
        keys.sort_unstable();
        keys.dedup();
        let mut aug = Matrix::zeros(field, keys.len(), k + 2);
        for (row, &(j, r)) in keys.iter().enumerate() {
            for (i, p) in powers.iter().enumerate() {
                aug.set(row, i, p[j].get_rank(r));
            }
            aug.set(row, k + 1, images[j].get_rank(r));
        }
        let (red, pivots) = aug.rref();
        if !pivots.contains(&(k + 1)) {
            let mut coeffs = vec![field.zero(); k + 1];
            for (i, &p) in pivots.iter().enumerate() {
                coeffs[p] = red.get(i, k + 1).clone();
            }
            return Ok(Some(Poly::new(field, coeffs)));
        }
        let next = powers[k].iter().map(|v| t.apply(v)).collect::<Result<Vec<_>>>()?;
        powers.push(next);
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipEvidence {
    /// On the hull generated by the listed probes, `S` agrees with no
    /// polynomial in `T` of degree below `deg p`.
    NoInterpolant { probes: Vec<usize>, hull_dim: usize },
    /// Least-degree interpolants on growing truncations, as `(size, degree)`.
    DegreeGrowth { degrees: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyMembership {
    /// `S = q(T)` on every probed hull and every pairwise sum of them.
    InClosure {
        q: Poly,
        /// Least-degree interpolant on each single-probe hull.
        interpolants: Vec<Poly>,
    },
    NotInClosure(MembershipEvidence),
}

impl PolyMembership {
    pub fn label(&self) -> &'static str {
        match self {
            PolyMembership::InClosure { .. } => "in_closure",
            PolyMembership::NotInClosure(_) => "not_in_closure",
        }
    }
}

fn hull_interpolant(
    t: &Operator,
    s: &Operator,
    p: &Poly,
    seeds: &[SparseVec],
) -> Result<(usize, Option<Poly>)> {
    let deg = p.degree().unwrap_or(0);
    // Every orbit spans at most deg p dimensions, so this much fuel suffices.
    let fuel = seeds.len() * deg + 1;
    let hull = match saturate_vectors(t, seeds, fuel)? {
        Saturation::Closed { hull, .. } => hull,
        Saturation::Diverged(_) => unreachable!("annihilated orbits are finite"),
    };
    for row in hull.basis.rows() {
        if !t.poly_apply(p, row)?.is_zero() {
            return Err(Error::NotAnnihilating(p.clone()));
        }
    }
    let rows = hull.basis.rows().to_vec();
    let images = rows.iter().map(|r| s.apply(r)).collect::<Result<Vec<_>>>()?;
    Ok((hull.dim(), interpolate(t, &rows, &images, deg)?))
}

/// Whether `S` lies in the closure of `k[T]`, for `T` with a declared
/// annihilating polynomial `p`. Looks for least-degree interpolants on the
/// hull of each probe, of each pair of probes, and of all probes together.
pub fn closure_poly_membership(t: &Operator, s: &Operator, probes: &[SparseVec]) -> Result<PolyMembership> {
    let p = t.declared_annihilator().ok_or_else(|| {
        Error::Precondition("operator has no declared annihilating polynomial".into())
    })?;
    if probes.is_empty() {
        return Err(Error::Precondition("at least one probe is required".into()));
    }
    if s.field() != t.field() {
        return Err(Error::FieldMismatch(t.field(), s.field()));
    }
    t.domain().check(&s.domain())?;
    let mut interpolants = Vec::with_capacity(probes.len());
    for (i, probe) in probes.iter().enumerate() {
        match hull_interpolant(t, s, &p, std::slice::from_ref(probe))? {
            (_, Some(q)) => interpolants.push(q),
            (dim, None) => {
                return Ok(PolyMembership::NotInClosure(MembershipEvidence::NoInterpolant {
                    probes: vec![i],
                    hull_dim: dim,
                }))
            }
        }
    }
    for i in 0..probes.len() {
        for j in i + 1..probes.len() {
            let pair = [probes[i].clone(), probes[j].clone()];
            if let (dim, None) = hull_interpolant(t, s, &p, &pair)? {
                return Ok(PolyMembership::NotInClosure(MembershipEvidence::NoInterpolant {
                    probes: vec![i, j],
                    hull_dim: dim,
                }));
            }
        }
    }
    match hull_interpolant(t, s, &p, probes)? {
        (_, Some(q)) => Ok(PolyMembership::InClosure { q, interpolants }),
        (dim, None) => Ok(PolyMembership::NotInClosure(MembershipEvidence::NoInterpolant {
            probes: (0..probes.len()).collect(),
            hull_dim: dim,
        })),
    }
}

/// The bilateral shift wrapped onto `m` indices: `v_i -> v_{(i-1) mod m}`.
pub fn cyclic_truncation(field: FieldSpec, m: usize) -> Matrix {
    let mut out = Matrix::zeros(field, m, m);
    for i in 0..m {
        out.set((i + m - 1) % m, i, field.one());
    }
    out
}

/// Least-degree interpolants of `T^{-1}` by polynomials in `T` on cyclic
/// truncations of the bilateral shift. The degree is `m - 1` on a
/// truncation of size `m`, so no single polynomial survives enlargement.
pub fn bilateral_inverse_degree_growth(field: FieldSpec, sizes: &[usize]) -> Result<PolyMembership> {
    let mut degrees = Vec::with_capacity(sizes.len());
    for &m in sizes {
        let c = cyclic_truncation(field, m);
        let inv = c.inverse().expect("permutation matrix");
        let t = Operator::matrix(c)?;
        let s = Operator::matrix(inv)?;
        let probe = SparseVec::basis(field, Domain::Finite(m), 0)?;
        match closure_poly_membership(&t, &s, &[probe])? {
            PolyMembership::InClosure { q, .. } => degrees.push((m, q.degree().unwrap_or(0))),
            other => return Ok(other),
        }
    }
    let grows = degrees.windows(2).all(|w| w[1].1 > w[0].1);
    if grows && degrees.len() >= 2 {
        Ok(PolyMembership::NotInClosure(MembershipEvidence::DegreeGrowth { degrees }))
    } else {
        Err(Error::Precondition(format!("no degree growth observed: {degrees:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LaurentProbe {
    /// `S` agrees with `Σ a_e T^e` on `v_l` for every `|l| <= radius`.
    Matches {
        coefficients: BTreeMap<i64, Scalar>,
        radius: usize,
    },
    /// `S` commutes with `T` on the window but differs from the Laurent
    /// polynomial read off at `v_0`, first at `v_position`.
    Mismatch {
        coefficients: BTreeMap<i64, Scalar>,
        position: i64,
    },
    /// Positions in the window where `ST ≠ TS`.
    NotCommuting { positions: Vec<i64> },
}

/// Checks that `S` acts as a Laurent polynomial in the bilateral shift `T`
/// on the window `[-radius, radius]`, reading the coefficients off `S(v_0)`:
/// `S(v_0) = Σ a_i v_i` gives `S = Σ a_i T^{-i}`.
pub fn laurent_centralizer_probe(s: &Operator, radius: usize) -> Result<LaurentProbe> {
    if radius == 0 {
        return Err(Error::Precondition("radius must be at least 1".into()));
    }
    let field = s.field();
    let t = Operator::bilateral_shift(field);
    t.domain().check(&s.domain())?;
    let r = radius as i64;
    let mut positions = Vec::new();
    for l in -r..=r {
        let v = SparseVec::basis(field, Domain::Int, l)?;
        if s.apply(&t.apply(&v)?)? != t.apply(&s.apply(&v)?)? {
            positions.push(l);
        }
    }
    if !positions.is_empty() {
        return Ok(LaurentProbe::NotCommuting { positions });
    }
    let s0 = s.column(0)?;
    let coefficients: BTreeMap<i64, Scalar> = s0.iter().map(|(i, c)| (-i, c.clone())).collect();
    for l in -r..=r {
        // Σ a_i T^{-i} v_l = Σ a_i v_{l+i}
        let expected = SparseVec::from_pairs(field, Domain::Int, s0.iter().map(|(i, c)| (i + l, c.clone())))?;
        if s.column(l)? != expected {
            return Ok(LaurentProbe::Mismatch {
                coefficients,
                position: l,
            });
        }
    }
    Ok(LaurentProbe::Matches {
        coefficients,
        radius,
    })
}

/// Per-hull evidence for the open question whether `C(C(T))` equals the
/// closure of `k[T]` for triangularizable `T`: dimensions of the double
/// centralizer and of the polynomial algebra of each restriction. Evidence
/// only; no verdict is drawn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenQuestionEvidence {
    /// `(hull dim, dim C(C(T|W)), dim k[T|W])` per seed; `None` if the
    /// seed's hull did not close within the fuel.
    pub hulls: Vec<Option<(usize, usize, usize)>>,
}

pub fn open_question_probe(t: &Operator, seeds: &[SparseVec], fuel: usize) -> Result<OpenQuestionEvidence> {
    let mut hulls = Vec::with_capacity(seeds.len());
    for seed in seeds {
        match saturate_vectors(t, std::slice::from_ref(seed), fuel)? {
            Saturation::Closed { hull, .. } => {
                let (_, (dc, pa)) = double_cent_equals_poly(&hull.matrix)?;
                hulls.push(Some((hull.dim(), dc, pa)));
            }
            Saturation::Diverged(_) => hulls.push(None),
        }
    }
    Ok(OpenQuestionEvidence { hulls })
}
