use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Scalar};

use super::{Domain, SparseVec};

/// A finite-dimensional subspace held as a reduced echelon basis.
///
/// Pivots (leading ranks) strictly increase along `rows`, each pivot entry
/// is 1, and every pivot column vanishes in all other rows. The form is
/// canonical: equal subspaces have identical row lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    field: FieldSpec,
    domain: Domain,
    rows: Vec<SparseVec>,
}

impl SubspaceBasis {
    pub fn zero(field: FieldSpec, domain: Domain) -> Self {
        SubspaceBasis {
            field,
            domain,
            rows: Vec::new(),
        }
    }

    /// The span of `vectors`.
    pub fn span<'a>(
        field: FieldSpec,
        domain: Domain,
        vectors: impl IntoIterator<Item = &'a SparseVec>,
    ) -> Result<Self> {
        let mut b = SubspaceBasis::zero(field, domain);
        for v in vectors {
            b.insert(v)?;
        }
        Ok(b)
    }

    /// The whole space `Finite(n)`.
    pub fn full(field: FieldSpec, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| SparseVec::basis(field, Domain::Finite(n), i as i64).expect("in range"))
            .collect();
        SubspaceBasis {
            field,
            domain: Domain::Finite(n),
            rows,
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> Vec<u64> {
        self.rows
            .iter()
            .map(|r| r.leading_rank().expect("nonzero row"))
            .collect()
    }

    fn check(&self, v: &SparseVec) -> Result<()> {
        if v.field() != self.field {
            return Err(Error::FieldMismatch(self.field, v.field()));
        }
        self.domain.check(&v.domain())
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut r = v.clone();
        for row in &self.rows {
            let p = row.leading_rank().expect("nonzero row");
            if let Some(c) = r.get_rank_ref(p).cloned() {
                r.axpy(&-c, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.check(v).is_ok() && self.reduce(v).is_zero()
    }

    pub fn contains_subspace(&self, other: &SubspaceBasis) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Coordinates of `v` in `rows`, which are simply its entries at the
    /// pivot columns; `None` if `v` is outside the span.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(
            self.rows
                .iter()
                .map(|r| v.get_rank(r.leading_rank().expect("nonzero row")))
                .collect(),
        )
    }

    /// `Σ c_i rows_i`
    pub fn lift(&self, coords: &[Scalar]) -> SparseVec {
        SparseVec::combination(self.field, self.domain, coords.iter().zip(&self.rows))
    }

    /// Adds `v` to the span. Returns the normalized reduced remainder when
    /// `v` was new (the echelon completion vector), `None` if `v` was
    /// already in the span.
    pub fn insert(&mut self, v: &SparseVec) -> Result<Option<SparseVec>> {
        self.check(v)?;
        let rem = self.reduce(v);
        if rem.is_zero() {
            return Ok(None);
        }
        let new = rem.normalized();
        let p = new.leading_rank().expect("nonzero");
        for row in &mut self.rows {
            if let Some(c) = row.get_rank_ref(p).cloned() {
                row.axpy(&-c, &new);
            }
        }
        let at = self
            .rows
            .partition_point(|r| r.leading_rank().expect("nonzero row") < p);
        self.rows.insert(at, new.clone());
        Ok(Some(new))
    }

    pub fn sum(&self, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        let mut out = self.clone();
        for r in &other.rows {
            out.insert(r)?;
        }
        Ok(out)
    }

    /// `self ∩ other`, by the Zassenhaus-style kernel of the stacked
    /// coordinate relation `Σ a_i x_i = Σ b_j y_j`.
    pub fn intersection(&self, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        self.domain.check(&other.domain)?;
        let m = self.dim();
        let combined: Vec<&SparseVec> = self.rows.iter().chain(&other.rows).collect();
        let mut ranks: Vec<u64> = combined.iter().flat_map(|v| v.iter_ranks().map(|(r, _)| r)).collect();
        ranks.sort_unstable();
        ranks.dedup();
        // Columns: coefficients of x_i then of -y_j.
        let cols = combined.len();
        let mut mat = super::Matrix::zeros(self.field, ranks.len(), cols);
        for (j, v) in combined.iter().enumerate() {
            let sign = if j < m { self.field.one() } else { -self.field.one() };
            for (r, c) in v.iter_ranks() {
                let i = ranks.binary_search(&r).expect("collected");
                mat.set(i, j, c * &sign);
            }
        }
        let ker = super::kernel_basis(&mat);
        let mut out = SubspaceBasis::zero(self.field, self.domain);
        for k in ker.rows() {
            let coeffs = k.to_dense(cols);
            out.insert(&self.lift(&coeffs[..m]))?;
        }
        Ok(out)
    }
}

/// `rref_insert`: the echelon basis of `span(b ∪ {v})`, and whether `v`
/// was already in `span(b)`.
pub fn rref_insert(b: &SubspaceBasis, v: &SparseVec) -> Result<(SubspaceBasis, bool)> {
    let mut out = b.clone();
    let new = out.insert(v)?;
    Ok((out, new.is_none()))
}

/// True iff the sum of `parts` is direct.
pub fn direct_sum_check(parts: &[SubspaceBasis]) -> Result<bool> {
    let Some(first) = parts.first() else {
        return Ok(true);
    };
    let mut total = SubspaceBasis::zero(first.field, first.domain);
    let mut dims = 0;
    for p in parts {
        if p.field != first.field {
            return Err(Error::FieldMismatch(first.field, p.field));
        }
        first.domain.check(&p.domain)?;
        dims += p.dim();
        total = total.sum(p)?;
    }
    Ok(total.dim() == dims)
}

/// Expresses vectors in an arbitrary (not echelon) independent list.
#[derive(Clone, Debug)]
pub struct CoordinateSystem {
    field: FieldSpec,
    len: usize,
    // Echelon rows together with their expression in the original vectors.
    rows: Vec<(SparseVec, Vec<Scalar>)>,
}

impl CoordinateSystem {
    pub fn new(field: FieldSpec, vectors: &[SparseVec]) -> Result<Self> {
        let len = vectors.len();
        let mut rows: Vec<(SparseVec, Vec<Scalar>)> = Vec::with_capacity(len);
        for (j, v) in vectors.iter().enumerate() {
            if v.field() != field {
                return Err(Error::FieldMismatch(field, v.field()));
            }
            if let Some((first, _)) = rows.first() {
                first.check_compatible(v)?;
            }
            let mut vec = v.clone();
            let mut combo = vec![field.zero(); len];
            combo[j] = field.one();
            for (row, rc) in &rows {
                let p = row.leading_rank().expect("nonzero row");
                if let Some(c) = vec.get_rank_ref(p).cloned() {
                    vec.axpy(&-&c, row);
                    for (a, b) in combo.iter_mut().zip(rc) {
                        *a -= &(&c * b);
                    }
                }
            }
            let Some(p) = vec.leading_rank() else {
                return Err(Error::Dependent);
            };
            let inv = vec.get_rank(p).inv().expect("nonzero");
            let vec = vec.scale(&inv);
            let combo: Vec<Scalar> = combo.iter().map(|a| a * &inv).collect();
            for (row, rc) in rows.iter_mut() {
                if let Some(c) = row.get_rank_ref(p).cloned() {
                    row.axpy(&-&c, &vec);
                    for (a, b) in rc.iter_mut().zip(&combo) {
                        *a -= &(&c * b);
                    }
                }
            }
            rows.push((vec, combo));
        }
        Ok(CoordinateSystem { field, len, rows })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Coefficients `c` with `v = Σ c_j vectors_j`, or `None` when `v` lies
    /// outside their span.
    pub fn express(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        if let Some((first, _)) = self.rows.first() {
            first.check_compatible(v).ok()?;
        }
        let mut rem = v.clone();
        let mut out = vec![self.field.zero(); self.len];
        for (row, combo) in &self.rows {
            let p = row.leading_rank().expect("nonzero row");
            if let Some(c) = rem.get_rank_ref(p).cloned() {
                rem.axpy(&-&c, row);
                for (a, b) in out.iter_mut().zip(combo) {
                    *a += &(&c * b);
                }
            }
        }
        rem.is_zero().then_some(out)
    }
}

/// The quotient `U/W` with a fixed basis of coset representatives: the
/// echelon completions of `W` by the rows of `U`, in order.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    ambient: SubspaceBasis,
    sub: SubspaceBasis,
    reps: Vec<SparseVec>,
    coords: CoordinateSystem,
}

impl QuotientSpace {
    pub fn new(ambient: &SubspaceBasis, sub: &SubspaceBasis) -> Result<Self> {
        if !ambient.contains_subspace(sub) {
            return Err(Error::NotContained);
        }
        let mut grow = sub.clone();
        let mut reps = Vec::new();
        for r in ambient.rows() {
            if let Some(new) = grow.insert(r)? {
                reps.push(new);
            }
        }
        let all: Vec<SparseVec> = sub.rows().iter().chain(&reps).cloned().collect();
        let coords = CoordinateSystem::new(ambient.field(), &all)?;
        Ok(QuotientSpace {
            ambient: ambient.clone(),
            sub: sub.clone(),
            reps,
            coords,
        })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[SparseVec] {
        &self.reps
    }

    pub fn ambient(&self) -> &SubspaceBasis {
        &self.ambient
    }

    pub fn sub(&self) -> &SubspaceBasis {
        &self.sub
    }

    /// Coordinates of `v + W` in the representative basis.
    pub fn coordinates(&self, v: &SparseVec) -> Result<Vec<Scalar>> {
        let all = self
            .coords
            .express(v)
            .ok_or_else(|| Error::NotInSubspace(v.clone()))?;
        Ok(all[self.sub.dim()..].to_vec())
    }

    /// The representative `Σ c_i reps_i` of a quotient coordinate vector.
    pub fn lift(&self, coords: &[Scalar]) -> SparseVec {
        SparseVec::combination(self.ambient.field(), self.ambient.domain(), coords.iter().zip(&self.reps))
    }
}

/// Coordinates of `v + W` in the fixed representative basis of `U/W`.
pub fn quotient_coordinates(
    u: &SubspaceBasis,
    w: &SubspaceBasis,
    v: &SparseVec,
) -> Result<Vec<Scalar>> {
    QuotientSpace::new(u, w)?.coordinates(v)
}

/// A strictly increasing chain of subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagChain {
    spaces: Vec<SubspaceBasis>,
}

impl FlagChain {
    pub fn new(spaces: Vec<SubspaceBasis>) -> Result<Self> {
        for w in spaces.windows(2) {
            if !(w[1].contains_subspace(&w[0]) && w[1].dim() > w[0].dim()) {
                return Err(Error::Precondition(
                    "flag spaces must be strictly increasing".into(),
                ));
            }
        }
        Ok(FlagChain { spaces })
    }

    pub fn spaces(&self) -> &[SubspaceBasis] {
        &self.spaces
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(SubspaceBasis::dim).collect()
    }

    /// Starts at 0, ends at dimension `total`, and every step adds exactly
    /// one dimension.
    pub fn is_complete(&self, total: usize) -> bool {
        let dims = self.dims();
        dims.first() == Some(&0)
            && dims.last() == Some(&total)
            && dims.windows(2).all(|w| w[1] == w[0] + 1)
    }
}
