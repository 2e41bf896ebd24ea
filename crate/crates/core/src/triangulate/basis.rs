use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::exactfield::{Scalar, SplitFailure};
use crate::linspace::{CoordinateSystem, Matrix, SparseVec};
use crate::operators::{InvariantHull, Operator};

use super::primary::{kernel_levels, primary_components, PrimaryComponent};
use super::saturate::{saturate_vectors, Saturation, SaturationTrace};

/// Label of a basis vector, compared lexicographically. `block` counts
/// eigenvalues in canonical scalar order, `level` is the `i` of
/// `ker (T - a)^i` (starting at 1), `position` counts within the level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderIndex {
    pub block: usize,
    pub level: usize,
    pub position: usize,
}

impl OrderIndex {
    pub fn new(block: usize, level: usize, position: usize) -> Self {
        OrderIndex {
            block,
            level,
            position,
        }
    }
}

impl fmt::Display for OrderIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.block, self.level, self.position)
    }
}

/// A finite prefix of a well-ordered basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedBasis {
    entries: Vec<(OrderIndex, SparseVec)>,
    strict: bool,
    eigenvalues: BTreeMap<usize, Scalar>,
}

impl OrderedBasis {
    /// Checks that indices strictly increase and the vectors are independent.
    pub fn new(
        entries: Vec<(OrderIndex, SparseVec)>,
        strict: bool,
        eigenvalues: BTreeMap<usize, Scalar>,
    ) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Precondition("order indices must strictly increase".into()));
        }
        if let Some((_, first)) = entries.first() {
            let vs: Vec<SparseVec> = entries.iter().map(|(_, v)| v.clone()).collect();
            CoordinateSystem::new(first.field(), &vs)?;
        }
        Ok(OrderedBasis {
            entries,
            strict,
            eigenvalues,
        })
    }

    /// The vectors in the given order, labelled `(0, 0, i)`.
    pub fn from_vectors(vectors: Vec<SparseVec>) -> Result<Self> {
        let entries = vectors
            .into_iter()
            .enumerate()
            .map(|(i, v)| (OrderIndex::new(0, 0, i), v))
            .collect();
        OrderedBasis::new(entries, false, BTreeMap::new())
    }

    pub fn entries(&self) -> &[(OrderIndex, SparseVec)] {
        &self.entries
    }

    pub fn vectors(&self) -> Vec<SparseVec> {
        self.entries.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn eigenvalues(&self) -> &BTreeMap<usize, Scalar> {
        &self.eigenvalues
    }

    fn coordinate_system(&self) -> Result<Option<CoordinateSystem>> {
        match self.entries.first() {
            None => Ok(None),
            Some((_, v)) => Ok(Some(CoordinateSystem::new(v.field(), &self.vectors())?)),
        }
    }
}

/// Why a basis fails to triangularize an operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriangularityWitness {
    /// The image of entry `entry` is outside the span of the basis.
    Escapes { entry: usize, image: SparseVec },
    /// The image of entry `entry` has a nonzero coordinate at the later
    /// entry `at`.
    AboveDiagonal {
        entry: usize,
        at: usize,
        coefficient: Scalar,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularCheck {
    pub triangular: bool,
    pub strict: bool,
    pub witness: Option<TriangularityWitness>,
}

/// Matrix of `t` in the coordinates of `b`: column `j` holds the
/// coordinates of `t(b_j)`.
pub fn matrix_in_basis(t: &Operator, b: &OrderedBasis) -> Result<Matrix> {
    let n = b.len();
    let Some(cs) = b.coordinate_system()? else {
        return Ok(Matrix::zeros(t.field(), 0, 0));
    };
    let mut cols = Vec::with_capacity(n);
    for (_, v) in &b.entries {
        let image = t.apply(v)?;
        match cs.express(&image) {
            Some(c) => cols.push(c),
            None => {
                return Err(Error::NotInvariant {
                    witness: v.clone(),
                    image,
                })
            }
        }
    }
    Ok(Matrix::from_columns(t.field(), n, &cols))
}

/// Checks `t(v) ∈ span{u ∈ B : u ≤ v}` for every entry, and strictness
/// (`u < v`).
pub fn verify_triangular(t: &Operator, b: &OrderedBasis) -> Result<TriangularCheck> {
    let Some(cs) = b.coordinate_system()? else {
        return Ok(TriangularCheck {
            triangular: true,
            strict: true,
            witness: None,
        });
    };
    // Escapes are reported before order violations: they mean the span of
    // the basis is not even invariant.
    let mut coords = Vec::with_capacity(b.len());
    for (j, (_, v)) in b.entries.iter().enumerate() {
        let image = t.apply(v)?;
        match cs.express(&image) {
            Some(c) => coords.push(c),
            None => {
                return Ok(TriangularCheck {
                    triangular: false,
                    strict: false,
                    witness: Some(TriangularityWitness::Escapes { entry: j, image }),
                })
            }
        }
    }
    let mut strict = true;
    for (j, c) in coords.iter().enumerate() {
        if let Some(at) = (j + 1..c.len()).find(|&i| !c[i].is_zero()) {
            return Ok(TriangularCheck {
                triangular: false,
                strict: false,
                witness: Some(TriangularityWitness::AboveDiagonal {
                    entry: j,
                    at,
                    coefficient: c[at].clone(),
                }),
            });
        }
        strict &= c[j].is_zero();
    }
    Ok(TriangularCheck {
        triangular: true,
        strict,
        witness: None,
    })
}

/// Entries reachable from `entry` through nonzero coordinates
/// `π_u T π_w ≠ 0`, including `entry` itself. Returned as sorted entry
/// indices.
pub fn dependency_downset(t: &Operator, b: &OrderedBasis, entry: usize) -> Result<Vec<usize>> {
    if entry >= b.len() {
        return Err(Error::Precondition(format!("no entry {entry} in a basis of length {}", b.len())));
    }
    if !verify_triangular(t, b)?.triangular {
        return Err(Error::Precondition("operator is not triangular in this basis".into()));
    }
    let m = matrix_in_basis(t, b)?;
    let mut seen = BTreeSet::from([entry]);
    let mut stack = vec![entry];
    while let Some(w) = stack.pop() {
        for u in 0..m.nrows() {
            if !m.get(u, w).is_zero() && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// A certified triangularization of the hull generated by the seeds.
#[derive(Clone, Debug)]
pub struct TriangularCertificate {
    pub hull: InvariantHull,
    pub trace: SaturationTrace,
    pub components: Vec<PrimaryComponent>,
    pub basis: OrderedBasis,
}

#[derive(Clone, Debug)]
pub enum NonTriangularWitness {
    /// The minimal polynomial on a finite invariant hull does not split.
    Split {
        hull: InvariantHull,
        failure: SplitFailure,
    },
    /// Saturation diverged for an operator whose nonzero orbits are known
    /// to be infinite, so the seed lies in no finite invariant subspace.
    Escaping(SaturationTrace),
}

#[derive(Clone, Debug)]
pub enum TriangularizabilityVerdict {
    Triangularizable(Box<TriangularCertificate>),
    NotTriangularizable(Box<NonTriangularWitness>),
    Inconclusive(SaturationTrace),
}

impl TriangularizabilityVerdict {
    pub fn certificate(&self) -> Option<&TriangularCertificate> {
        match self {
            TriangularizabilityVerdict::Triangularizable(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_definitive(&self) -> bool {
        !matches!(self, TriangularizabilityVerdict::Inconclusive(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            TriangularizabilityVerdict::Triangularizable(_) => "triangularizable",
            TriangularizabilityVerdict::NotTriangularizable(_) => "not_triangularizable",
            TriangularizabilityVerdict::Inconclusive(_) => "inconclusive",
        }
    }
}

/// Triangularizing basis of a finite invariant hull: generalized
/// eigenspaces in eigenvalue order, each filtered by the kernels of
/// `(T - a)^i`.
pub fn triangularize_hull(
    hull: &InvariantHull,
) -> Result<std::result::Result<(Vec<PrimaryComponent>, OrderedBasis), SplitFailure>> {
    let d = hull.dim();
    let field = hull.matrix.field();
    if d == 0 {
        return Ok(Ok((Vec::new(), OrderedBasis::new(Vec::new(), true, BTreeMap::new())?)));
    }
    let components = match primary_components(hull) {
        Ok(c) => c,
        Err(Error::Split(f)) => return Ok(Err(f)),
        Err(e) => return Err(e),
    };
    let mut entries = Vec::with_capacity(d);
    let mut eigenvalues = BTreeMap::new();
    for (block, comp) in components.iter().enumerate() {
        eigenvalues.insert(block, comp.eigenvalue.clone());
        let n = hull.matrix.shift(&comp.eigenvalue);
        for (i, level) in kernel_levels(&n, comp.multiplicity).into_iter().enumerate() {
            for (pos, coords) in level.into_iter().enumerate() {
                let v = hull.basis.lift(&coords.to_dense(d));
                entries.push((OrderIndex::new(block, i + 1, pos), v));
            }
        }
    }
    let strict = components.len() == 1 && components[0].eigenvalue == field.zero();
    Ok(Ok((components, OrderedBasis::new(entries, strict, eigenvalues)?)))
}

/// Saturates the span of `seeds` and triangularizes the resulting hull.
pub fn triangularize(t: &Operator, seeds: &[SparseVec], fuel: usize) -> Result<TriangularizabilityVerdict> {
    if seeds.is_empty() {
        return Err(Error::Precondition("at least one seed vector is required".into()));
    }
    let (hull, trace) = match saturate_vectors(t, seeds, fuel)? {
        Saturation::Closed { hull, trace } => (hull, trace),
        Saturation::Diverged(trace) => {
            return Ok(if t.locally_escaping() {
                TriangularizabilityVerdict::NotTriangularizable(Box::new(NonTriangularWitness::Escaping(trace)))
            } else {
                TriangularizabilityVerdict::Inconclusive(trace)
            });
        }
    };
    match triangularize_hull(&hull)? {
        Ok((components, basis)) => {
            let check = verify_triangular(t, &basis)?;
            assert!(check.triangular, "constructed basis failed verification: {check:?}");
            assert!(!basis.strict() || check.strict, "strict flag not confirmed");
            Ok(TriangularizabilityVerdict::Triangularizable(Box::new(TriangularCertificate {
                hull,
                trace,
                components,
                basis,
            })))
        }
        Err(failure) => Ok(TriangularizabilityVerdict::NotTriangularizable(Box::new(
            NonTriangularWitness::Split { hull, failure },
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::linspace::Domain;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn std_basis(field: FieldSpec, n: usize) -> Vec<SparseVec> {
        (0..n)
            .map(|i| SparseVec::basis(field, Domain::Finite(n), i as i64).unwrap())
            .collect()
    }

    fn dense(field: FieldSpec, v: &[i64]) -> SparseVec {
        SparseVec::from_dense(field, &v.iter().map(|&x| field.from_i64(x)).collect::<Vec<_>>())
    }

    fn cert(v: TriangularizabilityVerdict) -> TriangularCertificate {
        match v {
            TriangularizabilityVerdict::Triangularizable(c) => *c,
            other => panic!("expected certificate, got {}", other.label()),
        }
    }

    #[test]
    fn strict_nilpotent_block() {
        let t = Operator::from_i64(Q, &[&[0, 1], &[0, 0]]).unwrap();
        let c = cert(triangularize(&t, &std_basis(Q, 2), 8).unwrap());
        assert!(c.basis.strict());
        assert_eq!(c.basis.vectors(), std_basis(Q, 2));
        assert_eq!(c.basis.eigenvalues().values().cloned().collect::<Vec<_>>(), vec![Q.zero()]);
    }

    #[test]
    fn swap_over_f2() {
        let f2 = FieldSpec::prime(2).unwrap();
        let t = Operator::from_i64(f2, &[&[0, 1], &[1, 0]]).unwrap();
        let c = cert(triangularize(&t, &std_basis(f2, 2), 8).unwrap());
        assert_eq!(c.components.len(), 1);
        assert_eq!(c.components[0].multiplicity, 2);
        assert_eq!(c.basis.vectors(), vec![dense(f2, &[1, 1]), dense(f2, &[0, 1])]);
        assert!(!c.basis.strict());
    }

    #[test]
    fn swap_over_q() {
        let t = Operator::from_i64(Q, &[&[0, 1], &[1, 0]]).unwrap();
        let c = cert(triangularize(&t, &std_basis(Q, 2), 8).unwrap());
        assert_eq!(c.basis.vectors(), vec![dense(Q, &[1, -1]), dense(Q, &[1, 1])]);
        let labels: Vec<OrderIndex> = c.basis.entries().iter().map(|e| e.0).collect();
        assert_eq!(labels, vec![OrderIndex::new(0, 1, 0), OrderIndex::new(1, 1, 0)]);
    }

    #[test]
    fn rotation_is_not_triangularizable_over_q() {
        let t = Operator::from_i64(Q, &[&[0, -1], &[1, 0]]).unwrap();
        match triangularize(&t, &std_basis(Q, 2), 8).unwrap() {
            TriangularizabilityVerdict::NotTriangularizable(w) => match *w {
                NonTriangularWitness::Split { failure, .. } => {
                    assert_eq!(failure.factor, crate::exactfield::Poly::from_i64(Q, &[1, 0, 1]))
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{}", other.label()),
        }
    }

    #[test]
    fn escaping_vs_inconclusive() {
        let v0 = SparseVec::basis(Q, Domain::Int, 0).unwrap();
        let t = Operator::bilateral_shift(Q);
        assert_eq!(triangularize(&t, &[v0.clone()], 16).unwrap().label(), "not_triangularizable");
        // Same columns through a column map: no analytic annotation.
        let opaque = Operator::columns(Q, Domain::Int, [], Some(t)).unwrap();
        assert_eq!(triangularize(&opaque, &[v0], 16).unwrap().label(), "inconclusive");
    }

    #[test]
    fn verify_examples() {
        let nat = |i: i64| SparseVec::basis(Q, Domain::Nat, i).unwrap();
        let prefix = OrderedBasis::from_vectors((0..6).map(nat).collect()).unwrap();
        let l = verify_triangular(&Operator::left_shift(Q), &prefix).unwrap();
        assert!(l.triangular && l.strict);
        let id = verify_triangular(&Operator::identity(Q, Domain::Nat), &prefix).unwrap();
        assert!(id.triangular && !id.strict);
        let r = verify_triangular(&Operator::right_shift(Q), &prefix).unwrap();
        assert_eq!(
            r.witness,
            Some(TriangularityWitness::Escapes { entry: 5, image: nat(6) })
        );
    }

    #[test]
    fn downsets() {
        let j = Operator::matrix(Matrix::jordan_block(Q, &Q.zero(), 3)).unwrap();
        let b = OrderedBasis::from_vectors(std_basis(Q, 3)).unwrap();
        assert_eq!(dependency_downset(&j, &b, 2).unwrap(), vec![0, 1, 2]);
        let id = Operator::identity(Q, Domain::Finite(3));
        assert_eq!(dependency_downset(&id, &b, 1).unwrap(), vec![1]);
        let z = Operator::zero(Q, Domain::Finite(3));
        assert_eq!(dependency_downset(&z, &b, 2).unwrap(), vec![2]);
    }
}
