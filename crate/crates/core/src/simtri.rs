//! Simultaneous triangularization of finite commuting families.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactfield::{split_linear, FieldSpec, Scalar, SplitFailure, SplitResult};
use crate::linspace::{kernel_basis, Domain, Matrix, QuotientSpace, SparseVec, SubspaceBasis};
use crate::operators::{quotient_operator, restrict, Operator};
use crate::triangulate::{
    matrix_primary_components, verify_triangular, OrderIndex, OrderedBasis, SaturationTrace,
    TriangularCheck,
};

/// A finite nonempty list of operators on one space.
#[derive(Clone, Debug)]
pub struct OperatorFamily {
    members: Vec<Operator>,
}

impl OperatorFamily {
    pub fn new(members: Vec<Operator>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::Precondition("a family needs at least one member".into()));
        };
        for m in &members[1..] {
            if m.field() != first.field() {
                return Err(Error::FieldMismatch(first.field(), m.field()));
            }
            first.domain().check(&m.domain())?;
        }
        Ok(OperatorFamily { members })
    }

    pub fn members(&self) -> &[Operator] {
        &self.members
    }

    pub fn field(&self) -> FieldSpec {
        self.members[0].field()
    }

    pub fn domain(&self) -> Domain {
        self.members[0].domain()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Two members whose compositions differ on a probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationWitness {
    pub left: usize,
    pub right: usize,
    pub probe: SparseVec,
    /// `left(right(probe))`
    pub left_right: SparseVec,
    /// `right(left(probe))`
    pub right_left: SparseVec,
}

/// `Ok(None)` when every pair commutes on every probe.
pub fn commutes_on(family: &OperatorFamily, probes: &[SparseVec]) -> Result<Option<CommutationWitness>> {
    let m = &family.members;
    for probe in probes {
        let images: Vec<SparseVec> = m.iter().map(|t| t.apply(probe)).collect::<Result<_>>()?;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                let left_right = m[i].apply(&images[j])?;
                let right_left = m[j].apply(&images[i])?;
                if left_right != right_left {
                    return Ok(Some(CommutationWitness {
                        left: i,
                        right: j,
                        probe: probe.clone(),
                        left_right,
                        right_left,
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn matrices_commute(ms: &[Matrix]) -> Option<(usize, usize, usize)> {
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let ab = ms[i].mul(&ms[j]);
            let ba = ms[j].mul(&ms[i]);
            if ab != ba {
                let col = (0..ab.ncols()).find(|&c| ab.column(c) != ba.column(c)).expect("differ");
                return Some((i, j, col));
            }
        }
    }
    None
}

fn non_commuting(ms: &[Matrix], (i, j, col): (usize, usize, usize)) -> Error {
    let n = ms[i].nrows();
    let field = ms[i].field();
    let mut e = vec![field.zero(); n];
    e[col] = field.one();
    let probe = SparseVec::from_dense(field, &e);
    Error::NonCommuting(Box::new(CommutationWitness {
        left: i,
        right: j,
        probe,
        left_right: SparseVec::from_dense(field, &ms[i].mul(&ms[j]).column(col)),
        right_left: SparseVec::from_dense(field, &ms[j].mul(&ms[i]).column(col)),
    }))
}

/// Matrix of `m` restricted to the invariant subspace `w` of `Finite(n)`,
/// in the echelon coordinates of `w`.
fn restrict_matrix(m: &Matrix, w: &SubspaceBasis) -> Result<Matrix> {
    Ok(restrict(&Operator::matrix(m.clone())?, w)?.matrix)
}

/// A common eigenvector of commuting matrices, with the eigenvalue of
/// each member. Members are processed in order; each contributes the
/// eigenspace of its least eigenvalue on what remains.
pub fn common_eigenvector(members: &[Matrix]) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let Some(first) = members.first() else {
        return Err(Error::Precondition("a family needs at least one member".into()));
    };
    let n = first.nrows();
    if n == 0 {
        return Err(Error::ZeroHull);
    }
    if let Some(w) = matrices_commute(members) {
        return Err(non_commuting(members, w));
    }
    let field = first.field();
    let mut w = SubspaceBasis::full(field, n);
    let mut eigenvalues = Vec::with_capacity(members.len());
    for m in members {
        let local = restrict_matrix(m, &w)?;
        let a = match split_linear(&local.minimal_polynomial())? {
            SplitResult::Split(roots) => roots[0].0.clone(),
            SplitResult::Failure(f) => return Err(Error::Split(f)),
        };
        let ker = kernel_basis(&local.shift(&a));
        let lifted: Vec<SparseVec> = ker.rows().iter().map(|r| w.lift(&r.to_dense(w.dim()))).collect();
        w = SubspaceBasis::span(field, Domain::Finite(n), &lifted)?;
        eigenvalues.push(a);
    }
    Ok((w.rows()[0].to_dense(n), eigenvalues))
}

/// Joint generalized eigenspaces of commuting matrices, ordered
/// lexicographically by the tuple of eigenvalues.
fn joint_components(members: &[Matrix]) -> Result<std::result::Result<Vec<(Vec<Scalar>, SubspaceBasis)>, (usize, SplitFailure)>> {
    let n = members[0].nrows();
    let field = members[0].field();
    let mut parts = vec![(Vec::new(), SubspaceBasis::full(field, n))];
    for (k, m) in members.iter().enumerate() {
        let comps = match matrix_primary_components(m) {
            Ok(c) => c,
            Err(Error::Split(f)) => return Ok(Err((k, f))),
            Err(e) => return Err(e),
        };
        let mut next = Vec::new();
        for (tuple, space) in &parts {
            for c in &comps {
                let meet = space.intersection(&c.basis)?;
                if !meet.is_zero() {
                    let mut t = tuple.clone();
                    t.push(c.eigenvalue.clone());
                    next.push((t, meet));
                }
            }
        }
        parts = next;
    }
    Ok(Ok(parts))
}

#[derive(Clone, Debug)]
pub struct SimultaneousCertificate {
    pub hull: SubspaceBasis,
    pub trace: SaturationTrace,
    pub basis: OrderedBasis,
    /// Eigenvalue tuple of each block, one scalar per member.
    pub block_eigenvalues: Vec<Vec<Scalar>>,
    pub checks: Vec<TriangularCheck>,
}

#[derive(Clone, Debug)]
pub enum SimultaneousVerdict {
    Triangularized(Box<SimultaneousCertificate>),
    /// A member's minimal polynomial on the joint hull does not split.
    SplitFailure {
        member: usize,
        hull: SubspaceBasis,
        failure: SplitFailure,
    },
    /// Joint saturation diverged and member `member` is locally escaping.
    Escaping { member: usize, trace: SaturationTrace },
    Inconclusive(SaturationTrace),
}

impl SimultaneousVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            SimultaneousVerdict::Triangularized(_) => "triangularizable",
            SimultaneousVerdict::SplitFailure { .. } | SimultaneousVerdict::Escaping { .. } => {
                "not_triangularizable"
            }
            SimultaneousVerdict::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn certificate(&self) -> Option<&SimultaneousCertificate> {
        match self {
            SimultaneousVerdict::Triangularized(c) => Some(c),
            _ => None,
        }
    }
}

/// Saturates `w` under all members at once, one round-robin pass per stage.
pub fn joint_saturate(
    family: &OperatorFamily,
    w: &SubspaceBasis,
    fuel: usize,
) -> Result<(SubspaceBasis, SaturationTrace)> {
    if fuel == 0 {
        return Err(Error::Precondition("saturation fuel must be at least 1".into()));
    }
    let mut current = w.clone();
    let mut stages = vec![current.clone()];
    let mut frontier = w.rows().to_vec();
    for round in 1..=fuel {
        let mut added = Vec::new();
        for v in &frontier {
            for t in &family.members {
                if let Some(new) = current.insert(&t.apply(v)?)? {
                    added.push(new);
                }
            }
        }
        stages.push(current.clone());
        if added.is_empty() {
            return Ok((
                current,
                SaturationTrace {
                    stages,
                    stabilized: true,
                    fuel_used: round,
                },
            ));
        }
        frontier = added;
    }
    Ok((
        current,
        SaturationTrace {
            stages,
            stabilized: false,
            fuel_used: fuel,
        },
    ))
}

/// One ordered basis of the joint hull of `seeds` in which every member is
/// triangular. The hull is split into joint generalized eigenspaces; inside
/// each, common eigenvectors of the induced quotient family are extracted
/// and lifted one at a time.
pub fn simultaneous_triangularize(
    family: &OperatorFamily,
    seeds: &[SparseVec],
    fuel: usize,
) -> Result<SimultaneousVerdict> {
    if seeds.is_empty() {
        return Err(Error::Precondition("at least one seed vector is required".into()));
    }
    if let Some(w) = commutes_on(family, seeds)? {
        return Err(Error::NonCommuting(Box::new(w)));
    }
    let field = family.field();
    let w = SubspaceBasis::span(field, family.domain(), seeds)?;
    let (hull, trace) = joint_saturate(family, &w, fuel)?;
    if !trace.stabilized {
        if let Some(member) = family.members.iter().position(Operator::locally_escaping) {
            return Ok(SimultaneousVerdict::Escaping { member, trace });
        }
        return Ok(SimultaneousVerdict::Inconclusive(trace));
    }
    if let Some(w) = commutes_on(family, hull.rows())? {
        return Err(Error::NonCommuting(Box::new(w)));
    }
    let d = hull.dim();
    let matrices: Vec<Matrix> = family
        .members
        .iter()
        .map(|t| Ok(restrict(t, &hull)?.matrix))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(d);
    let mut block_eigenvalues = Vec::new();
    if d > 0 {
        let parts = match joint_components(&matrices)? {
            Ok(p) => p,
            Err((member, failure)) => {
                return Ok(SimultaneousVerdict::SplitFailure { member, hull, failure })
            }
        };
        let local_ops: Vec<Operator> = matrices
            .iter()
            .map(|m| Operator::matrix(m.clone()))
            .collect::<Result<_>>()?;
        for (block, (tuple, space)) in parts.into_iter().enumerate() {
            let mut built = SubspaceBasis::zero(field, Domain::Finite(d));
            let mut position = 0;
            while built.dim() < space.dim() {
                let quotient = QuotientSpace::new(&space, &built)?;
                let induced: Vec<Matrix> = local_ops
                    .iter()
                    .map(|t| quotient_operator(t, &space, &built))
                    .collect::<Result<_>>()?;
                let (coords, _) = common_eigenvector(&induced)?;
                let v = quotient.lift(&coords);
                built.insert(&v)?;
                entries.push((OrderIndex::new(block, 1, position), hull.lift(&v.to_dense(d))));
                position += 1;
            }
            block_eigenvalues.push(tuple);
        }
    }
    let eigenvalues: BTreeMap<usize, Scalar> = block_eigenvalues
        .iter()
        .enumerate()
        .map(|(b, t)| (b, t[0].clone()))
        .collect();
    // Strict only when every member is nilpotent on the hull.
    let strict = block_eigenvalues.len() == 1 && block_eigenvalues[0].iter().all(Scalar::is_zero);
    let basis = OrderedBasis::new(entries, strict, eigenvalues)?;
    let checks: Vec<TriangularCheck> = family
        .members
        .iter()
        .map(|t| verify_triangular(t, &basis))
        .collect::<Result<_>>()?;
    assert!(checks.iter().all(|c| c.triangular), "common basis failed verification");
    Ok(SimultaneousVerdict::Triangularized(Box::new(SimultaneousCertificate {
        hull,
        trace,
        basis,
        block_eigenvalues,
        checks,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn op(rows: &[&[i64]]) -> Operator {
        Operator::from_i64(Q, rows).unwrap()
    }

    fn std_basis(n: usize) -> Vec<SparseVec> {
        (0..n)
            .map(|i| SparseVec::basis(Q, Domain::Finite(n), i as i64).unwrap())
            .collect()
    }

    fn dense(v: &[i64]) -> SparseVec {
        SparseVec::from_dense(Q, &v.iter().map(|&x| Q.from_i64(x)).collect::<Vec<_>>())
    }

    #[test]
    fn commutation_checks() {
        let m = op(&[&[1, 2], &[3, 4]]);
        let m2 = Operator::compose(&m, &m).unwrap();
        let fam = OperatorFamily::new(vec![m.clone(), m2]).unwrap();
        assert!(commutes_on(&fam, &std_basis(2)).unwrap().is_none());
        let fam = OperatorFamily::new(vec![op(&[&[0, 1], &[0, 0]]), op(&[&[0, 0], &[1, 0]])]).unwrap();
        let w = commutes_on(&fam, &std_basis(2)[..1]).unwrap().unwrap();
        assert_eq!(w.left_right, dense(&[1, 0]));
        assert!(w.right_left.is_zero());
        let single = OperatorFamily::new(vec![m]).unwrap();
        assert!(commutes_on(&single, &std_basis(2)).unwrap().is_none());
    }

    #[test]
    fn common_eigenvector_examples() {
        let d12 = Matrix::from_i64(Q, &[&[1, 0], &[0, 2]]);
        let d34 = Matrix::from_i64(Q, &[&[3, 0], &[0, 4]]);
        let (v, a) = common_eigenvector(&[d12, d34]).unwrap();
        assert_eq!(v, vec![Q.one(), Q.zero()]);
        assert_eq!(a, vec![Q.from_i64(1), Q.from_i64(3)]);
        let (v, a) = common_eigenvector(&[Matrix::identity(Q, 3)]).unwrap();
        assert_eq!(v, vec![Q.one(), Q.zero(), Q.zero()]);
        assert_eq!(a, vec![Q.one()]);
        let n = Matrix::from_i64(Q, &[&[0, 1], &[0, 0]]);
        let (v, a) = common_eigenvector(&[n.clone(), n]).unwrap();
        assert_eq!(v, vec![Q.one(), Q.zero()]);
        assert_eq!(a, vec![Q.zero(), Q.zero()]);
    }

    #[test]
    fn swap_and_its_square() {
        let m = op(&[&[0, 1], &[1, 0]]);
        let m2 = Operator::compose(&m, &m).unwrap();
        let fam = OperatorFamily::new(vec![m, m2]).unwrap();
        let v = simultaneous_triangularize(&fam, &std_basis(2), 8).unwrap();
        let c = v.certificate().unwrap();
        assert_eq!(c.basis.vectors(), vec![dense(&[1, -1]), dense(&[1, 1])]);
        assert!(c.checks.iter().all(|c| c.triangular));
    }

    #[test]
    fn unipotent_pair() {
        let fam = OperatorFamily::new(vec![op(&[&[1, 1], &[0, 1]]), op(&[&[1, 2], &[0, 1]])]).unwrap();
        let v = simultaneous_triangularize(&fam, &std_basis(2), 8).unwrap();
        assert_eq!(v.certificate().unwrap().basis.vectors(), std_basis(2));
    }

    #[test]
    fn non_commuting_rejected() {
        let fam = OperatorFamily::new(vec![op(&[&[1, 0], &[0, 2]]), op(&[&[1, 1], &[0, 2]])]).unwrap();
        assert!(matches!(
            simultaneous_triangularize(&fam, &std_basis(2), 8),
            Err(Error::NonCommuting(_))
        ));
    }

    #[test]
    fn singleton_matches_triangularize() {
        let t = op(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, 1]]);
        let fam = OperatorFamily::new(vec![t.clone()]).unwrap();
        let s = simultaneous_triangularize(&fam, &std_basis(3), 8).unwrap();
        let single = crate::triangulate::triangularize(&t, &std_basis(3), 8).unwrap();
        assert_eq!(
            s.certificate().unwrap().basis.vectors(),
            single.certificate().unwrap().basis.vectors()
        );
    }

    #[test]
    fn rotation_member_fails_to_split() {
        let fam = OperatorFamily::new(vec![Operator::identity(Q, Domain::Finite(2)), op(&[&[0, -1], &[1, 0]])])
            .unwrap();
        match simultaneous_triangularize(&fam, &std_basis(2), 8).unwrap() {
            SimultaneousVerdict::SplitFailure { member, .. } => assert_eq!(member, 1),
            other => panic!("{}", other.label()),
        }
    }
}
