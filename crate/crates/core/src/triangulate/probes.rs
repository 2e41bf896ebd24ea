use crate::error::{Error, Result};
use crate::exactfield::{split_linear, Poly, Scalar, SplitFailure, SplitResult};
use crate::linspace::{Matrix, SparseVec};
use crate::operators::{InvariantHull, Operator};

use super::basis::{matrix_in_basis, verify_triangular, OrderedBasis};
use super::primary::local_min_poly;
use super::saturate::{saturate_vectors, Saturation, SaturationTrace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NilpotenceWitness {
    /// The hull of `probe` carries the nonzero eigenvalue `eigenvalue`.
    Eigenvalue { probe: SparseVec, eigenvalue: Scalar },
    /// The hull of `probe` has a minimal polynomial with a root-free
    /// factor, so `T` is not nilpotent there.
    Factor { probe: SparseVec, factor: Poly },
    /// The operator is locally escaping: no power of it kills `probe`.
    InfiniteOrbit { probe: SparseVec },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NilpotenceVerdict {
    /// Each probe dies; `exponents[i]` is the least `k` with `T^k(probe_i) = 0`.
    YesOnProbes { exponents: Vec<usize> },
    No(NilpotenceWitness),
    Inconclusive { probe: SparseVec, trace: SaturationTrace },
}

impl NilpotenceVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            NilpotenceVerdict::YesOnProbes { .. } => "yes_on_probes",
            NilpotenceVerdict::No(_) => "no",
            NilpotenceVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Whether `T^k(probe) = 0` for some `k <= fuel` on every probe. A probe that
/// survives is saturated to look for a nonzero eigenvalue or root-free
/// factor on its hull.
pub fn is_topologically_nilpotent(
    t: &Operator,
    probes: &[SparseVec],
    fuel: usize,
) -> Result<NilpotenceVerdict> {
    if probes.is_empty() {
        return Err(Error::Precondition("at least one probe is required".into()));
    }
    let mut exponents = Vec::with_capacity(probes.len());
    for probe in probes {
        let mut v = probe.clone();
        let mut k = 0;
        while !v.is_zero() && k < fuel {
            v = t.apply(&v)?;
            k += 1;
        }
        if v.is_zero() {
            exponents.push(k);
            continue;
        }
        let hull = match saturate_vectors(t, std::slice::from_ref(probe), fuel.max(1))? {
            Saturation::Closed { hull, .. } => hull,
            Saturation::Diverged(trace) => {
                if t.locally_escaping() {
                    return Ok(NilpotenceVerdict::No(NilpotenceWitness::InfiniteOrbit {
                        probe: probe.clone(),
                    }));
                }
                return Ok(NilpotenceVerdict::Inconclusive {
                    probe: probe.clone(),
                    trace,
                });
            }
        };
        let p = local_min_poly(&hull)?;
        // Strip the power of x; what is left is 1 exactly when T is nilpotent here.
        let mut g = p.clone();
        while g.coeff(0).is_zero() && !g.is_constant() {
            g = g.exact_div(&Poly::x(p.field())).expect("x divides");
        }
        if g.is_constant() {
            // Nilpotent on the hull, so the orbit dies within its dimension.
            while !v.is_zero() {
                v = t.apply(&v)?;
                k += 1;
            }
            exponents.push(k);
            continue;
        }
        let witness = match split_linear(&g)? {
            SplitResult::Split(roots) => NilpotenceWitness::Eigenvalue {
                probe: probe.clone(),
                eigenvalue: roots[0].0.clone(),
            },
            SplitResult::Failure(f) => match f.partial_roots.first() {
                Some((a, _)) => NilpotenceWitness::Eigenvalue {
                    probe: probe.clone(),
                    eigenvalue: a.clone(),
                },
                None => NilpotenceWitness::Factor {
                    probe: probe.clone(),
                    factor: f.factor,
                },
            },
        };
        return Ok(NilpotenceVerdict::No(witness));
    }
    Ok(NilpotenceVerdict::YesOnProbes { exponents })
}

/// The invertibility conditions evaluated on a finite hull with a
/// triangularizing basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvertibilityReport {
    /// `T` restricted to the hull is invertible.
    pub invertible_on_hull: bool,
    /// `T` is injective on the hull.
    pub injective: bool,
    /// `T(U_v) = U_v` for every prefix span `U_v` of the basis.
    pub prefix_surjective: bool,
    /// `π_v T π_v ≠ 0` for every basis vector `v`.
    pub diagonal_nonzero: bool,
    /// First basis entry with a zero diagonal coefficient.
    pub zero_diagonal_at: Option<usize>,
    /// Matrix of `T` in the basis coordinates.
    pub matrix: Matrix,
    /// Inverse in the same coordinates, when it exists.
    pub inverse: Option<Matrix>,
    /// Whether the inverse is triangular in the same basis.
    pub inverse_triangular: Option<bool>,
}

/// Evaluates the invertibility conditions of a triangular operator on the
/// span of `b`, which must equal the hull.
pub fn invertibility_report(t: &Operator, b: &OrderedBasis, hull: &InvariantHull) -> Result<InvertibilityReport> {
    if b.len() != hull.dim() || !b.vectors().iter().all(|v| hull.basis.contains(v)) {
        return Err(Error::Precondition("basis must span the hull".into()));
    }
    if !verify_triangular(t, b)?.triangular {
        return Err(Error::Precondition("operator is not triangular in this basis".into()));
    }
    let m = matrix_in_basis(t, b)?;
    let n = m.nrows();
    let zero_diagonal_at = (0..n).find(|&i| m.get(i, i).is_zero());
    let injective = hull.matrix.rank() == n;
    let prefix_surjective = (1..=n).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        m.select(&idx, &idx).rank() == k
    });
    let inverse = m.inverse();
    let inverse_triangular = inverse.as_ref().map(Matrix::is_upper_triangular);
    Ok(InvertibilityReport {
        invertible_on_hull: hull.matrix.inverse().is_some(),
        injective,
        prefix_surjective,
        diagonal_nonzero: zero_diagonal_at.is_none(),
        zero_diagonal_at,
        matrix: m,
        inverse,
        inverse_triangular,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureVerdict {
    /// Every probed hull that closed has a split minimal polynomial.
    InClosureOnProbes { hull_dims: Vec<usize> },
    NotInClosure { seed: SparseVec, failure: SplitFailure },
    /// No probe produced a finite hull.
    Inconclusive { diverged: usize },
}

impl ClosureVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            ClosureVerdict::InClosureOnProbes { .. } => "in_closure_on_probes",
            ClosureVerdict::NotInClosure { .. } => "not_in_closure",
            ClosureVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Membership in the closure of the triangularizable operators: every
/// finite invariant hull must have a split minimal polynomial. Each seed is
/// saturated on its own; diverging seeds impose no constraint.
pub fn closure_test(t: &Operator, seeds: &[SparseVec], fuel: usize) -> Result<ClosureVerdict> {
    if seeds.is_empty() {
        return Err(Error::Precondition("at least one seed is required".into()));
    }
    let mut hull_dims = Vec::new();
    let mut diverged = 0;
    for seed in seeds {
        match saturate_vectors(t, std::slice::from_ref(seed), fuel)? {
            Saturation::Diverged(_) => diverged += 1,
            Saturation::Closed { hull, .. } => {
                if hull.dim() > 0 {
                    if let SplitResult::Failure(failure) = split_linear(&local_min_poly(&hull)?)? {
                        return Ok(ClosureVerdict::NotInClosure {
                            seed: seed.clone(),
                            failure,
                        });
                    }
                }
                hull_dims.push(hull.dim());
            }
        }
    }
    if hull_dims.is_empty() {
        Ok(ClosureVerdict::Inconclusive { diverged })
    } else {
        Ok(ClosureVerdict::InClosureOnProbes { hull_dims })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::linspace::Domain;
    use crate::operators::GeneratorRule;
    use crate::triangulate::triangularize;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn std_basis(n: usize) -> Vec<SparseVec> {
        (0..n)
            .map(|i| SparseVec::basis(Q, Domain::Finite(n), i as i64).unwrap())
            .collect()
    }

    #[test]
    fn nilpotence_examples() {
        let j = Operator::matrix(Matrix::jordan_block(Q, &Q.zero(), 3)).unwrap();
        assert_eq!(
            is_topologically_nilpotent(&j, &std_basis(3), 8).unwrap(),
            NilpotenceVerdict::YesOnProbes { exponents: vec![1, 2, 3] }
        );
        let id = Operator::identity(Q, Domain::Finite(2));
        let e0 = std_basis(2).remove(0);
        assert_eq!(
            is_topologically_nilpotent(&id, &[e0.clone()], 8).unwrap(),
            NilpotenceVerdict::No(NilpotenceWitness::Eigenvalue { probe: e0, eigenvalue: Q.one() })
        );
        let l = Operator::left_shift(Q);
        let probes: Vec<SparseVec> = (0..10).map(|i| SparseVec::basis(Q, Domain::Nat, i).unwrap()).collect();
        assert_eq!(
            is_topologically_nilpotent(&l, &probes, 20).unwrap(),
            NilpotenceVerdict::YesOnProbes { exponents: (1..=10).collect() }
        );
        let r = Operator::right_shift(Q);
        assert_eq!(is_topologically_nilpotent(&r, &probes[..1], 20).unwrap().label(), "no");
    }

    #[test]
    fn rotation_has_factor_witness() {
        let rot = Operator::from_i64(Q, &[&[0, -1], &[1, 0]]).unwrap();
        match is_topologically_nilpotent(&rot, &std_basis(2)[..1], 4).unwrap() {
            NilpotenceVerdict::No(NilpotenceWitness::Factor { factor, .. }) => {
                assert_eq!(factor, Poly::from_i64(Q, &[1, 0, 1]))
            }
            other => panic!("{other:?}"),
        }
    }

    fn cert_for(t: &Operator, n: usize) -> (OrderedBasis, InvariantHull) {
        let v = triangularize(t, &std_basis(n), 8).unwrap();
        let c = v.certificate().unwrap();
        (c.basis.clone(), c.hull.clone())
    }

    #[test]
    fn invertible_upper_triangular() {
        let t = Operator::from_i64(Q, &[&[1, 1], &[0, 2]]).unwrap();
        let b = OrderedBasis::from_vectors(std_basis(2)).unwrap();
        let (_, hull) = cert_for(&t, 2);
        let r = invertibility_report(&t, &b, &hull).unwrap();
        assert!(r.invertible_on_hull && r.injective && r.prefix_surjective && r.diagonal_nonzero);
        let half = Q.from_ratio(1, 2).unwrap();
        let expected = Matrix::from_rows(Q, vec![vec![Q.one(), -&half], vec![Q.zero(), half]]).unwrap();
        assert_eq!(r.inverse, Some(expected));
        assert_eq!(r.inverse_triangular, Some(true));
        // The constructed eigenbasis also works.
        let (b2, hull2) = cert_for(&t, 2);
        assert!(invertibility_report(&t, &b2, &hull2).unwrap().inverse_triangular.unwrap());
    }

    #[test]
    fn left_shift_prefix_not_injective() {
        let t = Operator::left_shift(Q);
        let v5 = SparseVec::basis(Q, Domain::Nat, 5).unwrap();
        let Saturation::Closed { hull, .. } = saturate_vectors(&t, &[v5], 10).unwrap() else {
            panic!()
        };
        let b = OrderedBasis::from_vectors((0..6).map(|i| SparseVec::basis(Q, Domain::Nat, i).unwrap()).collect())
            .unwrap();
        let r = invertibility_report(&t, &b, &hull).unwrap();
        assert!(!r.injective && !r.diagonal_nonzero && !r.prefix_surjective);
        assert_eq!(r.zero_diagonal_at, Some(0));
        assert!(r.inverse.is_none());
    }

    #[test]
    fn identity_inverse() {
        let t = Operator::identity(Q, Domain::Finite(3));
        let (b, hull) = cert_for(&t, 3);
        let r = invertibility_report(&t, &b, &hull).unwrap();
        assert_eq!(r.inverse, Some(Matrix::identity(Q, 3)));
    }

    #[test]
    fn closure_examples() {
        let p = Poly::from_i64(Q, &[1, 0, 1]);
        let block = Matrix::companion(&p).unwrap();
        let t = Operator::generator(Q, Domain::Nat, GeneratorRule::BlockDiag(vec![block])).unwrap();
        let seeds = [SparseVec::basis(Q, Domain::Nat, 0).unwrap()];
        match closure_test(&t, &seeds, 64).unwrap() {
            ClosureVerdict::NotInClosure { failure, .. } => assert_eq!(failure.factor, p),
            other => panic!("{other:?}"),
        }
        let f2 = FieldSpec::prime(2).unwrap();
        let b = Operator::bilateral_shift(f2);
        let v0 = SparseVec::basis(f2, Domain::Int, 0).unwrap();
        assert_eq!(closure_test(&b, &[v0], 64).unwrap().label(), "inconclusive");
        let j = Operator::matrix(Matrix::jordan_block(Q, &Q.zero(), 4)).unwrap();
        let all: Vec<SparseVec> = (0..4).map(|i| SparseVec::basis(Q, Domain::Finite(4), i).unwrap()).collect();
        assert_eq!(closure_test(&j, &all, 64).unwrap().label(), "in_closure_on_probes");
    }
}
