use crate::error::{Error, Result};
use crate::linspace::{SparseVec, SubspaceBasis};
use crate::operators::{restrict, InvariantHull, Operator};

/// Default number of saturation stages.
pub const DEFAULT_FUEL: usize = 64;

/// The chain `U_0 = W ⊆ U_1 ⊆ ...` with `U_{i+1} = U_i + T(U_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationTrace {
    pub stages: Vec<SubspaceBasis>,
    pub stabilized: bool,
    pub fuel_used: usize,
}

impl SaturationTrace {
    pub fn dims(&self) -> Vec<usize> {
        self.stages.iter().map(SubspaceBasis::dim).collect()
    }
}

#[derive(Clone, Debug)]
pub enum Saturation {
    Closed {
        hull: InvariantHull,
        trace: SaturationTrace,
    },
    Diverged(SaturationTrace),
}

impl Saturation {
    pub fn hull(&self) -> Option<&InvariantHull> {
        match self {
            Saturation::Closed { hull, .. } => Some(hull),
            Saturation::Diverged(_) => None,
        }
    }

    pub fn trace(&self) -> &SaturationTrace {
        match self {
            Saturation::Closed { trace, .. } | Saturation::Diverged(trace) => trace,
        }
    }
}

/// The smallest `t`-invariant subspace containing `w`, if it is reached
/// within `fuel` stages. Only the vectors added in the previous stage are
/// pushed through `t` again.
pub fn saturate(t: &Operator, w: &SubspaceBasis, fuel: usize) -> Result<Saturation> {
    if fuel == 0 {
        return Err(Error::Precondition("saturation fuel must be at least 1".into()));
    }
    if w.field() != t.field() {
        return Err(Error::FieldMismatch(t.field(), w.field()));
    }
    t.domain().check(&w.domain())?;
    let mut current = w.clone();
    let mut stages = vec![current.clone()];
    let mut frontier: Vec<SparseVec> = w.rows().to_vec();
    for round in 1..=fuel {
        let mut added = Vec::new();
        for v in &frontier {
            let image = t.apply(v)?;
            if let Some(new) = current.insert(&image)? {
                added.push(new);
            }
        }
        stages.push(current.clone());
        if added.is_empty() {
            let trace = SaturationTrace {
                stages,
                stabilized: true,
                fuel_used: round,
            };
            let hull = restrict(t, &current)?;
            return Ok(Saturation::Closed { hull, trace });
        }
        frontier = added;
    }
    Ok(Saturation::Diverged(SaturationTrace {
        stages,
        stabilized: false,
        fuel_used: fuel,
    }))
}

/// Saturates the span of `seeds`.
pub fn saturate_vectors(t: &Operator, seeds: &[SparseVec], fuel: usize) -> Result<Saturation> {
    let w = SubspaceBasis::span(t.field(), t.domain(), seeds)?;
    saturate(t, &w, fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::linspace::Domain;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn span_of(domain: Domain, i: i64) -> SubspaceBasis {
        SubspaceBasis::span(Q, domain, [&SparseVec::basis(Q, domain, i).unwrap()]).unwrap()
    }

    #[test]
    fn bilateral_shift_diverges() {
        let t = Operator::bilateral_shift(Q);
        let s = saturate(&t, &span_of(Domain::Int, 0), 50).unwrap();
        let Saturation::Diverged(trace) = s else { panic!("closed") };
        assert!(!trace.stabilized);
        assert_eq!(trace.fuel_used, 50);
        assert_eq!(trace.dims(), (1..=51).collect::<Vec<_>>());
    }

    #[test]
    fn zero_operator_closes_immediately() {
        let t = Operator::zero(Q, Domain::Nat);
        let s = saturate(&t, &span_of(Domain::Nat, 0), 5).unwrap();
        let Saturation::Closed { hull, trace } = s else { panic!("diverged") };
        assert_eq!(hull.dim(), 1);
        assert_eq!(trace.fuel_used, 1);
        assert!(trace.stabilized);
        assert_eq!(trace.stages[0], trace.stages[1]);
    }

    #[test]
    fn left_shift_from_v3() {
        let t = Operator::left_shift(Q);
        let s = saturate(&t, &span_of(Domain::Nat, 3), 10).unwrap();
        let hull = s.hull().unwrap();
        assert_eq!(hull.dim(), 4);
        for i in 0..4 {
            assert!(hull.basis.contains(&SparseVec::basis(Q, Domain::Nat, i).unwrap()));
        }
    }

    #[test]
    fn zero_fuel_rejected() {
        let t = Operator::left_shift(Q);
        assert!(saturate(&t, &span_of(Domain::Nat, 0), 0).is_err());
    }
}
