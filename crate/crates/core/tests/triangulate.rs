mod common;

use common::*;
use proptest::prelude::*;
use triax::exactfield::FieldSpec;
use triax::linspace::{direct_sum_check, Domain, SparseVec, SubspaceBasis};
use triax::operators::Operator;
use triax::triangulate::{
    dependency_downset, is_topologically_nilpotent, primary_components, saturate, saturate_vectors, triangularize,
    verify_triangular, NilpotenceVerdict, Saturation, TriangularizabilityVerdict, DEFAULT_FUEL,
};

fn matrix_strategy() -> impl Strategy<Value = (FieldSpec, usize, Vec<i64>)> {
    (prop_oneof![Just(2u64), Just(3), Just(5), Just(0)], 1usize..=4).prop_flat_map(|(p, n)| {
        let field = if p == 0 { Q } else { fp(p) };
        let hi = if p == 0 { 3 } else { p as i64 - 1 };
        let lo = if p == 0 { -3 } else { 0 };
        (Just(field), Just(n), prop::collection::vec(lo..=hi, n * n))
    })
}

proptest! {
    #[test]
    fn saturation_is_invariant_and_minimal((field, n, entries) in matrix_strategy(), picks in prop::collection::vec(0usize..4, 1..3)) {
        let m = matrix_from(field, n, &entries);
        let t = op(&m);
        let seeds: Vec<SparseVec> = picks.iter().map(|&i| e(field, n, (i % n) as i64)).collect();
        let w = SubspaceBasis::span(field, Domain::Finite(n), &seeds).unwrap();
        let Saturation::Closed { hull, trace } = saturate(&t, &w, DEFAULT_FUEL).unwrap() else {
            panic!("finite matrices close");
        };
        for b in hull.basis.rows() {
            prop_assert!(hull.basis.contains(&t.apply(b).unwrap()));
        }
        prop_assert!(hull.basis.contains_subspace(&w));
        // Dropping the last stage breaks invariance unless it added nothing.
        let stages = &trace.stages;
        if stages.len() >= 2 {
            let before = &stages[stages.len() - 2];
            if before.dim() < hull.dim() {
                let invariant = before.rows().iter().all(|b| before.contains(&t.apply(b).unwrap()));
                prop_assert!(!invariant);
            }
        }
    }

    #[test]
    fn primary_components_decompose_the_hull((field, n, entries) in matrix_strategy()) {
        let m = matrix_from(field, n, &entries);
        let hull = full_hull(&m);
        let Ok(comps) = primary_components(&hull) else { return Ok(()) };
        let parts: Vec<SubspaceBasis> = comps.iter().map(|c| c.basis.clone()).collect();
        prop_assert!(direct_sum_check(&parts).unwrap());
        prop_assert_eq!(parts.iter().map(|p| p.dim()).sum::<usize>(), hull.dim());
        let t = op(&m);
        for c in &comps {
            let shifted = t.shifted(&c.eigenvalue).unwrap();
            for v in c.basis.rows() {
                let mut w = v.clone();
                for _ in 0..c.multiplicity {
                    w = shifted.apply(&w).unwrap();
                }
                prop_assert!(w.is_zero());
            }
        }
    }

    #[test]
    fn certificates_verify((field, n, entries) in matrix_strategy()) {
        let m = matrix_from(field, n, &entries);
        let t = op(&m);
        let verdict = triangularize(&t, &std_basis(field, n), DEFAULT_FUEL).unwrap();
        let split = triax::exactfield::split_linear(&m.minimal_polynomial()).unwrap().roots().is_some();
        prop_assert_eq!(verdict.certificate().is_some(), split);
        if let TriangularizabilityVerdict::Triangularizable(c) = &verdict {
            let check = verify_triangular(&t, &c.basis).unwrap();
            prop_assert!(check.triangular);
            let nilpotent = m.pow(n).is_zero();
            prop_assert_eq!(c.basis.strict(), nilpotent);
            prop_assert_eq!(check.strict, nilpotent);
            for i in 0..c.basis.len() {
                let down = dependency_downset(&t, &c.basis, i).unwrap();
                let vs = c.basis.vectors();
                let span = SubspaceBasis::span(field, Domain::Finite(n), down.iter().map(|&j| &vs[j])).unwrap();
                for v in span.rows() {
                    prop_assert!(span.contains(&t.apply(v).unwrap()));
                }
            }
        }
    }

    #[test]
    fn nilpotence_conditions_agree((field, n, entries) in matrix_strategy()) {
        let m = matrix_from(field, n, &entries);
        let t = op(&m);
        let probes = std_basis(field, n);
        // (2) every vector is killed by a power.
        let union_of_kernels = m.pow(n).is_zero();
        // (3) strictly triangularizable.
        let strict = matches!(
            triangularize(&t, &probes, DEFAULT_FUEL).unwrap(),
            TriangularizabilityVerdict::Triangularizable(ref c) if c.basis.strict()
        );
        // (5) only eigenvalue 0, read off the probes.
        let only_zero = matches!(
            is_topologically_nilpotent(&t, &probes, DEFAULT_FUEL).unwrap(),
            NilpotenceVerdict::YesOnProbes { .. }
        );
        prop_assert_eq!(union_of_kernels, strict);
        prop_assert_eq!(union_of_kernels, only_zero);
    }
}

#[test]
fn left_shift_prefix_is_strict() {
    let q = Q;
    let t = Operator::left_shift(q);
    let seeds: Vec<SparseVec> = (0..6).map(|i| SparseVec::basis(q, Domain::Nat, i).unwrap()).collect();
    let v = triangularize(&t, &seeds, DEFAULT_FUEL).unwrap();
    let c = v.certificate().unwrap();
    assert!(c.basis.strict());
    assert_eq!(c.hull.dim(), 6);
}

#[test]
fn escaping_generators_are_definitive() {
    for t in [Operator::right_shift(Q), Operator::bilateral_shift(Q)] {
        let seed = SparseVec::basis(Q, t.domain(), 0).unwrap();
        let v = triangularize(&t, &[seed.clone()], 20).unwrap();
        assert!(matches!(v, TriangularizabilityVerdict::NotTriangularizable(_)));
        let Saturation::Diverged(trace) = saturate_vectors(&t, &[seed], 20).unwrap() else {
            panic!("shift orbits never close");
        };
        assert_eq!(trace.dims(), (1..=21).collect::<Vec<_>>());
    }
}
