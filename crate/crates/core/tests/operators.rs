mod common;

use common::*;
use proptest::prelude::*;
use triax::exactfield::FieldSpec;
use triax::linspace::{Domain, SparseVec};
use triax::operators::{restrict, GeneratorRule, Operator};
use triax::triangulate::{saturate_vectors, Saturation};

fn infinite_operators(field: FieldSpec) -> Vec<Operator> {
    let left = Operator::left_shift(field);
    let right = Operator::right_shift(field);
    let weighted = Operator::generator(
        field,
        Domain::Nat,
        GeneratorRule::Weighted {
            base: Box::new(GeneratorRule::LeftShiftNat),
            weights: vec![field.from_i64(2), field.from_i64(-1)],
        },
    )
    .unwrap();
    let mixed = Operator::combination(
        field,
        Domain::Nat,
        [(field.from_i64(3), left.clone()), (field.from_i64(1), right.clone())],
    )
    .unwrap();
    let composed = Operator::compose(&left, &weighted).unwrap();
    vec![left, right, weighted, mixed, composed]
}

fn nat_vec(field: FieldSpec, coeffs: &[i64]) -> SparseVec {
    SparseVec::from_pairs(field, Domain::Nat, coeffs.iter().enumerate().map(|(i, &c)| (i as i64, field.from_i64(c))))
        .unwrap()
}

proptest! {
    #[test]
    fn apply_is_linear(a in -5i64..=5, u in prop::collection::vec(-4i64..=4, 0..6), v in prop::collection::vec(-4i64..=4, 0..6)) {
        for field in [Q, fp(5)] {
            let (u, v) = (nat_vec(field, &u), nat_vec(field, &v));
            let a = field.from_i64(a);
            for t in infinite_operators(field) {
                let lhs = t.apply(&u.scale(&a).add(&v).unwrap()).unwrap();
                let rhs = t.apply(&u).unwrap().scale(&a).add(&t.apply(&v).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn poly_apply_is_multiplicative(p in prop::collection::vec(-3i64..=3, 1..4), q in prop::collection::vec(-3i64..=3, 1..4), v in prop::collection::vec(-4i64..=4, 1..5)) {
        for field in [Q, fp(7)] {
            let (p, q) = (poly_from(field, &p), poly_from(field, &q));
            let v = nat_vec(field, &v);
            for t in infinite_operators(field) {
                let lhs = t.poly_apply(&(&p * &q), &v).unwrap();
                let rhs = t.poly_apply(&p, &t.poly_apply(&q, &v).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn restriction_matches_operator(entries in prop::collection::vec(0i64..5, 16), seed in prop::collection::vec(0i64..5, 4)) {
        let f = fp(5);
        let m = matrix_from(f, 4, &entries);
        let t = op(&m);
        let seed = SparseVec::from_pairs(f, Domain::Finite(4), seed.iter().enumerate().map(|(i, &c)| (i as i64, f.from_i64(c)))).unwrap();
        let Saturation::Closed { hull, .. } = saturate_vectors(&t, &[seed], 8).unwrap() else {
            panic!("finite matrices close");
        };
        let again = restrict(&t, &hull.basis).unwrap();
        prop_assert_eq!(&again.matrix, &hull.matrix);
        for (j, b) in hull.basis.rows().iter().enumerate() {
            let coords = hull.basis.coordinates(&t.apply(b).unwrap()).unwrap();
            prop_assert_eq!(coords, hull.matrix.column(j));
        }
    }
}

#[test]
fn unlisted_column_is_an_error() {
    let q = Q;
    let t = Operator::columns(q, Domain::Nat, [(0, SparseVec::basis(q, Domain::Nat, 1).unwrap())], None).unwrap();
    assert!(t.column(0).is_ok());
    assert!(t.column(1).is_err());
}
