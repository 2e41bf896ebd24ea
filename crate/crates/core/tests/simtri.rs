mod common;

use common::*;
use proptest::prelude::*;
use triax::linspace::{Domain, Matrix, SubspaceBasis};
use triax::oracle::SplitMix64;
use triax::simtri::{
    common_eigenvector, joint_saturate, simultaneous_triangularize, OperatorFamily, SimultaneousVerdict,
};
use triax::triangulate::{verify_triangular, DEFAULT_FUEL};

proptest! {
    #[test]
    fn commuting_pairs_share_a_basis(seed in any::<u64>(), n in 1usize..=4, q in prop::collection::vec(0i64..5, 1..4)) {
        let f = fp(5);
        let mut rng = SplitMix64::new(seed);
        let m = random_triangularizable(&mut rng, f, n);
        let qm = m.eval_poly(&poly_from(f, &q));
        let family = OperatorFamily::new(vec![op(&m), op(&qm)]).unwrap();
        let verdict = simultaneous_triangularize(&family, &std_basis(f, n), DEFAULT_FUEL).unwrap();
        let SimultaneousVerdict::Triangularized(cert) = verdict else {
            panic!("a triangularizable matrix and a polynomial in it triangularize together");
        };
        for member in family.members() {
            prop_assert!(verify_triangular(member, &cert.basis).unwrap().triangular);
        }
        let (hull, _) = joint_saturate(&family, &SubspaceBasis::full(f, n), DEFAULT_FUEL).unwrap();
        for member in family.members() {
            for b in hull.rows() {
                prop_assert!(hull.contains(&member.apply(b).unwrap()));
            }
        }
        let (v, eigenvalues) = common_eigenvector(&[m.clone(), qm.clone()]).unwrap();
        prop_assert!(v.iter().any(|c| !c.is_zero()));
        for (mat, a) in [&m, &qm].into_iter().zip(&eigenvalues) {
            let image = mat.mul_vec(&v);
            let scaled: Vec<_> = v.iter().map(|c| c * a).collect();
            prop_assert_eq!(image, scaled);
        }
    }
}

#[test]
fn non_commuting_pair_is_rejected() {
    let a = Matrix::from_i64(Q, &[&[0, 1], &[0, 0]]);
    let b = Matrix::from_i64(Q, &[&[0, 0], &[1, 0]]);
    let family = OperatorFamily::new(vec![op(&a), op(&b)]).unwrap();
    let err = simultaneous_triangularize(&family, &std_basis(Q, 2), DEFAULT_FUEL).unwrap_err();
    assert!(matches!(err, triax::Error::NonCommuting(_)));
    assert_eq!(family.domain(), Domain::Finite(2));
}
