//! Built-in named operators.

use triax::exactfield::{FieldSpec, Poly};
use triax::linspace::{Domain, Matrix, SparseVec};
use triax::operators::Operator;

use crate::CliError;

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub operator: Operator,
    /// Seeds used when the command line gives none.
    pub seeds: Vec<SparseVec>,
}

impl Fixture {
    pub fn locally_escaping(&self) -> bool {
        self.operator.locally_escaping()
    }
}

fn basis(field: FieldSpec, domain: Domain, positions: impl IntoIterator<Item = i64>) -> Vec<SparseVec> {
    positions
        .into_iter()
        .map(|i| SparseVec::basis(field, domain, i).expect("position in domain"))
        .collect()
}

fn matrix_fixture(name: &'static str, description: &'static str, m: Matrix) -> Fixture {
    let n = m.nrows();
    let field = m.field();
    Fixture {
        name,
        description,
        operator: Operator::matrix(m).expect("square"),
        seeds: basis(field, Domain::Finite(n), 0..n as i64),
    }
}

/// The catalog, in a fixed order.
pub fn fixtures() -> Vec<Fixture> {
    let q = FieldSpec::Rationals;
    let f2 = FieldSpec::Prime(2);
    let t = Operator::bilateral_shift(q);
    let t_inv = Operator::bilateral_shift_inverse(q);
    let laurent = Operator::combination(
        q,
        Domain::Int,
        [
            (q.from_i64(1), t.clone()),
            (q.from_i64(3), Operator::identity(q, Domain::Int)),
            (q.from_i64(-2), t_inv),
        ],
    )
    .expect("same space");
    vec![
        Fixture {
            name: "bilateral_shift",
            description: "v_i -> v_{i-1} on Z; no nonzero finite invariant subspace",
            operator: t,
            seeds: basis(q, Domain::Int, [0]),
        },
        Fixture {
            name: "right_shift",
            description: "v_i -> v_{i+1} on N; injective, every orbit escapes",
            operator: Operator::right_shift(q),
            seeds: basis(q, Domain::Nat, [0]),
        },
        Fixture {
            name: "left_shift",
            description: "v_0 -> 0, v_i -> v_{i-1} on N; strictly triangular, surjective, not injective",
            operator: Operator::left_shift(q),
            seeds: basis(q, Domain::Nat, 0..5),
        },
        Fixture {
            name: "laurent_centralizer",
            description: "T + 3 - 2T^-1 for the bilateral shift T; commutes with T",
            operator: laurent,
            seeds: basis(q, Domain::Int, [0]),
        },
        matrix_fixture(
            "nilpotent_jordan",
            "3x3 nilpotent Jordan block over Q",
            Matrix::jordan_block(q, &q.zero(), 3),
        ),
        matrix_fixture(
            "jordan_pair",
            "J_2(1) + J_1(2) over Q",
            Matrix::block_diag(
                q,
                &[Matrix::jordan_block(q, &q.one(), 2), Matrix::jordan_block(q, &q.from_i64(2), 1)],
            ),
        ),
        matrix_fixture(
            "rotation",
            "quarter turn over Q; x^2 + 1 does not split",
            Matrix::from_i64(q, &[&[0, -1], &[1, 0]]),
        ),
        matrix_fixture(
            "diagonal",
            "diag(3, 1, 2) over Q",
            Matrix::from_i64(q, &[&[3, 0, 0], &[0, 1, 0], &[0, 0, 2]]),
        ),
        matrix_fixture(
            "swap_f2",
            "coordinate swap over F2; (x + 1)^2",
            Matrix::from_i64(f2, &[&[0, 1], &[1, 0]]),
        ),
        matrix_fixture(
            "companion_f2",
            "companion of x^2 + x + 1 over F2; irreducible",
            Matrix::companion(&Poly::from_i64(f2, &[1, 1, 1])).expect("nonconstant"),
        ),
    ]
}

pub fn fixture(name: &str) -> Result<Fixture, CliError> {
    let all = fixtures();
    let names: Vec<String> = all.iter().map(|f| f.name.to_string()).collect();
    all.into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| CliError::UnknownFixture {
            name: name.to_string(),
            available: names,
        })
}
