#![allow(dead_code)]

use triax::exactfield::{FieldSpec, Poly, Scalar};
use triax::linspace::{Domain, Matrix, SparseVec};
use triax::operators::{InvariantHull, Operator};
use triax::oracle::SplitMix64;
use triax::triangulate::{saturate_vectors, Saturation, DEFAULT_FUEL};

pub const Q: FieldSpec = FieldSpec::Rationals;

pub fn fp(p: u64) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

pub fn e(field: FieldSpec, n: usize, i: i64) -> SparseVec {
    SparseVec::basis(field, Domain::Finite(n), i).unwrap()
}

pub fn std_basis(field: FieldSpec, n: usize) -> Vec<SparseVec> {
    (0..n as i64).map(|i| e(field, n, i)).collect()
}

pub fn op(m: &Matrix) -> Operator {
    Operator::matrix(m.clone()).unwrap()
}

/// The whole space of a square matrix as an invariant hull.
pub fn full_hull(m: &Matrix) -> InvariantHull {
    let t = op(m);
    match saturate_vectors(&t, &std_basis(m.field(), m.nrows()), DEFAULT_FUEL).unwrap() {
        Saturation::Closed { hull, .. } => hull,
        Saturation::Diverged(_) => unreachable!("finite matrices always close"),
    }
}

pub fn matrix_from(field: FieldSpec, n: usize, entries: &[i64]) -> Matrix {
    let mut m = Matrix::zeros(field, n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, field.from_i64(entries[i * n + j]));
        }
    }
    m
}

pub fn poly_from(field: FieldSpec, coeffs: &[i64]) -> Poly {
    Poly::from_i64(field, coeffs)
}

/// An entry drawn from the field: a residue, or a small integer over `Q`.
pub fn random_scalar(rng: &mut SplitMix64, field: FieldSpec) -> Scalar {
    match field {
        FieldSpec::Prime(p) => field.from_i64(rng.below(p) as i64),
        FieldSpec::Rationals => field.from_i64(rng.range_i64(-3, 3)),
    }
}

pub fn random_matrix(rng: &mut SplitMix64, field: FieldSpec, n: usize) -> Matrix {
    let mut m = Matrix::zeros(field, n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, random_scalar(rng, field));
        }
    }
    m
}

/// Unit lower-triangular times unit upper-triangular: always invertible.
pub fn random_invertible(rng: &mut SplitMix64, field: FieldSpec, n: usize) -> Matrix {
    let mut l = Matrix::identity(field, n);
    let mut u = Matrix::identity(field, n);
    for i in 0..n {
        for j in 0..i {
            l.set(i, j, random_scalar(rng, field));
            u.set(j, i, random_scalar(rng, field));
        }
    }
    l.mul(&u)
}

/// Upper triangular with diagonal drawn from `diagonal`.
pub fn random_upper(rng: &mut SplitMix64, field: FieldSpec, n: usize, diagonal: &[Scalar]) -> Matrix {
    let mut m = Matrix::zeros(field, n, n);
    for i in 0..n {
        m.set(i, i, diagonal[rng.below(diagonal.len() as u64) as usize].clone());
        for j in i + 1..n {
            m.set(i, j, random_scalar(rng, field));
        }
    }
    m
}

/// `P U P^-1` for random upper-triangular `U` and invertible `P`.
pub fn random_triangularizable(rng: &mut SplitMix64, field: FieldSpec, n: usize) -> Matrix {
    let diagonal: Vec<Scalar> = (0..3).map(|_| random_scalar(rng, field)).collect();
    let u = random_upper(rng, field, n, &diagonal);
    let p = random_invertible(rng, field, n);
    p.mul(&u).mul(&p.inverse().unwrap())
}
