use crate::error::{Error, Result};
use crate::exactfield::{split_linear, squarefree_part, Poly, Scalar, SplitResult};
use crate::linspace::{kernel_basis, Domain, Matrix, SparseVec, SubspaceBasis};
use crate::operators::InvariantHull;

/// A generalized eigenspace `ker (M - a)^m` of a hull matrix, in hull
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimaryComponent {
    pub eigenvalue: Scalar,
    /// Multiplicity of `x - a` in the minimal polynomial.
    pub multiplicity: usize,
    pub basis: SubspaceBasis,
}

pub fn local_min_poly(h: &InvariantHull) -> Result<Poly> {
    if h.dim() == 0 {
        return Err(Error::ZeroHull);
    }
    Ok(h.matrix.minimal_polynomial())
}

/// Splits the hull into generalized eigenspaces, ordered by eigenvalue.
/// Fails with [`Error::Split`] when the minimal polynomial has a root-free
/// nonlinear factor.
pub fn primary_components(h: &InvariantHull) -> Result<Vec<PrimaryComponent>> {
    matrix_primary_components(&h.matrix)
}

pub(crate) fn matrix_primary_components(m: &Matrix) -> Result<Vec<PrimaryComponent>> {
    if m.nrows() == 0 {
        return Err(Error::ZeroHull);
    }
    let roots = match split_linear(&m.minimal_polynomial())? {
        SplitResult::Split(r) => r,
        SplitResult::Failure(f) => return Err(Error::Split(f)),
    };
    Ok(roots
        .into_iter()
        .map(|(a, mult)| PrimaryComponent {
            basis: kernel_basis(&m.shift(&a).pow(mult)),
            eigenvalue: a,
            multiplicity: mult,
        })
        .collect())
}

/// For `i = 1..=steps`, the echelon completion of `ker N^(i-1)` to
/// `ker N^i`, taken over the echelon rows of `ker N^i`.
pub(crate) fn kernel_levels(n: &Matrix, steps: usize) -> Vec<Vec<SparseVec>> {
    let field = n.field();
    let dim = n.nrows();
    let mut below = SubspaceBasis::zero(field, Domain::Finite(dim));
    let mut power = Matrix::identity(field, dim);
    let mut levels = Vec::with_capacity(steps);
    for _ in 0..steps {
        power = power.mul(n);
        let ker = kernel_basis(&power);
        let mut level = Vec::new();
        for row in ker.rows() {
            if let Some(new) = below.insert(row).expect("same space") {
                level.push(new);
            }
        }
        levels.push(level);
    }
    levels
}

/// Level `i` completes a basis of `ker N^(i-1)` to one of `ker N^i`.
pub fn kernel_filtration(n: &Matrix) -> Result<Vec<Vec<SparseVec>>> {
    if !n.is_square() {
        return Err(Error::Shape("filtration needs a square matrix".into()));
    }
    let dim = n.nrows();
    let top = n.pow(dim);
    if let Some(j) = (0..dim).find(|&j| top.column(j).iter().any(|c| !c.is_zero())) {
        let mut witness = vec![n.field().zero(); dim];
        witness[j] = n.field().one();
        return Err(Error::NotNilpotent(witness));
    }
    let mut levels = kernel_levels(n, dim);
    while levels.last().is_some_and(Vec::is_empty) {
        levels.pop();
    }
    Ok(levels)
}

/// Whether the restriction to the hull is diagonalizable: its minimal
/// polynomial splits into distinct linear factors.
pub fn is_diagonalizable_locally(h: &InvariantHull) -> Result<bool> {
    let p = local_min_poly(h)?;
    if p.is_constant() {
        return Ok(true);
    }
    match split_linear(&p)? {
        SplitResult::Split(_) => Ok(squarefree_part(&p)? == p),
        SplitResult::Failure(_) => Ok(false),
    }
}
