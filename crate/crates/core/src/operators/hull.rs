use crate::error::{Error, Result};
use crate::linspace::{Matrix, QuotientSpace, SubspaceBasis};

use super::Operator;

/// A finite-dimensional invariant subspace with the matrix of the
/// restricted operator in the coordinates of its echelon rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantHull {
    pub basis: SubspaceBasis,
    pub matrix: Matrix,
}

impl InvariantHull {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Re-applies `t` to every row and compares against the stored matrix.
    pub fn recheck(&self, t: &Operator) -> Result<bool> {
        for (j, row) in self.basis.rows().iter().enumerate() {
            let image = t.apply(row)?;
            match self.basis.coordinates(&image) {
                Some(c) if c == self.matrix.column(j) => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

/// Restricts `t` to `hull`, failing with the first row whose image leaves it.
pub fn restrict(t: &Operator, hull: &SubspaceBasis) -> Result<InvariantHull> {
    let n = hull.dim();
    let mut cols = Vec::with_capacity(n);
    for row in hull.rows() {
        let image = t.apply(row)?;
        match hull.coordinates(&image) {
            Some(c) => cols.push(c),
            None => {
                return Err(Error::NotInvariant {
                    witness: row.clone(),
                    image,
                })
            }
        }
    }
    Ok(InvariantHull {
        basis: hull.clone(),
        matrix: Matrix::from_columns(t.field(), n, &cols),
    })
}

/// Matrix of the induced map on `u / w` in the representative basis of
/// [`QuotientSpace`]. Both subspaces must be `t`-invariant.
pub fn quotient_operator(t: &Operator, u: &SubspaceBasis, w: &SubspaceBasis) -> Result<Matrix> {
    let q = QuotientSpace::new(u, w)?;
    for row in w.rows() {
        let image = t.apply(row)?;
        if !w.contains(&image) {
            return Err(Error::NotInvariant {
                witness: row.clone(),
                image,
            });
        }
    }
    let mut cols = Vec::with_capacity(q.dim());
    for rep in q.representatives() {
        let image = t.apply(rep)?;
        match q.coordinates(&image) {
            Ok(c) => cols.push(c),
            Err(_) => {
                return Err(Error::NotInvariant {
                    witness: rep.clone(),
                    image,
                })
            }
        }
    }
    Ok(Matrix::from_columns(t.field(), q.dim(), &cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::linspace::{Domain, SparseVec};

    const Q: FieldSpec = FieldSpec::Rationals;

    fn span(domain: Domain, idx: &[i64]) -> SubspaceBasis {
        let vs: Vec<SparseVec> = idx.iter().map(|&i| SparseVec::basis(Q, domain, i).unwrap()).collect();
        SubspaceBasis::span(Q, domain, &vs).unwrap()
    }

    #[test]
    fn left_shift_on_prefix() {
        let t = Operator::left_shift(Q);
        let h = restrict(&t, &span(Domain::Nat, &[0, 1])).unwrap();
        assert_eq!(h.matrix, Matrix::from_i64(Q, &[&[0, 1], &[0, 0]]));
        assert!(h.recheck(&t).unwrap());
    }

    #[test]
    fn zero_hull_is_empty_matrix() {
        let t = Operator::left_shift(Q);
        let h = restrict(&t, &SubspaceBasis::zero(Q, Domain::Nat)).unwrap();
        assert_eq!(h.matrix.nrows(), 0);
    }

    #[test]
    fn right_shift_escapes() {
        let t = Operator::right_shift(Q);
        match restrict(&t, &span(Domain::Nat, &[0])) {
            Err(Error::NotInvariant { witness, image }) => {
                assert_eq!(witness, SparseVec::basis(Q, Domain::Nat, 0).unwrap());
                assert_eq!(image, SparseVec::basis(Q, Domain::Nat, 1).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quotient_examples() {
        let t = Operator::from_i64(Q, &[&[0, 1], &[0, 0]]).unwrap();
        let d = Domain::Finite(2);
        let u = span(d, &[0, 1]);
        let w = span(d, &[0]);
        assert_eq!(quotient_operator(&t, &u, &w).unwrap(), Matrix::zeros(Q, 1, 1));
        assert_eq!(quotient_operator(&t, &u, &u).unwrap().nrows(), 0);
        let zero = SubspaceBasis::zero(Q, d);
        assert_eq!(quotient_operator(&t, &u, &zero).unwrap(), restrict(&t, &u).unwrap().matrix);
        assert!(matches!(
            quotient_operator(&t, &u, &span(d, &[1])),
            Err(Error::NotInvariant { .. })
        ));
    }
}
