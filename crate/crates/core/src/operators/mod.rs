//! Column-finite operators: finite matrices, explicit column maps, built-in
//! generator rules, and lazy compositions and linear combinations of these.

mod generator;
mod hull;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Poly, Scalar};
use crate::linspace::{Domain, Matrix, SparseVec};

pub use generator::GeneratorRule;
pub use hull::{quotient_operator, restrict, InvariantHull};

#[derive(Clone, Debug)]
enum Body {
    Matrix(Matrix),
    Columns {
        map: BTreeMap<u64, SparseVec>,
        default: Option<Arc<Operator>>,
    },
    Generator(GeneratorRule),
    /// `outer ∘ inner`
    Compose(Arc<Operator>, Arc<Operator>),
    Combination(Vec<(Scalar, Arc<Operator>)>),
}

/// Read-only structure of an operator, for serialization.
#[derive(Clone, Copy, Debug)]
pub enum OperatorView<'a> {
    Matrix(&'a Matrix),
    Columns {
        map: &'a BTreeMap<u64, SparseVec>,
        default: Option<&'a Operator>,
    },
    Generator(&'a GeneratorRule),
    Compose(&'a Operator, &'a Operator),
    Combination(&'a [(Scalar, Arc<Operator>)]),
}

/// A linear operator on the span of the basis `{v_i : i ∈ domain}`.
///
/// Operators are immutable descriptions; every column is computed on demand,
/// so infinite operators exist only through the columns that get probed.
#[derive(Clone, Debug)]
pub struct Operator {
    field: FieldSpec,
    domain: Domain,
    body: Body,
}

impl Operator {
    /// The operator on `Finite(n)` whose `j`-th column is column `j` of `m`.
    pub fn matrix(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "operator matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Operator {
            field: m.field(),
            domain: Domain::Finite(m.nrows()),
            body: Body::Matrix(m),
        })
    }

    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Result<Self> {
        Operator::matrix(Matrix::from_i64(field, rows))
    }

    pub fn generator(field: FieldSpec, domain: Domain, rule: GeneratorRule) -> Result<Self> {
        rule.validate(field, domain)?;
        Ok(Operator {
            field,
            domain,
            body: Body::Generator(rule),
        })
    }

    /// Explicit columns keyed by basis position. Columns missing from `map`
    /// come from `default` if given and are an error otherwise.
    pub fn columns(
        field: FieldSpec,
        domain: Domain,
        map: impl IntoIterator<Item = (i64, SparseVec)>,
        default: Option<Operator>,
    ) -> Result<Self> {
        let mut cols = BTreeMap::new();
        for (pos, v) in map {
            if v.field() != field {
                return Err(Error::FieldMismatch(field, v.field()));
            }
            domain.check(&v.domain())?;
            cols.insert(domain.rank(pos)?, v);
        }
        if let Some(d) = &default {
            d.check_same_space(field, domain)?;
        }
        Ok(Operator {
            field,
            domain,
            body: Body::Columns {
                map: cols,
                default: default.map(Arc::new),
            },
        })
    }

    pub fn left_shift(field: FieldSpec) -> Self {
        Operator::generator(field, Domain::Nat, GeneratorRule::LeftShiftNat).expect("valid rule")
    }

    pub fn right_shift(field: FieldSpec) -> Self {
        Operator::generator(field, Domain::Nat, GeneratorRule::RightShiftNat).expect("valid rule")
    }

    pub fn bilateral_shift(field: FieldSpec) -> Self {
        Operator::generator(field, Domain::Int, GeneratorRule::BilateralShift).expect("valid rule")
    }

    pub fn bilateral_shift_inverse(field: FieldSpec) -> Self {
        Operator::generator(field, Domain::Int, GeneratorRule::BilateralShiftInverse)
            .expect("valid rule")
    }

    /// `a*I`
    pub fn scalar(a: &Scalar, domain: Domain) -> Self {
        Operator {
            field: a.field(),
            domain,
            body: Body::Generator(GeneratorRule::Scalar(a.clone())),
        }
    }

    pub fn identity(field: FieldSpec, domain: Domain) -> Self {
        Operator::scalar(&field.one(), domain)
    }

    pub fn zero(field: FieldSpec, domain: Domain) -> Self {
        Operator::scalar(&field.zero(), domain)
    }

    /// `outer ∘ inner`, evaluated lazily column by column.
    pub fn compose(outer: &Operator, inner: &Operator) -> Result<Self> {
        outer.check_same_space(inner.field, inner.domain)?;
        Ok(Operator {
            field: outer.field,
            domain: outer.domain,
            body: Body::Compose(Arc::new(outer.clone()), Arc::new(inner.clone())),
        })
    }

    /// `Σ c_i T_i`
    pub fn combination(
        field: FieldSpec,
        domain: Domain,
        terms: impl IntoIterator<Item = (Scalar, Operator)>,
    ) -> Result<Self> {
        let mut out = Vec::new();
        for (c, t) in terms {
            if c.field() != field {
                return Err(Error::FieldMismatch(field, c.field()));
            }
            t.check_same_space(field, domain)?;
            out.push((c, Arc::new(t)));
        }
        Ok(Operator {
            field,
            domain,
            body: Body::Combination(out),
        })
    }

    /// `T - a*I`
    pub fn shifted(&self, a: &Scalar) -> Result<Self> {
        let one = self.field.one();
        Operator::combination(
            self.field,
            self.domain,
            [
                (one.clone(), self.clone()),
                (-a, Operator::identity(self.field, self.domain)),
            ],
        )
    }

    fn check_same_space(&self, field: FieldSpec, domain: Domain) -> Result<()> {
        if self.field != field {
            return Err(Error::FieldMismatch(field, self.field));
        }
        domain.check(&self.domain)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// The dimension of the underlying space when it is finite.
    pub fn finite_dim(&self) -> Option<usize> {
        match self.domain {
            Domain::Finite(n) => Some(n),
            _ => None,
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match &self.body {
            Body::Matrix(m) => format!("{}x{} matrix over {}", m.nrows(), m.ncols(), self.field),
            Body::Columns { map, default } => format!(
                "column map with {} listed columns{} over {}",
                map.len(),
                if default.is_some() { " and a default" } else { "" },
                self.field
            ),
            Body::Generator(rule) => format!("{} on {} over {}", rule.name(), self.domain, self.field),
            Body::Compose(a, b) => format!("({}) o ({})", a.describe(), b.describe()),
            Body::Combination(t) => format!("linear combination of {} operators", t.len()),
        }
    }

    /// Explicit columns are keyed by rank in the domain.
    pub fn view(&self) -> OperatorView<'_> {
        match &self.body {
            Body::Matrix(m) => OperatorView::Matrix(m),
            Body::Columns { map, default } => OperatorView::Columns {
                map,
                default: default.as_deref(),
            },
            Body::Generator(g) => OperatorView::Generator(g),
            Body::Compose(a, b) => OperatorView::Compose(a, b),
            Body::Combination(terms) => OperatorView::Combination(terms),
        }
    }

    pub fn generator_rule(&self) -> Option<&GeneratorRule> {
        match &self.body {
            Body::Generator(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&Matrix> {
        match &self.body {
            Body::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// The image of the basis vector with canonical rank `rank`.
    pub fn column_rank(&self, rank: u64) -> Result<SparseVec> {
        match &self.body {
            Body::Matrix(m) => {
                let j = rank as usize;
                if j >= m.ncols() {
                    return Err(Error::IndexOutOfDomain {
                        domain: self.domain,
                        position: rank as i64,
                    });
                }
                Ok(m.column_vec(j))
            }
            Body::Columns { map, default } => match (map.get(&rank), default) {
                (Some(v), _) => Ok(v.clone()),
                (None, Some(d)) => d.column_rank(rank),
                (None, None) => Err(Error::UndefinedColumn(self.domain.position(rank))),
            },
            Body::Generator(rule) => rule.column(self.field, self.domain, rank),
            Body::Compose(outer, inner) => outer.apply(&inner.column_rank(rank)?),
            Body::Combination(terms) => {
                let mut acc = SparseVec::zero(self.field, self.domain);
                for (c, t) in terms {
                    acc.axpy(c, &t.column_rank(rank)?);
                }
                Ok(acc)
            }
        }
    }

    /// `T(v_position)`
    pub fn column(&self, position: i64) -> Result<SparseVec> {
        self.column_rank(self.domain.rank(position)?)
    }

    /// `T(v)` by linear extension of the column images.
    pub fn apply(&self, v: &SparseVec) -> Result<SparseVec> {
        if v.field() != self.field {
            return Err(Error::FieldMismatch(self.field, v.field()));
        }
        self.domain.check(&v.domain())?;
        let mut out = SparseVec::zero(self.field, self.domain);
        for (rank, c) in v.iter_ranks() {
            out.axpy(c, &self.column_rank(rank)?);
        }
        Ok(out)
    }

    /// `p(T)(v)` by Horner's rule.
    pub fn poly_apply(&self, p: &Poly, v: &SparseVec) -> Result<SparseVec> {
        if p.field() != self.field {
            return Err(Error::FieldMismatch(self.field, p.field()));
        }
        if v.field() != self.field {
            return Err(Error::FieldMismatch(self.field, v.field()));
        }
        self.domain.check(&v.domain())?;
        let mut acc = SparseVec::zero(self.field, self.domain);
        for c in p.coeffs().iter().rev() {
            acc = self.apply(&acc)?;
            acc.axpy(c, v);
        }
        Ok(acc)
    }

    /// True when every nonzero vector has an infinite orbit, so no
    /// finite-dimensional invariant subspace other than 0 exists. Only
    /// generator rules can certify this.
    pub fn locally_escaping(&self) -> bool {
        match &self.body {
            Body::Generator(r) => r.locally_escaping(),
            _ => false,
        }
    }

    /// A polynomial known to annihilate the whole operator, when the
    /// representation guarantees one.
    pub fn declared_annihilator(&self) -> Option<Poly> {
        match &self.body {
            Body::Matrix(m) => Some(m.minimal_polynomial()),
            Body::Generator(r) => r.annihilator(self.field),
            _ => None,
        }
    }

    /// The full matrix of an operator on a finite domain.
    pub fn to_matrix(&self) -> Result<Matrix> {
        let n = self.finite_dim().ok_or_else(|| {
            Error::Precondition(format!("operator on {} has no finite matrix", self.domain))
        })?;
        if let Body::Matrix(m) = &self.body {
            return Ok(m.clone());
        }
        let cols = (0..n as u64)
            .map(|j| Ok(self.column_rank(j)?.to_dense(n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(self.field, n, &cols))
    }
}

pub fn apply(t: &Operator, v: &SparseVec) -> Result<SparseVec> {
    t.apply(v)
}

pub fn poly_apply(p: &Poly, t: &Operator, v: &SparseVec) -> Result<SparseVec> {
    t.poly_apply(p, v)
}

pub fn compose(s: &Operator, t: &Operator) -> Result<Operator> {
    Operator::compose(s, t)
}
