use crate::error::{Error, Result};
use crate::exactfield::{poly_lcm, FieldSpec, Poly, Scalar};
use crate::linspace::{Domain, Matrix, SparseVec};

/// Built-in operators defined by a rule on every basis index. Columns are
/// evaluated on demand and never materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorRule {
    /// On `ℕ`: `v_0 -> 0`, `v_i -> v_{i-1}`.
    LeftShiftNat,
    /// On `ℕ`: `v_i -> v_{i+1}`.
    RightShiftNat,
    /// On `ℤ`: `v_i -> v_{i-1}`.
    BilateralShift,
    /// On `ℤ`: `v_i -> v_{i+1}`, the inverse of [`GeneratorRule::BilateralShift`].
    BilateralShiftInverse,
    /// `v_i -> w_{i mod len} * base(v_i)`.
    Weighted {
        base: Box<GeneratorRule>,
        weights: Vec<Scalar>,
    },
    /// The blocks repeated along the index set: on `ℕ` forever, on
    /// `Finite(n)` as many times as fit exactly.
    BlockDiag(Vec<Matrix>),
    /// Repeated companion block of a polynomial.
    Companion(Poly),
    /// `a*I + inner`
    ScalarPlus {
        a: Scalar,
        inner: Box<GeneratorRule>,
    },
    /// `a*I` on any domain.
    Scalar(Scalar),
}

impl GeneratorRule {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorRule::LeftShiftNat => "left_shift",
            GeneratorRule::RightShiftNat => "right_shift",
            GeneratorRule::BilateralShift => "bilateral_shift",
            GeneratorRule::BilateralShiftInverse => "bilateral_shift_inverse",
            GeneratorRule::Weighted { .. } => "weighted",
            GeneratorRule::BlockDiag(_) => "block_diag",
            GeneratorRule::Companion(_) => "companion",
            GeneratorRule::ScalarPlus { .. } => "scalar_plus",
            GeneratorRule::Scalar(_) => "scalar",
        }
    }

    /// Every nonzero vector generates an infinite-dimensional invariant
    /// subspace, so saturation can never stabilize on a nonzero seed.
    pub fn locally_escaping(&self) -> bool {
        match self {
            GeneratorRule::RightShiftNat
            | GeneratorRule::BilateralShift
            | GeneratorRule::BilateralShiftInverse => true,
            GeneratorRule::ScalarPlus { inner, .. } => inner.locally_escaping(),
            GeneratorRule::Weighted { base, weights } => {
                base.locally_escaping() && weights.iter().all(|w| !w.is_zero())
            }
            _ => false,
        }
    }

    /// A polynomial `p` with `p(T) = 0` on the whole space, when the rule
    /// guarantees one.
    pub fn annihilator(&self, field: FieldSpec) -> Option<Poly> {
        match self {
            GeneratorRule::BlockDiag(blocks) => Some(
                blocks
                    .iter()
                    .fold(Poly::one(field), |acc, b| poly_lcm(&acc, &b.minimal_polynomial())),
            ),
            GeneratorRule::Companion(p) => Some(p.monic()),
            GeneratorRule::Scalar(a) => Some(Poly::linear(a)),
            GeneratorRule::ScalarPlus { a, inner } => {
                // q(T) = 0 with T = aI + S and p(S) = 0 gives q(x) = p(x - a).
                inner.annihilator(field).map(|p| p.taylor_shift(&-a))
            }
            _ => None,
        }
    }

    fn period(&self) -> Option<usize> {
        match self {
            GeneratorRule::BlockDiag(blocks) => Some(blocks.iter().map(Matrix::nrows).sum()),
            GeneratorRule::Companion(p) => p.degree(),
            _ => None,
        }
    }

    /// Checks that the rule is well defined on `domain` over `field`.
    pub fn validate(&self, field: FieldSpec, domain: Domain) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidOperator(msg));
        match self {
            GeneratorRule::LeftShiftNat | GeneratorRule::RightShiftNat => {
                if domain != Domain::Nat {
                    return bad(format!("{} requires domain N", self.name()));
                }
            }
            GeneratorRule::BilateralShift | GeneratorRule::BilateralShiftInverse => {
                if domain != Domain::Int {
                    return bad(format!("{} requires domain Z", self.name()));
                }
            }
            GeneratorRule::Weighted { base, weights } => {
                if weights.is_empty() {
                    return bad("weighted rule needs at least one weight".into());
                }
                if let Some(w) = weights.iter().find(|w| w.field() != field) {
                    return Err(Error::FieldMismatch(field, w.field()));
                }
                base.validate(field, domain)?;
            }
            GeneratorRule::BlockDiag(blocks) => {
                if blocks.is_empty() || blocks.iter().any(|b| !b.is_square() || b.nrows() == 0) {
                    return bad("block_diag needs nonempty square blocks".into());
                }
                if let Some(b) = blocks.iter().find(|b| b.field() != field) {
                    return Err(Error::FieldMismatch(field, b.field()));
                }
                self.check_periodic(domain)?;
            }
            GeneratorRule::Companion(p) => {
                if p.field() != field {
                    return Err(Error::FieldMismatch(field, p.field()));
                }
                if p.is_constant() {
                    return Err(Error::ConstantPolynomial);
                }
                self.check_periodic(domain)?;
            }
            GeneratorRule::ScalarPlus { a, inner } => {
                if a.field() != field {
                    return Err(Error::FieldMismatch(field, a.field()));
                }
                inner.validate(field, domain)?;
            }
            GeneratorRule::Scalar(a) => {
                if a.field() != field {
                    return Err(Error::FieldMismatch(field, a.field()));
                }
            }
        }
        Ok(())
    }

    fn check_periodic(&self, domain: Domain) -> Result<()> {
        let period = self.period().expect("periodic rule");
        match domain {
            Domain::Nat => Ok(()),
            Domain::Finite(n) if n % period == 0 && n > 0 => Ok(()),
            _ => Err(Error::InvalidOperator(format!(
                "{} with block period {period} does not tile {domain}",
                self.name()
            ))),
        }
    }

    /// The image of the basis vector at `rank`.
    pub(crate) fn column(&self, field: FieldSpec, domain: Domain, rank: u64) -> Result<SparseVec> {
        let pos = domain.position(rank);
        let unit = |p: i64| SparseVec::basis(field, domain, p);
        match self {
            GeneratorRule::LeftShiftNat => {
                if pos == 0 {
                    Ok(SparseVec::zero(field, domain))
                } else {
                    unit(pos - 1)
                }
            }
            GeneratorRule::RightShiftNat | GeneratorRule::BilateralShiftInverse => unit(pos + 1),
            GeneratorRule::BilateralShift => unit(pos - 1),
            GeneratorRule::Weighted { base, weights } => {
                let w = &weights[pos.rem_euclid(weights.len() as i64) as usize];
                Ok(base.column(field, domain, rank)?.scale(w))
            }
            GeneratorRule::BlockDiag(_) | GeneratorRule::Companion(_) => {
                let period = self.period().expect("periodic rule") as i64;
                let base = pos - pos.rem_euclid(period);
                let local = pos.rem_euclid(period) as usize;
                let (block, offset) = self.block_at(local);
                let j = local - offset;
                let mut pairs = Vec::new();
                for i in 0..block.nrows() {
                    let c = block.get(i, j);
                    if !c.is_zero() {
                        pairs.push((base + (offset + i) as i64, c.clone()));
                    }
                }
                SparseVec::from_pairs(field, domain, pairs)
            }
            GeneratorRule::ScalarPlus { a, inner } => {
                let mut col = inner.column(field, domain, rank)?;
                col.axpy(a, &unit(pos)?);
                Ok(col)
            }
            GeneratorRule::Scalar(a) => Ok(unit(pos)?.scale(a)),
        }
    }

    /// The block containing local index `local`, and its starting offset.
    fn block_at(&self, local: usize) -> (Matrix, usize) {
        match self {
            GeneratorRule::BlockDiag(blocks) => {
                let mut off = 0;
                for b in blocks {
                    if local < off + b.nrows() {
                        return (b.clone(), off);
                    }
                    off += b.nrows();
                }
                unreachable!("local index within period")
            }
            GeneratorRule::Companion(p) => (Matrix::companion(p).expect("nonconstant"), 0),
            _ => unreachable!("not a block rule"),
        }
    }
}
