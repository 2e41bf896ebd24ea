use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Scalar};

/// The index set of a countable basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `{v_i | i ∈ ℕ}`
    Nat,
    /// `{v_i | i ∈ ℤ}`, ordered 0, -1, 1, -2, 2, ...
    Int,
    /// `{v_0, ..., v_{n-1}}`
    Finite(usize),
}

impl Domain {
    /// Position of an index in the canonical order of the domain. Every
    /// down-set of this order is finite.
    pub fn rank(&self, position: i64) -> Result<u64> {
        match self {
            Domain::Nat if position >= 0 => Ok(position as u64),
            Domain::Finite(n) if position >= 0 && (position as u64) < *n as u64 => {
                Ok(position as u64)
            }
            Domain::Int if position >= 0 => Ok(2 * position as u64),
            Domain::Int => Ok((-2 * position - 1) as u64),
            _ => Err(Error::IndexOutOfDomain {
                domain: *self,
                position,
            }),
        }
    }

    /// Inverse of [`Domain::rank`].
    pub fn position(&self, rank: u64) -> i64 {
        match self {
            Domain::Int if rank % 2 == 0 => (rank / 2) as i64,
            Domain::Int => -(((rank + 1) / 2) as i64),
            _ => rank as i64,
        }
    }

    pub fn contains(&self, position: i64) -> bool {
        self.rank(position).is_ok()
    }

    pub fn check(&self, other: &Domain) -> Result<()> {
        if self != other {
            return Err(Error::DomainMismatch(*self, *other));
        }
        Ok(())
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Nat => write!(f, "N"),
            Domain::Int => write!(f, "Z"),
            Domain::Finite(n) => write!(f, "finite({n})"),
        }
    }
}

/// A basis index: a position inside a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub domain: Domain,
    pub position: i64,
}

impl BasisIndex {
    pub fn new(domain: Domain, position: i64) -> Result<Self> {
        domain.rank(position)?;
        Ok(BasisIndex { domain, position })
    }

    pub fn rank(&self) -> u64 {
        self.domain.rank(self.position).expect("validated at construction")
    }
}

/// A finitely supported vector. Entries are keyed by canonical rank and
/// never store zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseVec {
    field: FieldSpec,
    domain: Domain,
    entries: BTreeMap<u64, Scalar>,
}

impl SparseVec {
    pub fn zero(field: FieldSpec, domain: Domain) -> Self {
        SparseVec {
            field,
            domain,
            entries: BTreeMap::new(),
        }
    }

    /// The basis vector `v_position`.
    pub fn basis(field: FieldSpec, domain: Domain, position: i64) -> Result<Self> {
        let mut v = SparseVec::zero(field, domain);
        v.entries.insert(domain.rank(position)?, field.one());
        Ok(v)
    }

    pub fn from_pairs(
        field: FieldSpec,
        domain: Domain,
        pairs: impl IntoIterator<Item = (i64, Scalar)>,
    ) -> Result<Self> {
        let mut v = SparseVec::zero(field, domain);
        for (pos, c) in pairs {
            if c.field() != field {
                return Err(Error::FieldMismatch(field, c.field()));
            }
            let rank = domain.rank(pos)?;
            v.add_at_rank(rank, &c);
        }
        Ok(v)
    }

    pub fn from_i64_pairs(field: FieldSpec, domain: Domain, pairs: &[(i64, i64)]) -> Result<Self> {
        SparseVec::from_pairs(field, domain, pairs.iter().map(|&(i, c)| (i, field.from_i64(c))))
    }

    /// A coordinate vector in `Finite(len)`.
    pub fn from_dense(field: FieldSpec, values: &[Scalar]) -> Self {
        let mut v = SparseVec::zero(field, Domain::Finite(values.len()));
        for (i, c) in values.iter().enumerate() {
            if !c.is_zero() {
                v.entries.insert(i as u64, c.clone());
            }
        }
        v
    }

    pub fn to_dense(&self, len: usize) -> Vec<Scalar> {
        let mut out = vec![self.field.zero(); len];
        for (&r, c) in &self.entries {
            out[r as usize] = c.clone();
        }
        out
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Coefficient at a domain position (zero if absent or out of domain).
    pub fn get(&self, position: i64) -> Scalar {
        match self.domain.rank(position) {
            Ok(r) => self.get_rank(r),
            Err(_) => self.field.zero(),
        }
    }

    pub fn get_rank(&self, rank: u64) -> Scalar {
        self.entries
            .get(&rank)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub(crate) fn get_rank_ref(&self, rank: u64) -> Option<&Scalar> {
        self.entries.get(&rank)
    }

    /// `(rank, coefficient)` in canonical order.
    pub fn iter_ranks(&self) -> impl Iterator<Item = (u64, &Scalar)> {
        self.entries.iter().map(|(r, c)| (*r, c))
    }

    /// `(position, coefficient)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        let d = self.domain;
        self.entries.iter().map(move |(r, c)| (d.position(*r), c))
    }

    /// Rank of the first nonzero entry in canonical order.
    pub fn leading_rank(&self) -> Option<u64> {
        self.entries.keys().next().copied()
    }

    pub fn max_rank(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    fn add_at_rank(&mut self, rank: u64, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&rank) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.entries.remove(&rank);
                }
            }
            None => {
                self.entries.insert(rank, c.clone());
            }
        }
    }

    pub(crate) fn check_compatible(&self, other: &SparseVec) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        self.domain.check(&other.domain)
    }

    /// `self += a * other`; panics on incompatible vectors.
    pub fn axpy(&mut self, a: &Scalar, other: &SparseVec) {
        debug_assert!(self.check_compatible(other).is_ok());
        if a.is_zero() {
            return;
        }
        for (&r, c) in &other.entries {
            self.add_at_rank(r, &(a * c));
        }
    }

    pub fn add(&self, other: &SparseVec) -> Result<SparseVec> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.axpy(&self.field.one(), other);
        Ok(out)
    }

    pub fn sub(&self, other: &SparseVec) -> Result<SparseVec> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.axpy(&-self.field.one(), other);
        Ok(out)
    }

    pub fn scale(&self, a: &Scalar) -> SparseVec {
        if a.is_zero() {
            return SparseVec::zero(self.field, self.domain);
        }
        SparseVec {
            field: self.field,
            domain: self.domain,
            entries: self.entries.iter().map(|(r, c)| (*r, c * a)).collect(),
        }
    }

    /// Scales so that the leading entry is 1.
    pub fn normalized(&self) -> SparseVec {
        match self.entries.values().next() {
            None => self.clone(),
            Some(lead) => self.scale(&lead.inv().expect("nonzero")),
        }
    }

    /// Linear combination `Σ c_i v_i` of compatible vectors.
    pub fn combination<'a>(
        field: FieldSpec,
        domain: Domain,
        terms: impl IntoIterator<Item = (&'a Scalar, &'a SparseVec)>,
    ) -> SparseVec {
        let mut acc = SparseVec::zero(field, domain);
        for (c, v) in terms {
            acc.axpy(c, v);
        }
        acc
    }

    /// Parses `{0: 1, 3: -2/5}`.
    pub fn parse(field: FieldSpec, domain: Domain, text: &str) -> Result<SparseVec> {
        let t = text.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected `{{...}}` in `{text}`")))?;
        let mut pairs = Vec::new();
        for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, c) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `index: scalar`, got `{item}`")))?;
            let k: i64 = k
                .trim()
                .trim_matches('"')
                .parse()
                .map_err(|_| Error::Parse(format!("bad index `{k}`")))?;
            pairs.push((k, field.parse_scalar(c.trim().trim_matches('"'))?));
        }
        SparseVec::from_pairs(field, domain, pairs)
    }
}

/// The coefficient of `v` at `idx`: the projection onto `<v_idx>` along the
/// remaining basis vectors.
pub fn coordinate_projection(v: &SparseVec, idx: BasisIndex) -> Scalar {
    if idx.domain != v.domain {
        return v.field.zero();
    }
    v.get_rank(idx.rank())
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (pos, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{pos}: {c}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn int_zigzag_order() {
        let ranks: Vec<u64> = [0, -1, 1, -2, 2].iter().map(|&i| Domain::Int.rank(i).unwrap()).collect();
        assert_eq!(ranks, vec![0, 1, 2, 3, 4]);
        for r in 0..20 {
            assert_eq!(Domain::Int.rank(Domain::Int.position(r)).unwrap(), r);
        }
    }

    #[test]
    fn domain_bounds() {
        assert!(Domain::Nat.rank(-1).is_err());
        assert!(Domain::Finite(3).rank(3).is_err());
        assert!(SparseVec::basis(Q, Domain::Finite(2), 2).is_err());
    }

    #[test]
    fn projections() {
        let v = SparseVec::from_i64_pairs(Q, Domain::Nat, &[(0, 3), (2, 1)]).unwrap();
        let at = |i| coordinate_projection(&v, BasisIndex::new(Domain::Nat, i).unwrap());
        assert_eq!(at(2), Q.one());
        assert!(at(1).is_zero());
        let f2 = FieldSpec::Prime(2);
        let w = SparseVec::from_i64_pairs(f2, Domain::Nat, &[(0, 1), (1, 1)]).unwrap();
        assert!(coordinate_projection(&w, BasisIndex::new(Domain::Nat, 0).unwrap()).is_one());
    }

    #[test]
    fn parse_roundtrip() {
        let v = SparseVec::parse(Q, Domain::Int, "{0: 1, -3: -2/5}").unwrap();
        assert_eq!(v.get(-3), Q.parse_scalar("-2/5").unwrap());
        assert_eq!(v.to_string(), "{0: 1, -3: -2/5}");
        assert_eq!(SparseVec::parse(Q, Domain::Int, &v.to_string()).unwrap(), v);
        assert!(SparseVec::parse(Q, Domain::Nat, "{-1: 1}").is_err());
    }

    #[test]
    fn cancellation_removes_entries() {
        let a = SparseVec::from_i64_pairs(Q, Domain::Nat, &[(0, 1), (1, 2)]).unwrap();
        let b = SparseVec::from_i64_pairs(Q, Domain::Nat, &[(1, 2)]).unwrap();
        let d = a.sub(&b).unwrap();
        assert_eq!(d.support_len(), 1);
        assert!(a.sub(&a).unwrap().is_zero());
    }
}
