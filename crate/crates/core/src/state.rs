//! State vectors in the occupation basis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tiling::{low_mask, Configuration, MAX_PACKED_LEN};

/// Largest interval for which dense vectors are allocated.
pub const MAX_DENSE_STATE_LEN: usize = 24;

/// A real state stored as a map from packed configurations to amplitudes.
///
/// Site 1 sits in bit 0. Amplitudes that cancel to exactly zero are dropped,
/// so the support is always the set of stored keys. The empty interval carries
/// the scalar state `{0 ↦ 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    len: usize,
    amps: BTreeMap<u64, f64>,
}

impl SparseState {
    /// The zero vector on `len` sites.
    pub fn zero(len: usize) -> Result<Self> {
        if len > MAX_PACKED_LEN {
            return Err(Error::DimensionOverflow(format!("{len} sites exceed {MAX_PACKED_LEN}")));
        }
        Ok(SparseState { len, amps: BTreeMap::new() })
    }

    /// The scalar 1, the state of the empty interval.
    pub fn scalar_one() -> Self {
        SparseState { len: 0, amps: BTreeMap::from([(0, 1.0)]) }
    }

    /// The basis vector of a configuration.
    pub fn basis(c: Configuration) -> Self {
        SparseState { len: c.len(), amps: BTreeMap::from([(c.bits(), 1.0)]) }
    }

    /// Basis vector from a 0/1 string, site 1 first.
    pub fn basis_str(s: &str) -> Result<Self> {
        Ok(SparseState::basis(s.parse()?))
    }

    /// Builds a state from `(configuration bits, amplitude)` pairs, summing repeats.
    pub fn from_terms(len: usize, terms: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut s = SparseState::zero(len)?;
        for (bits, amp) in terms {
            if bits & !low_mask(len) != 0 {
                return Err(Error::InvalidArgument(format!("bits {bits:#b} exceed {len} sites")));
            }
            s.add_term(bits, amp);
        }
        Ok(s)
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True for the empty interval.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of configurations with nonzero amplitude.
    pub fn support_size(&self) -> usize {
        self.amps.len()
    }

    /// True if every amplitude vanishes.
    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    /// Amplitude of a packed configuration.
    pub fn amplitude(&self, bits: u64) -> f64 {
        self.amps.get(&bits).copied().unwrap_or(0.0)
    }

    /// Nonzero terms in ascending configuration order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.amps.iter().map(|(&b, &a)| (b, a))
    }

    /// Adds `amp` to the amplitude of `bits`.
    pub fn add_term(&mut self, bits: u64, amp: f64) {
        let entry = self.amps.entry(bits).or_insert(0.0);
        *entry += amp;
        if *entry == 0.0 {
            self.amps.remove(&bits);
        }
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|a| a * a).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Inner product; both states must live on the same number of sites.
    pub fn dot(&self, other: &SparseState) -> f64 {
        assert_eq!(self.len, other.len, "inner product of states on different intervals");
        let (small, large) =
            if self.amps.len() <= other.amps.len() { (self, other) } else { (other, self) };
        small.amps.iter().map(|(b, a)| a * large.amplitude(*b)).sum()
    }

    /// `c · self`.
    pub fn scaled(&self, c: f64) -> SparseState {
        let mut out = SparseState { len: self.len, amps: BTreeMap::new() };
        for (b, a) in self.terms() {
            out.add_term(b, c * a);
        }
        out
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: f64, other: &SparseState) -> SparseState {
        assert_eq!(self.len, other.len, "sum of states on different intervals");
        let mut out = self.clone();
        for (b, a) in other.terms() {
            out.add_term(b, c * a);
        }
        out
    }

    /// The normalized state; fails for the zero vector.
    pub fn normalized(&self) -> Result<SparseState> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero state".into()));
        }
        Ok(self.scaled(1.0 / n))
    }

    /// Tensor product `self ⊗ other`, with `self` on the leftmost sites.
    pub fn tensor(&self, other: &SparseState) -> Result<SparseState> {
        let len = self.len + other.len;
        if len > MAX_PACKED_LEN {
            return Err(Error::DimensionOverflow(format!("{len} sites exceed {MAX_PACKED_LEN}")));
        }
        let mut out = SparseState::zero(len)?;
        for (bl, al) in self.terms() {
            for (br, ar) in other.terms() {
                out.add_term(bl | br << self.len, al * ar);
            }
        }
        Ok(out)
    }

    /// Tensor product with `k` empty sites on the right.
    pub fn pad_zeros(&self, k: usize) -> Result<SparseState> {
        self.tensor(&SparseState::basis(Configuration::new(k, 0)?))
    }

    /// Largest absolute amplitude difference to another state.
    pub fn max_abs_diff(&self, other: &SparseState) -> f64 {
        assert_eq!(self.len, other.len);
        self.add_scaled(-1.0, other).terms().map(|(_, a)| a.abs()).fold(0.0, f64::max)
    }

    /// Dense copy of the state.
    pub fn to_dense(&self) -> Result<DenseState> {
        DenseState::from_sparse(self)
    }

    /// JSON form `{"length": L, "terms": [{"config": "0110", "amp": 1.0}, …]}`.
    pub fn to_json(&self) -> String {
        let record = StateRecord {
            length: self.len,
            terms: self
                .terms()
                .map(|(b, a)| TermRecord {
                    config: Configuration::new(self.len, b).expect("valid bits").to_string(),
                    amp: a,
                })
                .collect(),
        };
        serde_json::to_string(&record).expect("serializable record")
    }

    /// Parses the JSON form written by [`SparseState::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let record: StateRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut terms = Vec::with_capacity(record.terms.len());
        for t in record.terms {
            let c: Configuration = t.config.parse()?;
            if c.len() != record.length {
                return Err(Error::Parse(format!("term {} has the wrong length", t.config)));
            }
            terms.push((c.bits(), t.amp));
        }
        SparseState::from_terms(record.length, terms)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    config: String,
    amp: f64,
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    length: usize,
    terms: Vec<TermRecord>,
}

/// A real state stored as a full vector of `2^L` amplitudes indexed by the
/// packed configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    len: usize,
    amps: Vec<f64>,
}

impl DenseState {
    /// Dense copy of a sparse state.
    pub fn from_sparse(s: &SparseState) -> Result<Self> {
        if s.len() > MAX_DENSE_STATE_LEN {
            return Err(Error::DimensionOverflow(format!(
                "dense state on {} sites exceeds {MAX_DENSE_STATE_LEN}",
                s.len()
            )));
        }
        let mut amps = vec![0.0; 1 << s.len()];
        for (b, a) in s.terms() {
            amps[b as usize] = a;
        }
        Ok(DenseState { len: s.len(), amps })
    }

    /// Wraps a vector of length `2^len`.
    pub fn from_vec(len: usize, amps: Vec<f64>) -> Result<Self> {
        if len > MAX_DENSE_STATE_LEN || amps.len() != 1 << len {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} is not a state on {len} sites",
                amps.len()
            )));
        }
        Ok(DenseState { len, amps })
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True for the empty interval.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Amplitudes indexed by packed configuration.
    pub fn as_slice(&self) -> &[f64] {
        &self.amps
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    /// Converts back to sparse storage, dropping exact zeros.
    pub fn to_sparse(&self) -> SparseState {
        SparseState::from_terms(
            self.len,
            self.amps.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(b, &a)| (b as u64, a)),
        )
        .expect("dense length is bounded")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_places_left_factor_on_low_sites() {
        let a = SparseState::basis_str("10").unwrap();
        let b = SparseState::basis_str("011").unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.len(), 5);
        let c: Configuration = "10011".parse().unwrap();
        assert_eq!(ab.amplitude(c.bits()), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let s = SparseState::from_terms(4, [(0b1001, 1.0), (0b0110, 2.5)]).unwrap();
        let text = s.to_json();
        assert!(text.contains("\"config\":\"0110\""));
        assert_eq!(SparseState::from_json(&text).unwrap(), s);
    }

    #[test]
    fn cancellation_drops_terms() {
        let s = SparseState::from_terms(2, [(1, 1.0), (1, -1.0)]).unwrap();
        assert!(s.is_zero());
    }
}
