//! Constructive sign selection.
//!
//! Given `g_1, …, g_n ∈ L^1` and a dyadic level `τ = 2^{-i}`, find signs
//! `ε_k` with
//!
//! ```text
//! ∫_0^τ (Σ ε_k g_k)^*  ≥  γ' · 2^{-i} ( Σ_{k≤i} a*_k + √i (Σ_{k>i} (a*_k)²)^{1/2} ),
//! ```
//!
//! `a_k = ‖g_k‖_1`. The pieces are a pigeonhole selection over weighted
//! cells ([`pigeonhole_k0`]), a sign choice over the `2^i` sign-agreement
//! cells of `i` functions ([`select_eta`]), a grouping of the coefficients
//! ([`group_indices`]) and a Khintchine-type sign search inside each group
//! ([`khintchine_signs`]). [`select_signs`] assembles them and returns a
//! [`SelectionCertificate`] that has been checked before it is handed out.

mod eta;
mod grouping;
mod khintchine;
mod pigeonhole;
mod pipeline;

pub use eta::{select_eta, EtaSelection};
pub use grouping::group_indices;
pub use khintchine::{khintchine_signs, KhintchineResult, SearchConfig};
pub use pigeonhole::{pigeonhole_k0, Branch};
pub use pipeline::{
    dyadic_level, select_signs, select_signs_tau, CoefficientCase, PipelineConfig,
    SelectionCertificate, GAMMA_PRIME,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector of `±1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector(Vec<i8>);

impl TryFrom<Vec<i8>> for SignVector {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        SignVector::new(v)
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(s: SignVector) -> Self {
        s.0
    }
}

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidArgument("sign entries must be +1 or -1".into()));
        }
        Ok(SignVector(entries))
    }

    pub fn all_plus(n: usize) -> Self {
        SignVector(vec![1; n])
    }

    /// Bit `k` of `mask` set means entry `k` is `-1`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        SignVector((0..n).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> i8 {
        self.0[k]
    }

    pub fn set(&mut self, k: usize, sign: i8) {
        assert!(sign == 1 || sign == -1);
        self.0[k] = sign;
    }

    pub fn flip(&mut self, k: usize) {
        self.0[k] = -self.0[k];
    }

    pub fn negate(&mut self) {
        for s in &mut self.0 {
            *s = -*s;
        }
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| s as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_vector_basics() {
        let s = SignVector::from_mask(4, 0b0101);
        assert_eq!(s.as_slice(), &[-1, 1, -1, 1]);
        assert!(SignVector::new(vec![1, 0]).is_err());
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, "[-1,1,-1,1]");
        assert!(serde_json::from_str::<SignVector>("[2]").is_err());
        let mut t = s.clone();
        t.negate();
        t.flip(0);
        assert_eq!(t.as_slice(), &[-1, -1, 1, -1]);
    }
}
