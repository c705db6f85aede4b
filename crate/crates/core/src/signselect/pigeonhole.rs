use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which alternative of the pigeonhole selection fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `c_k e_k > d` and `e_k < 1/N`
    A,
    /// `c_k > dN` and `e_k >= 1/N`
    B,
}

/// For `e, c >= 0` with `Σ e_k = 1`, `Σ c_k e_k = N` and `0 < d < 1/2`,
/// returns a (0-based) index `k0` satisfying one of the two alternatives
/// of [`Branch`]. Such an index always exists: otherwise the small-mass
/// terms contribute at most `dN` and the large-mass terms at most `dN`,
/// so `N <= 2dN < N`.
pub fn pigeonhole_k0(e: &[f64], c: &[f64], d: f64) -> Result<(usize, Branch)> {
    let n = e.len();
    if n == 0 || c.len() != n {
        return Err(Error::InvalidArgument(format!(
            "pigeonhole needs equal nonempty lengths, got {} and {}",
            n,
            c.len()
        )));
    }
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::InvalidArgument(format!("d must lie in (0, 1/2), got {d}")));
    }
    if e.iter().chain(c).any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
    }
    let nf = n as f64;
    let mass: f64 = e.iter().sum();
    if (mass - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("Σ e_k = {mass}, expected 1")));
    }
    let weighted: f64 = e.iter().zip(c).map(|(a, b)| a * b).sum();
    if (weighted - nf).abs() > 1e-9 * nf {
        return Err(Error::InvalidArgument(format!(
            "Σ c_k e_k = {weighted}, expected {n}"
        )));
    }
    let threshold = 1.0 / nf;
    for k in 0..n {
        if e[k] < threshold && c[k] * e[k] > d {
            return Ok((k, Branch::A));
        }
        if e[k] >= threshold && c[k] > d * nf {
            return Ok((k, Branch::B));
        }
    }
    Err(Error::Invariant(
        "no pigeonhole index exists although Σ c_k e_k = N".into(),
    ))
}
