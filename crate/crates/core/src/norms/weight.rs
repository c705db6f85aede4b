use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Catalog of weight / fundamental functions on `(0, 1]`.
///
/// Every member is nondecreasing with limit 0 at `0+`; the value at `t = 0`
/// is that limit and is never obtained by dividing by zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum WeightFn {
    /// `t ↦ ln^{1-p}(e/t)`, the weight of `X_p`.
    W { p: f64 },
    /// `u ↦ log^{1/p-1}(e/u)`, fundamental function of `Exp L^{p'}`.
    PhiP { p: f64 },
    /// `t ↦ t^β`.
    Power { beta: f64 },
    Identity,
}

impl WeightFn {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            WeightFn::W { p } | WeightFn::PhiP { p } => p.is_finite() && p > 1.0,
            WeightFn::Power { beta } => beta.is_finite() && beta > 0.0,
            WeightFn::Identity => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpace(format!("weight parameter out of range: {self}")))
        }
    }

    /// Whether `w(t)/t` is nonincreasing on `(0, 1]`, as a Marcinkiewicz
    /// fundamental function must be.
    pub fn is_quasiconcave(&self) -> bool {
        match *self {
            WeightFn::W { p } => p <= 2.0,
            WeightFn::PhiP { .. } => true,
            WeightFn::Power { beta } => beta <= 1.0,
            WeightFn::Identity => true,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            WeightFn::Power { beta } => t.powf(beta),
            WeightFn::Identity => t,
            _ => self.eval_ln(t.ln()),
        }
    }

    /// `w(e^{ln_t})`, for arguments far below the smallest positive float.
    pub fn eval_ln(&self, ln_t: f64) -> f64 {
        if ln_t == f64::NEG_INFINITY {
            return 0.0;
        }
        match *self {
            WeightFn::W { p } => (1.0 - ln_t).powf(1.0 - p),
            WeightFn::PhiP { p } => (1.0 - ln_t).powf(1.0 / p - 1.0),
            WeightFn::Power { beta } => (beta * ln_t).exp(),
            WeightFn::Identity => ln_t.exp(),
        }
    }
}

impl fmt::Display for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFn::W { p } => write!(f, "W:{p}"),
            WeightFn::PhiP { p } => write!(f, "phi_p:{p}"),
            WeightFn::Power { beta } => write!(f, "power:{beta}"),
            WeightFn::Identity => write!(f, "identity"),
        }
    }
}

/// Parses `W:1.5`, `phi_p:1.5`, `power:0.5` or `identity`.
pub(crate) fn parse_weight(parts: &[&str]) -> Result<WeightFn> {
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| Error::InvalidSpace(format!("bad number `{s}`")))
    };
    let w = match parts {
        ["W", p] => WeightFn::W { p: num(p)? },
        ["phi_p", p] => WeightFn::PhiP { p: num(p)? },
        ["power", b] => WeightFn::Power { beta: num(b)? },
        ["identity"] => WeightFn::Identity,
        _ => {
            return Err(Error::InvalidSpace(format!(
                "unknown weight `{}`",
                parts.join(":")
            )))
        }
    };
    w.validate()?;
    Ok(w)
}
