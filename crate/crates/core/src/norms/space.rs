use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::weight::{parse_weight, WeightFn};
use super::{
    lorentz_norm, lp_norm, lq_seq_norm, luxemburg_norm, marcinkiewicz_norm, weak_seq_norm,
    WeakVariant,
};
use crate::error::{Error, Result};
use crate::stepfn::{SeqVec, StepFn};

/// Descriptor of a function or sequence norm.
///
/// Compact string forms (used on the command line):
///
/// | form                   | space                              |
/// |------------------------|------------------------------------|
/// | `Lp:2`, `Linf`         | Lebesgue `L^p` (`Lp:inf` accepted) |
/// | `Xp:1.5`               | `Λ_{p,W}` with `W = ln^{1-p}(e/t)` |
/// | `Lorentz:2:power:0.5`  | `Λ_{p,w}` for a catalog weight     |
/// | `M:phi_p:1.5`          | Marcinkiewicz `M_φ`                |
/// | `ExpL:2`               | Orlicz `Exp L^α`                   |
/// | `lq:2`                 | sequence `ℓ^q`                     |
/// | `lqw:2:sup`, `lqw:2:avg` | weak `ℓ^{q,∞}` (two forms)       |
/// | `Linf(Xp:1.5)`         | mixed norm, outer(inner)           |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Lp { p: f64 },
    Linf,
    Lorentz { p: f64, weight: WeightFn },
    Marcinkiewicz { weight: WeightFn },
    OrliczExp { alpha: f64 },
    SeqLq { q: f64 },
    SeqWeak { q: f64, variant: WeakVariant },
    Mixed { outer: Box<SpaceSpec>, inner: Box<SpaceSpec> },
}

impl SpaceSpec {
    /// `X_p = Λ_{p,W}`.
    pub fn xp(p: f64) -> Self {
        SpaceSpec::Lorentz {
            p,
            weight: WeightFn::W { p },
        }
    }

    pub fn exp_l(alpha: f64) -> Self {
        SpaceSpec::OrliczExp { alpha }
    }

    pub fn lp(p: f64) -> Self {
        if p == f64::INFINITY {
            SpaceSpec::Linf
        } else {
            SpaceSpec::Lp { p }
        }
    }

    pub fn mixed(outer: SpaceSpec, inner: SpaceSpec) -> Self {
        SpaceSpec::Mixed {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpace(msg));
        match self {
            SpaceSpec::Lp { p } if !(p.is_finite() && *p >= 1.0) => bad(format!("L^p needs p >= 1, got {p}")),
            SpaceSpec::Lorentz { p, weight } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return bad(format!("Lorentz exponent must be >= 1, got {p}"));
                }
                weight.validate()
            }
            SpaceSpec::Marcinkiewicz { weight } => {
                weight.validate()?;
                if !weight.is_quasiconcave() {
                    return bad(format!("Marcinkiewicz weight {weight} is not quasiconcave"));
                }
                Ok(())
            }
            SpaceSpec::OrliczExp { alpha } if !(alpha.is_finite() && *alpha > 0.0) => {
                bad(format!("Exp L^α needs α > 0, got {alpha}"))
            }
            SpaceSpec::SeqLq { q } if !(*q >= 1.0) => bad(format!("ℓ^q needs q >= 1, got {q}")),
            SpaceSpec::SeqWeak { q, .. } if !(q.is_finite() && *q > 1.0) => {
                bad(format!("weak ℓ^q needs q > 1, got {q}"))
            }
            SpaceSpec::Mixed { outer, inner } => {
                if !outer.is_function_space() || !inner.is_function_space() {
                    return bad("mixed norms need function spaces on both levels".into());
                }
                outer.validate()?;
                inner.validate()
            }
            _ => Ok(()),
        }
    }

    /// A norm on step functions of one variable.
    pub fn is_function_space(&self) -> bool {
        matches!(
            self,
            SpaceSpec::Lp { .. }
                | SpaceSpec::Linf
                | SpaceSpec::Lorentz { .. }
                | SpaceSpec::Marcinkiewicz { .. }
                | SpaceSpec::OrliczExp { .. }
        )
    }

    pub fn is_sequence_space(&self) -> bool {
        matches!(self, SpaceSpec::SeqLq { .. } | SpaceSpec::SeqWeak { .. })
    }

    /// Norm of a step function; fails for sequence and mixed descriptors.
    pub fn norm(&self, f: &StepFn) -> Result<f64> {
        Ok(match self {
            SpaceSpec::Lp { p } => lp_norm(f, *p),
            SpaceSpec::Linf => lp_norm(f, f64::INFINITY),
            SpaceSpec::Lorentz { p, weight } => lorentz_norm(f, *p, weight),
            SpaceSpec::Marcinkiewicz { weight } => marcinkiewicz_norm(f, weight),
            SpaceSpec::OrliczExp { alpha } => luxemburg_norm(f, *alpha),
            other => {
                return Err(Error::InvalidSpace(format!(
                    "`{other}` is not a norm on functions of one variable"
                )))
            }
        })
    }

    /// Norm of a finite sequence; fails for function-space descriptors.
    pub fn seq_norm(&self, a: &SeqVec) -> Result<f64> {
        Ok(match self {
            SpaceSpec::SeqLq { q } => lq_seq_norm(a, *q),
            SpaceSpec::SeqWeak { q, variant } => weak_seq_norm(a, *q, *variant),
            other => {
                return Err(Error::InvalidSpace(format!(
                    "`{other}` is not a sequence norm"
                )))
            }
        })
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lp { p } => write!(f, "Lp:{p}"),
            SpaceSpec::Linf => write!(f, "Linf"),
            SpaceSpec::Lorentz {
                p,
                weight: WeightFn::W { p: wp },
            } if p == wp => write!(f, "Xp:{p}"),
            SpaceSpec::Lorentz { p, weight } => write!(f, "Lorentz:{p}:{weight}"),
            SpaceSpec::Marcinkiewicz { weight } => write!(f, "M:{weight}"),
            SpaceSpec::OrliczExp { alpha } => write!(f, "ExpL:{alpha}"),
            SpaceSpec::SeqLq { q } if q.is_infinite() => write!(f, "lq:inf"),
            SpaceSpec::SeqLq { q } => write!(f, "lq:{q}"),
            SpaceSpec::SeqWeak { q, variant } => {
                let v = match variant {
                    WeakVariant::Sup => "sup",
                    WeakVariant::Average => "avg",
                };
                write!(f, "lqw:{q}:{v}")
            }
            SpaceSpec::Mixed { outer, inner } => write!(f, "{outer}({inner})"),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(open) = s.find('(') {
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidSpace(format!("unbalanced parentheses in `{s}`")))?;
            let spec = SpaceSpec::mixed(s[..open].parse()?, inner.parse()?);
            spec.validate()?;
            return Ok(spec);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| -> Result<f64> {
            match x {
                "inf" => Ok(f64::INFINITY),
                _ => x
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidSpace(format!("bad number `{x}` in `{s}`"))),
            }
        };
        let spec = match parts.as_slice() {
            ["Lp", p] => SpaceSpec::lp(num(p)?),
            ["Linf"] => SpaceSpec::Linf,
            ["Xp", p] => SpaceSpec::xp(num(p)?),
            ["Lorentz", p, rest @ ..] => SpaceSpec::Lorentz {
                p: num(p)?,
                weight: parse_weight(rest)?,
            },
            ["M", rest @ ..] => SpaceSpec::Marcinkiewicz {
                weight: parse_weight(rest)?,
            },
            ["ExpL", a] => SpaceSpec::exp_l(num(a)?),
            ["lq", q] => SpaceSpec::SeqLq { q: num(q)? },
            ["lqw", q, v] => SpaceSpec::SeqWeak {
                q: num(q)?,
                variant: match *v {
                    "sup" => WeakVariant::Sup,
                    "avg" | "average" => WeakVariant::Average,
                    _ => return Err(Error::InvalidSpace(format!("unknown weak variant `{v}`"))),
                },
            },
            _ => return Err(Error::InvalidSpace(format!("unrecognized space `{s}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}
