//! Named state families with string-keyed parameters, shared by the sweep
//! engine, the CLI, and the FFI layer.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bloch::{correlation_tensor, embed_to_common_dimension, CorrelationTensor};
use crate::error::{Error, Result};
use crate::states::{
    beta_state, cs_max_lambda, cs_state, embed, ghz_state, noisy_mix, qutrit_psi,
    tensor_and_regroup, w_state, werner, DensityMatrix, WernerParams,
};
use crate::su_basis::generators;

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Werner,
    Ghz,
    W,
    QutritPsi,
    Beta,
    Cs,
    Thm5,
    Ex2,
    Ex3,
}

const CS_KEYS: [&str; 7] = ["l0", "l1", "l2", "l3", "l4", "l5", "l6"];

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Werner,
        Family::Ghz,
        Family::W,
        Family::QutritPsi,
        Family::Beta,
        Family::Cs,
        Family::Thm5,
        Family::Ex2,
        Family::Ex3,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::Ghz => "ghz",
            Family::W => "w",
            Family::QutritPsi => "qutrit-psi",
            Family::Beta => "beta",
            Family::Cs => "cs",
            Family::Thm5 => "thm5",
            Family::Ex2 => "ex2",
            Family::Ex3 => "ex3",
        }
    }

    /// Parameters and their defaults. `cs` has an extra `lam` whose default
    /// is the largest value keeping the state positive.
    pub fn defaults(self) -> Params {
        let pairs: &[(&str, f64)] = match self {
            Family::Werner => &[("p", -1.0), ("d", 2.0)],
            Family::Ghz | Family::W | Family::QutritPsi | Family::Beta => &[],
            Family::Cs => &[
                ("l0", 1.0),
                ("l1", 1.0),
                ("l2", 1.0),
                ("l3", 1.0),
                ("l4", 1.0),
                ("l5", 1.0),
                ("l6", 1.0),
            ],
            Family::Thm5 => &[("p1", -1.0), ("p2", -1.0), ("x", 1.0)],
            Family::Ex2 => &[("x", 1.0), ("y", 0.0)],
            Family::Ex3 => &[("x", 1.0)],
        };
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    fn accepts(self, key: &str) -> bool {
        self.defaults().contains_key(key) || (self == Family::Cs && key == "lam")
    }

    /// Defaults overlaid with `overrides`; unknown keys are rejected.
    pub fn resolve(self, overrides: &Params) -> Result<Params> {
        let mut params = self.defaults();
        for (k, &v) in overrides {
            if !self.accepts(k) {
                return Err(Error::InvalidConfig(format!(
                    "family `{self}` has no parameter `{k}`"
                )));
            }
            params.insert(k.clone(), v);
        }
        Ok(params)
    }

    /// True for families defined on three subsystems.
    pub fn is_tripartite(self) -> bool {
        matches!(
            self,
            Family::Ghz | Family::W | Family::QutritPsi | Family::Thm5 | Family::Ex2 | Family::Ex3
        )
    }

    /// The state in its native subsystem shape.
    pub fn build(self, overrides: &Params) -> Result<DensityMatrix> {
        let p = self.resolve(overrides)?;
        match self {
            Family::Werner => {
                let d = get(&p, "d")?;
                if d.fract() != 0.0 || d < 2.0 {
                    return Err(Error::InvalidLocalDimension(d as usize));
                }
                Ok(werner(WernerParams::new(get(&p, "p")?, d as usize)?))
            }
            Family::Ghz => Ok(ghz_state()),
            Family::W => Ok(w_state()),
            Family::QutritPsi => Ok(qutrit_psi()),
            Family::Beta => Ok(beta_state()),
            Family::Cs => {
                let mut lambdas = [0.0; 7];
                for (slot, key) in lambdas.iter_mut().zip(CS_KEYS) {
                    *slot = get(&p, key)?;
                }
                let lam = match p.get("lam") {
                    Some(&lam) => lam,
                    None => cs_max_lambda(&lambdas)?,
                };
                cs_state(&lambdas, lam)
            }
            Family::Thm5 => thm5_native(get(&p, "p1")?, get(&p, "p2")?, get(&p, "x")?),
            Family::Ex2 => {
                let (x, y) = (unit(&p, "x")?, unit(&p, "y")?);
                let noise = 1.0 - x - y;
                if noise < -1e-12 {
                    return Err(Error::InvalidParameter {
                        name: "x+y".into(),
                        value: x + y,
                        reason: "must not exceed 1".into(),
                    });
                }
                noisy_mix(&[&ghz_state(), &w_state()], &[x, y], noise.max(0.0))
            }
            Family::Ex3 => {
                let x = unit(&p, "x")?;
                noisy_mix(&[&qutrit_psi()], &[x], 1.0 - x)
            }
        }
    }

    /// The state embedded into `[d, d, d]`, ready for tensor extraction.
    pub fn tripartite(self, overrides: &Params) -> Result<DensityMatrix> {
        if !self.is_tripartite() {
            return Err(Error::NotTripartite(self.tag().into()));
        }
        embed_to_common_dimension(&self.build(overrides)?)
    }

    pub fn tensor(self, overrides: &Params) -> Result<CorrelationTensor> {
        let state = self.tripartite(overrides)?;
        let basis = generators(state.dims()[0])?;
        correlation_tensor(&state, &basis)
    }
}

/// `(1-x) I/16 + x α_{AC1} ⊗ β_{BC2}` on `[2, 2, 4]` with two-qubit Werner
/// states `α = ρ_w(p1, 2)`, `β = ρ_w(p2, 2)`.
pub fn thm5_native(p1: f64, p2: f64, x: f64) -> Result<DensityMatrix> {
    let x = check_unit("x", x)?;
    let alpha = werner(WernerParams::new(p1, 2)?);
    let beta = werner(WernerParams::new(p2, 2)?);
    let core = tensor_and_regroup(&alpha, &beta)?;
    noisy_mix(&[&core], &[x], 1.0 - x)
}

/// [`thm5_native`] embedded into `[4, 4, 4]`.
pub fn thm5_embedded(p1: f64, p2: f64, x: f64) -> Result<DensityMatrix> {
    embed(&thm5_native(p1, p2, x)?, &[4, 4, 4])
}

fn get(p: &Params, key: &str) -> Result<f64> {
    p.get(key)
        .copied()
        .ok_or_else(|| Error::InvalidConfig(format!("missing parameter `{key}`")))
}

fn unit(p: &Params, key: &str) -> Result<f64> {
    check_unit(key, get(p, key)?)
}

fn check_unit(name: &str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::InvalidParameter {
            name: name.into(),
            value: v,
            reason: "must lie in [0, 1]".into(),
        })
    }
}

/// Parses `key=value` pairs separated by commas, e.g. `p1=-1,x=0.5`.
pub fn parse_params(s: &str) -> Result<Params> {
    let mut out = Params::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("expected key=value, got `{item}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad number in `{item}`")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::UnknownFamily(s.into()))
    }
}
