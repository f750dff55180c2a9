//! Parameter templates for the named equations and the MGT constant mapping.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{attach_memory, build_law, HeatLaw, Kernel, MemoryOptions};
use crate::coefficients::ParameterSequence;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

const BUILTIN: &str = include_str!("../../presets.json");

/// A law described by its constants: a parameter sequence (or a bare `κ_0`
/// for the Fourier law) and an optional memory relaxation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawRecipe {
    #[serde(default, with = "rational::serde_vec")]
    pub epsilon: Vec<Rational>,
    #[serde(default, with = "rational::serde_vec")]
    pub omega: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    pub kappa: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<MemoryRecipe>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryRecipe {
    #[serde(with = "rational::serde_one")]
    pub omega: Rational,
    pub kernel: Kernel,
    #[serde(with = "rational::serde_one")]
    pub kappa_next: Rational,
    #[serde(default)]
    pub extended_omega: bool,
}

impl LawRecipe {
    pub fn from_params(params: &ParameterSequence) -> Self {
        LawRecipe {
            epsilon: params.epsilon().to_vec(),
            omega: params.omega().to_vec(),
            kappa: params.kappa().to_vec(),
            memory: None,
        }
    }

    /// `None` for the Fourier law (no ε).
    pub fn params(&self) -> Result<Option<ParameterSequence>> {
        if self.epsilon.is_empty() && self.omega.is_empty() {
            if self.kappa.len() != 1 {
                return Err(Error::invariant(
                    "ParameterSequence invariant",
                    "order-0 law takes exactly one conductivity kappa_0",
                ));
            }
            return Ok(None);
        }
        ParameterSequence::new(self.epsilon.clone(), self.omega.clone(), self.kappa.clone()).map(Some)
    }

    pub fn build(&self) -> Result<HeatLaw> {
        let base = match self.params()? {
            Some(p) => build_law(&p),
            None => HeatLaw::fourier(self.kappa[0].clone())?,
        };
        match &self.memory {
            None => Ok(base),
            Some(m) => attach_memory(
                &base,
                m.omega.clone(),
                m.kernel.clone(),
                m.kappa_next.clone(),
                MemoryOptions {
                    extended_omega: m.extended_omega,
                },
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetEntry {
    pub item: String,
    pub description: String,
    pub law: LawRecipe,
}

/// Named parameter templates, keyed by preset name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Catalog {
    presets: BTreeMap<String, PresetEntry>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Catalog::from_json(BUILTIN).expect("shipped catalog parses")
    }

    pub fn builtin_json() -> &'static str {
        BUILTIN
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.presets.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Result<&PresetEntry> {
        self.presets.get(name).ok_or_else(|| {
            Error::Parse(format!(
                "unknown preset {name:?} (known: {})",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    /// The preset's recipe, with `a, b, c` substituted where the preset
    /// supports named constants (`heat`, `weakly-damped`, `strongly-damped`,
    /// `mgt`).
    pub fn recipe(
        &self,
        name: &str,
        a: Option<Rational>,
        b: Option<Rational>,
        c: Option<Rational>,
    ) -> Result<LawRecipe> {
        let base = self.get(name)?.law.clone();
        if a.is_none() && b.is_none() && c.is_none() {
            return Ok(base);
        }
        let need = |v: Option<Rational>, which: &str| -> Result<Rational> {
            let v = v.ok_or_else(|| Error::Parse(format!("preset {name} needs --{which}")))?;
            if !v.is_positive() {
                return Err(Error::invariant(
                    "preset constants",
                    format!("{which} > 0 (got {})", rational::format(&v)),
                ));
            }
            Ok(v)
        };
        let zero = Rational::zero;
        match name {
            "heat" => Ok(LawRecipe {
                kappa: vec![need(a, "a")?],
                ..base
            }),
            "weakly-damped" => {
                // v'' + a v' - b Δv  <=>  ε = 1/a, κ = b/a
                let (a, b) = (need(a, "a")?, need(b, "b")?);
                Ok(LawRecipe {
                    epsilon: vec![Rational::one() / &a],
                    omega: vec![zero()],
                    kappa: vec![b / a, zero()],
                    memory: None,
                })
            }
            "strongly-damped" => Ok(LawRecipe {
                epsilon: vec![zero()],
                omega: vec![zero()],
                kappa: vec![need(a, "a")?, need(b, "b")?],
                memory: None,
            }),
            "mgt" => Ok(LawRecipe::from_params(&mgt_to_params(
                &need(a, "a")?,
                &need(b, "b")?,
                &need(c, "c")?,
            )?)),
            _ => Err(Error::Unsupported(format!(
                "preset {name} takes no named constants; pass explicit parameters instead"
            ))),
        }
    }
}

/// `ϰ = b - c/a`
pub fn stability_number(a: &Rational, b: &Rational, c: &Rational) -> Rational {
    b - c / a
}

/// Constants reproducing `∂_ttt v + a ∂_tt v - b Δ∂_t v - c Δv = 0` (up to the
/// factor `1/a`) from the order-1 law: `ω = 0, ε = 1/a, κ_1 = c/a, κ_0 = ϰ/a`.
pub fn mgt_to_params(a: &Rational, b: &Rational, c: &Rational) -> Result<ParameterSequence> {
    if !(a.is_positive() && b.is_positive() && c.is_positive()) {
        return Err(Error::invariant("MGT constants", "a, b, c > 0"));
    }
    let kappa_stab = stability_number(a, b, c);
    if !kappa_stab.is_positive() {
        return Err(Error::NotSubcritical {
            regime: if kappa_stab.is_zero() {
                "critical"
            } else {
                "supercritical"
            },
            stability_number: rational::format(&kappa_stab),
        });
    }
    ParameterSequence::new(
        vec![Rational::one() / a],
        vec![Rational::zero()],
        vec![kappa_stab / a, c / a],
    )
}
