use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coefficients::ParameterSequence;
use crate::error::{Error, Result};
use crate::law::{
    attach_memory, build_law, to_evolution, Catalog, EvolutionEquation, HeatLaw,
    Kernel, LawRecipe, MemoryOptions, MemoryRecipe,
};
use crate::rational::{self, Rational};
use crate::solver::{HistoryConfig, Method, StepControl};

const CONFIG: &str = "RunConfig invariant";

/// A law given either by preset name (plus optional constants) or by explicit
/// parameters; the two forms are mutually exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct LawSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rational::serde_opt")]
    pub a: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rational::serde_opt")]
    pub b: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rational::serde_opt")]
    pub c: Option<Rational>,
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "rational::serde_vec")]
    pub epsilon: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "rational::serde_vec")]
    pub omega: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "rational::serde_vec")]
    pub kappa: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<MemoryRecipe>,
}

/// What a [`LawSpec`] resolves to.
#[derive(Debug, Clone)]
pub struct ResolvedLaw {
    /// `None` when the equation was taken directly (supercritical MGT constants).
    pub law: Option<HeatLaw>,
    pub params: Option<ParameterSequence>,
    pub equation: EvolutionEquation,
    pub stability_number: Option<Rational>,
    pub recipe: Option<LawRecipe>,
}

impl LawSpec {
    fn has_explicit(&self) -> bool {
        !(self.epsilon.is_empty() && self.omega.is_empty() && self.kappa.is_empty() && self.memory.is_none())
    }

    pub fn recipe(&self) -> Result<LawRecipe> {
        match &self.preset {
            Some(name) => {
                if self.has_explicit() {
                    return Err(Error::invariant(
                        CONFIG,
                        "a preset and explicit parameters are mutually exclusive",
                    ));
                }
                Catalog::builtin().recipe(name, self.a.clone(), self.b.clone(), self.c.clone())
            }
            None => {
                if self.a.is_some() || self.b.is_some() || self.c.is_some() {
                    return Err(Error::invariant(CONFIG, "constants a, b, c require a preset"));
                }
                if self.kappa.is_empty() {
                    return Err(Error::invariant(CONFIG, "a law needs a preset or kappa"));
                }
                Ok(LawRecipe {
                    epsilon: self.epsilon.clone(),
                    omega: self.omega.clone(),
                    kappa: self.kappa.clone(),
                    memory: self.memory.clone(),
                })
            }
        }
    }

    fn mgt_constants(&self) -> Option<(Rational, Rational, Rational)> {
        match (&self.preset, &self.a, &self.b, &self.c) {
            (Some(p), Some(a), Some(b), Some(c)) if p == "mgt" => Some((a.clone(), b.clone(), c.clone())),
            _ => None,
        }
    }

    /// Builds the law and its evolution equation. With `allow_raw_mgt`, MGT
    /// constants outside the subcritical range give the equation directly.
    pub fn resolve(&self, allow_raw_mgt: bool) -> Result<ResolvedLaw> {
        let stability_number = self
            .mgt_constants()
            .map(|(a, b, c)| crate::law::stability_number(&a, &b, &c));
        let recipe = match self.recipe() {
            Ok(r) => r,
            Err(Error::NotSubcritical { .. }) if allow_raw_mgt => {
                let (a, b, c) = self.mgt_constants().expect("mgt constants");
                return Ok(ResolvedLaw {
                    law: None,
                    params: None,
                    equation: EvolutionEquation::mgt(a, b, c)?,
                    stability_number,
                    recipe: None,
                });
            }
            Err(e) => return Err(e),
        };
        let law = recipe.build()?;
        Ok(ResolvedLaw {
            equation: to_evolution(&law),
            params: recipe.params()?,
            law: Some(law),
            stability_number,
            recipe: Some(recipe),
        })
    }
}

/// The order-`n` law as the relaxation of its order-`(n-1)` parent with
/// exponential memory; `None` when it is not one (memory, `n = 0`, or
/// `ε_n = 0`).
pub fn parent_memory_law(recipe: &LawRecipe) -> Result<Option<HeatLaw>> {
    if recipe.memory.is_some() {
        return Ok(None);
    }
    let Some(params) = recipe.params()? else {
        return Ok(None);
    };
    let n = params.order();
    let eps = params.epsilon()[n - 1].clone();
    if eps.is_zero() {
        return Ok(None);
    }
    let parent = if n == 1 {
        HeatLaw::fourier(params.kappa()[0].clone())?
    } else {
        build_law(&params.truncate(n - 1)?)
    };
    attach_memory(
        &parent,
        params.omega()[n - 1].clone(),
        Kernel::exponential(eps)?,
        params.kappa()[n].clone(),
        MemoryOptions::default(),
    )
    .map(Some)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub length: f64,
    pub modes: usize,
}

impl Default for Domain {
    fn default() -> Self {
        Domain { length: 1.0, modes: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    #[serde(rename = "final")]
    pub final_time: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub integrator: Method,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_dt() -> f64 {
    1e-2
}

fn default_tolerance() -> f64 {
    1e-10
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            final_time: 1.0,
            dt: default_dt(),
            integrator: Method::MatrixExponential,
            tolerance: default_tolerance(),
        }
    }
}

impl TimeConfig {
    pub fn control(&self) -> StepControl {
        StepControl {
            dt: self.dt,
            method: self.integrator,
            tolerance: self.tolerance,
        }
    }
}

/// Initial data: per-mode values `[y, y', …]`, or sampled profiles of `u`,
/// `∂_t u`, … on a uniform grid over `[0, L]` (endpoints included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialData {
    Fourier(Vec<Vec<f64>>),
    Profile(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConfig {
    #[serde(flatten)]
    pub data: InitialData,
    /// Supply one value fewer and read the top derivative off the parent
    /// memory law at `t = 0`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub compatibility: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub law: LawSpec,
    #[serde(default)]
    pub domain: Domain,
    #[serde(default)]
    pub time: TimeConfig,
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub history: HistoryConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("run config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.domain.length.is_finite() && self.domain.length > 0.0) {
            return Err(Error::invariant(CONFIG, "domain.length > 0"));
        }
        if self.domain.modes == 0 {
            return Err(Error::invariant(CONFIG, "domain.modes >= 1"));
        }
        if !(self.time.final_time.is_finite() && self.time.final_time > 0.0) {
            return Err(Error::invariant(CONFIG, "time.final > 0"));
        }
        if !(self.time.dt.is_finite() && self.time.dt > 0.0) {
            return Err(Error::invariant(CONFIG, "time.dt > 0"));
        }
        Ok(())
    }
}
