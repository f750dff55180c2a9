use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{deriv, write_term, HeatLaw, Kernel};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

const EQUATION: &str = "EvolutionEquation invariant";

/// Memory part `-w ∫_0^∞ g(s) Δ∂_t^r u_m(t-s) ds`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationMemory {
    #[serde(with = "rational::serde_one")]
    pub weight: Rational,
    pub kernel: Kernel,
    pub convolved_derivative_order: usize,
}

/// `Σ a_j ∂_t^j u_m - Σ b_j Δ∂_t^j u_m - w ∫ g(s) Δ∂_t^r u_m(t-s) ds = 0`.
///
/// Coefficient lists are kept without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "WireEquation", try_from = "WireEquation")]
pub struct EvolutionEquation {
    variable_index: usize,
    time_coeffs: Vec<Rational>,
    laplacian_coeffs: Vec<Rational>,
    memory: Option<EquationMemory>,
}

#[derive(Serialize, Deserialize)]
struct WireEquation {
    variable_index: usize,
    time_coeffs: BTreeMap<usize, String>,
    laplacian_coeffs: BTreeMap<usize, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    memory: Option<EquationMemory>,
}

fn to_map(v: &[Rational]) -> BTreeMap<usize, String> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j, rational::format(c)))
        .collect()
}

fn from_map(m: &BTreeMap<usize, String>) -> Result<Vec<Rational>> {
    let len = m.keys().next_back().map_or(0, |&k| k + 1);
    let mut v = vec![Rational::zero(); len];
    for (&j, s) in m {
        v[j] = rational::parse(s)?;
    }
    Ok(v)
}

impl From<EvolutionEquation> for WireEquation {
    fn from(eq: EvolutionEquation) -> Self {
        WireEquation {
            variable_index: eq.variable_index,
            time_coeffs: to_map(&eq.time_coeffs),
            laplacian_coeffs: to_map(&eq.laplacian_coeffs),
            memory: eq.memory,
        }
    }
}

impl TryFrom<WireEquation> for EvolutionEquation {
    type Error = Error;

    fn try_from(w: WireEquation) -> Result<Self> {
        EvolutionEquation::new(
            w.variable_index,
            from_map(&w.time_coeffs)?,
            from_map(&w.laplacian_coeffs)?,
            w.memory,
        )
    }
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

impl EvolutionEquation {
    pub fn new(
        variable_index: usize,
        time_coeffs: Vec<Rational>,
        laplacian_coeffs: Vec<Rational>,
        memory: Option<EquationMemory>,
    ) -> Result<Self> {
        let time_coeffs = trim(time_coeffs);
        let laplacian_coeffs = trim(laplacian_coeffs);
        if time_coeffs.is_empty() {
            return Err(Error::invariant(EQUATION, "at least one nonzero time coefficient"));
        }
        if let Some(j) = laplacian_coeffs.iter().position(Signed::is_negative) {
            return Err(Error::invariant(
                EQUATION,
                format!("b_j >= 0 (b_{j} = {})", rational::format(&laplacian_coeffs[j])),
            ));
        }
        if let Some(m) = &memory {
            m.kernel.validate()?;
        }
        Ok(EvolutionEquation {
            variable_index,
            time_coeffs,
            laplacian_coeffs,
            memory: memory.filter(|m| !m.weight.is_zero()),
        })
    }

    /// `∂_ttt v + a ∂_tt v - b Δ∂_t v - c Δv = 0` for arbitrary constants.
    pub fn mgt(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        EvolutionEquation::new(
            0,
            vec![Rational::zero(), Rational::zero(), a, Rational::one()],
            vec![c, b],
            None,
        )
    }

    pub fn variable_index(&self) -> usize {
        self.variable_index
    }

    pub fn time_coeffs(&self) -> &[Rational] {
        &self.time_coeffs
    }

    pub fn laplacian_coeffs(&self) -> &[Rational] {
        &self.laplacian_coeffs
    }

    pub fn memory(&self) -> Option<&EquationMemory> {
        self.memory.as_ref()
    }

    /// Highest time derivative carrying a nonzero coefficient.
    pub fn time_order(&self) -> usize {
        self.time_coeffs.len() - 1
    }

    /// Folds a Dirac memory term into the local Laplacian coefficients.
    pub fn localized(&self) -> Self {
        match &self.memory {
            Some(m) if m.kernel == Kernel::Dirac => {
                let r = m.convolved_derivative_order;
                let mut lap = self.laplacian_coeffs.clone();
                if lap.len() <= r {
                    lap.resize(r + 1, Rational::zero());
                }
                lap[r] += &m.weight;
                EvolutionEquation {
                    variable_index: self.variable_index,
                    time_coeffs: self.time_coeffs.clone(),
                    laplacian_coeffs: trim(lap),
                    memory: None,
                }
            }
            _ => self.clone(),
        }
    }

    /// Re-expresses the equation in `u_{m-1} = ∂_t u_m` as long as no term of
    /// derivative order zero is present.
    pub fn normalized(&self) -> Self {
        let mut eq = self.clone();
        while eq.variable_index > 0
            && eq.time_coeffs[0].is_zero()
            && eq.laplacian_coeffs.first().is_none_or(Zero::is_zero)
            && eq.memory.as_ref().is_none_or(|m| m.convolved_derivative_order > 0)
        {
            eq.variable_index -= 1;
            eq.time_coeffs.remove(0);
            if !eq.laplacian_coeffs.is_empty() {
                eq.laplacian_coeffs.remove(0);
            }
            if let Some(m) = eq.memory.as_mut() {
                m.convolved_derivative_order -= 1;
            }
        }
        eq
    }

    /// Divides every coefficient by the leading time coefficient.
    pub fn monic(&self) -> Self {
        let lead = self.time_coeffs.last().expect("nonempty").clone();
        let scale = |v: &[Rational]| v.iter().map(|c| c / &lead).collect::<Vec<_>>();
        EvolutionEquation {
            variable_index: self.variable_index,
            time_coeffs: scale(&self.time_coeffs),
            laplacian_coeffs: scale(&self.laplacian_coeffs),
            memory: self.memory.as_ref().map(|m| EquationMemory {
                weight: &m.weight / &lead,
                ..m.clone()
            }),
        }
    }
}

/// Eliminates `q` by applying the flux operator of the law to the energy
/// balance `∂_t u + div q = 0`.
///
/// Memoryless laws give an equation in `u_n` when `κ_n ≠ 0` and in `u_{n-1}`
/// otherwise. Memory laws give an equation in `u_n` when `κ_{n+1} = 0` and in
/// `u_{n+1}` otherwise.
pub fn to_evolution(law: &HeatLaw) -> EvolutionEquation {
    let n = law.order();
    let q = law.q_coeffs();
    let grad = law.grad_coeffs();
    let padded = |offset: usize| {
        let mut a = vec![Rational::zero(); offset];
        a.extend(q.iter().cloned());
        a
    };
    let (m, time, lap, memory) = match law.memory() {
        None if grad[0].is_zero() && n > 0 => (n - 1, padded(n), grad[1..].to_vec(), None),
        None => (n, padded(n + 1), grad.to_vec(), None),
        Some(mem) => {
            let mut lap = Vec::with_capacity(grad.len() + 1);
            let kappa_next = mem.perturbation();
            let r = if kappa_next.is_zero() {
                0
            } else {
                lap.push(kappa_next.clone());
                1
            };
            lap.push(mem.instantaneous_weight().clone());
            lap.extend(grad[1..].iter().cloned());
            let memory = EquationMemory {
                weight: mem.convolved_weight().clone(),
                kernel: mem.kernel().clone(),
                convolved_derivative_order: r,
            };
            (n + r, padded(n + 1 + r), lap, Some(memory))
        }
    };
    // an extended-omega memory law keeps b_j >= 0 since ω κ_n > 0
    EvolutionEquation::new(m, time, lap, memory).expect("law coefficients are admissible")
}

impl fmt::Display for EvolutionEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = format!("u_{}", self.variable_index);
        let mut first = true;
        for (j, a) in self.time_coeffs.iter().enumerate().rev() {
            write_term(f, &mut first, a, false, &deriv(j, &var))?;
        }
        for (j, b) in self.laplacian_coeffs.iter().enumerate().rev() {
            write_term(f, &mut first, b, true, &format!("Δ{}", deriv(j, &var)))?;
        }
        if let Some(m) = &self.memory {
            let body = format!(
                "∫ g(s) Δ{}(t-s) ds [g = {}]",
                deriv(m.convolved_derivative_order, &var),
                m.kernel
            );
            write_term(f, &mut first, &m.weight, true, &body)?;
        }
        write!(f, " = 0")
    }
}
