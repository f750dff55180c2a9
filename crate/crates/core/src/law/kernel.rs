//! Memory kernels and their differentiated/integrated transforms.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

const KERNEL: &str = "Kernel invariant";

/// One weighted exponential `w/ε · e^{-s/ε}` (mass `w`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PronyTerm {
    #[serde(with = "rational::serde_one")]
    pub weight: Rational,
    #[serde(with = "rational::serde_one")]
    pub rate: Rational,
}

/// Memory kernel `g`.
///
/// `Exponential(ε)` is `g(s) = (1/ε) e^{-s/ε}` and always has unit mass.
/// `PronySum` is `Σ w_i/ε_i e^{-s/ε_i}` with mass `Σ w_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    Dirac,
    Exponential {
        #[serde(with = "rational::serde_one")]
        epsilon: Rational,
    },
    Prony {
        terms: Vec<PronyTerm>,
    },
}

impl Kernel {
    pub fn exponential(epsilon: Rational) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::invariant(
                KERNEL,
                format!("exponential rate epsilon > 0 (got {})", rational::format(&epsilon)),
            ));
        }
        Ok(Kernel::Exponential { epsilon })
    }

    pub fn prony(terms: Vec<PronyTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invariant(KERNEL, "Prony sum needs at least one term"));
        }
        for t in &terms {
            if !t.weight.is_positive() || !t.rate.is_positive() {
                return Err(Error::invariant(
                    KERNEL,
                    format!(
                        "Prony weights and rates > 0 (got w = {}, rate = {})",
                        rational::format(&t.weight),
                        rational::format(&t.rate)
                    ),
                ));
            }
        }
        Ok(Kernel::Prony { terms })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Kernel::Dirac => Ok(()),
            Kernel::Exponential { epsilon } => Kernel::exponential(epsilon.clone()).map(|_| ()),
            Kernel::Prony { terms } => Kernel::prony(terms.clone()).map(|_| ()),
        }
    }

    pub fn mass(&self) -> Rational {
        match self {
            Kernel::Dirac | Kernel::Exponential { .. } => Rational::one(),
            Kernel::Prony { terms } => terms.iter().map(|t| &t.weight).sum(),
        }
    }

    /// Prony decomposition `(w_i, ε_i)`; `None` for the Dirac mass.
    pub fn prony_terms(&self) -> Option<Vec<PronyTerm>> {
        match self {
            Kernel::Dirac => None,
            Kernel::Exponential { epsilon } => Some(vec![PronyTerm {
                weight: Rational::one(),
                rate: epsilon.clone(),
            }]),
            Kernel::Prony { terms } => Some(terms.clone()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Dirac => "dirac",
            Kernel::Exponential { .. } => "exponential",
            Kernel::Prony { .. } => "prony",
        }
    }

    /// Parses `dirac`, `exp:<eps>`, or `prony:<w>@<eps>,<w>@<eps>,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("dirac") {
            return Ok(Kernel::Dirac);
        }
        if let Some(eps) = s.strip_prefix("exp:") {
            return Kernel::exponential(rational::parse(eps)?);
        }
        if let Some(list) = s.strip_prefix("prony:") {
            let terms = list
                .split(',')
                .map(|item| {
                    let (w, e) = item
                        .split_once('@')
                        .ok_or_else(|| Error::Parse(format!("expected weight@rate, got {item:?}")))?;
                    Ok(PronyTerm {
                        weight: rational::parse(w)?,
                        rate: rational::parse(e)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Kernel::prony(terms);
        }
        Err(Error::Parse(format!(
            "unknown kernel {s:?} (expected dirac, exp:<eps>, prony:<w>@<eps>,...)"
        )))
    }

    /// Evaluates `g(s)` in floating point; the Dirac mass has no pointwise value.
    pub fn eval(&self, s: f64) -> Option<f64> {
        let terms = self.prony_terms()?;
        Some(
            terms
                .iter()
                .map(|t| {
                    let eps = rational::to_f64(&t.rate);
                    rational::to_f64(&t.weight) / eps * (-s / eps).exp()
                })
                .sum(),
        )
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Dirac => write!(f, "δ"),
            Kernel::Exponential { epsilon } => {
                write!(f, "exp(ε={})", rational::format(epsilon))
            }
            Kernel::Prony { terms } => {
                write!(f, "prony[")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(
                        f,
                        "{}@{}",
                        rational::format(&t.weight),
                        rational::format(&t.rate)
                    )?;
                }
                write!(f, "]")
            }
        }
    }
}

/// `Σ c_i e^{-s/τ_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpSum {
    pub terms: Vec<ExpTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpTerm {
    #[serde(with = "rational::serde_one")]
    pub coefficient: Rational,
    #[serde(with = "rational::serde_one")]
    pub rate: Rational,
}

impl ExpSum {
    pub fn eval(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| rational::to_f64(&t.coefficient) * (-s / rational::to_f64(&t.rate)).exp())
            .sum()
    }

    pub fn at_zero(&self) -> Rational {
        self.terms.iter().map(|t| &t.coefficient).sum()
    }
}

/// Differentiated kernel `μ(s) = -(1-ω)κ g'(s)` and integrated kernel
/// `G(s) = (1-ω)κ ∫_s^∞ g`.
pub fn kernel_transforms(kernel: &Kernel, omega: &Rational, kappa: &Rational) -> Result<(ExpSum, ExpSum)> {
    let terms = kernel
        .prony_terms()
        .ok_or_else(|| Error::Unsupported("Dirac kernel has no classical derivative".into()))?;
    let scale = (Rational::one() - omega) * kappa;
    let mut mu = Vec::with_capacity(terms.len());
    let mut big_g = Vec::with_capacity(terms.len());
    for t in terms {
        if t.rate.is_zero() {
            return Err(Error::invariant(KERNEL, "Prony rates > 0"));
        }
        mu.push(ExpTerm {
            coefficient: &scale * &t.weight / (&t.rate * &t.rate),
            rate: t.rate.clone(),
        });
        big_g.push(ExpTerm {
            coefficient: &scale * &t.weight,
            rate: t.rate,
        });
    }
    Ok((ExpSum { terms: mu }, ExpSum { terms: big_g }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn exponential_transforms() {
        let eps = ratio(2, 5);
        let k = Kernel::exponential(eps.clone()).unwrap();
        let (mu, g) = kernel_transforms(&k, &int(0), &int(1)).unwrap();
        assert_eq!(mu.terms[0].coefficient, int(1) / (&eps * &eps));
        assert_eq!(g.terms[0].coefficient, int(1));
        assert_eq!(g.terms[0].rate, eps);
    }

    #[test]
    fn transforms_scale_linearly() {
        let k = Kernel::exponential(int(3)).unwrap();
        let (mu0, g0) = kernel_transforms(&k, &int(0), &int(1)).unwrap();
        let (mu, g) = kernel_transforms(&k, &ratio(1, 4), &int(2)).unwrap();
        let s = ratio(3, 2);
        assert_eq!(mu.terms[0].coefficient, &mu0.terms[0].coefficient * &s);
        assert_eq!(g.terms[0].coefficient, &g0.terms[0].coefficient * &s);
    }

    #[test]
    fn single_prony_term_is_scaled_exponential() {
        let w = ratio(3, 2);
        let eps = ratio(1, 3);
        let p = Kernel::prony(vec![PronyTerm {
            weight: w.clone(),
            rate: eps.clone(),
        }])
        .unwrap();
        let e = Kernel::exponential(eps).unwrap();
        assert_eq!(p.mass(), w);
        for s in [0.0, 0.1, 1.0] {
            let ratio = p.eval(s).unwrap() / e.eval(s).unwrap();
            assert!((ratio - 1.5).abs() < 1e-14);
        }
        let (mu_p, g_p) = kernel_transforms(&p, &int(0), &int(1)).unwrap();
        let (mu_e, g_e) = kernel_transforms(&e, &int(0), &int(1)).unwrap();
        assert_eq!(mu_p.at_zero(), mu_e.at_zero() * &w);
        assert_eq!(g_p.at_zero(), w);
        assert_eq!(g_e.at_zero(), int(1));
    }

    #[test]
    fn integrated_kernel_matches_tail_integral() {
        let k = Kernel::prony(vec![
            PronyTerm { weight: ratio(1, 2), rate: ratio(1, 4) },
            PronyTerm { weight: ratio(1, 2), rate: int(2) },
        ])
        .unwrap();
        let (_, g) = kernel_transforms(&k, &int(0), &int(1)).unwrap();
        // ∫_s^∞ g via midpoint rule on a long interval
        let s0 = 0.3;
        let h = 1e-4;
        let tail: f64 = (0..400_000)
            .map(|j| k.eval(s0 + (j as f64 + 0.5) * h).unwrap() * h)
            .sum();
        assert!((tail - g.eval(s0)).abs() < 1e-6);
    }

    #[test]
    fn dirac_has_no_transform() {
        assert!(kernel_transforms(&Kernel::Dirac, &int(0), &int(1)).is_err());
    }

    #[test]
    fn parse_and_validate() {
        assert_eq!(Kernel::parse("dirac").unwrap(), Kernel::Dirac);
        assert_eq!(
            Kernel::parse("exp:1/2").unwrap(),
            Kernel::Exponential { epsilon: ratio(1, 2) }
        );
        let p = Kernel::parse("prony:1@1/2,2@3").unwrap();
        assert_eq!(p.mass(), int(3));
        assert!(Kernel::parse("exp:0").is_err());
        assert!(Kernel::parse("prony:1@-1").is_err());
        assert!(Kernel::parse("gauss").is_err());
        let json = serde_json::to_string(&Kernel::Exponential { epsilon: ratio(1, 2) }).unwrap();
        assert_eq!(json, r#"{"type":"exponential","epsilon":"1/2"}"#);
    }
}
