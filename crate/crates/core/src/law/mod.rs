//! Heat laws of order `n`, with and without memory, and the PDEs they induce.
//!
//! A law is stored as two coefficient lists:
//!
//! ```text
//! Σ_{i=0..n} c_i ∂_t^i q = -Σ_{i=0..2n} d_i ∇∂_t^i u_n   [- memory]
//! ```
//!
//! with `c_0 = 1`, `c_i = α_n^i`, `d_0 = κ_n`, `d_i = β_n^i`. An optional
//! [`MemoryTerm`] splits the `∇u_n` coefficient into an instantaneous part and
//! a convolved part and adds the perturbation `-κ_{n+1} ∇u_{n+1}`.

mod classify;
mod equation;
mod kernel;
mod presets;

pub use classify::{classify, CatalogEquation, Classification};
pub use equation::{to_evolution, EquationMemory, EvolutionEquation};
pub use kernel::{kernel_transforms, ExpSum, ExpTerm, Kernel, PronyTerm};
pub use presets::{mgt_to_params, stability_number, Catalog, LawRecipe, MemoryRecipe, PresetEntry};

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientTable, ParameterSequence};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

const LAW: &str = "HeatLaw invariant";
const MEMORY: &str = "MemoryTerm invariant";

/// Relaxation of `∇u_n` against a kernel, plus the `-κ_{n+1}∇u_{n+1}`
/// perturbation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryTerm {
    #[serde(with = "rational::serde_one")]
    omega: Rational,
    #[serde(with = "rational::serde_one")]
    instantaneous_weight: Rational,
    #[serde(with = "rational::serde_one")]
    convolved_weight: Rational,
    kernel: Kernel,
    #[serde(with = "rational::serde_one")]
    perturbation: Rational,
}

impl MemoryTerm {
    pub fn omega(&self) -> &Rational {
        &self.omega
    }

    /// `ω_{n+1} κ_n`
    pub fn instantaneous_weight(&self) -> &Rational {
        &self.instantaneous_weight
    }

    /// `(1 - ω_{n+1}) κ_n`
    pub fn convolved_weight(&self) -> &Rational {
        &self.convolved_weight
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// `κ_{n+1}`
    pub fn perturbation(&self) -> &Rational {
        &self.perturbation
    }
}

/// Validation switches for [`attach_memory`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryOptions {
    /// Admit `ω_{n+1} > 1` (never `= 1`); produces the type I memory family.
    pub extended_omega: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLaw")]
pub struct HeatLaw {
    order: usize,
    #[serde(with = "rational::serde_vec")]
    q_coeffs: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    grad_coeffs: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    memory: Option<MemoryTerm>,
}

#[derive(Deserialize)]
struct RawLaw {
    order: usize,
    #[serde(with = "rational::serde_vec")]
    q_coeffs: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    grad_coeffs: Vec<Rational>,
    #[serde(default)]
    memory: Option<MemoryTerm>,
}

impl TryFrom<RawLaw> for HeatLaw {
    type Error = Error;

    fn try_from(raw: RawLaw) -> Result<Self> {
        let law = HeatLaw::new(raw.q_coeffs, raw.grad_coeffs)?;
        if law.order != raw.order {
            return Err(Error::invariant(LAW, "order = |q_coeffs| - 1"));
        }
        match raw.memory {
            None => Ok(law),
            Some(m) => {
                if &m.instantaneous_weight + &m.convolved_weight != law.grad_coeffs[0] {
                    return Err(Error::invariant(
                        MEMORY,
                        "instantaneous_weight + convolved_weight = kappa_n",
                    ));
                }
                if m.instantaneous_weight != &m.omega * &law.grad_coeffs[0] {
                    return Err(Error::invariant(MEMORY, "instantaneous_weight = omega * kappa_n"));
                }
                if m.perturbation.is_negative() {
                    return Err(Error::invariant(MEMORY, "kappa_{n+1} >= 0"));
                }
                m.kernel.validate()?;
                Ok(HeatLaw {
                    memory: Some(m),
                    ..law
                })
            }
        }
    }
}

impl HeatLaw {
    /// A memoryless law from raw coefficient lists.
    pub fn new(q_coeffs: Vec<Rational>, grad_coeffs: Vec<Rational>) -> Result<Self> {
        if q_coeffs.first().map(One::is_one) != Some(true) {
            return Err(Error::invariant(LAW, "c_0 = 1"));
        }
        let order = q_coeffs.len() - 1;
        if grad_coeffs.len() != 2 * order + 1 {
            return Err(Error::invariant(
                LAW,
                format!(
                    "|grad_coeffs| = 2n+1 (n = {order}, got {})",
                    grad_coeffs.len()
                ),
            ));
        }
        if let Some(i) = grad_coeffs.iter().position(Signed::is_negative) {
            return Err(Error::invariant(LAW, format!("gradient coefficients >= 0 (d_{i} < 0)")));
        }
        Ok(HeatLaw {
            order,
            q_coeffs,
            grad_coeffs,
            memory: None,
        })
    }

    /// The Fourier law `q = -κ ∇u`, the law of order 0.
    pub fn fourier(kappa: Rational) -> Result<Self> {
        if !kappa.is_positive() {
            return Err(Error::invariant(LAW, "Fourier conductivity kappa_0 > 0"));
        }
        HeatLaw::new(vec![Rational::one()], vec![kappa])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `[1, α_n^1..α_n^n]`
    pub fn q_coeffs(&self) -> &[Rational] {
        &self.q_coeffs
    }

    /// `[κ_n, β_n^1..β_n^{2n}]`
    pub fn grad_coeffs(&self) -> &[Rational] {
        &self.grad_coeffs
    }

    pub fn kappa(&self) -> &Rational {
        &self.grad_coeffs[0]
    }

    pub fn memory(&self) -> Option<&MemoryTerm> {
        self.memory.as_ref()
    }

    /// `β_n^{2n} ≠ 0`: the top-order Laplacian term is present.
    pub fn is_regularized(&self) -> bool {
        self.order > 0 && !self.grad_coeffs[2 * self.order].is_zero()
    }

    /// Coefficients agree with [`build_law`] on `params`.
    pub fn matches_params(&self, params: &ParameterSequence) -> bool {
        self.memory.is_none() && *self == build_law(params)
    }
}

/// The heat law of order `n` for a validated parameter sequence.
pub fn build_law(params: &ParameterSequence) -> HeatLaw {
    let table = CoefficientTable::build(params);
    let mut q = Vec::with_capacity(table.order + 1);
    q.push(Rational::one());
    q.extend(table.alpha);
    let mut grad = Vec::with_capacity(2 * table.order + 1);
    grad.push(params.kappa()[params.order()].clone());
    grad.extend(table.beta);
    HeatLaw {
        order: table.order,
        q_coeffs: q,
        grad_coeffs: grad,
        memory: None,
    }
}

/// Relaxes `∇u_n` against `kernel` with instantaneous fraction `omega_next`
/// and adds `-kappa_next ∇u_{n+1}`.
pub fn attach_memory(
    law: &HeatLaw,
    omega_next: Rational,
    kernel: Kernel,
    kappa_next: Rational,
    options: MemoryOptions,
) -> Result<HeatLaw> {
    if law.memory.is_some() {
        return Err(Error::invariant(LAW, "memory can be attached only to a memoryless law"));
    }
    if law.kappa().is_zero() {
        return Err(Error::TerminalLaw);
    }
    if omega_next.is_negative() {
        return Err(Error::invariant(MEMORY, "omega_{n+1} >= 0"));
    }
    if omega_next.is_one() {
        return Err(Error::invariant(
            MEMORY,
            "omega in [0,1): omega_{n+1} = 1 is forbidden",
        ));
    }
    if omega_next > Rational::one() && !options.extended_omega {
        return Err(Error::invariant(
            MEMORY,
            format!(
                "omega in [0,1) (omega_{{n+1}} = {}; enable extended omega for values > 1)",
                rational::format(&omega_next)
            ),
        ));
    }
    if kappa_next.is_negative() {
        return Err(Error::invariant(MEMORY, "kappa_{n+1} >= 0"));
    }
    kernel.validate()?;
    let kappa = law.kappa().clone();
    Ok(HeatLaw {
        memory: Some(MemoryTerm {
            instantaneous_weight: &omega_next * &kappa,
            convolved_weight: (Rational::one() - &omega_next) * &kappa,
            omega: omega_next,
            kernel,
            perturbation: kappa_next,
        }),
        ..law.clone()
    })
}

/// Eliminates the exponential convolution by forming `law + ε ∂_t law`.
///
/// The result is the memoryless law of order `n+1`, written in `u_{n+1}`.
/// A Dirac kernel is the `ε = 0` case.
pub fn relax_exponential(law: &HeatLaw) -> Result<HeatLaw> {
    let mem = law
        .memory
        .as_ref()
        .ok_or_else(|| Error::NonExponentialKernel("no memory term".into()))?;
    let eps = match &mem.kernel {
        Kernel::Exponential { epsilon } => epsilon.clone(),
        Kernel::Dirac => Rational::zero(),
        other => return Err(Error::NonExponentialKernel(other.name().into())),
    };

    // Q(s) -> (1 + εs) Q(s)
    let q = mul_linear(&law.q_coeffs, &eps);

    // Laplacian symbol in u_{n+1}: (1 + εs)(s·B(s) + κ_{n+1}) + C·s, where B has
    // the instantaneous weight in place of κ_n and C is the convolved weight.
    let mut shifted = Vec::with_capacity(law.grad_coeffs.len() + 1);
    shifted.push(mem.perturbation.clone());
    shifted.push(mem.instantaneous_weight.clone());
    shifted.extend(law.grad_coeffs[1..].iter().cloned());
    let mut grad = mul_linear(&shifted, &eps);
    grad[1] += &mem.convolved_weight;

    Ok(HeatLaw {
        order: law.order + 1,
        q_coeffs: q,
        grad_coeffs: grad,
        memory: None,
    })
}

/// `(1 + εs) p(s)`
fn mul_linear(p: &[Rational], eps: &Rational) -> Vec<Rational> {
    let mut out = p.to_vec();
    out.push(Rational::zero());
    for (i, c) in p.iter().enumerate() {
        out[i + 1] += eps * c;
    }
    out
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    first: &mut bool,
    coeff: &Rational,
    negate: bool,
    body: &str,
) -> fmt::Result {
    if coeff.is_zero() {
        return Ok(());
    }
    let c = if negate { -coeff.clone() } else { coeff.clone() };
    let sign = if c.is_negative() { "-" } else { "+" };
    let mag = c.abs();
    let mag = if mag.is_one() && !body.is_empty() {
        String::new()
    } else {
        format!("{} ", rational::format(&mag))
    };
    if *first {
        if sign == "-" {
            write!(f, "-")?;
        }
        *first = false;
    } else {
        write!(f, " {sign} ")?;
    }
    write!(f, "{mag}{body}")
}

/// `∂_t^i var` in plain text.
pub(crate) fn deriv(i: usize, var: &str) -> String {
    match i {
        0 => var.to_string(),
        1 => format!("∂_t {var}"),
        _ => format!("∂_t^{i} {var}"),
    }
}

impl fmt::Display for HeatLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.q_coeffs.iter().enumerate() {
            write_term(f, &mut first, c, false, &deriv(i, "q"))?;
        }
        write!(f, " = ")?;
        let n = self.order;
        let mut first = true;
        let mut any = false;
        for (i, c) in self.grad_coeffs.iter().enumerate() {
            let c = match (&self.memory, i) {
                (Some(m), 0) => &m.instantaneous_weight,
                _ => c,
            };
            any |= !c.is_zero();
            write_term(f, &mut first, c, true, &format!("∇{}", deriv(i, &format!("u_{n}"))))?;
        }
        if let Some(m) = &self.memory {
            any = true;
            let body = format!("∫ g(s) ∇u_{n}(t-s) ds [g = {}]", m.kernel);
            write_term(f, &mut first, &m.convolved_weight, true, &body)?;
            write_term(f, &mut first, &m.perturbation, true, &format!("∇u_{}", n + 1))?;
        }
        if !any {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn order1(e: Rational, w: Rational, k0: Rational, k1: Rational) -> ParameterSequence {
        ParameterSequence::new(vec![e], vec![w], vec![k0, k1]).unwrap()
    }

    #[test]
    fn order_one_law() {
        let (e, w, k0, k1) = (ratio(1, 2), ratio(1, 3), int(2), ratio(3, 4));
        let law = build_law(&order1(e.clone(), w.clone(), k0.clone(), k1.clone()));
        assert_eq!(law.q_coeffs(), &[int(1), e.clone()]);
        assert_eq!(
            law.grad_coeffs(),
            &[k1.clone(), &e * &k1 + &k0, &e * &w * &k0]
        );
    }

    #[test]
    fn order_one_without_relaxation_is_type_three() {
        let law = build_law(&order1(int(0), ratio(1, 2), int(2), int(5)));
        assert_eq!(law.q_coeffs(), &[int(1), int(0)]);
        assert_eq!(law.grad_coeffs(), &ints(&[5, 2, 0])[..]);
    }

    #[test]
    fn order_two_worked_values() {
        let p = ParameterSequence::new(ints(&[1, 1]), ints(&[0, 0]), ints(&[1, 1, 1])).unwrap();
        let law = build_law(&p);
        assert_eq!(law.q_coeffs(), &ints(&[1, 2, 1])[..]);
        // β_2 = [ε2κ2+κ1, ε2ω2κ1+β_1^1, ε2β_1^1+β_1^2, ε2β_1^2] with β_1 = [2, 0]
        assert_eq!(law.grad_coeffs(), &ints(&[1, 2, 2, 2, 0])[..]);
    }

    #[test]
    fn relaxing_fourier_memory_gives_order_one() {
        let (k0, w, e, k1) = (int(3), ratio(1, 5), ratio(2, 7), ratio(1, 2));
        let mem = attach_memory(
            &HeatLaw::fourier(k0.clone()).unwrap(),
            w.clone(),
            Kernel::exponential(e.clone()).unwrap(),
            k1.clone(),
            MemoryOptions::default(),
        )
        .unwrap();
        let relaxed = relax_exponential(&mem).unwrap();
        assert_eq!(relaxed, build_law(&order1(e, w, k0, k1)));
    }

    #[test]
    fn gurtin_pipkin_relaxes_to_cattaneo() {
        let (k, e) = (int(2), ratio(1, 10));
        let mem = attach_memory(
            &HeatLaw::fourier(k.clone()).unwrap(),
            int(0),
            Kernel::exponential(e.clone()).unwrap(),
            int(0),
            MemoryOptions::default(),
        )
        .unwrap();
        let mc = relax_exponential(&mem).unwrap();
        // q + ε q_t = -κ ∇u, written in u_1
        assert_eq!(mc.q_coeffs(), &[int(1), e]);
        assert_eq!(mc.grad_coeffs(), &[int(0), k, int(0)]);
    }

    #[test]
    fn relax_order_two_matches_order_three() {
        let p = ParameterSequence::new(
            vec![ratio(1, 3), ratio(5, 2)],
            vec![ratio(1, 7), ratio(0, 1)],
            vec![int(2), ratio(3, 4), ratio(9, 5)],
        )
        .unwrap();
        let (e3, w3, k3) = (ratio(4, 9), ratio(2, 3), ratio(1, 6));
        let mem = attach_memory(
            &build_law(&p),
            w3.clone(),
            Kernel::exponential(e3.clone()).unwrap(),
            k3.clone(),
            MemoryOptions::default(),
        )
        .unwrap();
        let relaxed = relax_exponential(&mem).unwrap();
        assert_eq!(relaxed, build_law(&p.extend(e3, w3, k3).unwrap()));
    }

    #[test]
    fn dirac_relaxation_keeps_q_polynomial() {
        let p = order1(ratio(1, 2), ratio(1, 2), int(1), int(1));
        let mem = attach_memory(&build_law(&p), ratio(1, 3), Kernel::Dirac, int(2), MemoryOptions::default())
            .unwrap();
        let relaxed = relax_exponential(&mem).unwrap();
        assert_eq!(relaxed, build_law(&p.extend(int(0), ratio(1, 3), int(2)).unwrap()));
        assert!(relaxed.q_coeffs()[2].is_zero());
    }

    #[test]
    fn attach_memory_errors() {
        let terminal = build_law(&order1(int(1), int(0), int(1), int(0)));
        let exp = Kernel::exponential(int(1)).unwrap();
        assert_eq!(
            attach_memory(&terminal, int(0), exp.clone(), int(0), MemoryOptions::default()),
            Err(Error::TerminalLaw)
        );
        let law = HeatLaw::fourier(int(1)).unwrap();
        let err = attach_memory(&law, int(1), exp.clone(), int(0), MemoryOptions::default()).unwrap_err();
        assert!(err.to_string().contains("[0,1)"));
        assert!(attach_memory(&law, int(2), exp.clone(), int(0), MemoryOptions::default()).is_err());
        let ext = MemoryOptions { extended_omega: true };
        assert!(attach_memory(&law, int(2), exp.clone(), int(0), ext).is_ok());
        assert!(attach_memory(&law, int(1), exp.clone(), int(0), ext).is_err());
        assert!(attach_memory(&law, int(0), exp, int(-1), MemoryOptions::default()).is_err());
    }

    #[test]
    fn memory_weights_split_kappa() {
        let law = build_law(&order1(int(1), int(0), int(1), int(3)));
        let mem = attach_memory(&law, ratio(1, 4), Kernel::Dirac, int(0), MemoryOptions::default()).unwrap();
        let m = mem.memory().unwrap();
        assert_eq!(m.instantaneous_weight() + m.convolved_weight(), int(3));
        assert_eq!(m.instantaneous_weight(), &ratio(3, 4));
    }

    #[test]
    fn relax_rejects_prony() {
        let law = HeatLaw::fourier(int(1)).unwrap();
        let k = Kernel::parse("prony:1@1,1@2").unwrap();
        let mem = attach_memory(&law, int(0), k, int(0), MemoryOptions::default()).unwrap();
        assert!(matches!(relax_exponential(&mem), Err(Error::NonExponentialKernel(_))));
        assert!(relax_exponential(&law).is_err());
    }

    #[test]
    fn law_json_round_trip() {
        let law = attach_memory(
            &HeatLaw::fourier(int(2)).unwrap(),
            ratio(1, 2),
            Kernel::exponential(ratio(1, 3)).unwrap(),
            int(1),
            MemoryOptions::default(),
        )
        .unwrap();
        let json = serde_json::to_string(&law).unwrap();
        let back: HeatLaw = serde_json::from_str(&json).unwrap();
        assert_eq!(back, law);
        let tampered = json.replace("\"instantaneous_weight\":\"1\"", "\"instantaneous_weight\":\"2\"");
        assert!(serde_json::from_str::<HeatLaw>(&tampered).is_err());
    }

    #[test]
    fn plain_text_rendering() {
        let law = build_law(&order1(ratio(1, 2), int(0), int(1), int(1)));
        assert_eq!(law.to_string(), "q + 1/2 ∂_t q = -∇u_1 - 3/2 ∇∂_t u_1");
    }
}
