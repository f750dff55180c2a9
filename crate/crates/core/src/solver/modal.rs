use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::quadrature::history_integral;
use crate::error::{Error, Result};
use crate::law::{EvolutionEquation, Kernel};
use crate::rational;

const PROBLEM: &str = "ModalProblem invariant";

/// Dirichlet eigenvalues `(kπ/L)²`, `k = 1..=modes`.
pub fn eigenvalues(length: f64, modes: usize) -> Vec<f64> {
    (1..=modes)
        .map(|k| (k as f64 * PI / length).powi(2))
        .collect()
}

/// Past values of the convolved quantity of one mode, `h(s)` for `s ≥ 0`
/// (`h(s)` is the value at time `-s`).
#[derive(Clone)]
pub enum ModeHistory {
    /// Null past history (the Volterra case).
    Null,
    ConstantTail(f64),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ModeHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeHistory::Null => write!(f, "Null"),
            ModeHistory::ConstantTail(c) => write!(f, "ConstantTail({c})"),
            ModeHistory::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl ModeHistory {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ModeHistory::Null => 0.0,
            ModeHistory::ConstantTail(c) => *c,
            ModeHistory::Function(h) => h(s),
        }
    }
}

/// Past history for every mode.
#[derive(Clone, Default)]
pub enum HistorySpec {
    #[default]
    Null,
    /// One constant per mode, in mode order.
    ConstantTail(Vec<f64>),
    /// `h(k, s)` with `k` the 1-based mode index.
    Function(Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for HistorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistorySpec::Null => write!(f, "Null"),
            HistorySpec::ConstantTail(v) => write!(f, "ConstantTail({v:?})"),
            HistorySpec::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl HistorySpec {
    /// History of mode `k` (1-based); missing constants count as zero.
    pub fn for_mode(&self, k: usize) -> ModeHistory {
        match self {
            HistorySpec::Null => ModeHistory::Null,
            HistorySpec::ConstantTail(v) => {
                ModeHistory::ConstantTail(v.get(k - 1).copied().unwrap_or(0.0))
            }
            HistorySpec::Function(h) => {
                let h = Arc::clone(h);
                ModeHistory::Function(Arc::new(move |s| h(k, s)))
            }
        }
    }
}

/// Serializable subset of [`HistorySpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum HistoryConfig {
    #[default]
    Null,
    Constant {
        values: Vec<f64>,
    },
}

impl From<&HistoryConfig> for HistorySpec {
    fn from(h: &HistoryConfig) -> Self {
        match h {
            HistoryConfig::Null => HistorySpec::Null,
            HistoryConfig::Constant { values } => HistorySpec::ConstantTail(values.clone()),
        }
    }
}

/// One memory auxiliary `w_i' = (y^{(r)} - w_i)/ε_i` with weight `c_i` in the
/// memory sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Auxiliary {
    pub weight: f64,
    pub rate: f64,
}

/// Linear ODE of one eigenmode in first-order form.
///
/// The state is `[y, y', …, y^{(d-1)}, w_1, …, w_m]`; the auxiliaries are the
/// unit-mass exponential averages `w_i(t) = ∫_0^∞ (1/ε_i) e^{-s/ε_i} y^{(r)}(t-s) ds`.
#[derive(Debug, Clone)]
pub struct ModalProblem {
    pub lambda: f64,
    /// `p_j = a_j + λ b_j`, local part only.
    pub local_coeffs: Vec<f64>,
    /// `λ w` multiplying `Σ c_i w_i`; zero without memory.
    pub memory_scale: f64,
    pub auxiliaries: Vec<Auxiliary>,
    pub convolved_order: usize,
    pub matrix: DMatrix<f64>,
    pub initial: DVector<f64>,
}

impl ModalProblem {
    pub fn time_order(&self) -> usize {
        self.local_coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Sets `y(0), y'(0), …, y^{(d-1)}(0)`; auxiliaries keep their history values.
    pub fn with_initial(mut self, values: &[f64]) -> Result<Self> {
        let d = self.time_order();
        if values.len() != d {
            return Err(Error::invariant(
                PROBLEM,
                format!("initial data count = time order (need {d}, got {})", values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invariant(PROBLEM, "finite initial data"));
        }
        for (i, v) in values.iter().enumerate() {
            self.initial[i] = *v;
        }
        Ok(self)
    }

    /// Sets the full state, auxiliaries included.
    pub fn with_state(mut self, state: &[f64]) -> Result<Self> {
        if state.len() != self.dim() {
            return Err(Error::invariant(
                PROBLEM,
                format!("state dimension = {} (got {})", self.dim(), state.len()),
            ));
        }
        self.initial = DVector::from_column_slice(state);
        Ok(self)
    }

    /// Value of `y'` in `state`.
    pub fn first_derivative(&self, state: &DVector<f64>) -> f64 {
        if self.time_order() >= 2 {
            state[1]
        } else {
            (&self.matrix * state)[0]
        }
    }

    /// Value of the memory integral `Σ c_i w_i` in `state`.
    pub fn memory_value(&self, state: &DVector<f64>) -> f64 {
        let d = self.time_order();
        self.auxiliaries
            .iter()
            .enumerate()
            .map(|(i, a)| a.weight * state[d + i])
            .sum()
    }

    /// `[y(0), …, y^{(d-1)}(0), y^{(d)}(0)]`, where the top derivative is read
    /// off this problem's own equation at `t = 0`.
    ///
    /// This is the extra initial value needed by the relaxed equation one order
    /// higher (or by the same equation with an extra relaxation time).
    pub fn compatible_initial_data(&self) -> Vec<f64> {
        let d = self.time_order();
        let rate = &self.matrix * &self.initial;
        let mut out: Vec<f64> = self.initial.iter().take(d).copied().collect();
        out.push(rate[d - 1]);
        out
    }
}

/// Coefficients of `eq` as floats: `(a, b, memory)` with Dirac memory folded.
pub(crate) fn float_coeffs(eq: &EvolutionEquation) -> (Vec<f64>, Vec<f64>) {
    let eq = eq.localized();
    (
        eq.time_coeffs().iter().map(rational::to_f64).collect(),
        eq.laplacian_coeffs().iter().map(rational::to_f64).collect(),
    )
}

/// Modal symbol `p_j = a_j + λ b_j` with trailing zeros removed.
pub(crate) fn local_symbol(eq: &EvolutionEquation, lambda: f64) -> Vec<f64> {
    let (a, b) = float_coeffs(eq);
    let len = a.len().max(b.len());
    let mut p: Vec<f64> = (0..len)
        .map(|j| a.get(j).copied().unwrap_or(0.0) + lambda * b.get(j).copied().unwrap_or(0.0))
        .collect();
    while p.len() > 1 && p.last() == Some(&0.0) {
        p.pop();
    }
    p
}

/// Memory data of `eq` after folding a Dirac kernel: `(w, r, terms)`.
pub(crate) fn memory_terms(eq: &EvolutionEquation) -> Result<Option<(f64, usize, Vec<Auxiliary>)>> {
    let eq = eq.localized();
    let Some(m) = eq.memory() else {
        return Ok(None);
    };
    let terms = match &m.kernel {
        Kernel::Dirac => unreachable!("localized"),
        k => k.prony_terms().expect("non-Dirac kernel"),
    };
    let aux = terms
        .iter()
        .map(|t| Auxiliary {
            weight: rational::to_f64(&t.weight),
            rate: rational::to_f64(&t.rate),
        })
        .collect();
    Ok(Some((
        rational::to_f64(&m.weight),
        m.convolved_derivative_order,
        aux,
    )))
}

/// Substitutes `-Δ → λ` and realizes exponential/Prony memory by auxiliary
/// ODEs. Local initial data are zero; auxiliaries start at the history
/// integrals `∫_0^∞ g_i(s) h(s) ds`.
pub fn reduce(eq: &EvolutionEquation, lambda: f64, history: &ModeHistory) -> Result<ModalProblem> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invariant(PROBLEM, format!("lambda > 0 (got {lambda})")));
    }
    let p = local_symbol(eq, lambda);
    let d = p.len() - 1;
    if d == 0 {
        return Err(Error::invariant(PROBLEM, "modal symbol has no time derivative"));
    }
    let (memory_scale, r, aux) = match memory_terms(eq)? {
        None => (0.0, 0, Vec::new()),
        Some((w, r, aux)) => {
            if r >= d {
                return Err(Error::Unsupported(format!(
                    "convolved derivative order {r} must be below the time order {d}"
                )));
            }
            (lambda * w, r, aux)
        }
    };
    let m = aux.len();
    let dim = d + m;
    let lead = p[d];
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..d - 1 {
        a[(i, i + 1)] = 1.0;
    }
    for j in 0..d {
        a[(d - 1, j)] = -p[j] / lead;
    }
    for (i, t) in aux.iter().enumerate() {
        a[(d - 1, d + i)] = -memory_scale * t.weight / lead;
        a[(d + i, r)] = 1.0 / t.rate;
        a[(d + i, d + i)] = -1.0 / t.rate;
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invariant(PROBLEM, "finite matrix entries"));
    }
    let mut initial = DVector::zeros(dim);
    for (i, t) in aux.iter().enumerate() {
        initial[d + i] = history_integral(history, t.rate);
    }
    Ok(ModalProblem {
        lambda,
        local_coeffs: p,
        memory_scale,
        auxiliaries: aux,
        convolved_order: r,
        matrix: a,
        initial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::{to_evolution, attach_memory, EquationMemory, HeatLaw, MemoryOptions};
    use crate::rational::{int, ratio};
    use approx::assert_relative_eq;

    #[test]
    fn eigenvalue_examples() {
        assert_relative_eq!(eigenvalues(1.0, 1)[0], PI * PI);
        let e = eigenvalues(PI, 3);
        for (got, want) in e.iter().zip([1.0, 4.0, 9.0]) {
            assert_relative_eq!(*got, want, max_relative = 1e-15);
        }
        let e = eigenvalues(2.0, 2);
        assert_relative_eq!(e[0], PI * PI / 4.0);
        assert_relative_eq!(e[1], PI * PI);
    }

    #[test]
    fn heat_mode_is_scalar_decay() {
        let eq = to_evolution(&HeatLaw::fourier(int(2)).unwrap());
        let p = reduce(&eq, 3.0, &ModeHistory::Null).unwrap();
        assert_eq!(p.dim(), 1);
        assert_relative_eq!(p.matrix[(0, 0)], -6.0);
    }

    #[test]
    fn gurtin_pipkin_mode_system() {
        let (kappa, eps, lambda) = (ratio(3, 2), ratio(1, 4), 2.0);
        let law = attach_memory(
            &HeatLaw::fourier(kappa).unwrap(),
            int(0),
            Kernel::exponential(eps).unwrap(),
            int(0),
            MemoryOptions::default(),
        )
        .unwrap();
        let p = reduce(&to_evolution(&law), lambda, &ModeHistory::Null).unwrap();
        // y' = -κλ w, w' = (y - w)/ε
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, -3.0, 4.0, -4.0]);
        assert_relative_eq!(p.matrix, expected, epsilon = 1e-14);
        assert_eq!(p.initial[1], 0.0);
    }

    #[test]
    fn mgt_mode_companion() {
        let eq = EvolutionEquation::mgt(int(2), int(3), int(5)).unwrap();
        let p = reduce(&eq, 7.0, &ModeHistory::Null).unwrap();
        // s^3 + a s^2 + bλ s + cλ
        assert_eq!(p.local_coeffs, vec![35.0, 21.0, 2.0, 1.0]);
        assert_relative_eq!(p.matrix[(2, 0)], -35.0);
        assert_relative_eq!(p.matrix[(2, 1)], -21.0);
        assert_relative_eq!(p.matrix[(2, 2)], -2.0);
    }

    #[test]
    fn constant_history_sets_auxiliaries() {
        let law = attach_memory(
            &HeatLaw::fourier(int(1)).unwrap(),
            int(0),
            Kernel::exponential(ratio(1, 2)).unwrap(),
            int(0),
            MemoryOptions::default(),
        )
        .unwrap();
        let p = reduce(&to_evolution(&law), 1.0, &ModeHistory::ConstantTail(1.0)).unwrap();
        assert_relative_eq!(p.memory_value(&p.initial), 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let eq = to_evolution(&HeatLaw::fourier(int(1)).unwrap());
        assert!(reduce(&eq, 0.0, &ModeHistory::Null).is_err());
        assert!(reduce(&eq, f64::NAN, &ModeHistory::Null).is_err());
        let p = reduce(&eq, 1.0, &ModeHistory::Null).unwrap();
        assert!(p.clone().with_initial(&[1.0, 2.0]).is_err());
        assert!(p.with_initial(&[f64::INFINITY]).is_err());
        let high = EvolutionEquation::new(
            0,
            vec![int(0), int(1)],
            vec![],
            Some(EquationMemory {
                weight: int(1),
                kernel: Kernel::exponential(int(1)).unwrap(),
                convolved_derivative_order: 1,
            }),
        )
        .unwrap();
        assert!(matches!(reduce(&high, 1.0, &ModeHistory::Null), Err(Error::Unsupported(_))));
    }

    #[test]
    fn per_mode_history_lookup() {
        let h = HistorySpec::ConstantTail(vec![1.0, 2.0]);
        assert_eq!(h.for_mode(2).eval(0.3), 2.0);
        assert_eq!(h.for_mode(3).eval(0.3), 0.0);
        let f = HistorySpec::Function(Arc::new(|k, s| k as f64 + s));
        assert_eq!(f.for_mode(3).eval(0.5), 3.5);
    }
}
