//! History integrals and the direct-convolution reference integrator.

use nalgebra::{DMatrix, DVector};

use super::integrate::ModeTrajectory;
use super::modal::{local_symbol, memory_terms, ModeHistory};
use crate::error::{Error, Result};
use crate::law::EvolutionEquation;

const SIMPSON_TOL: f64 = 1e-10;
const TRUNCATION_RATES: f64 = 40.0;

/// `∫_0^∞ (1/ε) e^{-s/ε} h(s) ds`.
///
/// Constant tails are exact (unit mass). Function histories use adaptive
/// Simpson on `[0, 40ε]` plus the tail estimate `h(40ε) e^{-40}`.
pub fn history_integral(history: &ModeHistory, rate: f64) -> f64 {
    match history {
        ModeHistory::Null => 0.0,
        ModeHistory::ConstantTail(c) => *c,
        ModeHistory::Function(h) => {
            let cutoff = TRUNCATION_RATES * rate;
            let f = |s: f64| (-s / rate).exp() / rate * h(s);
            adaptive_simpson(&f, 0.0, cutoff, SIMPSON_TOL) + h(cutoff) * (-TRUNCATION_RATES).exp()
        }
    }
}

pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates one mode by discretizing the memory convolution directly.
///
/// The local part is advanced by the trapezoidal (Crank–Nicolson) rule and
/// `∫_0^t g(s) y^{(r)}(t-s) ds` by the composite trapezoidal rule over the
/// stored solution; the contribution of the pre-`t = 0` history is added in
/// closed form. Both rules are second order in `dt`.
pub fn integrate_quadrature_oracle(
    eq: &EvolutionEquation,
    lambda: f64,
    history: &ModeHistory,
    initial: &[f64],
    final_time: f64,
    dt: f64,
) -> Result<ModeTrajectory> {
    if !(final_time > 0.0 && dt > 0.0) {
        return Err(Error::invariant("integration control", "T > 0 and dt > 0"));
    }
    let p = local_symbol(eq, lambda);
    let d = p.len() - 1;
    if d == 0 || initial.len() != d {
        return Err(Error::invariant(
            "ModalProblem invariant",
            format!("initial data count = time order (need {d}, got {})", initial.len()),
        ));
    }
    let memory = memory_terms(eq)?.ok_or_else(|| {
        Error::Unsupported("quadrature oracle needs an exponential or Prony memory term".into())
    })?;
    let (w, r, aux) = memory;
    if r >= d {
        return Err(Error::Unsupported("convolved order must be below the time order".into()));
    }

    let steps = (final_time / dt).ceil() as usize;
    let dt = final_time / steps as f64;
    let lead = p[d];

    let mut a = DMatrix::zeros(d, d);
    for i in 0..d - 1 {
        a[(i, i + 1)] = 1.0;
    }
    for j in 0..d {
        a[(d - 1, j)] = -p[j] / lead;
    }
    // memory enters the top row as -λ w M(t) / p_d
    let mem_coeff = -lambda * w / lead;

    let kernel = |s: f64| -> f64 {
        aux.iter()
            .map(|t| t.weight / t.rate * (-s / t.rate).exp())
            .sum()
    };
    let history_weights: Vec<f64> = aux
        .iter()
        .map(|t| t.weight * super::quadrature::history_integral(history, t.rate))
        .collect();
    // ∫_t^∞ g(s) h(s - t) ds = Σ c_i e^{-t/ε_i} ∫_0^∞ g_i(σ) h(σ) dσ
    let tail = |t: f64| -> f64 {
        aux.iter()
            .zip(&history_weights)
            .map(|(a, hw)| hw * (-t / a.rate).exp())
            .sum()
    };
    let g: Vec<f64> = (0..=steps).map(|j| kernel(j as f64 * dt)).collect();

    let identity = DMatrix::<f64>::identity(d, d);
    let mut implicit = &identity - &a * (0.5 * dt);
    implicit[(d - 1, r)] -= 0.5 * dt * mem_coeff * 0.5 * dt * g[0];
    let lu = implicit.lu();
    let explicit = &identity + &a * (0.5 * dt);

    let mut x = DVector::from_column_slice(initial);
    let mut conv = vec![x[r]];
    let mut memory_now = tail(0.0);

    let mut traj = ModeTrajectory::with_capacity(steps + 1);
    traj.push(0.0, x.clone(), derivative(&a, &x, d, mem_coeff * memory_now));

    for n in 0..steps {
        let t_next = (n + 1) as f64 * dt;
        // known part of the trapezoid for M_{n+1}: all nodes but s = 0
        let k = n + 1;
        let mut known = 0.5 * g[k] * conv[0];
        for j in 1..k {
            known += g[j] * conv[k - j];
        }
        let known = dt * known + tail(t_next);

        let mut rhs = &explicit * &x;
        rhs[d - 1] += 0.5 * dt * mem_coeff * (memory_now + known);
        let next = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Unsupported("singular Crank–Nicolson matrix".into()))?;
        memory_now = known + dt * 0.5 * g[0] * next[r];
        conv.push(next[r]);
        x = next;
        if !x.iter().all(|v| v.is_finite()) || x.norm() > super::integrate::DIVERGENCE_THRESHOLD {
            traj.diverged_at = Some(t_next);
            break;
        }
        traj.push(t_next, x.clone(), derivative(&a, &x, d, mem_coeff * memory_now));
    }
    Ok(traj)
}

fn derivative(a: &DMatrix<f64>, x: &DVector<f64>, d: usize, forcing: f64) -> f64 {
    if d >= 2 {
        x[1]
    } else {
        (a * x)[0] + forcing
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::{attach_memory, to_evolution, HeatLaw, Kernel, MemoryOptions};
    use crate::rational::{int, ratio};
    use std::sync::Arc;

    #[test]
    fn simpson_polynomial_and_exponential() {
        let v = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
        let v = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 40.0, 1e-12);
        assert!((v - (1.0 - (-40.0f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn history_integrals() {
        assert_eq!(history_integral(&ModeHistory::Null, 0.5), 0.0);
        assert_eq!(history_integral(&ModeHistory::ConstantTail(1.0), 0.5), 1.0);
        // ∫ (1/ε) e^{-s/ε} e^{-s} ds = 1/(1+ε)
        let h = ModeHistory::Function(Arc::new(|s: f64| (-s).exp()));
        assert!((history_integral(&h, 0.5) - 1.0 / 1.5).abs() < 1e-9);
        let h = ModeHistory::Function(Arc::new(|s: f64| s));
        assert!((history_integral(&h, 0.25) - 0.25).abs() < 1e-9);
    }

    fn gp(eps: Rational) -> EvolutionEquation {
        let law = attach_memory(
            &HeatLaw::fourier(int(1)).unwrap(),
            int(0),
            Kernel::exponential(eps).unwrap(),
            int(0),
            MemoryOptions::default(),
        )
        .unwrap();
        to_evolution(&law)
    }

    use crate::rational::Rational;

    #[test]
    fn null_history_starts_with_zero_memory() {
        // y' = -λ M: with M(0) = 0 the initial slope vanishes
        let traj =
            integrate_quadrature_oracle(&gp(ratio(1, 2)), 2.0, &ModeHistory::Null, &[1.0], 0.1, 0.01)
                .unwrap();
        assert_eq!(traj.derivative[0], 0.0);
    }

    #[test]
    fn constant_tail_starts_with_unit_mass() {
        let traj = integrate_quadrature_oracle(
            &gp(ratio(1, 2)),
            2.0,
            &ModeHistory::ConstantTail(1.0),
            &[1.0],
            0.1,
            0.01,
        )
        .unwrap();
        // y'(0) = -λ · mass · 1
        assert!((traj.derivative[0] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn oracle_requires_memory() {
        let eq = to_evolution(&HeatLaw::fourier(int(1)).unwrap());
        assert!(integrate_quadrature_oracle(&eq, 1.0, &ModeHistory::Null, &[1.0], 1.0, 0.1).is_err());
    }
}
