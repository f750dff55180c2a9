use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::modal::ModalProblem;
use super::sig17;
use crate::error::{Error, Result};

/// States whose Euclidean norm exceeds this are treated as blown up.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    MatrixExponential,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// Output spacing; the grid is uniform with `ceil(T/dt)` steps.
    pub dt: f64,
    #[serde(default)]
    pub method: Method,
    /// Local error target for the RK4 path, relative to the state norm.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    1e-10
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            dt: 1e-2,
            method: Method::MatrixExponential,
            tolerance: default_tolerance(),
        }
    }
}

impl StepControl {
    pub fn exact(dt: f64) -> Self {
        StepControl {
            dt,
            ..Default::default()
        }
    }

    pub fn rk4(dt: f64, tolerance: f64) -> Self {
        StepControl {
            dt,
            method: Method::Rk4,
            tolerance,
        }
    }

    fn validate(&self, final_time: f64) -> Result<usize> {
        if !(final_time.is_finite() && final_time > 0.0) {
            return Err(Error::invariant("integration control", format!("T > 0 (got {final_time})")));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invariant("integration control", format!("dt > 0 (got {})", self.dt)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invariant("integration control", "tolerance > 0"));
        }
        Ok((final_time / self.dt).ceil().max(1.0) as usize)
    }
}

/// Trajectory of one mode on the output grid.
#[derive(Debug, Clone, Default)]
pub struct ModeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    /// `y'(t)` at each output time.
    pub derivative: Vec<f64>,
    pub diverged_at: Option<f64>,
}

impl ModeTrajectory {
    pub fn with_capacity(n: usize) -> Self {
        ModeTrajectory {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            derivative: Vec::with_capacity(n),
            diverged_at: None,
        }
    }

    pub fn push(&mut self, t: f64, state: DVector<f64>, derivative: f64) {
        self.times.push(t);
        self.states.push(state);
        self.derivative.push(derivative);
    }

    /// `y(t)` at each output time.
    pub fn values(&self) -> Vec<f64> {
        self.states.iter().map(|s| s[0]).collect()
    }

    pub fn last_value(&self) -> f64 {
        self.states.last().map_or(f64::NAN, |s| s[0])
    }
}

fn blown_up(x: &DVector<f64>) -> bool {
    !x.iter().all(|v| v.is_finite()) || x.norm() > DIVERGENCE_THRESHOLD
}

/// Integrates one modal system from `problem.initial` up to `final_time`.
pub fn integrate(problem: &ModalProblem, final_time: f64, control: &StepControl) -> Result<ModeTrajectory> {
    let steps = control.validate(final_time)?;
    let dt = final_time / steps as f64;
    let a = &problem.matrix;
    let mut x = problem.initial.clone();
    let mut traj = ModeTrajectory::with_capacity(steps + 1);
    traj.push(0.0, x.clone(), problem.first_derivative(&x));

    let propagator = match control.method {
        Method::MatrixExponential => Some((a * dt).exp()),
        Method::Rk4 => None,
    };
    let mut h = dt;
    for k in 1..=steps {
        x = match &propagator {
            Some(e) => e * &x,
            None => rk4_interval(a, &x, dt, &mut h, control.tolerance),
        };
        let t = k as f64 * dt;
        if blown_up(&x) {
            traj.diverged_at = Some(t);
            break;
        }
        traj.push(t, x.clone(), problem.first_derivative(&x));
    }
    Ok(traj)
}

fn rk4_step(a: &DMatrix<f64>, x: &DVector<f64>, h: f64) -> DVector<f64> {
    let k1 = a * x;
    let k2 = a * (x + &k1 * (0.5 * h));
    let k3 = a * (x + &k2 * (0.5 * h));
    let k4 = a * (x + &k3 * h);
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Advances over `[0, span]` with step doubling; `h` carries the step size
/// between calls.
fn rk4_interval(a: &DMatrix<f64>, x: &DVector<f64>, span: f64, h: &mut f64, tol: f64) -> DVector<f64> {
    let mut x = x.clone();
    let mut done = 0.0;
    while done < span {
        let step = h.min(span - done);
        let full = rk4_step(a, &x, step);
        let half = rk4_step(a, &rk4_step(a, &x, 0.5 * step), 0.5 * step);
        let err = (&half - &full).norm() / 15.0;
        let scale = half.norm().max(f64::MIN_POSITIVE);
        if err <= tol * scale || step < 1e-14 * span.max(1.0) {
            x = &half + (&half - &full) / 15.0;
            done += step;
            if blown_up(&x) {
                return x;
            }
            let grow = if err == 0.0 { 2.0 } else { (0.9 * (tol * scale / err).powf(0.2)).min(2.0) };
            *h = (step * grow).max(step * 0.5);
        } else {
            *h = step * (0.9 * (tol * scale / err).powf(0.2)).max(0.1);
        }
    }
    x
}

/// Whole-domain trajectory on `(0, L)`, one entry per mode in mode order.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub length: f64,
    pub times: Vec<f64>,
    pub modes: Vec<ModeTrajectory>,
    pub l2_norm: Vec<f64>,
    pub l2_norm_dt: Vec<f64>,
    pub diverged_at: Option<f64>,
}

impl Trajectory {
    /// Sine coefficients `y_k(t_i)` at output index `i`.
    pub fn coefficients(&self, i: usize) -> Vec<f64> {
        self.modes.iter().map(|m| m.states[i][0]).collect()
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Writes `t,mode_1,…,mode_K,l2_norm,l2_norm_dt`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.modes.len()).map(|k| format!("mode_{k}")));
        header.push("l2_norm".into());
        header.push("l2_norm_dt".into());
        writeln!(w, "{}", header.join(","))?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![sig17(*t)];
            row.extend(self.coefficients(i).into_iter().map(sig17));
            row.push(sig17(self.l2_norm[i]));
            row.push(sig17(self.l2_norm_dt[i]));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `sqrt(L/2 Σ y_k²)`, the L² norm of `Σ y_k sin(kπx/L)`.
pub fn parseval_norm(length: f64, coefficients: impl IntoIterator<Item = f64>) -> f64 {
    (0.5 * length * coefficients.into_iter().map(|y| y * y).sum::<f64>()).sqrt()
}

/// Integrates every mode (in parallel) and merges the results in mode order.
/// A diverging mode truncates the whole trajectory at its blow-up time.
pub fn simulate(
    problems: &[ModalProblem],
    length: f64,
    final_time: f64,
    control: &StepControl,
) -> Result<Trajectory> {
    if problems.is_empty() {
        return Err(Error::invariant("integration control", "at least one mode"));
    }
    let mut modes = problems
        .par_iter()
        .map(|p| integrate(p, final_time, control))
        .collect::<Result<Vec<_>>>()?;
    let len = modes.iter().map(|m| m.times.len()).min().unwrap_or(0);
    let diverged_at = modes
        .iter()
        .filter_map(|m| m.diverged_at)
        .min_by(f64::total_cmp);
    for m in &mut modes {
        m.times.truncate(len);
        m.states.truncate(len);
        m.derivative.truncate(len);
    }
    let times = modes[0].times.clone();
    let l2_norm = (0..len)
        .map(|i| parseval_norm(length, modes.iter().map(|m| m.states[i][0])))
        .collect();
    let l2_norm_dt = (0..len)
        .map(|i| parseval_norm(length, modes.iter().map(|m| m.derivative[i])))
        .collect();
    Ok(Trajectory {
        length,
        times,
        modes,
        l2_norm,
        l2_norm_dt,
        diverged_at,
    })
}

/// `u(x) = Σ_k y_k sin(kπx/L)`.
pub fn synthesize(length: f64, coefficients: &[f64], xs: &[f64]) -> Result<Vec<f64>> {
    if let Some(x) = xs.iter().find(|x| !(0.0..=length).contains(*x)) {
        return Err(Error::invariant("reconstruction grid", format!("x in [0, L] (got {x})")));
    }
    Ok(xs
        .iter()
        .map(|x| {
            coefficients
                .iter()
                .enumerate()
                .map(|(k, y)| y * ((k + 1) as f64 * PI * x / length).sin())
                .sum()
        })
        .collect())
}

/// Field samples `u(x_j, t_i)`, one row per output time.
pub fn reconstruct(traj: &Trajectory, xs: &[f64]) -> Result<Vec<Vec<f64>>> {
    (0..traj.times.len())
        .map(|i| synthesize(traj.length, &traj.coefficients(i), xs))
        .collect()
}

/// Sine coefficients of sampled profile values on a uniform grid including
/// both endpoints, by the trapezoidal rule.
pub fn project(length: f64, samples: &[f64], modes: usize) -> Result<Vec<f64>> {
    if samples.len() < 3 {
        return Err(Error::invariant("profile projection", "at least 3 samples"));
    }
    let m = samples.len() - 1;
    let h = length / m as f64;
    Ok((1..=modes)
        .map(|k| {
            let s: f64 = (1..m)
                .map(|j| samples[j] * (k as f64 * PI * j as f64 / m as f64).sin())
                .sum();
            2.0 / length * h * s
        })
        .collect())
}
