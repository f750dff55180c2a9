//! Suites in floating point: roots, dual simulations, limits, and oracles.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use super::{rng, Failure, SuiteReport};
use crate::solver::sig17;
use crate::coefficients::ParameterSequence;
use crate::error::Result;
use crate::law::{
    attach_memory, build_law, relax_exponential, stability_number, to_evolution, Catalog,
    EvolutionEquation, HeatLaw, Kernel, MemoryOptions, PronyTerm,
};
use crate::rational::{self, int, ratio, Rational};
use crate::solver::{
    characteristic_polynomial, eigenvalues, integrate, integrate_quadrature_oracle, mgt_hurwitz,
    modal_roots, parseval_norm, reduce, routh_hurwitz, simulate, ModalProblem, ModeHistory,
    StepControl, RESIDUAL_TOLERANCE,
};

/// Draws with `|ϰ|` at or below this are not used for the dichotomy.
const CRITICAL_BAND: f64 = 0.05;
const STABILITY_MODES: usize = 64;

#[derive(Debug, Clone)]
pub struct StabilityDraw {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl StabilityDraw {
    pub fn stability_number(&self) -> Rational {
        stability_number(&self.a, &self.b, &self.c)
    }
}

fn draw_mgt<R: Rng>(rng: &mut R) -> StabilityDraw {
    loop {
        let d = StabilityDraw {
            a: rational::random_positive(rng, 100),
            b: rational::random_positive(rng, 100),
            c: rational::random_positive(rng, 100),
        };
        if rational::to_f64(&d.stability_number()).abs() > CRITICAL_BAND {
            return d;
        }
    }
}

/// Sign of the spectral abscissa against `sign(-ϰ)` over 64 modes on `(0, 1)`,
/// cross-checked by the exact Hurwitz condition, the Routh array of every
/// mode, and the growth or decay of the mode attaining the abscissa.
pub fn verify_stability_dichotomy(draws: usize, seed: u64) -> SuiteReport {
    let started = Instant::now();
    let mut report = SuiteReport::new("stability", seed);
    let mut rng = rng(seed);
    let mut cases = vec![
        StabilityDraw { a: int(1), b: int(1), c: ratio(1, 2) },
        StabilityDraw { a: int(1), b: int(1), c: int(2) },
    ];
    cases.extend((0..draws).map(|_| draw_mgt(&mut rng)));
    let outcomes: Vec<Option<Failure>> = cases.par_iter().enumerate().map(|(i, d)| check_dichotomy(i, d)).collect();
    let stable = cases.iter().filter(|d| d.stability_number().is_positive()).count();
    for o in outcomes {
        report.record(o);
    }
    report.note(format!("{stable} subcritical, {} supercritical", cases.len() - stable));

    // the boundary ϰ = 0 is reported, not classified
    let critical = StabilityDraw { a: int(1), b: int(1), c: int(1) };
    if critical.stability_number().is_zero() {
        report.note("a=1 b=1 c=1: stability number 0, critical, excluded from the dichotomy");
    }
    report.finish(started)
}

fn check_dichotomy(i: usize, d: &StabilityDraw) -> Option<Failure> {
    let kappa = d.stability_number();
    let case = format!(
        "draw={i} a={} b={} c={}",
        rational::format(&d.a),
        rational::format(&d.b),
        rational::format(&d.c)
    );
    let fail = |what: &str| Failure::new(case.clone()).text("check", what).rat("stability_number", &kappa);
    let eq = match EvolutionEquation::mgt(d.a.clone(), d.b.clone(), d.c.clone()) {
        Ok(eq) => eq,
        Err(e) => return Some(fail("build").text("error", e)),
    };
    let roots = match modal_roots(&eq, 1.0, STABILITY_MODES) {
        Ok(r) => r,
        Err(e) => return Some(fail("roots").text("error", e)),
    };
    let residual = roots.iter().map(|(_, r)| r.max_residual).fold(0.0, f64::max);
    if residual > RESIDUAL_TOLERANCE {
        return Some(fail("root residual").num("max_residual", residual));
    }
    let (k_star, abscissa) = roots
        .iter()
        .enumerate()
        .map(|(k, (_, r))| (k, r.roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("modes");
    let stable = kappa.is_positive();
    if (abscissa < 0.0) != stable {
        return Some(fail("sign").num("abscissa", abscissa).text("mode", k_star + 1));
    }
    if mgt_hurwitz(&d.a, &d.b, &d.c) != stable {
        return Some(fail("exact hurwitz"));
    }
    for (lambda, _) in &roots {
        let poly = characteristic_polynomial(&eq, *lambda).expect("memoryless");
        if routh_hurwitz(&poly) != Some(stable) {
            return Some(fail("routh array").num("lambda", *lambda));
        }
    }
    // trajectory of the extremal mode
    let lambda = roots[k_star].0;
    let problem = reduce(&eq, lambda, &ModeHistory::Null)
        .and_then(|p| p.with_initial(&[1.0, 0.0, 0.0]))
        .expect("cubic mode");
    let horizon = if stable { 30.0 } else { 10.0 } / abscissa.abs();
    let traj = match integrate(&problem, horizon, &StepControl::exact(horizon / 4.0)) {
        Ok(t) => t,
        Err(e) => return Some(fail("integrate").text("error", e)),
    };
    let end = traj.states.last().expect("initial state").norm();
    let ok = if stable {
        traj.diverged_at.is_none() && end < 1e-6
    } else {
        traj.diverged_at.is_some() || end > 1e3
    };
    (!ok).then(|| {
        fail("trajectory")
            .num("abscissa", abscissa)
            .num("horizon", horizon)
            .num("final_norm", end)
            .text("mode", k_star + 1)
    })
}

/// A memory law and its relaxation one order higher.
#[derive(Debug, Clone)]
pub struct EquivalenceCase {
    pub name: String,
    pub memory_law: HeatLaw,
}

fn tenth<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.random_range(1..=10), 10)
}

fn omega_draw<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.random_range(0..=9), 10)
}

fn random_base<R: Rng>(rng: &mut R, n: usize) -> HeatLaw {
    if n == 0 {
        return HeatLaw::fourier(tenth(rng)).expect("positive");
    }
    let eps = (0..n).map(|_| tenth(rng)).collect();
    let omega = (0..n).map(|_| omega_draw(rng)).collect();
    let kappa = (0..=n).map(|_| tenth(rng)).collect();
    build_law(&ParameterSequence::new(eps, omega, kappa).expect("valid draw"))
}

fn equivalence_cases(n_set: &[usize], seed: u64) -> Vec<EquivalenceCase> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    let exp = |e: Rational| Kernel::exponential(e).expect("positive");
    for &n in n_set {
        if n == 0 {
            let fourier = HeatLaw::fourier(int(1)).expect("positive");
            for (name, omega) in [("gurtin-pipkin/weakly-damped", int(0)), ("coleman-gurtin/strongly-damped", ratio(1, 2))] {
                out.push(EquivalenceCase {
                    name: name.into(),
                    memory_law: attach_memory(&fourier, omega, exp(ratio(1, 2)), int(0), MemoryOptions::default())
                        .expect("valid"),
                });
            }
        }
        for draw in 0..4 {
            let base = random_base(&mut rng, n);
            let kappa_next = if draw % 2 == 0 { int(0) } else { tenth(&mut rng) };
            let law = attach_memory(&base, omega_draw(&mut rng), exp(tenth(&mut rng)), kappa_next, MemoryOptions::default())
                .expect("valid");
            out.push(EquivalenceCase {
                name: format!("n={n} draw={draw}"),
                memory_law: law,
            });
        }
    }
    out
}

/// Initial data `c/k²` with `c` in `[-1, 1]`, fixed by `seed`.
fn mode_data(seed: u64, modes: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    (1..=modes)
        .map(|k| {
            (0..count)
                .map(|_| rng.random_range(-1.0..=1.0) / (k * k) as f64)
                .collect()
        })
        .collect()
}

/// Relative L² distance at the final time, `‖u - v‖ / ‖u‖`.
fn final_relative_l2(length: f64, u: &[ModalProblem], v: &[ModalProblem], t: f64, control: &StepControl) -> Result<(f64, Option<f64>)> {
    let a = simulate(u, length, t, control)?;
    let b = simulate(v, length, t, control)?;
    let diverged = a.diverged_at.or(b.diverged_at);
    let last = a.times.len().min(b.times.len()) - 1;
    let ya = a.coefficients(last);
    let yb = b.coefficients(last);
    let diff = parseval_norm(length, ya.iter().zip(&yb).map(|(x, y)| x - y));
    Ok((diff / parseval_norm(length, ya), diverged))
}

/// Solves the memory equation with null history and the relaxed local
/// equation with the extra initial value read off the memory equation at
/// `t = 0`, and compares the two solutions at `T = 1` over 16 modes.
pub fn verify_equivalence_numeric(n_set: &[usize], tol: f64, seed: u64) -> SuiteReport {
    let started = Instant::now();
    let mut report = SuiteReport::new("equivalence", seed);
    let cases = equivalence_cases(n_set, seed);
    let outcomes: Vec<std::result::Result<f64, Failure>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| check_equivalence(c, tol, seed.wrapping_add(i as u64)))
        .collect();
    let worst = outcomes.iter().filter_map(|o| o.as_ref().ok()).fold(0.0, |a: f64, b| a.max(*b));
    for o in outcomes {
        report.record(o.err());
    }
    report.note(format!("max relative l2 discrepancy {}", sig17(worst)));
    report.finish(started)
}

fn check_equivalence(case: &EquivalenceCase, tol: f64, seed: u64) -> std::result::Result<f64, Failure> {
    const MODES: usize = 16;
    let fail = |what: &str| Failure::new(case.name.clone()).text("check", what).text("law", &case.memory_law);
    let mem_eq = to_evolution(&case.memory_law);
    let local_law = relax_exponential(&case.memory_law).map_err(|e| fail("relax").text("error", e))?;
    let local_eq = to_evolution(&local_law);
    if local_eq.variable_index() != mem_eq.variable_index() || local_eq.time_order() != mem_eq.time_order() + 1 {
        return Err(fail("shape").text("memory_equation", &mem_eq).text("local_equation", &local_eq));
    }
    let data = mode_data(seed, MODES, mem_eq.time_order());
    let mut mem = Vec::new();
    let mut local = Vec::new();
    for (lambda, y0) in eigenvalues(1.0, MODES).into_iter().zip(&data) {
        let p = reduce(&mem_eq, lambda, &ModeHistory::Null)
            .and_then(|p| p.with_initial(y0))
            .map_err(|e| fail("reduce memory").text("error", e))?;
        let q = reduce(&local_eq, lambda, &ModeHistory::Null)
            .and_then(|q| q.with_initial(&p.compatible_initial_data()))
            .map_err(|e| fail("reduce local").text("error", e))?;
        mem.push(p);
        local.push(q);
    }
    let (err, diverged) = final_relative_l2(1.0, &mem, &local, 1.0, &StepControl::exact(1.0 / 64.0))
        .map_err(|e| fail("integrate").text("error", e))?;
    if let Some(t) = diverged {
        return Err(fail("diverged").num("t", t));
    }
    if !(err <= tol) {
        return Err(fail("relative l2").num("error", err).num("tolerance", tol));
    }
    Ok(err)
}

#[derive(Debug, Clone)]
pub struct LimitCase {
    pub name: String,
    pub base: HeatLaw,
    pub params: Option<ParameterSequence>,
    pub omega_next: Rational,
}

impl LimitCase {
    /// Order-(n+1) law with `ε_{n+1} = eps`, `κ_{n+1} = 0`.
    fn relaxed(&self, eps: &Rational) -> Result<HeatLaw> {
        let extended = match &self.params {
            Some(p) => p.extend(eps.clone(), self.omega_next.clone(), int(0))?,
            None => ParameterSequence::new(
                vec![eps.clone()],
                vec![self.omega_next.clone()],
                vec![self.base.kappa().clone(), int(0)],
            )?,
        };
        Ok(build_law(&extended))
    }
}

fn limit_cases(n_set: &[usize]) -> Vec<LimitCase> {
    let mut out = Vec::new();
    for &n in n_set {
        for omega_next in [int(0), ratio(1, 2)] {
            let params = match n {
                0 => None,
                _ => Some(
                    ParameterSequence::new(
                        vec![ratio(1, 2); n],
                        vec![ratio(1, 4); n],
                        vec![ratio(1, 10); n + 1],
                    )
                    .expect("valid"),
                ),
            };
            let base = match &params {
                Some(p) => build_law(p),
                None => HeatLaw::fourier(ratio(1, 10)).expect("positive"),
            };
            out.push(LimitCase {
                name: format!("n={n} omega_next={}", rational::format(&omega_next)),
                base,
                params,
                omega_next,
            });
        }
    }
    out
}

/// `ε_{n+1} = 10⁻² · 2⁻ʲ`, `j = 0..=7`.
pub fn limit_epsilons() -> Vec<Rational> {
    (0..=7).map(|j| ratio(1, 100 * (1 << j))).collect()
}

/// Order-(n+1) solutions approach the order-n solution at first order in
/// `ε_{n+1}`: successive error ratios under halving lie in `[0.4, 0.6]`.
pub fn verify_limit(n_set: &[usize], seed: u64) -> SuiteReport {
    let started = Instant::now();
    let mut report = SuiteReport::new("limit", seed);
    for case in limit_cases(n_set) {
        match check_limit(&case, seed) {
            Ok(ratios) => {
                let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
                report.note(format!("{}: halving ratios in [{}, {}]", case.name, sig17(lo), sig17(hi)));
                report.record(None);
            }
            Err(f) => report.record(Some(f)),
        }
    }
    report.finish(started)
}

/// Relative L² errors at `T = 1` for each `ε` of [`limit_epsilons`].
pub fn limit_errors(case: &LimitCase, seed: u64) -> Result<Vec<f64>> {
    const MODES: usize = 4;
    let base_eq = to_evolution(&case.base);
    let data = mode_data(seed, MODES, base_eq.time_order());
    let base: Vec<ModalProblem> = eigenvalues(1.0, MODES)
        .into_iter()
        .zip(&data)
        .map(|(l, y0)| reduce(&base_eq, l, &ModeHistory::Null)?.with_initial(y0))
        .collect::<Result<_>>()?;
    limit_epsilons()
        .iter()
        .map(|eps| {
            let eq = to_evolution(&case.relaxed(eps)?);
            let relaxed: Vec<ModalProblem> = base
                .iter()
                .map(|p| reduce(&eq, p.lambda, &ModeHistory::Null)?.with_initial(&p.compatible_initial_data()))
                .collect::<Result<_>>()?;
            final_relative_l2(1.0, &base, &relaxed, 1.0, &StepControl::exact(1.0 / 16.0)).map(|(e, _)| e)
        })
        .collect()
}

fn check_limit(case: &LimitCase, seed: u64) -> std::result::Result<Vec<f64>, Failure> {
    let fail = |what: &str| Failure::new(case.name.clone()).text("check", what);
    let errors = limit_errors(case, seed).map_err(|e| fail("solve").text("error", e))?;
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.iter().all(|r| (0.4..=0.6).contains(r)) {
        Ok(ratios)
    } else {
        Err(fail("first-order ratio").nums("errors", &errors).nums("ratios", &ratios))
    }
}

/// Closed-form heat decay, RK4 against the exact integrator, and the
/// auxiliary-ODE memory against the direct-quadrature oracle.
pub fn verify_solver_anchors(seed: u64) -> SuiteReport {
    let started = Instant::now();
    let mut report = SuiteReport::new("anchors", seed);
    for kappa in [int(1), ratio(1, 3)] {
        match check_heat_decay(&kappa) {
            Ok(worst) => {
                report.note(format!("heat kappa={}: max relative error {}", rational::format(&kappa), sig17(worst)));
                report.record(None);
            }
            Err(f) => report.record(Some(f)),
        }
    }
    for (name, eq, history) in oracle_cases() {
        match check_oracle(&eq, &history) {
            Ok((order, finest, envelope)) => {
                report.note(format!(
                    "{name}: observed order {}, error {} within envelope {}",
                    sig17(order),
                    sig17(finest),
                    sig17(envelope)
                ));
                report.record(None);
            }
            Err(f) => report.record(Some(Failure { case: name, ..f })),
        }
    }
    report.finish(started)
}

fn check_heat_decay(kappa: &Rational) -> std::result::Result<f64, Failure> {
    const MODES: usize = 8;
    let k = rational::to_f64(kappa);
    let case = format!("heat kappa={}", rational::format(kappa));
    let fail = |what: &str| Failure::new(case.clone()).text("check", what);
    let eq = to_evolution(&HeatLaw::fourier(kappa.clone()).expect("positive"));
    let problems: Vec<ModalProblem> = eigenvalues(1.0, MODES)
        .into_iter()
        .enumerate()
        .map(|(i, l)| reduce(&eq, l, &ModeHistory::Null)?.with_initial(&[1.0 / (i + 1) as f64]))
        .collect::<Result<_>>()
        .map_err(|e| fail("reduce").text("error", e))?;
    let mut worst = 0.0f64;
    for control in [StepControl::exact(0.05), StepControl::rk4(0.05, 1e-13)] {
        let traj = simulate(&problems, 1.0, 0.5, &control).map_err(|e| fail("integrate").text("error", e))?;
        for (i, m) in traj.modes.iter().enumerate() {
            let lambda = problems[i].lambda;
            for (t, y) in m.times.iter().zip(m.values()) {
                let exact = (-k * lambda * t).exp() / (i + 1) as f64;
                let rel = (y - exact).abs() / exact;
                worst = worst.max(rel);
                if !(rel <= 1e-8) {
                    return Err(fail("closed form")
                        .text("method", format!("{:?}", control.method))
                        .text("mode", i + 1)
                        .num("t", *t)
                        .num("relative_error", rel));
                }
            }
        }
    }
    Ok(worst)
}

fn oracle_cases() -> Vec<(String, EvolutionEquation, ModeHistory)> {
    let fourier = HeatLaw::fourier(int(1)).expect("positive");
    let exp = |e: Rational| Kernel::exponential(e).expect("positive");
    let mem = |law: &HeatLaw, omega: Rational, kernel: Kernel, kappa_next: Rational| {
        to_evolution(&attach_memory(law, omega, kernel, kappa_next, MemoryOptions::default()).expect("valid"))
    };
    let prony = Kernel::prony(vec![
        PronyTerm { weight: ratio(1, 4), rate: ratio(1, 5) },
        PronyTerm { weight: ratio(3, 4), rate: int(1) },
    ])
    .expect("valid");
    let mgt2 = Catalog::builtin()
        .recipe("mgt-memory-2", None, None, None)
        .and_then(|r| r.build())
        .expect("preset");
    vec![
        ("gurtin-pipkin null history".into(), mem(&fourier, int(0), exp(ratio(1, 2)), int(0)), ModeHistory::Null),
        (
            "coleman-gurtin constant tail".into(),
            mem(&fourier, ratio(1, 2), exp(ratio(1, 2)), int(0)),
            ModeHistory::ConstantTail(1.0),
        ),
        (
            "prony with perturbation, function history".into(),
            mem(&fourier, ratio(1, 4), prony, ratio(1, 10)),
            ModeHistory::Function(Arc::new(|s: f64| (2.0 * s).cos())),
        ),
        ("mgt with memory type II".into(), to_evolution(&mgt2), ModeHistory::Null),
    ]
}

/// Final values of the oracle at `Δt = 1/100, 1/200, 1/400` and of the
/// auxiliary-ODE reduction, compared on the coarse grid.
pub fn oracle_errors(eq: &EvolutionEquation, history: &ModeHistory) -> Result<([f64; 2], f64)> {
    let lambda = PI * PI;
    let d = eq.localized().time_order();
    let y0: Vec<f64> = (0..d).map(|j| 1.0 / (j + 1) as f64).collect();
    let problem = reduce(eq, lambda, history)?.with_initial(&y0)?;
    let reference = integrate(&problem, 1.0, &StepControl::exact(0.01))?;
    let runs: Vec<Vec<f64>> = [100usize, 200, 400]
        .iter()
        .map(|&n| {
            let traj = integrate_quadrature_oracle(eq, lambda, history, &y0, 1.0, 1.0 / n as f64)?;
            let stride = n / 100;
            Ok(traj.values().into_iter().step_by(stride).collect())
        })
        .collect::<Result<_>>()?;
    let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let d1 = max_diff(&runs[0], &runs[1]);
    let d2 = max_diff(&runs[1], &runs[2]);
    let finest = max_diff(&runs[2], &reference.values());
    Ok(([d1, d2], finest))
}

fn check_oracle(eq: &EvolutionEquation, history: &ModeHistory) -> std::result::Result<(f64, f64, f64), Failure> {
    let fail = |what: &str| Failure::new("").text("check", what).text("equation", eq);
    let ([d1, d2], finest) = oracle_errors(eq, history).map_err(|e| fail("solve").text("error", e))?;
    let order = (d1 / d2).log2();
    // Richardson: for a second-order method the error of the finest run is
    // about d2/3
    let envelope = 2.0 * d2 / 3.0;
    if (1.8..=2.2).contains(&order) && finest <= envelope {
        Ok((order, finest, envelope))
    } else {
        Err(fail("self-convergence")
            .num("observed_order", order)
            .num("finest_error", finest)
            .num("envelope", envelope))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_stability_anchors() {
        let sub = StabilityDraw { a: int(1), b: int(1), c: ratio(1, 2) };
        let sup = StabilityDraw { a: int(1), b: int(1), c: int(2) };
        assert!(check_dichotomy(0, &sub).is_none());
        assert!(check_dichotomy(1, &sup).is_none());
    }

    #[test]
    fn limit_epsilons_span_two_decades() {
        let e = limit_epsilons();
        assert_eq!(e[0], ratio(1, 100));
        assert!(rational::to_f64(e.last().unwrap()) < 1e-4);
    }
}
