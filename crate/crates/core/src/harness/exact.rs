//! Suites in exact rational arithmetic.

use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::Rng;

use super::{rng, Failure, SuiteReport};
use crate::coefficients::{alpha_explicit, beta_vanishing_check, build_alpha, CoefficientTable, ParameterSequence};
use crate::error::Result;
use crate::law::{
    attach_memory, build_law, classify, relax_exponential, to_evolution, CatalogEquation, Catalog,
    HeatLaw, Kernel, MemoryOptions,
};
use crate::rational::{self, int, Rational};

/// Bound on numerators and denominators of random rationals.
const BOUND: i64 = 100;

pub type AlphaFn = dyn Fn(&[Rational]) -> Result<Vec<Rational>> + Sync;

fn nonneg<R: Rng>(rng: &mut R) -> Rational {
    rational::random(rng, 0, BOUND, BOUND)
}

/// `0` with probability 1/4, else a positive draw.
fn maybe_zero<R: Rng>(rng: &mut R) -> Rational {
    if rng.random_range(0..4) == 0 {
        Rational::zero()
    } else {
        rational::random_positive(rng, BOUND)
    }
}

/// A draw in `[0, 1)`, zero with probability 1/4.
fn unit_interval<R: Rng>(rng: &mut R) -> Rational {
    if rng.random_range(0..4) == 0 {
        return Rational::zero();
    }
    let q = rng.random_range(2..=BOUND);
    rational::ratio(rng.random_range(1..q), q)
}

pub fn verify_recurrence_vs_explicit(n_max: usize, trials: usize, seed: u64) -> SuiteReport {
    verify_recurrence_with(n_max, trials, seed, &build_alpha)
}

/// Compares `alpha` against the explicit subset sum; the recurrence under
/// test is injectable so the harness can check that it catches mutations.
pub fn verify_recurrence_with(n_max: usize, trials: usize, seed: u64, alpha: &AlphaFn) -> SuiteReport {
    let started = Instant::now();
    let mut report = SuiteReport::new("recurrence", seed);
    let mut rng = rng(seed);
    for n in 1..=n_max.min(10) {
        for trial in 0..trials {
            let eps: Vec<Rational> = (0..n).map(|_| nonneg(&mut rng)).collect();
            let outcome = match alpha(&eps) {
                Err(e) => Some(Failure::new(format!("n={n} trial={trial}")).rats("epsilon", &eps).text("error", e)),
                Ok(got) => (1..=n).find_map(|i| {
                    let want = alpha_explicit(&eps, i).expect("index in range");
                    (got.get(i - 1) != Some(&want)).then(|| {
                        Failure::new(format!("n={n} trial={trial} i={i}"))
                            .rats("epsilon", &eps)
                            .text("recurrence", got.get(i - 1).map_or("missing".into(), rational::format))
                            .rat("explicit", &want)
                    })
                }),
            };
            report.record(outcome);
        }
    }
    report.finish(started)
}

fn random_params<R: Rng>(rng: &mut R, n: usize) -> ParameterSequence {
    let epsilon = (0..n).map(|_| maybe_zero(rng)).collect();
    let omega = (0..n).map(|_| unit_interval(rng)).collect();
    let mut kappa: Vec<Rational> = (0..n).map(|_| rational::random_positive(rng, BOUND)).collect();
    kappa.push(rational::random_positive(rng, BOUND));
    ParameterSequence::new(epsilon, omega, kappa).expect("valid draw")
}

/// `relax_exponential ∘ attach_memory` against `build_law` on the extended
/// sequence, for base orders `0..=n_max`.
pub fn verify_induction(n_max: usize, trials: usize, seed: u64) -> SuiteReport {
    let started = Instant::now();
    let mut report = SuiteReport::new("induction", seed);
    let mut rng = rng(seed);
    let mut dirac_cases = 0;
    for n in 0..=n_max {
        for trial in 0..trials {
            let case = format!("n={n} trial={trial}");
            // order 0 is the Fourier law, which has no parameter sequence
            let base: std::result::Result<ParameterSequence, Rational> = if n == 0 {
                Err(rational::random_positive(&mut rng, BOUND))
            } else {
                Ok(random_params(&mut rng, n))
            };
            let base_law = match &base {
                Ok(p) => build_law(p),
                Err(k0) => HeatLaw::fourier(k0.clone()).expect("positive"),
            };
            let eps = maybe_zero(&mut rng);
            let omega = unit_interval(&mut rng);
            let kappa_next = maybe_zero(&mut rng);
            let kernel = if eps.is_zero() {
                dirac_cases += 1;
                Kernel::Dirac
            } else {
                Kernel::exponential(eps.clone()).expect("positive")
            };
            let extended = match &base {
                Ok(p) => p.extend(eps.clone(), omega.clone(), kappa_next.clone()),
                Err(k0) => ParameterSequence::new(
                    vec![eps.clone()],
                    vec![omega.clone()],
                    vec![k0.clone(), kappa_next.clone()],
                ),
            }
            .expect("valid extension");
            let relaxed = attach_memory(&base_law, omega.clone(), kernel, kappa_next.clone(), MemoryOptions::default())
                .and_then(|m| relax_exponential(&m));
            let outcome = match relaxed {
                Err(e) => Some(Failure::new(case).text("error", e)),
                Ok(law) if law.matches_params(&extended) => None,
                Ok(law) => {
                    let want = build_law(&extended);
                    Some(
                        Failure::new(case)
                            .rats("epsilon", extended.epsilon())
                            .rats("omega", extended.omega())
                            .rats("kappa", extended.kappa())
                            .rats("relaxed_q", law.q_coeffs())
                            .rats("relaxed_grad", law.grad_coeffs())
                            .rats("built_q", want.q_coeffs())
                            .rats("built_grad", want.grad_coeffs()),
                    )
                }
            };
            report.record(outcome);
        }
        // ω_{n+1} = 1 must be rejected before any comparison
        let law = if n == 0 {
            HeatLaw::fourier(int(1)).expect("positive")
        } else {
            build_law(&random_params(&mut rng, n))
        };
        let kernel = Kernel::exponential(int(1)).expect("positive");
        let rejected = attach_memory(&law, int(1), kernel, int(0), MemoryOptions { extended_omega: true });
        report.record(match rejected {
            Err(_) => None,
            Ok(_) => Some(Failure::new(format!("n={n} omega=1")).text("error", "accepted omega = 1")),
        });
    }
    report.note(format!("{dirac_cases} Dirac (epsilon_{{n+1}} = 0) branches"));
    report.finish(started)
}

/// Properties (i)–(iii) of `β` over every zero pattern of `ε` and both
/// `ω_1 = 0` and `ω_1 > 0`, with `draws` random magnitudes per pattern.
pub fn verify_beta_properties(n_max: usize, draws: usize, seed: u64) -> SuiteReport {
    let started = Instant::now();
    let mut report = SuiteReport::new("beta", seed);
    let mut rng = rng(seed);
    for n in 1..=n_max {
        for pattern in 0u32..(1 << n) {
            for omega1_positive in [false, true] {
                for draw in 0..draws {
                    let epsilon: Vec<Rational> = (0..n)
                        .map(|i| {
                            if pattern >> i & 1 == 1 {
                                rational::random_positive(&mut rng, BOUND)
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect();
                    let mut omega: Vec<Rational> = (0..n).map(|_| unit_interval(&mut rng)).collect();
                    omega[0] = if omega1_positive {
                        let q = rng.random_range(2..=BOUND);
                        rational::ratio(rng.random_range(1..q), q)
                    } else {
                        Rational::zero()
                    };
                    let mut kappa: Vec<Rational> =
                        (0..n).map(|_| rational::random_positive(&mut rng, BOUND)).collect();
                    kappa.push(maybe_zero(&mut rng));
                    let params = ParameterSequence::new(epsilon, omega, kappa).expect("valid draw");
                    let case = format!("n={n} pattern={pattern:0width$b} omega1>0={omega1_positive} draw={draw}", width = n);
                    report.record(check_beta(&params, case));
                }
            }
        }
    }
    report.finish(started)
}

fn check_beta(params: &ParameterSequence, case: String) -> Option<Failure> {
    let n = params.order();
    let table = CoefficientTable::build(params);
    let fail = |what: &str| {
        Failure::new(case.clone())
            .text("property", what)
            .rats("epsilon", params.epsilon())
            .rats("omega", params.omega())
            .rats("kappa", params.kappa())
            .rats("beta", &table.beta)
    };
    if let Some(i) = (0..n).find(|&i| !table.beta[i].is_positive()) {
        return Some(fail("(i)").text("index", i + 1));
    }
    let all_eps = params.epsilon().iter().all(Signed::is_positive);
    let expect_positive = params.omega()[0].is_positive() && all_eps;
    if table.beta[2 * n - 1].is_positive() != expect_positive {
        return Some(fail("(ii)"));
    }
    for k in 0..n {
        if !beta_vanishing_check(params, k).expect("k < n") {
            return Some(fail("(iii)").text("k", k).rats("alpha", &table.alpha));
        }
    }
    None
}

/// Every shipped preset classifies as its catalog item.
pub fn verify_catalog(seed: u64) -> SuiteReport {
    let started = Instant::now();
    let mut report = SuiteReport::new("catalog", seed);
    let catalog = Catalog::builtin();
    for item in CatalogEquation::ALL {
        let outcome = catalog
            .recipe(item.preset(), None, None, None)
            .and_then(|r| r.build())
            .map(|law| classify(&to_evolution(&law)));
        report.record(match outcome {
            Ok(c) if c.named() == Some(item) => None,
            Ok(c) => Some(
                Failure::new(item.preset())
                    .text("expected", item.label())
                    .text("got", c),
            ),
            Err(e) => Some(Failure::new(item.preset()).text("error", e)),
        });
    }
    report.finish(started)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        assert!(verify_recurrence_vs_explicit(1, 1, 0).passed);
        assert!(verify_induction(2, 5, 3).passed);
        assert!(verify_beta_properties(3, 1, 5).passed);
        assert!(verify_catalog(0).passed);
    }

    #[test]
    fn mutation_is_caught() {
        let mutated = |eps: &[Rational]| {
            build_alpha(eps).map(|mut a| {
                *a.last_mut().unwrap() += int(1);
                a
            })
        };
        let r = verify_recurrence_with(3, 4, 42, &mutated);
        assert!(!r.passed);
        assert_eq!(r.failures.len(), r.cases);
        assert!(r.failures[0].detail.contains_key("explicit"));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = verify_induction(2, 3, 7);
        let b = verify_induction(2, 3, 7);
        assert_eq!(a.cases, b.cases);
        assert_eq!(
            serde_json::to_string(&a.failures).unwrap(),
            serde_json::to_string(&b.failures).unwrap()
        );
    }
}
