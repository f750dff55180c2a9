//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! `cargo test -p heatlaw --test acceptance`

use std::process::ExitCode;
use std::time::{Duration, Instant};

use heatlaw::harness::{self, SuiteReport, DEFAULT_SEED};

struct Criterion {
    id: u8,
    title: &'static str,
    limit: Option<Duration>,
    run: fn(u64) -> SuiteReport,
    /// Case count the run has to reach.
    min_cases: usize,
}

const CRITERIA: [Criterion; 8] = [
    Criterion {
        id: 1,
        title: "alpha recurrence = explicit subset sum, n <= 8, 100 vectors per n",
        limit: Some(Duration::from_secs(5)),
        run: |s| harness::verify_recurrence_vs_explicit(8, 100, s),
        min_cases: 800,
    },
    Criterion {
        id: 2,
        title: "relaxation rebuilds order n+1 exactly, n <= 6, 50 draws per n, Dirac branches included",
        limit: Some(Duration::from_secs(10)),
        run: |s| harness::verify_induction(6, 50, s),
        min_cases: 7 * 50,
    },
    Criterion {
        id: 3,
        title: "beta properties (i)-(iii) over every epsilon zero pattern, n <= 6",
        limit: Some(Duration::from_secs(10)),
        run: |s| harness::verify_beta_properties(6, 3, s),
        min_cases: 2 * 126,
    },
    Criterion {
        id: 4,
        title: "MGT stability: sign(abscissa) = sign(-stability number), 200 draws, K = 64, residual <= 1e-10",
        limit: Some(Duration::from_secs(10)),
        run: |s| harness::verify_stability_dichotomy(200, s),
        min_cases: 200,
    },
    Criterion {
        id: 5,
        title: "memory vs relaxed local equation, n in {0,1,2}, relative L2 <= 1e-6 at T = 1, K = 16",
        limit: Some(Duration::from_secs(30)),
        run: |s| harness::verify_equivalence_numeric(&[0, 1, 2], 1e-6, s),
        min_cases: 5,
    },
    Criterion {
        id: 6,
        title: "epsilon -> 0 limit: halving ratios in [0.4, 0.6], n in {0,1}",
        limit: None,
        run: |s| harness::verify_limit(&[0, 1], s),
        min_cases: 2,
    },
    Criterion {
        id: 7,
        title: "heat decay to 1e-8; auxiliary ODE vs quadrature oracle within its dt^2 envelope",
        limit: None,
        run: harness::verify_solver_anchors,
        min_cases: 3,
    },
    Criterion {
        id: 8,
        title: "catalog: all ten named equations classified from their presets",
        limit: None,
        run: harness::verify_catalog,
        min_cases: 10,
    },
];

fn main() -> ExitCode {
    let seed = std::env::var("HEATLAW_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    println!("acceptance (seed {seed})");
    let mut failed = 0;
    for c in &CRITERIA {
        let started = Instant::now();
        let report = (c.run)(seed);
        let elapsed = started.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed < l);
        let enough = report.cases >= c.min_cases;
        let ok = report.passed && report.failures.is_empty() && in_time && enough;
        let limit = c.limit.map_or(String::new(), |l| format!(" / limit {} s", l.as_secs()));
        println!(
            "{} [{}] {}: {} cases, {} failures, {:.2} s{}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            report.cases,
            report.failures.len(),
            elapsed.as_secs_f64(),
            limit,
        );
        for note in &report.notes {
            println!("       {note}");
        }
        if !ok {
            failed += 1;
            if !in_time {
                println!("       over the time limit");
            }
            if !enough {
                println!("       expected at least {} cases", c.min_cases);
            }
            for f in report.failures.iter().take(5) {
                println!("       {}", serde_json::to_string(f).unwrap_or_default());
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
