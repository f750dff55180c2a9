//! Command-line front end: `derive`, `solve`, `roots`, `verify`.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::{
    parent_memory_law, Domain, InitialConfig, InitialData, LawSpec, OutputConfig, ResolvedLaw,
    RunConfig, TimeConfig,
};

use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::harness::{self, Suite};
use crate::law::{classify, to_evolution, Kernel, MemoryRecipe};
use crate::rational::{self, Rational};
use crate::solver::{
    self, eigenvalues, modal_roots, project, reduce, ModalProblem, Method, ModeRoots, Sig17,
    HistorySpec,
};

#[derive(Debug, Parser)]
#[command(name = "heatlaw", version, about = "Heat laws of order n: coefficients, equations, modal simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the law of order n and its evolution equation.
    Derive(DeriveArgs),
    /// Simulate on (0, L) with Dirichlet conditions and write a trajectory CSV.
    Solve(SolveArgs),
    /// Characteristic roots of every mode as JSON.
    Roots(RootsArgs),
    /// Run verification suites and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Integrator {
    Exact,
    Rk4,
}

impl From<Integrator> for Method {
    fn from(i: Integrator) -> Self {
        match i {
            Integrator::Exact => Method::MatrixExponential,
            Integrator::Rk4 => Method::Rk4,
        }
    }
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

/// A comma-separated list of rationals given as one flag value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalList(pub Vec<Rational>);

fn parse_list(s: &str) -> std::result::Result<RationalList, String> {
    s.split(',').map(|x| parse_rational(x.trim())).collect::<std::result::Result<_, _>>().map(RationalList)
}

fn parse_indexed(s: &str) -> std::result::Result<(usize, Rational), String> {
    let (i, v) = s.split_once('=').ok_or_else(|| format!("expected INDEX=VALUE, got {s:?}"))?;
    Ok((i.parse().map_err(|_| format!("bad index {i:?}"))?, parse_rational(v)?))
}

fn parse_kernel(s: &str) -> std::result::Result<Kernel, String> {
    Kernel::parse(s).map_err(|e| e.to_string())
}

/// Law selection. Indexed flags such as `--kappa1 0` or `--omega2=1/2` are
/// accepted and override single entries.
#[derive(Debug, Clone, Args, Default)]
pub struct LawArgs {
    /// Named template (heat, gurtin-pipkin, coleman-gurtin, weakly-damped,
    /// strongly-damped, mgt, mgt-regularized, mgt-memory-1, mgt-memory-2, mgt4).
    #[arg(long, conflicts_with_all = ["n", "epsilon", "omega", "kappa"])]
    pub preset: Option<String>,
    #[arg(long, value_parser = parse_rational, requires = "preset")]
    pub a: Option<Rational>,
    #[arg(long, value_parser = parse_rational, requires = "preset")]
    pub b: Option<Rational>,
    #[arg(long, value_parser = parse_rational, requires = "preset")]
    pub c: Option<Rational>,
    /// Order of the law; unspecified entries default to ε = 1, ω = 0, κ = 1.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated ε_1..ε_n.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub epsilon: Option<RationalList>,
    /// Comma-separated ω_1..ω_n.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub omega: Option<RationalList>,
    /// Comma-separated κ_0..κ_n.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub kappa: Option<RationalList>,
    #[arg(long = "epsilon-at", value_parser = parse_indexed, hide = true)]
    pub epsilon_at: Vec<(usize, Rational)>,
    #[arg(long = "omega-at", value_parser = parse_indexed, hide = true)]
    pub omega_at: Vec<(usize, Rational)>,
    #[arg(long = "kappa-at", value_parser = parse_indexed, hide = true)]
    pub kappa_at: Vec<(usize, Rational)>,
    /// Relax the top conductivity against a kernel: dirac, exp:<eps>, prony:<w>@<eps>,...
    #[arg(long, value_parser = parse_kernel)]
    pub memory_kernel: Option<Kernel>,
    /// Instantaneous fraction ω_{n+1} of the relaxed term.
    #[arg(long, value_parser = parse_rational, requires = "memory_kernel")]
    pub memory_omega: Option<Rational>,
    /// Perturbation κ_{n+1} ≥ 0.
    #[arg(long, value_parser = parse_rational, requires = "memory_kernel")]
    pub memory_kappa: Option<Rational>,
    /// Allow ω_{n+1} > 1.
    #[arg(long, requires = "memory_kernel")]
    pub extended_omega: bool,
}

impl LawArgs {
    fn given(&self) -> bool {
        self.preset.is_some()
            || self.n.is_some()
            || self.epsilon.is_some()
            || self.omega.is_some()
            || self.kappa.is_some()
            || !self.epsilon_at.is_empty()
            || !self.omega_at.is_empty()
            || !self.kappa_at.is_empty()
    }

    pub fn to_law_spec(&self) -> Result<LawSpec> {
        let memory = self.memory_kernel.clone().map(|kernel| MemoryRecipe {
            omega: self.memory_omega.clone().unwrap_or_else(|| rational::int(0)),
            kernel,
            kappa_next: self.memory_kappa.clone().unwrap_or_else(|| rational::int(0)),
            extended_omega: self.extended_omega,
        });
        if let Some(preset) = &self.preset {
            if !(self.epsilon_at.is_empty() && self.omega_at.is_empty() && self.kappa_at.is_empty()) {
                return Err(Error::invariant(
                    "RunConfig invariant",
                    "a preset and explicit parameters are mutually exclusive",
                ));
            }
            return Ok(LawSpec {
                preset: Some(preset.clone()),
                a: self.a.clone(),
                b: self.b.clone(),
                c: self.c.clone(),
                memory,
                ..Default::default()
            });
        }
        let n = self
            .n
            .or(self.epsilon.as_ref().map(|l| l.0.len()))
            .or(self.omega.as_ref().map(|l| l.0.len()))
            .or(self.kappa.as_ref().map(|k| k.0.len().saturating_sub(1)))
            .unwrap_or(0);
        let fill = |given: &Option<RationalList>, len: usize, default: i64, what: &str| -> Result<Vec<Rational>> {
            match given.as_ref().map(|l| &l.0) {
                Some(v) if v.len() == len => Ok(v.clone()),
                Some(v) => Err(Error::invariant(
                    "ParameterSequence invariant",
                    format!("{what} needs {len} entries for n = {n} (got {})", v.len()),
                )),
                None => Ok(vec![rational::int(default); len]),
            }
        };
        let mut epsilon = fill(&self.epsilon, n, 1, "epsilon")?;
        let mut omega = fill(&self.omega, n, 0, "omega")?;
        let mut kappa = fill(&self.kappa, n + 1, 1, "kappa")?;
        let set = |v: &mut Vec<Rational>, at: &[(usize, Rational)], lo: usize, what: &str| -> Result<()> {
            for (i, x) in at {
                let max = v.len() + lo - 1;
                if *i < lo || *i > max {
                    return Err(Error::invariant(
                        "ParameterSequence invariant",
                        format!("{what}{i} out of range {lo}..={max} for n = {n}"),
                    ));
                }
                v[i - lo] = x.clone();
            }
            Ok(())
        };
        set(&mut epsilon, &self.epsilon_at, 1, "epsilon")?;
        set(&mut omega, &self.omega_at, 1, "omega")?;
        set(&mut kappa, &self.kappa_at, 0, "kappa")?;
        Ok(LawSpec {
            epsilon,
            omega,
            kappa,
            memory,
            ..Default::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args, Default)]
pub struct RunOverrides {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    pub config: Option<String>,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub modes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    pub run: RunOverrides,
    #[arg(long = "final-time")]
    pub final_time: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum)]
    pub integrator: Option<Integrator>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Per-mode initial values, modes separated by ';' and derivatives by ','
    /// (e.g. "1,0;0.5,0").
    #[arg(long)]
    pub initial: Option<String>,
    /// Read the top initial derivative off the parent memory law.
    #[arg(long)]
    pub compatibility: bool,
    /// Trajectory CSV path (stdout when absent).
    #[arg(long)]
    pub csv: Option<String>,
    /// Metadata sidecar path (defaults to the CSV path with `.json` appended).
    #[arg(long)]
    pub metadata: Option<String>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    pub run: RunOverrides,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, env = "HEATLAW_SEED", default_value_t = harness::DEFAULT_SEED)]
    pub seed: u64,
}

/// Rewrites `--kappa1 v` / `--kappa1=v` (and ε, ω) into `--kappa-at 1=v`.
pub fn expand_indexed_flags<I: IntoIterator<Item = String>>(args: I) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.into_iter().peekable();
    while let Some(arg) = it.next() {
        let matched = ["epsilon", "omega", "kappa"].iter().find_map(|name| {
            let rest = arg.strip_prefix("--")?.strip_prefix(name)?;
            let (idx, value) = match rest.split_once('=') {
                Some((i, v)) => (i, Some(v.to_string())),
                None => (rest, None),
            };
            (!idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit())).then(|| (*name, idx.to_string(), value))
        });
        match matched {
            Some((name, idx, value)) => {
                let value = value.or_else(|| it.next()).unwrap_or_default();
                out.push(format!("--{name}-at"));
                out.push(format!("{idx}={value}"));
            }
            None => out.push(arg),
        }
    }
    out
}

/// Parses `std::env::args`, runs the command, and returns the exit code.
pub fn main() -> i32 {
    let args = expand_indexed_flags(std::env::args());
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn run<W: Write>(command: Command, out: &mut W) -> Result<i32> {
    match command {
        Command::Derive(a) => cmd_derive(&a, out).map(|_| 0),
        Command::Solve(a) => cmd_solve(&a, out).map(|_| 0),
        Command::Roots(a) => cmd_roots(&a, out).map(|_| 0),
        Command::Verify(a) => cmd_verify(&a, out),
    }
}

#[derive(Serialize)]
struct DeriveOutput<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<&'a crate::coefficients::ParameterSequence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<CoefficientTable>,
    law: &'a crate::law::HeatLaw,
    law_text: String,
    equation: &'a crate::law::EvolutionEquation,
    equation_text: String,
    classification: crate::law::Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    stability_number: Option<String>,
}

fn variable_note(eq: &crate::law::EvolutionEquation) -> String {
    let m = eq.variable_index();
    if m == 0 {
        "u_0 = u (temperature)".into()
    } else {
        format!("u_{m} (∂_t^{m} u_{m} = u)")
    }
}

pub fn cmd_derive<W: Write>(args: &DeriveArgs, out: &mut W) -> Result<()> {
    let resolved = args.law.to_law_spec()?.resolve(false)?;
    let law = resolved.law.as_ref().expect("law without raw fallback");
    let eq = &resolved.equation;
    let coefficients = resolved.params.as_ref().map(CoefficientTable::build);
    let classification = classify(eq);
    let stability = resolved.stability_number.as_ref().map(rational::format);
    match args.format {
        Format::Json => {
            let o = DeriveOutput {
                params: resolved.params.as_ref(),
                coefficients,
                law,
                law_text: law.to_string(),
                equation: eq,
                equation_text: eq.to_string(),
                classification,
                stability_number: stability,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&o)?)?;
        }
        Format::Text => {
            writeln!(out, "order: {}", law.order())?;
            if let Some(p) = &resolved.params {
                writeln!(out, "epsilon: [{}]", join(p.epsilon()))?;
                writeln!(out, "omega: [{}]", join(p.omega()))?;
                writeln!(out, "kappa: [{}]", join(p.kappa()))?;
            }
            if let Some(t) = &coefficients {
                writeln!(out, "alpha: [{}]", join(&t.alpha))?;
                writeln!(out, "beta: [{}]", join(&t.beta))?;
            }
            writeln!(out, "law: {law}")?;
            writeln!(out, "variable: {}", variable_note(eq))?;
            writeln!(out, "equation: {eq}")?;
            writeln!(out, "classification: {classification}")?;
            if let Some(s) = stability {
                writeln!(out, "stability number: {s}")?;
            }
        }
    }
    Ok(())
}

fn join(v: &[Rational]) -> String {
    v.iter().map(rational::format).collect::<Vec<_>>().join(", ")
}

fn read_config(path: &str) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    RunConfig::from_json(&text)
}

fn parse_initial(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';')
        .map(|mode| {
            mode.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad initial value {v:?}")))
                })
                .collect()
        })
        .collect()
}

/// Effective configuration: the JSON file (if any) with flags applied on top.
pub fn effective_config(args: &SolveArgs) -> Result<RunConfig> {
    let mut cfg = match &args.run.config {
        Some(p) => read_config(p)?,
        None => RunConfig {
            law: LawSpec::default(),
            domain: Domain::default(),
            time: TimeConfig::default(),
            initial: None,
            history: Default::default(),
            output: OutputConfig::default(),
        },
    };
    if args.law.given() {
        cfg.law = args.law.to_law_spec()?;
    }
    if let Some(l) = args.run.length {
        cfg.domain.length = l;
    }
    if let Some(k) = args.run.modes {
        cfg.domain.modes = k;
    }
    if let Some(t) = args.final_time {
        cfg.time.final_time = t;
    }
    if let Some(dt) = args.dt {
        cfg.time.dt = dt;
    }
    if let Some(i) = args.integrator {
        cfg.time.integrator = i.into();
    }
    if let Some(t) = args.tolerance {
        cfg.time.tolerance = t;
    }
    if let Some(s) = &args.initial {
        cfg.initial = Some(InitialConfig {
            data: InitialData::Fourier(parse_initial(s)?),
            compatibility: args.compatibility,
        });
    } else if args.compatibility {
        if let Some(init) = &mut cfg.initial {
            init.compatibility = true;
        }
    }
    if args.csv.is_some() {
        cfg.output.csv = args.csv.clone();
    }
    if args.metadata.is_some() {
        cfg.output.metadata = args.metadata.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Per-mode values `[y_k, y_k', …]` with `count` entries each; modes beyond
/// the supplied list start at rest.
fn modal_values(cfg: &RunConfig, count: usize) -> Result<Vec<Vec<f64>>> {
    let init = cfg
        .initial
        .as_ref()
        .ok_or_else(|| Error::invariant("RunConfig invariant", "initial data required"))?;
    let k = cfg.domain.modes;
    let per_mode: Vec<Vec<f64>> = match &init.data {
        InitialData::Fourier(v) => {
            if v.len() > k {
                return Err(Error::invariant(
                    "RunConfig invariant",
                    format!("initial data for {} modes but domain.modes = {k}", v.len()),
                ));
            }
            v.clone()
        }
        InitialData::Profile(profiles) => {
            let coeffs = profiles
                .iter()
                .map(|p| project(cfg.domain.length, p, k))
                .collect::<Result<Vec<_>>>()?;
            (0..k).map(|m| coeffs.iter().map(|c| c[m]).collect()).collect()
        }
    };
    let mut out = Vec::with_capacity(k);
    for m in 0..k {
        let v = per_mode.get(m).cloned().unwrap_or_else(|| vec![0.0; count]);
        if v.len() != count {
            return Err(Error::invariant(
                "RunConfig invariant",
                format!("mode {} needs {count} initial values (got {})", m + 1, v.len()),
            ));
        }
        out.push(v);
    }
    Ok(out)
}

/// Modal problems with initial data applied, honoring compatibility mode.
pub fn build_problems(cfg: &RunConfig, resolved: &ResolvedLaw) -> Result<Vec<ModalProblem>> {
    let history = HistorySpec::from(&cfg.history);
    let eq = &resolved.equation;
    let compat = cfg.initial.as_ref().is_some_and(|i| i.compatibility);
    let lambdas = eigenvalues(cfg.domain.length, cfg.domain.modes);
    if !compat {
        let d = eq.localized().time_order();
        let values = modal_values(cfg, d)?;
        return lambdas
            .iter()
            .zip(&values)
            .enumerate()
            .map(|(i, (l, v))| reduce(eq, *l, &history.for_mode(i + 1))?.with_initial(v))
            .collect();
    }
    let parent = resolved
        .recipe
        .as_ref()
        .map(parent_memory_law)
        .transpose()?
        .flatten()
        .ok_or_else(|| {
            Error::Unsupported(
                "compatibility data needs a memoryless law of order n >= 1 with epsilon_n > 0".into(),
            )
        })?;
    let parent_eq = to_evolution(&parent);
    if parent_eq.variable_index() != eq.variable_index() {
        return Err(Error::Unsupported("parent law is written in a different variable".into()));
    }
    let d = parent_eq.localized().time_order();
    let values = modal_values(cfg, d)?;
    lambdas
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (l, v))| {
            let h = history.for_mode(i + 1);
            let p = reduce(&parent_eq, *l, &h)?.with_initial(v)?;
            reduce(eq, *l, &h)?.with_initial(&p.compatible_initial_data())
        })
        .collect()
}

#[derive(Serialize)]
struct SolveMetadata<'a> {
    config: &'a RunConfig,
    equation: &'a crate::law::EvolutionEquation,
    equation_text: String,
    classification: crate::law::Classification,
    stability_number: Option<String>,
    time_order: usize,
    modes: usize,
    steps: usize,
    diverged_at: Option<Sig17>,
    final_l2_norm: Option<Sig17>,
    final_l2_norm_dt: Option<Sig17>,
}

pub fn cmd_solve<W: Write>(args: &SolveArgs, out: &mut W) -> Result<()> {
    let cfg = effective_config(args)?;
    let resolved = cfg.law.resolve(true)?;
    let problems = build_problems(&cfg, &resolved)?;
    let traj = solver::simulate(&problems, cfg.domain.length, cfg.time.final_time, &cfg.time.control())?;

    let metadata = SolveMetadata {
        config: &cfg,
        equation: &resolved.equation,
        equation_text: resolved.equation.to_string(),
        classification: classify(&resolved.equation),
        stability_number: resolved.stability_number.as_ref().map(rational::format),
        time_order: resolved.equation.localized().time_order(),
        modes: traj.mode_count(),
        steps: traj.times.len().saturating_sub(1),
        diverged_at: traj.diverged_at.map(Sig17),
        final_l2_norm: traj.l2_norm.last().copied().map(Sig17),
        final_l2_norm_dt: traj.l2_norm_dt.last().copied().map(Sig17),
    };
    let metadata = serde_json::to_string_pretty(&metadata)?;

    match &cfg.output.csv {
        Some(path) => {
            let f = BufWriter::new(File::create(path).map_err(|e| Error::Io(format!("{path}: {e}")))?);
            traj.write_csv(f)?;
            let meta_path = cfg.output.metadata.clone().unwrap_or_else(|| format!("{path}.json"));
            write_file(&meta_path, &metadata)?;
        }
        None => {
            traj.write_csv(&mut *out)?;
            match &cfg.output.metadata {
                Some(p) => write_file(p, &metadata)?,
                None => eprintln!("{metadata}"),
            }
        }
    }
    if let Some(t) = traj.diverged_at {
        eprintln!("warning: trajectory diverged at t = {}", solver::sig17(t));
    }
    Ok(())
}

fn write_file(path: &str, text: &str) -> Result<()> {
    let p = Path::new(path);
    std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Io(format!("{path}: {e}")))
}

pub fn cmd_roots<W: Write>(args: &RootsArgs, out: &mut W) -> Result<()> {
    let (law, mut domain) = match &args.run.config {
        Some(p) => {
            let cfg = read_config(p)?;
            (cfg.law, cfg.domain)
        }
        None => (LawSpec::default(), Domain::default()),
    };
    let law = if args.law.given() { args.law.to_law_spec()? } else { law };
    if let Some(l) = args.run.length {
        domain.length = l;
    }
    if let Some(k) = args.run.modes {
        domain.modes = k;
    }
    if !(domain.length > 0.0 && domain.modes > 0) {
        return Err(Error::invariant("RunConfig invariant", "domain.length > 0 and domain.modes >= 1"));
    }
    let resolved = law.resolve(true)?;
    let roots = modal_roots(&resolved.equation, domain.length, domain.modes)?;
    for (lambda, set) in &roots {
        if set.degree_reduced {
            eprintln!("note: lambda = {}: zero leading coefficient, degree reduced", solver::sig17(*lambda));
        }
        if set.max_residual > solver::RESIDUAL_TOLERANCE {
            eprintln!(
                "warning: lambda = {}: root residual {} above {}",
                solver::sig17(*lambda),
                solver::sig17(set.max_residual),
                solver::RESIDUAL_TOLERANCE
            );
        }
    }
    let entries: Vec<ModeRoots> = roots.iter().map(|(l, s)| ModeRoots::new(*l, s)).collect();
    writeln!(out, "{}", serde_json::to_string_pretty(&entries)?)?;
    Ok(())
}

pub fn cmd_verify<W: Write>(args: &VerifyArgs, out: &mut W) -> Result<i32> {
    let suite: Suite = args.suite.parse()?;
    let report = harness::run(suite, args.seed);
    writeln!(out, "{}", report.to_json())?;
    Ok(if report.passed { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn indexed_flags_are_rewritten() {
        let got = expand_indexed_flags(strings(&["x", "--kappa1", "0", "--omega2=1/2", "--kappa", "1,2"]));
        assert_eq!(got, strings(&["x", "--kappa-at", "1=0", "--omega-at", "2=1/2", "--kappa", "1,2"]));
    }

    fn derive(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(expand_indexed_flags(strings(args))).unwrap();
        let mut out = Vec::new();
        run(cli.command, &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn derive_mgt_preset_reports_stability_number() {
        let text = derive(&["heatlaw", "derive", "--preset", "mgt", "--a", "1", "--b", "1", "--c", "0.5"]).unwrap();
        assert!(text.contains("order: 1"));
        assert!(text.contains("(vi) MGT equation"));
        assert!(text.contains("stability number: 1/2"));
    }

    #[test]
    fn derive_type_three_limit_is_heat() {
        let text = derive(&["heatlaw", "derive", "--n", "1", "--epsilon", "0", "--kappa1", "0"]).unwrap();
        assert!(text.contains("(i) heat equation"), "{text}");
    }

    #[test]
    fn derive_rejects_omega_one() {
        let err = derive(&["heatlaw", "derive", "--n", "2", "--omega1", "1"]).unwrap_err();
        assert!(err.to_string().contains("[0,1)"), "{err}");
    }

    #[test]
    fn defaults_fill_unspecified_entries() {
        let spec = LawArgs {
            n: Some(2),
            kappa_at: vec![(2, rational::int(0))],
            ..Default::default()
        }
        .to_law_spec()
        .unwrap();
        assert_eq!(spec.epsilon, vec![rational::int(1); 2]);
        assert_eq!(spec.omega, vec![rational::int(0); 2]);
        assert_eq!(spec.kappa, vec![rational::int(1), rational::int(1), rational::int(0)]);
        let bad = LawArgs {
            n: Some(1),
            omega_at: vec![(2, rational::int(0))],
            ..Default::default()
        };
        assert!(bad.to_law_spec().is_err());
    }
}
