use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use simplex_lab::bumps::{
    decompose_symbol, log_spaced, m_ell_check, partition_sum, rho_check, DecayFit, MEllSpec, RhoSpec, ShiftSpec,
};
use simplex_lab::dyadic::check_identities;
use simplex_lab::experiment::{run_experiment, CheckKind, ExperimentConfig, ExperimentName, RunOutcome, Table};
use simplex_lab::forms::{
    commutator_form, commutator_spectral, counterexample_growth, empirical_constant, lambda_direct, lambda_m_dense,
    lambda_m_tensor, simplex_direct, DenseBudget, ExponentTuple, FormResult, MuSymbol, ProbeEvaluator, ProbeSpec,
    PvLayout, PvQuadrature,
};
use simplex_lab::gen::random_bandlimited;
use simplex_lab::shifted::{shifted_norm_table, NormTableSpec, ShiftedKind};
use simplex_lab::symbol::{
    bad_set_distance, check_standard_symbol, count_threshold_functions, enumerate_sectors, mu_closed, mu_quadrature,
    AlphaQuadrature, Region, SmoothConfig, DEFAULT_SEED,
};
use simplex_lab::{Error, GridFunction};

#[derive(Parser)]
#[command(name = "simplex-lab", version, about = "Numerics for averaged simplex Hilbert transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The symbol μ_n and its sector structure.
    #[command(subcommand)]
    Symbol(SymbolCmd),
    /// Frequency decomposition into bump pieces.
    #[command(subcommand)]
    Decomp(DecompCmd),
    /// Evaluate multilinear forms.
    Forms(FormsArgs),
    #[command(subcommand)]
    Dyadic(DyadicCmd),
    #[command(subcommand)]
    Ops(OpsCmd),
    /// Run experiments from JSON configs.
    Run(RunArgs),
}

#[derive(Subcommand)]
enum SymbolCmd {
    /// Closed form against Monte Carlo at one point.
    Eval {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Enumerate and certify the sectors of μ_n.
    Sectors {
        #[arg(long)]
        n: usize,
        /// Print every sector, not just the count.
        #[arg(long)]
        full: bool,
    },
    /// Number of threshold functions on m variables.
    ThresholdCount {
        #[arg(long)]
        m: usize,
    },
    /// Finite-difference Mikhlin probe on an annulus.
    CheckSmooth {
        #[arg(long, value_enum, default_value_t = SmoothTarget::Mu)]
        symbol: SmoothTarget,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        l0: u32,
        #[arg(long, default_value_t = 1.0)]
        r_min: f64,
        #[arg(long, default_value_t = 4.0)]
        r_max: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SmoothTarget {
    Mu,
    /// Sum of the decomposition pieces.
    Partition,
}

#[derive(Subcommand)]
enum DecompCmd {
    Pieces {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        l0: u32,
    },
    VerifyPartition {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        l0: u32,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// |ρ̌(u, v)| along v.
    RhoDecay {
        #[command(flatten)]
        range: DecayRange,
    },
    /// |m̌_ℓ(u, v)| along u or v.
    MellDecay {
        #[command(flatten)]
        range: DecayRange,
        #[arg(long, default_value_t = 5)]
        ell: u32,
        #[arg(long, value_enum, default_value_t = DecayAxis::V)]
        along: DecayAxis,
    },
}

#[derive(Args)]
struct DecayRange {
    /// The coordinate held fixed.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    fixed: f64,
    #[arg(long, default_value_t = 8.0)]
    from: f64,
    #[arg(long, default_value_t = 128.0)]
    to: f64,
    #[arg(long, default_value_t = 9)]
    samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecayAxis {
    U,
    V,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormKind {
    Direct,
    Simplex,
    Spectral,
    Tensor,
    Commutator,
    Counterexample,
    Probe,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    RandomBandlimited,
}

#[derive(Clone, Copy, ValueEnum)]
enum PvPreset {
    /// ε = L/1024, T = L/2.
    Default,
    /// Log nodes to L/2, linear panels to 16L.
    Hybrid,
    /// Exact periodic kernel; frozen-α forms only.
    Periodic,
}

#[derive(Args)]
struct FormsArgs {
    #[arg(value_enum)]
    kind: FormKind,
    /// SXLB files F_0..F_n.
    #[arg(long = "input")]
    inputs: Vec<PathBuf>,
    #[arg(long = "gen", value_enum)]
    generator: Option<Generator>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    cutoff: usize,
    /// Number of translated functions (inputs are F_0..F_n).
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    size: usize,
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    #[arg(long, value_enum, default_value_t = PvPreset::Hybrid)]
    pv: PvPreset,
    #[arg(long, default_value_t = 4)]
    l0: u32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    shift_u: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    shift_v: f64,
    /// Counterexample: N values.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
    sizes: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    j0: usize,
    /// Probe: Hölder exponents p_0..p_n.
    #[arg(long, value_delimiter = ',')]
    exponents: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ProbeKind::Dense)]
    evaluator: ProbeKind,
    #[arg(long, default_value_t = 16)]
    trials: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeKind {
    Direct,
    Simplex,
    Dense,
    Commutator,
}

#[derive(Subcommand)]
enum DyadicCmd {
    /// Exact identities of the dyadic model form.
    Check {
        #[arg(long, default_value_t = 6)]
        levels: u32,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum OpsCmd {
    /// Norms of the shifted maximal and square functions.
    Shifted {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_delimiter = ',', default_value = "0,4,16,64,256")]
        u: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 32)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 65536)]
        size: usize,
        #[arg(long)]
        period: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k_min: Option<i32>,
        #[arg(long, allow_hyphen_values = true)]
        k_max: Option<i32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Max,
    Square,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long = "config", required = true)]
    configs: Vec<PathBuf>,
    /// Overrides the output directory; with several configs each gets a subdirectory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Run independent configs concurrently.
    #[arg(long)]
    parallel: bool,
}

/// Exit status for a numeric or usage error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Holder(_) => 2,
        Error::Io(_) | Error::Format(_) => 3,
        Error::Budget(_) => 4,
        _ => 5,
    }
}

fn print_json(v: &Value) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn print_csv(t: &Table) -> Result<(), Error> {
    t.write_csv(io::stdout().lock())
}

fn form_json(r: &FormResult) -> Value {
    json!({
        "value_re": r.value.re,
        "value_im": r.value.im,
        "error_est": r.error_estimate,
        "metadata": r.metadata,
    })
}

fn symbol(cmd: SymbolCmd) -> Result<(), Error> {
    match cmd {
        SymbolCmd::Eval { xi, samples, seed } => {
            let closed = mu_closed(&xi)?;
            let q = mu_quadrature(&xi, AlphaQuadrature::MonteCarlo { samples, seed })?;
            print_json(&json!({
                "point": xi,
                "closed": closed,
                "quadrature": q.value,
                "stderr": q.stderr,
                "distance": bad_set_distance(&xi),
            }))
        }
        SymbolCmd::Sectors { n, full } => {
            let e = enumerate_sectors(n)?;
            if full {
                print_json(&serde_json::to_value(&e)?)
            } else {
                print_json(&json!({ "n": e.n, "count": e.count }))
            }
        }
        SymbolCmd::ThresholdCount { m } => {
            print_json(&json!({ "m": m, "count": count_threshold_functions(m)? }))
        }
        SymbolCmd::CheckSmooth { symbol, n, l0, r_min, r_max, samples, seed } => {
            let region = Region::Annulus { n, r_min, r_max, samples, seed };
            let cfg = SmoothConfig::default();
            let report = match symbol {
                SmoothTarget::Mu => check_standard_symbol(|xi| mu_closed(xi).unwrap_or(f64::NAN), &region, &cfg)?,
                SmoothTarget::Partition => {
                    let pieces = decompose_symbol(n, l0)?;
                    check_standard_symbol(|xi| partition_sum(&pieces, xi), &region, &cfg)?
                }
            };
            print_json(&serde_json::to_value(&report)?)
        }
    }
}

fn decay_table(points: Vec<(f64, f64)>, along: DecayAxis, fixed: f64) -> Table {
    let fit = DecayFit::from_samples(points.clone());
    let mut t = Table::new("decay", &["u", "v", "abs_value", "fitted_slope"]);
    for (x, y) in points {
        let (u, v) = match along {
            DecayAxis::U => (x, fixed),
            DecayAxis::V => (fixed, x),
        };
        t.push(vec![u, v, y, fit.fit.slope]);
    }
    t
}

fn decomp(cmd: DecompCmd) -> Result<(), Error> {
    match cmd {
        DecompCmd::Pieces { n, l0 } => print_json(&serde_json::to_value(decompose_symbol(n, l0)?)?),
        DecompCmd::VerifyPartition { n, l0, points, seed } => {
            let mut cfg = ExperimentConfig::new(ExperimentName::Partition);
            cfg.seed = seed;
            cfg.params = json!({ "dims": [n], "points": points, "l0": l0 });
            let report = run_experiment(&cfg)?.report;
            let row = &report.tables[0].rows[0];
            print_json(&json!({
                "n": n,
                "l0": l0,
                "points": points,
                "pieces": row[1],
                "max_error": row[4],
                "case2_min_distance": row[3],
                "pass": report.all_passed(),
            }))
        }
        DecompCmd::RhoDecay { range } => {
            let spec = RhoSpec::default();
            let pts = log_spaced(range.from, range.to, range.samples)
                .into_iter()
                .map(|v| Ok((v, rho_check(range.fixed, v, &spec)?.value.norm())))
                .collect::<Result<Vec<_>, Error>>()?;
            print_csv(&decay_table(pts, DecayAxis::V, range.fixed))
        }
        DecompCmd::MellDecay { range, ell, along } => {
            let spec = MEllSpec::default();
            let pts = log_spaced(range.from, range.to, range.samples)
                .into_iter()
                .map(|x| {
                    let (u, v) = match along {
                        DecayAxis::U => (x, range.fixed),
                        DecayAxis::V => (range.fixed, x),
                    };
                    Ok((x, m_ell_check(ell, u, v, &spec)?.norm()))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            print_csv(&decay_table(pts, along, range.fixed))
        }
    }
}

fn pv_rule(preset: PvPreset, period: f64) -> Result<PvQuadrature, Error> {
    match preset {
        PvPreset::Default => Ok(PvQuadrature::default_for(period)),
        PvPreset::Hybrid => PvQuadrature::new(
            2f64.powi(-20) * period,
            16.0 * period,
            PvLayout::Hybrid { log_count: 64, split: 0.5 * period, linear_panels: 64, per_panel: 8 },
            32,
        ),
        PvPreset::Periodic => PvQuadrature::new(
            2f64.powi(-20) * period,
            0.5 * period,
            PvLayout::Periodic { panels: 16, per_panel: 16 },
            1,
        ),
    }
}

fn load_inputs(a: &FormsArgs, dim: usize) -> Result<Vec<GridFunction>, Error> {
    if !a.inputs.is_empty() {
        if a.generator.is_some() {
            return Err(Error::InvalidArgument("give either --input files or --gen, not both".into()));
        }
        return a
            .inputs
            .iter()
            .map(|p| {
                let file = File::open(p).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display())))?;
                GridFunction::read_from(BufReader::new(file))
            })
            .collect();
    }
    let sizes = vec![a.size; dim];
    (0..=a.n)
        .map(|j| {
            let seed = a.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(j as u64 + 1));
            random_bandlimited(&sizes, a.period, a.cutoff, seed, false)
        })
        .collect()
}

fn forms(a: FormsArgs) -> Result<(), Error> {
    match a.kind {
        FormKind::Counterexample => {
            let rows = counterexample_growth(a.n, a.j0, &a.sizes)?;
            let mut t = Table::new("growth", &["N", "value", "N^(n-1)logN", "ratio"]);
            for r in rows {
                t.push(vec![r.big_n as f64, r.value, r.reference, r.ratio]);
            }
            return print_csv(&t);
        }
        FormKind::Probe => {
            let evaluator = match a.evaluator {
                ProbeKind::Direct => ProbeEvaluator::Direct,
                ProbeKind::Simplex => ProbeEvaluator::Simplex,
                ProbeKind::Dense => ProbeEvaluator::Dense,
                ProbeKind::Commutator => ProbeEvaluator::Commutator,
            };
            let pv = matches!(a.evaluator, ProbeKind::Direct | ProbeKind::Simplex | ProbeKind::Commutator)
                .then(|| pv_rule(a.pv, a.period))
                .transpose()?;
            let spec = ProbeSpec { evaluator, n: a.n, size: a.size, period: a.period, cutoff: a.cutoff, pv };
            let exps = if a.exponents.is_empty() { vec![(a.n + 1) as f64; a.n + 1] } else { a.exponents.clone() };
            let exps = ExponentTuple::new(exps)?;
            let stats = empirical_constant(&spec, &exps, a.trials, a.seed)?;
            return print_json(&serde_json::to_value(&stats)?);
        }
        _ => {}
    }
    let one_d = a.kind == FormKind::Commutator;
    let f = load_inputs(&a, if one_d { 1 } else { a.n })?;
    let pv = pv_rule(a.pv, f.first().map_or(a.period, |g| g.period()))?;
    let n = f.len().saturating_sub(1);
    let r = match a.kind {
        FormKind::Direct => lambda_direct(&f, &pv)?,
        FormKind::Simplex => simplex_direct(&f, &pv)?,
        FormKind::Commutator => commutator_form(&f, &pv)?,
        FormKind::Spectral if f.first().is_some_and(|g| g.dim() == 1) => {
            commutator_spectral(&MuSymbol, &f, &DenseBudget::default_for(n))?
        }
        FormKind::Spectral => lambda_m_dense(&MuSymbol, &f, &DenseBudget::default_for(n))?,
        FormKind::Tensor => {
            let shift = ShiftSpec { u: a.shift_u, v: a.shift_v, alpha_tail: vec![1.0; n.saturating_sub(2)] };
            let pieces = decompose_symbol(n, a.l0)?
                .into_iter()
                .map(|p| p.with_shifts(&shift))
                .collect::<Result<Vec<_>, Error>>()?;
            lambda_m_tensor(&pieces, &f, None, None)?
        }
        FormKind::Counterexample | FormKind::Probe => unreachable!(),
    };
    print_json(&form_json(&r))
}

fn dyadic(cmd: DyadicCmd) -> Result<bool, Error> {
    let DyadicCmd::Check { levels, trials, seed } = cmd;
    let checks = check_identities(levels, trials, seed)?;
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "{:<32} {:>12} {:>10}  status", "identity", "max_error", "tolerance")?;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        writeln!(out, "{:<32} {:>12.3e} {:>10.0e}  {status}", c.name, c.max_error, c.tolerance)?;
    }
    Ok(checks.iter().all(|c| c.pass))
}

fn ops(cmd: OpsCmd) -> Result<(), Error> {
    let OpsCmd::Shifted { kind, u, p, trials, seed, size, period, k_min, k_max } = cmd;
    let scales = match (k_min, k_max) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => return Err(Error::InvalidArgument("give both --k-min and --k-max or neither".into())),
    };
    let spec = NormTableSpec {
        kind: match kind {
            KindArg::Max => ShiftedKind::Max,
            KindArg::Square => ShiftedKind::Square,
        },
        u,
        p,
        trials,
        seed,
        size,
        period: period.unwrap_or(size as f64),
        scales,
    };
    let mut t = Table::new("shifted", &["u", "norm", "norm/log(2+u)"]);
    for r in shifted_norm_table(&spec)? {
        t.push(vec![r.u, r.norm, r.ratio]);
    }
    print_csv(&t)
}

fn run(a: RunArgs) -> Result<bool, Error> {
    let mut configs = a.configs.iter().map(|p| ExperimentConfig::load(p)).collect::<Result<Vec<_>, Error>>()?;
    if let Some(dir) = &a.output_dir {
        let several = configs.len() > 1;
        for cfg in &mut configs {
            cfg.output_dir = Some(if several { dir.join(cfg.experiment.as_str()) } else { dir.clone() });
        }
    }
    let outcomes: Vec<Result<RunOutcome, Error>> = if a.parallel {
        configs.par_iter().map(run_experiment).collect()
    } else {
        configs.iter().map(run_experiment).collect()
    };
    let mut ok = true;
    for outcome in outcomes {
        let RunOutcome { report, wall_seconds } = outcome?;
        let hard = report.hard_failure();
        ok &= !hard;
        let status = if report.all_passed() {
            "PASS"
        } else if hard {
            "FAIL"
        } else {
            "WARN"
        };
        println!("{} {status} ({} checks, {wall_seconds:.1} s)", report.experiment.as_str(), report.checks.len());
        for c in report.failed() {
            let label = if c.kind == CheckKind::Identity { "error" } else { "warning" };
            eprintln!("  {label}: {} = {:e} (want {})", c.name, c.value, c.bound);
        }
    }
    Ok(ok)
}

fn set_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("SIMPLEX_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("SIMPLEX_LAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = set_threads().and_then(|()| match cli.command {
        Command::Symbol(c) => symbol(c).map(|()| true),
        Command::Decomp(c) => decomp(c).map(|()| true),
        Command::Forms(a) => forms(a).map(|()| true),
        Command::Dyadic(c) => dyadic(c),
        Command::Ops(c) => ops(c).map(|()| true),
        Command::Run(a) => run(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("simplex-lab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
