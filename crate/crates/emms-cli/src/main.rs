//! `qea` - run circuits through the sparse fused-operator emulator, inspect
//! fusion decisions, emit cost-model tables, benchmark, and cross-check the
//! emulator against its dense reference.
//!
//! Exit codes: 0 on success, 1 when verification finds a mismatch, 2 for
//! usage or circuit-parse errors.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use emms_core::circuit::{build_qft, build_random, parse_file, CircuitFile};
use emms_core::coo::StateVector;
use emms_core::cost::{
    cycle_model, cycle_sweep, memory_sweep, resource_sweep, CycleRow, NBarChoice, ResourceParams,
};
use emms_core::fixedpoint::{self, FixedComplex};
use emms_core::fusion::{fuse, fusion_report, run_circuit_from, PEConfig};
use emms_core::oracle::{dense_run, dense_zero_state};
use emms_core::scalar::{Scalar, ScalarMode};

use output::{emit, Format};

#[derive(Parser)]
#[command(name = "qea", version, about = "Sparse fused-operator quantum circuit emulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a circuit file and print the final amplitudes plus a cycle
    /// estimate for the chosen accelerator configuration.
    Run(RunArgs),
    /// Fuse a circuit and report each group's gates and factor shapes.
    Fuse(FuseArgs),
    /// Evaluate the analytical cost models over parameter sweeps.
    Estimate(EstimateArgs),
    /// Re-run random circuits against the dense reference simulator.
    Verify(VerifyArgs),
    /// Time circuit families and compare modeled compute cycles across
    /// worker counts.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Float,
    Fixed,
}

#[derive(Args)]
struct PEArgs {
    /// Number of processing elements (power of two).
    #[arg(long, default_value_t = 1)]
    pes: u64,
    /// Per-element local-data-memory depth in 128-bit words.
    #[arg(long, default_value_t = 65536)]
    ldm_depth: u64,
    /// High-factor memory depth in 128-bit words.
    #[arg(long, default_value_t = 65536)]
    tgbar_depth: u64,
}

impl PEArgs {
    fn config(&self) -> anyhow::Result<PEConfig> {
        PEConfig::new(self.pes, self.ldm_depth, self.tgbar_depth).map_err(Into::into)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Circuit file (.qc).
    circuit: PathBuf,
    /// Scalar mode for the evolution.
    #[arg(long, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
    #[command(flatten)]
    pe: PEArgs,
    /// Dividing-point override applied to every fused group.
    #[arg(long)]
    nbar: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FuseArgs {
    circuit: PathBuf,
    #[arg(long)]
    nbar: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(subcommand)]
    kind: EstimateKind,
}

#[derive(Subcommand)]
enum EstimateKind {
    /// Operator-storage footprint: full fused operator vs. factored form.
    Memory(MemoryArgs),
    /// Execution-cycle model across qubit counts and configurations.
    Cycles(CyclesArgs),
    /// Block-RAM / DSP usage per configuration.
    Resources(ResourcesArgs),
}

#[derive(Args)]
struct MemoryArgs {
    #[arg(long, default_value_t = 20)]
    n_min: u32,
    #[arg(long, default_value_t = 32)]
    n_max: u32,
    /// Dividing point: "diag" for ceil(n/2), "grid" for all splits, or a
    /// fixed number.
    #[arg(long, default_value = "diag")]
    nbar: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CyclesArgs {
    #[arg(long, default_value_t = 2)]
    n_min: u32,
    #[arg(long, default_value_t = 26)]
    n_max: u32,
    /// Group applications per run.
    #[arg(long, default_value_t = 100)]
    m: u64,
    /// Comma-separated worker counts, paired positionally with
    /// --ldm-depths.
    #[arg(long, value_delimiter = ',', default_values_t = [4u64, 8, 16, 32])]
    pes: Vec<u64>,
    /// Comma-separated local-memory depths, one per --pes entry.
    #[arg(long, value_delimiter = ',', default_values_t = [65536u64, 16384, 4096, 1024])]
    ldm_depths: Vec<u64>,
    #[arg(long, default_value_t = 65536)]
    tgbar_depth: u64,
    #[arg(long, default_value = "diag")]
    nbar: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResourcesArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [4u64, 8, 16, 32, 64])]
    pes: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    ldm_depths: Vec<u64>,
    #[arg(long, default_value_t = 65536)]
    tgbar_depth: u64,
    /// DSP blocks per 32-bit multiplier.
    #[arg(long, default_value_t = 4)]
    dsp_per_multiplier: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest qubit count to sample (at most 10).
    #[arg(long, default_value_t = 6)]
    n_max: u32,
    #[arg(long, default_value_t = 30)]
    depth: u32,
    #[arg(long, default_value_t = 200)]
    trials: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Corrupt one amplitude per run (self-test of the harness).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Qft,
    Random,
}

#[derive(Args)]
struct BenchArgs {
    /// Circuit family to benchmark.
    #[arg(long, value_enum, default_value_t = Suite::Qft)]
    suite: Suite,
    #[arg(long, default_value_t = 2)]
    n_min: u32,
    #[arg(long, default_value_t = 12)]
    n_max: u32,
    /// Worker counts to model (wall-clock uses each in turn).
    #[arg(long, value_delimiter = ',', default_values_t = [16u64])]
    pes: Vec<u64>,
    /// Depth of each random-suite circuit.
    #[arg(long, default_value_t = 50)]
    depth: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Fuse(args) => cmd_fuse(&args),
        Command::Estimate(args) => cmd_estimate(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_circuit(path: &PathBuf) -> anyhow::Result<CircuitFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let mut file =
        parse_file(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        file.circuit.name = stem.to_string();
    }
    Ok(file)
}

#[derive(Serialize)]
struct AmplitudeRow {
    index: u64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct RunReport {
    circuit: String,
    n: u32,
    mode: ScalarMode,
    groups: u64,
    saturated: bool,
    cycle_estimate: Option<CycleRow>,
    amplitudes: Vec<AmplitudeRow>,
}

fn initial_state<S: Scalar>(file: &CircuitFile) -> StateVector<S> {
    if file.initial.is_empty() {
        return StateVector::zero_state(file.circuit.n);
    }
    let mut amps = vec![S::zero(); 1usize << file.circuit.n];
    for a in &file.initial {
        amps[a.index as usize] = S::from_complex(a.re, a.im);
    }
    StateVector::from_amps(file.circuit.n, amps).expect("length fixed by construction")
}

/// Largest state this front end will evolve: two 2^26 amplitude buffers
/// are already 2 GB. The cost models cover larger sizes analytically.
const MAX_RUN_QUBITS: u32 = 26;

fn cmd_run(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let file = load_circuit(&args.circuit)?;
    let cfg = args.pe.config()?;
    let n = file.circuit.n;
    anyhow::ensure!(
        n <= MAX_RUN_QUBITS,
        "{n} qubits needs two {} GiB state buffers; this front end caps runs at {MAX_RUN_QUBITS} qubits (use `qea estimate` for larger sizes)",
        (1u64 << n) * 16 >> 30
    );
    let groups = fuse(&file.circuit).len() as u64;

    fixedpoint::clear_saturation();
    let amplitudes = match args.mode {
        ModeArg::Float => {
            let out = run_circuit_from::<Complex64>(
                &file.circuit,
                &cfg,
                initial_state(&file),
                args.nbar,
            )?;
            out.to_complex_vec()
        }
        ModeArg::Fixed => {
            let out = run_circuit_from::<FixedComplex>(
                &file.circuit,
                &cfg,
                initial_state(&file),
                args.nbar,
            )?;
            out.to_complex_vec()
        }
    };
    let saturated = args.mode == ModeArg::Fixed && fixedpoint::saturation_seen();
    if saturated {
        eprintln!("warning: fixed-point saturation occurred; amplitudes were clamped");
    }

    let n_bar = args.nbar.unwrap_or(n.div_ceil(2)).clamp(1, n);
    let cycle_estimate = cycle_model(n, groups, &cfg, n_bar).ok().map(|r| CycleRow {
        n,
        n_bar,
        m: groups,
        pe_count: cfg.pe_count,
        ldm_depth: cfg.ldm_depth,
        tgbar_depth: cfg.tgbar_depth,
        regime: r.regime,
        c_write: r.c_write,
        c_tp: r.c_tp,
        c_mm: r.c_mm,
        c_read: r.c_read,
        total: r.total,
        io_fraction: r.io_fraction,
    });

    let report = RunReport {
        circuit: file.circuit.name.clone(),
        n,
        mode: match args.mode {
            ModeArg::Float => ScalarMode::Float,
            ModeArg::Fixed => ScalarMode::Fixed,
        },
        groups,
        saturated,
        cycle_estimate,
        amplitudes: amplitudes
            .iter()
            .enumerate()
            .map(|(index, a)| AmplitudeRow {
                index: index as u64,
                re: a.re,
                im: a.im,
            })
            .collect(),
    };
    emit_run(&report, args.format, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn emit_run(report: &RunReport, format: Format, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    match format {
        Format::Json => output::write_out(out, &serde_json::to_string_pretty(report)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.amplitudes {
                w.serialize(row)?;
            }
            output::write_out(out, &String::from_utf8(w.into_inner()?)?)
        }
        Format::Text => {
            let mut s = String::new();
            s.push_str(&format!(
                "circuit {} ({} qubits, {} fused groups, {} mode)\n",
                report.circuit, report.n, report.groups, report.mode
            ));
            for row in &report.amplitudes {
                s.push_str(&format!("{:>8}  {:>24}  {:>24}\n", row.index, row.re, row.im));
            }
            if let Some(c) = &report.cycle_estimate {
                s.push_str(&format!(
                    "cycles: total {} ({} regime, write {} + tp {} + mm {} + read {}, io {:.1}%)\n",
                    c.total,
                    c.regime,
                    c.c_write,
                    c.c_tp,
                    c.c_mm,
                    c.c_read,
                    c.io_fraction * 100.0
                ));
            } else {
                s.push_str("cycles: n outside the model range\n");
            }
            output::write_out(out, &s)
        }
    }
}

fn cmd_fuse(args: &FuseArgs) -> anyhow::Result<ExitCode> {
    let file = load_circuit(&args.circuit)?;
    let report = fusion_report(&file.circuit, args.nbar)?;
    match args.format {
        Format::Json => {
            output::write_out(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
        }
        Format::Csv | Format::Text => {
            #[derive(Serialize)]
            struct Row {
                group: usize,
                n_bar: u32,
                nnz_g_bar: usize,
                nnz_g_low: usize,
                unit_row_ok: bool,
                param_count: u32,
                gates: String,
            }
            let rows: Vec<Row> = report
                .iter()
                .map(|g| Row {
                    group: g.index,
                    n_bar: g.n_bar,
                    nnz_g_bar: g.nnz_g_bar,
                    nnz_g_low: g.nnz_g_low,
                    unit_row_ok: g.unit_row_ok,
                    param_count: g.param_count,
                    gates: g.gates.join("; "),
                })
                .collect();
            emit(&rows, args.format, args.out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_nbar(text: &str) -> anyhow::Result<NBarChoice> {
    match text {
        "diag" => Ok(NBarChoice::Diagonal),
        "grid" => Ok(NBarChoice::Grid),
        other => Ok(NBarChoice::Fixed(other.parse().map_err(|_| {
            anyhow::anyhow!("--nbar must be 'diag', 'grid', or a number, got '{other}'")
        })?)),
    }
}

fn paired_configs(pes: &[u64], ldm_depths: &[u64], tgbar_depth: u64) -> anyhow::Result<Vec<PEConfig>> {
    let depths: Vec<u64> = if ldm_depths.is_empty() {
        vec![65536; pes.len()]
    } else if ldm_depths.len() == 1 {
        vec![ldm_depths[0]; pes.len()]
    } else if ldm_depths.len() == pes.len() {
        ldm_depths.to_vec()
    } else {
        anyhow::bail!(
            "--ldm-depths must list one depth or one per --pes entry ({} vs {})",
            ldm_depths.len(),
            pes.len()
        );
    };
    pes.iter()
        .zip(&depths)
        .map(|(&p, &d)| PEConfig::new(p, d, tgbar_depth).map_err(Into::into))
        .collect()
}

fn cmd_estimate(args: &EstimateArgs) -> anyhow::Result<ExitCode> {
    match &args.kind {
        EstimateKind::Memory(a) => {
            let rows = memory_sweep(a.n_min..=a.n_max, parse_nbar(&a.nbar)?)?;
            emit(&rows, a.format, a.out.as_deref())?;
        }
        EstimateKind::Cycles(a) => {
            let configs = paired_configs(&a.pes, &a.ldm_depths, a.tgbar_depth)?;
            let rows = cycle_sweep(a.n_min..=a.n_max, a.m, &configs, parse_nbar(&a.nbar)?)?;
            emit(&rows, a.format, a.out.as_deref())?;
        }
        EstimateKind::Resources(a) => {
            let configs = paired_configs(&a.pes, &a.ldm_depths, a.tgbar_depth)?;
            let params = ResourceParams {
                dsp_per_multiplier: a.dsp_per_multiplier,
                ..ResourceParams::default()
            };
            let rows = resource_sweep(&configs, &params)?;
            emit(&rows, a.format, a.out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    anyhow::ensure!(args.n_max >= 1 && args.n_max <= 10, "--n-max must be in 1..=10");
    anyhow::ensure!(args.depth >= 1, "--depth must be at least 1");
    let cfg = PEConfig::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let mut max_dev: f64 = 0.0;
    println!("verify: {} trials, n <= {}, depth <= {}, seed {}", args.trials, args.n_max, args.depth, args.seed);
    for trial in 0..args.trials {
        let n = 1 + (rng.next_u64() % u64::from(args.n_max)) as u32;
        let depth = 1 + (rng.next_u64() % u64::from(args.depth)) as u32;
        let circuit_seed = rng.next_u64();
        let circuit = build_random(n, depth, circuit_seed)?;
        let got = emms_core::run_circuit::<Complex64>(&circuit, &cfg)?;
        let mut got = got.to_complex_vec();
        if args.inject_fault {
            got[0] += Complex64::new(1e-6, 0.0);
        }
        let want = dense_run(&circuit, &dense_zero_state(n))?;
        for (k, (g, w)) in got.iter().zip(&want).enumerate() {
            let dev = (g - w).norm();
            max_dev = max_dev.max(dev);
            if dev > 1e-10 {
                println!(
                    "FAIL trial {trial}: amplitude {k} deviates by {dev:e} (n={n}, depth={depth}, seed={circuit_seed})"
                );
                println!("offending circuit:\n{}", emms_core::circuit::print_circuit(&circuit));
                return Ok(ExitCode::from(1));
            }
        }
    }
    println!("PASS: max deviation {max_dev:.3e} over {} trials", args.trials);
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BenchRow {
    suite: String,
    n: u32,
    /// Circuit seed for the random suite, empty for deterministic families.
    seed: Option<u64>,
    gates: usize,
    groups: u64,
    pe_count: u64,
    wall_ms: f64,
    c_tp: u64,
    c_mm: u64,
    compute_cycles: u64,
    baseline_compute_cycles: u64,
    modeled_speedup: f64,
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<ExitCode> {
    anyhow::ensure!(args.n_min >= 2 && args.n_min <= args.n_max, "bad qubit range");
    let mut rows = Vec::new();
    for n in args.n_min..=args.n_max {
        let (circuit, seed) = match args.suite {
            Suite::Qft => (build_qft(n)?, None),
            Suite::Random => {
                let seed = args.seed ^ u64::from(n);
                (build_random(n, args.depth, seed)?, Some(seed))
            }
        };
        let groups = fuse(&circuit).len() as u64;
        let n_bar = n.div_ceil(2);
        for &pes in &args.pes {
            let cfg = PEConfig::new(pes, 1 << 16, 1 << 16)?;
            let start = Instant::now();
            let _ = emms_core::run_circuit::<Complex64>(&circuit, &cfg)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let fast = cycle_model(n, groups, &cfg, n_bar)?;
            let slow = cycle_model(n, groups, &PEConfig::new(1, 1 << 16, 1 << 16)?, n_bar)?;
            let compute = fast.c_tp + fast.c_mm;
            let baseline = slow.c_tp + slow.c_mm;
            rows.push(BenchRow {
                suite: format!("{:?}", args.suite).to_lowercase(),
                n,
                seed,
                gates: circuit.gate_count(),
                groups,
                pe_count: pes,
                wall_ms,
                c_tp: fast.c_tp,
                c_mm: fast.c_mm,
                compute_cycles: compute,
                baseline_compute_cycles: baseline,
                modeled_speedup: baseline as f64 / compute as f64,
            });
        }
    }
    emit(&rows, args.format, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}
