use std::fmt::Display;
use std::fs;
use std::path::Path;

use qsim_core::bench::{BenchRow, Engine, bench_circuit, bench_dir, ghz_circuit};
use qsim_core::density::MAX_DM_QUBITS;
use qsim_core::ising::{Boundary, EnergyMode, TfimParams, VqeOptions, magnetization_sweep, run_vqe};
use qsim_core::noise::NoiseError;
use qsim_core::optimize::{OptimizeError, OptimizeOptions};
use qsim_core::qasm::parse_qasm_named;
use qsim_core::rng::derive_seed;
use qsim_core::{
    Circuit, DensityMatrix, DeviceNoiseModel, Error, GateKind, StateVector, format_bitstring, sample_distribution,
};

use crate::{BenchArgs, BoundaryArg, EngineArg, RunArgs, TfimArgs, VqeArgs};

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn input(message: impl Display) -> Self {
        CliError { code: 2, message: message.to_string() }
    }

    fn config(message: impl Display) -> Self {
        CliError { code: 3, message: message.to_string() }
    }

    fn internal(message: impl Display) -> Self {
        CliError { code: 4, message: message.to_string() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match &e {
            Error::Qasm(_) | Error::PauliParse { .. } => CliError::input(e),
            Error::Noise(_)
            | Error::QubitLimit { .. }
            | Error::InvalidParameter(_)
            | Error::SizeMismatch { .. }
            | Error::Optimize(OptimizeError::InvalidOptions(_)) => CliError::config(e),
            _ => CliError::internal(e),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// 17 significant digits: round-trips every double.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult {
    let fail = |e: csv::Error| CliError::config(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn load_noise(path: Option<&Path>) -> CliResult<Option<DeviceNoiseModel>> {
    let Some(path) = path else { return Ok(None) };
    let model = DeviceNoiseModel::from_path(path).map_err(|e| match e {
        NoiseError::Io(msg) => CliError::config(format!("{}: {msg}", path.display())),
        other => CliError::config(format!("{}: {other}", path.display())),
    })?;
    for w in model.warnings() {
        eprintln!("qsim: warning: {w}");
    }
    Ok(Some(model))
}

fn boundary(b: BoundaryArg) -> Boundary {
    match b {
        BoundaryArg::Open => Boundary::Open,
        BoundaryArg::Periodic => Boundary::Periodic,
    }
}

/// Output register layout: the classical bits when the circuit measures,
/// all qubits otherwise. Returns the width and `(qubit, clbit)` pairs.
fn output_register(c: &Circuit) -> (usize, Vec<(usize, usize)>) {
    if !c.has_measurements() {
        return (c.num_qubits(), (0..c.num_qubits()).map(|q| (q, q)).collect());
    }
    let mut source = vec![None; c.num_clbits()];
    for op in c.ops().iter().filter(|op| op.kind == GateKind::Measure) {
        let q = op.qubits[0];
        source[op.clbit.unwrap_or(q)] = Some(q);
    }
    let pairs = source.iter().enumerate().filter_map(|(cb, q)| q.map(|q| (q, cb))).collect();
    (c.num_clbits(), pairs)
}

fn marginal(dist: &[f64], width: usize, pairs: &[(usize, usize)]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << width];
    for (i, p) in dist.iter().enumerate() {
        let j = pairs.iter().fold(0, |j, &(q, cb)| j | ((i >> q) & 1) << cb);
        out[j] += p;
    }
    out
}

pub fn run(args: &RunArgs) -> CliResult {
    let text = fs::read_to_string(&args.file).map_err(|e| CliError::input(format!("{}: {e}", args.file.display())))?;
    let name = args.file.file_stem().unwrap_or_default().to_string_lossy();
    let circuit =
        parse_qasm_named(&text, &name).map_err(|e| CliError::input(format!("{}:{e}", args.file.display())))?;
    let noise = load_noise(args.noise.as_deref())?;
    if noise.is_some() && args.engine == EngineArg::Sv {
        return Err(CliError::config("--noise requires --engine dm"));
    }

    let n = circuit.num_qubits();
    let unitary = circuit.without_measurements();
    let dist = match (args.engine, &noise) {
        (EngineArg::Sv, _) => StateVector::run(&unitary)?.probabilities(),
        (EngineArg::Dm, None) => DensityMatrix::run(&unitary)?.probabilities(),
        (EngineArg::Dm, Some(model)) => {
            let rho = DensityMatrix::run_noisy(&unitary, model)?;
            model.readout().truncated(n).apply_dist(&rho.probabilities())?
        }
    };
    let (width, pairs) = output_register(&circuit);
    let dist = marginal(&dist, width, &pairs);

    if args.shots == 0 {
        let rows = dist.iter().enumerate().map(|(i, p)| vec![format_bitstring(i, width), num(*p)]);
        write_csv(&args.out, &["bitstring", "probability"], rows)?;
    } else {
        let hist = sample_distribution(&dist, args.shots, args.seed);
        let rows = hist
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| vec![format_bitstring(i, width), c.to_string()]);
        write_csv(&args.out, &["bitstring", "count"], rows)?;
    }
    println!(
        "{}: {} qubits, {} gates, engine {}{}; wrote {}",
        circuit.name(),
        n,
        circuit.gate_count(),
        if args.engine == EngineArg::Sv { "sv" } else { "dm" },
        if noise.is_some() { " with noise" } else { "" },
        args.out.display()
    );
    Ok(())
}

pub fn tfim(args: &TfimArgs) -> CliResult {
    let params = TfimParams {
        n: args.n,
        coupling: args.coupling,
        field: args.field,
        t_max: args.t_max,
        dt: args.dt,
        steps_per_unit: args.steps_per_unit,
        boundary: boundary(args.boundary),
    };
    params.validate()?;
    let noise = load_noise(args.noise.as_deref())?;
    if noise.is_some() && args.n > MAX_DM_QUBITS {
        return Err(CliError::config(format!(
            "noisy sweep uses the density-matrix engine, limited to {MAX_DM_QUBITS} qubits"
        )));
    }
    let rows = magnetization_sweep(&params, noise.as_ref(), args.shots, args.seed)?;
    let max_gap = rows.iter().map(|r| (r.ideal - r.exact).abs()).fold(0.0, f64::max);
    write_csv(
        &args.out,
        &["t", "exact", "ideal", "noisy"],
        rows.iter().map(|r| vec![format!("{}", r.t), num(r.exact), num(r.ideal), r.noisy.map(num).unwrap_or_default()]),
    )?;
    println!(
        "tfim n={} J={} h={}: {} rows, max |ideal - exact| = {max_gap:.3e}; wrote {}",
        args.n,
        args.coupling,
        args.field,
        rows.len(),
        args.out.display()
    );
    Ok(())
}

pub fn vqe(args: &VqeArgs) -> CliResult {
    let noise = load_noise(args.noise.as_deref())?;
    let mode = match args.shots {
        None => EnergyMode::Exact,
        Some(0) => return Err(CliError::config("--shots must be positive")),
        Some(shots) => EnergyMode::Shots {
            shots,
            seed: derive_seed(args.seed, 1),
        },
    };
    let opts = VqeOptions {
        optimizer: OptimizeOptions {
            max_evals: args.max_evals,
            restarts: args.restarts,
            initial_step: args.step,
            ..OptimizeOptions::default()
        },
        mode,
        boundary: boundary(args.boundary),
    };
    let result = run_vqe(args.n, args.coupling, args.field, args.layers, &opts, noise.as_ref(), args.seed)?;
    write_csv(
        &args.out,
        &["eval", "energy"],
        result.trace.iter().map(|(k, e)| vec![k.to_string(), num(*e)]),
    )?;
    println!("best energy: {}", num(result.best_energy));
    match (result.exact_ground, result.relative_error()) {
        (Some(e0), Some(rel)) => {
            println!("exact E0: {}", num(e0));
            println!("relative error: {:.4}%", rel * 100.0);
        }
        (Some(e0), None) => println!("exact E0: {}", num(e0)),
        _ => println!("exact E0: unavailable (n above dense limit)"),
    }
    println!("evaluations: {}", result.trace.len());
    Ok(())
}

fn parse_range(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.split_once('-')?;
    let (a, b) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
    (1 <= a && a <= b).then_some((a, b))
}

pub fn bench(args: &BenchArgs) -> CliResult {
    if args.repeat == 0 {
        return Err(CliError::config("--repeat must be at least 1"));
    }
    let engine = match args.engine {
        EngineArg::Sv => Engine::Sv,
        EngineArg::Dm => Engine::Dm,
    };
    let rows = match (&args.dir, &args.ghz) {
        (Some(dir), _) => {
            if !dir.is_dir() {
                return Err(CliError::input(format!("{}: not a directory", dir.display())));
            }
            bench_dir(dir, engine, args.repeat).map_err(|e| CliError::config(e))?
        }
        (None, Some(range)) => {
            let (lo, hi) =
                parse_range(range).ok_or_else(|| CliError::config(format!("bad --ghz range {range:?}")))?;
            let mut rows = Vec::new();
            for n in lo..=hi {
                rows.push(BenchRow::Timed(bench_circuit(&ghz_circuit(n), engine, args.repeat)?));
            }
            rows
        }
        (None, None) => return Err(CliError::config("one of --dir or --ghz is required")),
    };

    let header = [
        "name", "qubits", "gates", "engine", "repetitions", "median_ms", "min_ms", "times_ms", "status",
    ];
    let csv_rows = rows.iter().map(|row| match row {
        BenchRow::Timed(r) => vec![
            r.name.clone(),
            r.num_qubits.to_string(),
            r.gate_count.to_string(),
            r.engine.name().to_string(),
            r.repetitions().to_string(),
            format!("{}", r.median_ms()),
            format!("{}", r.min_ms()),
            r.times_ms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";"),
            "ok".to_string(),
        ],
        BenchRow::Skipped { name, reason } => vec![
            name.clone(),
            String::new(),
            String::new(),
            engine.name().to_string(),
            "0".to_string(),
            String::new(),
            String::new(),
            String::new(),
            format!("skipped: {reason}"),
        ],
    });
    write_csv(&args.out, &header, csv_rows)?;
    for row in &rows {
        match row {
            BenchRow::Timed(r) => println!(
                "{:<24} n={:<3} gates={:<6} median {:.3} ms  min {:.3} ms",
                r.name,
                r.num_qubits,
                r.gate_count,
                r.median_ms(),
                r.min_ms()
            ),
            BenchRow::Skipped { name, reason } => println!("{name:<24} skipped: {reason}"),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn register_mapping() {
        let src = "OPENQASM 2.0; qreg q[3]; creg c[2]; x q[2]; measure q[2] -> c[0]; measure q[0] -> c[1];";
        let c = qsim_core::qasm::parse_qasm(src).unwrap();
        let (width, pairs) = output_register(&c);
        assert_eq!(width, 2);
        assert_eq!(pairs, [(2, 0), (0, 1)]);
        let dist = StateVector::run(&c.without_measurements()).unwrap().probabilities();
        assert_eq!(marginal(&dist, width, &pairs), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("18-24"), Some((18, 24)));
        assert_eq!(parse_range("5-3"), None);
        assert_eq!(parse_range("0-3"), None);
        assert_eq!(parse_range("x"), None);
    }

    #[test]
    fn number_format_round_trips() {
        let x = 0.1 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }
}
