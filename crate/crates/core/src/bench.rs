//! Timing harness for circuit simulation.

use std::path::Path;
use std::time::Instant;

use crate::circuit::Circuit;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::statevector::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Sv,
    Dm,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Sv => "sv",
            Engine::Dm => "dm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub name: String,
    pub num_qubits: usize,
    pub gate_count: usize,
    pub engine: Engine,
    /// Wall time of each timed repetition, in milliseconds.
    pub times_ms: Vec<f64>,
}

impl BenchRecord {
    pub fn repetitions(&self) -> usize {
        self.times_ms.len()
    }

    pub fn min_ms(&self) -> f64 {
        self.times_ms.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn median_ms(&self) -> f64 {
        median(&self.times_ms)
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 }
}

/// One row of a directory benchmark.
#[derive(Debug, Clone, PartialEq)]
pub enum BenchRow {
    Timed(BenchRecord),
    Skipped { name: String, reason: String },
}

fn simulate(circuit: &Circuit, engine: Engine) -> Result<()> {
    match engine {
        Engine::Sv => {
            std::hint::black_box(StateVector::run(&circuit.without_measurements())?);
        }
        Engine::Dm => {
            std::hint::black_box(DensityMatrix::run(circuit)?);
        }
    }
    Ok(())
}

/// Runs one untimed warmup and then `repeat` timed simulations of
/// `circuit` (measurements are ignored).
pub fn bench_circuit(circuit: &Circuit, engine: Engine, repeat: usize) -> Result<BenchRecord> {
    if repeat == 0 {
        return Err(Error::InvalidParameter("repeat must be at least 1".into()));
    }
    simulate(circuit, engine)?;
    let mut times_ms = Vec::with_capacity(repeat);
    for _ in 0..repeat {
        let start = Instant::now();
        simulate(circuit, engine)?;
        // clamp so a sub-resolution run still reports a positive time
        times_ms.push((start.elapsed().as_secs_f64() * 1e3).max(1e-6));
    }
    Ok(BenchRecord {
        name: circuit.name().to_string(),
        num_qubits: circuit.num_qubits(),
        gate_count: circuit.gate_count(),
        engine,
        times_ms,
    })
}

/// Benchmarks every `.qasm` file in `dir`, sorted by file name. Parse or
/// simulation failures become skipped rows. Errors only when the directory
/// cannot be read or holds no `.qasm` files.
pub fn bench_dir(dir: &Path, engine: Engine, repeat: usize) -> Result<Vec<BenchRow>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::InvalidParameter(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidParameter(format!("no .qasm files in {}", dir.display())));
    }
    let mut rows = Vec::with_capacity(files.len());
    for path in files {
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let outcome = std::fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|text| crate::qasm::parse_qasm_named(&text, &name).map_err(|e| e.to_string()))
            .and_then(|c| bench_circuit(&c, engine, repeat).map_err(|e| e.to_string()));
        rows.push(match outcome {
            Ok(r) => BenchRow::Timed(r),
            Err(reason) => BenchRow::Skipped { name, reason },
        });
    }
    Ok(rows)
}

/// `H(0)` then a CX chain: prepares `(|0..0> + |1..1>)/sqrt(2)`.
pub fn ghz_circuit(n: usize) -> Circuit {
    let mut c = Circuit::new(n, format!("ghz_{n}"));
    c.h(0).expect("n >= 1");
    for q in 0..n - 1 {
        c.cx(q, q + 1).expect("in range");
    }
    c
}
