//! Synthesis front end and the benchmark harness.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use qutrit_core::exhaustive::{synth_exhaustive_with, BudgetSplit, ExhaustiveOptions, HornMode};
use qutrit_core::householder::{synth_householder_with, HouseholderOptions, DEFAULT_CONTRACTION};
use qutrit_core::linalg3::{cmatrix_distance, generators, is_unitary, rz_target, CMatrix3};
use qutrit_core::synthesis::{decompose, GateWord};
use qutrit_core::{Complex64, Error as CoreError, RingMatrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::fit::{fit_records, fit_runtime, FitResult, RuntimeFit};
use crate::records::BenchRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Exhaustive,
    Householder,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::Householder => "householder",
        })
    }
}

impl FromStr for Algorithm {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Algorithm::Exhaustive),
            "householder" => Ok(Algorithm::Householder),
            _ => Err(CliError::input(format!("unknown algorithm '{s}'"))),
        }
    }
}

/// Gate being approximated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetGate {
    /// `R^Z_{(0,1)}(θ) = diag(e^{-iθ/2}, e^{iθ/2}, 1)`.
    #[default]
    Rz,
    /// `T₃ = diag(1, ξ, ξ⁻¹)`, `ξ = e^{2πi/9}`. Experimental.
    T3,
}

/// `T₃ = X·R^Z(T3_THETA)·X⁻¹` exactly, with `X` the cyclic shift.
pub const T3_THETA: f64 = -4.0 * std::f64::consts::PI / 9.0;

pub fn t3_target() -> CMatrix3 {
    let xi = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 9.0);
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    [[o, z, z], [z, xi, z], [z, z, xi.conj()]]
}

/// Per-call synthesis settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthOptions {
    pub algorithm: Algorithm,
    pub contraction: f64,
    pub best_at_f: bool,
    pub budget: BudgetSplit,
    pub horn: HornMode,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Householder,
            contraction: DEFAULT_CONTRACTION,
            best_at_f: false,
            budget: BudgetSplit::Symmetric,
            horn: HornMode::Inclusive,
            workers: None,
        }
    }
}

/// A checked synthesis result.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthesis {
    pub matrix: RingMatrix3,
    /// Denominator exponent of the search: the reflection vector's for
    /// Householder, the matrix's for exhaustive.
    pub f: u32,
    pub distance: f64,
    pub word: GateWord,
    pub wall_time_ms: f64,
}

fn raw_synth(theta: f64, eps: f64, opts: &SynthOptions) -> Result<(RingMatrix3, u32)> {
    match opts.algorithm {
        Algorithm::Exhaustive => {
            let o = ExhaustiveOptions {
                budget: opts.budget,
                horn: opts.horn,
                workers: opts.workers,
                ..Default::default()
            };
            let v = synth_exhaustive_with(theta, eps, &o)?;
            let f = v.fexp();
            Ok((v, f))
        }
        Algorithm::Householder => {
            let o = HouseholderOptions {
                contraction: opts.contraction,
                best_at_f: opts.best_at_f,
                workers: opts.workers,
                ..Default::default()
            };
            let s = synth_householder_with(theta, eps, &o)?;
            Ok((s.matrix, s.vector.fexp))
        }
    }
}

fn breach(msg: String) -> CliError {
    CliError::Core(CoreError::InvariantBreach(msg))
}

/// Synthesizes `gate` (at angle `theta` for `R^Z`) within `eps`, then
/// checks unitarity and the distance and decomposes the result.
pub fn synthesize(gate: TargetGate, theta: f64, eps: f64, opts: &SynthOptions) -> Result<Synthesis> {
    let start = Instant::now();
    let (matrix, f, target) = match gate {
        TargetGate::Rz => {
            let (v, f) = raw_synth(theta, eps, opts)?;
            (v, f, rz_target(theta))
        }
        TargetGate::T3 => {
            let (v, f) = raw_synth(T3_THETA, eps, opts)?;
            let g = generators();
            let m = g.x.checked_mul(&v)?.checked_mul(&g.x_pow(2))?;
            (m, f, t3_target())
        }
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    if !is_unitary(&matrix) {
        return Err(breach("synthesized matrix is not unitary".into()));
    }
    let distance = cmatrix_distance(&matrix.to_complex(), &target);
    if !(distance <= eps) {
        return Err(breach(format!("distance {distance} exceeds eps {eps}")));
    }
    let word = decompose(&matrix)?;
    Ok(Synthesis {
        matrix,
        f,
        distance,
        word,
        wall_time_ms,
    })
}

/// Harness settings.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub angles: usize,
    pub eps_list: Vec<f64>,
    pub seed: u64,
    pub gate: TargetGate,
    pub synth: SynthOptions,
    /// When false, `wall_time_ms` is written as 0 so that reruns are
    /// byte-identical.
    pub record_timing: bool,
}

/// Records in `(ε, angle)` order plus the fits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub algorithm: Algorithm,
    pub gate: TargetGate,
    pub angles: Vec<f64>,
    pub records: Vec<BenchRecord>,
    /// Absent with fewer than two tolerances.
    pub fit: Option<FitResult>,
    pub runtime: Option<RuntimeFit>,
}

/// `n` angles drawn uniformly from the open interval `(-π/2, π/2)`.
pub fn sample_angles(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
        if a > -FRAC_PI_2 {
            out.push(a);
        }
    }
    out
}

/// One benchmark sample.
pub fn synth_record(gate: TargetGate, theta: f64, eps: f64, opts: &SynthOptions) -> Result<BenchRecord> {
    let s = synthesize(gate, theta, eps, opts)?;
    Ok(BenchRecord {
        theta: if gate == TargetGate::T3 { T3_THETA } else { theta },
        eps,
        algorithm: opts.algorithm,
        f: s.f,
        n_r: s.word.n_r,
        distance: s.distance,
        wall_time_ms: s.wall_time_ms,
    })
}

/// Runs every `(ε, θ)` task in parallel and gathers them in input order.
/// The `T₃` run has a single task per `ε`.
pub fn run_bench(cfg: &BenchConfig, with_runtime_fit: bool) -> Result<BenchReport> {
    if cfg.eps_list.is_empty() {
        return Err(CliError::input("empty eps list"));
    }
    let angles = match cfg.gate {
        TargetGate::Rz => sample_angles(cfg.angles, cfg.seed),
        TargetGate::T3 => vec![T3_THETA],
    };
    let tasks: Vec<(f64, f64)> = cfg
        .eps_list
        .iter()
        .flat_map(|&e| angles.iter().map(move |&a| (a, e)))
        .collect();
    let inner = SynthOptions {
        workers: None,
        ..cfg.synth.clone()
    };
    let run = || -> Result<Vec<BenchRecord>> {
        tasks
            .par_iter()
            .map(|&(a, e)| synth_record(cfg.gate, a, e, &inner))
            .collect()
    };
    let mut records = match cfg.synth.workers {
        None => run()?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::input(e.to_string()))?
            .install(run)?,
    };
    if !cfg.record_timing {
        records.iter_mut().for_each(|r| r.wall_time_ms = 0.0);
    }
    let distinct = {
        let mut e: Vec<u64> = cfg.eps_list.iter().map(|x| x.to_bits()).collect();
        e.sort_unstable();
        e.dedup();
        e.len()
    };
    let fit = if distinct >= 2 { Some(fit_records(&records)?) } else { None };
    let runtime = if with_runtime_fit && cfg.record_timing && distinct >= 2 {
        fit_runtime(&records).ok()
    } else {
        None
    };
    Ok(BenchReport {
        seed: cfg.seed,
        algorithm: cfg.synth.algorithm,
        gate: cfg.gate,
        angles,
        records,
        fit,
        runtime,
    })
}
