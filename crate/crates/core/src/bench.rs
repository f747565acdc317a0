//! Scaling measurements over synthetic process specs.
//!
//! Each grid point `(l, n)` uses [`ProcessSpec::synthetic`]: `l` chains of
//! `n` signatures. Timings are wall-clock milliseconds; the prove time is the
//! median over the configured repetitions.

use std::io::{Read, Write};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{self, prove, setup, verify_proof, PublicInputs, RelationParams, Witness};
use crate::error::{Error, Result};
use crate::sample::synthetic_chains;
use crate::spec::ProcessSpec;

pub const CSV_HEADER: &str = "l,n,total_sigs,constraints,compile_ms,setup_ms,prove_ms,peak_mem_mb,status";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub grid: Vec<(usize, usize)>,
    /// At least one.
    pub repetitions: usize,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub seed: u64,
    /// When false only constraint counts are measured.
    pub prove: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            grid: vec![(1, 1), (2, 1), (2, 2), (4, 2), (4, 4)],
            repetitions: 3,
            threads: None,
            seed: 1,
            prove: true,
        }
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub l: usize,
    pub n: usize,
    pub total_sigs: usize,
    pub constraints: usize,
    pub compile_ms: f64,
    pub setup_ms: f64,
    pub prove_ms: f64,
    pub peak_mem_mb: f64,
    pub status: String,
}

/// Prove-time samples behind a row's median. Kept out of the CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProveSpread {
    pub l: usize,
    pub n: usize,
    pub samples_ms: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub spread: Vec<ProveSpread>,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

/// Peak resident set size of this process in MiB, where the platform reports it.
pub fn peak_memory_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

/// Measures one grid point.
pub fn run_point(l: usize, n: usize, cfg: &BenchConfig) -> Result<(BenchRow, ProveSpread)> {
    let spec = ProcessSpec::synthetic(l, n)?;
    let params = RelationParams::from_spec(&spec);

    let t = Instant::now();
    let constraints = circuit::constraint_count(&params)?;
    let compile_ms = ms(t);

    let mut row = BenchRow {
        l,
        n,
        total_sigs: l * n,
        constraints,
        compile_ms,
        setup_ms: 0.0,
        prove_ms: 0.0,
        peak_mem_mb: 0.0,
        status: "ok".into(),
    };
    let mut spread = ProveSpread { l, n, samples_ms: Vec::new() };

    if cfg.prove {
        let (chains, rpk) = synthetic_chains(&spec, cfg.seed)?;
        let public = PublicInputs::new(rpk);
        let witness = Witness::new(chains);
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);

        let t = Instant::now();
        let (pk, vk) = setup(&params, &mut rng)?;
        row.setup_ms = ms(t);

        for _ in 0..cfg.repetitions.max(1) {
            let t = Instant::now();
            let proof = prove(&pk, &public, &witness, &mut rng)?;
            spread.samples_ms.push(ms(t));
            if !verify_proof(&vk, &public, &proof) {
                row.status = "verify-failed".into();
            }
        }
        row.prove_ms = median(&spread.samples_ms).unwrap_or(0.0);
    }
    row.peak_mem_mb = peak_memory_mb().unwrap_or(0.0);
    Ok((row, spread))
}

/// Runs every grid point, in a dedicated pool when `threads` is set. Rows
/// come back sorted by total signatures. A point that fails is marked
/// `skipped` and the run continues.
pub fn run_scaling(cfg: &BenchConfig) -> Result<BenchReport> {
    let run = || {
        let mut report = BenchReport { rows: Vec::new(), spread: Vec::new() };
        for &(l, n) in &cfg.grid {
            match run_point(l, n, cfg) {
                Ok((row, spread)) => {
                    report.rows.push(row);
                    report.spread.push(spread);
                }
                Err(e) => report.rows.push(BenchRow {
                    l,
                    n,
                    total_sigs: l * n,
                    constraints: 0,
                    compile_ms: 0.0,
                    setup_ms: 0.0,
                    prove_ms: 0.0,
                    peak_mem_mb: peak_memory_mb().unwrap_or(0.0),
                    status: format!("skipped: {e}"),
                }),
            }
        }
        report.rows.sort_by_key(|r| r.total_sigs);
        report
    };
    match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::malformed("thread pool", e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.iter().collect::<Vec<_>>().join(",");
    if headers != CSV_HEADER {
        return Err(Error::malformed("bench csv", format!("unexpected header `{headers}`")));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn to_markdown(rows: &[BenchRow]) -> String {
    let mut s = String::from(
        "| l | n | total_sigs | constraints | compile_ms | setup_ms | prove_ms | peak_mem_mb | status |\n\
         |---|---|---|---|---|---|---|---|---|\n",
    );
    for r in rows {
        s.push_str(&format!(
            "| {} | {} | {} | {} | {:.1} | {:.1} | {:.1} | {:.1} | {} |\n",
            r.l, r.n, r.total_sigs, r.constraints, r.compile_ms, r.setup_ms, r.prove_ms, r.peak_mem_mb, r.status
        ));
    }
    s
}

/// Ordinary least squares `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let k = xs.len();
    if k < 2 || k != ys.len() {
        return None;
    }
    let mean_x = xs.iter().sum::<f64>() / k as f64;
    let mean_y = ys.iter().sum::<f64>() / k as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(LinearFit { slope, intercept, r_squared })
}

/// Fits a column against `total_sigs` over rows with status `ok`.
pub fn fit_against_signatures(rows: &[BenchRow], column: impl Fn(&BenchRow) -> f64) -> Option<LinearFit> {
    let ok: Vec<_> = rows.iter().filter(|r| r.status == "ok").collect();
    let xs: Vec<f64> = ok.iter().map(|r| r.total_sigs as f64).collect();
    let ys: Vec<f64> = ok.iter().map(|r| column(r)).collect();
    linear_fit(&xs, &ys)
}
