//! The seven-segment grid: every `(d, pf, seed)` cell is an independent
//! train/test run, executed on a rayon pool.

use csdd_core::circuit::Circuit;
use csdd_core::experiment::{run_cell, CellConfig, CellMetrics};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::report::CellSummary;

#[derive(Clone, Debug)]
pub struct Grid {
    pub train_sizes: Vec<usize>,
    pub failure_rates: Vec<f64>,
    pub seeds: usize,
    pub test_size: usize,
    pub ess: f64,
    /// Master seed; run `i` draws from stream `i` of a ChaCha8 generator
    /// seeded with it.
    pub seed: u64,
}

/// One CSV row. Absent split accuracies are written as empty cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRow {
    pub d: usize,
    pub pf: f64,
    pub seed: usize,
    pub accuracy: f64,
    pub determinacy: f64,
    pub det_acc: Option<f64>,
    pub indet_acc: Option<f64>,
    pub u80: f64,
    pub joint_accuracy: f64,
    pub joint_determinacy: f64,
    pub joint_det_acc: Option<f64>,
    pub joint_indet_acc: Option<f64>,
}

impl CellRow {
    fn new(d: usize, pf: f64, seed: usize, m: CellMetrics) -> CellRow {
        CellRow {
            d,
            pf,
            seed,
            accuracy: m.accuracy,
            determinacy: m.determinacy,
            det_acc: m.det_acc,
            indet_acc: m.indet_acc,
            u80: m.u80,
            joint_accuracy: m.joint_accuracy,
            joint_determinacy: m.joint_determinacy,
            joint_det_acc: m.joint_det_acc,
            joint_indet_acc: m.joint_indet_acc,
        }
    }
}

/// Worker count: `CSDD_THREADS` when set to a positive integer, otherwise
/// rayon's default.
pub fn thread_count() -> usize {
    std::env::var("CSDD_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// The generator for run `seed` of the grid. Cells that share a run index
/// share the stream, so they differ only in `d` and `pf`.
pub fn cell_rng(master: u64, seed: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(seed as u64);
    rng
}

/// Rows in `(d, pf, seed)` order, independent of the thread count.
pub fn run_grid(circuit: &Circuit, grid: &Grid, threads: usize) -> anyhow::Result<Vec<CellRow>> {
    let mut cells = Vec::new();
    for &d in &grid.train_sizes {
        for &pf in &grid.failure_rates {
            for s in 0..grid.seeds {
                cells.push((d, pf, s));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    pool.install(|| {
        cells
            .par_iter()
            .map(|&(d, pf, s)| {
                let cfg = CellConfig {
                    train_size: d,
                    test_size: grid.test_size,
                    pf,
                    ess: grid.ess,
                };
                let m = run_cell(circuit, &cfg, &mut cell_rng(grid.seed, s))?;
                Ok(CellRow::new(d, pf, s, m))
            })
            .collect()
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

fn mean_some(xs: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = xs.flatten().collect();
    (!v.is_empty()).then(|| mean(v.into_iter()))
}

/// Averages over seeds for each `(d, pf)`. Split accuracies average the
/// runs where the split was non-empty.
pub fn summarize(rows: &[CellRow]) -> Vec<CellSummary> {
    let mut keys: Vec<(usize, f64)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.d, r.pf)) {
            keys.push((r.d, r.pf));
        }
    }
    keys.into_iter()
        .map(|(d, pf)| {
            let rs: Vec<&CellRow> = rows.iter().filter(|r| r.d == d && r.pf == pf).collect();
            CellSummary {
                d,
                pf,
                runs: rs.len(),
                accuracy: mean(rs.iter().map(|r| r.accuracy)),
                determinacy: mean(rs.iter().map(|r| r.determinacy)),
                det_acc: mean_some(rs.iter().map(|r| r.det_acc)),
                indet_acc: mean_some(rs.iter().map(|r| r.indet_acc)),
                u80: mean(rs.iter().map(|r| r.u80)),
                joint_accuracy: mean(rs.iter().map(|r| r.joint_accuracy)),
                joint_determinacy: mean(rs.iter().map(|r| r.joint_determinacy)),
            }
        })
        .collect()
}

pub fn write_csv(rows: &[CellRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
