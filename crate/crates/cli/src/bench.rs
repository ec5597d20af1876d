//! Per-iteration wall time of both packing phases across resolutions.

use std::time::Instant;

use bipi::packing::{PackRun, PackingConfig, PackingError};
use bipi::BoundarySet;
use serde::Serialize;

pub const WARMUP: usize = 5;
pub const TIMED: usize = 11;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub dx: f64,
    /// Total particle count.
    pub n: usize,
    pub n_pack_2a: usize,
    pub n_pack_2c: usize,
    /// Median seconds per Step 2a iteration.
    pub sec_2a: f64,
    /// Median seconds per Step 2c iteration.
    pub sec_2c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of `log t` against `log N`.
    pub exponent_2a: f64,
    pub exponent_2c: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn time_steps(run: &mut PackRun) -> f64 {
    for _ in 0..WARMUP {
        run.step();
    }
    let times = (0..TIMED)
        .map(|_| {
            let t = Instant::now();
            run.step();
            t.elapsed().as_secs_f64()
        })
        .collect();
    median(times)
}

/// Times Step 2a from the seeded grid, then freezes and times Step 2c.
pub fn bench_resolution(boundary: &BoundarySet, config: PackingConfig) -> Result<BenchRow, PackingError> {
    let refined = boundary.refined(config.dx);
    let mut run = PackRun::new(&refined, config)?;
    let n_pack_2a = run.packable().len();
    let sec_2a = time_steps(&mut run);
    run.freeze();
    run.enter_2c()?;
    let n_pack_2c = run.packable().len();
    let sec_2c = time_steps(&mut run);
    Ok(BenchRow {
        dx: config.dx,
        n: run.particles().len(),
        n_pack_2a,
        n_pack_2c,
        sec_2a,
        sec_2c,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

pub fn bench(boundary: &BoundarySet, base: PackingConfig, resolutions: &[f64]) -> Result<BenchReport, PackingError> {
    if resolutions.len() < 3 {
        return Err(PackingError::InvalidConfig("a scaling fit needs at least 3 resolutions".into()));
    }
    let h_ratio = base.h / base.dx;
    let k_b_ratio = base.k_b / base.dx;
    let mut rows = Vec::new();
    for &dx in resolutions {
        let cfg = PackingConfig {
            dx,
            h: h_ratio * dx,
            k_b: k_b_ratio * dx,
            ..base
        };
        let row = bench_resolution(boundary, cfg)?;
        log::info!("dx {dx}: N {} 2a {:.3e} s/iter 2c {:.3e} s/iter", row.n, row.sec_2a, row.sec_2c);
        rows.push(row);
    }
    let n: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let exponent_2a = loglog_slope(&n, &rows.iter().map(|r| r.sec_2a).collect::<Vec<_>>());
    let exponent_2c = loglog_slope(&n, &rows.iter().map(|r| r.sec_2c).collect::<Vec<_>>());
    Ok(BenchReport {
        rows,
        exponent_2a,
        exponent_2c,
    })
}
