//! Runtime scaling of the decision pipeline, emitted as CSV.

use std::io;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::generate::{generate, split_seed, InstanceSpec};
use crate::inverse::{decide, DecideOptions, StepTimings};

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub kmin: usize,
    /// Per-instance limit; runs that exceed it are counted, not timed.
    pub timeout: Option<Duration>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n_values: (5..=30).collect(),
            trials: 10,
            seed: 0,
            kmin: 1,
            timeout: Some(Duration::from_secs(60)),
        }
    }
}

/// Instance size rule: `|φ| = 2n`, capped at `2^n`.
pub fn models_for(n: usize) -> usize {
    if n >= 63 {
        2 * n
    } else {
        (2 * n).min(1 << n)
    }
}

/// One CSV row. Times are medians over the completed trials, in
/// microseconds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub models: usize,
    pub trials: usize,
    pub completed: usize,
    pub timeouts: usize,
    pub step1_closure_us: u128,
    pub step2_cover_us: u128,
    pub step3_prefix_closures_us: u128,
    pub total_us: u128,
    pub max_total_us: u128,
}

fn median(mut xs: Vec<u128>) -> u128 {
    if xs.is_empty() {
        return 0;
    }
    xs.sort_unstable();
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2
    }
}

/// Times `decide` on `trials` random instances per `n`. Trial `t` at size
/// `n` uses seed `split_seed(seed, n * trials + t)`.
pub fn bench_scaling(config: &BenchConfig) -> Result<Vec<ScalingRow>> {
    let options = DecideOptions {
        kmin: config.kmin,
        jobs: 1,
        timeout: config.timeout,
    };
    let mut rows = Vec::with_capacity(config.n_values.len());
    for &n in &config.n_values {
        let models = models_for(n);
        let mut timings: Vec<(StepTimings, Duration)> = Vec::with_capacity(config.trials);
        let mut timeouts = 0;
        for t in 0..config.trials {
            let seed = split_seed(config.seed, (n * config.trials + t) as u64);
            let phi = generate(&InstanceSpec::random_subset(n, models, seed))?;
            let started = Instant::now();
            match decide(&phi, &options) {
                Ok(report) => {
                    let wall = started.elapsed();
                    if config.timeout.is_some_and(|limit| wall > limit) {
                        timeouts += 1;
                    } else {
                        timings.push((report.timings, wall));
                    }
                }
                Err(Error::Timeout { .. }) => timeouts += 1,
                Err(e) => return Err(e),
            }
        }
        let column = |f: &dyn Fn(&(StepTimings, Duration)) -> Duration| {
            median(timings.iter().map(|t| f(t).as_micros()).collect())
        };
        rows.push(ScalingRow {
            n,
            models,
            trials: config.trials,
            completed: timings.len(),
            timeouts,
            step1_closure_us: column(&|t| t.0.closed_candidate),
            step2_cover_us: column(&|t| t.0.cover),
            step3_prefix_closures_us: column(&|t| t.0.prefix_closures),
            total_us: column(&|t| t.1),
            max_total_us: timings.iter().map(|t| t.1.as_micros()).max().unwrap_or(0),
        });
    }
    Ok(rows)
}

pub fn write_csv<W: io::Write>(rows: &[ScalingRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    if rows.is_empty() {
        writer
            .write_record([
                "n",
                "models",
                "trials",
                "completed",
                "timeouts",
                "step1_closure_us",
                "step2_cover_us",
                "step3_prefix_closures_us",
                "total_us",
                "max_total_us",
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn to_csv(rows: &[ScalingRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_n_values_give_header_only() {
        let rows = bench_scaling(&BenchConfig {
            n_values: vec![],
            ..Default::default()
        })
        .unwrap();
        assert!(rows.is_empty());
        assert_eq!(to_csv(&rows).lines().count(), 1);
    }

    #[test]
    fn small_sizes_complete() {
        let rows = bench_scaling(&BenchConfig {
            n_values: vec![3, 5, 8],
            trials: 3,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].models, 6);
        assert!(rows.iter().all(|r| r.completed == 3 && r.timeouts == 0));
        let csv = to_csv(&rows);
        assert!(csv.starts_with("n,models,trials,completed,timeouts,step1_closure_us"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3, 1, 2]), 2);
        assert_eq!(median(vec![4, 1, 2, 3]), 2);
        assert_eq!(median(vec![]), 0);
    }
}
