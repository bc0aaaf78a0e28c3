//! The `chowla` and `spectrum` experiments.

use anyhow::Result;
use primewalk::arith::{build_prime_set, build_window, log_chowla_series, log_chowla_window_sum, RegimeParams};
use primewalk::divgraph::{DiffOperator, Which};
use primewalk::Error;
use serde::Serialize;

use crate::config::{ExperimentConfig, UsageError};
use crate::formats::csv;
use crate::report::Header;

/// Windows up to this size also get a dense eigen-solve.
pub const DENSE_LIMIT: u64 = 2048;

/// One row of the Chowla series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChowlaRow {
    pub x: u64,
    pub log_chowla_sum: f64,
    /// Windowed sum over `[x/w, x]`, when `w` is configured.
    pub window_sum: Option<f64>,
}

/// `log_chowla_sum` over the configured schedule.
pub fn chowla_rows(cfg: &ExperimentConfig) -> Result<Vec<ChowlaRow>> {
    if let Some(w) = cfg.w {
        if w.is_nan() || w <= std::f64::consts::E || cfg.schedule.iter().any(|&x| w > x as f64) {
            return Err(UsageError(format!("w must satisfy e < w <= x for every x in the schedule, got {w}")).into());
        }
    }
    let sums = log_chowla_series(&cfg.schedule).map_err(|e| UsageError(e.to_string()))?;
    cfg.schedule
        .iter()
        .zip(sums)
        .map(|(&x, s)| {
            let window_sum = cfg.w.map(|w| log_chowla_window_sum(x, w)).transpose()?;
            Ok(ChowlaRow { x, log_chowla_sum: s, window_sum })
        })
        .collect()
}

/// CSV with header comments.
pub fn chowla_csv(cfg: &ExperimentConfig, rows: &[ChowlaRow]) -> String {
    let mut cols = vec!["x", "log_chowla_sum"];
    if cfg.w.is_some() {
        cols.push("log_chowla_window_sum");
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![r.x.to_string(), r.log_chowla_sum.to_string()];
            if let Some(ws) = r.window_sum {
                v.push(ws.to_string());
            }
            v
        })
        .collect();
    Header::new(cfg).csv_comments() + &csv(&cols, &body)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaskStats {
    pub applied: bool,
    pub kept: usize,
    pub excluded_omega: usize,
    pub excluded_yell: usize,
    /// `N e^{−K L log K} + N/√H0`.
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseCheck {
    pub value: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regime {
    pub all_hold: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    #[serde(flatten)]
    pub header: Header,
    pub primes: usize,
    pub script_l: f64,
    /// Largest-magnitude Ritz value of `A` on the (masked) window.
    pub value: f64,
    /// `|value| / √(K L)`.
    pub ratio: f64,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub mask: MaskStats,
    pub dense: Option<DenseCheck>,
    pub regime: Regime,
}

/// Builds the window and mask, then probes the extreme eigenvalue of `A`.
pub fn spectrum(cfg: &ExperimentConfig) -> Result<SpectrumReport> {
    let header = Header::new(cfg);
    let len = cfg.n as usize;
    let pset = match build_prime_set(cfg.h0, cfg.h) {
        Ok(p) => p,
        Err(Error::EmptyPrimeSet { .. }) => {
            return Ok(SpectrumReport {
                header,
                primes: 0,
                script_l: 0.0,
                value: 0.0,
                ratio: 0.0,
                residual: 0.0,
                converged: true,
                iterations: 0,
                mask: MaskStats { applied: false, kept: len, excluded_omega: 0, excluded_yell: 0, predicted: 0.0 },
                dense: (cfg.n <= DENSE_LIMIT).then_some(DenseCheck { value: 0.0, abs_diff: 0.0 }),
                regime: Regime { all_hold: false, warnings: vec!["empty prime set".into()] },
            });
        }
        Err(e) => return Err(UsageError(e.to_string()).into()),
    };
    let window = build_window(cfg.n, &pset).map_err(|e| UsageError(e.to_string()))?;
    let op = DiffOperator::new(&window, &pset);
    let report = if cfg.mask { Some(op.build_mask(cfg.big_k, cfg.ell)?) } else { None };
    let mask = report.as_ref().map(|r| &r.mask);
    let est = op.estimate_extreme_eigenvalue(Which::A, mask, cfg.iters.max(1), cfg.tol, cfg.seed)?;
    let dense = (cfg.n <= DENSE_LIMIT).then(|| {
        let value = op.dense_extreme_eigenvalue(Which::A, mask);
        DenseCheck { value, abs_diff: (value.abs() - est.value.abs()).abs() }
    });
    let regime = RegimeParams { n: cfg.n, k: cfg.k.max(1), big_k: cfg.big_k, ell: cfg.ell.max(1), m: 1 }.check(&pset);
    let scale = (cfg.big_k * pset.script_l()).sqrt();
    Ok(SpectrumReport {
        header,
        primes: pset.len(),
        script_l: pset.script_l(),
        value: est.value,
        ratio: if scale > 0.0 { est.value.abs() / scale } else { f64::INFINITY },
        residual: est.residual,
        converged: est.converged,
        iterations: est.iterations,
        mask: match &report {
            Some(r) => MaskStats {
                applied: true,
                kept: r.mask.kept_count(),
                excluded_omega: r.excluded_omega,
                excluded_yell: r.excluded_yell,
                predicted: r.predicted,
            },
            None => MaskStats { applied: false, kept: len, excluded_omega: 0, excluded_yell: 0, predicted: 0.0 },
        },
        dense,
        regime: Regime {
            all_hold: regime.all_hold(),
            warnings: regime.warnings().into_iter().map(String::from).collect(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_schedule() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("schedule", "1000").unwrap();
        let rows = chowla_rows(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let text = chowla_csv(&cfg, &rows);
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 2);
    }

    #[test]
    fn empty_prime_set_has_zero_radius() {
        let cfg = ExperimentConfig { h0: 24, h: 28, ..ExperimentConfig::default() };
        let r = spectrum(&cfg).unwrap();
        assert_eq!((r.primes, r.value), (0, 0.0));
    }

    #[test]
    fn toy_spectrum_matches_dense() {
        for mask in [false, true] {
            let cfg = ExperimentConfig { mask, ..ExperimentConfig::default() };
            let r = spectrum(&cfg).unwrap();
            let d = r.dense.clone().unwrap();
            assert!(d.abs_diff <= 1e-6, "{r:?}");
        }
    }
}
