//! Step norms `‖·‖_k`, weighted norms `|·|_δ`, the constant linking them and
//! a coefficient-growth diagnostic.
//!
//! Every evaluation is a weighted supremum `max_α [log ‖x_α‖ + w(|α|)]` in
//! the log domain, with argmax ties broken by the lexicographically smallest
//! `α` and then the lowest grid index.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::germspace::TruncatedElement;
use crate::logmag::LogMagnitude;
use crate::multiindex::MultiIndex;

/// Largest `k` listed in growth reports.
pub const GROWTH_K_MAX: u32 = 20;

/// Slack on `rate ≤ ln k` in the growth flags, absorbing round-off in rates
/// that are exactly `ln k`.
pub const GROWTH_TOLERANCE: f64 = 1e-9;

/// Where a weight sequence came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightProvenance {
    pub eps: Vec<f64>,
    pub jumps: Vec<u32>,
    pub margin: u32,
}

/// Positive weights `δ_0, …, δ_N`, held as logarithms.
///
/// `δ_0` is carried for indexing only: the order-0 term of `|·|_δ` always
/// has weight `δ_0^0 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    logs: Vec<f64>,
    provenance: Option<WeightProvenance>,
}

impl WeightSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidWeight { index, value });
        }
        Ok(Self {
            logs: values.iter().map(|v| v.ln()).collect(),
            provenance: None,
        })
    }

    pub fn from_logs(logs: Vec<f64>) -> Result<Self> {
        if let Some((index, &l)) = logs.iter().enumerate().find(|(_, l)| !l.is_finite()) {
            return Err(Error::InvalidWeight {
                index,
                value: l.exp(),
            });
        }
        Ok(Self {
            logs,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: WeightProvenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn provenance(&self) -> Option<&WeightProvenance> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn value(&self, n: usize) -> f64 {
        self.logs[n].exp()
    }

    pub fn log_value(&self, n: usize) -> f64 {
        self.logs[n]
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    fn require(&self, order_cap: u32) -> Result<()> {
        let needed = order_cap as usize + 1;
        if self.logs.len() < needed {
            return Err(Error::WeightTooShort {
                len: self.logs.len(),
                needed,
            });
        }
        Ok(())
    }
}

/// Value and location of a weighted supremum.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub value: LogMagnitude,
    pub argmax_alpha: MultiIndex,
    /// Grid index of the maximizing point (germ mode only).
    pub argmax_point: Option<usize>,
    /// Heuristic per-`k` guess of step membership; empty unless filled in
    /// from a [`GrowthReport`].
    pub heuristic_finite: BTreeMap<u32, bool>,
}

impl Serialize for NormReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            log_value: Option<f64>,
            magnitude: Option<f64>,
            argmax_alpha: &'a MultiIndex,
            argmax_point: Option<usize>,
            heuristic_finite: &'a BTreeMap<u32, bool>,
        }
        View {
            log_value: self.value.into(),
            magnitude: self.value.finite_magnitude(),
            argmax_alpha: &self.argmax_alpha,
            argmax_point: self.argmax_point,
            heuristic_finite: &self.heuristic_finite,
        }
        .serialize(serializer)
    }
}

/// `max_α [log ‖x_α‖ + log_weight(|α|)]` with deterministic argmax.
fn weighted_sup(e: &TruncatedElement, log_weight: impl Fn(u32) -> f64) -> NormReport {
    let layout = e.layout();
    let (lo, hi) = e.support();
    let mut best: Option<(f64, usize, usize)> = None;
    for n in lo..hi {
        let w = log_weight(n);
        for pos in layout.shell_positions(n, n + 1) {
            let (sup, j) = e.payload_sup_at(pos);
            if sup.is_zero() {
                continue;
            }
            let c = sup.log_value() + w;
            let replace = match best {
                None => true,
                Some((v, p, _)) => c > v || (c == v && layout.indices()[pos] < layout.indices()[p]),
            };
            if replace {
                best = Some((c, pos, j));
            }
        }
    }
    match best {
        Some((v, pos, j)) => NormReport {
            value: LogMagnitude::from_log(v),
            argmax_alpha: layout.indices()[pos].clone(),
            argmax_point: e.is_germ().then_some(j),
            heuristic_finite: BTreeMap::new(),
        },
        // Every contribution is zero; the smallest index attains it.
        None => NormReport {
            value: LogMagnitude::ZERO,
            argmax_alpha: MultiIndex::zeros(e.dim()),
            argmax_point: e.is_germ().then_some(0),
            heuristic_finite: BTreeMap::new(),
        },
    }
}

/// `‖x‖_k = max_{|α| ≤ N} ‖x_α‖ k^{-|α|}`.
///
/// Panics if `k == 0`.
pub fn norm_k(e: &TruncatedElement, k: u32) -> NormReport {
    assert!(k >= 1, "step index k must be positive");
    let ln_k = f64::from(k).ln();
    weighted_sup(e, |n| -f64::from(n) * ln_k)
}

/// `|x|_δ = max_{|α| ≤ N} ‖x_α‖ δ_{|α|}^{|α|}`, with weight 1 at `|α| = 0`.
pub fn seminorm_delta(e: &TruncatedElement, delta: &WeightSequence) -> Result<NormReport> {
    delta.require(e.order_cap())?;
    Ok(weighted_sup(e, |n| {
        if n == 0 {
            0.0
        } else {
            f64::from(n) * delta.log_value(n as usize)
        }
    }))
}

/// `max_{0 ≤ n ≤ N} (k δ_n)^n`, so that `|x|_δ ≤ C ‖x‖_k` on truncations of
/// order `N`.
pub fn continuity_constant(delta: &WeightSequence, k: u32, order_cap: u32) -> Result<LogMagnitude> {
    assert!(k >= 1, "step index k must be positive");
    delta.require(order_cap)?;
    let ln_k = f64::from(k).ln();
    let max = (1..=order_cap)
        .map(|n| f64::from(n) * (ln_k + delta.log_value(n as usize)))
        .fold(0.0, f64::max);
    Ok(LogMagnitude::from_log(max))
}

/// Per-order growth rates and a heuristic guess at step membership.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub window: u32,
    /// `(n, s_n)` for `1 ≤ n ≤ N`, `s_n = log(max_{|α|=n} ‖x_α‖) / n`;
    /// `-∞` (serialized as null) for an all-zero shell.
    pub rates: Vec<(u32, f64)>,
    /// `max s_n` over the last `window` orders.
    pub estimate: f64,
    /// Least-squares limit `L` of `s_n ≈ L + c/n` over the window.
    pub limit_rate: f64,
    /// `limit_rate ≤ ln k` for `k = 1..=GROWTH_K_MAX`. A guess only: no
    /// truncation can decide membership in a step space.
    pub heuristic_finite: BTreeMap<u32, bool>,
    pub heuristic: bool,
}

/// Estimate the exponential growth rate of the coefficients.
///
/// `s_n = log‖x_n‖ / n` tends to `log k*` for an element whose coefficients
/// behave like `C k*^n`; the `1/n` term of the fit absorbs the constant `C`.
pub fn classify_growth(e: &TruncatedElement, window: u32) -> Result<GrowthReport> {
    let cap = e.order_cap();
    if window == 0 || window > cap {
        return Err(Error::InvalidWindow {
            window,
            order_cap: cap,
        });
    }
    let rates: Vec<(u32, f64)> = (1..=cap)
        .map(|n| (n, e.shell_sup(n).log_value() / f64::from(n)))
        .collect();
    let tail = &rates[(cap - window) as usize..];
    let estimate = tail
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let limit_rate = fit_limit(tail).unwrap_or(estimate);
    let heuristic_finite = (1..=GROWTH_K_MAX)
        .map(|k| (k, limit_rate <= f64::from(k).ln() + GROWTH_TOLERANCE))
        .collect();
    Ok(GrowthReport {
        window,
        rates,
        estimate,
        limit_rate,
        heuristic_finite,
        heuristic: true,
    })
}

fn fit_limit(points: &[(u32, f64)]) -> Option<f64> {
    let finite: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, s)| s.is_finite())
        .map(|&(n, s)| (1.0 / f64::from(n), s))
        .collect();
    if finite.len() < 2 {
        return None;
    }
    let m = finite.len() as f64;
    let mean_u = finite.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_s = finite.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = finite.iter().map(|p| (p.0 - mean_u).powi(2)).sum();
    let sxy: f64 = finite.iter().map(|p| (p.0 - mean_u) * (p.1 - mean_s)).sum();
    let slope = sxy / sxx;
    Some(mean_s - slope * mean_u)
}

impl NormReport {
    pub fn with_growth(mut self, growth: &GrowthReport) -> Self {
        self.heuristic_finite = growth.heuristic_finite.clone();
        self
    }
}
