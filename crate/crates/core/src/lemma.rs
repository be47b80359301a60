//! From a positive sequence `ε` to a null sequence `δ` whose unit ball sits
//! inside `Σ_k ε_k B_k`, with an explicit certificate.
//!
//! Jumps `n_1 < n_2 < …` are chosen so that `k - 1 < ε_k^{1/n_k} k`, and
//! `δ_n^{-1} = ε_k^{1/n_k} k` on the segment `n_k ≤ n < n_{k+1}`. Then
//! `δ_n^{-n} ≤ ε_k k^n` there, so every coefficient of an element of the
//! unit ball of `|·|_δ` whose order lies in segment `k` is bounded by
//! `ε_k k^{|α|}`, i.e. the segment block lies in `ε_k B_k`.
//!
//! All conditions are evaluated on logarithms, so `ε_k = 10^{-300}` is no
//! harder than `ε_k = 1/2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::germspace::TruncatedElement;
use crate::logmag::LogMagnitude;
use crate::norms::{norm_k, seminorm_delta, WeightProvenance, WeightSequence};

/// Slack allowed on certified block margins and weight-bound margins.
pub const CERT_TOLERANCE: f64 = 1e-9;

/// Positive numbers `ε_1, …, ε_K`, clamped to at most 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsSequence {
    values: Vec<f64>,
    logs: Vec<f64>,
    /// 1-based indices `k` whose input exceeded 1 and was clamped.
    clamped: Vec<u32>,
}

impl EpsSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyEps);
        }
        let mut clamped = Vec::new();
        let mut out = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::NonPositiveEps {
                    index: i + 1,
                    value: v,
                });
            }
            if v > 1.0 {
                clamped.push(i as u32 + 1);
                out.push(1.0);
            } else {
                out.push(v);
            }
        }
        let logs = out.iter().map(|v| v.ln()).collect();
        Ok(Self {
            values: out,
            logs,
            clamped,
        })
    }

    /// `ε_k = exp(log_eps(k))` for `k = 1..=count`.
    pub fn from_log_fn(count: usize, log_eps: impl Fn(u32) -> f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyEps);
        }
        let logs: Vec<f64> = (1..=count as u32).map(|k| log_eps(k).min(0.0)).collect();
        if let Some(i) = logs
            .iter()
            .position(|l| l.is_nan() || *l == f64::NEG_INFINITY)
        {
            return Err(Error::NonPositiveEps {
                index: i + 1,
                value: 0.0,
            });
        }
        Ok(Self {
            values: logs.iter().map(|l| l.exp()).collect(),
            logs,
            clamped: Vec::new(),
        })
    }

    /// Parse an ε expression.
    ///
    /// Accepts the closed forms `1`, `1/k`, `1/k^2`, `2^-k`, `10^-k`, which
    /// produce `count` terms, or a comma-separated list of numbers. A list
    /// shorter than `count` is continued with its last entry.
    pub fn parse(expr: &str, count: usize) -> Result<Self> {
        let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        let closed: Option<fn(u32) -> f64> = match compact.as_str() {
            "1" => Some(|_| 0.0),
            "1/k" => Some(|k| -f64::from(k).ln()),
            "1/k^2" => Some(|k| -2.0 * f64::from(k).ln()),
            "2^-k" => Some(|k| -f64::from(k) * std::f64::consts::LN_2),
            "10^-k" => Some(|k| -f64::from(k) * std::f64::consts::LN_10),
            _ => None,
        };
        if let Some(log_eps) = closed {
            return Self::from_log_fn(count, log_eps);
        }
        let values = compact
            .split(',')
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad ε entry {t:?} in {expr:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut values = values;
        if let Some(&last) = values.last() {
            values.resize(values.len().max(count), last);
        }
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn clamped(&self) -> &[u32] {
        &self.clamped
    }

    /// `ε_k`, 1-based.
    pub fn get(&self, k: u32) -> f64 {
        self.values[k as usize - 1]
    }

    /// `ln ε_k`, 1-based.
    pub fn ln(&self, k: u32) -> f64 {
        self.logs[k as usize - 1]
    }
}

/// The condition `k - 1 < ε_k^{1/n} k`, in logs.
pub fn jump_admissible(k: u32, n: u64, ln_eps: f64) -> bool {
    if k <= 1 {
        return true;
    }
    f64::from(k - 1).ln() < ln_eps / n as f64 + f64::from(k).ln()
}

/// Smallest admissible `n > prev` for step `k`, or `None` when it exceeds
/// `limit`.
fn minimal_jump(k: u32, prev: u64, ln_eps: f64, limit: u64) -> Option<u64> {
    let mut n = prev + 1;
    if ln_eps < 0.0 {
        // Admissible iff n > -ln ε_k / ln(k / (k-1)).
        let threshold = -ln_eps / (f64::from(k).ln() - f64::from(k - 1).ln());
        if threshold >= (limit + 2) as f64 {
            return None;
        }
        n = n.max(threshold.floor() as u64 + 1);
        while n > prev + 1 && jump_admissible(k, n - 1, ln_eps) {
            n -= 1;
        }
    }
    while !jump_admissible(k, n, ln_eps) {
        n += 1;
    }
    (n <= limit).then_some(n)
}

/// One row of a δ table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaRow {
    pub n: u32,
    pub k: u32,
    pub delta_n: f64,
    pub log_delta_n: f64,
}

/// Jumps `n_k`, the weights `δ_n` for `1 ≤ n ≤ N`, and the `ε` they came
/// from.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSystem {
    order_cap: u32,
    margin: u32,
    jumps: Vec<u32>,
    // governing[n] = k with n_k ≤ n < n_{k+1}; 0 at n = 0.
    governing: Vec<u32>,
    weights: WeightSequence,
    eps: EpsSequence,
}

impl DeltaSystem {
    pub fn order_cap(&self) -> u32 {
        self.order_cap
    }

    pub fn margin(&self) -> u32 {
        self.margin
    }

    /// `n_1 < n_2 < …`, all `≤ N`.
    pub fn jumps(&self) -> &[u32] {
        &self.jumps
    }

    /// `δ_0, …, δ_N` (`δ_0 = 1` is a placeholder).
    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    pub fn eps(&self) -> &EpsSequence {
        &self.eps
    }

    /// The `k` whose segment contains `n ≥ 1`.
    pub fn governing_k(&self, n: u32) -> u32 {
        self.governing[n as usize]
    }

    /// Shell range `[n_k, n_{k+1})` of segment `k`, the last one ending at
    /// `N + 1`.
    pub fn segment(&self, k: u32) -> (u32, u32) {
        let i = k as usize - 1;
        let hi = self.jumps.get(i + 1).copied().unwrap_or(self.order_cap + 1);
        (self.jumps[i], hi)
    }

    pub fn rows(&self) -> Vec<DeltaRow> {
        (1..=self.order_cap)
            .map(|n| DeltaRow {
                n,
                k: self.governing_k(n),
                delta_n: self.weights.value(n as usize),
                log_delta_n: self.weights.log_value(n as usize),
            })
            .collect()
    }
}

impl Serialize for DeltaSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            order_cap: u32,
            margin: u32,
            eps: &'a [f64],
            clamped: &'a [u32],
            jumps: &'a [u32],
            rows: Vec<DeltaRow>,
        }
        View {
            order_cap: self.order_cap,
            margin: self.margin,
            eps: &self.eps.values()[..self.jumps.len()],
            clamped: self.eps.clamped(),
            jumps: &self.jumps,
            rows: self.rows(),
        }
        .serialize(serializer)
    }
}

/// Build `δ` with minimal jumps.
pub fn build_delta(eps: &EpsSequence, order_cap: u32) -> Result<DeltaSystem> {
    build_delta_with_margin(eps, order_cap, 0)
}

/// Build `δ` with `n_k` = (minimal admissible `n > n_{k-1}`) + `margin` for
/// `k ≥ 2`. `n_1 = 1` always.
///
/// Jumps are generated until the next one would exceed `N` or `ε` runs
/// out; the last segment then extends to `N`.
pub fn build_delta_with_margin(
    eps: &EpsSequence,
    order_cap: u32,
    margin: u32,
) -> Result<DeltaSystem> {
    if eps.is_empty() {
        return Err(Error::EmptyEps);
    }
    if order_cap == 0 {
        return Err(Error::ZeroOrderCap);
    }
    let limit = u64::from(order_cap);
    let mut jumps = vec![1u32];
    for k in 2..=eps.len() as u32 {
        let prev = u64::from(*jumps.last().expect("n_1 present"));
        let Some(n) = minimal_jump(k, prev, eps.ln(k), limit) else {
            break;
        };
        let n = n + u64::from(margin);
        if n > limit {
            break;
        }
        jumps.push(n as u32);
    }

    let mut governing = vec![0u32; order_cap as usize + 1];
    let mut logs = vec![0.0; order_cap as usize + 1];
    for (i, &start) in jumps.iter().enumerate() {
        let k = i as u32 + 1;
        let end = jumps.get(i + 1).copied().unwrap_or(order_cap + 1);
        // `+ 0.0` turns a `-0.0` into `0.0`.
        let log_delta = -(eps.ln(k) / f64::from(start) + f64::from(k).ln()) + 0.0;
        for n in start..end {
            governing[n as usize] = k;
            logs[n as usize] = log_delta;
        }
    }
    let weights = WeightSequence::from_logs(logs)?.with_provenance(WeightProvenance {
        eps: eps.values()[..jumps.len()].to_vec(),
        jumps: jumps.clone(),
        margin,
    });
    Ok(DeltaSystem {
        order_cap,
        margin,
        jumps,
        governing,
        weights,
        eps: eps.clone(),
    })
}

/// `δ_n^{-n} ≤ ε_k k^n` at one order `n`, in logs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightCheck {
    pub n: u32,
    pub k: u32,
    /// `-n ln δ_n`
    pub lhs: f64,
    /// `ln ε_k + n ln k`
    pub rhs: f64,
    pub margin: f64,
    pub at_jump: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightBoundReport {
    pub checks: Vec<WeightCheck>,
    pub worst_margin: f64,
    pub pass: bool,
}

/// Check `δ_n^{-n} ≤ ε_k k^n` for `1 ≤ n ≤ order_cap`.
pub fn verify_weight_bound(ds: &DeltaSystem, order_cap: u32) -> Result<WeightBoundReport> {
    if order_cap > ds.order_cap {
        return Err(Error::CoverageMismatch {
            covered: ds.order_cap,
            needed: order_cap,
        });
    }
    let checks: Vec<WeightCheck> = (1..=order_cap)
        .map(|n| {
            let k = ds.governing_k(n);
            let lhs = -f64::from(n) * ds.weights.log_value(n as usize);
            let rhs = ds.eps.ln(k) + f64::from(n) * f64::from(k).ln();
            WeightCheck {
                n,
                k,
                lhs,
                rhs,
                margin: rhs - lhs,
                at_jump: ds.jumps[k as usize - 1] == n,
            }
        })
        .collect();
    let worst_margin = checks
        .iter()
        .map(|c| c.margin)
        .fold(f64::INFINITY, f64::min);
    Ok(WeightBoundReport {
        pass: checks.iter().all(|c| c.margin >= -CERT_TOLERANCE),
        checks,
        worst_margin,
    })
}

/// How the order-0 shell was assigned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellZero {
    /// `‖x_0‖ ≤ ε_1`: shell 0 joined block 1.
    Absorbed,
    /// `‖x_0‖ > ε_1`: shell 0 is block 0 with bound 1.
    SeparateBlock,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    /// Step index; 0 for a separate order-0 block.
    pub k: u32,
    /// Shell range `lo..hi`.
    pub shells: (u32, u32),
    pub element: TruncatedElement,
    /// `‖ξ_k‖_k` (`‖ξ_0‖_1` for block 0).
    pub certified: LogMagnitude,
    /// `ln ε_k`, or 0 for block 0.
    pub bound_log: f64,
}

impl Block {
    /// `bound_log - log ‖ξ_k‖_k`; `+∞` for a zero block.
    pub fn margin(&self) -> f64 {
        self.bound_log - self.certified.log_value()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    pub shell_zero: ShellZero,
    pub jumps: Vec<u32>,
}

impl BlockDecomposition {
    /// `Σ_k ξ_k`.
    pub fn reconstruct(&self) -> Result<TruncatedElement> {
        let mut blocks = self.blocks.iter();
        let first = blocks.next().expect("at least one block").element.clone();
        blocks.try_fold(first, |acc, b| acc.add(&b.element))
    }

    pub fn worst_margin(&self) -> f64 {
        self.blocks
            .iter()
            .map(Block::margin)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Split `x` into blocks `ξ_k` supported on `n_k ≤ |α| < n_{k+1}` and
/// certify `‖ξ_k‖_k`.
pub fn decompose(x: &TruncatedElement, ds: &DeltaSystem) -> Result<BlockDecomposition> {
    let cap = x.order_cap();
    if ds.order_cap < cap {
        return Err(Error::CoverageMismatch {
            covered: ds.order_cap,
            needed: cap,
        });
    }
    let shell_zero = if x.shell_sup(0).log_value() <= ds.eps.ln(1) {
        ShellZero::Absorbed
    } else {
        ShellZero::SeparateBlock
    };
    let mut blocks = Vec::new();
    let mut push = |k: u32, lo: u32, hi: u32, bound_log: f64| -> Result<()> {
        let element = x.restrict_shells(lo, hi)?;
        let certified = norm_k(&element, k.max(1)).value;
        blocks.push(Block {
            k,
            shells: (lo, hi),
            element,
            certified,
            bound_log,
        });
        Ok(())
    };
    let first_hi = ds.jumps.get(1).copied().unwrap_or(cap + 1).min(cap + 1);
    match shell_zero {
        ShellZero::Absorbed => push(1, 0, first_hi, ds.eps.ln(1))?,
        ShellZero::SeparateBlock => {
            push(0, 0, 1, 0.0)?;
            push(1, 1.min(first_hi), first_hi, ds.eps.ln(1))?;
        }
    }
    for i in 1..ds.jumps.len() {
        let lo = ds.jumps[i];
        if lo > cap {
            break;
        }
        let hi = ds.jumps.get(i + 1).copied().unwrap_or(cap + 1).min(cap + 1);
        let k = i as u32 + 1;
        push(k, lo, hi, ds.eps.ln(k))?;
    }
    Ok(BlockDecomposition {
        blocks,
        shell_zero,
        jumps: ds.jumps.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockCertificate {
    pub k: u32,
    pub shells: (u32, u32),
    /// `log ‖ξ_k‖_k`; null for a zero block.
    pub certified_log: Option<f64>,
    pub bound_log: f64,
    /// `bound_log - certified_log`; null (+∞) for a zero block.
    pub margin: f64,
}

/// Outcome of checking `x ∈ U_δ ⇒ ξ_k ∈ ε_k B_k` for one element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// `log |x|_δ` before any rescaling; null for `x = 0`.
    pub seminorm_log: Option<f64>,
    /// Whether `x` was scaled down onto the boundary of `U_δ`.
    pub rescaled: bool,
    pub shell_zero: ShellZero,
    pub blocks: Vec<BlockCertificate>,
    pub worst_margin: f64,
    /// The blocks add back up to the (rescaled) element exactly.
    pub reconstructs: bool,
    pub pass: bool,
}

/// Multiply by `exp(log_factor)` in steps that stay inside the f64 range.
fn scale_by_log(x: &TruncatedElement, log_factor: f64) -> TruncatedElement {
    const STEP: f64 = 700.0;
    let mut remaining = log_factor;
    let mut out = x.clone();
    while remaining.abs() > STEP {
        let step = STEP.copysign(remaining);
        out = out.scale(step.exp());
        remaining -= step;
    }
    out.scale(remaining.exp())
}

/// Place `x` in `U_δ` (rescaling when `|x|_δ > 1`), decompose it, and check
/// `‖ξ_k‖_k ≤ ε_k` for every block up to [`CERT_TOLERANCE`].
pub fn verify_inclusion(x: &TruncatedElement, ds: &DeltaSystem) -> Result<Certificate> {
    let s = seminorm_delta(x, ds.weights())?.value;
    let rescaled = s.log_value() > 0.0;
    let y = if rescaled {
        scale_by_log(x, -s.log_value())
    } else {
        x.clone()
    };
    let dec = decompose(&y, ds)?;
    let reconstructs = dec.reconstruct()? == y;
    let blocks: Vec<BlockCertificate> = dec
        .blocks
        .iter()
        .map(|b| BlockCertificate {
            k: b.k,
            shells: b.shells,
            certified_log: b.certified.into(),
            bound_log: b.bound_log,
            margin: b.margin(),
        })
        .collect();
    let worst_margin = dec.worst_margin();
    Ok(Certificate {
        seminorm_log: s.into(),
        rescaled,
        shell_zero: dec.shell_zero,
        pass: reconstructs && blocks.iter().all(|b| b.margin >= -CERT_TOLERANCE),
        blocks,
        worst_margin,
        reconstructs,
    })
}
