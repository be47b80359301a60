use std::fs;
use std::sync::Arc;

use anyhow::anyhow;
use germ_seminorms::families::{generate as generate_family, FamilySpec};
use germ_seminorms::germspace::{CompactGrid, GermFile, Layout, TruncatedElement};
use germ_seminorms::lemma::{Certificate, DeltaSystem, ShellZero, WeightBoundReport};
use germ_seminorms::norms::{GrowthReport, NormReport, WeightSequence};
use germ_seminorms::sampling::{random_unit_element, sample_rng};
use germ_seminorms::{
    build_delta_with_margin, classify_growth, decompose as split, norm_k, seminorm_delta,
    verify_inclusion, verify_weight_bound, EpsSequence, MultiIndex,
};
use serde::Serialize;

use crate::output::{CliError, CliResult, Sink};
use crate::{ElementKind, Format, Mode, Source};

const DEFAULT_ORDER_CAP: u32 = 20;
const DEFAULT_GROWTH_WINDOW: u32 = 10;
/// Failing samples listed individually in the verify summary.
const MAX_LISTED_FAILURES: usize = 20;

struct Loaded {
    element: TruncatedElement,
    provenance: Option<serde_json::Value>,
}

fn load(source: &Source) -> CliResult<Loaded> {
    if let Some(path) = &source.input {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(anyhow!("reading {}: {e}", path.display())))?;
        let file = GermFile::parse(&text)?;
        let provenance = file.family.clone();
        let mut element = file.into_element()?;
        if let Some(d) = source.dim {
            if d as usize != element.dim() {
                return Err(germ_seminorms::Error::ShapeMismatch(format!(
                    "--dim {d} but the file has dimension {}",
                    element.dim()
                ))
                .into());
            }
        }
        if let Some(cap) = source.order_cap {
            element = element.truncate(cap)?;
        }
        return Ok(Loaded {
            element,
            provenance,
        });
    }
    let kind = source
        .family
        .as_deref()
        .ok_or_else(|| CliError::input(anyhow!("need --input or --family")))?;
    let spec = FamilySpec::parse(
        kind,
        &source.params,
        source.dim.unwrap_or(1) as usize,
        source.order_cap.unwrap_or(DEFAULT_ORDER_CAP),
        source.grid_points,
    )?;
    Ok(Loaded {
        element: generate_family(&spec)?,
        provenance: Some(spec.provenance()),
    })
}

/// δ covering orders `0..=order_cap`; a cap of 0 still gets one segment.
fn delta_system(eps: &str, order_cap: u32, margin: u32) -> CliResult<DeltaSystem> {
    let cap = order_cap.max(1);
    let eps = EpsSequence::parse(eps, cap as usize + 1)?;
    Ok(build_delta_with_margin(&eps, cap, margin)?)
}

fn alpha_string(alpha: &MultiIndex) -> String {
    serde_json::to_string(alpha).expect("multi-index serializes")
}

#[derive(Serialize)]
struct NormRow {
    log_value: Option<f64>,
    magnitude: Option<f64>,
    argmax_alpha: String,
    argmax_point: Option<usize>,
}

fn norm_row(r: &NormReport) -> NormRow {
    NormRow {
        log_value: r.value.into(),
        magnitude: r.value.finite_magnitude(),
        argmax_alpha: alpha_string(&r.argmax_alpha),
        argmax_point: r.argmax_point,
    }
}

pub fn norm(out: &Sink, source: &Source, k: u32, window: Option<u32>) -> CliResult {
    let x = load(source)?.element;
    let mut report = norm_k(&x, k);
    let cap = x.order_cap();
    if cap >= 1 {
        let window = window.unwrap_or(DEFAULT_GROWTH_WINDOW.min(cap));
        report = report.with_growth(&classify_growth(&x, window)?);
    }
    out.emit(&report, || vec![norm_row(&report)])
}

pub fn seminorm(out: &Sink, source: &Source, eps: &str, margin: u32) -> CliResult {
    let x = load(source)?.element;
    let ds = delta_system(eps, x.order_cap(), margin)?;
    let report = seminorm_delta(&x, ds.weights())?;
    out.emit(&report, || vec![norm_row(&report)])
}

#[derive(Serialize)]
struct DeltaOutput<'a> {
    delta: &'a DeltaSystem,
    weight_bound: &'a WeightBoundReport,
}

pub fn delta(out: &Sink, eps: &str, order_cap: u32, margin: u32) -> CliResult {
    let ds = delta_system(eps, order_cap, margin)?;
    let report = verify_weight_bound(&ds, order_cap)?;
    if out.format == Format::Csv {
        eprintln!(
            "weight bound: worst margin {:e}, {}",
            report.worst_margin,
            if report.pass { "pass" } else { "FAIL" }
        );
    }
    out.emit(
        &DeltaOutput {
            delta: &ds,
            weight_bound: &report,
        },
        || ds.rows(),
    )?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::falsified(format!(
            "δ_n^(-n) ≤ ε_k k^n violated, worst margin {:e}",
            report.worst_margin
        )))
    }
}

pub struct VerifyConfig {
    pub eps: String,
    pub samples: u64,
    pub dim: usize,
    pub order_cap: u32,
    pub mode: Mode,
    pub element: ElementKind,
    pub grid_points: usize,
    pub margin: u32,
    pub seed: u64,
}

#[derive(Serialize)]
struct Failure {
    sample: u64,
    seed: u64,
    worst_margin: f64,
    reconstructs: bool,
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    eps: &'a str,
    dim: usize,
    order_cap: u32,
    mode: &'static str,
    element: &'static str,
    margin: u32,
    seed: u64,
    jumps: &'a [u32],
    samples: u64,
    passed: u64,
    failed: u64,
    /// Smallest block margin over all samples; null when every block is zero.
    worst_margin: f64,
    worst_sample: Option<u64>,
    rescaled: u64,
    shell_zero_separate: u64,
    failures: Vec<Failure>,
}

#[derive(Serialize)]
struct VerifyRow {
    sample: u64,
    seminorm_log: Option<f64>,
    worst_margin: f64,
    shell_zero: ShellZero,
    rescaled: bool,
    pass: bool,
}

/// `‖x_α‖ = δ_{|α|}^{-|α|}` at every coefficient (and grid point).
fn boundary(
    layout: Arc<Layout>,
    grid: Option<Arc<CompactGrid>>,
    delta: &WeightSequence,
) -> germ_seminorms::Result<TruncatedElement> {
    TruncatedElement::from_fn(layout, grid, |alpha, out| {
        let n = alpha.order();
        let v = if n == 0 {
            1.0
        } else {
            (-f64::from(n) * delta.log_value(n as usize)).exp()
        };
        out.fill(v);
    })
}

pub fn verify(out: &Sink, cfg: &VerifyConfig) -> CliResult {
    let ds = delta_system(&cfg.eps, cfg.order_cap, cfg.margin)?;
    let layout = Layout::new(cfg.dim, cfg.order_cap)?;
    let grid = match cfg.mode {
        Mode::Germ => Some(Arc::new(CompactGrid::unit_cube(cfg.dim, cfg.grid_points)?)),
        Mode::Scalar => None,
    };

    let mut certs: Vec<Certificate> = Vec::with_capacity(cfg.samples as usize);
    for i in 0..cfg.samples {
        let x = match cfg.element {
            ElementKind::Random => random_unit_element(
                layout.clone(),
                grid.clone(),
                ds.weights(),
                &mut sample_rng(cfg.seed, i),
            )?,
            ElementKind::Zero => TruncatedElement::zeros(layout.clone(), grid.clone())?,
            ElementKind::Boundary => boundary(layout.clone(), grid.clone(), ds.weights())?,
        };
        certs.push(verify_inclusion(&x, &ds)?);
    }

    let mut worst: Option<(f64, u64)> = None;
    for (i, c) in certs.iter().enumerate() {
        if worst.is_none_or(|(m, _)| c.worst_margin < m) {
            worst = Some((c.worst_margin, i as u64));
        }
    }
    let failing: Vec<u64> = (0..cfg.samples)
        .filter(|&i| !certs[i as usize].pass)
        .collect();
    let summary = VerifySummary {
        eps: &cfg.eps,
        dim: cfg.dim,
        order_cap: cfg.order_cap,
        mode: match cfg.mode {
            Mode::Germ => "germ",
            Mode::Scalar => "scalar",
        },
        element: match cfg.element {
            ElementKind::Random => "random",
            ElementKind::Zero => "zero",
            ElementKind::Boundary => "boundary",
        },
        margin: cfg.margin,
        seed: cfg.seed,
        jumps: ds.jumps(),
        samples: cfg.samples,
        passed: cfg.samples - failing.len() as u64,
        failed: failing.len() as u64,
        worst_margin: worst.map_or(f64::INFINITY, |w| w.0),
        worst_sample: worst.filter(|w| w.0.is_finite()).map(|w| w.1),
        rescaled: certs.iter().filter(|c| c.rescaled).count() as u64,
        shell_zero_separate: certs
            .iter()
            .filter(|c| c.shell_zero == ShellZero::SeparateBlock)
            .count() as u64,
        failures: failing
            .iter()
            .take(MAX_LISTED_FAILURES)
            .map(|&i| Failure {
                sample: i,
                seed: cfg.seed,
                worst_margin: certs[i as usize].worst_margin,
                reconstructs: certs[i as usize].reconstructs,
            })
            .collect(),
    };
    out.emit(&summary, || {
        certs
            .iter()
            .enumerate()
            .map(|(i, c)| VerifyRow {
                sample: i as u64,
                seminorm_log: c.seminorm_log,
                worst_margin: c.worst_margin,
                shell_zero: c.shell_zero,
                rescaled: c.rescaled,
                pass: c.pass,
            })
            .collect()
    })?;
    match failing.first() {
        None => Ok(()),
        Some(&first) => Err(CliError::falsified(format!(
            "{} of {} samples failed the inclusion check; first failure: sample {first} (seed {})",
            failing.len(),
            cfg.samples,
            cfg.seed
        ))),
    }
}

#[derive(Serialize)]
struct BlockRow {
    k: u32,
    lo: u32,
    hi: u32,
    certified_log: Option<f64>,
    bound_log: f64,
    margin: f64,
}

#[derive(Serialize)]
struct DecomposeOutput<'a> {
    seminorm_log: Option<f64>,
    shell_zero: ShellZero,
    jumps: &'a [u32],
    blocks: &'a [BlockRow],
    worst_margin: f64,
    reconstructs: bool,
    /// Blocks of `x / max(1, |x|_δ)`, with the pass/fail verdict.
    certificate: Certificate,
}

pub fn decompose(out: &Sink, source: &Source, eps: &str, margin: u32) -> CliResult {
    let x = load(source)?.element;
    let ds = delta_system(eps, x.order_cap(), margin)?;
    let dec = split(&x, &ds)?;
    let blocks: Vec<BlockRow> = dec
        .blocks
        .iter()
        .map(|b| BlockRow {
            k: b.k,
            lo: b.shells.0,
            hi: b.shells.1,
            certified_log: b.certified.into(),
            bound_log: b.bound_log,
            margin: b.margin(),
        })
        .collect();
    let result = DecomposeOutput {
        seminorm_log: seminorm_delta(&x, ds.weights())?.value.into(),
        shell_zero: dec.shell_zero,
        jumps: ds.jumps(),
        blocks: &blocks,
        worst_margin: dec.worst_margin(),
        reconstructs: dec.reconstruct()? == x,
        certificate: verify_inclusion(&x, &ds)?,
    };
    match out.format {
        Format::Json => out.json(&result),
        Format::Csv => out.csv(&blocks),
    }
}

#[derive(Serialize)]
struct RateRow {
    n: u32,
    s_n: f64,
}

pub fn growth(out: &Sink, source: &Source, window: u32) -> CliResult {
    let x = load(source)?.element;
    let report: GrowthReport = classify_growth(&x, window)?;
    out.emit(&report, || {
        report
            .rates
            .iter()
            .map(|&(n, s_n)| RateRow { n, s_n })
            .collect()
    })
}

pub fn generate(out: &Sink, source: &Source) -> CliResult {
    if out.format == Format::Csv {
        return Err(CliError::input(anyhow!("germ files are JSON only")));
    }
    let loaded = load(source)?;
    let file = GermFile::from_element(&loaded.element, loaded.provenance);
    out.json(&file)
}
