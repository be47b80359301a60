//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Every expected value here comes from plain arithmetic written in this
//! file (direct powers, brute-force scans), not from the library's log-domain
//! code paths.

use std::process::{Command, Output};
use std::sync::Arc;
use std::time::{Duration, Instant};

use germ_seminorms::families::{generate, FamilySpec};
use germ_seminorms::germspace::{CompactGrid, Layout, TruncatedElement};
use germ_seminorms::norms::WeightSequence;
use germ_seminorms::sampling::{boundary_element, random_element, sample_rng};
use germ_seminorms::{
    build_delta, continuity_constant, norm_k, seminorm_delta, verify_weight_bound, DeltaSystem,
    EpsSequence,
};
use rand::Rng;

const BIN: &str = env!("CARGO_BIN_EXE_germnorm");

const EPS_MATRIX: [&str; 4] = ["1", "1/k^2", "2^-k", "10^-k"];
const DIMS: [usize; 3] = [1, 2, 3];
const ORDER_CAPS: [u32; 3] = [10, 20, 40];

const INCLUSION_SAMPLES: u64 = 1000;
const INCLUSION_SEED: u64 = 20_240_601;
const INCLUSION_TOLERANCE: f64 = 1e-9;
const INCLUSION_BUDGET: Duration = Duration::from_secs(60);
const WEIGHT_TOLERANCE: f64 = 1e-9;
const JUMP_TOLERANCE: f64 = 1e-12;
const TABLE_TOLERANCE: f64 = 1e-5;
const SCAN_LIMIT: u32 = 100;
const CLOSED_FORM_TOLERANCE: f64 = 1e-12;
const CAUCHY_TOLERANCE: f64 = 1e-9;
const BOUNDARY_TOLERANCE: f64 = 1e-12;
const CONTINUITY_SLACK: f64 = 1e-12;
const ORACLE_TOLERANCE: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("germnorm runs")
}

fn delta_for(expr: &str, cap: u32) -> DeltaSystem {
    build_delta(&EpsSequence::parse(expr, cap as usize + 1).unwrap(), cap).unwrap()
}

fn random_case(seed: u64, i: u64, max_dim: usize, max_cap: u32) -> TruncatedElement {
    let mut rng = sample_rng(seed, i);
    let d = rng.gen_range(1..=max_dim);
    let cap = rng.gen_range(0..=max_cap);
    let grid = rng
        .gen_bool(0.5)
        .then(|| Arc::new(CompactGrid::unit_cube(d, 2).unwrap()));
    random_element(Layout::new(d, cap).unwrap(), grid, 4.0, &mut rng).unwrap()
}

fn random_delta(rng: &mut impl Rng, cap: u32) -> WeightSequence {
    WeightSequence::new((0..=cap).map(|_| rng.gen_range(0.01..3.0)).collect()).unwrap()
}

/// `max |x_{α,j}| · weight(|α|)` by direct multiplication.
fn naive_weighted_sup(e: &TruncatedElement, weight: impl Fn(u32) -> f64) -> f64 {
    e.iter()
        .flat_map(|(alpha, values)| {
            let w = weight(alpha.order());
            values.into_iter().map(move |v| v.abs() * w)
        })
        .fold(0.0, f64::max)
}

fn inclusion_suite() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut runs = 0;
    for eps in EPS_MATRIX {
        for d in DIMS {
            for cap in ORDER_CAPS {
                let (d_arg, cap_arg) = (d.to_string(), cap.to_string());
                let seed = INCLUSION_SEED.to_string();
                let samples = INCLUSION_SAMPLES.to_string();
                let out = run_cli(&[
                    "verify",
                    "--eps",
                    eps,
                    "--samples",
                    &samples,
                    "--seed",
                    &seed,
                    "--dim",
                    &d_arg,
                    "--N",
                    &cap_arg,
                    "--mode",
                    "germ",
                ]);
                let tag = format!("eps={eps} d={d} N={cap}");
                check(out.status.success(), || {
                    format!(
                        "{tag}: exit {:?}: {}",
                        out.status.code(),
                        String::from_utf8_lossy(&out.stderr)
                    )
                })?;
                let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
                let passed = summary["passed"].as_u64().unwrap();
                check(passed == INCLUSION_SAMPLES, || {
                    format!("{tag}: {passed}/{INCLUSION_SAMPLES} passed")
                })?;
                // null means every block was zero.
                let margin = summary["worst_margin"].as_f64().unwrap_or(f64::INFINITY);
                check(margin >= -INCLUSION_TOLERANCE, || {
                    format!("{tag}: worst margin {margin:e}")
                })?;
                worst = worst.min(margin);
                runs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < INCLUSION_BUDGET, || {
        format!("matrix took {:.1}s", elapsed.as_secs_f64())
    })?;
    Ok(format!(
        "{runs} configurations x {INCLUSION_SAMPLES} germ samples, 0 failures, worst margin {worst:e}, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn weight_bound_identity() -> Outcome {
    let cap = 40;
    let mut worst = f64::INFINITY;
    let mut worst_jump = 0.0f64;
    for expr in EPS_MATRIX {
        let ds = delta_for(expr, cap);
        let report = verify_weight_bound(&ds, cap).map_err(|e| e.to_string())?;
        for (c, row) in report.checks.iter().zip(ds.rows()) {
            // Recompute from the table: ln ε_k + n ln k - (-n ln δ_n).
            let n = f64::from(row.n);
            let k = row.k;
            let direct = ds.eps().get(k).ln() + n * f64::from(k).ln() + n * row.delta_n.ln();
            check((direct - c.margin).abs() < 1e-9, || {
                format!("{expr} n={}: margin {} vs direct {direct}", row.n, c.margin)
            })?;
            check(c.margin >= -WEIGHT_TOLERANCE, || {
                format!("{expr} n={}: margin {:e}", row.n, c.margin)
            })?;
            worst = worst.min(c.margin);
            if ds.jumps().contains(&row.n) {
                check(c.at_jump && c.margin.abs() <= JUMP_TOLERANCE, || {
                    format!("{expr} n_k={}: margin {:e}", row.n, c.margin)
                })?;
                worst_jump = worst_jump.max(c.margin.abs());
            }
        }
    }
    Ok(format!(
        "n <= 40 on 4 sequences, worst margin {worst:e}, max |margin| at jumps {worst_jump:e}"
    ))
}

/// Smallest `n > prev` with `k - 1 < ε^{1/n} k`, by direct powers.
fn brute_force_jump(k: u32, prev: u32, eps: f64) -> Option<u32> {
    (prev + 1..=SCAN_LIMIT)
        .find(|&n| f64::from(k - 1) < eps.powf(1.0 / f64::from(n)) * f64::from(k))
}

fn worked_delta_table() -> Outcome {
    let eps = |k: u32| 0.5f64.powi(k as i32);
    let mut jumps = vec![1u32];
    for k in 2.. {
        match brute_force_jump(k, *jumps.last().unwrap(), eps(k)) {
            Some(n) => jumps.push(n),
            None => break,
        }
    }
    check(jumps[..3] == [1, 3, 6], || {
        format!("brute-force jumps {jumps:?}")
    })?;

    let ds = delta_for("2^-k", SCAN_LIMIT);
    check(ds.jumps() == jumps.as_slice(), || {
        format!("library jumps {:?} vs scan {jumps:?}", ds.jumps())
    })?;
    let expected = [2.0, 0.79370, 0.47140];
    for (i, want) in expected.iter().enumerate() {
        let k = i as u32 + 1;
        let nk = f64::from(jumps[i]);
        let direct = 1.0 / (eps(k).powf(1.0 / nk) * f64::from(k));
        check((direct - want).abs() < TABLE_TOLERANCE, || {
            format!("direct δ for k={k}: {direct}")
        })?;
        let (lo, hi) = ds.segment(k);
        for n in lo..hi {
            let got = ds.weights().value(n as usize);
            check((got - want).abs() < TABLE_TOLERANCE, || {
                format!("δ_{n} = {got}")
            })?;
        }
    }
    Ok(format!(
        "jumps {:?} match a scan up to {SCAN_LIMIT}; segments (2, 0.79370, 0.47140)",
        &jumps[..3]
    ))
}

fn eps_one_closed_form() -> Outcome {
    let ds = delta_for("1", 40);
    let mut worst = 0.0f64;
    for n in 1..=40u32 {
        let want = 1.0 / f64::from(n);
        let rel = (ds.weights().value(n as usize) - want).abs() / want;
        check(rel <= CLOSED_FORM_TOLERANCE, || {
            format!("δ_{n}: relative error {rel:e}")
        })?;
        worst = worst.max(rel);
    }
    Ok(format!(
        "δ_n = 1/n for n <= 40, max relative error {worst:e}"
    ))
}

fn closed_form_norms() -> Outcome {
    let mut worst_cauchy = 0.0f64;
    for cap in ORDER_CAPS {
        let spec = FamilySpec::parse("cauchy", "a=2", 1, cap, 3).map_err(|e| e.to_string())?;
        let x = generate(&spec).map_err(|e| e.to_string())?;
        for k in 1..=6 {
            let got = norm_k(&x, k).value.magnitude();
            check((got - 1.0).abs() <= CAUCHY_TOLERANCE, || {
                format!("cauchy N={cap} k={k}: {got}")
            })?;
            worst_cauchy = worst_cauchy.max((got - 1.0).abs());
        }
    }
    let mut worst_boundary = 0.0f64;
    for expr in EPS_MATRIX {
        for d in DIMS {
            for cap in ORDER_CAPS {
                let ds = delta_for(expr, cap);
                let x = boundary_element(Layout::new(d, cap).unwrap(), ds.weights()).unwrap();
                let got = seminorm_delta(&x, ds.weights()).unwrap().value.magnitude();
                check((got - 1.0).abs() <= BOUNDARY_TOLERANCE, || {
                    format!("boundary {expr} d={d} N={cap}: {got}")
                })?;
                worst_boundary = worst_boundary.max((got - 1.0).abs());
            }
        }
    }
    Ok(format!(
        "cauchy a=2 max |norm - 1| {worst_cauchy:e}; boundary max ||x|_δ - 1| {worst_boundary:e}"
    ))
}

fn continuity_bound() -> Outcome {
    let deltas: Vec<WeightSequence> = EPS_MATRIX
        .iter()
        .map(|e| delta_for(e, 20).weights().clone())
        .collect();
    let mut worst = f64::INFINITY;
    for k in 1..=6u32 {
        for i in 0..1000u64 {
            let x = random_case(600 + u64::from(k), i, 3, 20);
            let delta = &deltas[i as usize % deltas.len()];
            let s = seminorm_delta(&x, delta).unwrap().value.log_value();
            let c = continuity_constant(delta, k, x.order_cap())
                .unwrap()
                .log_value();
            let nk = norm_k(&x, k).value.log_value();
            if s == f64::NEG_INFINITY {
                continue;
            }
            let margin = c + nk - s;
            check(margin >= -CONTINUITY_SLACK, || {
                format!("k={k} sample {i}: margin {margin:e}")
            })?;
            worst = worst.min(margin);
        }
    }
    Ok(format!("6000 elements, worst log margin {worst:e}"))
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let rel = |got: f64, want: f64| {
        if want == 0.0 {
            got.abs()
        } else {
            (got - want).abs() / want
        }
    };
    for i in 0..200u64 {
        let x = random_case(700, i, 2, 6);
        for k in 1..=6u32 {
            let got = norm_k(&x, k).value.magnitude();
            let want = naive_weighted_sup(&x, |n| f64::from(k).powi(-(n as i32)));
            let r = rel(got, want);
            check(r <= ORACLE_TOLERANCE, || {
                format!("sample {i} k={k}: {got} vs {want}")
            })?;
            worst = worst.max(r);
        }
        let delta = random_delta(&mut sample_rng(701, i), x.order_cap());
        let got = seminorm_delta(&x, &delta).unwrap().value.magnitude();
        let want = naive_weighted_sup(&x, |n| {
            if n == 0 {
                1.0
            } else {
                delta.value(n as usize).powi(n as i32)
            }
        });
        let r = rel(got, want);
        check(r <= ORACLE_TOLERANCE, || {
            format!("sample {i} δ: {got} vs {want}")
        })?;
        worst = worst.max(r);
    }
    Ok(format!("200 elements, max relative error {worst:e}"))
}

fn monotonicity() -> Outcome {
    for i in 0..1000u64 {
        let x = random_case(800, i, 3, 12);
        for k in 1..8 {
            check(norm_k(&x, k + 1).value <= norm_k(&x, k).value, || {
                format!("norm_k not nonincreasing: sample {i} k={k}")
            })?;
        }
    }
    for i in 0..1000u64 {
        let x = random_case(801, i, 3, 12);
        let mut rng = sample_rng(802, i);
        let small = random_delta(&mut rng, x.order_cap());
        let large = WeightSequence::new(
            (0..small.len())
                .map(|n| small.value(n) * (1.0 + rng.gen_range(0.0..1.0)))
                .collect(),
        )
        .unwrap();
        let a = seminorm_delta(&x, &small).unwrap().value;
        let b = seminorm_delta(&x, &large).unwrap().value;
        check(a <= b, || format!("seminorm not monotone in δ: sample {i}"))?;
    }
    Ok("1000 cases in k, 1000 cases in δ, 0 violations".into())
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "verify",
            "--eps",
            "1/k^2",
            "--samples",
            "200",
            "--seed",
            "7",
            "--dim",
            "2",
            "--N",
            "20",
        ],
        vec![
            "verify",
            "--eps",
            "10^-k",
            "--samples",
            "200",
            "--seed",
            "9",
            "--mode",
            "scalar",
            "--format",
            "csv",
        ],
        vec!["delta", "--eps", "2^-k", "--N", "40"],
        vec!["delta", "--eps", "1/k", "--N", "40", "--format", "csv"],
        vec![
            "norm", "--family", "cauchy", "--params", "a=2", "--k", "3", "--N", "20",
        ],
        vec![
            "seminorm",
            "--family",
            "exponential",
            "--dim",
            "2",
            "--eps",
            "1/k^2",
            "--N",
            "12",
        ],
        vec![
            "decompose",
            "--family",
            "cauchy",
            "--params",
            "a=3",
            "--eps",
            "2^-k",
            "--N",
            "15",
        ],
        vec![
            "growth",
            "--family",
            "factorial_scalar",
            "--N",
            "40",
            "--format",
            "csv",
        ],
        vec![
            "generate",
            "--family",
            "polynomial",
            "--params",
            "0=1,2=1",
            "--N",
            "6",
        ],
    ];
    for (i, args) in invocations.iter().enumerate() {
        let a = run_cli(args);
        let b = run_cli(args);
        let label = args.join(" ");
        check(a.status.success(), || {
            format!("{label}: {}", String::from_utf8_lossy(&a.stderr))
        })?;
        check(a.stdout == b.stdout, || format!("{label}: stdout differs"))?;

        let path = dir.path().join(format!("out{i}"));
        let path_str = path.to_str().unwrap();
        let mut with_file = args.clone();
        with_file.extend(["--output", path_str]);
        let c = run_cli(&with_file);
        check(c.status.success() && c.stdout.is_empty(), || {
            format!("{label} --output: unexpected stdout or failure")
        })?;
        let written = std::fs::read(&path).map_err(|e| e.to_string())?;
        check(written == a.stdout, || {
            format!("{label}: file differs from stdout")
        })?;
    }
    Ok(format!(
        "{} invocations byte-identical across runs and --output",
        invocations.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("inclusion suite", inclusion_suite),
        ("weight-bound identity", weight_bound_identity),
        ("worked δ table", worked_delta_table),
        ("ε ≡ 1 closed form", eps_one_closed_form),
        ("closed-form norm oracle", closed_form_norms),
        ("continuity bound", continuity_bound),
        ("oracle equivalence", oracle_equivalence),
        ("monotonicity suites", monotonicity),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
