//! Seeded random elements for the verification suites.
//!
//! Sample `i` of a run with seed `s` draws from ChaCha8 seeded with `s` on
//! stream `i`, so any single sample can be regenerated from `(s, i)` alone.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::germspace::{CompactGrid, Layout, TruncatedElement};
use crate::norms::WeightSequence;

/// Probability that a payload entry is exactly zero.
const ZERO_PROBABILITY: f64 = 0.1;

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_sign(rng: &mut impl Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Random element with `log|x_{α,j}| = |α|·drift + U(-spread, spread)`,
/// where `drift ∈ [-3, 3]` is drawn once per element.
pub fn random_element(
    layout: Arc<Layout>,
    grid: Option<Arc<CompactGrid>>,
    spread: f64,
    rng: &mut impl Rng,
) -> Result<TruncatedElement> {
    let drift = rng.gen_range(-3.0..=3.0);
    TruncatedElement::from_fn(layout, grid, |alpha, out| {
        for v in out.iter_mut() {
            if rng.gen_bool(ZERO_PROBABILITY) {
                *v = 0.0;
            } else {
                let log = f64::from(alpha.order()) * drift + rng.gen_range(-spread..=spread);
                *v = random_sign(rng) * log.exp();
            }
        }
    })
}

/// Random element on the unit sphere of `|·|_δ`.
///
/// Entries are `±u · δ_n^{-n}` with `u ∈ (0, 1]` biased toward 1, then the
/// whole element is divided by the largest `u`, so `|x|_δ = 1` is attained.
/// The draw is done on logarithms; `δ_n^{-n}` itself is never formed unless
/// it fits in an `f64`.
pub fn random_unit_element(
    layout: Arc<Layout>,
    grid: Option<Arc<CompactGrid>>,
    delta: &WeightSequence,
    rng: &mut impl Rng,
) -> Result<TruncatedElement> {
    let p = grid.as_ref().map_or(1, |g| g.len());
    let mut logs = Vec::with_capacity(layout.len() * p);
    let mut signs = Vec::with_capacity(layout.len() * p);
    let mut top = f64::NEG_INFINITY;
    for alpha in layout.indices() {
        let n = alpha.order();
        let weight = if n == 0 {
            0.0
        } else {
            -f64::from(n) * delta.log_value(n as usize)
        };
        for _ in 0..p {
            if rng.gen_bool(ZERO_PROBABILITY) {
                logs.push(f64::NEG_INFINITY);
                signs.push(0.0);
            } else {
                let u: f64 = 1.0 - rng.gen::<f64>();
                let log_u = 0.25 * u.ln();
                top = top.max(log_u);
                logs.push(log_u + weight);
                signs.push(random_sign(rng));
            }
        }
    }
    if top == f64::NEG_INFINITY {
        return TruncatedElement::zeros(layout, grid);
    }
    let values = logs
        .iter()
        .zip(&signs)
        .map(|(l, s)| if *s == 0.0 { 0.0 } else { s * (l - top).exp() })
        .collect();
    TruncatedElement::from_values(layout, grid, values)
}

/// Scalar-mode element with `‖x_α‖ = δ_{|α|}^{-|α|}` (and 1 at `α = 0`),
/// which has `|x|_δ = 1` with every coefficient on the boundary.
pub fn boundary_element(layout: Arc<Layout>, delta: &WeightSequence) -> Result<TruncatedElement> {
    TruncatedElement::from_fn(layout, None, |alpha, out| {
        let n = alpha.order();
        out[0] = if n == 0 {
            1.0
        } else {
            (-f64::from(n) * delta.log_value(n as usize)).exp()
        };
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::seminorm_delta;

    #[test]
    fn streams_are_reproducible() {
        let layout = Layout::new(2, 6).unwrap();
        let a = random_element(layout.clone(), None, 2.0, &mut sample_rng(7, 3)).unwrap();
        let b = random_element(layout.clone(), None, 2.0, &mut sample_rng(7, 3)).unwrap();
        let c = random_element(layout, None, 2.0, &mut sample_rng(7, 4)).unwrap();
        assert_eq!(a.dense_values(), b.dense_values());
        assert_ne!(a.dense_values(), c.dense_values());
    }

    #[test]
    fn unit_elements_have_unit_seminorm() {
        let delta =
            WeightSequence::new((0..=15).map(|n| 3.0 / (1.0 + n as f64)).collect()).unwrap();
        let layout = Layout::new(2, 15).unwrap();
        let grid = Arc::new(CompactGrid::unit_cube(2, 2).unwrap());
        for i in 0..50 {
            let x = random_unit_element(
                layout.clone(),
                Some(grid.clone()),
                &delta,
                &mut sample_rng(1, i),
            )
            .unwrap();
            let s = seminorm_delta(&x, &delta).unwrap().value.log_value();
            assert!(s.abs() < 1e-12, "sample {i}: {s}");
        }
    }

    #[test]
    fn boundary_has_unit_seminorm() {
        let delta =
            WeightSequence::new((0..=12).map(|n| 1.0 / (n.max(1) as f64)).collect()).unwrap();
        let x = boundary_element(Layout::new(3, 12).unwrap(), &delta).unwrap();
        let s = seminorm_delta(&x, &delta).unwrap().value.log_value();
        assert!(s.abs() < 1e-12);
    }
}
