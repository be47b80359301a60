//! Closed-form germs and sequences with known norm behavior.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germspace::{CompactGrid, Layout, TruncatedElement};
use crate::multiindex::{log_factorial, MultiIndex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub alpha: MultiIndex,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `f(x) = Π_j 1/(a_j - x_j)`, so `c_α(x) = Π_j (a_j - x_j)^{-(α_j+1)}`.
    Cauchy { poles: Vec<f64> },
    /// `f(x) = exp(Σ_j x_j)`, so `c_α(x) = exp(Σ_j x_j) / α!`.
    Exponential,
    /// `f(x) = Σ_β p_β x^β`.
    Polynomial { terms: Vec<PolyTerm> },
    /// Scalar mode, `‖x_α‖ = r^{|α|}`.
    GeometricScalar { ratio: f64 },
    /// Scalar mode, `‖x_α‖ = |α|!`; lies in no step space.
    FactorialScalar,
}

impl Family {
    pub fn is_germ(&self) -> bool {
        matches!(
            self,
            Family::Cauchy { .. } | Family::Exponential | Family::Polynomial { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Family::Cauchy { .. } => "cauchy",
            Family::Exponential => "exponential",
            Family::Polynomial { .. } => "polynomial",
            Family::GeometricScalar { .. } => "geometric_scalar",
            Family::FactorialScalar => "factorial_scalar",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub family: Family,
    pub dim: usize,
    pub order_cap: u32,
    /// Required for germ families, ignored otherwise.
    #[serde(skip)]
    pub grid: Option<Arc<CompactGrid>>,
}

impl FamilySpec {
    pub fn new(family: Family, dim: usize, order_cap: u32, grid: Option<Arc<CompactGrid>>) -> Self {
        Self {
            family,
            dim,
            order_cap,
            grid,
        }
    }

    /// Parse a family from its kind and a `key=value,…` parameter string.
    ///
    /// * `cauchy`: `a=2` (every axis) or `a=2;3` (per axis)
    /// * `geometric_scalar`: `r=3`
    /// * `polynomial`: one `alpha=coeff` per term, entries of `alpha`
    ///   separated by `.`, e.g. `0=1,2=1` for `1 + x²` or `1.1=3` for `3xy`
    /// * `exponential`, `factorial_scalar`: no parameters
    ///
    /// Germ families are sampled on `{0, 1/(m-1), …, 1}^d` with
    /// `m = grid_points`.
    pub fn parse(
        kind: &str,
        params: &str,
        dim: usize,
        order_cap: u32,
        grid_points: usize,
    ) -> Result<Self> {
        let pairs = parse_pairs(params)?;
        let get = |key: &str| {
            pairs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
        };
        let family = match kind {
            "cauchy" => {
                let raw = get("a").ok_or_else(|| params_err("cauchy needs a=<pole>"))?;
                let mut poles = raw
                    .split(';')
                    .map(parse_f64)
                    .collect::<Result<Vec<f64>>>()?;
                if poles.len() == 1 {
                    poles = vec![poles[0]; dim];
                }
                Family::Cauchy { poles }
            }
            "exponential" => Family::Exponential,
            "polynomial" => {
                let terms = pairs
                    .iter()
                    .map(|(k, v)| {
                        let alpha = k
                            .split('.')
                            .map(|t| {
                                t.parse::<u32>()
                                    .map_err(|_| params_err(format!("bad multi-index {k:?}")))
                            })
                            .collect::<Result<Vec<u32>>>()?;
                        Ok(PolyTerm {
                            alpha: MultiIndex::new(alpha),
                            coeff: parse_f64(v)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Family::Polynomial { terms }
            }
            "geometric_scalar" | "geometric" => {
                let r = get("r")
                    .or_else(|| get("ratio"))
                    .ok_or_else(|| params_err("geometric_scalar needs r=<ratio>"))?;
                Family::GeometricScalar {
                    ratio: parse_f64(r)?,
                }
            }
            "factorial_scalar" | "factorial" => Family::FactorialScalar,
            other => return Err(params_err(format!("unknown family {other:?}"))),
        };
        let grid = if family.is_germ() {
            Some(Arc::new(CompactGrid::unit_cube(dim, grid_points)?))
        } else {
            None
        };
        Ok(Self::new(family, dim, order_cap, grid))
    }

    /// JSON header recorded in germ files.
    pub fn provenance(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("family spec serializes")
    }
}

fn params_err(msg: impl Into<String>) -> Error {
    Error::FamilyParams(msg.into())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| params_err(format!("bad number {s:?}")))
}

fn parse_pairs(params: &str) -> Result<Vec<(String, String)>> {
    params
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| params_err(format!("expected key=value, got {t:?}")))
        })
        .collect()
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Fill in the truncated Taylor data of a family.
pub fn generate(spec: &FamilySpec) -> Result<TruncatedElement> {
    let layout = Layout::new(spec.dim, spec.order_cap)?;
    let grid = if spec.family.is_germ() {
        let g = spec
            .grid
            .clone()
            .ok_or_else(|| params_err(format!("{} needs a grid", spec.family.kind())))?;
        Some(g)
    } else {
        None
    };
    let points: Vec<Vec<f64>> = grid
        .as_ref()
        .map(|g| g.points().to_vec())
        .unwrap_or_default();

    match &spec.family {
        Family::Cauchy { poles } => {
            if poles.len() != spec.dim {
                return Err(params_err(format!(
                    "cauchy needs {} poles, got {}",
                    spec.dim,
                    poles.len()
                )));
            }
            let g = grid.as_ref().expect("germ family has a grid");
            for (axis, &pole) in poles.iter().enumerate() {
                let max = g.max_coordinate(axis);
                if pole.is_nan() || pole <= max {
                    return Err(Error::PoleInsideK { axis, pole, max });
                }
            }
            TruncatedElement::from_fn(layout, grid, |alpha, out| {
                for (v, x) in out.iter_mut().zip(&points) {
                    *v = alpha
                        .entries()
                        .iter()
                        .zip(poles.iter().zip(x))
                        .map(|(&a, (&pole, &xj))| (pole - xj).powi(-(a as i32 + 1)))
                        .product();
                }
            })
        }
        Family::Exponential => TruncatedElement::from_fn(layout, grid, |alpha, out| {
            let lf = log_factorial(alpha);
            for (v, x) in out.iter_mut().zip(&points) {
                *v = (x.iter().sum::<f64>() - lf).exp();
            }
        }),
        Family::Polynomial { terms } => {
            if let Some(t) = terms.iter().find(|t| t.alpha.dim() != spec.dim) {
                return Err(params_err(format!(
                    "term {} does not have {} entries",
                    t.alpha, spec.dim
                )));
            }
            TruncatedElement::from_fn(layout, grid, |alpha, out| {
                // c_α(x) = Σ_{β ≥ α} p_β Π_j C(β_j, α_j) x_j^{β_j - α_j}
                for (v, x) in out.iter_mut().zip(&points) {
                    *v = terms
                        .iter()
                        .filter(|t| alpha.le(&t.alpha))
                        .map(|t| {
                            let factor: f64 = alpha
                                .entries()
                                .iter()
                                .zip(t.alpha.entries())
                                .zip(x)
                                .map(|((&a, &b), &xj)| binomial_f64(b, a) * xj.powi((b - a) as i32))
                                .product();
                            t.coeff * factor
                        })
                        .sum();
                }
            })
        }
        Family::GeometricScalar { ratio } => {
            if !(ratio.is_finite() && *ratio > 0.0) {
                return Err(params_err(format!("ratio must be positive, got {ratio}")));
            }
            TruncatedElement::from_fn(layout, None, |alpha, out| {
                out[0] = ratio.powi(alpha.order() as i32);
            })
        }
        Family::FactorialScalar => TruncatedElement::from_fn(layout, None, |alpha, out| {
            out[0] = (1..=alpha.order()).map(f64::from).product();
        }),
    }
}
