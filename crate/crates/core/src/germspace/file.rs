use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CompactGrid, Layout, TruncatedElement};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadMode {
    Germ,
    Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub alpha: MultiIndex,
    pub values: Vec<f64>,
}

/// On-disk JSON form of a [`TruncatedElement`].
///
/// Coefficients may be listed in any order but must cover every `|α| ≤ N`
/// exactly once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GermFile {
    pub dim: usize,
    pub order_cap: u32,
    pub mode: PayloadMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<Vec<f64>>>,
    /// Generator provenance, e.g. a serialized family spec.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<serde_json::Value>,
    pub coeffs: Vec<CoeffEntry>,
}

impl GermFile {
    pub fn from_element(e: &TruncatedElement, family: Option<serde_json::Value>) -> Self {
        GermFile {
            dim: e.dim(),
            order_cap: e.order_cap(),
            mode: if e.is_germ() {
                PayloadMode::Germ
            } else {
                PayloadMode::Scalar
            },
            grid: e.grid().map(|g| g.points().to_vec()),
            family,
            coeffs: e
                .iter()
                .map(|(alpha, values)| CoeffEntry {
                    alpha: alpha.clone(),
                    values,
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("germ file serializes")
    }

    /// Validate shape and completeness, then build the element.
    pub fn into_element(self) -> Result<TruncatedElement> {
        if self.dim == 0 {
            return Err(Error::ShapeMismatch("dim must be positive".into()));
        }
        let grid = match (self.mode, self.grid) {
            (PayloadMode::Germ, Some(points)) => {
                Some(Arc::new(CompactGrid::new(self.dim, points, "file grid")?))
            }
            (PayloadMode::Germ, None) => {
                return Err(Error::ShapeMismatch("germ mode requires a grid".into()))
            }
            (PayloadMode::Scalar, Some(_)) => {
                return Err(Error::ShapeMismatch(
                    "scalar mode must not carry a grid".into(),
                ))
            }
            (PayloadMode::Scalar, None) => None,
        };
        let layout = Layout::new(self.dim, self.order_cap)?;
        let p = grid.as_ref().map_or(1, |g| g.len());
        let mut values = vec![0.0; layout.len() * p];
        let mut seen = HashSet::with_capacity(layout.len());
        for entry in self.coeffs {
            let pos = layout.position(&entry.alpha)?;
            if entry.values.len() != p {
                return Err(Error::ShapeMismatch(format!(
                    "coefficient {} has {} values, expected {p}",
                    entry.alpha,
                    entry.values.len()
                )));
            }
            if !seen.insert(pos) {
                return Err(Error::ShapeMismatch(format!(
                    "coefficient {} listed twice",
                    entry.alpha
                )));
            }
            values[pos * p..(pos + 1) * p].copy_from_slice(&entry.values);
        }
        if seen.len() != layout.len() {
            let missing = layout
                .indices()
                .iter()
                .enumerate()
                .find(|(pos, _)| !seen.contains(pos))
                .map(|(_, a)| a.clone())
                .expect("some index is missing");
            return Err(Error::Incomplete(format!(
                "{} of {} coefficients present, first missing {missing}",
                seen.len(),
                layout.len()
            )));
        }
        TruncatedElement::from_values(layout, grid, values)
    }
}
