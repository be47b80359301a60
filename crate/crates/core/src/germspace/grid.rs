use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

/// A finite sample of the compact set `K ⊂ R^d`.
///
/// Sup norms over `K` are replaced by maxima over these points. Two grids
/// are equal when their points are; the label is descriptive only.
#[derive(Clone, Debug, Serialize)]
pub struct CompactGrid {
    dim: usize,
    points: Vec<Vec<f64>>,
    label: String,
}

impl CompactGrid {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid has no points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidGrid(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidGrid(format!("point {i} is not finite")));
            }
        }
        let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
        sorted.sort_by(|a, b| lex_cmp(a, b));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGrid(
                "points are not pairwise distinct".into(),
            ));
        }
        Ok(Self {
            dim,
            points,
            label: label.into(),
        })
    }

    /// Tensor grid `axes[0] × … × axes[d-1]`, last axis varying fastest.
    pub fn product(axes: &[Vec<f64>], label: impl Into<String>) -> Result<Self> {
        let mut points = vec![Vec::new()];
        for axis in axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        Self::new(axes.len(), points, label)
    }

    /// `{0, 1/(m-1), …, 1}^d`, which contains every corner of the unit cube
    /// when `per_axis ≥ 2`.
    pub fn unit_cube(dim: usize, per_axis: usize) -> Result<Self> {
        if per_axis == 0 {
            return Err(Error::InvalidGrid(
                "need at least one point per axis".into(),
            ));
        }
        let axis: Vec<f64> = if per_axis == 1 {
            vec![0.0]
        } else {
            (0..per_axis)
                .map(|i| i as f64 / (per_axis - 1) as f64)
                .collect()
        };
        Self::product(
            &vec![axis; dim],
            format!("[0,1]^{dim} grid, {per_axis} per axis"),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_coordinate(&self, axis: usize) -> f64 {
        self.points
            .iter()
            .map(|p| p[axis])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl PartialEq for CompactGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}
