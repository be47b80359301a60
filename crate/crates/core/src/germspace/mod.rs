//! Truncated elements `(x_α)_{|α| ≤ N}` of the sequence space `F`, and of
//! `A(K)` through `X = C(K)` sampled on a grid.
//!
//! Coefficients are stored Taylor-normalized (`c_α = f^{(α)} / α!`), never as
//! raw derivatives. Storage is dense over a contiguous window of shells;
//! every coefficient outside that window is exactly zero. Masking by order
//! ranges therefore never touches the payloads it does not keep.

mod file;
mod grid;

use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

pub use file::{CoeffEntry, GermFile, PayloadMode};
pub use grid::CompactGrid;

use crate::error::{Error, Result};
use crate::logmag::LogMagnitude;
use crate::multiindex::{shell, total_count, MultiIndex};

/// Upper bound on `C(N + d, d)` accepted for a single layout.
pub const MAX_COEFFICIENTS: u64 = 20_000_000;

/// The index set `{α ∈ N_0^d : |α| ≤ N}`, ordered shell by shell and
/// lexicographically inside each shell.
#[derive(Debug)]
pub struct Layout {
    dim: usize,
    order_cap: u32,
    indices: Vec<MultiIndex>,
    // offsets[n]..offsets[n + 1] are the positions of shell n.
    offsets: Vec<usize>,
    lookup: HashMap<MultiIndex, usize>,
}

impl Layout {
    pub fn new(dim: usize, order_cap: u32) -> Result<Arc<Layout>> {
        if dim == 0 {
            return Err(Error::ShapeMismatch("dimension must be positive".into()));
        }
        let count = total_count(dim, order_cap)?;
        if count > MAX_COEFFICIENTS {
            return Err(Error::TooLarge {
                dim,
                order_cap,
                count,
            });
        }
        let mut indices = Vec::with_capacity(count as usize);
        let mut offsets = Vec::with_capacity(order_cap as usize + 2);
        for n in 0..=order_cap {
            offsets.push(indices.len());
            indices.extend(shell(dim, n));
        }
        offsets.push(indices.len());
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Ok(Arc::new(Layout {
            dim,
            order_cap,
            indices,
            offsets,
            lookup,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order_cap(&self) -> u32 {
        self.order_cap
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Positions of the shells `lo..hi` (both clamped to `N + 1`).
    pub fn shell_positions(&self, lo: u32, hi: u32) -> Range<usize> {
        let cap = self.order_cap + 1;
        let lo = lo.min(cap) as usize;
        let hi = hi.min(cap) as usize;
        if lo >= hi {
            return self.offsets[lo]..self.offsets[lo];
        }
        self.offsets[lo]..self.offsets[hi]
    }

    pub fn position(&self, alpha: &MultiIndex) -> Result<usize> {
        if alpha.dim() != self.dim {
            return Err(Error::IndexDimension {
                alpha: alpha.clone(),
                got: alpha.dim(),
                dim: self.dim,
            });
        }
        self.lookup
            .get(alpha)
            .copied()
            .ok_or_else(|| Error::IndexOutOfRange {
                alpha: alpha.clone(),
                order_cap: self.order_cap,
            })
    }

    fn same_as(&self, other: &Layout) -> bool {
        std::ptr::eq(self, other) || (self.dim == other.dim && self.order_cap == other.order_cap)
    }
}

/// A truncated element of `F`: a payload vector for every `|α| ≤ N`.
///
/// In scalar mode the payload has length 1 and stands for `‖x_α‖` itself.
/// In germ mode it holds the values of `c_α` at the points of a
/// [`CompactGrid`].
#[derive(Clone, Debug)]
pub struct TruncatedElement {
    layout: Arc<Layout>,
    grid: Option<Arc<CompactGrid>>,
    payload_len: usize,
    // Shells support.0..support.1 are stored; all others are zero.
    support: (u32, u32),
    values: Vec<f64>,
}

impl TruncatedElement {
    /// The zero element. `grid` selects germ mode.
    pub fn zeros(layout: Arc<Layout>, grid: Option<Arc<CompactGrid>>) -> Result<Self> {
        let payload_len = payload_len_for(&layout, grid.as_deref())?;
        Ok(Self {
            layout,
            grid,
            payload_len,
            support: (0, 0),
            values: Vec::new(),
        })
    }

    /// Build an element by filling the payload of every `α` in layout order.
    pub fn from_fn(
        layout: Arc<Layout>,
        grid: Option<Arc<CompactGrid>>,
        mut fill: impl FnMut(&MultiIndex, &mut [f64]),
    ) -> Result<Self> {
        let p = payload_len_for(&layout, grid.as_deref())?;
        let mut values = vec![0.0; layout.len() * p];
        for (alpha, chunk) in layout.indices().iter().zip(values.chunks_exact_mut(p)) {
            fill(alpha, chunk);
        }
        Self::from_values(layout, grid, values)
    }

    /// Dense values in layout order, `payload_len` entries per multi-index.
    pub fn from_values(
        layout: Arc<Layout>,
        grid: Option<Arc<CompactGrid>>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let p = payload_len_for(&layout, grid.as_deref())?;
        if values.len() != layout.len() * p {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values, got {}",
                layout.len() * p,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                alpha: layout.indices()[bad / p].clone(),
            });
        }
        let support = (0, layout.order_cap() + 1);
        Ok(Self {
            layout,
            grid,
            payload_len: p,
            support,
            values,
        })
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn order_cap(&self) -> u32 {
        self.layout.order_cap()
    }

    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    pub fn grid(&self) -> Option<&Arc<CompactGrid>> {
        self.grid.as_ref()
    }

    pub fn is_germ(&self) -> bool {
        self.grid.is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Payload at `α` (zeros outside the stored window).
    pub fn coeff(&self, alpha: &MultiIndex) -> Result<Vec<f64>> {
        let pos = self.layout.position(alpha)?;
        Ok(self
            .payload_at(pos)
            .map_or_else(|| vec![0.0; self.payload_len], <[f64]>::to_vec))
    }

    /// All values in layout order, zeros included.
    pub fn dense_values(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.layout.len() * self.payload_len];
        let stored = self.stored_positions();
        out[stored.start * self.payload_len..stored.end * self.payload_len]
            .copy_from_slice(&self.values);
        out
    }

    /// Shell window `lo..hi` that may hold nonzero payloads.
    pub(crate) fn support(&self) -> (u32, u32) {
        self.support
    }

    /// Positions whose payload is stored; everything else is zero.
    pub(crate) fn stored_positions(&self) -> Range<usize> {
        self.layout.shell_positions(self.support.0, self.support.1)
    }

    pub(crate) fn payload_at(&self, pos: usize) -> Option<&[f64]> {
        let stored = self.stored_positions();
        stored.contains(&pos).then(|| {
            let start = (pos - stored.start) * self.payload_len;
            &self.values[start..start + self.payload_len]
        })
    }

    /// `log max_j |payload_j|` at position `pos`, with the first maximizing
    /// grid index.
    pub(crate) fn payload_sup_at(&self, pos: usize) -> (LogMagnitude, usize) {
        let Some(payload) = self.payload_at(pos) else {
            return (LogMagnitude::ZERO, 0);
        };
        let mut best = 0.0;
        let mut arg = 0;
        for (j, v) in payload.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                arg = j;
            }
        }
        (LogMagnitude::from_magnitude(best), arg)
    }

    /// `log ‖x_α‖`, the log of the largest absolute payload entry.
    pub fn payload_sup(&self, alpha: &MultiIndex) -> Result<LogMagnitude> {
        let pos = self.layout.position(alpha)?;
        Ok(self.payload_sup_at(pos).0)
    }

    /// `log max_{|α| = n} ‖x_α‖`.
    pub fn shell_sup(&self, n: u32) -> LogMagnitude {
        self.layout
            .shell_positions(n, n + 1)
            .map(|pos| self.payload_sup_at(pos).0)
            .fold(LogMagnitude::ZERO, LogMagnitude::max)
    }

    /// Multiply every payload entry by `lambda`.
    pub fn scale(&self, lambda: f64) -> TruncatedElement {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= lambda);
        out
    }

    pub fn same_shape(&self, other: &TruncatedElement) -> bool {
        self.layout.same_as(&other.layout)
            && self.payload_len == other.payload_len
            && match (&self.grid, &other.grid) {
                (None, None) => true,
                (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a == b,
                _ => false,
            }
    }

    /// Coefficient-wise sum.
    ///
    /// Entries outside the other operand's stored window are copied, not
    /// added to zero, so `x + 0` reproduces `x` bit for bit.
    pub fn add(&self, other: &TruncatedElement) -> Result<TruncatedElement> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch(
                "operands differ in dimension, order cap, payload length or grid".into(),
            ));
        }
        if self.support.0 >= self.support.1 {
            return Ok(other.clone());
        }
        if other.support.0 >= other.support.1 {
            return Ok(self.clone());
        }
        let support = (
            self.support.0.min(other.support.0),
            self.support.1.max(other.support.1),
        );
        let hull = self.layout.shell_positions(support.0, support.1);
        let p = self.payload_len;
        let mut values = vec![0.0; hull.len() * p];
        let a = self.stored_positions();
        let b = other.stored_positions();
        values[(a.start - hull.start) * p..(a.end - hull.start) * p].copy_from_slice(&self.values);
        for pos in b.clone() {
            let dst = (pos - hull.start) * p;
            let src = (pos - b.start) * p;
            let target = &mut values[dst..dst + p];
            if a.contains(&pos) {
                for (t, s) in target.iter_mut().zip(&other.values[src..src + p]) {
                    *t += s;
                }
            } else {
                target.copy_from_slice(&other.values[src..src + p]);
            }
        }
        Ok(TruncatedElement {
            layout: self.layout.clone(),
            grid: self.grid.clone(),
            payload_len: p,
            support,
            values,
        })
    }

    /// Keep the shells `lo ≤ |α| < hi`, zero everything else.
    pub fn restrict_shells(&self, lo: u32, hi: u32) -> Result<TruncatedElement> {
        let cap = self.order_cap();
        if lo > hi || hi > cap + 1 {
            return Err(Error::InvalidRange {
                lo,
                hi,
                order_cap: cap,
            });
        }
        let new_lo = lo.max(self.support.0);
        let new_hi = hi.min(self.support.1);
        let mut out = TruncatedElement {
            layout: self.layout.clone(),
            grid: self.grid.clone(),
            payload_len: self.payload_len,
            support: (lo, lo),
            values: Vec::new(),
        };
        if new_lo < new_hi {
            let stored = self.stored_positions();
            let keep = self.layout.shell_positions(new_lo, new_hi);
            let p = self.payload_len;
            out.support = (new_lo, new_hi);
            out.values = self.values
                [(keep.start - stored.start) * p..(keep.end - stored.start) * p]
                .to_vec();
        }
        Ok(out)
    }

    /// The same data truncated to a smaller order cap.
    pub fn truncate(&self, order_cap: u32) -> Result<TruncatedElement> {
        if order_cap > self.order_cap() {
            return Err(Error::InvalidRange {
                lo: 0,
                hi: order_cap + 1,
                order_cap: self.order_cap(),
            });
        }
        if order_cap == self.order_cap() {
            return Ok(self.clone());
        }
        let layout = Layout::new(self.dim(), order_cap)?;
        let p = self.payload_len;
        let mut dense = self.dense_values();
        dense.truncate(layout.len() * p);
        Self::from_values(layout, self.grid.clone(), dense)
    }

    /// Multi-index, payload pairs in layout order (zeros included).
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, Vec<f64>)> + '_ {
        let zeros = vec![0.0; self.payload_len];
        self.layout
            .indices()
            .iter()
            .enumerate()
            .map(move |(pos, alpha)| {
                (
                    alpha,
                    self.payload_at(pos)
                        .map_or_else(|| zeros.clone(), <[f64]>::to_vec),
                )
            })
    }
}

impl PartialEq for TruncatedElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.dense_values() == other.dense_values()
    }
}

fn payload_len_for(layout: &Layout, grid: Option<&CompactGrid>) -> Result<usize> {
    match grid {
        None => Ok(1),
        Some(g) if g.dim() != layout.dim() => Err(Error::ShapeMismatch(format!(
            "grid dimension {} differs from element dimension {}",
            g.dim(),
            layout.dim()
        ))),
        Some(g) => Ok(g.len()),
    }
}
