//! Norm systems on truncated analytic germs and weighted sequence spaces.
//!
//! Elements are finite Taylor data `c_α`, `|α| ≤ N`, with payloads in a
//! Banach space `X` that is either the scalars (scalar mode) or `C(K)`
//! sampled on a grid of the compact set `K` (germ mode). On top of that the
//! crate evaluates
//!
//! * the step norms `‖x‖_k = sup_α ‖x_α‖ k^{-|α|}` ([`norms::norm_k`]),
//! * the weighted norms `|x|_δ = sup_α ‖x_α‖ δ_{|α|}^{|α|}`
//!   ([`norms::seminorm_delta`]),
//! * the construction of a null sequence `δ` from a positive sequence `ε`
//!   together with the block decomposition certifying that the unit ball of
//!   `|·|_δ` lies in `Σ_k ε_k B_k` ([`lemma`]).
//!
//! All magnitudes are handled in the log domain through [`LogMagnitude`], so
//! quantities such as `k^{40}` or `δ_n^{-n}` never have to be formed as
//! plain floats.

pub mod error;
pub mod families;
pub mod germspace;
pub mod lemma;
pub mod logmag;
pub mod multiindex;
pub mod norms;
pub mod sampling;

pub use error::{Error, Result};
pub use germspace::{CompactGrid, GermFile, Layout, TruncatedElement};
pub use lemma::{
    build_delta, build_delta_with_margin, decompose, verify_inclusion, verify_weight_bound,
    BlockDecomposition, Certificate, DeltaSystem, EpsSequence,
};
pub use logmag::LogMagnitude;
pub use multiindex::{log_factorial, shell, shell_count, MultiIndex};
pub use norms::{
    classify_growth, continuity_constant, norm_k, seminorm_delta, GrowthReport, NormReport,
    WeightSequence,
};
