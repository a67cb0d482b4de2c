//! Probabilistic user-browsing models for ranked result pages.
//!
//! One state machine covers the common linear browsing models (geometric,
//! cascade, cascade with abandonment) and extends to grid layouts with row
//! skipping, row-level decay and middle bias. The crate provides:
//!
//! * closed-form examination/selection probabilities ([`linear`], [`grid`]),
//! * the metrics built on them: RBP, ERR and group exposure ([`metrics`]),
//! * a Monte-Carlo executor of the state machines used as an oracle ([`sim`]).
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64` or `f32`.
//!
//! ```
//! use browselab::{attention, preset, LayoutSpec, Preset, RelevanceVector};
//!
//! let config = preset(Preset::Geometric { lambda: 0.8 }).unwrap();
//! let relevance = RelevanceVector::binary(vec![1, 0, 1]).unwrap();
//! let layout = LayoutSpec::linear_vertical(3).unwrap();
//! let profile = attention(&config, &relevance, &layout).unwrap();
//! assert!((profile.profile.examine[2] - 0.64f64).abs() < 1e-12);
//! ```

pub mod error;
pub mod grid;
pub mod layout;
pub mod linear;
pub mod metrics;
pub mod model;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use grid::{
    examine_prob_grid, middle_bias_weight, paper_formula_examine_prob, select_prob_grid,
    GridAttentionProfile, LiteralProfile, PaperVariant,
};
pub use layout::{CellAddress, LayoutKind, LayoutSpec};
pub use linear::{examine_prob_linear, select_prob_linear, AttentionProfile};
pub use metrics::{err, group_exposure, rbp, GroupAssignment};
pub use model::{
    default_graded_map, preset, preset_provenance, selection_prob, validate_config, AbandonModel,
    BrowsingConfig, GradeMap, GridBehavior, MiddleBias, Preset, RelevanceVector, RowDecay,
    SelectionModel, Severity, Violation, PRESET_NAMES,
};
pub use scalar::Scalar;
pub use sim::{
    empirical_profile, simulate, simulate_partitioned, validate, EmpiricalProfile,
    SimulationReport, ValidationVerdict,
};

pub type BrowsingConfig64 = BrowsingConfig<f64>;
pub type BrowsingConfig32 = BrowsingConfig<f32>;
pub type AttentionProfile64 = AttentionProfile<f64>;
pub type AttentionProfile32 = AttentionProfile<f32>;
pub type GridAttentionProfile64 = GridAttentionProfile<f64>;
pub type GridAttentionProfile32 = GridAttentionProfile<f32>;

/// Closed-form attention for any layout: linear vertical layouts use the
/// linear model (row quantities then describe one item per row), every other
/// layout the normative grid model.
pub fn attention<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    layout: &LayoutSpec,
) -> Result<GridAttentionProfile<T>> {
    if layout.kind() != LayoutKind::LinearVertical {
        return examine_prob_grid(config, relevance, layout);
    }
    if relevance.len() != layout.len() {
        return Err(Error::LengthMismatch {
            what: "relevance vs layout cells",
            expected: layout.len(),
            found: relevance.len(),
        });
    }
    if let RowDecay::BetaBoost { .. } = config.grid.row_decay {
        return Err(Error::BetaBoostNotAllowed);
    }
    let profile = examine_prob_linear(config, relevance)?;
    Ok(GridAttentionProfile {
        abandon_cell: profile.total_abandon,
        abandon_row: T::zero(),
        row_reach: profile.examine.clone(),
        row_skipped: vec![T::zero(); profile.len()],
        profile,
    })
}
