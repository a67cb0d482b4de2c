//! Examination and selection probabilities on grid layouts.
//!
//! The normative model walks rows top to bottom. Before every row after the
//! first the user survives with ρ (otherwise abandons). Each row is skipped
//! whole with γ; otherwise its cells are read left to right with the same
//! examine → select? → abandon? → continue step as a linear list, using the
//! middle-biased ψ'. With row survival `S_m = Π_{j in row m} (1 - ψ'(j))(1 - α(j))`:
//!
//! ```text
//! P[E(k, c)] = ρ^(k-1) · Π_{m<k} [γ + (1 - γ) S_m] · (1 - γ) · Π_{c'<c} (1 - ψ'(k, c'))(1 - α(k, c'))
//! ```
//!
//! [`paper_formula_examine_prob`] evaluates the published slower-decay and
//! row-skip formulas as written (after index repairs) for comparison.

use crate::error::{Error, Result};
use crate::layout::{CellAddress, LayoutSpec};
use crate::linear::{position_params, AttentionProfile};
use crate::model::{BrowsingConfig, MiddleBias, RelevanceVector, RowDecay};
use crate::scalar::Scalar;

/// Attention profile plus row-level quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAttentionProfile<T> {
    pub profile: AttentionProfile<T>,
    /// Abandonment after a non-selected cell.
    pub abandon_cell: T,
    /// Abandonment at a row boundary (1 - ρ).
    pub abandon_row: T,
    /// Probability the user arrives at each row (after surviving the boundary).
    pub row_reach: Vec<T>,
    /// Probability each row is skipped, given it was reached.
    pub row_skipped: Vec<T>,
}

impl<T> AsRef<AttentionProfile<T>> for GridAttentionProfile<T> {
    fn as_ref(&self) -> &AttentionProfile<T> {
        &self.profile
    }
}

/// Gaussian column weight `exp(-(col - c_mid)^2 / (2 sigma^2))`, `c_mid = (width + 1) / 2`.
pub fn middle_bias_weight<T: Scalar>(col: usize, row_width: usize, sigma: T) -> Result<T> {
    if col == 0 || col > row_width {
        return Err(Error::InvalidCell { row: 0, col });
    }
    if !(sigma > T::zero() && sigma.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "sigma".into(),
            value: sigma.as_f64(),
            range: "(0, inf)",
        });
    }
    let mid = T::lit((row_width as f64 + 1.0) / 2.0);
    let d = T::lit(col as f64) - mid;
    Ok((-(d * d) / (T::lit(2.0) * sigma * sigma)).exp())
}

/// ψ'(cell) and α(cell) for every rank of `layout`.
pub(crate) fn cell_params<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    layout: &LayoutSpec,
) -> Result<Vec<(T, T)>> {
    if relevance.len() != layout.len() {
        return Err(Error::LengthMismatch {
            what: "relevance vs layout cells",
            expected: layout.len(),
            found: relevance.len(),
        });
    }
    layout
        .cells()
        .map(|(rank, CellAddress { row, col })| {
            let (psi, alpha) = position_params(config, relevance, rank)?;
            let psi = match config.grid.middle_bias {
                MiddleBias::None => psi,
                MiddleBias::Gaussian { sigma } => {
                    psi * middle_bias_weight(col, layout.row_lengths()[row - 1], sigma)?
                }
            };
            Ok((psi, alpha))
        })
        .collect()
}

/// Normative grid closed form. Rejects beta row decay.
pub fn examine_prob_grid<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    layout: &LayoutSpec,
) -> Result<GridAttentionProfile<T>> {
    let rho = config.row_continuation()?;
    let gamma = config.grid.row_skip;
    let params = cell_params(config, relevance, layout)?;

    let n = layout.len();
    let mut examine = Vec::with_capacity(n);
    let mut select = Vec::with_capacity(n);
    let mut row_reach = Vec::with_capacity(layout.rows());
    let mut abandon_cell = T::zero();
    let mut abandon_row = T::zero();
    // probability of standing at the next row boundary
    let mut arrive = T::one();
    for row in 1..=layout.rows() {
        if row > 1 {
            abandon_row = abandon_row + arrive * (T::one() - rho);
            arrive = arrive * rho;
        }
        row_reach.push(arrive);
        let mut reach = arrive * (T::one() - gamma);
        for rank in layout.row_ranks(row) {
            let (psi, alpha) = params[rank - 1];
            examine.push(reach);
            select.push(reach * psi);
            let passed = reach * (T::one() - psi);
            abandon_cell = abandon_cell + passed * alpha;
            reach = passed * (T::one() - alpha);
        }
        arrive = arrive * gamma + reach;
    }
    Ok(GridAttentionProfile {
        profile: AttentionProfile {
            total_select: select.iter().copied().sum(),
            examine,
            select,
            total_abandon: abandon_cell + abandon_row,
            total_exhaust: arrive,
        },
        abandon_cell,
        abandon_row,
        row_skipped: vec![gamma; layout.rows()],
        row_reach,
    })
}

/// P[S] per rank under the normative grid model.
pub fn select_prob_grid<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    layout: &LayoutSpec,
) -> Result<Vec<T>> {
    Ok(examine_prob_grid(config, relevance, layout)?.profile.select)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaperVariant {
    /// `min(β^(r(i)-1) Π_{j<i} (1 - ψ(j)), 1)`.
    SlowerDecayBeta,
    /// `ρ^(r(i)-1) [Π_{k<r(i)} (1-γ) S_k + Π_{k<r(i)} γ] Π_{c'<c(i)} (1-ψ')(1-α)`.
    RowSkipLiteral,
}

impl PaperVariant {
    pub fn name(self) -> &'static str {
        match self {
            PaperVariant::SlowerDecayBeta => "slower_decay_beta",
            PaperVariant::RowSkipLiteral => "row_skip",
        }
    }
}

/// Output of a paper-literal formula with the list of index repairs applied.
#[derive(Debug, Clone, PartialEq)]
pub struct LiteralProfile<T> {
    pub examine: Vec<T>,
    pub notes: Vec<String>,
}

/// Evaluates a published grid formula literally. The result is not a
/// probability machine: it need not conserve mass or match the simulator.
pub fn paper_formula_examine_prob<T: Scalar>(
    variant: PaperVariant,
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    layout: &LayoutSpec,
) -> Result<LiteralProfile<T>> {
    match variant {
        PaperVariant::SlowerDecayBeta => slower_decay(config, relevance, layout),
        PaperVariant::RowSkipLiteral => row_skip_literal(config, relevance, layout),
    }
}

fn slower_decay<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    layout: &LayoutSpec,
) -> Result<LiteralProfile<T>> {
    let RowDecay::BetaBoost { beta } = config.grid.row_decay else {
        return Err(Error::MissingParameter {
            variant: PaperVariant::SlowerDecayBeta.name(),
            parameter: "grid.row_decay.beta",
        });
    };
    if relevance.len() != layout.len() {
        return Err(Error::LengthMismatch {
            what: "relevance vs layout cells",
            expected: layout.len(),
            found: relevance.len(),
        });
    }
    let mut examine = Vec::with_capacity(layout.len());
    let mut survive = T::one();
    for (rank, cell) in layout.cells() {
        let boost = beta.powi(cell.row as i32 - 1);
        examine.push((boost * survive).min(T::one()));
        let (psi, _) = position_params(config, relevance, rank)?;
        survive = survive * (T::one() - psi);
    }
    Ok(LiteralProfile {
        examine,
        notes: vec![
            "exponent r(i)-1 used for beta so the first row is not boosted".into(),
            "product over (1 - psi) runs over ranks 1..i-1".into(),
            "misplaced min argument read as min(beta^(r(i)-1) * product, 1)".into(),
            "abandonment and middle bias are not part of this formula".into(),
        ],
    })
}

fn row_skip_literal<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    layout: &LayoutSpec,
) -> Result<LiteralProfile<T>> {
    let rho = match config.grid.row_decay {
        RowDecay::None => T::one(),
        RowDecay::RowContinuation { rho } => rho,
        RowDecay::BetaBoost { .. } => {
            return Err(Error::MissingParameter {
                variant: PaperVariant::RowSkipLiteral.name(),
                parameter: "grid.row_decay.rho (beta given)",
            })
        }
    };
    let gamma = config.grid.row_skip;
    let params = cell_params(config, relevance, layout)?;

    let mut examine = Vec::with_capacity(layout.len());
    // Π_{k<r} (1-γ) S_k and Π_{k<r} γ
    let mut read_all = T::one();
    let mut skip_all = T::one();
    for row in 1..=layout.rows() {
        let bracket = if row == 1 {
            T::one()
        } else {
            read_all + skip_all
        };
        let mut within = rho.powi(row as i32 - 1) * bracket;
        let mut survival = T::one();
        for rank in layout.row_ranks(row) {
            let (psi, alpha) = params[rank - 1];
            examine.push(within);
            let step = (T::one() - psi) * (T::one() - alpha);
            within = within * step;
            survival = survival * step;
        }
        read_all = read_all * (T::one() - gamma) * survival;
        skip_all = skip_all * gamma;
    }
    Ok(LiteralProfile {
        examine,
        notes: vec![
            "bracket taken as 1 on the first row (both products are empty)".into(),
            "current-row product bounded to columns before c(i)".into(),
            "per-cell factor is (1 - psi)(1 - alpha), psi middle-biased when configured".into(),
            "row prefactor rho^(r(i)-1) stands for the row-level abandonment term".into(),
            "bracket sums two products over all preceding rows; it equals the per-row \
             factorization only when at most one row precedes"
                .into(),
            "the current row is treated as not skipped; the normative model applies \
             (1 - gamma) to every row, first row included"
                .into(),
        ],
    })
}
