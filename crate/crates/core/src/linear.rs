//! Closed-form examination and selection probabilities on a linear list.
//!
//! At each position the user examines the item, selects it with ψ(i)
//! (terminal), otherwise abandons with α(i) (terminal), otherwise moves on:
//!
//! ```text
//! P[E_1] = 1
//! P[E_i] = Π_{j<i} (1 - ψ(j)) (1 - α(j))
//! P[S_i] = P[E_i] ψ(i)
//! ```
//!
//! Geometric, cascade and extended cascade models are parameterizations of
//! this single recurrence.

use crate::error::Result;
use crate::model::{selection_prob, BrowsingConfig, RelevanceVector};
use crate::scalar::Scalar;

/// Attention over ranks plus the probabilities of the three absorbing outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionProfile<T> {
    /// `examine[i - 1]` is P[E_i].
    pub examine: Vec<T>,
    /// `select[i - 1]` is P[S_i].
    pub select: Vec<T>,
    pub total_select: T,
    pub total_abandon: T,
    /// Browsed past the last item without selecting or abandoning.
    pub total_exhaust: T,
}

impl<T: Scalar> AttentionProfile<T> {
    pub fn len(&self) -> usize {
        self.examine.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examine.is_empty()
    }

    /// `total_select + total_abandon + total_exhaust`, 1 up to rounding.
    pub fn total_mass(&self) -> T {
        self.total_select + self.total_abandon + self.total_exhaust
    }
}

impl<T> AsRef<AttentionProfile<T>> for AttentionProfile<T> {
    fn as_ref(&self) -> &AttentionProfile<T> {
        self
    }
}

/// ψ(i) and α(i) for one rank.
pub(crate) fn position_params<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    rank: usize,
) -> Result<(T, T)> {
    let psi = selection_prob(rank, relevance, &config.selection)?;
    let alpha = config.abandon.for_grade(relevance.grade(rank)?);
    Ok((psi, alpha))
}

/// Examination and selection probabilities over the `relevance.len()` ranks.
/// Grid behavior in `config` is ignored.
pub fn examine_prob_linear<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
) -> Result<AttentionProfile<T>> {
    let n = relevance.len();
    let mut examine = Vec::with_capacity(n);
    let mut select = Vec::with_capacity(n);
    let mut reach = T::one();
    let mut total_abandon = T::zero();
    for rank in 1..=n {
        let (psi, alpha) = position_params(config, relevance, rank)?;
        examine.push(reach);
        select.push(reach * psi);
        let passed = reach * (T::one() - psi);
        total_abandon = total_abandon + passed * alpha;
        reach = passed * (T::one() - alpha);
    }
    Ok(AttentionProfile {
        total_select: select.iter().copied().sum(),
        examine,
        select,
        total_abandon,
        total_exhaust: reach,
    })
}

/// P[S_i] for every rank; with α = 0 this is the cascade click distribution.
pub fn select_prob_linear<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
) -> Result<Vec<T>> {
    Ok(examine_prob_linear(config, relevance)?.select)
}
