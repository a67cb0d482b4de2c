//! Effectiveness metrics derived from browsing models, and attention-based
//! group exposure.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::linear::AttentionProfile;
use crate::model::{GradeMap, RelevanceVector};
use crate::scalar::Scalar;

/// Rank-biased precision `(1 - λ) Σ_i y_i λ^(i-1)` over the given items only
/// (no residual for the unseen tail).
///
/// Graded input is rejected unless `binarize` is set, in which case any grade
/// above zero counts as relevant.
pub fn rbp<T: Scalar>(relevance: &RelevanceVector, lambda: T, binarize: bool) -> Result<T> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(Error::InvalidParameter {
            name: "lambda".into(),
            value: lambda.as_f64(),
            range: "(0, 1)",
        });
    }
    if !relevance.is_binary() && !binarize {
        return Err(Error::NonBinaryRelevance {
            g_max: relevance.g_max(),
        });
    }
    let mut weight = T::one();
    let mut sum = T::zero();
    for &g in relevance.grades() {
        if g > 0 {
            sum = sum + weight;
        }
        weight = weight * lambda;
    }
    Ok((T::one() - lambda) * sum)
}

/// Expected reciprocal rank `Σ_i P[S_i] / i` under the cascade with
/// `ψ(i) = grade_map[grade_i]` and no abandonment.
pub fn err<T: Scalar>(relevance: &RelevanceVector, grade_map: &GradeMap<T>) -> Result<T> {
    let mut not_stopped = T::one();
    let mut score = T::zero();
    for (i, &g) in relevance.grades().iter().enumerate() {
        let psi = grade_map.get(g).ok_or(Error::GradeOutOfRange {
            rank: i + 1,
            grade: g,
            g_max: grade_map.g_max(),
        })?;
        score = score + not_stopped * psi / T::lit((i + 1) as f64);
        not_stopped = not_stopped * (T::one() - psi);
    }
    Ok(score)
}

/// Group label for every rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAssignment {
    group_of: Vec<String>,
    labels: BTreeSet<String>,
}

impl GroupAssignment {
    /// `group_of[i - 1]` is the label of rank `i`.
    pub fn new(group_of: Vec<String>) -> Self {
        let labels = group_of.iter().cloned().collect();
        Self { group_of, labels }
    }

    /// From a rank -> label map; every rank `1..=n` must be present.
    pub fn from_map(map: &BTreeMap<usize, String>, n: usize) -> Result<Self> {
        let group_of = (1..=n)
            .map(|rank| map.get(&rank).cloned().ok_or(Error::UnmappedRank { rank }))
            .collect::<Result<Vec<_>>>()?;
        if let Some(&rank) = map.keys().find(|&&r| r == 0 || r > n) {
            return Err(Error::RankOutOfRange { rank, n });
        }
        Ok(Self::new(group_of))
    }

    pub fn len(&self) -> usize {
        self.group_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.group_of.is_empty()
    }

    pub fn labels(&self) -> &BTreeSet<String> {
        &self.labels
    }

    pub fn group_of(&self, rank: usize) -> Option<&str> {
        self.group_of.get(rank.checked_sub(1)?).map(String::as_str)
    }
}

/// Examination mass per group.
pub fn group_exposure<T: Scalar, P: AsRef<AttentionProfile<T>>>(
    profile: &P,
    groups: &GroupAssignment,
) -> Result<BTreeMap<String, T>> {
    let examine = &profile.as_ref().examine;
    if examine.len() > groups.len() {
        return Err(Error::UnmappedRank {
            rank: groups.len() + 1,
        });
    }
    if examine.len() != groups.len() {
        return Err(Error::LengthMismatch {
            what: "group assignment vs profile",
            expected: examine.len(),
            found: groups.len(),
        });
    }
    let mut exposure: BTreeMap<String, T> = groups
        .labels()
        .iter()
        .map(|l| (l.clone(), T::zero()))
        .collect();
    for (label, &e) in groups.group_of.iter().zip(examine) {
        let slot = exposure.get_mut(label).expect("label registered");
        *slot = *slot + e;
    }
    Ok(exposure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::examine_prob_linear;
    use crate::model::{default_graded_map, preset, Preset};
    use proptest::prelude::*;

    fn profile(examine: Vec<f64>) -> AttentionProfile<f64> {
        AttentionProfile {
            select: vec![0.0; examine.len()],
            examine,
            total_select: 0.0,
            total_abandon: 0.0,
            total_exhaust: 1.0,
        }
    }

    #[test]
    fn rbp_examples() {
        let r = |g: Vec<u32>| RelevanceVector::binary(g).unwrap();
        assert!((rbp(&r(vec![1, 0, 1]), 0.5, false).unwrap() - 0.625f64).abs() < 1e-15);
        assert_eq!(rbp(&r(vec![0, 0, 0]), 0.5, false).unwrap(), 0.0);
        assert_eq!(rbp(&r(vec![1]), 0.5, false).unwrap(), 0.5);
    }

    #[test]
    fn rbp_errors() {
        let bin = RelevanceVector::binary(vec![1]).unwrap();
        assert!(rbp(&bin, 0.0, false).is_err());
        assert!(rbp(&bin, 1.0, false).is_err());
        let graded = RelevanceVector::new(vec![2, 0, 1], 2).unwrap();
        assert_eq!(
            rbp(&graded, 0.5, false),
            Err(Error::NonBinaryRelevance { g_max: 2 })
        );
        assert_eq!(rbp(&graded, 0.5, true).unwrap(), 0.5 * (1.0 + 0.25));
    }

    #[test]
    fn err_examples() {
        let map = default_graded_map::<f64>(1);
        let r = |g: Vec<u32>| RelevanceVector::binary(g).unwrap();
        assert_eq!(err(&r(vec![1]), &map).unwrap(), 0.5);
        assert!((err(&r(vec![1, 1]), &map).unwrap() - 0.625).abs() < 1e-15);
        assert_eq!(err(&r(vec![0, 0, 0]), &map).unwrap(), 0.0);

        let graded = RelevanceVector::new(vec![2], 2).unwrap();
        assert!(err(&graded, &map).is_err());
    }

    #[test]
    fn exposure_examples() {
        let one_each = GroupAssignment::new(vec!["A".into(), "B".into()]);
        let e = group_exposure(&profile(vec![1.0, 0.8]), &one_each).unwrap();
        assert_eq!(e["A"], 1.0);
        assert_eq!(e["B"], 0.8);

        let map = BTreeMap::from([(1, "A".into()), (2, "A".into()), (3, "B".into())]);
        let groups = GroupAssignment::from_map(&map, 3).unwrap();
        let e = group_exposure(&profile(vec![1.0, 0.8, 0.64]), &groups).unwrap();
        assert!((e["A"] - 1.8).abs() < 1e-15);
        assert_eq!(e["B"], 0.64);

        let single = GroupAssignment::new(vec!["all".into(); 3]);
        let e = group_exposure(&profile(vec![1.0, 0.8, 0.64]), &single).unwrap();
        assert!((e["all"] - 2.44).abs() < 1e-15);
    }

    #[test]
    fn exposure_errors() {
        let partial = BTreeMap::from([(1, "A".to_string()), (3, "B".to_string())]);
        assert_eq!(
            GroupAssignment::from_map(&partial, 3),
            Err(Error::UnmappedRank { rank: 2 })
        );
        let short = GroupAssignment::new(vec!["A".into()]);
        assert_eq!(
            group_exposure(&profile(vec![1.0, 0.5]), &short),
            Err(Error::UnmappedRank { rank: 2 })
        );
    }

    #[test]
    fn err_matches_profile_under_err_preset() {
        let rel = RelevanceVector::new(vec![3, 0, 2, 1, 3, 0, 0, 1], 3).unwrap();
        let cfg = preset::<f64>(Preset::ErrDefault { g_max: 3 }).unwrap();
        let p = examine_prob_linear(&cfg, &rel).unwrap();
        let from_profile: f64 = p
            .select
            .iter()
            .enumerate()
            .map(|(i, s)| s / (i + 1) as f64)
            .sum();
        let direct: f64 = err(&rel, &default_graded_map(3)).unwrap();
        assert!((from_profile - direct).abs() <= 1e-12);
    }

    proptest! {
        #[test]
        fn rbp_all_relevant(lambda in 0.01f64..0.99, n in 1usize..40) {
            let rel = RelevanceVector::binary(vec![1; n]).unwrap();
            let v = rbp(&rel, lambda, false).unwrap();
            prop_assert!((v - (1.0 - lambda.powi(n as i32))).abs() <= 1e-12);
        }

        #[test]
        fn promoting_relevant_item_never_hurts_rbp(
            lambda in 0.01f64..0.99,
            grades in prop::collection::vec(0u32..=1, 2..20),
            a in 0usize..20, b in 0usize..20,
        ) {
            let (a, b) = (a % grades.len(), b % grades.len());
            let (hi, lo) = (a.min(b), a.max(b));
            let mut better = grades.clone();
            // move a relevant item from lo up to hi
            if better[lo] == 1 && better[hi] == 0 {
                better.swap(hi, lo);
            }
            let before = rbp(&RelevanceVector::binary(grades).unwrap(), lambda, false).unwrap();
            let after = rbp(&RelevanceVector::binary(better).unwrap(), lambda, false).unwrap();
            prop_assert!(after >= before);
        }

        #[test]
        fn exposure_conserves_mass(
            examine in prop::collection::vec(0.0f64..=1.0, 1..30),
            labels in prop::collection::vec(0u8..4, 30),
        ) {
            let groups = GroupAssignment::new(
                labels[..examine.len()].iter().map(|l| format!("g{l}")).collect(),
            );
            let total: f64 = examine.iter().sum();
            let e = group_exposure(&profile(examine), &groups).unwrap();
            let summed: f64 = e.values().sum();
            prop_assert!((summed - total).abs() <= 1e-12);
        }
    }
}
