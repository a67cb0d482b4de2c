//! Browsing parameters: relevance-conditioned selection, abandonment, grid
//! behavior, named presets for the published models, and range validation.

use std::fmt;

use crate::error::{Error, Result};
use crate::layout::{LayoutKind, LayoutSpec};
use crate::scalar::{is_probability, Scalar};

/// Per-rank relevance grades, `0..=g_max`. Binary relevance is `g_max == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceVector {
    grades: Vec<u32>,
    g_max: u32,
}

impl RelevanceVector {
    pub fn new(grades: Vec<u32>, g_max: u32) -> Result<Self> {
        if g_max == 0 {
            return Err(Error::InvalidRelevance("g_max must be positive".into()));
        }
        if grades.is_empty() {
            return Err(Error::InvalidRelevance("relevance vector is empty".into()));
        }
        if let Some((i, &g)) = grades.iter().enumerate().find(|(_, &g)| g > g_max) {
            return Err(Error::GradeOutOfRange {
                rank: i + 1,
                grade: g,
                g_max,
            });
        }
        Ok(Self { grades, g_max })
    }

    pub fn binary(grades: Vec<u32>) -> Result<Self> {
        Self::new(grades, 1)
    }

    pub fn grades(&self) -> &[u32] {
        &self.grades
    }

    pub fn g_max(&self) -> u32 {
        self.g_max
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.g_max == 1
    }

    pub fn grade(&self, rank: usize) -> Result<u32> {
        if rank == 0 || rank > self.grades.len() {
            return Err(Error::RankOutOfRange {
                rank,
                n: self.grades.len(),
            });
        }
        Ok(self.grades[rank - 1])
    }

    /// Copy with every grade `> 0` mapped to 1.
    pub fn binarized(&self) -> Self {
        Self {
            grades: self.grades.iter().map(|&g| u32::from(g > 0)).collect(),
            g_max: 1,
        }
    }
}

/// Selection probability per relevance grade, indexed by grade.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeMap<T>(Vec<T>);

impl<T: Scalar> GradeMap<T> {
    /// Values must be probabilities, non-decreasing in grade. Index 0 is grade 0.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidRelevance(
                "grade map needs entries for at least grades 0 and 1".into(),
            ));
        }
        for (g, &p) in values.iter().enumerate() {
            if !is_probability(p) {
                return Err(Error::InvalidParameter {
                    name: format!("selection.grade_map[{g}]"),
                    value: p.as_f64(),
                    range: "[0, 1]",
                });
            }
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidRelevance(
                "grade map must be non-decreasing in grade".into(),
            ));
        }
        Ok(Self(values))
    }

    pub fn g_max(&self) -> u32 {
        (self.0.len() - 1) as u32
    }

    pub fn get(&self, grade: u32) -> Option<T> {
        self.0.get(grade as usize).copied()
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }
}

/// The ERR mapping `g -> (2^g - 1) / 2^g_max`.
pub fn default_graded_map<T: Scalar>(g_max: u32) -> GradeMap<T> {
    assert!(g_max >= 1, "g_max must be positive");
    let denom = T::lit(2.0).powi(g_max as i32);
    GradeMap(
        (0..=g_max)
            .map(|g| (T::lit(2.0).powi(g as i32) - T::one()) / denom)
            .collect(),
    )
}

/// Conditional probability of selecting an examined item.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectionModel<T> {
    /// Relevance ignored.
    Constant {
        psi: T,
    },
    /// `psi_rel` for grade >= 1, `psi_nonrel` for grade 0.
    BinaryRelevance {
        psi_rel: T,
        psi_nonrel: T,
    },
    Graded(GradeMap<T>),
}

impl<T: Scalar> SelectionModel<T> {
    pub fn for_grade(&self, grade: u32) -> Option<T> {
        match self {
            SelectionModel::Constant { psi } => Some(*psi),
            SelectionModel::BinaryRelevance {
                psi_rel,
                psi_nonrel,
            } => Some(if grade >= 1 { *psi_rel } else { *psi_nonrel }),
            SelectionModel::Graded(map) => map.get(grade),
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            SelectionModel::Constant { .. } => "constant",
            SelectionModel::BinaryRelevance { .. } => "binary",
            SelectionModel::Graded(_) => "graded",
        }
    }
}

/// ψ(i) for the item at `rank`. Depends only on that item's grade.
pub fn selection_prob<T: Scalar>(
    rank: usize,
    relevance: &RelevanceVector,
    model: &SelectionModel<T>,
) -> Result<T> {
    let grade = relevance.grade(rank)?;
    model.for_grade(grade).ok_or(Error::GradeOutOfRange {
        rank,
        grade,
        g_max: match model {
            SelectionModel::Graded(map) => map.g_max(),
            _ => relevance.g_max(),
        },
    })
}

/// Probability of abandoning after examining and not selecting an item.
/// Grade >= 1 uses `alpha_rel`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbandonModel<T> {
    pub alpha_rel: T,
    pub alpha_nonrel: T,
}

impl<T: Scalar> AbandonModel<T> {
    pub fn none() -> Self {
        Self::constant(T::zero())
    }

    pub fn constant(alpha: T) -> Self {
        Self {
            alpha_rel: alpha,
            alpha_nonrel: alpha,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.alpha_rel == self.alpha_nonrel
    }

    pub fn for_grade(&self, grade: u32) -> T {
        if grade >= 1 {
            self.alpha_rel
        } else {
            self.alpha_nonrel
        }
    }
}

impl<T: Scalar> Default for AbandonModel<T> {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RowDecay<T> {
    #[default]
    None,
    /// Slower-decay boost `beta^(row-1)`, only usable through the paper-literal formulas.
    BetaBoost { beta: T },
    /// Survival probability at every row boundary.
    RowContinuation { rho: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MiddleBias<T> {
    #[default]
    None,
    /// Gaussian weight on ψ centred on the middle column of each row.
    Gaussian { sigma: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBehavior<T> {
    pub row_skip: T,
    pub row_decay: RowDecay<T>,
    pub middle_bias: MiddleBias<T>,
}

impl<T: Scalar> GridBehavior<T> {
    pub fn off() -> Self {
        Self {
            row_skip: T::zero(),
            row_decay: RowDecay::None,
            middle_bias: MiddleBias::None,
        }
    }
}

impl<T: Scalar> Default for GridBehavior<T> {
    fn default() -> Self {
        Self::off()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrowsingConfig<T> {
    pub selection: SelectionModel<T>,
    pub abandon: AbandonModel<T>,
    pub grid: GridBehavior<T>,
}

impl<T: Scalar> BrowsingConfig<T> {
    pub fn new(selection: SelectionModel<T>) -> Self {
        Self {
            selection,
            abandon: AbandonModel::none(),
            grid: GridBehavior::off(),
        }
    }

    pub fn with_abandon(mut self, abandon: AbandonModel<T>) -> Self {
        self.abandon = abandon;
        self
    }

    pub fn with_grid(mut self, grid: GridBehavior<T>) -> Self {
        self.grid = grid;
        self
    }

    /// The configuration whose semantics apply on `layout`: linear vertical
    /// layouts ignore every grid behavior.
    pub fn for_layout(&self, layout: &LayoutSpec) -> Self {
        if layout.kind() == LayoutKind::LinearVertical {
            Self {
                grid: GridBehavior::off(),
                ..self.clone()
            }
        } else {
            self.clone()
        }
    }

    /// ρ for state-machine semantics: 1 without row decay.
    pub fn row_continuation(&self) -> Result<T> {
        match self.grid.row_decay {
            RowDecay::None => Ok(T::one()),
            RowDecay::RowContinuation { rho } => Ok(rho),
            RowDecay::BetaBoost { .. } => Err(Error::BetaBoostNotAllowed),
        }
    }
}

/// Named parameterizations of the published browsing models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset<T> {
    /// Rank-biased precision user: continuation λ, examination λ^(i-1).
    Geometric {
        lambda: T,
    },
    /// Geometric attention with equal selection probability at every position.
    BiegaGeometric {
        lambda: T,
    },
    Cascade {
        psi_rel: T,
        psi_nonrel: T,
    },
    ExtendedCascade {
        psi_rel: T,
        psi_nonrel: T,
        alpha: T,
    },
    /// Graded cascade with the ERR grade mapping.
    ErrDefault {
        g_max: u32,
    },
}

pub const PRESET_NAMES: [&str; 5] = [
    "geometric",
    "biega_geometric",
    "cascade",
    "extended_cascade",
    "err_default",
];

impl<T: Scalar> Preset<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Geometric { .. } => "geometric",
            Preset::BiegaGeometric { .. } => "biega_geometric",
            Preset::Cascade { .. } => "cascade",
            Preset::ExtendedCascade { .. } => "extended_cascade",
            Preset::ErrDefault { .. } => "err_default",
        }
    }
}

/// One-line description of where each preset comes from.
pub fn preset_provenance(name: &str) -> Option<&'static str> {
    Some(match name {
        "geometric" => {
            "geometric browsing behind rank-biased precision (Moffat & Zobel 2008): constant psi = 1 - lambda, alpha = 0"
        }
        "biega_geometric" => {
            "geometric attention with equal selection probability per position (Biega et al. 2018): same parameters as geometric"
        }
        "cascade" => {
            "cascade click model (Craswell et al. 2008): binary relevance-dependent psi, alpha = 0"
        }
        "extended_cascade" => {
            "cascade with abandonment (Chapelle et al. 2009): binary relevance-dependent psi, constant alpha"
        }
        "err_default" => {
            "graded cascade behind expected reciprocal rank (Chapelle et al. 2009): psi = (2^g - 1) / 2^g_max, alpha = 0"
        }
        _ => return None,
    })
}

fn require<T: Scalar>(name: &str, value: T, ok: bool, range: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: name.to_string(),
            value: value.as_f64(),
            range,
        })
    }
}

const TABLE_PROB: &str = "[0, 1]; table values {0.1, ..., 0.9}";

/// Expands a preset into a full configuration with grid behavior off.
pub fn preset<T: Scalar>(preset: Preset<T>) -> Result<BrowsingConfig<T>> {
    match preset {
        Preset::Geometric { lambda } | Preset::BiegaGeometric { lambda } => {
            require(
                "lambda",
                lambda,
                lambda > T::zero() && lambda < T::one(),
                "(0, 1); table values {0.1, ..., 0.9}",
            )?;
            Ok(BrowsingConfig::new(SelectionModel::Constant {
                psi: T::one() - lambda,
            }))
        }
        Preset::Cascade {
            psi_rel,
            psi_nonrel,
        } => {
            require(
                "selection.psi_rel",
                psi_rel,
                is_probability(psi_rel),
                TABLE_PROB,
            )?;
            require(
                "selection.psi_nonrel",
                psi_nonrel,
                is_probability(psi_nonrel),
                TABLE_PROB,
            )?;
            Ok(BrowsingConfig::new(SelectionModel::BinaryRelevance {
                psi_rel,
                psi_nonrel,
            }))
        }
        Preset::ExtendedCascade {
            psi_rel,
            psi_nonrel,
            alpha,
        } => {
            require(
                "selection.psi_rel",
                psi_rel,
                is_probability(psi_rel),
                TABLE_PROB,
            )?;
            require(
                "selection.psi_nonrel",
                psi_nonrel,
                is_probability(psi_nonrel),
                TABLE_PROB,
            )?;
            require(
                "abandon.alpha",
                alpha,
                alpha >= T::zero() && alpha < T::one(),
                "[0, 1); table values {0.1, ..., 0.9}",
            )?;
            Ok(BrowsingConfig::new(SelectionModel::BinaryRelevance {
                psi_rel,
                psi_nonrel,
            })
            .with_abandon(AbandonModel::constant(alpha)))
        }
        Preset::ErrDefault { g_max } => {
            if g_max == 0 {
                return Err(Error::InvalidParameter {
                    name: "g_max".into(),
                    value: 0.0,
                    range: "positive integer",
                });
            }
            Ok(BrowsingConfig::new(SelectionModel::Graded(
                default_graded_map(g_max),
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// The value is not a legal probability (or decay factor).
    Hard,
    /// Legal, but outside the published parameter table.
    Advisory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub severity: Severity,
    pub parameter: String,
    pub value: f64,
    pub range: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Hard => "error",
            Severity::Advisory => "warning",
        };
        write!(
            f,
            "{kind}: {} = {} outside {}",
            self.parameter, self.value, self.range
        )
    }
}

const TABLE_EPS: f64 = 1e-9;

/// Table range for ψ, α, λ, γ; exact 0 and 1 are the preset boundary values.
fn in_prob_table(v: f64) -> bool {
    v == 0.0 || v == 1.0 || (0.1 - TABLE_EPS..=0.9 + TABLE_EPS).contains(&v)
}

fn in_beta_table(v: f64) -> bool {
    (1.1 - TABLE_EPS..=2.0 + TABLE_EPS).contains(&v)
}

struct Checker(Vec<Violation>);

impl Checker {
    fn hard(&mut self, parameter: &str, value: f64, range: &'static str) {
        self.0.push(Violation {
            severity: Severity::Hard,
            parameter: parameter.to_string(),
            value,
            range,
        });
    }

    fn probability(&mut self, parameter: &str, value: f64, upper_open: bool) {
        let legal = value >= 0.0
            && if upper_open {
                value < 1.0
            } else {
                value <= 1.0
            };
        if !legal {
            self.hard(
                parameter,
                value,
                if upper_open { "[0, 1)" } else { "[0, 1]" },
            );
        } else if !in_prob_table(value) {
            self.0.push(Violation {
                severity: Severity::Advisory,
                parameter: parameter.to_string(),
                value,
                range: "table values {0.1, ..., 0.9}",
            });
        }
    }
}

/// Lists every hard error and advisory warning in `config`. Empty means the
/// configuration sits inside the published parameter table.
pub fn validate_config<T: Scalar>(config: &BrowsingConfig<T>) -> Vec<Violation> {
    let mut check = Checker(Vec::new());
    match &config.selection {
        SelectionModel::Constant { psi } => check.probability("selection.psi", psi.as_f64(), false),
        SelectionModel::BinaryRelevance {
            psi_rel,
            psi_nonrel,
        } => {
            check.probability("selection.psi_rel", psi_rel.as_f64(), false);
            check.probability("selection.psi_nonrel", psi_nonrel.as_f64(), false);
        }
        SelectionModel::Graded(map) => {
            for (g, p) in map.values().iter().enumerate() {
                let p = p.as_f64();
                if !(0.0..=1.0).contains(&p) {
                    check.hard(&format!("selection.grade_map[{g}]"), p, "[0, 1]");
                }
            }
        }
    }
    let abandon = &config.abandon;
    if abandon.is_constant() {
        check.probability("abandon.alpha", abandon.alpha_rel.as_f64(), true);
    } else {
        check.probability("abandon.alpha_rel", abandon.alpha_rel.as_f64(), true);
        check.probability("abandon.alpha_nonrel", abandon.alpha_nonrel.as_f64(), true);
    }
    let grid = &config.grid;
    check.probability("grid.row_skip", grid.row_skip.as_f64(), false);
    match grid.row_decay {
        RowDecay::None => {}
        RowDecay::BetaBoost { beta } => {
            let beta = beta.as_f64();
            if !(beta >= 1.0 && beta.is_finite()) {
                check.hard("grid.row_decay.beta", beta, "[1, inf)");
            } else if !in_beta_table(beta) {
                check.0.push(Violation {
                    severity: Severity::Advisory,
                    parameter: "grid.row_decay.beta".into(),
                    value: beta,
                    range: "table values {1.1, ..., 2.0}",
                });
            }
        }
        RowDecay::RowContinuation { rho } => {
            let rho = rho.as_f64();
            if !(rho > 0.0 && rho <= 1.0) {
                check.hard("grid.row_decay.rho", rho, "(0, 1]");
            }
        }
    }
    if let MiddleBias::Gaussian { sigma } = grid.middle_bias {
        let sigma = sigma.as_f64();
        if !(sigma > 0.0 && sigma.is_finite()) {
            check.hard("grid.middle_bias.sigma", sigma, "(0, inf)");
        }
    }
    check.0
}

/// True when `violations` holds no hard error.
pub fn is_valid(violations: &[Violation]) -> bool {
    violations.iter().all(|v| v.severity != Severity::Hard)
}
