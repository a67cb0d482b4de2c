//! Declarative run configuration read from JSON.

use std::collections::BTreeMap;

use serde::Deserialize;

use browselab::{
    AbandonModel, BrowsingConfig64, GradeMap, GridBehavior, LayoutKind, LayoutSpec, MiddleBias,
    RelevanceVector, RowDecay, SelectionModel,
};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub layout: Option<LayoutForm>,
    #[serde(default)]
    pub model: Option<ModelForm>,
    #[serde(default)]
    pub preset: Option<PresetForm>,
    pub relevance: RelevanceForm,
    /// Rank (as a string key, 1-based) to group label.
    #[serde(default)]
    pub groups: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub simulation: Option<SimulationForm>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutForm {
    pub kind: String,
    #[serde(default)]
    pub rows: Option<usize>,
    #[serde(default)]
    pub cols: Option<usize>,
    #[serde(default)]
    pub total: Option<usize>,
    #[serde(default)]
    pub row_lengths: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelForm {
    pub selection: SelectionForm,
    #[serde(default)]
    pub abandon: Option<AbandonForm>,
    #[serde(default)]
    pub grid: Option<GridForm>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionForm {
    pub mode: String,
    #[serde(default)]
    pub psi: Option<f64>,
    #[serde(default)]
    pub psi_rel: Option<f64>,
    #[serde(default)]
    pub psi_nonrel: Option<f64>,
    #[serde(default)]
    pub grade_map: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbandonForm {
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub alpha_rel: Option<f64>,
    #[serde(default)]
    pub alpha_nonrel: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridForm {
    #[serde(default)]
    pub row_skip: Option<f64>,
    #[serde(default)]
    pub row_decay: Option<ModeValue>,
    #[serde(default)]
    pub middle_bias: Option<MiddleBiasForm>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeValue {
    pub mode: String,
    #[serde(default)]
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiddleBiasForm {
    pub mode: String,
    #[serde(default)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetForm {
    pub name: String,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub psi_rel: Option<f64>,
    #[serde(default)]
    pub psi_nonrel: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub g_max: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelevanceForm {
    pub grades: Vec<u32>,
    #[serde(default = "one")]
    pub g_max: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationForm {
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(vec![msg.into()])
}

fn need(value: Option<f64>, field: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| invalid(format!("missing field {field}")))
}

pub fn parse_kind(kind: &str) -> Result<LayoutKind, CliError> {
    Ok(match kind {
        "linear_vertical" => LayoutKind::LinearVertical,
        "linear_horizontal" => LayoutKind::LinearHorizontal,
        "wrapped_grid" => LayoutKind::WrappedGrid,
        "multi_list" => LayoutKind::MultiList,
        other => return Err(invalid(format!("unknown layout kind {other:?}"))),
    })
}

impl LayoutForm {
    pub fn to_layout(&self) -> Result<LayoutSpec, CliError> {
        let kind = parse_kind(&self.kind)?;
        let rows = match (&self.row_lengths, self.rows, self.cols) {
            (Some(lengths), None, None) => {
                if self
                    .total
                    .is_some_and(|t| t != lengths.iter().sum::<usize>())
                {
                    return Err(invalid("layout.total disagrees with layout.row_lengths"));
                }
                lengths.clone()
            }
            (None, Some(rows), Some(cols)) => {
                if rows == 0 || cols == 0 {
                    return Err(invalid("layout.rows and layout.cols must be positive"));
                }
                let mut lengths = vec![cols; rows];
                if let Some(total) = self.total {
                    let full = rows * cols;
                    if total > full || total + cols <= full {
                        return Err(invalid(format!(
                            "layout.total = {total} does not fit {rows} rows of {cols}"
                        )));
                    }
                    lengths[rows - 1] = cols - (full - total);
                }
                lengths
            }
            _ => {
                return Err(invalid(
                    "layout needs either row_lengths or both rows and cols",
                ))
            }
        };
        LayoutSpec::new(kind, rows).map_err(CliError::from)
    }
}

impl RelevanceForm {
    pub fn to_relevance(&self) -> Result<RelevanceVector, CliError> {
        RelevanceVector::new(self.grades.clone(), self.g_max).map_err(CliError::from)
    }
}

impl ModelForm {
    /// Builds the configuration without range checks; the caller validates.
    pub fn to_config(&self) -> Result<BrowsingConfig64, CliError> {
        let s = &self.selection;
        let selection = match s.mode.as_str() {
            "constant" => SelectionModel::Constant {
                psi: need(s.psi, "selection.psi")?,
            },
            "binary" => SelectionModel::BinaryRelevance {
                psi_rel: need(s.psi_rel, "selection.psi_rel")?,
                psi_nonrel: need(s.psi_nonrel, "selection.psi_nonrel")?,
            },
            "graded" => {
                let map = s
                    .grade_map
                    .as_ref()
                    .ok_or_else(|| invalid("missing field selection.grade_map"))?;
                let mut values = Vec::with_capacity(map.len());
                for g in 0..map.len() {
                    let p = map.get(&g.to_string()).ok_or_else(|| {
                        invalid(format!(
                            "selection.grade_map must cover grades 0..={} without gaps",
                            map.len() - 1
                        ))
                    })?;
                    values.push(*p);
                }
                SelectionModel::Graded(GradeMap::new(values)?)
            }
            other => return Err(invalid(format!("unknown selection.mode {other:?}"))),
        };
        let abandon = match &self.abandon {
            None => AbandonModel::none(),
            Some(AbandonForm {
                alpha: Some(a),
                alpha_rel: None,
                alpha_nonrel: None,
            }) => AbandonModel::constant(*a),
            Some(AbandonForm {
                alpha: None,
                alpha_rel: Some(r),
                alpha_nonrel: Some(n),
            }) => AbandonModel {
                alpha_rel: *r,
                alpha_nonrel: *n,
            },
            Some(_) => {
                return Err(invalid(
                    "abandon takes either alpha or both alpha_rel and alpha_nonrel",
                ))
            }
        };
        let mut grid = GridBehavior::off();
        if let Some(g) = &self.grid {
            grid.row_skip = g.row_skip.unwrap_or(0.0);
            if let Some(decay) = &g.row_decay {
                grid.row_decay = match decay.mode.as_str() {
                    "none" => RowDecay::None,
                    "beta" => RowDecay::BetaBoost {
                        beta: need(decay.value, "grid.row_decay.value")?,
                    },
                    "rho" => RowDecay::RowContinuation {
                        rho: need(decay.value, "grid.row_decay.value")?,
                    },
                    other => return Err(invalid(format!("unknown grid.row_decay.mode {other:?}"))),
                };
            }
            if let Some(bias) = &g.middle_bias {
                grid.middle_bias = match bias.mode.as_str() {
                    "none" => MiddleBias::None,
                    "gaussian" => MiddleBias::Gaussian {
                        sigma: need(bias.sigma, "grid.middle_bias.sigma")?,
                    },
                    other => {
                        return Err(invalid(format!("unknown grid.middle_bias.mode {other:?}")))
                    }
                };
            }
        }
        Ok(BrowsingConfig64 {
            selection,
            abandon,
            grid,
        })
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        if let Some(v) = cfg.schema_version {
            if v != 1 {
                return Err(invalid(format!("unsupported schema_version {v}")));
            }
        }
        if cfg.model.is_some() && cfg.preset.is_some() {
            return Err(invalid(
                "config sets both model and preset; give exactly one",
            ));
        }
        Ok(cfg)
    }

    /// The configured layout, or a linear list over the relevance vector.
    pub fn layout(&self) -> Result<LayoutSpec, CliError> {
        let layout = match &self.layout {
            Some(form) => form.to_layout()?,
            None => LayoutSpec::linear_vertical(self.relevance.grades.len())?,
        };
        if layout.len() != self.relevance.grades.len() {
            return Err(invalid(format!(
                "layout has {} cells but relevance has {} grades",
                layout.len(),
                self.relevance.grades.len()
            )));
        }
        Ok(layout)
    }

    pub fn group_map(&self) -> Result<Option<BTreeMap<usize, String>>, CliError> {
        let Some(groups) = &self.groups else {
            return Ok(None);
        };
        groups
            .iter()
            .map(|(k, v)| {
                k.parse::<usize>()
                    .map(|rank| (rank, v.clone()))
                    .map_err(|_| invalid(format!("group key {k:?} is not a rank")))
            })
            .collect::<Result<_, _>>()
            .map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(json: &str) -> Result<LayoutSpec, CliError> {
        serde_json::from_str::<LayoutForm>(json)
            .unwrap()
            .to_layout()
    }

    #[test]
    fn rows_cols_expand() {
        let l = layout(r#"{"kind": "wrapped_grid", "rows": 3, "cols": 3, "total": 7}"#).unwrap();
        assert_eq!(l.row_lengths(), &[3, 3, 1]);
        let l = layout(r#"{"kind": "wrapped_grid", "rows": 2, "cols": 4}"#).unwrap();
        assert_eq!(l.row_lengths(), &[4, 4]);
        let l = layout(r#"{"kind": "multi_list", "row_lengths": [2, 4, 3]}"#).unwrap();
        assert_eq!(l.len(), 9);
        assert!(layout(r#"{"kind": "wrapped_grid", "rows": 3, "cols": 3, "total": 6}"#).is_err());
        assert!(layout(r#"{"kind": "wrapped_grid", "rows": 3, "cols": 3, "total": 10}"#).is_err());
        assert!(layout(r#"{"kind": "hexagonal", "rows": 3, "cols": 3}"#).is_err());
        assert!(layout(r#"{"kind": "linear_vertical", "rows": 3, "cols": 2}"#).is_err());
    }

    #[test]
    fn model_forms() {
        let m: ModelForm = serde_json::from_str(
            r#"{"selection": {"mode": "graded", "grade_map": {"0": 0, "1": 0.25, "2": 0.75}},
                "abandon": {"alpha_rel": 0.1, "alpha_nonrel": 0.3},
                "grid": {"row_skip": 0.3, "row_decay": {"mode": "rho", "value": 0.8},
                         "middle_bias": {"mode": "gaussian", "sigma": 1.5}}}"#,
        )
        .unwrap();
        let c = m.to_config().unwrap();
        assert_eq!(c.abandon.alpha_nonrel, 0.3);
        assert_eq!(c.grid.row_decay, RowDecay::RowContinuation { rho: 0.8 });

        let gap: ModelForm = serde_json::from_str(
            r#"{"selection": {"mode": "graded", "grade_map": {"0": 0, "2": 0.75}}}"#,
        )
        .unwrap();
        assert!(gap.to_config().is_err());
        let both: ModelForm = serde_json::from_str(
            r#"{"selection": {"mode": "constant", "psi": 0.2}, "abandon": {"alpha": 0.1, "alpha_rel": 0.2}}"#,
        )
        .unwrap();
        assert!(both.to_config().is_err());
        let missing: ModelForm =
            serde_json::from_str(r#"{"selection": {"mode": "binary", "psi_rel": 0.2}}"#).unwrap();
        assert!(missing.to_config().is_err());
    }

    #[test]
    fn run_config_consistency() {
        assert!(RunConfig::from_json(
            r#"{"model": {"selection": {"mode": "constant", "psi": 0.2}},
                "preset": {"name": "geometric", "lambda": 0.8},
                "relevance": {"grades": [1]}}"#
        )
        .is_err());
        let c = RunConfig::from_json(
            r#"{"layout": {"kind": "wrapped_grid", "rows": 2, "cols": 2},
                "relevance": {"grades": [1, 0, 1]}}"#,
        )
        .unwrap();
        assert!(c.layout().is_err());
        assert!(RunConfig::from_json(r#"{"relevance": {"grades": [1]}, "bogus": 1}"#).is_err());
    }
}
