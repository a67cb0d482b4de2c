//! Report documents. Keys are emitted in struct field order and every real
//! number with 17 significant digits, so identical runs give identical bytes.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use browselab::sim::{Check, ValidationVerdict};
use browselab::{
    BrowsingConfig64, LayoutSpec, MiddleBias, RowDecay, SelectionModel, SimulationReport,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Real number written as `d.dddddddddddddddde±x`; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

pub fn format_num(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match format_num(self.0) {
            Some(text) => RawValue::from_string(text)
                .map_err(serde::ser::Error::custom)?
                .serialize(serializer),
            None => serializer.serialize_none(),
        }
    }
}

pub fn nums(values: &[f64]) -> Vec<Num> {
    values.iter().copied().map(Num).collect()
}

#[derive(Debug, Serialize)]
pub struct LayoutOut {
    pub kind: &'static str,
    pub row_lengths: Vec<usize>,
}

impl From<&LayoutSpec> for LayoutOut {
    fn from(layout: &LayoutSpec) -> Self {
        Self {
            kind: layout.kind().name(),
            row_lengths: layout.row_lengths().to_vec(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Totals {
    pub select: Num,
    pub abandon: Num,
    pub abandon_cell: Num,
    pub abandon_row: Num,
    pub exhaust: Num,
}

#[derive(Debug, Serialize)]
pub struct PerRow {
    pub reach: Vec<Num>,
    pub skipped: Vec<Num>,
}

#[derive(Debug, Serialize)]
pub struct AttentionOut {
    pub schema_version: u32,
    pub layout: LayoutOut,
    pub mode: String,
    pub examine: Vec<Num>,
    pub select: Vec<Num>,
    pub totals: Option<Totals>,
    pub per_row: Option<PerRow>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum MetricValue {
    Scalar(Num),
    Groups(BTreeMap<String, Num>),
}

#[derive(Debug, Default, Serialize)]
pub struct MetricParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binarize: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grade_map: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutOut>,
}

#[derive(Debug, Serialize)]
pub struct MetricOut {
    pub schema_version: u32,
    pub metric: &'static str,
    pub value: MetricValue,
    pub params: MetricParams,
}

#[derive(Debug, Serialize)]
pub struct ReportOut {
    pub trials: u64,
    pub seed: u64,
    pub examined: Vec<u64>,
    pub selected: Vec<u64>,
    pub abandoned_cell: u64,
    pub abandoned_row: u64,
    pub skipped: Vec<u64>,
    pub exhausted: u64,
}

impl From<&SimulationReport> for ReportOut {
    fn from(r: &SimulationReport) -> Self {
        Self {
            trials: r.trials,
            seed: r.seed,
            examined: r.examined.clone(),
            selected: r.selected.clone(),
            abandoned_cell: r.abandoned_cell,
            abandoned_row: r.abandoned_row,
            skipped: r.skipped.clone(),
            exhausted: r.exhausted,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckOut {
    pub quantity: &'static str,
    pub rank: Option<usize>,
    pub closed: Num,
    pub empirical: Num,
    pub se: Num,
    pub z: Num,
    pub pass: bool,
}

impl From<&Check> for CheckOut {
    fn from(c: &Check) -> Self {
        Self {
            quantity: c.quantity.name(),
            rank: c.rank,
            closed: Num(c.closed),
            empirical: Num(c.empirical),
            se: Num(c.se),
            z: Num(c.z),
            pass: c.pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictOut {
    pub schema_version: u32,
    pub pass: bool,
    pub layout: LayoutOut,
    pub trials: u64,
    pub seed: u64,
    pub z_threshold: Num,
    pub abs_floor: Num,
    pub perturb: Num,
    pub worst_z: Num,
    pub worst: Option<CheckOut>,
    pub conservation_ok: bool,
    pub failed: usize,
    pub checks: Vec<CheckOut>,
    pub report: ReportOut,
}

impl VerdictOut {
    pub fn new(
        verdict: &ValidationVerdict,
        report: &SimulationReport,
        layout: &LayoutSpec,
        z_threshold: f64,
        abs_floor: f64,
        perturb: f64,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            pass: verdict.pass,
            layout: layout.into(),
            trials: report.trials,
            seed: report.seed,
            z_threshold: Num(z_threshold),
            abs_floor: Num(abs_floor),
            perturb: Num(perturb),
            worst_z: Num(verdict.worst_z),
            worst: verdict.worst_check().map(CheckOut::from),
            conservation_ok: verdict.conservation_ok,
            failed: verdict.checks.iter().filter(|c| !c.pass).count(),
            checks: verdict.checks.iter().map(CheckOut::from).collect(),
            report: report.into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SelectionOut {
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_rel: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_nonrel: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grade_map: Option<BTreeMap<String, Num>>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum AbandonOut {
    Constant { alpha: Num },
    Split { alpha_rel: Num, alpha_nonrel: Num },
}

#[derive(Debug, Serialize)]
pub struct ModeValueOut {
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Num>,
}

#[derive(Debug, Serialize)]
pub struct MiddleBiasOut {
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Num>,
}

#[derive(Debug, Serialize)]
pub struct GridOut {
    pub row_skip: Num,
    pub row_decay: ModeValueOut,
    pub middle_bias: MiddleBiasOut,
}

/// A configuration in the same shape the `model` input field accepts.
#[derive(Debug, Serialize)]
pub struct ConfigOut {
    pub selection: SelectionOut,
    pub abandon: AbandonOut,
    pub grid: GridOut,
}

impl From<&BrowsingConfig64> for ConfigOut {
    fn from(c: &BrowsingConfig64) -> Self {
        let mut selection = SelectionOut {
            mode: c.selection.mode_name(),
            psi: None,
            psi_rel: None,
            psi_nonrel: None,
            grade_map: None,
        };
        match &c.selection {
            SelectionModel::Constant { psi } => selection.psi = Some(Num(*psi)),
            SelectionModel::BinaryRelevance {
                psi_rel,
                psi_nonrel,
            } => {
                selection.psi_rel = Some(Num(*psi_rel));
                selection.psi_nonrel = Some(Num(*psi_nonrel));
            }
            SelectionModel::Graded(map) => {
                selection.grade_map = Some(
                    map.values()
                        .iter()
                        .enumerate()
                        .map(|(g, &p)| (g.to_string(), Num(p)))
                        .collect(),
                );
            }
        }
        let abandon = if c.abandon.is_constant() {
            AbandonOut::Constant {
                alpha: Num(c.abandon.alpha_rel),
            }
        } else {
            AbandonOut::Split {
                alpha_rel: Num(c.abandon.alpha_rel),
                alpha_nonrel: Num(c.abandon.alpha_nonrel),
            }
        };
        let row_decay = match c.grid.row_decay {
            RowDecay::None => ModeValueOut {
                mode: "none",
                value: None,
            },
            RowDecay::BetaBoost { beta } => ModeValueOut {
                mode: "beta",
                value: Some(Num(beta)),
            },
            RowDecay::RowContinuation { rho } => ModeValueOut {
                mode: "rho",
                value: Some(Num(rho)),
            },
        };
        let middle_bias = match c.grid.middle_bias {
            MiddleBias::None => MiddleBiasOut {
                mode: "none",
                sigma: None,
            },
            MiddleBias::Gaussian { sigma } => MiddleBiasOut {
                mode: "gaussian",
                sigma: Some(Num(sigma)),
            },
        };
        Self {
            selection,
            abandon,
            grid: GridOut {
                row_skip: Num(c.grid.row_skip),
                row_decay,
                middle_bias,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PresetEntry {
    pub name: &'static str,
    pub provenance: &'static str,
}

#[derive(Debug, Serialize)]
pub struct PresetListOut {
    pub schema_version: u32,
    pub presets: Vec<PresetEntry>,
}

#[derive(Debug, Serialize)]
pub struct PresetShowOut {
    pub schema_version: u32,
    pub preset: String,
    pub provenance: &'static str,
    pub config: ConfigOut,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}
