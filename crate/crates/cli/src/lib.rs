//! `browselab` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 validation
//! failure.

pub mod output;
pub mod schema;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info, warn};

use browselab::model::is_valid;
use browselab::sim::{DEFAULT_ABS_FLOOR, DEFAULT_Z_THRESHOLD};
use browselab::{
    attention, default_graded_map, err, group_exposure, paper_formula_examine_prob, preset,
    preset_provenance, rbp, simulate, validate, validate_config, BrowsingConfig64, GroupAssignment,
    MiddleBias, PaperVariant, Preset, RowDecay, SelectionModel, Severity, PRESET_NAMES,
};

use output::{
    nums, to_json, AttentionOut, MetricOut, MetricParams, MetricValue, Num, PerRow, PresetEntry,
    PresetListOut, PresetShowOut, Totals, VerdictOut, SCHEMA_VERSION,
};
use schema::{PresetForm, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VALIDATION_FAILED: i32 = 3;

pub const DEFAULT_TRIALS: u64 = 200_000;

#[derive(Debug)]
pub enum CliError {
    /// Bad input, flags or configuration; every problem found is listed.
    Invalid(Vec<String>),
}

impl From<browselab::Error> for CliError {
    fn from(e: browselab::Error) -> Self {
        CliError::Invalid(vec![e.to_string()])
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(vec![msg.into()])
}

#[derive(Debug, Parser)]
#[command(
    name = "browselab",
    version,
    about = "User-browsing attention models for ranked layouts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form examination and selection probabilities.
    Attention(AttentionArgs),
    /// RBP, ERR or per-group exposure.
    Metrics(MetricsArgs),
    /// Check the closed form against simulated users.
    Validate(ValidateArgs),
    /// List or expand the named model presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelFlags {
    /// Use a named preset instead of the model in the config file.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub psi: Option<f64>,
    #[arg(long = "psi-rel")]
    pub psi_rel: Option<f64>,
    #[arg(long = "psi-nonrel")]
    pub psi_nonrel: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Highest grade for the err_default preset (defaults to the relevance g_max).
    #[arg(long = "g-max")]
    pub g_max: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LiteralMode {
    SlowerDecayBeta,
    RowSkip,
}

#[derive(Debug, Args)]
pub struct AttentionArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelFlags,
    /// Evaluate a published grid formula literally instead of the normative model.
    #[arg(long = "paper-literal", value_enum)]
    pub paper_literal: Option<LiteralMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    Rbp,
    Err,
    Exposure,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(value_enum)]
    pub metric: MetricKind,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelFlags,
    /// Count any positive grade as relevant for RBP.
    #[arg(long)]
    pub binarize: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelFlags,
    /// Simulated users; defaults to the config's simulation.trials, then 200000.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Defaults to the config's simulation.seed, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_Z_THRESHOLD)]
    pub z: f64,
    #[arg(long, default_value_t = DEFAULT_ABS_FLOOR)]
    pub floor: f64,
    /// Test hook: add this amount to every closed-form examination probability.
    #[arg(long, default_value_t = 0.0)]
    pub perturb: f64,
}

#[derive(Debug, Subcommand)]
pub enum PresetAction {
    List {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    Show {
        name: String,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        model: ModelFlags,
    },
}

/// Runs one command and returns its exit code; errors are reported on stderr.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Attention(args) => cmd_attention(&args),
        Command::Metrics(args) => cmd_metrics(&args),
        Command::Validate(args) => cmd_validate(&args),
        Command::Presets { action } => cmd_presets(&action),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Invalid(messages)) => {
            for m in messages {
                eprintln!("browselab: {m}");
            }
            EXIT_INVALID
        }
    }
}

fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_json(&text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, text)
                .map_err(|e| invalid(format!("cannot write {}: {e}", p.display())))?;
            info!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn required(v: Option<f64>, flag: &str, preset: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| invalid(format!("preset {preset} needs {flag}")))
}

/// Resolves a preset by name from flag or file parameters.
fn build_preset(form: &PresetForm, default_g_max: u32) -> Result<Preset<f64>, CliError> {
    let name = form.name.as_str();
    Ok(match name {
        "geometric" | "biega_geometric" => {
            let lambda = required(form.lambda, "lambda", name)?;
            if name == "geometric" {
                Preset::Geometric { lambda }
            } else {
                Preset::BiegaGeometric { lambda }
            }
        }
        "cascade" => Preset::Cascade {
            psi_rel: required(form.psi_rel, "psi_rel", name)?,
            psi_nonrel: required(form.psi_nonrel, "psi_nonrel", name)?,
        },
        "extended_cascade" => Preset::ExtendedCascade {
            psi_rel: required(form.psi_rel, "psi_rel", name)?,
            psi_nonrel: required(form.psi_nonrel, "psi_nonrel", name)?,
            alpha: required(form.alpha, "alpha", name)?,
        },
        "err_default" => Preset::ErrDefault {
            g_max: form.g_max.unwrap_or(default_g_max),
        },
        other => {
            return Err(invalid(format!(
                "unknown preset {other:?}; known presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    })
}

fn flag_preset(flags: &ModelFlags) -> Option<PresetForm> {
    flags.preset.as_ref().map(|name| PresetForm {
        name: name.clone(),
        lambda: flags.lambda,
        psi_rel: flags.psi_rel,
        psi_nonrel: flags.psi_nonrel,
        alpha: flags.alpha,
        g_max: flags.g_max,
    })
}

/// The resolved model plus the preset it came from, if any.
struct Resolved {
    config: BrowsingConfig64,
    preset: Option<Preset<f64>>,
}

fn resolve_model(cfg: &RunConfig, flags: &ModelFlags) -> Result<Option<Resolved>, CliError> {
    let g_max = cfg.relevance.g_max;
    let from_flags = flag_preset(flags);
    let mut resolved = if let Some(form) = from_flags.as_ref().or(cfg.preset.as_ref()) {
        let p = build_preset(form, g_max)?;
        Some(Resolved {
            config: preset(p)?,
            preset: Some(p),
        })
    } else if let Some(model) = &cfg.model {
        Some(Resolved {
            config: model.to_config()?,
            preset: None,
        })
    } else {
        None
    };

    // Flag overrides on top of the file model (preset flags were consumed above).
    if let Some(r) = resolved.as_mut() {
        let c = &mut r.config;
        if from_flags.is_none() {
            if let Some(psi) = flags.psi {
                c.selection = SelectionModel::Constant { psi };
            }
            if flags.psi_rel.is_some() || flags.psi_nonrel.is_some() {
                match &mut c.selection {
                    SelectionModel::BinaryRelevance { psi_rel, psi_nonrel } => {
                        *psi_rel = flags.psi_rel.unwrap_or(*psi_rel);
                        *psi_nonrel = flags.psi_nonrel.unwrap_or(*psi_nonrel);
                    }
                    _ => match (flags.psi_rel, flags.psi_nonrel) {
                        (Some(psi_rel), Some(psi_nonrel)) => {
                            c.selection = SelectionModel::BinaryRelevance { psi_rel, psi_nonrel }
                        }
                        _ => {
                            return Err(invalid(
                                "--psi-rel and --psi-nonrel must be given together for a non-binary model",
                            ))
                        }
                    },
                }
            }
            if let Some(alpha) = flags.alpha {
                c.abandon = browselab::AbandonModel::constant(alpha);
            }
        }
        if let Some(gamma) = flags.gamma {
            c.grid.row_skip = gamma;
        }
        match (flags.beta, flags.rho) {
            (Some(_), Some(_)) => return Err(invalid("--beta and --rho are mutually exclusive")),
            (Some(beta), None) => c.grid.row_decay = RowDecay::BetaBoost { beta },
            (None, Some(rho)) => c.grid.row_decay = RowDecay::RowContinuation { rho },
            (None, None) => {}
        }
        if let Some(sigma) = flags.sigma {
            c.grid.middle_bias = MiddleBias::Gaussian { sigma };
        }
    }
    Ok(resolved)
}

fn require_model(cfg: &RunConfig, flags: &ModelFlags) -> Result<Resolved, CliError> {
    resolve_model(cfg, flags)?
        .ok_or_else(|| invalid("config needs a model or a preset (or pass --preset)"))
}

/// Hard violations abort; advisories are logged and returned.
fn check_config(config: &BrowsingConfig64) -> Result<Vec<String>, CliError> {
    let violations = validate_config(config);
    if !is_valid(&violations) {
        return Err(CliError::Invalid(
            violations
                .iter()
                .filter(|v| v.severity == Severity::Hard)
                .map(ToString::to_string)
                .collect(),
        ));
    }
    let warnings: Vec<String> = violations.iter().map(ToString::to_string).collect();
    for w in &warnings {
        warn!("{w}");
    }
    Ok(warnings)
}

pub fn cmd_attention(args: &AttentionArgs) -> Result<i32, CliError> {
    let cfg = read_config(&args.input)?;
    let layout = cfg.layout()?;
    let relevance = cfg.relevance.to_relevance()?;
    let Resolved { config, .. } = require_model(&cfg, &args.model)?;
    let warnings = check_config(&config)?;
    debug!("attention on {:?} with {:?}", layout, config);

    let out = match args.paper_literal {
        None => {
            let g = attention(&config, &relevance, &layout)?;
            AttentionOut {
                schema_version: SCHEMA_VERSION,
                layout: (&layout).into(),
                mode: "normative".into(),
                examine: nums(&g.profile.examine),
                select: nums(&g.profile.select),
                totals: Some(Totals {
                    select: Num(g.profile.total_select),
                    abandon: Num(g.profile.total_abandon),
                    abandon_cell: Num(g.abandon_cell),
                    abandon_row: Num(g.abandon_row),
                    exhaust: Num(g.profile.total_exhaust),
                }),
                per_row: Some(PerRow {
                    reach: nums(&g.row_reach),
                    skipped: nums(&g.row_skipped),
                }),
                notes: Vec::new(),
                warnings,
            }
        }
        Some(mode) => {
            let variant = match mode {
                LiteralMode::SlowerDecayBeta => PaperVariant::SlowerDecayBeta,
                LiteralMode::RowSkip => PaperVariant::RowSkipLiteral,
            };
            let lit = paper_formula_examine_prob(variant, &config, &relevance, &layout)?;
            let mut select = Vec::with_capacity(lit.examine.len());
            for (i, &e) in lit.examine.iter().enumerate() {
                let psi = browselab::selection_prob(i + 1, &relevance, &config.selection)?;
                select.push(e * psi);
            }
            let mut notes = lit.notes;
            notes.push("select is examine times the unbiased psi".into());
            AttentionOut {
                schema_version: SCHEMA_VERSION,
                layout: (&layout).into(),
                mode: format!("paper_literal:{}", variant.name()),
                examine: nums(&lit.examine),
                select: nums(&select),
                totals: None,
                per_row: None,
                notes,
                warnings,
            }
        }
    };
    write_output(args.output.as_deref(), &to_json(&out))?;
    Ok(EXIT_OK)
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<i32, CliError> {
    let cfg = read_config(&args.input)?;
    let relevance = cfg.relevance.to_relevance()?;
    let resolved = resolve_model(&cfg, &args.model)?;
    let (metric, value, params) = match args.metric {
        MetricKind::Rbp => {
            let lambda = match (args.model.lambda, resolved.as_ref().and_then(|r| r.preset)) {
                (Some(l), _) => l,
                (None, Some(Preset::Geometric { lambda } | Preset::BiegaGeometric { lambda })) => {
                    lambda
                }
                _ => return Err(invalid("rbp needs --lambda (or a geometric preset)")),
            };
            let v = rbp(&relevance, lambda, args.binarize)?;
            let params = MetricParams {
                lambda: Some(Num(lambda)),
                binarize: Some(args.binarize),
                ..Default::default()
            };
            ("rbp", MetricValue::Scalar(Num(v)), params)
        }
        MetricKind::Err => {
            let map = match resolved.as_ref().map(|r| &r.config.selection) {
                Some(SelectionModel::Graded(map)) => map.clone(),
                _ => default_graded_map(relevance.g_max()),
            };
            let v = err(&relevance, &map)?;
            let params = MetricParams {
                grade_map: Some(nums(map.values())),
                ..Default::default()
            };
            ("err", MetricValue::Scalar(Num(v)), params)
        }
        MetricKind::Exposure => {
            let map = cfg
                .group_map()?
                .ok_or_else(|| invalid("exposure needs a groups map in the config"))?;
            let layout = cfg.layout()?;
            let groups = GroupAssignment::from_map(&map, layout.len())?;
            let Resolved { config, .. } = resolved
                .ok_or_else(|| invalid("exposure needs a model or a preset (or pass --preset)"))?;
            check_config(&config)?;
            let g = attention(&config, &relevance, &layout)?;
            let exposure = group_exposure(&g, &groups)?;
            let params = MetricParams {
                layout: Some((&layout).into()),
                ..Default::default()
            };
            (
                "exposure",
                MetricValue::Groups(exposure.into_iter().map(|(k, v)| (k, Num(v))).collect()),
                params,
            )
        }
    };
    let out = MetricOut {
        schema_version: SCHEMA_VERSION,
        metric,
        value,
        params,
    };
    write_output(args.output.as_deref(), &to_json(&out))?;
    Ok(EXIT_OK)
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<i32, CliError> {
    let cfg = read_config(&args.input)?;
    let layout = cfg.layout()?;
    let relevance = cfg.relevance.to_relevance()?;
    let Resolved { config, .. } = require_model(&cfg, &args.model)?;
    check_config(&config)?;
    if let RowDecay::BetaBoost { .. } = config.grid.row_decay {
        return Err(invalid(browselab::Error::BetaBoostNotAllowed.to_string()));
    }
    if !(args.z > 0.0 && args.floor > 0.0) {
        return Err(invalid("--z and --floor must be positive"));
    }
    let sim = cfg.simulation.as_ref();
    let trials = args
        .trials
        .or(sim.and_then(|s| s.trials))
        .unwrap_or(DEFAULT_TRIALS);
    let seed = args.seed.or(sim.and_then(|s| s.seed)).unwrap_or(0);

    let mut closed = attention(&config, &relevance, &layout)?;
    if args.perturb != 0.0 {
        for e in closed.profile.examine.iter_mut() {
            *e += args.perturb;
        }
    }
    info!("simulating {trials} users with seed {seed}");
    let report = simulate(&config, &relevance, &layout, trials, seed)?;
    let verdict = validate(&closed, &report, args.z, args.floor)?;
    if let Some(w) = verdict.worst_check() {
        info!(
            "worst z = {} at {} rank {:?}",
            w.z,
            w.quantity.name(),
            w.rank
        );
    }
    let out = VerdictOut::new(&verdict, &report, &layout, args.z, args.floor, args.perturb);
    write_output(args.output.as_deref(), &to_json(&out))?;
    Ok(if verdict.pass {
        EXIT_OK
    } else {
        EXIT_VALIDATION_FAILED
    })
}

pub fn cmd_presets(action: &PresetAction) -> Result<i32, CliError> {
    match action {
        PresetAction::List { output } => {
            let out = PresetListOut {
                schema_version: SCHEMA_VERSION,
                presets: PRESET_NAMES
                    .iter()
                    .map(|&name| PresetEntry {
                        name,
                        provenance: preset_provenance(name).expect("known preset"),
                    })
                    .collect(),
            };
            write_output(output.as_deref(), &to_json(&out))?;
        }
        PresetAction::Show {
            name,
            output,
            model,
        } => {
            let form = PresetForm {
                name: name.clone(),
                ..flag_preset(&ModelFlags {
                    preset: Some(name.clone()),
                    ..model.clone()
                })
                .expect("preset set")
            };
            let p = build_preset(&form, 1)?;
            let config = preset(p)?;
            let out = PresetShowOut {
                schema_version: SCHEMA_VERSION,
                preset: name.clone(),
                provenance: preset_provenance(name).expect("known preset"),
                config: (&config).into(),
            };
            write_output(output.as_deref(), &to_json(&out))?;
        }
    }
    Ok(EXIT_OK)
}
