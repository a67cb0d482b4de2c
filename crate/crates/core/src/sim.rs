//! Monte-Carlo execution of the browsing state machines.
//!
//! Each trial is one user walking the page: before every row after the first
//! survive ρ (else abandon at the row boundary), skip the row with γ, else read
//! its cells left to right, selecting with ψ' (terminal) or abandoning with α
//! (terminal). A user who leaves the last row without terminating is
//! *exhausted*. Linear vertical layouts run with grid behavior off.
//!
//! Trials are split into partitions, each driven by its own ChaCha8 stream
//! seeded with [`mix_seed`]`(seed, partition)`, so a report depends only on
//! `(inputs, trials, seed, partitions)` and not on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::middle_bias_weight;
use crate::layout::LayoutSpec;
use crate::linear::AttentionProfile;
use crate::model::{selection_prob, BrowsingConfig, MiddleBias, RelevanceVector, RowDecay};
use crate::scalar::Scalar;

pub const DEFAULT_PARTITIONS: usize = 16;
pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;
pub const DEFAULT_ABS_FLOOR: f64 = 0.005;

/// SplitMix64 finalizer applied to `seed + (partition + 1) * 0x9E3779B97F4A7C15`.
pub fn mix_seed(seed: u64, partition: u64) -> u64 {
    let mut z = seed.wrapping_add((partition + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Event counts from a batch of simulated users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    /// Per rank.
    pub examined: Vec<u64>,
    /// Per rank.
    pub selected: Vec<u64>,
    pub abandoned_cell: u64,
    pub abandoned_row: u64,
    /// Per row.
    pub skipped: Vec<u64>,
    pub exhausted: u64,
}

impl SimulationReport {
    fn empty(n: usize, rows: usize, seed: u64) -> Self {
        Self {
            trials: 0,
            seed,
            examined: vec![0; n],
            selected: vec![0; n],
            abandoned_cell: 0,
            abandoned_row: 0,
            skipped: vec![0; rows],
            exhausted: 0,
        }
    }

    pub fn selected_total(&self) -> u64 {
        self.selected.iter().sum()
    }

    pub fn abandoned_total(&self) -> u64 {
        self.abandoned_cell + self.abandoned_row
    }

    /// Every trial ends in exactly one absorbing state, and nothing is
    /// selected without being examined.
    pub fn is_conserved(&self) -> bool {
        self.selected_total() + self.abandoned_total() + self.exhausted == self.trials
            && self
                .selected
                .iter()
                .zip(&self.examined)
                .all(|(s, e)| s <= e)
    }

    /// Adds the counts of `other`; the seed of `self` is kept.
    pub fn merge(&mut self, other: &SimulationReport) {
        self.trials += other.trials;
        for (a, b) in self.examined.iter_mut().zip(&other.examined) {
            *a += b;
        }
        for (a, b) in self.selected.iter_mut().zip(&other.selected) {
            *a += b;
        }
        for (a, b) in self.skipped.iter_mut().zip(&other.skipped) {
            *a += b;
        }
        self.abandoned_cell += other.abandoned_cell;
        self.abandoned_row += other.abandoned_row;
        self.exhausted += other.exhausted;
    }
}

struct Machine {
    rows: Vec<std::ops::Range<usize>>,
    /// (ψ', α) per cell, rank order
    cells: Vec<(f64, f64)>,
    skip: f64,
    survive: f64,
}

fn bernoulli<R: Rng>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.gen::<f64>() < p
    }
}

impl Machine {
    fn build<T: Scalar>(
        config: &BrowsingConfig<T>,
        relevance: &RelevanceVector,
        layout: &LayoutSpec,
    ) -> Result<Self> {
        if relevance.len() != layout.len() {
            return Err(Error::LengthMismatch {
                what: "relevance vs layout cells",
                expected: layout.len(),
                found: relevance.len(),
            });
        }
        let survive = match config.grid.row_decay {
            RowDecay::None => 1.0,
            RowDecay::RowContinuation { rho } => rho.as_f64(),
            RowDecay::BetaBoost { .. } => return Err(Error::BetaBoostNotAllowed),
        };
        let config = config.for_layout(layout);
        let mut cells = Vec::with_capacity(layout.len());
        for (rank, cell) in layout.cells() {
            let mut psi = selection_prob(rank, relevance, &config.selection)?.as_f64();
            if let MiddleBias::Gaussian { sigma } = config.grid.middle_bias {
                let width = layout.row_lengths()[cell.row - 1];
                psi *= middle_bias_weight(cell.col, width, sigma)?.as_f64();
            }
            let alpha = config.abandon.for_grade(relevance.grade(rank)?).as_f64();
            cells.push((psi, alpha));
        }
        let rows = (1..=layout.rows())
            .map(|r| {
                let ranks = layout.row_ranks(r);
                *ranks.start() - 1..*ranks.end()
            })
            .collect();
        Ok(Self {
            rows,
            cells,
            skip: config.grid.row_skip.as_f64(),
            survive: if layout.kind() == crate::layout::LayoutKind::LinearVertical {
                1.0
            } else {
                survive
            },
        })
    }

    fn run<R: Rng>(&self, rng: &mut R, report: &mut SimulationReport) {
        report.trials += 1;
        for (k, row) in self.rows.iter().enumerate() {
            if k > 0 && !bernoulli(rng, self.survive) {
                report.abandoned_row += 1;
                return;
            }
            if bernoulli(rng, self.skip) {
                report.skipped[k] += 1;
                continue;
            }
            for idx in row.clone() {
                let (psi, alpha) = self.cells[idx];
                report.examined[idx] += 1;
                if bernoulli(rng, psi) {
                    report.selected[idx] += 1;
                    return;
                }
                if bernoulli(rng, alpha) {
                    report.abandoned_cell += 1;
                    return;
                }
            }
        }
        report.exhausted += 1;
    }
}

/// Runs `trials` simulated users with [`DEFAULT_PARTITIONS`] partitions.
pub fn simulate<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    layout: &LayoutSpec,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    simulate_partitioned(config, relevance, layout, trials, seed, DEFAULT_PARTITIONS)
}

/// Runs `trials` users split over `partitions` independent streams, in parallel.
pub fn simulate_partitioned<T: Scalar>(
    config: &BrowsingConfig<T>,
    relevance: &RelevanceVector,
    layout: &LayoutSpec,
    trials: u64,
    seed: u64,
    partitions: usize,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let machine = Machine::build(config, relevance, layout)?;
    let partitions = partitions.clamp(1, trials.min(usize::MAX as u64) as usize) as u64;
    let (base, extra) = (trials / partitions, trials % partitions);
    let parts: Vec<SimulationReport> = (0..partitions)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, p));
            let mut part = SimulationReport::empty(layout.len(), layout.rows(), seed);
            let count = base + u64::from(p < extra);
            for _ in 0..count {
                machine.run(&mut rng, &mut part);
            }
            part
        })
        .collect();
    let mut report = SimulationReport::empty(layout.len(), layout.rows(), seed);
    for part in &parts {
        report.merge(part);
    }
    Ok(report)
}

/// Observed frequencies with binomial standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalProfile {
    pub trials: u64,
    pub examine: Vec<f64>,
    pub select: Vec<f64>,
    pub examine_se: Vec<f64>,
    pub select_se: Vec<f64>,
    pub total_select: f64,
    pub total_abandon: f64,
    pub total_exhaust: f64,
}

fn binomial_se(p: f64, trials: u64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / trials as f64).sqrt()
}

pub fn empirical_profile(report: &SimulationReport) -> EmpiricalProfile {
    let n = report.trials.max(1);
    let freq = |c: u64| c as f64 / n as f64;
    let examine: Vec<f64> = report.examined.iter().map(|&c| freq(c)).collect();
    let select: Vec<f64> = report.selected.iter().map(|&c| freq(c)).collect();
    EmpiricalProfile {
        trials: report.trials,
        examine_se: examine.iter().map(|&p| binomial_se(p, n)).collect(),
        select_se: select.iter().map(|&p| binomial_se(p, n)).collect(),
        examine,
        select,
        total_select: freq(report.selected_total()),
        total_abandon: freq(report.abandoned_total()),
        total_exhaust: freq(report.exhausted),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Examine,
    Select,
    TotalSelect,
    TotalAbandon,
    TotalExhaust,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Examine => "examine",
            Quantity::Select => "select",
            Quantity::TotalSelect => "total_select",
            Quantity::TotalAbandon => "total_abandon",
            Quantity::TotalExhaust => "total_exhaust",
        }
    }
}

/// One closed-form value against its observed frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub quantity: Quantity,
    /// Rank for per-position quantities.
    pub rank: Option<usize>,
    pub closed: f64,
    pub empirical: f64,
    /// Binomial standard error at the closed-form probability.
    pub se: f64,
    /// `|empirical - closed| / se`; infinite when `se = 0` and the values differ.
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationVerdict {
    pub checks: Vec<Check>,
    pub worst_z: f64,
    /// Index into `checks` of the largest z-score.
    pub worst: Option<usize>,
    pub conservation_ok: bool,
    pub pass: bool,
}

impl ValidationVerdict {
    pub fn worst_check(&self) -> Option<&Check> {
        self.worst.map(|i| &self.checks[i])
    }
}

/// Compares a closed form with simulated counts. A value passes when
/// `|p̂ - p| <= max(z_threshold * SE, abs_floor)` with `SE = sqrt(p (1 - p) / trials)`.
pub fn validate<T: Scalar, P: AsRef<AttentionProfile<T>>>(
    closed: &P,
    report: &SimulationReport,
    z_threshold: f64,
    abs_floor: f64,
) -> Result<ValidationVerdict> {
    let closed = closed.as_ref();
    for (what, found) in [
        ("examined counts", report.examined.len()),
        ("selected counts", report.selected.len()),
    ] {
        if found != closed.len() {
            return Err(Error::LengthMismatch {
                what,
                expected: closed.len(),
                found,
            });
        }
    }
    if report.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let emp = empirical_profile(report);
    let mut checks = Vec::with_capacity(2 * closed.len() + 3);
    let mut push = |quantity, rank, closed: f64, empirical: f64| {
        let se = binomial_se(closed, report.trials);
        let diff = (empirical - closed).abs();
        let z = if diff == 0.0 { 0.0 } else { diff / se };
        checks.push(Check {
            quantity,
            rank,
            closed,
            empirical,
            se,
            z,
            pass: diff <= (z_threshold * se).max(abs_floor),
        });
    };
    for (i, (&p, &q)) in closed.examine.iter().zip(&emp.examine).enumerate() {
        push(Quantity::Examine, Some(i + 1), p.as_f64(), q);
    }
    for (i, (&p, &q)) in closed.select.iter().zip(&emp.select).enumerate() {
        push(Quantity::Select, Some(i + 1), p.as_f64(), q);
    }
    push(
        Quantity::TotalSelect,
        None,
        closed.total_select.as_f64(),
        emp.total_select,
    );
    push(
        Quantity::TotalAbandon,
        None,
        closed.total_abandon.as_f64(),
        emp.total_abandon,
    );
    push(
        Quantity::TotalExhaust,
        None,
        closed.total_exhaust.as_f64(),
        emp.total_exhaust,
    );

    let worst = checks
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.z.total_cmp(&b.1.z))
        .map(|(i, _)| i);
    let worst_z = worst.map_or(0.0, |i| checks[i].z);
    let conservation_ok = report.is_conserved();
    let pass = conservation_ok && checks.iter().all(|c| c.pass);
    Ok(ValidationVerdict {
        checks,
        worst_z,
        worst,
        conservation_ok,
        pass,
    })
}
