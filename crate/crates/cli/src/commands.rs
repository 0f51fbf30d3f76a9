//! Command implementations. Each returns a payload; formatting lives in
//! [`crate::output`].

use serde::Serialize;
use wdm_revenue::exact::{
    brute_force_solve, count_assignments, random_baseline, sweep_wavelengths, BaselineMode, BaselineStats, Scope,
    SweepRow,
};
use wdm_revenue::heuristic::Assignment;
use wdm_revenue::model::leave_prob;
use wdm_revenue::simulate::{eventual_service_prob, simulate_station, SimConfig};
use wdm_revenue::{heuristic_solve_with, Finalization, Instance};

use crate::error::{CliError, Result};
use crate::output::{bracket_f64, bracket_usize, joined, text_table, two, Render};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveRow {
    pub station_id: usize,
    /// `0` for an unserved station.
    pub wavelength: usize,
    pub sole: bool,
    pub switchover: f64,
    pub visit: f64,
    pub provisional: f64,
    pub revenue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvePayload {
    pub finalization: Finalization,
    pub frame_time: f64,
    pub wavelengths: usize,
    /// Station ids per wavelength.
    pub groups: Vec<Vec<usize>>,
    pub stations: Vec<SolveRow>,
    pub total_revenue: f64,
    pub net_revenue: f64,
    pub served: usize,
    pub warnings: Vec<String>,
}

fn group_ids(instance: &Instance, assignment: &Assignment) -> Vec<Vec<usize>> {
    assignment
        .groups()
        .iter()
        .map(|g| g.iter().map(|&i| instance.stations[i].station_id).collect())
        .collect()
}

fn braces(groups: &[Vec<usize>]) -> String {
    groups
        .iter()
        .map(|g| format!("{{{}}}", g.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn solve(instance: &Instance, finalization: Finalization) -> Result<SolvePayload> {
    let result = heuristic_solve_with(instance, finalization)?;
    let stations = instance
        .stations
        .iter()
        .enumerate()
        .map(|(i, s)| SolveRow {
            station_id: s.station_id,
            wavelength: result.assignment.wavelength_of[i],
            sole: result.assignment.sole[i],
            switchover: s.switchover,
            visit: result.plan.visit[i],
            provisional: result.plan.provisional[i],
            revenue: result.per_station[i],
        })
        .collect();
    Ok(SolvePayload {
        finalization,
        frame_time: instance.frame_time,
        wavelengths: instance.wavelengths,
        groups: group_ids(instance, &result.assignment),
        stations,
        total_revenue: result.total_revenue,
        net_revenue: result.net_revenue,
        served: result.served_count,
        warnings: result.warnings,
    })
}

impl Render for SolvePayload {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .stations
            .iter()
            .map(|r| {
                vec![
                    r.station_id.to_string(),
                    r.wavelength.to_string(),
                    if r.sole { "yes".into() } else { String::new() },
                    two(r.visit),
                    two(r.provisional),
                    two(r.revenue),
                ]
            })
            .collect();
        let mut out = format!("assignment: {}\n", braces(&self.groups));
        out.push_str(&text_table(
            &["station", "wavelength", "sole", "visit", "step one", "revenue"],
            &rows,
        ));
        let visits: f64 = self.stations.iter().map(|r| r.visit).sum();
        out.push_str(&format!("total visit: {}\n", two(visits)));
        out.push_str(&format!("total revenue: {}\n", two(self.total_revenue)));
        out.push_str(&format!("net revenue: {}\n", two(self.net_revenue)));
        out.push_str(&format!("stations served: {}\n", self.served));
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["station_id", "wavelength", "sole", "switchover", "visit", "provisional", "revenue"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.stations
            .iter()
            .map(|r| {
                vec![
                    r.station_id.to_string(),
                    r.wavelength.to_string(),
                    r.sole.to_string(),
                    r.switchover.to_string(),
                    r.visit.to_string(),
                    r.provisional.to_string(),
                    r.revenue.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerateRow {
    pub rank: usize,
    pub labels: Vec<usize>,
    pub visits: Vec<f64>,
    pub revenue: f64,
    /// The heuristic picks this assignment once zero-visit stations are
    /// counted as unserved.
    pub heuristic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumeratePayload {
    pub scope: Scope,
    pub rows: Vec<EnumerateRow>,
    pub heuristic_labels: Vec<usize>,
    pub heuristic_revenue: f64,
    pub heuristic_gap: f64,
}

/// Labels with zero-visit stations moved to `0`, renumbered canonically.
fn effective_labels(labels: &[usize], visits: &[f64]) -> Vec<usize> {
    let trimmed = labels
        .iter()
        .zip(visits)
        .map(|(&l, &v)| if v == 0.0 { 0 } else { l })
        .collect();
    Assignment::from_labels(trimmed).canonical().wavelength_of
}

pub fn enumerate(instance: &Instance, scope: Scope) -> Result<EnumeratePayload> {
    let report = brute_force_solve(instance, scope)?;
    let heuristic_labels = report.heuristic.assignment.wavelength_of.clone();
    let rows = report
        .rows
        .iter()
        .enumerate()
        .map(|(rank, row)| EnumerateRow {
            rank: rank + 1,
            labels: row.labels.clone(),
            visits: row.visits.clone(),
            revenue: row.revenue,
            heuristic: effective_labels(&row.labels, &row.visits) == heuristic_labels,
        })
        .collect();
    Ok(EnumeratePayload {
        scope,
        rows,
        heuristic_revenue: report.heuristic.total_revenue,
        heuristic_gap: report.heuristic_gap,
        heuristic_labels,
    })
}

/// Number of assignments `enumerate` would evaluate.
pub fn enumeration_size(instance: &Instance, scope: Scope) -> u128 {
    count_assignments(instance.len(), instance.wavelengths, scope)
}

impl Render for EnumeratePayload {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.rank.to_string(),
                    bracket_usize(&r.labels),
                    bracket_f64(&r.visits),
                    two(r.revenue),
                    if r.heuristic { "*".into() } else { String::new() },
                ]
            })
            .collect();
        let mut out = text_table(&["rank", "allocation", "visits", "revenue", "heuristic"], &rows);
        out.push_str(&format!(
            "heuristic: {} revenue {} (gap {})\n",
            bracket_usize(&self.heuristic_labels),
            two(self.heuristic_revenue),
            two(self.heuristic_gap)
        ));
        out
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["rank", "labels", "visits", "revenue", "heuristic"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.rank.to_string(),
                    joined(&r.labels),
                    joined(&r.visits),
                    r.revenue.to_string(),
                    r.heuristic.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselinePayload {
    #[serde(flatten)]
    pub stats: BaselineStats,
}

pub fn baseline(instance: &Instance, mode: BaselineMode, trials: usize, seed: u64) -> Result<BaselinePayload> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    Ok(BaselinePayload {
        stats: random_baseline(instance, mode, trials, seed)?,
    })
}

fn mode_name(mode: BaselineMode) -> &'static str {
    match mode {
        BaselineMode::Capped => "capped",
        BaselineMode::Uncapped => "uncapped",
    }
}

impl Render for BaselinePayload {
    fn table(&self) -> String {
        let s = &self.stats;
        let mut out = format!("{} trials, seed {}\n", s.trials, s.seed);
        out.push_str(&text_table(
            &["", "maximum", "average", "minimum", "percent"],
            &[
                vec![
                    mode_name(s.mode).into(),
                    two(s.maximum),
                    two(s.average),
                    two(s.minimum),
                    two(s.percent_above),
                ],
                vec!["algorithm".into(), String::new(), two(s.heuristic_revenue), String::new(), String::new()],
            ],
        ));
        out
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "mode",
            "trials",
            "seed",
            "maximum",
            "average",
            "minimum",
            "percent_above",
            "heuristic_revenue",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let s = &self.stats;
        vec![vec![
            mode_name(s.mode).into(),
            s.trials.to_string(),
            s.seed.to_string(),
            s.maximum.to_string(),
            s.average.to_string(),
            s.minimum.to_string(),
            s.percent_above.to_string(),
            s.heuristic_revenue.to_string(),
        ]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPayload {
    pub rows: Vec<SweepRow>,
}

pub fn sweep(instance: &Instance, k_values: &[usize]) -> Result<SweepPayload> {
    if k_values.is_empty() {
        return Err(CliError::Usage("--k-list needs at least one wavelength count".into()));
    }
    if k_values.contains(&0) {
        return Err(CliError::Usage("--k-list values must be at least 1".into()));
    }
    Ok(SweepPayload {
        rows: sweep_wavelengths(instance, k_values)?,
    })
}

impl Render for SweepPayload {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![r.wavelengths.to_string(), two(r.revenue), r.served.to_string()])
            .collect();
        text_table(&["K", "revenue", "served"], &rows)
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["wavelengths", "revenue", "served"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.wavelengths.to_string(), r.revenue.to_string(), r.served.to_string()])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatePayload {
    pub station_id: usize,
    pub visit: f64,
    pub cycles: usize,
    pub warmup_cycles: usize,
    pub seed: u64,
    pub analytic_revenue: f64,
    pub mean_revenue_per_cycle: f64,
    pub std_error: f64,
    pub z_score: f64,
    pub served_fraction: f64,
    /// Closed-form eventual service probability of a loop packet.
    pub loop_service_prob: f64,
    pub loop_served_fraction: f64,
    pub loop_std_error: f64,
}

pub struct ValidateArgs {
    pub station_id: usize,
    pub visit: f64,
    pub cycles: usize,
    pub warmup_cycles: usize,
    pub seed: u64,
}

pub fn validate(instance: &Instance, args: &ValidateArgs) -> Result<ValidatePayload> {
    let index = instance
        .index_of(args.station_id)
        .ok_or_else(|| CliError::Usage(format!("no station with id {}", args.station_id)))?;
    let station = &instance.stations[index];
    let c = instance.frame_time;
    if !(0.0..=c).contains(&args.visit) {
        return Err(CliError::Usage(format!("--visit must lie in [0, {c}]")));
    }
    let cfg = SimConfig {
        cycles: args.cycles,
        warmup_cycles: args.warmup_cycles,
        seed: args.seed,
        ..SimConfig::new(args.cycles, args.seed)
    };
    let report = simulate_station(station, c, args.visit, &cfg)?;
    let model = station.model();
    let p = wdm_revenue::model::retrial_prob(&model, args.visit)?;
    let q = wdm_revenue::model::drop_prob(&model, args.visit)?;
    let loop_service_prob = if leave_prob(p, q)? > 0.0 {
        eventual_service_prob(p, q)?
    } else {
        0.0
    };
    Ok(ValidatePayload {
        station_id: args.station_id,
        visit: args.visit,
        cycles: args.cycles,
        warmup_cycles: args.warmup_cycles,
        seed: args.seed,
        analytic_revenue: report.analytic_revenue,
        mean_revenue_per_cycle: report.mean_revenue_per_cycle,
        std_error: report.std_error,
        z_score: report.z_score,
        served_fraction: report.served_fraction,
        loop_service_prob,
        loop_served_fraction: report.loop_served_fraction,
        loop_std_error: report.loop_std_error,
    })
}

impl Render for ValidatePayload {
    fn table(&self) -> String {
        let rows = vec![
            vec!["revenue per cycle".into(), two(self.analytic_revenue), format!("{:.4}", self.mean_revenue_per_cycle), format!("{:.4}", self.std_error)],
            vec!["loop service".into(), format!("{:.4}", self.loop_service_prob), format!("{:.4}", self.loop_served_fraction), format!("{:.4}", self.loop_std_error)],
        ];
        let mut out = format!(
            "station {} at visit {} over {} cycles ({} warmup), seed {}\n",
            self.station_id,
            two(self.visit),
            self.cycles,
            self.warmup_cycles,
            self.seed
        );
        out.push_str(&text_table(&["", "analytic", "simulated", "std error"], &rows));
        out.push_str(&format!("z score: {:.3}\n", self.z_score));
        out.push_str(&format!("served fraction: {:.4}\n", self.served_fraction));
        out
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "station_id",
            "visit",
            "cycles",
            "warmup_cycles",
            "seed",
            "analytic_revenue",
            "mean_revenue_per_cycle",
            "std_error",
            "z_score",
            "served_fraction",
            "loop_service_prob",
            "loop_served_fraction",
            "loop_std_error",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.station_id.to_string(),
            self.visit.to_string(),
            self.cycles.to_string(),
            self.warmup_cycles.to_string(),
            self.seed.to_string(),
            self.analytic_revenue.to_string(),
            self.mean_revenue_per_cycle.to_string(),
            self.std_error.to_string(),
            self.z_score.to_string(),
            self.served_fraction.to_string(),
            self.loop_service_prob.to_string(),
            self.loop_served_fraction.to_string(),
            self.loop_std_error.to_string(),
        ]]
    }
}
