//! Exhaustive and randomized baselines for the assignment problem.
//!
//! Assignments are enumerated as restricted growth strings: station `i` gets
//! label `0` (unserved) or a wavelength label at most one above the largest
//! label used by stations `0..i`. Every set partition therefore appears once,
//! independent of how its wavelengths would be numbered.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::heuristic::{evaluate_plan, finalize_with_two, heuristic_solve, Assignment, SolveResult};
use crate::model::Instance;
use crate::rng::substream;

/// Largest station count accepted for enumeration.
pub const MAX_ENUMERATION_STATIONS: usize = 12;
/// Largest number of canonical assignments accepted for enumeration.
pub const MAX_ENUMERATION_COUNT: u128 = 10_000_000;

const CHUNK: usize = 4096;

/// Which assignments an enumeration covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// Every station is served and all `min(N, K)` wavelengths are used.
    #[default]
    Full,
    /// Any subset of stations, split into at most `K` wavelengths.
    Partial,
}

fn stirling_table(n: usize) -> Vec<Vec<u128>> {
    let mut s = vec![vec![0u128; n + 1]; n + 1];
    s[0][0] = 1;
    for i in 1..=n {
        for j in 1..=i {
            s[i][j] = j as u128 * s[i - 1][j] + s[i - 1][j - 1];
        }
    }
    s
}

fn binomial(n: usize, r: usize) -> u128 {
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of canonical assignments of `n` stations to `k` wavelengths.
pub fn count_assignments(n: usize, k: usize, scope: Scope) -> u128 {
    let s = stirling_table(n);
    match scope {
        Scope::Full => s[n][n.min(k)],
        Scope::Partial => (0..=n)
            .map(|j| binomial(n, j) * (0..=j.min(k)).map(|b| s[j][b]).sum::<u128>())
            .sum(),
    }
}

/// Iterator over canonical label vectors.
#[derive(Debug, Clone)]
pub struct Assignments {
    labels: Vec<usize>,
    k: usize,
    lowest: usize,
    target: usize,
    started: bool,
    done: bool,
}

impl Assignments {
    fn new(n: usize, k: usize, scope: Scope) -> Self {
        let (lowest, target) = match scope {
            Scope::Full => (1, n.min(k)),
            Scope::Partial => (0, 0),
        };
        Self {
            labels: vec![0; n],
            k,
            lowest,
            target,
            started: false,
            done: n == 0,
        }
    }

    /// Lexicographically smallest valid completion of `labels[start..]`.
    fn fill(&mut self, start: usize) {
        let n = self.labels.len();
        let mut top = self.labels[..start].iter().copied().max().unwrap_or(0);
        for j in start..n {
            let left = n - 1 - j;
            let v = if self.target.saturating_sub(top) <= left {
                self.lowest
            } else {
                top + 1
            };
            self.labels[j] = v;
            top = top.max(v);
        }
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill(0);
            return Some(self.labels.clone());
        }
        let n = self.labels.len();
        let mut prefix_top = vec![0usize; n];
        for i in 1..n {
            prefix_top[i] = prefix_top[i - 1].max(self.labels[i - 1]);
        }
        for i in (0..n).rev() {
            let cap = self.k.min(prefix_top[i] + 1);
            let mut v = self.labels[i];
            while v < cap {
                v += 1;
                if self.target.saturating_sub(prefix_top[i].max(v)) <= n - 1 - i {
                    self.labels[i] = v;
                    self.fill(i + 1);
                    return Some(self.labels.clone());
                }
            }
        }
        self.done = true;
        None
    }
}

fn guard(n: usize, k: usize, scope: Scope) -> Result<u128> {
    let count = count_assignments(n, k, scope);
    if n > MAX_ENUMERATION_STATIONS || count > MAX_ENUMERATION_COUNT {
        return Err(Error::TooLarge {
            count,
            limit: MAX_ENUMERATION_COUNT,
        });
    }
    Ok(count)
}

/// All canonical assignments of `n` stations to at most `k` wavelengths.
pub fn enumerate_assignments(n: usize, k: usize, scope: Scope) -> Result<Assignments> {
    if n == 0 || k == 0 {
        return Err(argument("enumeration needs at least one station and one wavelength"));
    }
    guard(n, k, scope)?;
    Ok(Assignments::new(n, k, scope))
}

/// Revenue of a fixed assignment after per-wavelength reallocation.
pub fn assignment_revenue(instance: &Instance, labels: &[usize]) -> Result<(Vec<f64>, f64)> {
    let assignment = Assignment::from_labels(labels.to_vec());
    let (visits, _) = finalize_with_two(instance, &assignment)?;
    let (_, total) = evaluate_plan(instance, &visits);
    Ok((visits, total))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationRow {
    pub labels: Vec<usize>,
    pub visits: Vec<f64>,
    pub revenue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub scope: Scope,
    /// Every canonical assignment, best first.
    pub rows: Vec<EnumerationRow>,
    pub heuristic: SolveResult,
    /// Optimum minus heuristic revenue.
    pub heuristic_gap: f64,
    /// Row whose labels equal the heuristic's assignment, if any.
    pub heuristic_row: Option<usize>,
}

impl EnumerationReport {
    pub fn optimum(&self) -> &EnumerationRow {
        &self.rows[0]
    }
}

fn evaluate_chunk(instance: &Instance, chunk: &[Vec<usize>]) -> Result<Vec<EnumerationRow>> {
    chunk
        .par_iter()
        .map(|labels| {
            let (visits, revenue) = assignment_revenue(instance, labels)?;
            Ok(EnumerationRow {
                labels: labels.clone(),
                visits,
                revenue,
            })
        })
        .collect()
}

fn for_each_chunk<F>(instance: &Instance, scope: Scope, mut f: F) -> Result<()>
where
    F: FnMut(Vec<EnumerationRow>),
{
    let mut iter = enumerate_assignments(instance.len(), instance.wavelengths, scope)?;
    loop {
        let chunk: Vec<Vec<usize>> = iter.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            return Ok(());
        }
        f(evaluate_chunk(instance, &chunk)?);
    }
}

pub fn brute_force_solve(instance: &Instance, scope: Scope) -> Result<EnumerationReport> {
    let heuristic = heuristic_solve(instance)?;
    let mut rows = Vec::new();
    for_each_chunk(instance, scope, |mut chunk| rows.append(&mut chunk))?;
    rows.sort_by(|a, b| {
        b.revenue
            .partial_cmp(&a.revenue)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.labels.cmp(&b.labels))
    });
    let heuristic_row = rows
        .iter()
        .position(|r| r.labels == heuristic.assignment.wavelength_of);
    let heuristic_gap = rows[0].revenue - heuristic.total_revenue;
    Ok(EnumerationReport {
        scope,
        rows,
        heuristic,
        heuristic_gap,
        heuristic_row,
    })
}

/// Best row only, without keeping the full table in memory.
pub fn brute_force_optimum(instance: &Instance, scope: Scope) -> Result<EnumerationRow> {
    let mut best: Option<EnumerationRow> = None;
    for_each_chunk(instance, scope, |chunk| {
        for row in chunk {
            if best.as_ref().is_none_or(|b| row.revenue > b.revenue) {
                best = Some(row);
            }
        }
    })?;
    best.ok_or_else(|| argument("nothing to enumerate"))
}

/// How random baseline assignments are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineMode {
    /// Random balanced partition; no wavelength gets more than `⌈N/K⌉`.
    Capped,
    /// Each station picks a wavelength uniformly and independently.
    Uncapped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineStats {
    pub mode: BaselineMode,
    pub trials: usize,
    pub seed: u64,
    pub maximum: f64,
    pub average: f64,
    pub minimum: f64,
    /// Share of trials strictly above the heuristic, in percent.
    pub percent_above: f64,
    pub heuristic_revenue: f64,
}

/// Labels for one random trial.
pub fn random_labels(n: usize, k: usize, mode: BaselineMode, rng: &mut impl Rng) -> Vec<usize> {
    let mut labels = vec![0; n];
    match mode {
        BaselineMode::Capped => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            for (slot, &i) in order.iter().enumerate() {
                labels[i] = slot % k + 1;
            }
        }
        BaselineMode::Uncapped => {
            for label in &mut labels {
                *label = rng.random_range(1..=k);
            }
        }
    }
    labels
}

/// Revenues of `trials` random assignments; trial `i` draws from substream `i`.
pub fn baseline_revenues(instance: &Instance, mode: BaselineMode, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let n = instance.len();
    let k = instance.wavelengths;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, t as u64);
            let labels = random_labels(n, k, mode, &mut rng);
            Ok(assignment_revenue(instance, &labels)?.1)
        })
        .collect()
}

pub fn random_baseline(instance: &Instance, mode: BaselineMode, trials: usize, seed: u64) -> Result<BaselineStats> {
    if trials == 0 {
        return Err(argument("at least one trial is required"));
    }
    let heuristic = heuristic_solve(instance)?.total_revenue;
    let revenues = baseline_revenues(instance, mode, trials, seed)?;
    let maximum = revenues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let minimum = revenues.iter().copied().fold(f64::INFINITY, f64::min);
    let average = revenues.iter().sum::<f64>() / trials as f64;
    // Revenues equal to the heuristic up to rounding do not count as above it.
    let margin = 1e-9 * heuristic.abs().max(1.0);
    let above = revenues.iter().filter(|&&r| r > heuristic + margin).count();
    Ok(BaselineStats {
        mode,
        trials,
        seed,
        maximum,
        average: average.clamp(minimum, maximum),
        minimum,
        percent_above: 100.0 * above as f64 / trials as f64,
        heuristic_revenue: heuristic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub wavelengths: usize,
    pub revenue: f64,
    pub served: usize,
}

/// Heuristic revenue and served-station count for each wavelength count.
pub fn sweep_wavelengths(base: &Instance, k_values: &[usize]) -> Result<Vec<SweepRow>> {
    if k_values.is_empty() {
        return Err(argument("the wavelength list is empty"));
    }
    if k_values.contains(&0) {
        return Err(argument("wavelength counts must be at least 1"));
    }
    k_values
        .iter()
        .map(|&k| {
            let result = heuristic_solve(&base.with_wavelengths(k)?)?;
            Ok(SweepRow {
                wavelengths: k,
                revenue: result.total_revenue,
                served: result.served_count,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StationParams;
    use std::collections::BTreeSet;

    /// Independent oracle: canonicalize every labelled vector and collect.
    fn canonical_set(n: usize, k: usize, scope: Scope) -> BTreeSet<Vec<usize>> {
        let base = k + 1;
        let total = base.pow(n as u32);
        let mut out = BTreeSet::new();
        for code in 0..total {
            let mut labels = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                labels.push(c % base);
                c /= base;
            }
            if scope == Scope::Full {
                let used: BTreeSet<usize> = labels.iter().copied().collect();
                if used.contains(&0) || used.len() != n.min(k) {
                    continue;
                }
            }
            out.insert(Assignment::from_labels(labels).canonical().wavelength_of);
        }
        out
    }

    #[test]
    fn enumeration_matches_relabelling_oracle() {
        for n in 1..=5 {
            for k in 1..=4 {
                for scope in [Scope::Full, Scope::Partial] {
                    let listed: Vec<Vec<usize>> = enumerate_assignments(n, k, scope).unwrap().collect();
                    let unique: BTreeSet<Vec<usize>> = listed.iter().cloned().collect();
                    assert_eq!(listed.len(), unique.len(), "duplicates n={n} k={k} {scope:?}");
                    assert_eq!(unique, canonical_set(n, k, scope), "n={n} k={k} {scope:?}");
                    assert_eq!(listed.len() as u128, count_assignments(n, k, scope));
                }
            }
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_assignments(3, 2, Scope::Full).unwrap().count(), 3);
        assert_eq!(enumerate_assignments(4, 2, Scope::Full).unwrap().count(), 7);
        assert_eq!(enumerate_assignments(1, 1, Scope::Full).unwrap().count(), 1);
        let rows: Vec<_> = enumerate_assignments(3, 2, Scope::Full).unwrap().collect();
        assert_eq!(rows, vec![vec![1, 1, 2], vec![1, 2, 1], vec![1, 2, 2]]);
    }

    #[test]
    fn guard_names_the_count() {
        match enumerate_assignments(13, 2, Scope::Full) {
            Err(Error::TooLarge { count, .. }) => assert_eq!(count, 4095),
            other => panic!("expected guard error, got {other:?}"),
        }
        match enumerate_assignments(12, 12, Scope::Partial) {
            Err(Error::TooLarge { count, .. }) => assert!(count > MAX_ENUMERATION_COUNT),
            other => panic!("expected guard error, got {other:?}"),
        }
        assert!(enumerate_assignments(0, 2, Scope::Full).is_err());
    }

    fn instance(gammas: &[f64], k: usize, c: f64) -> Instance {
        let stations = gammas
            .iter()
            .enumerate()
            .map(|(i, &g)| StationParams::new(i + 1, g, 0.0, 0.5, 0.5, 0.2).unwrap())
            .collect();
        Instance::new(stations, k, c).unwrap()
    }

    #[test]
    fn enough_wavelengths_give_the_ceiling() {
        let inst = instance(&[1.0, 2.0, 3.0], 4, 2.0);
        let report = brute_force_solve(&inst, Scope::Full).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.optimum().labels, vec![1, 2, 3]);
        assert!((report.optimum().revenue - 12.0).abs() < 1e-12);
    }

    #[test]
    fn baseline_trial_is_deterministic() {
        let inst = instance(&[1.0, 2.0, 3.0, 4.0, 5.0], 2, 2.0);
        let a = random_baseline(&inst, BaselineMode::Uncapped, 1, 99).unwrap();
        let b = random_baseline(&inst, BaselineMode::Uncapped, 1, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.maximum, a.minimum);
        assert!(random_baseline(&inst, BaselineMode::Capped, 0, 1).is_err());
    }

    #[test]
    fn capped_labels_respect_the_cap() {
        let mut rng = substream(3, 0);
        for _ in 0..200 {
            let labels = random_labels(10, 3, BaselineMode::Capped, &mut rng);
            for w in 1..=3 {
                let count = labels.iter().filter(|&&l| l == w).count();
                assert!((3..=4).contains(&count));
            }
        }
    }

    #[test]
    fn symmetric_capped_trials_agree() {
        let inst = instance(&[2.0; 6], 3, 2.0);
        let stats = random_baseline(&inst, BaselineMode::Capped, 50, 5).unwrap();
        assert!((stats.maximum - stats.minimum).abs() < 1e-9);
        assert_eq!(stats.percent_above, 0.0);
    }

    #[test]
    fn sweep_rejects_bad_lists() {
        let inst = instance(&[1.0, 2.0], 1, 2.0);
        assert!(sweep_wavelengths(&inst, &[]).is_err());
        assert!(sweep_wavelengths(&inst, &[0]).is_err());
        let rows = sweep_wavelengths(&inst, &[2]).unwrap();
        assert_eq!(rows[0].served, 2);
    }
}
