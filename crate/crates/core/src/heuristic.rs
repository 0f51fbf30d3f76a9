//! Three-step assignment heuristic.
//!
//! 1. Pool all wavelengths into one frame of length `K·C` and allocate visit
//!    periods across every station ("step one"). Stations that fill a whole
//!    wavelength get one to themselves; stations allocated nothing are left
//!    unserved.
//! 2. Spread the remaining stations over the remaining wavelengths with the
//!    longest-processing-time-first rule, using `S_i + Ṽ_i` as the load.
//! 3. Re-allocate visit periods inside every shared wavelength so that
//!    `Σ (S_i + V_i) = C` holds exactly ("step two").

use serde::{Deserialize, Serialize};

use crate::allocator::{allocate, AllocationProblem};
use crate::error::{argument, Error, Result};
use crate::model::Instance;

/// Tolerance, relative to `C`, for membership in the sole and unserved sets.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-6;

/// Station-to-wavelength map. Indices follow `Instance::stations`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// Wavelength label in `1..=K`, or `0` for an unserved station.
    pub wavelength_of: Vec<usize>,
    /// Stations that occupy their wavelength alone.
    pub sole: Vec<bool>,
}

impl Assignment {
    /// Builds an assignment from per-station labels, marking every station
    /// that is alone on its wavelength as sole.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let max = labels.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0usize; max + 1];
        for &l in &labels {
            counts[l] += 1;
        }
        let sole = labels.iter().map(|&l| l != 0 && counts[l] == 1).collect();
        Self {
            wavelength_of: labels,
            sole,
        }
    }

    /// Member station indices of each wavelength label `1..=max`.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let max = self.wavelength_of.iter().copied().max().unwrap_or(0);
        let mut groups = vec![Vec::new(); max];
        for (i, &l) in self.wavelength_of.iter().enumerate() {
            if l > 0 {
                groups[l - 1].push(i);
            }
        }
        groups
    }

    pub fn unserved(&self) -> Vec<usize> {
        (0..self.wavelength_of.len())
            .filter(|&i| self.wavelength_of[i] == 0)
            .collect()
    }

    /// Checks that labels stay within `1..=k` and that a sole station never
    /// shares its wavelength.
    pub fn validate(&self, k: usize) -> Result<()> {
        if self.sole.len() != self.wavelength_of.len() {
            return Err(argument("assignment vectors differ in length"));
        }
        for (i, &l) in self.wavelength_of.iter().enumerate() {
            if l > k {
                return Err(argument(format!("station index {i} on wavelength {l} > {k}")));
            }
            if self.sole[i] && l == 0 {
                return Err(argument(format!("station index {i} is sole but unassigned")));
            }
        }
        for (w, members) in self.groups().iter().enumerate() {
            let soles = members.iter().filter(|&&i| self.sole[i]).count();
            if soles > 0 && members.len() > 1 {
                return Err(argument(format!(
                    "wavelength {} mixes a sole station with others",
                    w + 1
                )));
            }
        }
        Ok(())
    }

    /// Relabels wavelengths in order of their smallest member index so that
    /// equal set partitions compare equal.
    pub fn canonical(&self) -> Self {
        let mut map = std::collections::BTreeMap::new();
        let mut next = 1;
        let labels = self
            .wavelength_of
            .iter()
            .map(|&l| {
                if l == 0 {
                    0
                } else {
                    *map.entry(l).or_insert_with(|| {
                        let label = next;
                        next += 1;
                        label
                    })
                }
            })
            .collect();
        Self {
            wavelength_of: labels,
            sole: self.sole.clone(),
        }
    }
}

/// Visit periods per station, plus the step-one values they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitPlan {
    pub visit: Vec<f64>,
    pub provisional: Vec<f64>,
}

impl VisitPlan {
    /// Checks the frame equations of every wavelength. Wavelengths listed in
    /// `degenerate` may be all-zero instead.
    pub fn validate(&self, instance: &Instance, assignment: &Assignment, degenerate: &[usize]) -> Result<()> {
        let c = instance.frame_time;
        for (i, &l) in assignment.wavelength_of.iter().enumerate() {
            if l == 0 && self.visit[i] != 0.0 {
                return Err(argument(format!("unserved station index {i} has a visit")));
            }
            if assignment.sole[i] && self.visit[i] != c {
                return Err(argument(format!("sole station index {i} does not get the full frame")));
            }
        }
        for (w, members) in assignment.groups().iter().enumerate() {
            if members.len() < 2 {
                continue;
            }
            let used: f64 = members
                .iter()
                .map(|&i| instance.stations[i].switchover + self.visit[i])
                .sum();
            let zeros = members.iter().all(|&i| self.visit[i] == 0.0);
            if (used - c).abs() > 1e-6 && !(zeros && degenerate.contains(&(w + 1))) {
                return Err(argument(format!(
                    "wavelength {} uses {used} of frame {c}",
                    w + 1
                )));
            }
        }
        Ok(())
    }
}

/// How visit periods are finalized inside each shared wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finalization {
    /// Re-run the concave allocation per wavelength.
    #[default]
    Two,
    /// Scale the step-one visits uniformly to fill the frame.
    Alpha,
}

/// Step-one sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Stations granted a whole wavelength.
    pub sole: Vec<usize>,
    /// Stations allocated nothing.
    pub unserved: Vec<usize>,
    /// Everything else, by load `S_i + Ṽ_i` descending, then index.
    pub remainder: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub assignment: Assignment,
    pub plan: VisitPlan,
    /// Σ M_i(V_i).
    pub total_revenue: f64,
    /// Total revenue minus `C · Σ Θ_i`.
    pub net_revenue: f64,
    pub per_station: Vec<f64>,
    pub served_count: usize,
    pub partition: Partition,
    /// Wavelength labels whose switchovers alone exhaust the frame.
    pub degenerate: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Step one: allocate `K·C − Σ S_i` across all stations with bounds `C − S_i`.
pub fn solve_one(instance: &Instance) -> Result<Vec<f64>> {
    instance.validate()?;
    let c = instance.frame_time;
    let total_switchover: f64 = instance.stations.iter().map(|s| s.switchover).sum();
    let budget = instance.wavelengths as f64 * c - total_switchover;
    if budget < 0.0 {
        return Err(Error::Infeasible(format!(
            "switchovers total {total_switchover} exceed the pooled capacity {}",
            instance.wavelengths as f64 * c
        )));
    }
    let problem = AllocationProblem::new(
        instance.stations.iter().map(|s| s.curve(c)).collect(),
        budget,
        instance.stations.iter().map(|s| c - s.switchover).collect(),
    )?;
    Ok(allocate(&problem)?.values)
}

pub fn partition(instance: &Instance, provisional: &[f64]) -> Result<Partition> {
    if provisional.len() != instance.len() {
        return Err(argument("provisional visits do not match the station count"));
    }
    let c = instance.frame_time;
    let eps = MEMBERSHIP_TOLERANCE * c;
    let mut sole = Vec::new();
    let mut unserved = Vec::new();
    let mut remainder = Vec::new();
    for (i, (s, &v)) in instance.stations.iter().zip(provisional).enumerate() {
        if v >= c - s.switchover - eps {
            sole.push(i);
        } else if v <= eps {
            unserved.push(i);
        } else {
            remainder.push(i);
        }
    }
    if sole.len() > instance.wavelengths {
        return Err(Error::Infeasible(format!(
            "{} stations fill a wavelength each but only {} wavelengths exist",
            sole.len(),
            instance.wavelengths
        )));
    }
    let load = |i: usize| instance.stations[i].switchover + provisional[i];
    remainder.sort_by(|&a, &b| {
        load(b)
            .partial_cmp(&load(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(instance.stations[a].station_id.cmp(&instance.stations[b].station_id))
    });
    Ok(Partition {
        sole,
        unserved,
        remainder,
    })
}

/// Longest-processing-time-first list scheduling of pre-sorted loads onto
/// `machines` bins. The first `machines` items open the bins in order; each
/// later item joins the least-loaded bin (lowest index on ties). Returns the
/// item keys per bin.
pub fn lpt_assign<K: Copy>(items: &[(K, f64)], machines: usize) -> Result<Vec<Vec<K>>> {
    if machines == 0 {
        if items.is_empty() {
            return Ok(Vec::new());
        }
        return Err(argument("no wavelengths left for the remaining stations"));
    }
    let mut bins: Vec<Vec<K>> = vec![Vec::new(); machines];
    let mut loads = vec![0.0f64; machines];
    for (n, &(key, load)) in items.iter().enumerate() {
        let target = if n < machines {
            n
        } else {
            let mut best = 0;
            for w in 1..machines {
                if loads[w] < loads[best] {
                    best = w;
                }
            }
            best
        };
        bins[target].push(key);
        loads[target] += load;
    }
    Ok(bins)
}

/// Outcome of a per-wavelength allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct WavelengthPlan {
    /// Visit periods aligned with the member list passed in.
    pub visits: Vec<f64>,
    /// True when the members' switchovers leave no time to visit.
    pub degenerate: bool,
}

/// Step two for one wavelength. A lone station takes the whole frame.
///
/// A member whose optimal visit is zero is dropped from the wavelength, so it
/// no longer costs a switchover, and the rest are re-solved with the freed
/// time. Dropped members keep a zero visit in the returned vector.
pub fn solve_two(instance: &Instance, members: &[usize]) -> Result<WavelengthPlan> {
    if members.is_empty() {
        return Err(argument("a wavelength needs at least one station"));
    }
    let c = instance.frame_time;
    let eps = MEMBERSHIP_TOLERANCE * c;
    let mut visits = vec![0.0; members.len()];
    let mut active: Vec<usize> = (0..members.len()).collect();
    loop {
        if let [only] = active.as_slice() {
            visits[*only] = c;
            return Ok(WavelengthPlan {
                visits,
                degenerate: false,
            });
        }
        let switchover: f64 = active.iter().map(|&j| instance.stations[members[j]].switchover).sum();
        let budget = c - switchover;
        if budget <= 0.0 {
            return Ok(WavelengthPlan {
                visits: vec![0.0; members.len()],
                degenerate: true,
            });
        }
        let problem = AllocationProblem::new(
            active.iter().map(|&j| instance.stations[members[j]].curve(c)).collect(),
            budget,
            active.iter().map(|&j| c - instance.stations[members[j]].switchover).collect(),
        )?;
        let values = allocate(&problem)?.values;
        if values.iter().all(|&v| v > eps) {
            for (&j, &v) in active.iter().zip(&values) {
                visits[j] = v;
            }
            return Ok(WavelengthPlan {
                visits,
                degenerate: false,
            });
        }
        active = active
            .iter()
            .zip(&values)
            .filter(|&(_, &v)| v > eps)
            .map(|(&j, _)| j)
            .collect();
    }
}

/// Uniformly rescales step-one visits inside every shared wavelength so the
/// frame is exactly filled. Returns the plan and the degenerate wavelengths.
pub fn alpha_finalize(
    instance: &Instance,
    assignment: &Assignment,
    provisional: &[f64],
) -> Result<(VisitPlan, Vec<usize>)> {
    if provisional.len() != instance.len() || assignment.wavelength_of.len() != instance.len() {
        return Err(argument("assignment or provisional visits do not match the station count"));
    }
    let c = instance.frame_time;
    let mut visit = vec![0.0; instance.len()];
    let mut degenerate = Vec::new();
    for (w, members) in assignment.groups().iter().enumerate() {
        match members.as_slice() {
            [] => {}
            [only] => visit[*only] = c,
            _ => {
                let switchover: f64 = members.iter().map(|&i| instance.stations[i].switchover).sum();
                let provisional_sum: f64 = members.iter().map(|&i| provisional[i]).sum();
                let room = c - switchover;
                if room < 0.0 {
                    degenerate.push(w + 1);
                } else if provisional_sum > 0.0 {
                    let alpha = room / provisional_sum;
                    for &i in members {
                        visit[i] = alpha * provisional[i];
                    }
                }
            }
        }
    }
    Ok((
        VisitPlan {
            visit,
            provisional: provisional.to_vec(),
        },
        degenerate,
    ))
}

/// Per-station gross revenue and its sum.
pub fn evaluate_plan(instance: &Instance, visits: &[f64]) -> (Vec<f64>, f64) {
    let c = instance.frame_time;
    let per_station: Vec<f64> = instance
        .stations
        .iter()
        .zip(visits)
        .map(|(s, &v)| s.curve(c).value(v.clamp(0.0, c)))
        .collect();
    let total = per_station.iter().sum();
    (per_station, total)
}

/// Runs step two on every wavelength of a fixed assignment.
pub fn finalize_with_two(instance: &Instance, assignment: &Assignment) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut visit = vec![0.0; instance.len()];
    let mut degenerate = Vec::new();
    for (w, members) in assignment.groups().iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let plan = solve_two(instance, members)?;
        if plan.degenerate {
            degenerate.push(w + 1);
        }
        for (&i, &v) in members.iter().zip(&plan.visits) {
            visit[i] = v;
        }
    }
    Ok((visit, degenerate))
}

pub fn heuristic_solve(instance: &Instance) -> Result<SolveResult> {
    heuristic_solve_with(instance, Finalization::Two)
}

pub fn heuristic_solve_with(instance: &Instance, finalization: Finalization) -> Result<SolveResult> {
    let provisional = solve_one(instance)?;
    let mut part = partition(instance, &provisional)?;
    let k = instance.wavelengths;
    let mut warnings = instance.shape_warnings();

    let shared = k - part.sole.len();
    if shared == 0 && !part.remainder.is_empty() {
        warnings.push(format!(
            "no wavelength left for {} remaining stations; they stay unserved",
            part.remainder.len()
        ));
        part.unserved.append(&mut part.remainder);
        part.unserved.sort_unstable();
    }

    let items: Vec<(usize, f64)> = part
        .remainder
        .iter()
        .map(|&i| (i, instance.stations[i].switchover + provisional[i]))
        .collect();
    let bins = lpt_assign(&items, shared)?;

    // Shared wavelengths take labels 1..=K−|P|, sole stations the highest ones.
    let mut labels = vec![0usize; instance.len()];
    for (w, bin) in bins.iter().enumerate() {
        for &i in bin {
            labels[i] = w + 1;
        }
    }
    for (n, &i) in part.sole.iter().enumerate() {
        labels[i] = shared + n + 1;
    }
    let mut assignment = Assignment::from_labels(labels).canonical();

    let (visit, mut degenerate) = match finalization {
        Finalization::Two => finalize_with_two(instance, &assignment)?,
        Finalization::Alpha => {
            let (plan, degenerate) = alpha_finalize(instance, &assignment, &provisional)?;
            (plan.visit, degenerate)
        }
    };
    // Stations step two dropped from a shared wavelength count as unserved.
    let dropped: Vec<usize> = (0..instance.len())
        .filter(|&i| {
            let l = assignment.wavelength_of[i];
            finalization == Finalization::Two && l != 0 && visit[i] == 0.0 && !degenerate.contains(&l)
        })
        .collect();
    if !dropped.is_empty() {
        let mut labels = assignment.wavelength_of.clone();
        for &i in &dropped {
            labels[i] = 0;
        }
        let relabeled = Assignment::from_labels(labels).canonical();
        // Degenerate wavelengths lose no members, so any member carries the new label.
        for w in &mut degenerate {
            if let Some(i) = assignment.wavelength_of.iter().position(|&l| l == *w) {
                *w = relabeled.wavelength_of[i];
            }
        }
        assignment = relabeled;
        part.unserved.extend(dropped);
        part.unserved.sort_unstable();
        part.remainder.retain(|i| !part.unserved.contains(i));
    }
    for w in &degenerate {
        warnings.push(format!("wavelength {w}: switchovers fill the frame, visits set to zero"));
    }

    let (per_station, total_revenue) = evaluate_plan(instance, &visit);
    let contract: f64 = instance.stations.iter().map(|s| s.theta).sum::<f64>() * instance.frame_time;
    let served_count = visit.iter().filter(|&&v| v > 0.0).count();
    Ok(SolveResult {
        assignment,
        plan: VisitPlan { visit, provisional },
        total_revenue,
        net_revenue: total_revenue - contract,
        per_station,
        served_count,
        partition: part,
        degenerate,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StationParams;

    fn example_one(n: usize) -> Instance {
        let stations = (1..=n)
            .map(|i| StationParams::new(i, i as f64, 0.0, 0.5, 0.5, 0.2).unwrap())
            .collect();
        Instance::new(stations, 2, 2.0).unwrap()
    }

    #[test]
    fn lpt_hand_example() {
        let items = [(0, 5.0), (1, 4.0), (2, 3.0), (3, 3.0)];
        let bins = lpt_assign(&items, 2).unwrap();
        assert_eq!(bins, vec![vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn lpt_edge_cases() {
        assert_eq!(lpt_assign(&[(7, 1.0)], 3).unwrap(), vec![vec![7], vec![], vec![]]);
        assert!(lpt_assign(&[(7, 1.0)], 0).is_err());
        assert!(lpt_assign::<usize>(&[], 0).unwrap().is_empty());
        // ties go to the lowest index
        let bins = lpt_assign(&[(0, 2.0), (1, 2.0), (2, 1.0)], 2).unwrap();
        assert_eq!(bins, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn three_station_steps() {
        let inst = example_one(3);
        let provisional = solve_one(&inst).unwrap();
        let total: f64 = provisional.iter().sum();
        assert!((total - 3.4).abs() < 1e-9);
        // Nobody saturates; station 3 ends up alone through LPT.
        let part = partition(&inst, &provisional).unwrap();
        assert!(part.sole.is_empty());
        assert!(part.unserved.is_empty());
        assert_eq!(part.remainder, vec![2, 1, 0]);
        let items: Vec<(usize, f64)> = part.remainder.iter().map(|&i| (i, 0.2 + provisional[i])).collect();
        assert_eq!(lpt_assign(&items, 2).unwrap(), vec![vec![2], vec![1, 0]]);
    }

    #[test]
    fn four_station_steps() {
        let inst = example_one(4);
        let provisional = solve_one(&inst).unwrap();
        let part = partition(&inst, &provisional).unwrap();
        assert!(part.sole.is_empty());
        assert_eq!(part.unserved, vec![0]);
        assert_eq!(part.remainder, vec![3, 2, 1]);
    }

    #[test]
    fn saturated_station_joins_the_sole_set() {
        let stations = vec![
            StationParams::new(1, 1.0, 0.0, 0.5, 0.5, 0.2).unwrap(),
            StationParams::new(2, 1.0, 0.0, 0.5, 0.5, 0.2).unwrap(),
            StationParams::new(3, 50.0, 0.0, 0.5, 0.5, 0.2).unwrap(),
        ];
        let inst = Instance::new(stations, 2, 2.0).unwrap();
        let provisional = solve_one(&inst).unwrap();
        assert!((provisional[2] - 1.8).abs() < 1e-9);
        let part = partition(&inst, &provisional).unwrap();
        assert_eq!(part.sole, vec![2]);
        let result = heuristic_solve(&inst).unwrap();
        assert_eq!(result.plan.visit[2], 2.0);
        assert!(result.assignment.sole[2]);
    }

    #[test]
    fn step_two_examples() {
        let inst = example_one(3);
        assert_eq!(solve_two(&inst, &[2]).unwrap().visits, vec![2.0]);
        let pair = solve_two(&inst, &[0, 1]).unwrap();
        assert!((pair.visits[0] - 0.48).abs() < 0.01);
        assert!((pair.visits[1] - 1.12).abs() < 0.01);
        let four = example_one(4);
        let pair = solve_two(&four, &[1, 2]).unwrap();
        assert!((pair.visits[0] - 0.61).abs() < 0.01);
        assert!((pair.visits[1] - 0.99).abs() < 0.01);
        assert!(solve_two(&inst, &[]).is_err());
    }

    #[test]
    fn zero_visit_member_is_dropped() {
        let four = example_one(4);
        let plan = solve_two(&four, &[0, 1, 2]).unwrap();
        assert_eq!(plan.visits[0], 0.0);
        // Stations 2 and 3 split the frame as if station 1 were absent.
        assert!((plan.visits[1] + plan.visits[2] - 1.6).abs() < 1e-9);
        assert!((plan.visits[1] - 0.61).abs() < 0.01);
        let pair = solve_two(&four, &[1, 2]).unwrap();
        assert_eq!(pair.visits, plan.visits[1..].to_vec());
    }

    #[test]
    fn crowded_wavelength_is_degenerate() {
        let stations = (1..=3)
            .map(|i| StationParams::new(i, 1.0, 0.0, 0.5, 0.5, 0.9).unwrap())
            .collect();
        let inst = Instance::new(stations, 3, 2.0).unwrap();
        let plan = solve_two(&inst, &[0, 1, 2]).unwrap();
        assert!(plan.degenerate);
        assert_eq!(plan.visits, vec![0.0; 3]);
    }

    #[test]
    fn all_wavelengths_saturate_when_k_equals_n() {
        let stations = (1..=3)
            .map(|i| StationParams::new(i, i as f64, 0.0, 0.5, 0.5, 0.2).unwrap())
            .collect();
        let inst = Instance::new(stations, 3, 2.0).unwrap();
        let provisional = solve_one(&inst).unwrap();
        for v in provisional {
            assert!((v - 1.8).abs() < 1e-12);
        }
        let result = heuristic_solve(&inst).unwrap();
        assert_eq!(result.assignment.wavelength_of, vec![1, 2, 3]);
        assert!((result.total_revenue - inst.revenue_ceiling()).abs() < 1e-12);
    }

    #[test]
    fn zero_gamma_is_feasible() {
        let stations = (1..=4)
            .map(|i| StationParams::new(i, 0.0, 0.0, 0.5, 0.5, 0.2).unwrap())
            .collect();
        let inst = Instance::new(stations, 2, 2.0).unwrap();
        let provisional = solve_one(&inst).unwrap();
        let total: f64 = provisional.iter().sum();
        assert!((total - (4.0 - 0.8)).abs() < 1e-9);
        assert!(provisional.iter().all(|&v| (0.0..=1.8 + 1e-12).contains(&v)));
        let result = heuristic_solve(&inst).unwrap();
        assert_eq!(result.total_revenue, 0.0);
    }

    #[test]
    fn pooled_switchover_overflow_is_infeasible() {
        let stations = (1..=5)
            .map(|i| StationParams::new(i, 1.0, 0.0, 0.5, 0.5, 1.9).unwrap())
            .collect();
        let inst = Instance::new(stations, 2, 2.0).unwrap();
        assert!(matches!(solve_one(&inst), Err(Error::Infeasible(_))));
    }

    #[test]
    fn alpha_scaling_examples() {
        let stations = (1..=2)
            .map(|i| StationParams::new(i, 1.0, 0.0, 0.5, 0.5, 0.2).unwrap())
            .collect();
        let inst = Instance::new(stations, 1, 2.0).unwrap();
        let assignment = Assignment::from_labels(vec![1, 1]);
        let (plan, degenerate) = alpha_finalize(&inst, &assignment, &[1.0, 1.0]).unwrap();
        assert!(degenerate.is_empty());
        assert!((plan.visit[0] - 0.8).abs() < 1e-12);
        assert!((plan.visit[1] - 0.8).abs() < 1e-12);

        let (plan, _) = alpha_finalize(&inst, &assignment, &[0.6, 1.0]).unwrap();
        assert_eq!(plan.visit, vec![0.6, 1.0]);
    }

    #[test]
    fn alpha_never_beats_two_on_three_stations() {
        let inst = example_one(3);
        let two = heuristic_solve_with(&inst, Finalization::Two).unwrap();
        let alpha = heuristic_solve_with(&inst, Finalization::Alpha).unwrap();
        assert_eq!(two.assignment, alpha.assignment);
        assert!(alpha.total_revenue <= two.total_revenue + 1e-9);
    }

    #[test]
    fn canonical_relabels_by_first_member() {
        let a = Assignment::from_labels(vec![2, 0, 1, 2]).canonical();
        assert_eq!(a.wavelength_of, vec![1, 0, 2, 1]);
        assert_eq!(a.sole, vec![false, false, true, false]);
        assert!(a.validate(2).is_ok());
        assert!(a.validate(1).is_err());
    }
}
