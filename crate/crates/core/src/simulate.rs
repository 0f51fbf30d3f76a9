//! Monte Carlo check of the per-cycle revenue formula.
//!
//! The simulator is cycle-synchronous. In every cycle, for each traffic class:
//!
//! 1. each packet already in the retrial loop retries during the visit with
//!    probability `p(V)` and is served; otherwise it is dropped at the end of
//!    the visit with probability `q(V)`, and otherwise stays in the loop;
//! 2. Poisson(`λ V`) packets arrive during the visit and are served at once;
//! 3. Poisson(`λ (C − V)`) packets arrive outside the visit and join the loop.
//!    Their first drop test therefore follows their first retry opportunity.
//!
//! A served packet earns its class profit, a dropped packet costs its penalty.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::model::{net_revenue, ProbabilityModel, StationParams, TrafficClass};
use crate::rng::substream;

pub const DEFAULT_WARMUP: usize = 100;
pub const DEFAULT_BATCH: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub cycles: usize,
    pub warmup_cycles: usize,
    pub seed: u64,
    /// Cycles per batch for the batch-means standard error.
    pub batch_size: usize,
}

impl SimConfig {
    pub fn new(cycles: usize, seed: u64) -> Self {
        Self {
            cycles,
            warmup_cycles: DEFAULT_WARMUP.min(cycles.saturating_sub(1)),
            seed,
            batch_size: DEFAULT_BATCH,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycles == 0 {
            return Err(argument("at least one cycle is required"));
        }
        if self.warmup_cycles >= self.cycles {
            return Err(argument(format!(
                "warmup ({}) must be shorter than the run ({})",
                self.warmup_cycles, self.cycles
            )));
        }
        if self.batch_size == 0 {
            return Err(argument("batch size must be positive"));
        }
        Ok(())
    }
}

/// Packet tallies over the whole run, warmup included.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketCounts {
    pub arrived: u64,
    pub served: u64,
    pub dropped: u64,
    pub in_loop: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub mean_revenue_per_cycle: f64,
    pub std_error: f64,
    /// Served packets among all packets that left the system after warmup.
    pub served_fraction: f64,
    /// Served packets among loop packets that left the system after warmup.
    pub loop_served_fraction: f64,
    /// Binomial standard error of `loop_served_fraction`.
    pub loop_std_error: f64,
    pub analytic_revenue: f64,
    pub z_score: f64,
    pub counts: PacketCounts,
}

/// Probability that a loop packet is eventually served, `p / (p + q − pq)`.
pub fn eventual_service_prob(p: f64, q: f64) -> Result<f64> {
    for (name, x) in [("p", p), ("q", q)] {
        if x.is_nan() || !(0.0..=1.0).contains(&x) {
            return Err(argument(format!("{name} = {x} is not a probability")));
        }
    }
    if p == 0.0 && q == 0.0 {
        return Err(argument("with p = q = 0 a loop packet never leaves"));
    }
    Ok(p / (p + q - p * q))
}

/// Classes to simulate; aggregate-only stations become one class with
/// `λ = 1`, `γ = Γ − Θ`, `θ = Θ`, which has the same expected revenue.
fn effective_classes(station: &StationParams) -> Vec<TrafficClass> {
    if station.classes.is_empty() {
        vec![TrafficClass {
            arrival_rate: 1.0,
            profit_per_packet: station.gamma - station.theta,
            penalty_per_packet: station.theta,
        }]
    } else {
        station.classes.clone()
    }
}

fn poisson(rng: &mut impl Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

fn binomial(rng: &mut impl Rng, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).map(|d| d.sample(rng)).unwrap_or(0)
}

pub fn simulate_station(station: &StationParams, c: f64, v: f64, cfg: &SimConfig) -> Result<SimReport> {
    simulate_with_stream(station, c, v, cfg, 0)
}

fn simulate_with_stream(station: &StationParams, c: f64, v: f64, cfg: &SimConfig, stream: u64) -> Result<SimReport> {
    station.validate()?;
    cfg.validate()?;
    let analytic = net_revenue(station, c, v)?;
    let model = station.model();
    let p = model.retrial_at(v);
    let q = model.drop_at(v);
    let classes = effective_classes(station);
    let mut rng = substream(cfg.seed, stream);

    let mut loops = vec![0u64; classes.len()];
    let mut counts = PacketCounts::default();
    let (mut served_after, mut dropped_after) = (0u64, 0u64);
    let (mut loop_served_after, mut loop_left_after) = (0u64, 0u64);
    let mut batch_means = Vec::new();
    let (mut batch_sum, mut batch_len) = (0.0, 0usize);
    let mut total = 0.0;

    for cycle in 0..cfg.cycles {
        let mut revenue = 0.0;
        let mut served_now = 0u64;
        let mut loop_served_now = 0u64;
        let mut dropped_now = 0u64;
        for (class, in_loop) in classes.iter().zip(loops.iter_mut()) {
            let retried = binomial(&mut rng, *in_loop, p);
            let dropped = binomial(&mut rng, *in_loop - retried, q);
            *in_loop -= retried + dropped;
            let direct = poisson(&mut rng, class.arrival_rate * v);
            let outside = poisson(&mut rng, class.arrival_rate * (c - v));
            *in_loop += outside;

            revenue += class.profit_per_packet * (retried + direct) as f64
                - class.penalty_per_packet * dropped as f64;
            counts.arrived += direct + outside;
            counts.served += retried + direct;
            counts.dropped += dropped;
            served_now += retried + direct;
            loop_served_now += retried;
            dropped_now += dropped;
        }
        if cycle < cfg.warmup_cycles {
            continue;
        }
        served_after += served_now;
        dropped_after += dropped_now;
        loop_served_after += loop_served_now;
        loop_left_after += loop_served_now + dropped_now;
        total += revenue;
        batch_sum += revenue;
        batch_len += 1;
        if batch_len == cfg.batch_size {
            batch_means.push(batch_sum / batch_len as f64);
            batch_sum = 0.0;
            batch_len = 0;
        }
    }
    counts.in_loop = loops.iter().sum();

    let measured = cfg.cycles - cfg.warmup_cycles;
    let mean = total / measured as f64;
    let std_error = if batch_means.len() >= 2 {
        let m = batch_means.iter().sum::<f64>() / batch_means.len() as f64;
        let var = batch_means.iter().map(|b| (b - m).powi(2)).sum::<f64>() / (batch_means.len() - 1) as f64;
        (var / batch_means.len() as f64).sqrt()
    } else {
        0.0
    };
    let fraction = |hit: u64, all: u64| if all == 0 { 0.0 } else { hit as f64 / all as f64 };
    let loop_served_fraction = fraction(loop_served_after, loop_left_after);
    let loop_std_error = if loop_left_after == 0 {
        0.0
    } else {
        (loop_served_fraction * (1.0 - loop_served_fraction) / loop_left_after as f64).sqrt()
    };
    let diff = mean - analytic;
    let z_score = if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= 1e-9 * analytic.abs().max(1.0) {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    Ok(SimReport {
        mean_revenue_per_cycle: mean,
        std_error,
        served_fraction: fraction(served_after, served_after + dropped_after),
        loop_served_fraction,
        loop_std_error,
        analytic_revenue: analytic,
        z_score,
        counts,
    })
}

/// Independent replications; replication `r` uses substream `r` of the seed.
pub fn replicate(station: &StationParams, c: f64, v: f64, cfg: &SimConfig, replications: usize) -> Result<Vec<SimReport>> {
    (0..replications)
        .into_par_iter()
        .map(|r| simulate_with_stream(station, c, v, cfg, r as u64))
        .collect()
}
