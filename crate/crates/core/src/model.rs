//! Station economics and the per-cycle revenue curve of a polled station.
//!
//! A packet arriving while its station is in service leaves immediately. Any
//! other packet circulates in a retrial loop: during each visit it retries
//! with probability `p(V)`, and if it did not retry it is dropped at the end
//! of the visit with probability `q(V)`. The expected gross revenue per cycle
//! of a station with visit period `V` inside a frame of length `C` is
//!
//! ```text
//! M(V) = Γ · [ (C − V) · p(V) / r(V) + V ],   r = p + q − p·q
//! ```
//!
//! and the net revenue subtracts the contract cost `C · Θ`.

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};

/// Relative tolerance used when checking declared aggregates against classes.
pub const AGGREGATE_TOLERANCE: f64 = 1e-9;

/// Number of grid intervals used by [`check_shape`].
pub const SHAPE_GRID: usize = 1024;

/// Largest second difference still regarded as concave by [`check_shape`].
pub const CONCAVITY_TOLERANCE: f64 = 1e-8;

/// One packet type arriving at a station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficClass {
    pub arrival_rate: f64,
    pub profit_per_packet: f64,
    pub penalty_per_packet: f64,
}

impl TrafficClass {
    pub fn new(arrival_rate: f64, profit_per_packet: f64, penalty_per_packet: f64) -> Result<Self> {
        let class = Self {
            arrival_rate,
            profit_per_packet,
            penalty_per_packet,
        };
        class.validate()?;
        Ok(class)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.arrival_rate.is_finite() && self.arrival_rate >= 0.0) {
            return Err(argument(format!(
                "arrival rate must be finite and nonnegative, got {}",
                self.arrival_rate
            )));
        }
        if !self.profit_per_packet.is_finite() {
            return Err(argument("profit per packet must be finite"));
        }
        if !(self.penalty_per_packet.is_finite() && self.penalty_per_packet >= 0.0) {
            return Err(argument(format!(
                "penalty per packet must be finite and nonnegative, got {}",
                self.penalty_per_packet
            )));
        }
        Ok(())
    }
}

/// Retrial and drop probabilities as functions of the visit period.
pub trait ProbabilityModel {
    /// Probability that a loop packet retries during a visit of length `v`.
    fn retrial_at(&self, v: f64) -> f64;

    /// Probability that a loop packet which did not retry is dropped.
    fn drop_at(&self, v: f64) -> f64;

    /// Analytic `(dp/dv, dq/dv)` when available.
    fn slopes_at(&self, _v: f64) -> Option<(f64, f64)> {
        None
    }
}

/// `p(v) = 1 − exp(−ν v)`, `q(v) = exp(−μ v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub retry_rate: f64,
    pub drop_decay: f64,
}

impl ProbabilityModel for Exponential {
    #[inline]
    fn retrial_at(&self, v: f64) -> f64 {
        -(-self.retry_rate * v).exp_m1()
    }

    #[inline]
    fn drop_at(&self, v: f64) -> f64 {
        (-self.drop_decay * v).exp()
    }

    #[inline]
    fn slopes_at(&self, v: f64) -> Option<(f64, f64)> {
        Some((
            self.retry_rate * (-self.retry_rate * v).exp(),
            -self.drop_decay * (-self.drop_decay * v).exp(),
        ))
    }
}

impl<M: ProbabilityModel + ?Sized> ProbabilityModel for &M {
    fn retrial_at(&self, v: f64) -> f64 {
        (**self).retrial_at(v)
    }
    fn drop_at(&self, v: f64) -> f64 {
        (**self).drop_at(v)
    }
    fn slopes_at(&self, v: f64) -> Option<(f64, f64)> {
        (**self).slopes_at(v)
    }
}

/// Economics and loop behaviour of one router port.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationParams {
    pub station_id: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<TrafficClass>,
    /// Maximum revenue rate that can be earned back by serving packets.
    pub gamma: f64,
    /// Contract cost rate.
    pub theta: f64,
    pub retry_rate: f64,
    pub drop_decay: f64,
    pub switchover: f64,
}

impl StationParams {
    /// Station described by aggregated rates only.
    pub fn new(
        station_id: usize,
        gamma: f64,
        theta: f64,
        retry_rate: f64,
        drop_decay: f64,
        switchover: f64,
    ) -> Result<Self> {
        let station = Self {
            station_id,
            classes: Vec::new(),
            gamma,
            theta,
            retry_rate,
            drop_decay,
            switchover,
        };
        station.validate()?;
        Ok(station)
    }

    /// Station whose aggregates are derived from its traffic classes.
    pub fn from_classes(
        station_id: usize,
        classes: Vec<TrafficClass>,
        retry_rate: f64,
        drop_decay: f64,
        switchover: f64,
    ) -> Result<Self> {
        for class in &classes {
            class.validate()?;
        }
        let (gamma, theta) = aggregate(&classes);
        let station = Self {
            station_id,
            classes,
            gamma,
            theta,
            retry_rate,
            drop_decay,
            switchover,
        };
        station.validate()?;
        Ok(station)
    }

    pub fn validate(&self) -> Result<()> {
        let id = self.station_id;
        if id == 0 {
            return Err(argument("station ids start at 1"));
        }
        let check = |ok: bool, what: &str, value: f64| {
            if ok {
                Ok(())
            } else {
                Err(argument(format!("station {id}: {what}, got {value}")))
            }
        };
        check(self.gamma.is_finite() && self.gamma >= 0.0, "gamma must be finite and >= 0", self.gamma)?;
        check(self.theta.is_finite() && self.theta >= 0.0, "theta must be finite and >= 0", self.theta)?;
        check(
            self.retry_rate.is_finite() && self.retry_rate > 0.0,
            "retry rate must be finite and > 0",
            self.retry_rate,
        )?;
        check(
            self.drop_decay.is_finite() && self.drop_decay > 0.0,
            "drop decay must be finite and > 0",
            self.drop_decay,
        )?;
        check(
            self.switchover.is_finite() && self.switchover >= 0.0,
            "switchover must be finite and >= 0",
            self.switchover,
        )?;
        if !self.classes.is_empty() {
            for class in &self.classes {
                class.validate()?;
            }
            let (gamma, theta) = aggregate(&self.classes);
            if !close(gamma, self.gamma) || !close(theta, self.theta) {
                return Err(argument(format!(
                    "station {id}: declared gamma/theta ({}, {}) disagree with its classes ({gamma}, {theta})",
                    self.gamma, self.theta
                )));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Exponential {
        Exponential {
            retry_rate: self.retry_rate,
            drop_decay: self.drop_decay,
        }
    }

    pub fn curve(&self, frame_time: f64) -> RevenueCurve<Exponential> {
        RevenueCurve::new(self.gamma, frame_time, self.model())
    }
}

/// `(Γ, Θ) = (Σ λ(γ + θ), Σ λθ)` over the classes.
pub fn aggregate(classes: &[TrafficClass]) -> (f64, f64) {
    classes.iter().fold((0.0, 0.0), |(g, t), c| {
        (
            g + c.arrival_rate * (c.profit_per_packet + c.penalty_per_packet),
            t + c.arrival_rate * c.penalty_per_packet,
        )
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= AGGREGATE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// A complete problem: stations, number of wavelengths and frame time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub stations: Vec<StationParams>,
    pub wavelengths: usize,
    pub frame_time: f64,
}

impl Instance {
    pub fn new(stations: Vec<StationParams>, wavelengths: usize, frame_time: f64) -> Result<Self> {
        let instance = Self {
            stations,
            wavelengths,
            frame_time,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stations.is_empty() {
            return Err(argument("an instance needs at least one station"));
        }
        if self.wavelengths == 0 {
            return Err(argument("an instance needs at least one wavelength"));
        }
        if !(self.frame_time.is_finite() && self.frame_time > 0.0) {
            return Err(argument(format!("frame time must be positive, got {}", self.frame_time)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for station in &self.stations {
            station.validate()?;
            if !seen.insert(station.station_id) {
                return Err(argument(format!("duplicate station id {}", station.station_id)));
            }
            if station.switchover >= self.frame_time {
                return Err(Error::Infeasible(format!(
                    "station {}: switchover {} does not fit in frame time {}",
                    station.station_id, station.switchover, self.frame_time
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    /// Same stations and frame, different wavelength count.
    pub fn with_wavelengths(&self, wavelengths: usize) -> Result<Self> {
        Self::new(self.stations.clone(), wavelengths, self.frame_time)
    }

    pub fn index_of(&self, station_id: usize) -> Option<usize> {
        self.stations.iter().position(|s| s.station_id == station_id)
    }

    /// `C · Σ Γ_i`, the revenue earned if every station were served all frame.
    pub fn revenue_ceiling(&self) -> f64 {
        self.frame_time * self.stations.iter().map(|s| s.gamma).sum::<f64>()
    }

    /// Shape diagnostics for every station whose curve is not concave or not
    /// non-decreasing on the frame.
    pub fn shape_warnings(&self) -> Vec<String> {
        self.stations
            .iter()
            .filter_map(|s| {
                let report = check_shape(&s.curve(self.frame_time), SHAPE_GRID);
                report.warning(s.station_id)
            })
            .collect()
    }
}

/// `M(v)` and `M'(v)` for one station under a given probability model.
#[derive(Debug, Clone, Copy)]
pub struct RevenueCurve<M> {
    pub gamma: f64,
    pub frame_time: f64,
    pub model: M,
}

impl<M: ProbabilityModel> RevenueCurve<M> {
    pub fn new(gamma: f64, frame_time: f64, model: M) -> Self {
        Self {
            gamma,
            frame_time,
            model,
        }
    }

    /// Eventual service probability of a loop packet; `0` when `p = 0`.
    #[inline]
    fn service_ratio(&self, v: f64) -> f64 {
        let p = self.model.retrial_at(v);
        if p <= 0.0 {
            return 0.0;
        }
        let q = self.model.drop_at(v);
        p / (p + q - p * q)
    }

    /// Gross revenue per cycle; `v` is not range-checked.
    #[inline]
    pub fn value(&self, v: f64) -> f64 {
        self.gamma * ((self.frame_time - v) * self.service_ratio(v) + v)
    }

    /// Derivative of [`value`](Self::value); analytic when the model provides
    /// slopes, otherwise a central difference with step `1e-6 · C`
    /// (one-sided at the ends of the frame).
    #[inline]
    pub fn derivative(&self, v: f64) -> f64 {
        match self.model.slopes_at(v) {
            Some((dp, dq)) => self.analytic_derivative(v, dp, dq),
            None => self.finite_difference(v),
        }
    }

    fn analytic_derivative(&self, v: f64, dp: f64, dq: f64) -> f64 {
        let p = self.model.retrial_at(v);
        let q = self.model.drop_at(v);
        let r = p + q - p * q;
        if r <= 0.0 {
            return self.finite_difference(v);
        }
        let ratio = p / r;
        let dr = dp * (1.0 - q) + dq * (1.0 - p);
        let dratio = (dp * r - p * dr) / (r * r);
        self.gamma * (1.0 - ratio + (self.frame_time - v) * dratio)
    }

    pub fn finite_difference(&self, v: f64) -> f64 {
        let c = self.frame_time;
        let h = 1e-6 * c;
        let lo = (v - h).max(0.0);
        let hi = (v + h).min(c);
        if hi - lo <= 0.0 {
            return 0.0;
        }
        (self.value(hi) - self.value(lo)) / (hi - lo)
    }
}

fn check_time(v: f64) -> Result<()> {
    if v.is_nan() || v < 0.0 {
        return Err(argument(format!("time must be nonnegative, got {v}")));
    }
    Ok(())
}

fn check_visit(c: f64, v: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(argument(format!("frame time must be positive, got {c}")));
    }
    if v.is_nan() || !(0.0..=c).contains(&v) {
        return Err(argument(format!("visit period {v} outside [0, {c}]")));
    }
    Ok(())
}

fn check_probability(x: f64, name: &str) -> Result<()> {
    if x.is_nan() || !(0.0..=1.0).contains(&x) {
        return Err(argument(format!("{name} = {x} is not a probability")));
    }
    Ok(())
}

pub fn retrial_prob(model: &impl ProbabilityModel, v: f64) -> Result<f64> {
    check_time(v)?;
    Ok(model.retrial_at(v))
}

pub fn drop_prob(model: &impl ProbabilityModel, v: f64) -> Result<f64> {
    check_time(v)?;
    Ok(model.drop_at(v))
}

/// `r = p + q − pq`: a loop packet either retries or is dropped.
pub fn leave_prob(p: f64, q: f64) -> Result<f64> {
    check_probability(p, "p")?;
    check_probability(q, "q")?;
    Ok(p + q - p * q)
}

/// Gross revenue per cycle of `station` visited for `v` in a frame of `c`.
pub fn station_revenue(station: &StationParams, c: f64, v: f64) -> Result<f64> {
    check_visit(c, v)?;
    Ok(station.curve(c).value(v))
}

/// Gross revenue minus the contract cost `c · Θ`.
pub fn net_revenue(station: &StationParams, c: f64, v: f64) -> Result<f64> {
    Ok(station_revenue(station, c, v)? - c * station.theta)
}

pub fn revenue_derivative(station: &StationParams, c: f64, v: f64) -> Result<f64> {
    check_visit(c, v)?;
    Ok(station.curve(c).derivative(v))
}

/// Grid scan of a revenue curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeReport {
    /// Largest second central difference over interior grid points.
    pub max_second_difference: f64,
    /// Where it occurs.
    pub worst_point: f64,
    /// Smallest forward difference over the grid.
    pub min_first_difference: f64,
}

impl ShapeReport {
    pub fn is_concave(&self) -> bool {
        self.max_second_difference <= CONCAVITY_TOLERANCE
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.min_first_difference >= -CONCAVITY_TOLERANCE
    }

    fn warning(&self, station_id: usize) -> Option<String> {
        let mut parts = Vec::new();
        if !self.is_concave() {
            parts.push(format!(
                "not concave (second difference {:.3e} at v = {:.4})",
                self.max_second_difference, self.worst_point
            ));
        }
        if !self.is_nondecreasing() {
            parts.push(format!(
                "decreasing somewhere (first difference {:.3e})",
                self.min_first_difference
            ));
        }
        if parts.is_empty() {
            None
        } else {
            Some(format!(
                "station {station_id}: revenue curve {}; allocation may be only locally optimal",
                parts.join(", ")
            ))
        }
    }
}

pub fn check_shape<M: ProbabilityModel>(curve: &RevenueCurve<M>, intervals: usize) -> ShapeReport {
    let intervals = intervals.max(2);
    let h = curve.frame_time / intervals as f64;
    let values: Vec<f64> = (0..=intervals).map(|k| curve.value(k as f64 * h)).collect();
    let mut report = ShapeReport {
        max_second_difference: f64::NEG_INFINITY,
        worst_point: 0.0,
        min_first_difference: f64::INFINITY,
    };
    for k in 1..intervals {
        let d2 = values[k + 1] - 2.0 * values[k] + values[k - 1];
        if d2 > report.max_second_difference {
            report.max_second_difference = d2;
            report.worst_point = k as f64 * h;
        }
    }
    for pair in values.windows(2) {
        report.min_first_difference = report.min_first_difference.min(pair[1] - pair[0]);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn station(gamma: f64, theta: f64, nu: f64, mu: f64) -> StationParams {
        StationParams::new(1, gamma, theta, nu, mu, 0.2).unwrap()
    }

    #[test]
    fn retrial_examples() {
        let m = Exponential {
            retry_rate: 0.5,
            drop_decay: 0.5,
        };
        assert_eq!(retrial_prob(&m, 0.0).unwrap(), 0.0);
        assert!((retrial_prob(&m, 2.0).unwrap() - 0.632121).abs() < 1e-6);
        assert!((retrial_prob(&m, 1e4).unwrap() - 1.0).abs() < 1e-12);
        assert!(retrial_prob(&m, -0.1).is_err());
    }

    #[test]
    fn drop_examples() {
        let m = Exponential {
            retry_rate: 0.5,
            drop_decay: 0.5,
        };
        assert_eq!(drop_prob(&m, 0.0).unwrap(), 1.0);
        assert!((drop_prob(&m, 2.0).unwrap() - 0.367879).abs() < 1e-6);
        let steep = Exponential {
            retry_rate: 0.5,
            drop_decay: 1e4,
        };
        assert!(drop_prob(&steep, 1.0).unwrap() < 1e-12);
        assert!(drop_prob(&m, f64::NAN).is_err());
    }

    #[test]
    fn leave_examples() {
        assert_eq!(leave_prob(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(leave_prob(1.0, 0.0).unwrap(), 1.0);
        assert!((leave_prob(0.393469, 0.606531).unwrap() - 0.761349).abs() < 1e-6);
        assert!(leave_prob(1.2, 0.0).is_err());
        assert!(leave_prob(0.5, -0.1).is_err());
    }

    #[test]
    fn revenue_endpoints() {
        let s = station(3.0, 0.0, 0.5, 0.5);
        assert_eq!(station_revenue(&s, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(station_revenue(&s, 2.0, 2.0).unwrap(), 6.0);
        assert!(station_revenue(&s, 2.0, 2.1).is_err());
        assert!(station_revenue(&s, 2.0, -0.1).is_err());
    }

    #[test]
    fn net_revenue_examples() {
        let s = station(3.0, 1.0, 0.5, 0.5);
        assert_eq!(net_revenue(&s, 2.0, 2.0).unwrap(), 4.0);
        let free = station(3.0, 0.0, 0.5, 0.5);
        assert_eq!(
            net_revenue(&free, 2.0, 0.7).unwrap(),
            station_revenue(&free, 2.0, 0.7).unwrap()
        );
        // p = 1 - e^-0.5, q = e^-0.5 at v = 1
        let s = station(1.0, 0.5, 0.5, 0.5);
        let p = 1.0 - (-0.5f64).exp();
        let q = (-0.5f64).exp();
        let expected = (2.0 - 1.0) * p / (p + q - p * q) + 1.0 - 2.0 * 0.5;
        assert!((expected - 0.516806).abs() < 1e-6);
        assert!((net_revenue(&s, 2.0, 1.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_over_zero_ratio_is_zero() {
        struct Silent;
        impl ProbabilityModel for Silent {
            fn retrial_at(&self, _v: f64) -> f64 {
                0.0
            }
            fn drop_at(&self, _v: f64) -> f64 {
                0.0
            }
        }
        let curve = RevenueCurve::new(2.0, 4.0, Silent);
        assert_eq!(curve.value(0.0), 0.0);
        assert_eq!(curve.value(1.5), 3.0);
    }

    #[test]
    fn derivative_near_frame_end_matches_closed_form() {
        let s = station(3.0, 0.0, 0.5, 0.5);
        let c = 2.0;
        let p = 1.0 - (-1.0f64).exp();
        let q = (-1.0f64).exp();
        let at_end = 3.0 * (1.0 - p / (p + q - p * q));
        let d = revenue_derivative(&s, c, c).unwrap();
        assert!((d - at_end).abs() < 1e-12);
        let near = revenue_derivative(&s, c, c - 1e-4).unwrap();
        assert!((near - at_end).abs() < 1e-3);
    }

    #[test]
    fn generic_model_falls_back_to_finite_differences() {
        struct Opaque(Exponential);
        impl ProbabilityModel for Opaque {
            fn retrial_at(&self, v: f64) -> f64 {
                self.0.retrial_at(v)
            }
            fn drop_at(&self, v: f64) -> f64 {
                self.0.drop_at(v)
            }
        }
        let e = Exponential {
            retry_rate: 0.7,
            drop_decay: 0.3,
        };
        let analytic = RevenueCurve::new(2.5, 3.0, e);
        let numeric = RevenueCurve::new(2.5, 3.0, Opaque(e));
        for v in [0.0, 0.4, 1.5, 2.9, 3.0] {
            let a = analytic.derivative(v);
            let n = numeric.derivative(v);
            assert!((a - n).abs() <= 1e-4 * a.abs().max(1.0), "v={v}: {a} vs {n}");
        }
    }

    #[test]
    fn classes_aggregate() {
        let classes = vec![
            TrafficClass::new(1.0, 2.0, 0.5).unwrap(),
            TrafficClass::new(0.5, 1.0, 1.0).unwrap(),
        ];
        let s = StationParams::from_classes(1, classes.clone(), 0.5, 0.5, 0.1).unwrap();
        assert!((s.gamma - 3.5).abs() < 1e-12);
        assert!((s.theta - 1.0).abs() < 1e-12);

        let mut bad = s.clone();
        bad.gamma = 3.6;
        assert!(bad.validate().is_err());
        assert!(TrafficClass::new(-1.0, 1.0, 0.0).is_err());
        assert!(TrafficClass::new(1.0, 1.0, -0.5).is_err());
    }

    #[test]
    fn instance_validation() {
        let s = station(1.0, 0.0, 0.5, 0.5);
        assert!(Instance::new(vec![], 1, 2.0).is_err());
        assert!(Instance::new(vec![s.clone()], 0, 2.0).is_err());
        assert!(Instance::new(vec![s.clone()], 1, 0.0).is_err());
        assert!(Instance::new(vec![s.clone(), s.clone()], 1, 2.0).is_err());
        let mut late = s.clone();
        late.switchover = 2.0;
        assert!(matches!(
            Instance::new(vec![late], 1, 2.0),
            Err(Error::Infeasible(_))
        ));
        assert!(StationParams::new(1, 1.0, 0.0, 0.0, 0.5, 0.1).is_err());
        assert!(StationParams::new(1, 1.0, 0.0, 0.5, 0.5, -0.1).is_err());
        assert!(StationParams::new(0, 1.0, 0.0, 0.5, 0.5, 0.1).is_err());
    }

    #[test]
    fn shape_scan_flags_the_convex_start() {
        // Small retry rates make M convex right after v = 0.
        let s = station(4.0, 0.0, 0.05, 0.5);
        let report = check_shape(&s.curve(8.0), SHAPE_GRID);
        assert!(!report.is_concave());
        assert!(report.is_nondecreasing());
        let inst = Instance::new(vec![s], 1, 8.0).unwrap();
        assert_eq!(inst.shape_warnings().len(), 1);
    }
}
