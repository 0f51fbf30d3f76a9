//! Separable concave allocation by Lagrangian water-filling.
//!
//! Solves `max Σ f_i(x_i)` subject to `Σ x_i = B` and `0 ≤ x_i ≤ U_i`. For a
//! multiplier `η` every variable independently picks the point where its
//! marginal value equals `η` (clamped to its box); the total allocation is
//! non-increasing in `η`, so an outer search on `η` meets the budget. Both the
//! outer search and the per-variable inner search are bracketed root finders.

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::model::{ProbabilityModel, RevenueCurve};

/// Cap on outer multiplier iterations.
pub const MAX_OUTER_ITERATIONS: usize = 200;
/// The outer search stops once its bracket on `η` is narrower than this.
pub const MULTIPLIER_WIDTH: f64 = 1e-12;
const MAX_INNER_ITERATIONS: usize = 200;

/// A concave, non-decreasing term of the objective.
pub trait Objective {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

impl<M: ProbabilityModel> Objective for RevenueCurve<M> {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        RevenueCurve::value(self, x)
    }
    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        RevenueCurve::derivative(self, x)
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (**self).derivative(x)
    }
}

/// An objective given as a (value, derivative) pair of closures.
#[derive(Clone, Copy)]
pub struct FnObjective<F, D> {
    pub value: F,
    pub derivative: D,
}

impl<F, D> FnObjective<F, D>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    pub fn new(value: F, derivative: D) -> Self {
        Self { value, derivative }
    }
}

impl<F, D> Objective for FnObjective<F, D>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }
}

#[derive(Debug, Clone)]
pub struct AllocationProblem<O> {
    pub objectives: Vec<O>,
    pub budget: f64,
    pub upper_bounds: Vec<f64>,
}

impl<O: Objective> AllocationProblem<O> {
    pub fn new(objectives: Vec<O>, budget: f64, upper_bounds: Vec<f64>) -> Result<Self> {
        let problem = Self {
            objectives,
            budget,
            upper_bounds,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        if self.objectives.is_empty() {
            return Err(argument("allocation needs at least one objective"));
        }
        if self.objectives.len() != self.upper_bounds.len() {
            return Err(argument(format!(
                "{} objectives but {} upper bounds",
                self.objectives.len(),
                self.upper_bounds.len()
            )));
        }
        if !(self.budget.is_finite() && self.budget >= 0.0) {
            return Err(argument(format!("budget must be finite and >= 0, got {}", self.budget)));
        }
        if let Some((i, u)) = self
            .upper_bounds
            .iter()
            .enumerate()
            .find(|(_, u)| !(u.is_finite() && **u >= 0.0))
        {
            return Err(argument(format!("upper bound {i} must be finite and >= 0, got {u}")));
        }
        Ok(())
    }

    fn len(&self) -> usize {
        self.objectives.len()
    }

    fn derivative(&self, i: usize, x: f64) -> Result<f64> {
        let d = self.objectives[i].derivative(x);
        if d.is_nan() {
            return Err(Error::Numeric {
                index: i,
                detail: format!("derivative is NaN at {x}"),
            });
        }
        Ok(d)
    }

    fn objective_value(&self, values: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (i, (o, &x)) in self.objectives.iter().zip(values).enumerate() {
            let v = o.value(x);
            if !v.is_finite() {
                return Err(Error::Numeric {
                    index: i,
                    detail: format!("value is {v} at {x}"),
                });
            }
            total += v;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub values: Vec<f64>,
    /// Lagrange multiplier of the budget constraint at termination.
    pub multiplier: f64,
    pub objective: f64,
    /// All variables sit at their upper bounds because `Σ U ≤ B`.
    pub saturated: bool,
}

/// Stopping rule of [`bracket_root`].
#[derive(Debug, Clone, Copy)]
struct Tolerance {
    width: f64,
    residual: f64,
    max_iter: usize,
}

/// Bracketed root of a non-increasing function by the Illinois variant of
/// regula falsi, with a bisection step whenever the bracket fails to halve.
/// Returns the final bracket `(lo, hi)` with `f(lo) ≥ 0 ≥ f(hi)`; it collapses
/// to a point once `|f|` drops below the residual tolerance.
fn bracket_root<F>(mut f: F, mut lo: f64, mut hi: f64, mut f_lo: f64, mut f_hi: f64, tol: Tolerance) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut side = 0i8;
    let mut last_width = hi - lo;
    for iter in 0..tol.max_iter {
        if hi - lo <= tol.width {
            break;
        }
        if f_lo.abs() <= tol.residual {
            return Ok((lo, lo));
        }
        if f_hi.abs() <= tol.residual {
            return Ok((hi, hi));
        }
        let mut x = if f_lo != f_hi {
            lo + f_lo * (hi - lo) / (f_lo - f_hi)
        } else {
            0.5 * (lo + hi)
        };
        // every third step must have halved the bracket
        if iter % 3 == 2 {
            if hi - lo > 0.5 * last_width {
                x = 0.5 * (lo + hi);
            }
            last_width = hi - lo;
        }
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        if fx > 0.0 {
            lo = x;
            f_lo = fx;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = x;
            f_hi = fx;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    Ok((lo, hi))
}

/// Marginal values of every variable at `0` and at its upper bound.
struct Ends {
    at_zero: Vec<f64>,
    at_upper: Vec<f64>,
}

impl Ends {
    fn new<O: Objective>(problem: &AllocationProblem<O>) -> Result<Self> {
        let n = problem.len();
        Ok(Self {
            at_zero: (0..n).map(|i| problem.derivative(i, 0.0)).collect::<Result<_>>()?,
            at_upper: (0..n)
                .map(|i| problem.derivative(i, problem.upper_bounds[i]))
                .collect::<Result<_>>()?,
        })
    }
}

/// A point `x` of one variable together with its marginal value.
#[derive(Debug, Clone, Copy)]
struct Probe {
    x: f64,
    slope: f64,
}

/// Value of variable `i` at multiplier `eta`. `hint` is an optional tighter
/// bracket `(left, right)` known to contain the root.
fn variable_at<O: Objective>(
    problem: &AllocationProblem<O>,
    ends: &Ends,
    i: usize,
    eta: f64,
    hint: Option<(Probe, Probe)>,
) -> Result<Probe> {
    let upper = problem.upper_bounds[i];
    let at_zero = ends.at_zero[i];
    let at_upper = ends.at_upper[i];
    if upper <= 0.0 || at_zero <= eta {
        return Ok(Probe { x: 0.0, slope: at_zero });
    }
    if at_upper >= eta {
        return Ok(Probe {
            x: upper,
            slope: at_upper,
        });
    }
    let (left, right) = match hint {
        Some((l, r)) if l.x < r.x && l.slope > eta && r.slope < eta => (l, r),
        _ => (
            Probe { x: 0.0, slope: at_zero },
            Probe {
                x: upper,
                slope: at_upper,
            },
        ),
    };
    let tol = Tolerance {
        width: 1e-14 * upper.max(1.0),
        residual: 4.0 * f64::EPSILON * eta.abs().max(at_zero.abs()).max(1.0),
        max_iter: MAX_INNER_ITERATIONS,
    };
    let (lo, hi) = bracket_root(
        |x| Ok(problem.derivative(i, x)? - eta),
        left.x,
        right.x,
        left.slope - eta,
        right.slope - eta,
        tol,
    )?;
    Ok(Probe {
        x: 0.5 * (lo + hi),
        slope: eta,
    })
}

/// Per-variable allocation `V_i(η)` for a fixed multiplier.
pub fn inner_allocation_at<O: Objective>(problem: &AllocationProblem<O>, eta: f64) -> Result<Vec<f64>> {
    problem.validate()?;
    if !eta.is_finite() {
        return Err(argument(format!("multiplier must be finite, got {eta}")));
    }
    inner_unchecked(problem, &Ends::new(problem)?, eta)
}

fn inner_unchecked<O: Objective>(problem: &AllocationProblem<O>, ends: &Ends, eta: f64) -> Result<Vec<f64>> {
    (0..problem.len())
        .map(|i| Ok(variable_at(problem, ends, i, eta, None)?.x))
        .collect()
}

/// Inner solutions at the current outer bracket ends. Since `V_i(η)` is
/// non-increasing, they bracket `V_i` for any multiplier in between.
struct WarmStart {
    at_lo: Vec<Probe>,
    at_hi: Vec<Probe>,
}

impl WarmStart {
    fn new<O: Objective>(problem: &AllocationProblem<O>, ends: &Ends) -> Self {
        let n = problem.len();
        Self {
            at_lo: (0..n)
                .map(|i| Probe {
                    x: problem.upper_bounds[i],
                    slope: ends.at_upper[i],
                })
                .collect(),
            at_hi: (0..n)
                .map(|i| Probe {
                    x: 0.0,
                    slope: ends.at_zero[i],
                })
                .collect(),
        }
    }

    fn excess<O: Objective>(&mut self, problem: &AllocationProblem<O>, ends: &Ends, eta: f64) -> Result<f64> {
        let probes = (0..problem.len())
            .map(|i| variable_at(problem, ends, i, eta, Some((self.at_hi[i], self.at_lo[i]))))
            .collect::<Result<Vec<_>>>()?;
        let excess = probes.iter().map(|p| p.x).sum::<f64>() - problem.budget;
        if excess > 0.0 {
            self.at_lo = probes;
        } else {
            self.at_hi = probes;
        }
        Ok(excess)
    }
}

pub fn allocate<O: Objective>(problem: &AllocationProblem<O>) -> Result<AllocationResult> {
    problem.validate()?;
    let n = problem.len();
    let budget = problem.budget;
    let capacity: f64 = problem.upper_bounds.iter().sum();

    let ends = Ends::new(problem)?;
    let (at_zero, at_upper) = (&ends.at_zero, &ends.at_upper);

    if capacity <= budget {
        let values = problem.upper_bounds.clone();
        let multiplier = at_upper.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
        let objective = problem.objective_value(&values)?;
        return Ok(AllocationResult {
            values,
            multiplier,
            objective,
            saturated: true,
        });
    }
    if budget == 0.0 {
        let values = vec![0.0; n];
        let multiplier = at_zero.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let objective = problem.objective_value(&values)?;
        return Ok(AllocationResult {
            values,
            multiplier,
            objective,
            saturated: false,
        });
    }

    let mut warm = WarmStart::new(problem, &ends);
    let mut excess = |eta: f64| warm.excess(problem, &ends, eta);

    let min_upper = at_upper.iter().copied().fold(f64::INFINITY, f64::min);
    let max_zero = at_zero.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = |x: f64| 1e-9 * x.abs().max(1.0);

    let mut lo = min_upper - pad(min_upper);
    let mut f_lo = excess(lo)?;
    let mut step = pad(min_upper).max(1.0);
    // non-concave terms can undershoot at the natural lower end
    let mut guard = 0;
    while f_lo < 0.0 {
        guard += 1;
        if guard > 200 {
            return Err(argument("could not bracket the budget multiplier"));
        }
        lo -= step;
        step *= 2.0;
        f_lo = excess(lo)?;
    }
    let hi = max_zero + pad(max_zero);
    let f_hi = excess(hi)?;

    let (lo, hi) = if lo < hi {
        let tol = Tolerance {
            width: MULTIPLIER_WIDTH,
            residual: 1e-13 * budget.max(1.0),
            max_iter: MAX_OUTER_ITERATIONS,
        };
        bracket_root(excess, lo, hi, f_lo, f_hi, tol)?
    } else {
        (lo, hi)
    };

    // Blend the two bracket ends so the budget holds exactly; this also
    // resolves plateaus where the total jumps across a single multiplier.
    let above: Vec<f64> = warm.at_lo.iter().map(|p| p.x).collect();
    let below: Vec<f64> = warm.at_hi.iter().map(|p| p.x).collect();
    let sum_above: f64 = above.iter().sum();
    let sum_below: f64 = below.iter().sum();
    let t = if sum_above > sum_below {
        ((budget - sum_below) / (sum_above - sum_below)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let values: Vec<f64> = below
        .iter()
        .zip(&above)
        .zip(&problem.upper_bounds)
        .map(|((&b, &a), &u)| (b + t * (a - b)).clamp(0.0, u))
        .collect();
    let objective = problem.objective_value(&values)?;
    Ok(AllocationResult {
        values,
        multiplier: 0.5 * (lo + hi),
        objective,
        saturated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Exponential;

    fn curve(gamma: f64) -> RevenueCurve<Exponential> {
        RevenueCurve::new(
            gamma,
            2.0,
            Exponential {
                retry_rate: 0.5,
                drop_decay: 0.5,
            },
        )
    }

    #[test]
    fn symmetric_pair_splits_evenly() {
        let p = AllocationProblem::new(vec![curve(1.5), curve(1.5)], 1.6, vec![2.0, 2.0]).unwrap();
        let r = allocate(&p).unwrap();
        assert!((r.values[0] - 0.8).abs() < 1e-9);
        assert!((r.values[1] - 0.8).abs() < 1e-9);
        assert!(!r.saturated);
    }

    #[test]
    fn table_one_pair() {
        let p = AllocationProblem::new(vec![curve(1.0), curve(2.0)], 1.6, vec![2.0, 2.0]).unwrap();
        let r = allocate(&p).unwrap();
        assert!((r.values[0] - 0.48).abs() < 0.01, "{:?}", r.values);
        assert!((r.values[1] - 1.12).abs() < 0.01, "{:?}", r.values);
        let again = inner_allocation_at(&p, r.multiplier).unwrap();
        assert!((again[0] - 0.48).abs() < 0.01);
        assert!((again[1] - 1.12).abs() < 0.01);
    }

    #[test]
    fn budget_beyond_bounds_saturates() {
        let p = AllocationProblem::new(vec![curve(1.0)], 5.0, vec![3.0]).unwrap();
        let r = allocate(&p).unwrap();
        assert_eq!(r.values, vec![3.0]);
        assert!(r.saturated);
    }

    #[test]
    fn zero_budget_gives_zeros() {
        let p = AllocationProblem::new(vec![curve(1.0), curve(2.0)], 0.0, vec![2.0, 2.0]).unwrap();
        let r = allocate(&p).unwrap();
        assert_eq!(r.values, vec![0.0, 0.0]);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn multiplier_extremes() {
        let p = AllocationProblem::new(vec![curve(1.0), curve(2.0)], 1.0, vec![2.0, 2.0]).unwrap();
        assert_eq!(inner_allocation_at(&p, 1e6).unwrap(), vec![0.0, 0.0]);
        assert_eq!(inner_allocation_at(&p, -1e6).unwrap(), vec![2.0, 2.0]);
        assert!(inner_allocation_at(&p, f64::NAN).is_err());
        assert!(inner_allocation_at(&p, f64::INFINITY).is_err());
    }

    #[test]
    fn flat_objectives_still_meet_budget() {
        let flat = || FnObjective::new(|_x: f64| 0.0, |_x: f64| 0.0);
        let p = AllocationProblem::new(vec![flat(), flat(), flat()], 1.5, vec![1.0, 1.0, 1.0]).unwrap();
        let r = allocate(&p).unwrap();
        let total: f64 = r.values.iter().sum();
        assert!((total - 1.5).abs() < 1e-12);
        assert!(r.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn rejects_bad_problems() {
        let none: Vec<RevenueCurve<Exponential>> = Vec::new();
        assert!(AllocationProblem::new(none, 1.0, vec![]).is_err());
        assert!(AllocationProblem::new(vec![curve(1.0)], -1.0, vec![1.0]).is_err());
        assert!(AllocationProblem::new(vec![curve(1.0)], 1.0, vec![-1.0]).is_err());
        assert!(AllocationProblem::new(vec![curve(1.0)], 1.0, vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn nan_objective_names_the_variable() {
        let good = FnObjective::new(|x: f64| x, |_x: f64| 1.0);
        let bad = FnObjective::new(|x: f64| x, |_x: f64| f64::NAN);
        let objectives: Vec<Box<dyn Objective>> = vec![Box::new(good), Box::new(bad)];
        let p = AllocationProblem {
            objectives,
            budget: 1.0,
            upper_bounds: vec![2.0, 2.0],
        };
        match allocate(&p) {
            Err(Error::Numeric { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }
}
