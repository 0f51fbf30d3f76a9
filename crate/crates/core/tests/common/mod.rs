#![allow(dead_code)]

use wdm_revenue::{Instance, StationParams};

/// `n` stations with `Γ_i = i`, `ν = μ = 0.5`, `S = 0.2` on two wavelengths, `C = 2`.
pub fn small(n: usize) -> Instance {
    let stations = (1..=n)
        .map(|i| StationParams::new(i, i as f64, 0.0, 0.5, 0.5, 0.2).unwrap())
        .collect();
    Instance::new(stations, 2, 2.0).unwrap()
}

/// Sixteen stations, four wavelengths, `C = 8`; each closure maps `i` to a parameter.
pub fn sixteen(
    gamma: impl Fn(f64) -> f64,
    nu: impl Fn(f64) -> f64,
    mu: impl Fn(f64) -> f64,
    s: impl Fn(f64) -> f64,
) -> Instance {
    let stations = (1..=16)
        .map(|i| {
            let x = i as f64;
            StationParams::new(i, gamma(x), 0.0, nu(x), mu(x), s(x)).unwrap()
        })
        .collect();
    Instance::new(stations, 4, 8.0).unwrap()
}

pub fn rising_gamma() -> Instance {
    sixteen(|i| 0.5 * i, |_| 0.5, |_| 0.5, |_| 0.2)
}

pub fn rising_retry() -> Instance {
    sixteen(|_| 4.0, |i| 0.05 * i, |_| 0.5, |_| 0.2)
}

pub fn rising_drop() -> Instance {
    sixteen(|_| 4.0, |_| 0.5, |i| 0.05 * i, |_| 0.2)
}

pub fn rising_switchover() -> Instance {
    sixteen(|_| 4.0, |_| 0.5, |_| 0.5, |i| 0.05 * i)
}

pub fn sweep_base() -> Instance {
    sixteen(|i| 0.5 * i, |i| 0.05 * i, |i| 0.05 * i, |i| 0.05 * i)
}
