mod common;

use wdm_revenue::exact::{brute_force_solve, sweep_wavelengths, Scope};
use wdm_revenue::heuristic_solve;

fn close(actual: f64, expected: f64, tol: f64) -> bool {
    (actual - expected).abs() <= tol
}

#[test]
fn three_stations_enumerated() {
    let report = brute_force_solve(&common::small(3), Scope::Full).unwrap();
    let revenues: Vec<f64> = report.rows.iter().map(|r| r.revenue).collect();
    assert_eq!(revenues.len(), 3);
    for (got, want) in revenues.iter().zip([10.11, 9.81, 8.65]) {
        assert!(close(*got, want, 0.01), "{got} vs {want}");
    }
    let best = report.optimum();
    assert_eq!(best.labels, vec![1, 1, 2]);
    for (got, want) in best.visits.iter().zip([0.48, 1.12, 2.00]) {
        assert!(close(*got, want, 0.01));
    }
    assert_eq!(report.heuristic_row, Some(0));
    assert!(report.heuristic_gap.abs() < 1e-9);
}

#[test]
fn four_stations_enumerated() {
    let report = brute_force_solve(&common::small(4), Scope::Full).unwrap();
    let expected = [
        (vec![1, 1, 1, 2], 14.65, [0.00, 0.61, 0.99, 2.00]),
        (vec![1, 2, 2, 1], 14.25, [0.14, 0.61, 0.99, 1.46]),
        (vec![1, 1, 2, 1], 14.22, [0.00, 0.48, 2.00, 1.12]),
        (vec![1, 2, 1, 2], 14.03, [0.28, 0.48, 1.32, 1.12]),
        (vec![1, 1, 2, 2], 13.34, [0.48, 1.12, 0.67, 0.93]),
        (vec![1, 2, 1, 1], 13.23, [0.00, 2.00, 0.67, 0.93]),
        (vec![1, 2, 2, 2], 11.23, [2.00, 0.00, 0.67, 0.93]),
    ];
    assert_eq!(report.rows.len(), expected.len());
    for (row, (labels, revenue, visits)) in report.rows.iter().zip(&expected) {
        assert_eq!(&row.labels, labels);
        assert!(close(row.revenue, *revenue, 0.01), "{labels:?}: {}", row.revenue);
        for (got, want) in row.visits.iter().zip(visits) {
            assert!(close(*got, *want, 0.01), "{labels:?}: {:?}", row.visits);
        }
    }
    let heuristic = &report.heuristic;
    assert_eq!(heuristic.assignment.wavelength_of, vec![0, 1, 1, 2]);
    assert!(close(heuristic.total_revenue, 14.65, 0.01));
    assert_eq!(heuristic.plan.visit[0], 0.0);
    assert!(report.heuristic_gap.abs() < 1e-9);
}

#[test]
fn sixteen_station_heuristic_totals() {
    let cases = [
        (common::rising_gamma(), 474.51),
        (common::rising_retry(), 385.65),
        (common::rising_drop(), 413.19),
        (common::rising_switchover(), 398.81),
    ];
    for (instance, expected) in cases {
        let result = heuristic_solve(&instance).unwrap();
        assert!(
            close(result.total_revenue, expected, 0.5),
            "{} vs {expected}",
            result.total_revenue
        );
    }
}

#[test]
fn per_station_plans_fill_each_frame() {
    // Visit columns printed with the rising-Γ instance.
    let visits_a = [
        0.00, 0.00, 0.93, 1.22, 1.45, 1.67, 2.16, 2.25, 2.34, 2.46, 2.20, 2.23, 2.30, 2.40, 2.78, 2.81,
    ];
    for instance in [common::rising_gamma(), common::rising_retry(), common::rising_drop()] {
        let result = heuristic_solve(&instance).unwrap();
        let c = instance.frame_time;
        for members in result.assignment.groups() {
            if members.len() < 2 {
                continue;
            }
            let used: f64 = members
                .iter()
                .map(|&i| instance.stations[i].switchover + result.plan.visit[i])
                .sum();
            assert!((used - c).abs() < 1e-6, "{used}");
        }
        let column_total: f64 = result.per_station.iter().sum();
        assert!((column_total - result.total_revenue).abs() < 1e-9);
        result
            .plan
            .validate(&instance, &result.assignment, &result.degenerate)
            .unwrap();
    }
    let result = heuristic_solve(&common::rising_gamma()).unwrap();
    for (got, want) in result.plan.visit.iter().zip(visits_a) {
        assert!(close(*got, want, 0.01), "{:?}", result.plan.visit);
    }
}

#[test]
fn wavelength_sweep() {
    let expected = [
        (1, 170.54, 3),
        (2, 322.62, 8),
        (3, 400.97, 11),
        (4, 452.88, 13),
        (5, 480.40, 14),
        (6, 499.60, 14),
        (7, 517.23, 15),
        (8, 525.21, 15),
        (16, 544.00, 16),
    ];
    let ks: Vec<usize> = expected.iter().map(|e| e.0).collect();
    let rows = sweep_wavelengths(&common::sweep_base(), &ks).unwrap();
    for (row, (k, revenue, served)) in rows.iter().zip(expected) {
        assert_eq!(row.wavelengths, k);
        assert!((row.revenue - revenue).abs() <= 0.01 * revenue, "K={k}: {}", row.revenue);
        assert_eq!(row.served, served, "K={k}");
    }
}

#[test]
fn one_wavelength_per_station_reaches_the_ceiling() {
    let base = common::sweep_base();
    let rows = sweep_wavelengths(&base, &[16]).unwrap();
    assert!((rows[0].revenue - 544.0).abs() < 1e-6);
    assert!((base.revenue_ceiling() - 544.0).abs() < 1e-9);
}
