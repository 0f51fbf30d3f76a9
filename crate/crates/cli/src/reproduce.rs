//! Reruns the published experiments on the bundled instance files and
//! compares each printed number with what the solver computes.

use serde::Serialize;
use wdm_revenue::exact::{brute_force_solve, random_baseline, sweep_wavelengths, BaselineMode, Scope};
use wdm_revenue::heuristic::Assignment;
use wdm_revenue::{heuristic_solve, Instance};

use crate::error::{CliError, Result};
use crate::instance_file::{load_str, InstanceFile};
use crate::output::{bracket_usize, text_table, two, Render};

pub const BUNDLED: &[(&str, &str)] = &[
    ("table_I", include_str!("../instances/table_I.json")),
    ("table_II", include_str!("../instances/table_II.json")),
    ("table_III", include_str!("../instances/table_III.json")),
    ("table_IV", include_str!("../instances/table_IV.json")),
    ("table_V", include_str!("../instances/table_V.json")),
    ("table_VI", include_str!("../instances/table_VI.json")),
    ("table_VII", include_str!("../instances/table_VII.json")),
    ("table_VIII_a", include_str!("../instances/table_VIII_a.json")),
    ("table_VIII_b", include_str!("../instances/table_VIII_b.json")),
    ("table_VIII_c", include_str!("../instances/table_VIII_c.json")),
    ("table_IX", include_str!("../instances/table_IX.json")),
];

pub const TABLE_IDS: &[&str] = &["I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX"];

pub fn bundled_text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn bundled(name: &str) -> Instance {
    let text = bundled_text(name).unwrap_or_else(|| panic!("no bundled instance {name}"));
    load_str(text)
        .unwrap_or_else(|e| panic!("bundled instance {name} is invalid: {e}"))
        .instance
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// Shown for comparison only; depends on randomness the published run did not fix.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub quantity: String,
    pub published: String,
    pub computed: String,
    pub tolerance: String,
    pub verdict: Verdict,
}

fn within(quantity: impl Into<String>, published: f64, computed: f64, tol: f64) -> Check {
    Check {
        quantity: quantity.into(),
        published: two(published),
        computed: two(computed),
        tolerance: format!("±{tol}"),
        verdict: if (computed - published).abs() <= tol { Verdict::Pass } else { Verdict::Fail },
    }
}

fn within_percent(quantity: impl Into<String>, published: f64, computed: f64, percent: f64) -> Check {
    Check {
        quantity: quantity.into(),
        published: two(published),
        computed: two(computed),
        tolerance: format!("±{percent}%"),
        verdict: if (computed - published).abs() <= percent / 100.0 * published.abs() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    }
}

fn exact(quantity: impl Into<String>, published: String, computed: String) -> Check {
    let verdict = if published == computed { Verdict::Pass } else { Verdict::Fail };
    Check {
        quantity: quantity.into(),
        published,
        computed,
        tolerance: "exact".into(),
        verdict,
    }
}

fn info(quantity: impl Into<String>, published: f64, computed: f64) -> Check {
    Check {
        quantity: quantity.into(),
        published: two(published),
        computed: two(computed),
        tolerance: "none".into(),
        verdict: Verdict::Info,
    }
}

fn holds(quantity: impl Into<String>, published: String, computed: String, rule: &str, ok: bool) -> Check {
    Check {
        quantity: quantity.into(),
        published,
        computed,
        tolerance: rule.into(),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub table: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproducePayload {
    pub tables: Vec<TableReport>,
    pub passed: usize,
    pub failed: usize,
}

impl ReproducePayload {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Settings for the random baselines.
#[derive(Debug, Clone, Copy)]
pub struct ReproduceOptions {
    pub trials: usize,
    pub seed: u64,
    /// Replaces the bundled generator seed of the random instance.
    pub instance_seed: Option<u64>,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 1,
            instance_seed: None,
        }
    }
}

fn canonical(labels: &[usize]) -> Vec<usize> {
    Assignment::from_labels(labels.to_vec()).canonical().wavelength_of
}

fn table_one() -> Result<TableReport> {
    let instance = bundled("table_I");
    let report = brute_force_solve(&instance, Scope::Full)?;
    let mut checks = Vec::new();
    for (labels, revenue) in [([1, 1, 2], 10.11), ([1, 2, 1], 9.81), ([2, 1, 1], 8.65)] {
        let key = canonical(&labels);
        let row = report.rows.iter().find(|r| r.labels == key);
        let computed = row.map_or(f64::NAN, |r| r.revenue);
        checks.push(within(format!("row {}", bracket_usize(&labels)), revenue, computed, 0.01));
    }
    let h = &report.heuristic;
    checks.push(within("heuristic revenue", 10.11, h.total_revenue, 0.01));
    for (i, v) in [0.48, 1.12, 2.00].into_iter().enumerate() {
        checks.push(within(format!("heuristic visit, station {}", i + 1), v, h.plan.visit[i], 0.01));
    }
    checks.push(exact(
        "heuristic allocation",
        bracket_usize(&canonical(&[1, 1, 2])),
        bracket_usize(&h.assignment.wavelength_of),
    ));
    Ok(TableReport {
        table: "I".into(),
        note: None,
        checks,
    })
}

fn table_two() -> Result<TableReport> {
    let instance = bundled("table_II");
    let report = brute_force_solve(&instance, Scope::Full)?;
    let mut checks = Vec::new();
    let h = &report.heuristic;
    checks.push(within("heuristic revenue", 14.65, h.total_revenue, 0.01));
    checks.push(exact(
        "heuristic allocation",
        bracket_usize(&[0, 1, 1, 2]),
        bracket_usize(&h.assignment.wavelength_of),
    ));
    checks.push(within("heuristic visit, station 1", 0.0, h.plan.visit[0], 0.0));
    let rows: [([usize; 4], f64); 7] = [
        ([1, 2, 2, 1], 14.25),
        ([1, 2, 1, 2], 14.03),
        ([1, 1, 2, 2], 13.34),
        ([1, 1, 1, 2], 14.65),
        ([1, 1, 2, 1], 14.22),
        ([1, 2, 1, 1], 13.23),
        ([2, 1, 1, 1], 11.23),
    ];
    for (labels, revenue) in rows {
        let key = canonical(&labels);
        let computed = report.rows.iter().find(|r| r.labels == key).map_or(f64::NAN, |r| r.revenue);
        checks.push(within(format!("row {}", bracket_usize(&labels)), revenue, computed, 0.01));
    }
    let worst = report.rows.last().map_or(f64::NAN, |r| r.revenue);
    checks.push(within("worst full assignment", 11.23, worst, 0.01));
    Ok(TableReport {
        table: "II".into(),
        note: None,
        checks,
    })
}

/// Published `(maximum, average, minimum, percent)` for capped and uncapped draws.
type BaselineRow = (f64, f64, f64, f64);

fn baseline_table(
    id: &str,
    file: &str,
    algorithm: f64,
    capped: BaselineRow,
    uncapped: BaselineRow,
    options: &ReproduceOptions,
) -> Result<TableReport> {
    let instance = bundled(file);
    let mut checks = vec![within(
        "algorithm revenue",
        algorithm,
        heuristic_solve(&instance)?.total_revenue,
        0.5,
    )];
    let mut minima = Vec::new();
    for (mode, name, published) in [
        (BaselineMode::Capped, "(i)", capped),
        (BaselineMode::Uncapped, "(ii)", uncapped),
    ] {
        let stats = random_baseline(&instance, mode, options.trials, options.seed)?;
        checks.push(info(format!("{name} maximum"), published.0, stats.maximum));
        checks.push(within_percent(format!("{name} average"), published.1, stats.average, 1.0));
        checks.push(info(format!("{name} minimum"), published.2, stats.minimum));
        checks.push(info(format!("{name} percent above"), published.3, stats.percent_above));
        checks.push(holds(
            format!("{name} percent above"),
            "small".into(),
            two(stats.percent_above),
            "< 10",
            stats.percent_above < 10.0,
        ));
        minima.push(stats.minimum);
    }
    checks.push(holds(
        "uncapped minimum below capped minimum",
        format!("{} < {}", two(uncapped.2), two(capped.2)),
        format!("{} < {}", two(minima[1]), two(minima[0])),
        "ordering",
        minima[1] < minima[0],
    ));
    Ok(TableReport {
        table: id.into(),
        note: Some(format!("{} random assignments per mode, seed {}", options.trials, options.seed)),
        checks,
    })
}

fn table_seven(options: &ReproduceOptions) -> Result<TableReport> {
    let mut file = InstanceFile::parse(bundled_text("table_VII").expect("bundled")).expect("bundled file parses");
    if let (Some(seed), Some(generator)) = (options.instance_seed, file.generator.as_mut()) {
        generator.seed = Some(seed);
    }
    let instance = file.to_instance()?;
    let draw_seed = file.generator.as_ref().and_then(|g| g.seed).unwrap_or(0);
    let heuristic = heuristic_solve(&instance)?.total_revenue;
    let capped = random_baseline(&instance, BaselineMode::Capped, options.trials, options.seed)?;
    let uncapped = random_baseline(&instance, BaselineMode::Uncapped, options.trials, options.seed)?;
    let checks = vec![
        info("algorithm revenue", 359.93, heuristic),
        info("(i) average", 355.23, capped.average),
        info("(ii) average", 338.14, uncapped.average),
        holds(
            "algorithm at least the (i) average",
            format!("{} ≥ {}", two(359.93), two(355.23)),
            format!("{} ≥ {}", two(heuristic), two(capped.average)),
            "ordering",
            heuristic >= capped.average,
        ),
        holds(
            "(i) average above the (ii) average",
            format!("{} > {}", two(355.23), two(338.14)),
            format!("{} > {}", two(capped.average), two(uncapped.average)),
            "ordering",
            capped.average > uncapped.average,
        ),
    ];
    Ok(TableReport {
        table: "VII".into(),
        note: Some(format!(
            "not reproducible: unseeded random instance; checked on a fresh draw with generator seed {draw_seed}"
        )),
        checks,
    })
}

struct Column {
    file: &'static str,
    labels: [usize; 16],
    visits: [f64; 16],
    total: f64,
}

const TABLE_EIGHT: [Column; 3] = [
    Column {
        file: "table_VIII_a",
        labels: [0, 0, 3, 4, 4, 3, 2, 1, 1, 2, 3, 4, 4, 3, 2, 1],
        visits: [
            0.00, 0.00, 0.93, 1.22, 1.45, 1.67, 2.16, 2.25, 2.34, 2.46, 2.20, 2.23, 2.30, 2.40, 2.78, 2.81,
        ],
        total: 474.51,
    },
    Column {
        file: "table_VIII_b",
        labels: [0, 1, 2, 3, 4, 4, 3, 2, 1, 4, 3, 2, 1, 3, 4, 2],
        visits: [
            0.00, 3.35, 2.33, 2.18, 2.07, 1.97, 1.88, 1.83, 2.16, 1.69, 1.64, 1.60, 1.89, 1.50, 1.47, 1.44,
        ],
        total: 385.65,
    },
    Column {
        file: "table_VIII_c",
        labels: [3, 4, 2, 1, 3, 4, 2, 1, 1, 3, 2, 4, 4, 2, 3, 1],
        visits: [
            1.85, 1.86, 1.87, 1.87, 1.86, 1.85, 1.84, 1.83, 1.82, 1.80, 1.78, 1.76, 1.73, 1.71, 1.69, 1.68,
        ],
        total: 413.19,
    },
];

fn table_eight() -> Result<TableReport> {
    let mut checks = Vec::new();
    for (column, part) in TABLE_EIGHT.iter().zip(["(a)", "(b)", "(c)"]) {
        let instance = bundled(column.file);
        let result = heuristic_solve(&instance)?;
        checks.push(exact(
            format!("{part} allocation up to relabelling"),
            bracket_usize(&canonical(&column.labels)),
            bracket_usize(&result.assignment.wavelength_of),
        ));
        let worst = column
            .visits
            .iter()
            .zip(&result.plan.visit)
            .map(|(p, v)| (p - v).abs())
            .fold(0.0, f64::max);
        checks.push(holds(
            format!("{part} largest visit difference"),
            "0.000".into(),
            format!("{worst:.3}"),
            "≤ 0.01",
            worst <= 0.01,
        ));
        checks.push(within(format!("{part} total revenue"), column.total, result.total_revenue, 0.5));
        let c = instance.frame_time;
        let residual = result
            .assignment
            .groups()
            .iter()
            .filter(|g| g.len() > 1)
            .map(|g| {
                let used: f64 = g.iter().map(|&i| instance.stations[i].switchover + result.plan.visit[i]).sum();
                (used - c).abs()
            })
            .fold(0.0, f64::max);
        checks.push(holds(
            format!("{part} frame residual"),
            "0".into(),
            format!("{residual:.1e}"),
            "≤ 1e-6",
            residual <= 1e-6,
        ));
    }
    Ok(TableReport {
        table: "VIII".into(),
        note: Some("wavelength labels are compared as set partitions".into()),
        checks,
    })
}

const TABLE_NINE: [(usize, f64, usize); 9] = [
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

fn table_nine() -> Result<TableReport> {
    let instance = bundled("table_IX");
    let ks: Vec<usize> = TABLE_NINE.iter().map(|r| r.0).collect();
    let rows = sweep_wavelengths(&instance, &ks)?;
    let mut checks = Vec::new();
    for (row, (k, revenue, served)) in rows.iter().zip(TABLE_NINE) {
        checks.push(within_percent(format!("K = {k} revenue"), revenue, row.revenue, 1.0));
        checks.push(exact(format!("K = {k} stations served"), served.to_string(), row.served.to_string()));
    }
    let ceiling = instance.revenue_ceiling();
    let last = rows.last().map_or(f64::NAN, |r| r.revenue);
    checks.push(holds(
        "K = 16 revenue equals C·ΣΓ",
        two(ceiling),
        format!("{last:.6}"),
        "±1e-6",
        (last - ceiling).abs() <= 1e-6,
    ));
    Ok(TableReport {
        table: "IX".into(),
        note: None,
        checks,
    })
}

pub fn reproduce_table(id: &str, options: &ReproduceOptions) -> Result<TableReport> {
    match id {
        "I" => table_one(),
        "II" => table_two(),
        "III" => baseline_table(
            "III",
            "table_III",
            474.51,
            (475.72, 468.89, 454.24, 1.46),
            (475.50, 441.36, 300.33, 0.24),
            options,
        ),
        "IV" => baseline_table(
            "IV",
            "table_IV",
            385.65,
            (387.29, 384.58, 381.94, 9.89),
            (387.14, 358.36, 224.93, 0.87),
            options,
        ),
        "V" => baseline_table(
            "V",
            "table_V",
            413.19,
            (413.19, 413.15, 412.98, 0.00),
            (413.19, 377.54, 231.52, 0.00),
            options,
        ),
        "VI" => baseline_table(
            "VI",
            "table_VI",
            398.81,
            (398.81, 398.06, 395.60, 0.05),
            (398.79, 351.53, 181.94, 0.00),
            options,
        ),
        "VII" => table_seven(options),
        "VIII" => table_eight(),
        "IX" => table_nine(),
        other => Err(CliError::Usage(format!(
            "unknown table {other}; expected one of {} or all",
            TABLE_IDS.join(", ")
        ))),
    }
}

pub fn reproduce(ids: &[String], options: &ReproduceOptions) -> Result<ReproducePayload> {
    if ids.is_empty() {
        return Err(CliError::Usage("name at least one table".into()));
    }
    if options.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut wanted: Vec<String> = Vec::new();
    for id in ids {
        if id.eq_ignore_ascii_case("all") {
            wanted.extend(TABLE_IDS.iter().map(|s| s.to_string()));
        } else {
            wanted.push(id.to_ascii_uppercase());
        }
    }
    let tables = wanted
        .iter()
        .map(|id| reproduce_table(id, options))
        .collect::<Result<Vec<_>>>()?;
    let count = |v: Verdict| tables.iter().flat_map(|t| &t.checks).filter(|c| c.verdict == v).count();
    Ok(ReproducePayload {
        passed: count(Verdict::Pass),
        failed: count(Verdict::Fail),
        tables,
    })
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Info => "info",
    }
}

impl Render for ReproducePayload {
    fn table(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            out.push_str(&format!("Table {}\n", t.table));
            if let Some(note) = &t.note {
                out.push_str(&format!("{note}\n"));
            }
            let rows: Vec<Vec<String>> = t
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.quantity.clone(),
                        c.published.clone(),
                        c.computed.clone(),
                        c.tolerance.clone(),
                        verdict_text(c.verdict).into(),
                    ]
                })
                .collect();
            out.push_str(&text_table(&["quantity", "published", "computed", "tolerance", "verdict"], &rows));
            out.push('\n');
        }
        out.push_str(&format!("{} passed, {} failed\n", self.passed, self.failed));
        out
    }

    fn csv_header(&self) -> &'static [&'static str] {
        &["table", "quantity", "published", "computed", "tolerance", "verdict"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.tables
            .iter()
            .flat_map(|t| {
                t.checks.iter().map(|c| {
                    vec![
                        t.table.clone(),
                        c.quantity.clone(),
                        c.published.clone(),
                        c.computed.clone(),
                        c.tolerance.clone(),
                        verdict_text(c.verdict).into(),
                    ]
                })
            })
            .collect()
    }
}
