//! Output records and their three formats.
//!
//! Every command produces a payload. The payload section of the output is a
//! pure function of the command, its flags and the instance, so it is
//! byte-identical across runs; the command echo, digest and wall time
//! surround it.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Aligned text with revenues and times rounded to two decimals.
    #[default]
    Table,
    /// Full-precision rows under a fixed header.
    Csv,
    /// The whole record as a JSON document.
    Json,
}

/// A command result that can be shown in every format.
pub trait Render: Serialize {
    fn table(&self) -> String;
    fn csv_header(&self) -> &'static [&'static str];
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

#[derive(Debug, Serialize)]
pub struct OutputRecord<'a, P> {
    pub command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_digest: Option<&'a str>,
    pub payload: &'a P,
    pub wall_time_seconds: f64,
}

/// What goes to standard output and standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub stdout: String,
    pub stderr: String,
}

pub fn payload_text<P: Render>(payload: &P, format: Format) -> String {
    match format {
        Format::Table => payload.table(),
        Format::Csv => csv_text(payload.csv_header(), &payload.csv_rows()),
        Format::Json => serde_json::to_string_pretty(payload).expect("payloads always serialize"),
    }
}

impl<P: Render> OutputRecord<'_, P> {
    pub fn render(&self, format: Format) -> Rendered {
        match format {
            Format::Json => {
                let mut stdout = serde_json::to_string_pretty(self).expect("records always serialize");
                stdout.push('\n');
                Rendered {
                    stdout,
                    stderr: String::new(),
                }
            }
            Format::Table => {
                let mut stdout = format!("# command: {}\n", self.command);
                if let Some(d) = self.instance_digest {
                    stdout.push_str(&format!("# instance: {d}\n"));
                }
                stdout.push_str(&payload_text(self.payload, format));
                stdout.push_str(&format!("# wall time: {:.3} s\n", self.wall_time_seconds));
                Rendered {
                    stdout,
                    stderr: String::new(),
                }
            }
            Format::Csv => {
                // Keep stdout a plain CSV document; the metadata goes to stderr.
                let mut stderr = format!("# command: {}\n", self.command);
                if let Some(d) = self.instance_digest {
                    stderr.push_str(&format!("# instance: {d}\n"));
                }
                stderr.push_str(&format!("# wall time: {:.3} s\n", self.wall_time_seconds));
                Rendered {
                    stdout: payload_text(self.payload, format),
                    stderr,
                }
            }
        }
    }
}

pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("writing to memory");
    for row in rows {
        writer.write_record(row).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
}

/// Text table with a rule under the header; the first column is
/// left-aligned, the rest right-aligned.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(k, (c, &w))| if k == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    let mut out = line(header.to_vec());
    out.push_str(&rule.join("  "));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn two(x: f64) -> String {
    format!("{x:.2}")
}

/// `[a b c]` with two decimals, as in printed allocation tables.
pub fn bracket_f64(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| two(x)).collect();
    format!("[{}]", parts.join(" "))
}

pub fn bracket_usize(xs: &[usize]) -> String {
    let parts: Vec<String> = xs.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(" "))
}

/// Space-separated full-precision values for a CSV cell.
pub fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}
