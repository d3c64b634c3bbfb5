//! Serialised views of SMAA results: JSON, aligned text and long-format CSV.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::smaa::{Mode, SmaaResults};

/// Fractions rather than counts; the JSON document users consume.
#[derive(Debug, Clone, Serialize)]
pub struct SmaaReport {
    pub mode: Mode,
    pub sample_count: usize,
    pub alternatives: Vec<String>,
    pub parameter_names: Vec<String>,
    pub rank_acceptability: Vec<Vec<f64>>,
    pub p1_preference: Vec<Vec<f64>>,
    pub p1_indifference: Vec<Vec<f64>>,
    pub p1_incomparability: Vec<Vec<f64>>,
    pub p2_preference: Vec<Vec<f64>>,
    pub p2_indifference: Vec<Vec<f64>>,
    pub central_weights: Vec<Option<Vec<f64>>>,
    pub barycenter: Vec<f64>,
    pub ror_necessary_approx: Vec<Vec<bool>>,
    pub ror_possible_approx: Vec<Vec<bool>>,
    pub max_flow_identity_residual: f64,
    pub max_net_sum: f64,
}

impl SmaaReport {
    pub fn from_results<T: Scalar>(r: &SmaaResults<T>) -> Self {
        let cast = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        SmaaReport {
            mode: r.mode,
            sample_count: r.sample_count,
            alternatives: r.alternatives.clone(),
            parameter_names: r.parameter_names.clone(),
            rank_acceptability: r.fractions(&r.rank_counts),
            p1_preference: r.fractions(&r.p1_pref),
            p1_indifference: r.fractions(&r.p1_indiff),
            p1_incomparability: r.fractions(&r.p1_incomp),
            p2_preference: r.fractions(&r.p2_pref),
            p2_indifference: r.fractions(&r.p2_indiff),
            central_weights: r
                .central_weights
                .iter()
                .map(|w| w.as_deref().map(cast))
                .collect(),
            barycenter: cast(&r.barycenter),
            ror_necessary_approx: r.ror_necessary_approx.clone(),
            ror_possible_approx: r.ror_possible_approx.clone(),
            max_flow_identity_residual: r.max_flow_identity_residual,
            max_net_sum: r.max_net_sum,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn matrices(&self) -> [(&'static str, &Vec<Vec<f64>>); 5] {
        [
            ("p1_preference", &self.p1_preference),
            ("p1_indifference", &self.p1_indifference),
            ("p1_incomparability", &self.p1_incomparability),
            ("p2_preference", &self.p2_preference),
            ("p2_indifference", &self.p2_indifference),
        ]
    }

    /// Human-readable tables; percentages carry three decimals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .alternatives
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max(4);
        let m = self.alternatives.len();
        let _ = writeln!(out, "mode: {}  samples: {}", self.mode, self.sample_count);

        let _ = writeln!(out, "\nrank acceptability (%)");
        let _ = write!(out, "{:width$}", "");
        for r in 1..=m {
            let _ = write!(out, " {:>8}", format!("r{r}"));
        }
        out.push('\n');
        for (label, row) in self.alternatives.iter().zip(&self.rank_acceptability) {
            percent_row(&mut out, label, width, row);
        }

        for (name, mat) in self.matrices() {
            let _ = writeln!(out, "\n{name} (%, row over column)");
            let _ = write!(out, "{:width$}", "");
            for a in &self.alternatives {
                let _ = write!(out, " {a:>8}");
            }
            out.push('\n');
            for (label, row) in self.alternatives.iter().zip(mat) {
                percent_row(&mut out, label, width, row);
            }
        }

        let _ = writeln!(out, "\ncentral weights");
        let _ = write!(out, "{:width$}", "");
        for p in &self.parameter_names {
            let _ = write!(out, " {p:>10}");
        }
        out.push('\n');
        for (label, w) in self.alternatives.iter().zip(&self.central_weights) {
            let _ = write!(out, "{label:width$}");
            match w {
                Some(w) => w.iter().for_each(|v| {
                    let _ = write!(out, " {v:>10.6}");
                }),
                None => out.push_str("    (never first)"),
            }
            out.push('\n');
        }
        let _ = write!(out, "{:width$}", "mean");
        for v in &self.barycenter {
            let _ = write!(out, " {v:>10.6}");
        }
        out.push('\n');

        let _ = writeln!(
            out,
            "\napproximate necessary relation (N) / possible only (p)"
        );
        for (i, label) in self.alternatives.iter().enumerate() {
            let _ = write!(out, "{label:width$} ");
            for j in 0..m {
                out.push(if i == j {
                    '.'
                } else if self.ror_necessary_approx[i][j] {
                    'N'
                } else if self.ror_possible_approx[i][j] {
                    'p'
                } else {
                    '-'
                });
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "\nflow identity residual {:.3e}, net-sum residual {:.3e}",
            self.max_flow_identity_residual, self.max_net_sum
        );
        out
    }

    /// One record per matrix cell: `table,row,column,value`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["table", "row", "column", "value"])?;
        for (label, row) in self.alternatives.iter().zip(&self.rank_acceptability) {
            for (r, v) in row.iter().enumerate() {
                wr.write_record([
                    "rank_acceptability",
                    label,
                    &(r + 1).to_string(),
                    &v.to_string(),
                ])?;
            }
        }
        for (name, mat) in self.matrices() {
            for (a, row) in self.alternatives.iter().zip(mat) {
                for (b, v) in self.alternatives.iter().zip(row) {
                    if a != b {
                        wr.write_record([name, a, b, &v.to_string()])?;
                    }
                }
            }
        }
        for (a, w) in self.alternatives.iter().zip(&self.central_weights) {
            for (p, v) in self.parameter_names.iter().zip(w.iter().flatten()) {
                wr.write_record(["central_weights", a, p, &v.to_string()])?;
            }
        }
        for (p, v) in self.parameter_names.iter().zip(&self.barycenter) {
            wr.write_record(["barycenter", "mean", p, &v.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

fn percent_row(out: &mut String, label: &str, width: usize, row: &[f64]) {
    let _ = write!(out, "{label:width$}");
    for v in row {
        let _ = write!(out, " {:>8.3}", 100.0 * v);
    }
    out.push('\n');
}
