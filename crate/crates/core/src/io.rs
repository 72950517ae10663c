//! File formats: edge lists, spectrum and histogram CSVs, sweep summaries,
//! plot data and run manifests.
//!
//! Every real number is written with 12 significant digits via [`fmt_num`],
//! so reading a file back recovers exactly the printed values.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::ensemble::{FailureRecord, PointSummary, SweepSpec, SweepSummary};
use crate::error::{Error, Result};
use crate::graph_gen::{GraphSample, ModelKind, Sampler};
use crate::spectral::Histogram;

/// Shortest form of `x` rounded to 12 significant digits, in exponent
/// notation outside `[1e-4, 1e15)`; `NaN` for non-finite input.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return "NaN".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let mag = rounded.abs();
    if mag != 0.0 && !(1e-4..1e15).contains(&mag) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    fmt_num(x.unwrap_or(f64::NAN))
}

fn parse_num(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: bad number {field:?}")))
}

fn parse_opt(field: &str, line: usize) -> Result<Option<f64>> {
    let v = parse_num(field, line)?;
    Ok((!v.is_nan()).then_some(v))
}

// ---------------------------------------------------------------------------
// edge lists

fn model_name(model: ModelKind) -> &'static str {
    match model {
        ModelKind::Planted => "planted",
        ModelKind::ErdosRenyi => "erdos_renyi",
    }
}

fn sampler_name(sampler: Sampler) -> &'static str {
    match sampler {
        Sampler::PairLoop => "pair_loop",
        Sampler::BlockBinomial => "block_binomial",
    }
}

/// Writes `# key=value …` followed by one `i j` line per edge (`i < j`,
/// lexicographic order).
pub fn write_edge_list<W: Write>(mut w: W, graph: &GraphSample) -> Result<()> {
    let p = &graph.params;
    writeln!(
        w,
        "# n={} seed={} model={} k={} k_aa={} k_ab={} sampler={}",
        p.n,
        graph.seed,
        model_name(p.model),
        fmt_num(p.k),
        fmt_num(p.k_aa),
        fmt_num(p.k_ab),
        sampler_name(graph.sampler)
    )?;
    for (i, j) in graph.adjacency.edges() {
        writeln!(w, "{i} {j}")?;
    }
    Ok(())
}

/// Parsed edge-list file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeList {
    /// `key=value` pairs found in comment lines.
    pub header: BTreeMap<String, String>,
    pub edges: Vec<(u32, u32)>,
}

impl EdgeList {
    /// Node count from the header, if present.
    pub fn declared_n(&self) -> Result<Option<usize>> {
        self.header
            .get("n")
            .map(|v| v.parse().map_err(|_| Error::Parse(format!("bad header value n={v}"))))
            .transpose()
    }

    /// One more than the largest node index, or 0.
    pub fn implied_n(&self) -> usize {
        self.edges
            .iter()
            .map(|&(i, j)| i.max(j) as usize + 1)
            .max()
            .unwrap_or(0)
    }
}

/// Reads an edge list: blank lines are skipped, `#` lines may carry
/// `key=value` tokens, every other line holds two node indices.
pub fn read_edge_list<R: BufRead>(r: R) -> Result<EdgeList> {
    let mut out = EdgeList::default();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(comment) = t.strip_prefix('#') {
            for tok in comment.split_whitespace() {
                if let Some((k, v)) = tok.split_once('=') {
                    out.header.insert(k.to_string(), v.to_string());
                }
            }
            continue;
        }
        let mut fields = t.split_whitespace();
        let mut node = || -> Result<u32> {
            let f = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {lineno}: expected two node indices")))?;
            f.parse()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad node index {f:?}")))
        };
        let (i, j) = (node()?, node()?);
        if fields.next().is_some() {
            return Err(Error::Parse(format!("line {lineno}: trailing fields")));
        }
        out.edges.push((i, j));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// spectra

pub fn write_spectrum_csv<W: Write>(mut w: W, eigenvalues: &[f64]) -> Result<()> {
    writeln!(w, "index,eigenvalue")?;
    for (i, x) in eigenvalues.iter().enumerate() {
        writeln!(w, "{i},{}", fmt_num(*x))?;
    }
    Ok(())
}

pub fn read_spectrum_csv<R: BufRead>(r: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, line) in r.lines().enumerate().skip(1) {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (_, value) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected index,eigenvalue", idx + 1)))?;
        out.push(parse_num(value, idx + 1)?);
    }
    Ok(out)
}

pub fn write_histogram_csv<W: Write>(mut w: W, h: &Histogram) -> Result<()> {
    writeln!(w, "bin_left,bin_right,count")?;
    for (b, count) in h.counts.iter().enumerate() {
        writeln!(w, "{},{},{count}", fmt_num(h.edges[b]), fmt_num(h.edges[b + 1]))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep summaries

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "k_aa_minus_k_ab",
    "k_ab",
    "mean_energy",
    "stderr_energy",
    "mean_lambda2",
    "stderr_lambda2",
    "mean_delta_e",
    "stderr_delta_e",
    "count",
    "theory_lambda2",
    "theory_delta_e_raw",
    "theory_delta_e_anchored",
    "theory_energy",
];

/// One row of the summary CSV. Missing statistics are `None` (`NaN` on disk).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub k_aa_minus_k_ab: f64,
    pub k_ab: f64,
    pub mean_energy: Option<f64>,
    pub stderr_energy: Option<f64>,
    pub mean_lambda2: Option<f64>,
    pub stderr_lambda2: Option<f64>,
    pub mean_delta_e: Option<f64>,
    pub stderr_delta_e: Option<f64>,
    pub count: usize,
    pub theory_lambda2: f64,
    pub theory_delta_e_raw: f64,
    pub theory_delta_e_anchored: f64,
    pub theory_energy: f64,
}

impl From<&PointSummary> for SummaryRow {
    fn from(p: &PointSummary) -> Self {
        SummaryRow {
            k_aa_minus_k_ab: p.separation,
            k_ab: p.k_ab,
            mean_energy: p.mean_energy,
            stderr_energy: p.stderr_energy,
            mean_lambda2: p.mean_lambda2,
            stderr_lambda2: p.stderr_lambda2,
            mean_delta_e: p.mean_delta_e,
            stderr_delta_e: p.stderr_delta_e,
            count: p.count,
            theory_lambda2: p.theory.lambda2_pred,
            theory_delta_e_raw: p.theory.delta_e_raw,
            theory_delta_e_anchored: p.theory.delta_e_anchored,
            theory_energy: p.theory.ppm_energy_pred,
        }
    }
}

impl SummaryRow {
    fn fields(&self) -> [String; 13] {
        [
            fmt_num(self.k_aa_minus_k_ab),
            fmt_num(self.k_ab),
            fmt_opt(self.mean_energy),
            fmt_opt(self.stderr_energy),
            fmt_opt(self.mean_lambda2),
            fmt_opt(self.stderr_lambda2),
            fmt_opt(self.mean_delta_e),
            fmt_opt(self.stderr_delta_e),
            self.count.to_string(),
            fmt_num(self.theory_lambda2),
            fmt_num(self.theory_delta_e_raw),
            fmt_num(self.theory_delta_e_anchored),
            fmt_num(self.theory_energy),
        ]
    }
}

pub fn summary_rows(summary: &SweepSummary) -> Vec<SummaryRow> {
    summary.points.iter().map(SummaryRow::from).collect()
}

pub fn write_summary_csv<W: Write>(mut w: W, rows: &[SummaryRow]) -> Result<()> {
    writeln!(w, "{}", SUMMARY_COLUMNS.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.fields().join(","))?;
    }
    Ok(())
}

pub fn read_summary_csv<R: BufRead>(r: R) -> Result<Vec<SummaryRow>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty summary file".into()))??;
    if header.trim() != SUMMARY_COLUMNS.join(",") {
        return Err(Error::Parse(format!("unexpected summary header {header:?}")));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != SUMMARY_COLUMNS.len() {
            return Err(Error::Parse(format!(
                "line {lineno}: expected {} fields, found {}",
                SUMMARY_COLUMNS.len(),
                f.len()
            )));
        }
        rows.push(SummaryRow {
            k_aa_minus_k_ab: parse_num(f[0], lineno)?,
            k_ab: parse_num(f[1], lineno)?,
            mean_energy: parse_opt(f[2], lineno)?,
            stderr_energy: parse_opt(f[3], lineno)?,
            mean_lambda2: parse_opt(f[4], lineno)?,
            stderr_lambda2: parse_opt(f[5], lineno)?,
            mean_delta_e: parse_opt(f[6], lineno)?,
            stderr_delta_e: parse_opt(f[7], lineno)?,
            count: f[8]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad count {:?}", f[8])))?,
            theory_lambda2: parse_num(f[9], lineno)?,
            theory_delta_e_raw: parse_num(f[10], lineno)?,
            theory_delta_e_anchored: parse_num(f[11], lineno)?,
            theory_energy: parse_num(f[12], lineno)?,
        });
    }
    Ok(rows)
}

/// Whitespace-separated columns for gnuplot and similar tools, sorted by
/// separation, simulation next to theory.
pub fn write_plot_data<W: Write>(mut w: W, rows: &[SummaryRow]) -> Result<()> {
    writeln!(
        w,
        "# k_aa_minus_k_ab mean_lambda2 stderr_lambda2 theory_lambda2 \
         mean_delta_e stderr_delta_e theory_delta_e_anchored theory_delta_e_raw \
         mean_energy stderr_energy theory_energy"
    )?;
    let mut sorted: Vec<&SummaryRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.k_aa_minus_k_ab.total_cmp(&b.k_aa_minus_k_ab));
    for r in sorted {
        let cols = [
            fmt_num(r.k_aa_minus_k_ab),
            fmt_opt(r.mean_lambda2),
            fmt_opt(r.stderr_lambda2),
            fmt_num(r.theory_lambda2),
            fmt_opt(r.mean_delta_e),
            fmt_opt(r.stderr_delta_e),
            fmt_num(r.theory_delta_e_anchored),
            fmt_num(r.theory_delta_e_raw),
            fmt_opt(r.mean_energy),
            fmt_opt(r.stderr_energy),
            fmt_num(r.theory_energy),
        ];
        writeln!(w, "{}", cols.join(" "))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// manifests

/// Everything needed to rerun a command exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Fully resolved command parameters.
    pub parameters: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    #[serde(default)]
    pub attempted: usize,
    #[serde(default)]
    pub failures: Vec<FailureRecord>,
    #[serde(default)]
    pub outputs: Vec<String>,
}

pub fn write_manifest<W: Write>(mut w: W, manifest: &RunManifest) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, manifest)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_manifest<R: std::io::Read>(r: R) -> Result<RunManifest> {
    Ok(serde_json::from_reader(r)?)
}
