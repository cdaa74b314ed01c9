use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{label, parse_geometry, parse_target, target_label, Coupling, SweepConfig};
use crate::error::{QbxError, Result};
use crate::expansion::{
    eval_on_surface, Density, Geometry, KernelFamily, KernelSpec, QbxParams, Target,
};
use crate::quadrature::MAX_PANELS;
use crate::reference::{onsurface_reference, ReferenceValue};

pub const CSV_HEADER: &str =
    "kernel,geometry,density,k,N,q,M,h,r,target,value_re,value_im,ref_re,ref_im,abs_error,status";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// The ball radius violates the curvature bound at the target.
    Skipped,
    /// The self-convergence reference missed its tolerance; the error is
    /// still reported.
    RefUnusable,
    /// Evaluation failed; the tag names the error kind.
    Failed(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::Skipped => f.write_str("skipped"),
            RowStatus::RefUnusable => f.write_str("ref_unusable"),
            RowStatus::Failed(tag) => write!(f, "failed:{tag}"),
        }
    }
}

impl FromStr for RowStatus {
    type Err = QbxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(RowStatus::Ok),
            "skipped" => Ok(RowStatus::Skipped),
            "ref_unusable" => Ok(RowStatus::RefUnusable),
            _ => s
                .strip_prefix("failed:")
                .map(|tag| RowStatus::Failed(tag.to_string()))
                .ok_or_else(|| QbxError::Domain(format!("unknown row status '{s}'"))),
        }
    }
}

/// One evaluation of a sweep. For surfaces `M` holds `n_phi`, `q` holds
/// `n_theta` and `h` is the polar node spacing `pi R / n_phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub kernel: KernelFamily,
    pub geometry: String,
    pub density: Density,
    pub k: f64,
    pub n: usize,
    pub q: usize,
    pub m: usize,
    pub h: f64,
    pub r: f64,
    pub target: Target,
    pub value: Option<Complex64>,
    pub reference: Option<Complex64>,
    pub abs_error: Option<f64>,
    pub status: RowStatus,
}

impl SweepRecord {
    pub fn to_csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.kernel,
            self.geometry,
            self.density,
            self.k,
            self.n,
            self.q,
            self.m,
            self.h,
            self.r,
            target_label(self.target),
            opt(self.value.map(|v| v.re)),
            opt(self.value.map(|v| v.im)),
            opt(self.reference.map(|v| v.re)),
            opt(self.reference.map(|v| v.im)),
            opt(self.abs_error),
            self.status
        )
    }

    pub fn parse_csv_line(line: &str, line_no: usize) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        let err = |message: String| QbxError::Config {
            line: line_no,
            message,
        };
        if fields.len() != 16 {
            return Err(err(format!("expected 16 fields, found {}", fields.len())));
        }
        fn num<T: FromStr>(s: &str, name: &str, line_no: usize) -> Result<T> {
            s.parse().map_err(|_| QbxError::Config {
                line: line_no,
                message: format!("bad {name} '{s}'"),
            })
        }
        let opt = |s: &str, name: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s, name, line_no).map(Some)
            }
        };
        let pair = |re: Option<f64>, im: Option<f64>| -> Result<Option<Complex64>> {
            match (re, im) {
                (Some(a), Some(b)) => Ok(Some(Complex64::new(a, b))),
                (None, None) => Ok(None),
                _ => Err(err(
                    "real and imaginary parts must both be present or both empty".into(),
                )),
            }
        };
        let geometry = parse_geometry(fields[1]).map_err(|e| err(e.to_string()))?;
        Ok(SweepRecord {
            kernel: fields[0]
                .parse()
                .map_err(|e: QbxError| err(e.to_string()))?,
            geometry: fields[1].to_string(),
            density: fields[2]
                .parse()
                .map_err(|e: QbxError| err(e.to_string()))?,
            k: num(fields[3], "k", line_no)?,
            n: num(fields[4], "N", line_no)?,
            q: num(fields[5], "q", line_no)?,
            m: num(fields[6], "M", line_no)?,
            h: num(fields[7], "h", line_no)?,
            r: num(fields[8], "r", line_no)?,
            target: parse_target(fields[9], matches!(geometry, Geometry::Surface(_)))
                .map_err(|e| err(e.to_string()))?,
            value: pair(opt(fields[10], "value_re")?, opt(fields[11], "value_im")?)?,
            reference: pair(opt(fields[12], "ref_re")?, opt(fields[13], "ref_im")?)?,
            abs_error: opt(fields[14], "abs_error")?,
            status: fields[15]
                .parse()
                .map_err(|e: QbxError| err(e.to_string()))?,
        })
    }
}

/// Writes the header and one line per record. With `stamp`, a commented
/// timestamp line goes first; it is the only non-deterministic output.
pub fn write_csv<W: Write>(out: &mut W, records: &[SweepRecord], stamp: bool) -> Result<()> {
    let io = |e: std::io::Error| QbxError::Io(e.to_string());
    if stamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(out, "# generated at unix time {secs}").map_err(io)?;
    }
    writeln!(out, "{CSV_HEADER}").map_err(io)?;
    for r in records {
        writeln!(out, "{}", r.to_csv_line()).map_err(io)?;
    }
    Ok(())
}

/// Inverse of [`write_csv`]; `#` lines are ignored.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        Some((i, _)) => {
            return Err(QbxError::Config {
                line: i + 1,
                message: "unexpected CSV header".into(),
            })
        }
        None => {
            return Err(QbxError::Config {
                line: 0,
                message: "empty CSV".into(),
            })
        }
    }
    lines
        .map(|(i, l)| SweepRecord::parse_csv_line(l.trim_end(), i + 1))
        .collect()
}

struct Row {
    n: usize,
    m: usize,
    h: f64,
    r: f64,
    target: Target,
}

fn rows(config: &SweepConfig) -> Vec<Row> {
    let mut out = Vec::new();
    for &n in &config.n_list {
        for &m in &config.m_list {
            let h = panel_size(config, m);
            for r in config.coupling.radii(h) {
                for &target in &config.targets {
                    out.push(Row { n, m, h, r, target });
                }
            }
        }
    }
    out
}

fn panel_size(config: &SweepConfig, m: usize) -> f64 {
    match &config.geometry {
        Geometry::Curve(c) => c.arc_length() / m as f64,
        Geometry::Surface(s) => std::f64::consts::PI * s.radius / m as f64,
    }
}

fn params(config: &SweepConfig, n: usize, r: f64, m: usize) -> QbxParams {
    let p = match config.geometry {
        Geometry::Curve(_) => QbxParams::curve(n, r, m, config.q),
        Geometry::Surface(_) => QbxParams::sphere(n, r, config.sphere_rule.0, config.sphere_rule.1)
            .with_sphere_layout(config.sphere_layout),
    };
    p.with_side(config.side)
}

/// Settings from which self-convergence references are refined: the
/// largest order and radius in the sweep, with the finest panel count whose
/// refinements stay within the discretization caps.
pub fn reference_base(config: &SweepConfig) -> QbxParams {
    let n = config.n_list.iter().copied().max().unwrap_or(0);
    let m_max = config.m_list.iter().copied().max().unwrap_or(1);
    let m = m_max
        .min(MAX_PANELS / 4)
        .max(config.m_list.iter().copied().min().unwrap_or(1));
    let r = match &config.coupling {
        Coupling::FixedR(rs) => rs.iter().copied().fold(0.0, f64::max),
        c => {
            let m_min = config.m_list.iter().copied().min().unwrap_or(1);
            c.radii(panel_size(config, m_min))[0]
        }
    };
    params(config, n, r, m)
}

/// Self-convergence (or closed-form) reference at one target. When the base
/// radius cannot be placed there, the next smaller sweep radius is tried.
fn reference_at(
    config: &SweepConfig,
    kernel: &KernelSpec,
    target: Target,
    base: &QbxParams,
) -> Result<ReferenceValue> {
    let mut radii: Vec<f64> = match &config.coupling {
        Coupling::FixedR(rs) => rs.iter().copied().filter(|r| *r <= base.radius).collect(),
        _ => vec![base.radius],
    };
    radii.sort_by(|a, b| b.total_cmp(a));
    let mut last = None;
    for r in radii {
        let p = QbxParams { radius: r, ..*base };
        match onsurface_reference(
            kernel,
            &config.geometry,
            &config.density,
            target,
            config.reference_tol,
            &p,
        ) {
            Err(e @ QbxError::Placement(_)) => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap_or_else(|| QbxError::Placement("no usable reference radius".into())))
}

/// Runs every row of the sweep in deterministic order. Rows run on up to
/// `jobs` threads (all cores when `None`); the output does not depend on it.
pub fn run_sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<Vec<SweepRecord>> {
    let kernel = config.kernel_spec()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| QbxError::Capability(format!("cannot start worker pool: {e}")))?;
    let base = reference_base(config);
    let geometry_label = label(&config.geometry);
    let rows = rows(config);

    pool.install(|| {
        let references: Vec<Result<ReferenceValue>> = config
            .targets
            .par_iter()
            .map(|&t| reference_at(config, &kernel, t, &base))
            .collect();
        let by_target: HashMap<String, &Result<ReferenceValue>> = config
            .targets
            .iter()
            .map(|&t| target_label(t))
            .zip(references.iter())
            .collect();

        let records = rows
            .par_iter()
            .map(|row| {
                let mut rec = SweepRecord {
                    kernel: config.kernel,
                    geometry: geometry_label.clone(),
                    density: config.density.clone(),
                    k: config.k,
                    n: row.n,
                    q: config.q,
                    m: row.m,
                    h: row.h,
                    r: row.r,
                    target: row.target,
                    value: None,
                    reference: None,
                    abs_error: None,
                    status: RowStatus::Ok,
                };
                let p = params(config, row.n, row.r, row.m);
                match eval_on_surface(&kernel, &config.geometry, &config.density, row.target, &p) {
                    Err(QbxError::Placement(_)) => rec.status = RowStatus::Skipped,
                    Err(e) => rec.status = RowStatus::Failed(e.kind().to_string()),
                    Ok(v) => {
                        rec.value = Some(v);
                        match by_target[&target_label(row.target)] {
                            Err(_) => rec.status = RowStatus::Failed("reference".into()),
                            Ok(reference) => {
                                rec.reference = Some(reference.value);
                                rec.abs_error = Some((v - reference.value).norm());
                                if !reference.usable {
                                    rec.status = RowStatus::RefUnusable;
                                }
                            }
                        }
                    }
                }
                rec
            })
            .collect();
        Ok(records)
    })
}
