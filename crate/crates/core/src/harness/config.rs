use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{QbxError, Result};
use crate::expansion::{Density, Geometry, KernelFamily, KernelSpec, Target};
use crate::geometry::{CurveKind, ParametricCurve, ParametricSurface, Side};
use crate::quadrature::SphereLayout;

/// How the expansion radius follows the panel size `h`.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    FixedR(Vec<f64>),
    /// `r = 4h`
    FourH,
    /// `r = sqrt(h)`
    SqrtH,
}

impl Coupling {
    pub fn name(&self) -> &'static str {
        match self {
            Coupling::FixedR(_) => "fixed_r",
            Coupling::FourH => "r_equals_4h",
            Coupling::SqrtH => "r_equals_sqrt_h",
        }
    }

    /// Radii used with panel size `h`.
    pub fn radii(&self, h: f64) -> Vec<f64> {
        match self {
            Coupling::FixedR(rs) => rs.clone(),
            Coupling::FourH => vec![4.0 * h],
            Coupling::SqrtH => vec![h.sqrt()],
        }
    }
}

/// One convergence sweep: the Cartesian product of `N_list`, the
/// discretization list, the radii and the targets.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub kernel: KernelFamily,
    pub k: f64,
    pub dimension: u8,
    pub geometry: Geometry,
    pub density: Density,
    pub n_list: Vec<usize>,
    pub coupling: Coupling,
    /// Panel counts (curves only).
    pub m_list: Vec<usize>,
    /// Gauss points per panel (curves only).
    pub q: usize,
    /// `(n_phi, n_theta)` (surfaces only).
    pub sphere_rule: (usize, usize),
    pub sphere_layout: SphereLayout,
    pub targets: Vec<Target>,
    pub side: Side,
    /// Self-convergence references whose estimated error exceeds this are
    /// flagged `ref_unusable`.
    pub reference_tol: f64,
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        KernelSpec::new(self.kernel, self.dimension, self.k)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QbxError::Io(format!("cannot read config '{}': {e}", path.display())))?;
        text.parse()
    }
}

const KEYS: &[&str] = &[
    "kernel",
    "k",
    "dimension",
    "geometry",
    "density",
    "N_list",
    "coupling",
    "r_list",
    "M_list",
    "q",
    "sphere_rule",
    "sphere_layout",
    "targets",
    "side",
    "reference_tol",
    "output",
];

struct Entry {
    line: usize,
    items: Vec<String>,
    is_list: bool,
}

impl FromStr for SweepConfig {
    type Err = QbxError;

    /// Flat `key = value` lines; lists as `key = [a, b, c]`; `#` starts a
    /// comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut entries: Vec<(&'static str, Entry)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| cfg_err(line, format!("expected 'key = value', got '{content}'")))?;
            let key = key.trim();
            let key = *KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| cfg_err(line, format!("unknown key '{key}'")))?;
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(cfg_err(line, format!("duplicate key '{key}'")));
            }
            entries.push((key, parse_value(value.trim(), line)?));
        }
        Builder { entries }.build()
    }
}

fn cfg_err(line: usize, message: impl Into<String>) -> QbxError {
    QbxError::Config {
        line,
        message: message.into(),
    }
}

fn parse_value(value: &str, line: usize) -> Result<Entry> {
    if let Some(rest) = value.strip_prefix('[') {
        let inner = rest
            .strip_suffix(']')
            .ok_or_else(|| cfg_err(line, "list is missing its closing ']'"))?;
        let items: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).collect();
        if items.iter().any(|s| s.is_empty()) {
            return Err(cfg_err(line, "empty list or list element"));
        }
        Ok(Entry {
            line,
            items,
            is_list: true,
        })
    } else if value.is_empty() {
        Err(cfg_err(line, "missing value"))
    } else {
        Ok(Entry {
            line,
            items: vec![value.to_string()],
            is_list: false,
        })
    }
}

struct Builder {
    entries: Vec<(&'static str, Entry)>,
}

impl Builder {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|(k, _)| *k == key).map(|(_, e)| e)
    }

    fn scalar(&self, key: &str) -> Result<Option<(usize, &str)>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) if e.is_list => Err(cfg_err(e.line, format!("'{key}' takes a single value"))),
            Some(e) => Ok(Some((e.line, e.items[0].as_str()))),
        }
    }

    fn required(&self, key: &str) -> Result<(usize, &str)> {
        self.scalar(key)?
            .ok_or_else(|| cfg_err(0, format!("missing required key '{key}'")))
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.scalar(key)? {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| cfg_err(line, format!("bad value for '{key}': {e}"))),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<(usize, Vec<T>)>>
    where
        T::Err: fmt::Display,
    {
        let Some(e) = self.get(key) else {
            return Ok(None);
        };
        let values = e
            .items
            .iter()
            .map(|v| {
                v.parse()
                    .map_err(|err| cfg_err(e.line, format!("bad element '{v}' in '{key}': {err}")))
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(Some((e.line, values)))
    }

    fn build(self) -> Result<SweepConfig> {
        let (line, kernel) = self.required("kernel")?;
        let kernel: KernelFamily = kernel
            .parse()
            .map_err(|e: QbxError| cfg_err(line, e.to_string()))?;
        let (line, geometry) = self.required("geometry")?;
        let geometry = parse_geometry(geometry).map_err(|e| cfg_err(line, e.to_string()))?;
        let is_surface = matches!(geometry, Geometry::Surface(_));
        let dimension = self
            .parsed::<u8>("dimension")?
            .unwrap_or(if is_surface { 3 } else { 2 });
        let k = self.parsed::<f64>("k")?.unwrap_or(0.0);
        let spec_line = self.get("kernel").map_or(0, |e| e.line);
        KernelSpec::new(kernel, dimension, k).map_err(|e| cfg_err(spec_line, e.to_string()))?;
        if (dimension == 3) != is_surface {
            return Err(cfg_err(
                spec_line,
                format!(
                    "dimension {dimension} does not match geometry '{}'",
                    label(&geometry)
                ),
            ));
        }
        let (line, density) = self.required("density")?;
        let density: Density = density
            .parse()
            .map_err(|e: QbxError| cfg_err(line, e.to_string()))?;

        let (_, n_list) = self
            .list::<usize>("N_list")?
            .ok_or_else(|| cfg_err(0, "missing required key 'N_list'"))?;

        let coupling = match self.scalar("coupling")? {
            None | Some((_, "fixed_r")) => {
                let (line, rs) = self
                    .list::<f64>("r_list")?
                    .ok_or_else(|| cfg_err(0, "coupling fixed_r needs 'r_list'"))?;
                if rs.iter().any(|r| !(*r > 0.0)) {
                    return Err(cfg_err(line, "radii must be positive"));
                }
                Coupling::FixedR(rs)
            }
            Some((_, "r_equals_4h")) => Coupling::FourH,
            Some((_, "r_equals_sqrt_h")) => Coupling::SqrtH,
            Some((line, other)) => {
                return Err(cfg_err(line, format!("unknown coupling '{other}'")))
            }
        };
        if !matches!(coupling, Coupling::FixedR(_)) {
            if let Some(e) = self.get("r_list") {
                return Err(cfg_err(
                    e.line,
                    format!("'r_list' conflicts with coupling {}", coupling.name()),
                ));
            }
            if is_surface {
                return Err(cfg_err(
                    self.get("coupling").map_or(0, |e| e.line),
                    "surfaces only support fixed_r",
                ));
            }
        }

        let (m_list, q, sphere_rule) = if is_surface {
            let (line, rule) = self
                .list::<usize>("sphere_rule")?
                .ok_or_else(|| cfg_err(0, "surfaces need 'sphere_rule = [n_phi, n_theta]'"))?;
            if rule.len() != 2 || rule.contains(&0) {
                return Err(cfg_err(
                    line,
                    "sphere_rule must be [n_phi, n_theta] with positive entries",
                ));
            }
            (vec![rule[0]], rule[1], (rule[0], rule[1]))
        } else {
            let (line, ms) = self
                .list::<usize>("M_list")?
                .ok_or_else(|| cfg_err(0, "missing required key 'M_list'"))?;
            if ms.contains(&0) {
                return Err(cfg_err(line, "panel counts must be positive"));
            }
            let q = self
                .parsed::<usize>("q")?
                .ok_or_else(|| cfg_err(0, "missing required key 'q'"))?;
            (ms, q, (0, 0))
        };
        let sphere_layout = self
            .parsed::<SphereLayout>("sphere_layout")?
            .unwrap_or_default();

        let (line, targets) = self
            .list::<String>("targets")?
            .ok_or_else(|| cfg_err(0, "missing required key 'targets'"))?;
        let targets = targets
            .iter()
            .map(|t| parse_target(t, is_surface).map_err(|e| cfg_err(line, e.to_string())))
            .collect::<Result<Vec<_>>>()?;

        let side = match self.scalar("side")? {
            None | Some((_, "interior")) => Side::Interior,
            Some((_, "exterior")) => Side::Exterior,
            Some((line, other)) => {
                return Err(cfg_err(
                    line,
                    format!("side must be interior or exterior, got '{other}'"),
                ))
            }
        };
        let reference_tol = self.parsed::<f64>("reference_tol")?.unwrap_or(1e-10);
        let output = self.scalar("output")?.map(|(_, p)| PathBuf::from(p));

        for (key, empty) in [
            ("N_list", n_list.is_empty()),
            ("M_list", m_list.is_empty()),
            ("targets", targets.is_empty()),
        ] {
            if empty {
                return Err(cfg_err(0, format!("'{key}' must not be empty")));
            }
        }
        Ok(SweepConfig {
            kernel,
            k,
            dimension,
            geometry,
            density,
            n_list,
            coupling,
            m_list,
            q,
            sphere_rule,
            sphere_layout,
            targets,
            side,
            reference_tol,
            output,
        })
    }
}

/// Parses `circle(R)`, `ellipse(a, b)`, `starfish(R, amplitude, arms)` or
/// `sphere(R)`.
pub fn parse_geometry(s: &str) -> Result<Geometry> {
    let s = s.trim();
    let bad = || QbxError::Domain(format!("cannot parse geometry '{s}'"));
    let (name, args) = match s.split_once('(') {
        Some((name, rest)) => (name.trim(), rest.strip_suffix(')').ok_or_else(bad)?),
        None => (s, ""),
    };
    let args: Vec<f64> = if args.trim().is_empty() {
        vec![]
    } else {
        args.split([',', ';'])
            .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
    match (name, args.len()) {
        ("circle", 0 | 1) => Ok(Geometry::Curve(ParametricCurve::circle(arg(0, 1.0))?)),
        ("ellipse", 2) => Ok(Geometry::Curve(ParametricCurve::ellipse(args[0], args[1])?)),
        ("starfish", 3) => {
            let arms = args[2];
            if arms.fract() != 0.0 || arms < 0.0 {
                return Err(bad());
            }
            Ok(Geometry::Curve(ParametricCurve::starfish(
                args[0],
                args[1],
                arms as u32,
            )?))
        }
        ("sphere", 0 | 1) => Ok(Geometry::Surface(ParametricSurface::sphere(arg(0, 1.0))?)),
        _ => Err(bad()),
    }
}

/// Canonical label, e.g. `starfish(1;0.3;5)`. Arguments are separated by
/// `;` so labels survive CSV fields unquoted, and re-parse with
/// [`parse_geometry`].
pub fn label(geometry: &Geometry) -> String {
    match geometry {
        Geometry::Curve(c) => match c.kind {
            CurveKind::Circle { radius } => format!("circle({radius})"),
            CurveKind::Ellipse { a, b } => format!("ellipse({a};{b})"),
            CurveKind::Starfish {
                radius,
                amplitude,
                arms,
            } => format!("starfish({radius};{amplitude};{arms})"),
        },
        Geometry::Surface(s) => format!("sphere({})", s.radius),
    }
}

/// `t` for curves, `theta:phi` for surfaces.
pub fn parse_target(s: &str, surface: bool) -> Result<Target> {
    let bad = || QbxError::Domain(format!("cannot parse target '{s}'"));
    match (s.split_once(':'), surface) {
        (Some((a, b)), true) => Ok(Target::Surface(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )),
        (None, false) => Ok(Target::Curve(s.trim().parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

pub fn target_label(target: Target) -> String {
    match target {
        Target::Curve(t) => format!("{t}"),
        Target::Surface(theta, phi) => format!("{theta}:{phi}"),
    }
}
