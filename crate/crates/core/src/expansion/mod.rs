//! QBX expansions: coefficient formation by smooth quadrature about an
//! off-surface center, truncated evaluation at the on-surface target, and the
//! three-step pipeline tying placement, coefficients and evaluation together.

mod density;
mod helmholtz;
mod planar;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{QbxError, Result};
use crate::geometry::{
    norm3, panelize, place_center, place_center_surface, sub3, ParametricCurve, ParametricSurface,
    Point3, Side,
};
use crate::quadrature::{curve_nodes, gauss_rule, CurveNode, SphereLayout, SphereRule};

pub use density::Density;
pub use helmholtz::{
    helmholtz2d_coeffs, helmholtz2d_eval, helmholtz3d_coeffs, helmholtz3d_eval, Layer,
};
pub use planar::{
    cauchy_coeffs, cauchy_eval, laplace_dlp_coeffs, laplace_dlp_eval, laplace_dlp_target_weights,
    laplace_slp_coeffs, laplace_slp_eval,
};

/// Relative slack allowed when a quadrature node sits on the ball boundary
/// (the target itself is usually a node in Nystrom discretizations).
pub const NODE_DISTANCE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Cauchy,
    LaplaceSlp,
    LaplaceDlp,
    HelmholtzSlp,
    HelmholtzDlp,
}

impl KernelFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelFamily::Cauchy => "cauchy",
            KernelFamily::LaplaceSlp => "laplace_slp",
            KernelFamily::LaplaceDlp => "laplace_dlp",
            KernelFamily::HelmholtzSlp => "helmholtz_slp",
            KernelFamily::HelmholtzDlp => "helmholtz_dlp",
        }
    }

    pub fn is_double_layer(self) -> bool {
        matches!(self, KernelFamily::LaplaceDlp | KernelFamily::HelmholtzDlp)
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelFamily {
    type Err = QbxError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "cauchy" => KernelFamily::Cauchy,
            "laplace_slp" => KernelFamily::LaplaceSlp,
            "laplace_dlp" => KernelFamily::LaplaceDlp,
            "helmholtz_slp" => KernelFamily::HelmholtzSlp,
            "helmholtz_dlp" => KernelFamily::HelmholtzDlp,
            other => return Err(QbxError::Domain(format!("unknown kernel family '{other}'"))),
        })
    }
}

/// Which layer potential to evaluate, in which dimension, at which wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub dimension: u8,
    pub k: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, dimension: u8, k: f64) -> Result<Self> {
        if dimension != 2 && dimension != 3 {
            return Err(QbxError::Domain(format!(
                "dimension must be 2 or 3, got {dimension}"
            )));
        }
        match family {
            KernelFamily::Cauchy | KernelFamily::LaplaceSlp | KernelFamily::LaplaceDlp => {
                if dimension != 2 {
                    return Err(QbxError::Capability(format!(
                        "{family} is only available in 2D"
                    )));
                }
                if k != 0.0 {
                    return Err(QbxError::Domain(format!(
                        "{family} takes no wavenumber, got k = {k}"
                    )));
                }
            }
            KernelFamily::HelmholtzSlp | KernelFamily::HelmholtzDlp => {
                if !(k > 0.0) || !k.is_finite() {
                    return Err(QbxError::Domain(format!(
                        "{family} needs a wavenumber k > 0, got {k}"
                    )));
                }
            }
        }
        Ok(Self {
            family,
            dimension,
            k,
        })
    }

    pub fn cauchy() -> Self {
        Self {
            family: KernelFamily::Cauchy,
            dimension: 2,
            k: 0.0,
        }
    }

    pub fn laplace_slp() -> Self {
        Self {
            family: KernelFamily::LaplaceSlp,
            dimension: 2,
            k: 0.0,
        }
    }

    pub fn laplace_dlp() -> Self {
        Self {
            family: KernelFamily::LaplaceDlp,
            dimension: 2,
            k: 0.0,
        }
    }

    pub fn helmholtz(layer: Layer, dimension: u8, k: f64) -> Result<Self> {
        let family = match layer {
            Layer::Single => KernelFamily::HelmholtzSlp,
            Layer::Double => KernelFamily::HelmholtzDlp,
        };
        Self::new(family, dimension, k)
    }
}

/// Expansion center, in the plane or in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Center {
    Plane(Complex64),
    Space(Point3),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    /// `a_0..a_N`: Cauchy Taylor coefficients, or the Laplace double-layer `b_j`.
    Taylor(Vec<Complex64>),
    /// Laplace single layer: `A_0` and `a_1..a_N` (stored at `a[j - 1]`).
    LogSeries { a0: f64, a: Vec<Complex64> },
    /// 2D Helmholtz `alpha_l`, `l = -N..=N`, stored at `l + N`.
    FourierBessel(Vec<Complex64>),
    /// 3D Helmholtz `alpha_lm`, stored at `l^2 + l + m`.
    SphHarm(Vec<Complex64>),
}

/// Truncated local expansion about a QBX center.
#[derive(Debug, Clone, PartialEq)]
pub struct QbxExpansion {
    pub kernel: KernelSpec,
    pub center: Center,
    pub radius: f64,
    pub order: usize,
    pub coefficients: Coefficients,
}

impl QbxExpansion {
    /// Number of stored coefficients (including `A_0` for the log series).
    pub fn coefficient_count(&self) -> usize {
        match &self.coefficients {
            Coefficients::Taylor(a) | Coefficients::FourierBessel(a) | Coefficients::SphHarm(a) => {
                a.len()
            }
            Coefficients::LogSeries { a, .. } => a.len() + 1,
        }
    }

    /// Value of the truncated expansion at `x_c + z` (2D kernels).
    pub fn eval_offset(&self, z: Complex64) -> Result<Complex64> {
        match (&self.coefficients, self.kernel.family) {
            (Coefficients::Taylor(a), KernelFamily::Cauchy) => Ok(planar::horner(a, z)),
            (Coefficients::Taylor(b), KernelFamily::LaplaceDlp) => {
                Ok((-planar::horner(b, z).im).into())
            }
            (Coefficients::LogSeries { a0, a }, KernelFamily::LaplaceSlp) => {
                Ok((a0 - (z * planar::horner(a, z)).re).into())
            }
            (Coefficients::FourierBessel(alpha), _) => {
                helmholtz::eval_fourier_bessel(self, alpha, z)
            }
            _ => Err(QbxError::Capability(format!(
                "{} expansion cannot be evaluated at a planar offset",
                self.kernel.family
            ))),
        }
    }

    /// Value of the truncated expansion at `x_c + v` (3D kernels).
    pub fn eval_offset3(&self, v: Point3) -> Result<Complex64> {
        match &self.coefficients {
            Coefficients::SphHarm(alpha) => helmholtz::eval_sph_harm(self, alpha, v),
            _ => Err(QbxError::Capability(format!(
                "{} expansion is not a 3D expansion",
                self.kernel.family
            ))),
        }
    }
}

/// Boundary on which the potential lives.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Curve(ParametricCurve),
    Surface(ParametricSurface),
}

impl Geometry {
    pub fn name(&self) -> &str {
        match self {
            Geometry::Curve(c) => &c.name,
            Geometry::Surface(s) => &s.name,
        }
    }
}

/// On-surface target: a curve parameter or surface angles `(theta, phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Curve(f64),
    Surface(f64, f64),
}

/// Discretization and truncation parameters for one QBX evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QbxParams {
    pub order: usize,
    pub radius: f64,
    /// Panel count (curves).
    pub panels: usize,
    /// Gauss points per panel (curves).
    pub q: usize,
    /// `(n_phi, n_theta)` (surfaces).
    pub sphere_rule: (usize, usize),
    pub sphere_layout: SphereLayout,
    pub side: Side,
}

impl QbxParams {
    pub fn curve(order: usize, radius: f64, panels: usize, q: usize) -> Self {
        Self {
            order,
            radius,
            panels,
            q,
            sphere_rule: (0, 0),
            sphere_layout: SphereLayout::Standard,
            side: Side::Interior,
        }
    }

    pub fn sphere(order: usize, radius: f64, n_phi: usize, n_theta: usize) -> Self {
        Self {
            order,
            radius,
            panels: 0,
            q: 0,
            sphere_rule: (n_phi, n_theta),
            sphere_layout: SphereLayout::Standard,
            side: Side::Interior,
        }
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn with_sphere_layout(mut self, layout: SphereLayout) -> Self {
        self.sphere_layout = layout;
        self
    }
}

/// Steps 1 and 2 of QBX: place the tangent ball and form the expansion.
pub fn form_expansion(
    kernel: &KernelSpec,
    geometry: &Geometry,
    density: &Density,
    target: Target,
    params: &QbxParams,
) -> Result<QbxExpansion> {
    match (geometry, target) {
        (Geometry::Curve(curve), Target::Curve(t0)) => {
            if kernel.dimension != 2 {
                return Err(QbxError::Capability("3D kernel on a planar curve".into()));
            }
            let placement = place_center(curve, t0, params.radius, params.side)?;
            let panels = panelize(curve, params.panels)?;
            let rule = gauss_rule(params.q)?;
            let n = params.order;
            match kernel.family {
                KernelFamily::Cauchy => {
                    cauchy_coeffs(curve, density, &placement, n, &panels, &rule)
                }
                KernelFamily::LaplaceSlp => {
                    laplace_slp_coeffs(curve, density, &placement, n, &panels, &rule)
                }
                KernelFamily::LaplaceDlp => {
                    laplace_dlp_coeffs(curve, density, &placement, n, &panels, &rule)
                }
                KernelFamily::HelmholtzSlp => helmholtz2d_coeffs(
                    curve,
                    density,
                    &placement,
                    n,
                    &panels,
                    &rule,
                    Layer::Single,
                    kernel.k,
                ),
                KernelFamily::HelmholtzDlp => helmholtz2d_coeffs(
                    curve,
                    density,
                    &placement,
                    n,
                    &panels,
                    &rule,
                    Layer::Double,
                    kernel.k,
                ),
            }
        }
        (Geometry::Surface(surface), Target::Surface(theta0, phi0)) => {
            let layer = match kernel.family {
                KernelFamily::HelmholtzSlp => Layer::Single,
                KernelFamily::HelmholtzDlp => Layer::Double,
                other => {
                    return Err(QbxError::Capability(format!(
                        "{other} is not available on surfaces"
                    )))
                }
            };
            if kernel.dimension != 3 {
                return Err(QbxError::Capability("2D kernel on a surface".into()));
            }
            let placement =
                place_center_surface(surface, theta0, phi0, params.radius, params.side)?;
            let (n_phi, n_theta) = params.sphere_rule;
            let rule = SphereRule::with_layout(params.sphere_layout, n_phi, n_theta, theta0, phi0)?;
            helmholtz3d_coeffs(
                surface,
                density,
                &placement,
                params.order,
                &rule,
                layer,
                kernel.k,
            )
        }
        _ => Err(QbxError::Domain(
            "target kind does not match the geometry".into(),
        )),
    }
}

/// The full three-step QBX procedure: the one-sided limit of the layer
/// potential at the on-surface target, approximated from `params.side`.
pub fn eval_on_surface(
    kernel: &KernelSpec,
    geometry: &Geometry,
    density: &Density,
    target: Target,
    params: &QbxParams,
) -> Result<Complex64> {
    let expansion = form_expansion(kernel, geometry, density, target, params)?;
    let value = match (geometry, target) {
        (Geometry::Curve(curve), Target::Curve(t0)) => {
            expansion.eval_offset(curve.position(t0) - center2(&expansion))?
        }
        (Geometry::Surface(surface), Target::Surface(theta0, phi0)) => {
            expansion.eval_offset3(sub3(surface.position(theta0, phi0), center3(&expansion)))?
        }
        _ => unreachable!("checked in form_expansion"),
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(QbxError::Numeric(
            "QBX evaluation produced a non-finite value".into(),
        ));
    }
    Ok(value)
}

fn center2(e: &QbxExpansion) -> Complex64 {
    match e.center {
        Center::Plane(c) => c,
        Center::Space(_) => unreachable!("planar expansion with a spatial center"),
    }
}

fn center3(e: &QbxExpansion) -> Point3 {
    match e.center {
        Center::Space(c) => c,
        Center::Plane(_) => unreachable!("spatial expansion with a planar center"),
    }
}

/// Quadrature nodes with density values, after checking that no node falls
/// inside the expansion ball.
pub(crate) fn nodes_with_density(
    curve: &ParametricCurve,
    density: &Density,
    panels: &crate::geometry::Panels,
    rule: &crate::quadrature::GaussRule,
    center: Complex64,
    r: f64,
) -> Result<(Vec<CurveNode>, Vec<Complex64>)> {
    let nodes = curve_nodes(curve, panels, rule)?;
    check_node_distance(&nodes, center, r)?;
    let values = nodes
        .iter()
        .map(|n| density.on_curve(curve, n.t))
        .collect::<Result<Vec<_>>>()?;
    for (node, v) in nodes.iter().zip(&values) {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(QbxError::NonFinite {
                panel: node.panel,
                node: node.index,
            });
        }
    }
    Ok((nodes, values))
}

pub(crate) fn check_node_distance(nodes: &[CurveNode], center: Complex64, r: f64) -> Result<()> {
    for node in nodes {
        let d = (node.point - center).norm();
        if d < r * (1.0 - NODE_DISTANCE_SLACK) {
            return Err(QbxError::Geometry(format!(
                "quadrature node {} of panel {} lies at distance {d:.6e} < r = {r:.6e} from the center",
                node.index, node.panel
            )));
        }
    }
    Ok(())
}

pub(crate) fn check_point_distance3(y: Point3, center: Point3, r: f64, index: usize) -> Result<()> {
    let d = norm3(sub3(y, center));
    if d < r * (1.0 - NODE_DISTANCE_SLACK) {
        return Err(QbxError::Geometry(format!(
            "sphere node {index} lies at distance {d:.6e} < r = {r:.6e} from the center"
        )));
    }
    Ok(())
}
