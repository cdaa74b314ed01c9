//! Composite Gauss-Legendre panel quadrature on curves, tensor-product sphere
//! rules, and a globally adaptive Gauss-Kronrod integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{QbxError, Result};
use crate::geometry::{
    omega, spherical_coords, Panels, ParametricCurve, ParametricSurface, Point3,
};

pub const MAX_GAUSS_ORDER: usize = 64;
pub const MAX_PANELS: usize = 4096;

/// `q`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub q: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_q(x), P_q'(x))` by the three-term recurrence.
fn legendre_with_derivative(q: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for n in 1..q {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * x * p1 - nf * p0) / (nf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    if q == 0 {
        return (1.0, 0.0);
    }
    let dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

pub fn gauss_rule(q: usize) -> Result<GaussRule> {
    if q == 0 || q > MAX_GAUSS_ORDER {
        return Err(QbxError::Domain(format!(
            "Gauss order must lie in 1..={MAX_GAUSS_ORDER}, got {q}"
        )));
    }
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(q, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // ascending order, exactly symmetric
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    Ok(GaussRule { q, nodes, weights })
}

impl GaussRule {
    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// One quadrature node on a curve, with `dt_weight` the Gauss weight scaled
/// to the panel (parameter measure, no speed factor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveNode {
    pub panel: usize,
    pub index: usize,
    pub t: f64,
    pub point: Complex64,
    pub tangent: Complex64,
    pub speed: f64,
    pub dt_weight: f64,
}

impl CurveNode {
    /// Weight for `ds = |w'(t)| dt`.
    pub fn ds_weight(&self) -> f64 {
        self.speed * self.dt_weight
    }

    /// Outward unit normal.
    pub fn normal(&self) -> Complex64 {
        -Complex64::i() * self.tangent / self.speed
    }
}

/// All composite-rule nodes, panel-major and node-minor.
pub fn curve_nodes(
    curve: &ParametricCurve,
    panels: &Panels,
    rule: &GaussRule,
) -> Result<Vec<CurveNode>> {
    if panels.count() > MAX_PANELS {
        return Err(QbxError::Capability(format!(
            "{} panels exceed the supported maximum {MAX_PANELS}",
            panels.count()
        )));
    }
    let mut out = Vec::with_capacity(panels.count() * rule.q);
    for (p, &(a, b)) in panels.intervals.iter().enumerate() {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (i, (x, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let t = mid + half * x;
            let (point, tangent, _) = curve.jet(t);
            out.push(CurveNode {
                panel: p,
                index: i,
                t,
                point,
                tangent,
                speed: tangent.norm(),
                dt_weight: w * half,
            });
        }
    }
    Ok(out)
}

/// `sum_panels sum_nodes f(t_n) |w'(t_n)| w_n`, in panel-major order.
pub fn composite_integrate<F>(
    curve: &ParametricCurve,
    panels: &Panels,
    rule: &GaussRule,
    integrand: F,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    for node in curve_nodes(curve, panels, rule)? {
        let v = integrand(node.t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(QbxError::NonFinite {
                panel: node.panel,
                node: node.index,
            });
        }
        total += v * node.ds_weight();
    }
    Ok(total)
}

/// Tensor-product rule on the unit sphere: Gauss-Legendre in `cos phi` and
/// the trapezoidal rule in `theta`. Optionally rotated so that its pole
/// points along a chosen axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub n_phi: usize,
    pub n_theta: usize,
    /// `(theta, phi, weight)` in the sphere's own coordinates; weights are for
    /// the unit sphere (they include `sin phi`, not the radius).
    pub nodes: Vec<(f64, f64, f64)>,
}

/// How a sphere rule is laid out relative to the evaluation target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SphereLayout {
    /// Gauss in `cos phi` about the sphere's own pole.
    #[default]
    Standard,
    /// The standard rule with its pole rotated onto the target.
    Aligned,
    /// Pole on the target, polar nodes graded as `phi' = pi u^3` with Gauss
    /// in `u`. Resolves the near-singular QBX integrand at small radii.
    Graded,
}

impl SphereLayout {
    pub fn as_str(self) -> &'static str {
        match self {
            SphereLayout::Standard => "standard",
            SphereLayout::Aligned => "aligned",
            SphereLayout::Graded => "graded",
        }
    }
}

impl std::str::FromStr for SphereLayout {
    type Err = QbxError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "standard" => Ok(SphereLayout::Standard),
            "aligned" => Ok(SphereLayout::Aligned),
            "graded" => Ok(SphereLayout::Graded),
            other => Err(QbxError::Domain(format!("unknown sphere layout '{other}'"))),
        }
    }
}

const GRADING_POWER: i32 = 3;

impl SphereRule {
    pub fn new(n_phi: usize, n_theta: usize) -> Result<Self> {
        Self::build(n_phi, n_theta, None, false)
    }

    /// Same rule with its pole moved to the direction `omega(theta, phi)`.
    pub fn aligned(n_phi: usize, n_theta: usize, theta: f64, phi: f64) -> Result<Self> {
        Self::build(n_phi, n_theta, Some(omega(theta, phi)), false)
    }

    /// Rule with its pole at `omega(theta, phi)` and polar nodes clustered
    /// toward that pole.
    pub fn graded(n_phi: usize, n_theta: usize, theta: f64, phi: f64) -> Result<Self> {
        Self::build(n_phi, n_theta, Some(omega(theta, phi)), true)
    }

    pub fn with_layout(
        layout: SphereLayout,
        n_phi: usize,
        n_theta: usize,
        theta: f64,
        phi: f64,
    ) -> Result<Self> {
        match layout {
            SphereLayout::Standard => Self::new(n_phi, n_theta),
            SphereLayout::Aligned => Self::aligned(n_phi, n_theta, theta, phi),
            SphereLayout::Graded => Self::graded(n_phi, n_theta, theta, phi),
        }
    }

    fn build(n_phi: usize, n_theta: usize, axis: Option<Point3>, graded: bool) -> Result<Self> {
        if n_theta == 0 {
            return Err(QbxError::Domain(
                "sphere rule needs at least one theta node".into(),
            ));
        }
        let gauss = gauss_rule(n_phi)?;
        let frame = axis.map(orthonormal_frame);
        let dtheta = TAU / n_theta as f64;
        let mut nodes = Vec::with_capacity(n_phi * n_theta);
        for (x, w) in gauss.nodes.iter().zip(&gauss.weights) {
            let (phi, w) = if graded {
                let u = 0.5 * (x + 1.0);
                let phi = PI * u.powi(GRADING_POWER);
                let dphi = PI * GRADING_POWER as f64 * u.powi(GRADING_POWER - 1);
                (phi, 0.5 * w * dphi * phi.sin())
            } else {
                (x.acos(), *w)
            };
            for j in 0..n_theta {
                let theta = (j as f64 + 0.5) * dtheta;
                let (theta, phi) = match frame {
                    None => (theta, phi),
                    Some([e1, e2, e3]) => {
                        let d = omega(theta, phi);
                        let v = [
                            d[0] * e1[0] + d[1] * e2[0] + d[2] * e3[0],
                            d[0] * e1[1] + d[1] * e2[1] + d[2] * e3[1],
                            d[0] * e1[2] + d[1] * e2[2] + d[2] * e3[2],
                        ];
                        let (_, t, p) = spherical_coords(v);
                        (t, p)
                    }
                };
                nodes.push((theta, phi, w * dtheta));
            }
        }
        Ok(Self {
            n_phi,
            n_theta,
            nodes,
        })
    }
}

/// Right-handed orthonormal frame `[e1, e2, axis]`.
fn orthonormal_frame(axis: Point3) -> [Point3; 3] {
    let helper = if axis[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let cross = |a: Point3, b: Point3| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let e1 = cross(helper, axis);
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    let e1 = [e1[0] / n, e1[1] / n, e1[2] / n];
    let e2 = cross(axis, e1);
    [e1, e2, axis]
}

/// `sum f(theta, phi) * weight * R^2` in node order.
pub fn sphere_integrate<F>(
    surface: &ParametricSurface,
    rule: &SphereRule,
    integrand: F,
) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let r2 = surface.radius * surface.radius;
    let mut total = Complex64::new(0.0, 0.0);
    for (i, &(theta, phi, w)) in rule.nodes.iter().enumerate() {
        let v = integrand(theta, phi);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(QbxError::NonFinite {
                panel: i / rule.n_theta,
                node: i % rule.n_theta,
            });
        }
        total += v * w;
    }
    Ok(total * r2)
}

const MAX_DEPTH: u32 = 60;
const MAX_INTERVALS: usize = 500_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Interval {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    depth: u32,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// 15-point Kronrod value and `|K15 - G7|`, plus the integral of `|f|`.
fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for i in 0..7 {
        let dx = half * XGK[i];
        let (f1, f2) = (f(mid - dx), f(mid + dx));
        k += (f1 + f2) * WGK[i];
        abs += (f1.norm() + f2.norm()) * WGK[i];
        if i % 2 == 1 {
            g += (f1 + f2) * WG[i / 2];
        }
    }
    (k * half, ((k - g) * half).norm(), abs * half.abs())
}

/// Globally adaptive Gauss-Kronrod (7, 15) integration over `[a, b]`.
///
/// Returns `(value, error_estimate)` with
/// `error_estimate <= tol * |value| + tol` on success.
pub fn adaptive_integrate<F>(integrand: F, a: f64, b: f64, tol: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    adaptive_integrate_partition(integrand, &[a, b], tol)
}

/// Like [`adaptive_integrate`] but starting from the partition `breaks`,
/// which must be increasing. Integrable endpoint singularities should sit on
/// break points.
pub fn adaptive_integrate_partition<F>(
    integrand: F,
    breaks: &[f64],
    tol: f64,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    if breaks.len() < 2 {
        return Err(QbxError::Domain(
            "integration needs at least two break points".into(),
        ));
    }
    if !(tol >= 1e-15) {
        return Err(QbxError::Domain(format!(
            "tolerance must be at least 1e-15, got {tol}"
        )));
    }
    let mut heap = BinaryHeap::new();
    // roundoff-limited intervals leave the queue for good
    let mut settled: Vec<(f64, Complex64)> = Vec::new();
    let mut settled_error = 0.0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_error = 0.0;
    let mut add = |heap: &mut BinaryHeap<Interval>,
                   total: &mut Complex64,
                   total_error: &mut f64,
                   a: f64,
                   b: f64,
                   depth: u32|
     -> Result<()> {
        let (value, error, abs) = kronrod(&integrand, a, b);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(QbxError::Convergence(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        *total += value;
        if error <= 50.0 * f64::EPSILON * abs {
            settled.push((a, value));
            settled_error += error;
        } else {
            *total_error += error;
            heap.push(Interval {
                a,
                b,
                value,
                error,
                depth,
            });
        }
        Ok(())
    };
    for w in breaks.windows(2) {
        add(&mut heap, &mut total, &mut total_error, w[0], w[1], 0)?;
    }
    loop {
        let target = tol * total.norm() + tol;
        if total_error <= target || heap.is_empty() {
            break;
        }
        if heap.len() + 1 > MAX_INTERVALS {
            return Err(QbxError::Convergence(format!(
                "interval limit reached with error estimate {total_error:.3e}"
            )));
        }
        let worst = heap.pop().expect("non-empty heap");
        if worst.depth >= MAX_DEPTH {
            return Err(QbxError::Convergence(format!(
                "recursion depth {MAX_DEPTH} exceeded near [{}, {}]",
                worst.a, worst.b
            )));
        }
        total -= worst.value;
        total_error -= worst.error;
        let mid = 0.5 * (worst.a + worst.b);
        add(
            &mut heap,
            &mut total,
            &mut total_error,
            worst.a,
            mid,
            worst.depth + 1,
        )?;
        add(
            &mut heap,
            &mut total,
            &mut total_error,
            mid,
            worst.b,
            worst.depth + 1,
        )?;
    }
    // re-sum in break order so the result does not depend on heap history
    let mut parts: Vec<(f64, Complex64)> = heap.into_iter().map(|iv| (iv.a, iv.value)).collect();
    parts.extend(settled);
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total: Complex64 = parts.iter().map(|p| p.1).sum();
    Ok((total, total_error.max(0.0) + settled_error))
}
