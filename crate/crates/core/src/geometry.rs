//! Smooth closed boundaries, panelization and expansion center placement.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{QbxError, Result};
use crate::quadrature::adaptive_integrate;

/// Ball radius must not exceed this fraction of the local radius of curvature.
pub const CURVATURE_SAFETY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// Radius function `radius * (1 + amplitude * cos(arms * t))`.
    Starfish {
        radius: f64,
        amplitude: f64,
        arms: u32,
    },
}

/// A closed curve `w(t)`, `t in [0, 2 pi)`, in the complex plane, traversed
/// counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCurve {
    pub name: String,
    pub kind: CurveKind,
}

pub fn make_curve(kind: CurveKind) -> Result<ParametricCurve> {
    let name = match kind {
        CurveKind::Circle { radius } => {
            if !(radius > 0.0) {
                return Err(QbxError::Domain(format!(
                    "circle radius must be positive, got {radius}"
                )));
            }
            "circle"
        }
        CurveKind::Ellipse { a, b } => {
            if !(a > 0.0 && b > 0.0) {
                return Err(QbxError::Domain(format!(
                    "ellipse semi-axes must be positive, got ({a}, {b})"
                )));
            }
            "ellipse"
        }
        CurveKind::Starfish {
            radius,
            amplitude,
            arms,
        } => {
            if !(radius > 0.0) {
                return Err(QbxError::Domain(format!(
                    "starfish radius must be positive, got {radius}"
                )));
            }
            if !(0.0..1.0).contains(&amplitude) {
                return Err(QbxError::Domain(format!(
                    "starfish amplitude must lie in [0, 1), got {amplitude}"
                )));
            }
            if arms < 2 {
                return Err(QbxError::Domain(format!(
                    "starfish needs at least 2 arms, got {arms}"
                )));
            }
            "starfish"
        }
    };
    Ok(ParametricCurve {
        name: name.to_string(),
        kind,
    })
}

impl ParametricCurve {
    pub fn circle(radius: f64) -> Result<Self> {
        make_curve(CurveKind::Circle { radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        make_curve(CurveKind::Ellipse { a, b })
    }

    pub fn starfish(radius: f64, amplitude: f64, arms: u32) -> Result<Self> {
        make_curve(CurveKind::Starfish {
            radius,
            amplitude,
            arms,
        })
    }

    /// `(w, w', w'')` at parameter `t`.
    pub fn jet(&self, t: f64) -> (Complex64, Complex64, Complex64) {
        let e = Complex64::from_polar(1.0, t);
        let i = Complex64::i();
        match self.kind {
            CurveKind::Circle { radius } => (radius * e, radius * i * e, -radius * e),
            CurveKind::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                (
                    Complex64::new(a * c, b * s),
                    Complex64::new(-a * s, b * c),
                    Complex64::new(-a * c, -b * s),
                )
            }
            CurveKind::Starfish {
                radius,
                amplitude,
                arms,
            } => {
                let n = arms as f64;
                let (s, c) = (n * t).sin_cos();
                let rho = radius * (1.0 + amplitude * c);
                let drho = -radius * amplitude * n * s;
                let ddrho = -radius * amplitude * n * n * c;
                (
                    rho * e,
                    (drho + i * rho) * e,
                    (ddrho + 2.0 * i * drho - rho) * e,
                )
            }
        }
    }

    pub fn position(&self, t: f64) -> Complex64 {
        self.jet(t).0
    }

    pub fn derivative(&self, t: f64) -> Complex64 {
        self.jet(t).1
    }

    pub fn second_derivative(&self, t: f64) -> Complex64 {
        self.jet(t).2
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.derivative(t).norm()
    }

    /// Outward unit normal (tangent rotated by -90 degrees).
    pub fn normal(&self, t: f64) -> Complex64 {
        let d = self.derivative(t);
        -Complex64::i() * d / d.norm()
    }

    /// Signed curvature, positive where the curve bends toward the interior.
    pub fn curvature(&self, t: f64) -> f64 {
        let (_, d1, d2) = self.jet(t);
        (d1.conj() * d2).im / d1.norm().powi(3)
    }

    pub fn arc_length(&self) -> f64 {
        adaptive_integrate(|t| Complex64::new(self.speed(t), 0.0), 0.0, TAU, 1e-14)
            .map(|(v, _)| v.re)
            .unwrap_or(f64::NAN)
    }

    /// Largest `|curvature|` over the parameters within reach of a ball of
    /// radius `r` touching the curve at `t0`.
    pub fn local_max_curvature(&self, t0: f64, r: f64) -> f64 {
        let half_width = (2.0 * r / self.speed(t0)).min(PI);
        (0..=64)
            .map(|i| t0 - half_width + 2.0 * half_width * i as f64 / 64.0)
            .map(|t| self.curvature(t).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Interior => -1.0,
            Side::Exterior => 1.0,
        }
    }
}

/// Tangent ball `B_r(x_c)` touching the curve at `x0 = w(t0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterPlacement {
    pub target: f64,
    pub target_point: Complex64,
    pub radius: f64,
    pub center: Complex64,
    pub side: Side,
}

impl CenterPlacement {
    /// Polar angle of `x0 - x_c`.
    pub fn target_angle(&self) -> f64 {
        (self.target_point - self.center).arg()
    }
}

pub fn place_center(
    curve: &ParametricCurve,
    t0: f64,
    r: f64,
    side: Side,
) -> Result<CenterPlacement> {
    if !(r > 0.0) {
        return Err(QbxError::Placement(format!(
            "radius must be positive, got {r}"
        )));
    }
    let kappa = curve.local_max_curvature(t0, r);
    if kappa > 0.0 && r > CURVATURE_SAFETY / kappa {
        return Err(QbxError::Placement(format!(
            "radius {r} exceeds the curvature bound {:.6e} = {CURVATURE_SAFETY}/kappa_max (kappa_max = {kappa:.6e})",
            CURVATURE_SAFETY / kappa
        )));
    }
    let x0 = curve.position(t0);
    let center = x0 + side.sign() * r * curve.normal(t0);
    Ok(CenterPlacement {
        target: t0,
        target_point: x0,
        radius: r,
        center,
        side,
    })
}

/// `M` equal parameter intervals covering `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Panels {
    pub intervals: Vec<(f64, f64)>,
    /// Arc length per panel (total arc length / M).
    pub h: f64,
    pub arc_length: f64,
}

impl Panels {
    pub fn count(&self) -> usize {
        self.intervals.len()
    }
}

pub fn panelize(curve: &ParametricCurve, m: usize) -> Result<Panels> {
    if m == 0 {
        return Err(QbxError::Domain("panel count must be at least 1".into()));
    }
    let width = TAU / m as f64;
    let intervals = (0..m)
        .map(|i| {
            (
                i as f64 * width,
                if i + 1 == m {
                    TAU
                } else {
                    (i + 1) as f64 * width
                },
            )
        })
        .collect();
    let arc_length = curve.arc_length();
    Ok(Panels {
        intervals,
        h: arc_length / m as f64,
        arc_length,
    })
}

pub type Point3 = [f64; 3];

pub fn dot3(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn sub3(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn norm3(a: Point3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn scale3(s: f64, a: Point3) -> Point3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// Unit vector `(sin phi cos theta, sin phi sin theta, cos phi)`.
pub fn omega(theta: f64, phi: f64) -> Point3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [sp * ct, sp * st, cp]
}

/// `(|v|, theta, phi)` of a vector; `theta in [0, 2 pi)`, `phi in [0, pi]`.
pub fn spherical_coords(v: Point3) -> (f64, f64, f64) {
    let rho = norm3(v);
    let theta = v[1].atan2(v[0]).rem_euclid(TAU);
    let phi = (v[2] / rho).clamp(-1.0, 1.0).acos();
    (rho, theta, phi)
}

/// Sphere of radius `radius` centered at the origin, parametrized by
/// `(theta, phi) -> radius * omega(theta, phi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricSurface {
    pub name: String,
    pub radius: f64,
}

impl ParametricSurface {
    pub fn sphere(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(QbxError::Domain(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            name: "sphere".into(),
            radius,
        })
    }

    pub fn position(&self, theta: f64, phi: f64) -> Point3 {
        scale3(self.radius, omega(theta, phi))
    }

    pub fn normal(&self, theta: f64, phi: f64) -> Point3 {
        omega(theta, phi)
    }

    pub fn area_element(&self, phi: f64) -> f64 {
        self.radius * self.radius * phi.sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePlacement {
    pub target: (f64, f64),
    pub target_point: Point3,
    pub radius: f64,
    pub center: Point3,
    pub side: Side,
}

impl SurfacePlacement {
    /// Spherical angles `(theta, phi)` of `x0 - x_c`.
    pub fn target_angles(&self) -> (f64, f64) {
        let (_, theta, phi) = spherical_coords(sub3(self.target_point, self.center));
        (theta, phi)
    }
}

pub fn place_center_surface(
    surface: &ParametricSurface,
    theta0: f64,
    phi0: f64,
    r: f64,
    side: Side,
) -> Result<SurfacePlacement> {
    if !(r > 0.0) {
        return Err(QbxError::Placement(format!(
            "radius must be positive, got {r}"
        )));
    }
    let bound = CURVATURE_SAFETY * surface.radius;
    if r > bound {
        return Err(QbxError::Placement(format!(
            "radius {r} exceeds the curvature bound {bound:.6e} = {CURVATURE_SAFETY}/kappa_max"
        )));
    }
    let x0 = surface.position(theta0, phi0);
    let n = surface.normal(theta0, phi0);
    let center = [
        x0[0] + side.sign() * r * n[0],
        x0[1] + side.sign() * r * n[1],
        x0[2] + side.sign() * r * n[2],
    ];
    Ok(SurfacePlacement {
        target: (theta0, phi0),
        target_point: x0,
        radius: r,
        center,
        side,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_jet() {
        let c = ParametricCurve::circle(1.0).unwrap();
        let t = 0.7;
        assert!((c.position(t) - Complex64::from_polar(1.0, t)).norm() < 1e-15);
        assert!((c.derivative(t) - Complex64::i() * Complex64::from_polar(1.0, t)).norm() < 1e-15);
        assert!((c.speed(t) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ellipse_and_starfish_values() {
        let e = ParametricCurve::ellipse(2.0, 1.0).unwrap();
        assert!((e.position(PI / 2.0) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((e.speed(PI / 2.0) - 2.0).abs() < 1e-15);
        let s = ParametricCurve::starfish(1.0, 0.3, 5).unwrap();
        assert!((s.position(0.0).norm() - 1.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ParametricCurve::circle(0.0).is_err());
        assert!(ParametricCurve::ellipse(1.0, -1.0).is_err());
        assert!(ParametricCurve::starfish(1.0, 1.0, 5).is_err());
        assert!(ParametricCurve::starfish(1.0, 0.2, 1).is_err());
    }

    #[test]
    fn closed_and_smooth_with_positive_speed() {
        for c in [
            ParametricCurve::circle(1.5).unwrap(),
            ParametricCurve::ellipse(2.0, 1.0).unwrap(),
            ParametricCurve::starfish(1.0, 0.3, 5).unwrap(),
        ] {
            let (w0, d0, _) = c.jet(0.0);
            let (w1, d1, _) = c.jet(TAU);
            assert!((w0 - w1).norm() < 1e-12);
            assert!((d0 - d1).norm() < 1e-12);
            let min_speed = (0..4096)
                .map(|i| c.speed(TAU * i as f64 / 4096.0))
                .fold(f64::MAX, f64::min);
            assert!(min_speed > 0.0);
        }
    }

    #[test]
    fn circle_normal_is_radial() {
        let c = ParametricCurve::circle(2.5).unwrap();
        for i in 0..32 {
            let t = TAU * i as f64 / 32.0;
            assert!((c.normal(t) - Complex64::from_polar(1.0, t)).norm() < 1e-14);
        }
    }

    #[test]
    fn derivative_finite_difference_order() {
        let c = ParametricCurve::starfish(1.0, 0.3, 5).unwrap();
        let t = 0.37;
        let err =
            |d: f64| (c.derivative(t) - (c.position(t + d) - c.position(t - d)) / (2.0 * d)).norm();
        let (e1, e2) = (err(1e-4), err(1e-5));
        let order = (e1 / e2).log10();
        assert!(order >= 1.9, "observed order {order}");
        let err2 = |d: f64| {
            (c.second_derivative(t) - (c.derivative(t + d) - c.derivative(t - d)) / (2.0 * d))
                .norm()
        };
        assert!((err2(1e-4) / err2(1e-5)).log10() >= 1.9);
    }

    #[test]
    fn center_placement_examples() {
        let c = ParametricCurve::circle(1.0).unwrap();
        let p = place_center(&c, 0.0, 0.25, Side::Interior).unwrap();
        assert!((p.center - Complex64::new(0.75, 0.0)).norm() < 1e-15);
        let p = place_center(&c, PI / 2.0, 0.1, Side::Exterior).unwrap();
        assert!((p.center - Complex64::new(0.0, 1.1)).norm() < 1e-15);
        let err = place_center(&c, 0.0, 3.0, Side::Interior).unwrap_err();
        assert!(matches!(err, QbxError::Placement(ref m) if m.contains("curvature")));
    }

    #[test]
    fn panelize_examples() {
        let c = ParametricCurve::circle(1.0).unwrap();
        let p = panelize(&c, 4).unwrap();
        assert_eq!(p.count(), 4);
        assert!((p.intervals[1].1 - p.intervals[1].0 - PI / 2.0).abs() < 1e-15);
        assert!((p.h - PI / 2.0).abs() < 1e-13);
        let e = ParametricCurve::ellipse(2.0, 1.0).unwrap();
        let p = panelize(&e, 8).unwrap();
        // periodic trapezoid rule is spectrally accurate for the perimeter
        let n = 4096;
        let trap: f64 = (0..n)
            .map(|i| e.speed(TAU * i as f64 / n as f64))
            .sum::<f64>()
            * TAU
            / n as f64;
        assert!((p.arc_length - trap).abs() < 1e-11);
        assert!((p.arc_length - 9.688448).abs() < 1e-6);
        assert!((p.h * 8.0 - p.arc_length).abs() < 1e-12);
        let one = panelize(&e, 1).unwrap();
        assert_eq!(one.intervals, vec![(0.0, TAU)]);
    }

    #[test]
    fn sphere_placement() {
        let s = ParametricSurface::sphere(1.0).unwrap();
        let p = place_center_surface(&s, 0.3, 1.2, 0.25, Side::Interior).unwrap();
        assert!((norm3(sub3(p.center, p.target_point)) - 0.25).abs() < 1e-14);
        assert!((norm3(p.center) - 0.75).abs() < 1e-14);
        let (theta, phi) = p.target_angles();
        assert!((theta - 0.3).abs() < 1e-12 && (phi - 1.2).abs() < 1e-12);
        assert!(place_center_surface(&s, 0.3, 1.2, 0.8, Side::Interior).is_err());
    }
}
