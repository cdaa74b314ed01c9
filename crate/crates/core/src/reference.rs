//! Ground truth for the convergence experiments: closed-form modal solutions
//! on circles and spheres, adaptive direct quadrature off the surface, and
//! self-convergence on the surface.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{QbxError, Result};
use crate::expansion::{
    eval_on_surface, Density, Geometry, KernelFamily, KernelSpec, QbxParams, Target,
};
use crate::geometry::{
    dot3, norm3, omega, scale3, spherical_coords, sub3, CurveKind, ParametricCurve,
    ParametricSurface, Point3,
};
use crate::quadrature::{adaptive_integrate_partition, MAX_GAUSS_ORDER, MAX_PANELS};
use crate::special::{
    bessel_batch, hankel1_with_derivative, sph_harm_table, spherical_hankel_with_derivative,
    spherical_j_values,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMethod {
    ModalClosedForm,
    AdaptiveDirect,
    SelfConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceValue {
    pub value: Complex64,
    pub method: ReferenceMethod,
    pub estimated_error: f64,
    /// False when `estimated_error` exceeds the requested tolerance.
    pub usable: bool,
}

/// A point in the plane or in space at which to evaluate a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalPoint {
    Plane(Complex64),
    Space(Point3),
}

fn circle_radius(curve: &ParametricCurve) -> Result<f64> {
    match curve.kind {
        CurveKind::Circle { radius } => Ok(radius),
        _ => Err(QbxError::Capability(format!(
            "no modal solution on '{}'",
            curve.name
        ))),
    }
}

/// Closed-form potential of a Fourier or spherical-harmonic density on a
/// circle or sphere centered at the origin. Points on the boundary give the
/// interior one-sided limit.
pub fn modal_reference(
    kernel: &KernelSpec,
    geometry: &Geometry,
    density: &Density,
    point: EvalPoint,
) -> Result<ReferenceValue> {
    let value = match (geometry, point) {
        (Geometry::Curve(curve), EvalPoint::Plane(x)) => {
            let radius = circle_radius(curve)?;
            if x.norm() > radius * (1.0 + 1e-12) {
                return Err(QbxError::Domain(
                    "modal reference point lies outside the circle".into(),
                ));
            }
            let modes = density.fourier_modes(radius).ok_or_else(|| {
                QbxError::Capability(format!("density {density} has no Fourier modes"))
            })?;
            let mut sum = Complex64::new(0.0, 0.0);
            for (c, n) in modes {
                sum += c * circle_mode(kernel, radius, n, x)?;
            }
            sum
        }
        (Geometry::Surface(surface), EvalPoint::Space(x)) => {
            let modes = density.harmonic_modes().ok_or_else(|| {
                QbxError::Capability(format!("density {density} has no harmonic modes"))
            })?;
            if norm3(x) > surface.radius * (1.0 + 1e-12) {
                return Err(QbxError::Domain(
                    "modal reference point lies outside the sphere".into(),
                ));
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for (c, l, m) in modes {
                sum += c * sphere_mode(kernel, surface.radius, l, m, x)?;
            }
            sum
        }
        _ => {
            return Err(QbxError::Domain(
                "evaluation point does not match the geometry".into(),
            ))
        }
    };
    Ok(ReferenceValue {
        value,
        method: ReferenceMethod::ModalClosedForm,
        estimated_error: 0.0,
        usable: true,
    })
}

/// Potential of the density `e^{in psi}` on the circle of radius `radius`.
fn circle_mode(kernel: &KernelSpec, radius: f64, n: i64, x: Complex64) -> Result<Complex64> {
    let a = n.unsigned_abs() as usize;
    let u = x / radius;
    let power = if n >= 0 {
        u.powu(a as u32)
    } else {
        u.conj().powu(a as u32)
    };
    Ok(match kernel.family {
        KernelFamily::Cauchy => {
            if n >= 0 {
                power
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        KernelFamily::LaplaceSlp => {
            if n == 0 {
                Complex64::new(radius * radius.ln(), 0.0)
            } else {
                -power * (radius / (2.0 * a as f64))
            }
        }
        KernelFamily::LaplaceDlp => {
            if n == 0 {
                Complex64::new(-1.0, 0.0)
            } else {
                -0.5 * power
            }
        }
        KernelFamily::HelmholtzSlp | KernelFamily::HelmholtzDlp => {
            let k = kernel.k;
            let (h, dh) = hankel1_with_derivative(a, k * radius)?;
            let j = if x.norm() > 0.0 {
                bessel_batch(a, k * x.norm())?.j_values[a]
            } else if a == 0 {
                1.0
            } else {
                0.0
            };
            let radial = if kernel.family == KernelFamily::HelmholtzSlp {
                h[a]
            } else {
                k * dh[a]
            };
            Complex64::new(0.0, PI * radius / 2.0)
                * j
                * radial
                * Complex64::from_polar(1.0, n as f64 * x.arg())
        }
    })
}

/// Potential of the density `Y_l^m` on the sphere of radius `radius`.
fn sphere_mode(kernel: &KernelSpec, radius: f64, l: usize, m: i64, x: Point3) -> Result<Complex64> {
    let k = kernel.k;
    let (h, dh) = match kernel.family {
        KernelFamily::HelmholtzSlp | KernelFamily::HelmholtzDlp => {
            spherical_hankel_with_derivative(l, k * radius)?
        }
        other => {
            return Err(QbxError::Capability(format!(
                "{other} has no 3D modal solution"
            )))
        }
    };
    let rho = norm3(x);
    let (theta, phi) = if rho > 0.0 {
        let (_, t, p) = spherical_coords(x);
        (t, p)
    } else {
        (0.0, PI / 2.0)
    };
    let j = spherical_j_values(l, k * rho)[l];
    let radial = if kernel.family == KernelFamily::HelmholtzSlp {
        h[l]
    } else {
        k * dh[l]
    };
    Ok(Complex64::new(0.0, k * radius * radius)
        * j
        * radial
        * sph_harm_table(l, theta, phi).value(l, m))
}

/// Parameter of the boundary point nearest to `x`.
fn nearest_parameter(curve: &ParametricCurve, x: Complex64) -> f64 {
    let dist = |t: f64| (curve.position(t) - x).norm_sqr();
    let samples = 1024;
    let step = TAU / samples as f64;
    let best = (0..samples)
        .map(|i| i as f64 * step)
        .min_by(|a, b| dist(*a).total_cmp(&dist(*b)))
        .unwrap_or(0.0);
    // golden-section refinement on the bracketing cell
    let (mut a, mut b) = (best - step, best + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if dist(c) < dist(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Layer potential at an off-surface point by adaptive quadrature of the
/// (smooth but possibly peaked) boundary integral.
pub fn direct_offsurface(
    kernel: &KernelSpec,
    geometry: &Geometry,
    density: &Density,
    point: EvalPoint,
    tol: f64,
) -> Result<ReferenceValue> {
    let (value, estimated_error) = match (geometry, point) {
        (Geometry::Curve(curve), EvalPoint::Plane(x)) => {
            direct_curve(kernel, curve, density, x, tol)?
        }
        (Geometry::Surface(surface), EvalPoint::Space(x)) => {
            direct_sphere(kernel, surface, density, x, tol)?
        }
        _ => {
            return Err(QbxError::Domain(
                "evaluation point does not match the geometry".into(),
            ))
        }
    };
    Ok(ReferenceValue {
        value,
        method: ReferenceMethod::AdaptiveDirect,
        estimated_error,
        usable: estimated_error <= tol * (1.0 + value.norm()),
    })
}

fn direct_curve(
    kernel: &KernelSpec,
    curve: &ParametricCurve,
    density: &Density,
    x: Complex64,
    tol: f64,
) -> Result<(Complex64, f64)> {
    let t_near = nearest_parameter(curve, x);
    if (curve.position(t_near) - x).norm() == 0.0 {
        return Err(QbxError::Domain(
            "direct evaluation point lies on the boundary".into(),
        ));
    }
    let k = kernel.k;
    // evaluation errors inside the integrand surface as NaN and are reported below
    let integrand = |t: f64| -> Complex64 {
        let (w, dw, _) = curve.jet(t);
        let phi = match density.on_curve(curve, t) {
            Ok(v) => v,
            Err(_) => return Complex64::new(f64::NAN, 0.0),
        };
        let d = w - x;
        let speed = dw.norm();
        match kernel.family {
            KernelFamily::Cauchy => phi * dw / d / Complex64::new(0.0, TAU),
            KernelFamily::LaplaceSlp => phi * d.norm().ln() * speed / TAU,
            KernelFamily::LaplaceDlp => -phi * (dw / d).im / TAU,
            KernelFamily::HelmholtzSlp | KernelFamily::HelmholtzDlp => {
                let Ok((h, _)) = hankel1_with_derivative(1, k * d.norm()) else {
                    return Complex64::new(f64::NAN, 0.0);
                };
                if kernel.family == KernelFamily::HelmholtzSlp {
                    Complex64::new(0.0, 0.25) * h[0] * phi * speed
                } else {
                    // n ds = -i w' dt; d/dn_y (i/4) H_0(k|y-x|) = -(i/4) k H_1 (n.d)/|d|
                    let n_dot_d = ((-Complex64::i() * dw) * d.conj()).re / speed;
                    Complex64::new(0.0, -0.25) * k * h[1] * n_dot_d / d.norm() * phi * speed
                }
            }
        }
    };
    adaptive_integrate_partition(integrand, &[t_near - PI, t_near, t_near + PI], tol)
        .and_then(|(v, e)| finite(v).map(|v| (v, e)))
}

fn finite(v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(QbxError::Numeric(
            "direct integral produced a non-finite value".into(),
        ))
    }
}

/// Nested adaptive quadrature over the sphere in a frame whose pole points
/// at the evaluation point, so the peak of the kernel sits at the pole.
fn direct_sphere(
    kernel: &KernelSpec,
    surface: &ParametricSurface,
    density: &Density,
    x: Point3,
    tol: f64,
) -> Result<(Complex64, f64)> {
    let k = kernel.k;
    let dlp = match kernel.family {
        KernelFamily::HelmholtzSlp => false,
        KernelFamily::HelmholtzDlp => true,
        other => {
            return Err(QbxError::Capability(format!(
                "{other} is not available on surfaces"
            )))
        }
    };
    let axis = if norm3(x) > 0.0 {
        scale3(1.0 / norm3(x), x)
    } else {
        [0.0, 0.0, 1.0]
    };
    let helper = if axis[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let e1 = normalize(cross(helper, axis));
    let e2 = cross(axis, e1);
    let radius = surface.radius;
    let point_value = |theta: f64, phi: f64| -> Complex64 {
        let d = omega(theta, phi);
        let dir = [
            d[0] * e1[0] + d[1] * e2[0] + d[2] * axis[0],
            d[0] * e1[1] + d[1] * e2[1] + d[2] * axis[1],
            d[0] * e1[2] + d[1] * e2[2] + d[2] * axis[2],
        ];
        let y = scale3(radius, dir);
        let (_, ts, ps) = spherical_coords(dir);
        let Ok(sigma) = density.on_sphere(ts, ps) else {
            return Complex64::new(f64::NAN, 0.0);
        };
        let diff = sub3(y, x);
        let dist = norm3(diff);
        let g = Complex64::from_polar(1.0 / (4.0 * PI * dist), k * dist);
        let kernel_value = if dlp {
            g * Complex64::new(-1.0 / dist, k) * dot3(dir, diff) / dist
        } else {
            g
        };
        kernel_value * sigma * radius * radius * phi.sin()
    };
    let inner_tol = 0.1 * tol;
    let outer = |phi: f64| -> Complex64 {
        match adaptive_integrate_partition(
            |theta| point_value(theta, phi),
            &[0.0, PI, TAU],
            inner_tol,
        ) {
            Ok((v, _)) => v,
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    };
    adaptive_integrate_partition(outer, &[0.0, 0.5 * PI, PI], tol)
        .and_then(|(v, e)| finite(v).map(|v| (v, e)))
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: Point3) -> Point3 {
    scale3(1.0 / norm3(a), a)
}

/// On-surface (interior or exterior one-sided) ground truth. Circles and
/// spheres with modal densities use the closed form; everything else uses
/// self-convergence of QBX itself, refined from `base` (the finest settings
/// under test) to `(N+2, r/2, 2M, q+2)` and `(N+4, r/4, 4M, q+4)`. The finer
/// level is the value; the difference between the two is the error estimate.
pub fn onsurface_reference(
    kernel: &KernelSpec,
    geometry: &Geometry,
    density: &Density,
    target: Target,
    tol: f64,
    base: &QbxParams,
) -> Result<ReferenceValue> {
    let modal_point = match (geometry, target) {
        (Geometry::Curve(curve), Target::Curve(t0))
            if circle_radius(curve).is_ok() && density.fourier_modes(1.0).is_some() =>
        {
            Some(EvalPoint::Plane(curve.position(t0)))
        }
        (Geometry::Surface(surface), Target::Surface(theta, phi))
            if density.harmonic_modes().is_some() =>
        {
            Some(EvalPoint::Space(surface.position(theta, phi)))
        }
        _ => None,
    };
    if let Some(point) = modal_point {
        if base.side == crate::geometry::Side::Interior {
            return modal_reference(kernel, geometry, density, point);
        }
    }
    let (coarse, fine) = (refine(base, 1)?, refine(base, 2)?);
    let v1 = eval_on_surface(kernel, geometry, density, target, &coarse)?;
    let v2 = eval_on_surface(kernel, geometry, density, target, &fine)?;
    let estimated_error = (v2 - v1).norm();
    Ok(ReferenceValue {
        value: v2,
        method: ReferenceMethod::SelfConvergence,
        estimated_error,
        usable: estimated_error <= tol,
    })
}

/// Refinement level `s` of `base`: `(N + 2s, r / 2^s, 2^s M, q + 2s)`, and a
/// sphere rule scaled by `2^s` per direction.
fn refine(base: &QbxParams, s: u32) -> Result<QbxParams> {
    let f = 1usize << s;
    let mut p = *base;
    p.order += 2 * s as usize;
    p.radius /= f as f64;
    p.panels *= f;
    if p.q > 0 {
        p.q += 2 * s as usize;
    }
    p.sphere_rule = (base.sphere_rule.0 * f, base.sphere_rule.1 * f);
    if p.panels > MAX_PANELS || p.q > MAX_GAUSS_ORDER || p.sphere_rule.0 > MAX_GAUSS_ORDER {
        return Err(QbxError::Capability(format!(
            "self-convergence level {s} exceeds the discretization caps (M = {}, q = {}, n_phi = {})",
            p.panels, p.q, p.sphere_rule.0
        )));
    }
    Ok(p)
}
