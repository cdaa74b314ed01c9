//! Helmholtz layer expansions: Fourier-Bessel (2D, via Graf's addition
//! theorem) and spherical-harmonic (3D).

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::{
    check_point_distance3, nodes_with_density, Center, Coefficients, Density, KernelFamily,
    KernelSpec, QbxExpansion,
};
use crate::error::{QbxError, Result};
use crate::geometry::{
    dot3, omega, spherical_coords, CenterPlacement, Panels, ParametricCurve, ParametricSurface,
    Point3, SurfacePlacement,
};
use crate::quadrature::{GaussRule, SphereRule};
use crate::special::{
    bessel_batch, hankel1_with_derivative, sph_harm_table, spherical_hankel_with_derivative,
    spherical_j_values,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Single,
    Double,
}

fn family(layer: Layer) -> KernelFamily {
    match layer {
        Layer::Single => KernelFamily::HelmholtzSlp,
        Layer::Double => KernelFamily::HelmholtzDlp,
    }
}

fn validate(k: f64, n: usize, layer: Layer) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(QbxError::Domain(format!(
            "Helmholtz expansions need k > 0, got {k}"
        )));
    }
    if layer == Layer::Double && n == 0 {
        return Err(QbxError::Domain(
            "the double-layer expansion needs N >= 1".into(),
        ));
    }
    Ok(())
}

/// `alpha_l`, `l = -N..=N`, with the `i/4` of `G_k = (i/4) H_0` folded in.
///
/// Single layer: `alpha_l = (i/4) \oint H_|l|(k rho) e^{-il psi} phi ds` with
/// `(rho, psi)` the polar coordinates of `y - x_c`. Double layer: the same
/// kernel factor differentiated along the outward normal at `y`.
#[allow(clippy::too_many_arguments)]
pub fn helmholtz2d_coeffs(
    curve: &ParametricCurve,
    density: &Density,
    placement: &CenterPlacement,
    n: usize,
    panels: &Panels,
    rule: &GaussRule,
    layer: Layer,
    k: f64,
) -> Result<QbxExpansion> {
    validate(k, n, layer)?;
    let (nodes, values) = nodes_with_density(
        curve,
        density,
        panels,
        rule,
        placement.center,
        placement.radius,
    )?;
    let ni = n as i64;
    let mut alpha = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for (node, &phi) in nodes.iter().zip(&values) {
        if phi == Complex64::new(0.0, 0.0) {
            continue;
        }
        let d = node.point - placement.center;
        let rho = d.norm();
        let radial = d / rho;
        let (h, dh) = hankel1_with_derivative(n, k * rho)?;
        let weight = phi * node.ds_weight();
        // unit normal components along e_rho and e_psi = i e_rho
        let normal = node.normal();
        let n_rho = (normal * radial.conj()).re;
        let n_psi = (normal * (Complex64::i() * radial).conj()).re;
        let rot = radial.conj(); // e^{-i psi}
        let mut phase = rot.powi(-(ni as i32)); // e^{iN psi}
        for l in -ni..=ni {
            let a = l.unsigned_abs() as usize;
            let factor = match layer {
                Layer::Single => h[a],
                Layer::Double => {
                    k * dh[a] * n_rho + Complex64::new(0.0, -(l as f64) / rho) * h[a] * n_psi
                }
            };
            alpha[(l + ni) as usize] += weight * factor * phase;
            phase *= rot;
        }
    }
    let scale = Complex64::new(0.0, 0.25);
    Ok(QbxExpansion {
        kernel: KernelSpec::new(family(layer), 2, k)?,
        center: Center::Plane(placement.center),
        radius: placement.radius,
        order: n,
        coefficients: Coefficients::FourierBessel(alpha.into_iter().map(|a| a * scale).collect()),
    })
}

/// `sum_l alpha_l J_|l|(k r) e^{il theta_0}`, over `l = -N..=N` for the single
/// layer and `l = 1-N..=N-1` for the double layer.
pub fn helmholtz2d_eval(expansion: &QbxExpansion, theta0: f64) -> Result<Complex64> {
    expansion.eval_offset(Complex64::from_polar(expansion.radius, theta0))
}

pub(crate) fn eval_fourier_bessel(
    expansion: &QbxExpansion,
    alpha: &[Complex64],
    z: Complex64,
) -> Result<Complex64> {
    let n = expansion.order as i64;
    let k = expansion.kernel.k;
    let span = match expansion.kernel.family {
        KernelFamily::HelmholtzSlp => n,
        KernelFamily::HelmholtzDlp => n - 1,
        other => {
            return Err(QbxError::Capability(format!(
                "{other} has no Fourier-Bessel expansion"
            )))
        }
    };
    let rho = z.norm();
    let j = if rho > 0.0 {
        bessel_batch(n as usize, k * rho)?.j_values
    } else {
        let mut j = vec![0.0; n as usize + 1];
        j[0] = 1.0;
        j
    };
    let theta = z.arg();
    let mut sum = Complex64::new(0.0, 0.0);
    for l in -span..=span {
        sum += alpha[(l + n) as usize]
            * j[l.unsigned_abs() as usize]
            * Complex64::from_polar(1.0, l as f64 * theta);
    }
    Ok(sum)
}

/// `alpha_lm`, `0 <= l <= N`, `|m| <= l`, with the `ik` of the spherical
/// addition formula folded in.
///
/// Single layer: `alpha_lm = ik \oint h_l(k rho) Y_l^{-m}(y - x_c) phi dS`.
/// Double layer: the kernel factor differentiated along the outward normal,
/// from its radial part `k h_l'` and the surface gradient of `Y_l^{-m}`.
pub fn helmholtz3d_coeffs(
    surface: &ParametricSurface,
    density: &Density,
    placement: &SurfacePlacement,
    n: usize,
    rule: &SphereRule,
    layer: Layer,
    k: f64,
) -> Result<QbxExpansion> {
    validate(k, n, layer)?;
    let r2 = surface.radius * surface.radius;
    let mut alpha = vec![Complex64::new(0.0, 0.0); (n + 1) * (n + 1)];
    for (index, &(theta, phi, w)) in rule.nodes.iter().enumerate() {
        let value = density.on_sphere(theta, phi)?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(QbxError::NonFinite {
                panel: index / rule.n_theta,
                node: index % rule.n_theta,
            });
        }
        let y = surface.position(theta, phi);
        check_point_distance3(y, placement.center, placement.radius, index)?;
        if value == Complex64::new(0.0, 0.0) {
            continue;
        }
        let v = [
            y[0] - placement.center[0],
            y[1] - placement.center[1],
            y[2] - placement.center[2],
        ];
        let (rho, tv, pv) = spherical_coords(v);
        let (h, dh) = spherical_hankel_with_derivative(n, k * rho)?;
        let table = sph_harm_table(n, tv, pv);
        let weight = value * w * r2;
        let normal = surface.normal(theta, phi);
        let (n_rho, n_theta, n_phi) = match layer {
            Layer::Single => (0.0, 0.0, 0.0),
            Layer::Double => {
                let e_theta: Point3 = [-tv.sin(), tv.cos(), 0.0];
                let e_phi: Point3 = [pv.cos() * tv.cos(), pv.cos() * tv.sin(), -pv.sin()];
                (
                    dot3(normal, omega(tv, pv)),
                    dot3(normal, e_theta),
                    dot3(normal, e_phi),
                )
            }
        };
        for l in 0..=n {
            for m in -(l as i64)..=(l as i64) {
                let y_conj = table.value(l, -m);
                let factor = match layer {
                    Layer::Single => h[l] * y_conj,
                    Layer::Double => {
                        let (g_theta, g_phi) = table.gradient(l, -m);
                        k * dh[l] * n_rho * y_conj
                            + h[l] / rho * (g_theta * n_theta + g_phi * n_phi)
                    }
                };
                alpha[((l * l + l) as i64 + m) as usize] += weight * factor;
            }
        }
    }
    let scale = Complex64::new(0.0, k);
    Ok(QbxExpansion {
        kernel: KernelSpec::new(family(layer), 3, k)?,
        center: Center::Space(placement.center),
        radius: placement.radius,
        order: n,
        coefficients: Coefficients::SphHarm(alpha.into_iter().map(|a| a * scale).collect()),
    })
}

/// `sum_l j_l(k r) sum_m alpha_lm Y_l^m(theta_0, phi_0)`.
pub fn helmholtz3d_eval(expansion: &QbxExpansion, theta0: f64, phi0: f64) -> Result<Complex64> {
    expansion.eval_offset3(crate::geometry::scale3(
        expansion.radius,
        omega(theta0, phi0),
    ))
}

pub(crate) fn eval_sph_harm(
    expansion: &QbxExpansion,
    alpha: &[Complex64],
    v: Point3,
) -> Result<Complex64> {
    let n = expansion.order;
    let (rho, theta, phi) = if v == [0.0; 3] {
        (0.0, 0.0, FRAC_PI_2)
    } else {
        spherical_coords(v)
    };
    let j = spherical_j_values(n, expansion.kernel.k * rho);
    let table = sph_harm_table(n, theta, phi);
    let mut sum = Complex64::new(0.0, 0.0);
    for l in 0..=n {
        let mut inner = Complex64::new(0.0, 0.0);
        for m in -(l as i64)..=(l as i64) {
            inner += alpha[((l * l + l) as i64 + m) as usize] * table.value(l, m);
        }
        sum += j[l] * inner;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use crate::geometry::{panelize, Side};
    use crate::quadrature::{adaptive_integrate, gauss_rule};
    use crate::special::{hankel1_batch, spherical_bessel_batch};

    fn origin_placement(curve: &ParametricCurve, r: f64) -> CenterPlacement {
        CenterPlacement {
            target: 0.0,
            target_point: curve.position(0.0),
            radius: r,
            center: Complex64::new(0.0, 0.0),
            side: Side::Interior,
        }
    }

    fn fb(e: &QbxExpansion) -> &[Complex64] {
        match &e.coefficients {
            Coefficients::FourierBessel(a) => a,
            _ => panic!(),
        }
    }

    #[test]
    fn modal_slp_coefficients_on_the_unit_circle() {
        let c = ParametricCurve::circle(1.0).unwrap();
        let p = panelize(&c, 32).unwrap();
        let q = gauss_rule(12).unwrap();
        let (n, k) = (3i64, 2.0);
        let e = helmholtz2d_coeffs(
            &c,
            &Density::Fourier(n),
            &origin_placement(&c, 0.9),
            5,
            &p,
            &q,
            Layer::Single,
            k,
        )
        .unwrap();
        assert_eq!(e.coefficient_count(), 11);
        let h = hankel1_batch(3, k).unwrap();
        for l in -5i64..=5 {
            let want = if l == n {
                Complex64::new(0.0, FRAC_PI_2) * h[3]
            } else {
                0.0.into()
            };
            assert!((fb(&e)[(l + 5) as usize] - want).norm() < 1e-11, "l={l}");
        }
        let zero = helmholtz2d_coeffs(
            &c,
            &Density::Zero,
            &origin_placement(&c, 0.9),
            5,
            &p,
            &q,
            Layer::Single,
            k,
        )
        .unwrap();
        assert!(fb(&zero).iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn dlp_constant_density_matches_direct_integral() {
        let c = ParametricCurve::circle(1.0).unwrap();
        let p = panelize(&c, 32).unwrap();
        let q = gauss_rule(12).unwrap();
        let k = 1.0;
        let e = helmholtz2d_coeffs(
            &c,
            &Density::Constant(1.0),
            &origin_placement(&c, 0.5),
            8,
            &p,
            &q,
            Layer::Double,
            k,
        )
        .unwrap();
        let h1 = hankel1_batch(1, k).unwrap()[1];
        let want = Complex64::new(0.0, 0.25) * 2.0 * PI * k * (-h1);
        assert!((fb(&e)[8] - want).norm() < 1e-12);
        let x = Complex64::from_polar(0.3, 0.8);
        let (direct, _) = adaptive_integrate(
            |t| {
                let y = Complex64::from_polar(1.0, t);
                let d = y - x;
                let h = hankel1_batch(1, k * d.norm()).unwrap()[1];
                // d/dn_y (i/4) H_0(k|y-x|) = -(i/4) k H_1 (n . d)/|d|, n = y
                Complex64::new(0.0, -0.25) * k * h * (y.conj() * d).re / d.norm()
            },
            0.0,
            2.0 * PI,
            1e-13,
        )
        .unwrap();
        assert!((e.eval_offset(x).unwrap() - direct).norm() < 1e-9);
    }

    #[test]
    fn dlp_normal_derivative_matches_finite_differences() {
        // alpha_l built from the analytic normal derivative equals a centered
        // difference of the single-layer kernel factor along n_y
        let k = 1.7;
        let center = Complex64::new(0.1, -0.2);
        let y = Complex64::new(0.9, 0.5);
        let normal = Complex64::from_polar(1.0, 0.3);
        let factor = |p: Complex64, l: i64| {
            let d = p - center;
            hankel1_batch(6, k * d.norm()).unwrap()[l.unsigned_abs() as usize]
                * Complex64::from_polar(1.0, -(l as f64) * d.arg())
        };
        let d = y - center;
        let (rho, radial) = (d.norm(), d / d.norm());
        let (h, dh) = hankel1_with_derivative(6, k * rho).unwrap();
        let n_rho = (normal * radial.conj()).re;
        let n_psi = (normal * (Complex64::i() * radial).conj()).re;
        for l in -5i64..=5 {
            let a = l.unsigned_abs() as usize;
            let analytic = (k * dh[a] * n_rho
                + Complex64::new(0.0, -(l as f64) / rho) * h[a] * n_psi)
                * Complex64::from_polar(1.0, -(l as f64) * d.arg());
            let step = 1e-5;
            let fd = (factor(y + step * normal, l) - factor(y - step * normal, l)) / (2.0 * step);
            assert!(
                (analytic - fd).norm() < 1e-8 * analytic.norm().max(1.0),
                "l={l}"
            );
        }
    }

    #[test]
    fn eval_examples() {
        let mut e = QbxExpansion {
            kernel: KernelSpec::new(KernelFamily::HelmholtzSlp, 2, 2.0).unwrap(),
            center: Center::Plane(0.0.into()),
            radius: 0.5,
            order: 2,
            coefficients: Coefficients::FourierBessel(vec![
                0.0.into(),
                0.0.into(),
                1.0.into(),
                0.0.into(),
                0.0.into(),
            ]),
        };
        assert!((helmholtz2d_eval(&e, 1.0).unwrap() - 0.7651976865579666).norm() < 1e-14);
        e.coefficients = Coefficients::FourierBessel(vec![0.0.into(); 5]);
        assert_eq!(helmholtz2d_eval(&e, 1.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dlp_truncation_drops_the_outer_orders() {
        let mut alpha = vec![Complex64::new(0.0, 0.0); 7];
        alpha[0] = 1.0.into();
        alpha[6] = 1.0.into();
        let e = QbxExpansion {
            kernel: KernelSpec::new(KernelFamily::HelmholtzDlp, 2, 1.0).unwrap(),
            center: Center::Plane(0.0.into()),
            radius: 0.5,
            order: 3,
            coefficients: Coefficients::FourierBessel(alpha),
        };
        assert_eq!(helmholtz2d_eval(&e, 0.3).unwrap(), Complex64::new(0.0, 0.0));
    }

    fn sphere_placement(r: f64) -> SurfacePlacement {
        SurfacePlacement {
            target: (0.0, FRAC_PI_2),
            target_point: [1.0, 0.0, 0.0],
            radius: r,
            center: [0.0, 0.0, 0.0],
            side: Side::Interior,
        }
    }

    #[test]
    fn modal_sphere_coefficients() {
        let s = ParametricSurface::sphere(1.0).unwrap();
        let rule = SphereRule::new(16, 32).unwrap();
        let k = 1.3;
        let e = helmholtz3d_coeffs(
            &s,
            &Density::SphericalHarmonic { l: 3, m: -2 },
            &sphere_placement(0.9),
            5,
            &rule,
            Layer::Single,
            k,
        )
        .unwrap();
        let Coefficients::SphHarm(alpha) = &e.coefficients else {
            panic!()
        };
        assert_eq!(alpha.len(), 36);
        let (_, h) = spherical_bessel_batch(3, k).unwrap();
        for l in 0..=5usize {
            for m in -(l as i64)..=(l as i64) {
                let want = if (l, m) == (3, -2) {
                    Complex64::new(0.0, k) * h[3]
                } else {
                    0.0.into()
                };
                assert!(
                    (alpha[((l * l + l) as i64 + m) as usize] - want).norm() < 1e-11,
                    "l={l} m={m}"
                );
            }
        }
    }

    #[test]
    fn unit_density_on_the_unit_sphere_at_the_center() {
        let s = ParametricSurface::sphere(1.0).unwrap();
        let rule = SphereRule::new(12, 24).unwrap();
        let e = helmholtz3d_coeffs(
            &s,
            &Density::Constant(1.0),
            &sphere_placement(0.5),
            3,
            &rule,
            Layer::Single,
            1.0,
        )
        .unwrap();
        let v = e.eval_offset3([0.0, 0.0, 0.0]).unwrap();
        assert!((v - Complex64::from_polar(1.0, 1.0)).norm() < 1e-12);
        // brute force: e^{ik|y|}/(4 pi |y|) integrated over the unit sphere
        let direct = crate::quadrature::sphere_integrate(&s, &rule, |_, _| {
            Complex64::from_polar(1.0 / (4.0 * PI), 1.0)
        })
        .unwrap();
        assert!((v - direct).norm() < 1e-12);

        let mut e = e;
        e.coefficients = Coefficients::SphHarm(vec![0.0.into(); 16]);
        assert_eq!(
            helmholtz3d_eval(&e, 0.2, 0.3).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let mut alpha = vec![Complex64::new(0.0, 0.0); 16];
        alpha[0] = 1.0.into();
        e.coefficients = Coefficients::SphHarm(alpha);
        e.radius = 1e-9;
        assert!((helmholtz3d_eval(&e, 0.2, 0.3).unwrap() - 0.28209479177387814).norm() < 1e-12);
    }

    #[test]
    fn dlp_sphere_normal_derivative_matches_finite_differences() {
        use crate::special::spherical_bessel_batch;
        let k = 1.1;
        let center: Point3 = [0.1, -0.2, 0.15];
        let y: Point3 = [0.4, 0.7, -0.5];
        let normal = {
            let v = [0.3, 0.5, -0.4];
            let n = dot3(v, v).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        };
        let factor = |p: Point3, l: usize, m: i64| {
            let v = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
            let (rho, t, f) = spherical_coords(v);
            let (_, h) = spherical_bessel_batch(6, k * rho).unwrap();
            h[l] * sph_harm_table(6, t, f).value(l, -m)
        };
        let v = [y[0] - center[0], y[1] - center[1], y[2] - center[2]];
        let (rho, tv, pv) = spherical_coords(v);
        let (h, dh) = spherical_hankel_with_derivative(6, k * rho).unwrap();
        let table = sph_harm_table(6, tv, pv);
        let e_theta: Point3 = [-tv.sin(), tv.cos(), 0.0];
        let e_phi: Point3 = [pv.cos() * tv.cos(), pv.cos() * tv.sin(), -pv.sin()];
        for l in 0..=5usize {
            for m in -(l as i64)..=(l as i64) {
                let (gt, gp) = table.gradient(l, -m);
                let analytic = k * dh[l] * dot3(normal, omega(tv, pv)) * table.value(l, -m)
                    + h[l] / rho * (gt * dot3(normal, e_theta) + gp * dot3(normal, e_phi));
                let s = 1e-5;
                let plus = [
                    y[0] + s * normal[0],
                    y[1] + s * normal[1],
                    y[2] + s * normal[2],
                ];
                let minus = [
                    y[0] - s * normal[0],
                    y[1] - s * normal[1],
                    y[2] - s * normal[2],
                ];
                let fd = (factor(plus, l, m) - factor(minus, l, m)) / (2.0 * s);
                assert!(
                    (analytic - fd).norm() < 1e-7 * analytic.norm().max(1.0),
                    "l={l} m={m}"
                );
            }
        }
    }
}
