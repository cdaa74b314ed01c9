//! Cauchy and harmonic (Laplace) layer expansions in the plane.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{
    check_node_distance, nodes_with_density, Center, Coefficients, Density, KernelSpec,
    QbxExpansion,
};
use crate::error::{QbxError, Result};
use crate::geometry::{CenterPlacement, Panels, ParametricCurve};
use crate::quadrature::{CurveNode, GaussRule};

/// `sum_j a_j z^j` by Horner's rule.
pub(crate) fn horner(a: &[Complex64], z: Complex64) -> Complex64 {
    a.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `sum_n phi_n w'_n dt_n / (w_n - x_c)^{j+1}` for `j = 0..=n`.
fn inverse_power_moments(
    nodes: &[CurveNode],
    values: &[Complex64],
    center: Complex64,
    n: usize,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for (node, &phi) in nodes.iter().zip(values) {
        let inv = 1.0 / (node.point - center);
        let mut term = phi * node.tangent * node.dt_weight * inv;
        for slot in out.iter_mut() {
            *slot += term;
            term *= inv;
        }
    }
    out
}

fn offset(placement: &CenterPlacement) -> Complex64 {
    placement.target_point - placement.center
}

fn require_real(values: &[Complex64], what: &str) -> Result<()> {
    if values.iter().any(|v| v.im != 0.0) {
        return Err(QbxError::Domain(format!(
            "{what} requires a real-valued density"
        )));
    }
    Ok(())
}

/// Taylor coefficients `a_j = (1/2 pi i) \oint phi w' dt / (w - x_c)^{j+1}`.
pub fn cauchy_coeffs(
    curve: &ParametricCurve,
    density: &Density,
    placement: &CenterPlacement,
    n: usize,
    panels: &Panels,
    rule: &GaussRule,
) -> Result<QbxExpansion> {
    let (nodes, values) = nodes_with_density(
        curve,
        density,
        panels,
        rule,
        placement.center,
        placement.radius,
    )?;
    let scale = 1.0 / Complex64::new(0.0, TAU);
    let a = inverse_power_moments(&nodes, &values, placement.center, n)
        .into_iter()
        .map(|m| m * scale)
        .collect();
    Ok(QbxExpansion {
        kernel: KernelSpec::cauchy(),
        center: Center::Plane(placement.center),
        radius: placement.radius,
        order: n,
        coefficients: Coefficients::Taylor(a),
    })
}

/// `sum_j a_j (r e^{i theta_0})^j`.
pub fn cauchy_eval(expansion: &QbxExpansion, theta0: f64) -> Result<Complex64> {
    expect_family(expansion, super::KernelFamily::Cauchy)?;
    expansion.eval_offset(Complex64::from_polar(expansion.radius, theta0))
}

/// `A_0 = (1/2 pi) \oint phi ln|w - x_c| ds` and
/// `a_j = (1/2 pi) \oint phi ds / (j (w - x_c)^j)`, evaluated as
/// `A_0 - Re sum_j a_j z^j`.
pub fn laplace_slp_coeffs(
    curve: &ParametricCurve,
    density: &Density,
    placement: &CenterPlacement,
    n: usize,
    panels: &Panels,
    rule: &GaussRule,
) -> Result<QbxExpansion> {
    let (nodes, values) = nodes_with_density(
        curve,
        density,
        panels,
        rule,
        placement.center,
        placement.radius,
    )?;
    require_real(&values, "the Laplace single layer")?;
    let mut a0 = 0.0;
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    for (node, phi) in nodes.iter().zip(&values) {
        let d = node.point - placement.center;
        let w = phi.re * node.ds_weight();
        a0 += w * d.norm().ln();
        let inv = 1.0 / d;
        let mut power = inv;
        for (j, slot) in a.iter_mut().enumerate() {
            *slot += w * power / (j + 1) as f64;
            power *= inv;
        }
    }
    let a = a.into_iter().map(|v| v / TAU).collect();
    Ok(QbxExpansion {
        kernel: KernelSpec::laplace_slp(),
        center: Center::Plane(placement.center),
        radius: placement.radius,
        order: n,
        coefficients: Coefficients::LogSeries { a0: a0 / TAU, a },
    })
}

pub fn laplace_slp_eval(expansion: &QbxExpansion, theta0: f64) -> Result<f64> {
    expect_family(expansion, super::KernelFamily::LaplaceSlp)?;
    Ok(expansion
        .eval_offset(Complex64::from_polar(expansion.radius, theta0))?
        .re)
}

/// `b_j = (1/2 pi) \oint phi w' dt / (w - x_c)^{j+1}`, evaluated as
/// `-Im sum_j b_j z^j` (unit density gives -1 inside).
pub fn laplace_dlp_coeffs(
    curve: &ParametricCurve,
    density: &Density,
    placement: &CenterPlacement,
    n: usize,
    panels: &Panels,
    rule: &GaussRule,
) -> Result<QbxExpansion> {
    let (nodes, values) = nodes_with_density(
        curve,
        density,
        panels,
        rule,
        placement.center,
        placement.radius,
    )?;
    require_real(&values, "the Laplace double layer")?;
    let b = inverse_power_moments(&nodes, &values, placement.center, n)
        .into_iter()
        .map(|m| m / TAU)
        .collect();
    Ok(QbxExpansion {
        kernel: KernelSpec::laplace_dlp(),
        center: Center::Plane(placement.center),
        radius: placement.radius,
        order: n,
        coefficients: Coefficients::Taylor(b),
    })
}

pub fn laplace_dlp_eval(expansion: &QbxExpansion, theta0: f64) -> Result<f64> {
    expect_family(expansion, super::KernelFamily::LaplaceDlp)?;
    Ok(expansion
        .eval_offset(Complex64::from_polar(expansion.radius, theta0))?
        .re)
}

/// Weights `W_n` with `v_N(x_0) = sum_n W_n phi_n` for real node densities
/// `phi_n`: one row of the QBX double-layer matrix.
pub fn laplace_dlp_target_weights(
    nodes: &[CurveNode],
    placement: &CenterPlacement,
    n: usize,
) -> Result<Vec<f64>> {
    check_node_distance(nodes, placement.center, placement.radius)?;
    let z = offset(placement);
    Ok(nodes
        .iter()
        .map(|node| {
            let inv = 1.0 / (node.point - placement.center);
            // sum_j (z inv)^j, times inv
            let ratio = z * inv;
            let mut power = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for _ in 0..=n {
                sum += power;
                power *= ratio;
            }
            -(sum * inv * node.tangent * node.dt_weight / TAU).im
        })
        .collect())
}

fn expect_family(expansion: &QbxExpansion, family: super::KernelFamily) -> Result<()> {
    if expansion.kernel.family != family {
        return Err(QbxError::Capability(format!(
            "expected a {family} expansion, got {}",
            expansion.kernel.family
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{panelize, place_center, Side};
    use crate::quadrature::{adaptive_integrate, curve_nodes, gauss_rule};

    fn at_origin(curve: &ParametricCurve, r: f64) -> CenterPlacement {
        // a center at the origin of a circle, with the ball radius chosen freely
        CenterPlacement {
            target: 0.0,
            target_point: curve.position(0.0),
            radius: r,
            center: Complex64::new(0.0, 0.0),
            side: Side::Interior,
        }
    }

    fn setup(radius: f64) -> (ParametricCurve, Panels, GaussRule) {
        let c = ParametricCurve::circle(radius).unwrap();
        let p = panelize(&c, 16).unwrap();
        (c, p, gauss_rule(12).unwrap())
    }

    fn taylor(e: &QbxExpansion) -> &[Complex64] {
        match &e.coefficients {
            Coefficients::Taylor(a) => a,
            _ => panic!("not a Taylor expansion"),
        }
    }

    #[test]
    fn cauchy_examples_on_the_unit_circle() {
        let (c, p, q) = setup(1.0);
        let pl = at_origin(&c, 0.5);
        let e = cauchy_coeffs(&c, &Density::Constant(1.0), &pl, 6, &p, &q).unwrap();
        assert_eq!(e.coefficient_count(), 7);
        for (j, a) in taylor(&e).iter().enumerate() {
            let want = if j == 0 { 1.0 } else { 0.0 };
            assert!((a - want).norm() < 1e-12, "j={j}");
        }
        let e = cauchy_coeffs(&c, &Density::BoundaryPower(2), &pl, 6, &p, &q).unwrap();
        for (j, a) in taylor(&e).iter().enumerate() {
            let want = if j == 2 { 1.0 } else { 0.0 };
            assert!((a - want).norm() < 1e-12, "j={j}");
        }
        // e^{-it} has no interior holomorphic part
        let e = cauchy_coeffs(&c, &Density::Fourier(-1), &pl, 6, &p, &q).unwrap();
        assert!(taylor(&e).iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn anti_holomorphic_coefficients_vanish_by_brute_force() {
        for j in 0..5 {
            let (v, _) = adaptive_integrate(
                |t| {
                    let w = Complex64::from_polar(1.0, t);
                    Complex64::from_polar(1.0, -t) * Complex64::i() * w
                        / w.powu(j + 1)
                        / Complex64::new(0.0, TAU)
                },
                0.0,
                TAU,
                1e-14,
            )
            .unwrap();
            assert!(v.norm() < 1e-13);
        }
    }

    #[test]
    fn cauchy_eval_examples() {
        let mut e = QbxExpansion {
            kernel: KernelSpec::cauchy(),
            center: Center::Plane(0.0.into()),
            radius: 0.7,
            order: 3,
            coefficients: Coefficients::Taylor(vec![
                1.0.into(),
                0.0.into(),
                0.0.into(),
                0.0.into(),
            ]),
        };
        assert!((cauchy_eval(&e, 2.1).unwrap() - 1.0).norm() < 1e-15);
        e.radius = 0.5;
        e.coefficients = Coefficients::Taylor(vec![0.0.into(), 1.0.into()]);
        assert!(
            (cauchy_eval(&e, std::f64::consts::FRAC_PI_2).unwrap() - Complex64::new(0.0, 0.5))
                .norm()
                < 1e-15
        );

        // z^3 about 0.5, evaluated at the boundary point 1
        let c = ParametricCurve::circle(1.0).unwrap();
        let pl = place_center(&c, 0.0, 0.5, Side::Interior).unwrap();
        let p = panelize(&c, 32).unwrap();
        let e = cauchy_coeffs(
            &c,
            &Density::BoundaryPower(3),
            &pl,
            5,
            &p,
            &gauss_rule(10).unwrap(),
        )
        .unwrap();
        // binomial expansion of (0.5 + z)^3
        let want = [0.125, 0.75, 1.5, 1.0, 0.0, 0.0];
        for (a, w) in taylor(&e).iter().zip(want) {
            assert!((a - w).norm() < 1e-11);
        }
        assert!((cauchy_eval(&e, pl.target_angle()).unwrap() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn laplace_slp_examples() {
        let (c, p, q) = setup(1.0);
        let e = laplace_slp_coeffs(&c, &Density::Constant(1.0), &at_origin(&c, 0.9), 5, &p, &q)
            .unwrap();
        let Coefficients::LogSeries { a0, a } = &e.coefficients else {
            panic!()
        };
        assert!(a0.abs() < 1e-13);
        assert!(a.iter().all(|v| v.norm() < 1e-13));
        for z in [0.0, 0.3, -0.5] {
            assert!(e.eval_offset(Complex64::new(z, 0.2)).unwrap().norm() < 1e-13);
        }

        let (c2, p2, q2) = setup(2.0);
        let e = laplace_slp_coeffs(
            &c2,
            &Density::Constant(1.0),
            &at_origin(&c2, 1.0),
            4,
            &p2,
            &q2,
        )
        .unwrap();
        let Coefficients::LogSeries { a0, .. } = &e.coefficients else {
            panic!()
        };
        let (direct, _) = adaptive_integrate(
            |_| Complex64::new(2.0 * 2f64.ln() / TAU, 0.0),
            0.0,
            TAU,
            1e-14,
        )
        .unwrap();
        assert!((a0 - direct.re).abs() < 1e-12);
        assert!((a0 - 2.0 * 2f64.ln()).abs() < 1e-12);

        // cos t: ln|e^{it} - z| = -Re sum z^j e^{-ijt}/j gives u = -Re(z)/2
        let e =
            laplace_slp_coeffs(&c, &Density::Cosine(1), &at_origin(&c, 0.9), 5, &p, &q).unwrap();
        let Coefficients::LogSeries { a, .. } = &e.coefficients else {
            panic!()
        };
        assert!((a[0] - 0.5).norm() < 1e-13);
        assert!(a[1..].iter().all(|v| v.norm() < 1e-13));
        let z = Complex64::new(0.3, 0.0);
        let (oracle, _) = adaptive_integrate(
            |t| ((Complex64::from_polar(1.0, t) - z).norm().ln() * t.cos() / TAU).into(),
            0.0,
            TAU,
            1e-14,
        )
        .unwrap();
        let v = e.eval_offset(z).unwrap();
        assert!((v.re + 0.15).abs() < 1e-13);
        assert!((v.re - oracle.re).abs() < 1e-12);
    }

    #[test]
    fn laplace_dlp_examples() {
        let (c, p, q) = setup(1.0);
        let e = laplace_dlp_coeffs(&c, &Density::Constant(1.0), &at_origin(&c, 0.9), 4, &p, &q)
            .unwrap();
        let z = Complex64::new(0.3, 0.1);
        assert!((e.eval_offset(z).unwrap() + 1.0).norm() < 1e-12);
        // brute force of the kernel -Im[w'/(w - z)]/(2 pi)
        let (oracle, _) = adaptive_integrate(
            |t| {
                let w = Complex64::from_polar(1.0, t);
                (-(Complex64::i() * w / (w - z)).im / TAU).into()
            },
            0.0,
            TAU,
            1e-14,
        )
        .unwrap();
        assert!((oracle.re + 1.0).abs() < 1e-12);

        let single = QbxExpansion {
            kernel: KernelSpec::laplace_dlp(),
            center: Center::Plane(0.0.into()),
            radius: 0.37,
            order: 0,
            coefficients: Coefficients::Taylor(vec![Complex64::i()]),
        };
        assert!((laplace_dlp_eval(&single, 0.0).unwrap() + 1.0).abs() < 1e-15);

        let e = laplace_dlp_coeffs(&c, &Density::Sine(1), &at_origin(&c, 0.9), 4, &p, &q).unwrap();
        let z = Complex64::from_polar(0.2, std::f64::consts::FRAC_PI_3);
        let (oracle, _) = adaptive_integrate(
            |t| {
                let w = Complex64::from_polar(1.0, t);
                (-(Complex64::i() * w / (w - z)).im * t.sin() / TAU).into()
            },
            0.0,
            TAU,
            1e-14,
        )
        .unwrap();
        assert!((e.eval_offset(z).unwrap().re - oracle.re).abs() < 1e-10);
    }

    #[test]
    fn laplace_families_reject_complex_densities() {
        let (c, p, q) = setup(1.0);
        assert!(
            laplace_slp_coeffs(&c, &Density::Fourier(2), &at_origin(&c, 0.5), 3, &p, &q).is_err()
        );
        assert!(
            laplace_dlp_coeffs(&c, &Density::Fourier(2), &at_origin(&c, 0.5), 3, &p, &q).is_err()
        );
    }

    #[test]
    fn node_inside_ball_is_a_geometry_error() {
        let (c, p, q) = setup(1.0);
        let err =
            cauchy_coeffs(&c, &Density::Constant(1.0), &at_origin(&c, 1.5), 3, &p, &q).unwrap_err();
        assert!(matches!(err, QbxError::Geometry(_)));
    }

    #[test]
    fn target_weights_reproduce_the_expansion() {
        let c = ParametricCurve::starfish(1.0, 0.2, 3).unwrap();
        let p = panelize(&c, 24).unwrap();
        let q = gauss_rule(8).unwrap();
        let pl = place_center(&c, 0.9, 0.05, Side::Interior).unwrap();
        let d = Density::Cosine(2);
        let e = laplace_dlp_coeffs(&c, &d, &pl, 5, &p, &q).unwrap();
        let nodes = curve_nodes(&c, &p, &q).unwrap();
        let w = laplace_dlp_target_weights(&nodes, &pl, 5).unwrap();
        let via_weights: f64 = nodes
            .iter()
            .zip(&w)
            .map(|(n, w)| w * (2.0 * n.t).cos())
            .sum();
        let direct = laplace_dlp_eval(&e, pl.target_angle()).unwrap();
        assert!((via_weights - direct).abs() < 1e-12);
    }
}
