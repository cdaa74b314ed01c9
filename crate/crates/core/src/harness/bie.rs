//! Interior Dirichlet problem for the Laplace equation, solved with a
//! second-kind double-layer equation whose on-surface operator is applied by
//! QBX.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QbxError, Result};
use crate::expansion::{laplace_dlp_target_weights, Density};
use crate::geometry::{panelize, place_center, ParametricCurve, Side, CURVATURE_SAFETY};
use crate::quadrature::{curve_nodes, gauss_rule, CurveNode};

/// Expansion radius used at each node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BieRadius {
    Fixed(f64),
    /// Four times the mean panel arc length.
    FourH,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BieParams {
    pub order: usize,
    pub panels: usize,
    pub q: usize,
    pub radius: BieRadius,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BieReport {
    /// `max |u - u_exact|` over the interior probes.
    pub interior_error: f64,
    /// `max |A mu - f|` over the nodes after the solve.
    pub boundary_residual: f64,
    pub unknowns: usize,
    pub probes: usize,
    /// Smallest expansion radius used after the curvature clamp.
    pub min_radius: f64,
}

/// Harmonic function inside the curve whose boundary values are `data`.
fn harmonic_extension(data: &Density, z: Complex64) -> Result<f64> {
    match *data {
        Density::Zero => Ok(0.0),
        Density::Constant(c) => Ok(c),
        Density::RealPower(n) => Ok(z.powu(n).re),
        ref other => Err(QbxError::Domain(format!(
            "boundary data {other} has no known harmonic extension; use zero, constant or repower"
        ))),
    }
}

/// Solves `u = D mu` with `D_-[mu] = f` on the boundary: the interior
/// one-sided QBX value at every node gives one row of the system, which
/// therefore carries the `-mu/2` jump. The field is then evaluated at probes
/// well inside the curve by plain quadrature and compared with the exact
/// harmonic extension of the data.
pub fn demo_bie(
    curve: &ParametricCurve,
    k: f64,
    data: &Density,
    params: &BieParams,
) -> Result<BieReport> {
    if k != 0.0 {
        return Err(QbxError::Capability(format!(
            "the integral-equation demo is Laplace only (k = 0), got k = {k}"
        )));
    }
    let panels = panelize(curve, params.panels)?;
    let rule = gauss_rule(params.q)?;
    let nodes = curve_nodes(curve, &panels, &rule)?;
    let nominal = match params.radius {
        BieRadius::Fixed(r) => r,
        BieRadius::FourH => 4.0 * panels.h,
    };
    let n = nodes.len();
    let mut matrix = DMatrix::<f64>::zeros(n, n);
    let mut min_radius = f64::INFINITY;
    for (i, node) in nodes.iter().enumerate() {
        let r = clamped_radius(curve, node.t, nominal);
        min_radius = min_radius.min(r);
        let placement = place_center(curve, node.t, r, Side::Interior)?;
        let row = laplace_dlp_target_weights(&nodes, &placement, params.order)?;
        for (j, w) in row.into_iter().enumerate() {
            matrix[(i, j)] = w;
        }
    }
    let rhs = nodes
        .iter()
        .map(|node| harmonic_extension(data, node.point))
        .collect::<Result<Vec<f64>>>()?;
    let rhs = DVector::from_vec(rhs);
    let mu = matrix
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| QbxError::Numeric("the double-layer system is singular".into()))?;
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(QbxError::Numeric(
            "the double-layer solve produced non-finite values".into(),
        ));
    }
    let boundary_residual = (&matrix * &mu - &rhs).amax();

    let d_min = (0..720)
        .map(|i| curve.position(i as f64 * TAU / 720.0).norm())
        .fold(f64::INFINITY, f64::min);
    let mut probes = vec![Complex64::new(0.0, 0.0)];
    for frac in [0.25, 0.5] {
        for a in 0..8 {
            probes.push(Complex64::from_polar(
                frac * d_min,
                a as f64 * TAU / 8.0 + 0.1,
            ));
        }
    }
    let mut interior_error: f64 = 0.0;
    for &x in &probes {
        let u = double_layer(&nodes, mu.as_slice(), x);
        interior_error = interior_error.max((u - harmonic_extension(data, x)?).abs());
    }
    Ok(BieReport {
        interior_error,
        boundary_residual,
        unknowns: n,
        probes: probes.len(),
        min_radius,
    })
}

/// Largest radius up to `nominal` that meets the curvature bound at `t`. The
/// bound depends on the radius through the neighbourhood it inspects, so a
/// few shrink steps are needed.
fn clamped_radius(curve: &ParametricCurve, t: f64, nominal: f64) -> f64 {
    let mut r = nominal;
    for _ in 0..20 {
        let bound = CURVATURE_SAFETY / curve.local_max_curvature(t, r);
        if r <= bound {
            break;
        }
        r = 0.999 * bound;
    }
    r
}

/// Smooth-quadrature double layer at an off-surface point.
fn double_layer(nodes: &[CurveNode], mu: &[f64], x: Complex64) -> f64 {
    nodes
        .iter()
        .zip(mu)
        .map(|(node, m)| -(node.tangent / (node.point - x)).im * node.dt_weight / TAU * m)
        .sum()
}
