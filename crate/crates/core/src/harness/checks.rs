//! Invariant suites shared by the `selftest` subcommand and the acceptance
//! run. Each check reports its worst residual against a fixed tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::expansion::{eval_on_surface, Density, Geometry, KernelSpec, Layer, QbxParams, Target};
use crate::geometry::{ParametricCurve, ParametricSurface, Side};
use crate::quadrature::SphereRule;
use crate::reference::{direct_offsurface, modal_reference, EvalPoint};
use crate::special::{bessel_batch, sph_harm_table, SphHarmTable};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Worst relative Wronskian residual `J_{n+1} Y_n - J_n Y_{n+1} = 2/(pi x)`
/// over `n <= n_max` and a logarithmic grid of `x` in `[0.1, 50]`.
pub fn wronskian_residual(n_max: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..=200 {
        let x = 0.1 * 500f64.powf(i as f64 / 200.0);
        let b = bessel_batch(n_max + 1, x)?;
        let want = 2.0 / (PI * x);
        for n in 0..=n_max {
            let w = b.j_values[n + 1] * b.y_values[n] - b.j_values[n] * b.y_values[n + 1];
            worst = worst.max((w - want).abs() / want);
        }
    }
    Ok(worst)
}

/// Worst `|sum_m |Y_l^m|^2 - (2l+1)/(4 pi)|` over `l <= l_max` at `points`
/// random directions.
pub fn sum_rule_residual(l_max: usize, points: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let theta = rng.gen_range(0.0..2.0 * PI);
        let phi = rng.gen::<f64>().mul_add(2.0, -1.0).acos();
        let t = sph_harm_table(l_max, theta, phi);
        for l in 0..=l_max {
            let li = l as i64;
            let s: f64 = (-li..=li).map(|m| t.value(l, m).norm_sqr()).sum();
            worst = worst.max((s - (2 * l + 1) as f64 / (4.0 * PI)).abs());
        }
    }
    worst
}

/// Worst residual of the ladder identities
/// `L_+ Y_l^m = s_+ sqrt((l-m)(l+m+1)) Y_l^{m+1}` and
/// `L_- Y_l^m = s_- sqrt((l+m)(l-m+1)) Y_l^{m-1}`, where
/// `L_+- = e^{+-i theta}[d_phi +- i cot(phi) d_theta]`, for `l <= l_max` and
/// `phi` in `[0.2, pi - 0.2]`.
///
/// Without the Condon-Shortley phase the signs are `s_+ = -1` for `m >= 0`
/// (`+1` for `m < 0`) and `s_- = +1` for `m >= 1` (`-1` for `m <= 0`).
pub fn ladder_residual(l_max: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..7 {
        for j in 0..9 {
            let phi = 0.2 + (PI - 0.4) * i as f64 / 6.0;
            let theta = 0.3 + 0.7 * j as f64;
            let t = sph_harm_table(l_max + 1, theta, phi);
            let cot = phi.cos() / phi.sin();
            for l in 0..=l_max {
                let li = l as i64;
                for m in -li..=li {
                    worst = worst.max(ladder_at(&t, l, m, theta, cot));
                }
            }
        }
    }
    worst
}

fn ladder_at(t: &SphHarmTable, l: usize, m: i64, theta: f64, cot: f64) -> f64 {
    let i = Complex64::i();
    let li = l as i64;
    let up = Complex64::from_polar(1.0, theta) * (t.d_phi(l, m) + i * cot * t.d_theta(l, m));
    let down = Complex64::from_polar(1.0, -theta) * (t.d_phi(l, m) - i * cot * t.d_theta(l, m));
    let c_up = (((li - m) * (li + m + 1)) as f64).sqrt();
    let c_down = (((li + m) * (li - m + 1)) as f64).sqrt();
    let s_up = if m >= 0 { -1.0 } else { 1.0 };
    let s_down = if m >= 1 { 1.0 } else { -1.0 };
    let want_up = if m < li {
        s_up * c_up * t.value(l, m + 1)
    } else {
        Complex64::new(0.0, 0.0)
    };
    let want_down = if m > -li {
        s_down * c_down * t.value(l, m - 1)
    } else {
        Complex64::new(0.0, 0.0)
    };
    (up - want_up).norm().max((down - want_down).norm())
}

/// Worst `|int Y_l^m conj(Y_l'^m') dS - delta|` for `l, l' <= l_max` under
/// the standard tensor rule.
pub fn orthonormality_residual(l_max: usize, rule: &SphereRule) -> Result<f64> {
    // Gram matrix accumulated node by node; same sum as `sphere_integrate`.
    let count = (l_max + 1) * (l_max + 1);
    let mut gram = vec![Complex64::new(0.0, 0.0); count * count];
    for &(theta, phi, w) in &rule.nodes {
        let t = sph_harm_table(l_max, theta, phi);
        let y: Vec<Complex64> = (0..count)
            .map(|i| {
                let (l, m) = split_index(i);
                t.value(l, m)
            })
            .collect();
        for a in 0..count {
            for b in a..count {
                gram[a * count + b] += y[a] * y[b].conj() * w;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for a in 0..count {
        for b in a..count {
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((gram[a * count + b] - want).norm());
        }
    }
    Ok(worst)
}

fn split_index(i: usize) -> (usize, i64) {
    let l = (i as f64).sqrt().floor() as usize;
    (l, i as i64 - (l * l + l) as i64)
}

/// Worst `|modal - direct|` at `points` random interior points, with the
/// modal closed form and adaptive direct quadrature evaluated independently.
pub fn oracle_agreement(kernel: &KernelSpec, points: usize, seed: u64) -> Result<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    if kernel.dimension == 2 {
        let g = Geometry::Curve(ParametricCurve::circle(1.0)?);
        let d = Density::Cosine(3);
        for _ in 0..points {
            let x =
                Complex64::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            let a = modal_reference(kernel, &g, &d, EvalPoint::Plane(x))?.value;
            let b = direct_offsurface(kernel, &g, &d, EvalPoint::Plane(x), 1e-13)?.value;
            worst = worst.max((a - b).norm());
        }
    } else {
        let g = Geometry::Surface(ParametricSurface::sphere(1.0)?);
        let d = Density::SphericalHarmonic { l: 3, m: 1 };
        for _ in 0..points {
            let rho = 0.9 * rng.gen::<f64>().cbrt();
            let theta = rng.gen_range(0.0..2.0 * PI);
            let phi = rng.gen::<f64>().mul_add(2.0, -1.0).acos();
            let x = crate::geometry::scale3(rho, crate::geometry::omega(theta, phi));
            let a = modal_reference(kernel, &g, &d, EvalPoint::Space(x))?.value;
            let b = direct_offsurface(kernel, &g, &d, EvalPoint::Space(x), 1e-12)?.value;
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// One-sided Cauchy integrals of `phi = 1`: worst of `|F_- - 1|`, `|F_+|`
/// and `|F_+ - F_- + 1|` over a few targets on a circle and on a starfish.
pub fn cauchy_jump_residual() -> Result<f64> {
    let k = KernelSpec::cauchy();
    let d = Density::Constant(1.0);
    let mut worst: f64 = 0.0;
    let cases = [
        (
            Geometry::Curve(ParametricCurve::circle(1.0)?),
            vec![0.0, 1.3, 4.0],
        ),
        (
            Geometry::Curve(ParametricCurve::starfish(1.0, 0.3, 5)?),
            vec![0.3, 0.95, 2.2],
        ),
    ];
    for (g, targets) in &cases {
        for &t in targets {
            let p = QbxParams::curve(10, 0.05, 256, 16);
            let inside = eval_on_surface(&k, g, &d, Target::Curve(t), &p)?;
            let outside =
                eval_on_surface(&k, g, &d, Target::Curve(t), &p.with_side(Side::Exterior))?;
            worst = worst
                .max((inside - 1.0).norm())
                .max(outside.norm())
                .max((outside - inside + 1.0).norm());
        }
    }
    Ok(worst)
}

/// The special-function suite (Wronskian, sum rule, ladder, orthonormality).
pub fn special_function_checks() -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        CheckOutcome::new(
            "wronskian n<=30, x in [0.1, 50] (relative)",
            wronskian_residual(30)?,
            1e-10,
        ),
        CheckOutcome::new(
            "sum rule l<=20 at 100 points",
            sum_rule_residual(20, 100, 7),
            1e-12,
        ),
        CheckOutcome::new("ladder identity l<=10", ladder_residual(10), 1e-9),
        CheckOutcome::new(
            "sphere-rule orthonormality l<=12 (16x32)",
            orthonormality_residual(12, &SphereRule::new(16, 32)?)?,
            1e-10,
        ),
    ])
}

/// Oracle agreement for every kernel family and wavenumber, plus the Cauchy
/// jump relation.
pub fn oracle_checks(points: usize) -> Result<Vec<CheckOutcome>> {
    let mut kernels = vec![
        KernelSpec::cauchy(),
        KernelSpec::laplace_slp(),
        KernelSpec::laplace_dlp(),
    ];
    for layer in [Layer::Single, Layer::Double] {
        for k in [0.5, 2.0, 10.0] {
            kernels.push(KernelSpec::helmholtz(layer, 2, k)?);
        }
        for k in [1.0, 3.0] {
            kernels.push(KernelSpec::helmholtz(layer, 3, k)?);
        }
    }
    let mut out = Vec::new();
    for (i, k) in kernels.iter().enumerate() {
        let residual = oracle_agreement(k, points, 100 + i as u64)?;
        out.push(CheckOutcome::new(
            format!("modal vs direct, {} {}D k={}", k.family, k.dimension, k.k),
            residual,
            1e-10,
        ));
    }
    out.push(CheckOutcome::new(
        "cauchy jump, phi = 1",
        cauchy_jump_residual()?,
        1e-9,
    ));
    Ok(out)
}
