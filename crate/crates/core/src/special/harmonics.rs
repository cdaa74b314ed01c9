//! Normalized spherical harmonics in `(theta, phi)` coordinates, where `theta`
//! is the azimuth and `phi` the polar angle:
//!
//! `Y_l^m(theta, phi) = sqrt((2l+1)/(4 pi) (l-|m|)!/(l+|m|)!) P_l^{|m|}(cos phi) e^{i m theta}`
//!
//! with `P_l^m` carrying no Condon-Shortley phase, so `Y_l^{-m} = conj(Y_l^m)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QbxError, Result};

/// Minimum distance from the poles at which angular derivatives are requested.
pub const POLE_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalHarmonicValue {
    pub degree: usize,
    pub order: i64,
    pub value: Complex64,
    /// `d/dtheta` (azimuthal derivative).
    pub d_theta: Complex64,
    /// `d/dphi` (polar derivative).
    pub d_phi: Complex64,
}

fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Normalized associated Legendre values `Pbar_l^m(cos phi)` for
/// `0 <= m <= l <= l_max`, stored at `l(l+1)/2 + m`, together with their
/// `phi` derivatives.
///
/// The normalization is folded into the recurrences, so nothing overflows for
/// large `l`.
pub fn normalized_legendre(l_max: usize, phi: f64) -> (Vec<f64>, Vec<f64>) {
    let x = phi.cos();
    let s = phi.sin();
    let len = tri_index(l_max + 1, 0);
    let mut p = vec![0.0; len];
    p[0] = 1.0 / (4.0 * PI).sqrt();
    for m in 1..=l_max {
        p[tri_index(m, m)] =
            ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s * p[tri_index(m - 1, m - 1)];
    }
    for m in 0..l_max {
        p[tri_index(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * p[tri_index(m, m)];
    }
    for m in 0..=l_max {
        for l in (m + 2)..=l_max {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[tri_index(l, m)] = a * (x * p[tri_index(l - 1, m)] - b * p[tri_index(l - 2, m)]);
        }
    }

    let mut dp = vec![0.0; len];
    for l in 0..=l_max {
        let lf = l as f64;
        for m in 0..=l {
            let mf = m as f64;
            let up = if m < l {
                ((lf - mf) * (lf + mf + 1.0)).sqrt() * p[tri_index(l, m + 1)]
            } else {
                0.0
            };
            dp[tri_index(l, m)] = if m == 0 {
                -up
            } else {
                let down = ((lf + mf) * (lf - mf + 1.0)).sqrt() * p[tri_index(l, m - 1)];
                0.5 * (down - up)
            };
        }
    }
    (p, dp)
}

/// All `Y_l^m` with `l <= l_max` and their angular derivatives at one point.
#[derive(Debug, Clone)]
pub struct SphHarmTable {
    pub l_max: usize,
    pub theta: f64,
    pub phi: f64,
    values: Vec<Complex64>,
    d_phi: Vec<Complex64>,
}

impl SphHarmTable {
    /// Flat index `l^2 + l + m`.
    pub fn index(l: usize, m: i64) -> usize {
        Self::index_i(l, m)
    }

    pub fn value(&self, l: usize, m: i64) -> Complex64 {
        self.values[Self::index_i(l, m)]
    }

    pub fn d_phi(&self, l: usize, m: i64) -> Complex64 {
        self.d_phi[Self::index_i(l, m)]
    }

    pub fn d_theta(&self, l: usize, m: i64) -> Complex64 {
        Complex64::new(0.0, m as f64) * self.value(l, m)
    }

    /// Surface gradient components in the orthonormal frame:
    /// `(e_theta . grad Y, e_phi . grad Y) = (d_theta Y / sin phi, d_phi Y)`.
    pub fn gradient(&self, l: usize, m: i64) -> (Complex64, Complex64) {
        (self.d_theta(l, m) / self.phi.sin(), self.d_phi(l, m))
    }

    fn index_i(l: usize, m: i64) -> usize {
        ((l * l + l) as i64 + m) as usize
    }
}

pub fn sph_harm_table(l_max: usize, theta: f64, phi: f64) -> SphHarmTable {
    let (p, dp) = normalized_legendre(l_max, phi);
    let n = (l_max + 1) * (l_max + 1);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let mut d_phi = vec![Complex64::new(0.0, 0.0); n];
    for l in 0..=l_max {
        for m in 0..=l {
            let phase = Complex64::from_polar(1.0, m as f64 * theta);
            let i = tri_index(l, m);
            let plus = SphHarmTable::index_i(l, m as i64);
            let minus = SphHarmTable::index_i(l, -(m as i64));
            values[plus] = p[i] * phase;
            d_phi[plus] = dp[i] * phase;
            values[minus] = values[plus].conj();
            d_phi[minus] = d_phi[plus].conj();
        }
    }
    SphHarmTable {
        l_max,
        theta,
        phi,
        values,
        d_phi,
    }
}

/// `Y_l^m(theta, phi)` with both angular derivatives.
pub fn sph_harm(l: usize, m: i64, theta: f64, phi: f64) -> Result<SphericalHarmonicValue> {
    if m.unsigned_abs() as usize > l {
        return Err(QbxError::Domain(format!(
            "|m| = {} exceeds l = {l}",
            m.abs()
        )));
    }
    let table = sph_harm_table(l, theta, phi);
    Ok(SphericalHarmonicValue {
        degree: l,
        order: m,
        value: table.value(l, m),
        d_theta: table.d_theta(l, m),
        d_phi: table.d_phi(l, m),
    })
}

/// Surface gradient of `Y_l^m` on the unit sphere as
/// `(e_theta component, e_phi component)`. Singular at the poles; keep
/// `phi` within `[POLE_EPSILON, pi - POLE_EPSILON]`.
pub fn sph_harm_grad(l: usize, m: i64, theta: f64, phi: f64) -> Result<(Complex64, Complex64)> {
    if m.unsigned_abs() as usize > l {
        return Err(QbxError::Domain(format!(
            "|m| = {} exceeds l = {l}",
            m.abs()
        )));
    }
    if !(POLE_EPSILON..=PI - POLE_EPSILON).contains(&phi) {
        return Err(QbxError::Domain(format!(
            "polar angle {phi} too close to a pole"
        )));
    }
    Ok(sph_harm_table(l, theta, phi).gradient(l, m))
}
