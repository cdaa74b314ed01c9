use num_complex::Complex64;

use crate::error::{QbxError, Result};

/// `j_0..j_{l_max}` at `x >= 0`. At `x == 0` this is `(1, 0, 0, ...)`.
///
/// Downward recurrence normalized by `sum (2l+1) j_l^2 = 1`, with the sign
/// fixed by the closed forms of `j_0` or `j_1`.
pub fn spherical_j_values(l_max: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; l_max + 1];
        out[0] = 1.0;
        return out;
    }
    let top = (l_max as f64).max(x);
    let start = l_max + 15 + x.ceil() as usize + (40.0 * top).sqrt().ceil() as usize;
    let mut f = vec![0.0; start + 2];
    f[start] = 1e-30;
    for l in (1..=start).rev() {
        f[l - 1] = ((2 * l + 1) as f64 / x) * f[l] - f[l + 1];
        // keep squares finite for the normalization sum below
        if f[l - 1].abs() > 1e100 {
            for v in &mut f[l - 1..] {
                *v /= 1e100;
            }
        }
    }
    let norm: f64 = f
        .iter()
        .enumerate()
        .map(|(l, v)| (2 * l + 1) as f64 * v * v)
        .sum::<f64>()
        .sqrt();
    let j0 = x.sin() / x;
    let j1 = if x < 0.5 {
        // cancellation-free series for small arguments
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)))
    } else {
        x.sin() / (x * x) - x.cos() / x
    };
    let sign = if j0.abs() >= j1.abs() {
        j0.signum() * f[0].signum()
    } else {
        j1.signum() * f[1].signum()
    };
    f.truncate(l_max + 1);
    f.iter().map(|v| sign * v / norm).collect()
}

fn spherical_y_values(l_max: usize, x: f64) -> Vec<f64> {
    let mut y = Vec::with_capacity(l_max + 1);
    y.push(-x.cos() / x);
    if l_max >= 1 {
        y.push(-(x.cos() + x * x.sin()) / (x * x));
    }
    for l in 1..l_max {
        let next = ((2 * l + 1) as f64 / x) * y[l] - y[l - 1];
        y.push(next);
    }
    y
}

/// Spherical Bessel `j_l` and spherical Hankel `h_l = j_l + i y_l` for
/// `l = 0..=l_max`.
pub fn spherical_bessel_batch(l_max: usize, x: f64) -> Result<(Vec<f64>, Vec<Complex64>)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(QbxError::Domain(format!(
            "spherical Bessel argument must be positive and finite, got {x}"
        )));
    }
    let j = spherical_j_values(l_max, x);
    let y = spherical_y_values(l_max, x);
    let h = j
        .iter()
        .zip(&y)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    Ok((j, h))
}

fn derivative_from<T>(values: &[T], x: f64, l_max: usize) -> Vec<T>
where
    T: Copy
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>
        + std::ops::Neg<Output = T>,
{
    (0..=l_max)
        .map(|l| {
            if l == 0 {
                -values[1]
            } else {
                values[l - 1] - values[l] * ((l + 1) as f64 / x)
            }
        })
        .collect()
}

/// `j_l(x)` and `j_l'(x)` for `l = 0..=l_max`, `x > 0`.
pub fn spherical_j_with_derivative(l_max: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (j, _) = spherical_bessel_batch(l_max + 1, x)?;
    let dj = derivative_from(&j, x, l_max);
    Ok((j[..=l_max].to_vec(), dj))
}

/// `h_l(x)` and `h_l'(x)` for `l = 0..=l_max`, `x > 0`.
pub fn spherical_hankel_with_derivative(
    l_max: usize,
    x: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let (_, h) = spherical_bessel_batch(l_max + 1, x)?;
    let dh = derivative_from(&h, x, l_max);
    Ok((h[..=l_max].to_vec(), dh))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_survives_large_recurrence_values() {
        let x = 19.15761527533399;
        let j = spherical_j_values(120, x);
        assert!((j[0] - x.sin() / x).abs() < 1e-15);
        let s: f64 = j
            .iter()
            .enumerate()
            .map(|(l, v)| (2 * l + 1) as f64 * v * v)
            .sum();
        assert!((s - 1.0).abs() < 1e-13);
    }

    #[test]
    fn closed_form_seeds() {
        let (j, h) = spherical_bessel_batch(0, 1.0).unwrap();
        assert!((j[0] - 0.8414709848078965).abs() < 1e-15);
        assert!((h[0] - Complex64::new(0.8414709848078965, -0.5403023058681398)).norm() < 1e-15);
    }

    #[test]
    fn j1_at_half() {
        let x: f64 = 0.5;
        let closed = x.sin() / (x * x) - x.cos() / x;
        assert!((closed - 0.16253703063606657).abs() < 1e-15);
        let (j, _) = spherical_bessel_batch(2, 0.5).unwrap();
        assert!((j[1] - 0.16253703063606657).abs() < 1e-15);
    }

    /// `j_l(x) = sqrt(pi/(2x)) J_{l+1/2}(x)` through the ascending series.
    fn j_series(l: usize, x: f64) -> f64 {
        let dfact: f64 = (1..=l).map(|k| (2 * k + 1) as f64).product();
        let mut term = x.powi(l as i32) / dfact;
        let mut sum = term;
        for k in 1..100 {
            term *= -x * x / (2.0 * k as f64 * (2 * l + 2 * k + 1) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn downward_recurrence_matches_series() {
        for &x in &[1e-3, 0.2, 1.0, 3.0, 6.0] {
            let j = spherical_j_values(12, x);
            for (l, jl) in j.iter().enumerate() {
                let s = j_series(l, x);
                assert!((jl - s).abs() <= 1e-13 * s.abs() + 1e-16, "l={l} x={x}");
            }
        }
    }

    #[test]
    fn cross_product_identity() {
        // j_{l+1} y_l - j_l y_{l+1} = 1/x^2
        for &x in &[0.3, 1.0, 5.0, 20.0] {
            let (j, h) = spherical_bessel_batch(15, x).unwrap();
            for l in 0..15 {
                let w = j[l + 1] * h[l].im - j[l] * h[l + 1].im;
                assert!((w * x * x - 1.0).abs() < 1e-10, "l={l} x={x}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_difference() {
        let x = 1.3;
        let d = 1e-5;
        let (_, dh) = spherical_hankel_with_derivative(5, x).unwrap();
        let (_, hp) = spherical_bessel_batch(5, x + d).unwrap();
        let (_, hm) = spherical_bessel_batch(5, x - d).unwrap();
        for l in 0..=5 {
            assert!(((hp[l] - hm[l]) / (2.0 * d) - dh[l]).norm() < 1e-7 * dh[l].norm().max(1.0));
        }
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(spherical_bessel_batch(3, 0.0).is_err());
        assert!(spherical_bessel_batch(3, -2.0).is_err());
    }
}
