use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QbxError, Result};

/// Largest order accepted by [`bessel_batch`].
pub const MAX_BESSEL_ORDER: usize = 200;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_THRESHOLD: f64 = 1e200;

/// Cylindrical Bessel functions `J_0..J_n` and `Y_0..Y_n` at one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselBatch {
    pub order_max: usize,
    pub argument: f64,
    pub j_values: Vec<f64>,
    pub y_values: Vec<f64>,
}

impl BesselBatch {
    pub fn hankel1(&self, n: usize) -> Complex64 {
        Complex64::new(self.j_values[n], self.y_values[n])
    }
}

fn check_args(order_max: usize, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(QbxError::Domain(format!(
            "Bessel argument must be positive and finite, got {x}"
        )));
    }
    if order_max > MAX_BESSEL_ORDER {
        return Err(QbxError::Capability(format!(
            "Bessel order {order_max} exceeds the supported maximum {MAX_BESSEL_ORDER}"
        )));
    }
    Ok(())
}

/// Miller start order: far enough above both `order_max` and `x` that the
/// minimal solution dominates by the time the recurrence reaches `order_max`.
fn miller_start(order_max: usize, x: f64) -> usize {
    let top = (order_max as f64).max(x);
    let start = order_max + 15 + x.ceil() as usize + (40.0 * top).sqrt().ceil() as usize;
    start + (start % 2)
}

/// `J_0..J_{start}` by downward recurrence normalized with
/// `J_0 + 2 sum J_{2k} = 1`.
fn bessel_j_miller(start: usize, x: f64) -> Vec<f64> {
    let mut f = vec![0.0; start + 2];
    f[start] = 1e-30;
    for n in (1..=start).rev() {
        f[n - 1] = (2.0 * n as f64 / x) * f[n] - f[n + 1];
        if f[n - 1].abs() > RESCALE_THRESHOLD {
            for v in &mut f[n - 1..] {
                *v /= RESCALE_THRESHOLD;
            }
        }
    }
    let norm = f[0] + 2.0 * f.iter().skip(2).step_by(2).sum::<f64>();
    f.truncate(start + 1);
    for v in &mut f {
        *v /= norm;
    }
    f
}

/// `J_n(x)` and `Y_n(x)` for `n = 0..=order_max`.
///
/// `J` comes from Miller's downward recurrence; `Y_0` and `Y_1` from the
/// Neumann series in the computed `J` values, then `Y` is recurred upward.
pub fn bessel_batch(order_max: usize, x: f64) -> Result<BesselBatch> {
    check_args(order_max, x)?;
    let start = miller_start(order_max.max(1), x);
    let j = bessel_j_miller(start, x);

    let log_term = (x / 2.0).ln() + EULER_GAMMA;
    let mut even_sum = 0.0;
    let mut odd_sum = 0.0;
    let mut k = 1;
    while 2 * k < start {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        even_sum += sign * j[2 * k] / k as f64;
        odd_sum += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = (2.0 / PI) * (log_term * j[0] - 2.0 * even_sum);
    let y1 = (2.0 / PI) * (log_term * j[1] - j[0] / x + odd_sum);

    let mut y_values = Vec::with_capacity(order_max + 1);
    y_values.push(y0);
    if order_max >= 1 {
        y_values.push(y1);
    }
    for n in 1..order_max {
        let next = (2.0 * n as f64 / x) * y_values[n] - y_values[n - 1];
        y_values.push(next);
    }
    Ok(BesselBatch {
        order_max,
        argument: x,
        j_values: j[..=order_max].to_vec(),
        y_values,
    })
}

/// Hankel functions of the first kind, `H^(1)_n(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1_batch(order_max: usize, x: f64) -> Result<Vec<Complex64>> {
    let batch = bessel_batch(order_max, x)?;
    Ok((0..=order_max).map(|n| batch.hankel1(n)).collect())
}

/// `H^(1)_n(x)` and `d/dx H^(1)_n(x)` for `n = 0..=order_max`.
pub fn hankel1_with_derivative(
    order_max: usize,
    x: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let h = hankel1_batch(order_max + 1, x)?;
    let dh = (0..=order_max)
        .map(|n| {
            if n == 0 {
                -h[1]
            } else {
                0.5 * (h[n - 1] - h[n + 1])
            }
        })
        .collect();
    Ok((h[..=order_max].to_vec(), dh))
}
