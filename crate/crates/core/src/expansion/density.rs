use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{QbxError, Result};
use crate::geometry::ParametricCurve;
use crate::special::sph_harm_table;

/// Closed-form test densities. Curve densities are functions of the curve
/// parameter `t`; sphere densities of the surface angles `(theta, phi)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Zero,
    Constant(f64),
    /// `e^{int}`
    Fourier(i64),
    /// `cos(nt)`
    Cosine(i64),
    /// `sin(nt)`
    Sine(i64),
    /// `w(t)^n`, boundary values of `z^n`.
    BoundaryPower(u32),
    /// `Re w(t)^n`, boundary values of the harmonic `Re z^n`.
    RealPower(u32),
    /// `Y_l^m(theta, phi)` on a sphere.
    SphericalHarmonic {
        l: usize,
        m: i64,
    },
}

impl Density {
    pub fn on_curve(&self, curve: &ParametricCurve, t: f64) -> Result<Complex64> {
        let c = |x: f64| Complex64::new(x, 0.0);
        Ok(match *self {
            Density::Zero => c(0.0),
            Density::Constant(v) => c(v),
            Density::Fourier(n) => Complex64::from_polar(1.0, n as f64 * t),
            Density::Cosine(n) => c((n as f64 * t).cos()),
            Density::Sine(n) => c((n as f64 * t).sin()),
            Density::BoundaryPower(n) => curve.position(t).powu(n),
            Density::RealPower(n) => c(curve.position(t).powu(n).re),
            Density::SphericalHarmonic { .. } => {
                return Err(QbxError::Capability(format!(
                    "density {self} needs a surface"
                )))
            }
        })
    }

    pub fn on_sphere(&self, theta: f64, phi: f64) -> Result<Complex64> {
        match *self {
            Density::Zero => Ok(Complex64::new(0.0, 0.0)),
            Density::Constant(v) => Ok(Complex64::new(v, 0.0)),
            Density::SphericalHarmonic { l, m } => {
                if m.unsigned_abs() as usize > l {
                    return Err(QbxError::Domain(format!(
                        "|m| = {} exceeds l = {l}",
                        m.abs()
                    )));
                }
                Ok(sph_harm_table(l, theta, phi).value(l, m))
            }
            _ => Err(QbxError::Capability(format!(
                "density {self} is only defined on curves"
            ))),
        }
    }

    /// Whether every value is real (required by the Laplace families).
    pub fn is_real(&self) -> bool {
        matches!(
            self,
            Density::Zero
                | Density::Constant(_)
                | Density::Cosine(_)
                | Density::Sine(_)
                | Density::RealPower(_)
        ) || matches!(
            self,
            Density::Fourier(0) | Density::SphericalHarmonic { m: 0, .. }
        )
    }

    /// Expansion `sum c_n e^{int}` on a circle of radius `radius` centered at
    /// the origin, when the density has one.
    pub fn fourier_modes(&self, radius: f64) -> Option<Vec<(Complex64, i64)>> {
        let half = Complex64::new(0.5, 0.0);
        Some(match *self {
            Density::Zero => vec![],
            Density::Constant(v) => vec![(v.into(), 0)],
            Density::Fourier(n) => vec![(1.0.into(), n)],
            Density::Cosine(0) => vec![(1.0.into(), 0)],
            Density::Cosine(n) => vec![(half, n), (half, -n)],
            Density::Sine(0) => vec![],
            Density::Sine(n) => vec![
                (Complex64::new(0.0, -0.5), n),
                (Complex64::new(0.0, 0.5), -n),
            ],
            Density::BoundaryPower(n) => vec![(radius.powi(n as i32).into(), n as i64)],
            Density::RealPower(0) => vec![(1.0.into(), 0)],
            Density::RealPower(n) => {
                let c = Complex64::new(0.5 * radius.powi(n as i32), 0.0);
                vec![(c, n as i64), (c, -(n as i64))]
            }
            Density::SphericalHarmonic { .. } => return None,
        })
    }

    /// Expansion `sum c_lm Y_l^m` on a sphere, when the density has one.
    pub fn harmonic_modes(&self) -> Option<Vec<(Complex64, usize, i64)>> {
        match *self {
            Density::Zero => Some(vec![]),
            Density::Constant(v) => Some(vec![(Complex64::new(v * (4.0 * PI).sqrt(), 0.0), 0, 0)]),
            Density::SphericalHarmonic { l, m } => Some(vec![(Complex64::new(1.0, 0.0), l, m)]),
            _ => None,
        }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Zero => write!(f, "zero"),
            Density::Constant(v) => write!(f, "constant:{v}"),
            Density::Fourier(n) => write!(f, "exp:{n}"),
            Density::Cosine(n) => write!(f, "cos:{n}"),
            Density::Sine(n) => write!(f, "sin:{n}"),
            Density::BoundaryPower(n) => write!(f, "power:{n}"),
            Density::RealPower(n) => write!(f, "repower:{n}"),
            Density::SphericalHarmonic { l, m } => write!(f, "ylm:{l}:{m}"),
        }
    }
}

impl FromStr for Density {
    type Err = QbxError;

    /// Parses the [`Display`](fmt::Display) form, e.g. `cos:3` or `ylm:5:2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let bad = || QbxError::Domain(format!("cannot parse density '{s}'"));
        let int = |i: usize| -> Result<i64> {
            args.get(i)
                .ok_or_else(bad)?
                .trim()
                .parse()
                .map_err(|_| bad())
        };
        let nonneg = |i: usize| -> Result<u32> { u32::try_from(int(i)?).map_err(|_| bad()) };
        let want = |n: usize| if args.len() == n { Ok(()) } else { Err(bad()) };
        Ok(match name {
            "zero" => {
                want(0)?;
                Density::Zero
            }
            "constant" => {
                if args.is_empty() {
                    Density::Constant(1.0)
                } else {
                    want(1)?;
                    Density::Constant(args[0].trim().parse().map_err(|_| bad())?)
                }
            }
            "exp" => {
                want(1)?;
                Density::Fourier(int(0)?)
            }
            "cos" => {
                want(1)?;
                Density::Cosine(int(0)?)
            }
            "sin" => {
                want(1)?;
                Density::Sine(int(0)?)
            }
            "power" => {
                want(1)?;
                Density::BoundaryPower(nonneg(0)?)
            }
            "repower" => {
                want(1)?;
                Density::RealPower(nonneg(0)?)
            }
            "ylm" => {
                want(2)?;
                let l = nonneg(0)? as usize;
                let m = int(1)?;
                if m.unsigned_abs() as usize > l {
                    return Err(QbxError::Domain(format!("density '{s}': |m| exceeds l")));
                }
                Density::SphericalHarmonic { l, m }
            }
            _ => return Err(bad()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips() {
        for d in [
            Density::Zero,
            Density::Constant(1.0),
            Density::Constant(-2.5),
            Density::Fourier(-3),
            Density::Cosine(3),
            Density::Sine(2),
            Density::BoundaryPower(3),
            Density::RealPower(1),
            Density::SphericalHarmonic { l: 5, m: -2 },
        ] {
            assert_eq!(d.to_string().parse::<Density>().unwrap(), d);
        }
        assert!("cos".parse::<Density>().is_err());
        assert!("ylm:2:3".parse::<Density>().is_err());
        assert!("wiggle:1".parse::<Density>().is_err());
    }

    #[test]
    fn fourier_modes_reproduce_values_on_a_circle() {
        let c = ParametricCurve::circle(1.5).unwrap();
        for d in [
            Density::Constant(2.0),
            Density::Fourier(2),
            Density::Cosine(3),
            Density::Sine(4),
            Density::BoundaryPower(2),
            Density::RealPower(3),
        ] {
            let modes = d.fourier_modes(1.5).unwrap();
            for t in [0.0, 0.4, 2.9, 5.5] {
                let direct = d.on_curve(&c, t).unwrap();
                let sum: Complex64 = modes
                    .iter()
                    .map(|(a, n)| a * Complex64::from_polar(1.0, *n as f64 * t))
                    .sum();
                assert!((direct - sum).norm() < 1e-13, "{d}");
            }
        }
    }

    #[test]
    fn surface_and_curve_densities_are_not_interchangeable() {
        let c = ParametricCurve::circle(1.0).unwrap();
        assert!(Density::SphericalHarmonic { l: 1, m: 0 }
            .on_curve(&c, 0.0)
            .is_err());
        assert!(Density::Cosine(1).on_sphere(0.0, 1.0).is_err());
    }
}
