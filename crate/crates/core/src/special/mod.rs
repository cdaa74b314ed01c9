//! Special functions used by the local expansions: cylindrical Bessel and
//! Hankel functions, spherical Bessel and Hankel functions, and normalized
//! spherical harmonics with their angular derivatives.

mod bessel;
mod harmonics;
mod spherical_bessel;

pub use bessel::{
    bessel_batch, hankel1_batch, hankel1_with_derivative, BesselBatch, MAX_BESSEL_ORDER,
};
pub use harmonics::{
    normalized_legendre, sph_harm, sph_harm_grad, sph_harm_table, SphHarmTable,
    SphericalHarmonicValue, POLE_EPSILON,
};
pub use spherical_bessel::{
    spherical_bessel_batch, spherical_hankel_with_derivative, spherical_j_values,
    spherical_j_with_derivative,
};
