//! Special functions evaluated in the log domain.
//!
//! The photocount statistics involve `exp(-λ)` factors and modified Bessel
//! functions whose magnitudes overflow `f64` long before the probabilities
//! themselves become small, so everything here returns logarithms.

use std::f64::consts::PI;

pub use statrs::function::gamma::ln_gamma;

/// Above this argument the convergent power series gets expensive and the
/// asymptotic expansions are already accurate to rounding.
const SERIES_MAX_ARG: f64 = 2000.0;

/// `ν² ≤ HANKEL_ORDER_FACTOR · z` selects the large-argument expansion over
/// the uniform (Debye) one.
const HANKEL_ORDER_FACTOR: f64 = 10.0;

/// `ln I_ν(z)` for integer order and `z ≥ 0`.
///
/// Negative orders use `I_{-n} = I_n`. Returns `-inf` for `z = 0, ν ≠ 0`.
pub fn ln_bessel_i(order: i64, z: f64) -> f64 {
    debug_assert!(z >= 0.0 && z.is_finite());
    let nu = order.unsigned_abs();
    if z == 0.0 {
        return if nu == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if z <= SERIES_MAX_ARG {
        return ln_bessel_i_series(nu, z);
    }
    let nu_f = nu as f64;
    if nu_f * nu_f <= HANKEL_ORDER_FACTOR * z {
        ln_bessel_i_hankel(nu_f, z)
    } else {
        ln_bessel_i_debye(nu_f, z)
    }
}

/// Power series `(z/2)^ν Σ (z²/4)^k / (k! Γ(ν+k+1))`, summed in linear space
/// with periodic rescaling. All terms are positive so there is no cancellation.
pub(crate) fn ln_bessel_i_series(nu: u64, z: f64) -> f64 {
    const RESCALE: f64 = 1e250;
    let ln_rescale = RESCALE.ln();
    let q = 0.25 * z * z;
    let nu_f = nu as f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut ln_scale = 0.0;
    let mut k = 0.0_f64;
    loop {
        let denom = (k + 1.0) * (nu_f + k + 1.0);
        term *= q / denom;
        sum += term;
        k += 1.0;
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_scale += ln_rescale;
        }
        if denom > q && term <= sum * 1e-17 {
            break;
        }
    }
    nu_f * (0.5 * z).ln() - ln_gamma(nu_f + 1.0) + sum.ln() + ln_scale
}

/// Large-argument expansion `e^z / √(2πz) Σ (-1)^k a_k(ν) / z^k`.
pub(crate) fn ln_bessel_i_hankel(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..400 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = -term * (mu - odd * odd) / (8.0 * kf * z);
        if next.abs() > term.abs() && kf > nu {
            // asymptotic series started to diverge
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    z - 0.5 * (2.0 * PI * z).ln() + sum.ln()
}

/// Uniform asymptotic expansion in the order, through the fourth Debye
/// polynomial.
pub(crate) fn ln_bessel_i_debye(nu: f64, z: f64) -> f64 {
    let x = z / nu;
    let root = (1.0 + x * x).sqrt();
    let t = 1.0 / root;
    let eta = root + (x / (1.0 + root)).ln();
    let t2 = t * t;
    let u1 = t * (3.0 - 5.0 * t2) / 24.0;
    let u2 = t2 * (81.0 + t2 * (-462.0 + 385.0 * t2)) / 1152.0;
    let u3 = t * t2 * (30375.0 + t2 * (-369603.0 + t2 * (765765.0 - 425425.0 * t2))) / 414720.0;
    let u4 = t2
        * t2
        * (4465125.0
            + t2 * (-94121676.0 + t2 * (349922430.0 + t2 * (-446185740.0 + 185910725.0 * t2))))
        / 39813120.0;
    let series = 1.0 + u1 / nu + u2 / (nu * nu) + u3 / (nu * nu * nu) + u4 / (nu * nu * nu * nu);
    nu * eta - 0.5 * (2.0 * PI * nu).ln() - 0.5 * root.ln() + series.ln()
}

/// `ln Pois(k; λ)`, with the `λ = 0` point mass handled explicitly.
pub fn ln_poisson(k: i64, lambda: f64) -> f64 {
    if k < 0 {
        return f64::NEG_INFINITY;
    }
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let kf = k as f64;
    kf * lambda.ln() - lambda - ln_gamma(kf + 1.0)
}

/// Normal density with the given *variance*.
#[inline]
pub fn gauss(x: f64, variance: f64) -> f64 {
    (-0.5 * x * x / variance).exp() / (2.0 * PI * variance).sqrt()
}

#[inline]
pub fn ln_gauss(x: f64, variance: f64) -> f64 {
    -0.5 * x * x / variance - 0.5 * (2.0 * PI * variance).ln()
}
