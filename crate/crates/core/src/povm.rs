//! Gaussian-level description of noisy homodyne and double homodyne POVMs:
//! noise covariances, Q-symbol reconstructions and the squeezed-state
//! representation of the double homodyne measurement.

use crate::error::{Error, Result};
use crate::gauss_approx::{dh_quadrature, gaussian_params, quadrature_map, quadrature_mean};
use crate::photostat::{Amplitude, DoubleHomodyneConfig, HomodyneConfig};
use crate::quad::{gaussian_cover, integrate, ABS_TOL};
use crate::special::gauss;

/// Smallest eigenvalue still counted as positive semi-definite.
pub const PSD_TOL: f64 = 1e-12;

/// Tolerance on the squeezing parameter at the interval endpoints.
pub const INTERVAL_TOL: f64 = 1e-12;

/// Noise variances at or below this are treated as a delta kernel.
const DELTA_VARIANCE: f64 = 1e-14;

/// Real symmetric 2×2 matrix `[[xx, xp], [xp, pp]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cov2 {
    pub xx: f64,
    pub xp: f64,
    pub pp: f64,
}

impl Cov2 {
    pub fn new(xx: f64, xp: f64, pp: f64) -> Self {
        Self { xx, xp, pp }
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Self { xx: a, xp: 0.0, pp: b }
    }

    pub fn identity() -> Self {
        Self::diag(1.0, 1.0)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `R(φ) M R(φ)ᵀ` with `R(φ) = [[cos φ, −sin φ], [sin φ, cos φ]]`.
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self {
            xx: c * c * self.xx - 2.0 * c * s * self.xp + s * s * self.pp,
            xp: c * s * (self.xx - self.pp) + (c * c - s * s) * self.xp,
            pp: s * s * self.xx + 2.0 * c * s * self.xp + c * c * self.pp,
        }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.pp
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = 0.5 * self.trace();
        let d = (0.25 * (self.xx - self.pp).powi(2) + self.xp * self.xp).sqrt();
        (m - d, m + d)
    }

    pub fn is_psd(&self) -> bool {
        self.eigenvalues().0 >= -PSD_TOL
    }

    pub fn add(&self, other: &Cov2) -> Cov2 {
        Cov2::new(self.xx + other.xx, self.xp + other.xp, self.pp + other.pp)
    }

    pub fn scale(&self, k: f64) -> Cov2 {
        Cov2::new(k * self.xx, k * self.xp, k * self.pp)
    }

    pub fn add_identity(&self, k: f64) -> Cov2 {
        Cov2::new(self.xx + k, self.xp, self.pp + k)
    }

    pub fn inverse(&self) -> Option<Cov2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Cov2::new(self.pp / d, -self.xp / d, self.xx / d))
    }

    /// `uᵀ M u`
    pub fn quadratic_form(&self, u: (f64, f64)) -> f64 {
        self.xx * u.0 * u.0 + 2.0 * self.xp * u.0 * u.1 + self.pp * u.1 * u.1
    }
}

/// Noisy homodyne POVM: projectors onto `|x, φ⟩` smeared by a Gaussian of
/// variance `σ_N = σ_x − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodynePovm {
    pub sigma_n: f64,
    pub phi: f64,
    /// Prefactor `1/((η₁+η₂)CS|α_L|)` mapping quadrature densities to count
    /// probabilities.
    pub scale: f64,
}

impl HomodynePovm {
    /// `Σ_N = R(φ) diag(σ_N, 0) R(φ)ᵀ`
    pub fn noise_cov(&self) -> Cov2 {
        Cov2::diag(self.sigma_n, 0.0).rotated(self.phi)
    }
}

pub fn homodyne_povm(cfg: &HomodyneConfig) -> HomodynePovm {
    let map = quadrature_map(cfg);
    HomodynePovm {
        sigma_n: (map.sigma_x - 1.0).max(0.0),
        phi: cfg.phase(),
        scale: 1.0 / map.scale,
    }
}

/// Reconstructed and directly evaluated count probabilities at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub reconstructed: f64,
    pub direct: f64,
}

impl Reconstruction {
    pub fn residual(&self) -> f64 {
        (self.reconstructed - self.direct).abs()
    }
}

/// Rebuild the Gaussian count probability at quadrature value `x` from the
/// POVM: the sharp projector's Q symbol `G(x' − ⟨x̂_φ⟩; 1)` smeared by the
/// excess noise and scaled by the POVM prefactor.
pub fn q_symbol_consistency(cfg: &HomodyneConfig, alpha: Amplitude, x: f64) -> Result<Reconstruction> {
    let povm = homodyne_povm(cfg);
    let mean = quadrature_mean(alpha, povm.phi);
    let smeared = if povm.sigma_n <= DELTA_VARIANCE {
        gauss(x - mean, 1.0)
    } else {
        let sn = povm.sigma_n;
        let pts = gaussian_cover(&[(x, sn.sqrt()), (mean, 1.0)], 10.0);
        integrate(|xp| gauss(x - xp, sn) * gauss(xp - mean, 1.0), &pts, ABS_TOL)?
    };
    let map = quadrature_map(cfg);
    let g = gaussian_params(cfg, alpha);
    let direct = (-(x - mean).powi(2) / (2.0 * map.sigma_x)).exp()
        / (2.0 * std::f64::consts::PI * g.sigma_g).sqrt();
    Ok(Reconstruction { reconstructed: povm.scale * smeared, direct })
}

/// Double homodyne POVM parameters in the frame where `q ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhPovmParams {
    pub sigma1: f64,
    pub sigma2: f64,
    /// `δ_i = 2σ_i − 1`
    pub delta1: f64,
    pub delta2: f64,
    /// Imbalance ratio `S_S²/C_S²` of the signal splitter, at least one.
    pub q: f64,
    pub phi: f64,
    /// Whether the arms were exchanged to reach `q ≥ 1`; axis 1 is then the
    /// physical `Im(αe^{−iφ})` axis.
    pub swapped: bool,
}

impl DhPovmParams {
    /// Build directly from the two quadrature variances and imbalance ratio.
    pub fn from_sigmas(sigma1: f64, sigma2: f64, q: f64, phi: f64) -> Self {
        Self {
            sigma1,
            sigma2,
            delta1: 2.0 * sigma1 - 1.0,
            delta2: 2.0 * sigma2 - 1.0,
            q,
            phi,
            swapped: false,
        }
    }

    /// Means of the two axes in this frame.
    pub fn means(&self, alpha: Amplitude) -> (f64, f64) {
        let m = alpha * Amplitude::from_polar(1.0, -self.phi);
        if self.swapped {
            (m.im, m.re)
        } else {
            (m.re, m.im)
        }
    }

    /// Gaussian density `exp(−Σ(x_i−a_i)²/σ_i)/(π√(σ₁σ₂))` in this frame.
    pub fn density(&self, alpha: Amplitude, x1: f64, x2: f64) -> f64 {
        let (a1, a2) = self.means(alpha);
        let e = (x1 - a1).powi(2) / self.sigma1 + (x2 - a2).powi(2) / self.sigma2;
        (-e).exp() / (std::f64::consts::PI * (self.sigma1 * self.sigma2).sqrt())
    }
}

pub fn dh_povm_params(cfg: &DoubleHomodyneConfig) -> DhPovmParams {
    let quad = dh_quadrature(cfg);
    let q = cfg.bs_signal.s2() / cfg.bs_signal.c2();
    let mut p = DhPovmParams::from_sigmas(quad.sigma1, quad.sigma2, q, quad.phi);
    if q < 1.0 {
        p = DhPovmParams::from_sigmas(quad.sigma2, quad.sigma1, 1.0 / q, quad.phi);
        p.swapped = true;
    }
    p
}

/// Noise variances of the coherent-state representation,
/// `4σ̃_N^{(i)} = δ_i − 1`, and whether both are non-negative.
pub fn coherent_rep_noise(p: &DhPovmParams) -> (f64, f64, bool) {
    let n1 = 0.25 * (p.delta1 - 1.0);
    let n2 = 0.25 * (p.delta2 - 1.0);
    (n1, n2, n1 >= 0.0 && n2 >= 0.0)
}

/// Admissible squeezing parameters `[r₂, r₁]` with `r₁ = ½ ln δ₁`,
/// `r₂ = −½ ln δ₂`. Returned as `(r₂, r₁)`.
pub fn squeezing_interval(p: &DhPovmParams) -> (f64, f64) {
    (-0.5 * p.delta2.ln(), 0.5 * p.delta1.ln())
}

/// Squeezed-state representation of the double homodyne POVM at one `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedRepresentation {
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    /// `σ_N^{(1)}(r) = (δ₁ − e^{2r})/4`
    pub sigma_n1: f64,
    /// `σ_N^{(2)}(r) = (δ₂ − e^{−2r})/4`
    pub sigma_n2: f64,
    pub phi: f64,
}

impl SqueezedRepresentation {
    /// `Σ_N(r) = R(φ) diag(4σ_N^{(1)}, 4σ_N^{(2)}) R(φ)ᵀ`
    pub fn noise_cov(&self) -> Cov2 {
        Cov2::diag(4.0 * self.sigma_n1, 4.0 * self.sigma_n2).rotated(self.phi)
    }
}

pub fn squeezed_rep_noise(p: &DhPovmParams, r: f64) -> Result<SqueezedRepresentation> {
    let (r2, r1) = squeezing_interval(p);
    if !r.is_finite() {
        return Err(Error::Domain(format!("squeezing parameter must be finite, got {r}")));
    }
    if r > r1 + INTERVAL_TOL {
        return Err(Error::Domain(format!(
            "r = {r} exceeds r1 = {r1}: δ1 − e^(2r) would be negative"
        )));
    }
    if r < r2 - INTERVAL_TOL {
        return Err(Error::Domain(format!(
            "r = {r} is below r2 = {r2}: δ2 − e^(−2r) would be negative"
        )));
    }
    Ok(SqueezedRepresentation {
        r,
        r1,
        r2,
        sigma_n1: (0.25 * (p.delta1 - (2.0 * r).exp())).max(0.0),
        sigma_n2: (0.25 * (p.delta2 - (-2.0 * r).exp())).max(0.0),
        phi: p.phi,
    })
}

/// Non-normalised Husimi function of the squeezed state at `β`:
/// `(1/cosh r) exp(−2(β₁−a₁)²/(e^{2r}+1) − 2(β₂−a₂)²/(e^{−2r}+1))`.
pub fn squeezed_husimi(r: f64, a: (f64, f64), beta1: f64, beta2: f64) -> f64 {
    let e1 = 2.0 * (beta1 - a.0).powi(2) / ((2.0 * r).exp() + 1.0);
    let e2 = 2.0 * (beta2 - a.1).powi(2) / ((-2.0 * r).exp() + 1.0);
    (-e1 - e2).exp() / r.cosh()
}

/// Rebuild the double homodyne density at `(x₁, x₂)` from its squeezed
/// representation,
/// `(1/π) ∫∫ G(x₁−β₁; σ_N^{(1)}) G(x₂−β₂; σ_N^{(2)}) Q_r(β) d²β`,
/// and compare with the direct Gaussian density. Zero-variance axes are
/// integrated against a delta.
pub fn squeezed_q_symbol(
    p: &DhPovmParams,
    r: f64,
    alpha: Amplitude,
    x1: f64,
    x2: f64,
) -> Result<Reconstruction> {
    let rep = squeezed_rep_noise(p, r)?;
    let a = p.means(alpha);
    let (n1, n2) = (rep.sigma_n1, rep.sigma_n2);
    let sd_h1 = (0.25 * ((2.0 * r).exp() + 1.0)).sqrt();
    let sd_h2 = (0.25 * ((-2.0 * r).exp() + 1.0)).sqrt();

    let inner = |b1: f64| -> Result<f64> {
        if n2 <= DELTA_VARIANCE {
            return Ok(squeezed_husimi(r, a, b1, x2));
        }
        let pts = gaussian_cover(&[(x2, n2.sqrt()), (a.1, sd_h2)], 10.0);
        integrate(|b2| gauss(x2 - b2, n2) * squeezed_husimi(r, a, b1, b2), &pts, ABS_TOL)
    };
    let total = if n1 <= DELTA_VARIANCE {
        inner(x1)?
    } else {
        let pts = gaussian_cover(&[(x1, n1.sqrt()), (a.0, sd_h1)], 10.0);
        // errors inside the integrand are surfaced after the outer pass
        let failure = std::cell::RefCell::new(None);
        let v = integrate(
            |b1| match inner(b1) {
                Ok(v) => gauss(x1 - b1, n1) * v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            &pts,
            ABS_TOL,
        )?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        v
    };
    Ok(Reconstruction {
        reconstructed: total / std::f64::consts::PI,
        direct: p.density(alpha, x1, x2),
    })
}
