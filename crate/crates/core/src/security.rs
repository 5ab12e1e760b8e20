//! Asymptotic security of Gaussian-modulated coherent-state QKD when the
//! receiver's detection noise is attributed to the eavesdropper.
//!
//! Covariances are in shot-noise units (vacuum = identity) with mode
//! ordering `(x_A, p_A, x_B, p_B)`; information is in bits.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::gauss_approx::quadrature_map;
use crate::metrics::check_grid;
use crate::optimize::golden_section_max;
use crate::photostat::{BeamSplitter, DoubleHomodyneConfig, HomodyneConfig};
use crate::povm::{dh_povm_params, squeezing_interval, Cov2, DhPovmParams, INTERVAL_TOL};
use crate::quad::{gaussian_cover, integrate};
use crate::special::gauss;

/// Symplectic eigenvalues below `1 − NU_TOL` flag an unphysical state.
pub const NU_TOL: f64 = 1e-9;

/// Fibre attenuation used by [`length_to_transmittance`].
pub const LOSS_DB_PER_KM: f64 = 0.2;

/// Tolerance of the squeezing-parameter search.
pub const R_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    t: f64,
    xi: f64,
}

impl ChannelParams {
    pub fn new(transmittance: f64, excess_noise: f64) -> Result<Self> {
        if !(transmittance > 0.0 && transmittance <= 1.0) {
            return Err(invalid("T", format!("transmittance must lie in (0, 1], got {transmittance}")));
        }
        if !(excess_noise >= 0.0 && excess_noise.is_finite()) {
            return Err(invalid("xi", format!("excess noise must be non-negative, got {excess_noise}")));
        }
        Ok(Self { t: transmittance, xi: excess_noise })
    }

    /// Channel of a fibre of the given length.
    pub fn from_length(length_km: f64, excess_noise: f64) -> Result<Self> {
        Self::new(length_to_transmittance(length_km)?, excess_noise)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    v_a: f64,
    beta: f64,
}

impl ProtocolParams {
    /// `v_a` is the per-component variance of the modulated amplitude,
    /// `beta` the reconciliation efficiency.
    pub fn new(v_a: f64, beta: f64) -> Result<Self> {
        if !(v_a > 0.0 && v_a.is_finite()) {
            return Err(invalid("V_A", format!("modulation variance must be positive, got {v_a}")));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(invalid("beta", format!("reconciliation efficiency must lie in (0, 1), got {beta}")));
        }
        Ok(Self { v_a, beta })
    }

    pub fn v_a(&self) -> f64 {
        self.v_a
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `T = 10^{−0.02 L}` for `L` in km at 0.2 dB/km.
pub fn length_to_transmittance(length_km: f64) -> Result<f64> {
    if !(length_km >= 0.0 && length_km.is_finite()) {
        return Err(invalid("length", format!("channel length must be non-negative, got {length_km}")));
    }
    Ok(10f64.powf(-LOSS_DB_PER_KM * length_km / 10.0))
}

/// Alice–Bob covariance `[[V·𝟙, cσ_z], [cσ_z, V_B·𝟙 + Σ_N]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovAB {
    pub v: f64,
    pub c: f64,
    pub v_b: f64,
    /// Measurement noise added to Bob's block.
    pub noise: Cov2,
}

impl CovAB {
    /// Bob's block `V_B·𝟙 + Σ_N`.
    pub fn bob_block(&self) -> Cov2 {
        self.noise.add_identity(self.v_b)
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let b = self.bob_block();
        let (v, c) = (self.v, self.c);
        Matrix4::new(
            v, 0.0, c, 0.0, //
            0.0, v, 0.0, -c, //
            c, 0.0, b.xx, b.xp, //
            0.0, -c, b.xp, b.pp,
        )
    }

    /// `det Σ = V² det(B − (c²/V)𝟙)`
    pub fn det(&self) -> f64 {
        self.v * self.v * self.bob_block().add_identity(-self.c * self.c / self.v).det()
    }

    fn with_noise_unchecked(&self, noise: Cov2) -> CovAB {
        CovAB { noise, ..*self }
    }
}

/// `V = 1 + 4V_A`, `c = √(T(V²−1))`, `V_B = T(V−1) + 1 + ξ`.
pub fn ab_covariance(ch: &ChannelParams, pr: &ProtocolParams) -> CovAB {
    let v = 1.0 + 4.0 * pr.v_a;
    CovAB {
        v,
        c: (ch.t * (v * v - 1.0)).sqrt(),
        v_b: ch.t * (v - 1.0) + 1.0 + ch.xi,
        noise: Cov2::zero(),
    }
}

/// Add measurement noise to Bob's block.
pub fn noisy_ab_covariance(covab: &CovAB, noise: &Cov2) -> Result<CovAB> {
    if !noise.is_psd() {
        return Err(invalid("noise", format!("noise covariance is not positive semi-definite: {noise:?}")));
    }
    Ok(covab.with_noise_unchecked(covab.noise.add(noise)))
}

/// `ν_{1,2} = √(Δ/2 ± √(Δ²/4 − D))` with `Δ = det B + V² − 2c²`,
/// `D = det Σ`. Valid for any symmetric Bob block.
pub fn symplectic_eigs_joint(covab: &CovAB) -> Result<(f64, f64)> {
    let schur = covab.bob_block().add_identity(-covab.c * covab.c / covab.v);
    let (schur_min, _) = schur.eigenvalues();
    let delta = covab.bob_block().det() + covab.v * covab.v - 2.0 * covab.c * covab.c;
    let d = covab.det();
    let disc = (0.25 * delta * delta - d).max(0.0).sqrt();
    let nu1_sq = 0.5 * delta + disc;
    let nu2_sq = d / nu1_sq;
    if !(schur_min > 0.0) || !(nu2_sq >= 0.0) {
        return Err(Error::Unphysical { nu: nu2_sq.max(0.0).sqrt() });
    }
    let (nu1, nu2) = (nu1_sq.sqrt(), nu2_sq.sqrt());
    if nu2 < 1.0 - NU_TOL {
        return Err(Error::Unphysical { nu: nu2 });
    }
    Ok((nu1, nu2))
}

fn omega4() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Symplectic spectrum from the 4×4 matrix: the eigenvalues of the
/// symmetric matrix `Σ^{1/2} Ω Σ Ωᵀ Σ^{1/2}` are `ν₁², ν₁², ν₂², ν₂²`.
/// Requires a positive definite covariance.
pub fn symplectic_eigs_oracle(sigma: &Matrix4<f64>) -> Result<(f64, f64)> {
    let eig = SymmetricEigen::new(*sigma);
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::Unphysical { nu: 0.0 });
    }
    let root = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let om = omega4();
    let m = root * om * sigma * om.transpose() * root;
    let m = 0.5 * (m + m.transpose());
    let mut nu2: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    nu2.sort_by(|a, b| b.total_cmp(a));
    Ok((nu2[0].sqrt(), nu2[3].sqrt()))
}

/// `g(ν) = ((ν+1)/2) log₂((ν+1)/2) − ((ν−1)/2) log₂((ν−1)/2)`.
pub fn entropy_g(nu: f64) -> Result<f64> {
    if !(nu >= 1.0 - NU_TOL) {
        return Err(Error::Domain(format!("entropy needs ν ≥ 1, got {nu}")));
    }
    if nu <= 1.0 {
        return Ok(0.0);
    }
    let a = 0.5 * (nu + 1.0);
    let b = 0.5 * (nu - 1.0);
    Ok(a * a.log2() - b * b.log2())
}

/// Bob's measurement at the level needed for the entropic quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BobMeasurement {
    Homodyne { sigma_x: f64, phi: f64 },
    DoubleHomodyne(DhPovmParams),
}

impl BobMeasurement {
    pub fn homodyne(cfg: &HomodyneConfig) -> Self {
        BobMeasurement::Homodyne {
            sigma_x: quadrature_map(cfg).sigma_x,
            phi: cfg.phase(),
        }
    }

    pub fn double_homodyne(cfg: &DoubleHomodyneConfig) -> Self {
        BobMeasurement::DoubleHomodyne(dh_povm_params(cfg))
    }

    pub fn is_double(&self) -> bool {
        matches!(self, BobMeasurement::DoubleHomodyne(_))
    }
}

/// Receiver hardware, converted to a [`BobMeasurement`] on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Receiver {
    Homodyne(HomodyneConfig),
    DoubleHomodyne(DoubleHomodyneConfig),
}

impl Receiver {
    pub fn measurement(&self) -> BobMeasurement {
        match self {
            Receiver::Homodyne(c) => BobMeasurement::homodyne(c),
            Receiver::DoubleHomodyne(c) => BobMeasurement::double_homodyne(c),
        }
    }

    /// Replace the (signal) beam splitter.
    pub fn with_splitter(&self, bs: BeamSplitter) -> Receiver {
        match *self {
            Receiver::Homodyne(mut c) => {
                c.bs = bs;
                Receiver::Homodyne(c)
            }
            Receiver::DoubleHomodyne(mut c) => {
                c.bs_signal = bs;
                Receiver::DoubleHomodyne(c)
            }
        }
    }
}

/// `½ log₂(1 + 4TV_A/(σ_x + ξ))`
pub fn mutual_info_h(ch: &ChannelParams, pr: &ProtocolParams, sigma_x: f64) -> f64 {
    0.5 * (1.0 + 4.0 * ch.t * pr.v_a / (sigma_x + ch.xi)).log2()
}

/// `½ Σ_i log₂(1 + 4TV_A/(2σ_i + ξ))`
pub fn mutual_info_dh(ch: &ChannelParams, pr: &ProtocolParams, sigma1: f64, sigma2: f64) -> f64 {
    [sigma1, sigma2]
        .iter()
        .map(|s| 0.5 * (1.0 + 4.0 * ch.t * pr.v_a / (2.0 * s + ch.xi)).log2())
        .sum()
}

pub fn mutual_info(meas: &BobMeasurement, ch: &ChannelParams, pr: &ProtocolParams) -> f64 {
    match meas {
        BobMeasurement::Homodyne { sigma_x, .. } => mutual_info_h(ch, pr, *sigma_x),
        BobMeasurement::DoubleHomodyne(p) => mutual_info_dh(ch, pr, p.sigma1, p.sigma2),
    }
}

/// Joint covariance of (Alice's amplitude component, Bob's outcome) for
/// each measured quadrature. Homodyne: `x = 2a + noise`; double homodyne:
/// `x_i = a_i + noise`.
pub fn mi_blocks(meas: &BobMeasurement, ch: &ChannelParams, pr: &ProtocolParams) -> Vec<Matrix2<f64>> {
    let s = ch.t * pr.v_a;
    match meas {
        BobMeasurement::Homodyne { sigma_x, .. } => {
            vec![Matrix2::new(s, 2.0 * s, 2.0 * s, 4.0 * s + sigma_x + ch.xi)]
        }
        BobMeasurement::DoubleHomodyne(p) => [p.sigma1, p.sigma2]
            .iter()
            .map(|sig| Matrix2::new(s, s, s, s + 0.25 * (2.0 * sig + ch.xi)))
            .collect(),
    }
}

/// `½ Σ log₂(Σ₁₁Σ₂₂/det Σ)` over the blocks of [`mi_blocks`].
pub fn mi_determinant_form(meas: &BobMeasurement, ch: &ChannelParams, pr: &ProtocolParams) -> f64 {
    mi_blocks(meas, ch, pr)
        .iter()
        .map(|m| 0.5 * (m[(0, 0)] * m[(1, 1)] / m.determinant()).log2())
        .sum()
}

/// Mutual information from direct numerical integration of
/// `p(a) p(x|a) log₂(p(x|a)/p(x))`, with the marginal `p(x)` itself
/// obtained by quadrature.
pub fn mi_integration_oracle(meas: &BobMeasurement, ch: &ChannelParams, pr: &ProtocolParams) -> Result<f64> {
    let prior = ch.t * pr.v_a;
    // (gain, noise variance) per measured quadrature
    let channels: Vec<(f64, f64)> = match meas {
        BobMeasurement::Homodyne { sigma_x, .. } => vec![(2.0, sigma_x + ch.xi)],
        BobMeasurement::DoubleHomodyne(p) => [p.sigma1, p.sigma2]
            .iter()
            .map(|s| (1.0, 0.25 * (2.0 * s + ch.xi)))
            .collect(),
    };
    let mut total = 0.0;
    for (gain, noise) in channels {
        let sd_a = prior.sqrt();
        let sd_x = (gain * gain * prior + noise).sqrt();
        let a_pts = |x: f64| gaussian_cover(&[(0.0, sd_a), (x / gain, noise.sqrt() / gain)], 12.0);
        let outer = |x: f64| -> Result<f64> {
            let px = integrate(|a| gauss(a, prior) * gauss(x - gain * a, noise), &a_pts(x), 1e-14)?;
            if px <= 0.0 {
                return Ok(0.0);
            }
            let cross = integrate(
                |a| {
                    let c = gauss(x - gain * a, noise);
                    if c > 0.0 {
                        gauss(a, prior) * c * c.log2()
                    } else {
                        0.0
                    }
                },
                &a_pts(x),
                1e-14,
            )?;
            Ok(cross - px * px.log2())
        };
        let failure = std::cell::RefCell::new(None);
        let v = integrate(
            |x| match outer(x) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            &gaussian_cover(&[(0.0, sd_x)], 12.0),
            1e-10,
        )?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        total += v;
    }
    Ok(total)
}

/// Conditional symplectic eigenvalue of Alice's mode after Bob's ideal
/// measurement on the noisy state.
///
/// Homodyne: `ν₃ = √(V(V − c²/(V_B + σ_N)))`.
/// Double homodyne: `ν₃ = V √(Π_i (V_B + δ_i − c²/V) / Π_i (V_B + δ_i))`,
/// independent of the squeezing parameter.
pub fn conditional_nu3(meas: &BobMeasurement, covab: &CovAB) -> Result<f64> {
    let (v, c2, vb) = (covab.v, covab.c * covab.c, covab.v_b);
    let nu3 = match meas {
        BobMeasurement::Homodyne { sigma_x, .. } => {
            let sigma_n = (sigma_x - 1.0).max(0.0);
            (v * (v - c2 / (vb + sigma_n))).sqrt()
        }
        BobMeasurement::DoubleHomodyne(p) => {
            let num = (vb + p.delta1 - c2 / v) * (vb + p.delta2 - c2 / v);
            let den = (vb + p.delta1) * (vb + p.delta2);
            v * (num / den).sqrt()
        }
    };
    if !(nu3 >= 1.0 - NU_TOL) {
        return Err(Error::Domain(format!("conditional symplectic eigenvalue ν3 = {nu3} is below one")));
    }
    Ok(nu3)
}

/// Measurement noise covariance placed in Bob's block. For double homodyne
/// this is `R(φ) diag(δ₁ − e^{2r}, δ₂ − e^{−2r}) R(φ)ᵀ`, which is only
/// positive semi-definite inside the admissible interval.
pub fn measurement_noise(meas: &BobMeasurement, r: f64) -> Cov2 {
    match meas {
        BobMeasurement::Homodyne { sigma_x, phi } => Cov2::diag((sigma_x - 1.0).max(0.0), 0.0).rotated(*phi),
        BobMeasurement::DoubleHomodyne(p) => {
            Cov2::diag(p.delta1 - (2.0 * r).exp(), p.delta2 - (-2.0 * r).exp()).rotated(p.phi)
        }
    }
}

/// Covariance of an ideal double homodyne measurement onto squeezed states,
/// `R(φ) diag(e^{2r}, e^{−2r}) R(φ)ᵀ`.
pub fn ideal_dh_covariance(r: f64, phi: f64) -> Cov2 {
    Cov2::diag((2.0 * r).exp(), (-2.0 * r).exp()).rotated(phi)
}

fn to_matrix2(m: &Cov2) -> Matrix2<f64> {
    Matrix2::new(m.xx, m.xp, m.xp, m.pp)
}

/// General partial-measurement route to `ν₃`, evaluated on the 4×4 blocks.
/// Homodyne conditions on the quadrature along `(cos φ, sin φ)`; double
/// homodyne on the squeezed-state measurement with parameter `r`.
pub fn conditional_nu3_oracle(meas: &BobMeasurement, base: &CovAB, r: f64) -> Result<f64> {
    let noisy = base.with_noise_unchecked(base.noise.add(&measurement_noise(meas, r)));
    let full = noisy.matrix();
    let a: Matrix2<f64> = full.fixed_view::<2, 2>(0, 0).into();
    let c: Matrix2<f64> = full.fixed_view::<2, 2>(0, 2).into();
    let b: Matrix2<f64> = full.fixed_view::<2, 2>(2, 2).into();
    let cond = match meas {
        BobMeasurement::Homodyne { phi, .. } => {
            let u = nalgebra::Vector2::new(phi.cos(), phi.sin());
            let denom = (u.transpose() * b * u)[(0, 0)];
            a - c * u * u.transpose() * c.transpose() / denom
        }
        BobMeasurement::DoubleHomodyne(p) => {
            let m = b + to_matrix2(&ideal_dh_covariance(r, p.phi));
            let inv = m
                .try_inverse()
                .ok_or_else(|| Error::Domain("singular measurement covariance".into()))?;
            a - c * inv * c.transpose()
        }
    };
    let det = cond.determinant();
    if !(det >= 0.0) {
        return Err(Error::Domain(format!("conditional covariance has negative determinant {det}")));
    }
    Ok(det.sqrt())
}

/// Holevo information and the eigenvalues it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoResult {
    pub chi: f64,
    /// Joint entropy `S_AB = g(ν₁) + g(ν₂)`.
    pub s_ab: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

/// `χ = g(ν₁) + g(ν₂) − g(ν₃)` at a given squeezing parameter (ignored for
/// homodyne detection).
///
/// The symplectic guard runs first, so a parameter far outside the interval
/// reports [`Error::Unphysical`]; one that keeps the state physical but
/// makes the noise covariance indefinite reports [`Error::Domain`].
pub fn holevo_at(meas: &BobMeasurement, ch: &ChannelParams, pr: &ProtocolParams, r: f64) -> Result<HolevoResult> {
    let base = ab_covariance(ch, pr);
    let noisy = base.with_noise_unchecked(measurement_noise(meas, r));
    let (nu1, nu2) = symplectic_eigs_joint(&noisy)?;
    if let BobMeasurement::DoubleHomodyne(p) = meas {
        let (r2, r1) = squeezing_interval(p);
        if r > r1.max(r2) + INTERVAL_TOL || r < r2.min(r1) - INTERVAL_TOL {
            return Err(Error::Domain(format!(
                "squeezing parameter r = {r} lies outside the admissible interval [{r2}, {r1}]"
            )));
        }
    }
    let nu3 = conditional_nu3(meas, &base)?;
    let s_ab = entropy_g(nu1)? + entropy_g(nu2)?;
    let mut chi = s_ab - entropy_g(nu3)?;
    if chi < 0.0 && chi > -1e-10 {
        chi = 0.0;
    }
    Ok(HolevoResult { chi, s_ab, nu1, nu2, nu3 })
}

/// Number of points in the coarse scan that brackets the maximum before
/// the golden-section refinement.
const R_SCAN_POINTS: usize = 32;

/// Squeezing parameter maximising `χ` over the admissible interval.
pub fn optimize_r(p: &DhPovmParams, ch: &ChannelParams, pr: &ProtocolParams) -> Result<(f64, HolevoResult)> {
    let meas = BobMeasurement::DoubleHomodyne(*p);
    let (r2, r1) = squeezing_interval(p);
    if r1 - r2 <= INTERVAL_TOL {
        let r = 0.5 * (r1 + r2);
        return Ok((r, holevo_at(&meas, ch, pr, r)?));
    }
    let chi = |r: f64| holevo_at(&meas, ch, pr, r).map(|h| h.chi).unwrap_or(f64::NEG_INFINITY);
    let step = (r1 - r2) / R_SCAN_POINTS as f64;
    let scan: Vec<f64> = (0..=R_SCAN_POINTS).map(|k| chi(r2 + k as f64 * step)).collect();
    let (best, best_val) = scan
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
    if best_val == f64::NEG_INFINITY {
        return Err(Error::Unphysical { nu: f64::NAN });
    }
    let lo = r2 + best.saturating_sub(1) as f64 * step;
    let hi = (r2 + (best + 1) as f64 * step).min(r1);
    let m = golden_section_max(chi, lo, hi, R_TOL);
    let r = if m.value >= best_val { m.x } else { r2 + best as f64 * step };
    Ok((r, holevo_at(&meas, ch, pr, r)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityReport {
    pub mutual_info_bits: f64,
    pub holevo_bits: f64,
    /// Optimal squeezing parameter; zero for homodyne detection.
    pub r_opt: f64,
    pub secret_fraction_bits: f64,
    pub nu: (f64, f64, f64),
    pub s_ab: f64,
}

/// `K = βI_AB − χ`, with `χ` maximised over `r` for double homodyne.
pub fn secret_fraction(meas: &BobMeasurement, ch: &ChannelParams, pr: &ProtocolParams) -> Result<SecurityReport> {
    let i_ab = mutual_info(meas, ch, pr);
    let (r_opt, h) = match meas {
        BobMeasurement::Homodyne { .. } => (0.0, holevo_at(meas, ch, pr, 0.0)?),
        BobMeasurement::DoubleHomodyne(p) => optimize_r(p, ch, pr)?,
    };
    Ok(SecurityReport {
        mutual_info_bits: i_ab,
        holevo_bits: h.chi,
        r_opt,
        secret_fraction_bits: pr.beta * i_ab - h.chi,
        nu: (h.nu1, h.nu2, h.nu3),
        s_ab: h.s_ab,
    })
}

/// Two-mode squeezed vacuum covariance with `cosh 2r = 1 + 4V_A`.
pub fn tmsv_covariance(v_a: f64) -> Result<Matrix4<f64>> {
    ProtocolParams::new(v_a, 0.5)?;
    let v = 1.0 + 4.0 * v_a;
    let s = (v * v - 1.0).sqrt();
    Ok(Matrix4::new(
        v, 0.0, s, 0.0, //
        0.0, v, 0.0, -s, //
        s, 0.0, v, 0.0, //
        0.0, -s, 0.0, v,
    ))
}

/// Heterodyne measurement of one TMSV mode: returns the conditional
/// covariance of the other mode and the covariance of its conditional mean.
/// They equal the vacuum and `4V_A·𝟙`, the second moments of the
/// prepare-and-measure ensemble.
pub fn heterodyne_conditioning(tmsv: &Matrix4<f64>) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    let a: Matrix2<f64> = tmsv.fixed_view::<2, 2>(0, 0).into();
    let c: Matrix2<f64> = tmsv.fixed_view::<2, 2>(0, 2).into();
    let b: Matrix2<f64> = tmsv.fixed_view::<2, 2>(2, 2).into();
    let inv = (a + Matrix2::identity())
        .try_inverse()
        .ok_or_else(|| Error::Domain("singular heterodyne covariance".into()))?;
    let displacement = c.transpose() * inv * c;
    Ok((b - displacement, displacement))
}

/// Axis of a security sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecurityAxis {
    /// `C²` of the homodyne splitter or `C_S²` of the double homodyne signal
    /// splitter.
    BsTransmittance,
    /// Fibre length in km.
    ChannelLength,
    /// Fixed squeezing parameter (double homodyne only; no optimisation).
    SqueezingR,
}

impl SecurityAxis {
    pub const ALL: [SecurityAxis; 3] = [
        SecurityAxis::BsTransmittance,
        SecurityAxis::ChannelLength,
        SecurityAxis::SqueezingR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SecurityAxis::BsTransmittance => "bs_transmittance",
            SecurityAxis::ChannelLength => "channel_length",
            SecurityAxis::SqueezingR => "squeezing_r",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

/// One sweep point. Points that fail numerically keep their row with a
/// status describing the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityRow {
    pub axis_value: f64,
    pub outcome: std::result::Result<SecurityReport, String>,
}

impl SecurityRow {
    pub fn status(&self) -> &str {
        match &self.outcome {
            Ok(_) => "ok",
            Err(s) => s,
        }
    }
}

/// Short machine-readable label for a failed sweep point.
pub fn status_label(e: &Error) -> String {
    match e {
        Error::Unphysical { .. } => "nu_below_one".into(),
        Error::Domain(msg) if msg.contains("interval") => "r_outside_interval".into(),
        Error::Domain(msg) if msg.contains("ν3") => "nu3_below_one".into(),
        Error::Domain(_) => "domain_error".into(),
        Error::InvalidParameter { name, .. } => format!("invalid_{name}"),
        Error::Truncation { .. } => "truncation".into(),
        Error::Quadrature(_) => "quadrature_failure".into(),
        Error::Unsupported(_) => "unsupported".into(),
    }
}

fn evaluate_point(
    axis: SecurityAxis,
    value: f64,
    receiver: &Receiver,
    ch: &ChannelParams,
    pr: &ProtocolParams,
) -> Result<SecurityReport> {
    match axis {
        SecurityAxis::BsTransmittance => {
            let rx = receiver.with_splitter(BeamSplitter::new(value)?);
            secret_fraction(&rx.measurement(), ch, pr)
        }
        SecurityAxis::ChannelLength => {
            let ch = ChannelParams::from_length(value, ch.xi)?;
            secret_fraction(&receiver.measurement(), &ch, pr)
        }
        SecurityAxis::SqueezingR => {
            let meas = receiver.measurement();
            if !meas.is_double() {
                return Err(Error::Unsupported("squeezing sweeps need a double homodyne receiver".into()));
            }
            let h = holevo_at(&meas, ch, pr, value)?;
            let i_ab = mutual_info(&meas, ch, pr);
            Ok(SecurityReport {
                mutual_info_bits: i_ab,
                holevo_bits: h.chi,
                r_opt: value,
                secret_fraction_bits: pr.beta * i_ab - h.chi,
                nu: (h.nu1, h.nu2, h.nu3),
                s_ab: h.s_ab,
            })
        }
    }
}

/// Evaluate the security report at every grid value, in grid order.
/// Invalid parameters abort the sweep; numerical failures are recorded.
pub fn security_sweep(
    axis: SecurityAxis,
    grid: &[f64],
    receiver: &Receiver,
    ch: &ChannelParams,
    pr: &ProtocolParams,
    exec: Execution,
) -> Result<Vec<SecurityRow>> {
    check_grid(grid)?;
    if axis == SecurityAxis::SqueezingR && !receiver.measurement().is_double() {
        return Err(invalid("axis", "squeezing_r sweeps need a double homodyne receiver"));
    }
    exec.map(grid, |&value| match evaluate_point(axis, value, receiver, ch, pr) {
        Ok(report) => Ok(SecurityRow { axis_value: value, outcome: Ok(report) }),
        Err(e @ Error::InvalidParameter { .. }) => Err(e),
        Err(e) => Ok(SecurityRow { axis_value: value, outcome: Err(status_label(&e)) }),
    })
    .into_iter()
    .collect()
}

/// Largest channel length with a positive secret fraction, located by
/// bisection to `tol_km`. `None` if the fraction stays positive up to
/// `max_km`; `Some(0.0)` if it is not positive even at zero length.
pub fn cutoff_length(
    receiver: &Receiver,
    xi: f64,
    pr: &ProtocolParams,
    max_km: f64,
    tol_km: f64,
) -> Result<Option<f64>> {
    let meas = receiver.measurement();
    let k = |l: f64| -> Result<f64> {
        let ch = ChannelParams::from_length(l, xi)?;
        Ok(secret_fraction(&meas, &ch, pr)?.secret_fraction_bits)
    };
    if k(0.0)? <= 0.0 {
        return Ok(Some(0.0));
    }
    if k(max_km)? > 0.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, max_km);
    while hi - lo > tol_km {
        let mid = 0.5 * (lo + hi);
        if k(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
