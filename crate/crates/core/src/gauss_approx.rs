//! Gaussian approximations of the photocount-difference statistics and the
//! maps between count differences and field quadratures.
//!
//! Quadratures use the convention `⟨x̂_φ⟩ = 2 Re(α e^{−iφ})`, so the vacuum
//! has unit variance.

use statrs::function::erf::erfc;

use crate::error::Result;
use crate::photostat::{
    count_window, fock_average, fock_window, Amplitude, BeamSplitter, CountDistribution,
    DetectorPair, DoubleHomodyneConfig, HomodyneConfig, SignalState, MAX_FOCK,
};
use crate::special::gauss;
use crate::Error;

/// `⟨x̂_φ⟩ = 2 Re(α e^{−iφ})` for a coherent state.
pub fn quadrature_mean(alpha: Amplitude, phi: f64) -> f64 {
    2.0 * (alpha * Amplitude::from_polar(1.0, -phi)).re
}

/// `P_G(μ) = G(μ − μ_G; σ_G)`, optionally divided by `N_G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianApprox {
    pub mu_g: f64,
    pub sigma_g: f64,
    /// Discrete normalisation `N_G = Σ_μ G(μ − μ_G; σ_G)`.
    pub norm_const: f64,
    /// Whether [`GaussianApprox::pmf`] divides by `norm_const`.
    pub renormalized: bool,
}

impl GaussianApprox {
    pub fn new(mu_g: f64, sigma_g: f64, renormalized: bool) -> Self {
        Self {
            mu_g,
            sigma_g,
            norm_const: normalization_constant(mu_g, sigma_g),
            renormalized,
        }
    }

    pub fn pmf(&self, mu: f64) -> f64 {
        let p = gauss(mu - self.mu_g, self.sigma_g);
        if self.renormalized {
            p / self.norm_const
        } else {
            p
        }
    }

    /// Density evaluated at the integers of the truncation window.
    pub fn distribution(&self) -> CountDistribution {
        let (lo, hi) = count_window(self.mu_g, self.sigma_g);
        let d = CountDistribution::from_fn(lo, hi, |mu| self.pmf(mu as f64));
        let scale = if self.renormalized { 1.0 / self.norm_const } else { 1.0 };
        d.with_tail_mass(scale * gaussian_tail(self.mu_g, self.sigma_g, lo, hi))
    }
}

/// Continuous Gaussian mass outside `[lo − ½, hi + ½]`.
fn gaussian_tail(mean: f64, variance: f64, lo: i64, hi: i64) -> f64 {
    let s = (2.0 * variance).sqrt();
    0.5 * erfc((mean - (lo as f64 - 0.5)) / s) + 0.5 * erfc((hi as f64 + 0.5 - mean) / s)
}

/// Strong-LO Gaussian approximation
/// `σ_G = (η₁S² + η₂C²)|α_L|²`,
/// `μ_G = (η₁S² − η₂C²)|α_L|² + CS(η₁+η₂)|α_L|⟨x̂_φ⟩`.
///
/// The result is renormalised by `N_G` when `|α_L|` is below
/// [`renorm_threshold`].
pub fn gaussian_params(cfg: &HomodyneConfig, alpha: Amplitude) -> GaussianApprox {
    let (c2, s2, cs) = (cfg.bs.c2(), cfg.bs.s2(), cfg.bs.cs());
    let (e1, e2) = (cfg.detectors.eta1(), cfg.detectors.eta2());
    let lo = cfg.lo_amplitude();
    let lo2 = lo * lo;
    let sigma_g = (e1 * s2 + e2 * c2) * lo2;
    let mu_g = (e1 * s2 - e2 * c2) * lo2 + cs * (e1 + e2) * lo * quadrature_mean(alpha, cfg.phase());
    GaussianApprox::new(mu_g, sigma_g, lo < renorm_threshold(cfg))
}

/// Affine map between count differences and quadrature values,
/// `x = μ / scale − offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMap {
    pub scale: f64,
    pub offset: f64,
    /// Variance of `x` in the Gaussian approximation.
    pub sigma_x: f64,
}

impl QuadratureMap {
    pub fn x_of_mu(&self, mu: f64) -> f64 {
        mu / self.scale - self.offset
    }

    pub fn mu_of_x(&self, x: f64) -> f64 {
        (x + self.offset) * self.scale
    }
}

pub fn quadrature_map(cfg: &HomodyneConfig) -> QuadratureMap {
    let (c2, s2, cs) = (cfg.bs.c2(), cfg.bs.s2(), cfg.bs.cs());
    let (e1, e2) = (cfg.detectors.eta1(), cfg.detectors.eta2());
    QuadratureMap {
        scale: (e1 + e2) * cs * cfg.lo_amplitude(),
        offset: (e1 * s2 - e2 * c2) * cfg.lo_amplitude() / ((e1 + e2) * cs),
        sigma_x: sigma_x(&cfg.bs, &cfg.detectors),
    }
}

/// `σ_x = (η₁S² + η₂C²) / ((η₁+η₂)CS)² = (η₁/C² + η₂/S²) / (η₁+η₂)²`.
pub fn sigma_x(bs: &BeamSplitter, det: &DetectorPair) -> f64 {
    let (e1, e2) = (det.eta1(), det.eta2());
    (e1 / bs.c2() + e2 / bs.s2()) / ((e1 + e2) * (e1 + e2))
}

/// Minimum of `σ_x` over the splitter transmittance and its location:
/// `(((√η₁+√η₂)/(η₁+η₂))², √η₁/(√η₁+√η₂))`.
pub fn min_sigma_x(eta1: f64, eta2: f64) -> Result<(f64, f64)> {
    DetectorPair::new(eta1, eta2)?;
    let (r1, r2) = (eta1.sqrt(), eta2.sqrt());
    let value = ((r1 + r2) / (eta1 + eta2)).powi(2);
    Ok((value, r1 / (r1 + r2)))
}

/// Below this variance the theta series needs too many terms and the
/// direct lattice sum is cheaper.
const THETA_MIN_SIGMA: f64 = 0.05;
const THETA_MAX_TERMS: usize = 10;

/// `N_G = ϑ₃(πμ_G, e^{−2π²σ_G}) = 1 + 2 Σ_{n≥1} e^{−2π²σ_G n²} cos(2πnμ_G)`.
pub fn normalization_constant(mu_g: f64, sigma_g: f64) -> f64 {
    debug_assert!(sigma_g > 0.0);
    if sigma_g < THETA_MIN_SIGMA {
        return direct_lattice_sum(mu_g, sigma_g);
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let a = -two_pi * std::f64::consts::PI * sigma_g;
    let mut sum = 1.0;
    for n in 1..=THETA_MAX_TERMS {
        let nf = n as f64;
        let q = (a * nf * nf).exp();
        sum += 2.0 * q * (two_pi * nf * mu_g).cos();
        if 2.0 * q < 1e-16 {
            break;
        }
    }
    sum
}

/// `Σ_μ G(μ − μ_G; σ)` summed over every integer within 40 standard
/// deviations.
pub fn direct_lattice_sum(mu_g: f64, sigma_g: f64) -> f64 {
    let half = 40.0 * sigma_g.sqrt() + 2.0;
    let lo = (mu_g - half).floor() as i64;
    let hi = (mu_g + half).ceil() as i64;
    (lo..=hi).map(|mu| gauss(mu as f64 - mu_g, sigma_g)).sum()
}

/// `α_N = 1/√(2(η₁S² + η₂C²))`, the LO amplitude at which `2σ_G = 1`.
pub fn renorm_threshold(cfg: &HomodyneConfig) -> f64 {
    let (e1, e2) = (cfg.detectors.eta1(), cfg.detectors.eta2());
    1.0 / (2.0 * (e1 * cfg.bs.s2() + e2 * cfg.bs.c2())).sqrt()
}

/// Gaussian approximation obtained from the large-argument asymptotics of
/// the Bessel function in the Skellam law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltGaussianApprox {
    pub mu_g_tilde: f64,
    pub sigma_g_tilde: f64,
    pub sigma_x_tilde: f64,
    /// `σ̃_x − 1`; negative values make the associated POVM ill-posed.
    pub sigma_n_tilde: f64,
    pub well_posed: bool,
}

impl AltGaussianApprox {
    pub fn pmf(&self, mu: f64) -> f64 {
        gauss(mu - self.mu_g_tilde, self.sigma_g_tilde)
    }

    pub fn distribution(&self) -> CountDistribution {
        let (lo, hi) = count_window(self.mu_g_tilde, self.sigma_g_tilde);
        CountDistribution::from_fn(lo, hi, |mu| self.pmf(mu as f64))
            .with_tail_mass(gaussian_tail(self.mu_g_tilde, self.sigma_g_tilde, lo, hi))
    }
}

/// `μ̃_G = √(η₁η₂)[CS|α_L|² ln(η₁S²/(η₂C²)) + |α_L|⟨x̂_φ⟩]`,
/// `σ̃_G = 2CS√(η₁η₂)|α_L|²`, `σ̃_x = 2CS/√(η₁η₂)`.
pub fn bessel_gaussian_params(cfg: &HomodyneConfig, alpha: Amplitude) -> AltGaussianApprox {
    let (c2, s2, cs) = (cfg.bs.c2(), cfg.bs.s2(), cfg.bs.cs());
    let (e1, e2) = (cfg.detectors.eta1(), cfg.detectors.eta2());
    let root = (e1 * e2).sqrt();
    let lo = cfg.lo_amplitude();
    let mu_g_tilde = root
        * (cs * lo * lo * ((e1 * s2) / (e2 * c2)).ln() + lo * quadrature_mean(alpha, cfg.phase()));
    let sigma_g_tilde = 2.0 * cs * root * lo * lo;
    let sigma_x_tilde = 2.0 * cs / root;
    let sigma_n_tilde = sigma_x_tilde - 1.0;
    AltGaussianApprox {
        mu_g_tilde,
        sigma_g_tilde,
        sigma_x_tilde,
        sigma_n_tilde,
        well_posed: sigma_n_tilde >= 0.0,
    }
}

/// Which Gaussian approximation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approximation {
    /// Strong-LO form with theta-function renormalisation.
    Main,
    /// Bessel-asymptotic form.
    Bessel,
}

impl Approximation {
    pub fn pmf(self, cfg: &HomodyneConfig, alpha: Amplitude, mu: f64) -> f64 {
        match self {
            Approximation::Main => gaussian_params(cfg, alpha).pmf(mu),
            Approximation::Bessel => bessel_gaussian_params(cfg, alpha).pmf(mu),
        }
    }

    fn center(self, cfg: &HomodyneConfig, alpha: Amplitude) -> (f64, f64) {
        match self {
            Approximation::Main => {
                let g = gaussian_params(cfg, alpha);
                (g.mu_g, g.sigma_g)
            }
            Approximation::Bessel => {
                let g = bessel_gaussian_params(cfg, alpha);
                (g.mu_g_tilde, g.sigma_g_tilde)
            }
        }
    }
}

/// Approximate count-difference distribution for any supported signal.
///
/// Fock states are handled by applying the Fock P-function to the
/// coherent-state approximation, which is linear in the state.
pub fn approx_distribution(
    approx: Approximation,
    cfg: &HomodyneConfig,
    signal: &SignalState,
) -> Result<CountDistribution> {
    match *signal {
        SignalState::Coherent(alpha) => Ok(match approx {
            Approximation::Main => gaussian_params(cfg, alpha).distribution(),
            Approximation::Bessel => bessel_gaussian_params(cfg, alpha).distribution(),
        }),
        SignalState::Fock(n) => {
            if n > MAX_FOCK {
                return Err(Error::Unsupported(format!(
                    "Fock number {n} exceeds the supported maximum {MAX_FOCK}"
                )));
            }
            let (mean, var) = approx.center(cfg, Amplitude::new(0.0, 0.0));
            let widen = 2.0 * n as f64 + 1.0;
            let (glo, ghi) = count_window(mean, var * widen);
            let (flo, fhi) = fock_window(cfg, n);
            let (lo, hi) = (glo.min(flo), ghi.max(fhi));
            let d = CountDistribution::try_from_fn(lo, hi, |mu| {
                fock_average(n, |alpha| approx.pmf(cfg, alpha, mu as f64))
            })?;
            // x^{2n} e^{−x²/2} tails of the Fock quadrature distribution
            let z2 = ((hi - lo) as f64 / 2.0).powi(2) / (var * widen);
            let tail = gaussian_tail(mean, var * widen, lo, hi) * (1.0 + z2).powi(n as i32);
            Ok(d.with_tail_mass(tail))
        }
    }
}

/// Quadrature statistics of a double homodyne receiver in the variables
/// `(x₁, x₂)` whose means are `(Re αe^{−iφ}, Im αe^{−iφ})`.
///
/// The joint density is
/// `exp(−(x₁−a₁)²/σ₁ − (x₂−a₂)²/σ₂) / (π√(σ₁σ₂))`, so each axis has
/// variance `σ_i/2`; ideal balanced detection gives `σ₁ = σ₂ = 1` and the
/// coherent-state Husimi function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhQuadrature {
    pub sigma1: f64,
    pub sigma2: f64,
    /// Per-arm homodyne `σ_x`.
    pub sigma_x1: f64,
    pub sigma_x2: f64,
    pub phi: f64,
}

impl DhQuadrature {
    pub fn density(&self, alpha: Amplitude, x1: f64, x2: f64) -> f64 {
        let m = alpha * Amplitude::from_polar(1.0, -self.phi);
        let e = (x1 - m.re).powi(2) / self.sigma1 + (x2 - m.im).powi(2) / self.sigma2;
        (-e).exp() / (std::f64::consts::PI * (self.sigma1 * self.sigma2).sqrt())
    }
}

/// `σ₁ = σ_x^{(1)}/(2C_S²)`, `σ₂ = σ_x^{(2)}/(2S_S²)`.
pub fn dh_quadrature(cfg: &DoubleHomodyneConfig) -> DhQuadrature {
    let sigma_x1 = sigma_x(&cfg.arm1.bs, &cfg.arm1.detectors);
    let sigma_x2 = sigma_x(&cfg.arm2.bs, &cfg.arm2.detectors);
    DhQuadrature {
        sigma1: sigma_x1 / (2.0 * cfg.bs_signal.c2()),
        sigma2: sigma_x2 / (2.0 * cfg.bs_signal.s2()),
        sigma_x1,
        sigma_x2,
        phi: cfg.phase(),
    }
}

/// Gaussian double homodyne density at `(x₁, x₂)`.
pub fn dh_gaussian_pmf(cfg: &DoubleHomodyneConfig, alpha: Amplitude, x1: f64, x2: f64) -> f64 {
    dh_quadrature(cfg).density(alpha, x1, x2)
}

/// Map arm count differences to `(x₁, x₂)`. The second arm's LO carries a
/// `−i`, so its quadrature measures `−Im(αe^{−iφ})`; the sign is flipped
/// here.
pub fn dh_counts_to_quadratures(cfg: &DoubleHomodyneConfig, mu1: f64, mu2: f64) -> Result<(f64, f64)> {
    let [c1, c2] = cfg.arm_configs()?;
    let (m1, m2) = (quadrature_map(&c1), quadrature_map(&c2));
    let x1 = m1.x_of_mu(mu1) / (2.0 * cfg.bs_signal.c());
    let x2 = -m2.x_of_mu(mu2) / (2.0 * cfg.bs_signal.s());
    Ok((x1, x2))
}

/// Per-arm Gaussian count distributions of a double homodyne receiver.
pub fn dh_gaussian_joint(
    cfg: &DoubleHomodyneConfig,
    alpha: Amplitude,
) -> Result<crate::photostat::JointDistribution> {
    let [c1, c2] = cfg.arm_configs()?;
    let [a1, a2] = cfg.arm_signals(alpha);
    Ok(crate::photostat::JointDistribution {
        first: gaussian_params(&c1, a1).distribution(),
        second: gaussian_params(&c2, a2).distribution(),
    })
}
