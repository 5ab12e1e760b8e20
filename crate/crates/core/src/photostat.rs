//! Exact photocount-difference statistics of homodyne and eight-port double
//! homodyne receivers with unbalanced beam splitters and mismatched detector
//! efficiencies.
//!
//! A coherent signal `α` mixed with a local oscillator `α_L` on a beam
//! splitter with real amplitudes `(C, S)` produces coherent outputs
//! `α₁ = Cα + Sα_L`, `α₂ = −Sα + Cα_L`. Each detector sees Poisson counts with
//! mean `λ_i = η_i|α_i|²`, so the count difference `μ = m₁ − m₂` is Skellam
//! distributed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::special::{ln_bessel_i, ln_poisson};

/// Complex field amplitude in units where `|α|²` is the mean photon number.
pub type Amplitude = Complex64;

/// Beam splitter described by its intensity transmittance `C² = cos²θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    transmittance_sq: f64,
}

impl BeamSplitter {
    pub fn new(transmittance_sq: f64) -> Result<Self> {
        if !(transmittance_sq > 0.0 && transmittance_sq < 1.0) {
            return Err(invalid(
                "transmittance_sq",
                format!("must lie strictly inside (0, 1), got {transmittance_sq}"),
            ));
        }
        Ok(Self { transmittance_sq })
    }

    pub fn balanced() -> Self {
        Self { transmittance_sq: 0.5 }
    }

    /// Splitter whose angle deviates from 45° by `imbalance` radians,
    /// `θ = π/4 − δθ`.
    pub fn from_imbalance_angle(imbalance: f64) -> Result<Self> {
        let theta = std::f64::consts::FRAC_PI_4 - imbalance;
        Self::new(theta.cos().powi(2))
    }

    /// `C²`
    pub fn c2(&self) -> f64 {
        self.transmittance_sq
    }

    /// `S² = 1 − C²`
    pub fn s2(&self) -> f64 {
        1.0 - self.transmittance_sq
    }

    pub fn c(&self) -> f64 {
        self.c2().sqrt()
    }

    pub fn s(&self) -> f64 {
        self.s2().sqrt()
    }

    /// `CS = √(C²S²)`
    pub fn cs(&self) -> f64 {
        (self.c2() * self.s2()).sqrt()
    }

    /// `δθ = π/4 − θ`
    pub fn imbalance_angle(&self) -> f64 {
        std::f64::consts::FRAC_PI_4 - self.c().acos()
    }
}

/// Quantum efficiencies of the two photodetectors behind a beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorPair {
    eta1: f64,
    eta2: f64,
}

impl DetectorPair {
    pub fn new(eta1: f64, eta2: f64) -> Result<Self> {
        for (name, eta) in [("eta1", eta1), ("eta2", eta2)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(invalid(name, format!("efficiency must lie in (0, 1], got {eta}")));
            }
        }
        Ok(Self { eta1, eta2 })
    }

    pub fn ideal() -> Self {
        Self { eta1: 1.0, eta2: 1.0 }
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }
}

/// Single homodyne receiver: beam splitter, detectors and local oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneConfig {
    pub bs: BeamSplitter,
    pub detectors: DetectorPair,
    lo: Amplitude,
}

impl HomodyneConfig {
    pub fn new(bs: BeamSplitter, detectors: DetectorPair, lo: Amplitude) -> Result<Self> {
        if !(lo.re.is_finite() && lo.im.is_finite()) || lo.norm() == 0.0 {
            return Err(invalid("lo", "local oscillator amplitude must be finite and non-zero"));
        }
        Ok(Self { bs, detectors, lo })
    }

    /// Balanced splitter, perfect detectors, real LO amplitude.
    pub fn ideal(lo_amplitude: f64) -> Result<Self> {
        Self::new(
            BeamSplitter::balanced(),
            DetectorPair::ideal(),
            Amplitude::new(lo_amplitude, 0.0),
        )
    }

    pub fn lo(&self) -> Amplitude {
        self.lo
    }

    /// `|α_L|`
    pub fn lo_amplitude(&self) -> f64 {
        self.lo.norm()
    }

    /// `φ = arg α_L`
    pub fn phase(&self) -> f64 {
        self.lo.arg()
    }

    pub fn with_lo(self, lo: Amplitude) -> Result<Self> {
        Self::new(self.bs, self.detectors, lo)
    }
}

/// Beam splitter and detectors of one arm of a double homodyne receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmConfig {
    pub bs: BeamSplitter,
    pub detectors: DetectorPair,
}

impl ArmConfig {
    pub fn ideal() -> Self {
        Self {
            bs: BeamSplitter::balanced(),
            detectors: DetectorPair::ideal(),
        }
    }
}

/// Eight-port double homodyne receiver. The signal is split by `bs_signal`,
/// the LO by `bs_lo`; the LO entering arm 2 carries an extra `−i` phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleHomodyneConfig {
    pub bs_signal: BeamSplitter,
    pub bs_lo: BeamSplitter,
    pub arm1: ArmConfig,
    pub arm2: ArmConfig,
    lo: Amplitude,
}

impl DoubleHomodyneConfig {
    pub fn new(
        bs_signal: BeamSplitter,
        bs_lo: BeamSplitter,
        arm1: ArmConfig,
        arm2: ArmConfig,
        lo: Amplitude,
    ) -> Result<Self> {
        if !(lo.re.is_finite() && lo.im.is_finite()) || lo.norm() == 0.0 {
            return Err(invalid("lo", "local oscillator amplitude must be finite and non-zero"));
        }
        Ok(Self { bs_signal, bs_lo, arm1, arm2, lo })
    }

    /// All splitters balanced, all detectors perfect.
    pub fn ideal(lo_amplitude: f64) -> Result<Self> {
        Self::new(
            BeamSplitter::balanced(),
            BeamSplitter::balanced(),
            ArmConfig::ideal(),
            ArmConfig::ideal(),
            Amplitude::new(lo_amplitude, 0.0),
        )
    }

    pub fn lo(&self) -> Amplitude {
        self.lo
    }

    pub fn phase(&self) -> f64 {
        self.lo.arg()
    }

    /// LO amplitudes entering the two arms: `C_L α_L` and `−i S_L α_L`.
    pub fn arm_lo(&self) -> [Amplitude; 2] {
        [
            self.lo * self.bs_lo.c(),
            self.lo * Amplitude::new(0.0, -self.bs_lo.s()),
        ]
    }

    /// Signal amplitudes entering the two arms: `C_S α` and `S_S α`.
    pub fn arm_signals(&self, alpha: Amplitude) -> [Amplitude; 2] {
        [alpha * self.bs_signal.c(), alpha * self.bs_signal.s()]
    }

    /// Each arm viewed as a single homodyne receiver fed by its own LO.
    pub fn arm_configs(&self) -> Result<[HomodyneConfig; 2]> {
        let [lo1, lo2] = self.arm_lo();
        Ok([
            HomodyneConfig::new(self.arm1.bs, self.arm1.detectors, lo1)?,
            HomodyneConfig::new(self.arm2.bs, self.arm2.detectors, lo2)?,
        ])
    }
}

/// State of the signal mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalState {
    Coherent(Amplitude),
    Fock(u32),
}

/// Highest Fock number with a supported P-function evaluation.
pub const MAX_FOCK: u32 = 2;

/// Probability mass over a contiguous range of integer count differences.
///
/// Exact distributions built by this crate are normalised to `1 ± 1e-8`
/// over their stored range; `tail_mass` records an estimate of whatever was
/// left outside. Gaussian approximations evaluated at integers are stored
/// in the same container without being renormalised.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDistribution {
    mu_min: i64,
    probs: Vec<f64>,
    tail_mass: f64,
}

impl CountDistribution {
    pub fn new(mu_min: i64, probs: Vec<f64>, tail_mass: f64) -> Self {
        Self { mu_min, probs, tail_mass }
    }

    /// Evaluate `f` at every integer in `mu_min..=mu_max`.
    pub fn from_fn<F: Fn(i64) -> f64>(mu_min: i64, mu_max: i64, f: F) -> Self {
        let probs = (mu_min..=mu_max).map(f).collect();
        Self { mu_min, probs, tail_mass: 0.0 }
    }

    pub fn try_from_fn<F: Fn(i64) -> Result<f64>>(mu_min: i64, mu_max: i64, f: F) -> Result<Self> {
        let probs = (mu_min..=mu_max).map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self { mu_min, probs, tail_mass: 0.0 })
    }

    pub fn with_tail_mass(mut self, tail_mass: f64) -> Self {
        self.tail_mass = tail_mass;
        self
    }

    pub fn mu_min(&self) -> i64 {
        self.mu_min
    }

    pub fn mu_max(&self) -> i64 {
        self.mu_min + self.probs.len() as i64 - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Probability of `mu`, zero outside the stored range.
    pub fn get(&self, mu: i64) -> f64 {
        let idx = mu - self.mu_min;
        if idx < 0 {
            return 0.0;
        }
        self.probs.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.mu_min + i as i64, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(mu, p)| mu as f64 * p).sum::<f64>() / self.total()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter()
            .map(|(mu, p)| (mu as f64 - m).powi(2) * p)
            .sum::<f64>()
            / self.total()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total() - 1.0).abs() <= tol
    }
}

/// Output amplitudes `(α₁, α₂) = (Cα + Sα_L, −Sα + Cα_L)`.
pub fn output_amplitudes(cfg: &HomodyneConfig, alpha: Amplitude) -> (Amplitude, Amplitude) {
    let (c, s) = (cfg.bs.c(), cfg.bs.s());
    (alpha * c + cfg.lo * s, -alpha * s + cfg.lo * c)
}

/// Mean detector counts `(λ₁, λ₂) = (η₁|α₁|², η₂|α₂|²)`.
pub fn mean_counts(cfg: &HomodyneConfig, alpha: Amplitude) -> (f64, f64) {
    let (a1, a2) = output_amplitudes(cfg, alpha);
    (cfg.detectors.eta1 * a1.norm_sqr(), cfg.detectors.eta2 * a2.norm_sqr())
}

/// Skellam probability of `μ = m₁ − m₂` for Poisson means `λ₁`, `λ₂`.
///
/// Evaluated as
/// `exp(−λ₁−λ₂ + (μ/2) ln(λ₁/λ₂) + ln I_μ(2√(λ₁λ₂)))`; a vanishing mean
/// falls back to the one-sided Poisson law.
pub fn skellam_pmf_from_means(lambda1: f64, lambda2: f64, mu: i64) -> f64 {
    debug_assert!(lambda1 >= 0.0 && lambda2 >= 0.0);
    if lambda2 == 0.0 {
        return ln_poisson(mu, lambda1).exp();
    }
    if lambda1 == 0.0 {
        return ln_poisson(-mu, lambda2).exp();
    }
    let z = 2.0 * (lambda1 * lambda2).sqrt();
    let ln_p = -(lambda1 + lambda2)
        + 0.5 * mu as f64 * (lambda1.ln() - lambda2.ln())
        + ln_bessel_i(mu, z);
    ln_p.exp()
}

/// Exact photocount-difference probability for a coherent signal.
pub fn skellam_pmf(cfg: &HomodyneConfig, alpha: Amplitude, mu: i64) -> f64 {
    let (l1, l2) = mean_counts(cfg, alpha);
    skellam_pmf_from_means(l1, l2, mu)
}

/// Result of the explicit double-Poisson summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub prob: f64,
    /// Upper bound on the probability mass of the omitted `m₂` terms.
    pub tail_bound: f64,
}

/// Largest tail the oracle accepts before reporting a truncation error.
pub const ORACLE_TAIL_LIMIT: f64 = 1e-12;

/// `Σ_{m₂ ≥ max(0,−μ)} Pois(μ+m₂; λ₁) Pois(m₂; λ₂)` summed term by term.
///
/// This is the independent reference for [`skellam_pmf_from_means`]: it
/// never touches a Bessel function.
pub fn double_poisson_sum(lambda1: f64, lambda2: f64, mu: i64) -> Result<OracleValue> {
    let start = 0.max(-mu);
    let hard_cap = start + (lambda2 + 60.0 * lambda2.sqrt() + 200.0).ceil() as i64;
    let mut prob = 0.0;
    let mut m2 = start;
    loop {
        let ln_term = ln_poisson(mu + m2, lambda1) + ln_poisson(m2, lambda2);
        prob += ln_term.exp();
        // Pois(m; λ₂) decays geometrically with ratio λ₂/(m+1) once m > λ₂,
        // and the λ₁ factor never exceeds one.
        let next = m2 + 1;
        let ratio = lambda2 / (next as f64 + 1.0);
        let tail_bound = if (next as f64) > lambda2 && ratio < 1.0 {
            ln_poisson(next, lambda2).exp() / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        if tail_bound < 1e-18 {
            return Ok(OracleValue { prob, tail_bound });
        }
        if next > hard_cap {
            if tail_bound > ORACLE_TAIL_LIMIT {
                return Err(Error::Truncation { tail: tail_bound, limit: ORACLE_TAIL_LIMIT });
            }
            return Ok(OracleValue { prob, tail_bound });
        }
        m2 = next;
    }
}

/// Independent oracle for [`skellam_pmf`] built on the double-Poisson sum.
pub fn skellam_pmf_oracle(cfg: &HomodyneConfig, alpha: Amplitude, mu: i64) -> Result<f64> {
    let (l1, l2) = mean_counts(cfg, alpha);
    Ok(double_poisson_sum(l1, l2, mu)?.prob)
}

/// Integer window `[μ_c − 10√σ − 10, μ_c + 10√σ + 10]` for a count
/// difference with mean `μ_c` and variance `σ`.
pub fn count_window(mean: f64, variance: f64) -> (i64, i64) {
    let half = 10.0 * variance.max(0.0).sqrt() + 10.0;
    ((mean - half).floor() as i64, (mean + half).ceil() as i64)
}

/// Skellam distribution over its truncation window.
pub fn skellam_distribution(cfg: &HomodyneConfig, alpha: Amplitude) -> CountDistribution {
    let (l1, l2) = mean_counts(cfg, alpha);
    skellam_distribution_from_means(l1, l2)
}

pub fn skellam_distribution_from_means(lambda1: f64, lambda2: f64) -> CountDistribution {
    let (lo, hi) = count_window(lambda1 - lambda2, lambda1 + lambda2);
    let d = CountDistribution::from_fn(lo, hi, |mu| skellam_pmf_from_means(lambda1, lambda2, mu));
    let tail = (1.0 - d.total()).max(0.0);
    d.with_tail_mass(tail)
}

/// Window used for Fock-state distributions; the quadrature variance of
/// `|n⟩` is `2n + 1` times the vacuum one.
pub fn fock_window(cfg: &HomodyneConfig, n: u32) -> (i64, i64) {
    let (l1, l2) = mean_counts(cfg, Amplitude::new(0.0, 0.0));
    let widen = (2.0 * n as f64 + 1.0).sqrt();
    let half = 10.0 * (l1 + l2).sqrt() * widen + 10.0 + 2.0 * n as f64;
    let mean = l1 - l2;
    ((mean - half).floor() as i64, (mean + half).ceil() as i64)
}

/// Finite-difference steps for the P-function derivatives.
const FOCK1_STEP: f64 = 1e-3;
const FOCK2_STEP: f64 = 1e-2;

/// Apply the Fock-state P-function to a coherent-state quantity:
/// `(1/n!) (∂²/∂α∂α*)ⁿ [e^{|α|²} f(α)]` at `α = 0`.
///
/// `∂²/∂α∂α*` is a quarter of the Laplacian in `(Re α, Im α)`; it is
/// evaluated with the compact nine-point stencil and one Richardson step
/// (`n = 1`), or the stencil applied twice (`n = 2`).
pub fn fock_average<F>(n: u32, f: F) -> Result<f64>
where
    F: Fn(Amplitude) -> f64,
{
    let g = |x: f64, y: f64| (x * x + y * y).exp() * f(Amplitude::new(x, y));
    match n {
        0 => Ok(f(Amplitude::new(0.0, 0.0))),
        1 => {
            let lap = |h: f64| laplacian_9pt(|i, j| g(i as f64 * h, j as f64 * h), h);
            let h = FOCK1_STEP;
            let richardson = (4.0 * lap(0.5 * h) - lap(h)) / 3.0;
            Ok(0.25 * richardson)
        }
        2 => {
            let bilap = |h: f64| {
                let mut grid = [[0.0; 5]; 5];
                for (a, row) in grid.iter_mut().enumerate() {
                    for (b, v) in row.iter_mut().enumerate() {
                        *v = g((a as f64 - 2.0) * h, (b as f64 - 2.0) * h);
                    }
                }
                let inner = |ci: i32, cj: i32| {
                    laplacian_9pt(|i, j| grid[(ci + i + 2) as usize][(cj + j + 2) as usize], h)
                };
                laplacian_9pt(inner, h)
            };
            let h = FOCK2_STEP;
            let richardson = (4.0 * bilap(h) - bilap(2.0 * h)) / 3.0;
            Ok(richardson / 32.0)
        }
        _ => Err(Error::Unsupported(format!(
            "Fock number {n} exceeds the supported maximum {MAX_FOCK}"
        ))),
    }
}

/// Compact isotropic nine-point Laplacian at the origin of a grid with
/// spacing `h`; `f(i, j)` samples the point `(ih, jh)`.
fn laplacian_9pt<F: Fn(i32, i32) -> f64>(f: F, h: f64) -> f64 {
    let edges = f(1, 0) + f(-1, 0) + f(0, 1) + f(0, -1);
    let corners = f(1, 1) + f(1, -1) + f(-1, 1) + f(-1, -1);
    (4.0 * edges + corners - 20.0 * f(0, 0)) / (6.0 * h * h)
}

/// Photocount-difference probability for the Fock state `|n⟩`, `n ≤ 2`.
pub fn fock_pmf(cfg: &HomodyneConfig, n: u32, mu: i64) -> Result<f64> {
    if n > MAX_FOCK {
        return Err(Error::Unsupported(format!(
            "Fock number {n} exceeds the supported maximum {MAX_FOCK}"
        )));
    }
    fock_average(n, |alpha| skellam_pmf(cfg, alpha, mu))
}

pub fn fock_distribution(cfg: &HomodyneConfig, n: u32) -> Result<CountDistribution> {
    let (lo, hi) = fock_window(cfg, n);
    let d = CountDistribution::try_from_fn(lo, hi, |mu| fock_pmf(cfg, n, mu))?;
    let tail = (1.0 - d.total()).abs();
    Ok(d.with_tail_mass(tail))
}

/// Exact distribution for any supported signal state.
pub fn exact_distribution(cfg: &HomodyneConfig, signal: &SignalState) -> Result<CountDistribution> {
    match *signal {
        SignalState::Coherent(alpha) => Ok(skellam_distribution(cfg, alpha)),
        SignalState::Fock(n) => fock_distribution(cfg, n),
    }
}

/// Joint law of `(μ₁, μ₂)`; the two arms are independent so only the
/// marginals are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub first: CountDistribution,
    pub second: CountDistribution,
}

impl JointDistribution {
    pub fn get(&self, mu1: i64, mu2: i64) -> f64 {
        self.first.get(mu1) * self.second.get(mu2)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        self.first
            .iter()
            .flat_map(move |(m1, p1)| self.second.iter().map(move |(m2, p2)| (m1, m2, p1 * p2)))
    }

    pub fn total(&self) -> f64 {
        self.first.total() * self.second.total()
    }

    pub fn tail_mass(&self) -> f64 {
        self.first.tail_mass() + self.second.tail_mass()
    }
}

/// Exact double homodyne probability `P₁(μ₁) P₂(μ₂)`.
pub fn dh_joint_pmf(cfg: &DoubleHomodyneConfig, alpha: Amplitude, mu1: i64, mu2: i64) -> Result<f64> {
    let [c1, c2] = cfg.arm_configs()?;
    let [a1, a2] = cfg.arm_signals(alpha);
    Ok(skellam_pmf(&c1, a1, mu1) * skellam_pmf(&c2, a2, mu2))
}

pub fn dh_joint_distribution(cfg: &DoubleHomodyneConfig, alpha: Amplitude) -> Result<JointDistribution> {
    let [c1, c2] = cfg.arm_configs()?;
    let [a1, a2] = cfg.arm_signals(alpha);
    Ok(JointDistribution {
        first: skellam_distribution(&c1, a1),
        second: skellam_distribution(&c2, a2),
    })
}

/// Samples drawn from one counter-based stream. Fixed so results do not
/// depend on the number of worker threads.
const MC_CHUNK: usize = 1 << 16;

/// Means at or above this use rejection sampling instead of inversion.
const POISSON_INVERSION_LIMIT: f64 = 30.0;

fn sample_poisson<R: Rng>(lambda: f64, rng: &mut R) -> i64 {
    if lambda <= 0.0 {
        return 0;
    }
    if lambda < POISSON_INVERSION_LIMIT {
        let u: f64 = rng.random();
        let mut k = 0_i64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u > cdf {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
            if p < 1e-300 && k as f64 > lambda {
                break;
            }
        }
        k
    } else {
        let pois = Poisson::new(lambda).expect("finite positive Poisson mean");
        pois.sample(rng) as i64
    }
}

/// Empirical distribution of `μ = m₁ − m₂` from `n_samples` independent
/// Poisson draws. Deterministic for a given seed regardless of execution
/// strategy: stream `k` of a ChaCha8 generator seeded with `seed` produces
/// samples `k·65536 ..`.
pub fn mc_sample_counts(
    cfg: &HomodyneConfig,
    alpha: Amplitude,
    n_samples: usize,
    seed: u64,
) -> Result<CountDistribution> {
    mc_sample_counts_with(cfg, alpha, n_samples, seed, Execution::default())
}

pub fn mc_sample_counts_with(
    cfg: &HomodyneConfig,
    alpha: Amplitude,
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<CountDistribution> {
    if n_samples == 0 {
        return Err(invalid("n_samples", "at least one sample is required"));
    }
    let (l1, l2) = mean_counts(cfg, alpha);
    mc_sample_from_means(l1, l2, n_samples, seed, exec)
}

pub fn mc_sample_from_means(
    lambda1: f64,
    lambda2: f64,
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<CountDistribution> {
    if n_samples == 0 {
        return Err(invalid("n_samples", "at least one sample is required"));
    }
    let chunks = n_samples.div_ceil(MC_CHUNK);
    let partial: Vec<Vec<i64>> = exec.map_range(chunks, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let count = MC_CHUNK.min(n_samples - k * MC_CHUNK);
        (0..count)
            .map(|_| sample_poisson(lambda1, &mut rng) - sample_poisson(lambda2, &mut rng))
            .collect()
    });
    let lo = partial.iter().flatten().copied().min().unwrap_or(0);
    let hi = partial.iter().flatten().copied().max().unwrap_or(0);
    let mut counts = vec![0_u64; (hi - lo + 1) as usize];
    for mu in partial.iter().flatten() {
        counts[(mu - lo) as usize] += 1;
    }
    let n = n_samples as f64;
    let probs = counts.into_iter().map(|c| c as f64 / n).collect();
    Ok(CountDistribution::new(lo, probs, 0.0))
}
