//! Oracle-equivalence checks run by `hdqkd validate`.

use hdqkd::metrics::total_variation;
use hdqkd::photostat::{
    count_window, double_poisson_sum, exact_distribution, mc_sample_counts_with, skellam_distribution,
    skellam_pmf_from_means,
};
use hdqkd::povm::{dh_povm_params, squeezing_interval};
use hdqkd::security::{
    ab_covariance, conditional_nu3, conditional_nu3_oracle, measurement_noise, mi_integration_oracle, mutual_info,
    noisy_ab_covariance, symplectic_eigs_joint, symplectic_eigs_oracle, BobMeasurement, ChannelParams, CovAB,
    ProtocolParams, Receiver,
};
use hdqkd::{
    Amplitude, ArmConfig, BeamSplitter, DetectorPair, DoubleHomodyneConfig, Error, Execution, HomodyneConfig,
    SignalState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, result: Result<(bool, String), Error>) -> Check {
    match result {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn reference_link() -> (ChannelParams, ProtocolParams) {
    (ChannelParams::new(0.95, 1e-3).expect("valid"), ProtocolParams::new(1.0, 0.95).expect("valid"))
}

fn homodyne(e2: f64) -> Result<HomodyneConfig, Error> {
    HomodyneConfig::new(BeamSplitter::balanced(), DetectorPair::new(1.0, e2)?, Amplitude::new(10.0, 0.0))
}

fn double_homodyne(cs2: f64, e2: f64) -> Result<DoubleHomodyneConfig, Error> {
    let arm = ArmConfig { bs: BeamSplitter::balanced(), detectors: DetectorPair::new(1.0, e2)? };
    DoubleHomodyneConfig::new(BeamSplitter::new(cs2)?, BeamSplitter::balanced(), arm, arm, Amplitude::new(10.0, 0.0))
}

fn skellam() -> Result<(bool, String), Error> {
    let grid = [0.1, 1.0, 12.5, 50.0];
    let mut worst: f64 = 0.0;
    for &l1 in &grid {
        for &l2 in &grid {
            let (lo, hi) = count_window(l1 - l2, l1 + l2);
            for mu in lo..=hi {
                worst = worst.max((skellam_pmf_from_means(l1, l2, mu) - double_poisson_sum(l1, l2, mu)?.prob).abs());
            }
        }
    }
    Ok((worst <= 1e-10, format!("max deviation {worst:.2e}")))
}

fn random_measurement(d: &mut ChaCha8Rng) -> Result<(BobMeasurement, f64), Error> {
    if d.random_bool(0.5) {
        let sx = d.random_range(1.0..2.0);
        return Ok((BobMeasurement::Homodyne { sigma_x: sx, phi: d.random_range(0.0..std::f64::consts::TAU) }, 0.0));
    }
    let arm = |d: &mut ChaCha8Rng| -> Result<ArmConfig, Error> {
        Ok(ArmConfig {
            bs: BeamSplitter::new(d.random_range(0.3..0.7))?,
            detectors: DetectorPair::new(d.random_range(0.5..1.0), d.random_range(0.5..1.0))?,
        })
    };
    let cfg = DoubleHomodyneConfig::new(
        BeamSplitter::new(d.random_range(0.05..0.95))?,
        BeamSplitter::new(d.random_range(0.3..0.7))?,
        arm(d)?,
        arm(d)?,
        Amplitude::new(10.0, 0.0),
    )?;
    let p = dh_povm_params(&cfg);
    let (r2, r1) = squeezing_interval(&p);
    Ok((BobMeasurement::DoubleHomodyne(p), d.random_range(r2..=r1)))
}

fn symplectic(seed: u64) -> Result<(bool, String), Error> {
    let mut d = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut worst_nu3: f64 = 0.0;
    for _ in 0..200 {
        let ch = ChannelParams::new(d.random_range(0.01..1.0), d.random_range(0.0..0.05))?;
        let pr = ProtocolParams::new(d.random_range(0.1..5.0), 0.95)?;
        let base = ab_covariance(&ch, &pr);
        let (meas, r) = random_measurement(&mut d)?;
        let noisy = noisy_ab_covariance(&base, &measurement_noise(&meas, r))?;
        let (a1, a2) = symplectic_eigs_joint(&noisy)?;
        let (b1, b2) = symplectic_eigs_oracle(&noisy.matrix())?;
        worst = worst.max((a1 - b1).abs()).max((a2 - b2).abs());
        worst_nu3 = worst_nu3.max((conditional_nu3(&meas, &base)? - conditional_nu3_oracle(&meas, &base, r)?).abs());
    }
    Ok((
        worst <= 1e-10 && worst_nu3 <= 1e-10,
        format!("200 draws: nu1,nu2 deviation {worst:.2e}, nu3 deviation {worst_nu3:.2e}"),
    ))
}

fn mutual_information() -> Result<(bool, String), Error> {
    let (ch, pr) = reference_link();
    let mut worst: f64 = 0.0;
    for rx in [
        Receiver::Homodyne(homodyne(1.0)?),
        Receiver::Homodyne(homodyne(0.75)?),
        Receiver::DoubleHomodyne(double_homodyne(0.5, 1.0)?),
        Receiver::DoubleHomodyne(double_homodyne(0.4, 0.75)?),
    ] {
        let meas = rx.measurement();
        worst = worst.max((mutual_info(&meas, &ch, &pr) - mi_integration_oracle(&meas, &ch, &pr)?).abs());
    }
    Ok((worst <= 1e-6, format!("max deviation {worst:.2e} bits")))
}

fn monte_carlo(seed: u64) -> Result<(bool, String), Error> {
    let cfg = HomodyneConfig::ideal(5.0)?;
    let alpha = Amplitude::new(0.5, 0.0);
    let empirical = mc_sample_counts_with(&cfg, alpha, 1_000_000, seed, Execution::default())?;
    let d = total_variation(&empirical, &skellam_distribution(&cfg, alpha))?.tvd;
    Ok((d <= 0.01, format!("TVD {d:.2e} with 1e6 samples, seed {seed}")))
}

fn determinism(seed: u64) -> Result<(bool, String), Error> {
    let cfg = HomodyneConfig::ideal(5.0)?;
    let alpha = Amplitude::new(0.5, 0.0);
    let a = mc_sample_counts_with(&cfg, alpha, 300_000, seed, Execution::Sequential)?;
    let b = mc_sample_counts_with(&cfg, alpha, 300_000, seed, Execution::Parallel)?;
    let c = mc_sample_counts_with(&cfg, alpha, 300_000, seed, Execution::Parallel)?;
    Ok((a == b && b == c, "sequential and repeated parallel runs identical".into()))
}

fn fock_normalization() -> Result<(bool, String), Error> {
    let cfg = homodyne(0.8)?;
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        worst = worst.max((exact_distribution(&cfg, &SignalState::Fock(n))?.total() - 1.0).abs());
    }
    Ok((worst <= 1e-6, format!("max |sum - 1| = {worst:.2e} for n = 1, 2")))
}

/// Flip the sign of the homodyne excess noise and confirm the symplectic
/// guard rejects the resulting covariance.
fn sign_flip_mutation() -> Result<(bool, String), Error> {
    let (ch, pr) = reference_link();
    let base = ab_covariance(&ch, &pr);
    let noise = measurement_noise(&Receiver::Homodyne(homodyne(0.75)?).measurement(), 0.0);
    let honest = symplectic_eigs_joint(&noisy_ab_covariance(&base, &noise)?).is_ok();
    let flipped = CovAB { noise: noise.scale(-1.0), ..base };
    let caught = matches!(symplectic_eigs_joint(&flipped), Err(Error::Unphysical { .. }));
    Ok((honest && caught, format!("honest accepted: {honest}, flipped rejected: {caught}")))
}

pub fn run(seed: u64) -> Vec<Check> {
    vec![
        check("skellam_vs_double_poisson", skellam()),
        check("symplectic_closed_form_vs_4x4", symplectic(seed)),
        check("mutual_info_closed_form_vs_integration", mutual_information()),
        check("monte_carlo_vs_skellam", monte_carlo(seed)),
        check("monte_carlo_deterministic", determinism(seed)),
        check("fock_normalization", fock_normalization()),
        check("guard_rejects_sigma_n_sign_flip", sign_flip_mutation()),
    ]
}
