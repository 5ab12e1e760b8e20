//! Acceptance checks. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use hdqkd::gauss_approx::{
    bessel_gaussian_params, direct_lattice_sum, gaussian_params, min_sigma_x, renorm_threshold, sigma_x,
    Approximation,
};
use hdqkd::metrics::{exact_vs_approx, total_variation};
use hdqkd::photostat::{
    count_window, double_poisson_sum, mc_sample_counts_with, skellam_distribution, skellam_pmf_from_means,
};
use hdqkd::povm::{
    coherent_rep_noise, dh_povm_params, homodyne_povm, q_symbol_consistency, squeezed_q_symbol,
    squeezed_rep_noise, squeezing_interval, DhPovmParams,
};
use hdqkd::security::{
    ab_covariance, conditional_nu3, conditional_nu3_oracle, cutoff_length, holevo_at, measurement_noise,
    mi_determinant_form, mi_integration_oracle, mutual_info, noisy_ab_covariance, optimize_r, secret_fraction,
    symplectic_eigs_joint, symplectic_eigs_oracle, tmsv_covariance, BobMeasurement, ChannelParams,
    ProtocolParams, Receiver,
};
use hdqkd::{
    Amplitude, ArmConfig, BeamSplitter, DetectorPair, DoubleHomodyneConfig, Error, Execution, HomodyneConfig,
    SignalState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), Error>;

fn reference_link() -> (ChannelParams, ProtocolParams) {
    (ChannelParams::new(0.95, 1e-3).unwrap(), ProtocolParams::new(1.0, 0.95).unwrap())
}

fn homodyne(c2: f64, e1: f64, e2: f64, lo: f64) -> HomodyneConfig {
    HomodyneConfig::new(BeamSplitter::new(c2).unwrap(), DetectorPair::new(e1, e2).unwrap(), Amplitude::new(lo, 0.0))
        .unwrap()
}

fn double_homodyne(cs2: f64, e1: f64, e2: f64) -> DoubleHomodyneConfig {
    let arm = ArmConfig { bs: BeamSplitter::balanced(), detectors: DetectorPair::new(e1, e2).unwrap() };
    DoubleHomodyneConfig::new(
        BeamSplitter::new(cs2).unwrap(),
        BeamSplitter::balanced(),
        arm,
        arm,
        Amplitude::new(10.0, 0.0),
    )
    .unwrap()
}

fn skellam_oracle() -> Outcome {
    let grid = [0.1, 1.0, 12.5, 50.0];
    let mut worst: f64 = 0.0;
    for &l1 in &grid {
        for &l2 in &grid {
            let (lo, hi) = count_window(l1 - l2, l1 + l2);
            for mu in lo..=hi {
                let oracle = double_poisson_sum(l1, l2, mu)?;
                worst = worst.max((skellam_pmf_from_means(l1, l2, mu) - oracle.prob).abs());
            }
        }
    }
    Ok((worst <= 1e-10, format!("max |closed - double sum| = {worst:.2e}")))
}

fn gaussian_accuracy() -> Outcome {
    let alpha = SignalState::Coherent(Amplitude::new(0.5, 0.0));
    let at = |lo: f64, e2: f64| exact_vs_approx(&homodyne(0.5, 1.0, e2, lo), &alpha, Approximation::Main);
    let sym = at(5.0, 1.0)?.tvd;
    let asym = at(5.0, 0.5)?.tvd;
    let sweep: Vec<f64> = (0..=16).map(|k| 2.0 + 0.5 * k as f64).map(|lo| at(lo, 1.0).map(|d| d.tvd)).collect::<Result<_, _>>()?;
    let monotone = sweep.windows(2).all(|w| w[1] < w[0]);
    Ok((
        sym <= 0.05 && monotone && asym > sym,
        format!("TVD(sym) = {sym:.4}, TVD(eta2=0.5) = {asym:.4}, decreasing over |alpha_L| in [2,10]: {monotone}"),
    ))
}

fn normalization_anchor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for _ in 0..20 {
        let cfg = homodyne(rng.random_range(0.2..0.8), rng.random_range(0.5..=1.0), rng.random_range(0.5..=1.0), 1.0);
        let lo = rng.random_range(renorm_threshold(&cfg)..5.0);
        let cfg = cfg.with_lo(Amplitude::new(lo, 0.0))?;
        let alpha = Amplitude::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0 * PI));
        let g = gaussian_params(&cfg, alpha);
        assert!(2.0 * g.sigma_g >= 1.0);
        let brute = direct_lattice_sum(g.mu_g, g.sigma_g);
        worst = worst.max((brute - 1.0).abs());
        worst_oracle = worst_oracle.max((brute - g.norm_const).abs());
    }
    Ok((
        worst <= 1e-4 && worst_oracle <= 1e-12,
        format!("max |N_G - 1| = {worst:.2e}, max |theta - brute force| = {worst_oracle:.2e} over 20 configs"),
    ))
}

fn bessel_failure() -> Outcome {
    let mut mismatches = 0;
    for i in 0..50 {
        let c2 = (i as f64 + 0.5) / 50.0;
        for j in 0..50 {
            let p = (j as f64 + 1.0) / 50.0;
            let cfg = homodyne(c2, p.sqrt(), p.sqrt(), 10.0);
            let a = bessel_gaussian_params(&cfg, Amplitude::new(1.0, 0.0));
            let predicted_ill = 2.0 * cfg.bs.cs() < p.sqrt();
            if a.well_posed == predicted_ill {
                mismatches += 1;
            }
        }
    }
    let cfg = HomodyneConfig::new(
        BeamSplitter::from_imbalance_angle(15f64.to_radians())?,
        DetectorPair::ideal(),
        Amplitude::new(10.0, 0.0),
    )?;
    let alpha = SignalState::Coherent(Amplitude::new(1.0, 0.0));
    let dp = exact_vs_approx(&cfg, &alpha, Approximation::Main)?.tvd;
    let ds = exact_vs_approx(&cfg, &alpha, Approximation::Bessel)?.tvd;
    Ok((
        mismatches == 0 && ds > dp,
        format!("{mismatches} mismatches on 50x50 grid; D_S = {ds:.4} vs D_P = {dp:.4} at 15 deg"),
    ))
}

fn povm_positivity() -> Outcome {
    let mut negative = 0;
    let mut below_min = 0;
    let mut worst_eq: f64 = 0.0;
    for i in 1..=20 {
        let e1 = i as f64 / 20.0;
        for j in 1..=20 {
            let e2 = j as f64 / 20.0;
            let det = DetectorPair::new(e1, e2)?;
            let (min, argmin) = min_sigma_x(e1, e2)?;
            for k in 1..40 {
                let c2 = k as f64 / 40.0;
                let cfg = HomodyneConfig::new(BeamSplitter::new(c2)?, det, Amplitude::new(5.0, 0.0))?;
                if homodyne_povm(&cfg).sigma_n < 0.0 || sigma_x(&cfg.bs, &det) < 1.0 - 1e-12 {
                    negative += 1;
                }
                if sigma_x(&cfg.bs, &det) < min - 1e-12 {
                    below_min += 1;
                }
            }
            worst_eq = worst_eq.max((sigma_x(&BeamSplitter::new(argmin)?, &det) - min).abs());
        }
    }
    Ok((
        negative == 0 && below_min == 0 && worst_eq <= 1e-8,
        format!("{negative} negative sigma_N, {below_min} below bound, max |sigma_x(argmin) - bound| = {worst_eq:.2e}"),
    ))
}

fn random_dh(rng: &mut ChaCha8Rng) -> DhPovmParams {
    let arm = |rng: &mut ChaCha8Rng| ArmConfig {
        bs: BeamSplitter::new(rng.random_range(0.3..0.7)).unwrap(),
        detectors: DetectorPair::new(rng.random_range(0.5..=1.0), rng.random_range(0.5..=1.0)).unwrap(),
    };
    let cfg = DoubleHomodyneConfig::new(
        BeamSplitter::new(rng.random_range(0.05..0.95)).unwrap(),
        BeamSplitter::new(rng.random_range(0.3..0.7)).unwrap(),
        arm(rng),
        arm(rng),
        Amplitude::from_polar(10.0, rng.random_range(0.0..2.0 * PI)),
    )
    .unwrap();
    dh_povm_params(&cfg)
}

fn squeezing_interval_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    for _ in 0..50 {
        let p = random_dh(&mut rng);
        let (r2, r1) = squeezing_interval(&p);
        if r2 > r1 {
            failures.push("r2 > r1");
        }
        let (_, _, valid) = coherent_rep_noise(&p);
        if valid != (r2 <= 0.0 && 0.0 <= r1) {
            failures.push("coherent validity");
        }
        for k in 0..100 {
            let r = r2 + (r1 - r2) * k as f64 / 99.0;
            if !squeezed_rep_noise(&p, r)?.noise_cov().is_psd() {
                failures.push("noise not PSD");
            }
        }
    }
    let mut worst: f64 = 0.0;
    for k in 1..20 {
        let cs2 = k as f64 / 20.0;
        let p = dh_povm_params(&DoubleHomodyneConfig::new(
            BeamSplitter::new(cs2)?,
            BeamSplitter::balanced(),
            ArmConfig::ideal(),
            ArmConfig::ideal(),
            Amplitude::new(10.0, 0.0),
        )?);
        let (r2, r1) = squeezing_interval(&p);
        let half_ln_q = 0.5 * p.q.ln();
        worst = worst.max((r1 - half_ln_q).abs()).max((r2 - half_ln_q).abs());
    }
    Ok((
        failures.is_empty() && worst <= 1e-12,
        format!("{} failures on 50 random configs; ideal |r_i - ln(q)/2| <= {worst:.2e}", failures.len()),
    ))
}

fn q_symbol_reconstruction() -> Outcome {
    let mut worst: f64 = 0.0;
    for (c2, e1, e2) in [(0.5, 1.0, 1.0), (0.5, 1.0, 0.75), (0.3, 0.9, 0.6), (0.7, 1.0, 1.0)] {
        let cfg = homodyne(c2, e1, e2, 8.0);
        for x in [-3.0, -0.7, 0.0, 1.1, 2.9] {
            worst = worst.max(q_symbol_consistency(&cfg, Amplitude::new(0.6, -0.3), x)?.residual());
        }
    }
    let mut worst_dh: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for cfg in [double_homodyne(0.5, 1.0, 0.75), double_homodyne(0.3, 0.9, 0.8), double_homodyne(0.5, 1.0, 1.0)] {
        let p = dh_povm_params(&cfg);
        let (r2, r1) = squeezing_interval(&p);
        for (x1, x2) in [(0.2, -0.4), (1.5, 0.3)] {
            let values: Vec<f64> = (0..5)
                .map(|k| {
                    let r = r2 + (r1 - r2) * k as f64 / 4.0;
                    squeezed_q_symbol(&p, r, Amplitude::new(0.4, 0.2), x1, x2).map(|rec| {
                        worst_dh = worst_dh.max(rec.residual());
                        rec.reconstructed
                    })
                })
                .collect::<Result<_, _>>()?;
            let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            spread = spread.max(hi - lo);
        }
    }
    Ok((
        worst <= 1e-8 && worst_dh <= 1e-8 && spread <= 1e-8,
        format!("homodyne residual {worst:.2e}, double homodyne residual {worst_dh:.2e}, r-spread {spread:.2e}"),
    ))
}

fn mutual_information() -> Outcome {
    let (ch, pr) = reference_link();
    let mut det_gap: f64 = 0.0;
    let mut num_gap: f64 = 0.0;
    let measurements = [
        Receiver::Homodyne(homodyne(0.5, 1.0, 1.0, 10.0)),
        Receiver::Homodyne(homodyne(0.5, 1.0, 0.75, 10.0)),
        Receiver::DoubleHomodyne(double_homodyne(0.5, 1.0, 1.0)),
        Receiver::DoubleHomodyne(double_homodyne(0.4, 1.0, 0.75)),
    ];
    for rx in measurements {
        let meas = rx.measurement();
        let closed = mutual_info(&meas, &ch, &pr);
        det_gap = det_gap.max((closed - mi_determinant_form(&meas, &ch, &pr)).abs());
        num_gap = num_gap.max((closed - mi_integration_oracle(&meas, &ch, &pr)?).abs());
    }
    Ok((
        det_gap <= 1e-12 && num_gap <= 1e-6,
        format!("max |closed - det| = {det_gap:.2e}, max |closed - integral| = {num_gap:.2e} bits"),
    ))
}

fn symplectic_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut worst_nu3: f64 = 0.0;
    for i in 0..1000 {
        let ch = ChannelParams::new(rng.random_range(0.01..=1.0), rng.random_range(0.0..0.05))?;
        let pr = ProtocolParams::new(rng.random_range(0.1..5.0), 0.95)?;
        let base = ab_covariance(&ch, &pr);
        let (meas, r) = if i % 2 == 0 {
            let sx = rng.random_range(1.0..2.0);
            (BobMeasurement::Homodyne { sigma_x: sx, phi: rng.random_range(0.0..2.0 * PI) }, 0.0)
        } else {
            let p = random_dh(&mut rng);
            let (r2, r1) = squeezing_interval(&p);
            (BobMeasurement::DoubleHomodyne(p), rng.random_range(r2..=r1))
        };
        let noisy = noisy_ab_covariance(&base, &measurement_noise(&meas, r))?;
        let (a1, a2) = symplectic_eigs_joint(&noisy)?;
        let (b1, b2) = symplectic_eigs_oracle(&noisy.matrix())?;
        worst = worst.max((a1 - b1).abs()).max((a2 - b2).abs());
        worst_nu3 = worst_nu3.max((conditional_nu3(&meas, &base)? - conditional_nu3_oracle(&meas, &base, r)?).abs());
    }
    let (t1, t2) = symplectic_eigs_oracle(&tmsv_covariance(1.0)?)?;
    let tmsv_gap = (t1 - 1.0).abs().max((t2 - 1.0).abs());
    Ok((
        worst <= 1e-10 && worst_nu3 <= 1e-10 && tmsv_gap <= 1e-10,
        format!("max |nu1,2 gap| = {worst:.2e}, max |nu3 gap| = {worst_nu3:.2e}, TMSV |nu - 1| = {tmsv_gap:.2e}"),
    ))
}

fn security_orderings() -> Outcome {
    let (ch, pr) = reference_link();
    let h_ideal = Receiver::Homodyne(homodyne(0.5, 1.0, 1.0, 10.0)).measurement();
    let h_noisy = Receiver::Homodyne(homodyne(0.5, 1.0, 0.75, 10.0)).measurement();
    let dh_ideal = Receiver::DoubleHomodyne(double_homodyne(0.5, 1.0, 1.0)).measurement();
    let dh_noisy = Receiver::DoubleHomodyne(double_homodyne(0.5, 1.0, 0.75)).measurement();
    let i_order = mutual_info(&dh_ideal, &ch, &pr) > mutual_info(&h_ideal, &ch, &pr);
    let k = |m: &BobMeasurement| secret_fraction(m, &ch, &pr);
    let (kh, kdh, khn, kdhn) = (k(&h_ideal)?, k(&dh_ideal)?, k(&h_noisy)?, k(&dh_noisy)?);
    let k_ideal = kdh.secret_fraction_bits > kh.secret_fraction_bits;
    let k_noisy = kdhn.secret_fraction_bits < khn.secret_fraction_bits;
    let chi_up = khn.holevo_bits > kh.holevo_bits && kdhn.holevo_bits > kdh.holevo_bits;
    let mut s_ab = Vec::new();
    for j in 1..10 {
        let cs2 = j as f64 / 10.0;
        let meas = Receiver::DoubleHomodyne(double_homodyne(cs2, 1.0, 1.0)).measurement();
        s_ab.push(optimize_r(match &meas {
            BobMeasurement::DoubleHomodyne(p) => p,
            _ => unreachable!(),
        }, &ch, &pr)?.1.s_ab);
    }
    let s_spread = s_ab.iter().fold(0.0f64, |m, &v| m.max((v - s_ab[0]).abs()));
    Ok((
        i_order && k_ideal && k_noisy && chi_up && s_spread <= 1e-10,
        format!(
            "K(H) = {:.4}, K(DH) = {:.4}, K(H, eta2=0.75) = {:.4}, K(DH, eta2=0.75) = {:.4}, chi increases: {chi_up}, S_AB spread {s_spread:.1e}",
            kh.secret_fraction_bits, kdh.secret_fraction_bits, khn.secret_fraction_bits, kdhn.secret_fraction_bits
        ),
    ))
}

fn optimizer() -> Outcome {
    let (ch, pr) = reference_link();
    let mut worst: f64 = f64::NEG_INFINITY;
    for cfg in [double_homodyne(0.5, 1.0, 0.75), double_homodyne(0.3, 0.8, 1.0), double_homodyne(0.2, 0.6, 0.9)] {
        let p = dh_povm_params(&cfg);
        let meas = BobMeasurement::DoubleHomodyne(p);
        let (_, best) = optimize_r(&p, &ch, &pr)?;
        let (r2, r1) = squeezing_interval(&p);
        for k in 0..200 {
            let r = r2 + (r1 - r2) * k as f64 / 199.0;
            worst = worst.max(holevo_at(&meas, &ch, &pr, r)?.chi - best.chi);
        }
    }
    let sym = dh_povm_params(&double_homodyne(0.5, 1.0, 1.0));
    let (r_sym, _) = optimize_r(&sym, &ch, &pr)?;
    let skew = BobMeasurement::DoubleHomodyne(dh_povm_params(&double_homodyne(1.0 / 3.0, 1.0, 1.0)));
    let guard = matches!(holevo_at(&skew, &ch, &pr, 0.0), Err(Error::Unphysical { .. }));
    Ok((
        worst <= 1e-8 && r_sym == 0.0 && guard,
        format!("max grid excess over optimum {worst:.2e} bits; r_opt(q=1) = {r_sym}; guard at r=0, q=2: {guard}"),
    ))
}

fn distance_sweep() -> Outcome {
    let pr = ProtocolParams::new(1.0, 0.95)?;
    let xi = 1e-3;
    let receivers = [
        (Receiver::Homodyne(homodyne(0.5, 1.0, 1.0, 10.0)), Receiver::Homodyne(homodyne(0.5, 1.0, 0.75, 10.0))),
        (
            Receiver::DoubleHomodyne(double_homodyne(0.5, 1.0, 1.0)),
            Receiver::DoubleHomodyne(double_homodyne(0.5, 1.0, 0.75)),
        ),
    ];
    let mut monotone = true;
    let mut cutoffs = Vec::new();
    for (ideal, lossy) in receivers {
        let c_ideal = cutoff_length(&ideal, xi, &pr, 200.0, 1e-3)?.unwrap_or(200.0);
        let c_lossy = cutoff_length(&lossy, xi, &pr, 200.0, 1e-3)?.unwrap_or(200.0);
        for (rx, cut) in [(ideal, c_ideal), (lossy, c_lossy)] {
            let meas = rx.measurement();
            let ks: Vec<f64> = (0..=200)
                .map(|k| cut * k as f64 / 200.0)
                .map(|l| {
                    secret_fraction(&meas, &ChannelParams::from_length(l, xi)?, &pr).map(|s| s.secret_fraction_bits)
                })
                .collect::<Result<_, _>>()?;
            monotone &= ks.windows(2).all(|w| w[1] <= w[0]);
        }
        cutoffs.push((c_ideal, c_lossy));
    }
    let smaller = cutoffs.iter().all(|(a, b)| b < a);
    Ok((
        monotone && smaller,
        format!(
            "K(L) non-increasing: {monotone}; cutoffs H {:.2} -> {:.2} km, DH {:.2} -> {:.2} km",
            cutoffs[0].0, cutoffs[0].1, cutoffs[1].0, cutoffs[1].1
        ),
    ))
}

fn monte_carlo() -> Outcome {
    let cfg = homodyne(0.5, 1.0, 1.0, 5.0);
    let alpha = Amplitude::new(0.5, 0.0);
    let empirical = mc_sample_counts_with(&cfg, alpha, 1_000_000, 20_240_917, Execution::default())?;
    let d = total_variation(&empirical, &skellam_distribution(&cfg, alpha))?.tvd;
    Ok((d <= 0.01, format!("TVD(empirical, Skellam) = {d:.2e} with 1e6 samples")))
}

struct Criterion {
    id: u32,
    name: &'static str,
    run: fn() -> Outcome,
    limit: Option<Duration>,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "skellam oracle equivalence", run: skellam_oracle, limit: Some(Duration::from_secs(1)) },
        Criterion { id: 2, name: "gaussian approximation accuracy", run: gaussian_accuracy, limit: Some(Duration::from_secs(10)) },
        Criterion { id: 3, name: "normalization anchor", run: normalization_anchor, limit: None },
        Criterion { id: 4, name: "bessel approximation failure detection", run: bessel_failure, limit: None },
        Criterion { id: 5, name: "povm positivity", run: povm_positivity, limit: None },
        Criterion { id: 6, name: "squeezing interval", run: squeezing_interval_checks, limit: None },
        Criterion { id: 7, name: "q-symbol reconstruction", run: q_symbol_reconstruction, limit: None },
        Criterion { id: 8, name: "mutual information agreement", run: mutual_information, limit: None },
        Criterion { id: 9, name: "symplectic oracle", run: symplectic_oracle, limit: None },
        Criterion { id: 10, name: "security orderings", run: security_orderings, limit: None },
        Criterion { id: 11, name: "optimizer correctness", run: optimizer, limit: None },
        Criterion { id: 12, name: "distance sweep", run: distance_sweep, limit: Some(Duration::from_secs(30)) },
        Criterion { id: 13, name: "monte carlo cross-check", run: monte_carlo, limit: None },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let pass = ok && in_time;
        if !pass {
            failed += 1;
        }
        let limit = c.limit.map(|l| format!(" (limit {} s)", l.as_secs())).unwrap_or_default();
        println!(
            "{} {:>2} {}: {}; {:.2} s{}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            limit
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
