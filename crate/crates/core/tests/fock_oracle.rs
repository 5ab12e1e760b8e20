//! Fock-state statistics against an exact series. Writing `z = α`, `w = α*`
//! as independent variables, the coherent-state count law times `e^{zw}` is
//! a sum over `(m₁, m₂)` of Poisson weights times
//! `exp(κzw − uz − ūw) Π_i (1 + ρ_i z)^{m_i} (1 + ρ̄_i w)^{m_i}`, and the
//! P-function operator picks out `n!` times the coefficient of `zⁿwⁿ`.

use hdqkd::photostat::{fock_pmf, fock_window, mean_counts, output_amplitudes};
use hdqkd::special::ln_poisson;
use hdqkd::{Amplitude, BeamSplitter, DetectorPair, HomodyneConfig};
use num_complex::Complex64;

const MAX_N: usize = 2;

fn binom(m: u64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m as f64 - i as f64) / (i as f64 + 1.0))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn series_pmf(cfg: &HomodyneConfig, n: usize, mu: i64) -> f64 {
    let zero = Amplitude::new(0.0, 0.0);
    let (a1, a2) = output_amplitudes(cfg, zero);
    // amplitudes are a_i + b_i α
    let (b1, b2) = (Complex64::new(cfg.bs.c(), 0.0), Complex64::new(-cfg.bs.s(), 0.0));
    let (e1, e2) = (cfg.detectors.eta1(), cfg.detectors.eta2());
    let (l1, l2) = mean_counts(cfg, zero);
    let (r1, r2) = (b1 / a1, b2 / a2);
    let kappa = 1.0 - e1 * b1.norm_sqr() - e2 * b2.norm_sqr();
    let u = b1 * a1.conj() * e1 + b2 * a2.conj() * e2;

    // coefficients of exp(κzw − uz − ūw) up to zⁿwⁿ
    let mut e = [[Complex64::new(0.0, 0.0); MAX_N + 1]; MAX_N + 1];
    for (j, row) in e.iter_mut().enumerate().take(n + 1) {
        for (k, v) in row.iter_mut().enumerate().take(n + 1) {
            for l in 0..=j.min(k) {
                *v += kappa.powi(l as i32) / factorial(l)
                    * (-u).powi((j - l) as i32)
                    / factorial(j - l)
                    * (-u.conj()).powi((k - l) as i32)
                    / factorial(k - l);
            }
        }
    }

    let m2_max = (l1.max(l2) + 30.0 * (l1.max(l2)).sqrt() + 60.0) as i64;
    let mut total = 0.0;
    for m2 in 0..=m2_max {
        let m1 = m2 + mu;
        if m1 < 0 {
            continue;
        }
        let weight = (ln_poisson(m1, l1) + ln_poisson(m2, l2)).exp();
        if weight == 0.0 {
            continue;
        }
        let mut c = [Complex64::new(0.0, 0.0); MAX_N + 1];
        for (k, ck) in c.iter_mut().enumerate().take(n + 1) {
            for k1 in 0..=k {
                *ck += r1.powi(k1 as i32) * binom(m1 as u64, k1) * r2.powi((k - k1) as i32) * binom(m2 as u64, k - k1);
            }
        }
        let mut coeff = Complex64::new(0.0, 0.0);
        for j in 0..=n {
            for k in 0..=n {
                coeff += e[j][k] * c[n - j] * c[n - k].conj();
            }
        }
        total += weight * coeff.re;
    }
    factorial(n) * total
}

fn configs() -> Vec<HomodyneConfig> {
    [(0.0, 1.0, 1.0, 5.0), (5.0, 1.0, 0.8, 5.0), (10.0, 0.9, 0.5, 3.0), (-8.0, 1.0, 1.0, 10.0)]
        .iter()
        .map(|&(deg, e1, e2, lo)| {
            HomodyneConfig::new(
                BeamSplitter::from_imbalance_angle(f64::to_radians(deg)).unwrap(),
                DetectorPair::new(e1, e2).unwrap(),
                Amplitude::from_polar(lo, 0.3),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn series_is_normalized() {
    for cfg in configs() {
        for n in 0..=MAX_N {
            let (lo, hi) = fock_window(&cfg, n as u32);
            let total: f64 = (lo..=hi).map(|mu| series_pmf(&cfg, n, mu)).sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n}: {total}");
        }
    }
}

#[test]
fn vacuum_series_is_skellam() {
    let cfg = &configs()[1];
    for mu in -10..=10 {
        let a = series_pmf(cfg, 0, mu);
        let b = fock_pmf(cfg, 0, mu).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn finite_differences_match_series() {
    // largest pointwise deviation accepted for each photon number
    let tol = [1e-14, 1e-8, 1e-7];
    for cfg in configs() {
        for (n, tol) in tol.iter().enumerate() {
            let (lo, hi) = fock_window(&cfg, n as u32);
            let worst = (lo..=hi)
                .map(|mu| (fock_pmf(&cfg, n as u32, mu).unwrap() - series_pmf(&cfg, n, mu)).abs())
                .fold(0.0, f64::max);
            assert!(worst < *tol, "n={n}: {worst:e}");
        }
    }
}

#[test]
fn single_photon_dip() {
    let cfg = HomodyneConfig::ideal(5.0).unwrap();
    let p0 = series_pmf(&cfg, 1, 0);
    assert!(p0 < series_pmf(&cfg, 1, 3) && p0 < series_pmf(&cfg, 1, -3));
    assert!((series_pmf(&cfg, 1, 4) - series_pmf(&cfg, 1, -4)).abs() < 1e-14);
}
