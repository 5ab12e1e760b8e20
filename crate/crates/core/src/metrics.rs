//! Total variation distance between exact and approximate count statistics.

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::gauss_approx::{approx_distribution, Approximation};
use crate::photostat::{
    exact_distribution, Amplitude, BeamSplitter, CountDistribution, DetectorPair, HomodyneConfig,
    JointDistribution, SignalState,
};

/// Largest combined out-of-window mass accepted by the distance routines.
pub const MAX_TRUNCATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceResult {
    /// `½ Σ_μ |p(μ) − q(μ)|` over the union of both windows, clamped to `[0, 1]`.
    pub tvd: f64,
    /// Mass of `p` and `q` lying outside their stored windows.
    pub truncation_mass: f64,
}

fn check_truncation(truncation_mass: f64) -> Result<()> {
    if truncation_mass > MAX_TRUNCATION {
        return Err(Error::Truncation { tail: truncation_mass, limit: MAX_TRUNCATION });
    }
    Ok(())
}

pub fn total_variation(p: &CountDistribution, q: &CountDistribution) -> Result<DistanceResult> {
    let truncation_mass = p.tail_mass() + q.tail_mass();
    check_truncation(truncation_mass)?;
    let lo = p.mu_min().min(q.mu_min());
    let hi = p.mu_max().max(q.mu_max());
    let sum: f64 = (lo..=hi).map(|mu| (p.get(mu) - q.get(mu)).abs()).sum();
    Ok(DistanceResult { tvd: (0.5 * sum).clamp(0.0, 1.0), truncation_mass })
}

/// Distance between two product distributions over `(μ₁, μ₂)`.
pub fn total_variation_joint(p: &JointDistribution, q: &JointDistribution) -> Result<DistanceResult> {
    let truncation_mass = p.tail_mass() + q.tail_mass();
    check_truncation(truncation_mass)?;
    let (lo1, hi1) = (
        p.first.mu_min().min(q.first.mu_min()),
        p.first.mu_max().max(q.first.mu_max()),
    );
    let (lo2, hi2) = (
        p.second.mu_min().min(q.second.mu_min()),
        p.second.mu_max().max(q.second.mu_max()),
    );
    let mut sum = 0.0;
    for m1 in lo1..=hi1 {
        let (p1, q1) = (p.first.get(m1), q.first.get(m1));
        for m2 in lo2..=hi2 {
            sum += (p1 * p.second.get(m2) - q1 * q.second.get(m2)).abs();
        }
    }
    Ok(DistanceResult { tvd: (0.5 * sum).clamp(0.0, 1.0), truncation_mass })
}

/// Distance between the exact statistics and a Gaussian approximation.
pub fn exact_vs_approx(
    cfg: &HomodyneConfig,
    signal: &SignalState,
    approx: Approximation,
) -> Result<DistanceResult> {
    let exact = exact_distribution(cfg, signal)?;
    let approx = approx_distribution(approx, cfg, signal)?;
    total_variation(&exact, &approx)
}

/// Parameter varied by [`distance_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// `|α|`, keeping the phase of the base amplitude (real if it is zero).
    SignalAmp,
    /// `|α_L|`, keeping the LO phase.
    LoAmp,
    Eta1,
    Eta2,
    /// `δθ = π/4 − θ` in radians.
    ImbalanceAngle,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::SignalAmp,
        SweepAxis::LoAmp,
        SweepAxis::Eta1,
        SweepAxis::Eta2,
        SweepAxis::ImbalanceAngle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::SignalAmp => "signal_amp",
            SweepAxis::LoAmp => "lo_amp",
            SweepAxis::Eta1 => "eta1",
            SweepAxis::Eta2 => "eta2",
            SweepAxis::ImbalanceAngle => "imbalance_angle",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Receiver and signal with this axis set to `value`.
    pub fn apply(
        self,
        cfg: &HomodyneConfig,
        signal: &SignalState,
        value: f64,
    ) -> Result<(HomodyneConfig, SignalState)> {
        let mut cfg = *cfg;
        let mut signal = *signal;
        match self {
            SweepAxis::SignalAmp => match signal {
                SignalState::Coherent(alpha) => {
                    if value < 0.0 {
                        return Err(invalid("signal_amp", "amplitude must be non-negative"));
                    }
                    let phase = if alpha.norm() > 0.0 { alpha.arg() } else { 0.0 };
                    signal = SignalState::Coherent(Amplitude::from_polar(value, phase));
                }
                SignalState::Fock(_) => {
                    return Err(invalid("signal_amp", "a Fock signal has no amplitude to sweep"));
                }
            },
            SweepAxis::LoAmp => {
                cfg = cfg.with_lo(Amplitude::from_polar(value, cfg.phase()))?;
            }
            SweepAxis::Eta1 => {
                cfg.detectors = DetectorPair::new(value, cfg.detectors.eta2())?;
            }
            SweepAxis::Eta2 => {
                cfg.detectors = DetectorPair::new(cfg.detectors.eta1(), value)?;
            }
            SweepAxis::ImbalanceAngle => {
                cfg.bs = BeamSplitter::from_imbalance_angle(value)?;
            }
        }
        Ok((cfg, signal))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRow {
    pub axis_value: f64,
    /// Distance to the strong-LO Gaussian approximation.
    pub d_p: DistanceResult,
    /// Distance to the Bessel-asymptotic Gaussian approximation.
    pub d_s: DistanceResult,
}

/// Evaluate both distances at every grid value. Rows come back in grid
/// order whatever the execution strategy.
pub fn distance_sweep(
    axis: SweepAxis,
    grid: &[f64],
    cfg: &HomodyneConfig,
    signal: &SignalState,
    exec: Execution,
) -> Result<Vec<DistanceRow>> {
    check_grid(grid)?;
    exec.map(grid, |&value| {
        let (c, s) = axis.apply(cfg, signal, value)?;
        Ok(DistanceRow {
            axis_value: value,
            d_p: exact_vs_approx(&c, &s, Approximation::Main)?,
            d_s: exact_vs_approx(&c, &s, Approximation::Bessel)?,
        })
    })
    .into_iter()
    .collect()
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("grid", "sweep grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(invalid("grid", "sweep grid contains a non-finite value"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("grid", "sweep grid must be strictly increasing"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cd(mu_min: i64, probs: &[f64]) -> CountDistribution {
        CountDistribution::new(mu_min, probs.to_vec(), 0.0)
    }

    #[test]
    fn identical_and_disjoint() {
        let p = cd(-1, &[0.25, 0.5, 0.25]);
        assert_eq!(total_variation(&p, &p).unwrap().tvd, 0.0);
        let q = cd(5, &[0.5, 0.5]);
        assert_eq!(total_variation(&p, &q).unwrap().tvd, 1.0);
    }

    #[test]
    fn truncation_is_reported() {
        let p = cd(0, &[1.0]).with_tail_mass(5e-7);
        let q = cd(0, &[1.0]).with_tail_mass(6e-7);
        assert!(matches!(total_variation(&p, &q), Err(Error::Truncation { .. })));
    }

    #[test]
    fn symmetric_receiver_distance_is_small() {
        let cfg = HomodyneConfig::ideal(5.0).unwrap();
        let d = exact_vs_approx(&cfg, &SignalState::Coherent(Amplitude::new(0.5, 0.0)), Approximation::Main)
            .unwrap();
        assert!(d.tvd < 0.05, "{}", d.tvd);
        assert!(d.truncation_mass < 1e-8);
    }

    #[test]
    fn sweep_is_ordered_and_execution_independent() {
        let cfg = HomodyneConfig::ideal(5.0).unwrap();
        let signal = SignalState::Coherent(Amplitude::new(0.5, 0.0));
        let grid: Vec<f64> = (0..8).map(|k| 2.0 + k as f64).collect();
        let par = distance_sweep(SweepAxis::LoAmp, &grid, &cfg, &signal, Execution::Parallel).unwrap();
        let seq = distance_sweep(SweepAxis::LoAmp, &grid, &cfg, &signal, Execution::Sequential).unwrap();
        assert_eq!(par, seq);
        assert!(par.windows(2).all(|w| w[1].d_p.tvd < w[0].d_p.tvd));
    }

    #[test]
    fn grid_validation() {
        let cfg = HomodyneConfig::ideal(5.0).unwrap();
        let s = SignalState::Coherent(Amplitude::new(0.5, 0.0));
        assert!(distance_sweep(SweepAxis::LoAmp, &[], &cfg, &s, Execution::Sequential).is_err());
        assert!(distance_sweep(SweepAxis::LoAmp, &[3.0, 2.0], &cfg, &s, Execution::Sequential).is_err());
        assert!(SweepAxis::SignalAmp.apply(&cfg, &SignalState::Fock(1), 1.0).is_err());
    }

    #[test]
    fn axis_names_roundtrip() {
        for a in SweepAxis::ALL {
            assert_eq!(SweepAxis::from_name(a.name()), Some(a));
        }
        assert_eq!(SweepAxis::from_name("nope"), None);
    }

    #[test]
    fn efficiency_distance_falls_at_balanced_splitter() {
        let cfg = HomodyneConfig::ideal(5.0).unwrap();
        let s = SignalState::Coherent(Amplitude::new(1.0, 0.0));
        let grid = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
        let rows = distance_sweep(SweepAxis::Eta2, &grid, &cfg, &s, Execution::Parallel).unwrap();
        assert!(rows.windows(2).all(|w| w[1].d_p.tvd < w[0].d_p.tvd));
    }

    #[test]
    fn fock_distances_are_computed() {
        let cfg = HomodyneConfig::ideal(5.0).unwrap();
        let rows = distance_sweep(
            SweepAxis::ImbalanceAngle,
            &[0.0, 10f64.to_radians()],
            &cfg,
            &SignalState::Fock(1),
            Execution::Parallel,
        )
        .unwrap();
        assert!(rows[0].d_p.tvd < rows[1].d_p.tvd);
        assert!((rows[0].d_p.tvd - rows[0].d_s.tvd).abs() < 1e-9);
    }

    fn normalize(v: Vec<f64>) -> Vec<f64> {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    }

    proptest! {
        #[test]
        fn metric_axioms(
            a in prop::collection::vec(0.001f64..1.0, 1..12),
            b in prop::collection::vec(0.001f64..1.0, 1..12),
            c in prop::collection::vec(0.001f64..1.0, 1..12),
            oa in -5i64..5, ob in -5i64..5, oc in -5i64..5,
        ) {
            let p = cd(oa, &normalize(a));
            let q = cd(ob, &normalize(b));
            let r = cd(oc, &normalize(c));
            let pq = total_variation(&p, &q).unwrap().tvd;
            let qp = total_variation(&q, &p).unwrap().tvd;
            let pr = total_variation(&p, &r).unwrap().tvd;
            let rq = total_variation(&r, &q).unwrap().tvd;
            prop_assert!((pq - qp).abs() < 1e-15);
            prop_assert!(pq <= pr + rq + 1e-12);
            prop_assert!((0.0..=1.0).contains(&pq));
        }
    }
}
