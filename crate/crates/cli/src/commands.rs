//! Table-producing subcommands.

use hdqkd::gauss_approx::{approx_distribution, dh_gaussian_joint, Approximation};
use hdqkd::metrics::{exact_vs_approx, SweepAxis};
use hdqkd::photostat::{dh_joint_distribution, exact_distribution, mc_sample_counts_with};
use hdqkd::security::{cutoff_length, security_sweep, status_label, Receiver, SecurityAxis};
use hdqkd::{Execution, SignalState};
use serde_json::{json, Map};

use crate::config::Config;
use crate::output::{Cell, Table};
use crate::Failure;

/// Bisection tolerance of the reported cutoff length.
const CUTOFF_TOL_KM: f64 = 1e-3;

pub struct RunOptions {
    pub exec: Execution,
    pub seed: u64,
}

/// Exact and approximate count statistics.
pub fn dist(cfg: &Config, opts: &RunOptions) -> Result<Table, Failure> {
    let receivers = cfg.receivers()?;
    let signal = cfg.signal()?;
    let mc_samples = cfg.monte_carlo.as_ref().map(|m| m.samples);
    if mc_samples == Some(0) {
        return Err(Failure::Config("monte_carlo.samples must be positive".into()));
    }
    let any_dh = receivers.iter().any(|r| matches!(r.receiver, Receiver::DoubleHomodyne(_)));
    let any_h = receivers.iter().any(|r| matches!(r.receiver, Receiver::Homodyne(_)));
    if any_dh && any_h {
        return Err(Failure::Config("dist tables cannot mix homodyne and double homodyne receivers".into()));
    }

    if any_dh {
        let SignalState::Coherent(alpha) = signal else {
            return Err(Failure::Config("double homodyne statistics need a coherent signal".into()));
        };
        if mc_samples.is_some() {
            return Err(Failure::Config("monte_carlo is only available for homodyne receivers".into()));
        }
        let mut table = Table::new(vec!["receiver", "mu1", "mu2", "exact", "gaussian"]);
        for rx in &receivers {
            let Receiver::DoubleHomodyne(c) = rx.receiver else { unreachable!() };
            let exact = dh_joint_distribution(&c, alpha)?;
            let approx = dh_gaussian_joint(&c, alpha)?;
            for (m1, m2, p) in exact.iter() {
                table.push(vec![
                    Cell::Text(rx.label.clone()),
                    Cell::Int(m1),
                    Cell::Int(m2),
                    Cell::Num(p),
                    Cell::Num(approx.get(m1, m2)),
                ]);
            }
        }
        return Ok(table);
    }

    let mut columns = vec!["receiver", "mu", "exact", "gaussian", "bessel_gaussian"];
    if mc_samples.is_some() {
        columns.push("monte_carlo");
    }
    let mut table = Table::new(columns);
    for rx in &receivers {
        let Receiver::Homodyne(c) = rx.receiver else { unreachable!() };
        let exact = exact_distribution(&c, &signal)?;
        let main = approx_distribution(Approximation::Main, &c, &signal)?;
        let bessel = approx_distribution(Approximation::Bessel, &c, &signal)?;
        let mc = match (mc_samples, signal) {
            (Some(n), SignalState::Coherent(alpha)) => Some(mc_sample_counts_with(&c, alpha, n, opts.seed, opts.exec)?),
            (Some(_), SignalState::Fock(_)) => {
                return Err(Failure::Config("monte_carlo sampling needs a coherent signal".into()))
            }
            (None, _) => None,
        };
        for (mu, p) in exact.iter() {
            let mut row = vec![
                Cell::Text(rx.label.clone()),
                Cell::Int(mu),
                Cell::Num(p),
                Cell::Num(main.get(mu)),
                Cell::Num(bessel.get(mu)),
            ];
            if let Some(mc) = &mc {
                row.push(Cell::Num(mc.get(mu)));
            }
            table.push(row);
        }
    }
    Ok(table)
}

/// Sweep value as used by the library: the imbalance angle is given in
/// degrees on the command line.
fn library_value(axis: SweepAxis, value: f64) -> f64 {
    match axis {
        SweepAxis::ImbalanceAngle => value.to_radians(),
        _ => value,
    }
}

/// Distances of both Gaussian approximations along one axis.
pub fn tvd(cfg: &Config, opts: &RunOptions) -> Result<Table, Failure> {
    let receivers = cfg.receivers()?;
    let signal = cfg.signal()?;
    let sweep = cfg.sweep()?;
    let axis = SweepAxis::from_name(&sweep.axis).ok_or_else(|| {
        let names: Vec<&str> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
        Failure::Config(format!("unknown tvd axis `{}`; expected one of {}", sweep.axis, names.join(", ")))
    })?;
    let grid = sweep.grid();
    let mut table = Table::new(vec!["receiver", "axis_value", "d_p", "d_s", "truncation_mass", "status"]);
    for rx in &receivers {
        let Receiver::Homodyne(base) = rx.receiver else {
            return Err(Failure::Config(format!("tvd needs homodyne receivers; `{}` is not", rx.label)));
        };
        // reject out-of-range parameters before any numerics
        let points = grid
            .iter()
            .map(|&v| axis.apply(&base, &signal, library_value(axis, v)).map_err(|e| Failure::Config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = opts.exec.map(&points, |(c, s)| {
            let dp = exact_vs_approx(c, s, Approximation::Main);
            let ds = exact_vs_approx(c, s, Approximation::Bessel);
            (dp, ds)
        });
        for (value, (dp, ds)) in grid.iter().zip(rows) {
            let (dp_v, ds_v, trunc, status) = match (dp, ds) {
                (Ok(p), Ok(s)) => (p.tvd, s.tvd, p.truncation_mass.max(s.truncation_mass), "ok".to_string()),
                (Err(e), _) | (_, Err(e)) => (f64::NAN, f64::NAN, f64::NAN, status_label(&e)),
            };
            table.push(vec![
                Cell::Text(rx.label.clone()),
                Cell::Num(*value),
                Cell::Num(dp_v),
                Cell::Num(ds_v),
                Cell::Num(trunc),
                Cell::Text(status),
            ]);
        }
    }
    Ok(table)
}

/// Mutual information, Holevo bound and secret fraction along one axis.
pub fn security(cfg: &Config, opts: &RunOptions) -> Result<Table, Failure> {
    let receivers = cfg.receivers()?;
    let sweep = cfg.sweep()?;
    let axis = SecurityAxis::from_name(&sweep.axis).ok_or_else(|| {
        let names: Vec<&str> = SecurityAxis::ALL.iter().map(|a| a.name()).collect();
        Failure::Config(format!("unknown security axis `{}`; expected one of {}", sweep.axis, names.join(", ")))
    })?;
    let ch = if axis == SecurityAxis::ChannelLength {
        // the length axis supplies the transmittance
        let xi = cfg.channel.as_ref().map_or(0.0, |c| c.excess_noise);
        hdqkd::security::ChannelParams::new(1.0, xi).map_err(|e| Failure::Config(e.to_string()))?
    } else {
        cfg.channel()?
    };
    let pr = cfg.protocol()?;
    let grid = sweep.grid();
    let mut table = Table::new(vec![
        "receiver", "axis_value", "i_ab", "chi", "k", "r_opt", "nu1", "nu2", "nu3", "s_ab", "status",
    ]);
    let mut cutoffs = Map::new();
    for rx in &receivers {
        let rows = security_sweep(axis, &grid, &rx.receiver, &ch, &pr, opts.exec)
            .map_err(|e| Failure::Config(format!("receiver `{}`: {e}", rx.label)))?;
        for row in rows {
            let mut cells = vec![Cell::Text(rx.label.clone()), Cell::Num(row.axis_value)];
            match &row.outcome {
                Ok(r) => cells.extend(
                    [
                        r.mutual_info_bits,
                        r.holevo_bits,
                        r.secret_fraction_bits,
                        r.r_opt,
                        r.nu.0,
                        r.nu.1,
                        r.nu.2,
                        r.s_ab,
                    ]
                    .map(Cell::Num),
                ),
                Err(_) => cells.extend([f64::NAN; 8].map(Cell::Num)),
            }
            cells.push(Cell::Text(row.status().to_string()));
            table.push(cells);
        }
        if axis == SecurityAxis::ChannelLength {
            let cut = cutoff_length(&rx.receiver, ch.xi(), &pr, sweep.max, CUTOFF_TOL_KM)?;
            let value = match cut {
                Some(l) => json!(crate::output::round_sig(l)),
                None => json!(null),
            };
            match cut {
                Some(l) => eprintln!("cutoff length for {}: {l:.3} km", rx.label),
                None => eprintln!("cutoff length for {}: beyond {} km", rx.label, sweep.max),
            }
            cutoffs.insert(rx.label.clone(), value);
        }
    }
    if axis == SecurityAxis::ChannelLength {
        table.extras.insert("cutoff_km".into(), serde_json::Value::Object(cutoffs));
    }
    Ok(table)
}
