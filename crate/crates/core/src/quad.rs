//! Adaptive numerical integration used by the reconstruction and
//! mutual-information oracles.
//!
//! Backed by the double-exponential rule of the `quadrature` crate, applied
//! piecewise between caller-supplied breakpoints so narrow peaks are never
//! stepped over.

use crate::error::{Error, Result};

/// Default absolute tolerance for oracle integrals.
pub const ABS_TOL: f64 = 1e-10;

/// Integrate `f` over `[points[0], points[last]]`, splitting at every interior
/// point. Points are sorted and deduplicated internally.
pub fn integrate<F>(f: F, points: &[f64], abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut pts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    if pts.len() < 2 {
        return Err(Error::Quadrature("need at least two distinct endpoints".into()));
    }
    let pieces = (pts.len() - 1) as f64;
    let piece_tol = abs_tol / pieces;
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += adaptive(&f, w[0], w[1], piece_tol, 0)?;
    }
    Ok(total)
}

const MAX_DEPTH: u32 = 40;

/// Accept a panel once the whole-panel estimate agrees with the sum of its
/// halves; otherwise bisect.
fn adaptive<F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let whole = panel(f, a, b, tol)?;
    let m = 0.5 * (a + b);
    let left = panel(f, a, m, 0.5 * tol)?;
    let right = panel(f, m, b, 0.5 * tol)?;
    let split = left + right;
    if (whole - split).abs() <= tol.max(1e-15 * split.abs()) {
        return Ok(split);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature(format!(
            "no convergence on [{a}, {b}]: {whole} vs {split}"
        )));
    }
    Ok(adaptive(f, a, m, 0.5 * tol, depth + 1)? + adaptive(f, m, b, 0.5 * tol, depth + 1)?)
}

fn panel<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let out = quadrature::integrate(f, a, b, tol);
    if !out.integral.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integral on [{a}, {b}]")));
    }
    Ok(out.integral)
}

/// Breakpoints covering `center ± width·sd` for each listed Gaussian-like
/// feature, plus the feature centers themselves.
pub fn gaussian_cover(features: &[(f64, f64)], width: f64) -> Vec<f64> {
    let lo = features
        .iter()
        .map(|&(c, sd)| c - width * sd)
        .fold(f64::INFINITY, f64::min);
    let hi = features
        .iter()
        .map(|&(c, sd)| c + width * sd)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut pts = vec![lo, hi];
    pts.extend(features.iter().map(|&(c, _)| c));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gauss;

    #[test]
    fn integrates_narrow_peak_with_breakpoint() {
        let v = integrate(|x| gauss(x - 3.0, 1e-6), &[-10.0, 3.0, 10.0], 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_cover_spans_all_features() {
        let pts = gaussian_cover(&[(0.0, 1.0), (5.0, 0.1)], 8.0);
        assert!(pts.contains(&-8.0) && pts.contains(&8.0) && pts.contains(&5.0));
    }
}
