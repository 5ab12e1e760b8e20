//! Bounded scalar maximisation.

/// Inverse golden ratio, `(√5 − 1)/2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`.
///
/// Both endpoints are evaluated as well; a boundary value wins ties so a
/// maximum sitting on the edge of the interval is returned exactly.
pub fn golden_section_max<F>(f: F, a: f64, b: f64, tol: f64) -> Maximum
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let f_a = f(lo);
    if hi - lo <= tol {
        return Maximum { x: lo, value: f_a, evaluations: 1 };
    }
    let f_b = f(hi);
    let mut evals = 2;

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    evals += 2;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
    }
    let (mut best_x, mut best) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if f_a >= best {
        best_x = a.min(b);
        best = f_a;
    }
    if f_b >= best {
        best_x = a.max(b);
        best = f_b;
    }
    Maximum { x: best_x, value: best, evaluations: evals }
}
