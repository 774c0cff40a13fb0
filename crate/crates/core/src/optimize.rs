//! One-dimensional minimization and root finding used by the bound optimizers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a 1-d minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for the minimum of `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `x_tol · (1 + |x|)`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, x_tol: f64) -> Minimum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= x_tol * (1.0 + c.abs().max(d.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc <= fd {
        Minimum { x: c, value: fc }
    } else {
        Minimum { x: d, value: fd }
    };
    // endpoints can win when the minimum sits on the boundary
    for x in [lo, hi] {
        let v = f(x);
        if v < best.value {
            best = Minimum { x, value: v };
        }
    }
    best
}

/// Minimizes `f` on `[lo, hi]` by a coarse uniform grid of `grid` cells
/// followed by golden-section refinement around the best grid point.
///
/// The grid protects against local minima when unimodality is not known.
/// Non-finite grid values are skipped; returns `None` if every value is
/// non-finite.
pub fn bracketed_minimum<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize, x_tol: f64) -> Option<Minimum> {
    let grid = grid.max(2);
    let h = (hi - lo) / grid as f64;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..=grid {
        let v = f(lo + h * i as f64);
        if v.is_finite() && best.is_none_or(|(_, bv)| v < bv) {
            best = Some((i, v));
        }
    }
    let (i, _) = best?;
    let a = lo + h * i.saturating_sub(1) as f64;
    let b = (lo + h * (i + 1) as f64).min(hi);
    let guarded = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    Some(golden_section(guarded, a, b, x_tol))
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Returns `None` when `f(lo)` and `f(hi)` share a strict sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, x_tol: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= x_tol * (1.0 + m.abs()) {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-12);
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn golden_reports_boundary_minimum() {
        let m = golden_section(|x| x, 0.0, 1.0, 1e-12);
        assert_eq!(m.x, 0.0);
    }

    #[test]
    fn bracketing_skips_local_minimum() {
        // local min near x=-1, global near x=2
        let f = |x: f64| (x + 1.0).powi(2) * (x - 2.0).powi(2) - 0.5 * x;
        let m = bracketed_minimum(f, -3.0, 4.0, 200, 1e-12).unwrap();
        assert!(m.x > 1.5, "{m:?}");
    }

    #[test]
    fn bisect_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }
}
