//! One-dimensional minimization: uniform scan followed by golden-section refinement.

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping once the
/// bracket is narrower than `tol`. Returns `(x_min, f_min)`.
pub fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    // the bracket shrinks by 0.618 per step; 200 steps exhaust double precision
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Result of [`scan_then_refine`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    /// True when the minimum sits on a bracket endpoint rather than in the interior.
    pub at_boundary: bool,
}

/// Scans `points` uniform samples on `[lo, hi]`, then refines around the best
/// sample with golden-section search to bracket width `tol`. Interior minima
/// are polished by bisecting the sign of a central-difference slope.
pub fn scan_then_refine<F>(mut f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    assert!(points >= 3 && hi > lo);
    let step = (hi - lo) / (points - 1) as f64;
    let grid = |k: usize| if k + 1 == points { hi } else { lo + step * k as f64 };

    let mut best = (0, f64::INFINITY);
    for k in 0..points {
        let value = f(grid(k))?;
        if value < best.1 {
            best = (k, value);
        }
    }
    let (k, scan_value) = best;
    let a = grid(k.saturating_sub(1));
    let b = grid((k + 1).min(points - 1));
    let (mut x, mut value) = golden_section(&mut f, a, b, tol)?;
    if scan_value < value {
        x = grid(k);
        value = scan_value;
    }

    let edge = 2.0 * tol;
    if x - lo <= edge || hi - x <= edge {
        let (flo, fhi) = (f(lo)?, f(hi)?);
        let (bx, bv) = if flo <= fhi { (lo, flo) } else { (hi, fhi) };
        let (x, value) = if bv <= value { (bx, bv) } else { (x, value) };
        return Ok(Minimum { x, value, at_boundary: true });
    }

    // polish: the golden bracket is limited by round-off in f near a flat
    // minimum; the slope changes sign cleanly there
    let h = 1e-5 * (hi - lo).max(1.0);
    let mut slope = |x: f64| -> Result<f64> { Ok(f(x + h)? - f(x - h)?) };
    let mut left = (x - 64.0 * tol).max(lo + h);
    let mut right = (x + 64.0 * tol).min(hi - h);
    let (sl, sr) = (slope(left)?, slope(right)?);
    if sl < 0.0 && sr > 0.0 {
        for _ in 0..60 {
            let mid = 0.5 * (left + right);
            if mid <= left || mid >= right {
                break;
            }
            if slope(mid)? < 0.0 {
                left = mid;
            } else {
                right = mid;
            }
        }
        let candidate = 0.5 * (left + right);
        let candidate_value = f(candidate)?;
        if candidate_value <= value * (1.0 + 1e-14) {
            x = candidate;
            value = candidate_value.min(value);
        }
    }
    Ok(Minimum { x, value, at_boundary: false })
}
