//! Bisection over monotone predicates.

/// Finds the boundary of a monotone predicate on `[lo, hi]`.
///
/// `pred` must be `true` on some prefix `[lo, t*)` and `false` afterwards.
/// Requires `pred(lo)` and `!pred(hi)`; returns the final bracket
/// `(last_true, first_false)` with `first_false - last_true <= tol`.
pub fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, mut pred: F) -> (f64, f64)
where
    F: FnMut(f64) -> bool,
{
    debug_assert!(lo <= hi && tol > 0.0);
    // 200 halvings exhaust any f64 bracket.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}
