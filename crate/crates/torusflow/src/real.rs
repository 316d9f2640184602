//! Scalar abstraction for the solver kernels.
//!
//! Every field operation is generic over [`Real`] so the same code runs in
//! f32 and f64; the crate root exports f64 aliases, which is what the CLI
//! and the acceptance tolerances assume.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

pub trait Real:
    FftNum + Float + FloatConst + NumAssign + std::fmt::Display + std::fmt::LowerExp
{
    /// Lift an f64 literal (tolerances, physical constants) into `Self`.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("finite value")
    }

    fn from_index(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("index fits scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Deterministic pairwise (tree) summation.
///
/// All grid reductions go through this so that results do not depend on
/// chunking or thread count, and so that rounding error stays O(log n).
pub fn sum_pairwise<T: Real>(xs: &[T]) -> T {
    if xs.len() <= 16 {
        let mut acc = T::zero();
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    sum_pairwise(&xs[..mid]) + sum_pairwise(&xs[mid..])
}

/// Pairwise sum of `f(i)` over `0..n` without materialising a buffer.
pub fn sum_pairwise_by<T: Real, F: Fn(usize) -> T + Copy>(n: usize, f: F) -> T {
    fn go<T: Real, F: Fn(usize) -> T + Copy>(lo: usize, hi: usize, f: F) -> T {
        if hi - lo <= 16 {
            let mut acc = T::zero();
            for i in lo..hi {
                acc += f(i);
            }
            return acc;
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, n, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((sum_pairwise(&xs) - naive).abs() < 1e-10);
        let by = sum_pairwise_by(xs.len(), |i| xs[i]);
        assert_eq!(by, sum_pairwise(&xs));
    }
}
