//! Periodic lattice on the unit torus `T^d = (R/Z)^d`, `d = 2` or `3`.

use crate::error::Error;
use crate::real::Real;

/// Uniform `N^d` grid with spacing `h = 1/N`.
///
/// Grid data is stored row-major with the last axis fastest: for d=2 the
/// linear index of `(i0, i1)` is `i0 * N + i1`, and the physical coordinate
/// of index `i_a` along axis `a` is `i_a * h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    d: usize,
    n: usize,
}

impl GridSpec {
    pub fn new(d: usize, n: usize) -> Result<Self, Error> {
        if !(d == 2 || d == 3) {
            return Err(Error::config("grid.d", "spatial dimension must be 2 or 3"));
        }
        if n < 16 || n % 2 != 0 {
            return Err(Error::config("grid.n", "N must be even and at least 16"));
        }
        Ok(GridSpec { d, n })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h<T: Real>(&self) -> T {
        T::one() / T::from_index(self.n)
    }

    /// Total number of lattice points, `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one lattice point, `h^d`.
    pub fn cell_volume<T: Real>(&self) -> T {
        let h = self.h::<T>();
        let mut v = T::one();
        for _ in 0..self.d {
            v *= h;
        }
        v
    }

    /// Multi-index of a linear index (last axis fastest).
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for a in (0..self.d).rev() {
            out[a] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    /// Linear index of a multi-index.
    pub fn ravel(&self, ix: &[usize]) -> usize {
        let mut idx = 0usize;
        for a in 0..self.d {
            idx = idx * self.n + (ix[a] % self.n);
        }
        idx
    }

    /// Physical coordinates of a linear index.
    pub fn point<T: Real>(&self, idx: usize) -> [T; 3] {
        let ix = self.unravel(idx);
        let h = self.h::<T>();
        let mut p = [T::zero(); 3];
        for a in 0..self.d {
            p[a] = T::from_index(ix[a]) * h;
        }
        p
    }

    /// Integer wavenumber of spectral index `i` along one axis:
    /// `0..=N/2` then negative frequencies. The Nyquist index maps to `+N/2`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Integer wavevector of a linear spectral index.
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let ix = self.unravel(idx);
        let mut k = [0i64; 3];
        for a in 0..self.d {
            k[a] = self.wavenumber(ix[a]);
        }
        k
    }

    /// True if the spectral index touches the Nyquist frequency on any axis.
    /// First derivatives are zeroed there to keep real fields real.
    pub fn on_nyquist(&self, idx: usize) -> bool {
        let ix = self.unravel(idx);
        ix[..self.d].iter().any(|&i| i == self.n / 2)
    }
}

/// Minimal-image displacement `a - b` wrapped into `(-1/2, 1/2]`.
pub fn wrap_delta<T: Real>(a: T, b: T) -> T {
    let mut s = a - b;
    let one = T::one();
    let half = T::lit(0.5);
    s = s - (s + half).floor();
    // guard the half-open convention at the branch cut
    if s <= -half {
        s += one;
    }
    s
}

/// Euclidean distance on the torus.
pub fn torus_distance<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b.iter()) {
        let d = wrap_delta(x, y);
        acc += d * d;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1, 64).is_err());
        assert!(GridSpec::new(2, 8).is_err());
        assert!(GridSpec::new(2, 65).is_err());
        assert!(GridSpec::new(3, 16).is_ok());
    }

    #[test]
    fn h_times_n_is_one() {
        let g = GridSpec::new(2, 48).unwrap();
        assert_eq!(g.h::<f64>() * 48.0, 1.0);
    }

    #[test]
    fn ravel_roundtrip() {
        let g = GridSpec::new(3, 16).unwrap();
        for idx in [0usize, 1, 17, 4095, 16 * 16 * 16 - 1] {
            let ix = g.unravel(idx);
            assert_eq!(g.ravel(&ix[..3]), idx);
        }
    }

    #[test]
    fn wavenumbers_follow_fft_convention() {
        let g = GridSpec::new(2, 16).unwrap();
        assert_eq!(g.wavenumber(0), 0);
        assert_eq!(g.wavenumber(1), 1);
        assert_eq!(g.wavenumber(8), 8); // Nyquist kept positive
        assert_eq!(g.wavenumber(9), -7);
        assert_eq!(g.wavenumber(15), -1);
    }

    #[test]
    fn torus_metric_wraps() {
        let a = [0.95f64, 0.5];
        let b = [0.05f64, 0.5];
        assert!((torus_distance(&a, &b) - 0.1).abs() < 1e-14);
        assert!((wrap_delta(0.1f64, 0.9) - 0.2).abs() < 1e-14);
        assert!((wrap_delta(0.9f64, 0.1) + 0.2).abs() < 1e-14);
    }
}
