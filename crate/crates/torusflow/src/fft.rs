//! Multi-dimensional FFT on the periodic grid, built on rustfft.
//!
//! Convention: `forward` returns `hat[k] = h^d sum_x f(x) e^{-2 pi i k.x}`
//! (so `hat[0]` is the field mean) and `inverse` is the unscaled synthesis
//! `f(x) = sum_k hat[k] e^{+2 pi i k.x}`. A forward/inverse round trip is
//! the identity up to rounding.
//!
//! Axis transforms write disjoint lines, so the rayon paths are bitwise
//! deterministic regardless of thread count.

use num_complex::Complex;
use rayon::prelude::*;
use std::sync::Arc;

use crate::field::{ScalarField, SpectralScalar};
use crate::grid::GridSpec;
use crate::real::Real;

pub struct Fft<T: Real> {
    grid: GridSpec,
    fwd: Arc<dyn rustfft::Fft<T>>,
    inv: Arc<dyn rustfft::Fft<T>>,
}

const TRANSPOSE_BLOCK: usize = 32;

impl<T: Real> Fft<T> {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = rustfft::FftPlanner::new();
        Fft {
            grid,
            fwd: planner.plan_fft_forward(grid.n()),
            inv: planner.plan_fft_inverse(grid.n()),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn forward(&self, f: &ScalarField<T>) -> SpectralScalar<T> {
        assert_eq!(f.grid(), self.grid, "grid mismatch");
        let mut buf: Vec<Complex<T>> = f
            .values()
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect();
        self.transform(&mut buf, false);
        SpectralScalar::from_vec(self.grid, buf)
    }

    pub fn inverse(&self, s: &SpectralScalar<T>) -> ScalarField<T> {
        assert_eq!(s.grid(), self.grid, "grid mismatch");
        let mut buf = s.coeffs().to_vec();
        self.transform(&mut buf, true);
        ScalarField::from_vec(self.grid, buf.into_iter().map(|z| z.re).collect())
    }

    /// Fourier coefficients of `f`, computed once and cached on the field.
    pub fn hat<'a>(&self, f: &'a ScalarField<T>) -> &'a [Complex<T>] {
        assert_eq!(f.grid(), self.grid, "grid mismatch");
        f.spec_cache.get_or_init(|| {
            let mut buf: Vec<Complex<T>> = f
                .values()
                .iter()
                .map(|&v| Complex::new(v, T::zero()))
                .collect();
            self.transform(&mut buf, false);
            buf
        })
    }

    /// Forward transform into a caller-provided buffer (hot path).
    pub fn forward_buf(&self, src: &[T], out: &mut [Complex<T>]) {
        assert_eq!(src.len(), self.grid.len());
        assert_eq!(out.len(), self.grid.len());
        for (o, &v) in out.iter_mut().zip(src.iter()) {
            *o = Complex::new(v, T::zero());
        }
        self.transform(out, false);
    }

    /// Inverse transform of `buf` in place; real parts land in `out`.
    pub fn inverse_buf(&self, buf: &mut [Complex<T>], out: &mut [T]) {
        assert_eq!(buf.len(), self.grid.len());
        assert_eq!(out.len(), self.grid.len());
        self.transform(buf, true);
        for (o, z) in out.iter_mut().zip(buf.iter()) {
            *o = z.re;
        }
    }

    /// In-place multi-dimensional transform. `inverse = false` applies the
    /// `h^d` forward normalisation.
    pub fn transform(&self, data: &mut [Complex<T>], inverse: bool) {
        let n = self.grid.n();
        let d = self.grid.dim();
        match d {
            2 => {
                self.fft_rows(data, inverse);
                transpose_square(data, n);
                self.fft_rows(data, inverse);
                transpose_square(data, n);
            }
            3 => {
                // contiguous lines along the last axis
                self.fft_rows(data, inverse);
                // strided lines along axes 0 and 1
                self.fft_strided(data, n * n, n, inverse);
                self.fft_strided(data, n, n, inverse);
            }
            _ => unreachable!("GridSpec guarantees d in {{2,3}}"),
        }
        if !inverse {
            let scale = self.grid.cell_volume::<T>();
            for z in data.iter_mut() {
                *z = Complex::new(z.re * scale, z.im * scale);
            }
        }
    }

    fn plan(&self, inverse: bool) -> &Arc<dyn rustfft::Fft<T>> {
        if inverse {
            &self.inv
        } else {
            &self.fwd
        }
    }

    fn fft_rows(&self, data: &mut [Complex<T>], inverse: bool) {
        let n = self.grid.n();
        let plan = self.plan(inverse);
        if rayon::current_num_threads() > 1 && data.len() / n > 1 {
            data.par_chunks_mut(n).for_each_init(
                || vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()],
                |scratch, row| plan.process_with_scratch(row, scratch),
            );
        } else {
            let mut scratch =
                vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
            for row in data.chunks_mut(n) {
                plan.process_with_scratch(row, &mut scratch);
            }
        }
    }

    /// Transform every line `{base + j*stride : j in 0..n}` where bases
    /// enumerate the complement of the strided axis (d = 3 only).
    fn fft_strided(&self, data: &mut [Complex<T>], stride: usize, n: usize, inverse: bool) {
        let plan = self.plan(inverse);
        let total = data.len();
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        let mut line = vec![Complex::new(T::zero(), T::zero()); n];
        let block = stride * n;
        let mut base = 0;
        while base < total {
            for off in 0..stride {
                for j in 0..n {
                    line[j] = data[base + off + j * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for j in 0..n {
                    data[base + off + j * stride] = line[j];
                }
            }
            base += block;
        }
    }
}

/// Cache-blocked in-place transpose of an `n x n` row-major matrix.
fn transpose_square<T: Copy>(data: &mut [T], n: usize) {
    debug_assert_eq!(data.len(), n * n);
    let b = TRANSPOSE_BLOCK;
    let mut bi = 0;
    while bi < n {
        // diagonal block
        for i in bi..(bi + b).min(n) {
            for j in (i + 1)..(bi + b).min(n) {
                data.swap(i * n + j, j * n + i);
            }
        }
        let mut bj = bi + b;
        while bj < n {
            for i in bi..(bi + b).min(n) {
                for j in bj..(bj + b).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
            bj += b;
        }
        bi += b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Real;

    fn wave_field(grid: GridSpec, k: [i64; 3]) -> ScalarField<f64> {
        ScalarField::<f64>::from_fn(grid, |p| {
            let mut phase = 0.0;
            for a in 0..grid.dim() {
                phase += k[a] as f64 * p[a];
            }
            (2.0 * std::f64::consts::PI * phase).cos()
        })
    }

    #[test]
    fn single_mode_lands_on_expected_coefficients() {
        let grid = GridSpec::new(2, 32).unwrap();
        let fft = Fft::<f64>::new(grid);
        let f = wave_field(grid, [3, -2, 0]);
        let s = fft.forward(&f);
        // cos splits into half-weight conjugate pair at +/-k
        let mut found = 0;
        for idx in 0..grid.len() {
            let k = grid.wavevector(idx);
            let c = s.coeffs()[idx];
            if (k[0] == 3 && k[1] == -2) || (k[0] == -3 && k[1] == 2) {
                assert!((c.re - 0.5).abs() < 1e-12, "re = {}", c.re);
                assert!(c.im.abs() < 1e-12);
                found += 1;
            } else {
                assert!(c.norm() < 1e-12);
            }
        }
        assert_eq!(found, 2);
    }

    #[test]
    fn roundtrip_is_identity_2d_and_3d() {
        for (d, n) in [(2usize, 32usize), (3, 16)] {
            let grid = GridSpec::new(d, n).unwrap();
            let fft = Fft::<f64>::new(grid);
            let f = ScalarField::<f64>::from_fn(grid, |p| {
                (7.0 * p[0] + 3.0).sin() * (4.0 * p[1] - 1.0).cos() + 0.3 * p[0.max(d - 1)]
            });
            let back = fft.inverse(&fft.forward(&f));
            let mut worst: f64 = 0.0;
            for (a, b) in f.values().iter().zip(back.values()) {
                worst = worst.max((a - b).abs());
            }
            assert!(worst < 1e-12, "d={d} worst={worst:e}");
        }
    }

    #[test]
    fn mean_is_zero_mode() {
        let grid = GridSpec::new(2, 16).unwrap();
        let fft = Fft::<f64>::new(grid);
        let f = ScalarField::<f64>::from_fn(grid, |p| 2.5 + (2.0 * std::f64::consts::PI * p[0]).sin());
        let s = fft.forward(&f);
        assert!((s.coeffs()[0].re - 2.5).abs() < 1e-13);
        assert!(s.coeffs()[0].im.abs() < 1e-13);
    }

    #[test]
    fn cached_hat_matches_forward() {
        let grid = GridSpec::new(2, 16).unwrap();
        let fft = Fft::<f64>::new(grid);
        let f = ScalarField::<f64>::from_fn(grid, |p| (p[0] * 6.0).cos() + p[1]);
        let fresh = fft.forward(&f);
        let cached = fft.hat(&f);
        let denom: f64 = fresh.coeffs().iter().map(|z| z.norm()).sum::<f64>();
        let diff: f64 = fresh
            .coeffs()
            .iter()
            .zip(cached.iter())
            .map(|(a, b)| (a - b).norm())
            .sum::<f64>();
        assert!(diff <= 1e-12 * denom.max(f64::lit(1.0)));
    }
}
