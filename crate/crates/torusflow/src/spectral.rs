//! Spectral differential operators, the Leray (divergence-free) projection
//! and Galerkin truncation.
//!
//! First derivatives zero the Nyquist mode so that derivatives of real
//! fields stay real; the Laplacian keeps it (its multiplier is even in k).

use num_complex::Complex;

use crate::fft::Fft;
use crate::field::{ScalarField, SpectralScalar, SpectralVector, VectorField};
use crate::grid::GridSpec;
use crate::real::Real;

/// `d/dx_axis` as a spectral multiplier `2 pi i k_axis`.
pub fn derivative_spec<T: Real>(s: &SpectralScalar<T>, axis: usize) -> SpectralScalar<T> {
    let mut out = s.clone();
    derivative_spec_inplace(out.coeffs_mut(), s.grid(), axis);
    out
}

pub(crate) fn derivative_spec_inplace<T: Real>(
    coeffs: &mut [Complex<T>],
    grid: GridSpec,
    axis: usize,
) {
    let two_pi = T::lit(2.0) * T::PI();
    let n = grid.n();
    for (idx, z) in coeffs.iter_mut().enumerate() {
        let ix = grid.unravel(idx);
        if ix[axis] == n / 2 {
            *z = Complex::new(T::zero(), T::zero());
            continue;
        }
        let k = T::lit(grid.wavenumber(ix[axis]) as f64);
        // multiply by i * 2 pi k
        let w = two_pi * k;
        *z = Complex::new(-z.im * w, z.re * w);
    }
}

pub(crate) fn laplacian_spec_inplace<T: Real>(coeffs: &mut [Complex<T>], grid: GridSpec) {
    let four_pi2 = T::lit(4.0) * T::PI() * T::PI();
    for (idx, z) in coeffs.iter_mut().enumerate() {
        let k = grid.wavevector(idx);
        let k2 = T::lit((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64);
        let w = -four_pi2 * k2;
        *z = Complex::new(z.re * w, z.im * w);
    }
}

pub fn gradient<T: Real>(fft: &Fft<T>, f: &ScalarField<T>) -> VectorField<T> {
    let hat = fft.hat(f);
    let grid = f.grid();
    let comps = (0..grid.dim())
        .map(|a| {
            let mut buf = hat.to_vec();
            derivative_spec_inplace(&mut buf, grid, a);
            fft.inverse(&SpectralScalar::from_vec(grid, buf))
        })
        .collect();
    VectorField::from_components(comps).expect("components share grid")
}

pub fn divergence<T: Real>(fft: &Fft<T>, v: &VectorField<T>) -> ScalarField<T> {
    let grid = v.grid();
    let mut acc = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for a in 0..grid.dim() {
        let mut buf = fft.hat(v.component(a)).to_vec();
        derivative_spec_inplace(&mut buf, grid, a);
        for (t, s) in acc.iter_mut().zip(buf.iter()) {
            *t += *s;
        }
    }
    fft.inverse(&SpectralScalar::from_vec(grid, acc))
}

pub fn laplacian<T: Real>(fft: &Fft<T>, f: &ScalarField<T>) -> ScalarField<T> {
    let grid = f.grid();
    let mut buf = fft.hat(f).to_vec();
    laplacian_spec_inplace(&mut buf, grid);
    fft.inverse(&SpectralScalar::from_vec(grid, buf))
}

/// Index of the `(i, j)` entry in the packed symmetric-tensor layout
/// `[(0,0), (0,1), (1,1)]` for d=2 and
/// `[(0,0), (0,1), (0,2), (1,1), (1,2), (2,2)]` for d=3.
pub fn sym_index(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match d {
        2 => i + j,
        3 => match (i, j) {
            (0, 0) => 0,
            (0, 1) => 1,
            (0, 2) => 2,
            (1, 1) => 3,
            (1, 2) => 4,
            _ => 5,
        },
        _ => unreachable!(),
    }
}

pub fn sym_component_count(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Symmetric velocity gradient `e(u) = (grad u + grad u^T)/2` as packed
/// tensor components.
pub fn sym_gradient<T: Real>(fft: &Fft<T>, v: &VectorField<T>) -> Vec<ScalarField<T>> {
    let grid = v.grid();
    let d = grid.dim();
    // full gradient first: du[i][j] = d u_i / d x_j
    let mut du: Vec<Vec<ScalarField<T>>> = Vec::with_capacity(d);
    for i in 0..d {
        let hat = fft.hat(v.component(i));
        let mut row = Vec::with_capacity(d);
        for j in 0..d {
            let mut buf = hat.to_vec();
            derivative_spec_inplace(&mut buf, grid, j);
            row.push(fft.inverse(&SpectralScalar::from_vec(grid, buf)));
        }
        du.push(row);
    }
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(sym_component_count(d));
    for i in 0..d {
        for j in i..d {
            let mut e = ScalarField::zeros(grid);
            {
                let ev = e.values_mut();
                let a = du[i][j].values();
                let b = du[j][i].values();
                for (idx, t) in ev.iter_mut().enumerate() {
                    *t = half * (a[idx] + b[idx]);
                }
            }
            out.push(e);
        }
    }
    out
}

/// Leray projection in Fourier space: multiply every nonzero mode by
/// `I - k k^T / |k|^2`; the mean mode is untouched. Output is
/// divergence-free to rounding and the map is idempotent and self-adjoint.
pub fn leray_project_spec<T: Real>(v: &mut SpectralVector<T>) {
    let grid = v.grid();
    let d = grid.dim();
    for idx in 0..grid.len() {
        let kk = grid.wavevector(idx);
        let k2_int = kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2];
        if k2_int == 0 {
            continue;
        }
        let k2 = T::lit(k2_int as f64);
        let mut dot = Complex::new(T::zero(), T::zero());
        for a in 0..d {
            let ka = T::lit(kk[a] as f64);
            let z = v.component(a).coeffs()[idx];
            dot += Complex::new(z.re * ka, z.im * ka);
        }
        let scale = Complex::new(dot.re / k2, dot.im / k2);
        for a in 0..d {
            let ka = T::lit(kk[a] as f64);
            let z = v.component_mut(a).coeffs_mut();
            z[idx] -= Complex::new(scale.re * ka, scale.im * ka);
        }
    }
}

pub fn leray_project<T: Real>(fft: &Fft<T>, v: &VectorField<T>) -> VectorField<T> {
    let grid = v.grid();
    let mut spec = SpectralVector::from_components(
        (0..grid.dim())
            .map(|a| SpectralScalar::from_vec(grid, fft.hat(v.component(a)).to_vec()))
            .collect(),
    );
    leray_project_spec(&mut spec);
    VectorField::from_components(
        (0..grid.dim())
            .map(|a| fft.inverse(spec.component(a)))
            .collect(),
    )
    .expect("components share grid")
}

/// Zero all modes with `|k| > kmax` (kept: `|k| <= kmax`).
pub fn truncate_scalar_spec<T: Real>(s: &mut SpectralScalar<T>, kmax: i64) {
    let grid = s.grid();
    let k2max = kmax * kmax;
    for (idx, z) in s.coeffs_mut().iter_mut().enumerate() {
        let k = grid.wavevector(idx);
        if k[0] * k[0] + k[1] * k[1] + k[2] * k[2] > k2max {
            *z = Complex::new(T::zero(), T::zero());
        }
    }
}

pub fn truncate_spec<T: Real>(v: &mut SpectralVector<T>, kmax: i64) {
    for a in 0..v.dim() {
        truncate_scalar_spec(v.component_mut(a), kmax);
    }
}

/// Classical 2/3-rule mask: zero modes with any `|k_a| > floor(N/3)`.
pub fn dealias_spec<T: Real>(s: &mut SpectralScalar<T>, grid: GridSpec) {
    let cut = (grid.n() / 3) as i64;
    for (idx, z) in s.coeffs_mut().iter_mut().enumerate() {
        let k = grid.wavevector(idx);
        if k[..grid.dim()].iter().any(|&ka| ka.abs() > cut) {
            *z = Complex::new(T::zero(), T::zero());
        }
    }
}

/// Max-norm of the spectral divergence, synthesised on the grid.
pub fn max_divergence<T: Real>(fft: &Fft<T>, v: &SpectralVector<T>) -> T {
    let grid = v.grid();
    let mut acc = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for a in 0..grid.dim() {
        let mut buf = v.component(a).coeffs().to_vec();
        derivative_spec_inplace(&mut buf, grid, a);
        for (t, s) in acc.iter_mut().zip(buf.iter()) {
            *t += *s;
        }
    }
    fft.inverse(&SpectralScalar::from_vec(grid, acc)).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid32() -> GridSpec {
        GridSpec::new(2, 32).unwrap()
    }

    #[test]
    fn gradient_of_sine_is_cosine() {
        let grid = grid32();
        let fft = Fft::<f64>::new(grid);
        let f = ScalarField::<f64>::from_fn(grid, |p| (2.0 * PI * p[0]).sin());
        let g = gradient(&fft, &f);
        for idx in 0..grid.len() {
            let p = grid.point::<f64>(idx);
            let want = 2.0 * PI * (2.0 * PI * p[0]).cos();
            assert!((g.component(0).values()[idx] - want).abs() < 1e-10);
            assert!(g.component(1).values()[idx].abs() < 1e-10);
        }
    }

    #[test]
    fn laplacian_of_sine() {
        let grid = grid32();
        let fft = Fft::<f64>::new(grid);
        let f = ScalarField::<f64>::from_fn(grid, |p| (2.0 * PI * p[0]).sin());
        let l = laplacian(&fft, &f);
        for idx in 0..grid.len() {
            let p = grid.point::<f64>(idx);
            let want = -4.0 * PI * PI * (2.0 * PI * p[0]).sin();
            assert!((l.values()[idx] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn sym_gradient_of_shear() {
        // u = (sin 2 pi y, 0): e_12 = pi cos 2 pi y
        let grid = grid32();
        let fft = Fft::<f64>::new(grid);
        let u = VectorField::<f64>::from_fn(grid, |p, c| {
            if c == 0 {
                (2.0 * PI * p[1]).sin()
            } else {
                0.0
            }
        });
        let e = sym_gradient(&fft, &u);
        for idx in 0..grid.len() {
            let p = grid.point::<f64>(idx);
            let want = PI * (2.0 * PI * p[1]).cos();
            assert!((e[sym_index(2, 0, 1)].values()[idx] - want).abs() < 1e-10);
            assert!(e[sym_index(2, 0, 0)].values()[idx].abs() < 1e-10);
            assert!(e[sym_index(2, 1, 1)].values()[idx].abs() < 1e-10);
        }
    }

    #[test]
    fn div_grad_equals_laplacian() {
        let grid = grid32();
        let fft = Fft::<f64>::new(grid);
        // band-limited random-ish field
        let f = ScalarField::<f64>::from_fn(grid, |p| {
            (2.0 * PI * (3.0 * p[0] + p[1])).sin() + 0.7 * (2.0 * PI * (2.0 * p[1] - p[0])).cos()
        });
        let dg = divergence(&fft, &gradient(&fft, &f));
        let l = laplacian(&fft, &f);
        for (a, b) in dg.values().iter().zip(l.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn leray_annihilates_gradients() {
        let grid = grid32();
        let fft = Fft::<f64>::new(grid);
        let psi = ScalarField::<f64>::from_fn(grid, |p| (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin());
        let g = gradient(&fft, &psi);
        let proj = leray_project(&fft, &g);
        for a in 0..2 {
            assert!(proj.component(a).max_abs() < 1e-12);
        }
    }

    #[test]
    fn leray_keeps_divergence_free_fields() {
        let grid = grid32();
        let fft = Fft::<f64>::new(grid);
        let u = VectorField::<f64>::from_fn(grid, |p, c| {
            if c == 0 {
                (2.0 * PI * p[1]).sin()
            } else {
                0.0
            }
        });
        let proj = leray_project(&fft, &u);
        for idx in 0..grid.len() {
            assert!((proj.component(0).values()[idx] - u.component(0).values()[idx]).abs() < 1e-12);
            assert!(proj.component(1).values()[idx].abs() < 1e-12);
        }
    }

    #[test]
    fn leray_kills_compressive_mode() {
        // v = (sin 2 pi x, 0) is a pure k-parallel polarisation
        let grid = grid32();
        let fft = Fft::<f64>::new(grid);
        let u = VectorField::<f64>::from_fn(grid, |p, c| {
            if c == 0 {
                (2.0 * PI * p[0]).sin()
            } else {
                0.0
            }
        });
        let proj = leray_project(&fft, &u);
        for a in 0..2 {
            assert!(proj.component(a).max_abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_boundary_is_inclusive() {
        let grid = grid32();
        let fft = Fft::<f64>::new(grid);
        let keep = VectorField::<f64>::from_fn(grid, |p, c| {
            if c == 0 {
                (2.0 * PI * 5.0 * p[1]).cos()
            } else {
                0.0
            }
        });
        let drop = VectorField::<f64>::from_fn(grid, |p, c| {
            if c == 0 {
                (2.0 * PI * 6.0 * p[1]).cos()
            } else {
                0.0
            }
        });
        for (v, survives) in [(keep, true), (drop, false)] {
            let mut spec = SpectralVector::from_components(
                (0..2)
                    .map(|a| SpectralScalar::from_vec(grid, fft.hat(v.component(a)).to_vec()))
                    .collect(),
            );
            truncate_spec(&mut spec, 5);
            let back = fft.inverse(spec.component(0));
            if survives {
                assert!(back.max_abs() > 0.9);
            } else {
                assert!(back.max_abs() < 1e-13);
            }
        }
    }
}
