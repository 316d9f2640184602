//! Smoothing kernel applied to the velocity entering the phase equation
//! and to the capillary stress.
//!
//! The kernel is the standard compactly supported bump
//! `zeta(x) ~ exp(-1/(1-|x|^2))` on `|x| < 1`, rescaled to the configured
//! width, periodised on the torus, sampled on the grid and normalised to
//! unit mass. Application is a spectral multiply by its (real, even)
//! Fourier coefficients, which equals discrete convolution with `h^d`
//! quadrature weights; non-negativity plus unit mass make it an averaging
//! operator, hence a contraction in every `L^q`.

use crate::error::Error;
use crate::fft::Fft;
use crate::field::{ScalarField, SpectralScalar, VectorField};
use crate::grid::GridSpec;
use crate::real::{sum_pairwise, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MollifierMode {
    /// Width `epsilon^(gamma/d)`, the scaling the analysis uses.
    Paper,
    /// Width `epsilon` (default; keeps the kernel at interface scale).
    Interface,
    /// Width `4h`, the minimum the grid resolves.
    Grid,
    /// Discrete delta: mollification is the exact identity.
    None,
}

impl MollifierMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper" => Some(MollifierMode::Paper),
            "interface" => Some(MollifierMode::Interface),
            "grid" => Some(MollifierMode::Grid),
            "none" => Some(MollifierMode::None),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MollifierMode::Paper => "paper",
            MollifierMode::Interface => "interface",
            MollifierMode::Grid => "grid",
            MollifierMode::None => "none",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MollifierKernel<T: Real> {
    mode: MollifierMode,
    width: T,
    samples: ScalarField<T>,
    hat: Vec<T>,
}

/// Build the kernel for the given interface thickness and exponent.
pub fn mollifier_kernel<T: Real>(
    grid: GridSpec,
    fft: &Fft<T>,
    epsilon: T,
    gamma: T,
    mode: MollifierMode,
) -> Result<MollifierKernel<T>, Error> {
    if epsilon <= T::zero() || epsilon > T::one() {
        return Err(Error::config("physics.epsilon", "need 0 < epsilon <= 1"));
    }
    if gamma <= T::zero() || gamma >= T::lit(0.5) {
        return Err(Error::config("physics.gamma", "need 0 < gamma < 1/2"));
    }
    let h = grid.h::<T>();
    if mode == MollifierMode::None {
        let mut samples = ScalarField::zeros(grid);
        samples.values_mut()[0] = T::one() / grid.cell_volume::<T>();
        let hat = vec![T::one(); grid.len()];
        return Ok(MollifierKernel {
            mode,
            width: T::zero(),
            samples,
            hat,
        });
    }
    let width = match mode {
        MollifierMode::Paper => epsilon.powf(gamma / T::from_index(grid.dim())),
        MollifierMode::Interface => epsilon,
        MollifierMode::Grid => T::lit(4.0) * h,
        MollifierMode::None => unreachable!(),
    };
    if width < T::lit(2.0) * h {
        return Err(Error::config(
            "physics.mollifier",
            format!(
                "kernel width {:.3e} is below 2h = {:.3e}; unresolvable on this grid",
                width.as_f64(),
                (T::lit(2.0) * h).as_f64()
            ),
        ));
    }

    let d = grid.dim();
    let w = width;
    let mut samples = ScalarField::from_fn(grid, |x| {
        // periodise over neighbouring images; support radius <= 1 so the
        // 3^d block always covers it
        let mut acc = T::zero();
        let mut img = [0i64; 3];
        let lo = -1i64;
        let hi = 1i64;
        img[0] = lo;
        while img[0] <= hi {
            img[1] = lo;
            while img[1] <= hi {
                let zlo = if d == 3 { lo } else { 0 };
                let zhi = if d == 3 { hi } else { 0 };
                img[2] = zlo;
                while img[2] <= zhi {
                    let mut r2 = T::zero();
                    for a in 0..d {
                        let dx = (x[a] + T::lit(img[a] as f64)) / w;
                        r2 += dx * dx;
                    }
                    if r2 < T::one() {
                        acc += (-(T::one() / (T::one() - r2))).exp();
                    }
                    img[2] += 1;
                }
                img[1] += 1;
            }
            img[0] += 1;
        }
        acc
    });
    let mass = sum_pairwise(samples.values()) * grid.cell_volume::<T>();
    for v in samples.values_mut() {
        *v /= mass;
    }
    let spec = fft.forward(&samples);
    // the sampled kernel is even, so its transform is real; drop the
    // rounding-level imaginary parts to keep the multiplier self-adjoint
    let hat = spec.coeffs().iter().map(|z| z.re).collect();
    Ok(MollifierKernel {
        mode,
        width,
        samples,
        hat,
    })
}

impl<T: Real> MollifierKernel<T> {
    pub fn mode(&self) -> MollifierMode {
        self.mode
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn samples(&self) -> &ScalarField<T> {
        &self.samples
    }

    /// Real spectral multipliers; `hat[0] = 1`.
    pub fn hat(&self) -> &[T] {
        &self.hat
    }

    pub fn is_identity(&self) -> bool {
        self.mode == MollifierMode::None
    }

    pub fn apply_spec_inplace(&self, coeffs: &mut [num_complex::Complex<T>]) {
        if self.is_identity() {
            return;
        }
        for (z, &m) in coeffs.iter_mut().zip(self.hat.iter()) {
            *z = num_complex::Complex::new(z.re * m, z.im * m);
        }
    }
}

/// Mollify a scalar field (spectral multiply; exact identity in mode
/// `none`).
pub fn mollify<T: Real>(
    fft: &Fft<T>,
    v: &ScalarField<T>,
    kern: &MollifierKernel<T>,
) -> Result<ScalarField<T>, Error> {
    if v.grid() != kern.samples.grid() {
        return Err(Error::usage("mollify: field and kernel grids differ"));
    }
    if kern.is_identity() {
        return Ok(v.clone());
    }
    let mut buf = fft.hat(v).to_vec();
    kern.apply_spec_inplace(&mut buf);
    Ok(fft.inverse(&SpectralScalar::from_vec(v.grid(), buf)))
}

pub fn mollify_vector<T: Real>(
    fft: &Fft<T>,
    v: &VectorField<T>,
    kern: &MollifierKernel<T>,
) -> Result<VectorField<T>, Error> {
    let comps = (0..v.dim())
        .map(|a| mollify(fft, v.component(a), kern))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorField::from_components(comps).expect("grids match"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize) -> (GridSpec, Fft<f64>) {
        let grid = GridSpec::new(2, n).unwrap();
        let fft = Fft::<f64>::new(grid);
        (grid, fft)
    }

    #[test]
    fn unit_mass_and_hat0_in_all_modes() {
        let (grid, fft) = setup(64);
        for mode in [
            MollifierMode::Paper,
            MollifierMode::Interface,
            MollifierMode::Grid,
            MollifierMode::None,
        ] {
            let k = mollifier_kernel(grid, &fft, 0.05, 0.25, mode).unwrap();
            let mass = k.samples().integral();
            assert!((mass - 1.0).abs() < 1e-12, "{mode:?}: mass = {mass}");
            assert!((k.hat()[0] - 1.0).abs() < 1e-12);
            assert!(k.samples().values().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn paper_mode_width_matches_scaling() {
        let (grid, fft) = setup(64);
        let k = mollifier_kernel(grid, &fft, 0.02, 0.25, MollifierMode::Paper).unwrap();
        // eps^(gamma/d) = 0.02^0.125
        assert!((k.width() - 0.02f64.powf(0.125)).abs() < 1e-14);
        assert!((k.width() - 0.6133).abs() < 1e-3);
    }

    #[test]
    fn paper_mode_height_scales_like_eps_to_minus_gamma() {
        let (grid, fft) = setup(128);
        let gamma = 0.25;
        let k1 = mollifier_kernel(grid, &fft, 0.04, gamma, MollifierMode::Paper).unwrap();
        let k2 = mollifier_kernel(grid, &fft, 0.16, gamma, MollifierMode::Paper).unwrap();
        let h1 = k1.samples().values().iter().cloned().fold(0.0f64, f64::max);
        let h2 = k2.samples().values().iter().cloned().fold(0.0f64, f64::max);
        let want = (0.04f64 / 0.16).powf(-gamma);
        assert!(
            ((h1 / h2) / want - 1.0).abs() < 0.05,
            "height ratio {} vs {}",
            h1 / h2,
            want
        );
    }

    #[test]
    fn none_mode_is_exact_identity() {
        let (grid, fft) = setup(32);
        let k = mollifier_kernel(grid, &fft, 0.05, 0.25, MollifierMode::None).unwrap();
        let v = ScalarField::<f64>::from_fn(grid, |p| (13.0 * p[0]).sin() + p[1] * p[1]);
        let m = mollify(&fft, &v, &k).unwrap();
        for (a, b) in v.values().iter().zip(m.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn constants_and_means_are_preserved() {
        let (grid, fft) = setup(64);
        let k = mollifier_kernel(grid, &fft, 0.05, 0.25, MollifierMode::Interface).unwrap();
        let c = ScalarField::<f64>::constant(grid, 3.25);
        let m = mollify(&fft, &c, &k).unwrap();
        assert!(m.values().iter().all(|&v| (v - 3.25).abs() < 1e-12));

        let v = ScalarField::<f64>::from_fn(grid, |p| {
            (2.0 * std::f64::consts::PI * 3.0 * p[0]).sin() * (p[1] * 5.0).cos() + 0.7
        });
        let mv = mollify(&fft, &v, &k).unwrap();
        assert!((mv.mean() - v.mean()).abs() < 1e-12);
    }

    #[test]
    fn too_narrow_kernel_is_rejected() {
        let (grid, fft) = setup(64);
        // interface mode with eps < 2h
        assert!(mollifier_kernel(grid, &fft, 0.02, 0.25, MollifierMode::Interface).is_err());
    }
}
