//! Grid-valued scalar and vector fields, plus their spectral counterparts.

use num_complex::Complex;
use std::sync::OnceLock;

use crate::error::Error;
use crate::grid::GridSpec;
use crate::real::{sum_pairwise, sum_pairwise_by, Real};

/// Real-valued scalar field sampled on the lattice, with a lazily filled
/// cache of its Fourier coefficients (see [`crate::fft::Fft::hat`]).
#[derive(Debug)]
pub struct ScalarField<T: Real> {
    grid: GridSpec,
    data: Vec<T>,
    pub(crate) spec_cache: OnceLock<Vec<Complex<T>>>,
}

impl<T: Real> Clone for ScalarField<T> {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(s) = self.spec_cache.get() {
            let _ = cache.set(s.clone());
        }
        ScalarField {
            grid: self.grid,
            data: self.data.clone(),
            spec_cache: cache,
        }
    }
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(grid: GridSpec) -> Self {
        ScalarField {
            grid,
            data: vec![T::zero(); grid.len()],
            spec_cache: OnceLock::new(),
        }
    }

    pub fn constant(grid: GridSpec, c: T) -> Self {
        ScalarField {
            grid,
            data: vec![c; grid.len()],
            spec_cache: OnceLock::new(),
        }
    }

    pub fn from_vec(grid: GridSpec, data: Vec<T>) -> Self {
        assert_eq!(data.len(), grid.len(), "data length must match grid");
        ScalarField {
            grid,
            data,
            spec_cache: OnceLock::new(),
        }
    }

    /// Fill from a function of the physical coordinates.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[T]) -> T) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let p = grid.point::<T>(idx);
            data.push(f(&p[..grid.dim()]));
        }
        ScalarField::from_vec(grid, data)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    /// Mutable access drops the spectral cache.
    pub fn values_mut(&mut self) -> &mut [T] {
        self.spec_cache = OnceLock::new();
        &mut self.data
    }

    pub fn into_values(self) -> Vec<T> {
        self.data
    }

    pub fn at(&self, ix: &[usize]) -> T {
        self.data[self.grid.ravel(ix)]
    }

    /// Grid integral `h^d * sum`.
    pub fn integral(&self) -> T {
        sum_pairwise(&self.data) * self.grid.cell_volume::<T>()
    }

    pub fn mean(&self) -> T {
        sum_pairwise(&self.data) / T::from_index(self.grid.len())
    }

    pub fn min_max(&self) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for &v in &self.data {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }

    pub fn max_abs(&self) -> T {
        let (lo, hi) = self.min_max();
        lo.abs().max(hi.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Discrete `L^q` norm with quadrature weight `h^d`, `q in {1, 2}`;
    /// use [`Self::max_abs`] for `q = infinity`.
    pub fn norm_lq(&self, q: f64) -> T {
        let vol = self.grid.cell_volume::<T>();
        if (q - 1.0).abs() < 1e-12 {
            sum_pairwise_by(self.data.len(), |i| self.data[i].abs()) * vol
        } else if (q - 2.0).abs() < 1e-12 {
            (sum_pairwise_by(self.data.len(), |i| self.data[i] * self.data[i]) * vol).sqrt()
        } else {
            let qq = T::lit(q);
            (sum_pairwise_by(self.data.len(), |i| self.data[i].abs().powf(qq)) * vol)
                .powf(T::one() / qq)
        }
    }

    /// `L^2` inner product `h^d * sum(a * b)`.
    pub fn inner(&self, other: &Self) -> T {
        assert_eq!(self.grid, other.grid);
        sum_pairwise_by(self.data.len(), |i| self.data[i] * other.data[i])
            * self.grid.cell_volume::<T>()
    }
}

/// Velocity-style field: `d` scalar components on a shared grid.
#[derive(Debug, Clone)]
pub struct VectorField<T: Real> {
    components: Vec<ScalarField<T>>,
}

impl<T: Real> VectorField<T> {
    pub fn zeros(grid: GridSpec) -> Self {
        VectorField {
            components: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn from_components(components: Vec<ScalarField<T>>) -> Result<Self, Error> {
        if components.is_empty() {
            return Err(Error::usage("vector field needs at least one component"));
        }
        let grid = components[0].grid();
        if components.len() != grid.dim() {
            return Err(Error::usage("component count must equal grid dimension"));
        }
        if components.iter().any(|c| c.grid() != grid) {
            return Err(Error::usage("vector components must share one grid"));
        }
        Ok(VectorField { components })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[T], usize) -> T) -> Self {
        let components = (0..grid.dim())
            .map(|c| ScalarField::from_fn(grid, |p| f(p, c)))
            .collect();
        VectorField { components }
    }

    pub fn grid(&self) -> GridSpec {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarField<T> {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut ScalarField<T> {
        &mut self.components[i]
    }

    pub fn components(&self) -> &[ScalarField<T>] {
        &self.components
    }

    /// `(1/2) * integral |v|^2`.
    pub fn kinetic_energy(&self) -> T {
        let half = T::lit(0.5);
        let mut acc = T::zero();
        for c in &self.components {
            let v = c.values();
            acc += sum_pairwise_by(v.len(), |i| v[i] * v[i]);
        }
        half * acc * self.grid().cell_volume::<T>()
    }

    /// Pointwise maximum of the Euclidean magnitude.
    pub fn max_magnitude(&self) -> T {
        let n = self.grid().len();
        let mut best = T::zero();
        for i in 0..n {
            let mut m = T::zero();
            for c in &self.components {
                let v = c.values()[i];
                m += v * v;
            }
            if m > best {
                best = m;
            }
        }
        best.sqrt()
    }

    pub fn inner(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for (a, b) in self.components.iter().zip(other.components.iter()) {
            acc += a.inner(b);
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }
}

/// Complex Fourier coefficients of a scalar field.
///
/// Convention: `hat[k] = h^d * sum_x f(x) exp(-2 pi i k.x)`, so `hat[0]` is
/// the mean and synthesis is `f(x) = sum_k hat[k] exp(+2 pi i k.x)`.
#[derive(Debug, Clone)]
pub struct SpectralScalar<T: Real> {
    grid: GridSpec,
    data: Vec<Complex<T>>,
}

impl<T: Real> SpectralScalar<T> {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralScalar {
            grid,
            data: vec![Complex::new(T::zero(), T::zero()); grid.len()],
        }
    }

    pub fn from_vec(grid: GridSpec, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), grid.len());
        SpectralScalar { grid, data }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Parseval sum `sum_k |hat[k]|^2 = integral |f|^2`.
    pub fn energy(&self) -> T {
        sum_pairwise_by(self.data.len(), |i| self.data[i].norm_sqr())
    }
}

/// Spectral representation of a vector field.
#[derive(Debug, Clone)]
pub struct SpectralVector<T: Real> {
    components: Vec<SpectralScalar<T>>,
}

impl<T: Real> SpectralVector<T> {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralVector {
            components: (0..grid.dim()).map(|_| SpectralScalar::zeros(grid)).collect(),
        }
    }

    pub fn from_components(components: Vec<SpectralScalar<T>>) -> Self {
        assert!(!components.is_empty());
        let grid = components[0].grid();
        assert_eq!(components.len(), grid.dim());
        SpectralVector { components }
    }

    pub fn grid(&self) -> GridSpec {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &SpectralScalar<T> {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut SpectralScalar<T> {
        &mut self.components[i]
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }

    /// `(1/2) sum_k |u_hat(k)|^2` over all components (kinetic energy).
    pub fn kinetic_energy(&self) -> T {
        let mut acc = T::zero();
        for c in &self.components {
            acc += c.energy();
        }
        T::lit(0.5) * acc
    }

    pub fn is_zero(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.coeffs().iter().all(|z| z.re == T::zero() && z.im == T::zero()))
    }
}
