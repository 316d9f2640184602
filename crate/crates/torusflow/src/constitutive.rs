//! Double-well potential, the profile constant sigma, per-phase Carreau
//! stress laws and the phase-blended stress, plus sampling-based
//! validation of the structural assumptions (coercivity, growth,
//! monotonicity).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Error;
use crate::real::Real;

/// `W(phi) = (1 - phi^2)^2 / 2`, the equal-depth quartic. Hard-coded:
/// sigma and every profile oracle depend on this exact form.
pub fn w_eval<T: Real>(phi: T) -> T {
    let q = T::one() - phi * phi;
    T::lit(0.5) * q * q
}

/// `W'(phi) = -2 phi (1 - phi^2)`.
pub fn w_prime<T: Real>(phi: T) -> T {
    -T::lit(2.0) * phi * (T::one() - phi * phi)
}

/// `sigma = integral_{-1}^{1} sqrt(2 W(s)) ds = integral (1 - s^2) ds = 4/3`.
pub fn sigma_const<T: Real>() -> T {
    T::lit(4.0) / T::lit(3.0)
}

/// Square matrix up to 3x3 with the active dimension tagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<T> {
    d: usize,
    m: [[T; 3]; 3],
}

impl<T: Real> Mat<T> {
    pub fn zero(d: usize) -> Self {
        Mat {
            d,
            m: [[T::zero(); 3]; 3],
        }
    }

    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate().take(d) {
            for (j, v) in row.iter_mut().enumerate().take(d) {
                *v = f(i, j);
            }
        }
        Mat { d, m }
    }

    pub fn diag(d: usize, entries: &[T]) -> Self {
        Mat::from_fn(d, |i, j| if i == j { entries[i] } else { T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.m[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.m[i][j] = v;
    }

    /// Frobenius norm squared `|A|^2 = A : A`.
    pub fn frob2(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.d {
            for j in 0..self.d {
                acc += self.m[i][j] * self.m[i][j];
            }
        }
        acc
    }

    /// `A : B = tr(A B)` (for symmetric matrices this is the entrywise dot).
    pub fn ddot(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for i in 0..self.d {
            for j in 0..self.d {
                acc += self.m[i][j] * other.m[j][i];
            }
        }
        acc
    }

    pub fn scaled(&self, c: T) -> Self {
        Mat::from_fn(self.d, |i, j| self.m[i][j] * c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Mat::from_fn(self.d, |i, j| self.m[i][j] - other.m[i][j])
    }

    pub fn add(&self, other: &Self) -> Self {
        Mat::from_fn(self.d, |i, j| self.m[i][j] + other.m[i][j])
    }

    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                let a = (self.m[i][j] - self.m[j][i]).abs();
                if a > worst {
                    worst = a;
                }
            }
        }
        worst
    }

    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        Mat::from_fn(self.d, |i, j| half * (self.m[i][j] + self.m[j][i]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluidPhase {
    Plus,
    Minus,
}

/// Per-phase Carreau parameters realising `tau(s) = (a + b |s|^2)^((p-2)/2) s`.
#[derive(Debug, Clone, Copy)]
pub struct StressLaw<T: Real> {
    p: T,
    a_plus: T,
    b_plus: T,
    a_minus: T,
    b_minus: T,
}

impl<T: Real> StressLaw<T> {
    /// Construct with the constraints the solver relies on: `p >= 2`
    /// (local Lipschitz continuity at the origin) and positive
    /// coefficients. The analysis additionally wants `p > (d+2)/2`;
    /// that is surfaced by [`Self::meets_growth_exponent`] and reported
    /// as a warning at configuration time, not enforced here, so that
    /// the Newtonian limit `p = 2` stays runnable.
    pub fn new(p: T, a_plus: T, b_plus: T, a_minus: T, b_minus: T) -> Result<Self, Error> {
        if !(p >= T::lit(2.0)) || !p.is_finite() {
            return Err(Error::config("physics.p", "growth exponent must satisfy p >= 2"));
        }
        for (key, v) in [
            ("physics.a_plus", a_plus),
            ("physics.b_plus", b_plus),
            ("physics.a_minus", a_minus),
            ("physics.b_minus", b_minus),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::config(key, "Carreau coefficients must be positive"));
            }
        }
        Ok(StressLaw {
            p,
            a_plus,
            b_plus,
            a_minus,
            b_minus,
        })
    }

    /// Bypass the constructor checks; used to probe laws outside the
    /// admissible range through [`validate_stress_law`].
    pub fn new_unchecked(p: T, a_plus: T, b_plus: T, a_minus: T, b_minus: T) -> Self {
        StressLaw {
            p,
            a_plus,
            b_plus,
            a_minus,
            b_minus,
        }
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn coefficients(&self, phase: FluidPhase) -> (T, T) {
        match phase {
            FluidPhase::Plus => (self.a_plus, self.b_plus),
            FluidPhase::Minus => (self.a_minus, self.b_minus),
        }
    }

    /// Whether `p > (d+2)/2`, the exponent range of the analysis.
    pub fn meets_growth_exponent(&self, d: usize) -> bool {
        self.p.as_f64() > (d as f64 + 2.0) / 2.0
    }

    /// Scalar Carreau viscosity `(a + b s2)^((p-2)/2)` with fast paths for
    /// the common exponents (p = 2 is the identity, p = 3 a square root).
    pub fn viscosity(&self, phase: FluidPhase, s2: T) -> T {
        let (a, b) = self.coefficients(phase);
        let base = a + b * s2;
        let pf = self.p.as_f64();
        if pf == 2.0 {
            T::one()
        } else if pf == 3.0 {
            base.sqrt()
        } else {
            base.powf((self.p - T::lit(2.0)) * T::lit(0.5))
        }
    }

    /// Blended scalar viscosity with the phase variable clamped to
    /// `[-1, 1]` so overshoot cannot break convexity of the blend.
    pub fn blend_viscosity(&self, phi: T, s2: T) -> T {
        let phi = phi.max(-T::one()).min(T::one());
        let half = T::lit(0.5);
        let wp = half * (T::one() + phi);
        let wm = half * (T::one() - phi);
        wp * self.viscosity(FluidPhase::Plus, s2) + wm * self.viscosity(FluidPhase::Minus, s2)
    }
}

/// Per-phase stress `tau(s)`; the input must be symmetric to 1e-10.
pub fn tau_phase<T: Real>(
    law: &StressLaw<T>,
    s: &Mat<T>,
    phase: FluidPhase,
) -> Result<Mat<T>, Error> {
    if s.max_asymmetry() > T::lit(1e-10) {
        return Err(Error::usage(
            "tau_phase: input matrix is not symmetric (asymmetry > 1e-10)",
        ));
    }
    let s = s.symmetrized();
    Ok(s.scaled(law.viscosity(phase, s.frob2())))
}

/// Phase-blended stress `(1+phi)/2 tau_plus + (1-phi)/2 tau_minus` with
/// `phi` clamped to `[-1, 1]`.
pub fn tau_blend<T: Real>(law: &StressLaw<T>, phi: T, s: &Mat<T>) -> Result<Mat<T>, Error> {
    if s.max_asymmetry() > T::lit(1e-10) {
        return Err(Error::usage(
            "tau_blend: input matrix is not symmetric (asymmetry > 1e-10)",
        ));
    }
    let s = s.symmetrized();
    Ok(s.scaled(law.blend_viscosity(phi, s.frob2())))
}

/// Outcome of the structural-assumption sampler.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport<T: Real> {
    /// Empirical lower coercivity constant: min of `tau(s):s / |s|^p`
    /// over samples with `|s| >= 1`.
    pub nu0_lower: T,
    /// Max of `|tau(s)| / (1 + |s|^(p-1))` over all samples.
    pub growth_sup: T,
    pub growth_ok: bool,
    pub monotone_ok: bool,
    pub samples: usize,
    /// Smallest monotonicity product `(tau(s)-tau(s_hat)):(s-s_hat)` seen.
    pub min_monotone_product: T,
    /// The sample pair attaining `min_monotone_product`.
    pub worst_pair: (Mat<T>, Mat<T>),
}

const MONOTONE_SLACK: f64 = -1e-12;

fn random_symmetric<T: Real, R: Rng>(rng: &mut R, d: usize) -> Mat<T> {
    // gaussian direction, symmetrised and normalised, then log-uniform
    // magnitude in [1e-3, 1e3]
    let mut g = Mat::<T>::zero(d);
    for i in 0..d {
        for j in 0..d {
            let x: f64 = StandardNormal.sample(rng);
            g.set(i, j, T::lit(x));
        }
    }
    let mut s = g.symmetrized();
    let norm = s.frob2().sqrt();
    if norm > T::zero() {
        s = s.scaled(T::one() / norm);
    } else {
        s.set(0, 0, T::one());
    }
    let u: f64 = rng.gen_range(-3.0..=3.0);
    s.scaled(T::lit(10f64.powf(u)))
}

/// Sample the structural assumptions for a stress law. Deterministic for
/// a fixed seed. Any NaN arising from an inadmissible law (negative
/// coefficients and the like) fails the corresponding check.
pub fn validate_stress_law<T: Real>(
    law: &StressLaw<T>,
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<AdmissibilityReport<T>, Error> {
    if samples < 1000 {
        return Err(Error::config("samples", "need at least 10^3 samples"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nu0_lower = T::infinity();
    let mut growth_sup = T::zero();
    let mut growth_ok = true;
    let mut monotone_ok = true;
    let mut min_product = T::infinity();
    let mut worst = (Mat::zero(d), Mat::zero(d));
    // direct formula without the symmetry gate (samples are symmetric by
    // construction); NaNs from inadmissible laws propagate intentionally
    let eval =
        |s: &Mat<T>, ph: FluidPhase| -> Mat<T> { s.scaled(law.viscosity(ph, s.frob2())) };
    for _ in 0..samples {
        let s = random_symmetric::<T, _>(&mut rng, d);
        let s_hat = random_symmetric::<T, _>(&mut rng, d);
        for phase in [FluidPhase::Plus, FluidPhase::Minus] {
            for m in [&s, &s_hat] {
                let tau = eval(m, phase);
                let mag = m.frob2().sqrt();
                let ts = tau.ddot(m);
                if mag >= T::one() {
                    let coer = ts / mag.powf(law.p());
                    if !(coer >= T::zero()) {
                        nu0_lower = T::nan();
                    } else if coer < nu0_lower {
                        nu0_lower = coer;
                    }
                }
                let growth = tau.frob2().sqrt() / (T::one() + mag.powf(law.p() - T::one()));
                if !growth.is_finite() {
                    growth_ok = false;
                } else if growth > growth_sup {
                    growth_sup = growth;
                }
            }
            let prod = eval(&s, phase)
                .sub(&eval(&s_hat, phase))
                .ddot(&s.sub(&s_hat));
            if !(prod >= T::lit(MONOTONE_SLACK)) {
                monotone_ok = false;
            }
            if !(prod >= min_product) {
                min_product = prod;
                worst = (s, s_hat);
            }
        }
    }
    if !(nu0_lower.is_finite() && nu0_lower > T::zero()) {
        growth_ok = false;
    }
    Ok(AdmissibilityReport {
        nu0_lower,
        growth_sup,
        growth_ok,
        monotone_ok,
        samples,
        min_monotone_product: min_product,
        worst_pair: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_well_values() {
        assert_eq!(w_eval(0.0f64), 0.5);
        assert_eq!(w_eval(1.0f64), 0.0);
        assert_eq!(w_eval(-1.0f64), 0.0);
        assert!((w_eval(0.5f64) - 0.28125).abs() < 1e-15);
        assert!((w_prime(0.5f64) + 0.75).abs() < 1e-15);
        assert_eq!(w_prime(0.0f64), 0.0);
        assert_eq!(w_prime(1.0f64), 0.0);
    }

    #[test]
    fn w_prime_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-5;
        for _ in 0..20 {
            let phi: f64 = rng.gen_range(-1.2..=1.2);
            let fd = (w_eval(phi + h) - w_eval(phi - h)) / (2.0 * h);
            assert!((fd - w_prime(phi)).abs() < 1e-6, "phi = {phi}");
        }
    }

    #[test]
    fn sigma_is_four_thirds_and_matches_quadrature() {
        let sigma: f64 = sigma_const();
        assert!((sigma - 4.0 / 3.0).abs() < 1e-15);
        // Simpson quadrature of sqrt(2 W) over [-1, 1] with 10^4 panels
        let n = 10_000usize;
        let h = 2.0 / n as f64;
        let f = |s: f64| (2.0 * w_eval(s)).sqrt();
        let mut acc = f(-1.0) + f(1.0);
        for i in 1..n {
            let s = -1.0 + i as f64 * h;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(s);
        }
        let quad = acc * h / 3.0;
        assert!((quad - sigma).abs() < 1e-8, "quad = {quad}");
        assert!(sigma > 0.0);
    }

    fn unit_law() -> StressLaw<f64> {
        StressLaw::new(3.0, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn tau_at_zero_is_zero() {
        let law = unit_law();
        let z = Mat::zero(2);
        let t = tau_phase(&law, &z, FluidPhase::Plus).unwrap();
        assert_eq!(t.frob2(), 0.0);
    }

    #[test]
    fn tau_example_p3_diag() {
        // s = diag(1,-1): |s|^2 = 2, tau = sqrt(3) s
        let law = unit_law();
        let s = Mat::diag(2, &[1.0, -1.0]);
        let t = tau_phase(&law, &s, FluidPhase::Plus).unwrap();
        let want = 3.0f64.sqrt();
        assert!((t.get(0, 0) - want).abs() < 1e-12);
        assert!((t.get(1, 1) + want).abs() < 1e-12);
        assert!(t.get(0, 1).abs() < 1e-15);
        // coercivity ratio of the spec example
        let ratio = t.ddot(&s) / s.frob2().sqrt().powi(3);
        assert!((ratio - (1.5f64).sqrt()).abs() < 1e-12);
        assert!((t.ddot(&s) - 2.0 * want).abs() < 1e-12);
    }

    #[test]
    fn p2_is_newtonian_identity() {
        let law = StressLaw::new(2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let s = Mat::from_fn(2, |i, j| (i + 2 * j) as f64 * 0.3 - 0.4).symmetrized();
        let t = tau_phase(&law, &s, FluidPhase::Minus).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(t.get(i, j), s.get(i, j));
            }
        }
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let law = unit_law();
        let mut s = Mat::zero(2);
        s.set(0, 1, 1.0);
        s.set(1, 0, 0.5);
        assert!(tau_phase(&law, &s, FluidPhase::Plus).is_err());
    }

    #[test]
    fn blend_endpoints_and_clamping() {
        let law = StressLaw::new(3.0, 1.0, 1.0, 2.0, 0.5).unwrap();
        let s = Mat::<f64>::diag(2, &[0.7, -0.2]);
        let tp = tau_phase(&law, &s, FluidPhase::Plus).unwrap();
        let tm = tau_phase(&law, &s, FluidPhase::Minus).unwrap();
        let b1 = tau_blend(&law, 1.0, &s).unwrap();
        let b0 = tau_blend(&law, 0.0, &s).unwrap();
        let bo = tau_blend(&law, 1.05, &s).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((b1.get(i, j) - tp.get(i, j)).abs() < 1e-14);
                let avg = 0.5 * (tp.get(i, j) + tm.get(i, j));
                assert!((b0.get(i, j) - avg).abs() < 1e-14);
                assert_eq!(bo.get(i, j), b1.get(i, j));
            }
        }
    }

    #[test]
    fn admissibility_of_default_law() {
        let law = unit_law();
        let rep = validate_stress_law(&law, 2, 10_000, 42).unwrap();
        assert!(rep.monotone_ok);
        assert!(rep.growth_ok);
        assert!(rep.nu0_lower > 0.0 && rep.nu0_lower.is_finite());
        assert!(rep.growth_sup.is_finite());
        assert!(rep.min_monotone_product >= -1e-12);
    }

    #[test]
    fn equal_arguments_give_zero_product() {
        let law = unit_law();
        let s = Mat::diag(2, &[0.4, -0.9]);
        let t = tau_phase(&law, &s, FluidPhase::Plus).unwrap();
        let prod = t.sub(&t).ddot(&s.sub(&s));
        assert_eq!(prod, 0.0);
    }

    #[test]
    fn negated_b_fails_monotonicity() {
        let law = StressLaw::new_unchecked(3.0, 1.0, -1.0, 1.0, -1.0);
        let rep = validate_stress_law(&law, 2, 2000, 42).unwrap();
        assert!(!rep.monotone_ok);
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(StressLaw::new(1.5, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(StressLaw::new(3.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(StressLaw::new(3.0, 1.0, 1.0, -1.0, 1.0).is_err());
        let law = StressLaw::new(2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(!law.meets_growth_exponent(2));
        assert!(unit_law().meets_growth_exponent(2));
        assert!(!StressLaw::new(2.4, 1.0, 1.0, 1.0, 1.0).unwrap().meets_growth_exponent(3));
    }
}
