//! Construction of the initial pair `(u(.,0), phi(.,0))`: capped tanh
//! profile across the signed distance, projected velocity recipes and the
//! initial-energy audit.

use log::warn;

use crate::error::Error;
use crate::fft::Fft;
use crate::field::{ScalarField, SpectralScalar, SpectralVector, VectorField};
use crate::grid::GridSpec;
use crate::modes::{basis_field, ModeSet, Phase};
use crate::real::Real;
use crate::scenario::{Scenario, VelocityRecipe};
use crate::spectral::{leray_project_spec, truncate_spec};

/// Interface-profile scales: thickness `epsilon`, cap scale `b` and the
/// mollifier exponent `gamma`.
#[derive(Debug, Clone, Copy)]
pub struct ProfileParams<T> {
    pub epsilon: T,
    pub b: T,
    pub gamma: T,
}

impl<T: Real> ProfileParams<T> {
    /// Default cap scale for a scenario: `min(reach/2, 0.1)`.
    pub fn default_b(scn: &Scenario<T>, d: usize) -> T {
        (scn.reach(d) * T::lit(0.5)).min(T::lit(0.1))
    }

    /// Hard constraints plus the resolution-margin warning.
    ///
    /// `epsilon <= b/2` is enforced (beyond that the cap swallows the
    /// profile); the stricter margin `epsilon <= b/10` is only advisory
    /// because the stock configurations run at `b = 5 epsilon`.
    pub fn validate(&self, scn: &Scenario<T>, d: usize) -> Result<(), Error> {
        if !(self.epsilon > T::zero()) {
            return Err(Error::config("physics.epsilon", "interface thickness must be positive"));
        }
        if !(self.b > T::zero()) {
            return Err(Error::config("profile.b", "cap scale must be positive"));
        }
        if self.epsilon > self.b * T::lit(0.5) {
            return Err(Error::config(
                "profile.b",
                format!(
                    "cap scale b = {:.3e} must be at least 2 epsilon = {:.3e}",
                    self.b.as_f64(),
                    (self.epsilon * T::lit(2.0)).as_f64()
                ),
            ));
        }
        if self.epsilon > self.b / T::lit(10.0) {
            warn!(
                "profile.b: epsilon = {:.3e} exceeds b/10 = {:.3e}; interface cap is active within the transition layer",
                self.epsilon.as_f64(),
                (self.b / T::lit(10.0)).as_f64()
            );
        }
        let reach = scn.reach(d);
        if self.b > reach {
            return Err(Error::config(
                "profile.b",
                format!(
                    "cap scale b = {:.3e} exceeds the scenario reach {:.3e}",
                    self.b.as_f64(),
                    reach.as_f64()
                ),
            ));
        }
        Ok(())
    }
}

/// Odd, monotone, C^1 cap: identity on `[0, 1/4]`, constant `1/2` from
/// `1/2` on, cubic Hermite in between.
pub fn smooth_cap<T: Real>(s: T) -> T {
    if s < T::zero() {
        return -smooth_cap(-s);
    }
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    if s <= quarter {
        s
    } else if s >= half {
        half
    } else {
        // Hermite data: h(1/4) = 1/4, h'(1/4) = 1, h(1/2) = 1/2, h'(1/2) = 0
        let t = (s - quarter) / quarter;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = T::lit(2.0) * t3 - T::lit(3.0) * t2 + T::one();
        let h10 = t3 - T::lit(2.0) * t2 + t;
        let h01 = -T::lit(2.0) * t3 + T::lit(3.0) * t2;
        h00 * quarter + h10 * quarter + h01 * half
    }
}

/// `phi0(x) = tanh(b h(d(x)/b) / epsilon)`.
pub fn initial_phase<T: Real + 'static>(
    scn: &Scenario<T>,
    prm: &ProfileParams<T>,
    grid: GridSpec,
) -> Result<ScalarField<T>, Error> {
    let h = grid.h::<T>();
    if prm.epsilon < T::lit(2.0) * h {
        return Err(Error::config(
            "physics.epsilon",
            format!(
                "epsilon < 2h: interface thickness {:.3e} is under-resolved on an N = {} grid",
                prm.epsilon.as_f64(),
                grid.n()
            ),
        ));
    }
    prm.validate(scn, grid.dim())?;
    let dist = scn.distance_field();
    let b = prm.b;
    let eps = prm.epsilon;
    Ok(ScalarField::from_fn(grid, |x| {
        let d = dist(x);
        (b * smooth_cap(d / b) / eps).tanh()
    }))
}

/// Evaluate the velocity recipe, then Leray-project and truncate to the
/// Galerkin span. Recipe modes above the cutoff are dropped with a
/// warning.
pub fn initial_velocity<T: Real>(
    scn: &Scenario<T>,
    basis: &ModeSet,
    grid: GridSpec,
    fft: &Fft<T>,
) -> VectorField<T> {
    let spec = initial_velocity_spec(scn, basis, grid, fft);
    VectorField::from_components(
        (0..grid.dim()).map(|a| fft.inverse(spec.component(a))).collect(),
    )
    .expect("components share grid")
}

/// Spectral form of [`initial_velocity`] (what the stepper consumes).
pub fn initial_velocity_spec<T: Real>(
    scn: &Scenario<T>,
    basis: &ModeSet,
    grid: GridSpec,
    fft: &Fft<T>,
) -> SpectralVector<T> {
    let d = grid.dim();
    let raw: VectorField<T> = match &scn.u0 {
        VelocityRecipe::Zero => VectorField::zeros(grid),
        VelocityRecipe::Shear { amplitude, wavenumber } => {
            let amp = *amplitude;
            let k = *wavenumber;
            if k.abs() > basis.cutoff() {
                warn!("u0 shear wavenumber {k} above cutoff {}; dropped", basis.cutoff());
                VectorField::zeros(grid)
            } else {
                let two_pi = T::lit(2.0) * T::PI();
                VectorField::from_fn(grid, |p, c| {
                    if c == 0 {
                        amp * (two_pi * T::lit(k as f64) * p[1]).sin()
                    } else {
                        T::zero()
                    }
                })
            }
        }
        VelocityRecipe::Modes(list) => {
            let mut acc = VectorField::zeros(grid);
            for m in list {
                let k2 = m.k[0] * m.k[0] + m.k[1] * m.k[1] + m.k[2] * m.k[2];
                if k2 > basis.cutoff() * basis.cutoff() {
                    warn!(
                        "u0 mode k = {:?} above cutoff {}; dropped",
                        &m.k[..d],
                        basis.cutoff()
                    );
                    continue;
                }
                let f = basis_field::<T>(grid, m.k, m.polarization, Phase::Cos);
                for a in 0..d {
                    let dst = acc.component_mut(a).values_mut();
                    let src = f.component(a).values();
                    for (t, &s) in dst.iter_mut().zip(src.iter()) {
                        *t += m.amplitude * s;
                    }
                }
            }
            acc
        }
    };
    let mut spec = SpectralVector::from_components(
        (0..d)
            .map(|a| SpectralScalar::from_vec(grid, fft.hat(raw.component(a)).to_vec()))
            .collect(),
    );
    leray_project_spec(&mut spec);
    truncate_spec(&mut spec, basis.cutoff());
    spec
}

/// Closed-form kinetic energy of a recipe (distinct modes assumed).
pub fn analytic_kinetic_energy<T: Real>(recipe: &VelocityRecipe<T>) -> T {
    match recipe {
        VelocityRecipe::Zero => T::zero(),
        VelocityRecipe::Shear { amplitude, .. } => *amplitude * *amplitude * T::lit(0.25),
        VelocityRecipe::Modes(list) => {
            let mut acc = T::zero();
            for m in list {
                acc += m.amplitude * m.amplitude * T::lit(0.5);
            }
            acc
        }
    }
}

/// Comparison of the discrete initial energy against the sharp-interface
/// value `E0 = kappa1 * perimeter + kinetic`.
#[derive(Debug, Clone, Copy)]
pub struct InitialEnergyReport<T> {
    pub discrete_surface: T,
    pub discrete_kinetic: T,
    pub discrete_total: T,
    pub analytic_total: T,
    /// Set when the discrete energy exceeds the analytic one by > 5%.
    pub flagged: bool,
}

pub fn initial_energy_check<T: Real>(
    phi0: &ScalarField<T>,
    u0: &VectorField<T>,
    kappa1: T,
    epsilon: T,
    scn: &Scenario<T>,
    fft: &Fft<T>,
) -> Result<InitialEnergyReport<T>, Error> {
    if phi0.grid() != u0.grid() {
        return Err(Error::usage("initial_energy_check: fields on different grids"));
    }
    let surface = crate::diagnostics::surface_measure(fft, phi0, epsilon, None);
    let kinetic = u0.kinetic_energy();
    let discrete_total = kappa1 * surface + kinetic;
    let analytic_total =
        kappa1 * scn.perimeter(phi0.grid().dim()) + analytic_kinetic_energy(&scn.u0);
    let flagged = discrete_total > analytic_total * T::lit(1.05);
    Ok(InitialEnergyReport {
        discrete_surface: surface,
        discrete_kinetic: kinetic,
        discrete_total,
        analytic_total,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::build_mode_basis;
    use crate::scenario::ScenarioKind;

    #[test]
    fn cap_values() {
        assert_eq!(smooth_cap(0.1f64), 0.1);
        assert_eq!(smooth_cap(0.7f64), 0.5);
        assert_eq!(smooth_cap(-0.7f64), -0.5);
        assert!((smooth_cap(0.375f64) - 0.40625).abs() < 1e-15);
        assert_eq!(smooth_cap(0.25f64), 0.25);
        assert_eq!(smooth_cap(0.5f64), 0.5);
    }

    #[test]
    fn cap_is_monotone_and_c1() {
        let mut prev = -0.50001f64;
        let n = 10_000;
        for i in 0..=n {
            let s = -1.0 + 2.0 * i as f64 / n as f64;
            let v = smooth_cap(s);
            assert!(v >= prev - 1e-15, "not monotone at {s}");
            prev = v;
        }
        // C1 at the joints: compare finite differences across them
        for joint in [0.25f64, 0.5] {
            let h = 1e-7;
            let left = (smooth_cap(joint) - smooth_cap(joint - h)) / h;
            let right = (smooth_cap(joint + h) - smooth_cap(joint)) / h;
            assert!((left - right).abs() < 1e-5, "kink at {joint}");
        }
    }

    fn circle_scenario() -> Scenario<f64> {
        Scenario {
            kind: ScenarioKind::Circle {
                center: [0.5, 0.5, 0.0],
                radius: 0.25,
            },
            u0: VelocityRecipe::Zero,
        }
    }

    #[test]
    fn profile_examples() {
        let grid = GridSpec::new(2, 256).unwrap();
        let scn = circle_scenario();
        let prm = ProfileParams {
            epsilon: 0.02,
            b: 0.1,
            gamma: 0.25,
        };
        let phi = initial_phase(&scn, &prm, grid).unwrap();
        // on the zero level set
        let boundary = phi.at(&[(0.75f64 * 256.0) as usize, 128]);
        assert!(boundary.abs() < 1e-12);
        // 0.05 inside: cap active, phi = tanh(2.5)
        let inside = phi.at(&[(0.7f64 * 256.0) as usize, 128]);
        assert!((inside - 2.5f64.tanh()).abs() < 1e-12);
        assert!((inside - 0.98661).abs() < 1e-5);
        // bounded by the cap saturation value
        let cap = (prm.b * 0.5 / prm.epsilon).tanh();
        for &v in phi.values() {
            assert!(v.abs() <= cap + 1e-15);
        }
    }

    #[test]
    fn under_resolved_interface_rejected() {
        let grid = GridSpec::new(2, 64).unwrap();
        let prm = ProfileParams {
            epsilon: 0.02,
            b: 0.1,
            gamma: 0.25,
        };
        assert!(initial_phase(&circle_scenario(), &prm, grid).is_err());
    }

    #[test]
    fn saturation_where_cap_scale_allows_it() {
        // tanh(b/2eps) reaches 1 - 2e-9 only for b >= 21 eps
        let grid = GridSpec::new(2, 512).unwrap();
        let scn = Scenario::<f64> {
            kind: ScenarioKind::Stripe { y0: 0.2, y1: 0.8 },
            u0: VelocityRecipe::Zero,
        };
        let prm = ProfileParams {
            epsilon: 0.004,
            b: 0.1,
            gamma: 0.25,
        };
        let phi = initial_phase(&scn, &prm, grid).unwrap();
        let threshold = prm.b * 0.5 + 10.0 * prm.epsilon;
        for idx in 0..grid.len() {
            let p = grid.point::<f64>(idx);
            let d = scn.signed_distance(&p[..2]);
            if d.abs() >= threshold {
                assert!(
                    (phi.values()[idx].abs() - 1.0).abs() <= 2e-9,
                    "unsaturated at distance {d}"
                );
            }
            assert!(phi.values()[idx].abs() <= 1.0);
        }
    }

    #[test]
    fn velocity_recipes() {
        let grid = GridSpec::new(2, 64).unwrap();
        let fft = Fft::<f64>::new(grid);
        let basis = build_mode_basis(grid, 21).unwrap();

        let zero = Scenario::<f64> {
            kind: circle_scenario().kind,
            u0: VelocityRecipe::Zero,
        };
        let u = initial_velocity(&zero, &basis, grid, &fft);
        assert_eq!(u.max_magnitude(), 0.0);

        let shear = Scenario::<f64> {
            kind: circle_scenario().kind,
            u0: VelocityRecipe::Shear {
                amplitude: 0.1,
                wavenumber: 1,
            },
        };
        let u = initial_velocity(&shear, &basis, grid, &fft);
        // divergence-free and band-limited: projection leaves it alone
        for idx in 0..grid.len() {
            let p = grid.point::<f64>(idx);
            let want = 0.1 * (2.0 * std::f64::consts::PI * p[1]).sin();
            assert!((u.component(0).values()[idx] - want).abs() < 1e-12);
            assert!(u.component(1).values()[idx].abs() < 1e-12);
        }
        let ke = u.kinetic_energy();
        assert!((ke - 0.0025).abs() < 1e-12, "kinetic = {ke}");
        assert!((analytic_kinetic_energy(&shear.u0) - 0.0025).abs() < 1e-15);

        // mode above the cutoff is dropped
        let high = Scenario::<f64> {
            kind: circle_scenario().kind,
            u0: VelocityRecipe::Modes(vec![crate::scenario::ModeInit {
                k: [25, 0, 0],
                polarization: 0,
                amplitude: 1.0,
            }]),
        };
        let u = initial_velocity(&high, &basis, grid, &fft);
        assert_eq!(u.max_magnitude(), 0.0);

        // constant translation via the k = 0 block
        let translate = Scenario::<f64> {
            kind: circle_scenario().kind,
            u0: VelocityRecipe::Modes(vec![crate::scenario::ModeInit {
                k: [0, 0, 0],
                polarization: 1,
                amplitude: 0.3,
            }]),
        };
        let u = initial_velocity(&translate, &basis, grid, &fft);
        for idx in 0..grid.len() {
            assert!(u.component(0).values()[idx].abs() < 1e-14);
            assert!((u.component(1).values()[idx] - 0.3).abs() < 1e-13);
        }
    }
}
