//! Time integration of the coupled system: Galerkin-truncated momentum
//! equation with blended power-law stress, quadratic transport and the
//! mollified capillary force, plus the transported Allen-Cahn equation.
//!
//! Splitting per step (Lie, momentum first): two-stage Heun on the
//! velocity coefficients with the phase frozen, then one IMEX Euler step
//! of the phase equation with the updated velocity (diffusion inverted
//! exactly in Fourier space, transport and reaction explicit).
//!
//! The capillary force is assembled in the projected product form
//! `-P[(kappa1 eps/sigma) (lap phi grad phi) * zeta]`, which equals the
//! divergence form modulo a discrete gradient (annihilated by the
//! projection) and makes the work exchanged with the Allen-Cahn transport
//! term cancel exactly in the discrete energy budget.

use num_complex::Complex;

use crate::constitutive::{w_eval, w_prime, sigma_const, StressLaw};
use crate::error::Error;
use crate::fft::Fft;
use crate::field::{ScalarField, SpectralVector, VectorField};
use crate::grid::GridSpec;
use crate::mollifier::MollifierKernel;
use crate::real::{sum_pairwise_by, Real};
use crate::spectral::{
    dealias_spec, derivative_spec_inplace, laplacian_spec_inplace, leray_project_spec,
    sym_component_count, sym_index, truncate_spec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtPolicy {
    Fixed,
    Auto,
}

#[derive(Debug, Clone, Copy)]
pub struct StepParams<T> {
    pub dt: T,
    pub policy: DtPolicy,
    pub safety: T,
    pub dealias: bool,
}

#[derive(Debug, Clone)]
pub struct PhysicsParams<T: Real> {
    pub epsilon: T,
    pub gamma: T,
    pub kappa1: T,
    pub kappa2: T,
    pub law: StressLaw<T>,
}

impl<T: Real> PhysicsParams<T> {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.epsilon > T::zero() && self.epsilon <= T::one()) {
            return Err(Error::config("physics.epsilon", "need 0 < epsilon <= 1"));
        }
        if !(self.kappa1 >= T::zero()) {
            return Err(Error::config("physics.kappa1", "kappa1 must be >= 0"));
        }
        if !(self.kappa2 > T::zero()) {
            return Err(Error::config("physics.kappa2", "kappa2 must be positive"));
        }
        Ok(())
    }
}

/// The evolving pair: truncated divergence-free velocity coefficients and
/// the phase field on the grid.
#[derive(Debug, Clone)]
pub struct SimState<T: Real> {
    pub u_hat: SpectralVector<T>,
    pub phi: ScalarField<T>,
    pub t: T,
}

/// Hard cap on phase overshoot before the run is declared blown up.
pub const PHI_BLOWUP: f64 = 1.1;

/// Per-step energy bookkeeping (left-endpoint dissipation rates).
#[derive(Debug, Clone, Copy)]
pub struct StepEnergy<T> {
    pub t: T,
    pub kinetic: T,
    pub surface: T,
    pub total: T,
    /// `integral tau(phi, e(u)) : e(u)` at the step start.
    pub dissipation_visc: T,
    /// `(eps/sigma) integral (lap phi - W'/eps^2)^2` at the step start.
    pub dissipation_ac: T,
    pub dt: T,
    pub max_velocity: T,
}

pub struct StepOutcome<T: Real> {
    pub state: SimState<T>,
    pub energy: StepEnergy<T>,
}

/// Owns the transforms, the mollifier and the physics; all step methods
/// are deterministic functions of the state.
pub struct Stepper<T: Real> {
    grid: GridSpec,
    fft: Fft<T>,
    kern: MollifierKernel<T>,
    phys: PhysicsParams<T>,
    cutoff: i64,
    dealias: bool,
}

impl<T: Real> Stepper<T> {
    pub fn new(
        grid: GridSpec,
        fft: Fft<T>,
        kern: MollifierKernel<T>,
        phys: PhysicsParams<T>,
        cutoff: i64,
        dealias: bool,
    ) -> Result<Self, Error> {
        phys.validate()?;
        if cutoff < 1 || cutoff > (grid.n() / 3) as i64 {
            return Err(Error::config("cutoff", "need 1 <= K <= N/3"));
        }
        Ok(Stepper {
            grid,
            fft,
            kern,
            phys,
            cutoff,
            dealias,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn fft(&self) -> &Fft<T> {
        &self.fft
    }

    pub fn kernel(&self) -> &MollifierKernel<T> {
        &self.kern
    }

    pub fn physics(&self) -> &PhysicsParams<T> {
        &self.phys
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    fn project_truncate(&self, v: &mut SpectralVector<T>) {
        leray_project_spec(v);
        truncate_spec(v, self.cutoff);
    }

    fn grids_of(&self, u_hat: &SpectralVector<T>) -> Vec<Vec<T>> {
        (0..self.grid.dim())
            .map(|a| {
                let mut buf = u_hat.component(a).coeffs().to_vec();
                let mut out = vec![T::zero(); self.grid.len()];
                self.fft.inverse_buf(&mut buf, &mut out);
                out
            })
            .collect()
    }

    /// The mollified capillary stress tensor
    /// `(kappa1 eps / sigma) (grad phi (x) grad phi) * zeta`
    /// as packed symmetric components (diagnostic form).
    pub fn capillary_tensor(&self, phi: &ScalarField<T>) -> Vec<ScalarField<T>> {
        let d = self.grid.dim();
        let work = self.phase_work(phi);
        let scale = self.phys.kappa1 * self.phys.epsilon / sigma_const::<T>();
        let mut out = Vec::with_capacity(sym_component_count(d));
        for i in 0..d {
            for j in i..d {
                let mut prod = vec![T::zero(); self.grid.len()];
                for (idx, p) in prod.iter_mut().enumerate() {
                    *p = scale * work.grad[i][idx] * work.grad[j][idx];
                }
                let mut hat = vec![Complex::new(T::zero(), T::zero()); self.grid.len()];
                self.fft.forward_buf(&prod, &mut hat);
                self.kern.apply_spec_inplace(&mut hat);
                let mut grid_out = vec![T::zero(); self.grid.len()];
                self.fft.inverse_buf(&mut hat, &mut grid_out);
                out.push(ScalarField::from_vec(self.grid, grid_out));
            }
        }
        out
    }

    /// Gradient and Laplacian of the phase field (shared by the capillary
    /// force and the transport term within one step).
    fn phase_work(&self, phi: &ScalarField<T>) -> PhaseWork<T> {
        let hat = self.fft.hat(phi);
        let d = self.grid.dim();
        let mut grad = Vec::with_capacity(d);
        for a in 0..d {
            let mut buf = hat.to_vec();
            derivative_spec_inplace(&mut buf, self.grid, a);
            let mut g = vec![T::zero(); self.grid.len()];
            self.fft.inverse_buf(&mut buf, &mut g);
            grad.push(g);
        }
        let mut buf = hat.to_vec();
        laplacian_spec_inplace(&mut buf, self.grid);
        let mut lap = vec![T::zero(); self.grid.len()];
        self.fft.inverse_buf(&mut buf, &mut lap);
        PhaseWork { grad, lap }
    }

    /// Capillary force `-P_K [ (kappa1 eps/sigma) ((lap phi grad phi) * zeta) ]`.
    pub fn capillary_force_spec(&self, phi: &ScalarField<T>) -> SpectralVector<T> {
        let work = self.phase_work(phi);
        self.capillary_force_from_work(&work)
    }

    fn capillary_force_from_work(&self, work: &PhaseWork<T>) -> SpectralVector<T> {
        let d = self.grid.dim();
        let mut force = SpectralVector::zeros(self.grid);
        if self.phys.kappa1 == T::zero() {
            return force;
        }
        let scale = self.phys.kappa1 * self.phys.epsilon / sigma_const::<T>();
        let mut prod = vec![T::zero(); self.grid.len()];
        for a in 0..d {
            for (idx, p) in prod.iter_mut().enumerate() {
                *p = -scale * work.lap[idx] * work.grad[a][idx];
            }
            self.fft
                .forward_buf(&prod, force.component_mut(a).coeffs_mut());
            self.kern
                .apply_spec_inplace(force.component_mut(a).coeffs_mut());
        }
        self.project_truncate(&mut force);
        force
    }

    /// Stress + advection part of the momentum right-hand side:
    /// `P_K [ div tau(phi, e(u)) - u . grad u ]`, pseudo-spectral with the
    /// 2/3-rule mask on the quadratic term when dealiasing is on. Also
    /// reports `max |u|`, `max |e|^2` and the dissipation integral.
    fn stress_advection(&self, u_hat: &SpectralVector<T>, phi: &ScalarField<T>) -> StressOutput<T> {
        let d = self.grid.dim();
        let len = self.grid.len();
        let u = self.grids_of(u_hat);
        // full velocity gradient du[i][j] = d u_i / d x_j
        let mut du: Vec<Vec<Vec<T>>> = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let mut buf = u_hat.component(i).coeffs().to_vec();
                derivative_spec_inplace(&mut buf, self.grid, j);
                let mut g = vec![T::zero(); len];
                self.fft.inverse_buf(&mut buf, &mut g);
                row.push(g);
            }
            du.push(row);
        }
        // packed symmetric strain and blended stress
        let nsym = sym_component_count(d);
        let half = T::lit(0.5);
        let mut tau: Vec<Vec<T>> = vec![vec![T::zero(); len]; nsym];
        let mut max_u2 = T::zero();
        let mut max_e2 = T::zero();
        let phi_v = phi.values();
        // pointwise strain, viscosity and stress; dissipation summed
        // pairwise afterwards for determinism
        let mut diss_grid = vec![T::zero(); len];
        for idx in 0..len {
            let mut e = [T::zero(); 6];
            let mut e2 = T::zero();
            let mut c = 0;
            for i in 0..d {
                for j in i..d {
                    let v = half * (du[i][j][idx] + du[j][i][idx]);
                    e[c] = v;
                    let w = if i == j { v * v } else { T::lit(2.0) * v * v };
                    e2 += w;
                    c += 1;
                }
            }
            let nu = self.phys.law.blend_viscosity(phi_v[idx], e2);
            for (c, row) in tau.iter_mut().enumerate() {
                row[idx] = nu * e[c];
            }
            diss_grid[idx] = nu * e2;
            if e2 > max_e2 {
                max_e2 = e2;
            }
            let mut u2 = T::zero();
            for comp in u.iter() {
                u2 += comp[idx] * comp[idx];
            }
            if u2 > max_u2 {
                max_u2 = u2;
            }
        }
        let dissipation = sum_pairwise_by(len, |i| diss_grid[i]) * self.grid.cell_volume::<T>();
        // advection grids (u . grad) u_i
        let mut force = SpectralVector::zeros(self.grid);
        let mut work = vec![T::zero(); len];
        let mut tau_hat: Vec<Vec<Complex<T>>> =
            vec![vec![Complex::new(T::zero(), T::zero()); len]; nsym];
        for (c, row) in tau.iter().enumerate() {
            self.fft.forward_buf(row, &mut tau_hat[c]);
        }
        for i in 0..d {
            for (idx, w) in work.iter_mut().enumerate() {
                let mut acc = T::zero();
                for (j, comp) in u.iter().enumerate() {
                    acc += comp[idx] * du[i][j][idx];
                }
                *w = -acc;
            }
            let comp = force.component_mut(i);
            self.fft.forward_buf(&work, comp.coeffs_mut());
            if self.dealias {
                dealias_spec(comp, self.grid);
            }
            // add div tau spectrally: F_i += sum_j i 2 pi k_j tau_hat[ij]
            let coeffs = comp.coeffs_mut();
            let two_pi = T::lit(2.0) * T::PI();
            for (idx, z) in coeffs.iter_mut().enumerate() {
                let ix = self.grid.unravel(idx);
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..d {
                    if ix[j] == self.grid.n() / 2 {
                        continue;
                    }
                    let kj = T::lit(self.grid.wavenumber(ix[j]) as f64) * two_pi;
                    let th = tau_hat[sym_index(d, i, j)][idx];
                    acc += Complex::new(-th.im * kj, th.re * kj);
                }
                *z += acc;
            }
        }
        self.project_truncate(&mut force);
        StressOutput {
            force,
            max_u: max_u2.sqrt(),
            max_e2,
            dissipation,
        }
    }

    /// Full momentum right-hand side `A + B + D`, truncated to the basis.
    pub fn momentum_rhs(
        &self,
        u_hat: &SpectralVector<T>,
        phi: &ScalarField<T>,
    ) -> Result<SpectralVector<T>, Error> {
        let sa = self.stress_advection(u_hat, phi);
        let cap = self.capillary_force_spec(phi);
        let mut rhs = sa.force;
        for a in 0..self.grid.dim() {
            let dst = rhs.component_mut(a).coeffs_mut();
            for (z, s) in dst.iter_mut().zip(cap.component(a).coeffs().iter()) {
                *z += *s;
            }
        }
        if !rhs.is_finite() {
            return Err(Error::BlowUp {
                t: f64::NAN,
                what: "non-finite momentum right-hand side".to_string(),
                diagnostic: format!(
                    "max|u| = {:.3e}, max|e|^2 = {:.3e}",
                    sa.max_u.as_f64(),
                    sa.max_e2.as_f64()
                ),
            });
        }
        Ok(rhs)
    }

    /// One IMEX Euler step of the phase equation with frozen velocity:
    /// `(I - kappa2 dt Lap) phi_new = phi - dt (u*zeta).grad phi
    ///  - dt kappa2 W'(phi)/eps^2`.
    pub fn ac_step(
        &self,
        u_hat: &SpectralVector<T>,
        phi: &ScalarField<T>,
        dt: T,
    ) -> Result<ScalarField<T>, Error> {
        let work = self.phase_work(phi);
        self.ac_step_with_work(u_hat, phi, &work, dt)
    }

    fn ac_step_with_work(
        &self,
        u_hat: &SpectralVector<T>,
        phi: &ScalarField<T>,
        work: &PhaseWork<T>,
        dt: T,
    ) -> Result<ScalarField<T>, Error> {
        let d = self.grid.dim();
        let len = self.grid.len();
        let eps2 = self.phys.epsilon * self.phys.epsilon;
        let k2 = self.phys.kappa2;
        // transport velocity u * zeta on the grid (skipped if u = 0)
        let transport: Option<Vec<Vec<T>>> = if u_hat.is_zero() {
            None
        } else {
            Some(
                (0..d)
                    .map(|a| {
                        let mut buf = u_hat.component(a).coeffs().to_vec();
                        self.kern.apply_spec_inplace(&mut buf);
                        let mut g = vec![T::zero(); len];
                        self.fft.inverse_buf(&mut buf, &mut g);
                        g
                    })
                    .collect(),
            )
        };
        let phi_v = phi.values();
        let mut rhs = vec![T::zero(); len];
        for (idx, r) in rhs.iter_mut().enumerate() {
            let mut adv = T::zero();
            if let Some(v) = &transport {
                for (a, comp) in v.iter().enumerate() {
                    adv += comp[idx] * work.grad[a][idx];
                }
            }
            *r = phi_v[idx] - dt * adv - dt * k2 * w_prime(phi_v[idx]) / eps2;
        }
        let mut hat = vec![Complex::new(T::zero(), T::zero()); len];
        self.fft.forward_buf(&rhs, &mut hat);
        let four_pi2 = T::lit(4.0) * T::PI() * T::PI();
        for (idx, z) in hat.iter_mut().enumerate() {
            let kk = self.grid.wavevector(idx);
            let knorm2 = T::lit((kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2]) as f64);
            let denom = T::one() + k2 * dt * four_pi2 * knorm2;
            *z = Complex::new(z.re / denom, z.im / denom);
        }
        let mut out = vec![T::zero(); len];
        self.fft.inverse_buf(&mut hat, &mut out);
        let phi_new = ScalarField::from_vec(self.grid, out);
        let max_abs = phi_new.max_abs();
        if !max_abs.is_finite() || max_abs > T::lit(PHI_BLOWUP) {
            return Err(Error::BlowUp {
                t: f64::NAN,
                what: format!("phase overshoot |phi| = {:.4} exceeds 1.1", max_abs.as_f64()),
                diagnostic: format!("dt = {:.3e}", dt.as_f64()),
            });
        }
        Ok(phi_new)
    }

    /// Stability bound: `safety * min(reaction, advection CFL, explicit
    /// stress)`. The stress bound is absent while the velocity vanishes
    /// identically (there is no stress term to destabilise), which is what
    /// keeps pure interface-motion runs reaction-limited.
    pub fn stable_dt(&self, state: &SimState<T>) -> Result<T, Error> {
        let u = self.grids_of(&state.u_hat);
        let len = self.grid.len();
        let mut max_u2 = T::zero();
        for idx in 0..len {
            let mut s = T::zero();
            for comp in &u {
                s += comp[idx] * comp[idx];
            }
            if s > max_u2 {
                max_u2 = s;
            }
        }
        let max_e2 = if max_u2 == T::zero() {
            T::zero()
        } else {
            let e = crate::spectral::sym_gradient(
                &self.fft,
                &VectorField::from_components(
                    u.iter()
                        .map(|g| ScalarField::from_vec(self.grid, g.clone()))
                        .collect(),
                )
                .expect("components share grid"),
            );
            let d = self.grid.dim();
            let mut worst = T::zero();
            for idx in 0..len {
                let mut e2 = T::zero();
                let mut c = 0;
                for i in 0..d {
                    for j in i..d {
                        let v = e[c].values()[idx];
                        e2 += if i == j { v * v } else { T::lit(2.0) * v * v };
                        c += 1;
                    }
                }
                if e2 > worst {
                    worst = e2;
                }
            }
            worst
        };
        self.stable_dt_from_maxima(max_u2.sqrt(), max_e2, T::one())
    }

    /// The dt formula given the state maxima; `safety` multiplies at the
    /// end (the public op uses safety 1 and lets callers scale).
    pub fn stable_dt_from_maxima(&self, max_u: T, max_e2: T, safety: T) -> Result<T, Error> {
        let eps = self.phys.epsilon;
        let reaction = eps * eps / (T::lit(4.0) * self.phys.kappa2);
        let h = self.grid.h::<T>();
        let delta = T::lit(1e-12);
        let advection = h / (T::lit(2.0) * max_u + delta);
        let mut dt = reaction.min(advection);
        if max_u > T::zero() {
            // two-stage explicit stability for the stress term: the
            // tangent viscosity is at most (p-1) times the secant value,
            // and the sharpest mode is |k| = K with eigenvalue
            // nu (2 pi K)^2 / 2; RK2 tolerates dt * lambda <= 2.
            let p = self.phys.law.p();
            let nu_plus = self.phys.law.viscosity(crate::constitutive::FluidPhase::Plus, max_e2);
            let nu_minus = self.phys.law.viscosity(crate::constitutive::FluidPhase::Minus, max_e2);
            let nu = nu_plus.max(nu_minus) * (p - T::one()).max(T::one());
            let kf = T::lit(self.cutoff as f64);
            let visc = T::one() / (T::PI() * T::PI() * kf * kf * nu);
            dt = dt.min(visc);
        }
        let dt = dt * safety;
        if dt < T::lit(1e-12) || !dt.is_finite() {
            return Err(Error::BlowUp {
                t: f64::NAN,
                what: "stable time step collapsed below 1e-12 (velocity runaway)".to_string(),
                diagnostic: format!("max|u| = {:.3e}", max_u.as_f64()),
            });
        }
        Ok(dt)
    }

    /// One full splitting step. Deterministic; returns the advanced state
    /// plus the energy bookkeeping of the step. `dt_cap` clamps the step
    /// so a run can land exactly on its final time.
    pub fn step(
        &self,
        state: &SimState<T>,
        stp: &StepParams<T>,
        dt_cap: Option<T>,
    ) -> Result<StepOutcome<T>, Error> {
        let work = self.phase_work(&state.phi);
        // stage 1 also yields the maxima the auto policy needs
        let momentum_quiet = self.phys.kappa1 == T::zero() && state.u_hat.is_zero();
        let stage1 = if momentum_quiet {
            None
        } else {
            Some(self.stress_advection(&state.u_hat, &state.phi))
        };
        let (max_u, max_e2, diss_visc) = match &stage1 {
            Some(s) => (s.max_u, s.max_e2, s.dissipation),
            None => (T::zero(), T::zero(), T::zero()),
        };
        let mut dt = match stp.policy {
            DtPolicy::Fixed => stp.dt,
            DtPolicy::Auto => self.stable_dt_from_maxima(max_u, max_e2, stp.safety)?,
        };
        if let Some(cap) = dt_cap {
            dt = dt.min(cap);
        }
        if !(dt > T::zero()) {
            return Err(Error::config("stepping.dt", "time step must be positive"));
        }

        let u_new = if let Some(stage1) = stage1 {
            let cap = self.capillary_force_from_work(&work);
            // Heun: u* = u + dt r1; u_new = u + dt/2 (r1 + r2)
            let mut r1 = stage1.force;
            add_assign(&mut r1, &cap);
            let mut u_star = state.u_hat.clone();
            axpy(&mut u_star, dt, &r1);
            let mut r2 = self.stress_advection(&u_star, &state.phi).force;
            add_assign(&mut r2, &cap);
            let mut u_new = state.u_hat.clone();
            let half_dt = dt * T::lit(0.5);
            axpy(&mut u_new, half_dt, &r1);
            axpy(&mut u_new, half_dt, &r2);
            u_new
        } else {
            state.u_hat.clone()
        };
        if !u_new.is_finite() {
            return Err(Error::BlowUp {
                t: state.t.as_f64(),
                what: "non-finite velocity after momentum stage".to_string(),
                diagnostic: self.dump_state(state),
            });
        }

        // phase dissipation at the step start (left endpoint)
        let eps = self.phys.epsilon;
        let eps2 = eps * eps;
        let phi_v = state.phi.values();
        let chem = |i: usize| -> T {
            let c = work.lap[i] - w_prime(phi_v[i]) / eps2;
            c * c
        };
        let diss_ac = sum_pairwise_by(self.grid.len(), chem) * self.grid.cell_volume::<T>() * eps
            / sigma_const::<T>();

        let phi_new = self
            .ac_step_with_work(&u_new, &state.phi, &work, dt)
            .map_err(|e| match e {
                Error::BlowUp { what, diagnostic, .. } => Error::BlowUp {
                    t: state.t.as_f64(),
                    what,
                    diagnostic: format!("{diagnostic}\n{}", self.dump_state(state)),
                },
                other => other,
            })?;

        let kinetic = state.u_hat.kinetic_energy();
        let surface = self.surface_energy(&state.phi, &work);
        let energy = StepEnergy {
            t: state.t,
            kinetic,
            surface,
            total: kinetic + self.phys.kappa1 * surface,
            dissipation_visc: diss_visc,
            dissipation_ac: diss_ac,
            dt,
            max_velocity: max_u,
        };
        Ok(StepOutcome {
            state: SimState {
                u_hat: u_new,
                phi: phi_new,
                t: state.t + dt,
            },
            energy,
        })
    }

    /// Sigma-normalised diffuse surface energy from precomputed gradients.
    fn surface_energy(&self, phi: &ScalarField<T>, work: &PhaseWork<T>) -> T {
        let eps = self.phys.epsilon;
        let len = self.grid.len();
        let phi_v = phi.values();
        let half_eps = T::lit(0.5) * eps;
        let d = self.grid.dim();
        let density = |i: usize| -> T {
            let mut g2 = T::zero();
            for comp in work.grad.iter().take(d) {
                g2 += comp[i] * comp[i];
            }
            half_eps * g2 + w_eval(phi_v[i]) / eps
        };
        sum_pairwise_by(len, density) * self.grid.cell_volume::<T>() / sigma_const::<T>()
    }

    /// Total energy of a state (kinetic + kappa1 * surface), used by the
    /// per-step monitor and tests.
    pub fn total_energy(&self, state: &SimState<T>) -> T {
        let work = self.phase_work(&state.phi);
        state.u_hat.kinetic_energy() + self.phys.kappa1 * self.surface_energy(&state.phi, &work)
    }

    fn dump_state(&self, state: &SimState<T>) -> String {
        let (lo, hi) = state.phi.min_max();
        format!(
            "state dump: t = {:.6e}, kinetic = {:.6e}, phi range [{:.4}, {:.4}]",
            state.t.as_f64(),
            state.u_hat.kinetic_energy().as_f64(),
            lo.as_f64(),
            hi.as_f64()
        )
    }

    /// Work done by the capillary force on `u` (spectral pairing); the
    /// energy budget pairs this against the transport work
    /// `-(kappa1 eps/sigma) integral (u*zeta).grad phi lap phi`.
    pub fn capillary_work(&self, phi: &ScalarField<T>, u_hat: &SpectralVector<T>) -> T {
        let cap = self.capillary_force_spec(phi);
        spectral_inner(&cap, u_hat)
    }

    /// Grid-sum form of the Allen-Cahn transport pairing
    /// `-(kappa1 eps/sigma) sum (u*zeta).grad phi lap phi h^d`.
    pub fn transport_pairing(&self, phi: &ScalarField<T>, u_hat: &SpectralVector<T>) -> T {
        let work = self.phase_work(phi);
        let d = self.grid.dim();
        let len = self.grid.len();
        let v: Vec<Vec<T>> = (0..d)
            .map(|a| {
                let mut buf = u_hat.component(a).coeffs().to_vec();
                self.kern.apply_spec_inplace(&mut buf);
                let mut g = vec![T::zero(); len];
                self.fft.inverse_buf(&mut buf, &mut g);
                g
            })
            .collect();
        let term = |i: usize| -> T {
            let mut adv = T::zero();
            for (a, comp) in v.iter().enumerate() {
                adv += comp[i] * work.grad[a][i];
            }
            adv * work.lap[i]
        };
        -self.phys.kappa1 * self.phys.epsilon / sigma_const::<T>()
            * sum_pairwise_by(len, term)
            * self.grid.cell_volume::<T>()
    }
}

struct PhaseWork<T> {
    grad: Vec<Vec<T>>,
    lap: Vec<T>,
}

struct StressOutput<T: Real> {
    force: SpectralVector<T>,
    max_u: T,
    max_e2: T,
    dissipation: T,
}

fn add_assign<T: Real>(dst: &mut SpectralVector<T>, src: &SpectralVector<T>) {
    for a in 0..dst.dim() {
        let d = dst.component_mut(a).coeffs_mut();
        for (z, s) in d.iter_mut().zip(src.component(a).coeffs().iter()) {
            *z += *s;
        }
    }
}

fn axpy<T: Real>(dst: &mut SpectralVector<T>, alpha: T, src: &SpectralVector<T>) {
    for a in 0..dst.dim() {
        let d = dst.component_mut(a).coeffs_mut();
        for (z, s) in d.iter_mut().zip(src.component(a).coeffs().iter()) {
            *z = Complex::new(z.re + alpha * s.re, z.im + alpha * s.im);
        }
    }
}

/// `sum_k conj(a) . b` over all components, real part (L^2 pairing by
/// Parseval).
pub fn spectral_inner<T: Real>(a: &SpectralVector<T>, b: &SpectralVector<T>) -> T {
    let mut acc = T::zero();
    for c in 0..a.dim() {
        let av = a.component(c).coeffs();
        let bv = b.component(c).coeffs();
        acc += sum_pairwise_by(av.len(), |i| av[i].re * bv[i].re + av[i].im * bv[i].im);
    }
    acc
}
