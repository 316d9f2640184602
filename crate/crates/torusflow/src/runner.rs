//! Run orchestration: initialisation, the step loop, per-record
//! diagnostics, file output and blow-up handling. Bitwise deterministic
//! for a fixed configuration.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use log::{info, warn};

use crate::config::{BrakkeTest, SimConfig};
use crate::diagnostics::{
    brakke_from_geometry, discrepancy_from_geometry, BallSampler, BrakkeValue, EnergyRecord,
    PhaseGeometry,
};
use crate::error::Error;
use crate::fft::Fft;
use crate::field::{ScalarField, VectorField};
use crate::mollifier::mollifier_kernel;
use crate::output::{
    write_manifest, write_snapshot, write_timeseries, RunStatus, Snapshot,
};
use crate::phase_init::{
    initial_energy_check, initial_phase, initial_velocity_spec, InitialEnergyReport,
    ProfileParams,
};
use crate::real::sum_pairwise_by;
use crate::spectral::{gradient, max_divergence, sym_component_count};
use crate::stepper::{SimState, StepEnergy, StepParams, Stepper};

/// Full trajectory information returned by [`run`]. On blow-up the
/// history is truncated at the failing step and `status` carries the
/// failure; outputs written so far are retained.
pub struct RunHistory {
    pub records: Vec<EnergyRecord<f64>>,
    pub steps: Vec<StepEnergy<f64>>,
    pub final_state: SimState<f64>,
    pub status: RunOutcome,
    pub initial_energy: InitialEnergyReport<f64>,
    pub written: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum RunOutcome {
    Completed,
    BlowUp { t: f64, what: String },
}

impl RunOutcome {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunOutcome::Completed)
    }
}

/// Build the Brakke test function on the grid: the constant 1 or a
/// periodic Gaussian bump (product of per-axis `exp(-sin^2(pi dx)/
/// (2 pi^2 w^2))` factors, which is smooth and matches the Euclidean
/// Gaussian near its centre).
pub fn brakke_test_field(cfg: &SimConfig) -> ScalarField<f64> {
    match &cfg.brakke_test {
        BrakkeTest::Const1 => ScalarField::<f64>::constant(cfg.grid, 1.0),
        BrakkeTest::GaussianBump { center, width } => {
            let c = center.clone();
            let w = *width;
            ScalarField::<f64>::from_fn(cfg.grid, move |x| {
                let mut q = 0.0;
                for (a, &ca) in c.iter().enumerate() {
                    let s = (std::f64::consts::PI * (x[a] - ca)).sin();
                    q += s * s;
                }
                (-q / (2.0 * std::f64::consts::PI.powi(2) * w * w)).exp()
            })
        }
    }
}

/// Everything needed to evaluate one diagnostics record.
struct Recorder<'a> {
    cfg: &'a SimConfig,
    stepper: &'a Stepper<f64>,
    sampler: BallSampler<f64>,
    phi_test: ScalarField<f64>,
    grad_test: VectorField<f64>,
    prev_mu: Option<(f64, f64, Option<f64>)>,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a SimConfig, stepper: &'a Stepper<f64>) -> Result<Self, Error> {
        let radii = cfg.resolved_radii();
        let sampler = BallSampler::new(cfg.grid, stepper.fft(), &radii, cfg.centers_stride)?;
        let phi_test = brakke_test_field(cfg);
        let grad_test = gradient(stepper.fft(), &phi_test);
        Ok(Recorder {
            cfg,
            stepper,
            sampler,
            phi_test,
            grad_test,
            prev_mu: None,
        })
    }

    fn record(&mut self, state: &SimState<f64>) -> EnergyRecord<f64> {
        let cfg = self.cfg;
        let fft = self.stepper.fft();
        let grid = cfg.grid;
        let eps = cfg.epsilon;
        let geom = PhaseGeometry::compute(fft, &state.phi, eps);

        let kinetic = state.u_hat.kinetic_energy();
        let surface = geom.mu_density.integral();
        let total = kinetic + cfg.kappa1 * surface;
        let disc = discrepancy_from_geometry(&geom, &state.phi, eps);
        let (_, discrepancy_max) = disc.min_max();
        let (phi_min, phi_max) = state.phi.min_max();
        let density_ratio = self.sampler.density_ratio(fft, &geom.mu_density);

        // viscous and phase dissipation integrals at this instant
        let u_grid = VectorField::from_components(
            (0..grid.dim()).map(|a| fft.inverse(state.u_hat.component(a))).collect(),
        )
        .expect("components share grid");
        let e = crate::spectral::sym_gradient(fft, &u_grid);
        let nsym = sym_component_count(grid.dim());
        let law = cfg.stress_law();
        let phi_v = state.phi.values();
        let diss_point = |i: usize| -> f64 {
            let mut e2 = 0.0;
            let mut c = 0;
            for a in 0..grid.dim() {
                for b in a..grid.dim() {
                    let v = e[c].values()[i];
                    e2 += if a == b { v * v } else { 2.0 * v * v };
                    c += 1;
                }
            }
            debug_assert_eq!(c, nsym);
            law.blend_viscosity(phi_v[i], e2) * e2
        };
        let dissipation_visc =
            sum_pairwise_by(grid.len(), diss_point) * grid.cell_volume::<f64>();
        let ac_point = |i: usize| -> f64 {
            let c = geom.laplacian.values()[i]
                - crate::constitutive::w_prime(phi_v[i]) / (eps * eps);
            c * c
        };
        let dissipation_ac = sum_pairwise_by(grid.len(), ac_point) * grid.cell_volume::<f64>()
            * eps
            / crate::constitutive::sigma_const::<f64>();

        let interface_length = if grid.dim() == 2 {
            crate::contour::extract_interface(&state.phi).total_length()
        } else {
            f64::NAN
        };

        // Brakke data
        let mu_weighted = crate::diagnostics::weighted_measure(&geom, Some(&self.phi_test));
        let u_moll = VectorField::from_components(
            (0..grid.dim())
                .map(|a| {
                    let mut buf = state.u_hat.component(a).coeffs().to_vec();
                    self.stepper.kernel().apply_spec_inplace(&mut buf);
                    fft.inverse(&crate::field::SpectralScalar::from_vec(grid, buf))
                })
                .collect(),
        )
        .expect("components share grid");
        let bval = brakke_from_geometry(
            &geom,
            &state.phi,
            &u_moll,
            eps,
            cfg.kappa2,
            &self.phi_test,
            &self.grad_test,
        );
        let (brakke_value, brakke_valid) = match bval {
            BrakkeValue::Value(v) => (v, true),
            BrakkeValue::Invalid { .. } => (f64::NAN, false),
        };
        let (brakke_lhs, brakke_rhs) = match self.prev_mu {
            None => (0.0, 0.0),
            Some((t_prev, mu_prev, b_prev)) => {
                let lhs = mu_weighted - mu_prev;
                let rhs = match (b_prev, brakke_valid) {
                    (Some(bp), true) => 0.5 * (bp + brakke_value) * (state.t - t_prev),
                    _ => f64::NAN,
                };
                (lhs, rhs)
            }
        };
        self.prev_mu = Some((
            state.t,
            mu_weighted,
            if brakke_valid { Some(brakke_value) } else { None },
        ));

        let max_div_u = max_divergence(fft, &state.u_hat);
        let cutoff2 = cfg.cutoff() * cfg.cutoff();
        let above = |i: usize, a: usize| -> f64 {
            let k = grid.wavevector(i);
            if k[0] * k[0] + k[1] * k[1] + k[2] * k[2] > cutoff2 {
                state.u_hat.component(a).coeffs()[i].norm_sqr()
            } else {
                0.0
            }
        };
        let mut energy_above_cutoff = 0.0;
        for a in 0..grid.dim() {
            energy_above_cutoff += sum_pairwise_by(grid.len(), |i| above(i, a));
        }

        EnergyRecord {
            t: state.t,
            kinetic,
            surface,
            total,
            dissipation_visc,
            dissipation_ac,
            discrepancy_max,
            density_ratio,
            phi_min,
            phi_max,
            interface_length,
            mu_weighted,
            brakke_value,
            brakke_valid,
            brakke_lhs,
            brakke_rhs,
            max_div_u,
            energy_above_cutoff,
        }
    }

    /// Curvature sanity threshold from the scenario (warning only).
    fn curvature_warning(&self) {
        if let crate::scenario::ScenarioKind::Circle { radius, .. } = &self.cfg.scenario.kind {
            let curv = 1.0 / radius;
            if self.cfg.epsilon * curv > 0.2 {
                warn!(
                    "epsilon * max curvature = {:.3} exceeds 0.2; profile may be distorted",
                    self.cfg.epsilon * curv
                );
            }
        }
    }
}

/// Build the stepper stack for a configuration.
pub fn build_stepper(cfg: &SimConfig) -> Result<Stepper<f64>, Error> {
    let fft = Fft::<f64>::new(cfg.grid);
    let kern = mollifier_kernel(cfg.grid, &fft, cfg.epsilon, cfg.gamma, cfg.mollifier)?;
    let phys = crate::stepper::PhysicsParams {
        epsilon: cfg.epsilon,
        gamma: cfg.gamma,
        kappa1: cfg.kappa1,
        kappa2: cfg.kappa2,
        law: cfg.stress_law(),
    };
    Stepper::new(cfg.grid, fft, kern, phys, cfg.cutoff(), cfg.dealias)
}

/// Build the initial state for a configuration.
pub fn initial_state(cfg: &SimConfig, stepper: &Stepper<f64>) -> Result<SimState<f64>, Error> {
    let profile = ProfileParams {
        epsilon: cfg.epsilon,
        b: cfg.resolved_b(),
        gamma: cfg.gamma,
    };
    let phi = initial_phase(&cfg.scenario, &profile, cfg.grid)?;
    let basis = crate::modes::build_mode_basis(cfg.grid, cfg.cutoff())?;
    let u_hat = initial_velocity_spec(&cfg.scenario, &basis, cfg.grid, stepper.fft());
    Ok(SimState { u_hat, phi, t: 0.0 })
}

/// Run a configuration to its final time. When `out_dir` is given, the
/// CSV time series, snapshots and the manifest are written there; on
/// blow-up partial outputs are retained and `status` reports the failure.
pub fn run(cfg: &SimConfig, out_dir: Option<&Path>) -> Result<RunHistory, Error> {
    let start_ns = now_ns();
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let stepper = build_stepper(cfg)?;
    let mut state = initial_state(cfg, &stepper)?;

    let u0_grid = VectorField::from_components(
        (0..cfg.grid.dim())
            .map(|a| stepper.fft().inverse(state.u_hat.component(a)))
            .collect(),
    )
    .expect("components share grid");
    let initial_energy = initial_energy_check(
        &state.phi,
        &u0_grid,
        cfg.kappa1,
        cfg.epsilon,
        &cfg.scenario,
        stepper.fft(),
    )?;
    if initial_energy.flagged {
        warn!(
            "discrete initial energy {:.6} exceeds the sharp-interface value {:.6} by more than 5%",
            initial_energy.discrete_total, initial_energy.analytic_total
        );
    }

    let mut recorder = Recorder::new(cfg, &stepper)?;
    recorder.curvature_warning();

    let stp = StepParams {
        dt: cfg.dt,
        policy: cfg.dt_policy,
        safety: cfg.safety,
        dealias: cfg.dealias,
    };

    let mut records = vec![recorder.record(&state)];
    let mut steps: Vec<StepEnergy<f64>> = Vec::new();
    let mut written: Vec<PathBuf> = Vec::new();
    let mut snap_counter = 0usize;
    if let Some(dir) = out_dir {
        written.push(write_snapshot_file(dir, snap_counter, cfg, &stepper, &state)?);
        snap_counter += 1;
    }

    let mut outcome = RunOutcome::Completed;
    let mut step_index = 0usize;
    let t_tol = cfg.t_final * 1e-12 + 1e-300;
    loop {
        let remaining = cfg.t_final - state.t;
        if remaining <= t_tol {
            break;
        }
        match stepper.step(&state, &stp, Some(remaining)) {
            Ok(out) => {
                steps.push(out.energy);
                state = out.state;
                step_index += 1;
                let done = cfg.t_final - state.t <= t_tol;
                if step_index % cfg.record_interval == 0 || done {
                    records.push(recorder.record(&state));
                    let record_index = records.len() - 1;
                    let want_snap = done
                        || (cfg.snapshot_interval > 0
                            && record_index % cfg.snapshot_interval == 0);
                    if want_snap {
                        if let Some(dir) = out_dir {
                            written.push(write_snapshot_file(
                                dir,
                                snap_counter,
                                cfg,
                                &stepper,
                                &state,
                            )?);
                            snap_counter += 1;
                        }
                    }
                }
            }
            Err(Error::BlowUp { t, what, diagnostic }) => {
                warn!("numerical blow-up at t = {t}: {what}\n{diagnostic}");
                outcome = RunOutcome::BlowUp {
                    t: state.t,
                    what: what.clone(),
                };
                // retain a final record and snapshot of the last good state
                records.push(recorder.record(&state));
                if let Some(dir) = out_dir {
                    written.push(write_snapshot_file(dir, snap_counter, cfg, &stepper, &state)?);
                }
                break;
            }
            Err(other) => return Err(other),
        }
    }

    if let Some(dir) = out_dir {
        let csv = dir.join("run.csv");
        write_timeseries(&csv, &records)?;
        written.push(csv);
        let status = match outcome {
            RunOutcome::Completed => RunStatus::Completed,
            RunOutcome::BlowUp { .. } => RunStatus::BlowUp,
        };
        write_manifest(dir, &cfg.echo(), status, start_ns, now_ns(), &written)?;
    }
    info!(
        "run finished: {} steps, {} records, status {:?}",
        step_index,
        records.len(),
        match &outcome {
            RunOutcome::Completed => "completed",
            RunOutcome::BlowUp { .. } => "blow-up",
        }
    );

    Ok(RunHistory {
        records,
        steps,
        final_state: state,
        status: outcome,
        initial_energy,
        written,
    })
}

fn write_snapshot_file(
    dir: &Path,
    index: usize,
    cfg: &SimConfig,
    stepper: &Stepper<f64>,
    state: &SimState<f64>,
) -> Result<PathBuf, Error> {
    let velocity: Vec<Vec<f64>> = (0..cfg.grid.dim())
        .map(|a| stepper.fft().inverse(state.u_hat.component(a)).into_values())
        .collect();
    let snap = Snapshot {
        d: cfg.grid.dim(),
        n: cfg.grid.n(),
        t: state.t,
        epsilon: cfg.epsilon,
        phi: state.phi.values().to_vec(),
        velocity,
    };
    let path = dir.join(format!("snap_{index:06}.bin"));
    write_snapshot(&path, &snap)?;
    Ok(path)
}

fn now_ns() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0)
}
