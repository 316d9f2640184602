//! Flat key-value run configuration: every key maps to one documented
//! constraint, and every constraint is checked at parse time so that a
//! config that parses will start running.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::constitutive::StressLaw;
use crate::error::Error;
use crate::grid::GridSpec;
use crate::mollifier::MollifierMode;
use crate::phase_init::ProfileParams;
use crate::scenario::{ModeInit, Scenario, ScenarioKind, VelocityRecipe};
use crate::stepper::DtPolicy;

#[derive(Debug, Clone, PartialEq)]
pub enum BScale {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RadiiPolicy {
    Auto,
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BrakkeTest {
    Const1,
    GaussianBump { center: Vec<f64>, width: f64 },
}

impl BrakkeTest {
    pub fn name(&self) -> &'static str {
        match self {
            BrakkeTest::Const1 => "const1",
            BrakkeTest::GaussianBump { .. } => "gaussian_bump",
        }
    }
}

/// Fully validated, fully materialised run description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub epsilon: f64,
    pub gamma: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub p: f64,
    pub a_plus: f64,
    pub b_plus: f64,
    pub a_minus: f64,
    pub b_minus: f64,
    pub mollifier: MollifierMode,
    pub scenario: Scenario<f64>,
    pub profile_b: BScale,
    pub dt_policy: DtPolicy,
    pub dt: f64,
    pub safety: f64,
    pub dealias: bool,
    pub t_final: f64,
    pub record_interval: usize,
    pub centers_stride: usize,
    pub radii: RadiiPolicy,
    pub brakke_test: BrakkeTest,
    pub brakke_tol_abs: f64,
    pub brakke_tol_rel: f64,
    pub output_dir: PathBuf,
    pub snapshot_interval: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

impl SimConfig {
    pub fn stress_law(&self) -> StressLaw<f64> {
        StressLaw::new(self.p, self.a_plus, self.b_plus, self.a_minus, self.b_minus)
            .expect("validated at parse time")
    }

    /// Galerkin cutoff: the full dealiased band `floor(N/3)`.
    pub fn cutoff(&self) -> i64 {
        (self.grid.n() / 3) as i64
    }

    pub fn resolved_b(&self) -> f64 {
        match self.profile_b {
            BScale::Fixed(b) => b,
            BScale::Auto => ProfileParams::default_b(&self.scenario, self.grid.dim()),
        }
    }

    pub fn resolved_radii(&self) -> Vec<f64> {
        match &self.radii {
            RadiiPolicy::List(r) => r.clone(),
            RadiiPolicy::Auto => crate::diagnostics::default_radii(self.grid),
        }
    }

    /// Canonical echo: parses back to an equal config.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let kv = |s: &mut String, k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        kv(&mut s, "grid.d", self.grid.dim().to_string());
        kv(&mut s, "grid.n", self.grid.n().to_string());
        kv(&mut s, "physics.epsilon", fmt_f64(self.epsilon));
        kv(&mut s, "physics.gamma", fmt_f64(self.gamma));
        kv(&mut s, "physics.kappa1", fmt_f64(self.kappa1));
        kv(&mut s, "physics.kappa2", fmt_f64(self.kappa2));
        kv(&mut s, "physics.p", fmt_f64(self.p));
        kv(&mut s, "physics.a_plus", fmt_f64(self.a_plus));
        kv(&mut s, "physics.b_plus", fmt_f64(self.b_plus));
        kv(&mut s, "physics.a_minus", fmt_f64(self.a_minus));
        kv(&mut s, "physics.b_minus", fmt_f64(self.b_minus));
        kv(&mut s, "physics.mollifier", self.mollifier.name().to_string());
        match &self.scenario.kind {
            ScenarioKind::Circle { center, radius } => {
                kv(&mut s, "scenario.kind", "circle".to_string());
                kv(&mut s, "scenario.center", fmt_point(&center[..self.grid.dim()]));
                kv(&mut s, "scenario.radius", fmt_f64(*radius));
            }
            ScenarioKind::Stripe { y0, y1 } => {
                kv(&mut s, "scenario.kind", "stripe".to_string());
                kv(&mut s, "scenario.y0", fmt_f64(*y0));
                kv(&mut s, "scenario.y1", fmt_f64(*y1));
            }
            ScenarioKind::TwoCircles {
                center1,
                radius1,
                center2,
                radius2,
            } => {
                kv(&mut s, "scenario.kind", "two_circles".to_string());
                kv(&mut s, "scenario.center", fmt_point(&center1[..self.grid.dim()]));
                kv(&mut s, "scenario.radius", fmt_f64(*radius1));
                kv(&mut s, "scenario.center2", fmt_point(&center2[..self.grid.dim()]));
                kv(&mut s, "scenario.radius2", fmt_f64(*radius2));
            }
            ScenarioKind::Polyline { vertices } => {
                kv(&mut s, "scenario.kind", "polyline".to_string());
                let vs: Vec<String> = vertices.iter().map(|v| fmt_point(&v[..])).collect();
                kv(&mut s, "scenario.vertices", vs.join("; "));
            }
        }
        match &self.scenario.u0 {
            VelocityRecipe::Zero => kv(&mut s, "scenario.u0", "zero".to_string()),
            VelocityRecipe::Shear { amplitude, wavenumber } => {
                kv(&mut s, "scenario.u0", "shear".to_string());
                kv(&mut s, "scenario.u0_amplitude", fmt_f64(*amplitude));
                kv(&mut s, "scenario.u0_wavenumber", wavenumber.to_string());
            }
            VelocityRecipe::Modes(list) => {
                kv(&mut s, "scenario.u0", "modes".to_string());
                let ms: Vec<String> = list
                    .iter()
                    .map(|m| {
                        let mut parts: Vec<String> =
                            m.k[..self.grid.dim()].iter().map(|k| k.to_string()).collect();
                        parts.push(m.polarization.to_string());
                        parts.push(fmt_f64(m.amplitude));
                        parts.join(",")
                    })
                    .collect();
                kv(&mut s, "scenario.u0_modes", ms.join("; "));
            }
        }
        match self.profile_b {
            BScale::Auto => kv(&mut s, "profile.b", "auto".to_string()),
            BScale::Fixed(b) => kv(&mut s, "profile.b", fmt_f64(b)),
        }
        kv(
            &mut s,
            "stepping.dt_policy",
            match self.dt_policy {
                DtPolicy::Auto => "auto".to_string(),
                DtPolicy::Fixed => "fixed".to_string(),
            },
        );
        kv(&mut s, "stepping.dt", fmt_f64(self.dt));
        kv(&mut s, "stepping.safety", fmt_f64(self.safety));
        kv(&mut s, "stepping.dealias", self.dealias.to_string());
        kv(&mut s, "stepping.t_final", fmt_f64(self.t_final));
        kv(&mut s, "diagnostics.record_interval", self.record_interval.to_string());
        kv(&mut s, "diagnostics.centers_stride", self.centers_stride.to_string());
        match &self.radii {
            RadiiPolicy::Auto => kv(&mut s, "diagnostics.radii", "auto".to_string()),
            RadiiPolicy::List(r) => {
                let rs: Vec<String> = r.iter().map(|x| fmt_f64(*x)).collect();
                kv(&mut s, "diagnostics.radii", rs.join(","));
            }
        }
        kv(&mut s, "diagnostics.brakke_test", self.brakke_test.name().to_string());
        if let BrakkeTest::GaussianBump { center, width } = &self.brakke_test {
            kv(&mut s, "diagnostics.bump_center", fmt_point(center));
            kv(&mut s, "diagnostics.bump_width", fmt_f64(*width));
        }
        kv(&mut s, "diagnostics.brakke_tol_abs", fmt_f64(self.brakke_tol_abs));
        kv(&mut s, "diagnostics.brakke_tol_rel", fmt_f64(self.brakke_tol_rel));
        kv(&mut s, "output.dir", self.output_dir.display().to_string());
        kv(&mut s, "output.snapshot_interval", self.snapshot_interval.to_string());
        kv(&mut s, "seed", self.seed.to_string());
        s
    }
}

fn fmt_f64(x: f64) -> String {
    // shortest round-trip representation
    format!("{x}")
}

fn fmt_point(p: &[f64]) -> String {
    p.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",")
}

const KNOWN_KEYS: &[&str] = &[
    "grid.d",
    "grid.n",
    "physics.epsilon",
    "physics.gamma",
    "physics.kappa1",
    "physics.kappa2",
    "physics.p",
    "physics.a_plus",
    "physics.b_plus",
    "physics.a_minus",
    "physics.b_minus",
    "physics.mollifier",
    "scenario.kind",
    "scenario.center",
    "scenario.radius",
    "scenario.y0",
    "scenario.y1",
    "scenario.center2",
    "scenario.radius2",
    "scenario.vertices",
    "scenario.u0",
    "scenario.u0_amplitude",
    "scenario.u0_wavenumber",
    "scenario.u0_modes",
    "profile.b",
    "stepping.dt_policy",
    "stepping.dt",
    "stepping.safety",
    "stepping.dealias",
    "stepping.t_final",
    "diagnostics.record_interval",
    "diagnostics.centers_stride",
    "diagnostics.radii",
    "diagnostics.brakke_test",
    "diagnostics.bump_center",
    "diagnostics.bump_width",
    "diagnostics.brakke_tol_abs",
    "diagnostics.brakke_tol_rel",
    "output.dir",
    "output.snapshot_interval",
    "seed",
];

struct Raw {
    map: BTreeMap<String, String>,
}

impl Raw {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64, Error> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::config(key, format!("expected a number, got '{v}'"))),
        }
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize, Error> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse::<usize>().map_err(|_| {
                Error::config(key, format!("expected a non-negative integer, got '{v}'"))
            }),
        }
    }

    fn i64(&self, key: &str, default: i64) -> Result<i64, Error> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<i64>()
                .map_err(|_| Error::config(key, format!("expected an integer, got '{v}'"))),
        }
    }

    fn u64(&self, key: &str, default: u64) -> Result<u64, Error> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| Error::config(key, format!("expected an unsigned integer, got '{v}'"))),
        }
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool, Error> {
        match self.get(key) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(Error::config(key, format!("expected true or false, got '{v}'"))),
        }
    }

    fn point(&self, key: &str, d: usize, default: &[f64]) -> Result<Vec<f64>, Error> {
        match self.get(key) {
            None => Ok(default[..d].to_vec()),
            Some(v) => {
                let parts: Result<Vec<f64>, _> =
                    v.split(',').map(|t| t.trim().parse::<f64>()).collect();
                let parts = parts.map_err(|_| {
                    Error::config(key, format!("expected {d} comma-separated numbers"))
                })?;
                if parts.len() != d {
                    return Err(Error::config(
                        key,
                        format!("expected {d} coordinates, got {}", parts.len()),
                    ));
                }
                Ok(parts)
            }
        }
    }
}

/// Parse a UTF-8 key-value document (`#` comments, `key = value` lines).
/// Unknown keys, malformed values and violated constraints are errors
/// naming the key and the constraint.
pub fn parse_config(text: &str) -> Result<SimConfig, Error> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                &format!("line {}", lineno + 1),
                format!("expected 'key = value', got '{line}'"),
            )
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::config(&key, "unknown configuration key"));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::config(&key, "duplicate key"));
        }
    }
    let raw = Raw { map };

    let d = raw.usize("grid.d", 2)?;
    let n = raw.usize("grid.n", 256)?;
    let grid = GridSpec::new(d, n)?;
    let h = grid.h::<f64>();

    let epsilon = raw.f64("physics.epsilon", 0.02)?;
    if epsilon < 2.0 * h {
        return Err(Error::config(
            "physics.epsilon",
            format!(
                "epsilon < 2h: {epsilon} is under-resolved on an N = {n} grid (2h = {})",
                2.0 * h
            ),
        ));
    }
    if epsilon > 1.0 {
        return Err(Error::config("physics.epsilon", "need epsilon <= 1"));
    }
    let gamma = raw.f64("physics.gamma", 0.25)?;
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::config("physics.gamma", "need 0 < gamma < 1/2"));
    }
    let kappa1 = raw.f64("physics.kappa1", 1.0)?;
    if kappa1 < 0.0 {
        return Err(Error::config("physics.kappa1", "kappa1 must be >= 0"));
    }
    let kappa2 = raw.f64("physics.kappa2", 1.0)?;
    if kappa2 <= 0.0 {
        return Err(Error::config("physics.kappa2", "kappa2 must be positive"));
    }
    let p = raw.f64("physics.p", 3.0)?;
    let a_plus = raw.f64("physics.a_plus", 1.0)?;
    let b_plus = raw.f64("physics.b_plus", 1.0)?;
    let a_minus = raw.f64("physics.a_minus", 1.0)?;
    let b_minus = raw.f64("physics.b_minus", 1.0)?;
    let law = StressLaw::new(p, a_plus, b_plus, a_minus, b_minus)?;
    if !law.meets_growth_exponent(d) {
        log::warn!(
            "physics.p = {p} does not exceed (d+2)/2 = {}; outside the exponent range of the \
             underlying analysis (run proceeds)",
            (d as f64 + 2.0) / 2.0
        );
    }

    let mollifier_name = raw.get("physics.mollifier").unwrap_or("interface");
    let mollifier = MollifierMode::parse(mollifier_name).ok_or_else(|| {
        Error::config(
            "physics.mollifier",
            format!("expected one of paper|interface|grid|none, got '{mollifier_name}'"),
        )
    })?;
    // width check without building the kernel
    let width = match mollifier {
        MollifierMode::Paper => epsilon.powf(gamma / d as f64),
        MollifierMode::Interface => epsilon,
        MollifierMode::Grid => 4.0 * h,
        MollifierMode::None => f64::INFINITY,
    };
    if width < 2.0 * h {
        return Err(Error::config(
            "physics.mollifier",
            format!("kernel width {width} below 2h; unresolvable"),
        ));
    }

    let kind = match raw.get("scenario.kind").unwrap_or("circle") {
        "circle" => {
            let c = raw.point("scenario.center", d, &[0.5, 0.5, 0.5])?;
            ScenarioKind::Circle {
                center: pad3(&c),
                radius: raw.f64("scenario.radius", 0.25)?,
            }
        }
        "stripe" => ScenarioKind::Stripe {
            y0: raw.f64("scenario.y0", 0.25)?,
            y1: raw.f64("scenario.y1", 0.75)?,
        },
        "two_circles" => {
            let c1 = raw.point("scenario.center", d, &[0.3, 0.3, 0.5])?;
            let c2 = raw.point("scenario.center2", d, &[0.75, 0.75, 0.5])?;
            ScenarioKind::TwoCircles {
                center1: pad3(&c1),
                radius1: raw.f64("scenario.radius", 0.12)?,
                center2: pad3(&c2),
                radius2: raw.f64("scenario.radius2", 0.1)?,
            }
        }
        "polyline" => {
            let text = raw.get("scenario.vertices").ok_or_else(|| {
                Error::config("scenario.vertices", "polyline scenarios need a vertex list")
            })?;
            let mut vertices = Vec::new();
            for chunk in text.split(';') {
                let chunk = chunk.trim();
                if chunk.is_empty() {
                    continue;
                }
                let xy: Result<Vec<f64>, _> =
                    chunk.split(',').map(|t| t.trim().parse::<f64>()).collect();
                let xy = xy
                    .map_err(|_| Error::config("scenario.vertices", format!("bad vertex '{chunk}'")))?;
                if xy.len() != 2 {
                    return Err(Error::config(
                        "scenario.vertices",
                        format!("vertex '{chunk}' must have two coordinates"),
                    ));
                }
                vertices.push([xy[0], xy[1]]);
            }
            ScenarioKind::Polyline { vertices }
        }
        other => {
            return Err(Error::config(
                "scenario.kind",
                format!("expected circle|stripe|two_circles|polyline, got '{other}'"),
            ))
        }
    };

    let u0 = match raw.get("scenario.u0").unwrap_or("shear") {
        "zero" => VelocityRecipe::Zero,
        "shear" => VelocityRecipe::Shear {
            amplitude: raw.f64("scenario.u0_amplitude", 0.1)?,
            wavenumber: raw.i64("scenario.u0_wavenumber", 1)?,
        },
        "modes" => {
            let text = raw.get("scenario.u0_modes").unwrap_or("");
            let mut list = Vec::new();
            for chunk in text.split(';') {
                let chunk = chunk.trim();
                if chunk.is_empty() {
                    continue;
                }
                let parts: Vec<&str> = chunk.split(',').map(|t| t.trim()).collect();
                if parts.len() != d + 2 {
                    return Err(Error::config(
                        "scenario.u0_modes",
                        format!("mode '{chunk}' must be k ({d} ints), polarization, amplitude"),
                    ));
                }
                let mut k = [0i64; 3];
                for a in 0..d {
                    k[a] = parts[a].parse::<i64>().map_err(|_| {
                        Error::config("scenario.u0_modes", format!("bad wavenumber in '{chunk}'"))
                    })?;
                }
                let polarization = parts[d].parse::<usize>().map_err(|_| {
                    Error::config("scenario.u0_modes", format!("bad polarization in '{chunk}'"))
                })?;
                let max_pol = if k.iter().all(|&c| c == 0) { d } else { d - 1 };
                if polarization >= max_pol {
                    return Err(Error::config(
                        "scenario.u0_modes",
                        format!("polarization {polarization} out of range (< {max_pol}) in '{chunk}'"),
                    ));
                }
                let amplitude = parts[d + 1].parse::<f64>().map_err(|_| {
                    Error::config("scenario.u0_modes", format!("bad amplitude in '{chunk}'"))
                })?;
                list.push(ModeInit {
                    k,
                    polarization,
                    amplitude,
                });
            }
            VelocityRecipe::Modes(list)
        }
        other => {
            return Err(Error::config(
                "scenario.u0",
                format!("expected zero|shear|modes, got '{other}'"),
            ))
        }
    };
    let scenario = Scenario { kind, u0 };
    scenario.validate(d)?;

    let profile_b = match raw.get("profile.b") {
        None | Some("auto") => BScale::Auto,
        Some(v) => BScale::Fixed(v.parse::<f64>().map_err(|_| {
            Error::config("profile.b", format!("expected a number or 'auto', got '{v}'"))
        })?),
    };
    let b = match profile_b {
        BScale::Auto => ProfileParams::default_b(&scenario, d),
        BScale::Fixed(b) => b,
    };
    let profile = ProfileParams { epsilon, b, gamma };
    profile.validate(&scenario, d)?;
    // pairwise boundary separation >= 4b (reach condition)
    if let ScenarioKind::TwoCircles {
        center1,
        radius1,
        center2,
        radius2,
    } = &scenario.kind
    {
        let sep = crate::grid::torus_distance(&center1[..d], &center2[..d]) - radius1 - radius2;
        if sep < 4.0 * b {
            return Err(Error::config(
                "scenario.center2",
                format!("boundary separation {sep} below 4b = {}", 4.0 * b),
            ));
        }
    }

    let dt_policy = match raw.get("stepping.dt_policy").unwrap_or("auto") {
        "auto" => DtPolicy::Auto,
        "fixed" => DtPolicy::Fixed,
        other => {
            return Err(Error::config(
                "stepping.dt_policy",
                format!("expected auto|fixed, got '{other}'"),
            ))
        }
    };
    let dt = raw.f64("stepping.dt", 1e-4)?;
    if dt_policy == DtPolicy::Fixed && !(dt > 0.0) {
        return Err(Error::config("stepping.dt", "fixed time step must be positive"));
    }
    let safety = raw.f64("stepping.safety", 0.9)?;
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::config("stepping.safety", "safety factor must lie in (0, 1]"));
    }
    let dealias = raw.bool("stepping.dealias", true)?;
    let t_final = raw.f64("stepping.t_final", 0.02)?;
    if !(t_final >= 0.0) {
        return Err(Error::config("stepping.t_final", "final time must be >= 0"));
    }

    let record_interval = raw.usize("diagnostics.record_interval", 20)?;
    if record_interval == 0 {
        return Err(Error::config("diagnostics.record_interval", "must be >= 1"));
    }
    let centers_stride = raw.usize("diagnostics.centers_stride", 4)?;
    if centers_stride == 0 {
        return Err(Error::config("diagnostics.centers_stride", "must be >= 1"));
    }
    let radii = match raw.get("diagnostics.radii") {
        None | Some("auto") => RadiiPolicy::Auto,
        Some(v) => {
            let rs: Result<Vec<f64>, _> = v.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let rs = rs.map_err(|_| {
                Error::config("diagnostics.radii", "expected 'auto' or comma-separated radii")
            })?;
            for &r in &rs {
                if !(r > 2.0 * h && r <= 0.5) {
                    return Err(Error::config(
                        "diagnostics.radii",
                        format!("radius {r} outside (2h, 1/2]"),
                    ));
                }
            }
            RadiiPolicy::List(rs)
        }
    };
    let brakke_test = match raw.get("diagnostics.brakke_test").unwrap_or("const1") {
        "const1" => BrakkeTest::Const1,
        "gaussian_bump" => BrakkeTest::GaussianBump {
            center: raw.point("diagnostics.bump_center", d, &[0.5, 0.5, 0.5])?,
            width: {
                let w = raw.f64("diagnostics.bump_width", 0.2)?;
                if !(w > 0.0) {
                    return Err(Error::config("diagnostics.bump_width", "width must be positive"));
                }
                w
            },
        },
        other => {
            return Err(Error::config(
                "diagnostics.brakke_test",
                format!("expected const1|gaussian_bump, got '{other}'"),
            ))
        }
    };
    let brakke_tol_abs = raw.f64("diagnostics.brakke_tol_abs", 1e-2)?;
    let brakke_tol_rel = raw.f64("diagnostics.brakke_tol_rel", 0.1)?;

    let output_dir = PathBuf::from(raw.get("output.dir").unwrap_or("out"));
    let snapshot_interval = raw.usize("output.snapshot_interval", 0)?;
    let seed = raw.u64("seed", 12345)?;

    Ok(SimConfig {
        grid,
        epsilon,
        gamma,
        kappa1,
        kappa2,
        p,
        a_plus,
        b_plus,
        a_minus,
        b_minus,
        mollifier,
        scenario,
        profile_b,
        dt_policy,
        dt,
        safety,
        dealias,
        t_final,
        record_interval,
        centers_stride,
        radii,
        brakke_test,
        brakke_tol_abs,
        brakke_tol_rel,
        output_dir,
        snapshot_interval,
        seed,
    })
}

fn pad3(p: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    out[..p.len()].copy_from_slice(p);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_documented_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.grid.dim(), 2);
        assert_eq!(cfg.grid.n(), 256);
        assert_eq!(cfg.epsilon, 0.02);
        assert_eq!(cfg.gamma, 0.25);
        assert_eq!(cfg.kappa1, 1.0);
        assert_eq!(cfg.kappa2, 1.0);
        assert_eq!(cfg.p, 3.0);
        assert_eq!(cfg.a_plus, 1.0);
        assert_eq!(cfg.b_minus, 1.0);
        assert_eq!(cfg.t_final, 0.02);
        match cfg.scenario.kind {
            ScenarioKind::Circle { radius, .. } => assert_eq!(radius, 0.25),
            _ => panic!("default scenario should be a circle"),
        }
        match cfg.scenario.u0 {
            VelocityRecipe::Shear { amplitude, wavenumber } => {
                assert_eq!(amplitude, 0.1);
                assert_eq!(wavenumber, 1);
            }
            _ => panic!("default velocity should be the 0.1 shear"),
        }
    }

    #[test]
    fn epsilon_resolution_error_names_constraint() {
        let err = parse_config("physics.epsilon = 0.001\ngrid.n = 64\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("physics.epsilon"), "{msg}");
        assert!(msg.contains("epsilon < 2h"), "{msg}");
    }

    #[test]
    fn oversized_radius_rejected() {
        let err = parse_config("scenario.kind = circle\nscenario.radius = 0.6\n").unwrap_err();
        assert!(err.to_string().contains("radius exceeds 0.45"), "{err}");
    }

    #[test]
    fn unknown_and_duplicate_keys_rejected() {
        assert!(parse_config("physics.viscosity = 1\n").is_err());
        assert!(parse_config("grid.n = 64\ngrid.n = 128\n").is_err());
    }

    #[test]
    fn echo_roundtrips_to_equal_config() {
        let cfg = parse_config(
            "grid.n = 64\nphysics.epsilon = 0.05\nscenario.kind = stripe\n\
             scenario.u0 = modes\nscenario.u0_modes = 0,0,1,0.25; 1,0,0,0.125\n\
             stepping.dt_policy = fixed\nstepping.dt = 0.0001\n\
             diagnostics.brakke_test = gaussian_bump\ndiagnostics.bump_width = 0.15\n",
        )
        .unwrap();
        let echoed = parse_config(&cfg.echo()).unwrap();
        assert_eq!(cfg, echoed);
        // and the default config round-trips too
        let dcfg = SimConfig::default();
        assert_eq!(dcfg, parse_config(&dcfg.echo()).unwrap());
    }

    #[test]
    fn mode_polarization_bounds_checked() {
        let err = parse_config("scenario.u0 = modes\nscenario.u0_modes = 1,0,1,0.5\n").unwrap_err();
        assert!(err.to_string().contains("polarization"), "{err}");
    }
}
