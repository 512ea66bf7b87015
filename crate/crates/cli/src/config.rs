//! Flat key-value run configuration.
//!
//! Files are plain text, one `key = value` pair per line, `#` comments,
//! dotted section keys (`vehicle.m`, `task.z0`, `gains.k_z`, `sim.h`).
//! Command-line `--set key=value` pairs go through the same parser and
//! override file values.

use std::fmt;
use std::path::Path;

use pointlock::{linalg::Vec3, Gains, SimConfig, TaskSpec, VehicleParams};

/// Configuration error: unknown key, bad value, or unreadable file.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Everything a scenario run needs, with the defaults of the desk-scale
/// experiments: parameters (1, 9.8, 2, 2, 6), target at the origin,
/// altitude 0.58, thresholds 0.1, RK4 step 1e-3.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub vehicle_m: f64,
    pub vehicle_g: f64,
    pub vehicle_j1: f64,
    pub vehicle_j2: f64,
    pub vehicle_j3: f64,

    pub task_target_x: f64,
    pub task_target_y: f64,
    pub task_target_z: f64,
    pub task_z0: f64,
    pub task_eps_s: f64,
    pub task_eps_rho: f64,

    pub gains_k_z: f64,
    pub gains_k_o3: f64,
    pub gains_k_o2: f64,

    pub sim_h: f64,
    pub sim_t: f64,
    pub sim_reorthonormalize_every: usize,
    pub sim_abort_on_infeasible: bool,

    /// Initial polar angle on the arc (degrees).
    pub init_theta_deg: f64,
    /// Horizontal orbit radius (m).
    pub init_radius: f64,
    /// Tangential speed (m/s); `None` selects the circular-orbit speed
    /// `sqrt(g z0)`.
    pub init_speed: Option<f64>,
    /// Vertical velocity perturbation (m/s) for the structured
    /// off-manifold scenarios.
    pub init_delta: f64,

    pub arc_theta_min_deg: f64,
    pub arc_theta_max_deg: f64,
    pub arc_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            vehicle_m: 1.0,
            vehicle_g: 9.8,
            vehicle_j1: 2.0,
            vehicle_j2: 2.0,
            vehicle_j3: 6.0,
            task_target_x: 0.0,
            task_target_y: 0.0,
            task_target_z: 0.0,
            task_z0: 0.58,
            task_eps_s: 0.1,
            task_eps_rho: 0.1,
            gains_k_z: 5.0,
            gains_k_o3: 0.0,
            gains_k_o2: 0.0,
            sim_h: 1e-3,
            sim_t: 2.0,
            sim_reorthonormalize_every: 1,
            sim_abort_on_infeasible: true,
            init_theta_deg: 20.0,
            init_radius: 0.9,
            init_speed: None,
            init_delta: 0.1,
            arc_theta_min_deg: 20.0,
            arc_theta_max_deg: 150.0,
            arc_n: 65,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .map_err(|_| ConfigError(format!("key {key}: expected a number, got `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse::<usize>()
        .map_err(|_| ConfigError(format!("key {key}: expected a non-negative integer, got `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(ConfigError(format!(
            "key {key}: expected true/false, got `{value}`"
        ))),
    }
}

impl RunConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key.trim() {
            "vehicle.m" => self.vehicle_m = parse_f64(key, v)?,
            "vehicle.g" => self.vehicle_g = parse_f64(key, v)?,
            "vehicle.j1" => self.vehicle_j1 = parse_f64(key, v)?,
            "vehicle.j2" => self.vehicle_j2 = parse_f64(key, v)?,
            "vehicle.j3" => self.vehicle_j3 = parse_f64(key, v)?,
            "task.target_x" => self.task_target_x = parse_f64(key, v)?,
            "task.target_y" => self.task_target_y = parse_f64(key, v)?,
            "task.target_z" => self.task_target_z = parse_f64(key, v)?,
            "task.z0" => self.task_z0 = parse_f64(key, v)?,
            "task.eps_s" => self.task_eps_s = parse_f64(key, v)?,
            "task.eps_rho" => self.task_eps_rho = parse_f64(key, v)?,
            "gains.k_z" => self.gains_k_z = parse_f64(key, v)?,
            "gains.k_o3" => self.gains_k_o3 = parse_f64(key, v)?,
            "gains.k_o2" => self.gains_k_o2 = parse_f64(key, v)?,
            "sim.h" => self.sim_h = parse_f64(key, v)?,
            "sim.t" => self.sim_t = parse_f64(key, v)?,
            "sim.reorthonormalize_every" => {
                self.sim_reorthonormalize_every = parse_usize(key, v)?
            }
            "sim.abort_on_infeasible" => self.sim_abort_on_infeasible = parse_bool(key, v)?,
            "init.theta_deg" => self.init_theta_deg = parse_f64(key, v)?,
            "init.radius" => self.init_radius = parse_f64(key, v)?,
            "init.speed" => self.init_speed = Some(parse_f64(key, v)?),
            "init.delta" => self.init_delta = parse_f64(key, v)?,
            "arc.theta_min_deg" => self.arc_theta_min_deg = parse_f64(key, v)?,
            "arc.theta_max_deg" => self.arc_theta_max_deg = parse_f64(key, v)?,
            "arc.n" => self.arc_n = parse_usize(key, v)?,
            other => return Err(ConfigError(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Apply a `key=value` assignment as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), ConfigError> {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("`--set {pair}`: expected key=value")))?;
        self.set(key, value)
    }

    /// Merge assignments from a config file.
    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(key, value)
                .map_err(|e| ConfigError(format!("{}:{}: {}", path.display(), lineno + 1, e.0)))?;
        }
        Ok(())
    }

    pub fn vehicle(&self) -> Result<VehicleParams, ConfigError> {
        VehicleParams::new(
            self.vehicle_m,
            self.vehicle_g,
            self.vehicle_j1,
            self.vehicle_j2,
            self.vehicle_j3,
        )
        .map_err(|e| ConfigError(e.to_string()))
    }

    pub fn task(&self) -> Result<TaskSpec, ConfigError> {
        TaskSpec::new(
            Vec3::new(self.task_target_x, self.task_target_y, self.task_target_z),
            self.task_z0,
            self.task_eps_s,
            self.task_eps_rho,
        )
        .map_err(|e| ConfigError(e.to_string()))
    }

    pub fn gains(&self) -> Gains {
        Gains::new(self.gains_k_z, self.gains_k_o3, self.gains_k_o2)
    }

    pub fn sim(&self) -> Result<SimConfig, ConfigError> {
        Ok(SimConfig::new(self.sim_h, self.sim_t)
            .map_err(|e| ConfigError(e.to_string()))?
            .with_reorthonormalize_every(self.sim_reorthonormalize_every)
            .with_abort_on_infeasible(self.sim_abort_on_infeasible))
    }

    /// Tangential initialization speed; defaults to the circular-orbit
    /// value `sqrt(g z0)` of the configured vehicle and task.
    pub fn speed(&self) -> f64 {
        self.init_speed
            .unwrap_or_else(|| (self.vehicle_g * self.task_z0.abs()).sqrt())
    }
}
