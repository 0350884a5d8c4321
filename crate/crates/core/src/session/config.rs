use super::SessionError;
use crate::quake::DEFAULT_DT;
use crate::scene::{load_scene, SceneGraph};
use crate::story::{load_scenario, Mode, OccupantRole, Scenario};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SEED_ENV: &str = "EVACSIM_SEED";
pub const LOG_DIR_ENV: &str = "EVACSIM_LOG_DIR";

fn default_tick() -> f64 {
    DEFAULT_DT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    #[default]
    Interactive,
    Script(String),
}

/// Everything needed to start a session. `scene` and `scenario` are file
/// paths or `builtin:<name>` references to the bundled demo assets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub mode: Mode,
    #[serde(default)]
    pub occupant_role: OccupantRole,
    pub scene: String,
    pub scenario: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tick")]
    pub tick: f64,
    #[serde(default)]
    pub input: InputSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
}

impl SessionConfig {
    /// Demo scene with the bundled scenario for `mode`.
    pub fn builtin(mode: Mode, seed: u64) -> Self {
        let scenario = match mode {
            Mode::Bp => "builtin:bp",
            Mode::Tp => "builtin:tp",
        };
        SessionConfig {
            mode,
            occupant_role: OccupantRole::Visitor,
            scene: "builtin:demo".into(),
            scenario: scenario.into(),
            seed,
            tick: DEFAULT_DT,
            input: InputSource::Interactive,
            session_id: None,
        }
    }

    /// Reads a JSON config; relative asset paths resolve against its folder.
    pub fn from_file(path: &Path) -> Result<Self, SessionError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SessionError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: SessionConfig = serde_json::from_str(&text)
            .map_err(|e| SessionError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let fix = |p: &mut String| {
            if !p.starts_with("builtin:") && Path::new(p.as_str()).is_relative() {
                *p = base.join(&*p).to_string_lossy().into_owned();
            }
        };
        fix(&mut cfg.scene);
        fix(&mut cfg.scenario);
        if let InputSource::Script(s) = &mut cfg.input {
            fix(s);
        }
        Ok(cfg)
    }

    /// Applies `EVACSIM_SEED` when set.
    pub fn with_env_overrides(mut self) -> Result<Self, SessionError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v.trim().parse().map_err(|_| {
                SessionError::Config(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))
            })?;
        }
        Ok(self)
    }

    pub fn session_id(&self) -> String {
        self.session_id
            .clone()
            .unwrap_or_else(|| format!("{:?}-{:016x}", self.mode, self.seed).to_lowercase())
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        if !(self.tick > 0.0) || !self.tick.is_finite() {
            return Err(SessionError::Config("tick must be positive".into()));
        }
        if let InputSource::Script(p) = &self.input {
            if !Path::new(p).exists() {
                return Err(SessionError::Config(format!(
                    "input script `{p}` does not exist"
                )));
            }
        }
        Ok(())
    }

    /// Loads and validates the scene and scenario.
    pub fn load_assets(&self) -> Result<(SceneGraph, Scenario), SessionError> {
        self.validate()?;
        let scene = match self.scene.strip_prefix("builtin:") {
            Some(name) => crate::demo::builtin_scene(name)
                .ok_or_else(|| SessionError::Config(format!("unknown builtin scene `{name}`")))?,
            None => load_scene(&read(&self.scene)?)
                .map_err(|e| SessionError::Config(format!("{}: {e}", self.scene)))?,
        };
        let scenario = match self.scenario.strip_prefix("builtin:") {
            Some(name) => crate::demo::builtin_scenario(name, &scene).ok_or_else(|| {
                SessionError::Config(format!("unknown builtin scenario `{name}`"))
            })?,
            None => load_scenario(&read(&self.scenario)?, &scene)
                .map_err(|e| SessionError::Config(format!("{}: {e}", self.scenario)))?,
        };
        if scenario.mode != self.mode {
            return Err(SessionError::Config(format!(
                "config mode {:?} does not match scenario mode {:?}",
                self.mode, scenario.mode
            )));
        }
        Ok((scene, scenario))
    }
}

fn read(path: &str) -> Result<String, SessionError> {
    std::fs::read_to_string(path).map_err(|e| SessionError::Config(format!("{path}: {e}")))
}

/// Output directory for session artifacts: `EVACSIM_LOG_DIR` or `fallback`.
pub fn log_dir(fallback: &Path) -> PathBuf {
    std::env::var_os(LOG_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| fallback.to_path_buf())
}
