//! JSON scenario configuration.
//!
//! The schema mirrors the CLI surface: an aperture (named preset or raw
//! polynomial coefficients), geometry, window kind, noise, seed, an optional
//! explicit scene, per-axis sweep grids, solver mode, and thresholds.
//! Unknown keys are rejected so typos fail loudly.

use num_complex::Complex64;
use serde::Deserialize;

use crate::aperture::{Aperture, Geometry, PolynomialPath};
use crate::error::Error;
use crate::fieldsim::{Scatterer, Scene};
use crate::windows::WindowKind;

use super::{
    preset_cubic, preset_parabola, DEFAULT_DET_THRESHOLD, DEFAULT_IMAG_THRESHOLD,
    DEFAULT_SAMPLE_COUNT,
};

/// Environment variable that overrides the config seed (CI determinism).
pub const SEED_ENV_VAR: &str = "CLAM_SEED";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub aperture: ApertureConfig,
    #[serde(default)]
    pub geometry: Option<GeometryConfig>,
    #[serde(default = "default_window")]
    pub window: String,
    #[serde(default)]
    pub noise_fraction: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub scene: Vec<ScattererConfig>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default = "default_solver")]
    pub solver: String,
    #[serde(default = "default_det_threshold")]
    pub det_threshold: f64,
    #[serde(default = "default_imag_threshold")]
    pub imag_threshold: f64,
}

fn default_window() -> String {
    "hann".into()
}

fn default_solver() -> String {
    "full".into()
}

fn default_det_threshold() -> f64 {
    DEFAULT_DET_THRESHOLD
}

fn default_imag_threshold() -> f64 {
    DEFAULT_IMAG_THRESHOLD
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ApertureConfig {
    /// Named preset, e.g. `{"preset": "cubic-fig1"}`.
    Preset {
        preset: String,
        #[serde(default)]
        sample_count: Option<usize>,
    },
    /// Raw polynomial paths over `tau` in `[-half_extent, half_extent]`.
    Polynomial {
        x_coeffs: Vec<f64>,
        z_coeffs: Vec<f64>,
        #[serde(default = "default_half_extent")]
        half_extent: f64,
        sample_count: usize,
    },
}

fn default_half_extent() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub frequency_hz: f64,
    pub y0_m: f64,
    #[serde(default)]
    pub x0_m: f64,
    #[serde(default)]
    pub z0_m: f64,
    #[serde(default = "default_p")]
    pub p: u8,
}

fn default_p() -> u8 {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererConfig {
    pub dx_m: f64,
    pub dy_m: f64,
    pub dz_m: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude_mag: f64,
    #[serde(default)]
    pub amplitude_phase_rad: f64,
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Height sweep grid (sweep-height).
    #[serde(default)]
    pub dz: Option<GridSpec>,
    /// Horizontal offset grid (sweep-xy).
    #[serde(default)]
    pub dx: Option<GridSpec>,
    /// Range offset grid (sweep-xy, range-ambiguity).
    #[serde(default)]
    pub dy: Option<GridSpec>,
    /// Confuser horizontal grid (glint-map).
    #[serde(default)]
    pub confuser_dx: Option<GridSpec>,
    /// Confuser range grid (glint-map).
    #[serde(default)]
    pub confuser_dy: Option<GridSpec>,
    /// Height held fixed by sweep-xy.
    #[serde(default)]
    pub fixed_dz: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn validate(&self, name: &str) -> Result<(), Error> {
        if self.count < 1 {
            return Err(Error::Config(format!(
                "sweep grid '{name}' has count {} (must be >= 1)",
                self.count
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::Config(format!(
                "sweep grid '{name}' has invalid bounds [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// Grid values, `count` points from `min` to `max` inclusive (just `min`
    /// when `count == 1`).
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

/// Solver mode for sweeps and single estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    Full,
    Reduced,
}

impl SolverMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::Reduced => "reduced",
        }
    }
}

/// A fully resolved scenario: validated config with concrete domain objects.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub aperture: Aperture,
    pub geometry: Geometry,
    pub window: WindowKind,
    pub noise_fraction: f64,
    pub seed: u64,
    pub scene: Option<Scene>,
    pub sweep: SweepConfig,
    pub solver: SolverMode,
    pub det_threshold: f64,
    pub imag_threshold: f64,
}

impl ScenarioConfig {
    /// Parse from a JSON string, anchoring syntax errors to line/column.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Validate and build the concrete scenario objects. The `CLAM_SEED`
    /// environment variable, when set, overrides the config seed.
    pub fn resolve(&self) -> Result<Scenario, Error> {
        let (aperture, preset_geometry) = match &self.aperture {
            ApertureConfig::Preset {
                preset,
                sample_count,
            } => {
                let n = sample_count.unwrap_or(DEFAULT_SAMPLE_COUNT);
                let (ap, g) = match preset.as_str() {
                    "cubic-fig1" => preset_cubic(n)?,
                    "parabola-fig4" => preset_parabola(n)?,
                    other => {
                        return Err(Error::Config(format!(
                            "unknown preset '{other}' (expected cubic-fig1 or parabola-fig4)"
                        )))
                    }
                };
                (ap, Some(g))
            }
            ApertureConfig::Polynomial {
                x_coeffs,
                z_coeffs,
                half_extent,
                sample_count,
            } => {
                if x_coeffs.is_empty() || z_coeffs.is_empty() {
                    return Err(Error::Config(
                        "aperture paths need at least one coefficient".into(),
                    ));
                }
                let ap = Aperture::new(
                    PolynomialPath::new(x_coeffs.clone()),
                    PolynomialPath::new(z_coeffs.clone()),
                    *half_extent,
                    *sample_count,
                )
                .map_err(|e| Error::Config(e.to_string()))?;
                (ap, None)
            }
        };

        let geometry = match (&self.geometry, preset_geometry) {
            (Some(gc), _) => Geometry::new(gc.x0_m, gc.y0_m, gc.z0_m, gc.frequency_hz, gc.p)
                .map_err(|e| Error::Config(e.to_string()))?,
            (None, Some(g)) => g,
            (None, None) => {
                return Err(Error::Config(
                    "a polynomial aperture requires an explicit geometry section".into(),
                ))
            }
        };

        let window = WindowKind::parse(&self.window).ok_or_else(|| {
            Error::Config(format!(
                "unknown window '{}' (hann | rect | hann2)",
                self.window
            ))
        })?;

        if !self.noise_fraction.is_finite() || self.noise_fraction < 0.0 {
            return Err(Error::Config(format!(
                "noise_fraction must be >= 0 (got {})",
                self.noise_fraction
            )));
        }

        let solver = match self.solver.as_str() {
            "full" => SolverMode::Full,
            "reduced" => SolverMode::Reduced,
            other => {
                return Err(Error::Config(format!(
                    "unknown solver '{other}' (full | reduced)"
                )))
            }
        };

        for (name, grid) in [
            ("dz", &self.sweep.dz),
            ("dx", &self.sweep.dx),
            ("dy", &self.sweep.dy),
            ("confuser_dx", &self.sweep.confuser_dx),
            ("confuser_dy", &self.sweep.confuser_dy),
        ] {
            if let Some(g) = grid {
                g.validate(name)?;
            }
        }

        let scene = if self.scene.is_empty() {
            None
        } else {
            let scatterers = self
                .scene
                .iter()
                .map(|s| {
                    Scatterer::new(
                        s.dx_m,
                        s.dy_m,
                        s.dz_m,
                        Complex64::from_polar(s.amplitude_mag, s.amplitude_phase_rad),
                    )
                    .map_err(|e| Error::Config(e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(Scene::new(scatterers).map_err(|e| Error::Config(e.to_string()))?)
        };

        let seed = match std::env::var(SEED_ENV_VAR) {
            Ok(v) => v.trim().parse::<u64>().map_err(|_| {
                Error::Config(format!(
                    "{SEED_ENV_VAR} must be an unsigned integer (got '{v}')"
                ))
            })?,
            Err(_) => self.seed.unwrap_or(0),
        };

        Ok(Scenario {
            aperture,
            geometry,
            window,
            noise_fraction: self.noise_fraction,
            seed,
            scene,
            sweep: self.sweep.clone(),
            solver,
            det_threshold: self.det_threshold,
            imag_threshold: self.imag_threshold,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset_config_resolves() {
        let cfg = ScenarioConfig::from_json(
            r#"{"aperture": {"preset": "cubic-fig1", "sample_count": 501}}"#,
        )
        .unwrap();
        let sc = cfg.resolve().unwrap();
        assert_eq!(sc.aperture.sample_count(), 501);
        assert_eq!(sc.geometry.frequency, 9.0e9);
        assert_eq!(sc.window, WindowKind::Hann);
        assert_eq!(sc.solver, SolverMode::Full);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ScenarioConfig::from_json(
            r#"{"aperture": {"preset": "cubic-fig1"}, "nois_fraction": 0.1}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "error should be line-anchored: {msg}");
    }

    #[test]
    fn syntax_error_is_line_anchored() {
        let err = ScenarioConfig::from_json("{\n  \"aperture\": ,\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn empty_grid_rejected() {
        let cfg = ScenarioConfig::from_json(
            r#"{"aperture": {"preset": "cubic-fig1", "sample_count": 64},
                "sweep": {"dz": {"min": -25.0, "max": 25.0, "count": 0}}}"#,
        )
        .unwrap();
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn polynomial_aperture_requires_geometry() {
        let cfg = ScenarioConfig::from_json(
            r#"{"aperture": {"x_coeffs": [0.0, 27.75], "z_coeffs": [0.0, 0.0, 0.5], "sample_count": 64}}"#,
        )
        .unwrap();
        assert!(cfg.resolve().is_err());
        let cfg = ScenarioConfig::from_json(
            r#"{"aperture": {"x_coeffs": [0.0, 27.75], "z_coeffs": [0.0, 0.0, 0.5], "sample_count": 64},
                "geometry": {"frequency_hz": 9e9, "y0_m": 1000.0}}"#,
        )
        .unwrap();
        let sc = cfg.resolve().unwrap();
        assert_eq!(sc.geometry.p, 2);
        assert_eq!(sc.geometry.x0, 0.0);
    }

    #[test]
    fn scene_with_phase_amplitude() {
        let cfg = ScenarioConfig::from_json(
            r#"{"aperture": {"preset": "parabola-fig4", "sample_count": 64},
                "scene": [{"dx_m": 0.0, "dy_m": 0.0, "dz_m": 3.0,
                           "amplitude_mag": 2.0, "amplitude_phase_rad": 1.5707963267948966}]}"#,
        )
        .unwrap();
        let sc = cfg.resolve().unwrap();
        let amp = sc.scene.unwrap().scatterers()[0].amplitude;
        assert!((amp - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn grid_values_inclusive_endpoints() {
        let g = GridSpec::new(-1.0, 1.0, 5);
        assert_eq!(g.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(GridSpec::new(3.0, 9.0, 1).values(), vec![3.0]);
    }

    // CLAM_SEED override is exercised through the CLI integration tests,
    // where the child process gets its own environment; mutating the
    // environment here would race with parallel tests.

    #[test]
    fn bad_window_and_solver_rejected() {
        let cfg = ScenarioConfig::from_json(
            r#"{"aperture": {"preset": "cubic-fig1", "sample_count": 64}, "window": "kaiser"}"#,
        )
        .unwrap();
        assert!(cfg.resolve().is_err());
        let cfg = ScenarioConfig::from_json(
            r#"{"aperture": {"preset": "cubic-fig1", "sample_count": 64}, "solver": "tls"}"#,
        )
        .unwrap();
        assert!(cfg.resolve().is_err());
    }
}
