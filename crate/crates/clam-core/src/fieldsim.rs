//! Single-frequency point-scatterer field simulation along the aperture.
//!
//! Each scatterer contributes `A * exp(-j k_eff R(tau))` where `R` is the
//! exact Euclidean range to the scatterer (the estimator only ever assumes
//! the parabolic model, so the default simulation is deliberately
//! off-model). The constant fast-time phase of the carrier is dropped: at a
//! fixed range gate it multiplies every sample by one global unit phase,
//! which cancels in the estimate.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::aperture::{exact_range, parabolic_range, Aperture, Geometry};
use crate::error::Error;

/// A point scatterer at a fixed offset from the focus point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scatterer {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub amplitude: Complex64,
}

impl Scatterer {
    pub fn new(dx: f64, dy: f64, dz: f64, amplitude: Complex64) -> Result<Self, Error> {
        let mag = amplitude.norm();
        if !mag.is_finite() || mag <= 0.0 {
            return Err(Error::InvalidAmplitude(mag));
        }
        Ok(Self {
            dx,
            dy,
            dz,
            amplitude,
        })
    }

    /// Unit-amplitude scatterer.
    pub fn unit(dx: f64, dy: f64, dz: f64) -> Self {
        Self {
            dx,
            dy,
            dz,
            amplitude: Complex64::new(1.0, 0.0),
        }
    }

    fn offsets(&self) -> (f64, f64, f64) {
        (self.dx, self.dy, self.dz)
    }
}

/// An ordered, non-empty collection of scatterers.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    scatterers: Vec<Scatterer>,
}

impl Scene {
    pub fn new(scatterers: Vec<Scatterer>) -> Result<Self, Error> {
        if scatterers.is_empty() {
            return Err(Error::EmptyScene);
        }
        Ok(Self { scatterers })
    }

    pub fn single(s: Scatterer) -> Self {
        Self {
            scatterers: vec![s],
        }
    }

    pub fn scatterers(&self) -> &[Scatterer] {
        &self.scatterers
    }
}

/// Which range model drives the simulated phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangeModel {
    /// Exact Euclidean range (the physical truth).
    #[default]
    Exact,
    /// The estimator's own parabolic approximation, for oracle-equality
    /// debugging: simulator and estimator then share identical physics.
    Parabolic,
}

/// Additive noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseModel {
    /// Circular complex Gaussian, calibrated so the noise RMS is
    /// `noise_fraction` times the noiseless signal RMS.
    #[default]
    ComplexGaussian,
    /// Fixed magnitude `noise_fraction * signal RMS`, uniform random phase.
    /// A sensitivity-check alternative; the distribution the original
    /// experiments used is not recorded.
    FixedMagnitudeUniformPhase,
}

/// Complex field samples on the aperture's base grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub values: Vec<Complex64>,
    pub spacing: f64,
    pub seed: Option<u64>,
    pub noise_fraction: f64,
}

impl FieldSamples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Root-mean-square magnitude.
    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    /// Two-column (re, im) CSV with a header row.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<(), Error> {
        writeln!(out, "re,im")?;
        for v in &self.values {
            writeln!(out, "{:e},{:e}", v.re, v.im)?;
        }
        Ok(())
    }

    /// Parse the two-column CSV form. `spacing` is not stored in the file;
    /// it comes from the aperture the samples belong to.
    pub fn read_csv<R: std::io::BufRead>(input: R, spacing: f64) -> Result<Self, Error> {
        let mut values = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line == "re,im") {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |part: Option<&str>| -> Result<f64, Error> {
                part.ok_or_else(|| Error::Config(format!("line {}: expected re,im", lineno + 1)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))
            };
            let re = parse(parts.next())?;
            let im = parse(parts.next())?;
            values.push(Complex64::new(re, im));
        }
        if values.is_empty() {
            return Err(Error::Config("field file has no samples".into()));
        }
        Ok(Self {
            values,
            spacing,
            seed: None,
            noise_fraction: 0.0,
        })
    }
}

/// Simulate field samples with the default models (exact range, circular
/// complex Gaussian noise).
pub fn simulate(
    scene: &Scene,
    ap: &Aperture,
    g: &Geometry,
    noise_fraction: f64,
    seed: Option<u64>,
) -> Result<FieldSamples, Error> {
    simulate_with(
        scene,
        ap,
        g,
        noise_fraction,
        seed,
        RangeModel::Exact,
        NoiseModel::default(),
    )
}

/// Simulate with explicit range and noise models.
pub fn simulate_with(
    scene: &Scene,
    ap: &Aperture,
    g: &Geometry,
    noise_fraction: f64,
    seed: Option<u64>,
    range_model: RangeModel,
    noise_model: NoiseModel,
) -> Result<FieldSamples, Error> {
    if !noise_fraction.is_finite() || noise_fraction < 0.0 {
        return Err(Error::InvalidNoise(noise_fraction));
    }
    let n = ap.sample_count();
    let k = g.k_eff();
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let tau = ap.tau(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for sc in scene.scatterers() {
            let r = match range_model {
                RangeModel::Exact => exact_range(ap, g, sc.offsets(), tau),
                RangeModel::Parabolic => parabolic_range(ap, g, sc.offsets(), tau),
            };
            acc += sc.amplitude * Complex64::new(0.0, -k * r).exp();
        }
        values.push(acc);
    }

    if noise_fraction > 0.0 {
        let rms = (values.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64).sqrt();
        let target = noise_fraction * rms;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
        match noise_model {
            NoiseModel::ComplexGaussian => {
                // per-quadrature sigma so E|eta|^2 = target^2
                let sigma = target / std::f64::consts::SQRT_2;
                for v in values.iter_mut() {
                    let g1: f64 = rng.sample(StandardNormal);
                    let g2: f64 = rng.sample(StandardNormal);
                    *v += Complex64::new(sigma * g1, sigma * g2);
                }
            }
            NoiseModel::FixedMagnitudeUniformPhase => {
                for v in values.iter_mut() {
                    let phase = rng.random_range(0.0..std::f64::consts::TAU);
                    *v += target * Complex64::new(0.0, phase).exp();
                }
            }
        }
    }

    Ok(FieldSamples {
        values,
        spacing: ap.spacing(),
        seed,
        noise_fraction,
    })
}
