//! Scenario presets, sweep runners, and plot-data output.
//!
//! The two named presets reproduce the reference collection geometries: a
//! 55.5 m long, 0.5 m tall aperture observed at 9 GHz from 1 km range, with
//! either an asymmetric cubic or a symmetric parabolic vertical path. The
//! sweep runners generate the standard experiment grids (height sweep,
//! within-pixel offset sweep, range-offset ambiguity comparison, confuser
//! glint map) and emit one row per grid cell, sorted by grid index whatever
//! the evaluation order.

mod config;

pub use config::{
    ApertureConfig, GeometryConfig, GridSpec, ScattererConfig, Scenario, ScenarioConfig,
    SolverMode, SweepConfig, SEED_ENV_VAR,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::aperture::{Aperture, Geometry, PolynomialPath};
use crate::error::Error;
use crate::estimator::{assemble, solve_full, solve_reduced, Estimate};
use crate::fieldsim::{simulate, Scatterer, Scene};
use crate::windows::{BaseWindow, WindowSet};

/// Default normalized-determinant flag threshold (advisory; see docs).
pub const DEFAULT_DET_THRESHOLD: f64 = 1e-3;

/// Default imaginary-residual flag threshold, meters.
pub const DEFAULT_IMAG_THRESHOLD: f64 = 1.0;

/// Default aperture sample count for the presets.
pub const DEFAULT_SAMPLE_COUNT: usize = 20_000;

/// Preset aperture half length, meters (total length 55.5 m).
pub const APERTURE_HALF_LENGTH_M: f64 = 27.75;

/// Preset aperture height (max |z| over the path), meters.
pub const APERTURE_HEIGHT_M: f64 = 0.5;

/// Horizontal positions (m) of the cubic preset's vertical-path zeros.
pub const CUBIC_ZEROS_M: [f64; 3] = [-25.54, 5.55, 25.54];

/// Horizontal position (m) of the parabola preset's symmetric zeros.
pub const PARABOLA_ZERO_M: f64 = 19.63;

pub const PRESET_FREQUENCY_HZ: f64 = 9.0e9;
pub const PRESET_RANGE_M: f64 = 1000.0;

/// Linear-aperture horizontal resolution `lambda * y0 / (2 L)`.
pub fn horizontal_resolution(g: &Geometry, aperture_length: f64) -> f64 {
    g.wavelength() * g.y0 / (2.0 * aperture_length)
}

/// Vertical resolution of a rectangle circumscribing the aperture height:
/// `lambda * y0 / (2 H)`.
pub fn vertical_resolution(g: &Geometry, aperture_height: f64) -> f64 {
    g.wavelength() * g.y0 / (2.0 * aperture_height)
}

/// Half of [`vertical_resolution`]: the estimator's nominal validity band.
pub fn vertical_half_resolution(g: &Geometry) -> f64 {
    vertical_resolution(g, APERTURE_HEIGHT_M) / 2.0
}

fn preset_geometry() -> Geometry {
    Geometry::new(0.0, PRESET_RANGE_M, 0.0, PRESET_FREQUENCY_HZ, 2)
        .expect("preset geometry is valid")
}

/// Asymmetric cubic aperture: vertical zeros at the stated horizontal
/// positions, scaled so max |z| over the path is the preset height; linear
/// horizontal path covering the full length.
pub fn preset_cubic(sample_count: usize) -> Result<(Aperture, Geometry), Error> {
    let roots: Vec<f64> = CUBIC_ZEROS_M
        .iter()
        .map(|x| x / APERTURE_HALF_LENGTH_M)
        .collect();
    let unscaled = PolynomialPath::from_roots(&roots, 1.0);
    let scale = APERTURE_HEIGHT_M / unscaled.max_abs_over(1.0);
    let z_path = PolynomialPath::from_roots(&roots, scale);
    let x_path = PolynomialPath::new(vec![0.0, APERTURE_HALF_LENGTH_M]);
    let ap = Aperture::new(x_path, z_path, 1.0, sample_count)?;
    Ok((ap, preset_geometry()))
}

/// Symmetric parabolic aperture with the same length and height.
pub fn preset_parabola(sample_count: usize) -> Result<(Aperture, Geometry), Error> {
    let r = PARABOLA_ZERO_M / APERTURE_HALF_LENGTH_M;
    let unscaled = PolynomialPath::from_roots(&[-r, r], 1.0);
    let scale = APERTURE_HEIGHT_M / unscaled.max_abs_over(1.0);
    let z_path = PolynomialPath::from_roots(&[-r, r], scale);
    let x_path = PolynomialPath::new(vec![0.0, APERTURE_HALF_LENGTH_M]);
    let ap = Aperture::new(x_path, z_path, 1.0, sample_count)?;
    Ok((ap, preset_geometry()))
}

/// One sweep cell: grid indices, the scene truth, the estimate, and the
/// solve diagnostics. Estimate fields are absent for singular cells.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub variant: String,
    pub i: usize,
    pub j: usize,
    pub true_dx: f64,
    pub true_dy: f64,
    pub true_dz: f64,
    pub est_dx: Option<f64>,
    pub est_dy: Option<f64>,
    pub est_dz: Option<f64>,
    pub dz_error: Option<f64>,
    pub det_score: f64,
    pub imag_residual: Option<f64>,
    pub flags: String,
}

/// Rows for every grid cell of one experiment, ordered by `(variant, i, j)`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// CSV column names; exactly the `SweepRow` field names.
pub const CSV_HEADER: &str =
    "variant,i,j,true_dx,true_dy,true_dz,est_dx,est_dy,est_dz,dz_error,det_score,imag_residual,flags";

/// Format with 9 significant digits (stable across runs).
pub fn fmt_g9(x: f64) -> String {
    format!("{x:.8e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g9).unwrap_or_default()
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.variant,
                r.i,
                r.j,
                fmt_g9(r.true_dx),
                fmt_g9(r.true_dy),
                fmt_g9(r.true_dz),
                fmt_opt(r.est_dx),
                fmt_opt(r.est_dy),
                fmt_opt(r.est_dz),
                fmt_opt(r.dz_error),
                fmt_g9(r.det_score),
                fmt_opt(r.imag_residual),
                r.flags
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("rows serialize") + "\n"
    }
}

/// Deterministic per-cell noise seed derived from the scenario seed and the
/// grid indices (splitmix64 over a packed key).
fn cell_seed(base: u64, i: usize, j: usize) -> u64 {
    let mut z = base
        .wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((j as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(0x94D0_49BB_1331_11EB);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything fixed across the cells of one sweep.
struct SweepContext<'a> {
    aperture: &'a Aperture,
    geometry: &'a Geometry,
    windows: WindowSet,
    noise_fraction: f64,
    seed: u64,
    solver: SolverMode,
    det_threshold: f64,
    imag_threshold: f64,
    variant: String,
}

impl<'a> SweepContext<'a> {
    fn for_scenario(sc: &'a Scenario, solver: SolverMode, variant: String) -> Self {
        Self::new(&sc.aperture, &sc.geometry, sc, solver, variant)
    }

    fn new(
        aperture: &'a Aperture,
        geometry: &'a Geometry,
        sc: &Scenario,
        solver: SolverMode,
        variant: String,
    ) -> Self {
        let windows = WindowSet::build(
            &BaseWindow::new(sc.window, aperture.half_extent()),
            aperture,
        );
        Self {
            aperture,
            geometry,
            windows,
            noise_fraction: sc.noise_fraction,
            seed: sc.seed,
            solver,
            det_threshold: sc.det_threshold,
            imag_threshold: sc.imag_threshold,
            variant,
        }
    }

    fn estimate(&self, scene: &Scene, i: usize, j: usize) -> Result<Estimate, Error> {
        let field = simulate(
            scene,
            self.aperture,
            self.geometry,
            self.noise_fraction,
            Some(cell_seed(self.seed, i, j)),
        )?;
        let sys = assemble(&field, self.aperture, self.geometry, &self.windows)?;
        Ok(match self.solver {
            SolverMode::Full => solve_full(&sys, self.det_threshold, self.imag_threshold),
            SolverMode::Reduced => solve_reduced(&sys, self.det_threshold, self.imag_threshold),
        })
    }

    fn row(
        &self,
        scene: &Scene,
        truth: (f64, f64, f64),
        i: usize,
        j: usize,
    ) -> Result<SweepRow, Error> {
        let est = self.estimate(scene, i, j)?;
        Ok(SweepRow {
            variant: self.variant.clone(),
            i,
            j,
            true_dx: truth.0,
            true_dy: truth.1,
            true_dz: truth.2,
            est_dx: est.solution.map(|s| s.dx),
            est_dy: est.solution.map(|s| s.dy),
            est_dz: est.solution.map(|s| s.dz),
            dz_error: est.solution.map(|s| s.dz - truth.2),
            det_score: est.det_score,
            imag_residual: est.solution.map(|s| s.imag_residual),
            flags: est.flags.label(),
        })
    }
}

fn run_cells<F>(cells: Vec<(usize, usize)>, f: F) -> Result<Vec<SweepRow>, Error>
where
    F: Fn(usize, usize) -> Result<SweepRow, Error> + Sync,
{
    let mut rows = cells
        .into_par_iter()
        .map(|(i, j)| f(i, j))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| (a.variant.as_str(), a.i, a.j).cmp(&(b.variant.as_str(), b.i, b.j)));
    Ok(rows)
}

/// Height sweep: a single scatterer stepped through true `dz` values at
/// `dx = dy = 0`. Default grid `+-25 m`, 21 points.
pub fn run_height_sweep(sc: &Scenario) -> Result<SweepResult, Error> {
    let grid = sc.sweep.dz.unwrap_or(GridSpec::new(-25.0, 25.0, 21));
    grid.validate("dz")?;
    let ctx = SweepContext::for_scenario(sc, sc.solver, sc.solver.name().into());
    let dzs = grid.values();
    let cells: Vec<(usize, usize)> = (0..dzs.len()).map(|i| (i, 0)).collect();
    let rows = run_cells(cells, |i, j| {
        let scene = Scene::single(Scatterer::unit(0.0, 0.0, dzs[i]));
        ctx.row(&scene, (0.0, 0.0, dzs[i]), i, j)
    })?;
    Ok(SweepResult { rows })
}

/// Within-pixel offset sweep: `dx` and `dy` stepped over one horizontal
/// resolution cell (default `+-0.15 m`, 5x5) at a fixed height.
pub fn run_xy_sweep(sc: &Scenario) -> Result<SweepResult, Error> {
    let gx = sc.sweep.dx.unwrap_or(GridSpec::new(-0.15, 0.15, 5));
    let gy = sc.sweep.dy.unwrap_or(GridSpec::new(-0.15, 0.15, 5));
    gx.validate("dx")?;
    gy.validate("dy")?;
    let dz = sc.sweep.fixed_dz;
    let ctx = SweepContext::for_scenario(sc, sc.solver, sc.solver.name().into());
    let (xs, ys) = (gx.values(), gy.values());
    let mut cells = Vec::with_capacity(xs.len() * ys.len());
    for i in 0..xs.len() {
        for j in 0..ys.len() {
            cells.push((i, j));
        }
    }
    let rows = run_cells(cells, |i, j| {
        let scene = Scene::single(Scatterer::unit(xs[i], ys[j], dz));
        ctx.row(&scene, (xs[i], ys[j], dz), i, j)
    })?;
    Ok(SweepResult { rows })
}

/// Range-offset ambiguity comparison: true `dy` swept at `dz = 0`, solved
/// two ways — the reduced system on the parabola preset (which trades range
/// offsets against height) and the full system on the cubic preset (which
/// does not). Both variants land in one result, distinguished by the
/// `variant` column.
pub fn run_range_ambiguity(sc: &Scenario) -> Result<SweepResult, Error> {
    let lambda = sc.geometry.wavelength();
    let grid = sc
        .sweep
        .dy
        .unwrap_or(GridSpec::new(-lambda / 2.0, lambda / 2.0, 21));
    grid.validate("dy")?;
    let n = sc.aperture.sample_count();
    let (ap_parab, g_parab) = preset_parabola(n)?;
    let (ap_cubic, g_cubic) = preset_cubic(n)?;
    let dys = grid.values();
    let cells: Vec<(usize, usize)> = (0..dys.len()).map(|i| (i, 0)).collect();

    let ctx_p = SweepContext::new(
        &ap_parab,
        &g_parab,
        sc,
        SolverMode::Reduced,
        "parabola_reduced".into(),
    );
    let mut rows = run_cells(cells.clone(), |i, j| {
        let scene = Scene::single(Scatterer::unit(0.0, dys[i], 0.0));
        ctx_p.row(&scene, (0.0, dys[i], 0.0), i, j)
    })?;

    let ctx_c = SweepContext::new(
        &ap_cubic,
        &g_cubic,
        sc,
        SolverMode::Full,
        "cubic_full".into(),
    );
    rows.extend(run_cells(cells, |i, j| {
        let scene = Scene::single(Scatterer::unit(0.0, dys[i], 0.0));
        ctx_c.row(&scene, (0.0, dys[i], 0.0), i, j)
    })?);

    Ok(SweepResult { rows })
}

/// Glint map: a unit scatterer at the focus plus an equal-amplitude confuser
/// at `dz = 0` swept over horizontal offsets spanning ten resolution widths
/// and range offsets spanning half a wavelength.
pub fn run_glint_map(sc: &Scenario) -> Result<SweepResult, Error> {
    let res = horizontal_resolution(&sc.geometry, 2.0 * APERTURE_HALF_LENGTH_M);
    let lambda = sc.geometry.wavelength();
    let gx = sc
        .sweep
        .confuser_dx
        .unwrap_or(GridSpec::new(-10.0 * res, 10.0 * res, 41));
    let gy = sc
        .sweep
        .confuser_dy
        .unwrap_or(GridSpec::new(-lambda / 4.0, lambda / 4.0, 21));
    gx.validate("confuser_dx")?;
    gy.validate("confuser_dy")?;
    let ctx = SweepContext::for_scenario(sc, sc.solver, sc.solver.name().into());
    let (xs, ys) = (gx.values(), gy.values());
    let mut cells = Vec::with_capacity(xs.len() * ys.len());
    for i in 0..xs.len() {
        for j in 0..ys.len() {
            cells.push((i, j));
        }
    }
    let rows = run_cells(cells, |i, j| {
        let scene = Scene::new(vec![
            Scatterer::unit(0.0, 0.0, 0.0),
            Scatterer::unit(xs[i], ys[j], 0.0),
        ])?;
        // truth columns carry the confuser position; the estimate targets
        // the central scatterer at the origin, so dz_error is est_dz - 0
        let est = ctx.estimate(&scene, i, j)?;
        Ok(SweepRow {
            variant: ctx.variant.clone(),
            i,
            j,
            true_dx: xs[i],
            true_dy: ys[j],
            true_dz: 0.0,
            est_dx: est.solution.map(|s| s.dx),
            est_dy: est.solution.map(|s| s.dy),
            est_dz: est.solution.map(|s| s.dz),
            dz_error: est.solution.map(|s| s.dz),
            det_score: est.det_score,
            imag_residual: est.solution.map(|s| s.imag_residual),
            flags: est.flags.label(),
        })
    })?;
    Ok(SweepResult { rows })
}
