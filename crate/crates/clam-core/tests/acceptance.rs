//! Acceptance suite: every release criterion at its pinned tolerance, one
//! pass/fail line per criterion (visible with `--nocapture`).
//!
//! The criteria pin the preset geometries at N = 20_000 samples and exercise
//! the full pipeline end to end: resolution anchors, noiseless and noisy
//! height recovery, the zero fixed point, degenerate and ambiguous apertures,
//! the glint/determinant association, the numerical property suites, and
//! byte-level reproducibility.

use num_complex::Complex64;

use clam_core::aperture::{exact_range, q_derivs, q_range, Aperture, Geometry};
use clam_core::estimator::{assemble, solve_full};
use clam_core::experiments::{
    horizontal_resolution, preset_cubic, preset_parabola, run_glint_map, run_height_sweep,
    run_range_ambiguity, run_xy_sweep, vertical_half_resolution, ScenarioConfig, SweepRow,
    APERTURE_HALF_LENGTH_M, DEFAULT_DET_THRESHOLD, DEFAULT_IMAG_THRESHOLD,
};
use clam_core::fieldsim::{simulate, simulate_with, NoiseModel, RangeModel, Scatterer, Scene};
use clam_core::windows::{BaseWindow, WindowKind, WindowSet};
use clam_core::FieldSamples;

const N: usize = 20_000;
const DET_THR: f64 = DEFAULT_DET_THRESHOLD;
const IMAG_THR: f64 = DEFAULT_IMAG_THRESHOLD;

fn check(criterion: &str, pass: bool, detail: String) {
    println!(
        "acceptance {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance {criterion} failed: {detail}");
}

fn windows_for(ap: &Aperture) -> WindowSet {
    WindowSet::build(&BaseWindow::new(WindowKind::Hann, ap.half_extent()), ap)
}

fn full_estimate(ap: &Aperture, g: &Geometry, ws: &WindowSet, scene: &Scene) -> (f64, f64, f64) {
    let field = simulate(scene, ap, g, 0.0, None).unwrap();
    let sys = assemble(&field, ap, g, ws).unwrap();
    let sol = solve_full(&sys, DET_THR, IMAG_THR)
        .solution
        .expect("solvable");
    (sol.dx, sol.dy, sol.dz)
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

#[test]
fn criterion_1_resolution_anchors() {
    let (_, g) = preset_cubic(64).unwrap();
    let hr = horizontal_resolution(&g, 2.0 * APERTURE_HALF_LENGTH_M);
    let vhr = vertical_half_resolution(&g);
    let pass = (hr - 0.30).abs() / 0.30 < 0.02 && (vhr - 16.7).abs() / 16.7 < 0.02;
    check(
        "1 resolution anchors",
        pass,
        format!("horizontal {hr:.4} m vs 0.30 m, vertical half {vhr:.3} m vs 16.7 m"),
    );
}

#[test]
fn criterion_2_height_recovery() {
    // noiseless: 21 heights across the +-16.7 m validity band
    let (ap, g) = preset_cubic(N).unwrap();
    let ws = windows_for(&ap);
    let mut max_err: f64 = 0.0;
    for i in 0..21 {
        let dz = -16.7 + 33.4 * i as f64 / 20.0;
        let scene = Scene::single(Scatterer::unit(0.0, 0.0, dz));
        let (_, _, est_dz) = full_estimate(&ap, &g, &ws, &scene);
        max_err = max_err.max((est_dz - dz).abs());
    }
    let noiseless_pass = max_err < 0.5;

    // 10% noise, dz = 0, dx/dy over a 5x5 grid spanning one pixel
    let cfg = ScenarioConfig::from_json(
        r#"{"aperture": {"preset": "cubic-fig1", "sample_count": 20000},
            "noise_fraction": 0.1, "seed": 20240817,
            "sweep": {"dx": {"min": -0.15, "max": 0.15, "count": 5},
                       "dy": {"min": -0.15, "max": 0.15, "count": 5},
                       "fixed_dz": 0.0}}"#,
    )
    .unwrap();
    let rows = run_xy_sweep(&cfg.resolve().unwrap()).unwrap().rows;
    let mut errs: Vec<f64> = rows
        .iter()
        .map(|r| r.dz_error.expect("noisy cells solvable").abs())
        .collect();
    errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p95 = errs[(errs.len() * 95 - 1) / 100];
    let noisy_pass = p95 < 2.0;

    check(
        "2 height recovery",
        noiseless_pass && noisy_pass,
        format!("noiseless max |dz err| {max_err:.2e} m (< 0.5), noisy p95 {p95:.3} m (< 2)"),
    );
}

#[test]
fn criterion_3_zero_fixed_point() {
    let (ap, g) = preset_cubic(N).unwrap();
    let ws = windows_for(&ap);
    let scene = Scene::single(Scatterer::unit(0.0, 0.0, 0.0));

    // the model's fixed point: on-model (parabolic-range) simulation
    let field = simulate_with(
        &scene,
        &ap,
        &g,
        0.0,
        None,
        RangeModel::Parabolic,
        NoiseModel::default(),
    )
    .unwrap();
    let sys = assemble(&field, &ap, &g, &ws).unwrap();
    let sol = solve_full(&sys, DET_THR, IMAG_THR).solution.unwrap();
    let on_model = sol.dx.abs().max(sol.dy.abs()).max(sol.dz.abs());

    // under the physical (exact-range) simulation the spherical-wavefront
    // residue is absorbed by the weakly observed dy; dx and dz stay exact
    let (dx, dy, dz) = full_estimate(&ap, &g, &ws, &scene);
    let exact_xz = dx.abs().max(dz.abs());

    let pass = on_model < 1e-6 && exact_xz < 1e-6;
    check(
        "3 zero fixed point",
        pass,
        format!(
            "on-model max offset {on_model:.2e} m, exact-sim |dx|,|dz| {exact_xz:.2e} m (dy soaks up {dy:.2e} m of model mismatch)"
        ),
    );
}

#[test]
fn criterion_4_degenerate_aperture_flags_singular() {
    let cfg = ScenarioConfig::from_json(
        r#"{"aperture": {"x_coeffs": [0.0, 27.75], "z_coeffs": [0.0],
                          "half_extent": 1.0, "sample_count": 2001},
            "geometry": {"frequency_hz": 9e9, "y0_m": 1000.0},
            "sweep": {"dz": {"min": -10.0, "max": 10.0, "count": 5}}}"#,
    )
    .unwrap();
    let rows = run_height_sweep(&cfg.resolve().unwrap()).unwrap().rows;
    let all_singular = rows
        .iter()
        .all(|r| r.flags.contains("SINGULAR") && r.est_dz.is_none());
    check(
        "4 degenerate aperture",
        all_singular,
        format!(
            "{} of {} cells flagged SINGULAR",
            rows.iter().filter(|r| r.flags.contains("SINGULAR")).count(),
            rows.len()
        ),
    );
}

#[test]
fn criterion_5_parabola_ambiguity_correlation() {
    let (_, g) = preset_cubic(64).unwrap();
    let lambda = g.wavelength();
    let cfg = ScenarioConfig::from_json(&format!(
        r#"{{"aperture": {{"preset": "cubic-fig1", "sample_count": 20000}},
             "sweep": {{"dy": {{"min": {}, "max": {}, "count": 21}}}}}}"#,
        -lambda / 2.0,
        lambda / 2.0
    ))
    .unwrap();
    let rows = run_range_ambiguity(&cfg.resolve().unwrap()).unwrap().rows;

    let series = |variant: &str| -> (Vec<f64>, Vec<f64>) {
        rows.iter()
            .filter(|r| r.variant == variant)
            .map(|r| (r.true_dy, r.dz_error.expect("solvable")))
            .unzip()
    };
    let (dys_p, errs_p) = series("parabola_reduced");
    let (dys_c, errs_c) = series("cubic_full");
    let corr_p = pearson(&dys_p, &errs_p).abs();
    let corr_c = pearson(&dys_c, &errs_c).abs();
    let amp_p = errs_p.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let amp_c = errs_c.iter().fold(0.0f64, |a, &b| a.max(b.abs()));

    // the reduced parabola trades range offsets against height: a strong,
    // systematic trend. The full cubic has no such trend; its residue is
    // numerically negligible, in which case a correlation of sub-micrometer
    // dust is meaningless and the no-correlation claim holds vacuously.
    let parabola_pass = corr_p > 0.9 && amp_p > 1e-3;
    let cubic_pass = corr_c < 0.2 || amp_c < 1e-4;
    check(
        "5 parabola ambiguity",
        parabola_pass && cubic_pass,
        format!(
            "parabola/reduced |corr| {corr_p:.3} amp {amp_p:.2e} m; cubic/full |corr| {corr_c:.3} amp {amp_c:.2e} m"
        ),
    );
}

#[test]
fn criterion_6_parabola_ill_conditioning() {
    let (ap_c, g) = preset_cubic(N).unwrap();
    let (ap_p, _) = preset_parabola(N).unwrap();
    let scene = Scene::single(Scatterer::unit(0.0, 0.0, 0.0));
    let score = |ap: &Aperture| -> f64 {
        let ws = windows_for(ap);
        let field = simulate(&scene, ap, &g, 0.0, None).unwrap();
        assemble(&field, ap, &g, &ws).unwrap().det_score()
    };
    let s_cubic = score(&ap_c);
    let s_parab = score(&ap_p);
    let pass = s_parab * 100.0 <= s_cubic;
    check(
        "6 ill-conditioning",
        pass,
        format!(
            "normalized det: cubic {s_cubic:.3e}, parabola {s_parab:.3e}, ratio {:.1e}",
            s_cubic / s_parab
        ),
    );
}

#[test]
fn criterion_7_glint_determinant_association() {
    let (_, g) = preset_cubic(64).unwrap();
    let res = horizontal_resolution(&g, 2.0 * APERTURE_HALF_LENGTH_M);
    let cfg = ScenarioConfig::from_json(
        r#"{"aperture": {"preset": "cubic-fig1", "sample_count": 20000}}"#,
    )
    .unwrap();
    // default grid: confuser dx over +-10 resolution widths (41), dy over
    // +-lambda/4 (21)
    let rows = run_glint_map(&cfg.resolve().unwrap()).unwrap().rows;
    let err = |r: &SweepRow| r.dz_error.expect("glint cells solvable").abs();

    let med_score = median(rows.iter().map(|r| r.det_score).collect());
    let high: Vec<f64> = rows
        .iter()
        .filter(|r| r.det_score >= med_score)
        .map(err)
        .collect();
    let low: Vec<f64> = rows
        .iter()
        .filter(|r| r.det_score < med_score)
        .map(err)
        .collect();
    let (med_high, med_low) = (median(high), median(low));
    let split_pass = med_low >= 5.0 * med_high;

    let far: Vec<f64> = rows
        .iter()
        .filter(|r| r.true_dx.abs() >= 10.0 * res - 1e-9)
        .map(err)
        .collect();
    let far_count = far.len();
    let med_far = median(far);
    let far_pass = med_far < 1.0;

    check(
        "7 glint determinant association",
        split_pass && far_pass,
        format!(
            "median |dz err|: high-det {med_high:.3} m vs low-det {med_low:.3} m (need 5x); {far_count} far cells median {med_far:.3} m (< 1)"
        ),
    );
}

#[test]
fn criterion_8a_window_convergence() {
    // w_i vs finite differences of w0 on the inner support, truncation
    // regime (finer grids hit the f64 floor of the 1/(s/2)^i divisors)
    let fd_error = |n: usize, order: usize| -> f64 {
        let (ap, _) = preset_cubic(n).unwrap();
        let ws = windows_for(&ap);
        let s = ap.spacing();
        let mut max_err: f64 = 0.0;
        for m in 2..ws.len() - 2 {
            if ap.tau_ext(m).abs() > 0.8 * ws.support {
                continue;
            }
            let fd = match order {
                1 => (ws.w0[m + 1] - ws.w0[m - 1]) / (2.0 * s),
                2 => (ws.w0[m + 1] - 2.0 * ws.w0[m] + ws.w0[m - 1]) / (s * s),
                _ => {
                    (ws.w0[m + 2] - 2.0 * ws.w0[m + 1] + 2.0 * ws.w0[m - 1] - ws.w0[m - 2])
                        / (2.0 * s * s * s)
                }
            };
            let w = match order {
                1 => ws.w1[m],
                2 => ws.w2[m],
                _ => ws.w3[m],
            };
            max_err = max_err.max((w - fd).abs());
        }
        max_err
    };
    let mut worst_rate = f64::INFINITY;
    let mut detail = String::new();
    for order in 1..=3 {
        let errs: Vec<f64> = [501, 1001, 2001]
            .iter()
            .map(|&n| fd_error(n, order))
            .collect();
        for w in errs.windows(2) {
            worst_rate = worst_rate.min((w[0] / w[1]).log2());
        }
        detail.push_str(&format!(
            "w{order}: {:.2e}->{:.2e}->{:.2e}; ",
            errs[0], errs[1], errs[2]
        ));
    }
    check(
        "8a window convergence",
        worst_rate >= 1.8,
        format!("observed order {worst_rate:.2} (need >= 1.8); {detail}"),
    );
}

#[test]
fn criterion_8b_integration_by_parts() {
    let (ap, g) = preset_cubic(N).unwrap();
    let ws = windows_for(&ap);
    let kernel = clam_core::kernel::build_kernel(&ap, &g);
    let hw = clam_core::kernel::build_windowed(&kernel, &ws).unwrap();
    let offs = (0.09, -0.05, 5.7);
    let scene = Scene::single(Scatterer::unit(offs.0, offs.1, offs.2));
    let f = simulate(&scene, &ap, &g, 0.0, None).unwrap();
    let k = g.k_eff();
    let s = ap.spacing();
    let zero = Complex64::new(0.0, 0.0);
    let mut lhs = [zero; 3];
    let mut rhs = [zero; 3];
    for i in 0..ap.sample_count() {
        let m = i + ws.pad();
        let tau = ap.tau(i);
        // analytic field derivatives from the exact range chain
        let xp = ap.x_path().eval(tau);
        let zp = ap.z_path().eval(tau);
        let x = g.x0 + xp.value + offs.0;
        let z = g.z0 + zp.value + offs.2;
        let r = exact_range(&ap, &g, offs, tau);
        let u = xp.d1 * x + zp.d1 * z;
        let u1 = xp.d2 * x + xp.d1 * xp.d1 + zp.d2 * z + zp.d1 * zp.d1;
        let u2 = xp.d3 * x + 3.0 * xp.d1 * xp.d2 + zp.d3 * z + 3.0 * zp.d1 * zp.d2;
        let r1 = u / r;
        let r2 = u1 / r - u * u / (r * r * r);
        let r3 = u2 / r - 3.0 * u * u1 / (r * r * r) + 3.0 * u * u * u / r.powi(5);
        let e = Complex64::new(0.0, -k * r).exp();
        let j1 = Complex64::new(0.0, -k * r1);
        let j2 = Complex64::new(0.0, -k * r2);
        let j3 = Complex64::new(0.0, -k * r3);
        let e1 = j1 * e;
        let e2 = (j1 * j1 + j2) * e;
        let e3 = (j1 * j1 * j1 + 3.0 * j1 * j2 + j3) * e;
        lhs[0] += hw.hw0[m] * e1;
        lhs[1] += hw.hw0[m] * e2;
        lhs[2] += hw.hw0[m] * e3;
        rhs[0] += hw.hw1[m] * f.values[i];
        rhs[1] += hw.hw2[m] * f.values[i];
        rhs[2] += hw.hw3[m] * f.values[i];
    }
    // alternating signs: -, +, -
    let signs = [-1.0, 1.0, -1.0];
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let l = s * lhs[i];
        let r = signs[i] * s * rhs[i];
        worst = worst.max((l - r).norm() / l.norm().max(r.norm()));
    }
    check(
        "8b integration by parts",
        worst < 1e-2,
        format!("worst relative identity error {worst:.2e} (< 1e-2), signs -,+,-"),
    );
}

#[test]
fn criterion_8c_q_derivative_chain() {
    let (ap, g) = preset_cubic(64).unwrap();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let tau = -0.98 + 1.96 * i as f64 / 40.0;
        let (q1, q2, q3) = q_derivs(&ap, &g, tau);
        let fd1 = (q_range(&ap, &g, tau + h) - q_range(&ap, &g, tau - h)) / (2.0 * h);
        let fd2 = (q_derivs(&ap, &g, tau + h).0 - q_derivs(&ap, &g, tau - h).0) / (2.0 * h);
        let fd3 = (q_derivs(&ap, &g, tau + h).1 - q_derivs(&ap, &g, tau - h).1) / (2.0 * h);
        worst = worst.max((q1 - fd1).abs() / q1.abs().max(1e-2));
        worst = worst.max((q2 - fd2).abs() / q2.abs().max(1e-2));
        worst = worst.max((q3 - fd3).abs() / q3.abs().max(1e-2));
    }
    check(
        "8c Q derivative chain",
        worst < 1e-6,
        format!("worst relative FD mismatch {worst:.2e} (< 1e-6)"),
    );
}

#[test]
fn criterion_8d_scale_invariance() {
    let (ap, g) = preset_cubic(N).unwrap();
    let ws = windows_for(&ap);
    let scene = Scene::single(Scatterer::unit(0.03, -0.06, 8.2));
    let field = simulate(&scene, &ap, &g, 0.0, None).unwrap();
    let base = solve_full(&assemble(&field, &ap, &g, &ws).unwrap(), DET_THR, IMAG_THR)
        .solution
        .unwrap();
    let c = 2.7 * Complex64::new(0.0, -0.9).exp();
    let scaled = FieldSamples {
        values: field.values.iter().map(|v| c * v).collect(),
        ..field
    };
    let est = solve_full(&assemble(&scaled, &ap, &g, &ws).unwrap(), DET_THR, IMAG_THR)
        .solution
        .unwrap();
    let drift = (est.dx - base.dx)
        .abs()
        .max((est.dy - base.dy).abs())
        .max((est.dz - base.dz).abs());
    check(
        "8d estimate scale invariance",
        drift < 1e-9,
        format!("max offset drift {drift:.2e} m under complex scaling (< 1e-9)"),
    );
}

#[test]
fn criterion_8e_superposition_and_determinism() {
    let (ap, g) = preset_cubic(4001).unwrap();
    let a = Scene::single(Scatterer::unit(0.1, 0.0, 3.0));
    let b = Scene::single(Scatterer::unit(-0.2, 0.01, -6.0));
    let ab = Scene::new(vec![
        Scatterer::unit(0.1, 0.0, 3.0),
        Scatterer::unit(-0.2, 0.01, -6.0),
    ])
    .unwrap();
    let fa = simulate(&a, &ap, &g, 0.0, None).unwrap();
    let fb = simulate(&b, &ap, &g, 0.0, None).unwrap();
    let fab = simulate(&ab, &ap, &g, 0.0, None).unwrap();
    let superposition_exact = (0..fa.len()).all(|i| fa.values[i] + fb.values[i] == fab.values[i]);

    let n1 = simulate(&ab, &ap, &g, 0.1, Some(99)).unwrap();
    let n2 = simulate(&ab, &ap, &g, 0.1, Some(99)).unwrap();
    let deterministic = n1.values == n2.values;

    check(
        "8e superposition and determinism",
        superposition_exact && deterministic,
        format!(
            "superposition exact: {superposition_exact}, seeded rerun identical: {deterministic}"
        ),
    );
}

#[test]
fn criterion_9_reproducibility() {
    let json = r#"{"aperture": {"preset": "cubic-fig1", "sample_count": 2001},
                    "noise_fraction": 0.1, "seed": 31337,
                    "sweep": {"dz": {"min": -16.7, "max": 16.7, "count": 9}}}"#;
    let run = || {
        let sc = ScenarioConfig::from_json(json).unwrap().resolve().unwrap();
        run_height_sweep(&sc).unwrap().to_csv()
    };
    let (a, b) = (run(), run());
    let identical = a == b;
    check(
        "9 reproducibility",
        identical,
        format!("rerun CSV byte-identical: {identical} ({} bytes)", a.len()),
    );
}
