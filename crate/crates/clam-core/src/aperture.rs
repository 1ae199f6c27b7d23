//! Aperture geometry: polynomial collection paths and the focus-point range
//! function with analytic derivatives.
//!
//! The platform position is parameterized by slow time `tau` on `[-T, T]`:
//! `x = x0 + x_tau + dx`, `y = y0 + dy`, `z = z0 + z_tau + dz`, where
//! `(dx, dy, dz)` are the unknown scatterer offsets. `tau` is dimensionless;
//! all spatial scale lives in the polynomial coefficients (meters).
//!
//! `Q_tau` is the range to the focus point (all offsets zero) under the
//! parabolic approximation `R ≈ y + (x² + z²) / (2y)`, which is the model the
//! estimator works in. The simulator uses the exact Euclidean range unless
//! explicitly switched.

use crate::error::Error;
use crate::SPEED_OF_LIGHT;

/// A real polynomial in `tau`, coefficients in ascending order (meters per
/// power of `tau`). Evaluation returns the value and first three derivatives
/// exactly; a degree-0 path has identically zero derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPath {
    coeffs: Vec<f64>,
}

impl PolynomialPath {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "polynomial needs at least one coefficient"
        );
        Self { coeffs }
    }

    /// Constant path.
    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given roots, then scaled by `scale`.
    pub fn from_roots(roots: &[f64], scale: f64) -> Self {
        let mut coeffs = vec![1.0];
        for &r in roots {
            // multiply by (tau - r)
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i] -= r * c;
                next[i + 1] += c;
            }
            coeffs = next;
        }
        for c in coeffs.iter_mut() {
            *c *= scale;
        }
        Self::new(coeffs)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value and first three derivatives at `tau`, by the extended Horner
    /// recurrence (exact, no finite differencing).
    pub fn eval(&self, tau: f64) -> PathPoint {
        let (mut p, mut p1, mut p2, mut p3) = (0.0, 0.0, 0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            p3 = p3 * tau + p2;
            p2 = p2 * tau + p1;
            p1 = p1 * tau + p;
            p = p * tau + c;
        }
        PathPoint {
            value: p,
            d1: p1,
            d2: 2.0 * p2,
            d3: 6.0 * p3,
        }
    }

    /// Largest |value| over `[-t, t]`, from the critical points of the
    /// derivative plus the endpoints. Used to scale preset paths to a target
    /// height.
    pub fn max_abs_over(&self, t: f64) -> f64 {
        let mut best = self.eval(-t).value.abs().max(self.eval(t).value.abs());
        // derivative coefficients
        let d: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        for r in real_roots(&d) {
            if r.abs() <= t {
                best = best.max(self.eval(r).value.abs());
            }
        }
        best
    }
}

/// Path value and derivatives at one slow-time instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Real roots of a polynomial with ascending coefficients, degree <= 2 solved
/// in closed form, higher degrees by bisection on a sign-change scan.
fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |i| i);
    match n {
        0 => Vec::new(),
        1 => vec![-coeffs[0] / coeffs[1]],
        2 => {
            let (c, b, a) = (coeffs[0], coeffs[1], coeffs[2]);
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                Vec::new()
            } else {
                let sq = disc.sqrt();
                vec![(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]
            }
        }
        _ => {
            // scan a generous interval for sign changes, then bisect
            let eval = |x: f64| -> f64 { coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c) };
            let bound = 1.0
                + coeffs[..n]
                    .iter()
                    .map(|c| (c / coeffs[n]).abs())
                    .fold(0.0, f64::max);
            let steps = 4096;
            let mut roots = Vec::new();
            let mut prev_x = -bound;
            let mut prev_f = eval(prev_x);
            for i in 1..=steps {
                let x = -bound + 2.0 * bound * i as f64 / steps as f64;
                let f = eval(x);
                if prev_f == 0.0 {
                    roots.push(prev_x);
                } else if prev_f * f < 0.0 {
                    let (mut lo, mut hi) = (prev_x, x);
                    let (mut flo, _) = (prev_f, f);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        let fm = eval(mid);
                        if flo * fm <= 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                            flo = fm;
                        }
                    }
                    roots.push(0.5 * (lo + hi));
                }
                prev_x = x;
                prev_f = f;
            }
            roots
        }
    }
}

/// A curvilinear collection path: horizontal and vertical polynomial
/// components over `tau` in `[-T, T]`, sampled uniformly at `N` points.
#[derive(Debug, Clone)]
pub struct Aperture {
    x_path: PolynomialPath,
    z_path: PolynomialPath,
    half_extent: f64,
    sample_count: usize,
}

/// Number of samples the grid is extended by on each side so the shifted
/// delta-comb windows have room; the window construction keeps their support
/// inside the measured aperture, so the pad samples always carry zeros.
pub const GRID_PAD: usize = 2;

impl Aperture {
    /// `half_extent` is `T` (tau units); samples are uniform on `[-T, T]`
    /// with spacing `s = 2T/(N-1)`. `N >= 8` so the 4-tap derivative windows
    /// are meaningful.
    pub fn new(
        x_path: PolynomialPath,
        z_path: PolynomialPath,
        half_extent: f64,
        sample_count: usize,
    ) -> Result<Self, Error> {
        if !half_extent.is_finite() || half_extent <= 0.0 {
            return Err(Error::InvalidAperture(format!(
                "half extent must be positive and finite (got {half_extent})"
            )));
        }
        if sample_count < 8 {
            return Err(Error::InvalidAperture(format!(
                "sample count must be >= 8 (got {sample_count})"
            )));
        }
        Ok(Self {
            x_path,
            z_path,
            half_extent,
            sample_count,
        })
    }

    pub fn x_path(&self) -> &PolynomialPath {
        &self.x_path
    }

    pub fn z_path(&self) -> &PolynomialPath {
        &self.z_path
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Sample spacing `s = 2T/(N-1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / (self.sample_count as f64 - 1.0)
    }

    /// Slow time of base-grid sample `n` (0-based, on `[-T, T]`).
    pub fn tau(&self, n: usize) -> f64 {
        -self.half_extent + n as f64 * self.spacing()
    }

    /// Length of the extended grid (`N + 2*GRID_PAD`).
    pub fn extended_len(&self) -> usize {
        self.sample_count + 2 * GRID_PAD
    }

    /// Slow time of extended-grid sample `m`; `m = GRID_PAD` is the first
    /// base sample.
    pub fn tau_ext(&self, m: usize) -> f64 {
        -self.half_extent + (m as f64 - GRID_PAD as f64) * self.spacing()
    }

    /// Smallest `N` keeping the kernel phase change under a quarter cycle per
    /// sample: `max|Q'| * k_eff * s < pi/2`. A floor, not a recommendation;
    /// the presets sample far more densely.
    pub fn min_sample_count(&self, geometry: &Geometry) -> usize {
        let t = self.half_extent;
        let mut max_q1: f64 = 0.0;
        for i in 0..=512 {
            let tau = -t + 2.0 * t * i as f64 / 512.0;
            max_q1 = max_q1.max(q_derivs_at(self, geometry, tau).0.abs());
        }
        let max_s = std::f64::consts::FRAC_PI_2 / (max_q1 * geometry.k_eff()).max(1e-300);
        ((2.0 * t / max_s).ceil() as usize + 1).max(8)
    }
}

/// Focus-point geometry: known offsets of the hypothesized scatterer
/// position, the radar frequency, and the round-trip factor.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
    pub frequency: f64,
    /// 1 if the transmitter is stationary, 2 if it moves with the receiver.
    pub p: u8,
}

impl Geometry {
    /// `y0 > 0`: the scene is off to one side of the aperture and the
    /// parabolic approximation divides by `y0`.
    pub fn new(x0: f64, y0: f64, z0: f64, frequency: f64, p: u8) -> Result<Self, Error> {
        if !y0.is_finite() || y0 <= 0.0 {
            return Err(Error::InvalidGeometry(format!("y0 must be > 0 (got {y0})")));
        }
        if !frequency.is_finite() || frequency <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "frequency must be > 0 (got {frequency})"
            )));
        }
        if p != 1 && p != 2 {
            return Err(Error::InvalidGeometry(format!(
                "p must be 1 or 2 (got {p})"
            )));
        }
        Ok(Self {
            x0,
            y0,
            z0,
            frequency,
            p,
        })
    }

    /// Effective wavenumber `p * 2 pi f / c` (rad/m). The round-trip factor
    /// is baked in so simulator and estimator always share one convention.
    pub fn k_eff(&self) -> f64 {
        self.p as f64 * 2.0 * std::f64::consts::PI * self.frequency / SPEED_OF_LIGHT
    }

    /// Wavelength `c / f` (m).
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency
    }
}

/// Parabolic-approximation range to the focus point (all offsets zero):
/// `Q = y0 + ((x0 + x_tau)^2 + (z0 + z_tau)^2) / (2 y0)`.
pub fn q_range(ap: &Aperture, g: &Geometry, tau: f64) -> f64 {
    let x = g.x0 + ap.x_path.eval(tau).value;
    let z = g.z0 + ap.z_path.eval(tau).value;
    g.y0 + (x * x + z * z) / (2.0 * g.y0)
}

/// First three slow-time derivatives of `Q`.
///
/// `y0 Q' = x'(x0 + x) + z'(z0 + z)`, differentiated analytically twice more.
pub fn q_derivs(ap: &Aperture, g: &Geometry, tau: f64) -> (f64, f64, f64) {
    q_derivs_at(ap, g, tau)
}

fn q_derivs_at(ap: &Aperture, g: &Geometry, tau: f64) -> (f64, f64, f64) {
    let xp = ap.x_path.eval(tau);
    let zp = ap.z_path.eval(tau);
    let x = g.x0 + xp.value;
    let z = g.z0 + zp.value;
    let q1 = (xp.d1 * x + zp.d1 * z) / g.y0;
    let q2 = (xp.d2 * x + xp.d1 * xp.d1 + zp.d2 * z + zp.d1 * zp.d1) / g.y0;
    let q3 = (xp.d3 * x + 3.0 * xp.d1 * xp.d2 + zp.d3 * z + 3.0 * zp.d1 * zp.d2) / g.y0;
    (q1, q2, q3)
}

/// Exact Euclidean range from the platform at `tau` to a scatterer offset by
/// `(dx, dy, dz)` from the focus point. The simulator's truth model.
pub fn exact_range(ap: &Aperture, g: &Geometry, offsets: (f64, f64, f64), tau: f64) -> f64 {
    let (dx, dy, dz) = offsets;
    let x = g.x0 + ap.x_path.eval(tau).value + dx;
    let y = g.y0 + dy;
    let z = g.z0 + ap.z_path.eval(tau).value + dz;
    (x * x + y * y + z * z).sqrt()
}

/// Parabolic-approximation range with nonzero offsets:
/// `(y0+dy) + ((x0+x+dx)^2 + (z0+z+dz)^2) / (2(y0+dy))`.
///
/// The simulator can be switched to this model so that simulator and
/// estimator share identical physics (oracle-equality debugging).
pub fn parabolic_range(ap: &Aperture, g: &Geometry, offsets: (f64, f64, f64), tau: f64) -> f64 {
    let (dx, dy, dz) = offsets;
    let x = g.x0 + ap.x_path.eval(tau).value + dx;
    let y = g.y0 + dy;
    let z = g.z0 + ap.z_path.eval(tau).value + dz;
    y + (x * x + z * z) / (2.0 * y)
}
