//! Assembly and solution of the offset-estimation linear system.
//!
//! Multiplying the field-derivative equations by the windowed kernel and
//! integrating by parts turns three differential identities into a complex
//! 3x3 system `M (dx, dy, dz)^T = b` whose entries are quadrature sums over
//! the aperture. One integration by parts per derivative order fixes the
//! cross-term signs:
//!
//! ```text
//! row 1: [-jk I(hw0 x' E),  +I(hw1 E),  -jk I(hw0 z' E)] . dr = y0 I((-hw1 + jk hw0 Q') E)
//! row 2: [+jk I(hw1 x' E),  -I(hw2 E),  +jk I(hw1 z' E)] . dr = y0 I(( hw2 - jk hw1 Q') E)
//! row 3: [-jk I(hw2 x' E),  +I(hw3 E),  -jk I(hw2 z' E)] . dr = y0 I((-hw3 + jk hw2 Q') E)
//! ```
//!
//! where `I(f)` is the Riemann sum `s * sum f[n]`. Overall row signs are
//! irrelevant to the solution; the alternating pattern within each row is
//! what the random-scene recovery tests pin down.
//!
//! The system is solved complex and the offsets are the real parts; the
//! largest imaginary component is kept as a model-mismatch quality metric.
//! When the vertical path is symmetric a height offset and a small range
//! offset produce similar wavefronts, the full system is ill-conditioned, and
//! the 2x2 reduced form (assume `dy = 0`, drop the third-derivative row)
//! applies. Interference from a second scatterer corrupts the estimate
//! nonlinearly; a small determinant is the warning sign for both failure
//! modes.

use num_complex::Complex64;

use crate::aperture::{q_derivs, Aperture, Geometry};
use crate::error::Error;
use crate::fieldsim::FieldSamples;
use crate::kernel::{build_kernel, build_windowed};
use crate::windows::WindowSet;

/// Relative pivot magnitude below which elimination declares the system
/// singular.
const SINGULAR_PIVOT_REL: f64 = 1e-12;

/// The assembled system and its immediate diagnostics.
#[derive(Debug, Clone)]
pub struct ClamSystem {
    pub m: [[Complex64; 3]; 3],
    pub b: [Complex64; 3],
    pub det_m: Complex64,
    /// Magnitude of the largest neglected integration-by-parts boundary term
    /// (windowed kernel times field at the aperture edges). Zero up to
    /// rounding for the built-in windows, whose support is inset from the
    /// aperture edge.
    pub boundary_residual: f64,
}

impl ClamSystem {
    /// Scale-free conditioning score: `|det M|` over the product of row
    /// norms. 1 for orthogonal rows, 0 for a rank-deficient system.
    pub fn det_score(&self) -> f64 {
        let mut denom = 1.0;
        for row in &self.m {
            let norm = row.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            denom *= norm;
        }
        self.det_m.norm() / denom
    }

    /// Raw determinant magnitude.
    pub fn det_magnitude(&self) -> f64 {
        self.det_m.norm()
    }

    /// The reduced 2x2 system: rows 1-2, columns `dx`, `dz`.
    pub fn reduced(&self) -> ([[Complex64; 2]; 2], [Complex64; 2]) {
        (
            [[self.m[0][0], self.m[0][2]], [self.m[1][0], self.m[1][2]]],
            [self.b[0], self.b[1]],
        )
    }
}

/// Quality flags attached to an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EstimateFlags {
    pub singular: bool,
    pub low_determinant: bool,
    pub high_imag_residual: bool,
}

impl EstimateFlags {
    pub fn is_empty(&self) -> bool {
        !(self.singular || self.low_determinant || self.high_imag_residual)
    }

    /// Pipe-joined flag names, empty string when clean. The stable form used
    /// in sweep output.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.singular {
            parts.push("SINGULAR");
        }
        if self.low_determinant {
            parts.push("LOW_DETERMINANT");
        }
        if self.high_imag_residual {
            parts.push("HIGH_IMAG_RESIDUAL");
        }
        parts.join("|")
    }
}

/// Solved offsets plus the quality metrics of the solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    /// Largest |imaginary part| among the complex solution components.
    pub imag_residual: f64,
}

/// Result of solving a [`ClamSystem`]. When `flags.singular` is set the
/// solution is absent and must not be consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub solution: Option<Solution>,
    pub det_magnitude: f64,
    pub det_score: f64,
    pub flags: EstimateFlags,
    /// True for the reduced solve, where `dy` is reported as zero by
    /// assumption rather than measured.
    pub dy_assumed_zero: bool,
}

impl Estimate {
    pub fn dz(&self) -> Option<f64> {
        self.solution.map(|s| s.dz)
    }
}

/// Assemble `M` and `b` from field samples.
///
/// The quadrature runs over the extended grid with the field zero outside
/// the measured aperture; the built-in windows vanish there, so nothing is
/// truncated. Entries are linear in `E`: scaling the field by a complex
/// constant `c` scales `M`, `b`, `det M` by `c`, `c`, `c^3` and leaves the
/// solution unchanged.
pub fn assemble(
    field: &FieldSamples,
    ap: &Aperture,
    g: &Geometry,
    ws: &WindowSet,
) -> Result<ClamSystem, Error> {
    if field.len() != ap.sample_count() {
        return Err(Error::GridMismatch {
            left: field.len(),
            right: ap.sample_count(),
        });
    }
    if ws.len() != ap.extended_len() {
        return Err(Error::GridMismatch {
            left: ws.len(),
            right: ap.extended_len(),
        });
    }
    let kernel = build_kernel(ap, g);
    let hw = build_windowed(&kernel, ws)?;

    let k = g.k_eff();
    let jk = Complex64::new(0.0, k);
    let zero = Complex64::new(0.0, 0.0);
    let pad = ws.pad();
    let n = ap.sample_count();
    let s = ap.spacing();

    let mut m = [[zero; 3]; 3];
    let mut b = [zero; 3];
    for i in 0..n {
        let mm = i + pad;
        let tau = ap.tau(i);
        let x1 = ap.x_path().eval(tau).d1;
        let z1 = ap.z_path().eval(tau).d1;
        let (q1, _, _) = q_derivs(ap, g, tau);
        let e = field.values[i];
        let (hw0, hw1, hw2, hw3) = (hw.hw0[mm], hw.hw1[mm], hw.hw2[mm], hw.hw3[mm]);

        m[0][0] += -jk * hw0 * x1 * e;
        m[0][1] += hw1 * e;
        m[0][2] += -jk * hw0 * z1 * e;

        m[1][0] += jk * hw1 * x1 * e;
        m[1][1] += -hw2 * e;
        m[1][2] += jk * hw1 * z1 * e;

        m[2][0] += -jk * hw2 * x1 * e;
        m[2][1] += hw3 * e;
        m[2][2] += -jk * hw2 * z1 * e;

        b[0] += g.y0 * (-hw1 + jk * hw0 * q1) * e;
        b[1] += g.y0 * (hw2 - jk * hw1 * q1) * e;
        b[2] += g.y0 * (-hw3 + jk * hw2 * q1) * e;
    }
    for r in 0..3 {
        for entry in m[r].iter_mut() {
            *entry *= s;
        }
        b[r] *= s;
    }

    // largest windowed-kernel-times-field product at the aperture edges
    let mut boundary_residual: f64 = 0.0;
    for (first, last) in [(pad, pad + n - 1)] {
        for arr in [&hw.hw0, &hw.hw1, &hw.hw2] {
            boundary_residual = boundary_residual
                .max((arr[first] * field.values[0]).norm())
                .max((arr[last] * field.values[n - 1]).norm());
        }
    }

    let det_m = det3(&m);
    Ok(ClamSystem {
        m,
        b,
        det_m,
        boundary_residual,
    })
}

fn det3(m: &[[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Gaussian elimination with partial pivoting on a small complex system.
/// Pivot choice is deterministic: largest magnitude, lowest index on ties.
/// Returns `None` when a pivot underflows `SINGULAR_PIVOT_REL` times the
/// largest entry magnitude of the input matrix.
#[allow(clippy::needless_range_loop)]
fn solve_complex<const N: usize>(
    mut m: [[Complex64; N]; N],
    mut rhs: [Complex64; N],
) -> Option<[Complex64; N]> {
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .map(|e| e.norm())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return None;
    }
    let floor = SINGULAR_PIVOT_REL * scale;
    for col in 0..N {
        let mut piv = col;
        let mut best = m[col][col].norm();
        for row in col + 1..N {
            let mag = m[row][col].norm();
            if mag > best {
                best = mag;
                piv = row;
            }
        }
        if best < floor {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..N {
            let f = m[row][col] / m[col][col];
            for c in col..N {
                let sub = f * m[col][c];
                m[row][c] -= sub;
            }
            let sub = f * rhs[col];
            rhs[row] -= sub;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); N];
    for col in (0..N).rev() {
        let mut acc = rhs[col];
        for c in col + 1..N {
            acc -= m[col][c] * x[c];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}

fn flags_for(
    sys_score: f64,
    imag_residual: Option<f64>,
    singular: bool,
    det_threshold: f64,
    imag_threshold: f64,
) -> EstimateFlags {
    EstimateFlags {
        singular,
        low_determinant: !singular && sys_score < det_threshold,
        high_imag_residual: imag_residual.is_some_and(|r| r > imag_threshold),
    }
}

/// Solve the full 3x3 system. A singular system yields a flagged estimate
/// rather than an error so sweeps can keep going.
pub fn solve_full(sys: &ClamSystem, det_threshold: f64, imag_threshold: f64) -> Estimate {
    let score = sys.det_score();
    match solve_complex(sys.m, sys.b) {
        Some(x) => {
            let imag = x.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
            Estimate {
                solution: Some(Solution {
                    dx: x[0].re,
                    dy: x[1].re,
                    dz: x[2].re,
                    imag_residual: imag,
                }),
                det_magnitude: sys.det_magnitude(),
                det_score: score,
                flags: flags_for(score, Some(imag), false, det_threshold, imag_threshold),
                dy_assumed_zero: false,
            }
        }
        None => Estimate {
            solution: None,
            det_magnitude: sys.det_magnitude(),
            det_score: score,
            flags: flags_for(score, None, true, det_threshold, imag_threshold),
            dy_assumed_zero: false,
        },
    }
}

/// Solve the reduced 2x2 system `[[M00, M02], [M10, M12]] (dx, dz) = (b0, b1)`
/// under the assumption `dy = 0`. The reported `dy` is zero by construction
/// and [`Estimate::dy_assumed_zero`] is set.
pub fn solve_reduced(sys: &ClamSystem, det_threshold: f64, imag_threshold: f64) -> Estimate {
    let (m2, b2) = sys.reduced();
    let det = m2[0][0] * m2[1][1] - m2[0][1] * m2[1][0];
    let mut denom = 1.0;
    let mut score = 0.0;
    for row in &m2 {
        let norm = row.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        denom *= norm;
    }
    if denom > 0.0 {
        score = det.norm() / denom;
    }
    match solve_complex(m2, b2) {
        Some(x) => {
            let imag = x.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
            Estimate {
                solution: Some(Solution {
                    dx: x[0].re,
                    dy: 0.0,
                    dz: x[1].re,
                    imag_residual: imag,
                }),
                det_magnitude: det.norm(),
                det_score: score,
                flags: flags_for(score, Some(imag), false, det_threshold, imag_threshold),
                dy_assumed_zero: true,
            }
        }
        None => Estimate {
            solution: None,
            det_magnitude: det.norm(),
            det_score: score,
            flags: flags_for(score, None, true, det_threshold, imag_threshold),
            dy_assumed_zero: true,
        },
    }
}

/// The normalized determinant score, also available on [`ClamSystem`].
/// Small values indicate geometric ambiguity or interference corruption.
pub fn determinant_diagnostic(sys: &ClamSystem) -> f64 {
    sys.det_score()
}

/// Comparison variant: stack real and imaginary parts into a 6x3 real
/// least-squares problem and solve its normal equations. Exposes whether the
/// complex-solve-then-real-part route loses anything on noisy data.
#[allow(clippy::needless_range_loop)]
pub fn solve_stacked_real(sys: &ClamSystem, det_threshold: f64, imag_threshold: f64) -> Estimate {
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for r in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += sys.m[r][i].re * sys.m[r][j].re + sys.m[r][i].im * sys.m[r][j].im;
            }
            atb[i] += sys.m[r][i].re * sys.b[r].re + sys.m[r][i].im * sys.b[r].im;
        }
    }
    let mc: [[Complex64; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| Complex64::new(ata[i][j], 0.0)));
    let bc: [Complex64; 3] = std::array::from_fn(|i| Complex64::new(atb[i], 0.0));
    let score = sys.det_score();
    match solve_complex(mc, bc) {
        Some(x) => Estimate {
            solution: Some(Solution {
                dx: x[0].re,
                dy: x[1].re,
                dz: x[2].re,
                imag_residual: 0.0,
            }),
            det_magnitude: sys.det_magnitude(),
            det_score: score,
            flags: flags_for(score, Some(0.0), false, det_threshold, imag_threshold),
            dy_assumed_zero: false,
        },
        None => Estimate {
            solution: None,
            det_magnitude: sys.det_magnitude(),
            det_score: score,
            flags: flags_for(score, None, true, det_threshold, imag_threshold),
            dy_assumed_zero: false,
        },
    }
}
