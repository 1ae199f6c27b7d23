//! The single-frequency backprojection kernel for the hypothesized focus
//! point, its analytic slow-time derivatives, and the window-weighted
//! combinations used by the estimator.
//!
//! The kernel is the matched phase function `h = exp(+j k_eff Q_tau)`: its
//! phase is conjugate to the simulated field's `exp(-j k_eff R)`, so `h * E`
//! is phase-flat for a scatterer at the focus and the windowed integrals are
//! coherent backprojection beams. (The equation system is algebraically exact
//! for any test function; the matched choice is what gives the beams their
//! directional interference rejection and noise averaging.)
//!
//! The windowed combinations follow the Leibniz pattern with `w_i` standing
//! in for window derivatives:
//!
//! ```text
//! hw0 = w0 h
//! hw1 = w1 h + w0 h'
//! hw2 = w2 h + 2 w1 h' + w0 h''
//! hw3 = w3 h + 3 w2 h' + 3 w1 h'' + w0 h'''
//! ```

use num_complex::Complex64;

use crate::aperture::{q_derivs, q_range, Aperture, Geometry};
use crate::error::Error;
use crate::windows::WindowSet;

/// `h` and its first three analytic derivatives on the extended grid.
#[derive(Debug, Clone)]
pub struct KernelSamples {
    pub h: Vec<Complex64>,
    pub h1: Vec<Complex64>,
    pub h2: Vec<Complex64>,
    pub h3: Vec<Complex64>,
}

/// Build the kernel for an aperture/geometry pair.
///
/// `h = exp(j k Q)`, `h' = jkQ' h`, `h'' = ((jkQ')^2 + jkQ'') h`,
/// `h''' = ((jkQ')^3 + 3 (jk)^2 Q'Q'' + jkQ''') h`.
pub fn build_kernel(ap: &Aperture, g: &Geometry) -> KernelSamples {
    let k = g.k_eff();
    let len = ap.extended_len();
    let mut h = Vec::with_capacity(len);
    let mut h1 = Vec::with_capacity(len);
    let mut h2 = Vec::with_capacity(len);
    let mut h3 = Vec::with_capacity(len);
    for m in 0..len {
        let tau = ap.tau_ext(m);
        let (q1, q2, q3) = q_derivs(ap, g, tau);
        let hh = Complex64::new(0.0, k * q_range(ap, g, tau)).exp();
        let jkq1 = Complex64::new(0.0, k * q1);
        let jkq2 = Complex64::new(0.0, k * q2);
        let jkq3 = Complex64::new(0.0, k * q3);
        h.push(hh);
        h1.push(jkq1 * hh);
        h2.push((jkq1 * jkq1 + jkq2) * hh);
        h3.push((jkq1 * jkq1 * jkq1 + 3.0 * jkq1 * jkq2 + jkq3) * hh);
    }
    KernelSamples { h, h1, h2, h3 }
}

impl KernelSamples {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// Window-weighted kernel derivative stand-ins on the extended grid.
#[derive(Debug, Clone)]
pub struct WindowedKernel {
    pub hw0: Vec<Complex64>,
    pub hw1: Vec<Complex64>,
    pub hw2: Vec<Complex64>,
    pub hw3: Vec<Complex64>,
}

/// Combine kernel samples with a window set, elementwise on the extended
/// grid.
pub fn build_windowed(k: &KernelSamples, ws: &WindowSet) -> Result<WindowedKernel, Error> {
    if k.len() != ws.len() {
        return Err(Error::GridMismatch {
            left: k.len(),
            right: ws.len(),
        });
    }
    let len = k.len();
    let mut hw0 = Vec::with_capacity(len);
    let mut hw1 = Vec::with_capacity(len);
    let mut hw2 = Vec::with_capacity(len);
    let mut hw3 = Vec::with_capacity(len);
    for m in 0..len {
        let (h, h1, h2, h3) = (k.h[m], k.h1[m], k.h2[m], k.h3[m]);
        let (w0, w1, w2, w3) = (ws.w0[m], ws.w1[m], ws.w2[m], ws.w3[m]);
        hw0.push(w0 * h);
        hw1.push(w1 * h + w0 * h1);
        hw2.push(w2 * h + 2.0 * w1 * h1 + w0 * h2);
        hw3.push(w3 * h + 3.0 * w2 * h1 + 3.0 * w1 * h2 + w0 * h3);
    }
    Ok(WindowedKernel { hw0, hw1, hw2, hw3 })
}

impl WindowedKernel {
    pub fn len(&self) -> usize {
        self.hw0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hw0.is_empty()
    }
}
