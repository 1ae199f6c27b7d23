//! Derivative-approximation windows.
//!
//! Direct measurement of field derivatives along the aperture is impractical;
//! instead the estimator integrates against windowed kernels whose derivatives
//! are approximated by convolving a base window with short delta combs. With
//! taps at `-3s/2, -s/2, +s/2, +3s/2` the comb weights are the binomial
//! products of `(1,1)` and `(1,-1)`:
//!
//! ```text
//! w0: (1, 3, 3, 1)            ~ smoothed window
//! w1: (1, 1, -1, -1)/(s/2)    ~ w0'
//! w2: (1, -1, -1, 1)/(s/2)^2  ~ w0''
//! w3: (1, -3, 3, -1)/(s/2)^3  ~ w0'''
//! ```
//!
//! Each sum pair `(1,1)` doubles the window and each difference pair divided
//! by the tap spacing differentiates it, so the divisor is the tap
//! half-spacing `s/2` per derivative order; this keeps `w_i ~ w0^(i)` with
//! `O(s^2)` error.
//!
//! The comb taps shift the support outward by `3s/2`, and a hann base has a
//! second-derivative jump at its support edge whose comb representation is a
//! narrow spike. Both must stay inside the measured aperture or the
//! integration-by-parts identities pick up un-measurable boundary terms, so
//! the sampled set insets the effective base support to `T - 1.5 s`. The
//! arrays live on a grid extended by [`GRID_PAD`] samples per side and are
//! identically zero on the pad.

use crate::aperture::{Aperture, GRID_PAD};

/// Base window shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    /// `cos^2(pi tau / 2T)` on `[-T, T]`.
    Hann,
    /// 1 on `[-T, T]`.
    Rectangular,
    /// `cos^4(pi tau / 2T)`; first and second derivatives vanish at the
    /// support edge, removing the third-order boundary spike entirely.
    HannSquared,
}

impl WindowKind {
    /// Config string form: "hann" | "rect" | "hann2".
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hann" => Some(Self::Hann),
            "rect" => Some(Self::Rectangular),
            "hann2" => Some(Self::HannSquared),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Hann => "hann",
            Self::Rectangular => "rect",
            Self::HannSquared => "hann2",
        }
    }
}

/// A base window: shape plus support half-extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseWindow {
    pub kind: WindowKind,
    pub half_extent: f64,
}

impl BaseWindow {
    pub fn new(kind: WindowKind, half_extent: f64) -> Self {
        assert!(half_extent > 0.0);
        Self { kind, half_extent }
    }

    pub fn hann(half_extent: f64) -> Self {
        Self::new(WindowKind::Hann, half_extent)
    }

    /// Evaluate the window at `tau`; zero outside `[-T, T]`.
    pub fn eval(&self, tau: f64) -> f64 {
        base_eval(self.kind, tau, self.half_extent)
    }
}

/// Window value at `tau` for support half-extent `t`.
pub fn base_eval(kind: WindowKind, tau: f64, t: f64) -> f64 {
    if tau.abs() > t {
        return 0.0;
    }
    match kind {
        WindowKind::Rectangular => 1.0,
        WindowKind::Hann => {
            let c = (std::f64::consts::PI * tau / (2.0 * t)).cos();
            c * c
        }
        WindowKind::HannSquared => {
            let c = (std::f64::consts::PI * tau / (2.0 * t)).cos();
            c * c * c * c
        }
    }
}

const COMB_WEIGHTS: [[f64; 4]; 4] = [
    [1.0, 3.0, 3.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
    [1.0, -3.0, 3.0, -1.0],
];

/// Tap positions in units of the sample spacing.
const TAP_SHIFTS: [f64; 4] = [-1.5, -0.5, 0.5, 1.5];

/// The four sampled derivative-approximation windows on the extended grid.
#[derive(Debug, Clone)]
pub struct WindowSet {
    pub w0: Vec<f64>,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub w3: Vec<f64>,
    /// Sample spacing used for the tap shifts.
    pub shift: f64,
    /// Effective base-window support half-extent after the inset.
    pub support: f64,
}

impl WindowSet {
    /// Sample the comb windows for `base` on the aperture grid. The effective
    /// support is `min(base.half_extent, T - 1.5 s)`; half-sample tap shifts
    /// are evaluated analytically, not interpolated.
    pub fn build(base: &BaseWindow, ap: &Aperture) -> Self {
        let s = ap.spacing();
        let support = base.half_extent.min(ap.half_extent() - 1.5 * s);
        let half = s / 2.0;
        let denoms = [1.0, half, half * half, half * half * half];
        let len = ap.extended_len();
        let mut arrays = [
            vec![0.0; len],
            vec![0.0; len],
            vec![0.0; len],
            vec![0.0; len],
        ];
        for m in 0..len {
            let tau = ap.tau_ext(m);
            let taps = [
                base_eval(base.kind, tau - TAP_SHIFTS[0] * s, support),
                base_eval(base.kind, tau - TAP_SHIFTS[1] * s, support),
                base_eval(base.kind, tau - TAP_SHIFTS[2] * s, support),
                base_eval(base.kind, tau - TAP_SHIFTS[3] * s, support),
            ];
            for (i, arr) in arrays.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..4 {
                    acc += COMB_WEIGHTS[i][j] * taps[j];
                }
                arr[m] = acc / denoms[i];
            }
        }
        let [w0, w1, w2, w3] = arrays;
        Self {
            w0,
            w1,
            w2,
            w3,
            shift: s,
            support,
        }
    }

    pub fn len(&self) -> usize {
        self.w0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w0.is_empty()
    }

    /// Offset of the first base-grid sample within the arrays.
    pub fn pad(&self) -> usize {
        GRID_PAD
    }
}
