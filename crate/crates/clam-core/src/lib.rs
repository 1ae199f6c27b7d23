//! Curvilinear-aperture monopulse (CLAM) toolkit.
//!
//! A radar platform moving along a curved path observes a single-frequency
//! scalar field scattered by points near a hypothesized focus position. A
//! linear path carries no information about scatterer height; vertical
//! curvature breaks that symmetry. This crate simulates such collections and
//! recovers the scatterer's 3D offset from the focus point — in particular
//! its height — by a non-iterative monopulse-style computation:
//!
//! 1. [`aperture`] — polynomial path geometry and the parabolic range
//!    approximation `Q` with analytic derivatives,
//! 2. [`fieldsim`] — point-scatterer field samples along the aperture,
//!    with optional complex noise,
//! 3. [`windows`] — a base window and its four delta-comb derivative
//!    approximations `w0..w3`,
//! 4. [`kernel`] — the matched backprojection function `h` and the windowed
//!    kernel derivatives,
//! 5. [`estimator`] — assembly of the complex 3x3 linear system `M dr = b`,
//!    its 2x2 reduced form, and determinant-based corruption diagnostics,
//! 6. [`experiments`] — named scene presets, parameter sweep runners, and
//!    CSV/JSON plot-data output.
//!
//! # Example
//!
//! Simulate a scatterer 5 m above the focus point of the cubic preset and
//! recover its offsets:
//!
//! ```
//! use clam_core::estimator::{assemble, solve_full};
//! use clam_core::experiments::preset_cubic;
//! use clam_core::fieldsim::{simulate, Scatterer, Scene};
//! use clam_core::windows::{BaseWindow, WindowKind, WindowSet};
//!
//! let (aperture, geometry) = preset_cubic(4001).unwrap();
//! let windows = WindowSet::build(
//!     &BaseWindow::new(WindowKind::Hann, aperture.half_extent()),
//!     &aperture,
//! );
//!
//! let scene = Scene::single(Scatterer::unit(0.0, 0.0, 5.0));
//! let field = simulate(&scene, &aperture, &geometry, 0.0, None).unwrap();
//!
//! let system = assemble(&field, &aperture, &geometry, &windows).unwrap();
//! let estimate = solve_full(&system, 1e-3, 1.0);
//! let solution = estimate.solution.unwrap();
//! assert!((solution.dz - 5.0).abs() < 0.1);
//! ```

pub mod aperture;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod fieldsim;
pub mod kernel;
pub mod windows;

pub use aperture::{Aperture, Geometry, PolynomialPath};
pub use error::Error;
pub use estimator::{
    assemble, determinant_diagnostic, solve_full, solve_reduced, ClamSystem, Estimate,
    EstimateFlags,
};
pub use experiments::{ScenarioConfig, SweepResult, SweepRow};
pub use fieldsim::{FieldSamples, Scatterer, Scene};
pub use kernel::{KernelSamples, WindowedKernel};
pub use windows::{BaseWindow, WindowKind, WindowSet};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
