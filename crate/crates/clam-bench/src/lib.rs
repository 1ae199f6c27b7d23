//! Shared setup for the pipeline benchmarks.

use clam_core::experiments::preset_cubic;
use clam_core::fieldsim::{simulate, FieldSamples, Scatterer, Scene};
use clam_core::windows::{BaseWindow, WindowKind, WindowSet};
use clam_core::{Aperture, Geometry};

/// The standard benchmark scenario: cubic preset with one off-focus
/// scatterer.
pub struct BenchSetup {
    pub aperture: Aperture,
    pub geometry: Geometry,
    pub windows: WindowSet,
    pub scene: Scene,
    pub field: FieldSamples,
}

pub fn setup(sample_count: usize) -> BenchSetup {
    let (aperture, geometry) = preset_cubic(sample_count).expect("preset");
    let windows = WindowSet::build(
        &BaseWindow::new(WindowKind::Hann, aperture.half_extent()),
        &aperture,
    );
    let scene = Scene::single(Scatterer::unit(0.05, -0.02, 7.0));
    let field = simulate(&scene, &aperture, &geometry, 0.0, None).expect("simulate");
    BenchSetup {
        aperture,
        geometry,
        windows,
        scene,
        field,
    }
}
