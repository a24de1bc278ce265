//! Shared fixtures for the kernel benchmarks.

use tresca_core::config::DynamicsConfig;
use tresca_core::dynamics::EnvelopeOptions;
use tresca_core::{DynamicsParams, FieldParams, GapGeometry, Point, QuadratureSpec, TestField};

/// Default geometry at gap height `h`.
pub fn geometry(h: f64) -> GapGeometry {
    GapGeometry::default().with_h(h)
}

pub fn field(h: f64) -> TestField {
    TestField::new(FieldParams::default(), geometry(h)).expect("default field is valid")
}

/// Points spread over the gap core, the blend strip and the outer fluid.
pub fn probe_points(h: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let s = (i as f64 + 0.5) / n as f64;
            let x1 = -0.9 + 1.8 * s;
            let top = h + tresca_core::gamma(x1.clamp(-0.99, 0.99)).unwrap_or(1.0);
            Point::new(x1, (0.3 + 0.4 * s) * top.min(2.0))
        })
        .collect()
}

pub fn quadrature() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// The default contact case from the run configuration.
pub fn contact_case() -> (DynamicsParams, EnvelopeOptions) {
    let cfg = DynamicsConfig::default();
    (cfg.params, cfg.options())
}
