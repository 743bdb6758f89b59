//! Shared fixtures for the criterion benchmarks.

use wagner_core::{catalog, ConformalSurface, Point};

/// Catalog surfaces paired with a representative interior point.
pub fn fixtures() -> Vec<(ConformalSurface, Point)> {
    [
        ("sphere", Point::new(0.4, -0.3)),
        ("halfplane", Point::new(0.7, 2.0)),
        ("bump", Point::new(0.3, 0.1)),
    ]
    .into_iter()
    .map(|(name, p)| (catalog(name).expect("catalog surface"), p))
    .collect()
}
