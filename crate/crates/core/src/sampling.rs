//! Seeded sampling of chart points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::surface::ConformalSurface;
use crate::{Error, Point, Result};

const MAX_ATTEMPTS: usize = 10_000;

/// Deterministic generator shared by every seeded routine in the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a point uniformly from the surface's sampling region, redrawing
/// until the chart guard holds.
pub fn draw_point<R: Rng>(surface: &ConformalSurface, rng: &mut R) -> Result<Point> {
    let region = surface.region();
    for _ in 0..MAX_ATTEMPTS {
        let x = Point::new(
            rng.gen_range(region.x1[0]..=region.x1[1]),
            rng.gen_range(region.x2[0]..=region.x2[1]),
        );
        if surface.contains(x) {
            return Ok(x);
        }
    }
    Err(Error::InvalidArgument(format!(
        "no point of the sampling region satisfies the guard of `{}`",
        surface.name()
    )))
}

/// `count` guarded points from a fixed seed.
pub fn sample_points(surface: &ConformalSurface, count: usize, seed: u64) -> Result<Vec<Point>> {
    let mut rng = rng(seed);
    (0..count).map(|_| draw_point(surface, &mut rng)).collect()
}
