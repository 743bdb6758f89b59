use std::fmt;

use serde::{Deserialize, Serialize};

/// A point of the base chart, in coordinates `(x¹, x²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
}

impl Point {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x1, x2]: [f64; 2]) -> Self {
        Self { x1, x2 }
    }
}

impl From<(f64, f64)> for Point {
    fn from((x1, x2): (f64, f64)) -> Self {
        Self { x1, x2 }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}
