//! Normalized screen rectangles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::Point;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("coordinate ({x}, {y}) is outside [0, 1]")]
    CoordinateOutOfRange { x: f64, y: f64 },
    #[error("degenerate or out-of-range bbox [{0}, {1}, {2}, {3}]")]
    InvalidBox(f64, f64, f64, f64),
}

/// `(x0, y0, x1, y1)` in normalized coordinates, serialized as a 4-array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeomError> {
        let ok = (0.0..=1.0).contains(&x0)
            && (0.0..=1.0).contains(&y0)
            && (0.0..=1.0).contains(&x1)
            && (0.0..=1.0).contains(&y1)
            && x0 < x1
            && y0 < y1;
        if ok {
            Ok(BBox { x0, y0, x1, y1 })
        } else {
            Err(GeomError::InvalidBox(x0, y0, x1, y1))
        }
    }

    pub fn center(&self) -> Point {
        Point::new((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    /// Closed-interval containment: edges and corners count as inside.
    pub fn contains(&self, p: Point) -> bool {
        self.x0 <= p.x && p.x <= self.x1 && self.y0 <= p.y && p.y <= self.y1
    }

    pub fn contains_strictly(&self, p: Point) -> bool {
        self.x0 < p.x && p.x < self.x1 && self.y0 < p.y && p.y < self.y1
    }
}

impl TryFrom<[f64; 4]> for BBox {
    type Error = GeomError;
    fn try_from(v: [f64; 4]) -> Result<Self, Self::Error> {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        [b.x0, b.y0, b.x1, b.y1]
    }
}

pub fn check_unit_point(p: Point) -> Result<(), GeomError> {
    if (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y) {
        Ok(())
    } else {
        Err(GeomError::CoordinateOutOfRange { x: p.x, y: p.y })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_containment() {
        let b = BBox::new(0.2, 0.2, 0.4, 0.6).unwrap();
        assert!(b.contains(b.center()));
        assert!(b.contains(Point::new(0.2, 0.6)));
        assert!(!b.contains_strictly(Point::new(0.2, 0.3)));
        assert!(!b.contains(Point::new(0.41, 0.3)));
    }

    #[test]
    fn rejects_bad_boxes() {
        assert!(BBox::new(0.5, 0.1, 0.5, 0.2).is_err());
        assert!(BBox::new(0.1, 0.1, 1.2, 0.2).is_err());
        assert!(serde_json::from_str::<BBox>("[0.3,0.1,0.2,0.2]").is_err());
        let b: BBox = serde_json::from_str("[0.1,0.1,0.2,0.2]").unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), "[0.1,0.1,0.2,0.2]");
    }
}
