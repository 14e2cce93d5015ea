use super::vector::{UnitVec, Vec3};
use crate::error::{Error, Result};

/// The slab `{t : lo <= t.normal <= hi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip {
    pub normal: UnitVec,
    pub lo: f64,
    pub hi: f64,
}

impl Strip {
    pub fn new(normal: UnitVec, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::invalid(format!("strip bounds out of order: [{lo}, {hi}]")));
        }
        Ok(Strip { normal, lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, y: Vec3) -> bool {
        let s = y.dot(*self.normal);
        self.lo <= s && s <= self.hi
    }

    /// Distance from `y` to the slab (zero inside).
    pub fn distance(&self, y: Vec3) -> f64 {
        let s = y.dot(*self.normal);
        (self.lo - s).max(s - self.hi).max(0.0)
    }

    /// The same slab described with the opposite normal.
    pub fn flipped(&self) -> Strip {
        Strip {
            normal: -self.normal,
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}
