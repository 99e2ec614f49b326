use crate::error::{check_finite, Error, Result};
use crate::Vector;

/// Closed Euclidean ball.
#[derive(Debug, Clone)]
pub struct Ball {
    center: Vector,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        check_finite(&center, "ball center")?;
        if center.is_empty() {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn distance(&self, x: &Vector) -> f64 {
        ((x - &self.center).norm() - self.radius).max(0.0)
    }

    pub fn project(&self, x: &Vector) -> Vector {
        let d = x - &self.center;
        let n = d.norm();
        if n <= self.radius {
            x.clone()
        } else {
            &self.center + d * (self.radius / n)
        }
    }
}
