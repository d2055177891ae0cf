//! Log-spaced and geometric sample grids.

use serde::{Deserialize, Serialize};

/// Log-spaced grid on [t_min, t_max] with a fixed number of points per decade.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct LogGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: usize,
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, points_per_decade: usize) -> Self {
        assert!(t_min > 0.0 && t_max > t_min && points_per_decade >= 1);
        LogGrid {
            t_min,
            t_max,
            points_per_decade,
        }
    }

    pub fn decades(&self) -> f64 {
        (self.t_max / self.t_min).log10()
    }

    /// Grid points, strictly increasing, endpoints included.
    pub fn points(&self) -> Vec<f64> {
        let n = (self.decades() * self.points_per_decade as f64).ceil() as usize;
        let l0 = self.t_min.log10();
        let l1 = self.t_max.log10();
        (0..=n)
            .map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / n as f64))
            .collect()
    }
}

/// Geometric grid start * ratio^k, k = 0..count.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct GeometricGrid {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
}

impl GeometricGrid {
    pub fn new(start: f64, ratio: f64, count: usize) -> Self {
        assert!(start > 0.0 && ratio > 1.0 && count >= 2);
        GeometricGrid {
            start,
            ratio,
            count,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.start * self.ratio.powi(k as i32))
            .collect()
    }

    pub fn decades(&self) -> f64 {
        (self.ratio.powi(self.count as i32 - 1)).log10()
    }
}
