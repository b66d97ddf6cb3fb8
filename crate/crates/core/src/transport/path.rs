use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::statefam::ParameterPoint;

/// Minimum number of samples on a path.
pub const MIN_SAMPLES: usize = 16;
/// Coordinate tolerance for calling a path closed.
pub const CLOSURE_TOL: f64 = 1e-12;

/// Ordered samples of a curve `s(lambda)`, `lambda` uniform on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    samples: Vec<ParameterPoint>,
}

impl Path {
    pub fn new(samples: Vec<ParameterPoint>) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "path needs at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        let n = samples[0].dim();
        if let Some(bad) = samples.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.dim(),
            });
        }
        Ok(Self { samples })
    }

    pub fn from_coords(coords: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(coords.into_iter().map(ParameterPoint::new).collect::<Result<_>>()?)
    }

    /// `s(lambda)` sampled at `count` uniform values including both ends.
    pub fn from_fn(count: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        Self::from_coords((0..count).map(|i| f(i as f64 / (count - 1) as f64)).collect())
    }

    /// Circle of latitude `s0 = theta0`, `s1` running over `[0, 2 pi]`.
    /// Coordinates do not close; the state does for periodic families.
    pub fn latitude(theta0: f64, count: usize) -> Result<Self> {
        Self::from_fn(count, |l| vec![theta0, 2.0 * PI * l])
    }

    /// Counterclockwise circle, closed in coordinates.
    pub fn circle(center: [f64; 2], radius: f64, count: usize) -> Result<Self> {
        let mut p = Self::from_fn(count, |l| {
            let a = 2.0 * PI * l;
            vec![center[0] + radius * a.cos(), center[1] + radius * a.sin()]
        })?;
        let first = p.samples[0].clone();
        *p.samples.last_mut().expect("nonempty") = first;
        Ok(p)
    }

    /// Counterclockwise boundary of `[a0, b0] x [a1, b1]`, with `per_side`
    /// intervals on each edge.
    pub fn rectangle(lo: [f64; 2], hi: [f64; 2], per_side: usize) -> Result<Self> {
        let corners = [
            [lo[0], lo[1]],
            [hi[0], lo[1]],
            [hi[0], hi[1]],
            [lo[0], hi[1]],
            [lo[0], lo[1]],
        ];
        let mut coords = Vec::with_capacity(4 * per_side + 1);
        for w in corners.windows(2) {
            for i in 0..per_side {
                let t = i as f64 / per_side as f64;
                coords.push(vec![
                    w[0][0] + t * (w[1][0] - w[0][0]),
                    w[0][1] + t * (w[1][1] - w[0][1]),
                ]);
            }
        }
        coords.push(vec![lo[0], lo[1]]);
        Self::from_coords(coords)
    }

    pub fn samples(&self) -> &[ParameterPoint] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn first(&self) -> &ParameterPoint {
        &self.samples[0]
    }

    pub fn last(&self) -> &ParameterPoint {
        self.samples.last().expect("nonempty")
    }

    /// Largest coordinate gap between the endpoints.
    pub fn closure_gap(&self) -> f64 {
        self.first()
            .coords()
            .iter()
            .zip(self.last().coords())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_closed(&self) -> bool {
        self.closure_gap() <= CLOSURE_TOL
    }

    /// Same curve sampled at twice the resolution, by linear interpolation.
    pub fn refined(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.samples.len() - 1);
        for w in self.samples.windows(2) {
            out.push(w[0].clone());
            let mid: Vec<f64> = w[0]
                .coords()
                .iter()
                .zip(w[1].coords())
                .map(|(a, b)| 0.5 * (a + b))
                .collect();
            out.push(ParameterPoint::new(mid).expect("finite midpoint"));
        }
        out.push(self.last().clone());
        Self { samples: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_short_rejected() {
        assert!(Path::from_fn(10, |l| vec![l]).is_err());
    }

    #[test]
    fn circle_and_rectangle_close() {
        assert!(Path::circle([0.0, 0.0], 1.0, 33).unwrap().is_closed());
        let r = Path::rectangle([0.0, 0.0], [1.0, 2.0], 8).unwrap();
        assert!(r.is_closed());
        assert_eq!(r.len(), 33);
    }

    #[test]
    fn latitude_is_open_in_coordinates() {
        let p = Path::latitude(1.0, 64).unwrap();
        assert!(!p.is_closed());
        assert!((p.closure_gap() - 2.0 * PI).abs() < 1e-12);
        assert_eq!(p.refined().len(), 127);
    }
}
