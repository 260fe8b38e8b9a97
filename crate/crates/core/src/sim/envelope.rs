use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower convex envelope of a point set, as its hull vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Lower hull by the monotone chain. Points sharing an abscissa keep the
/// lowest ordinate; collinear interior points are dropped.
pub fn convex_envelope(points: &[(f64, f64)]) -> Result<Envelope> {
    if points.is_empty() {
        return Err(Error::EmptyEnvelope);
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    sorted.dedup_by(|later, first| later.0 == first.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for p in sorted {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(Envelope { vertices: hull })
}

impl Envelope {
    /// Envelope value at `x`, or `None` outside the covered span.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let first = self.vertices.first()?;
        let last = self.vertices.last()?;
        if x < first.0 || x > last.0 {
            return None;
        }
        if self.vertices.len() == 1 {
            return Some(first.1);
        }
        let i = self.vertices.partition_point(|v| v.0 <= x).clamp(1, self.vertices.len() - 1);
        let (a, b) = (self.vertices[i - 1], self.vertices[i]);
        Some(a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0))
    }
}
