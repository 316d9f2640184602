//! Initial-geometry descriptions: analytic shapes (and polylines for d=2)
//! with torus-aware signed distance, reach estimates and perimeter.

use crate::error::Error;
use crate::grid::{torus_distance, wrap_delta};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind<T> {
    /// Disk (d=2) or ball (d=3) of the given radius; phase +1 inside.
    Circle { center: [T; 3], radius: T },
    /// `{ y0 < y < y1 }` in the second coordinate, wrapped on the torus.
    Stripe { y0: T, y1: T },
    TwoCircles {
        center1: [T; 3],
        radius1: T,
        center2: [T; 3],
        radius2: T,
    },
    /// Closed simple polygon, d=2 only; phase +1 inside.
    Polyline { vertices: Vec<[T; 2]> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum VelocityRecipe<T> {
    Zero,
    /// `u = (A sin(2 pi k y), 0)`.
    Shear { amplitude: T, wavenumber: i64 },
    /// Sum of basis modes `(k, polarisation, amplitude)`; `k = 0` entries
    /// are constant translations along the polarisation axis.
    Modes(Vec<ModeInit<T>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeInit<T> {
    pub k: [i64; 3],
    pub polarization: usize,
    pub amplitude: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub kind: ScenarioKind<T>,
    pub u0: VelocityRecipe<T>,
}

impl<T: Real> Scenario<T> {
    /// Geometric sanity checks that do not depend on the profile scale.
    pub fn validate(&self, d: usize) -> Result<(), Error> {
        match &self.kind {
            ScenarioKind::Circle { radius, .. } => {
                if !(*radius > T::zero() && *radius < T::lit(0.45)) {
                    return Err(Error::config(
                        "scenario.radius",
                        "radius exceeds 0.45 (or is non-positive)",
                    ));
                }
            }
            ScenarioKind::Stripe { y0, y1 } => {
                let width = wrap_unit(*y1 - *y0);
                if width <= T::zero() || width >= T::one() {
                    return Err(Error::config("scenario.y0", "stripe width must be in (0, 1)"));
                }
            }
            ScenarioKind::TwoCircles {
                center1,
                radius1,
                center2,
                radius2,
            } => {
                for (key, r) in [("scenario.radius", radius1), ("scenario.radius2", radius2)] {
                    if !(*r > T::zero() && *r < T::lit(0.45)) {
                        return Err(Error::config(key, "radius exceeds 0.45 (or is non-positive)"));
                    }
                }
                let sep = torus_distance(&center1[..d], &center2[..d]) - *radius1 - *radius2;
                if sep <= T::zero() {
                    return Err(Error::config(
                        "scenario.center2",
                        "the two circles overlap or touch",
                    ));
                }
            }
            ScenarioKind::Polyline { vertices } => {
                if d != 2 {
                    return Err(Error::config("scenario.kind", "polyline scenarios need d = 2"));
                }
                let poly = PolylineGeometry::build(vertices)?;
                drop(poly);
            }
        }
        Ok(())
    }

    /// Distance from the interface within which the signed distance stays
    /// smooth (conservative estimate; bounds the cap scale b).
    pub fn reach(&self, d: usize) -> T {
        let half = T::lit(0.5);
        match &self.kind {
            ScenarioKind::Circle { radius, .. } => (*radius).min(half - *radius),
            ScenarioKind::Stripe { y0, y1 } => {
                let w = wrap_unit(*y1 - *y0);
                (w.min(T::one() - w)) * half
            }
            ScenarioKind::TwoCircles {
                center1,
                radius1,
                center2,
                radius2,
            } => {
                let own1 = (*radius1).min(half - *radius1);
                let own2 = (*radius2).min(half - *radius2);
                let sep = torus_distance(&center1[..d], &center2[..d]) - *radius1 - *radius2;
                own1.min(own2).min(sep * half)
            }
            ScenarioKind::Polyline { vertices } => {
                let poly = PolylineGeometry::build(vertices).expect("validated polyline");
                poly.reach_estimate()
            }
        }
    }

    /// `H^{d-1}` measure of the initial interface.
    pub fn perimeter(&self, d: usize) -> T {
        let pi = T::PI();
        match &self.kind {
            ScenarioKind::Circle { radius, .. } => {
                if d == 2 {
                    T::lit(2.0) * pi * *radius
                } else {
                    T::lit(4.0) * pi * *radius * *radius
                }
            }
            ScenarioKind::Stripe { .. } => T::lit(2.0),
            ScenarioKind::TwoCircles { radius1, radius2, .. } => {
                if d == 2 {
                    T::lit(2.0) * pi * (*radius1 + *radius2)
                } else {
                    T::lit(4.0) * pi * (*radius1 * *radius1 + *radius2 * *radius2)
                }
            }
            ScenarioKind::Polyline { vertices } => {
                let poly = PolylineGeometry::build(vertices).expect("validated polyline");
                poly.length()
            }
        }
    }

    /// Signed distance to the interface, positive inside the `+` phase,
    /// in the torus metric.
    pub fn signed_distance(&self, x: &[T]) -> T {
        match &self.kind {
            ScenarioKind::Circle { center, radius } => *radius - torus_distance(x, &center[..x.len()]),
            ScenarioKind::Stripe { y0, y1 } => stripe_distance(x[1], *y0, *y1),
            ScenarioKind::TwoCircles {
                center1,
                radius1,
                center2,
                radius2,
            } => {
                let d1 = *radius1 - torus_distance(x, &center1[..x.len()]);
                let d2 = *radius2 - torus_distance(x, &center2[..x.len()]);
                d1.max(d2)
            }
            ScenarioKind::Polyline { vertices } => {
                let poly = PolylineGeometry::build(vertices).expect("validated polyline");
                poly.signed_distance(x[0], x[1])
            }
        }
    }

    /// Precompile the distance function (polylines build their geometry
    /// once; analytic shapes are cheap closures).
    pub fn distance_field(&self) -> Box<dyn Fn(&[T]) -> T + Send + Sync + '_>
    where
        T: 'static,
    {
        match &self.kind {
            ScenarioKind::Polyline { vertices } => {
                let poly = PolylineGeometry::build(vertices).expect("validated polyline");
                Box::new(move |x| poly.signed_distance(x[0], x[1]))
            }
            _ => {
                let this = self.clone();
                Box::new(move |x| this.signed_distance(x))
            }
        }
    }
}

fn wrap_unit<T: Real>(x: T) -> T {
    x - x.floor()
}

/// Signed distance to the stripe `{y0 < y < y1}` on the unit circle.
fn stripe_distance<T: Real>(y: T, y0: T, y1: T) -> T {
    let width = wrap_unit(y1 - y0);
    let s = wrap_unit(y - y0);
    let inside = s > T::zero() && s < width;
    let d0 = circle_dist(y, y0);
    let d1 = circle_dist(y, y1);
    let dist = d0.min(d1);
    if inside {
        dist
    } else {
        -dist
    }
}

fn circle_dist<T: Real>(a: T, b: T) -> T {
    wrap_delta(a, b).abs()
}

/// Closed polygon lifted to the plane (consecutive vertices joined by
/// minimal images). Used for distance, winding, length and validity.
pub struct PolylineGeometry<T> {
    lifted: Vec<[T; 2]>,
}

impl<T: Real> PolylineGeometry<T> {
    pub fn build(vertices: &[[T; 2]]) -> Result<Self, Error> {
        if vertices.len() < 3 {
            return Err(Error::config("scenario.vertices", "polyline needs >= 3 vertices"));
        }
        // lift: start at v0, follow minimal-image displacements
        let mut lifted = Vec::with_capacity(vertices.len());
        lifted.push(vertices[0]);
        for i in 1..vertices.len() {
            let prev = lifted[i - 1];
            let dx = wrap_delta(vertices[i][0], vertices[i - 1][0]);
            let dy = wrap_delta(vertices[i][1], vertices[i - 1][1]);
            lifted.push([prev[0] + dx, prev[1] + dy]);
        }
        // the lift must return to the start: loops that wrap the torus
        // have no winding number
        let dx = wrap_delta(vertices[0][0], vertices[vertices.len() - 1][0]);
        let dy = wrap_delta(vertices[0][1], vertices[vertices.len() - 1][1]);
        let close = [
            lifted[vertices.len() - 1][0] + dx - lifted[0][0],
            lifted[vertices.len() - 1][1] + dy - lifted[0][1],
        ];
        if close[0].abs() > T::lit(1e-12) || close[1].abs() > T::lit(1e-12) {
            return Err(Error::config(
                "scenario.vertices",
                "polyline wraps around the torus; winding number undefined",
            ));
        }
        let poly = PolylineGeometry { lifted };
        if poly.self_intersects() {
            return Err(Error::config(
                "scenario.vertices",
                "polyline self-intersects; winding number ill-defined",
            ));
        }
        Ok(poly)
    }

    fn segments(&self) -> impl Iterator<Item = ([T; 2], [T; 2])> + '_ {
        let n = self.lifted.len();
        (0..n).map(move |i| (self.lifted[i], self.lifted[(i + 1) % n]))
    }

    pub fn length(&self) -> T {
        let mut acc = T::zero();
        for (a, b) in self.segments() {
            let dx = b[0] - a[0];
            let dy = b[1] - a[1];
            acc += (dx * dx + dy * dy).sqrt();
        }
        acc
    }

    fn self_intersects(&self) -> bool {
        let n = self.lifted.len();
        let segs: Vec<([T; 2], [T; 2])> = self.segments().collect();
        for i in 0..n {
            for j in (i + 1)..n {
                // adjacent segments share an endpoint; skip those pairs
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(&segs[i], &segs[j]) {
                    return true;
                }
            }
        }
        false
    }

    fn reach_estimate(&self) -> T {
        // half the smallest distance between non-adjacent segments,
        // capped by a quarter of the total length
        let segs: Vec<([T; 2], [T; 2])> = self.segments().collect();
        let n = segs.len();
        let mut min_gap = T::infinity();
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let g = segment_gap(&segs[i], &segs[j]);
                if g < min_gap {
                    min_gap = g;
                }
            }
        }
        (min_gap * T::lit(0.5)).min(self.length() * T::lit(0.25))
    }

    /// Signed distance: min over segments and the 9 torus images of the
    /// query point; sign from the winding number of the closest image.
    pub fn signed_distance(&self, x: T, y: T) -> T {
        let mut best = T::infinity();
        let mut inside = false;
        for ix in -1..=1 {
            for iy in -1..=1 {
                let px = x + T::lit(ix as f64);
                let py = y + T::lit(iy as f64);
                let mut d = T::infinity();
                for (a, b) in self.segments() {
                    let dd = point_segment_distance(px, py, &a, &b);
                    if dd < d {
                        d = dd;
                    }
                }
                if d < best {
                    best = d;
                    inside = self.winding_nonzero(px, py);
                }
            }
        }
        if inside {
            best
        } else {
            -best
        }
    }

    fn winding_nonzero(&self, x: T, y: T) -> bool {
        // crossing-number parity (polygon is simple)
        let mut crossings = 0usize;
        for (a, b) in self.segments() {
            let (ay, by) = (a[1], b[1]);
            if (ay > y) != (by > y) {
                let t = (y - ay) / (by - ay);
                let cx = a[0] + t * (b[0] - a[0]);
                if cx > x {
                    crossings += 1;
                }
            }
        }
        crossings % 2 == 1
    }
}

fn point_segment_distance<T: Real>(px: T, py: T, a: &[T; 2], b: &[T; 2]) -> T {
    let vx = b[0] - a[0];
    let vy = b[1] - a[1];
    let wx = px - a[0];
    let wy = py - a[1];
    let vv = vx * vx + vy * vy;
    let t = if vv > T::zero() {
        ((wx * vx + wy * vy) / vv).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let dx = wx - t * vx;
    let dy = wy - t * vy;
    (dx * dx + dy * dy).sqrt()
}

fn segment_gap<T: Real>(s1: &([T; 2], [T; 2]), s2: &([T; 2], [T; 2])) -> T {
    let d1 = point_segment_distance(s1.0[0], s1.0[1], &s2.0, &s2.1);
    let d2 = point_segment_distance(s1.1[0], s1.1[1], &s2.0, &s2.1);
    let d3 = point_segment_distance(s2.0[0], s2.0[1], &s1.0, &s1.1);
    let d4 = point_segment_distance(s2.1[0], s2.1[1], &s1.0, &s1.1);
    d1.min(d2).min(d3).min(d4)
}

fn orient<T: Real>(a: &[T; 2], b: &[T; 2], c: &[T; 2]) -> T {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_intersect<T: Real>(s1: &([T; 2], [T; 2]), s2: &([T; 2], [T; 2])) -> bool {
    let (p1, p2) = s1;
    let (q1, q2) = s2;
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    (o1 * o2 < T::zero()) && (o3 * o4 < T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> Scenario<f64> {
        Scenario {
            kind: ScenarioKind::Circle {
                center: [0.5, 0.5, 0.0],
                radius: 0.25,
            },
            u0: VelocityRecipe::Zero,
        }
    }

    #[test]
    fn circle_distance_examples() {
        let s = circle();
        assert!((s.signed_distance(&[0.5, 0.5]) - 0.25).abs() < 1e-15);
        assert!(s.signed_distance(&[0.75, 0.5]).abs() < 1e-15);
        // outside, wrapped
        assert!(s.signed_distance(&[0.05, 0.5]) < 0.0);
    }

    #[test]
    fn stripe_distance_examples_and_bruteforce() {
        let s = Scenario::<f64> {
            kind: ScenarioKind::Stripe { y0: 0.25, y1: 0.75 },
            u0: VelocityRecipe::Zero,
        };
        // midline: x-coordinate irrelevant
        assert!((s.signed_distance(&[0.1, 0.5]) - 0.25).abs() < 1e-15);
        assert!((s.signed_distance(&[0.9, 0.5]) - 0.25).abs() < 1e-15);
        // outside
        assert!((s.signed_distance(&[0.3, 0.1]) + 0.15).abs() < 1e-15);
        // brute-force oracle over boundary samples
        for &y in &[0.0, 0.1, 0.3, 0.5, 0.74, 0.76, 0.99] {
            let mut brute = f64::INFINITY;
            for i in 0..20_000 {
                let x = i as f64 / 20_000.0;
                for by in [0.25, 0.75] {
                    brute = brute.min(torus_distance(&[x, by], &[0.4, y]));
                }
            }
            let d = s.signed_distance(&[0.4, y]);
            assert!((d.abs() - brute).abs() < 1e-4, "y = {y}: {d} vs {brute}");
        }
    }

    #[test]
    fn union_of_two_circles() {
        let s = Scenario::<f64> {
            kind: ScenarioKind::TwoCircles {
                center1: [0.25, 0.25, 0.0],
                radius1: 0.12,
                center2: [0.75, 0.75, 0.0],
                radius2: 0.1,
            },
            u0: VelocityRecipe::Zero,
        };
        s.validate(2).unwrap();
        assert!((s.signed_distance(&[0.25, 0.25]) - 0.12).abs() < 1e-15);
        assert!((s.signed_distance(&[0.75, 0.75]) - 0.1).abs() < 1e-15);
        assert!(s.signed_distance(&[0.5, 0.5]) < 0.0);
        assert!((s.perimeter(2) - 2.0 * std::f64::consts::PI * 0.22).abs() < 1e-12);
    }

    #[test]
    fn polyline_square_distance_and_length() {
        let square = Scenario::<f64> {
            kind: ScenarioKind::Polyline {
                vertices: vec![[0.3, 0.3], [0.7, 0.3], [0.7, 0.7], [0.3, 0.7]],
            },
            u0: VelocityRecipe::Zero,
        };
        square.validate(2).unwrap();
        assert!((square.perimeter(2) - 1.6).abs() < 1e-12);
        assert!((square.signed_distance(&[0.5, 0.5]) - 0.2).abs() < 1e-12);
        assert!((square.signed_distance(&[0.5, 0.25]) + 0.05).abs() < 1e-12);
        assert!(square.signed_distance(&[0.31, 0.31]) > 0.0);
    }

    #[test]
    fn self_intersecting_polyline_rejected() {
        let bowtie = Scenario::<f64> {
            kind: ScenarioKind::Polyline {
                vertices: vec![[0.3, 0.3], [0.7, 0.7], [0.7, 0.3], [0.3, 0.7]],
            },
            u0: VelocityRecipe::Zero,
        };
        assert!(bowtie.validate(2).is_err());
    }

    #[test]
    fn oversized_circle_rejected() {
        let s = Scenario::<f64> {
            kind: ScenarioKind::Circle {
                center: [0.5, 0.5, 0.0],
                radius: 0.6,
            },
            u0: VelocityRecipe::Zero,
        };
        assert!(s.validate(2).is_err());
    }

    #[test]
    fn reach_of_standard_shapes() {
        assert!((circle().reach(2) - 0.25).abs() < 1e-15);
        let stripe = Scenario::<f64> {
            kind: ScenarioKind::Stripe { y0: 0.25, y1: 0.75 },
            u0: VelocityRecipe::Zero,
        };
        assert!((stripe.reach(2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn distance_is_lipschitz_on_samples() {
        let s = circle();
        let mut rng = 0u64;
        let mut next = || {
            // xorshift; plenty for test point generation
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng = rng.wrapping_add(0x9E3779B97F4A7C15);
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let a = [next(), next()];
            let b = [next(), next()];
            let lhs = (s.signed_distance(&a) - s.signed_distance(&b)).abs();
            assert!(lhs <= torus_distance(&a, &b) + 1e-12);
        }
    }
}
