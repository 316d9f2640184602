//! Zero-contour extraction on the periodic grid (d = 2): marching squares
//! with linear interpolation, loops stitched across the torus seam, and
//! circumradius curvature estimates per vertex.

use crate::field::ScalarField;
use crate::grid::wrap_delta;
use crate::real::Real;

/// Closed polylines approximating `{phi = 0}`.
#[derive(Debug, Clone)]
pub struct InterfaceCurve<T> {
    pub loops: Vec<Loop<T>>,
}

#[derive(Debug, Clone)]
pub struct Loop<T> {
    /// Vertices in `[0,1)^2`; consecutive vertices may wrap.
    pub vertices: Vec<[T; 2]>,
    /// Unsigned curvature estimate per vertex (circumradius of the
    /// neighbouring triple).
    pub curvature: Vec<T>,
}

impl<T: Real> InterfaceCurve<T> {
    pub fn total_length(&self) -> T {
        let mut acc = T::zero();
        for l in &self.loops {
            acc += l.length();
        }
        acc
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    /// All curvature samples pooled (for robust statistics).
    pub fn curvatures(&self) -> Vec<T> {
        let mut out = Vec::new();
        for l in &self.loops {
            out.extend_from_slice(&l.curvature);
        }
        out
    }
}

impl<T: Real> Loop<T> {
    pub fn length(&self) -> T {
        let n = self.vertices.len();
        let mut acc = T::zero();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let dx = wrap_delta(b[0], a[0]);
            let dy = wrap_delta(b[1], a[1]);
            acc += (dx * dx + dy * dy).sqrt();
        }
        acc
    }
}

/// Crossing points live on grid edges; an edge is identified by its
/// anchor cell corner and orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct EdgeId {
    ix: usize,
    iy: usize,
    horizontal: bool,
}

/// Extract the zero level set of a d = 2 field.
pub fn extract_interface<T: Real>(phi: &ScalarField<T>) -> InterfaceCurve<T> {
    let grid = phi.grid();
    assert_eq!(grid.dim(), 2, "marching squares needs d = 2");
    let n = grid.n();
    let h = grid.h::<T>();
    let val = |ix: usize, iy: usize| phi.at(&[ix % n, iy % n]);
    // classification: phi >= 0 counts as the + phase
    let pos = |ix: usize, iy: usize| val(ix, iy) >= T::zero();

    // interpolated crossing position along an edge
    let cross = |a: T, b: T| -> T {
        // a, b have opposite classification; linear zero in [0, 1)
        let denom = a - b;
        if denom == T::zero() {
            T::lit(0.5)
        } else {
            (a / denom).max(T::zero()).min(T::one())
        }
    };

    // adjacency: each crossing edge connects to exactly two others
    use std::collections::HashMap;
    let mut links: HashMap<EdgeId, Vec<EdgeId>> = HashMap::new();
    let mut add_link = |a: EdgeId, b: EdgeId| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };

    for iy in 0..n {
        for ix in 0..n {
            // cell corners: 0 = (ix,iy), 1 = (ix+1,iy), 2 = (ix+1,iy+1), 3 = (ix,iy+1)
            let c0 = pos(ix, iy);
            let c1 = pos(ix + 1, iy);
            let c2 = pos(ix + 1, iy + 1);
            let c3 = pos(ix, iy + 1);
            let case = (c0 as u8) | (c1 as u8) << 1 | (c2 as u8) << 2 | (c3 as u8) << 3;
            if case == 0 || case == 15 {
                continue;
            }
            let bottom = EdgeId { ix, iy, horizontal: true };
            let top = EdgeId { ix, iy: (iy + 1) % n, horizontal: true };
            let left = EdgeId { ix, iy, horizontal: false };
            let right = EdgeId { ix: (ix + 1) % n, iy, horizontal: false };
            match case {
                1 | 14 => add_link(bottom, left),
                2 | 13 => add_link(bottom, right),
                4 | 11 => add_link(right, top),
                8 | 7 => add_link(top, left),
                3 | 12 => add_link(left, right),
                6 | 9 => add_link(bottom, top),
                5 | 10 => {
                    // saddle: disambiguate with the cell-centre average
                    let avg = (val(ix, iy) + val(ix + 1, iy) + val(ix + 1, iy + 1) + val(ix, iy + 1))
                        / T::lit(4.0);
                    let centre_pos = avg >= T::zero();
                    // case 5: corners 0 and 2 positive; case 10: 1 and 3
                    let connect_first = (case == 5) == centre_pos;
                    if connect_first {
                        add_link(bottom, right);
                        add_link(top, left);
                    } else {
                        add_link(bottom, left);
                        add_link(right, top);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // crossing coordinates per edge
    let position = |e: &EdgeId| -> [T; 2] {
        let a = val(e.ix, e.iy);
        if e.horizontal {
            let b = val(e.ix + 1, e.iy);
            let t = cross(a, b);
            [
                (T::from_index(e.ix) + t) * h,
                T::from_index(e.iy) * h,
            ]
        } else {
            let b = val(e.ix, e.iy + 1);
            let t = cross(a, b);
            [
                T::from_index(e.ix) * h,
                (T::from_index(e.iy) + t) * h,
            ]
        }
    };

    // walk the 2-regular graph into closed loops
    let mut visited: std::collections::HashSet<EdgeId> = std::collections::HashSet::new();
    let mut loops = Vec::new();
    let mut keys: Vec<EdgeId> = links.keys().copied().collect();
    keys.sort_by_key(|e| (e.iy, e.ix, e.horizontal));
    for start in keys {
        if visited.contains(&start) {
            continue;
        }
        let mut vertices = Vec::new();
        let mut prev: Option<EdgeId> = None;
        let mut cur = start;
        loop {
            visited.insert(cur);
            vertices.push(position(&cur));
            let nbrs = &links[&cur];
            let next = nbrs
                .iter()
                .copied()
                .find(|e| Some(*e) != prev && !visited.contains(e))
                .or_else(|| {
                    // closing the loop back to the start
                    nbrs.iter().copied().find(|e| *e == start && Some(*e) != prev)
                });
            match next {
                Some(e) if e == start => break,
                Some(e) => {
                    prev = Some(cur);
                    cur = e;
                }
                None => break,
            }
        }
        if vertices.len() >= 3 {
            let curvature = curvature_estimates(&vertices);
            loops.push(Loop { vertices, curvature });
        }
    }
    InterfaceCurve { loops }
}

/// Unsigned curvature by circumradius of consecutive vertex triples,
/// unwrapped to minimal images around the middle vertex.
fn curvature_estimates<T: Real>(vertices: &[[T; 2]]) -> Vec<T> {
    let n = vertices.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let p = vertices[(i + n - 1) % n];
        let q = vertices[i];
        let r = vertices[(i + 1) % n];
        let a = [q[0] + wrap_delta(p[0], q[0]), q[1] + wrap_delta(p[1], q[1])];
        let c = [q[0] + wrap_delta(r[0], q[0]), q[1] + wrap_delta(r[1], q[1])];
        out.push(circum_curvature(&a, &q, &c));
    }
    out
}

fn circum_curvature<T: Real>(a: &[T; 2], b: &[T; 2], c: &[T; 2]) -> T {
    let ab = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let bc = ((c[0] - b[0]).powi(2) + (c[1] - b[1]).powi(2)).sqrt();
    let ca = ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2)).sqrt();
    let area2 = ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
    let denom = ab * bc * ca;
    if denom == T::zero() {
        T::zero()
    } else {
        // kappa = 1/R = 4 * area / (|ab| |bc| |ca|), area2 = 2 * area
        T::lit(2.0) * area2 / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{torus_distance, GridSpec};

    #[test]
    fn constant_field_has_no_interface() {
        let grid = GridSpec::new(2, 32).unwrap();
        let phi = ScalarField::<f64>::constant(grid, 1.0);
        assert!(extract_interface(&phi).is_empty());
    }

    #[test]
    fn circle_length_and_curvature() {
        let grid = GridSpec::new(2, 256).unwrap();
        let eps = 0.02;
        let phi = ScalarField::<f64>::from_fn(grid, |p| {
            ((0.25 - torus_distance(p, &[0.5, 0.5])) / eps).tanh()
        });
        let curve = extract_interface(&phi);
        assert_eq!(curve.loops.len(), 1);
        let len = curve.total_length();
        let want = std::f64::consts::PI / 2.0;
        assert!((len - want).abs() < 0.01 * want, "length {len} vs {want}");
        let mut ks = curve.curvatures();
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = ks[ks.len() / 2];
        assert!((median - 4.0).abs() < 0.2, "median curvature {median}");
    }

    #[test]
    fn stripe_gives_two_unit_loops() {
        let grid = GridSpec::new(2, 128).unwrap();
        let eps = 0.03;
        let phi = ScalarField::<f64>::from_fn(grid, |p| {
            let s = crate::scenario::Scenario::<f64> {
                kind: crate::scenario::ScenarioKind::Stripe { y0: 0.25, y1: 0.75 },
                u0: crate::scenario::VelocityRecipe::Zero,
            };
            (s.signed_distance(p) / eps).tanh()
        });
        let curve = extract_interface(&phi);
        assert_eq!(curve.loops.len(), 2, "loops: {}", curve.loops.len());
        for l in &curve.loops {
            let len = l.length();
            assert!((len - 1.0).abs() < 1e-3, "loop length {len}");
            for &k in &l.curvature {
                assert!(k.abs() < 0.1, "flat loop curvature {k}");
            }
        }
    }

    #[test]
    fn wrapping_interface_is_stitched() {
        // circle centred on the torus seam
        let grid = GridSpec::new(2, 128).unwrap();
        let phi = ScalarField::<f64>::from_fn(grid, |p| {
            ((0.2 - torus_distance(p, &[0.0, 0.0])) / 0.05).tanh()
        });
        let curve = extract_interface(&phi);
        assert_eq!(curve.loops.len(), 1);
        let want = 2.0 * std::f64::consts::PI * 0.2;
        let len = curve.total_length();
        assert!((len - want).abs() < 0.02 * want, "length {len} vs {want}");
    }

    #[test]
    fn vertex_spacing_is_bounded() {
        let grid = GridSpec::new(2, 64).unwrap();
        let phi = ScalarField::<f64>::from_fn(grid, |p| {
            ((0.25 - torus_distance(p, &[0.5, 0.5])) / 0.05).tanh()
        });
        let curve = extract_interface(&phi);
        let h = grid.h::<f64>();
        for l in &curve.loops {
            let n = l.vertices.len();
            for i in 0..n {
                let a = l.vertices[i];
                let b = l.vertices[(i + 1) % n];
                assert!(torus_distance(&a, &b) <= 2.0 * h + 1e-12);
            }
        }
    }
}
