//! Divergence-free Fourier mode basis and its deterministic ordering.
//!
//! The Galerkin space is spanned by, per canonical wavevector `k != 0`,
//! the real fields `sqrt(2) p cos(2 pi k.x)` and `sqrt(2) p sin(2 pi k.x)`
//! for each of the `d-1` polarisations `p` orthogonal to `k`, plus the `d`
//! constant fields for `k = 0`. These are orthonormal in `L^2` and the
//! span coincides with (Leray projection + truncation to `|k| <= K`), so
//! the solver applies the basis implicitly in Fourier space.

use crate::error::Error;
use crate::field::VectorField;
use crate::grid::GridSpec;
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy)]
pub struct ModeEntry {
    /// Canonical wavevector (first nonzero component positive); `[0,0,0]`
    /// stands for the constant block.
    pub k: [i64; 3],
    /// Number of polarisations: `d` for `k = 0`, else `d - 1`.
    pub polarizations: usize,
}

#[derive(Debug, Clone)]
pub struct ModeSet {
    dim: usize,
    cutoff: i64,
    entries: Vec<ModeEntry>,
    total_fields: usize,
}

/// Enumerate the Galerkin basis for `|k| <= K`.
///
/// Ordering is total and reproducible: entries sorted by `|k|` ascending
/// with lexicographic tie-break; within an entry, polarisation index first,
/// then cos before sin.
pub fn build_mode_basis(grid: GridSpec, cutoff: i64) -> Result<ModeSet, Error> {
    let kmax_allowed = (grid.n() / 3) as i64;
    if cutoff < 1 || cutoff > kmax_allowed {
        return Err(Error::config(
            "cutoff",
            format!(
                "wavenumber cutoff must satisfy 1 <= K <= N/3 (= {kmax_allowed} for N = {})",
                grid.n()
            ),
        ));
    }
    let d = grid.dim();
    let mut ks: Vec<[i64; 3]> = Vec::new();
    let r = cutoff;
    let zrange = if d == 3 { -r..=r } else { 0..=0 };
    for kz in zrange {
        for ky in -r..=r {
            for kx in -r..=r {
                let k = [kx, ky, kz];
                let norm2 = kx * kx + ky * ky + kz * kz;
                if norm2 == 0 || norm2 > r * r {
                    continue;
                }
                if !is_canonical(&k) {
                    continue;
                }
                ks.push(k);
            }
        }
    }
    ks.sort_by_key(|k| (k[0] * k[0] + k[1] * k[1] + k[2] * k[2], k[0], k[1], k[2]));

    let mut entries = vec![ModeEntry {
        k: [0, 0, 0],
        polarizations: d,
    }];
    entries.extend(ks.into_iter().map(|k| ModeEntry {
        k,
        polarizations: d - 1,
    }));
    // constants contribute one field each; travelling modes cos and sin
    let total_fields = d + (entries.len() - 1) * (d - 1) * 2;
    Ok(ModeSet {
        dim: d,
        cutoff,
        entries,
        total_fields,
    })
}

/// Canonical representative of the conjugate pair `{k, -k}`: the first
/// nonzero component is positive.
fn is_canonical(k: &[i64; 3]) -> bool {
    for &c in k {
        if c > 0 {
            return true;
        }
        if c < 0 {
            return false;
        }
    }
    false
}

impl ModeSet {
    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[ModeEntry] {
        &self.entries
    }

    /// Number of real basis fields.
    pub fn count(&self) -> usize {
        self.total_fields
    }

    /// Materialise basis field `j` on a grid (mainly for tests and
    /// velocity recipes; the solver never stores these).
    pub fn field<T: Real>(&self, j: usize, grid: GridSpec) -> VectorField<T> {
        assert!(j < self.total_fields, "basis index out of range");
        assert_eq!(grid.dim(), self.dim);
        if j < self.dim {
            return basis_field(grid, [0, 0, 0], j, Phase::Cos);
        }
        let mut rest = j - self.dim;
        let per_entry = (self.dim - 1) * 2;
        let entry = &self.entries[1 + rest / per_entry];
        rest %= per_entry;
        let pol = rest / 2;
        let phase = if rest % 2 == 0 { Phase::Cos } else { Phase::Sin };
        basis_field(grid, entry.k, pol, phase)
    }
}

/// Deterministic polarisation frame orthogonal to `k` (unit vectors).
pub fn polarization_vectors(d: usize, k: &[i64; 3]) -> Vec<[f64; 3]> {
    assert!(k.iter().any(|&c| c != 0), "k = 0 has no transverse frame");
    let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
    let norm = (kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2]).sqrt();
    if d == 2 {
        // 90-degree rotation of k
        return vec![[-kf[1] / norm, kf[0] / norm, 0.0]];
    }
    // d = 3: cross with the axis of smallest |k| component, tie -> lowest index
    let mut axis = 0;
    for a in 1..3 {
        if k[a].abs() < k[axis].abs() {
            axis = a;
        }
    }
    let mut e = [0.0f64; 3];
    e[axis] = 1.0;
    let p1 = normalize(cross(&kf, &e));
    let p2 = normalize(cross(&kf, &p1));
    vec![p1, p2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// One real basis field: a constant `e_pol` for `k = 0`, otherwise
/// `sqrt(2) p_pol trig(2 pi k.x)`.
pub fn basis_field<T: Real>(
    grid: GridSpec,
    k: [i64; 3],
    pol: usize,
    phase: Phase,
) -> VectorField<T> {
    let d = grid.dim();
    if k.iter().all(|&c| c == 0) {
        assert!(pol < d, "constant-block polarisation out of range");
        return VectorField::from_fn(grid, |_, c| if c == pol { T::one() } else { T::zero() });
    }
    let pols = polarization_vectors(d, &k);
    assert!(pol < pols.len(), "polarisation index out of range");
    let p = pols[pol];
    let sqrt2 = T::lit(std::f64::consts::SQRT_2);
    let two_pi = T::lit(2.0) * T::PI();
    VectorField::from_fn(grid, |x, c| {
        let mut ph = T::zero();
        for a in 0..d {
            ph += T::lit(k[a] as f64) * x[a];
        }
        ph *= two_pi;
        let osc = match phase {
            Phase::Cos => ph.cos(),
            Phase::Sin => ph.sin(),
        };
        sqrt2 * T::lit(p[c]) * osc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::Fft;
    use crate::spectral::divergence;

    #[test]
    fn spec_example_count_for_k1() {
        let grid = GridSpec::new(2, 64).unwrap();
        let basis = build_mode_basis(grid, 1).unwrap();
        let ks: Vec<[i64; 3]> = basis.entries().iter().map(|e| e.k).collect();
        assert_eq!(ks, vec![[0, 0, 0], [0, 1, 0], [1, 0, 0]]);
        assert_eq!(basis.count(), 6);
    }

    #[test]
    fn cutoff_bounds_enforced() {
        let grid = GridSpec::new(2, 64).unwrap();
        assert!(build_mode_basis(grid, 0).is_err());
        assert!(build_mode_basis(grid, 21).is_ok());
        assert!(build_mode_basis(grid, 22).is_err());
    }

    #[test]
    fn basis_fields_are_unit_norm_and_divergence_free() {
        let grid = GridSpec::new(2, 32).unwrap();
        let fft = Fft::<f64>::new(grid);
        let basis = build_mode_basis(grid, 3).unwrap();
        for j in 0..basis.count() {
            let w = basis.field::<f64>(j, grid);
            let norm2 = 2.0 * w.kinetic_energy();
            assert!((norm2 - 1.0).abs() < 1e-12, "field {j}: norm^2 = {norm2}");
            assert!(divergence(&fft, &w).max_abs() < 1e-12, "field {j} not solenoidal");
        }
    }

    #[test]
    fn count_is_reproducible_from_cutoff() {
        let grid = GridSpec::new(3, 16).unwrap();
        let b1 = build_mode_basis(grid, 2).unwrap();
        let b2 = build_mode_basis(grid, 2).unwrap();
        assert_eq!(b1.count(), b2.count());
        let k1: Vec<[i64; 3]> = b1.entries().iter().map(|e| e.k).collect();
        let k2: Vec<[i64; 3]> = b2.entries().iter().map(|e| e.k).collect();
        assert_eq!(k1, k2);
    }
}
