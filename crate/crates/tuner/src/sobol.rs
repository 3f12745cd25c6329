//! Low-discrepancy point set for sampling discrete search spaces.
//!
//! Standard Sobol construction with 32-bit direction numbers: dimension 0 is
//! the van der Corput sequence, higher dimensions use the published
//! primitive-polynomial initialisations. Points are computed directly from
//! the binary digits of the (Gray-coded) index, so arbitrary indices can be
//! drawn without generating prefixes — needed because already-measured
//! configurations are skipped by advancing the index.

use crate::space::{Configuration, SearchSpaceDef};

/// Direction-number initialisation per dimension beyond the first:
/// (polynomial degree s, interior coefficient bits a, first s values of m).
const INITIALISATION: &[(usize, u64, &[u64])] = &[
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
];

/// Dimensions supported: van der Corput plus the initialisation table.
pub const MAX_DIMENSIONS: usize = 1 + 7;

const BITS: usize = 32;

fn direction_vectors(dim: usize) -> [u32; BITS] {
    assert!(dim < MAX_DIMENSIONS, "sobol dimension out of range");
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = 1u32 << (31 - j);
        }
        return v;
    }
    let (s, a, m_init) = INITIALISATION[dim - 1];
    let mut m = [0u64; BITS + 1];
    m[1..=s].copy_from_slice(m_init);
    for i in (s + 1)..=BITS {
        m[i] = m[i - s] ^ (m[i - s] << s);
        for k in 1..s {
            let bit = (a >> (s - 1 - k)) & 1;
            m[i] ^= bit * (m[i - k] << k);
        }
    }
    for j in 1..=BITS {
        v[j - 1] = (m[j] << (BITS - j)) as u32;
    }
    v
}

/// The `index`-th point of the sequence in `[0,1)^dims`. Index 0 (the origin)
/// is skipped by convention; callers start at 1.
pub fn sobol_point(index: u64, dims: usize) -> Vec<f64> {
    assert!(index >= 1, "sobol index starts at 1");
    assert!(index < 1u64 << BITS, "sobol index exceeds 32-bit range");
    let gray = index ^ (index >> 1);
    (0..dims)
        .map(|d| {
            let v = direction_vectors(d);
            let mut x = 0u32;
            for (j, &vj) in v.iter().enumerate() {
                if (gray >> j) & 1 == 1 {
                    x ^= vj;
                }
            }
            x as f64 / (1u64 << BITS) as f64
        })
        .collect()
}

/// Map the `index`-th point onto a discrete space: coordinate `u` picks list
/// entry `⌊u·n⌋` (clamped to the last entry).
pub fn sobol_config(space: &SearchSpaceDef, index: u64) -> Configuration {
    let point = sobol_point(index, space.dimension_count());
    let values = space
        .parameters()
        .iter()
        .zip(point)
        .map(|(p, u)| {
            let n = p.values.len();
            let slot = ((u * n as f64) as usize).min(n - 1);
            p.values[slot]
        })
        .collect();
    Configuration { values }
}
