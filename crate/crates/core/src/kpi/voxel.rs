use crate::geometry::{Aabb, Pallet};

/// Occupancy over an `n x n x n` lattice spanning `(L, W, H*)`.
///
/// A cell is occupied iff some box covers its centre point. Centres are
/// tested in doubled integer coordinates, so the test is exact.
#[derive(Debug, Clone)]
pub struct VoxelGrid {
    n: usize,
    cells: Vec<bool>,
}

impl VoxelGrid {
    pub fn new(boxes: &[Aabb], pallet: &Pallet, h_star: i64, n: usize) -> Self {
        assert!(n > 0, "voxel grid resolution must be positive");
        let mut cells = vec![false; n * n * n];
        if h_star > 0 {
            let extent = [pallet.length_mm as i64, pallet.width_mm as i64, h_star];
            for b in boxes {
                let ranges: Vec<(usize, usize)> = (0..3)
                    .map(|axis| cell_range(b.min[axis], b.max(axis), extent[axis], n))
                    .collect();
                if ranges.iter().any(|r| r.0 >= r.1) {
                    continue;
                }
                for i in ranges[0].0..ranges[0].1 {
                    for j in ranges[1].0..ranges[1].1 {
                        let base = (i * n + j) * n;
                        cells[base + ranges[2].0..base + ranges[2].1].fill(true);
                    }
                }
            }
        }
        Self { n, cells }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn is_occupied(&self, i: usize, j: usize, k: usize) -> bool {
        self.cells[(i * self.n + j) * self.n + k]
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// `(occupied below envelope, cells below envelope)` summed over columns.
    ///
    /// A column's envelope sits on top of its highest occupied cell; columns
    /// with no occupied cell contribute nothing.
    pub fn envelope_counts(&self) -> (usize, usize) {
        let n = self.n;
        let (mut occupied, mut under) = (0, 0);
        for col in self.cells.chunks_exact(n) {
            if let Some(top) = col.iter().rposition(|c| *c) {
                under += top + 1;
                occupied += col[..=top].iter().filter(|c| **c).count();
            }
        }
        (occupied, under)
    }
}

/// Half-open range of cell indices whose centre lies in `[lo, hi)`.
fn cell_range(lo: i64, hi: i64, extent: i64, n: usize) -> (usize, usize) {
    let covers = |i: usize| {
        let c = (2 * i as i64 + 1) * extent;
        let scale = 2 * n as i64;
        lo * scale <= c && c < hi * scale
    };
    let first = (0..n).find(|&i| covers(i));
    match first {
        None => (0, 0),
        Some(f) => {
            let end = (f..n).find(|&i| !covers(i)).unwrap_or(n);
            (f, end)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_slab_fills_every_cell() {
        let pallet = Pallet::new(100, 100, 100, 1).unwrap();
        let g = VoxelGrid::new(&[Aabb::new([0, 0, 0], [100, 100, 40], 1)], &pallet, 40, 20);
        assert_eq!(g.occupied_count(), 8000);
        assert_eq!(g.envelope_counts(), (8000, 8000));
    }

    #[test]
    fn centre_rule_is_half_open() {
        // 5 mm cells: a box covering [0, 5) holds the centre at 2.5, [0, 2] does not
        assert_eq!(cell_range(0, 5, 100, 20), (0, 1));
        assert_eq!(cell_range(0, 2, 100, 20), (0, 0));
        assert_eq!(cell_range(3, 8, 100, 20), (1, 2));
        assert_eq!(cell_range(-50, 500, 100, 20), (0, 20));
    }

    #[test]
    fn zero_height_grid_is_empty() {
        let pallet = Pallet::new(100, 100, 100, 1).unwrap();
        let g = VoxelGrid::new(&[], &pallet, 0, 20);
        assert_eq!(g.occupied_count(), 0);
        assert_eq!(g.envelope_counts(), (0, 0));
    }
}
