//! Uniform cell list over the unit cube for fixed-radius neighbour queries.

use super::pointset::PointSet;

/// Upper bound on the number of cells; coarser lists fall back to one cell.
const MAX_CELLS: usize = 1 << 20;

/// Points bucketed into `m^d` cubic cells of side at least `cutoff`, so every
/// pair closer than `cutoff` lies in adjacent cells. With `m < 3` there is a
/// single cell and queries return every point.
#[derive(Clone, Debug)]
pub(crate) struct CellList {
    d: usize,
    m: usize,
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl CellList {
    pub fn new(points: &PointSet, cutoff: f64) -> Self {
        let d = points.d();
        let mut m = if cutoff > 0.0 {
            (1.0 / cutoff).floor().min(1e6) as usize
        } else {
            1
        };
        if m < 3 || m.checked_pow(d as u32).is_none_or(|c| c > MAX_CELLS) {
            m = 1;
        }
        let mut list = Self {
            d,
            m,
            cells: vec![Vec::new(); m.pow(d as u32)],
            cell_of: Vec::with_capacity(points.n()),
        };
        for (i, x) in points.iter().enumerate() {
            let c = list.cell(x);
            list.cells[c].push(i);
            list.cell_of.push(c);
        }
        list
    }

    fn axis(&self, v: f64) -> usize {
        ((v * self.m as f64) as usize).min(self.m - 1)
    }

    fn cell(&self, x: &[f64]) -> usize {
        x.iter().fold(0, |c, &v| c * self.m + self.axis(v))
    }

    /// Moves point `i` to the cell containing `x`.
    pub fn relocate(&mut self, i: usize, x: &[f64]) {
        let (old, new) = (self.cell_of[i], self.cell(x));
        if old != new {
            let bucket = &mut self.cells[old];
            let at = bucket
                .iter()
                .position(|&j| j == i)
                .expect("point is in its recorded cell");
            bucket.swap_remove(at);
            self.cells[new].push(i);
            self.cell_of[i] = new;
        }
    }

    /// Indices of all points in cells adjacent to the one containing `x`,
    /// sorted ascending.
    pub fn candidates(&self, x: &[f64], out: &mut Vec<usize>) {
        out.clear();
        if self.m == 1 {
            out.extend(0..self.cell_of.len());
            return;
        }
        let centre: Vec<usize> = x.iter().map(|&v| self.axis(v)).collect();
        let mut offset = vec![0usize; self.d];
        'cells: loop {
            let mut c = 0;
            let mut inside = true;
            for (&a, &o) in centre.iter().zip(&offset) {
                let k = a + o;
                if k == 0 || k > self.m {
                    inside = false;
                    break;
                }
                c = c * self.m + (k - 1);
            }
            if inside {
                out.extend_from_slice(&self.cells[c]);
            }
            for o in offset.iter_mut().rev() {
                *o += 1;
                if *o < 3 {
                    continue 'cells;
                }
                *o = 0;
            }
            break;
        }
        out.sort_unstable();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::pointset::squared_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn candidates_cover_every_close_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 1..=4 {
            let pts = PointSet::new(d, (0..300 * d).map(|_| rng.gen::<f64>()).collect()).unwrap();
            let cutoff = 0.15;
            let mut list = CellList::new(&pts, cutoff);
            assert!(list.m > 1);
            let mut out = Vec::new();
            for i in 0..pts.n() {
                list.candidates(pts.point(i), &mut out);
                assert!(out.windows(2).all(|w| w[0] < w[1]));
                for l in 0..pts.n() {
                    if squared_distance(pts.point(i), pts.point(l)).sqrt() < cutoff {
                        assert!(out.binary_search(&l).is_ok(), "d = {d}, {i} misses {l}");
                    }
                }
            }
            let moved = vec![1.0; d];
            list.relocate(0, &moved);
            list.candidates(&moved, &mut out);
            assert!(out.contains(&0));
        }
    }

    #[test]
    fn coarse_cutoff_returns_all() {
        let pts = PointSet::new(2, vec![0.1, 0.1, 0.9, 0.9, 0.5, 0.5]).unwrap();
        let list = CellList::new(&pts, 0.4);
        let mut out = Vec::new();
        list.candidates(&[0.0, 0.0], &mut out);
        assert_eq!(out, vec![0, 1, 2]);
    }
}
