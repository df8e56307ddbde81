//! Uniform grid over embedded coordinates for nearest-point queries.
//!
//! The embedding is chosen so that the sample metric equals the (possibly
//! wrapped) euclidean distance between embedded coordinates.

#[derive(Clone, Debug)]
pub(crate) struct GridIndex {
    dim: usize,
    lo: Vec<f64>,
    width: Vec<f64>,
    cells: Vec<usize>,
    /// `Some(period)` when every axis wraps with that period.
    period: Option<f64>,
    buckets: Vec<Vec<u32>>,
    emb: Vec<f64>,
}

impl GridIndex {
    /// `emb` holds `n * dim` embedded coordinates (already wrapped into
    /// `[0, period)` for periodic axes).
    pub(crate) fn new(dim: usize, emb: Vec<f64>, period: Option<f64>) -> Self {
        let n = if dim == 0 { 0 } else { emb.len() / dim };
        let per_axis = ((n.max(1) as f64).powf(1.0 / dim.max(1) as f64).ceil() as usize).clamp(1, 1 << 12);
        let mut lo = vec![0.0; dim];
        let mut width = vec![1.0; dim];
        let cells = vec![per_axis; dim];
        for a in 0..dim {
            let (min, max) = match period {
                Some(p) => (0.0, p),
                None => {
                    let mut min = f64::INFINITY;
                    let mut max = f64::NEG_INFINITY;
                    for i in 0..n {
                        min = min.min(emb[i * dim + a]);
                        max = max.max(emb[i * dim + a]);
                    }
                    if n == 0 {
                        (0.0, 1.0)
                    } else {
                        (min, max)
                    }
                }
            };
            lo[a] = min;
            let span = (max - min).max(f64::MIN_POSITIVE);
            width[a] = span / per_axis as f64;
            if width[a] == 0.0 || !width[a].is_finite() {
                width[a] = 1.0;
            }
        }
        let total: usize = cells.iter().product();
        let mut idx = GridIndex {
            dim,
            lo,
            width,
            cells,
            period,
            buckets: vec![Vec::new(); total.max(1)],
            emb,
        };
        for i in 0..n {
            let c = idx.cell_of(&idx.emb[i * dim..(i + 1) * dim].to_vec());
            let id = idx.cell_id(&c);
            idx.buckets[id].push(i as u32);
        }
        idx
    }

    fn cell_of(&self, q: &[f64]) -> Vec<isize> {
        (0..self.dim)
            .map(|a| {
                let c = ((q[a] - self.lo[a]) / self.width[a]).floor() as isize;
                c.clamp(0, self.cells[a] as isize - 1)
            })
            .collect()
    }

    fn cell_id(&self, c: &[isize]) -> usize {
        let mut id = 0;
        for a in 0..self.dim {
            id = id * self.cells[a] + c[a] as usize;
        }
        id
    }

    fn dist(&self, q: &[f64], i: usize) -> f64 {
        let p = &self.emb[i * self.dim..(i + 1) * self.dim];
        let mut s = 0.0;
        for a in 0..self.dim {
            let mut d = (q[a] - p[a]).abs();
            if let Some(per) = self.period {
                d = d.min(per - d);
            }
            s += d * d;
        }
        s.sqrt()
    }

    /// Ties: lexicographically smaller embedded coordinates, then lower index.
    fn tie_before(&self, i: usize, j: usize) -> bool {
        let a = &self.emb[i * self.dim..(i + 1) * self.dim];
        let b = &self.emb[j * self.dim..(j + 1) * self.dim];
        match a.partial_cmp(b) {
            Some(std::cmp::Ordering::Less) => true,
            Some(std::cmp::Ordering::Equal) => i < j,
            _ => false,
        }
    }

    /// Nearest indexed point to the embedded query.
    pub(crate) fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.emb.is_empty() {
            return None;
        }
        let q: Vec<f64> = match self.period {
            Some(p) => q.iter().map(|v| v.rem_euclid(p)).collect(),
            None => q.to_vec(),
        };
        let home = self.cell_of(&q);
        let wmin = self.width.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_ring = self.cells.iter().copied().max().unwrap_or(1) as isize;
        let mut best: Option<(usize, f64)> = None;
        let mut seen: Vec<usize> = Vec::new();
        for r in 0..=max_ring {
            self.visit_ring(&home, r, &mut |id| {
                if seen.contains(&id) {
                    return;
                }
                seen.push(id);
                for &i in &self.buckets[id] {
                    let i = i as usize;
                    let d = self.dist(&q, i);
                    let better = match best {
                        None => true,
                        Some((bi, bd)) => d < bd || (d == bd && self.tie_before(i, bi)),
                    };
                    if better {
                        best = Some((i, d));
                    }
                }
            });
            if let Some((_, bd)) = best {
                if bd < r as f64 * wmin {
                    break;
                }
            }
        }
        best
    }

    /// Calls `f` on every cell at Chebyshev ring distance exactly `r` from `home`.
    fn visit_ring(&self, home: &[isize], r: isize, f: &mut dyn FnMut(usize)) {
        let mut off = vec![-r; self.dim];
        loop {
            if off.iter().any(|o| o.abs() == r) {
                let mut c = Vec::with_capacity(self.dim);
                let mut ok = true;
                for a in 0..self.dim {
                    let mut v = home[a] + off[a];
                    let m = self.cells[a] as isize;
                    if self.period.is_some() {
                        v = v.rem_euclid(m);
                    } else if v < 0 || v >= m {
                        ok = false;
                        break;
                    }
                    c.push(v);
                }
                if ok {
                    f(self.cell_id(&c));
                }
            }
            let mut a = 0;
            loop {
                if a == self.dim {
                    return;
                }
                off[a] += 1;
                if off[a] > r {
                    off[a] = -r;
                    a += 1;
                } else {
                    break;
                }
            }
        }
    }
}
