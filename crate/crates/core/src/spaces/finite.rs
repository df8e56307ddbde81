//! Finite topological spaces stored as their specialization pre-order.
//!
//! Convention: `x <= y` means `x` lies in the closure of `{y}`. Open sets are
//! exactly the up-sets of the pre-order, closed sets the down-sets, and the
//! closure of a set is its down-closure. Every finite topology is Alexandroff,
//! so this encoding is lossless.

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use serde::Serialize;

/// Default bound on the number of points a product space may have.
pub const PRODUCT_BOUND: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    n: usize,
    /// `up[x]` = `{y : x <= y}`, the smallest open set containing `x`.
    up: Vec<PointSet>,
    /// `down[x]` = `{y : y <= x}`, the closure of `{x}`.
    down: Vec<PointSet>,
}

/// Marker for separation properties that are not evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationFlags {
    pub t0: bool,
    pub t1: bool,
    pub hausdorff: bool,
    pub regular: bool,
    pub t3: bool,
    pub normal: bool,
    pub completely_regular: Marker,
}

impl SeparationFlags {
    /// Flags of a metrizable space.
    pub fn metrizable() -> Self {
        SeparationFlags {
            t0: true,
            t1: true,
            hausdorff: true,
            regular: true,
            t3: true,
            normal: true,
            completely_regular: Marker::Skipped,
        }
    }
}

/// A quotient space together with the projection of each original point.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: FiniteSpace,
    pub projection: Vec<usize>,
}

impl FiniteSpace {
    /// Validates `leq` as a pre-order and builds the space.
    pub fn new(leq: &[Vec<bool>]) -> Result<Self> {
        let n = leq.len();
        for row in leq {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: row.len(),
                });
            }
        }
        for (x, row) in leq.iter().enumerate() {
            if !row[x] {
                return Err(Error::NotAPreorder {
                    reason: "missing reflexivity",
                    x,
                    y: x,
                    z: x,
                });
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !leq[x][y] {
                    continue;
                }
                for z in 0..n {
                    if leq[y][z] && !leq[x][z] {
                        return Err(Error::NotAPreorder {
                            reason: "missing transitivity",
                            x,
                            y,
                            z,
                        });
                    }
                }
            }
        }
        Ok(Self::from_up_sets_unchecked(
            (0..n)
                .map(|x| PointSet::from_indices(n, (0..n).filter(|&y| leq[x][y])))
                .collect(),
        ))
    }

    /// Builds a space from `up[x] = {y : x <= y}`; the caller guarantees a pre-order.
    pub(crate) fn from_up_sets_unchecked(up: Vec<PointSet>) -> Self {
        let n = up.len();
        let mut down = vec![PointSet::empty(n); n];
        for (x, row) in up.iter().enumerate() {
            for y in row {
                down[y].insert(x);
            }
        }
        FiniteSpace { n, up, down }
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_up_sets_unchecked((0..n).map(|x| PointSet::singleton(n, x)).collect())
    }

    pub fn indiscrete(n: usize) -> Self {
        Self::from_up_sets_unchecked(vec![PointSet::full(n); n])
    }

    /// The chain `0 <= 1 <= ... <= n-1`.
    pub fn chain(n: usize) -> Self {
        Self::from_up_sets_unchecked(
            (0..n)
                .map(|x| PointSet::from_indices(n, x..n))
                .collect(),
        )
    }

    /// Two points with `0 <= 1`: `{1}` is open, `{0}` is closed.
    pub fn sierpinski() -> Self {
        Self::chain(2)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn leq_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|x| (0..self.n).map(|y| self.leq(x, y)).collect())
            .collect()
    }

    #[inline]
    pub fn up(&self, x: usize) -> &PointSet {
        &self.up[x]
    }

    #[inline]
    pub fn down(&self, x: usize) -> &PointSet {
        &self.down[x]
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.n {
            Err(Error::PointOutOfRange {
                point: x,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    fn check_set(&self, a: &PointSet) -> Result<()> {
        if a.universe() != self.n {
            return Err(Error::SizeMismatch {
                left: a.universe(),
                right: self.n,
            });
        }
        Ok(())
    }

    pub fn point_set(&self, points: &[usize]) -> Result<PointSet> {
        for &p in points {
            self.check_point(p)?;
        }
        Ok(PointSet::from_indices(self.n, points.iter().copied()))
    }

    /// Smallest closed superset of `a` (its down-closure).
    pub fn closure(&self, a: &PointSet) -> Result<PointSet> {
        self.check_set(a)?;
        Ok(self.closure_of(a))
    }

    pub(crate) fn closure_of(&self, a: &PointSet) -> PointSet {
        let mut out = PointSet::empty(self.n);
        for x in a {
            out.union_with(&self.down[x]);
        }
        out
    }

    /// Smallest open superset of `a` (its up-closure).
    pub fn open_hull(&self, a: &PointSet) -> PointSet {
        let mut out = PointSet::empty(self.n);
        for x in a {
            out.union_with(&self.up[x]);
        }
        out
    }

    /// Largest open subset of `a`.
    pub fn interior(&self, a: &PointSet) -> PointSet {
        PointSet::from_indices(self.n, (0..self.n).filter(|&x| self.up[x].is_subset(a)))
    }

    /// Intersection of all open sets containing `x`.
    pub fn min_open_nbhd(&self, x: usize) -> Result<PointSet> {
        self.check_point(x)?;
        Ok(self.up[x].clone())
    }

    pub fn is_open(&self, a: &PointSet) -> bool {
        self.open_hull(a) == *a
    }

    pub fn is_closed(&self, a: &PointSet) -> bool {
        self.closure_of(a) == *a
    }

    /// Every open set, by filtering all subsets. Only for small spaces.
    pub fn opens(&self) -> Result<Vec<PointSet>> {
        if self.n > 20 {
            return Err(Error::BudgetExceeded(format!(
                "open-set enumeration on {} points",
                self.n
            )));
        }
        Ok((0u64..1 << self.n)
            .map(|m| PointSet::from_mask(self.n, m))
            .filter(|s| self.is_open(s))
            .collect())
    }

    /// Product space with the componentwise pre-order. Point `(i, j)` has
    /// index `i * other.len() + j`.
    pub fn product(&self, other: &FiniteSpace) -> Result<FiniteSpace> {
        self.product_bounded(other, PRODUCT_BOUND)
    }

    pub fn product_bounded(&self, other: &FiniteSpace, bound: usize) -> Result<FiniteSpace> {
        let m = other.n;
        let points = self.n.checked_mul(m).unwrap_or(usize::MAX);
        if points > bound {
            return Err(Error::SizeOverflow { points, bound });
        }
        let up = (0..points)
            .map(|p| {
                let (i, j) = (p / m, p % m);
                let mut s = PointSet::empty(points);
                for a in &self.up[i] {
                    for b in &other.up[j] {
                        s.insert(a * m + b);
                    }
                }
                s
            })
            .collect();
        Ok(Self::from_up_sets_unchecked(up))
    }

    /// Quotient by a partition. A set of classes is open iff its preimage is
    /// open; for finite spaces that topology is again Alexandroff and its
    /// specialization order is the transitive closure of the relation induced
    /// on classes.
    pub fn quotient(&self, parts: &[Vec<usize>]) -> Result<Quotient> {
        let mut projection = vec![usize::MAX; self.n];
        for (c, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::NotAPartition(format!("part {c} is empty")));
            }
            for &x in part {
                self.check_point(x)?;
                if projection[x] != usize::MAX {
                    return Err(Error::NotAPartition(format!("point {x} appears twice")));
                }
                projection[x] = c;
            }
        }
        if let Some(x) = projection.iter().position(|&c| c == usize::MAX) {
            return Err(Error::NotAPartition(format!("point {x} is not covered")));
        }
        let k = parts.len();
        let mut rel = vec![vec![false; k]; k];
        for x in 0..self.n {
            for y in &self.up[x] {
                rel[projection[x]][projection[y]] = true;
            }
        }
        for m in 0..k {
            for a in 0..k {
                if rel[a][m] {
                    for b in 0..k {
                        if rel[m][b] {
                            rel[a][b] = true;
                        }
                    }
                }
            }
        }
        let up = rel
            .iter()
            .map(|row| PointSet::from_indices(k, (0..k).filter(|&b| row[b])))
            .collect();
        Ok(Quotient {
            space: Self::from_up_sets_unchecked(up),
            projection,
        })
    }

    /// Separation axioms, each reduced to minimal neighbourhoods: the least
    /// open set containing a set `A` is `up(A)` and the least closed set
    /// containing `x` is `down(x)`.
    pub fn separation_axioms(&self) -> SeparationFlags {
        let n = self.n;
        let t0 = (0..n).all(|x| (0..n).all(|y| x == y || !(self.leq(x, y) && self.leq(y, x))));
        let t1 = (0..n).all(|x| self.down[x].len() == 1);
        let hausdorff =
            (0..n).all(|x| (0..n).all(|y| x == y || self.up[x].is_disjoint(&self.up[y])));
        let hull_of_closure: Vec<PointSet> =
            (0..n).map(|y| self.open_hull(&self.down[y])).collect();
        let regular = (0..n).all(|x| {
            (0..n).all(|y| self.down[y].contains(x) || self.up[x].is_disjoint(&hull_of_closure[y]))
        });
        let normal = (0..n).all(|x| {
            (0..n).all(|y| {
                self.down[x].intersects(&self.down[y])
                    || hull_of_closure[x].is_disjoint(&hull_of_closure[y])
            })
        });
        SeparationFlags {
            t0,
            t1,
            hausdorff,
            regular,
            t3: t1 && regular,
            normal,
            completely_regular: Marker::Skipped,
        }
    }
}
