//! Finite metric samples: the approximate backend.
//!
//! A sample is a finite point cloud with a metric, a strictly decreasing
//! ladder of scales and a comparison tolerance. Closed balls and
//! ε-closures use `d <= ε + tol`.

use super::index::GridIndex;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Default absolute tolerance for metric comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Full triangle-inequality validation is cubic; matrices above this size are rejected.
pub const MATRIX_VALIDATION_BOUND: usize = 600;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoordMetric {
    Euclidean,
    /// `d(x, y) = |x^3 - y^3|` on the real line.
    Cubic,
    /// Flat torus `(R / period Z)^dim`.
    Torus { period: f64 },
}

#[derive(Clone, Debug)]
pub enum Geometry {
    Coords {
        dim: usize,
        data: Vec<f64>,
        kind: CoordMetric,
    },
    Matrix {
        data: Vec<f64>,
    },
    /// `k`-fold power of a sample with the max metric. Point `(i_0, ..., i_{k-1})`
    /// has index `((i_0 * n) + i_1) * n + ...`.
    Power {
        factor: Arc<MetricSample>,
        k: usize,
    },
}

#[derive(Debug)]
pub struct MetricSample {
    n: usize,
    geometry: Geometry,
    scales: Vec<f64>,
    tol: f64,
    resolution: f64,
    compact: bool,
    diam: f64,
    nn: Vec<f64>,
    index: Option<GridIndex>,
    balls: Mutex<HashMap<u64, Arc<Vec<PointSet>>>>,
}

impl Clone for MetricSample {
    fn clone(&self) -> Self {
        MetricSample {
            n: self.n,
            geometry: self.geometry.clone(),
            scales: self.scales.clone(),
            tol: self.tol,
            resolution: self.resolution,
            compact: self.compact,
            diam: self.diam,
            nn: self.nn.clone(),
            index: self.index.clone(),
            balls: Mutex::new(HashMap::new()),
        }
    }
}

/// Dyadic ladder `diam / 2^k` for `k = 2..=10`.
pub fn dyadic_ladder(diam: f64) -> Vec<f64> {
    (2..=10).map(|k| diam / f64::powi(2.0, k)).collect()
}

fn validate_ladder(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(Error::InvalidMetric("empty scale ladder".into()));
    }
    for (i, &s) in scales.iter().enumerate() {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidMetric(format!("scale {s} is not positive")));
        }
        if i > 0 && s >= scales[i - 1] {
            return Err(Error::InvalidMetric(
                "scales must be strictly decreasing".into(),
            ));
        }
    }
    Ok(())
}

fn coord_dist(kind: CoordMetric, a: &[f64], b: &[f64]) -> f64 {
    match kind {
        CoordMetric::Euclidean => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        CoordMetric::Cubic => (a[0].powi(3) - b[0].powi(3)).abs(),
        CoordMetric::Torus { period } => a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let d = (x - y).rem_euclid(period);
                let d = d.min(period - d);
                d * d
            })
            .sum::<f64>()
            .sqrt(),
    }
}

/// Builder for [`MetricSample`].
#[derive(Clone, Debug)]
pub struct SampleSpec {
    pub geometry: Geometry,
    pub scales: Option<Vec<f64>>,
    pub tol: f64,
    pub resolution: f64,
    pub compact: bool,
}

impl SampleSpec {
    pub fn coords(dim: usize, data: Vec<f64>, kind: CoordMetric) -> Self {
        SampleSpec {
            geometry: Geometry::Coords { dim, data, kind },
            scales: None,
            tol: DEFAULT_TOL,
            resolution: 0.0,
            compact: false,
        }
    }

    pub fn points(points: &[Vec<f64>], kind: CoordMetric) -> Result<Self> {
        let dim = points.first().map_or(1, |p| p.len());
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::SizeMismatch {
                    left: dim,
                    right: p.len(),
                });
            }
            data.extend_from_slice(p);
        }
        Ok(Self::coords(dim, data, kind))
    }

    pub fn matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(SampleSpec {
            geometry: Geometry::Matrix { data },
            scales: None,
            tol: DEFAULT_TOL,
            resolution: 0.0,
            compact: false,
        })
    }

    pub fn scales(mut self, scales: Vec<f64>) -> Self {
        self.scales = Some(scales);
        self
    }

    pub fn resolution(mut self, r: f64) -> Self {
        self.resolution = r;
        self
    }

    pub fn compact(mut self, c: bool) -> Self {
        self.compact = c;
        self
    }

    pub fn tol(mut self, t: f64) -> Self {
        self.tol = t;
        self
    }

    pub fn build(self) -> Result<MetricSample> {
        MetricSample::new(self)
    }
}

impl MetricSample {
    pub fn new(spec: SampleSpec) -> Result<Self> {
        if !(spec.tol >= 0.0) || !(spec.resolution >= 0.0) {
            return Err(Error::InvalidMetric(
                "tolerance and resolution must be non-negative".into(),
            ));
        }
        let (n, index) = match &spec.geometry {
            Geometry::Coords { dim, data, kind } => {
                if *dim == 0 {
                    return Err(Error::InvalidMetric("zero-dimensional coordinates".into()));
                }
                if data.len() % dim != 0 {
                    return Err(Error::InvalidMetric("ragged coordinate data".into()));
                }
                if let Some(v) = data.iter().find(|v| !v.is_finite()) {
                    return Err(Error::InvalidMetric(format!("non-finite coordinate {v}")));
                }
                let (emb, period) = match kind {
                    CoordMetric::Euclidean => (data.clone(), None),
                    CoordMetric::Cubic => {
                        if *dim != 1 {
                            return Err(Error::InvalidMetric(
                                "cubic metric needs one-dimensional points".into(),
                            ));
                        }
                        (data.iter().map(|x| x.powi(3)).collect(), None)
                    }
                    CoordMetric::Torus { period } => {
                        if !(*period > 0.0) {
                            return Err(Error::InvalidMetric("torus period must be positive".into()));
                        }
                        (data.iter().map(|x| x.rem_euclid(*period)).collect(), Some(*period))
                    }
                };
                let n = data.len() / dim;
                (n, Some(GridIndex::new(*dim, emb, period)))
            }
            Geometry::Matrix { data } => {
                let n = (data.len() as f64).sqrt().round() as usize;
                if n * n != data.len() {
                    return Err(Error::InvalidMetric("distance matrix is not square".into()));
                }
                validate_matrix(n, data, spec.tol)?;
                (n, None)
            }
            Geometry::Power { factor, k } => {
                let pts = factor.n.checked_pow(*k as u32).unwrap_or(usize::MAX);
                if pts > super::finite::PRODUCT_BOUND {
                    return Err(Error::SizeOverflow {
                        points: pts,
                        bound: super::finite::PRODUCT_BOUND,
                    });
                }
                (pts, None)
            }
        };
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let mut s = MetricSample {
            n,
            geometry: spec.geometry,
            scales: Vec::new(),
            tol: spec.tol,
            resolution: spec.resolution,
            compact: spec.compact,
            diam: 0.0,
            nn: Vec::new(),
            index,
            balls: Mutex::new(HashMap::new()),
        };
        let (diam, nn) = s.scan_extremes();
        s.diam = diam;
        s.nn = nn;
        s.scales = match spec.scales {
            Some(l) => l,
            None if diam > 0.0 => dyadic_ladder(diam),
            None => vec![1.0],
        };
        validate_ladder(&s.scales)?;
        Ok(s)
    }

    fn scan_extremes(&self) -> (f64, Vec<f64>) {
        let rows: Vec<(f64, f64)> = (0..self.n)
            .into_par_iter()
            .map(|i| {
                let mut far: f64 = 0.0;
                let mut near = f64::INFINITY;
                for j in 0..self.n {
                    if i != j {
                        let d = self.dist(i, j);
                        far = far.max(d);
                        near = near.min(d);
                    }
                }
                (far, near)
            })
            .collect();
        let diam = rows.iter().map(|r| r.0).fold(0.0, f64::max);
        (diam, rows.into_iter().map(|r| r.1).collect())
    }

    /// `k`-fold power with the max metric; the ladder and tolerance are inherited.
    pub fn power(factor: &Arc<MetricSample>, k: usize) -> Result<MetricSample> {
        if k == 0 {
            return Err(Error::BadParameter("power must be at least 1".into()));
        }
        MetricSample::new(SampleSpec {
            geometry: Geometry::Power {
                factor: factor.clone(),
                k,
            },
            scales: Some(factor.scales.clone()),
            tol: factor.tol,
            resolution: factor.resolution,
            compact: factor.compact,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn diameter(&self) -> f64 {
        self.diam
    }

    /// Distance from `x` to its nearest other sample point.
    pub fn nearest_gap(&self, x: usize) -> f64 {
        self.nn[x]
    }

    pub fn coords(&self, x: usize) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Coords { dim, data, .. } => Some(&data[x * dim..(x + 1) * dim]),
            _ => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.geometry {
            Geometry::Coords { dim, .. } => Some(*dim),
            _ => None,
        }
    }

    /// Components of a point of a power sample.
    pub fn components(&self, x: usize) -> Option<Vec<usize>> {
        match &self.geometry {
            Geometry::Power { factor, k } => {
                let m = factor.n;
                let mut out = vec![0; *k];
                let mut r = x;
                for slot in out.iter_mut().rev() {
                    *slot = r % m;
                    r /= m;
                }
                Some(out)
            }
            _ => None,
        }
    }

    pub fn dist(&self, x: usize, y: usize) -> f64 {
        match &self.geometry {
            Geometry::Coords { dim, data, kind } => coord_dist(
                *kind,
                &data[x * dim..(x + 1) * dim],
                &data[y * dim..(y + 1) * dim],
            ),
            Geometry::Matrix { data } => data[x * self.n + y],
            Geometry::Power { factor, k } => {
                let m = factor.n;
                let (mut a, mut b) = (x, y);
                let mut d: f64 = 0.0;
                for _ in 0..*k {
                    d = d.max(factor.dist(a % m, b % m));
                    a /= m;
                    b /= m;
                }
                d
            }
        }
    }

    /// Distance from sample point `x` to arbitrary coordinates `q`.
    pub fn dist_to(&self, x: usize, q: &[f64]) -> Result<f64> {
        match &self.geometry {
            Geometry::Coords { dim, data, kind } => {
                if q.len() != *dim {
                    return Err(Error::SizeMismatch {
                        left: *dim,
                        right: q.len(),
                    });
                }
                Ok(coord_dist(*kind, &data[x * dim..(x + 1) * dim], q))
            }
            _ => Err(Error::Unsupported(
                "coordinates on a sample without coordinates".into(),
            )),
        }
    }

    pub fn coord_dist(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        match &self.geometry {
            Geometry::Coords { kind, .. } => Ok(coord_dist(*kind, a, b)),
            _ => Err(Error::Unsupported(
                "coordinates on a sample without coordinates".into(),
            )),
        }
    }

    /// Nearest sample point to `q` and its distance. Ties go to the point with
    /// lexicographically smaller coordinates.
    pub fn snap(&self, q: &[f64]) -> Result<(usize, f64)> {
        let dim = self.dim().ok_or_else(|| {
            Error::Unsupported("snapping needs a coordinate sample".into())
        })?;
        if q.len() != dim {
            return Err(Error::SizeMismatch {
                left: dim,
                right: q.len(),
            });
        }
        let emb: Vec<f64> = match &self.geometry {
            Geometry::Coords {
                kind: CoordMetric::Cubic,
                ..
            } => vec![q[0].powi(3)],
            _ => q.to_vec(),
        };
        let (i, _) = self
            .index
            .as_ref()
            .and_then(|ix| ix.nearest(&emb))
            .ok_or(Error::EmptySet)?;
        Ok((i, self.dist_to(i, q)?))
    }

    /// Closed balls `{y : d(x, y) <= r + tol}` for every `x`, cached per radius.
    pub fn balls(&self, r: f64) -> Arc<Vec<PointSet>> {
        let key = r.to_bits();
        if let Some(b) = self.balls.lock().unwrap().get(&key) {
            return b.clone();
        }
        let lim = r + self.tol;
        let b: Vec<PointSet> = (0..self.n)
            .into_par_iter()
            .map(|x| PointSet::from_indices(self.n, (0..self.n).filter(|&y| self.dist(x, y) <= lim)))
            .collect();
        let b = Arc::new(b);
        self.balls.lock().unwrap().insert(key, b.clone());
        b
    }

    pub fn ball(&self, x: usize, r: f64) -> PointSet {
        self.balls(r)[x].clone()
    }

    /// `x` together with its nearest neighbours (ties included). These points
    /// stand in for sequences converging to `x` at the sample resolution.
    pub fn approach_set(&self, x: usize) -> PointSet {
        let lim = self.nn[x] + self.tol;
        PointSet::from_indices(self.n, (0..self.n).filter(|&y| self.dist(x, y) <= lim))
    }

    /// `{y : d(y, A) <= eps}`.
    pub fn eps_closure(&self, a: &PointSet, eps: f64) -> Result<PointSet> {
        if a.universe() != self.n {
            return Err(Error::SizeMismatch {
                left: a.universe(),
                right: self.n,
            });
        }
        if a.is_empty() {
            return Err(Error::EmptySet);
        }
        if !(eps > 0.0) {
            return Err(Error::BadParameter(format!("scale {eps} is not positive")));
        }
        Ok(self.eps_closure_of(a, eps))
    }

    pub(crate) fn eps_closure_of(&self, a: &PointSet, eps: f64) -> PointSet {
        let balls = self.balls(eps);
        let mut out = PointSet::empty(self.n);
        for x in a {
            out.union_with(&balls[x]);
        }
        out
    }

    /// `d(x, A) = min_{a in A} d(x, a)`.
    pub fn dist_to_set(&self, x: usize, a: &PointSet) -> f64 {
        a.iter().map(|y| self.dist(x, y)).fold(f64::INFINITY, f64::min)
    }

    /// Hausdorff distance between two non-empty point sets.
    pub fn hausdorff_distance(&self, a: &PointSet, b: &PointSet) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        let ab = a.iter().map(|x| self.dist_to_set(x, b)).fold(0.0, f64::max);
        let ba = b.iter().map(|y| self.dist_to_set(y, a)).fold(0.0, f64::max);
        Ok(ab.max(ba))
    }

    /// Index of `eps` in the ladder.
    pub fn scale_index(&self, eps: f64) -> Result<usize> {
        self.scales
            .iter()
            .position(|&s| (s - eps).abs() <= 1e-12 * s.max(1.0))
            .ok_or(Error::ScaleNotInLadder(eps))
    }

    /// Ladder scales at which sampled verdicts are trusted: at or above both
    /// the declared resolution and `floor`.
    pub fn verdict_scales(&self, floor: f64) -> Vec<f64> {
        let lo = self.resolution.max(floor);
        self.scales.iter().copied().filter(|&s| s >= lo).collect()
    }
}

fn validate_matrix(n: usize, d: &[f64], tol: f64) -> Result<()> {
    if n > MATRIX_VALIDATION_BOUND {
        return Err(Error::BudgetExceeded(format!(
            "triangle validation of a {n}-point matrix"
        )));
    }
    for i in 0..n {
        if d[i * n + i].abs() > tol {
            return Err(Error::InvalidMetric(format!("non-zero diagonal at {i}")));
        }
        for j in 0..n {
            let v = d[i * n + j];
            if !v.is_finite() || v < -tol {
                return Err(Error::InvalidMetric(format!("bad distance at ({i}, {j})")));
            }
            if (v - d[j * n + i]).abs() > tol {
                return Err(Error::InvalidMetric(format!("asymmetric at ({i}, {j})")));
            }
            if i != j && v <= tol {
                return Err(Error::InvalidMetric(format!(
                    "distinct points {i} and {j} at distance zero"
                )));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i * n + k] > d[i * n + j] + d[j * n + k] + tol {
                    return Err(Error::InvalidMetric(format!(
                        "triangle inequality fails at ({i}, {j}, {k})"
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(xs: &[f64]) -> MetricSample {
        SampleSpec::coords(1, xs.to_vec(), CoordMetric::Euclidean)
            .build()
            .unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let m = line(&[0.0, 1.0, 3.0]);
        let a = PointSet::from_indices(3, [0, 1]);
        assert_eq!(m.hausdorff_distance(&a, &a).unwrap(), 0.0);
        let s0 = PointSet::singleton(3, 0);
        let s3 = PointSet::singleton(3, 2);
        assert_eq!(m.hausdorff_distance(&s0, &s3).unwrap(), 3.0);
        assert_eq!(m.hausdorff_distance(&a, &s0).unwrap(), 1.0);
        assert_eq!(
            m.hausdorff_distance(&PointSet::empty(3), &s0),
            Err(Error::EmptySet)
        );
    }

    #[test]
    fn eps_closure_examples() {
        let m = line(&[0.0, 0.5, 2.0]);
        let a = PointSet::singleton(3, 0);
        assert_eq!(m.eps_closure(&a, 1.0).unwrap().to_vec(), vec![0, 1]);
        assert_eq!(m.eps_closure(&a, 0.1).unwrap(), a);
        assert!(m.eps_closure(&a, 2.0).unwrap().is_full());
        assert_eq!(m.eps_closure(&PointSet::empty(3), 1.0), Err(Error::EmptySet));
    }

    #[test]
    fn ladder_defaults_and_validation() {
        let m = line(&[0.0, 1.0]);
        assert_eq!(m.scales().len(), 9);
        assert_eq!(m.scales()[0], 0.25);
        assert_eq!(m.scale_index(1.0 / 1024.0).unwrap(), 8);
        assert!(matches!(m.scale_index(0.3), Err(Error::ScaleNotInLadder(_))));
        let bad = SampleSpec::coords(1, vec![0.0, 1.0], CoordMetric::Euclidean)
            .scales(vec![0.1, 0.2])
            .build();
        assert!(matches!(bad, Err(Error::InvalidMetric(_))));
    }

    #[test]
    fn matrix_validation() {
        let ok = SampleSpec::matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap().build();
        assert!(ok.is_ok());
        let tri = SampleSpec::matrix(&[
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap()
        .build();
        assert!(matches!(tri, Err(Error::InvalidMetric(_))));
        let asym = SampleSpec::matrix(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap().build();
        assert!(matches!(asym, Err(Error::InvalidMetric(_))));
    }

    #[test]
    fn torus_and_cubic_distances() {
        let t = SampleSpec::coords(2, vec![0.05, 0.5, 0.95, 0.5], CoordMetric::Torus { period: 1.0 })
            .build()
            .unwrap();
        assert!((t.dist(0, 1) - 0.1).abs() < 1e-12);
        let c = SampleSpec::coords(1, vec![1.0, 2.0], CoordMetric::Cubic).build().unwrap();
        assert_eq!(c.dist(0, 1), 7.0);
    }

    #[test]
    fn power_sample_uses_max_metric() {
        let base = Arc::new(line(&[0.0, 1.0, 3.0]));
        let p = MetricSample::power(&base, 2).unwrap();
        assert_eq!(p.len(), 9);
        // (0, 1) vs (2, 1)
        assert_eq!(p.dist(1, 7), 3.0);
        assert_eq!(p.components(7), Some(vec![2, 1]));
        let big = Arc::new(line(&(0..100).map(f64::from).collect::<Vec<_>>()));
        assert!(matches!(MetricSample::power(&big, 2), Err(Error::SizeOverflow { .. })));
    }

    fn brute_nearest(m: &MetricSample, q: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for i in 0..m.len() {
            let d = m.dist_to(i, q).unwrap();
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    #[test]
    fn snap_breaks_ties_toward_smaller_coordinates() {
        let m = line(&[1.0, 0.0, 0.5]);
        assert_eq!(m.snap(&[0.25]).unwrap().0, 1);
        assert_eq!(m.snap(&[0.75]).unwrap().0, 2);
    }

    proptest! {
        #[test]
        fn hausdorff_is_a_metric_on_sets(
            xs in prop::collection::vec(-10.0f64..10.0, 3..12),
            ma in 1u64..4096, mb in 1u64..4096, mc in 1u64..4096,
        ) {
            let n = xs.len();
            let m = line(&xs);
            let mask = |v: u64| {
                let s = PointSet::from_indices(n, (0..n).filter(|i| v >> i & 1 == 1));
                if s.is_empty() { PointSet::singleton(n, 0) } else { s }
            };
            let (a, b, c) = (mask(ma), mask(mb), mask(mc));
            let ab = m.hausdorff_distance(&a, &b).unwrap();
            let ba = m.hausdorff_distance(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            let ac = m.hausdorff_distance(&a, &c).unwrap();
            let bc = m.hausdorff_distance(&b, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-9);
            let distinct_points = (0..n).all(|i| (0..n).all(|j| i == j || xs[i] != xs[j]));
            if distinct_points {
                prop_assert_eq!(ab == 0.0, a == b);
            }
        }

        #[test]
        fn snap_matches_linear_scan(
            pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..60),
            q in (-0.5f64..1.5, -0.5f64..1.5),
            torus in any::<bool>(),
        ) {
            let kind = if torus { CoordMetric::Torus { period: 1.0 } } else { CoordMetric::Euclidean };
            let data: Vec<f64> = pts.iter().flat_map(|p| [p.0, p.1]).collect();
            let m = SampleSpec::coords(2, data, kind).build().unwrap();
            let (i, d) = m.snap(&[q.0, q.1]).unwrap();
            let (_, bd) = brute_nearest(&m, &[q.0, q.1]);
            prop_assert!((d - bd).abs() < 1e-12, "index {} at {} vs {}", i, d, bd);
        }

        #[test]
        fn cubic_snap_matches_linear_scan(
            xs in prop::collection::vec(-5.0f64..5.0, 1..40),
            q in -6.0f64..6.0,
        ) {
            let m = SampleSpec::coords(1, xs, CoordMetric::Cubic).build().unwrap();
            let (_, d) = m.snap(&[q]).unwrap();
            let (_, bd) = brute_nearest(&m, &[q]);
            prop_assert!((d - bd).abs() <= 1e-9 * bd.max(1.0));
        }
    }
}
