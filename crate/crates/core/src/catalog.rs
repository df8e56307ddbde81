//! Parameterized example systems with the profiles they are known to have.
//!
//! Every entry builds an [`Instance`] from named numeric parameters and
//! carries a tri-state expectation: a property is expected true, expected
//! false, or not listed (unclaimed).

use crate::actions::{ActionSpec, FiniteAction, Formula, Generator, MetricAction};
use crate::error::{Error, Result};
use crate::instance::{Body, Instance};
use crate::pointset::PointSet;
use crate::props::metric::{power_images, ScaleConfig};
use crate::props::{Property, PropertyProfile};
use crate::spaces::{CoordMetric, FiniteSpace, MetricSample, SampleSpec};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use Property::*;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Entry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Parameter names with default values.
    pub params: &'static [(&'static str, f64)],
    pub expected: &'static [(Property, bool)],
}

impl Entry {
    pub fn expected(&self, p: Property) -> Option<bool> {
        self.expected.iter().find(|(q, _)| *q == p).map(|(_, v)| *v)
    }

    pub fn default_param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

pub const ENTRIES: &[Entry] = &[
    Entry {
        name: "two_point_machine",
        summary: "discrete two-point space with f(0) = f(1) = 0",
        params: &[],
        expected: &[
            (Equicontinuous, true),
            (RClosed, true),
            (CharZero, true),
            (Distal, false),
            (PointwiseAp, false),
            (WeaklyAp, false),
            (RegularAction, true),
        ],
    },
    Entry {
        name: "contraction",
        summary: "x -> Cx on the sample {C^k} and 0 of [0, 1]",
        params: &[("C", 0.5), ("m", 64.0), ("depth", 80.0)],
        expected: &[
            (Equicontinuous, true),
            (Distal, false),
            (PointwiseAp, false),
            (WeaklyAp, false),
            (RClosed, true),
            (CharZero, true),
        ],
    },
    Entry {
        name: "toral_flow",
        summary: "time-dt map of the shear (x, y) -> (x, y + (2 + cos 2πx) t) on the torus",
        params: &[("grid", 32.0), ("dt", 0.01), ("depth", 400.0)],
        expected: &[
            (Distal, true),
            (RClosed, true),
            (PointwisePeriodic, true),
            (Equicontinuous, false),
            (WeaklyAp, true),
        ],
    },
    Entry {
        name: "time_one_toral_map",
        summary: "time-one map of the toral shear",
        params: &[("grid", 32.0), ("depth", 400.0)],
        expected: &[(RClosed, false)],
    },
    Entry {
        name: "sphere_flow",
        summary: "rotation of each latitude φ by sin²(φ) dt; poles and equator fixed",
        params: &[("lat_grid", 20.0), ("lon_grid", 36.0), ("dt", 1.0), ("depth", 400.0)],
        expected: &[
            (Distal, true),
            (RClosed, false),
            (PointwiseAp, true),
            (Equicontinuous, false),
        ],
    },
    Entry {
        name: "denjoy",
        summary: "endpoints of the intervals l_n = 1/(1+n²), |n| <= N, inserted along a rotation orbit",
        params: &[("N", 32.0), ("r", GOLDEN), ("depth", 0.0)],
        expected: &[
            (Minimal, true),
            (RClosed, true),
            (WeaklyAp, true),
            (Distal, false),
        ],
    },
    Entry {
        name: "cubic_metric_shift",
        summary: "x -> x + 2 on translated Cantor approximants with d(x, y) = |x³ - y³|",
        params: &[("level", 5.0), ("N", 8.0)],
        expected: &[(RClosed, true), (WeaklyEquicontinuous, false)],
    },
    Entry {
        name: "punctured_irrational_flow",
        summary: "irrational flow (1, θ) on the torus slowed to rest at one point",
        params: &[
            ("theta", GOLDEN),
            ("grid", 32.0),
            ("dt", 0.05),
            ("depth", 1200.0),
            ("power", 16.0),
            ("burn", 100.0),
        ],
        expected: &[(PointwiseRecurrent, true), (PointwiseAp, false)],
    },
];

pub fn lookup(name: &str) -> Result<&'static Entry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

/// A built entry with the scale configuration its expectations refer to.
#[derive(Clone, Debug)]
pub struct Built {
    pub instance: Instance,
    pub config: ScaleConfig,
}

/// Merged parameters: defaults overridden by `overrides`.
pub struct Params {
    entry: &'static str,
    values: BTreeMap<String, f64>,
}

impl Params {
    pub fn new(entry: &Entry, overrides: &BTreeMap<String, f64>) -> Result<Params> {
        let mut values: BTreeMap<String, f64> =
            entry.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in overrides {
            if !values.contains_key(k) {
                return Err(Error::BadParameter(format!("{} has no parameter {k}", entry.name)));
            }
            if !v.is_finite() {
                return Err(Error::BadParameter(format!("{k} = {v}")));
            }
            values.insert(k.clone(), *v);
        }
        Ok(Params {
            entry: entry.name,
            values,
        })
    }

    pub fn get(&self, k: &str) -> f64 {
        self.values[k]
    }

    fn count(&self, k: &str, lo: usize, hi: usize) -> Result<usize> {
        let v = self.get(k);
        if v.fract() != 0.0 || v < lo as f64 || v > hi as f64 {
            return Err(Error::BadParameter(format!(
                "{}: {k} must be an integer in [{lo}, {hi}], got {v}",
                self.entry
            )));
        }
        Ok(v as usize)
    }

    fn open_unit(&self, k: &str) -> Result<f64> {
        let v = self.get(k);
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::BadParameter(format!("{}: {k} must lie in (0, 1)", self.entry)));
        }
        Ok(v)
    }

    fn positive(&self, k: &str) -> Result<f64> {
        let v = self.get(k);
        if !(v > 0.0) {
            return Err(Error::BadParameter(format!("{}: {k} must be positive", self.entry)));
        }
        Ok(v)
    }
}

pub fn build(name: &str, overrides: &BTreeMap<String, f64>) -> Result<Built> {
    let entry = lookup(name)?;
    let p = Params::new(entry, overrides)?;
    let mut config = ScaleConfig::default();
    let instance = match name {
        "two_point_machine" => two_point_machine()?,
        "contraction" => contraction(p.open_unit("C")?, p.count("m", 2, 1024)?, p.count("depth", 1, 4096)?)?,
        "toral_flow" => toral_flow(
            p.count("grid", 16, 128)?,
            p.positive("dt")?,
            p.count("depth", 1, 4096)?,
            name,
        )?,
        "time_one_toral_map" => toral_flow(p.count("grid", 16, 128)?, 1.0, p.count("depth", 1, 4096)?, name)?,
        "sphere_flow" => sphere_flow(
            p.count("lat_grid", 16, 128)?,
            p.count("lon_grid", 16, 256)?,
            p.positive("dt")?,
            p.count("depth", 1, 4096)?,
        )?,
        "denjoy" => {
            let n = p.count("N", 8, 512)?;
            let depth = match p.count("depth", 0, 4096)? {
                0 => 3 * n,
                d => d,
            };
            denjoy(n, p.open_unit("r")?, depth)?
        }
        "cubic_metric_shift" => cubic_metric_shift(p.count("level", 0, 8)?, p.count("N", 1, 16)?)?,
        "punctured_irrational_flow" => {
            let grid = p.count("grid", 32, 128)?;
            config.burn = p.count("burn", 1, 4096)?;
            // returns compare two snapped positions, so one grid step is the
            // finest scale at which a return can be seen
            config.floor = 1.0 / grid as f64;
            punctured_irrational_flow(
                p.positive("theta")?,
                grid,
                p.positive("dt")?,
                p.count("depth", 1, 2047)?,
                p.positive("power")?,
            )?
        }
        _ => unreachable!("entry table and builders disagree"),
    };
    Ok(Built { instance, config })
}

/// Expected claims that the profile contradicts or leaves undecided.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub property: Property,
    pub expected: bool,
    pub got: Option<bool>,
}

pub fn compare(entry: &Entry, profile: &PropertyProfile) -> Vec<Mismatch> {
    entry
        .expected
        .iter()
        .filter_map(|&(p, want)| {
            let got = profile.value(p);
            (got != Some(want)).then_some(Mismatch {
                property: p,
                expected: want,
                got,
            })
        })
        .collect()
}

fn metric_instance(name: &str, sample: SampleSpec, spec: ActionSpec) -> Result<Instance> {
    let sample = Arc::new(sample.build()?);
    let action = MetricAction::new(sample.clone(), spec)?;
    let sets = action.orbits();
    Ok(Instance {
        name: name.to_string(),
        body: Body::Metric {
            sample,
            sets,
            action: Some(action),
        },
    })
}

pub fn two_point_machine() -> Result<Instance> {
    let action = FiniteAction::new(2, vec![vec![0, 0]], false)?;
    let sd = action.induced_semidec()?;
    Ok(Instance {
        name: "two_point_machine".into(),
        body: Body::Finite {
            space: FiniteSpace::discrete(2),
            sd,
            action: Some(action),
        },
    })
}

/// Sample `1, C, ..., C^(m-2), 0`.
pub fn contraction(c: f64, m: usize, depth: usize) -> Result<Instance> {
    let mut xs: Vec<f64> = (0..m - 1).map(|k| c.powi(k as i32)).collect();
    xs.push(0.0);
    let sample = SampleSpec::coords(1, xs, CoordMetric::Euclidean).compact(true);
    let f = Formula::with("scale", &[("factor", c)])?;
    metric_instance("contraction", sample, ActionSpec::new(vec![Generator::Formula(f)], depth))
}

fn torus_grid(grid: usize) -> Vec<f64> {
    let h = 1.0 / grid as f64;
    let mut data = Vec::with_capacity(2 * grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            data.push(i as f64 * h);
            data.push(j as f64 * h);
        }
    }
    data
}

/// Index of grid point `(i, j)` in [`torus_grid`] order.
pub fn torus_index(grid: usize, i: usize, j: usize) -> usize {
    (i % grid) * grid + j % grid
}

fn torus_sample(grid: usize) -> SampleSpec {
    SampleSpec::coords(2, torus_grid(grid), CoordMetric::Torus { period: 1.0 })
        .resolution(1.0 / (grid as f64 * 2f64.sqrt()))
        .compact(true)
}

pub fn toral_flow(grid: usize, dt: f64, depth: usize, name: &str) -> Result<Instance> {
    let f = Formula::with("toral_shear", &[("dt", dt)])?;
    metric_instance(name, torus_sample(grid), ActionSpec::new(vec![Generator::Formula(f)], depth))
}

/// First return of a point to within `2 * resolution` of itself under the
/// forward powers, after having left that ball, refined to the closest power
/// in that return episode. Returns the power.
pub fn first_return(action: &MetricAction, x: usize) -> Result<Option<usize>> {
    let m = action.sample();
    let thresh = 2.0 * m.resolution() + m.tol();
    let mut left = false;
    let mut best: Option<(usize, f64)> = None;
    for (k, img) in power_images(action)? {
        if k < 1 {
            continue;
        }
        let d = m.dist(img[x] as usize, x);
        if !left {
            left = d > thresh;
            continue;
        }
        match best {
            None if d <= thresh => best = Some((k as usize, d)),
            Some((_, bd)) if d <= thresh && d < bd => best = Some((k as usize, d)),
            Some(_) if d > thresh => break,
            _ => {}
        }
    }
    Ok(best.map(|(k, _)| k))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationWitness {
    pub p1: usize,
    pub p2: usize,
    pub power: usize,
    pub initial: f64,
    pub distance: f64,
}

/// A pair on neighbouring fibers `x = i/grid` and `(i+1)/grid` whose sampled
/// images separate by more than `bound`; the earliest power over all fibers.
pub fn toral_separation(action: &MetricAction, grid: usize, bound: f64) -> Result<Option<SeparationWitness>> {
    let m = action.sample();
    let powers = power_images(action)?;
    let mut best: Option<SeparationWitness> = None;
    for i in 0..grid {
        let (p1, p2) = (torus_index(grid, i, 0), torus_index(grid, i + 1, 0));
        for (k, img) in &powers {
            if *k < 1 || best.as_ref().map_or(false, |b| *k as usize >= b.power) {
                continue;
            }
            let d = m.dist(img[p1] as usize, img[p2] as usize);
            if d > bound + m.tol() {
                best = Some(SeparationWitness {
                    p1,
                    p2,
                    power: *k as usize,
                    initial: m.dist(p1, p2),
                    distance: d,
                });
                break;
            }
        }
    }
    Ok(best)
}

/// Latitudes `-π/2 + jπ/lat_grid`; ring `j` has `round(lon_grid cos φ)` points
/// (at least one) starting at longitude 0.
pub fn sphere_points(lat_grid: usize, lon_grid: usize) -> Vec<[f64; 3]> {
    let mut pts = Vec::new();
    for j in 0..=lat_grid {
        let phi = -PI / 2.0 + j as f64 * PI / lat_grid as f64;
        let count = ((lon_grid as f64 * phi.cos()).round() as usize).max(1);
        for i in 0..count {
            let th = TAU * i as f64 / count as f64;
            pts.push([phi.cos() * th.cos(), phi.cos() * th.sin(), phi.sin()]);
        }
    }
    pts
}

/// Chordal covering radius bound of [`sphere_points`]: half the latitude step
/// combined with half the widest longitude step.
fn sphere_resolution(lat_grid: usize, lon_grid: usize) -> f64 {
    let dlat = 2.0 * (PI / (4.0 * lat_grid as f64)).sin();
    let mut dlon: f64 = 0.0;
    for j in 0..=lat_grid {
        let phi = -PI / 2.0 + j as f64 * PI / lat_grid as f64;
        let count = ((lon_grid as f64 * phi.cos()).round() as usize).max(1);
        dlon = dlon.max(phi.cos().abs() * (PI / count as f64).sin());
    }
    (dlat * dlat + dlon * dlon).sqrt()
}

pub fn sphere_flow(lat_grid: usize, lon_grid: usize, dt: f64, depth: usize) -> Result<Instance> {
    let data: Vec<f64> = sphere_points(lat_grid, lon_grid).into_iter().flatten().collect();
    let sample = SampleSpec::coords(3, data, CoordMetric::Euclidean)
        .resolution(sphere_resolution(lat_grid, lon_grid))
        .compact(true);
    let f = Formula::with("sphere_twist", &[("dt", dt)])?;
    metric_instance("sphere_flow", sample, ActionSpec::new(vec![Generator::Formula(f)], depth))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquatorTerm {
    pub phi: f64,
    pub time: f64,
    pub x: [f64; 3],
    pub y: [f64; 3],
    /// Chordal distances of `x` to `e` and of `y` to `e'`.
    pub dx: f64,
    pub dy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquatorWitness {
    pub e: [f64; 3],
    pub e_prime: [f64; 3],
    pub terms: Vec<EquatorTerm>,
    /// Distance from `e'` to the orbit of `e` over the sampled times.
    pub gap: f64,
}

fn chord(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Pairs `(x_n, y_n)` with `y_n` on the orbit of `x_n` (latitude `φ_n = 2^-n`,
/// longitudes 0 and π), converging to the equator points `e = (1,0,0)` and
/// `e' = (-1,0,0)`. The equator is fixed, so `e'` is not in the closure of
/// the orbit of `e`.
pub fn equator_witness(terms: usize) -> Result<EquatorWitness> {
    let e = [1.0, 0.0, 0.0];
    let e_prime = [-1.0, 0.0, 0.0];
    let mut out = Vec::with_capacity(terms);
    for n in 1..=terms {
        let phi = 0.5f64.powi(n as i32);
        let time = PI / phi.sin().powi(2);
        let x = [phi.cos(), 0.0, phi.sin()];
        let yv = Formula::with("sphere_twist", &[("dt", time)])?.apply(&x);
        let y = [yv[0], yv[1], yv[2]];
        out.push(EquatorTerm {
            phi,
            time,
            dx: chord(&x, &e),
            dy: chord(&y, &e_prime),
            x,
            y,
        });
    }
    let mut gap = f64::INFINITY;
    for t in out.iter().map(|t| t.time).chain([1.0, 100.0]) {
        let img = Formula::with("sphere_twist", &[("dt", t)])?.apply(&e);
        gap = gap.min(chord(&img, &e_prime));
    }
    Ok(EquatorWitness {
        e,
        e_prime,
        terms: out,
        gap,
    })
}

pub fn interval_length(n: i64) -> f64 {
    1.0 / (1.0 + (n * n) as f64)
}

/// Endpoint layout of the truncated construction: point `2k` is the left
/// end of `I_n` and `2k + 1` its right end, with `k = n + N`. Returns the
/// coordinates and the circumference `1 + L_N`.
pub fn denjoy_points(n_max: usize, r: f64) -> (Vec<f64>, f64) {
    let nn = n_max as i64;
    let ids: Vec<i64> = (-nn..=nn).collect();
    let y: Vec<f64> = ids.iter().map(|&n| (n as f64 * r).rem_euclid(1.0)).collect();
    let total: f64 = ids.iter().map(|&n| interval_length(n)).sum();
    let mut xs = Vec::with_capacity(2 * ids.len());
    for (a, &n) in ids.iter().enumerate() {
        let before: f64 = ids
            .iter()
            .enumerate()
            .filter(|&(b, _)| y[b] < y[a])
            .map(|(_, &m)| interval_length(m))
            .sum();
        let left = y[a] + before;
        xs.push(left);
        xs.push(left + interval_length(n));
    }
    (xs, 1.0 + total)
}

pub fn denjoy_left(n_max: usize, n: i64) -> usize {
    2 * (n + n_max as i64) as usize
}

fn torus_dist(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

pub fn denjoy(n_max: usize, r: f64, depth: usize) -> Result<Instance> {
    let (xs, period) = denjoy_points(n_max, r);
    let k = 2 * n_max + 1;
    let lefts: Vec<f64> = xs.iter().step_by(2).copied().collect();
    let rights: Vec<f64> = xs.iter().skip(1).step_by(2).copied().collect();
    let one_sided = |a: &[f64], b: &[f64]| {
        a.iter()
            .map(|&p| b.iter().map(|&q| torus_dist(p, q, period)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let resolution = one_sided(&lefts, &rights).max(one_sided(&rights, &lefts));
    let table: Vec<usize> = (0..2 * k).map(|p| (p + 2) % (2 * k)).collect();
    let sample = SampleSpec::coords(1, xs, CoordMetric::Torus { period })
        .resolution(resolution)
        .compact(true);
    let spec = ActionSpec::new(vec![Generator::Table(table)], depth)
        .inverses(true)
        .invertible_only(true);
    metric_instance("denjoy", sample, spec)
}

/// Both endpoints of each of the `2^level` intervals of the ternary Cantor
/// construction, sorted.
pub fn cantor_endpoints(level: usize) -> Vec<f64> {
    let mut lefts = vec![0.0f64];
    for k in 1..=level {
        let w = 2.0 * 3f64.powi(-(k as i32));
        lefts = lefts.iter().flat_map(|&a| [a, a + w]).collect();
    }
    let w = 3f64.powi(-(level as i32));
    lefts.iter().flat_map(|&a| [a, a + w]).collect()
}

/// Index of Cantor endpoint `c` in copy `n` (`|n| <= N`).
pub fn cubic_index(level: usize, n_max: usize, n: i64, c: usize) -> usize {
    let per = 2usize << level;
    (n + n_max as i64) as usize * per + c
}

pub fn cubic_metric_shift(level: usize, n_max: usize) -> Result<Instance> {
    let cantor = cantor_endpoints(level);
    let per = cantor.len();
    let copies = 2 * n_max + 1;
    let mut xs = Vec::with_capacity(per * copies);
    for j in 0..copies {
        let shift = 2.0 * (j as f64 - n_max as f64);
        xs.extend(cantor.iter().map(|c| c + shift));
    }
    let table: Vec<usize> = (0..per * copies).map(|p| (p + per) % (per * copies)).collect();
    let far = (2 * n_max + 1) as f64;
    let resolution = 3.0 * far * far * 3f64.powi(-(level as i32)) / 2.0;
    let sample = SampleSpec::coords(1, xs, CoordMetric::Cubic).resolution(resolution);
    let spec = ActionSpec::new(vec![Generator::Table(table)], 2 * n_max)
        .inverses(true)
        .invertible_only(true);
    metric_instance("cubic_metric_shift", sample, spec)
}

/// Hausdorff distance between the orbits of `0` and `3^-level` in copy 0, for
/// truncation ranges `N = 1..=n_max`.
pub fn cubic_orbit_growth(level: usize, n_max: usize) -> Result<Vec<f64>> {
    (1..=n_max)
        .map(|n| {
            let inst = cubic_metric_shift(level, n)?;
            let Body::Metric { sample, sets, .. } = &inst.body else {
                unreachable!()
            };
            let (x, y) = (cubic_index(level, n, 0, 0), cubic_index(level, n, 0, 1));
            sample.hausdorff_distance(&sets[x], &sets[y])
        })
        .collect()
}

pub fn punctured_irrational_flow(theta: f64, grid: usize, dt: f64, depth: usize, power: f64) -> Result<Instance> {
    let f = Formula::with(
        "punctured_flow",
        &[("theta", theta), ("dt", dt), ("x0", 0.0), ("y0", 0.0), ("power", power)],
    )?;
    let spec = ActionSpec::new(vec![Generator::Formula(f)], depth).inverses(true);
    metric_instance("punctured_irrational_flow", torus_sample(grid), spec)
}

/// Largest distance from a sample point to `set`.
pub fn density_gap(m: &MetricSample, set: &PointSet) -> f64 {
    (0..m.len()).map(|x| m.dist_to_set(x, set)).fold(0.0, f64::max)
}
