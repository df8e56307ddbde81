//! Moduli of (weak) equicontinuity over the scale ladder.
//!
//! `E(δ) = max { d(wx, wy) : d(x, y) <= δ, w a word }` and
//! `W(δ) = max { d_H(F(x), F(y)) : d(x, y) <= δ }`.

use crate::actions::MetricAction;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::spaces::MetricSample;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub delta: f64,
    pub value: f64,
    /// Number of pairs of distinct points within `delta`.
    pub pairs: usize,
    /// Pair attaining `value`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
}

/// Points sorted by increasing `delta`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusCurve {
    pub name: String,
    pub points: Vec<CurvePoint>,
}

impl ModulusCurve {
    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[0].delta < w[1].delta && w[0].value <= w[1].value)
            && self.points.iter().all(|p| p.value >= 0.0)
    }

    pub fn value_at(&self, delta: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| (p.delta - delta).abs() <= 1e-12 * delta.max(1.0))
            .map(|p| p.value)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("delta,value\n");
        for p in &self.points {
            s.push_str(&format!("{},{}\n", p.delta, p.value));
        }
        s
    }

    /// Verdict at target `eps`: some window `δ <= eps` containing a pair of
    /// distinct points has value at most `eps`. Without such a window the
    /// scale says nothing. On failure the finest informative window is
    /// returned as evidence.
    pub fn verdict(&self, eps: f64, tol: f64) -> (Option<bool>, Option<&CurvePoint>) {
        let windows: Vec<&CurvePoint> = self
            .points
            .iter()
            .filter(|p| p.delta <= eps + tol && p.pairs > 0)
            .collect();
        if windows.is_empty() {
            return (None, None);
        }
        if windows.iter().any(|p| p.value <= eps + tol) {
            (Some(true), None)
        } else {
            (Some(false), windows.first().copied())
        }
    }
}

fn ascending_ladder(m: &MetricSample) -> Vec<f64> {
    let mut l = m.scales().to_vec();
    l.reverse();
    l
}

/// Per-bucket best `(value, x, y, extra)`, merged into a cumulative curve.
fn assemble(
    name: &str,
    ladder: &[f64],
    buckets: Vec<(f64, usize, Option<(usize, usize, usize)>)>,
    word_name: impl Fn(usize) -> Option<String>,
) -> ModulusCurve {
    let mut points = Vec::with_capacity(ladder.len());
    let mut best: (f64, Option<(usize, usize, usize)>) = (0.0, None);
    let mut pairs = 0;
    for (k, &delta) in ladder.iter().enumerate() {
        let (v, c, arg) = buckets[k];
        pairs += c;
        if arg.is_some() && (v > best.0 || best.1.is_none()) {
            best = (v.max(best.0), arg);
        }
        points.push(CurvePoint {
            delta,
            value: best.0,
            pairs,
            argmax: best.1.map(|(x, y, _)| (x, y)),
            word: best.1.and_then(|(_, _, w)| word_name(w)),
        });
    }
    ModulusCurve {
        name: name.into(),
        points,
    }
}

/// Ladder bucket of a pair distance: first ascending scale covering it.
fn bucket(ladder: &[f64], d: f64, tol: f64) -> Option<usize> {
    ladder.iter().position(|&s| d <= s + tol)
}

/// Scans pairs `x < y` within the largest ladder scale in order, keeping
/// for each bucket the first pair attaining the maximum.
fn scan_pairs<F>(m: &MetricSample, ladder: &[f64], value: F) -> Vec<(f64, usize, Option<(usize, usize, usize)>)>
where
    F: Fn(usize, usize) -> (f64, usize) + Sync,
{
    let n = m.len();
    let tol = m.tol();
    let top = *ladder.last().unwrap();
    let balls = m.balls(top);
    let rows: Vec<Vec<(f64, usize, Option<(usize, usize, usize)>)>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut b = vec![(0.0, 0usize, None); ladder.len()];
            for y in balls[x].iter().filter(|&y| y > x) {
                let k = match bucket(ladder, m.dist(x, y), tol) {
                    Some(k) => k,
                    None => continue,
                };
                let (v, extra) = value(x, y);
                let e: &mut (f64, usize, Option<(usize, usize, usize)>) = &mut b[k];
                e.1 += 1;
                if e.2.is_none() || v > e.0 {
                    *e = (v, e.1, Some((x, y, extra)));
                }
            }
            b
        })
        .collect();
    let mut out = vec![(0.0, 0usize, None); ladder.len()];
    for row in rows {
        for (k, r) in row.into_iter().enumerate() {
            out[k].1 += r.1;
            if r.2.is_some() && (out[k].2.is_none() || r.0 > out[k].0) {
                out[k].0 = r.0;
                out[k].2 = r.2;
            }
        }
    }
    out
}

pub fn equicontinuity_modulus(action: &MetricAction) -> ModulusCurve {
    let m = action.sample();
    let n = m.len();
    let words = action.words().len();
    let ladder = ascending_ladder(m);
    // trajectory of each point across all words, stored contiguously
    let mut traj = vec![0u32; n * words];
    for w in 0..words {
        for (x, &i) in action.images(w).iter().enumerate() {
            traj[x * words + w] = i;
        }
    }
    let buckets = scan_pairs(m, &ladder, |x, y| {
        let tx = &traj[x * words..(x + 1) * words];
        let ty = &traj[y * words..(y + 1) * words];
        let mut best = (0.0, 0);
        for w in 0..words {
            let d = m.dist(tx[w] as usize, ty[w] as usize);
            if d > best.0 {
                best = (d, w);
            }
        }
        best
    });
    assemble("E", &ladder, buckets, |w| Some(action.words()[w].to_string()))
}

/// `d(a, S)` for every point `a`, exact. Each ladder ball around `a` is
/// tried in increasing order; the first one meeting `S` contains a nearest
/// point.
fn distances_to_set(m: &MetricSample, balls: &[Arc<Vec<PointSet>>], s: &PointSet) -> Vec<f64> {
    (0..m.len())
        .map(|a| {
            if s.contains(a) {
                return 0.0;
            }
            for b in balls {
                let hit = b[a].intersection(s);
                if !hit.is_empty() {
                    return hit.iter().map(|y| m.dist(a, y)).fold(f64::INFINITY, f64::min);
                }
            }
            m.dist_to_set(a, s)
        })
        .collect()
}

pub fn weak_equicontinuity_modulus(m: &MetricSample, sets: &[PointSet]) -> Result<ModulusCurve> {
    let n = m.len();
    if sets.len() != n {
        return Err(Error::SizeMismatch {
            left: sets.len(),
            right: n,
        });
    }
    if let Some(x) = sets.iter().position(|s| s.is_empty()) {
        return Err(Error::InvalidMetric(format!("empty set at point {x}")));
    }
    let ladder = ascending_ladder(m);
    let mut ids: HashMap<&PointSet, usize> = HashMap::new();
    let mut uniq: Vec<&PointSet> = Vec::new();
    let id_of: Vec<usize> = sets
        .iter()
        .map(|s| {
            *ids.entry(s).or_insert_with(|| {
                uniq.push(s);
                uniq.len() - 1
            })
        })
        .collect();
    let balls: Vec<_> = ladder.iter().map(|&r| m.balls(r)).collect();
    let dto: Vec<Vec<f64>> = uniq
        .par_iter()
        .map(|s| distances_to_set(m, &balls, s))
        .collect();
    let members: Vec<Vec<usize>> = uniq.iter().map(|s| s.to_vec()).collect();
    let buckets = scan_pairs(m, &ladder, |x, y| {
        let (u, v) = (id_of[x], id_of[y]);
        if u == v {
            return (0.0, 0);
        }
        let a = members[u].iter().map(|&p| dto[v][p]).fold(0.0, f64::max);
        let b = members[v].iter().map(|&q| dto[u][q]).fold(0.0, f64::max);
        (a.max(b), 0)
    });
    Ok(assemble("W", &ladder, buckets, |_| None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{ActionSpec, Generator};
    use crate::spaces::metric::{CoordMetric, SampleSpec};
    use proptest::prelude::*;

    fn line(data: Vec<f64>) -> Arc<MetricSample> {
        Arc::new(SampleSpec::coords(1, data, CoordMetric::Euclidean).build().unwrap())
    }

    /// Both curves straight from their definitions.
    fn brute(action: &MetricAction, sets: &[PointSet]) -> (Vec<f64>, Vec<f64>) {
        let m = action.sample();
        let n = m.len();
        let ladder = ascending_ladder(m);
        let mut e = Vec::new();
        let mut w = Vec::new();
        for &delta in &ladder {
            let mut ev: f64 = 0.0;
            let mut wv: f64 = 0.0;
            for x in 0..n {
                for y in 0..n {
                    if m.dist(x, y) > delta + m.tol() {
                        continue;
                    }
                    for k in 0..action.words().len() {
                        ev = ev.max(m.dist(action.image(k, x), action.image(k, y)));
                    }
                    wv = wv.max(m.hausdorff_distance(&sets[x], &sets[y]).unwrap());
                }
            }
            e.push(ev);
            w.push(wv);
        }
        (e, w)
    }

    #[test]
    fn identity_and_singletons() {
        let m = line((0..10).map(|i| i as f64 * 0.1).collect());
        let id: Vec<usize> = (0..10).collect();
        let a = MetricAction::new(m.clone(), ActionSpec::new(vec![Generator::Table(id)], 3)).unwrap();
        let e = equicontinuity_modulus(&a);
        let singles: Vec<PointSet> = (0..10).map(|x| PointSet::singleton(10, x)).collect();
        let w = weak_equicontinuity_modulus(&m, &singles).unwrap();
        for (pe, pw) in e.points.iter().zip(&w.points) {
            let expect = if pe.pairs == 0 { 0.0 } else { (pe.delta / 0.1 + 1e-9).floor() * 0.1 };
            assert!((pe.value - expect).abs() < 1e-9, "{pe:?}");
            assert!((pw.value - expect).abs() < 1e-9);
            assert!(pe.value <= pe.delta + 1e-9);
        }
    }

    #[test]
    fn verdict_needs_an_informative_window() {
        let c = ModulusCurve {
            name: "E".into(),
            points: vec![
                CurvePoint { delta: 0.1, value: 0.0, pairs: 0, argmax: None, word: None },
                CurvePoint { delta: 0.2, value: 0.5, pairs: 3, argmax: Some((0, 1)), word: None },
                CurvePoint { delta: 0.4, value: 0.5, pairs: 5, argmax: Some((0, 1)), word: None },
                CurvePoint { delta: 0.8, value: 0.5, pairs: 9, argmax: Some((0, 1)), word: None },
            ],
        };
        assert_eq!(c.verdict(0.1, 1e-9).0, None);
        let (v, at) = c.verdict(0.4, 1e-9);
        assert_eq!(v, Some(false));
        assert_eq!(at.unwrap().delta, 0.2);
        assert_eq!(c.verdict(0.8, 1e-9).0, Some(true));
        assert!(c.is_monotone());
        assert_eq!(c.to_csv().lines().next(), Some("delta,value"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn curves_match_definitions(
            pts in proptest::collection::vec(0.0f64..4.0, 3..12),
            table_seed in proptest::collection::vec(0usize..100, 12),
        ) {
            let n = pts.len();
            let m = line(pts);
            let g: Vec<usize> = table_seed[..n].iter().map(|s| s % n).collect();
            let a = MetricAction::new(m.clone(), ActionSpec::new(vec![Generator::Table(g)], 6)).unwrap();
            let orbits = a.orbits();
            let e = equicontinuity_modulus(&a);
            let w = weak_equicontinuity_modulus(&m, &orbits).unwrap();
            let (be, bw) = brute(&a, &orbits);
            prop_assert!(e.is_monotone() && w.is_monotone());
            for k in 0..be.len() {
                prop_assert!((e.points[k].value - be[k]).abs() < 1e-12);
                prop_assert!((w.points[k].value - bw[k]).abs() < 1e-12);
                prop_assert!(w.points[k].value <= e.points[k].value + 1e-12);
            }
        }
    }
}
