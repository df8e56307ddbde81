//! Proximal pairs.
//!
//! On a finite space `x ≠ y` are proximal when some semigroup element sends
//! them to points with a common point in their closures (a common limit of
//! the constant nets). On a sample, a pair at least `rho` apart is proximal
//! at scale `tau` when some word brings it within `tau`.

use super::finite::Check;
use super::Witness;
use crate::actions::{FiniteAction, MetricAction};
use crate::error::{Error, Result};
use crate::spaces::FiniteSpace;
use std::collections::HashMap;

pub fn finite_distal(action: &FiniteAction, s: &FiniteSpace, bound: usize) -> Result<Check> {
    if action.len() != s.len() {
        return Err(Error::SizeMismatch {
            left: action.len(),
            right: s.len(),
        });
    }
    let semigroup = action.semigroup(bound)?;
    let n = s.len();
    for x in 0..n {
        for y in x + 1..n {
            for g in &semigroup {
                if let Some(meet) = s.down(g[x]).intersection(s.down(g[y])).first() {
                    return Ok(Check::Fails(Witness::FiniteProximal {
                        x,
                        y,
                        map: g.clone(),
                        meet,
                    }));
                }
            }
        }
    }
    Ok(Check::Holds)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProximalPair {
    pub x: usize,
    pub y: usize,
    pub distance: f64,
    pub min_distance: f64,
    pub word: usize,
}

#[derive(Clone, Debug)]
pub struct DistalReport {
    pub tau: f64,
    pub rho: f64,
    /// Sorted by `min_distance / distance`, then by the pair.
    pub pairs: Vec<ProximalPair>,
}

impl DistalReport {
    pub fn distal(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn witness(&self, action: &MetricAction) -> Option<Witness> {
        self.pairs.first().map(|p| Witness::ProximalPair {
            x: p.x,
            y: p.y,
            word: action.words()[p.word].to_string(),
            distance: p.distance,
            min_distance: p.min_distance,
        })
    }
}

pub fn distal_report(action: &MetricAction, tau: f64, rho: f64) -> Result<DistalReport> {
    if !(tau > 0.0) || rho < 0.0 {
        return Err(Error::BadParameter(format!("tau {tau}, rho {rho}")));
    }
    let m = action.sample();
    let n = m.len();
    let near = m.balls(tau);
    let mut best: HashMap<(u32, u32), (f64, usize)> = HashMap::new();
    let mut pre: Vec<Vec<u32>> = vec![Vec::new(); n];
    for w in 0..action.words().len() {
        let img = action.images(w);
        for v in pre.iter_mut() {
            v.clear();
        }
        for (x, &i) in img.iter().enumerate() {
            pre[i as usize].push(x as u32);
        }
        for x in 0..n {
            let i = img[x] as usize;
            for j in &near[i] {
                let d_img = m.dist(i, j);
                if d_img >= tau {
                    continue;
                }
                for &y in &pre[j] {
                    if y as usize <= x {
                        continue;
                    }
                    let key = (x as u32, y);
                    if let Some(e) = best.get_mut(&key) {
                        if d_img < e.0 {
                            *e = (d_img, w);
                        }
                        continue;
                    }
                    if m.dist(x, y as usize) >= rho {
                        best.insert(key, (d_img, w));
                    }
                }
            }
        }
    }
    let mut pairs: Vec<ProximalPair> = best
        .into_iter()
        .map(|((x, y), (d, w))| ProximalPair {
            x: x as usize,
            y: y as usize,
            distance: m.dist(x as usize, y as usize),
            min_distance: d,
            word: w,
        })
        .collect();
    pairs.sort_by(|a, b| {
        (a.min_distance / a.distance)
            .total_cmp(&(b.min_distance / b.distance))
            .then((a.x, a.y).cmp(&(b.x, b.y)))
    });
    Ok(DistalReport { tau, rho, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{ActionSpec, Generator};
    use crate::spaces::finite::tests::all_preorders;
    use crate::spaces::metric::{CoordMetric, SampleSpec};
    use std::sync::Arc;

    #[test]
    fn two_point_machine_is_proximal() {
        let a = FiniteAction::new(2, vec![vec![0, 0]], false).unwrap();
        assert_eq!(
            finite_distal(&a, &FiniteSpace::discrete(2), 64).unwrap(),
            Check::Fails(Witness::FiniteProximal {
                x: 0,
                y: 1,
                map: vec![0, 0],
                meet: 0
            })
        );
    }

    #[test]
    fn permutations_of_discrete_spaces_are_distal() {
        let a = FiniteAction::new(4, vec![vec![1, 2, 3, 0], vec![1, 0, 2, 3]], true).unwrap();
        assert!(finite_distal(&a, &FiniteSpace::discrete(4), 64).unwrap().holds());
    }

    #[test]
    fn indiscrete_spaces_are_never_distal() {
        for s in all_preorders(3).into_iter().filter(|s| s.up(0).len() == 3 && s.down(0).len() == 3) {
            let a = FiniteAction::identity(3);
            assert!(!finite_distal(&a, &s, 64).unwrap().holds());
        }
    }

    fn line(points: usize) -> Arc<crate::spaces::MetricSample> {
        let data: Vec<f64> = (0..points).map(|i| i as f64).collect();
        Arc::new(SampleSpec::coords(1, data, CoordMetric::Euclidean).build().unwrap())
    }

    #[test]
    fn rotation_is_distal_and_collapse_is_not() {
        let m = line(8);
        let rot: Vec<usize> = (0..8).map(|i| (i + 1) % 8).collect();
        let a = MetricAction::new(m.clone(), ActionSpec::new(vec![Generator::Table(rot)], 8)).unwrap();
        assert!(distal_report(&a, 0.5, 1.0).unwrap().distal());

        let collapse: Vec<usize> = (0..8).map(|i| i / 2).collect();
        let a = MetricAction::new(m, ActionSpec::new(vec![Generator::Table(collapse)], 8)).unwrap();
        let r = distal_report(&a, 0.5, 1.0).unwrap();
        assert!(!r.distal());
        // (0, 1) collapses after one step; (0, 7) needs three
        assert_eq!((r.pairs[0].x, r.pairs[0].y), (0, 1));
        assert!(r.pairs.iter().any(|p| (p.x, p.y) == (0, 7)));
        assert!(r.pairs.iter().all(|p| p.min_distance == 0.0));
    }

    /// Minimum over words of `d(wx, wy)` pair by pair.
    #[test]
    fn agrees_with_pairwise_scan() {
        let m = line(9);
        let g: Vec<usize> = vec![0, 0, 1, 3, 5, 5, 6, 8, 8];
        let a = MetricAction::new(m.clone(), ActionSpec::new(vec![Generator::Table(g)], 6)).unwrap();
        for (tau, rho) in [(0.5, 1.0), (1.5, 2.0), (2.5, 1.0)] {
            let r = distal_report(&a, tau, rho).unwrap();
            let mut expect = Vec::new();
            for x in 0..9 {
                for y in x + 1..9 {
                    if m.dist(x, y) < rho {
                        continue;
                    }
                    let min = (0..a.words().len())
                        .map(|w| m.dist(a.image(w, x), a.image(w, y)))
                        .fold(f64::INFINITY, f64::min);
                    if min < tau {
                        expect.push((x, y, min));
                    }
                }
            }
            let mut got: Vec<(usize, usize, f64)> =
                r.pairs.iter().map(|p| (p.x, p.y, p.min_distance)).collect();
            got.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
            assert_eq!(got, expect);
        }
    }
}
