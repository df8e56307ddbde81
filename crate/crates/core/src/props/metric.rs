//! Verdicts on metric samples, stated at ladder scales.
//!
//! At scale `ε` the element closure of `x` is `cl1[x] = F(x)` thickened by
//! `ε`, and the pass conditions compare against `cl2[x]`, the thickening by
//! `c·ε` (`c` is the inflation, 2 by default). Convergence to `x` is read as
//! membership in the approach set of `x` (the point and its nearest
//! neighbours). Only ladder scales at or above the sample resolution and the
//! largest snap error are used; the summary is taken at the finest of them.

use super::distal::distal_report;
use super::finite::Check;
use super::modulus::{equicontinuity_modulus, weak_equicontinuity_modulus, ModulusCurve};
use super::{
    Backend, Certificate, Context, Kind, Property, PropertyProfile, ScaleVerdict, Verdict, Witness,
};
use crate::actions::{Generator, MetricAction};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::semidec::is_partition_family;
use crate::spaces::{MetricSample, SeparationFlags};
use std::collections::{HashMap, HashSet};

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleConfig {
    pub inflation: f64,
    /// Proximality tolerance; the seventh ladder scale when unset.
    pub tau: Option<f64>,
    /// Separation floor for proximal pairs; `2·tau` when unset.
    pub rho: Option<f64>,
    /// Smallest power counted as a return.
    pub burn: usize,
    pub moduli: bool,
    /// Extra lower bound on the verdict window.
    pub floor: f64,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        ScaleConfig {
            inflation: 2.0,
            tau: None,
            rho: None,
            burn: 1,
            moduli: true,
            floor: 0.0,
        }
    }
}

/// Ladder scales (descending) at which sampled verdicts are trusted.
pub fn window(m: &MetricSample, snap: f64, floor: f64) -> Vec<f64> {
    let lo = m.resolution().max(snap).max(floor);
    m.scales()
        .iter()
        .copied()
        .filter(|&s| s >= lo - m.tol())
        .collect()
}

pub fn default_tau(m: &MetricSample) -> f64 {
    let l = m.scales();
    l[6.min(l.len() - 1)]
}

/// The sets of a semi-decomposition on a sample, grouped by equality, with
/// the approach set of every point.
pub struct SampleSets<'a> {
    pub m: &'a MetricSample,
    pub sets: &'a [PointSet],
    pub id: Vec<usize>,
    pub uniq: Vec<PointSet>,
    pub approach: Vec<PointSet>,
}

impl<'a> SampleSets<'a> {
    pub fn new(m: &'a MetricSample, sets: &'a [PointSet]) -> Result<Self> {
        if sets.len() != m.len() {
            return Err(Error::SizeMismatch {
                left: sets.len(),
                right: m.len(),
            });
        }
        let mut ids: HashMap<&PointSet, usize> = HashMap::new();
        let mut uniq = Vec::new();
        let mut id = Vec::with_capacity(sets.len());
        for s in sets {
            if s.universe() != m.len() || s.is_empty() {
                return Err(Error::InvalidMetric("set outside the sample or empty".into()));
            }
            let k = *ids.entry(s).or_insert_with(|| {
                uniq.push(s.clone());
                uniq.len() - 1
            });
            id.push(k);
        }
        let approach = (0..m.len()).map(|x| m.approach_set(x)).collect();
        Ok(SampleSets {
            m,
            sets,
            id,
            uniq,
            approach,
        })
    }

    pub fn at(&self, eps: f64, inflation: f64) -> Closures {
        let cl1: Vec<PointSet> = self.uniq.iter().map(|s| self.m.eps_closure_of(s, eps)).collect();
        let cl2 = self
            .uniq
            .iter()
            .map(|s| self.m.eps_closure_of(s, inflation * eps))
            .collect();
        let mut cid: HashMap<&PointSet, usize> = HashMap::new();
        let mut cl_id = Vec::with_capacity(cl1.len());
        for c in &cl1 {
            let k = cid.len();
            cl_id.push(*cid.entry(c).or_insert(k));
        }
        Closures {
            eps,
            inflation,
            cl_id,
            cl1,
            cl2,
        }
    }
}

/// Thickened closures at one scale, indexed by set id.
pub struct Closures {
    pub eps: f64,
    pub inflation: f64,
    /// Ids of distinct `cl1` sets.
    cl_id: Vec<usize>,
    pub cl1: Vec<PointSet>,
    pub cl2: Vec<PointSet>,
}

impl SampleSets<'_> {
    fn cl1<'c>(&self, c: &'c Closures, x: usize) -> &'c PointSet {
        &c.cl1[self.id[x]]
    }

    fn cl2<'c>(&self, c: &'c Closures, x: usize) -> &'c PointSet {
        &c.cl2[self.id[x]]
    }

    /// Prolongation at scale: thickened sets of the points approaching `x`
    /// stay inside the inflated closure of `x`.
    pub fn char_zero(&self, c: &Closures) -> Check {
        for x in 0..self.m.len() {
            let mut d = PointSet::empty(self.m.len());
            for a in &self.approach[x] {
                d.union_with(self.cl1(c, a));
            }
            if let Some(y) = d.first_outside(self.cl2(c, x)) {
                return Check::Fails(Witness::ProlongationExcess { x, y });
            }
        }
        Check::Holds
    }

    /// Pairs `(near_x, near_y)` of the relation with `near_x` approaching
    /// `x`; every `y` within the scale of `near_y` must lie in the inflated
    /// closure of `x`.
    pub fn r_closed(&self, c: &Closures) -> Check {
        let balls = self.m.balls(c.eps);
        for x in 0..self.m.len() {
            let (c1, c2) = (self.cl1(c, x), self.cl2(c, x));
            for near_x in &self.approach[x] {
                for near_y in &self.sets[near_x] {
                    if c1.contains(near_y) {
                        continue;
                    }
                    if let Some(y) = balls[near_y].first_outside(c2) {
                        return Check::Fails(Witness::REscapes { x, y, near_x, near_y });
                    }
                }
            }
        }
        Check::Holds
    }

    /// Nested closures: for `z ∈ cl1[x]`, `cl1[x] ⊆ cl2[z]`.
    pub fn pointwise_ap(&self, c: &Closures) -> Check {
        let mut rep = vec![usize::MAX; self.uniq.len()];
        for x in 0..self.m.len() {
            if rep[self.id[x]] == usize::MAX {
                rep[self.id[x]] = x;
            }
        }
        let mut done: HashSet<(usize, usize)> = HashSet::new();
        for (u, &x) in rep.iter().enumerate() {
            let l = &c.cl1[u];
            for z in l {
                if !done.insert((c.cl_id[u], self.id[z])) {
                    continue;
                }
                if let Some(differs_at) = l.first_outside(self.cl2(c, z)) {
                    return Check::Fails(Witness::ClosureNotMinimal { x, z, differs_at });
                }
            }
        }
        Check::Holds
    }

    pub fn symmetric_r(&self, c: &Closures) -> Check {
        for x in 0..self.m.len() {
            for y in self.cl1(c, x) {
                if !self.cl2(c, y).contains(x) {
                    return Check::Fails(Witness::AsymmetricPair { x, y });
                }
            }
        }
        Check::Holds
    }

    /// Closures of the points approaching the class of `x` stay inside the
    /// inflated closure of `x`.
    pub fn weakly_usc(&self, c: &Closures) -> Check {
        let n = self.m.len();
        let mut done = HashSet::new();
        for x in 0..n {
            if !done.insert(self.id[x]) {
                continue;
            }
            let mut near = PointSet::empty(n);
            for z in self.cl1(c, x) {
                near.union_with(&self.approach[z]);
            }
            let c2 = self.cl2(c, x);
            let mut seen = HashSet::new();
            for w in &near {
                if !seen.insert(self.id[w]) {
                    continue;
                }
                if let Some(escape) = self.cl1(c, w).first_outside(c2) {
                    return Check::Fails(Witness::UscAtScale { x, near: w, escape });
                }
            }
        }
        Check::Holds
    }

    pub fn minimal(&self, c: &Closures) -> Check {
        for x in 0..self.m.len() {
            if let Some(missing) = self.cl1(c, x).complement().first() {
                return Check::Fails(Witness::NotDense { x, missing });
            }
        }
        Check::Holds
    }

    pub fn r_total(&self, c: &Closures) -> Check {
        let n = self.m.len();
        for x in 0..n {
            let row = self.cl1(c, x);
            if let Some(y) = (0..n).find(|&y| !row.contains(y)) {
                return Check::Fails(Witness::NotTotal { x, y });
            }
        }
        Check::Holds
    }
}

/// Per-scale values of one property with the witness at each failing scale.
#[derive(Default)]
struct Track {
    per_scale: Vec<ScaleVerdict>,
    witnesses: Vec<(f64, Witness)>,
}

impl Track {
    fn push(&mut self, scale: f64, c: Check) {
        self.per_scale.push(ScaleVerdict {
            scale,
            value: Some(c.holds()),
        });
        if let Check::Fails(w) = c {
            self.witnesses.push((scale, w));
        }
    }

    fn push_value(&mut self, scale: f64, value: Option<bool>, w: Option<Witness>) {
        self.per_scale.push(ScaleVerdict { scale, value });
        if let (Some(false), Some(w)) = (value, w) {
            self.witnesses.push((scale, w));
        }
    }

    fn finish(self, p: Property, profile: &mut PropertyProfile) {
        let v = Verdict::at_scale(self.per_scale);
        if let (Some(false), Some(s)) = (v.value, v.scale) {
            if let Some((_, w)) = self.witnesses.iter().find(|(t, _)| *t == s) {
                profile.certificates.push(Certificate::at_scale(p, s, w.clone()));
            }
        }
        profile.put(p, v);
    }
}

fn power_of(word: &[u16]) -> i64 {
    word.iter().map(|&l| if l % 2 == 0 { 1 } else { -1 }).sum()
}

/// `(power, images)` for every available power of a single generator,
/// sorted by power. Tables are iterated directly so that periodic tables
/// keep all powers up to the depth.
pub fn power_images(action: &MetricAction) -> Result<Vec<(i64, Vec<u32>)>> {
    let spec = action.spec();
    if spec.generators.len() != 1 {
        return Err(Error::Unsupported("powers need a single generator".into()));
    }
    let n = action.len();
    let mut out = Vec::new();
    match &spec.generators[0] {
        Generator::Table(t) => {
            let mut inv = vec![0; n];
            if spec.inverses {
                for (x, &y) in t.iter().enumerate() {
                    inv[y] = x;
                }
            }
            let id: Vec<u32> = (0..n as u32).collect();
            out.push((0, id.clone()));
            let (mut fwd, mut bwd) = (id.clone(), id);
            for k in 1..=spec.depth as i64 {
                fwd = fwd.iter().map(|&y| t[y as usize] as u32).collect();
                out.push((k, fwd.clone()));
                if spec.inverses {
                    bwd = bwd.iter().map(|&y| inv[y as usize] as u32).collect();
                    out.push((-k, bwd.clone()));
                }
            }
        }
        Generator::Formula(_) => {
            for (w, word) in action.words().iter().enumerate() {
                out.push((power_of(&word.0), action.images(w).to_vec()));
            }
        }
    }
    out.sort_by_key(|(p, _)| *p);
    Ok(out)
}

/// Smallest `d(f^k x, x)` over `|k| >= burn`, per point.
pub fn min_returns(m: &MetricSample, powers: &[(i64, Vec<u32>)], burn: usize) -> Vec<f64> {
    (0..m.len())
        .map(|x| {
            powers
                .iter()
                .filter(|(p, _)| p.unsigned_abs() as usize >= burn.max(1))
                .map(|(_, img)| m.dist(img[x] as usize, x))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Least `k >= 1` such that `f^k x` is within `eps` of `x` and the shifted
/// forward orbit stays within `c·eps` of the orbit, or the smallest return
/// distance when there is none.
pub fn periodic_point(
    m: &MetricSample,
    forward: &[&[u32]],
    x: usize,
    eps: f64,
    inflation: f64,
) -> std::result::Result<usize, f64> {
    let tol = m.tol();
    let mut best = f64::INFINITY;
    for k in 1..forward.len() {
        let d = m.dist(forward[k][x] as usize, x);
        best = best.min(d);
        if d > eps + tol {
            continue;
        }
        let ok = (0..forward.len() - k)
            .all(|j| m.dist(forward[j + k][x] as usize, forward[j][x] as usize) <= inflation * eps + tol);
        if ok {
            return Ok(k);
        }
    }
    Err(best)
}

pub fn context_of(m: &MetricSample, sets: &[PointSet]) -> Context {
    Context {
        hausdorff: true,
        normal: true,
        t3: true,
        metrizable: true,
        compact_closures: m.is_compact(),
        decomposition: is_partition_family(sets),
    }
}

/// Profile of a semi-decomposition on a sample, and of the acting
/// semigroup when `action` is given (its orbits should be `sets`).
pub fn profile_metric(
    m: &MetricSample,
    sets: &[PointSet],
    action: Option<&MetricAction>,
    cfg: &ScaleConfig,
) -> Result<PropertyProfile> {
    if !(cfg.inflation >= 1.0) {
        return Err(Error::BadParameter(format!("inflation {} below 1", cfg.inflation)));
    }
    let ss = SampleSets::new(m, sets)?;
    let snap = action.map_or(0.0, |a| a.max_snap_error());
    let win = window(m, snap, cfg.floor);
    let mut profile = PropertyProfile::new(Backend::Metric, SeparationFlags::metrizable(), context_of(m, sets));
    profile.notes.push(format!("inflation {}", cfg.inflation));
    if let Some(a) = action {
        profile.notes.push(format!("max snap error {:.3e}", a.max_snap_error()));
        if a.is_truncated() {
            profile.notes.push("word enumeration truncated by the word budget".into());
        }
    }

    let set_props = [
        Property::RClosed,
        Property::CharZero,
        Property::PointwiseAp,
        Property::SymmetricR,
        Property::WeaklyAp,
        Property::Minimal,
        Property::WeaklyUscClasses,
        Property::RTotal,
    ];
    let mut tracks: HashMap<Property, Track> = set_props.iter().map(|&p| (p, Track::default())).collect();
    for &eps in &win {
        let c = ss.at(eps, cfg.inflation);
        let r = ss.r_closed(&c);
        let z = ss.char_zero(&c);
        let pap = ss.pointwise_ap(&c);
        let usc = ss.weakly_usc(&c);
        let wap = match (&pap, &usc) {
            (Check::Fails(_), _) => pap.clone(),
            (_, u) => u.clone(),
        };
        tracks.get_mut(&Property::RClosed).unwrap().push(eps, r);
        tracks.get_mut(&Property::CharZero).unwrap().push(eps, z);
        tracks.get_mut(&Property::PointwiseAp).unwrap().push(eps, pap);
        tracks.get_mut(&Property::SymmetricR).unwrap().push(eps, ss.symmetric_r(&c));
        tracks.get_mut(&Property::WeaklyAp).unwrap().push(eps, wap);
        tracks.get_mut(&Property::Minimal).unwrap().push(eps, ss.minimal(&c));
        tracks.get_mut(&Property::WeaklyUscClasses).unwrap().push(eps, usc);
        tracks.get_mut(&Property::RTotal).unwrap().push(eps, ss.r_total(&c));
    }
    for p in set_props {
        tracks.remove(&p).unwrap().finish(p, &mut profile);
    }
    if m.is_compact() {
        let v = profile.get(Property::WeaklyUscClasses).unwrap().clone();
        if let Some(c) = profile.certificate(Property::WeaklyUscClasses).cloned() {
            profile.certificates.push(Certificate {
                property: Property::UscClasses,
                ..c
            });
        }
        profile.put(Property::UscClasses, v);
    } else {
        profile.put(
            Property::UscClasses,
            Verdict::not_applicable(Kind::AtScale, "sample not declared compact"),
        );
    }
    profile.put(
        Property::ClassSpaceHausdorff,
        Verdict::not_applicable(Kind::AtScale, "class space is not sampled"),
    );
    profile.put(
        Property::RegularAction,
        Verdict::not_applicable(Kind::AtScale, "regularity needs a finite action"),
    );

    if cfg.moduli {
        let w = weak_equicontinuity_modulus(m, sets)?;
        modulus_verdict(&mut profile, Property::WeaklyEquicontinuous, &w, &win, m.tol(), None);
        profile.curves.push(w);
    } else {
        profile.put(
            Property::WeaklyEquicontinuous,
            Verdict::not_applicable(Kind::AtScale, "moduli not computed"),
        );
    }

    let Some(a) = action else {
        for p in [
            Property::Equicontinuous,
            Property::Distal,
            Property::PointwiseRecurrent,
            Property::PointwisePeriodic,
        ] {
            profile.put(p, Verdict::not_applicable(Kind::AtScale, "no action given"));
        }
        return Ok(profile);
    };

    if cfg.moduli {
        let e = equicontinuity_modulus(a);
        modulus_verdict(&mut profile, Property::Equicontinuous, &e, &win, m.tol(), Some(a));
        profile.curves.push(e);
    } else {
        profile.put(
            Property::Equicontinuous,
            Verdict::not_applicable(Kind::AtScale, "moduli not computed"),
        );
    }

    let tau = cfg.tau.unwrap_or_else(|| default_tau(m));
    let rho = cfg.rho.unwrap_or(2.0 * tau);
    let report = distal_report(a, tau, rho)?;
    let mut t = Track::default();
    t.push_value(tau, Some(report.distal()), report.witness(a));
    t.finish(Property::Distal, &mut profile);
    profile.notes.push(format!("distal: tau {tau}, rho {rho}, {} proximal pairs", report.pairs.len()));

    match power_images(a) {
        Ok(powers) => {
            let returns = min_returns(m, &powers, cfg.burn);
            let mut rec = Track::default();
            let forward: Vec<&[u32]> = powers
                .iter()
                .filter(|(p, _)| *p >= 0)
                .map(|(_, img)| img.as_slice())
                .collect();
            let mut per = Track::default();
            for &eps in &win {
                let bad = (0..m.len()).find(|&x| returns[x] > eps + m.tol());
                rec.push_value(
                    eps,
                    Some(bad.is_none()),
                    bad.map(|x| Witness::NotRecurrent {
                        x,
                        min_return: returns[x],
                    }),
                );
                let bad = (0..m.len()).find_map(|x| {
                    periodic_point(m, &forward, x, eps, cfg.inflation)
                        .err()
                        .map(|d| (x, d))
                });
                per.push_value(
                    eps,
                    Some(bad.is_none()),
                    bad.map(|(x, d)| Witness::NotPeriodic { x, min_return: d }),
                );
            }
            rec.finish(Property::PointwiseRecurrent, &mut profile);
            per.finish(Property::PointwisePeriodic, &mut profile);
        }
        Err(e) => {
            for p in [Property::PointwiseRecurrent, Property::PointwisePeriodic] {
                profile.put(p, Verdict::not_applicable(Kind::AtScale, e.to_string()));
            }
        }
    }
    Ok(profile)
}

fn modulus_verdict(
    profile: &mut PropertyProfile,
    p: Property,
    curve: &ModulusCurve,
    win: &[f64],
    tol: f64,
    action: Option<&MetricAction>,
) {
    let mut t = Track::default();
    for &eps in win {
        let (v, at) = curve.verdict(eps, tol);
        let w = at.and_then(|pt| {
            let (x, y) = pt.argmax?;
            Some(Witness::Modulus {
                curve: curve.name.clone(),
                delta: pt.delta,
                value: pt.value,
                x,
                y,
                word: if action.is_some() { pt.word.clone() } else { None },
            })
        });
        t.push_value(eps, v, w);
    }
    t.finish(p, profile);
}

/// R-closedness at scale `eps` for the diagonal action on the square of a
/// sample, without building the square. Requires a table action with at
/// most 64 words; the square has the max metric, so approach sets and
/// thickenings are products of balls.
pub fn square_r_closed(action: &MetricAction, eps: f64, inflation: f64) -> Result<Check> {
    let m = action.sample();
    let n = m.len();
    let words = action.words().len();
    if words > 64 {
        return Err(Error::Unsupported(format!("{words} words exceed the 64-word mask")));
    }
    let tol = m.tol();
    let b1 = m.balls(eps);
    // masks(r)[a][u]: words w with d(u, w a) <= r
    let masks = |r: f64| -> Vec<Vec<u64>> {
        let balls = m.balls(r);
        (0..n)
            .map(|a| {
                let mut mask = vec![0u64; n];
                for w in 0..words {
                    for u in &balls[action.image(w, a)] {
                        mask[u] |= 1 << w;
                    }
                }
                mask
            })
            .collect()
    };
    let (m1, m2) = (masks(eps), masks(inflation * eps));
    let approach: Vec<PointSet> = (0..n).map(|x| m.approach_set(x)).collect();
    for a in 0..n {
        for b in 0..n {
            let r = m.nearest_gap(a).min(m.nearest_gap(b));
            let na: Vec<usize> = approach[a].iter().filter(|&u| m.dist(a, u) <= r + tol).collect();
            let nb: Vec<usize> = approach[b].iter().filter(|&v| m.dist(b, v) <= r + tol).collect();
            for &a2 in &na {
                for &b2 in &nb {
                    for w2 in 0..words {
                        let (ya, yb) = (action.image(w2, a2), action.image(w2, b2));
                        if m1[a][ya] & m1[b][yb] != 0 {
                            continue;
                        }
                        for u in &b1[ya] {
                            for v in &b1[yb] {
                                if m2[a][u] & m2[b][v] == 0 {
                                    return Ok(Check::Fails(Witness::REscapes {
                                        x: a * n + b,
                                        y: u * n + v,
                                        near_x: a2 * n + b2,
                                        near_y: ya * n + yb,
                                    }));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Check::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::ActionSpec;
    use crate::spaces::metric::{CoordMetric, SampleSpec};
    use std::sync::Arc;

    fn line(data: Vec<f64>, resolution: f64) -> Arc<MetricSample> {
        Arc::new(
            SampleSpec::coords(1, data, CoordMetric::Euclidean)
                .resolution(resolution)
                .compact(true)
                .build()
                .unwrap(),
        )
    }

    #[test]
    fn window_respects_resolution_and_snap() {
        let m = line((0..=16).map(|i| i as f64 / 16.0).collect(), 0.05);
        let w = window(&m, 0.0, 0.0);
        assert!(w.iter().all(|&s| s >= 0.05));
        assert_eq!(w.len(), 3);
        assert_eq!(window(&m, 0.2, 0.0).len(), 1);
        assert!(window(&m, 0.3, 0.0).is_empty());
    }

    #[test]
    fn singletons_on_a_grid() {
        let m = line((0..=16).map(|i| i as f64 / 16.0).collect(), 1.0 / 16.0);
        let sets: Vec<PointSet> = (0..17).map(|x| PointSet::singleton(17, x)).collect();
        let p = profile_metric(&m, &sets, None, &ScaleConfig::default()).unwrap();
        assert_eq!(p.value(Property::RClosed), Some(true));
        assert_eq!(p.value(Property::CharZero), Some(true));
        assert_eq!(p.value(Property::PointwiseAp), Some(true));
        assert_eq!(p.value(Property::Minimal), Some(false));
        assert!(p.uncertified_failures().is_empty());
        assert!(p.get(Property::Distal).unwrap().value.is_none());
    }

    /// A fixed point whose neighbours have large orbits breaks R-closedness
    /// at every scale below the orbit size.
    #[test]
    fn fixed_point_among_moving_points() {
        let data: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let m = line(data, 0.05);
        // 10 fixed; every other point swaps with its mirror image
        let t: Vec<usize> = (0..=20).map(|i| if i == 10 { 10 } else { 20 - i }).collect();
        let a = MetricAction::new(m.clone(), ActionSpec::new(vec![Generator::Table(t)], 4)).unwrap();
        let sets = a.orbits();
        let cfg = ScaleConfig::default();
        let p = profile_metric(&m, &sets, Some(&a), &cfg).unwrap();
        let ss = SampleSets::new(&m, &sets).unwrap();
        // at scale 0.0625 the neighbours 9 and 11 share the orbit {9, 11}: still fine
        let c = ss.at(m.scales()[3], 2.0);
        assert_eq!(ss.r_closed(&c).holds(), ss.char_zero(&c).holds());
        assert!(p.uncertified_failures().is_empty());
        assert_eq!(p.value(Property::Distal), Some(true));
        assert_eq!(p.value(Property::PointwiseRecurrent), Some(true));
        assert_eq!(p.value(Property::PointwisePeriodic), Some(true));
    }

    #[test]
    fn collapse_is_not_pap() {
        let data: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let m = line(data, 0.125);
        let t: Vec<usize> = (0..=8).map(|i| i / 2).collect();
        let a = MetricAction::new(m.clone(), ActionSpec::new(vec![Generator::Table(t)], 8)).unwrap();
        let sets = a.orbits();
        let p = profile_metric(&m, &sets, Some(&a), &ScaleConfig::default()).unwrap();
        assert_eq!(p.value(Property::PointwiseAp), Some(false));
        assert_eq!(p.value(Property::WeaklyAp), Some(false));
        assert_eq!(p.value(Property::Distal), Some(false));
        assert!(p.uncertified_failures().is_empty());
        for c in &p.certificates {
            assert!(super::super::replay::replay_metric(&m, &sets, Some(&a), c, &ScaleConfig::default()).unwrap(), "{c:?}");
        }
    }

    #[test]
    fn routes_agree_on_random_tables() {
        let data: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).sin() * 2.0).collect();
        let m = line(data, 0.0);
        for seed in 0..40u64 {
            let t: Vec<usize> = (0..12).map(|i| ((i as u64 * 7 + seed * 13) % 12) as usize).collect();
            let t: Vec<usize> = t.iter().map(|&v| (v + seed as usize) % 12).collect();
            let a = MetricAction::new(m.clone(), ActionSpec::new(vec![Generator::Table(t)], 12)).unwrap();
            let sets = a.orbits();
            let ss = SampleSets::new(&m, &sets).unwrap();
            for &eps in m.scales() {
                let c = ss.at(eps, 2.0);
                assert_eq!(ss.r_closed(&c).holds(), ss.char_zero(&c).holds());
            }
        }
    }

    #[test]
    fn square_check_matches_materialised_square() {
        let data: Vec<f64> = vec![0.0, 0.1, 0.3, 0.35, 0.7, 1.0];
        let m = line(data, 0.0);
        for t in [vec![1, 2, 3, 4, 5, 0], vec![0, 2, 1, 4, 3, 5], vec![5, 4, 3, 2, 1, 0]] {
            let a = MetricAction::new(
                m.clone(),
                ActionSpec::new(vec![Generator::Table(t)], 8).inverses(true),
            )
            .unwrap();
            let sq = a.product_action(2).unwrap();
            let sets = sq.orbits();
            let ss = SampleSets::new(sq.sample(), &sets).unwrap();
            for &eps in m.scales() {
                let c = ss.at(eps, 2.0);
                let generic = ss.r_closed(&c).holds();
                let implicit = square_r_closed(&a, eps, 2.0).unwrap();
                assert_eq!(generic, implicit.holds(), "eps {eps}");
            }
        }
    }

    #[test]
    fn power_images_cover_all_powers() {
        let m = line((0..5).map(|i| i as f64).collect(), 0.0);
        let a = MetricAction::new(
            m,
            ActionSpec::new(vec![Generator::Table(vec![1, 2, 3, 4, 0])], 7).inverses(true),
        )
        .unwrap();
        let p = power_images(&a).unwrap();
        assert_eq!(p.len(), 15);
        assert_eq!(p[0].0, -7);
        assert_eq!(p[14].1[0], 2);
    }
}
