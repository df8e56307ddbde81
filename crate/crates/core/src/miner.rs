//! Exhaustive scans of all small finite instances.
//!
//! A finite instance is a pair of pre-orders on `{0, .., n-1}`: one is the
//! specialization order of the space, the other defines the
//! semi-decomposition `F(y) = {x : x <= y}`. The scan evaluates every pair,
//! checks the implication table and tallies how often each converse fails.

use crate::error::{Error, Result};
use crate::props::finite::{evaluate, FiniteFacts, SpaceData};
use crate::props::implications::{evaluate_edge, Edge, Outcome};
use crate::props::{Certificate, Kind, Property, Witness};
use crate::semidec::SemiDecomposition;
use crate::spaces::FiniteSpace;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

/// Largest `n` that is ever enumerated.
pub const MAX_POINTS: usize = 5;
/// Largest `n` scanned without the `big` flag.
pub const DEFAULT_MAX_POINTS: usize = 4;

pub type Relation = Vec<Vec<bool>>;

/// All pre-orders on `n` labeled points. A pre-order on `k + 1` points is a
/// pre-order on the first `k` together with the down-set `D` and up-set `U`
/// of the new point, subject to `d <= u` for all `d` in `D`, `u` in `U`.
pub fn enumerate_preorders(n: usize) -> Result<Vec<Relation>> {
    if n > MAX_POINTS {
        return Err(Error::BudgetExceeded(format!(
            "enumeration is limited to {MAX_POINTS} points, asked for {n}"
        )));
    }
    let mut level: Vec<Relation> = vec![Vec::new()];
    for k in 0..n {
        let mut next = Vec::new();
        for r in &level {
            let down_sets: Vec<u32> = (0..1u32 << k)
                .filter(|&m| closed_under(r, m, |a, b| r[b][a]))
                .collect();
            let up_sets: Vec<u32> = (0..1u32 << k)
                .filter(|&m| closed_under(r, m, |a, b| r[a][b]))
                .collect();
            for &d in &down_sets {
                for &u in &up_sets {
                    let ok = (0..k)
                        .filter(|&a| d >> a & 1 == 1)
                        .all(|a| (0..k).filter(|&b| u >> b & 1 == 1).all(|b| r[a][b]));
                    if !ok {
                        continue;
                    }
                    let mut s: Relation = r
                        .iter()
                        .enumerate()
                        .map(|(a, row)| {
                            let mut row = row.clone();
                            row.push(d >> a & 1 == 1);
                            row
                        })
                        .collect();
                    let mut last: Vec<bool> = (0..k).map(|b| u >> b & 1 == 1).collect();
                    last.push(true);
                    s.push(last);
                    next.push(s);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// `m` contains every `b` with `rel(a, b)` for `a` in `m`.
fn closed_under(r: &Relation, m: u32, rel: impl Fn(usize, usize) -> bool) -> bool {
    let k = r.len();
    (0..k)
        .filter(|&a| m >> a & 1 == 1)
        .all(|a| (0..k).all(|b| !rel(a, b) || m >> b & 1 == 1))
}

fn bits(r: &Relation) -> Vec<bool> {
    r.iter().flatten().copied().collect()
}

/// Lexicographically least relabeling, for counting up to isomorphism.
pub fn canonical_form(r: &Relation) -> Vec<bool> {
    let n = r.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = bits(r);
    permutations(&mut perm, 0, &mut |p| {
        let relabeled: Vec<bool> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| r[p[i]][p[j]])
            .collect();
        if relabeled < best {
            best = relabeled;
        }
    });
    best
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

pub fn count_up_to_isomorphism(n: usize) -> Result<usize> {
    let mut forms: Vec<Vec<bool>> = enumerate_preorders(n)?.iter().map(canonical_form).collect();
    forms.sort();
    forms.dedup();
    Ok(forms.len())
}

fn rows(r: &Relation) -> Vec<String> {
    r.iter()
        .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
        .collect()
}

/// One scanned instance, by position in the enumeration and by its relations.
#[derive(Clone, Debug, Serialize)]
pub struct Found {
    pub space: usize,
    pub semidec: usize,
    /// Rows of the specialization order: `leq[x][y]` is `x <= y`.
    pub leq: Vec<String>,
    /// Rows of the semi-decomposition order.
    pub order: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EdgeTally {
    pub edge: String,
    pub holds: usize,
    pub vacuous: usize,
    pub violated: usize,
    pub guard_failed: usize,
    pub unknown: usize,
    /// Instances passing the guards where every conclusion holds but some premise fails.
    pub converse_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converse_witness: Option<Found>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Agreement {
    pub agree: usize,
    pub disagree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_disagreement: Option<Found>,
}

impl Agreement {
    fn tally(&mut self, same: bool, found: impl FnOnce() -> Found) {
        if same {
            self.agree += 1;
        } else {
            self.disagree += 1;
            if self.first_disagreement.is_none() {
                self.first_disagreement = Some(found());
            }
        }
    }

    fn merge(&mut self, o: Agreement) {
        self.agree += o.agree;
        self.disagree += o.disagree;
        if self.first_disagreement.is_none() {
            self.first_disagreement = o.first_disagreement;
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropertyCount {
    #[serde(rename = "true")]
    pub holds: usize,
    #[serde(rename = "false")]
    pub fails: usize,
    pub not_applicable: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub instances: usize,
    pub properties: BTreeMap<Property, PropertyCount>,
    /// Instances whose space (or semi-decomposition) has the flag.
    pub flags: BTreeMap<String, usize>,
    /// Per flag, instances with that flag on which each property holds.
    pub by_flag: BTreeMap<String, BTreeMap<Property, usize>>,
}

impl Counts {
    fn merge(&mut self, o: Counts) {
        self.instances += o.instances;
        for (p, c) in o.properties {
            let e = self.properties.entry(p).or_default();
            e.holds += c.holds;
            e.fails += c.fails;
            e.not_applicable += c.not_applicable;
        }
        for (f, c) in o.flags {
            *self.flags.entry(f).or_default() += c;
        }
        for (f, m) in o.by_flag {
            let e = self.by_flag.entry(f).or_default();
            for (p, c) in m {
                *e.entry(p).or_default() += c;
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub n: usize,
    pub preorders: usize,
    pub pairs: usize,
    pub violations: Vec<Found>,
    pub edges: Vec<EdgeTally>,
    /// Down-set test against closedness in the product space.
    pub r_closed_routes: Agreement,
    /// Minimality form of pointwise almost periodicity against symmetry of `R`.
    pub pap_forms: Agreement,
    /// Characteristic 0 against R-closedness on non-Hausdorff spaces.
    pub char_zero_vs_r_closed_non_hausdorff: Agreement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pap_not_wap: Option<Found>,
    pub counts: Counts,
}

impl ScanReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub n: usize,
    /// Allow `n = MAX_POINTS`.
    pub big: bool,
    pub budget: Option<Duration>,
    pub edges: &'static [Edge],
}

impl ScanOptions {
    pub fn new(n: usize) -> Self {
        ScanOptions {
            n,
            big: false,
            budget: None,
            edges: crate::props::EDGES,
        }
    }
}

struct Partial {
    pairs: usize,
    violations: Vec<Found>,
    edges: Vec<EdgeTally>,
    r_routes: Agreement,
    pap_forms: Agreement,
    char0_nh: Agreement,
    pap_not_wap: Option<Found>,
    counts: Counts,
}

const FLAGS: [&str; 5] = ["t0", "hausdorff", "t3", "normal", "decomposition"];

fn scan_space(
    i: usize,
    pre: &[Relation],
    sds: &[SemiDecomposition],
    edges: &'static [Edge],
) -> Result<Partial> {
    let data = SpaceData::new(FiniteSpace::new(&pre[i])?);
    let mut part = Partial {
        pairs: 0,
        violations: Vec::new(),
        edges: edges
            .iter()
            .map(|e| EdgeTally {
                edge: e.name.into(),
                ..Default::default()
            })
            .collect(),
        r_routes: Agreement::default(),
        pap_forms: Agreement::default(),
        char0_nh: Agreement::default(),
        pap_not_wap: None,
        counts: Counts::default(),
    };
    for (j, sd) in sds.iter().enumerate() {
        part.pairs += 1;
        let found = |certificate: Option<Certificate>, note: Option<String>| Found {
            space: i,
            semidec: j,
            leq: rows(&pre[i]),
            order: rows(&pre[j]),
            certificate,
            note,
        };
        let facts: FiniteFacts = match evaluate(&data, sd, true) {
            Ok(f) => f,
            Err(Error::InternalDisagreement(msg)) => {
                let target = if msg.starts_with("down-set") {
                    &mut part.r_routes
                } else {
                    &mut part.pap_forms
                };
                target.tally(false, || found(None, Some(msg.clone())));
                part.violations.push(found(None, Some(msg)));
                continue;
            }
            Err(e) => return Err(e),
        };
        let v = &facts.values;
        if let Some(sq) = facts.r_closed_square {
            part.r_routes.tally(v.get(Property::RClosed) == Some(sq), || {
                found(None, Some(format!("square route says {sq}")))
            });
        }
        let pap = v.get(Property::PointwiseAp);
        part.pap_forms.tally(pap == Some(facts.symmetric), || {
            found(
                facts.certificates.iter().find(|c| c.property == Property::PointwiseAp).cloned(),
                Some(format!("minimality form {pap:?}, symmetric {}", facts.symmetric)),
            )
        });
        if !data.flags.hausdorff {
            part.char0_nh.tally(v.get(Property::CharZero) == v.get(Property::RClosed), || {
                found(
                    facts
                        .certificates
                        .iter()
                        .find(|c| matches!(c.property, Property::CharZero | Property::RClosed))
                        .cloned(),
                    None,
                )
            });
        }
        if pap == Some(true) && v.get(Property::WeaklyAp) == Some(false) && part.pap_not_wap.is_none() {
            part.pap_not_wap = Some(found(
                facts.certificates.iter().find(|c| c.property == Property::WeaklyAp).cloned(),
                None,
            ));
        }
        for (e, t) in edges.iter().zip(part.edges.iter_mut()) {
            match evaluate_edge(e, v, &facts.context) {
                Outcome::Vacuous => t.vacuous += 1,
                Outcome::Holds => t.holds += 1,
                Outcome::GuardFailed(_) => t.guard_failed += 1,
                Outcome::Unknown(_) => t.unknown += 1,
                Outcome::Violated(failed) => {
                    t.violated += 1;
                    let cert = Certificate {
                        property: failed[0],
                        kind: Kind::Exact,
                        scale: None,
                        witness: Witness::ImplicationViolated {
                            edge: e.name.into(),
                            failed,
                        },
                    };
                    part.violations.push(found(Some(cert), None));
                }
            }
            let guarded = e.guards.iter().all(|g| g.holds(&facts.context));
            let all = |ps: &[Property], want: bool| ps.iter().all(|&p| v.get(p) == Some(want));
            let premise_fails = e.premises.iter().any(|&p| v.get(p) == Some(false))
                && e.premises.iter().all(|&p| v.get(p).is_some());
            if guarded && all(e.conclusions, true) && premise_fails {
                t.converse_failures += 1;
                if t.converse_witness.is_none() {
                    let cert = e
                        .premises
                        .iter()
                        .find_map(|&p| facts.certificates.iter().find(|c| c.property == p))
                        .cloned();
                    t.converse_witness = Some(found(cert, None));
                }
            }
        }
        let c = &mut part.counts;
        c.instances += 1;
        let flags = [
            data.flags.t0,
            data.flags.hausdorff,
            data.flags.t3,
            data.flags.normal,
            facts.context.decomposition,
        ];
        for p in Property::ALL {
            let e = c.properties.entry(p).or_default();
            match v.get(p) {
                Some(true) => e.holds += 1,
                Some(false) => e.fails += 1,
                None => e.not_applicable += 1,
            }
        }
        for (name, on) in FLAGS.iter().zip(flags) {
            if !on {
                continue;
            }
            *c.flags.entry(name.to_string()).or_default() += 1;
            let m = c.by_flag.entry(name.to_string()).or_default();
            for p in Property::ALL {
                if v.get(p) == Some(true) {
                    *m.entry(p).or_default() += 1;
                }
            }
        }
    }
    Ok(part)
}

pub fn scan(opts: &ScanOptions) -> Result<ScanReport> {
    let n = opts.n;
    if n == 0 {
        return Err(Error::BadParameter("at least one point is needed".into()));
    }
    if n > MAX_POINTS || (n > DEFAULT_MAX_POINTS && !opts.big) {
        return Err(Error::BudgetExceeded(format!(
            "scanning {n} points needs {}",
            if n > MAX_POINTS {
                format!("n <= {MAX_POINTS}")
            } else {
                "the big flag".to_string()
            }
        )));
    }
    let start = Instant::now();
    let pre = enumerate_preorders(n)?;
    let sds: Vec<SemiDecomposition> = pre
        .iter()
        .map(|r| SemiDecomposition::from_preorder(r))
        .collect::<Result<_>>()?;
    let out_of_time = AtomicBool::new(false);
    let parts: Vec<Result<Partial>> = (0..pre.len())
        .into_par_iter()
        .map(|i| {
            if let Some(b) = opts.budget {
                if out_of_time.load(Ordering::Relaxed) || start.elapsed() > b {
                    out_of_time.store(true, Ordering::Relaxed);
                    return Err(Error::BudgetExceeded(format!(
                        "scan of {n} points exceeded {} ms",
                        b.as_millis()
                    )));
                }
            }
            scan_space(i, &pre, &sds, opts.edges)
        })
        .collect();
    let mut report = ScanReport {
        n,
        preorders: pre.len(),
        pairs: 0,
        violations: Vec::new(),
        edges: opts
            .edges
            .iter()
            .map(|e| EdgeTally {
                edge: e.name.into(),
                ..Default::default()
            })
            .collect(),
        r_closed_routes: Agreement::default(),
        pap_forms: Agreement::default(),
        char_zero_vs_r_closed_non_hausdorff: Agreement::default(),
        pap_not_wap: None,
        counts: Counts::default(),
    };
    for part in parts {
        let part = part?;
        report.pairs += part.pairs;
        report.violations.extend(part.violations);
        for (t, p) in report.edges.iter_mut().zip(part.edges) {
            t.holds += p.holds;
            t.vacuous += p.vacuous;
            t.violated += p.violated;
            t.guard_failed += p.guard_failed;
            t.unknown += p.unknown;
            t.converse_failures += p.converse_failures;
            if t.converse_witness.is_none() {
                t.converse_witness = p.converse_witness;
            }
        }
        report.r_closed_routes.merge(part.r_routes);
        report.pap_forms.merge(part.pap_forms);
        report.char_zero_vs_r_closed_non_hausdorff.merge(part.char0_nh);
        if report.pap_not_wap.is_none() {
            report.pap_not_wap = part.pap_not_wap;
        }
        report.counts.merge(part.counts);
    }
    Ok(report)
}

pub fn count_report(n: usize) -> Result<Counts> {
    Ok(scan(&ScanOptions::new(n))?.counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every reflexive matrix, filtered by transitivity.
    fn brute_force(n: usize) -> Vec<Relation> {
        let off: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .collect();
        let mut out = Vec::new();
        for mask in 0u64..1 << off.len() {
            let mut r = vec![vec![false; n]; n];
            for (i, row) in r.iter_mut().enumerate() {
                row[i] = true;
            }
            for (b, &(i, j)) in off.iter().enumerate() {
                r[i][j] = mask >> b & 1 == 1;
            }
            let transitive =
                (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(r[a][b] && r[b][c]) || r[a][c])));
            if transitive {
                out.push(r);
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for (n, want) in [(0, 1), (1, 1), (2, 4), (3, 29), (4, 355)] {
            let mut got = enumerate_preorders(n).unwrap();
            assert_eq!(got.len(), want, "n = {n}");
            let mut bf = brute_force(n);
            got.sort();
            bf.sort();
            assert_eq!(got, bf, "n = {n}");
        }
        assert!(matches!(enumerate_preorders(6), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn isomorphism_classes() {
        // non-homeomorphic topologies on n points
        let got: Vec<usize> = (1..=4).map(|n| count_up_to_isomorphism(n).unwrap()).collect();
        assert_eq!(got, vec![1, 3, 9, 33]);
    }

    #[test]
    fn single_point_has_every_property() {
        let r = scan(&ScanOptions::new(1)).unwrap();
        assert_eq!(r.pairs, 1);
        for (p, c) in &r.counts.properties {
            assert_eq!(c.fails, 0, "{p:?}");
        }
    }

    #[test]
    fn two_points_clean_and_minimal_count() {
        let r = scan(&ScanOptions::new(2)).unwrap();
        assert_eq!(r.pairs, 16);
        assert!(r.is_clean(), "{:?}", r.violations);
        // minimal: the closure of every element is the whole space; checked
        // against the definition on the relations directly
        let pre = enumerate_preorders(2).unwrap();
        let mut minimal = 0;
        let mut total = 0;
        for s in &pre {
            for f in &pre {
                let cl_full = (0..2).all(|x| {
                    (0..2).all(|y| (0..2).any(|z| f[z][x] && s[y][z]))
                });
                minimal += cl_full as usize;
                total += (0..2).all(|x| (0..2).all(|y| f[y][x])) as usize;
            }
        }
        assert_eq!(r.counts.properties[&Property::Minimal].holds, minimal);
        // total F is minimal but not the only minimal structure
        assert_eq!(total, 4);
        assert!(minimal > total);
    }

    #[test]
    fn scan_is_deterministic_and_guarded() {
        let a = serde_json::to_string(&scan(&ScanOptions::new(3)).unwrap()).unwrap();
        let b = serde_json::to_string(&scan(&ScanOptions::new(3)).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(matches!(scan(&ScanOptions::new(5)), Err(Error::BudgetExceeded(_))));
        assert!(matches!(scan(&ScanOptions::new(9)), Err(Error::BudgetExceeded(_))));
        let mut o = ScanOptions::new(3);
        o.budget = Some(Duration::ZERO);
        assert!(matches!(scan(&o), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn three_points() {
        let r = scan(&ScanOptions::new(3)).unwrap();
        assert_eq!(r.pairs, 841);
        assert_eq!(r.r_closed_routes.disagree, 0);
        // the only violations come from symmetric R without minimal closures
        for v in &r.violations {
            let Some(Certificate {
                witness: Witness::ImplicationViolated { edge, .. },
                ..
            }) = &v.certificate
            else {
                panic!("{v:?}")
            };
            assert_eq!(edge, "symmetric_r => pointwise_ap");
        }
        assert_eq!(r.violations.len(), r.pap_forms.disagree);
    }
}
