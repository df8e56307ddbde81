//! Exact checkers on finite spaces.
//!
//! Every closure here is a down-closure. `R` has rows `cl F(x)`, and the
//! prolongation is `D(x) = cl F(↑x)`.

use super::distal::finite_distal;
use super::modulus::{CurvePoint, ModulusCurve};
use super::regular::regular_report;
use super::{Backend, Certificate, Context, Kind, Property, PropertyProfile, Values, Verdict, Witness};
use crate::actions::FiniteAction;
use crate::spaces::metric::dyadic_ladder;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::semidec::{saturate, ClassPartition, SemiDecomposition};
use crate::spaces::{FiniteSpace, SeparationFlags, PRODUCT_BOUND};

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    Holds,
    Fails(Witness),
}

impl Check {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Check::Holds => None,
            Check::Fails(w) => Some(w),
        }
    }
}

/// Opens and closed sets are enumerated only up to this many points.
pub const ENUMERATION_BOUND: usize = 16;

/// A space with the data every checker reuses: its square, its opens and
/// its separation flags.
#[derive(Clone, Debug)]
pub struct SpaceData {
    pub space: FiniteSpace,
    pub square: Option<FiniteSpace>,
    pub opens: Option<Vec<PointSet>>,
    pub flags: SeparationFlags,
}

impl SpaceData {
    pub fn new(space: FiniteSpace) -> Self {
        let n = space.len();
        let square = if n * n <= PRODUCT_BOUND {
            space.product(&space).ok()
        } else {
            None
        };
        let opens = if n <= ENUMERATION_BOUND {
            space.opens().ok()
        } else {
            None
        };
        let flags = space.separation_axioms();
        SpaceData {
            space,
            square,
            opens,
            flags,
        }
    }

    pub fn discrete(&self) -> bool {
        self.flags.hausdorff
    }
}

/// Element closures and prolongations of one semi-decomposition.
pub struct FiniteEval<'a> {
    pub data: &'a SpaceData,
    pub sd: &'a SemiDecomposition,
    pub cl: Vec<PointSet>,
    pub prolongation: Vec<PointSet>,
}

impl<'a> FiniteEval<'a> {
    pub fn new(data: &'a SpaceData, sd: &'a SemiDecomposition) -> Result<Self> {
        let s = &data.space;
        let cl = sd.element_closures(s)?;
        let prolongation = (0..s.len())
            .map(|x| s.closure_of(&saturate(sd.sets(), s.up(x))))
            .collect();
        Ok(FiniteEval {
            data,
            sd,
            cl,
            prolongation,
        })
    }

    fn n(&self) -> usize {
        self.cl.len()
    }

    /// `R` is a down-set of the product order: whenever `y ∈ cl F(x')` and
    /// `x ≤ x'`, also `y ∈ cl F(x)`. Rows of `R` are already down-closed in `y`.
    pub fn r_closed(&self) -> Check {
        let s = &self.data.space;
        for above_x in 0..self.n() {
            for y in &self.cl[above_x] {
                for x in s.down(above_x) {
                    if !self.cl[x].contains(y) {
                        return Check::Fails(Witness::RNotDownSet { x, y, above_x });
                    }
                }
            }
        }
        Check::Holds
    }

    /// `R` as a point set of the square, tested for closedness there.
    pub fn r_closed_in_square(&self) -> Result<bool> {
        let n = self.n();
        let square = match &self.data.square {
            Some(q) => q,
            None => {
                return Err(Error::SizeOverflow {
                    points: n * n,
                    bound: PRODUCT_BOUND,
                })
            }
        };
        let mut r = PointSet::empty(n * n);
        for x in 0..n {
            for y in &self.cl[x] {
                r.insert(x * n + y);
            }
        }
        Ok(square.is_closed(&r))
    }

    pub fn char_zero(&self) -> Check {
        for x in 0..self.n() {
            if let Some(y) = self.prolongation[x].first_outside(&self.cl[x]) {
                return Check::Fails(Witness::ProlongationExcess { x, y });
            }
        }
        Check::Holds
    }

    /// Every element closure is minimal: `cl F(z) = cl F(x)` for `z ∈ cl F(x)`.
    pub fn minimal_closures(&self) -> Check {
        for x in 0..self.n() {
            for z in &self.cl[x] {
                if self.cl[z] != self.cl[x] {
                    let differs_at = self.cl[x]
                        .first_outside(&self.cl[z])
                        .or_else(|| self.cl[z].first_outside(&self.cl[x]))
                        .unwrap();
                    return Check::Fails(Witness::ClosureNotMinimal { x, z, differs_at });
                }
            }
        }
        Check::Holds
    }

    pub fn symmetric_r(&self) -> Check {
        for x in 0..self.n() {
            for y in &self.cl[x] {
                if !self.cl[y].contains(x) {
                    return Check::Fails(Witness::AsymmetricPair { x, y });
                }
            }
        }
        Check::Holds
    }

    /// Minimality form, with the symmetry form as an internal cross-check.
    /// Minimality forces symmetry; the converse is not relied upon.
    pub fn pointwise_ap(&self) -> Result<Check> {
        let m = self.minimal_closures();
        if m.holds() && !self.symmetric_r().holds() {
            return Err(Error::InternalDisagreement(
                "minimal element closures with an asymmetric closure relation".into(),
            ));
        }
        Ok(m)
    }

    /// Union of element closures over each closed set, checked for
    /// closedness. Closed sets are the complements of the enumerated opens;
    /// beyond the enumeration bound the finite-union argument is used.
    pub fn closed_saturations(&self) -> Check {
        let s = &self.data.space;
        let opens = match &self.data.opens {
            Some(o) => o,
            None => return Check::Holds,
        };
        for u in opens {
            let a = u.complement();
            let mut union = PointSet::empty(self.n());
            for x in &a {
                union.union_with(&self.cl[x]);
            }
            let closure = s.closure_of(&union);
            if let Some(missing) = closure.first_outside(&union) {
                return Check::Fails(Witness::SaturationNotClosed {
                    closed_set: a.to_vec(),
                    missing,
                });
            }
        }
        Check::Holds
    }

    pub fn weakly_ap(&self) -> Result<Check> {
        let pap = self.pointwise_ap()?;
        if !pap.holds() {
            return Ok(pap);
        }
        Ok(self.closed_saturations())
    }

    pub fn minimal(&self) -> Check {
        for x in 0..self.n() {
            if let Some(missing) = self.cl[x].complement().first() {
                return Check::Fails(Witness::NotDense { x, missing });
            }
        }
        Check::Holds
    }

    /// `R = X × X`, read off the relation pairs rather than the closures.
    pub fn r_total(&self) -> Check {
        let n = self.n();
        for x in 0..n {
            for y in 0..n {
                if !self.cl[x].contains(y) {
                    return Check::Fails(Witness::NotTotal { x, y });
                }
            }
        }
        Check::Holds
    }

    pub fn classes(&self) -> ClassPartition {
        crate::semidec::partition_by_equality(&self.cl)
    }
}

/// Largest open subset of `u` that is a union of classes.
pub fn largest_invariant_open(s: &FiniteSpace, parts: &ClassPartition, u: &PointSet) -> PointSet {
    let n = s.len();
    let mut v = u.clone();
    loop {
        let mut core = PointSet::empty(n);
        for class in &parts.classes {
            if class.iter().all(|&x| v.contains(x)) {
                for &x in class {
                    core.insert(x);
                }
            }
        }
        let next = s.interior(&core);
        if next == v {
            return v;
        }
        v = next;
    }
}

/// Weak upper semi-continuity of a partition. Classes must be closed; then
/// only the least open neighbourhood `↑L` of each class needs testing, since
/// an invariant open set inside `↑L` lies inside every open `U ⊇ L`.
pub fn is_weakly_usc(parts: &ClassPartition, s: &FiniteSpace) -> Result<Check> {
    let n = s.len();
    if parts.class_of.len() != n {
        return Err(Error::SizeMismatch {
            left: parts.class_of.len(),
            right: n,
        });
    }
    for class in &parts.classes {
        let set = PointSet::from_indices(n, class.iter().copied());
        if let Some(point) = s.closure_of(&set).first_outside(&set) {
            return Ok(Check::Fails(Witness::ClassNotClosed {
                class: class.clone(),
                point,
            }));
        }
    }
    for class in &parts.classes {
        let set = PointSet::from_indices(n, class.iter().copied());
        let u = s.open_hull(&set);
        let v = largest_invariant_open(s, parts, &u);
        if let Some(escape) = set.first_outside(&v) {
            return Ok(Check::Fails(Witness::NoInvariantNeighbourhood {
                class: class.clone(),
                open: u.to_vec(),
                escape,
            }));
        }
    }
    Ok(Check::Holds)
}

/// Separation flags of the class space, with a pair of classes whose least
/// neighbourhoods meet when it is not Hausdorff.
pub fn quotient_separation(
    s: &FiniteSpace,
    parts: &ClassPartition,
) -> Result<(SeparationFlags, Option<Witness>)> {
    let q = s.quotient(&parts.classes)?;
    let flags = q.space.separation_axioms();
    let k = q.space.len();
    let mut witness = None;
    'outer: for a in 0..k {
        for b in a + 1..k {
            let meet = q.space.up(a).intersection(q.space.up(b));
            if let Some(c) = meet.first() {
                witness = Some(Witness::InseparableClasses {
                    a: parts.classes[a].clone(),
                    b: parts.classes[b].clone(),
                    common: parts.classes[c].clone(),
                });
                break 'outer;
            }
        }
    }
    Ok((flags, witness))
}

/// Semi-decomposition level facts of one finite instance.
#[derive(Clone, Debug)]
pub struct FiniteFacts {
    pub values: Values,
    pub certificates: Vec<Certificate>,
    pub class_space: SeparationFlags,
    pub context: Context,
    /// Result of the product-space route for R-closedness, when computed.
    pub r_closed_square: Option<bool>,
    /// Symmetry of `R`, tallied separately from the minimality form.
    pub symmetric: bool,
}

pub fn context_of(data: &SpaceData, sd: &SemiDecomposition) -> Context {
    let f = &data.flags;
    Context {
        hausdorff: f.hausdorff,
        normal: f.normal,
        t3: f.t3,
        metrizable: f.hausdorff,
        compact_closures: true,
        decomposition: sd.is_decomposition(),
    }
}

/// Evaluates every semi-decomposition level property. With `cross_check`,
/// the product-space route for R-closedness runs too and a disagreement is
/// an error.
pub fn evaluate(data: &SpaceData, sd: &SemiDecomposition, cross_check: bool) -> Result<FiniteFacts> {
    let ev = FiniteEval::new(data, sd)?;
    let s = &data.space;
    let mut values = Values::default();
    let mut certificates = Vec::new();
    let mut record = |p: Property, c: &Check| {
        values.set(p, Some(c.holds()));
        if let Check::Fails(w) = c {
            certificates.push(Certificate::exact(p, w.clone()));
        }
    };

    let r = ev.r_closed();
    record(Property::RClosed, &r);
    let r_closed_square = if cross_check && data.square.is_some() {
        let sq = ev.r_closed_in_square()?;
        if sq != r.holds() {
            return Err(Error::InternalDisagreement(format!(
                "down-set test says {}, square closure says {sq}",
                r.holds()
            )));
        }
        Some(sq)
    } else {
        None
    };
    record(Property::CharZero, &ev.char_zero());
    let pap = ev.pointwise_ap()?;
    record(Property::PointwiseAp, &pap);
    let sym = ev.symmetric_r();
    record(Property::SymmetricR, &sym);
    let wap = if pap.holds() {
        ev.closed_saturations()
    } else {
        pap.clone()
    };
    record(Property::WeaklyAp, &wap);
    record(Property::Minimal, &ev.minimal());
    record(Property::RTotal, &ev.r_total());

    let parts = ev.classes();
    let wusc = is_weakly_usc(&parts, s)?;
    record(Property::WeaklyUscClasses, &wusc);
    record(Property::UscClasses, &wusc);
    let (class_space, sep_witness) = quotient_separation(s, &parts)?;
    match sep_witness {
        Some(w) if !class_space.hausdorff => record(Property::ClassSpaceHausdorff, &Check::Fails(w)),
        _ => record(Property::ClassSpaceHausdorff, &Check::Holds),
    }
    if data.discrete() {
        // Only equal points are closer than 1 in the discrete metric.
        values.set(Property::WeaklyEquicontinuous, Some(true));
    }
    Ok(FiniteFacts {
        values,
        certificates,
        class_space,
        context: context_of(data, sd),
        r_closed_square,
        symmetric: sym.holds(),
    })
}

/// Exact profile of a finite instance. Moduli exist only for the discrete
/// (metric) topology, where every pair of distinct points is at distance 1.
pub fn profile_finite(
    space: &FiniteSpace,
    sd: &SemiDecomposition,
    action: Option<&FiniteAction>,
    bound: usize,
) -> Result<PropertyProfile> {
    if sd.len() != space.len() {
        return Err(Error::SizeMismatch {
            left: sd.len(),
            right: space.len(),
        });
    }
    let data = SpaceData::new(space.clone());
    let facts = evaluate(&data, sd, true)?;
    let mut p = PropertyProfile::new(Backend::Finite, data.flags, facts.context);
    p.class_space_separation = Some(facts.class_space);
    for prop in Property::ALL {
        if let Some(v) = facts.values.get(prop) {
            p.put(prop, Verdict::exact(v));
        }
    }
    p.certificates = facts.certificates;
    if facts.r_closed_square.is_some() {
        p.notes.push("r_closed cross-checked in the product space".into());
    }
    let zero_curve = |name: &str| ModulusCurve {
        name: name.into(),
        points: dyadic_ladder(1.0)
            .into_iter()
            .rev()
            .map(|delta| CurvePoint {
                delta,
                value: 0.0,
                pairs: 0,
                argmax: None,
                word: None,
            })
            .collect(),
    };
    if data.discrete() {
        p.curves.push(zero_curve("W"));
    } else {
        p.put(
            Property::WeaklyEquicontinuous,
            Verdict::not_applicable(Kind::Exact, "space is not metrizable"),
        );
    }
    match action {
        Some(a) => {
            if a.len() != space.len() {
                return Err(Error::SizeMismatch {
                    left: a.len(),
                    right: space.len(),
                });
            }
            if data.discrete() {
                p.put(Property::Equicontinuous, Verdict::exact(true));
                p.curves.insert(0, zero_curve("E"));
            } else {
                p.put(
                    Property::Equicontinuous,
                    Verdict::not_applicable(Kind::Exact, "space is not metrizable"),
                );
            }
            let d = finite_distal(a, space, bound)?;
            p.put(Property::Distal, Verdict::exact(d.holds()));
            if let Check::Fails(w) = d {
                p.certificates.push(Certificate::exact(Property::Distal, w));
            }
            let r = regular_report(a, space, bound)?;
            p.put(Property::RegularAction, Verdict::exact(r.holds()));
            if let Check::Fails(w) = r {
                p.certificates.push(Certificate::exact(Property::RegularAction, w));
            }
        }
        None => {
            for prop in [Property::Equicontinuous, Property::Distal, Property::RegularAction] {
                p.put(prop, Verdict::not_applicable(Kind::Exact, "no action given"));
            }
        }
    }
    for prop in [Property::PointwiseRecurrent, Property::PointwisePeriodic] {
        p.put(prop, Verdict::not_applicable(Kind::Exact, "checked on metric samples only"));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::finite::tests::all_preorders;

    fn sierpinski_data() -> SpaceData {
        SpaceData::new(FiniteSpace::sierpinski())
    }

    fn machine() -> (SpaceData, SemiDecomposition) {
        let sd = SemiDecomposition::from_sets(vec![
            PointSet::from_indices(2, [0]),
            PointSet::from_indices(2, [0, 1]),
        ])
        .unwrap();
        (SpaceData::new(FiniteSpace::discrete(2)), sd)
    }

    #[test]
    fn two_point_machine_facts() {
        let (data, sd) = machine();
        let ev = FiniteEval::new(&data, &sd).unwrap();
        assert!(ev.r_closed().holds());
        assert!(ev.char_zero().holds());
        assert_eq!(ev.prolongation[0].to_vec(), vec![0]);
        assert_eq!(ev.prolongation[1].to_vec(), vec![0, 1]);
        assert_eq!(
            ev.symmetric_r(),
            Check::Fails(Witness::AsymmetricPair { x: 1, y: 0 })
        );
        assert!(!ev.pointwise_ap().unwrap().holds());
        assert!(!ev.weakly_ap().unwrap().holds());
        let facts = evaluate(&data, &sd, true).unwrap();
        assert!(facts.class_space.hausdorff);
    }

    #[test]
    fn sierpinski_examples() {
        let data = sierpinski_data();
        let single = SemiDecomposition::singleton(2);
        let ev = FiniteEval::new(&data, &single).unwrap();
        assert_eq!(
            ev.r_closed(),
            Check::Fails(Witness::RNotDownSet { x: 0, y: 1, above_x: 1 })
        );
        assert!(!ev.r_closed_in_square().unwrap());
        assert_eq!(ev.char_zero(), Check::Fails(Witness::ProlongationExcess { x: 0, y: 1 }));
        let parts = ev.classes();
        assert!(matches!(
            is_weakly_usc(&parts, &data.space).unwrap(),
            Check::Fails(Witness::ClassNotClosed { .. })
        ));
        let (flags, w) = quotient_separation(&data.space, &parts).unwrap();
        assert!(!flags.hausdorff && w.is_some());

        let total = SemiDecomposition::total(2);
        let facts = evaluate(&data, &total, true).unwrap();
        for p in [
            Property::Minimal,
            Property::CharZero,
            Property::RClosed,
            Property::WeaklyAp,
            Property::RTotal,
        ] {
            assert_eq!(facts.values.get(p), Some(true), "{p}");
        }
        assert!(facts.class_space.hausdorff);
    }

    #[test]
    fn permutation_decompositions_are_pointwise_ap() {
        let data = SpaceData::new(FiniteSpace::discrete(5));
        let a = crate::actions::FiniteAction::new(5, vec![vec![1, 0, 3, 4, 2]], true).unwrap();
        let sd = a.induced_semidec().unwrap();
        let ev = FiniteEval::new(&data, &sd).unwrap();
        assert!(ev.pointwise_ap().unwrap().holds());
        assert!(ev.weakly_ap().unwrap().holds());
    }

    /// Closed means the complement is an up-set.
    fn closed_by_complement(s: &FiniteSpace, a: &PointSet) -> bool {
        let c = a.complement();
        c.iter().all(|x| s.up(x).is_subset(&c))
    }

    /// Weak u.s.c. straight from the definition: every open `U ⊇ L` contains
    /// an invariant open `V ⊇ L`.
    fn wusc_by_definition(s: &FiniteSpace, parts: &ClassPartition) -> bool {
        let n = s.len();
        let opens = s.opens().unwrap();
        let invariant = |v: &PointSet| {
            parts
                .classes
                .iter()
                .all(|c| c.iter().all(|&x| v.contains(x)) || c.iter().all(|&x| !v.contains(x)))
        };
        parts.classes.iter().all(|class| {
            let l = PointSet::from_indices(n, class.iter().copied());
            closed_by_complement(s, &l)
                && opens.iter().filter(|u| l.is_subset(u)).all(|u| {
                    opens
                        .iter()
                        .any(|v| invariant(v) && l.is_subset(v) && v.is_subset(u))
                })
        })
    }

    /// Every semi-decomposition on `n` points paired with every space.
    fn all_pairs(n: usize) -> Vec<(FiniteSpace, SemiDecomposition)> {
        let pre = all_preorders(n);
        let mut out = Vec::new();
        for s in &pre {
            for f in &pre {
                out.push((s.clone(), SemiDecomposition::from_order(f)));
            }
        }
        out
    }

    #[test]
    fn r_closed_routes_agree_exhaustively() {
        for n in 1..=3 {
            for (s, sd) in all_pairs(n) {
                let data = SpaceData::new(s);
                let ev = FiniteEval::new(&data, &sd).unwrap();
                assert_eq!(ev.r_closed().holds(), ev.r_closed_in_square().unwrap());
            }
        }
    }

    #[test]
    fn wusc_reduction_matches_definition() {
        for n in 1..=3 {
            for (s, sd) in all_pairs(n) {
                let data = SpaceData::new(s);
                let ev = FiniteEval::new(&data, &sd).unwrap();
                let parts = ev.classes();
                assert_eq!(
                    is_weakly_usc(&parts, &data.space).unwrap().holds(),
                    wusc_by_definition(&data.space, &parts)
                );
            }
        }
    }

    /// `D(x)` by nets: `y ∈ D(x)` iff some `x' ∈ ↑x` and `y' ∈ F(x')` have
    /// `y ∈ cl{y'}`.
    #[test]
    fn char_zero_matches_net_definition() {
        for (s, sd) in all_pairs(3) {
            let data = SpaceData::new(s);
            let ev = FiniteEval::new(&data, &sd).unwrap();
            let s = &data.space;
            let n = s.len();
            let ok = (0..n).all(|x| {
                (0..n).all(|y| {
                    let in_d = s
                        .up(x)
                        .iter()
                        .any(|x2| sd.element(x2).iter().any(|y2| s.leq(y, y2)));
                    let in_cl = sd.element(x).iter().any(|y2| s.leq(y, y2));
                    !in_d || in_cl
                })
            });
            assert_eq!(ev.char_zero().holds(), ok);
        }
    }

    #[test]
    fn witnesses_replay() {
        for (s, sd) in all_pairs(3) {
            let data = SpaceData::new(s);
            let facts = evaluate(&data, &sd, true).unwrap();
            for c in &facts.certificates {
                assert!(
                    crate::props::replay::replay_finite(&data.space, &sd, None, c).unwrap(),
                    "{c:?}"
                );
            }
            assert!(facts
                .values
                .0
                .iter()
                .enumerate()
                .filter(|(_, v)| **v == Some(false))
                .all(|(i, _)| facts.certificates.iter().any(|c| c.property.index() == i)));
        }
    }
}
