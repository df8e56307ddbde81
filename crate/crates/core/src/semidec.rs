//! Semi-decompositions and the objects derived from them.
//!
//! A semi-decomposition assigns to every point `y` a set `F(y)` with
//! `y ∈ F(y)` and `x ∈ F(y) ⇒ F(x) ⊆ F(y)`. Read as a relation, `x ≤ y ⇔ x ∈ F(y)`
//! is exactly a pre-order, and `F(y)` is the down-set of `y`.
//!
//! On a finite space a net converges to `x` iff it is eventually inside the
//! minimal open set `↑x`, and a constant net at `z` converges to `y` iff
//! `y ∈ cl{z}`. So the prolongation `D(x)` (limits of `y_α ∈ F(x_α)` with
//! `x_α → x`) is `cl F(↑x)`.

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::spaces::{FiniteSpace, MetricSample};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemiDecomposition {
    n: usize,
    /// `sets[y] = F(y)`.
    sets: Vec<PointSet>,
}

/// Points grouped by equality of element closures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassPartition {
    pub classes: Vec<Vec<usize>>,
    pub representative: Vec<usize>,
    pub class_of: Vec<usize>,
}

/// A relation on `n` points stored by rows: `rows[x] = {y : (x, y) ∈ R}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub rows: Vec<PointSet>,
}

impl Relation {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, r)| r.iter().map(move |y| (x, y)))
            .collect()
    }

    /// First `(x, y)` in `R` with `(y, x)` not in `R`.
    pub fn asymmetric_pair(&self) -> Option<(usize, usize)> {
        self.pairs()
            .into_iter()
            .find(|&(x, y)| !self.contains(y, x))
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetric_pair().is_none()
    }

    pub fn is_total(&self) -> bool {
        self.rows.iter().all(|r| r.is_full())
    }
}

impl SemiDecomposition {
    /// Validates `member[y][x] ⇔ x ∈ F(y)` against both axioms.
    pub fn new(member: &[Vec<bool>]) -> Result<Self> {
        let n = member.len();
        let mut sets = Vec::with_capacity(n);
        for row in member {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            sets.push(PointSet::from_indices(n, (0..n).filter(|&x| row[x])));
        }
        Self::from_sets(sets)
    }

    pub fn from_sets(sets: Vec<PointSet>) -> Result<Self> {
        let n = sets.len();
        for s in &sets {
            if s.universe() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: s.universe(),
                });
            }
        }
        for (y, s) in sets.iter().enumerate() {
            if !s.contains(y) {
                return Err(Error::AxiomViolation {
                    axiom: "reflexivity",
                    x: y,
                    y,
                });
            }
        }
        for (y, s) in sets.iter().enumerate() {
            for x in s {
                if !sets[x].is_subset(s) {
                    return Err(Error::AxiomViolation {
                        axiom: "nesting",
                        x,
                        y,
                    });
                }
            }
        }
        Ok(SemiDecomposition { n, sets })
    }

    /// `F(x) = {x}`.
    pub fn singleton(n: usize) -> Self {
        SemiDecomposition {
            n,
            sets: (0..n).map(|x| PointSet::singleton(n, x)).collect(),
        }
    }

    /// `F(x) = X`.
    pub fn total(n: usize) -> Self {
        SemiDecomposition {
            n,
            sets: vec![PointSet::full(n); n],
        }
    }

    /// `F(y)` is the down-set of `y`.
    pub fn from_preorder(leq: &[Vec<bool>]) -> Result<Self> {
        Ok(Self::from_order(&FiniteSpace::new(leq)?))
    }

    /// Semi-decomposition whose pre-order is the specialization order of `order`.
    pub fn from_order(order: &FiniteSpace) -> Self {
        SemiDecomposition {
            n: order.len(),
            sets: (0..order.len()).map(|y| order.down(y).clone()).collect(),
        }
    }

    /// `leq[x][y] ⇔ x ∈ F(y)`.
    pub fn to_preorder(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|x| (0..self.n).map(|y| self.sets[y].contains(x)).collect())
            .collect()
    }

    pub fn member_matrix(&self) -> Vec<Vec<bool>> {
        self.sets
            .iter()
            .map(|s| (0..self.n).map(|x| s.contains(x)).collect())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn element(&self, y: usize) -> &PointSet {
        &self.sets[y]
    }

    pub fn sets(&self) -> &[PointSet] {
        &self.sets
    }

    /// `⋃_{x ∈ A} F(x)`.
    pub fn saturation(&self, a: &PointSet) -> PointSet {
        saturate(&self.sets, a)
    }

    pub fn is_invariant(&self, a: &PointSet) -> bool {
        self.saturation(a) == *a
    }

    /// Elements pairwise equal or disjoint.
    pub fn is_decomposition(&self) -> bool {
        is_partition_family(&self.sets)
    }

    fn check(&self, s: &FiniteSpace) -> Result<()> {
        if s.len() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: s.len(),
            });
        }
        Ok(())
    }

    /// `cl F(x)`.
    pub fn element_closure(&self, s: &FiniteSpace, x: usize) -> Result<PointSet> {
        self.check(s)?;
        if x >= self.n {
            return Err(Error::PointOutOfRange { point: x, n: self.n });
        }
        Ok(s.closure_of(&self.sets[x]))
    }

    pub fn element_closures(&self, s: &FiniteSpace) -> Result<Vec<PointSet>> {
        self.check(s)?;
        Ok(self.sets.iter().map(|f| s.closure_of(f)).collect())
    }

    /// `{y : cl F(y) = cl F(x)}`.
    pub fn element_class(&self, s: &FiniteSpace, x: usize) -> Result<PointSet> {
        let cl = self.element_closures(s)?;
        if x >= self.n {
            return Err(Error::PointOutOfRange { point: x, n: self.n });
        }
        Ok(PointSet::from_indices(
            self.n,
            (0..self.n).filter(|&y| cl[y] == cl[x]),
        ))
    }

    pub fn class_partition(&self, s: &FiniteSpace) -> Result<ClassPartition> {
        Ok(partition_by_equality(&self.element_closures(s)?))
    }

    /// `D(x) = cl F(↑x)`.
    pub fn prolongation_fin(&self, s: &FiniteSpace, x: usize) -> Result<PointSet> {
        self.check(s)?;
        let up = s.min_open_nbhd(x)?;
        Ok(s.closure_of(&self.saturation(&up)))
    }

    /// `R = {(x, y) : y ∈ cl F(x)}`.
    pub fn element_closure_relation(&self, s: &FiniteSpace) -> Result<Relation> {
        Ok(Relation {
            rows: self.element_closures(s)?,
        })
    }
}

pub(crate) fn saturate(sets: &[PointSet], a: &PointSet) -> PointSet {
    let mut out = PointSet::empty(a.universe());
    for x in a {
        out.union_with(&sets[x]);
    }
    out
}

pub(crate) fn is_partition_family(sets: &[PointSet]) -> bool {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if a != b && a.intersects(b) {
                return false;
            }
        }
    }
    true
}

pub(crate) fn partition_by_equality(keys: &[PointSet]) -> ClassPartition {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![0; keys.len()];
    let mut seen: std::collections::HashMap<&PointSet, usize> = std::collections::HashMap::new();
    for (x, k) in keys.iter().enumerate() {
        let c = *seen.entry(k).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(x);
        class_of[x] = c;
    }
    ClassPartition {
        representative: classes.iter().map(|c| c[0]).collect(),
        classes,
        class_of,
    }
}

/// Sampled prolongation at scale `eps`: `eps_closure(F(B(x, eps)), eps)`.
/// `sets` need not satisfy the nesting axiom (truncated orbits).
pub fn prolongation_metric(
    sets: &[PointSet],
    m: &MetricSample,
    x: usize,
    eps: f64,
) -> Result<PointSet> {
    m.scale_index(eps)?;
    if sets.len() != m.len() {
        return Err(Error::SizeMismatch {
            left: sets.len(),
            right: m.len(),
        });
    }
    let sat = saturate(sets, &m.ball(x, eps));
    Ok(m.eps_closure_of(&sat, eps))
}

/// Sampled element-closure relation: one relation per ladder scale, with
/// rows `eps_closure(F(x), eps)`.
pub fn element_closure_relation_metric(
    sets: &[PointSet],
    m: &MetricSample,
) -> Result<Vec<(f64, Relation)>> {
    if sets.len() != m.len() {
        return Err(Error::SizeMismatch {
            left: sets.len(),
            right: m.len(),
        });
    }
    Ok(m.scales()
        .iter()
        .map(|&e| {
            (
                e,
                Relation {
                    rows: sets.iter().map(|f| m.eps_closure_of(f, e)).collect(),
                },
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::finite::tests::all_preorders;
    use crate::spaces::{CoordMetric, SampleSpec};
    use proptest::prelude::*;

    fn two_point_machine() -> (FiniteSpace, SemiDecomposition) {
        let sd = SemiDecomposition::new(&[vec![true, false], vec![true, true]]).unwrap();
        (FiniteSpace::discrete(2), sd)
    }

    #[test]
    fn construction_examples() {
        let id = SemiDecomposition::new(&[
            vec![true, false, false],
            vec![false, true, false],
            vec![false, false, true],
        ])
        .unwrap();
        assert_eq!(id, SemiDecomposition::singleton(3));
        let all = SemiDecomposition::new(&vec![vec![true; 3]; 3]).unwrap();
        assert_eq!(all, SemiDecomposition::total(3));
        // 1 ∈ F(0) but 2 ∈ F(1) \ F(0)
        let err = SemiDecomposition::new(&[
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ])
        .unwrap_err();
        assert_eq!(
            err,
            Error::AxiomViolation {
                axiom: "nesting",
                x: 1,
                y: 0
            }
        );
    }

    #[test]
    fn axioms_exhaustive_on_three_points() {
        for bits in 0u32..512 {
            let m: Vec<Vec<bool>> = (0..3)
                .map(|y| (0..3).map(|x| bits >> (3 * y + x) & 1 == 1).collect())
                .collect();
            // as a relation: x ≤ y ⇔ m[y][x]
            let reflexive = (0..3).all(|x| m[x][x]);
            let transitive = (0..3).all(|x| {
                (0..3).all(|y| (0..3).all(|z| !(m[y][x] && m[z][y]) || m[z][x]))
            });
            let got = SemiDecomposition::new(&m);
            assert_eq!(got.is_ok(), reflexive && transitive, "bits {bits}");
            if let Err(e) = got {
                assert!(matches!(e, Error::AxiomViolation { .. }));
            }
        }
    }

    #[test]
    fn preorder_examples() {
        let d = SemiDecomposition::from_order(&FiniteSpace::discrete(3));
        assert_eq!(d, SemiDecomposition::singleton(3));
        let c = SemiDecomposition::from_order(&FiniteSpace::chain(3));
        assert_eq!(c.element(2).to_vec(), vec![0, 1, 2]);
        assert_eq!(c.element(1).to_vec(), vec![0, 1]);
        assert_eq!(c.element(0).to_vec(), vec![0]);
        let bad = SemiDecomposition::from_preorder(&[vec![false, true], vec![true, true]]);
        assert!(matches!(bad, Err(Error::NotAPreorder { .. })));
    }

    #[test]
    fn preorder_round_trips() {
        for n in 1..=4 {
            let all = all_preorders(n);
            if n == 3 {
                assert_eq!(all.len(), 29);
            }
            if n == 4 {
                assert_eq!(all.len(), 355);
            }
            for s in all {
                let leq = s.leq_matrix();
                let sd = SemiDecomposition::from_preorder(&leq).unwrap();
                assert_eq!(sd.to_preorder(), leq);
                let back = SemiDecomposition::from_preorder(&sd.to_preorder()).unwrap();
                assert_eq!(back, sd);
            }
        }
    }

    #[test]
    fn saturation_and_invariance_examples() {
        let c = SemiDecomposition::from_order(&FiniteSpace::chain(3));
        assert!(c.saturation(&PointSet::empty(3)).is_empty());
        let t = SemiDecomposition::total(3);
        assert!(t.saturation(&PointSet::singleton(3, 0)).is_full());
        assert_eq!(c.saturation(&PointSet::singleton(3, 1)).to_vec(), vec![0, 1]);
        assert!(c.is_invariant(&PointSet::full(3)));
        assert!(!c.is_invariant(&PointSet::singleton(3, 1)));
        let s = SemiDecomposition::singleton(3);
        assert!((0..8).all(|m| s.is_invariant(&PointSet::from_mask(3, m))));
    }

    #[test]
    fn element_closure_examples() {
        let d = FiniteSpace::discrete(3);
        let c = SemiDecomposition::from_order(&FiniteSpace::chain(3));
        for x in 0..3 {
            assert_eq!(&c.element_closure(&d, x).unwrap(), c.element(x));
        }
        let s = FiniteSpace::sierpinski();
        let single = SemiDecomposition::singleton(2);
        assert_eq!(single.element_closure(&s, 1).unwrap().to_vec(), vec![0, 1]);
        assert_eq!(single.element_closure(&s, 0).unwrap().to_vec(), vec![0]);
        assert!(matches!(
            single.element_closure(&d, 0),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn class_examples() {
        let t = SemiDecomposition::total(3);
        let s = FiniteSpace::chain(3);
        assert_eq!(t.class_partition(&s).unwrap().classes.len(), 1);
        let d = FiniteSpace::discrete(3);
        let p = SemiDecomposition::singleton(3).class_partition(&d).unwrap();
        assert_eq!(p.classes, vec![vec![0], vec![1], vec![2]]);
        let (sp, sd) = two_point_machine();
        assert_eq!(sd.class_partition(&sp).unwrap().classes, vec![vec![0], vec![1]]);
        assert_eq!(sd.element_class(&sp, 1).unwrap().to_vec(), vec![1]);
    }

    #[test]
    fn prolongation_examples() {
        let (sp, sd) = two_point_machine();
        assert_eq!(sd.prolongation_fin(&sp, 0).unwrap().to_vec(), vec![0]);
        assert_eq!(sd.prolongation_fin(&sp, 1).unwrap().to_vec(), vec![0, 1]);
        let s = FiniteSpace::sierpinski();
        let single = SemiDecomposition::singleton(2);
        assert_eq!(single.prolongation_fin(&s, 0).unwrap().to_vec(), vec![0, 1]);
        let c = FiniteSpace::chain(3);
        let t = SemiDecomposition::total(3);
        assert!((0..3).all(|x| t.prolongation_fin(&c, x).unwrap().is_full()));
    }

    #[test]
    fn relation_examples() {
        let (sp, sd) = two_point_machine();
        let r = sd.element_closure_relation(&sp).unwrap();
        assert_eq!(r.pairs(), vec![(0, 0), (1, 0), (1, 1)]);
        assert!(!r.is_symmetric());
        let c = FiniteSpace::chain(3);
        assert!(SemiDecomposition::total(3)
            .element_closure_relation(&c)
            .unwrap()
            .is_total());
        let d = FiniteSpace::discrete(3);
        let r = SemiDecomposition::singleton(3).element_closure_relation(&d).unwrap();
        assert_eq!(r.pairs(), vec![(0, 0), (1, 1), (2, 2)]);
    }

    /// Prolongation from its definition with nets replaced by the
    /// convergence rule of finite spaces: `z → y` iff `y ∈ cl{z}`, and
    /// `x' → x` iff `x' ∈ ↑x`.
    fn prolongation_by_limits(s: &FiniteSpace, sd: &SemiDecomposition, x: usize) -> PointSet {
        let n = s.len();
        PointSet::from_indices(
            n,
            (0..n).filter(|&y| {
                (0..n).any(|xp| {
                    s.leq(x, xp) && sd.element(xp).iter().any(|z| s.leq(y, z))
                })
            }),
        )
    }

    #[test]
    fn element_closure_inside_prolongation_exhaustive() {
        for n in 1..=4 {
            let spaces = all_preorders(n);
            for s in &spaces {
                for o in &spaces {
                    let sd = SemiDecomposition::from_order(o);
                    for x in 0..n {
                        let d = sd.prolongation_fin(s, x).unwrap();
                        assert!(sd.element_closure(s, x).unwrap().is_subset(&d));
                        if n <= 3 {
                            assert_eq!(d, prolongation_by_limits(s, &sd, x));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn class_partition_is_a_partition() {
        let spaces = all_preorders(3);
        for s in &spaces {
            for o in &spaces {
                let sd = SemiDecomposition::from_order(o);
                let p = sd.class_partition(s).unwrap();
                let mut seen = vec![0; 3];
                for c in &p.classes {
                    for &x in c {
                        seen[x] += 1;
                    }
                }
                assert!(seen.iter().all(|&k| k == 1));
                let cl = sd.element_closures(s).unwrap();
                for x in 0..3 {
                    for y in 0..3 {
                        assert_eq!(p.class_of[x] == p.class_of[y], cl[x] == cl[y]);
                    }
                }
            }
        }
    }

    #[test]
    fn metric_prolongation_examples() {
        let m = SampleSpec::coords(1, vec![0.0, 1.0, 3.0], CoordMetric::Euclidean)
            .scales(vec![4.0, 0.5])
            .build()
            .unwrap();
        let sets = vec![
            PointSet::singleton(3, 0),
            PointSet::from_indices(3, [0, 1]),
            PointSet::singleton(3, 2),
        ];
        assert_eq!(prolongation_metric(&sets, &m, 1, 0.5).unwrap(), sets[1]);
        assert!(prolongation_metric(&sets, &m, 0, 4.0).unwrap().is_full());
        assert!(matches!(
            prolongation_metric(&sets, &m, 0, 0.7),
            Err(Error::ScaleNotInLadder(_))
        ));
        let rel = element_closure_relation_metric(&sets, &m).unwrap();
        assert_eq!(rel.len(), 2);
        assert!(rel[0].1.is_total());
    }

    proptest! {
        #[test]
        fn saturation_is_a_closure_operator(rel in 0u32..(1 << 25), a in 0u64..32, b in 0u64..32) {
            let mut m: Vec<Vec<bool>> = (0..5)
                .map(|i| (0..5).map(|j| i == j || rel >> (5 * i + j) & 1 == 1).collect())
                .collect();
            for k in 0..5 {
                for i in 0..5 {
                    for j in 0..5 {
                        if m[i][k] && m[k][j] {
                            m[i][j] = true;
                        }
                    }
                }
            }
            let sd = SemiDecomposition::from_preorder(&m).unwrap();
            let a = PointSet::from_mask(5, a);
            let b = PointSet::from_mask(5, b);
            let sa = sd.saturation(&a);
            prop_assert!(a.is_subset(&sa));
            prop_assert_eq!(sd.saturation(&sa), sa.clone());
            let ab = a.union(&b);
            prop_assert!(sa.is_subset(&sd.saturation(&ab)));
        }
    }
}
