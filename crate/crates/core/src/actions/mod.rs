//! Semigroup actions given by finitely many generators.
//!
//! On a finite set every generator is a table and orbits are exact closures.
//! On a metric sample generators may also be coordinate formulas; words are
//! iterated on exact coordinates and each image is snapped to the nearest
//! sample point, with the snap distance recorded.

pub mod formula;
pub mod metric;

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::semidec::SemiDecomposition;
use crate::spaces::PRODUCT_BOUND;
use std::collections::{HashSet, VecDeque};

pub use formula::{toral_speed, Formula};
pub use metric::{omega_limit, ActionSpec, Generator, MetricAction, Word};

/// Default bound on the size of an enumerated transformation semigroup.
pub const SEMIGROUP_BOUND: usize = 4096;

/// Action of the semigroup generated by finitely many self-maps of `{0..n}`.
/// The identity is always part of the semigroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAction {
    n: usize,
    generators: Vec<Vec<usize>>,
    invertible: bool,
}

pub(crate) fn is_bijection(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    for &y in map {
        if seen[y] {
            return false;
        }
        seen[y] = true;
    }
    true
}

pub(crate) fn validate_table(n: usize, map: &[usize]) -> Result<()> {
    if map.len() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: map.len(),
        });
    }
    if let Some(&y) = map.iter().find(|&&y| y >= n) {
        return Err(Error::PointOutOfRange { point: y, n });
    }
    Ok(())
}

impl FiniteAction {
    /// With `invertible_only`, every generator must be a bijection.
    pub fn new(n: usize, generators: Vec<Vec<usize>>, invertible_only: bool) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyGeneratorSet);
        }
        for g in &generators {
            validate_table(n, g)?;
        }
        let invertible = generators.iter().all(|g| is_bijection(g));
        if invertible_only {
            if let Some(i) = generators.iter().position(|g| !is_bijection(g)) {
                return Err(Error::NotInvertible(i));
            }
        }
        Ok(FiniteAction {
            n,
            generators,
            invertible,
        })
    }

    pub fn identity(n: usize) -> Self {
        FiniteAction {
            n,
            generators: vec![(0..n).collect()],
            invertible: true,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// False when some generator is not a bijection.
    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    /// Least set containing `x` and closed under every generator.
    pub fn orbit(&self, x: usize) -> Result<PointSet> {
        if x >= self.n {
            return Err(Error::PointOutOfRange { point: x, n: self.n });
        }
        let mut seen = PointSet::singleton(self.n, x);
        let mut queue = VecDeque::from([x]);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = g[p];
                if !seen.contains(q) {
                    seen.insert(q);
                    queue.push_back(q);
                }
            }
        }
        Ok(seen)
    }

    pub fn orbits(&self) -> Vec<PointSet> {
        (0..self.n).map(|x| self.orbit(x).unwrap()).collect()
    }

    /// `F(y) = T(y)`.
    pub fn induced_semidec(&self) -> Result<SemiDecomposition> {
        SemiDecomposition::from_sets(self.orbits())
    }

    /// Every element of the generated monoid as a table, identity first.
    pub fn semigroup(&self, bound: usize) -> Result<Vec<Vec<usize>>> {
        let id: Vec<usize> = (0..self.n).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            for g in &self.generators {
                let h: Vec<usize> = out[i].iter().map(|&y| g[y]).collect();
                if seen.insert(h.clone()) {
                    if out.len() >= bound {
                        return Err(Error::SemigroupTooLarge(bound));
                    }
                    out.push(h);
                }
            }
            i += 1;
        }
        Ok(out)
    }

    /// Diagonal action on the `k`-fold product. Point `(i_0, ..., i_{k-1})`
    /// has index `((i_0 * n) + i_1) * n + ...`, matching [`crate::spaces::FiniteSpace::product`].
    pub fn product_action(&self, k: usize) -> Result<FiniteAction> {
        if k == 0 || k > 3 {
            return Err(Error::BadParameter(format!("product power {k} not in 1..=3")));
        }
        let points = self.n.checked_pow(k as u32).unwrap_or(usize::MAX);
        if points > PRODUCT_BOUND {
            return Err(Error::SizeOverflow {
                points,
                bound: PRODUCT_BOUND,
            });
        }
        let generators = self
            .generators
            .iter()
            .map(|g| power_table(g, self.n, k))
            .collect();
        Ok(FiniteAction {
            n: points,
            generators,
            invertible: self.invertible,
        })
    }
}

pub(crate) fn power_table(g: &[usize], n: usize, k: usize) -> Vec<usize> {
    let points = n.pow(k as u32);
    (0..points)
        .map(|p| {
            let mut digits = vec![0; k];
            let mut r = p;
            for d in digits.iter_mut().rev() {
                *d = r % n;
                r /= n;
            }
            digits.iter().fold(0, |acc, &d| acc * n + g[d])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_examples() {
        let id = FiniteAction::new(2, vec![vec![0, 1]], false).unwrap();
        assert_eq!(id.orbits(), vec![PointSet::singleton(2, 0), PointSet::singleton(2, 1)]);
        let m = FiniteAction::new(2, vec![vec![0, 0]], false).unwrap();
        assert!(!m.is_invertible());
        assert!(matches!(
            FiniteAction::new(2, vec![vec![0, 0]], true),
            Err(Error::NotInvertible(0))
        ));
        assert!(matches!(
            FiniteAction::new(2, vec![], false),
            Err(Error::EmptyGeneratorSet)
        ));
        assert!(matches!(
            FiniteAction::new(2, vec![vec![0, 2]], false),
            Err(Error::PointOutOfRange { .. })
        ));
    }

    #[test]
    fn two_point_machine_orbits() {
        let m = FiniteAction::new(2, vec![vec![0, 0]], false).unwrap();
        assert_eq!(m.orbit(1).unwrap().to_vec(), vec![0, 1]);
        let sd = m.induced_semidec().unwrap();
        assert_eq!(sd.element(0).to_vec(), vec![0]);
        assert_eq!(sd.element(1).to_vec(), vec![0, 1]);
        let p = m.product_action(2).unwrap();
        assert_eq!(p.generators()[0][3], 0);
        assert_eq!(m.product_action(1).unwrap(), m);
    }

    #[test]
    fn permutation_orbits_are_cycles() {
        // cycles (0 2 4) (1 3) (5)
        let perm = vec![2, 3, 4, 1, 0, 5];
        let a = FiniteAction::new(6, vec![perm], true).unwrap();
        let sd = a.induced_semidec().unwrap();
        assert!(sd.is_decomposition());
        assert_eq!(sd.element(0).to_vec(), vec![0, 2, 4]);
        assert_eq!(sd.element(3).to_vec(), vec![1, 3]);
        assert_eq!(sd.element(5).to_vec(), vec![5]);
    }

    /// Orbit as the least fixed point of `S ↦ S ∪ g(S)`.
    fn orbit_fixpoint(a: &FiniteAction, x: usize) -> PointSet {
        let mut s = PointSet::singleton(a.len(), x);
        loop {
            let mut next = s.clone();
            for g in a.generators() {
                for p in &s {
                    next.insert(g[p]);
                }
            }
            if next == s {
                return s;
            }
            s = next;
        }
    }

    #[test]
    fn all_single_maps_on_three_points() {
        for code in 0..27 {
            let g = vec![code % 3, code / 3 % 3, code / 9];
            let a = FiniteAction::new(3, vec![g], false).unwrap();
            assert!(a.induced_semidec().is_ok());
            for x in 0..3 {
                assert_eq!(a.orbit(x).unwrap(), orbit_fixpoint(&a, x));
            }
        }
    }

    #[test]
    fn all_generator_pairs_on_three_points() {
        for c1 in 0..27 {
            for c2 in 0..27 {
                let g1 = vec![c1 % 3, c1 / 3 % 3, c1 / 9];
                let g2 = vec![c2 % 3, c2 / 3 % 3, c2 / 9];
                let a = FiniteAction::new(3, vec![g1, g2], false).unwrap();
                assert!(a.induced_semidec().is_ok());
                let p = a.product_action(2).unwrap();
                for x in 0..3 {
                    for y in 0..3 {
                        let o = p.orbit(x * 3 + y).unwrap();
                        let ox = a.orbit(x).unwrap();
                        let oy = a.orbit(y).unwrap();
                        assert!(o.iter().all(|q| ox.contains(q / 3) && oy.contains(q % 3)));
                    }
                }
            }
        }
    }

    #[test]
    fn semigroup_closure() {
        let m = FiniteAction::new(2, vec![vec![0, 0]], false).unwrap();
        assert_eq!(m.semigroup(10).unwrap(), vec![vec![0, 1], vec![0, 0]]);
        let cyc = FiniteAction::new(5, vec![vec![1, 2, 3, 4, 0]], true).unwrap();
        assert_eq!(cyc.semigroup(10).unwrap().len(), 5);
        assert!(matches!(cyc.semigroup(3), Err(Error::SemigroupTooLarge(3))));
    }
}
