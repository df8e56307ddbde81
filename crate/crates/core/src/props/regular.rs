//! Regularity of a finite action.
//!
//! For a point `x` and an open `U`, a set `P` of semigroup elements is
//! admissible when the closure of `P(x)` lies in `U`. Every admissible `P`
//! sits inside `P* = {g : ↓g(x) ⊆ U}`, and the requirement that some open
//! `V ∋ x` has `P(V) ⊆ U` only gets harder as `P` grows, so `P*` is the only
//! set to test. The smallest open set around `x` is `↑x`.

use super::finite::Check;
use super::Witness;
use crate::actions::FiniteAction;
use crate::error::{Error, Result};
use crate::spaces::FiniteSpace;

pub fn regular_report(action: &FiniteAction, s: &FiniteSpace, bound: usize) -> Result<Check> {
    if action.len() != s.len() {
        return Err(Error::SizeMismatch {
            left: action.len(),
            right: s.len(),
        });
    }
    let semigroup = action.semigroup(bound)?;
    let opens = s.opens()?;
    for x in 0..s.len() {
        for u in &opens {
            for g in &semigroup {
                if !s.down(g[x]).is_subset(u) {
                    continue;
                }
                if let Some(escape) = s.up(x).iter().find(|&y| !u.contains(g[y])) {
                    return Ok(Check::Fails(Witness::Irregular {
                        x,
                        open: u.to_vec(),
                        map: g.clone(),
                        escape,
                    }));
                }
            }
        }
    }
    Ok(Check::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::PointSet;
    use crate::spaces::finite::tests::all_preorders;

    /// Every subset `P` of the semigroup, every `x` and every open `U`.
    fn regular_brute(action: &FiniteAction, s: &FiniteSpace) -> bool {
        let sg = action.semigroup(12).unwrap();
        assert!(sg.len() <= 12);
        let opens = s.opens().unwrap();
        let n = s.len();
        for x in 0..n {
            for u in &opens {
                for mask in 0u32..(1 << sg.len()) {
                    let p: Vec<&Vec<usize>> =
                        (0..sg.len()).filter(|i| mask >> i & 1 == 1).map(|i| &sg[i]).collect();
                    let px = PointSet::from_indices(n, p.iter().map(|g| g[x]));
                    let closure = s.closure(&px).unwrap();
                    if !closure.is_subset(u) {
                        continue;
                    }
                    let ok = opens.iter().any(|v| {
                        v.contains(x) && p.iter().all(|g| v.iter().all(|y| u.contains(g[y])))
                    });
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn two_point_machine_is_regular() {
        let a = FiniteAction::new(2, vec![vec![0, 0]], false).unwrap();
        assert!(regular_report(&a, &FiniteSpace::discrete(2), 64).unwrap().holds());
    }

    #[test]
    fn identity_is_regular() {
        for s in all_preorders(3) {
            let a = FiniteAction::identity(3);
            assert!(regular_report(&a, &s, 64).unwrap().holds());
        }
    }

    #[test]
    fn constant_map_on_sierpinski() {
        let a = FiniteAction::new(2, vec![vec![0, 0]], false).unwrap();
        assert!(regular_report(&a, &FiniteSpace::sierpinski(), 64).unwrap().holds());
    }

    #[test]
    fn reduction_matches_all_subsets() {
        let mut irregular = 0;
        for s in all_preorders(3) {
            for code in 0..27 {
                let g = vec![code % 3, code / 3 % 3, code / 9];
                let a = FiniteAction::new(3, vec![g], false).unwrap();
                let fast = regular_report(&a, &s, 64).unwrap();
                assert_eq!(fast.holds(), regular_brute(&a, &s));
                irregular += usize::from(!fast.holds());
            }
        }
        assert!(irregular > 0);
    }

    #[test]
    fn two_generators_on_two_points() {
        for s in all_preorders(2) {
            for c1 in 0..4 {
                for c2 in 0..4 {
                    let a = FiniteAction::new(
                        2,
                        vec![vec![c1 % 2, c1 / 2], vec![c2 % 2, c2 / 2]],
                        false,
                    )
                    .unwrap();
                    assert_eq!(regular_report(&a, &s, 64).unwrap().holds(), regular_brute(&a, &s));
                }
            }
        }
    }
}
