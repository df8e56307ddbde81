//! Re-deriving failures from certificates.
//!
//! Each replay checks the witness against the instance using the defining
//! condition of the property directly, without the checkers' data
//! structures. `Ok(true)` means the witness exhibits the failure.

use super::metric::{periodic_point, power_images, ScaleConfig};
use super::{Certificate, Witness};
use crate::actions::{FiniteAction, MetricAction};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::semidec::SemiDecomposition;
use crate::spaces::{FiniteSpace, MetricSample};

/// `y` lies in the closure of `F(x)`: below some point of `F(x)`.
fn in_closure(s: &FiniteSpace, sd: &SemiDecomposition, x: usize, y: usize) -> bool {
    sd.element(x).iter().any(|z| s.leq(y, z))
}

fn is_down_set(s: &FiniteSpace, a: &PointSet) -> bool {
    a.iter().all(|x| (0..s.len()).all(|y| !s.leq(y, x) || a.contains(y)))
}

fn is_up_set(s: &FiniteSpace, a: &PointSet) -> bool {
    is_down_set(s, &a.complement())
}

fn closure_row(s: &FiniteSpace, sd: &SemiDecomposition, x: usize) -> PointSet {
    PointSet::from_indices(s.len(), (0..s.len()).filter(|&y| in_closure(s, sd, x, y)))
}

fn check_points(n: usize, pts: &[usize]) -> Result<()> {
    match pts.iter().find(|&&p| p >= n) {
        Some(&p) => Err(Error::PointOutOfRange { point: p, n }),
        None => Ok(()),
    }
}

pub fn replay_finite(
    s: &FiniteSpace,
    sd: &SemiDecomposition,
    action: Option<&FiniteAction>,
    cert: &Certificate,
) -> Result<bool> {
    let n = s.len();
    if sd.len() != n {
        return Err(Error::SizeMismatch { left: sd.len(), right: n });
    }
    let cl = |x: usize, y: usize| in_closure(s, sd, x, y);
    Ok(match &cert.witness {
        Witness::RNotDownSet { x, y, above_x } => {
            check_points(n, &[*x, *y, *above_x])?;
            s.leq(*x, *above_x) && cl(*above_x, *y) && !cl(*x, *y)
        }
        Witness::ProlongationExcess { x, y } => {
            check_points(n, &[*x, *y])?;
            let in_d = s
                .up(*x)
                .iter()
                .any(|x2| sd.element(x2).iter().any(|y2| s.leq(*y, y2)));
            in_d && !cl(*x, *y)
        }
        Witness::ClosureNotMinimal { x, z, differs_at } => {
            check_points(n, &[*x, *z, *differs_at])?;
            cl(*x, *z) && cl(*x, *differs_at) != cl(*z, *differs_at)
        }
        Witness::AsymmetricPair { x, y } => {
            check_points(n, &[*x, *y])?;
            cl(*x, *y) && !cl(*y, *x)
        }
        Witness::SaturationNotClosed { closed_set, missing } => {
            check_points(n, closed_set)?;
            check_points(n, &[*missing])?;
            let a = PointSet::from_indices(n, closed_set.iter().copied());
            let mut union = PointSet::empty(n);
            for x in &a {
                union.union_with(&closure_row(s, sd, x));
            }
            is_down_set(s, &a)
                && !union.contains(*missing)
                && union.iter().any(|u| s.leq(*missing, u))
        }
        Witness::NotDense { x, missing } | Witness::NotTotal { x, y: missing } => {
            check_points(n, &[*x, *missing])?;
            !cl(*x, *missing)
        }
        Witness::ClassNotClosed { class, point } => {
            check_points(n, class)?;
            check_points(n, &[*point])?;
            let row = closure_row(s, sd, class[0]);
            class.iter().all(|&c| closure_row(s, sd, c) == row)
                && !class.contains(point)
                && class.iter().any(|&c| s.leq(*point, c))
        }
        Witness::NoInvariantNeighbourhood { class, open, escape } => {
            check_points(n, class)?;
            check_points(n, open)?;
            let rows: Vec<PointSet> = (0..n).map(|x| closure_row(s, sd, x)).collect();
            let u = PointSet::from_indices(n, open.iter().copied());
            let l = PointSet::from_indices(n, class.iter().copied());
            let invariant = |v: &PointSet| {
                (0..n).all(|x| (0..n).all(|y| rows[x] != rows[y] || v.contains(x) == v.contains(y)))
            };
            let opens = s.opens()?;
            class.contains(escape)
                && is_up_set(s, &u)
                && l.is_subset(&u)
                && !opens.iter().any(|v| invariant(v) && l.is_subset(v) && v.is_subset(&u))
        }
        Witness::InseparableClasses { a, b, common } => {
            check_points(n, a)?;
            check_points(n, b)?;
            check_points(n, common)?;
            let rows: Vec<PointSet> = (0..n).map(|x| closure_row(s, sd, x)).collect();
            let q = s.quotient(&crate::semidec::partition_by_equality(&rows).classes)?;
            let (qa, qb, qc) = (q.projection[a[0]], q.projection[b[0]], q.projection[common[0]]);
            qa != qb && q.space.leq(qa, qc) && q.space.leq(qb, qc)
        }
        Witness::FiniteProximal { x, y, map, meet } => {
            check_points(n, &[*x, *y, *meet])?;
            let a = action.ok_or_else(|| Error::Unsupported("proximality needs an action".into()))?;
            let sg = a.semigroup(crate::actions::SEMIGROUP_BOUND)?;
            x != y && sg.contains(map) && s.leq(*meet, map[*x]) && s.leq(*meet, map[*y])
        }
        Witness::Irregular { x, open, map, escape } => {
            check_points(n, open)?;
            check_points(n, &[*x, *escape])?;
            let a = action.ok_or_else(|| Error::Unsupported("regularity needs an action".into()))?;
            let sg = a.semigroup(crate::actions::SEMIGROUP_BOUND)?;
            let u = PointSet::from_indices(n, open.iter().copied());
            sg.contains(map)
                && is_up_set(s, &u)
                && (0..n).filter(|&z| s.leq(z, map[*x])).all(|z| u.contains(z))
                && s.leq(*x, *escape)
                && !u.contains(map[*escape])
        }
        w => {
            return Err(Error::Unsupported(format!(
                "no finite replay for {}",
                serde_json::to_value(w).map(|v| v["type"].to_string()).unwrap_or_default()
            )))
        }
    })
}

pub fn replay_metric(
    m: &MetricSample,
    sets: &[PointSet],
    action: Option<&MetricAction>,
    cert: &Certificate,
    cfg: &ScaleConfig,
) -> Result<bool> {
    let n = m.len();
    if sets.len() != n {
        return Err(Error::SizeMismatch { left: sets.len(), right: n });
    }
    let s = cert.scale.ok_or_else(|| Error::BadParameter("certificate has no scale".into()))?;
    let tol = m.tol();
    let c = cfg.inflation;
    let d_set = |y: usize, x: usize| m.dist_to_set(y, &sets[x]);
    let near = |x: usize, a: usize| m.dist(x, a) <= m.nearest_gap(x) + tol;
    let need_action =
        || action.ok_or_else(|| Error::Unsupported("this certificate needs an action".into()));
    Ok(match &cert.witness {
        Witness::REscapes { x, y, near_x, near_y } => {
            check_points(n, &[*x, *y, *near_x, *near_y])?;
            near(*x, *near_x)
                && sets[*near_x].contains(*near_y)
                && m.dist(*y, *near_y) <= s + tol
                && d_set(*y, *x) > c * s + tol
        }
        Witness::ProlongationExcess { x, y } => {
            check_points(n, &[*x, *y])?;
            (0..n).any(|a| near(*x, a) && d_set(*y, a) <= s + tol) && d_set(*y, *x) > c * s + tol
        }
        Witness::ClosureNotMinimal { x, z, differs_at } => {
            check_points(n, &[*x, *z, *differs_at])?;
            d_set(*z, *x) <= s + tol
                && d_set(*differs_at, *x) <= s + tol
                && d_set(*differs_at, *z) > c * s + tol
        }
        Witness::AsymmetricPair { x, y } => {
            check_points(n, &[*x, *y])?;
            d_set(*y, *x) <= s + tol && d_set(*x, *y) > c * s + tol
        }
        Witness::UscAtScale { x, near: w, escape } => {
            check_points(n, &[*x, *w, *escape])?;
            (0..n).any(|z| d_set(z, *x) <= s + tol && near(z, *w))
                && d_set(*escape, *w) <= s + tol
                && d_set(*escape, *x) > c * s + tol
        }
        Witness::NotDense { x, missing } | Witness::NotTotal { x, y: missing } => {
            check_points(n, &[*x, *missing])?;
            d_set(*missing, *x) > s + tol
        }
        Witness::Modulus { curve, delta, value, x, y, word } => {
            check_points(n, &[*x, *y])?;
            let got = match (curve.as_str(), word) {
                ("E", Some(word)) => {
                    let a = need_action()?;
                    let w = a
                        .words()
                        .iter()
                        .position(|w| w.to_string() == *word)
                        .ok_or_else(|| Error::Parse(format!("unknown word {word}")))?;
                    m.dist(a.image(w, *x), a.image(w, *y))
                }
                ("W", _) => m.hausdorff_distance(&sets[*x], &sets[*y])?,
                _ => return Err(Error::Parse(format!("unknown curve {curve}"))),
            };
            m.dist(*x, *y) <= delta + tol && (got - value).abs() <= tol && got > s + tol
        }
        Witness::ProximalPair { x, y, word, distance, min_distance } => {
            check_points(n, &[*x, *y])?;
            let a = need_action()?;
            let w = a
                .words()
                .iter()
                .position(|w| w.to_string() == *word)
                .ok_or_else(|| Error::Parse(format!("unknown word {word}")))?;
            let d = m.dist(a.image(w, *x), a.image(w, *y));
            x != y
                && (m.dist(*x, *y) - distance).abs() <= tol
                && (d - min_distance).abs() <= tol
                && d < s
                && *distance >= cfg.rho.unwrap_or(2.0 * s) - tol
        }
        Witness::NotRecurrent { x, min_return } => {
            check_points(n, &[*x])?;
            let p = power_images(need_action()?)?;
            let best = p
                .iter()
                .filter(|(k, _)| k.unsigned_abs() as usize >= cfg.burn.max(1))
                .map(|(_, img)| m.dist(img[*x] as usize, *x))
                .fold(f64::INFINITY, f64::min);
            (best - min_return).abs() <= tol && best > s + tol
        }
        Witness::NotPeriodic { x, .. } => {
            check_points(n, &[*x])?;
            let p = power_images(need_action()?)?;
            let forward: Vec<&[u32]> = p
                .iter()
                .filter(|(k, _)| *k >= 0)
                .map(|(_, img)| img.as_slice())
                .collect();
            periodic_point(m, &forward, *x, s, c).is_err()
        }
        w => {
            return Err(Error::Unsupported(format!(
                "no sample replay for {}",
                serde_json::to_value(w).map(|v| v["type"].to_string()).unwrap_or_default()
            )))
        }
    })
}
