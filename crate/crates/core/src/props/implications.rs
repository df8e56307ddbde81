//! Guarded implications between properties, kept as a table.

use super::{Certificate, Context, Kind, Property, PropertyProfile, Values, Witness};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guard {
    Hausdorff,
    Normal,
    T3,
    Metrizable,
    CompactClosures,
    /// The semi-decomposition is a partition.
    Decomposition,
}

impl Guard {
    pub fn holds(self, c: &Context) -> bool {
        match self {
            Guard::Hausdorff => c.hausdorff,
            Guard::Normal => c.normal,
            Guard::T3 => c.t3,
            Guard::Metrizable => c.metrizable,
            Guard::CompactClosures => c.compact_closures,
            Guard::Decomposition => c.decomposition,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Guard::Hausdorff => "hausdorff",
            Guard::Normal => "normal",
            Guard::T3 => "t3",
            Guard::Metrizable => "metrizable",
            Guard::CompactClosures => "compact_closures",
            Guard::Decomposition => "decomposition",
        }
    }
}

/// All premises together imply every conclusion, under the guards.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Edge {
    pub name: &'static str,
    pub premises: &'static [Property],
    pub conclusions: &'static [Property],
    pub guards: &'static [Guard],
}

use Guard::*;
use Property::*;

pub const EDGES: &[Edge] = &[
    Edge {
        name: "char_zero => r_closed",
        premises: &[CharZero],
        conclusions: &[RClosed],
        guards: &[Hausdorff],
    },
    Edge {
        name: "r_closed => char_zero",
        premises: &[RClosed],
        conclusions: &[CharZero],
        guards: &[Hausdorff],
    },
    Edge {
        name: "pointwise_ap => symmetric_r",
        premises: &[PointwiseAp],
        conclusions: &[SymmetricR],
        guards: &[],
    },
    Edge {
        name: "symmetric_r => pointwise_ap",
        premises: &[SymmetricR],
        conclusions: &[PointwiseAp],
        guards: &[],
    },
    Edge {
        name: "weakly_ap => pointwise_ap & weakly_usc_classes",
        premises: &[WeaklyAp],
        conclusions: &[PointwiseAp, WeaklyUscClasses],
        guards: &[],
    },
    Edge {
        name: "pointwise_ap & weakly_usc_classes => weakly_ap",
        premises: &[PointwiseAp, WeaklyUscClasses],
        conclusions: &[WeaklyAp],
        guards: &[],
    },
    Edge {
        name: "weakly_ap => class_space_hausdorff",
        premises: &[WeaklyAp],
        conclusions: &[ClassSpaceHausdorff],
        guards: &[Normal],
    },
    Edge {
        name: "weakly_ap => r_closed",
        premises: &[WeaklyAp],
        conclusions: &[RClosed],
        guards: &[Hausdorff],
    },
    Edge {
        name: "minimal => char_zero & r_closed & weakly_ap & r_total",
        premises: &[Minimal],
        conclusions: &[CharZero, RClosed, WeaklyAp, RTotal],
        guards: &[],
    },
    Edge {
        name: "r_closed => weakly_ap",
        premises: &[RClosed],
        conclusions: &[WeaklyAp],
        guards: &[Decomposition, Hausdorff, CompactClosures],
    },
    Edge {
        name: "char_zero => r_closed (t3 decomposition)",
        premises: &[CharZero],
        conclusions: &[RClosed],
        guards: &[Decomposition, T3],
    },
    Edge {
        name: "r_closed => pointwise_ap & class_space_hausdorff",
        premises: &[RClosed],
        conclusions: &[PointwiseAp, ClassSpaceHausdorff],
        guards: &[Decomposition, T3],
    },
    Edge {
        name: "pointwise_ap & class_space_hausdorff => char_zero",
        premises: &[PointwiseAp, ClassSpaceHausdorff],
        conclusions: &[CharZero],
        guards: &[Decomposition, T3],
    },
    Edge {
        name: "weakly_equicontinuous => char_zero",
        premises: &[WeaklyEquicontinuous],
        conclusions: &[CharZero],
        guards: &[Metrizable],
    },
    Edge {
        name: "equicontinuous => weakly_equicontinuous",
        premises: &[Equicontinuous],
        conclusions: &[WeaklyEquicontinuous],
        guards: &[],
    },
    Edge {
        name: "equicontinuous => r_closed & char_zero",
        premises: &[Equicontinuous],
        conclusions: &[RClosed, CharZero],
        guards: &[Metrizable],
    },
];

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// Some premise is false.
    Vacuous,
    Holds,
    Violated(Vec<Property>),
    GuardFailed(Guard),
    Unknown(Property),
}

pub fn evaluate_edge(edge: &Edge, values: &Values, ctx: &Context) -> Outcome {
    if let Some(g) = edge.guards.iter().find(|g| !g.holds(ctx)) {
        return Outcome::GuardFailed(*g);
    }
    for &p in edge.premises.iter().chain(edge.conclusions) {
        if values.get(p).is_none() {
            return Outcome::Unknown(p);
        }
    }
    if edge.premises.iter().any(|&p| values.get(p) == Some(false)) {
        return Outcome::Vacuous;
    }
    let failed: Vec<Property> = edge
        .conclusions
        .iter()
        .copied()
        .filter(|&p| values.get(p) == Some(false))
        .collect();
    if failed.is_empty() {
        Outcome::Holds
    } else {
        Outcome::Violated(failed)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Skipped {
    pub edge: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ImplicationReport {
    pub checked: Vec<String>,
    pub skipped: Vec<Skipped>,
    #[serde(skip)]
    pub violations: Vec<Certificate>,
}

impl ImplicationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_values(values: &Values, ctx: &Context, kind: Kind) -> ImplicationReport {
    let mut r = ImplicationReport::default();
    for e in EDGES {
        match evaluate_edge(e, values, ctx) {
            Outcome::GuardFailed(g) => r.skipped.push(Skipped {
                edge: e.name.into(),
                reason: format!("guard {} fails", g.name()),
            }),
            Outcome::Unknown(p) => r.skipped.push(Skipped {
                edge: e.name.into(),
                reason: format!("{p} not applicable"),
            }),
            Outcome::Vacuous | Outcome::Holds => r.checked.push(e.name.into()),
            Outcome::Violated(failed) => {
                r.checked.push(e.name.into());
                r.violations.push(Certificate {
                    property: failed[0],
                    kind,
                    scale: None,
                    witness: Witness::ImplicationViolated {
                        edge: e.name.into(),
                        failed,
                    },
                });
            }
        }
    }
    r
}

pub fn verify_implications(profile: &PropertyProfile) -> ImplicationReport {
    let kind = match profile.backend {
        super::Backend::Finite => Kind::Exact,
        super::Backend::Metric => Kind::AtScale,
    };
    verify_values(&profile.values(), &profile.context, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_all() -> Context {
        Context {
            hausdorff: true,
            normal: true,
            t3: true,
            metrizable: true,
            compact_closures: true,
            decomposition: true,
        }
    }

    #[test]
    fn fabricated_minimal_without_r_closed() {
        let mut v = Values::default();
        for p in Property::ALL {
            v.set(p, Some(true));
        }
        v.set(Property::RClosed, Some(false));
        let mut ctx = ctx_all();
        ctx.hausdorff = false;
        ctx.t3 = false;
        ctx.compact_closures = false;
        ctx.metrizable = false;
        let r = verify_values(&v, &ctx, Kind::Exact);
        assert_eq!(r.violations.len(), 1);
        assert!(matches!(
            &r.violations[0].witness,
            Witness::ImplicationViolated { edge, failed } if edge.starts_with("minimal") && failed == &vec![Property::RClosed]
        ));
    }

    #[test]
    fn guards_and_unknowns_skip() {
        let mut v = Values::default();
        v.set(Property::CharZero, Some(true));
        v.set(Property::RClosed, Some(false));
        let mut ctx = Context::default();
        let r = verify_values(&v, &ctx, Kind::Exact);
        assert!(r.is_clean());
        assert!(r.skipped.iter().any(|s| s.reason == "guard hausdorff fails"));
        ctx.hausdorff = true;
        let r = verify_values(&v, &ctx, Kind::Exact);
        assert_eq!(r.violations.len(), 1);
        assert!(r.skipped.iter().any(|s| s.reason.ends_with("not applicable")));
    }

    #[test]
    fn every_edge_is_well_formed() {
        for e in EDGES {
            assert!(!e.premises.is_empty() && !e.conclusions.is_empty());
            assert!(e.premises.iter().all(|p| !e.conclusions.contains(p)));
        }
        let names: std::collections::HashSet<_> = EDGES.iter().map(|e| e.name).collect();
        assert_eq!(names.len(), EDGES.len());
    }
}
