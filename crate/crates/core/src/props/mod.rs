//! Property checkers and the implication verifier.
//!
//! Finite instances get exact verdicts. Metric samples get verdicts stated at
//! a ladder scale, together with the per-scale data they were read from.

pub mod distal;
pub mod finite;
pub mod implications;
pub mod metric;
pub mod modulus;
pub mod regular;
pub mod replay;

use crate::spaces::SeparationFlags;
use serde::Serialize;
use std::collections::BTreeMap;

pub use implications::{verify_implications, Edge, Guard, ImplicationReport, EDGES};
pub use modulus::ModulusCurve;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    RClosed,
    CharZero,
    PointwiseAp,
    SymmetricR,
    WeaklyAp,
    Minimal,
    WeaklyUscClasses,
    UscClasses,
    ClassSpaceHausdorff,
    RTotal,
    Equicontinuous,
    WeaklyEquicontinuous,
    Distal,
    RegularAction,
    PointwiseRecurrent,
    PointwisePeriodic,
}

impl Property {
    pub const COUNT: usize = 16;
    pub const ALL: [Property; Property::COUNT] = [
        Property::RClosed,
        Property::CharZero,
        Property::PointwiseAp,
        Property::SymmetricR,
        Property::WeaklyAp,
        Property::Minimal,
        Property::WeaklyUscClasses,
        Property::UscClasses,
        Property::ClassSpaceHausdorff,
        Property::RTotal,
        Property::Equicontinuous,
        Property::WeaklyEquicontinuous,
        Property::Distal,
        Property::RegularAction,
        Property::PointwiseRecurrent,
        Property::PointwisePeriodic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::RClosed => "r_closed",
            Property::CharZero => "char_zero",
            Property::PointwiseAp => "pointwise_ap",
            Property::SymmetricR => "symmetric_r",
            Property::WeaklyAp => "weakly_ap",
            Property::Minimal => "minimal",
            Property::WeaklyUscClasses => "weakly_usc_classes",
            Property::UscClasses => "usc_classes",
            Property::ClassSpaceHausdorff => "class_space_hausdorff",
            Property::RTotal => "r_total",
            Property::Equicontinuous => "equicontinuous",
            Property::WeaklyEquicontinuous => "weakly_equicontinuous",
            Property::Distal => "distal",
            Property::RegularAction => "regular_action",
            Property::PointwiseRecurrent => "pointwise_recurrent",
            Property::PointwisePeriodic => "pointwise_periodic",
        }
    }

    /// Accepts the snake-case name and a few common aliases.
    pub fn parse(s: &str) -> Option<Property> {
        let s = s.trim();
        let alias = match s {
            "regular" => Some(Property::RegularAction),
            "char0" => Some(Property::CharZero),
            "pap" => Some(Property::PointwiseAp),
            "wap" => Some(Property::WeaklyAp),
            "weakly_usc" => Some(Property::WeaklyUscClasses),
            "usc" => Some(Property::UscClasses),
            _ => None,
        };
        alias.or_else(|| Property::ALL.into_iter().find(|p| p.name() == s))
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Exact,
    AtScale,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleVerdict {
    pub scale: f64,
    pub value: Option<bool>,
}

/// `value` is `None` when the property does not apply to the instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub value: Option<bool>,
    pub kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_scale: Vec<ScaleVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Verdict {
    pub fn exact(value: bool) -> Self {
        Verdict {
            value: Some(value),
            kind: Kind::Exact,
            scale: None,
            per_scale: Vec::new(),
            reason: None,
        }
    }

    pub fn not_applicable(kind: Kind, reason: impl Into<String>) -> Self {
        Verdict {
            value: None,
            kind,
            scale: None,
            per_scale: Vec::new(),
            reason: Some(reason.into()),
        }
    }

    /// Summary taken at the finest scale with a definite value.
    pub fn at_scale(per_scale: Vec<ScaleVerdict>) -> Self {
        let pick = per_scale
            .iter()
            .filter(|s| s.value.is_some())
            .min_by(|a, b| a.scale.total_cmp(&b.scale))
            .cloned();
        match pick {
            Some(s) => Verdict {
                value: s.value,
                kind: Kind::AtScale,
                scale: Some(s.scale),
                per_scale,
                reason: None,
            },
            None => Verdict {
                value: None,
                kind: Kind::AtScale,
                scale: None,
                per_scale,
                reason: Some("no informative scale in the verdict window".into()),
            },
        }
    }

    pub fn is_true(&self) -> bool {
        self.value == Some(true)
    }

    pub fn is_false(&self) -> bool {
        self.value == Some(false)
    }
}

/// Evidence for a failed property. Point indices refer to the instance; for
/// class-space and product witnesses they are listed explicitly.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `(x, y)` lies below `(above_x, y)` in the product order, the latter is
    /// in `R` and the former is not.
    RNotDownSet { x: usize, y: usize, above_x: usize },
    /// `near_y ∈ F(near_x)` with `near_x` approaching `x` and `y` within the
    /// scale of `near_y`, yet `y` is outside the inflated closure of `F(x)`.
    REscapes {
        x: usize,
        y: usize,
        near_x: usize,
        near_y: usize,
    },
    /// `y ∈ D(x)` but not in the (inflated) element closure of `x`.
    ProlongationExcess { x: usize, y: usize },
    /// `z` lies in the element closure of `x`, and the two closures differ at
    /// `differs_at` (nested closures).
    ClosureNotMinimal { x: usize, z: usize, differs_at: usize },
    /// `y ∈ cl F(x)` but `x ∉ cl F(y)`.
    AsymmetricPair { x: usize, y: usize },
    /// The union of element closures over the closed set is not closed.
    SaturationNotClosed { closed_set: Vec<usize>, missing: usize },
    /// `missing` is outside the element closure of `x`.
    NotDense { x: usize, missing: usize },
    ClassNotClosed { class: Vec<usize>, point: usize },
    /// No invariant open set between `class` and `open`; `escape` lies in the
    /// class but outside the largest invariant open subset of `open`.
    NoInvariantNeighbourhood {
        class: Vec<usize>,
        open: Vec<usize>,
        escape: usize,
    },
    /// At scale: `near` approaches the closure of `x`, and its own closure
    /// reaches `escape` outside the inflated closure of `x`.
    UscAtScale {
        x: usize,
        near: usize,
        escape: usize,
    },
    InseparableClasses {
        a: Vec<usize>,
        b: Vec<usize>,
        common: Vec<usize>,
    },
    /// `y` is outside the element closure of `x`.
    NotTotal { x: usize, y: usize },
    /// A modulus curve value above the allowed bound.
    Modulus {
        curve: String,
        delta: f64,
        value: f64,
        x: usize,
        y: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        word: Option<String>,
    },
    /// Finite backend: `map` sends `x` and `y` to points whose closures meet at `meet`.
    FiniteProximal {
        x: usize,
        y: usize,
        map: Vec<usize>,
        meet: usize,
    },
    ProximalPair {
        x: usize,
        y: usize,
        word: String,
        distance: f64,
        min_distance: f64,
    },
    /// `map` belongs to the maximal admissible set at `x` for `open`, but
    /// sends `escape ∈ ↑x` outside `open`.
    Irregular {
        x: usize,
        open: Vec<usize>,
        map: Vec<usize>,
        escape: usize,
    },
    NotRecurrent { x: usize, min_return: f64 },
    NotPeriodic { x: usize, min_return: f64 },
    ImplicationViolated {
        edge: String,
        failed: Vec<Property>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub property: Property,
    pub kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    pub witness: Witness,
}

impl Certificate {
    pub fn exact(property: Property, witness: Witness) -> Self {
        Certificate {
            property,
            kind: Kind::Exact,
            scale: None,
            witness,
        }
    }

    pub fn at_scale(property: Property, scale: f64, witness: Witness) -> Self {
        Certificate {
            property,
            kind: Kind::AtScale,
            scale: Some(scale),
            witness,
        }
    }
}

/// Hypotheses available to the implication guards.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Context {
    pub hausdorff: bool,
    pub normal: bool,
    pub t3: bool,
    pub metrizable: bool,
    pub compact_closures: bool,
    pub decomposition: bool,
}

/// Tri-state value per property, indexed by [`Property::index`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Values(pub [Option<bool>; Property::COUNT]);

impl Values {
    pub fn get(&self, p: Property) -> Option<bool> {
        self.0[p.index()]
    }

    pub fn set(&mut self, p: Property, v: Option<bool>) {
        self.0[p.index()] = v;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Finite,
    Metric,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyProfile {
    pub backend: Backend,
    pub space: SeparationFlags,
    pub context: Context,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_space_separation: Option<SeparationFlags>,
    pub verdicts: BTreeMap<Property, Verdict>,
    #[serde(skip)]
    pub certificates: Vec<Certificate>,
    #[serde(skip)]
    pub curves: Vec<ModulusCurve>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl PropertyProfile {
    pub fn new(backend: Backend, space: SeparationFlags, context: Context) -> Self {
        PropertyProfile {
            backend,
            space,
            context,
            class_space_separation: None,
            verdicts: BTreeMap::new(),
            certificates: Vec::new(),
            curves: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn get(&self, p: Property) -> Option<&Verdict> {
        self.verdicts.get(&p)
    }

    pub fn value(&self, p: Property) -> Option<bool> {
        self.verdicts.get(&p).and_then(|v| v.value)
    }

    pub fn values(&self) -> Values {
        let mut v = Values::default();
        for (p, verdict) in &self.verdicts {
            v.set(*p, verdict.value);
        }
        v
    }

    pub fn certificate(&self, p: Property) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.property == p)
    }

    pub fn curve(&self, name: &str) -> Option<&ModulusCurve> {
        self.curves.iter().find(|c| c.name == name)
    }

    /// Properties reported false without an accompanying certificate.
    pub fn uncertified_failures(&self) -> Vec<Property> {
        self.verdicts
            .iter()
            .filter(|(p, v)| v.is_false() && self.certificate(**p).is_none())
            .map(|(p, _)| *p)
            .collect()
    }

    pub(crate) fn put(&mut self, p: Property, v: Verdict) {
        self.verdicts.insert(p, v);
    }

    /// Keeps only the selected properties (and their certificates).
    pub fn restrict(&mut self, keep: &[Property]) {
        self.verdicts.retain(|p, _| keep.contains(p));
        self.certificates.retain(|c| keep.contains(&c.property));
    }
}

pub use metric::ScaleConfig;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(Property::parse(p.name()), Some(p));
            assert_eq!(serde_json::to_value(p).unwrap(), p.name());
        }
        assert_eq!(Property::parse("regular"), Some(Property::RegularAction));
        assert_eq!(Property::parse("nosuch"), None);
    }

    #[test]
    fn at_scale_summary_uses_finest_definite_scale() {
        let v = Verdict::at_scale(vec![
            ScaleVerdict { scale: 0.5, value: Some(false) },
            ScaleVerdict { scale: 0.25, value: Some(true) },
            ScaleVerdict { scale: 0.125, value: None },
        ]);
        assert_eq!(v.value, Some(true));
        assert_eq!(v.scale, Some(0.25));
        let none = Verdict::at_scale(vec![ScaleVerdict { scale: 0.5, value: None }]);
        assert_eq!(none.value, None);
    }
}
