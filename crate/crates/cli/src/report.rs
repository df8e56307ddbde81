//! Report assembly and rendering.

use serde_json::{json, Value};
use std::collections::BTreeMap;
use tdyn::instance::Instance;
use tdyn::miner::ScanReport;
use tdyn::props::{verify_implications, Certificate, ImplicationReport, ModulusCurve, Property, PropertyProfile, ScaleConfig};
use tdyn::Error;

pub fn parse_expected(v: &Value) -> Result<BTreeMap<Property, bool>, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("expected: not an object".into()))?;
    obj.iter()
        .map(|(k, b)| {
            let p = Property::parse(k).ok_or_else(|| Error::Parse(format!("expected.{k}: unknown property")))?;
            let b = b
                .as_bool()
                .ok_or_else(|| Error::Parse(format!("expected.{k}: expected true or false")))?;
            Ok((p, b))
        })
        .collect()
}

pub fn config_json(c: &ScaleConfig) -> Value {
    let mut v = json!({"inflation": c.inflation, "burn": c.burn, "floor": c.floor});
    if let Some(t) = c.tau {
        v["tau"] = json!(t);
    }
    if let Some(r) = c.rho {
        v["rho"] = json!(r);
    }
    v
}

pub fn parse_config(v: &Value) -> Result<ScaleConfig, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("config: not an object".into()))?;
    let mut c = ScaleConfig::default();
    for (k, x) in obj {
        let num = || {
            x.as_f64()
                .filter(|f| f.is_finite())
                .ok_or_else(|| Error::Parse(format!("config.{k}: expected a number")))
        };
        match k.as_str() {
            "inflation" => c.inflation = num()?,
            "floor" => c.floor = num()?,
            "tau" => c.tau = Some(num()?),
            "rho" => c.rho = Some(num()?),
            "burn" => {
                c.burn = x
                    .as_u64()
                    .ok_or_else(|| Error::Parse("config.burn: expected a whole number".into()))?
                    as usize
            }
            _ => return Err(Error::Parse(format!("config.{k}: unknown field"))),
        }
    }
    Ok(c)
}

pub struct Mismatch {
    pub property: Property,
    pub expected: bool,
    pub got: Option<bool>,
}

pub struct Report {
    pub name: String,
    pub points: usize,
    pub profile: PropertyProfile,
    /// Certificates with the outcome of replaying them on the instance, when a replay exists.
    pub certificates: Vec<(Certificate, Option<bool>)>,
    pub curves: Vec<ModulusCurve>,
    pub guards: ImplicationReport,
    pub expected: Option<Vec<Mismatch>>,
}

impl Report {
    pub fn build(
        inst: &Instance,
        mut profile: PropertyProfile,
        cfg: &ScaleConfig,
        selected: &[Property],
        expected: Option<&BTreeMap<Property, bool>>,
    ) -> Report {
        let guards = verify_implications(&profile);
        let expected = expected.map(|e| {
            e.iter()
                .filter(|(p, _)| selected.is_empty() || selected.contains(p))
                .filter_map(|(&p, &want)| {
                    let got = profile.value(p);
                    (got != Some(want)).then_some(Mismatch {
                        property: p,
                        expected: want,
                        got,
                    })
                })
                .collect()
        });
        if !selected.is_empty() {
            profile.restrict(selected);
        }
        let mut certificates: Vec<(Certificate, Option<bool>)> = profile
            .certificates
            .iter()
            .map(|c| (c.clone(), inst.replay(c, cfg).ok()))
            .collect();
        certificates.extend(guards.violations.iter().map(|c| (c.clone(), None)));
        let curves = std::mem::take(&mut profile.curves);
        Report {
            name: inst.name.clone(),
            points: inst.len(),
            profile,
            certificates,
            curves,
            guards,
            expected,
        }
    }

    pub fn violations(&self) -> usize {
        self.guards.violations.len()
    }

    pub fn mismatches(&self) -> usize {
        self.expected.as_ref().map_or(0, |m| m.len())
    }

    fn guards_json(&self) -> Vec<Value> {
        let mut out: Vec<Value> = self
            .guards
            .checked
            .iter()
            .map(|e| {
                let violated = self.guards.violations.iter().any(|c| {
                    matches!(&c.witness, tdyn::props::Witness::ImplicationViolated { edge, .. } if edge == e)
                });
                json!({"edge": e, "status": if violated { "violated" } else { "checked" }})
            })
            .collect();
        out.extend(
            self.guards
                .skipped
                .iter()
                .map(|s| json!({"edge": s.edge, "status": "skipped", "reason": s.reason})),
        );
        out
    }

    pub fn to_json(&self) -> String {
        let certs: Vec<Value> = self
            .certificates
            .iter()
            .map(|(c, r)| {
                let mut v = serde_json::to_value(c).unwrap_or(Value::Null);
                if let (Some(r), Some(o)) = (r, v.as_object_mut()) {
                    o.insert("replayed".into(), json!(r));
                }
                v
            })
            .collect();
        let mut doc = json!({
            "instance": {"name": self.name, "points": self.points},
            "profile": self.profile,
            "certificates": certs,
            "curves": self.curves,
            "guards": self.guards_json(),
        });
        if let Some(m) = &self.expected {
            doc["expectation"] = json!({
                "mismatches": m.iter().map(|m| json!({
                    "property": m.property.name(),
                    "expected": m.expected,
                    "got": m.got,
                })).collect::<Vec<_>>(),
            });
        }
        serde_json::to_string_pretty(&doc).unwrap_or_default()
    }

    fn witness_of(&self, p: Property) -> Option<String> {
        self.certificates
            .iter()
            .find(|(c, _)| c.property == p)
            .and_then(|(c, _)| serde_json::to_string(&c.witness).ok())
    }

    /// Columns `property,verdict,scale,witness`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("property,verdict,scale,witness\n");
        for (p, v) in &self.profile.verdicts {
            let verdict = match v.value {
                Some(true) => "true",
                Some(false) => "false",
                None => "n/a",
            };
            let scale = v.scale.map(|x| x.to_string()).unwrap_or_default();
            let witness = self
                .witness_of(*p)
                .map(|w| format!("\"{}\"", w.replace('"', "\"\"")))
                .unwrap_or_default();
            s.push_str(&format!("{},{verdict},{scale},{witness}\n", p.name()));
        }
        s
    }

    pub fn to_human(&self) -> String {
        let mut s = format!("{} ({} points)\n", self.name, self.points);
        for (p, v) in &self.profile.verdicts {
            let verdict = match v.value {
                Some(b) => b.to_string(),
                None => format!("n/a ({})", v.reason.as_deref().unwrap_or("not evaluated")),
            };
            match v.scale {
                Some(sc) => s.push_str(&format!("{}: {verdict} at scale {sc:.6}\n", p.name())),
                None => s.push_str(&format!("{}: {verdict}\n", p.name())),
            }
        }
        if !self.certificates.is_empty() {
            s.push_str("\ncertificates\n");
            for (c, r) in &self.certificates {
                let replay = match r {
                    Some(true) => " [replayed]",
                    Some(false) => " [REPLAY FAILED]",
                    None => "",
                };
                s.push_str(&format!(
                    "  {}: {}{replay}\n",
                    c.property.name(),
                    serde_json::to_string(&c.witness).unwrap_or_default()
                ));
            }
        }
        for c in &self.curves {
            s.push_str(&format!("\n{} curve\n  {:>12}  {:>12}  {:>8}\n", c.name, "delta", "value", "pairs"));
            for p in &c.points {
                s.push_str(&format!("  {:>12.6}  {:>12.6}  {:>8}\n", p.delta, p.value, p.pairs));
            }
        }
        s.push_str(&format!(
            "\nimplications: {} checked, {} skipped, {} violated\n",
            self.guards.checked.len(),
            self.guards.skipped.len(),
            self.violations()
        ));
        if let Some(m) = &self.expected {
            if m.is_empty() {
                s.push_str("expected profile: matched\n");
            }
            for m in m {
                s.push_str(&format!(
                    "expected {} = {}, got {}\n",
                    m.property.name(),
                    m.expected,
                    m.got.map_or("n/a".to_string(), |b| b.to_string())
                ));
            }
        }
        s
    }
}

pub fn mine_human(r: &ScanReport) -> String {
    let mut s = format!(
        "n = {}: {} pre-orders, {} pairs, {} violations\n",
        r.n,
        r.preorders,
        r.pairs,
        r.violations.len()
    );
    for e in &r.edges {
        s.push_str(&format!(
            "  {:55} holds {:>7}  vacuous {:>7}  violated {:>5}  guard off {:>7}  converse fails {:>7}\n",
            e.edge, e.holds, e.vacuous, e.violated, e.guard_failed, e.converse_failures
        ));
    }
    s.push_str(&format!(
        "r_closed routes: {} agree, {} disagree\n",
        r.r_closed_routes.agree, r.r_closed_routes.disagree
    ));
    s.push_str(&format!(
        "pointwise_ap minimality vs symmetry: {} agree, {} disagree\n",
        r.pap_forms.agree, r.pap_forms.disagree
    ));
    let c = &r.char_zero_vs_r_closed_non_hausdorff;
    s.push_str(&format!(
        "char_zero vs r_closed on non-Hausdorff spaces: {} agree, {} disagree\n",
        c.agree, c.disagree
    ));
    s.push_str(&format!(
        "pointwise_ap but not weakly_ap: {}\n",
        if r.pap_not_wap.is_some() { "found" } else { "none" }
    ));
    s
}

/// Columns `property,true,false,not_applicable`.
pub fn counts_csv(r: &ScanReport) -> String {
    let mut s = String::from("property,true,false,not_applicable\n");
    for (p, c) in &r.counts.properties {
        s.push_str(&format!("{},{},{},{}\n", p.name(), c.holds, c.fails, c.not_applicable));
    }
    s
}
