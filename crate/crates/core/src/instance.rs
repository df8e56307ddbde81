//! Instances as JSON documents.
//!
//! ```json
//! {"name": "...",
//!  "space": {"kind": "finite", "n": 2, "leq": [[true, false], [false, true]]},
//!  "structure": {"kind": "action", "generators": [{"kind": "table", "map": [0, 0]}], "depth": 4}}
//! ```
//!
//! Metric spaces use `{"kind": "metric", "points": [[...]], "metric": "euclidean" | "cubic" |
//! "torus" | "matrix", "period", "matrix", "scales", "resolution", "compact", "tol"}`.
//! Structures are `{"kind": "semidecomposition", "member": [[bool]]}` with
//! `member[y][x]` meaning `x ∈ F(y)`, or actions with optional `snap_tol`,
//! `inverses` and `invertible_only`. Without a structure, `F(x) = {x}`.

use crate::actions::{ActionSpec, FiniteAction, Formula, Generator, MetricAction, SEMIGROUP_BOUND};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::props::finite::profile_finite;
use crate::props::metric::{profile_metric, ScaleConfig};
use crate::props::replay::{replay_finite, replay_metric};
use crate::props::{Certificate, PropertyProfile};
use crate::semidec::SemiDecomposition;
use crate::spaces::metric::DEFAULT_TOL;
use crate::spaces::{CoordMetric, FiniteSpace, Geometry, MetricSample, SampleSpec};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum Body {
    Finite {
        space: FiniteSpace,
        sd: SemiDecomposition,
        action: Option<FiniteAction>,
    },
    Metric {
        sample: Arc<MetricSample>,
        sets: Vec<PointSet>,
        action: Option<MetricAction>,
    },
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub body: Body,
}

fn perr(at: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{at}: {msg}"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(at, format!("missing field \"{key}\"")))
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| perr(at, "expected an object"))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(at, "expected an array"))
}

fn number(v: &Value, at: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| perr(at, "expected a number"))
}

fn uint(v: &Value, at: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| perr(at, "expected a non-negative integer"))
}

fn boolean(v: &Value, at: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| perr(at, "expected true or false"))
}

fn string<'a>(v: &'a Value, at: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| perr(at, "expected a string"))
}

fn bool_matrix(v: &Value, at: &str) -> Result<Vec<Vec<bool>>> {
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let at = format!("{at}[{i}]");
            array(row, &at)?
                .iter()
                .enumerate()
                .map(|(j, b)| boolean(b, &format!("{at}[{j}]")))
                .collect()
        })
        .collect()
}

fn num_matrix(v: &Value, at: &str) -> Result<Vec<Vec<f64>>> {
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let at = format!("{at}[{i}]");
            array(row, &at)?
                .iter()
                .enumerate()
                .map(|(j, b)| number(b, &format!("{at}[{j}]")))
                .collect()
        })
        .collect()
}

fn opt<'a>(obj: &'a Map<String, Value>, key: &str) -> Option<&'a Value> {
    obj.get(key).filter(|v| !v.is_null())
}

enum Space {
    Finite(FiniteSpace),
    Metric(Arc<MetricSample>),
}

fn parse_space(v: &Value) -> Result<Space> {
    let at = "space";
    let obj = object(v, at)?;
    match string(field(obj, "kind", at)?, "space.kind")? {
        "finite" => {
            let leq = bool_matrix(field(obj, "leq", at)?, "space.leq")?;
            if let Some(n) = opt(obj, "n") {
                let n = uint(n, "space.n")?;
                if n != leq.len() {
                    return Err(Error::SizeMismatch {
                        left: n,
                        right: leq.len(),
                    });
                }
            }
            if leq.is_empty() {
                return Err(Error::EmptySet);
            }
            Ok(Space::Finite(FiniteSpace::new(&leq)?))
        }
        "metric" => {
            let metric = match opt(obj, "metric") {
                Some(m) => string(m, "space.metric")?,
                None => "euclidean",
            };
            let mut spec = match metric {
                "matrix" => SampleSpec::matrix(&num_matrix(field(obj, "matrix", at)?, "space.matrix")?)?,
                "euclidean" | "cubic" | "torus" => {
                    let kind = match metric {
                        "euclidean" => CoordMetric::Euclidean,
                        "cubic" => CoordMetric::Cubic,
                        _ => CoordMetric::Torus {
                            period: match opt(obj, "period") {
                                Some(p) => number(p, "space.period")?,
                                None => 1.0,
                            },
                        },
                    };
                    let pts = num_matrix(field(obj, "points", at)?, "space.points")?;
                    SampleSpec::points(&pts, kind)?
                }
                other => return Err(perr("space.metric", format!("unknown metric \"{other}\""))),
            };
            if let Some(s) = opt(obj, "scales") {
                let l = array(s, "space.scales")?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| number(x, &format!("space.scales[{i}]")))
                    .collect::<Result<Vec<f64>>>()?;
                spec = spec.scales(l);
            }
            if let Some(r) = opt(obj, "resolution") {
                spec = spec.resolution(number(r, "space.resolution")?);
            }
            if let Some(c) = opt(obj, "compact") {
                spec = spec.compact(boolean(c, "space.compact")?);
            }
            if let Some(t) = opt(obj, "tol") {
                spec = spec.tol(number(t, "space.tol")?);
            }
            Ok(Space::Metric(Arc::new(spec.build()?)))
        }
        other => Err(perr("space.kind", format!("unknown kind \"{other}\""))),
    }
}

fn parse_generators(v: &Value, n: usize) -> Result<Vec<Generator>> {
    let at = "structure.generators";
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let at = format!("{at}[{i}]");
            let obj = object(g, &at)?;
            match string(field(obj, "kind", &at)?, &format!("{at}.kind"))? {
                "table" => {
                    let map = array(field(obj, "map", &at)?, &format!("{at}.map"))?
                        .iter()
                        .enumerate()
                        .map(|(j, y)| uint(y, &format!("{at}.map[{j}]")))
                        .collect::<Result<Vec<usize>>>()?;
                    if map.len() != n {
                        return Err(Error::SizeMismatch {
                            left: n,
                            right: map.len(),
                        });
                    }
                    Ok(Generator::Table(map))
                }
                "formula" => {
                    let name = string(field(obj, "name", &at)?, &format!("{at}.name"))?;
                    let mut params = BTreeMap::new();
                    if let Some(p) = opt(obj, "params") {
                        for (k, v) in object(p, &format!("{at}.params"))? {
                            params.insert(k.clone(), number(v, &format!("{at}.params.{k}"))?);
                        }
                    }
                    Ok(Generator::Formula(Formula::new(name, params)?))
                }
                other => Err(perr(&format!("{at}.kind"), format!("unknown kind \"{other}\""))),
            }
        })
        .collect()
}

impl Instance {
    pub fn parse(text: &str) -> Result<Instance> {
        let v: Value = serde_json::from_str(text).map_err(|e| perr("document", e))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Instance> {
        let obj = object(v, "document")?;
        let name = match opt(obj, "name") {
            Some(n) => string(n, "name")?.to_string(),
            None => "instance".to_string(),
        };
        let space = parse_space(field(obj, "space", "document")?)?;
        let n = match &space {
            Space::Finite(s) => s.len(),
            Space::Metric(m) => m.len(),
        };
        let structure = opt(obj, "structure");
        let body = match (space, structure) {
            (Space::Finite(space), None) => Body::Finite {
                sd: SemiDecomposition::singleton(n),
                space,
                action: None,
            },
            (Space::Metric(sample), None) => Body::Metric {
                sets: (0..n).map(|x| PointSet::singleton(n, x)).collect(),
                sample,
                action: None,
            },
            (space, Some(st)) => {
                let at = "structure";
                let so = object(st, at)?;
                match string(field(so, "kind", at)?, "structure.kind")? {
                    "semidecomposition" => {
                        let member = bool_matrix(field(so, "member", at)?, "structure.member")?;
                        if member.len() != n {
                            return Err(Error::SizeMismatch {
                                left: n,
                                right: member.len(),
                            });
                        }
                        let sd = SemiDecomposition::new(&member)?;
                        match space {
                            Space::Finite(space) => Body::Finite {
                                space,
                                sd,
                                action: None,
                            },
                            Space::Metric(sample) => Body::Metric {
                                sets: sd.sets().to_vec(),
                                sample,
                                action: None,
                            },
                        }
                    }
                    "action" => {
                        let gens = parse_generators(field(so, "generators", at)?, n)?;
                        let flag = |k: &str| -> Result<bool> {
                            opt(so, k).map_or(Ok(false), |b| boolean(b, &format!("structure.{k}")))
                        };
                        let invertible_only = flag("invertible_only")?;
                        let inverses = flag("inverses")?;
                        match space {
                            Space::Finite(space) => {
                                let tables = gens
                                    .into_iter()
                                    .map(|g| match g {
                                        Generator::Table(t) => Ok(t),
                                        Generator::Formula(_) => Err(Error::Unsupported(
                                            "formula generators need a metric space".into(),
                                        )),
                                    })
                                    .collect::<Result<Vec<_>>>()?;
                                let a = FiniteAction::new(n, tables, invertible_only || inverses)?;
                                Body::Finite {
                                    sd: a.induced_semidec()?,
                                    space,
                                    action: Some(a),
                                }
                            }
                            Space::Metric(sample) => {
                                let depth = uint(field(so, "depth", at)?, "structure.depth")?;
                                let mut spec = ActionSpec::new(gens, depth)
                                    .inverses(inverses)
                                    .invertible_only(invertible_only);
                                if let Some(t) = opt(so, "snap_tol") {
                                    spec = spec.snap_tol(number(t, "structure.snap_tol")?);
                                }
                                if let Some(b) = opt(so, "word_budget") {
                                    spec.word_budget = uint(b, "structure.word_budget")?;
                                }
                                let a = MetricAction::new(sample.clone(), spec)?;
                                Body::Metric {
                                    sets: a.orbits(),
                                    sample,
                                    action: Some(a),
                                }
                            }
                        }
                    }
                    other => return Err(perr("structure.kind", format!("unknown kind \"{other}\""))),
                }
            }
        };
        Ok(Instance { name, body })
    }

    pub fn len(&self) -> usize {
        match &self.body {
            Body::Finite { space, .. } => space.len(),
            Body::Metric { sample, .. } => sample.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> Result<Value> {
        let mut doc = Map::new();
        doc.insert("name".into(), json!(self.name));
        match &self.body {
            Body::Finite { space, sd, action } => {
                doc.insert(
                    "space".into(),
                    json!({"kind": "finite", "n": space.len(), "leq": space.leq_matrix()}),
                );
                let st = match action {
                    Some(a) => json!({
                        "kind": "action",
                        "generators": a.generators().iter()
                            .map(|g| json!({"kind": "table", "map": g}))
                            .collect::<Vec<_>>(),
                        "invertible_only": false,
                    }),
                    None => json!({"kind": "semidecomposition", "member": sd.member_matrix()}),
                };
                doc.insert("structure".into(), st);
            }
            Body::Metric { sample, sets, action } => {
                doc.insert("space".into(), sample_json(sample)?);
                let st = match action {
                    Some(a) => {
                        let spec = a.spec();
                        let mut st = Map::new();
                        st.insert("kind".into(), json!("action"));
                        st.insert(
                            "generators".into(),
                            Value::Array(
                                spec.generators
                                    .iter()
                                    .map(|g| match g {
                                        Generator::Table(t) => json!({"kind": "table", "map": t}),
                                        Generator::Formula(f) => {
                                            json!({"kind": "formula", "name": f.name, "params": f.params})
                                        }
                                    })
                                    .collect(),
                            ),
                        );
                        st.insert("depth".into(), json!(spec.depth));
                        st.insert("inverses".into(), json!(spec.inverses));
                        st.insert("invertible_only".into(), json!(spec.invertible_only));
                        if spec.snap_tol.is_finite() {
                            st.insert("snap_tol".into(), json!(spec.snap_tol));
                        }
                        if spec.word_budget != crate::actions::metric::WORD_BUDGET {
                            st.insert("word_budget".into(), json!(spec.word_budget));
                        }
                        Value::Object(st)
                    }
                    None => {
                        let n = sets.len();
                        let member: Vec<Vec<bool>> = sets
                            .iter()
                            .map(|s| (0..n).map(|x| s.contains(x)).collect())
                            .collect();
                        json!({"kind": "semidecomposition", "member": member})
                    }
                };
                doc.insert("structure".into(), st);
            }
        }
        Ok(Value::Object(doc))
    }

    pub fn profile(&self, cfg: &ScaleConfig) -> Result<PropertyProfile> {
        match &self.body {
            Body::Finite { space, sd, action } => profile_finite(space, sd, action.as_ref(), SEMIGROUP_BOUND),
            Body::Metric { sample, sets, action } => profile_metric(sample, sets, action.as_ref(), cfg),
        }
    }

    pub fn replay(&self, cert: &Certificate, cfg: &ScaleConfig) -> Result<bool> {
        match &self.body {
            Body::Finite { space, sd, action } => replay_finite(space, sd, action.as_ref(), cert),
            Body::Metric { sample, sets, action } => replay_metric(sample, sets, action.as_ref(), cert, cfg),
        }
    }
}

fn sample_json(m: &MetricSample) -> Result<Value> {
    let mut s = Map::new();
    s.insert("kind".into(), json!("metric"));
    match m.geometry() {
        Geometry::Coords { dim, data, kind } => {
            let pts: Vec<&[f64]> = data.chunks(*dim).collect();
            s.insert("points".into(), json!(pts));
            match kind {
                CoordMetric::Euclidean => {
                    s.insert("metric".into(), json!("euclidean"));
                }
                CoordMetric::Cubic => {
                    s.insert("metric".into(), json!("cubic"));
                }
                CoordMetric::Torus { period } => {
                    s.insert("metric".into(), json!("torus"));
                    s.insert("period".into(), json!(period));
                }
            }
        }
        Geometry::Matrix { data } => {
            let n = m.len();
            let rows: Vec<&[f64]> = data.chunks(n).collect();
            s.insert("metric".into(), json!("matrix"));
            s.insert("matrix".into(), json!(rows));
        }
        Geometry::Power { .. } => {
            return Err(Error::Unsupported("power samples have no instance form".into()))
        }
    }
    s.insert("scales".into(), json!(m.scales()));
    s.insert("resolution".into(), json!(m.resolution()));
    s.insert("compact".into(), json!(m.is_compact()));
    if m.tol() != DEFAULT_TOL {
        s.insert("tol".into(), json!(m.tol()));
    }
    Ok(Value::Object(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_round_trip() {
        let text = r#"{"name":"m","space":{"kind":"finite","n":2,"leq":[[true,false],[false,true]]},
            "structure":{"kind":"action","generators":[{"kind":"table","map":[0,0]}]}}"#;
        let i = Instance::parse(text).unwrap();
        let j = Instance::from_json(&i.to_json().unwrap()).unwrap();
        assert_eq!(i.to_json().unwrap(), j.to_json().unwrap());
        match &j.body {
            Body::Finite { sd, .. } => assert_eq!(sd.element(1).to_vec(), vec![0, 1]),
            _ => panic!(),
        }
    }

    #[test]
    fn errors_carry_locations() {
        let bad = r#"{"space":{"kind":"finite","leq":[[true,false],[true,1]]}}"#;
        match Instance::parse(bad) {
            Err(Error::Parse(m)) => assert!(m.starts_with("space.leq[1][1]"), "{m}"),
            other => panic!("{other:?}"),
        }
        let not_preorder = r#"{"space":{"kind":"finite","leq":[[true,true,false],[false,true,true],[false,false,true]]}}"#;
        assert!(matches!(
            Instance::parse(not_preorder),
            Err(Error::NotAPreorder { .. })
        ));
        assert!(matches!(Instance::parse("{"), Err(Error::Parse(_))));
        let nest = r#"{"space":{"kind":"finite","leq":[[true,false],[false,true]]},
            "structure":{"kind":"semidecomposition","member":[[true,false],[true,false]]}}"#;
        assert!(matches!(Instance::parse(nest), Err(Error::AxiomViolation { .. })));
    }

    #[test]
    fn metric_round_trip() {
        let text = r#"{"space":{"kind":"metric","metric":"torus","period":1.0,
            "points":[[0.0],[0.25],[0.5],[0.75]],"resolution":0.25,"compact":true},
            "structure":{"kind":"action","generators":[{"kind":"formula","name":"rotation","params":{"alpha":0.25}}],
            "depth":3,"snap_tol":0.01,"inverses":true}}"#;
        let i = Instance::parse(text).unwrap();
        let v = i.to_json().unwrap();
        let j = Instance::from_json(&v).unwrap();
        assert_eq!(v, j.to_json().unwrap());
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.find("\"name\"").unwrap() < s.find("\"space\"").unwrap());
        match &j.body {
            Body::Metric { sets, .. } => assert_eq!(sets[0].len(), 4),
            _ => panic!(),
        }
    }
}
