//! Closed-form and integrated self-maps on coordinates.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Formula {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    #[serde(skip)]
    kind: Kind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Identity,
    Scale { factor: f64 },
    Translate { shift: f64 },
    Rotation { alpha: f64, period: f64 },
    ToralShear { dt: f64 },
    SphereTwist { dt: f64 },
    PuncturedFlow(Punctured),
}

/// Time-`dt` map of `(1 - f) (1, theta)` on the unit torus, where
/// `f = (((1 + cos 2π(x - x0)) / 2) ((1 + cos 2π(y - y0)) / 2))^power`
/// equals 1 only at `(x0, y0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Punctured {
    pub theta: f64,
    pub dt: f64,
    pub x0: f64,
    pub y0: f64,
    pub power: f64,
    pub substeps: usize,
}

impl Punctured {
    pub fn bump(&self, x: f64, y: f64) -> f64 {
        let bx = (1.0 + (TAU * (x - self.x0)).cos()) / 2.0;
        let by = (1.0 + (TAU * (y - self.y0)).cos()) / 2.0;
        (bx * by).powf(self.power)
    }

    fn field(&self, x: f64, y: f64) -> (f64, f64) {
        let s = 1.0 - self.bump(x, y);
        (s, s * self.theta)
    }

    pub fn step(&self, p: &[f64]) -> Vec<f64> {
        let (mut x, mut y) = (p[0], p[1]);
        let h = self.dt / self.substeps as f64;
        for _ in 0..self.substeps {
            let k1 = self.field(x, y);
            let k2 = self.field(x + h / 2.0 * k1.0, y + h / 2.0 * k1.1);
            let k3 = self.field(x + h / 2.0 * k2.0, y + h / 2.0 * k2.1);
            let k4 = self.field(x + h * k3.0, y + h * k3.1);
            x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            y += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        vec![x.rem_euclid(1.0), y.rem_euclid(1.0)]
    }
}

impl Default for Kind {
    fn default() -> Self {
        Kind::Identity
    }
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key) {
        Some(v) if v.is_finite() => Ok(*v),
        Some(v) => Err(Error::BadParameter(format!("{key} = {v}"))),
        None => default.ok_or_else(|| Error::BadParameter(format!("missing parameter {key}"))),
    }
}

/// Toral shear speed `2 + cos 2πx`.
pub fn toral_speed(x: f64) -> f64 {
    2.0 + (TAU * x).cos()
}

impl Formula {
    pub fn new(name: &str, params: BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "identity" => &[],
            "scale" => &["factor"],
            "translate" => &["shift"],
            "rotation" => &["alpha", "period"],
            "toral_shear" => &["dt"],
            "sphere_twist" => &["dt"],
            "punctured_flow" => &["theta", "dt", "x0", "y0", "power", "substeps"],
            _ => return Err(Error::UnknownFormula(name.to_string())),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::BadParameter(format!("{name} has no parameter {k}")));
        }
        let p = &params;
        let kind = match name {
            "identity" => Kind::Identity,
            "scale" => Kind::Scale {
                factor: param(p, "factor", None)?,
            },
            "translate" => Kind::Translate {
                shift: param(p, "shift", None)?,
            },
            "rotation" => {
                let period = param(p, "period", Some(1.0))?;
                if !(period > 0.0) {
                    return Err(Error::BadParameter("rotation period must be positive".into()));
                }
                Kind::Rotation {
                    alpha: param(p, "alpha", None)?,
                    period,
                }
            }
            "toral_shear" => Kind::ToralShear {
                dt: param(p, "dt", None)?,
            },
            "sphere_twist" => Kind::SphereTwist {
                dt: param(p, "dt", None)?,
            },
            _ => {
                let substeps = param(p, "substeps", Some(4.0))?;
                if !(substeps >= 1.0) || substeps.fract() != 0.0 {
                    return Err(Error::BadParameter("substeps must be a positive integer".into()));
                }
                let power = param(p, "power", Some(1.0))?;
                if !(power > 0.0) {
                    return Err(Error::BadParameter("power must be positive".into()));
                }
                Kind::PuncturedFlow(Punctured {
                    theta: param(p, "theta", None)?,
                    dt: param(p, "dt", None)?,
                    x0: param(p, "x0", Some(0.0))?,
                    y0: param(p, "y0", Some(0.0))?,
                    power,
                    substeps: substeps as usize,
                })
            }
        };
        Ok(Formula {
            name: name.to_string(),
            params,
            kind,
        })
    }

    pub fn with(name: &str, params: &[(&str, f64)]) -> Result<Self> {
        Self::new(
            name,
            params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        )
    }

    /// Required coordinate dimension, if any.
    pub fn dim(&self) -> Option<usize> {
        match self.kind {
            Kind::Identity | Kind::Scale { .. } | Kind::Translate { .. } => None,
            Kind::Rotation { .. } => Some(1),
            Kind::ToralShear { .. } | Kind::PuncturedFlow(_) => Some(2),
            Kind::SphereTwist { .. } => Some(3),
        }
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        match self.kind {
            Kind::Identity => p.to_vec(),
            Kind::Scale { factor } => p.iter().map(|v| v * factor).collect(),
            Kind::Translate { shift } => p.iter().map(|v| v + shift).collect(),
            Kind::Rotation { alpha, period } => vec![(p[0] + alpha).rem_euclid(period)],
            Kind::ToralShear { dt } => {
                vec![p[0], (p[1] + toral_speed(p[0]) * dt).rem_euclid(1.0)]
            }
            Kind::SphereTwist { dt } => {
                let a = p[2] * p[2] * dt;
                let (s, c) = a.sin_cos();
                vec![c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
            }
            Kind::PuncturedFlow(f) => f.step(p),
        }
    }

    /// The inverse map. Integrated flows are inverted by integrating backwards,
    /// which is exact only up to the integration error.
    pub fn inverse(&self) -> Result<Formula> {
        let mut params = self.params.clone();
        let flip = |params: &mut BTreeMap<String, f64>, k: &str| {
            if let Some(v) = params.get_mut(k) {
                *v = -*v;
            }
        };
        match self.kind {
            Kind::Identity => {}
            Kind::Scale { factor } => {
                if factor == 0.0 {
                    return Err(Error::NotInvertible(0));
                }
                params.insert("factor".into(), 1.0 / factor);
            }
            Kind::Translate { .. } => flip(&mut params, "shift"),
            Kind::Rotation { .. } => flip(&mut params, "alpha"),
            Kind::ToralShear { .. } | Kind::SphereTwist { .. } | Kind::PuncturedFlow(_) => {
                flip(&mut params, "dt")
            }
        }
        Formula::new(&self.name, params)
    }

    pub fn punctured(&self) -> Option<Punctured> {
        match self.kind {
            Kind::PuncturedFlow(p) => Some(p),
            _ => None,
        }
    }
}
