//! Actions on metric samples with truncated word sets.

use super::{is_bijection, power_table, validate_table, Formula};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::semidec::SemiDecomposition;
use crate::spaces::MetricSample;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

/// Default cap on the number of enumerated words.
pub const WORD_BUDGET: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Table(Vec<usize>),
    Formula(Formula),
}

#[derive(Clone, Debug)]
pub struct ActionSpec {
    pub generators: Vec<Generator>,
    pub depth: usize,
    /// Largest accepted one-step snap distance.
    pub snap_tol: f64,
    /// Also act by the inverse of every generator.
    pub inverses: bool,
    /// Reject generators that are not bijections.
    pub invertible_only: bool,
    pub word_budget: usize,
}

impl ActionSpec {
    pub fn new(generators: Vec<Generator>, depth: usize) -> Self {
        ActionSpec {
            generators,
            depth,
            snap_tol: f64::INFINITY,
            inverses: false,
            invertible_only: false,
            word_budget: WORD_BUDGET,
        }
    }

    pub fn snap_tol(mut self, t: f64) -> Self {
        self.snap_tol = t;
        self
    }

    pub fn inverses(mut self, on: bool) -> Self {
        self.inverses = on;
        self
    }

    pub fn invertible_only(mut self, on: bool) -> Self {
        self.invertible_only = on;
        self
    }
}

/// A word in the generators, applied right to left. Letter `2g` is generator
/// `g`, letter `2g + 1` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let sign = if l % 2 == 1 { "-" } else { "" };
            let k = j - i;
            if k == 1 && sign.is_empty() {
                parts.push(format!("g{}", l / 2));
            } else {
                parts.push(format!("g{}^{}{}", l / 2, sign, k));
            }
            i = j;
        }
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug)]
enum Letter {
    Table(Vec<usize>),
    Formula(Formula),
}

#[derive(Clone, Debug)]
pub struct MetricAction {
    sample: Arc<MetricSample>,
    spec: ActionSpec,
    words: Vec<Word>,
    images: Vec<Vec<u32>>,
    max_snap: f64,
    truncated: bool,
    invertible: bool,
}

/// Exact or index-only positions of all sample points under one word.
enum State {
    Exact(Vec<f64>),
    Index,
}

impl MetricAction {
    pub fn new(sample: Arc<MetricSample>, spec: ActionSpec) -> Result<Self> {
        if spec.generators.is_empty() {
            return Err(Error::EmptyGeneratorSet);
        }
        let n = sample.len();
        let mut invertible = true;
        let mut letters: Vec<Option<Letter>> = Vec::new();
        for (i, g) in spec.generators.iter().enumerate() {
            match g {
                Generator::Table(t) => {
                    validate_table(n, t)?;
                    let bij = is_bijection(t);
                    invertible &= bij;
                    if (spec.invertible_only || spec.inverses) && !bij {
                        return Err(Error::NotInvertible(i));
                    }
                    letters.push(Some(Letter::Table(t.clone())));
                    letters.push(if spec.inverses {
                        let mut inv = vec![0; n];
                        for (x, &y) in t.iter().enumerate() {
                            inv[y] = x;
                        }
                        Some(Letter::Table(inv))
                    } else {
                        None
                    });
                }
                Generator::Formula(f) => {
                    let dim = sample.dim().ok_or_else(|| {
                        Error::Unsupported("formula generators need a coordinate sample".into())
                    })?;
                    if let Some(d) = f.dim() {
                        if d != dim {
                            return Err(Error::SizeMismatch { left: d, right: dim });
                        }
                    }
                    let bij = !matches!(f.name.as_str(), "scale")
                        || f.params.get("factor").map_or(false, |v| v.abs() == 1.0);
                    invertible &= bij;
                    if spec.invertible_only && !bij {
                        return Err(Error::NotInvertible(i));
                    }
                    letters.push(Some(Letter::Formula(f.clone())));
                    letters.push(if spec.inverses {
                        Some(Letter::Formula(f.inverse().map_err(|_| Error::NotInvertible(i))?))
                    } else {
                        None
                    });
                }
            }
        }
        for (l, letter) in letters.iter().enumerate() {
            if let Some(Letter::Formula(f)) = letter {
                for x in 0..n {
                    let (_, d) = sample.snap(&f.apply(sample.coords(x).unwrap()))?;
                    if d > spec.snap_tol {
                        return Err(Error::SnapExceeded {
                            point: x,
                            generator: l / 2,
                            distance: d,
                        });
                    }
                }
            }
        }
        let mut act = MetricAction {
            sample,
            spec,
            words: Vec::new(),
            images: Vec::new(),
            max_snap: 0.0,
            truncated: false,
            invertible,
        };
        act.enumerate_words(&letters)?;
        Ok(act)
    }

    fn apply_letter(&self, letter: &Letter, img: &[u32], state: &State) -> Result<(Vec<u32>, State, f64)> {
        let m = &self.sample;
        match letter {
            Letter::Table(t) => Ok((img.iter().map(|&y| t[y as usize] as u32).collect(), State::Index, 0.0)),
            Letter::Formula(f) => {
                let dim = m.dim().unwrap();
                let n = m.len();
                let rows: Vec<(Vec<f64>, u32, f64)> = (0..n)
                    .into_par_iter()
                    .map(|x| {
                        let p = match state {
                            State::Exact(c) => &c[x * dim..(x + 1) * dim],
                            State::Index => m.coords(img[x] as usize).unwrap(),
                        };
                        let q = f.apply(p);
                        let (s, d) = m.snap(&q).unwrap();
                        (q, s as u32, d)
                    })
                    .collect();
                let mut coords = Vec::with_capacity(n * dim);
                let mut out = Vec::with_capacity(n);
                let mut err: f64 = 0.0;
                for (q, s, d) in rows {
                    coords.extend(q);
                    out.push(s);
                    err = err.max(d);
                }
                Ok((out, State::Exact(coords), err))
            }
        }
    }

    fn enumerate_words(&mut self, letters: &[Option<Letter>]) -> Result<()> {
        let n = self.sample.len();
        let tables_only = letters
            .iter()
            .flatten()
            .all(|l| matches!(l, Letter::Table(_)));
        let id: Vec<u32> = (0..n as u32).collect();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        if tables_only {
            seen.insert(id.clone());
        }
        self.words.push(Word(Vec::new()));
        self.images.push(id.clone());
        let mut frontier: Vec<(Word, Vec<u32>, State)> = vec![(Word(Vec::new()), id, State::Index)];
        'levels: for _ in 0..self.spec.depth {
            let mut next = Vec::new();
            for (w, img, state) in &frontier {
                for (l, letter) in letters.iter().enumerate() {
                    let Some(letter) = letter else { continue };
                    // skip g g^-1 and g^-1 g
                    if let Some(&last) = w.0.first() {
                        if last / 2 == l as u16 / 2 && last != l as u16 {
                            continue;
                        }
                    }
                    let (img2, state2, err) = self.apply_letter(letter, img, state)?;
                    if tables_only && !seen.insert(img2.clone()) {
                        continue;
                    }
                    if self.words.len() >= self.spec.word_budget {
                        self.truncated = true;
                        break 'levels;
                    }
                    self.max_snap = self.max_snap.max(err);
                    let mut letters_w = vec![l as u16];
                    letters_w.extend_from_slice(&w.0);
                    let w2 = Word(letters_w);
                    self.words.push(w2.clone());
                    self.images.push(img2.clone());
                    next.push((w2, img2, state2));
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(())
    }

    pub fn sample(&self) -> &Arc<MetricSample> {
        &self.sample
    }

    pub fn spec(&self) -> &ActionSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Snapped images of every point under word `w`.
    pub fn images(&self, w: usize) -> &[u32] {
        &self.images[w]
    }

    pub fn image(&self, w: usize, x: usize) -> usize {
        self.images[w][x] as usize
    }

    /// Largest snap distance over all computed images.
    pub fn max_snap_error(&self) -> f64 {
        self.max_snap
    }

    /// True when the word budget cut the enumeration short.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    pub fn orbit(&self, x: usize) -> Result<PointSet> {
        if x >= self.len() {
            return Err(Error::PointOutOfRange {
                point: x,
                n: self.len(),
            });
        }
        Ok(PointSet::from_indices(
            self.len(),
            self.images.iter().map(|img| img[x] as usize),
        ))
    }

    pub fn orbits(&self) -> Vec<PointSet> {
        (0..self.len()).map(|x| self.orbit(x).unwrap()).collect()
    }

    /// Truncated orbits as a semi-decomposition; nesting can fail when the
    /// depth is too small, and the error carries the offending pair.
    pub fn induced_semidec(&self) -> Result<SemiDecomposition> {
        SemiDecomposition::from_sets(self.orbits())
    }

    /// One-step snapped table of every generator.
    pub fn generator_tables(&self) -> Result<Vec<Vec<usize>>> {
        let m = &self.sample;
        self.spec
            .generators
            .iter()
            .map(|g| match g {
                Generator::Table(t) => Ok(t.clone()),
                Generator::Formula(f) => (0..m.len())
                    .map(|x| Ok(m.snap(&f.apply(m.coords(x).unwrap()))?.0))
                    .collect(),
            })
            .collect()
    }

    /// Diagonal action on the `k`-fold power sample. Formula generators are
    /// replaced by their one-step snapped tables.
    pub fn product_action(&self, k: usize) -> Result<MetricAction> {
        if k == 0 || k > 3 {
            return Err(Error::BadParameter(format!("product power {k} not in 1..=3")));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let n = self.len();
        let power = Arc::new(MetricSample::power(&self.sample, k)?);
        let gens = self
            .generator_tables()?
            .iter()
            .map(|t| Generator::Table(power_table(t, n, k)))
            .collect();
        let mut spec = self.spec.clone();
        spec.generators = gens;
        MetricAction::new(power, spec)
    }
}

/// Exact trajectory `p, f(p), ..., f^steps(p)`.
pub fn trajectory(f: &Formula, p: &[f64], steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(p.to_vec());
    for _ in 0..steps {
        let q = f.apply(out.last().unwrap());
        out.push(q);
    }
    out
}

/// Snapped trajectory segment after `burn` steps, ε-closed at every ladder scale.
pub fn omega_limit(
    f: &Formula,
    x: usize,
    burn: usize,
    window: usize,
    m: &MetricSample,
) -> Result<Vec<(f64, PointSet)>> {
    let p = m
        .coords(x)
        .ok_or_else(|| Error::Unsupported("omega limits need a coordinate sample".into()))?;
    let mut q = p.to_vec();
    for _ in 0..burn {
        q = f.apply(&q);
    }
    let mut seg = PointSet::empty(m.len());
    for _ in 0..window.max(1) {
        seg.insert(m.snap(&q)?.0);
        q = f.apply(&q);
    }
    Ok(m.scales()
        .iter()
        .map(|&e| (e, m.eps_closure_of(&seg, e)))
        .collect())
}
