//! Finite birelational Chellas models.
//!
//! A model carries a preorder `leq`, a monotone valuation, and one binary
//! relation per subset of worlds. Relations are stored sparsely: subsets
//! without an entry have the default relation, which is empty except for the
//! conditional-modus-ponens classes where it is the diagonal on the subset
//! (the minimal relation satisfying their frame condition).

mod random;
mod search;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;

pub use random::random_model;
pub use search::{find_countermodel, SearchLimits};

/// Upper bound on model size imposed by the bitmask representation.
pub const MAX_WORLDS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelClass {
    Basic,
    Weiss,
    Olkhovikov,
    CCM,
    CCMID,
    CCMMP,
    CCMMPID,
}

impl ModelClass {
    pub const ALL: [ModelClass; 7] = [
        ModelClass::Basic,
        ModelClass::Weiss,
        ModelClass::Olkhovikov,
        ModelClass::CCM,
        ModelClass::CCMID,
        ModelClass::CCMMP,
        ModelClass::CCMMPID,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelClass::Basic => "basic",
            ModelClass::Weiss => "weiss",
            ModelClass::Olkhovikov => "olkhovikov",
            ModelClass::CCM => "ccm",
            ModelClass::CCMID => "ccm-id",
            ModelClass::CCMMP => "ccm-mp",
            ModelClass::CCMMPID => "ccm-mpid",
        }
    }

    pub fn requires_id(self) -> bool {
        matches!(self, ModelClass::CCMID | ModelClass::CCMMPID)
    }

    pub fn requires_mp(self) -> bool {
        matches!(self, ModelClass::CCMMP | ModelClass::CCMMPID)
    }

    /// The satisfaction clauses a class is evaluated with.
    pub fn profile(self) -> SatProfile {
        match self {
            ModelClass::Weiss => SatProfile::weiss(),
            ModelClass::Olkhovikov => SatProfile::olkhovikov(),
            _ => SatProfile::ccm(),
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    Local,
    Global,
}

/// Which clause interprets each conditional; the Weiss profile leaves the
/// might conditional undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatProfile {
    pub box_clause: Clause,
    pub diam_clause: Option<Clause>,
}

impl SatProfile {
    pub fn weiss() -> Self {
        SatProfile { box_clause: Clause::Local, diam_clause: None }
    }

    pub fn olkhovikov() -> Self {
        SatProfile { box_clause: Clause::Global, diam_clause: Some(Clause::Local) }
    }

    pub fn ccm() -> Self {
        SatProfile { box_clause: Clause::Global, diam_clause: Some(Clause::Global) }
    }
}

pub type WorldSet = u16;

/// A binary relation on worlds, one successor mask per world.
pub type Relation = Vec<WorldSet>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    worlds: usize,
    /// `leq[w]` is the mask of `w'` with `w <= w'`.
    leq: Vec<WorldSet>,
    /// Sparse: subsets without an entry get [`Model::default_relation`].
    rel: BTreeMap<WorldSet, Relation>,
    /// Diagonal default for the mp classes, empty otherwise.
    mp_default: bool,
    val: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("the Weiss profile does not interpret might conditionals: `{0}`")]
    DiamondUnderWeiss(String),
    #[error("world {0} out of range")]
    WorldOutOfRange(usize),
    #[error("malformed model: {0}")]
    Malformed(String),
}

impl Model {
    pub fn new(
        worlds: usize,
        leq_pairs: &[(usize, usize)],
        rel: BTreeMap<WorldSet, Vec<(usize, usize)>>,
        val: Vec<Vec<String>>,
        mp_default: bool,
    ) -> Result<Model, SemanticsError> {
        if worlds == 0 || worlds > MAX_WORLDS {
            return Err(SemanticsError::Malformed(format!(
                "need between 1 and {MAX_WORLDS} worlds, got {worlds}"
            )));
        }
        if val.len() != worlds {
            return Err(SemanticsError::Malformed("one valuation entry per world".into()));
        }
        let mut leq = vec![0 as WorldSet; worlds];
        for w in 0..worlds {
            leq[w] |= 1 << w;
        }
        for &(a, b) in leq_pairs {
            if a >= worlds || b >= worlds {
                return Err(SemanticsError::WorldOutOfRange(a.max(b)));
            }
            leq[a] |= 1 << b;
        }
        let mut relations = BTreeMap::new();
        for (x, pairs) in rel {
            if x >= (1 << worlds) {
                return Err(SemanticsError::Malformed(format!("subset {x:#b} out of range")));
            }
            let mut r = vec![0 as WorldSet; worlds];
            for (a, b) in pairs {
                if a >= worlds || b >= worlds {
                    return Err(SemanticsError::WorldOutOfRange(a.max(b)));
                }
                r[a] |= 1 << b;
            }
            relations.insert(x, r);
        }
        Ok(Model { worlds, leq, rel: relations, mp_default, val })
    }

    pub(crate) fn from_parts(
        worlds: usize,
        leq: Vec<WorldSet>,
        rel: BTreeMap<WorldSet, Relation>,
        val: Vec<Vec<String>>,
        mp_default: bool,
    ) -> Model {
        Model { worlds, leq, rel, mp_default, val }
    }

    pub fn world_count(&self) -> usize {
        self.worlds
    }

    pub fn full_set(&self) -> WorldSet {
        ((1u32 << self.worlds) - 1) as WorldSet
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a] & (1 << b) != 0
    }

    pub fn up_set(&self, w: usize) -> WorldSet {
        self.leq[w]
    }

    fn default_relation(&self, x: WorldSet) -> Relation {
        let mut r = vec![0 as WorldSet; self.worlds];
        if self.mp_default {
            for w in 0..self.worlds {
                if x & (1 << w) != 0 {
                    r[w] = 1 << w;
                }
            }
        }
        r
    }

    /// Successors of `w` through the relation selected by `x`.
    pub fn rel_successors(&self, x: WorldSet, w: usize) -> WorldSet {
        match self.rel.get(&x) {
            Some(r) => r[w],
            None if self.mp_default && x & (1 << w) != 0 => 1 << w,
            None => 0,
        }
    }

    pub fn holds_atom(&self, w: usize, atom: &str) -> bool {
        self.val[w].iter().any(|a| a == atom)
    }

    pub fn stored_subsets(&self) -> impl Iterator<Item = WorldSet> + '_ {
        self.rel.keys().copied()
    }

    pub(crate) fn rel_mut(&mut self) -> &mut BTreeMap<WorldSet, Relation> {
        &mut self.rel
    }

    pub(crate) fn leq_mut(&mut self) -> &mut Vec<WorldSet> {
        &mut self.leq
    }

    pub(crate) fn val_mut(&mut self) -> &mut Vec<Vec<String>> {
        &mut self.val
    }

    pub(crate) fn relation_or_default(&self, x: WorldSet) -> Relation {
        self.rel.get(&x).cloned().unwrap_or_else(|| self.default_relation(x))
    }

    /// Truth set of `f` under `profile`, as a world mask.
    pub fn truth_set(&self, f: &Formula, profile: SatProfile) -> Result<WorldSet, SemanticsError> {
        Ok(match f {
            Formula::Atom(a) => {
                let mut mask = 0;
                for w in 0..self.worlds {
                    if self.holds_atom(w, a) {
                        mask |= 1 << w;
                    }
                }
                mask
            }
            Formula::Bot => 0,
            Formula::And(l, r) => self.truth_set(l, profile)? & self.truth_set(r, profile)?,
            Formula::Or(l, r) => self.truth_set(l, profile)? | self.truth_set(r, profile)?,
            Formula::Imp(l, r) => {
                let tl = self.truth_set(l, profile)?;
                let tr = self.truth_set(r, profile)?;
                let mut mask = 0;
                for w in 0..self.worlds {
                    let up = self.up_set(w);
                    if up & tl & !tr == 0 {
                        mask |= 1 << w;
                    }
                }
                mask
            }
            Formula::CondBox(l, r) => {
                let x = self.truth_set(l, profile)?;
                let tr = self.truth_set(r, profile)?;
                let mut mask = 0;
                for w in 0..self.worlds {
                    let holds = match profile.box_clause {
                        Clause::Local => self.rel_successors(x, w) & !tr == 0,
                        Clause::Global => self.iter_up(w).all(|w2| {
                            self.rel_successors(x, w2) & !tr == 0
                        }),
                    };
                    if holds {
                        mask |= 1 << w;
                    }
                }
                mask
            }
            Formula::CondDiam(l, r) => {
                let clause = profile
                    .diam_clause
                    .ok_or_else(|| SemanticsError::DiamondUnderWeiss(f.to_string()))?;
                let x = self.truth_set(l, profile)?;
                let tr = self.truth_set(r, profile)?;
                let mut mask = 0;
                for w in 0..self.worlds {
                    let holds = match clause {
                        Clause::Local => self.rel_successors(x, w) & tr != 0,
                        Clause::Global => self.iter_up(w).all(|w2| {
                            self.rel_successors(x, w2) & tr != 0
                        }),
                    };
                    if holds {
                        mask |= 1 << w;
                    }
                }
                mask
            }
        })
    }

    fn iter_up(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.up_set(w);
        (0..self.worlds).filter(move |w2| mask & (1 << w2) != 0)
    }
}

/// `M, w ||- f` under `profile`.
pub fn satisfies(m: &Model, w: usize, f: &Formula, profile: SatProfile) -> Result<bool, SemanticsError> {
    if w >= m.world_count() {
        return Err(SemanticsError::WorldOutOfRange(w));
    }
    Ok(m.truth_set(f, profile)? & (1 << w) != 0)
}

/// Valid in the model: satisfied at every world.
pub fn valid_in(m: &Model, f: &Formula, profile: SatProfile) -> Result<bool, SemanticsError> {
    Ok(m.truth_set(f, profile)? == m.full_set())
}

/// Satisfaction of `f` is upward closed along the preorder at every world.
pub fn hereditary_check(m: &Model, profile: SatProfile, f: &Formula) -> Result<bool, SemanticsError> {
    let t = m.truth_set(f, profile)?;
    for w in 0..m.world_count() {
        if t & (1 << w) != 0 && m.up_set(w) & !t != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A failed frame condition together with the witnessing worlds and subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameViolation {
    pub condition: &'static str,
    pub witness: Vec<usize>,
    pub subset: Option<WorldSet>,
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at worlds {:?}", self.condition, self.witness)?;
        if let Some(x) = self.subset {
            write!(f, " for subset {}", subset_string(x))?;
        }
        Ok(())
    }
}

pub(crate) fn subset_string(x: WorldSet) -> String {
    let mut s = String::from("{");
    let mut first = true;
    for w in 0..MAX_WORLDS {
        if x & (1 << w) != 0 {
            if !first {
                s.push(',');
            }
            s.push_str(&w.to_string());
            first = false;
        }
    }
    s.push('}');
    s
}

/// Exhaustively checks the class's conditions over all worlds and subsets.
pub fn check_frame(m: &Model, class: ModelClass) -> Result<(), FrameViolation> {
    let n = m.world_count();
    for w in 0..n {
        if !m.leq(w, w) {
            return Err(FrameViolation { condition: "reflexivity", witness: vec![w], subset: None });
        }
        for v in 0..n {
            if m.leq(w, v) {
                if m.up_set(v) & !m.up_set(w) != 0 {
                    let z = (0..n).find(|z| m.leq(v, *z) && !m.leq(w, *z)).unwrap();
                    return Err(FrameViolation {
                        condition: "transitivity",
                        witness: vec![w, v, z],
                        subset: None,
                    });
                }
                if let Some(a) = m.val[w].iter().find(|a| !m.holds_atom(v, a)) {
                    let _ = a;
                    return Err(FrameViolation {
                        condition: "valuation monotonicity",
                        witness: vec![w, v],
                        subset: None,
                    });
                }
            }
        }
    }

    for x in 0..(1u32 << n) as WorldSet {
        let r = m.relation_or_default(x);
        if matches!(class, ModelClass::Weiss) {
            // LC: w <= w' R_X v implies some v' with w R_X v' <= v.
            for w in 0..n {
                for w2 in 0..n {
                    if !m.leq(w, w2) {
                        continue;
                    }
                    for v in 0..n {
                        if r[w2] & (1 << v) == 0 {
                            continue;
                        }
                        let ok = (0..n).any(|v2| r[w] & (1 << v2) != 0 && m.leq(v2, v));
                        if !ok {
                            return Err(FrameViolation {
                                condition: "left commutativity",
                                witness: vec![w, w2, v],
                                subset: Some(x),
                            });
                        }
                    }
                }
            }
        }
        if matches!(class, ModelClass::Olkhovikov) {
            // RC: w R_X v <= v' implies some w' with w <= w' R_X v'.
            for w in 0..n {
                for v in 0..n {
                    if r[w] & (1 << v) == 0 {
                        continue;
                    }
                    for v2 in 0..n {
                        if !m.leq(v, v2) {
                            continue;
                        }
                        let ok = (0..n).any(|w2| m.leq(w, w2) && r[w2] & (1 << v2) != 0);
                        if !ok {
                            return Err(FrameViolation {
                                condition: "right commutativity",
                                witness: vec![w, v, v2],
                                subset: Some(x),
                            });
                        }
                    }
                }
            }
            // CR: w <= w' and w R_X v imply some v' with w' R_X v' and v <= v'.
            for w in 0..n {
                for w2 in 0..n {
                    if !m.leq(w, w2) {
                        continue;
                    }
                    for v in 0..n {
                        if r[w] & (1 << v) == 0 {
                            continue;
                        }
                        let ok = (0..n).any(|v2| r[w2] & (1 << v2) != 0 && m.leq(v, v2));
                        if !ok {
                            return Err(FrameViolation {
                                condition: "church-rosser",
                                witness: vec![w, w2, v],
                                subset: Some(x),
                            });
                        }
                    }
                }
            }
        }
        if class.requires_id() {
            for w in 0..n {
                for v in 0..n {
                    if r[w] & (1 << v) != 0 && x & (1 << v) == 0 {
                        return Err(FrameViolation {
                            condition: "id",
                            witness: vec![w, v],
                            subset: Some(x),
                        });
                    }
                }
            }
        }
        if class.requires_mp() {
            for w in 0..n {
                if x & (1 << w) != 0 && r[w] & (1 << w) == 0 {
                    return Err(FrameViolation {
                        condition: "mp",
                        witness: vec![w],
                        subset: Some(x),
                    });
                }
            }
        }
    }
    Ok(())
}

// --- text and JSON formats ---------------------------------------------

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "worlds: {}", self.worlds)?;
        write!(f, "leq:")?;
        for w in 0..self.worlds {
            for v in 0..self.worlds {
                if w != v && self.leq(w, v) {
                    write!(f, " ({w},{v})")?;
                }
            }
        }
        writeln!(f)?;
        for (x, r) in &self.rel {
            write!(f, "rel[{}]:", subset_string(*x))?;
            for w in 0..self.worlds {
                for v in 0..self.worlds {
                    if r[w] & (1 << v) != 0 {
                        write!(f, " ({w},{v})")?;
                    }
                }
            }
            writeln!(f)?;
        }
        for w in 0..self.worlds {
            write!(f, "val({w}):")?;
            for a in &self.val[w] {
                write!(f, " {a}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RelEntry {
    subset: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    worlds: usize,
    leq: Vec<(usize, usize)>,
    rel: Vec<RelEntry>,
    val: Vec<Vec<String>>,
    #[serde(default)]
    mp_default: bool,
}

impl Serialize for Model {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut leq = Vec::new();
        for w in 0..self.worlds {
            for v in 0..self.worlds {
                if w != v && self.leq(w, v) {
                    leq.push((w, v));
                }
            }
        }
        let rel = self
            .rel
            .iter()
            .map(|(x, r)| RelEntry {
                subset: (0..self.worlds).filter(|w| x & (1 << w) != 0).collect(),
                pairs: (0..self.worlds)
                    .flat_map(|w| {
                        (0..self.worlds)
                            .filter(move |v| r[w] & (1 << v) != 0)
                            .map(move |v| (w, v))
                    })
                    .collect(),
            })
            .collect();
        ModelRepr { worlds: self.worlds, leq, rel, val: self.val.clone(), mp_default: self.mp_default }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Model {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ModelRepr::deserialize(d)?;
        let mut rel = BTreeMap::new();
        for e in repr.rel {
            let mut x: WorldSet = 0;
            for w in e.subset {
                x |= 1 << w;
            }
            rel.insert(x, e.pairs);
        }
        Model::new(repr.worlds, &repr.leq, rel, repr.val, repr.mp_default).map_err(D::Error::custom)
    }
}

/// Parses the line-oriented text format produced by `Display`.
pub fn parse_model(text: &str) -> Result<Model, SemanticsError> {
    let mut worlds = None;
    let mut leq_pairs = Vec::new();
    let mut rel: BTreeMap<WorldSet, Vec<(usize, usize)>> = BTreeMap::new();
    let mut val: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| SemanticsError::Malformed(format!("expected `key: ...` in `{line}`")))?;
        let head = head.trim();
        let rest = rest.trim();
        if head == "worlds" {
            worlds = Some(
                rest.parse::<usize>()
                    .map_err(|e| SemanticsError::Malformed(format!("worlds: {e}")))?,
            );
        } else if head == "leq" {
            leq_pairs.extend(parse_pairs(rest)?);
        } else if let Some(x) = head.strip_prefix("rel[").and_then(|s| s.strip_suffix(']')) {
            let mask = parse_subset(x)?;
            rel.entry(mask).or_default().extend(parse_pairs(rest)?);
        } else if let Some(w) = head.strip_prefix("val(").and_then(|s| s.strip_suffix(')')) {
            let w = w
                .parse::<usize>()
                .map_err(|e| SemanticsError::Malformed(format!("val world: {e}")))?;
            val.entry(w)
                .or_default()
                .extend(rest.split_whitespace().map(|s| s.to_owned()));
        } else {
            return Err(SemanticsError::Malformed(format!("unknown key `{head}`")));
        }
    }
    let worlds = worlds.ok_or_else(|| SemanticsError::Malformed("missing `worlds:` line".into()))?;
    let mut vals = vec![Vec::new(); worlds];
    for (w, atoms) in val {
        if w >= worlds {
            return Err(SemanticsError::WorldOutOfRange(w));
        }
        vals[w] = atoms;
    }
    Model::new(worlds, &leq_pairs, rel, vals, false)
}

fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>, SemanticsError> {
    let mut out = Vec::new();
    for part in text.split_whitespace() {
        let inner = part
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| SemanticsError::Malformed(format!("expected `(a,b)`, got `{part}`")))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| SemanticsError::Malformed(format!("expected `(a,b)`, got `{part}`")))?;
        out.push((
            a.trim().parse().map_err(|e| SemanticsError::Malformed(format!("{e}")))?,
            b.trim().parse().map_err(|e| SemanticsError::Malformed(format!("{e}")))?,
        ));
    }
    Ok(out)
}

fn parse_subset(text: &str) -> Result<WorldSet, SemanticsError> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| SemanticsError::Malformed(format!("expected `{{..}}`, got `{text}`")))?;
    let mut mask: WorldSet = 0;
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let w: usize = part
            .parse()
            .map_err(|e| SemanticsError::Malformed(format!("subset element: {e}")))?;
        if w >= MAX_WORLDS {
            return Err(SemanticsError::WorldOutOfRange(w));
        }
        mask |= 1 << w;
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, cond_box, cond_diam, imp, neg, parse, top};

    fn one_world() -> Model {
        Model::new(1, &[], BTreeMap::new(), vec![vec![]], false).unwrap()
    }

    #[test]
    fn one_world_empty_relations() {
        let m = one_world();
        for class in ModelClass::ALL {
            // The commutativity and id conditions are vacuous on empty
            // relations; mp is not (a member world needs its reflexive pair).
            assert_eq!(check_frame(&m, class).is_ok(), !class.requires_mp(), "{class}");
        }
        // Box is vacuous, might unwitnessed.
        assert!(satisfies(&m, 0, &cond_box(atom("p"), atom("q")), SatProfile::ccm()).unwrap());
        assert!(!satisfies(&m, 0, &cond_diam(atom("p"), atom("q")), SatProfile::ccm()).unwrap());
        assert!(satisfies(&m, 0, &top(), SatProfile::ccm()).unwrap());
    }

    #[test]
    fn lc_violation_is_witnessed() {
        // 0 <= 1, 1 R_X 0, and no successor of 0 at all.
        let mut rel = BTreeMap::new();
        rel.insert(0b11, vec![(1, 0)]);
        let m = Model::new(2, &[(0, 1)], rel, vec![vec![], vec![]], false).unwrap();
        let err = check_frame(&m, ModelClass::Weiss).unwrap_err();
        assert_eq!(err.condition, "left commutativity");
        assert_eq!(err.witness, vec![0, 1, 0]);
        assert!(check_frame(&m, ModelClass::CCM).is_ok());
    }

    #[test]
    fn id_condition() {
        let mut rel = BTreeMap::new();
        rel.insert(0b01, vec![(0, 1)]); // successor outside the subset
        let m = Model::new(2, &[], rel, vec![vec![], vec![]], false).unwrap();
        assert_eq!(check_frame(&m, ModelClass::CCMID).unwrap_err().condition, "id");
        let mut rel = BTreeMap::new();
        rel.insert(0b10, vec![(0, 1)]);
        let m = Model::new(2, &[], rel, vec![vec![], vec![]], false).unwrap();
        assert!(check_frame(&m, ModelClass::CCMID).is_ok());
    }

    #[test]
    fn excluded_middle_countermodel_by_hand() {
        // p only at the upper world: neither p nor ~p at the root.
        let m = Model::new(
            2,
            &[(0, 1)],
            BTreeMap::new(),
            vec![vec![], vec!["p".into()]],
            false,
        )
        .unwrap();
        assert!(check_frame(&m, ModelClass::CCM).is_ok());
        let f = parse("p | ~p").unwrap();
        assert!(!satisfies(&m, 0, &f, SatProfile::ccm()).unwrap());
        assert!(satisfies(&m, 1, &f, SatProfile::ccm()).unwrap());
    }

    #[test]
    fn hereditary_examples() {
        let m = Model::new(
            2,
            &[(0, 1)],
            BTreeMap::new(),
            vec![vec![], vec!["p".into()]],
            false,
        )
        .unwrap();
        assert!(hereditary_check(&m, SatProfile::ccm(), &atom("p")).unwrap());
        assert!(hereditary_check(&m, SatProfile::ccm(), &imp(atom("p"), atom("q"))).unwrap());
        assert!(hereditary_check(&m, SatProfile::ccm(), &neg(atom("p"))).unwrap());
    }

    #[test]
    fn weiss_profile_rejects_might() {
        let m = one_world();
        let f = cond_diam(atom("p"), atom("q"));
        assert!(matches!(
            satisfies(&m, 0, &f, SatProfile::weiss()),
            Err(SemanticsError::DiamondUnderWeiss(_))
        ));
    }

    #[test]
    fn text_format_round_trip() {
        let mut rel = BTreeMap::new();
        rel.insert(0b01, vec![(0, 1), (1, 1)]);
        let m = Model::new(2, &[(0, 1)], rel, vec![vec!["p".into()], vec!["p".into(), "q".into()]], false)
            .unwrap();
        let text = m.to_string();
        let back = parse_model(&text).unwrap();
        assert_eq!(back, m);
        let js = serde_json::to_string(&m).unwrap();
        let back: Model = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
    }
}
