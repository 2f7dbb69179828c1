//! Bounded countermodel search.
//!
//! The enumeration is exhaustive relative to a documented finite space: all
//! preorders and monotone valuations on up to `max_worlds` worlds (at most
//! four), with relations assigned only to the subsets that actually arise as
//! truth sets of conditional antecedents during evaluation; every other
//! subset keeps the class default (empty, or the diagonal for the mp
//! classes). Antecedents are processed in strata by conditional nesting
//! depth, so each truth set is fixed before the relation over it is chosen.
//!
//! `None` means no countermodel exists in this space within the candidate
//! budget; it is never a validity proof.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::exec;
use crate::formula::Formula;

use super::random::transitive_close;
use super::{check_frame, Model, ModelClass, SatProfile, WorldSet};

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Complete candidate models evaluated before giving up.
    pub max_candidates: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_candidates: 4_000_000 }
    }
}

/// Smallest countermodel to `f` in the class, if one exists in the search
/// space: the model falsifies `f` at the returned world and passes
/// `check_frame` for `class`.
pub fn find_countermodel(
    f: &Formula,
    class: ModelClass,
    profile: SatProfile,
    max_worlds: usize,
) -> Option<(Model, usize)> {
    find_countermodel_limited(f, class, profile, max_worlds, SearchLimits::default())
}

pub fn find_countermodel_limited(
    f: &Formula,
    class: ModelClass,
    profile: SatProfile,
    max_worlds: usize,
    limits: SearchLimits,
) -> Option<(Model, usize)> {
    assert!(max_worlds >= 1);
    // Relation enumeration is 2^(n*n) per subset; four worlds is the
    // supported ceiling.
    let max_worlds = max_worlds.min(4);
    let atoms = f.atoms();
    let strata = stratified_antecedents(f);
    let counter = AtomicU64::new(0);

    for n in 1..=max_worlds {
        let preorders = enumerate_preorders(n);
        let found = exec::batch_find_map(preorders, |leq| {
            search_preorder(f, class, profile, n, &leq, &atoms, &strata, &counter, limits)
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Conditional antecedents grouped by nesting depth, innermost first.
fn stratified_antecedents(f: &Formula) -> Vec<Vec<Formula>> {
    let ants = f.conditional_antecedents();
    let max_depth = ants.iter().map(|a| a.conditional_depth()).max().unwrap_or(0);
    let mut groups = vec![Vec::new(); max_depth + 1];
    for a in ants {
        let d = a.conditional_depth();
        groups[d].push(a);
    }
    groups
}

fn enumerate_preorders(n: usize) -> Vec<Vec<WorldSet>> {
    let off_diag: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |b| a != *b).map(move |b| (a, b)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << off_diag.len()) {
        let mut leq: Vec<WorldSet> = (0..n).map(|w| 1 << w).collect();
        for (i, (a, b)) in off_diag.iter().enumerate() {
            if mask & (1 << i) != 0 {
                leq[*a] |= 1 << b;
            }
        }
        transitive_close(&mut leq, n);
        if seen.insert(leq.clone()) {
            out.push(leq);
        }
    }
    out
}

fn upward_closed_sets(leq: &[WorldSet], n: usize) -> Vec<WorldSet> {
    (0..(1u32 << n) as WorldSet)
        .filter(|x| (0..n).all(|w| x & (1 << w) == 0 || leq[w] & !x == 0))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn search_preorder(
    f: &Formula,
    class: ModelClass,
    profile: SatProfile,
    n: usize,
    leq: &[WorldSet],
    atoms: &[String],
    strata: &[Vec<Formula>],
    counter: &AtomicU64,
    limits: SearchLimits,
) -> Option<(Model, usize)> {
    let upsets = upward_closed_sets(leq, n);
    let mut choice = vec![0usize; atoms.len()];
    loop {
        let val: Vec<Vec<String>> = (0..n)
            .map(|w| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| upsets[choice[*i]] & (1 << w) != 0)
                    .map(|(_, a)| a.clone())
                    .collect()
            })
            .collect();
        let mut model = Model::from_parts(
            n,
            leq.to_vec(),
            Default::default(),
            val,
            class.requires_mp(),
        );
        if let Some(hit) = assign_strata(f, class, profile, &mut model, strata, 0, counter, limits)
        {
            return Some(hit);
        }
        if counter.load(Ordering::Relaxed) > limits.max_candidates {
            return None;
        }
        // Odometer over valuations.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return None;
            }
            choice[i] += 1;
            if choice[i] < upsets.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn assign_strata(
    f: &Formula,
    class: ModelClass,
    profile: SatProfile,
    model: &mut Model,
    strata: &[Vec<Formula>],
    level: usize,
    counter: &AtomicU64,
    limits: SearchLimits,
) -> Option<(Model, usize)> {
    if counter.load(Ordering::Relaxed) > limits.max_candidates {
        return None;
    }
    if level == strata.len() {
        counter.fetch_add(1, Ordering::Relaxed);
        let t = model.truth_set(f, profile).ok()?;
        if t != model.full_set() && check_frame(model, class).is_ok() {
            let w = (0..model.world_count()).find(|w| t & (1 << w) == 0).unwrap();
            return Some((model.clone(), w));
        }
        return None;
    }
    let mut new_xs: Vec<WorldSet> = Vec::new();
    for a in &strata[level] {
        let x = model.truth_set(a, profile).ok()?;
        if model.rel_mut().contains_key(&x) || new_xs.contains(&x) {
            continue;
        }
        new_xs.push(x);
    }
    assign_relations(f, class, profile, model, strata, level, &new_xs, 0, counter, limits)
}

#[allow(clippy::too_many_arguments)]
fn assign_relations(
    f: &Formula,
    class: ModelClass,
    profile: SatProfile,
    model: &mut Model,
    strata: &[Vec<Formula>],
    level: usize,
    xs: &[WorldSet],
    xi: usize,
    counter: &AtomicU64,
    limits: SearchLimits,
) -> Option<(Model, usize)> {
    if xi == xs.len() {
        return assign_strata(f, class, profile, model, strata, level + 1, counter, limits);
    }
    let x = xs[xi];
    let n = model.world_count();
    let full = model.full_set();
    // Per-row candidate masks: id restricts successors to x; mp forces the
    // diagonal on members of x.
    let allowed: Vec<WorldSet> = (0..n)
        .map(|_w| if class.requires_id() { x } else { full })
        .collect();
    let forced: Vec<WorldSet> = (0..n)
        .map(|w| {
            if class.requires_mp() && x & (1 << w) != 0 {
                 1 << w
            } else {
                0
            }
        })
        .collect();
    let mut rows: Vec<WorldSet> = forced.clone();
    loop {
        model.rel_mut().insert(x, rows.clone());
        let hit =
            assign_relations(f, class, profile, model, strata, level, xs, xi + 1, counter, limits);
        model.rel_mut().remove(&x);
        if hit.is_some() {
            return hit;
        }
        if counter.load(Ordering::Relaxed) > limits.max_candidates {
            return None;
        }
        // Odometer over rows, skipping bits outside allowed | forced.
        let mut w = 0;
        loop {
            if w == n {
                return None;
            }
            let free = allowed[w] & !forced[w];
            let next = next_submask(rows[w] & free, free);
            match next {
                Some(s) => {
                    rows[w] = s | forced[w];
                    break;
                }
                None => {
                    rows[w] = forced[w];
                    w += 1;
                }
            }
        }
    }
}

/// Next submask of `space` after `cur` in increasing order, or `None` after
/// the last.
fn next_submask(cur: WorldSet, space: WorldSet) -> Option<WorldSet> {
    if cur == space {
        return None;
    }
    // Standard submask increment: ripple through the bits of `space`.
    Some(((cur | !space).wrapping_add(1)) & space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::semantics::satisfies;

    #[test]
    fn excluded_middle_has_a_two_world_countermodel() {
        let f = parse("p | ~p").unwrap();
        let (m, w) = find_countermodel(&f, ModelClass::CCM, SatProfile::ccm(), 2).unwrap();
        assert!(m.world_count() <= 2);
        assert!(!satisfies(&m, w, &f, SatProfile::ccm()).unwrap());
        assert!(check_frame(&m, ModelClass::CCM).is_ok());
    }

    #[test]
    fn might_bottom_negation_has_no_small_countermodel() {
        let f = parse("~(p ?> false)").unwrap();
        assert!(find_countermodel(&f, ModelClass::CCM, SatProfile::ccm(), 3).is_none());
    }

    #[test]
    fn classical_might_definition_fails_constructively() {
        let f = parse("~(p > ~q) -> (p ?> q)").unwrap();
        let (m, w) = find_countermodel(&f, ModelClass::CCM, SatProfile::ccm(), 4).unwrap();
        assert!(!satisfies(&m, w, &f, SatProfile::ccm()).unwrap());
        assert!(m.world_count() <= 4);
    }

    #[test]
    fn identity_axiom_needs_the_id_condition() {
        let f = parse("p > p").unwrap();
        let (m, w) = find_countermodel(&f, ModelClass::CCM, SatProfile::ccm(), 2).unwrap();
        assert!(!satisfies(&m, w, &f, SatProfile::ccm()).unwrap());
        assert!(check_frame(&m, ModelClass::CCMID).is_err());
        assert!(find_countermodel(&f, ModelClass::CCMID, SatProfile::ccm(), 2).is_none());
    }

    #[test]
    fn submask_iteration_is_complete() {
        let space: WorldSet = 0b1011;
        let mut seen = vec![0];
        let mut cur = 0;
        while let Some(next) = next_submask(cur, space) {
            seen.push(next);
            cur = next;
        }
        assert_eq!(seen.len(), 8);
    }
}
