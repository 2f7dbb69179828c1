//! Seeded random model generation with generate-and-repair.
//!
//! Repair order: preorder closure, then valuation monotonicity, then the
//! class's frame conditions. Every repair only adds pairs or atoms, so the
//! loop is monotone and reaches a fixpoint on finite models.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_frame, Model, ModelClass, Relation, WorldSet};

/// Deterministic for a fixed seed; the result passes `check_frame` for the
/// requested class.
pub fn random_model(class: ModelClass, max_worlds: usize, seed: u64) -> Model {
    assert!(max_worlds >= 1, "need at least one world");
    let max_worlds = max_worlds.min(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_worlds);

    let mut leq: Vec<WorldSet> = (0..n).map(|w| 1 << w).collect();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_ratio(1, 4) {
                leq[a] |= 1 << b;
            }
        }
    }
    transitive_close(&mut leq, n);

    let atoms = ["p", "q", "r"];
    let mut val: Vec<Vec<String>> = (0..n)
        .map(|_| {
            atoms
                .iter()
                .filter(|_| rng.gen_ratio(1, 3))
                .map(|a| (*a).to_string())
                .collect()
        })
        .collect();
    monotone_close(&leq, &mut val, n);

    let mut rel: BTreeMap<WorldSet, Relation> = BTreeMap::new();
    let keys: Vec<WorldSet> = if class.requires_mp() {
        (0..(1u32 << n) as WorldSet).collect()
    } else {
        let count = rng.gen_range(1..=4usize);
        (0..count)
            .map(|_| rng.gen_range(0..(1u32 << n)) as WorldSet)
            .collect()
    };
    for x in keys {
        let entry = rel.entry(x).or_insert_with(|| vec![0; n]);
        for w in 0..n {
            for v in 0..n {
                let allowed = !class.requires_id() || x & (1 << v) != 0;
                if allowed && rng.gen_ratio(1, 4) {
                    entry[w] |= 1 << v;
                }
            }
        }
    }

    repair(class, n, &leq, &mut rel);

    let m = Model::from_parts(n, leq, rel, val, class.requires_mp());
    debug_assert!(check_frame(&m, class).is_ok(), "repair failed for {class}");
    m
}

pub(crate) fn transitive_close(leq: &mut [WorldSet], n: usize) {
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if leq[a] & (1 << b) != 0 {
                    let add = leq[b] & !leq[a];
                    if add != 0 {
                        leq[a] |= add;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn monotone_close(leq: &[WorldSet], val: &mut [Vec<String>], n: usize) {
    loop {
        let mut changed = false;
        for w in 0..n {
            for v in 0..n {
                if w != v && leq[w] & (1 << v) != 0 {
                    let missing: Vec<String> = val[w]
                        .iter()
                        .filter(|a| !val[v].contains(a))
                        .cloned()
                        .collect();
                    if !missing.is_empty() {
                        val[v].extend(missing);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn repair(class: ModelClass, n: usize, leq: &[WorldSet], rel: &mut BTreeMap<WorldSet, Relation>) {
    let cap = n * n * (1 << n) + 16;
    for _ in 0..cap {
        let mut changed = false;
        if class.requires_mp() {
            for x in 0..(1u32 << n) as WorldSet {
                let entry = rel.entry(x).or_insert_with(|| vec![0; n]);
                for w in 0..n {
                    if x & (1 << w) != 0 && entry[w] & (1 << w) == 0 {
                        entry[w] |= 1 << w;
                        changed = true;
                    }
                }
            }
        }
        for r in rel.values_mut() {
            match class {
                ModelClass::Weiss => {
                    // LC: w <= w' R_X v needs v' with w R_X v' <= v; adding
                    // (w, v) itself settles the instance.
                    for w in 0..n {
                        for w2 in 0..n {
                            if leq[w] & (1 << w2) == 0 {
                                continue;
                            }
                            for v in 0..n {
                                if r[w2] & (1 << v) == 0 {
                                    continue;
                                }
                                let ok =
                                    (0..n).any(|v2| r[w] & (1 << v2) != 0 && leq[v2] & (1 << v) != 0);
                                if !ok {
                                    r[w] |= 1 << v;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
                ModelClass::Olkhovikov => {
                    // RC with witness w' = w, CR with witness v' = v.
                    for w in 0..n {
                        for v in 0..n {
                            if r[w] & (1 << v) == 0 {
                                continue;
                            }
                            for v2 in 0..n {
                                if leq[v] & (1 << v2) == 0 {
                                    continue;
                                }
                                let ok =
                                    (0..n).any(|w2| leq[w] & (1 << w2) != 0 && r[w2] & (1 << v2) != 0);
                                if !ok {
                                    r[w] |= 1 << v2;
                                    changed = true;
                                }
                            }
                        }
                    }
                    for w in 0..n {
                        for w2 in 0..n {
                            if leq[w] & (1 << w2) == 0 {
                                continue;
                            }
                            for v in 0..n {
                                if r[w] & (1 << v) == 0 {
                                    continue;
                                }
                                let ok =
                                    (0..n).any(|v2| r[w2] & (1 << v2) != 0 && leq[v] & (1 << v2) != 0);
                                if !ok {
                                    r[w2] |= 1 << v;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        if !changed {
            return;
        }
    }
    unreachable!("additive repair must reach a fixpoint within the cap");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_models_pass_their_class() {
        for class in ModelClass::ALL {
            for seed in 0..40 {
                let m = random_model(class, 4, seed);
                assert!(check_frame(&m, class).is_ok(), "{class} seed {seed}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_model(ModelClass::Olkhovikov, 4, 9);
        let b = random_model(ModelClass::Olkhovikov, 4, 9);
        assert_eq!(a, b);
    }

    #[test]
    fn repair_is_idempotent() {
        for seed in 0..20 {
            let m = random_model(ModelClass::Weiss, 4, seed);
            let mut rel = BTreeMap::new();
            for x in m.stored_subsets() {
                rel.insert(x, m.relation_or_default(x));
            }
            let before = rel.clone();
            let leq: Vec<WorldSet> = (0..m.world_count()).map(|w| m.up_set(w)).collect();
            repair(ModelClass::Weiss, m.world_count(), &leq, &mut rel);
            assert_eq!(before, rel);
        }
    }
}
