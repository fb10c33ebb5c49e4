//! Enumeration of minimal hitting sets (minimal transversals).

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

/// All ⊆-minimal sets that intersect every edge, sorted by size and then
/// lexicographically. No edges yields `[{}]`; an empty edge yields `[]`.
pub fn minimal_hitting_sets<V: Ord + Clone>(edges: &[BTreeSet<V>]) -> Vec<BTreeSet<V>> {
    minimal_hitting_sets_by(|chosen| {
        edges
            .iter()
            .find(|e| e.is_disjoint(chosen))
            .map(|e| e.iter().cloned().collect())
    })
}

/// Same as [`minimal_hitting_sets`], with the edges supplied lazily:
/// `unhit(chosen)` returns some edge disjoint from `chosen`, or `None` once
/// `chosen` hits everything. Edges may depend on `chosen` as long as every
/// edge returned for a set is also an edge for each of its subsets.
pub fn minimal_hitting_sets_by<V, F>(mut unhit: F) -> Vec<BTreeSet<V>>
where
    V: Ord + Clone,
    F: FnMut(&BTreeSet<V>) -> Option<Vec<V>>,
{
    let mut found: Vec<BTreeSet<V>> = Vec::new();
    let mut chosen = BTreeSet::new();
    let mut forbidden = BTreeSet::new();
    branch(&mut unhit, &mut chosen, &mut forbidden, &mut found);
    let mut minimal: Vec<BTreeSet<V>> = found
        .iter()
        .filter(|h| !found.iter().any(|g| g.len() < h.len() && g.is_subset(h)))
        .cloned()
        .collect();
    sort_sets(&mut minimal);
    minimal.dedup();
    minimal
}

/// Branching on the first unhit edge: the i-th branch takes its i-th vertex
/// and forbids the earlier ones, so each candidate is generated once.
fn branch<V, F>(unhit: &mut F, chosen: &mut BTreeSet<V>, forbidden: &mut BTreeSet<V>, found: &mut Vec<BTreeSet<V>>)
where
    V: Ord + Clone,
    F: FnMut(&BTreeSet<V>) -> Option<Vec<V>>,
{
    if found.iter().any(|h| h.is_subset(chosen)) {
        return;
    }
    let Some(mut edge) = unhit(chosen) else {
        found.push(chosen.clone());
        return;
    };
    edge.sort();
    edge.dedup();
    let mut newly_forbidden = Vec::new();
    for v in edge {
        if forbidden.contains(&v) {
            continue;
        }
        chosen.insert(v.clone());
        branch(unhit, chosen, forbidden, found);
        chosen.remove(&v);
        forbidden.insert(v.clone());
        newly_forbidden.push(v);
    }
    for v in newly_forbidden {
        forbidden.remove(&v);
    }
}

/// Sorts by size, then lexicographically.
pub fn sort_sets<V: Ord>(sets: &mut [BTreeSet<V>]) {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
}

/// Keeps the ⊆-minimal members.
pub fn minimize<V: Ord + Clone>(sets: &[BTreeSet<V>]) -> Vec<BTreeSet<V>> {
    let mut out: Vec<BTreeSet<V>> = sets
        .iter()
        .filter(|h| !sets.iter().any(|g| g.len() < h.len() && g.is_subset(h)))
        .cloned()
        .collect();
    sort_sets(&mut out);
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    fn brute(edges: &[BTreeSet<u32>], universe: &[u32]) -> Vec<BTreeSet<u32>> {
        let mut hits = Vec::new();
        for mask in 0u32..(1 << universe.len()) {
            let s: BTreeSet<u32> = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| *v)
                .collect();
            if edges.iter().all(|e| !e.is_disjoint(&s)) {
                hits.push(s);
            }
        }
        minimize(&hits)
    }

    #[test]
    fn example3_edges() {
        let edges = vec![set(&[1, 4, 6]), set(&[3, 6])];
        assert_eq!(
            minimal_hitting_sets(&edges),
            vec![set(&[6]), set(&[1, 3]), set(&[3, 4])]
        );
    }

    #[test]
    fn example5_edges() {
        let edges = vec![set(&[2, 5]), set(&[2, 3, 4]), set(&[1, 3])];
        assert_eq!(
            minimal_hitting_sets(&edges),
            vec![set(&[1, 2]), set(&[2, 3]), set(&[3, 5]), set(&[1, 4, 5])]
        );
    }

    #[test]
    fn degenerate_cases() {
        assert_eq!(minimal_hitting_sets::<u32>(&[]), vec![BTreeSet::new()]);
        assert!(minimal_hitting_sets(&[set(&[1]), BTreeSet::new()]).is_empty());
        assert_eq!(
            minimal_hitting_sets(&[set(&[1, 2]), set(&[1, 2])]),
            vec![set(&[1]), set(&[2])]
        );
    }

    #[test]
    fn matches_brute_force_on_small_hypergraphs() {
        let mut seed = 0x2545_f491_u32;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 17;
            seed ^= seed << 5;
            seed
        };
        let universe: Vec<u32> = (1..=7).collect();
        for _ in 0..300 {
            let n_edges = (next() % 5) as usize;
            let edges: Vec<BTreeSet<u32>> = (0..n_edges)
                .map(|_| {
                    let mut e = BTreeSet::new();
                    while e.is_empty() {
                        e = universe.iter().copied().filter(|_| next() % 3 == 0).collect();
                    }
                    e
                })
                .collect();
            assert_eq!(minimal_hitting_sets(&edges), brute(&edges, &universe), "{edges:?}");
        }
    }
}
