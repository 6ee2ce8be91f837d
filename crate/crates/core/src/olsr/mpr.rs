use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::NodeId;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MprSet {
    pub members: BTreeSet<NodeId>,
    pub seq_num: u32,
}

impl MprSet {
    /// Recomputes the set; the sequence number moves only when membership does.
    pub fn select(
        &self,
        one_hop: &BTreeSet<NodeId>,
        two_hop_reach: &BTreeMap<NodeId, BTreeSet<NodeId>>,
    ) -> MprSet {
        let members = greedy_cover(one_hop, two_hop_reach);
        if members == self.members {
            self.clone()
        } else {
            MprSet {
                members,
                seq_num: self.seq_num.wrapping_add(1),
            }
        }
    }
}

/// Strict 2-hop nodes reachable through `one_hop`.
pub fn coverable(
    one_hop: &BTreeSet<NodeId>,
    two_hop_reach: &BTreeMap<NodeId, BTreeSet<NodeId>>,
) -> BTreeSet<NodeId> {
    one_hop
        .iter()
        .filter_map(|n| two_hop_reach.get(n))
        .flatten()
        .filter(|t| !one_hop.contains(t))
        .copied()
        .collect()
}

/// Greedy MPR selection. Neighbors that are the sole reacher of some 2-hop
/// node go in first; then the neighbor covering the most still-uncovered
/// nodes is added until everything coverable is covered, ties to the lowest id.
pub fn greedy_cover(
    one_hop: &BTreeSet<NodeId>,
    two_hop_reach: &BTreeMap<NodeId, BTreeSet<NodeId>>,
) -> BTreeSet<NodeId> {
    let reach: BTreeMap<NodeId, BTreeSet<NodeId>> = one_hop
        .iter()
        .map(|n| {
            let r = two_hop_reach
                .get(n)
                .map(|s| s.iter().filter(|t| !one_hop.contains(t)).copied().collect())
                .unwrap_or_default();
            (*n, r)
        })
        .collect();
    let targets = coverable(one_hop, two_hop_reach);

    let mut selected = BTreeSet::new();
    for t in &targets {
        let mut reachers = reach.iter().filter(|(_, r)| r.contains(t));
        if let (Some((only, _)), None) = (reachers.next(), reachers.next()) {
            selected.insert(*only);
        }
    }

    let mut uncovered: BTreeSet<NodeId> = targets
        .iter()
        .filter(|t| !selected.iter().any(|m| reach[m].contains(t)))
        .copied()
        .collect();
    while !uncovered.is_empty() {
        let best = reach
            .iter()
            .filter(|(n, _)| !selected.contains(*n))
            .map(|(n, r)| (r.intersection(&uncovered).count(), *n))
            // max by count, then min by id
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        match best {
            Some((gain, n)) if gain > 0 => {
                for t in &reach[&n] {
                    uncovered.remove(t);
                }
                selected.insert(n);
            }
            _ => break,
        }
    }
    selected
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> BTreeSet<NodeId> {
        v.iter().copied().map(NodeId).collect()
    }

    fn reach(v: &[(u32, &[u32])]) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        v.iter().map(|(n, r)| (NodeId(*n), ids(r))).collect()
    }

    /// Smallest subset (lowest-id first among equal sizes) covering every coverable node.
    fn brute_force_min_cover(
        one_hop: &BTreeSet<NodeId>,
        r: &BTreeMap<NodeId, BTreeSet<NodeId>>,
    ) -> BTreeSet<NodeId> {
        let nb: Vec<NodeId> = one_hop.iter().copied().collect();
        let target = coverable(one_hop, r);
        let mut best: Option<BTreeSet<NodeId>> = None;
        for mask in 0u32..(1 << nb.len()) {
            let pick: BTreeSet<NodeId> = (0..nb.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| nb[i])
                .collect();
            let cov: BTreeSet<NodeId> = pick
                .iter()
                .filter_map(|n| r.get(n))
                .flatten()
                .filter(|t| target.contains(t))
                .copied()
                .collect();
            if cov == target && best.as_ref().is_none_or(|b| pick.len() < b.len()) {
                best = Some(pick);
            }
        }
        best.unwrap()
    }

    // X=1, Y=2, P=10, Q=11
    #[test]
    fn two_disjoint_reachers_both_selected() {
        let m = greedy_cover(&ids(&[1, 2]), &reach(&[(1, &[10]), (2, &[11])]));
        assert_eq!(m, ids(&[1, 2]));
    }

    #[test]
    fn empty_two_hop_gives_empty_set() {
        assert!(greedy_cover(&ids(&[1, 2]), &BTreeMap::new()).is_empty());
    }

    // B=2, C=3, D=4, E=5
    #[test]
    fn redundant_neighbor_left_out() {
        let one = ids(&[2, 3]);
        let r = reach(&[(2, &[4, 5]), (3, &[4])]);
        let m = greedy_cover(&one, &r);
        assert_eq!(m, ids(&[2]));
        assert_eq!(m, brute_force_min_cover(&one, &r));
    }

    #[test]
    fn one_hop_members_are_not_targets() {
        let m = greedy_cover(&ids(&[1, 2]), &reach(&[(1, &[2]), (2, &[1])]));
        assert!(m.is_empty());
    }

    #[test]
    fn ties_go_to_lowest_id() {
        let m = greedy_cover(&ids(&[3, 4, 7]), &reach(&[(7, &[9]), (4, &[9]), (3, &[])]));
        assert_eq!(m, ids(&[4]));
    }

    #[test]
    fn seq_moves_only_on_change() {
        let one = ids(&[1, 2]);
        let r = reach(&[(1, &[10]), (2, &[11])]);
        let s0 = MprSet::default();
        let s1 = s0.select(&one, &r);
        assert_eq!(s1.seq_num, 1);
        let s2 = s1.select(&one, &r);
        assert_eq!(s2.seq_num, 1);
        let s3 = s2.select(&ids(&[1]), &r);
        assert_eq!((s3.seq_num, s3.members), (2, ids(&[1])));
    }
}
