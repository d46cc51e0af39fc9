use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::markers::{ExpressionProfile, Sign, Signature};
use crate::cluster::Algorithm;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClusterRef {
    pub stage: String,
    pub algorithm: Algorithm,
    pub cluster: usize,
}

impl fmt::Display for ClusterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.stage, self.algorithm, self.cluster)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourcedProfile {
    pub source: ClusterRef,
    pub profile: ExpressionProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GroupLabel {
    Selfish,
    NonSelfish,
    #[default]
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviouralGroup {
    pub id: usize,
    pub signature: Signature,
    pub members: Vec<ClusterRef>,
    /// Positions of the members in the input profile list.
    pub profile_indices: Vec<usize>,
    #[serde(default)]
    pub label: GroupLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

/// Jaccard similarity of two signed attribute sets; `+x` and `-x` do not match.
/// Two empty sets have similarity 0.
pub fn jaccard(a: &Signature, b: &Signature) -> f64 {
    let inter = a.iter().filter(|(k, s)| b.get(*k) == Some(*s)).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn group_signature(members: &[usize], sigs: &[Signature]) -> Signature {
    let mut inter = sigs[members[0]].clone();
    for &m in &members[1..] {
        inter.retain(|k, s| sigs[m].get(k) == Some(s));
    }
    if !inter.is_empty() || members.len() == 1 {
        return inter;
    }
    let mut counts: BTreeMap<(&String, Sign), usize> = BTreeMap::new();
    for &m in members {
        for (k, s) in &sigs[m] {
            *counts.entry((k, *s)).or_default() += 1;
        }
    }
    let mut majority = Signature::new();
    for ((k, s), c) in counts {
        if 2 * c >= members.len() && !majority.contains_key(k) {
            majority.insert(k.clone(), s);
        }
    }
    majority
}

/// Agglomerates profiles into groups, repeatedly merging the most similar pair of groups
/// while their signatures' Jaccard similarity reaches `threshold`.
///
/// A group's signature is the intersection of its members' signatures, or the signs held
/// by at least half of the members when that intersection is empty. Ties go to the pair
/// with the lowest indices. Groups are numbered from 1 in order of their first member.
pub fn match_groups(profiles: &[SourcedProfile], threshold: f64) -> Vec<BehaviouralGroup> {
    let sigs: Vec<Signature> = profiles.iter().map(|p| p.profile.signature()).collect();
    let mut groups: Vec<(Vec<usize>, Signature)> = (0..profiles.len()).map(|i| (vec![i], sigs[i].clone())).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let s = jaccard(&groups[i].1, &groups[j].1);
                if s >= threshold && best.is_none_or(|(b, _, _)| s > b) {
                    best = Some((s, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let (members, _) = groups.remove(j);
        groups[i].0.extend(members);
        groups[i].0.sort_unstable();
        groups[i].1 = group_signature(&groups[i].0, &sigs);
    }
    groups
        .into_iter()
        .enumerate()
        .map(|(g, (members, signature))| BehaviouralGroup {
            id: g + 1,
            signature,
            members: members.iter().map(|&m| profiles[m].source.clone()).collect(),
            profile_indices: members,
            label: GroupLabel::Unlabeled,
            score: None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(items: &[(&str, Sign)]) -> Signature {
        items.iter().map(|(a, s)| (a.to_string(), *s)).collect()
    }

    fn profile(algorithm: Algorithm, cluster: usize, s: &Signature) -> SourcedProfile {
        SourcedProfile {
            source: ClusterRef { stage: "A".into(), algorithm, cluster },
            profile: ExpressionProfile { cluster, markers: s.clone(), effect: BTreeMap::new() },
        }
    }

    use Sign::{Minus, Plus};

    #[test]
    fn identical_signatures_merge() {
        let s = sig(&[("travel", Plus), ("udebt", Plus)]);
        let g = match_groups(&[profile(Algorithm::KMeans, 0, &s), profile(Algorithm::Clara, 3, &s)], 0.5);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].members.len(), 2);
        assert_eq!(g[0].signature, s);
    }

    #[test]
    fn disjoint_signatures_stay_apart() {
        let p = [
            profile(Algorithm::KMeans, 0, &sig(&[("a", Plus)])),
            profile(Algorithm::KMeans, 1, &sig(&[("a", Minus)])),
            profile(Algorithm::Clara, 0, &sig(&[("b", Plus)])),
        ];
        assert_eq!(match_groups(&p, 0.5).len(), 3);
    }

    #[test]
    fn half_overlap_merges_at_threshold() {
        let a = sig(&[("hvalue", Plus), ("carvalue", Plus), ("income", Plus)]);
        let b = sig(&[("age", Plus), ("carvalue", Plus), ("hvalue", Plus)]);
        assert_eq!(jaccard(&a, &b), 0.5);
        let g = match_groups(&[profile(Algorithm::KMeans, 2, &a), profile(Algorithm::Clara, 4, &b)], 0.5);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].signature, sig(&[("carvalue", Plus), ("hvalue", Plus)]));
    }

    #[test]
    fn majority_fallback() {
        let sigs = [
            sig(&[("a", Plus), ("b", Plus)]),
            sig(&[("b", Plus), ("c", Plus)]),
            sig(&[("c", Plus), ("a", Plus)]),
        ];
        assert_eq!(group_signature(&[0, 1], &sigs), sig(&[("b", Plus)]));
        assert_eq!(group_signature(&[0, 1, 2], &sigs), sig(&[("a", Plus), ("b", Plus), ("c", Plus)]));
    }

    #[test]
    fn empty_signatures_stay_singletons() {
        let e = Signature::new();
        let g = match_groups(&[profile(Algorithm::KMeans, 0, &e), profile(Algorithm::Clara, 0, &e)], 0.5);
        assert_eq!(g.len(), 2);
    }

    fn arb_sig() -> impl Strategy<Value = Signature> {
        prop::collection::btree_map(
            prop::sample::select(vec!["a", "b", "c", "d", "e"]).prop_map(String::from),
            prop::bool::ANY.prop_map(|b| if b { Plus } else { Minus }),
            0..4,
        )
    }

    proptest! {
        #[test]
        fn output_partitions_input(sigs in prop::collection::vec(arb_sig(), 1..12), t in 0.1f64..1.0) {
            let p: Vec<SourcedProfile> = sigs.iter().enumerate().map(|(i, s)| profile(Algorithm::KMeans, i, s)).collect();
            let g = match_groups(&p, t);
            prop_assert!(g.len() <= p.len());
            let mut seen: Vec<usize> = g.iter().flat_map(|x| x.profile_indices.clone()).collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..p.len()).collect::<Vec<_>>());
            prop_assert_eq!(&g, &match_groups(&p, t));
        }
    }
}
