//! Descendant-closure analytics over the noun hierarchy: how many
//! distinct concepts live below a synset, which synsets are significant
//! enough to seed taxonomy classes, and how far a synset sits from the
//! root.
//!
//! Counting walks every downward edge — hyponyms, instance hyponyms, and
//! meronyms — because a visual category covers both its subtypes and its
//! parts. Each reachable synset is counted exactly once: the hierarchy is
//! a DAG over hypernym edges, and adding part-whole edges can even
//! introduce the odd cycle, so the traversal is plain set-based
//! reachability rather than per-subtree summation (which double-counts
//! whenever paths reconverge).

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::wordnet::{SynsetId, UnknownSynset, WordNetGraph};

/// The candidate set produced by a significance scan: every synset whose
/// distinct descendant count exceeds the threshold, sorted by count
/// descending with offset as the tie-break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignificanceReport {
    pub threshold: u32,
    pub candidates: Vec<(SynsetId, u32)>,
    pub total_synsets: usize,
}

impl SignificanceReport {
    /// An empty report, useful when building a taxonomy without running
    /// a significance scan first.
    pub fn empty(graph: &WordNetGraph) -> Self {
        SignificanceReport {
            threshold: 0,
            candidates: Vec::new(),
            total_synsets: graph.len(),
        }
    }

    pub fn contains(&self, id: SynsetId) -> bool {
        self.candidates.iter().any(|&(c, _)| c == id)
    }
}

/// Shared traversal engine: a dense adjacency view of the downward edges
/// plus an epoch-stamped visited array, so one scan over all synsets does
/// not allocate per node.
struct DescendantCounter {
    offsets: Vec<u32>,
    dense: HashMap<u32, u32>,
    down: Vec<Vec<u32>>,
    visited: Vec<u32>,
    epoch: u32,
    queue: VecDeque<u32>,
}

impl DescendantCounter {
    fn new(graph: &WordNetGraph) -> Self {
        let offsets: Vec<u32> = graph.synsets().map(|s| s.id.offset()).collect();
        let dense: HashMap<u32, u32> = offsets
            .iter()
            .enumerate()
            .map(|(i, &o)| (o, i as u32))
            .collect();
        let down = graph
            .synsets()
            .map(|s| s.downward_edges().map(|t| dense[&t.offset()]).collect())
            .collect();
        DescendantCounter {
            visited: vec![0; offsets.len()],
            offsets,
            dense,
            down,
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    /// Number of distinct synsets reachable from `start` by one or more
    /// downward edges, the start itself excluded even when a cycle leads
    /// back to it.
    fn count(&mut self, start: u32) -> u32 {
        self.epoch += 1;
        let epoch = self.epoch;
        let start = self.dense[&start];
        self.visited[start as usize] = epoch;
        self.queue.clear();
        self.queue.push_back(start);
        let mut reached = 0u32;
        while let Some(node) = self.queue.pop_front() {
            for &next in &self.down[node as usize] {
                if self.visited[next as usize] != epoch {
                    self.visited[next as usize] = epoch;
                    reached += 1;
                    self.queue.push_back(next);
                }
            }
        }
        // `reached` never counted `start`: it was stamped before the walk.
        reached
    }
}

/// Counts the distinct synsets reachable from `id` via downward edges
/// (hyponym, instance hyponym, meronym), excluding `id` itself. Each
/// descendant counts once no matter how many paths lead to it.
pub fn hyponym_count(graph: &WordNetGraph, id: SynsetId) -> Result<u32, UnknownSynset> {
    graph.synset(id)?;
    Ok(DescendantCounter::new(graph).count(id.offset()))
}

/// Scans every synset and reports those whose descendant count strictly
/// exceeds `threshold`.
pub fn extract_significant(graph: &WordNetGraph, threshold: u32) -> SignificanceReport {
    let mut counter = DescendantCounter::new(graph);
    let mut candidates = Vec::new();
    for i in 0..counter.offsets.len() {
        let offset = counter.offsets[i];
        let count = counter.count(offset);
        if count > threshold {
            candidates.push((SynsetId::new(offset), count));
        }
    }
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    SignificanceReport {
        threshold,
        candidates,
        total_synsets: graph.len(),
    }
}

/// Length, in hypernym edges, of the shortest path from `id` up to the
/// root: 0 for the root itself, 1 for its direct children, and so on.
pub fn depth_to_root(graph: &WordNetGraph, id: SynsetId) -> Result<u32, UnknownSynset> {
    graph.synset(id)?;
    let root = graph.root();
    if id == root {
        return Ok(0);
    }
    let mut depth: HashMap<SynsetId, u32> = HashMap::new();
    depth.insert(id, 0);
    let mut queue = VecDeque::new();
    queue.push_back(id);
    while let Some(node) = queue.pop_front() {
        let d = depth[&node];
        for parent in graph.synset(node).unwrap().all_hypernyms() {
            if parent == root {
                return Ok(d + 1);
            }
            depth.entry(parent).or_insert_with(|| {
                queue.push_back(parent);
                d + 1
            });
        }
    }
    // Unreachable in a validated graph: every synset has an upward path
    // to the unique root.
    unreachable!("synset {id} has no path to the root in a validated graph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordnet::GraphBuilder;

    /// entity -> object -> {animal -> {dog, cat}, plant -> tree}
    fn mini() -> WordNetGraph {
        GraphBuilder::new()
            .synset(1, &["entity"], "")
            .synset(2, &["object"], "")
            .synset(3, &["animal"], "")
            .synset(4, &["dog"], "")
            .synset(5, &["cat"], "")
            .synset(6, &["plant"], "")
            .synset(7, &["tree"], "")
            .hypernym(2, 1)
            .hypernym(3, 2)
            .hypernym(4, 3)
            .hypernym(5, 3)
            .hypernym(6, 2)
            .hypernym(7, 6)
            .build()
            .unwrap()
    }

    #[test]
    fn leaf_counts_zero() {
        let g = mini();
        assert_eq!(hyponym_count(&g, SynsetId::new(4)).unwrap(), 0);
        assert_eq!(hyponym_count(&g, SynsetId::new(7)).unwrap(), 0);
    }

    #[test]
    fn root_counts_everything_else() {
        let g = mini();
        assert_eq!(hyponym_count(&g, g.root()).unwrap() as usize, g.len() - 1);
    }

    #[test]
    fn interior_counts_match_hand_enumeration() {
        let g = mini();
        assert_eq!(hyponym_count(&g, SynsetId::new(3)).unwrap(), 2);
        assert_eq!(hyponym_count(&g, SynsetId::new(2)).unwrap(), 5);
        assert_eq!(hyponym_count(&g, SynsetId::new(6)).unwrap(), 1);
    }

    #[test]
    fn diamond_descendants_count_once() {
        // 1 -> {2, 3} -> 4: node 4 is reachable from 1 via two paths.
        let g = GraphBuilder::new()
            .synset(1, &["root"], "")
            .synset(2, &["left"], "")
            .synset(3, &["right"], "")
            .synset(4, &["leaf"], "")
            .hypernym(2, 1)
            .hypernym(3, 1)
            .hypernym(4, 2)
            .hypernym(4, 3)
            .build()
            .unwrap();
        assert_eq!(hyponym_count(&g, SynsetId::new(1)).unwrap(), 3);
    }

    #[test]
    fn parts_count_as_descendants() {
        let g = GraphBuilder::new()
            .synset(1, &["root"], "")
            .synset(2, &["house"], "")
            .synset(3, &["roof"], "")
            .hypernym(2, 1)
            .hypernym(3, 1)
            .part(2, 3)
            .build()
            .unwrap();
        // house reaches roof through the part edge; roof is a leaf.
        assert_eq!(hyponym_count(&g, SynsetId::new(2)).unwrap(), 1);
        assert_eq!(hyponym_count(&g, SynsetId::new(3)).unwrap(), 0);
        // The root still counts each synset once despite the extra edge.
        assert_eq!(hyponym_count(&g, SynsetId::new(1)).unwrap(), 2);
    }

    #[test]
    fn unknown_id_is_an_error() {
        let g = mini();
        assert!(hyponym_count(&g, SynsetId::new(999)).is_err());
        assert!(depth_to_root(&g, SynsetId::new(999)).is_err());
    }

    #[test]
    fn significance_report_matches_fixture() {
        let g = mini();
        let report = extract_significant(&g, 1);
        assert_eq!(report.threshold, 1);
        assert_eq!(report.total_synsets, 7);
        assert_eq!(
            report.candidates,
            vec![
                (SynsetId::new(1), 6),
                (SynsetId::new(2), 5),
                (SynsetId::new(3), 2),
            ]
        );
    }

    #[test]
    fn threshold_equal_to_graph_size_yields_nothing() {
        let g = mini();
        let report = extract_significant(&g, g.len() as u32);
        assert!(report.candidates.is_empty());
    }

    #[test]
    fn report_orders_by_count_then_offset() {
        // Two siblings with equal counts must appear offset-ascending.
        let g = GraphBuilder::new()
            .synset(1, &["root"], "")
            .synset(2, &["b1"], "")
            .synset(3, &["b2"], "")
            .synset(4, &["l1"], "")
            .synset(5, &["l2"], "")
            .hypernym(2, 1)
            .hypernym(3, 1)
            .hypernym(4, 2)
            .hypernym(5, 3)
            .build()
            .unwrap();
        let report = extract_significant(&g, 0);
        assert_eq!(
            report.candidates,
            vec![
                (SynsetId::new(1), 4),
                (SynsetId::new(2), 1),
                (SynsetId::new(3), 1),
            ]
        );
    }

    #[test]
    fn depths_count_edges_from_root() {
        let g = mini();
        assert_eq!(depth_to_root(&g, g.root()).unwrap(), 0);
        assert_eq!(depth_to_root(&g, SynsetId::new(2)).unwrap(), 1);
        assert_eq!(depth_to_root(&g, SynsetId::new(4)).unwrap(), 3);
    }

    #[test]
    fn depth_takes_the_shortest_path() {
        // 5 has a short route (5 -> 2 -> 1) and a long one (5 -> 4 -> 3 -> 1).
        let g = GraphBuilder::new()
            .synset(1, &["root"], "")
            .synset(2, &["short"], "")
            .synset(3, &["long_a"], "")
            .synset(4, &["long_b"], "")
            .synset(5, &["leaf"], "")
            .hypernym(2, 1)
            .hypernym(3, 1)
            .hypernym(4, 3)
            .hypernym(5, 4)
            .hypernym(5, 2)
            .build()
            .unwrap();
        assert_eq!(depth_to_root(&g, SynsetId::new(5)).unwrap(), 2);
    }
}
