// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Finite undirected graphs stored as sorted adjacency lists.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::group::GroupElement;

/// Optional per-vertex provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Group(GroupElement),
    Block { block: usize, local: usize },
}

/// Symmetric, irreflexive, duplicate-free adjacency. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGraph {
    adj: Vec<Vec<usize>>,
    labels: Option<Vec<Label>>,
}

/// Path length, with `Infinite` for vertices in different components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

/// A set of vertices, kept sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSet(
            mask.iter()
                .enumerate()
                .filter_map(|(v, &m)| m.then_some(v))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn insert(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(at) => {
                self.0.insert(at, v);
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.iter().any(|v| other.contains(v))
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl FiniteGraph {
    /// Builds a graph from an edge list. Duplicate edges are merged; loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge ({u}, {v}) out of range for {n} vertices"));
            }
            if u == v {
                return invalid(format!("self-loop at vertex {u}"));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(FiniteGraph { adj, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.adj.len() {
            return invalid(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.adj.len()
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `Some(d)` when every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map(Vec::len)?;
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<Label> {
        self.labels.as_ref().map(|l| l[v])
    }

    /// Each edge once, as `(u, v)` with `u < v`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count() {
            return invalid(format!(
                "vertex {v} out of range for {} vertices",
                self.vertex_count()
            ));
        }
        Ok(())
    }

    fn check_set(&self, a: &VertexSet) -> Result<()> {
        match a.as_slice().last() {
            Some(&v) => self.check_vertex(v),
            None => Ok(()),
        }
    }

    /// BFS distances from a set of sources; `usize::MAX` marks unreachable.
    pub fn bfs_from(&self, sources: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn path_distance(&self, u: usize, v: usize) -> Result<Distance> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(to_distance(self.bfs_from([u])[v]))
    }

    /// Smallest path distance between a member of `a` and a member of `b`.
    pub fn set_distance(&self, a: &VertexSet, b: &VertexSet) -> Result<Distance> {
        if a.is_empty() || b.is_empty() {
            return invalid("set distance needs two non-empty sets");
        }
        self.check_set(a)?;
        self.check_set(b)?;
        let dist = self.bfs_from(a.iter());
        Ok(to_distance(
            b.iter().map(|v| dist[v]).min().unwrap_or(usize::MAX),
        ))
    }

    /// Connected components of the subgraph induced on `restrict_to`, each
    /// sorted, ordered by smallest member.
    pub fn components(&self, restrict_to: &VertexSet) -> Vec<VertexSet> {
        let inside = restrict_to.mask(self.vertex_count());
        self.components_masked(&inside)
    }

    pub fn components_masked(&self, inside: &[bool]) -> Vec<VertexSet> {
        let mut seen = vec![false; self.vertex_count()];
        let mut out = Vec::new();
        for start in 0..self.vertex_count() {
            if !inside[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut block = vec![start];
            let mut i = 0;
            while i < block.len() {
                let u = block[i];
                i += 1;
                for &w in &self.adj[u] {
                    if inside[w] && !seen[w] {
                        seen[w] = true;
                        block.push(w);
                    }
                }
            }
            out.push(VertexSet::from(block));
        }
        out
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet((0..self.vertex_count()).collect())
    }

    pub fn is_connected(&self) -> bool {
        self.components(&self.all_vertices()).len() <= 1
    }

    pub fn is_connected_set(&self, a: &VertexSet) -> bool {
        !a.is_empty() && self.components(a).len() == 1
    }

    pub fn is_independent(&self, a: &VertexSet) -> bool {
        a.iter()
            .all(|u| self.adj[u].iter().all(|&w| w <= u || !a.contains(w)))
    }

    /// `a` together with every neighbor of a member.
    pub fn closed_neighborhood(&self, a: &VertexSet) -> VertexSet {
        a.iter()
            .chain(a.iter().flat_map(|u| self.adj[u].iter().copied()))
            .collect()
    }

    /// Induced subgraph on `a`; vertex `i` of the result is `a[i]`.
    pub fn induced(&self, a: &VertexSet) -> FiniteGraph {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, v) in a.iter().enumerate() {
            index[v] = i;
        }
        let adj = a
            .iter()
            .map(|u| {
                self.adj[u]
                    .iter()
                    .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                    .collect()
            })
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| a.iter().map(|v| l[v]).collect());
        FiniteGraph { adj, labels }
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<FiniteGraph> {
        let n = self.vertex_count();
        let mut hit = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut hit[p], true))
        {
            return invalid("not a permutation of the vertex set");
        }
        FiniteGraph::from_edges(n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }
}

fn to_distance(d: usize) -> Distance {
    if d == usize::MAX {
        Distance::Infinite
    } else {
        Distance::Finite(d)
    }
}

/// Small named graphs used across tests and examples.
pub mod families {
    use super::FiniteGraph;

    pub fn path(n: usize) -> FiniteGraph {
        FiniteGraph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path")
    }

    pub fn cycle(n: usize) -> FiniteGraph {
        assert!(n >= 3);
        FiniteGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle")
    }

    pub fn complete(n: usize) -> FiniteGraph {
        FiniteGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
            .expect("complete")
    }

    pub fn petersen() -> FiniteGraph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        FiniteGraph::from_edges(10, outer.chain(spokes).chain(inner)).expect("petersen")
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn rejects_loops_and_range() {
        assert!(FiniteGraph::from_edges(2, [(0, 0)]).is_err());
        assert!(FiniteGraph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn adjacency_is_symmetric_and_deduplicated() {
        let g = FiniteGraph::from_edges(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn path_distance_examples() {
        let p = path(6);
        assert_eq!(p.path_distance(2, 2).unwrap(), Distance::Finite(0));
        assert_eq!(p.path_distance(2, 3).unwrap(), Distance::Finite(1));
        assert_eq!(p.path_distance(0, 5).unwrap(), Distance::Finite(5));
        assert!(p.path_distance(0, 6).is_err());
    }

    #[test]
    fn set_distance_examples() {
        let p = path(6);
        let a: VertexSet = vec![1, 2].into();
        let b: VertexSet = vec![2, 5].into();
        assert_eq!(p.set_distance(&a, &b).unwrap(), Distance::Finite(0));
        let u: VertexSet = vec![0].into();
        let v: VertexSet = vec![4].into();
        assert_eq!(
            p.set_distance(&u, &v).unwrap(),
            p.path_distance(0, 4).unwrap()
        );
        let two = FiniteGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            two.set_distance(&vec![0].into(), &vec![3].into()).unwrap(),
            Distance::Infinite
        );
        assert!(p.set_distance(&VertexSet::new(), &v).is_err());
    }

    #[test]
    fn components_examples() {
        let c = cycle(5);
        assert_eq!(c.components(&c.all_vertices()).len(), 1);
        assert!(c.components(&VertexSet::new()).is_empty());
        let two = FiniteGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let blocks = two.components(&two.all_vertices());
        assert_eq!(blocks, vec![vec![0, 1].into(), vec![2, 3].into()]);
    }

    #[test]
    fn independence_examples() {
        let p = path(3);
        assert!(p.is_independent(&VertexSet::new()));
        assert!(p.is_independent(&vec![1].into()));
        assert!(!p.is_independent(&vec![0, 1].into()));
        assert!(p.is_independent(&vec![0, 2].into()));
    }

    #[test]
    fn induced_and_neighborhood() {
        let c = cycle(6);
        let s: VertexSet = vec![0].into();
        assert_eq!(c.closed_neighborhood(&s), vec![0, 1, 5].into());
        let sub = c.induced(&vec![0, 1, 2].into());
        assert_eq!(sub.edge_count(), 2);
        assert_eq!(petersen().regular_degree(), Some(3));
    }
}
