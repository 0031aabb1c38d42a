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

//! Block-structured presentations of two-ended graphs.
//!
//! Vertices are partitioned into an ordered list of finite blocks; edges run
//! inside a block or between consecutive blocks (and between the last and
//! first block in cycle mode). In segment mode the first and last blocks
//! stand in for the two ends. In cycle mode the instance is read as a
//! quotient of a bi-infinite line and questions about ends are answered on
//! a threefold unrolling of the cycle.

use serde::{Deserialize, Serialize};

use crate::cayley::{cayley_window, orbit_vertices, Closure};
use crate::chi::{chromatic_number, Budget, ChiOutcome};
use crate::error::{invalid, Error, Result};
use crate::graph::{FiniteGraph, Label, VertexSet};
use crate::group::MarkedGroupSpec;

#[derive(Clone, Debug)]
pub struct LineInstance {
    graph: FiniteGraph,
    blocks: Vec<VertexSet>,
    block_of: Vec<usize>,
    mode: Closure,
    chi: Option<u32>,
    cover: Option<FiniteGraph>,
}

/// On-disk form of a [`LineInstance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineInstanceJson {
    pub mode: Closure,
    /// Vertex ids of each block, in line order.
    pub blocks: Vec<Vec<usize>>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<u32>,
}

const COVER_COPIES: usize = 3;

impl LineInstance {
    pub fn new(
        graph: FiniteGraph,
        blocks: Vec<Vec<usize>>,
        mode: Closure,
        chi: Option<u32>,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        let m = blocks.len();
        if m == 0 {
            return invalid("instance has no blocks");
        }
        if mode == Closure::Cycle && m < 3 {
            return invalid(format!("cycle mode needs at least 3 blocks, got {m}"));
        }
        let mut block_of = vec![usize::MAX; n];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return invalid(format!("block {i} is empty"));
            }
            for &v in block {
                if v >= n {
                    return invalid(format!("block {i} names vertex {v} of {n}"));
                }
                if block_of[v] != usize::MAX {
                    return invalid(format!("vertex {v} appears in two blocks"));
                }
                block_of[v] = i;
            }
        }
        if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
            return invalid(format!("vertex {v} is in no block"));
        }
        for (u, v) in graph.edges() {
            let (bu, bv) = (block_of[u], block_of[v]);
            let gap = bu.abs_diff(bv);
            let ok = gap <= 1 || (mode == Closure::Cycle && gap == m - 1);
            if !ok {
                return invalid(format!(
                    "edge ({u},{v}) joins non-adjacent blocks {bu} and {bv}"
                ));
            }
        }
        if !graph.is_connected() {
            return invalid("instance graph is not connected");
        }
        if chi == Some(0) {
            return invalid("chi must be positive");
        }
        let blocks = blocks.into_iter().map(VertexSet::from).collect();
        let mut inst = LineInstance {
            graph,
            blocks,
            block_of,
            mode,
            chi,
            cover: None,
        };
        if mode == Closure::Cycle {
            inst.cover = Some(inst.build_cover()?);
        }
        Ok(inst)
    }

    pub fn from_json(doc: LineInstanceJson) -> Result<Self> {
        let n = doc.blocks.iter().map(Vec::len).sum();
        let graph = FiniteGraph::from_edges(n, doc.edges.iter().map(|e| (e[0], e[1])))?;
        Self::new(graph, doc.blocks, doc.mode, doc.chi)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: LineInstanceJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("instance json: {e}")))?;
        Self::from_json(doc)
    }

    pub fn to_json(&self) -> LineInstanceJson {
        LineInstanceJson {
            mode: self.mode,
            blocks: self.blocks.iter().map(|b| b.as_slice().to_vec()).collect(),
            edges: self.graph.edges().map(|(u, v)| [u, v]).collect(),
            chi: self.chi,
        }
    }

    /// Same graph and blocks, read in another mode.
    pub fn with_mode(&self, mode: Closure) -> Result<Self> {
        let blocks = self.blocks.iter().map(|b| b.as_slice().to_vec()).collect();
        Self::new(self.graph.clone(), blocks, mode, self.chi)
    }

    pub fn with_chi(mut self, chi: Option<u32>) -> Self {
        self.chi = chi;
        self
    }

    /// One vertex per block.
    pub fn path(m: usize, mode: Closure) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = (1..m).map(|i| (i - 1, i)).collect();
        if mode == Closure::Cycle && m >= 3 {
            edges.push((m - 1, 0));
        }
        let labels = (0..m)
            .map(|i| Label::Block { block: i, local: 0 })
            .collect();
        let g = FiniteGraph::from_edges(m, edges)?.with_labels(labels)?;
        Self::new(g, (0..m).map(|i| vec![i]).collect(), mode, None)
    }

    /// Two vertices per block joined by a rung; rails join consecutive blocks.
    pub fn ladder(m: usize, mode: Closure) -> Result<Self> {
        let v = |i: usize, side: usize| 2 * i + side;
        let mut edges: Vec<(usize, usize)> = (0..m).map(|i| (v(i, 0), v(i, 1))).collect();
        let links = if mode == Closure::Cycle {
            m
        } else {
            m.saturating_sub(1)
        };
        for i in 0..links {
            let j = (i + 1) % m;
            edges.push((v(i, 0), v(j, 0)));
            edges.push((v(i, 1), v(j, 1)));
        }
        let labels = (0..2 * m)
            .map(|x| Label::Block {
                block: x / 2,
                local: x % 2,
            })
            .collect();
        let g = FiniteGraph::from_edges(2 * m, edges)?.with_labels(labels)?;
        Self::new(
            g,
            (0..m).map(|i| vec![v(i, 0), v(i, 1)]).collect(),
            mode,
            None,
        )
    }

    /// `m` consecutive orbits of a Cayley graph, one orbit per block.
    pub fn cayley(spec: MarkedGroupSpec, m: usize, mode: Closure) -> Result<Self> {
        let g = cayley_window(spec, m, mode)?;
        let blocks = (0..m)
            .map(|n| orbit_vertices(spec.k(), n).collect())
            .collect();
        Self::new(g, blocks, mode, None)
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn mode(&self) -> Closure {
        self.mode
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> &VertexSet {
        &self.blocks[i]
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(VertexSet::len).max().unwrap_or(0)
    }

    pub fn chi_hint(&self) -> Option<u32> {
        self.chi
    }

    /// The supplied chromatic number, or an exact computation.
    pub fn chi(&self, budget: Budget) -> Result<u32> {
        if let Some(c) = self.chi {
            return Ok(c);
        }
        match chromatic_number(&self.graph, None, budget)? {
            ChiOutcome::Exact { chi, .. } => Ok(chi),
            ChiOutcome::Bounded { lower, upper, .. } => Err(Error::Undecided(format!(
                "instance chromatic number in [{lower}, {upper}]"
            ))),
        }
    }

    /// Signed block step from `u` to an adjacent `w`, in `{-1, 0, 1}`.
    fn step(&self, u: usize, w: usize) -> i64 {
        let m = self.blocks.len();
        let (bu, bw) = (self.block_of[u], self.block_of[w]);
        if bu == bw {
            0
        } else if (bu + 1) % m == bw {
            1
        } else {
            -1
        }
    }

    fn build_cover(&self) -> Result<FiniteGraph> {
        let n = self.graph.vertex_count();
        let mut edges = Vec::new();
        for (u, v) in self.graph.edges() {
            let (u, v) = if self.step(u, v) >= 0 { (u, v) } else { (v, u) };
            let wraps = self.step(u, v) == 1 && self.block_of[v] < self.block_of[u];
            for c in 0..COVER_COPIES {
                if wraps {
                    if c + 1 < COVER_COPIES {
                        edges.push((c * n + u, (c + 1) * n + v));
                    }
                } else {
                    edges.push((c * n + u, c * n + v));
                }
            }
        }
        FiniteGraph::from_edges(COVER_COPIES * n, edges)
    }

    /// Places a connected set on the middle copy of the unrolled cycle.
    fn lift(&self, set: &VertexSet) -> Result<Vec<usize>> {
        let n = self.graph.vertex_count();
        let m = self.blocks.len() as i64;
        let mut pos: Vec<Option<i64>> = vec![None; n];
        let start = set.as_slice()[0];
        pos[start] = Some(self.block_of[start] as i64);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            let pu = pos[u].expect("placed");
            for &w in self.graph.neighbors(u) {
                if !set.contains(w) {
                    continue;
                }
                let pw = pu + self.step(u, w);
                match pos[w] {
                    None => {
                        pos[w] = Some(pw);
                        stack.push(w);
                    }
                    Some(p) if p != pw => {
                        return invalid("set winds around the cycle and has no finite lift");
                    }
                    Some(_) => {}
                }
            }
        }
        let lo = set
            .iter()
            .map(|v| pos[v].expect("connected"))
            .min()
            .unwrap();
        let hi = set
            .iter()
            .map(|v| pos[v].expect("connected"))
            .max()
            .unwrap();
        let shift = m - lo.div_euclid(m) * m;
        if hi + shift >= COVER_COPIES as i64 * m - 1 {
            return invalid("set is too long to lift into the unrolled cycle");
        }
        Ok(set
            .iter()
            .map(|v| {
                let p = pos[v].unwrap() + shift;
                let copy = (p - self.block_of[v] as i64) / m;
                copy as usize * n + v
            })
            .collect())
    }

    /// Whether removing the connected set `f` leaves exactly two end
    /// components: one reaching the left end and a different one reaching
    /// the right end.
    pub fn divides_into_two(&self, f: &VertexSet) -> Result<bool> {
        let n = self.graph.vertex_count();
        if f.is_empty() {
            return invalid("separator candidate is empty");
        }
        if f.as_slice().last().is_some_and(|&v| v >= n) {
            return invalid("separator candidate out of range");
        }
        if !self.graph.is_connected_set(f) {
            return invalid("separator candidate is not connected");
        }
        let m = self.blocks.len();
        let (g, removed, left, right): (&FiniteGraph, Vec<usize>, Vec<usize>, Vec<usize>) =
            match &self.cover {
                None => (
                    &self.graph,
                    f.as_slice().to_vec(),
                    self.blocks[0].as_slice().to_vec(),
                    self.blocks[m - 1].as_slice().to_vec(),
                ),
                Some(cover) => (
                    cover,
                    self.lift(f)?,
                    self.blocks[0].iter().collect(),
                    self.blocks[m - 1]
                        .iter()
                        .map(|v| (COVER_COPIES - 1) * n + v)
                        .collect(),
                ),
            };
        let mut alive = vec![true; g.vertex_count()];
        for v in removed {
            alive[v] = false;
        }
        let comp = component_ids(g, &alive);
        let ends = |side: &[usize]| {
            let mut ids: Vec<usize> = side
                .iter()
                .filter(|&&v| alive[v])
                .map(|&v| comp[v])
                .collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        };
        let (l, r) = (ends(&left), ends(&right));
        Ok(l.len() == 1 && r.len() == 1 && l != r)
    }

    /// Vertices of the `width` consecutive blocks starting at `start`, in
    /// block order then vertex order.
    pub fn window(&self, start: usize, width: usize) -> Vec<usize> {
        let m = self.blocks.len();
        (0..width)
            .flat_map(|i| self.blocks[(start + i) % m].iter())
            .collect()
    }

    /// Start blocks of all windows of `width` blocks, and the effective
    /// width (clamped so windows never wrap onto themselves).
    pub fn window_starts(&self, width: usize) -> (std::ops::Range<usize>, usize) {
        let m = self.blocks.len();
        match self.mode {
            Closure::Segment => {
                let w = width.clamp(1, m);
                (0..m - w + 1, w)
            }
            Closure::Cycle => (0..m, width.clamp(1, m - 1)),
        }
    }

    /// First block of a connected set along the line (the start of its arc
    /// in cycle mode).
    pub fn start_block(&self, set: &VertexSet) -> usize {
        let m = self.blocks.len();
        let mut hit = vec![false; m];
        for v in set.iter() {
            hit[self.block_of[v]] = true;
        }
        match self.mode {
            Closure::Segment => hit.iter().position(|&h| h).unwrap_or(0),
            Closure::Cycle => (0..m)
                .find(|&b| hit[b] && !hit[(b + m - 1) % m])
                .unwrap_or(0),
        }
    }

    /// Number of distinct blocks a set touches.
    pub fn span(&self, set: &VertexSet) -> usize {
        let mut b: Vec<usize> = set.iter().map(|v| self.block_of[v]).collect();
        b.sort_unstable();
        b.dedup();
        b.len()
    }

    pub fn touches_end(&self, set: &VertexSet) -> bool {
        let last = self.blocks.len() - 1;
        set.iter()
            .any(|v| self.block_of[v] == 0 || self.block_of[v] == last)
    }
}

fn component_ids(g: &FiniteGraph, alive: &[bool]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; g.vertex_count()];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..g.vertex_count() {
        if !alive[s] || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if alive[w] && comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}
