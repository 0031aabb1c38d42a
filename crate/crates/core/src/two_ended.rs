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

//! Coloring two-ended graphs with at most `2χ - 1` colors.
//!
//! 1. Choose a family Ψ of connected sets, each splitting the line into its
//!    two ends, pairwise at distance at least 4 (greedy, left to right).
//! 2. `B*` is the union of the closed neighborhoods `S*` of the members.
//!    Every component of `B*` sits inside one `S*`, so each is colored
//!    exactly with `χ` colors.
//! 3. Dropping the last color class from `B*` leaves `B`, colored with
//!    `χ - 1` colors.
//! 4. The components of the complement of `B` are finite pieces between
//!    consecutive members; each gets `χ` fresh colors.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::Closure;
use crate::chi::{find_coloring, is_proper, Budget, Color, Coloring, SearchOutcome};
use crate::error::{invalid, Error, Result};
use crate::graph::{FiniteGraph, VertexSet};
use crate::line::LineInstance;

/// Minimum pairwise path distance between members of Ψ.
pub const MIN_SEPARATION: usize = 4;

/// Windowing of the separator search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SeparatorParams {
    pub window_blocks: usize,
    pub size_cap: usize,
}

impl SeparatorParams {
    /// Two-block windows, sets up to twice the largest block.
    pub fn default_for(inst: &LineInstance) -> Self {
        SeparatorParams {
            window_blocks: 2,
            size_cap: 2 * inst.max_block_size(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparatorFamily {
    pub members: Vec<VertexSet>,
    /// Pairs `(i, j)`, `i < j`, of members joined by a path avoiding every
    /// other member.
    pub t_edges: Vec<(usize, usize)>,
}

impl SeparatorFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn t_degree(&self, i: usize) -> usize {
        self.t_edges
            .iter()
            .filter(|&&(a, b)| a == i || b == i)
            .count()
    }

    pub fn union(&self) -> VertexSet {
        self.members.iter().flat_map(|m| m.iter()).collect()
    }
}

/// Everything checked about a separator family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyCheck {
    pub members: usize,
    pub all_divide: bool,
    pub min_pairwise_distance: Option<usize>,
    pub separation_ok: bool,
    pub t_degrees: Vec<usize>,
    /// Interior members have exactly two T-neighbors, none has more.
    pub t_degree_ok: bool,
    /// T is a forest (segment) or a single cycle through all members (cycle).
    pub t_shape_ok: bool,
}

impl FamilyCheck {
    pub fn ok(&self) -> bool {
        self.all_divide && self.separation_ok && self.t_degree_ok && self.t_shape_ok
    }
}

/// Connected subsets of the window `verts`, in lexicographic order of their
/// window positions, restricted to positions allowed by `admissible`.
/// `visit` returns `true` to accept a set; accepted sets may shrink
/// `admissible` through the returned closure state.
struct WindowSearch<'a> {
    local_adj: Vec<u64>,
    verts: &'a [usize],
    cap: usize,
}

impl<'a> WindowSearch<'a> {
    fn new(g: &FiniteGraph, verts: &'a [usize], cap: usize) -> Result<Self> {
        if verts.len() > 64 {
            return invalid(format!(
                "window holds {} vertices; at most 64 are supported",
                verts.len()
            ));
        }
        let local_adj = verts
            .iter()
            .map(|&u| {
                verts
                    .iter()
                    .enumerate()
                    .filter(|&(_, &w)| g.has_edge(u, w))
                    .fold(0u64, |m, (j, _)| m | 1 << j)
            })
            .collect();
        Ok(WindowSearch {
            local_adj,
            verts,
            cap,
        })
    }

    fn connected(&self, mask: u64) -> bool {
        let mut reach = mask & mask.wrapping_neg();
        loop {
            let mut next = reach;
            let mut bits = reach;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= self.local_adj[j] & mask;
            }
            if next == reach {
                return reach == mask;
            }
            reach = next;
        }
    }

    fn to_set(&self, mask: u64) -> VertexSet {
        let mut bits = mask;
        let mut out = Vec::with_capacity(mask.count_ones() as usize);
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out.push(self.verts[j]);
        }
        out.into()
    }

    /// DFS over index sequences; `admissible` is re-read on every step so a
    /// visitor that accepts a set can retire positions mid-search.
    fn run(
        &self,
        admissible: &mut u64,
        visit: &mut dyn FnMut(&Self, u64, &mut u64) -> Result<()>,
    ) -> Result<()> {
        self.extend(0, 0, 0, admissible, visit)
    }

    fn extend(
        &self,
        mask: u64,
        from: usize,
        size: usize,
        admissible: &mut u64,
        visit: &mut dyn FnMut(&Self, u64, &mut u64) -> Result<()>,
    ) -> Result<()> {
        if size == self.cap {
            return Ok(());
        }
        for j in from..self.verts.len() {
            if mask & !*admissible != 0 {
                return Ok(());
            }
            if *admissible >> j & 1 == 0 {
                continue;
            }
            let next = mask | 1 << j;
            if self.connected(next) {
                visit(self, next, admissible)?;
            }
            self.extend(next, j + 1, size + 1, admissible, visit)?;
        }
        Ok(())
    }
}

/// Every connected set of at most `size_cap` vertices inside some window of
/// `window_blocks` consecutive blocks that splits the instance into its two
/// ends. Windows are scanned left to right, sets in lexicographic order;
/// repeats from overlapping windows are dropped.
pub fn find_separators(
    inst: &LineInstance,
    window_blocks: usize,
    size_cap: usize,
) -> Result<Vec<VertexSet>> {
    if window_blocks == 0 || size_cap == 0 {
        return invalid("window and size cap must be positive");
    }
    let (starts, width) = inst.window_starts(window_blocks);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in starts {
        let verts = inst.window(s, width);
        let search = WindowSearch::new(inst.graph(), &verts, size_cap)?;
        let mut all = u64::MAX;
        search.run(&mut all, &mut |ws, mask, _| {
            let set = ws.to_set(mask);
            if !seen.contains(&set) {
                if inst.divides_into_two(&set)? {
                    out.push(set.clone());
                }
                seen.insert(set);
            }
            Ok(())
        })?;
    }
    Ok(out)
}

/// Tracks distance to the union of accepted members.
struct Spacing<'g> {
    g: &'g FiniteGraph,
    dist: Vec<usize>,
}

impl<'g> Spacing<'g> {
    fn new(g: &'g FiniteGraph) -> Self {
        Spacing {
            g,
            dist: vec![usize::MAX; g.vertex_count()],
        }
    }

    fn admits(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| self.dist[v] >= MIN_SEPARATION)
    }

    fn accept(&mut self, set: &VertexSet) {
        let d = self.g.bfs_from(set.iter());
        for (slot, x) in self.dist.iter_mut().zip(d) {
            *slot = (*slot).min(x);
        }
    }
}

fn require_candidates(inst: &LineInstance, members: &[VertexSet]) -> Result<()> {
    if members.is_empty() && inst.block_count() > 1 {
        return invalid("no separators found; increase window/cap");
    }
    Ok(())
}

/// Greedy maximal family from a candidate list: a candidate is kept iff it
/// is at distance at least 4 from everything kept before it.
pub fn build_psi(inst: &LineInstance, candidates: &[VertexSet]) -> Result<SeparatorFamily> {
    if candidates.is_empty() && inst.block_count() > 1 {
        return invalid("no separators found; increase window/cap");
    }
    let mut spacing = Spacing::new(inst.graph());
    let mut members = Vec::new();
    for c in candidates {
        if !inst.divides_into_two(c)? {
            return invalid(format!(
                "candidate {:?} does not split the line",
                c.as_slice()
            ));
        }
        if spacing.admits(c) {
            spacing.accept(c);
            members.push(c.clone());
        }
    }
    require_candidates(inst, &members)?;
    Ok(family(inst, members))
}

/// The same family as `build_psi(find_separators(..))`, found without
/// materializing the candidate list: positions too close to an accepted
/// member are pruned from the window search.
pub fn build_psi_greedy(inst: &LineInstance, params: SeparatorParams) -> Result<SeparatorFamily> {
    if params.window_blocks == 0 || params.size_cap == 0 {
        return invalid("window and size cap must be positive");
    }
    let (starts, width) = inst.window_starts(params.window_blocks);
    let mut spacing = Spacing::new(inst.graph());
    let mut members: Vec<VertexSet> = Vec::new();
    for s in starts {
        let verts = inst.window(s, width);
        let search = WindowSearch::new(inst.graph(), &verts, params.size_cap)?;
        let admissible_mask = |sp: &Spacing| {
            verts
                .iter()
                .enumerate()
                .filter(|&(_, &v)| sp.dist[v] >= MIN_SEPARATION)
                .fold(0u64, |m, (j, _)| m | 1 << j)
        };
        let mut admissible = admissible_mask(&spacing);
        search.run(&mut admissible, &mut |ws, mask, adm| {
            let set = ws.to_set(mask);
            if inst.divides_into_two(&set)? {
                spacing.accept(&set);
                members.push(set);
                *adm = admissible_mask(&spacing);
            }
            Ok(())
        })?;
    }
    require_candidates(inst, &members)?;
    Ok(family(inst, members))
}

fn family(inst: &LineInstance, members: Vec<VertexSet>) -> SeparatorFamily {
    let g = inst.graph();
    let n = g.vertex_count();
    let mut owner = vec![usize::MAX; n];
    for (i, m) in members.iter().enumerate() {
        for v in m.iter() {
            owner[v] = i;
        }
    }
    let mut edges = BTreeSet::new();
    for (i, m) in members.iter().enumerate() {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = m.iter().collect();
        for v in m.iter() {
            seen[v] = true;
        }
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                match owner[w] {
                    usize::MAX => stack.push(w),
                    j if j != i => {
                        edges.insert((i.min(j), i.max(j)));
                    }
                    _ => {}
                }
            }
        }
    }
    SeparatorFamily {
        members,
        t_edges: edges.into_iter().collect(),
    }
}

/// Member indices sorted along the line.
fn line_order(inst: &LineInstance, psi: &SeparatorFamily) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..psi.len()).collect();
    idx.sort_by_key(|&i| (inst.start_block(&psi.members[i]), i));
    idx
}

pub fn check_family(inst: &LineInstance, psi: &SeparatorFamily) -> Result<FamilyCheck> {
    let g = inst.graph();
    let mut all_divide = true;
    for m in &psi.members {
        all_divide &= inst.divides_into_two(m)?;
    }
    let mut min_d: Option<usize> = None;
    for i in 0..psi.len() {
        for j in i + 1..psi.len() {
            let d = g
                .set_distance(&psi.members[i], &psi.members[j])?
                .finite()
                .unwrap_or(usize::MAX);
            min_d = Some(min_d.map_or(d, |x| x.min(d)));
        }
    }
    let t_degrees: Vec<usize> = (0..psi.len()).map(|i| psi.t_degree(i)).collect();
    let order = line_order(inst, psi);
    let interior = |i: usize| match inst.mode() {
        Closure::Cycle => true,
        Closure::Segment => order.first() != Some(&i) && order.last() != Some(&i),
    };
    let t_degree_ok = t_degrees
        .iter()
        .enumerate()
        .all(|(i, &d)| d <= 2 && (!interior(i) || d == 2));
    let t_shape_ok = match inst.mode() {
        Closure::Segment => {
            // a forest has |E| = |V| - #components
            let tg = FiniteGraph::from_edges(psi.len(), psi.t_edges.iter().copied())?;
            let comps = tg.components(&tg.all_vertices()).len();
            psi.t_edges.len() + comps == psi.len()
        }
        Closure::Cycle => {
            let tg = FiniteGraph::from_edges(psi.len(), psi.t_edges.iter().copied())?;
            psi.len() >= 3 && tg.is_connected() && tg.regular_degree() == Some(2)
        }
    };
    Ok(FamilyCheck {
        members: psi.len(),
        all_divide,
        min_pairwise_distance: min_d,
        separation_ok: min_d.is_none_or(|d| d >= MIN_SEPARATION),
        t_degrees,
        t_degree_ok,
        t_shape_ok,
    })
}

/// Finiteness of the pieces between separators: every component of the
/// complement of `⋃Ψ` (ignoring, in segment mode, those reaching an end)
/// must span fewer blocks than the largest gap between consecutive members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementReport {
    pub components: usize,
    pub end_components: usize,
    pub max_component_size: usize,
    pub max_component_span: usize,
    pub max_gap: usize,
    pub bounded: bool,
    pub t_degree_ok: bool,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn check_complement(inst: &LineInstance, psi: &SeparatorFamily) -> Result<ComplementReport> {
    let g = inst.graph();
    let union = psi.union();
    let rest: VertexSet = (0..g.vertex_count())
        .filter(|&v| !union.contains(v))
        .collect();
    let comps = g.components(&rest);
    let m = inst.block_count();
    let starts: Vec<usize> = line_order(inst, psi)
        .into_iter()
        .map(|i| inst.start_block(&psi.members[i]))
        .collect();
    let max_gap = match inst.mode() {
        Closure::Cycle => {
            if starts.len() <= 1 {
                m
            } else {
                (0..starts.len())
                    .map(|i| (starts[(i + 1) % starts.len()] + m - starts[i]) % m)
                    .max()
                    .unwrap_or(m)
            }
        }
        Closure::Segment => starts.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0),
    };
    let mut end_components = 0;
    let mut max_size = 0;
    let mut max_span = 0;
    for c in &comps {
        if inst.mode() == Closure::Segment && inst.touches_end(c) {
            end_components += 1;
            continue;
        }
        max_size = max_size.max(c.len());
        max_span = max_span.max(inst.span(c));
    }
    let bounded = max_span < max_gap || (max_span == 0);
    let t_degree_ok =
        check_family(inst, psi)?.t_degree_ok && (inst.mode() == Closure::Segment || psi.len() >= 3);
    let note = (!t_degree_ok).then(|| {
        "separator family is not maximal: some member lacks two T-neighbors, so the complement is not cut into bounded pieces".to_string()
    });
    Ok(ComplementReport {
        components: comps.len(),
        end_components,
        max_component_size: max_size,
        max_component_span: max_span,
        max_gap,
        bounded,
        t_degree_ok,
        ok: bounded && t_degree_ok,
        note,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoEndedColoringResult {
    pub chi: u32,
    pub params: SeparatorParams,
    #[serde(skip)]
    pub coloring: Coloring,
    pub colors_used: usize,
    pub psi: SeparatorFamily,
    pub family_check: FamilyCheck,
    pub complement: ComplementReport,
    pub b_star: VertexSet,
    pub b: VertexSet,
    /// Components of the complement of `B`, colored with the upper colors.
    pub outer_components: usize,
    pub largest_outer_component: usize,
}

/// Colors each component of `g[set]` with `palette` colors, offset by `base`,
/// writing into `out`.
fn color_components(
    g: &FiniteGraph,
    comps: &[VertexSet],
    palette: u32,
    base: Color,
    budget: Budget,
    out: &mut [Color],
) -> Result<()> {
    let solved: Vec<Result<Coloring>> = comps
        .par_iter()
        .map(|c| match find_coloring(&g.induced(c), palette, &[], budget)? {
            SearchOutcome::Found(col) => Ok(col),
            SearchOutcome::NoneExists => Err(Error::InvalidInput(format!(
                "a component of {} vertices is not {palette}-colorable; the supplied chi is too small",
                c.len()
            ))),
            SearchOutcome::Undecided => Err(Error::Undecided(format!(
                "coloring a component of {} vertices",
                c.len()
            ))),
        })
        .collect();
    for (comp, col) in comps.iter().zip(solved) {
        let col = col?;
        for (i, v) in comp.iter().enumerate() {
            out[v] = base + col.color(i);
        }
    }
    Ok(())
}

/// Runs the separator construction end to end. The returned coloring uses
/// colors `0..2χ-1`.
pub fn color_two_ended(
    inst: &LineInstance,
    params: SeparatorParams,
    budget: Budget,
) -> Result<TwoEndedColoringResult> {
    let chi = inst.chi(budget)?;
    let psi = build_psi_greedy(inst, params)?;
    if psi.is_empty() {
        return invalid("no separator family could be built");
    }
    let g = inst.graph();
    let n = g.vertex_count();

    let stars: Vec<VertexSet> = psi
        .members
        .iter()
        .map(|m| g.closed_neighborhood(m))
        .collect();
    let b_star: VertexSet = stars.iter().flat_map(|s| s.iter()).collect();
    let star_comps = g.components(&b_star);
    for comp in &star_comps {
        if !stars.iter().any(|s| comp.is_subset(s)) {
            return Err(Error::Invariant(format!(
                "a component of B* with {} vertices is not inside a single S*",
                comp.len()
            )));
        }
    }

    const UNSET: Color = Color::MAX;
    let mut colors = vec![UNSET; n];
    color_components(g, &star_comps, chi, 0, budget, &mut colors)?;
    let dropped = chi - 1;
    let b: VertexSet = b_star.iter().filter(|&v| colors[v] != dropped).collect();
    for v in b_star.iter() {
        if colors[v] == dropped {
            colors[v] = UNSET;
        }
    }

    let outside: VertexSet = (0..n).filter(|&v| !b.contains(v)).collect();
    let outer = g.components(&outside);
    color_components(g, &outer, chi, chi - 1, budget, &mut colors)?;

    let coloring = Coloring::new(colors, 2 * chi - 1)?;
    if !is_proper(g, &coloring)? {
        return Err(Error::Invariant("separator coloring is not proper".into()));
    }
    let family_check = check_family(inst, &psi)?;
    let complement = check_complement(inst, &psi)?;
    Ok(TwoEndedColoringResult {
        chi,
        params,
        colors_used: coloring.colors_used(),
        coloring,
        family_check,
        complement,
        b_star,
        b,
        outer_components: outer.len(),
        largest_outer_component: outer.iter().map(VertexSet::len).max().unwrap_or(0),
        psi,
    })
}
