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

//! Exact coloring search.
//!
//! Two engines share one incremental state (per-vertex neighbor color counts
//! and saturation masks):
//!
//! * a DSATUR branch-and-bound decision procedure ("is there a proper
//!   `p`-coloring extending these pins?") with symmetry breaking on colors
//!   that have not been used yet, and
//! * a lexicographic enumerator that visits every proper coloring in vertex
//!   order, used by the grid verifiers.
//!
//! Palettes are capped at 64 colors so saturation fits in a `u64`. Colors are
//! 0-based everywhere in the API; [`Coloring::one_based`] renders them for
//! reports.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::FiniteGraph;

pub type Color = u32;

pub const MAX_PALETTE: u32 = 64;

const NONE: Color = Color::MAX;

/// A total assignment of colors `0..palette` to vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    palette: u32,
    assignment: Vec<Color>,
}

impl Coloring {
    pub fn new(assignment: Vec<Color>, palette: u32) -> Result<Self> {
        if let Some(&c) = assignment.iter().find(|&&c| c >= palette) {
            return invalid(format!("color {c} outside palette of size {palette}"));
        }
        Ok(Coloring {
            palette,
            assignment,
        })
    }

    pub fn palette(&self) -> u32 {
        self.palette
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn color(&self, v: usize) -> Color {
        self.assignment[v]
    }

    pub fn as_slice(&self) -> &[Color] {
        &self.assignment
    }

    /// Number of distinct colors actually used.
    pub fn colors_used(&self) -> usize {
        let mut seen = vec![false; self.palette as usize];
        for &c in &self.assignment {
            seen[c as usize] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }

    pub fn one_based(&self) -> Vec<u32> {
        self.assignment.iter().map(|c| c + 1).collect()
    }

    /// Relabels colors through `map` (indexed by old color).
    pub fn recolored(&self, map: &[Color], palette: u32) -> Result<Coloring> {
        Coloring::new(
            self.assignment.iter().map(|&c| map[c as usize]).collect(),
            palette,
        )
    }
}

/// `true` iff no edge is monochromatic.
pub fn is_proper(g: &FiniteGraph, c: &Coloring) -> Result<bool> {
    if c.len() != g.vertex_count() {
        return invalid(format!(
            "coloring covers {} of {} vertices",
            c.len(),
            g.vertex_count()
        ));
    }
    Ok(g.edges().all(|(u, v)| c.color(u) != c.color(v)))
}

/// Resource limit for a search. Exhausting it yields an explicit
/// "undecided" verdict, never a guessed answer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

pub const BUDGET_ENV: &str = "GRIDSHIFT_BUDGET_MS";

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn millis(ms: u64) -> Self {
        Budget {
            max_nodes: None,
            time_limit: Some(Duration::from_millis(ms)),
        }
    }

    pub fn nodes(n: u64) -> Self {
        Budget {
            max_nodes: Some(n),
            time_limit: None,
        }
    }

    /// Reads the default time budget in milliseconds from
    /// `GRIDSHIFT_BUDGET_MS`; unlimited when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(Budget::millis)
            .unwrap_or_default()
    }

    fn meter(self) -> Meter {
        Meter {
            deadline: self.time_limit.map(|d| Instant::now() + d),
            max_nodes: self.max_nodes,
            nodes: 0,
        }
    }
}

struct Meter {
    deadline: Option<Instant>,
    max_nodes: Option<u64>,
    nodes: u64,
}

impl Meter {
    /// Counts one search node; `false` once the budget is spent.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.max_nodes.is_some_and(|m| self.nodes > m) {
            return false;
        }
        if self.nodes % 1024 == 1 {
            if let Some(d) = self.deadline {
                return Instant::now() < d;
            }
        }
        true
    }
}

struct Exhausted;

/// Result of a decision search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Coloring),
    NoneExists,
    Undecided,
}

impl SearchOutcome {
    pub fn coloring(&self) -> Option<&Coloring> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

/// Result of a chromatic-number computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChiOutcome {
    /// `chi` is proven: `witness` uses `chi` colors and every smaller palette
    /// was refuted exhaustively.
    Exact { chi: u32, witness: Coloring },
    /// The budget ran out; `lower <= chi <= upper` is still proven.
    Bounded {
        lower: u32,
        upper: u32,
        witness: Coloring,
    },
}

impl ChiOutcome {
    pub fn exact(&self) -> Option<u32> {
        match self {
            ChiOutcome::Exact { chi, .. } => Some(*chi),
            ChiOutcome::Bounded { .. } => None,
        }
    }

    pub fn witness(&self) -> &Coloring {
        match self {
            ChiOutcome::Exact { witness, .. } | ChiOutcome::Bounded { witness, .. } => witness,
        }
    }

    pub fn bounds(&self) -> (u32, u32) {
        match self {
            ChiOutcome::Exact { chi, .. } => (*chi, *chi),
            ChiOutcome::Bounded { lower, upper, .. } => (*lower, *upper),
        }
    }
}

/// Incremental coloring state shared by both engines.
struct State<'g> {
    g: &'g FiniteGraph,
    palette: usize,
    full: u64,
    color: Vec<Color>,
    counts: Vec<u16>,
    sat: Vec<u64>,
    free_degree: Vec<u32>,
    used: Vec<u32>,
    uncolored: usize,
}

impl<'g> State<'g> {
    fn new(g: &'g FiniteGraph, palette: u32) -> Self {
        let n = g.vertex_count();
        let p = palette as usize;
        State {
            g,
            palette: p,
            full: if p == 64 { u64::MAX } else { (1u64 << p) - 1 },
            color: vec![NONE; n],
            counts: vec![0; n * p],
            sat: vec![0; n],
            free_degree: (0..n).map(|v| g.degree(v) as u32).collect(),
            used: vec![0; p],
            uncolored: n,
        }
    }

    /// Colors `v` with `c`; returns `false` if some uncolored vertex is left
    /// with no available color. Always undo with [`State::unassign`].
    fn assign(&mut self, v: usize, c: Color) -> bool {
        let p = self.palette;
        self.color[v] = c;
        self.used[c as usize] += 1;
        self.uncolored -= 1;
        let mut alive = true;
        for &u in self.g.neighbors(v) {
            self.free_degree[u] -= 1;
            let slot = &mut self.counts[u * p + c as usize];
            *slot += 1;
            if *slot == 1 {
                self.sat[u] |= 1 << c;
                if self.color[u] == NONE && self.sat[u] == self.full {
                    alive = false;
                }
            }
        }
        alive
    }

    fn unassign(&mut self, v: usize) {
        let p = self.palette;
        let c = self.color[v];
        self.color[v] = NONE;
        self.used[c as usize] -= 1;
        self.uncolored += 1;
        for &u in self.g.neighbors(v) {
            self.free_degree[u] += 1;
            let slot = &mut self.counts[u * p + c as usize];
            *slot -= 1;
            if *slot == 0 {
                self.sat[u] &= !(1 << c);
            }
        }
    }

    /// DSATUR choice: most saturated, then most uncolored neighbors, then
    /// smallest index.
    fn select(&self) -> usize {
        let mut best = usize::MAX;
        let mut key = (0u32, 0u32);
        for v in 0..self.color.len() {
            if self.color[v] != NONE {
                continue;
            }
            let k = (self.sat[v].count_ones(), self.free_degree[v]);
            if best == usize::MAX || k > key {
                best = v;
                key = k;
            }
        }
        best
    }

    fn dsatur(&mut self, meter: &mut Meter) -> std::result::Result<bool, Exhausted> {
        if self.uncolored == 0 {
            return Ok(true);
        }
        if !meter.tick() {
            return Err(Exhausted);
        }
        let v = self.select();
        let mut tried_fresh = false;
        for c in 0..self.palette as Color {
            if self.sat[v] & (1 << c) != 0 {
                continue;
            }
            // Colors nobody uses yet are interchangeable; one is enough.
            if self.used[c as usize] == 0 {
                if tried_fresh {
                    continue;
                }
                tried_fresh = true;
            }
            let alive = self.assign(v, c);
            if alive && self.dsatur(meter)? {
                return Ok(true);
            }
            self.unassign(v);
        }
        Ok(false)
    }

    fn enumerate(
        &mut self,
        v: usize,
        pin_first: bool,
        meter: &mut Meter,
        visit: &mut dyn FnMut(&[Color]),
        count: &mut u64,
    ) -> std::result::Result<(), Exhausted> {
        if v == self.color.len() {
            *count += 1;
            visit(&self.color);
            return Ok(());
        }
        if !meter.tick() {
            return Err(Exhausted);
        }
        let top = if pin_first && v == 0 {
            1
        } else {
            self.palette as Color
        };
        for c in 0..top {
            if self.sat[v] & (1 << c) != 0 {
                continue;
            }
            let alive = self.assign(v, c);
            let res = if alive {
                self.enumerate(v + 1, pin_first, meter, visit, count)
            } else {
                Ok(())
            };
            self.unassign(v);
            res?;
        }
        Ok(())
    }

    fn snapshot(&self) -> Coloring {
        Coloring {
            palette: self.palette as u32,
            assignment: self.color.clone(),
        }
    }
}

fn check_palette(palette: u32) -> Result<()> {
    if palette == 0 || palette > MAX_PALETTE {
        return invalid(format!(
            "palette must be in 1..={MAX_PALETTE}, got {palette}"
        ));
    }
    Ok(())
}

/// Searches for a proper coloring from `0..palette` that agrees with every
/// `(vertex, color)` pin in `constraints`.
pub fn find_coloring(
    g: &FiniteGraph,
    palette: u32,
    constraints: &[(usize, Color)],
    budget: Budget,
) -> Result<SearchOutcome> {
    check_palette(palette)?;
    let n = g.vertex_count();
    let mut state = State::new(g, palette);
    for &(v, c) in constraints {
        if v >= n {
            return invalid(format!("pinned vertex {v} out of range"));
        }
        if c >= palette {
            return invalid(format!("pinned color {c} outside palette {palette}"));
        }
        if state.color[v] != NONE {
            if state.color[v] != c {
                return invalid(format!("vertex {v} pinned twice"));
            }
            continue;
        }
        if state.sat[v] & (1 << c) != 0 {
            return Ok(SearchOutcome::NoneExists);
        }
        if !state.assign(v, c) {
            return Ok(SearchOutcome::NoneExists);
        }
    }
    if n == 0 {
        return Ok(SearchOutcome::Found(state.snapshot()));
    }
    let mut meter = budget.meter();
    match state.dsatur(&mut meter) {
        Ok(true) => Ok(SearchOutcome::Found(state.snapshot())),
        Ok(false) => Ok(SearchOutcome::NoneExists),
        Err(Exhausted) => Ok(SearchOutcome::Undecided),
    }
}

/// Options for [`enumerate_colorings`].
#[derive(Clone, Copy, Debug, Default)]
pub struct EnumerateOptions {
    /// Only colorings with vertex 0 colored 0. Exactly `1/palette` of all
    /// proper colorings, so counts scale back by `palette`.
    pub pin_first: bool,
    pub budget: Budget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub count: u64,
    pub complete: bool,
}

/// Visits every proper coloring with colors from `0..palette`, in
/// lexicographic order of the assignment vector. Delivery is sequential.
pub fn enumerate_colorings(
    g: &FiniteGraph,
    palette: u32,
    options: EnumerateOptions,
    mut visit: impl FnMut(&[Color]),
) -> Result<Enumeration> {
    check_palette(palette)?;
    let mut state = State::new(g, palette);
    let mut meter = options.budget.meter();
    let mut count = 0;
    let complete = state
        .enumerate(0, options.pin_first, &mut meter, &mut visit, &mut count)
        .is_ok();
    Ok(Enumeration { count, complete })
}

/// Counts proper colorings without a visitor.
pub fn count_colorings(
    g: &FiniteGraph,
    palette: u32,
    options: EnumerateOptions,
) -> Result<Enumeration> {
    enumerate_colorings(g, palette, options, |_| {})
}

/// Size of a greedily grown clique; a lower bound on the chromatic number.
pub fn greedy_clique(g: &FiniteGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut best: Vec<usize> = Vec::new();
    for &seed in &order {
        if g.degree(seed) < best.len() {
            continue;
        }
        let mut clique = vec![seed];
        let mut cands: Vec<usize> = g.neighbors(seed).to_vec();
        cands.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        for v in cands {
            if clique.iter().all(|&u| g.has_edge(u, v)) {
                clique.push(v);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Plain DSATUR without backtracking.
pub fn greedy_coloring(g: &FiniteGraph) -> Coloring {
    let n = g.vertex_count();
    let mut color = vec![NONE; n];
    let mut neighbor_colors: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut sat = vec![0u32; n];
    let mut max_color = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v] == NONE)
            .max_by_key(|&v| (sat[v], g.degree(v), std::cmp::Reverse(v)))
            .expect("uncolored vertex");
        let c = (0..)
            .find(|&c| !neighbor_colors[v].get(c).copied().unwrap_or(false))
            .unwrap();
        color[v] = c as Color;
        max_color = max_color.max(c + 1);
        for &u in g.neighbors(v) {
            let nc = &mut neighbor_colors[u];
            if nc.len() <= c {
                nc.resize(c + 1, false);
            }
            if !nc[c] {
                nc[c] = true;
                sat[u] += 1;
            }
        }
    }
    Coloring {
        palette: max_color as u32,
        assignment: color,
    }
}

/// Exact chromatic number by refuting palettes upward from a clique bound.
///
/// `upper_hint`, when smaller than the greedy bound, is tried first to
/// tighten the upper bound; the returned value does not depend on it.
pub fn chromatic_number(
    g: &FiniteGraph,
    upper_hint: Option<u32>,
    budget: Budget,
) -> Result<ChiOutcome> {
    if g.vertex_count() == 0 {
        return invalid("chromatic number of the empty graph is not defined here");
    }
    let mut witness = greedy_coloring(g);
    let mut upper = witness.colors_used() as u32;
    let mut lower = greedy_clique(g).len() as u32;
    let deadline = budget.time_limit.map(|d| Instant::now() + d);
    let remaining = |b: Budget| Budget {
        max_nodes: b.max_nodes,
        time_limit: deadline.map(|d| d.saturating_duration_since(Instant::now())),
    };
    if let Some(h) = upper_hint.filter(|&h| h >= lower && h < upper) {
        if let SearchOutcome::Found(c) = find_coloring(g, h, &[], remaining(budget))? {
            upper = h;
            witness = c;
        }
    }
    while lower < upper {
        match find_coloring(g, lower, &[], remaining(budget))? {
            SearchOutcome::Found(c) => {
                upper = lower;
                witness = c;
            }
            SearchOutcome::NoneExists => lower += 1,
            SearchOutcome::Undecided => {
                return Ok(ChiOutcome::Bounded {
                    lower,
                    upper,
                    witness: Coloring::new(witness.assignment, upper)?,
                })
            }
        }
    }
    Ok(ChiOutcome::Exact {
        chi: upper,
        witness: Coloring::new(witness.assignment, upper)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    fn grid_h3() -> FiniteGraph {
        let idx = |a: usize, b: usize| a * 3 + b;
        let mut e = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for a2 in 0..3 {
                    for b2 in 0..3 {
                        if a != a2 && b != b2 && idx(a, b) < idx(a2, b2) {
                            e.push((idx(a, b), idx(a2, b2)));
                        }
                    }
                }
            }
        }
        FiniteGraph::from_edges(9, e).unwrap()
    }

    #[test]
    fn is_proper_examples() {
        let k4 = complete(4);
        let inj = Coloring::new(vec![0, 1, 2, 3], 4).unwrap();
        assert!(is_proper(&k4, &inj).unwrap());
        let edge = path(2);
        assert!(!is_proper(&edge, &Coloring::new(vec![0, 0], 1).unwrap()).unwrap());
        let h = grid_h3();
        let by_a = Coloring::new((0..9).map(|v| v / 3).collect(), 3).unwrap();
        assert!(is_proper(&h, &by_a).unwrap());
        assert!(is_proper(&h, &Coloring::new(vec![0; 4], 1).unwrap()).is_err());
    }

    #[test]
    fn chromatic_number_examples() {
        let b = Budget::unlimited();
        assert_eq!(
            chromatic_number(&cycle(9), None, b).unwrap().exact(),
            Some(3)
        );
        assert_eq!(
            chromatic_number(&complete(4), None, b).unwrap().exact(),
            Some(4)
        );
        assert_eq!(
            chromatic_number(&grid_h3(), None, b).unwrap().exact(),
            Some(3)
        );
        assert_eq!(
            chromatic_number(&petersen(), Some(3), b).unwrap().exact(),
            Some(3)
        );
        assert!(chromatic_number(&FiniteGraph::from_edges(0, []).unwrap(), None, b).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let o = EnumerateOptions::default();
        assert_eq!(count_colorings(&path(1), 2, o).unwrap().count, 2);
        assert_eq!(count_colorings(&path(2), 2, o).unwrap().count, 2);
        assert_eq!(count_colorings(&complete(3), 3, o).unwrap().count, 6);
    }

    #[test]
    fn enumeration_order_is_lexicographic() {
        let mut seen: Vec<Vec<Color>> = Vec::new();
        enumerate_colorings(&path(3), 3, EnumerateOptions::default(), |c| {
            seen.push(c.to_vec())
        })
        .unwrap();
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn pin_first_divides_by_palette() {
        let h = grid_h3();
        let all = count_colorings(&h, 4, EnumerateOptions::default()).unwrap();
        let pinned = count_colorings(
            &h,
            4,
            EnumerateOptions {
                pin_first: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(pinned.count * 4, all.count);
    }

    #[test]
    fn find_coloring_examples() {
        let b = Budget::unlimited();
        let p3 = path(3);
        let out = find_coloring(&p3, 2, &[(0, 1), (2, 1)], b).unwrap();
        let c = out.coloring().expect("coloring exists");
        assert_eq!((c.color(0), c.color(2)), (1, 1));
        assert!(is_proper(&p3, c).unwrap());
        assert_eq!(
            find_coloring(&path(2), 2, &[(0, 0), (1, 0)], b).unwrap(),
            SearchOutcome::NoneExists
        );
        assert_eq!(
            find_coloring(&grid_h3(), 2, &[], b).unwrap(),
            SearchOutcome::NoneExists
        );
        assert!(find_coloring(&p3, 2, &[(0, 2)], b).is_err());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let out = find_coloring(&complete(12), 11, &[], Budget::nodes(3)).unwrap();
        assert_eq!(out, SearchOutcome::Undecided);
        let chi = chromatic_number(&cycle(11), None, Budget::nodes(0)).unwrap();
        let (lo, hi) = chi.bounds();
        assert!(lo <= 3 && 3 <= hi);
        let e = count_colorings(
            &complete(5),
            5,
            EnumerateOptions {
                pin_first: false,
                budget: Budget::nodes(5),
            },
        )
        .unwrap();
        assert!(!e.complete);
    }
}
