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

//! The grid graph `H` on `Z_k x Z_k` (two cells adjacent iff they differ in
//! both coordinates) and the orientation of its `(2k-2)`-colorings.
//!
//! A *row* fixes the second coordinate `b`; a *column* fixes the first
//! coordinate `a`. An independent set with two or more cells lies in a
//! single row (horizontal) or a single column (vertical). A coloring is
//! horizontal when every row holds a horizontal color set and vertical when
//! every column holds a vertical one; with `2k-2` colors exactly one of the
//! two happens.

use serde::Serialize;

use crate::cayley::{cayley_window, orbit_vertices, Closure};
use crate::chi::{enumerate_colorings, is_proper, Budget, Color, Coloring, EnumerateOptions};
use crate::error::{invalid, Error, Result};
use crate::graph::{FiniteGraph, VertexSet};
use crate::group::MarkedGroupSpec;

/// At most this many offending colorings are copied into a report.
const VIOLATION_SAMPLES: usize = 8;

#[derive(Clone, Debug)]
pub struct GridGraphH {
    k: u32,
    graph: FiniteGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndependentSetClass {
    Singleton,
    Horizontal { row: u32 },
    Vertical { column: u32 },
    NotIndependent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

impl GridGraphH {
    /// Built as the single-orbit window of the direct-product Cayley graph,
    /// so its edges come from the generating set `S x {0}`.
    pub fn new(k: u32) -> Result<Self> {
        let graph = cayley_window(MarkedGroupSpec::delta(k)?, 1, Closure::Segment)?;
        Ok(GridGraphH { k, graph })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn vertex(&self, a: u32, b: u32) -> usize {
        (a * self.k + b) as usize
    }

    pub fn coords(&self, v: usize) -> (u32, u32) {
        (v as u32 / self.k, v as u32 % self.k)
    }

    pub fn row(&self, b: u32) -> VertexSet {
        (0..self.k).map(|a| self.vertex(a, b)).collect()
    }

    pub fn column(&self, a: u32) -> VertexSet {
        (0..self.k).map(|b| self.vertex(a, b)).collect()
    }
}

pub fn classify_independent_set(h: &GridGraphH, set: &VertexSet) -> Result<IndependentSetClass> {
    let Some(first) = set.iter().next() else {
        return invalid("cannot classify the empty set");
    };
    if set
        .as_slice()
        .last()
        .is_some_and(|&v| v >= h.graph.vertex_count())
    {
        return invalid("set is not inside H");
    }
    if !h.graph.is_independent(set) {
        return Ok(IndependentSetClass::NotIndependent);
    }
    if set.len() == 1 {
        return Ok(IndependentSetClass::Singleton);
    }
    let (a0, b0) = h.coords(first);
    if set.iter().all(|v| h.coords(v).1 == b0) {
        Ok(IndependentSetClass::Horizontal { row: b0 })
    } else if set.iter().all(|v| h.coords(v).0 == a0) {
        Ok(IndependentSetClass::Vertical { column: a0 })
    } else {
        Err(Error::Invariant(format!(
            "independent set {:?} lies in neither a row nor a column",
            set.as_slice()
        )))
    }
}

/// Evaluates both orientation predicates on one orbit's colors, given in
/// grid order (`a·k + b`).
pub fn orientation_predicates(k: u32, colors: &[Color]) -> (bool, bool) {
    let k = k as usize;
    let palette = colors.iter().copied().max().map_or(0, |c| c as usize + 1);
    // per color: size, first (a, b), all in one row, all in one column
    let mut size = vec![0usize; palette];
    let mut first = vec![(0usize, 0usize); palette];
    let mut one_row = vec![true; palette];
    let mut one_col = vec![true; palette];
    for (v, &c) in colors.iter().enumerate() {
        let c = c as usize;
        let (a, b) = (v / k, v % k);
        if size[c] == 0 {
            first[c] = (a, b);
        } else {
            one_row[c] &= first[c].1 == b;
            one_col[c] &= first[c].0 == a;
        }
        size[c] += 1;
    }
    let mut row_hit = vec![false; k];
    let mut col_hit = vec![false; k];
    for c in 0..palette {
        if size[c] >= 2 {
            if one_row[c] {
                row_hit[first[c].1] = true;
            }
            if one_col[c] {
                col_hit[first[c].0] = true;
            }
        }
    }
    (row_hit.iter().all(|&x| x), col_hit.iter().all(|&x| x))
}

fn decide(k: u32, colors: &[Color]) -> std::result::Result<Orientation, (bool, bool)> {
    match orientation_predicates(k, colors) {
        (true, false) => Ok(Orientation::Horizontal),
        (false, true) => Ok(Orientation::Vertical),
        other => Err(other),
    }
}

/// Orientation of a proper coloring of `H` with at most `2k-2` colors.
pub fn orientation(h: &GridGraphH, c: &Coloring) -> Result<Orientation> {
    let limit = 2 * h.k - 2;
    if c.palette() > limit {
        return invalid(format!("palette {} exceeds 2k-2 = {limit}", c.palette()));
    }
    if !is_proper(&h.graph, c)? {
        return invalid("coloring is not proper on H");
    }
    decide(h.k, c.as_slice()).map_err(|(hz, vt)| {
        Error::Invariant(format!(
            "orientation predicates horizontal={hz} vertical={vt} on {:?}",
            c.one_based()
        ))
    })
}

/// Two consecutive orbits `(Z_k x Z_k) x {0, 1}` with the edges of the chosen
/// Cayley graph between and within them.
#[derive(Clone, Debug)]
pub struct TwoOrbitGraph {
    k: u32,
    twisted: bool,
    graph: FiniteGraph,
}

impl TwoOrbitGraph {
    pub fn new(k: u32, twisted: bool) -> Result<Self> {
        let graph = cayley_window(MarkedGroupSpec::new(k, twisted)?, 2, Closure::Segment)?;
        Ok(TwoOrbitGraph { k, twisted, graph })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn twisted(&self) -> bool {
        self.twisted
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn orbit<'c>(&self, colors: &'c [Color], n: usize) -> &'c [Color] {
        &colors[orbit_vertices(self.k, n)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DichotomyReport {
    pub k: u32,
    pub palette: u32,
    /// Vertex `(0,0)` pinned to the first color; totals are scaled back.
    pub pinned_first: bool,
    pub colorings: u64,
    pub total_colorings: u64,
    pub horizontal: u64,
    pub vertical: u64,
    pub violation_count: u64,
    pub violations: Vec<Vec<u32>>,
    pub complete: bool,
}

impl DichotomyReport {
    pub fn verified(&self) -> bool {
        self.complete && self.violation_count == 0
    }
}

fn default_pinning(k: u32) -> bool {
    k >= 4
}

fn sample(violations: &mut Vec<Vec<u32>>, colors: &[Color]) {
    if violations.len() < VIOLATION_SAMPLES {
        violations.push(colors.iter().map(|c| c + 1).collect());
    }
}

/// Exhausts every proper `(2k-2)`-coloring of `H` and checks that exactly one
/// orientation predicate holds for each.
pub fn verify_dichotomy(k: u32, budget: Budget) -> Result<DichotomyReport> {
    verify_dichotomy_with(k, 2 * k.max(2) - 2, default_pinning(k), budget)
}

/// Like [`verify_dichotomy`] with an explicit palette (which must equal
/// `2k-2`) and pinning choice.
pub fn verify_dichotomy_with(
    k: u32,
    palette: u32,
    pin_first: bool,
    budget: Budget,
) -> Result<DichotomyReport> {
    let h = GridGraphH::new(k)?;
    if palette != 2 * k - 2 {
        return invalid(format!(
            "the dichotomy concerns palettes of exactly 2k-2 = {} colors, got {palette}",
            2 * k - 2
        ));
    }
    let mut rep = DichotomyReport {
        k,
        palette,
        pinned_first: pin_first,
        colorings: 0,
        total_colorings: 0,
        horizontal: 0,
        vertical: 0,
        violation_count: 0,
        violations: Vec::new(),
        complete: false,
    };
    let opts = EnumerateOptions { pin_first, budget };
    let en = enumerate_colorings(&h.graph, palette, opts, |colors| match decide(k, colors) {
        Ok(Orientation::Horizontal) => rep.horizontal += 1,
        Ok(Orientation::Vertical) => rep.vertical += 1,
        Err(_) => {
            rep.violation_count += 1;
            sample(&mut rep.violations, colors);
        }
    })?;
    rep.colorings = en.count;
    rep.total_colorings = if pin_first {
        en.count * palette as u64
    } else {
        en.count
    };
    rep.complete = en.complete;
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub k: u32,
    pub twisted: bool,
    pub palette: u32,
    pub pinned_first: bool,
    pub colorings: u64,
    pub total_colorings: u64,
    /// Colorings whose two orbits share an orientation.
    pub equal: u64,
    /// Colorings whose two orbits have opposite orientations.
    pub opposite: u64,
    pub violation_count: u64,
    pub violations: Vec<Vec<u32>>,
    pub complete: bool,
}

impl InvarianceReport {
    pub fn verified(&self) -> bool {
        self.complete && self.violation_count == 0
    }
}

/// Exhausts the proper `(2k-2)`-colorings of two neighboring orbits. In the
/// direct product both orbits must share an orientation; in the twisted group
/// they must be opposite.
pub fn verify_invariance(k: u32, twisted: bool, budget: Budget) -> Result<InvarianceReport> {
    verify_invariance_with(k, twisted, default_pinning(k), budget)
}

pub fn verify_invariance_with(
    k: u32,
    twisted: bool,
    pin_first: bool,
    budget: Budget,
) -> Result<InvarianceReport> {
    let two = TwoOrbitGraph::new(k, twisted)?;
    let palette = 2 * k - 2;
    let mut rep = InvarianceReport {
        k,
        twisted,
        palette,
        pinned_first: pin_first,
        colorings: 0,
        total_colorings: 0,
        equal: 0,
        opposite: 0,
        violation_count: 0,
        violations: Vec::new(),
        complete: false,
    };
    let opts = EnumerateOptions { pin_first, budget };
    let en = enumerate_colorings(&two.graph, palette, opts, |colors| {
        let first = decide(k, two.orbit(colors, 0));
        let second = decide(k, two.orbit(colors, 1));
        let ok = match (first, second) {
            (Ok(x), Ok(y)) if x == y => {
                rep.equal += 1;
                !twisted
            }
            (Ok(_), Ok(_)) => {
                rep.opposite += 1;
                twisted
            }
            _ => false,
        };
        if !ok {
            rep.violation_count += 1;
            sample(&mut rep.violations, colors);
        }
    })?;
    rep.colorings = en.count;
    rep.total_colorings = if pin_first {
        en.count * palette as u64
    } else {
        en.count
    };
    rep.complete = en.complete;
    Ok(rep)
}

/// Which coordinate a rigid `k`-coloring reads off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    FirstCoordinate,
    SecondCoordinate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityVerdict {
    Improper,
    /// Up to relabeling, the coloring is this projection on every orbit.
    Rigid(Projection),
    NotRigid,
}

/// Classifies a coloring of a tower of orbits (any number of them, in
/// orbit-major order) against the two coordinate projections.
pub fn projection_of(k: u32, colors: &[Color]) -> Option<Projection> {
    let kk = (k * k) as usize;
    let k = k as usize;
    let reads = |pick: &dyn Fn(usize, usize) -> usize| -> bool {
        let mut by_coord: Vec<Option<Color>> = vec![None; k];
        for (v, &c) in colors.iter().enumerate() {
            let r = v % kk;
            let slot = &mut by_coord[pick(r / k, r % k)];
            match slot {
                Some(prev) if *prev != c => return false,
                _ => *slot = Some(c),
            }
        }
        let mut seen: Vec<Color> = by_coord.into_iter().flatten().collect();
        let len = seen.len();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == len
    };
    if reads(&|a, _| a) {
        Some(Projection::FirstCoordinate)
    } else if reads(&|_, b| b) {
        Some(Projection::SecondCoordinate)
    } else {
        None
    }
}

pub fn rigidity_verdict(two: &TwoOrbitGraph, c: &Coloring) -> Result<RigidityVerdict> {
    if !is_proper(&two.graph, c)? {
        return Ok(RigidityVerdict::Improper);
    }
    Ok(match projection_of(two.k, c.as_slice()) {
        Some(p) => RigidityVerdict::Rigid(p),
        None => RigidityVerdict::NotRigid,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RigidityReport {
    pub k: u32,
    pub palette: u32,
    pub colorings: u64,
    pub first_coordinate: u64,
    pub second_coordinate: u64,
    /// Colorings whose two orbits carry different color patterns.
    pub orbit_pattern_mismatches: u64,
    pub violation_count: u64,
    pub violations: Vec<Vec<u32>>,
    pub complete: bool,
}

impl RigidityReport {
    pub fn verified(&self) -> bool {
        self.complete && self.violation_count == 0 && self.orbit_pattern_mismatches == 0
    }
}

/// Exhausts the proper `k`-colorings of two neighboring orbits of the
/// direct-product graph and checks each is a coordinate projection, the same
/// on both orbits.
pub fn verify_rigidity(k: u32, budget: Budget) -> Result<RigidityReport> {
    let two = TwoOrbitGraph::new(k, false)?;
    let mut rep = RigidityReport {
        k,
        palette: k,
        colorings: 0,
        first_coordinate: 0,
        second_coordinate: 0,
        orbit_pattern_mismatches: 0,
        violation_count: 0,
        violations: Vec::new(),
        complete: false,
    };
    let opts = EnumerateOptions {
        pin_first: false,
        budget,
    };
    let en = enumerate_colorings(&two.graph, k, opts, |colors| {
        if two.orbit(colors, 0) != two.orbit(colors, 1) {
            rep.orbit_pattern_mismatches += 1;
        }
        match projection_of(k, colors) {
            Some(Projection::FirstCoordinate) => rep.first_coordinate += 1,
            Some(Projection::SecondCoordinate) => rep.second_coordinate += 1,
            None => {
                rep.violation_count += 1;
                sample(&mut rep.violations, colors);
            }
        }
    })?;
    rep.colorings = en.count;
    rep.complete = en.complete;
    Ok(rep)
}
