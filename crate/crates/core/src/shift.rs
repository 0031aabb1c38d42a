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

//! `(k+1)`-colorings of orbit towers of `Cay(Δ_k)`.
//!
//! Each `Z_k × Z_k` orbit is colored by its column, so a coloring of the
//! whole tower is a sequence of column maps. Anchor orbits get the
//! coordinate coloring shifted by their offset; between two anchors the
//! column map is walked from one to the other one column at a time, always
//! moving a column onto the single color missing from the previous orbit.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{cayley_window, vertex_index, Closure};
use crate::chi::{find_coloring, is_proper, Budget, Color, Coloring, SearchOutcome};
use crate::error::{invalid, Error, Result};
use crate::graph::FiniteGraph;
use crate::group::{GroupElement, MarkedGroupSpec};

/// Column map of one orbit: `colors[a]` is the color of every vertex in
/// column `a`. Colors are `0..=k`, with `k` the spare.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct OrbitColoring(Vec<Color>);

impl OrbitColoring {
    pub fn new(colors: Vec<Color>) -> Result<Self> {
        let k = colors.len() as u32;
        let mut seen = vec![false; k as usize + 1];
        for &c in &colors {
            if c > k {
                return invalid(format!("color {c} outside 0..={k}"));
            }
            if std::mem::replace(&mut seen[c as usize], true) {
                return invalid(format!("color {c} used on two columns"));
            }
        }
        Ok(OrbitColoring(colors))
    }

    pub fn k(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn as_slice(&self) -> &[Color] {
        &self.0
    }

    pub fn color(&self, column: u32) -> Color {
        self.0[column as usize]
    }

    /// The one color of `0..=k` not used by any column.
    pub fn missing(&self) -> Color {
        let k = self.k();
        (0..=k)
            .find(|c| !self.0.contains(c))
            .expect("k columns cannot cover k+1 colors")
    }

    pub fn uses_spare(&self) -> bool {
        self.0.contains(&self.k())
    }

    /// Number of columns on which `self` and `other` differ.
    pub fn distance(&self, other: &OrbitColoring) -> usize {
        self.0.iter().zip(&other.0).filter(|(x, y)| x != y).count()
    }
}

/// Keeps a position iff it is more than `r` away from every position kept
/// before it. Positions are scanned in the given order.
pub fn greedy_maximal_discrete(positions: &[i64], r: u64) -> Result<Vec<i64>> {
    if r == 0 {
        return invalid("r must be at least 1");
    }
    let mut kept: Vec<i64> = Vec::new();
    for &p in positions {
        if kept.iter().all(|&q| p.abs_diff(q) > r) {
            kept.push(p);
        }
    }
    Ok(kept)
}

/// Column `a` gets color `a`; the spare is unused.
pub fn anchor_coloring(k: u32) -> Result<OrbitColoring> {
    if k < 3 {
        return invalid(format!("k must be at least 3, got {k}"));
    }
    OrbitColoring::new((0..k).collect())
}

/// The coordinate coloring seen from an anchor displaced by `a0` columns:
/// column `a` gets `(a - a0) mod k`.
pub fn shifted_anchor_coloring(k: u32, a0: u32) -> Result<OrbitColoring> {
    let base = anchor_coloring(k)?;
    OrbitColoring::new((0..k).map(|a| base.color((a + k - a0 % k) % k)).collect())
}

/// Exchanges two colors wherever they occur.
pub fn swap_colors(c: &OrbitColoring, x: Color, y: Color) -> OrbitColoring {
    OrbitColoring(
        c.0.iter()
            .map(|&z| match z {
                z if z == x => y,
                z if z == y => x,
                z => z,
            })
            .collect(),
    )
}

fn require_spare_free(c: &OrbitColoring, what: &str) -> Result<()> {
    if c.uses_spare() {
        return invalid(format!("{what} uses the spare color"));
    }
    Ok(())
}

/// Orbit colorings leading from `source` to `target`. Consecutive entries
/// (and `source` to the first entry) differ on one column, which moves onto
/// the color missing from its predecessor. The last entry equals `target`.
///
/// While the missing color is wanted by some column, that column takes it.
/// Otherwise the missing color is the spare, and the first wrong column is
/// parked on it. Each column is fixed once and each cycle of the relative
/// permutation costs one park, so the length is below `3k/2 + 1`.
pub fn transfer_schedule(
    k: u32,
    source: &OrbitColoring,
    target: &OrbitColoring,
) -> Result<Vec<OrbitColoring>> {
    if source.k() != k || target.k() != k {
        return invalid(format!("orbit colorings must have {k} columns"));
    }
    require_spare_free(source, "source")?;
    require_spare_free(target, "target")?;
    let mut cur = source.clone();
    let mut out = Vec::new();
    while cur != *target {
        let hole = cur.missing();
        let column = match target.0.iter().position(|&t| t == hole) {
            Some(a) => a,
            None => (0..k as usize).find(|&a| cur.0[a] != target.0[a]).unwrap(),
        };
        cur.0[column] = hole;
        out.push(cur.clone());
    }
    if out.len() > 3 * k as usize {
        return Err(Error::Invariant(format!(
            "schedule of length {} exceeds 3k",
            out.len()
        )));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    pub position: usize,
    /// Grid offset `(a0, b0)` of this anchor relative to the previous one
    /// (the first is relative to the origin).
    pub offset: (u32, u32),
}

/// Anchor file accepted by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorsJson {
    pub extent: usize,
    pub anchors: Vec<Anchor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnchoredTower {
    k: u32,
    anchors: Vec<Anchor>,
    extent: usize,
    mode: Closure,
}

impl AnchoredTower {
    pub fn new(k: u32, anchors: Vec<Anchor>, extent: usize, mode: Closure) -> Result<Self> {
        if k < 3 {
            return invalid(format!("k must be at least 3, got {k}"));
        }
        if anchors.is_empty() {
            return invalid("at least one anchor is required");
        }
        if mode == Closure::Cycle && extent < 3 {
            return invalid("a cyclic tower needs at least 3 orbits");
        }
        let min_gap = 3 * k as usize + 1;
        for w in anchors.windows(2) {
            if w[1].position <= w[0].position {
                return invalid("anchor positions must be strictly increasing");
            }
            if w[1].position - w[0].position < min_gap {
                return invalid(format!(
                    "anchors at {} and {} are closer than {min_gap} orbits",
                    w[0].position, w[1].position
                ));
            }
        }
        let last = anchors.last().unwrap().position;
        if last >= extent {
            return invalid(format!("anchor at {last} lies outside {extent} orbits"));
        }
        if mode == Closure::Cycle {
            let wrap = extent - last + anchors[0].position;
            if wrap < min_gap {
                return invalid(format!(
                    "wrap-around gap {wrap} is closer than {min_gap} orbits"
                ));
            }
        }
        Ok(AnchoredTower {
            k,
            anchors,
            extent,
            mode,
        })
    }

    pub fn from_json(k: u32, doc: AnchorsJson, mode: Closure) -> Result<Self> {
        AnchoredTower::new(k, doc.anchors, doc.extent, mode)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn mode(&self) -> Closure {
        self.mode
    }

    pub fn graph(&self) -> Result<FiniteGraph> {
        cayley_window(MarkedGroupSpec::delta(self.k)?, self.extent, self.mode)
    }

    /// Column offset of every anchor from the origin.
    pub fn accumulated_columns(&self) -> Vec<u32> {
        self.anchors
            .iter()
            .scan(0u32, |acc, a| {
                *acc = (*acc + a.offset.0) % self.k;
                Some(*acc)
            })
            .collect()
    }

    pub fn all_offsets_zero(&self) -> bool {
        self.accumulated_columns().iter().all(|&a| a == 0)
    }

    /// `(from, to, length)` for every gap: anchor indices and orbit distance.
    fn gaps(&self) -> Vec<(usize, usize, usize)> {
        let n = self.anchors.len();
        let mut out: Vec<_> = (0..n.saturating_sub(1))
            .map(|i| {
                (
                    i,
                    i + 1,
                    self.anchors[i + 1].position - self.anchors[i].position,
                )
            })
            .collect();
        if self.mode == Closure::Cycle {
            let wrap = self.extent - self.anchors[n - 1].position + self.anchors[0].position;
            out.push((n - 1, 0, wrap));
        }
        out
    }

    /// Draws a tower: extent, anchor candidates, and offsets are random;
    /// anchors are a greedy maximal `3k`-discrete subset of the candidates.
    pub fn random(k: u32, mode: Closure, zero_offsets: bool, rng: &mut impl Rng) -> Result<Self> {
        let min_gap = 3 * k as usize + 1;
        let extent = rng.gen_range(2 * min_gap..=5 * min_gap);
        let mut candidates: Vec<i64> = (0..extent as i64).filter(|_| rng.gen_bool(0.3)).collect();
        if candidates.is_empty() {
            candidates.push(rng.gen_range(0..extent as i64));
        }
        let mut positions = greedy_maximal_discrete(&candidates, 3 * k as u64)?;
        if mode == Closure::Cycle {
            while positions.len() > 1
                && extent as i64 - positions.last().unwrap() + positions[0] < min_gap as i64
            {
                positions.pop();
            }
        }
        let anchors = positions
            .into_iter()
            .map(|p| Anchor {
                position: p as usize,
                offset: if zero_offsets {
                    (0, 0)
                } else {
                    (rng.gen_range(0..k), rng.gen_range(0..k))
                },
            })
            .collect();
        AnchoredTower::new(k, anchors, extent, mode)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerColoring {
    pub orbits: Vec<OrbitColoring>,
    #[serde(skip)]
    pub coloring: Coloring,
    pub colors_used: usize,
    pub longest_schedule: usize,
    pub proper: bool,
}

fn materialize(k: u32, orbits: &[OrbitColoring]) -> Result<Coloring> {
    let kk = (k * k) as usize;
    let mut colors = vec![0; orbits.len() * kk];
    for (n, orbit) in orbits.iter().enumerate() {
        for a in 0..k {
            for b in 0..k {
                let v = vertex_index(k, GroupElement::new(a, b, n as i64));
                colors[v] = orbit.color(a);
            }
        }
    }
    Coloring::new(colors, k + 1)
}

/// Colors the whole tower with at most `k + 1` colors and checks the result
/// edge by edge.
pub fn color_tower(tower: &AnchoredTower) -> Result<TowerColoring> {
    let k = tower.k;
    let m = tower.extent;
    let anchor_colorings = tower
        .accumulated_columns()
        .into_iter()
        .map(|a0| shifted_anchor_coloring(k, a0))
        .collect::<Result<Vec<_>>>()?;

    let fills = tower
        .gaps()
        .par_iter()
        .map(|&(i, j, len)| {
            let sched = transfer_schedule(k, &anchor_colorings[i], &anchor_colorings[j])?;
            if sched.len() >= len {
                return Err(Error::Invariant(format!(
                    "schedule of length {} does not fit a gap of {len}",
                    sched.len()
                )));
            }
            Ok((i, len, sched))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut orbits: Vec<Option<OrbitColoring>> = vec![None; m];
    for (anchor, c) in tower.anchors.iter().zip(&anchor_colorings) {
        orbits[anchor.position] = Some(c.clone());
    }
    let mut longest = 0;
    for (i, len, sched) in fills {
        longest = longest.max(sched.len());
        let start = tower.anchors[i].position;
        let target = &anchor_colorings[(i + 1) % anchor_colorings.len()];
        for step in 1..len {
            let c = sched.get(step - 1).unwrap_or(target);
            orbits[(start + step) % m] = Some(c.clone());
        }
    }
    // segment ends copy the nearest anchor
    let first = tower.anchors[0].position;
    let last = tower.anchors.last().unwrap().position;
    for slot in &mut orbits[..first] {
        *slot = Some(anchor_colorings[0].clone());
    }
    for slot in &mut orbits[last + 1..] {
        slot.get_or_insert_with(|| anchor_colorings.last().unwrap().clone());
    }
    let orbits: Vec<OrbitColoring> = orbits
        .into_iter()
        .map(|o| o.ok_or_else(|| Error::Invariant("orbit left uncolored".into())))
        .collect::<Result<_>>()?;

    let coloring = materialize(k, &orbits)?;
    let proper = is_proper(&tower.graph()?, &coloring)?;
    if !proper {
        return Err(Error::Invariant("tower coloring is not proper".into()));
    }
    Ok(TowerColoring {
        colors_used: coloring.colors_used(),
        coloring,
        orbits,
        longest_schedule: longest,
        proper,
    })
}

/// Whether `k` colors cannot bridge a single gap: both anchor orbits are
/// pinned to their coordinate colorings and the orbits between them are
/// searched exhaustively.
pub fn witness_k_insufficient(tower: &AnchoredTower, budget: Budget) -> Result<bool> {
    let [first, second] = tower.anchors() else {
        return invalid("a single gap needs exactly two anchors");
    };
    let k = tower.k;
    let gap = second.position - first.position;
    let g = cayley_window(MarkedGroupSpec::delta(k)?, gap + 1, Closure::Segment)?;
    let cols = tower.accumulated_columns();
    let mut pins = Vec::new();
    for (n, a0) in [(0usize, cols[0]), (gap, cols[1])] {
        let c = shifted_anchor_coloring(k, a0)?;
        for a in 0..k {
            for b in 0..k {
                pins.push((
                    vertex_index(k, GroupElement::new(a, b, n as i64)),
                    c.color(a),
                ));
            }
        }
    }
    match find_coloring(&g, k, &pins, budget)? {
        SearchOutcome::Found(_) => Ok(false),
        SearchOutcome::NoneExists => Ok(true),
        SearchOutcome::Undecided => Err(Error::Undecided("pinned gap search".into())),
    }
}
