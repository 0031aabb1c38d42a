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

//! Finite quotients of `Cay(Δ_k)` and `Cay(Γ_k)` by the right action of
//! `((0,0), M)`.
//!
//! Right multiplication by `((0,0), M)` only moves the shift coordinate, so
//! the quotient is the Cayley window closed into a cycle of `M` orbits. For
//! odd `M` in `Γ_k` this subgroup is not normal, but left and right
//! multiplications commute, so the left-Cayley edges still descend.

use serde::Serialize;

use crate::cayley::{cayley_window, orbit_vertices, vertex_element, vertex_index, Closure};
use crate::chi::{
    chromatic_number, find_coloring, is_proper, Budget, ChiOutcome, Coloring, SearchOutcome,
};
use crate::error::{invalid, Error, Result};
use crate::graph::{families, FiniteGraph};
use crate::grid::{orientation, verify_invariance, GridGraphH, Orientation};
use crate::group::{swap_isomorphism, GroupElement, MarkedGroupSpec};

#[derive(Clone, Debug)]
pub struct QuotientGraph {
    spec: MarkedGroupSpec,
    m: usize,
    graph: FiniteGraph,
}

impl QuotientGraph {
    pub fn spec(&self) -> MarkedGroupSpec {
        self.spec
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    /// Canonical representative of the right coset of `g`.
    pub fn reduce(&self, g: GroupElement) -> GroupElement {
        GroupElement::new(g.a, g.b, g.n.rem_euclid(self.m as i64))
    }
}

pub fn build_quotient(spec: MarkedGroupSpec, m: usize) -> Result<QuotientGraph> {
    if m < 3 {
        return invalid(format!("M must be at least 3, got {m}"));
    }
    let graph = cayley_window(spec, m, Closure::Cycle)?;
    let q = QuotientGraph { spec, m, graph };
    let k = spec.k();
    let t = GroupElement::new(0, 0, m as i64);
    for v in 0..q.graph.vertex_count() {
        let x = vertex_element(k, v);
        for s in spec.generators() {
            let moved = q.reduce(spec.step(s, spec.multiply(x, t)));
            let direct = q.reduce(spec.step(s, x));
            if moved != direct {
                return Err(Error::Invariant(format!(
                    "generator {s:?} does not commute with the right action at {x}"
                )));
            }
            if !q.graph.has_edge(v, vertex_index(k, direct)) {
                return Err(Error::Invariant(format!("missing quotient edge at {x}")));
            }
        }
    }
    if q.graph.regular_degree() != Some(spec.degree()) {
        return Err(Error::Invariant(
            "quotient is not regular of the generator count".into(),
        ));
    }
    Ok(q)
}

pub fn quotient_chi(spec: MarkedGroupSpec, m: usize, budget: Budget) -> Result<ChiOutcome> {
    let q = build_quotient(spec, m)?;
    chromatic_number(&q.graph, None, budget)
}

/// Checks edge by edge that the coordinate swap on odd orbits carries the
/// `Γ_k` quotient onto the `Δ_k` quotient. Only meaningful for even `M`.
pub fn verify_even_isomorphism(k: u32, m: usize) -> Result<bool> {
    if !m.is_multiple_of(2) {
        return invalid(format!(
            "the swap map only descends to quotients with even M, got {m}"
        ));
    }
    let gamma = build_quotient(MarkedGroupSpec::gamma(k)?, m)?;
    let delta = build_quotient(MarkedGroupSpec::delta(k)?, m)?;
    let map: Vec<usize> = (0..gamma.graph.vertex_count())
        .map(|v| vertex_index(k, swap_isomorphism(vertex_element(k, v))))
        .collect();
    let mut hit = vec![false; map.len()];
    for &w in &map {
        if std::mem::replace(&mut hit[w], true) {
            return Ok(false);
        }
    }
    Ok(gamma.graph.edge_count() == delta.graph.edge_count()
        && gamma
            .graph
            .edges()
            .all(|(u, v)| delta.graph.has_edge(map[u], map[v])))
}

/// Orientation of every orbit under a proper `(2k-2)`-coloring.
pub fn orientation_sequence(q: &QuotientGraph, c: &Coloring) -> Result<Vec<Orientation>> {
    let k = q.spec.k();
    if c.len() != q.graph.vertex_count() {
        return invalid("coloring length does not match the quotient");
    }
    if !is_proper(&q.graph, c)? {
        return invalid("coloring is not proper on the quotient");
    }
    let h = GridGraphH::new(k)?;
    (0..q.m)
        .map(|n| {
            orientation(
                &h,
                &Coloring::new(c.as_slice()[orbit_vertices(k, n)].to_vec(), c.palette())?,
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlternationReport {
    pub k: u32,
    pub m: usize,
    pub palette: u32,
    /// Exhaustive search found no proper `(2k-2)`-coloring.
    pub solver_none_exists: bool,
    /// Every proper `(2k-2)`-coloring of two consecutive twisted orbits has
    /// opposite orientations.
    pub consecutive_orbits_opposite: bool,
    pub two_orbit_colorings: u64,
    /// Chromatic number of the `M`-cycle of orbits; a coloring would
    /// 2-color it.
    pub orbit_cycle_chi: u32,
    pub parity_obstruction: bool,
}

impl AlternationReport {
    pub fn verified(&self) -> bool {
        self.solver_none_exists && self.parity_obstruction
    }
}

/// Certifies that the twisted quotient with odd `M` has no proper
/// `(2k-2)`-coloring, once by search and once by the parity of orientations.
pub fn verify_alternation_obstruction(
    k: u32,
    m: usize,
    budget: Budget,
) -> Result<AlternationReport> {
    if m.is_multiple_of(2) {
        return invalid(format!("M must be odd, got {m}"));
    }
    let q = build_quotient(MarkedGroupSpec::gamma(k)?, m)?;
    let palette = 2 * k - 2;
    let solver_none_exists = match find_coloring(&q.graph, palette, &[], budget)? {
        SearchOutcome::NoneExists => true,
        SearchOutcome::Found(_) => false,
        SearchOutcome::Undecided => {
            return Err(Error::Undecided(format!(
                "{palette}-coloring search on the Γ_{k} quotient, M={m}"
            )))
        }
    };
    let inv = verify_invariance(k, true, budget)?;
    if !inv.complete {
        return Err(Error::Undecided("two-orbit orientation enumeration".into()));
    }
    let consecutive_orbits_opposite = inv.verified() && inv.equal == 0;
    let orbit_cycle_chi = chromatic_number(&families::cycle(m), None, budget)?
        .exact()
        .ok_or_else(|| Error::Undecided("chromatic number of the orbit cycle".into()))?;
    Ok(AlternationReport {
        k,
        m,
        palette,
        solver_none_exists,
        consecutive_orbits_opposite,
        two_orbit_colorings: inv.total_colorings,
        orbit_cycle_chi,
        parity_obstruction: consecutive_orbits_opposite && orbit_cycle_chi > 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta3() -> MarkedGroupSpec {
        MarkedGroupSpec::delta(3).unwrap()
    }

    fn gamma3() -> MarkedGroupSpec {
        MarkedGroupSpec::gamma(3).unwrap()
    }

    #[test]
    fn sizes_and_regularity() {
        for spec in [delta3(), gamma3()] {
            for m in [3, 4, 5] {
                let q = build_quotient(spec, m).unwrap();
                assert_eq!(q.graph().vertex_count(), 9 * m);
                assert_eq!(q.graph().regular_degree(), Some(12));
            }
        }
        assert!(build_quotient(delta3(), 2).is_err());
    }

    #[test]
    fn even_isomorphism() {
        assert!(verify_even_isomorphism(3, 4).unwrap());
        assert!(verify_even_isomorphism(3, 6).unwrap());
        assert!(verify_even_isomorphism(3, 3).is_err());
    }

    #[test]
    fn delta_quotient_is_k_chromatic() {
        assert_eq!(
            quotient_chi(delta3(), 3, Budget::unlimited())
                .unwrap()
                .exact(),
            Some(3)
        );
        assert_eq!(
            quotient_chi(delta3(), 4, Budget::unlimited())
                .unwrap()
                .exact(),
            Some(3)
        );
    }

    #[test]
    fn gamma_even_quotient_is_k_chromatic() {
        assert_eq!(
            quotient_chi(gamma3(), 4, Budget::unlimited())
                .unwrap()
                .exact(),
            Some(3)
        );
    }

    #[test]
    fn orientations_constant_in_delta() {
        let q = build_quotient(delta3(), 4).unwrap();
        let SearchOutcome::Found(c) =
            find_coloring(q.graph(), 4, &[], Budget::unlimited()).unwrap()
        else {
            panic!("no 4-coloring");
        };
        let seq = orientation_sequence(&q, &c).unwrap();
        assert!(seq.iter().all(|&o| o == seq[0]));
    }

    #[test]
    fn orientations_alternate_in_gamma() {
        let q = build_quotient(gamma3(), 4).unwrap();
        // force a palette-4 coloring that actually uses 4 colors on orbit 0
        let pins = [(0, 0), (1, 1), (2, 2), (3, 3)];
        let SearchOutcome::Found(c) =
            find_coloring(q.graph(), 4, &pins, Budget::unlimited()).unwrap()
        else {
            panic!("no 4-coloring");
        };
        let seq = orientation_sequence(&q, &c).unwrap();
        for i in 0..4 {
            assert_eq!(seq[(i + 1) % 4], seq[i].flipped());
        }
    }

    #[test]
    fn gamma_odd_quotient_needs_2k_minus_1() {
        let out = quotient_chi(gamma3(), 3, Budget::unlimited()).unwrap();
        assert_eq!(out.exact(), Some(5));
        let q = build_quotient(gamma3(), 3).unwrap();
        assert!(is_proper(q.graph(), out.witness()).unwrap());
    }

    #[test]
    fn alternation_obstruction_m5() {
        assert!(verify_alternation_obstruction(3, 5, Budget::unlimited())
            .unwrap()
            .verified());
    }

    #[test]
    fn alternation_obstruction_m3() {
        let rep = verify_alternation_obstruction(3, 3, Budget::unlimited()).unwrap();
        assert!(rep.verified(), "{rep:?}");
        assert_eq!(rep.orbit_cycle_chi, 3);
        assert!(verify_alternation_obstruction(3, 4, Budget::unlimited()).is_err());
    }
}
