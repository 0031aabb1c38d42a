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

//! Finite pieces of the Cayley graphs: a window of consecutive
//! `(Z_k x Z_k)`-orbits, either cut off at both ends or closed into a cycle
//! by identifying `x` with `x · ((0,0), m)`.
//!
//! Vertex `((a, b), n)` has index `n·k² + a·k + b` for `0 <= n < m`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{FiniteGraph, Label};
use crate::group::{GroupElement, MarkedGroupSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Closure {
    /// Orbits `0..m`; edges leaving the window are dropped.
    Segment,
    /// Shift coordinates reduced mod `m`.
    Cycle,
}

impl std::str::FromStr for Closure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "segment" => Ok(Closure::Segment),
            "cycle" => Ok(Closure::Cycle),
            other => Err(format!(
                "unknown mode `{other}` (expected segment or cycle)"
            )),
        }
    }
}

pub fn vertex_index(k: u32, g: GroupElement) -> usize {
    let k = k as usize;
    g.n as usize * k * k + g.a as usize * k + g.b as usize
}

pub fn vertex_element(k: u32, v: usize) -> GroupElement {
    let kk = (k * k) as usize;
    let n = v / kk;
    let r = v % kk;
    GroupElement::new((r / k as usize) as u32, (r % k as usize) as u32, n as i64)
}

/// Cayley graph window over `orbits` consecutive orbits.
pub fn cayley_window(
    spec: MarkedGroupSpec,
    orbits: usize,
    closure: Closure,
) -> Result<FiniteGraph> {
    if orbits == 0 {
        return invalid("window needs at least one orbit");
    }
    if closure == Closure::Cycle && orbits < 3 {
        return invalid(format!(
            "cyclic closure needs at least 3 orbits, got {orbits}"
        ));
    }
    let k = spec.k();
    let n = (k * k) as usize * orbits;
    let gens = spec.generators();
    let mut edges = Vec::with_capacity(n * gens.len() / 2);
    for v in 0..n {
        let x = vertex_element(k, v);
        for &s in &gens {
            let mut y = spec.step(s, x);
            match closure {
                Closure::Segment if y.n < 0 || y.n >= orbits as i64 => continue,
                Closure::Segment => {}
                Closure::Cycle => y.n = y.n.rem_euclid(orbits as i64),
            }
            let w = vertex_index(k, y);
            if v < w {
                edges.push((v, w));
            }
        }
    }
    let labels = (0..n).map(|v| Label::Group(vertex_element(k, v))).collect();
    FiniteGraph::from_edges(n, edges)?.with_labels(labels)
}

/// Vertices of orbit `n`, in index order.
pub fn orbit_vertices(k: u32, n: usize) -> std::ops::Range<usize> {
    let kk = (k * k) as usize;
    n * kk..(n + 1) * kk
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexSet;

    #[test]
    fn index_round_trip() {
        for v in 0..27 {
            assert_eq!(vertex_index(3, vertex_element(3, v)), v);
        }
    }

    #[test]
    fn single_orbit_is_grid_graph() {
        let g = cayley_window(MarkedGroupSpec::delta(3).unwrap(), 1, Closure::Segment).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.regular_degree(), Some(4));
    }

    #[test]
    fn cycle_window_is_regular() {
        for twisted in [false, true] {
            let spec = MarkedGroupSpec::new(3, twisted).unwrap();
            let g = cayley_window(spec, 5, Closure::Cycle).unwrap();
            assert_eq!(g.regular_degree(), Some(12));
        }
        let spec = MarkedGroupSpec::delta(3).unwrap();
        assert!(cayley_window(spec, 2, Closure::Cycle).is_err());
    }

    fn assert_translation_preserves_edges(
        spec: MarkedGroupSpec,
        m: i64,
        translate: impl Fn(GroupElement) -> GroupElement,
    ) {
        let g = cayley_window(spec, m as usize, Closure::Cycle).unwrap();
        let map = |v: usize| {
            let mut y = translate(vertex_element(spec.k(), v));
            y.n = y.n.rem_euclid(m);
            vertex_index(spec.k(), y)
        };
        for (u, v) in g.edges() {
            assert!(g.has_edge(map(u), map(v)), "({u},{v}) not preserved");
        }
    }

    #[test]
    fn translations_are_automorphisms() {
        // Edges are x ~ s·x, so x ↦ x·t always preserves them; in the abelian
        // group x ↦ t·x is the same map.
        let d3 = MarkedGroupSpec::delta(3).unwrap();
        let g3 = MarkedGroupSpec::gamma(3).unwrap();
        for t in [
            d3.element(1, 2, 0),
            d3.element(0, 1, 1),
            d3.element(2, 2, 3),
        ] {
            assert_translation_preserves_edges(d3, 5, |x| d3.multiply(t, x));
            // right translation is well defined on the twisted quotient when m is even
            assert_translation_preserves_edges(g3, 4, |x| g3.multiply(x, t));
        }
    }

    #[test]
    fn left_translation_is_not_an_automorphism_of_the_twisted_graph() {
        let g3 = MarkedGroupSpec::gamma(3).unwrap();
        let g = cayley_window(g3, 4, Closure::Cycle).unwrap();
        let t = g3.element(1, 0, 1);
        let map = |v: usize| {
            let mut y = g3.multiply(t, vertex_element(3, v));
            y.n = y.n.rem_euclid(4);
            vertex_index(3, y)
        };
        assert!(g.edges().any(|(u, v)| !g.has_edge(map(u), map(v))));
    }

    #[test]
    fn orbit_ranges() {
        assert_eq!(orbit_vertices(3, 2), 18..27);
        let g = cayley_window(MarkedGroupSpec::gamma(3).unwrap(), 2, Closure::Segment).unwrap();
        let orbit: VertexSet = orbit_vertices(3, 1).collect();
        assert_eq!(g.induced(&orbit).regular_degree(), Some(4));
    }
}
