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

//! The marked groups `(Z_k x Z_k) x Z` (direct product) and
//! `(Z_k x Z_k) ⋊ Z` (the shift acting by the coordinate swap), together with
//! their generating set `S x {-1, 0, 1}` where `S = {(a, b) | 0 < a, b < k}`.
//!
//! Elements are written `((a, b), n)`. The grid part is always reduced mod
//! `k`; the shift part is an unbounded integer. Quotient constructions reduce
//! the shift themselves.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Which of the two marked groups, and at what grid modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkedGroupSpec {
    k: u32,
    twisted: bool,
}

/// `((a, b), n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: u32,
    pub b: u32,
    pub n: i64,
}

/// One generator `((s1, s2), eps)` with `s1, s2 != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub s1: u32,
    pub s2: u32,
    pub eps: i8,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 0, b: 0, n: 0 };

    pub fn new(a: u32, b: u32, n: i64) -> Self {
        GroupElement { a, b, n }
    }

    /// The coordinate swap applied to the grid part.
    pub fn swapped(self) -> Self {
        GroupElement {
            a: self.b,
            b: self.a,
            n: self.n,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{}),{})", self.a, self.b, self.n)
    }
}

impl Generator {
    pub fn as_element(self) -> GroupElement {
        GroupElement::new(self.s1, self.s2, self.eps as i64)
    }
}

impl MarkedGroupSpec {
    pub fn new(k: u32, twisted: bool) -> Result<Self> {
        if k < 3 {
            return invalid(format!("grid modulus k must be at least 3, got {k}"));
        }
        Ok(MarkedGroupSpec { k, twisted })
    }

    /// The direct product `Δ_k`.
    pub fn delta(k: u32) -> Result<Self> {
        Self::new(k, false)
    }

    /// The semidirect product `Γ_k`.
    pub fn gamma(k: u32) -> Result<Self> {
        Self::new(k, true)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn twisted(&self) -> bool {
        self.twisted
    }

    /// Builds an element, reducing the grid coordinates mod `k`.
    pub fn element(&self, a: i64, b: i64, n: i64) -> GroupElement {
        let k = self.k as i64;
        GroupElement::new(a.rem_euclid(k) as u32, b.rem_euclid(k) as u32, n)
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        g.a < self.k && g.b < self.k
    }

    /// Group product `g · h`.
    ///
    /// In the twisted group the grid part of `h` is swapped when the shift of
    /// `g` is odd, because the swap is an involution.
    pub fn multiply(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        let h = if self.twisted && g.n.rem_euclid(2) == 1 {
            h.swapped()
        } else {
            h
        };
        GroupElement {
            a: (g.a + h.a) % self.k,
            b: (g.b + h.b) % self.k,
            n: g.n + h.n,
        }
    }

    pub fn inverse(&self, g: GroupElement) -> GroupElement {
        // (x, n)^{-1} = (-φ^{-n}(x), -n) and φ^{-n} = φ^{n}.
        let g = if self.twisted && g.n.rem_euclid(2) == 1 {
            g.swapped()
        } else {
            g
        };
        GroupElement {
            a: (self.k - g.a) % self.k,
            b: (self.k - g.b) % self.k,
            n: -g.n,
        }
    }

    /// All `3(k-1)^2` generators in a fixed order: `eps` outermost, then
    /// `s1`, then `s2`.
    pub fn generators(&self) -> Vec<Generator> {
        let mut out = Vec::with_capacity(self.degree());
        for eps in [-1i8, 0, 1] {
            for s1 in 1..self.k {
                for s2 in 1..self.k {
                    out.push(Generator { s1, s2, eps });
                }
            }
        }
        out
    }

    /// Degree of the Cayley graph, `3(k-1)^2`.
    pub fn degree(&self) -> usize {
        let r = (self.k - 1) as usize;
        3 * r * r
    }

    /// Left multiplication `s · x`, the edge relation of the Cayley graph.
    pub fn step(&self, s: Generator, x: GroupElement) -> GroupElement {
        self.multiply(s.as_element(), x)
    }
}

/// The map `((a, b), n) ↦ ((a, b), n)` for even `n` and `((b, a), n)` for odd
/// `n`. It carries the twisted Cayley graph onto the direct-product one and
/// is its own inverse.
pub fn swap_isomorphism(g: GroupElement) -> GroupElement {
    if g.n.rem_euclid(2) == 1 {
        g.swapped()
    } else {
        g
    }
}
