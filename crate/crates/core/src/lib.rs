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

//! Finite, exactly checkable pieces of the coloring theory of two marked
//! groups with isomorphic Cayley graphs: the direct product
//! `Δ_k = (Z_k x Z_k) x Z` and the twisted product `Γ_k = (Z_k x Z_k) ⋊ Z`.
//!
//! * [`group`] and [`cayley`]: group arithmetic and Cayley graph windows.
//! * [`graph`], [`io`]: the graph substrate and its JSON/DIMACS formats.
//! * [`chi`]: exact chromatic numbers, constrained search and enumeration.
//! * [`grid`]: the grid graph `H`, orientations of its colorings, and the
//!   exhaustive dichotomy/propagation/rigidity checks.
//! * [`line`], [`two_ended`]: block-structured two-ended graphs and the
//!   separator-based `(2χ-1)`-coloring.
//! * [`shift`]: the `(k+1)`-coloring of orbit towers via a spare color.
//! * [`quotient`]: cyclic quotients and their chromatic numbers.
//! * [`cli`]: the `gridshift` command line.

pub mod cayley;
pub mod chi;
pub mod cli;
pub mod error;
pub mod graph;
pub mod grid;
pub mod group;
pub mod io;
pub mod line;
pub mod quotient;
pub mod shift;
pub mod two_ended;

pub use error::{Error, Result};
