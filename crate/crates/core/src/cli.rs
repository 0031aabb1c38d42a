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

//! The `gridshift` command line.
//!
//! Every subcommand produces a [`RunReport`]. Text mode prints a headline
//! and the result fields; `--json` prints the report itself. Exit codes:
//! 0 verified, 1 a property failed or a required object does not exist,
//! 2 bad input, 3 undecided within the budget.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cayley::{cayley_window, Closure};
use crate::chi::{chromatic_number, Budget, ChiOutcome, BUDGET_ENV};
use crate::error::{Error, Result};
use crate::graph::FiniteGraph;
use crate::grid::{verify_dichotomy_with, verify_invariance, verify_rigidity, GridGraphH};
use crate::group::MarkedGroupSpec;
use crate::io;
use crate::line::LineInstance;
use crate::quotient::{build_quotient, verify_alternation_obstruction, verify_even_isomorphism};
use crate::shift::{color_tower, AnchoredTower, AnchorsJson};
use crate::two_ended::{color_two_ended, SeparatorParams};

#[derive(Debug, Parser)]
#[command(
    name = "gridshift",
    version,
    about = "Colorings of Cayley graphs of marked groups"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Print the full run report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the run report as JSON to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Search budget in milliseconds (unlimited when absent).
    #[arg(long, global = true, env = BUDGET_ENV, value_name = "MS")]
    pub budget_ms: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for witness files; without it witnesses are inlined.
    #[arg(long, global = true, value_name = "DIR")]
    pub artifacts: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupArg {
    Delta,
    Gamma,
}

impl GroupArg {
    fn spec(self, k: u32) -> Result<MarkedGroupSpec> {
        MarkedGroupSpec::new(k, self == GroupArg::Gamma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Segment,
    Cycle,
}

impl From<ModeArg> for Closure {
    fn from(m: ModeArg) -> Closure {
        match m {
            ModeArg::Segment => Closure::Segment,
            ModeArg::Cycle => Closure::Cycle,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Dimacs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuiltinArg {
    /// A path or cycle, one vertex per block.
    Path,
    /// A ladder, one rung per block.
    Ladder,
    /// Orbits of `Cay(Δ_k)`.
    Delta,
    /// Orbits of `Cay(Γ_k)`.
    Gamma,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a window of a Cayley graph.
    Cayley {
        #[arg(long, value_enum, default_value = "delta")]
        group: GroupArg,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 3)]
        orbits: usize,
        #[arg(long, value_enum, default_value = "segment")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Exact chromatic number of a JSON or DIMACS graph.
    Chi {
        graph: PathBuf,
        /// Include a witness coloring (1-based colors).
        #[arg(long)]
        witness: bool,
    },
    /// Every proper (2k-2)-coloring of H is horizontal or vertical.
    VerifyDichotomy {
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Must be 2k-2; anything else is refused.
        #[arg(long)]
        palette: Option<u32>,
        /// Pin vertex (0,0) to the first color (default: on for k >= 4).
        #[arg(long)]
        pin_first: Option<bool>,
    },
    /// Orientations of neighboring orbits agree (direct) or flip (twisted).
    VerifyInvariance {
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
        twisted: bool,
    },
    /// Proper k-colorings of two direct-product orbits are coordinate projections.
    VerifyRigidity {
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
    /// Separator-based (2χ-1)-coloring of a two-ended instance.
    TwoEndedColor {
        /// Line instance JSON file.
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        instance: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<BuiltinArg>,
        /// Block count of a builtin instance.
        #[arg(long, default_value_t = 12)]
        blocks: usize,
        /// k of a builtin Cayley instance.
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Window width in blocks.
        #[arg(long)]
        window: Option<usize>,
        /// Largest separator size tried.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Chromatic number to assume instead of computing it.
        #[arg(long)]
        chi: Option<u32>,
    },
    /// (k+1)-coloring of an anchored orbit tower of Cay(Δ_k).
    ShiftColor {
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long)]
        anchors: PathBuf,
        #[arg(long, value_enum, default_value = "segment")]
        mode: ModeArg,
    },
    /// Chromatic number of a cyclic quotient.
    QuotientChi {
        #[arg(long, value_enum)]
        group: GroupArg,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long = "M", value_name = "M")]
        m: usize,
        #[arg(long, value_enum)]
        export: Option<FormatArg>,
    },
    /// No (2k-2)-coloring of the twisted quotient for odd M, certified twice.
    VerifyAlternation {
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long = "M", value_name = "M")]
        m: usize,
    },
    /// The table of chromatic values for one k.
    Report {
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Violation,
    Undecided,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Violation => 1,
            Outcome::Undecided => 3,
        }
    }

    fn from_verdict(verified: bool, complete: bool) -> Self {
        match (verified, complete) {
            (true, _) => Outcome::Ok,
            (false, false) => Outcome::Undecided,
            (false, true) => Outcome::Violation,
        }
    }

    fn worst(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::Violation, _) | (_, Outcome::Violation) => Outcome::Violation,
            (Outcome::Undecided, _) | (_, Outcome::Undecided) => Outcome::Undecided,
            _ => Outcome::Ok,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub parameters: Value,
    pub outcome: Outcome,
    pub headline: String,
    pub results: Value,
    pub artifacts: Vec<String>,
    pub elapsed_ms: u64,
    /// Printed verbatim instead of the summary in text mode.
    #[serde(skip)]
    pub raw_output: Option<String>,
}

/// Collects witness files, or inlines them when no directory was given.
struct Artifacts {
    dir: Option<PathBuf>,
    written: Vec<String>,
}

impl Artifacts {
    fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Artifacts {
            dir,
            written: Vec::new(),
        })
    }

    /// Writes `text` to `name`; returns `None` when written, `Some(inline)`
    /// otherwise.
    fn emit_text(&mut self, name: &str, text: String) -> Result<Option<String>> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                fs::write(&path, text)?;
                self.written.push(path.display().to_string());
                Ok(None)
            }
            None => Ok(Some(text)),
        }
    }

    fn emit_json(
        &mut self,
        name: &str,
        value: Value,
        results: &mut Map<String, Value>,
        key: &str,
    ) -> Result<()> {
        let text = serde_json::to_string_pretty(&value)?;
        if self.emit_text(name, text)?.is_some() {
            results.insert(key.to_string(), value);
        }
        Ok(())
    }
}

struct Ctx {
    budget: Budget,
    seed: u64,
    artifacts: Artifacts,
    raw_output: Option<String>,
}

struct Partial {
    parameters: Value,
    outcome: Outcome,
    headline: String,
    results: Value,
}

fn chi_json(out: &ChiOutcome) -> Value {
    let (lower, upper) = out.bounds();
    json!({ "chi": out.exact(), "lower": lower, "upper": upper, "exact": out.exact().is_some() })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn graph_text(g: &FiniteGraph, format: FormatArg) -> String {
    match format {
        FormatArg::Json => io::to_json(g),
        FormatArg::Dimacs => io::to_dimacs(g),
    }
}

fn extension(format: FormatArg) -> &'static str {
    match format {
        FormatArg::Json => "json",
        FormatArg::Dimacs => "col",
    }
}

fn as_object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => Map::from_iter([("value".to_string(), other)]),
    }
}

fn run_command(cmd: &Command, ctx: &mut Ctx) -> Result<Partial> {
    let budget = ctx.budget;
    match *cmd {
        Command::Cayley {
            group,
            k,
            orbits,
            mode,
            format,
        } => {
            let spec = group.spec(k)?;
            let g = cayley_window(spec, orbits, mode.into())?;
            let name = format!(
                "cayley-{}-k{k}-n{orbits}.{}",
                group_name(group),
                extension(format)
            );
            let mut results = as_object(json!({
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "degree": g.max_degree(),
            }));
            if let Some(text) = ctx.artifacts.emit_text(&name, graph_text(&g, format))? {
                results.insert("graph".into(), Value::String(text.clone()));
                ctx.raw_output = Some(text);
            }
            Ok(Partial {
                parameters: json!({ "group": group, "k": k, "orbits": orbits, "mode": Closure::from(mode), "format": extension(format) }),
                outcome: Outcome::Ok,
                headline: format!("{} vertices, {} edges", g.vertex_count(), g.edge_count()),
                results: Value::Object(results),
            })
        }
        Command::Chi { ref graph, witness } => {
            let g = io::parse_graph(&read_text(graph)?)?;
            let out = chromatic_number(&g, None, budget)?;
            let mut results = as_object(chi_json(&out));
            if witness {
                ctx.artifacts.emit_json(
                    "chi-witness.json",
                    json!(out.witness().one_based()),
                    &mut results,
                    "witness",
                )?;
            }
            let (lower, upper) = out.bounds();
            Ok(Partial {
                parameters: json!({ "graph": graph.display().to_string(), "witness": witness }),
                outcome: Outcome::from_verdict(out.exact().is_some(), false),
                headline: match out.exact() {
                    Some(c) => c.to_string(),
                    None => format!("undecided: {lower} <= chi <= {upper}"),
                },
                results: Value::Object(results),
            })
        }
        Command::VerifyDichotomy {
            k,
            palette,
            pin_first,
        } => {
            let palette = palette.unwrap_or(2 * k.max(2) - 2);
            let pin = pin_first.unwrap_or(k >= 4);
            let rep = verify_dichotomy_with(k, palette, pin, budget)?;
            Ok(Partial {
                parameters: json!({ "k": k, "palette": palette, "pin_first": pin }),
                outcome: Outcome::from_verdict(rep.verified(), rep.complete),
                headline: format!(
                    "{} colorings: {} horizontal, {} vertical, {} violations",
                    rep.total_colorings, rep.horizontal, rep.vertical, rep.violation_count
                ),
                results: serde_json::to_value(&rep)?,
            })
        }
        Command::VerifyInvariance { k, twisted } => {
            let rep = verify_invariance(k, twisted, budget)?;
            Ok(Partial {
                parameters: json!({ "k": k, "twisted": twisted }),
                outcome: Outcome::from_verdict(rep.verified(), rep.complete),
                headline: format!(
                    "{} colorings: {} equal, {} opposite, {} violations",
                    rep.total_colorings, rep.equal, rep.opposite, rep.violation_count
                ),
                results: serde_json::to_value(&rep)?,
            })
        }
        Command::VerifyRigidity { k } => {
            let rep = verify_rigidity(k, budget)?;
            Ok(Partial {
                parameters: json!({ "k": k }),
                outcome: Outcome::from_verdict(rep.verified(), rep.complete),
                headline: format!(
                    "{} colorings: {} first-coordinate, {} second-coordinate, {} violations",
                    rep.colorings, rep.first_coordinate, rep.second_coordinate, rep.violation_count
                ),
                results: serde_json::to_value(&rep)?,
            })
        }
        Command::TwoEndedColor {
            ref instance,
            builtin,
            blocks,
            k,
            window,
            cap,
            mode,
            chi,
        } => {
            let mut inst = match (instance, builtin) {
                (Some(path), _) => LineInstance::parse(&read_text(path)?)?,
                (None, Some(b)) => {
                    builtin_instance(b, blocks, k, mode.map_or(Closure::Cycle, Closure::from))?
                }
                (None, None) => {
                    return Err(Error::InvalidInput(
                        "--instance or --builtin is required".into(),
                    ))
                }
            };
            if let Some(m) = mode {
                inst = inst.with_mode(m.into())?;
            }
            if chi.is_some() {
                inst = inst.with_chi(chi);
            }
            let defaults = SeparatorParams::default_for(&inst);
            let params = SeparatorParams {
                window_blocks: window.unwrap_or(defaults.window_blocks),
                size_cap: cap.unwrap_or(defaults.size_cap),
            };
            let res = color_two_ended(&inst, params, budget)?;
            let mut results = as_object(serde_json::to_value(&res)?);
            results.remove("b_star");
            results.remove("b");
            results.remove("psi");
            results.insert("b_star_size".into(), json!(res.b_star.len()));
            results.insert("b_size".into(), json!(res.b.len()));
            ctx.artifacts.emit_json(
                "psi.json",
                serde_json::to_value(&res.psi)?,
                &mut results,
                "psi",
            )?;
            ctx.artifacts.emit_json(
                "two-ended-coloring.json",
                json!(res.coloring.one_based()),
                &mut results,
                "coloring",
            )?;
            let bound = 2 * res.chi as usize - 1;
            let ok = res.colors_used <= bound && res.family_check.ok() && res.complement.ok;
            Ok(Partial {
                parameters: json!({
                    "instance": instance.as_ref().map(|p| p.display().to_string()),
                    "builtin": builtin.map(|b| format!("{b:?}").to_lowercase()),
                    "blocks": blocks, "k": k, "mode": inst.mode(),
                    "window": params.window_blocks, "cap": params.size_cap, "chi": chi,
                }),
                outcome: Outcome::from_verdict(ok, true),
                headline: format!(
                    "{} colors used (bound 2chi-1 = {bound}), |Psi| = {}",
                    res.colors_used,
                    res.psi.len()
                ),
                results: Value::Object(results),
            })
        }
        Command::ShiftColor {
            k,
            ref anchors,
            mode,
        } => {
            let doc: AnchorsJson = serde_json::from_str(&read_text(anchors)?)
                .map_err(|e| Error::InvalidInput(format!("anchors file: {e}")))?;
            let tower = AnchoredTower::from_json(k, doc, mode.into())?;
            let res = color_tower(&tower)?;
            let mut results = as_object(json!({
                "colors_used": res.colors_used,
                "palette": k + 1,
                "proper": res.proper,
                "longest_schedule": res.longest_schedule,
                "orbits": res.orbits.iter().map(|o| o.as_slice().iter().map(|c| c + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }));
            ctx.artifacts.emit_json(
                "shift-coloring.json",
                json!(res.coloring.one_based()),
                &mut results,
                "coloring",
            )?;
            Ok(Partial {
                parameters: json!({ "k": k, "anchors": anchors.display().to_string(), "mode": Closure::from(mode) }),
                outcome: Outcome::from_verdict(
                    res.proper && res.colors_used <= k as usize + 1,
                    true,
                ),
                headline: format!(
                    "{} colors used (bound k+1 = {}), proper",
                    res.colors_used,
                    k + 1
                ),
                results: Value::Object(results),
            })
        }
        Command::QuotientChi {
            group,
            k,
            m,
            export,
        } => {
            let q = build_quotient(group.spec(k)?, m)?;
            let out = chromatic_number(q.graph(), None, budget)?;
            let mut results = as_object(chi_json(&out));
            if let Some(f) = export {
                let name = format!("quotient-{}-k{k}-M{m}.{}", group_name(group), extension(f));
                if let Some(text) = ctx.artifacts.emit_text(&name, graph_text(q.graph(), f))? {
                    results.insert("graph".into(), Value::String(text));
                }
            }
            results.insert("vertices".into(), json!(q.graph().vertex_count()));
            results.insert("degree".into(), json!(q.graph().max_degree()));
            ctx.artifacts.emit_json(
                "quotient-witness.json",
                json!(out.witness().one_based()),
                &mut results,
                "witness",
            )?;
            let (lower, upper) = out.bounds();
            Ok(Partial {
                parameters: json!({ "group": group, "k": k, "M": m }),
                outcome: Outcome::from_verdict(out.exact().is_some(), false),
                headline: match out.exact() {
                    Some(c) => c.to_string(),
                    None => format!("undecided: {lower} <= chi <= {upper}"),
                },
                results: Value::Object(results),
            })
        }
        Command::VerifyAlternation { k, m } => {
            let rep = verify_alternation_obstruction(k, m, budget)?;
            Ok(Partial {
                parameters: json!({ "k": k, "M": m }),
                outcome: Outcome::from_verdict(rep.verified(), true),
                headline: format!(
                    "no {}-coloring: solver {}, parity {}",
                    rep.palette, rep.solver_none_exists, rep.parity_obstruction
                ),
                results: serde_json::to_value(&rep)?,
            })
        }
        Command::Report { k } => report_partial(k, ctx),
    }
}

fn group_name(g: GroupArg) -> &'static str {
    match g {
        GroupArg::Delta => "delta",
        GroupArg::Gamma => "gamma",
    }
}

fn builtin_instance(b: BuiltinArg, blocks: usize, k: u32, mode: Closure) -> Result<LineInstance> {
    match b {
        BuiltinArg::Path => LineInstance::path(blocks, mode),
        BuiltinArg::Ladder => LineInstance::ladder(blocks, mode),
        BuiltinArg::Delta => LineInstance::cayley(MarkedGroupSpec::delta(k)?, blocks, mode),
        BuiltinArg::Gamma => LineInstance::cayley(MarkedGroupSpec::gamma(k)?, blocks, mode),
    }
}

/// One line of the summary table.
#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub row: String,
    pub expected: String,
    pub observed: String,
    pub outcome: Outcome,
}

fn row(name: &str, expected: impl ToString, observed: Result<(String, Outcome)>) -> ReportRow {
    let (observed, outcome) = match observed {
        Ok(x) => x,
        Err(Error::Undecided(msg)) => (format!("undecided ({msg})"), Outcome::Undecided),
        Err(e) => (format!("error: {e}"), Outcome::Violation),
    };
    ReportRow {
        row: name.to_string(),
        expected: expected.to_string(),
        observed,
        outcome,
    }
}

fn chi_row(out: Result<ChiOutcome>, pass: impl Fn(u32) -> bool) -> Result<(String, Outcome)> {
    let out = out?;
    Ok(match out.exact() {
        Some(c) => (c.to_string(), Outcome::from_verdict(pass(c), true)),
        None => {
            let (lo, hi) = out.bounds();
            (format!("{lo}..={hi}"), Outcome::Undecided)
        }
    })
}

/// Runs every check for one `k` and tabulates expected against observed.
pub fn report(k: u32, budget: Budget, seed: u64) -> Result<Vec<ReportRow>> {
    if k < 3 {
        return Err(Error::InvalidInput(format!(
            "k must be at least 3, got {k}"
        )));
    }
    let delta = MarkedGroupSpec::delta(k)?;
    let gamma = MarkedGroupSpec::gamma(k)?;
    let verdict = |verified: bool, complete: bool, text: String| {
        (text, Outcome::from_verdict(verified, complete))
    };
    let mut rows = Vec::new();

    rows.push(row(
        "chi(H)",
        k,
        chi_row(
            GridGraphH::new(k).and_then(|h| chromatic_number(h.graph(), None, budget)),
            |c| c == k,
        ),
    ));
    rows.push(row(
        "dichotomy, palette 2k-2",
        "0 violations",
        verify_dichotomy_with(k, 2 * k - 2, k >= 4, budget).map(|r| {
            verdict(
                r.verified(),
                r.complete,
                format!("{} violations of {}", r.violation_count, r.total_colorings),
            )
        }),
    ));
    for twisted in [false, true] {
        rows.push(row(
            if twisted {
                "twisted orbits flip orientation"
            } else {
                "direct orbits keep orientation"
            },
            "0 violations",
            verify_invariance(k, twisted, budget).map(|r| {
                verdict(
                    r.verified(),
                    r.complete,
                    format!("{} equal, {} opposite", r.equal, r.opposite),
                )
            }),
        ));
    }
    rows.push(row(
        "k-colorings are projections",
        "0 violations",
        verify_rigidity(k, budget).map(|r| {
            verdict(
                r.verified(),
                r.complete,
                format!("{} colorings", r.colorings),
            )
        }),
    ));
    rows.push(row(
        "Δ quotient chi (M=3)",
        k,
        chi_row(
            build_quotient(delta, 3).and_then(|q| chromatic_number(q.graph(), None, budget)),
            |c| c == k,
        ),
    ));
    rows.push(row(
        "Γ odd-quotient chi (M=3)",
        format!(">= {}", 2 * k - 1),
        chi_row(
            build_quotient(gamma, 3).and_then(|q| chromatic_number(q.graph(), None, budget)),
            |c| c >= 2 * k - 1,
        ),
    ));
    rows.push(row(
        "Γ even-quotient chi (M=4)",
        k,
        verify_even_isomorphism(k, 4).and_then(|iso| {
            let (text, outcome) = chi_row(
                build_quotient(gamma, 4).and_then(|q| chromatic_number(q.graph(), None, budget)),
                |c| c == k,
            )?;
            Ok((
                format!("{text}, isomorphic to Δ: {iso}"),
                outcome.worst(Outcome::from_verdict(iso, true)),
            ))
        }),
    ));
    rows.push(row(
        "two-ended palette, Cay(Δ_k) M=12",
        format!("<= {}", 2 * k - 1),
        LineInstance::cayley(delta, 12, Closure::Cycle).and_then(|inst| {
            let res = color_two_ended(&inst, SeparatorParams::default_for(&inst), budget)?;
            let ok = res.colors_used < 2 * res.chi as usize;
            Ok((
                format!("{} (chi = {})", res.colors_used, res.chi),
                Outcome::from_verdict(ok, true),
            ))
        }),
    ));
    rows.push(row(
        "tower palette, 20 random towers",
        format!("<= {}", k + 1),
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0;
            for i in 0..20 {
                let mode = if i % 2 == 0 {
                    Closure::Segment
                } else {
                    Closure::Cycle
                };
                let t = AnchoredTower::random(k, mode, i % 5 == 0, &mut rng)?;
                worst = worst.max(color_tower(&t)?.colors_used);
            }
            Ok((
                worst.to_string(),
                Outcome::from_verdict(worst <= k as usize + 1, true),
            ))
        })(),
    ));
    Ok(rows)
}

fn report_partial(k: u32, ctx: &mut Ctx) -> Result<Partial> {
    let rows = report(k, ctx.budget, ctx.seed)?;
    let outcome = rows.iter().fold(Outcome::Ok, |acc, r| acc.worst(r.outcome));
    let passed = rows.iter().filter(|r| r.outcome == Outcome::Ok).count();
    Ok(Partial {
        parameters: json!({ "k": k, "seed": ctx.seed }),
        outcome,
        headline: format!("{passed}/{} rows pass", rows.len()),
        results: json!({ "rows": rows }),
    })
}

fn render_text(report: &RunReport) -> String {
    if let Some(raw) = &report.raw_output {
        return raw.clone();
    }
    let mut out = String::new();
    let _ = writeln!(out, "{}", report.headline);
    if let Some(rows) = report.results.get("rows").and_then(Value::as_array) {
        for r in rows {
            let s = |key: &str| r.get(key).and_then(Value::as_str).unwrap_or("").to_string();
            let mark = match s("outcome").as_str() {
                "ok" => "PASS",
                "undecided" => "UNDECIDED",
                _ => "FAIL",
            };
            let _ = writeln!(
                out,
                "{mark:<10} {:<36} expected {:<12} observed {}",
                s("row"),
                s("expected"),
                s("observed")
            );
        }
    } else if let Value::Object(map) = &report.results {
        for (key, v) in map {
            let _ = match v {
                Value::String(s) if s.contains('\n') => writeln!(out, "{key}:\n{s}"),
                _ => writeln!(out, "{key}: {v}"),
            };
        }
    }
    for a in &report.artifacts {
        let _ = writeln!(out, "artifact: {a}");
    }
    out
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Invariant(_) => 1,
        Error::Undecided(_) => 3,
    }
}

/// Runs a parsed command line; returns the report or an error.
pub fn run(cli: &Cli, argv: Vec<String>) -> Result<RunReport> {
    let start = Instant::now();
    let mut ctx = Ctx {
        budget: cli
            .global
            .budget_ms
            .map_or_else(Budget::unlimited, Budget::millis),
        seed: cli.global.seed,
        artifacts: Artifacts::new(cli.global.artifacts.clone())?,
        raw_output: None,
    };
    let partial = match cli.global.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("--jobs: {e}")))?
            .install(|| run_command(&cli.command, &mut ctx))?,
        None => run_command(&cli.command, &mut ctx)?,
    };
    Ok(RunReport {
        command: argv,
        parameters: partial.parameters,
        outcome: partial.outcome,
        headline: partial.headline,
        results: partial.results,
        artifacts: ctx.artifacts.written,
        elapsed_ms: start.elapsed().as_millis() as u64,
        raw_output: ctx.raw_output,
    })
}

/// Parses, runs and prints; returns the process exit code.
pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let argv: Vec<OsString> = args.into_iter().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let echo = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match run(&cli, echo) {
        Ok(report) => {
            let text = if cli.global.json {
                serde_json::to_string_pretty(&report).expect("report json") + "\n"
            } else {
                render_text(&report)
            };
            // a closed pipe is not an error worth reporting
            let _ = std::io::stdout().write_all(text.as_bytes());
            if let Some(path) = &cli.global.out {
                let text = serde_json::to_string_pretty(&report).expect("report json");
                if let Err(e) = fs::write(path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            report.outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        main_with_args(
            std::iter::once("gridshift")
                .chain(args.iter().copied())
                .map(OsString::from),
        )
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(code(&["verify-dichotomy", "--k", "3"]), 0);
        assert_eq!(code(&["verify-dichotomy", "--k", "3", "--palette", "5"]), 2);
        assert_eq!(code(&["verify-dichotomy", "--bogus"]), 2);
        assert_eq!(code(&["verify-alternation", "--k", "3", "--M", "4"]), 2);
        assert_eq!(
            code(&[
                "quotient-chi",
                "--group",
                "gamma",
                "--k",
                "3",
                "--M",
                "3",
                "--budget-ms",
                "0"
            ]),
            3
        );
    }

    #[test]
    fn report_rows_pass_for_k3() {
        let rows = report(3, Budget::unlimited(), 0).unwrap();
        for r in &rows {
            assert_eq!(r.outcome, Outcome::Ok, "{r:?}");
        }
        let find = |name: &str| {
            rows.iter()
                .find(|r| r.row.starts_with(name))
                .unwrap()
                .observed
                .clone()
        };
        assert_eq!(find("Δ quotient chi"), "3");
        assert_eq!(find("Γ odd-quotient chi"), "5");
    }
}
