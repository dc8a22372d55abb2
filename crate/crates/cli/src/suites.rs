//! Named verification suites: fixed lists of experiments with their
//! tolerances, run together and summarized in one table.

use crate::config::{self, ExperimentConfig};
use crate::experiment::*;
use crate::notation::{ArchExpr, CharExpr, ComplexExpr, LcfExpr, RadialExpr, TermExpr};
use crate::output::{num, RunRecord, Table};
use anyhow::{bail, Result};
use std::str::FromStr;

pub const SUITES: [&str; 6] = ["pv-constants", "explicit-formula", "trace-ladder", "prolate-plunge", "stats", "adelic"];

/// One suite member and its outcome.
#[derive(Debug, Clone)]
pub struct MemberResult {
    pub label: String,
    pub record: RunRecord,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub members: Vec<MemberResult>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.members.iter().all(|m| m.record.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.members.iter().filter(|m| !m.record.pass).map(|m| m.label.as_str()).collect()
    }

    pub fn summary(&self) -> Table {
        let mut t = Table::new(&["member", "command", "pass", "wall_time_seconds"]);
        for m in &self.members {
            t.push(vec![m.label.clone(), m.record.command.clone(), m.record.pass.to_string(), num(m.record.wall_time_seconds)]);
        }
        t
    }

    /// Member tables stacked with a leading `member` column, one table per
    /// distinct header in order of first appearance.
    pub fn details(&self) -> Vec<Table> {
        let mut out: Vec<Table> = Vec::new();
        for m in &self.members {
            let Some(t) = &m.record.table else { continue };
            let header: Vec<String> = std::iter::once("member".to_string()).chain(t.header.iter().cloned()).collect();
            let idx = match out.iter().position(|o| o.header == header) {
                Some(i) => i,
                None => {
                    out.push(Table { header, rows: Vec::new() });
                    out.len() - 1
                }
            };
            for row in &t.rows {
                out[idx].push(std::iter::once(m.label.clone()).chain(row.iter().cloned()).collect());
            }
        }
        out
    }
}

fn p<T: FromStr<Err = anyhow::Error>>(s: &str) -> T {
    s.parse().unwrap_or_else(|e| panic!("built-in expression `{s}`: {e}"))
}

fn cfg(tolerance: f64, e: Experiment) -> ExperimentConfig {
    ExperimentConfig::new(e).with_tolerance(tolerance)
}

/// The members of suite `name`.
pub fn members(name: &str) -> Result<Vec<(String, ExperimentConfig)>> {
    let m = match name {
        "pv-constants" => vec![
            ("real: log pi + gamma".into(), cfg(1e-7, Experiment::PvReal(PvArchArgs { f: "reference".into(), expect: None }))),
            ("complex: 2(log 2pi + gamma)".into(), cfg(1e-6, Experiment::PvComplex(PvArchArgs { f: "reference".into(), expect: None }))),
            (
                "finite: units vanish".into(),
                cfg(
                    0.0,
                    Experiment::PvFinite(PvFiniteArgs {
                        primes: vec![2, 3, 5, 7],
                        f: p::<LcfExpr>("units"),
                        normalization: "log-scale".into(),
                        expect_zero: true,
                    }),
                ),
            ),
            (
                "characters: -f log p".into(),
                cfg(
                    0.0,
                    Experiment::PvChar(PvCharArgs {
                        chi: ["3:quadratic", "2:two-adic(2,1,0)", "5:root-power(1,1)", "2:two-adic(4,0,1)", "7:root-power(2,6)"]
                            .iter()
                            .map(|s| p::<CharExpr>(s))
                            .collect(),
                    }),
                ),
            ),
        ],
        "explicit-formula" => [0.7, 1.0, 1.3]
            .iter()
            .map(|w| {
                let h = p::<RadialExpr>(&format!("gaussian-log(0,{w})"));
                (format!("w = {w}"), cfg(1e-7, Experiment::ExplicitCompare(CompareArgs { h, e_max: 200.0, prime_cutoff: None })))
            })
            .collect(),
        "trace-ladder" => {
            let mut v: Vec<(String, ExperimentConfig)> = [(2u64, "units"), (2, "shell(-1) + 3*shell(1)"), (3, "units + 1/2*ball(1,1)")]
                .iter()
                .map(|(q, h)| {
                    let e = Experiment::TracePadic(TracePadicArgs { p: *q, h: p::<LcfExpr>(h), n: (0..=6).collect() });
                    (format!("p = {q}: {h}"), cfg(0.0, e))
                })
                .collect();
            for h in ["interval(0.5,2)", "interval(0.6,1.8)", "interval(2,4)", "interval(0.25,0.8)", "2*interval(0.8,1.25)"] {
                let e = Experiment::TraceReal(TraceRealArgs { h: p::<RadialExpr>(h), lambda: vec![4.0, 8.0, 16.0, 32.0], threshold: 1e-4 });
                v.push((format!("real: {h}"), cfg(1e-10, e)));
            }
            v
        }
        "prolate-plunge" => vec![
            ("plunge".into(), cfg(0.0, Experiment::ProlatePlunge(PlungeArgs { lambda: vec![1.0, 1.5, 2.0], dim: 256 }))),
            ("gap".into(), cfg(0.0, Experiment::ProlateGap(GapArgs { s: vec![0.5, 1.0, 1.5, 2.0], nodes: 40 }))),
        ],
        "stats" => vec![
            ("semiclassical".into(), cfg(0.0, Experiment::StatsSemiclassical(SemiclassicalArgs { e: 100.0, lambda: 5.0, grid: 8192 }))),
            (
                "pair correlation".into(),
                cfg(0.0, Experiment::StatsPairCorr(PairCorrArgs { zeros: 600, u_max: 2.0, bins: 20, max_l2: 0.15 })),
            ),
            (
                "shift model".into(),
                cfg(
                    1e-6,
                    Experiment::StatsShiftModel(ShiftModelArgs {
                        points: vec![p::<ComplexExpr>("0.9")],
                        f: vec![p::<TermExpr>("1:1")],
                        ladder: vec![250, 500, 1000, 2000],
                    }),
                ),
            ),
        ],
        "adelic" => vec![
            (
                "functional equation".into(),
                cfg(
                    1e-12,
                    Experiment::AdelicFunctionalEquation(FunctionalEquationArgs {
                        finite: Vec::new(),
                        arch: p::<ArchExpr>("theta-s0"),
                        lambda_grid: vec![0.25, 0.4, 0.5, 0.8, 1.0, 1.25, 2.0, 2.5, 4.0],
                    }),
                ),
            ),
            (
                "boundary term".into(),
                cfg(
                    1e-12,
                    Experiment::AdelicFunctionalEquation(FunctionalEquationArgs {
                        finite: Vec::new(),
                        arch: p::<ArchExpr>("gaussian"),
                        lambda_grid: vec![0.25, 0.5, 1.0, 2.0, 4.0],
                    }),
                ),
            ),
            (
                "mellin constant".into(),
                cfg(
                    1e-12,
                    Experiment::AdelicMellin(AdelicMellinArgs {
                        finite: Vec::new(),
                        arch: p::<ArchExpr>("theta-s0"),
                        s_points: ["0.3", "0.5+2i", "0.7-1i"].iter().map(|s| p::<ComplexExpr>(s)).collect(),
                    }),
                ),
            ),
        ],
        other => bail!("unknown suite `{other}` (known: {})", SUITES.join(", ")),
    };
    Ok(m)
}

/// Runs every member of suite `name`. Members run on separate threads;
/// each is deterministic on its own.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let members = members(name)?;
    let results: Vec<Result<MemberResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = members
            .into_iter()
            .map(|(label, c)| scope.spawn(move || config::run(&c).map(|record| MemberResult { label, record })))
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite member panicked")).collect()
    });
    Ok(SuiteReport { name: name.to_string(), members: results.into_iter().collect::<Result<_>>()? })
}
