//! Command dispatch and deterministic key-value reports.
//!
//! Every command reads a problem file, runs a computation and prints one
//! `key = value` line per fact, in a fixed order, so outputs are
//! byte-for-byte diffable. Lists are comma separated; multiset entries
//! carry their multiplicity as `name:count` when it exceeds one. DOT
//! output renders torsion vertices black and torsion-free vertices
//! white.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 semantic error,
//! 3 capacity error, 4 verification failure.

use crate::coalgebra::{Cap, PathCoalgebra};
use crate::comodule::{LoewySeries, PathComodule, VertexMultiset};
use crate::error::{Error, Result};
use crate::extquiver::{ext_quiver, is_predecessor, n_predecessors};
use crate::localization::{Finiteness, LocalizationContext};
use crate::oracle;
use crate::problem::ProblemFile;
use crate::properties::{self, ClauseStatus, EquivalenceBattery};
use crate::quiver::{Fill, Quiver, VertexId};
use std::collections::BTreeMap;
use std::sync::Arc;

pub const COMMANDS: &[&str] = &[
    "ext-quiver",
    "loewy",
    "predecessors",
    "localize",
    "section",
    "quotient",
    "torsion-sub",
    "coloc",
    "check-left-semicentral",
    "check-right-semicentral",
    "check-central",
    "verify",
];

/// Accumulated report lines.
#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.lines.push((key.into(), value.into()));
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(v);
            s.push('\n');
        }
        s
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub struct Outcome {
    pub report: Report,
    pub dot: Option<String>,
    /// Exit code; nonzero only for verification failures (parse and
    /// capacity errors surface as `Error` instead).
    pub exit: i32,
}

fn multiset_string(q: &Quiver, ms: &VertexMultiset) -> String {
    if ms.is_empty() {
        return "-".into();
    }
    ms.iter()
        .map(|(&v, &m)| {
            if m == 1 {
                q.vertex_name(v).to_string()
            } else {
                format!("{}:{}", q.vertex_name(v), m)
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn loewy_lines(report: &mut Report, prefix: &str, q: &Quiver, series: &LoewySeries) {
    for (i, layer) in series.layers().iter().enumerate() {
        report.push(
            format!("{prefix}.layer.{}", i + 1),
            multiset_string(q, layer),
        );
    }
}

fn comodule_basis_string(m: &PathComodule) -> String {
    let q = m.coalgebra().quiver();
    let mut parts = Vec::new();
    for comp in m.components() {
        let mut paths: Vec<_> = comp.surviving().cloned().collect();
        q.sort_paths(&mut paths);
        for p in paths {
            parts.push(q.path_string(&p));
        }
    }
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(",")
    }
}

fn torsion_fills(ctx: &LocalizationContext) -> BTreeMap<VertexId, Fill> {
    ctx.quiver()
        .vertices()
        .map(|v| {
            let fill = if ctx.is_torsion(v) {
                Fill::Black
            } else {
                Fill::White
            };
            (v, fill)
        })
        .collect()
}

fn injective_cap(c: &PathCoalgebra, v: VertexId, cap: usize) -> (Cap, bool) {
    if c.injective_is_infinite(v) {
        (Cap::Bounded(cap), true)
    } else {
        (Cap::Unbounded, false)
    }
}

fn cycle_string(q: &Quiver, cycle: &[crate::quiver::ArrowId]) -> String {
    cycle
        .iter()
        .map(|&a| q.arrow_name(a))
        .collect::<Vec<_>>()
        .join("*")
}

/// Runs `command` against a parsed problem. The closure notice for
/// automatically added subpaths is returned separately so the binary can
/// print it to stderr.
pub fn run(command: &str, problem: &ProblemFile) -> Result<(Outcome, Vec<String>)> {
    let (coalgebra, ctx, added) = problem.build()?;
    let notice: Vec<String> = added
        .iter()
        .map(|p| coalgebra.quiver().path_string(p))
        .collect();
    let outcome = match command {
        "ext-quiver" => cmd_ext_quiver(&coalgebra, &ctx)?,
        "loewy" => cmd_loewy(&coalgebra, &ctx, problem.cap)?,
        "predecessors" => cmd_predecessors(&coalgebra, &ctx, problem.cap)?,
        "localize" => cmd_localize(&ctx)?,
        "section" => cmd_section(&ctx)?,
        "quotient" => cmd_quotient(&coalgebra, &ctx, problem.cap)?,
        "torsion-sub" => cmd_torsion_sub(&coalgebra, &ctx, problem.cap)?,
        "coloc" => cmd_coloc(&ctx)?,
        "check-left-semicentral" => cmd_battery(&ctx, "left", properties::is_left_semicentral)?,
        "check-right-semicentral" => {
            cmd_battery(&ctx, "right", properties::is_right_semicentral)?
        }
        "check-central" => cmd_battery(&ctx, "central", properties::is_central)?,
        "verify" => cmd_verify(&coalgebra, &ctx, problem.cap)?,
        other => {
            return Err(Error::Syntax {
                line: 0,
                col: 0,
                expected: format!("one of {:?}, found `{other}`", COMMANDS),
            })
        }
    };
    Ok((outcome, notice))
}

fn cmd_ext_quiver(c: &Arc<PathCoalgebra>, ctx: &LocalizationContext) -> Result<Outcome> {
    let q = c.quiver();
    let gamma = ext_quiver(c);
    let mut report = Report::default();
    report.push(
        "gamma.vertices",
        q.vertices()
            .map(|v| q.vertex_name(v).to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    for v in q.vertices() {
        let status = if ctx.is_torsion(v) {
            "torsion"
        } else {
            "torsion-free"
        };
        report.push(format!("gamma.vertex.{}", q.vertex_name(v)), status);
    }
    for (s, t, m) in gamma.arrows() {
        report.push(
            format!("gamma.arrow.{}.{}", q.vertex_name(s), q.vertex_name(t)),
            m.to_string(),
        );
    }

    // DOT of the Ext-quiver, multiplicities as repeated arrows.
    let mut gq = Quiver::new();
    for v in q.vertices() {
        gq.add_vertex(q.vertex_name(v))?;
    }
    for (s, t, m) in gamma.arrows() {
        for k in 0..m {
            let name = if m == 1 {
                format!("{}.{}", q.vertex_name(s), q.vertex_name(t))
            } else {
                format!("{}.{}.{}", q.vertex_name(s), q.vertex_name(t), k + 1)
            };
            gq.add_arrow(&name, q.vertex_name(s), q.vertex_name(t))?;
        }
    }
    let fills: BTreeMap<VertexId, Fill> = gq
        .vertices()
        .map(|v| {
            let orig = q.vertex(gq.vertex_name(v)).expect("same names");
            let fill = if ctx.is_torsion(orig) {
                Fill::Black
            } else {
                Fill::White
            };
            (v, fill)
        })
        .collect();
    let dot = gq.export_dot(&fills)?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit: 0,
    })
}

fn cmd_loewy(c: &Arc<PathCoalgebra>, ctx: &LocalizationContext, cap: usize) -> Result<Outcome> {
    let q = c.quiver();
    let mut report = Report::default();
    for v in q.vertices() {
        let (capk, truncated) = injective_cap(c, v, cap);
        let e = PathComodule::injective(c.clone(), v, capk)?;
        let key = format!("loewy.E_{}", q.vertex_name(v));
        report.push(format!("{key}.dim"), e.dim().to_string());
        if truncated {
            report.push(format!("{key}.truncated"), "true");
        }
        loewy_lines(&mut report, &key, q, &e.socle_series());
    }
    let dot = q.export_dot(&torsion_fills(ctx))?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit: 0,
    })
}

fn cmd_predecessors(
    c: &Arc<PathCoalgebra>,
    ctx: &LocalizationContext,
    cap: usize,
) -> Result<Outcome> {
    let q = c.quiver();
    let mut report = Report::default();
    for x in q.vertices() {
        for n in 1..=cap {
            let rep = n_predecessors(c, x, n);
            if !rep.is_empty() {
                let ms: VertexMultiset = rep.entries.clone();
                report.push(
                    format!("predecessors.{}.{}", q.vertex_name(x), n),
                    multiset_string(q, &ms),
                );
            }
        }
    }
    for y in q.vertices() {
        for x in q.vertices() {
            let val = match is_predecessor(c, y, x) {
                Some(n) => n.to_string(),
                None => "none".into(),
            };
            report.push(
                format!("is_predecessor.{}.{}", q.vertex_name(y), q.vertex_name(x)),
                val,
            );
        }
    }
    let dot = q.export_dot(&torsion_fills(ctx))?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit: 0,
    })
}

fn cmd_localize(ctx: &LocalizationContext) -> Result<Outcome> {
    let loc = ctx.localized()?;
    let cq = loc.cell_quiver();
    let mut report = Report::default();
    report.push(
        "ece.vertices",
        cq.vertices()
            .map(|v| cq.vertex_name(v).to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    report.push("ece.cells", loc.cell_count().to_string());
    for a in cq.arrow_ids() {
        report.push(
            format!("ece.cell.{}", cq.arrow_name(a)),
            format!(
                "{}->{}",
                cq.vertex_name(cq.source(a)),
                cq.vertex_name(cq.target(a))
            ),
        );
    }
    let fills: BTreeMap<VertexId, Fill> = cq.vertices().map(|v| (v, Fill::White)).collect();
    let dot = cq.export_dot(&fills)?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit: 0,
    })
}

fn cmd_section(ctx: &LocalizationContext) -> Result<Outcome> {
    let q = ctx.quiver();
    let mut report = Report::default();
    for &x in ctx.x_set() {
        let key = format!("section.S_{}", q.vertex_name(x));
        let s = ctx.section_on_simple(x)?;
        match s.finiteness {
            Finiteness::Finite => {
                let m = s.comodule.expect("finite sections carry a comodule");
                report.push(format!("{key}.finite"), "true");
                report.push(format!("{key}.dim"), m.dim().to_string());
                report.push(format!("{key}.basis"), comodule_basis_string(&m));
            }
            Finiteness::Infinite { cycle } => {
                report.push(format!("{key}.finite"), "false");
                report.push(format!("{key}.witness"), cycle_string(q, &cycle));
            }
        }
    }
    let dot = q.export_dot(&torsion_fills(ctx))?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit: 0,
    })
}

fn cmd_quotient(
    c: &Arc<PathCoalgebra>,
    ctx: &LocalizationContext,
    cap: usize,
) -> Result<Outcome> {
    let q = c.quiver();
    let loc = ctx.localized()?;
    let cq = loc.cell_quiver();
    let mut report = Report::default();
    for v in q.vertices() {
        let (capk, truncated) = injective_cap(c, v, cap);
        let e = PathComodule::injective(c.clone(), v, capk)?;
        let t = ctx.quotient_t(&e)?;
        let key = format!("T.E_{}", q.vertex_name(v));
        report.push(format!("{key}.dim"), t.dim().to_string());
        if truncated {
            report.push(format!("{key}.truncated"), "true");
        }
        loewy_lines(&mut report, &key, cq, &t.socle_series());
    }
    for &x in ctx.x_set() {
        let xbar = loc.cell_vertex(x)?;
        let (capk, truncated) = injective_cap(loc.coalgebra(), xbar, cap);
        let ebar = PathComodule::injective(loc.coalgebra().clone(), xbar, capk)?;
        let key = format!("ece.E_{}", q.vertex_name(x));
        report.push(format!("{key}.dim"), ebar.dim().to_string());
        if truncated {
            report.push(format!("{key}.truncated"), "true");
        }
    }
    let dot = q.export_dot(&torsion_fills(ctx))?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit: 0,
    })
}

fn cmd_torsion_sub(
    c: &Arc<PathCoalgebra>,
    ctx: &LocalizationContext,
    cap: usize,
) -> Result<Outcome> {
    let q = c.quiver();
    let mut report = Report::default();
    for v in q.vertices() {
        let (capk, truncated) = injective_cap(c, v, cap);
        let e = PathComodule::injective(c.clone(), v, capk)?;
        let t = ctx.torsion_subcomodule(&e)?;
        let key = format!("torsion_sub.E_{}", q.vertex_name(v));
        report.push(format!("{key}.dim"), t.dim().to_string());
        if truncated {
            report.push(format!("{key}.truncated"), "true");
        }
        report.push(format!("{key}.basis"), comodule_basis_string(&t));
    }
    let dot = q.export_dot(&torsion_fills(ctx))?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit: 0,
    })
}

fn cmd_coloc(ctx: &LocalizationContext) -> Result<Outcome> {
    let q = ctx.quiver();
    let mut report = Report::default();
    let status = ctx.colocalizing_exists();
    report.push("coloc.exists", status.exists.to_string());
    if let Some(cycle) = &status.witness {
        report.push("coloc.witness", cycle_string(q, cycle));
    }
    if status.exists {
        for &x in ctx.x_set() {
            let h = ctx.h_on_simple(x)?;
            let key = format!("H.S_{}", q.vertex_name(x));
            report.push(format!("{key}.dim"), h.dim.to_string());
            report.push(format!("{key}.simple"), h.is_simple.to_string());
        }
    }
    let dot = q.export_dot(&torsion_fills(ctx))?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit: 0,
    })
}

fn cmd_battery(
    ctx: &LocalizationContext,
    prefix: &str,
    eval: impl Fn(&LocalizationContext) -> Result<EquivalenceBattery>,
) -> Result<Outcome> {
    let battery = eval(ctx)?;
    let mut report = Report::default();
    for clause in &battery.clauses {
        let status = match clause.status {
            ClauseStatus::Holds => "holds",
            ClauseStatus::Fails => "fails",
            ClauseStatus::Skipped => "skipped",
        };
        report.push(format!("{prefix}.clause.{}", clause.label), status);
        if clause.status != ClauseStatus::Holds && !clause.evidence.is_empty() {
            report.push(
                format!("{prefix}.clause.{}.evidence", clause.label),
                clause.evidence.clone(),
            );
        }
    }
    let coherent = battery.coherent();
    report.push(format!("{prefix}.coherent"), coherent.to_string());
    report.push(format!("{prefix}.verdict"), battery.verdict.to_string());
    let dot = ctx.quiver().export_dot(&torsion_fills(ctx))?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit: if coherent { 0 } else { 4 },
    })
}

/// Runs every cross-module invariant against the problem instance and
/// reports one ok/FAIL line per check. Any failure exits nonzero.
fn cmd_verify(
    c: &Arc<PathCoalgebra>,
    ctx: &LocalizationContext,
    cap: usize,
) -> Result<Outcome> {
    let q = c.quiver();
    let mut report = Report::default();
    let mut failures = 0usize;
    let mut check = |report: &mut Report, name: String, outcome: Result<bool>| {
        let value = match outcome {
            Ok(true) => "ok".to_string(),
            Ok(false) => {
                failures += 1;
                "FAIL".to_string()
            }
            Err(e) => {
                failures += 1;
                format!("FAIL ({e})")
            }
        };
        report.push(format!("verify.{name}"), value);
    };

    check(
        &mut report,
        "coalgebra_valid".into(),
        Ok(c.validate().is_ok()),
    );

    // Battery coherence.
    for (name, battery) in [
        ("left", properties::is_left_semicentral(ctx)),
        ("right", properties::is_right_semicentral(ctx)),
        ("central", properties::is_central(ctx)),
    ] {
        check(
            &mut report,
            format!("battery_{name}_coherent"),
            battery.map(|b| b.coherent()),
        );
    }

    // The localized coalgebra may legitimately be infinite (a torsion
    // cycle between localized vertices); checks that need it are then
    // skipped rather than failed.
    let localized = match ctx.localized() {
        Ok(l) => Some(l),
        Err(Error::Capacity { .. }) => None,
        Err(e) => return Err(e),
    };
    if localized.is_none() {
        report.push("verify.localized", "skipped (infinite cell set)");
    }

    // TS = id on simples and (finite) injectives, socle of sections,
    // torsion-freeness of sections.
    for &x in ctx.x_set() {
        let xn = q.vertex_name(x);
        let sres = ctx.section_on_simple(x)?;
        if let Some(s) = &sres.comodule {
            if let Some(loc) = &localized {
                check(&mut report, format!("ts_identity_on_S_{xn}"), {
                    let t = ctx.quotient_t_with(loc, s)?;
                    let cellq = t.coalgebra().quiver().clone();
                    let layer = t.socle_series().layer(1);
                    Ok(t.dim() == 1
                        && layer.len() == 1
                        && cellq.vertex_name(*layer.iter().next().unwrap().0) == xn)
                });
            }
            check(&mut report, format!("socle_of_section_S_{xn}"), {
                let series = s.socle_series();
                let l1 = series.layer(1);
                Ok(l1.len() == 1 && l1.get(&x) == Some(&1))
            });
            check(
                &mut report,
                format!("section_torsion_free_S_{xn}"),
                Ok(ctx.torsion_subcomodule(s)?.is_zero()),
            );
        }
        if let (Some(loc), false) = (&localized, c.injective_is_infinite(x)) {
            let e = PathComodule::injective(c.clone(), x, Cap::Unbounded)?;
            let t = ctx.quotient_t_with(loc, &e)?;
            let xbar = loc.cell_vertex(x)?;
            let ebar = PathComodule::injective(loc.coalgebra().clone(), xbar, Cap::Unbounded)?;
            check(
                &mut report,
                format!("t_injective_is_localized_injective_E_{xn}"),
                Ok(t.dim() == ebar.dim()
                    && t.socle_series().layers() == ebar.socle_series().layers()),
            );
        }
    }

    // T of torsion envelopes vanishes iff no torsion-free predecessor.
    for y in q.vertices().filter(|&y| ctx.is_torsion(y)) {
        check(
            &mut report,
            format!("t_vanishing_matches_predecessors_E_{}", q.vertex_name(y)),
            Ok(ctx.t_injective_is_zero(y) == !ctx.has_torsion_free_predecessor(y)),
        );
    }

    // Torsion socle layers of sections against quotient socles.
    for &x in ctx.x_set() {
        let sres = ctx.section_on_simple(x)?;
        if let Some(s) = &sres.comodule {
            for n in 1..=3usize {
                let direct = ctx.section_predecessor_layers(x, n)?;
                let via_quotient = s.quotient_by_socle(n).socle_series().layer(1);
                check(
                    &mut report,
                    format!("section_layers_S_{}_{n}", q.vertex_name(x)),
                    Ok(direct == via_quotient),
                );
            }
        }
    }

    // Quotient-socle law on (possibly truncated) envelopes.
    let mut quotient_law = true;
    for v in q.vertices() {
        let (capk, _) = injective_cap(c, v, cap.min(6));
        let e = PathComodule::injective(c.clone(), v, capk)?;
        let series = e.socle_series();
        for n in 0..=3usize {
            let quot = e.quotient_by_socle(n).socle_series();
            for t in 1..=3usize {
                if quot.layer(t) != series.layer(n + t) {
                    quotient_law = false;
                }
            }
        }
    }
    check(&mut report, "quotient_socle_law".into(), Ok(quotient_law));

    // Oracle concordance on finite instances.
    let all_finite = q.vertices().all(|v| !c.injective_is_infinite(v));
    if all_finite {
        let gamma = ext_quiver(c);
        let mut socle_ok = true;
        let mut ext_ok = true;
        let mut t_ok = true;
        for v in q.vertices() {
            let e = PathComodule::injective(c.clone(), v, Cap::Unbounded)?;
            let lin = oracle::realize(&e)?;
            socle_ok &= e.socle_series().layers() == oracle::loewy_series(&lin)?.as_slice();
            for y in q.vertices() {
                ext_ok &= oracle::ext1_dim(c, y, v)? == gamma.multiplicity(y, v);
            }
            let tcomb = ctx.quotient_t(&e)?;
            let tlin = oracle::t_linear(ctx, &lin)?;
            t_ok &= tcomb.dim() == tlin.dim()
                && oracle::is_isomorphic(&oracle::realize(&tcomb)?, &tlin)?;
        }
        check(&mut report, "oracle_socle_series".into(), Ok(socle_ok));
        check(&mut report, "oracle_ext_dimensions".into(), Ok(ext_ok));
        check(&mut report, "oracle_quotient_functor".into(), Ok(t_ok));

        // Sections against the cotensor kernel.
        match ctx.localized() {
            Ok(loc) => {
                let mut s_ok = true;
                for &x in ctx.x_set() {
                    let sres = ctx.section_on_simple(x)?;
                    if let Some(s) = &sres.comodule {
                        let xbar = loc.cell_vertex(x)?;
                        let sx = oracle::realize(&PathComodule::simple(
                            loc.coalgebra().clone(),
                            xbar,
                        )?)?;
                        match oracle::cotensor_section(ctx, &sx) {
                            Ok(cot) => {
                                s_ok &= cot.dim() == s.dim()
                                    && oracle::is_isomorphic(&cot, &oracle::realize(s)?)?;
                            }
                            Err(Error::Capacity { .. }) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
                check(&mut report, "oracle_section_functor".into(), Ok(s_ok));
            }
            Err(Error::Capacity { .. }) => {}
            Err(e) => return Err(e),
        }

        // H dimensions against Hom into the localized coalgebra image.
        let status = ctx.colocalizing_exists();
        if status.exists {
            match oracle::ec_comodule(ctx) {
                Ok(ec) => {
                    let loc = ctx.localized()?;
                    let mut h_ok = true;
                    for &x in ctx.x_set() {
                        let xbar = loc.cell_vertex(x)?;
                        let sx = oracle::realize(&PathComodule::simple(
                            loc.coalgebra().clone(),
                            xbar,
                        )?)?;
                        let hom_dim = oracle::hom_space(&sx, &ec)?.dim();
                        h_ok &= hom_dim == ctx.h_on_simple(x)?.dim;
                    }
                    check(&mut report, "oracle_h_dimensions".into(), Ok(h_ok));
                }
                Err(Error::Capacity { .. }) => {}
                Err(e) => return Err(e),
            }
        }

        // Predecessor relation against nonzero radical morphisms.
        let mut rad_ok = true;
        for y in q.vertices() {
            for x in q.vertices() {
                rad_ok &=
                    is_predecessor(c, y, x).is_some() == oracle::rad_nonzero(c, x, y)?;
            }
        }
        check(&mut report, "oracle_predecessor_radical".into(), Ok(rad_ok));
    }

    let exit = if failures == 0 { 0 } else { 4 };
    report.push("verify.result", if failures == 0 { "ok" } else { "FAIL" });
    let dot = q.export_dot(&torsion_fills(ctx))?;
    Ok(Outcome {
        report,
        dot: Some(dot),
        exit,
    })
}

/// Maps errors to process exit codes.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Syntax { .. } => 1,
        Error::Semantic { .. }
        | Error::UnknownVertex(_)
        | Error::UnknownArrow(_)
        | Error::DuplicateId(_)
        | Error::NotComposable(_)
        | Error::MissingFill(_)
        | Error::MixedCoalgebras
        | Error::OutsideLocalization(_)
        | Error::EmptyLocalization
        | Error::InvalidComodule(_) => 2,
        Error::Capacity { .. } | Error::UnsupportedContext { .. } => 3,
        Error::Internal(_) => 4,
    }
}
