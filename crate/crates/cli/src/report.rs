use std::collections::BTreeMap;
use std::io::{self, Write};

use flatfold::atlas::{verify_row, verify_rows, Atlas, Base, RowReport, TableRow, CHECKS};
use flatfold::classify::{pairwise_verdicts, EquivalenceVerdict, FiberContext, GlnzClasses, SearchBounds};
use flatfold::fibration::calabi_data;
use flatfold::spacegroup::{InvariantRecord, SpaceGroup};

use crate::{Failure, Format};

/// Two rows of one table and the verdict on them.
#[derive(Debug, Clone)]
pub struct PairNote {
    pub table: u32,
    pub first: (u32, String),
    pub second: (u32, String),
    pub detail: String,
}

impl PairNote {
    fn line(&self) -> String {
        format!(
            "T{:02} r{} ~ r{} ({}, {}){}",
            self.table,
            self.first.0,
            self.second.0,
            self.first.1,
            self.second.1,
            if self.detail.is_empty() { String::new() } else { format!(": {}", self.detail) }
        )
    }
}

#[derive(Debug, Default)]
pub struct VerificationReport {
    pub rows: Vec<RowReport>,
    pub circle_rows: usize,
    pub interval_rows: usize,
    /// Rows with 4-dimensional total space, over the circle and over the interval.
    pub four_dim: (usize, usize),
    /// Whether the pairwise inequivalence pass ran.
    pub equivalence_checked: bool,
    pub pairs: usize,
    pub separated: usize,
    pub unknown: Vec<PairNote>,
    /// Distinct rows found equivalent, contradicting the tables.
    pub equivalent: Vec<PairNote>,
    pub errors: Vec<String>,
}

impl VerificationReport {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.passed()).count()
    }

    pub fn passed(&self, strict: bool) -> bool {
        self.failed_rows() == 0
            && self.equivalent.is_empty()
            && self.errors.is_empty()
            && (!strict || self.unknown.is_empty())
    }
}

pub fn verify(
    atlas: &Atlas,
    rows: &[&TableRow],
    cap: usize,
    bounds: Option<SearchBounds>,
) -> Result<VerificationReport, Failure> {
    let mut rep = VerificationReport {
        rows: verify_rows(atlas, rows, cap),
        circle_rows: rows.iter().filter(|r| r.base == Base::Circle).count(),
        interval_rows: rows.iter().filter(|r| r.base == Base::Interval).count(),
        four_dim: (
            rows.iter().filter(|r| r.base == Base::Circle && r.fiber_dim() == 3).count(),
            rows.iter().filter(|r| r.base == Base::Interval && r.fiber_dim() == 3).count(),
        ),
        ..VerificationReport::default()
    };
    let Some(bounds) = bounds else { return Ok(rep) };
    rep.equivalence_checked = true;
    let mut by_table: BTreeMap<u32, Vec<&TableRow>> = BTreeMap::new();
    for r in rows {
        by_table.entry(r.table).or_default().push(r);
    }
    for (table, rows) in by_table {
        let ctx = FiberContext::new(atlas.load_group(&rows[0].fiber)?);
        let fiberings: Vec<_> = rows.iter().map(|r| r.fibering()).collect();
        let verdicts = match pairwise_verdicts(&ctx, &fiberings, &bounds) {
            Ok(v) => v,
            Err(e) => {
                rep.errors.push(format!("T{table:02}: {e}"));
                continue;
            }
        };
        for (i, j, v) in verdicts {
            rep.pairs += 1;
            let note = |detail: String| PairNote {
                table,
                first: (rows[i].no, rows[i].manifold.clone()),
                second: (rows[j].no, rows[j].manifold.clone()),
                detail,
            };
            match v {
                EquivalenceVerdict::InequivalentByInvariant(_) => rep.separated += 1,
                EquivalenceVerdict::UnknownWithinBounds => rep.unknown.push(note(String::new())),
                EquivalenceVerdict::Equivalent(w) => rep.equivalent.push(note(format!("witness {}", w.conjugator))),
            }
        }
    }
    Ok(rep)
}

fn failures(r: &RowReport) -> String {
    r.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ")
}

pub fn write_verification(out: &mut impl Write, rep: &VerificationReport, format: Format) -> io::Result<()> {
    match format {
        Format::Text => {
            for r in &rep.rows {
                let status = if r.passed() { "pass".to_string() } else { format!("FAIL {}", failures(r)) };
                writeln!(out, "T{:02} r{:<3} {:<6} {status}", r.table, r.no, r.manifold)?;
            }
        }
        Format::Tsv => {
            writeln!(out, "table\tno\tmanifold\tresult\t{}", CHECKS.join("\t"))?;
            for r in &rep.rows {
                let cells: Vec<&str> = r.checks.iter().map(|c| if c.pass { "pass" } else { "FAIL" }).collect();
                let result = if r.passed() { "pass" } else { "FAIL" };
                writeln!(out, "{}\t{}\t{}\t{result}\t{}", r.table, r.no, r.manifold, cells.join("\t"))?;
            }
        }
        Format::Markdown => {
            writeln!(out, "| table | no. | manifold | result |")?;
            writeln!(out, "|---|---|---|---|")?;
            for r in &rep.rows {
                let status = if r.passed() { "pass".to_string() } else { format!("FAIL {}", failures(r)).replace('|', "\\|") };
                writeln!(out, "| {} | {} | {} | {status} |", r.table, r.no, r.manifold)?;
            }
        }
    }
    let prefix = if format == Format::Tsv { "# " } else { "" };
    writeln!(out)?;
    writeln!(
        out,
        "{prefix}rows: {} checked ({} circle, {} interval), {} passed, {} failed",
        rep.rows.len(),
        rep.circle_rows,
        rep.interval_rows,
        rep.rows.len() - rep.failed_rows(),
        rep.failed_rows()
    )?;
    writeln!(out, "{prefix}four-dimensional rows: {} circle, {} interval", rep.four_dim.0, rep.four_dim.1)?;
    if rep.equivalence_checked {
        writeln!(
            out,
            "{prefix}pairs: {} checked, {} separated by invariants, {} equivalent, {} unknown",
            rep.pairs,
            rep.separated,
            rep.equivalent.len(),
            rep.unknown.len()
        )?;
    }
    for n in &rep.equivalent {
        writeln!(out, "{prefix}equivalent: {}", n.line())?;
    }
    for n in &rep.unknown {
        writeln!(out, "{prefix}unknown: {}", n.line())?;
    }
    for e in &rep.errors {
        writeln!(out, "{prefix}error: {e}")?;
    }
    Ok(())
}

fn record_fields(prefix: &str, r: &InvariantRecord) -> Vec<(String, String)> {
    let torsion: Vec<String> = r.torsion.iter().map(u64::to_string).collect();
    vec![
        (format!("{prefix}dim"), r.dim.to_string()),
        (format!("{prefix}orientable"), r.orientable.to_string()),
        (format!("{prefix}betti"), r.betti.to_string()),
        (format!("{prefix}torsion"), if torsion.is_empty() { "-".into() } else { torsion.join(",") }),
        (format!("{prefix}holonomy"), r.holonomy.to_string()),
        (format!("{prefix}holonomy_order"), r.holonomy_order.to_string()),
    ]
}

fn write_fields(out: &mut impl Write, fields: &[(String, String)], format: Format) -> io::Result<()> {
    match format {
        Format::Text => fields.iter().try_for_each(|(k, v)| writeln!(out, "{k}: {v}")),
        Format::Tsv => fields.iter().try_for_each(|(k, v)| writeln!(out, "{k}\t{v}")),
        Format::Markdown => {
            writeln!(out, "| field | value |")?;
            writeln!(out, "|---|---|")?;
            fields.iter().try_for_each(|(k, v)| writeln!(out, "| {k} | {v} |"))
        }
    }
}

fn group_fields(g: &SpaceGroup) -> Vec<(String, String)> {
    let mut fields = match g.invariant_record() {
        Ok(r) => record_fields("", &r),
        Err(e) => vec![("record".into(), format!("unavailable ({e})"))],
    };
    let torsion_free = g.is_torsion_free();
    fields.push(("torsion_free".into(), torsion_free.to_string()));
    fields.push(("betti_via_fixed_space".into(), g.betti_via_fixed_space().to_string()));
    if !torsion_free {
        return fields;
    }
    match calabi_data(g) {
        Ok(c) => {
            match c.i_group.invariant_record() {
                Ok(r) => fields.extend(record_fields("calabi.i.", &r)),
                Err(_) => fields.push(("calabi.i.dim".into(), c.i_group.dim().to_string())),
            }
            let label = c.structure_group.group.label().map_or_else(|e| e.to_string(), |l| l.to_string());
            fields.push(("calabi.structure".into(), label));
            fields.push(("calabi.j_torsion_free".into(), c.j_group.is_torsion_free().to_string()));
            fields.push(("calabi.j_betti".into(), c.j_group.betti_via_fixed_space().to_string()));
            fields.push(("calabi.spans_agree".into(), c.spans_agree.to_string()));
        }
        Err(e) => fields.push(("calabi".into(), format!("unavailable ({e})"))),
    }
    fields
}

pub fn write_invariants(out: &mut impl Write, g: &SpaceGroup, format: Format) -> io::Result<()> {
    write_fields(out, &group_fields(g), format)
}

pub fn write_built(out: &mut impl Write, atlas: &Atlas, g: &SpaceGroup, format: Format) -> io::Result<()> {
    let mut fields = group_fields(g);
    let names = atlas.identify_group(g).map_or_else(|e| format!("unidentified ({e})"), |n| n.join("|"));
    fields.push(("identified".into(), names));
    write_fields(out, &fields, format)
}

pub fn write_names(out: &mut impl Write, names: &[String], format: Format) -> io::Result<()> {
    match format {
        Format::Markdown => names.iter().try_for_each(|n| writeln!(out, "- {n}")),
        _ => names.iter().try_for_each(|n| writeln!(out, "{n}")),
    }
}

pub fn write_glnz(out: &mut impl Write, c: &GlnzClasses, format: Format) -> io::Result<()> {
    let rows: Vec<(usize, u32, usize, String)> = c
        .inverse_pairs
        .iter()
        .enumerate()
        .map(|(i, class)| {
            let rep = c.representative(i);
            let entries: Vec<String> = rep.entries().iter().map(i64::to_string).collect();
            (i + 1, c.element_order(rep).unwrap_or(0), class.len(), entries.join(" "))
        })
        .collect();
    match format {
        Format::Text => {
            writeln!(out, "n = {}: {} finite-order elements, {} conjugacy classes, {} inverse-pair classes", c.n, c.elements.len(), c.conjugacy.len(), c.inverse_pairs.len())?;
            rows.iter().try_for_each(|(i, o, s, e)| writeln!(out, "class {i}: order {o}, {s} elements, representative [{e}]"))
        }
        Format::Tsv => {
            writeln!(out, "class\torder\tsize\trepresentative")?;
            rows.iter().try_for_each(|(i, o, s, e)| writeln!(out, "{i}\t{o}\t{s}\t{e}"))
        }
        Format::Markdown => {
            writeln!(out, "| class | order | size | representative |")?;
            writeln!(out, "|---|---|---|---|")?;
            rows.iter().try_for_each(|(i, o, s, e)| writeln!(out, "| {i} | {o} | {s} | {e} |"))
        }
    }
}

/// One table with computed columns; the flag is false if a computed column disagrees with the data.
pub fn emit_table(atlas: &Atlas, id: u32, rows: &[TableRow], cap: usize, format: Format) -> (String, bool) {
    let header = ["no.", "mfd.", "cS-fbr.", "grp.", "representatives", "s-fbrs.", "check"];
    let mut lines = Vec::new();
    let mut all_ok = true;
    for row in rows {
        let r = verify_row(atlas, row, cap);
        let detail = |name: &str| r.check(name).map(|c| c.detail.clone()).unwrap_or_default();
        let order: usize = detail("structure_order").parse().unwrap_or(0);
        let group = match row.base {
            Base::Circle => format!("C{order}"),
            Base::Interval => format!("D{}", order / 2),
        };
        let reps = match &row.gamma {
            Some(g) => format!("{}; {}", row.beta, g),
            None => row.beta.to_string(),
        };
        let singular = match row.base {
            Base::Circle => "-".to_string(),
            Base::Interval => detail("singular_fibers").replace(',', ", "),
        };
        all_ok &= r.passed();
        let check = if r.passed() { "ok".to_string() } else { format!("mismatch: {}", failures(&r)) };
        lines.push(vec![row.no.to_string(), detail("identify"), detail("fiber_identified"), group, reps, singular, check]);
    }
    let mut s = String::new();
    match format {
        Format::Tsv => {
            s.push_str(&header.join("\t"));
            s.push('\n');
            for l in &lines {
                s.push_str(&l.join("\t"));
                s.push('\n');
            }
        }
        _ => {
            let lines: Vec<Vec<String>> = lines.iter().map(|l| l.iter().map(|c| c.replace('|', "\\|")).collect()).collect();
            s.push_str(&format!("### Table {id}\n\n| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len())));
            for l in &lines {
                s.push_str(&format!("| {} |\n", l.join(" | ")));
            }
        }
    }
    (s, all_ok)
}
