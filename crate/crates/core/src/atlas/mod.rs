//! Golden data: flat manifold invariants, fiber groups, and the fibration tables, plus the
//! invariant-based recogniser.

mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::fibration::{calabi_data, FibrationError};
use crate::spacegroup::{parse_affine, parse_group, AffineMap, GroupLabel, InvariantRecord, SpaceGroup, SpaceGroupError};

pub use verify::{build_row, verify_row, verify_rows, Check, RowReport, CHECKS};

/// Environment variable naming a data directory that replaces the embedded atlas.
pub const ATLAS_DIR_ENV: &str = "FLATFOLD_ATLAS_DIR";

macro_rules! embedded {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!("../../atlas/", $path)))),*]
    };
}

const MANIFEST: &str = include_str!("../../atlas/MANIFEST");

const FILES: &[(&str, &str)] = embedded![
    "groups/K2.grp", "groups/N3_1.grp", "groups/N3_2.grp", "groups/N3_3.grp", "groups/N3_4.grp",
    "groups/O3_1.grp", "groups/O3_2.grp", "groups/O3_3.grp", "groups/O3_4.grp", "groups/O3_5.grp",
    "groups/O3_6.grp", "groups/T2.grp", "groups/example2.grp", "groups/example3.grp",
    "groups/example4.grp", "groups/example5.grp", "manifolds.tsv",
    "tables/table-06.tsv", "tables/table-07.tsv", "tables/table-08.tsv", "tables/table-09.tsv",
    "tables/table-10.tsv", "tables/table-11.tsv", "tables/table-12.tsv", "tables/table-13.tsv",
    "tables/table-14.tsv", "tables/table-15.tsv", "tables/table-16.tsv", "tables/table-17.tsv",
    "tables/table-18.tsv", "tables/table-19.tsv", "tables/table-20.tsv", "tables/table-21.tsv",
    "tables/table-22.tsv", "tables/table-23.tsv", "tables/table-24.tsv", "tables/table-25.tsv",
    "tables/table-26.tsv", "tables/table-27.tsv", "tables/table-28.tsv", "tables/table-29.tsv",
    "tables/table-30.tsv", "tables/table-31.tsv", "tables/table-32.tsv", "tables/table-33.tsv",
    "tables/table-34.tsv",
];

/// Fibration tables in the data set.
pub const TABLE_IDS: std::ops::RangeInclusive<u32> = 6..=34;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AtlasError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("checksum mismatch for {0}")]
    Checksum(String),
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("no atlas entry matches {0}")]
    EmptyCandidateSet(String),
    #[error(transparent)]
    SpaceGroup(#[from] SpaceGroupError),
    #[error(transparent)]
    Fibration(#[from] FibrationError),
}

/// Invariants of one named flat manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtlasEntry {
    pub name: String,
    pub dim: usize,
    pub orientable: bool,
    pub i_fiber: String,
    pub j_label: String,
    pub structure: GroupLabel,
    pub betti: usize,
    pub torsion: Vec<u64>,
    pub holonomy: GroupLabel,
    pub odc: Option<String>,
    pub bbnwz: Option<String>,
    pub it_number: Option<String>,
}

impl AtlasEntry {
    pub fn matches_record(&self, r: &InvariantRecord) -> bool {
        self.dim == r.dim
            && self.orientable == r.orientable
            && self.betti == r.betti
            && self.torsion == r.torsion
            && self.holonomy == r.holonomy
    }

    fn matches_calabi(&self, c: &CalabiSummary) -> bool {
        let i_ok = match c.i_name.as_str() {
            ITSELF => self.i_fiber == self.name,
            other => self.i_fiber == other,
        };
        let j_ok = match &c.j {
            JData::Label(l) => self.j_label == *l,
            JData::Computed { torsion_free: false, .. } => !is_manifold_label(&self.j_label),
            JData::Computed { names, .. } if names.iter().any(|n| n == ITSELF) => self.j_label == self.name,
            JData::Computed { names, .. } => is_manifold_label(&self.j_label) && names.contains(&self.j_label),
        };
        i_ok && j_ok && c.structure.as_ref().map_or(true, |s| self.structure == *s)
    }
}

/// Whether a J(M) label names a flat manifold rather than an orbifold.
pub fn is_manifold_label(s: &str) -> bool {
    if matches!(s, "E0" | "S1" | "T2" | "K2") {
        return true;
    }
    let mut parts = s.splitn(2, '_');
    let head = parts.next().unwrap_or("");
    let tail = parts.next().unwrap_or("");
    (head.starts_with('O') || head.starts_with('N'))
        && head.len() > 1
        && head[1..].chars().all(|c| c.is_ascii_digit())
        && !tail.is_empty()
        && tail.chars().all(|c| c.is_ascii_digit())
}

const ITSELF: &str = "<itself>";

/// What is known about `J(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JData {
    /// Computed from a group: orbifold, or a manifold with candidate names.
    Computed { torsion_free: bool, names: Vec<String> },
    /// An opaque atlas label, compared for equality.
    Label(String),
}

/// Calabi data reduced to names and labels, for identification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CalabiSummary {
    pub i_name: String,
    pub structure: Option<GroupLabel>,
    pub j: JData,
    pub j_betti: usize,
    pub spans_agree: bool,
}

impl CalabiSummary {
    /// A query from atlas-style labels rather than a computed group.
    pub fn from_labels(i_name: &str, j_label: &str, structure: Option<GroupLabel>) -> Self {
        CalabiSummary {
            i_name: i_name.to_string(),
            structure,
            j: JData::Label(j_label.to_string()),
            j_betti: 0,
            spans_agree: true,
        }
    }
}

impl fmt::Display for CalabiSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = if self.i_name == ITSELF { "itself" } else { &self.i_name };
        let j = match &self.j {
            JData::Computed { torsion_free: false, .. } => "orbifold".to_string(),
            JData::Computed { names, .. } => names.join("|").replace(ITSELF, "itself"),
            JData::Label(l) => l.clone(),
        };
        let s = self.structure.as_ref().map_or("?".to_string(), ToString::to_string);
        write!(f, "I={i} structure={s} J={j} betti(J)={}", self.j_betti)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    Circle,
    Interval,
}

/// One row of a fibration table.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub table: u32,
    pub no: u32,
    pub manifold: String,
    pub fiber: String,
    pub base: Base,
    pub group: String,
    pub m: usize,
    pub beta: AffineMap,
    pub gamma: Option<AffineMap>,
    pub singular: Option<(String, String)>,
}

impl TableRow {
    /// Order of the structure group named in the row.
    pub fn structure_order(&self) -> usize {
        match self.base {
            Base::Circle => self.m,
            Base::Interval => 2 * self.m,
        }
    }

    /// Dimension of the fiber, read from its name.
    pub fn fiber_dim(&self) -> usize {
        self.fiber[1..2].parse().unwrap_or(2)
    }

    pub fn fibering(&self) -> crate::classify::Fibering {
        crate::classify::Fibering { beta: self.beta.clone(), gamma: self.gamma.clone(), order: self.m }
    }
}

/// The loaded data set.
#[derive(Clone, Debug)]
pub struct Atlas {
    entries: Vec<AtlasEntry>,
    tables: BTreeMap<u32, Vec<TableRow>>,
    groups: BTreeMap<String, (usize, Vec<AffineMap>)>,
    source: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn manifest_entries(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once(char::is_whitespace).map(|(h, p)| (p.trim().to_string(), h.to_string())))
        .collect()
}

impl Atlas {
    /// The data directory named by the environment, or the embedded copy.
    pub fn load() -> Result<Atlas, AtlasError> {
        match std::env::var_os(ATLAS_DIR_ENV) {
            Some(dir) => Atlas::from_dir(Path::new(&dir)),
            None => Atlas::embedded(),
        }
    }

    pub fn embedded() -> Result<Atlas, AtlasError> {
        let files: Vec<(String, String)> = FILES.iter().map(|(p, c)| (p.to_string(), c.to_string())).collect();
        Atlas::from_files(MANIFEST, files, "embedded".into())
    }

    pub fn from_dir(dir: &Path) -> Result<Atlas, AtlasError> {
        let read = |p: PathBuf| {
            std::fs::read_to_string(&p).map_err(|e| AtlasError::Io { path: p.display().to_string(), msg: e.to_string() })
        };
        let manifest = read(dir.join("MANIFEST"))?;
        let files = manifest_entries(&manifest)
            .into_iter()
            .map(|(p, _)| Ok((p.clone(), read(dir.join(&p))?)))
            .collect::<Result<Vec<_>, AtlasError>>()?;
        Atlas::from_files(&manifest, files, dir.display().to_string())
    }

    fn from_files(manifest: &str, files: Vec<(String, String)>, source: String) -> Result<Atlas, AtlasError> {
        let sums: BTreeMap<String, String> = manifest_entries(manifest).into_iter().collect();
        let mut atlas = Atlas { entries: Vec::new(), tables: BTreeMap::new(), groups: BTreeMap::new(), source };
        for (path, text) in &files {
            match sums.get(path) {
                Some(h) if *h == sha256_hex(text.as_bytes()) => {}
                _ => return Err(AtlasError::Checksum(path.clone())),
            }
            if path == "manifolds.tsv" {
                atlas.entries = parse_manifolds(text)?;
            } else if let Some(name) = path.strip_prefix("groups/").and_then(|p| p.strip_suffix(".grp")) {
                let g = parse_group(text).map_err(|e| AtlasError::Parse { file: path.clone(), line: 0, msg: e.to_string() })?;
                atlas.groups.insert(name.to_string(), g);
            } else if let Some(id) = path.strip_prefix("tables/table-").and_then(|p| p.strip_suffix(".tsv")) {
                let id: u32 = id.parse().map_err(|_| AtlasError::UnknownName(path.clone()))?;
                atlas.tables.insert(id, parse_table(id, path, text)?);
            }
        }
        Ok(atlas)
    }

    /// Where the data was read from.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn entries(&self) -> &[AtlasEntry] {
        &self.entries
    }

    pub fn entry(&self, name: &str) -> Result<&AtlasEntry, AtlasError> {
        self.entries.iter().find(|e| e.name == name).ok_or_else(|| AtlasError::UnknownName(name.into()))
    }

    pub fn table_ids(&self) -> Vec<u32> {
        self.tables.keys().copied().collect()
    }

    pub fn load_table(&self, id: u32) -> Result<&[TableRow], AtlasError> {
        self.tables.get(&id).map(Vec::as_slice).ok_or_else(|| AtlasError::UnknownName(format!("table {id}")))
    }

    pub fn all_rows(&self) -> Vec<&TableRow> {
        self.tables.values().flatten().collect()
    }

    pub fn group_names(&self) -> Vec<&str> {
        self.groups.keys().map(String::as_str).collect()
    }

    pub fn group_generators(&self, name: &str) -> Result<&(usize, Vec<AffineMap>), AtlasError> {
        self.groups.get(name).ok_or_else(|| AtlasError::UnknownName(name.into()))
    }

    pub fn load_group(&self, name: &str) -> Result<SpaceGroup, AtlasError> {
        let (n, gens) = self.group_generators(name)?;
        Ok(SpaceGroup::close(*n, gens, crate::spacegroup::DEFAULT_CLOSURE_CAP)?)
    }

    /// Names of all entries consistent with the record and, if given, the Calabi data.
    pub fn identify(&self, record: &InvariantRecord, calabi: Option<&CalabiSummary>) -> Result<Vec<String>, AtlasError> {
        let names: Vec<String> = self
            .entries
            .iter()
            .filter(|e| e.matches_record(record) && calabi.map_or(true, |c| e.matches_calabi(c)))
            .map(|e| e.name.clone())
            .collect();
        if names.is_empty() {
            let extra = calabi.map(|c| format!(" {c}")).unwrap_or_default();
            return Err(AtlasError::EmptyCandidateSet(format!("{record}{extra}")));
        }
        Ok(names)
    }

    /// Identification of a Bieberbach group using its invariants and Calabi data.
    pub fn identify_group(&self, g: &SpaceGroup) -> Result<Vec<String>, AtlasError> {
        let record = g.invariant_record()?;
        let calabi = self.calabi_summary(g)?;
        let names = self.identify(&record, Some(&calabi))?;
        if record.orientable {
            return Ok(names);
        }
        // the orientation double cover separates pairs such as N4_45 / N4_46
        let covers = self.identify_group(&g.orientation_double_cover()?)?;
        let refined: Vec<String> = names
            .into_iter()
            .filter(|n| self.entry(n).ok().and_then(|e| e.odc.as_ref()).map_or(false, |o| covers.contains(o)))
            .collect();
        if refined.is_empty() {
            return Err(AtlasError::EmptyCandidateSet(format!("{record} {calabi} with double cover {covers:?}")));
        }
        Ok(refined)
    }

    /// Name of a group of dimension ≤ 3, where invariants alone determine the type.
    pub fn name_low_dim(&self, g: &SpaceGroup) -> Result<String, AtlasError> {
        match g.dim() {
            0 => return Ok("E0".into()),
            1 => return Ok("S1".into()),
            _ => {}
        }
        let record = g.invariant_record()?;
        let mut names = self.identify(&record, None)?;
        if names.len() != 1 {
            return Err(AtlasError::EmptyCandidateSet(format!("{record} is ambiguous: {names:?}")));
        }
        Ok(names.remove(0))
    }

    pub fn calabi_summary(&self, g: &SpaceGroup) -> Result<CalabiSummary, AtlasError> {
        let data = calabi_data(g)?;
        let n = g.dim();
        let k = data.i_group.dim();
        let i_name = if k == n && n > 1 { ITSELF.to_string() } else { self.name_low_dim(&data.i_group)? };
        let j = &data.j_group;
        let j_torsion_free = j.is_torsion_free();
        let j_names = if !j_torsion_free {
            Vec::new()
        } else if k == n && n > 1 {
            vec![ITSELF.to_string()]
        } else {
            vec![self.name_low_dim(j)?]
        };
        Ok(CalabiSummary {
            i_name,
            structure: Some(data.structure_group.group.label().map_err(SpaceGroupError::from)?),
            j: JData::Computed { torsion_free: j_torsion_free, names: j_names },
            j_betti: j.betti_via_fixed_space(),
            spans_agree: data.spans_agree,
        })
    }
}

fn parse_manifolds(text: &str) -> Result<Vec<AtlasEntry>, AtlasError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| AtlasError::Parse { file: "manifolds.tsv".into(), line: no + 1, msg };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 12 {
            return Err(err(format!("expected 12 columns, found {}", f.len())));
        }
        let opt = |s: &str| (s != "-").then(|| s.to_string());
        let label = |s: &str| GroupLabel::from_str(s).map_err(err);
        out.push(AtlasEntry {
            name: f[0].into(),
            dim: f[1].parse().map_err(|_| err(format!("bad dim {}", f[1])))?,
            orientable: match f[2] {
                "Y" => true,
                "N" => false,
                s => return Err(err(format!("bad orientability {s}"))),
            },
            i_fiber: f[3].into(),
            j_label: f[4].into(),
            structure: label(f[5])?,
            betti: f[6].parse().map_err(|_| err(format!("bad betti {}", f[6])))?,
            torsion: if f[7] == "-" {
                Vec::new()
            } else {
                f[7].split(',').map(|x| x.parse().map_err(|_| err(format!("bad torsion {x}")))).collect::<Result<_, _>>()?
            },
            holonomy: label(f[8])?,
            odc: opt(f[9]),
            bbnwz: opt(f[10]),
            it_number: opt(f[11]),
        });
    }
    Ok(out)
}

fn parse_table(id: u32, path: &str, text: &str) -> Result<Vec<TableRow>, AtlasError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| AtlasError::Parse { file: path.into(), line: no + 1, msg };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 8 {
            return Err(err(format!("expected 8 columns, found {}", f.len())));
        }
        let base = match f[3] {
            "S1" => Base::Circle,
            "I" => Base::Interval,
            s => return Err(err(format!("bad base {s}"))),
        };
        let m: usize = f[4][1..].parse().map_err(|_| err(format!("bad group {}", f[4])))?;
        let expected_prefix = if base == Base::Circle { 'C' } else { 'D' };
        if !f[4].starts_with(expected_prefix) {
            return Err(err(format!("group {} does not fit the base", f[4])));
        }
        let gamma = if f[6] == "-" { None } else { Some(parse_affine(f[6]).map_err(err)?) };
        if (base == Base::Interval) != gamma.is_some() {
            return Err(err("interval rows need two representatives".into()));
        }
        let singular = match f[7] {
            "-" => None,
            s => {
                let (a, b) = s.split_once(',').ok_or_else(|| err(format!("bad singular fibers {s}")))?;
                Some((a.to_string(), b.to_string()))
            }
        };
        out.push(TableRow {
            table: id,
            no: f[0].parse().map_err(|_| err(format!("bad row number {}", f[0])))?,
            manifold: f[1].into(),
            fiber: f[2].into(),
            base,
            group: f[4].into(),
            m,
            beta: parse_affine(f[5]).map_err(err)?,
            gamma,
            singular,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_loads() {
        let a = Atlas::embedded().unwrap();
        assert_eq!(a.load_table(6).unwrap().len(), 7);
        let interval: usize = (12..=14).map(|t| a.load_table(t).unwrap().len()).sum();
        assert_eq!(interval, 43);
        assert_eq!(a.entries().iter().filter(|e| e.dim == 4).count(), 74);
        let o31 = a.load_group("O3_1").unwrap();
        assert_eq!(o31.point_group_order(), 1);
        assert!(matches!(a.load_group("O9_9"), Err(AtlasError::UnknownName(_))));
    }

    #[test]
    fn manifold_labels() {
        for s in ["E0", "O3_6", "N4_44", "T2"] {
            assert!(is_manifold_label(s), "{s}");
        }
        for s in ["I", "22*", "2222", "20", "*2222", "O3"] {
            assert!(!is_manifold_label(s), "{s}");
        }
    }

    #[test]
    fn checksum_is_enforced() {
        let mut files: Vec<(String, String)> = FILES.iter().map(|(p, c)| (p.to_string(), c.to_string())).collect();
        files[0].1.push('\n');
        assert!(matches!(Atlas::from_files(MANIFEST, files, "test".into()), Err(AtlasError::Checksum(_))));
    }
}
