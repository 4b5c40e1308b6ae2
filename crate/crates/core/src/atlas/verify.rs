use rayon::prelude::*;

use crate::fibration::{
    action_kernel, build_circle_total, build_interval_total, quotient_1orbifold_type, singular_fibers,
    structure_group, NormalSubgroupData, OrbifoldType,
};
use crate::spacegroup::SpaceGroup;

use super::{Atlas, AtlasError, Base, TableRow};

/// Outcome of one named check on one table row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReport {
    pub table: u32,
    pub no: u32,
    pub manifold: String,
    pub checks: Vec<Check>,
}

impl RowReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Check names in report order.
pub const CHECKS: &[&str] = &[
    "build",
    "torsion_free",
    "fiber_complete",
    "fiber_identified",
    "quotient_type",
    "structure_order",
    "homology",
    "holonomy",
    "singular_fibers",
    "calabi",
    "identify",
    "odc",
];

struct Recorder(Vec<Check>);

impl Recorder {
    fn push(&mut self, name: &'static str, pass: bool, detail: impl Into<String>) {
        self.0.push(Check { name, pass, detail: detail.into() });
    }

    fn result<T>(&mut self, name: &'static str, r: Result<T, AtlasError>, f: impl FnOnce(T) -> (bool, String)) {
        match r {
            Ok(v) => {
                let (pass, detail) = f(v);
                self.push(name, pass, detail);
            }
            Err(e) => self.push(name, false, e.to_string()),
        }
    }
}

pub fn build_row(atlas: &Atlas, row: &TableRow, cap: usize) -> Result<(SpaceGroup, NormalSubgroupData), AtlasError> {
    let fiber = atlas.load_group(&row.fiber)?;
    Ok(match (&row.base, &row.gamma) {
        (Base::Circle, _) => build_circle_total(&fiber, &row.beta, row.m, cap)?,
        (Base::Interval, Some(gamma)) => build_interval_total(&fiber, &row.beta, gamma, row.m, cap)?,
        (Base::Interval, None) => unreachable!("parser rejects interval rows without γ"),
    })
}

/// Builds the total group of a row and checks it against the claimed manifold.
pub fn verify_row(atlas: &Atlas, row: &TableRow, cap: usize) -> RowReport {
    let mut rec = Recorder(Vec::new());
    let report = |checks| RowReport { table: row.table, no: row.no, manifold: row.manifold.clone(), checks };
    let (g, n) = match build_row(atlas, row, cap) {
        Ok(x) => x,
        Err(e) => {
            rec.push("build", false, e.to_string());
            for name in &CHECKS[1..] {
                rec.push(name, false, "not built");
            }
            return report(rec.0);
        }
    };
    rec.push("build", true, format!("|P| = {}", g.point_group_order()));
    rec.push("torsion_free", g.is_torsion_free(), "");
    rec.push("fiber_complete", n.is_complete(), "");
    let fiber_name = n.fiber().map_err(AtlasError::from).and_then(|f| atlas.name_low_dim(&f));
    rec.result("fiber_identified", fiber_name, |name| (name == row.fiber, name));

    let want = match row.base {
        Base::Circle => OrbifoldType::InfiniteCyclic,
        Base::Interval => OrbifoldType::InfiniteDihedral,
    };
    let got = quotient_1orbifold_type(&n);
    rec.push("quotient_type", got == want, format!("{got:?}"));

    let order = action_kernel(&g, &n.v)
        .map_err(AtlasError::from)
        .and_then(|k| structure_group(&g, &n.sub, &k).map_err(AtlasError::from));
    rec.result("structure_order", order, |s| (s.order() == row.structure_order(), s.order().to_string()));

    let entry = atlas.entry(&row.manifold);
    let record = g.invariant_record().map_err(AtlasError::from);
    match (&entry, &record) {
        (Ok(e), Ok(r)) => {
            rec.push("homology", e.betti == r.betti && e.torsion == r.torsion, format!("betti {} torsion {:?}", r.betti, r.torsion));
            rec.push("holonomy", e.holonomy == r.holonomy && e.orientable == r.orientable, format!("{} orientable={}", r.holonomy, r.orientable));
        }
        (Err(e), _) | (_, Err(e)) => {
            rec.push("homology", false, e.to_string());
            rec.push("holonomy", false, e.to_string());
        }
    }

    match (&row.gamma, &row.singular) {
        (Some(gamma), Some((a, b))) => {
            let names = atlas.load_group(&row.fiber).and_then(|m| {
                let (p, q) = singular_fibers(&m, &row.beta, gamma, cap)?;
                Ok((atlas.name_low_dim(&p)?, atlas.name_low_dim(&q)?))
            });
            rec.result("singular_fibers", names, |(p, q)| {
                let pass = (p == *a && q == *b) || (p == *b && q == *a);
                (pass, format!("{p},{q}"))
            });
        }
        (None, None) => rec.push("singular_fibers", true, "none"),
        _ => rec.push("singular_fibers", false, "singular fiber column does not fit the base"),
    }

    let calabi = atlas.calabi_summary(&g);
    rec.result("calabi", calabi, |c| {
        let pass = c.spans_agree && c.j_betti == 0;
        (pass, c.to_string())
    });

    rec.result("identify", atlas.identify_group(&g), |names| (names.contains(&row.manifold), names.join("|")));

    match &entry {
        Ok(e) => match &e.odc {
            None => rec.push("odc", g.is_orientable(), "orientable"),
            Some(want) => {
                let got = g
                    .orientation_double_cover()
                    .map_err(AtlasError::from)
                    .and_then(|d| atlas.identify_group(&d));
                rec.result("odc", got, |names| (names.contains(want), names.join("|")));
            }
        },
        Err(err) => rec.push("odc", false, err.to_string()),
    }
    report(rec.0)
}

/// Verifies rows in parallel; the output keeps the input order.
pub fn verify_rows(atlas: &Atlas, rows: &[&TableRow], cap: usize) -> Vec<RowReport> {
    rows.par_iter().map(|r| verify_row(atlas, r, cap)).collect()
}
