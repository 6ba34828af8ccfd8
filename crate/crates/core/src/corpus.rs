//! Golden examples shipped as JSON assets, and a runner that re-checks them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{verify_design, Mode, WeightedDesign};
use crate::hilbert::{orbit_forms, verify_identity, HilbertIdentity, HilbertTerm};
use crate::lattice::{d4_shell, e_shell_design, D4Kind};
use crate::orbits::GcvOrbit;
use crate::scalars::ExactScalar;
use crate::search::{refine_design, RefineOptions};
use crate::simplex::{sphere_to_simplex, verify_simplex_cubature};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{anchor}: {source}")]
    Parse { anchor: String, source: serde_json::Error },
    #[error("no corpus entry named {0}")]
    Unknown(String),
}

macro_rules! assets {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../assets/corpus/", $name, ".json")))),*]
    };
}

/// `(anchor, json)` for every checked-in example.
pub const ASSETS: &[(&str, &str)] = assets!(
    "ex2_2_octagon",
    "ex2_2_dodecagon",
    "ex2_3_octahedron",
    "ex2_3_midpoints",
    "eq_schur",
    "eq_schur1",
    "ex2_8_octahedron_simplex",
    "ex2_8_midpoints_simplex",
    "table2_row1",
    "table2_row2",
    "sec6_11design_n4",
    "sec6_13design_1",
    "sec6_13design_2",
    "sec6_11design_n3",
    "sec6_heo_xu",
    "ex7_1_d4_2",
    "ex7_1_d4_6",
    "ex7_1_d4prime_2",
    "ex7_1_d4prime_6",
    "thm7_2_e2",
);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityGroup {
    pub base: Vec<i64>,
    pub coef: ExactScalar,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShellOrbit {
    #[serde(rename = "A")]
    pub a2: ExactScalar,
    pub s: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Check {
    /// Exact verification at `degree`, optionally failing at `degree + 1`.
    Design {
        design: WeightedDesign,
        degree: u32,
        #[serde(default)]
        fails_next: bool,
    },
    /// Newton refinement of rounded parameters to a float residual.
    Refine {
        design: WeightedDesign,
        degree: u32,
        target: f64,
        #[serde(default)]
        expect_failure: bool,
    },
    /// A Hilbert identity given by orbit groups of integer forms.
    Identity { n: usize, t: u32, c: ExactScalar, groups: Vec<IdentityGroup> },
    /// The simplex image of a design, exact at `(sphere_degree - 1)/2`
    /// and failing one degree higher.
    Simplex { design: WeightedDesign, sphere_degree: u32, nodes: usize },
    /// A D4-family shell: point count and orbit decomposition.
    Shell { lattice: String, norm: ExactScalar, points: usize, orbits: Vec<ShellOrbit> },
    /// `E_{2m}` normalized with equal weights.
    EShell { m: i64, degree: u32 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub anchor: String,
    pub description: String,
    #[serde(flatten)]
    pub check: Check,
}

impl CorpusEntry {
    pub fn parse(anchor: &str, json: &str) -> Result<Self, CorpusError> {
        serde_json::from_str(json).map_err(|source| CorpusError::Parse { anchor: anchor.to_string(), source })
    }

    /// The design carried by the entry, if any.
    pub fn design(&self) -> Option<&WeightedDesign> {
        match &self.check {
            Check::Design { design, .. } | Check::Refine { design, .. } | Check::Simplex { design, .. } => Some(design),
            _ => None,
        }
    }
}

pub fn load_all() -> Result<Vec<CorpusEntry>, CorpusError> {
    ASSETS.iter().map(|(a, j)| CorpusEntry::parse(a, j)).collect()
}

pub fn load(anchor: &str) -> Result<CorpusEntry, CorpusError> {
    let (a, j) = ASSETS.iter().find(|(a, _)| *a == anchor).ok_or_else(|| CorpusError::Unknown(anchor.to_string()))?;
    CorpusEntry::parse(a, j)
}

/// Builds the identity of an [`Check::Identity`] entry.
pub fn identity_from_groups(n: usize, t: u32, c: &ExactScalar, groups: &[IdentityGroup]) -> HilbertIdentity {
    let mut terms = Vec::new();
    for (g, grp) in groups.iter().enumerate() {
        for f in orbit_forms(&grp.base) {
            terms.push(HilbertTerm { coef: grp.coef.clone(), form: f.into_iter().map(ExactScalar::int).collect(), group: g });
        }
    }
    HilbertIdentity { n, t, c: c.clone(), terms }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub anchor: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(e: &CorpusEntry, passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { anchor: e.anchor.clone(), passed, detail: detail.into() }
}

/// Re-checks one entry; `passed` means the recorded expectation holds.
pub fn run_entry(e: &CorpusEntry) -> Outcome {
    match &e.check {
        Check::Design { design, degree, fails_next } => {
            let upto = degree + u32::from(*fails_next);
            match verify_design(design, upto, Mode::Exact) {
                Ok(r) => {
                    let ok = r.verified_degree.is_some_and(|v| v >= *degree) && (!fails_next || !r.passed());
                    let next = if *fails_next { format!(", fails {upto}") } else { String::new() };
                    outcome(e, ok, format!("verified degree {}{next}", r.verified_degree.map_or("none".into(), |v| v.to_string())))
                }
                Err(err) => outcome(e, false, err.to_string()),
            }
        }
        Check::Refine { design, degree, target, expect_failure } => {
            let opts = RefineOptions { target: target / 10.0, ..RefineOptions::default() };
            let got = refine_design(design, *degree, opts).and_then(|r| {
                let rep = verify_design(&r.design, *degree, Mode::Float { tol: *target, bits: 256 })?;
                Ok((r, rep))
            });
            match (got, expect_failure) {
                (Ok((r, rep)), false) => outcome(
                    e,
                    rep.passed() && r.final_residual < *target,
                    format!("refined {:.3e} -> {:.3e} in {} steps", r.initial_residual, r.final_residual, r.iterations),
                ),
                (Ok((r, _)), true) => outcome(e, false, format!("expected rejection, refined to {:.3e}", r.final_residual)),
                (Err(err), true) => outcome(e, true, format!("rejected as recorded: {err}")),
                (Err(err), false) => outcome(e, false, err.to_string()),
            }
        }
        Check::Identity { n, t, c, groups } => {
            let h = identity_from_groups(*n, *t, c, groups);
            match verify_identity(&h) {
                Ok(r) => outcome(e, r.passed, format!("{} terms, {} monomials, {} failures", h.terms.len(), r.monomials_checked, r.failures.len())),
                Err(err) => outcome(e, false, err.to_string()),
            }
        }
        Check::Simplex { design, sphere_degree, nodes } => {
            let run = || -> Result<(bool, String), String> {
                let sc = sphere_to_simplex(design, *sphere_degree).map_err(|x| x.to_string())?;
                let r = verify_simplex_cubature(&sc, sc.degree + 1).map_err(|x| x.to_string())?;
                let ok = sc.nodes.len() == *nodes && r.verified_degree == Some(sc.degree);
                Ok((ok, format!("{} nodes, simplex degree {}", sc.nodes.len(), r.verified_degree.map_or("none".into(), |v| v.to_string()))))
            };
            match run() {
                Ok((ok, d)) => outcome(e, ok, d),
                Err(d) => outcome(e, false, d),
            }
        }
        Check::Shell { lattice, norm, points, orbits } => {
            let kind: D4Kind = match lattice.parse() {
                Ok(k) => k,
                Err(err) => return outcome(e, false, format!("{err}")),
            };
            let Some(r) = norm.as_rational() else { return outcome(e, false, "norm must be rational") };
            let shell = d4_shell(kind, r);
            let mut want: Vec<GcvOrbit> = match orbits.iter().map(|o| GcvOrbit::new(4, o.a2.clone(), o.s)).collect() {
                Ok(v) => v,
                Err(err) => return outcome(e, false, err.to_string()),
            };
            let mut got = shell.orbits.clone();
            let key = |o: &GcvOrbit| (o.s(), o.a2().to_string());
            want.sort_by_key(key);
            got.sort_by_key(key);
            outcome(e, shell.points.len() == *points && got == want && shell.other.is_empty(), format!("{} points, {} orbits", shell.points.len(), got.len()))
        }
        Check::EShell { m, degree } => match e_shell_design(*m).map_err(|x| x.to_string()).and_then(|d| verify_design(&d, *degree, Mode::Exact).map_err(|x| x.to_string())) {
            Ok(r) => outcome(e, r.passed(), format!("verified degree {}", r.verified_degree.map_or("none".into(), |v| v.to_string()))),
            Err(d) => outcome(e, false, d),
        },
    }
}
