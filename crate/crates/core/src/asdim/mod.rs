//! Asymptotic-dimension witnesses at a fixed scale: construction,
//! certification, the cover/multiplicity/Lebesgue pipeline, scale graphs and
//! a brute-force oracle for tiny windows.
//!
//! A witness for `asdim <= n` at `(r, t)` is `n + 1` families, each
//! `(r, t)`-disjoint, whose union covers the window and is uniformly bounded
//! at some explicit `bound_params`. Nothing here claims a statement about
//! all scales or about the whole (infinite) space.

mod construct;
mod graph;
mod pipeline;

pub use construct::{
    construct_witness, integer_blocks_witness, restrict_witness, translate_metric_witness, witness_bounded,
    witness_non_archimedean, witness_ratio_recursion, witness_reciprocal_head, zero_dim_from_refinement, BoundSearch,
    RatioRecursion, ReciprocalHead,
};
pub use graph::{oracle_min_families, scale_graph, OracleResult, ScaleGraphReport, ORACLE_MAX_POINTS};
pub use pipeline::{
    asdim_to_multiplicity_cover, derive_params, lebesgue_refinement_check, multiplicity_to_lebesgue_cover,
    run_pipeline, LebesgueCover, PipelineOutcome,
};

use serde::{Deserialize, Serialize};

use crate::covers::{bounded_record, disjoint_record, family_max_cross_pair, family_min_pair, Cover, Family};
use crate::error::Result;
use crate::point::{PointSet, Window};
use crate::report::{CertReport, Record};
use crate::space::{FuzzyMetricSpace, ScaleParams};

/// `n + 1` families claimed to be `(r, t)`-disjoint at `params`, covering
/// `window`, with union uniformly bounded at `bound_params`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionWitness {
    pub n: usize,
    pub params: ScaleParams,
    pub bound_params: ScaleParams,
    pub window: Window,
    pub families: Vec<Family>,
    /// How the witness was obtained: constructor name, derived quantities,
    /// degradations.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl DimensionWitness {
    pub fn new(
        n: usize,
        params: ScaleParams,
        bound_params: ScaleParams,
        window: Window,
        families: Vec<Family>,
    ) -> Self {
        DimensionWitness {
            n,
            params,
            bound_params,
            window,
            families,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// The union of all families as a cover.
    pub fn cover(&self) -> Cover {
        Cover::new(self.families.clone())
    }

    /// All families merged into one; used to exhibit disjointness failures.
    pub fn merged(&self) -> DimensionWitness {
        let sets: Vec<PointSet> = self.families.iter().flat_map(|f| f.sets().iter().cloned()).collect();
        DimensionWitness {
            n: 0,
            families: vec![Family::new("merged", sets)],
            notes: vec!["families merged into one".into()],
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }
}

/// Certifies `w`: family count, containment in the window, cover of the
/// window, `(r, t)`-disjointness of each family and uniform boundedness of
/// the union at `bound_params`. Failures carry the extremal pair.
pub fn verify_witness(space: &FuzzyMetricSpace, w: &DimensionWitness) -> Result<CertReport> {
    space.validate_window(&w.window)?;
    for f in &w.families {
        space.validate_points(f.sets().iter().flatten())?;
    }
    let mut report = CertReport::new(format!("witness:{}:n={}", space.kind(), w.n));
    report.push(Record::verdict("family-count", w.families.len() == w.n + 1).value(
        "families",
        crate::rational::Rational::from_int(w.families.len() as i128),
    ));

    let outside = w
        .families
        .iter()
        .flat_map(|f| f.sets().iter().flatten())
        .find(|p| !w.window.contains(p));
    report.push(match outside {
        None => Record::pass("within-window").window(&w.window),
        Some(p) => Record::fail("within-window").window(&w.window).witness([p.clone()]),
    });

    let cover = w.cover();
    report.push(match cover.uncovered(&w.window) {
        None => Record::pass("cover").window(&w.window),
        Some(p) => Record::fail("cover").window(&w.window).witness([p]),
    });

    for (i, f) in w.families.iter().enumerate() {
        let max = family_max_cross_pair(space, f, w.params.t());
        let mut rec = disjoint_record(&format!("disjoint[{i}]"), max, w.params).window(&w.window);
        if rec.note.is_none() {
            rec = rec.note(format!("family {}", f.label));
        }
        report.push(rec);
    }

    let union = Family::new("union", w.families.iter().flat_map(|f| f.sets().iter().cloned()));
    let min = family_min_pair(space, &union, w.bound_params.t());
    let mut rec = bounded_record("bounded", min, w.bound_params).window(&w.window);
    if !w.notes.is_empty() {
        rec = rec.note(w.notes.join("; "));
    }
    report.push(rec);
    Ok(report)
}

#[cfg(test)]
mod tests;
