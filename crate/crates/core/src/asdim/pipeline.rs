//! The chain witness -> finite-multiplicity cover -> Lebesgue cover ->
//! refinement check, each step at explicit parameters.

use super::{verify_witness, DimensionWitness};
use crate::covers::{
    family_min_pair, lebesgue_failure, multiplicity_at, neighborhood_family, refinement_failure, rt_multiplicity_at,
    Cover, Family, NeighborhoodBound,
};
use crate::error::{Error, Result};
use crate::point::Window;
use crate::rational::Rational;
use crate::report::{CertReport, Record};
use crate::space::{FuzzyMetricSpace, ScaleParams};
use crate::tnorm::{TNorm, TNormRule};

/// The scale one step up the chain: `t' = 2t` and
/// `1 - r' = ((1 - r) * (1 - r)) / 2`, so that `1 - r' < (1 - r) * (1 - r)`.
pub fn derive_params(tnorm: TNorm, params: ScaleParams) -> Result<ScaleParams> {
    let c = params.threshold();
    let half = tnorm.apply(c, c) / Rational::from_int(2);
    if !half.is_positive() {
        return Err(Error::Derivation(format!(
            "(1 - r) {tnorm} (1 - r) = 0 at r = {}; no smaller scale exists",
            params.r()
        )));
    }
    ScaleParams::new(half.complement(), params.t() + params.t())
}

/// A witness at `derive_params(params)` read as a cover; its `(r, t)`-
/// multiplicity is at most `n + 1`.
pub fn asdim_to_multiplicity_cover(
    space: &FuzzyMetricSpace,
    w: &DimensionWitness,
    params: ScaleParams,
) -> Result<(Cover, CertReport)> {
    let derived = derive_params(space.tnorm, params)?;
    if w.params != derived {
        return Err(Error::Precondition(format!(
            "witness is at ({}), the multiplicity step at ({params}) needs ({derived})",
            w.params
        )));
    }
    let mut report = CertReport::new(format!("multiplicity-cover:{params}"));
    report.absorb(verify_witness(space, w)?);
    let cover = w.cover();
    report.push(multiplicity_record(space, &cover, params, &w.window, w.n + 1)?);
    Ok((cover, report))
}

fn multiplicity_record(
    space: &FuzzyMetricSpace,
    cover: &Cover,
    params: ScaleParams,
    window: &Window,
    limit: usize,
) -> Result<Record> {
    let (m, at) = rt_multiplicity_at(space, cover, params, window)?;
    let mut rec = Record::verdict("rt-multiplicity", m <= limit)
        .params(params)
        .window(window)
        .value("measured", Rational::from_int(m as i128))
        .value("limit", Rational::from_int(limit as i128));
    if let Some(p) = at {
        rec = rec.witness([p]);
    }
    Ok(rec)
}

/// A cover with Lebesgue pair `params` and multiplicity at most `n + 1`.
#[derive(Clone, Debug)]
pub struct LebesgueCover {
    pub cover: Cover,
    /// Chain bound shared by every output member.
    pub bound: NeighborhoodBound,
    pub report: CertReport,
}

/// From a cover bounded at `cover_bound` with `(r', t')`-multiplicity at most
/// `n + 1` (where `(r', t') = derive_params(params)`), builds
/// `{N_{r',t'}(U)}`, which has Lebesgue pair `params` and multiplicity at
/// most `n + 1`.
pub fn multiplicity_to_lebesgue_cover(
    space: &FuzzyMetricSpace,
    cover: &Cover,
    cover_bound: ScaleParams,
    params: ScaleParams,
    window: &Window,
    n: usize,
) -> Result<LebesgueCover> {
    let derived = derive_params(space.tnorm, params)?;
    let (m, at) = rt_multiplicity_at(space, cover, derived, window)?;
    if m > n + 1 {
        return Err(Error::Precondition(format!(
            "({derived})-multiplicity is {m} at {}, above n + 1 = {}",
            at.map_or("-".to_string(), |p| p.to_string()),
            n + 1
        )));
    }
    if let Some(e) = cover
        .families
        .iter()
        .filter_map(|f| family_min_pair(space, f, cover_bound.t()))
        .find(|e| e.value <= cover_bound.threshold())
    {
        return Err(Error::Precondition(format!(
            "cover is not bounded at ({cover_bound}): M({}, {}) = {}",
            e.x, e.y, e.value
        )));
    }

    let mut report = CertReport::new(format!("lebesgue-cover:{params}"));
    let mut families = Vec::new();
    let mut bound = None;
    for f in &cover.families {
        let (out, b, rep) = neighborhood_family(space, f, derived, cover_bound, window)?;
        report.absorb(rep);
        families.push(out);
        bound = Some(b);
    }
    let bound = bound.ok_or_else(|| Error::Precondition("cover has no families".into()))?;
    let out = Cover::new(families);

    report.push(match out.uncovered(window) {
        None => Record::pass("covers").window(window),
        Some(p) => Record::fail("covers").window(window).witness([p]),
    });
    if out.covers_window(window) {
        let fail = lebesgue_failure(space, &out, params, window)?;
        let mut rec = Record::verdict("lebesgue-pair", fail.is_none())
            .params(params)
            .window(window);
        if let Some(p) = fail {
            rec = rec.witness([p]);
        }
        report.push(rec);
    }
    let (mult, at) = multiplicity_at(&out, window);
    let mut rec = Record::verdict("multiplicity", mult <= n + 1)
        .window(window)
        .value("measured", Rational::from_int(mult as i128))
        .value("limit", Rational::from_int(n as i128 + 1));
    if let Some(p) = at {
        rec = rec.witness([p]);
    }
    report.push(rec);
    Ok(LebesgueCover {
        cover: out,
        bound,
        report,
    })
}

/// Certifies that a cover `u` bounded at `params` refines a cover `v` with
/// Lebesgue pair `params`: each `U` sits in a ball `B(u, r, t)`, which sits
/// in some member of `v`.
pub fn lebesgue_refinement_check(
    space: &FuzzyMetricSpace,
    u: &Cover,
    v: &Cover,
    params: ScaleParams,
    window: &Window,
) -> Result<CertReport> {
    if let Some(p) = u.members().flatten().find(|p| !window.contains(p)) {
        return Err(Error::Precondition(format!(
            "hypothesis: U lies in the window; {p} does not"
        )));
    }
    if let Some(e) = u
        .families
        .iter()
        .filter_map(|f| family_min_pair(space, f, params.t()))
        .find(|e| e.value <= params.threshold())
    {
        return Err(Error::Precondition(format!(
            "hypothesis: U is uniformly bounded at ({params}); M({}, {}) = {}",
            e.x, e.y, e.value
        )));
    }
    if let Some(p) = lebesgue_failure(space, v, params, window)? {
        return Err(Error::Precondition(format!(
            "hypothesis: ({params}) is a Lebesgue pair for V; the ball at {p} fits no member"
        )));
    }
    let mut report = CertReport::new(format!("refinement:{params}"));
    let mut rec = Record::verdict("refines", true).params(params).window(window);
    if let Some(bad) = refinement_failure(u, v) {
        rec = Record::fail("refines").params(params).window(window).witness(bad);
    }
    report.push(rec);
    Ok(report)
}

/// Everything produced by [`run_pipeline`].
#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub witness: DimensionWitness,
    pub multiplicity_cover: Cover,
    pub lebesgue: LebesgueCover,
    /// The bounded cover fed to the refinement step.
    pub refined: Cover,
    pub report: CertReport,
}

impl PipelineOutcome {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Runs the chain at target `params`.
///
/// The multiplicity step at `derive_params(params)` needs a witness one step
/// further up, so `source` is asked for a witness at
/// `derive_params(derive_params(params))`. The refinement step uses the
/// witness at `params` when it is bounded there, and singletons otherwise.
pub fn run_pipeline(
    space: &FuzzyMetricSpace,
    params: ScaleParams,
    window: &Window,
    source: &dyn Fn(ScaleParams) -> Result<DimensionWitness>,
) -> Result<PipelineOutcome> {
    let p1 = derive_params(space.tnorm, params)?;
    let p2 = derive_params(space.tnorm, p1)?;
    let witness = source(p2)?;
    let mut report = CertReport::new(format!("pipeline:{}:{params}", space.kind()));

    let (cover, rep) = asdim_to_multiplicity_cover(space, &witness, p1)?;
    report.absorb(rep);
    let mut target = multiplicity_record(space, &cover, params, window, witness.n + 1)?;
    target.predicate = "rt-multiplicity-target".into();
    report.push(target);

    let lebesgue = multiplicity_to_lebesgue_cover(space, &cover, witness.bound_params, params, window, witness.n)?;
    report.absorb(lebesgue.report.clone());

    let refined = match source(params) {
        Ok(w)
            if w.families
                .iter()
                .all(|f| family_min_pair(space, f, params.t()).is_none_or(|e| e.value > params.threshold())) =>
        {
            w.cover()
        }
        _ => Cover::new(vec![Family::singletons("singletons", window)]),
    };
    report.absorb(lebesgue_refinement_check(
        space,
        &refined,
        &lebesgue.cover,
        params,
        window,
    )?);

    Ok(PipelineOutcome {
        witness,
        multiplicity_cover: cover,
        lebesgue,
        refined,
        report,
    })
}
