//! Witness constructors for the built-in spaces.

use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;

use super::{verify_witness, DimensionWitness};
use crate::covers::{family_min_pair, multiplicity_at, refinement_failure, Cover, Family};
use crate::error::{Error, Result};
use crate::point::{Point, PointSet, Window};
use crate::rational::Rational;
use crate::report::{CertReport, Record};
use crate::space::{FuzzyMetricSpace, MetricDescriptor, MetricRule, ScaleParams};
use crate::tnorm::TNorm;

/// Grid for bound-parameter searches: `r' = 1 - 1/k` for `k = 2..=k_max`
/// and `t' = 2^j` for `j = 0..=j_max`, smallest `k` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundSearch {
    pub k_max: u32,
    pub j_max: u32,
    /// When the grid fails, derive `1 - r' = m/2` exactly from the minimal
    /// pair value `m` at `t' = 2^j_max` instead of giving up.
    pub exact_fallback: bool,
}

impl Default for BoundSearch {
    fn default() -> Self {
        BoundSearch {
            k_max: 64,
            j_max: 10,
            exact_fallback: true,
        }
    }
}

impl BoundSearch {
    pub fn grid_only() -> Self {
        BoundSearch {
            exact_fallback: false,
            ..BoundSearch::default()
        }
    }

    /// Parameters at which every member of `family` is bounded, plus a note
    /// when the exact fallback was needed.
    pub fn find(&self, space: &FuzzyMetricSpace, family: &Family) -> Result<(ScaleParams, Option<String>)> {
        let times: Vec<Rational> = (0..=self.j_max).map(|j| Rational::from_int(1i128 << j)).collect();
        let mins: Vec<Option<Rational>> = times
            .iter()
            .map(|&t| family_min_pair(space, family, t).map(|e| e.value))
            .collect();
        for k in 2..=self.k_max {
            let threshold = Rational::new(1, k as i128);
            for (t, min) in times.iter().zip(&mins) {
                if min.is_none_or(|m| m > threshold) {
                    return Ok((ScaleParams::new(threshold.complement(), *t)?, None));
                }
            }
        }
        let last = *times.last().expect("non-empty time grid");
        let min = mins.last().copied().flatten().expect("grid only fails with a pair");
        if !self.exact_fallback {
            return Err(Error::SearchFailure(format!(
                "no bound on grid r' = 1 - 1/k (k <= {}), t' = 2^j (j <= {}); minimal M = {min} at t' = {last}",
                self.k_max, self.j_max
            )));
        }
        let half = min / Rational::from_int(2);
        let params = ScaleParams::new(half.complement(), last)?;
        Ok((
            params,
            Some(format!(
                "grid (k <= {}) exhausted; exact bound 1 - r' = {half} from minimal M = {min}",
                self.k_max
            )),
        ))
    }
}

/// `{window}` as a one-family witness for a bounded window.
pub fn witness_bounded(
    space: &FuzzyMetricSpace,
    window: &Window,
    params: ScaleParams,
    search: &BoundSearch,
) -> Result<DimensionWitness> {
    space.validate_window(window)?;
    let family = Family::new("X", [window.to_set()]);
    let (bound, degraded) = search.find(space, &family)?;
    let mut w = DimensionWitness::new(0, params, bound, window.clone(), vec![family])
        .with_note("single set: the window itself");
    if let Some(d) = degraded {
        w = w.with_note(d);
    }
    Ok(w)
}

fn naturals(window: &Window) -> Result<Vec<i64>> {
    window
        .points()
        .iter()
        .map(|p| match p {
            Point::Int(v) if *v >= 1 => Ok(*v),
            other => Err(Error::Domain(format!("{other} is not a positive integer"))),
        })
        .collect()
}

/// The head size for the reciprocal-product space: the smallest `N >= 1`
/// with `1/(N+1) < 1 - r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReciprocalHead {
    pub n: i64,
}

impl ReciprocalHead {
    pub fn for_params(params: ScaleParams) -> Self {
        // 1/(N+1) < c  <=>  N + 1 > 1/c  <=>  N >= floor(1/c)
        let n = params.threshold().recip().floor().max(1);
        ReciprocalHead { n: n as i64 }
    }
}

/// The n = 0 witness for `M = 1/(xy)`: a head `{1..N}` and singletons above it.
pub fn witness_reciprocal_head(params: ScaleParams, window: &Window) -> Result<DimensionWitness> {
    let pts = naturals(window)?;
    let head = ReciprocalHead::for_params(params).n;
    let mut sets = vec![pts
        .iter()
        .filter(|&&v| v <= head)
        .map(|&v| Point::Int(v))
        .collect::<PointSet>()];
    sets.extend(
        pts.iter()
            .filter(|&&v| v > head)
            .map(|&v| PointSet::from([Point::Int(v)])),
    );
    let n2 = (head as i128) * (head as i128);
    // the head's smallest value is 1/((N-1)N) > 1/(2N^2); singletons are vacuous
    let bound = ScaleParams::new(Rational::new(1, 2 * n2).complement(), params.t())?;
    Ok(
        DimensionWitness::new(0, params, bound, window.clone(), vec![Family::new("U", sets)])
            .with_note(format!("head {{1..{head}}}")),
    )
}

/// The block recursion for `M = min/max`: blocks `{a_n .. a_n + m_n}` with
/// the gaps between them forming the second family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioRecursion {
    /// `a_1, a_2, ...`
    pub a: Vec<i64>,
    /// `m_1, m_2, ...`
    pub m: Vec<i64>,
}

impl RatioRecursion {
    /// Runs the recursion until `a_n` exceeds `limit` (that `a_n` is kept so
    /// the final gap is known).
    pub fn for_params(params: ScaleParams, limit: i64) -> Self {
        let c = params.threshold();
        let mut a = Vec::new();
        let mut m = Vec::new();
        // a_1: smallest integer > 1 with 1/a_1 < c
        let mut next = (c.recip().floor() + 1).max(2);
        loop {
            let an = next as i64;
            a.push(an);
            if an > limit {
                break;
            }
            // m_n: smallest m >= 0 with (a_n - 1)/(a_n + m + 1) < c
            let x = Rational::from_int(next - 1) / c - Rational::from_int(next + 1);
            let mn = if x.is_negative() { 0 } else { x.floor() + 1 };
            m.push(mn as i64);
            // a_{n+1}: smallest integer > a_n + m_n with (a_n + m_n)/a_{n+1} < c
            next = (Rational::from_int(next + mn) / c).floor() + 1;
        }
        RatioRecursion { a, m }
    }

    /// `U_0 = {1}`, `U_n = {a_n .. a_n + m_n}` and the gaps `V_0, V_1, ...`,
    /// as inclusive integer ranges, up to `limit`.
    pub fn ranges(&self, limit: i64) -> (Vec<(i64, i64)>, Vec<(i64, i64)>) {
        let mut u = vec![(1, 1)];
        let mut v = Vec::new();
        let mut prev_end = 1;
        for (i, &an) in self.a.iter().enumerate() {
            v.push((prev_end + 1, (an - 1).min(limit)));
            if an > limit {
                break;
            }
            let end = an + self.m[i];
            u.push((an, end.min(limit)));
            prev_end = end;
        }
        (u, v)
    }
}

/// The two-family witness for `M = min/max`, bounded at the same `(r, t)`.
pub fn witness_ratio_recursion(params: ScaleParams, window: &Window) -> Result<DimensionWitness> {
    let pts = naturals(window)?;
    let limit = pts.last().copied().unwrap_or(1);
    let rec = RatioRecursion::for_params(params, limit);
    let (u, v) = rec.ranges(limit);
    let keep: BTreeSet<i64> = pts.into_iter().collect();
    let to_sets = |ranges: &[(i64, i64)]| -> Vec<PointSet> {
        ranges
            .iter()
            .map(|&(lo, hi)| {
                if lo > hi {
                    PointSet::new()
                } else {
                    keep.range(lo..=hi).map(|&x| Point::Int(x)).collect()
                }
            })
            .collect()
    };
    let families = vec![Family::new("U", to_sets(&u)), Family::new("V", to_sets(&v))];
    let shown: Vec<String> = rec.a.iter().take(4).map(|a| a.to_string()).collect();
    Ok(DimensionWitness::new(1, params, params, window.clone(), families)
        .with_note(format!("block starts a_n = {}, ...", shown.join(", "))))
}

/// The ball partition of a non-Archimedean space under the minimum t-norm:
/// distinct balls `B(x, r + eps, t)` are equal or disjoint.
pub fn witness_non_archimedean(
    space: &FuzzyMetricSpace,
    params: ScaleParams,
    epsilon: Option<Rational>,
    window: &Window,
) -> Result<DimensionWitness> {
    if space.tnorm != TNorm::Minimum {
        return Err(Error::Precondition(format!(
            "ball partitions need the minimum t-norm, got {}",
            space.tnorm
        )));
    }
    let eps = epsilon.unwrap_or_else(|| params.threshold() / Rational::from_int(2));
    if !eps.is_positive() {
        return Err(Error::Domain(format!("epsilon = {eps} must be positive")));
    }
    let wide = ScaleParams::new(params.r() + eps, params.t())?;
    let check = space.check_non_archimedean(window, params.t())?;
    if let Some(bad) = check.failures().next() {
        let pts: Vec<String> = bad.witness.iter().map(|p| p.to_string()).collect();
        return Err(Error::NonArchimedean(format!(
            "M(x,y,t) * M(y,z,t) > M(x,z,t) at ({})",
            pts.join(", ")
        )));
    }
    let balls: BTreeSet<PointSet> = window
        .points()
        .iter()
        .map(|x| space.ball_unchecked(x, wide, window))
        .collect();
    let cover = Cover::from_sets("B", balls.iter().cloned());
    let (mult, at) = multiplicity_at(&cover, window);
    if mult > 1 {
        return Err(Error::NonArchimedean(format!(
            "distinct balls B(x, {}, {}) overlap at {}",
            wide.r(),
            wide.t(),
            at.expect("overlap point")
        )));
    }
    Ok(
        DimensionWitness::new(0, params, wide, window.clone(), vec![Family::new("B", balls)])
            .with_note(format!("balls at r + eps = {}", wide.r())),
    )
}

/// Re-certifies metric-separated families in the standard fuzzy space: with
/// `s = (1 + r)/2`, separation `d(U, U') > metric_sep >= st/(1 - s)` gives
/// `M < 1 - s < 1 - r`. Bounded at `(1/2, D + 1)` for the largest diameter `D`.
pub fn translate_metric_witness(
    space: &FuzzyMetricSpace,
    families: Vec<Family>,
    metric_sep: Rational,
    params: ScaleParams,
    window: &Window,
) -> Result<DimensionWitness> {
    let metric = space
        .metric()
        .ok_or_else(|| Error::Unsupported(format!("{} is not a standard fuzzy space", space.kind())))?;
    if families.is_empty() {
        return Err(Error::Precondition("at least one family is required".into()));
    }
    space.validate_window(window)?;
    for f in &families {
        space.validate_points(f.sets().iter().flatten())?;
    }
    let s = (Rational::one() + params.r()) / Rational::from_int(2);
    let needed = s * params.t() / s.complement();
    if metric_sep < needed {
        return Err(Error::Certification(format!(
            "separation {metric_sep} is below st/(1-s) = {needed} for s = {s}"
        )));
    }
    let mut diam = Rational::zero();
    for f in &families {
        for (i, u) in f.sets().iter().enumerate() {
            for x in u {
                for y in u {
                    diam = diam.max(metric.distance(x, y));
                }
            }
            for v in &f.sets()[i + 1..] {
                for x in u {
                    for y in v {
                        let d = metric.distance(x, y);
                        if d <= metric_sep {
                            return Err(Error::Certification(format!(
                                "family {}: d({x}, {y}) = {d} is not above the separation {metric_sep}",
                                f.label
                            )));
                        }
                    }
                }
            }
        }
    }
    let bound = ScaleParams::new(Rational::half(), diam + Rational::one())?;
    let n = families.len() - 1;
    Ok(
        DimensionWitness::new(n, params, bound, window.clone(), families).with_note(format!(
            "metric separation {metric_sep} >= st/(1-s) = {needed}, s = {s}"
        )),
    )
}

/// Two families of alternating integer blocks of length
/// `L = max(1, ceil(st/(1-s)))`, translated from the metric witness for `Z`.
pub fn integer_blocks_witness(
    space: &FuzzyMetricSpace,
    params: ScaleParams,
    window: &Window,
) -> Result<DimensionWitness> {
    if !matches!(
        space.rule,
        MetricRule::StandardFromMetric(MetricDescriptor::EuclideanIntegers)
    ) {
        return Err(Error::Unsupported(
            "integer blocks need the standard fuzzy metric on Z".into(),
        ));
    }
    space.validate_window(window)?;
    let s = (Rational::one() + params.r()) / Rational::from_int(2);
    let len = (s * params.t() / s.complement()).ceil().max(1) as i64;
    let ints: Vec<i64> = window.points().iter().filter_map(Point::as_int).collect();
    let mut fams = [Vec::new(), Vec::new()];
    if let (Some(&lo), Some(&hi)) = (ints.first(), ints.last()) {
        for k in lo.div_euclid(len)..=hi.div_euclid(len) {
            let block: PointSet = ints
                .iter()
                .filter(|v| v.div_euclid(len) == k)
                .map(|&v| Point::Int(v))
                .collect();
            fams[k.rem_euclid(2) as usize].push(block);
        }
    }
    let [even, odd] = fams;
    let families = vec![Family::new("even-blocks", even), Family::new("odd-blocks", odd)];
    translate_metric_witness(space, families, Rational::from_int(len as i128), params, window)
        .map(|w| w.with_note(format!("block length {len}")))
}

/// Every family set intersected with `subset`; parameters unchanged.
pub fn restrict_witness(w: &DimensionWitness, subset: &PointSet) -> DimensionWitness {
    DimensionWitness {
        n: w.n,
        params: w.params,
        bound_params: w.bound_params,
        window: w.window.restrict(subset),
        families: w.families.iter().map(|f| f.restrict(subset)).collect(),
        notes: w.notes.clone(),
    }
}

/// The witness a built-in space's own constructor produces at `params`.
pub fn construct_witness(space: &FuzzyMetricSpace, params: ScaleParams, window: &Window) -> Result<DimensionWitness> {
    space.validate_window(window)?;
    match &space.rule {
        MetricRule::ReciprocalProduct => witness_reciprocal_head(params, window),
        MetricRule::RatioMinMax => witness_ratio_recursion(params, window),
        MetricRule::UltrametricStandard if space.tnorm == TNorm::Minimum => {
            witness_non_archimedean(space, params, None, window)
        }
        MetricRule::StandardFromMetric(MetricDescriptor::EuclideanIntegers) => {
            integer_blocks_witness(space, params, window)
        }
        _ => witness_bounded(space, window, params, &BoundSearch::default()),
    }
}

/// A multiplicity-1 bounded cover refined by the balls `B(x, r', t)` with
/// `r' = (1 + r)/2`, returned as an n = 0 witness at `(r, t)`.
///
/// Without a `candidate`, the components of the ball-overlap relation are
/// used (the finest partition the balls refine). Failure to bound the
/// candidate on the grid is a [`Error::SearchFailure`]: inconclusive, not
/// evidence that the dimension is positive.
pub fn zero_dim_from_refinement(
    space: &FuzzyMetricSpace,
    params: ScaleParams,
    window: &Window,
    candidate: Option<&Cover>,
    search: &BoundSearch,
) -> Result<(DimensionWitness, CertReport)> {
    space.validate_window(window)?;
    let wide = ScaleParams::new((Rational::one() + params.r()) / Rational::from_int(2), params.t())?;
    let pts = window.points();
    let balls: Vec<PointSet> = pts.iter().map(|x| space.ball_unchecked(x, wide, window)).collect();
    let ball_cover = Cover::from_sets("balls", balls.iter().cloned());

    let cover = match candidate {
        Some(c) => c.clone(),
        None => {
            let mut uf = UnionFind::<usize>::new(pts.len());
            for (i, ball) in balls.iter().enumerate() {
                for y in ball {
                    let j = pts.binary_search(y).expect("ball inside window");
                    uf.union(i, j);
                }
            }
            let mut parts: std::collections::BTreeMap<usize, PointSet> = std::collections::BTreeMap::new();
            for (i, p) in pts.iter().enumerate() {
                parts.entry(uf.find(i)).or_default().insert(p.clone());
            }
            let mut sets: Vec<PointSet> = parts.into_values().collect();
            sets.sort();
            Cover::from_sets("V", sets)
        }
    };

    let mut report = CertReport::new(format!("zero-dim:{}", space.kind()));
    if let Some(p) = cover.uncovered(window) {
        return Err(Error::Precondition(format!("candidate cover misses {p}")));
    }
    let (mult, at) = multiplicity_at(&cover, window);
    if mult > 1 {
        return Err(Error::Precondition(format!(
            "candidate cover has multiplicity {mult} at {}",
            at.expect("point")
        )));
    }
    report.push(Record::pass("multiplicity-1").window(window));
    if let Some(bad) = refinement_failure(&ball_cover, &cover) {
        return Err(Error::Precondition(format!(
            "ball {:?} at r' = {} lies in no candidate member",
            bad.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            wide.r()
        )));
    }
    report.push(Record::pass("balls-refine").params(wide).window(window));

    let family = Family::new("V", cover.members().cloned());
    let (bound, _) = search.find(space, &family).map_err(|e| match e {
        Error::SearchFailure(msg) => Error::SearchFailure(format!("inconclusive: {msg}")),
        other => other,
    })?;
    let w = DimensionWitness::new(0, params, bound, window.clone(), vec![family])
        .with_note(format!("refined by balls at r' = {}", wide.r()));
    report.absorb(verify_witness(space, &w)?);
    Ok((w, report))
}
