//! Families and covers of finite point sets, with the predicates used to
//! certify dimension witnesses: uniform boundedness, `(r,t)`-disjointness,
//! neighborhoods, multiplicities, Lebesgue pairs and refinement.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{Point, PointSet, Window};
use crate::rational::Rational;
use crate::report::{CertReport, Record};
use crate::space::{min_pair, Extremal, FuzzyMetricSpace, ScaleParams};

/// A named family of non-empty finite point sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RawFamily")]
pub struct Family {
    pub label: String,
    sets: Vec<PointSet>,
    /// Number of empty members discarded at construction.
    #[serde(skip_serializing_if = "is_zero")]
    dropped_empty: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

#[derive(Deserialize)]
struct RawFamily {
    label: String,
    sets: Vec<PointSet>,
    #[serde(default)]
    dropped_empty: usize,
}

impl From<RawFamily> for Family {
    fn from(raw: RawFamily) -> Self {
        let mut f = Family::new(raw.label, raw.sets);
        f.dropped_empty += raw.dropped_empty;
        f
    }
}

impl Family {
    pub fn new<I: IntoIterator<Item = PointSet>>(label: impl Into<String>, sets: I) -> Self {
        let mut kept = Vec::new();
        let mut dropped = 0;
        for s in sets {
            if s.is_empty() {
                dropped += 1;
            } else {
                kept.push(s);
            }
        }
        Family {
            label: label.into(),
            sets: kept,
            dropped_empty: dropped,
        }
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Family::new(label, Vec::new())
    }

    pub fn singletons(label: impl Into<String>, window: &Window) -> Self {
        Family::new(label, window.points().iter().map(|p| PointSet::from([p.clone()])))
    }

    pub fn sets(&self) -> &[PointSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn dropped_empty(&self) -> usize {
        self.dropped_empty
    }

    pub fn union(&self) -> PointSet {
        self.sets.iter().flatten().cloned().collect()
    }

    /// Intersects every member with `subset`, dropping members that vanish.
    pub fn restrict(&self, subset: &PointSet) -> Family {
        let mut f = Family::new(
            self.label.clone(),
            self.sets.iter().map(|s| s.intersection(subset).cloned().collect()),
        );
        f.dropped_empty += self.dropped_empty;
        f
    }
}

/// A cover given as a list of families; its members are all their sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub families: Vec<Family>,
}

impl Cover {
    pub fn new(families: Vec<Family>) -> Self {
        Cover { families }
    }

    /// A cover with one family holding `sets`.
    pub fn from_sets<I: IntoIterator<Item = PointSet>>(label: &str, sets: I) -> Self {
        Cover::new(vec![Family::new(label, sets)])
    }

    pub fn members(&self) -> impl Iterator<Item = &PointSet> {
        self.families.iter().flat_map(|f| f.sets.iter())
    }

    pub fn member_count(&self) -> usize {
        self.families.iter().map(Family::len).sum()
    }

    pub fn union(&self) -> PointSet {
        self.members().flatten().cloned().collect()
    }

    /// First window point not in any member.
    pub fn uncovered(&self, window: &Window) -> Option<Point> {
        let union = self.union();
        window.points().iter().find(|p| !union.contains(p)).cloned()
    }

    pub fn covers_window(&self, window: &Window) -> bool {
        self.uncovered(window).is_none()
    }

    /// For each point, the indices of the members containing it.
    fn membership(&self) -> BTreeMap<&Point, Vec<usize>> {
        let mut map: BTreeMap<&Point, Vec<usize>> = BTreeMap::new();
        for (i, set) in self.members().enumerate() {
            for p in set {
                map.entry(p).or_default().push(i);
            }
        }
        map
    }
}

/// The pair inside one member of `family` with the smallest `M(., ., t)`.
pub fn family_min_pair(space: &FuzzyMetricSpace, family: &Family, t: Rational) -> Option<Extremal> {
    let mut best: Option<Extremal> = None;
    for set in family.sets() {
        let pts: Vec<Point> = set.iter().cloned().collect();
        if let Some(e) = min_pair(space, &pts, t) {
            if best.as_ref().is_none_or(|b| e.value < b.value) {
                best = Some(e);
            }
        }
    }
    best
}

/// Whether every pair inside every member satisfies `M(x, y, t) > 1 - r`.
pub fn is_uniformly_bounded_family(space: &FuzzyMetricSpace, family: &Family, params: ScaleParams) -> Result<bool> {
    space.validate_points(family.sets().iter().flatten())?;
    Ok(family_min_pair(space, family, params.t()).is_none_or(|e| e.value > params.threshold()))
}

/// `M(U, V, t)`: the maximum of `M` over `U x V`.
pub fn set_sup_m(space: &FuzzyMetricSpace, u: &PointSet, v: &PointSet, t: Rational) -> Result<Rational> {
    space.set_sup(u, v, t)
}

/// The pair from two distinct members of `family` with the largest
/// `M(., ., t)`, or `None` for families with fewer than two members.
pub fn family_max_cross_pair(space: &FuzzyMetricSpace, family: &Family, t: Rational) -> Option<Extremal> {
    let entries: Vec<(usize, &Point)> = family
        .sets()
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.iter().map(move |p| (i, p)))
        .collect();
    let mut best: Option<(usize, usize, Rational)> = None;
    for a in 0..entries.len() {
        let (ia, x) = entries[a];
        for (b, &(ib, y)) in entries.iter().enumerate().skip(a + 1) {
            if ia == ib {
                continue;
            }
            let v = space.m(x, y, t);
            if best.as_ref().is_none_or(|bst| v > bst.2) {
                best = Some((a, b, v));
            }
        }
    }
    best.map(|(a, b, v)| Extremal {
        x: entries[a].1.clone(),
        y: entries[b].1.clone(),
        value: v.reduced(),
    })
}

/// Whether `M(U, V, t) < 1 - r` for every two distinct members.
pub fn is_rt_disjoint(space: &FuzzyMetricSpace, family: &Family, params: ScaleParams) -> Result<bool> {
    space.validate_points(family.sets().iter().flatten())?;
    Ok(family_max_cross_pair(space, family, params.t()).is_none_or(|e| e.value < params.threshold()))
}

/// `N_{r,t}(U)` within `window`.
pub fn rt_neighborhood(
    space: &FuzzyMetricSpace,
    u: &PointSet,
    params: ScaleParams,
    window: &Window,
) -> Result<PointSet> {
    space.validate_points(u)?;
    space.validate_window(window)?;
    Ok(neighborhood_unchecked(space, u, params, window))
}

pub(crate) fn neighborhood_unchecked(
    space: &FuzzyMetricSpace,
    u: &PointSet,
    params: ScaleParams,
    window: &Window,
) -> PointSet {
    let (t, thr) = (params.t(), params.threshold());
    window
        .points()
        .iter()
        .filter(|x| u.contains(x) || u.iter().any(|y| space.m(x, y, t) > thr))
        .cloned()
        .collect()
}

/// The chain bound for neighborhoods of a bounded family: members of
/// `{N_{r,t}(U)}` satisfy `M(x, y, t_out) >= lower` (non-strict).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeighborhoodBound {
    pub lower: Rational,
    pub t_out: Rational,
}

impl NeighborhoodBound {
    /// Parameters at which the output is strictly bounded: `1 - s = lower/2`.
    pub fn strict_params(&self) -> Result<ScaleParams> {
        if !self.lower.is_positive() {
            return Err(Error::Certification("neighborhood bound collapsed to 0".into()));
        }
        ScaleParams::new((self.lower / Rational::from_int(2)).complement(), self.t_out)
    }
}

/// `{N_{r,t}(U) : U in family}` on `window`, with a certificate that the
/// result is uniformly bounded: from `M(u, v, t') > 1 - r'` inside members,
/// every pair of a neighborhood satisfies
/// `M(x, y, 2t + t') >= (1 - r) * (1 - r') * (1 - r)`.
pub fn neighborhood_family(
    space: &FuzzyMetricSpace,
    family: &Family,
    params: ScaleParams,
    input_bound: ScaleParams,
    window: &Window,
) -> Result<(Family, NeighborhoodBound, CertReport)> {
    if !space.tnorm.is_positivity_preserving() {
        return Err(Error::Unsupported(format!(
            "neighborhood bounds need a positivity-preserving t-norm, got {}",
            space.tnorm
        )));
    }
    space.validate_points(family.sets().iter().flatten())?;
    space.validate_window(window)?;
    let mut report = CertReport::new(format!("neighborhoods:{}", family.label));

    let input_ok = family_min_pair(space, family, input_bound.t());
    report.push(bounded_record("input-bounded", input_ok, input_bound).window(window));

    let out = Family::new(
        format!("N({})", family.label),
        family
            .sets()
            .iter()
            .map(|u| neighborhood_unchecked(space, u, params, window)),
    );
    let bound = NeighborhoodBound {
        lower: space
            .tnorm
            .fold([params.threshold(), input_bound.threshold(), params.threshold()]),
        t_out: params.t() + params.t() + input_bound.t(),
    };
    let measured = family_min_pair(space, &out, bound.t_out);
    let mut rec = Record::verdict(
        "output-bounded",
        measured.as_ref().is_none_or(|e| e.value >= bound.lower),
    )
    .window(window)
    .value("lower", bound.lower)
    .value("t_out", bound.t_out)
    .note("non-strict chain bound M >= lower");
    if let Some(e) = measured {
        rec = rec.witness([e.x, e.y]).value("measured_min", e.value);
    }
    report.push(rec);
    if family.union().len() >= window.len() && Cover::new(vec![family.clone()]).covers_window(window) {
        report.push(Record::verdict(
            "output-covers",
            Cover::new(vec![out.clone()]).covers_window(window),
        ));
    }
    Ok((out, bound, report))
}

pub(crate) fn bounded_record(name: &str, min: Option<Extremal>, params: ScaleParams) -> Record {
    match min {
        None => Record::pass(name).params(params).note("vacuous"),
        Some(e) => Record::verdict(name, e.value > params.threshold())
            .params(params)
            .witness([e.x, e.y])
            .value("min_M", e.value)
            .value("threshold", params.threshold()),
    }
}

pub(crate) fn disjoint_record(name: &str, max: Option<Extremal>, params: ScaleParams) -> Record {
    match max {
        None => Record::pass(name).params(params).note("vacuous"),
        Some(e) => Record::verdict(name, e.value < params.threshold())
            .params(params)
            .witness([e.x, e.y])
            .value("max_M", e.value)
            .value("threshold", params.threshold()),
    }
}

/// Largest number of members containing a single window point.
pub fn multiplicity(cover: &Cover, window: &Window) -> usize {
    multiplicity_at(cover, window).0
}

/// [`multiplicity`] together with the first point attaining it.
pub fn multiplicity_at(cover: &Cover, window: &Window) -> (usize, Option<Point>) {
    let members = cover.membership();
    let mut best = (0, None);
    for p in window.points() {
        let k = members.get(p).map_or(0, Vec::len);
        if k > best.0 {
            best = (k, Some(p.clone()));
        }
    }
    best
}

/// Largest number of members met by a ball `B(x, r, t)`, over window points.
pub fn rt_multiplicity(space: &FuzzyMetricSpace, cover: &Cover, params: ScaleParams, window: &Window) -> Result<usize> {
    Ok(rt_multiplicity_at(space, cover, params, window)?.0)
}

/// [`rt_multiplicity`] together with the first centre attaining it.
pub fn rt_multiplicity_at(
    space: &FuzzyMetricSpace,
    cover: &Cover,
    params: ScaleParams,
    window: &Window,
) -> Result<(usize, Option<Point>)> {
    space.validate_window(window)?;
    let members = cover.membership();
    let mut best = (0, None);
    for x in window.points() {
        let ball = space.ball_unchecked(x, params, window);
        let met: BTreeSet<usize> = ball.iter().filter_map(|p| members.get(p)).flatten().copied().collect();
        if met.len() > best.0 {
            best = (met.len(), Some(x.clone()));
        }
    }
    Ok(best)
}

/// First window point whose ball `B(x, r, t)` lies in no single member.
/// Errors if `cover` does not cover `window`.
pub fn lebesgue_failure(
    space: &FuzzyMetricSpace,
    cover: &Cover,
    params: ScaleParams,
    window: &Window,
) -> Result<Option<Point>> {
    space.validate_window(window)?;
    if let Some(p) = cover.uncovered(window) {
        return Err(Error::Precondition(format!("cover misses window point {p}")));
    }
    let all: Vec<&PointSet> = cover.members().collect();
    let members = cover.membership();
    for x in window.points() {
        let ball = space.ball_unchecked(x, params, window);
        // x lies in its own ball, so only members holding x can contain it.
        let fits = members[x].iter().any(|&i| ball.is_subset(all[i]));
        if !fits {
            return Ok(Some(x.clone()));
        }
    }
    Ok(None)
}

/// Whether `(r, t)` is a Lebesgue pair for `cover` on `window`.
pub fn has_lebesgue_pair(
    space: &FuzzyMetricSpace,
    cover: &Cover,
    params: ScaleParams,
    window: &Window,
) -> Result<bool> {
    Ok(lebesgue_failure(space, cover, params, window)?.is_none())
}

/// First member of `v` contained in no member of `u`.
pub fn refinement_failure(v: &Cover, u: &Cover) -> Option<PointSet> {
    v.members().find(|s| !u.members().any(|big| s.is_subset(big))).cloned()
}

/// Whether every member of `v` lies in some member of `u`.
pub fn refines(v: &Cover, u: &Cover) -> bool {
    refinement_failure(v, u).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::int_set;
    use crate::rational::q;

    fn sp(r: Rational, t: Rational) -> ScaleParams {
        ScaleParams::new(r, t).unwrap()
    }

    fn fam(sets: &[&[i64]]) -> Family {
        Family::new("f", sets.iter().map(|s| int_set(s.iter().copied())))
    }

    fn blocks(lo: i64, hi: i64, width: i64) -> Cover {
        let mut sets = Vec::new();
        let mut start = lo.div_euclid(width) * width;
        while start <= hi {
            sets.push(int_set((start..start + width).filter(|v| (lo..=hi).contains(v))));
            start += width;
        }
        Cover::from_sets("blocks", sets)
    }

    #[test]
    fn empty_members_are_dropped() {
        let f = Family::new("f", vec![int_set([1]), PointSet::new(), int_set([2])]);
        assert_eq!(f.len(), 2);
        assert_eq!(f.dropped_empty(), 1);
    }

    #[test]
    fn uniform_boundedness_examples() {
        let rm = FuzzyMetricSpace::ratio_min_max();
        let half = sp(q(1, 2), q(1, 1));
        assert!(is_uniformly_bounded_family(&rm, &fam(&[&[1], &[7]]), half).unwrap());
        assert!(is_uniformly_bounded_family(&rm, &fam(&[&[3, 4]]), half).unwrap());
        assert!(!is_uniformly_bounded_family(&rm, &fam(&[&[1, 2, 3]]), half).unwrap());
    }

    #[test]
    fn set_sup_examples() {
        let z = FuzzyMetricSpace::standard_integers();
        assert_eq!(set_sup_m(&z, &int_set([0]), &int_set([0]), q(1, 1)).unwrap(), q(1, 1));
        let rp = FuzzyMetricSpace::reciprocal_product();
        assert_eq!(
            set_sup_m(&rp, &int_set([3]), &int_set([4, 5]), q(1, 1)).unwrap(),
            q(1, 12)
        );
        let rm = FuzzyMetricSpace::ratio_min_max();
        assert_eq!(
            set_sup_m(&rm, &int_set([1, 2]), &int_set([3, 4]), q(1, 1)).unwrap(),
            q(2, 3)
        );
        assert!(set_sup_m(&rm, &PointSet::new(), &int_set([3]), q(1, 1)).is_err());
    }

    #[test]
    fn disjointness_examples() {
        let half = sp(q(1, 2), q(1, 1));
        let rp = FuzzyMetricSpace::reciprocal_product();
        assert!(is_rt_disjoint(&rp, &fam(&[&[1, 2, 3, 4]]), half).unwrap());
        assert!(is_rt_disjoint(&rp, &fam(&[&[1, 2], &[3], &[4]]), half).unwrap());
        let rm = FuzzyMetricSpace::ratio_min_max();
        assert!(!is_rt_disjoint(&rm, &fam(&[&[3, 4], &[5]]), half).unwrap());
        let e = family_max_cross_pair(&rm, &fam(&[&[3, 4], &[5]]), q(1, 1)).unwrap();
        assert_eq!((e.x, e.y, e.value), (Point::Int(4), Point::Int(5), q(4, 5)));
    }

    #[test]
    fn neighborhood_examples() {
        let z = FuzzyMetricSpace::standard_integers();
        let w = Window::range(-20, 20);
        let p = sp(q(1, 2), q(3, 1));
        let n = rt_neighborhood(&z, &int_set([0, 10]), p, &w).unwrap();
        assert_eq!(n, int_set((-2..=2).chain(8..=12)));
        assert_eq!(
            rt_neighborhood(&z, &int_set([5]), p, &w).unwrap(),
            z.ball(&Point::Int(5), p, &w).unwrap()
        );
        assert!(rt_neighborhood(&z, &PointSet::new(), p, &w).unwrap().is_empty());
    }

    #[test]
    fn neighborhood_family_chain_bound() {
        let z = FuzzyMetricSpace::standard_integers();
        let w = Window::range(-20, 20);
        let singles = Family::singletons("s", &w);
        let (out, bound, rep) =
            neighborhood_family(&z, &singles, sp(q(1, 2), q(3, 1)), sp(q(1, 2), q(1, 1)), &w).unwrap();
        assert_eq!(bound.t_out, q(7, 1));
        assert_eq!(bound.lower, q(1, 8));
        assert!(rep.passed(), "{}", rep.to_jsonl());
        assert!(Cover::new(vec![out]).covers_window(&w));
        let (empty, _, _) =
            neighborhood_family(&z, &Family::empty("e"), sp(q(1, 2), q(3, 1)), sp(q(1, 2), q(1, 1)), &w).unwrap();
        assert!(empty.is_empty());
        let luk = FuzzyMetricSpace::pathological(crate::tnorm::TNorm::Lukasiewicz);
        assert!(matches!(
            neighborhood_family(
                &luk,
                &fam(&[&[1]]),
                sp(q(1, 2), q(1, 1)),
                sp(q(1, 2), q(1, 1)),
                &Window::range(1, 3)
            ),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn multiplicity_examples() {
        let w = Window::range(1, 3);
        assert_eq!(
            multiplicity(&Cover::from_sets("p", [int_set([1]), int_set([2, 3])]), &w),
            1
        );
        assert_eq!(
            multiplicity(&Cover::from_sets("c", [int_set([1, 2]), int_set([2, 3])]), &w),
            2
        );
        assert_eq!(multiplicity(&Cover::default(), &Window::empty()), 0);
    }

    #[test]
    fn rt_multiplicity_of_blocks() {
        let z = FuzzyMetricSpace::standard_integers();
        let w = Window::range(0, 99);
        let cover = blocks(0, 99, 10);
        assert_eq!(rt_multiplicity(&z, &cover, sp(q(1, 2), q(1, 1)), &w).unwrap(), 1);
        let (m, at) = rt_multiplicity_at(&z, &cover, sp(q(1, 2), q(3, 1)), &w).unwrap();
        assert_eq!(m, 2);
        assert_eq!(at, Some(Point::Int(8)));
    }

    #[test]
    fn lebesgue_examples() {
        let z = FuzzyMetricSpace::standard_integers();
        let w = Window::range(0, 99);
        let whole = Cover::from_sets("w", [w.to_set()]);
        assert!(has_lebesgue_pair(&z, &whole, sp(q(9, 10), q(50, 1)), &w).unwrap());
        let cover = blocks(0, 99, 10);
        assert!(has_lebesgue_pair(&z, &cover, sp(q(1, 2), q(1, 1)), &w).unwrap());
        assert!(!has_lebesgue_pair(&z, &cover, sp(q(1, 2), q(3, 1)), &w).unwrap());
        let partial = Cover::from_sets("p", [int_set(0..50)]);
        assert!(matches!(
            has_lebesgue_pair(&z, &partial, sp(q(1, 2), q(1, 1)), &w),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn refinement_examples() {
        let c = Cover::from_sets("c", [int_set([1, 2]), int_set([3])]);
        assert!(refines(&c, &c));
        let singles = Cover::new(vec![Family::singletons("s", &Window::range(1, 3))]);
        assert!(refines(&singles, &c));
        let big = Cover::from_sets("b", [int_set([1, 2, 3])]);
        assert!(!refines(&big, &c));
        assert_eq!(refinement_failure(&big, &c), Some(int_set([1, 2, 3])));
    }
}
