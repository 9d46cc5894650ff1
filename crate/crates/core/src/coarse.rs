//! Coarse maps between fuzzy metric spaces, checked on finite windows.
//!
//! Expansiveness and properness are "for all A, t there exist B, t'"
//! statements. Here a map carries finite modulus tables and each check
//! verifies exactly the supplied entries over the window. Reports say so.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::asdim::{construct_witness, verify_witness, DimensionWitness};
use crate::covers::{family_min_pair, neighborhood_unchecked, Family};
use crate::error::{Error, Result};
use crate::point::{Point, PointSet, Window};
use crate::rational::Rational;
use crate::report::{CertReport, Record};
use crate::space::{FuzzyMetricSpace, ScaleParams};
use crate::tnorm::TNormRule;

const MODULUS_NOTE: &str = "supplied modulus entries only";

/// Finite point-to-point table. Serialized as a list of pairs.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<(Point, Point)>", into = "Vec<(Point, Point)>")]
pub struct MapTable(BTreeMap<Point, Point>);

impl From<Vec<(Point, Point)>> for MapTable {
    fn from(v: Vec<(Point, Point)>) -> Self {
        MapTable(v.into_iter().collect())
    }
}

impl From<MapTable> for Vec<(Point, Point)> {
    fn from(t: MapTable) -> Self {
        t.0.into_iter().collect()
    }
}

impl MapTable {
    pub fn get(&self, x: &Point) -> Option<&Point> {
        self.0.get(x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// How a [`CoarseMap`] moves points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum MapRule {
    Identity,
    /// `Z -> R` (or any subspace into its ambient space); points keep their value.
    Inclusion,
    /// `x -> a x + b` on integer or real points.
    Affine {
        a: Rational,
        b: Rational,
    },
    Table {
        pairs: MapTable,
    },
}

/// `M(x, y, t) >= a  ==>  M'(f x, f y, t_out) >= b` for expansiveness, and
/// `M'(f x, f y, t) >= a  ==>  M(x, y, t_out) >= b` for properness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusEntry {
    pub a: Rational,
    pub t: Rational,
    pub b: Rational,
    pub t_out: Rational,
}

impl ModulusEntry {
    pub fn new(a: Rational, t: Rational, b: Rational, t_out: Rational) -> Self {
        ModulusEntry { a, t, b, t_out }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseMap {
    pub mapping: MapRule,
    #[serde(default)]
    pub expansive: Vec<ModulusEntry>,
    #[serde(default)]
    pub proper: Vec<ModulusEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub onto: Option<ScaleParams>,
}

impl CoarseMap {
    pub fn new(mapping: MapRule) -> Self {
        CoarseMap {
            mapping,
            expansive: Vec::new(),
            proper: Vec::new(),
            onto: None,
        }
    }

    pub fn identity() -> Self {
        Self::new(MapRule::Identity)
    }

    pub fn inclusion() -> Self {
        Self::new(MapRule::Inclusion)
    }

    pub fn affine(a: Rational, b: Rational) -> Self {
        Self::new(MapRule::Affine { a, b })
    }

    pub fn table<I: IntoIterator<Item = (Point, Point)>>(pairs: I) -> Self {
        Self::new(MapRule::Table {
            pairs: MapTable(pairs.into_iter().collect()),
        })
    }

    pub fn with_expansive(mut self, entries: Vec<ModulusEntry>) -> Self {
        self.expansive = entries;
        self
    }

    pub fn with_proper(mut self, entries: Vec<ModulusEntry>) -> Self {
        self.proper = entries;
        self
    }

    pub fn with_onto(mut self, params: ScaleParams) -> Self {
        self.onto = Some(params);
        self
    }

    /// Moduli of `x -> a x + b` between standard fuzzy spaces of `|x - y|`:
    /// distances scale by `|a|`, so `M'(f x, f y, |a| t) = M(x, y, t)`. Each
    /// `(level, t)` gives the expansive entry `(level, t) -> (level, |a| t)`
    /// and the proper entry `(level, t) -> (level, t / |a|)`.
    pub fn with_standard_affine_moduli(mut self, levels: &[Rational], times: &[Rational]) -> Result<Self> {
        let a = match &self.mapping {
            MapRule::Identity | MapRule::Inclusion => Rational::one(),
            MapRule::Affine { a, .. } => a.abs(),
            MapRule::Table { .. } => {
                return Err(Error::Unsupported("closed-form moduli need an affine rule".into()));
            }
        };
        if a.is_zero() {
            return Err(Error::Unsupported("a constant map has no properness modulus".into()));
        }
        for &l in levels {
            for &t in times {
                self.expansive.push(ModulusEntry::new(l, t, l, a * t));
                self.proper.push(ModulusEntry::new(l, t, l, t / a));
            }
        }
        Ok(self)
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        match &self.mapping {
            MapRule::Identity | MapRule::Inclusion => Ok(x.clone()),
            MapRule::Affine { a, b } => {
                let v = x
                    .as_rational()
                    .ok_or_else(|| Error::Domain(format!("affine map is undefined at {x}")))?;
                Ok(Point::real(*a * v + *b))
            }
            MapRule::Table { pairs } => pairs
                .get(x)
                .cloned()
                .ok_or_else(|| Error::Domain(format!("table map is undefined at {x}"))),
        }
    }

    /// `then ∘ self`. Affine rules compose in closed form; anything else
    /// becomes a table over `window`. Moduli are dropped.
    pub fn then(&self, then: &CoarseMap, window: &Window) -> Result<CoarseMap> {
        let affine = |m: &MapRule| match m {
            MapRule::Identity | MapRule::Inclusion => Some((Rational::one(), Rational::zero())),
            MapRule::Affine { a, b } => Some((*a, *b)),
            MapRule::Table { .. } => None,
        };
        if let (Some((a1, b1)), Some((a2, b2))) = (affine(&self.mapping), affine(&then.mapping)) {
            return Ok(CoarseMap::affine(a2 * a1, a2 * b1 + b2));
        }
        let pairs = window
            .points()
            .iter()
            .map(|x| Ok((x.clone(), then.apply(&self.apply(x)?)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoarseMap::table(pairs))
    }

    fn images(&self, space_y: &FuzzyMetricSpace, window: &Window) -> Result<Vec<Point>> {
        let imgs = window
            .points()
            .iter()
            .map(|x| self.apply(x))
            .collect::<Result<Vec<_>>>()?;
        space_y.validate_points(&imgs)?;
        Ok(imgs)
    }
}

fn check_modulus(
    name: &str,
    entries: &[ModulusEntry],
    window: &Window,
    // (premise value at t, conclusion value at t_out) for the pair (i, j)
    eval: &dyn Fn(usize, usize, &ModulusEntry) -> (Rational, Rational),
) -> Result<CertReport> {
    if entries.is_empty() {
        return Err(Error::Precondition(format!(
            "{name} modulus is empty; nothing to verify"
        )));
    }
    let pts = window.points();
    let mut report = CertReport::new(format!("{name}:{}", window.label()));
    for (k, e) in entries.iter().enumerate() {
        let mut bad = None;
        'scan: for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let (pre, post) = eval(i, j, e);
                if pre >= e.a && post < e.b {
                    bad = Some((i, j, pre, post));
                    break 'scan;
                }
            }
        }
        let mut rec = Record::verdict(format!("{name}[{k}]"), bad.is_none())
            .window(window)
            .value("a", e.a)
            .value("t", e.t)
            .value("b", e.b)
            .value("t_out", e.t_out)
            .note(MODULUS_NOTE);
        if let Some((i, j, pre, post)) = bad {
            rec = rec
                .witness([pts[i].clone(), pts[j].clone()])
                .value("premise", pre.reduced())
                .value("conclusion", post.reduced());
        }
        report.push(rec);
    }
    Ok(report)
}

/// Every expansive entry against every pair of `window_x`.
pub fn check_expansive(
    space_x: &FuzzyMetricSpace,
    space_y: &FuzzyMetricSpace,
    f: &CoarseMap,
    window_x: &Window,
) -> Result<CertReport> {
    space_x.validate_window(window_x)?;
    let imgs = f.images(space_y, window_x)?;
    let pts = window_x.points();
    check_modulus("expansive", &f.expansive, window_x, &|i, j, e| {
        (space_x.m(&pts[i], &pts[j], e.t), space_y.m(&imgs[i], &imgs[j], e.t_out))
    })
}

/// Every proper entry against every pair of `window_x`.
pub fn check_proper(
    space_x: &FuzzyMetricSpace,
    space_y: &FuzzyMetricSpace,
    f: &CoarseMap,
    window_x: &Window,
) -> Result<CertReport> {
    space_x.validate_window(window_x)?;
    let imgs = f.images(space_y, window_x)?;
    let pts = window_x.points();
    check_modulus("proper", &f.proper, window_x, &|i, j, e| {
        (space_y.m(&imgs[i], &imgs[j], e.t), space_x.m(&pts[i], &pts[j], e.t_out))
    })
}

/// Every point of `window_y` has `M'(f x, y, t) > 1 - r` for some `x` in
/// `window_x`.
pub fn check_coarsely_onto(
    space_y: &FuzzyMetricSpace,
    f: &CoarseMap,
    params: ScaleParams,
    window_y: &Window,
    window_x: &Window,
) -> Result<CertReport> {
    space_y.validate_window(window_y)?;
    let imgs = f.images(space_y, window_x)?;
    let (t, thr) = (params.t(), params.threshold());
    let mut report = CertReport::new(format!("onto:{}", window_y.label()));
    let miss = window_y.points().iter().find_map(|y| {
        let best = imgs
            .iter()
            .zip(window_x.points())
            .map(|(fx, x)| (space_y.m(fx, y, t), x))
            .max_by(|a, b| a.0.cmp(&b.0));
        match best {
            Some((v, _)) if v > thr => None,
            Some((v, x)) => Some((y.clone(), Some((x.clone(), v)))),
            None => Some((y.clone(), None)),
        }
    });
    let mut rec = Record::verdict("coarsely-onto", miss.is_none())
        .params(params)
        .window(window_y);
    if let Some((y, best)) = miss {
        rec = match best {
            Some((x, v)) => rec.witness([y, x]).value("best_M", v.reduced()),
            None => rec.witness([y]).note("empty source window"),
        };
    }
    report.push(rec);
    Ok(report)
}

/// A closeness certificate: `M(f x, g x, t) > 1 - r`, or `>=` when
/// `inclusive` (chains through a non-strict t-norm only give `>=`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosenessCert {
    pub params: ScaleParams,
    #[serde(default)]
    pub inclusive: bool,
}

impl ClosenessCert {
    pub fn strict(params: ScaleParams) -> Self {
        ClosenessCert {
            params,
            inclusive: false,
        }
    }

    fn holds(&self, v: Rational) -> bool {
        if self.inclusive {
            v >= self.params.threshold()
        } else {
            v > self.params.threshold()
        }
    }
}

/// `M(f x, g x, t) > 1 - r` at every point of `window_x`.
pub fn check_close(
    space_y: &FuzzyMetricSpace,
    f: &CoarseMap,
    g: &CoarseMap,
    params: ScaleParams,
    window_x: &Window,
) -> Result<CertReport> {
    check_close_cert(space_y, f, g, ClosenessCert::strict(params), window_x)
}

/// [`check_close`] honouring an inclusive certificate.
pub fn check_close_cert(
    space_y: &FuzzyMetricSpace,
    f: &CoarseMap,
    g: &CoarseMap,
    cert: ClosenessCert,
    window_x: &Window,
) -> Result<CertReport> {
    let fs = f.images(space_y, window_x)?;
    let gs = g.images(space_y, window_x)?;
    let t = cert.params.t();
    let mut worst: Option<(usize, Rational)> = None;
    for (i, (a, b)) in fs.iter().zip(&gs).enumerate() {
        let v = space_y.m(a, b, t);
        if worst.as_ref().is_none_or(|w| v < w.1) {
            worst = Some((i, v));
        }
    }
    let mut report = CertReport::new(format!("close:{}", window_x.label()));
    let mut rec = Record::verdict("close", worst.as_ref().is_none_or(|w| cert.holds(w.1)))
        .params(cert.params)
        .window(window_x);
    if cert.inclusive {
        rec = rec.note("inclusive bound M >= 1 - r");
    }
    if let Some((i, v)) = worst {
        rec = rec.witness([window_x.points()[i].clone()]).value("min_M", v.reduced());
    }
    report.push(rec);
    Ok(report)
}

/// From `f ~ f'` at `(r, t)`, `g ~ g'` at `(r', t')` and an expansive entry
/// `(A, tau) -> (B, t'')` of `g'` with `A <= 1 - r` and `tau >= t`:
/// `M(g f x, g' f' x, t' + t'') >= (1 - r') * B`.
pub fn compose_closeness(
    space_z: &FuzzyMetricSpace,
    cert_ff: ClosenessCert,
    cert_gg: ClosenessCert,
    g_entry: ModulusEntry,
) -> Result<ClosenessCert> {
    if g_entry.a > cert_ff.params.threshold() || g_entry.t < cert_ff.params.t() {
        return Err(Error::Precondition(format!(
            "expansive entry ({}, {}) does not apply to closeness at ({})",
            g_entry.a, g_entry.t, cert_ff.params
        )));
    }
    if !g_entry.b.is_positive() {
        return Err(Error::Certification(format!(
            "expansive bound B = {} is not positive",
            g_entry.b
        )));
    }
    let lower = space_z.tnorm.apply(cert_gg.params.threshold(), g_entry.b);
    if !lower.is_positive() {
        return Err(Error::Certification(format!(
            "(1 - r') {} B = 0; the chain collapses",
            space_z.tnorm
        )));
    }
    Ok(ClosenessCert {
        params: ScaleParams::new(lower.complement(), cert_gg.params.t() + g_entry.t_out)?,
        inclusive: cert_gg.inclusive || !space_z.tnorm.is_strictly_monotone(),
    })
}

/// A coarse inverse `g` with its two closeness certificates.
#[derive(Clone, Debug)]
pub struct CoarseInverse {
    pub map: CoarseMap,
    /// `f ∘ g ~ id_Y`.
    pub fg: ClosenessCert,
    /// `g ∘ f ~ id_X`, through `f`'s properness.
    pub gf: ClosenessCert,
    pub report: CertReport,
}

/// `g(y)` is the smallest `x` in `window_x` with `M'(f x, y, t) > 1 - r`,
/// defined on `window_y` and on `f(window_x)`.
pub fn construct_coarse_inverse(
    space_x: &FuzzyMetricSpace,
    space_y: &FuzzyMetricSpace,
    f: &CoarseMap,
    params: ScaleParams,
    window_y: &Window,
    window_x: &Window,
) -> Result<CoarseInverse> {
    let onto = check_coarsely_onto(space_y, f, params, window_y, window_x)?;
    if let Some(bad) = onto.failures().next() {
        return Err(Error::Precondition(format!(
            "f is not coarsely onto at ({params}): {} has no preimage nearby",
            bad.witness.first().map_or("-".into(), |p| p.to_string())
        )));
    }
    let imgs = f.images(space_y, window_x)?;
    let (t, thr) = (params.t(), params.threshold());
    let mut domain: PointSet = window_y.to_set();
    domain.extend(imgs.iter().cloned());
    let mut pairs = Vec::with_capacity(domain.len());
    for y in &domain {
        let x = window_x
            .points()
            .iter()
            .zip(&imgs)
            .find(|(_, fx)| space_y.m(fx, y, t) > thr)
            .map(|(x, _)| x.clone())
            .expect("onto on the window, and images are their own witnesses");
        pairs.push((y.clone(), x));
    }
    let g = CoarseMap::table(pairs);

    let mut report = CertReport::new(format!("coarse-inverse:{params}"));
    report.absorb(onto);
    let fg = ClosenessCert::strict(params);
    let fg_map = g.then(f, window_y)?;
    let mut rep = check_close(space_y, &fg_map, &CoarseMap::identity(), params, window_y)?;
    rep.subject = format!("close-fg:{}", window_y.label());
    report.absorb(rep);

    // M'(f g f x, f x, t) > 1 - r >= C, so M(g f x, x, t_out) >= D.
    let entry = f.proper.iter().find(|e| e.a <= thr && e.t >= t).ok_or_else(|| {
        Error::Derivation(format!(
            "no properness entry (C, tau) with C <= {thr} and tau >= {t} to bound g ∘ f"
        ))
    })?;
    if !entry.b.in_open_unit_interval() {
        return Err(Error::Derivation(format!(
            "properness entry yields D = {}, outside (0, 1)",
            entry.b
        )));
    }
    let gf = ClosenessCert {
        params: ScaleParams::new(entry.b.complement(), entry.t_out)?,
        inclusive: true,
    };
    let gf_map = f.then(&g, window_x)?;
    let mut rep = check_close_cert(space_x, &gf_map, &CoarseMap::identity(), gf, window_x)?;
    rep.subject = format!("close-gf:{}", window_x.label());
    report.absorb(rep);
    Ok(CoarseInverse { map: g, fg, gf, report })
}

/// The parameter flow of witness transport, all values exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportPlan {
    pub target: ScaleParams,
    /// Onto parameters `(r1, t1)`.
    pub onto: ScaleParams,
    /// Grid point `s` whose image `(1 - r1) * s * (1 - r1)` is `epsilon`.
    pub grid_s: Rational,
    pub epsilon: Rational,
    /// Properness entry `(C, 2 t1 + t) -> (D, t2)` with `C <= epsilon`.
    pub proper: ModulusEntry,
    /// `(R, T)` for the source witness: `1 - R = D`, `T = t2`.
    pub source: ScaleParams,
}

/// Granularity of the `epsilon` scan.
pub const EPSILON_GRID: i128 = 256;

/// Derives `(R, T)` so that an `(R, T)`-disjoint witness for `X` pushes
/// forward to an `(r, t)`-disjoint one for `Y`.
///
/// With `phi(s) = (1 - r1) * s * (1 - r1)` non-decreasing, any
/// `0 < epsilon < phi(1 - r)` forces `M'(x, y, t) < 1 - r` whenever
/// `phi(M'(x, y, t)) <= epsilon`; `epsilon` is `phi` at the largest grid
/// point `k/256 < 1 - r` where that holds.
pub fn plan_transport(space_y: &FuzzyMetricSpace, f: &CoarseMap, target: ScaleParams) -> Result<TransportPlan> {
    let onto = f
        .onto
        .ok_or_else(|| Error::Derivation("missing onto parameters (r1, t1)".into()))?;
    let c1 = onto.threshold();
    let phi = |s: Rational| space_y.tnorm.fold([c1, s, c1]);
    let top = phi(target.threshold());
    let (grid_s, epsilon) = (1..EPSILON_GRID)
        .rev()
        .map(|k| Rational::new(k, EPSILON_GRID))
        .filter(|&s| s < target.threshold())
        .map(|s| (s, phi(s)))
        .find(|&(_, e)| e.is_positive() && e < top)
        .ok_or_else(|| {
            Error::Derivation(format!(
                "(1 - r1) * s * (1 - r1) is constant on the 1/{EPSILON_GRID} grid below {}",
                target.threshold()
            ))
        })?;
    let tau = onto.t() + onto.t() + target.t();
    let proper = *f
        .proper
        .iter()
        .find(|e| e.t >= tau && e.a <= epsilon && e.a.is_positive())
        .ok_or_else(|| {
            Error::Derivation(format!(
                "missing properness entry (C, tau) -> (D, t2) with 0 < C <= {epsilon} and tau >= {tau}"
            ))
        })?;
    if !proper.b.is_positive() {
        return Err(Error::Derivation(format!("properness entry has D = {} <= 0", proper.b)));
    }
    let r_src = if proper.b >= Rational::one() {
        Rational::half()
    } else {
        proper.b.complement()
    };
    Ok(TransportPlan {
        target,
        onto,
        grid_s,
        epsilon,
        proper,
        source: ScaleParams::new(r_src, proper.t_out)?,
    })
}

/// Pushes a witness for `X` through `f` to a witness for `Y` at `target`
/// on `window_y`: families `N_{r1,t1}(f(U))`.
///
/// `source` is used when it is at least as strong as the derived `(R, T)`
/// (`R' >= R`, `T' >= T`); otherwise the built-in constructor for `X` is run
/// at `(R, T)` on `window_x`.
#[allow(clippy::too_many_arguments)]
pub fn push_witness(
    space_x: &FuzzyMetricSpace,
    space_y: &FuzzyMetricSpace,
    f: &CoarseMap,
    source: Option<&DimensionWitness>,
    target: ScaleParams,
    window_x: &Window,
    window_y: &Window,
) -> Result<(DimensionWitness, CertReport)> {
    space_y.validate_window(window_y)?;
    let plan = plan_transport(space_y, f, target)?;
    let mut report = CertReport::new(format!("transport:{target}"));
    let wx = match source {
        Some(w) if w.params.r() >= plan.source.r() && w.params.t() >= plan.source.t() => w.clone(),
        _ => construct_witness(space_x, plan.source, window_x)?,
    };
    let src = verify_witness(space_x, &wx)?;
    if let Some(bad) = src.failures().next() {
        return Err(Error::Precondition(format!(
            "source witness fails {} at ({})",
            bad.predicate, wx.params
        )));
    }
    report.absorb(src);

    let used = f.clone().with_proper(vec![plan.proper]);
    report.absorb(check_proper(space_x, space_y, &used, &wx.window)?);
    report.absorb(check_coarsely_onto(space_y, f, plan.onto, window_y, &wx.window)?);

    // f(U) is bounded through an expansive entry (A, tau) -> (B, t'') with
    // A <= 1 - r_b and tau >= t_b
    let bound = wx.bound_params;
    let entry = *f
        .expansive
        .iter()
        .find(|e| e.a <= bound.threshold() && e.t >= bound.t() && e.b.is_positive())
        .ok_or_else(|| {
            Error::Derivation(format!(
                "missing expansive entry (A, tau) -> (B, t'') with A <= {} and tau >= {}",
                bound.threshold(),
                bound.t()
            ))
        })?;
    let used = f.clone().with_expansive(vec![entry]);
    report.absorb(check_expansive(space_x, space_y, &used, &wx.window)?);
    if let Some(bad) = report.failures().next() {
        return Err(Error::Precondition(format!(
            "transport hypothesis fails: {}",
            bad.predicate
        )));
    }

    let mut families = Vec::with_capacity(wx.families.len());
    for fam in &wx.families {
        let sets = fam
            .sets()
            .iter()
            .map(|u| u.iter().map(|x| f.apply(x)).collect::<Result<PointSet>>())
            .collect::<Result<Vec<_>>>()?;
        let image = Family::new(format!("f({})", fam.label), sets);
        let worst = family_min_pair(space_y, &image, entry.t_out);
        let mut rec = Record::verdict("image-bounded", worst.as_ref().is_none_or(|e| e.value >= entry.b))
            .value("B", entry.b)
            .value("t", entry.t_out)
            .note(format!("family {}: M >= B", image.label));
        if let Some(e) = worst {
            rec = rec.witness([e.x, e.y]).value("min_M", e.value);
        }
        report.push(rec);
        families.push(Family::new(
            format!("N({})", image.label),
            image
                .sets()
                .iter()
                .map(|u| neighborhood_unchecked(space_y, u, plan.onto, window_y)),
        ));
    }
    // x, y in N(f(U)): M(x, y, 2 t1 + t'') >= (1 - r1) * B * (1 - r1)
    let lower = space_y
        .tnorm
        .fold([plan.onto.threshold(), entry.b, plan.onto.threshold()]);
    if !lower.is_positive() {
        return Err(Error::Derivation(
            "neighborhood bound (1 - r1) * B * (1 - r1) is 0".into(),
        ));
    }
    let out_bound = ScaleParams::new(
        (lower / Rational::from_int(2)).complement(),
        plan.onto.t() + plan.onto.t() + entry.t_out,
    )?;
    let w = DimensionWitness::new(wx.n, target, out_bound, window_y.clone(), families).with_note(format!(
        "transport: r1 = {}, t1 = {}, s = {}, epsilon = {}, R = {}, T = {}",
        plan.onto.r(),
        plan.onto.t(),
        plan.grid_s,
        plan.epsilon,
        plan.source.r(),
        plan.source.t()
    ));
    report.push(
        Record::pass("derivation")
            .params(plan.source)
            .value("epsilon", plan.epsilon)
            .value("grid_s", plan.grid_s)
            .value("r1", plan.onto.r())
            .value("t1", plan.onto.t()),
    );
    report.absorb(verify_witness(space_y, &w)?);
    Ok((w, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asdim::{integer_blocks_witness, translate_metric_witness};
    use crate::point::int_set;
    use crate::rational::q;
    use crate::tnorm::TNorm;

    fn sp(r: Rational, t: Rational) -> ScaleParams {
        ScaleParams::new(r, t).unwrap()
    }

    fn n(v: i128) -> Rational {
        Rational::from_int(v)
    }

    fn z() -> FuzzyMetricSpace {
        FuzzyMetricSpace::standard_integers()
    }

    #[test]
    fn identity_and_doubling_moduli() {
        let levels = [q(1, 4), q(1, 2), q(3, 4)];
        let times = [n(1), n(2), n(5)];
        let w = Window::range(-15, 15);
        let id = CoarseMap::identity()
            .with_standard_affine_moduli(&levels, &times)
            .unwrap();
        assert!(check_expansive(&z(), &z(), &id, &w).unwrap().passed());
        assert!(check_proper(&z(), &z(), &id, &w).unwrap().passed());
        let dbl = CoarseMap::affine(n(2), n(0))
            .with_standard_affine_moduli(&levels, &times)
            .unwrap();
        assert!(check_expansive(&z(), &z(), &dbl, &w).unwrap().passed());
        assert!(check_proper(&z(), &z(), &dbl, &w).unwrap().passed());
        assert!(dbl.expansive.contains(&ModulusEntry::new(q(1, 2), n(1), q(1, 2), n(2))));
        assert!(dbl.proper.contains(&ModulusEntry::new(q(1, 2), n(2), q(1, 2), n(1))));
    }

    #[test]
    fn empty_modulus_is_precondition() {
        let w = Window::range(0, 3);
        assert!(matches!(
            check_expansive(&z(), &z(), &CoarseMap::identity(), &w),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            check_proper(&z(), &z(), &CoarseMap::identity(), &w),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn constant_map_is_not_proper() {
        let c = CoarseMap::affine(n(0), n(7)).with_proper(vec![ModulusEntry::new(q(1, 2), n(1), q(1, 2), n(1))]);
        let w = Window::from_points([0, 100].map(Point::Int));
        let rep = check_proper(&z(), &z(), &c, &w).unwrap();
        let rec = rep.find("proper[0]").unwrap();
        assert!(rec.is_fail());
        // M(0, 100, 1) = 1/101
        assert_eq!(rec.values["conclusion"], q(1, 101));
        assert_eq!(rec.values["premise"], n(1));
    }

    #[test]
    fn wrong_modulus_fails_with_pair() {
        // doubling does not keep M at the same time
        let dbl = CoarseMap::affine(n(2), n(0)).with_expansive(vec![ModulusEntry::new(q(1, 2), n(1), q(1, 2), n(1))]);
        let rep = check_expansive(&z(), &z(), &dbl, &Window::range(0, 5)).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.records[0].witness.len(), 2);
    }

    #[test]
    fn onto_checks() {
        let reals = FuzzyMetricSpace::standard_reals();
        let ints = Window::range(-3, 3);
        let grid = Window::grid(-3, 3, 4);
        assert!(
            check_coarsely_onto(&reals, &CoarseMap::inclusion(), sp(q(1, 2), n(1)), &grid, &ints)
                .unwrap()
                .passed()
        );
        // threshold rt/(1-r) = 1/2 is not above the gap 1/2 at half-integers
        assert!(
            !check_coarsely_onto(&reals, &CoarseMap::inclusion(), sp(q(1, 3), n(1)), &grid, &ints)
                .unwrap()
                .passed()
        );
        let dbl = CoarseMap::affine(n(2), n(0));
        let rep = check_coarsely_onto(
            &z(),
            &dbl,
            sp(q(1, 2), n(1)),
            &Window::range(-6, 6),
            &Window::range(-3, 3),
        )
        .unwrap();
        let rec = rep.find("coarsely-onto").unwrap();
        assert!(rec.is_fail());
        assert_eq!(rec.witness[0].as_int().unwrap().rem_euclid(2), 1);
        assert!(check_coarsely_onto(
            &z(),
            &dbl,
            sp(q(1, 2), n(2)),
            &Window::range(-6, 6),
            &Window::range(-3, 3)
        )
        .unwrap()
        .passed());
    }

    #[test]
    fn closeness_boundary() {
        let f = CoarseMap::identity();
        let g = CoarseMap::affine(n(1), n(1));
        let w = Window::range(-10, 10);
        assert!(check_close(&z(), &f, &g, sp(q(1, 2), n(2)), &w).unwrap().passed());
        assert!(!check_close(&z(), &f, &g, sp(q(1, 2), n(1)), &w).unwrap().passed());
        assert!(check_close(&z(), &f, &f, sp(q(1, 100), n(1)), &w).unwrap().passed());
        // symmetric
        assert!(check_close(&z(), &g, &f, sp(q(1, 2), n(2)), &w).unwrap().passed());
    }

    #[test]
    fn composition_arithmetic() {
        let cert = |r, t, inc| ClosenessCert {
            params: sp(r, t),
            inclusive: inc,
        };
        let entry = ModulusEntry::new(q(1, 2), n(1), q(1, 2), n(3));
        let c = compose_closeness(&z(), cert(q(1, 2), n(1), false), cert(q(1, 2), n(2), false), entry).unwrap();
        assert_eq!(c.params, sp(q(3, 4), n(5)));
        assert!(!c.inclusive);
        let min = z().with_tnorm(TNorm::Minimum);
        let entry = ModulusEntry::new(q(1, 2), n(1), q(1, 3), n(3));
        let c = compose_closeness(&min, cert(q(1, 2), n(1), false), cert(q(1, 2), n(2), false), entry).unwrap();
        assert_eq!(c.params.threshold(), q(1, 3));
        assert!(c.inclusive);
        let zero = ModulusEntry::new(q(1, 2), n(1), n(0), n(3));
        assert!(matches!(
            compose_closeness(&z(), cert(q(1, 2), n(1), false), cert(q(1, 2), n(2), false), zero),
            Err(Error::Certification(_))
        ));
        let luk = z().with_tnorm(TNorm::Lukasiewicz);
        let small = ModulusEntry::new(q(1, 2), n(1), q(1, 3), n(3));
        assert!(matches!(
            compose_closeness(&luk, cert(q(1, 2), n(1), false), cert(q(1, 2), n(2), false), small),
            Err(Error::Certification(_))
        ));
    }

    #[test]
    fn composed_cert_rechecks() {
        // f = id, f' = x + 1 close at (1/2, 2); g = 2x, g' = 2x + 1 close at (1/2, 2)
        let w = Window::range(-20, 20);
        let f = CoarseMap::identity();
        let f2 = CoarseMap::affine(n(1), n(1));
        let g = CoarseMap::affine(n(2), n(0));
        let g2 = CoarseMap::affine(n(2), n(1));
        let p = sp(q(1, 2), n(2));
        assert!(check_close(&z(), &f, &f2, p, &w).unwrap().passed());
        assert!(check_close(&z(), &g, &g2, p, &w).unwrap().passed());
        let g2 = g2.with_standard_affine_moduli(&[q(1, 2)], &[n(2)]).unwrap();
        assert!(check_expansive(&z(), &z(), &g2, &w).unwrap().passed());
        let c = compose_closeness(
            &z(),
            ClosenessCert::strict(p),
            ClosenessCert::strict(p),
            g2.expansive[0],
        )
        .unwrap();
        let gf = f.then(&g, &w).unwrap();
        let gf2 = f2.then(&g2, &w).unwrap();
        assert_eq!(gf2.apply(&Point::Int(3)).unwrap(), Point::Int(9));
        assert!(check_close_cert(&z(), &gf, &gf2, c, &w).unwrap().passed());
    }

    #[test]
    fn inverse_of_inclusion() {
        let reals = FuzzyMetricSpace::standard_reals();
        let ints = Window::range(-5, 5);
        let grid = Window::grid(-5, 5, 4);
        let f = CoarseMap::inclusion()
            .with_standard_affine_moduli(&[q(1, 2)], &[n(1), n(3)])
            .unwrap();
        let inv = construct_coarse_inverse(&z(), &reals, &f, sp(q(1, 2), n(1)), &grid, &ints).unwrap();
        assert!(inv.report.passed(), "{}", inv.report.to_jsonl());
        // smallest integer strictly within distance 1
        assert_eq!(inv.map.apply(&Point::real(q(1, 2))).unwrap(), Point::Int(0));
        assert_eq!(inv.map.apply(&Point::Int(1)).unwrap(), Point::Int(1));
        assert_eq!(inv.map.apply(&Point::real(q(-3, 4))).unwrap(), Point::Int(-1));
        assert_eq!(inv.gf.params, sp(q(1, 2), n(1)));
    }

    #[test]
    fn inverse_of_identity_is_identity() {
        let f = CoarseMap::identity()
            .with_standard_affine_moduli(&[q(1, 2)], &[n(1)])
            .unwrap();
        let w = Window::range(0, 12);
        let inv = construct_coarse_inverse(&z(), &z(), &f, sp(q(1, 3), n(1)), &w, &w).unwrap();
        for p in w.points() {
            assert_eq!(&inv.map.apply(p).unwrap(), p);
        }
    }

    #[test]
    fn inverse_needs_onto() {
        let dbl = CoarseMap::affine(n(2), n(0));
        assert!(matches!(
            construct_coarse_inverse(
                &z(),
                &z(),
                &dbl,
                sp(q(1, 2), n(1)),
                &Window::range(0, 8),
                &Window::range(0, 4)
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn transport_plan_values() {
        let reals = FuzzyMetricSpace::standard_reals();
        let f = CoarseMap::inclusion()
            .with_onto(sp(q(1, 2), n(1)))
            .with_standard_affine_moduli(&[q(85, 512)], &[n(3)])
            .unwrap();
        let plan = plan_transport(&reals, &f, sp(q(1, 3), n(1))).unwrap();
        // largest k/256 below 2/3 is 170/256; (1/2)(170/256)(1/2) = 85/512
        let s = (1..256).rev().map(|k| q(k, 256)).find(|&s| s < q(2, 3)).unwrap();
        assert_eq!(plan.grid_s, s);
        assert_eq!(plan.epsilon, s / n(4));
        assert_eq!(plan.epsilon, q(85, 512));
        assert_eq!(plan.source, sp(q(427, 512), n(3)));

        let thin = CoarseMap::inclusion().with_onto(sp(q(1, 2), n(1)));
        assert!(matches!(
            plan_transport(&reals, &thin, sp(q(1, 3), n(1))),
            Err(Error::Derivation(_))
        ));
        assert!(matches!(
            plan_transport(&reals, &CoarseMap::inclusion(), sp(q(1, 3), n(1))),
            Err(Error::Derivation(_))
        ));
    }

    #[test]
    fn transport_integers_to_reals() {
        let reals = FuzzyMetricSpace::standard_reals();
        let wx = Window::range(-60, 60);
        let wy = Window::grid(-50, 50, 2);
        let f = CoarseMap::inclusion()
            .with_onto(sp(q(1, 2), n(1)))
            .with_standard_affine_moduli(&[q(1, 8), q(85, 512), q(1, 2)], &[n(1), n(3), n(64)])
            .unwrap();
        let (w, rep) = push_witness(&z(), &reals, &f, None, sp(q(1, 3), n(1)), &wx, &wy).unwrap();
        assert!(rep.passed(), "{}", rep.to_jsonl());
        assert_eq!(w.n, 1);
        assert!(verify_witness(&reals, &w).unwrap().passed());
        // a weaker supplied witness is replaced by the constructed one
        let weak = integer_blocks_witness(&z(), sp(q(1, 2), n(1)), &wx).unwrap();
        let (w2, _) = push_witness(&z(), &reals, &f, Some(&weak), sp(q(1, 3), n(1)), &wx, &wy).unwrap();
        assert_eq!(w2, w);
    }

    #[test]
    fn transport_singletons_through_doubling() {
        let xs: Vec<i64> = std::iter::once(0).chain((1..=10).map(|k| 100 * k)).collect();
        let wx = Window::from_points(xs.iter().map(|&v| Point::Int(v)));
        let wy = Window::from_points(xs.iter().map(|&v| Point::Int(2 * v)));
        let f = CoarseMap::affine(n(2), n(0))
            .with_onto(sp(q(1, 2), n(1)))
            .with_standard_affine_moduli(&[q(1, 2), q(127, 1024)], &[n(1), n(4)])
            .unwrap();
        let plan = plan_transport(&z(), &f, sp(q(1, 2), n(1))).unwrap();
        let singles = Family::new("points", xs.iter().map(|&v| int_set([v])));
        let src = translate_metric_witness(&z(), vec![singles], n(99), plan.source, &wx).unwrap();
        assert_eq!(src.n, 0);
        let (w, rep) = push_witness(&z(), &z(), &f, Some(&src), sp(q(1, 2), n(1)), &wx, &wy).unwrap();
        assert!(rep.passed(), "{}", rep.to_jsonl());
        assert_eq!(w.n, 0);
        assert_eq!(w.families[0].sets().len(), 11);
        assert!(w.families[0].sets().iter().all(|s| s.len() == 1));
    }

    #[test]
    fn map_serde_round_trip() {
        let f = CoarseMap::table([(Point::Int(1), Point::Int(2)), (Point::Int(0), Point::Int(5))])
            .with_onto(sp(q(1, 2), n(1)))
            .with_expansive(vec![ModulusEntry::new(q(1, 2), n(1), q(1, 3), n(2))]);
        let json = serde_json::to_string(&f).unwrap();
        let back: CoarseMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        let a: CoarseMap = serde_json::from_str(r#"{"mapping":{"rule":"affine","a":"2","b":"-1/2"}}"#).unwrap();
        assert_eq!(a.apply(&Point::Int(1)).unwrap(), Point::real(q(3, 2)));
    }
}
