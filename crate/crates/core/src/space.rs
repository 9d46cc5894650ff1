//! Fuzzy metric spaces: exact evaluation of `M(x, y, t)`, axiom checks,
//! balls, boundedness and the bridge between metric and fuzzy thresholds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{Point, PointSet, Window};
use crate::rational::Rational;
use crate::report::{CertReport, Record};
use crate::tnorm::{TNorm, TNormRule};

/// A scale `(r, t)` with `0 < r < 1` and `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawScale")]
pub struct ScaleParams {
    r: Rational,
    t: Rational,
}

#[derive(Deserialize)]
struct RawScale {
    r: Rational,
    t: Rational,
}

impl TryFrom<RawScale> for ScaleParams {
    type Error = Error;
    fn try_from(raw: RawScale) -> Result<Self> {
        ScaleParams::new(raw.r, raw.t)
    }
}

impl ScaleParams {
    pub fn new(r: Rational, t: Rational) -> Result<Self> {
        if !r.in_open_unit_interval() {
            return Err(Error::Domain(format!("r = {r} must lie in (0,1)")));
        }
        if !t.is_positive() {
            return Err(Error::Domain(format!("t = {t} must be positive")));
        }
        Ok(ScaleParams {
            r: r.reduced(),
            t: t.reduced(),
        })
    }

    pub fn r(&self) -> Rational {
        self.r
    }

    pub fn t(&self) -> Rational {
        self.t
    }

    /// `1 - r`: values strictly above it are "close" at this scale.
    pub fn threshold(&self) -> Rational {
        self.r.complement()
    }

    pub fn with_t(&self, t: Rational) -> Result<Self> {
        ScaleParams::new(self.r, t)
    }
}

impl fmt::Display for ScaleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.r, self.t)
    }
}

impl FromStr for ScaleParams {
    type Err = Error;

    /// Parses `r:t`, e.g. `1/2:3`.
    fn from_str(s: &str) -> Result<Self> {
        let (r, t) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("scale {s:?} must be r:t")))?;
        ScaleParams::new(r.trim().parse()?, t.trim().parse()?)
    }
}

/// A metric whose standard fuzzy metric is `t / (t + d(x, y))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricDescriptor {
    /// `|x - y|` on integer points.
    EuclideanIntegers,
    /// `|x - y|` on rational samples of the real line.
    EuclideanReals,
    /// The `l1` (word) metric on `Z^dim`.
    TaxicabLattice { dim: usize },
    /// `max(x, y)` for `x != y` on the naturals; an ultrametric.
    MaxUltrametric,
    /// A symmetric table over points `0..n`.
    ExplicitTable { table: Vec<Vec<Rational>> },
}

impl MetricDescriptor {
    /// Distance between two points of this metric's universe. Callers must
    /// have checked membership.
    #[inline]
    pub fn distance(&self, x: &Point, y: &Point) -> Rational {
        match (self, x, y) {
            (MetricDescriptor::EuclideanIntegers, Point::Int(a), Point::Int(b)) => {
                Rational::from_int((*a as i128 - *b as i128).abs())
            }
            (MetricDescriptor::MaxUltrametric, Point::Int(a), Point::Int(b)) => {
                if a == b {
                    Rational::zero()
                } else {
                    Rational::from_int((*a).max(*b) as i128)
                }
            }
            (MetricDescriptor::TaxicabLattice { .. }, Point::Lattice(a), Point::Lattice(b)) => {
                let s: i128 = a.iter().zip(b).map(|(u, v)| (*u as i128 - *v as i128).abs()).sum();
                Rational::from_int(s)
            }
            (MetricDescriptor::ExplicitTable { table }, Point::Int(a), Point::Int(b)) => {
                table[*a as usize][*b as usize]
            }
            (MetricDescriptor::EuclideanReals, a, b) => {
                let (a, b) = (
                    a.as_rational().expect("real point"),
                    b.as_rational().expect("real point"),
                );
                (a - b).abs()
            }
            _ => panic!("distance called on points outside the metric's universe"),
        }
    }

    pub fn universe(&self) -> Universe {
        match self {
            MetricDescriptor::EuclideanIntegers => Universe::Integers,
            MetricDescriptor::EuclideanReals => Universe::Reals,
            MetricDescriptor::TaxicabLattice { dim } => Universe::Lattice { dim: *dim },
            MetricDescriptor::MaxUltrametric => Universe::Naturals,
            MetricDescriptor::ExplicitTable { table } => {
                Universe::Finite((0..table.len() as i64).map(Point::Int).collect())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            MetricDescriptor::TaxicabLattice { dim } if *dim == 0 => {
                Err(Error::Domain("lattice dimension must be positive".into()))
            }
            MetricDescriptor::ExplicitTable { table } => {
                let n = table.len();
                if table.iter().any(|row| row.len() != n) {
                    return Err(Error::Domain("metric table must be square".into()));
                }
                for i in 0..n {
                    for j in 0..n {
                        let d = table[i][j];
                        if table[j][i] != d {
                            return Err(Error::Domain(format!("metric table not symmetric at ({i},{j})")));
                        }
                        if (i == j) != d.is_zero() || d.is_negative() {
                            return Err(Error::Domain(format!("metric table invalid at ({i},{j}): {d}")));
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Checks symmetry, identity of indiscernibles and the triangle
    /// inequality on `window`; the ultrametric rule additionally checks the
    /// strong triangle inequality.
    pub fn check_axioms(&self, window: &Window) -> Result<CertReport> {
        let universe = self.universe();
        if let Some(p) = window.points().iter().find(|p| !universe.contains(p)) {
            return Err(Error::Domain(format!("point {p} outside the metric's universe")));
        }
        let pts = window.points();
        let mut report = CertReport::new("metric");
        let mut bad: Option<Record> = None;
        'pairs: for x in pts {
            for y in pts {
                let d = self.distance(x, y);
                if d != self.distance(y, x) || (x == y) != d.is_zero() || d.is_negative() {
                    bad = Some(
                        Record::fail("metric-basic")
                            .witness([x.clone(), y.clone()])
                            .value("d", d),
                    );
                    break 'pairs;
                }
            }
        }
        report.push(bad.unwrap_or_else(|| Record::pass("metric-basic").window(window)));
        let ultra = matches!(self, MetricDescriptor::MaxUltrametric);
        let mut bad: Option<Record> = None;
        'triples: for x in pts {
            for y in pts {
                let dxy = self.distance(x, y);
                for z in pts {
                    let (dyz, dxz) = (self.distance(y, z), self.distance(x, z));
                    let bound = if ultra { dxy.max(dyz) } else { dxy + dyz };
                    if dxz > bound {
                        bad = Some(
                            Record::fail("metric-triangle")
                                .witness([x.clone(), y.clone(), z.clone()])
                                .value("dxz", dxz)
                                .value("bound", bound),
                        );
                        break 'triples;
                    }
                }
            }
        }
        report.push(bad.unwrap_or_else(|| Record::pass("metric-triangle").window(window)));
        Ok(report)
    }
}

/// The point universe of a space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Universe {
    Integers,
    /// `{1, 2, 3, ...}`
    Naturals,
    /// Rational samples of the real line.
    Reals,
    Lattice {
        dim: usize,
    },
    Finite(PointSet),
}

impl Universe {
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Universe::Integers, Point::Int(_)) => true,
            (Universe::Naturals, Point::Int(v)) => *v >= 1,
            (Universe::Reals, Point::Int(_) | Point::Real(_)) => true,
            (Universe::Lattice { dim }, Point::Lattice(v)) => v.len() == *dim,
            (Universe::Finite(set), p) => set.contains(p),
            _ => false,
        }
    }
}

/// How `M` is computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricRule {
    /// `t / (t + d(x, y))`.
    StandardFromMetric(MetricDescriptor),
    /// On the naturals: `1/2` between distinct points other than `1`, and
    /// `1/x` between `1` and `x`. A fuzzy metric only under Lukasiewicz.
    PathologicalOneOver,
    /// `1 / (xy)` for distinct naturals.
    ReciprocalProduct,
    /// `min(x, y) / max(x, y)` on the naturals.
    RatioMinMax,
    /// Standard fuzzy metric of the max-ultrametric; non-Archimedean under
    /// the minimum t-norm.
    UltrametricStandard,
}

/// A fuzzy metric space `(X, M, *)`. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzyMetricSpace {
    pub universe: Universe,
    pub tnorm: TNorm,
    pub rule: MetricRule,
}

/// Tags accepted by [`FuzzyMetricSpace::builtin`].
pub const BUILTIN_KINDS: [&str; 7] = [
    "standard",
    "standard_reals",
    "lattice:<dim>",
    "pathological",
    "reciprocal_product",
    "ratio_minmax",
    "ultrametric",
];

impl FuzzyMetricSpace {
    pub fn new(rule: MetricRule, tnorm: TNorm) -> Result<Self> {
        let universe = match &rule {
            MetricRule::StandardFromMetric(m) => {
                m.validate()?;
                m.universe()
            }
            _ => Universe::Naturals,
        };
        Ok(FuzzyMetricSpace { universe, tnorm, rule })
    }

    /// Standard fuzzy metric of `|x - y|` on the integers, product t-norm.
    pub fn standard_integers() -> Self {
        Self::new(
            MetricRule::StandardFromMetric(MetricDescriptor::EuclideanIntegers),
            TNorm::Product,
        )
        .unwrap()
    }

    pub fn standard_reals() -> Self {
        Self::new(
            MetricRule::StandardFromMetric(MetricDescriptor::EuclideanReals),
            TNorm::Product,
        )
        .unwrap()
    }

    pub fn standard_lattice(dim: usize) -> Result<Self> {
        Self::new(
            MetricRule::StandardFromMetric(MetricDescriptor::TaxicabLattice { dim }),
            TNorm::Product,
        )
    }

    pub fn standard_from_table(table: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(
            MetricRule::StandardFromMetric(MetricDescriptor::ExplicitTable { table }),
            TNorm::Product,
        )
    }

    pub fn pathological(tnorm: TNorm) -> Self {
        Self::new(MetricRule::PathologicalOneOver, tnorm).unwrap()
    }

    pub fn reciprocal_product() -> Self {
        Self::new(MetricRule::ReciprocalProduct, TNorm::Product).unwrap()
    }

    pub fn ratio_min_max() -> Self {
        Self::new(MetricRule::RatioMinMax, TNorm::Product).unwrap()
    }

    pub fn ultrametric_standard() -> Self {
        Self::new(MetricRule::UltrametricStandard, TNorm::Minimum).unwrap()
    }

    /// A built-in space by config tag, with its default t-norm.
    pub fn builtin(kind: &str) -> Result<Self> {
        match kind.trim() {
            "standard" => Ok(Self::standard_integers()),
            "standard_reals" => Ok(Self::standard_reals()),
            "pathological" => Ok(Self::pathological(TNorm::Lukasiewicz)),
            "reciprocal_product" => Ok(Self::reciprocal_product()),
            "ratio_minmax" => Ok(Self::ratio_min_max()),
            "ultrametric" => Ok(Self::ultrametric_standard()),
            other => {
                if let Some(dim) = other.strip_prefix("lattice:") {
                    let dim = dim
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid lattice dimension in {other:?}")))?;
                    return Self::standard_lattice(dim);
                }
                Err(Error::Parse(format!(
                    "unknown space kind {other:?}; expected one of {}",
                    BUILTIN_KINDS.join(", ")
                )))
            }
        }
    }

    pub fn with_tnorm(mut self, tnorm: TNorm) -> Self {
        self.tnorm = tnorm;
        self
    }

    /// Short human-readable kind tag for reports.
    pub fn kind(&self) -> String {
        let base = match &self.rule {
            MetricRule::StandardFromMetric(m) => match m {
                MetricDescriptor::EuclideanIntegers => "standard".to_string(),
                MetricDescriptor::EuclideanReals => "standard_reals".to_string(),
                MetricDescriptor::TaxicabLattice { dim } => format!("lattice:{dim}"),
                MetricDescriptor::MaxUltrametric => "standard_max_ultrametric".to_string(),
                MetricDescriptor::ExplicitTable { .. } => "standard_table".to_string(),
            },
            MetricRule::PathologicalOneOver => "pathological".to_string(),
            MetricRule::ReciprocalProduct => "reciprocal_product".to_string(),
            MetricRule::RatioMinMax => "ratio_minmax".to_string(),
            MetricRule::UltrametricStandard => "ultrametric".to_string(),
        };
        if matches!(self.universe, Universe::Finite(_)) && !self.is_table() {
            format!("{base}|subspace")
        } else {
            base
        }
    }

    fn is_table(&self) -> bool {
        matches!(
            self.rule,
            MetricRule::StandardFromMetric(MetricDescriptor::ExplicitTable { .. })
        )
    }

    /// The inducing metric, for standard fuzzy spaces.
    pub fn metric(&self) -> Option<&MetricDescriptor> {
        match &self.rule {
            MetricRule::StandardFromMetric(m) => Some(m),
            _ => None,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.universe.contains(p)
    }

    /// Errors unless every window point lies in the universe.
    pub fn validate_window(&self, window: &Window) -> Result<()> {
        self.validate_points(window.points())
    }

    pub fn validate_points<'a, I: IntoIterator<Item = &'a Point>>(&self, pts: I) -> Result<()> {
        for p in pts {
            if !self.contains(p) {
                return Err(Error::Domain(format!(
                    "point {p} outside the universe of {}",
                    self.kind()
                )));
            }
        }
        Ok(())
    }

    /// `M(x, y, t)` exactly and in lowest terms.
    pub fn eval_m(&self, x: &Point, y: &Point, t: Rational) -> Result<Rational> {
        if !t.is_positive() {
            return Err(Error::Domain(format!("t = {t} must be positive")));
        }
        self.validate_points([x, y])?;
        Ok(self.m(x, y, t).reduced())
    }

    /// `M(x, y, t)` without validation and possibly unreduced. Every scan in
    /// the crate goes through this after validating its window once.
    #[inline]
    pub fn m(&self, x: &Point, y: &Point, t: Rational) -> Rational {
        if x == y {
            return Rational::one();
        }
        match &self.rule {
            MetricRule::StandardFromMetric(metric) => {
                let d = metric.distance(x, y);
                standard_value(t, d)
            }
            MetricRule::UltrametricStandard => {
                let d = MetricDescriptor::MaxUltrametric.distance(x, y);
                standard_value(t, d)
            }
            MetricRule::PathologicalOneOver => {
                let (a, b) = (nat(x), nat(y));
                if a == 1 {
                    Rational::raw(1, b)
                } else if b == 1 {
                    Rational::raw(1, a)
                } else {
                    Rational::raw(1, 2)
                }
            }
            MetricRule::ReciprocalProduct => Rational::raw(1, nat(x) * nat(y)),
            MetricRule::RatioMinMax => {
                let (a, b) = (nat(x), nat(y));
                Rational::raw(a.min(b), a.max(b))
            }
        }
    }

    /// `M(U, V, t) = sup` over the cross product; for finite sets the max.
    pub fn set_sup(&self, u: &PointSet, v: &PointSet, t: Rational) -> Result<Rational> {
        if u.is_empty() || v.is_empty() {
            return Err(Error::Domain("sup of M over an empty set is undefined".into()));
        }
        self.validate_points(u.iter().chain(v.iter()))?;
        let mut best = Rational::zero();
        for x in u {
            for y in v {
                best = best.max(self.m(x, y, t));
            }
        }
        Ok(best.reduced())
    }

    /// Verifies the fuzzy metric axioms over every pair and triple of
    /// `window` and every `t, s` drawn from `t_grid`, plus monotonicity of
    /// `M(x, y, .)` along the sorted grid. Continuity is not checked.
    pub fn check_axioms(&self, window: &Window, t_grid: &[Rational]) -> Result<CertReport> {
        if t_grid.is_empty() {
            return Err(Error::Precondition("t grid must be non-empty".into()));
        }
        if let Some(t) = t_grid.iter().find(|t| !t.is_positive()) {
            return Err(Error::Domain(format!("t = {t} must be positive")));
        }
        self.validate_window(window)?;
        let mut ts = t_grid.to_vec();
        ts.sort();
        ts.dedup();

        let pts = window.points();
        let n = pts.len();
        let mut report = CertReport::new(format!("axioms:{}:{}", self.kind(), self.tnorm));

        let value_at = |t: Rational| -> Vec<Vec<Rational>> {
            pts.iter()
                .map(|x| pts.iter().map(|y| self.m(x, y, t).reduced()).collect())
                .collect()
        };
        let tables: Vec<Vec<Vec<Rational>>> = ts.iter().map(|&t| value_at(t)).collect();
        // M(x, z, t + s) for every grid pair, computed on demand per pair.
        let one = Rational::one();

        let mut range_fail = None;
        let mut ident_fail = None;
        let mut sym_fail = None;
        for (k, table) in tables.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let v = table[i][j];
                    if range_fail.is_none() && !(v.is_positive() && v <= one) {
                        range_fail = Some((k, i, j, v));
                    }
                    if ident_fail.is_none() && ((v == one) != (i == j)) {
                        ident_fail = Some((k, i, j, v));
                    }
                    if sym_fail.is_none() && v != table[j][i] {
                        sym_fail = Some((k, i, j, v));
                    }
                }
            }
        }
        let pair_record = |name: &str, fail: Option<(usize, usize, usize, Rational)>| match fail {
            None => Record::pass(name).window(window),
            Some((k, i, j, v)) => Record::fail(name)
                .window(window)
                .witness([pts[i].clone(), pts[j].clone()])
                .value("t", ts[k])
                .value("M", v),
        };
        report.push(pair_record("axiom1-positive", range_fail));
        report.push(pair_record("axiom2-identity", ident_fail));
        report.push(pair_record("axiom3-symmetric", sym_fail));

        let mut tri_fail: Option<Record> = None;
        'grid: for (ki, &t) in ts.iter().enumerate() {
            for (kj, &s) in ts.iter().enumerate() {
                let sum = value_at(t + s);
                for x in 0..n {
                    for y in 0..n {
                        let mxy = tables[ki][x][y];
                        for z in 0..n {
                            let lhs = self.tnorm.apply(mxy, tables[kj][y][z]);
                            if lhs > sum[x][z] {
                                tri_fail = Some(
                                    Record::fail("axiom4-triangle")
                                        .window(window)
                                        .witness([pts[x].clone(), pts[y].clone(), pts[z].clone()])
                                        .value("t", t)
                                        .value("s", s)
                                        .value("lhs", lhs)
                                        .value("rhs", sum[x][z]),
                                );
                                break 'grid;
                            }
                        }
                    }
                }
            }
        }
        report.push(tri_fail.unwrap_or_else(|| {
            Record::pass("axiom4-triangle")
                .window(window)
                .value("t_values", Rational::from_int(ts.len() as i128))
        }));

        let mut mono_fail = None;
        'mono: for k in 1..ts.len() {
            for i in 0..n {
                for j in 0..n {
                    if tables[k][i][j] < tables[k - 1][i][j] {
                        mono_fail = Some(
                            Record::fail("monotone-in-t")
                                .window(window)
                                .witness([pts[i].clone(), pts[j].clone()])
                                .value("t_lo", ts[k - 1])
                                .value("t_hi", ts[k])
                                .value("M_lo", tables[k - 1][i][j])
                                .value("M_hi", tables[k][i][j]),
                        );
                        break 'mono;
                    }
                }
            }
        }
        report.push(mono_fail.unwrap_or_else(|| Record::pass("monotone-in-t").window(window).note("sampled-only")));
        report.push(
            Record::not_checked("axiom5-continuity").note("sampled-only: continuity in t is not decidable from a grid"),
        );
        // a flag, not a verdict on the space: chain bounds need a * b > 0
        report.push(if self.tnorm.is_positivity_preserving() {
            Record::pass("tnorm-positivity-preserving")
        } else {
            let (a, b) = crate::tnorm::positivity_counterexample(&self.tnorm, &crate::tnorm::uniform_grid(4))
                .expect("counterexample on the quarter grid");
            Record::not_checked("tnorm-positivity-preserving")
                .value("a", a)
                .value("b", b)
                .note(format!(
                    "{} sends positive inputs to 0; neighborhood, union and transport bounds are unavailable",
                    self.tnorm
                ))
        });
        Ok(report)
    }

    /// Checks `M(x,y,t) * M(y,z,t) <= M(x,z,t)` for every triple of `window`.
    pub fn check_non_archimedean(&self, window: &Window, t: Rational) -> Result<CertReport> {
        self.validate_window(window)?;
        if !t.is_positive() {
            return Err(Error::Domain(format!("t = {t} must be positive")));
        }
        let pts = window.points();
        let table: Vec<Vec<Rational>> = pts
            .iter()
            .map(|x| pts.iter().map(|y| self.m(x, y, t).reduced()).collect())
            .collect();
        let mut report = CertReport::new(format!("non-archimedean:{}", self.kind()));
        let n = pts.len();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = self.tnorm.apply(table[x][y], table[y][z]);
                    if lhs > table[x][z] {
                        report.push(
                            Record::fail("non-archimedean")
                                .window(window)
                                .witness([pts[x].clone(), pts[y].clone(), pts[z].clone()])
                                .value("t", t)
                                .value("lhs", lhs)
                                .value("rhs", table[x][z]),
                        );
                        return Ok(report);
                    }
                }
            }
        }
        report.push(Record::pass("non-archimedean").window(window).value("t", t));
        Ok(report)
    }

    /// The subspace on `subset`; values agree with the parent.
    pub fn subspace(&self, subset: &PointSet) -> Result<Self> {
        self.validate_points(subset)?;
        Ok(FuzzyMetricSpace {
            universe: Universe::Finite(subset.clone()),
            tnorm: self.tnorm,
            rule: self.rule.clone(),
        })
    }

    /// `B(x, r, t)` restricted to `window`: points with `M(x, y, t) > 1 - r`.
    pub fn ball(&self, x: &Point, params: ScaleParams, window: &Window) -> Result<PointSet> {
        self.validate_points([x])?;
        self.validate_window(window)?;
        Ok(self.ball_unchecked(x, params, window))
    }

    pub(crate) fn ball_unchecked(&self, x: &Point, params: ScaleParams, window: &Window) -> PointSet {
        let (t, thr) = (params.t(), params.threshold());
        window
            .points()
            .iter()
            .filter(|y| self.m(x, y, t) > thr)
            .cloned()
            .collect()
    }

    /// Whether `M(x, y, t) > 1 - r` for every pair of `subset`.
    pub fn is_bounded(&self, subset: &PointSet, params: ScaleParams) -> Result<bool> {
        self.validate_points(subset)?;
        let pts: Vec<Point> = subset.iter().cloned().collect();
        Ok(match min_pair(self, &pts, params.t()) {
            None => true,
            Some(ext) => ext.value > params.threshold(),
        })
    }

    /// Parameters bounding `A ∪ B` from bounds on `A` and `B` and a pair
    /// `a ∈ A`, `b ∈ B`: time `2 tA + tB` and lower bound
    /// `L = (1 - rA) * M(a, b, tA) * (1 - rB)`, returned as `s = 1 - L`.
    ///
    /// Every cross pair then satisfies `M(x, y, t_out) >= L = 1 - s`.
    pub fn union_bound_params(
        &self,
        params_a: ScaleParams,
        params_b: ScaleParams,
        a: &Point,
        b: &Point,
    ) -> Result<UnionBound> {
        if !self.tnorm.is_positivity_preserving() {
            return Err(Error::Unsupported(format!(
                "union bound needs a positivity-preserving t-norm, got {}",
                self.tnorm
            )));
        }
        let mab = self.eval_m(a, b, params_a.t())?;
        let lower = self.tnorm.fold([params_a.threshold(), mab, params_b.threshold()]);
        Ok(UnionBound {
            s: lower.complement(),
            t_out: params_a.t() + params_a.t() + params_b.t(),
            lower,
        })
    }
}

/// Result of [`FuzzyMetricSpace::union_bound_params`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnionBound {
    pub s: Rational,
    pub t_out: Rational,
    pub lower: Rational,
}

#[inline]
fn nat(p: &Point) -> i128 {
    match p {
        Point::Int(v) => *v as i128,
        other => panic!("expected a natural number, got {other}"),
    }
}

/// `t / (t + d)` built without a gcd.
#[inline]
fn standard_value(t: Rational, d: Rational) -> Rational {
    let (tn, td) = (t.numer_raw(), t.denom_raw());
    let (dn, dd) = (d.numer_raw(), d.denom_raw());
    // (tn/td) / (tn/td + dn/dd) = tn*dd / (tn*dd + dn*td)
    let num = tn.checked_mul(dd).expect("rational overflow in M");
    let den = num
        .checked_add(dn.checked_mul(td).expect("rational overflow in M"))
        .expect("rational overflow in M");
    Rational::raw(num, den)
}

/// Bridge between the fuzzy and metric readings of closeness:
/// `t/(t+d) > 1 - r` versus `d < rt/(1 - r)`. The two always agree.
pub fn metric_threshold(d: Rational, params: ScaleParams) -> (bool, bool) {
    assert!(!d.is_negative(), "distance must be non-negative");
    let t = params.t();
    let fuzzy = t / (t + d) > params.threshold();
    let metric = d < metric_radius(params);
    (fuzzy, metric)
}

/// `rt / (1 - r)`: the metric radius of a fuzzy ball at `(r, t)` in a
/// standard fuzzy space.
pub fn metric_radius(params: ScaleParams) -> Rational {
    params.r() * params.t() / params.threshold()
}

/// An extremal pair with its value of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremal {
    pub x: Point,
    pub y: Point,
    pub value: Rational,
}

/// The pair of distinct points of `pts` minimizing `M(., ., t)`; ties go to
/// the first pair in index order. `None` for fewer than two points.
pub fn min_pair(space: &FuzzyMetricSpace, pts: &[Point], t: Rational) -> Option<Extremal> {
    let mut best: Option<(usize, usize, Rational)> = None;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let v = space.m(&pts[i], &pts[j], t);
            if best.as_ref().is_none_or(|b| v < b.2) {
                best = Some((i, j, v));
            }
        }
    }
    best.map(|(i, j, v)| Extremal {
        x: pts[i].clone(),
        y: pts[j].clone(),
        value: v.reduced(),
    })
}
