//! Points, finite point sets and enumeration windows.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A point of a universe.
///
/// The order is the canonical point order used for deterministic selection
/// and report ordering: one-dimensional points numerically, then lattice
/// points lexicographically.
#[derive(Clone, Serialize)]
#[serde(untagged)]
pub enum Point {
    Int(i64),
    Real(Rational),
    Lattice(Vec<i64>),
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Point::Int(a), Point::Int(b)) => a.cmp(b),
            (Point::Lattice(a), Point::Lattice(b)) => a.cmp(b),
            (Point::Lattice(_), _) => Ordering::Greater,
            (_, Point::Lattice(_)) => Ordering::Less,
            (a, b) => a.as_rational().cmp(&b.as_rational()),
        }
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Point::Lattice(v) => v.hash(state),
            other => other.as_rational().hash(state),
        }
    }
}

pub type PointSet = BTreeSet<Point>;

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Real(Rational),
            Lattice(Vec<i64>),
        }
        Ok(match Raw::deserialize(deserializer)? {
            Raw::Int(v) => Point::Int(v),
            Raw::Real(v) => Point::real(v),
            Raw::Lattice(v) => Point::Lattice(v),
        })
    }
}

impl Point {
    /// A real point; integral values are normalized to `Point::Int` so that
    /// integer and real samples of the same number coincide.
    pub fn real(v: Rational) -> Point {
        if v.is_integer() {
            if let Ok(n) = i64::try_from(v.numer()) {
                return Point::Int(n);
            }
        }
        Point::Real(v.reduced())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Point::Int(v) => Some(*v),
            _ => None,
        }
    }

    /// The point as a rational coordinate, for one-dimensional points.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Point::Int(v) => Some(Rational::from(*v)),
            Point::Real(v) => Some(*v),
            Point::Lattice(_) => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Int(v) => write!(f, "{v}"),
            Point::Real(v) => write!(f, "{v}"),
            Point::Lattice(v) => {
                write!(f, "(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Point {
    fn from(v: i64) -> Self {
        Point::Int(v)
    }
}

/// Convenience constructor for integer point sets.
pub fn int_set<I: IntoIterator<Item = i64>>(it: I) -> PointSet {
    it.into_iter().map(Point::Int).collect()
}

/// How a window was described. Serialized as a compact string
/// (`"a..b"`, `"grid:a..b/den"`, `"box:dim:a..b"`) or as an explicit list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WindowSpec {
    /// Integers `lo..=hi`.
    Range { lo: i64, hi: i64 },
    /// Rationals `k/den` for `lo*den <= k <= hi*den`.
    Grid { lo: i64, hi: i64, den: i64 },
    /// Lattice points of `{lo..=hi}^dim`.
    Box { dim: usize, lo: i64, hi: i64 },
    /// An explicit list of points.
    Points(Vec<Point>),
}

fn parse_range(s: &str) -> Option<(i64, i64)> {
    let (a, b) = s.split_once("..")?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid window {s:?}"));
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("grid:") {
            let (range, den) = rest.rsplit_once('/').ok_or_else(bad)?;
            let (lo, hi) = parse_range(range).ok_or_else(bad)?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den <= 0 {
                return Err(bad());
            }
            return Ok(WindowSpec::Grid { lo, hi, den });
        }
        if let Some(rest) = s.strip_prefix("box:") {
            let (dim, range) = rest.split_once(':').ok_or_else(bad)?;
            let dim: usize = dim.trim().parse().map_err(|_| bad())?;
            let (lo, hi) = parse_range(range).ok_or_else(bad)?;
            if dim == 0 {
                return Err(bad());
            }
            return Ok(WindowSpec::Box { dim, lo, hi });
        }
        if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            // scalar points only: "{1,4,9}" or "{0,1/2,3}"
            let pts = inner
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse::<Rational>().map(Point::real).map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            let set: PointSet = pts.into_iter().collect();
            return Ok(WindowSpec::Points(set.into_iter().collect()));
        }
        let (lo, hi) = parse_range(s).ok_or_else(bad)?;
        Ok(WindowSpec::Range { lo, hi })
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::Range { lo, hi } => write!(f, "{lo}..{hi}"),
            WindowSpec::Grid { lo, hi, den } => write!(f, "grid:{lo}..{hi}/{den}"),
            WindowSpec::Box { dim, lo, hi } => write!(f, "box:{dim}:{lo}..{hi}"),
            WindowSpec::Points(pts) => {
                write!(f, "{{")?;
                for (i, p) in pts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl Serialize for WindowSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            WindowSpec::Points(pts) => pts.serialize(serializer),
            other => serializer.collect_str(other),
        }
    }
}

impl<'de> Deserialize<'de> for WindowSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            List(Vec<Point>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::List(pts) => Ok(WindowSpec::Points(pts)),
        }
    }
}

/// A finite, sorted, duplicate-free list of points over which every
/// predicate is evaluated. Certificates are always "on this window".
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Window {
    spec: WindowSpec,
    points: Vec<Point>,
}

/// Windows larger than this are refused at construction.
pub const MAX_WINDOW_POINTS: usize = 2_000_000;

impl Window {
    pub fn new(spec: WindowSpec) -> Result<Self> {
        let too_big = || Error::Domain(format!("window {spec} exceeds {MAX_WINDOW_POINTS} points"));
        let points: Vec<Point> = match &spec {
            WindowSpec::Range { lo, hi } => {
                if hi >= lo && (hi - lo) as u64 >= MAX_WINDOW_POINTS as u64 {
                    return Err(too_big());
                }
                (*lo..=*hi).map(Point::Int).collect()
            }
            WindowSpec::Grid { lo, hi, den } => {
                let (a, b) = (lo * den, hi * den);
                if b >= a && (b - a) as u64 >= MAX_WINDOW_POINTS as u64 {
                    return Err(too_big());
                }
                (a..=b)
                    .map(|k| Point::real(Rational::new(k as i128, *den as i128)))
                    .collect()
            }
            WindowSpec::Box { dim, lo, hi } => {
                let side = if hi >= lo { (hi - lo + 1) as u64 } else { 0 };
                let total = side.checked_pow(*dim as u32).unwrap_or(u64::MAX);
                if total > MAX_WINDOW_POINTS as u64 {
                    return Err(too_big());
                }
                let mut out = Vec::with_capacity(total as usize);
                let mut cur = vec![*lo; *dim];
                for _ in 0..total {
                    out.push(Point::Lattice(cur.clone()));
                    // odometer increment, last coordinate fastest
                    for c in cur.iter_mut().rev() {
                        if *c < *hi {
                            *c += 1;
                            break;
                        }
                        *c = *lo;
                    }
                }
                out
            }
            WindowSpec::Points(pts) => {
                let set: PointSet = pts.iter().cloned().collect();
                set.into_iter().collect()
            }
        };
        Ok(Window { spec, points })
    }

    pub fn range(lo: i64, hi: i64) -> Self {
        Window::new(WindowSpec::Range { lo, hi }).expect("range window")
    }

    /// Real sample points `k/den` covering `[lo, hi]`.
    pub fn grid(lo: i64, hi: i64, den: i64) -> Self {
        Window::new(WindowSpec::Grid { lo, hi, den }).expect("grid window")
    }

    pub fn from_points<I: IntoIterator<Item = Point>>(it: I) -> Self {
        let set: PointSet = it.into_iter().collect();
        let pts: Vec<Point> = set.into_iter().collect();
        Window {
            spec: WindowSpec::Points(pts.clone()),
            points: pts,
        }
    }

    pub fn empty() -> Self {
        Window::from_points(std::iter::empty())
    }

    pub fn spec(&self) -> &WindowSpec {
        &self.spec
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn to_set(&self) -> PointSet {
        self.points.iter().cloned().collect()
    }

    /// The sub-window of points that also lie in `subset`.
    pub fn restrict(&self, subset: &PointSet) -> Window {
        Window::from_points(self.points.iter().filter(|p| subset.contains(p)).cloned())
    }

    /// Short description for reports. Long explicit lists are abbreviated.
    pub fn label(&self) -> String {
        match &self.spec {
            WindowSpec::Points(pts) if pts.len() > 12 => format!(
                "{{{},{},...,{}}} ({} points)",
                pts[0],
                pts[1],
                pts[pts.len() - 1],
                pts.len()
            ),
            spec => spec.to_string(),
        }
    }
}

impl Serialize for Window {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = WindowSpec::deserialize(deserializer)?;
        Window::new(spec).map_err(serde::de::Error::custom)
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Window::new(s.parse()?)
    }
}
