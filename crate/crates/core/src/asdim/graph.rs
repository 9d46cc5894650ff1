//! Scale graphs and the brute-force minimum-family oracle.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use crate::covers::Family;
use crate::error::{Error, Result};
use crate::point::{Point, PointSet, Window};
use crate::rational::Rational;
use crate::space::{min_pair, Extremal, FuzzyMetricSpace, ScaleParams};

/// Components of the graph on a window joining `x ~ y` when
/// `M(x, y, t) >= 1 - r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleGraphReport {
    pub params: ScaleParams,
    /// Components sorted by their smallest point.
    pub components: Vec<PointSet>,
    /// Smallest internal `M(., ., t)` per component; 1 for singletons.
    pub component_min: Vec<Rational>,
    /// Index of the largest component (first on ties).
    pub largest: usize,
    /// Whether one component spans the window.
    pub spanning: bool,
}

impl ScaleGraphReport {
    pub fn largest_component(&self) -> &PointSet {
        &self.components[self.largest]
    }

    /// Smallest internal `M` of the largest component.
    pub fn min_internal_m(&self) -> Rational {
        self.component_min[self.largest]
    }

    /// Any `(r, t)`-disjoint family covering the window must keep each
    /// component inside one member, so a single family fails whenever some
    /// component is not bounded at `bound`. Returns that component's index
    /// and its worst pair.
    pub fn single_family_obstruction(&self, space: &FuzzyMetricSpace, bound: ScaleParams) -> Option<(usize, Extremal)> {
        self.components.iter().enumerate().find_map(|(i, c)| {
            let pts: Vec<Point> = c.iter().cloned().collect();
            min_pair(space, &pts, bound.t())
                .filter(|e| e.value <= bound.threshold())
                .map(|e| (i, e))
        })
    }
}

pub fn scale_graph(space: &FuzzyMetricSpace, params: ScaleParams, window: &Window) -> Result<ScaleGraphReport> {
    space.validate_window(window)?;
    let pts = window.points();
    let (t, thr) = (params.t(), params.threshold());
    let mut uf = UnionFind::<usize>::new(pts.len());
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if space.m(&pts[i], &pts[j], t) >= thr {
                uf.union(i, j);
            }
        }
    }
    let mut parts: BTreeMap<usize, PointSet> = BTreeMap::new();
    for (i, p) in pts.iter().enumerate() {
        parts.entry(uf.find(i)).or_default().insert(p.clone());
    }
    let mut components: Vec<PointSet> = parts.into_values().collect();
    components.sort();
    let component_min: Vec<Rational> = components
        .iter()
        .map(|c| {
            let cp: Vec<Point> = c.iter().cloned().collect();
            min_pair(space, &cp, t).map_or(Rational::one(), |e| e.value)
        })
        .collect();
    let mut largest = 0;
    for (i, c) in components.iter().enumerate() {
        if c.len() > components[largest].len() {
            largest = i;
        }
    }
    let spanning = components.len() == 1 && !pts.is_empty();
    Ok(ScaleGraphReport {
        params,
        components,
        component_min,
        largest,
        spanning,
    })
}

/// Windows above this size are refused by [`oracle_min_families`].
pub const ORACLE_MAX_POINTS: usize = 10;

/// The least number of `(r, t)`-disjoint families whose union covers the
/// window and is bounded at `bound_params`, with one optimal choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub k: usize,
    pub families: Vec<Family>,
}

/// Exhaustive search over set partitions of a tiny window.
///
/// Restricting to partitions loses nothing: shrinking members of a cover to
/// a partition keeps them bounded and keeps every family disjoint. Members
/// conflict when some cross pair has `M >= 1 - r`; the answer is the least
/// chromatic number of the conflict graph over bounded partitions.
pub fn oracle_min_families(
    space: &FuzzyMetricSpace,
    params: ScaleParams,
    bound_params: ScaleParams,
    window: &Window,
) -> Result<OracleResult> {
    space.validate_window(window)?;
    let pts = window.points();
    let n = pts.len();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::Precondition(format!(
            "oracle window has {n} points; at most {ORACLE_MAX_POINTS} are enumerated"
        )));
    }
    if n == 0 {
        return Ok(OracleResult {
            k: 1,
            families: vec![Family::empty("F0")],
        });
    }
    let table = |t: Rational| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|i| (0..n).map(|j| space.m(&pts[i], &pts[j], t)).collect())
            .collect()
    };
    let near = table(params.t());
    let inner = table(bound_params.t());
    let mut search = Search {
        n,
        near: near
            .iter()
            .map(|row| row.iter().map(|v| *v >= params.threshold()).collect())
            .collect(),
        tight: inner
            .iter()
            .map(|row| row.iter().map(|v| *v > bound_params.threshold()).collect())
            .collect(),
        assign: vec![0; n],
        best: None,
    };
    search.partitions(0, 0);
    let (k, assign, colors) = search.best.expect("singletons are always bounded");
    let blocks = assign.iter().copied().max().map_or(0, |m| m + 1);
    let mut families: Vec<Vec<PointSet>> = vec![Vec::new(); k];
    for b in 0..blocks {
        let set: PointSet = (0..n).filter(|&i| assign[i] == b).map(|i| pts[i].clone()).collect();
        families[colors[b]].push(set);
    }
    Ok(OracleResult {
        k,
        families: families
            .into_iter()
            .enumerate()
            .map(|(i, sets)| Family::new(format!("F{i}"), sets))
            .collect(),
    })
}

struct Search {
    n: usize,
    /// `M >= 1 - r` at the disjointness scale.
    near: Vec<Vec<bool>>,
    /// `M > 1 - s` at the bound scale.
    tight: Vec<Vec<bool>>,
    assign: Vec<usize>,
    /// (colors used, block of each point, color of each block)
    best: Option<(usize, Vec<usize>, Vec<usize>)>,
}

impl Search {
    /// Restricted growth strings: point `i` joins an existing block or opens
    /// block `used`. Blocks stay bounded as they grow.
    fn partitions(&mut self, i: usize, used: usize) {
        if let Some((k, _, _)) = &self.best {
            if *k == 1 {
                return;
            }
        }
        if i == self.n {
            self.evaluate(used);
            return;
        }
        for b in 0..=used {
            if (0..i).all(|j| self.assign[j] != b || self.tight[i][j]) {
                self.assign[i] = b;
                self.partitions(i + 1, used.max(b + 1));
            }
        }
    }

    fn evaluate(&mut self, blocks: usize) {
        let mut conflict = vec![vec![false; blocks]; blocks];
        for i in 0..self.n {
            for j in 0..self.n {
                let (a, b) = (self.assign[i], self.assign[j]);
                if a != b && self.near[i][j] {
                    conflict[a][b] = true;
                }
            }
        }
        let limit = self.best.as_ref().map_or(blocks, |(k, _, _)| k - 1);
        for k in 1..=limit {
            let mut colors = vec![usize::MAX; blocks];
            if color(&conflict, &mut colors, 0, k) {
                self.best = Some((k, self.assign.clone(), colors));
                return;
            }
        }
    }
}

fn color(conflict: &[Vec<bool>], colors: &mut [usize], b: usize, k: usize) -> bool {
    if b == colors.len() {
        return true;
    }
    for c in 0..k {
        if (0..b).all(|o| !conflict[b][o] || colors[o] != c) {
            colors[b] = c;
            if color(conflict, colors, b + 1, k) {
                return true;
            }
        }
    }
    colors[b] = usize::MAX;
    false
}
