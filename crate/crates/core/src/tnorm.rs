//! Continuous t-norms evaluated exactly on rationals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::rational::Rational;
use crate::report::{CertReport, Record};

/// The built-in continuous t-norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TNorm {
    /// `a * b = ab`
    #[serde(rename = "product")]
    Product,
    /// `a * b = min(a, b)`
    #[serde(rename = "min")]
    Minimum,
    /// `a * b = max(0, a + b - 1)`
    #[serde(rename = "lukasiewicz")]
    Lukasiewicz,
}

/// Anything that combines two membership degrees. Built-in kinds implement
/// it; user rules can too, in which case axiom checking is sampled only.
pub trait TNormRule {
    fn name(&self) -> String;

    /// Evaluates on values already known to lie in `[0, 1]`.
    fn apply(&self, a: Rational, b: Rational) -> Rational;
}

impl TNormRule for TNorm {
    fn name(&self) -> String {
        self.tag().to_string()
    }

    #[inline]
    fn apply(&self, a: Rational, b: Rational) -> Rational {
        match self {
            TNorm::Product => a * b,
            TNorm::Minimum => a.min(b),
            TNorm::Lukasiewicz => (a + b - Rational::one()).max(Rational::zero()),
        }
    }
}

impl TNorm {
    pub const ALL: [TNorm; 3] = [TNorm::Product, TNorm::Minimum, TNorm::Lukasiewicz];

    pub fn tag(&self) -> &'static str {
        match self {
            TNorm::Product => "product",
            TNorm::Minimum => "min",
            TNorm::Lukasiewicz => "lukasiewicz",
        }
    }

    /// Evaluates `a * b`, rejecting arguments outside `[0, 1]`.
    pub fn eval(&self, a: Rational, b: Rational) -> Result<Rational> {
        for v in [a, b] {
            if !v.in_unit_interval() {
                return Err(Error::Domain(format!("t-norm argument {v} outside [0,1]")));
            }
        }
        Ok(self.apply(a, b))
    }

    /// `a1 * a2 * ... * an`, folded left; the empty product is 1.
    pub fn fold<I: IntoIterator<Item = Rational>>(&self, values: I) -> Rational {
        values.into_iter().fold(Rational::one(), |acc, v| self.apply(acc, v))
    }

    /// Whether `a * b > 0` whenever `a, b > 0`, from each kind's closed form.
    pub fn is_positivity_preserving(&self) -> bool {
        match self {
            TNorm::Product | TNorm::Minimum => true,
            TNorm::Lukasiewicz => false,
        }
    }

    /// Whether `a < c` and `b > 0` imply `a * b < c * b`. Decides if a strict
    /// lower bound survives being combined with a non-strict one.
    pub fn is_strictly_monotone(&self) -> bool {
        matches!(self, TNorm::Product)
    }
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "product" => Ok(TNorm::Product),
            "min" | "minimum" => Ok(TNorm::Minimum),
            "lukasiewicz" => Ok(TNorm::Lukasiewicz),
            other => Err(Error::Parse(format!("unknown t-norm {other:?}"))),
        }
    }
}

/// Searches `grid` for `a, b > 0` with `a * b = 0`, in grid order.
pub fn positivity_counterexample<T: TNormRule>(rule: &T, grid: &[Rational]) -> Option<(Rational, Rational)> {
    for &a in grid.iter().filter(|v| v.is_positive()) {
        for &b in grid.iter().filter(|v| v.is_positive()) {
            if rule.apply(a, b).is_zero() {
                return Some((a, b));
            }
        }
    }
    None
}

fn pts(values: &[Rational]) -> Vec<Point> {
    values.iter().map(|v| Point::real(*v)).collect()
}

/// Checks commutativity, associativity, monotonicity and the boundary laws
/// `a * 1 = a`, `a * 0 = 0` over every pair and triple of `grid`, exactly.
///
/// Continuity is recorded as not checked.
pub fn check_tnorm_axioms<T: TNormRule>(rule: &T, grid: &[Rational]) -> Result<CertReport> {
    let one = Rational::one();
    let zero = Rational::zero();
    if grid.is_empty() || !grid.contains(&zero) || !grid.contains(&one) {
        return Err(Error::Precondition("t-norm grid must contain 0 and 1".into()));
    }
    if let Some(v) = grid.iter().find(|v| !v.in_unit_interval()) {
        return Err(Error::Domain(format!("grid value {v} outside [0,1]")));
    }
    let mut grid: Vec<Rational> = grid.to_vec();
    grid.sort();
    grid.dedup();

    let mut report = CertReport::new(format!("tnorm:{}", rule.name()));
    let size = Rational::from_int(grid.len() as i128);

    let closed = grid
        .iter()
        .flat_map(|&a| grid.iter().map(move |&b| (a, b)))
        .find(|&(a, b)| !rule.apply(a, b).in_unit_interval());
    report.push(match closed {
        None => Record::pass("range").value("grid_size", size),
        Some((a, b)) => Record::fail("range")
            .witness(pts(&[a, b]))
            .value("value", rule.apply(a, b)),
    });

    let identity = grid.iter().find(|&&a| rule.apply(a, one) != a);
    report.push(match identity {
        None => Record::pass("identity"),
        Some(&a) => Record::fail("identity")
            .witness(pts(&[a]))
            .value("value", rule.apply(a, one)),
    });

    let annihilator = grid.iter().find(|&&a| !rule.apply(a, zero).is_zero());
    report.push(match annihilator {
        None => Record::pass("zero"),
        Some(&a) => Record::fail("zero")
            .witness(pts(&[a]))
            .value("value", rule.apply(a, zero)),
    });

    let commut = grid
        .iter()
        .flat_map(|&a| grid.iter().map(move |&b| (a, b)))
        .find(|&(a, b)| rule.apply(a, b) != rule.apply(b, a));
    report.push(match commut {
        None => Record::pass("commutative"),
        Some((a, b)) => Record::fail("commutative")
            .witness(pts(&[a, b]))
            .value("ab", rule.apply(a, b))
            .value("ba", rule.apply(b, a)),
    });

    let mut assoc = None;
    'assoc: for &a in &grid {
        for &b in &grid {
            let ab = rule.apply(a, b);
            for &c in &grid {
                let left = rule.apply(ab, c);
                let right = rule.apply(a, rule.apply(b, c));
                if left != right {
                    assoc = Some((a, b, c, left, right));
                    break 'assoc;
                }
            }
        }
    }
    report.push(match assoc {
        None => Record::pass("associative"),
        Some((a, b, c, l, r)) => Record::fail("associative")
            .witness(pts(&[a, b, c]))
            .value("left", l)
            .value("right", r),
    });

    // With a sorted grid, monotonicity reduces to adjacent steps in each
    // argument, which implies the full two-argument statement by transitivity.
    let mut mono = None;
    'mono: for (i, &a) in grid.iter().enumerate() {
        for (j, &b) in grid.iter().enumerate() {
            let here = rule.apply(a, b);
            if let Some(&a2) = grid.get(i + 1) {
                if rule.apply(a2, b) < here {
                    mono = Some((a, b, a2, b));
                    break 'mono;
                }
            }
            if let Some(&b2) = grid.get(j + 1) {
                if rule.apply(a, b2) < here {
                    mono = Some((a, b, a, b2));
                    break 'mono;
                }
            }
        }
    }
    report.push(match mono {
        None => Record::pass("monotone"),
        Some((a, b, c, d)) => Record::fail("monotone")
            .witness(pts(&[a, b, c, d]))
            .value("lower", rule.apply(a, b))
            .value("upper", rule.apply(c, d)),
    });

    report.push(Record::not_checked("continuity").note("sampled-only: continuity is not decidable from grid values"));
    Ok(report)
}

/// The grid `{0, 1/n, ..., 1}`.
pub fn uniform_grid(n: u32) -> Vec<Rational> {
    (0..=n as i128).map(|k| Rational::new(k, n as i128)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn product_evaluates_exactly() {
        assert_eq!(TNorm::Product.eval(q(1, 2), q(1, 3)).unwrap(), q(1, 6));
    }

    #[test]
    fn identity_holds_for_every_kind() {
        for k in TNorm::ALL {
            assert_eq!(k.eval(q(3, 7), q(1, 1)).unwrap(), q(3, 7));
        }
    }

    #[test]
    fn lukasiewicz_truncates_at_zero() {
        assert_eq!(TNorm::Lukasiewicz.eval(q(1, 2), q(1, 3)).unwrap(), q(0, 1));
        assert_eq!(TNorm::Lukasiewicz.eval(q(3, 4), q(1, 2)).unwrap(), q(1, 4));
    }

    #[test]
    fn out_of_range_is_domain_error() {
        assert!(matches!(TNorm::Minimum.eval(q(3, 2), q(1, 2)), Err(Error::Domain(_))));
        assert!(matches!(TNorm::Product.eval(q(1, 2), q(-1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn axioms_pass_on_small_grids() {
        let r = check_tnorm_axioms(&TNorm::Product, &[q(0, 1), q(1, 2), q(1, 1)]).unwrap();
        assert!(r.passed());
        let r = check_tnorm_axioms(&TNorm::Minimum, &[q(0, 1), q(1, 3), q(2, 3), q(1, 1)]).unwrap();
        assert!(r.passed());
        let r = check_tnorm_axioms(&TNorm::Lukasiewicz, &[q(0, 1), q(1, 4), q(1, 2), q(1, 1)]).unwrap();
        assert!(r.passed());
        assert_eq!(
            r.find("continuity").unwrap().verdict,
            crate::report::Verdict::NotChecked
        );
    }

    #[test]
    fn grid_without_endpoints_is_rejected() {
        assert!(matches!(
            check_tnorm_axioms(&TNorm::Product, &[q(1, 2)]),
            Err(Error::Precondition(_))
        ));
    }

    struct Average;

    impl TNormRule for Average {
        fn name(&self) -> String {
            "average".into()
        }
        fn apply(&self, a: Rational, b: Rational) -> Rational {
            (a + b) / Rational::from_int(2)
        }
    }

    #[test]
    fn user_rule_failures_are_reported() {
        let r = check_tnorm_axioms(&Average, &uniform_grid(4)).unwrap();
        assert!(!r.passed());
        assert!(r.find("identity").unwrap().is_fail());
        assert!(r.find("associative").unwrap().is_fail());
        assert!(!r.find("commutative").unwrap().is_fail());
    }

    #[test]
    fn positivity_matches_grid_search() {
        let grid = uniform_grid(100);
        for k in TNorm::ALL {
            let cex = positivity_counterexample(&k, &grid);
            assert_eq!(k.is_positivity_preserving(), cex.is_none(), "{k}");
        }
        let grid = [q(0, 1), q(1, 3), q(1, 2), q(1, 1)];
        let (a, b) = positivity_counterexample(&TNorm::Lukasiewicz, &grid).unwrap();
        assert_eq!(TNorm::Lukasiewicz.apply(a, b), q(0, 1));
        assert_eq!((a, b), (q(1, 3), q(1, 3)));
    }

    #[test]
    fn parses_config_tags() {
        assert_eq!("product".parse::<TNorm>().unwrap(), TNorm::Product);
        assert_eq!("min".parse::<TNorm>().unwrap(), TNorm::Minimum);
        assert_eq!("lukasiewicz".parse::<TNorm>().unwrap(), TNorm::Lukasiewicz);
        assert!("drastic".parse::<TNorm>().is_err());
    }
}
