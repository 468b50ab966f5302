//! Cauchy behaviour, limits and special limits of sequences.
//!
//! Two views are offered. A [`SequencePrefix`] is an arbitrary finite
//! truncation; verdicts are computed over a tail window and are only claims
//! about that prefix. An [`EventuallyPeriodic`] sequence (every orbit on a
//! finite space is one) is known in full, so its verdicts are exact.

use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::space::{PartialNMetricSpace, Point, SpaceError, DEFAULT_TOL};
use crate::topology::{gap_values, open_ball, radius_grid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("sequence is empty")]
    Empty,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("window {window} exceeds prefix length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("sequence is not Cauchy on the prefix")]
    NotCauchyOnPrefix,
    #[error("{} distinct points pass as special limits", .0.len())]
    UniquenessViolation(Vec<Point>),
    #[error("candidate is not a limit of the sequence")]
    NotALimit,
    #[error("expected {expected} parameter points, got {got}")]
    ParameterCount { expected: usize, got: usize },
}

/// Tail window and tolerance for prefix verdicts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrefixOptions {
    /// `None` picks `max(4, M / 4)`, capped at the prefix length `M`.
    pub window: Option<usize>,
    pub tol: f64,
}

impl Default for PrefixOptions {
    fn default() -> Self {
        Self {
            window: None,
            tol: DEFAULT_TOL,
        }
    }
}

/// The first `M` terms of a sequence.
#[derive(Clone, Debug)]
pub struct SequencePrefix<'a> {
    space: &'a PartialNMetricSpace,
    items: Vec<Point>,
}

impl<'a> SequencePrefix<'a> {
    pub fn new(space: &'a PartialNMetricSpace, items: Vec<Point>) -> Result<Self, SequenceError> {
        if items.is_empty() {
            return Err(SequenceError::Empty);
        }
        if let Some(p) = items.iter().find(|p| p.index() >= space.len()) {
            return Err(SpaceError::UnknownPoint(p.to_string()).into());
        }
        Ok(Self { space, items })
    }

    pub fn from_names<S: AsRef<str>>(
        space: &'a PartialNMetricSpace,
        names: &[S],
    ) -> Result<Self, SequenceError> {
        let items = names
            .iter()
            .map(|s| space.point(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(space, items)
    }

    pub fn space(&self) -> &'a PartialNMetricSpace {
        self.space
    }

    pub fn items(&self) -> &[Point] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn resolve_window(&self, opts: &PrefixOptions) -> Result<usize, SequenceError> {
        let len = self.items.len();
        let window = opts.window.unwrap_or_else(|| (len / 4).max(4).min(len));
        if window == 0 || window > len {
            return Err(SequenceError::WindowTooLarge { window, len });
        }
        Ok(window)
    }

    pub fn tail(&self, opts: &PrefixOptions) -> Result<&[Point], SequenceError> {
        let w = self.resolve_window(opts)?;
        Ok(&self.items[self.items.len() - w..])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyVerdict {
    pub holds_on_prefix: bool,
    pub r_estimate: Option<f64>,
    pub window: usize,
    /// Largest deviation of a tail pairwise value from `r_estimate`.
    pub residual: f64,
}

fn spread(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64, f64)> {
    let mut n = 0usize;
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for v in values {
        n += 1;
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    (n > 0).then(|| (lo, hi, sum / n as f64))
}

/// Pairwise criterion: every `G(<x_i>^{n-1}, x_j)` over the tail window must
/// agree with their mean within `tol`.
pub fn estimate_cauchy(
    prefix: &SequencePrefix<'_>,
    opts: &PrefixOptions,
) -> Result<CauchyVerdict, SequenceError> {
    let tail = prefix.tail(opts)?;
    let g = prefix.space;
    let values: Vec<f64> = tail
        .iter()
        .flat_map(|&x| tail.iter().map(move |&y| g.mixed(x, y)))
        .collect();
    let (_, _, mean) = spread(values.iter().copied()).expect("tail is non-empty");
    let residual = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    let holds = residual <= opts.tol;
    Ok(CauchyVerdict {
        holds_on_prefix: holds,
        r_estimate: Some(mean),
        window: tail.len(),
        residual,
    })
}

/// Full `n`-fold criterion over the multisets of points seen in the tail.
pub fn estimate_cauchy_full(
    prefix: &SequencePrefix<'_>,
    opts: &PrefixOptions,
) -> Result<CauchyVerdict, SequenceError> {
    let tail = prefix.tail(opts)?;
    let g = prefix.space;
    let support: Vec<Point> = tail.iter().copied().sorted().dedup().collect();
    let values: Vec<f64> = support
        .iter()
        .copied()
        .combinations_with_replacement(g.n())
        .map(|m| g.value_sorted(&m))
        .collect();
    let (_, _, mean) = spread(values.iter().copied()).expect("tail is non-empty");
    let residual = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    Ok(CauchyVerdict {
        holds_on_prefix: residual <= opts.tol,
        r_estimate: Some(mean),
        window: tail.len(),
        residual,
    })
}

/// `G(<a>^{n-1}, x_m)` stays within `tol` of `G(<a>^n)` over the tail.
pub fn check_limit(
    prefix: &SequencePrefix<'_>,
    a: Point,
    opts: &PrefixOptions,
) -> Result<bool, SequenceError> {
    let g = prefix.space;
    if a.index() >= g.len() {
        return Err(SpaceError::UnknownPoint(a.to_string()).into());
    }
    let tail = prefix.tail(opts)?;
    let s = g.self_distance(a);
    Ok(tail.iter().all(|&x| (g.mixed(a, x) - s).abs() <= opts.tol))
}

/// Ball phrasing of [`check_limit`]: every ball around `a` from an
/// exhaustive radius grid above `tol` contains the whole tail.
pub fn check_limit_via_balls(
    prefix: &SequencePrefix<'_>,
    a: Point,
    opts: &PrefixOptions,
) -> Result<bool, SequenceError> {
    let g = prefix.space;
    if a.index() >= g.len() {
        return Err(SpaceError::UnknownPoint(a.to_string()).into());
    }
    let tail = prefix.tail(opts)?;
    let mut grid = radius_grid(&gap_values(g));
    grid.retain(|eps| *eps > opts.tol);
    Ok(grid.iter().all(|&eps| {
        let ball = open_ball(g, a, eps);
        tail.iter().all(|&x| ball.contains(x))
    }))
}

/// A limit `a` with `G(<x_m>^{n-1}, a) - G(<x_m>^n)` vanishing on the tail.
pub fn check_special_limit(
    prefix: &SequencePrefix<'_>,
    a: Point,
    opts: &PrefixOptions,
) -> Result<bool, SequenceError> {
    if !estimate_cauchy(prefix, opts)?.holds_on_prefix {
        return Err(SequenceError::NotCauchyOnPrefix);
    }
    if !check_limit(prefix, a, opts)? {
        return Ok(false);
    }
    let g = prefix.space;
    let tail = prefix.tail(opts)?;
    Ok(tail.iter().all(|&x| g.gap(x, a).abs() <= opts.tol))
}

/// Special limit by definition: a limit whose self-distance equals `r`.
pub fn check_special_limit_by_value(
    prefix: &SequencePrefix<'_>,
    a: Point,
    opts: &PrefixOptions,
) -> Result<bool, SequenceError> {
    let verdict = estimate_cauchy(prefix, opts)?;
    let r = match verdict.r_estimate {
        Some(r) if verdict.holds_on_prefix => r,
        _ => return Err(SequenceError::NotCauchyOnPrefix),
    };
    Ok(check_limit(prefix, a, opts)?
        && (prefix.space.self_distance(a) - r).abs() <= opts.tol)
}

/// The unique special limit on the prefix, if any.
pub fn special_limit_search(
    prefix: &SequencePrefix<'_>,
    opts: &PrefixOptions,
) -> Result<Option<Point>, SequenceError> {
    let mut found = Vec::new();
    for a in prefix.space.points() {
        if check_special_limit(prefix, a, opts)? {
            found.push(a);
        }
    }
    unique(found)
}

fn unique(found: Vec<Point>) -> Result<Option<Point>, SequenceError> {
    match found.len() {
        0 => Ok(None),
        1 => Ok(Some(found[0])),
        _ => Err(SequenceError::UniquenessViolation(found)),
    }
}

/// A sequence `t_0, .., t_{k-1}, c_0, .., c_{L-1}, c_0, ..` known in full.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub transient: Vec<Point>,
    pub cycle: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactCauchy {
    pub holds: bool,
    /// Mean pairwise value over the cycle.
    pub r: f64,
    /// `max - min` of the pairwise values over the cycle.
    pub spread: f64,
}

impl EventuallyPeriodic {
    pub fn new(transient: Vec<Point>, cycle: Vec<Point>) -> Self {
        assert!(!cycle.is_empty(), "cycle must be non-empty");
        Self { transient, cycle }
    }

    /// Term `m` of the sequence.
    pub fn term(&self, m: usize) -> Point {
        if m < self.transient.len() {
            self.transient[m]
        } else {
            self.cycle[(m - self.transient.len()) % self.cycle.len()]
        }
    }

    /// Pairwise values over the cycle decide the limit of every pairwise
    /// value, hence (by the pairwise criterion) the Cauchy property.
    pub fn cauchy(&self, g: &PartialNMetricSpace, tol: f64) -> ExactCauchy {
        let (lo, hi, mean) = spread(
            self.cycle
                .iter()
                .flat_map(|&x| self.cycle.iter().map(move |&y| g.mixed(x, y))),
        )
        .expect("cycle is non-empty");
        ExactCauchy {
            holds: hi - lo <= tol,
            r: mean,
            spread: hi - lo,
        }
    }

    pub fn is_limit(&self, g: &PartialNMetricSpace, a: Point, tol: f64) -> bool {
        let s = g.self_distance(a);
        self.cycle.iter().all(|&c| (g.mixed(a, c) - s).abs() <= tol)
    }

    /// Definition route: Cauchy, `a` a limit, and `G(<a>^n) = r`.
    pub fn is_special_limit(&self, g: &PartialNMetricSpace, a: Point, tol: f64) -> bool {
        let c = self.cauchy(g, tol);
        c.holds && self.is_limit(g, a, tol) && (g.self_distance(a) - c.r).abs() <= tol
    }

    /// Difference route: Cauchy, `a` a limit, and
    /// `G(<x_m>^{n-1}, a) - G(<x_m>^n) -> 0`.
    pub fn is_special_limit_by_gap(&self, g: &PartialNMetricSpace, a: Point, tol: f64) -> bool {
        self.cauchy(g, tol).holds
            && self.is_limit(g, a, tol)
            && self.cycle.iter().all(|&c| g.gap(c, a).abs() <= tol)
    }

    pub fn special_limit_search(
        &self,
        g: &PartialNMetricSpace,
        tol: f64,
    ) -> Result<Option<Point>, SequenceError> {
        if !self.cauchy(g, tol).holds {
            return Err(SequenceError::NotCauchyOnPrefix);
        }
        unique(
            g.points()
                .filter(|&a| self.is_special_limit(g, a, tol))
                .collect(),
        )
    }
}

/// Which of the four basic inequalities an instance belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Inequality {
    /// Replace the first `k < n` arguments one at a time.
    PartialSubstitution,
    /// Replace all `n` arguments.
    FullSubstitution,
    /// `G(<x>^{n-1}, y) <= (n-1) G(<y>^{n-1}, x) - (n-2) G(<y>^n)`.
    Reversal,
    /// Replace every argument by the same point.
    CommonSubstitute,
}

impl Inequality {
    pub const ALL: [Inequality; 4] = [
        Inequality::PartialSubstitution,
        Inequality::FullSubstitution,
        Inequality::Reversal,
        Inequality::CommonSubstitute,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Inequality::PartialSubstitution => "a",
            Inequality::FullSubstitution => "b",
            Inequality::Reversal => "c",
            Inequality::CommonSubstitute => "d",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityFailure {
    pub part: Inequality,
    /// Arguments being replaced.
    pub replaced: Vec<Point>,
    /// Their substitutes, position by position.
    pub substitutes: Vec<Point>,
    /// Arguments left untouched.
    pub fixed: Vec<Point>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasicInequalityReport {
    /// Instances checked per part, in [`Inequality::ALL`] order.
    pub checked: [usize; 4],
    pub failures: Vec<InequalityFailure>,
}

impl BasicInequalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

// Sum of gap(y_j, x_j) over paired positions.
fn correction(g: &PartialNMetricSpace, xs: &[Point], ys: &[Point]) -> f64 {
    xs.iter().zip(ys).map(|(&x, &y)| g.gap(y, x)).sum()
}

fn substitution_instance(
    g: &PartialNMetricSpace,
    xs: &[Point],
    ys: &[Point],
    zs: &[Point],
    tol: f64,
) -> Option<InequalityFailure> {
    let lhs_tuple: Vec<Point> = xs.iter().chain(zs).copied().collect();
    let rhs_tuple: Vec<Point> = ys.iter().chain(zs).copied().collect();
    let lhs = g.value(&lhs_tuple);
    let rhs = g.value(&rhs_tuple) + correction(g, xs, ys);
    (lhs > rhs + tol).then(|| InequalityFailure {
        part: if zs.is_empty() {
            Inequality::FullSubstitution
        } else {
            Inequality::PartialSubstitution
        },
        replaced: xs.to_vec(),
        substitutes: ys.to_vec(),
        fixed: zs.to_vec(),
        lhs,
        rhs,
    })
}

fn reversal_instance(
    g: &PartialNMetricSpace,
    x: Point,
    y: Point,
    tol: f64,
) -> Option<InequalityFailure> {
    let n = g.n() as f64;
    let lhs = g.mixed(x, y);
    let rhs = (n - 1.0) * g.mixed(y, x) - (n - 2.0) * g.self_distance(y);
    (lhs > rhs + tol).then(|| InequalityFailure {
        part: Inequality::Reversal,
        replaced: vec![x],
        substitutes: vec![y],
        fixed: Vec::new(),
        lhs,
        rhs,
    })
}

fn common_instance(
    g: &PartialNMetricSpace,
    xs: &[Point],
    y: Point,
    tol: f64,
) -> Option<InequalityFailure> {
    let n = g.n() as f64;
    let lhs = g.value(xs);
    let rhs = xs.iter().map(|&x| g.mixed(y, x)).sum::<f64>() - (n - 1.0) * g.self_distance(y);
    (lhs > rhs + tol).then(|| InequalityFailure {
        part: Inequality::CommonSubstitute,
        replaced: xs.to_vec(),
        substitutes: vec![y; xs.len()],
        fixed: Vec::new(),
        lhs,
        rhs,
    })
}

/// Instantiates the four basic inequalities, either over every assignment
/// or over `samples` random assignments per part.
pub fn verify_basic_inequalities(
    g: &PartialNMetricSpace,
    coverage: Coverage,
    tol: f64,
) -> BasicInequalityReport {
    let n = g.n();
    let pts: Vec<Point> = g.points().collect();
    let mut checked = [0usize; 4];
    let mut failures = Vec::new();
    let mut record = |part: usize, f: Option<InequalityFailure>| {
        checked[part] += 1;
        failures.extend(f);
    };
    match coverage {
        Coverage::Exhaustive => {
            for k in 1..=n {
                let part = if k == n { 1 } else { 0 };
                let zs_all: Vec<Vec<Point>> = pts
                    .iter()
                    .copied()
                    .combinations_with_replacement(n - k)
                    .collect();
                for xs in std::iter::repeat_n(pts.iter().copied(), k)
                    .multi_cartesian_product()
                {
                    for ys in std::iter::repeat_n(pts.iter().copied(), k)
                        .multi_cartesian_product()
                    {
                        for zs in &zs_all {
                            record(part, substitution_instance(g, &xs, &ys, zs, tol));
                        }
                    }
                }
            }
            for &x in &pts {
                for &y in &pts {
                    record(2, reversal_instance(g, x, y, tol));
                }
            }
            for xs in pts.iter().copied().combinations_with_replacement(n) {
                for &y in &pts {
                    record(3, common_instance(g, &xs, y, tol));
                }
            }
        }
        Coverage::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = pts.len();
            let draw = |rng: &mut ChaCha8Rng, len: usize| -> Vec<Point> {
                (0..len).map(|_| Point(rng.gen_range(0..p))).collect()
            };
            for _ in 0..samples {
                let k = rng.gen_range(1..n);
                let (xs, ys, zs) = (draw(&mut rng, k), draw(&mut rng, k), draw(&mut rng, n - k));
                record(0, substitution_instance(g, &xs, &ys, &zs, tol));
                let (xs, ys) = (draw(&mut rng, n), draw(&mut rng, n));
                record(1, substitution_instance(g, &xs, &ys, &[], tol));
                let xy = draw(&mut rng, 2);
                record(2, reversal_instance(g, xy[0], xy[1], tol));
                let (xs, y) = (draw(&mut rng, n), draw(&mut rng, 1)[0]);
                record(3, common_instance(g, &xs, y, tol));
            }
        }
    }
    BasicInequalityReport { checked, failures }
}

/// Outcome of one limit-lemma instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaStatus {
    Holds,
    Fails,
    /// The limit expression does not settle on the tail, so the lemma's
    /// proviso that it exists is not met.
    NotStabilized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaCheck {
    /// Short label such as `limit.a[k=2]` or `special.d[k=1]`.
    pub label: String,
    pub status: LemmaStatus,
    /// Range of the limit expression over the tail.
    pub observed: (f64, f64),
    /// Value the limit is compared against.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitLemmaReport {
    pub limit: Vec<LemmaCheck>,
    /// Present when the candidate is also a special limit.
    pub special: Option<Vec<LemmaCheck>>,
}

impl LimitLemmaReport {
    pub fn failures(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.limit
            .iter()
            .chain(self.special.iter().flatten())
            .filter(|c| c.status == LemmaStatus::Fails)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Relation {
    AtMost,
    Equal,
}

fn judge(label: String, values: &[f64], bound: f64, rel: Relation, tol: f64) -> LemmaCheck {
    let (lo, hi, mean) = spread(values.iter().copied()).expect("non-empty tail");
    let status = if hi - lo > tol {
        LemmaStatus::NotStabilized
    } else {
        let ok = match rel {
            Relation::AtMost => mean <= bound + tol,
            Relation::Equal => (mean - bound).abs() <= tol,
        };
        if ok {
            LemmaStatus::Holds
        } else {
            LemmaStatus::Fails
        }
    };
    LemmaCheck {
        label,
        status,
        observed: (lo, hi),
        bound,
    }
}

/// Checks the limit inequalities (and, for a special limit, the matching
/// equalities) on the tail, with parameter points `b_1, .., b_{n-1}`.
///
/// A multi-index limit over the tail ranges over every multiset of tail
/// points, which is exactly the set of values the indices can reach there.
pub fn verify_limit_lemmas(
    prefix: &SequencePrefix<'_>,
    a: Point,
    params: &[Point],
    opts: &PrefixOptions,
) -> Result<LimitLemmaReport, SequenceError> {
    let g = prefix.space;
    let n = g.n();
    if params.len() != n - 1 {
        return Err(SequenceError::ParameterCount {
            expected: n - 1,
            got: params.len(),
        });
    }
    if !check_limit(prefix, a, opts)? {
        return Err(SequenceError::NotALimit);
    }
    let tol = opts.tol;
    let tail = prefix.tail(opts)?;
    let support: Vec<Point> = tail.iter().copied().sorted().dedup().collect();
    let with_tail = |k: usize, rest: &[Point]| -> Vec<f64> {
        support
            .iter()
            .copied()
            .combinations_with_replacement(k)
            .map(|mut m| {
                m.extend_from_slice(rest);
                g.value(&m)
            })
            .collect()
    };
    let with_a = |k: usize, rest: &[Point]| -> f64 {
        let mut m = vec![a; k];
        m.extend_from_slice(rest);
        g.value(&m)
    };
    let toward_a: Vec<f64> = tail.iter().map(|&x| g.mixed(x, a)).collect();
    let self_a = g.self_distance(a);
    let full = with_tail(n, &[]);

    let families = |rel: Relation, prefix_label: &str| -> Vec<LemmaCheck> {
        let mut out = Vec::new();
        for k in 1..=n {
            let rest = &params[..n - k];
            out.push(judge(
                format!("{prefix_label}.a[k={k}]"),
                &with_tail(k, rest),
                with_a(k, rest),
                rel,
                tol,
            ));
        }
        out.push(judge(format!("{prefix_label}.b"), &full, self_a, rel, tol));
        for k in 1..=n {
            let rest = vec![a; n - k];
            out.push(judge(
                format!("{prefix_label}.c[k={k}]"),
                &with_tail(k, &rest),
                self_a,
                rel,
                tol,
            ));
        }
        out.push(judge(format!("{prefix_label}.d"), &toward_a, self_a, rel, tol));
        out
    };

    let limit = families(Relation::AtMost, "limit");
    let special = match check_special_limit(prefix, a, opts) {
        Ok(true) => Some(families(Relation::Equal, "special")),
        Ok(false) | Err(SequenceError::NotCauchyOnPrefix) => None,
        Err(e) => return Err(e),
    };
    Ok(LimitLemmaReport { limit, special })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{validate, CheckOptions, Profile};
    use crate::fixtures;
    use proptest::prelude::*;

    const A: Point = Point(0);
    const B: Point = Point(1);

    fn five() -> PartialNMetricSpace {
        fixtures::two_point_five_metric()
    }

    fn exact() -> PrefixOptions {
        PrefixOptions {
            window: None,
            tol: 0.0,
        }
    }

    #[test]
    fn constant_sequence_is_cauchy_at_self_distance() {
        let g = fixtures::random_valid_space(3, 3, Profile::PartialNMetric, 1);
        for x in g.points() {
            let seq = SequencePrefix::new(&g, vec![x; 8]).unwrap();
            let v = estimate_cauchy(&seq, &exact()).unwrap();
            assert!(v.holds_on_prefix);
            assert_eq!(v.r_estimate, Some(g.self_distance(x)));
            assert_eq!(v.residual, 0.0);
            assert!(check_limit(&seq, x, &exact()).unwrap());
            assert!(check_special_limit(&seq, x, &exact()).unwrap());
            assert_eq!(special_limit_search(&seq, &exact()).unwrap(), Some(x));
        }
    }

    #[test]
    fn eventually_constant_in_five_metric() {
        let g = five();
        let seq = SequencePrefix::from_names(&g, &["a", "b", "b", "b", "b", "b"]).unwrap();
        let opts = PrefixOptions::default();
        assert_eq!(seq.resolve_window(&opts).unwrap(), 4);
        let v = estimate_cauchy(&seq, &opts).unwrap();
        assert!(v.holds_on_prefix);
        assert_eq!(v.r_estimate, Some(0.0));
        assert!(check_limit(&seq, B, &opts).unwrap());
        // G(<a>^4, b) = 3 on the tail
        assert!(!check_limit(&seq, A, &opts).unwrap());
        assert!(check_special_limit(&seq, B, &opts).unwrap());
        assert!(!check_special_limit(&seq, A, &opts).unwrap());
        assert_eq!(special_limit_search(&seq, &opts).unwrap(), Some(B));
    }

    #[test]
    fn alternating_is_not_cauchy() {
        let g = five();
        let seq = SequencePrefix::from_names(&g, &["a", "b", "a", "b", "a", "b", "a", "b"]).unwrap();
        let v = estimate_cauchy(&seq, &PrefixOptions::default()).unwrap();
        assert!(!v.holds_on_prefix);
        // tail pairwise values are G(<a>^5)=0, G(<a>^4,b)=3, G(<b>^4,a)=4, G(<b>^5)=0
        assert_eq!(v.r_estimate, Some(7.0 / 4.0));
        assert_eq!(
            special_limit_search(&seq, &PrefixOptions::default()),
            Err(SequenceError::NotCauchyOnPrefix)
        );
    }

    #[test]
    fn window_errors() {
        let g = five();
        let seq = SequencePrefix::from_names(&g, &["a", "b"]).unwrap();
        let opts = PrefixOptions {
            window: Some(3),
            tol: 0.0,
        };
        assert_eq!(
            estimate_cauchy(&seq, &opts),
            Err(SequenceError::WindowTooLarge { window: 3, len: 2 })
        );
        // default window shrinks to the prefix
        assert_eq!(seq.resolve_window(&PrefixOptions::default()).unwrap(), 2);
        assert!(SequencePrefix::new(&g, vec![]).is_err());
        assert!(SequencePrefix::from_names(&g, &["z"]).is_err());
    }

    #[test]
    fn reversal_in_five_metric() {
        let g = five();
        // G(a,a,a,a,b) = 3 <= 4 G(b,b,b,b,a) - 3 G(<b>^5) = 16
        assert_eq!(g.mixed(A, B), 3.0);
        assert!(reversal_instance(&g, A, B, 0.0).is_none());
        let r = verify_basic_inequalities(&g, Coverage::Exhaustive, DEFAULT_TOL);
        assert!(r.passed(), "{:?}", r.failures);
        // n = 5, p = 2: k<5 assignments plus full, 4 reversal, 6*2 common
        let partial: usize = (1..5).map(|k| 4usize.pow(k) * (6 - k as usize)).sum();
        assert_eq!(r.checked, [partial, 4usize.pow(5), 4, 12]);
    }

    #[test]
    fn full_substitution_by_itself_is_equality() {
        let g = fixtures::random_valid_space(3, 3, Profile::PartialNMetric, 7);
        for xs in g.points().combinations_with_replacement(3) {
            assert_eq!(correction(&g, &xs, &xs), 0.0);
            assert!(substitution_instance(&g, &xs, &xs, &[], 0.0).is_none());
        }
    }

    #[test]
    fn basic_inequalities_catch_invalid_table() {
        let g = fixtures::random_table(3, 3, 3);
        assert!(!validate(&g, Profile::PartialNMetric, &CheckOptions::default()).passed());
        let r = verify_basic_inequalities(&g, Coverage::Exhaustive, DEFAULT_TOL);
        assert!(!r.passed());
        let sampled = verify_basic_inequalities(
            &fixtures::random_valid_space(4, 3, Profile::PartialNMetric, 2),
            Coverage::Sampled {
                samples: 500,
                seed: 42,
            },
            DEFAULT_TOL,
        );
        assert!(sampled.passed());
        assert_eq!(sampled.checked, [500; 4]);
    }

    #[test]
    fn limit_lemmas_for_eventually_constant() {
        let g = five();
        let seq = SequencePrefix::from_names(&g, &["a", "b", "b", "b", "b", "b"]).unwrap();
        let opts = PrefixOptions::default();
        let report = verify_limit_lemmas(&seq, B, &[A, A, B, A], &opts).unwrap();
        assert!(report.limit.iter().all(|c| c.status == LemmaStatus::Holds));
        let special = report.special.unwrap();
        let d = special.iter().find(|c| c.label == "special.d").unwrap();
        assert_eq!(d.observed, (0.0, 0.0));
        assert_eq!(d.bound, 0.0);
        assert!(special.iter().all(|c| c.status == LemmaStatus::Holds));
        assert_eq!(
            verify_limit_lemmas(&seq, A, &[A, A, B, A], &opts),
            Err(SequenceError::NotALimit)
        );
        assert!(matches!(
            verify_limit_lemmas(&seq, B, &[A], &opts),
            Err(SequenceError::ParameterCount { expected: 4, got: 1 })
        ));
    }

    #[test]
    fn limit_without_special_limit() {
        // n = 2, G(a,a) = 0, G(a,b) = 1, G(b,b) = 1: a is a limit of b,b,b,..
        // while r = 1 differs from G(a,a)
        let g = PartialNMetricSpace::build(
            vec!["a".into(), "b".into()],
            2,
            [(["a", "a"], 0.0), (["a", "b"], 1.0), (["b", "b"], 1.0)],
        )
        .unwrap();
        assert!(validate(&g, Profile::PartialNMetric, &CheckOptions::default()).passed());
        let seq = SequencePrefix::new(&g, vec![B; 6]).unwrap();
        let opts = exact();
        assert!(!check_limit(&seq, A, &opts).unwrap());
        assert!(check_limit(&seq, B, &opts).unwrap());
        let g2 = PartialNMetricSpace::build(
            vec!["a".into(), "b".into()],
            2,
            [(["a", "a"], 1.0), (["a", "b"], 1.0), (["b", "b"], 0.0)],
        )
        .unwrap();
        assert!(validate(&g2, Profile::PartialNMetric, &CheckOptions::default()).passed());
        let seq = SequencePrefix::new(&g2, vec![B; 6]).unwrap();
        assert!(check_limit(&seq, A, &opts).unwrap());
        assert!(!check_special_limit(&seq, A, &opts).unwrap());
        let report = verify_limit_lemmas(&seq, A, &[B], &opts).unwrap();
        assert!(report.special.is_none());
        let b = report.limit.iter().find(|c| c.label == "limit.b").unwrap();
        // lim G(x_m, x_m') = 0 <= G(a,a) = 1, strictly
        assert_eq!(b.status, LemmaStatus::Holds);
        assert_eq!((b.observed.0, b.bound), (0.0, 1.0));
    }

    #[test]
    fn non_settling_expression_is_reported() {
        // a and b both limits of the tail; G(a,b) differs from G(b,b) so the
        // full expression over {a,b} does not settle
        let g = PartialNMetricSpace::build(
            vec!["a".into(), "b".into(), "c".into()],
            2,
            [
                (["a", "a"], 0.0),
                (["b", "b"], 0.0),
                (["c", "c"], 0.0),
                (["a", "b"], 2.0),
                (["a", "c"], 0.0),
                (["b", "c"], 0.0),
            ],
        )
        .unwrap();
        let seq = SequencePrefix::from_names(&g, &["a", "b", "a", "b"]).unwrap();
        let c = Point(2);
        assert!(check_limit(&seq, c, &exact()).unwrap());
        let report = verify_limit_lemmas(&seq, c, &[c], &exact()).unwrap();
        let b = report.limit.iter().find(|c| c.label == "limit.b").unwrap();
        assert_eq!(b.status, LemmaStatus::NotStabilized);
    }

    #[test]
    fn exact_cycles() {
        let g = five();
        let fixed = EventuallyPeriodic::new(vec![A], vec![B]);
        assert_eq!(fixed.term(0), A);
        assert_eq!(fixed.term(5), B);
        let c = fixed.cauchy(&g, 0.0);
        assert!(c.holds);
        assert_eq!(c.r, 0.0);
        assert_eq!(fixed.special_limit_search(&g, 0.0), Ok(Some(B)));
        assert!(fixed.is_special_limit_by_gap(&g, B, 0.0));

        let two = EventuallyPeriodic::new(vec![], vec![A, B]);
        let c = two.cauchy(&g, DEFAULT_TOL);
        assert!(!c.holds);
        assert_eq!(c.spread, 4.0);
        assert_eq!(
            two.special_limit_search(&g, DEFAULT_TOL),
            Err(SequenceError::NotCauchyOnPrefix)
        );
    }

    #[test]
    fn ball_and_value_limits_agree_on_five_metric() {
        let g = five();
        let seq = SequencePrefix::from_names(&g, &["a", "b", "b", "b", "b"]).unwrap();
        for a in g.points() {
            assert_eq!(
                check_limit(&seq, a, &exact()).unwrap(),
                check_limit_via_balls(&seq, a, &exact()).unwrap()
            );
        }
    }

    fn eventually_constant() -> impl Strategy<Value = (u64, Vec<usize>, usize)> {
        (any::<u64>(), prop::collection::vec(0usize..3, 0..4), 0usize..3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn pairwise_and_full_criteria_agree((seed, head, last) in eventually_constant()) {
            let g = fixtures::random_valid_space(3, 3, Profile::PartialNMetric, seed);
            let mut items: Vec<Point> = head.into_iter().map(Point).collect();
            items.extend(std::iter::repeat_n(Point(last), 6));
            let seq = SequencePrefix::new(&g, items).unwrap();
            let opts = PrefixOptions { window: Some(4), tol: DEFAULT_TOL };
            let pair = estimate_cauchy(&seq, &opts).unwrap();
            let full = estimate_cauchy_full(&seq, &opts).unwrap();
            prop_assert!(pair.holds_on_prefix && full.holds_on_prefix);
            prop_assert!((pair.r_estimate.unwrap() - full.r_estimate.unwrap()).abs() <= DEFAULT_TOL);
        }

        #[test]
        fn special_limit_routes_agree((seed, head, last) in eventually_constant()) {
            let g = fixtures::random_valid_space(3, 3, Profile::PartialNMetric, seed);
            let mut items: Vec<Point> = head.into_iter().map(Point).collect();
            items.extend(std::iter::repeat_n(Point(last), 6));
            let seq = SequencePrefix::new(&g, items).unwrap();
            let opts = PrefixOptions { window: Some(4), tol: 0.0 };
            for a in g.points() {
                let by_gap = check_special_limit(&seq, a, &opts).unwrap();
                prop_assert_eq!(by_gap, check_special_limit_by_value(&seq, a, &opts).unwrap());
                prop_assert_eq!(
                    check_limit(&seq, a, &opts).unwrap(),
                    check_limit_via_balls(&seq, a, &opts).unwrap()
                );
                if by_gap {
                    // reversed-role limit equals the self-distance
                    let tail = seq.tail(&opts).unwrap();
                    for &x in tail {
                        prop_assert!((g.mixed(x, a) - g.self_distance(a)).abs() <= DEFAULT_TOL);
                    }
                    let report = verify_limit_lemmas(&seq, a, &[a, Point(0)], &opts).unwrap();
                    prop_assert_eq!(report.failures().count(), 0);
                }
            }
            prop_assert!(special_limit_search(&seq, &opts).is_ok());
        }

        #[test]
        fn exact_special_limit_routes_agree(
            seed in any::<u64>(),
            transient in prop::collection::vec(0usize..3, 0..3),
            cycle in prop::collection::vec(0usize..3, 1..3),
        ) {
            let g = fixtures::random_valid_space(3, 2, Profile::PartialNMetric, seed);
            let seq = EventuallyPeriodic::new(
                transient.into_iter().map(Point).collect(),
                cycle.into_iter().map(Point).collect(),
            );
            for a in g.points() {
                prop_assert_eq!(
                    seq.is_special_limit(&g, a, DEFAULT_TOL),
                    seq.is_special_limit_by_gap(&g, a, DEFAULT_TOL)
                );
            }
        }
    }
}
