//! Finite partial n-metric spaces and the structures built from them.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use thiserror::Error;

use crate::axioms::{self, CheckOptions, Profile};
use crate::multiset::{multiset_count, MultisetIndex};

/// Default absolute tolerance for axiom inequalities.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Index of a point in its space's point order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub usize);

impl Point {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("arity error: {0}")]
    Arity(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("a space needs at least one point")]
    Empty,
    #[error("missing entry for multiset {{{}}}", .0.join(", "))]
    MissingEntry(Vec<String>),
    #[error("duplicate entry for multiset {{{}}}", .0.join(", "))]
    DuplicateEntry(Vec<String>),
    #[error("value {value} for {{{}}} is not finite", .key.join(", "))]
    NonFinite { key: Vec<String>, value: f64 },
    #[error("table with {points} points and arity {n} is too large to index")]
    TooLarge { points: usize, n: usize },
    #[error("partial metric axiom `{}` fails at ({}): {} vs {}", .0.axiom, .0.points.join(", "), .0.lhs, .0.rhs)]
    PartialMetricAxiomViolation(PartialMetricViolation),
    #[error("space does not pass the {0} profile")]
    InvalidSpace(Profile),
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct CachedVerdict {
    profile: Profile,
    tol: f64,
    pass: bool,
}

#[derive(Debug, Default)]
struct VerdictCache(RwLock<Vec<CachedVerdict>>);

impl VerdictCache {
    fn get(&self, profile: Profile, tol: f64) -> Option<bool> {
        let guard = self.0.read().unwrap_or_else(|e| e.into_inner());
        guard
            .iter()
            .find(|c| c.profile == profile && c.tol == tol)
            .map(|c| c.pass)
    }

    fn put(&self, profile: Profile, tol: f64, pass: bool) {
        let mut guard = self.0.write().unwrap_or_else(|e| e.into_inner());
        if !guard.iter().any(|c| c.profile == profile && c.tol == tol) {
            guard.push(CachedVerdict { profile, tol, pass });
        }
    }

    fn snapshot(&self) -> Vec<CachedVerdict> {
        self.0.read().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

impl Clone for VerdictCache {
    fn clone(&self) -> Self {
        VerdictCache(RwLock::new(self.snapshot()))
    }
}

/// A finite set of named points with a total, symmetric `n`-ary table.
///
/// Values are stored once per multiset; every ordering of a tuple reads the
/// same slot, so symmetry holds by construction. Construction checks only
/// that the table is total; axioms are checked separately.
#[derive(Clone, Debug)]
pub struct PartialNMetricSpace {
    names: Vec<String>,
    lookup: HashMap<String, Point>,
    n: usize,
    index: MultisetIndex,
    values: Vec<f64>,
    flags: VerdictCache,
}

fn check_points(points: &[String]) -> Result<HashMap<String, Point>, SpaceError> {
    if points.is_empty() {
        return Err(SpaceError::Empty);
    }
    let mut lookup = HashMap::with_capacity(points.len());
    for (i, name) in points.iter().enumerate() {
        if lookup.insert(name.clone(), Point(i)).is_some() {
            return Err(SpaceError::DuplicatePoint(name.clone()));
        }
    }
    Ok(lookup)
}

impl PartialNMetricSpace {
    /// Builds a space from explicit multiset entries (in any element order).
    pub fn build<S, I, M>(points: Vec<String>, n: usize, entries: I) -> Result<Self, SpaceError>
    where
        I: IntoIterator<Item = (M, f64)>,
        M: AsRef<[S]>,
        S: AsRef<str>,
    {
        if n < 2 {
            return Err(SpaceError::Arity(format!("arity must be at least 2, got {n}")));
        }
        let lookup = check_points(&points)?;
        let index = MultisetIndex::new(points.len(), n).ok_or(SpaceError::TooLarge {
            points: points.len(),
            n,
        })?;
        let mut slots: Vec<Option<f64>> = vec![None; index.len()];
        let mut key = Vec::with_capacity(n);
        for (multiset, value) in entries {
            let multiset = multiset.as_ref();
            if multiset.len() != n {
                return Err(SpaceError::Arity(format!(
                    "multiset {{{}}} has {} elements, expected {n}",
                    multiset.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(", "),
                    multiset.len()
                )));
            }
            key.clear();
            for name in multiset {
                let name = name.as_ref();
                key.push(
                    *lookup
                        .get(name)
                        .ok_or_else(|| SpaceError::UnknownPoint(name.to_string()))?,
                );
            }
            key.sort_unstable();
            let names = || key.iter().map(|p| points[p.index()].clone()).collect();
            if !value.is_finite() {
                return Err(SpaceError::NonFinite { key: names(), value });
            }
            let slot = &mut slots[index.rank(&key)];
            if slot.is_some() {
                return Err(SpaceError::DuplicateEntry(names()));
            }
            *slot = Some(value);
        }
        let mut values = Vec::with_capacity(slots.len());
        for (rank, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(v) => values.push(v),
                None => {
                    let missing = index
                        .unrank(rank)
                        .into_iter()
                        .map(|p| points[p.index()].clone())
                        .collect();
                    return Err(SpaceError::MissingEntry(missing));
                }
            }
        }
        Ok(Self {
            names: points,
            lookup,
            n,
            index,
            values,
            flags: VerdictCache::default(),
        })
    }

    /// Builds a space by evaluating `f` once on every sorted multiset.
    pub fn from_fn<F>(points: Vec<String>, n: usize, mut f: F) -> Result<Self, SpaceError>
    where
        F: FnMut(&[Point]) -> f64,
    {
        if n < 2 {
            return Err(SpaceError::Arity(format!("arity must be at least 2, got {n}")));
        }
        let lookup = check_points(&points)?;
        let index = MultisetIndex::new(points.len(), n).ok_or(SpaceError::TooLarge {
            points: points.len(),
            n,
        })?;
        let mut values = Vec::with_capacity(index.len());
        for m in index.iter() {
            let v = f(&m);
            if !v.is_finite() {
                return Err(SpaceError::NonFinite {
                    key: m.iter().map(|p| points[p.index()].clone()).collect(),
                    value: v,
                });
            }
            values.push(v);
        }
        Ok(Self {
            names: points,
            lookup,
            n,
            index,
            values,
            flags: VerdictCache::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, p: Point) -> &str {
        &self.names[p.index()]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = Point> + Clone {
        (0..self.names.len()).map(Point)
    }

    pub fn point(&self, name: &str) -> Result<Point, SpaceError> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| SpaceError::UnknownPoint(name.to_string()))
    }

    pub fn multiset_index(&self) -> &MultisetIndex {
        &self.index
    }

    /// Number of stored table values.
    pub fn table_len(&self) -> usize {
        self.values.len()
    }

    /// Value at a sorted multiset.
    pub fn value_sorted(&self, sorted: &[Point]) -> f64 {
        self.values[self.index.rank(sorted)]
    }

    /// Value at the multiset with the given rank.
    pub fn value_at_rank(&self, rank: usize) -> f64 {
        self.values[rank]
    }

    /// Value at an arbitrary tuple of this space's points.
    ///
    /// Panics if the tuple has the wrong length or a foreign point; use
    /// [`eval`](Self::eval) for checked access.
    pub fn value(&self, tuple: &[Point]) -> f64 {
        assert_eq!(tuple.len(), self.n, "tuple length must equal the arity");
        let mut key: smallkey::Key = smallkey::Key::from_slice(tuple);
        key.as_mut().sort_unstable();
        self.value_sorted(key.as_ref())
    }

    /// Checked evaluation; any permutation of `tuple` gives the same result.
    pub fn eval(&self, tuple: &[Point]) -> Result<f64, SpaceError> {
        if tuple.len() != self.n {
            return Err(SpaceError::Arity(format!(
                "tuple has {} elements, expected {}",
                tuple.len(),
                self.n
            )));
        }
        if let Some(p) = tuple.iter().find(|p| p.index() >= self.len()) {
            return Err(SpaceError::UnknownPoint(p.to_string()));
        }
        Ok(self.value(tuple))
    }

    pub fn eval_names<S: AsRef<str>>(&self, tuple: &[S]) -> Result<f64, SpaceError> {
        let pts = tuple
            .iter()
            .map(|s| self.point(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        self.eval(&pts)
    }

    /// `G(x, .., x)`.
    pub fn self_distance(&self, x: Point) -> f64 {
        self.mixed_k(x, x, 0)
    }

    pub fn self_distance_of(&self, name: &str) -> Result<f64, SpaceError> {
        Ok(self.self_distance(self.point(name)?))
    }

    /// `G(x, .., x, y)` with `n - 1` copies of `x`.
    pub fn mixed(&self, x: Point, y: Point) -> f64 {
        self.mixed_k(x, y, 1)
    }

    /// `G` at `n - k` copies of `x` and `k` copies of `y`.
    pub fn mixed_k(&self, x: Point, y: Point, k: usize) -> f64 {
        debug_assert!(k <= self.n);
        let mut key = smallkey::Key::repeat(x, self.n);
        for slot in &mut key.as_mut()[self.n - k..] {
            *slot = y;
        }
        key.as_mut().sort_unstable();
        self.value_sorted(key.as_ref())
    }

    /// `G(x, .., x, y) - G(x, .., x)`: how far `y` sits from the centre `x`.
    pub fn gap(&self, x: Point, y: Point) -> f64 {
        self.mixed(x, y) - self.self_distance(x)
    }

    /// All `(sorted multiset, value)` pairs in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<Point>, f64)> + '_ {
        self.index.iter().zip(self.values.iter().copied())
    }

    /// True when every self-distance is zero within `tol`.
    pub fn is_n_metric(&self, tol: f64) -> bool {
        self.points().all(|x| self.self_distance(x).abs() <= tol)
    }

    pub(crate) fn cached_verdict(&self, profile: Profile, tol: f64) -> Option<bool> {
        self.flags.get(profile, tol)
    }

    pub(crate) fn cache_verdict(&self, profile: Profile, tol: f64, pass: bool) {
        self.flags.put(profile, tol, pass)
    }

    /// Verdict for `profile`, running the checker on a cache miss.
    pub fn passes(&self, profile: Profile, tol: f64) -> bool {
        if let Some(pass) = self.cached_verdict(profile, tol) {
            return pass;
        }
        let opts = CheckOptions {
            tol,
            ..CheckOptions::default()
        };
        axioms::validate(self, profile, &opts).passed()
    }
}

/// Equality compares points, arity and table; cached verdicts are ignored.
impl PartialEq for PartialNMetricSpace {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.n == other.n && self.values == other.values
    }
}

mod smallkey {
    use super::Point;

    const INLINE: usize = 16;

    /// Stack buffer for short tuples, heap fallback for large arities.
    pub(super) enum Key {
        Inline([Point; INLINE], usize),
        Heap(Vec<Point>),
    }

    impl Key {
        pub(super) fn from_slice(s: &[Point]) -> Self {
            if s.len() <= INLINE {
                let mut buf = [Point(0); INLINE];
                buf[..s.len()].copy_from_slice(s);
                Key::Inline(buf, s.len())
            } else {
                Key::Heap(s.to_vec())
            }
        }

        pub(super) fn repeat(p: Point, len: usize) -> Self {
            if len <= INLINE {
                Key::Inline([p; INLINE], len)
            } else {
                Key::Heap(vec![p; len])
            }
        }
    }

    impl AsRef<[Point]> for Key {
        fn as_ref(&self) -> &[Point] {
            match self {
                Key::Inline(buf, len) => &buf[..*len],
                Key::Heap(v) => v,
            }
        }
    }

    impl AsMut<[Point]> for Key {
        fn as_mut(&mut self) -> &mut [Point] {
            match self {
                Key::Inline(buf, len) => &mut buf[..*len],
                Key::Heap(v) => v,
            }
        }
    }
}

/// Number of table entries for `points` points at arity `n`.
pub fn table_size(points: usize, n: usize) -> Option<usize> {
    multiset_count(points, n)
}

/// A failed partial-metric axiom instance.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialMetricViolation {
    pub axiom: &'static str,
    pub points: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
}

/// A two-argument partial metric on a finite set.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialMetricSpace {
    names: Vec<String>,
    lookup: HashMap<String, Point>,
    // row-major, symmetric
    table: Vec<f64>,
}

impl PartialMetricSpace {
    /// Builds from unordered pairs; every pair including `(x, x)` must appear once.
    pub fn build<S, I>(points: Vec<String>, entries: I) -> Result<Self, SpaceError>
    where
        I: IntoIterator<Item = ([S; 2], f64)>,
        S: AsRef<str>,
    {
        let lookup = check_points(&points)?;
        let p = points.len();
        let mut table: Vec<Option<f64>> = vec![None; p * p];
        for ([x, y], value) in entries {
            let x = *lookup
                .get(x.as_ref())
                .ok_or_else(|| SpaceError::UnknownPoint(x.as_ref().to_string()))?;
            let y = *lookup
                .get(y.as_ref())
                .ok_or_else(|| SpaceError::UnknownPoint(y.as_ref().to_string()))?;
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            let key = vec![points[lo.0].clone(), points[hi.0].clone()];
            if !value.is_finite() {
                return Err(SpaceError::NonFinite { key, value });
            }
            if table[lo.0 * p + hi.0].is_some() {
                return Err(SpaceError::DuplicateEntry(key));
            }
            table[lo.0 * p + hi.0] = Some(value);
            table[hi.0 * p + lo.0] = Some(value);
        }
        let mut out = Vec::with_capacity(p * p);
        for i in 0..p {
            for j in 0..p {
                match table[i * p + j] {
                    Some(v) => out.push(v),
                    None => {
                        let (lo, hi) = (i.min(j), i.max(j));
                        return Err(SpaceError::MissingEntry(vec![
                            points[lo].clone(),
                            points[hi].clone(),
                        ]));
                    }
                }
            }
        }
        Ok(Self {
            names: points,
            lookup,
            table: out,
        })
    }

    /// Builds from a dense symmetric matrix given row-major.
    pub fn from_matrix(points: Vec<String>, matrix: Vec<f64>) -> Result<Self, SpaceError> {
        let lookup = check_points(&points)?;
        let p = points.len();
        if matrix.len() != p * p {
            return Err(SpaceError::Arity(format!(
                "matrix has {} values, expected {}",
                matrix.len(),
                p * p
            )));
        }
        for i in 0..p {
            for j in 0..p {
                let v = matrix[i * p + j];
                let key = vec![points[i].clone(), points[j].clone()];
                if !v.is_finite() {
                    return Err(SpaceError::NonFinite { key, value: v });
                }
                if v != matrix[j * p + i] {
                    return Err(SpaceError::PartialMetricAxiomViolation(
                        PartialMetricViolation {
                            axiom: "symmetry",
                            points: key,
                            lhs: v,
                            rhs: matrix[j * p + i],
                        },
                    ));
                }
            }
        }
        Ok(Self {
            names: points,
            lookup,
            table: matrix,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn point(&self, name: &str) -> Result<Point, SpaceError> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| SpaceError::UnknownPoint(name.to_string()))
    }

    pub fn get(&self, x: Point, y: Point) -> f64 {
        self.table[x.0 * self.len() + y.0]
    }

    /// Checks small self-distances, separation and the partial triangle
    /// inequality. Symmetry is structural.
    pub fn check_axioms(&self, tol: f64) -> Vec<PartialMetricViolation> {
        let p = self.len();
        let names = |pts: &[usize]| pts.iter().map(|&i| self.names[i].clone()).collect();
        let mut out = Vec::new();
        for x in 0..p {
            for y in 0..p {
                let (px, py) = (Point(x), Point(y));
                let (xx, xy) = (self.get(px, px), self.get(px, py));
                if xx > xy + tol {
                    out.push(PartialMetricViolation {
                        axiom: "small-self-distance",
                        points: names(&[x, y]),
                        lhs: xx,
                        rhs: xy,
                    });
                }
            }
        }
        for x in 0..p {
            for y in x + 1..p {
                let (px, py) = (Point(x), Point(y));
                let (xx, xy, yy) = (self.get(px, px), self.get(px, py), self.get(py, py));
                if (xx - xy).abs() <= tol && (yy - xy).abs() <= tol {
                    out.push(PartialMetricViolation {
                        axiom: "separation",
                        points: names(&[x, y]),
                        lhs: xx,
                        rhs: yy,
                    });
                }
            }
        }
        for x in 0..p {
            for y in 0..p {
                let xy = self.get(Point(x), Point(y));
                for z in 0..p {
                    let pz = Point(z);
                    let rhs = self.get(Point(x), pz) + self.get(pz, Point(y)) - self.get(pz, pz);
                    if xy > rhs + tol {
                        out.push(PartialMetricViolation {
                            axiom: "triangle",
                            points: names(&[x, y, z]),
                            lhs: xy,
                            rhs,
                        });
                    }
                }
            }
        }
        out
    }

    /// True when `p(x, x) < p(x, y)` by more than `tol` for all `x != y`.
    pub fn is_strong(&self, tol: f64) -> bool {
        let p = self.len();
        (0..p).all(|x| {
            (0..p).all(|y| x == y || self.get(Point(x), Point(x)) + tol < self.get(Point(x), Point(y)))
        })
    }
}

/// Lifts a partial metric to arity `n` by summing it over all index pairs.
///
/// In checked mode the partial metric is validated first and the first
/// violation is returned as an error.
pub fn from_partial_metric(
    pspace: &PartialMetricSpace,
    n: usize,
    checked: bool,
    tol: f64,
) -> Result<PartialNMetricSpace, SpaceError> {
    if n < 2 {
        return Err(SpaceError::Arity(format!("arity must be at least 2, got {n}")));
    }
    if checked {
        if let Some(v) = pspace.check_axioms(tol).into_iter().next() {
            return Err(SpaceError::PartialMetricAxiomViolation(v));
        }
    }
    PartialNMetricSpace::from_fn(pspace.names().to_vec(), n, |m| {
        let mut sum = 0.0;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                sum += pspace.get(m[i], m[j]);
            }
        }
        sum
    })
}

/// A finite metric, stored as a dense symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpace {
    names: Vec<String>,
    table: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricViolation {
    pub axiom: &'static str,
    pub points: Vec<Point>,
    pub lhs: f64,
    pub rhs: f64,
}

impl MetricSpace {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn distance(&self, x: Point, y: Point) -> f64 {
        self.table[x.0 * self.len() + y.0]
    }

    /// Checks zero self-distance, positivity off the diagonal, symmetry and
    /// the triangle inequality.
    pub fn check_axioms(&self, tol: f64) -> Vec<MetricViolation> {
        let p = self.len();
        let mut out = Vec::new();
        for x in (0..p).map(Point) {
            let d = self.distance(x, x);
            if d.abs() > tol {
                out.push(MetricViolation {
                    axiom: "zero-self-distance",
                    points: vec![x],
                    lhs: d,
                    rhs: 0.0,
                });
            }
            for y in (0..p).map(Point) {
                let dxy = self.distance(x, y);
                if x != y && dxy <= tol {
                    out.push(MetricViolation {
                        axiom: "positivity",
                        points: vec![x, y],
                        lhs: dxy,
                        rhs: 0.0,
                    });
                }
                if (dxy - self.distance(y, x)).abs() > tol {
                    out.push(MetricViolation {
                        axiom: "symmetry",
                        points: vec![x, y],
                        lhs: dxy,
                        rhs: self.distance(y, x),
                    });
                }
                for z in (0..p).map(Point) {
                    let rhs = self.distance(x, z) + self.distance(z, y);
                    if dxy > rhs + tol {
                        out.push(MetricViolation {
                            axiom: "triangle",
                            points: vec![x, y, z],
                            lhs: dxy,
                            rhs,
                        });
                    }
                }
            }
        }
        out
    }
}

/// The associated metric `d(x, y) = gap(x, y) + gap(y, x)`, without
/// validating the space first.
pub fn associated_metric_unchecked(space: &PartialNMetricSpace) -> MetricSpace {
    let p = space.len();
    let mut table = vec![0.0; p * p];
    for x in space.points() {
        for y in space.points() {
            table[x.0 * p + y.0] = space.gap(x, y) + space.gap(y, x);
        }
    }
    MetricSpace {
        names: space.names().to_vec(),
        table,
    }
}

/// The associated metric of a space that passes the partial n-metric profile.
pub fn associated_metric(space: &PartialNMetricSpace, tol: f64) -> Result<MetricSpace, SpaceError> {
    if !space.passes(Profile::PartialNMetric, tol) {
        return Err(SpaceError::InvalidSpace(Profile::PartialNMetric));
    }
    Ok(associated_metric_unchecked(space))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use itertools::Itertools;

    #[test]
    fn two_point_five_metric_has_six_keys() {
        let s = fixtures::two_point_five_metric();
        assert_eq!(s.table_len(), 6);
        assert_eq!(s.n(), 5);
    }

    #[test]
    fn eval_canonicalizes_order() {
        let s = fixtures::two_point_five_metric();
        assert_eq!(s.eval_names(&["b", "a", "b", "a", "b"]).unwrap(), 2.0);
        assert_eq!(s.eval_names(&["a", "a", "a", "a", "a"]).unwrap(), 0.0);
        assert_eq!(s.eval_names(&["b", "b", "a", "a", "a"]).unwrap(), -1.0);
        assert_eq!(s.eval_names(&["a", "b", "b", "b", "b"]).unwrap(), 4.0);
        assert_eq!(s.eval_names(&["b", "a", "a", "a", "a"]).unwrap(), 3.0);
        assert_eq!(s.self_distance_of("a").unwrap(), 0.0);
        assert_eq!(s.self_distance_of("b").unwrap(), 0.0);
    }

    #[test]
    fn one_point_space() {
        let s = PartialNMetricSpace::build(vec!["x".into()], 3, [(["x", "x", "x"], 7.0)]).unwrap();
        assert_eq!(s.eval_names(&["x", "x", "x"]).unwrap(), 7.0);
        assert_eq!(s.self_distance_of("x").unwrap(), 7.0);
        assert!(!s.is_n_metric(DEFAULT_TOL));
    }

    #[test]
    fn build_errors() {
        let pts = || vec!["a".to_string(), "b".to_string()];
        let five: Vec<(Vec<&str>, f64)> = vec![
            (vec!["a"; 5], 0.0),
            (vec!["b"; 5], 0.0),
            (vec!["a", "b", "b", "b", "b"], 4.0),
            (vec!["b", "a", "a", "a", "a"], 3.0),
            (vec!["a", "a", "b", "b", "b"], 2.0),
        ];
        match PartialNMetricSpace::build(pts(), 5, five.clone()) {
            Err(SpaceError::MissingEntry(m)) => assert_eq!(m, vec!["a", "a", "a", "b", "b"]),
            other => panic!("expected MissingEntry, got {other:?}"),
        }
        let mut dup = five.clone();
        dup.push((vec!["b", "b", "a", "a", "a"], -1.0));
        dup.push((vec!["a", "b", "a", "b", "a"], -1.0));
        assert!(matches!(
            PartialNMetricSpace::build(pts(), 5, dup),
            Err(SpaceError::DuplicateEntry(_))
        ));
        assert!(matches!(
            PartialNMetricSpace::build(pts(), 1, Vec::<(Vec<&str>, f64)>::new()),
            Err(SpaceError::Arity(_))
        ));
        let mut short = five.clone();
        short.push((vec!["a", "b"], 1.0));
        assert!(matches!(
            PartialNMetricSpace::build(pts(), 5, short),
            Err(SpaceError::Arity(_))
        ));
        let mut unknown = five;
        unknown.push((vec!["a", "a", "a", "c", "b"], 1.0));
        assert!(matches!(
            PartialNMetricSpace::build(pts(), 5, unknown),
            Err(SpaceError::UnknownPoint(p)) if p == "c"
        ));
    }

    #[test]
    fn eval_checks_arity_and_points() {
        let s = fixtures::two_point_five_metric();
        assert!(matches!(s.eval(&[Point(0); 4]), Err(SpaceError::Arity(_))));
        assert!(matches!(s.eval(&[Point(0), Point(0), Point(0), Point(0), Point(2)]), Err(SpaceError::UnknownPoint(_))));
        assert!(matches!(s.eval_names(&["a", "a", "a", "a", "z"]), Err(SpaceError::UnknownPoint(_))));
    }

    #[test]
    fn eval_is_permutation_invariant() {
        let s = fixtures::random_table(4, 4, 11);
        for tuple in (0..4).map(|_| 0..4usize).multi_cartesian_product() {
            let tuple: Vec<Point> = tuple.into_iter().map(Point).collect();
            let v = s.value(&tuple);
            for perm in tuple.iter().copied().permutations(tuple.len()) {
                assert_eq!(s.value(&perm).to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn lifting_two_point_partial_metric() {
        let p = fixtures::two_point_partial_metric();
        let g = from_partial_metric(&p, 3, true, DEFAULT_TOL).unwrap();
        // oracle: sum over index pairs, enumerated directly on ordered tuples
        let oracle = |t: [&str; 3]| -> f64 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in i + 1..3 {
                    s += p.get(p.point(t[i]).unwrap(), p.point(t[j]).unwrap());
                }
            }
            s
        };
        for t in [["x", "x", "x"], ["x", "x", "y"], ["x", "y", "y"], ["y", "y", "y"]] {
            assert_eq!(g.eval_names(&t).unwrap(), oracle(t));
        }
        assert_eq!(g.eval_names(&["x", "x", "x"]).unwrap(), 3.0);
        assert_eq!(g.eval_names(&["x", "x", "y"]).unwrap(), 5.0);
        assert_eq!(g.eval_names(&["x", "y", "y"]).unwrap(), 6.0);
        assert_eq!(g.eval_names(&["y", "y", "y"]).unwrap(), 6.0);
        assert!(!g.is_n_metric(DEFAULT_TOL));
        let d = associated_metric(&g, DEFAULT_TOL).unwrap();
        assert_eq!(d.distance(Point(0), Point(1)), 2.0);
    }

    #[test]
    fn lifting_zero_partial_metric() {
        let p = PartialMetricSpace::from_matrix(vec!["u".into(), "v".into()], vec![0.0; 4]).unwrap();
        let g = from_partial_metric(&p, 4, false, DEFAULT_TOL).unwrap();
        assert!(g.entries().all(|(_, v)| v == 0.0));
    }

    #[test]
    fn lifting_rejects_invalid_partial_metric() {
        let p = PartialMetricSpace::from_matrix(
            vec!["x".into(), "y".into()],
            vec![1.0, 0.0, 0.0, 2.0],
        )
        .unwrap();
        match from_partial_metric(&p, 3, true, DEFAULT_TOL) {
            Err(SpaceError::PartialMetricAxiomViolation(v)) => {
                assert_eq!(v.axiom, "small-self-distance");
                assert_eq!(v.lhs, 1.0);
                assert_eq!(v.rhs, 0.0);
            }
            other => panic!("expected violation, got {other:?}"),
        }
        assert!(from_partial_metric(&p, 3, false, DEFAULT_TOL).is_ok());
    }

    #[test]
    fn self_distance_of_lift_is_pair_count_multiple() {
        let p = fixtures::random_partial_metric(4, 3, false);
        for n in 2..=5 {
            let g = from_partial_metric(&p, n, true, DEFAULT_TOL).unwrap();
            for x in g.points() {
                let expected = (n * (n - 1) / 2) as f64 * p.get(x, x);
                assert!((g.self_distance(x) - expected).abs() < 1e-9);
                for y in g.points() {
                    let mixed = (n - 1) as f64 * p.get(x, y)
                        + ((n - 1) * (n - 2) / 2) as f64 * p.get(x, x);
                    assert!((g.mixed(x, y) - mixed).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn associated_metric_of_five_metric() {
        let s = fixtures::two_point_five_metric();
        let d = associated_metric(&s, DEFAULT_TOL).unwrap();
        let (a, b) = (s.point("a").unwrap(), s.point("b").unwrap());
        assert_eq!(d.distance(a, b), 7.0);
        assert_eq!(d.distance(a, a), 0.0);
        assert_eq!(d.distance(b, b), 0.0);
        assert!(d.check_axioms(DEFAULT_TOL).is_empty());
        assert!(s.is_n_metric(DEFAULT_TOL));
    }

    #[test]
    fn associated_metric_requires_valid_space() {
        let s = fixtures::degenerate_pair();
        assert!(matches!(
            associated_metric(&s, DEFAULT_TOL),
            Err(SpaceError::InvalidSpace(Profile::PartialNMetric))
        ));
        let d = associated_metric_unchecked(&s);
        assert_eq!(d.distance(Point(0), Point(1)), 0.0);
        assert!(!d.check_axioms(DEFAULT_TOL).is_empty());
    }

    #[test]
    fn non_finite_values_rejected() {
        let r = PartialNMetricSpace::build(vec!["x".into()], 2, [(["x", "x"], f64::NAN)]);
        assert!(matches!(r, Err(SpaceError::NonFinite { .. })));
    }
}
