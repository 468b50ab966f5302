//! Exhaustive axiom checks for finite spaces, plus sampled symmetry checks
//! for black-box evaluators.
//!
//! Every check returns [`Findings`]: the violations found (capped), the total
//! number of violations, and how many inequality instances were examined.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{PartialNMetricSpace, Point, DEFAULT_TOL};

/// Default cap on reported violations per report.
pub const DEFAULT_VIOLATION_CAP: usize = 100;
/// Default sample count for sampled symmetry checks.
pub const DEFAULT_SYMMETRY_SAMPLES: usize = 1000;
/// Default seed for every sampled check.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    #[serde(rename = "sep")]
    Sep,
    #[serde(rename = "sep'")]
    SepPrime,
    #[serde(rename = "ssd")]
    Ssd,
    #[serde(rename = "sssd")]
    Sssd,
    #[serde(rename = "sym")]
    Sym,
    #[serde(rename = "ptri")]
    Ptri,
    #[serde(rename = "lower_bound")]
    LowerBound,
    #[serde(rename = "zero_self_distance")]
    ZeroSelfDistance,
}

impl Axiom {
    pub fn tag(self) -> &'static str {
        match self {
            Axiom::Sep => "sep",
            Axiom::SepPrime => "sep'",
            Axiom::Ssd => "ssd",
            Axiom::Sssd => "sssd",
            Axiom::Sym => "sym",
            Axiom::Ptri => "ptri",
            Axiom::LowerBound => "lower_bound",
            Axiom::ZeroSelfDistance => "zero_self_distance",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Which axiom set [`validate`] runs.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// sep, ssd, ptri
    PartialNMetric,
    /// sssd, ptri
    Strong,
    /// sep, ssd, ptri and zero self-distances
    NMetric,
}

impl Profile {
    pub fn tag(self) -> &'static str {
        match self {
            Profile::PartialNMetric => "partial_n_metric",
            Profile::Strong => "strong",
            Profile::NMetric => "n_metric",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "partial_n_metric" | "partial" => Some(Profile::PartialNMetric),
            "strong" => Some(Profile::Strong),
            "n_metric" | "nmetric" => Some(Profile::NMetric),
            _ => None,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The concrete points an axiom instance was evaluated at.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Ordered pair `(x, y)`.
    Pair { x: Point, y: Point },
    /// A single point checked against a bound.
    Single { x: Point, bound: f64 },
    /// Triangle instance: `multiset` with `distinguished` swapped out for `via`.
    Triangle {
        multiset: Vec<Point>,
        distinguished: Point,
        via: Point,
    },
    /// A tuple and a permutation of it.
    Permutation {
        tuple: Vec<Point>,
        permuted: Vec<Point>,
    },
}

impl Witness {
    /// Points involved, in the order they should be reported.
    pub fn points(&self) -> Vec<Point> {
        match self {
            Witness::Pair { x, y } => vec![*x, *y],
            Witness::Single { x, .. } => vec![*x],
            Witness::Triangle {
                multiset,
                distinguished,
                via,
            } => {
                let mut v = multiset.clone();
                v.push(*distinguished);
                v.push(*via);
                v
            }
            Witness::Permutation { tuple, permuted } => {
                tuple.iter().chain(permuted.iter()).copied().collect()
            }
        }
    }
}

/// One failed inequality instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Witness,
    pub lhs: f64,
    pub rhs: f64,
}

impl Violation {
    /// Recomputes `(lhs, rhs)` from the witness alone.
    pub fn reevaluate(&self, space: &PartialNMetricSpace) -> (f64, f64) {
        match (&self.axiom, &self.witness) {
            (Axiom::Ssd | Axiom::Sssd, Witness::Pair { x, y }) => {
                (space.self_distance(*x), space.mixed(*x, *y))
            }
            (Axiom::Sep, Witness::Pair { x, y }) => (space.gap(*x, *y), space.gap(*y, *x)),
            (Axiom::SepPrime, Witness::Pair { x, y }) => {
                let chain = mixed_chain(space, *x, *y);
                (
                    chain.iter().copied().fold(f64::INFINITY, f64::min),
                    chain.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                )
            }
            (Axiom::Ptri, Witness::Triangle { multiset, distinguished, via }) => {
                let rhs = triangle_rhs(space, multiset, *distinguished, *via);
                (space.value_sorted(multiset), rhs)
            }
            (Axiom::LowerBound, Witness::Single { x, bound }) => (*bound, space.self_distance(*x)),
            (Axiom::ZeroSelfDistance, Witness::Single { x, bound }) => {
                (space.self_distance(*x), *bound)
            }
            (Axiom::Sym, Witness::Permutation { tuple, permuted }) => {
                (space.value(tuple), space.value(permuted))
            }
            _ => (f64::NAN, f64::NAN),
        }
    }
}

/// Output of a single check.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Findings {
    pub violations: Vec<Violation>,
    /// Violations found, including any beyond the cap.
    pub total: usize,
    /// Inequality instances examined.
    pub checked: usize,
}

impl Findings {
    pub fn is_clean(&self) -> bool {
        self.total == 0
    }

    fn push(&mut self, v: Violation, cap: usize) {
        self.total += 1;
        if self.violations.len() < cap {
            self.violations.push(v);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    pub cap: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            cap: DEFAULT_VIOLATION_CAP,
        }
    }
}

impl CheckOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Small self-distances: `G(x..x) <= G(x..x, y)` for all ordered pairs.
pub fn check_ssd(space: &PartialNMetricSpace, opts: &CheckOptions) -> Findings {
    let mut out = Findings::default();
    for x in space.points() {
        let sx = space.self_distance(x);
        for y in space.points() {
            out.checked += 1;
            let m = space.mixed(x, y);
            if sx > m + opts.tol {
                out.push(
                    Violation {
                        axiom: Axiom::Ssd,
                        witness: Witness::Pair { x, y },
                        lhs: sx,
                        rhs: m,
                    },
                    opts.cap,
                );
            }
        }
    }
    out
}

/// Separation, backward direction: distinct points must not have both gaps
/// at zero. Counted over all ordered pairs; each unordered pair is reported
/// once.
pub fn check_sep(space: &PartialNMetricSpace, opts: &CheckOptions) -> Findings {
    let mut out = Findings::default();
    for x in space.points() {
        for y in space.points() {
            out.checked += 1;
            if x >= y {
                continue;
            }
            let (gx, gy) = (space.gap(x, y), space.gap(y, x));
            if gx.abs() <= opts.tol && gy.abs() <= opts.tol {
                out.push(
                    Violation {
                        axiom: Axiom::Sep,
                        witness: Witness::Pair { x, y },
                        lhs: gx,
                        rhs: gy,
                    },
                    opts.cap,
                );
            }
        }
    }
    out
}

/// `G` at `n - k` copies of `x` and `k` copies of `y`, for `k = 0..=n`.
pub fn mixed_chain(space: &PartialNMetricSpace, x: Point, y: Point) -> Vec<f64> {
    (0..=space.n()).map(|k| space.mixed_k(x, y, k)).collect()
}

/// Generalized separation: the whole mixed chain between two distinct
/// points must not be constant.
pub fn check_sep_prime(space: &PartialNMetricSpace, opts: &CheckOptions) -> Findings {
    let mut out = Findings::default();
    for x in space.points() {
        for y in space.points().filter(|&y| y > x) {
            out.checked += 1;
            let chain = mixed_chain(space, x, y);
            let lo = chain.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = chain.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // all-equal within tol, measured against the first value
            if chain.iter().all(|v| (v - chain[0]).abs() <= opts.tol) {
                out.push(
                    Violation {
                        axiom: Axiom::SepPrime,
                        witness: Witness::Pair { x, y },
                        lhs: lo,
                        rhs: hi,
                    },
                    opts.cap,
                );
            }
        }
    }
    out
}

/// Strict small self-distances: margin must exceed `tol` for `x != y`.
pub fn check_sssd(space: &PartialNMetricSpace, opts: &CheckOptions) -> Findings {
    let mut out = Findings::default();
    for x in space.points() {
        let sx = space.self_distance(x);
        for y in space.points().filter(|&y| y != x) {
            out.checked += 1;
            let m = space.mixed(x, y);
            if m - sx <= opts.tol {
                out.push(
                    Violation {
                        axiom: Axiom::Sssd,
                        witness: Witness::Pair { x, y },
                        lhs: sx,
                        rhs: m,
                    },
                    opts.cap,
                );
            }
        }
    }
    out
}

fn triangle_rhs(space: &PartialNMetricSpace, multiset: &[Point], distinguished: Point, via: Point) -> f64 {
    let mut swapped = multiset.to_vec();
    let pos = swapped
        .iter()
        .position(|&p| p == distinguished)
        .expect("distinguished element belongs to the multiset");
    swapped[pos] = via;
    swapped.sort_unstable();
    space.value_sorted(&swapped) + space.mixed(via, distinguished) - space.self_distance(via)
}

/// The n-ary triangle inequality over distinct (multiset, distinguished
/// element, intermediate point) triples.
///
/// Multisets are partitioned across rayon workers and results are merged in
/// rank order, so the output does not depend on scheduling.
pub fn check_ptri(space: &PartialNMetricSpace, opts: &CheckOptions) -> Findings {
    let index = space.multiset_index();
    let n = space.n();
    let per_rank: Vec<(usize, usize, Vec<Violation>)> = (0..index.len())
        .into_par_iter()
        .with_min_len(64)
        .map(|rank| {
            let mut m = vec![Point(0); n];
            index.unrank_into(rank, &mut m);
            let lhs = space.value_at_rank(rank);
            let (mut checked, mut failed) = (0, 0);
            let mut kept = Vec::new();
            let mut swapped = vec![Point(0); n];
            for (pos, &v) in m.iter().enumerate() {
                if pos > 0 && m[pos - 1] == v {
                    continue;
                }
                for y in space.points() {
                    checked += 1;
                    swapped.copy_from_slice(&m);
                    swapped[pos] = y;
                    swapped.sort_unstable();
                    let rhs = space.value_sorted(&swapped) + space.mixed(y, v)
                        - space.self_distance(y);
                    if lhs > rhs + opts.tol {
                        failed += 1;
                        if kept.len() < opts.cap {
                            kept.push(Violation {
                                axiom: Axiom::Ptri,
                                witness: Witness::Triangle {
                                    multiset: m.clone(),
                                    distinguished: v,
                                    via: y,
                                },
                                lhs,
                                rhs,
                            });
                        }
                    }
                }
            }
            (checked, failed, kept)
        })
        .collect();
    let mut out = Findings::default();
    for (checked, failed, kept) in per_rank {
        out.checked += checked;
        let room = opts.cap.saturating_sub(out.violations.len());
        out.violations.extend(kept.into_iter().take(room));
        out.total += failed;
    }
    out
}

/// Self-distances bounded below by `bound`; `None` means unbounded.
pub fn check_lower_bound(space: &PartialNMetricSpace, bound: Option<f64>, opts: &CheckOptions) -> Findings {
    let mut out = Findings::default();
    let Some(r) = bound else {
        return out;
    };
    for x in space.points() {
        out.checked += 1;
        let s = space.self_distance(x);
        if s < r - opts.tol {
            out.push(
                Violation {
                    axiom: Axiom::LowerBound,
                    witness: Witness::Single { x, bound: r },
                    lhs: r,
                    rhs: s,
                },
                opts.cap,
            );
        }
    }
    out
}

fn check_zero_self_distance(space: &PartialNMetricSpace, opts: &CheckOptions) -> Findings {
    let mut out = Findings::default();
    for x in space.points() {
        out.checked += 1;
        let s = space.self_distance(x);
        if s.abs() > opts.tol {
            out.push(
                Violation {
                    axiom: Axiom::ZeroSelfDistance,
                    witness: Witness::Single { x, bound: 0.0 },
                    lhs: s,
                    rhs: 0.0,
                },
                opts.cap,
            );
        }
    }
    out
}

/// Positivity of mixed values in an n-metric: `G(x..x, y) > 0` for `x != y`.
///
/// Not an axiom; a consequence that holds on every space passing the
/// n-metric profile.
pub fn check_positivity(space: &PartialNMetricSpace) -> Vec<(Point, Point, f64)> {
    let mut out = Vec::new();
    for x in space.points() {
        for y in space.points().filter(|&y| y != x) {
            let m = space.mixed(x, y);
            if m <= 0.0 {
                out.push((x, y, m));
            }
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxiomError {
    #[error("evaluator failed on tuple {tuple:?}: {message}")]
    EvaluatorFailure { tuple: Vec<Point>, message: String },
}

/// Samples random tuples and permutations and compares evaluator outputs.
pub fn check_symmetry_sampled<F, E>(
    evaluator: F,
    points: usize,
    n: usize,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<Findings, AxiomError>
where
    F: Fn(&[Point]) -> Result<f64, E>,
    E: fmt::Display,
{
    let mut out = Findings::default();
    if points == 0 || n == 0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let call = |t: &[Point]| {
        evaluator(t).map_err(|e| AxiomError::EvaluatorFailure {
            tuple: t.to_vec(),
            message: e.to_string(),
        })
    };
    for _ in 0..samples {
        let tuple: Vec<Point> = (0..n).map(|_| Point(rng.gen_range(0..points))).collect();
        let mut permuted = tuple.clone();
        permuted.shuffle(&mut rng);
        out.checked += 1;
        let (lhs, rhs) = (call(&tuple)?, call(&permuted)?);
        if (lhs - rhs).abs() > opts.tol {
            out.push(
                Violation {
                    axiom: Axiom::Sym,
                    witness: Witness::Permutation { tuple, permuted },
                    lhs,
                    rhs,
                },
                opts.cap,
            );
        }
    }
    Ok(out)
}

/// Aggregate verdict for one profile.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub profile: Profile,
    pub violations: Vec<Violation>,
    /// Violations found before truncation to the cap.
    pub violations_total: usize,
    /// Inequality instances checked, per axiom.
    pub counts: BTreeMap<Axiom, usize>,
    pub tolerance: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations_total == 0
    }
}

/// Runs the axiom set for `profile` and caches the verdict on the space.
pub fn validate(space: &PartialNMetricSpace, profile: Profile, opts: &CheckOptions) -> ValidationReport {
    let mut runs: Vec<(Axiom, Findings)> = Vec::new();
    match profile {
        Profile::PartialNMetric => {
            runs.push((Axiom::Sep, check_sep(space, opts)));
            runs.push((Axiom::Ssd, check_ssd(space, opts)));
            runs.push((Axiom::Ptri, check_ptri(space, opts)));
        }
        Profile::Strong => {
            runs.push((Axiom::Sssd, check_sssd(space, opts)));
            runs.push((Axiom::Ptri, check_ptri(space, opts)));
        }
        Profile::NMetric => {
            runs.push((Axiom::Sep, check_sep(space, opts)));
            runs.push((Axiom::Ssd, check_ssd(space, opts)));
            runs.push((Axiom::Ptri, check_ptri(space, opts)));
            runs.push((Axiom::ZeroSelfDistance, check_zero_self_distance(space, opts)));
        }
    }
    let mut report = ValidationReport {
        profile,
        violations: Vec::new(),
        violations_total: 0,
        counts: BTreeMap::new(),
        tolerance: opts.tol,
    };
    for (axiom, findings) in runs {
        report.counts.insert(axiom, findings.checked);
        report.violations_total += findings.total;
        let room = opts.cap.saturating_sub(report.violations.len());
        report.violations.extend(findings.violations.into_iter().take(room));
    }
    space.cache_verdict(profile, opts.tol, report.passed());
    report
}

/// Closed-form number of triangle instances: for each multiset, its number
/// of distinct elements times the number of points.
pub fn ptri_instance_count(space: &PartialNMetricSpace) -> usize {
    space
        .multiset_index()
        .iter()
        .map(|m| {
            let distinct = 1 + m.windows(2).filter(|w| w[0] != w[1]).count();
            distinct * space.len()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::space::from_partial_metric;
    use itertools::Itertools;

    fn opts() -> CheckOptions {
        CheckOptions::default()
    }

    fn pair_space(aa: f64, ab: f64, bb: f64) -> PartialNMetricSpace {
        PartialNMetricSpace::build(
            vec!["a".into(), "b".into()],
            2,
            [(["a", "a"], aa), (["a", "b"], ab), (["b", "b"], bb)],
        )
        .unwrap()
    }

    #[test]
    fn ssd_cases() {
        let s = fixtures::two_point_five_metric();
        let f = check_ssd(&s, &opts());
        assert!(f.is_clean());
        assert_eq!(f.checked, 4);

        let one = PartialNMetricSpace::build(vec!["x".into()], 3, [(["x", "x", "x"], 7.0)]).unwrap();
        assert!(check_ssd(&one, &opts()).is_clean());

        let bad = pair_space(5.0, 1.0, 0.0);
        let f = check_ssd(&bad, &opts());
        assert_eq!(f.total, 1);
        let v = &f.violations[0];
        assert_eq!(v.witness, Witness::Pair { x: Point(0), y: Point(1) });
        assert_eq!((v.lhs, v.rhs), (5.0, 1.0));
    }

    #[test]
    fn sep_cases() {
        let s = fixtures::two_point_five_metric();
        assert!(check_sep(&s, &opts()).is_clean());
        let f = check_sep(&fixtures::degenerate_pair(), &opts());
        assert_eq!(f.total, 1);
        assert_eq!(f.violations[0].witness, Witness::Pair { x: Point(0), y: Point(1) });
        let one = PartialNMetricSpace::build(vec!["x".into()], 3, [(["x", "x", "x"], 7.0)]).unwrap();
        assert!(check_sep(&one, &opts()).is_clean());
    }

    #[test]
    fn sep_prime_chain_of_five_metric() {
        let s = fixtures::two_point_five_metric();
        assert_eq!(mixed_chain(&s, Point(0), Point(1)), vec![0.0, 3.0, -1.0, 2.0, 4.0, 0.0]);
        assert!(check_sep_prime(&s, &opts()).is_clean());
        assert_eq!(check_sep_prime(&fixtures::degenerate_pair(), &opts()).total, 1);
    }

    #[test]
    fn sssd_cases() {
        let s = fixtures::two_point_five_metric();
        assert!(check_sssd(&s, &opts()).is_clean());
        let tie = pair_space(0.0, 0.0, -1.0);
        let f = check_sssd(&tie, &opts());
        assert_eq!(f.total, 1);
        assert_eq!(f.violations[0].witness, Witness::Pair { x: Point(0), y: Point(1) });

        let p = fixtures::random_partial_metric(4, 5, true);
        assert!(p.is_strong(0.0));
        let g = from_partial_metric(&p, 3, true, DEFAULT_TOL).unwrap();
        assert!(check_sssd(&g, &opts()).is_clean());
    }

    #[test]
    fn ptri_on_five_metric() {
        let s = fixtures::two_point_five_metric();
        let f = check_ptri(&s, &opts());
        assert!(f.is_clean());
        assert_eq!(f.checked, ptri_instance_count(&s));
        // M = {a,b,b,b,b}, distinguished b, via a: 4 <= G(a,a,b,b,b) + G(a,a,a,a,b) - G(a^5)
        let (a, b) = (Point(0), Point(1));
        let m = vec![a, b, b, b, b];
        assert_eq!(s.value_sorted(&m), 4.0);
        assert_eq!(triangle_rhs(&s, &m, b, a), 2.0 + 3.0 - 0.0);
        // via equal to the distinguished element collapses to equality
        assert_eq!(triangle_rhs(&s, &m, b, b), 4.0);
    }

    #[test]
    fn ptri_counts_and_reevaluation() {
        let s = fixtures::random_table(3, 3, 7);
        let f = check_ptri(&s, &CheckOptions { tol: DEFAULT_TOL, cap: 5 });
        assert_eq!(f.checked, ptri_instance_count(&s));
        assert!(f.violations.len() <= 5);
        assert!(f.total >= f.violations.len());
        for v in &f.violations {
            assert_eq!(v.reevaluate(&s), (v.lhs, v.rhs));
        }
    }

    // Independent oracle: every ordered tuple, every position, every y.
    fn ptri_brute_force(s: &PartialNMetricSpace, tol: f64) -> bool {
        let n = s.n();
        for t in (0..n).map(|_| s.points()).multi_cartesian_product() {
            for y in s.points() {
                let mut prefix = t[..n - 1].to_vec();
                prefix.push(y);
                let rhs = s.value(&prefix) + s.mixed(y, t[n - 1]) - s.self_distance(y);
                if s.value(&t) > rhs + tol {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn ptri_matches_brute_force() {
        for seed in 0..40 {
            let s = fixtures::random_table(3, 3, seed);
            assert_eq!(check_ptri(&s, &opts()).is_clean(), ptri_brute_force(&s, DEFAULT_TOL));
        }
        assert!(ptri_brute_force(&fixtures::two_point_five_metric(), DEFAULT_TOL));
    }

    #[test]
    fn lower_bound_cases() {
        let s = fixtures::two_point_five_metric();
        assert!(check_lower_bound(&s, Some(0.0), &opts()).is_clean());
        assert_eq!(check_lower_bound(&s, Some(0.5), &opts()).total, 2);
        assert!(check_lower_bound(&s, None, &opts()).is_clean());
    }

    #[test]
    fn sampled_symmetry() {
        let s = fixtures::random_table(4, 3, 3);
        let f = check_symmetry_sampled(|t| s.eval(t), 4, 3, 500, DEFAULT_SEED, &opts()).unwrap();
        assert!(f.is_clean());
        assert_eq!(f.checked, 500);

        let first = |t: &[Point]| Ok::<f64, String>(t[0].index() as f64);
        let f = check_symmetry_sampled(first, 4, 3, 500, DEFAULT_SEED, &opts()).unwrap();
        assert!(f.total > 0);
        assert_eq!(f.violations[0].axiom, Axiom::Sym);

        let p = fixtures::random_partial_metric(4, 9, false);
        let pairwise = |t: &[Point]| {
            let mut sum = 0.0;
            for i in 0..t.len() {
                for j in i + 1..t.len() {
                    sum += p.get(t[i], t[j]);
                }
            }
            Ok::<f64, String>(sum)
        };
        assert!(check_symmetry_sampled(pairwise, 4, 4, 1000, 1, &opts()).unwrap().is_clean());

        let failing = |_: &[Point]| Err::<f64, _>("boom");
        assert!(matches!(
            check_symmetry_sampled(failing, 2, 2, 3, 0, &opts()),
            Err(AxiomError::EvaluatorFailure { .. })
        ));
    }

    #[test]
    fn validate_profiles_on_five_metric() {
        let s = fixtures::two_point_five_metric();
        for profile in [Profile::PartialNMetric, Profile::Strong, Profile::NMetric] {
            let r = validate(&s, profile, &opts());
            assert!(r.passed(), "{profile}: {:?}", r.violations);
            assert_eq!(s.cached_verdict(profile, DEFAULT_TOL), Some(true));
        }
        let r = validate(&s, Profile::NMetric, &opts());
        assert_eq!(r.counts[&Axiom::Ssd], 4);
        assert_eq!(r.counts[&Axiom::Sep], 4);
        assert_eq!(r.counts[&Axiom::Ptri], ptri_instance_count(&s));
    }

    #[test]
    fn validate_degenerate_pair_fails_sep() {
        let s = fixtures::degenerate_pair();
        let r = validate(&s, Profile::PartialNMetric, &opts());
        assert!(!r.passed());
        assert!(r.violations.iter().any(|v| v.axiom == Axiom::Sep));
        assert_eq!(s.cached_verdict(Profile::PartialNMetric, DEFAULT_TOL), Some(false));
    }

    #[test]
    fn validate_caps_violations() {
        let s = fixtures::random_table(4, 4, 1);
        let r = validate(&s, Profile::PartialNMetric, &CheckOptions { tol: DEFAULT_TOL, cap: 3 });
        assert!(r.violations.len() <= 3);
        assert!(r.violations_total >= r.violations.len());
        for v in &r.violations {
            assert_eq!(v.reevaluate(&s), (v.lhs, v.rhs));
        }
    }

    #[test]
    fn n_metric_positivity_on_valid_spaces() {
        for seed in 0..20 {
            let s = fixtures::random_valid_space(3, 3, Profile::NMetric, seed);
            assert!(check_positivity(&s).is_empty());
        }
        assert!(check_positivity(&fixtures::two_point_five_metric()).is_empty());
    }
}
