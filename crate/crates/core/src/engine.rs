//! Orbits of tabulated self-maps and the fixed-point solver.
//!
//! Every orbit on a finite space is eventually periodic, so Cauchy verdicts,
//! special limits, orbital continuity and both contractivity certificates are
//! decided exactly from one pass over the transient and one full cycle.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::axioms::Profile;
use crate::sequence::{EventuallyPeriodic, SequenceError};
use crate::space::{PartialNMetricSpace, Point, SpaceError, DEFAULT_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("map covers {got} points, space has {expected}")]
    MapSize { expected: usize, got: usize },
    #[error("space fails the {0} profile")]
    InvalidSpace(Profile),
    #[error("orbit did not close within {steps} steps")]
    OrbitTruncated { steps: usize },
    #[error("orbit is not Cauchy: pairwise values on the cycle spread by {spread}")]
    NotCauchy { spread: f64 },
    #[error("orbit is Cauchy with value {r} but has no special limit")]
    NoSpecialLimit { r: f64 },
    #[error("{} distinct special limits", .0.len())]
    UniquenessViolation(Vec<Point>),
    #[error("no hypothesis set holds")]
    HypothesesUnsatisfied(Vec<CaseEvaluation>),
    #[error("hypotheses of {case} hold but the conclusion fails: {detail}")]
    TheoremContradicted { case: HypothesisCase, detail: String },
    #[error("lambda must lie in (0, 1], got {0}")]
    InvalidLambda(f64),
    #[error("certificate does not hold on the orbit")]
    CertificateFailed(Box<ContractivityCertificate>),
}

/// A total map `X -> X` stored as an image table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SelfMap {
    image: Vec<Point>,
}

impl SelfMap {
    pub fn new(space: &PartialNMetricSpace, image: Vec<Point>) -> Result<Self, EngineError> {
        if image.len() != space.len() {
            return Err(EngineError::MapSize {
                expected: space.len(),
                got: image.len(),
            });
        }
        if let Some(p) = image.iter().find(|p| p.index() >= space.len()) {
            return Err(SpaceError::UnknownPoint(p.to_string()).into());
        }
        Ok(Self { image })
    }

    /// Builds a map from `name -> name` pairs; every point needs an image.
    pub fn from_names(
        space: &PartialNMetricSpace,
        pairs: &BTreeMap<String, String>,
    ) -> Result<Self, EngineError> {
        let mut image = vec![None; space.len()];
        for (from, to) in pairs {
            image[space.point(from)?.index()] = Some(space.point(to)?);
        }
        let image = image
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| SpaceError::UnknownPoint(space.name(Point(i)).into())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(space, image)
    }

    pub fn identity(points: usize) -> Self {
        Self {
            image: (0..points).map(Point).collect(),
        }
    }

    pub fn constant(points: usize, target: Point) -> Self {
        Self {
            image: vec![target; points],
        }
    }

    /// All `p^p` maps on `p` points, in lexicographic order of image tables.
    pub fn all(points: usize) -> impl Iterator<Item = SelfMap> {
        let total = (points as u32)
            .checked_pow(points as u32)
            .map(|t| t as usize)
            .unwrap_or(usize::MAX);
        (0..total).map(move |mut code| {
            let mut image = vec![Point(0); points];
            for slot in image.iter_mut().rev() {
                *slot = Point(code % points);
                code /= points;
            }
            SelfMap { image }
        })
    }

    pub fn apply(&self, p: Point) -> Point {
        self.image[p.index()]
    }

    pub fn image(&self) -> &[Point] {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn to_names(&self, space: &PartialNMetricSpace) -> BTreeMap<String, String> {
        self.image
            .iter()
            .enumerate()
            .map(|(i, &p)| (space.name(Point(i)).to_owned(), space.name(p).to_owned()))
            .collect()
    }
}

/// `x_0, f x_0, f^2 x_0, ..` up to the first repeated term.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitTrace {
    pub start: Point,
    /// Distinct terms; when the cycle is known, `f(terms.last())` equals
    /// `terms[cycle_entry]`.
    pub terms: Vec<Point>,
    pub cycle_entry: Option<usize>,
    pub cycle_length: Option<usize>,
    /// `G(<x_m>^{n-1}, x_{m+1})` for each listed term.
    pub step_values: Vec<f64>,
}

impl OrbitTrace {
    pub fn is_closed(&self) -> bool {
        self.cycle_entry.is_some()
    }

    /// The full orbit as an eventually periodic sequence.
    pub fn sequence(&self) -> Option<EventuallyPeriodic> {
        let entry = self.cycle_entry?;
        Some(EventuallyPeriodic::new(
            self.terms[..entry].to_vec(),
            self.terms[entry..].to_vec(),
        ))
    }

    /// Length of a prefix covering the transient and one full cycle.
    pub fn exact_prefix(&self) -> Option<usize> {
        Some(self.cycle_entry? + self.cycle_length?)
    }
}

/// Iterates `f` from `x0`, applying it at most `max_steps` times.
pub fn orbit(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    x0: Point,
    max_steps: usize,
) -> Result<OrbitTrace, EngineError> {
    if x0.index() >= space.len() {
        return Err(SpaceError::UnknownPoint(x0.to_string()).into());
    }
    if map.len() != space.len() {
        return Err(EngineError::MapSize {
            expected: space.len(),
            got: map.len(),
        });
    }
    let mut first_visit = vec![None; space.len()];
    let mut terms = vec![x0];
    let mut step_values = Vec::new();
    first_visit[x0.index()] = Some(0);
    let (mut cycle_entry, mut cycle_length) = (None, None);
    let mut x = x0;
    for step in 0..max_steps {
        let next = map.apply(x);
        step_values.push(space.mixed(x, next));
        if let Some(j) = first_visit[next.index()] {
            cycle_entry = Some(j);
            cycle_length = Some(step + 1 - j);
            break;
        }
        first_visit[next.index()] = Some(step + 1);
        terms.push(next);
        x = next;
    }
    Ok(OrbitTrace {
        start: x0,
        terms,
        cycle_entry,
        cycle_length,
        step_values,
    })
}

fn closed_orbit(space: &PartialNMetricSpace, map: &SelfMap, x0: Point) -> Result<OrbitTrace, EngineError> {
    // a repeat must occur within |X| applications
    orbit(space, map, x0, space.len())
}

/// A multiset whose image under `f` has a larger value.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionWitness {
    pub multiset: Vec<Point>,
    pub image: Vec<Point>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Exhaustive over all multisets in rank order; returns the first multiset
/// with `G(f m) > G(m) + tol`.
pub fn check_nonexpansive(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    tol: f64,
) -> Option<ExpansionWitness> {
    let idx = space.multiset_index();
    let mut m = vec![Point(0); space.n()];
    let mut image = vec![Point(0); space.n()];
    for rank in 0..idx.len() {
        idx.unrank_into(rank, &mut m);
        for (slot, &p) in image.iter_mut().zip(&m) {
            *slot = map.apply(p);
        }
        let rhs = space.value_at_rank(rank);
        let lhs = space.value(&image);
        if lhs > rhs + tol {
            let mut sorted = image.clone();
            sorted.sort();
            return Some(ExpansionWitness {
                multiset: m,
                image: sorted,
                lhs,
                rhs,
            });
        }
    }
    None
}

/// Verdict of "if `z` is a limit of the orbit of `x0`, so is `f z`".
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityVerdict {
    pub z: Point,
    pub fz: Point,
    pub z_is_limit: bool,
    pub fz_is_limit: bool,
    /// `max |G(<z>^{n-1}, c) - G(<z>^n)|` over cycle points `c`.
    pub z_residual: f64,
    pub fz_residual: f64,
}

impl ContinuityVerdict {
    pub fn holds(&self) -> bool {
        !self.z_is_limit || self.fz_is_limit
    }
}

fn limit_residual(space: &PartialNMetricSpace, cycle: &[Point], a: Point) -> f64 {
    cycle
        .iter()
        .map(|&c| space.gap(a, c).abs())
        .fold(0.0, f64::max)
}

/// Orbital continuity at `x0` for a single `z`, decided on the exact orbit.
pub fn check_orbital_continuity(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    x0: Point,
    z: Point,
    tol: f64,
) -> Result<ContinuityVerdict, EngineError> {
    if z.index() >= space.len() {
        return Err(SpaceError::UnknownPoint(z.to_string()).into());
    }
    let trace = closed_orbit(space, map, x0)?;
    let seq = trace.sequence().expect("orbit closes within |X| steps");
    Ok(continuity_on(space, map, &seq.cycle, z, tol))
}

fn continuity_on(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    cycle: &[Point],
    z: Point,
    tol: f64,
) -> ContinuityVerdict {
    let fz = map.apply(z);
    let z_residual = limit_residual(space, cycle, z);
    let fz_residual = limit_residual(space, cycle, fz);
    ContinuityVerdict {
        z,
        fz,
        z_is_limit: z_residual <= tol,
        fz_is_limit: fz_residual <= tol,
        z_residual,
        fz_residual,
    }
}

/// Orbital continuity at `x0` for every `z`; returns the first failure.
pub fn check_orbital_continuity_everywhere(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    x0: Point,
    tol: f64,
) -> Result<Option<ContinuityVerdict>, EngineError> {
    let trace = closed_orbit(space, map, x0)?;
    let seq = trace.sequence().expect("orbit closes within |X| steps");
    Ok(space
        .points()
        .map(|z| continuity_on(space, map, &seq.cycle, z, tol))
        .find(|v| !v.holds()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    RContractive,
    PhiContractive,
}

impl CertificateKind {
    pub fn tag(self) -> &'static str {
        match self {
            CertificateKind::RContractive => "r_contractive",
            CertificateKind::PhiContractive => "phi_r_contractive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertificateWitness {
    /// `r > G(<x_m>^n)`.
    LowerBound { step: usize, self_distance: f64 },
    /// Step value above `r + c^m |G_0|` for every admissible `c`.
    Decay { step: usize, value: f64, bound: f64 },
    /// `G(<x_{m1+1}>^{n-1}, x_{m2+1}) > t - phi(t)`.
    Pair {
        m1: usize,
        m2: usize,
        lhs: f64,
        rhs: f64,
    },
    /// `t = G(<x_{m1}>^{n-1}, x_{m2})` below `r`, outside the domain of phi.
    Domain { m1: usize, m2: usize, t: f64 },
}

/// Finite-prefix contractivity evidence. On a finite space the prefix
/// always covers the transient and one full cycle, which makes it exact.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractivityCertificate {
    pub kind: CertificateKind,
    pub r: f64,
    pub c_estimate: Option<f64>,
    pub lambda: Option<f64>,
    pub prefix_length: usize,
    pub holds_on_prefix: bool,
    pub witnesses: Vec<CertificateWitness>,
}

fn lower_bounds(
    space: &PartialNMetricSpace,
    seq: &EventuallyPeriodic,
    r: f64,
    prefix: usize,
    tol: f64,
    out: &mut Vec<CertificateWitness>,
) {
    for m in 0..prefix {
        let s = space.self_distance(seq.term(m));
        if r > s + tol {
            out.push(CertificateWitness::LowerBound {
                step: m,
                self_distance: s,
            });
        }
    }
}

/// Checks `r <= G(<x_m>^n)` and `G_m <= r + c^m |G_0|` with
/// `G_m = G(<x_m>^{n-1}, x_{m+1})`, estimating the smallest workable `c`.
///
/// Steps on the cycle recur for arbitrarily large `m`, so they need
/// `G_m <= r` outright; transient steps contribute `((G_m - r)/|G_0|)^(1/m)`
/// to the estimate of `c`.
pub fn certify_r_contractive(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    x0: Point,
    r: f64,
    prefix_len: usize,
    tol: f64,
) -> Result<ContractivityCertificate, EngineError> {
    let trace = closed_orbit(space, map, x0)?;
    let seq = trace.sequence().expect("orbit closes within |X| steps");
    let entry = trace.cycle_entry.expect("closed");
    let prefix = prefix_len.max(trace.exact_prefix().expect("closed"));
    let step = |m: usize| {
        let x = seq.term(m);
        space.mixed(x, map.apply(x))
    };
    let mut witnesses = Vec::new();
    lower_bounds(space, &seq, r, prefix, tol, &mut witnesses);
    let g0 = step(0).abs();
    let mut c: f64 = 0.0;
    for m in 0..prefix {
        let gm = step(m);
        let excess = gm - r;
        if m >= entry || g0 <= tol {
            if excess > tol {
                witnesses.push(CertificateWitness::Decay {
                    step: m,
                    value: gm,
                    bound: r,
                });
            }
        } else if m == 0 {
            if excess > g0 + tol {
                witnesses.push(CertificateWitness::Decay {
                    step: 0,
                    value: gm,
                    bound: r + g0,
                });
            }
        } else if excess > tol {
            let cm = (excess / g0).powf(1.0 / m as f64);
            c = c.max(cm);
            if cm >= 1.0 - tol {
                witnesses.push(CertificateWitness::Decay {
                    step: m,
                    value: gm,
                    bound: r + g0,
                });
            }
        }
    }
    Ok(ContractivityCertificate {
        kind: CertificateKind::RContractive,
        r,
        c_estimate: Some(c),
        lambda: None,
        prefix_length: prefix,
        holds_on_prefix: witnesses.is_empty(),
        witnesses,
    })
}

/// Checks the pairwise decrease `G(<x_{m1+1}>^{n-1}, x_{m2+1}) <= t - phi(t)`
/// for `phi(t) = lambda (t - r)`, over all index pairs up to the prefix.
pub fn certify_phi_contractive(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    x0: Point,
    r: f64,
    lambda: f64,
    prefix_len: usize,
    tol: f64,
) -> Result<ContractivityCertificate, EngineError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(EngineError::InvalidLambda(lambda));
    }
    let trace = closed_orbit(space, map, x0)?;
    let seq = trace.sequence().expect("orbit closes within |X| steps");
    let prefix = prefix_len.max(trace.exact_prefix().expect("closed"));
    let mut witnesses = Vec::new();
    lower_bounds(space, &seq, r, prefix, tol, &mut witnesses);
    for m1 in 0..prefix {
        for m2 in 0..prefix {
            let t = space.mixed(seq.term(m1), seq.term(m2));
            if t < r - tol {
                witnesses.push(CertificateWitness::Domain { m1, m2, t });
                continue;
            }
            let lhs = space.mixed(seq.term(m1 + 1), seq.term(m2 + 1));
            let rhs = t - lambda * (t - r);
            if lhs > rhs + tol {
                witnesses.push(CertificateWitness::Pair { m1, m2, lhs, rhs });
            }
        }
    }
    Ok(ContractivityCertificate {
        kind: CertificateKind::PhiContractive,
        r,
        c_estimate: None,
        lambda: Some(lambda),
        prefix_length: prefix,
        holds_on_prefix: witnesses.is_empty(),
        witnesses,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessVerdict {
    pub holds: bool,
    /// Starts whose orbit is Cauchy without a special limit.
    pub witnesses: Vec<Point>,
}

/// Every Cauchy orbit of `f` must have a special limit.
pub fn check_orbital_completeness(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    tol: f64,
) -> Result<CompletenessVerdict, EngineError> {
    let mut witnesses = Vec::new();
    for x0 in space.points() {
        let seq = closed_orbit(space, map, x0)?
            .sequence()
            .expect("orbit closes within |X| steps");
        match seq.special_limit_search(space, tol) {
            Ok(Some(_)) | Err(SequenceError::NotCauchyOnPrefix) => {}
            Ok(None) => witnesses.push(x0),
            Err(SequenceError::UniquenessViolation(found)) => {
                return Err(EngineError::UniquenessViolation(found))
            }
            Err(e) => unreachable!("exact search only fails on Cauchy or uniqueness: {e}"),
        }
    }
    Ok(CompletenessVerdict {
        holds: witnesses.is_empty(),
        witnesses,
    })
}

/// Which hypothesis set established the fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HypothesisCase {
    StrongNonExpansive,
    StrongOrbitalContinuity,
    NonExpansiveOrbitalContinuity,
    OrbitalContinuityLowerBound,
    NonExpansiveLowerBound,
    ContractiveStrongNonExpansive,
    ContractiveStrongOrbitalContinuity,
    ContractiveNonExpansiveOrbitalContinuity,
    ContractiveNonExpansiveLowerBound,
}

impl HypothesisCase {
    pub fn tag(self) -> &'static str {
        use HypothesisCase::*;
        match self {
            StrongNonExpansive => "strong/nonexpansive",
            StrongOrbitalContinuity => "strong/orbital-continuity",
            NonExpansiveOrbitalContinuity => "partial/nonexpansive+orbital-continuity",
            OrbitalContinuityLowerBound => "partial/orbital-continuity+lower-bound",
            NonExpansiveLowerBound => "partial/nonexpansive+lower-bound",
            ContractiveStrongNonExpansive => "contractive/strong/nonexpansive",
            ContractiveStrongOrbitalContinuity => "contractive/strong/orbital-continuity",
            ContractiveNonExpansiveOrbitalContinuity => {
                "contractive/partial/nonexpansive+orbital-continuity"
            }
            ContractiveNonExpansiveLowerBound => "contractive/partial/nonexpansive+lower-bound",
        }
    }

    /// Does the case conclude `f a = a` from `f a`'s self-distance pinned by
    /// the orbital-continuity criterion (as opposed to `a`'s)?
    fn uses_continuity(self) -> bool {
        use HypothesisCase::*;
        matches!(
            self,
            StrongOrbitalContinuity
                | OrbitalContinuityLowerBound
                | ContractiveStrongOrbitalContinuity
        )
    }

    fn uses_nonexpansive(self) -> bool {
        use HypothesisCase::*;
        matches!(
            self,
            StrongNonExpansive
                | NonExpansiveOrbitalContinuity
                | NonExpansiveLowerBound
                | ContractiveStrongNonExpansive
                | ContractiveNonExpansiveOrbitalContinuity
                | ContractiveNonExpansiveLowerBound
        )
    }
}

impl fmt::Display for HypothesisCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A hypothesis condition that may fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    NonExpansive,
    /// Orbitally continuous at `x0` for the special limit.
    OrbitalContinuityAtLimit,
    /// Orbitally continuous at `x0` for every point.
    OrbitalContinuity,
    /// Every self-distance is at least the case's bound.
    SelfDistanceLowerBound,
}

impl Condition {
    pub fn tag(self) -> &'static str {
        match self {
            Condition::NonExpansive => "nonexpansive",
            Condition::OrbitalContinuityAtLimit => "orbital-continuity-at-limit",
            Condition::OrbitalContinuity => "orbital-continuity",
            Condition::SelfDistanceLowerBound => "self-distance-lower-bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseEvaluation {
    pub case: HypothesisCase,
    pub failing: Vec<Condition>,
}

impl CaseEvaluation {
    pub fn holds(&self) -> bool {
        self.failing.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    /// `None` uses `10 |X|`.
    pub max_steps: Option<usize>,
    pub tol: f64,
    pub strong_mode: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_steps: None,
            tol: DEFAULT_TOL,
            strong_mode: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateRequest {
    pub kind: CertificateKind,
    pub r: f64,
    pub lambda: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointResult {
    pub fixed_point: Point,
    pub self_distance_at_fp: f64,
    /// Steps from `x0` until the orbit first reaches the fixed point.
    pub iterations: usize,
    /// Cauchy value of the orbit.
    pub r: f64,
    pub theorem_case: HypothesisCase,
    pub cases: Vec<CaseEvaluation>,
    pub certificate: Option<ContractivityCertificate>,
    pub orbit: OrbitTrace,
}

struct Analysis {
    trace: OrbitTrace,
    a: Point,
    r: f64,
}

fn analyse(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    x0: Point,
    config: &SolveConfig,
) -> Result<Analysis, EngineError> {
    let profile = if config.strong_mode {
        Profile::Strong
    } else {
        Profile::PartialNMetric
    };
    if !space.passes(profile, config.tol) {
        return Err(EngineError::InvalidSpace(profile));
    }
    let steps = config.max_steps.unwrap_or(10 * space.len());
    let trace = orbit(space, map, x0, steps)?;
    let seq = trace
        .sequence()
        .ok_or(EngineError::OrbitTruncated { steps })?;
    let cauchy = seq.cauchy(space, config.tol);
    if !cauchy.holds {
        return Err(EngineError::NotCauchy {
            spread: cauchy.spread,
        });
    }
    let a = match seq.special_limit_search(space, config.tol) {
        Ok(Some(a)) => a,
        Ok(None) => return Err(EngineError::NoSpecialLimit { r: cauchy.r }),
        Err(SequenceError::UniquenessViolation(found)) => {
            return Err(EngineError::UniquenessViolation(found))
        }
        Err(e) => unreachable!("Cauchy verdict already checked: {e}"),
    };
    Ok(Analysis {
        trace,
        a,
        r: cauchy.r,
    })
}

fn min_self_distance(space: &PartialNMetricSpace) -> f64 {
    space
        .points()
        .map(|x| space.self_distance(x))
        .fold(f64::INFINITY, f64::min)
}

fn evaluate(case: HypothesisCase, conditions: &[(Condition, bool)]) -> CaseEvaluation {
    CaseEvaluation {
        case,
        failing: conditions
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(c, _)| *c)
            .collect(),
    }
}

fn conclude(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    analysis: Analysis,
    cases: Vec<CaseEvaluation>,
    certificate: Option<ContractivityCertificate>,
    tol: f64,
) -> Result<FixedPointResult, EngineError> {
    let Some(case) = cases.iter().find(|c| c.holds()).map(|c| c.case) else {
        return Err(EngineError::HypothesesUnsatisfied(cases));
    };
    let a = analysis.a;
    let fa = map.apply(a);
    let contradiction = |detail: String| EngineError::TheoremContradicted { case, detail };
    if fa != a {
        return Err(contradiction(format!(
            "f({}) = {}",
            space.name(a),
            space.name(fa)
        )));
    }
    if case.uses_nonexpansive() {
        let (lhs, rhs) = (space.mixed(a, fa), space.self_distance(a));
        if (lhs - rhs).abs() > tol {
            return Err(contradiction(format!(
                "nonexpansive criterion: G(<a>^(n-1), fa) = {lhs} but G(<a>^n) = {rhs}"
            )));
        }
    }
    if case.uses_continuity() {
        let (lhs, rhs) = (space.mixed(fa, a), space.self_distance(fa));
        if (lhs - rhs).abs() > tol {
            return Err(contradiction(format!(
                "continuity criterion: G(<fa>^(n-1), a) = {lhs} but G(<fa>^n) = {rhs}"
            )));
        }
    }
    if let Some(cert) = &certificate {
        let s = space.self_distance(a);
        if (s - cert.r).abs() > tol {
            return Err(contradiction(format!(
                "G(<a>^n) = {s} differs from r = {}",
                cert.r
            )));
        }
    }
    let iterations = analysis
        .trace
        .terms
        .iter()
        .position(|&p| p == a)
        .expect("special limit of an orbit lies on its cycle");
    Ok(FixedPointResult {
        fixed_point: a,
        self_distance_at_fp: space.self_distance(a),
        iterations,
        r: analysis.r,
        theorem_case: case,
        cases,
        certificate,
        orbit: analysis.trace,
    })
}

/// Finds the special limit of the orbit of `x0` and shows it is fixed by
/// the first hypothesis set that holds.
pub fn solve_fixed_point(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    x0: Point,
    config: &SolveConfig,
) -> Result<FixedPointResult, EngineError> {
    use Condition::*;
    use HypothesisCase::*;
    let tol = config.tol;
    let analysis = analyse(space, map, x0, config)?;
    let a = analysis.a;
    let nonexp = check_nonexpansive(space, map, tol).is_none();
    let cont = check_orbital_continuity(space, map, x0, a, tol)?.holds();
    let floor = min_self_distance(space);
    let mut cases = Vec::new();
    if config.strong_mode {
        cases.push(evaluate(StrongNonExpansive, &[(NonExpansive, nonexp)]));
        cases.push(evaluate(
            StrongOrbitalContinuity,
            &[(OrbitalContinuityAtLimit, cont)],
        ));
    }
    cases.push(evaluate(
        NonExpansiveOrbitalContinuity,
        &[(NonExpansive, nonexp), (OrbitalContinuityAtLimit, cont)],
    ));
    cases.push(evaluate(
        OrbitalContinuityLowerBound,
        &[
            (OrbitalContinuityAtLimit, cont),
            (
                SelfDistanceLowerBound,
                floor >= space.self_distance(map.apply(a)) - tol,
            ),
        ],
    ));
    cases.push(evaluate(
        NonExpansiveLowerBound,
        &[
            (NonExpansive, nonexp),
            (SelfDistanceLowerBound, floor >= space.self_distance(a) - tol),
        ],
    ));
    conclude(space, map, analysis, cases, None, tol)
}

/// Obtains the requested certificate, then concludes as the corresponding
/// contractive corollary: a fixed point whose self-distance is `r`.
pub fn solve_via_contractive(
    space: &PartialNMetricSpace,
    map: &SelfMap,
    x0: Point,
    request: &CertificateRequest,
    config: &SolveConfig,
) -> Result<FixedPointResult, EngineError> {
    use Condition::*;
    use HypothesisCase::*;
    let tol = config.tol;
    let certificate = match request.kind {
        CertificateKind::RContractive => certify_r_contractive(space, map, x0, request.r, 2, tol)?,
        CertificateKind::PhiContractive => certify_phi_contractive(
            space,
            map,
            x0,
            request.r,
            request.lambda.unwrap_or(0.5),
            2,
            tol,
        )?,
    };
    if !certificate.holds_on_prefix {
        return Err(EngineError::CertificateFailed(Box::new(certificate)));
    }
    let analysis = analyse(space, map, x0, config)?;
    let nonexp = check_nonexpansive(space, map, tol).is_none();
    let cont = check_orbital_continuity_everywhere(space, map, x0, tol)?.is_none();
    let floor = min_self_distance(space);
    let mut cases = Vec::new();
    if config.strong_mode {
        cases.push(evaluate(
            ContractiveStrongNonExpansive,
            &[(NonExpansive, nonexp)],
        ));
        cases.push(evaluate(
            ContractiveStrongOrbitalContinuity,
            &[(OrbitalContinuity, cont)],
        ));
    }
    cases.push(evaluate(
        ContractiveNonExpansiveOrbitalContinuity,
        &[(NonExpansive, nonexp), (OrbitalContinuity, cont)],
    ));
    cases.push(evaluate(
        ContractiveNonExpansiveLowerBound,
        &[
            (NonExpansive, nonexp),
            (SelfDistanceLowerBound, floor >= request.r - tol),
        ],
    ));
    conclude(space, map, analysis, cases, Some(certificate), tol)
}
