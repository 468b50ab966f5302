//! Open balls of a finite space, their separation properties, and the
//! comparison with the associated metric's topology.
//!
//! Ball membership is strict and uses stored values as-is; no tolerance.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::axioms::Profile;
use crate::space::{associated_metric_unchecked, MetricSpace, PartialNMetricSpace, Point};

/// `{ y : gap(center, y) < radius }`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    pub members: Vec<Point>,
}

impl Ball {
    pub fn contains(&self, p: Point) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    pub fn is_subset_of(&self, other: &Ball) -> bool {
        self.members.iter().all(|&p| other.contains(p))
    }
}

pub fn open_ball(space: &PartialNMetricSpace, center: Point, radius: f64) -> Ball {
    let members = if radius <= 0.0 {
        Vec::new()
    } else {
        space
            .points()
            .filter(|&y| space.gap(center, y) < radius)
            .collect()
    };
    Ball {
        center,
        radius,
        members,
    }
}

/// `{ y : d(center, y) < radius }` in a metric space.
pub fn metric_ball(metric: &MetricSpace, center: Point, radius: f64) -> Ball {
    let members = (0..metric.len())
        .map(Point)
        .filter(|&y| metric.distance(center, y) < radius)
        .collect();
    Ball {
        center,
        radius,
        members,
    }
}

/// A ball whose inner ball around one of its members escapes it.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisCounterexample {
    pub center: Point,
    pub radius: f64,
    pub member: Point,
    pub inner_radius: f64,
    pub escaped: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisVerdict {
    pub trials: usize,
    pub counterexample: Option<BasisCounterexample>,
}

impl BasisVerdict {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Sorted positive gaps `gap(x, y)` over all ordered pairs.
pub fn gap_values(space: &PartialNMetricSpace) -> Vec<f64> {
    let mut v: Vec<f64> = space
        .points()
        .flat_map(|x| space.points().map(move |y| (x, y)))
        .map(|(x, y)| space.gap(x, y))
        .filter(|g| *g > 0.0)
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Every distinct ball in a finite space is realised by a radius from this
/// grid: each boundary value, the midpoints between consecutive boundaries,
/// one radius below the smallest and one above the largest.
pub fn radius_grid(boundaries: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = boundaries.iter().copied().filter(|v| *v > 0.0).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    let mut grid = Vec::with_capacity(2 * b.len() + 2);
    match (b.first(), b.last()) {
        (Some(&lo), Some(&hi)) => {
            grid.push(lo / 2.0);
            for w in b.windows(2) {
                grid.push(w[0]);
                grid.push((w[0] + w[1]) / 2.0);
            }
            grid.push(hi);
            grid.push(hi + 1.0);
        }
        _ => grid.push(1.0),
    }
    grid
}

/// Random trials of the basis property: for `y` in `B_eps(x)`, the ball
/// `B_delta(y)` with `delta = eps - gap(x, y)` lies inside `B_eps(x)`.
pub fn basis_check(space: &PartialNMetricSpace, trials: usize, seed: u64) -> BasisVerdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = radius_grid(&gap_values(space));
    let top = grid.last().copied().unwrap_or(1.0);
    let points: Vec<Point> = space.points().collect();
    for _ in 0..trials {
        let x = *points.choose(&mut rng).expect("non-empty space");
        let eps = if rng.gen_bool(0.5) {
            *grid.choose(&mut rng).expect("grid is never empty")
        } else {
            rng.gen_range(f64::EPSILON..=top)
        };
        let ball = open_ball(space, x, eps);
        let Some(&y) = ball.members.choose(&mut rng) else {
            continue;
        };
        if let Some(c) = basis_instance(space, x, eps, y) {
            return BasisVerdict {
                trials,
                counterexample: Some(c),
            };
        }
    }
    BasisVerdict {
        trials,
        counterexample: None,
    }
}

/// Checks a single `(x, eps, y)` instance of the basis property.
pub fn basis_instance(
    space: &PartialNMetricSpace,
    x: Point,
    eps: f64,
    y: Point,
) -> Option<BasisCounterexample> {
    let outer = open_ball(space, x, eps);
    let delta = eps - space.mixed(x, y) + space.self_distance(x);
    let inner = open_ball(space, y, delta);
    inner
        .members
        .iter()
        .find(|&&z| !outer.contains(z))
        .map(|&z| BasisCounterexample {
            center: x,
            radius: eps,
            member: y,
            inner_radius: delta,
            escaped: z,
        })
}

/// `gap(x, y)` and `gap(y, x)` for a distinct pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSeparation {
    pub x: Point,
    pub y: Point,
    pub eps_x: f64,
    pub eps_y: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationClass {
    pub is_t0: bool,
    pub is_t1: bool,
    /// Pairs where at least one of the two gaps is not positive.
    pub witnesses: Vec<PairSeparation>,
}

/// T0 when every distinct pair has a positive gap in some direction; T1
/// when both directions are positive.
pub fn separation_class(space: &PartialNMetricSpace) -> SeparationClass {
    let mut out = SeparationClass {
        is_t0: true,
        is_t1: true,
        witnesses: Vec::new(),
    };
    for x in space.points() {
        for y in space.points().filter(|&y| y > x) {
            let (eps_x, eps_y) = (space.gap(x, y), space.gap(y, x));
            let t0 = eps_x > 0.0 || eps_y > 0.0;
            let t1 = eps_x > 0.0 && eps_y > 0.0;
            out.is_t0 &= t0;
            out.is_t1 &= t1;
            if !t1 {
                out.witnesses.push(PairSeparation { x, y, eps_x, eps_y });
            }
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("space does not pass the n-metric profile")]
    NotAnNMetric,
}

/// Which inclusion of the ball sandwich failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inclusion {
    /// `B^G_{eps/n}(x) ⊆ B^d_eps(x)`
    ShrunkenIntoMetric,
    /// `B^d_eps(x) ⊆ B^G_eps(x)`
    MetricIntoBall,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopologyCounterexample {
    pub center: Point,
    pub radius: f64,
    pub inclusion: Inclusion,
    pub offending: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopologyComparison {
    pub radii: Vec<f64>,
    pub checked: usize,
    pub counterexample: Option<TopologyCounterexample>,
}

impl TopologyComparison {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Verifies `B^G_{eps/n}(x) ⊆ B^d_eps(x) ⊆ B^G_eps(x)` for every point and
/// every radius in an exhaustive grid. Requires an n-metric.
pub fn compare_topologies(
    space: &PartialNMetricSpace,
    tol: f64,
) -> Result<TopologyComparison, TopologyError> {
    if !space.passes(Profile::NMetric, tol) {
        return Err(TopologyError::NotAnNMetric);
    }
    let metric = associated_metric_unchecked(space);
    let n = space.n() as f64;
    // boundaries of all three ball families, expressed as radii eps
    let mut boundaries = Vec::new();
    for x in space.points() {
        for y in space.points() {
            let g = space.gap(x, y);
            boundaries.push(g);
            boundaries.push(g * n);
            boundaries.push(metric.distance(x, y));
        }
    }
    let radii = radius_grid(&boundaries);
    let mut checked = 0;
    for x in space.points() {
        for &eps in &radii {
            checked += 1;
            let shrunken = open_ball(space, x, eps / n);
            let metric_ball = metric_ball(&metric, x, eps);
            let ball = open_ball(space, x, eps);
            let cex = |inclusion, offending| TopologyCounterexample {
                center: x,
                radius: eps,
                inclusion,
                offending,
            };
            if let Some(&z) = shrunken.members.iter().find(|&&z| !metric_ball.contains(z)) {
                return Ok(TopologyComparison {
                    radii,
                    checked,
                    counterexample: Some(cex(Inclusion::ShrunkenIntoMetric, z)),
                });
            }
            if let Some(&z) = metric_ball.members.iter().find(|&&z| !ball.contains(z)) {
                return Ok(TopologyComparison {
                    radii,
                    checked,
                    counterexample: Some(cex(Inclusion::MetricIntoBall, z)),
                });
            }
        }
    }
    Ok(TopologyComparison {
        radii,
        checked,
        counterexample: None,
    })
}

/// Pairs `(x, y)` with `x` in the closure of `{y}`.
///
/// In a finite space, `x` is in the closure of `{y}` iff every ball holding
/// `x` also holds `y`, i.e. `gap(c, y) <= gap(c, x)` for every centre `c`.
pub fn specialization_order(space: &PartialNMetricSpace) -> Vec<(Point, Point)> {
    let mut out = Vec::new();
    for x in space.points() {
        for y in space.points() {
            if space.points().all(|c| space.gap(c, y) <= space.gap(c, x)) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Graphviz rendering of the specialization preorder (reflexive edges
/// omitted).
pub fn specialization_dot(space: &PartialNMetricSpace) -> String {
    let mut s = String::from("digraph specialization {\n");
    for x in space.points() {
        let _ = writeln!(s, "  \"{}\";", space.name(x));
    }
    let edges: BTreeSet<(Point, Point)> = specialization_order(space)
        .into_iter()
        .filter(|(x, y)| x != y)
        .collect();
    for (x, y) in edges {
        let _ = writeln!(s, "  \"{}\" -> \"{}\";", space.name(x), space.name(y));
    }
    s.push_str("}\n");
    s
}
