//! Reference spaces and seeded random generators for tests and experiments.
//!
//! All random values are small integers or halves of integers, so every
//! table sum is exact in `f64` and verdicts do not depend on rounding.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::axioms::{validate, CheckOptions, Profile};
use crate::space::{PartialMetricSpace, PartialNMetricSpace, Point};

fn names(p: usize) -> Vec<String> {
    const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    (0..p)
        .map(|i| {
            if i < LETTERS.len() {
                (LETTERS[i] as char).to_string()
            } else {
                format!("p{i}")
            }
        })
        .collect()
}

/// The two-point 5-metric with a negative value at `{a, a, a, b, b}`.
pub fn two_point_five_metric() -> PartialNMetricSpace {
    PartialNMetricSpace::build(
        vec!["a".into(), "b".into()],
        5,
        [
            (vec!["a", "a", "a", "a", "a"], 0.0),
            (vec!["b", "b", "b", "b", "b"], 0.0),
            (vec!["a", "b", "b", "b", "b"], 4.0),
            (vec!["b", "a", "a", "a", "a"], 3.0),
            (vec!["a", "a", "b", "b", "b"], 2.0),
            (vec!["b", "b", "a", "a", "a"], -1.0),
        ],
    )
    .expect("reference table is total")
}

/// `p(x, x) = 1`, `p(y, y) = 2`, `p(x, y) = 2`.
pub fn two_point_partial_metric() -> PartialMetricSpace {
    PartialMetricSpace::build(
        vec!["x".into(), "y".into()],
        [(["x", "x"], 1.0), (["y", "y"], 2.0), (["x", "y"], 2.0)],
    )
    .expect("reference table is total")
}

/// Two points at arity 2 whose table is identically zero; fails separation.
pub fn degenerate_pair() -> PartialNMetricSpace {
    PartialNMetricSpace::from_fn(names(2), 2, |_| 0.0).expect("non-empty")
}

/// Unconstrained integer table with values in `[-5, 10]`.
pub fn random_table(points: usize, n: usize, seed: u64) -> PartialNMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PartialNMetricSpace::from_fn(names(points), n, |_| rng.gen_range(-5..=10) as f64)
        .expect("small table")
}

/// A random valid partial metric with values in `[0, 10]`.
///
/// Built as `p(x, y) = (d(x, y) + w(x) + w(y)) / 2` from integer weights `w`
/// and a metric `d >= |w(x) - w(y)|`; `strong` makes that bound strict.
pub fn random_partial_metric(points: usize, seed: u64, strong: bool) -> PartialMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<i64> = (0..points).map(|_| rng.gen_range(0..=6)).collect();
    // shortest-path metric over random edge weights in [1, 4]
    let mut graph = vec![0i64; points * points];
    for i in 0..points {
        for j in i + 1..points {
            let e = rng.gen_range(1..=4);
            graph[i * points + j] = e;
            graph[j * points + i] = e;
        }
    }
    for k in 0..points {
        for i in 0..points {
            for j in 0..points {
                let via = graph[i * points + k] + graph[k * points + j];
                if via < graph[i * points + j] {
                    graph[i * points + j] = via;
                }
            }
        }
    }
    let mut matrix = vec![0.0; points * points];
    for i in 0..points {
        for j in 0..points {
            let spread = (w[i] - w[j]).abs() + i64::from(strong && i != j);
            let d = if i == j { 0 } else { graph[i * points + j].max(spread) };
            matrix[i * points + j] = (d + w[i] + w[j]) as f64 / 2.0;
        }
    }
    PartialMetricSpace::from_matrix(names(points), matrix).expect("symmetric by construction")
}

/// Rejection-samples an integer table that passes `profile`.
///
/// Self-distances are drawn from `[-2, 2]` and mixed values from just above
/// the largest self-distance involved, which keeps the acceptance rate
/// workable for three or four points.
pub fn random_valid_space(
    points: usize,
    n: usize,
    profile: Profile,
    seed: u64,
) -> PartialNMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = CheckOptions::default();
    loop {
        let selfs: Vec<i64> = (0..points)
            .map(|_| {
                if profile == Profile::NMetric {
                    0
                } else {
                    rng.gen_range(-2..=2)
                }
            })
            .collect();
        let candidate = PartialNMetricSpace::from_fn(names(points), n, |m: &[Point]| {
            if m.iter().all(|&p| p == m[0]) {
                return selfs[m[0].index()] as f64;
            }
            let floor = m.iter().map(|p| selfs[p.index()]).max().unwrap_or(0);
            // below the floor always breaks ssd; the strict profiles also exclude it
            let low = if profile == Profile::PartialNMetric { 0 } else { 1 };
            (floor + rng.gen_range(low..=6)) as f64
        })
        .expect("small table");
        if validate(&candidate, profile, &opts).passed() {
            return candidate;
        }
    }
}

/// Appends a copy of `p` named `<p>'`. Every axiom except separation
/// survives, so the result isolates separation failures.
pub fn duplicate_point(space: &PartialNMetricSpace, p: Point) -> PartialNMetricSpace {
    let old = space.len();
    let mut names = space.names().to_vec();
    names.push(format!("{}'", space.name(p)));
    let mut buf = Vec::with_capacity(space.n());
    PartialNMetricSpace::from_fn(names, space.n(), |m: &[Point]| {
        buf.clear();
        buf.extend(m.iter().map(|&q| if q.index() == old { p } else { q }));
        space.value(&buf)
    })
    .expect("same arity as the source")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::Axiom;

    #[test]
    fn duplicate_breaks_only_separation() {
        let g = duplicate_point(&two_point_five_metric(), Point(1));
        assert_eq!(g.names(), ["a", "b", "b'"]);
        let report = validate(&g, Profile::PartialNMetric, &CheckOptions::default());
        assert!(!report.passed());
        assert!(report.violations.iter().all(|v| v.axiom == Axiom::Sep));
        assert_eq!(g.eval_names(&["b'", "b'", "a", "a", "a"]), Ok(-1.0));
    }
}
