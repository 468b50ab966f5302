//! Computational tools for finite partial n-metric spaces.
//!
//! A partial n-metric assigns a real number to every size-`n` multiset of
//! points. This crate checks the defining axioms on finite tables, builds the
//! associated metric and the open-ball topology, analyses sequences for
//! Cauchy and limit behaviour, certifies contractive self-maps, and finds
//! fixed points by iterating orbits.
//!
//! Modules:
//!
//! * [`space`]: the table data model and explicit constructions.
//! * [`axioms`]: axiom checks with witnesses.
//! * [`topology`]: open balls, separation and topology comparison.
//! * [`sequence`]: Cauchy, limit and special-limit analysis.
//! * [`engine`]: orbits, contractivity certificates and fixed points.
//! * [`doc`]: JSON documents for spaces, partial metrics and maps.
//! * [`cli`]: the `pnmetric` command-line front end.

pub mod axioms;
pub mod cli;
pub mod doc;
pub mod engine;
pub mod fixtures;
pub mod multiset;
pub mod sequence;
pub mod space;
pub mod topology;

pub use axioms::{validate, CheckOptions, Profile, ValidationReport, Violation};
pub use space::{
    associated_metric, from_partial_metric, MetricSpace, PartialMetricSpace, PartialNMetricSpace,
    Point, SpaceError, DEFAULT_TOL,
};
