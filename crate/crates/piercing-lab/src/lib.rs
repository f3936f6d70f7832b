//! Piercing sets for planar region families with the (p,2)-property.
//!
//! A family of closed planar regions satisfies the (p,2)-property when
//! among any p of its members some two intersect; equivalently, its packing
//! number ν is at most p−1. This crate computes small piercing sets
//! (transversals) for such families and certifies every step against exact
//! brute-force oracles:
//!
//! - [`geometry`]: discs and convex polygons, exact predicates, and the
//!   candidate points that reduce piercing to finite set cover;
//! - [`hypergraph`]: primal/dual hypergraphs, Delaunay graphs, friend
//!   pairs, and the hereditary c-linearity check;
//! - [`helly`]: friend density and the certified deep-edge lower bound;
//! - [`transversal`]: packing numbers, the Turán intersection bound, the
//!   fractional transversal LP, epsilon-net rounding (`pierce_p2`), and the
//!   greedy neighborhood-removal scheme (`greedy_pierce`);
//! - [`oracle`]: exact minimum transversal, maximum packing, VC dimension,
//!   and the candidate-dominance grid check;
//! - [`instance`], [`analyze`], [`experiment`]: seeded generators, file
//!   I/O, instance reports, and the batch experiment driver behind the CLI.
//!
//! ```
//! use piercing_lab::geometry::{Point, Region, RegionFamily};
//! use piercing_lab::transversal::{packing_number, pierce_p2, PackingMode};
//!
//! let family = RegionFamily::new(vec![
//!     Region::disc(Point::new(0.0, 0.0), 1.0).unwrap(),
//!     Region::disc(Point::new(1.5, 0.0), 1.0).unwrap(),
//!     Region::disc(Point::new(3.0, 0.0), 1.0).unwrap(),
//! ])
//! .unwrap();
//! let nu = packing_number(&family, PackingMode::Exact).unwrap();
//! assert_eq!(nu, 2);
//! let report = pierce_p2(&family, nu + 1, 42).unwrap();
//! assert!(report.verify_stabs(&family).is_ok());
//! ```

pub mod analyze;
pub mod experiment;
pub mod geometry;
pub mod helly;
pub mod hypergraph;
pub mod instance;
mod lp;
pub mod oracle;
pub mod transversal;

pub use geometry::{Point, Region, RegionFamily};
pub use transversal::{TransversalReport, WeightedPointSet};
