//! Verification toolkit for bivariate heavy-tail limits on cones.
//!
//! The crate provides, as a library:
//!
//! * cone geometry and the canonical rectangle algebra ([`cones`]);
//! * a closed-form catalog of limit measures with evaluation, homogeneity,
//!   product and conditional-law probes ([`limits`], [`catalog`]);
//! * angular measures and the polar reconstruction of strip measures
//!   ([`angular`]);
//! * regime classification of norming pairs and the constructive
//!   standardizing transformations ([`standardize`]);
//! * seeded counter-based samplers for every catalog model ([`samplers`]);
//! * empirical tail estimation with honest error bars ([`estimate`]);
//! * the extension of strip limits to the full cone and tail-equivalence
//!   probes ([`extend`]);
//! * verification report rows in CSV/JSON ([`report`]).
//!
//! Everything is deterministic for a fixed seed; measure evaluation is
//! pure and safe to run concurrently.

pub mod angular;
pub mod catalog;
pub mod cones;
pub mod dist;
pub mod error;
pub mod estimate;
pub mod extend;
pub mod limits;
pub mod quad;
pub mod report;
pub mod rng;
pub mod samplers;
pub mod standardize;

pub use cones::{glue, ConeId, ConeRect, ConsistencyReport, GluePartition};
pub use dist::Cdf;
pub use error::{Error, Result};
pub use limits::{check_homogeneity, conditional_h, product_test, ConditionalLaw, TailMeasure};
pub use samplers::{sample, ModelSpec, ModelVariant, SampleBatch};
