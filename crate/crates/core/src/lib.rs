//! Exact-rational oracles for hedgehogs, cobwebs, the Z-construction, its
//! inverse-limit tower and the extremal space, with seeded property audits.

pub mod audits;
pub mod base;
pub mod cobweb;
pub mod config;
pub mod error;
pub mod extremal;
pub mod hedgehog;
pub mod invlimit;
pub mod lit;
pub mod runner;
pub mod scalar;
pub mod space;
pub mod suite;
pub mod zcon;

pub use audits::{AuditContext, AuditReport, Violation};
pub use base::{BasePoint, BaseSpace};
pub use cobweb::{CobwebPoint, CobwebSpace};
pub use config::{RunConfig, SpaceSpec};
pub use error::{Error, Result};
pub use extremal::{EPoint, ExtremalSpace};
pub use hedgehog::{HedgehogPoint, HedgehogSpace};
pub use invlimit::{LevelPoint, LimitPoint, Tower};
pub use scalar::Scalar;
pub use space::MetricSpace;
pub use zcon::{ZPoint, ZSpace};
