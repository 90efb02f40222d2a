//! Strong simulation of Clifford+T circuits through partitioned ZX-diagrams.
//!
//! A circuit is plugged into a scalar ZX-diagram, Clifford-simplified, then
//! split into segments by cutting a small set of spiders. Each segment's
//! scalar is tabulated over its local cut parameters, and the tables are
//! contracted pairwise, cheapest pair first.

pub mod circuit;
pub mod costmodel;
pub mod cutting;
pub mod decompose;
pub mod diagram;
pub mod engine;
pub mod generators;
pub mod error;
pub mod exec;
pub mod oracle;
pub mod partition;
pub mod phase;
pub mod regroup;
pub mod rewrite;
pub mod scalar;
pub mod sweep;
pub mod tensor;

pub use circuit::{plug, BasisState, Circuit, Gate};
pub use diagram::{EdgeKind, SpiderId, SpiderKind, Wire, ZxDiagram};
pub use error::{Error, Result};
pub use phase::{ParamFactor, ParamId, Phase};
pub use scalar::ScalarC;
pub use tensor::{scalar_of, tensor_of, Tensor};
pub use costmodel::CostModel;
pub use engine::{simulate_amplitude, EngineConfig, Method, Report};
pub use exec::Exec;
pub use partition::{choose_k, PartitionPlan, PlanOptions};
pub use regroup::Segment;
