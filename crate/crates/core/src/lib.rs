//! Classical and bipolar PROMETHEE with stochastic acceptability analysis
//! over the parameters compatible with a decision maker's statements.
//!
//! The numeric core is generic over [`scalar::Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, with `F32`-suffixed variants for single precision.

pub mod bipolar;
pub mod elicitation;
pub mod error;
pub mod lp;
pub mod model;
pub mod pipeline;
pub mod promethee;
pub mod report;
pub mod sampler;
pub mod scalar;
pub mod smaa;

pub use bipolar::{bipolar_flows, choquet_2additive, BicapacityParams, ParamLayout};
pub use elicitation::{compile, ConstraintSystem, PreferenceStatement};
pub use error::{Error, Result};
pub use lp::{exact_ror, max_epsilon, LpConfig, LpOutcome};
pub use model::{Criterion, Direction, PerformanceTable};
pub use pipeline::{run, ModePolicy, ReportFormat, RunConfig, RunStatus};
pub use promethee::{classical_flows, FlowTriple};
pub use report::SmaaReport;
pub use sampler::{sample, SampleBatch, SamplerConfig};
pub use scalar::Scalar;
pub use smaa::{aggregate, Mode, SmaaResults};

pub type Table = PerformanceTable<f64>;
pub type Params = BicapacityParams<f64>;
pub type System = ConstraintSystem<f64>;
pub type Batch = SampleBatch<f64>;
pub type Results = SmaaResults<f64>;

pub type TableF32 = PerformanceTable<f32>;
pub type ParamsF32 = BicapacityParams<f32>;
pub type SystemF32 = ConstraintSystem<f32>;
pub type BatchF32 = SampleBatch<f32>;
pub type ResultsF32 = SmaaResults<f32>;
