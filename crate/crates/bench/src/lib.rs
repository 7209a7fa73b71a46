//! Fixtures shared by the criterion benches.

use frameforge::codegen::{emit, Dialect, EmittedScript};
use frameforge::harness::{generate_suite, BenchProblem, SuiteConfig};
use frameforge::pipeline::compile;
use frameforge::{FrameModel, COORD_TOL};

/// The default 20-problem suite.
pub fn default_suite() -> Vec<BenchProblem> {
    generate_suite(&SuiteConfig::default()).expect("default config is valid")
}

/// Compiled IR for every problem in the default suite.
pub fn compiled_suite() -> Vec<FrameModel> {
    default_suite()
        .iter()
        .map(|p| compile(&p.spec, COORD_TOL).expect("suite compiles").model)
        .collect()
}

/// One emitted script per model for `dialect`.
pub fn emitted_suite(models: &[FrameModel], dialect: Dialect) -> Vec<EmittedScript> {
    models
        .iter()
        .map(|m| emit(m, dialect, COORD_TOL).expect("suite emits"))
        .collect()
}
