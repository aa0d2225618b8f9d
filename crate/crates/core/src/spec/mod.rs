//! Specification: tracing points for families of orbit segments indexed by
//! well-separated subsets of the group.

mod instance;
mod point;
mod search;
mod transfer;

pub use instance::{
    family_separation, verify_trace, FamilySeparation, OrbitSegment, PairDistance, SeparationMode,
    SpecificationInstance, TracingResult, DEFAULT_ORBIT_BOUND, DEFAULT_TRUNCATION,
};
pub use point::{
    check_specification_point, shift_target_pool, Counterexample, SpecPointOptions, SpecPointReport, Verdict,
};
pub use search::{agreement_radius, search_tracing_point, shift_trace_construct, SearchScope};
pub use transfer::{
    combine, conjugacy_spec_transfer, cyclic_restriction_instance, product_spec_transfer, project, ConjugacyTransfer,
    CyclicBlocks, CyclicRoundTrip, ProductTransfer,
};
