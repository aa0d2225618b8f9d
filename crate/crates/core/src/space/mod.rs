//! Carriers (finite metric sets, interval grids, full shifts), their maps,
//! and validated group actions.

mod action;
mod carrier;
mod maps;
mod shift;

pub(crate) use action::periodic_candidates;
pub use action::{Action, DEFAULT_RELATION_RADIUS};
pub use carrier::{real, Carrier, FiniteMetric, IntervalGrid, MetricTransform, Point};
pub use maps::CarrierMap;
pub use shift::{tail_mass, ShiftPoint};
