//! Transitivity, mixing, periodic density and sensitivity checks, the
//! two-point entropy bound, and a catalogue of configured examples.

mod bound;
mod checks;
mod gallery;
mod open;

pub use bound::{two_point_entropy_bound, TwoPointBound};
pub use checks::{
    conjoin, dense_periodic_check, devaney_report, sensitivity_check, strong_mixing_check, transitivity_check,
    ChaosConfig, ChaosReport, DensePeriodicReport, MixingPair, MixingReport, PairWitness, PeriodicWitness,
    SensitivityReport, SensitivityWitness, TransitivityReport,
};
pub use gallery::{example_gallery, GalleryExperiment, GALLERY};
pub use open::OpenSetSpec;
