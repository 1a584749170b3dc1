//! Desk-scale experiments: fiber sampling against the strata, and Morse
//! classification of critical points with a perturbation probe.

mod morse;
mod roots;
mod sampling;

pub use morse::{
    critical_jet_instance, morse_classify, morse_perturbation_probe, rational_critical_points,
    CriticalPoint, MorseClass, ProbeReport, ProbeStep,
};
pub use roots::UPoly;
pub use sampling::{sample_fiber, SampleConfig, SampleReport, SampleTarget};
