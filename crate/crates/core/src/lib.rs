//! Simulation of programmable quantum gate arrays.
//!
//! A processor is a fixed unitary `G` on `data ⊗ program`. Loading a program
//! state into the program register makes the processor act on the data as a
//! completely positive map. This crate builds processors, extracts the maps
//! they induce, and checks their structural identities.
//!
//! * [`operator`]: dense complex matrices, partial traces, distances.
//! * [`processor`]: basis operators, program operators, purification,
//!   composition and equivalence.
//! * [`channel`]: Kraus maps, Choi matrices, fixed points, contraction.
//! * [`zoo`]: U, Y, U′, Y′, partial-swap and QID processors.
//! * [`design`]: realizing one-parameter channel families on a processor.
//! * [`probabilistic`]: post-selection on the program register.

pub mod channel;
pub mod design;
pub mod error;
pub mod json;
pub mod linalg;
pub mod operator;
pub mod probabilistic;
pub mod processor;
pub mod random;
pub mod zoo;

pub use channel::{choi_distance, Channel, ChoiMatrix};
pub use error::{Error, Result};
pub use operator::{Operator, StateVector, C64, DEFAULT_TOL};
pub use processor::{induced_channel, BasisOperators, Processor, ProgramState};
