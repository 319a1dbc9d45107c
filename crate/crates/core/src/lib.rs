//! Simulation of qubit circuits containing closed-timelike-curve (CTC) elements
//! under weak-coupling thermal (Davies) decoherence.
//!
//! Two CTC models are covered:
//!
//! * the Deutsch consistency-condition model ([`deutsch`]), where the
//!   chronology-violating qubit must be a fixed point of the circuit's induced
//!   map, optionally composed with a Davies channel;
//! * the post-selected teleportation model ([`pctc`]), where the CTC is mimicked
//!   by a Bell resource whose chronology-violating half is thermally decohered.
//!
//! [`analysis`] holds the distinguishability metrics, parameter sweeps and the
//! randomized never-enhancement harness.
//!
//! Conventions used throughout: qubit 0 is the most significant bit of a basis
//! index, two-qubit objects are ordered (CR, CV), three-qubit Deutsch objects are
//! ordered (B, M, T) and post-selected objects are ordered (SYS, C, B).

pub mod analysis;
pub mod channels;
pub mod deutsch;
mod error;
pub mod gates;
pub mod pctc;
pub mod qmat;

pub use analysis::{
    conjecture_harness, q_minus_closed, q_zero_closed, r_numeric, r_paper_formula, sweep,
    ConjectureReport, DistinguishabilityRecord, Grid, ParamGrids, SweepCircuit, SweepSpec,
};
pub use channels::{
    compose, davies_apply, davies_superoperator, gibbs_state, is_cptp, temperature_to_p,
    CptpVerdict, DaviesParams, QuantumChannel,
};
pub use deutsch::{
    closed_form_rho_f, closed_form_tau, deutsch_output, fixed_point_iterate, lambda_map,
    noisy_consistency_map, select_max_entropy, solve_deutsch, solve_fixed_point, Circuit,
    CtcSolutionSet, DeutschResult, FigOneInput, Selection,
};
pub use error::{Error, Result};
pub use gates::Unitary;
pub use pctc::{l_operators, noisy_bell, pctc_output, pctc_output_via_l, BellCoefficients, PctcResult};
pub use qmat::{
    bloch_from_state, hermitian_eigenvalues, matrix_unit, partial_trace,
    partial_trace_3q_keep_last, state_from_bloch, tensor, trace_distance, von_neumann_entropy,
    BlochVector, ComplexMatrix, DensityOperator, Keep, PureState,
};
