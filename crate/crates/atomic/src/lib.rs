//! Validation, simulation and stress-testing of memristive IMPLY-logic
//! algorithms.
//!
//! The library is organised as a pipeline:
//!
//! 1. [`spec_io`] parses and cross-validates the algorithm, configuration,
//!    topology and parameter files.
//! 2. [`state_model`] checks the algorithm functionally against its declared
//!    truth table using an idealised boolean device model.
//! 3. [`control_logic`] compiles each step into per-device drive levels and
//!    switch positions (the PWM schedule).
//! 4. [`circuit_sim`] integrates the threshold memristor model through the
//!    schedule, tracks dissipated energy and can export a SPICE netlist.
//! 5. [`deviation`] re-runs the transient across grids of initial resistive
//!    deviation and classifies the outcome of every corner.
//! 6. [`report`] renders the collected results as SVG plots and CSV tables.
//!
//! [`pipeline`] drives the stages end to end; the `atomic` binary wraps it in
//! a CLI.

pub mod bundle;
pub mod control_logic;
pub mod circuit_sim;
pub mod deviation;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod spec_io;
pub mod state_model;
