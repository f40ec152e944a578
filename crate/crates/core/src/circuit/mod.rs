//! Gate-level description of the simulation: the native trapped-ion gate
//! set, the Trotter-step compiler, the pulse-program text format, and
//! evaluation of circuits on states.

mod angle;
mod compile;
mod evolve;
mod gate;
mod lower;
mod pulse;

pub use angle::{format_radians, Angle, SymbolicAngle, STEP_SYMBOL};
pub use compile::{
    average_zz_hamiltonian, basis_rotation, compile_section, compile_step, compile_trotter,
    hopping_pair_hamiltonian, local_rotation_symbols, ms_hamiltonian, msz_window_hamiltonian,
    section_target, shifted_local_coefficients, step_target, HoppingStyle, Section,
    TrotterSchedule,
};
pub use evolve::{exact_series, trotter_evolve};
pub use gate::{circuit_unitary, gate_matrix, Circuit, Gate, QubitMask, Window};
pub use lower::{circuit_to_pulses, pulses_to_circuit, Lowered};
pub use pulse::{
    format_pulse_program, parse_pulse_program, AngleExpr, BinaryOp, Bindings, Expr, Item, Pulse,
    PulseName, PulseProgram, Target,
};
