//! Rewrites composite gates into plates and cNOTs.
//!
//! * `F(c,t,a)  ->  ROT(t,a/2) CZ(c,t) ROT(t,a/2)`, since `R(b) Z R(b) = R(2b)`
//!   and both rotations cancel (`R(b)^2 = I`) when the control is H.
//! * `CZ(c,t)   ->  ROT(t,pi/4) CNOT(c,t) ROT(t,pi/4)`, since `H X H = Z`.
//!
//! Adjacent rotations are never merged, so a fully lowered F gate is exactly
//! four plates around one cNOT on its target wire.

use std::f64::consts::FRAC_PI_4;

use crate::circuit::{Angle, Circuit, Gate, Level};
use crate::error::{Error, Result};

pub fn lower_f(gate: &Gate) -> Result<[Gate; 3]> {
    match *gate {
        Gate::F {
            control,
            target,
            alpha,
        } => {
            let half = Angle::new(alpha.radians() / 2.0)?;
            let rot = Gate::Rot {
                qubit: target,
                alpha: half,
            };
            Ok([rot, Gate::Cz { control, target }, rot])
        }
        other => Err(Error::WrongGateKind {
            expected: "F",
            found: other.kind().name(),
        }),
    }
}

pub fn lower_cz(gate: &Gate) -> Result<[Gate; 3]> {
    match *gate {
        Gate::Cz { control, target } => {
            let rot = Gate::Rot {
                qubit: target,
                alpha: Angle::new(FRAC_PI_4)?,
            };
            Ok([rot, Gate::Cnot { control, target }, rot])
        }
        other => Err(Error::WrongGateKind {
            expected: "CZ",
            found: other.kind().name(),
        }),
    }
}

/// Expands one gate so that it fits `target`, appending to `out`.
pub fn lower_gate_into(gate: &Gate, target: Level, out: &mut Vec<Gate>) {
    match gate {
        Gate::F { .. } if target < Level::Composite => {
            for g in lower_f(gate).expect("F gate") {
                lower_gate_into(&g, target, out);
            }
        }
        Gate::Cz { .. } if target < Level::CzLevel => {
            out.extend(lower_cz(gate).expect("CZ gate"));
        }
        _ => out.push(*gate),
    }
}

/// Lowers `circuit` to `target`, rewriting gate by gate in order.
pub fn lower(circuit: &Circuit, target: Level) -> Result<Circuit> {
    if target > circuit.level() {
        return Err(Error::InvalidLowering {
            from: circuit.level(),
            to: target,
        });
    }
    if target == circuit.level() {
        return Ok(circuit.clone());
    }
    let mut gates = Vec::with_capacity(circuit.len() * 3);
    for g in circuit.gates() {
        lower_gate_into(g, target, &mut gates);
    }
    Circuit::new(circuit.n_qubits(), gates, target)
}
