//! Recursive W-state preparation circuits.
//!
//! The three-qubit circuit is `F(1,2,a3) CNOT(2,1) F(2,3,pi/4) CNOT(3,2)`
//! with `cos a3 = 1/sqrt 3`. For `n >= 4` the circuit is
//!
//! ```text
//! F(1,2,a_n)  ++  [circuit for n-1 on qubits 2..n]  ++  CNOT(2,1) .. CNOT(n,1)
//! ```
//!
//! with `cos a_n = 1/sqrt n`. Starting from `|VH...H>`, the first F gate
//! leaves `1/sqrt n` on `|VH...H>` and sends the rest into the sub-circuit,
//! which prepares `W_{n-1}` on qubits `2..n`; the trailing CNOT layer then
//! clears qubit 1 on every branch that carries a V elsewhere.

use std::f64::consts::FRAC_PI_4;

use crate::circuit::{Angle, Circuit, Gate, Level, QubitIndex};
use crate::error::{Error, Result};

pub const MIN_QUBITS: usize = 3;

fn check_size(n: usize) -> Result<()> {
    if n < MIN_QUBITS {
        Err(Error::UnsupportedSize(n))
    } else {
        Ok(())
    }
}

/// Mixing angle of the F gate that splits off `1/sqrt(m)` of the amplitude.
pub fn split_angle(m: usize) -> f64 {
    if m == 2 {
        // acos(1/sqrt 2) is off by one ulp from pi/4
        FRAC_PI_4
    } else {
        (1.0 / (m as f64).sqrt()).acos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleEntry {
    pub control: QubitIndex,
    pub target: QubitIndex,
    pub alpha: Angle,
    /// Angle of each of the two plates conjugating the cZ, `alpha / 4`.
    pub plate_angle: Angle,
}

/// Rotation parameters of the `n - 1` F gates, indexed by control qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSchedule {
    pub n: usize,
    pub entries: Vec<ScheduleEntry>,
}

impl AngleSchedule {
    /// Entry for `F(j, j+1)`, `j` 1-based.
    pub fn get(&self, control: usize) -> Option<&ScheduleEntry> {
        control.checked_sub(1).and_then(|i| self.entries.get(i))
    }
}

pub fn angle_schedule(n: usize) -> Result<AngleSchedule> {
    check_size(n)?;
    let entries = (1..n)
        .map(|j| {
            let alpha = split_angle(n - j + 1);
            ScheduleEntry {
                control: QubitIndex::new(j as u32).expect("j >= 1"),
                target: QubitIndex::new(j as u32 + 1).expect("j >= 1"),
                alpha: Angle::new(alpha).expect("finite"),
                plate_angle: Angle::new(alpha / 4.0).expect("finite"),
            }
        })
        .collect();
    Ok(AngleSchedule { n, entries })
}

/// Closed-form gate counts of the `n`-qubit construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountPrediction {
    pub total_two_qubit: usize,
    pub f_gates: usize,
    pub cnot_gates: usize,
}

pub fn predicted_counts(n: usize) -> Result<CountPrediction> {
    check_size(n)?;
    Ok(CountPrediction {
        total_two_qubit: (n * (n + 1) - 4) / 2,
        f_gates: n - 1,
        cnot_gates: (n - 2) * (n + 1) / 2,
    })
}

fn f(control: usize, alpha: f64) -> Gate {
    Gate::f(control as u32, control as u32 + 1, alpha).expect("valid F gate")
}

fn cnot(control: usize, target: usize) -> Gate {
    Gate::cnot(control as u32, target as u32).expect("valid CNOT gate")
}

/// Gates of the `n`-qubit circuit in application order, generated lazily.
///
/// The nested sub-circuits are flattened: all leading F gates of the
/// recursion come first, then the three-qubit core on qubits `n-2..n`, then
/// the CNOT layers from the innermost level outwards.
pub fn w_circuit_gates(n: usize) -> Result<impl Iterator<Item = Gate>> {
    check_size(n)?;
    // level m acts on qubits off+1..=n with off = n - m
    let leading = (4..=n).rev().map(move |m| f(n - m + 1, split_angle(m)));
    let off = n - 3;
    let core = [
        f(off + 1, split_angle(3)),
        cnot(off + 2, off + 1),
        f(off + 2, split_angle(2)),
        cnot(off + 3, off + 2),
    ];
    let trailing = (4..=n).flat_map(move |m| {
        let off = n - m;
        (2..=m).map(move |k| cnot(off + k, off + 1))
    });
    Ok(leading.chain(core).chain(trailing))
}

pub fn build_w_circuit(n: usize) -> Result<Circuit> {
    let gates: Vec<Gate> = w_circuit_gates(n)?.collect();
    Circuit::new(n, gates, Level::Composite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{GateCounts, GateKind};

    /// Literal transcription of the recursion, used to check the flattened
    /// generator.
    fn recursive_reference(n: usize) -> Vec<Gate> {
        if n == 3 {
            return vec![
                f(1, (1.0 / 3f64.sqrt()).acos()),
                cnot(2, 1),
                f(2, FRAC_PI_4),
                cnot(3, 2),
            ];
        }
        let mut gates = vec![f(1, (1.0 / (n as f64).sqrt()).acos())];
        gates.extend(recursive_reference(n - 1).iter().map(|g| g.shifted(1)));
        gates.extend((2..=n).map(|k| cnot(k, 1)));
        gates
    }

    #[test]
    fn flattened_generator_matches_recursion() {
        for n in 3..=30 {
            let built = build_w_circuit(n).unwrap();
            let reference = recursive_reference(n);
            assert_eq!(built.len(), reference.len());
            for (a, b) in built.gates().iter().zip(&reference) {
                assert_eq!(a.kind(), b.kind());
                assert_eq!(a.control(), b.control());
                assert_eq!(a.target(), b.target());
                match (a.angle(), b.angle()) {
                    (Some(x), Some(y)) => assert!((x.radians() - y.radians()).abs() < 1e-15),
                    (None, None) => {}
                    _ => panic!("angle mismatch"),
                }
            }
        }
    }

    #[test]
    fn three_qubit_circuit() {
        let c = build_w_circuit(3).unwrap();
        let expected = [
            Gate::f(1, 2, (1.0 / 3f64.sqrt()).acos()).unwrap(),
            Gate::cnot(2, 1).unwrap(),
            Gate::f(2, 3, FRAC_PI_4).unwrap(),
            Gate::cnot(3, 2).unwrap(),
        ];
        assert_eq!(c.gates(), &expected);
        assert_eq!(c.level(), Level::Composite);
    }

    #[test]
    fn four_qubit_trailing_layer() {
        let c = build_w_circuit(4).unwrap();
        let tail: Vec<_> = c.gates()[5..].to_vec();
        assert_eq!(tail, vec![cnot(2, 1), cnot(3, 1), cnot(4, 1)]);
        let counts = c.counts();
        assert_eq!((counts.f, counts.cnot), (3, 5));
    }

    #[test]
    fn table_counts() {
        let rows = [
            (3, 4, 2, 2),
            (4, 8, 3, 5),
            (5, 13, 4, 9),
            (6, 19, 5, 14),
            (7, 26, 6, 20),
        ];
        for (n, total, fs, cnots) in rows {
            let p = predicted_counts(n).unwrap();
            assert_eq!(
                (p.total_two_qubit, p.f_gates, p.cnot_gates),
                (total, fs, cnots)
            );
            let c = build_w_circuit(n).unwrap().counts();
            assert_eq!((c.two_qubit(), c.f, c.cnot), (total, fs, cnots));
        }
    }

    #[test]
    fn hundred_qubit_total() {
        assert_eq!(predicted_counts(100).unwrap().total_two_qubit, 5048);
        let counted: GateCounts = w_circuit_gates(100)
            .unwrap()
            .collect::<Vec<_>>()
            .iter()
            .collect();
        assert_eq!(counted.two_qubit(), 5048);
    }

    #[test]
    fn counts_match_and_grow_by_n() {
        let mut prev = build_w_circuit(3).unwrap().len();
        for n in 3..=200 {
            let c = w_circuit_gates(n).unwrap().collect::<Vec<_>>();
            let counts: GateCounts = c.iter().collect();
            let p = predicted_counts(n).unwrap();
            assert_eq!(counts.two_qubit(), p.total_two_qubit);
            assert_eq!(counts.f, p.f_gates);
            assert_eq!(counts.cnot, p.cnot_gates);
            assert_eq!(p.total_two_qubit, p.f_gates + p.cnot_gates);
            if n > 3 {
                assert_eq!(c.len() - prev, n);
            }
            prev = c.len();
        }
    }

    #[test]
    fn structure_of_f_and_trailing_cnots() {
        for n in [3, 4, 9, 25] {
            let c = build_w_circuit(n).unwrap();
            for g in c.gates().iter().filter(|g| g.kind() == GateKind::F) {
                assert_eq!(g.target().get(), g.control().unwrap().get() + 1);
            }
            // layers after the 3-qubit core, innermost first; level m sits on
            // qubits n-m+1..=n and targets its own first qubit
            let mut rest = &c.gates()[(n - 3) + 4..];
            for m in 4..=n {
                let (layer, tail) = rest.split_at(m - 1);
                for g in layer {
                    assert_eq!(g.kind(), GateKind::Cnot);
                    assert_eq!(g.target().get() as usize, n - m + 1);
                }
                rest = tail;
            }
            assert!(rest.is_empty());
            if n > 3 {
                for g in &c.gates()[c.len() - (n - 1)..] {
                    assert_eq!(g.target().get(), 1);
                }
            }
        }
    }

    #[test]
    fn schedule_matches_circuit_by_position() {
        for n in [3, 4, 5, 17, 64] {
            let schedule = angle_schedule(n).unwrap();
            assert_eq!(schedule.entries.len(), n - 1);
            let c = build_w_circuit(n).unwrap();
            for g in c.gates().iter().filter(|g| g.kind() == GateKind::F) {
                let j = g.control().unwrap().get() as usize;
                let e = schedule.get(j).unwrap();
                assert_eq!(e.target, g.target());
                assert!((e.alpha.radians() - g.angle().unwrap().radians()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn schedule_invariants() {
        let n = 40;
        let s = angle_schedule(n).unwrap();
        for (i, e) in s.entries.iter().enumerate() {
            let j = i + 1;
            let want = 1.0 / ((n - j + 1) as f64).sqrt();
            assert!((e.alpha.radians().cos() - want).abs() < 1e-14);
            assert!((e.plate_angle.radians() - e.alpha.radians() / 4.0).abs() < 1e-16);
        }
        assert!(s.entries.windows(2).all(|w| w[0].alpha > w[1].alpha));
        assert_eq!(s.entries.last().unwrap().alpha.radians(), FRAC_PI_4);
    }

    #[test]
    fn schedule_examples() {
        let s3 = angle_schedule(3).unwrap();
        assert!((s3.entries[0].alpha.radians() - (1.0 / 3f64.sqrt()).acos()).abs() < 1e-15);
        assert_eq!(s3.entries[1].alpha.radians(), FRAC_PI_4);
        let s4 = angle_schedule(4).unwrap();
        assert!((s4.entries[0].plate_angle.degrees() - 15.0).abs() < 1e-12);
        let s200 = angle_schedule(200).unwrap();
        assert!((s200.entries[0].plate_angle.degrees() - 21.486).abs() < 0.001);
    }

    #[test]
    fn small_sizes_rejected() {
        for n in [0, 1, 2] {
            assert!(matches!(build_w_circuit(n), Err(Error::UnsupportedSize(_))));
            assert!(matches!(
                predicted_counts(n),
                Err(Error::UnsupportedSize(_))
            ));
            assert!(matches!(angle_schedule(n), Err(Error::UnsupportedSize(_))));
        }
    }
}
