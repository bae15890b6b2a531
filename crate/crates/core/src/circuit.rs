//! Gates, circuits, lowering levels and exact real gate matrices.
//!
//! Qubits are 1-based spatial modes. Basis states use H = 0 and V = 1 with
//! mode 1 as the most significant bit, so the basis index of a bitstring
//! `b_1 b_2 ... b_n` is `sum b_i * 2^(n - i)`.
//!
//! Every rotation is parameterised by the mixing angle `alpha`:
//!
//! ```text
//! R(alpha) = | cos alpha   sin alpha |
//!            | sin alpha  -cos alpha |
//! ```
//!
//! A half-wave plate at plate angle `phi` implements `R(2 phi)`. A standalone
//! `ROT(alpha)` is therefore one plate at `alpha / 2`, and an `F(alpha)` gate
//! built from `R(alpha/2) . CZ . R(alpha/2)` uses two plates at `alpha / 4`.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest register `unitary_of` will expand by default.
pub const DEFAULT_UNITARY_CAP: usize = 10;

/// 1-based qubit (spatial mode) number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitIndex(u32);

impl QubitIndex {
    pub fn new(value: u32) -> Result<Self> {
        if value == 0 {
            return Err(Error::QubitOutOfRange {
                index: 0,
                n_qubits: 0,
            });
        }
        Ok(QubitIndex(value))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Bit mask of this qubit inside an `n`-qubit basis index.
    pub fn mask(self, n_qubits: usize) -> usize {
        1usize << (n_qubits - self.0 as usize)
    }

    pub(crate) fn shifted(self, by: u32) -> Self {
        QubitIndex(self.0 + by)
    }
}

impl fmt::Display for QubitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Mixing angle in radians. Always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Result<Self> {
        if radians.is_finite() {
            Ok(Angle(radians))
        } else {
            Err(Error::InvalidAngle(radians))
        }
    }

    pub fn from_degrees(degrees: f64) -> Result<Self> {
        Angle::new(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    F,
    Cnot,
    Cz,
    Rot,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::F => "F",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Rot => "ROT",
        }
    }

    pub fn is_two_qubit(self) -> bool {
        !matches!(self, GateKind::Rot)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate of the W-state toolkit's fixed gate set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Controlled rotation: identity when the control is H, `R(alpha)` on the
    /// target when the control is V.
    F {
        control: QubitIndex,
        target: QubitIndex,
        alpha: Angle,
    },
    Cnot {
        control: QubitIndex,
        target: QubitIndex,
    },
    Cz {
        control: QubitIndex,
        target: QubitIndex,
    },
    /// Single-qubit `R(alpha)`, one half-wave plate at `alpha / 2`.
    Rot { qubit: QubitIndex, alpha: Angle },
}

fn pair(control: u32, target: u32) -> Result<(QubitIndex, QubitIndex)> {
    let c = QubitIndex::new(control)?;
    let t = QubitIndex::new(target)?;
    if c == t {
        return Err(Error::SameControlTarget(control));
    }
    Ok((c, t))
}

impl Gate {
    pub fn f(control: u32, target: u32, alpha: f64) -> Result<Self> {
        let (control, target) = pair(control, target)?;
        Ok(Gate::F {
            control,
            target,
            alpha: Angle::new(alpha)?,
        })
    }

    pub fn cnot(control: u32, target: u32) -> Result<Self> {
        let (control, target) = pair(control, target)?;
        Ok(Gate::Cnot { control, target })
    }

    pub fn cz(control: u32, target: u32) -> Result<Self> {
        let (control, target) = pair(control, target)?;
        Ok(Gate::Cz { control, target })
    }

    pub fn rot(qubit: u32, alpha: f64) -> Result<Self> {
        Ok(Gate::Rot {
            qubit: QubitIndex::new(qubit)?,
            alpha: Angle::new(alpha)?,
        })
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::F { .. } => GateKind::F,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cz { .. } => GateKind::Cz,
            Gate::Rot { .. } => GateKind::Rot,
        }
    }

    pub fn control(&self) -> Option<QubitIndex> {
        match *self {
            Gate::F { control, .. } | Gate::Cnot { control, .. } | Gate::Cz { control, .. } => {
                Some(control)
            }
            Gate::Rot { .. } => None,
        }
    }

    pub fn target(&self) -> QubitIndex {
        match *self {
            Gate::F { target, .. } | Gate::Cnot { target, .. } | Gate::Cz { target, .. } => target,
            Gate::Rot { qubit, .. } => qubit,
        }
    }

    pub fn angle(&self) -> Option<Angle> {
        match *self {
            Gate::F { alpha, .. } | Gate::Rot { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    /// Same gate with every qubit index moved up by `by`.
    pub fn shifted(&self, by: u32) -> Gate {
        match *self {
            Gate::F {
                control,
                target,
                alpha,
            } => Gate::F {
                control: control.shifted(by),
                target: target.shifted(by),
                alpha,
            },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: control.shifted(by),
                target: target.shifted(by),
            },
            Gate::Cz { control, target } => Gate::Cz {
                control: control.shifted(by),
                target: target.shifted(by),
            },
            Gate::Rot { qubit, alpha } => Gate::Rot {
                qubit: qubit.shifted(by),
                alpha,
            },
        }
    }

    fn max_qubit(&self) -> u32 {
        self.control()
            .map_or(0, QubitIndex::get)
            .max(self.target().get())
    }
}

/// How far a circuit has been lowered towards half-wave plates and cNOTs.
///
/// Ordered so that `Composite > CzLevel > Elementary`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Elementary,
    CzLevel,
    Composite,
}

impl Level {
    pub fn allows(self, kind: GateKind) -> bool {
        match self {
            Level::Composite => matches!(kind, GateKind::F | GateKind::Cnot),
            Level::CzLevel => matches!(kind, GateKind::Rot | GateKind::Cz | GateKind::Cnot),
            Level::Elementary => matches!(kind, GateKind::Rot | GateKind::Cnot),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::Composite => "COMPOSITE",
            Level::CzLevel => "CZ_LEVEL",
            Level::Elementary => "ELEMENTARY",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-kind gate tally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub f: usize,
    pub cnot: usize,
    pub cz: usize,
    pub rot: usize,
}

impl GateCounts {
    pub fn add(&mut self, gate: &Gate) {
        match gate.kind() {
            GateKind::F => self.f += 1,
            GateKind::Cnot => self.cnot += 1,
            GateKind::Cz => self.cz += 1,
            GateKind::Rot => self.rot += 1,
        }
    }

    pub fn two_qubit(&self) -> usize {
        self.f + self.cnot + self.cz
    }

    pub fn total(&self) -> usize {
        self.two_qubit() + self.rot
    }
}

impl<'a> FromIterator<&'a Gate> for GateCounts {
    fn from_iter<I: IntoIterator<Item = &'a Gate>>(iter: I) -> Self {
        let mut counts = GateCounts::default();
        for g in iter {
            counts.add(g);
        }
        counts
    }
}

/// Qubit count plus an ordered gate list (first element applied first).
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    level: Level,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>, level: Level) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::TooFewQubits(n_qubits));
        }
        for g in &gates {
            if !level.allows(g.kind()) {
                return Err(Error::GateNotAllowed {
                    gate: g.kind().name(),
                    level,
                });
            }
            let max = g.max_qubit();
            if max as usize > n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: max,
                    n_qubits,
                });
            }
            if let Some(c) = g.control() {
                if c == g.target() {
                    return Err(Error::SameControlTarget(c.get()));
                }
            }
        }
        Ok(Circuit {
            n_qubits,
            gates,
            level,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn counts(&self) -> GateCounts {
        self.gates.iter().collect()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Copy of this circuit with the gate list replaced; re-validated.
    pub fn with_gates(&self, gates: Vec<Gate>) -> Result<Self> {
        Circuit::new(self.n_qubits, gates, self.level)
    }
}

/// Real orthogonal matrix of a 1- or 2-qubit gate.
///
/// Basis order is `|00>, |01>, |10>, |11>` with the control as the left bit.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix(DMatrix<f64>);

impl GateMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Largest entry of `|M^T M - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let dim = self.dim();
        let gram = self.0.transpose() * &self.0;
        (gram - DMatrix::<f64>::identity(dim, dim)).amax()
    }
}

/// `R(alpha) = [[cos a, sin a], [sin a, -cos a]]`.
pub fn rotation_matrix(alpha: f64) -> Result<GateMatrix> {
    let alpha = Angle::new(alpha)?;
    Ok(GateMatrix(rotation(alpha)))
}

fn rotation(alpha: Angle) -> DMatrix<f64> {
    let (s, c) = alpha.radians().sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, s, s, -c])
}

pub fn gate_matrix(gate: &Gate) -> GateMatrix {
    match *gate {
        Gate::Rot { alpha, .. } => GateMatrix(rotation(alpha)),
        Gate::F { alpha, .. } => {
            let mut m = DMatrix::<f64>::identity(4, 4);
            m.view_mut((2, 2), (2, 2)).copy_from(&rotation(alpha));
            GateMatrix(m)
        }
        Gate::Cnot { .. } => GateMatrix(DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )),
        Gate::Cz { .. } => GateMatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0, 1.0, 1.0, -1.0,
        ]))),
    }
}

/// Multiplies the embedded gate into one column of a `2^n`-dimensional
/// vector, using the gate matrix entries directly.
fn apply_embedded(gate: &Gate, m: &GateMatrix, n_qubits: usize, column: &mut [f64]) {
    let tmask = gate.target().mask(n_qubits);
    match gate.control() {
        None => {
            for base in 0..column.len() {
                if base & tmask != 0 {
                    continue;
                }
                let v = [column[base], column[base | tmask]];
                column[base] = m.get(0, 0) * v[0] + m.get(0, 1) * v[1];
                column[base | tmask] = m.get(1, 0) * v[0] + m.get(1, 1) * v[1];
            }
        }
        Some(c) => {
            let cmask = c.mask(n_qubits);
            for base in 0..column.len() {
                if base & (cmask | tmask) != 0 {
                    continue;
                }
                let idx = [base, base | tmask, base | cmask, base | cmask | tmask];
                let v = idx.map(|i| column[i]);
                for (row, &i) in idx.iter().enumerate() {
                    column[i] = (0..4).map(|k| m.get(row, k) * v[k]).sum();
                }
            }
        }
    }
}

/// Full `2^n x 2^n` matrix of one gate inside an `n`-qubit register.
pub fn embed(gate: &Gate, n_qubits: usize) -> Result<DMatrix<f64>> {
    check_cap(n_qubits, DEFAULT_UNITARY_CAP)?;
    let dim = 1usize << n_qubits;
    let m = gate_matrix(gate);
    let mut u = DMatrix::<f64>::identity(dim, dim);
    for col in u.as_mut_slice().chunks_mut(dim) {
        apply_embedded(gate, &m, n_qubits, col);
    }
    Ok(u)
}

fn check_cap(n_qubits: usize, cap: usize) -> Result<()> {
    if n_qubits > cap {
        return Err(Error::Capacity {
            what: "unitary",
            n: n_qubits,
            cap,
        });
    }
    Ok(())
}

/// Brute-force circuit unitary: `G_k ... G_2 G_1` for gates applied in list
/// order. Refuses registers above [`DEFAULT_UNITARY_CAP`] qubits.
pub fn unitary_of(circuit: &Circuit) -> Result<DMatrix<f64>> {
    unitary_of_capped(circuit, DEFAULT_UNITARY_CAP)
}

pub fn unitary_of_capped(circuit: &Circuit, cap: usize) -> Result<DMatrix<f64>> {
    let n = circuit.n_qubits();
    check_cap(n, cap)?;
    let dim = 1usize << n;
    let mut u = DMatrix::<f64>::identity(dim, dim);
    for gate in circuit.gates() {
        let m = gate_matrix(gate);
        // column-major storage: each chunk is one column of U
        for col in u.as_mut_slice().chunks_mut(dim) {
            apply_embedded(gate, &m, n, col);
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn assert_close(m: &GateMatrix, expected: &[f64], tol: f64) {
        let dim = m.dim();
        for r in 0..dim {
            for c in 0..dim {
                let e = expected[r * dim + c];
                assert!(
                    (m.get(r, c) - e).abs() <= tol,
                    "entry ({r},{c}) = {} expected {e}",
                    m.get(r, c)
                );
            }
        }
    }

    #[test]
    fn rotation_special_angles() {
        assert_close(&rotation_matrix(0.0).unwrap(), &[1.0, 0.0, 0.0, -1.0], 0.0);
        let h = FRAC_1_SQRT_2;
        assert_close(
            &rotation_matrix(FRAC_PI_4).unwrap(),
            &[h, h, h, -h],
            2.0 * f64::EPSILON,
        );
        assert_close(
            &rotation_matrix(FRAC_PI_2).unwrap(),
            &[0.0, 1.0, 1.0, 0.0],
            2.0 * f64::EPSILON,
        );
    }

    #[test]
    fn rotation_rejects_non_finite() {
        assert_eq!(
            rotation_matrix(f64::NAN).unwrap_err().to_string(),
            Error::InvalidAngle(f64::NAN).to_string()
        );
        assert!(rotation_matrix(f64::INFINITY).is_err());
    }

    #[test]
    fn cz_and_cnot_matrices() {
        let cz = gate_matrix(&Gate::cz(1, 2).unwrap());
        let mut diag = [0.0; 16];
        for (i, d) in [1.0, 1.0, 1.0, -1.0].iter().enumerate() {
            diag[i * 5] = *d;
        }
        assert_close(&cz, &diag, 0.0);

        let cnot = gate_matrix(&Gate::cnot(1, 2).unwrap());
        assert_eq!(cnot.get(2, 3), 1.0);
        assert_eq!(cnot.get(3, 2), 1.0);
        assert_eq!(cnot.get(2, 2), 0.0);
    }

    #[test]
    fn f_at_quarter_pi_is_controlled_hadamard() {
        let f = gate_matrix(&Gate::f(1, 2, FRAC_PI_4).unwrap());
        let h = FRAC_1_SQRT_2;
        #[rustfmt::skip]
        let expected = [
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, h, h,
            0.0, 0.0, h, -h,
        ];
        // sin(pi/4) and 1/sqrt(2) differ in the last bit
        assert_close(&f, &expected, 2.0 * f64::EPSILON);
    }

    #[test]
    fn f_block_for_three_qubit_split() {
        let alpha = (1.0 / 3f64.sqrt()).acos();
        let f = gate_matrix(&Gate::f(1, 2, alpha).unwrap());
        let a = 1.0 / 3f64.sqrt();
        let b = (2.0f64 / 3.0).sqrt();
        assert!((f.get(2, 2) - a).abs() < 1e-15);
        assert!((f.get(2, 3) - b).abs() < 1e-15);
        assert!((f.get(3, 2) - b).abs() < 1e-15);
        assert!((f.get(3, 3) + a).abs() < 1e-15);
    }

    #[test]
    fn gate_constructors_validate() {
        assert!(matches!(Gate::cnot(2, 2), Err(Error::SameControlTarget(2))));
        assert!(Gate::cz(0, 1).is_err());
        assert!(Gate::f(1, 2, f64::NAN).is_err());
        assert!(Gate::rot(1, 0.3).is_ok());
    }

    #[test]
    fn circuit_validates_levels_and_indices() {
        let f = Gate::f(1, 2, 0.5).unwrap();
        let rot = Gate::rot(1, 0.5).unwrap();
        assert!(Circuit::new(2, vec![f], Level::Composite).is_ok());
        assert!(matches!(
            Circuit::new(2, vec![rot], Level::Composite),
            Err(Error::GateNotAllowed { .. })
        ));
        assert!(matches!(
            Circuit::new(2, vec![f], Level::Elementary),
            Err(Error::GateNotAllowed { .. })
        ));
        assert!(matches!(
            Circuit::new(2, vec![Gate::cnot(1, 3).unwrap()], Level::Composite),
            Err(Error::QubitOutOfRange { index: 3, .. })
        ));
        assert!(matches!(
            Circuit::new(1, vec![], Level::Composite),
            Err(Error::TooFewQubits(1))
        ));
    }

    #[test]
    fn empty_circuit_unitary_is_identity() {
        let c = Circuit::new(2, vec![], Level::Composite).unwrap();
        let u = unitary_of(&c).unwrap();
        assert_eq!(u, DMatrix::identity(4, 4));
    }

    #[test]
    fn single_cnot_unitary_swaps_10_and_11() {
        let c = Circuit::new(2, vec![Gate::cnot(1, 2).unwrap()], Level::Composite).unwrap();
        let u = unitary_of(&c).unwrap();
        let mut expected = DMatrix::<f64>::identity(4, 4);
        expected.swap_columns(2, 3);
        assert_eq!(u, expected);
    }

    #[test]
    fn cnot_with_control_below_target() {
        // CNOT(2,1) on 2 qubits: |01> <-> |11>
        let c = Circuit::new(2, vec![Gate::cnot(2, 1).unwrap()], Level::Composite).unwrap();
        let u = unitary_of(&c).unwrap();
        assert_eq!(u[(3, 1)], 1.0);
        assert_eq!(u[(1, 3)], 1.0);
        assert_eq!(u[(0, 0)], 1.0);
        assert_eq!(u[(2, 2)], 1.0);
    }

    #[test]
    fn unitary_cap_is_enforced() {
        let c = Circuit::new(11, vec![], Level::Composite).unwrap();
        assert!(unitary_of(&c).unwrap_err().is_capacity());
        assert!(unitary_of_capped(&c, 11).is_ok());
    }
}
