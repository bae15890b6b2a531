//! Resource counts, success probabilities, photon-source rates, plate-angle
//! and gate-growth tables, and plate-angle sensitivity sweeps.
//!
//! Probabilities are carried as `log10` values: `(1/9)^5048` is far below the
//! smallest `f64`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Angle, Gate, GateCounts, GateKind, Level};
use crate::error::{Error, Result};
use crate::lowering::lower_gate_into;
use crate::numfmt::format_sig;
use crate::simulator::{fidelity, w_reference_on, BackendChoice, SimConfig, Simulator};
use crate::synthesis::{
    build_w_circuit, predicted_counts, split_angle, w_circuit_gates, CountPrediction,
};

/// Success probability of one linear-optics cNOT.
pub const LINEAR_OPTICS_CNOT_PROB: f64 = 1.0 / 9.0;
/// Extra-pair rate of a down-conversion source.
pub const DEFAULT_PDC_DELTA: f64 = 1e-4;
/// Sweeps classify a point as failed below this fidelity.
pub const DEFAULT_FAILURE_THRESHOLD: f64 = 0.99;
/// Linear probabilities smaller than this are reported only in log10 form.
pub const MIN_LINEAR_PROBABILITY: f64 = 1e-300;
/// Significant digits of report values.
pub const REPORT_DIGITS: usize = 12;

/// Largest `n` for which `resource_report` rebuilds and lowers the circuit.
pub const MAX_REPORT_QUBITS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceReport {
    pub n: usize,
    pub counts: CountPrediction,
    /// Counted on the synthesized COMPOSITE circuit.
    pub actual_counts: GateCounts,
    /// cNOTs after lowering to ELEMENTARY.
    pub elementary_cnots: usize,
    pub gate_success_prob: f64,
    pub log10_success_probability: f64,
}

impl ResourceReport {
    /// Linear success probability, or `None` where it would underflow.
    pub fn success_probability(&self) -> Option<f64> {
        let p = 10f64.powf(self.log10_success_probability);
        (p >= MIN_LINEAR_PROBABILITY).then_some(p)
    }
}

pub fn resource_report(n: usize, gate_success_prob: f64) -> Result<ResourceReport> {
    if !(gate_success_prob > 0.0 && gate_success_prob <= 1.0) {
        return Err(Error::param(
            "p",
            format!("{gate_success_prob} is not in (0, 1]"),
        ));
    }
    let counts = predicted_counts(n)?;
    if n > MAX_REPORT_QUBITS {
        return Err(Error::Capacity {
            what: "resource report",
            n,
            cap: MAX_REPORT_QUBITS,
        });
    }

    let mut actual_counts = GateCounts::default();
    let mut elementary_cnots = 0;
    let mut scratch: Vec<Gate> = Vec::with_capacity(5);
    for gate in w_circuit_gates(n)? {
        actual_counts.add(&gate);
        scratch.clear();
        lower_gate_into(&gate, Level::Elementary, &mut scratch);
        elementary_cnots += scratch
            .iter()
            .filter(|g| g.kind() == GateKind::Cnot)
            .count();
    }
    assert_eq!(actual_counts.two_qubit(), counts.total_two_qubit);
    assert_eq!(actual_counts.f, counts.f_gates);
    assert_eq!(actual_counts.cnot, counts.cnot_gates);
    assert_eq!(elementary_cnots, counts.total_two_qubit);

    Ok(ResourceReport {
        n,
        counts,
        actual_counts,
        elementary_cnots,
        gate_success_prob,
        log10_success_probability: elementary_cnots as f64 * gate_success_prob.log10(),
    })
}

/// Single-photon source by parametric down-conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdcModel {
    /// Per-photon generation rate.
    pub gamma: f64,
    /// Rate of an unwanted extra pair.
    pub delta: f64,
}

impl PdcModel {
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::param("gamma", format!("{gamma} is not in (0, 1]")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", format!("{delta} is not in (0, 1)")));
        }
        Ok(PdcModel { gamma, delta })
    }

    pub fn with_gamma(gamma: f64) -> Result<Self> {
        PdcModel::new(gamma, DEFAULT_PDC_DELTA)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdcRates {
    /// `log10(gamma^n)`.
    pub log10_desired: f64,
    /// `log10(gamma^n * delta)`.
    pub log10_error: f64,
}

pub fn pdc_rates(n: usize, model: &PdcModel) -> Result<PdcRates> {
    if n < 3 {
        return Err(Error::UnsupportedSize(n));
    }
    let model = PdcModel::new(model.gamma, model.delta)?;
    let log10_desired = n as f64 * model.gamma.log10();
    Ok(PdcRates {
        log10_desired,
        log10_error: log10_desired + model.delta.log10(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateAngleRow {
    pub n: usize,
    /// Mixing angle of the first F gate.
    pub alpha_deg: f64,
    /// `alpha / 4`: the first half-wave plate.
    pub plate_angle_deg: f64,
}

/// First-plate angle `(1/4) acos(1/sqrt n)` for `n = 3..=n_max`.
pub fn plate_angle_table(n_max: usize) -> Vec<PlateAngleRow> {
    (3..=n_max)
        .map(|n| {
            let alpha = split_angle(n).to_degrees();
            PlateAngleRow {
                n,
                alpha_deg: alpha,
                plate_angle_deg: alpha / 4.0,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthRow {
    pub n: usize,
    pub total: usize,
    pub f_count: usize,
    pub cnot_count: usize,
}

pub fn gate_growth_table(n_max: usize) -> Vec<GrowthRow> {
    (3..=n_max)
        .map(|n| {
            let p = predicted_counts(n).expect("n >= 3");
            GrowthRow {
                n,
                total: p.total_two_qubit,
                f_count: p.f_gates,
                cnot_count: p.cnot_gates,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityRecord {
    pub n: usize,
    /// Control qubit `j` of the perturbed `F(j, j+1)`.
    pub perturbed_gate_position: usize,
    pub delta_plate_angle_deg: f64,
    pub fidelity: f64,
}

impl SensitivityRecord {
    pub fn failed(&self, threshold: f64) -> bool {
        self.fidelity < threshold
    }
}

/// Shifts the plates of `F(j, j+1)` by each `delta` (degrees) and reports
/// the fidelity of the resulting state with `W_n`.
///
/// A plate shift of `d` moves the mixing angle by `4 d`. Records come back
/// sorted by `delta`.
pub fn angle_sensitivity(
    n: usize,
    gate_position: usize,
    deltas_deg: &[f64],
    backend: BackendChoice,
    config: &SimConfig,
) -> Result<Vec<SensitivityRecord>> {
    if let Some(bad) = deltas_deg.iter().find(|d| !d.is_finite()) {
        return Err(Error::param("delta", format!("{bad} is not finite")));
    }
    let circuit = build_w_circuit(n)?;
    let slot = circuit
        .gates()
        .iter()
        .position(|g| {
            g.kind() == GateKind::F && g.control().map(|c| c.get() as usize) == Some(gate_position)
        })
        .ok_or(Error::UnknownGatePosition(gate_position))?;

    let sim = Simulator::new(*config);
    let backend = config.resolve(n, backend);
    let input_bits: String = std::iter::once('V')
        .chain(std::iter::repeat_n('H', n - 1))
        .collect();
    let input = crate::simulator::QuantumState::basis(n, &input_bits, backend, config)?;
    let reference = w_reference_on(n, backend, config)?;

    let mut records = deltas_deg
        .par_iter()
        .map(|&delta| {
            let mut gates = circuit.gates().to_vec();
            if let Gate::F { alpha, .. } = &mut gates[slot] {
                *alpha = Angle::new(alpha.radians() + 4.0 * delta.to_radians())?;
            }
            let perturbed = circuit.with_gates(gates)?;
            let out = sim.run(&perturbed, &input)?;
            Ok(SensitivityRecord {
                n,
                perturbed_gate_position: gate_position,
                delta_plate_angle_deg: delta,
                fidelity: fidelity(&out, &reference)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.delta_plate_angle_deg.total_cmp(&b.delta_plate_angle_deg));
    Ok(records)
}

fn num(x: f64) -> String {
    format_sig(x, REPORT_DIGITS)
}

fn round_sig(x: f64) -> f64 {
    num(x).parse().expect("decimal")
}

pub fn plate_angle_csv(rows: &[PlateAngleRow]) -> String {
    let mut out = String::from("n,alpha_deg,plate_angle_deg\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            r.n,
            num(r.alpha_deg),
            num(r.plate_angle_deg)
        )
        .unwrap();
    }
    out
}

pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut out = String::from("n,total,f_count,cnot_count\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", r.n, r.total, r.f_count, r.cnot_count).unwrap();
    }
    out
}

pub fn sensitivity_csv(records: &[SensitivityRecord], failure_threshold: f64) -> String {
    let mut out = String::from("n,gate_position,delta_plate_deg,fidelity,failed\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            r.perturbed_gate_position,
            num(r.delta_plate_angle_deg),
            num(r.fidelity),
            r.failed(failure_threshold)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Serialize)]
struct CountsJson {
    total: usize,
    f: usize,
    cnot: usize,
}

#[derive(Debug, Serialize)]
struct PdcJson {
    gamma: f64,
    delta: f64,
    log10_desired: f64,
    log10_error: f64,
}

#[derive(Debug, Serialize)]
struct ReportJson {
    n: usize,
    counts: CountsJson,
    elementary_cnots: usize,
    gate_success_prob: f64,
    log10_success_probability: f64,
    success_probability: Option<f64>,
    pdc: Option<PdcJson>,
}

/// JSON document for `analyze`. Keys keep a fixed order; values are rounded
/// to 12 significant digits.
pub fn report_json(report: &ResourceReport, pdc: Option<(&PdcModel, &PdcRates)>) -> String {
    let doc = ReportJson {
        n: report.n,
        counts: CountsJson {
            total: report.counts.total_two_qubit,
            f: report.counts.f_gates,
            cnot: report.counts.cnot_gates,
        },
        elementary_cnots: report.elementary_cnots,
        gate_success_prob: round_sig(report.gate_success_prob),
        log10_success_probability: round_sig(report.log10_success_probability),
        success_probability: report.success_probability().map(round_sig),
        pdc: pdc.map(|(m, r)| PdcJson {
            gamma: round_sig(m.gamma),
            delta: round_sig(m.delta),
            log10_desired: round_sig(r.log10_desired),
            log10_error: round_sig(r.log10_error),
        }),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}
