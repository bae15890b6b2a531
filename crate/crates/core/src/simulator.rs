//! Real-amplitude statevector simulation.
//!
//! Two backends share one [`QuantumState`] type:
//!
//! * **dense** stores all `2^n` amplitudes and is limited to small registers
//!   (24 qubits by default);
//! * **sparse** stores only nonzero amplitudes, each as a packed row of bits,
//!   together with per-qubit bitsets over the stored rows. Controlled gates
//!   find the rows whose control is V a word at a time, so a CNOT costs
//!   O(entries / 64 + entries touched).
//!
//! All gate matrices are real, so amplitudes are stored as `f64`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use smallvec::SmallVec;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::numfmt::format_sig;

pub const DEFAULT_DENSE_CAP: usize = 24;
pub const DEFAULT_SPARSE_CAP: usize = 10_000;
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-15;
/// `auto` picks dense up to this many qubits.
pub const DEFAULT_AUTO_DENSE_MAX: usize = 20;

/// Digits of amplitudes in state dumps.
pub const AMPLITUDE_DIGITS: usize = 17;

/// Computational basis state as the sorted 1-based positions holding V.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BasisKey(SmallVec<[u32; 4]>);

impl BasisKey {
    pub fn from_positions(mut positions: Vec<u32>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        BasisKey(SmallVec::from_vec(positions))
    }

    pub fn single(position: u32) -> Self {
        BasisKey(SmallVec::from_slice(&[position]))
    }

    pub fn positions(&self) -> &[u32] {
        &self.0
    }

    pub fn contains(&self, qubit: u32) -> bool {
        self.0.binary_search(&qubit).is_ok()
    }

    /// Parses `H`/`V` or `0`/`1` characters; mode 1 comes first.
    pub fn parse(n_qubits: usize, bits: &str) -> Result<Self> {
        let chars: Vec<char> = bits.chars().collect();
        if chars.len() != n_qubits {
            return Err(Error::parse(
                0,
                format!(
                    "basis string {bits:?} has length {}, expected {n_qubits}",
                    chars.len()
                ),
            ));
        }
        let mut positions = Vec::new();
        for (i, ch) in chars.iter().enumerate() {
            match ch {
                'H' | '0' => {}
                'V' | '1' => positions.push(i as u32 + 1),
                other => {
                    return Err(Error::parse(
                        0,
                        format!("bad basis character {other:?} in {bits:?}"),
                    ))
                }
            }
        }
        Ok(BasisKey(SmallVec::from_vec(positions)))
    }

    pub fn to_bitstring(&self, n_qubits: usize) -> String {
        let mut s = vec![b'0'; n_qubits];
        for &q in &self.0 {
            s[q as usize - 1] = b'1';
        }
        String::from_utf8(s).expect("ascii")
    }

    pub fn index(&self, n_qubits: usize) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &q| acc | (1usize << (n_qubits - q as usize)))
    }

    pub fn from_index(n_qubits: usize, index: usize) -> Self {
        let positions = (1..=n_qubits as u32)
            .filter(|&q| index & (1usize << (n_qubits - q as usize)) != 0)
            .collect();
        BasisKey(positions)
    }

    /// Lexicographic order of the `0`/`1` bitstrings.
    pub fn cmp_bitstring(&self, other: &Self) -> Ordering {
        // first position where the sets differ decides; whoever has it is larger
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a != b {
                return b.cmp(a);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Dense,
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Dense,
    Sparse,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dense_cap: usize,
    pub sparse_cap: usize,
    /// Sparse entries with `|a|` below this are dropped after mixing gates.
    pub prune_threshold: f64,
    pub auto_dense_max: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dense_cap: DEFAULT_DENSE_CAP,
            sparse_cap: DEFAULT_SPARSE_CAP,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            auto_dense_max: DEFAULT_AUTO_DENSE_MAX,
        }
    }
}

impl SimConfig {
    pub fn resolve(&self, n_qubits: usize, choice: BackendChoice) -> Backend {
        match choice {
            BackendChoice::Dense => Backend::Dense,
            BackendChoice::Sparse => Backend::Sparse,
            BackendChoice::Auto if n_qubits <= self.auto_dense_max => Backend::Dense,
            BackendChoice::Auto => Backend::Sparse,
        }
    }

    fn check(&self, n_qubits: usize, backend: Backend) -> Result<()> {
        let (what, cap) = match backend {
            Backend::Dense => ("dense backend", self.dense_cap),
            Backend::Sparse => ("sparse backend", self.sparse_cap),
        };
        if n_qubits > cap {
            return Err(Error::Capacity {
                what,
                n: n_qubits,
                cap,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    amps: Vec<f64>,
}

impl DenseState {
    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    fn apply(&mut self, gate: &Gate) {
        let n = self.n_qubits;
        let tmask = gate.target().mask(n);
        let cmask = gate.control().map_or(0, |c| c.mask(n));
        match *gate {
            Gate::Cnot { .. } => {
                for i in 0..self.amps.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amps.swap(i, i | tmask);
                    }
                }
            }
            Gate::Cz { .. } => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & cmask != 0 && i & tmask != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::F { alpha, .. } | Gate::Rot { alpha, .. } => {
                let (s, c) = alpha.radians().sin_cos();
                for i in 0..self.amps.len() {
                    // cmask is 0 for ROT, so the control test always passes
                    if i & cmask == cmask && i & tmask == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | tmask]);
                        self.amps[i] = c * a0 + s * a1;
                        self.amps[i | tmask] = s * a0 - c * a1;
                    }
                }
            }
        }
    }
}

/// Sparse amplitudes in a slot table.
///
/// Each live slot holds one basis state as a packed row of bits (bit `q-1`
/// is qubit `q`) and its amplitude. `cols[q]` is a bitset over slots marking
/// the rows with qubit `q` set, so a CNOT is a word-parallel xor of two
/// columns plus one bit flip per affected row, and never needs a lookup: it
/// only permutes basis states. Mixing gates pair rows that differ in the
/// target bit by sorting the candidates.
#[derive(Debug, Clone)]
pub struct SparseState {
    n_qubits: usize,
    /// `u64` words per row.
    words: usize,
    rows: Vec<u64>,
    /// Amplitude per slot; free slots hold 0.
    amps: Vec<f64>,
    live: Vec<u64>,
    /// Index 0 unused.
    cols: Vec<Vec<u64>>,
    free: Vec<usize>,
    len: usize,
    prune_threshold: f64,
}

#[inline]
fn bit(q: u32) -> (usize, u64) {
    let i = q as usize - 1;
    (i / 64, 1u64 << (i % 64))
}

fn set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut m = word;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(w * 64 + b)
        })
    })
}

impl SparseState {
    fn empty(n_qubits: usize, prune_threshold: f64) -> Self {
        SparseState {
            n_qubits,
            words: n_qubits.div_ceil(64),
            rows: Vec::new(),
            amps: Vec::new(),
            live: Vec::new(),
            cols: vec![Vec::new(); n_qubits + 1],
            free: Vec::new(),
            len: 0,
            prune_threshold,
        }
    }

    fn row(&self, slot: usize) -> &[u64] {
        &self.rows[slot * self.words..(slot + 1) * self.words]
    }

    fn key_of(&self, slot: usize) -> BasisKey {
        BasisKey(set_bits(self.row(slot)).map(|i| i as u32 + 1).collect())
    }

    fn row_of(&self, key: &BasisKey) -> Vec<u64> {
        let mut row = vec![0u64; self.words];
        for &q in key.positions() {
            let (w, m) = bit(q);
            row[w] |= m;
        }
        row
    }

    /// Live slots with their amplitudes, in slot order.
    fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        set_bits(&self.live)
    }

    /// Nonzero amplitudes in key order.
    pub fn entries(&self) -> Vec<(BasisKey, f64)> {
        let mut out: Vec<(BasisKey, f64)> = self
            .slots()
            .map(|s| (self.key_of(s), self.amps[s]))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn find(&self, row: &[u64]) -> Option<usize> {
        self.slots().find(|&s| self.row(s) == row)
    }

    fn amplitude(&self, key: &BasisKey) -> f64 {
        self.find(&self.row_of(key)).map_or(0.0, |s| self.amps[s])
    }

    fn insert(&mut self, row: &[u64], amp: f64) {
        let slot = match self.free.pop() {
            Some(s) => s,
            None => {
                let s = self.amps.len();
                self.amps.push(0.0);
                self.rows.resize(self.rows.len() + self.words, 0);
                if s.is_multiple_of(64) {
                    self.live.push(0);
                    for col in &mut self.cols {
                        col.push(0);
                    }
                }
                s
            }
        };
        let (w, m) = (slot / 64, 1u64 << (slot % 64));
        self.live[w] |= m;
        self.rows[slot * self.words..(slot + 1) * self.words].copy_from_slice(row);
        for i in set_bits(row) {
            self.cols[i + 1][w] |= m;
        }
        self.amps[slot] = amp;
        self.len += 1;
    }

    fn release(&mut self, slot: usize) {
        let (w, m) = (slot / 64, 1u64 << (slot % 64));
        self.live[w] &= !m;
        let range = slot * self.words..(slot + 1) * self.words;
        for i in set_bits(&self.rows[range.clone()]) {
            self.cols[i + 1][w] &= !m;
        }
        self.rows[range].fill(0);
        self.amps[slot] = 0.0;
        self.free.push(slot);
        self.len -= 1;
    }

    /// Sets the amplitude of `row`, dropping it below the prune threshold.
    fn set(&mut self, row: &[u64], amp: f64) {
        match self.find(row) {
            Some(s) if amp.abs() < self.prune_threshold => self.release(s),
            Some(s) => self.amps[s] = amp,
            None if amp.abs() < self.prune_threshold => {}
            None => self.insert(row, amp),
        }
    }

    fn apply(&mut self, gate: &Gate) {
        let t = gate.target().get();
        match *gate {
            Gate::Cnot { control, .. } => {
                let c = control.get() as usize;
                let (tw, tm) = bit(t);
                for w in 0..self.live.len() {
                    let m = self.cols[c][w];
                    if m == 0 {
                        continue;
                    }
                    self.cols[t as usize][w] ^= m;
                    for b in set_bits(&[m]) {
                        self.rows[(w * 64 + b) * self.words + tw] ^= tm;
                    }
                }
            }
            Gate::Cz { control, .. } => {
                let c = control.get() as usize;
                for w in 0..self.live.len() {
                    let m = self.cols[c][w] & self.cols[t as usize][w];
                    for b in set_bits(&[m]) {
                        self.amps[w * 64 + b] = -self.amps[w * 64 + b];
                    }
                }
            }
            Gate::F { control, alpha, .. } => {
                let candidates: Vec<usize> = set_bits(&self.cols[control.get() as usize]).collect();
                self.mix(candidates, t, alpha.radians());
            }
            Gate::Rot { alpha, .. } => {
                let candidates: Vec<usize> = self.slots().collect();
                self.mix(candidates, t, alpha.radians());
            }
        }
    }

    fn mix(&mut self, mut candidates: Vec<usize>, target: u32, alpha: f64) {
        let (s, c) = alpha.sin_cos();
        let (tw, tm) = bit(target);
        let words = self.words;
        // clear the target bit so partners compare equal, remembering who had it
        let had: Vec<bool> = candidates
            .iter()
            .map(|&slot| {
                let cell = &mut self.rows[slot * words + tw];
                let v = *cell & tm != 0;
                *cell &= !tm;
                v
            })
            .collect();
        let had_target: std::collections::HashMap<usize, bool> =
            candidates.iter().copied().zip(had).collect();
        candidates.sort_by(|&a, &b| self.row(a).cmp(self.row(b)));

        let mut groups: Vec<(Option<usize>, Option<usize>)> = Vec::new();
        let mut i = 0;
        while i < candidates.len() {
            let a = candidates[i];
            let pair = i + 1 < candidates.len() && self.row(candidates[i + 1]) == self.row(a);
            let (mut s0, mut s1) = (None, None);
            for &slot in &candidates[i..i + 1 + pair as usize] {
                if had_target[&slot] {
                    s1 = Some(slot);
                } else {
                    s0 = Some(slot);
                }
            }
            groups.push((s0, s1));
            i += 1 + pair as usize;
        }
        // restore rows before any slot is released or reused
        for (&slot, &v) in &had_target {
            if v {
                self.rows[slot * words + tw] |= tm;
            }
        }

        for (s0, s1) in groups {
            let a0 = s0.map_or(0.0, |x| self.amps[x]);
            let a1 = s1.map_or(0.0, |x| self.amps[x]);
            let mut base = self.row(s0.or(s1).expect("nonempty group")).to_vec();
            base[tw] &= !tm;
            let b0 = c * a0 + s * a1;
            let b1 = s * a0 - c * a1;
            self.update(s0, &base, b0);
            base[tw] |= tm;
            self.update(s1, &base, b1);
        }
    }

    fn update(&mut self, slot: Option<usize>, row: &[u64], amp: f64) {
        let keep = amp.abs() >= self.prune_threshold;
        match slot {
            Some(x) if keep => self.amps[x] = amp,
            Some(x) => self.release(x),
            None if keep => self.insert(row, amp),
            None => {}
        }
    }
}

impl PartialEq for SparseState {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.entries() == other.entries()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Dense(DenseState),
    Sparse(SparseState),
}

impl QuantumState {
    /// Basis state `bits` (`H`/`V` or `0`/`1`) on the requested backend.
    pub fn basis(
        n_qubits: usize,
        bits: &str,
        backend: Backend,
        config: &SimConfig,
    ) -> Result<Self> {
        let key = BasisKey::parse(n_qubits, bits)?;
        QuantumState::from_entries(n_qubits, vec![(key, 1.0)], backend, config)
    }

    /// Builds a state from explicit amplitudes. Entries are not normalised.
    pub fn from_entries(
        n_qubits: usize,
        entries: Vec<(BasisKey, f64)>,
        backend: Backend,
        config: &SimConfig,
    ) -> Result<Self> {
        if n_qubits < 1 {
            return Err(Error::TooFewQubits(n_qubits));
        }
        config.check(n_qubits, backend)?;
        for (k, _) in &entries {
            if let Some(&q) = k.positions().last() {
                if q as usize > n_qubits || k.positions()[0] == 0 {
                    return Err(Error::QubitOutOfRange { index: q, n_qubits });
                }
            }
        }
        Ok(match backend {
            Backend::Dense => {
                let mut amps = vec![0.0; 1usize << n_qubits];
                for (k, a) in entries {
                    amps[k.index(n_qubits)] = a;
                }
                QuantumState::Dense(DenseState { n_qubits, amps })
            }
            Backend::Sparse => {
                let mut s = SparseState::empty(n_qubits, config.prune_threshold);
                for (k, a) in entries {
                    let row = s.row_of(&k);
                    s.set(&row, a);
                }
                QuantumState::Sparse(s)
            }
        })
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            QuantumState::Dense(d) => d.n_qubits,
            QuantumState::Sparse(s) => s.n_qubits,
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            QuantumState::Dense(_) => Backend::Dense,
            QuantumState::Sparse(_) => Backend::Sparse,
        }
    }

    pub fn amplitude(&self, key: &BasisKey) -> f64 {
        match self {
            QuantumState::Dense(d) => d.amps[key.index(d.n_qubits)],
            QuantumState::Sparse(s) => s.amplitude(key),
        }
    }

    pub fn amplitude_of(&self, bits: &str) -> Result<f64> {
        Ok(self.amplitude(&BasisKey::parse(self.n_qubits(), bits)?))
    }

    /// Nonzero amplitudes in key order.
    pub fn entries(&self) -> Vec<(BasisKey, f64)> {
        match self {
            QuantumState::Dense(d) => d
                .amps
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0.0)
                .map(|(i, &a)| (BasisKey::from_index(d.n_qubits, i), a))
                .collect::<BTreeMap<_, _>>()
                .into_iter()
                .collect(),
            QuantumState::Sparse(s) => s.entries(),
        }
    }

    /// Number of stored nonzero amplitudes.
    pub fn nnz(&self) -> usize {
        match self {
            QuantumState::Dense(d) => d.amps.iter().filter(|a| **a != 0.0).count(),
            QuantumState::Sparse(s) => s.len,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match self {
            QuantumState::Dense(d) => d.amps.iter().map(|a| a * a).sum(),
            QuantumState::Sparse(s) => s.amps.iter().map(|a| a * a).sum(),
        }
    }

    fn check_gate(&self, gate: &Gate) -> Result<()> {
        let n = self.n_qubits();
        for q in gate.control().into_iter().chain([gate.target()]) {
            if q.get() as usize > n {
                return Err(Error::QubitOutOfRange {
                    index: q.get(),
                    n_qubits: n,
                });
            }
        }
        Ok(())
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        self.check_gate(gate)?;
        match self {
            QuantumState::Dense(d) => d.apply(gate),
            QuantumState::Sparse(s) => s.apply(gate),
        }
        Ok(())
    }

    pub fn to_backend(&self, backend: Backend, config: &SimConfig) -> Result<Self> {
        if backend == self.backend() {
            return Ok(self.clone());
        }
        QuantumState::from_entries(self.n_qubits(), self.entries(), backend, config)
    }

    /// `<bitstring> <amplitude>` lines sorted by descending `|amplitude|`, then
    /// by bitstring. Magnitudes are compared at 12 significant digits so that
    /// amplitudes equal up to rounding keep bitstring order. Entries below
    /// `threshold` in magnitude are omitted.
    pub fn dump(&self, threshold: f64) -> String {
        let n = self.n_qubits();
        let mut rows: Vec<(BasisKey, f64, f64)> = self
            .entries()
            .into_iter()
            .filter(|(_, a)| a.abs() >= threshold && *a != 0.0)
            .map(|(k, a)| {
                let rounded: f64 = format_sig(a.abs(), 12).parse().expect("decimal");
                (k, a, rounded)
            })
            .collect();
        rows.sort_by(|x, y| y.2.total_cmp(&x.2).then_with(|| x.0.cmp_bitstring(&y.0)));
        let mut out = String::new();
        for (k, a, _) in rows {
            writeln!(
                out,
                "{} {}",
                k.to_bitstring(n),
                format_sig(a, AMPLITUDE_DIGITS)
            )
            .unwrap();
        }
        out
    }
}

/// Runs circuits under a fixed [`SimConfig`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Simulator {
    pub config: SimConfig,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Self {
        Simulator { config }
    }

    pub fn basis_state(
        &self,
        n_qubits: usize,
        bits: &str,
        choice: BackendChoice,
    ) -> Result<QuantumState> {
        let backend = self.config.resolve(n_qubits, choice);
        QuantumState::basis(n_qubits, bits, backend, &self.config)
    }

    pub fn run(&self, circuit: &Circuit, input: &QuantumState) -> Result<QuantumState> {
        self.run_observed(circuit, input, |_, _, _| {})
    }

    /// Like [`Simulator::run`], calling `observe(step, gate, state)` after each
    /// gate (`step` is 0-based).
    pub fn run_observed<F>(
        &self,
        circuit: &Circuit,
        input: &QuantumState,
        mut observe: F,
    ) -> Result<QuantumState>
    where
        F: FnMut(usize, &Gate, &QuantumState),
    {
        if circuit.n_qubits() != input.n_qubits() {
            return Err(Error::SizeMismatch(circuit.n_qubits(), input.n_qubits()));
        }
        self.config.check(input.n_qubits(), input.backend())?;
        let mut state = input.clone();
        for (step, gate) in circuit.gates().iter().enumerate() {
            state.apply(gate)?;
            observe(step, gate, &state);
        }
        Ok(state)
    }
}

/// Sparse basis state with default limits.
pub fn basis_state(n_qubits: usize, bits: &str) -> Result<QuantumState> {
    QuantumState::basis(n_qubits, bits, Backend::Sparse, &SimConfig::default())
}

pub fn apply_gate(state: &QuantumState, gate: &Gate) -> Result<QuantumState> {
    let mut next = state.clone();
    next.apply(gate)?;
    Ok(next)
}

pub fn run(circuit: &Circuit, input: &QuantumState) -> Result<QuantumState> {
    Simulator::default().run(circuit, input)
}

/// `|<a|b>|^2`, capped at 1 to absorb rounding.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::SizeMismatch(a.n_qubits(), b.n_qubits()));
    }
    let overlap: f64 = match (a, b) {
        (QuantumState::Dense(x), QuantumState::Dense(y)) => {
            x.amps.iter().zip(&y.amps).map(|(p, q)| p * q).sum()
        }
        (QuantumState::Dense(_), QuantumState::Sparse(_)) => {
            b.entries().iter().map(|(k, y)| y * a.amplitude(k)).sum()
        }
        (QuantumState::Sparse(_), QuantumState::Dense(_)) => {
            a.entries().iter().map(|(k, x)| x * b.amplitude(k)).sum()
        }
        (QuantumState::Sparse(_), QuantumState::Sparse(_)) => {
            let other: HashMap<BasisKey, f64> = b.entries().into_iter().collect();
            a.entries()
                .iter()
                .map(|(k, x)| x * other.get(k).copied().unwrap_or(0.0))
                .sum()
        }
    };
    Ok((overlap * overlap).min(1.0))
}

/// `(1/sqrt n) * sum_k |e_k>` as a sparse state.
pub fn w_reference(n_qubits: usize) -> Result<QuantumState> {
    w_reference_on(n_qubits, Backend::Sparse, &SimConfig::default())
}

pub fn w_reference_on(
    n_qubits: usize,
    backend: Backend,
    config: &SimConfig,
) -> Result<QuantumState> {
    if n_qubits < 2 {
        return Err(Error::TooFewQubits(n_qubits));
    }
    let amp = 1.0 / (n_qubits as f64).sqrt();
    let entries = (1..=n_qubits as u32)
        .map(|q| (BasisKey::single(q), amp))
        .collect();
    QuantumState::from_entries(n_qubits, entries, backend, config)
}
