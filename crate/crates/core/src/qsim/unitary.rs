//! Coherent decoders: `|y>_A |t>_B -> |y>_A |t + D(y)>_B` and its
//! message-uniform variant.

use num_complex::Complex64;

use super::state::QuantumState;
use crate::codes::LinearCode;
use crate::config::Budget;
use crate::decode::Decoder;
use crate::error::{Error, Result};
use crate::galois::vector::{add_indices, encode_index, sub_indices};
use crate::galois::{ComplexFunction, Direction};

/// Which registers of a state the unitary acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterMap {
    /// Received word, `n` coordinates.
    pub word: usize,
    /// Message output, `k` coordinates.
    pub message: usize,
    /// Shift register used only by the symmetrized form, `k` coordinates.
    pub shift: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderUnitary {
    q: u32,
    n: usize,
    k: usize,
    table: Vec<usize>,
    codeword_index: Vec<usize>,
    symmetrized: bool,
}

impl DecoderUnitary {
    /// From a decoding table mapping each received-word index to a message index.
    pub fn from_table(code: &LinearCode, table: Vec<usize>) -> Result<Self> {
        let (q, n, k) = (code.q(), code.n(), code.k());
        let words = (q as usize).pow(n as u32);
        let messages = (q as usize).pow(k as u32);
        if table.len() != words {
            return Err(Error::LengthMismatch { expected: words, got: table.len() });
        }
        if let Some(bad) = table.iter().find(|&&m| m >= messages) {
            return Err(Error::InvalidParameter(format!("table entry {bad} is not a message index")));
        }
        let codeword_index = (0..messages).map(|m| encode_index(&code.encode_index(m), q)).collect();
        Ok(Self { q, n, k, table, codeword_index, symmetrized: false })
    }

    pub fn from_decoder(decoder: &Decoder, budget: &Budget) -> Result<Self> {
        Self::from_table(decoder.code(), decoder.table(budget)?)
    }

    /// The shift-averaged version: superpose shifts `t`, translate the word
    /// by `tG`, decode, subtract `t`.
    pub fn symmetrized(&self) -> Self {
        Self { symmetrized: true, ..self.clone() }
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Register dimensions `[word, message]` or `[word, message, shift]`.
    pub fn dims(&self) -> Vec<usize> {
        if self.symmetrized {
            vec![self.n, self.k, self.k]
        } else {
            vec![self.n, self.k]
        }
    }

    /// The default map for a state laid out as [`Self::dims`].
    pub fn default_map(&self) -> RegisterMap {
        RegisterMap { word: 0, message: 1, shift: self.symmetrized.then_some(2) }
    }

    fn shift_register(&self, map: RegisterMap) -> usize {
        map.shift.expect("symmetrized unitary needs a shift register")
    }

    /// Row `c` maps each target value `t` to its source `t - sign * shift(c)`.
    fn shift_table(&self, rows: usize, target_digits: usize, shift: impl Fn(usize) -> usize, forward: bool) -> Vec<usize> {
        let (q, size) = (self.q, (self.q as usize).pow(target_digits as u32));
        let mut table = Vec::with_capacity(rows * size);
        for c in 0..rows {
            let d = shift(c);
            table.extend((0..size).map(|t| {
                if forward {
                    sub_indices(t, d, target_digits, q)
                } else {
                    add_indices(t, d, target_digits, q)
                }
            }));
        }
        table
    }

    /// `message += sign * D(word)`.
    fn add_decoded(&self, state: &mut QuantumState, map: RegisterMap, forward: bool) {
        let table = self.shift_table(self.table.len(), self.k, |a| self.table[a], forward);
        state.permute_register(map.message, map.word, &table);
    }

    /// `word += sign * shift G`.
    fn translate_word(&self, state: &mut QuantumState, map: RegisterMap, forward: bool) {
        let cw = &self.codeword_index;
        let table = self.shift_table(cw.len(), self.n, |t| cw[t], forward);
        state.permute_register(map.word, self.shift_register(map), &table);
    }

    /// `message -= sign * shift`.
    fn subtract_shift(&self, state: &mut QuantumState, map: RegisterMap, forward: bool) {
        let table = self.shift_table(self.codeword_index.len(), self.k, |t| t, !forward);
        state.permute_register(map.message, self.shift_register(map), &table);
    }

    pub fn apply(&self, state: &mut QuantumState, map: RegisterMap) {
        if !self.symmetrized {
            self.add_decoded(state, map, true);
            return;
        }
        let sr = self.shift_register(map);
        state.fourier(sr, Direction::Forward);
        self.translate_word(state, map, true);
        self.add_decoded(state, map, true);
        self.subtract_shift(state, map, true);
    }

    pub fn apply_adjoint(&self, state: &mut QuantumState, map: RegisterMap) {
        if !self.symmetrized {
            self.add_decoded(state, map, false);
            return;
        }
        let sr = self.shift_register(map);
        self.subtract_shift(state, map, false);
        self.add_decoded(state, map, false);
        self.translate_word(state, map, false);
        state.fourier(sr, Direction::Inverse);
    }

    /// `|psi_s>|0...>` laid out as [`Self::dims`], with `f` the error amplitudes.
    pub fn code_state(&self, f: &ComplexFunction, s: usize, budget: &Budget) -> Result<QuantumState> {
        let mut state = QuantumState::zeros(self.q, &self.dims(), budget)?;
        let l = state.layout();
        let c = self.codeword_index[s];
        for (e, &amp) in f.amps.iter().enumerate() {
            let y = add_indices(c, e, self.n, self.q);
            state.amps_mut()[y * l.stride(0)] = amp;
        }
        Ok(state)
    }

    /// Diagonal amplitudes `gamma_{s,s} = <psi_s, 0| U^dagger |psi~_{s,s}, s>`
    /// for every message `s`.
    pub fn diagonal_gammas(&self, f: &ComplexFunction, budget: &Budget) -> Result<Vec<Complex64>> {
        let map = self.default_map();
        let messages = self.codeword_index.len();
        let mut out = Vec::with_capacity(messages);
        for s in 0..messages {
            let input = self.code_state(f, s, budget)?;
            let mut state = input.clone();
            self.apply(&mut state, map);
            let kept = state.project(map.message, s);
            if kept <= 0.0 {
                out.push(Complex64::new(0.0, 0.0));
                continue;
            }
            state.scale(1.0 / kept.sqrt());
            self.apply_adjoint(&mut state, map);
            out.push(input.inner(&state));
        }
        Ok(out)
    }
}
