//! Turing-machine controls and their lowering to Agent FA controls.
//!
//! A TM control δ: Q × Γ → Q × Γ × D becomes an Agent FA over the extended
//! state set Q' = Q × Γ × D by letting δ'((q, γ, d), γ') = δ(q, γ'). The
//! lowered control never looks at the (γ, d) part of its source state, which
//! is what makes it attentive.

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, AutomataError, SymbolKind, TransitionTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    R,
    L,
    S,
}

impl Move {
    pub const ALL: [Move; 3] = [Move::R, Move::L, Move::S];

    pub fn index(self) -> usize {
        match self {
            Move::R => 0,
            Move::L => 1,
            Move::S => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Move::R => "R",
            Move::L => "L",
            Move::S => "S",
        }
    }
}

/// Right-hand side of one TM transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TmAction {
    pub state: usize,
    pub write: usize,
    pub head: Move,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmControl {
    states: Alphabet,
    tape: Alphabet,
    delta: Vec<TmAction>,
}

impl TmControl {
    /// `delta[q * |Γ| + γ]` is δ(q, γ).
    pub fn new(
        states: Alphabet,
        tape: Alphabet,
        delta: Vec<TmAction>,
    ) -> Result<Self, AutomataError> {
        let expected = states.len() * tape.len();
        if delta.len() != expected {
            return Err(AutomataError::NotTotal {
                expected,
                found: delta.len(),
            });
        }
        for a in &delta {
            states.check(a.state)?;
            tape.check(a.write)?;
        }
        Ok(Self {
            states,
            tape,
            delta,
        })
    }

    /// Views an FA as a read-only, right-moving TM whose tape alphabet is the
    /// FA's input alphabet: δ(q, σ) = (δ_FA(q, σ), σ, R).
    pub fn read_only(table: &TransitionTable) -> Self {
        let delta = table
            .transitions()
            .map(|(_, s, next)| TmAction {
                state: next,
                write: s,
                head: Move::R,
            })
            .collect();
        Self {
            states: table.states().clone(),
            tape: Alphabet::new(SymbolKind::Input, table.inputs().tokens())
                .expect("table alphabet is already valid"),
            delta,
        }
    }

    pub fn states(&self) -> &Alphabet {
        &self.states
    }

    pub fn tape_alphabet(&self) -> &Alphabet {
        &self.tape
    }

    pub fn delta(&self, q: usize, gamma: usize) -> Result<TmAction, AutomataError> {
        self.states.check(q)?;
        self.tape.check(gamma)?;
        Ok(self.delta[q * self.tape.len() + gamma])
    }

    /// Runs the control over a finite tape starting at cell 0 until the head
    /// leaves the tape or `max_steps` transitions have been taken. Returns the
    /// state after each transition.
    pub fn run_tape(
        &self,
        q0: usize,
        tape: &mut [usize],
        max_steps: usize,
    ) -> Result<Vec<usize>, AutomataError> {
        let mut q = self.states.check(q0)?;
        let mut head = 0usize;
        let mut trace = Vec::new();
        while head < tape.len() && trace.len() < max_steps {
            let a = self.delta(q, tape[head])?;
            tape[head] = a.write;
            q = a.state;
            trace.push(q);
            match a.head {
                Move::R => head += 1,
                Move::S => {}
                Move::L => match head.checked_sub(1) {
                    Some(h) => head = h,
                    None => break,
                },
            }
        }
        Ok(trace)
    }
}

/// An extended Agent FA state (q, γ, d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtendedState {
    pub state: usize,
    pub symbol: usize,
    pub head: Move,
}

/// Agent FA control over Q × Γ × D, total over extended states × Γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentFaControl {
    num_states: usize,
    num_symbols: usize,
    entries: Vec<ExtendedState>,
}

impl AgentFaControl {
    pub fn num_extended_states(&self) -> usize {
        self.num_states * self.num_symbols * Move::ALL.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.num_symbols
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    /// Dense index of an extended state: `(q * |Γ| + γ) * |D| + d`.
    pub fn extended_index(&self, e: ExtendedState) -> usize {
        (e.state * self.num_symbols + e.symbol) * Move::ALL.len() + e.head.index()
    }

    pub fn extended_states(&self) -> impl Iterator<Item = ExtendedState> + '_ {
        (0..self.num_states).flat_map(move |state| {
            (0..self.num_symbols).flat_map(move |symbol| {
                Move::ALL.into_iter().map(move |head| ExtendedState {
                    state,
                    symbol,
                    head,
                })
            })
        })
    }

    pub fn step(&self, from: ExtendedState, input: usize) -> Result<ExtendedState, AutomataError> {
        if from.state >= self.num_states || from.symbol >= self.num_symbols {
            return Err(AutomataError::Malformed(format!(
                "extended state {from:?} outside Q×Γ×D"
            )));
        }
        if input >= self.num_symbols {
            return Err(AutomataError::IndexOutOfRange {
                kind: SymbolKind::Input,
                index: input,
                size: self.num_symbols,
            });
        }
        Ok(self.entries[self.extended_index(from) * self.num_symbols + input])
    }

    /// Symbolic rendering as a [`TransitionTable`] with states named
    /// `(q,γ,d)` and the tape alphabet as inputs.
    pub fn to_table(&self, tm: &TmControl) -> Result<TransitionTable, AutomataError> {
        let name = |e: ExtendedState| -> Result<String, AutomataError> {
            Ok(format!(
                "({},{},{})",
                tm.states().token(e.state)?,
                tm.tape_alphabet().token(e.symbol)?,
                e.head.as_str()
            ))
        };
        let states = Alphabet::new(
            SymbolKind::State,
            self.extended_states()
                .map(name)
                .collect::<Result<Vec<_>, _>>()?,
        )?;
        let inputs = Alphabet::new(SymbolKind::Input, tm.tape_alphabet().tokens())?;
        let entries = self
            .entries
            .iter()
            .map(|&e| self.extended_index(e))
            .collect();
        TransitionTable::from_indices(states, inputs, entries)
    }
}

/// Lowers a TM control to its Agent FA form.
pub fn tm_to_agent_fa(tm: &TmControl) -> AgentFaControl {
    let num_states = tm.states.len();
    let num_symbols = tm.tape.len();
    let mut entries = Vec::with_capacity(num_states * num_symbols * Move::ALL.len() * num_symbols);
    for q in 0..num_states {
        for _written in 0..num_symbols {
            for _head in Move::ALL {
                for read in 0..num_symbols {
                    let a = tm.delta[q * num_symbols + read];
                    entries.push(ExtendedState {
                        state: a.state,
                        symbol: a.write,
                        head: a.head,
                    });
                }
            }
        }
    }
    AgentFaControl {
        num_states,
        num_symbols,
        entries,
    }
}
