//! Symbolic teacher machines: deterministic transition tables, learned input
//! successors, and grand-table composition of several task controls.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("{kind} index {index} out of range (size {size})")]
    IndexOutOfRange {
        kind: SymbolKind,
        index: usize,
        size: usize,
    },
    #[error("empty {0} token")]
    EmptyToken(SymbolKind),
    #[error("duplicate {kind} token `{token}`")]
    DuplicateToken { kind: SymbolKind, token: String },
    #[error("unknown {kind} `{token}`")]
    UnknownSymbol { kind: SymbolKind, token: String },
    #[error("transition table is not total: expected {expected} entries, found {found}")]
    NotTotal { expected: usize, found: usize },
    #[error("duplicate switch input `{0}`")]
    DuplicateSwitch(String),
    #[error("switch input `{switch}` refers to task {task}, but only {tasks} tasks were given")]
    MissingEntryState {
        switch: String,
        task: usize,
        tasks: usize,
    },
    #[error("task `{0}` does not share the common input alphabet")]
    AlphabetMismatch(String),
    #[error("switch input `{0}` collides with a task input")]
    SwitchCollision(String),
    #[error("invalid machine: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Input,
    State,
}

impl std::fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymbolKind::Input => f.write_str("input"),
            SymbolKind::State => f.write_str("state"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub token: String,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn new(token: impl Into<String>, kind: SymbolKind) -> Result<Self, AutomataError> {
        let token = token.into();
        if token.is_empty() {
            return Err(AutomataError::EmptyToken(kind));
        }
        Ok(Self { token, kind })
    }
}

/// Ordered, interned set of symbols of one kind. Index order is insertion
/// order, which is also file order for tables read from disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    kind: SymbolKind,
    symbols: Vec<Symbol>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        kind: SymbolKind,
        tokens: impl IntoIterator<Item = S>,
    ) -> Result<Self, AutomataError> {
        let mut symbols = Vec::new();
        let mut index = HashMap::new();
        for token in tokens {
            let sym = Symbol::new(token, kind)?;
            if index.insert(sym.token.clone(), symbols.len()).is_some() {
                return Err(AutomataError::DuplicateToken {
                    kind,
                    token: sym.token,
                });
            }
            symbols.push(sym);
        }
        Ok(Self {
            kind,
            symbols,
            index,
        })
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(|s| s.token.as_str())
    }

    pub fn index_of(&self, token: &str) -> Result<usize, AutomataError> {
        self.index
            .get(token)
            .copied()
            .ok_or_else(|| AutomataError::UnknownSymbol {
                kind: self.kind,
                token: token.to_string(),
            })
    }

    pub fn token(&self, index: usize) -> Result<&str, AutomataError> {
        self.check(index).map(|i| self.symbols[i].token.as_str())
    }

    pub fn check(&self, index: usize) -> Result<usize, AutomataError> {
        if index < self.symbols.len() {
            Ok(index)
        } else {
            Err(AutomataError::IndexOutOfRange {
                kind: self.kind,
                index,
                size: self.symbols.len(),
            })
        }
    }
}

/// A deterministic control δ: Q × Σ → Q stored as a dense row-major table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    states: Alphabet,
    inputs: Alphabet,
    entries: Vec<usize>,
}

impl TransitionTable {
    /// Builds a table from already-interned alphabets and a row-major list
    /// of target state indices.
    pub fn from_indices(
        states: Alphabet,
        inputs: Alphabet,
        entries: Vec<usize>,
    ) -> Result<Self, AutomataError> {
        let expected = states.len() * inputs.len();
        if entries.len() != expected {
            return Err(AutomataError::NotTotal {
                expected,
                found: entries.len(),
            });
        }
        for &e in &entries {
            states.check(e)?;
        }
        Ok(Self {
            states,
            inputs,
            entries,
        })
    }

    /// Builds a table from token lists; `rows[i][j]` names δ(states[i], inputs[j]).
    pub fn from_tokens<S, I, R, E>(states: S, inputs: I, rows: R) -> Result<Self, AutomataError>
    where
        S: IntoIterator,
        S::Item: Into<String>,
        I: IntoIterator,
        I::Item: Into<String>,
        R: IntoIterator,
        R::Item: IntoIterator<Item = E>,
        E: AsRef<str>,
    {
        let states = Alphabet::new(SymbolKind::State, states)?;
        let inputs = Alphabet::new(SymbolKind::Input, inputs)?;
        let mut entries = Vec::with_capacity(states.len() * inputs.len());
        let mut rows_seen = 0;
        for row in rows {
            rows_seen += 1;
            let mut cols = 0;
            for target in row {
                cols += 1;
                entries.push(states.index_of(target.as_ref())?);
            }
            if cols != inputs.len() {
                return Err(AutomataError::NotTotal {
                    expected: states.len() * inputs.len(),
                    found: entries.len(),
                });
            }
        }
        if rows_seen != states.len() {
            return Err(AutomataError::NotTotal {
                expected: states.len() * inputs.len(),
                found: entries.len(),
            });
        }
        Self::from_indices(states, inputs, entries)
    }

    pub fn states(&self) -> &Alphabet {
        &self.states
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    /// Row-major target indices.
    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn state_index(&self, token: &str) -> Result<usize, AutomataError> {
        self.states.index_of(token)
    }

    pub fn input_index(&self, token: &str) -> Result<usize, AutomataError> {
        self.inputs.index_of(token)
    }

    /// One transition δ(q, s).
    pub fn step(&self, q: usize, s: usize) -> Result<usize, AutomataError> {
        self.states.check(q)?;
        self.inputs.check(s)?;
        Ok(self.entries[q * self.inputs.len() + s])
    }

    /// Runs the table from `q0` over `word`, returning the state reached after
    /// each input (the start state is not included).
    pub fn run(&self, q0: usize, word: &[usize]) -> Result<Vec<usize>, AutomataError> {
        let mut q = self.states.check(q0)?;
        word.iter()
            .map(|&s| {
                q = self.step(q, s)?;
                Ok(q)
            })
            .collect()
    }

    /// Token-level convenience over [`TransitionTable::run`].
    pub fn run_tokens<'a>(
        &'a self,
        q0: &str,
        word: &[&str],
    ) -> Result<Vec<&'a str>, AutomataError> {
        let q0 = self.state_index(q0)?;
        let word = word
            .iter()
            .map(|s| self.input_index(s))
            .collect::<Result<Vec<_>, _>>()?;
        self.run(q0, &word)?
            .into_iter()
            .map(|q| self.states.token(q))
            .collect()
    }

    /// Row-major `(state, input, next)` index triples.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let c = self.inputs.len();
        self.entries
            .iter()
            .enumerate()
            .map(move |(i, &next)| (i / c, i % c, next))
    }

    /// Target tokens grouped by row, the layout of the table file format.
    pub fn rows(&self) -> Vec<Vec<String>> {
        let c = self.inputs.len().max(1);
        self.entries
            .chunks(c)
            .take(self.states.len())
            .map(|row| {
                row.iter()
                    .map(|&q| self.states.symbols()[q].token.clone())
                    .collect()
            })
            .collect()
    }
}

/// Observed input successors: which inputs followed each `(state, input)`
/// context during teaching.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuccessorModel {
    next: BTreeMap<(usize, usize), BTreeSet<usize>>,
}

impl SuccessorModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, q: usize, s: usize, s_next: usize) {
        self.next.entry((q, s)).or_default().insert(s_next);
    }

    /// Records every consecutive pair of a teaching sequence of
    /// `(state, input)` contexts.
    pub fn record_sequence(&mut self, contexts: &[(usize, usize)]) {
        for pair in contexts.windows(2) {
            let (q, s) = pair[0];
            self.record(q, s, pair[1].1);
        }
    }

    pub fn successors(&self, q: usize, s: usize) -> BTreeSet<usize> {
        self.next.get(&(q, s)).cloned().unwrap_or_default()
    }

    /// True when `(q, s)` has exactly one observed successor.
    pub fn is_mature(&self, q: usize, s: usize) -> bool {
        self.next.get(&(q, s)).is_some_and(|n| n.len() == 1)
    }
}

/// One task of a grand table: a tag naming the task context, the task's
/// own control, and the state a switch into this task lands on.
#[derive(Debug, Clone)]
pub struct GrandTask {
    pub tag: String,
    pub table: TransitionTable,
    pub entry_state: usize,
}

/// A switch input and the index of the task it selects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchInput {
    pub token: String,
    pub task: usize,
}

/// Token for a tagged grand state, e.g. `(q1,q_T)`.
pub fn grand_state_token(tag: &str, state: &str) -> String {
    format!("({tag},{state})")
}

/// Composes task controls into one grand table.
///
/// Grand states are `(tag, state)` pairs in task order. Inputs are the
/// switch inputs followed by the shared task alphabet (taken in the first
/// task's order). A switch into the task already running is a self-loop;
/// a switch into another task jumps to that task's entry state.
pub fn compose_grand(
    tasks: &[GrandTask],
    switches: &[SwitchInput],
) -> Result<TransitionTable, AutomataError> {
    let Some(first) = tasks.first() else {
        return Err(AutomataError::Malformed("no tasks to compose".into()));
    };

    let mut seen = BTreeSet::new();
    for sw in switches {
        if !seen.insert(sw.token.as_str()) {
            return Err(AutomataError::DuplicateSwitch(sw.token.clone()));
        }
        if sw.task >= tasks.len() {
            return Err(AutomataError::MissingEntryState {
                switch: sw.token.clone(),
                task: sw.task,
                tasks: tasks.len(),
            });
        }
    }

    let shared: Vec<&str> = first.table.inputs().tokens().collect();
    let shared_set: BTreeSet<&str> = shared.iter().copied().collect();
    for task in tasks {
        task.table.states().check(task.entry_state)?;
        let own: BTreeSet<&str> = task.table.inputs().tokens().collect();
        if own != shared_set {
            return Err(AutomataError::AlphabetMismatch(task.tag.clone()));
        }
    }
    if let Some(sw) = switches
        .iter()
        .find(|sw| shared_set.contains(sw.token.as_str()))
    {
        return Err(AutomataError::SwitchCollision(sw.token.clone()));
    }

    // offset of each task's first grand state
    let mut offsets = Vec::with_capacity(tasks.len());
    let mut state_tokens = Vec::new();
    for task in tasks {
        offsets.push(state_tokens.len());
        for s in task.table.states().tokens() {
            state_tokens.push(grand_state_token(&task.tag, s));
        }
    }
    let input_tokens: Vec<String> = switches
        .iter()
        .map(|s| s.token.clone())
        .chain(shared.iter().map(|s| s.to_string()))
        .collect();

    let states = Alphabet::new(SymbolKind::State, state_tokens)?;
    let inputs = Alphabet::new(SymbolKind::Input, input_tokens)?;

    let mut entries = Vec::with_capacity(states.len() * inputs.len());
    for (t, task) in tasks.iter().enumerate() {
        // column permutation from shared order into this task's order
        let cols = shared
            .iter()
            .map(|tok| task.table.input_index(tok))
            .collect::<Result<Vec<_>, _>>()?;
        for q in 0..task.table.num_states() {
            for sw in switches {
                entries.push(if sw.task == t {
                    offsets[t] + q
                } else {
                    offsets[sw.task] + tasks[sw.task].entry_state
                });
            }
            for &c in &cols {
                entries.push(offsets[t] + task.table.step(q, c)?);
            }
        }
    }

    TransitionTable::from_indices(states, inputs, entries)
}
