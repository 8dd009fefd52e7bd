//! Brute-force reference computations, kept free of the network code so they
//! can check it.

use crate::automata::TransitionTable;

/// A stored two-part context (or neuron weight) in plain `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredContext {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().fold(0.0, |acc, &c| acc + c * c).sqrt();
    if n > 0.0 {
        v.iter().map(|&c| c / n).collect()
    } else {
        vec![0.0; v.len()]
    }
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (&p, &q)| acc + p * q)
}

/// `ṫ·ż + ḃ·ẋ` with every part scaled to unit length.
pub fn match_score(stored: &StoredContext, z: &[f64], x: &[f64]) -> f64 {
    inner(&unit(&stored.z), &unit(z)) + inner(&unit(&stored.x), &unit(x))
}

/// Index of the stored context that best matches `(z, x)`; the lowest index
/// wins ties. `None` when nothing is stored.
pub fn oracle_nearest_context(stored: &[StoredContext], z: &[f64], x: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in stored.iter().enumerate() {
        let s = match_score(c, z, x);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

/// Next-state lookup straight from the table rows, by token.
pub fn lookup_next<'a>(table: &'a TransitionTable, state: &str, input: &str) -> Option<&'a str> {
    let q = table.states().index_of(state).ok()?;
    let s = table.inputs().index_of(input).ok()?;
    table.states().token(table.step(q, s).ok()?).ok()
}

/// State sequence of the table on `word` from `start`, one entry per symbol.
pub fn run_lookup<'a>(
    table: &'a TransitionTable,
    start: &str,
    word: &[&str],
) -> Option<Vec<&'a str>> {
    let mut q = table
        .states()
        .token(table.states().index_of(start).ok()?)
        .ok()?;
    let mut out = Vec::with_capacity(word.len());
    for s in word {
        q = lookup_next(table, q, s)?;
        out.push(q);
    }
    Some(out)
}
