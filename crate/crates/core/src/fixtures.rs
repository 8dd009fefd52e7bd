//! Built-in teacher machines: the logic-AND evaluator (task 1), the
//! even/odd input counter (task 3), and their grand composition.

use std::collections::BTreeMap;

use crate::automata::{compose_grand, GrandTask, SwitchInput, TransitionTable};
use crate::codec::GroundingMap;
use crate::scalar::Scalar;
use crate::table_file::TableDocument;

pub const TASK1_STATES: [&str; 6] = ["q0", "q_T", "q_F", "q_T∧", "q_F∧", "q_-"];
pub const TASK1_INPUTS: [&str; 3] = ["T", "F", "∧"];
pub const TASK1_ROWS: [[&str; 3]; 6] = [
    ["q_T", "q_F", "q_-"],
    ["q_-", "q_-", "q_T∧"],
    ["q_-", "q_-", "q_F∧"],
    ["q_T", "q_F", "q_-"],
    ["q_F", "q_F", "q_-"],
    ["q_-", "q_-", "q_-"],
];
pub const TASK1_STATE_CODES: [&str; 6] = ["001", "010", "011", "100", "101", "110"];
pub const INPUT_CODES: [&str; 3] = ["010", "011", "100"];

pub const TASK3_STATES: [&str; 2] = ["qe", "qo"];
pub const TASK3_ROWS: [[&str; 3]; 2] = [["qo", "qo", "qo"], ["qe", "qe", "qe"]];
/// Task 3 alone reuses its grand-table state codes.
pub const TASK3_STATE_CODES: [&str; 2] = ["11000", "11001"];

pub const SWITCHES: [(&str, &str); 2] = [("s1", "101"), ("s3", "111")];
pub const GRAND_STATE_CODES: [&str; 8] = [
    "01001", "01010", "01011", "01100", "01101", "01110", "11000", "11001",
];

/// The symbolic grand table, rows in state order, columns `s1 s3 T F ∧`.
pub const GRAND_ROWS: [[&str; 5]; 8] = [
    ["(q1,q0)", "(q3,qe)", "(q1,q_T)", "(q1,q_F)", "(q1,q_-)"],
    ["(q1,q_T)", "(q3,qe)", "(q1,q_-)", "(q1,q_-)", "(q1,q_T∧)"],
    ["(q1,q_F)", "(q3,qe)", "(q1,q_-)", "(q1,q_-)", "(q1,q_F∧)"],
    ["(q1,q_T∧)", "(q3,qe)", "(q1,q_T)", "(q1,q_F)", "(q1,q_-)"],
    ["(q1,q_F∧)", "(q3,qe)", "(q1,q_F)", "(q1,q_F)", "(q1,q_-)"],
    ["(q1,q_-)", "(q3,qe)", "(q1,q_-)", "(q1,q_-)", "(q1,q_-)"],
    ["(q1,q0)", "(q3,qe)", "(q3,qo)", "(q3,qo)", "(q3,qo)"],
    ["(q1,q0)", "(q3,qo)", "(q3,qe)", "(q3,qe)", "(q3,qe)"],
];

/// The pattern-only grand table: state code and next-state codes for
/// inputs `101 111 010 011 100`.
pub const GRAND_CODE_ROWS: [(&str, [&str; 5]); 8] = [
    ("01001", ["01001", "11000", "01010", "01011", "01110"]),
    ("01010", ["01010", "11000", "01110", "01110", "01100"]),
    ("01011", ["01011", "11000", "01110", "01110", "01101"]),
    ("01100", ["01100", "11000", "01010", "01011", "01110"]),
    ("01101", ["01101", "11000", "01011", "01011", "01110"]),
    ("01110", ["01110", "11000", "01110", "01110", "01110"]),
    ("11000", ["01001", "11000", "11001", "11001", "11001"]),
    ("11001", ["01001", "11001", "11000", "11000", "11000"]),
];

/// Teacher script for `T∧F∧T∧T`: the `(state, input)` context at each
/// step, with the last two contexts repeating earlier ones.
pub const SYMBOL_SCRIPT: [(&str, &str); 8] = [
    ("q0", "T"),
    ("q_T", "∧"),
    ("q_T∧", "F"),
    ("q_F", "∧"),
    ("q_F∧", "T"),
    ("q_F", "∧"),
    ("q_F∧", "T"),
    ("q_F", "∧"),
];

/// The same script at pattern level, `(z, x)` per step.
pub const PATTERN_SCRIPT: [(&str, &str); 8] = [
    ("001", "010"),
    ("010", "100"),
    ("100", "011"),
    ("011", "100"),
    ("101", "010"),
    ("011", "100"),
    ("101", "010"),
    ("011", "100"),
];

pub fn task1_table() -> TransitionTable {
    TransitionTable::from_tokens(TASK1_STATES, TASK1_INPUTS, TASK1_ROWS).expect("task 1 is valid")
}

pub fn task3_table() -> TransitionTable {
    TransitionTable::from_tokens(TASK3_STATES, TASK1_INPUTS, TASK3_ROWS).expect("task 3 is valid")
}

pub fn grand13_table() -> TransitionTable {
    compose_grand(
        &[
            GrandTask {
                tag: "q1".into(),
                table: task1_table(),
                entry_state: 0,
            },
            GrandTask {
                tag: "q3".into(),
                table: task3_table(),
                entry_state: 0,
            },
        ],
        &[
            SwitchInput {
                token: SWITCHES[0].0.into(),
                task: 0,
            },
            SwitchInput {
                token: SWITCHES[1].0.into(),
                task: 1,
            },
        ],
    )
    .expect("grand table composes")
}

fn grounded<T: Scalar>(
    table: TransitionTable,
    state_codes: &[&str],
    input_codes: &[(&str, &str)],
) -> (TransitionTable, GroundingMap<T>) {
    let patterns: BTreeMap<String, String> = table
        .states()
        .tokens()
        .zip(state_codes)
        .map(|(s, c)| (s.to_string(), c.to_string()))
        .chain(
            input_codes
                .iter()
                .map(|(s, c)| (s.to_string(), c.to_string())),
        )
        .collect();
    let map = GroundingMap::from_bit_strings(&table, &patterns).expect("fixture codes are valid");
    (table, map)
}

fn task_inputs() -> Vec<(&'static str, &'static str)> {
    TASK1_INPUTS.into_iter().zip(INPUT_CODES).collect()
}

pub fn task1<T: Scalar>() -> (TransitionTable, GroundingMap<T>) {
    grounded(task1_table(), &TASK1_STATE_CODES, &task_inputs())
}

pub fn task3<T: Scalar>() -> (TransitionTable, GroundingMap<T>) {
    grounded(task3_table(), &TASK3_STATE_CODES, &task_inputs())
}

pub fn grand13<T: Scalar>() -> (TransitionTable, GroundingMap<T>) {
    let inputs: Vec<_> = SWITCHES.into_iter().chain(task_inputs()).collect();
    grounded(grand13_table(), &GRAND_STATE_CODES, &inputs)
}

/// Names accepted by [`document`].
pub const NAMES: [&str; 3] = ["task1", "task3", "grand13"];

/// Canonical table document for a built-in fixture.
pub fn document(name: &str) -> Option<TableDocument> {
    let (table, map) = match name {
        "task1" => task1::<f64>(),
        "task3" => task3(),
        "grand13" => grand13(),
        _ => return None,
    };
    Some(TableDocument::from_table(&table, Some(&map)))
}
