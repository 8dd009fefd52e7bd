//! Teacher-learner loop and verification.
//!
//! A table sweep presents every `(z, x) → z'` triple in row-major order: one
//! supervised network step on `(z, x)`, then a supervision half-step that
//! imposes `z'` on the Z port. A sequence replay feeds a scripted stream in
//! which each supervised context is also the successor of the one before.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automata::{SymbolKind, TransitionTable};
use crate::codec::{table_to_triples, BitPattern, CodecError, GroundingMap};
use crate::network::{Network, StepInput, StepOutput};
use crate::oracle::StoredContext;
use crate::scalar::Scalar;
use crate::Error;

/// Where a port's pattern comes from on one replay step.
#[derive(Debug, Clone, PartialEq)]
pub enum Port<T> {
    /// Imposed by the teacher (or sensed from the world); the port learns it.
    Supervised(BitPattern<T>),
    /// Given, but not used as a learning target.
    Free(BitPattern<T>),
    /// The network's own prediction from the previous step.
    Predicted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayStep<T> {
    pub z: Port<T>,
    pub x: Port<T>,
}

impl<T: Scalar> ReplayStep<T> {
    pub fn supervised(z: BitPattern<T>, x: BitPattern<T>) -> Self {
        Self {
            z: Port::Supervised(z),
            x: Port::Supervised(x),
        }
    }

    pub fn predicted() -> Self {
        Self {
            z: Port::Predicted,
            x: Port::Predicted,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleMode<T> {
    TableSweep,
    SequenceReplay(Vec<ReplayStep<T>>),
    /// Unsupervised drive from `start`, feeding `inputs` and chaining the
    /// predicted state.
    FreeRun {
        start: BitPattern<T>,
        inputs: Vec<BitPattern<T>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeachingSchedule<T> {
    pub mode: ScheduleMode<T>,
    pub epochs: usize,
    /// Table sweeps only: present triples in a seeded random order.
    pub shuffle: bool,
    pub seed: u64,
}

impl<T: Scalar> TeachingSchedule<T> {
    pub fn table_sweep(epochs: usize) -> Self {
        Self {
            mode: ScheduleMode::TableSweep,
            epochs,
            shuffle: false,
            seed: 0,
        }
    }

    pub fn replay(steps: Vec<ReplayStep<T>>) -> Self {
        Self {
            mode: ScheduleMode::SequenceReplay(steps),
            epochs: 1,
            shuffle: false,
            seed: 0,
        }
    }

    pub fn shuffled(mut self, seed: u64) -> Self {
        self.shuffle = true;
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<(), Error> {
        if self.epochs == 0 {
            return Err(Error::Invalid("epochs must be at least 1".into()));
        }
        if let ScheduleMode::SequenceReplay(steps) = &self.mode {
            if steps.is_empty() {
                return Err(Error::Invalid(
                    "sequence replay needs at least one step".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepRecord {
    /// 1-based position in the run.
    pub step: usize,
    pub winner: Option<usize>,
    pub recruited: bool,
    pub pre_response_max: Option<f64>,
    /// Whether the Z prediction equalled the next Z pattern, when known.
    pub z_correct: Option<bool>,
    pub z_pred: String,
    pub x_pred: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub steps: Vec<StepRecord>,
    pub recruit_count: usize,
}

impl RunReport {
    /// Fraction of steps with a known target whose Z prediction was right;
    /// `None` when no step had one.
    pub fn agreement_rate(&self) -> Option<f64> {
        let judged: Vec<bool> = self.steps.iter().filter_map(|s| s.z_correct).collect();
        if judged.is_empty() {
            None
        } else {
            Some(judged.iter().filter(|&&c| c).count() as f64 / judged.len() as f64)
        }
    }

    fn record<T: Scalar>(&mut self, out: &StepOutput<T>, z_correct: Option<bool>) {
        if out.recruited {
            self.recruit_count += 1;
        }
        self.steps.push(StepRecord {
            step: self.steps.len() + 1,
            winner: out.winners.first().copied(),
            recruited: out.recruited,
            pre_response_max: out.best_pre_response().and_then(|v| v.to_f64()),
            z_correct,
            z_pred: out.z_pred.to_bits(),
            x_pred: out.x_pred.to_bits(),
        });
    }
}

/// Runs any schedule. Table sweeps need `table` and `map`; other modes
/// ignore them.
pub fn run_schedule<T: Scalar>(
    net: &mut Network<T>,
    table: &TransitionTable,
    map: &GroundingMap<T>,
    schedule: &TeachingSchedule<T>,
) -> Result<RunReport, Error> {
    schedule.validate()?;
    match &schedule.mode {
        ScheduleMode::TableSweep => teach_table(net, table, map, schedule),
        ScheduleMode::SequenceReplay(steps) => {
            let mut report = RunReport::default();
            for _ in 0..schedule.epochs {
                net.break_sequence();
                replay_into(net, steps, &mut report)?;
            }
            Ok(report)
        }
        ScheduleMode::FreeRun { start, inputs } => {
            let steps: Vec<ReplayStep<T>> = inputs
                .iter()
                .enumerate()
                .map(|(i, x)| ReplayStep {
                    z: if i == 0 {
                        Port::Free(start.clone())
                    } else {
                        Port::Predicted
                    },
                    x: Port::Free(x.clone()),
                })
                .collect();
            let mut report = RunReport::default();
            for _ in 0..schedule.epochs {
                replay_into(net, &steps, &mut report)?;
            }
            Ok(report)
        }
    }
}

/// Supervised sweep over every table transition, `schedule.epochs` times.
pub fn teach_table<T: Scalar>(
    net: &mut Network<T>,
    table: &TransitionTable,
    map: &GroundingMap<T>,
    schedule: &TeachingSchedule<T>,
) -> Result<RunReport, Error> {
    schedule.validate()?;
    let triples = table_to_triples(table, map)?;
    let mut order: Vec<usize> = (0..triples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mut report = RunReport::default();
    for _ in 0..schedule.epochs {
        if schedule.shuffle {
            order.shuffle(&mut rng);
        }
        for &i in &order {
            let t = &triples[i];
            net.break_sequence();
            let out = net.step(&StepInput::supervised(t.z.clone(), t.x.clone()))?;
            report.record(&out, Some(out.z_pred == t.z_next));
            net.supervise(Some(&t.z_next), None)?;
        }
    }
    log::info!(
        "taught {} transitions x {} epochs, {} recruits",
        triples.len(),
        schedule.epochs,
        report.recruit_count
    );
    Ok(report)
}

/// Feeds a scripted stream once.
pub fn teach_sequence<T: Scalar>(
    net: &mut Network<T>,
    steps: &[ReplayStep<T>],
) -> Result<RunReport, Error> {
    let mut report = RunReport::default();
    replay_into(net, steps, &mut report)?;
    Ok(report)
}

fn replay_into<T: Scalar>(
    net: &mut Network<T>,
    steps: &[ReplayStep<T>],
    report: &mut RunReport,
) -> Result<(), Error> {
    let zeros = (
        BitPattern::zeros(net.config().z_dim),
        BitPattern::zeros(net.config().x_dim),
    );
    let mut last: Option<(BitPattern<T>, BitPattern<T>)> = None;
    let mut pending: Option<StepOutput<T>> = None;
    for step in steps {
        let resolve =
            |port: &Port<T>, pred: Option<&BitPattern<T>>, zero: &BitPattern<T>| match port {
                Port::Supervised(p) => (p.clone(), true),
                Port::Free(p) => (p.clone(), false),
                Port::Predicted => (pred.unwrap_or(zero).clone(), false),
            };
        let (z, z_sup) = resolve(&step.z, last.as_ref().map(|l| &l.0), &zeros.0);
        let (x, x_sup) = resolve(&step.x, last.as_ref().map(|l| &l.1), &zeros.1);
        if let Some(prev) = pending.take() {
            let known = !matches!(step.z, Port::Predicted);
            report.record(&prev, known.then(|| prev.z_pred == z));
        }
        let out = net.step(&StepInput {
            z_supervised: z_sup,
            x_supervised: x_sup,
            ..StepInput::supervised(z, x)
        })?;
        last = Some((out.z_pred.clone(), out.x_pred.clone()));
        pending = Some(out);
    }
    if let Some(prev) = pending {
        report.record(&prev, None);
    }
    Ok(())
}

/// One query that disagreed with the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub state: String,
    pub input: String,
    pub z: String,
    pub x: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub total_queries: usize,
    pub mismatches: Vec<Mismatch>,
    pub recruit_count: usize,
    pub agreement_rate: f64,
}

impl VerificationReport {
    pub fn is_error_free(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Queries every `(state, input)` pair without learning and compares the Z
/// prediction with the table's next-state code, bit for bit.
pub fn verify_error_free<T: Scalar>(
    net: &Network<T>,
    table: &TransitionTable,
    map: &GroundingMap<T>,
) -> Result<VerificationReport, Error> {
    let mut mismatches = Vec::new();
    let mut total = 0;
    for (q, s, next) in table.transitions() {
        let (qt, st) = (table.states().token(q)?, table.inputs().token(s)?);
        let z = map.encode_state(qt)?;
        let x = map.encode_input(st)?;
        let expected = map.encode_state(table.states().token(next)?)?;
        let out = net.evaluate(z, x)?;
        total += 1;
        if &out.z_pred != expected {
            mismatches.push(Mismatch {
                state: qt.to_string(),
                input: st.to_string(),
                z: z.to_bits(),
                x: x.to_bits(),
                expected: expected.to_bits(),
                got: out.z_pred.to_bits(),
            });
        }
    }
    let agreement_rate = if total == 0 {
        1.0
    } else {
        1.0 - mismatches.len() as f64 / total as f64
    };
    Ok(VerificationReport {
        total_queries: total,
        mismatches,
        recruit_count: net.initialized_count(),
        agreement_rate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeRunStep<T> {
    pub input: String,
    /// Predicted state pattern.
    pub z_pred: BitPattern<T>,
    /// Nearest state symbol, or why none could be named.
    pub state: Result<String, CodecError>,
    /// Nearest input symbol to the predicted input, when one is predicted.
    pub next_input: Option<Result<String, CodecError>>,
}

/// Drives a frozen network with an input word from `start`, chaining each
/// predicted state pattern into the next step.
pub fn run_free<T: Scalar, S: AsRef<str>>(
    net: &Network<T>,
    map: &GroundingMap<T>,
    start: &str,
    word: &[S],
) -> Result<Vec<FreeRunStep<T>>, Error> {
    let mut z = map.encode_state(start)?.clone();
    let mut out = Vec::with_capacity(word.len());
    for sym in word {
        let sym = sym.as_ref();
        let x = map.encode_input(sym)?;
        let step = net.evaluate(&z, x)?;
        let state = map
            .decode_nearest(&step.z_pred, SymbolKind::State)
            .map(|(s, _)| s);
        let next_input = (!step.x_pred.is_zero()).then(|| {
            map.decode_nearest(&step.x_pred, SymbolKind::Input)
                .map(|(s, _)| s)
        });
        out.push(FreeRunStep {
            input: sym.to_string(),
            z_pred: step.z_pred.clone(),
            state,
            next_input,
        });
        z = step.z_pred;
    }
    Ok(out)
}

/// The initialized neurons' weights, for cross-checking competition with
/// [`crate::oracle::oracle_nearest_context`]. Returns the neuron indices
/// alongside.
pub fn stored_contexts<T: Scalar>(net: &Network<T>) -> (Vec<usize>, Vec<StoredContext>) {
    let f = |v: &[T]| {
        v.iter()
            .map(|c| c.to_f64().expect("finite weight"))
            .collect()
    };
    net.neurons()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.is_initialized())
        .map(|(j, n)| {
            (
                j,
                StoredContext {
                    z: f(n.top()),
                    x: f(n.bottom()),
                },
            )
        })
        .unzip()
}
