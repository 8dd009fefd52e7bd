//! Grounding of symbols as fixed-dimension patterns, attention masks, and the
//! conversion of symbolic tables into pattern-level training triples.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{SymbolKind, TransitionTable};
use crate::scalar::{dot, normalize, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error("invalid bit string `{0}`")]
    BadBitString(String),
    #[error("pattern component {0} outside [0, 1]")]
    OutOfUnitRange(f64),
    #[error("empty pattern")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("no code for {kind} `{token}`")]
    UnknownSymbol { kind: SymbolKind, token: String },
    #[error("{kind} `{token}` has an all-zero code")]
    ZeroCode { kind: SymbolKind, token: String },
    #[error("{kind} codes for `{a}` and `{b}` are identical")]
    DuplicateCode {
        kind: SymbolKind,
        a: String,
        b: String,
    },
    #[error("duplicate {kind} `{0}` in grounding map", kind = .1)]
    DuplicateSymbol(String, SymbolKind),
    #[error("cannot decode the zero pattern")]
    ZeroPattern,
    #[error("no {0} codes to decode against")]
    EmptyMap(SymbolKind),
    #[error("ambiguous decode between {0:?}")]
    Ambiguous(Vec<String>),
    #[error("attention mask selects no component")]
    EmptyMask,
}

/// A pattern with components in [0, 1]; binary in all table fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitPattern<T> {
    values: Vec<T>,
}

impl<T: Scalar> BitPattern<T> {
    pub fn new(values: Vec<T>) -> Result<Self, CodecError> {
        if values.is_empty() {
            return Err(CodecError::Empty);
        }
        if let Some(v) = values.iter().find(|&&v| !(v >= T::zero() && v <= T::one())) {
            return Err(CodecError::OutOfUnitRange(v.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { values })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            values: vec![T::zero(); dim],
        }
    }

    /// Parses a big-endian bit string: `"01010"` → `[0, 1, 0, 1, 0]`.
    pub fn from_bits(bits: &str) -> Result<Self, CodecError> {
        let values = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(T::zero()),
                '1' => Ok(T::one()),
                _ => Err(CodecError::BadBitString(bits.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(values)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self {
            values: bits
                .iter()
                .map(|&b| if b { T::one() } else { T::zero() })
                .collect(),
        }
    }

    /// Renders components as `0`/`1`, thresholding at one half.
    pub fn to_bits(&self) -> String {
        let half = T::lit(0.5);
        self.values
            .iter()
            .map(|&v| if v > half { '1' } else { '0' })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Components set to one half or more.
    pub fn active(&self) -> Vec<bool> {
        let half = T::lit(0.5);
        self.values.iter().map(|&v| v >= half).collect()
    }
}

/// Boolean gate over pattern components; unattended components read as 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttentionMask {
    bits: Vec<bool>,
}

impl AttentionMask {
    pub fn new(bits: Vec<bool>) -> Result<Self, CodecError> {
        if !bits.iter().any(|&b| b) {
            return Err(CodecError::EmptyMask);
        }
        Ok(Self { bits })
    }

    pub fn all(dim: usize) -> Self {
        Self {
            bits: vec![true; dim],
        }
    }

    pub fn from_bits(bits: &str) -> Result<Self, CodecError> {
        let bits = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CodecError::BadBitString(bits.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(bits)
    }

    /// Component-wise union; attended sets need not be contiguous.
    pub fn union(&self, other: &Self) -> Result<Self, CodecError> {
        if self.bits.len() != other.bits.len() {
            return Err(CodecError::DimMismatch {
                expected: self.bits.len(),
                got: other.bits.len(),
            });
        }
        Ok(Self {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| *a || *b)
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

pub fn apply_mask<T: Scalar>(
    p: &BitPattern<T>,
    m: &AttentionMask,
) -> Result<BitPattern<T>, CodecError> {
    if p.dim() != m.dim() {
        return Err(CodecError::DimMismatch {
            expected: p.dim(),
            got: m.dim(),
        });
    }
    Ok(BitPattern {
        values: p
            .values
            .iter()
            .zip(&m.bits)
            .map(|(&v, &on)| if on { v } else { T::zero() })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
struct CodeBook<T> {
    kind: SymbolKind,
    dim: usize,
    tokens: Vec<String>,
    codes: Vec<BitPattern<T>>,
    index: HashMap<String, usize>,
}

impl<T: Scalar> CodeBook<T> {
    fn new(
        kind: SymbolKind,
        dim: usize,
        entries: Vec<(String, BitPattern<T>)>,
    ) -> Result<Self, CodecError> {
        let mut book = Self {
            kind,
            dim,
            tokens: Vec::new(),
            codes: Vec::new(),
            index: HashMap::new(),
        };
        for (token, code) in entries {
            if code.dim() != dim {
                return Err(CodecError::DimMismatch {
                    expected: dim,
                    got: code.dim(),
                });
            }
            if code.is_zero() {
                return Err(CodecError::ZeroCode { kind, token });
            }
            if let Some(j) = book.codes.iter().position(|c| c == &code) {
                return Err(CodecError::DuplicateCode {
                    kind,
                    a: book.tokens[j].clone(),
                    b: token,
                });
            }
            if book
                .index
                .insert(token.clone(), book.tokens.len())
                .is_some()
            {
                return Err(CodecError::DuplicateSymbol(token, kind));
            }
            book.tokens.push(token);
            book.codes.push(code);
        }
        Ok(book)
    }

    fn get(&self, token: &str) -> Result<&BitPattern<T>, CodecError> {
        self.index
            .get(token)
            .map(|&i| &self.codes[i])
            .ok_or_else(|| CodecError::UnknownSymbol {
                kind: self.kind,
                token: token.to_string(),
            })
    }

    fn decode(&self, p: &BitPattern<T>) -> Result<(String, T), CodecError> {
        if p.dim() != self.dim {
            return Err(CodecError::DimMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        if p.is_zero() {
            return Err(CodecError::ZeroPattern);
        }
        if self.codes.is_empty() {
            return Err(CodecError::EmptyMap(self.kind));
        }
        let q = normalize(p.values());
        let sims: Vec<T> = self
            .codes
            .iter()
            .map(|c| dot(&normalize(c.values()), &q))
            .collect();
        let best = sims.iter().copied().fold(T::neg_infinity(), T::max);
        let tol = T::epsilon() * T::lit(16.0);
        let tied: Vec<usize> = (0..sims.len()).filter(|&i| best - sims[i] <= tol).collect();
        if tied.len() > 1 {
            return Err(CodecError::Ambiguous(
                tied.into_iter().map(|i| self.tokens[i].clone()).collect(),
            ));
        }
        let i = tied[0];
        // An exact code reports similarity 1 rather than a rounded cosine.
        let sim = if &self.codes[i] == p {
            T::one()
        } else {
            sims[i]
        };
        Ok((self.tokens[i].clone(), sim))
    }
}

/// Bijection between symbols and their grounded patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundingMap<T> {
    states: CodeBook<T>,
    inputs: CodeBook<T>,
}

impl<T: Scalar> GroundingMap<T> {
    pub fn new(
        z_dim: usize,
        x_dim: usize,
        state_codes: Vec<(String, BitPattern<T>)>,
        input_codes: Vec<(String, BitPattern<T>)>,
    ) -> Result<Self, CodecError> {
        Ok(Self {
            states: CodeBook::new(SymbolKind::State, z_dim, state_codes)?,
            inputs: CodeBook::new(SymbolKind::Input, x_dim, input_codes)?,
        })
    }

    /// Builds the map for `table` from a symbol → bit-string dictionary.
    /// Every table symbol must have a code; dimensions are taken from the
    /// first code of each kind.
    pub fn from_bit_strings(
        table: &TransitionTable,
        patterns: &BTreeMap<String, String>,
    ) -> Result<Self, CodecError> {
        let collect = |kind: SymbolKind, tokens: Vec<&str>| {
            tokens
                .into_iter()
                .map(|t| {
                    let bits = patterns.get(t).ok_or_else(|| CodecError::UnknownSymbol {
                        kind,
                        token: t.to_string(),
                    })?;
                    Ok((t.to_string(), BitPattern::from_bits(bits)?))
                })
                .collect::<Result<Vec<_>, CodecError>>()
        };
        let states = collect(SymbolKind::State, table.states().tokens().collect())?;
        let inputs = collect(SymbolKind::Input, table.inputs().tokens().collect())?;
        let z_dim = states.first().map_or(0, |(_, c)| c.dim());
        let x_dim = inputs.first().map_or(0, |(_, c)| c.dim());
        Self::new(z_dim, x_dim, states, inputs)
    }

    pub fn z_dim(&self) -> usize {
        self.states.dim
    }

    pub fn x_dim(&self) -> usize {
        self.inputs.dim
    }

    pub fn encode_state(&self, q: &str) -> Result<&BitPattern<T>, CodecError> {
        self.states.get(q)
    }

    pub fn encode_input(&self, s: &str) -> Result<&BitPattern<T>, CodecError> {
        self.inputs.get(s)
    }

    pub fn encode(&self, kind: SymbolKind, token: &str) -> Result<&BitPattern<T>, CodecError> {
        match kind {
            SymbolKind::State => self.encode_state(token),
            SymbolKind::Input => self.encode_input(token),
        }
    }

    /// Symbol whose code points closest (by cosine) to `p`, with that cosine.
    pub fn decode_nearest(
        &self,
        p: &BitPattern<T>,
        kind: SymbolKind,
    ) -> Result<(String, T), CodecError> {
        match kind {
            SymbolKind::State => self.states.decode(p),
            SymbolKind::Input => self.inputs.decode(p),
        }
    }

    pub fn state_tokens(&self) -> &[String] {
        &self.states.tokens
    }

    pub fn input_tokens(&self) -> &[String] {
        &self.inputs.tokens
    }

    /// Symbol → bit string for every code, as stored in table files.
    pub fn to_bit_strings(&self) -> BTreeMap<String, String> {
        let states = self.states.tokens.iter().zip(&self.states.codes);
        let inputs = self.inputs.tokens.iter().zip(&self.inputs.codes);
        states
            .chain(inputs)
            .map(|(t, c)| (t.clone(), c.to_bits()))
            .collect()
    }
}

/// One pattern-level transition `(z, x) → z'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTriple<T> {
    pub z: BitPattern<T>,
    pub x: BitPattern<T>,
    pub z_next: BitPattern<T>,
}

/// One triple per table entry, row-major.
pub fn table_to_triples<T: Scalar>(
    table: &TransitionTable,
    map: &GroundingMap<T>,
) -> Result<Vec<TrainingTriple<T>>, CodecError> {
    let states: Vec<&str> = table.states().tokens().collect();
    let inputs: Vec<&str> = table.inputs().tokens().collect();
    table
        .transitions()
        .map(|(q, s, next)| {
            Ok(TrainingTriple {
                z: map.encode_state(states[q])?.clone(),
                x: map.encode_input(inputs[s])?.clone(),
                z_next: map.encode_state(states[next])?.clone(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn bits(s: &str) -> BitPattern<f64> {
        BitPattern::from_bits(s).unwrap()
    }

    #[test]
    fn encode_examples() {
        let (_, m) = fixtures::task1::<f64>();
        assert_eq!(m.encode_state("q0").unwrap().to_bits(), "001");
        assert_eq!(m.encode_input("∧").unwrap().to_bits(), "100");
        let (_, g) = fixtures::grand13::<f64>();
        assert_eq!(g.encode_state("(q1,q_T∧)").unwrap().to_bits(), "01100");
        assert!(matches!(
            m.encode_state("nope"),
            Err(CodecError::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn bit_string_is_big_endian() {
        assert_eq!(bits("01010").values(), &[0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(BitPattern::<f64>::from_bits("012").is_err());
        assert!(BitPattern::<f64>::from_bits("").is_err());
    }

    #[test]
    fn decode_examples() {
        let (_, m) = fixtures::task1::<f64>();
        assert_eq!(
            m.decode_nearest(&bits("010"), SymbolKind::Input).unwrap(),
            ("T".to_string(), 1.0)
        );
        assert_eq!(
            m.decode_nearest(&bits("011"), SymbolKind::Input).unwrap(),
            ("F".to_string(), 1.0)
        );
        assert_eq!(
            m.decode_nearest(&bits("000"), SymbolKind::Input),
            Err(CodecError::ZeroPattern)
        );
    }

    #[test]
    fn decode_reports_ties() {
        let m = GroundingMap::new(
            2,
            1,
            vec![("a".into(), bits("10")), ("b".into(), bits("01"))],
            vec![("x".into(), bits("1"))],
        )
        .unwrap();
        let p = BitPattern::new(vec![0.5, 0.5]).unwrap();
        match m.decode_nearest(&p, SymbolKind::State) {
            Err(CodecError::Ambiguous(tied)) => assert_eq!(tied, ["a", "b"]),
            other => panic!("expected tie, got {other:?}"),
        }
    }

    #[test]
    fn map_rejects_bad_codes() {
        let r = GroundingMap::new(
            2,
            1,
            vec![("a".into(), bits("10")), ("b".into(), bits("10"))],
            vec![("x".into(), bits("1"))],
        );
        assert!(matches!(r, Err(CodecError::DuplicateCode { .. })));
        let r = GroundingMap::new(2, 1, vec![("a".into(), bits("00"))], vec![]);
        assert!(matches!(r, Err(CodecError::ZeroCode { .. })));
        let r = GroundingMap::new(2, 1, vec![("a".into(), bits("100"))], vec![]);
        assert!(matches!(r, Err(CodecError::DimMismatch { .. })));
    }

    #[test]
    fn round_trip_every_fixture_state() {
        for (table, map) in [
            fixtures::task1::<f64>(),
            fixtures::task3(),
            fixtures::grand13(),
        ] {
            for q in table.states().tokens() {
                let code = map.encode_state(q).unwrap();
                assert_eq!(
                    map.decode_nearest(code, SymbolKind::State).unwrap(),
                    (q.to_string(), 1.0)
                );
            }
        }
    }

    #[test]
    fn triples_table1() {
        let (t, m) = fixtures::task1::<f64>();
        let triples = table_to_triples(&t, &m).unwrap();
        assert_eq!(triples.len(), 18);
        assert_eq!(triples[0].z.to_bits(), "001");
        assert_eq!(triples[0].x.to_bits(), "010");
        assert_eq!(triples[0].z_next.to_bits(), "010");
    }

    #[test]
    fn triples_reproduce_table5() {
        let (t, m) = fixtures::grand13::<f64>();
        let triples = table_to_triples(&t, &m).unwrap();
        assert_eq!(triples.len(), 40);
        let inputs = ["101", "111", "010", "011", "100"];
        for (r, row) in fixtures::GRAND_CODE_ROWS.iter().enumerate() {
            for (c, next) in row.1.iter().enumerate() {
                let tr = &triples[r * 5 + c];
                assert_eq!(tr.z.to_bits(), row.0);
                assert_eq!(tr.x.to_bits(), inputs[c]);
                assert_eq!(tr.z_next.to_bits(), *next);
            }
        }
        let tr = &triples[7 * 5 + 1];
        assert_eq!(
            (tr.z.to_bits(), tr.x.to_bits(), tr.z_next.to_bits()),
            ("11001".into(), "111".into(), "11001".into())
        );
    }

    #[test]
    fn triples_of_empty_table() {
        let t = TransitionTable::from_tokens(
            Vec::<String>::new(),
            Vec::<String>::new(),
            Vec::<Vec<String>>::new(),
        )
        .unwrap();
        let m = GroundingMap::<f64>::new(1, 1, vec![], vec![]).unwrap();
        assert!(table_to_triples(&t, &m).unwrap().is_empty());
    }

    #[test]
    fn mask_examples() {
        let m = AttentionMask::from_bits("110").unwrap();
        assert_eq!(apply_mask(&bits("101"), &m).unwrap().to_bits(), "100");
        let p = bits("011");
        assert_eq!(apply_mask(&p, &AttentionMask::all(3)).unwrap(), p);
        let m = AttentionMask::from_bits("00111").unwrap();
        assert_eq!(apply_mask(&bits("01010"), &m).unwrap().to_bits(), "00010");
        assert!(matches!(
            apply_mask(&bits("01"), &m),
            Err(CodecError::DimMismatch { .. })
        ));
        assert_eq!(AttentionMask::from_bits("000"), Err(CodecError::EmptyMask));
    }

    #[test]
    fn mask_union_is_componentwise() {
        let a = AttentionMask::from_bits("10001").unwrap();
        let b = AttentionMask::from_bits("00100").unwrap();
        assert_eq!(
            a.union(&b).unwrap(),
            AttentionMask::from_bits("10101").unwrap()
        );
    }
}
