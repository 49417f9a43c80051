//! Machine file format: a JSON document with the alphabet, the pattern
//! and one record per state. Serialization is canonical (fixed field
//! order, pretty-printed, trailing newline) so identical machines
//! produce byte-identical files. Alphabet symbols are single-character
//! strings; bytes map to characters through Latin-1 so any byte value
//! round-trips.
//!
//! Strategies carry a `name` per state (its position set) and expanded
//! machines a `memory` field (the recorded `[position, symbol]` pairs);
//! states of order-`|w|` machines that read past the window carry their
//! `sentinel` rule. Plain machines omit all three.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::{ExpandedMachine, MemoryMap};
use crate::machine::{
    Alphabet, DomainError, MachineBuilder, MatchingMachine, Pattern, StateId, Symbol, SINK,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed machine document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid machine document: {0}")]
    Structure(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentinelDoc {
    pub trans: u32,
    pub shift: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub id: u32,
    pub next: u32,
    pub prematch: bool,
    pub trans: Vec<u32>,
    pub shift: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<Vec<(u32, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentinel: Option<SentinelDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineDoc {
    pub alphabet: Vec<String>,
    pub pattern: String,
    pub init: u32,
    pub sink: u32,
    pub states: Vec<StateDoc>,
}

fn byte_to_string(b: u8) -> String {
    char::from_u32(b as u32)
        .expect("latin-1 scalar")
        .to_string()
}

fn string_to_byte(s: &str) -> Result<u8, FormatError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if (c as u32) <= 0xFF => Ok(c as u32 as u8),
        _ => Err(FormatError::Structure(format!(
            "symbol {s:?} is not a single latin-1 character"
        ))),
    }
}

pub fn to_document(
    alphabet: &Alphabet,
    pattern: &Pattern,
    machine: &MatchingMachine,
) -> MachineDoc {
    document_with_memories(alphabet, pattern, machine, None)
}

/// Core format plus a per-state `memory` field.
pub fn expanded_to_document(
    alphabet: &Alphabet,
    pattern: &Pattern,
    expanded: &ExpandedMachine,
) -> MachineDoc {
    document_with_memories(alphabet, pattern, &expanded.machine, Some(&expanded.memory))
}

fn document_with_memories(
    alphabet: &Alphabet,
    pattern: &Pattern,
    machine: &MatchingMachine,
    memories: Option<&[MemoryMap]>,
) -> MachineDoc {
    let k = machine.num_symbols();
    let states = (0..machine.num_states() as StateId)
        .map(|q| StateDoc {
            id: q,
            next: machine.next(q),
            prematch: machine.is_prematch(q),
            trans: (0..k as Symbol).map(|x| machine.trans(q, x)).collect(),
            shift: (0..k as Symbol).map(|x| machine.shift(q, x)).collect(),
            name: machine
                .name(q)
                .filter(|n| !n.is_empty())
                .map(|n| n.to_string()),
            memory: memories.map(|mems| {
                mems[q as usize]
                    .entries()
                    .iter()
                    .map(|&(pos, sym)| (pos, byte_to_string(alphabet.byte(sym))))
                    .collect()
            }),
            sentinel: machine
                .sentinel(q)
                .map(|(trans, shift)| SentinelDoc { trans, shift }),
        })
        .collect();
    MachineDoc {
        alphabet: alphabet
            .bytes()
            .iter()
            .map(|&b| byte_to_string(b))
            .collect(),
        pattern: pattern
            .symbols()
            .iter()
            .map(|&s| char::from_u32(alphabet.byte(s) as u32).unwrap())
            .collect(),
        init: machine.init(),
        sink: SINK,
        states,
    }
}

/// Canonical rendering: pretty JSON with a trailing newline.
pub fn to_json(doc: &MachineDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<MachineDoc, FormatError> {
    Ok(serde_json::from_str(text)?)
}

/// Rebuild the typed triple from a document, validating ids, row widths
/// and the sink convention location.
pub fn from_document(
    doc: &MachineDoc,
) -> Result<(Alphabet, Pattern, MatchingMachine), FormatError> {
    let bytes: Vec<u8> = doc
        .alphabet
        .iter()
        .map(|s| string_to_byte(s))
        .collect::<Result<_, _>>()?;
    let alphabet = Alphabet::new(&bytes)?;
    let pattern_bytes: Vec<u8> = doc
        .pattern
        .chars()
        .map(|c| {
            if (c as u32) <= 0xFF {
                Ok(c as u32 as u8)
            } else {
                Err(FormatError::Structure(format!(
                    "pattern character {c:?} outside latin-1"
                )))
            }
        })
        .collect::<Result<_, _>>()?;
    let pattern = Pattern::from_bytes(&alphabet, &pattern_bytes)?;

    let n = doc.states.len();
    if doc.sink != SINK {
        return Err(FormatError::Structure("sink must be state 0".into()));
    }
    if doc.init as usize >= n {
        return Err(FormatError::Structure("init out of range".into()));
    }
    let mut builder = MachineBuilder::new(alphabet.len());
    for (i, st) in doc.states.iter().enumerate() {
        if st.id as usize != i {
            return Err(FormatError::Structure(format!(
                "state ids must be dense and ordered; found {} at index {i}",
                st.id
            )));
        }
        if st.trans.len() != alphabet.len() || st.shift.len() != alphabet.len() {
            return Err(FormatError::Structure(format!(
                "state {i} rows must have one entry per alphabet symbol"
            )));
        }
        if i > 0 {
            builder.add_state(st.next, st.prematch);
        }
    }
    for (i, st) in doc.states.iter().enumerate() {
        let q = i as StateId;
        for (x, (&t, &s)) in st.trans.iter().zip(&st.shift).enumerate() {
            if t as usize >= n {
                return Err(FormatError::Structure(format!(
                    "state {i} transition on symbol {x} targets {t}, out of range"
                )));
            }
            if q != SINK {
                builder.set_edge(q, x as Symbol, t, s);
            } else if t != SINK || s != 0 {
                return Err(FormatError::Structure(
                    "state 0 must keep the sink convention".into(),
                ));
            }
        }
        if let Some(sd) = &st.sentinel {
            if sd.trans as usize >= n {
                return Err(FormatError::Structure(format!(
                    "state {i} sentinel targets {}, out of range",
                    sd.trans
                )));
            }
            builder.set_sentinel(q, sd.trans, sd.shift);
        }
        if let Some(name) = &st.name {
            builder.set_name(q, name.clone());
        }
    }
    Ok((alphabet, pattern, builder.finish(doc.init)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classics::{build_machine, AlgorithmId};
    use crate::expansion::expand;

    fn setup(w: &[u8], algo: AlgorithmId) -> (Alphabet, Pattern, MatchingMachine) {
        let a = Alphabet::new(b"ab").unwrap();
        let p = Pattern::from_bytes(&a, w).unwrap();
        let m = build_machine(algo, &a, &p).unwrap();
        (a, p, m)
    }

    #[test]
    fn machine_round_trips_exactly() {
        for algo in AlgorithmId::MACHINE_BACKED {
            let (a, p, m) = setup(b"abb", algo);
            let doc = to_document(&a, &p, &m);
            let json = to_json(&doc);
            let doc2 = from_json(&json).unwrap();
            assert_eq!(doc, doc2);
            // Serialize(deserialize(s)) is byte-identical.
            assert_eq!(to_json(&doc2), json);
            let (a2, p2, m2) = from_document(&doc2).unwrap();
            assert_eq!(a2.bytes(), a.bytes());
            assert_eq!(p2, p);
            assert_eq!(m2, m, "{}", algo.name());
        }
    }

    #[test]
    fn expanded_documents_carry_memory() {
        let (a, p, m) = setup(b"ab", AlgorithmId::Naive);
        let exp = expand(&m).unwrap();
        let doc = expanded_to_document(&a, &p, &exp);
        assert!(doc.states.iter().all(|s| s.memory.is_some()));
        let nonempty = doc
            .states
            .iter()
            .any(|s| s.memory.as_ref().is_some_and(|m| !m.is_empty()));
        assert!(nonempty);
    }

    #[test]
    fn bad_documents_are_rejected() {
        let (a, p, m) = setup(b"ab", AlgorithmId::Naive);
        let mut doc = to_document(&a, &p, &m);
        doc.states[1].trans[0] = 99;
        assert!(matches!(
            from_document(&doc),
            Err(FormatError::Structure(_))
        ));
        let mut doc = to_document(&a, &p, &m);
        doc.states[0].shift[1] = 3; // breaks the sink convention
        assert!(from_document(&doc).is_err());
    }
}
