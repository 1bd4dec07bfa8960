//! Helpers shared by the binary-level test suites.

#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ppembed"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// "the {head} of the {modifier}", parsed. Extraction yields exactly one
/// prepositional pair per sentence.
pub fn pp_sentence(head: &str, modifier: &str) -> String {
    format!(
        "1\tthe\tthe\tDET\t2\tdet\n\
         2\t{head}\t{head}\tNOUN\t0\troot\n\
         3\tof\tof\tADP\t5\tcase\n\
         4\tthe\tthe\tDET\t5\tdet\n\
         5\t{modifier}\t{modifier}\tNOUN\t2\tnmod\n\n"
    )
}

pub fn write_corpus(path: &Path, blocks: &[(&str, &str, usize)]) {
    let mut text = String::new();
    for &(head, modifier, times) in blocks {
        for _ in 0..times {
            text.push_str(&pp_sentence(head, modifier));
        }
    }
    fs::write(path, text).unwrap();
}

/// One document: two known entities in the first sentence, then an anaphor
/// whose gold antecedent is the car.
pub const BRIDGING_DOC: &str = r#"[
  {
    "doc_id": "d1",
    "sentences": [
      {
        "tokens": [
          {"surface": "the", "upos": "DET"},
          {"surface": "car", "upos": "NOUN"},
          {"surface": "and", "upos": "CCONJ"},
          {"surface": "the", "upos": "DET"},
          {"surface": "house", "upos": "NOUN"}
        ],
        "markables": [
          {"id": "m_car", "start": 0, "end": 1, "head": 1},
          {"id": "m_house", "start": 3, "end": 4, "head": 4}
        ]
      },
      {
        "tokens": [
          {"surface": "the", "upos": "DET"},
          {"surface": "door", "upos": "NOUN"}
        ],
        "markables": [
          {
            "id": "m_door",
            "start": 0,
            "end": 1,
            "head": 1,
            "is_anaphor": true,
            "gold_antecedents": ["m_car"]
          }
        ]
      }
    ]
  }
]"#;
