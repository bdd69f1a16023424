//! Trained-model dump: every direct count and every nonzero class estimate,
//! one record per line.
//!
//! ```text
//! # selpref-model v1 seed=0 taxonomy=<sha256> senses=<sha256> triples=<sha256>
//! fr_cn <cn> <count>
//! fr_cv <cv> <count>
//! fr_cn_rel_v <rel> <verb> <cn> <count>
//! fr_cn_rel_cv <rel> <cv> <cn> <count>
//! fr_rel_v <rel> <verb> <count>
//! fr_rel_cv <rel> <cv> <count>
//! frhat <c> <value>
//! frhat_cn_rel_v <rel> <verb> <cn> <value>
//! frhat_cn_rel_cv <rel> <cv> <cn> <value>
//! frhat_rel_cv <rel> <cv> <value>
//! ```
//!
//! Fields are tab-separated. Estimates are written with 12 significant digits.

use std::fmt::Write as _;

use selpref_core::{ClassEstimates, ConceptIx, FrequencyTables, Relation, Taxonomy};
use sha2::{Digest, Sha256};
use thiserror::Error;

const MAGIC: &str = "# selpref-model v1";

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("missing or unrecognised dump header")]
    Header,
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("{file} digest mismatch: dump was trained on different input")]
    DigestMismatch { file: &'static str },
}

/// SHA-256 of the raw bytes, lowercase hex.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Content digests of the training inputs, recorded in the header.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InputDigests {
    pub taxonomy: String,
    pub senses: String,
    pub triples: String,
}

impl InputDigests {
    pub fn of(taxonomy: &[u8], senses: &[u8], triples: &[u8]) -> InputDigests {
        InputDigests { taxonomy: digest(taxonomy), senses: digest(senses), triples: digest(triples) }
    }

    /// Checks taxonomy and senses digests, and the triples digest when given.
    pub fn check(&self, taxonomy: &str, senses: &str, triples: Option<&str>) -> Result<(), DumpError> {
        if self.taxonomy != taxonomy {
            return Err(DumpError::DigestMismatch { file: "taxonomy" });
        }
        if self.senses != senses {
            return Err(DumpError::DigestMismatch { file: "senses" });
        }
        if triples.is_some_and(|t| t != self.triples) {
            return Err(DumpError::DigestMismatch { file: "triples" });
        }
        Ok(())
    }
}

/// Plain decimal with 12 significant digits, trailing zeros trimmed.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".to_string() } else { v.to_string() };
    }
    let sci = format!("{:.11e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = String::new();
    if v < 0.0 {
        out.push('-');
    }
    if exp >= 0 {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    }
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.').len();
        out.truncate(trimmed);
    }
    out
}

/// Serialises counts and estimates. Output is deterministic.
pub fn write_dump(
    taxonomy: &Taxonomy,
    tables: &FrequencyTables,
    estimates: &ClassEstimates,
    digests: &InputDigests,
    seed: u64,
) -> String {
    let id = |c: &ConceptIx| taxonomy.id(*c).as_str();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{MAGIC}\tseed={seed}\ttaxonomy={}\tsenses={}\ttriples={}",
        digests.taxonomy, digests.senses, digests.triples
    );
    for (c, n) in &tables.fr_cn {
        let _ = writeln!(s, "fr_cn\t{}\t{n}", id(c));
    }
    for (c, n) in &tables.fr_cv {
        let _ = writeln!(s, "fr_cv\t{}\t{n}", id(c));
    }
    for (rel, verbs) in &tables.fr_cn_rel_v {
        for (v, nouns) in verbs {
            for (c, n) in nouns {
                let _ = writeln!(s, "fr_cn_rel_v\t{rel}\t{v}\t{}\t{n}", id(c));
            }
        }
    }
    for (rel, verbs) in &tables.fr_cn_rel_cv {
        for (cv, nouns) in verbs {
            for (c, n) in nouns {
                let _ = writeln!(s, "fr_cn_rel_cv\t{rel}\t{}\t{}\t{n}", id(cv), id(c));
            }
        }
    }
    for (rel, verbs) in &tables.fr_rel_v {
        for (v, n) in verbs {
            let _ = writeln!(s, "fr_rel_v\t{rel}\t{v}\t{n}");
        }
    }
    for (rel, verbs) in &tables.fr_rel_cv {
        for (cv, n) in verbs {
            let _ = writeln!(s, "fr_rel_cv\t{rel}\t{}\t{n}", id(cv));
        }
    }
    for (c, x) in &estimates.class_freq {
        let _ = writeln!(s, "frhat\t{}\t{}", id(c), format_sig12(*x));
    }
    for (rel, verbs) in &estimates.cn_rel_v {
        for (v, nouns) in verbs {
            for (c, x) in nouns {
                let _ = writeln!(s, "frhat_cn_rel_v\t{rel}\t{v}\t{}\t{}", id(c), format_sig12(*x));
            }
        }
    }
    for (rel, verbs) in &estimates.cn_rel_cv {
        for (cv, nouns) in verbs {
            for (c, x) in nouns {
                let _ = writeln!(s, "frhat_cn_rel_cv\t{rel}\t{}\t{}\t{}", id(cv), id(c), format_sig12(*x));
            }
        }
    }
    for (rel, verbs) in &estimates.rel_cv {
        for (cv, x) in verbs {
            let _ = writeln!(s, "frhat_rel_cv\t{rel}\t{}\t{}", id(cv), format_sig12(*x));
        }
    }
    s
}

/// A dump read back against its taxonomy.
#[derive(Debug, Clone)]
pub struct ModelDump {
    pub seed: u64,
    pub digests: InputDigests,
    pub tables: FrequencyTables,
    pub estimates: ClassEstimates,
}

pub fn read_dump(text: &str, taxonomy: &Taxonomy) -> Result<ModelDump, DumpError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(DumpError::Header)?;
    let mut parts = header.split('\t');
    if parts.next() != Some(MAGIC) {
        return Err(DumpError::Header);
    }
    let mut digests = InputDigests::default();
    let mut seed = 0;
    for kv in parts {
        match kv.split_once('=').ok_or(DumpError::Header)? {
            ("seed", v) => seed = v.parse().map_err(|_| DumpError::Header)?,
            ("taxonomy", v) => digests.taxonomy = v.to_string(),
            ("senses", v) => digests.senses = v.to_string(),
            ("triples", v) => digests.triples = v.to_string(),
            _ => return Err(DumpError::Header),
        }
    }

    let mut tables = FrequencyTables::new();
    let mut est = ClassEstimates::default();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| DumpError::Malformed { line: line_no, msg: msg.to_string() };
        let f: Vec<&str> = line.split('\t').collect();
        let concept = |s: &str| taxonomy.get(s).ok_or_else(|| bad(&format!("unknown concept {s}")));
        let rel = |s: &str| Relation::from_token(s).ok_or_else(|| bad("unknown relation"));
        let count = |s: &str| s.parse::<u64>().map_err(|_| bad("bad count"));
        let value = |s: &str| s.parse::<f64>().map_err(|_| bad("bad value"));
        let arity = |n: usize| if f.len() == n { Ok(()) } else { Err(bad("wrong field count")) };
        match f[0] {
            "fr_cn" => {
                arity(3)?;
                tables.fr_cn.insert(concept(f[1])?, count(f[2])?);
            }
            "fr_cv" => {
                arity(3)?;
                tables.fr_cv.insert(concept(f[1])?, count(f[2])?);
            }
            "fr_cn_rel_v" => {
                arity(5)?;
                tables
                    .fr_cn_rel_v
                    .entry(rel(f[1])?)
                    .or_default()
                    .entry(f[2].to_string())
                    .or_default()
                    .insert(concept(f[3])?, count(f[4])?);
            }
            "fr_cn_rel_cv" => {
                arity(5)?;
                tables
                    .fr_cn_rel_cv
                    .entry(rel(f[1])?)
                    .or_default()
                    .entry(concept(f[2])?)
                    .or_default()
                    .insert(concept(f[3])?, count(f[4])?);
            }
            "fr_rel_v" => {
                arity(4)?;
                tables.fr_rel_v.entry(rel(f[1])?).or_default().insert(f[2].to_string(), count(f[3])?);
            }
            "fr_rel_cv" => {
                arity(4)?;
                tables.fr_rel_cv.entry(rel(f[1])?).or_default().insert(concept(f[2])?, count(f[3])?);
            }
            "frhat" => {
                arity(3)?;
                est.class_freq.insert(concept(f[1])?, value(f[2])?);
            }
            "frhat_cn_rel_v" => {
                arity(5)?;
                est.cn_rel_v
                    .entry(rel(f[1])?)
                    .or_default()
                    .entry(f[2].to_string())
                    .or_default()
                    .insert(concept(f[3])?, value(f[4])?);
            }
            "frhat_cn_rel_cv" => {
                arity(5)?;
                est.cn_rel_cv
                    .entry(rel(f[1])?)
                    .or_default()
                    .entry(concept(f[2])?)
                    .or_default()
                    .insert(concept(f[3])?, value(f[4])?);
            }
            "frhat_rel_cv" => {
                arity(4)?;
                est.rel_cv.entry(rel(f[1])?).or_default().insert(concept(f[2])?, value(f[3])?);
            }
            other => return Err(bad(&format!("unknown table tag {other:?}"))),
        }
    }
    Ok(ModelDump { seed, digests, tables, estimates: est })
}
