//! Line-oriented text formats for taxonomies, sense inventories, triples,
//! disambiguation instances and plain id lists.
//!
//! All formats are tab-separated, skip blank lines and `#` comments, and
//! report errors with 1-based line numbers. The `parse_*` functions collect
//! every line error; the `load_*` functions fail on the first one.

use std::collections::BTreeMap;
use std::io::{self, Read};

use selpref_core::{
    ConceptEntry, ConceptId, ConceptIx, CorpusError, Pos, Relation, SenseInventory, Taxonomy,
    TaxonomyError, Triple, WsdInstance,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Taxonomy { line: usize, source: TaxonomyError },
    #[error("{0}")]
    Structure(TaxonomyError),
    #[error("line {line}: {source}")]
    Corpus { line: usize, source: CorpusError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl LoadError {
    pub fn line(&self) -> Option<usize> {
        match self {
            LoadError::Malformed { line, .. }
            | LoadError::Taxonomy { line, .. }
            | LoadError::Corpus { line, .. } => Some(*line),
            LoadError::Structure(_) | LoadError::Io(_) => None,
        }
    }
}

fn malformed(line: usize, msg: impl Into<String>) -> LoadError {
    LoadError::Malformed { line, msg: msg.into() }
}

/// Non-blank, non-comment lines with their 1-based numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.strip_suffix('\r').unwrap_or(l);
        if l.trim().is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l))
        }
    })
}

fn fields(line: usize, record: &str, n: usize) -> Result<Vec<&str>, LoadError> {
    let f: Vec<&str> = record.split('\t').collect();
    if f.len() != n {
        return Err(malformed(line, format!("expected {n} tab-separated fields, found {}", f.len())));
    }
    if let Some(i) = f.iter().position(|s| s.is_empty()) {
        return Err(malformed(line, format!("field {} is empty", i + 1)));
    }
    Ok(f)
}

fn parse_pos(line: usize, token: &str) -> Result<Pos, LoadError> {
    Pos::from_token(token).ok_or_else(|| malformed(line, format!("unknown part of speech {token:?}")))
}

fn parse_rel(line: usize, token: &str) -> Result<Relation, LoadError> {
    Relation::from_token(token).ok_or_else(|| malformed(line, format!("unknown relation {token:?}")))
}

fn read_all(mut r: impl Read) -> Result<String, LoadError> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

fn concept_id(line: usize, s: &str) -> Result<ConceptId, LoadError> {
    ConceptId::new(s).map_err(|source| LoadError::Taxonomy { line, source })
}

/// `<concept_id>\t<n|v>\t<comma-separated parents or ->`
///
/// Line errors are all collected; structural checks (duplicates, dangling
/// parents, part-of-speech mismatches, cycles) run once every line parses.
pub fn parse_taxonomy(text: &str) -> Result<Taxonomy, Vec<LoadError>> {
    let mut errors = Vec::new();
    let mut entries: Vec<(usize, ConceptEntry)> = Vec::new();
    for (line, rec) in records(text) {
        let parsed = (|| {
            let f = fields(line, rec, 3)?;
            let id = concept_id(line, f[0])?;
            let pos = parse_pos(line, f[1])?;
            let parents = if f[2] == "-" {
                Vec::new()
            } else {
                f[2].split(',').map(|p| concept_id(line, p)).collect::<Result<Vec<_>, _>>()?
            };
            Ok(ConceptEntry { id, pos, parents })
        })();
        match parsed {
            Ok(e) => entries.push((line, e)),
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let mut declared: BTreeMap<&str, (usize, Pos)> = BTreeMap::new();
    for (line, e) in &entries {
        if declared.insert(e.id.as_str(), (*line, e.pos)).is_some() {
            errors.push(LoadError::Taxonomy {
                line: *line,
                source: TaxonomyError::DuplicateConcept(e.id.to_string()),
            });
        }
    }
    for (line, e) in &entries {
        for p in &e.parents {
            match declared.get(p.as_str()) {
                None => errors.push(LoadError::Taxonomy {
                    line: *line,
                    source: TaxonomyError::DanglingParent {
                        concept: e.id.to_string(),
                        parent: p.to_string(),
                    },
                }),
                Some((_, pos)) if *pos != e.pos => errors.push(LoadError::Taxonomy {
                    line: *line,
                    source: TaxonomyError::PosMismatch {
                        concept: e.id.to_string(),
                        pos: e.pos,
                        parent: p.to_string(),
                    },
                }),
                Some(_) => {}
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Taxonomy::from_entries(entries.into_iter().map(|(_, e)| e))
        .map_err(|e| vec![LoadError::Structure(e)])
}

pub fn load_taxonomy(r: impl Read) -> Result<Taxonomy, LoadError> {
    parse_taxonomy(&read_all(r)?).map_err(|mut v| v.remove(0))
}

fn resolve(taxonomy: &Taxonomy, line: usize, id: &str) -> Result<ConceptIx, LoadError> {
    taxonomy.get(id).ok_or_else(|| LoadError::Corpus {
        line,
        source: CorpusError::UnknownConcept(id.to_string()),
    })
}

/// `<lemma>\t<n|v>\t<comma-separated concept ids in sense order>`
///
/// Bad lines are reported and left out of the returned inventory.
pub fn parse_inventory(text: &str, taxonomy: &Taxonomy) -> (SenseInventory, Vec<LoadError>) {
    let mut inv = SenseInventory::new();
    let mut errors = Vec::new();
    for (line, rec) in records(text) {
        let res = (|| {
            let f = fields(line, rec, 3)?;
            let pos = parse_pos(line, f[1])?;
            let senses = f[2]
                .split(',')
                .map(|id| resolve(taxonomy, line, id))
                .collect::<Result<Vec<_>, _>>()?;
            inv.insert(taxonomy, f[0], pos, senses)
                .map_err(|source| LoadError::Corpus { line, source })
        })();
        if let Err(e) = res {
            errors.push(e);
        }
    }
    (inv, errors)
}

pub fn load_inventory(r: impl Read, taxonomy: &Taxonomy) -> Result<SenseInventory, LoadError> {
    let (inv, mut errors) = parse_inventory(&read_all(r)?, taxonomy);
    if errors.is_empty() {
        Ok(inv)
    } else {
        Err(errors.remove(0))
    }
}

/// `<verb_lemma>\t<verb_concept>\t<subj|obj>\t<noun_lemma>\t<noun_concept>\t<doc_id>`
pub fn parse_triples(
    text: &str,
    taxonomy: &Taxonomy,
    inventory: &SenseInventory,
) -> (Vec<Triple>, Vec<LoadError>) {
    let mut triples = Vec::new();
    let mut errors = Vec::new();
    for (line, rec) in records(text) {
        let res = (|| {
            let f = fields(line, rec, 6)?;
            let cv = resolve(taxonomy, line, f[1])?;
            let rel = parse_rel(line, f[2])?;
            let cn = resolve(taxonomy, line, f[4])?;
            Triple::new(inventory, taxonomy, f[0], cv, rel, f[3], cn, f[5])
                .map_err(|source| LoadError::Corpus { line, source })
        })();
        match res {
            Ok(t) => triples.push(t),
            Err(e) => errors.push(e),
        }
    }
    (triples, errors)
}

pub fn load_triples(
    r: impl Read,
    taxonomy: &Taxonomy,
    inventory: &SenseInventory,
) -> Result<Vec<Triple>, LoadError> {
    let (triples, mut errors) = parse_triples(&read_all(r)?, taxonomy, inventory);
    if errors.is_empty() {
        Ok(triples)
    } else {
        Err(errors.remove(0))
    }
}

/// `<noun_lemma>\t<subj|obj>\t<verb_lemma>`, returned with line numbers.
pub fn parse_instances(text: &str) -> Result<Vec<(usize, WsdInstance)>, LoadError> {
    records(text)
        .map(|(line, rec)| {
            let f = fields(line, rec, 3)?;
            Ok((line, WsdInstance::new(f[0], parse_rel(line, f[1])?, f[2])))
        })
        .collect()
}

/// One token per line (target lemmas, document ids).
pub fn parse_list(text: &str) -> Result<Vec<String>, LoadError> {
    records(text)
        .map(|(line, rec)| {
            let t = rec.trim();
            if t.chars().any(char::is_whitespace) {
                Err(malformed(line, format!("expected a single token, found {t:?}")))
            } else {
                Ok(t.to_string())
            }
        })
        .collect()
}
