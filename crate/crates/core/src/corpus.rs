//! Sense inventory, observed triples and direct frequency counts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::taxonomy::{ConceptIx, Pos, Taxonomy};

/// Grammatical relation between a verb and a noun.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Subject,
    Object,
}

impl Relation {
    pub const ALL: [Relation; 2] = [Relation::Subject, Relation::Object];

    pub fn as_token(self) -> &'static str {
        match self {
            Relation::Subject => "subj",
            Relation::Object => "obj",
        }
    }

    pub fn from_token(token: &str) -> Option<Relation> {
        match token {
            "subj" => Some(Relation::Subject),
            "obj" => Some(Relation::Object),
            _ => None,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown concept {0}")]
    UnknownConcept(String),
    #[error("concept {concept} is not a {pos} concept")]
    PosMismatch { concept: String, pos: Pos },
    #[error("duplicate inventory entry for {lemma} ({pos})")]
    DuplicateEntry { lemma: String, pos: Pos },
    #[error("concept {concept} listed twice for {lemma}")]
    DuplicateSense { lemma: String, concept: String },
    #[error("unknown {pos} lemma {lemma}")]
    UnknownLemma { lemma: String, pos: Pos },
    #[error("concept {concept} is not a sense of {lemma}")]
    NotASense { lemma: String, concept: String },
}

/// Ordered word senses per (lemma, part of speech). Position 0 is sense 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SenseInventory {
    nouns: BTreeMap<String, Vec<ConceptIx>>,
    verbs: BTreeMap<String, Vec<ConceptIx>>,
}

impl SenseInventory {
    pub fn new() -> SenseInventory {
        SenseInventory::default()
    }

    pub fn insert(
        &mut self,
        taxonomy: &Taxonomy,
        lemma: &str,
        pos: Pos,
        senses: Vec<ConceptIx>,
    ) -> Result<(), CorpusError> {
        for (i, &c) in senses.iter().enumerate() {
            if c.index() >= taxonomy.len() {
                return Err(CorpusError::UnknownConcept(alloc::format!("#{}", c.index())));
            }
            if taxonomy.pos(c) != pos {
                return Err(CorpusError::PosMismatch {
                    concept: String::from(taxonomy.id(c).as_str()),
                    pos,
                });
            }
            if senses[..i].contains(&c) {
                return Err(CorpusError::DuplicateSense {
                    lemma: String::from(lemma),
                    concept: String::from(taxonomy.id(c).as_str()),
                });
            }
        }
        let table = self.table_mut(pos);
        if table.contains_key(lemma) {
            return Err(CorpusError::DuplicateEntry { lemma: String::from(lemma), pos });
        }
        table.insert(String::from(lemma), senses);
        Ok(())
    }

    fn table(&self, pos: Pos) -> &BTreeMap<String, Vec<ConceptIx>> {
        match pos {
            Pos::Noun => &self.nouns,
            Pos::Verb => &self.verbs,
        }
    }

    fn table_mut(&mut self, pos: Pos) -> &mut BTreeMap<String, Vec<ConceptIx>> {
        match pos {
            Pos::Noun => &mut self.nouns,
            Pos::Verb => &mut self.verbs,
        }
    }

    pub fn senses(&self, lemma: &str, pos: Pos) -> Option<&[ConceptIx]> {
        self.table(pos).get(lemma).map(Vec::as_slice)
    }

    /// 1-based sense number of `concept` for `lemma`.
    pub fn sense_index(&self, lemma: &str, pos: Pos, concept: ConceptIx) -> Option<usize> {
        self.senses(lemma, pos)?.iter().position(|&c| c == concept).map(|i| i + 1)
    }

    pub fn lemmas(&self, pos: Pos) -> impl Iterator<Item = (&str, &[ConceptIx])> {
        self.table(pos).iter().map(|(l, s)| (l.as_str(), s.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.nouns.len() + self.verbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One observed (noun sense, relation, verb sense) event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub noun_lemma: String,
    pub noun_concept: ConceptIx,
    pub rel: Relation,
    pub verb_lemma: String,
    pub verb_concept: ConceptIx,
    pub doc_id: String,
}

impl Triple {
    /// Builds a triple, checking both concepts against the lemmas' senses.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        inventory: &SenseInventory,
        taxonomy: &Taxonomy,
        verb_lemma: &str,
        verb_concept: ConceptIx,
        rel: Relation,
        noun_lemma: &str,
        noun_concept: ConceptIx,
        doc_id: &str,
    ) -> Result<Triple, CorpusError> {
        check_sense(inventory, taxonomy, verb_lemma, Pos::Verb, verb_concept)?;
        check_sense(inventory, taxonomy, noun_lemma, Pos::Noun, noun_concept)?;
        Ok(Triple {
            noun_lemma: String::from(noun_lemma),
            noun_concept,
            rel,
            verb_lemma: String::from(verb_lemma),
            verb_concept,
            doc_id: String::from(doc_id),
        })
    }
}

fn check_sense(
    inventory: &SenseInventory,
    taxonomy: &Taxonomy,
    lemma: &str,
    pos: Pos,
    concept: ConceptIx,
) -> Result<(), CorpusError> {
    let senses = inventory
        .senses(lemma, pos)
        .ok_or_else(|| CorpusError::UnknownLemma { lemma: String::from(lemma), pos })?;
    if senses.contains(&concept) {
        Ok(())
    } else {
        Err(CorpusError::NotASense {
            lemma: String::from(lemma),
            concept: String::from(taxonomy.id(concept).as_str()),
        })
    }
}

/// Direct corpus counts.
///
/// Concept occurrence counts (`fr_cn`, `fr_cv`) pool both relations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTables {
    /// Noun-concept occurrences.
    pub fr_cn: BTreeMap<ConceptIx, u64>,
    /// Verb-concept occurrences, the verb-side analogue of `fr_cn`.
    pub fr_cv: BTreeMap<ConceptIx, u64>,
    /// relation → verb lemma → noun concept → count.
    pub fr_cn_rel_v: BTreeMap<Relation, BTreeMap<String, BTreeMap<ConceptIx, u64>>>,
    /// relation → verb concept → noun concept → count.
    pub fr_cn_rel_cv: BTreeMap<Relation, BTreeMap<ConceptIx, BTreeMap<ConceptIx, u64>>>,
    /// relation → verb lemma → count.
    pub fr_rel_v: BTreeMap<Relation, BTreeMap<String, u64>>,
    /// relation → verb concept → count.
    pub fr_rel_cv: BTreeMap<Relation, BTreeMap<ConceptIx, u64>>,
}

impl FrequencyTables {
    pub fn new() -> FrequencyTables {
        FrequencyTables::default()
    }

    pub fn from_triples<'a, I>(triples: I) -> FrequencyTables
    where
        I: IntoIterator<Item = &'a Triple>,
    {
        let mut tables = FrequencyTables::new();
        for t in triples {
            tables.add(t);
        }
        tables
    }

    pub fn add(&mut self, t: &Triple) {
        *self.fr_cn.entry(t.noun_concept).or_default() += 1;
        *self.fr_cv.entry(t.verb_concept).or_default() += 1;
        *self
            .fr_cn_rel_v
            .entry(t.rel)
            .or_default()
            .entry(t.verb_lemma.clone())
            .or_default()
            .entry(t.noun_concept)
            .or_default() += 1;
        *self
            .fr_cn_rel_cv
            .entry(t.rel)
            .or_default()
            .entry(t.verb_concept)
            .or_default()
            .entry(t.noun_concept)
            .or_default() += 1;
        *self.fr_rel_v.entry(t.rel).or_default().entry(t.verb_lemma.clone()).or_default() += 1;
        *self.fr_rel_cv.entry(t.rel).or_default().entry(t.verb_concept).or_default() += 1;
    }

    /// Table-wise sum.
    pub fn merge(&mut self, other: &FrequencyTables) {
        fn add_map<K: Ord + Clone>(into: &mut BTreeMap<K, u64>, from: &BTreeMap<K, u64>) {
            for (k, v) in from {
                *into.entry(k.clone()).or_default() += v;
            }
        }
        add_map(&mut self.fr_cn, &other.fr_cn);
        add_map(&mut self.fr_cv, &other.fr_cv);
        for (rel, verbs) in &other.fr_cn_rel_v {
            for (v, nouns) in verbs {
                add_map(self.fr_cn_rel_v.entry(*rel).or_default().entry(v.clone()).or_default(), nouns);
            }
        }
        for (rel, verbs) in &other.fr_cn_rel_cv {
            for (cv, nouns) in verbs {
                add_map(self.fr_cn_rel_cv.entry(*rel).or_default().entry(*cv).or_default(), nouns);
            }
        }
        for (rel, m) in &other.fr_rel_v {
            add_map(self.fr_rel_v.entry(*rel).or_default(), m);
        }
        for (rel, m) in &other.fr_rel_cv {
            add_map(self.fr_rel_cv.entry(*rel).or_default(), m);
        }
    }

    /// fr(cn rel v)
    pub fn cn_rel_v(&self, cn: ConceptIx, rel: Relation, verb: &str) -> u64 {
        self.fr_cn_rel_v
            .get(&rel)
            .and_then(|m| m.get(verb))
            .and_then(|m| m.get(&cn))
            .copied()
            .unwrap_or(0)
    }

    /// fr(rel v)
    pub fn rel_v(&self, rel: Relation, verb: &str) -> u64 {
        self.fr_rel_v.get(&rel).and_then(|m| m.get(verb)).copied().unwrap_or(0)
    }

    /// Number of triples counted.
    pub fn total(&self) -> u64 {
        self.fr_cn.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.fr_cn.is_empty()
    }
}
