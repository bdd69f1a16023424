//! Noun sense disambiguation from preference scores, plus baselines.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use thiserror::Error;

use crate::corpus::{Relation, SenseInventory, Triple};
use crate::prefmodel::{ModelError, ModelKind, PreferenceModel, PreferenceScore, Term};
use crate::taxonomy::Pos;

/// A disambiguation system: one of the models or a baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum System {
    Model(ModelKind),
    MostFrequentSense,
    Random,
}

impl System {
    /// Report order: models first, then baselines.
    pub const ALL: [System; 5] = [
        System::Model(ModelKind::Word2Word),
        System::Model(ModelKind::Word2Class),
        System::Model(ModelKind::Class2Class),
        System::MostFrequentSense,
        System::Random,
    ];

    pub fn as_token(self) -> &'static str {
        match self {
            System::Model(k) => k.as_token(),
            System::MostFrequentSense => "mfs",
            System::Random => "random",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WsdError {
    #[error("unknown noun lemma {0}")]
    UnknownNoun(String),
    #[error("gold sense {gold} out of range for {lemma}")]
    GoldOutOfRange { lemma: String, gold: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One noun occurrence to disambiguate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WsdInstance {
    pub noun_lemma: String,
    pub rel: Relation,
    pub verb_lemma: String,
    /// 1-based gold sense.
    pub gold: Option<usize>,
    pub doc_id: String,
}

impl WsdInstance {
    pub fn new(noun_lemma: &str, rel: Relation, verb_lemma: &str) -> WsdInstance {
        WsdInstance {
            noun_lemma: String::from(noun_lemma),
            rel,
            verb_lemma: String::from(verb_lemma),
            gold: None,
            doc_id: String::new(),
        }
    }

    /// The evaluation instance of a tagged triple; its gold sense is the
    /// position of the triple's noun concept in the inventory.
    pub fn from_triple(triple: &Triple, inventory: &SenseInventory) -> Result<WsdInstance, WsdError> {
        let gold = inventory
            .sense_index(&triple.noun_lemma, Pos::Noun, triple.noun_concept)
            .ok_or_else(|| WsdError::UnknownNoun(triple.noun_lemma.clone()))?;
        Ok(WsdInstance {
            noun_lemma: triple.noun_lemma.clone(),
            rel: triple.rel,
            verb_lemma: triple.verb_lemma.clone(),
            gold: Some(gold),
            doc_id: triple.doc_id.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    /// 1-based sense number.
    Sense(usize),
    NoAnswer,
}

impl Answer {
    pub fn sense(self) -> Option<usize> {
        match self {
            Answer::Sense(s) => Some(s),
            Answer::NoAnswer => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WsdDecision {
    pub answer: Answer,
    /// Score per sense, index 0 = sense 1. Empty for baselines.
    pub scores: Vec<PreferenceScore>,
    pub system: System,
}

/// Per-sense term decomposition of a decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub model: ModelKind,
    /// Index 0 = sense 1; terms in descending order of value.
    pub senses: Vec<Vec<Term>>,
}

/// Highest strictly positive score, lowest index on ties.
pub fn choose(scores: &[PreferenceScore]) -> Answer {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(v) = s.value {
            if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    best.map_or(Answer::NoAnswer, |(i, _)| Answer::Sense(i + 1))
}

/// Disambiguates nouns with a trained model.
#[derive(Debug, Clone, Copy)]
pub struct Disambiguator<'m, 't> {
    model: &'m PreferenceModel<'t>,
    inventory: &'m SenseInventory,
}

impl<'m, 't> Disambiguator<'m, 't> {
    pub fn new(model: &'m PreferenceModel<'t>, inventory: &'m SenseInventory) -> Self {
        Disambiguator { model, inventory }
    }

    fn noun_senses(&self, inst: &WsdInstance) -> Result<&'m [crate::taxonomy::ConceptIx], WsdError> {
        let senses = self
            .inventory
            .senses(&inst.noun_lemma, Pos::Noun)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| WsdError::UnknownNoun(inst.noun_lemma.clone()))?;
        if let Some(g) = inst.gold {
            if g == 0 || g > senses.len() {
                return Err(WsdError::GoldOutOfRange { lemma: inst.noun_lemma.clone(), gold: g });
            }
        }
        Ok(senses)
    }

    pub fn disambiguate(&self, inst: &WsdInstance, kind: ModelKind) -> Result<WsdDecision, WsdError> {
        let senses = self.noun_senses(inst)?;
        let scores = senses
            .iter()
            .map(|&c| self.model.score(kind, c, inst.rel, &inst.verb_lemma, self.inventory))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WsdDecision { answer: choose(&scores), scores, system: System::Model(kind) })
    }

    pub fn explain(&self, inst: &WsdInstance, kind: ModelKind) -> Result<Explanation, WsdError> {
        let senses = self.noun_senses(inst)?;
        let senses = senses
            .iter()
            .map(|&c| self.model.terms(kind, c, inst.rel, &inst.verb_lemma, self.inventory))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Explanation { model: kind, senses })
    }

    pub fn baseline_mfs(&self, inst: &WsdInstance) -> Result<WsdDecision, WsdError> {
        baseline_mfs(self.inventory, inst)
    }
}

/// Always sense 1.
pub fn baseline_mfs(inventory: &SenseInventory, inst: &WsdInstance) -> Result<WsdDecision, WsdError> {
    match inventory.senses(&inst.noun_lemma, Pos::Noun) {
        Some(s) if !s.is_empty() => Ok(WsdDecision {
            answer: Answer::Sense(1),
            scores: Vec::new(),
            system: System::MostFrequentSense,
        }),
        _ => Err(WsdError::UnknownNoun(inst.noun_lemma.clone())),
    }
}

/// Uniformly random sense, for the sampled baseline.
pub fn baseline_random_sample<R: Rng + ?Sized>(
    inventory: &SenseInventory,
    inst: &WsdInstance,
    rng: &mut R,
) -> Result<WsdDecision, WsdError> {
    let n = sense_count(inventory, &inst.noun_lemma)?;
    Ok(WsdDecision {
        answer: Answer::Sense(rng.random_range(1..=n)),
        scores: Vec::new(),
        system: System::Random,
    })
}

/// Number of noun senses of `lemma`.
pub fn sense_count(inventory: &SenseInventory, lemma: &str) -> Result<usize, WsdError> {
    match inventory.senses(lemma, Pos::Noun) {
        Some(s) if !s.is_empty() => Ok(s.len()),
        _ => Err(WsdError::UnknownNoun(String::from(lemma))),
    }
}

/// Expected accuracy of a uniform random choice: mean of 1/#senses.
/// Zero for an empty instance list.
pub fn baseline_random_expectation(
    inventory: &SenseInventory,
    instances: &[WsdInstance],
) -> Result<f64, WsdError> {
    if instances.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for inst in instances {
        sum += 1.0 / sense_count(inventory, &inst.noun_lemma)? as f64;
    }
    Ok(sum / instances.len() as f64)
}
