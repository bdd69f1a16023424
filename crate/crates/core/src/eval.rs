//! Evaluation protocols: per-target k-fold cross-validation on a lexical
//! sample, and whole-document holdout.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{FrequencyTables, Relation, SenseInventory, Triple};
use crate::prefmodel::{ModelKind, PreferenceModel};
use crate::taxonomy::{Pos, Taxonomy};
use crate::wsd::{self, Answer, Disambiguator, System, WsdDecision, WsdError, WsdInstance};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("fold count must be at least 2, got {0}")]
    FoldCount(usize),
    #[error("no evaluation instances")]
    NoInstances,
    #[error("unknown target lemma {0}")]
    UnknownTarget(String),
    #[error("unknown document id {0}")]
    UnknownDoc(String),
    #[error("document {0} listed twice")]
    DuplicateDoc(String),
    #[error(transparent)]
    Wsd(#[from] WsdError),
}

/// Precision, coverage and recall from raw tallies.
///
/// `correct` is an expected value for the analytic random baseline and an
/// integer for every other system.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Metrics {
    pub answered: usize,
    pub correct: f64,
    pub total: usize,
}

impl Metrics {
    pub fn new(correct: usize, answered: usize, total: usize) -> Metrics {
        Metrics { answered, correct: correct as f64, total }
    }

    /// `None` when nothing was answered.
    pub fn precision(&self) -> Option<f64> {
        (self.answered > 0).then(|| self.correct / self.answered as f64)
    }

    pub fn coverage(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.answered as f64 / self.total as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct / self.total as f64
        }
    }

    pub fn add(&mut self, other: &Metrics) {
        self.answered += other.answered;
        self.correct += other.correct;
        self.total += other.total;
    }

    fn record(&mut self, answer: Answer, gold: usize) {
        self.total += 1;
        if let Answer::Sense(s) = answer {
            self.answered += 1;
            if s == gold {
                self.correct += 1.0;
            }
        }
    }
}

/// Tallies decisions against gold senses. No-answers count in `total` only.
pub fn compute_metrics<'a, I>(decisions: I) -> Metrics
where
    I: IntoIterator<Item = (&'a WsdDecision, usize)>,
{
    let mut m = Metrics::default();
    for (d, gold) in decisions {
        m.record(d.answer, gold);
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    CrossValidation { k: usize, seed: u64 },
    DocumentHoldout,
}

/// How the random baseline is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RandomBaseline {
    /// Mean of 1/#senses; no sampling.
    #[default]
    Analytic,
    /// One uniformly drawn sense per instance.
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scope {
    Overall,
    Noun(String),
    Doc(String),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Overall => f.write_str("overall"),
            Scope::Noun(l) => write!(f, "noun:{l}"),
            Scope::Doc(d) => write!(f, "doc:{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub system: System,
    pub rel: Relation,
    pub scope: Scope,
    pub metrics: Metrics,
}

/// Decisions of every system on one held-out instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub instance: WsdInstance,
    /// Fold number, or position of the held-out document.
    pub group: usize,
    pub gold: usize,
    /// Answers of word2word, word2class, class2class and MFS, in that order.
    pub answers: [Answer; 4],
    /// Drawn sense when the random baseline is sampled.
    pub random: Option<usize>,
}

impl Outcome {
    pub fn answer(&self, kind: ModelKind) -> Answer {
        match kind {
            ModelKind::Word2Word => self.answers[0],
            ModelKind::Word2Class => self.answers[1],
            ModelKind::Class2Class => self.answers[2],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub protocol: Protocol,
    pub random: RandomBaseline,
    pub relations: Vec<Relation>,
    pub rows: Vec<ReportRow>,
    pub outcomes: Vec<Outcome>,
}

impl EvalReport {
    pub fn get(&self, system: System, rel: Relation, scope: &Scope) -> Option<&Metrics> {
        self.rows
            .iter()
            .find(|r| r.system == system && r.rel == rel && &r.scope == scope)
            .map(|r| &r.metrics)
    }

    pub fn overall(&self, system: System, rel: Relation) -> Option<&Metrics> {
        self.get(system, rel, &Scope::Overall)
    }
}

/// Evaluation settings shared by both protocols.
#[derive(Debug, Clone)]
pub struct Evaluation<'a> {
    pub taxonomy: &'a Taxonomy,
    pub inventory: &'a SenseInventory,
    /// Relations whose instances are evaluated.
    pub relations: Vec<Relation>,
    pub random: RandomBaseline,
}

/// Per-target fold of every evaluated triple (triple index → fold).
///
/// Each target's instances are shuffled independently with one seeded
/// stream, in lemma order, then dealt round-robin into `k` folds.
pub fn assign_folds(
    triples: &[Triple],
    targets: &BTreeSet<String>,
    relations: &[Relation],
    k: usize,
    seed: u64,
) -> BTreeMap<usize, usize> {
    let mut by_target: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, t) in triples.iter().enumerate() {
        if targets.contains(&t.noun_lemma) && relations.contains(&t.rel) {
            by_target.entry(t.noun_lemma.as_str()).or_default().push(i);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = BTreeMap::new();
    for (_, mut idx) in by_target {
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            folds.insert(i, pos % k);
        }
    }
    folds
}

impl<'a> Evaluation<'a> {
    pub fn new(taxonomy: &'a Taxonomy, inventory: &'a SenseInventory) -> Self {
        Evaluation {
            taxonomy,
            inventory,
            relations: Relation::ALL.to_vec(),
            random: RandomBaseline::Analytic,
        }
    }

    pub fn crossvalidate(
        &self,
        triples: &[Triple],
        targets: &BTreeSet<String>,
        k: usize,
        seed: u64,
    ) -> Result<EvalReport, EvalError> {
        if k < 2 {
            return Err(EvalError::FoldCount(k));
        }
        for t in targets {
            if self.inventory.senses(t, Pos::Noun).is_none() {
                return Err(EvalError::UnknownTarget(t.clone()));
            }
        }
        let folds = assign_folds(triples, targets, &self.relations, k, seed);
        if folds.is_empty() {
            return Err(EvalError::NoInstances);
        }
        let mut rng = self.random_rng();
        let mut outcomes = Vec::with_capacity(folds.len());
        for fold in 0..k {
            let held: Vec<usize> =
                folds.iter().filter(|(_, &f)| f == fold).map(|(&i, _)| i).collect();
            if held.is_empty() {
                continue;
            }
            let training = triples
                .iter()
                .enumerate()
                .filter(|(i, _)| folds.get(i) != Some(&fold))
                .map(|(_, t)| t);
            let tables = FrequencyTables::from_triples(training);
            let tests: Vec<&Triple> = held.iter().map(|&i| &triples[i]).collect();
            self.decide(&tables, &tests, fold, rng.as_mut(), &mut outcomes)?;
        }
        Ok(self.report(Protocol::CrossValidation { k, seed }, outcomes, |o| {
            Scope::Noun(o.instance.noun_lemma.clone())
        }))
    }

    /// Withdraws each document in turn and evaluates all of its instances.
    pub fn holdout_documents(
        &self,
        triples: &[Triple],
        docs: &[String],
    ) -> Result<EvalReport, EvalError> {
        let known: BTreeSet<&str> = triples.iter().map(|t| t.doc_id.as_str()).collect();
        let mut seen = BTreeSet::new();
        for d in docs {
            if !known.contains(d.as_str()) {
                return Err(EvalError::UnknownDoc(d.clone()));
            }
            if !seen.insert(d.as_str()) {
                return Err(EvalError::DuplicateDoc(d.clone()));
            }
        }
        let mut rng = self.random_rng();
        let mut outcomes = Vec::new();
        for (group, doc) in docs.iter().enumerate() {
            let tables = FrequencyTables::from_triples(triples.iter().filter(|t| &t.doc_id != doc));
            let tests: Vec<&Triple> = triples
                .iter()
                .filter(|t| &t.doc_id == doc && self.relations.contains(&t.rel))
                .collect();
            self.decide(&tables, &tests, group, rng.as_mut(), &mut outcomes)?;
        }
        if outcomes.is_empty() {
            return Err(EvalError::NoInstances);
        }
        Ok(self.report(Protocol::DocumentHoldout, outcomes, |o| {
            Scope::Doc(o.instance.doc_id.clone())
        }))
    }

    fn random_rng(&self) -> Option<ChaCha8Rng> {
        match self.random {
            RandomBaseline::Analytic => None,
            RandomBaseline::Sampled { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(1);
                Some(rng)
            }
        }
    }

    fn decide(
        &self,
        tables: &FrequencyTables,
        tests: &[&Triple],
        group: usize,
        mut rng: Option<&mut ChaCha8Rng>,
        out: &mut Vec<Outcome>,
    ) -> Result<(), EvalError> {
        let model = PreferenceModel::train(self.taxonomy, tables.clone());
        let wsd = Disambiguator::new(&model, self.inventory);
        for t in tests {
            let instance = WsdInstance::from_triple(t, self.inventory)?;
            let gold = instance.gold.expect("gold from triple");
            let answers = [
                wsd.disambiguate(&instance, ModelKind::Word2Word)?.answer,
                wsd.disambiguate(&instance, ModelKind::Word2Class)?.answer,
                wsd.disambiguate(&instance, ModelKind::Class2Class)?.answer,
                wsd.baseline_mfs(&instance)?.answer,
            ];
            let random = match rng.as_deref_mut() {
                Some(r) => wsd::baseline_random_sample(self.inventory, &instance, r)?.answer.sense(),
                None => None,
            };
            out.push(Outcome { instance, group, gold, answers, random });
        }
        Ok(())
    }

    fn report(
        &self,
        protocol: Protocol,
        outcomes: Vec<Outcome>,
        breakdown: impl Fn(&Outcome) -> Scope,
    ) -> EvalReport {
        let mut table: BTreeMap<(System, Relation, Scope), Metrics> = BTreeMap::new();
        for o in &outcomes {
            let scopes = [Scope::Overall, breakdown(o)];
            let senses = wsd::sense_count(self.inventory, &o.instance.noun_lemma)
                .expect("validated instance");
            for system in System::ALL {
                let tally = match system {
                    System::Model(k) => {
                        let mut m = Metrics::default();
                        m.record(o.answer(k), o.gold);
                        m
                    }
                    System::MostFrequentSense => {
                        let mut m = Metrics::default();
                        m.record(o.answers[3], o.gold);
                        m
                    }
                    System::Random => match o.random {
                        Some(s) => {
                            let mut m = Metrics::default();
                            m.record(Answer::Sense(s), o.gold);
                            m
                        }
                        None => Metrics { answered: 1, correct: 1.0 / senses as f64, total: 1 },
                    },
                };
                for scope in &scopes {
                    table
                        .entry((system, o.instance.rel, scope.clone()))
                        .or_default()
                        .add(&tally);
                }
            }
        }
        let mut rows = Vec::new();
        for system in System::ALL {
            for &rel in &self.relations {
                for ((s, r, scope), metrics) in table.range((system, rel, Scope::Overall)..) {
                    if *s != system || *r != rel {
                        break;
                    }
                    rows.push(ReportRow { system, rel, scope: scope.clone(), metrics: *metrics });
                }
            }
        }
        EvalReport { protocol, random: self.random, relations: self.relations.clone(), rows, outcomes }
    }
}
