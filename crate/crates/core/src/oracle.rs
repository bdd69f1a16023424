//! Reference implementation by naive enumeration, and a seeded random corpus
//! generator. Test support only.
//!
//! Everything here recomputes closures by depth-first search over the raw
//! parent/child edges and counts directly from the triple list, without the
//! cached ancestor sets or the frequency tables.

use alloc::collections::{BTreeMap, BTreeSet};
use core::cell::RefCell;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Relation, SenseInventory, Triple};
use crate::taxonomy::{ConceptEntry, ConceptId, ConceptIx, Pos, Taxonomy};

pub fn ancestors(t: &Taxonomy, c: ConceptIx) -> BTreeSet<ConceptIx> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![c];
    while let Some(x) = stack.pop() {
        if seen.insert(x) {
            stack.extend_from_slice(t.parents(x));
        }
    }
    seen
}

pub fn descendants(t: &Taxonomy, c: ConceptIx) -> BTreeSet<ConceptIx> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![c];
    while let Some(x) = stack.pop() {
        if seen.insert(x) {
            stack.extend_from_slice(t.children(x));
        }
    }
    seen
}

pub fn classes(t: &Taxonomy, c: ConceptIx) -> f64 {
    ancestors(t, c).len() as f64
}

/// f̂r(c) over noun occurrences (noun concepts) or verb occurrences (verb
/// concepts).
pub fn class_freq(t: &Taxonomy, triples: &[Triple], c: ConceptIx) -> f64 {
    descendants(t, c)
        .into_iter()
        .map(|d| {
            let n = triples.iter().filter(|x| x.noun_concept == d || x.verb_concept == d).count();
            n as f64 / classes(t, d)
        })
        .sum()
}

pub fn class_rel_verb_freq(t: &Taxonomy, triples: &[Triple], cn: ConceptIx, rel: Relation, verb: &str) -> f64 {
    descendants(t, cn)
        .into_iter()
        .map(|d| {
            let n = triples
                .iter()
                .filter(|x| x.noun_concept == d && x.rel == rel && x.verb_lemma == verb)
                .count();
            n as f64 / classes(t, d)
        })
        .sum()
}

pub fn class_rel_class_freq(t: &Taxonomy, triples: &[Triple], cn: ConceptIx, rel: Relation, cv: ConceptIx) -> f64 {
    let mut sum = 0.0;
    for dn in descendants(t, cn) {
        for dv in descendants(t, cv) {
            let n = triples
                .iter()
                .filter(|x| x.noun_concept == dn && x.rel == rel && x.verb_concept == dv)
                .count();
            sum += n as f64 / (classes(t, dn) * classes(t, dv));
        }
    }
    sum
}

pub fn rel_class_freq(t: &Taxonomy, triples: &[Triple], rel: Relation, cv: ConceptIx) -> f64 {
    descendants(t, cv)
        .into_iter()
        .map(|dv| {
            let n = triples.iter().filter(|x| x.verb_concept == dv && x.rel == rel).count();
            n as f64 / classes(t, dv)
        })
        .sum()
}

fn rel_verb(triples: &[Triple], rel: Relation, verb: &str) -> f64 {
    triples.iter().filter(|x| x.rel == rel && x.verb_lemma == verb).count() as f64
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 { 0.0 } else { num / den }
}

/// `None` = abstain.
pub fn word2word(triples: &[Triple], cn_i: ConceptIx, rel: Relation, verb: &str) -> Option<f64> {
    let den = rel_verb(triples, rel, verb);
    if den == 0.0 {
        return None;
    }
    let num = triples
        .iter()
        .filter(|x| x.noun_concept == cn_i && x.rel == rel && x.verb_lemma == verb)
        .count() as f64;
    Some(num / den)
}

/// The four estimate families the scoring formulas read.
pub trait Source {
    fn taxonomy(&self) -> &Taxonomy;
    fn triples(&self) -> &[Triple];
    fn class_freq(&self, c: ConceptIx) -> f64;
    fn class_rel_verb_freq(&self, cn: ConceptIx, rel: Relation, verb: &str) -> f64;
    fn class_rel_class_freq(&self, cn: ConceptIx, rel: Relation, cv: ConceptIx) -> f64;
    fn rel_class_freq(&self, rel: Relation, cv: ConceptIx) -> f64;
}

/// Recomputes every estimate on each call.
pub struct Naive<'a> {
    pub taxonomy: &'a Taxonomy,
    pub triples: &'a [Triple],
}

impl Source for Naive<'_> {
    fn taxonomy(&self) -> &Taxonomy {
        self.taxonomy
    }
    fn triples(&self) -> &[Triple] {
        self.triples
    }
    fn class_freq(&self, c: ConceptIx) -> f64 {
        class_freq(self.taxonomy, self.triples, c)
    }
    fn class_rel_verb_freq(&self, cn: ConceptIx, rel: Relation, verb: &str) -> f64 {
        class_rel_verb_freq(self.taxonomy, self.triples, cn, rel, verb)
    }
    fn class_rel_class_freq(&self, cn: ConceptIx, rel: Relation, cv: ConceptIx) -> f64 {
        class_rel_class_freq(self.taxonomy, self.triples, cn, rel, cv)
    }
    fn rel_class_freq(&self, rel: Relation, cv: ConceptIx) -> f64 {
        rel_class_freq(self.taxonomy, self.triples, rel, cv)
    }
}

/// The naive estimates, each computed at most once. Lets large
/// equivalence sweeps score every instance without redoing the
/// enumeration inside every sum.
pub struct Memo<'a> {
    naive: Naive<'a>,
    freq: RefCell<BTreeMap<ConceptIx, f64>>,
    crv: RefCell<BTreeMap<(Relation, String, ConceptIx), f64>>,
    crc: RefCell<BTreeMap<(Relation, ConceptIx, ConceptIx), f64>>,
    rc: RefCell<BTreeMap<(Relation, ConceptIx), f64>>,
}

impl<'a> Memo<'a> {
    pub fn new(taxonomy: &'a Taxonomy, triples: &'a [Triple]) -> Memo<'a> {
        Memo {
            naive: Naive { taxonomy, triples },
            freq: RefCell::default(),
            crv: RefCell::default(),
            crc: RefCell::default(),
            rc: RefCell::default(),
        }
    }
}

fn cached<K: Ord, F: FnOnce() -> f64>(cell: &RefCell<BTreeMap<K, f64>>, key: K, f: F) -> f64 {
    if let Some(&v) = cell.borrow().get(&key) {
        return v;
    }
    let v = f();
    cell.borrow_mut().insert(key, v);
    v
}

impl Source for Memo<'_> {
    fn taxonomy(&self) -> &Taxonomy {
        self.naive.taxonomy
    }
    fn triples(&self) -> &[Triple] {
        self.naive.triples
    }
    fn class_freq(&self, c: ConceptIx) -> f64 {
        cached(&self.freq, c, || self.naive.class_freq(c))
    }
    fn class_rel_verb_freq(&self, cn: ConceptIx, rel: Relation, verb: &str) -> f64 {
        cached(&self.crv, (rel, String::from(verb), cn), || self.naive.class_rel_verb_freq(cn, rel, verb))
    }
    fn class_rel_class_freq(&self, cn: ConceptIx, rel: Relation, cv: ConceptIx) -> f64 {
        cached(&self.crc, (rel, cn, cv), || self.naive.class_rel_class_freq(cn, rel, cv))
    }
    fn rel_class_freq(&self, rel: Relation, cv: ConceptIx) -> f64 {
        cached(&self.rc, (rel, cv), || self.naive.rel_class_freq(rel, cv))
    }
}

pub fn word2class(t: &Taxonomy, triples: &[Triple], cn_i: ConceptIx, rel: Relation, verb: &str) -> Option<f64> {
    word2class_from(&Naive { taxonomy: t, triples }, cn_i, rel, verb)
}

pub fn word2class_from<S: Source>(s: &S, cn_i: ConceptIx, rel: Relation, verb: &str) -> Option<f64> {
    let den = rel_verb(s.triples(), rel, verb);
    if den == 0.0 {
        return None;
    }
    let fi = s.class_freq(cn_i);
    let mut sum = 0.0;
    for cn in ancestors(s.taxonomy(), cn_i) {
        sum += ratio(fi, s.class_freq(cn)) * s.class_rel_verb_freq(cn, rel, verb) / den;
    }
    Some(sum)
}

/// Value and winning verb sense (lowest sense index on ties, `None` when the
/// maximum is zero).
pub fn class2class(
    t: &Taxonomy,
    inv: &SenseInventory,
    triples: &[Triple],
    cn_i: ConceptIx,
    rel: Relation,
    verb: &str,
) -> Option<(f64, Option<ConceptIx>)> {
    class2class_from(&Naive { taxonomy: t, triples }, inv, cn_i, rel, verb)
}

pub fn class2class_from<S: Source>(
    s: &S,
    inv: &SenseInventory,
    cn_i: ConceptIx,
    rel: Relation,
    verb: &str,
) -> Option<(f64, Option<ConceptIx>)> {
    let t = s.taxonomy();
    let senses = inv.senses(verb, Pos::Verb)?;
    let fi = s.class_freq(cn_i);
    let mut evidence = false;
    let mut best: Option<(f64, ConceptIx)> = None;
    for &cv_j in senses {
        let fj = s.class_freq(cv_j);
        let mut sum = 0.0;
        for cv in ancestors(t, cv_j) {
            let den = s.rel_class_freq(rel, cv);
            if den > 0.0 {
                evidence = true;
            }
            let verb_factor = ratio(fj, s.class_freq(cv));
            for cn in ancestors(t, cn_i) {
                sum += ratio(fi, s.class_freq(cn))
                    * verb_factor
                    * ratio(s.class_rel_class_freq(cn, rel, cv), den);
            }
        }
        if best.is_none_or(|(b, _)| sum > b) {
            best = Some((sum, cv_j));
        }
    }
    if !evidence {
        return None;
    }
    let (v, c) = best?;
    Some((v, (v > 0.0).then_some(c)))
}

/// 1-based answer: highest strictly positive score, lowest index on ties.
pub fn argmax(scores: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(v) = *s {
            if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
                best = Some((i + 1, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// A randomly generated taxonomy, inventory and triple list.
#[derive(Debug, Clone)]
pub struct RandomCorpus {
    pub taxonomy: Taxonomy,
    pub inventory: SenseInventory,
    pub triples: Vec<Triple>,
}

/// Seeded random corpus: at most `max_concepts` concepts split between the
/// two hierarchies, up to 4 parents per concept, at most `max_triples`
/// triples.
pub fn random_corpus(seed: u64, max_concepts: usize, max_triples: usize) -> RandomCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(4..=max_concepts.max(4));
    let n_nouns = rng.random_range(2..=n - 2);

    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let (pos, base) = if i < n_nouns { (Pos::Noun, 0) } else { (Pos::Verb, n_nouns) };
        let earlier = i - base;
        let mut parents = Vec::new();
        // the first concept of each hierarchy is a root; others usually not
        if earlier > 0 && rng.random_bool(0.9) {
            let k = rng.random_range(1..=4.min(earlier));
            for _ in 0..k {
                let p = base + rng.random_range(0..earlier);
                if !parents.contains(&p) {
                    parents.push(p);
                }
            }
        }
        entries.push(ConceptEntry {
            id: ConceptId::new(format!("{}{i}", pos.as_token())).unwrap(),
            pos,
            parents: parents.iter().map(|p| ConceptId::new(format!("{}{p}", pos.as_token())).unwrap()).collect(),
        });
    }
    let taxonomy = Taxonomy::from_entries(entries).expect("generated DAG is valid");

    let concepts = |pos: Pos| -> Vec<ConceptIx> {
        taxonomy.concepts().filter(|&c| taxonomy.pos(c) == pos).collect()
    };
    let nouns = concepts(Pos::Noun);
    let verbs = concepts(Pos::Verb);

    let mut inventory = SenseInventory::new();
    let mut lemmas: Vec<(Pos, String)> = Vec::new();
    for (pos, pool) in [(Pos::Noun, &nouns), (Pos::Verb, &verbs)] {
        let count = rng.random_range(1..=pool.len().clamp(1, 8));
        for l in 0..count {
            let k = rng.random_range(1..=pool.len().min(4));
            let mut senses: Vec<ConceptIx> = pool.to_vec();
            senses.shuffle(&mut rng);
            senses.truncate(k);
            let lemma = format!("{}lemma{l}", pos.as_token());
            inventory.insert(&taxonomy, &lemma, pos, senses).unwrap();
            lemmas.push((pos, lemma));
        }
    }
    let noun_lemmas: Vec<&String> = lemmas.iter().filter(|(p, _)| *p == Pos::Noun).map(|(_, l)| l).collect();
    let verb_lemmas: Vec<&String> = lemmas.iter().filter(|(p, _)| *p == Pos::Verb).map(|(_, l)| l).collect();

    let count = rng.random_range(0..=max_triples);
    let mut triples = Vec::with_capacity(count);
    for _ in 0..count {
        let nl = *noun_lemmas.choose(&mut rng).unwrap();
        let vl = *verb_lemmas.choose(&mut rng).unwrap();
        let cn = *inventory.senses(nl, Pos::Noun).unwrap().choose(&mut rng).unwrap();
        let cv = *inventory.senses(vl, Pos::Verb).unwrap().choose(&mut rng).unwrap();
        let rel = if rng.random_bool(0.5) { Relation::Subject } else { Relation::Object };
        let doc = format!("doc{}", rng.random_range(0..3));
        triples.push(Triple::new(&inventory, &taxonomy, vl, cv, rel, nl, cn, &doc).unwrap());
    }
    RandomCorpus { taxonomy, inventory, triples }
}
