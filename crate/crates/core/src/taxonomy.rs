//! Concept hierarchy: a rooted multi-parent DAG with reflexive subsumption.
//!
//! Concepts are interned into dense [`ConceptIx`] handles when the taxonomy is
//! built. Ancestor and descendant sets are computed once at construction and
//! stored sorted, so `subsumes` is a binary search and `classes_count` is a
//! length lookup.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Part of speech of a concept. Noun and verb hierarchies are disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pos {
    Noun,
    Verb,
}

impl Pos {
    /// The one-letter token used in the text formats (`n` / `v`).
    pub fn as_token(self) -> &'static str {
        match self {
            Pos::Noun => "n",
            Pos::Verb => "v",
        }
    }

    pub fn from_token(token: &str) -> Option<Pos> {
        match token {
            "n" => Some(Pos::Noun),
            "v" => Some(Pos::Verb),
            _ => None,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_token())
    }
}

/// Opaque concept identifier: a non-empty token without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(String);

impl ConceptId {
    pub fn new(id: impl Into<String>) -> Result<ConceptId, TaxonomyError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(TaxonomyError::InvalidId(id));
        }
        Ok(ConceptId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ConceptId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Dense handle of a concept inside one [`Taxonomy`].
///
/// Handles are only meaningful for the taxonomy that issued them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptIx(u32);

impl ConceptIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("invalid concept id {0:?}")]
    InvalidId(String),
    #[error("duplicate concept id {0}")]
    DuplicateConcept(String),
    #[error("concept {concept} references unknown parent {parent}")]
    DanglingParent { concept: String, parent: String },
    #[error("cycle detected through concept {0}")]
    Cycle(String),
    #[error("concept {concept} ({pos}) has parent {parent} with a different part of speech")]
    PosMismatch { concept: String, pos: Pos, parent: String },
    #[error("unknown concept {0}")]
    UnknownConcept(String),
}

/// One declared concept before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptEntry {
    pub id: ConceptId,
    pub pos: Pos,
    pub parents: Vec<ConceptId>,
}

/// Immutable, validated concept hierarchy.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    ids: Vec<ConceptId>,
    by_id: BTreeMap<String, ConceptIx>,
    pos: Vec<Pos>,
    parents: Vec<Vec<ConceptIx>>,
    children: Vec<Vec<ConceptIx>>,
    // reflexive closures, sorted
    ancestors: Vec<Vec<ConceptIx>>,
    descendants: Vec<Vec<ConceptIx>>,
    // parents before children
    topo: Vec<ConceptIx>,
}

impl Taxonomy {
    /// Validates the entries (order-independent) and builds the closures.
    pub fn from_entries<I>(entries: I) -> Result<Taxonomy, TaxonomyError>
    where
        I: IntoIterator<Item = ConceptEntry>,
    {
        let entries: Vec<ConceptEntry> = entries.into_iter().collect();
        let mut by_id = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            let ix = ConceptIx(u32::try_from(i).expect("too many concepts"));
            if by_id.insert(String::from(e.id.as_str()), ix).is_some() {
                return Err(TaxonomyError::DuplicateConcept(e.id.0.clone()));
            }
        }

        let n = entries.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (i, e) in entries.iter().enumerate() {
            for p in &e.parents {
                let pix = *by_id.get(p.as_str()).ok_or_else(|| TaxonomyError::DanglingParent {
                    concept: e.id.0.clone(),
                    parent: p.0.clone(),
                })?;
                if entries[pix.index()].pos != e.pos {
                    return Err(TaxonomyError::PosMismatch {
                        concept: e.id.0.clone(),
                        pos: e.pos,
                        parent: p.0.clone(),
                    });
                }
                let ix = ConceptIx(i as u32);
                // repeated parent ids collapse
                if !parents[i].contains(&pix) {
                    parents[i].push(pix);
                    children[pix.index()].push(ix);
                }
            }
        }

        let topo = topological_order(&parents, &children)
            .map_err(|ix| TaxonomyError::Cycle(entries[ix.index()].id.0.clone()))?;

        // Acyclic and finite, so every concept reaches a root.
        let mut ancestors: Vec<Vec<ConceptIx>> = vec![Vec::new(); n];
        for &c in &topo {
            let mut set: Vec<ConceptIx> = vec![c];
            for &p in &parents[c.index()] {
                set.extend_from_slice(&ancestors[p.index()]);
            }
            set.sort_unstable();
            set.dedup();
            ancestors[c.index()] = set;
        }
        let mut descendants: Vec<Vec<ConceptIx>> = vec![Vec::new(); n];
        for (i, anc) in ancestors.iter().enumerate() {
            for a in anc {
                descendants[a.index()].push(ConceptIx(i as u32));
            }
        }

        Ok(Taxonomy {
            ids: entries.iter().map(|e| e.id.clone()).collect(),
            pos: entries.iter().map(|e| e.pos).collect(),
            by_id,
            parents,
            children,
            ancestors,
            descendants,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<ConceptIx> {
        self.by_id.get(id).copied()
    }

    pub fn resolve(&self, id: &str) -> Result<ConceptIx, TaxonomyError> {
        self.get(id).ok_or_else(|| TaxonomyError::UnknownConcept(String::from(id)))
    }

    pub fn id(&self, c: ConceptIx) -> &ConceptId {
        &self.ids[c.index()]
    }

    pub fn pos(&self, c: ConceptIx) -> Pos {
        self.pos[c.index()]
    }

    pub fn parents(&self, c: ConceptIx) -> &[ConceptIx] {
        &self.parents[c.index()]
    }

    pub fn children(&self, c: ConceptIx) -> &[ConceptIx] {
        &self.children[c.index()]
    }

    /// All concepts in declaration order.
    pub fn concepts(&self) -> impl Iterator<Item = ConceptIx> + '_ {
        (0..self.ids.len()).map(|i| ConceptIx(i as u32))
    }

    pub fn roots(&self) -> impl Iterator<Item = ConceptIx> + '_ {
        self.concepts().filter(|c| self.parents[c.index()].is_empty())
    }

    /// Concepts ordered so that every parent precedes its children.
    pub fn topological_order(&self) -> &[ConceptIx] {
        &self.topo
    }

    /// Reflexive-transitive closure of the parent relation, sorted by handle.
    pub fn ancestors(&self, c: ConceptIx) -> &[ConceptIx] {
        &self.ancestors[c.index()]
    }

    /// Reflexive-transitive closure of the child relation, sorted by handle.
    pub fn descendants(&self, c: ConceptIx) -> &[ConceptIx] {
        &self.descendants[c.index()]
    }

    /// `true` iff `upper` is `lower` or one of its ancestors.
    pub fn subsumes(&self, upper: ConceptIx, lower: ConceptIx) -> bool {
        self.ancestors[lower.index()].binary_search(&upper).is_ok()
    }

    /// Number of classes `c` belongs to, counting `c` itself.
    pub fn classes_count(&self, c: ConceptIx) -> usize {
        self.ancestors[c.index()].len()
    }
}

/// Kahn's algorithm. On a cycle, returns a concept that lies on one.
fn topological_order(
    parents: &[Vec<ConceptIx>],
    children: &[Vec<ConceptIx>],
) -> Result<Vec<ConceptIx>, ConceptIx> {
    let n = parents.len();
    let mut pending: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut queue: Vec<ConceptIx> = (0..n)
        .filter(|&i| pending[i] == 0)
        .map(|i| ConceptIx(i as u32))
        .collect();
    let mut order = Vec::with_capacity(n);
    let mut head = 0;
    while head < queue.len() {
        let c = queue[head];
        head += 1;
        order.push(c);
        for &ch in &children[c.index()] {
            pending[ch.index()] -= 1;
            if pending[ch.index()] == 0 {
                queue.push(ch);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every unprocessed node has an unprocessed parent; walking parents
    // among them must revisit a node, which is then on a cycle.
    let start = (0..n).find(|&i| pending[i] > 0).expect("unprocessed node");
    let mut seen = vec![false; n];
    let mut cur = start;
    loop {
        if seen[cur] {
            return Err(ConceptIx(cur as u32));
        }
        seen[cur] = true;
        cur = parents[cur]
            .iter()
            .find(|p| pending[p.index()] > 0)
            .expect("unprocessed parent")
            .index();
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use alloc::format;
    use proptest::prelude::*;

    fn random_entries(n: usize, edges: &[(usize, usize)]) -> Vec<ConceptEntry> {
        let mut parents = vec![Vec::new(); n];
        for &(child, parent) in edges {
            parents[child % n].push(parent % n);
        }
        (0..n)
            .map(|i| ConceptEntry {
                id: ConceptId::new(format!("c{i}")).unwrap(),
                pos: Pos::Noun,
                parents: parents[i]
                    .iter()
                    .map(|p| ConceptId::new(format!("c{p}")).unwrap())
                    .collect(),
            })
            .collect()
    }

    /// Independent cycle check: DFS with colors over the raw edge list.
    fn has_cycle(n: usize, edges: &[(usize, usize)]) -> bool {
        let mut adj = vec![Vec::new(); n];
        for &(c, p) in edges {
            adj[c % n].push(p % n);
        }
        fn visit(v: usize, adj: &[Vec<usize>], color: &mut [u8]) -> bool {
            color[v] = 1;
            for &w in &adj[v] {
                if color[w] == 1 || (color[w] == 0 && visit(w, adj, color)) {
                    return true;
                }
            }
            color[v] = 2;
            false
        }
        let mut color = vec![0u8; n];
        (0..n).any(|v| color[v] == 0 && visit(v, &adj, &mut color))
    }

    proptest! {
        #[test]
        fn loading_never_accepts_a_cycle(
            n in 1usize..12,
            edges in proptest::collection::vec((0usize..12, 0usize..12), 0..24),
        ) {
            let result = Taxonomy::from_entries(random_entries(n, &edges));
            prop_assert_eq!(result.is_err(), has_cycle(n, &edges));
        }

        #[test]
        fn closure_laws_on_random_dags(
            n in 1usize..20,
            edges in proptest::collection::vec((0usize..20, 0usize..20), 0..40),
        ) {
            // orient every edge child -> lower index to guarantee acyclicity
            let dag: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(a, b)| (a % n, b % n))
                .filter(|(a, b)| a != b)
                .map(|(a, b)| if a > b { (a, b) } else { (b, a) })
                .collect();
            let t = Taxonomy::from_entries(random_entries(n, &dag)).unwrap();
            for a in t.concepts() {
                prop_assert!(t.ancestors(a).contains(&a));
                prop_assert!(t.descendants(a).contains(&a));
                prop_assert_eq!(t.classes_count(a) == 1, t.parents(a).is_empty());
                for b in t.concepts() {
                    let up = t.ancestors(b).contains(&a);
                    prop_assert_eq!(up, t.descendants(a).contains(&b));
                    prop_assert_eq!(up, t.subsumes(a, b));
                    if up {
                        for c in t.concepts() {
                            if t.subsumes(b, c) {
                                prop_assert!(t.subsumes(a, c));
                            }
                        }
                    }
                }
            }
        }
    }
}
