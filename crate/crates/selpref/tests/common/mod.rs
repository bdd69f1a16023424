#![allow(dead_code)]

use std::path::PathBuf;

use selpref::formats;
use selpref_core::{SenseInventory, Taxonomy, Triple};

pub fn toy_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy")
}

pub fn toy_file(name: &str) -> PathBuf {
    toy_dir().join(name)
}

pub fn read_toy(name: &str) -> String {
    std::fs::read_to_string(toy_file(name)).unwrap()
}

pub struct Toy {
    pub taxonomy: Taxonomy,
    pub inventory: SenseInventory,
    pub triples: Vec<Triple>,
}

pub fn toy() -> Toy {
    let taxonomy = formats::parse_taxonomy(&read_toy("taxonomy.tsv")).unwrap();
    let (inventory, errs) = formats::parse_inventory(&read_toy("senses.tsv"), &taxonomy);
    assert!(errs.is_empty(), "{errs:?}");
    let (triples, errs) = formats::parse_triples(&read_toy("triples.tsv"), &taxonomy, &inventory);
    assert!(errs.is_empty(), "{errs:?}");
    Toy { taxonomy, inventory, triples }
}

pub fn toy_targets() -> std::collections::BTreeSet<String> {
    formats::parse_list(&read_toy("targets.txt")).unwrap().into_iter().collect()
}

pub fn toy_docs() -> Vec<String> {
    formats::parse_list(&read_toy("docs.txt")).unwrap()
}

pub fn toy_args() -> Vec<String> {
    vec![
        "--taxonomy".into(),
        toy_file("taxonomy.tsv").display().to_string(),
        "--senses".into(),
        toy_file("senses.tsv").display().to_string(),
        "--triples".into(),
        toy_file("triples.tsv").display().to_string(),
    ]
}
