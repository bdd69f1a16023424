//! Command-line front end: `validate`, `train`, `disambiguate`, `eval`.
//!
//! Exit status is 0 on success, 1 when inputs fail to load or validate and
//! 2 on usage errors (clap exits with 2 on its own).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use selpref_core::{
    Answer, Disambiguator, Evaluation, FrequencyTables, ModelKind, Pos, PreferenceModel,
    RandomBaseline, Relation, SenseInventory, Taxonomy, Triple, VerbSide,
};

use crate::dump::{self, InputDigests};
use crate::formats::{self, LoadError};
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "selpref", version, about = "Class-based selectional preferences for noun sense disambiguation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load all inputs and report counts and every validation error.
    Validate(Common),
    /// Count triples and write a model dump.
    Train(Common),
    /// Choose a sense for each instance of an instance file.
    Disambiguate {
        #[command(flatten)]
        common: Common,
        /// Instance file: `noun<TAB>subj|obj<TAB>verb` per line.
        #[arg(long)]
        instances: PathBuf,
        /// Trained dump to use instead of counting --triples.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Print the top contributing class for each sense.
        #[arg(long)]
        explain: bool,
    },
    /// Cross-validate on target nouns or hold out documents.
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mode: EvalMode,
        /// Number of folds for --xval.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
        /// Sample the random baseline from --seed instead of using its expectation.
        #[arg(long)]
        sampled_random: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct EvalMode {
    /// Target noun lemmas, one per line.
    #[arg(long)]
    xval: Option<PathBuf>,
    /// Document ids to hold out, one per line.
    #[arg(long)]
    docs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub taxonomy: PathBuf,
    #[arg(long)]
    pub senses: PathBuf,
    #[arg(long)]
    pub triples: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModelArg::C2c)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value_t = RelArg::Both)]
    pub rel: RelArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report bad sense or triple lines as warnings and drop them.
    #[arg(long)]
    pub skip_bad_lines: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    W2w,
    W2c,
    C2c,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> ModelKind {
        match m {
            ModelArg::W2w => ModelKind::Word2Word,
            ModelArg::W2c => ModelKind::Word2Class,
            ModelArg::C2c => ModelKind::Class2Class,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelArg {
    Subj,
    Obj,
    Both,
}

impl RelArg {
    pub fn relations(self) -> Vec<Relation> {
        match self {
            RelArg::Subj => vec![Relation::Subject],
            RelArg::Obj => vec![Relation::Object],
            RelArg::Both => Relation::ALL.to_vec(),
        }
    }
}

/// Why a command stopped. Both variants map to exit status 1 except
/// `Usage`, which maps to 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Invalid(Vec<String>),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Invalid(_) => 1,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(vec![msg.into()])
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: &LoadError) -> String {
    format!("{}: {e}", path.display())
}

/// Raw input text plus what was loaded from it.
struct Inputs {
    taxonomy_text: String,
    senses_text: String,
    triples_text: Option<String>,
    taxonomy: Taxonomy,
}

fn load_taxonomy(common: &Common) -> Result<(String, Taxonomy), Failure> {
    let text = read_file(&common.taxonomy)?;
    match formats::parse_taxonomy(&text) {
        Ok(t) => Ok((text, t)),
        Err(errs) => Err(Failure::Invalid(errs.iter().map(|e| located(&common.taxonomy, e)).collect())),
    }
}

fn load_inputs(common: &Common) -> Result<Inputs, Failure> {
    let (taxonomy_text, taxonomy) = load_taxonomy(common)?;
    let senses_text = read_file(&common.senses)?;
    let triples_text = match &common.triples {
        Some(p) => Some(read_file(p)?),
        None => None,
    };
    Ok(Inputs { taxonomy_text, senses_text, triples_text, taxonomy })
}

/// Parses the inventory and triples. Bad lines are returned as messages;
/// the caller decides whether they are warnings or errors.
fn parse_corpus(
    common: &Common,
    inputs: &Inputs,
) -> (SenseInventory, Vec<Triple>, Vec<String>) {
    let (inventory, errs) = formats::parse_inventory(&inputs.senses_text, &inputs.taxonomy);
    let mut problems: Vec<String> = errs.iter().map(|e| located(&common.senses, e)).collect();
    let mut triples = Vec::new();
    if let (Some(path), Some(text)) = (&common.triples, &inputs.triples_text) {
        let (t, errs) = formats::parse_triples(text, &inputs.taxonomy, &inventory);
        problems.extend(errs.iter().map(|e| located(path, e)));
        triples = t;
    }
    (inventory, triples, problems)
}

/// Loads everything strictly unless `--skip-bad-lines`, in which case bad
/// lines go to `warnings`.
fn load_corpus(
    common: &Common,
    inputs: &Inputs,
    warnings: &mut dyn Write,
) -> Result<(SenseInventory, Vec<Triple>), Failure> {
    let (inventory, triples, problems) = parse_corpus(common, inputs);
    if problems.is_empty() {
        return Ok((inventory, triples));
    }
    if !common.skip_bad_lines {
        return Err(Failure::Invalid(problems));
    }
    for p in &problems {
        let _ = writeln!(warnings, "warning: {p}");
    }
    let _ = writeln!(warnings, "{} warnings", problems.len());
    Ok((inventory, triples))
}

fn require_triples(common: &Common) -> Result<(), Failure> {
    if common.triples.is_none() {
        return Err(Failure::Usage("--triples is required".into()));
    }
    Ok(())
}

fn emit(common: &Common, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &common.out {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| invalid(format!("stdout: {e}"))),
    }
}

fn validate(common: &Common, stdout: &mut dyn Write) -> Result<(), Failure> {
    require_triples(common)?;
    let mut out = String::new();
    let inputs = match load_inputs(common) {
        Ok(i) => i,
        Err(Failure::Invalid(errors)) => {
            for e in &errors {
                let _ = writeln!(out, "error: {e}");
            }
            let _ = writeln!(out, "{} errors", errors.len());
            let _ = stdout.write_all(out.as_bytes());
            return Err(Failure::Invalid(Vec::new()));
        }
        Err(e) => return Err(e),
    };
    let tax = &inputs.taxonomy;
    let (inventory, triples, problems) = parse_corpus(common, &inputs);
    let nouns = tax.concepts().filter(|&c| tax.pos(c) == Pos::Noun).count();
    let _ = writeln!(
        out,
        "concepts\t{}\tnoun={nouns}\tverb={}\troots={}",
        tax.len(),
        tax.len() - nouns,
        tax.roots().count()
    );
    let _ = writeln!(
        out,
        "lemmas\t{}\tnoun={}\tverb={}",
        inventory.len(),
        inventory.lemmas(Pos::Noun).count(),
        inventory.lemmas(Pos::Verb).count()
    );
    let per_rel: Vec<String> = Relation::ALL
        .iter()
        .map(|r| format!("{}={}", r.as_token(), triples.iter().filter(|t| t.rel == *r).count()))
        .collect();
    let docs: BTreeSet<&str> = triples.iter().map(|t| t.doc_id.as_str()).collect();
    let _ = writeln!(out, "triples\t{}\t{}\tdocs={}", triples.len(), per_rel.join("\t"), docs.len());
    let label = if common.skip_bad_lines { "warning" } else { "error" };
    for p in &problems {
        let _ = writeln!(out, "{label}: {p}");
    }
    let errors = if common.skip_bad_lines {
        let _ = writeln!(out, "{} warnings", problems.len());
        0
    } else {
        problems.len()
    };
    let _ = writeln!(out, "{errors} errors");
    let _ = stdout.write_all(out.as_bytes());
    if errors > 0 {
        Err(Failure::Invalid(Vec::new()))
    } else {
        Ok(())
    }
}

fn train(common: &Common, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    require_triples(common)?;
    let inputs = load_inputs(common)?;
    let (_, triples) = load_corpus(common, &inputs, stderr)?;
    let tables = FrequencyTables::from_triples(&triples);
    let model = PreferenceModel::train(&inputs.taxonomy, tables);
    let digests = InputDigests::of(
        inputs.taxonomy_text.as_bytes(),
        inputs.senses_text.as_bytes(),
        inputs.triples_text.as_deref().unwrap_or_default().as_bytes(),
    );
    let text = dump::write_dump(&inputs.taxonomy, model.tables(), model.estimates(), &digests, common.seed);
    emit(common, &text, stdout)?;
    let t = model.tables();
    let e = model.estimates();
    let _ = writeln!(
        stderr,
        "triples={}\tfr_cn={}\tfr_cv={}\tfr_rel_v={}\tfr_rel_cv={}\tfrhat={}\tfrhat_rel_cv={}",
        t.total(),
        t.fr_cn.len(),
        t.fr_cv.len(),
        nested(&t.fr_rel_v),
        nested(&t.fr_rel_cv),
        e.class_freq.len(),
        nested(&e.rel_cv),
    );
    Ok(())
}

fn nested<K, V>(m: &BTreeMap<Relation, BTreeMap<K, V>>) -> usize {
    m.values().map(BTreeMap::len).sum()
}

fn disambiguate(
    common: &Common,
    instances: &Path,
    dump_path: Option<&Path>,
    explain: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    if dump_path.is_none() {
        require_triples(common)?;
    }
    let inputs = load_inputs(common)?;
    let tax = &inputs.taxonomy;
    let (inventory, triples) = load_corpus(common, &inputs, stderr)?;
    let (model, source) = match dump_path {
        Some(p) => {
            let text = read_file(p)?;
            let d = dump::read_dump(&text, tax).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
            let triples_digest = inputs.triples_text.as_deref().map(|t| dump::digest(t.as_bytes()));
            d.digests
                .check(
                    &dump::digest(inputs.taxonomy_text.as_bytes()),
                    &dump::digest(inputs.senses_text.as_bytes()),
                    triples_digest.as_deref(),
                )
                .map_err(|e| invalid(format!("{}: {e}", p.display())))?;
            (PreferenceModel::from_parts(tax, d.tables, d.estimates), "dump")
        }
        None => (PreferenceModel::train(tax, FrequencyTables::from_triples(&triples)), "triples"),
    };
    let kind = ModelKind::from(common.model);
    let inst_text = read_file(instances)?;
    let parsed = formats::parse_instances(&inst_text).map_err(|e| invalid(located(instances, &e)))?;
    let dis = Disambiguator::new(&model, &inventory);
    let mut out = String::new();
    let _ = writeln!(out, "# model={}\tseed={}\tsource={source}", kind.as_token(), common.seed);
    let mut errors = Vec::new();
    for (line, inst) in &parsed {
        let decision = match dis.disambiguate(inst, kind) {
            Ok(d) => d,
            Err(e) => {
                errors.push(format!("{}: line {line}: {e}", instances.display()));
                continue;
            }
        };
        let sense = match decision.answer {
            Answer::Sense(i) => i.to_string(),
            Answer::NoAnswer => "-".into(),
        };
        let scores: Vec<String> = decision
            .scores
            .iter()
            .enumerate()
            .map(|(i, s)| match s.value {
                Some(v) => format!("{}:{}", i + 1, dump::format_sig12(v)),
                None => format!("{}:-", i + 1),
            })
            .collect();
        let _ = write!(
            out,
            "{}\t{}\t{}\t{sense}\t{}",
            inst.noun_lemma,
            inst.rel.as_token(),
            inst.verb_lemma,
            scores.join(" ")
        );
        if explain {
            let ex = dis.explain(inst, kind).map_err(|e| invalid(e.to_string()))?;
            let tops: Vec<String> = ex
                .senses
                .iter()
                .enumerate()
                .map(|(i, terms)| match terms.first() {
                    Some(t) => {
                        let verb = match &t.verb {
                            VerbSide::Lemma(l) => l.as_str(),
                            VerbSide::Class(c) => tax.id(*c).as_str(),
                        };
                        format!("{}:{}|{verb}", i + 1, tax.id(t.noun_class).as_str())
                    }
                    None => format!("{}:-", i + 1),
                })
                .collect();
            let _ = write!(out, "\t{}", tops.join(" "));
        }
        out.push('\n');
    }
    emit(common, &out, stdout)?;
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invalid(errors))
    }
}

fn eval(
    common: &Common,
    mode: &EvalMode,
    k: u64,
    sampled_random: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    require_triples(common)?;
    let inputs = load_inputs(common)?;
    let (inventory, triples) = load_corpus(common, &inputs, stderr)?;
    let mut evaluation = Evaluation::new(&inputs.taxonomy, &inventory);
    evaluation.relations = common.rel.relations();
    if sampled_random {
        evaluation.random = RandomBaseline::Sampled { seed: common.seed };
    }
    let list = |p: &Path| -> Result<Vec<String>, Failure> {
        formats::parse_list(&read_file(p)?).map_err(|e| invalid(located(p, &e)))
    };
    let result = match (&mode.xval, &mode.docs) {
        (Some(p), _) => {
            let targets: BTreeSet<String> = list(p)?.into_iter().collect();
            evaluation.crossvalidate(&triples, &targets, k as usize, common.seed)
        }
        (None, Some(p)) => evaluation.holdout_documents(&triples, &list(p)?),
        (None, None) => return Err(Failure::Usage("one of --xval or --docs is required".into())),
    };
    let report = result.map_err(|e| invalid(e.to_string()))?;
    emit(common, &report::write_report(&report, common.seed), stdout)
}

/// Runs a parsed command line and returns the exit status.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let res = match &cli.command {
        Command::Validate(c) => validate(c, stdout),
        Command::Train(c) => train(c, stdout, stderr),
        Command::Disambiguate { common, instances, dump, explain } => {
            disambiguate(common, instances, dump.as_deref(), *explain, stdout, stderr)
        }
        Command::Eval { common, mode, k, sampled_random } => {
            eval(common, mode, *k, *sampled_random, stdout, stderr)
        }
    };
    match res {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Usage(m) => {
                    let _ = writeln!(stderr, "error: {m}");
                }
                Failure::Invalid(ms) => {
                    for m in ms {
                        let _ = writeln!(stderr, "error: {m}");
                    }
                }
            }
            f.exit_code()
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(&cli, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}
