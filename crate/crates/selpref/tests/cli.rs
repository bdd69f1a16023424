mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn selpref(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selpref")).args(args).output().unwrap()
}

fn toy(cmd: &str, extra: &[&str]) -> Output {
    let mut args = vec![cmd.to_string()];
    args.extend(common::toy_args());
    args.extend(extra.iter().map(|s| s.to_string()));
    Command::new(env!("CARGO_BIN_EXE_selpref")).args(&args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_clean_toy() {
    let o = toy("validate", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("concepts\t69\tnoun=43\tverb=26\troots=2"), "{out}");
    assert!(out.contains("triples\t117\tsubj=50\tobj=67\tdocs=3"), "{out}");
    assert!(out.ends_with("0 errors\n"), "{out}");
}

#[test]
fn validate_reports_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let tax = dir.path().join("tax.tsv");
    fs::write(&tax, "a\tn\tc\nb\tn\ta\nc\tn\tb\n").unwrap();
    let senses = dir.path().join("senses.tsv");
    fs::write(&senses, "").unwrap();
    let triples = dir.path().join("triples.tsv");
    fs::write(&triples, "").unwrap();
    let o = selpref(&["validate", "--taxonomy", path(&tax), "--senses", path(&senses), "--triples", path(&triples)]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("cycle"), "{out}");
    assert!(out.ends_with("1 errors\n"), "{out}");
}

#[test]
fn validate_lists_every_bad_line_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let triples = dir.path().join("triples.tsv");
    let mut text = common::read_toy("triples.tsv");
    text.push_str("eat\teat_v\tobj\tunicorn\tapple\tnews\n");
    text.push_str("eat\teat_v\tsideways\tapple\tapple\tnews\n");
    fs::write(&triples, &text).unwrap();
    let tax = common::toy_file("taxonomy.tsv");
    let senses = common::toy_file("senses.tsv");
    let base = ["validate", "--taxonomy", path(&tax), "--senses", path(&senses), "--triples", path(&triples)];

    let o = selpref(&base);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let n = text.lines().count();
    assert!(out.contains(&format!("triples.tsv: line {}: ", n - 1)), "{out}");
    assert!(out.contains("unicorn"), "{out}");
    assert!(out.contains(&format!("line {n}: unknown relation")), "{out}");
    assert!(out.ends_with("2 errors\n"), "{out}");

    let mut lenient = base.to_vec();
    lenient.push("--skip-bad-lines");
    let o = selpref(&lenient);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("2 warnings\n0 errors\n"), "{out}");
    assert!(out.contains("triples\t117\t"), "{out}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(selpref(&[]).status.code(), Some(2));
    assert_eq!(selpref(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(toy("disambiguate", &["--model", "w2x", "--instances", "x"]).status.code(), Some(2));
    assert_eq!(toy("eval", &["--k", "1", "--xval", "t"]).status.code(), Some(2));
    let both = toy("eval", &["--xval", "a", "--docs", "b"]);
    assert_eq!(both.status.code(), Some(2));
    let tax = common::toy_file("taxonomy.tsv");
    let senses = common::toy_file("senses.tsv");
    let o = selpref(&["train", "--taxonomy", path(&tax), "--senses", path(&senses)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--triples"));
}

#[test]
fn missing_input_file_exits_1() {
    let o = selpref(&["validate", "--taxonomy", "/nonexistent/t", "--senses", "s", "--triples", "x"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn train_then_disambiguate_from_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("model.tsv");
    let o = toy("train", &["--seed", "9", "--out", path(&dump)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("triples=117"), "{}", stderr(&o));
    let first = fs::read_to_string(&dump).unwrap();
    assert!(first.starts_with("# selpref-model v1\tseed=9\t"));

    let again = toy("train", &["--seed", "9"]);
    assert_eq!(stdout(&again), first, "retraining is byte-identical");

    let instances = common::toy_file("instances.tsv");
    let raw = toy("disambiguate", &["--instances", path(&instances)]);
    let tax = common::toy_file("taxonomy.tsv");
    let senses = common::toy_file("senses.tsv");
    let from_dump = selpref(&[
        "disambiguate",
        "--taxonomy",
        path(&tax),
        "--senses",
        path(&senses),
        "--dump",
        path(&dump),
        "--instances",
        path(&instances),
    ]);
    assert_eq!(from_dump.status.code(), Some(0), "{}", stderr(&from_dump));
    // the dump keeps 12 significant digits, so compare scores numerically
    let (raw, from_dump) = (stdout(&raw), stdout(&from_dump));
    let (a, b): (Vec<&str>, Vec<&str>) = (raw.lines().skip(1).collect(), from_dump.lines().skip(1).collect());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        let (x, y): (Vec<&str>, Vec<&str>) = (x.split('\t').collect(), y.split('\t').collect());
        assert_eq!(x[..4], y[..4]);
        for (s, t) in x[4].split(' ').zip(y[4].split(' ')) {
            match (s.split_once(':').unwrap().1.parse::<f64>(), t.split_once(':').unwrap().1.parse::<f64>()) {
                (Ok(p), Ok(q)) => assert!((p - q).abs() <= 1e-9 * p.abs().max(1e-300), "{s} {t}"),
                _ => assert_eq!(s, t),
            }
        }
    }
    assert!(from_dump.starts_with("# model=c2c\tseed=0\tsource=dump\n"));
}

#[test]
fn dump_from_other_inputs_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("model.tsv");
    assert!(toy("train", &["--out", path(&dump)]).status.success());
    let senses = dir.path().join("senses.tsv");
    fs::write(&senses, common::read_toy("senses.tsv") + "# edited\n").unwrap();
    let tax = common::toy_file("taxonomy.tsv");
    let instances = common::toy_file("instances.tsv");
    let o = selpref(&[
        "disambiguate",
        "--taxonomy",
        path(&tax),
        "--senses",
        path(&senses),
        "--dump",
        path(&dump),
        "--instances",
        path(&instances),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("senses digest mismatch"), "{}", stderr(&o));
}

#[test]
fn empty_triples_train_to_empty_dump() {
    let dir = tempfile::tempdir().unwrap();
    let triples = dir.path().join("empty.tsv");
    fs::write(&triples, "").unwrap();
    let tax = common::toy_file("taxonomy.tsv");
    let senses = common::toy_file("senses.tsv");
    let o = selpref(&["train", "--taxonomy", path(&tax), "--senses", path(&senses), "--triples", path(&triples)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    assert!(out.contains(
        "triples=e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    ));
}

fn decision(out: &str, noun: &str, rel: &str, verb: &str) -> Vec<String> {
    out.lines()
        .find(|l| l.starts_with(&format!("{noun}\t{rel}\t{verb}\t")))
        .unwrap_or_else(|| panic!("no line for {noun} {rel} {verb} in {out}"))
        .split('\t')
        .map(str::to_string)
        .collect()
}

#[test]
fn disambiguate_listing() {
    let instances = common::toy_file("instances.tsv");
    let c2c = stdout(&toy("disambiguate", &["--instances", path(&instances), "--explain"]));
    let church = decision(&c2c, "church", "obj", "rebuild");
    assert_eq!(church[3], "2");
    assert_eq!(church[4], "1:0.0057862619626 2:0.0452533294436 3:0.00461842760153");
    assert_eq!(church[5], "1:entity|create_v 2:building|create_v 3:entity|create_v");

    let w2w = stdout(&toy("disambiguate", &["--instances", path(&instances), "--model", "w2w"]));
    assert_eq!(decision(&w2w, "church", "obj", "rebuild")[3..], ["-", "1:- 2:- 3:-"]);
    assert_eq!(decision(&w2w, "church", "obj", "frobnicate")[3], "-");
    assert_eq!(decision(&w2w, "house", "obj", "build")[3], "1");
    let w2c = stdout(&toy("disambiguate", &["--instances", path(&instances), "--model", "w2c"]));
    assert_eq!(decision(&w2c, "church", "obj", "rebuild")[3], "-");
}

#[test]
fn malformed_instance_line_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.tsv");
    fs::write(&inst, "church\tobj\tbuild\nchurch obj build\n").unwrap();
    let o = toy("disambiguate", &["--instances", path(&inst)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn eval_is_reproducible_and_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let targets = common::toy_file("targets.txt");
    let (a, b) = (dir.path().join("a.tsv"), dir.path().join("b.tsv"));
    for out in [&a, &b] {
        let o = toy("eval", &["--xval", path(&targets), "--seed", "42", "--out", path(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = fs::read(&a).unwrap();
    assert_eq!(a, fs::read(&b).unwrap());
    assert_eq!(a, common::read_toy("golden/xval_seed42.tsv").into_bytes());

    let other = stdout(&toy("eval", &["--xval", path(&targets), "--seed", "43"]));
    assert!(other.starts_with("# protocol=xval\tk=10\tfolds=per-target-stratified\tseed=43\t"));
}

#[test]
fn eval_relation_filter_and_sampled_random() {
    let targets = common::toy_file("targets.txt");
    let out = stdout(&toy("eval", &["--xval", path(&targets), "--rel", "obj", "--sampled-random", "--seed", "3"]));
    assert!(out.starts_with("# protocol=xval\tk=10\tfolds=per-target-stratified\tseed=3\trandom=sampled\trelations=obj\n"));
    assert!(!out.contains("\tsubj\t"));
    let random: Vec<&str> = out.lines().filter(|l| l.starts_with("random\tobj\toverall")).collect();
    assert_eq!(random.len(), 1);
    let correct = random[0].split('\t').nth(7).unwrap();
    assert!(correct.parse::<u64>().is_ok(), "sampled baseline counts whole answers: {correct}");
}

#[test]
fn eval_single_document_holdout_abstains() {
    let dir = tempfile::tempdir().unwrap();
    let triples = dir.path().join("one.tsv");
    let one: String = common::read_toy("triples.tsv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut f: Vec<&str> = l.split('\t').collect();
            f[5] = "only";
            f.join("\t") + "\n"
        })
        .collect();
    fs::write(&triples, one).unwrap();
    let docs = dir.path().join("docs.txt");
    fs::write(&docs, "only\n").unwrap();
    let tax = common::toy_file("taxonomy.tsv");
    let senses = common::toy_file("senses.tsv");
    let o = selpref(&[
        "eval",
        "--taxonomy",
        path(&tax),
        "--senses",
        path(&senses),
        "--triples",
        path(&triples),
        "--docs",
        path(&docs),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for model in ["w2w", "w2c", "c2c"] {
        for line in out.lines().filter(|l| l.starts_with(&format!("{model}\t"))) {
            let f: Vec<&str> = line.split('\t').collect();
            assert_eq!((f[3], f[4], f[6]), ("-", "0.000", "0"), "{line}");
        }
    }
    assert!(out.contains("mfs\tobj\toverall\t0.791\t1.000\t0.791\t67\t53\t67"), "{out}");
}

#[test]
fn eval_unknown_target_or_doc_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("list.txt");
    fs::write(&list, "unicorn\n").unwrap();
    assert_eq!(toy("eval", &["--xval", path(&list)]).status.code(), Some(1));
    let o = toy("eval", &["--docs", path(&list)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unicorn"));
}
