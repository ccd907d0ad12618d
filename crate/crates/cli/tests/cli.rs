use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use crfner::corpus::{parse_column_file, write_column_file};
use crfner::synthetic;
use tempfile::TempDir;

fn crfner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crfner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        write_column_file(&synthetic::names_corpus(120, 1), f.path("train.txt")).unwrap();
        write_column_file(&synthetic::names_corpus(30, 2), f.path("dev.txt")).unwrap();
        write_column_file(&synthetic::names_corpus(30, 3).strip_labels(), f.path("input.txt"))
            .unwrap();
        f.write("config.txt", "# toy run\ncontext_window = 1\nmax_iter = 100\n");
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn train(&self, extra: &[&str]) -> Output {
        let (t, c, m) = (self.arg("train.txt"), self.arg("config.txt"), self.arg("model.crf"));
        let mut args = vec!["train", "--train", &t, "--config", &c, "--model-out", &m];
        args.extend_from_slice(extra);
        crfner(&args)
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn train_writes_loadable_model() {
    let f = Fixture::new();
    let before = fs::read(f.path("train.txt")).unwrap();
    let dev = f.arg("dev.txt");
    let out = f.train(&["--dev", &dev]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("dev evaluation"));
    assert!(stdout(&out).contains("overall"));
    let model = crfner::crf::load_model(f.path("model.crf")).unwrap();
    assert_eq!(model.labels(), ["B-PER", "I-PER", "O"]);
    assert_eq!(fs::read(f.path("train.txt")).unwrap(), before);
}

#[test]
fn training_is_deterministic() {
    let f = Fixture::new();
    assert_eq!(code(&f.train(&[])), 0);
    let first = fs::read(f.path("model.crf")).unwrap();
    assert_eq!(code(&f.train(&[])), 0);
    assert_eq!(fs::read(f.path("model.crf")).unwrap(), first);
}

#[test]
fn train_usage_errors() {
    let f = Fixture::new();
    let (c, m) = (f.arg("config.txt"), f.arg("model.crf"));
    let missing = f.arg("nope.txt");
    let out = crfner(&["train", "--train", &missing, "--config", &c, "--model-out", &m]);
    assert_eq!(code(&out), 2);

    let out = crfner(&["train", "--config", &c, "--model-out", &m]);
    assert_eq!(code(&out), 2);

    f.write("config.txt", "contxt_window = 1\n");
    let out = f.train(&[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("contxt_window"), "{}", stderr(&out));

    f.write("config.txt", "max_iter = 5\n");
    let out = f.train(&["--gazetteer", "person"]);
    assert_eq!(code(&out), 2);
    let out = f.train(&["--gazetteer", &format!("person={missing}")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn train_runtime_failure() {
    let f = Fixture::new();
    f.write("train.txt", "a NN B-NP O\nb NN B-NP I-PER\n");
    let out = f.train(&[]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("BIO"), "{}", stderr(&out));

    f.write("train.txt", "");
    assert_eq!(code(&f.train(&[])), 1);
}

#[test]
fn presets_and_gazetteers() {
    let f = Fixture::new();
    f.write("names.txt", "Amit\nRina Sourav\n");
    f.write("config.txt", "preset = en\nmax_iter = 50\ngazetteer.person = names.txt\n");
    let out = f.train(&[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // The location slot of the preset has no file.
    assert!(stderr(&out).contains("location"));
    let model = crfner::crf::load_model(f.path("model.crf")).unwrap();
    assert!(model.feature_config().use_capital);
    assert_eq!(model.feature_config().gazetteers, ["person"]);
    assert_eq!(model.gazetteers()[0].len(), 2);
    assert!(model.features().id("gaz:person:B").is_some());
    assert!(model.features().id("cap").is_some());

    let g = f.arg("names.txt");
    f.write("config.txt", "max_iter = 50\n");
    let out = f.train(&["--gazetteer", &format!("org={g}")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let model = crfner::crf::load_model(f.path("model.crf")).unwrap();
    assert_eq!(model.feature_config().gazetteers, ["org"]);
}

fn strip_last_column(text: &str) -> String {
    text.lines()
        .map(|l| match l.rsplit_once('\t') {
            Some((head, _)) => format!("{head}\n"),
            None => format!("{l}\n"),
        })
        .collect()
}

#[test]
fn tag_appends_labels_only() {
    let f = Fixture::new();
    assert_eq!(code(&f.train(&[])), 0);
    let (m, i, o) = (f.arg("model.crf"), f.arg("input.txt"), f.arg("out.txt"));
    let before = fs::read_to_string(f.path("input.txt")).unwrap();
    let out = crfner(&["tag", "--model", &m, "--input", &i, "--output", &o]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let tagged = fs::read_to_string(f.path("out.txt")).unwrap();
    assert_eq!(strip_last_column(&tagged), before);
    assert_eq!(fs::read_to_string(f.path("input.txt")).unwrap(), before);
    let c = parse_column_file(f.path("out.txt"), true).unwrap();
    assert_eq!(c.len(), 30);

    // Tagging the held-out draw reproduces its gold labels.
    write_column_file(&synthetic::names_corpus(30, 3), f.path("gold.txt")).unwrap();
    let g = f.arg("gold.txt");
    let out = crfner(&["eval", "--gold", &g, "--pred", &o]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().last().unwrap().ends_with("1.0000     1.0000     1.0000"));
}

#[test]
fn tag_edge_cases() {
    let f = Fixture::new();
    assert_eq!(code(&f.train(&[])), 0);
    let (m, o) = (f.arg("model.crf"), f.arg("out.txt"));

    let empty = f.write("empty.txt", "").to_string_lossy().into_owned();
    let out = crfner(&["tag", "--model", &m, "--input", &empty, "--output", &o]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(f.path("out.txt")).unwrap(), "");

    let labeled = f.arg("train.txt");
    let out = crfner(&["tag", "--model", &m, "--input", &labeled, "--output", &o]);
    assert_eq!(code(&out), 2);

    let mut bytes = fs::read(f.path("model.crf")).unwrap();
    bytes[0] ^= 0xff;
    let bad = f.path("bad.crf");
    fs::write(&bad, bytes).unwrap();
    let i = f.arg("input.txt");
    let out = crfner(&["tag", "--model", bad.to_str().unwrap(), "--input", &i, "--output", &o]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("magic"), "{}", stderr(&out));
}

#[test]
fn eval_tables() {
    let f = Fixture::new();
    let gold = f.write("gold.txt", "a NNP B-NP B-PER\nb NNP I-NP I-PER\nc VB B-VP O\nd NN B-NP O\ne NNP B-NP B-LOC\n");
    let pred = f.write("pred.txt", "a NNP B-NP B-PER\nb NNP I-NP I-PER\nc VB B-VP O\nd NN B-NP B-LOC\ne NNP B-NP I-LOC\n");
    let (g, p) = (gold.to_string_lossy().into_owned(), pred.to_string_lossy().into_owned());

    let out = crfner(&["eval", "--gold", &g, "--pred", &g]);
    assert_eq!(code(&out), 0);
    let table = stdout(&out);
    assert!(table.lines().next().unwrap().contains("F-Measure"));
    let overall = table.lines().find(|l| l.starts_with("overall")).unwrap();
    assert!(overall.ends_with("1.0000     1.0000     1.0000"), "{overall}");

    let out = crfner(&["eval", "--gold", &g, "--pred", &p, "--records"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let overall = text.lines().find(|l| l.starts_with("overall")).unwrap();
    assert!(overall.ends_with("0.5000     0.5000     0.5000"), "{overall}");
    assert!(text.contains("type=overall gold=2 pred=2 correct=1 precision=0.5000 recall=0.5000 f1=0.5000"));

    let short = f.write("short.txt", "a NNP B-NP B-PER\n").to_string_lossy().into_owned();
    assert_eq!(code(&crfner(&["eval", "--gold", &g, "--pred", &short])), 1);
}

#[test]
fn stats_output() {
    let f = Fixture::new();
    let three = f.write("three.txt", "a NN B-NP O\n\nb NN B-NP B-PER\nc NN B-NP I-PER\n\nd NN B-NP O\n");
    let out = crfner(&["stats", "--input", three.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("sentences: 3"));
    assert!(text.contains("tokens: 4"));
    assert!(text.contains("label O: 2"));
    assert!(text.contains("label B-PER: 1"));

    let empty = f.write("empty.txt", "");
    let out = crfner(&["stats", "--input", empty.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("sentences: 0"));

    let unlabeled = f.arg("input.txt");
    let out = crfner(&["stats", "--input", &unlabeled]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("sentences: 30"));
    assert!(!stdout(&out).contains("label"));

    let broken = f.write("broken.txt", "a NN B-NP O\nb NN\n");
    assert_eq!(code(&crfner(&["stats", "--input", broken.to_str().unwrap()])), 1);
}

#[test]
fn nfc_flag_normalizes_before_counting() {
    let f = Fixture::new();
    // "é" decomposed, then precomposed.
    let p = f.write("nfc.txt", "e\u{301} NN B-NP O\n\n\u{e9} NN B-NP O\n");
    let out = crfner(&["stats", "--input", p.to_str().unwrap(), "--nfc"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("tokens: 2"));
}

#[test]
fn bio_check_and_repair() {
    let f = Fixture::new();
    let p = f.write("bad.txt", "a NN B-NP O\nb NN B-NP I-PER\n");
    let out = crfner(&["bio", "--input", p.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("violations: 1"));

    let fixed = f.arg("fixed.txt");
    let out = crfner(&["bio", "--input", p.to_str().unwrap(), "--repair", &fixed]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read_to_string(Path::new(&fixed)).unwrap(),
        "a\tNN\tB-NP\tO\nb\tNN\tB-NP\tB-PER\n\n"
    );
}

#[test]
fn help_is_not_an_error() {
    assert_eq!(code(&crfner(&["--help"])), 0);
    assert_eq!(code(&crfner(&["frobnicate"])), 2);
}
