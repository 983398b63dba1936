use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use failure_sieve::cli::sha256_hex;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_failure-sieve"));
    cmd.env("FAILURE_SIEVE_NO_COLOR", "1");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small synthetic corpus written through the `synth` subcommand.
fn synth_corpus(dir: &Path) -> PathBuf {
    let spec = dir.join("spec.toml");
    fs::write(&spec, "n_verbs = 80\nn_works = 10\nseed = 3\n").unwrap();
    let out = dir.join("synth");
    let res = run(&["synth", "--spec", s(&spec), "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out.join("corpus.csv")
}

/// Artifact name and digest for every file except the manifest, which
/// records its own output directory.
fn artifacts(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| {
            let name = e.file_name().into_string().unwrap();
            (name, sha256_hex(&fs::read(e.path()).unwrap()))
        })
        .collect();
    files.sort();
    files
}

#[test]
fn every_subcommand_is_deterministic_and_replays() {
    let tmp = TempDir::new().unwrap();
    let corpus = synth_corpus(tmp.path());
    let corpus = s(&corpus);

    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("ingest", vec!["ingest", "--input", corpus]),
        ("table", vec!["table", "--input", corpus]),
        (
            "classify",
            vec!["classify", "--input", corpus, "--seed", "7", "--k", "3"],
        ),
        (
            "failures",
            vec!["failures", "--input", corpus, "--format", "json"],
        ),
        (
            "sweep",
            vec![
                "sweep",
                "--input",
                corpus,
                "--k-range",
                "1:5:2",
                "--seeds",
                "1..5",
            ],
        ),
        (
            "eval",
            vec!["eval", "--input", corpus, "--seeds", "1..5", "--top", "3"],
        ),
        (
            "dist",
            vec!["dist", "--input", corpus, "--by-genre", "--format", "md"],
        ),
        ("synth", vec!["synth", "--seed", "11"]),
    ];

    for (name, args) in cases {
        let mut runs = Vec::new();
        for attempt in 0..2 {
            let out = tmp.path().join(format!("{name}-{attempt}"));
            let mut full = args.clone();
            full.extend(["--out", s(&out)]);
            let res = run(&full);
            assert_eq!(
                code(&res),
                0,
                "{name}: {}",
                String::from_utf8_lossy(&res.stderr)
            );
            runs.push(out);
        }
        assert!(runs[0].join("manifest.json").exists());
        assert_eq!(
            artifacts(&runs[0]),
            artifacts(&runs[1]),
            "{name} is not deterministic"
        );

        let replay_dir = tmp.path().join(format!("{name}-replay"));
        let res = run(&[
            "replay",
            "--manifest",
            s(&runs[0].join("manifest.json")),
            "--out",
            s(&replay_dir),
        ]);
        assert_eq!(
            code(&res),
            0,
            "{name} replay: {}",
            String::from_utf8_lossy(&res.stderr)
        );
        assert_eq!(
            artifacts(&runs[0]),
            artifacts(&replay_dir),
            "{name} replay output differs"
        );
    }
}

#[test]
fn report_rerenders_json_as_markdown() {
    let tmp = TempDir::new().unwrap();
    let corpus = synth_corpus(tmp.path());
    let out = tmp.path().join("f");
    let res = run(&[
        "failures",
        "--input",
        s(&corpus),
        "--format",
        "json",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&res), 0);

    let res = run(&[
        "report",
        "--report",
        s(&out.join("report.json")),
        "--top",
        "3",
    ]);
    assert_eq!(code(&res), 0);
    let md = String::from_utf8(res.stdout).unwrap();
    assert!(md.starts_with("# Failure report"));
    for section in ["## Correct", "## False passives", "## False actives"] {
        assert!(md.contains(section), "{section} missing");
    }

    let direct = run(&["failures", "--input", s(&corpus), "--top", "3"]);
    assert_eq!(code(&direct), 0);
    assert_eq!(String::from_utf8(direct.stdout).unwrap(), md);
}

#[test]
fn replay_detects_changed_input() {
    let tmp = TempDir::new().unwrap();
    let corpus = synth_corpus(tmp.path());
    let copy = tmp.path().join("copy.csv");
    fs::copy(&corpus, &copy).unwrap();
    let out = tmp.path().join("t");
    assert_eq!(
        code(&run(&["table", "--input", s(&copy), "--out", s(&out)])),
        0
    );

    let mut text = fs::read_to_string(&copy).unwrap();
    text.push_str("w,,extra,Active,,,,,\n");
    fs::write(&copy, text).unwrap();
    let res = run(&["replay", "--manifest", s(&out.join("manifest.json"))]);
    assert_eq!(code(&res), 3);
}

#[test]
fn missing_recode_file_exits_4_without_output() {
    let tmp = TempDir::new().unwrap();
    let corpus = synth_corpus(tmp.path());
    let out = tmp.path().join("never");
    let res = run(&[
        "failures",
        "--input",
        s(&corpus),
        "--recode",
        s(&tmp.path().join("absent.toml")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&res), 4);
    assert!(!out.exists());
}

#[test]
fn malformed_inputs_map_to_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let header = "work_id,genre,verb,voice,gender,species,race_ethnicity,age,sexuality\n";

    let bad_voice = tmp.path().join("bad_voice.csv");
    fs::write(
        &bad_voice,
        format!("{header}w,Game,hitting,Middle,Male,Human,,,\n"),
    )
    .unwrap();
    assert_eq!(code(&run(&["table", "--input", s(&bad_voice)])), 2);

    let missing_col = tmp.path().join("missing.csv");
    fs::write(&missing_col, "work_id,verb,voice\nw,hitting,Active\n").unwrap();
    assert_eq!(code(&run(&["table", "--input", s(&missing_col)])), 2);

    let empty = tmp.path().join("empty.csv");
    fs::write(&empty, header).unwrap();
    assert_eq!(code(&run(&["table", "--input", s(&empty)])), 3);

    let one_row = tmp.path().join("one.csv");
    fs::write(
        &one_row,
        format!("{header}w,Game,hitting,Active,Male,Human,,,\n"),
    )
    .unwrap();
    assert_eq!(code(&run(&["classify", "--input", s(&one_row)])), 3);

    let corpus = synth_corpus(tmp.path());
    assert_eq!(
        code(&run(&["classify", "--input", s(&corpus), "--k", "0"])),
        4
    );
    assert_eq!(
        code(&run(&["classify", "--input", s(&corpus), "--split", "1.5"])),
        4
    );
    assert_eq!(code(&run(&["classify", "--bogus"])), 4);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn stdout_output_matches_primary_artifact() {
    let tmp = TempDir::new().unwrap();
    let corpus = synth_corpus(tmp.path());
    let printed = run(&["table", "--input", s(&corpus)]);
    assert_eq!(code(&printed), 0);
    let out = tmp.path().join("t");
    assert_eq!(
        code(&run(&["table", "--input", s(&corpus), "--out", s(&out)])),
        0
    );
    assert_eq!(printed.stdout, fs::read(out.join("table.csv")).unwrap());
    assert!(!String::from_utf8_lossy(&printed.stderr).contains('\x1b'));
}

#[test]
fn shipped_configs_load() {
    use failure_sieve::corpus::{ColumnConfig, RecodeMap, TraitCategory};
    use failure_sieve::synth::SynthSpec;

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("config");
    let recode = RecodeMap::load(&dir.join("recode.toml")).unwrap();
    assert_eq!(
        recode.lookup(TraitCategory::RaceEthnicity, "Indigenous"),
        Some("PoC")
    );
    let columns = ColumnConfig::load(&dir.join("columns.toml")).unwrap();
    assert_eq!(columns.race_ethnicity, "RaceOrEthnicity");
    assert_eq!(
        SynthSpec::load(&dir.join("synth.toml")).unwrap(),
        SynthSpec::default()
    );
}
