use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tareduce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tareduce"))
        .args(args)
        .output()
        .expect("run tareduce")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(dir: &Path, extra: &[&str]) {
    let d = dir.to_str().unwrap();
    let mut args = vec!["generate", "--out-dir", d];
    args.extend_from_slice(extra);
    let o = tareduce(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

const REDUCIBLE: &str = "\
Ops a:2 b:0

Automaton twins
States p q r
Final States p
Transitions
b -> q
b -> r
a(q, r) -> p
a(r, q) -> p
";

#[test]
fn generate_is_byte_identical() {
    let t = tempfile::tempdir().unwrap();
    let (x, y) = (t.path().join("x"), t.path().join("y"));
    for d in [&x, &y] {
        generate(
            d,
            &["--count", "300", "--seed", "7", "--n", "4", "--td", "1.5"],
        );
    }
    let mut names: Vec<_> = fs::read_dir(&x)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 300);
    for name in names {
        assert_eq!(
            fs::read(x.join(&name)).unwrap(),
            fs::read(y.join(&name)).unwrap()
        );
    }
}

#[test]
fn generated_counts_follow_parameters() {
    let t = tempfile::tempdir().unwrap();
    generate(
        t.path(),
        &["--n", "4", "--s", "2", "--td", "1.5", "--ad", "0.5"],
    );
    let f = t.path().join("tv000.tim");
    let o = tareduce(&["stats", f.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("a0:2 6"), "{out}");
    assert!(out.contains("a1:2 6"), "{out}");
    assert!(out.contains("l0:0 2"), "{out}");
}

#[test]
fn reduce_prints_automaton_and_certifies() {
    let t = tempfile::tempdir().unwrap();
    let input = t.path().join("twins.tim");
    fs::write(&input, REDUCIBLE).unwrap();
    let o = tareduce(&["reduce", input.to_str().unwrap(), "--certify", "exact"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("# before: states=3 transitions=4"), "{out}");
    assert!(out.contains("# after: states=2 transitions=2"), "{out}");
    assert!(out.contains("# certify PASS (exact)"), "{out}");

    // standard output is itself a Timbuk file
    let again = t.path().join("again.tim");
    fs::write(&again, &out).unwrap();
    let o = tareduce(&[
        "equiv",
        input.to_str().unwrap(),
        again.to_str().unwrap(),
        "--exact",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "TRUE");
}

#[test]
fn reduce_options_and_algorithms() {
    let t = tempfile::tempdir().unwrap();
    generate(t.path(), &["--n", "5", "--td", "2", "--seed", "3"]);
    let f = t.path().join("tv000.tim");
    let f = f.to_str().unwrap();
    for extra in [
        &[
            "--algo",
            "heavy",
            "--x",
            "2",
            "--cache",
            "global",
            "--prerefine",
            "2",
        ][..],
        &["--algo", "sat1", "--cache", "none", "--parallel"],
        &["--algo", "sat2", "--y", "2"],
    ] {
        let out = t.path().join("out.tim");
        let mut args = vec![
            "reduce",
            f,
            "--out",
            out.to_str().unwrap(),
            "--certify",
            "5",
        ];
        args.extend_from_slice(extra);
        let o = tareduce(&args);
        assert!(
            o.status.success(),
            "{extra:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(stdout(&o).contains("# certify PASS"));
        assert!(fs::read_to_string(&out).unwrap().starts_with("Ops "));
    }
}

#[test]
fn heavy_on_a_fixpoint_keeps_stats() {
    let t = tempfile::tempdir().unwrap();
    let input = t.path().join("twins.tim");
    let once = t.path().join("once.tim");
    fs::write(&input, REDUCIBLE).unwrap();
    let o = tareduce(&[
        "reduce",
        input.to_str().unwrap(),
        "--out",
        once.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = tareduce(&["reduce", once.to_str().unwrap()]);
    let out = stdout(&o);
    let line = |tag: &str| {
        out.lines()
            .find_map(|l| l.strip_prefix(tag))
            .unwrap_or_default()
            .to_string()
    };
    assert_eq!(line("# before: "), line("# after: "));
}

#[test]
fn parse_errors_exit_2() {
    let t = tempfile::tempdir().unwrap();
    let bad = t.path().join("bad.tim");
    fs::write(
        &bad,
        "Ops a:2\nAutomaton x\nStates q\nFinal States q\nTransitions\na(q) -> q\n",
    )
    .unwrap();
    let o = tareduce(&["stats", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = tareduce(&["reduce", t.path().join("missing.tim").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn complement_budget_exits_3() {
    let t = tempfile::tempdir().unwrap();
    let input = t.path().join("twins.tim");
    fs::write(&input, REDUCIBLE).unwrap();
    let o = tareduce(&["--macro-budget", "1", "complement", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("determinization exceeded"));
}

#[test]
fn equiv_detects_difference() {
    let t = tempfile::tempdir().unwrap();
    let a = t.path().join("a.tim");
    let b = t.path().join("b.tim");
    fs::write(&a, REDUCIBLE).unwrap();
    // same language without the second `a` rule, plus an unrelated symbol
    fs::write(
        &b,
        "Ops c:1 b:0 a:2\nAutomaton y\nStates p q\nFinal States p\nTransitions\nb -> q\na(q,q) -> p\n",
    )
    .unwrap();
    let o = tareduce(&["equiv", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    fs::write(
        &b,
        "Ops a:2 b:0\nAutomaton y\nStates p q\nFinal States p q\nTransitions\nb -> q\na(q,q) -> p\n",
    )
    .unwrap();
    let o = tareduce(&[
        "equiv",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--depth",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("FALSE"));
    assert!(out.contains("distinguished by b"), "{out}");
    let o = tareduce(&["equiv", a.to_str().unwrap(), b.to_str().unwrap(), "--exact"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn complement_of_empty_language_is_universal() {
    let t = tempfile::tempdir().unwrap();
    generate(t.path(), &["--n", "3", "--ad", "0"]);
    let input = t.path().join("tv000.tim");
    let once = t.path().join("once.tim");
    let twice = t.path().join("twice.tim");
    let o = tareduce(&[
        "complement",
        input.to_str().unwrap(),
        "--out",
        once.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = tareduce(&[
        "complement",
        once.to_str().unwrap(),
        "--out",
        twice.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = tareduce(&["reduce", twice.to_str().unwrap()]);
    assert!(
        stdout(&o).contains("# after: states=0 transitions=0"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn complement_report_row_names_pipeline() {
    let t = tempfile::tempdir().unwrap();
    generate(t.path(), &["--n", "4", "--td", "2"]);
    let input = t.path().join("tv000.tim");
    let o = tareduce(&["complement", input.to_str().unwrap(), "--pipeline", "H+C+H"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("corpus_id,pipeline,step,states,transitions,ms,error")
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("tv000,H+C+H,\"H(1,1):"), "{row}");
    let o = tareduce(&["complement", input.to_str().unwrap(), "--pipeline", "X+C"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_writes_ordered_rows_and_records_errors() {
    let t = tempfile::tempdir().unwrap();
    let corpus = t.path().join("corpus");
    generate(&corpus, &["--n", "3", "--td", "1.5", "--count", "6"]);
    fs::write(corpus.join("tv002x.tim"), "not an automaton").unwrap();
    let csv = t.path().join("r.csv");
    let o = tareduce(&[
        "bench",
        "--corpus",
        corpus.to_str().unwrap(),
        "--pipelines",
        "C,H(2,1)+C,H+C+H",
        "--csv",
        csv.to_str().unwrap(),
        "--jobs",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut rdr = csv_rows(&text);
    let header = rdr.remove(0);
    assert_eq!(header[0], "corpus_id");
    assert_eq!(rdr.len(), 7 * 3);
    let ids: Vec<&str> = rdr.iter().map(|r| r[0].as_str()).collect();
    for chunk in ids.chunks(3) {
        assert!(chunk.iter().all(|id| *id == chunk[0]), "{ids:?}");
    }
    assert_eq!(ids[9], "tv002x");
    for (i, r) in rdr.iter().enumerate() {
        assert_eq!(r[1], ["C", "H(2,1)+C", "H+C+H"][i % 3]);
        assert_eq!(r[6].is_empty(), r[0] != "tv002x");
    }

    // totals equal independent single runs
    let single = tareduce(&[
        "complement",
        corpus.join("tv000.tim").to_str().unwrap(),
        "--pipeline",
        "H+C+H",
    ]);
    let row = csv_rows(&stdout(&single)).remove(1);
    assert_eq!((&row[3], &row[4]), (&rdr[2][3], &rdr[2][4]));
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.expect("csv record").iter().map(String::from).collect())
        .collect()
}
