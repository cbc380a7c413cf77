use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn combsynth(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combsynth"))
        .args(args)
        .current_dir(cwd)
        .env("LC_ALL", "C")
        .output()
        .expect("run combsynth")
}

fn text(lines: usize) -> String {
    let words = ["Apple", "pear", "PLUM", "fig", "kiwi", "lime", "date", "Yuzu", "sloe"];
    let mut out = String::new();
    for i in 0..lines {
        for j in 0..(i % 7) + 1 {
            if j > 0 {
                out.push_str(if (i + j) % 5 == 0 { ", " } else { " " });
            }
            out.push_str(words[(i * 31 + j * 17) % words.len()]);
        }
        out.push('\n');
    }
    out
}

#[test]
fn synth_is_deterministic_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = combsynth(&["synth", "--cmd", "wc -l", "--seed", "7"], dir.path());
    let b = combsynth(&["synth", "--cmd", "wc -l", "--seed", "7"], dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let record: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(record["combiner"], "(back nl add)");
    assert_eq!(record["status"], "ok");
}

#[test]
fn parallelize_run_matches_the_serial_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.txt"), text(20_000)).unwrap();
    let pipeline = "cat in.txt | tr -cs A-Za-z '\\n' | tr A-Z a-z | sort | uniq -c | sort -rn";
    fs::write(dir.path().join("wf.sh"), format!("{pipeline} > par.out\n")).unwrap();
    let serial = Command::new("sh")
        .arg("-c")
        .arg(pipeline)
        .current_dir(dir.path())
        .env("LC_ALL", "C")
        .output()
        .unwrap();

    let out = combsynth(
        &["parallelize", "wf.sh", "--width", "4", "--run", "--plan", "plan.json", "--cache", "cache.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(dir.path().join("par.out")).unwrap(), serial.stdout);

    fs::remove_file(dir.path().join("par.out")).unwrap();
    let rerun = combsynth(&["run", "plan.json"], dir.path());
    assert_eq!(rerun.status.code(), Some(0), "{}", String::from_utf8_lossy(&rerun.stderr));
    assert_eq!(fs::read(dir.path().join("par.out")).unwrap(), serial.stdout);
}

#[test]
fn combine_parts_from_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a"), "      2 x\n      1 y\n").unwrap();
    fs::write(dir.path().join("b"), "      3 y\n      1 z\n").unwrap();
    let out = combsynth(&["combine", "--combiner", "(stitch2 sp add first)", "a", "b"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "      2 x\n      4 y\n      1 z\n");

    let out = combsynth(&["combine", "--combiner", "(back nl add)", "a", "b"], dir.path());
    assert_eq!(out.status.code(), Some(4), "inputs outside the domain fail the combine");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.sh"), "sort < in.txt | uniq\n").unwrap();
    assert_eq!(combsynth(&["parallelize", "bad.sh"], dir.path()).status.code(), Some(3));
    assert_eq!(combsynth(&["combine", "--combiner", "(stitch (stitch first))"], dir.path()).status.code(), Some(1));
    assert_eq!(combsynth(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(combsynth(&["parallelize", "bad.sh", "--width", "1"], dir.path()).status.code(), Some(1));

    let violated = combsynth(
        &["--builtin-only", "verify", "--cmd", "tr A-Z a-z", "--combiner", "first", "--samples", "50"],
        dir.path(),
    );
    assert_eq!(violated.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&violated.stdout).starts_with("verdict: violated"));
    let holds = combsynth(
        &["--builtin-only", "verify", "--cmd", "uniq -c", "--combiner", "(stitch2 sp add first)", "--samples", "50"],
        dir.path(),
    );
    assert_eq!(holds.status.code(), Some(0), "{}", String::from_utf8_lossy(&holds.stdout));
}
