use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weihrauch")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eval_prints_value_sets() {
    let o = run(&["eval", "llpo", "evp(;0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "{0,1}");
    let o = run(&["eval", "lpo", "evp(;1)"]);
    assert_eq!(stdout(&o).trim(), "{1}");
}

#[test]
fn eval_outside_the_domain_exits_1() {
    let o = run(&["eval", "llpo", "evp(;1 2)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_reports_the_depth() {
    let o = run(&["check", "llpo_to_lpo", "--depth", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("llpo_to_lpo PASS (verified to depth 8)"));
}

#[test]
fn check_reads_a_corpus_file() {
    let path = std::env::temp_dir().join(format!("weihrauch-corpus-{}.txt", std::process::id()));
    std::fs::write(&path, "# llpo inputs\nevp(;0)\n\nevp(0 0 1;0)  # one nonzero\n").unwrap();
    let o = run(&["check", "llpo_to_lpo", "--corpus", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["check", "no_such_witness"]).status.code(), Some(2));
    let o = run(&["eval", "lpo", "evp(1;"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grammar"));
}

#[test]
fn literals_round_trip_through_eval() {
    let o = run(&["eval", "id", "pair(evp(1;2),rows(default=evp(;0);3:evp(4;5)))"]);
    assert_eq!(o.status.code(), Some(0));
    let printed = stdout(&o);
    assert!(printed.contains("pair(evp(1;2)"), "{printed}");
}

#[test]
fn mismatched_composition_is_a_usage_error() {
    let o = run(&["compose", "llpo_to_lpo", "id_to_c", "--depth", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn derived_witnesses_check() {
    for args in [
        ["compose", "llpo_r_to_llpo", "llpo_to_lpo"],
        ["product", "llpo_to_lpo", "id_to_c"],
        ["sum", "llpo_to_lpo", "id_to_c"],
    ] {
        let o = run(&[&args[..], &["--depth", "6", "--inputs", "8"]].concat());
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
}

#[test]
fn negative_suite_rejects_every_control() {
    let o = run(&["suite", "negative", "--depth", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("NOT REJECTED"));
}

#[test]
fn limit_adversary_forces_k_changes() {
    let o = run(&["limit", "adversary", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mind changes: 3"));
}

#[test]
fn swap_sides_agree() {
    let o = run(&["swap", "--machine", "nand01", "--point", "rows(default=evp(;0))"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("equal"));
}

#[test]
fn medvedev_verbs() {
    let o = run(&["medvedev", "embed", "mass(evp(;0))", "mass(evp(;1))", "--machine", "flip"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["medvedev", "check", "mass(evp(;0))", "mass(evp(;1))", "--machine", "succ"]);
    assert_eq!(o.status.code(), Some(1));
}
