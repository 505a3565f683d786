use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn lph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lph")).args(args).output().expect("binary runs")
}

fn last_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).lines().last().unwrap_or_default().to_string()
}

#[test]
fn eval_three_colorability() {
    let out = lph(&["eval", "--graph", &data("k3.lg"), "--formula", &data("3col.lso")]);
    assert_eq!((out.status.code(), last_line(&out).as_str()), (Some(0), "true"));
    let out = lph(&["eval", "--graph", &data("k4.lg"), "--formula", &data("3col.lso")]);
    assert_eq!((out.status.code(), last_line(&out).as_str()), (Some(1), "false"));
}

#[test]
fn oracle_on_an_edge() {
    let out = lph(&["oracle", "--name", "hamiltonian", "--graph", &data("p2.lg")]);
    assert_eq!((out.status.code(), last_line(&out).as_str()), (Some(1), "false"));
    let out = lph(&["oracle", "--name", "colorable(2)", "--graph", &data("p2.lg")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_reduction_table() {
    let out = lph(&["verify-reduction", "--name", "as2ham", "--max-nodes", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("    4        50     50     6"), "{text}");
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(lph(&["eval", "--formula", &data("3col.lso")]).status.code(), Some(2));
    assert_eq!(lph(&["oracle", "--name", "nosuch", "--graph", &data("p2.lg")]).status.code(), Some(2));
    assert_eq!(lph(&["eval", "--graph", &data("missing.lg"), "--formula", &data("3col.lso")]).status.code(), Some(2));
    assert_eq!(lph(&["acceptance", "--criterion", "11"]).status.code(), Some(2));
}

#[test]
fn same_seed_same_bytes() {
    let run = |seed: &str| lph(&["--seed", seed, "gen-ids", "--graph", &data("k4.lg"), "--rho", "2"]).stdout;
    assert_eq!(run("7"), run("7"));
    let sweep = |jobs: &str| lph(&["--jobs", jobs, "verify-reduction", "--name", "as2eul", "--max-nodes", "4"]).stdout;
    assert_eq!(sweep("1"), sweep("4"));
}

#[test]
fn json_records() {
    let out = lph(&["--json", "oracle", "--name", "eulerian", "--graph", &data("k3.lg")]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], true);
    assert_eq!(v["property"], "eulerian");
}

#[test]
fn pictures_and_tilings() {
    let accept = lph(&["tiling", "--ts", &data("even.ts"), "--picture", &data("grid.pic")]);
    let reject = lph(&["tiling", "--ts", &data("even.ts"), "--picture", &data("odd.pic")]);
    assert_eq!((accept.status.code(), reject.status.code()), (Some(0), Some(1)));
    let out = lph(&["eval", "--picture", &data("odd.pic"), "--formula", &data("vertical.lso")]);
    assert_eq!(last_line(&out), "true");
    let out = lph(&["encode-picture", "--picture", &data("odd.pic")]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("node ")).count(), 30);
}

#[test]
fn reductions_chain_through_files() {
    let dir = std::env::temp_dir().join(format!("lph-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let step = |name: &str, input: &str, output: &str| {
        let out = lph(&["reduce", "--name", name, "--graph", input]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let path = dir.join(output);
        std::fs::write(&path, out.stdout).unwrap();
        path.to_string_lossy().into_owned()
    };
    let sat = step("cooklevin", &data("k3.lg"), "sat.lg");
    assert_eq!(last_line(&lph(&["oracle", "--name", "satgraph", "--graph", &sat])), "true");
    let three = step("sat2_3sat", &sat, "3sat.lg");
    let col = step("3sat2_3col", &three, "3col.lg");
    assert_eq!(last_line(&lph(&["oracle", "--name", "colorable(3)", "--graph", &col])), "true");
    let sat = step("cooklevin", &data("k4.lg"), "sat4.lg");
    assert_eq!(last_line(&lph(&["oracle", "--name", "satgraph", "--graph", &sat])), "false");
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn run_and_arbitrate() {
    let out = lph(&["run", "--graph", &data("k3.lg"), "--machine", &data("copy.dtm")]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("rounds: 1"));
    assert_eq!(text.matches("result=\"##\"").count(), 3);
    let out = lph(&["arbitrate", "--graph", &data("k4.lg"), "--formula", &data("3col.lso")]);
    assert_eq!(last_line(&out), "false");
    let out = lph(&["arbitrate", "--graph", &data("selected.lg"), "--program", "allselected", "--level", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn classify_and_acceptance() {
    let out = lph(&["classify", "--formula", &data("3col.lso")]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("class: monadic Sigma(1)"));
    let out = lph(&["acceptance", "--criterion", "2"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[PASS] criterion  2"));
    assert_eq!(out.status.code(), Some(0));
}
