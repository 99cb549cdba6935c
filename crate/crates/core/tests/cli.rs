use std::process::Command;

use braidlog::braid::build_tchlog;
use braidlog::cli::{run, MatrixFile};
use serde_json::Value;

fn braidlog(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_braidlog"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, text) = braidlog(args);
    assert_eq!(code, 0, "{args:?}");
    serde_json::from_str(&text).unwrap()
}

fn usize_list(v: &Value) -> Vec<usize> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap() as usize)
        .collect()
}

#[test]
fn cell_counts() {
    let r = json(&["cells", "--complex", "tchlog", "--n", "3"]);
    assert_eq!(usize_list(&r["degrees"]), vec![0, 1]);
    assert_eq!(usize_list(&r["counts"]), vec![3, 4]);
    assert_eq!(
        usize_list(&json(&["cells", "--complex", "morse", "--n", "4"])["counts"]),
        vec![6, 16, 12]
    );
    assert_eq!(
        usize_list(&json(&["cells", "--complex", "ch", "--n", "2"])["counts"]),
        vec![2, 2]
    );
    let s = json(&[
        "cells",
        "--complex",
        "chlog-s",
        "--n",
        "5",
        "--subset",
        "2,4",
    ]);
    assert_eq!(usize_list(&s["counts"]), vec![2, 2]);
}

#[test]
fn homology_modes() {
    let r = json(&[
        "homology",
        "--complex",
        "tchlog",
        "--n",
        "5",
        "--coeff",
        "generic",
    ]);
    assert_eq!(usize_list(&r["betti"]), vec![0, 0, 0, 6]);
    assert_eq!(r["agreement"], Value::Bool(true));

    let r = json(&[
        "homology",
        "--complex",
        "ch",
        "--n",
        "4",
        "--coeff",
        "integer",
    ]);
    assert_eq!(usize_list(&r["betti"]), vec![1, 6, 11, 6]);
    assert!(r["torsion"]
        .as_array()
        .unwrap()
        .iter()
        .all(|t| t.as_array().unwrap().is_empty()));

    let r = json(&[
        "homology",
        "--complex",
        "tchlog",
        "--n",
        "4",
        "--coeff",
        "integer",
        "--at-one",
    ]);
    assert_eq!(usize_list(&r["betti"]), vec![1, 5, 6]);

    let r = json(&[
        "homology",
        "--complex",
        "ch",
        "--n",
        "3",
        "--coeff",
        "fp",
        "--prime",
        "7",
    ]);
    assert_eq!(usize_list(&r["betti"]), vec![1, 3, 2]);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(
        run([
            "braidlog",
            "homology",
            "--complex",
            "tchlog",
            "--n",
            "4",
            "--coeff",
            "integer"
        ]),
        2
    );
    assert_eq!(
        run([
            "braidlog",
            "homology",
            "--complex",
            "ch",
            "--n",
            "4",
            "--coeff",
            "generic"
        ]),
        2
    );
    assert_eq!(
        run(["braidlog", "homology", "--complex", "tchlog", "--n", "7"]),
        2
    );
    assert_eq!(
        run(["braidlog", "cells", "--complex", "tchlog", "--n", "8"]),
        2
    );
    assert_eq!(
        run(["braidlog", "cells", "--complex", "chlog-s", "--n", "4"]),
        2
    );
    assert_eq!(
        run([
            "braidlog",
            "cells",
            "--complex",
            "chlog-s",
            "--n",
            "4",
            "--subset",
            "3,4"
        ]),
        2
    );
    assert_eq!(
        run(["braidlog", "homology", "--n", "3", "--prime", "12"]),
        2
    );
    assert_eq!(
        run(["braidlog", "homology", "--n", "3", "--prime", "101"]),
        2
    );
    assert_eq!(run(["braidlog", "frobnicate"]), 2);
    assert_eq!(run(["braidlog", "cells", "--n", "x"]), 2);
}

#[test]
fn verify_battery() {
    let (code, text) = braidlog(&["verify", "--n", "2"]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(r["pass"], Value::Bool(true));

    let r = json(&["verify", "--n", "4"]);
    assert_eq!(r["pass"], Value::Bool(true));
    let e1 = r["steps"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "e1_page")
        .unwrap();
    let table: Vec<Vec<usize>> = e1["details"]["table"]
        .as_array()
        .unwrap()
        .iter()
        .map(usize_list)
        .collect();
    assert_eq!(table, vec![vec![0, 0, 0], vec![0, 0, 0], vec![2, 0, 0]]);
    let names: Vec<&str> = r["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "d_squared",
            "matching",
            "morse_equivalence",
            "generic_betti",
            "strata_decomposition",
            "e1_page",
            "tau_refinement",
            "integral_at_one"
        ]
    );
    let code = run(["braidlog", "verify", "--n", "3", "--trials", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_n6() {
    let r = json(&["verify", "--n", "6"]);
    assert_eq!(r["pass"], Value::Bool(true));
    let step = r["steps"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "generic_betti")
        .unwrap();
    assert_eq!(
        usize_list(&step["details"]["report"]["betti"]),
        vec![0, 0, 0, 0, 24]
    );
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["verify", "--n", "4", "--seed", "17"][..],
        &["homology", "--complex", "morse", "--n", "4", "--seed", "3"][..],
    ] {
        let (_, a) = braidlog(args);
        let (_, b) = braidlog(args);
        assert_eq!(a, b);
    }
}

#[test]
fn export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _) = braidlog(&[
        "export",
        "--complex",
        "tchlog",
        "--n",
        "3",
        "--degree",
        "1",
        "--out",
        out,
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.path().join("tchlog_n3_d1.json")).unwrap();
    let file: MatrixFile = serde_json::from_str(&text).unwrap();
    assert_eq!((file.rows, file.cols), (3, 4));
    assert_eq!(file.ring, "laurent:t_1_3,t_2_3");
    let c = build_tchlog(3).unwrap();
    assert_eq!(&file.to_laurent().unwrap(), c.boundary(1));

    let basis = std::fs::read_to_string(dir.path().join("tchlog_n3_basis1.csv")).unwrap();
    assert!(
        basis.lines().any(|l| l == "3,3 1 | 2,1,critical"),
        "{basis}"
    );

    let (code, _) = braidlog(&["export", "--complex", "ch", "--n", "3", "--out", out]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.path().join("ch_n3_d2.json")).unwrap();
    let file: MatrixFile = serde_json::from_str(&text).unwrap();
    assert_eq!(
        &file.to_integer().unwrap(),
        braidlog::braid::build_ch(3).unwrap().boundary(2)
    );
    assert!(file.to_laurent().is_err());

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let (code, _) = braidlog(&[
        "export",
        "--complex",
        "ch",
        "--n",
        "3",
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
}
