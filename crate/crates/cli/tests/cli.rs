use std::io::Write;
use std::process::{Command, Output, Stdio};

fn penrose(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_penrose"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: &[u8]) -> Vec<u8> {
    let o = penrose(args, stdin);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

#[test]
fn generate_and_verify() {
    let p2 = ok(&["gen", "--seed", "sun", "--steps", "3"], b"");
    let out = ok(&["verify", "--vertex-figures"], &p2);
    assert!(out.is_empty());
}

#[test]
fn full_pipeline_reports_five_gap_kinds() {
    let p2 = ok(&["gen", "--seed", "sun", "--steps", "4"], b"");
    let p3 = ok(&["derive", "--to", "p3"], &p2);
    let g = ok(&["group", "--scheme", "t10t11"], &p3);
    let t = ok(&["pair-t12"], &g);
    ok(&["verify"], &t);
    let stats: serde_json::Value = serde_json::from_slice(&ok(&["stats"], &t)).unwrap();
    assert_eq!(stats["system"], "t12");
    for k in ["GapTriangle", "GapQuad", "RotorA", "RotorB", "RotorC", "T12"] {
        assert!(stats["counts"][k].as_u64().unwrap() > 0, "{k}");
    }
}

#[test]
fn periodic_construction_has_a_witness() {
    let p = ok(&["periodic", "--name", "fig9b", "--copies", "3x3"], b"");
    let o = penrose(&["verify"], &p);
    assert_eq!(o.status.code(), Some(0));
    // incomplete edges are listed but not fatal
    for line in String::from_utf8(o.stdout).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["fatal"], false);
    }
    let stats: serde_json::Value = serde_json::from_slice(&ok(&["stats", "--periodicity"], &p)).unwrap();
    assert!(stats["periodicity"]["u"].is_array());
}

#[test]
fn overlapping_tiles_exit_one() {
    let doc = r#"{"format":1,"system":"p3","level":0,"denom":1,"tiles":[
{"kind":"ThinRhomb","rot":0,"refl":false,"t":[0,0,0,0],"partial":false,"parent":null},
{"kind":"ThinRhomb","rot":0,"refl":false,"t":[0,0,0,0],"partial":false,"parent":null}]}"#;
    let o = penrose(&["verify"], doc.as_bytes());
    assert_eq!(o.status.code(), Some(1));
    let first = String::from_utf8(o.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    assert_eq!(v["kind"], "Overlap");
    assert_eq!(v["fatal"], true);
}

#[test]
fn bad_input_exits_two() {
    let rot10 = r#"{"format":1,"system":"p3","level":0,"denom":1,"tiles":[
{"kind":"ThinRhomb","rot":10,"refl":false,"t":[0,0,0,0],"partial":false,"parent":null}]}"#;
    let o = penrose(&["verify"], rot10.as_bytes());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rot"));
    assert_eq!(penrose(&["verify"], b"not json").status.code(), Some(2));
    assert_eq!(penrose(&["gen", "--seed", "moon"], b"").status.code(), Some(2));
    assert_eq!(penrose(&["group", "--scheme", "t1t2"], &ok(&["gen", "--seed", "kite"], b"")).status.code(), Some(2));
    assert_eq!(penrose(&["periodic", "--name", "fig9a", "--copies", "0x2"], b"").status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let run = || {
        let p2 = ok(&["gen", "--seed", "star", "--steps", "4"], b"");
        let p3 = ok(&["derive", "--to", "p3"], &p2);
        let g = ok(&["group", "--scheme", "t2t3"], &p3);
        let svg = ok(&["render", "--decorations"], &g);
        (p3, g, svg)
    };
    assert_eq!(run(), run());
}

#[test]
fn file_input_matches_stdin() {
    let p2 = ok(&["gen", "--seed", "dart", "--steps", "3"], b"");
    let dir = tempdir();
    let path = dir.join("p2.json");
    std::fs::write(&path, &p2).unwrap();
    let again = ok(&["derive", "--to", "p3", "-i", path.to_str().unwrap()], b"");
    assert_eq!(again, ok(&["derive", "--to", "p3"], &p2));
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("penrose-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn render_emits_svg() {
    let p2 = ok(&["gen", "--seed", "kite", "--steps", "2"], b"");
    let svg = String::from_utf8(ok(&["render"], &p2)).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    let tiles = String::from_utf8(p2).unwrap().matches("\"kind\"").count();
    assert_eq!(svg.matches("<path").count(), tiles);
}

#[test]
fn version_lists_data_hashes() {
    let out = String::from_utf8(ok(&["--version"], b"")).unwrap();
    for f in ["catalog", "groups", "periodic", "vertex_figures"] {
        assert!(out.contains(f), "{out}");
    }
}
