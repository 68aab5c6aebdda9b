use std::io::Write;
use std::process::{Command, Output, Stdio};

const FIG1: &str = include_str!("../../core/tests/corpus/logo_v1.little");

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sketchlab"))
}

fn file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn svg_prints_the_drawing() {
    let f = file(FIG1);
    let o = bin().arg("svg").arg(f.path()).output().unwrap();
    assert!(o.status.success());
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<line").count(), 2);
    assert_eq!(svg.matches("<rect").count(), 1);
}

#[test]
fn eval_prints_json_shapes() {
    let f = file(FIG1);
    let o = bin().arg("eval").arg(f.path()).output().unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[0]["tag"], "BOX");
}

#[test]
fn apply_runs_a_script() {
    let f = file(FIG1);
    let script = file(
        "# make the rectangle's corner meet the line\n\
         {\"kind\":\"select\",\"payload\":{\"featureId\":\"rect1/TL\"}}\n\
         {\"kind\":\"select\",\"payload\":{\"featureId\":\"line2/p1\"}}\n\
         {\"kind\":\"makeEqual\"}\n\
         {\"kind\":\"cleanUp\"}\n",
    );
    let o = bin().arg("apply").arg(f.path()).arg(script.path()).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let code = stdout(&o);
    assert!(code.contains("rect1_left rect1_top x2 y2"), "{code}");
    assert_ne!(code, FIG1);
}

#[test]
fn apply_reports_the_failing_line() {
    let f = file(FIG1);
    let script = file("{\"kind\":\"getCode\"}\n{\"kind\":\"makeEqual\"}\n");
    let o = bin().arg("apply").arg(f.path()).arg(script.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains(":2: TooFewFeatures"), "{err}");
}

#[test]
fn apply_with_seed_is_reproducible() {
    let f = file("(blobs [])");
    let script = file("{\"kind\":\"draw\",\"payload\":{\"tool\":\"rect\",\"geometry\":[[1,2],[30,40]]}}\n");
    let run = |seed: &str| stdout(&bin().args(["--seed", seed, "apply"]).arg(f.path()).arg(script.path()).output().unwrap());
    assert_eq!(run("4"), run("4"));
    assert!(run("4").contains("(def rect1"));
}

#[test]
fn apply_can_write_svg_to_a_file() {
    let f = file(FIG1);
    let script = file("");
    let out = tempfile::NamedTempFile::new().unwrap();
    let o = bin().arg("apply").arg(f.path()).arg(script.path()).arg("--svg").arg("-o").arg(out.path()).output().unwrap();
    assert!(o.status.success());
    assert!(std::fs::read_to_string(out.path()).unwrap().starts_with("<svg"));
}

#[test]
fn bad_input_exits_with_one() {
    let f = file("(def x");
    let o = bin().arg("svg").arg(f.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().arg("svg").arg("/no/such/file.little").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn pipe_answers_line_by_line() {
    let f = file(FIG1);
    let mut child = bin()
        .arg("pipe")
        .arg(f.path())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"id\":1,\"kind\":\"listFeatures\"}\n{\"id\":2,\"kind\":\"undo\"}\n{\"id\":3,\"kind\":\"undo\"}\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    let replies: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(replies.len(), 3);
    assert_eq!(replies[0]["id"], 1);
    assert!(replies[0]["payload"]["features"].as_array().unwrap().len() > 10);
    // Loading the file is the one undoable step.
    assert_eq!(replies[1]["ok"], true);
    assert_eq!(replies[2]["payload"]["error"], "NothingToUndo");
}
