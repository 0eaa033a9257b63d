use std::path::Path;
use std::process::{Command, Output};

fn shapetensor(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapetensor")).args(args).current_dir(dir).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = shapetensor(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    shapetensor(dir, args).status.code().unwrap()
}

fn trained(dir: &Path) {
    ok(dir, &["cst-gen", "--count", "20", "--nc", "81", "--out", "d"]);
    ok(dir, &["fit", "--input", "d/manifest.csv", "--out", "m.txt"]);
}

#[test]
fn input_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(dir, &["dist", "--a", "missing.dat", "--b", "missing.dat"]), 2);
    std::fs::write(dir.join("bad.dat"), "0 0\n1 nan\n2 2\n").unwrap();
    assert_eq!(code(dir, &["dist", "--a", "bad.dat", "--b", "bad.dat"]), 2);
    trained(dir);
    assert_eq!(code(dir, &["sample", "--model", "m.txt", "--coeffs", "1,1", "--out", "s"]), 2);
    ok(dir, &["synth-blade", "--stations", "4", "--nc", "41", "--out", "b/blade.txt"]);
    assert_eq!(code(dir, &["blade", "eval", "--blade", "b/blade.txt", "--eta", "1.5", "--out", "x.dat"]), 2);
}

#[test]
fn non_convergence_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["cst-gen", "--count", "20", "--nc", "81", "--out", "d"]);
    let args = ["fit", "--input", "d/manifest.csv", "--out", "m.txt", "--max-iter", "1", "--epsilon", "1e-300"];
    assert_eq!(code(dir, &args), 3);
    assert!(!dir.join("m.txt").exists());
}

#[test]
fn strict_guards_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["synth-blade", "--stations", "6", "--nc", "61", "--out", "b/blade.txt"]);
    ok(dir, &["blade", "build", "--blade", "b/blade.txt", "--out", "k.csv"]);
    assert_eq!(code(dir, &["blade", "build", "--blade", "b/blade.txt", "--strict", "--out", "k.csv"]), 4);
    ok(dir, &["blade", "build", "--blade", "b/blade.txt", "--variant", "product", "--strict", "--out", "k.csv"]);

    trained(dir);
    let guarded = ["1,0,0,0", "0,0,1,0", "0,0,0,1", "0,2,0,0"].iter().find(|c| {
        code(dir, &["sample", "--model", "m.txt", "--coeffs", c, "--strict", "--out", "s"]) == 4
    });
    let c = guarded.expect("a large coefficient vector trips the guard");
    assert_eq!(code(dir, &["sample", "--model", "m.txt", "--coeffs", c, "--out", "s"]), 0);
}

#[test]
fn fit_writes_model_and_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    trained(dir);
    let eig = std::fs::read_to_string(dir.join("m_eigenvalues.csv")).unwrap();
    assert!(eig.lines().count() >= 2);
    assert!(std::fs::read_to_string(dir.join("m.txt")).unwrap().starts_with("shapetensor-model 1"));
}

#[test]
fn distances_are_symmetric() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["cst-gen", "--count", "3", "--nc", "81", "--out", "d"]);
    let files: Vec<_> = std::fs::read_dir(dir.join("d"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "dat"))
        .collect();
    let (a, b) = (files[0].to_str().unwrap(), files[1].to_str().unwrap());
    for space in ["grassmann", "spd", "euclidean"] {
        let ab: f64 = ok(dir, &["dist", "--a", a, "--b", b, "--space", space]).trim().parse().unwrap();
        let ba: f64 = ok(dir, &["dist", "--a", b, "--b", a, "--space", space]).trim().parse().unwrap();
        assert!(ab > 0.0 && (ab - ba).abs() <= 1e-12 * ab, "{space}: {ab} vs {ba}");
        let aa: f64 = ok(dir, &["dist", "--a", a, "--b", a, "--space", space]).trim().parse().unwrap();
        assert!(aa.abs() < 1e-7, "{space}: {aa}");
    }
}

#[test]
fn wireframe_obj_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["synth-blade", "--stations", "5", "--nc", "41", "--out", "b/blade.txt"]);
    ok(dir, &["blade", "wireframe", "--blade", "b/blade.txt", "--sections", "7", "--out", "w.obj"]);
    let obj = std::fs::read_to_string(dir.join("w.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 7 * 41);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 6 * 40);
}
