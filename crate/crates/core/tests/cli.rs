use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fblab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fblab")).args(args).output().expect("spawn fblab")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const TWO_PLANE: &str = r#"
schema_version = 1

[grid]
nx = 33
ny = 33
box = [-1.0, -1.0, 1.0, 1.0]

[problem]
outer = { kind = "two_plane", beta = 0.5 }

[init]
interface = { kind = "flat" }

[iteration]
max_iters = 20

[diagnostics]
center = [0.0, 0.0]
radii = [0.2, 0.4, 0.6]
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn solve(cfg: &Path, out: &Path) -> Output {
    fblab(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn two_plane_solve_writes_all_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", TWO_PLANE);
    let out = tmp.path().join("out");
    let o = solve(&cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["u.csv", "phi.csv", "interface.csv", "iterations.csv", "diagnostics.csv", "summary.json", "timing.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    assert!(!out.join(".fblab.lock").exists());
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["schema_version"], 1);
    assert_eq!(s["converged"], true);
    assert!(s["final_jump_defect"].as_f64().unwrap() < 1e-6);
    assert!((s["two_plane"]["plane"]["beta"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert_eq!(s["diagnostics_error"], serde_json::Value::Null);
    for key in ["gamma_est", "c0_est", "acf_monotone"] {
        assert!(s["diagnostics"].get(key).is_some(), "{key}");
    }
    let header = fs::read_to_string(out.join("u.csv")).unwrap();
    assert!(header.starts_with("x,y,value\n"));
    let it = fs::read_to_string(out.join("iterations.csv")).unwrap();
    assert!(it.starts_with("iter,jump_linf,displacement,area_plus\n"));
}

#[test]
fn solve_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", TWO_PLANE);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&solve(&cfg, &a)), 0);
    assert_eq!(code(&solve(&cfg, &b)), 0);
    for f in ["u.csv", "phi.csv", "interface.csv", "iterations.csv", "diagnostics.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn invalid_configs_exit_3() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    for (i, text) in [
        TWO_PLANE.replace("nx = 33", "nx = 4"),
        TWO_PLANE.replace("schema_version = 1", "schema_version = 2"),
        TWO_PLANE.replace("max_iters = 20", "max_iters = 20\nspeed = 3"),
        "not toml at all [[[".to_string(),
    ]
    .iter()
    .enumerate()
    {
        let cfg = write_config(tmp.path(), &format!("bad{i}.toml"), text);
        let o = solve(&cfg, &out);
        assert_eq!(code(&o), 3, "case {i}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let o = fblab(&["solve", "--config", tmp.path().join("missing.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&fblab(&["solve", "--bogus"])), 3);
}

#[test]
fn single_signed_start_exits_3() {
    let tmp = TempDir::new().unwrap();
    let text = TWO_PLANE.replace(r#"{ kind = "flat" }"#, r#"{ kind = "flat", offset = 5.0 }"#);
    let cfg = write_config(tmp.path(), "run.toml", &text);
    assert_eq!(code(&solve(&cfg, &tmp.path().join("out"))), 3);
}

#[test]
fn non_convergence_exits_2() {
    let tmp = TempDir::new().unwrap();
    let text = r#"
schema_version = 1
[grid]
nx = 65
ny = 65
box = [-1.0, -1.0, 1.0, 1.0]
[domain]
kind = "ball"
radius = 1.0
[problem]
f_minus = { kind = "constant", value = 1.0 }
q = { kind = "constant", value = 8.0 }
outer = { kind = "constant", value = 1.0 }
[init]
interface = { kind = "circle", radius = 0.3 }
[iteration]
tol_jump = 0.05
max_iters = 2
"#;
    let cfg = write_config(tmp.path(), "pb.toml", text);
    let out = tmp.path().join("out");
    let o = solve(&cfg, &out);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["converged"], false);
    assert_eq!(s["iterations"], 2);
}

#[test]
fn locked_output_dir_exits_1() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", TWO_PLANE);
    let out = tmp.path().join("out");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join(".fblab.lock"), "1").unwrap();
    let o = solve(&cfg, &out);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("locked"));
}

#[test]
fn diagnose_round_trip_and_grid_mismatch() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", TWO_PLANE);
    let run = tmp.path().join("run");
    assert_eq!(code(&solve(&cfg, &run)), 0);
    let dcfg = write_config(tmp.path(), "diag.toml", "schema_version = 1\n[diagnostics]\ncenter = [0.0, 0.0]\nradii = [0.2, 0.4]\n");
    let out = tmp.path().join("diag");
    let args = |phi: &Path, out: &Path| -> Output {
        fblab(&[
            "diagnose",
            "--u",
            run.join("u.csv").to_str().unwrap(),
            "--phi",
            phi.to_str().unwrap(),
            "--config",
            dcfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
    };
    let o = args(&run.join("phi.csv"), &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("r,E,boundary_term,phi_weiss,acf_J,delta_flat,nu_x,nu_y\n"));
    assert_eq!(csv.lines().count(), 3);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["summary"]["weiss_monotone"]["monotone"], true);

    // a field on a 65² grid against u on 33²
    let other = write_config(tmp.path(), "other.toml", &TWO_PLANE.replace("= 33", "= 65"));
    let run65 = tmp.path().join("run65");
    assert_eq!(code(&solve(&other, &run65)), 0);
    assert_eq!(code(&args(&run65.join("phi.csv"), &tmp.path().join("d2"))), 3);

    let broken = tmp.path().join("broken.csv");
    fs::write(&broken, "x,y,value\n0,0,1\n0.5,0,nope\n").unwrap();
    assert_eq!(code(&args(&broken, &tmp.path().join("d3"))), 3);
}

#[test]
fn prandtl_reference_point() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("pb");
    let o = fblab(&["prandtl", "--mu", "1", "--omega", "1", "--h", "1", "--sigma", "8", "--profiles", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let sweep = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = sweep.lines();
    assert_eq!(lines.next(), Some("h,mu,omega,sigma,z0,rho_star,cond_holds,rho1,rho2"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[6], "true");
    let rho2: f64 = row[8].parse().unwrap();
    assert!((rho2 - 0.48007).abs() < 1e-4, "{rho2}");
    for b in [1, 2] {
        let prof = fs::read_to_string(out.join(format!("profile_branch{b}.csv"))).unwrap();
        assert!(prof.starts_with("r,u\n"));
        assert_eq!(prof.lines().count(), 12);
    }
}

#[test]
fn prandtl_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let p = |extra: &[&str], dir: &str| -> i32 {
        let out = tmp.path().join(dir);
        let mut args = vec!["prandtl"];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", out.to_str().unwrap()]);
        code(&fblab(&args))
    };
    assert_eq!(p(&["--mu", "-1", "--omega", "1", "--h", "1", "--sigma", "8"], "a"), 3);
    assert_eq!(p(&["--mu", "0", "--omega", "1", "--h", "1", "--sigma", "8"], "b"), 3);
    assert_eq!(p(&["--mu", "1", "--omega", "1", "--h", "1", "--sigma", "0.5"], "c"), 2);
    assert_eq!(p(&["--mu", "1", "--omega", "1", "--h", "1", "--sigma", "8", "--sweep", "kappa=0:1:3"], "d"), 3);
    assert_eq!(p(&["--mu", "1", "--omega", "1", "--h", "1", "--sigma", "8", "--sweep", "sigma=1:10:4", "--sweep", "mu=0.5:1:3"], "e"), 0);
    let rows = fs::read_to_string(tmp.path().join("e/sweep.csv")).unwrap();
    assert_eq!(rows.lines().count(), 13);
}

#[test]
fn verify_reports_named_failure() {
    let o = fblab(&["verify", "--criteria", "1", "--break-jump-sign"]);
    assert_eq!(code(&o), 1);
    let s = stdout(&o);
    assert!(s.contains("criterion  1 FAIL"), "{s}");
    assert!(s.contains("FAILED criteria 1 (two-plane stationarity)"), "{s}");
}

#[test]
fn verify_subset_passes() {
    let o = fblab(&["verify", "--criteria", "2,5,7"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains(" PASS ")).count(), 3);
    assert_eq!(code(&fblab(&["verify", "--criteria", "13"])), 3);
}
