use std::path::Path;
use std::process::{Command, Output};

use fns_cli::schema::{ProfileFile, SurfaceFile};
use fns_core::surface::{build_family, LengthLaw, SurfaceFamily};

fn fns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fns")).args(args).output().expect("binary runs")
}

fn fns_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fns"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_column(out: &Output, col: usize) -> Vec<f64> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains('\r'));
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn build_flute_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("flute.json");
    let o = fns(&["build", "--family", "flute", "--law", "exp-linear", "--depth", "10", "--output", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let f = SurfaceFile::from_json(&text).unwrap();
    assert_eq!(f.pants.len(), 10);
    assert_eq!(f.version, "fns-1");
    assert_eq!(f.to_json(), text);
    let (g, x) = f.to_surface().unwrap();
    assert_eq!((g, x), build_family(&SurfaceFamily::flute(LengthLaw::exp_linear()), 10).unwrap());
}

#[test]
fn fast_flute_lengths_survive_serialization() {
    let o = fns(&["build", "--law", "exp-double", "--depth", "40"]);
    assert!(o.status.success());
    let f = SurfaceFile::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    let (_, x) = f.to_surface().unwrap();
    let (_, want) = build_family(&SurfaceFamily::flute(LengthLaw::ExpDouble), 40).unwrap();
    assert_eq!(x, want);
    let deepest = x.length(38);
    assert!(!deepest.is_zero() && deepest.exponent() < -700_000_000_000);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["curves"][0]["length"]["mantissa"].is_u64());
    assert!(v["curves"][0]["length"]["exp2"].is_i64());
}

#[test]
fn usage_errors_exit_two() {
    let o = fns(&["build", "--family", "flute", "--law", "exp-linear"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(fns(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(fns(&["scan", "--quantity", "dls-upper", "--n", "5:1"]).status.code(), Some(2));
    assert_eq!(fns(&["build", "--depth", "0"]).status.code(), Some(2));
}

#[test]
fn verify_special_functions_passes() {
    let o = fns(&["verify", "--suite", "special-functions"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["format_version"], "fns-1");
    assert_eq!(v["passed"], true);
    assert!(v.get("wall_time_ms").is_none());
}

#[test]
fn calibrated_profile_drives_bounds_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let prof = dir.path().join("profile.json");
    let o = fns(&["calibrate", "--output", path_str(&prof)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cp = ProfileFile::load(&prof).unwrap();
    assert!(cp.calibration.is_some());

    let rep = dir.path().join("report.json");
    let o = fns(&["verify", "--suite", "bounds-ordering", "--profile", path_str(&prof), "--report", path_str(&rep)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["profile_hash"], cp.hash());

    let text = std::fs::read_to_string(&prof).unwrap();
    let mut file: serde_json::Value = serde_json::from_str(&text).unwrap();
    file["profile"]["d_defect"] = serde_json::json!(0.5);
    std::fs::write(&prof, serde_json::to_string(&file).unwrap()).unwrap();
    let o = fns(&["verify", "--suite", "bounds-ordering", "--profile", path_str(&prof)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hash mismatch"));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--suite", "membership"];
    let a = fns_env(&args, "1");
    let b = fns_env(&args, "4");
    let c = fns_env(&args, "4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    let t = fns(&["verify", "--suite", "membership", "--timing"]);
    let v: serde_json::Value = serde_json::from_slice(&t.stdout).unwrap();
    assert!(v["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn scan_dqc_lower_increases_in_t() {
    let o = fns(&["scan", "--quantity", "dqc-lower", "--n", "10", "--t", "1:20"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(text.starts_with("n,t,dqc_lower\n"));
    let col = csv_column(&o, 2);
    assert_eq!(col.len(), 20);
    assert!(col.windows(2).all(|w| w[1] > w[0]));
    // 12 significant digits
    let first = text.lines().nth(1).unwrap().split(',').nth(2).unwrap();
    assert_eq!(first.trim_start_matches("0.").trim_start_matches('0').len(), 12);
}

#[test]
fn scan_dls_upper_decreases_along_prop_inv() {
    let o = fns(&["scan", "--quantity", "dls-upper", "--n", "5:100"]);
    assert!(o.status.success());
    let col = csv_column(&o, 2);
    assert_eq!(col.len(), 96);
    assert!(col.windows(2).all(|w| w[1] < w[0]));
    let t = csv_column(&o, 1);
    assert!((t[5] - 10f64.ln()).abs() < 1e-10);
}

#[test]
fn scan_membership_ratio_grows() {
    let o = fns(&["scan", "--quantity", "membership-ratio", "--tau-law", "exp", "--n", "1:200"]);
    assert!(o.status.success());
    let ln = csv_column(&o, 1);
    assert!(ln.windows(2).all(|w| w[1] > w[0]));
    assert!(*ln.last().unwrap() > 190.0);
}

#[test]
fn scan_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("est.csv");
    let args = ["scan", "--quantity", "dls-estimate", "--n", "3:6", "--t", "1,10", "--output", path_str(&p)];
    assert!(fns_env(&args, "1").status.success());
    let one = std::fs::read(&p).unwrap();
    assert!(fns_env(&args, "3").status.success());
    assert_eq!(one, std::fs::read(&p).unwrap());
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 9);
}
