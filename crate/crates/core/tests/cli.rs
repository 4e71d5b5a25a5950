use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cubsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubsurf")).args(args).output().expect("binary runs")
}

fn json_at(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn strip_seconds(v: &mut Value) {
    match v {
        Value::Object(o) => {
            o.remove("seconds");
            o.values_mut().for_each(strip_seconds);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_seconds),
        _ => {}
    }
}

fn no_numbers(v: &Value) -> bool {
    match v {
        Value::Number(_) => false,
        Value::Object(o) => o.values().all(no_numbers),
        Value::Array(a) => a.iter().all(no_numbers),
        _ => true,
    }
}

#[test]
fn example_suite_report() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = cubsurf(&["verify", "--suite", "example2.2", "--json", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        assert!(String::from_utf8_lossy(&out.stdout).contains("PASS example2.2/symplectic filter order: 720"));
    }
    let (mut ra, mut rb) = (json_at(&a), json_at(&b));
    assert!(no_numbers(&ra));
    assert_eq!(ra["suite"], "example2.2");
    assert_eq!(ra["pass"], true);
    assert!(ra["version"].is_string());
    let checks = ra["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["seconds"].is_string() && c["value"].is_string()));
    strip_seconds(&mut ra);
    strip_seconds(&mut rb);
    assert_eq!(ra, rb);
}

#[test]
fn census_cache_and_mutation() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("census.bin");
    let cache_s = cache.to_str().unwrap();
    let report = dir.path().join("census.json");
    let out = cubsurf(&["classify-cubics", "--cache", cache_s, "--json", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_at(&report);
    assert_eq!(r["total_forms"], "1048575");
    assert_eq!(r["max_smooth_aut"], "720");
    assert_eq!(r["max_smooth_aut_reps"][0], "02a08");

    let bytes = fs::read(&cache).unwrap();
    assert_eq!(&bytes[..4], b"CBC1");
    let records = 4 + 80 + 4 * ((1 << 20) - 1);
    assert_eq!((bytes.len() - records) % 14, 0);

    let out = cubsurf(&["verify", "--suite", "thm2.1", "--cache", cache_s]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let mut mutated = bytes.clone();
    mutated[records + 9] ^= 1;
    fs::write(&cache, &mutated).unwrap();
    let out = cubsurf(&["verify", "--suite", "thm2.1", "--cache", cache_s]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL thm2.1/orbit-stabilizer identity on every orbit"));

    let mut bad = bytes;
    bad[3] = b'9';
    fs::write(&cache, &bad).unwrap();
    let out = cubsurf(&["classify-cubics", "--cache", cache_s]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("magic"));
}

#[test]
fn smooth_and_aut() {
    let out = cubsurf(&["smooth", "--form", "02a08", "--json", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let v: Value = serde_json::from_str(&text[text.find('{').unwrap()..]).unwrap();
    assert_eq!(v["smooth"], true);
    assert_eq!(v["certificate"], "groebner");

    // x^3: singular along x = 0
    let out = cubsurf(&["smooth", "--form", "80000", "--method", "search", "--kmax", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("smooth = false"));

    let out = cubsurf(&["aut", "--form", "02a08"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("order 720"));
}

#[test]
fn jordan_plane_cases() {
    let out = cubsurf(&["jordan", "--q", "8", "--json", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("J(Cr2(F8)) = 16482816"));
    assert!(text.contains("\"constant\": \"16482816\""));
    assert!(text.contains("\"cited\""));
    let out = cubsurf(&["jordan", "--q", "4"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("J(Cr2(F4)) = 60480"));
}

#[test]
fn usage_errors() {
    for args in [
        &["verify", "--suite", "thm9.9"][..],
        &["jordan", "--q", "3"],
        &["smooth", "--form", "zzzzz"],
        &["smooth", "--form", "100000"],
        &["aut", "--form", "0"],
        &["smooth", "--form", "02a08", "--kmax", "9"],
    ] {
        assert_eq!(cubsurf(args).status.code(), Some(2), "{args:?}");
    }
}
