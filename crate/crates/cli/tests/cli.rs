use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn toruseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toruseq"))
        .args(args)
        .env_remove("TORUSEQ_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}, stderr: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn enumerate_circle_of_25() {
    let out = stdout(&toruseq(&["enumerate", "--d", "2", "--lambda", "25", "--check"]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x1,x2"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0], "-5,0");
    assert!(rows.contains(&"3,-4"));
}

#[test]
fn repcount_prints_both_routes() {
    let out = stdout(&toruseq(&["repcount", "--d", "4", "--n", "1", "--t", "0", "--check"]));
    assert_eq!(
        out,
        "d,n,t,route,count\n4,1,0,pall_taussky,48\n4,1,0,bruteforce,48\n"
    );
    // negative inner products must parse as values, not flags
    let out = stdout(&toruseq(&["repcount", "--d", "3", "--n", "9", "--t", "-9", "--check"]));
    assert!(out.ends_with("3,9,-9,profile,30\n3,9,-9,bruteforce,30\n"), "{out}");
}

#[test]
fn render_stripe_family() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("stripes.ppm");
    let out = stdout(&toruseq(&[
        "render",
        "--family",
        "thm31",
        "--m",
        "10",
        "--grid",
        "512",
        "--out",
        img.to_str().unwrap(),
        "--check",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!((v["max_intensity"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(v["argmax"][0], 0.0);
    assert_eq!(v["argmax"][1], 0.0);
    let bytes = fs::read(&img).unwrap();
    let header = b"P6\n512 512\n255\n";
    assert!(bytes.starts_with(header));
    assert_eq!(bytes.len(), header.len() + 3 * 512 * 512);
    // the origin pixel carries the top color of the scale
    assert_eq!(&bytes[header.len()..header.len() + 3], &[253, 231, 37]);
    let svg = fs::read_to_string(dir.path().join("stripes.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("linearGradient"));
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let plain = stdout(&toruseq(&["enumerate", "--d", "3", "--lambda", "209"]));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_toruseq"))
            .args(["enumerate", "--d", "3", "--lambda", "209", "--check"])
            .env("TORUSEQ_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = stdout(&run());
    let cached = dir.path().join("sphere-d3-209.bin");
    assert!(cached.exists());
    let second = stdout(&run());
    assert_eq!(first, plain);
    assert_eq!(second, plain);
}

fn drop_last_point(path: &Path, d: usize) {
    let mut bytes = fs::read(path).unwrap();
    let count = u64::from_le_bytes(bytes[20..28].try_into().unwrap());
    bytes[20..28].copy_from_slice(&(count - 1).to_le_bytes());
    bytes.truncate(bytes.len() - 8 * d);
    fs::write(path, bytes).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(toruseq(&["enumerate", "--d", "2"]).status.code(), Some(1));
    assert_eq!(toruseq(&["enumerate", "--d", "9", "--lambda", "5"]).status.code(), Some(1));
    assert_eq!(
        toruseq(&["mass", "--family", "thm31", "--radius", "0.1"]).status.code(),
        Some(1)
    );
    let bad = toruseq(&["enumerate", "--d", "2", "--lambda", "5", "--out", "/nonexistent/x.csv"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("cannot write"));

    // a cache entry missing a point passes decoding but fails the oracle
    let dir = tempfile::tempdir().unwrap();
    let with_cache = |check: bool| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_toruseq"));
        c.args(["enumerate", "--d", "2", "--lambda", "25"]);
        if check {
            c.arg("--check");
        }
        c.env("TORUSEQ_CACHE_DIR", dir.path()).output().unwrap()
    };
    stdout(&with_cache(false));
    drop_last_point(&dir.path().join("sphere-d2-25.bin"), 2);
    assert_eq!(with_cache(false).status.code(), Some(0));
    let failed = with_cache(true);
    assert_eq!(failed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("check failed"));
}

#[test]
fn mass_pairs_and_input_files() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.json");
    stdout(&toruseq(&[
        "pairs", "--d", "2", "--lambda", "25", "--y", "2", "--out",
        pairs.to_str().unwrap(), "--check",
    ]));
    let list: serde_json::Value = serde_json::from_str(&fs::read_to_string(&pairs).unwrap()).unwrap();
    assert_eq!(list["schema_version"], 1);
    assert_eq!(list["n_lambda"], 12);
    let out = stdout(&toruseq(&[
        "mass", "--input", pairs.to_str().unwrap(), "--pair-index", "0",
        "--radius", "0.5", "--center", "0.3,-1.1", "--check",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let (m, q) = (v["mass"].as_f64().unwrap(), v["quadrature"].as_f64().unwrap());
    assert!((m - q).abs() < 1e-3);
    assert_eq!(v["source"]["family"], "pair:0");
}

#[test]
fn scans_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3", "1"] {
        let csv = dir.path().join(format!("scan-{}.csv", outputs.len()));
        let json = dir.path().join(format!("scan-{}.json", outputs.len()));
        stdout(&toruseq(&[
            "scan", "--mode", "density", "--d", "2", "--lambda-max", "300",
            "--theta2", "0.3", "--delta", "0.1", "--seed", "11", "--threads", threads,
            "--csv", csv.to_str().unwrap(), "--json", json.to_str().unwrap(), "--check",
        ]));
        outputs.push((fs::read(csv).unwrap(), fs::read(json).unwrap()));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let csv = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert!(csv.starts_with("lambda,index,discrepancy,threshold,exceptional,grid_sup\n"));
    let other = stdout(&toruseq(&[
        "scan", "--mode", "density", "--d", "2", "--lambda-max", "300",
        "--theta2", "0.3", "--delta", "0.1", "--seed", "12",
    ]));
    assert_ne!(other.as_bytes(), &outputs[0].0[..]);
}

#[test]
fn blowup_table_checks_out() {
    let out = stdout(&toruseq(&["blowup", "--lambdas", "1001,1201", "--check"]));
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "lambda,a,r,t_radius,s_value,n_lambda,lower_bound,exact_mass");
    assert_eq!(rows.len(), 1 + 2 * 3);
    let out = stdout(&toruseq(&[
        "blowup", "--lambda-min", "101", "--lambda-max", "2001", "--count", "4",
        "--ratio-exponent", "0.16666666666666666", "--check",
    ]));
    assert_eq!(out.lines().count(), 5);
    assert!(out.lines().nth(4).unwrap().starts_with("2001,"));
}
