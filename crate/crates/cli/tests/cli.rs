use std::io::Write;
use std::process::{Command, Output, Stdio};

fn limbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_limbs")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = limbs(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn parse_check(text: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_limbs"))
        .arg("--parse-check")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn simulate_one_third() {
    let out = stdout(&["simulate", "--t", "1/3"]);
    assert!(out.starts_with("t=1/3 k=1 x=1/4 y=5/8 "), "{out}");
    let out = stdout(&["simulate", "--t", "1/3", "--realizations"]);
    assert!(out.contains("realization=0 orbit=5/8,7/8"));
    assert!(out.contains("realization=1 orbit=1/4,3/4"));
    assert!(out.contains("realization=2 orbit=1/8,3/8"));
}

#[test]
fn realize_count() {
    assert_eq!(stdout(&["realize", "--sigma", "(1243)", "--k", "3", "--count"]).trim(), "5");
}

#[test]
fn reduce_records() {
    let out = stdout(&["reduce", "--sigma", "(1243)"]);
    assert!(out.contains("(14)(23)") && out.contains("{1/5,4/5};{2/5,3/5}"), "{out}");
    assert!(stdout(&["reduce", "--sigma", "(12354)"]).contains("reducible=false"));
}

#[test]
fn third_cycle_record() {
    let out = stdout(&["third-cycle", "--t", "2/5", "--limb", "3/15,4/15"]);
    assert!(out.contains("orbit=1/40,3/40,9/40,27/40 tau=(1234)"), "{out}");
}

#[test]
fn interlace_suite() {
    let out = stdout(&["verify", "interlace", "--max-period", "8"]);
    let words: Vec<&str> = out.split_whitespace().collect();
    assert_eq!(words.len(), 4, "{out}");
    assert_eq!((words[0], words[2], words[3]), ("OK", "pairs", "checked"));
    assert!(words[1].parse::<usize>().unwrap() > 0);
}

#[test]
fn all_suites_pass() {
    let out = limbs(&["verify", "all", "--max-period", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn exit_codes() {
    assert_eq!(limbs(&["simulate", "--t", "1/6"]).status.code(), Some(1));
    assert_eq!(limbs(&["simulate", "--t", "one third"]).status.code(), Some(2));
    assert_eq!(limbs(&["simulate", "--t", "1/3", "--bogus"]).status.code(), Some(2));
    assert_eq!(limbs(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(limbs(&[]).status.code(), Some(2));
    let usage = limbs(&["simulate", "--bogus"]);
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
}

#[test]
fn outputs_pass_parse_check() {
    let runs: &[&[&str]] = &[
        &["orbits", "--k", "3", "--q", "2"],
        &["simulate", "--t", "2/5", "--realizations"],
        &["realize", "--sigma", "(1243)", "--k", "3"],
        &["partners", "--period", "5"],
        &["partners", "--t", "3/15"],
        &["portrait", "--t", "1/5", "--limb", "1/3,2/3"],
        &["reduce", "--sigma", "(1243)"],
        &["third-cycle", "--t", "2/5", "--limb", "3/15,4/15"],
        &["trace-ray", "--a", "0", "--b", "0", "--angle", "1/7", "--points"],
        &["coland", "--a", "0", "--b", "0", "--angles", "0,1/2", "--period", "1"],
        &["lemon", "center", "--t", "1/3", "--seed", "0.5,-0.25"],
        &["lemon", "boundary", "--t", "1/4"],
        &["examples", "cheb-basilica"],
        &["verify", "invol", "--max-period", "5"],
        &["verify", "lren", "--a", "3", "--b", "0", "--t", "1/3", "--n", "100"],
    ];
    let mut all = String::new();
    for args in runs {
        all.push_str(&stdout(args));
    }
    let out = parse_check(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = all.lines().count();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), format!("parse_check=ok lines={lines}"));
    assert_eq!(parse_check("x=1/0\n").status.code(), Some(1));
}

#[test]
fn complex_values_round_trip() {
    let out = stdout(&["examples", "cheb-basilica"]);
    let a = out.split_whitespace().find_map(|w| w.strip_prefix("a=")).unwrap();
    let (re, im) = a.split_once(',').unwrap();
    let (re, im): (f64, f64) = (re.parse().unwrap(), im.parse().unwrap());
    assert!((re - 0.5717794991099595).abs() < 1e-12 && (im - 0.12022438929346639).abs() < 1e-12);
    let b = out.split_whitespace().find_map(|w| w.strip_prefix("b=")).unwrap();
    let again = stdout(&["verify", "lren", "--a", a, "--b", b, "--t", "1/3"]);
    assert!(again.contains("verdict=in-locus"), "{again}");
}

#[test]
fn render_writes_identical_files() {
    let dir = std::env::temp_dir().join(format!("limbs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (one, four) = (dir.join("one.ppm"), dir.join("four.ppm"));
    for (path, threads) in [(&one, "1"), (&four, "4")] {
        let p = path.to_str().unwrap();
        stdout(&["render", "param", "--half-width", "1.2", "--res", "64x48", "--out", p, "--threads", threads]);
    }
    let (a, b) = (std::fs::read(&one).unwrap(), std::fs::read(&four).unwrap());
    assert!(a.starts_with(b"P6\n64 48\n255\n"));
    assert_eq!(a.len(), 13 + 3 * 64 * 48);
    assert_eq!(a, b);
    std::fs::remove_dir_all(&dir).unwrap();
}
