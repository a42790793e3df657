use std::path::PathBuf;
use std::process::{Command, Output};

fn cqfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqfi"))
        .args(args)
        .env_remove("CQFI_WORKERS")
        .output()
        .expect("spawn cqfi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Header row and data rows of a CSV with `#` comment lines.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.is_empty());
    let split = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
    let header = split(lines.next().expect("header"));
    (header, lines.map(split).collect())
}

#[test]
fn verify_h1_passes() {
    let o = cqfi(&["verify", "h1", "--B", "0.2,1,5", "--t", "0.5,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 6);
    assert_eq!(&header[..3], ["B", "param", "t"]);
    assert!(rows.iter().all(|r| r.len() == header.len()));
}

#[test]
fn random_negative_control_is_flagged() {
    let o = cqfi(&["verify", "random", "--dim", "4", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cqfi(&["verify", "h9"]).status.code(), Some(2));
    assert_eq!(cqfi(&["verify", "h1", "--B", "abc"]).status.code(), Some(2));
    assert_eq!(cqfi(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn config_merges_under_flags() {
    let path = scratch("merge.json");
    std::fs::write(&path, r#"{"B": "0.7", "t": "2"}"#).unwrap();
    let o = cqfi(&["verify", "h1", "--config", path.to_str().unwrap(), "--t", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = table(&stdout(&o));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col("B")].parse::<f64>().unwrap(), 0.7);
    assert_eq!(rows[0][col("t")].parse::<f64>().unwrap(), 3.0);
}

#[test]
fn config_rejects_unknown_keys() {
    let path = scratch("bogus.json");
    std::fs::write(&path, r#"{"B": "0.7", "bogus": 1}"#).unwrap();
    let o = cqfi(&["verify", "h1", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn provenance_header_and_out_file() {
    let path = scratch("out.csv");
    let o = cqfi(&["verify", "h2", "--t", "1", "--seed", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let comments: Vec<_> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(comments.iter().any(|l| l.starts_with("# cqfi: ")));
    assert!(comments.iter().any(|l| l.starts_with("# seed: 5")));
    assert!(comments.iter().any(|l| l.starts_with("# tolerances: ")));
    assert!(!comments.iter().any(|l| l.contains("--out")));
}

#[test]
fn charop_optomech_window_passes() {
    let o = cqfi(&["charop", "optomech", "--t", "2,10", "--ncut", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn qfi_and_thermal_pass_on_defaults() {
    for cmd in [["qfi", "h1"], ["qfi", "h3"], ["thermal", "h1"], ["thermal", "h2"], ["altqfi", "h1"]] {
        let o = cqfi(&cmd);
        assert_eq!(o.status.code(), Some(0), "{cmd:?}: {}", stdout(&o));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["sweep", "h1", "--B", "0.5,1", "--t", "0,2,4", "--seed", "11"];
    assert_eq!(cqfi(&args).stdout, cqfi(&args).stdout);
}
