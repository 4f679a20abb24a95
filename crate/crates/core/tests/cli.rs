use std::fs;
use std::process::{Command, Output};

fn timnoma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_timnoma"))
        .args(args)
        .env("TIMNOMA_THREADS", "2")
        .output()
        .expect("binary runs")
}

#[test]
fn ber_writes_csv() {
    let out = timnoma(&["ber", "--snr", "20,40", "--frames", "4", "--seed", "7"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("snr_db,entity,metric,value,samples,stderr")
    );
    let rows: Vec<&str> = lines.collect();
    // five users plus the total at each of two SNR points
    assert_eq!(rows.len(), 12);
    assert!(rows[0].starts_with("20,1,ber,"), "{}", rows[0]);
    assert!(rows[5].starts_with("20,total,ber,"), "{}", rows[5]);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rate.csv");
    let args = ["rate", "--snr", "0:10:30", "--frames", "200"];
    let stdout = timnoma(&args).stdout;
    let path_str = path.to_str().unwrap();
    let out = timnoma(&[&args[..], &["--out", path_str]].concat());
    assert!(out.status.success());
    assert_eq!(fs::read(&path).unwrap(), stdout);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cell.toml");
    fs::write(
        &path,
        "seed = 3\n[topology]\ndistances = [1.0, 2.0]\ngroups = 1\n[simulation]\nsnr_grid = \"10\"\nframes = 2\nbits_per_frame = 64\n",
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let out = timnoma(&["single-user", "--config", cfg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("10,2,ber_single_user,"));

    let out = timnoma(&[
        "single-user",
        "--metric",
        "rate",
        "--config",
        cfg,
        "--frames",
        "50",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("10,1,rate_single_user,"), "{text}");
}

#[test]
fn repeated_runs_are_identical() {
    let args = [
        "ratio", "--snr", "0:20:60", "--frames", "300", "--seed", "99",
    ];
    let a = timnoma(&args).stdout;
    let b = Command::new(env!("CARGO_BIN_EXE_timnoma"))
        .args(args)
        .env("TIMNOMA_THREADS", "1")
        .output()
        .unwrap()
        .stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn invalid_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[simulation]\nframes = 0\nbits_per_frame = 3\n").unwrap();
    let out = timnoma(&["ber", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("frames") && err.contains("bits_per_frame"),
        "{err}"
    );

    let out = timnoma(&["ber", "--snr", "1:0:5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = timnoma(&[
        "rate",
        "--snr",
        "0",
        "--frames",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
