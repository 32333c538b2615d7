use std::path::Path;
use std::process::Command;

const CONFIG: &str = r#"
delta = 0.2
tau_end = 1.0

[gas]
gamma = 1.4
r = 1.0

[right]
v = 1.0
u = 0.0
theta = 1.0

[delta_sweep]
values = [0.2, 0.1, 0.05]
"#;

fn vshock(args: &[&str], config: &Path, out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_vshock"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn sweep_delta_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    let o = vshock(&["sweep-delta", "--jobs", "2"], &cfg, &out);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 3);
    let names = files(&out);
    assert_eq!(names.len(), 2);
    assert!(
        names.iter().any(|n| n.ends_with("-summary.csv"))
            && names.iter().any(|n| n.ends_with("-verdict.json"))
    );
}

#[test]
fn failing_band_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        format!("{CONFIG}\n[bands]\nresidual_slope = [3.0, 3.5]\n"),
    )
    .unwrap();
    let o = vshock(&["sweep-delta", "--quiet"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn profile_and_simulate_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        vshock(&["profile", "--quiet"], &cfg, &out).status.code(),
        Some(0)
    );
    assert_eq!(
        vshock(&["simulate", "--quiet"], &cfg, &out).status.code(),
        Some(0)
    );
    let names = files(&out);
    let profile = names
        .iter()
        .find(|n| n.starts_with("profile-") && !n.contains("summary") && n.ends_with(".csv"))
        .unwrap();
    let text = std::fs::read_to_string(out.join(profile)).unwrap();
    assert!(text.lines().any(|l| l == "xi,V,U,Theta"));
    let snap = names.iter().find(|n| n.ends_with("-snapshot.csv")).unwrap();
    let text = std::fs::read_to_string(out.join(snap)).unwrap();
    assert!(text.starts_with("# tau=1.0\n"));
}

#[test]
fn bad_configs_give_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, CONFIG.replace("gamma = 1.4", "gamma = 0.9")).unwrap();
    let o = vshock(&["verify"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gas.gamma"));

    std::fs::write(&cfg, format!("{CONFIG}\nsurprise = true\n")).unwrap();
    assert_eq!(
        vshock(&["verify"], &cfg, &dir.path().join("out"))
            .status
            .code(),
        Some(2)
    );

    let o = Command::new(env!("CARGO_BIN_EXE_vshock"))
        .arg("verify")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
