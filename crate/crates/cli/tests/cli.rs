use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fwcap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fwcap"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run fwcap")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.cfg", "n = 100\ngamma = 2.5\nepsilon = 2.6\nseed = 7\n");
    let a = fwcap(&["generate", "--config", &cfg, "--out", "a"], dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = fwcap(&["generate", "--config", &cfg, "--out", "b", "--workers", "2"], dir.path());
    assert!(b.status.success());
    let ta = fs::read(dir.path().join("a/network.txt")).unwrap();
    let tb = fs::read(dir.path().join("b/network.txt")).unwrap();
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let node_ids: Vec<usize> = text
        .lines()
        .skip(1)
        .take(100)
        .map(|l| {
            let fields: Vec<&str> = l.split_whitespace().collect();
            assert_eq!(fields.len(), 4, "{l}");
            fields[0].parse().unwrap()
        })
        .collect();
    assert_eq!(node_ids, (0..100).collect::<Vec<_>>());
    assert!(text.starts_with("100 "));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["n"], "100");
}

#[test]
fn rejects_invalid_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.cfg", "n = 100\ngamma = 1.0\n");
    let out = fwcap(&["generate", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma > 1"));
}

#[test]
fn rejects_unknown_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.cfg", "n = 100\nfoo = 1\n");
    let out = fwcap(&["generate", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_writes_parsable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.cfg",
        "n = 256, 512, 1024\nbeta = 0, 2.5\ntrials = 2000\nreplicates = 2\nseed = 3\n",
    );
    let out = fwcap(&["sweep", "--config", &cfg, "--out", "s"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 10);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert_eq!(row.len(), header.len());
        let hops: f64 = row[5].parse().unwrap();
        assert!(hops >= 1.0);
    }
    let fits = fs::read_to_string(dir.path().join("s/fits.csv")).unwrap();
    assert_eq!(fits.lines().count(), 3);
    assert!(dir.path().join("s/manifest.json").exists());
}

#[test]
fn sweep_replicates_override_changes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", "n = 128, 256, 512\ntrials = 500\n");
    let out = fwcap(&["sweep", "--config", &cfg, "--out", "s", "--replicates", "1", "--seed", "9"], dir.path());
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["replicates"], "1");
    assert_eq!(manifest["seed"], 9);
}

#[test]
fn boxcover_needs_three_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let edges: String = (0..20).map(|i| format!("{i} {}\n", i + 1)).collect();
    let input = write(dir.path(), "path.txt", &edges);
    let out = fwcap(&["boxcover", "--input", &input, "--lb", "1,2"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = fwcap(&["boxcover", "--input", &input, "--lb", "1,2,3", "--out", "b"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("b/boxcover.csv")).unwrap();
    assert!(csv.starts_with("l_B,N_B,"));
}

#[test]
fn boxcover_complete_graph_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let mut edges = String::new();
    for u in 0..8 {
        for v in u + 1..8 {
            edges.push_str(&format!("{u} {v}\n"));
        }
    }
    let input = write(dir.path(), "k8.txt", &edges);
    let out = fwcap(&["boxcover", "--input", &input, "--lb", "1,2,3", "--out", "k"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("degenerate=true"));
}

#[test]
fn exact_reads_network_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.cfg", "n = 60\nseed = 5\nbeta = 0, 2.5\n");
    assert!(fwcap(&["generate", "--config", &cfg, "--out", "g"], dir.path()).status.success());
    let out = fwcap(&["exact", "--config", &cfg, "--input", "g/network.txt"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 2);
}

#[test]
fn verify_reports_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let out = fwcap(&["verify", "--quick", "--reuse", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("[FAIL]")));
}

#[test]
fn verify_quick_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = fwcap(&["verify", "--quick"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
