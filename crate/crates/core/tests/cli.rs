use std::path::Path;
use std::process::{Command, Output};

fn facecert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_facecert")).args(args).output().expect("spawn facecert")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn certify_reads_cut_file() {
    let dir = tempfile::tempdir().unwrap();
    let cuts = write(dir.path(), "cuts.txt", "+1 +1 +1 +1\n+1 -1 +1 -1\n+1 +1 -1 -1\n");
    let o = facecert(&["certify", "--cuts", &cuts]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("r,n,w_full_rank,z_full_rank,y_full_rank,general_position,verdict,face_dimension\n"));
    assert!(s.contains("CERTIFIED_SIMPLICIAL,2"), "{s}");
}

#[test]
fn certify_duplicate_vectors_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cuts = write(dir.path(), "cuts.txt", "1 -1 1\n1 -1 1\n");
    let s = stdout(&facecert(&["certify", "--cuts", &cuts]));
    assert!(s.contains("INCONCLUSIVE"), "{s}");
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "1 0 1\n1 1 1\n");
    let ragged = write(dir.path(), "ragged.txt", "1 1 1\n1 1\n");
    for args in [
        vec!["certify", "--cuts", bad.as_str()],
        vec!["certify", "--cuts", ragged.as_str()],
        vec!["certify", "--cuts", "/nonexistent/cuts.txt"],
        vec!["estimate", "--p", "1.5"],
        vec!["estimate", "--r", "0"],
        vec!["oracle", "--r", "40"],
        vec!["nonsense"],
    ] {
        let o = facecert(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn oracle_balanced_three() {
    let o = facecert(&["oracle", "--p", "0.5", "--r", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &v[0];
    assert!((row["lambda_min_sigma"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(row["restriction_exact"], true);
    assert_eq!(row["z_moment_identity"], true);
}

#[test]
fn fig_elliptope_vertices_first() {
    let s = stdout(&facecert(&["fig-elliptope", "--grid", "5"]));
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "kind,x21,x31,x32");
    assert_eq!(
        &lines[1..5],
        &[
            "vertex,1.0,1.0,1.0",
            "vertex,1.0,-1.0,-1.0",
            "vertex,-1.0,1.0,-1.0",
            "vertex,-1.0,-1.0,1.0"
        ]
    );
    assert_eq!(lines.len(), 1 + 4 + 2 * 25);
}

#[test]
fn maxcut_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write(dir.path(), "k3.txt", "# triangle\n3 3\n1 2\n1 3\n2 3\n");
    let o = facecert(&["maxcut", "--edges", &edges, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["maxcut"], 2);
    assert_eq!(v[0]["rounded_best"], 2);
    assert!(v[0]["bm_value"].as_f64().unwrap() >= 2.25 - 1e-3);
    assert_eq!(v[0]["sandwich_holds"], true);
}

#[test]
fn csv_cells_round_trip_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("b.csv");
    let json_path = dir.path().join("b.json");
    let grid = ["bounds", "--p", "0.1,0.5,0.7", "--r", "2,5", "--n", "10,1000"];
    for (path, fmt) in [(&csv_path, "csv"), (&json_path, "json")] {
        let mut args = grid.to_vec();
        let p = path.to_string_lossy().into_owned();
        args.extend(["--format", fmt, "--out", p.as_str()]);
        assert_eq!(facecert(&args).status.code(), Some(0));
    }
    let json: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_slice(&std::fs::read(&json_path).unwrap()).unwrap();
    let mut rd = csv::Reader::from_path(&csv_path).unwrap();
    let headers = rd.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), json.len());
    assert_eq!(rows.len(), 12);
    for (rec, obj) in rows.iter().zip(&json) {
        assert_eq!(headers.len(), obj.len());
        for (h, cell) in headers.iter().zip(rec.iter()) {
            let j = &obj[h];
            match j {
                serde_json::Value::Number(num) => {
                    let from_csv: f64 = cell.parse().unwrap();
                    assert_eq!(from_csv.to_bits(), num.as_f64().unwrap().to_bits(), "{h}");
                    let printed: f64 = format!("{:.16e}", from_csv).parse().unwrap();
                    assert_eq!(printed, from_csv);
                }
                serde_json::Value::Null => assert_eq!(cell, "", "{h}"),
                serde_json::Value::Bool(b) => assert_eq!(cell, b.to_string(), "{h}"),
                other => panic!("unexpected {other}"),
            }
        }
    }
}
