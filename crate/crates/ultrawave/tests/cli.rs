//! End-to-end runs of the `ultrawave` binary: file formats, exit codes,
//! and byte-level determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ultrawave"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ultrawave-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

const TREE_2_3: &str = r#"{"homogeneous":{"p":2,"depth":3}}"#;

#[test]
fn tree_summary_and_measures_table() {
    let dir = scratch("tree");
    let out_csv = dir.join("summary.csv");
    let out = run(&[
        "tree",
        "--tree",
        TREE_2_3,
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_success(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("8 leaves, 7 internal, top_measure 1"));

    let table = fs::read_to_string(&out_csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "vertex_address,depth,branching,is_leaf,measure"
    );
    assert_eq!(lines.next().unwrap(), ",0,2,false,1");
    assert!(table.lines().any(|l| l == "000,3,0,true,1/8"));
}

#[test]
fn tree_rejects_malformed_spec() {
    let out = run(&["tree", "--tree", r#"{"homogeneous":{"p":1,"depth":3}}"#]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("error:"), "stderr: {stderr}");
}

#[test]
fn transform_round_trip_through_files() {
    let dir = scratch("transform");
    let grid = dir.join("f.csv");
    let coeffs = dir.join("c.csv");
    let back = dir.join("back.csv");

    let mut body = String::from("leaf_address,re,im\n");
    for (i, addr) in ["000", "001", "010", "011", "100", "101", "110", "111"]
        .iter()
        .enumerate()
    {
        body.push_str(&format!("{addr},{},{}\n", 0.25 * i as f64, -(i as f64)));
    }
    fs::write(&grid, &body).unwrap();

    assert_success(&run(&[
        "transform",
        "--tree",
        TREE_2_3,
        "--mode",
        "fwd",
        "--in",
        grid.to_str().unwrap(),
        "--out",
        coeffs.to_str().unwrap(),
    ]));
    let coeff_text = fs::read_to_string(&coeffs).unwrap();
    assert!(coeff_text.starts_with("vertex_address,j,re,im\nMEAN,0,"));

    assert_success(&run(&[
        "transform",
        "--tree",
        TREE_2_3,
        "--mode",
        "inv",
        "--in",
        coeffs.to_str().unwrap(),
        "--out",
        back.to_str().unwrap(),
    ]));

    // Round trip reproduces every value to 1e-12.
    let original = fs::read_to_string(&grid).unwrap();
    let restored = fs::read_to_string(&back).unwrap();
    for (a, b) in original.lines().skip(1).zip(restored.lines().skip(1)) {
        let pa: Vec<&str> = a.split(',').collect();
        let pb: Vec<&str> = b.split(',').collect();
        assert_eq!(pa[0], pb[0]);
        for k in 1..3 {
            let va: f64 = pa[k].parse().unwrap();
            let vb: f64 = pb[k].parse().unwrap();
            assert!((va - vb).abs() < 1e-12);
        }
    }
}

#[test]
fn transform_rejects_dimension_mismatch() {
    let dir = scratch("mismatch");
    let grid = dir.join("short.csv");
    fs::write(&grid, "leaf_address,re,im\n000,1,0\n").unwrap();
    let out = run(&[
        "transform",
        "--tree",
        TREE_2_3,
        "--mode",
        "fwd",
        "--in",
        grid.to_str().unwrap(),
        "--out",
        dir.join("c.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn constant_input_transforms_to_mean_only() {
    let dir = scratch("constant");
    let grid = dir.join("const.csv");
    let coeffs = dir.join("coeffs.csv");
    let mut body = String::from("leaf_address,re,im\n");
    for addr in ["00", "01", "02", "10", "11", "12"] {
        body.push_str(&format!("{addr},2.5,0\n"));
    }
    fs::write(&grid, &body).unwrap();
    assert_success(&run(&[
        "transform",
        "--tree",
        r#"{"per_level":[2,3]}"#,
        "--mode",
        "fwd",
        "--in",
        grid.to_str().unwrap(),
        "--out",
        coeffs.to_str().unwrap(),
    ]));
    for line in fs::read_to_string(&coeffs).unwrap().lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let re: f64 = fields[2].parse().unwrap();
        let im: f64 = fields[3].parse().unwrap();
        if fields[0] == "MEAN" {
            assert!((re - 2.5).abs() < 1e-12 && im.abs() < 1e-12);
        } else {
            assert!(re.abs() < 1e-12 && im.abs() < 1e-12, "row {line}");
        }
    }
}

#[test]
fn delta_input_yields_path_coefficients() {
    // A unit delta at one leaf meets exactly the wavelets whose ball contains
    // that leaf: one per internal vertex on the root-to-leaf path, plus the
    // mean row. Expected counts (depth + 1) computed by direct inner
    // products against the synthesized basis.
    let dir = scratch("delta");
    for (depth, leaves, expected_nonzero) in [(2u32, 4usize, 3usize), (3, 8, 4)] {
        let grid = dir.join(format!("delta{depth}.csv"));
        let coeffs = dir.join(format!("delta{depth}-c.csv"));
        let mut body = String::from("leaf_address,re,im\n");
        for i in 0..leaves {
            let addr: String = (0..depth)
                .map(|b| {
                    let bit = (i >> (depth - 1 - b)) & 1;
                    char::from(b'0' + bit as u8)
                })
                .collect();
            body.push_str(&format!("{addr},{},0\n", if i == 0 { 1 } else { 0 }));
        }
        fs::write(&grid, &body).unwrap();
        assert_success(&run(&[
            "transform",
            "--tree",
            &format!(r#"{{"homogeneous":{{"p":2,"depth":{depth}}}}}"#),
            "--mode",
            "fwd",
            "--in",
            grid.to_str().unwrap(),
            "--out",
            coeffs.to_str().unwrap(),
        ]));
        let nonzero = fs::read_to_string(&coeffs)
            .unwrap()
            .lines()
            .skip(1)
            .filter(|line| {
                let fields: Vec<&str> = line.split(',').collect();
                let re: f64 = fields[2].parse().unwrap();
                let im: f64 = fields[3].parse().unwrap();
                (re * re + im * im).sqrt() > 1e-14
            })
            .count();
        assert_eq!(nonzero, expected_nonzero, "depth {depth}");
    }
}

#[test]
fn op_dense_and_spectral_agree_and_spectrum_reports_unit_eigenvalues() {
    let dir = scratch("op");
    let grid = dir.join("f.csv");
    let mut body = String::from("leaf_address,re,im\n");
    for (i, addr) in ["000", "001", "010", "011", "100", "101", "110", "111"]
        .iter()
        .enumerate()
    {
        body.push_str(&format!(
            "{addr},{},{}\n",
            (i as f64).sin(),
            (i as f64).cos()
        ));
    }
    fs::write(&grid, &body).unwrap();

    let dense_out = dir.join("dense.csv");
    let spectral_out = dir.join("spectral.csv");
    for (mode, path) in [("dense", &dense_out), ("spectral", &spectral_out)] {
        assert_success(&run(&[
            "op",
            "--tree",
            TREE_2_3,
            "--kernel",
            "power:0.5",
            "--mode",
            mode,
            "--in",
            grid.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
        ]));
    }
    let dense = fs::read_to_string(&dense_out).unwrap();
    let spectral = fs::read_to_string(&spectral_out).unwrap();
    for (a, b) in dense.lines().skip(1).zip(spectral.lines().skip(1)) {
        let pa: Vec<&str> = a.split(',').collect();
        let pb: Vec<&str> = b.split(',').collect();
        for k in 1..3 {
            let va: f64 = pa[k].parse().unwrap();
            let vb: f64 = pb[k].parse().unwrap();
            assert!((va - vb).abs() < 1e-10, "{a} vs {b}");
        }
    }

    // Spectrum of the unit kernel: every λ = 1, formula difference ~ 0.
    let spectrum = dir.join("spectrum.csv");
    assert_success(&run(&[
        "op",
        "--tree",
        TREE_2_3,
        "--kernel",
        "constant:1.0",
        "--mode",
        "spectrum",
        "--out",
        spectrum.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&spectrum).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let lambda: f64 = fields[1].parse().unwrap();
        let diff: f64 = fields[3].parse().unwrap();
        assert!((lambda - 1.0).abs() < 1e-12);
        assert!(diff < 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 7);

    // Zero kernel maps everything to zero.
    let zero_out = dir.join("zero.csv");
    assert_success(&run(&[
        "op",
        "--tree",
        TREE_2_3,
        "--kernel",
        "constant:0",
        "--mode",
        "dense",
        "--in",
        grid.to_str().unwrap(),
        "--out",
        zero_out.to_str().unwrap(),
    ]));
    for line in fs::read_to_string(&zero_out).unwrap().lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(fields[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn op_rejects_negative_kernel() {
    let dir = scratch("negkernel");
    let kernel = dir.join("k.csv");
    fs::write(&kernel, "vertex_address,value\n,1\n0,-2\n1,1\n").unwrap();
    let out = run(&[
        "op",
        "--tree",
        r#"{"homogeneous":{"p":2,"depth":2}}"#,
        "--kernel",
        kernel.to_str().unwrap(),
        "--mode",
        "spectrum",
        "--out",
        dir.join("s.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rho_map_and_haar_export() {
    let dir = scratch("rho");
    let map = dir.join("map.csv");
    assert_success(&run(&[
        "rho",
        "--tree",
        r#"{"homogeneous":{"p":3,"depth":2}}"#,
        "--mode",
        "map",
        "--out",
        map.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&map).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "leaf_address,t_exact,t_decimal");
    assert_eq!(lines.len(), 10);
    // Nine leaves map to k/9 in order.
    assert!(lines[1].starts_with("00,0,"));
    assert!(lines[2].starts_with("01,1/9,"));
    assert!(lines[9].starts_with("22,8/9,"));

    let export = dir.join("haar.csv");
    assert_success(&run(&[
        "rho",
        "--tree",
        r#"{"homogeneous":{"p":2,"depth":1}}"#,
        "--mode",
        "export",
        "--vertex",
        "",
        "--freq",
        "1",
        "--out",
        export.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&export).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t_left,t_right,re,im,t_left_exact,t_right_exact");
    assert_eq!(lines.len(), 3);
    let first: Vec<&str> = lines[1].split(',').collect();
    let second: Vec<&str> = lines[2].split(',').collect();
    assert_eq!((first[4], first[5]), ("0", "1/2"));
    assert_eq!((second[4], second[5]), ("1/2", "1"));
    assert_eq!(first[2].parse::<f64>().unwrap(), 1.0);
    assert_eq!(second[2].parse::<f64>().unwrap(), -1.0);

    // Invalid wavelet index.
    let out = run(&[
        "rho",
        "--tree",
        r#"{"homogeneous":{"p":2,"depth":1}}"#,
        "--mode",
        "export",
        "--freq",
        "2",
        "--out",
        dir.join("bad.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = scratch("determinism");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for path in [&a, &b] {
        assert_success(&run(&[
            "op",
            "--tree",
            r#"{"per_level":[3,2,2]}"#,
            "--kernel",
            "power:0.5",
            "--mode",
            "spectrum",
            "--out",
            path.to_str().unwrap(),
        ]));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn selftest_large_runs_fast_paths_and_skips_dense_oracles() {
    let out = run(&["selftest", "--large", "--seed", "7"]);
    assert_success(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("mode large"));
    assert!(stdout.contains("SKIP wavelet-orthonormality"));
    assert!(stdout.contains("SKIP operator-diagonalization"));
    assert!(stdout.contains("SKIP operator-dense-vs-spectral"));
    assert!(stdout.contains("PASS transform-performance"));
    assert!(stdout.contains("all suites passed"));
}

#[test]
fn selftest_passes_and_negative_control_fails() {
    let ok = run(&["selftest", "--seed", "42"]);
    assert_success(&ok);
    let stdout = String::from_utf8(ok.stdout.clone()).unwrap();
    assert!(stdout.contains("PASS wavelet-orthonormality"));
    assert!(stdout.contains("all suites passed"));

    // Same seed, same report bytes.
    let again = run(&["selftest", "--seed", "42"]);
    assert_eq!(ok.stdout, again.stdout);

    // Perturbing one wavelet phase must break orthonormality and exit 2.
    let perturbed = run(&["selftest", "--seed", "42", "--perturb-phase"]);
    assert_eq!(perturbed.status.code(), Some(2));
    let stdout = String::from_utf8(perturbed.stdout).unwrap();
    assert!(stdout.contains("FAIL wavelet-orthonormality"));
}
