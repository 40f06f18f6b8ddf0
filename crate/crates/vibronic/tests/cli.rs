//! End-to-end checks of the command-line surface: determinism, exit codes,
//! and output formats.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_vibronic")
}

fn model_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("vibronic-cli-tests");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn compile_is_deterministic() {
    let out_a = tmp("gates_a.txt");
    let out_b = tmp("gates_b.txt");
    for out in [&out_a, &out_b] {
        let status = Command::new(bin())
            .args([
                "compile",
                "--model",
                model_path("rabi.json").to_str().unwrap(),
                "--grid-bits",
                "3",
                "--order",
                "2",
                "--time-fs",
                "1.0",
                "--steps",
                "4",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(&out_a).unwrap();
    let b = fs::read(&out_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "gate-list export must be byte-identical across runs");
}

#[test]
fn oversized_coupling_exits_with_numerical_code() {
    let path = tmp("giant.json");
    fs::write(
        &path,
        r#"{
            "states": 2,
            "modes": [0.1],
            "unit": "au",
            "max_degree": 1,
            "couplings": [{"bra": 0, "ket": 1, "powers": [[0,1]], "value": 1e60}]
        }"#,
    )
    .unwrap();
    let output = Command::new(bin())
        .args([
            "compile",
            "--model",
            path.to_str().unwrap(),
            "--grid-bits",
            "3",
            "--time-fs",
            "10",
            "--steps",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("(0,1,Q0)"), "must name the term: {stderr}");
}

#[test]
fn missing_model_file_is_a_validation_error() {
    let output = Command::new(bin())
        .args(["estimate", "--model", "/nonexistent/model.json", "--steps", "1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn estimate_supplied_steps_scale_linearly_at_first_order() {
    let report = |steps: &str| -> serde_json::Value {
        let out = tmp(format!("report_{steps}.json").as_str());
        let status = Command::new(bin())
            .args([
                "estimate",
                "--model",
                model_path("anth_c60_m11.json").to_str().unwrap(),
                "--grid-bits",
                "4",
                "--order",
                "1",
                "--time-fs",
                "100",
                "--steps",
                steps,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap()
    };
    let one = report("1");
    let five = report("5");
    let per_step = one["toffoli_per_step"].as_u64().unwrap();
    assert_eq!(one["total_toffoli"].as_u64().unwrap(), per_step);
    assert_eq!(five["total_toffoli"].as_u64().unwrap(), 5 * per_step);
    assert_eq!(one["total_qubits"].as_u64().unwrap(), 113);
}

#[test]
fn rabi_simulation_matches_analytic_trace() {
    let out = tmp("rabi.csv");
    let status = Command::new(bin())
        .args([
            "simulate",
            "--model",
            model_path("rabi.json").to_str().unwrap(),
            "--grid-bits",
            "3",
            "--time-fs",
            "40",
            "--samples",
            "41",
            "--backend",
            "oracle",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "time_fs,p_0,p_1");
    let lambda_au = 0.05 / vibronic::units::EV_PER_HARTREE;
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let t_au = vibronic::units::fs_to_au(fields[0]);
        let expect = (lambda_au * t_au).sin().powi(2);
        assert!(
            (fields[2] - expect).abs() < 1e-3,
            "t={} fs: p1={} expected {expect}",
            fields[0],
            fields[2]
        );
        assert!((fields[1] + fields[2] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn compiled_trace_converges_to_oracle_trace() {
    let model = model_path("rabi.json");
    let run = |backend: &str, extra: &[&str], out: &Path| {
        let mut args = vec![
            "simulate",
            "--model",
            model.to_str().unwrap(),
            "--grid-bits",
            "3",
            "--time-fs",
            "20",
            "--samples",
            "11",
            "--backend",
            backend,
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let status = Command::new(bin()).args(&args).status().unwrap();
        assert!(status.success());
    };
    let oracle_out = tmp("trace_oracle.csv");
    let compiled_out = tmp("trace_compiled.csv");
    run("oracle", &[], &oracle_out);
    run("semantic", &["--order", "2", "--steps", "64"], &compiled_out);
    let parse = |p: &Path| -> Vec<Vec<f64>> {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    };
    let a = parse(&oracle_out);
    let b = parse(&compiled_out);
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        for (va, vb) in ra.iter().zip(rb).skip(1) {
            assert!((va - vb).abs() < 1e-3, "{va} vs {vb}");
        }
    }
}

#[test]
fn zero_coupling_model_keeps_constant_populations() {
    let path = tmp("uncoupled.json");
    fs::write(
        &path,
        r#"{
            "states": 2,
            "modes": [0.2],
            "unit": "eV",
            "max_degree": 1,
            "couplings": [
                {"bra": 0, "ket": 0, "powers": [[0,1]], "value": 0.05},
                {"bra": 1, "ket": 1, "powers": [[0,1]], "value": -0.03}
            ]
        }"#,
    )
    .unwrap();
    let out = tmp("uncoupled.csv");
    let status = Command::new(bin())
        .args([
            "simulate",
            "--model",
            path.to_str().unwrap(),
            "--grid-bits",
            "3",
            "--time-fs",
            "50",
            "--samples",
            "21",
            "--initial-state",
            "1",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    for line in fs::read_to_string(&out).unwrap().lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((fields[2] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn spectrum_command_writes_ev_grid() {
    let out = tmp("spectrum.csv");
    let status = Command::new(bin())
        .args([
            "spectrum",
            "--model",
            model_path("displaced.json").to_str().unwrap(),
            "--grid-bits",
            "3",
            "--time-fs",
            "15",
            "--samples",
            "128",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("omega_ev,intensity\n"));
    assert!(text.lines().count() > 100);
}

#[test]
fn sampled_trace_respects_seed() {
    let run = |seed: &str, out: &Path| {
        let status = Command::new(bin())
            .args([
                "simulate",
                "--model",
                model_path("rabi.json").to_str().unwrap(),
                "--grid-bits",
                "2",
                "--time-fs",
                "10",
                "--samples",
                "5",
                "--shots",
                "2000",
                "--seed",
                seed,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    };
    let a1 = tmp("seed_a1.csv");
    let a2 = tmp("seed_a2.csv");
    let b = tmp("seed_b.csv");
    run("7", &a1);
    run("7", &a2);
    run("8", &b);
    let a1 = fs::read(&a1).unwrap();
    let a2 = fs::read(&a2).unwrap();
    let b = fs::read(&b).unwrap();
    assert_eq!(a1, a2, "same seed must reproduce the sampled trace");
    assert_ne!(a1, b, "different seeds must differ");
}
