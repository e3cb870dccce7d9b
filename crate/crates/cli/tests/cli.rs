use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rshaper_core::freq::ResponseSet;
use rshaper_core::stability_margins;
use serde_json::Value;

fn rshaper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rshaper"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn csv_columns(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for line in lines {
        for (c, v) in cols.iter_mut().zip(line.split(',')) {
            c.push(v.parse::<f64>().unwrap());
        }
    }
    (header, cols)
}

fn response_from_csv(path: &Path) -> ResponseSet<f64> {
    let (header, mut cols) = csv_columns(path);
    assert_eq!(header, ["omega_rad_s", "magnitude_db", "phase_deg"]);
    let phase = cols.pop().unwrap();
    let mag = cols.pop().unwrap();
    ResponseSet::from_parts(cols.pop().unwrap(), mag, phase).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn analyze_uncompensated_loop_reports_negative_gain_margin() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cg.csv");
    let o = rshaper(&[
        "analyze",
        "--plant",
        "builtin:paper-two-mass",
        "--pi",
        "100,150",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let r = stdout_json(&o);
    assert!((r["gain_margin_db"].as_f64().unwrap() + 4.0).abs() <= 0.5);
    assert!((r["phase_margin_deg"].as_f64().unwrap() - 52.3).abs() <= 1.0);
    assert_eq!(r["stable_verdict"], "margins-violated");
    assert_eq!(response_from_csv(&csv).len(), 2000);
}

#[test]
fn analyze_compensated_loop_has_positive_margins() {
    let o = rshaper(&[
        "analyze",
        "--plant",
        "builtin:paper-two-mass",
        "--pi",
        "100,150",
        "--comp",
        "100,0.1923",
    ]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["stable_verdict"], "margins-positive");
    assert!(r["gain_margin_db"].as_f64().unwrap() > 0.0);
}

#[test]
fn controller_file_and_flags_agree() {
    let dir = tempfile::tempdir().unwrap();
    let ctl = write(
        dir.path(),
        "ctl.json",
        r#"{"pi":{"kp":100,"ki":150},"comp":{"kd":100,"tau":0.1923}}"#,
    );
    let a = rshaper(&[
        "analyze",
        "--plant",
        "builtin:paper-two-mass",
        "--controller",
        &ctl,
    ]);
    let b = rshaper(&[
        "analyze",
        "--plant",
        "builtin:paper-two-mass",
        "--pi",
        "100,150",
        "--comp",
        "100,0.1923",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_first_order_plant_has_infinite_gain_margin() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g_of_s.json", r#"{"num":[1],"den":[1,1]}"#);
    let o = rshaper(&["analyze", "--plant", &g]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["gain_margin_db"], "inf");
}

#[test]
fn analyze_custom_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let o = rshaper(&[
        "analyze",
        "--plant",
        "builtin:two-mass-nominal",
        "--pi",
        "50,150",
        "--grid",
        "1,100,300",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r = response_from_csv(&csv);
    assert_eq!(r.len(), 300);
    assert_eq!(r.omega()[0], 1.0);
    assert_eq!(*r.omega().last().unwrap(), 100.0);
}

#[test]
fn design_two_mass_plant() {
    let o = rshaper(&["design", "--plant", "builtin:paper-two-mass"]);
    assert_eq!(code(&o), 0);
    let d = stdout_json(&o);
    assert!((d["tau"].as_f64().unwrap() - 0.1923).abs() / 0.1923 < 0.02);
    assert!((d["omega0"].as_f64().unwrap() - 16.3).abs() / 16.3 < 0.01);
}

#[test]
fn design_template_and_explicit_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(
        dir.path(),
        "t.json",
        r#"{"k":1,"z1":50,"p1":100,"zeta":0.7,"omega0":10}"#,
    );
    assert_eq!(
        stdout_json(&rshaper(&["design", "--plant", &t]))["kd"].as_f64(),
        Some(0.0)
    );
    let p = write(dir.path(), "p.json", r#"{"num":[1],"den":[1,20,100,0]}"#);
    let d = stdout_json(&rshaper(&["design", "--plant", &p, "--omega0", "10"]));
    assert!((d["tau"].as_f64().unwrap() - PI / 10.0).abs() < 1e-9);
    let g = write(dir.path(), "g.json", r#"{"num":[1],"den":[1,1]}"#);
    assert_eq!(code(&rshaper(&["design", "--plant", &g])), 1);
}

#[test]
fn simulate_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pi.csv");
    let o = rshaper(&[
        "simulate",
        "--plant",
        "builtin:paper-two-mass",
        "--pi",
        "100,150",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let (header, cols) = csv_columns(&out);
    assert_eq!(header, ["t_s", "x_m", "y_m", "u_V", "r_m"]);
    assert_eq!(cols[0].len(), 200_001);

    let verdict = dir.path().join("v.json");
    let o = rshaper(&[
        "simulate",
        "--plant",
        "builtin:paper-two-mass",
        "--pi",
        "100,150",
        "--comp",
        "100,0.1923",
        "--verdict",
        verdict.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(&verdict).unwrap()).unwrap();
    assert!(v["verdict"]["settling_time"].as_f64().unwrap().is_finite());
    assert_eq!(v, stdout_json(&o));

    let o = rshaper(&[
        "simulate",
        "--plant",
        "builtin:paper-two-mass",
        "--pi",
        "100,150",
        "--comp",
        "100,0.1923",
        "--scenario",
        "step:0@0",
        "--duration",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout_json(&o)["verdict"]["settling_time"].as_f64(),
        Some(0.0)
    );
}

#[test]
fn simulate_lightly_damped_loop_without_decay_oscillates() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "osc.json",
        r#"{"A":[[0,1],[-100,0]],"B":[0,1],"F":[1,0]}"#,
    );
    let o = rshaper(&[
        "simulate",
        "--plant",
        &m,
        "--scenario",
        "pulse:1,0.1@0",
        "--duration",
        "5",
        "--dt",
        "1e-3",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn simulate_rejects_bad_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"num":[1],"den":[1,1]}"#);
    for args in [
        vec![
            "simulate",
            "--plant",
            "builtin:paper-two-mass",
            "--pi",
            "100,150",
            "--comp",
            "100,0.1923",
            "--dt",
            "0.02",
        ],
        vec!["simulate", "--plant", &g, "--pi", "1,0"],
        vec!["simulate", "--plant", "builtin:paper-two-mass"],
        vec![
            "simulate",
            "--plant",
            "builtin:paper-two-mass",
            "--pi",
            "1,0",
            "--scenario",
            "ramp:1@0",
        ],
        vec!["simulate", "--plant", "builtin:nonexistent", "--pi", "1,0"],
        vec!["analyze", "--pi", "1"],
    ] {
        let o = rshaper(&args);
        assert_eq!(
            code(&o),
            1,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(code(&rshaper(&["--help"])), 0);
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn assert_manifest_complete(dir: &Path) {
    let m = manifest(dir);
    let listed: Vec<&str> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    let mut on_disk: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path().to_str().unwrap().to_owned())
        .collect();
    on_disk.sort();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(sorted, on_disk);
    assert!(listed.last().unwrap().ends_with("manifest.json"));
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn reproduce_fig6_margins_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&rshaper(&[
            "reproduce",
            "fig6",
            "--out-dir",
            dir.path().to_str().unwrap()
        ])),
        0
    );
    assert_manifest_complete(dir.path());
    let cg = stability_margins(&response_from_csv(&dir.path().join("fig6_cg.csv")));
    assert!((cg.gain_margin_db + 4.0).abs() <= 0.5);
    assert!((cg.phase_margin_deg.unwrap() - 52.3).abs() <= 1.0);
    let ch = stability_margins(&response_from_csv(&dir.path().join("fig6_ch.csv")));
    assert!(ch.gain_margin_db > 0.0);
}

#[test]
fn reproduce_fig8a_period() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&rshaper(&[
            "reproduce",
            "fig8a",
            "--out-dir",
            dir.path().to_str().unwrap()
        ])),
        0
    );
    assert_manifest_complete(dir.path());
    let (_, cols) = csv_columns(&dir.path().join("fig8a_open_loop.csv"));
    let (t, x) = (&cols[0], &cols[1]);
    let rest = *x.last().unwrap();
    let crossings: Vec<f64> = (1..t.len())
        .filter(|&i| {
            t[i] > 0.6 && t[i] < 4.0 && (x[i - 1] - rest).signum() != (x[i] - rest).signum()
        })
        .map(|i| t[i - 1] + (t[i] - t[i - 1]) * (rest - x[i - 1]) / (x[i] - x[i - 1]))
        .collect();
    let period = 2.0 * (crossings.last().unwrap() - crossings[0]) / (crossings.len() - 1) as f64;
    let expected = 2.0 * PI / 16.3;
    assert!((period - expected).abs() / expected < 0.02, "{period}");
}

#[test]
fn reproduce_fig3_plateau() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&rshaper(&[
            "reproduce",
            "fig3",
            "--out-dir",
            dir.path().to_str().unwrap()
        ])),
        0
    );
    let (header, cols) = csv_columns(&dir.path().join("fig3_compensator.csv"));
    assert_eq!(header, ["omega_rad_s", "magnitude", "magnitude_db"]);
    let peak = cols[1].iter().fold(0.0f64, |m, v| m.max(*v));
    assert!(peak <= 2.0 && peak > 2.0 * 0.999, "{peak}");
}

#[test]
fn reproduce_traces_flag_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&rshaper(&["reproduce", "fig8b", "--out-dir", d])), 0);
    assert_eq!(code(&rshaper(&["reproduce", "fig8c", "--out-dir", d])), 0);
    let b: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("fig8b_pi_only_verdict.json")).unwrap(),
    )
    .unwrap();
    let c: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("fig8c_compensated_verdict.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(b["verdict"]["verdict"], "diverged");
    assert_eq!(c["verdict"]["verdict"], "settled");
    assert!(c["verdict"]["settling_time"].as_f64().unwrap() > 15.0);
}

#[test]
fn reproduce_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for fig in ["fig2", "fig4"] {
        for d in [&a, &b] {
            assert_eq!(
                code(&rshaper(&[
                    "reproduce",
                    fig,
                    "--out-dir",
                    d.path().to_str().unwrap()
                ])),
                0
            );
        }
    }
    for name in ["fig2_zeta_0.01.csv", "fig2_zeta_0.7.csv", "fig4_ratio.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
    assert_eq!(code(&rshaper(&["reproduce", "fig5"])), 1);
}
