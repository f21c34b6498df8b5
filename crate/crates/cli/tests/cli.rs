use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_resiliency"))
}

/// Runs `resiliency <args> --out <dir>/<out>` from `dir`.
fn run(dir: &Path, out: &str, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .args(["--out", out, "--quiet"])
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn hpp_summary_count_matches_rate_times_horizon() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        "s",
        &["simulate", "--set", "model.rate=0.5", "--set", "sim.horizon=10", "--set", "sim.trajectories=100000"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.path().join("s/count_curve.csv")).unwrap();
    assert!(csv.starts_with("t,mean,std_error,analytic\n"));
    let last = csv.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    assert_eq!(cols[0], "10.0");
    let mean: f64 = cols[1].parse().unwrap();
    assert!((mean - 5.0).abs() < 0.05, "mean {mean}");
    let meta = json(d.path().join("s/simulate.json"));
    assert_eq!(meta["schema_version"], "1");
    assert_eq!(meta["seed"], 42);
}

#[test]
fn simulation_output_is_byte_identical_across_runs_and_threads() {
    let d = tempfile::tempdir().unwrap();
    let cfg = "[model]\nkind = \"grp\"\nq = 0.4\n\n[dist]\nfamily = \"weibull\"\nshape = 1.8\nscale = 2.0\n\n\
               [repair]\nkind = \"distributed\"\nfamily = \"lognormal\"\nlog_mean = -2.0\nlog_sd = 0.5\n\n\
               [sim]\nhorizon = 20\ntrajectories = 5000\n";
    write(d.path(), "c.toml", cfg);
    let a = run(d.path(), "a", &["simulate", "--config", "c.toml", "--threads", "1"]);
    let b = run(d.path(), "b", &["simulate", "--config", "c.toml", "--threads", "4"]);
    let c = run(d.path(), "c", &["simulate", "--config", "c.toml"]);
    for o in [&a, &b, &c] {
        assert_eq!(code(o), 0, "{}", stderr(o));
    }
    for f in ["count_curve.csv", "availability_curve.csv", "rocof_curve.csv", "simulate.json"] {
        let x = std::fs::read(d.path().join("a").join(f)).unwrap();
        assert_eq!(x, std::fs::read(d.path().join("b").join(f)).unwrap(), "{f}");
        assert_eq!(x, std::fs::read(d.path().join("c").join(f)).unwrap(), "{f}");
    }

    let h1 = run(d.path(), "h1", &["simulate", "--config", "c.toml", "--set", "sim.trajectories=1", "--set", "sim.mode=histories"]);
    let h2 = run(d.path(), "h2", &["simulate", "--config", "c.toml", "--set", "sim.trajectories=1", "--set", "sim.mode=histories"]);
    assert_eq!(code(&h1), 0, "{}", stderr(&h1));
    assert_eq!(code(&h2), 0);
    let f = "histories/trajectory_000000.csv";
    assert_eq!(
        std::fs::read(d.path().join("h1").join(f)).unwrap(),
        std::fs::read(d.path().join("h2").join(f)).unwrap()
    );
}

#[test]
fn invalid_horizon_exits_2_without_writing() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "[model]\nrate = 1.0\n\n[sim]\nhorizon = 0\n");
    let o = run(d.path(), "out", &["simulate", "--config", "c.toml"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("c.toml:5"), "{}", stderr(&o));
    assert!(!d.path().join("out").exists());

    write(d.path(), "bad.toml", "[model\nrate = 1.0\n");
    let o = run(d.path(), "out", &["simulate", "--config", "bad.toml"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.toml:1"), "{}", stderr(&o));
}

#[test]
fn invalid_model_over_horizon_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        "out",
        &["simulate", "--set", "model.kind=nhpp", "--set", "model.rocof=linear", "--set", "model.a=1", "--set", "model.b=-0.5", "--set", "sim.horizon=10"],
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(!d.path().join("out").exists());
}

#[test]
fn seed_flag_overrides_config_and_entropy_is_recorded() {
    let d = tempfile::tempdir().unwrap();
    let base = ["simulate", "--set", "model.rate=1", "--set", "sim.seed=7", "--set", "sim.trajectories=10"];
    let a = run(d.path(), "a", &base);
    assert_eq!(json(d.path().join("a/simulate.json"))["seed"], 7);
    let mut with_flag = base.to_vec();
    with_flag.extend(["--seed", "9"]);
    run(d.path(), "b", &with_flag);
    assert_eq!(json(d.path().join("b/simulate.json"))["seed"], 9);
    let mut entropy = base.to_vec();
    entropy.extend(["--seed", "-1"]);
    let e = run(d.path(), "e", &entropy);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&e), 0, "{}", stderr(&e));
    assert!(json(d.path().join("e/simulate.json"))["seed"].as_u64().unwrap() < 1 << 63);
    let mut bad = base.to_vec();
    bad.extend(["--seed", "-5"]);
    assert_eq!(code(&run(d.path(), "x", &bad)), 2);
}

#[test]
fn fit_hpp_rate_is_count_over_exposure() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "ten.csv", "# horizon=100\nfail_time\n5\n14\n22\n31\n47\n55\n63\n72\n88\n95\n");
    let o = run(d.path(), "f", &["fit", "--set", "fit.events=ten.csv", "--set", "fit.candidates=hpp"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(d.path().join("f/fit.json"));
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["fits"][0]["model"]["rate"], 0.1);
    assert_eq!(v["ranking"][0], "hpp");
}

#[test]
fn fit_without_enough_events_exits_4_and_states_minimum() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "empty.csv", "fail_time,repair_complete_time\n");
    let o = run(d.path(), "f", &["fit", "--set", "fit.events=empty.csv"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("hpp needs 1"), "{}", stderr(&o));
    write(d.path(), "two.csv", "# horizon=10\nfail_time\n1\n2\n");
    let o = run(d.path(), "f", &["fit", "--set", "fit.events=two.csv", "--set", "fit.candidates=[\"grp_weibull\"]"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("needs 5"), "{}", stderr(&o));
    assert!(!d.path().join("f").exists());
}

#[test]
fn fit_rejects_invalid_event_logs() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "unsorted.csv", "# horizon=10\nfail_time\n3\n1\n2\n");
    let o = run(d.path(), "f", &["fit", "--set", "fit.events=unsorted.csv"]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    write(d.path(), "junk.csv", "# horizon=10\nfail_time\n1\nabc\n");
    let o = run(d.path(), "f", &["fit", "--set", "fit.events=junk.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("junk.csv:4: row 2"), "{}", stderr(&o));
    let o = run(d.path(), "f", &["fit", "--set", "fit.events=missing.csv"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn simulated_logs_round_trip_through_fit() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        "sim",
        &[
            "simulate", "--set", "model.rate=0.5", "--set", "sim.horizon=200", "--set", "sim.trajectories=10",
            "--set", "sim.mode=histories", "--set", "repair.kind=fixed", "--set", "repair.duration=0.3",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut hpp_first = 0;
    for i in 0..10 {
        let log = format!("sim/histories/trajectory_{i:06}.csv");
        let text = std::fs::read_to_string(d.path().join(&log)).unwrap();
        assert!(text.starts_with("# horizon=200.0\n# seed=42\n"));
        let rows: Vec<(f64, f64)> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| {
                let (a, b) = l.split_once(',').unwrap();
                (a.parse().unwrap(), b.parse().unwrap())
            })
            .collect();
        let out = format!("fit{i}");
        let o = run(d.path(), &out, &["fit", "--set", &format!("fit.events={log}"), "--set", "fit.candidates=hpp,crow_amsaa"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let v = json(d.path().join(&out).join("fit.json"));
        assert_eq!(v["failures"], rows.len());
        assert_eq!(v["observation_end"], 200.0);
        assert_eq!(v["truncation"], "time");
        // Exposure excludes downtime, so the rate is n / (T - total repair time).
        let down: f64 = rows.iter().map(|(f, r)| r - f).sum();
        let rate = v["fits"].as_array().unwrap().iter().find(|f| f["candidate"] == "hpp").unwrap()["model"]["rate"]
            .as_f64()
            .unwrap();
        assert!((rate - rows.len() as f64 / (200.0 - down)).abs() < 1e-12);
        if v["ranking"][0] == "hpp" {
            hpp_first += 1;
        }
    }
    assert!(hpp_first >= 6, "hpp ranked first in {hpp_first}/10");
}

#[test]
fn resiliency_reports_rho_degree_and_flags() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "m.toml", "[mission]\nt_mission = 100\n\n[[event]]\nt_fail = 40\nt_res = 15\nq_res = 0.2\n");
    let o = run(d.path(), "r", &["resiliency", "--config", "m.toml"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(d.path().join("r/resiliency.json"));
    assert_eq!(v["schema_version"], "1");
    assert!((v["events"][0]["rho_r"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert!((v["mission_rho"].as_f64().unwrap() - 0.6).abs() < 1e-12);

    write(
        d.path(),
        "p.toml",
        "[dist]\nfamily = \"weibull\"\nshape = 2.0\nscale = 80.0\n\n[[event]]\nt_fail = 30\nt_res = 0\nq_res = 0\n",
    );
    let o = run(d.path(), "p", &["resiliency", "--config", "p.toml"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(d.path().join("p/resiliency.json"));
    assert_eq!(v["events"][0]["rho_r"], 1.0);
    assert_eq!(v["events"][0]["degree"], "GoodAsNew");

    let o = run(d.path(), "n", &["resiliency"]);
    assert_eq!(code(&o), 0);
    let v = json(d.path().join("n/resiliency.json"));
    assert_eq!(v["mission_rho"], 1.0);
    assert_eq!(v["flags"][0]["kind"], "no_events");
}

#[test]
fn overlapping_outages_exit_5() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "o.toml",
        "[[event]]\nt_fail = 10\nt_res = 35\nq_res = 0.0\n\n[[event]]\nt_fail = 40\nt_res = 1\nq_res = 0.1\n",
    );
    let o = run(d.path(), "r", &["resiliency", "--config", "o.toml"]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    let o = run(d.path(), "r", &["resiliency", "--set", "event=[{t_fail=120,t_res=1,q_res=0}]"]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    let o = run(d.path(), "r", &["resiliency", "--set", "event=[{t_fail=10,t_res=1,q_res=1.5}]"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(!d.path().join("r").exists());
}

fn trajectory_rows(path: PathBuf) -> Vec<(f64, f64, String)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,level,segment"));
    lines
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[1].parse().unwrap(), c[2].to_string())
        })
        .collect()
}

#[test]
fn trajectory_default_config_starts_nominal() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), "t", &["trajectory"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(d.path().join("t/trajectory.csv")).unwrap();
    assert_eq!(text.lines().nth(1), Some("0.0,1.0,nominal"));
}

#[test]
fn trajectory_recovery_onset_is_one_minus_q() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "t.toml",
        "[dist]\nfamily = \"gamma\"\nshape = 2.0\nrate = 0.05\n\n[mission]\nt_mission = 100\n\n\
         [trajectory]\nresolution = 57\noutage_level = 0.1\n\n[[event]]\nt_fail = 33.3\nt_res = 12.1\nq_res = 0.37\n",
    );
    let o = run(d.path(), "t", &["trajectory", "--config", "t.toml"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = trajectory_rows(d.path().join("t/trajectory.csv"));
    let onset = rows.iter().find(|r| r.2 == "recovered").unwrap();
    assert!((onset.1 - 0.63).abs() <= 1e-12);
    assert_eq!(onset.0, 33.3 + 12.1);
    assert!(rows.iter().any(|r| r.2 == "outage" && r.1 == 0.1));
}

#[test]
fn trajectory_good_as_new_has_no_outage() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), "t", &["trajectory", "--set", "event=[{t_fail=20,t_res=0,q_res=0}]"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = trajectory_rows(d.path().join("t/trajectory.csv"));
    assert!(rows.iter().all(|r| r.2 != "outage"));
    let at = rows.iter().position(|r| r.2 == "recovered").unwrap();
    assert_eq!(rows[at].1, 1.0);
    for w in rows.windows(2) {
        assert!(w[1].1 <= w[0].1 || w[1].0 == 20.0);
    }
}

#[test]
fn risk_examples() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "two.csv", "id,description,consequence,probability\na,pump,2.0,0.5\nb,valve,5.0,0.1\n");
    let o = run(d.path(), "a", &["risk", "--set", "risk.portfolio=two.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(d.path().join("a/risk.json"));
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["system_risk"], 1.5);
    assert_eq!(v["scenarios"][1]["risk"], 0.5);
    assert!(v["reliability_proxy"].is_null());

    write(d.path(), "empty.csv", "id,description,consequence,probability\n");
    run(d.path(), "b", &["risk", "--set", "risk.portfolio=empty.csv"]);
    assert_eq!(json(d.path().join("b/risk.json"))["system_risk"], 0.0);

    write(d.path(), "norm.csv", "id,description,consequence,probability\na,x,1.0,0.05\nb,y,0.5,0.1\n");
    let o = run(d.path(), "c", &["risk", "--set", "risk.portfolio=norm.csv", "--set", "risk.normalized=true"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let p = json(d.path().join("c/risk.json"))["reliability_proxy"]["value"].as_f64().unwrap();
    assert!((p - 0.9).abs() < 1e-15);

    let o = run(d.path(), "d", &["risk", "--set", "risk.portfolio=norm.csv", "--set", "risk.proxy=true"]);
    assert_eq!(code(&o), 6);

    write(d.path(), "bad.csv", "id,description,consequence,probability\na,x,1.0,0.05\nb,y,0.5\n");
    let o = run(d.path(), "e", &["risk", "--set", "risk.portfolio=bad.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.csv:3"), "{}", stderr(&o));
    write(d.path(), "bad2.csv", "id,description,consequence,probability\na,x,1.0,0.05\nb,y,0.5,1.7\n");
    let o = run(d.path(), "e", &["risk", "--set", "risk.portfolio=bad2.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("row 2"), "{}", stderr(&o));
    assert!(!d.path().join("e").exists());
}

#[test]
fn paths_resolve_relative_to_the_config_file() {
    let d = tempfile::tempdir().unwrap();
    std::fs::create_dir(d.path().join("cfg")).unwrap();
    write(d.path(), "cfg/p.csv", "id,description,consequence,probability\na,x,1.0,0.25\n");
    write(d.path(), "cfg/r.toml", "[risk]\nportfolio = \"p.csv\"\n");
    let o = run(d.path(), "out", &["risk", "--config", "cfg/r.toml"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(d.path().join("out/risk.json"))["system_risk"], 0.25);
}

#[test]
fn unknown_keys_are_config_errors() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "[sim]\nhorizon = 5\nhorizn = 6\n");
    let o = run(d.path(), "out", &["simulate", "--config", "c.toml"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("c.toml:3"), "{}", stderr(&o));
}
