//! End-to-end tests of the `iop-sim` binary: exit codes, CSV contract,
//! reproducibility, and the calibrate/pathloss overlay round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iop-sim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to spawn iop-sim")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process was killed by a signal")
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}

/// Split a CSV artifact into (comment lines, column row, data rows). Cells
/// in these files never contain commas or quotes, so a plain split suffices.
fn parse_csv(text: &str) -> (Vec<String>, Vec<String>, Vec<Vec<String>>) {
    let mut comments = Vec::new();
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') {
            comments.push(line.to_string());
        } else if columns.is_empty() {
            columns = line.split(',').map(str::to_string).collect();
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    (comments, columns, rows)
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for cmd in ["materials", "calibrate", "pathloss", "capacity", "netsim"] {
        assert!(text.contains(cmd), "--help does not mention '{cmd}'");
    }
}

#[test]
fn materials_list_shows_presets_without_a_config() {
    let out = run(&["materials", "list"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    for name in ["air", "titanium-white-paint", "plaster", "PET"] {
        assert!(text.contains(name), "list is missing '{name}'");
    }
    assert!(text.contains("preset"));
}

#[test]
fn materials_validate_accepts_good_and_rejects_bad_overlays() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "good.json",
        r#"{"version":"iop-materials/1","materials":[
            {"name":"glossy","refractive_index":1.8,
             "absorption":{"constant_per_m":150.0}}]}"#,
    );
    write(
        dir.path(),
        "cfg-good.json",
        r#"{"scenario":"materials","materials":"good.json"}"#,
    );
    let out = run(&[
        "materials",
        "validate",
        "--config",
        dir.path().join("cfg-good.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("valid"));

    write(
        dir.path(),
        "bad.json",
        r#"{"version":"iop-materials/1","materials":[
            {"name":"bogus-paint","refractive_index":1.8,
             "absorption":{"constant_per_m":-5.0}}]}"#,
    );
    write(
        dir.path(),
        "cfg-bad.json",
        r#"{"scenario":"materials","materials":"bad.json"}"#,
    );
    let out = run(&[
        "materials",
        "validate",
        "--config",
        dir.path().join("cfg-bad.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("bogus-paint"),
        "error should name the offending entry: {}",
        stderr(&out)
    );
}

#[test]
fn pathloss_writes_commented_csv_and_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"scenario":"pathloss","frequencies_hz":2e11,
            "depths_m":[0.5e-3,1.0e-3],"separations_m":0.02}"#,
    );
    let out_a = dir.path().join("a");
    let out = run(&[
        "pathloss",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let text = read(&out_a.join("pathloss.csv"));
    let (comments, columns, rows) = parse_csv(&text);
    assert_eq!(comments.len(), 3);
    assert!(comments[0].starts_with("# iop-sim v"));
    assert!(comments[1].starts_with("# config_sha256="));
    assert!(comments[2].starts_with("# seed="));
    assert_eq!(
        columns,
        [
            "burial_depth_m",
            "rho_D_m",
            "f_hz",
            "path_kind",
            "spreading_db",
            "absorption_db",
            "reflection_db",
            "roughness_db",
            "total_db"
        ]
    );
    // Two depths, one separation, one frequency, five feasible path kinds.
    assert_eq!(rows.len(), 10);
    for row in &rows {
        let total: f64 = row[8].parse().unwrap();
        let parts: f64 = row[4..8].iter().map(|c| c.parse::<f64>().unwrap()).sum();
        assert!((total - parts).abs() < 1e-9, "total_db must sum the parts");
    }

    let out_b = dir.path().join("b");
    let out = run(&[
        "pathloss",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        std::fs::read(out_a.join("pathloss.csv")).unwrap(),
        std::fs::read(out_b.join("pathloss.csv")).unwrap(),
        "reruns must be byte-identical"
    );
}

#[test]
fn empty_sweep_fails_before_any_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"scenario":"pathloss","frequencies_hz":2e11,
            "depths_m":[],"separations_m":0.02}"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "pathloss",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("depths_m"));
    assert!(
        !out_dir.join("pathloss.csv").exists(),
        "a failed run must not leave artifacts"
    );
}

#[test]
fn scenario_and_subcommand_must_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"scenario":"capacity","band_hz":[2e11,3e11],
            "depths_m":1e-3,"separations_m":0.02}"#,
    );
    let out = run(&["netsim", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let msg = stderr(&out);
    assert!(msg.contains("capacity") && msg.contains("netsim"), "{msg}");
}

#[test]
fn missing_and_malformed_configs_are_config_errors() {
    let out = run(&["pathloss"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--config"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"scenario":"pathloss","frequencies_hz":2e11,
            "depths_m":1e-3,"separations_m":0.02,"typo_field":1}"#,
    );
    let out = run(&["pathloss", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("typo_field"));
}

#[test]
fn capacity_air_reference_beats_every_buried_link() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"scenario":"capacity","band_hz":[2e11,3e11],"n_subbands":64,
            "depths_m":[5e-5,1e-3],
            "separations_m":{"start":0.01,"stop":0.04,"count":4},
            "include_air":true}"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "capacity",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let (_, columns, rows) = parse_csv(&read(&out_dir.join("capacity.csv")));
    assert_eq!(columns, ["rho_D_m", "depth_m", "medium", "capacity_bps"]);
    let mut air = std::collections::BTreeMap::new();
    for row in &rows {
        if row[2] == "air" {
            assert!(row[1].is_empty(), "air rows carry no burial depth");
            air.insert(row[0].clone(), row[3].parse::<f64>().unwrap());
        }
    }
    assert_eq!(air.len(), 4);
    let mut paint_rows = 0;
    for row in &rows {
        if row[2] == "paint-multipath" {
            paint_rows += 1;
            let reference = air[&row[0]];
            let buried: f64 = row[3].parse().unwrap();
            assert!(
                buried < reference,
                "buried link at rho={} reaches {buried} bit/s, air only {reference}",
                row[0]
            );
        }
    }
    assert_eq!(paint_rows, 8);
}

#[test]
fn calibrate_overlay_round_trips_through_pathloss() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["calibrate", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("titanium-white-paint"));
    assert!(text.contains("plaster"));
    assert!(text.contains("/m"));

    let overlay = dir.path().join("materials-calibrated.json");
    assert!(overlay.exists());

    // A pathloss run on the fitted overlay must reproduce the direct-path
    // attenuation delta the calibration was asked to hit.
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{"scenario":"pathloss","materials":{:?},
                "frequencies_hz":2e11,"depths_m":1e-3,
                "separations_m":[0.01,0.04]}}"#,
            overlay.to_str().unwrap()
        ),
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "pathloss",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let (_, _, rows) = parse_csv(&read(&out_dir.join("pathloss.csv")));
    let direct: Vec<f64> = rows
        .iter()
        .filter(|r| r[3] == "DW")
        .map(|r| r[8].parse().unwrap())
        .collect();
    assert_eq!(direct.len(), 2);
    let delta = direct[1] - direct[0];
    let expected = iop_core::reference_deltas::<f64>().dw;
    assert!(
        (delta - expected).abs() < 1e-9,
        "round-trip direct delta {delta} dB, expected {expected} dB"
    );
}

#[test]
fn netsim_is_seed_sensitive_and_parallelism_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = |parallelism: &str| {
        format!(
            r#"{{"scenario":"netsim","density_per_m2":15000,
                "wall_width_m":0.03,"wall_height_m":0.03,
                "band_hz":[2e11,3e11],"n_subbands":4,
                "link_rule":{{"snr_threshold_db":-3.0}},
                "max_range_m":0.05,"trials":10,"seed":1,
                "parallelism":{parallelism:?}}}"#
        )
    };
    let cfg = write(dir.path(), "rayon.json", &scenario("rayon"));
    let out_a = dir.path().join("a");
    let out = run(&[
        "netsim",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let text_a = read(&out_a.join("netsim.csv"));
    let (comments, columns, rows) = parse_csv(&text_a);
    assert_eq!(comments[2], "# seed=1");
    assert_eq!(
        columns,
        [
            "record",
            "trial",
            "n_nodes",
            "n_links",
            "mean_degree",
            "largest_component_fraction",
            "isolated_fraction"
        ]
    );
    assert_eq!(rows.len(), 12, "10 trial rows plus mean and stddev");
    assert_eq!(rows[10][0], "mean");
    assert_eq!(rows[11][0], "stddev");

    // Same config, same bytes.
    let out_b = dir.path().join("b");
    run(&[
        "netsim",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert_eq!(text_a, read(&out_b.join("netsim.csv")));

    // A different seed must change the data.
    let out_c = dir.path().join("c");
    let out = run(&[
        "netsim",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_c.to_str().unwrap(),
        "--seed",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let text_c = read(&out_c.join("netsim.csv"));
    assert!(text_c.contains("# seed=2"));
    assert_ne!(text_a, text_c);

    // Serial execution differs only in the config hash line.
    let cfg_serial = write(dir.path(), "serial.json", &scenario("serial"));
    let out_d = dir.path().join("d");
    let out = run(&[
        "netsim",
        "--config",
        cfg_serial.to_str().unwrap(),
        "--out",
        out_d.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let strip = |text: &str| {
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&text_a), strip(&read(&out_d.join("netsim.csv"))));
}

#[test]
fn netsim_rejects_a_range_cutoff_that_could_drop_links() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"scenario":"netsim","density_per_m2":15000,
            "wall_width_m":0.05,"wall_height_m":0.05,
            "band_hz":[2e11,3e11],"n_subbands":4,
            "link_rule":{"snr_threshold_db":-3.0},
            "max_range_m":0.01,"trials":5}"#,
    );
    let out = run(&["netsim", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("max_range"), "{}", stderr(&out));
}

#[test]
fn impossible_calibration_targets_exit_with_the_model_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"scenario":"calibrate","deltas":{"dw":-5.0}}"#,
    );
    let out = run(&["calibrate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("calibration"), "{}", stderr(&out));
}

#[test]
fn svg_flag_renders_a_chart_next_to_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"scenario":"pathloss","frequencies_hz":2e11,
            "depths_m":{"start":1e-4,"stop":1.9e-3,"count":10},
            "separations_m":0.02}"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "pathloss",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--svg",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let svg = read(&out_dir.join("pathloss.svg"));
    assert!(svg.starts_with("<svg"));
    assert!(svg.ends_with("</svg>\n") || svg.ends_with("</svg>"));
    assert!(svg.contains("polyline"));
}
