use std::path::{Path, PathBuf};
use std::process::Command as Proc;

use fconc_cli::config::{ClassSpec, FunctionFamily, FunctionSpec, TableKind};
use fconc_cli::csv::strip_timestamp;
use fconc_cli::{run, CliError, Command, Options, ScenarioConfig};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn load(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(&configs_dir().join(name)).unwrap()
}

fn quiet() -> Options {
    Options {
        no_timestamp: true,
        quadrature_order: None,
    }
}

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_fconc"))
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn shipped_configs_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let cfg = ScenarioConfig::load(&path).unwrap();
        let text = cfg.to_toml();
        let back = ScenarioConfig::parse(&text).unwrap();
        assert_eq!(cfg, back, "{}", path.display());
        assert_eq!(text, back.to_toml());
        seen += 1;
    }
    assert!(seen >= 10);
}

#[test]
fn default_config_round_trips() {
    let cfg = ScenarioConfig::default();
    assert_eq!(ScenarioConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    assert_eq!(ScenarioConfig::parse("").unwrap(), cfg);
}

#[test]
fn unknown_keys_are_rejected() {
    for text in [
        "[function]\nfamily = \"hot\"\nbeta = 1.0\n",
        "[sweep]\nt_minimum = 1.0\n",
        "[nonsense]\n",
        "[function]\nfamily = \"cubic\"\n",
    ] {
        assert!(matches!(ScenarioConfig::parse(text), Err(CliError::Config(_))), "{text}");
    }
}

#[test]
fn unknown_key_exits_with_config_error() {
    let dir = std::env::temp_dir().join(format!("fconc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("bad.toml");
    std::fs::write(&p, "[field]\nn = 1\nm = 2\n").unwrap();
    let out = bin().args(["sweep", "--config"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let missing = bin().args(["sweep", "--config", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn beta_table_through_the_binary() {
    let out = bin()
        .args(["classify", "--config"])
        .arg(configs_dir().join("beta_table.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .take(2)
        .map(|l| l.split('|').map(|c| c.trim().to_string()).collect())
        .collect();
    assert_eq!(rows[0], ["2d<n", "Yes", "Yes", "No"]);
    assert_eq!(rows[1], ["2d=n, M<1", "Yes", "No", "No"]);
}

#[test]
fn empty_function_list_is_a_config_error() {
    let mut cfg = ScenarioConfig::default();
    cfg.classify.table = TableKind::Custom;
    let e = run(Command::Classify, &cfg, &quiet()).unwrap_err();
    assert_eq!(e, CliError::Config("no functions".into()));
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn hot_column_is_flagged_sampled() {
    let out = run(Command::Classify, &load("custom_table.toml"), &quiet()).unwrap();
    assert_eq!(out.code, 0);
    let hot: Vec<_> = data_rows(&out.csv).into_iter().filter(|r| r[2] == "hot").collect();
    assert_eq!(hot.len(), 2);
    assert!(hot.iter().all(|r| r[3] == "Yes" && r[4] == "sampled"));
    assert!(out.text.contains("Yes (sampled)"));
}

#[test]
fn undecidable_cells_exit_2() {
    // the kappa_* = 1/2 column is only characterized under condition (A)
    let mut cfg = ScenarioConfig::default();
    cfg.classify.table = TableKind::Custom;
    cfg.classify.n = 3;
    cfg.classify.d_list = vec![0.0];
    cfg.classify.datum_class = ClassSpec::L;
    cfg.classify.functions = vec![
        FunctionSpec {
            family: FunctionFamily::PowerLog,
            param: Some(0.5),
            a: None,
        },
        FunctionSpec {
            family: FunctionFamily::PowerLog,
            param: Some(0.75),
            a: None,
        },
    ];
    let out = run(Command::Classify, &cfg, &quiet()).unwrap();
    assert_eq!(out.code, 2);
    assert!(out.text.contains("undecidable cells:\n  n=3: d=0 / powerlog(0.5)"), "{}", out.text);
    cfg.classify.datum_class = ClassSpec::La;
    assert_eq!(run(Command::Classify, &cfg, &quiet()).unwrap().code, 0);
}

#[test]
fn inconsistent_rows_render_as_na() {
    let mut cfg = ScenarioConfig::default();
    cfg.classify.table = TableKind::Custom;
    cfg.classify.d_list = vec![0.5];
    cfg.classify.functions = vec![FunctionSpec::default()];
    let out = run(Command::Classify, &cfg, &quiet()).unwrap();
    assert_eq!(out.code, 0);
    assert!(out.text.contains("n/a"));
}

#[test]
fn sweep_summaries() {
    let out = run(Command::Sweep, &load("sweep_psi_3_4.toml"), &quiet()).unwrap();
    assert_eq!(out.code, 0);
    assert!(out.csv.lines().any(|l| l.starts_with("# summary: T_eventual=")), "{}", out.csv);
    let out = run(Command::Sweep, &load("sweep_psi_1_4.toml"), &quiet()).unwrap();
    assert!(out.csv.contains("# summary: no-eventual (finite horizon"));
    let rows = data_rows(&out.csv);
    assert_eq!(rows.len(), 25);
    let head = out.csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(head, "t,verdict,margin,test_kind,witness_x1,witness_xi1,witness_y1,witness_mu");
    assert!(rows.iter().all(|r| r[1] == "violated" && !r[4].is_empty()));
}

#[test]
fn passing_rows_have_empty_witness() {
    let out = run(Command::Sweep, &load("sweep_log_box.toml"), &quiet()).unwrap();
    for r in data_rows(&out.csv) {
        assert_eq!(r[1], "pass");
        assert!(r[4..].iter().all(|c| c.is_empty()));
    }
}

#[test]
fn malformed_t_range_exits_1() {
    let mut cfg = load("sweep_psi_3_4.toml");
    cfg.sweep.t_min = 10.0;
    cfg.sweep.t_max = 1.0;
    assert_eq!(run(Command::Sweep, &cfg, &quiet()).unwrap_err().exit_code(), 1);
}

#[test]
fn undefined_at_every_t_exits_3() {
    let mut cfg = load("sweep_psi_3_4.toml");
    cfg.datum.amp = 2.0;
    cfg.sweep.t_min = 1e-5;
    cfg.sweep.t_max = 0.1;
    cfg.sweep.points = 20;
    let out = run(Command::Sweep, &cfg, &quiet()).unwrap();
    assert_eq!(out.code, 3);
    assert!(out.csv.contains("undefined_domain at every t"));
}

#[test]
fn ray_probe_is_negative_beyond_100() {
    let out = run(Command::Probe, &load("probe_ray_psi_1_4.toml"), &quiet()).unwrap();
    let rows = data_rows(&out.csv);
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!(r[2], "I");
        assert!(r[3].parse::<f64>().unwrap() < 0.0);
    }
}

#[test]
fn parabolic_probe_tends_to_mass_profile() {
    let out = run(Command::Probe, &load("probe_parabolic.toml"), &quiet()).unwrap();
    let rows = data_rows(&out.csv);
    let last: Vec<_> = rows.iter().filter(|r| r[0] == "10000" && r[2] == "U").collect();
    assert_eq!(last.len(), 3);
    let r1 = last[2][3].parse::<f64>().unwrap();
    assert!((r1 - (-1f64).exp()).abs() <= 0.01 * (-1f64).exp(), "{r1}");
}

#[test]
fn u_above_cap_is_flagged() {
    let out = run(Command::Probe, &load("probe_u_cap.toml"), &quiet()).unwrap();
    assert_eq!(out.code, 0);
    let rows = data_rows(&out.csv);
    assert!(rows.iter().any(|r| r[3] == "undefined"));
    assert!(rows.iter().filter(|r| r[0] == "100").all(|r| r[3] != "undefined"));
}

#[test]
fn compare_and_check_a() {
    let out = run(Command::Compare, &load("compare_psi.toml"), &quiet()).unwrap();
    assert!(out.text.contains("F2_stronger"));
    let out = run(Command::CheckA, &load("check_a_box.toml"), &quiet()).unwrap();
    assert!(out.text.contains("condition (A): pass"));
    assert_eq!(data_rows(&out.csv)[0].len(), 6);
}

#[test]
fn header_echoes_config_and_timestamp_is_optional() {
    let cfg = load("probe_ray_psi_1_4.toml");
    let opts = Options {
        no_timestamp: false,
        quadrature_order: Some(48),
    };
    let stamped = run(Command::Probe, &cfg, &opts).unwrap().csv;
    assert!(stamped.lines().any(|l| l.starts_with("# timestamp:")));
    assert!(stamped.contains("# quadrature_order = 48"));
    assert!(stamped.starts_with("# fconc "));
    let plain = run(Command::Probe, &cfg, &Options { no_timestamp: true, quadrature_order: Some(48) }).unwrap().csv;
    assert!(!plain.contains("# timestamp:"));
    assert_eq!(strip_timestamp(&stamped), plain);
}

#[test]
fn binary_flags() {
    let dir = std::env::temp_dir().join(format!("fconc-cli-flags-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("ray.csv");
    let status = bin()
        .args(["probe", "--threads", "2", "--quadrature-order", "32", "--no-timestamp", "--config"])
        .arg(configs_dir().join("probe_ray_psi_1_4.toml"))
        .arg("--out")
        .arg(&out_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.contains("# quadrature_order = 32"));
    assert!(!csv.contains("timestamp"));
}
