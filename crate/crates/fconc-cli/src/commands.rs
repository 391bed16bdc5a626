use fconc::checker::{
    compute_j, compute_psi_d, eventual_sweep, probe_parabolic, probe_ray_i, Verdict as Cv, Witness,
};
use fconc::classify::{beta_table, kappa_table, table, Cell, Table};
use fconc::fconcavity::{compare_strength, DerivedTransform};
use fconc::initialdata::{check_condition_a, default_supporting_pairs};
use fconc::Function;

use crate::config::{ProbeKind, ScenarioConfig, TableKind};
use crate::csv::{num, CsvDoc};
use crate::{CliError, EXIT_DOMAIN, EXIT_OK, EXIT_UNDECIDABLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Sweep,
    Probe,
    Compare,
    CheckA,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Sweep => "sweep",
            Command::Probe => "probe",
            Command::Compare => "compare",
            Command::CheckA => "check-a",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub no_timestamp: bool,
    pub quadrature_order: Option<usize>,
}

/// Human-readable text, the CSV document, and the exit code.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub csv: String,
    pub code: i32,
}

pub fn run(cmd: Command, cfg: &ScenarioConfig, opts: &Options) -> Result<Output, CliError> {
    let mut cfg = cfg.clone();
    if let Some(q) = opts.quadrature_order {
        cfg.sweep.quadrature_order = q;
    }
    let doc = CsvDoc::new(cmd.name(), &cfg.to_toml(), !opts.no_timestamp);
    match cmd {
        Command::Classify => classify(&cfg, doc),
        Command::Sweep => sweep(&cfg, doc),
        Command::Probe => probe(&cfg, doc),
        Command::Compare => compare(&cfg, doc),
        Command::CheckA => check_a(&cfg, doc),
    }
}

fn classify(cfg: &ScenarioConfig, mut doc: CsvDoc) -> Result<Output, CliError> {
    let spec = &cfg.classify;
    let tables: Vec<Table> = match spec.table {
        TableKind::All => vec![beta_table()?, kappa_table()?],
        TableKind::Beta => vec![beta_table()?],
        TableKind::Kappa => vec![kappa_table()?],
        TableKind::Custom => {
            if spec.functions.is_empty() {
                return Err(CliError::Config("no functions".into()));
            }
            let fs = spec
                .functions
                .iter()
                .map(|f| f.build())
                .collect::<Result<Vec<Function>, _>>()?;
            vec![table(spec.n, &spec.d_list, &fs, spec.mass_vs_a.into(), spec.datum_class.into())?]
        }
    };
    doc.row(&["table", "row", "column", "verdict", "rigor", "rule"]);
    let mut text = String::new();
    let mut undecidable = Vec::new();
    for t in &tables {
        text.push_str(&t.render());
        text.push('\n');
        for (i, row) in t.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let rule = t.rules.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_default();
                let rigor = c.rigor().map(|r| r.to_string()).unwrap_or_default();
                doc.row(&[
                    t.title.clone(),
                    t.row_labels[i].clone(),
                    t.col_labels[j].clone(),
                    c.short().to_string(),
                    rigor,
                    rule,
                ]);
            }
        }
        for (r, c, m) in t.undecidable_cells() {
            undecidable.push(format!("{}: {r} / {c}: {m}", t.title));
        }
        for (i, row) in t.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if let Cell::Inconsistent(m) = c {
                    text.push_str(&format!("n/a {} / {}: {m}\n", t.row_labels[i], t.col_labels[j]));
                }
            }
        }
    }
    let code = if undecidable.is_empty() {
        EXIT_OK
    } else {
        text.push_str("undecidable cells:\n");
        for u in &undecidable {
            text.push_str(&format!("  {u}\n"));
        }
        EXIT_UNDECIDABLE
    };
    Ok(Output {
        text,
        csv: doc.finish(),
        code,
    })
}

fn witness_fields(n: usize, w: Option<&Witness>) -> Vec<String> {
    let mut x = vec![String::new(); n];
    let mut xi = vec![String::new(); n];
    let mut y = vec![String::new(); n];
    let mut mu = String::new();
    match w {
        Some(Witness::Direction { x: wx, xi: wxi }) => {
            x = wx.iter().map(|v| num(*v)).collect();
            xi = wxi.iter().map(|v| num(*v)).collect();
        }
        Some(Witness::Pair { x: wx, y: wy, mu: wmu }) => {
            x = wx.iter().map(|v| num(*v)).collect();
            y = wy.iter().map(|v| num(*v)).collect();
            mu = num(*wmu);
        }
        None => {}
    }
    let mut out = x;
    out.extend(xi);
    out.extend(y);
    out.push(mu);
    out
}

fn coord_headers(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn sweep(cfg: &ScenarioConfig, mut doc: CsvDoc) -> Result<Output, CliError> {
    let (field, f) = cfg.build_field()?;
    let grid = cfg.sweep.t_grid()?;
    let res = eventual_sweep(&field, &f, &grid, &cfg.sweep.policy())?;
    let n = field.n();
    let mut head: Vec<String> = ["t", "verdict", "margin", "test_kind"].iter().map(|s| s.to_string()).collect();
    head.extend(coord_headers("witness_x", n));
    head.extend(coord_headers("witness_xi", n));
    head.extend(coord_headers("witness_y", n));
    head.push("witness_mu".into());
    doc.row(&head);
    for r in &res.reports {
        let mut row = vec![
            num(r.t),
            r.verdict.to_string(),
            num(r.margin),
            r.test_kind.to_string(),
        ];
        let w = if r.verdict == Cv::Violated { r.witness.as_ref() } else { None };
        row.extend(witness_fields(n, w));
        doc.row(&row);
    }
    let summary = res.summary();
    doc.comment(&format!("summary: {summary}"));
    let all_undefined = res.reports.iter().all(|r| r.verdict == Cv::UndefinedDomain);
    Ok(Output {
        text: format!("{} on {}: {summary}\n", f.name(), field.phi().family()),
        csv: doc.finish(),
        code: if all_undefined { EXIT_DOMAIN } else { EXIT_OK },
    })
}

/// Domain failures at a single probe point become "undefined" rows.
fn cell<T>(r: fconc::Result<T>, show: impl Fn(T) -> String) -> Result<String, CliError> {
    match r {
        Ok(v) => Ok(show(v)),
        Err(e) => match CliError::from(e) {
            CliError::Domain(_) => Ok("undefined".into()),
            other => Err(other),
        },
    }
}

fn axis_point(n: usize, x1: f64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[0] = x1;
    x
}

fn probe(cfg: &ScenarioConfig, mut doc: CsvDoc) -> Result<Output, CliError> {
    let (field, f) = cfg.build_field()?;
    let spec = &cfg.probe;
    if spec.t_list.is_empty() || spec.t_list.iter().any(|t| !(*t > 0.0)) {
        return Err(CliError::Config("probe.t_list must be nonempty and positive".into()));
    }
    let n = field.n();
    let mut head = vec!["t".to_string()];
    head.extend(coord_headers("x", n));
    head.push("quantity".into());
    head.push("value".into());
    doc.row(&head);
    let mut rows: Vec<(f64, Vec<f64>, String, String)> = Vec::new();
    let e1 = axis_point(n, 1.0);
    for &t in &spec.t_list {
        match spec.kind {
            ProbeKind::RayI => {
                let x = axis_point(n, t);
                let r = probe_ray_i(&field, &f, &[t]);
                let (q, v) = match r {
                    Ok(p) => (p.kind.to_string(), num(p.points[0].value)),
                    Err(e) => ("I".to_string(), cell::<f64>(Err(e), num)?),
                };
                rows.push((t, x, q, v));
            }
            ProbeKind::JAxis | ProbeKind::PsiAxis | ProbeKind::UAxis => {
                for &c in &spec.x_over_t {
                    let x = axis_point(n, c * t);
                    let (q, v) = match spec.kind {
                        ProbeKind::JAxis => ("J", cell(compute_j(&field, &f, &x, t, &e1), num)?),
                        ProbeKind::PsiAxis => ("psi", cell(compute_psi_d(&field, &x, t, &f), |e| e.to_string())?),
                        _ => ("U", cell(field.eval_u(&x, t), num)?),
                    };
                    rows.push((t, x, q.to_string(), v));
                }
            }
            ProbeKind::Parabolic => {
                for &r in &spec.r_list {
                    match probe_parabolic(&field, &f, t, r, spec.k) {
                        Ok(p) => {
                            rows.push((t, p.x.clone(), "U".into(), num(p.u)));
                            rows.push((t, p.x, "target".into(), num(p.target)));
                        }
                        Err(e) => {
                            let v = cell::<f64>(Err(e), num)?;
                            rows.push((t, vec![f64::NAN; n], "U".into(), v));
                        }
                    }
                }
            }
        }
    }
    let mut undefined = 0;
    for (t, x, q, v) in &rows {
        if v == "undefined" {
            undefined += 1;
        }
        let mut row = vec![num(*t)];
        row.extend(x.iter().map(|c| if c.is_nan() { String::new() } else { num(*c) }));
        row.push(q.clone());
        row.push(v.clone());
        doc.row(&row);
    }
    let text = format!("{} probe, {} rows, {undefined} undefined\n", spec.kind.name(), rows.len());
    Ok(Output {
        text,
        csv: doc.finish(),
        code: if undefined == rows.len() { EXIT_DOMAIN } else { EXIT_OK },
    })
}

fn compare(cfg: &ScenarioConfig, mut doc: CsvDoc) -> Result<Output, CliError> {
    let f1 = cfg.function.build()?;
    let f2 = cfg.compare.other.build()?;
    let c = &cfg.compare;
    if !(c.r_min > 0.0 && c.r_min < c.r_max) || c.r_points < 2 {
        return Err(CliError::Config("compare needs 0 < r_min < r_max and r_points >= 2".into()));
    }
    let grid = fconc::grid::geometric(c.r_min, c.r_max, c.r_points);
    let s = compare_strength(&f1, &f2, &grid)?;
    let (t1, t2) = (DerivedTransform::new(f1.clone()), DerivedTransform::new(f2.clone()));
    doc.row(&["r", "kappa_f1", "kappa_f2"]);
    for &r in &grid {
        doc.row(&[num(r), cell(t1.kappa(r), |k| k.to_string())?, cell(t2.kappa(r), |k| k.to_string())?]);
    }
    doc.comment(&format!("strength: {s}"));
    Ok(Output {
        text: format!("{} vs {}: {s}\n", f1.name(), f2.name()),
        csv: doc.finish(),
        code: EXIT_OK,
    })
}

fn check_a(cfg: &ScenarioConfig, mut doc: CsvDoc) -> Result<Output, CliError> {
    let phi = cfg.datum.build(cfg.field.n)?;
    let c = &cfg.check_a;
    if !(c.k_min >= 1.0 && c.k_min < c.k_max) || c.k_points < 2 {
        return Err(CliError::Config("check_a needs 1 <= k_min < k_max and k_points >= 2".into()));
    }
    let grid = fconc::grid::geometric(c.k_min, c.k_max, c.k_points);
    let pairs = default_supporting_pairs(&phi);
    let rep = check_condition_a(&phi, &grid, &pairs, cfg.sweep.quadrature_order)?;
    let n = phi.n();
    let mut head = vec!["k".to_string()];
    head.extend(coord_headers("xi", n));
    head.extend(coord_headers("z", n));
    head.push("ratio".into());
    doc.row(&head);
    for s in &rep.samples {
        let mut row = vec![num(s.k)];
        row.extend(s.xi.iter().map(|v| num(*v)));
        row.extend(s.z.iter().map(|v| num(*v)));
        row.push(num(s.ratio));
        doc.row(&row);
    }
    let verdict = if rep.pass { "pass" } else { "fail" };
    let summary = format!(
        "condition (A): {verdict}, fitted C = {}, worst ratio {} at k = {}",
        rep.fitted_c, rep.worst.ratio, rep.worst.k
    );
    doc.comment(&summary);
    Ok(Output {
        text: format!("{summary}\n"),
        csv: doc.finish(),
        code: EXIT_OK,
    })
}

