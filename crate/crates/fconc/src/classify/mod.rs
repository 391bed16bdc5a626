//! Decision tables for eventual F-concavity of the rescaled heat flow,
//! in terms of kappa_F^*, the growth of sigma_F and the interval of F.

use std::fmt;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::fconcavity::{
    check_sampling_grid, compare_strength, default_r_grid, make_power_concavity,
    make_power_log_concavity, AdmissibleFunction, DerivedTransform, Growth, Rigor, Strength,
};
use crate::grid;

pub type Function = AdmissibleFunction<f64>;

/// Sampled kappa_* within this distance of 1/2 is treated as 1/2.
pub const KAPPA_SLACK: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassVsA {
    Less,
    NotLess,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatumClass {
    L,
    LA,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub f: Function,
    pub n: usize,
    pub d: f64,
    pub mass_vs_a: MassVsA,
    pub datum_class: DatumClass,
}

impl Scenario {
    pub fn new(f: Function, n: usize, d: f64) -> Self {
        Scenario {
            f,
            n,
            d,
            mass_vs_a: MassVsA::NotApplicable,
            datum_class: DatumClass::LA,
        }
    }

    pub fn with_mass(mut self, m: MassVsA) -> Self {
        self.mass_vs_a = m;
        self
    }

    pub fn with_class(mut self, c: DatumClass) -> Self {
        self.datum_class = c;
        self
    }

    pub fn a(&self) -> Ext<f64> {
        self.f.a()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InconsistentScenario(m));
        if self.n == 0 {
            return bad("dimension must be positive".into());
        }
        if !self.d.is_finite() {
            return bad("d must be finite".into());
        }
        let half_n = 0.5 * self.n as f64;
        let finite = self.a().is_finite();
        if self.d < half_n && !finite {
            return bad(format!("d={} < n/2 needs F with finite a", self.d));
        }
        if self.d > half_n && finite {
            return bad(format!("d={} > n/2 needs a = inf", self.d));
        }
        if self.d == half_n && finite && self.mass_vs_a != MassVsA::Less {
            return bad("d = n/2 with finite a needs mass < a".into());
        }
        Ok(())
    }
}

/// Conditions on F that decide the kappa_* = 1/2 column and the critical rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cond {
    /// limsup (sigma_F(r) - log(r)/4) < inf
    QuarterLogBound,
    /// sigma_F(r) - (n/2 - d) log(r)/2 -> -inf
    LogGapDivergence,
    /// kappa_F <= 1/2 on (0, inf) and sigma_F -> -inf
    CriticalDivergence,
    /// kappa_F <= 1/2 on (0, inf)
    KappaLeHalf,
    /// F-concavity is weaker than log-concavity on [0, inf)
    WeakerThanLog,
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cond::QuarterLogBound => "limsup(sigma_F - log(r)/4) < inf",
            Cond::LogGapDivergence => "sigma_F - (n/2-d)log(r)/2 -> -inf",
            Cond::CriticalDivergence => "kappa_F <= 1/2 and sigma_F -> -inf",
            Cond::KappaLeHalf => "kappa_F <= 1/2",
            Cond::WeakerThanLog => "weaker than log-concavity",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondOutcome {
    Holds,
    Fails,
    Undecidable,
}

impl fmt::Display for CondOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CondOutcome::Holds => "holds",
            CondOutcome::Fails => "fails",
            CondOutcome::Undecidable => "undecidable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    YesAll,
    No,
    /// Yes iff `cond`; `resolved` is the value of the condition.
    YesIff { cond: Cond, resolved: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub rigor: Rigor,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        match self.outcome {
            Outcome::YesAll => true,
            Outcome::No => false,
            Outcome::YesIff { resolved, .. } => resolved,
        }
    }

    pub fn short(&self) -> &'static str {
        if self.is_yes() {
            "Yes"
        } else {
            "No"
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.outcome {
            Outcome::YesAll => write!(f, "Yes")?,
            Outcome::No => write!(f, "No")?,
            Outcome::YesIff { cond, resolved } => {
                write!(f, "{} (iff {cond})", if resolved { "Yes" } else { "No" })?
            }
        }
        write!(f, " [{}]", self.rigor)
    }
}

/// sigma-route coefficient c in sigma_F(r) - c log r.
fn log_coefficient(cond: Cond, n: usize, d: f64) -> f64 {
    match cond {
        Cond::QuarterLogBound => 0.25,
        Cond::LogGapDivergence => 0.5 * (0.5 * n as f64 - d),
        _ => 0.0,
    }
}

/// Least-squares slope of y against log r over the top two decades, times log 100.
fn trend(points: &[(f64, f64)]) -> f64 {
    let top = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let sel: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 >= top / 100.0 * (1.0 - 1e-12))
        .map(|&(r, y)| (r.ln(), y))
        .collect();
    let m = sel.len() as f64;
    let mx = sel.iter().map(|p| p.0).sum::<f64>() / m;
    let my = sel.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = sel.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = sel.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx * 100f64.ln()
}

/// Strength comparisons on [0, inf) sample r in [-40, 40]; the default
/// r grid starts at 1e2 and would leave only r = 0.
fn half_line_grid() -> Vec<f64> {
    grid::geometric(1e-2, 40.0, 64)
}

/// Which functional the growth conditions are phrased in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Sigma,
    /// nu_F = sigma_F / kappa_F, about 2 sigma_F near kappa = 1/2: thresholds double.
    Nu,
}

fn growth_outcome(g: Growth, needs_divergence: bool) -> CondOutcome {
    match (g, needs_divergence) {
        (Growth::NegInf, _) => CondOutcome::Holds,
        (Growth::Zero, false) => CondOutcome::Holds,
        (Growth::Zero, true) => CondOutcome::Fails,
        (Growth::PosInf, _) => CondOutcome::Fails,
    }
}

fn sampled_values(tr: &DerivedTransform<f64>, r_grid: &[f64], route: Route) -> Result<Vec<(f64, f64)>> {
    r_grid
        .iter()
        .map(|&r| {
            let v = match route {
                Route::Sigma => tr.sigma(r)?,
                Route::Nu => tr.nu(r)?,
            };
            match v {
                Ext::Finite(s) => Ok((r, s)),
                other => Err(Error::InvalidParameter(format!("{route:?} is {other} at r={r}"))),
            }
        })
        .collect()
}

/// kappa_F <= 1/2 on a wide sample of (0, inf).
fn kappa_le_half_sampled(tr: &DerivedTransform<f64>, r_grid: &[f64]) -> Result<CondOutcome> {
    let top = r_grid.iter().copied().fold(1.0f64, f64::max);
    let mut rs = grid::geometric(1e-3, top, 200);
    rs.extend_from_slice(r_grid);
    let mut worst = f64::NEG_INFINITY;
    for r in rs {
        let k = tr.kappa(r)?.to_scalar();
        worst = worst.max(k);
    }
    Ok(if worst <= 0.5 + 1e-12 {
        CondOutcome::Holds
    } else if worst > 0.5 + KAPPA_SLACK {
        CondOutcome::Fails
    } else {
        CondOutcome::Undecidable
    })
}

fn both(a: CondOutcome, b: CondOutcome) -> CondOutcome {
    use CondOutcome::*;
    match (a, b) {
        (Fails, _) | (_, Fails) => Fails,
        (Holds, Holds) => Holds,
        _ => Undecidable,
    }
}

/// Decides a growth condition, exactly from a closed-form profile when there is
/// one, otherwise by the trend of sigma_F - c log r (or nu_F - 2c log r) over the
/// top two decades of `r_grid`.
pub fn check_condition_route(
    cond: Cond,
    tr: &DerivedTransform<f64>,
    n: usize,
    d: f64,
    r_grid: &[f64],
    route: Route,
) -> Result<(CondOutcome, Rigor)> {
    if cond == Cond::WeakerThanLog {
        let log = make_power_concavity(0.0);
        let s = compare_strength(&tr.base, &log, &half_line_grid())?;
        let rigor = if tr.base.exact_profile().is_some() { Rigor::Exact } else { Rigor::Sampled };
        let weaker = matches!(s, Strength::F2Stronger | Strength::Equivalent);
        return Ok((if weaker { CondOutcome::Holds } else { CondOutcome::Fails }, rigor));
    }
    if cond == Cond::LogGapDivergence && !(d < 0.5 * n as f64) {
        return Err(Error::InvalidParameter("this condition needs d < n/2".into()));
    }
    if let Some(p) = tr.base.exact_profile() {
        let g = match route {
            Route::Sigma => p.sigma_growth,
            Route::Nu => p.nu_growth,
        };
        let kappa = if p.kappa_le_half { CondOutcome::Holds } else { CondOutcome::Fails };
        let out = match cond {
            Cond::QuarterLogBound | Cond::LogGapDivergence => growth_outcome(g, false),
            Cond::CriticalDivergence => both(kappa, growth_outcome(g, true)),
            Cond::KappaLeHalf => kappa,
            Cond::WeakerThanLog => unreachable!(),
        };
        return Ok((out, Rigor::Exact));
    }
    check_sampling_grid(r_grid)?;
    let scale = match route {
        Route::Sigma => 1.0,
        Route::Nu => 2.0,
    };
    let drift = |c: f64| -> Result<f64> {
        let pts = sampled_values(tr, r_grid, route)?;
        let ys: Vec<(f64, f64)> = pts.iter().map(|&(r, s)| (r, s - scale * c * r.ln())).collect();
        Ok(trend(&ys))
    };
    let out = match cond {
        Cond::QuarterLogBound => {
            let dr = drift(0.25)?;
            if dr <= 0.25 * scale {
                CondOutcome::Holds
            } else if dr >= 0.75 * scale {
                CondOutcome::Fails
            } else {
                CondOutcome::Undecidable
            }
        }
        Cond::LogGapDivergence | Cond::CriticalDivergence => {
            let dr = drift(log_coefficient(cond, n, d))?;
            let g = if dr <= -0.75 * scale {
                CondOutcome::Holds
            } else if dr >= -0.25 * scale {
                CondOutcome::Fails
            } else {
                CondOutcome::Undecidable
            };
            if cond == Cond::CriticalDivergence {
                both(kappa_le_half_sampled(tr, r_grid)?, g)
            } else {
                g
            }
        }
        Cond::KappaLeHalf => kappa_le_half_sampled(tr, r_grid)?,
        Cond::WeakerThanLog => unreachable!(),
    };
    Ok((out, Rigor::Sampled))
}

pub fn check_condition(
    cond: Cond,
    tr: &DerivedTransform<f64>,
    n: usize,
    d: f64,
    r_grid: &[f64],
) -> Result<CondOutcome> {
    Ok(check_condition_route(cond, tr, n, d, r_grid, Route::Sigma)?.0)
}

/// Column of the kappa_* table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaColumn {
    Below,
    Half,
    Above,
}

pub fn kappa_column(tr: &DerivedTransform<f64>, r_grid: &[f64]) -> Result<(KappaColumn, Ext<f64>, Rigor)> {
    let (k, rigor) = tr.kappa_star_estimate(r_grid)?;
    let half = Ext::Finite(0.5);
    let col = match rigor {
        Rigor::Exact => {
            if k < half {
                KappaColumn::Below
            } else if k == half {
                KappaColumn::Half
            } else {
                KappaColumn::Above
            }
        }
        Rigor::Sampled => match k {
            Ext::Finite(v) if (v - 0.5).abs() <= KAPPA_SLACK => KappaColumn::Half,
            _ if k < half => KappaColumn::Below,
            _ => KappaColumn::Above,
        },
    };
    Ok((col, k, rigor))
}

fn resolve(cond: Cond, out: CondOutcome, rigor: Rigor, notes: Vec<String>) -> Result<Verdict> {
    match out {
        CondOutcome::Undecidable => Err(Error::Undecidable(format!(
            "sampled statistic for '{cond}' is within the decision slack"
        ))),
        _ => Ok(Verdict {
            outcome: Outcome::YesIff {
                cond,
                resolved: out == CondOutcome::Holds,
            },
            rigor,
            notes,
        }),
    }
}

const SOME_DATUM_NOTE: &str =
    "fails for some datum; the thin box l*chi((-1/(2l),0)x(-1,0)^(n-1)) is the witness recipe";

/// Eventual F-concavity of U_d[phi] for all phi in the scenario's class.
pub fn classify(s: &Scenario) -> Result<Verdict> {
    classify_with_grid(s, &default_r_grid())
}

pub fn classify_with_grid(s: &Scenario, r_grid: &[f64]) -> Result<Verdict> {
    s.validate()?;
    let tr = DerivedTransform::new(s.f.clone());
    let half_n = 0.5 * s.n as f64;
    if !s.a().is_finite() {
        let (out, rigor) = check_condition_route(Cond::WeakerThanLog, &tr, s.n, s.d, r_grid, Route::Sigma)?;
        let notes = if out == CondOutcome::Fails {
            vec![SOME_DATUM_NOTE.to_string()]
        } else {
            Vec::new()
        };
        return resolve(Cond::WeakerThanLog, out, rigor, notes);
    }
    let (col, k, rigor) = kappa_column(&tr, r_grid)?;
    let mut notes = vec![format!("kappa_* = {k}")];
    if s.d < half_n {
        match col {
            KappaColumn::Below => Ok(Verdict {
                outcome: Outcome::YesAll,
                rigor,
                notes,
            }),
            KappaColumn::Above => {
                notes.push(SOME_DATUM_NOTE.to_string());
                Ok(Verdict {
                    outcome: Outcome::No,
                    rigor,
                    notes,
                })
            }
            KappaColumn::Half => {
                if s.datum_class == DatumClass::L {
                    return Err(Error::Undecidable(
                        "kappa_* = 1/2 is only characterized for data satisfying condition (A)".into(),
                    ));
                }
                let cond = if s.d < 0.5 * (s.n as f64 - 1.0) {
                    Cond::QuarterLogBound
                } else {
                    Cond::LogGapDivergence
                };
                let (out, r2) = check_condition_route(cond, &tr, s.n, s.d, r_grid, Route::Sigma)?;
                if out == CondOutcome::Fails {
                    notes.push(SOME_DATUM_NOTE.to_string());
                }
                resolve(cond, out, worst(rigor, r2), notes)
            }
        }
    } else {
        // d = n/2, finite a, mass < a
        let cond = match col {
            KappaColumn::Below => Cond::KappaLeHalf,
            KappaColumn::Half => {
                if s.datum_class == DatumClass::L {
                    return Err(Error::Undecidable(
                        "kappa_* = 1/2 is only characterized for data satisfying condition (A)".into(),
                    ));
                }
                Cond::CriticalDivergence
            }
            KappaColumn::Above => {
                notes.push(SOME_DATUM_NOTE.to_string());
                return Ok(Verdict {
                    outcome: Outcome::No,
                    rigor,
                    notes,
                });
            }
        };
        let (out, r2) = check_condition_route(cond, &tr, s.n, s.d, r_grid, Route::Sigma)?;
        if out == CondOutcome::Fails {
            notes.push(SOME_DATUM_NOTE.to_string());
        }
        resolve(cond, out, worst(rigor, r2), notes)
    }
}

fn worst(a: Rigor, b: Rigor) -> Rigor {
    if a == Rigor::Exact && b == Rigor::Exact {
        Rigor::Exact
    } else {
        Rigor::Sampled
    }
}

/// One table cell: a verdict or the reason there is none.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Verdict(Verdict),
    Undecidable(String),
    Inconsistent(String),
}

impl Cell {
    pub fn from_result(r: Result<Verdict>) -> Result<Cell> {
        match r {
            Ok(v) => Ok(Cell::Verdict(v)),
            Err(Error::Undecidable(m)) => Ok(Cell::Undecidable(m)),
            Err(Error::InconsistentScenario(m)) => Ok(Cell::Inconsistent(m)),
            Err(e) => Err(e),
        }
    }

    pub fn short(&self) -> &str {
        match self {
            Cell::Verdict(v) => v.short(),
            Cell::Undecidable(_) => "undecidable",
            Cell::Inconsistent(_) => "n/a",
        }
    }

    pub fn rigor(&self) -> Option<Rigor> {
        match self {
            Cell::Verdict(v) => Some(v.rigor),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Symbolic rule per cell, when the table has one.
    pub rules: Vec<Vec<String>>,
    pub cells: Vec<Vec<Cell>>,
}

impl Table {
    pub fn undecidable_cells(&self) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        for (i, row) in self.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if let Cell::Undecidable(m) = c {
                    out.push((self.row_labels[i].clone(), self.col_labels[j].clone(), m.clone()));
                }
            }
        }
        out
    }

    /// Aligned plain text; rules (when present) follow the resolved verdicts.
    pub fn render(&self) -> String {
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut head = vec![self.title.clone()];
        head.extend(self.col_labels.iter().cloned());
        rows.push(head);
        for (i, label) in self.row_labels.iter().enumerate() {
            let mut r = vec![label.clone()];
            for c in &self.cells[i] {
                let mut s = c.short().to_string();
                if let Some(Rigor::Sampled) = c.rigor() {
                    s.push_str(" (sampled)");
                }
                r.push(s);
            }
            rows.push(r);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for r in &rows {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            out.push_str(line.join(" | ").trim_end());
            out.push('\n');
        }
        if !self.rules.is_empty() {
            out.push_str("rules:\n");
            for (i, label) in self.row_labels.iter().enumerate() {
                for (j, col) in self.col_labels.iter().enumerate() {
                    out.push_str(&format!("  {label} / {col}: {}\n", self.rules[i][j]));
                }
            }
        }
        out
    }
}

/// Verdicts for each (d, F) with the given dimension.
pub fn table(
    n: usize,
    d_list: &[f64],
    f_list: &[Function],
    mass_vs_a: MassVsA,
    class: DatumClass,
) -> Result<Table> {
    if f_list.is_empty() {
        return Err(Error::InvalidParameter("no functions".into()));
    }
    let mut cells = Vec::new();
    for &d in d_list {
        let mut row = Vec::new();
        for f in f_list {
            let s = Scenario::new(f.clone(), n, d).with_mass(mass_vs_a).with_class(class);
            row.push(Cell::from_result(classify(&s))?);
        }
        cells.push(row);
    }
    Ok(Table {
        title: format!("n={n}"),
        row_labels: d_list.iter().map(|d| format!("d={d}")).collect(),
        col_labels: f_list.iter().map(|f| f.name().to_string()).collect(),
        rules: Vec::new(),
        cells,
    })
}

/// The beta-log-concavity table: rows 2d<n and 2d=n with mass < 1, columns
/// beta > 1/2, beta = 1/2, beta < 1/2 (represented by 3/4, 1/2, 1/4).
pub fn beta_table() -> Result<Table> {
    let fs: Vec<Function> = [0.75, 0.5, 0.25]
        .iter()
        .map(|&b| make_power_log_concavity(b))
        .collect::<Result<_>>()?;
    let rows = [("2d<n", 1usize, 0.0, MassVsA::NotApplicable), ("2d=n, M<1", 1, 0.5, MassVsA::Less)];
    let mut cells = Vec::new();
    for &(_, n, d, m) in &rows {
        let mut row = Vec::new();
        for f in &fs {
            row.push(Cell::from_result(classify(&Scenario::new(f.clone(), n, d).with_mass(m)))?);
        }
        cells.push(row);
    }
    Ok(Table {
        title: "beta-log-concavity".into(),
        row_labels: rows.iter().map(|r| r.0.to_string()).collect(),
        col_labels: vec!["beta>1/2".into(), "beta=1/2".into(), "beta<1/2".into()],
        rules: Vec::new(),
        cells,
    })
}

/// The kappa_* table: symbolic rules with verdicts for representative built-ins.
/// Columns kappa_* < 1/2, = 1/2, > 1/2 use psi_{3/4}, psi_{1/2}, psi_{1/4} in the
/// finite-a rows and phi_{-1}, phi_0, phi_1 in the a = inf row.
pub fn kappa_table() -> Result<Table> {
    let psi: Vec<Function> = [0.75, 0.5, 0.25]
        .iter()
        .map(|&b| make_power_log_concavity(b))
        .collect::<Result<_>>()?;
    let phi: Vec<Function> = [-1.0, 0.0, 1.0].iter().map(|&a| make_power_concavity(a)).collect();
    let weaker = format!("Yes iff {}", Cond::WeakerThanLog);
    let rows: [(&str, usize, f64, MassVsA, &Vec<Function>, [String; 3]); 4] = [
        (
            "2d<n-1 (n=3, d=0)",
            3,
            0.0,
            MassVsA::NotApplicable,
            &psi,
            ["Yes".into(), format!("Yes iff {}", Cond::QuarterLogBound), "No".into()],
        ),
        (
            "n-1<=2d<n (n=1, d=0)",
            1,
            0.0,
            MassVsA::NotApplicable,
            &psi,
            ["Yes".into(), format!("Yes iff {}", Cond::LogGapDivergence), "No".into()],
        ),
        (
            "2d=n, M<a (n=1, d=1/2)",
            1,
            0.5,
            MassVsA::Less,
            &psi,
            [
                format!("Yes iff {}", Cond::KappaLeHalf),
                format!("Yes iff {}", Cond::CriticalDivergence),
                "No".into(),
            ],
        ),
        (
            "2d>=n, a=inf (n=1, d=1)",
            1,
            1.0,
            MassVsA::NotApplicable,
            &phi,
            [weaker.clone(), weaker.clone(), weaker],
        ),
    ];
    let mut cells = Vec::new();
    let mut rules = Vec::new();
    for (_, n, d, m, fs, rule) in &rows {
        let mut row = Vec::new();
        for f in fs.iter() {
            row.push(Cell::from_result(classify(&Scenario::new(f.clone(), *n, *d).with_mass(*m)))?);
        }
        cells.push(row);
        rules.push(rule.to_vec());
    }
    Ok(Table {
        title: "kappa_*".into(),
        row_labels: rows.iter().map(|r| r.0.to_string()).collect(),
        col_labels: vec!["kappa*<1/2".into(), "kappa*=1/2".into(), "kappa*>1/2".into()],
        rules,
        cells,
    })
}
