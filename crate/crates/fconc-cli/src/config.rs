//! Scenario files: TOML with fixed sections, unknown keys rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use fconc::checker::SweepPolicy;
use fconc::classify::{DatumClass, MassVsA};
use fconc::fconcavity::{
    build_floored_hot_f, make_hot_concavity, make_power_concavity, make_power_log_concavity,
};
use fconc::initialdata::{make_alpha_bump, make_ball, make_box, make_thin_box, scaled};
use fconc::{Datum, Ext, Field, Function};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub function: FunctionSpec,
    pub datum: DatumSpec,
    pub field: FieldSpec,
    pub sweep: SweepSpec,
    pub probe: ProbeSpec,
    pub classify: ClassifySpec,
    pub compare: CompareSpec,
    pub check_a: CheckASpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionFamily {
    /// Phi_alpha, param = alpha
    Power,
    /// Psi_beta on [0, 1), param = beta
    PowerLog,
    Hot,
    /// hot with sigma floored at k log r, param = k
    FlooredHot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FunctionSpec {
    pub family: FunctionFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    /// Restrict a power function to [0, a).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

impl Default for FunctionSpec {
    fn default() -> Self {
        FunctionSpec {
            family: FunctionFamily::PowerLog,
            param: Some(0.75),
            a: None,
        }
    }
}

impl FunctionSpec {
    fn param(&self, what: &str) -> Result<f64, CliError> {
        self.param
            .ok_or_else(|| CliError::Config(format!("function.param ({what}) is required for {:?}", self.family)))
    }

    pub fn build(&self) -> Result<Function, CliError> {
        let f = match self.family {
            FunctionFamily::Power => make_power_concavity(self.param("alpha")?),
            FunctionFamily::PowerLog => make_power_log_concavity(self.param("beta")?)?,
            FunctionFamily::Hot => make_hot_concavity(),
            FunctionFamily::FlooredHot => build_floored_hot_f(self.param("k")?)?,
        };
        match self.a {
            None => Ok(f),
            Some(a) if self.family == FunctionFamily::Power => Ok(f.restricted(a)?),
            Some(_) => Err(CliError::Config("function.a only applies to the power family".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatumFamily {
    Box,
    ThinBox,
    Ball,
    AlphaBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    AsGiven,
    Centered,
    /// translated so the support touches {x_1 = 0} from the left
    Touching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatumSpec {
    pub family: DatumFamily,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub center: Vec<f64>,
    pub radius: f64,
    pub alpha: f64,
    pub ell: f64,
    pub amp: f64,
    /// multiplies the datum after construction
    pub scale: f64,
    pub translate: Vec<f64>,
    pub placement: Placement,
}

impl Default for DatumSpec {
    fn default() -> Self {
        DatumSpec {
            family: DatumFamily::Box,
            lo: vec![0.0],
            hi: vec![1.0],
            center: vec![0.0],
            radius: 1.0,
            alpha: 1.0,
            ell: 1.0,
            amp: 1.0,
            scale: 1.0,
            translate: Vec::new(),
            placement: Placement::AsGiven,
        }
    }
}

impl DatumSpec {
    pub fn build(&self, n: usize) -> Result<Datum, CliError> {
        let dim = |v: &[f64], name: &str| -> Result<(), CliError> {
            if v.len() == n {
                Ok(())
            } else {
                Err(CliError::Config(format!("datum.{name} has {} entries, field.n = {n}", v.len())))
            }
        };
        let mut phi = match self.family {
            DatumFamily::Box => {
                dim(&self.lo, "lo")?;
                dim(&self.hi, "hi")?;
                make_box(&self.lo, &self.hi, self.amp)?
            }
            DatumFamily::ThinBox => make_thin_box(self.ell, n)?,
            DatumFamily::Ball => {
                dim(&self.center, "center")?;
                make_ball(&self.center, self.radius, self.amp)?
            }
            DatumFamily::AlphaBump => {
                dim(&self.center, "center")?;
                make_alpha_bump(&self.center, self.radius, self.alpha, self.amp)?
            }
        };
        if self.scale != 1.0 {
            phi = scaled(&phi, self.scale)?;
        }
        if !self.translate.is_empty() {
            dim(&self.translate, "translate")?;
            phi = phi.translated(&self.translate);
        }
        Ok(match self.placement {
            Placement::AsGiven => phi,
            Placement::Centered => phi.center(),
            Placement::Touching => phi.touch_origin_along_e1(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldSpec {
    pub n: usize,
    pub d: f64,
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec { n: 1, d: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub t_min: f64,
    pub t_max: f64,
    /// geometric grid size
    pub points: usize,
    /// spatial radius R(t) = max(radius_sqrt sqrt(t), radius_lin t)
    pub radius_sqrt: f64,
    pub radius_lin: f64,
    pub points_per_axis: usize,
    pub directions_per_plane: usize,
    pub pair_budget: usize,
    pub mu: Vec<f64>,
    pub eps_conc: f64,
    pub rel_tol: f64,
    pub seed: u64,
    pub midpoint: bool,
    pub quadrature_order: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let p = SweepPolicy::default();
        SweepSpec {
            t_min: 1.0,
            t_max: 1e4,
            points: 25,
            radius_sqrt: p.radius_sqrt,
            radius_lin: p.radius_lin,
            points_per_axis: p.points_per_axis,
            directions_per_plane: p.directions_per_plane,
            pair_budget: p.pair_budget,
            mu: p.mu_grid,
            eps_conc: p.eps_conc,
            rel_tol: p.rel_tol,
            seed: p.seed,
            midpoint: p.midpoint,
            quadrature_order: fconc::heatflow::DEFAULT_ORDER,
        }
    }
}

impl SweepSpec {
    pub fn policy(&self) -> SweepPolicy {
        SweepPolicy {
            radius_sqrt: self.radius_sqrt,
            radius_lin: self.radius_lin,
            points_per_axis: self.points_per_axis,
            directions_per_plane: self.directions_per_plane,
            pair_budget: self.pair_budget,
            mu_grid: self.mu.clone(),
            eps_conc: self.eps_conc,
            rel_tol: self.rel_tol,
            seed: self.seed,
            midpoint: self.midpoint,
        }
    }

    pub fn t_grid(&self) -> Result<Vec<f64>, CliError> {
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return Err(CliError::Config(format!(
                "sweep needs 0 < t_min < t_max, got t_min={} t_max={}",
                self.t_min, self.t_max
            )));
        }
        Ok(fconc::grid::geometric(self.t_min, self.t_max, self.points))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// second-derivative test at x = t e_1 along e_1
    RayI,
    /// J at x = c t e_1 for c in x_over_t
    JAxis,
    /// psi_d at x = c t e_1
    PsiAxis,
    /// U at x = c t e_1
    UAxis,
    /// U along the parabolic curves x(t:r)
    Parabolic,
}

impl ProbeKind {
    pub fn name(self) -> &'static str {
        match self {
            ProbeKind::RayI => "ray_i",
            ProbeKind::JAxis => "j_axis",
            ProbeKind::PsiAxis => "psi_axis",
            ProbeKind::UAxis => "u_axis",
            ProbeKind::Parabolic => "parabolic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSpec {
    pub kind: ProbeKind,
    pub t_list: Vec<f64>,
    pub x_over_t: Vec<f64>,
    pub r_list: Vec<f64>,
    /// parabolic target amplitude for d > n/2; defaults to the mass
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            kind: ProbeKind::RayI,
            t_list: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            x_over_t: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            r_list: vec![0.0, 0.5, 1.0],
            k: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// both built-in tables
    All,
    Beta,
    Kappa,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassSpec {
    Less,
    NotLess,
    NotApplicable,
}

impl From<MassSpec> for MassVsA {
    fn from(m: MassSpec) -> Self {
        match m {
            MassSpec::Less => MassVsA::Less,
            MassSpec::NotLess => MassVsA::NotLess,
            MassSpec::NotApplicable => MassVsA::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassSpec {
    /// bounded, nonnegative, compactly supported
    L,
    /// additionally satisfying condition (A)
    La,
}

impl From<ClassSpec> for DatumClass {
    fn from(c: ClassSpec) -> Self {
        match c {
            ClassSpec::L => DatumClass::L,
            ClassSpec::La => DatumClass::LA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifySpec {
    pub table: TableKind,
    pub n: usize,
    pub d_list: Vec<f64>,
    pub mass_vs_a: MassSpec,
    pub datum_class: ClassSpec,
    pub functions: Vec<FunctionSpec>,
}

impl Default for ClassifySpec {
    fn default() -> Self {
        ClassifySpec {
            table: TableKind::All,
            n: 1,
            d_list: vec![0.0],
            mass_vs_a: MassSpec::NotApplicable,
            datum_class: ClassSpec::La,
            functions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSpec {
    /// F2; F1 is the [function] section
    pub other: FunctionSpec,
    pub r_min: f64,
    pub r_max: f64,
    pub r_points: usize,
}

impl Default for CompareSpec {
    fn default() -> Self {
        CompareSpec {
            other: FunctionSpec {
                family: FunctionFamily::PowerLog,
                param: Some(0.5),
                a: None,
            },
            r_min: 1e-2,
            r_max: 40.0,
            r_points: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckASpec {
    pub k_min: f64,
    pub k_max: f64,
    pub k_points: usize,
}

impl Default for CheckASpec {
    fn default() -> Self {
        CheckASpec {
            k_min: 1.0,
            k_max: 1e3,
            k_points: 31,
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn build_field(&self) -> Result<(Field, Function), CliError> {
        let f = self.function.build()?;
        let phi = self.datum.build(self.field.n)?;
        let a: Ext<f64> = f.a();
        let field = Field::new(phi, self.field.d, a, self.sweep.quadrature_order)?;
        Ok((field, f))
    }
}
