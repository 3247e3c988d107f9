//! Run configuration: `key = value` text with `[sections]` (TOML syntax).
//! Every key is optional; unknown keys are rejected.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use shockadj_core::acceptance::ground_case;
use shockadj_core::adjoint::{Functional, PressureTarget, ShapeGradientForm, ShockFlagging};
use shockadj_core::euler::{EntropyFix, GasModel, StegerConvention};
use shockadj_core::mesh::{BoundaryTag, Diagonal, WedgeChannelParams};
use shockadj_core::solver::{
    Freestream, JacobianMode, Limiter, LinearSolverConfig, Preconditioner, SolverConfig, TimeScheme,
};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub burgers: BurgersSection,
    pub mesh: MeshSection,
    pub solver: SolverSection,
    pub functional: FunctionalSection,
    pub adjoint: AdjointSection,
    pub verify: VerifySection,
    pub gradient_check: GradientCheckSection,
    pub shape: ShapeSection,
    pub output: OutputSection,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BurgersCase {
    /// u₀ = −min(atan(x + a), 0) on [−6, 6], J = ½∫₀^∞ u² at T.
    #[default]
    Table1,
    /// Riemann data (1 + a)(1 − H(x)) on [−2, 2], J on [−½, ½].
    Analytic,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BurgersSection {
    pub case: BurgersCase,
    /// Grid cells; 2400 (table1) or 4000 (analytic) when unset.
    pub n: Option<usize>,
    /// Final time; 2 (table1) or 1 (analytic) when unset.
    pub t_final: Option<f64>,
    /// Courant number of the explicit scheme (default 0.4).
    pub cfl: Option<f64>,
    /// Parameter step of the central FD gradient (default 0.01).
    pub fd_step: Option<f64>,
}

impl BurgersSection {
    pub fn resolved_n(&self) -> usize {
        self.n.unwrap_or(match self.case {
            BurgersCase::Table1 => 2400,
            BurgersCase::Analytic => 4000,
        })
    }

    pub fn resolved_t(&self) -> f64 {
        self.t_final.unwrap_or(match self.case {
            BurgersCase::Table1 => 2.0,
            BurgersCase::Analytic => 1.0,
        })
    }

    pub fn resolved_cfl(&self) -> f64 {
        self.cfl.unwrap_or(0.4)
    }

    pub fn resolved_fd_step(&self) -> f64 {
        self.fd_step.unwrap_or(0.01)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MeshSource {
    /// Compression ramp in a channel.
    #[default]
    Wedge,
    /// Diamond profile on the top wall above a ground plane.
    Ground,
    /// Mesh text file given by `mesh.file`.
    File,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalChoice {
    Forward,
    #[default]
    Alternating,
}

/// Generator keys override the defaults of the chosen source.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSection {
    pub source: MeshSource,
    pub file: Option<PathBuf>,
    pub edge_length: Option<f64>,
    pub length: Option<f64>,
    pub height: Option<f64>,
    pub wedge_start: Option<f64>,
    pub wedge_length: Option<f64>,
    pub wedge_angle_deg: Option<f64>,
    pub diagonal: Option<DiagonalChoice>,
}

impl MeshSection {
    pub fn generator(&self) -> WedgeChannelParams {
        let base = match self.source {
            MeshSource::Ground => ground_case(0.05),
            _ => WedgeChannelParams::default(),
        };
        WedgeChannelParams {
            edge_length: self.edge_length.unwrap_or(base.edge_length),
            length: self.length.unwrap_or(base.length),
            height: self.height.unwrap_or(base.height),
            wedge_start: self.wedge_start.unwrap_or(base.wedge_start),
            wedge_length: self.wedge_length.unwrap_or(base.wedge_length),
            wedge_angle_deg: self.wedge_angle_deg.unwrap_or(base.wedge_angle_deg),
            diagonal: match self.diagonal {
                Some(DiagonalChoice::Forward) => Diagonal::Forward,
                Some(DiagonalChoice::Alternating) => Diagonal::Alternating,
                None => base.diagonal,
            },
            ..base
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimiterChoice {
    Dervieux3,
    Minmod,
    VanAlbada,
    Unlimited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianChoice {
    Exact,
    Frozen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StegerChoice {
    Standard,
    Paper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeChoice {
    Implicit,
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreconditionerChoice {
    Ilu0,
    BlockJacobi,
}

/// Defaults: Mach 2 along x, ρ∞ = 1, p∞ = 1/γ, first-order scheme with the
/// exact Jacobian, Newton tolerance 1e-11.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub gamma: f64,
    pub mach: f64,
    pub angle_deg: f64,
    pub rho: f64,
    /// Free-stream pressure; 1/γ when unset.
    pub p: Option<f64>,
    pub muscl: bool,
    pub limiter: LimiterChoice,
    pub jacobian: JacobianChoice,
    pub steger: StegerChoice,
    /// Harten fraction; 0 disables the entropy fix.
    pub entropy_fix: f64,
    pub scheme: SchemeChoice,
    pub cfl: f64,
    pub implicit_cfl: f64,
    pub implicit_cfl_max: f64,
    pub convergence_tol: f64,
    pub max_steps: usize,
    pub linear_rel_tol: f64,
    pub linear_restart: usize,
    pub linear_max_iter: usize,
    pub preconditioner: PreconditionerChoice,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            gamma: 1.4,
            mach: 2.0,
            angle_deg: 0.0,
            rho: 1.0,
            p: None,
            muscl: false,
            limiter: LimiterChoice::Dervieux3,
            jacobian: JacobianChoice::Exact,
            steger: StegerChoice::Standard,
            entropy_fix: 0.05,
            scheme: SchemeChoice::Implicit,
            cfl: 0.9,
            implicit_cfl: 10.0,
            implicit_cfl_max: 1e8,
            convergence_tol: 1e-11,
            max_steps: 100,
            linear_rel_tol: 1e-8,
            linear_restart: 60,
            linear_max_iter: 500,
            preconditioner: PreconditionerChoice::Ilu0,
        }
    }
}

impl SolverSection {
    pub fn to_solver_config(&self) -> SolverConfig {
        let gas = GasModel { gamma: self.gamma };
        let p = self.p.unwrap_or(1.0 / self.gamma);
        SolverConfig {
            gas,
            cfl: self.cfl,
            muscl: self.muscl,
            limiter: match self.limiter {
                LimiterChoice::Dervieux3 => Limiter::Dervieux3,
                LimiterChoice::Minmod => Limiter::Minmod,
                LimiterChoice::VanAlbada => Limiter::VanAlbada,
                LimiterChoice::Unlimited => Limiter::Unlimited,
            },
            entropy_fix: if self.entropy_fix > 0.0 {
                EntropyFix::Harten { fraction: self.entropy_fix }
            } else {
                EntropyFix::None
            },
            steger: match self.steger {
                StegerChoice::Standard => StegerConvention::Standard,
                StegerChoice::Paper => StegerConvention::Paper,
            },
            freestream: Freestream::from_mach(self.mach, self.angle_deg, self.rho, p, &gas),
            convergence_tol: self.convergence_tol,
            max_steps: self.max_steps,
            scheme: match self.scheme {
                SchemeChoice::Implicit => TimeScheme::Implicit,
                SchemeChoice::Explicit => TimeScheme::Explicit,
            },
            jacobian: match self.jacobian {
                JacobianChoice::Exact => JacobianMode::Exact,
                JacobianChoice::Frozen => JacobianMode::Frozen,
            },
            implicit_cfl: self.implicit_cfl,
            implicit_cfl_max: self.implicit_cfl_max,
            linear: LinearSolverConfig {
                rel_tol: self.linear_rel_tol,
                restart: self.linear_restart,
                max_iter: self.linear_max_iter,
                preconditioner: match self.preconditioner {
                    PreconditionerChoice::Ilu0 => Preconditioner::BlockIlu0,
                    PreconditionerChoice::BlockJacobi => Preconditioner::BlockJacobi,
                },
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKindChoice {
    /// ½∫(ρ/ρ_ref − 1)² over the outflow.
    OutflowDensity,
    /// ½∫(p − p₀)² over the ground.
    GroundPressure,
}

/// Kind defaults to ground_pressure on the ground case and outflow_density
/// otherwise; ρ_ref and p₀ default to the free stream.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FunctionalSection {
    pub kind: Option<FunctionalKindChoice>,
    pub rho_ref: Option<f64>,
    pub p0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdjointSection {
    pub enabled: bool,
}

impl Default for AdjointSection {
    fn default() -> Self {
        AdjointSection { enabled: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub enabled: bool,
    /// Jump threshold of the shock flag, relative to ρ∞.
    pub shock_theta: f64,
    /// Rings of neighbours added around flagged vertices.
    pub shock_rings: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        let d = ShockFlagging::default();
        VerifySection { enabled: true, shock_theta: d.theta, shock_rings: d.rings }
    }
}

/// Adjoint dJ/dρ∞ against a central FD sweep of the nonlinear solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradientCheckSection {
    pub enabled: bool,
    pub eps: Vec<f64>,
    /// Best relative error above this exits with the verification code.
    pub tolerance: f64,
}

impl Default for GradientCheckSection {
    fn default() -> Self {
        GradientCheckSection { enabled: false, eps: vec![1e-3, 1e-4, 1e-5], tolerance: 1e-3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeFormChoice {
    Printed,
    WithEnergy,
    Discrete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapeSection {
    pub enabled: bool,
    pub form: ShapeFormChoice,
    pub lambda: f64,
    /// Boundary tag of the moving wall.
    pub tag: String,
}

impl Default for ShapeSection {
    fn default() -> Self {
        ShapeSection { enabled: false, form: ShapeFormChoice::Discrete, lambda: 1e-3, tag: "slip_wall".into() }
    }
}

impl ShapeSection {
    pub fn form(&self) -> ShapeGradientForm {
        match self.form {
            ShapeFormChoice::Printed => ShapeGradientForm::Printed,
            ShapeFormChoice::WithEnergy => ShapeGradientForm::WithEnergy,
            ShapeFormChoice::Discrete => ShapeGradientForm::Discrete,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub vtk: bool,
    /// Probe segment [x0, y0, x1, y1]; empty disables the probe.
    pub probe: Vec<f64>,
    pub probe_count: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { vtk: true, probe: Vec::new(), probe_count: 200 }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| anyhow::anyhow!("{}", e.to_string().trim_end()))?;
        Ok(cfg)
    }

    /// Defaults when `path` is None; parse and validate otherwise.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let cfg = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                RunConfig::parse(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
        };
        Ok(cfg)
    }

    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate_burgers(&self) -> Result<()> {
        let b = &self.burgers;
        if b.resolved_n() < 10 {
            bail!("burgers.n must be at least 10");
        }
        if !(b.resolved_t() > 0.0 && b.resolved_t().is_finite()) {
            bail!("burgers.t_final must be positive");
        }
        if !(b.resolved_cfl() > 0.0 && b.resolved_cfl() <= 1.0) {
            bail!("burgers.cfl must lie in (0, 1]");
        }
        if !(b.resolved_fd_step() > 0.0) {
            bail!("burgers.fd_step must be positive");
        }
        Ok(())
    }

    pub fn validate_euler(&self) -> Result<()> {
        let s = &self.solver;
        if !(s.gamma > 1.0) {
            bail!("solver.gamma must exceed 1");
        }
        if !(s.mach > 0.0 && s.rho > 0.0 && s.p.is_none_or(|p| p > 0.0)) {
            bail!("solver.mach, solver.rho and solver.p must be positive");
        }
        if s.max_steps == 0 {
            bail!("solver.max_steps must be at least 1");
        }
        if !(s.entropy_fix >= 0.0) {
            bail!("solver.entropy_fix must be non-negative");
        }
        self.solver.to_solver_config().validate().context("solver section")?;
        if self.mesh.source == MeshSource::File {
            match &self.mesh.file {
                None => bail!("mesh.source = \"file\" needs mesh.file"),
                Some(f) if !f.is_file() => bail!("mesh file {} does not exist", f.display()),
                _ => {}
            }
        }
        if self.functional.rho_ref.is_some_and(|r| !(r > 0.0)) {
            bail!("functional.rho_ref must be positive");
        }
        let g = &self.gradient_check;
        if g.eps.is_empty() || g.eps.iter().any(|e| !(*e > 0.0)) {
            bail!("gradient_check.eps must be a non-empty list of positive steps");
        }
        if !(g.tolerance > 0.0) {
            bail!("gradient_check.tolerance must be positive");
        }
        if !(self.verify.shock_theta > 0.0) {
            bail!("verify.shock_theta must be positive");
        }
        if !(self.shape.lambda > 0.0) {
            bail!("shape.lambda must be positive");
        }
        self.shape_tag()?;
        if !self.output.probe.is_empty() && (self.output.probe.len() != 4 || self.output.probe_count == 0) {
            bail!("output.probe must be [x0, y0, x1, y1] with probe_count ≥ 1");
        }
        Ok(())
    }

    pub fn shape_tag(&self) -> Result<BoundaryTag> {
        self.shape.tag.parse().map_err(|e| anyhow::anyhow!("shape.tag: {e}"))
    }

    pub fn functional(&self) -> Functional {
        let cfg = self.solver.to_solver_config();
        let kind = self.functional.kind.unwrap_or(match self.mesh.source {
            MeshSource::Ground => FunctionalKindChoice::GroundPressure,
            _ => FunctionalKindChoice::OutflowDensity,
        });
        match kind {
            FunctionalKindChoice::OutflowDensity => {
                Functional::outflow_density(self.functional.rho_ref.unwrap_or(cfg.freestream.rho))
            }
            FunctionalKindChoice::GroundPressure => {
                Functional::ground_pressure(PressureTarget::Constant(self.functional.p0.unwrap_or(cfg.freestream.p)))
            }
        }
    }

    pub fn flagging(&self) -> ShockFlagging {
        ShockFlagging { theta: self.verify.shock_theta, rings: self.verify.shock_rings }
    }
}
