use crate::error::{Error, Result};
use crate::euler::{ConservativeState, EntropyFix, GasModel, StegerConvention};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Limiter {
    /// Three-slope limiter over the centred, upwind and nodal slopes.
    #[default]
    Dervieux3,
    Minmod,
    /// Smooth van Albada average of the centred and upwind slopes.
    VanAlbada,
    /// Nodal gradient, no limiting.
    Unlimited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JacobianMode {
    /// Roe matrix and split matrices held fixed.
    #[default]
    Frozen,
    /// Exact derivative of the first-order residual.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TimeScheme {
    Explicit,
    #[default]
    Implicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Preconditioner {
    BlockJacobi,
    #[default]
    BlockIlu0,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearSolverConfig {
    pub rel_tol: f64,
    pub restart: usize,
    pub max_iter: usize,
    pub preconditioner: Preconditioner,
}

impl Default for LinearSolverConfig {
    fn default() -> Self {
        LinearSolverConfig { rel_tol: 1e-8, restart: 60, max_iter: 500, preconditioner: Preconditioner::default() }
    }
}

/// Free-stream primitive state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Freestream {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl Freestream {
    pub fn from_mach(mach: f64, angle_deg: f64, rho: f64, p: f64, gas: &GasModel) -> Self {
        let q = mach * (gas.gamma * p / rho).sqrt();
        let a = angle_deg.to_radians();
        Freestream { rho, u: q * a.cos(), v: q * a.sin(), p }
    }

    pub fn state(&self, gas: &GasModel) -> ConservativeState {
        ConservativeState::from_primitive(self.rho, self.u, self.v, self.p, gas)
    }

    pub fn mach(&self, gas: &GasModel) -> f64 {
        self.u.hypot(self.v) / (gas.gamma * self.p / self.rho).sqrt()
    }

    /// ∂W∞/∂ρ∞ with velocity and pressure held fixed.
    pub fn d_state_d_rho(&self) -> [f64; 4] {
        [1.0, self.u, self.v, 0.5 * (self.u * self.u + self.v * self.v)]
    }
}

impl Default for Freestream {
    /// Mach 2 along x with ρ∞ = 1 and c∞ = 1.
    fn default() -> Self {
        let gas = GasModel::default();
        Freestream::from_mach(2.0, 0.0, 1.0, 1.0 / gas.gamma, &gas)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub gas: GasModel,
    /// Courant number of explicit steps.
    pub cfl: f64,
    pub muscl: bool,
    pub limiter: Limiter,
    pub entropy_fix: EntropyFix,
    pub steger: StegerConvention,
    pub freestream: Freestream,
    pub convergence_tol: f64,
    pub max_steps: usize,
    pub scheme: TimeScheme,
    pub jacobian: JacobianMode,
    /// Initial and maximal Courant numbers of the implicit pseudo-time ramp.
    pub implicit_cfl: f64,
    pub implicit_cfl_max: f64,
    pub linear: LinearSolverConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gas: GasModel::default(),
            cfl: 0.9,
            muscl: true,
            limiter: Limiter::default(),
            entropy_fix: EntropyFix::default(),
            steger: StegerConvention::default(),
            freestream: Freestream::default(),
            convergence_tol: 1e-8,
            max_steps: 300,
            scheme: TimeScheme::default(),
            jacobian: JacobianMode::default(),
            implicit_cfl: 10.0,
            implicit_cfl_max: 1e8,
            linear: LinearSolverConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scheme == TimeScheme::Explicit && !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Range(format!("explicit cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.implicit_cfl > 0.0) || self.implicit_cfl_max < self.implicit_cfl {
            return Err(Error::Range("implicit cfl ramp must be positive and non-decreasing".into()));
        }
        if !self.freestream.state(&self.gas).is_valid(&self.gas) {
            return Err(Error::Domain(format!("invalid free stream {:?}", self.freestream)));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::Range("convergence_tol must be positive".into()));
        }
        if self.linear.restart == 0 || !(self.linear.rel_tol > 0.0) {
            return Err(Error::Range("linear solver needs restart ≥ 1 and rel_tol > 0".into()));
        }
        Ok(())
    }

    /// First-order copy of the configuration.
    pub fn first_order(&self) -> Self {
        SolverConfig { muscl: false, ..*self }
    }
}
