use thiserror::Error;

/// Failures raised by the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("upstream flow is not supersonic (Mach {mach})")]
    NotSupersonic { mach: f64 },
    #[error("upstream Mach {mach} is within 1e-6 of sonic")]
    NearSonic { mach: f64 },
    #[error("upstream flow must be horizontal (u2 = {u2})")]
    NotHorizontal { u2: f64 },
    #[error("wedge angle {angle_deg} deg exceeds the detachment angle {critical_deg} deg")]
    Detached { angle_deg: f64, critical_deg: f64 },
    #[error("downstream state is not subsonic (Mach {mach})")]
    NotSubsonic { mach: f64 },
    #[error("degenerate polar point: {0}")]
    DegeneratePoint(String),
    #[error("stagnation: horizontal velocity {u1} is not positive")]
    Stagnation { u1: f64 },
    #[error("no subsonic density root for the given gradient and stream data")]
    NoSubsonicRoot,
    #[error("sonic degeneracy: c^2 - q^2 = {gap}")]
    SonicDegeneracy { gap: f64 },
    #[error("jump of phi_y1 vanishes, shock slope undefined")]
    ParallelJump,
    #[error("hodograph transform degenerate: d(varphi)/dz1 = {0}")]
    TransformDegenerate(f64),
    #[error("root bracket failed: {0}")]
    RootBracketFail(String),
    #[error("ellipticity lost at node ({i}, {j}): discriminant {disc}")]
    EllipticityLost { i: usize, j: usize, disc: f64 },
    #[error("obliqueness lost at shock node {j}: nu = ({nu1}, {nu2})")]
    ObliquenessLost { j: usize, nu1: f64, nu2: f64 },
    #[error("linear solver failed: {0}")]
    SolverDiverged(String),
    #[error("iterate left the delta ball: norm {norm} > {delta}")]
    LeftDeltaBall { norm: f64, delta: f64 },
    #[error("no convergence after {iterations} iterations (last change {last})")]
    MaxIterations { iterations: usize, last: f64 },
    #[error("outer entropy iteration diverged: {0}")]
    OuterDiverged(String),
    #[error("only {found} usable dyadic annuli, need at least {needed}")]
    InsufficientAnnuli { found: usize, needed: usize },
    #[error("comparison precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("bad barrier exponents: {0}")]
    BadExponents(String),
    #[error("Eulerian Jacobian degenerate at node ({i}, {j}): {value}")]
    JacobianDegenerate { i: usize, j: usize, value: f64 },
}

/// Coarse failure class, used to map errors onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorClass {
    Input,
    Physics,
    Divergence,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidInput(_) | BadExponents(_) => ErrorClass::Input,
            SolverDiverged(_) | LeftDeltaBall { .. } | MaxIterations { .. } | OuterDiverged(_) => {
                ErrorClass::Divergence
            }
            _ => ErrorClass::Physics,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
