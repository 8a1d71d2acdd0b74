use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {edge}: {reason}")]
    Involution { edge: usize, reason: &'static str },
    #[error("edge {edge} has an endpoint outside 0..{vertex_count}")]
    VertexOutOfRange { edge: usize, vertex_count: usize },
    #[error("vertex {vertex} is not in 0..{vertex_count}")]
    BadVertex { vertex: usize, vertex_count: usize },
    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular { vertex: usize, degree: usize, expected: usize },
    #[error("vertex {vertex} has degree {degree}, more than {bound}")]
    DegreeTooLarge { vertex: usize, degree: usize, bound: usize },
    #[error("step {position} does not start where the previous step ended")]
    NotAWalk { position: usize },
    #[error("walk is not closed")]
    OpenWalk,
    #[error("sgf line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Group(String),
    #[error("covering check failed at vertex {vertex}")]
    Covering { vertex: usize },
    #[error("d * n = {0} half-edges cannot be perfectly matched")]
    OddStubCount(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("length {0} is odd")]
    OddLength(usize),
    #[error("length {n} exceeds the table size {nmax}")]
    TableTooShort { n: usize, nmax: usize },
    #[error("degree must be at least {min}, got {d}")]
    Degree { d: usize, min: usize },
    #[error("quadrature did not converge: achieved error estimate {achieved:e}")]
    Quadrature { achieved: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("alpha = {alpha} outside (0, {max}]")]
    AlphaRange { alpha: f64, max: f64 },
    #[error("ball has radius {have}, need at least {need}")]
    BallTooSmall { have: usize, need: usize },
    #[error("{0}")]
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("enumerating {walks} walks exceeds the budget of {budget}; use a sampled estimate")]
    Budget { walks: u128, budget: u128 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("{0}")]
    Parity(String),
    #[error("parameter constraint violated: {0}")]
    Constraint(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KappaError {
    #[error("no walks of length {k} from {x} to {y}")]
    NoWalks { x: usize, y: usize, k: usize },
    #[error("word state space exceeded {budget} before any estimate (achieved m = {achieved_m})")]
    Budget { budget: usize, achieved_m: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Census(#[from] CensusError),
}
