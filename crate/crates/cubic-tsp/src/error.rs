use thiserror::Error;

/// Errors produced across the crate.
///
/// Two broad classes matter to callers: ordinary input/usage errors, and
/// invariant breaches. A breach means a structural guarantee the algorithms
/// rely on failed at runtime, which is a bug (ours or the caller's misuse of
/// an internal hook) and is reported loudly rather than patched over.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is not cubic: node {node} has degree {degree}")]
    NotCubic { node: usize, degree: usize },
    #[error("graph is not bipartite: odd cycle through node {0}")]
    NotBipartite(usize),
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph is not simple: {0}")]
    NotSimple(String),
    #[error("no path between {0} and {1}")]
    Unreachable(usize, usize),
    #[error("multigraph has a node of odd degree ({node}: {degree})")]
    OddDegree { node: usize, degree: usize },
    #[error("edge set is not 2-regular: node {node} has degree {degree}")]
    NotTwoRegular { node: usize, degree: usize },
    #[error("cycle of odd length {0} cannot be split into a matching")]
    OddCycle(usize),
    #[error("no perfect matching found in a cubic bipartite graph (upstream validation bug)")]
    MatchingFailed,
    #[error("contraction would create a parallel edge ({0}, {1})")]
    ParallelEdgeWouldForm(usize, usize),
    #[error("invalid 2-factor: {0}")]
    InvalidFactor(String),
    #[error("invariant breach: {0}")]
    InvariantBreach(String),
    #[error("chord ({0}, {1}) missing from F2 at pivot time")]
    ChordMissingFromF2(usize, usize),
    #[error("improvement loop exceeded its iteration cap of {0}")]
    IterationCapExceeded(usize),
    #[error("no clearing move for any violated cycle; first failure: {0}")]
    NoClearingMove(String),
    #[error("cannot certify: F1-cycle {0} is still violated")]
    ViolatedCycleExists(usize),
    #[error("more than two F1-cycles intersect a 10-cycle in 4+ nodes")]
    TooManyIntersectors,
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
    #[error("graph is K4; its tour is the 4-cycle itself")]
    IsK4,
    #[error("tour multigraph has odd degree at contracted gadget node {0}")]
    OddDegreeAtGadget(usize),
    #[error("instance too large for exhaustive search: {n} nodes exceeds cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("graph has no 2-factor")]
    NoTwoFactor,
    #[error("random generation exhausted {0} retries")]
    RetriesExhausted(usize),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotCubic { .. } => "NotCubic",
            Error::NotBipartite(_) => "NotBipartite",
            Error::NotConnected => "NotConnected",
            Error::NotSimple(_) => "NotSimple",
            Error::Unreachable(_, _) => "Unreachable",
            Error::OddDegree { .. } => "OddDegree",
            Error::NotTwoRegular { .. } => "NotTwoRegular",
            Error::OddCycle(_) => "OddCycle",
            Error::MatchingFailed => "MatchingFailed",
            Error::ParallelEdgeWouldForm(_, _) => "ParallelEdgeWouldForm",
            Error::InvalidFactor(_) => "InvalidFactor",
            Error::InvariantBreach(_) => "InvariantBreach",
            Error::ChordMissingFromF2(_, _) => "ChordMissingFromF2",
            Error::IterationCapExceeded(_) => "IterationCapExceeded",
            Error::NoClearingMove(_) => "NoClearingMove",
            Error::ViolatedCycleExists(_) => "ViolatedCycleExists",
            Error::TooManyIntersectors => "TooManyIntersectors",
            Error::CertificateInvalid(_) => "CertificateInvalid",
            Error::IsK4 => "IsK4",
            Error::OddDegreeAtGadget(_) => "OddDegreeAtGadget",
            Error::TooLarge { .. } => "TooLarge",
            Error::NoTwoFactor => "NoTwoFactor",
            Error::RetriesExhausted(_) => "RetriesExhausted",
            Error::UnknownFixture(_) => "UnknownFixture",
            Error::Parse(_) => "Parse",
        }
    }

    /// True for errors that falsify a structural guarantee rather than
    /// reporting bad input. The CLI maps these to a distinct exit code.
    pub fn is_invariant_breach(&self) -> bool {
        matches!(
            self,
            Error::InvariantBreach(_)
                | Error::IterationCapExceeded(_)
                | Error::NoClearingMove(_)
                | Error::ChordMissingFromF2(_, _)
                | Error::TooManyIntersectors
                | Error::CertificateInvalid(_)
                | Error::MatchingFailed
                | Error::ParallelEdgeWouldForm(_, _)
                | Error::OddDegreeAtGadget(_)
        )
    }
}
