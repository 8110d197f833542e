use thiserror::Error;

use crate::set::ElementSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {0} is outside 1..=64")]
    GroundSize(usize),
    #[error("element {element} lies outside a ground set of size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("arity {0} is not supported by this operation")]
    UnsupportedArity(usize),
    #[error("tuple {tuple} does not have {k} elements")]
    TupleSize { tuple: ElementSet, k: usize },
    #[error("mapping over C({n},{k}) tuples is too large to store")]
    TooLarge { n: usize, k: usize },
    #[error("image {image} of tuple {tuple} meets the tuple")]
    NotDisjoint { tuple: ElementSet, image: ElementSet },
    #[error("image of tuple {tuple} has {size} elements, budget requires fewer than {mu}")]
    OverBudget { tuple: ElementSet, size: usize, mu: usize },
    #[error("image {image} of tuple {tuple} violates the {flag} flag")]
    FlagViolation {
        tuple: ElementSet,
        image: ElementSet,
        flag: &'static str,
    },
    #[error("the {flag} flag requires arity {required}, mapping has arity {k}")]
    FlagArity {
        flag: &'static str,
        required: usize,
        k: usize,
    },
    #[error("operation requires the {0} flag")]
    MissingFlag(&'static str),
    #[error("free-set characterizations disagree on {0}")]
    ReductionMismatch(ElementSet),
    #[error("malformed document: {0}")]
    Parse(String),
    #[error("{what} must be at least {min}, got {got}")]
    TooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },
    #[error("search stopped by resource limit after {nodes} nodes and {millis} ms")]
    ResourceLimit { nodes: u64, millis: u128 },
    #[error("oracle supports ground sets of at most {cap} elements, got {n}")]
    OracleCap { n: usize, cap: usize },
    #[error("malformed enumeration scheme: {0}")]
    MalformedScheme(String),
    #[error("mappings being extended disagree on tuple {0}")]
    Disagreement(ElementSet),
    #[error("image {image} of tuple {tuple} is not contained in the ambient image")]
    Containment { tuple: ElementSet, image: ElementSet },
    #[error("mapping arity {got} does not match the required arity {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("delta-system precondition failed: {0}")]
    DeltaPrecondition(String),
    #[error("partial rank function is inconsistent: {0}")]
    InconsistentRanks(String),
    #[error("not a valid condition: {0}")]
    InvalidCondition(String),
    #[error("amalgam is not a valid condition, violating set {0}")]
    AmalgamationDefect(ElementSet),
    #[error("goal {goal} unreachable from condition with support {support}")]
    GoalUnreachable { goal: String, support: ElementSet },
    #[error("arrow check over C({a},{r}) = {tuples} tuples exceeds the exhaustive cap of {cap}")]
    ArrowCap {
        a: usize,
        r: usize,
        tuples: u64,
        cap: u64,
    },
}
