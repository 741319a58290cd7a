use crate::geometry::LatticePoint;
use thiserror::Error;

/// Unified error type for every fallible operation in the crate.
///
/// Precondition and exactness violations carry the concrete bound that was
/// broken so callers (and the CLI) can surface actionable diagnostics.
#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("empty point set: the operation needs at least one lattice point")]
    EmptySet,

    #[error("region has {got} points but the operation needs at least {need}")]
    RegionTooSmall { need: usize, got: usize },

    #[error("point ({},{}) is not in the region", .0.x, .0.y)]
    PointNotInRegion(LatticePoint),

    #[error("point set is not convex: ({},{}) lies in the hull but not in the set", .0.x, .0.y)]
    NotConvex(LatticePoint),

    #[error("direction must be nonzero")]
    ZeroDirection,

    #[error("{what} must be positive, got {got}")]
    NonPositive { what: &'static str, got: String },

    #[error("{what} must be nonnegative, got {got}")]
    Negative { what: &'static str, got: String },

    #[error("{what} must be at least {min}, got {got}")]
    TooSmall {
        what: &'static str,
        min: i64,
        got: i64,
    },

    #[error("search box is empty: x range [{x0},{x1}], y range [{y0},{y1}]")]
    EmptyBox { x0: i64, x1: i64, y0: i64, y1: i64 },

    #[error("bounding box with {cells} cells exceeds the enumeration guard of {limit}")]
    RegionTooLarge { cells: u128, limit: u128 },

    #[error(
        "sweep leaves the configuration's exact region: translate ({},{}) needs cell ({},{}) but the rule is only exact on {bound}",
        .translate.x, .translate.y, .cell.x, .cell.y
    )]
    OutsideExactRegion {
        translate: LatticePoint,
        cell: LatticePoint,
        bound: String,
    },

    #[error("cell ({},{}) is outside the exact region ({bound})", .cell.x, .cell.y)]
    CellNotExact { cell: LatticePoint, bound: String },

    #[error("periods ({},{}) and ({},{}) are linearly dependent", .u.x, .u.y, .v.x, .v.y)]
    DependentPeriods { u: LatticePoint, v: LatticePoint },

    #[error(
        "patch of size {w}x{h} does not tile the quotient of the periods (canonical fundamental domain is {g}x{d})"
    )]
    PatchMismatch { w: usize, h: usize, g: i64, d: i64 },

    #[error("alphabet error: {0}")]
    Alphabet(String),

    #[error("grid parse error at line {line}, column {col}: {msg}")]
    GridParse {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("config spec parse error: {0}")]
    SpecParse(String),

    #[error("word of length {len} is too short: the hypothesis needs length > {bound}")]
    WordTooShort { len: usize, bound: usize },

    #[error("factor length {n} is out of range 0..={len}")]
    FactorLength { n: usize, len: usize },

    #[error("trapezoid needs k > 14*m*n1*k1 = {bound}, got k = {k}")]
    DegenerateTrapezoid { k: i64, bound: i64 },

    #[error("no Nivat pair at ({n1},{k1}): complexity {count} exceeds {bound}")]
    NoNivatPair {
        n1: i64,
        k1: i64,
        count: u64,
        bound: u64,
    },

    #[error("balanced-set search supports the four axis directions, got ({p},{q})")]
    NonAxisDirection { p: i64, q: i64 },

    #[error("balanced-set search failed: {0}")]
    BalancedSearchFailed(String),

    #[error("region contains no translate of the template set")]
    NoTranslateContained,

    #[error("region has no edge parallel to direction ({p},{q})")]
    NoParallelEdge { p: i64, q: i64 },

    #[error("template set equals its directional edge")]
    DegenerateTemplate,

    #[error("scale list needs at least two strictly increasing values")]
    DegenerateScales,

    #[error("zero thickness in direction ({p},{q}) for region #{index}")]
    ZeroThickness { p: i64, q: i64, index: usize },

    #[error("the template set is not a generating set under this search box")]
    NotGeneratingSet,

    #[error("neighborhood width {t} must exceed the template diameter {diam}")]
    ThicknessTooSmall { t: String, diam: String },

    #[error("numeric overflow while computing {0}")]
    Overflow(&'static str),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Classifies errors for process exit codes: spec/grid parsing is a parse
/// failure (exit 1), everything else is a precondition or exactness failure
/// (exit 2).
impl LatticeError {
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            LatticeError::GridParse { .. } | LatticeError::SpecParse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, LatticeError>;
