use alloc::string::String;
use core::fmt;

use crate::lp::LpStatus;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    InvalidInput(String),
    /// A coordinate outside the domain of the road or the grid.
    OutOfDomain { what: &'static str, value: f64 },
    /// `cos(e_psi)` or `1 - kappa * e_y` too close to zero.
    Pole {
        station: usize,
        detail: &'static str,
    },
    /// Obstacles leave no free lateral space over a grid interval.
    CorridorBlocked {
        interval: usize,
        s_start: f64,
        s_end: f64,
    },
    /// The requested horizon runs past the end of the lane.
    HorizonTooLong {
        requested: usize,
        max_feasible: usize,
    },
    /// The LP solver did not reach optimality.
    /// `row` names the first failing row when the solver reports one.
    Lp {
        pass: u8,
        status: LpStatus,
        row_hint: Option<usize>,
        row: Option<String>,
    },
    /// The QP solver did not reach optimality.
    Qp(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::OutOfDomain { what, value } => {
                write!(f, "{what} = {value} is outside the valid domain")
            }
            Error::Pole { station, detail } => {
                write!(f, "pole condition violated at station {station}: {detail}")
            }
            Error::CorridorBlocked { interval, s_start, s_end } => write!(
                f,
                "corridor blocked by obstacles over interval {interval} (s = {s_start:.3} .. {s_end:.3} m)"
            ),
            Error::HorizonTooLong { requested, max_feasible } => write!(
                f,
                "lane exhausted: horizon of {requested} steps requested, at most {max_feasible} fit"
            ),
            Error::Lp { pass, status, row_hint, row } => {
                write!(f, "LP in pass {pass} ended with status {status:?}")?;
                match (row_hint, row) {
                    (Some(i), Some(name)) => write!(f, " (first failing row {i}, {name})"),
                    (Some(i), None) => write!(f, " (first failing row {i})"),
                    _ => Ok(()),
                }
            }
            Error::Qp(msg) => write!(f, "QP solver: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
