//! Coupled scalar processes running on different clocks.
//!
//! Process `i` advances on clock divisor `c_i`. With `d = lcm(c_1..c_M)`
//! the coupled recurrence
//!
//! ```text
//! x_i(n) = Σ_j a_ij · x_j(n / c_j) + Σ_j b_ij · u_j(n / c_j)
//! ```
//!
//! is defined exactly when `n > 0` and `d | n`; every other index
//! (including `n = 0`) is boundary data. Each recursive index is at most
//! `n / 2`, so evaluation walks a finite DAG and is memoized.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_integer::Integer;

use crate::error::{Error, Result};

/// Common clock of a multirate system: period `d` and per-process
/// factors `f_i = d / c_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalClock {
    pub period: u64,
    pub factors: Vec<u64>,
}

pub fn global_clock(clocks: &[u64]) -> Result<GlobalClock> {
    if clocks.is_empty() {
        return Err(Error::argument("at least one clock divisor is required"));
    }
    if let Some((i, c)) = clocks.iter().enumerate().find(|(_, &c)| c < 2) {
        return Err(Error::argument(format!(
            "clock divisor c_{i} = {c}; clock divisors must be integers >= 2 (positive integers larger than one)"
        )));
    }
    let mut period = 1u64;
    for &c in clocks {
        let g = period.gcd(&c);
        period = (period / g)
            .checked_mul(c)
            .ok_or_else(|| Error::argument("least common multiple of the clocks overflows"))?;
    }
    let factors = clocks.iter().map(|&c| period / c).collect();
    Ok(GlobalClock { period, factors })
}

/// A real sequence indexed by non-negative integers, used for boundary
/// data and inputs.
#[derive(Clone)]
pub enum Sequence {
    Constant(f64),
    /// The index itself: `n ↦ n`.
    Index,
    /// Explicit values; indices not listed are missing.
    Table(BTreeMap<u64, f64>),
    Custom(Arc<dyn Fn(u64) -> Option<f64> + Send + Sync>),
}

impl Sequence {
    pub fn value(&self, n: u64) -> Option<f64> {
        match self {
            Sequence::Constant(v) => Some(*v),
            Sequence::Index => Some(n as f64),
            Sequence::Table(values) => values.get(&n).copied(),
            Sequence::Custom(f) => f(n),
        }
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Sequence::Index => f.write_str("Index"),
            Sequence::Table(t) => f.debug_tuple("Table").field(t).finish(),
            Sequence::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MultirateSystem {
    a: DMatrix<f64>,
    b: Option<DMatrix<f64>>,
    clocks: Vec<u64>,
    clock: GlobalClock,
    boundary: Vec<Sequence>,
    input: Option<Vec<Sequence>>,
}

impl MultirateSystem {
    /// `boundary` and `input` hold one sequence per process. `B` and the
    /// input must be given together.
    pub fn new(
        a: DMatrix<f64>,
        b: Option<DMatrix<f64>>,
        clocks: Vec<u64>,
        boundary: Vec<Sequence>,
        input: Option<Vec<Sequence>>,
    ) -> Result<Self> {
        let m = a.nrows();
        if !a.is_square() || m == 0 {
            return Err(Error::shape(format!(
                "A must be square and non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if clocks.len() != m {
            return Err(Error::shape(format!("{} clocks given for {m} processes", clocks.len())));
        }
        let clock = global_clock(&clocks)?;
        if let Some(b) = &b {
            if b.shape() != (m, m) {
                return Err(Error::shape(format!(
                    "B must be {m}x{m}, got {}x{}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        if a.iter().chain(b.iter().flat_map(|b| b.iter())).any(|v| !v.is_finite()) {
            return Err(Error::Value("coupling coefficients must be finite".into()));
        }
        if boundary.len() != m {
            return Err(Error::shape(format!(
                "{} boundary sequences given for {m} processes",
                boundary.len()
            )));
        }
        match (&b, &input) {
            (Some(_), None) => return Err(Error::argument("B is given but no input sequences")),
            (None, Some(_)) => return Err(Error::argument("input sequences are given but no B")),
            (_, Some(u)) if u.len() != m => {
                return Err(Error::shape(format!(
                    "{} input sequences given for {m} processes",
                    u.len()
                )))
            }
            _ => {}
        }
        Ok(MultirateSystem {
            a,
            b,
            clocks,
            clock,
            boundary,
            input,
        })
    }

    pub fn processes(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> Option<&DMatrix<f64>> {
        self.b.as_ref()
    }

    pub fn clocks(&self) -> &[u64] {
        &self.clocks
    }

    pub fn global_clock(&self) -> &GlobalClock {
        &self.clock
    }

    pub fn boundary(&self) -> &[Sequence] {
        &self.boundary
    }

    pub fn input(&self) -> Option<&[Sequence]> {
        self.input.as_deref()
    }

    /// Whether the recurrence (rather than boundary data) defines index `n`.
    pub fn in_recurrence_domain(&self, n: u64) -> bool {
        n > 0 && n.is_multiple_of(self.clock.period)
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator {
            system: self,
            memo: HashMap::new(),
        }
    }
}

/// Memoized evaluation session. One session is single-threaded; separate
/// sessions over the same system are independent.
pub struct Evaluator<'a> {
    system: &'a MultirateSystem,
    memo: HashMap<(usize, u64), f64>,
}

impl Evaluator<'_> {
    /// `x_i(n)`.
    pub fn state(&mut self, process: usize, n: i64) -> Result<f64> {
        if n < 0 {
            return Err(Error::argument(format!("index {n} must be non-negative")));
        }
        if process >= self.system.processes() {
            return Err(Error::argument(format!(
                "process {process} out of range for {} processes",
                self.system.processes()
            )));
        }
        self.eval(process, n as u64)
    }

    /// Number of memoized values.
    pub fn cached(&self) -> usize {
        self.memo.len()
    }

    fn eval(&mut self, i: usize, n: u64) -> Result<f64> {
        if let Some(&v) = self.memo.get(&(i, n)) {
            return Ok(v);
        }
        let sys = self.system;
        let value = if sys.in_recurrence_domain(n) {
            let m = sys.processes();
            let mut acc = 0.0;
            for j in 0..m {
                let a = sys.a[(i, j)];
                if a != 0.0 {
                    acc += a * self.eval(j, n / sys.clocks[j])?;
                }
            }
            if let (Some(b), Some(input)) = (&sys.b, &sys.input) {
                for j in 0..m {
                    let coef = b[(i, j)];
                    if coef != 0.0 {
                        let at = n / sys.clocks[j];
                        let u = input[j]
                            .value(at)
                            .ok_or(Error::MissingInput { process: j, index: at })?;
                        if !u.is_finite() {
                            return Err(Error::Value(format!("input u_{j}({at}) is not finite")));
                        }
                        acc += coef * u;
                    }
                }
            }
            if !acc.is_finite() {
                return Err(Error::NumericOverflow {
                    at: format!("x_{i}({n})"),
                });
            }
            acc
        } else {
            let v = sys.boundary[i]
                .value(n)
                .ok_or(Error::MissingBoundary { process: i, index: n })?;
            if !v.is_finite() {
                return Err(Error::Value(format!("boundary value x_{i}({n}) is not finite")));
            }
            v
        };
        self.memo.insert((i, n), value);
        Ok(value)
    }
}

/// `x_i(n)` in a fresh session.
pub fn eval_state(system: &MultirateSystem, process: usize, n: i64) -> Result<f64> {
    system.evaluator().state(process, n)
}

/// States at global ticks `n = k·d` for `k = 0..=horizon`, one row per
/// tick, sharing one memo cache across the sweep.
pub fn trajectory_on_grid(system: &MultirateSystem, horizon: u64) -> Result<Vec<Vec<f64>>> {
    let d = system.global_clock().period;
    let mut session = system.evaluator();
    (0..=horizon)
        .map(|k| {
            let n = k
                .checked_mul(d)
                .filter(|&n| n <= i64::MAX as u64)
                .ok_or_else(|| Error::argument(format!("tick {k} overflows the index range")))?;
            (0..system.processes()).map(|i| session.eval(i, n)).collect()
        })
        .collect()
}
