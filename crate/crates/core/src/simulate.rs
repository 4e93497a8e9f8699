//! Trajectory generation for discrete and continuous systems.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expm::matrix_exponential;
use crate::system::{CoefficientSet, TimeKind, TssrSystem};
use crate::tensor::Tensor;

/// Input applied to a system over time.
///
/// Table samples are keyed by step index (discrete) or time stamp
/// (continuous) and held constant until the next key.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSignal {
    Zero,
    Constant(Tensor),
    Table(Vec<(f64, Tensor)>),
}

impl InputSignal {
    /// Table signal; keys must start at 0 and strictly increase.
    pub fn table(samples: Vec<(f64, Tensor)>) -> Result<Self> {
        let signal = InputSignal::Table(samples);
        signal.check_keys()?;
        Ok(signal)
    }

    fn check_keys(&self) -> Result<()> {
        if let InputSignal::Table(samples) = self {
            match samples.first() {
                None => return Err(Error::argument("input table is empty")),
                Some((k, _)) if *k != 0.0 => {
                    return Err(Error::argument(format!("input table must start at 0, starts at {k}")))
                }
                _ => {}
            }
            for w in samples.windows(2) {
                if w[1].0 <= w[0].0 || !w[1].0.is_finite() {
                    return Err(Error::argument(format!(
                        "input table keys must strictly increase ({} then {})",
                        w[0].0, w[1].0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks the signal against a system's input shape.
    pub fn validate(&self, input_shape: Option<&[usize]>) -> Result<()> {
        self.check_keys()?;
        let tensors: Vec<&Tensor> = match self {
            InputSignal::Zero => return Ok(()),
            InputSignal::Constant(t) => vec![t],
            InputSignal::Table(samples) => samples.iter().map(|(_, t)| t).collect(),
        };
        let Some(shape) = input_shape else {
            return Err(Error::argument(
                "system has no input; only a zero input signal is allowed",
            ));
        };
        for t in tensors {
            if t.shape() != shape {
                return Err(Error::shape(format!(
                    "input sample shape {:?} does not match input shape {shape:?}",
                    t.shape()
                )));
            }
        }
        Ok(())
    }

    /// Index of the table piece in force at `when` (0 for non-table signals).
    fn piece_index(&self, when: f64) -> usize {
        match self {
            InputSignal::Table(samples) => samples.partition_point(|(k, _)| *k <= when).saturating_sub(1),
            _ => 0,
        }
    }

    /// Value at `when`, or `None` for a system without input.
    pub fn value_at(&self, when: f64, input_shape: Option<&[usize]>) -> Result<Option<Tensor>> {
        let Some(shape) = input_shape else {
            return Ok(None);
        };
        Ok(Some(match self {
            InputSignal::Zero => Tensor::zeros(shape)?,
            InputSignal::Constant(t) => t.clone(),
            InputSignal::Table(samples) => samples[self.piece_index(when)].1.clone(),
        }))
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            InputSignal::Table(samples) => samples.iter().map(|(k, _)| *k).collect(),
            _ => Vec::new(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, InputSignal::Zero)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub when: f64,
    pub state: Tensor,
    pub output: Tensor,
}

/// Samples of a simulation run, ordered by strictly increasing time.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn final_state(&self) -> Option<&Tensor> {
        self.samples.last().map(|s| &s.state)
    }

    pub fn states(&self) -> impl Iterator<Item = &Tensor> {
        self.samples.iter().map(|s| &s.state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Exact,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "exact" => Ok(Method::Exact),
            other => Err(Error::argument(format!(
                "unknown method {other:?}, expected rk4 or exact"
            ))),
        }
    }
}

fn check_state(system: &TssrSystem, state: &Tensor) -> Result<()> {
    if state.shape() != system.state_shape() {
        return Err(Error::shape(format!(
            "state shape {:?} does not match system state shape {:?}",
            state.shape(),
            system.state_shape()
        )));
    }
    Ok(())
}

fn check_input(system: &TssrSystem, input: Option<&Tensor>) -> Result<()> {
    match (system.input_shape(), input) {
        (None, None) => Ok(()),
        (Some(shape), Some(u)) if u.shape() == shape => Ok(()),
        (Some(shape), Some(u)) => Err(Error::shape(format!(
            "input shape {:?} does not match system input shape {shape:?}",
            u.shape()
        ))),
        (Some(shape), None) => Err(Error::shape(format!("system expects an input of shape {shape:?}"))),
        (None, Some(_)) => Err(Error::shape("system has no input but one was supplied")),
    }
}

/// `C·x + D·u`, or the state itself when there is no `C`.
fn output_of(co: &CoefficientSet, state: &Tensor, input: Option<&Tensor>) -> Result<Tensor> {
    let Some(c) = &co.c else {
        return Ok(state.clone());
    };
    let y = c.contract_last(state)?;
    match (&co.d, input) {
        (Some(d), Some(u)) => y.add(&d.contract_last(u)?),
        _ => Ok(y),
    }
}

/// One update `X(n+1) = A(n)·X(n) + B(n)·U(n)` together with the output
/// `Y(n) = C(n)·X(n) + D(n)·U(n)`.
pub fn step_discrete(system: &TssrSystem, state: &Tensor, input: Option<&Tensor>, n: u64) -> Result<(Tensor, Tensor)> {
    check_state(system, state)?;
    check_input(system, input)?;
    let co = system.coefficients_at(n as f64)?;
    let ax = co.a.contract_last(state)?;
    let next = match (&co.b, input) {
        (Some(b), Some(u)) => ax.add(&b.contract_last(u)?)?,
        _ => ax,
    };
    let output = output_of(co, state, input)?;
    Ok((next, output))
}

fn overflow(at: impl Into<String>) -> Error {
    Error::NumericOverflow { at: at.into() }
}

/// Iterates the discrete system for `steps` steps, recording samples at
/// `n = 0..=steps`.
pub fn simulate_discrete(system: &TssrSystem, x0: &Tensor, input: &InputSignal, steps: usize) -> Result<Trajectory> {
    if system.time_kind() != TimeKind::Discrete {
        return Err(Error::argument("simulate_discrete needs a discrete-time system"));
    }
    check_state(system, x0)?;
    input.validate(system.input_shape())?;

    let mut samples = Vec::with_capacity(steps + 1);
    let mut state = x0.clone();
    for n in 0..=steps {
        let u = input.value_at(n as f64, system.input_shape())?;
        let (next, output) = step_discrete(system, &state, u.as_ref(), n as u64)?;
        if !output.is_finite() {
            return Err(overflow(format!("step {n}")));
        }
        samples.push(Sample {
            when: n as f64,
            state,
            output,
        });
        if n < steps && !next.is_finite() {
            return Err(overflow(format!("step {}", n + 1)));
        }
        state = next;
    }
    Ok(Trajectory { samples })
}

/// Unfolded matrices of one coefficient set.
struct FlatCoefficients {
    a: DMatrix<f64>,
    b: Option<DMatrix<f64>>,
}

fn flatten(system: &TssrSystem, co: &CoefficientSet) -> Result<FlatCoefficients> {
    let r = system.state_shape().len();
    Ok(FlatCoefficients {
        a: co.a.unfold_matrix(r)?,
        b: co.b.as_ref().map(|b| b.unfold_matrix(r)).transpose()?,
    })
}

/// Closed-form solution `X(n) = Aⁿ·x0 + Σ_{k<n} A^{n-1-k}·B·u(k)` of a
/// time-invariant discrete system, evaluated with explicit matrix powers of
/// the unfolded operators.
pub fn solve_discrete_closed_form(system: &TssrSystem, x0: &Tensor, input: &InputSignal, n: usize) -> Result<Tensor> {
    if !system.is_time_invariant() {
        return Err(Error::Unsupported(
            "closed-form solution needs a time-invariant system; use simulate_discrete".into(),
        ));
    }
    check_state(system, x0)?;
    input.validate(system.input_shape())?;
    let flat = flatten(system, &system.segments()[0].coefficients)?;
    let q = system.state_dim();

    let mut powers = Vec::with_capacity(n + 1);
    powers.push(DMatrix::<f64>::identity(q, q));
    for j in 1..=n {
        powers.push(&flat.a * &powers[j - 1]);
    }
    let mut v = &powers[n] * x0.to_dvector();
    if let Some(b) = &flat.b {
        if !input.is_zero() {
            for k in 0..n {
                let u = input
                    .value_at(k as f64, system.input_shape())?
                    .expect("system has input");
                v += &powers[n - 1 - k] * (b * u.to_dvector());
            }
        }
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(overflow(format!("step {n}")));
    }
    Tensor::from_dvector(&v, system.state_shape())
}

/// Sample times `0, h, 2h, …, t_end`, with the final interval truncated.
fn time_grid(t_end: f64, h: f64) -> Vec<f64> {
    let mut grid = vec![0.0];
    let mut k = 1u64;
    loop {
        let t = k as f64 * h;
        if t >= t_end * (1.0 - 1e-12) {
            break;
        }
        grid.push(t);
        k += 1;
    }
    grid.push(t_end);
    grid
}

fn rk4_step(a: &DMatrix<f64>, forcing: Option<&DVector<f64>>, v: &DVector<f64>, dt: f64) -> DVector<f64> {
    let f = |x: &DVector<f64>| -> DVector<f64> {
        let ax = a * x;
        match forcing {
            Some(g) => ax + g,
            None => ax,
        }
    };
    let k1 = f(v);
    let k2 = f(&(v + &k1 * (dt / 2.0)));
    let k3 = f(&(v + &k2 * (dt / 2.0)));
    let k4 = f(&(v + &k3 * dt));
    v + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// `(Φ, γ)` with `v(t+dt) = Φ·v(t) + γ`.
type Propagator = (DMatrix<f64>, Option<DVector<f64>>);

/// Propagator for constant `A` and forcing `B·u`.
fn exact_propagator(a: &DMatrix<f64>, forcing: Option<&DVector<f64>>, dt: f64) -> Result<Propagator> {
    let q = a.nrows();
    match forcing {
        None => Ok((matrix_exponential(a, dt)?, None)),
        Some(g) => {
            // exp([[A, g], [0, 0]]·dt) = [[Φ, γ], [0, 1]]
            let mut aug = DMatrix::<f64>::zeros(q + 1, q + 1);
            aug.view_mut((0, 0), (q, q)).copy_from(a);
            aug.view_mut((0, q), (q, 1)).copy_from(g);
            let e = matrix_exponential(&aug, dt)?;
            let phi = e.view((0, 0), (q, q)).into_owned();
            let gamma = e.view((0, q), (q, 1)).column(0).into_owned();
            Ok((phi, Some(gamma)))
        }
    }
}

/// Integrates `dX/dt = A(t)·X + B(t)·U(t)` on the unfolded state vector.
///
/// Samples are taken at `0, h, 2h, …, t_end`; `h` defaults to `t_end/1000`.
/// Intervals are split at coefficient and input breakpoints so each
/// sub-interval has constant `A`, `B` and `u`.
pub fn simulate_continuous(
    system: &TssrSystem,
    x0: &Tensor,
    input: &InputSignal,
    t_end: f64,
    h: Option<f64>,
    method: Method,
) -> Result<Trajectory> {
    if system.time_kind() != TimeKind::Continuous {
        return Err(Error::argument("simulate_continuous needs a continuous-time system"));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::argument(format!("t_end must be positive, got {t_end}")));
    }
    let h = h.unwrap_or(t_end / 1000.0);
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::argument(format!("step size must be positive, got {h}")));
    }
    check_state(system, x0)?;
    input.validate(system.input_shape())?;

    let flats = system
        .segments()
        .iter()
        .map(|s| flatten(system, &s.coefficients))
        .collect::<Result<Vec<_>>>()?;
    let mut breaks: Vec<f64> = system.segments().iter().map(|s| s.start).collect();
    breaks.extend(input.breakpoints());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let grid = time_grid(t_end, h);
    let sample = |t: f64, v: &DVector<f64>| -> Result<Sample> {
        let state = Tensor::from_dvector(v, system.state_shape())?;
        let u = input.value_at(t, system.input_shape())?;
        let output = output_of(system.coefficients_at(t)?, &state, u.as_ref())?;
        if !output.is_finite() {
            return Err(overflow(format!("t = {t}")));
        }
        Ok(Sample { when: t, state, output })
    };

    let mut cache: HashMap<(usize, usize, u64), Propagator> = HashMap::new();
    let mut v = x0.to_dvector();
    let mut samples = Vec::with_capacity(grid.len());
    samples.push(sample(0.0, &v)?);

    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let mut cuts = vec![t0];
        cuts.extend(breaks.iter().copied().filter(|&b| b > t0 && b < t1));
        cuts.push(t1);

        for piece in cuts.windows(2) {
            let (s0, s1) = (piece[0], piece[1]);
            let dt = s1 - s0;
            let seg = system.segment_index_at(s0)?;
            let flat = &flats[seg];
            let forcing = match (&flat.b, input.is_zero()) {
                (Some(b), false) => {
                    let u = input.value_at(s0, system.input_shape())?.expect("system has input");
                    Some(b * u.to_dvector())
                }
                _ => None,
            };
            v = match method {
                Method::Rk4 => rk4_step(&flat.a, forcing.as_ref(), &v, dt),
                Method::Exact => {
                    let key = (seg, input.piece_index(s0), dt.to_bits());
                    let (phi, gamma) = match cache.entry(key) {
                        Entry::Occupied(e) => e.into_mut(),
                        Entry::Vacant(e) => e.insert(exact_propagator(&flat.a, forcing.as_ref(), dt)?),
                    };
                    let (phi, gamma) = (&*phi, &*gamma);
                    match gamma {
                        Some(g) => phi * &v + g,
                        None => phi * &v,
                    }
                }
            };
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(overflow(format!("t = {t1}")));
        }
        samples.push(sample(t1, &v)?);
    }
    Ok(Trajectory { samples })
}
