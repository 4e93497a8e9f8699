//! Validated linear system definitions.
//!
//! A [`TssrSystem`] couples a state tensor of arbitrary order to its own
//! next value (or derivative) and to an input tensor through coupling
//! tensors `A`, `B`, `C`, `D`. Shapes follow the operator layout
//! `[rows..., cols...]` so that every coupling acts by
//! [`Tensor::contract_last`].

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TimeKind {
    Discrete,
    Continuous,
}

impl TimeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeKind::Discrete => "discrete",
            TimeKind::Continuous => "continuous",
        }
    }
}

/// Declared mode sizes of state, input and output.
///
/// `input: None` marks a system without input (no `B`, no `D`).
/// `output: None` means there is no `C`: the output is the state itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemShapes {
    pub state: Vec<usize>,
    pub input: Option<Vec<usize>>,
    pub output: Option<Vec<usize>>,
}

impl SystemShapes {
    pub fn new(state: Vec<usize>, input: Option<Vec<usize>>, output: Option<Vec<usize>>) -> Self {
        SystemShapes { state, input, output }
    }
}

/// One set of coupling tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    pub a: Tensor,
    pub b: Option<Tensor>,
    pub c: Option<Tensor>,
    pub d: Option<Tensor>,
}

impl CoefficientSet {
    pub fn new(a: Tensor, b: Option<Tensor>, c: Option<Tensor>, d: Option<Tensor>) -> Self {
        CoefficientSet { a, b, c, d }
    }
}

/// Coefficients in force from `start` (a step index in discrete time, a
/// time stamp in continuous time) until the next segment begins.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub coefficients: CoefficientSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TssrSystem {
    time_kind: TimeKind,
    shapes: SystemShapes,
    segments: Vec<Segment>,
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

fn check_coupling(
    segment: usize,
    name: &str,
    tensor: Option<&Tensor>,
    expected: Option<Vec<usize>>,
    reason: &str,
) -> Result<()> {
    match (tensor, expected) {
        (Some(t), Some(shape)) if t.shape() == shape.as_slice() => Ok(()),
        (Some(t), Some(shape)) => Err(Error::shape(format!(
            "segment {segment}: coefficient {name} has shape {:?} (order {}), expected {:?} (order {})",
            t.shape(),
            t.order(),
            shape,
            shape.len()
        ))),
        (None, Some(shape)) => Err(Error::shape(format!(
            "segment {segment}: coefficient {name} is missing, expected shape {shape:?}"
        ))),
        (Some(_), None) => Err(Error::shape(format!(
            "segment {segment}: coefficient {name} given but {reason}"
        ))),
        (None, None) => Ok(()),
    }
}

impl TssrSystem {
    /// Validates shapes and schedule and assembles a system.
    pub fn build(time_kind: TimeKind, shapes: SystemShapes, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::argument("coefficient schedule is empty"));
        }
        for (label, modes) in [
            ("state", Some(&shapes.state)),
            ("input", shapes.input.as_ref()),
            ("output", shapes.output.as_ref()),
        ] {
            if let Some(modes) = modes {
                if modes.contains(&0) {
                    return Err(Error::shape(format!("{label} shape {modes:?} has a zero-size mode")));
                }
            }
        }

        let mut previous: Option<f64> = None;
        for (i, seg) in segments.iter().enumerate() {
            let start = seg.start;
            if !start.is_finite() {
                return Err(Error::argument(format!("segment {i}: start {start} is not finite")));
            }
            if time_kind == TimeKind::Discrete && start.fract() != 0.0 {
                return Err(Error::argument(format!(
                    "segment {i}: discrete segment start {start} is not a step index"
                )));
            }
            match previous {
                None if start != 0.0 => {
                    return Err(Error::argument(format!(
                        "first segment must start at 0, starts at {start}"
                    )))
                }
                Some(p) if start <= p => {
                    return Err(Error::argument(format!(
                        "segment {i}: start {start} does not follow previous start {p}"
                    )))
                }
                _ => {}
            }
            previous = Some(start);
        }

        let state = &shapes.state;
        let has_d = segments[0].coefficients.d.is_some();
        for (i, seg) in segments.iter().enumerate() {
            let co = &seg.coefficients;
            check_coupling(i, "A", Some(&co.a), Some(concat(state, state)), "")?;
            check_coupling(
                i,
                "B",
                co.b.as_ref(),
                shapes.input.as_ref().map(|u| concat(state, u)),
                "the system declares no input",
            )?;
            check_coupling(
                i,
                "C",
                co.c.as_ref(),
                shapes.output.as_ref().map(|y| concat(y, state)),
                "the system declares no output shape",
            )?;
            let d_expected = match (&shapes.output, &shapes.input) {
                (Some(y), Some(u)) if co.d.is_some() || has_d => Some(concat(y, u)),
                _ => None,
            };
            check_coupling(
                i,
                "D",
                co.d.as_ref(),
                d_expected,
                "D needs both an input and an output shape",
            )?;
        }

        Ok(TssrSystem {
            time_kind,
            shapes,
            segments,
        })
    }

    pub fn time_kind(&self) -> TimeKind {
        self.time_kind
    }

    pub fn shapes(&self) -> &SystemShapes {
        &self.shapes
    }

    pub fn state_shape(&self) -> &[usize] {
        &self.shapes.state
    }

    pub fn input_shape(&self) -> Option<&[usize]> {
        self.shapes.input.as_deref()
    }

    /// Shape of the output tensor; the state shape when there is no `C`.
    pub fn output_shape(&self) -> &[usize] {
        self.shapes.output.as_deref().unwrap_or(&self.shapes.state)
    }

    pub fn has_input(&self) -> bool {
        self.shapes.input.is_some()
    }

    pub fn has_output_map(&self) -> bool {
        self.shapes.output.is_some()
    }

    /// Product of state mode sizes.
    pub fn state_dim(&self) -> usize {
        self.shapes.state.iter().product()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_time_invariant(&self) -> bool {
        self.segments.len() == 1
    }

    /// Index of the segment in force at `when`.
    pub fn segment_index_at(&self, when: f64) -> Result<usize> {
        if when.is_nan() || when < 0.0 {
            return Err(Error::argument(format!("time {when} must be non-negative")));
        }
        Ok(self.segments.partition_point(|s| s.start <= when) - 1)
    }

    /// Coefficients of the last segment starting at or before `when`.
    pub fn coefficients_at(&self, when: f64) -> Result<&CoefficientSet> {
        Ok(&self.segments[self.segment_index_at(when)?].coefficients)
    }

    /// The equivalent order-1 system obtained by unfolding every coupling
    /// tensor and flattening every shape.
    pub fn unfolded(&self) -> Result<TssrSystem> {
        let r = self.shapes.state.len();
        let q: usize = self.state_dim();
        let flat = |s: &[usize]| vec![s.iter().product::<usize>()];
        let p = self.input_shape().map(flat);
        let s = self.shapes.output.as_deref().map(flat);
        let out_modes = self.shapes.output.as_ref().map_or(0, |y| y.len());

        let segments = self
            .segments
            .iter()
            .map(|seg| {
                let co = &seg.coefficients;
                let a = co.a.unfold(r)?;
                let b = co.b.as_ref().map(|b| b.unfold(r)).transpose()?;
                let c = co.c.as_ref().map(|c| c.unfold(out_modes)).transpose()?;
                let d = co.d.as_ref().map(|d| d.unfold(out_modes)).transpose()?;
                Ok(Segment {
                    start: seg.start,
                    coefficients: CoefficientSet { a, b, c, d },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TssrSystem::build(self.time_kind, SystemShapes::new(vec![q], p, s), segments)
    }
}

/// Block-diagonal lift of a matrix operator onto matrix states with
/// `columns` columns: `T[(i,α),(j,β)] = P[i,j]` when `α = β`, else 0.
fn lift_operator(p: &Tensor, columns: usize) -> Tensor {
    let (rows, cols) = (p.shape()[0], p.shape()[1]);
    let mut data = vec![0.0; rows * columns * cols * columns];
    for i in 0..rows {
        for alpha in 0..columns {
            for j in 0..cols {
                let offset = ((i * columns + alpha) * cols + j) * columns + alpha;
                data[offset] = p.data()[i * cols + j];
            }
        }
    }
    Tensor::from_raw(vec![rows, columns, cols, columns], data)
}

fn require_matrix(name: &str, t: &Tensor) -> Result<(usize, usize)> {
    if t.order() != 2 {
        return Err(Error::shape(format!(
            "{name} must be a matrix, got order {}",
            t.order()
        )));
    }
    Ok((t.shape()[0], t.shape()[1]))
}

/// Matrix-state system `Z' = A·Z + B·U`, `W = C·Z + D·U` in which the same
/// coupling matrices act on every one of the `columns` state columns.
///
/// State shape is `[m, columns]`, input `[k, columns]`, output `[s, columns]`.
pub fn lift_matrix_state(
    time_kind: TimeKind,
    a: &Tensor,
    b: Option<&Tensor>,
    c: Option<&Tensor>,
    d: Option<&Tensor>,
    columns: usize,
) -> Result<TssrSystem> {
    let (m, m2) = require_matrix("A", a)?;
    if m != m2 {
        return Err(Error::shape(format!("A must be square, got {m}x{m2}")));
    }
    if columns < 1 {
        return Err(Error::argument("matrix state needs at least one column"));
    }
    let k = match b {
        Some(b) => {
            let (rows, k) = require_matrix("B", b)?;
            if rows != m {
                return Err(Error::shape(format!("B has {rows} rows, A has {m}")));
            }
            Some(k)
        }
        None => None,
    };
    let s = match c {
        Some(c) => {
            let (s, cols) = require_matrix("C", c)?;
            if cols != m {
                return Err(Error::shape(format!("C has {cols} columns, A has {m} rows")));
            }
            Some(s)
        }
        None => None,
    };
    if let Some(d) = d {
        let (rows, cols) = require_matrix("D", d)?;
        match (s, k) {
            (Some(s), Some(k)) if rows == s && cols == k => {}
            (Some(s), Some(k)) => return Err(Error::shape(format!("D is {rows}x{cols}, expected {s}x{k}"))),
            _ => return Err(Error::shape("D needs both B and C")),
        }
    }

    let shapes = SystemShapes::new(
        vec![m, columns],
        k.map(|k| vec![k, columns]),
        s.map(|s| vec![s, columns]),
    );
    let coefficients = CoefficientSet {
        a: lift_operator(a, columns),
        b: b.map(|b| lift_operator(b, columns)),
        c: c.map(|c| lift_operator(c, columns)),
        d: d.map(|d| lift_operator(d, columns)),
    };
    TssrSystem::build(
        time_kind,
        shapes,
        vec![Segment {
            start: 0.0,
            coefficients,
        }],
    )
}
