//! JSON system files.
//!
//! A linear system file looks like
//!
//! ```json
//! {
//!   "time": "discrete",
//!   "state_shape": [2],
//!   "input_shape": [1],
//!   "schedule": [
//!     { "start": 0, "A": {"shape": [2, 2], "data": [1, 0, 0, 1]},
//!                   "B": {"shape": [2, 1], "data": [0, 1]} }
//!   ],
//!   "x0": {"shape": [2], "data": [1, 0]},
//!   "input": {"kind": "constant", "value": {"shape": [1], "data": [0.5]}}
//! }
//! ```
//!
//! and a multirate file like
//!
//! ```json
//! {
//!   "kind": "multirate",
//!   "A": {"shape": [2, 2], "data": [1, 1, 0, 1]},
//!   "clocks": [2, 3],
//!   "boundary": [{"kind": "index"}, {"kind": "constant", "value": 1}]
//! }
//! ```
//!
//! Tensors are always `{shape, data}` with row-major data. `boundary` and
//! `input` of a multirate file are either one sequence shared by every
//! process or a list with one sequence per process.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multirate::{MultirateSystem, Sequence};
use crate::simulate::InputSignal;
use crate::system::{CoefficientSet, Segment, SystemShapes, TimeKind, TssrSystem};
use crate::tensor::Tensor;

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct TensorDto {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl TensorDto {
    fn from_tensor(t: &Tensor) -> Self {
        TensorDto {
            shape: t.shape().to_vec(),
            data: t.data().to_vec(),
        }
    }

    fn from_matrix(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            data.extend(m.row(i).iter());
        }
        TensorDto {
            shape: vec![m.nrows(), m.ncols()],
            data,
        }
    }

    fn to_tensor(&self, field: &str) -> Result<Tensor> {
        Tensor::new(self.shape.clone(), self.data.clone()).map_err(|e| Error::Parse {
            location: format!("field \"{field}\""),
            message: e.to_string(),
        })
    }

    fn to_matrix(&self, field: &str) -> Result<DMatrix<f64>> {
        let t = self.to_tensor(field)?;
        if t.order() != 2 {
            return Err(Error::Parse {
                location: format!("field \"{field}\""),
                message: format!("expected a matrix, got shape {:?}", t.shape()),
            });
        }
        Ok(DMatrix::from_row_slice(t.shape()[0], t.shape()[1], t.data()))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct SegmentDto {
    start: f64,
    #[serde(rename = "A")]
    a: TensorDto,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b: Option<TensorDto>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    c: Option<TensorDto>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    d: Option<TensorDto>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct TableSampleDto {
    at: f64,
    value: TensorDto,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum InputDto {
    Zero,
    Constant { value: TensorDto },
    Table { samples: Vec<TableSampleDto> },
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug)]
#[serde(rename_all = "lowercase")]
enum TimeDto {
    Discrete,
    Continuous,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct LinearFileDto {
    time: TimeDto,
    state_shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_shape: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output_shape: Option<Vec<usize>>,
    schedule: Vec<SegmentDto>,
    x0: TensorDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<InputDto>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SequenceDto {
    Zero,
    Constant { value: f64 },
    Index,
    Table { values: Vec<(u64, f64)> },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
enum SequencesDto {
    Shared(SequenceDto),
    PerProcess(Vec<SequenceDto>),
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug)]
#[serde(rename_all = "lowercase")]
enum MultirateTag {
    Multirate,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct MultirateFileDto {
    kind: MultirateTag,
    #[serde(rename = "A")]
    a: TensorDto,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b: Option<TensorDto>,
    clocks: Vec<u64>,
    boundary: SequencesDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<SequencesDto>,
}

/// A linear system together with its initial state and input signal.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystemFile {
    pub system: TssrSystem,
    pub x0: Tensor,
    pub input: InputSignal,
}

#[derive(Clone, Debug)]
pub enum SystemFile {
    Linear(LinearSystemFile),
    Multirate(MultirateSystem),
}

fn json_error(source: &str, e: serde_json::Error) -> Error {
    Error::Parse {
        location: format!("{source}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    }
}

impl LinearFileDto {
    fn into_domain(self) -> Result<LinearSystemFile> {
        let time_kind = match self.time {
            TimeDto::Discrete => TimeKind::Discrete,
            TimeDto::Continuous => TimeKind::Continuous,
        };
        let segments = self
            .schedule
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let field = |name: &str| format!("schedule[{i}].{name}");
                let opt = |t: &Option<TensorDto>, name: &str| t.as_ref().map(|t| t.to_tensor(&field(name))).transpose();
                Ok(Segment {
                    start: s.start,
                    coefficients: CoefficientSet::new(
                        s.a.to_tensor(&field("A"))?,
                        opt(&s.b, "B")?,
                        opt(&s.c, "C")?,
                        opt(&s.d, "D")?,
                    ),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let shapes = SystemShapes::new(self.state_shape, self.input_shape, self.output_shape);
        let system = TssrSystem::build(time_kind, shapes, segments)?;

        let x0 = self.x0.to_tensor("x0")?;
        if x0.shape() != system.state_shape() {
            return Err(Error::shape(format!(
                "x0 has shape {:?}, state shape is {:?}",
                x0.shape(),
                system.state_shape()
            )));
        }
        let input = match self.input {
            None | Some(InputDto::Zero) => InputSignal::Zero,
            Some(InputDto::Constant { value }) => InputSignal::Constant(value.to_tensor("input.value")?),
            Some(InputDto::Table { samples }) => InputSignal::table(
                samples
                    .iter()
                    .enumerate()
                    .map(|(i, s)| Ok((s.at, s.value.to_tensor(&format!("input.samples[{i}].value"))?)))
                    .collect::<Result<Vec<_>>>()?,
            )?,
        };
        input.validate(system.input_shape())?;
        Ok(LinearSystemFile { system, x0, input })
    }

    fn from_domain(file: &LinearSystemFile) -> Self {
        let sys = &file.system;
        let dto = |t: &Option<Tensor>| t.as_ref().map(TensorDto::from_tensor);
        LinearFileDto {
            time: match sys.time_kind() {
                TimeKind::Discrete => TimeDto::Discrete,
                TimeKind::Continuous => TimeDto::Continuous,
            },
            state_shape: sys.state_shape().to_vec(),
            input_shape: sys.shapes().input.clone(),
            output_shape: sys.shapes().output.clone(),
            schedule: sys
                .segments()
                .iter()
                .map(|s| SegmentDto {
                    start: s.start,
                    a: TensorDto::from_tensor(&s.coefficients.a),
                    b: dto(&s.coefficients.b),
                    c: dto(&s.coefficients.c),
                    d: dto(&s.coefficients.d),
                })
                .collect(),
            x0: TensorDto::from_tensor(&file.x0),
            input: Some(match &file.input {
                InputSignal::Zero => InputDto::Zero,
                InputSignal::Constant(t) => InputDto::Constant {
                    value: TensorDto::from_tensor(t),
                },
                InputSignal::Table(samples) => InputDto::Table {
                    samples: samples
                        .iter()
                        .map(|(at, t)| TableSampleDto {
                            at: *at,
                            value: TensorDto::from_tensor(t),
                        })
                        .collect(),
                },
            }),
        }
    }
}

impl SequenceDto {
    fn into_domain(self) -> Sequence {
        match self {
            SequenceDto::Zero => Sequence::Constant(0.0),
            SequenceDto::Constant { value } => Sequence::Constant(value),
            SequenceDto::Index => Sequence::Index,
            SequenceDto::Table { values } => Sequence::Table(values.into_iter().collect()),
        }
    }

    fn from_domain(seq: &Sequence) -> Result<Self> {
        Ok(match seq {
            Sequence::Constant(v) => SequenceDto::Constant { value: *v },
            Sequence::Index => SequenceDto::Index,
            Sequence::Table(t) => SequenceDto::Table {
                values: t.iter().map(|(&n, &v)| (n, v)).collect(),
            },
            Sequence::Custom(_) => {
                return Err(Error::Unsupported(
                    "custom sequences cannot be written to a file".into(),
                ))
            }
        })
    }
}

impl SequencesDto {
    fn expand(self, processes: usize, field: &str) -> Result<Vec<Sequence>> {
        match self {
            SequencesDto::Shared(s) => Ok(vec![s.into_domain(); processes]),
            SequencesDto::PerProcess(list) if list.len() == processes => {
                Ok(list.into_iter().map(SequenceDto::into_domain).collect())
            }
            SequencesDto::PerProcess(list) => Err(Error::Parse {
                location: format!("field \"{field}\""),
                message: format!("{} sequences for {processes} processes", list.len()),
            }),
        }
    }
}

impl MultirateFileDto {
    fn into_domain(self) -> Result<MultirateSystem> {
        let a = self.a.to_matrix("A")?;
        let b = self.b.as_ref().map(|b| b.to_matrix("B")).transpose()?;
        let m = a.nrows();
        let boundary = self.boundary.expand(m, "boundary")?;
        let input = self.input.map(|u| u.expand(m, "input")).transpose()?;
        MultirateSystem::new(a, b, self.clocks, boundary, input)
    }

    fn from_domain(sys: &MultirateSystem) -> Result<Self> {
        let list = |seqs: &[Sequence]| -> Result<SequencesDto> {
            Ok(SequencesDto::PerProcess(
                seqs.iter().map(SequenceDto::from_domain).collect::<Result<_>>()?,
            ))
        };
        Ok(MultirateFileDto {
            kind: MultirateTag::Multirate,
            a: TensorDto::from_matrix(sys.a()),
            b: sys.b().map(TensorDto::from_matrix),
            clocks: sys.clocks().to_vec(),
            boundary: list(sys.boundary())?,
            input: sys.input().map(list).transpose()?,
        })
    }
}

/// Parses system file text. `source` names the origin in error locations.
pub fn parse_system_str(text: &str, source: &str) -> Result<SystemFile> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
    let is_multirate = value.get("kind").and_then(|k| k.as_str()) == Some("multirate");
    if is_multirate {
        let dto: MultirateFileDto = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
        Ok(SystemFile::Multirate(dto.into_domain()?))
    } else {
        let dto: LinearFileDto = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
        Ok(SystemFile::Linear(dto.into_domain()?))
    }
}

pub fn parse_system_file(path: &Path) -> Result<SystemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_system_str(&text, &path.display().to_string())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("file DTOs always serialize");
    text.push('\n');
    text
}

/// Serializes a linear system file.
pub fn write_linear_system(file: &LinearSystemFile) -> String {
    to_json(&LinearFileDto::from_domain(file))
}

/// Serializes a multirate system. Custom sequences have no file form.
pub fn write_multirate_system(system: &MultirateSystem) -> Result<String> {
    Ok(to_json(&MultirateFileDto::from_domain(system)?))
}

pub fn write_system(file: &SystemFile) -> Result<String> {
    match file {
        SystemFile::Linear(f) => Ok(write_linear_system(f)),
        SystemFile::Multirate(m) => write_multirate_system(m),
    }
}
