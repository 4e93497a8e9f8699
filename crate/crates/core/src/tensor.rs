//! Dense real tensors and the multilinear operations the rest of the crate
//! is built from.
//!
//! Storage is row-major throughout: the last index varies fastest. The same
//! layout is used by [`Tensor::vec`], [`Tensor::unfold`], the JSON file
//! format and the CSV column order.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense multi-index array of finite `f64` values.
///
/// An empty shape denotes a scalar (order 0) holding exactly one value.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

fn element_count(shape: &[usize]) -> usize {
    shape.iter().product()
}

impl Tensor {
    /// Builds a tensor from a shape and row-major data.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if let Some(axis) = shape.iter().position(|&s| s == 0) {
            return Err(Error::shape(format!(
                "mode {axis} has size 0; mode sizes must be at least 1"
            )));
        }
        let expected = element_count(&shape);
        if data.len() != expected {
            return Err(Error::shape(format!(
                "shape {shape:?} needs {expected} entries, got {}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Value(format!("entry {pos} is not finite ({})", data[pos])));
        }
        Ok(Tensor { shape, data })
    }

    /// Internal constructor for results whose shape is known to be consistent.
    /// Finiteness is not checked; callers that may overflow check it themselves.
    pub(crate) fn from_raw(shape: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(element_count(&shape), data.len());
        Tensor { shape, data }
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Tensor::new(Vec::new(), vec![value])
    }

    pub fn zeros(shape: &[usize]) -> Result<Self> {
        Tensor::new(shape.to_vec(), vec![0.0; element_count(shape)])
    }

    /// Order-2 identity of size `n`.
    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Tensor::new(vec![n, n], data)
    }

    /// Identity operator on tensors of shape `modes`, as an order `2r` tensor.
    pub fn identity_operator(modes: &[usize]) -> Result<Self> {
        let q = element_count(modes);
        let mut shape = modes.to_vec();
        shape.extend_from_slice(modes);
        let mut data = vec![0.0; q * q];
        for i in 0..q {
            data[i * q + i] = 1.0;
        }
        Tensor::new(shape, data)
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        Tensor::new(vec![rows, cols], data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Never true: every valid tensor holds at least one entry.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Row-major data.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Row-major offset of a multi-index.
    pub fn offset(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.order() {
            return Err(Error::argument(format!(
                "index of order {} for tensor of order {}",
                index.len(),
                self.order()
            )));
        }
        let mut offset = 0;
        for (axis, (&i, &size)) in index.iter().zip(&self.shape).enumerate() {
            if i >= size {
                return Err(Error::argument(format!(
                    "index {i} out of range for mode {axis} of size {size}"
                )));
            }
            offset = offset * size + i;
        }
        Ok(offset)
    }

    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.data[self.offset(index)?])
    }

    /// Outer product: shapes concatenate, entries multiply.
    pub fn outer_product(&self, other: &Tensor) -> Tensor {
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&other.shape);
        let mut data = Vec::with_capacity(self.len() * other.len());
        for &a in &self.data {
            data.extend(other.data.iter().map(|&b| a * b));
        }
        Tensor::from_raw(shape, data)
    }

    /// Sums over the diagonal of two equally sized modes, removing both.
    /// The remaining modes keep their relative order.
    pub fn contract_pair(&self, axis_a: usize, axis_b: usize) -> Result<Tensor> {
        let order = self.order();
        if axis_a >= order || axis_b >= order {
            return Err(Error::argument(format!(
                "contraction axes ({axis_a}, {axis_b}) out of range for order {order}"
            )));
        }
        if axis_a == axis_b {
            return Err(Error::argument(format!(
                "contraction axes must differ, got {axis_a} twice"
            )));
        }
        let k = self.shape[axis_a];
        if self.shape[axis_b] != k {
            return Err(Error::shape(format!(
                "cannot contract mode {axis_a} (size {k}) with mode {axis_b} (size {})",
                self.shape[axis_b]
            )));
        }

        // Row-major strides of the source.
        let mut strides = vec![1usize; order];
        for axis in (0..order.saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * self.shape[axis + 1];
        }
        let kept: Vec<usize> = (0..order).filter(|&a| a != axis_a && a != axis_b).collect();
        let out_shape: Vec<usize> = kept.iter().map(|&a| self.shape[a]).collect();
        let diag_stride = strides[axis_a] + strides[axis_b];

        let out_len = element_count(&out_shape);
        let mut out = Vec::with_capacity(out_len);
        let mut index = vec![0usize; kept.len()];
        for _ in 0..out_len {
            let base: usize = index.iter().zip(&kept).map(|(&i, &axis)| i * strides[axis]).sum();
            let mut acc = 0.0;
            for d in 0..k {
                acc += self.data[base + d * diag_stride];
            }
            out.push(acc);
            // advance the row-major counter over kept modes
            for pos in (0..index.len()).rev() {
                index[pos] += 1;
                if index[pos] < out_shape[pos] {
                    break;
                }
                index[pos] = 0;
            }
        }
        Ok(Tensor::from_raw(out_shape, out))
    }

    /// Mode-grouped inner product: sums `self[i.., j..] * x[j..]` over the
    /// trailing modes of `self`, which must match `x.shape()` exactly.
    pub fn contract_last(&self, x: &Tensor) -> Result<Tensor> {
        if x.order() > self.order() {
            return Err(Error::argument(format!(
                "cannot contract order-{} operand into order-{} tensor",
                x.order(),
                self.order()
            )));
        }
        let lead = self.order() - x.order();
        if self.shape[lead..] != x.shape[..] {
            return Err(Error::shape(format!(
                "trailing modes {:?} of operator do not match operand shape {:?}",
                &self.shape[lead..],
                x.shape
            )));
        }
        let cols = x.len();
        let out_shape = self.shape[..lead].to_vec();
        let data = self.data.chunks_exact(cols).map(|row| dot(row, &x.data)).collect();
        Ok(Tensor::from_raw(out_shape, data))
    }

    /// Row-major flattening to an order-1 tensor.
    pub fn vec(&self) -> Tensor {
        Tensor::from_raw(vec![self.len()], self.data.clone())
    }

    /// Reshapes an order-1 tensor back to `shape`.
    pub fn devec(&self, shape: &[usize]) -> Result<Tensor> {
        if self.order() != 1 {
            return Err(Error::argument(format!(
                "devec expects an order-1 tensor, got order {}",
                self.order()
            )));
        }
        Tensor::reshape_data(shape, self.data.clone())
    }

    fn reshape_data(shape: &[usize], data: Vec<f64>) -> Result<Tensor> {
        if shape.contains(&0) {
            return Err(Error::shape(format!("shape {shape:?} has a zero-size mode")));
        }
        if element_count(shape) != data.len() {
            return Err(Error::shape(format!(
                "cannot reshape {} entries to {shape:?}",
                data.len()
            )));
        }
        Ok(Tensor::from_raw(shape.to_vec(), data))
    }

    /// Matricization grouping the first `row_modes` modes as rows and the
    /// rest as columns, both row-major.
    pub fn unfold(&self, row_modes: usize) -> Result<Tensor> {
        if row_modes > self.order() {
            return Err(Error::argument(format!(
                "cannot group {row_modes} row modes of an order-{} tensor",
                self.order()
            )));
        }
        let rows = element_count(&self.shape[..row_modes]);
        let cols = element_count(&self.shape[row_modes..]);
        Ok(Tensor::from_raw(vec![rows, cols], self.data.clone()))
    }

    /// Unfolded matrix as a `nalgebra` matrix.
    pub fn unfold_matrix(&self, row_modes: usize) -> Result<DMatrix<f64>> {
        let m = self.unfold(row_modes)?;
        Ok(DMatrix::from_row_slice(m.shape[0], m.shape[1], &m.data))
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.data)
    }

    /// Reshapes a flat vector into `shape`.
    pub fn from_dvector(v: &DVector<f64>, shape: &[usize]) -> Result<Tensor> {
        Tensor::reshape_data(shape, v.as_slice().to_vec())
    }

    /// Elementwise sum of two tensors of identical shape.
    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        if self.shape != other.shape {
            return Err(Error::shape(format!(
                "cannot add shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Tensor::from_raw(self.shape.clone(), data))
    }

    pub fn scale(&self, factor: f64) -> Tensor {
        Tensor::from_raw(self.shape.clone(), self.data.iter().map(|v| v * factor).collect())
    }

    /// Euclidean norm of the flattened data.
    pub fn norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    /// Largest absolute elementwise difference; shapes must agree.
    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::shape(format!(
                "cannot compare shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Left-to-right dot product starting from zero. Every contraction in the
/// crate goes through here so that tensor and unfolded routes round alike.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

/// Row-major multi-indices of a shape, in storage order.
pub fn multi_indices(shape: &[usize]) -> Vec<Vec<usize>> {
    let total = element_count(shape);
    let mut out = Vec::with_capacity(total);
    let mut index = vec![0usize; shape.len()];
    for _ in 0..total {
        out.push(index.clone());
        for pos in (0..index.len()).rev() {
            index[pos] += 1;
            if index[pos] < shape[pos] {
                break;
            }
            index[pos] = 0;
        }
    }
    out
}
