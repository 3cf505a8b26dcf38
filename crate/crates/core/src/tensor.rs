//! Dense order-P derivative tensors with floor and layer views.
//!
//! An order-3 tensor `M ∈ R^{r×c×p}` is either `r` floors (`[F_i]_{j,k} =
//! M_{i,j,k}`, the first index fixed) or `p` layers (`[L_k]_{i,j} =
//! M_{i,j,k}`, the last index fixed); both views address the same row-major
//! storage. Orders 1 and 2 are vectors and matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Dense tensor of order `dims.len() >= 1`, row-major (last index fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl DerivTensor {
    pub fn zeros(dims: &[usize]) -> Self {
        assert!(!dims.is_empty(), "tensor order must be at least 1");
        assert!(dims.iter().all(|&d| d >= 1), "dimensions must be positive");
        let len = dims.iter().product();
        DerivTensor {
            dims: dims.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn from_vector(v: Vec<f64>) -> Self {
        assert!(!v.is_empty());
        DerivTensor {
            dims: vec![v.len()],
            data: v,
        }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        DerivTensor {
            dims: vec![m.nrows(), m.ncols()],
            data: m.data().to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut off = 0;
        for (i, (&ix, &d)) in idx.iter().zip(&self.dims).enumerate() {
            debug_assert!(ix < d, "index {ix} out of bounds at axis {i}");
            let _ = i;
            off = off * d + ix;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let off = self.offset(idx);
        self.data[off] = value;
    }

    /// Order-1 contents as a slice.
    pub fn as_vector(&self) -> Option<&[f64]> {
        (self.order() == 1).then_some(self.data.as_slice())
    }

    /// Order-2 contents as a matrix.
    pub fn to_matrix(&self) -> Option<Matrix> {
        (self.order() == 2)
            .then(|| Matrix::from_vec(self.dims[0], self.dims[1], self.data.clone()))
    }

    /// Floor `i` of an order-3 tensor: the `c×p` matrix with the first index
    /// fixed.
    pub fn floor(&self, i: usize) -> Option<Matrix> {
        if self.order() != 3 {
            return None;
        }
        let (c, p) = (self.dims[1], self.dims[2]);
        let mut m = Matrix::zeros(c, p);
        for j in 0..c {
            for k in 0..p {
                m[(j, k)] = self.get(&[i, j, k]);
            }
        }
        Some(m)
    }

    /// Layer `k` of an order-3 tensor: the `r×c` matrix with the last index
    /// fixed.
    pub fn layer(&self, k: usize) -> Option<Matrix> {
        if self.order() != 3 {
            return None;
        }
        let (r, c) = (self.dims[0], self.dims[1]);
        let mut m = Matrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                m[(i, j)] = self.get(&[i, j, k]);
            }
        }
        Some(m)
    }

    /// Assemble an order-3 tensor from its floors.
    pub fn from_floors(floors: &[Matrix]) -> Self {
        assert!(!floors.is_empty());
        let (c, p) = (floors[0].nrows(), floors[0].ncols());
        let mut t = DerivTensor::zeros(&[floors.len(), c, p]);
        for (i, f) in floors.iter().enumerate() {
            assert_eq!((f.nrows(), f.ncols()), (c, p));
            for j in 0..c {
                for k in 0..p {
                    t.set(&[i, j, k], f[(j, k)]);
                }
            }
        }
        t
    }

    /// Assemble an order-3 tensor from its layers.
    pub fn from_layers(layers: &[Matrix]) -> Self {
        assert!(!layers.is_empty());
        let (r, c) = (layers[0].nrows(), layers[0].ncols());
        let mut t = DerivTensor::zeros(&[r, c, layers.len()]);
        for (k, l) in layers.iter().enumerate() {
            assert_eq!((l.nrows(), l.ncols()), (r, c));
            for i in 0..r {
                for j in 0..c {
                    t.set(&[i, j, k], l[(i, j)]);
                }
            }
        }
        t
    }

    /// P-dimensional transpose: full index reversal,
    /// `out[i_1, ..., i_P] = self[i_P, ..., i_1]`. For order 2 this is the
    /// ordinary matrix transpose; order 1 is the identity.
    pub fn transpose_reversed(&self) -> DerivTensor {
        let rev_dims: Vec<usize> = self.dims.iter().rev().copied().collect();
        let mut out = DerivTensor::zeros(&rev_dims);
        let mut idx = vec![0usize; self.dims.len()];
        loop {
            let rev_idx: Vec<usize> = idx.iter().rev().copied().collect();
            let v = self.get(&idx);
            out.set(&rev_idx, v);
            // odometer increment over self.dims
            let mut axis = self.dims.len();
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < self.dims[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    pub fn add(&self, rhs: &DerivTensor) -> DerivTensor {
        assert_eq!(self.dims, rhs.dims);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        DerivTensor {
            dims: self.dims.clone(),
            data,
        }
    }

    pub fn sub(&self, rhs: &DerivTensor) -> DerivTensor {
        assert_eq!(self.dims, rhs.dims);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        DerivTensor {
            dims: self.dims.clone(),
            data,
        }
    }

    pub fn scale(&self, a: f64) -> DerivTensor {
        DerivTensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|x| a * x).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Mode-1 unfolding: the `dims[0] × (Π rest)` matrix whose row `i` is the
    /// sub-tensor with first index `i`, flattened row-major.
    pub fn unfold_mode1(&self) -> Matrix {
        let rows = self.dims[0];
        let cols = self.data.len() / rows;
        Matrix::from_vec(rows, cols.max(1), self.data.clone())
    }
}

/// Multiply a matrix into a tensor along its first mode:
/// `out[i, j, ...] = Σ_r a[i, r] · m[r, j, ...]`. For an order-3 tensor this
/// is the layerwise product (`layer k of out = a · L_k`). Errors when
/// `a.ncols()` does not match the tensor's first dimension.
pub fn tensor_mul(a: &Matrix, m: &DerivTensor) -> Result<DerivTensor> {
    if a.ncols() != m.dims()[0] {
        return Err(Error::ShapeMismatch {
            expected: (a.ncols(), a.ncols()),
            got: (m.dims()[0], m.dims()[0]),
        });
    }
    let inner: usize = m.dims()[1..].iter().product::<usize>().max(1);
    let mut out_dims = m.dims().to_vec();
    out_dims[0] = a.nrows();
    let mut out = DerivTensor::zeros(&out_dims);
    for i in 0..a.nrows() {
        for r in 0..a.ncols() {
            let w = a[(i, r)];
            if w == 0.0 {
                continue;
            }
            for t in 0..inner {
                out.data[i * inner + t] += w * m.data[r * inner + t];
            }
        }
    }
    Ok(out)
}
