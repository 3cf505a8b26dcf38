//! Construction and validation of the direction matrices that drive every
//! scheme: the outer matrix `S` and the ordered family `T_1..T_m` of inner
//! matrices, their radii, and the ready-made builders for full-Hessian,
//! diagonal, off-diagonal, row, and Hessian-vector-product targets.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, norm2, Matrix};

/// A nonempty direction matrix with non-null rank, carrying its radius
/// `Δ = max_j ‖s^j‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMatrix {
    base: Matrix,
    radius: f64,
}

impl DirectionMatrix {
    pub fn new(base: Matrix) -> Result<Self> {
        if !base.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        let radius = base.max_col_norm();
        if radius == 0.0 {
            return Err(Error::InvalidDirections("direction matrix has null rank"));
        }
        Ok(DirectionMatrix { base, radius })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.base
    }

    /// Radius `Δ = max_j ‖s^j‖`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Ambient dimension (rows).
    pub fn dim(&self) -> usize {
        self.base.nrows()
    }

    /// Number of direction columns.
    pub fn cols(&self) -> usize {
        self.base.ncols()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.base.column(j)
    }

    /// Normalized matrix `base / Δ`; its largest column norm is 1.
    pub fn normalized(&self) -> Matrix {
        self.base.scale(1.0 / self.radius)
    }

    /// Entrywise negation; exact, so shared points cancel bitwise.
    pub fn negated(&self) -> DirectionMatrix {
        DirectionMatrix {
            base: self.base.neg(),
            radius: self.radius,
        }
    }
}

/// The ordered collection `T_1..T_m`, one inner matrix per column of the
/// paired `S`. When every member is the same matrix the family is flagged
/// `all_equal` and estimators may use the simplified common-`T̄` forms.
#[derive(Debug, Clone)]
pub struct DirectionFamily {
    members: Vec<DirectionMatrix>,
    all_equal: bool,
}

impl DirectionFamily {
    pub fn new(members: Vec<DirectionMatrix>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidDirections("direction family is empty"));
        }
        let all_equal = members
            .iter()
            .all(|m| m.matrix() == members[0].matrix());
        Ok(DirectionFamily { members, all_equal })
    }

    /// Family with `m` copies of one shared matrix.
    pub fn uniform(shared: DirectionMatrix, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDirections("direction family is empty"));
        }
        Ok(DirectionFamily {
            members: vec![shared; m],
            all_equal: true,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, j: usize) -> &DirectionMatrix {
        &self.members[j]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, DirectionMatrix> {
        self.members.iter()
    }

    pub fn is_all_equal(&self) -> bool {
        self.all_equal
    }

    /// The shared matrix when the family is all-equal.
    pub fn shared(&self) -> Option<&DirectionMatrix> {
        if self.all_equal {
            Some(&self.members[0])
        } else {
            None
        }
    }

    pub fn negated(&self) -> DirectionFamily {
        DirectionFamily {
            members: self.members.iter().map(|m| m.negated()).collect(),
            all_equal: self.all_equal,
        }
    }
}

/// Radii of a scheme's direction matrices and the selection data the error
/// bounds need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radii {
    pub delta_s: f64,
    /// `Δ_T = max_j Δ_{T_j}`.
    pub delta_t: f64,
    /// `Δ_u = max{Δ_S, Δ_{T_1}, ..., Δ_{T_m}}`.
    pub delta_u: f64,
    /// `Δ_l = min{Δ_S, Δ_{T_1}, ..., Δ_{T_m}}`.
    pub delta_l: f64,
    /// `k = max_j k_j` (largest inner column count).
    pub k: usize,
    /// Index of the normalized member whose pseudoinverse norm is maximal
    /// (first index on ties).
    pub t_hat_argmax: usize,
}

/// Compute all radii plus the index of the normalized `T̂_j` maximizing
/// `‖T̂_j†‖`.
pub fn radii(s: &DirectionMatrix, family: &DirectionFamily) -> Radii {
    let delta_s = s.radius();
    let mut delta_t = 0.0_f64;
    let mut delta_u = delta_s;
    let mut delta_l = delta_s;
    let mut k = 0usize;
    let mut best = (0usize, f64::NEG_INFINITY);
    for (j, t) in family.iter().enumerate() {
        let r = t.radius();
        delta_t = delta_t.max(r);
        delta_u = delta_u.max(r);
        delta_l = delta_l.min(r);
        k = k.max(t.cols());
        let norm = linalg::spectral_norm(
            &linalg::pinv(&t.normalized()).expect("finite direction matrix"),
        );
        if norm > best.1 {
            best = (j, norm);
        }
    }
    Radii {
        delta_s,
        delta_t,
        delta_u,
        delta_l,
        k,
        t_hat_argmax: best.0,
    }
}

/// Default step when the caller does not supply one:
/// `1e-3 * max(1, ‖x⁰‖)`, balancing truncation against round-off in double
/// precision.
pub fn default_step(x0: &[f64]) -> f64 {
    1e-3 * norm2(x0).max(1.0)
}

fn check_step(h: f64) -> Result<()> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::InvalidScheme("step h must be nonzero and finite"));
    }
    Ok(())
}

fn check_dim(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidScheme("dimension n must be at least 1"));
    }
    Ok(())
}

fn scaled_basis_column(n: usize, i: usize, h: f64) -> Vec<f64> {
    let mut c = vec![0.0; n];
    c[i] = h;
    c
}

/// `S = h·Id_n` with the nested family `T_j = h·[e^j ... e^n]`. The resulting
/// forward plan has exactly `(n+1)(n+2)/2` distinct points, the minimum for a
/// full-Hessian forward scheme.
pub fn build_full_gsh_minimal(n: usize, h: f64) -> Result<(DirectionMatrix, DirectionFamily)> {
    check_dim(n)?;
    check_step(h)?;
    let s = DirectionMatrix::new(Matrix::from_diag(&vec![h; n]))?;
    let mut members = Vec::with_capacity(n);
    for j in 0..n {
        let cols: Vec<Vec<f64>> = (j..n).map(|l| scaled_basis_column(n, l, h)).collect();
        members.push(DirectionMatrix::new(Matrix::from_columns(&cols))?);
    }
    Ok((s, DirectionFamily::new(members)?))
}

/// `S = h·Id_n`, `T̄ = −S`. The centered plan has `n² + n + 1` distinct
/// points, the minimum for a full-Hessian centered scheme.
pub fn build_full_gcsh_minimal(n: usize, h: f64) -> Result<(DirectionMatrix, DirectionFamily)> {
    check_dim(n)?;
    check_step(h)?;
    let s = DirectionMatrix::new(Matrix::from_diag(&vec![h; n]))?;
    let family = DirectionFamily::uniform(s.negated(), n)?;
    Ok((s, family))
}

/// Diagonal scheme: `S` has columns `h·e^i` for each `i` in `subset`
/// (0-based, distinct) and `T_j = −s^j`. The centered plan has
/// `2·|subset| + 1` points.
pub fn build_diag(
    n: usize,
    h: f64,
    subset: &[usize],
) -> Result<(DirectionMatrix, DirectionFamily)> {
    check_dim(n)?;
    check_step(h)?;
    if subset.is_empty() {
        return Err(Error::InvalidScheme("index subset must be nonempty"));
    }
    let mut seen = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::InvalidScheme("subset index out of range"));
        }
        if seen[i] {
            return Err(Error::InvalidScheme("subset indices must be distinct"));
        }
        seen[i] = true;
    }
    let cols: Vec<Vec<f64>> = subset
        .iter()
        .map(|&i| scaled_basis_column(n, i, h))
        .collect();
    let s = DirectionMatrix::new(Matrix::from_columns(&cols))?;
    let members = subset
        .iter()
        .map(|&i| DirectionMatrix::new(Matrix::from_columns(&[scaled_basis_column(n, i, -h)])))
        .collect::<Result<Vec<_>>>()?;
    Ok((s, DirectionFamily::new(members)?))
}

/// Off-diagonal scheme: `S = h[e^1 ... e^{n-1}]` with
/// `T_j = h[e^{j+1} ... e^n]`. Forward plan: `(n(n+1)+2)/2` points; centered
/// plan: `n² + n + 1`.
pub fn build_off_diag(n: usize, h: f64) -> Result<(DirectionMatrix, DirectionFamily)> {
    if n < 2 {
        return Err(Error::InvalidScheme(
            "off-diagonal scheme requires n >= 2",
        ));
    }
    check_step(h)?;
    let s_cols: Vec<Vec<f64>> = (0..n - 1).map(|i| scaled_basis_column(n, i, h)).collect();
    let s = DirectionMatrix::new(Matrix::from_columns(&s_cols))?;
    let mut members = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let cols: Vec<Vec<f64>> = (j + 1..n).map(|l| scaled_basis_column(n, l, h)).collect();
        members.push(DirectionMatrix::new(Matrix::from_columns(&cols))?);
    }
    Ok((s, DirectionFamily::new(members)?))
}

/// Row scheme for row `i` (0-based): `S = h·e^i`, `T̄ = h·Id_n`. Forward
/// plan: `2n + 1` points; centered plan: `4n + 1`.
pub fn build_row(n: usize, i: usize, h: f64) -> Result<(DirectionMatrix, DirectionFamily)> {
    check_dim(n)?;
    check_step(h)?;
    if i >= n {
        return Err(Error::InvalidScheme("row index out of range"));
    }
    let s = DirectionMatrix::new(Matrix::from_columns(&[scaled_basis_column(n, i, h)]))?;
    let tbar = DirectionMatrix::new(Matrix::from_diag(&vec![h; n]))?;
    Ok((s, DirectionFamily::uniform(tbar, 1)?))
}

/// Hessian-vector-product scheme: `T̄ = h·v` and `S` full rank `n×n` with
/// first column `−h·v` and the remaining columns `h·e^j`, skipping the basis
/// vector most collinear with `v` (largest `|v_k|`). The sign arrangement
/// makes `x⁰ + s^1 + h·v` collapse onto `x⁰`, so the forward plan has
/// `2n + 1` points and the centered plan `4n − 1`.
pub fn build_hvp(n: usize, v: &[f64], h: f64) -> Result<(DirectionMatrix, DirectionFamily)> {
    check_dim(n)?;
    check_step(h)?;
    if v.len() != n {
        return Err(Error::InvalidScheme("v must have length n"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidScheme("v must be nonzero"));
    }
    let hv: Vec<f64> = v.iter().map(|&x| h * x).collect();
    // Drop the basis vector with largest |v_k| (first on ties).
    let mut drop = 0;
    for (k, &x) in v.iter().enumerate() {
        if x.abs() > v[drop].abs() {
            drop = k;
        }
    }
    let mut cols = Vec::with_capacity(n);
    cols.push(hv.iter().map(|&x| -x).collect::<Vec<f64>>());
    for k in 0..n {
        if k != drop {
            cols.push(scaled_basis_column(n, k, h));
        }
    }
    let s = DirectionMatrix::new(Matrix::from_columns(&cols))?;
    let tbar = DirectionMatrix::new(Matrix::from_columns(&[hv]))?;
    let family = DirectionFamily::uniform(tbar, n)?;
    Ok((s, family))
}

// ---------------------------------------------------------------------------
// Scheme specifications
// ---------------------------------------------------------------------------

/// The scheme catalogue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeKind {
    FullGshMinimal,
    FullGcshMinimal,
    Diag,
    OffDiag,
    Row,
    HvpGsh,
    HvpGcsh,
    Custom,
}

/// A fully parameterized scheme: kind, dimension, step, and the per-kind
/// parameters (row index, product vector, index subset, or explicit custom
/// directions).
#[derive(Debug, Clone)]
pub struct SchemeSpec {
    kind: SchemeKind,
    n: usize,
    h: f64,
    row: Option<usize>,
    v: Option<Vec<f64>>,
    subset: Option<Vec<usize>>,
    custom: Option<(DirectionMatrix, DirectionFamily)>,
    centered: bool,
}

impl SchemeSpec {
    pub fn full_gsh_minimal(n: usize, h: f64) -> Result<Self> {
        check_dim(n)?;
        check_step(h)?;
        Ok(SchemeSpec {
            kind: SchemeKind::FullGshMinimal,
            n,
            h,
            row: None,
            v: None,
            subset: None,
            custom: None,
            centered: false,
        })
    }

    pub fn full_gcsh_minimal(n: usize, h: f64) -> Result<Self> {
        check_dim(n)?;
        check_step(h)?;
        Ok(SchemeSpec {
            kind: SchemeKind::FullGcshMinimal,
            n,
            h,
            row: None,
            v: None,
            subset: None,
            custom: None,
            centered: true,
        })
    }

    /// Diagonal entries named by `subset` (0-based); pass `0..n` for all.
    pub fn diag(n: usize, h: f64, subset: Vec<usize>) -> Result<Self> {
        build_diag(n, h, &subset)?; // validate eagerly
        Ok(SchemeSpec {
            kind: SchemeKind::Diag,
            n,
            h,
            row: None,
            v: None,
            subset: Some(subset),
            custom: None,
            centered: true,
        })
    }

    pub fn off_diag(n: usize, h: f64, centered: bool) -> Result<Self> {
        build_off_diag(n, h)?;
        Ok(SchemeSpec {
            kind: SchemeKind::OffDiag,
            n,
            h,
            row: None,
            v: None,
            subset: None,
            custom: None,
            centered,
        })
    }

    pub fn row(n: usize, i: usize, h: f64, centered: bool) -> Result<Self> {
        build_row(n, i, h)?;
        Ok(SchemeSpec {
            kind: SchemeKind::Row,
            n,
            h,
            row: Some(i),
            v: None,
            subset: None,
            custom: None,
            centered,
        })
    }

    pub fn hvp(n: usize, v: Vec<f64>, h: f64, centered: bool) -> Result<Self> {
        build_hvp(n, &v, h)?;
        Ok(SchemeSpec {
            kind: if centered {
                SchemeKind::HvpGcsh
            } else {
                SchemeKind::HvpGsh
            },
            n,
            h,
            row: None,
            v: Some(v),
            subset: None,
            custom: None,
            centered,
        })
    }

    /// Explicit user-supplied directions.
    pub fn custom(s: DirectionMatrix, family: DirectionFamily, centered: bool) -> Result<Self> {
        if family.len() != s.cols() {
            return Err(Error::InvalidScheme(
                "family length must equal the column count of S",
            ));
        }
        for t in family.iter() {
            if t.dim() != s.dim() {
                return Err(Error::InvalidScheme(
                    "all direction matrices must share the ambient dimension",
                ));
            }
        }
        let n = s.dim();
        let h = s.radius();
        Ok(SchemeSpec {
            kind: SchemeKind::Custom,
            n,
            h,
            row: None,
            v: None,
            subset: None,
            custom: Some((s, family)),
            centered,
        })
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn centered(&self) -> bool {
        self.centered
    }

    pub fn row_index(&self) -> Option<usize> {
        self.row
    }

    pub fn product_vector(&self) -> Option<&[f64]> {
        self.v.as_deref()
    }

    pub fn subset(&self) -> Option<&[usize]> {
        self.subset.as_deref()
    }

    /// Same scheme with a different step; used by radius sweeps. Custom
    /// schemes carry explicit matrices and cannot be rescaled this way.
    pub fn with_step(&self, h: f64) -> Result<SchemeSpec> {
        check_step(h)?;
        if self.kind == SchemeKind::Custom {
            return Err(Error::Unsupported("cannot rescale a custom scheme"));
        }
        let mut out = self.clone();
        out.h = h;
        Ok(out)
    }

    /// Materialize the direction matrices for this scheme.
    pub fn directions(&self) -> Result<(DirectionMatrix, DirectionFamily)> {
        match self.kind {
            SchemeKind::FullGshMinimal => build_full_gsh_minimal(self.n, self.h),
            SchemeKind::FullGcshMinimal => build_full_gcsh_minimal(self.n, self.h),
            SchemeKind::Diag => build_diag(self.n, self.h, self.subset.as_ref().unwrap()),
            SchemeKind::OffDiag => build_off_diag(self.n, self.h),
            SchemeKind::Row => build_row(self.n, self.row.unwrap(), self.h),
            SchemeKind::HvpGsh | SchemeKind::HvpGcsh => {
                build_hvp(self.n, self.v.as_ref().unwrap(), self.h)
            }
            SchemeKind::Custom => Ok(self.custom.clone().unwrap()),
        }
    }

    /// Closed-form distinct-evaluation count together with the formula it
    /// comes from, when one exists for this scheme.
    pub fn closed_form_count(&self) -> Option<(usize, &'static str)> {
        let n = self.n;
        match (&self.kind, self.centered) {
            (SchemeKind::FullGshMinimal, _) => {
                Some(((n + 1) * (n + 2) / 2, "(n+1)(n+2)/2"))
            }
            (SchemeKind::FullGcshMinimal, _) => Some((n * n + n + 1, "n^2+n+1")),
            (SchemeKind::Diag, _) => {
                let s = self.subset.as_ref().map(|s| s.len()).unwrap_or(n);
                Some((2 * s + 1, "2|subset|+1"))
            }
            (SchemeKind::OffDiag, false) => Some(((n * (n + 1) + 2) / 2, "(n(n+1)+2)/2")),
            (SchemeKind::OffDiag, true) => Some((n * n + n + 1, "n^2+n+1")),
            (SchemeKind::Row, false) => Some((2 * n + 1, "2n+1")),
            (SchemeKind::Row, true) => Some((4 * n + 1, "4n+1")),
            (SchemeKind::HvpGsh, _) => Some((2 * n + 1, "2n+1")),
            (SchemeKind::HvpGcsh, _) => Some((4 * n - 1, "4n-1")),
            (SchemeKind::Custom, _) => None,
        }
    }
}
