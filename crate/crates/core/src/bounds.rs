//! Right-hand sides of the error bounds, so measured errors can be checked
//! against their theoretical ceilings.
//!
//! All formulas share the same ingredients: column counts `m` and `k`, the
//! radii `Δ_u ≥ Δ_l > 0`, norms of normalized pseudoinverses, and a Lipschitz
//! constant of the second or third derivative over the sampled ball. Forward
//! (GSH-type) ceilings scale with `Δ_u`, centered (GCSH-type) ceilings with
//! `Δ_u²`, at fixed radius ratio `Δ_u/Δ_l`.

use crate::directions::{radii, DirectionFamily, DirectionMatrix};
use crate::error::Result;
use crate::linalg::{norm2, pinv, spectral_norm};

/// Inputs to the bound formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// Columns of `S`.
    pub m: usize,
    /// Largest inner column count `k = max_j k_j`.
    pub k: usize,
    /// Ambient dimension.
    pub n: usize,
    pub delta_u: f64,
    pub delta_l: f64,
    pub delta_s: f64,
    /// `‖(Ŝᵀ)†‖` for the normalized `Ŝ`.
    pub s_hat_pinv_norm: f64,
    /// `‖T̂†‖` for the worst normalized member (or `‖T̄̂†‖` with a common
    /// family).
    pub t_hat_pinv_norm: f64,
    /// Lipschitz constant of the Hessian, `L_{∇²f}`.
    pub lip_hessian: f64,
    /// Lipschitz constant of the third derivative, `L_{∇³f}`.
    pub lip_third: f64,
    /// `‖v‖` for the Hessian-vector-product bounds (zero otherwise).
    pub v_norm: f64,
}

impl BoundInputs {
    /// Measure every direction-derived quantity from the scheme's matrices;
    /// Lipschitz constants and `‖v‖` are supplied by the caller, matching
    /// their role as problem data.
    pub fn from_directions(
        s: &DirectionMatrix,
        family: &DirectionFamily,
        lip_hessian: f64,
        lip_third: f64,
        v: Option<&[f64]>,
    ) -> Result<BoundInputs> {
        let r = radii(s, family);
        let s_hat_pinv_norm = spectral_norm(&pinv(&s.normalized().transpose())?);
        let t_hat = family.member(r.t_hat_argmax);
        let t_hat_pinv_norm = spectral_norm(&pinv(&t_hat.normalized())?);
        Ok(BoundInputs {
            m: s.cols(),
            k: r.k,
            n: s.dim(),
            delta_u: r.delta_u,
            delta_l: r.delta_l,
            delta_s: r.delta_s,
            s_hat_pinv_norm,
            t_hat_pinv_norm,
            lip_hessian,
            lip_third,
            v_norm: v.map(norm2).unwrap_or(0.0),
        })
    }

    fn ratio(&self) -> f64 {
        self.delta_u / self.delta_l
    }
}

/// Which form of the GSH/GCSH ceiling applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    /// `S` full column rank or every `T_j` full row rank.
    General,
    /// All `T_j` equal (`T̄`).
    CommonT,
}

/// Ceiling on `‖GSH − Proj ∇²f‖`.
///
/// General: `4 m √k L_{∇²f} ‖(Ŝᵀ)†‖ ‖T̂†‖ (Δ_u/Δ_l)² Δ_u`.
/// Common `T̄`: `4 √(mk) L_{∇²f} (Δ_u/Δ_l) ‖(Ŝᵀ)†‖ ‖T̄̂†‖ Δ_u`.
pub fn gsh_bound(inputs: &BoundInputs, variant: BoundVariant) -> f64 {
    let norms = inputs.s_hat_pinv_norm * inputs.t_hat_pinv_norm;
    match variant {
        BoundVariant::General => {
            4.0 * inputs.m as f64
                * libm::sqrt(inputs.k as f64)
                * inputs.lip_hessian
                * norms
                * inputs.ratio()
                * inputs.ratio()
                * inputs.delta_u
        }
        BoundVariant::CommonT => {
            4.0 * libm::sqrt((inputs.m * inputs.k) as f64)
                * inputs.lip_hessian
                * inputs.ratio()
                * norms
                * inputs.delta_u
        }
    }
}

/// Ceiling on `‖GCSH − Proj ∇²f‖`; same structure as [`gsh_bound`] with
/// `L_{∇³f}`, a leading 2, and `Δ_u²`.
pub fn gcsh_bound(inputs: &BoundInputs, variant: BoundVariant) -> f64 {
    let norms = inputs.s_hat_pinv_norm * inputs.t_hat_pinv_norm;
    let du2 = inputs.delta_u * inputs.delta_u;
    match variant {
        BoundVariant::General => {
            2.0 * inputs.m as f64
                * libm::sqrt(inputs.k as f64)
                * inputs.lip_third
                * inputs.ratio()
                * inputs.ratio()
                * norms
                * du2
        }
        BoundVariant::CommonT => {
            2.0 * libm::sqrt((inputs.m * inputs.k) as f64)
                * inputs.lip_third
                * inputs.ratio()
                * norms
                * du2
        }
    }
}

/// Ceiling on the diagonal-entry error of the centered scheme with `S`
/// partial diagonal, full column rank, and `T_j = −s^j`:
/// `(1/12) L_{∇³f} Δ_S²`. Tighter than the general GCSH ceiling for the same
/// configuration.
pub fn diag_bound(lip_third: f64, delta_s: f64) -> f64 {
    lip_third * delta_s * delta_s / 12.0
}

/// Off-diagonal ceiling: the general GSH (or GCSH when `centered`) form for
/// the strictly-upper-triangular direction recipes.
pub fn offdiag_bound(inputs: &BoundInputs, centered: bool) -> f64 {
    if centered {
        gcsh_bound(inputs, BoundVariant::General)
    } else {
        gsh_bound(inputs, BoundVariant::General)
    }
}

/// One-row ceiling for `S = h·e^i` with a common `T̄`; the `‖(Ŝᵀ)†‖` factor
/// equals 1 for such `S` and is omitted.
///
/// Forward: `4 √k L_{∇²f} (Δ_u/Δ_l) ‖T̄̂†‖ Δ_u`;
/// centered: `2 √k L_{∇³f} (Δ_u/Δ_l) ‖T̄̂†‖ Δ_u²`.
pub fn row_bound(inputs: &BoundInputs, centered: bool) -> f64 {
    let k = libm::sqrt(inputs.k as f64);
    if centered {
        2.0 * k
            * inputs.lip_third
            * inputs.ratio()
            * inputs.t_hat_pinv_norm
            * inputs.delta_u
            * inputs.delta_u
    } else {
        4.0 * k * inputs.lip_hessian * inputs.ratio() * inputs.t_hat_pinv_norm * inputs.delta_u
    }
}

/// Hessian-vector-product ceiling with `T̄ = h·v`.
///
/// Forward: `4 √m L_{∇²f} (Δ_u/Δ_l) ‖(Ŝᵀ)†‖ ‖v‖ Δ_u`;
/// centered: `2 √m L_{∇³f} (Δ_u/Δ_l) ‖(Ŝᵀ)†‖ ‖v‖ Δ_u²`.
pub fn hvp_bound(inputs: &BoundInputs, centered: bool) -> f64 {
    let m = libm::sqrt(inputs.m as f64);
    if centered {
        2.0 * m
            * inputs.lip_third
            * inputs.ratio()
            * inputs.s_hat_pinv_norm
            * inputs.v_norm
            * inputs.delta_u
            * inputs.delta_u
    } else {
        4.0 * m
            * inputs.lip_hessian
            * inputs.ratio()
            * inputs.s_hat_pinv_norm
            * inputs.v_norm
            * inputs.delta_u
    }
}
