//! The approximation formulas: generalized simplex gradient (GSG), simplex
//! Hessian (GSH), centered simplex Hessian (GCSH), centered simplex Hessian
//! diagonal (CSHD), Hessian-vector products, the simplex Tressian, and the
//! recursive order-P simplex derivative tensor.
//!
//! Every estimator is a pure function of a populated [`EvalCache`]; points
//! are addressed through the same canonical construction the sampling module
//! uses, so a cache filled from the matching plan always resolves.

use alloc::vec;
use alloc::vec::Vec;

use crate::directions::{DirectionFamily, DirectionMatrix, SchemeKind, SchemeSpec};
use crate::error::{Error, Result};
use crate::linalg::{hadamard, pinv, Matrix};
use crate::sampling::{canonical_point, enumerate, EvalCache, SamplePlan};
use crate::tensor::{tensor_mul, DerivTensor};

/// Largest derivative order the recursive tensor estimator accepts unless a
/// caller raises it explicitly.
pub const DEFAULT_MAX_ORDER: usize = 4;

type Term<'a> = (&'a [f64], i32);

fn cached(cache: &EvalCache, x0: &[f64], terms: &[Term<'_>]) -> Result<f64> {
    cache.value(&canonical_point(x0, terms))
}

/// Forward differences over the columns of `S`:
/// entry `j` is `f(x⁰ + s^j) − f(x⁰)`.
pub fn delta_s(cache: &EvalCache, x0: &[f64], s: &DirectionMatrix) -> Result<Vec<f64>> {
    delta_at(cache, x0, &[], s)
}

fn delta_at(
    cache: &EvalCache,
    x0: &[f64],
    base: &[Term<'_>],
    s: &DirectionMatrix,
) -> Result<Vec<f64>> {
    let f0 = cached(cache, x0, base)?;
    let mut out = Vec::with_capacity(s.cols());
    for j in 0..s.cols() {
        let col = s.column(j);
        let mut terms = base.to_vec();
        terms.push((&col, 1));
        out.push(cached(cache, x0, &terms)? - f0);
    }
    Ok(out)
}

/// Generalized simplex gradient `(Sᵀ)† δ_s f(x⁰; S)`.
pub fn gsg(cache: &EvalCache, x0: &[f64], s: &DirectionMatrix) -> Result<Vec<f64>> {
    let st_pinv = pinv(&s.matrix().transpose())?;
    gsg_at(cache, x0, &[], s, &st_pinv)
}

fn gsg_at(
    cache: &EvalCache,
    x0: &[f64],
    base: &[Term<'_>],
    s: &DirectionMatrix,
    st_pinv: &Matrix,
) -> Result<Vec<f64>> {
    let delta = delta_at(cache, x0, base, s)?;
    Ok(st_pinv.mul_vec(&delta))
}

/// Generalized simplex Hessian `(Sᵀ)† δ²_s f(x⁰; S, T_{1:m})`, an `n×n`
/// matrix whose row `j` (before the outer pseudoinverse) is the transposed
/// difference of simplex gradients over `T_j` at `x⁰ + s^j` and `x⁰`.
pub fn gsh(
    cache: &EvalCache,
    x0: &[f64],
    s: &DirectionMatrix,
    family: &DirectionFamily,
) -> Result<Matrix> {
    if family.len() != s.cols() {
        return Err(Error::InvalidScheme(
            "family length must equal the column count of S",
        ));
    }
    let n = s.dim();
    let m = s.cols();
    let st_pinv = pinv(&s.matrix().transpose())?;
    let mut delta2 = Matrix::zeros(m, n);
    for j in 0..m {
        let t = family.member(j);
        let tt_pinv = pinv(&t.matrix().transpose())?;
        let s_col = s.column(j);
        let g_plus = gsg_at(cache, x0, &[(&s_col, 1)], t, &tt_pinv)?;
        let g_base = gsg_at(cache, x0, &[], t, &tt_pinv)?;
        for l in 0..n {
            delta2[(j, l)] = g_plus[l] - g_base[l];
        }
    }
    Ok(st_pinv.matmul(&delta2))
}

/// Generalized centered simplex Hessian: the average of the GSH over
/// `(S, T_{1:m})` and `(−S, −T_{1:m})`. One order more accurate than the
/// GSH; symmetric under a joint sign flip of all directions.
pub fn gcsh(
    cache: &EvalCache,
    x0: &[f64],
    s: &DirectionMatrix,
    family: &DirectionFamily,
) -> Result<Matrix> {
    let plus = gsh(cache, x0, s, family)?;
    let minus = gsh(cache, x0, &s.negated(), &family.negated())?;
    Ok(plus.add(&minus).scale(0.5))
}

/// Centered simplex Hessian diagonal `(Wᵀ)† ε f(x⁰; S)` where `W` has
/// columns `s^j ⊙ s^j` and `ε` has entries
/// `f(x⁰+s^j) + f(x⁰−s^j) − 2 f(x⁰)`.
pub fn cshd(cache: &EvalCache, x0: &[f64], s: &DirectionMatrix) -> Result<Vec<f64>> {
    let w = hadamard(s.matrix(), s.matrix())?;
    let wt_pinv = pinv(&w.transpose())?;
    let f0 = cached(cache, x0, &[])?;
    let mut eps = Vec::with_capacity(s.cols());
    for j in 0..s.cols() {
        let col = s.column(j);
        let plus = cached(cache, x0, &[(&col, 1)])?;
        let minus = cached(cache, x0, &[(&col, -1)])?;
        eps.push(plus + minus - 2.0 * f0);
    }
    Ok(wt_pinv.mul_vec(&eps))
}

/// Hessian-vector product approximation: the GSH (or GCSH when `centered`)
/// over the dedicated directions with `T̄ = h·v`, applied to `v`. For the
/// built-in directions `S` is full row rank, so this approximates
/// `∇²f(x⁰)·v` itself rather than a projection of it.
pub fn hvp(
    cache: &EvalCache,
    x0: &[f64],
    v: &[f64],
    h: f64,
    centered: bool,
) -> Result<Vec<f64>> {
    let (s, family) = crate::directions::build_hvp(x0.len(), v, h)?;
    let g = if centered {
        gcsh(cache, x0, &s, &family)?
    } else {
        gsh(cache, x0, &s, &family)?
    };
    Ok(g.mul_vec(v))
}

/// Generalized simplex Tressian `(Sᵀ)† ⊗ δ³_s f(x⁰; S, T̄, Ū)`: floor `j` of
/// `δ³` is the reversed-index transpose of the difference of simplex
/// Hessians over `(T̄, Ū)` at `x⁰ + s^j` and `x⁰`.
///
/// Whether the diagonal of a Tressian can be read off at no extra cost from
/// the points of a previously computed centered Hessian is an open reuse
/// experiment; the plans overlap but no estimator here exploits it.
pub fn gst(
    cache: &EvalCache,
    x0: &[f64],
    s: &DirectionMatrix,
    tbar: &DirectionMatrix,
    ubar: &DirectionMatrix,
) -> Result<DerivTensor> {
    let levels = [
        family_of(tbar, s.cols())?,
        family_of(ubar, tbar.cols())?,
    ];
    simplex_derivative_tensor(cache, x0, s, &levels)
}

fn family_of(shared: &DirectionMatrix, m: usize) -> Result<DirectionFamily> {
    DirectionFamily::uniform(shared.clone(), m)
}

/// Order-P simplex derivative tensor with the default order ceiling.
///
/// `levels` holds the per-level inner families `S̄_2 .. S̄_P`; the recursion
/// bottoms out at the GSG. `P = 1` and `P = 2` delegate to [`gsg`] and
/// [`gsh`] and so coincide with them bit for bit; orders three and above
/// require every level to be an all-equal family.
pub fn simplex_derivative_tensor(
    cache: &EvalCache,
    x0: &[f64],
    s1: &DirectionMatrix,
    levels: &[DirectionFamily],
) -> Result<DerivTensor> {
    simplex_derivative_tensor_with_max(cache, x0, s1, levels, DEFAULT_MAX_ORDER)
}

/// As [`simplex_derivative_tensor`] with an explicit maximum order.
pub fn simplex_derivative_tensor_with_max(
    cache: &EvalCache,
    x0: &[f64],
    s1: &DirectionMatrix,
    levels: &[DirectionFamily],
    max_order: usize,
) -> Result<DerivTensor> {
    let p = levels.len() + 1;
    if p > max_order {
        return Err(Error::OrderTooHigh {
            requested: p,
            max: max_order,
        });
    }
    match levels {
        [] => Ok(DerivTensor::from_vector(gsg(cache, x0, s1)?)),
        [family] => Ok(DerivTensor::from_matrix(&gsh(cache, x0, s1, family)?)),
        _ => {
            let mut shared = Vec::with_capacity(levels.len());
            let mut prev_cols = s1.cols();
            for family in levels {
                let t = family.shared().ok_or(Error::Unsupported(
                    "orders above 2 require all-equal inner families",
                ))?;
                if family.len() != prev_cols {
                    return Err(Error::InvalidScheme(
                        "family length must equal the column count of the previous level",
                    ));
                }
                prev_cols = t.cols();
                shared.push(t.clone());
            }
            nabla_p(cache, x0, &[], s1, &shared)
        }
    }
}

/// Recursive order-P estimator over uniform levels, evaluated at
/// `x⁰ + Σ base`.
fn nabla_p(
    cache: &EvalCache,
    x0: &[f64],
    base: &[Term<'_>],
    s1: &DirectionMatrix,
    rest: &[DirectionMatrix],
) -> Result<DerivTensor> {
    let st_pinv = pinv(&s1.matrix().transpose())?;
    if rest.is_empty() {
        return Ok(DerivTensor::from_vector(gsg_at(
            cache, x0, base, s1, &st_pinv,
        )?));
    }
    let (next, tail) = rest.split_first().unwrap();
    let inner_base = nabla_p(cache, x0, base, next, tail)?;
    let n = x0.len();
    let order = inner_base.order() + 1;
    let mut delta_dims = vec![n; order];
    delta_dims[0] = s1.cols();
    let mut delta = DerivTensor::zeros(&delta_dims);
    let inner_len: usize = delta_dims[1..].iter().product();
    for j in 0..s1.cols() {
        let col = s1.column(j);
        let mut terms = base.to_vec();
        terms.push((&col, 1));
        let inner_plus = nabla_p(cache, x0, &terms, next, tail)?;
        // Floor j is the reversed-index transpose of the inner difference;
        // floors are contiguous row-major blocks.
        let floor = inner_plus.sub(&inner_base).transpose_reversed();
        delta.data_mut()[j * inner_len..(j + 1) * inner_len].copy_from_slice(floor.data());
    }
    tensor_mul(&st_pinv, &delta)
}

/// An estimate together with the plan that produced it and the number of
/// distinct evaluations it cost.
#[derive(Debug, Clone)]
pub struct EstimatorResult {
    pub value: DerivTensor,
    pub plan: SamplePlan,
    pub eval_count: usize,
}

/// Dispatch a scheme's estimator on a populated cache.
pub fn estimate(cache: &EvalCache, spec: &SchemeSpec, x0: &[f64]) -> Result<DerivTensor> {
    let (s, family) = spec.directions()?;
    match spec.kind() {
        SchemeKind::HvpGsh | SchemeKind::HvpGcsh => {
            let g = if spec.centered() {
                gcsh(cache, x0, &s, &family)?
            } else {
                gsh(cache, x0, &s, &family)?
            };
            Ok(DerivTensor::from_vector(
                g.mul_vec(spec.product_vector().unwrap()),
            ))
        }
        _ => {
            let g = if spec.centered() {
                gcsh(cache, x0, &s, &family)?
            } else {
                gsh(cache, x0, &s, &family)?
            };
            Ok(DerivTensor::from_matrix(&g))
        }
    }
}

/// Enumerate a scheme's plan, evaluate the objective at every point, and run
/// the scheme's estimator.
pub fn approximate<F>(spec: &SchemeSpec, mut f: F, x0: &[f64]) -> Result<EstimatorResult>
where
    F: FnMut(&[f64]) -> f64,
{
    if x0.len() != spec.dim() {
        return Err(Error::InvalidScheme("x0 length must equal the scheme dimension"));
    }
    let (s, family) = spec.directions()?;
    let plan = enumerate(x0, &s, &family, spec.centered());
    let mut cache = EvalCache::new();
    cache.evaluate(&mut f, &plan)?;
    let value = estimate(&cache, spec, x0)?;
    Ok(EstimatorResult {
        value,
        eval_count: plan.count(),
        plan,
    })
}
