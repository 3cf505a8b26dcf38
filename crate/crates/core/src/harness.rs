//! Test-function registry with analytic derivative oracles, radius sweeps,
//! empirical convergence-order estimation, and bound-validity experiments.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::{self, BoundInputs, BoundVariant};
use crate::directions::{radii, SchemeSpec};
use crate::error::{Error, Result};
use crate::estimators::{cshd, estimate};
use crate::linalg::{norm2, spectral_norm, Matrix};
use crate::projections::{proj_st, proj_vec};
use crate::sampling::{enumerate, EvalCache};
use crate::tensor::DerivTensor;

/// Measured errors below `1e3 · eps · scale` are treated as round-off and
/// excluded from slope fits. The scale of rounding in a second-difference
/// estimator is the function magnitude amplified by `1/Δ_l²`, so the floor
/// is evaluated per radius.
const ROUNDOFF_FLOOR: f64 = 1e3 * f64::EPSILON;

/// Absolute slack (relative to the target scale) allowed when a bound is
/// exactly zero and the measured error is pure rounding noise.
const EXACTNESS_SLACK: f64 = 1e-8;

/// Safety inflation applied to grid-maximized Lipschitz constants.
const LIPSCHITZ_INFLATION: f64 = 1.05;

fn powi(x: f64, e: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..e {
        r *= x;
    }
    r
}

/// Multivariate polynomial as a map from exponent multi-indices to
/// coefficients. Derivatives of any order are exact by multi-index calculus,
/// which makes polynomials the reference oracles for every exactness claim.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFunction {
    n: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl PolynomialFunction {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        PolynomialFunction {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Add `coeff · Π x_i^{exps[i]}` to the polynomial.
    pub fn with_term(mut self, exps: &[u32], coeff: f64) -> Self {
        assert_eq!(exps.len(), self.n);
        if coeff != 0.0 {
            *self.terms.entry(exps.to_vec()).or_insert(0.0) += coeff;
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        self.terms
            .iter()
            .map(|(exps, &c)| c * exps.iter().zip(x).map(|(&e, &xi)| powi(xi, e)).product::<f64>())
            .sum()
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn partial(&self, i: usize) -> PolynomialFunction {
        let mut out = PolynomialFunction::new(self.n);
        for (exps, &c) in &self.terms {
            if exps[i] == 0 {
                continue;
            }
            let mut e = exps.clone();
            e[i] -= 1;
            *out.terms.entry(e).or_insert(0.0) += c * exps[i] as f64;
        }
        out
    }

    /// Exact order-`p` derivative tensor at `x0` by term-wise
    /// differentiation.
    pub fn analytic_tensor(&self, x0: &[f64], p: usize) -> DerivTensor {
        assert!(p >= 1);
        let mut t = DerivTensor::zeros(&vec![self.n; p]);
        let mut idx = Vec::with_capacity(p);
        self.fill_tensor(&mut t, &mut idx, x0, p);
        t
    }

    fn fill_tensor(&self, t: &mut DerivTensor, idx: &mut Vec<usize>, x0: &[f64], p: usize) {
        if idx.len() == p {
            t.set(idx, self.eval(x0));
            return;
        }
        for i in 0..self.n {
            idx.push(i);
            self.partial(i).fill_tensor(t, idx, x0, p);
            idx.pop();
        }
    }

    pub fn gradient(&self, x0: &[f64]) -> Vec<f64> {
        self.analytic_tensor(x0, 1).data().to_vec()
    }

    pub fn hessian(&self, x0: &[f64]) -> Matrix {
        self.analytic_tensor(x0, 2).to_matrix().unwrap()
    }
}

/// A registered test function: either a polynomial (full analytic tensor
/// oracle) or a hand-coded smooth function with closed-form gradient and
/// Hessian.
#[derive(Debug, Clone)]
pub enum TestFunction {
    Polynomial(PolynomialFunction),
    /// `exp(x1) + sin(x2) + x1·x2²`, padded to three coordinates.
    ExpSinMix,
}

impl TestFunction {
    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Polynomial(p) => p.dim(),
            TestFunction::ExpSinMix => 3,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Polynomial(p) => p.eval(x),
            TestFunction::ExpSinMix => libm::exp(x[0]) + libm::sin(x[1]) + x[0] * x[1] * x[1],
        }
    }

    pub fn gradient(&self, x0: &[f64]) -> Vec<f64> {
        match self {
            TestFunction::Polynomial(p) => p.gradient(x0),
            TestFunction::ExpSinMix => vec![
                libm::exp(x0[0]) + x0[1] * x0[1],
                libm::cos(x0[1]) + 2.0 * x0[0] * x0[1],
                0.0,
            ],
        }
    }

    pub fn hessian(&self, x0: &[f64]) -> Matrix {
        match self {
            TestFunction::Polynomial(p) => p.hessian(x0),
            TestFunction::ExpSinMix => Matrix::from_rows(&[
                &[libm::exp(x0[0]), 2.0 * x0[1], 0.0],
                &[2.0 * x0[1], -libm::sin(x0[1]) + 2.0 * x0[0], 0.0],
                &[0.0, 0.0, 0.0],
            ]),
        }
    }

    /// The underlying polynomial, when there is one; analytic Lipschitz
    /// constants (and hence bound ceilings) are only available then.
    pub fn polynomial(&self) -> Option<&PolynomialFunction> {
        match self {
            TestFunction::Polynomial(p) => Some(p),
            TestFunction::ExpSinMix => None,
        }
    }
}

fn quartic3() -> PolynomialFunction {
    PolynomialFunction::new(3)
        .with_term(&[4, 0, 0], -2.0)
        .with_term(&[0, 4, 0], 1.0)
        .with_term(&[0, 0, 4], 10.0)
}

fn crossquartic3() -> PolynomialFunction {
    // (x1 + x2)^4 + x1^2 x3^2 + x3^4
    PolynomialFunction::new(3)
        .with_term(&[4, 0, 0], 1.0)
        .with_term(&[3, 1, 0], 4.0)
        .with_term(&[2, 2, 0], 6.0)
        .with_term(&[1, 3, 0], 4.0)
        .with_term(&[0, 4, 0], 1.0)
        .with_term(&[2, 0, 2], 1.0)
        .with_term(&[0, 0, 4], 1.0)
}

fn quadratic3() -> PolynomialFunction {
    // ½ xᵀQx + bᵀx + c with Q = [[4,1,0],[1,3,-1],[0,-1,2]].
    PolynomialFunction::new(3)
        .with_term(&[2, 0, 0], 2.0)
        .with_term(&[0, 2, 0], 1.5)
        .with_term(&[0, 0, 2], 1.0)
        .with_term(&[1, 1, 0], 1.0)
        .with_term(&[0, 1, 1], -1.0)
        .with_term(&[1, 0, 0], 1.0)
        .with_term(&[0, 1, 0], -2.0)
        .with_term(&[0, 0, 1], 0.5)
        .with_term(&[0, 0, 0], 3.0)
}

fn cubic3() -> PolynomialFunction {
    PolynomialFunction::new(3)
        .with_term(&[3, 0, 0], 1.0)
        .with_term(&[1, 2, 0], -2.0)
        .with_term(&[0, 1, 2], 0.5)
        .with_term(&[1, 1, 1], 1.0)
        .with_term(&[0, 2, 0], 2.0)
}

/// Named test functions available to the harness and the command-line tool.
pub fn registry() -> Vec<(&'static str, TestFunction)> {
    vec![
        ("quartic3", TestFunction::Polynomial(quartic3())),
        ("crossquartic3", TestFunction::Polynomial(crossquartic3())),
        ("quadratic3", TestFunction::Polynomial(quadratic3())),
        ("cubic3", TestFunction::Polynomial(cubic3())),
        ("expsin3", TestFunction::ExpSinMix),
    ]
}

pub fn lookup(name: &str) -> Option<TestFunction> {
    registry()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f)
}

// ---------------------------------------------------------------------------
// Lipschitz constants
// ---------------------------------------------------------------------------

/// Deterministic direction grid on the unit sphere: signed basis vectors,
/// signed two-coordinate diagonals, and the signed all-ones direction.
fn sphere_grid(n: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[i] = sign;
            dirs.push(d);
        }
    }
    let inv_sqrt2 = 1.0 / libm::sqrt(2.0);
    for i in 0..n {
        for j in (i + 1)..n {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut d = vec![0.0; n];
                d[i] = si * inv_sqrt2;
                d[j] = sj * inv_sqrt2;
                dirs.push(d);
            }
        }
    }
    let inv_sqrt_n = 1.0 / libm::sqrt(n as f64);
    for sign in [1.0, -1.0] {
        dirs.push(vec![sign * inv_sqrt_n; n]);
    }
    dirs
}

fn tensor_frobenius(t: &DerivTensor) -> f64 {
    libm::sqrt(t.data().iter().map(|x| x * x).sum())
}

/// Error metric by order: Euclidean norm for vectors, spectral norm for
/// matrices, and the largest singular value of the mode-1 unfolding for
/// higher orders.
pub fn error_norm(t: &DerivTensor) -> f64 {
    match t.order() {
        1 => norm2(t.data()),
        _ => spectral_norm(&t.unfold_mode1()),
    }
}

/// Lipschitz constant of the order-`(tensor_order − 1)` derivative over the
/// closed ball of the given radius: the Frobenius norm of the order-
/// `tensor_order` tensor, maximized over boundary grid points (and the
/// center), inflated by 5%.
pub fn lipschitz_constant(
    p: &PolynomialFunction,
    x0: &[f64],
    ball_radius: f64,
    tensor_order: usize,
) -> f64 {
    let mut best = tensor_frobenius(&p.analytic_tensor(x0, tensor_order));
    for d in sphere_grid(p.dim()) {
        let y: Vec<f64> = x0
            .iter()
            .zip(&d)
            .map(|(&xi, &di)| xi + ball_radius * di)
            .collect();
        best = best.max(tensor_frobenius(&p.analytic_tensor(&y, tensor_order)));
    }
    LIPSCHITZ_INFLATION * best
}

// ---------------------------------------------------------------------------
// Sweep schemes
// ---------------------------------------------------------------------------

/// Scheme selector for radius sweeps; the step is instantiated per radius.
#[derive(Debug, Clone)]
pub enum SweepScheme {
    GshMinimal,
    GcshMinimal,
    /// Centered diagonal scheme over the full index set.
    Diag,
    /// Same points as `Diag`, estimated by the CSHD formula.
    Cshd,
    OffDiagGsh,
    OffDiagGcsh,
    RowGsh { row: usize },
    RowGcsh { row: usize },
    HvpGsh { v: Vec<f64> },
    HvpGcsh { v: Vec<f64> },
}

impl SweepScheme {
    pub fn name(&self) -> &'static str {
        match self {
            SweepScheme::GshMinimal => "gsh-minimal",
            SweepScheme::GcshMinimal => "gcsh-minimal",
            SweepScheme::Diag => "diag",
            SweepScheme::Cshd => "cshd",
            SweepScheme::OffDiagGsh => "off-diag-gsh",
            SweepScheme::OffDiagGcsh => "off-diag-gcsh",
            SweepScheme::RowGsh { .. } => "row-gsh",
            SweepScheme::RowGcsh { .. } => "row-gcsh",
            SweepScheme::HvpGsh { .. } => "hvp-gsh",
            SweepScheme::HvpGcsh { .. } => "hvp-gcsh",
        }
    }

    pub fn spec(&self, n: usize, h: f64) -> Result<SchemeSpec> {
        match self {
            SweepScheme::GshMinimal => SchemeSpec::full_gsh_minimal(n, h),
            SweepScheme::GcshMinimal => SchemeSpec::full_gcsh_minimal(n, h),
            SweepScheme::Diag | SweepScheme::Cshd => {
                SchemeSpec::diag(n, h, (0..n).collect())
            }
            SweepScheme::OffDiagGsh => SchemeSpec::off_diag(n, h, false),
            SweepScheme::OffDiagGcsh => SchemeSpec::off_diag(n, h, true),
            SweepScheme::RowGsh { row } => SchemeSpec::row(n, *row, h, false),
            SweepScheme::RowGcsh { row } => SchemeSpec::row(n, *row, h, true),
            SweepScheme::HvpGsh { v } => SchemeSpec::hvp(n, v.clone(), h, false),
            SweepScheme::HvpGcsh { v } => SchemeSpec::hvp(n, v.clone(), h, true),
        }
    }
}

/// One radius measurement: the realized upper radius, the measured error
/// against the projected analytic target, the evaluation count, and the
/// bound ceiling when analytic Lipschitz data exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub delta_u: f64,
    pub delta_l: f64,
    pub error: f64,
    pub eval_count: usize,
    pub bound: Option<f64>,
    /// Norm of the projected analytic target (at least 1).
    pub scale: f64,
    /// Largest `|f|` over the plan (at least 1); sets the round-off floor.
    pub f_scale: f64,
}

/// Run one scheme at one step and compare against the analytic target.
pub fn measure(
    scheme: &SweepScheme,
    f: &TestFunction,
    x0: &[f64],
    h: f64,
) -> Result<Measurement> {
    let n = f.dim();
    if x0.len() != n {
        return Err(Error::InvalidScheme("x0 length must match the function dimension"));
    }
    let spec = scheme.spec(n, h)?;
    let (s, family) = spec.directions()?;
    let plan = enumerate(x0, &s, &family, spec.centered());
    let mut cache = EvalCache::new();
    let mut f_scale = 1.0_f64;
    cache.evaluate(
        |x: &[f64]| {
            let y = f.eval(x);
            f_scale = f_scale.max(y.abs());
            y
        },
        &plan,
    )?;

    let hessian = f.hessian(x0);
    let r = radii(&s, &family);

    let (error, scale) = match scheme {
        SweepScheme::Cshd => {
            let est = cshd(&cache, x0, &s)?;
            let target_m = proj_st(&hessian, &s, &family)?;
            let target: Vec<f64> = (0..n).map(|i| target_m[(i, i)]).collect();
            let diff: Vec<f64> = est.iter().zip(&target).map(|(a, b)| a - b).collect();
            (norm2(&diff), norm2(&target).max(1.0))
        }
        SweepScheme::HvpGsh { v } | SweepScheme::HvpGcsh { v } => {
            let est = estimate(&cache, &spec, x0)?;
            let est = est.as_vector().unwrap().to_vec();
            let target = proj_vec(&hessian.mul_vec(v), &s)?;
            let diff: Vec<f64> = est.iter().zip(&target).map(|(a, b)| a - b).collect();
            (norm2(&diff), norm2(&target).max(1.0))
        }
        _ => {
            let est = estimate(&cache, &spec, x0)?.to_matrix().unwrap();
            let target = proj_st(&hessian, &s, &family)?;
            (
                spectral_norm(&est.sub(&target)),
                spectral_norm(&target).max(1.0),
            )
        }
    };

    let bound = f.polynomial().map(|p| {
        let ball = r.delta_s + r.delta_t;
        let lip_hessian = lipschitz_constant(p, x0, ball, 3);
        let lip_third = lipschitz_constant(p, x0, ball, 4);
        let v = match scheme {
            SweepScheme::HvpGsh { v } | SweepScheme::HvpGcsh { v } => Some(v.as_slice()),
            _ => None,
        };
        let inputs = BoundInputs::from_directions(&s, &family, lip_hessian, lip_third, v)
            .expect("finite directions");
        match scheme {
            SweepScheme::GshMinimal => bounds::gsh_bound(&inputs, BoundVariant::General),
            SweepScheme::GcshMinimal => bounds::gcsh_bound(&inputs, BoundVariant::CommonT),
            SweepScheme::Diag | SweepScheme::Cshd => {
                bounds::diag_bound(inputs.lip_third, inputs.delta_s)
            }
            SweepScheme::OffDiagGsh => bounds::offdiag_bound(&inputs, false),
            SweepScheme::OffDiagGcsh => bounds::offdiag_bound(&inputs, true),
            SweepScheme::RowGsh { .. } => bounds::row_bound(&inputs, false),
            SweepScheme::RowGcsh { .. } => bounds::row_bound(&inputs, true),
            SweepScheme::HvpGsh { .. } => bounds::hvp_bound(&inputs, false),
            SweepScheme::HvpGcsh { .. } => bounds::hvp_bound(&inputs, true),
        }
    });

    Ok(Measurement {
        delta_u: r.delta_u,
        delta_l: r.delta_l,
        error,
        eval_count: plan.count(),
        bound,
        scale,
        f_scale,
    })
}

/// Radius sweep summary: per-radius errors and ceilings plus the fitted
/// slope of `log error` against `log Δ_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub scheme: &'static str,
    /// Realized `Δ_u` per step, strictly decreasing.
    pub radii: Vec<f64>,
    pub errors: Vec<f64>,
    pub eval_counts: Vec<usize>,
    pub bounds: Vec<Option<f64>>,
    /// Least-squares slope over the radii whose error clears the round-off
    /// floor; absent when fewer than two usable points remain.
    pub slope: Option<f64>,
    /// True when every measured error sits below the round-off floor (the
    /// estimator is exact on this function up to rounding).
    pub exact: bool,
}

/// Default sweep: eight radii from 0.1, halving each step.
pub fn default_radii() -> Vec<f64> {
    let mut out = Vec::with_capacity(8);
    let mut h = 0.1;
    for _ in 0..8 {
        out.push(h);
        h *= 0.5;
    }
    out
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Sweep a scheme over strictly decreasing steps (at least four) and fit the
/// empirical convergence order.
pub fn convergence_order(
    scheme: &SweepScheme,
    f: &TestFunction,
    x0: &[f64],
    steps: &[f64],
) -> Result<SweepReport> {
    if steps.len() < 4 {
        return Err(Error::InvalidScheme("a sweep needs at least 4 radii"));
    }
    if steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidScheme("sweep radii must be strictly decreasing"));
    }
    let mut radii_out = Vec::with_capacity(steps.len());
    let mut errors = Vec::with_capacity(steps.len());
    let mut counts = Vec::with_capacity(steps.len());
    let mut bound_col = Vec::with_capacity(steps.len());
    let mut floors = Vec::with_capacity(steps.len());
    for &h in steps {
        let m = measure(scheme, f, x0, h)?;
        radii_out.push(m.delta_u);
        errors.push(m.error);
        counts.push(m.eval_count);
        bound_col.push(m.bound);
        floors.push(ROUNDOFF_FLOOR * m.f_scale / (m.delta_l * m.delta_l));
    }
    let pts: Vec<(f64, f64)> = radii_out
        .iter()
        .zip(errors.iter().zip(&floors))
        .filter(|(_, (&e, &fl))| e >= fl)
        .map(|(&d, (&e, _))| (libm::log(d), libm::log(e)))
        .collect();
    let exact = pts.is_empty();
    let slope = (pts.len() >= 2).then(|| least_squares_slope(&pts));
    Ok(SweepReport {
        scheme: scheme.name(),
        radii: radii_out,
        errors,
        eval_counts: counts,
        bounds: bound_col,
        slope,
        exact,
    })
}

/// One row of a bound-validity table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub delta_u: f64,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Bound-validity table over a set of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    pub scheme: &'static str,
    pub rows: Vec<BoundRow>,
    pub all_pass: bool,
}

/// Check measured error against the scheme's error ceiling at every step.
/// The function must be polynomial so the Lipschitz constants are analytic.
/// A zero ceiling allows rounding-level slack.
pub fn verify_bound(
    scheme: &SweepScheme,
    p: &PolynomialFunction,
    x0: &[f64],
    steps: &[f64],
) -> Result<BoundTable> {
    let f = TestFunction::Polynomial(p.clone());
    let mut rows = Vec::with_capacity(steps.len());
    let mut all_pass = true;
    for &h in steps {
        let m = measure(scheme, &f, x0, h)?;
        let bound = m.bound.expect("polynomial input has analytic constants");
        let pass = m.error <= bound + EXACTNESS_SLACK * m.scale;
        all_pass &= pass;
        rows.push(BoundRow {
            delta_u: m.delta_u,
            measured: m.error,
            bound,
            pass,
        });
    }
    Ok(BoundTable {
        scheme: scheme.name(),
        rows,
        all_pass,
    })
}
