//! Scheme-name resolution: maps the `--scheme` strings onto direction
//! builders, estimator choices, and (when available) sweep configurations
//! and closed-form evaluation counts.

use anyhow::{bail, Result};
use simderiv_core::directions::{DirectionFamily, DirectionMatrix, SchemeSpec};
use simderiv_core::harness::SweepScheme;
use simderiv_core::Matrix;

pub const SCHEME_NAMES: &[&str] = &[
    "gsh-minimal",
    "gcsh-minimal",
    "diag",
    "cshd",
    "off-diag-gsh",
    "off-diag-gcsh",
    "row-gsh",
    "row-gcsh",
    "hvp-gsh",
    "hvp-gcsh",
    "gcsh-example1",
    "gcsh-example2",
];

/// A scheme resolved against concrete parameters.
pub struct ResolvedScheme {
    pub name: String,
    pub spec: SchemeSpec,
    /// Estimate through the centered-diagonal formula instead of the
    /// Hessian-shaped estimator.
    pub use_cshd: bool,
    /// Demonstration schemes report both the centered Hessian and the
    /// centered diagonal.
    pub demo: bool,
    /// Sweep configuration for `order`/`bounds`, when the scheme maps onto
    /// one (full index set, builder-generated directions).
    pub sweep: Option<SweepScheme>,
}

pub struct SchemeParams {
    pub n: usize,
    pub h: f64,
    /// 0-based row index.
    pub row: Option<usize>,
    pub v: Option<Vec<f64>>,
    /// 0-based index subset.
    pub subset: Option<Vec<usize>>,
}

fn need_row(p: &SchemeParams) -> Result<usize> {
    match p.row {
        Some(r) => Ok(r),
        None => bail!("this scheme needs --row"),
    }
}

fn need_v(p: &SchemeParams) -> Result<Vec<f64>> {
    match &p.v {
        Some(v) => Ok(v.clone()),
        None => bail!("this scheme needs --v"),
    }
}

/// The worked demonstration configurations: fixed direction columns with
/// `T_j = -s^j`, evaluated by default at (2, -2, 5) on `quartic3`.
pub const DEMO_X0: [f64; 3] = [2.0, -2.0, 5.0];

fn demo_spec(columns: &[Vec<f64>]) -> Result<SchemeSpec> {
    let s = DirectionMatrix::new(Matrix::from_columns(columns))?;
    let members = columns
        .iter()
        .map(|c| {
            let neg: Vec<f64> = c.iter().map(|x| -x).collect();
            DirectionMatrix::new(Matrix::from_columns(&[neg]))
        })
        .collect::<simderiv_core::Result<Vec<_>>>()?;
    let family = DirectionFamily::new(members)?;
    Ok(SchemeSpec::custom(s, family, true)?)
}

pub fn resolve(name: &str, p: &SchemeParams) -> Result<ResolvedScheme> {
    let full_subset = || (0..p.n).collect::<Vec<usize>>();
    let subset = p.subset.clone().unwrap_or_else(full_subset);
    let is_full_subset = {
        let mut sorted = subset.clone();
        sorted.sort_unstable();
        sorted == full_subset()
    };
    let (spec, use_cshd, demo, sweep) = match name {
        "gsh-minimal" => (
            SchemeSpec::full_gsh_minimal(p.n, p.h)?,
            false,
            false,
            Some(SweepScheme::GshMinimal),
        ),
        "gcsh-minimal" => (
            SchemeSpec::full_gcsh_minimal(p.n, p.h)?,
            false,
            false,
            Some(SweepScheme::GcshMinimal),
        ),
        "diag" => (
            SchemeSpec::diag(p.n, p.h, subset)?,
            false,
            false,
            is_full_subset.then_some(SweepScheme::Diag),
        ),
        "cshd" => (
            SchemeSpec::diag(p.n, p.h, subset)?,
            true,
            false,
            is_full_subset.then_some(SweepScheme::Cshd),
        ),
        "off-diag" | "off-diag-gsh" => (
            SchemeSpec::off_diag(p.n, p.h, false)?,
            false,
            false,
            Some(SweepScheme::OffDiagGsh),
        ),
        "off-diag-gcsh" => (
            SchemeSpec::off_diag(p.n, p.h, true)?,
            false,
            false,
            Some(SweepScheme::OffDiagGcsh),
        ),
        "row" | "row-gsh" => {
            let row = need_row(p)?;
            (
                SchemeSpec::row(p.n, row, p.h, false)?,
                false,
                false,
                Some(SweepScheme::RowGsh { row }),
            )
        }
        "row-gcsh" => {
            let row = need_row(p)?;
            (
                SchemeSpec::row(p.n, row, p.h, true)?,
                false,
                false,
                Some(SweepScheme::RowGcsh { row }),
            )
        }
        "hvp" | "hvp-gsh" => {
            let v = need_v(p)?;
            (
                SchemeSpec::hvp(p.n, v.clone(), p.h, false)?,
                false,
                false,
                Some(SweepScheme::HvpGsh { v }),
            )
        }
        "hvp-gcsh" => {
            let v = need_v(p)?;
            (
                SchemeSpec::hvp(p.n, v.clone(), p.h, true)?,
                false,
                false,
                Some(SweepScheme::HvpGcsh { v }),
            )
        }
        "gcsh-example1" => {
            if p.n != 3 {
                bail!("gcsh-example1 is three-dimensional");
            }
            (
                demo_spec(&[
                    vec![0.1, 0.0, 0.0],
                    vec![0.0, 0.1, 0.0],
                    vec![0.0, 0.2, 0.0],
                ])?,
                false,
                true,
                None,
            )
        }
        "gcsh-example2" => {
            if p.n != 3 {
                bail!("gcsh-example2 is three-dimensional");
            }
            (
                demo_spec(&[vec![0.1, 0.0, 0.0], vec![0.1, 0.1, 0.0]])?,
                false,
                true,
                None,
            )
        }
        other => bail!(
            "unknown scheme {other}; expected one of {}",
            SCHEME_NAMES.join(", ")
        ),
    };
    Ok(ResolvedScheme {
        name: name.to_string(),
        spec,
        use_cshd,
        demo,
        sweep,
    })
}
