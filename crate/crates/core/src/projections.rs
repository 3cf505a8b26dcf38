//! Projection operators onto direction matrices, plus extractors for the
//! structured Hessian targets (diagonal, strict upper triangle, single row).
//!
//! `proj_st` selects the part of a matrix a scheme can see:
//! `Proj_{S,T_{1:m}} M = Σ_j (Sᵀ)† e^j (e^j)ᵀ Sᵀ M T_j T_j†`. It is linear,
//! and idempotent whenever `S` has full column rank, or every `T_j` has full
//! row rank, or all `T_j` are equal; under the same conditions it leaves GSH
//! and GCSH estimates unchanged.

use alloc::vec::Vec;

use crate::directions::{DirectionFamily, DirectionMatrix};
use crate::error::{Error, Result};
use crate::linalg::{pinv, Matrix};

/// Projection of the `n×n` matrix `m` onto `S` and `T_{1:m}`. With an
/// all-equal family this equals `(Sᵀ)† Sᵀ M T̄ T̄†`.
pub fn proj_st(m: &Matrix, s: &DirectionMatrix, family: &DirectionFamily) -> Result<Matrix> {
    let n = s.dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            got: (m.nrows(), m.ncols()),
        });
    }
    if family.len() != s.cols() {
        return Err(Error::InvalidScheme(
            "family length must equal the column count of S",
        ));
    }
    let st_pinv = pinv(&s.matrix().transpose())?; // n×m
    let mt = m.transpose();
    let mut out = Matrix::zeros(n, n);
    for j in 0..s.cols() {
        // (e^j)ᵀ Sᵀ M = (s^j)ᵀ M, then right-multiplied by T_j T_j†.
        let row = mt.mul_vec(&s.column(j));
        let t = family.member(j).matrix();
        let t_pinv = pinv(t)?;
        let tt = t.matmul(&t_pinv); // n×n
        let projected_row = tt.transpose().mul_vec(&row);
        for i in 0..n {
            let u = st_pinv[(i, j)];
            if u == 0.0 {
                continue;
            }
            for l in 0..n {
                out[(i, l)] += u * projected_row[l];
            }
        }
    }
    Ok(out)
}

/// Orthogonal projection of `w` onto the column span of `S`:
/// `P_S w = (Sᵀ)† Sᵀ w`.
pub fn proj_vec(w: &[f64], s: &DirectionMatrix) -> Result<Vec<f64>> {
    if w.len() != s.dim() {
        return Err(Error::ShapeMismatch {
            expected: (s.dim(), 1),
            got: (w.len(), 1),
        });
    }
    let st = s.matrix().transpose();
    let st_pinv = pinv(&st)?;
    Ok(st_pinv.mul_vec(&st.mul_vec(w)))
}

fn require_square(m: &Matrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Keep the diagonal, zero everything else.
pub fn extract_diag(m: &Matrix) -> Result<Matrix> {
    require_square(m)?;
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        out[(i, i)] = m[(i, i)];
    }
    Ok(out)
}

/// Keep the entries strictly above the diagonal.
pub fn extract_strict_upper(m: &Matrix) -> Result<Matrix> {
    require_square(m)?;
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            out[(i, j)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Keep row `i` (`Diag(e^i) M`), zero the other rows.
pub fn row_mask(m: &Matrix, i: usize) -> Result<Matrix> {
    require_square(m)?;
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        out[(i, j)] = m[(i, j)];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::{build_diag, build_row, DirectionFamily, DirectionMatrix};
    use alloc::vec;

    fn sample_matrix() -> Matrix {
        Matrix::from_rows(&[&[2.0, -1.0, 0.5], &[3.0, 4.0, -2.0], &[0.25, 1.5, -3.0]])
    }

    #[test]
    fn full_rank_projection_is_identity_map() {
        let s = DirectionMatrix::new(Matrix::from_diag(&[0.1, 0.2, 0.1])).unwrap();
        let tbar = DirectionMatrix::new(Matrix::from_diag(&[0.3, 0.1, 0.2])).unwrap();
        let fam = DirectionFamily::uniform(tbar, 3).unwrap();
        let m = sample_matrix();
        let p = proj_st(&m, &s, &fam).unwrap();
        assert!(p.sub(&m).max_abs() < 1e-12 * m.max_abs());
    }

    #[test]
    fn all_equal_family_reduces_to_sandwich() {
        // General sum equals (Sᵀ)† Sᵀ M T̄ T̄† when every T_j is the same.
        let s = DirectionMatrix::new(Matrix::from_columns(&[
            vec![0.1, 0.0, 0.0],
            vec![0.1, 0.1, 0.0],
        ]))
        .unwrap();
        let tbar =
            DirectionMatrix::new(Matrix::from_columns(&[vec![0.2, 0.1, 0.0]])).unwrap();
        let fam = DirectionFamily::uniform(tbar.clone(), 2).unwrap();
        let m = sample_matrix();
        let general = proj_st(&m, &s, &fam).unwrap();

        let st = s.matrix().transpose();
        let st_pinv = pinv(&st).unwrap();
        let t_pinv = pinv(tbar.matrix()).unwrap();
        let reduced = st_pinv
            .matmul(&st)
            .matmul(&m)
            .matmul(&tbar.matrix().matmul(&t_pinv));
        assert!(general.sub(&reduced).max_abs() < 1e-12);
    }

    #[test]
    fn row_projection_sees_only_the_masked_row() {
        // S = h e^i: projecting M equals projecting Diag(e^i) M.
        let (s, fam) = build_row(3, 1, 0.1).unwrap();
        let m = sample_matrix();
        let masked = row_mask(&m, 1).unwrap();
        let a = proj_st(&m, &s, &fam).unwrap();
        let b = proj_st(&masked, &s, &fam).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-12);
    }

    #[test]
    fn partial_diagonal_projection_keeps_covered_diagonal() {
        // S partial diagonal (columns e^0, e^2 scaled), T_j = −s^j.
        let (s, fam) = build_diag(3, 0.1, &[0, 2]).unwrap();
        let m = sample_matrix();
        let p = proj_st(&m, &s, &fam).unwrap();
        let diag = extract_diag(&m).unwrap();
        let p_diag = proj_st(&diag, &s, &fam).unwrap();
        assert!(p.sub(&p_diag).max_abs() < 1e-12);
        // Covered rows keep M_ii, the uncovered one is zeroed.
        assert!((p[(0, 0)] - m[(0, 0)]).abs() < 1e-12);
        assert!((p[(2, 2)] - m[(2, 2)]).abs() < 1e-12);
        assert!(p[(1, 1)].abs() < 1e-14);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(p[(i, j)].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn off_diag_recipes_project_onto_strict_upper_triangle() {
        // With the off-diagonal direction recipes, the projection of an
        // analytic Hessian equals the projection of its strict upper part.
        let (s, fam) = crate::directions::build_off_diag(3, 0.1).unwrap();
        let h = Matrix::from_rows(&[&[2.0, -1.0, 0.5], &[-1.0, 4.0, 1.5], &[0.5, 1.5, -3.0]]);
        let u = extract_strict_upper(&h).unwrap();
        let a = proj_st(&h, &s, &fam).unwrap();
        let b = proj_st(&u, &s, &fam).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-10);
        // And the projection itself is strictly upper triangular.
        for i in 0..3 {
            for j in 0..=i {
                assert!(a[(i, j)].abs() < 1e-12, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn idempotence_residual_outside_sufficient_conditions_is_recorded() {
        // A configuration violating all three sufficient conditions:
        // rank-deficient S and unequal, rank-deficient inner matrices. The
        // residual is recorded, not asserted.
        let s = DirectionMatrix::new(Matrix::from_columns(&[
            vec![0.1, 0.0, 0.0],
            vec![0.2, 0.0, 0.0],
        ]))
        .unwrap();
        let t1 = DirectionMatrix::new(Matrix::from_columns(&[vec![0.1, 0.1, 0.0]])).unwrap();
        let t2 = DirectionMatrix::new(Matrix::from_columns(&[vec![0.0, 0.1, 0.1]])).unwrap();
        let fam = DirectionFamily::new(vec![t1, t2]).unwrap();
        let m = sample_matrix();
        let once = proj_st(&m, &s, &fam).unwrap();
        let twice = proj_st(&once, &s, &fam).unwrap();
        let residual = twice.sub(&once).max_abs();
        std::println!("idempotence residual outside conditions (i)-(iii): {residual:e}");
    }

    #[test]
    fn proj_vec_examples() {
        // Full row rank leaves the vector unchanged.
        let s = DirectionMatrix::new(Matrix::from_diag(&[0.1, 0.4])).unwrap();
        let w = [3.0, 4.0];
        let p = proj_vec(&w, &s).unwrap();
        assert!((p[0] - 3.0).abs() < 1e-12 && (p[1] - 4.0).abs() < 1e-12);

        // Coordinate projection onto span{e^1}.
        let e1 = DirectionMatrix::new(Matrix::from_columns(&[vec![1.0, 0.0]])).unwrap();
        let p = proj_vec(&w, &e1).unwrap();
        assert!((p[0] - 3.0).abs() < 1e-12 && p[1].abs() < 1e-13);

        // Orthogonal input maps to zero.
        let p = proj_vec(&[0.0, -2.5], &e1).unwrap();
        assert!(p[0].abs() < 1e-13 && p[1].abs() < 1e-13);
    }

    #[test]
    fn extractors() {
        let id = Matrix::identity(3);
        assert_eq!(extract_strict_upper(&id).unwrap(), Matrix::zeros(3, 3));

        // Symmetric decomposition M = U + Uᵀ + D.
        let m = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[2.0, -4.0, 5.0], &[3.0, 5.0, 6.0]]);
        let u = extract_strict_upper(&m).unwrap();
        let d = extract_diag(&m).unwrap();
        let rebuilt = u.add(&u.transpose()).add(&d);
        assert_eq!(rebuilt, m);

        let r = row_mask(&m, 2).unwrap();
        assert_eq!(r.row(2), m.row(2));
        assert_eq!(r.row(0), vec![0.0; 3]);
        assert_eq!(r.row(1), vec![0.0; 3]);

        let rect = Matrix::zeros(2, 3);
        assert!(matches!(extract_diag(&rect), Err(Error::NotSquare { .. })));
    }
}
