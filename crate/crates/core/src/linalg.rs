//! Bridges between ndarray storage and faer decompositions.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};
use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

pub(crate) fn to_faer(a: ArrayView2<'_, f64>) -> Mat<f64> {
    match a.as_slice() {
        Some(s) => MatRef::from_row_major_slice(s, a.nrows(), a.ncols()).to_owned(),
        None => Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]]),
    }
}

pub(crate) fn from_faer(m: MatRef<'_, f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// `a · b` through faer's blocked kernels.
pub(crate) fn matmul(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    let (fa, fb) = (to_faer(a), to_faer(b));
    from_faer((&fa * &fb).as_ref())
}

/// `aᵀ · a`, mirrored so the result is exactly symmetric.
pub(crate) fn gram(a: ArrayView2<'_, f64>) -> Array2<f64> {
    let fa = to_faer(a);
    let g = fa.transpose() * &fa;
    let n = g.nrows();
    Array2::from_shape_fn((n, n), |(i, j)| if i <= j { g[(i, j)] } else { g[(j, i)] })
}

/// Solves `m · x = rhs` for symmetric positive-definite `m`.
pub(crate) fn spd_solve(m: ArrayView2<'_, f64>, rhs: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let fm = to_faer(m);
    let llt = fm.llt(Side::Lower).map_err(|_| Error::SingularSystem)?;
    let x = llt.solve(to_faer(rhs));
    Ok(from_faer(x.as_ref()))
}

pub(crate) struct Svd {
    pub u: Array2<f64>,
    pub s: Array1<f64>,
    pub v: Array2<f64>,
}

/// Thin SVD with singular values in nonincreasing order.
pub(crate) fn thin_svd(m: ArrayView2<'_, f64>) -> Result<Svd> {
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::SvdFailure);
    }
    let svd = to_faer(m).thin_svd().map_err(|_| Error::SvdFailure)?;
    let s = svd.S().column_vector();
    Ok(Svd {
        u: from_faer(svd.U()),
        s: Array1::from_shape_fn(s.nrows(), |i| s[i]),
        v: from_faer(svd.V()),
    })
}

pub(crate) fn singular_values(m: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::SvdFailure);
    }
    to_faer(m).singular_values().map_err(|_| Error::SvdFailure)
}

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
pub(crate) fn sym_eigen(m: ArrayView2<'_, f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let evd = to_faer(m)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let s = evd.S().column_vector();
    Ok((
        Array1::from_shape_fn(s.nrows(), |i| s[i]),
        from_faer(evd.U()),
    ))
}

/// Nuclear norm from the eigenvalues of `mᵀm`. Cheaper than an SVD; small
/// singular values carry an absolute error near `sqrt(ε)·σ_max`.
pub(crate) fn nuclear_norm_from_gram(m: ArrayView2<'_, f64>) -> Result<f64> {
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let fm = to_faer(m);
    let g = fm.transpose() * &fm;
    let eig = g
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    Ok(eig.iter().map(|&e| e.max(0.0).sqrt()).sum())
}

pub(crate) fn inf_norm_diff(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn matmul_matches_ndarray() {
        let a = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let b = array![[1.0, 0.5], [0.0, -1.0], [2.0, 3.0]];
        assert_eq!(matmul(a.view(), b.view()), a.dot(&b));
        // non-contiguous input
        let at = a.t();
        assert_eq!(matmul(at, a.view()), at.dot(&a));
        assert_eq!(gram(a.view()), at.dot(&a));
    }

    #[test]
    fn spd_solve_recovers_solution() {
        let m = array![[4.0, 1.0], [1.0, 3.0]];
        let x = array![[1.0, 2.0], [-1.0, 0.5]];
        let rhs = m.dot(&x);
        let got = spd_solve(m.view(), rhs.view()).unwrap();
        assert!(inf_norm_diff(got.view(), x.view()) < 1e-12);
        let not_pd = array![[0.0, 1.0], [1.0, 0.0]];
        assert!(matches!(
            spd_solve(not_pd.view(), rhs.view()),
            Err(Error::SingularSystem)
        ));
    }
}
