//! Thin wrappers around faer's dense decompositions.
//!
//! Every call runs with `Par::Seq` so results do not depend on how many
//! threads the caller happens to use.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::lu::partial_pivoting as lu;
use faer::linalg::svd::{self, ComputeSvdVectors};
use faer::diag::Diag;
use faer::{c64, Mat, MatRef, Par};

use crate::{Error, Result};

pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = Mat::<c64>::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let s = a[(i, j)];
            if s == c64::new(0.0, 0.0) {
                continue;
            }
            for q in 0..bc {
                for p in 0..br {
                    out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                }
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Mat<c64> {
    Mat::<c64>::identity(n, n)
}

pub fn dagger(a: MatRef<'_, c64>) -> Mat<c64> {
    a.adjoint().to_owned()
}

pub fn commutator(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    a * b - b * a
}

pub fn trace(a: MatRef<'_, c64>) -> c64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

pub fn scale(a: MatRef<'_, c64>, s: c64) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| s * a[(i, j)])
}

pub fn fro(a: MatRef<'_, c64>) -> f64 {
    a.norm_l2()
}

/// Largest absolute entry of `a - a^dagger`.
pub fn hermiticity_defect(a: MatRef<'_, c64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitize(a: MatRef<'_, c64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        (a[(i, j)] + a[(j, i)].conj()) * 0.5
    })
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn eigh(a: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let n = a.nrows();
    let par = Par::Seq;
    let mut s = Diag::<c64>::zeros(n);
    let mut u = Mat::<c64>::zeros(n, n);
    let req = evd::self_adjoint_evd_scratch::<c64>(
        n,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    );
    let mut buf = MemBuffer::new(req);
    evd::self_adjoint_evd(
        a,
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let vals = (0..n).map(|i| s.column_vector()[i].re).collect();
    Ok((vals, u))
}

pub fn eigvalsh(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    Ok(eigh(a)?.0)
}

/// Eigenvalues and right eigenvectors (unit 2-norm columns) of a general complex matrix.
pub fn eig(a: MatRef<'_, c64>) -> Result<(Vec<c64>, Mat<c64>)> {
    let n = a.nrows();
    let par = Par::Seq;
    let mut s = Diag::<c64>::zeros(n);
    let mut u = Mat::<c64>::zeros(n, n);
    let req = evd::evd_scratch::<c64>(
        n,
        ComputeEigenvectors::No,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    );
    let mut buf = MemBuffer::new(req);
    evd::evd_cplx(
        a,
        s.as_mut(),
        None,
        Some(u.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let vals = (0..n).map(|i| s.column_vector()[i]).collect();
    Ok((vals, u))
}

/// Singular values in descending order.
pub fn singular_values(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    let (m, n) = (a.nrows(), a.ncols());
    let par = Par::Seq;
    let mut s = Diag::<c64>::zeros(m.min(n));
    let req = svd::svd_scratch::<c64>(
        m,
        n,
        ComputeSvdVectors::No,
        ComputeSvdVectors::No,
        par,
        Default::default(),
    );
    let mut buf = MemBuffer::new(req);
    svd::svd(
        a,
        s.as_mut(),
        None,
        None,
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::Eigensolver(format!("svd: {e:?}")))?;
    let mut out: Vec<f64> = (0..m.min(n)).map(|i| s.column_vector()[i].re.abs()).collect();
    out.sort_by(|x, y| y.total_cmp(x));
    Ok(out)
}

/// Orthonormal basis of the numerical kernel of `a`: eigenvectors of `a^dagger a`
/// whose eigenvalue is below `tol` times the largest one.
pub fn null_space(a: MatRef<'_, c64>, tol: f64) -> Result<Mat<c64>> {
    let g = a.adjoint() * a;
    let (vals, vecs) = eigh(g.as_ref())?;
    let top = vals.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] < tol * top).collect();
    Ok(Mat::from_fn(a.ncols(), keep.len(), |i, k| vecs[(i, keep[k])]))
}

pub fn inverse(a: MatRef<'_, c64>) -> Mat<c64> {
    let n = a.nrows();
    let par = Par::Seq;
    let mut lu_mat = a.to_owned();
    let mut fwd = vec![0usize; n];
    let mut bwd = vec![0usize; n];
    let mut buf = MemBuffer::new(lu::factor::lu_in_place_scratch::<usize, c64>(
        n,
        n,
        par,
        Default::default(),
    ));
    let (_, perm) = lu::factor::lu_in_place(
        lu_mat.as_mut(),
        &mut fwd,
        &mut bwd,
        par,
        MemStack::new(&mut buf),
        Default::default(),
    );
    let mut out = Mat::<c64>::zeros(n, n);
    let mut buf = MemBuffer::new(lu::inverse::inverse_scratch::<usize, c64>(n, par));
    lu::inverse::inverse(
        out.as_mut(),
        lu_mat.as_ref(),
        lu_mat.as_ref(),
        perm,
        par,
        MemStack::new(&mut buf),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> Mat<c64> {
        let mut s = seed;
        Mat::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            c64::new(a, b)
        })
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(identity(2).as_ref(), identity(3).as_ref());
        assert_eq!(fro((k - identity(6)).as_ref()), 0.0);
    }

    #[test]
    fn kron_mixed_product() {
        let (a, b, c, d) = (sample(2, 1), sample(3, 2), sample(2, 3), sample(3, 4));
        let lhs = kron(a.as_ref(), b.as_ref()) * kron(c.as_ref(), d.as_ref());
        let rhs = kron((&a * &c).as_ref(), (&b * &d).as_ref());
        assert!(fro((lhs - rhs).as_ref()) < 1e-12);
    }

    #[test]
    fn eig_residual_small() {
        let a = sample(12, 7);
        let (vals, vecs) = eig(a.as_ref()).unwrap();
        for (k, &l) in vals.iter().enumerate() {
            let v = vecs.col(k);
            let r = &a * v - v * faer::Scale(l);
            assert!(r.norm_l2() < 1e-12);
        }
    }

    #[test]
    fn eigh_reconstructs() {
        let a = sample(9, 3);
        let h = hermitize(a.as_ref());
        let (vals, u) = eigh(h.as_ref()).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = Mat::from_fn(9, 9, |i, j| if i == j { c64::new(vals[i], 0.0) } else { c64::new(0.0, 0.0) });
        let back = &u * d * u.adjoint();
        assert!(fro((back - &h).as_ref()) < 1e-12);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = sample(10, 11);
        let inv = inverse(a.as_ref());
        assert!(fro((&inv * &a - identity(10)).as_ref()) < 1e-11);
    }

    #[test]
    fn null_space_of_rank_deficient() {
        let mut a = sample(5, 5);
        for i in 0..5 {
            a[(i, 4)] = a[(i, 0)] + a[(i, 1)];
        }
        let ns = null_space(a.as_ref(), 1e-8).unwrap();
        assert_eq!(ns.ncols(), 1);
        assert!((&a * &ns).norm_l2() < 1e-10);
        let sv = singular_values(a.as_ref()).unwrap();
        assert!(sv[4] < 1e-12 && sv[3] > 1e-3);
    }
}
