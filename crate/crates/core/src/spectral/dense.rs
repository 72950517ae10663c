//! Thin LAPACK bindings: dense symmetric and tridiagonal eigensolvers.

use std::ffi::{c_char, c_int};

extern "C" {
    fn openblas_set_num_threads(num_threads: c_int);
}

/// Pins the BLAS/LAPACK backend to `threads` worker threads (process-wide).
pub fn set_blas_threads(threads: usize) {
    let threads = threads.clamp(1, c_int::MAX as usize) as c_int;
    // SAFETY: plain setter exported by the linked OpenBLAS.
    unsafe { openblas_set_num_threads(threads) }
}

/// Eigenvalues (ascending) of the symmetric column-major `n × n` matrix in
/// `a`, which is overwritten. Returns LAPACK's `info` on failure.
pub fn symmetric_eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<f64>, i32> {
    assert_eq!(a.len(), n * n, "matrix buffer must hold n*n entries");
    if n == 0 {
        return Ok(Vec::new());
    }
    let jobz = b'N' as c_char;
    let uplo = b'L' as c_char;
    let order = n as c_int;
    let mut w = vec![0.0; n];
    let mut info: c_int = 0;
    let mut query = [0.0f64];
    // SAFETY: buffers are sized per the LAPACK contract; lwork = -1 is a
    // workspace query that touches only `query`.
    unsafe {
        lapack_sys::dsyev_(
            &jobz, &uplo, &order, a.as_mut_ptr(), &order, w.as_mut_ptr(),
            query.as_mut_ptr(), &-1, &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    let lwork = (query[0] as usize).max(3 * n);
    let mut work = vec![0.0; lwork];
    let lwork = lwork as c_int;
    unsafe {
        lapack_sys::dsyev_(
            &jobz, &uplo, &order, a.as_mut_ptr(), &order, w.as_mut_ptr(),
            work.as_mut_ptr(), &lwork, &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    Ok(w)
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (length `diag.len() - 1`).
///
/// Returns ascending eigenvalues and the last row of the eigenvector matrix,
/// which is what Lanczos residual estimates need.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>), i32> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    assert_eq!(off.len() + 1, n);
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    let mut work = vec![0.0; (2 * n).saturating_sub(2).max(1)];
    let jobz = b'V' as c_char;
    let order = n as c_int;
    let mut info: c_int = 0;
    unsafe {
        lapack_sys::dstev_(
            &jobz, &order, d.as_mut_ptr(), e.as_mut_ptr(), z.as_mut_ptr(), &order,
            work.as_mut_ptr(), &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    // column-major: row n-1 of column c lives at c*n + n-1
    let last_row = (0..n).map(|c| z[c * n + n - 1]).collect();
    Ok((d, last_row))
}
