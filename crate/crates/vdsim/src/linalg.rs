//! Thin wrappers over LAPACK's divide-and-conquer Hermitian eigensolver
//! (`zheevd`) and BLAS level-3 products used for eigensystem verification.
//!
//! All buffers handed to LAPACK/BLAS are column-major. BLAS threading is
//! pinned to a single thread on first use; outer parallelism belongs to the
//! sweep runner, and single-threaded kernels keep results bit-reproducible
//! regardless of worker count.

use num_complex::Complex64;
use std::os::raw::c_char;
use std::sync::Once;

extern crate openblas_src;

static BLAS_SINGLE_THREAD: Once = Once::new();

fn pin_blas_threads() {
    BLAS_SINGLE_THREAD.call_once(|| {
        // OpenBLAS reads this lazily at its first kernel invocation.
        std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    });
}

/// Eigendecomposition of a Hermitian matrix given as a column-major buffer.
///
/// Returns ascending eigenvalues and the eigenvectors as columns of a
/// column-major `n x n` buffer. `info != 0` from LAPACK is surfaced as `Err`.
pub fn zheevd_colmajor(
    n: usize,
    a: &mut [Complex64],
    want_vectors: bool,
) -> Result<Vec<f64>, i32> {
    assert_eq!(a.len(), n * n);
    pin_blas_threads();
    let jobz = if want_vectors { b'V' } else { b'N' } as c_char;
    let uplo = b'L' as c_char;
    let nn = n as i32;
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;

    // Workspace query.
    let query = -1i32;
    let mut work_q = [Complex64::new(0.0, 0.0)];
    let mut rwork_q = [0.0f64];
    let mut iwork_q = [0i32];
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr() as *mut _,
            &nn,
            w.as_mut_ptr(),
            work_q.as_mut_ptr() as *mut _,
            &query,
            rwork_q.as_mut_ptr(),
            &query,
            iwork_q.as_mut_ptr(),
            &query,
            &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    let lwork = work_q[0].re as i32;
    let lrwork = rwork_q[0] as i32;
    let liwork = iwork_q[0];
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr() as *mut _,
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr() as *mut _,
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    Ok(w)
}

/// C = A * B for square column-major complex matrices.
pub fn zgemm_nn(n: usize, a: &[Complex64], b: &[Complex64], c: &mut [Complex64]) {
    zgemm(n, a, b, c, cblas_sys::CBLAS_TRANSPOSE::CblasNoTrans)
}

/// C = A^H * B for square column-major complex matrices.
pub fn zgemm_hn(n: usize, a: &[Complex64], b: &[Complex64], c: &mut [Complex64]) {
    zgemm(n, a, b, c, cblas_sys::CBLAS_TRANSPOSE::CblasConjTrans)
}

fn zgemm(
    n: usize,
    a: &[Complex64],
    b: &[Complex64],
    c: &mut [Complex64],
    trans_a: cblas_sys::CBLAS_TRANSPOSE,
) {
    assert!(a.len() == n * n && b.len() == n * n && c.len() == n * n);
    pin_blas_threads();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let nn = n as i32;
    unsafe {
        cblas_sys::cblas_zgemm(
            cblas_sys::CBLAS_LAYOUT::CblasColMajor,
            trans_a,
            cblas_sys::CBLAS_TRANSPOSE::CblasNoTrans,
            nn,
            nn,
            nn,
            &one as *const Complex64 as *const _,
            a.as_ptr() as *const _,
            nn,
            b.as_ptr() as *const _,
            nn,
            &zero as *const Complex64 as *const _,
            c.as_mut_ptr() as *mut _,
            nn,
        );
    }
}
