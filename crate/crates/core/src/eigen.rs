//! Dense real-symmetric and Hermitian eigenvalue solvers.
//!
//! The band-edge computation needs eigenvalues that are reproducible bit
//! for bit across runs, so the solver is written out here with a fixed
//! evaluation order instead of delegating to a BLAS backend: Householder
//! reduction to tridiagonal form followed by the implicit-shift QL
//! iteration, eigenvalues only. Hermitian matrices are handled through the
//! standard embedding into a real symmetric matrix of twice the size.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest tolerated deviation from exact (conjugate) symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues of a real symmetric matrix, sorted ascending.
///
/// Accurate to a few ulps of the spectral norm (far inside the 1e-10
/// budget the band computation assumes) and deterministic: the same input
/// yields bitwise-identical output. Inputs whose asymmetry exceeds
/// [`SYMMETRY_TOL`] are rejected as malformed.
pub fn symmetric_eigenvalues(m: &Array2<f64>) -> Result<Vec<f64>> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((m[[i, j]] - m[[j, i]]).abs());
        }
    }
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            asym,
            tol: SYMMETRY_TOL,
        });
    }

    let mut a: Vec<f64> = m.iter().copied().collect();
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    householder_tridiag(&mut a, n, &mut d, &mut e);

    // re-index the subdiagonal so off[i] couples d[i] and d[i+1]
    let mut off = vec![0.0f64; n];
    off[..n - 1].copy_from_slice(&e[1..n]);
    ql_implicit_shift(&mut d, &mut off)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues of a complex Hermitian matrix, sorted ascending.
///
/// H = A + iB is embedded as the real symmetric [[A, -B], [B, A]], whose
/// spectrum is that of H with every eigenvalue doubled; each pair is
/// averaged back down.
pub fn hermitian_eigenvalues(h: &Array2<Complex64>) -> Result<Vec<f64>> {
    let (rows, cols) = h.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let diff = h[[i, j]] - h[[j, i]].conj();
            asym = asym.max(diff.norm());
        }
    }
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            asym,
            tol: SYMMETRY_TOL,
        });
    }

    let mut m = Array2::<f64>::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let re = h[[i, j]].re;
            let im = h[[i, j]].im;
            m[[i, j]] = re;
            m[[i + n, j + n]] = re;
            m[[i, j + n]] = -im;
            m[[i + n, j]] = im;
        }
    }
    let doubled = symmetric_eigenvalues(&m)?;
    Ok((0..n).map(|i| 0.5 * (doubled[2 * i] + doubled[2 * i + 1])).collect())
}

/// Householder reduction of a (row-major, n x n) symmetric matrix to
/// tridiagonal form, eigenvalues-only variant. On return d holds the
/// diagonal and e the subdiagonal with e[0] = 0 and e[i] coupling
/// d[i-1], d[i]. Only the lower triangle of `a` is read; `a` is destroyed.
fn householder_tridiag(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0f64;
        if l > 0 {
            let mut scale = 0.0f64;
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f_acc = 0.0f64;
                for j in 0..=l {
                    let mut g = 0.0f64;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
/// d is the diagonal; off[i] couples d[i] and d[i+1] (off has length n,
/// the last slot is scratch). Eigenvalues land in d, unsorted.
fn ql_implicit_shift(d: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + off[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;
            let mut i = m - 1;
            loop {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    // rare cancellation: restart the sweep from scratch
                    d[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    break;
                }
                i -= 1;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}
