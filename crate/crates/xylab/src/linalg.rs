//! Symmetric eigensolvers used throughout the crate.
//!
//! Householder reduction to tridiagonal form followed by implicit-shift QL,
//! the classic EISPACK tred2/tql2 pair. The effective Hamiltonians here are
//! tridiagonal or block-tridiagonal with many exactly repeated entries, a
//! structure on which the generic solver of our linear-algebra dependency
//! loses up to seven digits in the eigen residual; this implementation
//! stays at the backward-stable level (residuals of order eps * ||A||) on
//! those matrices.
//!
//! Complex Hermitian matrices are handled through the real embedding
//! `[[Re, -Im], [Im, Re]]`, which carries each eigenvalue twice; only
//! eigenvalues are ever needed on that path (entropy spectra), so the
//! doubling is collapsed by averaging adjacent pairs.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, XyError};
use crate::C64;

const MAX_QL_SWEEPS: usize = 60;

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder reduction of a symmetric matrix (flat row-major, full
/// storage) to tridiagonal form; returns diagonal `d` and subdiagonal `e`
/// (`e[0]` unused; `e[k]` couples `k-1` and `k`). When `q` is given (flat
/// row-major identity on entry) it is overwritten with the accumulated
/// transform `Z = P_{n-1} ... P_1`, whose columns carry the
/// tridiagonalizing basis (`A = Z T Z^T`). Full storage keeps every inner
/// loop contiguous.
fn householder_tridiag(a: &mut [f64], n: usize, q: Option<&mut [f64]>) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];
    // h of each step's reflector; 0 marks "no reflector applied"
    let mut hs = vec![0.0; n];

    for k in (1..n).rev() {
        // eliminate row k left of the subdiagonal: x = a[k][0..l], l = k
        let l = k;
        if l == 1 {
            e[k] = a[k * n];
            continue;
        }
        let scale: f64 = a[k * n..k * n + l].iter().map(|x| x.abs()).sum();
        if scale == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let inv = 1.0 / scale;
        for c in 0..l {
            u[c] = a[k * n + c] * inv;
        }
        let sig = dot(&u[..l], &u[..l]);
        let f = u[l - 1];
        let beta = if f >= 0.0 { -sig.sqrt() } else { sig.sqrt() };
        e[k] = scale * beta;
        let h = sig - f * beta;
        u[l - 1] = f - beta;
        hs[k] = h;

        // p = A u / h on the leading block, then q = p - (u.p / 2h) u
        for r in 0..l {
            p[r] = dot(&a[r * n..r * n + l], &u[..l]) / h;
        }
        let kk = dot(&u[..l], &p[..l]) / (2.0 * h);
        for r in 0..l {
            p[r] -= kk * u[r];
        }
        // rank-2 update A -= u q^T + q u^T
        for r in 0..l {
            let (ur, qr) = (u[r], p[r]);
            let row = &mut a[r * n..r * n + l];
            for c in 0..l {
                row[c] -= ur * p[c] + qr * u[c];
            }
        }
        // row k of A is dead left of the subdiagonal; stash u there for
        // the accumulation pass
        a[k * n..k * n + l].copy_from_slice(&u[..l]);
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }

    if let Some(qm) = q {
        // Z = P_{n-1} ... P_1 built by ascending left-application; before
        // step k only rows 0..k have support, and only on columns 0..k
        let mut wrow = vec![0.0; n];
        for k in 2..n {
            let h = hs[k];
            if h == 0.0 {
                continue;
            }
            let uk = &a[k * n..k * n + k];
            for w in wrow[..k].iter_mut() {
                *w = 0.0;
            }
            for r in 0..k {
                let ur = uk[r];
                if ur != 0.0 {
                    let row = &qm[r * n..r * n + k];
                    for c in 0..k {
                        wrow[c] += ur * row[c];
                    }
                }
            }
            let invh = 1.0 / h;
            for w in wrow[..k].iter_mut() {
                *w *= invh;
            }
            for r in 0..k {
                let ur = uk[r];
                if ur != 0.0 {
                    let row = &mut qm[r * n..r * n + k];
                    for c in 0..k {
                        row[c] -= ur * wrow[c];
                    }
                }
            }
        }
    }
    (d, e)
}

/// Implicit-shift QL on a tridiagonal matrix, rotating the columns of `z`
/// along (when provided).
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut DMatrix<f64>>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    // The deflation threshold is scaled to the global tridiagonal norm. A
    // purely local |d[m]| + |d[m+1]| test never deflates inside clusters of
    // near-zero eigenvalues (correlation matrices have such clusters at 0
    // and 1): the off-diagonal rounding floor there is eps * ||A||, far
    // above eps * |d|, and the sweep livelocks.
    let anorm = d
        .iter()
        .zip(e.iter())
        .map(|(x, y)| x.abs() + y.abs())
        .fold(0.0f64, f64::max);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd.max(anorm) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(XyError::numeric(format!(
                    "QL iteration failed to converge after {MAX_QL_SWEEPS} sweeps (dim {n})"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.abs().copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn check_square(mat_rows: usize, mat_cols: usize) -> Result<()> {
    if mat_rows != mat_cols {
        return Err(XyError::structural("eigensolver needs a square matrix"));
    }
    Ok(())
}

fn to_flat(mat: &DMatrix<f64>) -> Vec<f64> {
    let n = mat.nrows();
    let mut a = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            a[r * n + c] = mat[(r, c)];
        }
    }
    a
}

/// Full eigendecomposition of a real symmetric matrix: ascending
/// eigenvalues and the orthonormal eigenvector columns.
pub fn symmetric_eigen(mat: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_square(mat.nrows(), mat.ncols())?;
    let n = mat.nrows();
    let mut a = to_flat(mat);
    let mut qflat = vec![0.0; n * n];
    for i in 0..n {
        qflat[i * n + i] = 1.0;
    }
    let (mut d, mut e) = householder_tridiag(&mut a, n, Some(&mut qflat));
    // columns of z are the tridiagonalizing basis vectors
    let mut z = DMatrix::from_fn(n, n, |r, c| qflat[r * n + c]);
    ql_implicit(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let eigenvalues = DVector::from_fn(n, |i, _| d[order[i]]);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.column_mut(dst).copy_from(&z.column(src));
    }
    Ok((eigenvalues, eigenvectors))
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(mat: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_square(mat.nrows(), mat.ncols())?;
    let n = mat.nrows();
    let mut a = to_flat(mat);
    let (mut d, mut e) = householder_tridiag(&mut a, n, None);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues of a complex Hermitian matrix, ascending, via the doubled
/// real embedding.
pub fn hermitian_eigenvalues(mat: &DMatrix<C64>) -> Result<Vec<f64>> {
    check_square(mat.nrows(), mat.ncols())?;
    let m = mat.nrows();
    let re = DMatrix::from_fn(m, m, |i, j| mat[(i, j)].re);
    let im = DMatrix::from_fn(m, m, |i, j| mat[(i, j)].im);
    hermitian_eigenvalues_from_parts(&re, &im)
}

/// Same as [`hermitian_eigenvalues`] for a matrix given as `re + i im`.
pub fn hermitian_eigenvalues_from_parts(
    re: &DMatrix<f64>,
    im: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    check_square(re.nrows(), re.ncols())?;
    let m = re.nrows();
    let mut emb = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            emb[(i, j)] = re[(i, j)];
            emb[(m + i, m + j)] = re[(i, j)];
            emb[(i, m + j)] = -im[(i, j)];
            emb[(m + i, j)] = im[(i, j)];
        }
    }
    let doubled = symmetric_eigenvalues(&emb)?;
    Ok((0..m)
        .map(|k| 0.5 * (doubled[2 * k] + doubled[2 * k + 1]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(mat: &DMatrix<f64>, vals: &DVector<f64>, vecs: &DMatrix<f64>) -> f64 {
        let hv = mat * vecs;
        let n = mat.nrows();
        let mut r: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                r = r.max((hv[(i, k)] - vecs[(i, k)] * vals[k]).abs());
            }
        }
        r
    }

    fn orth_defect(vecs: &DMatrix<f64>) -> f64 {
        let n = vecs.nrows();
        let vtv = vecs.transpose() * vecs;
        let mut o: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let w = if i == j { 1.0 } else { 0.0 };
                o = o.max((vtv[(i, j)] - w).abs());
            }
        }
        o
    }

    #[test]
    fn small_closed_forms() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        assert!(residual(&a, &vals, &vecs) < 1e-14);

        let one = DMatrix::from_element(1, 1, -3.5);
        let (vals, vecs) = symmetric_eigen(&one).unwrap();
        assert_eq!(vals[0], -3.5);
        assert_eq!(vecs[(0, 0)], 1.0);

        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let vals = symmetric_eigenvalues(&diag).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn random_matrices_are_backward_stable() {
        let mut state = 0x2545f4914f6cdd1du64;
        let mut rnd = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [3usize, 17, 64, 120] {
            let mut a = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = rnd() * 6.0;
                    a[(i, j)] = v;
                    a[(j, i)] = v;
                }
            }
            let (vals, vecs) = symmetric_eigen(&a).unwrap();
            let scale = a.amax();
            assert!(
                residual(&a, &vals, &vecs) < 1e-13 * scale.max(1.0) * (n as f64).sqrt(),
                "residual too large at n = {n}"
            );
            assert!(orth_defect(&vecs) < 1e-13 * (n as f64).sqrt());
            assert!(vals.as_slice().windows(2).all(|w| w[0] <= w[1]));
            let only = symmetric_eigenvalues(&a).unwrap();
            for (x, y) in only.iter().zip(vals.iter()) {
                assert!((x - y).abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn structured_chain_matrices_stay_accurate() {
        // the matrix class that defeats the generic QL: block tridiagonal
        // with exact zeros and repeated entries
        use crate::model::{
            build_anisotropic, sample_parameters, ChainParameters, DisorderSpec, Distribution,
        };
        use crate::oracle::build_hamiltonian;

        let spec = DisorderSpec {
            mu: Distribution::Uniform { low: 0.5, high: 1.5 },
            gamma: Distribution::Uniform { low: -0.5, high: 0.5 },
            nu: Distribution::Uniform { low: 0.0, high: 4.0 },
            seed: 0,
        };
        let mut worst: f64 = 0.0;
        for seed in 0..30u64 {
            let s = DisorderSpec { seed, ..spec };
            let mut p = sample_parameters(&s, 8).unwrap();
            if seed % 2 == 0 {
                p.gamma.iter_mut().for_each(|g| *g = 0.0);
            }
            let h = build_hamiltonian(&p).unwrap().mat.map(|c| c.re);
            let (vals, vecs) = symmetric_eigen(&h).unwrap();
            worst = worst.max(residual(&h, &vals, &vecs) / h.amax());
            let m = build_anisotropic(&p);
            let (vals, vecs) = symmetric_eigen(m.matrix()).unwrap();
            worst = worst.max(residual(m.matrix(), &vals, &vecs) / m.matrix().amax());
        }
        assert!(worst < 1e-13, "worst relative residual {worst:.3e}");

        // clean chains: maximal structure
        let clean = ChainParameters::constant(80, 1.0, 0.0, 1.0);
        let m = build_anisotropic(&clean);
        let (vals, vecs) = symmetric_eigen(m.matrix()).unwrap();
        assert!(residual(m.matrix(), &vals, &vecs) < 1e-12);
        assert!(orth_defect(&vecs) < 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues_match_direct_construction() {
        // G = U diag(w) U* for a known unitary built from a real rotation
        // mixed with phases
        let w = [0.1, 0.4, 0.9];
        let mut g = DMatrix::<C64>::zeros(3, 3);
        let phases = [0.3f64, -1.2, 2.2];
        let mut u = DMatrix::<C64>::zeros(3, 3);
        let (s, c) = 0.7f64.sin_cos();
        u[(0, 0)] = C64::from_polar(c, phases[0]);
        u[(0, 1)] = C64::from_polar(-s, phases[1]);
        u[(1, 0)] = C64::from_polar(s, phases[0]);
        u[(1, 1)] = C64::from_polar(c, phases[1]);
        u[(2, 2)] = C64::from_polar(1.0, phases[2]);
        for k in 0..3 {
            let col = u.column(k);
            for i in 0..3 {
                for j in 0..3 {
                    g[(i, j)] += col[i] * col[j].conj() * C64::new(w[k], 0.0);
                }
            }
        }
        let vals = hermitian_eigenvalues(&g).unwrap();
        for (x, y) in vals.iter().zip(w.iter()) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
