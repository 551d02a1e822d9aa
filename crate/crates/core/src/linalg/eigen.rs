//! Hermitian eigensolvers.
//!
//! Two independent routes are provided:
//!
//! * [`jacobi`]: cyclic complex Jacobi rotations. Each rotation first removes
//!   the phase of the pivot `a_pq` with a diagonal unitary, then applies the
//!   classical real plane rotation that annihilates it. Converges
//!   unconditionally on Hermitian input and yields eigenvectors.
//! * [`tridiagonal_eigenvalues`]: Householder reduction to a real symmetric
//!   tridiagonal matrix followed by implicit QL with Wilkinson shifts.
//!   Values only, `O(k^3)` with a small constant; used for large `k`.

use num_complex::Complex64;

use super::CMatrix;

/// Off-diagonal Frobenius norm at which Jacobi sweeps stop, relative to the
/// Frobenius norm of the input.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in nondecreasing order together with the matrix whose
/// columns are the matching orthonormal eigenvectors (when requested).
pub fn jacobi(input: &CMatrix, want_vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
    let n = input.dim();
    let mut a = input.clone();
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let scale = input.frobenius_norm();
    let target = JACOBI_TOLERANCE * scale.max(f64::MIN_POSITIVE);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a.get(i, i).re, i)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let values = pairs.iter().map(|&(l, _)| l).collect();
    let vectors = v.map(|v| CMatrix::from_fn(n, |i, j| v.get(i, pairs[j].1)));
    (values, vectors)
}

fn rotate(a: &mut CMatrix, v: Option<&mut CMatrix>, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.dim();
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    // Skip pivots that are negligible against both diagonal entries.
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a.set(p, q, Complex64::new(0.0, 0.0));
        a.set(q, p, Complex64::new(0.0, 0.0));
        return;
    }
    // e^{-i phi} where a_pq = r e^{i phi}
    let phase = apq.conj() / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Columns: A <- A G with G e_p = c e_p - s phase e_q, G e_q = s e_p + c phase e_q.
    let update_cols = |m: &mut CMatrix| {
        let dim = m.dim();
        for i in 0..dim {
            let mip = m.get(i, p);
            let miq = m.get(i, q);
            m.set(i, p, mip * c - miq * (phase * s));
            m.set(i, q, mip * s + miq * (phase * c));
        }
    };
    update_cols(a);
    // Rows: A <- G* A.
    let pc = phase.conj();
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * c - aqj * (pc * s));
        a.set(q, j, apj * s + aqj * (pc * c));
    }
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    a.set(p, p, Complex64::new(app - t * r, 0.0));
    a.set(q, q, Complex64::new(aqq + t * r, 0.0));
    if let Some(v) = v {
        update_cols(v);
    }
}

/// Eigenvalues (nondecreasing) via Householder tridiagonalization + implicit QL.
pub fn tridiagonal_eigenvalues(input: &CMatrix) -> Vec<f64> {
    let (mut d, mut e) = householder_tridiagonal(input);
    implicit_ql(&mut d, &mut e);
    d.sort_by(|x, y| x.total_cmp(y));
    d
}

/// Reduce a Hermitian matrix to real symmetric tridiagonal form.
///
/// Returns the diagonal and the moduli of the subdiagonal (`e[i]` couples rows
/// `i` and `i+1`); a diagonal unitary similarity makes the subdiagonal real
/// and nonnegative without changing the spectrum.
fn householder_tridiagonal(input: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = input.dim();
    let mut a = input.clone();
    let zero = Complex64::new(0.0, 0.0);
    let mut e = vec![0.0; n.saturating_sub(1)];
    for j in 0..n.saturating_sub(2) {
        let m = n - j - 1;
        let x: Vec<Complex64> = (0..m).map(|i| a.get(j + 1 + i, j)).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            e[j] = 0.0;
            continue;
        }
        let x0 = x[0];
        let unit = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -unit * xnorm;
        let mut vh = x.clone();
        vh[0] -= alpha;
        let vnorm2: f64 = vh.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            e[j] = alpha.norm();
            continue;
        }
        let tau = 2.0 / vnorm2;
        // p = tau * A_sub v
        let mut p = vec![zero; m];
        for (i, pi) in p.iter_mut().enumerate() {
            let mut s = zero;
            for (l, vl) in vh.iter().enumerate() {
                s += a.get(j + 1 + i, j + 1 + l) * vl;
            }
            *pi = s * tau;
        }
        let vp: Complex64 = vh.iter().zip(&p).map(|(v, p)| v.conj() * p).sum();
        let kk = vp * (tau / 2.0);
        let qv: Vec<Complex64> = p.iter().zip(&vh).map(|(p, v)| p - kk * v).collect();
        for i in 0..m {
            for l in 0..m {
                let upd = vh[i] * qv[l].conj() + qv[i] * vh[l].conj();
                let cur = a.get(j + 1 + i, j + 1 + l);
                a.set(j + 1 + i, j + 1 + l, cur - upd);
            }
        }
        e[j] = alpha.norm();
        for i in 0..m {
            a.set(j + 1 + i, j, zero);
            a.set(j, j + 1 + i, zero);
        }
    }
    if n >= 2 {
        e[n - 2] = a.get(n - 1, n - 2).norm();
    }
    let d = (0..n).map(|i| a.get(i, i).re).collect();
    (d, e)
}

/// Implicit QL iteration on a symmetric tridiagonal matrix (values only).
fn implicit_ql(d: &mut [f64], e_in: &mut [f64]) {
    let n = d.len();
    if n < 2 {
        return;
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(e_in);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
