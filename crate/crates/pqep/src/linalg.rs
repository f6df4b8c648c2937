//! Dense complex linear algebra kernels.
//!
//! Three building blocks, all deterministic:
//! - LU with partial pivoting (solve, inverse, condition estimate),
//! - a general complex eigensolver: Householder reduction to Hessenberg form,
//!   explicit shifted QR with accumulated Schur vectors, and eigenvector
//!   extraction by back-substitution on the triangular Schur factor,
//! - one-sided Jacobi SVD.
//!
//! Matrices here are small (desk scale), so plain O(n^3) routines with
//! Wilkinson shifts are accurate and fast enough.

use crate::error::{PqepError, Result};
use crate::mat::{eye, re, zeros, CMat, CVec, C64, ONE, ZERO};
use ndarray::s;

const EPS: f64 = f64::EPSILON;

/// LU factorization with partial pivoting: P A = L U.
pub struct Lu {
    lu: CMat,
    piv: Vec<usize>,
    /// Number of row swaps (for the determinant sign).
    swaps: usize,
    singular: bool,
}

/// Factor a square matrix.
pub fn lu(a: &CMat) -> Lu {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "lu expects a square matrix");
    let mut m = a.clone();
    let mut piv = Vec::with_capacity(n);
    let mut swaps = 0;
    let mut singular = false;
    for k in 0..n {
        let mut p = k;
        let mut best = m[[k, k]].norm();
        for i in k + 1..n {
            let v = m[[i, k]].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            singular = true;
            piv.push(k);
            continue;
        }
        if p != k {
            for j in 0..n {
                let tmp = m[[k, j]];
                m[[k, j]] = m[[p, j]];
                m[[p, j]] = tmp;
            }
            swaps += 1;
        }
        piv.push(p);
        let pivot = m[[k, k]];
        for i in k + 1..n {
            let f = m[[i, k]] / pivot;
            m[[i, k]] = f;
            if f != ZERO {
                for j in k + 1..n {
                    let sub = f * m[[k, j]];
                    m[[i, j]] -= sub;
                }
            }
        }
    }
    Lu {
        lu: m,
        piv,
        swaps,
        singular,
    }
}

impl Lu {
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> C64 {
        let mut d = if self.swaps.is_multiple_of(2) {
            ONE
        } else {
            -ONE
        };
        for k in 0..self.lu.nrows() {
            d *= self.lu[[k, k]];
        }
        d
    }

    /// Solve A X = B for X.
    pub fn solve(&self, b: &CMat) -> Result<CMat> {
        if self.singular {
            return Err(PqepError::SingularAssembly("LU pivot vanished".into()));
        }
        let n = self.lu.nrows();
        let mut x = b.clone();
        // apply permutation
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                for j in 0..x.ncols() {
                    let tmp = x[[k, j]];
                    x[[k, j]] = x[[p, j]];
                    x[[p, j]] = tmp;
                }
            }
        }
        // forward substitution (unit lower)
        for k in 0..n {
            for i in k + 1..n {
                let f = self.lu[[i, k]];
                if f != ZERO {
                    for j in 0..x.ncols() {
                        let sub = f * x[[k, j]];
                        x[[i, j]] -= sub;
                    }
                }
            }
        }
        // back substitution
        for k in (0..n).rev() {
            let d = self.lu[[k, k]];
            for j in 0..x.ncols() {
                x[[k, j]] /= d;
            }
            for i in 0..k {
                let f = self.lu[[i, k]];
                if f != ZERO {
                    for j in 0..x.ncols() {
                        let sub = f * x[[k, j]];
                        x[[i, j]] -= sub;
                    }
                }
            }
        }
        Ok(x)
    }
}

/// Solve A X = B.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    lu(a).solve(b)
}

/// Matrix inverse via LU.
pub fn inv(a: &CMat) -> Result<CMat> {
    lu(a).solve(&eye(a.nrows()))
}

/// Ratio sigma_min / sigma_max from the Jacobi SVD (1.0 for empty matrices).
pub fn inv_condition(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let (_, s, _) = svd(a);
    let smax = s[0];
    let smin = s[s.len() - 1];
    if smax == 0.0 {
        0.0
    } else {
        smin / smax
    }
}

// ---------------------------------------------------------------------------
// Complex eigensolver
// ---------------------------------------------------------------------------

/// Complex Givens rotation G = [[c, s], [-conj(s), c]] with G [a; b] = [r; 0].
fn givens(a: C64, b: C64) -> (f64, C64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO, a);
    }
    let r = na.hypot(nb);
    let alpha = if na == 0.0 { ONE } else { a / na };
    let c = na / r;
    let s = alpha * b.conj() / re(r);
    (c, s, alpha * r)
}

/// Reduce to upper Hessenberg form by Householder reflectors; returns (H, Q)
/// with A = Q H Q^H.
fn hessenberg(a: &CMat) -> (CMat, CMat) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = eye(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        // Householder vector for column k below the subdiagonal
        let x: CVec = h.slice(s![k + 1.., k]).to_owned();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let alpha = if x0 == ZERO {
            re(-xnorm)
        } else {
            -(x0 / x0.norm()) * xnorm
        };
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H := (I - beta v v^H) H  on rows k+1.., all columns
        for j in 0..n {
            let mut dot = ZERO;
            for i in 0..v.len() {
                dot += v[i].conj() * h[[k + 1 + i, j]];
            }
            dot *= re(beta);
            for i in 0..v.len() {
                let sub = v[i] * dot;
                h[[k + 1 + i, j]] -= sub;
            }
        }
        // H := H (I - beta v v^H)  on columns k+1.., all rows
        for i in 0..n {
            let mut dot = ZERO;
            for j in 0..v.len() {
                dot += h[[i, k + 1 + j]] * v[j];
            }
            dot *= re(beta);
            for j in 0..v.len() {
                let sub = dot * v[j].conj();
                h[[i, k + 1 + j]] -= sub;
            }
        }
        // Q := Q (I - beta v v^H)
        for i in 0..n {
            let mut dot = ZERO;
            for j in 0..v.len() {
                dot += q[[i, k + 1 + j]] * v[j];
            }
            dot *= re(beta);
            for j in 0..v.len() {
                let sub = dot * v[j].conj();
                q[[i, k + 1 + j]] -= sub;
            }
        }
        for i in k + 2..n {
            h[[i, k]] = ZERO;
        }
        h[[k + 1, k]] = alpha;
    }
    (h, q)
}

/// Schur decomposition A = Z T Z^H with T upper triangular.
pub fn schur(a: &CMat) -> Result<(CMat, CMat)> {
    let n = a.nrows();
    let (mut t, mut z) = hessenberg(a);
    if n <= 1 {
        return Ok((t, z));
    }
    let scale = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let mut hi = n; // active block is rows/cols [lo, hi)
    let mut iter_since_deflation = 0usize;
    let mut total_iters = 0usize;
    let max_total = 60 * n;
    while hi > 1 {
        // deflate negligible subdiagonals
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = t[[lo, lo - 1]].norm();
            let local = t[[lo - 1, lo - 1]].norm() + t[[lo, lo]].norm();
            if sub <= EPS * local.max(scale * EPS) {
                t[[lo, lo - 1]] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            // 1x1 block converged
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }
        total_iters += 1;
        iter_since_deflation += 1;
        if total_iters > max_total {
            return Err(PqepError::ConvergenceFailure(n));
        }
        // Wilkinson shift from the trailing 2x2 of the active block
        let mut sigma = {
            let a11 = t[[hi - 2, hi - 2]];
            let a12 = t[[hi - 2, hi - 1]];
            let a21 = t[[hi - 1, hi - 2]];
            let a22 = t[[hi - 1, hi - 1]];
            let tr = a11 + a22;
            let det = a11 * a22 - a12 * a21;
            let disc = (tr * tr - re(4.0) * det).sqrt();
            let l1 = (tr + disc) * re(0.5);
            let l2 = (tr - disc) * re(0.5);
            if (l1 - a22).norm() <= (l2 - a22).norm() {
                l1
            } else {
                l2
            }
        };
        if iter_since_deflation.is_multiple_of(12) {
            // exceptional shift to break symmetric stalls
            sigma = t[[hi - 1, hi - 1]] + re(1.5 * t[[hi - 1, hi - 2]].norm());
        }
        // explicit shifted QR sweep on [lo, hi): H - sigma I = Q R, H' = R Q + sigma I
        for i in lo..hi {
            t[[i, i]] -= sigma;
        }
        let mut rots = Vec::with_capacity(hi - lo - 1);
        for i in lo..hi - 1 {
            let (c, sgn, r) = givens(t[[i, i]], t[[i + 1, i]]);
            t[[i, i]] = r;
            t[[i + 1, i]] = ZERO;
            for j in i + 1..n {
                let a = t[[i, j]];
                let b = t[[i + 1, j]];
                t[[i, j]] = re(c) * a + sgn * b;
                t[[i + 1, j]] = -sgn.conj() * a + re(c) * b;
            }
            rots.push((c, sgn));
        }
        for (k, &(c, sgn)) in rots.iter().enumerate() {
            let i = lo + k;
            // right-multiply by G^H on columns (i, i+1)
            let top = (i + 2).min(hi);
            for rr in 0..top {
                let a = t[[rr, i]];
                let b = t[[rr, i + 1]];
                t[[rr, i]] = re(c) * a + sgn.conj() * b;
                t[[rr, i + 1]] = -sgn * a + re(c) * b;
            }
            for rr in 0..n {
                let a = z[[rr, i]];
                let b = z[[rr, i + 1]];
                z[[rr, i]] = re(c) * a + sgn.conj() * b;
                z[[rr, i + 1]] = -sgn * a + re(c) * b;
            }
        }
        for i in lo..hi {
            t[[i, i]] += sigma;
        }
    }
    // clean the strictly lower part
    for i in 0..n {
        for j in 0..i {
            t[[i, j]] = ZERO;
        }
    }
    Ok((t, z))
}

/// Eigenvalues and unit-norm right eigenvectors of a general complex matrix.
///
/// Eigenvectors come from back-substitution on the triangular Schur factor;
/// for (numerically) defective eigenvalues the returned vectors may repeat
/// directions, which callers on semi-simple inputs never see.
pub fn eig(a: &CMat) -> Result<(CVec, CMat)> {
    let n = a.nrows();
    let (t, z) = schur(a)?;
    let vals: CVec = (0..n).map(|i| t[[i, i]]).collect();
    let tnorm = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let tiny = EPS * tnorm;
    let mut vecs = zeros(n, n);
    for j in 0..n {
        let lambda = vals[j];
        let mut y = vec![ZERO; n];
        y[j] = ONE;
        for i in (0..j).rev() {
            let mut acc = ZERO;
            for k in i + 1..=j {
                acc += t[[i, k]] * y[k];
            }
            let mut denom = t[[i, i]] - lambda;
            if denom.norm() < tiny {
                denom = re(tiny);
            }
            y[i] = -acc / denom;
        }
        // v = Z y, normalized
        let mut v = vec![ZERO; n];
        for r in 0..n {
            let mut acc = ZERO;
            for k in 0..=j {
                acc += z[[r, k]] * y[k];
            }
            v[r] = acc;
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            vecs[[r, j]] = v[r] / re(norm);
        }
    }
    Ok((vals, vecs))
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD
// ---------------------------------------------------------------------------

/// Thin SVD A = U diag(s) V^H with singular values descending.
///
/// Column phases are fixed so that each U column's largest-modulus entry is
/// real positive.
pub fn svd(a: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (m, n) = a.dim();
    let mut w = a.clone();
    let mut v = eye(n);
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut off = 0usize;
        for p in 0..n {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = ZERO;
                for i in 0..m {
                    app += w[[i, p]].norm_sqr();
                    aqq += w[[i, q]].norm_sqr();
                    apq += w[[i, p]].conj() * w[[i, q]];
                }
                let thresh = EPS * (app * aqq).sqrt();
                if apq.norm() <= thresh.max(f64::MIN_POSITIVE) {
                    continue;
                }
                off += 1;
                // phase-rotate column q so the coupling becomes real
                let g = apq / apq.norm();
                let gc = g.conj();
                for i in 0..m {
                    w[[i, q]] *= gc;
                }
                for i in 0..n {
                    v[[i, q]] *= gc;
                }
                let gamma = apq.norm();
                let tau = (aqq - app) / (2.0 * gamma);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sj = c * t;
                for i in 0..m {
                    let wp = w[[i, p]];
                    let wq = w[[i, q]];
                    w[[i, p]] = re(c) * wp - re(sj) * wq;
                    w[[i, q]] = re(sj) * wp + re(c) * wq;
                }
                for i in 0..n {
                    let vp = v[[i, p]];
                    let vq = v[[i, q]];
                    v[[i, p]] = re(c) * vp - re(sj) * vq;
                    v[[i, q]] = re(sj) * vp + re(c) * vq;
                }
            }
        }
        if off == 0 {
            break;
        }
    }
    // column norms are the singular values
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[[i, j]].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let mut u = zeros(m, n);
    let mut vv = zeros(n, n);
    let mut svals = Vec::with_capacity(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        let sv = norms[old_j];
        svals.push(sv);
        // phase convention: largest-modulus entry of the U column real positive
        let mut phase = ONE;
        if sv > 0.0 {
            let mut best = 0.0;
            let mut arg = ONE;
            for i in 0..m {
                let z = w[[i, old_j]];
                if z.norm() > best {
                    best = z.norm();
                    arg = z / z.norm();
                }
            }
            phase = arg.conj();
        }
        for i in 0..m {
            u[[i, new_j]] = if sv > 0.0 {
                w[[i, old_j]] * phase / re(sv)
            } else {
                ZERO
            };
        }
        for i in 0..n {
            vv[[i, new_j]] = v[[i, old_j]] * phase;
        }
    }
    (u, svals, vv)
}

/// Eigendecomposition of a Hermitian matrix by two-sided Jacobi rotations:
/// returns (eigenvalues descending, unitary Q) with `m = Q diag(w) Q^H`.
pub fn hermitian_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut q = eye(n);
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[[p, r]];
                let scale = (a[[p, p]].re.abs() + a[[r, r]].re.abs()).max(f64::MIN_POSITIVE);
                if apr.norm() <= EPS * scale {
                    continue;
                }
                rotated = true;
                let phase = apr / apr.norm();
                let tau = (a[[r, r]].re - a[[p, p]].re) / (2.0 * apr.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let sp = re(s) * phase;
                // columns p, r of A and Q: right-multiply by the rotation
                for i in 0..n {
                    let ap = a[[i, p]];
                    let ar = a[[i, r]];
                    a[[i, p]] = re(c) * ap - sp.conj() * ar;
                    a[[i, r]] = sp * ap + re(c) * ar;
                    let qp = q[[i, p]];
                    let qr = q[[i, r]];
                    q[[i, p]] = re(c) * qp - sp.conj() * qr;
                    q[[i, r]] = sp * qp + re(c) * qr;
                }
                // rows p, r of A: left-multiply by the rotation's adjoint
                for j in 0..n {
                    let ap = a[[p, j]];
                    let ar = a[[r, j]];
                    a[[p, j]] = re(c) * ap - sp * ar;
                    a[[r, j]] = sp.conj() * ap + re(c) * ar;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].re.partial_cmp(&a[[i, i]].re).unwrap());
    let vals: Vec<f64> = order.iter().map(|&k| a[[k, k]].re).collect();
    let mut qq = zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            qq[[i, new_j]] = q[[i, old_j]];
        }
    }
    (vals, qq)
}

/// Orthonormal basis of the (numerical) nullspace of `a`, columns spanning
/// every right-singular direction with sigma <= tol * sigma_max.
pub fn nullspace(a: &CMat, tol: f64) -> CMat {
    let (_, svals, v) = svd(a);
    let smax = svals.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..svals.len())
        .filter(|&j| svals[j] <= tol * smax.max(1.0))
        .collect();
    let mut out = zeros(a.ncols(), keep.len());
    for (c, &j) in keep.iter().enumerate() {
        for i in 0..a.ncols() {
            out[[i, c]] = v[[i, j]];
        }
    }
    out
}
