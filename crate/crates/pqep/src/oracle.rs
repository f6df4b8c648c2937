//! Independent ground truth: a companion-linearization eigensolver, a dense
//! brute-force checker for the Theta patterns, and seeded random problem
//! generators.

use crate::error::{PqepError, Result};
use crate::flavor::Flavor;
use crate::gamma::nilpotent;
use crate::linalg::{self, inv_condition};
use crate::mat::{block2x2, eye, frob, kron, re, zeros, CMat, CVec, C64, ONE, ZERO};
use crate::poly::PalindromicPolynomial;
use crate::TOL_RANK;
use ndarray::s;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One eigenpair of the quadratic polynomial.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: C64,
    /// Unit-norm right eigenvector with its largest-modulus entry real positive.
    pub vector: CVec,
}

/// All 2n eigenpairs of `lambda^2 A + lambda Q + eps A^*` via the companion
/// matrix `[[0, I], [-eps A^{-1} A^*, -A^{-1} Q]]`.
pub fn qep_eigensolve(poly: &PalindromicPolynomial) -> Result<Vec<EigenPair>> {
    let n = poly.dim();
    let cond = inv_condition(poly.a());
    if cond <= TOL_RANK {
        return Err(PqepError::SingularA(cond));
    }
    let ai = linalg::inv(poly.a())?;
    let lower_left = ai.dot(&poly.a_star_eps()).mapv(|z| -z);
    let lower_right = ai.dot(poly.q()).mapv(|z| -z);
    let companion = block2x2(&zeros(n, n), &eye(n), &lower_left, &lower_right);
    let (vals, vecs) = linalg::eig(&companion)?;
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..2 * n {
        let mut v: CVec = vecs.slice(s![..n, j]).to_owned();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            // eigenvector concentrated in the second block; fall back to X J-part
            v = vecs.slice(s![n.., j]).to_owned();
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.mapv_inplace(|z| z / re(norm));
        let mut lam = vals[j];
        // guarded Rayleigh + inverse-iteration refinement on the quadratic:
        // a step is kept only when it reduces ||P(lambda) x||, and the
        // eigenvalue correction is clamped so clustered eigenvalues cannot
        // jump onto each other
        let res_of = |l: C64, w: &CVec| -> f64 {
            let pm = poly.eval(l);
            let mut s: f64 = 0.0;
            for i in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += pm[[i, k]] * w[k];
                }
                s += acc.norm_sqr();
            }
            s.sqrt()
        };
        let mut best_res = res_of(lam, &v);
        for _ in 0..2 {
            let mut cand_lam = lam;
            let pd = &poly.a().mapv(|z| z * (lam * re(2.0))) + poly.q();
            let col = v.view().insert_axis(ndarray::Axis(1)).to_owned();
            let rv = poly.eval(lam).dot(&col);
            let num: C64 = (0..n).map(|i| v[i].conj() * rv[[i, 0]]).sum();
            let dv = pd.dot(&col);
            let den: C64 = (0..n).map(|i| v[i].conj() * dv[[i, 0]]).sum();
            if den.norm() > 1e-300 {
                let step = num / den;
                if step.norm() <= 1e-2 * lam.norm().max(1.0) {
                    cand_lam = lam - step;
                }
            }
            let mut cand_v = v.clone();
            let f = linalg::lu(&poly.eval(cand_lam));
            if !f.is_singular() {
                if let Ok(y) = f.solve(&col) {
                    let ynorm = (0..n).map(|i| y[[i, 0]].norm_sqr()).sum::<f64>().sqrt();
                    if ynorm.is_finite() && ynorm > 0.0 {
                        for i in 0..n {
                            cand_v[i] = y[[i, 0]] / re(ynorm);
                        }
                    }
                }
            }
            let cand_res = res_of(cand_lam, &cand_v);
            if cand_res < best_res {
                best_res = cand_res;
                lam = cand_lam;
                v = cand_v;
            } else {
                break;
            }
        }
        // phase/sign convention: largest-modulus entry real positive
        let mut best = 0.0;
        let mut arg = ONE;
        for z in v.iter() {
            if z.norm() > best {
                best = z.norm();
                arg = *z / re(z.norm());
            }
        }
        v.mapv_inplace(|z| z * arg.conj());
        out.push(EigenPair {
            value: lam,
            vector: v,
        });
    }
    Ok(out)
}

/// Residual `||P(lambda) x||` of one eigenpair.
pub fn pair_residual(poly: &PalindromicPolynomial, pair: &EigenPair) -> f64 {
    let p = poly.eval(pair.value);
    let r = p.dot(&pair.vector.view().insert_axis(ndarray::Axis(1)));
    frob(&r)
}

/// Support mask of the nullspace of the vectorized operator of
/// `a Z N^T + b N Z + N Z N^T = 0`, thresholded at 1e-10.
///
/// Dense and exhaustive; restricted to small total sizes.
pub fn brute_force_theta_nullspace(block_sizes: &[usize], a: C64, b: C64) -> ndarray::Array2<bool> {
    let n: usize = block_sizes.iter().sum();
    assert!(
        n <= 8,
        "dense nullspace is only affordable for total size <= 8"
    );
    assert!(
        a != crate::mat::ZERO && b != crate::mat::ZERO,
        "a, b must be nonzero"
    );
    let nmat = nilpotent(block_sizes);
    let id = eye(n);
    // column-major vec: vec(A Z B) = (B^T kron A) vec(Z)
    let op = &(&kron(&nmat, &id).mapv(|z| z * a) + &kron(&id, &nmat).mapv(|z| z * b))
        + &kron(&nmat, &nmat);
    let basis = linalg::nullspace(&op, 1e-10);
    let mut mask = ndarray::Array2::from_elem((n, n), false);
    for idx in 0..n * n {
        // column-major: idx = i + n*j
        let (i, j) = (idx % n, idx / n);
        let row_norm: f64 = (0..basis.ncols())
            .map(|c| basis[[idx, c]].norm_sqr())
            .sum::<f64>()
            .sqrt();
        mask[[i, j]] = row_norm > 1e-10;
    }
    mask
}

/// A random palindromic polynomial with i.i.d. uniform entries, regenerated
/// until A is well conditioned. Deterministic per seed.
pub fn random_palindromic(n: usize, flavor: Flavor, seed: u64) -> PalindromicPolynomial {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let a = random_matrix(n, n, flavor, &mut rng);
        let raw = random_matrix(n, n, flavor, &mut rng);
        if inv_condition(&a) < 1e-6 {
            continue;
        }
        let poly = match PalindromicPolynomial::new(flavor, a, symmetrize(&raw, flavor)) {
            Ok(p) => p,
            Err(_) => continue,
        };
        return poly;
    }
}

/// Uniform [0, 1) entries; complex for the Hermitian flavors.
pub(crate) fn random_matrix<R: Rng>(rows: usize, cols: usize, flavor: Flavor, rng: &mut R) -> CMat {
    let mut m = zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let x: f64 = rng.gen();
            m[[i, j]] = if flavor.is_real() {
                re(x)
            } else {
                let y: f64 = rng.gen();
                C64::new(x, y)
            };
        }
    }
    m
}

/// (M + eps M^*) / 2.
pub(crate) fn symmetrize(m: &CMat, flavor: Flavor) -> CMat {
    let ms = crate::mat::star_of(m, flavor.star);
    (m + &ms.mapv(|z| z * re(flavor.eps()))).mapv(|z| z * 0.5)
}
