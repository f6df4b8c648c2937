//! Both directions of the spectral decomposition: reconstruct (A, Q) from
//! (X, J, Gamma), verify a claimed decomposition, and normalize semi-simple
//! standard pairs so that Gamma takes its canonical unit-block form.

use crate::error::{PqepError, Result};
use crate::flavor::Flavor;
use crate::gamma::{compute_gamma_unchecked, gamma_membership, MembershipReport, ParameterMatrix};
use crate::layout::{analyze_layout, JGroup};
use crate::linalg::{self, inv_condition};
use crate::mat::{frob, re, realify, star_of, zeros, CMat, C64, ONE};
use crate::poly::{residual, PalindromicPolynomial, StandardPair};
use crate::{TOL_RANK, TOL_UNIMODULAR};
use ndarray::s;

/// Coefficients from a standard pair and an admissible Gamma:
/// `A = (X J Gamma X^*)^{-1}`, `Q = -A X J^2 Gamma X^* A`.
pub fn reconstruct(x: &CMat, j: &CMat, gamma: &ParameterMatrix) -> Result<PalindromicPolynomial> {
    let flavor = gamma.flavor;
    if x.ncols() != j.nrows() || j.nrows() != j.ncols() || gamma.dim() != j.nrows() {
        return Err(PqepError::DimensionMismatch(format!(
            "X {}x{}, J {}x{}, Gamma {}x{}",
            x.nrows(),
            x.ncols(),
            j.nrows(),
            j.ncols(),
            gamma.dim(),
            gamma.dim()
        )));
    }
    let xs = star_of(x, flavor.star);
    // X Gamma X^* must vanish
    let annihilation = frob(&x.dot(&gamma.gamma).dot(&xs));
    let budget = 1e-8 * frob(x).powi(2).max(1e-300) * frob(&gamma.gamma).max(1e-300);
    if annihilation > budget {
        return Err(PqepError::ConditionViolation(annihilation, budget));
    }
    let core = x.dot(j).dot(&gamma.gamma).dot(&xs);
    if inv_condition(&core) <= TOL_RANK {
        return Err(PqepError::SingularCore(format!(
            "X J Gamma X^* has sigma_min/sigma_max <= {TOL_RANK:.0e}"
        )));
    }
    let a = linalg::inv(&core)?;
    let mid = x.dot(j).dot(j).dot(&gamma.gamma).dot(&xs);
    let q = a.dot(&mid).dot(&a).mapv(|z| -z);
    // the identity Q^* = eps Q holds in exact arithmetic; fold the roundoff
    // into an exact symmetrization before the structural gate
    let qs = star_of(&q, flavor.star);
    let q = (&q + &qs.mapv(|z| z * re(flavor.eps()))).mapv(|z| z * 0.5);
    let (a, q) = if flavor.is_real() {
        (realify(&a), realify(&q))
    } else {
        (a, q)
    };
    PalindromicPolynomial::new(flavor, a, q)
}

/// Verification report for a claimed decomposition.
#[derive(Debug, Clone, Copy)]
pub struct VerifyReport {
    /// ||A X J^2 + Q X J + eps A^* X||_F
    pub pair_residual: f64,
    pub membership: MembershipReport,
    /// ||X Gamma X^*||_F
    pub annihilation: f64,
    /// Relative Frobenius error of the reconstructed A.
    pub roundtrip_a: f64,
    /// Relative Frobenius error of the reconstructed Q.
    pub roundtrip_q: f64,
    pub pass: bool,
}

/// Compute Gamma from (X, J), then reconstruct and compare against `poly`.
pub fn verify_decomposition(
    poly: &PalindromicPolynomial,
    x: &CMat,
    j: &CMat,
    tol: f64,
) -> Result<VerifyReport> {
    let pair = StandardPair::new(x.clone(), j.clone())?;
    let pair_residual = residual(poly, x, j)?;
    let gamma = compute_gamma_unchecked(poly, &pair)?;
    let membership = gamma_membership(&gamma.gamma, j, poly.flavor, tol)?;
    let xs = star_of(x, poly.flavor.star);
    let annihilation = frob(&x.dot(&gamma.gamma).dot(&xs));
    let (roundtrip_a, roundtrip_q) = match reconstruct(x, j, &gamma) {
        Ok(back) => (
            frob(&(back.a() - poly.a())) / frob(poly.a()).max(1e-300),
            frob(&(back.q() - poly.q())) / frob(poly.q()).max(1e-300),
        ),
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    let scale = (frob(poly.a()) + frob(poly.q())) * frob(x).max(1e-300) * frob(j).max(1.0).powi(2);
    let pass = pair_residual <= tol * scale
        && membership.pass
        && annihilation <= tol * frob(x).powi(2).max(1e-300) * frob(&gamma.gamma)
        && roundtrip_a <= tol.max(1e-8)
        && roundtrip_q <= tol.max(1e-8);
    Ok(VerifyReport {
        pair_residual,
        membership,
        annihilation,
        roundtrip_a,
        roundtrip_q,
        pass,
    })
}

// ---------------------------------------------------------------------------
// Semi-simple normalization
// ---------------------------------------------------------------------------

/// Normalize a semi-simple standard pair so that Gamma becomes the canonical
/// unit-block form: identity couplings for pairs, diag(1,-1)-coupled blocks
/// for T quadruples, sign patterns for modulus-one groups. Returns the new
/// mode matrix `X D P` and the canonical Gamma.
pub fn normalize_semisimple(
    x: &CMat,
    j: &CMat,
    gamma: &ParameterMatrix,
    flavor: Flavor,
) -> Result<(CMat, ParameterMatrix)> {
    let p = j.nrows();
    if x.ncols() != p || gamma.dim() != p {
        return Err(PqepError::DimensionMismatch(
            "X, J, Gamma sizes disagree".into(),
        ));
    }
    let g = &gamma.gamma;
    let groups = analyze_layout(j, flavor)?;
    // transform T acting by right-multiplication on X (and congruence on Gamma),
    // assembled column-block by column-block
    let mut t = zeros(p, p);
    let mut gt_blocks: Vec<(Vec<usize>, CMat)> = Vec::new(); // (columns, canonical block)
    let eps = flavor.eps();
    for grp in &groups {
        match grp {
            JGroup::Pair { firsts, seconds } => {
                let m = firsts.len();
                // coupling sub-block of Gamma
                let mut w = zeros(m, m);
                for (r, &fc) in firsts.iter().enumerate() {
                    for (c, &sc) in seconds.iter().enumerate() {
                        w[[r, c]] = g[[fc, sc]];
                    }
                }
                let (u, sv, v) = linalg::svd(&w);
                if sv.iter().any(|&s| s <= TOL_RANK * sv[0].max(1.0)) {
                    return Err(PqepError::SingularBlock(sv[sv.len() - 1]));
                }
                let shalf: Vec<f64> = sv.iter().map(|s| s.sqrt()).collect();
                // firsts get U sqrt(S); seconds get conj(V) sqrt(S) for T,
                // V sqrt(S) for H
                let vside = if flavor.is_real() {
                    v.mapv(|z| z.conj())
                } else {
                    v.clone()
                };
                for (r, &fr) in firsts.iter().enumerate() {
                    for c in 0..m {
                        t[[fr, firsts[c]]] = u[[r, c]] * re(shalf[c]);
                    }
                }
                for (r, &sr) in seconds.iter().enumerate() {
                    for c in 0..m {
                        t[[sr, seconds[c]]] = vside[[r, c]] * re(shalf[c]);
                    }
                }
                let mut blk = zeros(2 * m, 2 * m);
                for k in 0..m {
                    blk[[k, m + k]] = ONE;
                    blk[[m + k, k]] = re(-eps);
                }
                let cols: Vec<usize> = firsts.iter().chain(seconds.iter()).copied().collect();
                gt_blocks.push((cols, blk));
            }
            JGroup::Quad { firsts, seconds } => {
                let m = firsts.len();
                // complex-frame coupling V1 between the lambda and 1/lambda sides:
                // column pair (b1, b2) encodes x = (b1 + i b2)/sqrt(2)
                // V1[r, c] relates the complex coefficients; extract it from the
                // real 2x2 couplings: block(fr, sc) = refl/rot mix. Work it out by
                // conjugating with M2 = (1/sqrt 2) [[1, 1], [i, -i]] per rotation block.
                let m2 = {
                    let mut mm = zeros(2, 2);
                    let r2 = 1.0 / 2.0_f64.sqrt();
                    mm[[0, 0]] = re(r2);
                    mm[[0, 1]] = re(r2);
                    mm[[1, 0]] = C64::new(0.0, r2);
                    mm[[1, 1]] = C64::new(0.0, -r2);
                    mm
                };
                let m2inv = linalg::inv(&m2)?;
                // complex-frame Gamma sub-block: Phi = M^{-1} Gamma_R M^{-T}
                // restricted to (lambda-coeff rows, 1/lambda-coeff cols): the
                // lambda coefficient is the first coordinate of each M-block.
                let mut v1 = zeros(m, m);
                for (r, &fo) in firsts.iter().enumerate() {
                    for (c, &so) in seconds.iter().enumerate() {
                        let sub = g.slice(s![fo..fo + 2, so..so + 2]).to_owned();
                        let phi = m2inv.dot(&sub).dot(&m2inv.t().to_owned());
                        v1[[r, c]] = phi[[0, 0]];
                    }
                }
                let (u, sv, v) = linalg::svd(&v1);
                if sv.iter().any(|&s| s <= TOL_RANK * sv[0].max(1.0)) {
                    return Err(PqepError::SingularBlock(sv[sv.len() - 1]));
                }
                let shalf: Vec<f64> = sv.iter().map(|s| s.sqrt()).collect();
                // per-copy complex transforms: lambda side U sqrt(S) (and its
                // conjugate on the conjugate coefficient), 1/lambda side
                // conj(V) sqrt(S); realified through M2 per rotation block:
                // real 2x2 factor for complex scalar c is M2 diag(c, conj c) M2^{-1}
                let lift = |c: C64| -> CMat {
                    let mut d = zeros(2, 2);
                    d[[0, 0]] = c;
                    d[[1, 1]] = c.conj();
                    realify(&m2.dot(&d).dot(&m2inv))
                };
                for (r, &fr) in firsts.iter().enumerate() {
                    for c in 0..m {
                        let blk = lift(u[[r, c]] * re(shalf[c]));
                        let fo = firsts[c];
                        t.slice_mut(s![fr..fr + 2, fo..fo + 2]).assign(&blk);
                    }
                }
                for (r, &sr) in seconds.iter().enumerate() {
                    for c in 0..m {
                        let blk = lift(v[[r, c]].conj() * re(shalf[c]));
                        let so = seconds[c];
                        t.slice_mut(s![sr..sr + 2, so..so + 2]).assign(&blk);
                    }
                }
                // canonical block: per copy coupling diag(1, -1)
                let mut blk = zeros(4 * m, 4 * m);
                for k in 0..m {
                    blk[[2 * k, 2 * m + 2 * k]] = ONE;
                    blk[[2 * k + 1, 2 * m + 2 * k + 1]] = re(-1.0);
                    blk[[2 * m + 2 * k, 2 * k]] = re(-eps);
                    blk[[2 * m + 2 * k + 1, 2 * k + 1]] = re(eps);
                }
                let mut cols = Vec::new();
                for &f in firsts {
                    cols.push(f);
                    cols.push(f + 1);
                }
                for &s_ in seconds {
                    cols.push(s_);
                    cols.push(s_ + 1);
                }
                gt_blocks.push((cols, blk));
            }
            JGroup::UnimodRot { starts } => {
                if starts.len() != 1 {
                    return Err(PqepError::DefectiveInput(
                        "normalization of repeated unimodular T pairs is not supported".into(),
                    ));
                }
                let o = starts[0];
                // Gamma block: xi R2 (palindromic) or xi_hat I2 (anti)
                let val = if flavor.epsilon == 1 {
                    g[[o, o + 1]].re
                } else {
                    g[[o, o]].re
                };
                if val.abs() <= TOL_RANK {
                    return Err(PqepError::SingularBlock(val.abs()));
                }
                let r = val.abs().sqrt();
                t[[o, o]] = re(r);
                t[[o + 1, o + 1]] = re(r);
                let sgn = if val >= 0.0 { 1.0 } else { -1.0 };
                let blk = if flavor.epsilon == 1 {
                    crate::mat::from_real_rows(2, 2, &[0.0, sgn, -sgn, 0.0])
                } else {
                    crate::mat::from_real_rows(2, 2, &[sgn, 0.0, 0.0, sgn])
                };
                gt_blocks.push((vec![o, o + 1], blk));
            }
            JGroup::UnimodScalar { cols } => {
                let m = cols.len();
                let mut sblk = zeros(m, m);
                for (r, &rc) in cols.iter().enumerate() {
                    for (c, &cc) in cols.iter().enumerate() {
                        sblk[[r, c]] = g[[rc, cc]];
                    }
                }
                // S^H = -eps S; Hermitian carrier: -iS for palindromic, S for anti
                let herm = if flavor.epsilon == 1 {
                    sblk.mapv(|z| z * C64::new(0.0, -1.0))
                } else {
                    sblk.clone()
                };
                let (vals, qmat) = linalg::hermitian_eig(&herm);
                if vals.iter().any(|v| v.abs() <= TOL_RANK) {
                    return Err(PqepError::SingularBlock(
                        vals.iter().fold(f64::INFINITY, |a, v| a.min(v.abs())),
                    ));
                }
                for (r, &rc) in cols.iter().enumerate() {
                    for c in 0..m {
                        t[[rc, cols[c]]] = qmat[[r, c]] * re(vals[c].abs().sqrt());
                    }
                }
                let mut blk = zeros(m, m);
                for (k, v) in vals.iter().enumerate() {
                    let sgn = if *v >= 0.0 { 1.0 } else { -1.0 };
                    blk[[k, k]] = if flavor.epsilon == 1 {
                        C64::new(0.0, sgn)
                    } else {
                        re(sgn)
                    };
                }
                gt_blocks.push((cols.clone(), blk));
            }
        }
    }
    // X tilde = X T; realify for T flavors (conjugate symmetry guarantees it)
    let mut xt = x.dot(&t);
    if flavor.is_real() {
        xt = realify(&xt);
    }
    // canonical Gamma assembled on the same column layout
    let mut gnew = zeros(p, p);
    for (cols, blk) in &gt_blocks {
        for (r, &rc) in cols.iter().enumerate() {
            for (c, &cc) in cols.iter().enumerate() {
                gnew[[rc, cc]] = blk[[r, c]];
            }
        }
    }
    let gamma_tilde = ParameterMatrix::new_unchecked(gnew, flavor);
    // consistency: the transformed Gamma must match the canonical pattern
    let tinv = linalg::inv(&t)?;
    let transformed = tinv.dot(g).dot(&star_of(&tinv, flavor.star));
    let defect = frob(&(&transformed - &gamma_tilde.gamma)) / frob(&gamma_tilde.gamma);
    if defect > 1e-6 {
        return Err(PqepError::DefectiveInput(format!(
            "Gamma does not reduce to the canonical pattern (defect {defect:.3e}); \
             the pair is defective or Gamma is not block diagonal"
        )));
    }
    Ok((xt, gamma_tilde))
}

/// True if any eigenvalue of J is within the unimodular tolerance of +1/-1.
pub fn has_unit_eigenvalue(j: &CMat) -> bool {
    (0..j.nrows()).any(|i| {
        let d = j[[i, i]];
        (d - ONE).norm() <= TOL_UNIMODULAR || (d + ONE).norm() <= TOL_UNIMODULAR
    })
}
