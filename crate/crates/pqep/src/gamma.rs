//! The parameter matrix Gamma.
//!
//! For a standard pair (X, J) of P, the matrix
//! `Gamma = (Y_L^* [[Q, A], [A, 0]] X_L)^{-1}` is nonsingular, satisfies
//! `Gamma^* = -eps Gamma` and `J Gamma = Gamma J^{-*}`, and annihilates X:
//! `X Gamma X^* = 0`. This module computes Gamma, tests membership in the
//! structured set S_(J,star,eps), describes Gamma's sparsity pattern on
//! defective Jordan structures (the Theta masks), builds the canonical
//! simple-spectrum Gamma, and reduces admissible block-diagonal Gammas to
//! the canonical skew block R = [[0, I_q], [-eps I_q, 0]] by congruence.

use crate::error::{PqepError, Result};
use crate::flavor::Flavor;
use crate::linalg::{inv, inv_condition, lu};
use crate::mat::{
    block2x2, block_diag, eye, frob, from_real_rows, re, star_of, zeros, CMat, C64, ONE, ZERO,
};
use crate::poly::{residual, PalindromicPolynomial, StandardPair};
use crate::spectrum::{GroupCategory, SpectrumSpec};
use crate::{TOL_RANK, TOL_STRUCT};
use ndarray::s;

/// A validated parameter matrix together with its flavor.
#[derive(Debug, Clone)]
pub struct ParameterMatrix {
    pub gamma: CMat,
    pub flavor: Flavor,
}

impl ParameterMatrix {
    /// Validate skew-structure (`Gamma^* = -eps Gamma`) and nonsingularity.
    pub fn new(gamma: CMat, flavor: Flavor) -> Result<Self> {
        let gs = star_of(&gamma, flavor.star);
        let defect = frob(&(&gs + &gamma.mapv(|z| z * re(flavor.eps()))));
        if defect > TOL_STRUCT.max(1e-10) * frob(&gamma).max(1.0) {
            return Err(PqepError::StructureViolation(format!(
                "||Gamma^* + eps Gamma|| = {defect:.3e}"
            )));
        }
        if inv_condition(&gamma) <= TOL_RANK {
            return Err(PqepError::SingularAssembly(
                "Gamma is numerically singular".into(),
            ));
        }
        Ok(ParameterMatrix { gamma, flavor })
    }

    pub(crate) fn new_unchecked(gamma: CMat, flavor: Flavor) -> Self {
        ParameterMatrix { gamma, flavor }
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }
}

/// The 2n x 2n assembly `Y_L^* [[Q, A], [A, 0]] X_L` whose inverse is Gamma.
pub(crate) fn gamma_assembly(poly: &PalindromicPolynomial, pair: &StandardPair) -> Result<CMat> {
    let n = poly.dim();
    if pair.x.nrows() != n {
        return Err(PqepError::DimensionMismatch(format!(
            "pair has {} rows, polynomial is {n}x{n}",
            pair.x.nrows()
        )));
    }
    let middle = block2x2(poly.q(), poly.a(), poly.a(), &zeros(n, n));
    let xl = pair.stacked();
    let yl = pair.stacked_inverse_side()?;
    Ok(star_of(&yl, poly.flavor.star).dot(&middle).dot(&xl))
}

/// Gamma from a verified standard pair.
///
/// Rejects pairs whose residual is not small (`NotAStandardPair`) and
/// numerically singular assemblies.
pub fn compute_gamma(poly: &PalindromicPolynomial, pair: &StandardPair) -> Result<ParameterMatrix> {
    let res = residual(poly, &pair.x, &pair.j)?;
    let scale = (frob(poly.a()) + frob(poly.q()))
        * frob(&pair.x).max(1e-300)
        * frob(&pair.j).max(1.0).powi(2);
    let limit = 1e-6 * scale.max(1e-300);
    if res > limit {
        return Err(PqepError::NotAStandardPair {
            residual: res,
            limit,
        });
    }
    compute_gamma_unchecked(poly, pair)
}

/// Gamma from the raw assembly, without the standard-pair residual gate.
/// Used by verification reports that want defects rather than errors.
pub fn compute_gamma_unchecked(
    poly: &PalindromicPolynomial,
    pair: &StandardPair,
) -> Result<ParameterMatrix> {
    let asm = gamma_assembly(poly, pair)?;
    if inv_condition(&asm) <= TOL_RANK {
        return Err(PqepError::SingularAssembly(
            "Y_L^* [[Q, A],[A, 0]] X_L is numerically singular".into(),
        ));
    }
    let gamma = inv(&asm)?;
    // Gamma^* = -eps Gamma holds exactly in theory; project the roundoff out
    let gs = star_of(&gamma, poly.flavor.star);
    let gamma = (&gamma - &gs.mapv(|z| z * re(poly.flavor.eps()))).mapv(|z| z * 0.5);
    Ok(ParameterMatrix::new_unchecked(gamma, poly.flavor))
}

/// Defect norms for membership of `gamma` in S_(J,star,eps).
#[derive(Debug, Clone, Copy)]
pub struct MembershipReport {
    /// ||Gamma^* + eps Gamma||_F
    pub skew_defect: f64,
    /// ||J Gamma - Gamma J^{-*}||_F (computed as ||J Gamma J^* - Gamma|| / ||J^*||)
    pub intertwine_defect: f64,
    pub pass: bool,
}

/// Test `S^* = -eps S` and `J S = S J^{-*}` at a relative tolerance.
pub fn gamma_membership(
    gamma: &CMat,
    j: &CMat,
    flavor: Flavor,
    tol: f64,
) -> Result<MembershipReport> {
    if gamma.nrows() != gamma.ncols() || j.nrows() != j.ncols() || gamma.nrows() != j.nrows() {
        return Err(PqepError::DimensionMismatch(format!(
            "Gamma is {}x{}, J is {}x{}",
            gamma.nrows(),
            gamma.ncols(),
            j.nrows(),
            j.ncols()
        )));
    }
    let jlu = lu(j);
    if jlu.is_singular() {
        return Err(PqepError::SingularJ);
    }
    let gs = star_of(gamma, flavor.star);
    let skew_defect = frob(&(&gs + &gamma.mapv(|z| z * re(flavor.eps()))));
    let jinv_star = jlu
        .solve(&eye(j.nrows()))
        .map(|ji| star_of(&ji, flavor.star))
        .map_err(|_| PqepError::SingularJ)?;
    let lhs = &j.dot(gamma) - &gamma.dot(&jinv_star);
    let intertwine_defect = frob(&lhs);
    let gnorm = frob(gamma).max(1e-300);
    // both sides of the intertwining identity carry the J scale; relate the
    // absolute defect to it for the pass verdict
    let jscale = frob(j).max(frob(&jinv_star)).max(1.0);
    let pass = skew_defect <= tol * gnorm && intertwine_defect <= tol * gnorm * jscale;
    Ok(MembershipReport {
        skew_defect,
        intertwine_defect,
        pass,
    })
}

// ---------------------------------------------------------------------------
// Theta masks
// ---------------------------------------------------------------------------

/// Sparsity pattern of solutions Z of `a Z N^T + b N Z + N Z N^T = 0` for a
/// nilpotent N with the given Jordan block sizes.
#[derive(Debug, Clone)]
pub struct ThetaMask {
    pub block_sizes: Vec<usize>,
    /// true where an entry may be nonzero
    pub allowed: ndarray::Array2<bool>,
}

/// Build the mask. One rule covers diagonal and off-diagonal blocks:
/// entry (s, t) of block (i, k) is free iff `s + t <= min(n_i, n_k) + 1`
/// (1-based). On diagonal blocks this is the anti-lower-triangular pattern;
/// the Kronecker brute-force oracle confirms it off the diagonal as well.
pub fn theta_mask(block_sizes: &[usize]) -> ThetaMask {
    assert!(
        block_sizes.iter().all(|&s| s > 0),
        "block sizes must be positive"
    );
    let n: usize = block_sizes.iter().sum();
    let mut allowed = ndarray::Array2::from_elem((n, n), false);
    let mut offs = vec![0usize];
    for &sz in block_sizes {
        offs.push(offs.last().unwrap() + sz);
    }
    for (i, &ni) in block_sizes.iter().enumerate() {
        for (k, &nk) in block_sizes.iter().enumerate() {
            let cap = ni.min(nk) + 1;
            for ss in 1..=ni {
                for tt in 1..=nk {
                    if ss + tt <= cap {
                        allowed[[offs[i] + ss - 1, offs[k] + tt - 1]] = true;
                    }
                }
            }
        }
    }
    ThetaMask {
        block_sizes: block_sizes.to_vec(),
        allowed,
    }
}

/// The nilpotent matrix with ones on the superdiagonal of each Jordan block.
pub fn nilpotent(block_sizes: &[usize]) -> CMat {
    let n: usize = block_sizes.iter().sum();
    let mut m = zeros(n, n);
    let mut off = 0;
    for &sz in block_sizes {
        for k in 0..sz.saturating_sub(1) {
            m[[off + k, off + k + 1]] = ONE;
        }
        off += sz;
    }
    m
}

/// True iff `||a Z N^T + b N Z + N Z N^T|| <= tol ||Z||`.
pub fn verify_theta(z: &CMat, n: &CMat, a: C64, b: C64, tol: f64) -> bool {
    let nt = n.t().to_owned();
    let r = &(&z.dot(&nt).mapv(|v| v * a) + &n.dot(z).mapv(|v| v * b)) + &n.dot(z).dot(&nt);
    frob(&r) <= tol * frob(z).max(1e-300)
}

// ---------------------------------------------------------------------------
// Canonical Gamma for simple spectra
// ---------------------------------------------------------------------------

/// Free parameters of the canonical simple-spectrum Gamma, one entry per
/// classified group, in group order.
#[derive(Debug, Clone)]
pub enum GammaParam {
    /// T quadruple: U = [[a, b], [b, -a]].
    QuadrupleU { a: f64, b: f64 },
    /// T pair (real pair, or unimodular pair for T-palindromic): the scalar xi.
    PairScalar(f64),
    /// T-anti unimodular pair: xi_hat I_2.
    UnimodularScale(f64),
    /// T-anti +1/-1 scalar.
    UnitScalar(f64),
    /// H pair: the complex scalar eta.
    HPairScalar(C64),
    /// H unimodular: +1 means +i (palindromic) or +1 (anti), -1 the negative.
    HUnimodularSign(i8),
}

/// Parameter list aligned with a SpectrumSpec's groups.
#[derive(Debug, Clone)]
pub struct CanonicalGammaParams {
    pub per_group: Vec<GammaParam>,
}

impl CanonicalGammaParams {
    /// Unit parameters: U = diag(1, -1), xi = eta = 1, signs +.
    pub fn unit_for(spec: &SpectrumSpec, flavor: Flavor) -> Self {
        let per_group = spec
            .groups
            .iter()
            .map(|g| match g.category {
                GroupCategory::TQuadruple => GammaParam::QuadrupleU { a: 1.0, b: 0.0 },
                GroupCategory::TRealPair => GammaParam::PairScalar(1.0),
                GroupCategory::TUnimodularPair => {
                    if flavor.epsilon == 1 {
                        GammaParam::PairScalar(1.0)
                    } else {
                        GammaParam::UnimodularScale(1.0)
                    }
                }
                GroupCategory::TUnit => GammaParam::UnitScalar(1.0),
                GroupCategory::HPair => GammaParam::HPairScalar(ONE),
                GroupCategory::HUnimodular => GammaParam::HUnimodularSign(1),
            })
            .collect();
        CanonicalGammaParams { per_group }
    }
}

/// The canonical block-diagonal Gamma for a simple classified spectrum.
pub fn canonical_gamma(
    spec: &SpectrumSpec,
    flavor: Flavor,
    params: &CanonicalGammaParams,
) -> Result<ParameterMatrix> {
    if params.per_group.len() != spec.groups.len() {
        return Err(PqepError::DimensionMismatch(format!(
            "{} parameters for {} groups",
            params.per_group.len(),
            spec.groups.len()
        )));
    }
    let eps = flavor.eps();
    let mut blocks = Vec::new();
    for (g, p) in spec.groups.iter().zip(&params.per_group) {
        if g.algebraic_multiplicity != 1 {
            return Err(PqepError::UnsupportedDefective(format!(
                "canonical Gamma requires simple eigenvalues; {} has multiplicity {}",
                g.representative, g.algebraic_multiplicity
            )));
        }
        match (g.category, p) {
            (GroupCategory::TQuadruple, GammaParam::QuadrupleU { a, b }) => {
                if *a == 0.0 && *b == 0.0 {
                    return Err(PqepError::SingularAssembly("U parameter is zero".into()));
                }
                let u = from_real_rows(2, 2, &[*a, *b, *b, -*a]);
                blocks.push(block2x2(
                    &zeros(2, 2),
                    &u,
                    &u.mapv(|z| z * re(-eps)),
                    &zeros(2, 2),
                ));
            }
            (GroupCategory::TRealPair, GammaParam::PairScalar(xi)) => {
                if *xi == 0.0 {
                    return Err(PqepError::SingularAssembly("xi parameter is zero".into()));
                }
                blocks.push(from_real_rows(2, 2, &[0.0, *xi, -eps * *xi, 0.0]));
            }
            (GroupCategory::TUnimodularPair, GammaParam::PairScalar(xi)) => {
                if flavor.epsilon != 1 {
                    return Err(PqepError::UnimodularUnsupported(
                        "T-anti unimodular pairs take xi_hat I_2, not a skew pair block".into(),
                    ));
                }
                if *xi == 0.0 {
                    return Err(PqepError::SingularAssembly("xi parameter is zero".into()));
                }
                blocks.push(from_real_rows(2, 2, &[0.0, *xi, -*xi, 0.0]));
            }
            (GroupCategory::TUnimodularPair, GammaParam::UnimodularScale(xih)) => {
                if flavor.epsilon == 1 {
                    return Err(PqepError::UnimodularUnsupported(
                        "T-palindromic unimodular pairs take a skew pair block, not xi_hat I_2"
                            .into(),
                    ));
                }
                if *xih == 0.0 {
                    return Err(PqepError::SingularAssembly("xi_hat is zero".into()));
                }
                blocks.push(eye(2).mapv(|z| z * re(*xih)));
            }
            (GroupCategory::TUnit, GammaParam::UnitScalar(a)) => {
                if flavor.epsilon == 1 {
                    return Err(PqepError::UnimodularUnsupported(
                        "1 and -1 cannot be simple eigenvalues of a T-palindromic polynomial"
                            .into(),
                    ));
                }
                if *a == 0.0 {
                    return Err(PqepError::SingularAssembly("unit scalar is zero".into()));
                }
                blocks.push(from_real_rows(1, 1, &[*a]));
            }
            (GroupCategory::HPair, GammaParam::HPairScalar(eta)) => {
                if *eta == ZERO {
                    return Err(PqepError::SingularAssembly("eta parameter is zero".into()));
                }
                let mut b = zeros(2, 2);
                b[[0, 1]] = *eta;
                b[[1, 0]] = -re(eps) * eta.conj();
                blocks.push(b);
            }
            (GroupCategory::HUnimodular, GammaParam::HUnimodularSign(sgn)) => {
                let v = if flavor.epsilon == 1 {
                    C64::new(0.0, f64::from(*sgn))
                } else {
                    C64::new(f64::from(*sgn), 0.0)
                };
                let mut b = zeros(1, 1);
                b[[0, 0]] = v;
                blocks.push(b);
            }
            (cat, p) => {
                return Err(PqepError::DimensionMismatch(format!(
                    "parameter {p:?} does not fit group category {cat:?}"
                )));
            }
        }
    }
    Ok(ParameterMatrix::new_unchecked(block_diag(&blocks), flavor))
}

// ---------------------------------------------------------------------------
// Block analysis and congruence reduction
// ---------------------------------------------------------------------------

/// One parsed diagonal block of an admissible block-diagonal Gamma.
#[derive(Debug, Clone)]
pub(crate) enum GammaBlock {
    /// 2x2 [[0, v], [-eps v^*, 0]]; v real for T flavors.
    Pair { offset: usize, value: C64 },
    /// 4x4 [[0, U], [-eps U, 0]] with U = [[a, b], [b, -a]] (T flavors).
    Quad { offset: usize, a: f64, b: f64 },
    /// 2x2 xi_hat I_2 (T-anti unimodular pair).
    Definite2 { offset: usize, value: f64 },
    /// 1x1 real scalar (T-anti unit eigenvalue).
    Unit { offset: usize, value: f64 },
    /// 1x1 H-unimodular scalar: i y (palindromic) or y (anti-palindromic).
    HUnimodular { offset: usize, y: f64 },
}

impl GammaBlock {
    /// Hyperbolic slot pairs this block consumes (0 for definite blocks).
    pub(crate) fn slot_pairs(&self) -> usize {
        match self {
            GammaBlock::Quad { .. } => 2,
            GammaBlock::Pair { .. } => 1,
            _ => 0,
        }
    }

    pub(crate) fn definite_slots(&self) -> usize {
        match self {
            GammaBlock::Definite2 { .. } => 2,
            GammaBlock::Unit { .. } | GammaBlock::HUnimodular { .. } => 1,
            _ => 0,
        }
    }
}

/// Infer the block layout of an admissible Gamma from its sparsity pattern.
pub(crate) fn infer_blocks(gamma: &CMat, flavor: Flavor) -> Result<Vec<GammaBlock>> {
    let p = gamma.nrows();
    let scale = frob(gamma).max(1e-300);
    let tol = 1e-9 * scale;
    let nz = |v: C64| v.norm() > tol;
    let mut blocks = Vec::new();
    let mut o = 0usize;
    while o < p {
        if o + 1 < p && nz(gamma[[o, o + 1]]) && !nz(gamma[[o, o]]) {
            let v = gamma[[o, o + 1]];
            let want_lower = -re(flavor.eps()) * v.conj();
            if (gamma[[o + 1, o]] - want_lower).norm() > 1e-6 * scale {
                return Err(PqepError::NotCongruent(format!(
                    "pair block at offset {o} violates Gamma^* = -eps Gamma"
                )));
            }
            blocks.push(GammaBlock::Pair {
                offset: o,
                value: v,
            });
            o += 2;
        } else if o + 3 < p
            && !nz(gamma[[o, o]])
            && !nz(gamma[[o, o + 1]])
            && (nz(gamma[[o, o + 2]]) || nz(gamma[[o, o + 3]]))
        {
            let u = gamma.slice(s![o..o + 2, o + 2..o + 4]).to_owned();
            let a = 0.5 * (u[[0, 0]].re - u[[1, 1]].re);
            let b = 0.5 * (u[[0, 1]].re + u[[1, 0]].re);
            let want = from_real_rows(2, 2, &[a, b, b, -a]);
            if frob(&(&u - &want)) > 1e-6 * scale {
                return Err(PqepError::NotCongruent(format!(
                    "4x4 block at offset {o} is not [[0, U], [-eps U, 0]] with U = [[a, b], [b, -a]]"
                )));
            }
            blocks.push(GammaBlock::Quad { offset: o, a, b });
            o += 4;
        } else if nz(gamma[[o, o]]) {
            let v = gamma[[o, o]];
            if flavor.is_real() {
                if o + 1 < p
                    && nz(gamma[[o + 1, o + 1]])
                    && !nz(gamma[[o, o + 1]])
                    && (gamma[[o + 1, o + 1]] - v).norm() <= 1e-9 * scale
                {
                    blocks.push(GammaBlock::Definite2 {
                        offset: o,
                        value: v.re,
                    });
                    o += 2;
                } else {
                    blocks.push(GammaBlock::Unit {
                        offset: o,
                        value: v.re,
                    });
                    o += 1;
                }
            } else {
                let y = if flavor.epsilon == 1 { v.im } else { v.re };
                blocks.push(GammaBlock::HUnimodular { offset: o, y });
                o += 1;
            }
        } else {
            return Err(PqepError::NotCongruent(format!(
                "could not parse a canonical-layout block at offset {o}"
            )));
        }
    }
    Ok(blocks)
}

/// Result of reducing an admissible Gamma to its canonical form.
pub(crate) struct Reduction {
    /// P with P . canonical . P^* = Gamma.
    pub p_to_gamma: CMat,
    /// The canonical matrix: [[0, I_q], [-eps I_q, 0]] plus definite signs.
    pub canonical: CMat,
    /// Sign of each definite slot, in slot order.
    pub definite_signs: Vec<i8>,
}

/// Build the canonical matrix for q hyperbolic pairs plus definite signs.
pub(crate) fn canonical_matrix(q: usize, definite_signs: &[i8], flavor: Flavor) -> CMat {
    let p = 2 * q + definite_signs.len();
    let mut c = zeros(p, p);
    for k in 0..q {
        c[[k, q + k]] = ONE;
        c[[q + k, k]] = re(-flavor.eps());
    }
    for (j, &sgn) in definite_signs.iter().enumerate() {
        let v = if !flavor.is_real() && flavor.epsilon == 1 {
            C64::new(0.0, f64::from(sgn))
        } else {
            re(f64::from(sgn))
        };
        c[[2 * q + j, 2 * q + j]] = v;
    }
    c
}

/// Per-block congruence factors assembled into P with P . C . P^* = Gamma.
///
/// Pair blocks with value exactly 1 reduce by the identity hosting (they
/// already equal the local canonical block); general pair blocks host
/// `u <- -eps v^* . (second partner)`, `w <- (first partner)`. Quadruple
/// blocks use the orthogonal eigendecomposition of U = [[a, b], [b, -a]] =
/// G diag(s, -s) G^T and the factor diag(sqrt(s) G diag(1,-1), sqrt(s) G).
/// Definite blocks take |value|^{1/2} scalings and contribute their signs to
/// the canonical form.
pub(crate) fn build_reduction(blocks: &[GammaBlock], flavor: Flavor, p: usize) -> Reduction {
    let eps = flavor.eps();
    let q: usize = blocks.iter().map(|b| b.slot_pairs()).sum();
    let n_def: usize = blocks.iter().map(|b| b.definite_slots()).sum();
    debug_assert_eq!(2 * q + n_def, p);
    let mut pm = zeros(p, p);
    let mut definite_signs = Vec::with_capacity(n_def);
    let mut su = 0usize; // next hyperbolic slot pair
    let mut sd = 2 * q; // next definite slot
    for blk in blocks {
        match *blk {
            GammaBlock::Pair { offset, value } => {
                if (value - ONE).norm() <= 1e-12 {
                    pm[[offset, su]] = ONE;
                    pm[[offset + 1, q + su]] = ONE;
                } else {
                    pm[[offset + 1, su]] = re(-eps) * value.conj();
                    pm[[offset, q + su]] = ONE;
                }
                su += 1;
            }
            GammaBlock::Quad { offset, a, b } => {
                let sv = a.hypot(b);
                let g = 0.5 * b.atan2(a);
                let (c, sn) = (g.cos(), g.sin());
                let rt = sv.sqrt();
                // first rotation block hosts the u-slots through G diag(1,-1)
                pm[[offset, su]] = re(rt * c);
                pm[[offset + 1, su]] = re(rt * sn);
                pm[[offset, su + 1]] = re(rt * sn);
                pm[[offset + 1, su + 1]] = re(-rt * c);
                // second rotation block hosts the w-slots through G
                pm[[offset + 2, q + su]] = re(rt * c);
                pm[[offset + 3, q + su]] = re(rt * sn);
                pm[[offset + 2, q + su + 1]] = re(-rt * sn);
                pm[[offset + 3, q + su + 1]] = re(rt * c);
                su += 2;
            }
            GammaBlock::Definite2 { offset, value } => {
                let r = value.abs().sqrt();
                pm[[offset, sd]] = re(r);
                pm[[offset + 1, sd + 1]] = re(r);
                let sgn = if value >= 0.0 { 1 } else { -1 };
                definite_signs.push(sgn);
                definite_signs.push(sgn);
                sd += 2;
            }
            GammaBlock::Unit { offset, value } => {
                pm[[offset, sd]] = re(value.abs().sqrt());
                definite_signs.push(if value >= 0.0 { 1 } else { -1 });
                sd += 1;
            }
            GammaBlock::HUnimodular { offset, y } => {
                pm[[offset, sd]] = re(y.abs().sqrt());
                definite_signs.push(if y >= 0.0 { 1 } else { -1 });
                sd += 1;
            }
        }
    }
    let canonical = canonical_matrix(q, &definite_signs, flavor);
    Reduction {
        p_to_gamma: pm,
        canonical,
        definite_signs,
    }
}

/// Congruence of an admissible block-diagonal Gamma to the canonical skew
/// block: returns (P, R) with `P gamma1 P^* = R = [[0, I_q], [-eps I_q, 0]]`.
///
/// Blocks whose canonical form is definite rather than skew (T-anti
/// unimodular pairs and unit scalars, H-unimodular scalars) are not
/// congruent to R; they surface as `NotCongruent`, which is exactly the
/// modulus-one replacement restriction.
pub fn congruence_to_canonical(gamma1: &CMat, flavor: Flavor) -> Result<(CMat, CMat)> {
    if gamma1.nrows() != gamma1.ncols() {
        return Err(PqepError::DimensionMismatch("Gamma must be square".into()));
    }
    let blocks = infer_blocks(gamma1, flavor)?;
    let n_def: usize = blocks.iter().map(|b| b.definite_slots()).sum();
    if n_def > 0 {
        return Err(PqepError::NotCongruent(format!(
            "{n_def} definite slot(s) (modulus-one content) cannot be congruent to the skew canonical block"
        )));
    }
    let red = build_reduction(&blocks, flavor, gamma1.nrows());
    let p = inv(&red.p_to_gamma)?;
    Ok((p, red.canonical))
}
