//! No-spill-over eigenvalue embedding: replace p measured eigenvalues of a
//! palindromic polynomial with p new ones while keeping the remaining
//! 2n - p eigenpairs fixed and preserving the coefficient structure.
//!
//! The update only needs the measured sub-pair (X1, Lambda1): the p x p
//! parameter block Gamma1 decouples from the unknown rest, both Gamma1 and
//! the chosen canonical Gamma1-new reduce by congruence to a common
//! canonical form, any structured unitary Phi-tilde rotates between them,
//! and the new coefficients follow from a rank-p update of A^{-1}.

use crate::error::{PqepError, Result};
use crate::flavor::Flavor;
use crate::gamma::{build_reduction, GammaBlock};
use crate::layout::{analyze_layout, take_cols, JGroup};
use crate::linalg::{inv, inv_condition};
use crate::mat::{
    block2x2, block_diag, eye, frob, from_real_rows, re, realify, rotation_block, star_of, zeros,
    CMat, C64, ONE,
};
use crate::oracle::{qep_eigensolve, random_matrix};
use crate::poly::PalindromicPolynomial;
use crate::spectrum::multiset_match_max_distance;
use crate::TOL_PAIR;
use ndarray::s;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// How the structured unitary freedom Phi-tilde is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiChoice {
    Identity,
    RandomStructured,
}

/// An embedding request: the polynomial, the measured eigenpairs to replace,
/// and the replacement eigenvalues.
#[derive(Debug, Clone)]
pub struct EmbeddingRequest {
    pub poly: PalindromicPolynomial,
    /// Measured eigenvectors, one column per eigenvalue slot of `lambda1`.
    pub x1: CMat,
    /// Measured eigenvalues: block-diagonal real representation (T flavors)
    /// or complex diagonal (H flavors).
    pub lambda1: CMat,
    /// Replacement eigenvalues, same kind of layout.
    pub lambda1_new: CMat,
    pub seed: u64,
    pub phi_choice: PhiChoice,
}

/// Defect norms reported by a successful embedding.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingReport {
    /// ||A~ X1~ L1~^2 + Q~ X1~ L1~ + eps A~^* X1~||_F
    pub new_residual: f64,
    /// Relative defect of Phi Gamma1-new Phi^* = Gamma1.
    pub gg8_defect: f64,
    /// Largest relative deviation of the retained eigenvalues (oracle check).
    pub retained_deviation: f64,
    /// ||Phi~^* Phi~ - I||_F of the structured unitary used.
    pub phi_unitary_defect: f64,
}

/// Result of a successful embedding.
#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    pub poly_new: PalindromicPolynomial,
    /// New eigenvectors X1~ = X1 Phi, columns laid out like `lambda1_new`.
    pub x1_new: CMat,
    /// The replacement spectral matrix in canonical layout.
    pub lambda1_new: CMat,
    /// Extracted parameter block of the measured pairs (canonical layout,
    /// sign-canonicalized).
    pub gamma1: CMat,
    /// The canonical parameter block chosen for the replacements.
    pub gamma1_new: CMat,
    pub phi: CMat,
    pub report: EmbeddingReport,
}

// ---------------------------------------------------------------------------
// Group bookkeeping
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GKind {
    Quad,
    RealPair,
    UnimodPairT,
    HPair,
    HUnimod,
}

impl GKind {
    fn width(self) -> usize {
        match self {
            GKind::Quad => 4,
            GKind::RealPair | GKind::UnimodPairT | GKind::HPair => 2,
            GKind::HUnimod => 1,
        }
    }

    fn order_key(self) -> u8 {
        match self {
            GKind::Quad => 0,
            GKind::UnimodPairT => 1,
            GKind::RealPair => 2,
            GKind::HPair => 0,
            GKind::HUnimod => 1,
        }
    }
}

/// One simple pairing group with its representative and the columns it
/// occupies in the supplied (X1, Lambda1).
#[derive(Debug, Clone)]
struct Group {
    kind: GKind,
    /// Representative: |lambda| > 1 member, Im > 0 for complex T reps.
    rep: C64,
    /// Column indices in the ORIGINAL layout, representative part first.
    cols: Vec<usize>,
    /// Negate the second column of a rotation block when gathering (flips
    /// the stored block from rot(conj lambda) to rot(lambda)).
    flip_im: Vec<bool>,
}

/// Parse a measured spectral matrix into simple groups in canonical order.
fn parse_groups(lambda: &CMat, flavor: Flavor) -> Result<Vec<Group>> {
    let groups = analyze_layout(lambda, flavor)?;
    let mut out = Vec::new();
    for g in groups {
        match g {
            JGroup::Pair { firsts, seconds } => {
                if firsts.len() != 1 {
                    return Err(PqepError::InvariantViolation(
                        "replaced eigenvalues must be simple".into(),
                    ));
                }
                let (mut f, mut s) = (firsts[0], seconds[0]);
                let mut lam = lambda[[f, f]];
                if lam.norm() < 1.0 {
                    std::mem::swap(&mut f, &mut s);
                    lam = lambda[[f, f]];
                }
                let kind = if flavor.is_real() {
                    GKind::RealPair
                } else {
                    GKind::HPair
                };
                out.push(Group {
                    kind,
                    rep: lam,
                    cols: vec![f, s],
                    flip_im: vec![false, false],
                });
            }
            JGroup::Quad { firsts, seconds } => {
                if firsts.len() != 1 {
                    return Err(PqepError::InvariantViolation(
                        "replaced eigenvalues must be simple".into(),
                    ));
                }
                let (mut f, mut s) = (firsts[0], seconds[0]);
                let mut lam = C64::new(lambda[[f, f]].re, lambda[[f, f + 1]].re);
                if lam.norm() < 1.0 {
                    std::mem::swap(&mut f, &mut s);
                    lam = C64::new(lambda[[f, f]].re, lambda[[f, f + 1]].re);
                }
                // canonical representative has positive imaginary part;
                // flipping a block's second basis column conjugates it
                let flip_f = lam.im < 0.0;
                let lam = if flip_f { lam.conj() } else { lam };
                let partner = C64::new(lambda[[s, s]].re, lambda[[s, s + 1]].re);
                let flip_s = (partner.im > 0.0) != (lam.inv().im > 0.0);
                out.push(Group {
                    kind: GKind::Quad,
                    rep: lam,
                    cols: vec![f, f + 1, s, s + 1],
                    flip_im: vec![false, flip_f, false, flip_s],
                });
            }
            JGroup::UnimodRot { starts } => {
                if starts.len() != 1 {
                    return Err(PqepError::InvariantViolation(
                        "replaced eigenvalues must be simple".into(),
                    ));
                }
                let o = starts[0];
                let lam = C64::new(lambda[[o, o]].re, lambda[[o, o + 1]].re);
                let flip = lam.im < 0.0;
                let lam = if flip { lam.conj() } else { lam };
                out.push(Group {
                    kind: GKind::UnimodPairT,
                    rep: lam / lam.norm(),
                    cols: vec![o, o + 1],
                    flip_im: vec![false, flip],
                });
            }
            JGroup::UnimodScalar { cols } => {
                if cols.len() != 1 {
                    return Err(PqepError::InvariantViolation(
                        "replaced eigenvalues must be simple".into(),
                    ));
                }
                let lam = lambda[[cols[0], cols[0]]];
                out.push(Group {
                    kind: GKind::HUnimod,
                    rep: lam / lam.norm(),
                    cols,
                    flip_im: vec![false],
                });
            }
        }
    }
    out.sort_by(|a, b| {
        (a.kind.order_key(), a.rep.re, a.rep.im)
            .partial_cmp(&(b.kind.order_key(), b.rep.re, b.rep.im))
            .unwrap()
    });
    Ok(out)
}

/// All eigenvalues a group denotes.
fn group_eigenvalues(g: &Group) -> Vec<C64> {
    match g.kind {
        GKind::Quad => vec![g.rep, g.rep.conj(), g.rep.inv(), g.rep.conj().inv()],
        GKind::RealPair => vec![g.rep, g.rep.inv()],
        GKind::UnimodPairT => vec![g.rep, g.rep.conj()],
        GKind::HPair => vec![g.rep, g.rep.conj().inv()],
        GKind::HUnimod => vec![g.rep],
    }
}

/// Canonical spectral block for a group.
fn group_spectral_block(g: &Group) -> CMat {
    match g.kind {
        GKind::Quad => block_diag(&[rotation_block(g.rep), rotation_block(g.rep.inv())]),
        GKind::RealPair => from_real_rows(2, 2, &[g.rep.re, 0.0, 0.0, 1.0 / g.rep.re]),
        GKind::UnimodPairT => rotation_block(g.rep),
        GKind::HPair => {
            let mut b = zeros(2, 2);
            b[[0, 0]] = g.rep;
            b[[1, 1]] = g.rep.conj().inv();
            b
        }
        GKind::HUnimod => {
            let mut b = zeros(1, 1);
            b[[0, 0]] = g.rep;
            b
        }
    }
}

/// Gather X columns for a group (with imaginary-axis flips) and normalize:
/// unit columns for scalar slots, rotation pairs scaled so the complex
/// eigenvector has unit norm, real columns signed largest-entry-positive.
fn gather_columns(x: &CMat, g: &Group, flavor: Flavor) -> CMat {
    let mut cols = take_cols(x, &g.cols);
    for (k, flip) in g.flip_im.iter().enumerate() {
        if *flip {
            for i in 0..cols.nrows() {
                cols[[i, k]] = -cols[[i, k]];
            }
        }
    }
    match g.kind {
        GKind::Quad | GKind::UnimodPairT => {
            // per rotation pair: ||b1||^2 + ||b2||^2 = 2
            let mut o = 0;
            while o < cols.ncols() {
                let n2: f64 = (0..cols.nrows())
                    .map(|i| cols[[i, o]].norm_sqr() + cols[[i, o + 1]].norm_sqr())
                    .sum();
                let scale = (2.0 / n2).sqrt();
                for i in 0..cols.nrows() {
                    cols[[i, o]] *= re(scale);
                    cols[[i, o + 1]] *= re(scale);
                }
                o += 2;
            }
        }
        _ => {
            for j in 0..cols.ncols() {
                let n2: f64 = (0..cols.nrows()).map(|i| cols[[i, j]].norm_sqr()).sum();
                let scale = 1.0 / n2.sqrt();
                for i in 0..cols.nrows() {
                    cols[[i, j]] *= re(scale);
                }
                if flavor.is_real() {
                    let mut best = 0.0;
                    let mut sgn = 1.0;
                    for i in 0..cols.nrows() {
                        if cols[[i, j]].re.abs() > best {
                            best = cols[[i, j]].re.abs();
                            sgn = cols[[i, j]].re.signum();
                        }
                    }
                    if sgn < 0.0 {
                        for i in 0..cols.nrows() {
                            cols[[i, j]] = -cols[[i, j]];
                        }
                    }
                }
            }
        }
    }
    cols
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// The p x p parameter block of the measured pairs:
/// `Gamma1 = ([X1^*, L1^{-*} X1^*] [[Q, A], [A, 0]] [X1; X1 L1])^{-1}`.
pub fn extract_gamma1(poly: &PalindromicPolynomial, x1: &CMat, lambda1: &CMat) -> Result<CMat> {
    let n = poly.dim();
    let p = lambda1.nrows();
    if x1.nrows() != n || x1.ncols() != p || lambda1.ncols() != p {
        return Err(PqepError::DimensionMismatch(format!(
            "X1 {}x{}, Lambda1 {}x{}",
            x1.nrows(),
            x1.ncols(),
            lambda1.nrows(),
            lambda1.ncols()
        )));
    }
    // the measured pairs must actually solve the polynomial
    let res = crate::poly::residual(poly, x1, lambda1)?;
    let scale =
        (frob(poly.a()) + frob(poly.q())) * frob(x1).max(1e-300) * frob(lambda1).max(1.0).powi(2);
    let limit = 1e-6 * scale.max(1e-300);
    if res > limit {
        return Err(PqepError::NotEigenpairs {
            residual: res,
            limit,
        });
    }
    let l1_inv = inv(lambda1).map_err(|_| PqepError::SingularJ)?;
    let x1s = star_of(x1, poly.flavor.star);
    let left = crate::mat::hstack(&x1s, &star_of(&l1_inv, poly.flavor.star).dot(&x1s));
    let middle = block2x2(poly.q(), poly.a(), poly.a(), &zeros(n, n));
    let right = crate::mat::vstack(&x1.view().to_owned(), &x1.dot(lambda1));
    let asm = left.dot(&middle).dot(&right);
    if inv_condition(&asm) <= crate::TOL_RANK {
        return Err(PqepError::SingularAssembly(
            "the Gamma1 assembly is numerically singular".into(),
        ));
    }
    inv(&asm)
}

/// A p x p structured unitary `Phi~ = [[P1, P2], [-eps P2, P1]]` with
/// `Phi~^* Phi~ = I`, hence `Phi~ R Phi~^* = R`. `Identity` returns I;
/// `RandomStructured` draws a random structured matrix and takes its polar
/// factor (the structure algebra is closed under the polar map).
pub fn solve_phi_tilde(flavor: Flavor, q: usize, seed: u64, choice: PhiChoice) -> CMat {
    if q == 0 || choice == PhiChoice::Identity {
        return eye(2 * q);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p1 = random_matrix(q, q, flavor, &mut rng).mapv(|z| z - re(0.5));
    let p2 = random_matrix(q, q, flavor, &mut rng).mapv(|z| z - re(0.5));
    let b = block2x2(&p1, &p2, &p2.mapv(|z| z * re(-flavor.eps())), &p1);
    // polar factor by Newton iteration X <- (X + X^{-*}) / 2; the structure
    // algebra is closed under inverse and star, so the factor keeps the
    // [[P1, P2], [-eps P2, P1]] shape
    let mut x = b.mapv(|z| z / re(frob(&b).max(1e-300)));
    for _ in 0..60 {
        let xi = match inv(&x) {
            Ok(m) => m,
            Err(_) => {
                // nearly singular draw: nudge towards the identity
                x = &x + &eye(2 * q).mapv(|z| z * 0.5);
                continue;
            }
        };
        let next = (&x + &star_of(&xi, flavor.star)).mapv(|z| z * 0.5);
        let step = frob(&(&next - &x));
        x = next;
        if step <= 1e-15 * frob(&x).max(1.0) {
            break;
        }
    }
    if flavor.is_real() {
        realify(&x)
    } else {
        x
    }
}

/// Frobenius norm of `[X2^*, L2^{-*} X2^*] [[Q, A], [A, 0]] [X1; X1 L1]`,
/// which vanishes when the two eigenpair sets decouple.
pub fn check_decoupling(
    poly: &PalindromicPolynomial,
    x1: &CMat,
    lambda1: &CMat,
    x2: &CMat,
    lambda2: &CMat,
) -> Result<f64> {
    if x1.ncols() == 0 || x2.ncols() == 0 {
        return Ok(0.0);
    }
    let n = poly.dim();
    if x1.nrows() != n || x2.nrows() != n {
        return Err(PqepError::DimensionMismatch("X1/X2 row counts".into()));
    }
    let l2_inv = inv(lambda2).map_err(|_| PqepError::SingularJ)?;
    let x2s = star_of(x2, poly.flavor.star);
    let left = crate::mat::hstack(&x2s, &star_of(&l2_inv, poly.flavor.star).dot(&x2s));
    let middle = block2x2(poly.q(), poly.a(), poly.a(), &zeros(n, n));
    let right = crate::mat::vstack(&x1.view().to_owned(), &x1.dot(lambda1));
    Ok(frob(&left.dot(&middle).dot(&right)))
}

/// Parse Gamma1's diagonal blocks according to the group list, verifying the
/// block-diagonal structure.
fn parse_gamma_blocks(gamma1: &CMat, groups: &[Group], flavor: Flavor) -> Result<Vec<GammaBlock>> {
    let p = gamma1.nrows();
    let scale = frob(gamma1).max(1e-300);
    let mut blocks = Vec::new();
    let mut model = zeros(p, p);
    let mut o = 0usize;
    for g in groups {
        match g.kind {
            GKind::RealPair | GKind::HPair => {
                let v = gamma1[[o, o + 1]];
                blocks.push(GammaBlock::Pair {
                    offset: o,
                    value: v,
                });
                model[[o, o + 1]] = v;
                model[[o + 1, o]] = -re(flavor.eps()) * v.conj();
            }
            GKind::UnimodPairT => {
                if flavor.epsilon == 1 {
                    let v = gamma1[[o, o + 1]];
                    blocks.push(GammaBlock::Pair {
                        offset: o,
                        value: v,
                    });
                    model[[o, o + 1]] = v;
                    model[[o + 1, o]] = -v;
                } else {
                    let v = gamma1[[o, o]].re;
                    blocks.push(GammaBlock::Definite2 {
                        offset: o,
                        value: v,
                    });
                    model[[o, o]] = re(v);
                    model[[o + 1, o + 1]] = re(v);
                }
            }
            GKind::Quad => {
                let u = gamma1.slice(s![o..o + 2, o + 2..o + 4]).to_owned();
                let a = 0.5 * (u[[0, 0]].re - u[[1, 1]].re);
                let b = 0.5 * (u[[0, 1]].re + u[[1, 0]].re);
                blocks.push(GammaBlock::Quad { offset: o, a, b });
                let um = from_real_rows(2, 2, &[a, b, b, -a]);
                model.slice_mut(s![o..o + 2, o + 2..o + 4]).assign(&um);
                model
                    .slice_mut(s![o + 2..o + 4, o..o + 2])
                    .assign(&um.mapv(|z| z * re(-flavor.eps())));
            }
            GKind::HUnimod => {
                let v = gamma1[[o, o]];
                let y = if flavor.epsilon == 1 { v.im } else { v.re };
                blocks.push(GammaBlock::HUnimodular { offset: o, y });
                model[[o, o]] = if flavor.epsilon == 1 {
                    C64::new(0.0, y)
                } else {
                    re(y)
                };
            }
        }
        o += g.kind.width();
    }
    let defect = frob(&(gamma1 - &model));
    if defect > 1e-5 * scale {
        return Err(PqepError::InvariantViolation(format!(
            "Gamma1 is not block diagonal in the measured group layout \
             (defect {:.3e} of {:.3e}); the decoupling hypothesis fails",
            defect, scale
        )));
    }
    Ok(blocks)
}

/// Run the embedding.
pub fn embed(req: &EmbeddingRequest) -> Result<EmbeddingResult> {
    let poly = &req.poly;
    let flavor = poly.flavor;
    let p = req.lambda1.nrows();
    if !p.is_multiple_of(2) {
        return Err(PqepError::InvariantViolation(format!(
            "p = {p} must be even"
        )));
    }
    if req.lambda1_new.nrows() != p || req.lambda1_new.ncols() != p || req.lambda1.ncols() != p {
        return Err(PqepError::DimensionMismatch(
            "Lambda1 and the replacement block must be p x p".into(),
        ));
    }
    if req.x1.nrows() != poly.dim() || req.x1.ncols() != p {
        return Err(PqepError::DimensionMismatch("X1 must be n x p".into()));
    }
    let old_groups = parse_groups(&req.lambda1, flavor)?;
    let new_groups = parse_groups(&req.lambda1_new, flavor)?;

    // replaced and replacement spectra must be disjoint
    let old_eigs: Vec<C64> = old_groups.iter().flat_map(group_eigenvalues).collect();
    let new_eigs: Vec<C64> = new_groups.iter().flat_map(group_eigenvalues).collect();
    for a in &old_eigs {
        for b in &new_eigs {
            if (a - b).norm() <= TOL_PAIR * a.norm().max(1.0) {
                return Err(PqepError::InvariantViolation(format!(
                    "replaced and replacement spectra overlap at {a}"
                )));
            }
        }
    }

    // a-posteriori decoupling check against the oracle spectrum: pairing
    // closure makes it equivalent to the replaced eigenvalues being simple
    // in the full spectrum (no retained copy of any of them)
    let full_spectrum: Vec<C64> = qep_eigensolve(poly)?.iter().map(|pr| pr.value).collect();
    {
        let mut pool = full_spectrum.clone();
        remove_closest(&mut pool, &old_eigs);
        for a in &old_eigs {
            for z in &pool {
                if (a - z).norm() <= 1e-6 * a.norm().max(1.0) {
                    return Err(PqepError::InvariantViolation(format!(
                        "the retained spectrum still contains {a}; the replaced \
                         eigenvalues must be simple for the measured block to decouple"
                    )));
                }
            }
        }
    }

    // canonical measured pair
    let mut x1c_cols = Vec::new();
    let mut l1_blocks = Vec::new();
    for g in &old_groups {
        x1c_cols.push(gather_columns(&req.x1, g, flavor));
        l1_blocks.push(group_spectral_block(g));
    }
    let mut x1c = x1c_cols
        .iter()
        .skip(1)
        .fold(x1c_cols[0].clone(), |acc, c| crate::mat::hstack(&acc, c));
    let l1c = block_diag(&l1_blocks);
    let mut gamma1 = extract_gamma1(poly, &x1c, &l1c)?;
    let mut blocks_old = parse_gamma_blocks(&gamma1, &old_groups, flavor)?;

    // sign canonicalization: make T pair values positive by flipping the
    // first partner's eigenvector
    if flavor.is_real() {
        for blk in &mut blocks_old {
            if let GammaBlock::Pair { offset, value } = blk {
                if value.re < 0.0 {
                    let o = *offset;
                    for i in 0..x1c.nrows() {
                        x1c[[i, o]] = -x1c[[i, o]];
                    }
                    for k in 0..p {
                        gamma1[[o, k]] = -gamma1[[o, k]];
                        gamma1[[k, o]] = -gamma1[[k, o]];
                    }
                    *value = -*value;
                }
            }
        }
    }

    // category compatibility
    let q_old: usize = blocks_old.iter().map(|b| b.slot_pairs()).sum();
    let old_red = build_reduction(&blocks_old, flavor, p);
    let q_new: usize = new_groups
        .iter()
        .map(|g| match g.kind {
            GKind::Quad => 2,
            GKind::RealPair | GKind::HPair => 1,
            GKind::UnimodPairT => usize::from(flavor.epsilon == 1),
            GKind::HUnimod => 0,
        })
        .sum();
    let def_new: usize = new_groups
        .iter()
        .map(|g| match g.kind {
            GKind::UnimodPairT if flavor.epsilon != 1 => 2,
            GKind::HUnimod => 1,
            _ => 0,
        })
        .sum();
    if q_new != q_old || def_new != old_red.definite_signs.len() {
        return Err(PqepError::CategoryMismatch(format!(
            "measured content reduces to {} hyperbolic pair(s) + {} definite slot(s), \
             replacements to {} + {}; modulus-one eigenvalues can only be replaced by \
             modulus-one eigenvalues",
            q_old,
            old_red.definite_signs.len(),
            q_new,
            def_new
        )));
    }

    // canonical Gamma for the replacements, definite signs matched to the
    // measured side so the congruence exists
    let mut l1n_blocks = Vec::new();
    let mut gamma_new_blocks_mat = Vec::new();
    let mut blocks_new = Vec::new();
    let mut off = 0usize;
    let mut def_iter = old_red.definite_signs.iter();
    for g in &new_groups {
        l1n_blocks.push(group_spectral_block(g));
        let hyperbolic_pair = matches!(g.kind, GKind::RealPair | GKind::HPair)
            || (g.kind == GKind::UnimodPairT && flavor.epsilon == 1);
        match g.kind {
            _ if hyperbolic_pair => {
                let mut b = zeros(2, 2);
                b[[0, 1]] = ONE;
                b[[1, 0]] = re(-flavor.eps());
                gamma_new_blocks_mat.push(b);
                blocks_new.push(GammaBlock::Pair {
                    offset: off,
                    value: ONE,
                });
            }
            GKind::UnimodPairT => {
                let sgn = f64::from(*def_iter.next().unwrap());
                let _ = def_iter.next();
                gamma_new_blocks_mat.push(eye(2).mapv(|z| z * re(sgn)));
                blocks_new.push(GammaBlock::Definite2 {
                    offset: off,
                    value: sgn,
                });
            }
            GKind::Quad => {
                let u = from_real_rows(2, 2, &[1.0, 0.0, 0.0, -1.0]);
                gamma_new_blocks_mat.push(block2x2(
                    &zeros(2, 2),
                    &u,
                    &u.mapv(|z| z * re(-flavor.eps())),
                    &zeros(2, 2),
                ));
                blocks_new.push(GammaBlock::Quad {
                    offset: off,
                    a: 1.0,
                    b: 0.0,
                });
            }
            GKind::HUnimod => {
                let sgn = f64::from(*def_iter.next().unwrap());
                let mut b = zeros(1, 1);
                b[[0, 0]] = if flavor.epsilon == 1 {
                    C64::new(0.0, sgn)
                } else {
                    re(sgn)
                };
                gamma_new_blocks_mat.push(b);
                blocks_new.push(GammaBlock::HUnimodular {
                    offset: off,
                    y: sgn,
                });
            }
            _ => unreachable!(),
        }
        off += g.kind.width();
    }
    let l1n = block_diag(&l1n_blocks);
    let gamma1_new = block_diag(&gamma_new_blocks_mat);
    let new_red = build_reduction(&blocks_new, flavor, p);
    if new_red.definite_signs != old_red.definite_signs {
        return Err(PqepError::CategoryMismatch(
            "definite sign classes of the two parameter blocks differ".into(),
        ));
    }

    // Phi-tilde on the hyperbolic slots, identity on the definite slots
    let phit_h = solve_phi_tilde(flavor, q_old, req.seed, req.phi_choice);
    let phit = block_diag(&[phit_h, eye(p - 2 * q_old)]);
    let phi_unitary_defect = frob(&(&star_of(&phit, flavor.star).dot(&phit) - &eye(p)));
    let phi = old_red
        .p_to_gamma
        .dot(&phit)
        .dot(&inv(&new_red.p_to_gamma)?);

    // post-hoc check of the congruence identity Phi Gamma1~ Phi^* = Gamma1
    let gg8 = frob(&(&phi.dot(&gamma1_new).dot(&star_of(&phi, flavor.star)) - &gamma1))
        / frob(&gamma1).max(1e-300);
    if gg8 > 1e-9 {
        return Err(PqepError::InvariantViolation(format!(
            "congruence identity defect {gg8:.3e} exceeds 1e-9"
        )));
    }

    let x1_new = x1c.dot(&phi);

    // the rank-p coefficient update
    let a_inv = inv(poly.a())?;
    let x1s = star_of(&x1c, flavor.star);
    let x1ns = star_of(&x1_new, flavor.star);
    let m_old = x1c.dot(&l1c).dot(&gamma1).dot(&x1s);
    let m_new = x1_new.dot(&l1n).dot(&gamma1_new).dot(&x1ns);
    let inner = &(&a_inv + &m_new) - &m_old;
    if inv_condition(&inner) <= crate::TOL_RANK {
        return Err(PqepError::SingularUpdate(
            "A^{-1} + X1~ L1~ Gamma1~ X1~^* - X1 L1 Gamma1 X1^* is singular".into(),
        ));
    }
    let a_new = inv(&inner)?;
    let m2_old = x1c.dot(&l1c).dot(&l1c).dot(&gamma1).dot(&x1s);
    let m2_new = x1_new.dot(&l1n).dot(&l1n).dot(&gamma1_new).dot(&x1ns);
    let q_new_mat = &a_new.dot(&a_inv).dot(poly.q()).dot(&a_inv).dot(&a_new)
        + &a_new.dot(&(&m2_old - &m2_new)).dot(&a_new);
    // symmetrize away the roundoff before the structural gate
    let qs = star_of(&q_new_mat, flavor.star);
    let q_new_mat = (&q_new_mat + &qs.mapv(|z| z * re(flavor.eps()))).mapv(|z| z * 0.5);
    let (a_new, q_new_mat) = if flavor.is_real() {
        (realify(&a_new), realify(&q_new_mat))
    } else {
        (a_new, q_new_mat)
    };
    let poly_new = PalindromicPolynomial::new(flavor, a_new, q_new_mat)?;

    // reports
    let new_residual = crate::poly::residual(&poly_new, &x1_new, &l1n)?;
    let retained_deviation = retained_deviation(&full_spectrum, &poly_new, &old_eigs, &new_eigs)
        .unwrap_or(f64::INFINITY);

    Ok(EmbeddingResult {
        poly_new,
        x1_new,
        lambda1_new: l1n,
        gamma1,
        gamma1_new,
        phi,
        report: EmbeddingReport {
            new_residual,
            gg8_defect: gg8,
            retained_deviation,
            phi_unitary_defect,
        },
    })
}

/// Oracle check: remove the replaced values from the old spectrum and the
/// replacements from the new one; the remainders must agree.
fn retained_deviation(
    old_spectrum: &[C64],
    poly_new: &PalindromicPolynomial,
    replaced: &[C64],
    replacements: &[C64],
) -> Result<f64> {
    let mut old_spec = old_spectrum.to_vec();
    let mut new_spec: Vec<C64> = qep_eigensolve(poly_new)?.iter().map(|p| p.value).collect();
    remove_closest(&mut old_spec, replaced);
    remove_closest(&mut new_spec, replacements);
    Ok(multiset_match_max_distance(&old_spec, &new_spec))
}

fn remove_closest(pool: &mut Vec<C64>, values: &[C64]) {
    for v in values {
        if pool.is_empty() {
            return;
        }
        let mut best = 0usize;
        let mut bd = f64::INFINITY;
        for (k, z) in pool.iter().enumerate() {
            let d = (z - v).norm();
            if d < bd {
                bd = d;
                best = k;
            }
        }
        pool.remove(best);
    }
}

/// Build a request by selecting measured eigenpairs from the oracle.
///
/// `from` lists the eigenvalues to replace (all members of each pairing
/// group must be listed); `to` lists the replacements. The `from` values are
/// first snapped to the oracle spectrum (within 1e-4 relative), so
/// low-precision measured values work; classification happens afterwards on
/// the full-precision eigenvalues.
pub fn request_from_replacement(
    poly: &PalindromicPolynomial,
    from: &[C64],
    to: &[C64],
    seed: u64,
    phi_choice: PhiChoice,
) -> Result<EmbeddingRequest> {
    let flavor = poly.flavor;
    if from.len() != to.len() {
        return Err(PqepError::InvariantViolation(format!(
            "{} eigenvalues replaced by {}",
            from.len(),
            to.len()
        )));
    }
    let pairs = qep_eigensolve(poly)?;
    // snap the requested values to actual eigenvalues before classifying
    let mut snapped = Vec::with_capacity(from.len());
    {
        let mut taken = vec![false; pairs.len()];
        for target in from {
            let mut best = usize::MAX;
            let mut bd = f64::INFINITY;
            for (k, pr) in pairs.iter().enumerate() {
                if taken[k] {
                    continue;
                }
                let d = (pr.value - target).norm() / target.norm().max(1.0);
                if d < bd {
                    bd = d;
                    best = k;
                }
            }
            if best == usize::MAX || bd > 1e-4 {
                return Err(PqepError::NotEigenpairs {
                    residual: bd,
                    limit: 1e-4,
                });
            }
            taken[best] = true;
            snapped.push(pairs[best].value);
        }
    }
    let from_spec = crate::spectrum::classify_spectrum(&snapped, flavor, 1e-6)?;
    let to_spec = crate::spectrum::classify_spectrum(to, flavor, crate::TOL_PAIR)?;
    let mut used = vec![false; pairs.len()];
    let mut find = |target: C64| -> Result<usize> {
        let mut best = usize::MAX;
        let mut bd = f64::INFINITY;
        for (k, pr) in pairs.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = (pr.value - target).norm() / target.norm().max(1.0);
            if d < bd {
                bd = d;
                best = k;
            }
        }
        if best == usize::MAX || bd > 1e-5 {
            return Err(PqepError::NotEigenpairs {
                residual: bd,
                limit: 1e-5,
            });
        }
        used[best] = true;
        Ok(best)
    };
    let n = poly.dim();
    let mut x_cols: Vec<CMat> = Vec::new();
    let mut l_blocks = Vec::new();
    for g in &from_spec.groups {
        if g.algebraic_multiplicity != 1 {
            return Err(PqepError::InvariantViolation(
                "replaced eigenvalues must be simple".into(),
            ));
        }
        let rep = g.representative;
        match g.category {
            crate::spectrum::GroupCategory::TQuadruple => {
                for lam in [rep, rep.inv()] {
                    let k = find(lam)?;
                    let v = &pairs[k].vector;
                    let mut cols = zeros(n, 2);
                    let r2 = 2.0_f64.sqrt();
                    for i in 0..n {
                        cols[[i, 0]] = re(r2 * v[i].re);
                        cols[[i, 1]] = re(r2 * v[i].im);
                    }
                    x_cols.push(cols);
                    l_blocks.push(rotation_block(lam));
                }
            }
            crate::spectrum::GroupCategory::TUnimodularPair => {
                let k = find(rep)?;
                let v = &pairs[k].vector;
                let mut cols = zeros(n, 2);
                let r2 = 2.0_f64.sqrt();
                for i in 0..n {
                    cols[[i, 0]] = re(r2 * v[i].re);
                    cols[[i, 1]] = re(r2 * v[i].im);
                }
                x_cols.push(cols);
                l_blocks.push(rotation_block(rep));
            }
            crate::spectrum::GroupCategory::TRealPair => {
                for lam in [rep, rep.inv()] {
                    let k = find(lam)?;
                    let v = &pairs[k].vector;
                    let mut col = zeros(n, 1);
                    for i in 0..n {
                        col[[i, 0]] = re(v[i].re);
                    }
                    x_cols.push(col);
                    let mut b = zeros(1, 1);
                    b[[0, 0]] = lam;
                    l_blocks.push(b);
                }
            }
            crate::spectrum::GroupCategory::HPair => {
                for lam in [rep, rep.conj().inv()] {
                    let k = find(lam)?;
                    let mut col = zeros(n, 1);
                    for i in 0..n {
                        col[[i, 0]] = pairs[k].vector[i];
                    }
                    x_cols.push(col);
                    let mut b = zeros(1, 1);
                    b[[0, 0]] = lam;
                    l_blocks.push(b);
                }
            }
            crate::spectrum::GroupCategory::HUnimodular => {
                let k = find(rep)?;
                let mut col = zeros(n, 1);
                for i in 0..n {
                    col[[i, 0]] = pairs[k].vector[i];
                }
                x_cols.push(col);
                let mut b = zeros(1, 1);
                b[[0, 0]] = rep;
                l_blocks.push(b);
            }
            crate::spectrum::GroupCategory::TUnit => {
                return Err(PqepError::UnimodularUnsupported(
                    "eigenvalues +1/-1 cannot be replaced (the replacement would \
                     have to contain them again)"
                        .into(),
                ));
            }
        }
    }
    let x1 = x_cols
        .iter()
        .skip(1)
        .fold(x_cols[0].clone(), |acc, c| crate::mat::hstack(&acc, c));
    let lambda1 = block_diag(&l_blocks);
    let lambda1_new = crate::spectrum::build_spectral_matrix(&to_spec, flavor)?;
    Ok(EmbeddingRequest {
        poly: poly.clone(),
        x1,
        lambda1,
        lambda1_new,
        seed,
        phi_choice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::canonical_matrix;
    use crate::oracle::random_palindromic;

    fn c(re_: f64, im_: f64) -> C64 {
        C64::new(re_, im_)
    }

    #[test]
    fn phi_tilde_identities() {
        for fl in Flavor::ALL {
            for q in [1usize, 2, 3] {
                let phit = solve_phi_tilde(fl, q, 42, PhiChoice::RandomStructured);
                let r = canonical_matrix(q, &[], fl);
                let d1 = frob(&(&phit.dot(&r).dot(&star_of(&phit, fl.star)) - &r));
                let d2 = frob(&(&star_of(&phit, fl.star).dot(&phit) - &eye(2 * q)));
                assert!(d1 <= 1e-12 && d2 <= 1e-12, "{fl} q={q}: {d1:.2e} {d2:.2e}");
                // block structure [[P1, P2], [-eps P2, P1]]
                for i in 0..q {
                    for j in 0..q {
                        let p1 = phit[[i, j]];
                        let p1b = phit[[q + i, q + j]];
                        let p2 = phit[[i, q + j]];
                        let p2b = phit[[q + i, j]];
                        assert!((p1 - p1b).norm() < 1e-12);
                        assert!((p2b + re(fl.eps()) * p2).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn phi_tilde_rotation_for_q1() {
        // T-palindromic q = 1: [[cos, sin], [-sin, cos]]
        let phit = solve_phi_tilde(Flavor::T_PALINDROMIC, 1, 7, PhiChoice::RandomStructured);
        let c_ = phit[[0, 0]].re;
        let s_ = phit[[0, 1]].re;
        assert!((c_ * c_ + s_ * s_ - 1.0).abs() < 1e-12);
        assert!((phit[[1, 0]].re + s_).abs() < 1e-12);
        assert!((phit[[1, 1]].re - c_).abs() < 1e-12);
    }

    #[test]
    fn decoupling_on_oracle_split() {
        let poly = random_palindromic(4, Flavor::T_PALINDROMIC, 21);
        let req = {
            let pairs = qep_eigensolve(&poly).unwrap();
            // pick one real reciprocal pair to "replace" (just for splitting)
            let vals: Vec<C64> = pairs.iter().map(|p| p.value).collect();
            let real_out = vals
                .iter()
                .find(|z| z.im.abs() < 1e-8 && z.norm() > 1.0)
                .copied();
            real_out.map(|lam| {
                request_from_replacement(
                    &poly,
                    &[lam, lam.inv()],
                    &[c(3.0, 0.0), c(1.0 / 3.0, 0.0)],
                    0,
                    PhiChoice::Identity,
                )
                .unwrap()
            })
        };
        let Some(req) = req else { return };
        // split: X2/L2 from the complement via the oracle
        let pairs = qep_eigensolve(&poly).unwrap();
        let p = req.lambda1.nrows();
        let replaced: Vec<C64> = (0..p).map(|k| req.lambda1[[k, k]]).collect();
        let mut x2_cols = Vec::new();
        let mut l2_diag = Vec::new();
        for pr in &pairs {
            if replaced.iter().any(|r| (pr.value - r).norm() < 1e-6) {
                continue;
            }
            let mut col = zeros(4, 1);
            for i in 0..4 {
                col[[i, 0]] = pr.vector[i];
            }
            x2_cols.push(col);
            l2_diag.push(pr.value);
        }
        let x2 = x2_cols
            .iter()
            .skip(1)
            .fold(x2_cols[0].clone(), |acc, cc| crate::mat::hstack(&acc, cc));
        let mut l2 = zeros(l2_diag.len(), l2_diag.len());
        for (k, v) in l2_diag.iter().enumerate() {
            l2[[k, k]] = *v;
        }
        let d = check_decoupling(&poly, &req.x1, &req.lambda1, &x2, &l2).unwrap();
        let scale = (frob(poly.a()) + frob(poly.q())) * frob(&req.x1) * frob(&x2);
        assert!(
            d <= 1e-9 * scale.max(1.0),
            "decoupling {d:.3e} vs scale {scale:.3e}"
        );
        // deliberately broken: replace an X1 column by an X2 column
        let mut x1_bad = req.x1.clone();
        for i in 0..4 {
            x1_bad[[i, 0]] = x2[[i, 0]];
        }
        let d_bad = check_decoupling(&poly, &x1_bad, &req.lambda1, &x2, &l2).unwrap();
        assert!(
            d_bad > 1e-3 * scale.max(1.0),
            "broken decoupling {d_bad:.3e}"
        );
        // empty split is zero by convention
        let empty = zeros(4, 0);
        let e = check_decoupling(&poly, &empty, &zeros(0, 0), &x2, &l2).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn embed_rejects_overlap() {
        let poly = random_palindromic(3, Flavor::H_PALINDROMIC, 3);
        let pairs = qep_eigensolve(&poly).unwrap();
        let lam = pairs
            .iter()
            .map(|p| p.value)
            .find(|z| (z.norm() - 1.0).abs() > 0.1)
            .unwrap();
        let pairvals = [lam, lam.conj().inv()];
        let err = request_from_replacement(&poly, &pairvals, &pairvals, 0, PhiChoice::Identity)
            .map(|req| embed(&req))
            .and_then(|r| r);
        assert!(
            matches!(err, Err(PqepError::InvariantViolation(_))),
            "{err:?}"
        );
    }

    #[test]
    fn gamma1_equals_full_gamma_when_p_is_2n() {
        let poly = PalindromicPolynomial::new(
            Flavor::T_PALINDROMIC,
            from_real_rows(1, 1, &[2.0 / 3.0]),
            from_real_rows(1, 1, &[-5.0 / 3.0]),
        )
        .unwrap();
        let x1 = from_real_rows(1, 2, &[1.0, 1.0]);
        let l1 = from_real_rows(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let g1 = extract_gamma1(&poly, &x1, &l1).unwrap();
        let pair = crate::poly::StandardPair::new(x1, l1).unwrap();
        let full = crate::gamma::compute_gamma(&poly, &pair).unwrap();
        assert!(frob(&(&g1 - &full.gamma)) < 1e-12);
    }
}
