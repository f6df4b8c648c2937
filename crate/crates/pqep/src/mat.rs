//! Dense complex matrix plumbing on top of `ndarray`.
//!
//! Everything in the library works on `Array2<Complex64>` in row-major
//! layout. Transpose flavors carry real data as complex values with exactly
//! zero imaginary parts; sums and products of such values stay exactly real,
//! so realness is preserved structurally along the construction paths.

use crate::error::{PqepError, Result};
use crate::flavor::{Flavor, Star};
use ndarray::{s, Array1, Array2, Axis};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

/// Complex zero.
pub const ZERO: C64 = C64::new(0.0, 0.0);
/// Complex one.
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Real scalar lifted to a complex value.
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// n x n identity.
pub fn eye(n: usize) -> CMat {
    Array2::eye(n)
}

/// m x n zero matrix.
pub fn zeros(m: usize, n: usize) -> CMat {
    Array2::from_elem((m, n), ZERO)
}

/// The flavor's adjoint: transpose or conjugate transpose.
pub fn star_of(m: &CMat, star: Star) -> CMat {
    match star {
        Star::Transpose => m.t().to_owned(),
        Star::ConjugateTranspose => m.t().mapv(|z| z.conj()),
    }
}

/// Frobenius norm.
pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Stack two matrices vertically.
pub fn vstack(a: &CMat, b: &CMat) -> CMat {
    ndarray::concatenate(Axis(0), &[a.view(), b.view()]).expect("conformal vstack")
}

/// Stack two matrices horizontally.
pub fn hstack(a: &CMat, b: &CMat) -> CMat {
    ndarray::concatenate(Axis(1), &[a.view(), b.view()]).expect("conformal hstack")
}

/// Assemble the 2x2 block matrix [[a, b], [c, d]].
pub fn block2x2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    vstack(&hstack(a, b), &hstack(c, d))
}

/// Block-diagonal assembly.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(n, m);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.slice_mut(s![r..r + b.nrows(), c..c + b.ncols()])
            .assign(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij != ZERO {
                let mut blk = out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
                blk.assign(&b.mapv(|z| z * aij));
            }
        }
    }
    out
}

/// True if all entries are finite.
pub fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest imaginary-part modulus, for realness checks.
pub fn max_imag(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Drop imaginary parts (used when a construction guarantees real output).
pub fn realify(m: &CMat) -> CMat {
    m.mapv(|z| C64::new(z.re, 0.0))
}

/// Build a complex matrix from real row-major data.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    Array2::from_shape_vec((rows, cols), data.iter().map(|&x| re(x)).collect()).unwrap()
}

/// Build a complex matrix from row-major (re, im) pairs.
pub fn from_complex_rows(rows: usize, cols: usize, data: &[(f64, f64)]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    Array2::from_shape_vec(
        (rows, cols),
        data.iter().map(|&(r, i)| C64::new(r, i)).collect(),
    )
    .unwrap()
}

/// Validate finiteness and, for transpose flavors, exact realness.
pub fn validate_for_flavor(m: &CMat, flavor: Flavor, what: &str) -> Result<()> {
    if !all_finite(m) {
        return Err(PqepError::InvalidMatrix(format!(
            "{what} has non-finite entries"
        )));
    }
    if flavor.is_real() && max_imag(m) != 0.0 {
        return Err(PqepError::InvalidMatrix(format!(
            "{what} must be real for {flavor} (max |Im| = {:.3e})",
            max_imag(m)
        )));
    }
    Ok(())
}

/// 2x2 real rotation block [[alpha, beta], [-beta, alpha]] for lambda = alpha + i beta.
pub fn rotation_block(lambda: C64) -> CMat {
    let (a, b) = (lambda.re, lambda.im);
    from_real_rows(2, 2, &[a, b, -b, a])
}
