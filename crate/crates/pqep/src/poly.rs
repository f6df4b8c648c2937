//! Palindromic quadratic polynomials and standard pairs.

use crate::error::{PqepError, Result};
use crate::flavor::Flavor;
use crate::linalg::inv_condition;
use crate::mat::{frob, max_imag, realify, star_of, validate_for_flavor, CMat};
use crate::{TOL_RANK, TOL_STRUCT};

/// A quadratic polynomial `lambda^2 A + lambda Q + eps A^*` with `Q^* = eps Q`
/// and A nonsingular.
#[derive(Debug, Clone)]
pub struct PalindromicPolynomial {
    pub flavor: Flavor,
    a: CMat,
    q: CMat,
}

impl PalindromicPolynomial {
    /// Validate and build. Q is symmetrized to make `Q^* = eps Q` exact;
    /// inputs violating the structure beyond `TOL_STRUCT` are rejected.
    pub fn new(flavor: Flavor, a: CMat, q: CMat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || q.nrows() != n || q.ncols() != n {
            return Err(PqepError::DimensionMismatch(format!(
                "A is {}x{}, Q is {}x{}",
                a.nrows(),
                a.ncols(),
                q.nrows(),
                q.ncols()
            )));
        }
        validate_for_flavor(&a, flavor, "A")?;
        if !crate::mat::all_finite(&q) {
            return Err(PqepError::InvalidMatrix("Q has non-finite entries".into()));
        }
        if flavor.is_real() && max_imag(&q) != 0.0 {
            return Err(PqepError::InvalidMatrix(format!(
                "Q must be real for {flavor}"
            )));
        }
        let qs = star_of(&q, flavor.star);
        let defect = frob(&(&qs - &q.mapv(|z| z * crate::mat::re(flavor.eps()))));
        if defect > TOL_STRUCT * frob(&q).max(1.0) {
            return Err(PqepError::StructureViolation(format!(
                "||Q^* - eps Q|| = {defect:.3e} for {flavor}"
            )));
        }
        let cond = inv_condition(&a);
        if cond <= TOL_RANK {
            return Err(PqepError::SingularA(cond));
        }
        // exact symmetrization
        let mut q = (&q + &qs.mapv(|z| z * crate::mat::re(flavor.eps()))).mapv(|z| z * 0.5);
        if flavor.is_real() {
            q = realify(&q);
        }
        Ok(PalindromicPolynomial { flavor, a, q })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn q(&self) -> &CMat {
        &self.q
    }

    /// The trailing coefficient `eps A^*`.
    pub fn a_star_eps(&self) -> CMat {
        star_of(&self.a, self.flavor.star).mapv(|z| z * crate::mat::re(self.flavor.eps()))
    }

    /// Evaluate P(lambda) densely.
    pub fn eval(&self, lambda: crate::mat::C64) -> CMat {
        let l2 = lambda * lambda;
        let mut out = self.a.mapv(|z| z * l2);
        out = &out + &self.q.mapv(|z| z * lambda);
        &out + &self.a_star_eps()
    }
}

/// A standard pair (X, J): X is n x 2n, J is 2n x 2n block diagonal, and the
/// stacked matrix [X; XJ] is nonsingular.
#[derive(Debug, Clone)]
pub struct StandardPair {
    pub x: CMat,
    pub j: CMat,
}

impl StandardPair {
    pub fn new(x: CMat, j: CMat) -> Result<Self> {
        let n = x.nrows();
        if x.ncols() != 2 * n || j.nrows() != 2 * n || j.ncols() != 2 * n {
            return Err(PqepError::DimensionMismatch(format!(
                "X is {}x{}, J is {}x{}",
                x.nrows(),
                x.ncols(),
                j.nrows(),
                j.ncols()
            )));
        }
        let pair = StandardPair { x, j };
        let cond = inv_condition(&pair.stacked());
        if cond <= TOL_RANK {
            return Err(PqepError::SingularAssembly(format!(
                "[X; XJ] numerically singular (sigma ratio {cond:.3e})"
            )));
        }
        if crate::linalg::lu(&pair.j).is_singular() {
            return Err(PqepError::SingularJ);
        }
        Ok(pair)
    }

    /// X_L = [X; XJ].
    pub fn stacked(&self) -> CMat {
        crate::mat::vstack(&self.x, &self.x.dot(&self.j))
    }

    /// Y_L = [X; X J^{-1}], derived on demand.
    pub fn stacked_inverse_side(&self) -> Result<CMat> {
        let jinv = crate::linalg::inv(&self.j).map_err(|_| PqepError::SingularJ)?;
        Ok(crate::mat::vstack(&self.x, &self.x.dot(&jinv)))
    }
}

/// Frobenius norm of `A X J^2 + Q X J + eps A^* X`.
pub fn residual(poly: &PalindromicPolynomial, x: &CMat, j: &CMat) -> Result<f64> {
    let n = poly.dim();
    if x.nrows() != n || x.ncols() != j.nrows() || j.nrows() != j.ncols() {
        return Err(PqepError::DimensionMismatch(format!(
            "X is {}x{}, J is {}x{}",
            x.nrows(),
            x.ncols(),
            j.nrows(),
            j.ncols()
        )));
    }
    let xj = x.dot(j);
    let xj2 = xj.dot(j);
    let r = &poly.a().dot(&xj2) + &poly.q().dot(&xj) + &poly.a_star_eps().dot(x);
    Ok(frob(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{from_real_rows, zeros};

    fn scalar_poly() -> PalindromicPolynomial {
        PalindromicPolynomial::new(
            Flavor::T_PALINDROMIC,
            from_real_rows(1, 1, &[2.0 / 3.0]),
            from_real_rows(1, 1, &[-5.0 / 3.0]),
        )
        .unwrap()
    }

    #[test]
    fn scalar_residual_vanishes_on_roots() {
        // roots of (2/3) l^2 - (5/3) l + 2/3 are 2 and 1/2
        let poly = scalar_poly();
        let x = from_real_rows(1, 2, &[1.0, 1.0]);
        let j = from_real_rows(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        assert!(residual(&poly, &x, &j).unwrap() < 1e-15);
    }

    #[test]
    fn zero_x_gives_zero_residual() {
        let poly = scalar_poly();
        let x = zeros(1, 2);
        let j = from_real_rows(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        assert_eq!(residual(&poly, &x, &j).unwrap(), 0.0);
    }

    #[test]
    fn residual_is_absolutely_homogeneous() {
        let poly = scalar_poly();
        let x = from_real_rows(1, 2, &[1.0, 2.0]);
        let j = from_real_rows(2, 2, &[2.0, 0.0, 1.0, 0.5]);
        let r1 = residual(&poly, &x, &j).unwrap();
        let c = 3.5;
        let scaled = PalindromicPolynomial::new(
            poly.flavor,
            poly.a().mapv(|z| z * c),
            poly.q().mapv(|z| z * c),
        )
        .unwrap();
        let r2 = residual(&scaled, &x, &j).unwrap();
        assert!((r2 - c * r1).abs() <= 1e-13 * r2.max(1.0));
    }

    #[test]
    fn nonsymmetric_q_rejected() {
        let a = from_real_rows(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let q = from_real_rows(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let err = PalindromicPolynomial::new(Flavor::T_PALINDROMIC, a, q).unwrap_err();
        assert!(matches!(err, PqepError::StructureViolation(_)));
    }

    #[test]
    fn singular_a_rejected() {
        let a = from_real_rows(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let q = from_real_rows(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let err = PalindromicPolynomial::new(Flavor::T_PALINDROMIC, a, q).unwrap_err();
        assert!(matches!(err, PqepError::SingularA(_)));
    }

    #[test]
    fn t_anti_skew_q_has_zero_diagonal() {
        let a = from_real_rows(2, 2, &[1.0, 0.2, 0.1, 1.0]);
        let q = from_real_rows(2, 2, &[0.0, 1.5, -1.5, 0.0]);
        let p = PalindromicPolynomial::new(Flavor::T_ANTI_PALINDROMIC, a, q).unwrap();
        assert_eq!(p.q()[[0, 0]], crate::mat::ZERO);
        assert_eq!(p.q()[[1, 1]], crate::mat::ZERO);
    }
}
