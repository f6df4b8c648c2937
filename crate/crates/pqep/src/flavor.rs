//! The four palindromic structures.
//!
//! A quadratic matrix polynomial `P(lambda) = lambda^2 A + lambda Q + eps A^*`
//! with `Q^* = eps Q` comes in four flavors, selected by the adjoint `*`
//! (transpose or conjugate transpose) and the sign `eps`. Transpose flavors
//! live over the reals, conjugate-transpose flavors over the complexes.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Which adjoint the structure uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Star {
    /// Plain transpose; coefficient matrices are real.
    Transpose,
    /// Conjugate transpose; coefficient matrices are complex.
    ConjugateTranspose,
}

/// One of the four palindromic structures `(star, eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flavor {
    pub star: Star,
    /// +1 for palindromic, -1 for anti-palindromic.
    pub epsilon: i8,
}

impl Flavor {
    pub const T_PALINDROMIC: Flavor = Flavor {
        star: Star::Transpose,
        epsilon: 1,
    };
    pub const T_ANTI_PALINDROMIC: Flavor = Flavor {
        star: Star::Transpose,
        epsilon: -1,
    };
    pub const H_PALINDROMIC: Flavor = Flavor {
        star: Star::ConjugateTranspose,
        epsilon: 1,
    };
    pub const H_ANTI_PALINDROMIC: Flavor = Flavor {
        star: Star::ConjugateTranspose,
        epsilon: -1,
    };

    /// All four flavors, in a fixed order.
    pub const ALL: [Flavor; 4] = [
        Self::T_PALINDROMIC,
        Self::T_ANTI_PALINDROMIC,
        Self::H_PALINDROMIC,
        Self::H_ANTI_PALINDROMIC,
    ];

    /// True for the transpose flavors, whose base field is real.
    pub fn is_real(&self) -> bool {
        self.star == Star::Transpose
    }

    /// eps as a floating-point scalar.
    pub fn eps(&self) -> f64 {
        f64::from(self.epsilon)
    }

    /// Short code used in files and flags: `T+`, `T-`, `H+`, `H-`.
    pub fn code(&self) -> &'static str {
        match (self.star, self.epsilon) {
            (Star::Transpose, 1) => "T+",
            (Star::Transpose, _) => "T-",
            (Star::ConjugateTranspose, 1) => "H+",
            (Star::ConjugateTranspose, _) => "H-",
        }
    }

    /// Parse a flavor code.
    pub fn from_code(code: &str) -> Option<Flavor> {
        match code {
            "T+" => Some(Self::T_PALINDROMIC),
            "T-" => Some(Self::T_ANTI_PALINDROMIC),
            "H+" => Some(Self::H_PALINDROMIC),
            "H-" => Some(Self::H_ANTI_PALINDROMIC),
            _ => None,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match (self.star, self.epsilon) {
            (Star::Transpose, 1) => "T-palindromic",
            (Star::Transpose, _) => "T-anti-palindromic",
            (Star::ConjugateTranspose, 1) => "H-palindromic",
            (Star::ConjugateTranspose, _) => "H-anti-palindromic",
        };
        f.write_str(name)
    }
}
