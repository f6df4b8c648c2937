//! Shared reference fixtures for the embedding tests: polynomials with
//! known-good updated coefficients, recorded at four-decimal precision.

#![allow(dead_code)]

use pqep::flavor::Flavor;
use pqep::mat::{from_complex_rows, from_real_rows, CMat};
use pqep::poly::PalindromicPolynomial;

pub struct EepFixture {
    pub flavor: Flavor,
    pub poly: PalindromicPolynomial,
    /// Replacement eigenvalues (re, im).
    pub to: Vec<(f64, f64)>,
    /// Printed updated coefficients.
    pub a_new: CMat,
    pub q_new: CMat,
}

/// T-palindromic 4x4: replace the four real eigenvalues by the quadruple of
/// -1 + 2i.
pub fn eep_t_palindromic() -> EepFixture {
    let a = from_real_rows(
        4,
        4,
        &[
            0.8147, 0.6324, 0.9575, 0.9572, //
            0.9058, 0.0975, 0.9649, 0.4854, //
            0.1270, 0.2785, 0.1576, 0.8003, //
            0.9134, 0.5469, 0.9706, 0.1419,
        ],
    );
    let q = from_real_rows(
        4,
        4,
        &[
            1.8435, 1.5715, 1.4709, 1.6150, //
            1.5715, -0.0714, 1.6069, 1.1052, //
            1.4709, 1.6069, 1.4863, 1.0983, //
            1.6150, 1.1052, 1.0983, 0.0637,
        ],
    );
    let a_new = from_real_rows(
        4,
        4,
        &[
            0.2835, 0.3007, 0.0808, 0.7761, //
            0.2886, 0.2748, 0.2803, -0.1003, //
            0.3205, 0.3777, 0.0966, 0.6529, //
            0.6080, -0.1364, 0.4769, 0.5826,
        ],
    );
    let q_new = from_real_rows(
        4,
        4,
        &[
            0.7773, 0.4984, 0.6229, 1.3387, //
            0.4984, 0.5087, 0.4176, -0.2612, //
            0.6229, 0.4176, 0.4187, 1.2751, //
            1.3387, -0.2612, 1.2751, 0.9606,
        ],
    );
    let lam = pqep::mat::C64::new(-1.0, 2.0);
    let li = lam.inv();
    EepFixture {
        flavor: Flavor::T_PALINDROMIC,
        poly: PalindromicPolynomial::new(Flavor::T_PALINDROMIC, a, q).unwrap(),
        to: vec![
            (lam.re, lam.im),
            (lam.re, -lam.im),
            (li.re, li.im),
            (li.re, -li.im),
        ],
        a_new,
        q_new,
    }
}

/// T-anti-palindromic 4x4: replace the quadruple of 2.7401 + 4.1215i by the
/// quadruple of -1 + 2i.
pub fn eep_t_anti_4x4() -> EepFixture {
    let a = from_real_rows(
        4,
        4,
        &[
            1.8147, 0.6324, 0.9575, 0.9572, //
            0.9058, 0.0975, 0.9649, 0.4854, //
            0.1270, 0.2785, 0.1576, 0.8003, //
            0.9134, 0.5469, 1.9706, 0.1419,
        ],
    );
    let q = from_real_rows(
        4,
        4,
        &[
            0.0, -1.2734, 0.8305, 3.0438, //
            1.2734, 0.0, 1.6864, -2.0615, //
            -0.8305, -1.6864, 0.0, -1.1703, //
            -3.0438, 2.0615, 1.1703, 0.0,
        ],
    );
    let a_new = from_real_rows(
        4,
        4,
        &[
            0.8667, 0.7079, 0.6565, 3.0845, //
            1.1951, -0.4333, 1.3354, -0.4795, //
            -0.7730, -0.3868, -0.1891, 1.2210, //
            1.8452, 0.8306, 2.8074, -0.5746,
        ],
    );
    let q_new = from_real_rows(
        4,
        4,
        &[
            0.0, -1.8705, 1.3098, 3.5725, //
            1.8705, 0.0, 2.7873, -3.2578, //
            -1.3098, -2.7873, 0.0, -2.0273, //
            -3.5725, 3.2578, 2.0273, 0.0,
        ],
    );
    let lam = pqep::mat::C64::new(-1.0, 2.0);
    let li = lam.inv();
    EepFixture {
        flavor: Flavor::T_ANTI_PALINDROMIC,
        poly: PalindromicPolynomial::new(Flavor::T_ANTI_PALINDROMIC, a, q).unwrap(),
        to: vec![
            (lam.re, lam.im),
            (lam.re, -lam.im),
            (li.re, li.im),
            (li.re, -li.im),
        ],
        a_new,
        q_new,
    }
}

/// T-anti-palindromic 3x3: replace the unimodular pair -0.5891 +- 0.8081i by
/// -0.6 +- 0.8i.
pub fn eep_t_anti_3x3() -> EepFixture {
    let a = from_real_rows(
        3,
        3,
        &[
            0.2511, 0.3517, 0.5497, //
            0.6160, 0.8308, 0.9172, //
            0.4733, 0.5853, 0.2858,
        ],
    );
    let q = from_real_rows(
        3,
        3,
        &[
            0.0, -0.1859, 0.1504, //
            0.1859, 0.0, 0.7252, //
            -0.1504, -0.7252, 0.0,
        ],
    );
    let a_new = from_real_rows(
        3,
        3,
        &[
            0.2502, 0.3507, 0.5520, //
            0.6156, 0.8309, 0.9244, //
            0.4746, 0.5876, 0.2930,
        ],
    );
    let q_new = from_real_rows(
        3,
        3,
        &[
            0.0, -0.1874, 0.1505, //
            0.1874, 0.0, 0.7253, //
            -0.1505, -0.7253, 0.0,
        ],
    );
    EepFixture {
        flavor: Flavor::T_ANTI_PALINDROMIC,
        poly: PalindromicPolynomial::new(Flavor::T_ANTI_PALINDROMIC, a, q).unwrap(),
        to: vec![(-0.6, 0.8), (-0.6, -0.8)],
        a_new,
        q_new,
    }
}

/// H-palindromic 3x3: replace {1.4953 - 3.3887i, 0.1090 - 0.2470i} by
/// {-3 + 4i, 1/(-3 - 4i)}.
pub fn eep_h_palindromic() -> EepFixture {
    let a = from_complex_rows(
        3,
        3,
        &[
            (0.4218, 0.7577),
            (0.9595, 0.6555),
            (0.8491, 0.0318), //
            (0.9157, 0.7431),
            (0.6557, 0.1712),
            (0.9340, 0.2769), //
            (0.7922, 0.3922),
            (0.0357, 0.7060),
            (0.6787, 0.0462),
        ],
    );
    let q = from_complex_rows(
        3,
        3,
        &[
            (0.1943, 0.0),
            (1.1406, 0.2587),
            (1.1336, 0.2649), //
            (1.1406, -0.2587),
            (1.9004, 0.0),
            (0.4160, -0.4333), //
            (1.1336, -0.2649),
            (0.4160, 0.4333),
            (1.5310, 0.0),
        ],
    );
    let a_new = from_complex_rows(
        3,
        3,
        &[
            (-7.3203, 0.1876),
            (0.1303, 2.1294),
            (3.2785, 7.0618), //
            (4.1611, -1.0484),
            (0.5150, -0.2911),
            (-1.5734, -2.3416), //
            (-1.3545, 0.0932),
            (0.2321, 1.0792),
            (0.5759, 1.8504),
        ],
    );
    let q_new = from_complex_rows(
        3,
        3,
        &[
            (-15.8294, 0.0),
            (4.5402, 3.9245),
            (0.6462, 5.7786), //
            (4.5402, -3.9245),
            (-1.2371, 0.0),
            (1.2954, -0.4690), //
            (0.6462, -5.7786),
            (1.2954, 0.4690),
            (-6.1958, 0.0),
        ],
    );
    let lam = pqep::mat::C64::new(-3.0, 4.0);
    let partner = lam.conj().inv();
    EepFixture {
        flavor: Flavor::H_PALINDROMIC,
        poly: PalindromicPolynomial::new(Flavor::H_PALINDROMIC, a, q).unwrap(),
        to: vec![(lam.re, lam.im), (partner.re, partner.im)],
        a_new,
        q_new,
    }
}

/// The eight prescribed eigenvalues of the T-flavor inverse problem example.
pub fn qiep_t_eigenvalues() -> Vec<pqep::mat::C64> {
    let lam = pqep::mat::C64::new(-1.0, 2.0);
    vec![
        lam,
        lam.conj(),
        lam.inv(),
        lam.conj().inv(),
        pqep::mat::C64::new(-4.0, 0.0),
        pqep::mat::C64::new(-0.25, 0.0),
        pqep::mat::C64::new(-5.0, 0.0),
        pqep::mat::C64::new(-0.2, 0.0),
    ]
}

/// The eight prescribed eigenvalues of the H-flavor inverse problem example.
pub fn qiep_h_eigenvalues() -> Vec<pqep::mat::C64> {
    let reps = [
        pqep::mat::C64::new(-1.0, 2.0),
        pqep::mat::C64::new(-3.0, -5.0),
        pqep::mat::C64::new(-4.0, 3.0),
        pqep::mat::C64::new(-0.2, 3.0),
    ];
    let mut out = Vec::new();
    for r in reps {
        out.push(r);
        out.push(r.conj().inv());
    }
    out
}
