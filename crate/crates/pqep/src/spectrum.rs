//! Classification of spectra into the flavor's pairing categories, and the
//! block-diagonal spectral matrix built from a classified spectrum.
//!
//! Palindromic spectra are closed under `lambda -> 1/lambda^*`: reciprocal
//! pairs for transpose flavors (plus conjugation closure over the reals,
//! giving quadruples), conjugate-reciprocal pairs for the Hermitian flavors.
//! Modulus-one eigenvalues are fixed points of the pairing map and form their
//! own categories.

use crate::error::{PqepError, Result};
use crate::flavor::Flavor;
use crate::mat::{block_diag, from_real_rows, re, rotation_block, CMat, C64};
use crate::{TOL_PAIR, TOL_UNIMODULAR};

/// Pairing category of one group of eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupCategory {
    /// (lambda, conj, 1/lambda, 1/conj) with |lambda| != 1, lambda not real.
    TQuadruple,
    /// (lambda, conj) with |lambda| = 1, lambda not real.
    TUnimodularPair,
    /// (lambda, 1/lambda) real with lambda^2 != 1.
    TRealPair,
    /// +1 or -1 with some multiplicity.
    TUnit,
    /// (lambda, 1/conj(lambda)) with |lambda| != 1.
    HPair,
    /// lambda with |lambda| = 1 (self-paired).
    HUnimodular,
}

impl GroupCategory {
    fn order_key(self) -> u8 {
        match self {
            GroupCategory::TQuadruple => 0,
            GroupCategory::TUnimodularPair => 1,
            GroupCategory::TRealPair => 2,
            GroupCategory::TUnit => 3,
            GroupCategory::HPair => 0,
            GroupCategory::HUnimodular => 1,
        }
    }

    /// Total eigenvalue count contributed per unit of algebraic multiplicity.
    pub fn span(self) -> usize {
        match self {
            GroupCategory::TQuadruple => 4,
            GroupCategory::TUnimodularPair | GroupCategory::TRealPair | GroupCategory::HPair => 2,
            GroupCategory::TUnit | GroupCategory::HUnimodular => 1,
        }
    }
}

/// One pairing group: a representative, its multiplicity, and the Jordan
/// block sizes of the representative.
#[derive(Debug, Clone)]
pub struct EigGroup {
    pub category: GroupCategory,
    pub representative: C64,
    pub algebraic_multiplicity: usize,
    /// Jordan block sizes; all ones for semi-simple groups.
    pub partial_multiplicities: Vec<usize>,
}

impl EigGroup {
    pub fn simple(category: GroupCategory, representative: C64) -> Self {
        EigGroup {
            category,
            representative,
            algebraic_multiplicity: 1,
            partial_multiplicities: vec![1],
        }
    }

    pub fn is_semisimple(&self) -> bool {
        self.partial_multiplicities.iter().all(|&p| p == 1)
    }

    /// Number of rows/columns this group occupies in the spectral matrix.
    pub fn dim(&self) -> usize {
        self.category.span() * self.algebraic_multiplicity
    }
}

/// A classified spectrum: groups in canonical order, covering 2n eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectrumSpec {
    pub groups: Vec<EigGroup>,
    pub total_size: usize,
}

impl SpectrumSpec {
    pub fn is_semisimple(&self) -> bool {
        self.groups.iter().all(|g| g.is_semisimple())
    }

    /// The eigenvalue multiset the spec denotes, flattened in group order.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.total_size);
        for g in &self.groups {
            let lam = g.representative;
            for _ in 0..g.algebraic_multiplicity {
                match g.category {
                    GroupCategory::TQuadruple => {
                        out.push(lam);
                        out.push(lam.conj());
                        out.push(lam.inv());
                        out.push(lam.conj().inv());
                    }
                    GroupCategory::TUnimodularPair => {
                        out.push(lam);
                        out.push(lam.conj());
                    }
                    GroupCategory::TRealPair => {
                        out.push(lam);
                        out.push(lam.inv());
                    }
                    GroupCategory::HPair => {
                        out.push(lam);
                        out.push(lam.conj().inv());
                    }
                    GroupCategory::TUnit | GroupCategory::HUnimodular => out.push(lam),
                }
            }
        }
        out
    }
}

/// Greedy nearest-neighbor matching of two equal-size eigenvalue multisets;
/// returns the largest relative distance over the matching, or infinity when
/// the sizes differ. Deterministic: the first list is walked in lexicographic
/// (re, im) order.
pub fn multiset_match_max_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut left: Vec<C64> = a.to_vec();
    left.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for w in &left {
        let mut best = f64::INFINITY;
        let mut best_k = usize::MAX;
        for (k, g) in b.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = (w - g).norm() / w.norm().max(1.0);
            if d < best {
                best = d;
                best_k = k;
            }
        }
        used[best_k] = true;
        worst = worst.max(best);
    }
    worst
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Cluster a flat eigenvalue list into (value, multiplicity) pairs.
fn cluster(eigs: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let mut sorted: Vec<C64> = eigs.to_vec();
    sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut out: Vec<(C64, usize)> = Vec::new();
    'next: for &z in &sorted {
        for (c, m) in out.iter_mut() {
            if close(*c, z, tol) {
                *m += 1;
                continue 'next;
            }
        }
        out.push((z, 1));
    }
    out
}

/// Classify an eigenvalue multiset into the flavor's pairing groups.
///
/// Verifies closure under `lambda -> 1/lambda^*` (and conjugation for
/// transpose flavors) by greedy matching within `tol_pair`, and the parity
/// rules for +1/-1 multiplicities.
pub fn classify_spectrum(eigs: &[C64], flavor: Flavor, tol_pair: f64) -> Result<SpectrumSpec> {
    if eigs.is_empty() {
        return Err(PqepError::DimensionMismatch("empty eigenvalue list".into()));
    }
    for &z in eigs {
        if z.norm() <= tol_pair {
            return Err(PqepError::ZeroEigenvalue(z.norm()));
        }
    }
    let total = eigs.len();
    let mut clusters = cluster(eigs, tol_pair);
    let mut groups: Vec<EigGroup> = Vec::new();
    let tolu = TOL_UNIMODULAR;

    let take = |value: C64, clusters: &mut Vec<(C64, usize)>| -> Option<usize> {
        for k in 0..clusters.len() {
            if close(
                clusters[k].0,
                value,
                tol_pair.max(1e-6 * value.norm().max(1.0)),
            ) {
                let m = clusters[k].1;
                clusters.remove(k);
                return Some(m);
            }
        }
        None
    };

    while let Some(&(lam, mult)) = clusters.first() {
        if flavor.is_real() {
            // snap real-axis noise
            let lam = if lam.im.abs() <= tol_pair * lam.norm().max(1.0) {
                C64::new(lam.re, 0.0)
            } else {
                lam
            };
            if lam.im == 0.0 {
                if (lam.re - 1.0).abs() <= tolu {
                    clusters.remove(0);
                    groups.push(EigGroup {
                        category: GroupCategory::TUnit,
                        representative: re(1.0),
                        algebraic_multiplicity: mult,
                        partial_multiplicities: vec![1; mult],
                    });
                } else if (lam.re + 1.0).abs() <= tolu {
                    clusters.remove(0);
                    groups.push(EigGroup {
                        category: GroupCategory::TUnit,
                        representative: re(-1.0),
                        algebraic_multiplicity: mult,
                        partial_multiplicities: vec![1; mult],
                    });
                } else {
                    clusters.remove(0);
                    let partner = lam.inv();
                    let pm = take(partner, &mut clusters).ok_or(PqepError::PairingViolation {
                        re: lam.re,
                        im: lam.im,
                    })?;
                    if pm != mult {
                        return Err(PqepError::PairingViolation {
                            re: lam.re,
                            im: lam.im,
                        });
                    }
                    let rep = if lam.norm() >= 1.0 { lam } else { partner };
                    groups.push(EigGroup {
                        category: GroupCategory::TRealPair,
                        representative: C64::new(rep.re, 0.0),
                        algebraic_multiplicity: mult,
                        partial_multiplicities: vec![1; mult],
                    });
                }
            } else {
                clusters.remove(0);
                // conjugate must be present with equal multiplicity
                let cm = take(lam.conj(), &mut clusters).ok_or(PqepError::PairingViolation {
                    re: lam.re,
                    im: lam.im,
                })?;
                if cm != mult {
                    return Err(PqepError::PairingViolation {
                        re: lam.re,
                        im: lam.im,
                    });
                }
                let rep_up = if lam.im > 0.0 { lam } else { lam.conj() };
                if (lam.norm() - 1.0).abs() <= tolu {
                    let unit = rep_up / rep_up.norm();
                    groups.push(EigGroup {
                        category: GroupCategory::TUnimodularPair,
                        representative: unit,
                        algebraic_multiplicity: mult,
                        partial_multiplicities: vec![1; mult],
                    });
                } else {
                    // reciprocal conjugate pair completes the quadruple
                    let rm =
                        take(rep_up.inv(), &mut clusters).ok_or(PqepError::PairingViolation {
                            re: lam.re,
                            im: lam.im,
                        })?;
                    let rcm = take(rep_up.conj().inv(), &mut clusters).ok_or(
                        PqepError::PairingViolation {
                            re: lam.re,
                            im: lam.im,
                        },
                    )?;
                    if rm != mult || rcm != mult {
                        return Err(PqepError::PairingViolation {
                            re: lam.re,
                            im: lam.im,
                        });
                    }
                    let rep = if rep_up.norm() >= 1.0 {
                        rep_up
                    } else {
                        rep_up.conj().inv()
                    };
                    groups.push(EigGroup {
                        category: GroupCategory::TQuadruple,
                        representative: rep,
                        algebraic_multiplicity: mult,
                        partial_multiplicities: vec![1; mult],
                    });
                }
            }
        } else {
            clusters.remove(0);
            if (lam.norm() - 1.0).abs() <= tolu {
                groups.push(EigGroup {
                    category: GroupCategory::HUnimodular,
                    representative: lam / lam.norm(),
                    algebraic_multiplicity: mult,
                    partial_multiplicities: vec![1; mult],
                });
            } else {
                let partner = lam.conj().inv();
                let pm = take(partner, &mut clusters).ok_or(PqepError::PairingViolation {
                    re: lam.re,
                    im: lam.im,
                })?;
                if pm != mult {
                    return Err(PqepError::PairingViolation {
                        re: lam.re,
                        im: lam.im,
                    });
                }
                let rep = if lam.norm() >= 1.0 { lam } else { partner };
                groups.push(EigGroup {
                    category: GroupCategory::HPair,
                    representative: rep,
                    algebraic_multiplicity: mult,
                    partial_multiplicities: vec![1; mult],
                });
            }
        }
    }

    // parity rules for +1/-1 under the transpose flavors
    if flavor.is_real() {
        let m_plus: usize = groups
            .iter()
            .filter(|g| g.category == GroupCategory::TUnit && g.representative.re > 0.0)
            .map(|g| g.algebraic_multiplicity)
            .sum();
        let m_minus: usize = groups
            .iter()
            .filter(|g| g.category == GroupCategory::TUnit && g.representative.re < 0.0)
            .map(|g| g.algebraic_multiplicity)
            .sum();
        if flavor.epsilon == 1 {
            if !m_plus.is_multiple_of(2) || !m_minus.is_multiple_of(2) {
                return Err(PqepError::ParityViolation(format!(
                    "T-palindromic needs even multiplicities at +1 and -1, got {m_plus} and {m_minus}"
                )));
            }
        } else if m_plus % 2 != m_minus % 2 {
            return Err(PqepError::ParityViolation(format!(
                "T-anti-palindromic needs multiplicities at +1 and -1 of equal parity, got {m_plus} and {m_minus}"
            )));
        }
    }

    // canonical ordering: category first, then representative (re, im)
    groups.sort_by(|a, b| {
        (
            a.category.order_key(),
            a.representative.re,
            a.representative.im,
        )
            .partial_cmp(&(
                b.category.order_key(),
                b.representative.re,
                b.representative.im,
            ))
            .unwrap()
    });

    Ok(SpectrumSpec {
        groups,
        total_size: total,
    })
}

/// Classify with the crate default pairing tolerance.
pub fn classify_default(eigs: &[C64], flavor: Flavor) -> Result<SpectrumSpec> {
    classify_spectrum(eigs, flavor, TOL_PAIR)
}

/// Block-diagonal spectral matrix J for a simple classified spectrum.
///
/// Transpose flavors get real 2x2 rotation blocks for conjugate pairs and
/// scalar entries for real eigenvalues; Hermitian flavors get a complex
/// diagonal ordered (lambda, 1/conj(lambda)) per pair.
pub fn build_spectral_matrix(spec: &SpectrumSpec, flavor: Flavor) -> Result<CMat> {
    let mut blocks: Vec<CMat> = Vec::new();
    for g in &spec.groups {
        if !g.is_semisimple() {
            return Err(PqepError::UnsupportedDefective(format!(
                "group at {} has a Jordan block of size > 1",
                g.representative
            )));
        }
        let lam = g.representative;
        for _ in 0..g.algebraic_multiplicity {
            match (g.category, flavor.is_real()) {
                (GroupCategory::TQuadruple, true) => {
                    blocks.push(rotation_block(lam));
                    blocks.push(rotation_block(lam.inv()));
                }
                (GroupCategory::TUnimodularPair, true) => blocks.push(rotation_block(lam)),
                (GroupCategory::TRealPair, true) => {
                    blocks.push(from_real_rows(2, 2, &[lam.re, 0.0, 0.0, 1.0 / lam.re]));
                }
                (GroupCategory::TUnit, true) => {
                    blocks.push(from_real_rows(1, 1, &[lam.re]));
                }
                (GroupCategory::HPair, false) => {
                    let mut b = crate::mat::zeros(2, 2);
                    b[[0, 0]] = lam;
                    b[[1, 1]] = lam.conj().inv();
                    blocks.push(b);
                }
                (GroupCategory::HUnimodular, false) => {
                    let mut b = crate::mat::zeros(1, 1);
                    b[[0, 0]] = lam;
                    blocks.push(b);
                }
                (cat, _) => {
                    return Err(PqepError::DimensionMismatch(format!(
                        "category {cat:?} is not valid for {flavor}"
                    )));
                }
            }
        }
    }
    Ok(block_diag(&blocks))
}
