//! Shared parsing of block-diagonal spectral matrices into pairing groups,
//! locating each group's columns.

use crate::error::{PqepError, Result};
use crate::flavor::Flavor;
use crate::mat::{frob, zeros, CMat, C64};
use crate::TOL_UNIMODULAR;
use ndarray::s;

/// One group of diagonal blocks of J, located by column positions.
#[derive(Debug, Clone)]
pub(crate) enum JGroup {
    /// Columns of lambda-copies and of partner-copies (1/lambda or
    /// 1/conj(lambda)); one column per copy for H flavors, scalar T pairs.
    Pair {
        firsts: Vec<usize>,
        seconds: Vec<usize>,
    },
    /// T quadruple: 2x2 rotation block starts, lambda side and 1/lambda side.
    Quad {
        firsts: Vec<usize>,
        seconds: Vec<usize>,
    },
    /// T unimodular conjugate pair: rotation block starts.
    UnimodRot { starts: Vec<usize> },
    /// H unimodular: scalar columns.
    UnimodScalar { cols: Vec<usize> },
}

pub(crate) fn near(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-7 * a.norm().max(b.norm()).max(1.0)
}

/// Parse J's diagonal blocks and bucket them into pairing groups.
pub(crate) fn analyze_layout(j: &CMat, flavor: Flavor) -> Result<Vec<JGroup>> {
    let p = j.nrows();
    // collect (offset, lambda, is_rotation)
    let mut blocks = Vec::new();
    let mut o = 0usize;
    let scale = frob(j).max(1.0);
    while o < p {
        if flavor.is_real() && o + 1 < p && j[[o, o + 1]].norm() > 1e-12 * scale {
            let lam = C64::new(j[[o, o]].re, j[[o, o + 1]].re);
            blocks.push((o, lam, true));
            o += 2;
        } else {
            blocks.push((o, j[[o, o]], false));
            o += 1;
        }
    }
    let mut used = vec![false; blocks.len()];
    let mut groups = Vec::new();
    for i in 0..blocks.len() {
        if used[i] {
            continue;
        }
        let (_, lam, rot) = blocks[i];
        if rot {
            if (lam.norm() - 1.0).abs() <= TOL_UNIMODULAR {
                let mut starts = Vec::new();
                for k in i..blocks.len() {
                    if !used[k]
                        && blocks[k].2
                        && (near(blocks[k].1, lam) || near(blocks[k].1, lam.conj()))
                    {
                        used[k] = true;
                        starts.push(blocks[k].0);
                    }
                }
                groups.push(JGroup::UnimodRot { starts });
            } else {
                let partner = lam.inv();
                let mut firsts = Vec::new();
                let mut seconds = Vec::new();
                for k in i..blocks.len() {
                    if used[k] || !blocks[k].2 {
                        continue;
                    }
                    let lk = blocks[k].1;
                    if near(lk, lam) || near(lk, lam.conj()) {
                        used[k] = true;
                        firsts.push(blocks[k].0);
                    } else if near(lk, partner) || near(lk, partner.conj()) {
                        used[k] = true;
                        seconds.push(blocks[k].0);
                    }
                }
                if firsts.len() != seconds.len() {
                    return Err(PqepError::DimensionMismatch(
                        "quadruple halves have unequal multiplicities in J".into(),
                    ));
                }
                groups.push(JGroup::Quad { firsts, seconds });
            }
        } else if flavor.is_real() {
            // real scalar eigenvalue
            if (lam.re.abs() - 1.0).abs() <= TOL_UNIMODULAR {
                return Err(PqepError::UnimodularUnsupported(
                    "normalization excludes eigenvalues +1/-1".into(),
                ));
            }
            let partner = lam.inv();
            let mut firsts = Vec::new();
            let mut seconds = Vec::new();
            for k in i..blocks.len() {
                if used[k] || blocks[k].2 {
                    continue;
                }
                if near(blocks[k].1, lam) {
                    used[k] = true;
                    firsts.push(blocks[k].0);
                } else if near(blocks[k].1, partner) {
                    used[k] = true;
                    seconds.push(blocks[k].0);
                }
            }
            if firsts.len() != seconds.len() {
                return Err(PqepError::DimensionMismatch(
                    "real pair halves have unequal multiplicities in J".into(),
                ));
            }
            groups.push(JGroup::Pair { firsts, seconds });
        } else {
            // H flavors: diagonal J
            if (lam.norm() - 1.0).abs() <= TOL_UNIMODULAR {
                let mut cols = Vec::new();
                for k in i..blocks.len() {
                    if !used[k] && near(blocks[k].1, lam) {
                        used[k] = true;
                        cols.push(blocks[k].0);
                    }
                }
                groups.push(JGroup::UnimodScalar { cols });
            } else {
                let partner = lam.conj().inv();
                let mut firsts = Vec::new();
                let mut seconds = Vec::new();
                for k in i..blocks.len() {
                    if used[k] {
                        continue;
                    }
                    if near(blocks[k].1, lam) {
                        used[k] = true;
                        firsts.push(blocks[k].0);
                    } else if near(blocks[k].1, partner) {
                        used[k] = true;
                        seconds.push(blocks[k].0);
                    }
                }
                if firsts.len() != seconds.len() {
                    return Err(PqepError::DimensionMismatch(
                        "pair halves have unequal multiplicities in J".into(),
                    ));
                }
                groups.push(JGroup::Pair { firsts, seconds });
            }
        }
    }
    Ok(groups)
}

/// Gather selected columns into a matrix.
pub(crate) fn take_cols(m: &CMat, cols: &[usize]) -> CMat {
    let mut out = zeros(m.nrows(), cols.len());
    for (c, &j) in cols.iter().enumerate() {
        out.slice_mut(s![.., c]).assign(&m.slice(s![.., j]));
    }
    out
}
