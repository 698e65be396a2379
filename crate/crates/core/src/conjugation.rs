//! Rational points: the embedding `E^* -> GL(l, F)`, the conjugator `p_lambda`
//! with `p_lambda^{-1} Phi(p_lambda) = w_dot`, and the transported character
//! `chi_lambda = chi_phi o Ad(p_lambda)^{-1}`.
//!
//! Matrices have entries in `o_E / p^k` (coefficient vectors of a
//! [`LocalField`]); `Phi` acts entrywise and is the inverse of the Frobenius
//! lift, so it reduces to `x -> x^{q^{-1}}`. Everything needs the Kummer
//! presentation `E = F(delta)`, `delta^l = Delta`.

use serde::Serialize;

use crate::abelian::cokernel;
use crate::characters::UnitGroupModel;
use crate::error::{Error, Result};
use crate::local::{LocalElem, LocalField};
use crate::scalar::RootOfUnity;
use crate::torus::TorusChar;

/// A square matrix over `o_E / p^k`; `m[i][j]` is a coefficient vector.
pub type EMatrix = Vec<Vec<Vec<i64>>>;

fn zero(f: &LocalField) -> Vec<i64> {
    vec![0; f.ell()]
}

pub fn identity(f: &LocalField, n: usize) -> EMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { f.ring_one() } else { zero(f) }).collect()).collect()
}

pub fn mat_mul(f: &LocalField, a: &EMatrix, b: &EMatrix) -> EMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(zero(f), |acc, k| f.ring_add(&acc, &f.ring_mul(&a[i][k], &b[k][j]))))
                .collect()
        })
        .collect()
}

/// `Phi` applied entrywise.
pub fn mat_phi(f: &LocalField, a: &EMatrix) -> EMatrix {
    a.iter().map(|row| row.iter().map(|x| phi(f, x)).collect()).collect()
}

/// `Phi = F^{-1} = F^{l-1}` on a coefficient vector.
pub fn phi(f: &LocalField, x: &[i64]) -> Vec<i64> {
    (0..f.ell() - 1).fold(x.to_vec(), |acc, _| f.ring_frobenius(&acc))
}

/// Gauss-Jordan inverse with unit pivots.
pub fn mat_inv(f: &LocalField, a: &EMatrix) -> Result<EMatrix> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = identity(f, n);
    for col in 0..n {
        let piv = (col..n).find(|&r| f.ring_is_unit(&m[r][col])).ok_or_else(|| {
            Error::PrecisionLoss(format!("no unit pivot in column {col}; the determinant is not a unit"))
        })?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let s = f.ring_inv(&m[col][col])?;
        for j in 0..n {
            m[col][j] = f.ring_mul(&m[col][j], &s);
            inv[col][j] = f.ring_mul(&inv[col][j], &s);
        }
        for r in 0..n {
            if r == col || m[r][col].iter().all(|&c| c == 0) {
                continue;
            }
            let factor = m[r][col].clone();
            for j in 0..n {
                m[r][j] = f.ring_sub(&m[r][j], &f.ring_mul(&factor, &m[col][j]));
                inv[r][j] = f.ring_sub(&inv[r][j], &f.ring_mul(&factor, &inv[col][j]));
            }
        }
    }
    Ok(inv)
}

/// Determinant by cofactor-free elimination (pivots must be units).
pub fn mat_det(f: &LocalField, a: &EMatrix) -> Result<Vec<i64>> {
    let n = a.len();
    let mut m = a.clone();
    let mut det = f.ring_one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| f.ring_is_unit(&m[r][col])) else {
            return Err(Error::PrecisionLoss("determinant is not a unit".into()));
        };
        if piv != col {
            m.swap(col, piv);
            det = f.ring_scale(&det, -1);
        }
        det = f.ring_mul(&det, &m[col][col]);
        let s = f.ring_inv(&m[col][col])?;
        for r in col + 1..n {
            let factor = f.ring_mul(&m[r][col], &s);
            for j in col..n {
                m[r][j] = f.ring_sub(&m[r][j], &f.ring_mul(&factor, &m[col][j]));
            }
        }
    }
    Ok(det)
}

pub fn is_diagonal(a: &EMatrix) -> bool {
    a.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, x)| i == j || x.iter().all(|&c| c == 0)))
}

fn require_kummer(f: &LocalField) -> Result<i64> {
    match f.presentation() {
        crate::local::Presentation::Kummer { big_delta, .. } => Ok(*big_delta),
        _ => Err(Error::UnsupportedPresentation(format!(
            "rational conjugation needs E = F(delta) with delta^l in F, which needs l | q - 1 (q = {}, l = {})",
            f.q(),
            f.ell()
        ))),
    }
}

/// An element of `E^*` with its image in `GL(l, F)`: `t = varpi^n u` maps to
/// `varpi^n` times the matrix of multiplication by `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalTorusElem {
    pub t: LocalElem,
    pub valuation: i64,
    pub unit_matrix: EMatrix,
}

/// The matrix of `a_0 + a_1 delta + ... + a_{l-1} delta^{l-1}` in the basis
/// `1, delta, ...`: for odd `l`, entry `(i, j)` is `a_{i-j}`, or `a_{l+i-j} Delta`
/// above the diagonal; for `l = 2` the transposed pattern `(a b; b Delta a)`.
pub fn embed_matrix(f: &LocalField, coeffs: &[i64]) -> Result<EMatrix> {
    let big_delta = require_kummer(f)?;
    let l = f.ell();
    let mut m: EMatrix = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let v = if i >= j { coeffs[i - j] } else { coeffs[l + i - j] * big_delta };
                    f.ring_from_int(v)
                })
                .collect()
        })
        .collect();
    if l == 2 {
        let (a, b) = (m[0][1].clone(), m[1][0].clone());
        m[0][1] = b;
        m[1][0] = a;
    }
    Ok(m)
}

pub fn embed_torus(f: &LocalField, t: &LocalElem) -> Result<RationalTorusElem> {
    let (n, u) = f.unit_decompose(t)?;
    Ok(RationalTorusElem { t: t.clone(), valuation: n, unit_matrix: embed_matrix(f, &u.coeffs)? })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugationData {
    pub ell: usize,
    pub precision: u32,
    /// Rows `(1, Phi^i(delta), ..., Phi^i(delta)^{l-1})`.
    pub vandermonde: EMatrix,
    pub vandermonde_det: Vec<i64>,
    /// `A = vandermonde^{-1}`.
    pub a: EMatrix,
    pub w_tilde: EMatrix,
    /// `w_tilde^{-1} A^{-1} Phi(A)`.
    pub s_tilde: EMatrix,
    pub w_dot: EMatrix,
    pub p_lambda: EMatrix,
    pub phi_p_lambda: EMatrix,
    /// The Weyl element `i -> w[i]` read off from `w_dot`.
    pub weyl: Vec<usize>,
}

impl ConjugationData {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("matrices serialize")
    }
}

fn cyclic_permutation(f: &LocalField, l: usize) -> EMatrix {
    // column j has its 1 in row j + 1
    (0..l)
        .map(|i| (0..l).map(|j| if i == (j + 1) % l { f.ring_one() } else { zero(f) }).collect())
        .collect()
}

/// Permutation of a monomial matrix with unit entries, if it is one.
fn monomial_permutation(f: &LocalField, a: &EMatrix) -> Option<Vec<usize>> {
    let l = a.len();
    (0..l)
        .map(|j| {
            let rows: Vec<usize> = (0..l).filter(|&i| a[i][j].iter().any(|&c| c != 0)).collect();
            (rows.len() == 1 && f.ring_is_unit(&a[rows[0]][j])).then(|| rows[0])
        })
        .collect()
}

pub fn build_conjugation(f: &LocalField) -> Result<ConjugationData> {
    require_kummer(f)?;
    let l = f.ell();
    if l == 2 && f.p() == 2 {
        return Err(Error::InvalidParams("the quadratic construction divides by 2".into()));
    }
    let delta = f.delta().coeffs;
    let conj: Vec<Vec<i64>> = (0..l)
        .scan(delta.clone(), |cur, _| {
            let out = cur.clone();
            *cur = phi(f, cur);
            Some(out)
        })
        .collect();
    let vandermonde: EMatrix =
        conj.iter().map(|d| (0..l).map(|j| f.ring_pow(d, j as u64)).collect()).collect();
    let vandermonde_det = mat_det(f, &vandermonde)?;
    let a = mat_inv(f, &vandermonde)?;
    let w_tilde = cyclic_permutation(f, l);
    let s_tilde = mat_mul(f, &mat_mul(f, &mat_inv(f, &w_tilde)?, &vandermonde), &mat_phi(f, &a));
    if !is_diagonal(&s_tilde) || !(0..l).all(|i| f.ring_is_unit(&s_tilde[i][i])) {
        return Err(Error::CrossCheck("s_tilde is not a diagonal matrix of units".into()));
    }
    let (p_lambda, w_dot) = if l == 2 {
        let d = delta.clone();
        let minus = |x: &[i64]| f.ring_scale(x, -1);
        let m1 = f.ring_from_int(-1);
        let p = vec![vec![m1.clone(), m1], vec![minus(&d), d.clone()]];
        let w = vec![vec![zero(f), f.ring_one()], vec![f.ring_one(), zero(f)]];
        (p, w)
    } else {
        let s_inv = mat_inv(f, &s_tilde)?;
        let w_dot = mat_mul(f, &mat_mul(f, &mat_mul(f, &s_inv, &w_tilde), &s_tilde), &mat_phi(f, &s_tilde));
        (mat_mul(f, &a, &s_tilde), w_dot)
    };
    let phi_p_lambda = mat_phi(f, &p_lambda);
    let lhs = mat_mul(f, &mat_inv(f, &p_lambda)?, &phi_p_lambda);
    if lhs != w_dot {
        return Err(Error::CrossCheck("p_lambda^{-1} Phi(p_lambda) differs from w_dot".into()));
    }
    let weyl = monomial_permutation(f, &w_dot)
        .ok_or_else(|| Error::CrossCheck("w_dot is not monomial with unit entries".into()))?;
    if weyl != (0..l).map(|i| (i + 1) % l).collect::<Vec<_>>() {
        return Err(Error::CrossCheck(format!("w_dot lifts {weyl:?}, not the cycle")));
    }
    Ok(ConjugationData {
        ell: l,
        precision: f.precision(),
        vandermonde,
        vandermonde_det,
        a,
        w_tilde,
        s_tilde,
        w_dot,
        p_lambda,
        phi_p_lambda,
        weyl,
    })
}

/// `Ad(p_lambda)^{-1}` of the unit part, checked to be
/// `diag(u, Phi u, ..., Phi^{l-1} u)`.
pub fn diagonalize(f: &LocalField, data: &ConjugationData, t: &RationalTorusElem) -> Result<EMatrix> {
    let p_inv = mat_inv(f, &data.p_lambda)?;
    let d = mat_mul(f, &mat_mul(f, &p_inv, &t.unit_matrix), &data.p_lambda);
    if !is_diagonal(&d) {
        return Err(Error::CrossCheck("Ad(p_lambda)^{-1} does not diagonalize the torus element".into()));
    }
    let (_, u) = f.unit_decompose(&t.t)?;
    let mut conj = u.coeffs.clone();
    for (i, row) in d.iter().enumerate() {
        if row[i] != conj {
            return Err(Error::CrossCheck(format!("diagonal entry {i} is not Phi^{i}(u)")));
        }
        conj = phi(f, &conj);
    }
    Ok(d)
}

/// `chi_lambda(t) = chi_phi(Ad(p_lambda)^{-1} t)`, reading `t = varpi^n u`
/// off the first diagonal entry.
pub fn transport_character(
    f: &LocalField,
    group: &UnitGroupModel,
    chi_phi: &TorusChar,
    data: &ConjugationData,
    t: &RationalTorusElem,
) -> Result<RootOfUnity> {
    let d = diagonalize(f, data, t)?;
    let u = group.id_of_coeffs(&d[0][0])?;
    Ok(chi_phi.evaluate(group, t.valuation, u))
}

/// `(torsion invariants, free rank)` of `Z^l / (1 - w) Z^l` for the `l`-cycle `w`.
pub fn weyl_cokernel(ell: usize) -> (Vec<i64>, usize) {
    let m: Vec<Vec<i64>> = (0..ell)
        .map(|i| (0..ell).map(|j| (i == j) as i64 - (i == (j + 1) % ell) as i64).collect())
        .collect();
    cokernel(&m)
}

/// Size of the L-packet: the order of the torsion of the cokernel of `1 - w`.
pub fn packet_size(ell: usize) -> u64 {
    weyl_cokernel(ell).0.iter().map(|&d| d as u64).product()
}
