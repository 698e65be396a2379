//! Finite abelian group structure: a basis of a finite abelian p-group given
//! by enumeration, and Smith normal form of integer matrices.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// A basis element together with its order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement<T> {
    pub element: T,
    pub order: u64,
}

/// An internal direct-sum decomposition of a finite abelian `p`-group, with
/// the coordinates of every element.
#[derive(Clone, Debug)]
pub struct PGroupBasis<T> {
    pub basis: Vec<BasisElement<T>>,
    pub coords: HashMap<T, Vec<u64>>,
}

/// Computes a basis of the abelian `p`-group whose elements are `elements`.
///
/// Greedy: repeatedly take an element `h` of maximal order `p^a` modulo the
/// span `H` of the basis so far, then correct it by an element of `H` so
/// that its `p^a`-th power is trivial. Every new element is checked to
/// enlarge `H` by exactly its order, so the result is verified by the
/// construction itself.
pub fn pgroup_basis<T, F>(elements: &[T], identity: T, p: u64, mul: F) -> Result<PGroupBasis<T>>
where
    T: Copy + Eq + Hash,
    F: Fn(T, T) -> T,
{
    let pow = |x: T, mut e: u64| {
        let mut acc = identity;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    let mut basis: Vec<BasisElement<T>> = Vec::new();
    let mut coords: HashMap<T, Vec<u64>> = HashMap::from([(identity, Vec::new())]);
    while coords.len() < elements.len() {
        // order of each element modulo H, as a power of p
        let mut best: Option<(u64, T)> = None;
        for &x in elements {
            let mut y = x;
            let mut ord = 1u64;
            while !coords.contains_key(&y) {
                y = pow(y, p);
                ord *= p;
                if ord > elements.len() as u64 {
                    return Err(Error::CrossCheck("element order exceeds the group order".into()));
                }
            }
            if best.is_none_or(|(o, _)| ord > o) {
                best = Some((ord, x));
            }
        }
        let (ord, h) = best.expect("group is nonempty");
        let c = &coords[&pow(h, ord)];
        let mut corrected = h;
        for (j, b) in basis.iter().enumerate() {
            let cj = c[j];
            if cj % ord != 0 {
                return Err(Error::CrossCheck("greedy basis correction is not divisible".into()));
            }
            let shift = (b.order - cj / ord) % b.order;
            corrected = mul(corrected, pow(b.element, shift));
        }
        if pow(corrected, ord) != identity {
            return Err(Error::CrossCheck("corrected element has the wrong order".into()));
        }
        let old: Vec<(T, Vec<u64>)> = coords.iter().map(|(k, v)| (*k, v.clone())).collect();
        let mut power = identity;
        for i in 0..ord {
            for (x, v) in &old {
                let mut w = v.clone();
                w.push(i);
                let y = mul(*x, power);
                if i > 0 && coords.insert(y, w).is_some() {
                    return Err(Error::CrossCheck("basis elements are not independent".into()));
                }
            }
            power = mul(power, corrected);
        }
        for v in coords.values_mut() {
            if v.len() == basis.len() {
                v.push(0);
            }
        }
        basis.push(BasisElement { element: corrected, order: ord });
    }
    Ok(PGroupBasis { basis, coords })
}

/// Invariant factors `d_1 | d_2 | ...` of an integer matrix (zeros last),
/// one per row; the cokernel of `A: Z^n -> Z^m` is `sum Z/d_i`.
pub fn smith_normal_form(matrix: &[Vec<i64>]) -> Vec<i64> {
    let m = matrix.len();
    let n = matrix.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<i128>> = matrix.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero absolute value in the remaining block
        let Some((pi, pj)) = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].abs())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut done = false;
        while !done {
            done = true;
            for i in t + 1..m {
                let f = a[i][t] / a[t][t];
                if f != 0 {
                    for j in t..n {
                        a[i][j] -= f * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    a.swap(t, i);
                    done = false;
                }
            }
            for j in t + 1..n {
                let f = a[t][j] / a[t][t];
                if f != 0 {
                    for row in a.iter_mut() {
                        row[j] -= f * row[t];
                    }
                }
                if a[t][j] != 0 {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    done = false;
                }
            }
            if done {
                // the pivot must divide the whole remaining block
                if let Some(i) = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % a[t][t] != 0)) {
                    for j in t..n {
                        a[t][j] += a[i][j];
                    }
                    done = false;
                }
            }
        }
        diag.push(a[t][t].abs() as i64);
        t += 1;
    }
    diag.resize(m, 0);
    diag
}

/// `(torsion invariants > 1, free rank)` of the cokernel of `matrix`.
pub fn cokernel(matrix: &[Vec<i64>]) -> (Vec<i64>, usize) {
    let d = smith_normal_form(matrix);
    let torsion = d.iter().copied().filter(|&x| x > 1).collect();
    let free = d.iter().filter(|&&x| x == 0).count();
    (torsion, free)
}
