//! Cuspidal Deligne-Lusztig characters of `GL(2, f_q)` attached to regular
//! characters of `f_{q^2}^*`, plus dimension metadata for odd `l`.
//!
//! Field elements are written as exponents of a fixed generator `g` of
//! `f_{q^2}^*`; `f_q^*` is the subgroup of multiples of `q + 1`. A residue
//! character `chi_o` is its exponent `e`: `chi_o(g^k) = exp(2 pi i e k / (q^2 - 1))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{CyclotomicSum, RootOfUnity};
use crate::util::{is_prime, pow_u64};

/// A conjugacy class of `GL(2, f_q)`, labelled by exponents of `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Gl2Class {
    /// `z` on the diagonal.
    Central { z: u64 },
    /// `z` times a nontrivial unipotent.
    NonSemisimple { z: u64 },
    /// `diag(x, y)` with `x < y`.
    Split { x: u64, y: u64 },
    /// Eigenvalues `w, w^q` not in `f_q`, labelled by the smaller exponent.
    Elliptic { w: u64 },
}

impl Gl2Class {
    pub fn label(&self) -> String {
        match self {
            Gl2Class::Central { z } => format!("central(g^{z})"),
            Gl2Class::NonSemisimple { z } => format!("unipotent(g^{z})"),
            Gl2Class::Split { x, y } => format!("split(g^{x},g^{y})"),
            Gl2Class::Elliptic { w } => format!("elliptic(g^{w})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gl2ClassData {
    pub q: u64,
    pub classes: Vec<Gl2Class>,
    pub sizes: Vec<u64>,
}

impl Gl2ClassData {
    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::InvalidParams(format!("q = {q} must be prime")));
        }
        let n = q * q - 1;
        let base: Vec<u64> = (0..q - 1).map(|a| a * (q + 1)).collect();
        let mut classes = Vec::new();
        let mut sizes = Vec::new();
        for &z in &base {
            classes.push(Gl2Class::Central { z });
            sizes.push(1);
        }
        for &z in &base {
            classes.push(Gl2Class::NonSemisimple { z });
            sizes.push(q * q - 1);
        }
        for (i, &x) in base.iter().enumerate() {
            for &y in &base[i + 1..] {
                classes.push(Gl2Class::Split { x, y });
                sizes.push(q * (q + 1));
            }
        }
        for w in 0..n {
            if w % (q + 1) != 0 && w < (w * q) % n {
                classes.push(Gl2Class::Elliptic { w });
                sizes.push(q * (q - 1));
            }
        }
        Ok(Gl2ClassData { q, classes, sizes })
    }

    pub fn group_order(&self) -> u64 {
        let q = self.q;
        (q * q - 1) * (q * q - q)
    }

    /// Exact `(1/|G|) sum_c |c| a(c) conj(b(c))`.
    pub fn inner_product(&self, a: &[CyclotomicSum], b: &[CyclotomicSum]) -> Result<i64> {
        let mut total = CyclotomicSum::zero();
        for ((x, y), &s) in a.iter().zip(b).zip(&self.sizes) {
            total = total + (x * &y.conj()).scale(s as i64);
        }
        let t = total
            .as_integer()
            .ok_or_else(|| Error::CrossCheck("class sum is not an integer".into()))?;
        let g = self.group_order() as i64;
        if t % g != 0 {
            return Err(Error::CrossCheck(format!("class sum {t} is not divisible by |G| = {g}")));
        }
        Ok(t / g)
    }
}

fn chi_o_value(q: u64, e: u64, k: u64) -> RootOfUnity {
    let n = q * q - 1;
    RootOfUnity::from_exponent((e % n) * (k % n) % n, n)
}

pub fn is_regular(q: u64, e: u64) -> bool {
    let n = q * q - 1;
    e % n != (e * q) % n
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspidalCharRow {
    pub q: u64,
    pub chi_o: u64,
    pub dim: i64,
    pub values: Vec<CyclotomicSum>,
}

pub fn cuspidal_character(classes: &Gl2ClassData, chi_o: u64) -> Result<CuspidalCharRow> {
    let q = classes.q;
    if !is_regular(q, chi_o) {
        return Err(Error::NotRegular);
    }
    let chi = |k| CyclotomicSum::root(chi_o_value(q, chi_o, k));
    let values = classes
        .classes
        .iter()
        .map(|c| match *c {
            Gl2Class::Central { z } => chi(z).scale(q as i64 - 1),
            Gl2Class::NonSemisimple { z } => -chi(z),
            Gl2Class::Split { .. } => CyclotomicSum::zero(),
            Gl2Class::Elliptic { w } => -(chi(w) + chi(w * q)),
        })
        .collect();
    Ok(CuspidalCharRow { q, chi_o, dim: q as i64 - 1, values })
}

/// `sum_{u in U} chi(z u)` for each central `z`: `U` is one identity and
/// `q - 1` nontrivial unipotents.
pub fn unipotent_sums(classes: &Gl2ClassData, row: &CuspidalCharRow) -> Vec<CyclotomicSum> {
    let q = classes.q as i64;
    let value = |target: Gl2Class| {
        let i = classes.classes.iter().position(|c| *c == target).expect("class is listed");
        row.values[i].clone()
    };
    classes
        .classes
        .iter()
        .filter_map(|c| match *c {
            Gl2Class::Central { z } => Some(value(Gl2Class::Central { z }) + value(Gl2Class::NonSemisimple { z }).scale(q - 1)),
            _ => None,
        })
        .collect()
}

/// Norm one, degree `q - 1` at the identity, and vanishing unipotent sums.
pub fn verify_cuspidal(classes: &Gl2ClassData, row: &CuspidalCharRow) -> bool {
    let identity_ok = row.values.first().and_then(|v| v.as_integer()) == Some(row.dim);
    identity_ok
        && classes.inner_product(&row.values, &row.values).ok() == Some(1)
        && unipotent_sums(classes, row).iter().all(|s| s.is_zero())
}

/// All rows for regular `chi_o`, in increasing order of the exponent.
pub fn cuspidal_table(classes: &Gl2ClassData) -> Result<Vec<CuspidalCharRow>> {
    let q = classes.q;
    let exps: Vec<u64> = (0..q * q - 1).filter(|&e| is_regular(q, e)).collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        exps.par_iter().map(|&e| cuspidal_character(classes, e)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        exps.iter().map(|&e| cuspidal_character(classes, e)).collect()
    }
}

/// Table as JSON: classes with sizes and one value list per row.
pub fn table_json(classes: &Gl2ClassData, rows: &[CuspidalCharRow]) -> serde_json::Value {
    serde_json::json!({
        "q": classes.q,
        "group_order": classes.group_order(),
        "classes": classes.classes.iter().zip(&classes.sizes).map(|(c, s)| serde_json::json!({
            "label": c.label(),
            "size": s,
        })).collect::<Vec<_>>(),
        "rows": rows,
    })
}

/// The odd-`l` stand-in: orbit label and dimension only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DlMetadata {
    pub q: u64,
    pub ell: u64,
    pub chi_o: u64,
    pub orbit: Vec<u64>,
    pub dim: u64,
}

/// `dim = prod_{i=1}^{l-1} (q^i - 1)`; `chi_o` is an exponent modulo `q^l - 1`.
pub fn dl_metadata(q: u64, ell: u64, chi_o: u64) -> Result<DlMetadata> {
    let n = pow_u64(q, ell as u32) - 1;
    let mut orbit = vec![chi_o % n];
    let mut cur = (chi_o % n) * q % n;
    while cur != chi_o % n {
        orbit.push(cur);
        cur = cur * q % n;
    }
    if orbit.len() as u64 != ell {
        return Err(Error::NotRegular);
    }
    orbit.sort_unstable();
    let dim = (1..ell as u32).map(|i| pow_u64(q, i) - 1).product();
    Ok(DlMetadata { q, ell, chi_o: chi_o % n, orbit, dim })
}
