//! Exact scalars: roots of unity modelled additively as `Q/Z`, formal sums of
//! roots of unity, and monomial matrices with root-of-unity entries.
//!
//! Every character value in the workbench is a finite-order complex number, so
//! a value `exp(2 pi i num/den)` is stored as the reduced fraction `num/den`
//! and multiplication of values is addition of fractions modulo one.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, MulAssign, Neg, Sub};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::util::{gcd, lcm};

/// An element of `mu_infinity`, written as the reduced fraction `num/den` in `Q/Z`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };
    pub const MINUS_ONE: RootOfUnity = RootOfUnity { num: 1, den: 2 };

    /// The class of `num/den` modulo one. Panics if `den == 0`.
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let d = den as i128;
        let n = num.rem_euclid(d) as u64;
        let g = gcd(n, den);
        if n == 0 {
            return Self::ONE;
        }
        RootOfUnity { num: n / g, den: den / g }
    }

    /// `exp(2 pi i k / n)`.
    pub fn from_exponent(k: u64, n: u64) -> Self {
        Self::new(k as i128, n)
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    /// Multiplicative order, which is the reduced denominator.
    pub fn order(self) -> u64 {
        self.den
    }

    pub fn is_one(self) -> bool {
        self.num == 0
    }

    pub fn inv(self) -> Self {
        Self::new(-(self.num as i128), self.den)
    }

    pub fn pow(self, k: i64) -> Self {
        let den = self.den as i128;
        let e = (k as i128).rem_euclid(den);
        Self::new(self.num as i128 * e, self.den)
    }

    /// The exponent `k` with `self = exp(2 pi i k / n)`, if `self` lies in `mu_n`.
    pub fn exponent_in(self, n: u64) -> Option<u64> {
        if n % self.den != 0 {
            return None;
        }
        Some(self.num * (n / self.den))
    }
}

impl Mul for RootOfUnity {
    type Output = RootOfUnity;

    fn mul(self, rhs: RootOfUnity) -> RootOfUnity {
        let l = lcm(self.den, rhs.den);
        let n = self.num as u128 * (l / self.den) as u128 + rhs.num as u128 * (l / rhs.den) as u128;
        RootOfUnity::new((n % l as u128) as i128, l)
    }
}

impl MulAssign for RootOfUnity {
    fn mul_assign(&mut self, rhs: RootOfUnity) {
        *self = *self * rhs;
    }
}

impl std::iter::Product for RootOfUnity {
    fn product<I: Iterator<Item = RootOfUnity>>(iter: I) -> Self {
        iter.fold(RootOfUnity::ONE, |a, b| a * b)
    }
}

impl Default for RootOfUnity {
    fn default() -> Self {
        Self::ONE
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta({}/{})", self.num, self.den)
    }
}

impl FromStr for RootOfUnity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: i128 = n.parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: u64 = d.parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(RootOfUnity::new(num, den))
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The `n`-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)}
    let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    let mut poly = vec![1i64];
    for &d in &divisors {
        if crate::util::mobius(n / d) == 1 {
            let mut next = vec![0i64; poly.len() + d as usize];
            for (i, &c) in poly.iter().enumerate() {
                next[i + d as usize] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &divisors {
        if crate::util::mobius(n / d) == -1 {
            // exact division by x^d - 1: q_i = q_{i-d} - p_i read from the bottom
            let d = d as usize;
            let deg = poly.len() - 1 - d;
            let mut q = vec![0i64; deg + 1];
            for i in 0..=deg {
                let prev = if i >= d { q[i - d] } else { 0 };
                q[i] = prev - poly[i];
            }
            poly = q;
        }
    }
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

/// Reduces a dense element of `Z[x]/(x^m - 1)` modulo the `m`-th cyclotomic
/// polynomial, giving the canonical coordinates in `Z[zeta_m]`.
fn reduce_mod_cyclotomic(m: u64, mut coeffs: Vec<i128>) -> Vec<i64> {
    let phi = cyclotomic_polynomial(m);
    let deg = phi.len() - 1;
    for i in (deg..coeffs.len()).rev() {
        let c = coeffs[i];
        if c != 0 {
            for (j, &pj) in phi.iter().enumerate() {
                coeffs[i - deg + j] -= c * pj as i128;
            }
        }
    }
    coeffs.truncate(deg);
    coeffs
        .into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
        .collect()
}

/// Accumulator for large sums of roots of unity of order dividing `m`.
#[derive(Clone, Debug)]
pub struct DenseCyclotomic {
    order: u64,
    coeffs: Vec<i128>,
}

impl DenseCyclotomic {
    pub fn new(order: u64) -> Self {
        DenseCyclotomic { order, coeffs: vec![0; order as usize] }
    }

    pub fn add_root(&mut self, root: RootOfUnity, multiplicity: i64) {
        let k = root
            .exponent_in(self.order)
            .unwrap_or_else(|| panic!("{root} is not in mu_{}", self.order));
        self.coeffs[k as usize] += multiplicity as i128;
    }

    /// Canonical coordinates in the power basis of `Z[zeta_m]`.
    pub fn reduce(&self) -> Vec<i64> {
        reduce_mod_cyclotomic(self.order, self.coeffs.clone())
    }

    /// The integer value of the sum, if it is rational.
    pub fn as_integer(&self) -> Option<i64> {
        let red = self.reduce();
        if red.iter().skip(1).all(|&c| c == 0) {
            Some(red.first().copied().unwrap_or(0))
        } else {
            None
        }
    }
}

/// A formal integer combination of roots of unity. Equality is equality in
/// the cyclotomic field, decided by reduction modulo the cyclotomic polynomial.
#[derive(Clone, Default)]
pub struct CyclotomicSum {
    terms: BTreeMap<RootOfUnity, i64>,
}

impl CyclotomicSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn integer(n: i64) -> Self {
        let mut s = Self::zero();
        s.add_term(RootOfUnity::ONE, n);
        s
    }

    pub fn root(r: RootOfUnity) -> Self {
        let mut s = Self::zero();
        s.add_term(r, 1);
        s
    }

    pub fn from_roots<I: IntoIterator<Item = RootOfUnity>>(roots: I) -> Self {
        let mut s = Self::zero();
        for r in roots {
            s.add_term(r, 1);
        }
        s
    }

    pub fn add_term(&mut self, r: RootOfUnity, mult: i64) {
        if mult == 0 {
            return;
        }
        let e = self.terms.entry(r).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.terms.remove(&r);
        }
    }

    /// The formal multiset of contributions.
    pub fn terms(&self) -> impl Iterator<Item = (RootOfUnity, i64)> + '_ {
        self.terms.iter().map(|(r, m)| (*r, *m))
    }

    pub fn conj(&self) -> Self {
        let mut s = Self::zero();
        for (r, m) in self.terms() {
            s.add_term(r.inv(), m);
        }
        s
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut s = Self::zero();
        for (r, m) in self.terms() {
            s.add_term(r, m * k);
        }
        s
    }

    /// Common order of all roots appearing.
    pub fn conductor(&self) -> u64 {
        self.terms.keys().fold(1, |acc, r| lcm(acc, r.den()))
    }

    pub fn to_dense(&self, order: u64) -> DenseCyclotomic {
        let mut d = DenseCyclotomic::new(order);
        for (r, m) in self.terms() {
            d.add_root(r, m);
        }
        d
    }

    /// `(m, coords)`: coordinates in the power basis of `Z[zeta_m]` for the
    /// conductor `m`, trailing zeros removed.
    pub fn canonical(&self) -> (u64, Vec<i64>) {
        let m = self.conductor();
        let mut red = self.to_dense(m).reduce();
        while red.last() == Some(&0) {
            red.pop();
        }
        (m, red)
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().1.is_empty()
    }

    pub fn as_integer(&self) -> Option<i64> {
        let (_, red) = self.canonical();
        match red.len() {
            0 => Some(0),
            1 => Some(red[0]),
            _ => None,
        }
    }
}

impl PartialEq for CyclotomicSum {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }
}

impl Add for CyclotomicSum {
    type Output = CyclotomicSum;

    fn add(mut self, rhs: CyclotomicSum) -> CyclotomicSum {
        for (r, m) in rhs.terms() {
            self.add_term(r, m);
        }
        self
    }
}

impl Neg for CyclotomicSum {
    type Output = CyclotomicSum;

    fn neg(self) -> CyclotomicSum {
        self.scale(-1)
    }
}

impl Sub for CyclotomicSum {
    type Output = CyclotomicSum;

    fn sub(self, rhs: CyclotomicSum) -> CyclotomicSum {
        self + (-rhs)
    }
}

impl Mul for &CyclotomicSum {
    type Output = CyclotomicSum;

    fn mul(self, rhs: &CyclotomicSum) -> CyclotomicSum {
        let mut s = CyclotomicSum::zero();
        for (a, ma) in self.terms() {
            for (b, mb) in rhs.terms() {
                s.add_term(a * b, ma * mb);
            }
        }
        s
    }
}

impl fmt::Debug for CyclotomicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(r, m)| if m == 1 { format!("[{r}]") } else { format!("{m}*[{r}]") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for CyclotomicSum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, i64> = self.terms().map(|(r, m)| (r.to_string(), m)).collect();
        map.serialize(serializer)
    }
}

/// An `n x n` monomial matrix: column `i` has its single nonzero entry
/// `scalars[i]` in row `perm[i]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MonomialMatrix {
    perm: Vec<usize>,
    scalars: Vec<RootOfUnity>,
}

impl MonomialMatrix {
    pub fn new(perm: Vec<usize>, scalars: Vec<RootOfUnity>) -> Result<Self> {
        let n = perm.len();
        if scalars.len() != n {
            return Err(Error::InvalidParams("perm and scalars differ in length".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidParams(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(MonomialMatrix { perm, scalars })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(vec![RootOfUnity::ONE; n])
    }

    pub fn diagonal(scalars: Vec<RootOfUnity>) -> Self {
        MonomialMatrix { perm: (0..scalars.len()).collect(), scalars }
    }

    pub fn scalar(n: usize, a: RootOfUnity) -> Self {
        Self::diagonal(vec![a; n])
    }

    /// The cyclic permutation matrix sending basis vector `i` to `i + 1 mod n`.
    pub fn cycle(n: usize) -> Self {
        MonomialMatrix { perm: (0..n).map(|i| (i + 1) % n).collect(), scalars: vec![RootOfUnity::ONE; n] }
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn scalars(&self) -> &[RootOfUnity] {
        &self.scalars
    }

    /// Nonzero entry of each row, top to bottom.
    pub fn row_scalars(&self) -> Vec<RootOfUnity> {
        let mut rows = vec![RootOfUnity::ONE; self.size()];
        for (col, &row) in self.perm.iter().enumerate() {
            rows[row] = self.scalars[col];
        }
        rows
    }

    pub fn entry(&self, row: usize, col: usize) -> Option<RootOfUnity> {
        (self.perm[col] == row).then_some(self.scalars[col])
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn is_scalar(&self) -> bool {
        self.is_diagonal() && self.scalars.windows(2).all(|w| w[0] == w[1])
    }

    pub fn mul(&self, rhs: &MonomialMatrix) -> MonomialMatrix {
        assert_eq!(self.size(), rhs.size());
        let perm = rhs.perm.iter().map(|&j| self.perm[j]).collect();
        let scalars = rhs.perm.iter().zip(&rhs.scalars).map(|(&j, &b)| self.scalars[j] * b).collect();
        MonomialMatrix { perm, scalars }
    }

    pub fn inverse(&self) -> MonomialMatrix {
        let n = self.size();
        let mut perm = vec![0; n];
        let mut scalars = vec![RootOfUnity::ONE; n];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
            scalars[p] = self.scalars[i].inv();
        }
        MonomialMatrix { perm, scalars }
    }

    pub fn pow(&self, mut k: u64) -> MonomialMatrix {
        let mut base = self.clone();
        let mut acc = MonomialMatrix::identity(self.size());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Exact multiplicative order: each cycle of length `c` whose scalar
    /// product has order `o` contributes `c * o`.
    pub fn order(&self) -> u64 {
        self.normal_form().iter().fold(1, |acc, (c, prod)| lcm(acc, *c as u64 * prod.order()))
    }

    pub fn conjugate_by(&self, c: &MonomialMatrix) -> MonomialMatrix {
        c.mul(self).mul(&c.inverse())
    }

    /// Formal sum of the diagonal entries.
    pub fn trace(&self) -> CyclotomicSum {
        CyclotomicSum::from_roots(
            self.perm.iter().enumerate().filter(|(i, &p)| *i == p).map(|(i, _)| self.scalars[i]),
        )
    }

    pub fn sign(&self) -> i32 {
        let even = self.cycles().iter().filter(|c| c.len() % 2 == 0).count();
        if even % 2 == 0 { 1 } else { -1 }
    }

    pub fn det(&self) -> RootOfUnity {
        let s: RootOfUnity = self.scalars.iter().copied().product();
        if self.sign() == 1 { s } else { s * RootOfUnity::MINUS_ONE }
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                c.push(i);
                i = self.perm[i];
            }
            out.push(c);
        }
        out
    }

    /// Conjugacy invariant under monomial conjugation: the sorted list of
    /// (cycle length, product of scalars along the cycle).
    pub fn normal_form(&self) -> Vec<(usize, RootOfUnity)> {
        let mut nf: Vec<_> = self
            .cycles()
            .into_iter()
            .map(|c| (c.len(), c.iter().map(|&i| self.scalars[i]).product()))
            .collect();
        nf.sort();
        nf
    }

    /// Whether `self` and `other` are conjugate by a monomial matrix.
    pub fn is_monomially_conjugate(&self, other: &MonomialMatrix) -> bool {
        self.size() == other.size() && self.normal_form() == other.normal_form()
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialMatrixRepr {
    size: usize,
    perm: Vec<usize>,
    scalars: Vec<RootOfUnity>,
}

impl Serialize for MonomialMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MonomialMatrixRepr {
            size: self.size(),
            perm: self.perm.iter().map(|p| p + 1).collect(),
            scalars: self.scalars.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MonomialMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = MonomialMatrixRepr::deserialize(deserializer)?;
        if r.perm.len() != r.size || r.perm.contains(&0) {
            return Err(serde::de::Error::custom("perm must list 1..size"));
        }
        MonomialMatrix::new(r.perm.iter().map(|p| p - 1).collect(), r.scalars).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ru(n: i128, d: u64) -> RootOfUnity {
        RootOfUnity::new(n, d)
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(ru(1, 2) * ru(1, 2), RootOfUnity::ONE);
        assert_eq!(ru(1, 4) * ru(1, 2), ru(3, 4));
        assert_eq!(ru(3, 8) * ru(7, 8), ru(1, 4));
        assert_eq!(RootOfUnity::ONE.to_string(), "0/1");
    }

    #[test]
    fn reduced_form() {
        let r = ru(6, 8);
        assert_eq!((r.num(), r.den()), (3, 4));
        assert_eq!(ru(-1, 4), ru(3, 4));
        assert_eq!(ru(3, 4).inv(), ru(1, 4));
        assert_eq!(ru(1, 6).pow(-2), ru(2, 3));
    }

    #[test]
    fn string_round_trip() {
        let r: RootOfUnity = "10/12".parse().unwrap();
        assert_eq!(r, ru(5, 6));
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"5/6\"");
        let back: RootOfUnity = serde_json::from_str("\"5/6\"").unwrap();
        assert_eq!(back, r);
        assert!("1/0".parse::<RootOfUnity>().is_err());
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // Phi_105 is the first with a coefficient of absolute value 2
        assert!(cyclotomic_polynomial(105).contains(&-2));
        assert_eq!(cyclotomic_polynomial(105).len(), 49);
    }

    #[test]
    fn vanishing_sums_are_zero() {
        let s = CyclotomicSum::from_roots((0..3).map(|k| ru(k, 3)));
        assert!(s.is_zero());
        let s = CyclotomicSum::from_roots([ru(1, 4), ru(3, 4)]);
        assert!(s.is_zero());
        let s = CyclotomicSum::from_roots([ru(1, 3), ru(2, 3)]);
        assert_eq!(s.as_integer(), Some(-1));
        assert_eq!(CyclotomicSum::root(ru(1, 4)).as_integer(), None);
    }

    #[test]
    fn norm_of_sum() {
        // |1 + i|^2 = 2
        let s = CyclotomicSum::from_roots([RootOfUnity::ONE, ru(1, 4)]);
        assert_eq!((&s * &s.conj()).as_integer(), Some(2));
    }

    fn two_cycle(a: RootOfUnity, b: RootOfUnity) -> MonomialMatrix {
        MonomialMatrix::new(vec![1, 0], vec![a, b]).unwrap()
    }

    #[test]
    fn power_of_two_cycle_is_scalar() {
        let a = ru(1, 5);
        let m = two_cycle(a, RootOfUnity::ONE);
        assert_eq!(m.pow(2), MonomialMatrix::diagonal(vec![a, a]));
        assert_eq!(MonomialMatrix::identity(3).pow(5), MonomialMatrix::identity(3));
        let c = MonomialMatrix::new(vec![1, 2, 0], vec![a, RootOfUnity::ONE, RootOfUnity::ONE]).unwrap();
        assert_eq!(c.pow(3), MonomialMatrix::scalar(3, a));
    }

    #[test]
    fn conjugacy_examples() {
        let a = ru(1, 3);
        let b = ru(1, 7);
        let one = RootOfUnity::ONE;
        assert!(two_cycle(a, one).is_monomially_conjugate(&two_cycle(one, a)));
        assert!(MonomialMatrix::diagonal(vec![a, b]).is_monomially_conjugate(&MonomialMatrix::diagonal(vec![b, a])));
        assert!(!two_cycle(a, one).is_monomially_conjugate(&MonomialMatrix::diagonal(vec![a, one])));
    }

    /// Brute force over the whole monomial group with entries in `mu_4`.
    #[test]
    fn conjugacy_normal_form_matches_brute_force() {
        let n = 4;
        let roots: Vec<_> = (0..n).map(|k| ru(k as i128, n)).collect();
        let mut group = Vec::new();
        for perm in [vec![0, 1], vec![1, 0]] {
            for &a in &roots {
                for &b in &roots {
                    group.push(MonomialMatrix::new(perm.clone(), vec![a, b]).unwrap());
                }
            }
        }
        for m in &group {
            for other in &group {
                let brute = group.iter().any(|c| &m.conjugate_by(c) == other);
                assert_eq!(brute, m.is_monomially_conjugate(other), "{m:?} vs {other:?}");
            }
        }
    }

    #[test]
    fn order_accounts_for_cycle_products() {
        // (0 -1; 1 0) has order 4 although its permutation and scalars have order 2
        let m = two_cycle(RootOfUnity::ONE, RootOfUnity::MINUS_ONE);
        assert_eq!(m.order(), 4);
        assert_ne!(m.pow(2), MonomialMatrix::identity(2));
    }

    #[test]
    fn det_and_trace() {
        let a = ru(1, 3);
        let m = two_cycle(a, RootOfUnity::ONE);
        assert_eq!(m.det(), a * RootOfUnity::MINUS_ONE);
        assert!(m.trace().is_zero());
        assert_eq!(MonomialMatrix::cycle(5).det(), RootOfUnity::ONE);
        let d = MonomialMatrix::diagonal(vec![a, a.inv()]);
        assert_eq!(d.trace().as_integer(), Some(-1));
    }

    #[test]
    fn json_shape() {
        let m = two_cycle(ru(1, 2), RootOfUnity::ONE);
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v, serde_json::json!({"size": 2, "perm": [2, 1], "scalars": ["1/2", "0/1"]}));
        let back: MonomialMatrix = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
    }

    fn arb_root() -> impl Strategy<Value = RootOfUnity> {
        (1u64..60).prop_flat_map(|d| (0..d).prop_map(move |n| RootOfUnity::from_exponent(n, d)))
    }

    fn arb_monomial(n: usize) -> impl Strategy<Value = MonomialMatrix> {
        (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(arb_root(), n))
            .prop_map(|(p, s)| MonomialMatrix::new(p, s).unwrap())
    }

    proptest! {
        #[test]
        fn roots_form_an_abelian_group(a in arb_root(), b in arb_root(), c in arb_root()) {
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * a.inv(), RootOfUnity::ONE);
            prop_assert!(a.pow(a.order() as i64).is_one());
        }

        #[test]
        fn power_by_order_is_identity(m in arb_monomial(4)) {
            let ord = m.order();
            prop_assert_eq!(m.pow(ord), MonomialMatrix::identity(4));
            // the order is exact: no proper divisor works
            for (prime, _) in crate::util::factorize(ord) {
                prop_assert_ne!(m.pow(ord / prime), MonomialMatrix::identity(4));
            }
            // lcm(perm order, scalar orders) alone is not enough when a cycle
            // product has order sharing a factor with the cycle length
            let perm_order = m.cycles().iter().fold(1u64, |acc, c| lcm(acc, c.len() as u64));
            let naive = m.scalars().iter().fold(perm_order, |acc, s| lcm(acc, s.order()));
            prop_assert_eq!((naive * perm_order) % ord, 0);
            prop_assert_eq!(m.mul(&m.inverse()), MonomialMatrix::identity(4));
        }

        #[test]
        fn cycle_scalar_product_is_conjugation_invariant(s in proptest::collection::vec(arb_root(), 3), c in arb_monomial(3)) {
            let mut perm: Vec<usize> = (0..3).map(|i| (i + 1) % 3).collect();
            perm.rotate_left(0);
            let m = MonomialMatrix::new(perm, s.clone()).unwrap();
            let conj = m.conjugate_by(&c);
            let prod: RootOfUnity = s.iter().copied().product();
            let prod2: RootOfUnity = conj.scalars().iter().copied().product();
            prop_assert_eq!(prod, prod2);
            prop_assert!(m.is_monomially_conjugate(&conj));
        }
    }
}
