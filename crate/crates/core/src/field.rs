//! The finite field `f_{q^l}` over `f_q`, `q = p^e`, with its Frobenius
//! `x -> x^q`, discrete logarithms, and the norm down to `f_q`.
//!
//! Elements are stored as integer codes `sum c_i p^i` of their coefficient
//! vectors in the power basis of a fixed irreducible modulus. Multiplication
//! goes through full exp/log tables, which is practical because every field
//! used by the workbench has at most a few million elements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{factorize, is_prime, pow_u64};

/// Largest field the tower will tabulate.
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u64,
    pub e: u32,
    pub ell: u64,
}

impl FieldParams {
    /// Checks that `p` and `l` are prime and distinct.
    pub fn new(p: u64, e: u32, ell: u64) -> Result<Self> {
        let params = Self::new_allowing_wild(p, e, ell)?;
        if p == ell {
            return Err(Error::InvalidParams(format!("p = l = {p}; the tame theory needs p != l")));
        }
        Ok(params)
    }

    /// Like [`FieldParams::new`] but allows `p = l`, which is harmless for
    /// computations that only involve the residue field and unit characters.
    pub fn new_allowing_wild(p: u64, e: u32, ell: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("p = {p} is not prime")));
        }
        if !is_prime(ell) {
            return Err(Error::InvalidParams(format!("l = {ell} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidParams("e must be positive".into()));
        }
        Ok(FieldParams { p, e, ell })
    }

    pub fn q(&self) -> u64 {
        pow_u64(self.p, self.e)
    }

    /// `q^l`, the size of the top field.
    pub fn field_size(&self) -> u64 {
        pow_u64(self.q(), self.ell as u32)
    }
}

/// An element of the top field, as the code of its coefficient vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct TowerElem(pub u32);

impl TowerElem {
    pub const ZERO: TowerElem = TowerElem(0);
    pub const ONE: TowerElem = TowerElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Dense polynomial arithmetic over `F_p`, low degree first.
mod fp_poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    fn inv(a: u64, p: u64) -> u64 {
        crate::util::pow_mod(a, p - 2, p)
    }

    /// Remainder of `a` modulo a nonzero `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv(m[dm], p);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] * lead_inv % p;
            for (j, &mj) in m.iter().enumerate() {
                let idx = top - dm + j;
                r[idx] = (r[idx] + p - c * mj % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(base: &[u64], mut exp: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            exp >>= 1;
        }
        acc
    }

    /// Rabin's irreducibility test for a monic `f` of degree `d >= 1`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let d = f.len() - 1;
        let x = vec![0, 1];
        let pd = (p as u128).pow(d as u32);
        if sub(&powmod(&x, pd, f, p), &rem(&x, f, p), p) != Vec::<u64>::new() {
            return false;
        }
        for (r, _) in crate::util::factorize(d as u64) {
            let e = (p as u128).pow((d as u64 / r) as u32);
            let h = sub(&powmod(&x, e, f, p), &x, p);
            if gcd(f, &h, p).len() != 1 {
                return false;
            }
        }
        true
    }
}

/// The field `f_{q^l}`, tabulated.
#[derive(Clone, Debug)]
pub struct Tower {
    params: FieldParams,
    q: u64,
    degree: usize,
    size: u64,
    modulus: Vec<u64>,
    gen: TowerElem,
    exp: Vec<TowerElem>,
    log: Vec<u32>,
    /// Images of the basis monomials under `x -> x^q`.
    frob_basis: Vec<Vec<u64>>,
}

impl Tower {
    pub fn new(params: FieldParams) -> Result<Self> {
        let q = params.q();
        let degree = params.e as usize * params.ell as usize;
        let size = params.field_size();
        if size > MAX_FIELD_SIZE {
            return Err(Error::BudgetExceeded { needed: size, budget: MAX_FIELD_SIZE });
        }
        let p = params.p;
        let modulus = least_irreducible(p, degree);
        let mut tower = Tower {
            params,
            q,
            degree,
            size,
            modulus,
            gen: TowerElem::ZERO,
            exp: Vec::new(),
            log: Vec::new(),
            frob_basis: Vec::new(),
        };
        tower.gen = tower.find_generator();
        tower.build_tables()?;
        tower.frob_basis = (0..degree)
            .map(|i| {
                let mut mono = vec![0u64; i + 1];
                mono[i] = 1;
                let mut img = fp_poly::powmod(&mono, q as u128, &tower.modulus, p);
                img.resize(degree, 0);
                img
            })
            .collect();
        Ok(tower)
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn ell(&self) -> u64 {
        self.params.ell
    }

    /// Number of elements of the top field, `q^l`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Order of the cyclic group of units, `q^l - 1`.
    pub fn unit_order(&self) -> u64 {
        self.size - 1
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic modulus over `F_p`, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> TowerElem {
        self.gen
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> TowerElem {
        let mut reduced: Vec<u64> = coeffs.iter().map(|c| c % self.p()).collect();
        if reduced.len() > self.degree {
            reduced = fp_poly::rem(&reduced, &self.modulus, self.p());
        }
        let mut code = 0u64;
        for &c in reduced.iter().rev() {
            code = code * self.p() + c;
        }
        TowerElem(code as u32)
    }

    pub fn coeffs(&self, x: TowerElem) -> Vec<u64> {
        let mut code = x.0 as u64;
        (0..self.degree)
            .map(|_| {
                let c = code % self.p();
                code /= self.p();
                c
            })
            .collect()
    }

    /// The image of an integer under `Z -> F_p -> f_{q^l}`.
    pub fn from_int(&self, n: i64) -> TowerElem {
        TowerElem(n.rem_euclid(self.p() as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = TowerElem> {
        (0..self.size as u32).map(TowerElem)
    }

    pub fn units(&self) -> impl Iterator<Item = TowerElem> {
        (1..self.size as u32).map(TowerElem)
    }

    pub fn add(&self, a: TowerElem, b: TowerElem) -> TowerElem {
        let p = self.p() as u32;
        let (mut x, mut y) = (a.0, b.0);
        let mut code = 0u32;
        let mut place = 1u32;
        while x > 0 || y > 0 {
            code += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        TowerElem(code)
    }

    pub fn neg(&self, a: TowerElem) -> TowerElem {
        let p = self.p() as u32;
        let mut x = a.0;
        let mut code = 0u32;
        let mut place = 1u32;
        while x > 0 {
            code += ((p - x % p) % p) * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        TowerElem(code)
    }

    pub fn sub(&self, a: TowerElem, b: TowerElem) -> TowerElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: TowerElem, b: TowerElem) -> TowerElem {
        if a.is_zero() || b.is_zero() {
            return TowerElem::ZERO;
        }
        let n = self.unit_order();
        let k = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % n;
        self.exp[k as usize]
    }

    pub fn inv(&self, a: TowerElem) -> Result<TowerElem> {
        let k = self.dlog(a)?;
        Ok(self.exp((self.unit_order() - k) % self.unit_order()))
    }

    pub fn pow(&self, a: TowerElem, k: i64) -> Result<TowerElem> {
        if a.is_zero() {
            return match k {
                0 => Ok(TowerElem::ONE),
                k if k > 0 => Ok(TowerElem::ZERO),
                _ => Err(Error::ZeroElement),
            };
        }
        let n = self.unit_order() as i128;
        let e = (self.log[a.0 as usize] as i128 * k as i128).rem_euclid(n);
        Ok(self.exp[e as usize])
    }

    /// `gen^k`.
    pub fn exp(&self, k: u64) -> TowerElem {
        self.exp[(k % self.unit_order()) as usize]
    }

    /// The exponent `k` in `Z/(q^l - 1)` with `gen^k = x`.
    pub fn dlog(&self, x: TowerElem) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.log[x.0 as usize] as u64)
    }

    /// `x -> x^q`, computed as an `F_p`-linear map.
    pub fn frobenius(&self, x: TowerElem) -> TowerElem {
        let p = self.p();
        let c = self.coeffs(x);
        let mut out = vec![0u64; self.degree];
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(&self.frob_basis[i]) {
                *o = (*o + ci * b) % p;
            }
        }
        self.from_coeffs(&out)
    }

    /// `x -> x^{q^s}` for any integer `s` (negative powers use `Frob^l = 1`).
    pub fn frobenius_pow(&self, x: TowerElem, s: i64) -> TowerElem {
        let s = s.rem_euclid(self.ell() as i64);
        (0..s).fold(x, |acc, _| self.frobenius(acc))
    }

    /// `x^{1 + q + ... + q^{l-1}}`, the norm to `f_q`.
    pub fn subfield_norm(&self, x: TowerElem) -> TowerElem {
        let mut acc = TowerElem::ONE;
        let mut conj = x;
        for _ in 0..self.ell() {
            acc = self.mul(acc, conj);
            conj = self.frobenius(conj);
        }
        acc
    }

    /// Whether `x` lies in `f_q`.
    pub fn in_base_field(&self, x: TowerElem) -> bool {
        self.frobenius(x) == x
    }

    /// A root of a monic polynomial with coefficients in `F_p` (low degree
    /// first), choosing the root with least discrete logarithm (zero first).
    pub fn least_root(&self, poly: &[i64]) -> Option<TowerElem> {
        let coeffs: Vec<TowerElem> = poly.iter().map(|&c| self.from_int(c)).collect();
        let eval = |x: TowerElem| {
            coeffs.iter().rev().fold(TowerElem::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
        };
        if eval(TowerElem::ZERO).is_zero() {
            return Some(TowerElem::ZERO);
        }
        (0..self.unit_order()).map(|k| self.exp(k)).find(|&x| eval(x).is_zero())
    }

    fn poly_of(&self, x: TowerElem) -> Vec<u64> {
        let mut c = self.coeffs(x);
        fp_poly::trim(&mut c);
        c
    }

    fn find_generator(&self) -> TowerElem {
        let n = self.unit_order();
        let primes: Vec<u64> = factorize(n).into_iter().map(|(r, _)| r).collect();
        let p = self.p();
        for code in 1..self.size as u32 {
            let g = self.poly_of(TowerElem(code));
            let one = fp_poly::rem(&[1], &self.modulus, p);
            if primes.iter().all(|&r| fp_poly::powmod(&g, (n / r) as u128, &self.modulus, p) != one) {
                return TowerElem(code);
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    fn build_tables(&mut self) -> Result<()> {
        let n = self.unit_order() as usize;
        let p = self.p();
        let g = self.poly_of(self.gen);
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![u32::MAX; self.size as usize];
        let mut cur = vec![1u64];
        for k in 0..n {
            let e = self.from_coeffs(&cur);
            if log[e.0 as usize] != u32::MAX {
                return Err(Error::CrossCheck(format!("generator repeats at power {k}")));
            }
            log[e.0 as usize] = k as u32;
            exp.push(e);
            cur = fp_poly::mulmod(&cur, &g, &self.modulus, p);
        }
        self.exp = exp;
        self.log = log;
        Ok(())
    }
}

/// The least monic irreducible polynomial of degree `d` over `F_p`, ordering
/// candidates by the integer `sum c_i p^i` of their lower coefficients.
pub fn least_irreducible(p: u64, d: usize) -> Vec<u64> {
    let count = pow_u64(p, d as u32);
    for code in 0..count {
        let mut f = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if fp_poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(p: u64, e: u32, ell: u64) -> Tower {
        Tower::new(FieldParams::new_allowing_wild(p, e, ell).unwrap()).unwrap()
    }

    /// Multiplication straight from the modulus, independent of the tables.
    fn slow_mul(t: &Tower, a: TowerElem, b: TowerElem) -> TowerElem {
        let pa = t.coeffs(a);
        let pb = t.coeffs(b);
        t.from_coeffs(&fp_poly::mulmod(&pa, &pb, t.modulus(), t.p()))
    }

    fn slow_pow(t: &Tower, a: TowerElem, k: u64) -> TowerElem {
        (0..k).fold(TowerElem::ONE, |acc, _| slow_mul(t, acc, a))
    }

    #[test]
    fn moduli_are_least_irreducibles() {
        // x^2 + 1 is the first irreducible quadratic over F_3 in this order
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(least_irreducible(5, 2), vec![2, 0, 1]);
        // brute-force root check: a cubic without roots in F_7 is irreducible
        let f = least_irreducible(7, 3);
        assert!((0..7u64).all(|x| (f[0] + f[1] * x + f[2] * x * x + x * x * x) % 7 != 0));
    }

    #[test]
    fn generator_has_full_order() {
        for (p, e, ell) in [(3, 1, 2), (5, 1, 2), (7, 1, 3), (2, 2, 3), (3, 1, 3)] {
            let t = tower(p, e, ell);
            let g = t.generator();
            let n = t.unit_order();
            assert_eq!(slow_pow(&t, g, n), TowerElem::ONE);
            for (r, _) in factorize(n) {
                assert_ne!(slow_pow(&t, g, n / r), TowerElem::ONE);
            }
        }
    }

    #[test]
    fn dlog_examples() {
        let t = tower(3, 1, 2);
        let g = t.generator();
        assert_eq!(t.dlog(g), Ok(1));
        assert_eq!(t.dlog(TowerElem::ONE), Ok(0));
        assert_eq!(t.dlog(t.mul(g, g)), Ok(2));
        assert_eq!(t.dlog(TowerElem::ZERO), Err(Error::ZeroElement));
    }

    #[test]
    fn frobenius_examples() {
        let t = tower(3, 1, 2);
        for c in 0..3 {
            let x = t.from_int(c);
            assert_eq!(t.frobenius(x), x);
        }
        let g = t.generator();
        assert_eq!(t.frobenius(g), slow_pow(&t, g, 3));
    }

    #[test]
    fn norm_examples() {
        let t = tower(3, 1, 2);
        let g = t.generator();
        assert_eq!(t.subfield_norm(TowerElem::ONE), TowerElem::ONE);
        let n = t.subfield_norm(g);
        assert_eq!(n, slow_pow(&t, g, 4));
        assert!(t.in_base_field(n));
        // g^4 has order 2, so it is -1
        assert_eq!(n, t.from_int(-1));
    }

    #[test]
    fn tables_agree_with_polynomial_arithmetic() {
        for (p, e, ell) in [(3, 1, 2), (2, 2, 2), (5, 1, 2)] {
            let t = tower(p, e, ell);
            for a in t.elements() {
                for b in t.elements() {
                    assert_eq!(t.mul(a, b), slow_mul(&t, a, b));
                }
            }
        }
    }

    /// Exhaustive for every tower with at most 6561 elements used by the suites.
    #[test]
    fn frobenius_is_a_field_automorphism() {
        for (p, e, ell) in [(3, 1, 2), (5, 1, 2), (7, 1, 2), (3, 1, 3), (7, 1, 3), (3, 2, 2), (3, 4, 2)] {
            let t = tower(p, e, ell);
            assert!(t.size() <= 6561);
            let sample: Vec<TowerElem> = t.elements().step_by(((t.size() / 90) as usize).max(1)).collect();
            for a in t.elements() {
                let fa = t.frobenius(a);
                assert_eq!(fa, t.pow(a, t.q() as i64).unwrap());
                assert_eq!(t.frobenius_pow(a, t.ell() as i64), a);
                for &b in &sample {
                    assert_eq!(t.frobenius(t.add(a, b)), t.add(fa, t.frobenius(b)));
                    assert_eq!(t.frobenius(t.mul(a, b)), t.mul(fa, t.frobenius(b)));
                }
            }
        }
    }

    #[test]
    fn exp_and_dlog_are_inverse() {
        let t = tower(7, 1, 3);
        for k in 0..t.unit_order() {
            assert_eq!(t.dlog(t.exp(k)), Ok(k));
        }
        for x in t.units() {
            assert_eq!(t.exp(t.dlog(x).unwrap()), x);
        }
    }

    #[test]
    fn norm_is_surjective_with_equal_fibers() {
        for (p, e, ell) in [(3, 1, 2), (5, 1, 2), (3, 1, 3), (2, 2, 2)] {
            let t = tower(p, e, ell);
            let mut counts = std::collections::HashMap::new();
            for x in t.units() {
                let n = t.subfield_norm(x);
                assert!(t.in_base_field(n));
                *counts.entry(n).or_insert(0u64) += 1;
            }
            assert_eq!(counts.len() as u64, t.q() - 1);
            let fiber = (t.size() - 1) / (t.q() - 1);
            assert!(counts.values().all(|&c| c == fiber));
        }
    }

    #[test]
    fn field_operations() {
        let t = tower(5, 1, 2);
        for a in t.elements() {
            assert_eq!(t.add(a, t.neg(a)), TowerElem::ZERO);
            if !a.is_zero() {
                assert_eq!(t.mul(a, t.inv(a).unwrap()), TowerElem::ONE);
            }
            assert_eq!(t.from_coeffs(&t.coeffs(a)), a);
        }
        assert_eq!(t.least_root(&[1, 0, 1]).map(|r| t.mul(r, r)), Some(t.from_int(-1)));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(FieldParams::new(4, 1, 2).is_err());
        assert!(FieldParams::new(3, 1, 4).is_err());
        assert!(FieldParams::new(3, 1, 3).is_err());
        assert!(FieldParams::new_allowing_wild(3, 1, 3).is_ok());
    }
}
