//! Characters of `E^*` of finite level, their Galois twists, admissibility,
//! and the rectifying character `Delta_chi`.
//!
//! A character trivial on `1 + p_E^{r+1}` is determined by its value at the
//! uniformizer and its restriction to the finite group `(o_E / p^{r+1})^*`.
//! [`UnitGroupModel`] enumerates that group, splits it as the Teichmüller
//! cyclic part times a basis of the pro-`p` part, and indexes every element
//! by its coordinates, so characters become exponent vectors.

use serde::{Deserialize, Serialize};

use crate::abelian::pgroup_basis;
use crate::error::{Error, Result};
use crate::field::TowerElem;
use crate::local::{LocalElem, LocalField};
use crate::scalar::RootOfUnity;
use crate::util::{lcm, pow_u64};

/// Default limit on the number of residue vectors enumerated.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Index of an element of the unit group (its mixed-radix coordinate code).
pub type UnitId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitGenerator {
    pub coeffs: Vec<i64>,
    pub order: u64,
}

/// `(o_E / p_E^{r+1})^*` with an internal direct-sum decomposition.
#[derive(Clone, Debug)]
pub struct UnitGroupModel {
    field: LocalField,
    level: u32,
    generators: Vec<UnitGenerator>,
    exponent: u64,
    codes: Vec<u32>,
    id_of_code: Vec<u32>,
    xi_perm: Vec<UnitId>,
    frob_perm: Vec<UnitId>,
    depth: Vec<u8>,
}

impl UnitGroupModel {
    /// Builds the group at level `r` from a field of any precision.
    pub fn build(field: &LocalField, r: u32, budget: u64) -> Result<Self> {
        let size = field.q().checked_pow(field.ell() as u32 * (r + 1)).unwrap_or(u64::MAX);
        if size > budget || size > u32::MAX as u64 / 2 {
            return Err(Error::BudgetExceeded { needed: size, budget });
        }
        let lf = field.with_precision(r + 1)?;
        let ell = lf.ell();
        let modulus = lf.modulus();
        let encode = |c: &[i64]| -> u32 {
            c.iter().rev().fold(0u64, |acc, &x| acc * modulus as u64 + x.rem_euclid(modulus) as u64) as u32
        };
        let decode = |mut code: u32| -> Vec<i64> {
            (0..ell)
                .map(|_| {
                    let c = (code as u64 % modulus as u64) as i64;
                    code = (code as u64 / modulus as u64) as u32;
                    c
                })
                .collect()
        };
        let mul = |a: u32, b: u32| encode(&lf.ring_mul(&decode(a), &decode(b)));
        let one = encode(&lf.ring_one());

        let tower = lf.tower();
        let teich_gen = encode(&lf.ring_teichmuller(tower.generator()));
        let mut generators = vec![UnitGenerator { coeffs: decode(teich_gen), order: tower.unit_order() }];
        let principal: Vec<u32> =
            (0..size as u32).filter(|&c| lf.ring_residue(&decode(c)) == TowerElem::ONE).collect();
        let basis = pgroup_basis(&principal, one, lf.p() as u64, mul)?;
        generators.extend(basis.basis.iter().map(|b| UnitGenerator { coeffs: decode(b.element), order: b.order }));

        let radices: Vec<u64> = generators.iter().map(|g| g.order).collect();
        let order: u64 = radices.iter().product();
        let expected = tower.unit_order() * pow_u64(lf.q(), ell as u32 * r);
        if order != expected {
            return Err(Error::CrossCheck(format!("unit group has order {order}, expected {expected}")));
        }
        // regenerate the whole group from the basis, in coordinate order
        let mut codes = Vec::with_capacity(order as usize);
        let mut id_of_code = vec![u32::MAX; size as usize];
        let teich_powers: Vec<u32> = {
            let mut v = Vec::with_capacity(radices[0] as usize);
            let mut cur = one;
            for _ in 0..radices[0] {
                v.push(cur);
                cur = mul(cur, teich_gen);
            }
            v
        };
        // principal part by coordinates (first basis element varies fastest)
        let mut principal_codes = vec![one];
        for b in &basis.basis {
            let mut next = Vec::with_capacity(principal_codes.len() * b.order as usize);
            let mut power = one;
            for _ in 0..b.order {
                next.extend(principal_codes.iter().map(|&x| mul(x, power)));
                power = mul(power, b.element);
            }
            principal_codes = next;
        }
        for &u in &principal_codes {
            for &t in &teich_powers {
                let c = mul(t, u);
                if id_of_code[c as usize] != u32::MAX {
                    return Err(Error::CrossCheck("unit group basis is not independent".into()));
                }
                id_of_code[c as usize] = codes.len() as u32;
                codes.push(c);
            }
        }
        let units = (0..size as u32).filter(|&c| lf.ring_is_unit(&decode(c))).count() as u64;
        if units != order {
            return Err(Error::CrossCheck("unit group basis does not generate".into()));
        }

        let xi_perm = codes.iter().map(|&c| id_of_code[encode(&lf.ring_xi(&decode(c))) as usize]).collect();
        let frob_perm = codes.iter().map(|&c| id_of_code[encode(&lf.ring_frobenius(&decode(c))) as usize]).collect();
        let p = lf.p();
        let depth = codes
            .iter()
            .map(|&c| {
                let mut d = decode(c);
                d[0] = (d[0] - 1).rem_euclid(modulus);
                d.iter()
                    .filter(|&&x| x != 0)
                    .map(|&x| {
                        let mut x = x;
                        let mut v = 0u8;
                        while x % p == 0 {
                            x /= p;
                            v += 1;
                        }
                        v
                    })
                    .min()
                    .unwrap_or(r as u8 + 1)
            })
            .collect();
        let exponent = radices.iter().fold(1, |acc, &m| lcm(acc, m));
        Ok(UnitGroupModel { field: lf, level: r, generators, exponent, codes, id_of_code, xi_perm, frob_perm, depth })
    }

    /// The local field at precision `r + 1` used for the group law.
    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn order(&self) -> u64 {
        self.codes.len() as u64
    }

    pub fn generators(&self) -> &[UnitGenerator] {
        &self.generators
    }

    pub fn radices(&self) -> Vec<u64> {
        self.generators.iter().map(|g| g.order).collect()
    }

    /// Exponent of the group, the lcm of generator orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn ids(&self) -> impl Iterator<Item = UnitId> {
        0..self.codes.len() as u32
    }

    pub fn identity(&self) -> UnitId {
        0
    }

    pub fn coords(&self, id: UnitId) -> Vec<u64> {
        let mut x = id as u64;
        self.generators
            .iter()
            .map(|g| {
                let c = x % g.order;
                x /= g.order;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[u64]) -> UnitId {
        let mut id = 0u64;
        for (g, &c) in self.generators.iter().zip(coords).rev() {
            id = id * g.order + c % g.order;
        }
        id as UnitId
    }

    pub fn generator_id(&self, i: usize) -> UnitId {
        let mut c = vec![0; self.generators.len()];
        c[i] = 1;
        self.from_coords(&c)
    }

    pub fn mul(&self, a: UnitId, b: UnitId) -> UnitId {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let c: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| x + y).collect();
        self.from_coords(&c)
    }

    pub fn inv(&self, a: UnitId) -> UnitId {
        let c: Vec<u64> = self.coords(a).iter().zip(&self.generators).map(|(&x, g)| (g.order - x) % g.order).collect();
        self.from_coords(&c)
    }

    pub fn pow(&self, a: UnitId, k: i64) -> UnitId {
        let c: Vec<u64> = self
            .coords(a)
            .iter()
            .zip(&self.generators)
            .map(|(&x, g)| (x as i128 * k as i128).rem_euclid(g.order as i128) as u64)
            .collect();
        self.from_coords(&c)
    }

    pub fn xi(&self, a: UnitId) -> UnitId {
        self.xi_perm[a as usize]
    }

    pub fn xi_pow(&self, a: UnitId, i: i64) -> UnitId {
        let i = i.rem_euclid(self.field.ell() as i64);
        (0..i).fold(a, |acc, _| self.xi(acc))
    }

    /// The Frobenius lift `F`, reducing to `x -> x^q`.
    pub fn frobenius(&self, a: UnitId) -> UnitId {
        self.frob_perm[a as usize]
    }

    pub fn coeffs(&self, a: UnitId) -> Vec<i64> {
        let modulus = self.field.modulus() as u64;
        let mut code = self.codes[a as usize] as u64;
        (0..self.field.ell())
            .map(|_| {
                let c = (code % modulus) as i64;
                code /= modulus;
                c
            })
            .collect()
    }

    /// The id of a unit coefficient vector (any precision at least `r + 1`).
    pub fn id_of_coeffs(&self, coeffs: &[i64]) -> Result<UnitId> {
        let m = self.field.modulus();
        let code = coeffs.iter().rev().fold(0u64, |acc, &x| acc * m as u64 + x.rem_euclid(m) as u64);
        match self.id_of_code.get(code as usize) {
            Some(&id) if id != u32::MAX => Ok(id),
            _ => Err(Error::InvalidParams(format!("{coeffs:?} is not a unit"))),
        }
    }

    pub fn id_of_unit(&self, u: &LocalElem) -> Result<UnitId> {
        if u.valuation != 0 {
            return Err(Error::InvalidParams("element is not a unit".into()));
        }
        self.id_of_coeffs(&u.coeffs)
    }

    pub fn residue(&self, a: UnitId) -> TowerElem {
        self.field.ring_residue(&self.coeffs(a))
    }

    pub fn teichmuller(&self, z: TowerElem) -> UnitId {
        self.id_of_coeffs(&self.field.ring_teichmuller(z)).expect("Teichmüller lift of a unit")
    }

    /// Largest `j <= r + 1` with `a in 1 + p^j` (0 if the residue is not 1).
    pub fn depth(&self, a: UnitId) -> u32 {
        self.depth[a as usize] as u32
    }

    /// Generators of `(1 + p^j) / (1 + p^{r+1})`, or of the whole group for `j = 0`.
    pub fn filtration_generators(&self, j: u32) -> Vec<UnitId> {
        if j == 0 {
            return (0..self.generators.len()).map(|i| self.generator_id(i)).collect();
        }
        let ell = self.field.ell();
        let mut out = Vec::new();
        for jj in j..=self.level {
            let pj = pow_u64(self.field.p() as u64, jj) as i64;
            for i in 0..ell {
                let mut c = self.field.ring_one();
                c[i] = (c[i] + pj).rem_euclid(self.field.modulus());
                out.push(self.id_of_coeffs(&c).expect("principal unit"));
            }
        }
        out
    }

    /// `N_{E/F}(a)` as an integer mod `p^{r+1}`.
    pub fn norm(&self, a: UnitId) -> i64 {
        let mut acc = self.field.ring_one();
        let mut conj = a;
        for _ in 0..self.field.ell() {
            acc = self.field.ring_mul(&acc, &self.coeffs(conj));
            conj = self.xi(conj);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0));
        acc[0]
    }

    /// Value of the unit character with the given exponents at `a`.
    pub fn eval_exponents(&self, exps: &[u64], a: UnitId) -> RootOfUnity {
        let mut num: u128 = 0;
        let l = self.exponent as u128;
        for ((&e, c), g) in exps.iter().zip(self.coords(a)).zip(&self.generators) {
            num = (num + e as u128 * c as u128 % g.order as u128 * (l / g.order as u128)) % l;
        }
        RootOfUnity::new(num as i128, self.exponent)
    }

    /// Exponent vector of the character `a -> value(a)`, read off on generators.
    pub fn exponents_from_values<F: Fn(UnitId) -> RootOfUnity>(&self, value: F) -> Result<Vec<u64>> {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                value(self.generator_id(i))
                    .exponent_in(g.order)
                    .ok_or_else(|| Error::CrossCheck("value order does not divide generator order".into()))
            })
            .collect()
    }

    pub fn trivial_char(&self) -> LevelChar {
        LevelChar { unit_exponents: vec![0; self.generators.len()], varpi_value: RootOfUnity::ONE, level: 0 }
    }

    /// Builds a character, computing its exact level.
    pub fn character(&self, unit_exponents: Vec<u64>, varpi_value: RootOfUnity) -> Result<LevelChar> {
        if unit_exponents.len() != self.generators.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} unit exponents, got {}",
                self.generators.len(),
                unit_exponents.len()
            )));
        }
        let exps: Vec<u64> = unit_exponents.iter().zip(&self.generators).map(|(&e, g)| e % g.order).collect();
        let level = self.exact_level(&exps);
        Ok(LevelChar { unit_exponents: exps, varpi_value, level })
    }

    fn exact_level(&self, exps: &[u64]) -> u32 {
        (0..=self.level)
            .find(|&j| self.filtration_generators(j + 1).iter().all(|&g| self.eval_exponents(exps, g).is_one()))
            .unwrap_or(self.level)
    }

    pub fn eval_unit(&self, chi: &LevelChar, a: UnitId) -> RootOfUnity {
        self.eval_exponents(&chi.unit_exponents, a)
    }

    /// `chi(p^n u)`.
    pub fn eval(&self, chi: &LevelChar, n: i64, a: UnitId) -> RootOfUnity {
        self.eval_unit(chi, a) * chi.varpi_value.pow(n)
    }

    /// `chi^xi = chi o xi`.
    pub fn twist(&self, chi: &LevelChar) -> LevelChar {
        let exps = self
            .exponents_from_values(|g| self.eval_unit(chi, self.xi(g)))
            .expect("twist of a character is a character");
        LevelChar { unit_exponents: exps, varpi_value: chi.varpi_value, level: chi.level }
    }

    pub fn twist_pow(&self, chi: &LevelChar, i: i64) -> LevelChar {
        let i = i.rem_euclid(self.field.ell() as i64);
        (0..i).fold(chi.clone(), |acc, _| self.twist(&acc))
    }

    /// `chi != chi^xi`; the value at the uniformizer is `xi`-fixed.
    pub fn is_admissible(&self, chi: &LevelChar) -> bool {
        self.twist(chi).unit_exponents != chi.unit_exponents
    }

    /// Whether `chi` is trivial on the kernel of `N_{E/F}`, i.e. factors
    /// through the norm. Computed independently of the Galois action table.
    pub fn factors_through_norm(&self, chi: &LevelChar) -> bool {
        self.ids().filter(|&a| self.norm(a) == 1).all(|a| self.eval_unit(chi, a).is_one())
    }

    pub fn admissible_pair(&self, chi: LevelChar) -> Result<AdmissiblePair> {
        if !self.is_admissible(&chi) {
            return Err(Error::NotAdmissible);
        }
        Ok(AdmissiblePair { q: self.field.q(), ell: self.field.ell() as u64, chi })
    }

    /// Every unit character of exact level `r` that is admissible, in
    /// lexicographic order of exponent vectors.
    pub fn admissible_unit_characters(&self) -> Vec<LevelChar> {
        let radices = self.radices();
        let total: u64 = radices.iter().product();
        let mut out = Vec::new();
        for code in 0..total {
            // lexicographic: the first generator is the most significant digit
            let mut x = code;
            let mut exps = vec![0u64; radices.len()];
            for i in (0..radices.len()).rev() {
                exps[i] = x % radices[i];
                x /= radices[i];
            }
            let chi = LevelChar { level: self.exact_level(&exps), unit_exponents: exps, varpi_value: RootOfUnity::ONE };
            if chi.level == self.level && self.is_admissible(&chi) {
                out.push(chi);
            }
        }
        out
    }

    /// All admissible pairs of exact level `r` with `chi(varpi)` in `mu_N`.
    pub fn enumerate_admissible(&self, varpi_order: u64) -> Vec<AdmissiblePair> {
        let units = self.admissible_unit_characters();
        let mut out = Vec::with_capacity(units.len() * varpi_order as usize);
        for u in &units {
            for k in 0..varpi_order {
                let chi = LevelChar { varpi_value: RootOfUnity::from_exponent(k, varpi_order), ..u.clone() };
                out.push(AdmissiblePair { q: self.field.q(), ell: self.field.ell() as u64, chi });
            }
        }
        out
    }

    /// The Galois orbit of `chi`, starting with `chi`.
    pub fn orbit(&self, chi: &LevelChar) -> Vec<LevelChar> {
        let mut out = vec![chi.clone()];
        let mut cur = self.twist(chi);
        while cur != *chi {
            out.push(cur.clone());
            cur = self.twist(&cur);
        }
        out
    }

    /// Orbit representative: least exponent vector.
    pub fn orbit_representative(&self, chi: &LevelChar) -> LevelChar {
        self.orbit(chi).into_iter().min_by(|a, b| a.unit_exponents.cmp(&b.unit_exponents)).unwrap()
    }

    /// One pair per Galois orbit.
    pub fn orbit_representatives(&self, pairs: &[AdmissiblePair]) -> Vec<AdmissiblePair> {
        let mut out: Vec<AdmissiblePair> = pairs
            .iter()
            .filter(|p| self.orbit_representative(&p.chi) == p.chi)
            .cloned()
            .collect();
        out.sort_by_key(|p| p.chi.sort_key());
        out
    }

    pub fn chi_times(&self, a: &LevelChar, b: &LevelChar) -> LevelChar {
        let exps: Vec<u64> = a
            .unit_exponents
            .iter()
            .zip(&b.unit_exponents)
            .zip(&self.generators)
            .map(|((&x, &y), g)| (x + y) % g.order)
            .collect();
        let level = self.exact_level(&exps);
        LevelChar { unit_exponents: exps, varpi_value: a.varpi_value * b.varpi_value, level }
    }
}

/// A character of `E^* / (1 + p_E^{r+1})`: exponents against the generators
/// of a [`UnitGroupModel`] and the value at the uniformizer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelChar {
    pub unit_exponents: Vec<u64>,
    pub varpi_value: RootOfUnity,
    pub level: u32,
}

impl LevelChar {
    fn sort_key(&self) -> (Vec<u64>, u64, u64) {
        (self.unit_exponents.clone(), self.varpi_value.den(), self.varpi_value.num())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub q: u64,
    pub ell: u64,
    pub chi: LevelChar,
}

impl AdmissiblePair {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "ell": self.ell,
            "r": self.chi.level,
            "unit_exponents": self.chi.unit_exponents,
            "varpi_value": self.chi.varpi_value,
        })
    }
}

/// `Delta_chi`: the unramified quadratic character for `l = 2`, trivial for
/// odd `l`.
pub fn delta_twist(group: &UnitGroupModel, pair: &AdmissiblePair) -> LevelChar {
    let mut d = group.trivial_char();
    if pair.ell == 2 {
        d.varpi_value = RootOfUnity::MINUS_ONE;
    }
    d
}
