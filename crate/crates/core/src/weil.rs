//! Tame regular semisimple elliptic parameters of `GL(l)` as monomial data,
//! the parameter `Ind_{W_E}^{W_F} chi` of an admissible pair, and a
//! brute-force induced-character oracle on a finite quotient of `W_{E/F}`.
//!
//! Inertia data: the restriction of `Ind chi` to inertia is the diagonal
//! `(psi_0, ..., psi_{l-1})` with `psi_i = chi o F^{-i}`, `F` the Frobenius
//! lift. The Frobenius image `f` sends `e_i` to `e_{i+1}` and `e_{l-1}` to
//! `chi(varpi) e_0`, so that `f diag(psi) f^{-1} = diag(psi o F)` and
//! `f^l = chi(varpi) Id`. With the default convention `xi = F^{-1}` this
//! gives `psi_i = chi^{xi^i}`.

use serde::Serialize;

use crate::characters::{AdmissiblePair, LevelChar, UnitGroupModel, UnitId};
use crate::error::{Error, Result};
use crate::scalar::{CyclotomicSum, DenseCyclotomic, MonomialMatrix, RootOfUnity};
use crate::util::lcm;

/// Default budget on the order of the finite Weil quotient.
pub const ORACLE_BUDGET: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trselp {
    pub q: u64,
    pub ell: u64,
    pub depth: u32,
    /// Exponent vectors of `psi_0, ..., psi_{l-1}` on the unit group generators.
    pub inertia: Vec<Vec<u64>>,
    pub frobenius_image: MonomialMatrix,
    /// The Weyl element, `i -> i + 1 mod l`.
    pub weyl: Vec<usize>,
}

impl Trselp {
    /// `chi(varpi)`, recovered as the product of the scalars of `f`.
    pub fn varpi_value(&self) -> RootOfUnity {
        self.frobenius_image.scalars().iter().copied().product()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "ell": self.ell,
            "r": self.depth,
            "inertia_exponents": self.inertia,
            "varpi_value": self.varpi_value(),
            "frobenius_image": self.frobenius_image,
            "normal_form": true,
        })
    }

    /// Checks ellipticity, regularity, the Frobenius relation on inertia and
    /// `f^l = chi(varpi) Id`.
    pub fn verify(&self, group: &UnitGroupModel) -> Result<()> {
        let l = self.ell as usize;
        let f = &self.frobenius_image;
        if f.cycles().len() != 1 || f.size() != l {
            return Err(Error::CrossCheck("Frobenius image is not an l-cycle".into()));
        }
        for i in 0..l {
            for j in i + 1..l {
                if self.inertia[i] == self.inertia[j] {
                    return Err(Error::NotAdmissible);
                }
            }
        }
        if f.pow(self.ell) != MonomialMatrix::scalar(l, self.varpi_value()) {
            return Err(Error::CrossCheck("f^l is not the scalar chi(varpi)".into()));
        }
        // f diag(psi) f^{-1} = diag(psi o F): entry i of the left side is psi_{i-1}
        for i in 0..l {
            let prev = &self.inertia[(i + l - 1) % l];
            let twisted = group.exponents_from_values(|g| group.eval_exponents(&self.inertia[i], group.frobenius(g)))?;
            if *prev != twisted {
                return Err(Error::CrossCheck(format!("inertia entry {i} is not the Frobenius twist of entry {}", (i + l - 1) % l)));
            }
        }
        Ok(())
    }
}

/// `chi o F^{-i}` as an exponent vector.
fn frobenius_twist(group: &UnitGroupModel, exps: &[u64], i: usize) -> Vec<u64> {
    let l = group.field().ell();
    let back = (l - i % l) % l;
    group
        .exponents_from_values(|g| {
            let h = (0..back).fold(g, |acc, _| group.frobenius(acc));
            group.eval_exponents(exps, h)
        })
        .expect("twist of a character")
}

/// `phi(chi) = Ind chi` in normal form.
pub fn induce_parameter(group: &UnitGroupModel, pair: &AdmissiblePair) -> Result<Trselp> {
    if !group.is_admissible(&pair.chi) {
        return Err(Error::NotAdmissible);
    }
    let l = pair.ell as usize;
    let inertia = (0..l).map(|i| frobenius_twist(group, &pair.chi.unit_exponents, i)).collect();
    let mut scalars = vec![RootOfUnity::ONE; l];
    scalars[l - 1] = pair.chi.varpi_value;
    let frobenius_image = MonomialMatrix::new((0..l).map(|i| (i + 1) % l).collect(), scalars)?;
    let phi = Trselp {
        q: pair.q,
        ell: pair.ell,
        depth: pair.chi.level,
        inertia,
        frobenius_image,
        weyl: (0..l).map(|i| (i + 1) % l).collect(),
    };
    phi.verify(group)?;
    Ok(phi)
}

/// Equivalence of parameters: the inertia diagonals agree up to rotation and
/// the Frobenius images have the same monomial normal form.
pub fn parameters_equivalent(a: &Trselp, b: &Trselp) -> bool {
    if (a.q, a.ell, a.depth) != (b.q, b.ell, b.depth) {
        return false;
    }
    let l = a.inertia.len();
    let rotated = (0..l).any(|s| (0..l).all(|i| a.inertia[i] == b.inertia[(i + s) % l]));
    rotated && a.frobenius_image.is_monomially_conjugate(&b.frobenius_image)
}

/// The Galois orbit representative of the pair a parameter came from.
pub fn classify(group: &UnitGroupModel, phi: &Trselp) -> Result<LevelChar> {
    let chi = group.character(phi.inertia[0].clone(), phi.varpi_value())?;
    Ok(group.orbit_representative(&chi))
}

/// An element `j^k varpi^m u` of the finite quotient of `W_{E/F}` in which
/// `varpi^N = 1`, `j^l = varpi` and `j u j^{-1} = F(u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeilElem {
    pub k: u32,
    pub m: u32,
    pub u: UnitId,
}

pub struct FiniteWeilQuotient<'a> {
    group: &'a UnitGroupModel,
    varpi_order: u64,
    ell: u32,
    /// `frob_inv_pow[i][u] = F^{-i}(u)`.
    frob_inv_pow: Vec<Vec<UnitId>>,
}

impl<'a> FiniteWeilQuotient<'a> {
    pub fn new(group: &'a UnitGroupModel, varpi_order: u64, budget: u64) -> Result<Self> {
        let ell = group.field().ell() as u64;
        let order = ell * varpi_order * group.order();
        if varpi_order == 0 {
            return Err(Error::InvalidParams("varpi order must be positive".into()));
        }
        if order > budget {
            return Err(Error::BudgetExceeded { needed: order, budget });
        }
        let mut frob_inv_pow = vec![group.ids().collect::<Vec<_>>()];
        // F^{-1} = F^{l-1}
        let f_inv: Vec<UnitId> =
            group.ids().map(|u| (0..ell - 1).fold(u, |acc, _| group.frobenius(acc))).collect();
        for i in 1..ell as usize {
            let prev: &Vec<UnitId> = &frob_inv_pow[i - 1];
            let next = prev.iter().map(|&u| f_inv[u as usize]).collect();
            frob_inv_pow.push(next);
        }
        Ok(FiniteWeilQuotient { group, varpi_order, ell: ell as u32, frob_inv_pow })
    }

    pub fn order(&self) -> u64 {
        self.ell as u64 * self.varpi_order * self.group.order()
    }

    pub fn varpi_order(&self) -> u64 {
        self.varpi_order
    }

    pub fn elements(&self) -> impl Iterator<Item = WeilElem> + '_ {
        let n = self.varpi_order as u32;
        (0..self.ell).flat_map(move |k| (0..n).flat_map(move |m| self.group.ids().map(move |u| WeilElem { k, m, u })))
    }

    pub fn identity(&self) -> WeilElem {
        WeilElem { k: 0, m: 0, u: self.group.identity() }
    }

    pub fn j(&self) -> WeilElem {
        WeilElem { k: 1 % self.ell, m: if self.ell == 1 { 1 } else { 0 }, u: self.group.identity() }
    }

    pub fn varpi(&self) -> WeilElem {
        WeilElem { k: 0, m: 1 % self.varpi_order as u32, u: self.group.identity() }
    }

    pub fn unit(&self, u: UnitId) -> WeilElem {
        WeilElem { k: 0, m: 0, u }
    }

    pub fn mul(&self, a: WeilElem, b: WeilElem) -> WeilElem {
        // u1 j^{k2} = j^{k2} F^{-k2}(u1)
        let moved = self.frob_inv_pow[b.k as usize][a.u as usize];
        let k = a.k + b.k;
        let carry = k / self.ell;
        WeilElem {
            k: k % self.ell,
            m: ((a.m + b.m + carry) as u64 % self.varpi_order) as u32,
            u: self.group.mul(moved, b.u),
        }
    }

    pub fn inv(&self, a: WeilElem) -> WeilElem {
        // (j^k varpi^m u)^{-1} = u^{-1} varpi^{-m} j^{-k}
        let n = self.varpi_order as u32;
        let u_inv = self.unit(self.group.inv(a.u));
        let varpi_inv = WeilElem { k: 0, m: (n - a.m % n) % n, u: self.group.identity() };
        let j_inv = if a.k == 0 {
            self.identity()
        } else {
            // j^{-k} = j^{l-k} varpi^{-1}
            WeilElem { k: self.ell - a.k, m: (n - 1 % n) % n, u: self.group.identity() }
        };
        self.mul(self.mul(u_inv, varpi_inv), j_inv)
    }

    /// The induced character of `chi` from the index-`l` subgroup
    /// `<varpi> x (o_E/p^{r+1})^*`, by the coset formula with
    /// representatives `j^i`.
    pub fn induced_character(&self, chi: &LevelChar) -> Result<Vec<CyclotomicSum>> {
        let a = chi.varpi_value;
        if self.varpi_order % a.order() != 0 {
            return Err(Error::IncompatibleVarpiOrder { order: a.order(), modulus: self.varpi_order });
        }
        let reps: Vec<WeilElem> = (0..self.ell).map(|i| WeilElem { k: i, m: 0, u: self.group.identity() }).collect();
        let reps_inv: Vec<WeilElem> = reps.iter().map(|&r| self.inv(r)).collect();
        Ok(self
            .elements()
            .map(|g| {
                let mut s = CyclotomicSum::zero();
                for (r, ri) in reps.iter().zip(&reps_inv) {
                    let c = self.mul(self.mul(*ri, g), *r);
                    if c.k == 0 {
                        s.add_term(self.group.eval_unit(chi, c.u) * a.pow(c.m as i64), 1);
                    }
                }
                s
            })
            .collect())
    }

    /// `<X, Y> = |W|^{-1} sum_g X(g) conj(Y(g))`, exactly.
    pub fn inner_product(&self, x: &[CyclotomicSum], y: &[CyclotomicSum]) -> Result<i64> {
        let order = x
            .iter()
            .chain(y)
            .fold(lcm(self.group.exponent(), self.varpi_order), |acc, s| lcm(acc, s.conductor()));
        let mut acc = DenseCyclotomic::new(order);
        for (a, b) in x.iter().zip(y) {
            for (ra, ma) in a.terms() {
                for (rb, mb) in b.terms() {
                    acc.add_root(ra * rb.inv(), ma * mb);
                }
            }
        }
        let total = acc
            .as_integer()
            .ok_or_else(|| Error::CrossCheck("inner product is not rational".into()))?;
        let w = self.order() as i64;
        if total % w != 0 {
            return Err(Error::CrossCheck(format!("inner product {total}/{w} is not an integer")));
        }
        Ok(total / w)
    }
}

/// `<Ind chi, Ind chi'>` on the smallest quotient that carries both.
pub fn induced_inner_product(
    group: &UnitGroupModel,
    chi: &LevelChar,
    other: &LevelChar,
    varpi_order: Option<u64>,
    budget: u64,
) -> Result<i64> {
    let n = varpi_order.unwrap_or_else(|| lcm(chi.varpi_value.order(), other.varpi_value.order()));
    let w = FiniteWeilQuotient::new(group, n, budget)?;
    let x = w.induced_character(chi)?;
    let y = w.induced_character(other)?;
    w.inner_product(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::DEFAULT_BUDGET;
    use crate::field::FieldParams;
    use crate::local::{LocalField, PresentationKind, XiConvention};

    fn group_with(p: u64, ell: u64, r: u32, conv: XiConvention) -> UnitGroupModel {
        let f = LocalField::new(FieldParams::new_allowing_wild(p, 1, ell).unwrap(), r + 1, PresentationKind::Auto, conv)
            .unwrap();
        UnitGroupModel::build(&f, r, DEFAULT_BUDGET).unwrap()
    }

    fn group(p: u64, ell: u64, r: u32) -> UnitGroupModel {
        group_with(p, ell, r, XiConvention::default())
    }

    fn pair(g: &UnitGroupModel, exps: Vec<u64>, a: RootOfUnity) -> AdmissiblePair {
        g.admissible_pair(g.character(exps, a).unwrap()).unwrap()
    }

    #[test]
    fn frobenius_image_shapes() {
        let a = RootOfUnity::new(1, 4);
        let g = group(3, 2, 0);
        let phi = induce_parameter(&g, &pair(&g, vec![1], a)).unwrap();
        let f = &phi.frobenius_image;
        assert_eq!((f.entry(0, 1), f.entry(1, 0)), (Some(a), Some(RootOfUnity::ONE)));
        assert_eq!((f.entry(0, 0), f.entry(1, 1)), (None, None));

        let g = group(7, 3, 0);
        let chi = g.admissible_unit_characters().remove(0);
        let phi = induce_parameter(&g, &g.admissible_pair(LevelChar { varpi_value: a, ..chi }).unwrap()).unwrap();
        assert_eq!(phi.frobenius_image.row_scalars(), vec![a, RootOfUnity::ONE, RootOfUnity::ONE]);
        assert_eq!(phi.frobenius_image.entry(0, 2), Some(a));
        assert_eq!(phi.frobenius_image.pow(3), MonomialMatrix::scalar(3, a));
    }

    #[test]
    fn non_admissible_is_rejected() {
        let g = group(3, 2, 0);
        let chi = g.character(vec![4], RootOfUnity::ONE).unwrap();
        let bad = AdmissiblePair { q: 3, ell: 2, chi };
        assert_eq!(induce_parameter(&g, &bad), Err(Error::NotAdmissible));
    }

    #[test]
    fn default_convention_diagonal_is_chi_xi_powers() {
        let g = group(7, 3, 0);
        for chi in g.admissible_unit_characters().iter().step_by(9) {
            let phi = induce_parameter(&g, &g.admissible_pair(chi.clone()).unwrap()).unwrap();
            for i in 0..3 {
                assert_eq!(phi.inertia[i], g.twist_pow(chi, i as i64).unit_exponents);
            }
        }
    }

    #[test]
    fn both_conventions_give_consistent_parameters() {
        for conv in [XiConvention::InverseFrobenius, XiConvention::Frobenius] {
            let g = group_with(7, 3, 0, conv);
            for chi in g.admissible_unit_characters().iter().step_by(5) {
                let phi = induce_parameter(&g, &g.admissible_pair(chi.clone()).unwrap()).unwrap();
                phi.verify(&g).unwrap();
            }
        }
    }

    #[test]
    fn wrong_diagonal_order_is_detected() {
        let g = group(7, 3, 0);
        let chi = g.admissible_unit_characters().remove(0);
        let mut phi = induce_parameter(&g, &g.admissible_pair(chi).unwrap()).unwrap();
        phi.inertia.swap(1, 2);
        assert!(matches!(phi.verify(&g), Err(Error::CrossCheck(_))));
    }

    #[test]
    fn equivalence_and_classification() {
        let g = group(5, 2, 0);
        let pairs = g.enumerate_admissible(2);
        let phis: Vec<Trselp> = pairs.iter().map(|p| induce_parameter(&g, p).unwrap()).collect();
        for (p, phi) in pairs.iter().zip(&phis) {
            let twisted = AdmissiblePair { chi: g.twist(&p.chi), ..p.clone() };
            assert!(parameters_equivalent(phi, &induce_parameter(&g, &twisted).unwrap()));
            assert!(parameters_equivalent(phi, phi));
            assert_eq!(classify(&g, phi).unwrap(), g.orbit_representative(&p.chi));
        }
        // equivalence classes are exactly the Galois orbits
        for (i, a) in phis.iter().enumerate() {
            for (j, b) in phis.iter().enumerate() {
                let same_orbit = g.orbit_representative(&pairs[i].chi) == g.orbit_representative(&pairs[j].chi);
                assert_eq!(parameters_equivalent(a, b), same_orbit);
            }
        }
    }

    #[test]
    fn quotient_group_laws() {
        let g = group(3, 2, 0);
        let w = FiniteWeilQuotient::new(&g, 4, ORACLE_BUDGET).unwrap();
        assert_eq!(w.order(), 64);
        let els: Vec<WeilElem> = w.elements().collect();
        for &a in els.iter().step_by(3) {
            assert_eq!(w.mul(a, w.inv(a)), w.identity());
            assert_eq!(w.mul(w.inv(a), a), w.identity());
            for &b in els.iter().step_by(5) {
                for &c in els.iter().step_by(7) {
                    assert_eq!(w.mul(w.mul(a, b), c), w.mul(a, w.mul(b, c)));
                }
            }
        }
        // j^l = varpi, varpi central, j u j^{-1} = F(u)
        let j = w.j();
        assert_eq!(w.mul(j, j), w.varpi());
        for &a in &els {
            assert_eq!(w.mul(w.varpi(), a), w.mul(a, w.varpi()));
        }
        for u in g.ids() {
            assert_eq!(w.mul(w.mul(j, w.unit(u)), w.inv(j)), w.unit(g.frobenius(u)));
            if g.xi(u) == u {
                let x = w.unit(u);
                assert!(els.iter().all(|&a| w.mul(a, x) == w.mul(x, a)));
            }
        }
    }

    #[test]
    fn oracle_values_on_units() {
        let g = group(7, 3, 0);
        let chi = g.admissible_unit_characters().remove(3);
        let w = FiniteWeilQuotient::new(&g, 1, ORACLE_BUDGET).unwrap();
        let row = w.induced_character(&chi).unwrap();
        for (idx, e) in w.elements().enumerate() {
            if e.k != 0 {
                assert!(row[idx].is_zero());
                continue;
            }
            let expected = CyclotomicSum::from_roots((0..3).map(|i| g.eval_unit(&chi, g.xi_pow(e.u, i))));
            assert_eq!(row[idx], expected);
        }
    }

    #[test]
    fn mackey_norms() {
        let g = group(3, 2, 0);
        for e in 1..8u64 {
            let chi = g.character(vec![e], RootOfUnity::new(1, 4)).unwrap();
            let n = induced_inner_product(&g, &chi, &chi, None, ORACLE_BUDGET).unwrap();
            assert_eq!(n, if g.is_admissible(&chi) { 1 } else { 2 }, "e = {e}");
            let t = g.twist(&chi);
            assert_eq!(induced_inner_product(&g, &chi, &t, None, ORACLE_BUDGET).unwrap(), n);
        }
        let a = g.character(vec![1], RootOfUnity::ONE).unwrap();
        let b = g.character(vec![2], RootOfUnity::ONE).unwrap();
        assert_eq!(induced_inner_product(&g, &a, &b, None, ORACLE_BUDGET).unwrap(), 0);
    }

    #[test]
    fn oracle_errors() {
        let g = group(3, 2, 0);
        let chi = g.character(vec![1], RootOfUnity::new(1, 3)).unwrap();
        let w = FiniteWeilQuotient::new(&g, 4, ORACLE_BUDGET).unwrap();
        assert_eq!(w.induced_character(&chi), Err(Error::IncompatibleVarpiOrder { order: 3, modulus: 4 }));
        assert!(matches!(FiniteWeilQuotient::new(&g, 1000, ORACLE_BUDGET), Err(Error::BudgetExceeded { .. })));
    }
}
