//! The torus character `chi_phi = chi_s (x) chi_tau` attached to a tame
//! elliptic parameter.
//!
//! `chi_s` is computed through the chain of isomorphisms: a unit `z` is sent
//! to the fixed point `eta(z) = (z, F z, ..., F^{l-1} z)` of the twisted
//! Frobenius `Phi_sigma(x_1, ..., x_l) = (F x_l, F x_1, ..., F x_{l-1})`, a
//! preimage of `eta(z)` under the twisted norm is chosen, and the character
//! `Lambda(x) = prod psi_i(x_{i+1})` built from the inertia diagonal is
//! evaluated there. At depth zero the torus lives over the residue field and
//! `F` is `x -> x^q`; at positive depth it lives over `(o_E/p^{r+1})^*`.
//! `chi_tau` is read off from the diagonal `tau` in the determinant class of
//! the Frobenius image.

use std::fmt::Debug;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characters::{LevelChar, UnitGroupModel, UnitId};
use crate::error::{Error, Result};
use crate::field::{Tower, TowerElem};
use crate::scalar::{MonomialMatrix, RootOfUnity};
use crate::weil::Trselp;

/// A finite abelian group with a Frobenius automorphism of order dividing `l`.
pub trait TorusBase {
    type Elem: Copy + Eq + Hash + Debug;

    fn ell(&self) -> usize;
    fn one(&self) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Self::Elem;
    fn frobenius(&self, a: Self::Elem) -> Self::Elem;
    fn elements(&self) -> Vec<Self::Elem>;
    fn random<R: Rng>(&self, rng: &mut R) -> Self::Elem;
    /// Value of the character with the given exponent data.
    fn eval_char(&self, exps: &[u64], a: Self::Elem) -> RootOfUnity;
}

/// `f_{q^l}^*` with `x -> x^q`. Characters are a single exponent against
/// the tower generator.
impl TorusBase for Tower {
    type Elem = TowerElem;

    fn ell(&self) -> usize {
        Tower::ell(self) as usize
    }

    fn one(&self) -> TowerElem {
        TowerElem::ONE
    }

    fn mul(&self, a: TowerElem, b: TowerElem) -> TowerElem {
        Tower::mul(self, a, b)
    }

    fn inv(&self, a: TowerElem) -> TowerElem {
        Tower::inv(self, a).expect("torus elements are nonzero")
    }

    fn frobenius(&self, a: TowerElem) -> TowerElem {
        Tower::frobenius(self, a)
    }

    fn elements(&self) -> Vec<TowerElem> {
        self.units().collect()
    }

    fn random<R: Rng>(&self, rng: &mut R) -> TowerElem {
        self.exp(rng.gen_range(0..self.unit_order()))
    }

    fn eval_char(&self, exps: &[u64], a: TowerElem) -> RootOfUnity {
        let k = self.dlog(a).expect("torus elements are nonzero");
        RootOfUnity::new(exps[0] as i128 * k as i128, self.unit_order())
    }
}

/// `(o_E/p^{r+1})^*` with the Frobenius lift.
impl TorusBase for UnitGroupModel {
    type Elem = UnitId;

    fn ell(&self) -> usize {
        self.field().ell()
    }

    fn one(&self) -> UnitId {
        self.identity()
    }

    fn mul(&self, a: UnitId, b: UnitId) -> UnitId {
        UnitGroupModel::mul(self, a, b)
    }

    fn inv(&self, a: UnitId) -> UnitId {
        UnitGroupModel::inv(self, a)
    }

    fn frobenius(&self, a: UnitId) -> UnitId {
        UnitGroupModel::frobenius(self, a)
    }

    fn elements(&self) -> Vec<UnitId> {
        self.ids().collect()
    }

    fn random<R: Rng>(&self, rng: &mut R) -> UnitId {
        rng.gen_range(0..self.order() as UnitId)
    }

    fn eval_char(&self, exps: &[u64], a: UnitId) -> RootOfUnity {
        self.eval_exponents(exps, a)
    }
}

/// `l`-tuples over a [`TorusBase`] with the twisted Frobenius.
pub struct TwistedTorus<'a, B: TorusBase> {
    base: &'a B,
}

impl<'a, B: TorusBase> TwistedTorus<'a, B> {
    pub fn new(base: &'a B) -> Self {
        TwistedTorus { base }
    }

    pub fn base(&self) -> &B {
        self.base
    }

    pub fn ell(&self) -> usize {
        self.base.ell()
    }

    /// `(x_1, ..., x_l) -> (F x_l, F x_1, ..., F x_{l-1})`.
    pub fn phi_sigma(&self, x: &[B::Elem]) -> Vec<B::Elem> {
        let l = x.len();
        (0..l).map(|i| self.base.frobenius(x[(i + l - 1) % l])).collect()
    }

    pub fn mul(&self, x: &[B::Elem], y: &[B::Elem]) -> Vec<B::Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.base.mul(a, b)).collect()
    }

    /// `t Phi_sigma(t) ... Phi_sigma^{l-1}(t)`, by iteration.
    pub fn twisted_norm(&self, t: &[B::Elem]) -> Vec<B::Elem> {
        let mut acc = t.to_vec();
        let mut cur = t.to_vec();
        for _ in 1..self.ell() {
            cur = self.phi_sigma(&cur);
            acc = self.mul(&acc, &cur);
        }
        acc
    }

    /// First coordinate of the twisted norm by the closed form
    /// `x_1 x_2^{q^{l-1}} x_3^{q^{l-2}} ... x_l^q`.
    pub fn twisted_norm_closed_form(&self, t: &[B::Elem]) -> B::Elem {
        let l = self.ell();
        let mut acc = t[0];
        for (i, &x) in t.iter().enumerate().skip(1) {
            let y = (0..l - i).fold(x, |a, _| self.base.frobenius(a));
            acc = self.base.mul(acc, y);
        }
        acc
    }

    pub fn is_fixed(&self, x: &[B::Elem]) -> bool {
        self.phi_sigma(x) == x
    }

    /// `eta(z) = (z, F z, ..., F^{l-1} z)`, the fixed point with first coordinate `z`.
    pub fn fixed_point(&self, z: B::Elem) -> Vec<B::Elem> {
        let mut out = Vec::with_capacity(self.ell());
        let mut cur = z;
        for _ in 0..self.ell() {
            out.push(cur);
            cur = self.base.frobenius(cur);
        }
        out
    }

    /// The section `(z, 1, ..., 1)`.
    pub fn section(&self, z: B::Elem) -> Vec<B::Elem> {
        let mut out = vec![self.base.one(); self.ell()];
        out[0] = z;
        out
    }

    /// A uniformly random preimage of the fixed point `eta(z)`: random
    /// `x_2, ..., x_l`, with `x_1` solved from the closed form.
    pub fn random_preimage<R: Rng>(&self, z: B::Elem, rng: &mut R) -> Vec<B::Elem> {
        let mut t: Vec<B::Elem> = (0..self.ell()).map(|_| self.base.random(rng)).collect();
        t[0] = self.base.one();
        let partial = self.twisted_norm_closed_form(&t);
        t[0] = self.base.mul(z, self.base.inv(partial));
        t
    }

    /// `Lambda(x) = prod_i psi_i(x_{i+1})`.
    pub fn lambda(&self, psi: &[Vec<u64>], x: &[B::Elem]) -> RootOfUnity {
        psi.iter().zip(x).map(|(e, &a)| self.base.eval_char(e, a)).product()
    }

    /// Whether `Lambda o Phi_sigma = Lambda`, checked on a generating set
    /// (each base element in each slot).
    pub fn lambda_is_equivariant(&self, psi: &[Vec<u64>]) -> bool {
        let l = self.ell();
        self.base.elements().into_iter().all(|a| {
            (0..l).all(|slot| {
                let mut x = vec![self.base.one(); l];
                x[slot] = a;
                self.lambda(psi, &self.phi_sigma(&x)) == self.lambda(psi, &x)
            })
        })
    }
}

/// A character of `T^{Phi_sigma} = o_E^* x X^sigma`: exponents on the unit
/// group generators and the value on the cocharacter `lambda_{(1,...,1)}`,
/// which is the value at `varpi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusChar {
    pub unit_exponents: Vec<u64>,
    pub varpi_value: RootOfUnity,
}

impl TorusChar {
    pub fn from_level_char(chi: &LevelChar) -> Self {
        TorusChar { unit_exponents: chi.unit_exponents.clone(), varpi_value: chi.varpi_value }
    }

    /// `(gamma, lambda_{(n,...,n)}) -> gamma-part(u) * cochar^n` at `t = varpi^n u`.
    pub fn evaluate(&self, group: &UnitGroupModel, n: i64, u: UnitId) -> RootOfUnity {
        group.eval_exponents(&self.unit_exponents, u) * self.varpi_value.pow(n)
    }
}

/// `tau = diag(det f, 1, ..., 1)` and `chi_tau(lambda_{(1,...,1)})`.
pub fn tau_from_parameter(phi: &Trselp) -> Result<(MonomialMatrix, RootOfUnity)> {
    let l = phi.ell as usize;
    let f = &phi.frobenius_image;
    let mut diag = vec![RootOfUnity::ONE; l];
    diag[0] = f.det();
    let tau = MonomialMatrix::diagonal(diag);
    if !f.inverse().mul(&tau).det().is_one() {
        return Err(Error::CrossCheck("tau is not in the determinant class of f".into()));
    }
    // chi_tau(lambda) = prod tau_ii^{lambda_i}
    let chi_tau = tau.scalars().iter().copied().product();
    Ok((tau, chi_tau))
}

/// How many random preimages to test per point, and the seed.
#[derive(Clone, Copy, Debug)]
pub struct ChainOptions {
    pub random_preimages: usize,
    pub seed: u64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { random_preimages: 4, seed: 0x5eed }
    }
}

/// Both computations of `chi_s` and the assembled character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DbrCharacter {
    pub chi_phi: TorusChar,
    /// `chi_s` read off on the unit group generators through the chain.
    pub chi_s_chain: Vec<u64>,
    /// `chi_s` in closed form, the restriction of `chi` to units.
    pub chi_s_closed_form: Vec<u64>,
    pub tau: MonomialMatrix,
    pub chi_tau: RootOfUnity,
    /// `"residue"` at depth zero, `"level-r"` at positive depth.
    pub path: String,
    pub preimages_checked: u64,
}

/// Evaluates `chi_s` on every unit through preimages of the twisted norm.
fn chi_s_through_chain<B: TorusBase>(
    torus: &TwistedTorus<B>,
    psi: &[Vec<u64>],
    points: &[(UnitId, B::Elem)],
    opts: ChainOptions,
) -> Result<(Vec<(UnitId, RootOfUnity)>, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checked = 0u64;
    let mut out = Vec::with_capacity(points.len());
    for &(id, z) in points {
        let target = torus.fixed_point(z);
        let section = torus.section(z);
        if torus.twisted_norm(&section) != target {
            return Err(Error::NormNotSurjective(format!("section misses {z:?}")));
        }
        let value = torus.lambda(psi, &section);
        for _ in 0..opts.random_preimages {
            let pre = torus.random_preimage(z, &mut rng);
            if torus.twisted_norm(&pre) != target {
                return Err(Error::NormNotSurjective(format!("solved preimage misses {z:?}")));
            }
            if torus.lambda(psi, &pre) != value {
                return Err(Error::CrossCheck(format!("Lambda differs on two preimages of {z:?}")));
            }
            checked += 1;
        }
        checked += 1;
        out.push((id, value));
    }
    Ok((out, checked))
}

fn assemble(
    group: &UnitGroupModel,
    phi: &Trselp,
    values: Vec<(UnitId, RootOfUnity)>,
    checked: u64,
    path: &str,
) -> Result<DbrCharacter> {
    let chain = group.exponents_from_values(|g| values[g as usize].1)?;
    let closed = phi.inertia[0].clone();
    for &(id, v) in &values {
        let closed_value = group.eval_exponents(&closed, id);
        if v != closed_value || group.eval_exponents(&chain, id) != v {
            return Err(Error::CrossCheck(format!(
                "chi_s through the chain ({v}) differs from the closed form ({closed_value}) at unit {id}"
            )));
        }
    }
    let (tau, chi_tau) = tau_from_parameter(phi)?;
    Ok(DbrCharacter {
        chi_phi: TorusChar { unit_exponents: chain.clone(), varpi_value: chi_tau },
        chi_s_chain: chain,
        chi_s_closed_form: closed,
        tau,
        chi_tau,
        path: path.to_string(),
        preimages_checked: checked,
    })
}

/// `chi_phi` for a depth-zero parameter, through the residue-field torus.
pub fn chi_phi(group: &UnitGroupModel, phi: &Trselp, opts: ChainOptions) -> Result<DbrCharacter> {
    if phi.depth != 0 {
        return reeder_positive_depth_chi_phi(group, phi, opts);
    }
    let tower = group.field().tower();
    let torus = TwistedTorus::new(tower);
    // psi_i as characters of f_{q^l}^*: their value at the Teichmüller generator
    let teich = group.generator_id(0);
    let psi: Vec<Vec<u64>> = phi
        .inertia
        .iter()
        .map(|e| {
            group
                .eval_exponents(e, teich)
                .exponent_in(tower.unit_order())
                .map(|k| vec![k])
                .ok_or_else(|| Error::CrossCheck("depth-zero inertia character has wrong order".into()))
        })
        .collect::<Result<_>>()?;
    for e in &phi.inertia {
        if group.filtration_generators(1).iter().any(|&u| !group.eval_exponents(e, u).is_one()) {
            return Err(Error::InvalidParams("inertia character is not of depth zero".into()));
        }
    }
    if !torus.lambda_is_equivariant(&psi) {
        return Err(Error::CrossCheck("Lambda is not Phi_sigma-equivariant".into()));
    }
    let points: Vec<(UnitId, TowerElem)> = group.ids().map(|u| (u, group.residue(u))).collect();
    let (values, checked) = chi_s_through_chain(&torus, &psi, &points, opts)?;
    assemble(group, phi, values, checked, "residue")
}

/// `chi_phi` for a parameter of depth `r >= 1`, through the torus over
/// `(o_E/p^{r+1})^*`.
pub fn reeder_positive_depth_chi_phi(group: &UnitGroupModel, phi: &Trselp, opts: ChainOptions) -> Result<DbrCharacter> {
    if phi.depth == 0 && group.level() == 0 {
        return Err(Error::InvalidParams("positive-depth path needs a level r >= 1 unit group".into()));
    }
    let torus = TwistedTorus::new(group);
    if !torus.lambda_is_equivariant(&phi.inertia) {
        return Err(Error::CrossCheck("Lambda is not Phi_sigma-equivariant".into()));
    }
    let points: Vec<(UnitId, UnitId)> = group.ids().map(|u| (u, u)).collect();
    let (values, checked) = chi_s_through_chain(&torus, &phi.inertia, &points, opts)?;
    assemble(group, phi, values, checked, "level-r")
}
