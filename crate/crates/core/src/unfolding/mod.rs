//! The graded universal unfolding `F = f + sum_j psi_j(u) phi_j`, the
//! oscillator expansion of `e^{(F-f)/t}` on the basis, and the change of
//! basis to an opposite basis `Phi(c)`.

use std::collections::{BTreeMap, HashMap};

use crate::brieskorn::{RPoly, Reducer};
use crate::error::{Error, Result};
use crate::exactalg::{identity, mat_mul, Monomial, Rat, RatMatrix, UnfoldRingElem};
use crate::singularity::SingularityData;

/// Matrix over the truncated parameter ring.
pub type RMatrix = Vec<Vec<UnfoldRingElem>>;
/// Laurent polynomial in `t` with rational matrix coefficients.
pub type TMatrix = BTreeMap<i32, RatMatrix>;

#[derive(Debug, Clone)]
pub struct UnfoldingData<'a> {
    pub base: &'a SingularityData,
    /// Truncation order `N`: the parameter ring is `Q[u]/m^{N+1}`.
    pub order: u32,
    /// Active directions (0-based basis indices), sorted.
    pub mask: Vec<usize>,
    /// Deformation coefficient of each basis direction (zero if inactive).
    pub psi: Vec<UnfoldRingElem>,
    /// `deg u_j = 1 - d_j`.
    pub param_degrees: Vec<Rat>,
    /// Whether any coefficient was overridden (grading checks only warn).
    pub overridden: bool,
}

impl<'a> UnfoldingData<'a> {
    pub fn nparams(&self) -> usize {
        self.base.mu
    }

    pub fn zero(&self) -> UnfoldRingElem {
        UnfoldRingElem::zero(self.nparams(), self.order)
    }

    /// Weighted degree of a parameter monomial.
    pub fn umono_degree(&self, m: &crate::exactalg::UMono) -> Rat {
        let mut d = Rat::zero();
        for (e, q) in m.exps().iter().zip(&self.param_degrees) {
            if *e != 0 {
                d += &(q * &Rat::from_int(*e as i64));
            }
        }
        d
    }

    /// Whether the grading identities can be asserted strictly.
    pub fn strict_grading(&self) -> bool {
        !self.overridden && !self.base.is_laurent()
    }
}

/// Builds the unfolding. `mask` lists active directions (0-based; `None` for
/// all); `overrides` replaces `psi_j = u_j` by a truncated series.
pub fn build_unfolding<'a>(
    base: &'a SingularityData,
    order: u32,
    mask: Option<&[usize]>,
    overrides: &BTreeMap<usize, UnfoldRingElem>,
) -> Result<UnfoldingData<'a>> {
    let mu = base.mu;
    if mu > u8::MAX as usize || order > u8::MAX as u32 {
        return Err(Error::InvalidParameter("parameter ring too large".into()));
    }
    let mut active: Vec<usize> = match mask {
        Some(m) => m.to_vec(),
        None => (0..mu).collect(),
    };
    active.sort_unstable();
    active.dedup();
    if let Some(&j) = active.iter().find(|&&j| j >= mu) {
        return Err(Error::InvalidParameter(format!("mask direction {} out of range 1..{mu}", j + 1)));
    }
    let mut psi = vec![UnfoldRingElem::zero(mu, order); mu];
    for &j in &active {
        psi[j] = match overrides.get(&j) {
            Some(r) => {
                if !r.constant_term().is_zero() {
                    return Err(Error::OverrideConstantTerm(j + 1));
                }
                if r.nvars() != mu {
                    return Err(Error::ParameterCountMismatch(r.nvars(), mu));
                }
                r.truncate(order)
            }
            None => UnfoldRingElem::var(mu, order, j),
        };
    }
    if let Some(j) = overrides.keys().find(|j| !active.contains(j)) {
        return Err(Error::InvalidParameter(format!("override for inactive direction {}", j + 1)));
    }
    let param_degrees = base.degrees.iter().map(|d| &Rat::one() - d).collect();
    Ok(UnfoldingData { base, order, mask: active, psi, param_degrees, overridden: !overrides.is_empty() })
}

/// The unfolding of the Laurent context with `psi_1 = u_0` on `1` and
/// `psi_2 = e^{u_1} - 1` on `q/z`, i.e. `F = u_0 + z + q e^{u_1}/z`.
pub fn build_p1_unfolding(base: &SingularityData, order: u32) -> Result<UnfoldingData<'_>> {
    if !base.is_laurent() {
        return Err(Error::LaurentModeRequired);
    }
    let overrides = BTreeMap::from([(1usize, UnfoldRingElem::exp_minus_one(2, order, 1))]);
    build_unfolding(base, order, None, &overrides)
}

/// `max(floor(N(s-1)+s), floor(s))`.
pub fn a_bound(order: u32, s: &Rat) -> i32 {
    let n = Rat::from_int(order as i64);
    let first = &(&n * &(s - &Rat::one())) + s;
    first.floor().max(s.floor()) as i32
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorMatrices {
    pub mu: usize,
    pub order: u32,
    pub a: i32,
    /// `A^{(k)}`: row `i` holds the coefficients of `t^k phi_j` in
    /// `e^{(F-f)/t} phi_i`. Absent keys are zero matrices.
    pub mats: BTreeMap<i32, RMatrix>,
    /// Non-fatal diagnostics (relaxed grading checks).
    pub warnings: Vec<String>,
}

impl OscillatorMatrices {
    pub fn get(&self, k: i32) -> Option<&RMatrix> {
        self.mats.get(&k)
    }

    /// Reduces every entry to a lower truncation order.
    pub fn truncate(&self, order: u32) -> OscillatorMatrices {
        let mut mats = BTreeMap::new();
        for (k, m) in &self.mats {
            let t: RMatrix = m.iter().map(|row| row.iter().map(|e| e.truncate(order)).collect()).collect();
            if t.iter().flatten().any(|e| !e.is_zero()) {
                mats.insert(*k, t);
            }
        }
        OscillatorMatrices { mu: self.mu, order, a: self.a, mats, warnings: self.warnings.clone() }
    }
}

fn rpoly_mul(a: &RPoly, b: &RPoly) -> Result<RPoly> {
    let mut acc: HashMap<Monomial, UnfoldRingElem> = HashMap::new();
    for (ma, ra) in a {
        for (mb, rb) in b {
            let m = ma.checked_mul(mb)?;
            match acc.get_mut(&m) {
                Some(e) => e.add_mul(ra, rb),
                None => {
                    let mut e = ra.zero_like();
                    e.add_mul(ra, rb);
                    acc.insert(m, e);
                }
            }
        }
    }
    Ok(acc.into_iter().filter(|(_, r)| !r.is_zero()).collect())
}

/// `F - f` as a polynomial in `z` over the parameter ring.
pub fn deformation(unf: &UnfoldingData) -> RPoly {
    let mut out = RPoly::new();
    for &j in &unf.mask {
        for (m, c) in unf.base.basis[j].terms() {
            let r = unf.psi[j].scale(c);
            let slot = out.entry(m.clone()).or_insert_with(|| unf.zero());
            slot.add_assign(&r);
        }
    }
    out.retain(|_, r| !r.is_zero());
    out
}

/// `(F-f)^p / p!` for `p = 0..=N`.
pub fn deformation_powers(unf: &UnfoldingData) -> Result<Vec<RPoly>> {
    let d = deformation(unf);
    let n = unf.base.f.nvars();
    let mut powers = vec![RPoly::from([(Monomial::one(n), UnfoldRingElem::one(unf.nparams(), unf.order))])];
    for p in 1..=unf.order {
        let mut next = rpoly_mul(&powers[p as usize - 1], &d)?;
        let inv = Rat::from_int(p as i64).recip();
        for r in next.values_mut() {
            *r = r.scale(&inv);
        }
        next.retain(|_, r| !r.is_zero());
        powers.push(next);
    }
    Ok(powers)
}

/// Expands `e^{(F-f)/t} phi_i` and collects the matrices `A^{(k)}`.
/// With `prune`, slices `k < -a` (never used by the primitive form solve)
/// are skipped before reduction.
pub fn oscillator_matrices_with(unf: &UnfoldingData, reducer: &Reducer, prune: bool) -> Result<OscillatorMatrices> {
    let base = unf.base;
    let mu = base.mu;
    let a = a_bound(unf.order, &base.s);
    let powers = deformation_powers(unf)?;
    let zero = unf.zero();
    let mut mats: BTreeMap<i32, RMatrix> = BTreeMap::new();
    for i in 0..mu {
        // e^{(F-f)/t} phi_i = sum_p t^{-p} (F-f)^p phi_i / p!
        let mut e: BTreeMap<i32, RPoly> = BTreeMap::new();
        for (p, pw) in powers.iter().enumerate() {
            let mut slice = RPoly::new();
            for (m, r) in pw {
                if prune && !base.is_laurent() {
                    // the reduced t-power never exceeds d_i - deg u^alpha
                    let reachable = r.terms().any(|(um, _)| {
                        let top = &base.degrees[i] - &unf.umono_degree(um);
                        top.floor() >= -(a as i64)
                    });
                    if !reachable {
                        continue;
                    }
                }
                for (mphi, c) in base.basis[i].terms() {
                    let mm = m.checked_mul(mphi)?;
                    let slot = slice.entry(mm).or_insert_with(|| zero.clone());
                    slot.add_scaled(r, c);
                }
            }
            slice.retain(|_, r| !r.is_zero());
            if !slice.is_empty() {
                e.insert(-(p as i32), slice);
            }
        }
        let red = reducer.reduce_linear(&e, &zero)?;
        for (k, v) in red.slices() {
            if prune && k < -a {
                continue;
            }
            let mat = mats.entry(k).or_insert_with(|| vec![vec![zero.clone(); mu]; mu]);
            for (j, c) in v.iter().enumerate() {
                mat[i][j] = c.clone();
            }
        }
    }
    let mut osc = OscillatorMatrices { mu, order: unf.order, a, mats, warnings: Vec::new() };
    check_oscillator(unf, &mut osc)?;
    Ok(osc)
}

pub fn oscillator_matrices(unf: &UnfoldingData) -> Result<OscillatorMatrices> {
    let reducer = Reducer::new(unf.base);
    oscillator_matrices_with(unf, &reducer, false)
}

/// Asserts the a-bound and the grading identity
/// `k + deg u^alpha + d_j - d_i = 0` on every entry.
pub fn check_oscillator(unf: &UnfoldingData, osc: &mut OscillatorMatrices) -> Result<()> {
    let base = unf.base;
    if base.is_laurent() {
        if let Some((&k, _)) = osc.mats.iter().find(|(k, _)| **k > 0 || **k < -(unf.order as i32)) {
            return Err(Error::GradingViolation(format!("t-power {k} outside [-N, 0] in the Laurent context")));
        }
        osc.warnings.push("grading identities not asserted in the Laurent context".into());
        return Ok(());
    }
    if let Some((&k, _)) = osc.mats.iter().find(|(k, _)| **k > osc.a) {
        return Err(Error::GradingViolation(format!("A^({k}) nonzero beyond a = {}", osc.a)));
    }
    for (k, m) in &osc.mats {
        for (i, row) in m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                for (um, _) in e.terms() {
                    let total = &(&(&Rat::from_int(*k as i64) + &unf.umono_degree(um)) + &base.degrees[j])
                        - &base.degrees[i];
                    if !total.is_zero() {
                        let msg = format!("A^({k})[{},{}] term {um:?} has degree {total}", i + 1, j + 1);
                        if unf.strict_grading() {
                            return Err(Error::GradingViolation(msg));
                        }
                        osc.warnings.push(msg);
                    }
                }
            }
        }
    }
    Ok(())
}

/// The basis change `Phi_i = phi_i + sum_{j<i} c_ij t^{r(i,j)} phi_j` with
/// `r(i,j) = d_i - d_j`; indices in `c` are 1-based. Returns `(C, C^{-1})`.
pub fn opposite_basis_change(data: &SingularityData, c: &BTreeMap<(usize, usize), Rat>) -> Result<(TMatrix, TMatrix)> {
    let mu = data.mu;
    let mut nil: TMatrix = BTreeMap::new();
    for ((i, j), v) in c {
        if v.is_zero() {
            continue;
        }
        if *i < 1 || *i > mu || *j < 1 || *j > mu {
            return Err(Error::InvalidParameter(format!("c[{i},{j}] out of range 1..{mu}")));
        }
        let r = &data.degrees[i - 1] - &data.degrees[j - 1];
        if !r.is_integer() || !r.is_positive() {
            return Err(Error::ForbiddenOppositeParameter(*i, *j, r));
        }
        let k = r.to_i64().expect("small step") as i32;
        nil.entry(k).or_insert_with(|| vec![vec![Rat::zero(); mu]; mu])[i - 1][j - 1] = v.clone();
    }
    let mut cmat: TMatrix = nil.clone();
    add_identity(&mut cmat, mu);
    // C^{-1} = sum_k (-(C - I))^k, finite by strict triangularity
    let neg: TMatrix = nil.iter().map(|(k, m)| (*k, scale_mat(m, &-Rat::one()))).collect();
    let mut inv: TMatrix = BTreeMap::new();
    add_identity(&mut inv, mu);
    let mut term: TMatrix = BTreeMap::from([(0, identity(mu))]);
    for _ in 1..mu {
        term = tmat_mul(&term, &neg);
        if term.is_empty() {
            break;
        }
        for (k, m) in &term {
            let slot = inv.entry(*k).or_insert_with(|| vec![vec![Rat::zero(); mu]; mu]);
            add_into(slot, m);
        }
    }
    inv.retain(|_, m| m.iter().flatten().any(|x| !x.is_zero()));
    Ok((cmat, inv))
}

fn add_identity(m: &mut TMatrix, mu: usize) {
    let slot = m.entry(0).or_insert_with(|| vec![vec![Rat::zero(); mu]; mu]);
    for (i, row) in slot.iter_mut().enumerate() {
        row[i] += &Rat::one();
    }
}

fn scale_mat(m: &RatMatrix, c: &Rat) -> RatMatrix {
    m.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

fn add_into(a: &mut RatMatrix, b: &RatMatrix) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += y;
        }
    }
}

pub fn tmat_mul(a: &TMatrix, b: &TMatrix) -> TMatrix {
    let mut out: TMatrix = BTreeMap::new();
    for (ka, ma) in a {
        for (kb, mb) in b {
            let p = mat_mul(ma, mb);
            match out.get_mut(&(ka + kb)) {
                Some(slot) => add_into(slot, &p),
                None => {
                    out.insert(ka + kb, p);
                }
            }
        }
    }
    out.retain(|_, m| m.iter().flatten().any(|x| !x.is_zero()));
    out
}

/// `C A C^{-1}`: the oscillator matrices on the basis `Phi(c)`.
pub fn conjugate(osc: &OscillatorMatrices, c: &TMatrix, cinv: &TMatrix) -> OscillatorMatrices {
    let mu = osc.mu;
    let zero = osc.mats.values().next().map(|m| m[0][0].zero_like());
    let Some(zero) = zero else {
        return osc.clone();
    };
    let rat_left = |m: &RatMatrix, a: &RMatrix| -> RMatrix {
        let mut out = vec![vec![zero.clone(); mu]; mu];
        for i in 0..mu {
            for (l, x) in m[i].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for j in 0..mu {
                    out[i][j].add_scaled(&a[l][j], x);
                }
            }
        }
        out
    };
    let rat_right = |a: &RMatrix, m: &RatMatrix| -> RMatrix {
        let mut out = vec![vec![zero.clone(); mu]; mu];
        for i in 0..mu {
            for l in 0..mu {
                if a[i][l].is_zero() {
                    continue;
                }
                for j in 0..mu {
                    if !m[l][j].is_zero() {
                        out[i][j].add_scaled(&a[i][l], &m[l][j]);
                    }
                }
            }
        }
        out
    };
    let mut left: BTreeMap<i32, RMatrix> = BTreeMap::new();
    for (kc, mc) in c {
        for (ka, ma) in &osc.mats {
            let p = rat_left(mc, ma);
            accumulate(&mut left, kc + ka, p);
        }
    }
    let mut mats: BTreeMap<i32, RMatrix> = BTreeMap::new();
    for (kl, ml) in &left {
        for (ki, mi) in cinv {
            let p = rat_right(ml, mi);
            accumulate(&mut mats, kl + ki, p);
        }
    }
    mats.retain(|_, m| m.iter().flatten().any(|x| !x.is_zero()));
    OscillatorMatrices { mu, order: osc.order, a: osc.a, mats, warnings: osc.warnings.clone() }
}

fn accumulate(into: &mut BTreeMap<i32, RMatrix>, k: i32, m: RMatrix) {
    match into.get_mut(&k) {
        Some(slot) => {
            for (ra, rb) in slot.iter_mut().zip(&m) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    x.add_assign(y);
                }
            }
        }
        None => {
            into.insert(k, m);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singularity::tests::{a_m, e12, e6_elliptic};
    use proptest::prelude::*;

    #[test]
    fn parameter_degrees() {
        let d = e12();
        let unf = build_unfolding(&d, 3, None, &BTreeMap::new()).unwrap();
        assert_eq!(unf.param_degrees[11], Rat::new(-1, 21));
        assert_eq!(unf.param_degrees[0], Rat::one());
        let e6 = e6_elliptic();
        let unf = build_unfolding(&e6, 3, Some(&[7]), &BTreeMap::new()).unwrap();
        assert!(unf.param_degrees[7].is_zero());
        assert_eq!(unf.mask, vec![7]);
    }

    #[test]
    fn override_constant_term_rejected() {
        let d = a_m(2);
        let bad = BTreeMap::from([(1usize, UnfoldRingElem::one(2, 2))]);
        assert_eq!(build_unfolding(&d, 2, None, &bad).unwrap_err(), Error::OverrideConstantTerm(2));
    }

    #[test]
    fn p1_directions() {
        let q = Rat::from_int(2);
        let d = SingularityData::laurent_p1(q).unwrap();
        let unf = build_p1_unfolding(&d, 3).unwrap();
        assert_eq!(unf.psi[0], UnfoldRingElem::var(2, 3, 0));
        assert_eq!(unf.psi[1], UnfoldRingElem::exp_minus_one(2, 3, 1));
        let def = deformation(&unf);
        // u_0 on 1, q (e^{u_1} - 1) on 1/z
        assert_eq!(def[&Monomial::from_exps(&[0])], UnfoldRingElem::var(2, 3, 0));
        assert_eq!(def[&Monomial::from_exps(&[-1])], UnfoldRingElem::exp_minus_one(2, 3, 1).scale(&Rat::from_int(2)));
    }

    #[test]
    fn a2_first_order() {
        let d = a_m(2);
        let unf = build_unfolding(&d, 1, None, &BTreeMap::new()).unwrap();
        let osc = oscillator_matrices(&unf).unwrap();
        let u1 = UnfoldRingElem::var(2, 1, 0);
        let u2 = UnfoldRingElem::var(2, 1, 1);
        let zero = UnfoldRingElem::zero(2, 1);
        assert_eq!(osc.get(-1).unwrap(), &vec![vec![u1.clone(), u2.clone()], vec![zero.clone(), u1.clone()]]);
        let one = UnfoldRingElem::one(2, 1);
        assert_eq!(osc.get(0).unwrap(), &vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one]]);
        assert!(osc.mats.keys().all(|k| *k == 0 || *k == -1));
    }

    #[test]
    fn e12_a_bound() {
        assert_eq!(a_bound(10, &Rat::new(22, 21)), 1);
        assert_eq!(a_bound(6, &Rat::new(22, 21)), 1);
        assert_eq!(a_bound(6, &Rat::new(1, 3)), 0);
        assert_eq!(a_bound(9, &Rat::one()), 1);
        let d = e12();
        let unf = build_unfolding(&d, 3, None, &BTreeMap::new()).unwrap();
        let osc = oscillator_matrices(&unf).unwrap();
        assert_eq!(osc.a, 1);
        assert!(osc.mats.keys().all(|k| *k <= 1));
    }

    fn origin(osc: &OscillatorMatrices) -> BTreeMap<i32, RatMatrix> {
        osc.mats
            .iter()
            .map(|(k, m)| (*k, m.iter().map(|r| r.iter().map(|e| e.constant_term()).collect()).collect()))
            .filter(|(_, m): &(i32, RatMatrix)| m.iter().flatten().any(|x| !x.is_zero()))
            .collect()
    }

    #[test]
    fn identity_at_origin() {
        for (d, n) in [(a_m(3), 3u32), (e12(), 2), (e6_elliptic(), 3)] {
            let unf = build_unfolding(&d, n, None, &BTreeMap::new()).unwrap();
            let osc = oscillator_matrices(&unf).unwrap();
            assert_eq!(origin(&osc), BTreeMap::from([(0, identity(d.mu))]));
        }
        let p1 = SingularityData::laurent_p1(Rat::from_int(-3)).unwrap();
        let unf = build_p1_unfolding(&p1, 4).unwrap();
        let osc = oscillator_matrices(&unf).unwrap();
        assert_eq!(origin(&osc), BTreeMap::from([(0, identity(2))]));
        assert!(osc.mats.keys().all(|k| (-4..=0).contains(k)));
    }

    #[test]
    fn truncation_commutes() {
        let d = e12();
        let big = oscillator_matrices(&build_unfolding(&d, 4, None, &BTreeMap::new()).unwrap()).unwrap();
        let small = oscillator_matrices(&build_unfolding(&d, 2, None, &BTreeMap::new()).unwrap()).unwrap();
        assert_eq!(big.truncate(2).mats, small.mats);
    }

    #[test]
    fn pruning_keeps_used_window() {
        let d = e12();
        let unf = build_unfolding(&d, 3, None, &BTreeMap::new()).unwrap();
        let full = oscillator_matrices(&unf).unwrap();
        let reducer = Reducer::new(&d);
        let pruned = oscillator_matrices_with(&unf, &reducer, true).unwrap();
        for k in -full.a..=full.a {
            assert_eq!(full.get(k), pruned.get(k), "k = {k}");
        }
        assert!(pruned.mats.keys().all(|k| *k >= -full.a));
    }

    #[test]
    fn opposite_change_e6() {
        let d = e6_elliptic();
        let c = BTreeMap::from([((8usize, 1usize), Rat::from_int(5))]);
        let (cm, cinv) = opposite_basis_change(&d, &c).unwrap();
        assert_eq!(cm[&0], identity(8));
        assert_eq!(cm[&1][7][0], Rat::from_int(5));
        assert_eq!(cinv[&1][7][0], Rat::from_int(-5));
        assert_eq!(tmat_mul(&cm, &cinv), BTreeMap::from([(0, identity(8))]));
        let (c0, c0inv) = opposite_basis_change(&d, &BTreeMap::new()).unwrap();
        assert_eq!(c0, BTreeMap::from([(0, identity(8))]));
        assert_eq!(c0inv, c0);
    }

    #[test]
    fn forbidden_opposite_parameter() {
        let d = e12();
        let c = BTreeMap::from([((12usize, 2usize), Rat::one())]);
        assert!(matches!(opposite_basis_change(&d, &c), Err(Error::ForbiddenOppositeParameter(12, 2, _))));
    }

    #[test]
    fn conjugation_by_identity() {
        let d = a_m(3);
        let unf = build_unfolding(&d, 2, None, &BTreeMap::new()).unwrap();
        let osc = oscillator_matrices(&unf).unwrap();
        let (c, ci) = opposite_basis_change(&d, &BTreeMap::new()).unwrap();
        assert_eq!(conjugate(&osc, &c, &ci).mats, osc.mats);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn nilpotent_part(cs in prop::collection::vec(-5i64..6, 1..4)) {
            // E6 simple elliptic: admissible steps are (i,1) with d_i = 1, i.e. (8,1)
            let d = e6_elliptic();
            let c = BTreeMap::from([((8usize, 1usize), Rat::from_int(cs[0]))]);
            let (cm, cinv) = opposite_basis_change(&d, &c).unwrap();
            let mut nil = cm.clone();
            let id = identity(8);
            let zero_slot = nil.get_mut(&0).unwrap();
            for i in 0..8 { zero_slot[i][i] -= &id[i][i]; }
            nil.retain(|_, m| m.iter().flatten().any(|x| !x.is_zero()));
            let mut p = nil.clone();
            for _ in 1..8 { p = tmat_mul(&p, &nil); }
            prop_assert!(p.is_empty());
            prop_assert_eq!(tmat_mul(&cinv, &cm), BTreeMap::from([(0, identity(8))]));
        }

        #[test]
        fn grading_holds_on_a_m(m in 2i32..6, n in 1u32..4) {
            let d = a_m(m);
            let unf = build_unfolding(&d, n, None, &BTreeMap::new()).unwrap();
            let osc = oscillator_matrices(&unf).unwrap();
            prop_assert!(osc.warnings.is_empty());
            prop_assert!(osc.mats.keys().all(|k| *k <= osc.a));
        }
    }
}
