//! The perturbative primitive form: assemble the block matrix `Psi` from the
//! oscillator matrices, solve `g (Id + Psi) = e` by the finite Neumann
//! series, and verify primitivity through the splitting
//! `B((t)) = B[[t]] + t^{-1} B[t^{-1}]`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::brieskorn::{LatticeVector, RPoly, Reducer};
use crate::error::{Error, Result};
use crate::exactalg::{Monomial, Rat, UMono, UnfoldRingElem};
use crate::unfolding::{
    conjugate, deformation_powers, opposite_basis_change, oscillator_matrices_with, OscillatorMatrices, RMatrix,
    TMatrix, UnfoldingData,
};

/// Opposite-basis parameters `c_ij` (1-based indices).
pub type OppositeParams = BTreeMap<(usize, usize), Rat>;

/// The `(a+1) mu` square block matrix; block `(p, q)` is `A^{(q-p)} - delta_pq Id`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiMatrix {
    pub mu: usize,
    pub a: i32,
    pub entries: RMatrix,
}

impl PsiMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

pub fn assemble_psi(osc: &OscillatorMatrices, zero: &UnfoldRingElem) -> PsiMatrix {
    let mu = osc.mu;
    let blocks = (osc.a + 1).max(1) as usize;
    let dim = blocks * mu;
    let mut entries = vec![vec![zero.clone(); dim]; dim];
    for p in 0..blocks {
        for q in 0..blocks {
            let k = q as i32 - p as i32;
            let Some(m) = osc.get(k) else { continue };
            for i in 0..mu {
                for j in 0..mu {
                    let mut e = m[i][j].clone();
                    if k == 0 && i == j {
                        e.add_scaled(&UnfoldRingElem::one(zero.nvars(), zero.order()), &-Rat::one());
                    }
                    entries[p * mu + i][q * mu + j] = e;
                }
            }
        }
    }
    PsiMatrix { mu, a: osc.a, entries }
}

fn row_times(v: &[UnfoldRingElem], m: &RMatrix, zero: &UnfoldRingElem) -> Vec<UnfoldRingElem> {
    let n = m.len();
    let mut out = vec![zero.clone(); n];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, mij) in m[i].iter().enumerate() {
            if !mij.is_zero() {
                out[j].add_mul(vi, mij);
            }
        }
    }
    out
}

/// Solves `g (Id + Psi) = e` with `g = e sum_k (-Psi)^k`, and asserts the
/// defining identity. Returns the `a+1` row vectors `g^{(i)}`.
pub fn neumann_solve(psi: &PsiMatrix, zero: &UnfoldRingElem) -> Result<Vec<Vec<UnfoldRingElem>>> {
    let dim = psi.dim();
    let one = UnfoldRingElem::one(zero.nvars(), zero.order());
    let mut e = vec![zero.clone(); dim];
    if dim > 0 {
        e[0] = one;
    }
    let mut g = e.clone();
    let mut v = e.clone();
    for _ in 0..=zero.order() {
        v = row_times(&v, &psi.entries, zero).into_iter().map(|x| x.neg()).collect();
        if v.iter().all(|x| x.is_zero()) {
            break;
        }
        for (gi, vi) in g.iter_mut().zip(&v) {
            gi.add_assign(vi);
        }
    }
    if !v.iter().all(|x| x.is_zero()) && !row_times(&v, &psi.entries, zero).iter().all(|x| x.is_zero()) {
        return Err(Error::Internal("Psi is not nilpotent modulo the truncation".into()));
    }
    // g (Id + Psi) = e
    let mut check = row_times(&g, &psi.entries, zero);
    for (c, gi) in check.iter_mut().zip(&g) {
        c.add_assign(gi);
    }
    if check != e {
        return Err(Error::Internal("Neumann solve identity g (Id + Psi) = e fails".into()));
    }
    Ok(g.chunks(psi.mu).map(|c| c.to_vec()).collect())
}

/// One term `t^i u^alpha Phi_j` of a primitive form expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub t_power: i32,
    /// 1-based basis index.
    pub basis_index: usize,
    pub u_monomial: Vec<u8>,
    pub coefficient: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveFormExpansion {
    pub mu: usize,
    pub order: u32,
    pub a: i32,
    /// `g[i][j]`: coefficient of `t^i Phi_j`.
    pub g: Vec<Vec<UnfoldRingElem>>,
    pub c: OppositeParams,
    pub warnings: Vec<String>,
}

impl PrimitiveFormExpansion {
    pub fn records(&self) -> Vec<Record> {
        let mut out = Vec::new();
        for (i, row) in self.g.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                for (m, c) in e.terms() {
                    out.push(Record {
                        t_power: i as i32,
                        basis_index: j + 1,
                        u_monomial: m.exps().to_vec(),
                        coefficient: c.clone(),
                    });
                }
            }
        }
        out
    }

    /// Coefficient of `t^i u^alpha Phi_j` (0-based `j`).
    pub fn coefficient(&self, i: usize, j: usize, m: &UMono) -> Rat {
        self.g.get(i).map_or_else(Rat::zero, |row| row[j].coeff(m))
    }

    /// `zeta_+` as a t-graded z-polynomial over R (the basis change to `Phi`
    /// expanded on the monomial basis).
    pub fn representative(&self, unf: &UnfoldingData) -> Result<BTreeMap<i32, RPoly>> {
        let (cm, _) = opposite_basis_change(unf.base, &self.c)?;
        let mut out: BTreeMap<i32, RPoly> = BTreeMap::new();
        for (i, row) in self.g.iter().enumerate() {
            for (j, gij) in row.iter().enumerate() {
                if gij.is_zero() {
                    continue;
                }
                for (r, m) in &cm {
                    for (l, x) in m[j].iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        let slice = out.entry(i as i32 + r).or_default();
                        for (mono, c) in unf.base.basis[l].terms() {
                            let slot = slice.entry(mono.clone()).or_insert_with(|| unf.zero());
                            slot.add_scaled(gij, &(x * c));
                        }
                    }
                }
            }
        }
        for slice in out.values_mut() {
            slice.retain(|_, r| !r.is_zero());
        }
        out.retain(|_, s| !s.is_empty());
        Ok(out)
    }
}

/// Computes `zeta_+ mod m^{N+1}` in the basis `Phi(c)`.
pub fn primitive_form(unf: &UnfoldingData, c: &OppositeParams) -> Result<PrimitiveFormExpansion> {
    let reducer = Reducer::new(unf.base);
    primitive_form_with(unf, c, &reducer, true)
}

pub fn primitive_form_with(
    unf: &UnfoldingData,
    c: &OppositeParams,
    reducer: &Reducer,
    prune: bool,
) -> Result<PrimitiveFormExpansion> {
    let base = unf.base;
    let zero = unf.zero();
    let mut osc = oscillator_matrices_with(unf, reducer, prune)?;
    if c.values().any(|x| !x.is_zero()) {
        let (cm, cinv) = opposite_basis_change(base, c)?;
        osc = conjugate(&osc, &cm, &cinv);
        if let Some(k) = osc.mats.keys().find(|k| **k > osc.a) {
            return Err(Error::GradingViolation(format!("A^({k}) nonzero beyond a = {} after basis change", osc.a)));
        }
    }
    let psi = assemble_psi(&osc, &zero);
    let g = neumann_solve(&psi, &zero)?;
    let mut pf = PrimitiveFormExpansion {
        mu: base.mu,
        order: unf.order,
        a: osc.a,
        g,
        c: c.clone(),
        warnings: osc.warnings.clone(),
    };
    check_expansion(unf, &mut pf)?;
    Ok(pf)
}

/// Homogeneity `i + deg u^alpha + d_j = 0` and the origin restriction
/// `g^{(0)}(0) = e_1`.
fn check_expansion(unf: &UnfoldingData, pf: &mut PrimitiveFormExpansion) -> Result<()> {
    for (i, row) in pf.g.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let expect = if i == 0 && j == 0 { Rat::one() } else { Rat::zero() };
            if e.constant_term() != expect {
                return Err(Error::Internal(format!("zeta_+ does not restrict to 1 at the origin (t^{i}, Phi_{})", j + 1)));
            }
            for (m, _) in e.terms() {
                let total = &(&Rat::from_int(i as i64) + &unf.umono_degree(m)) + &unf.base.degrees[j];
                if !total.is_zero() {
                    let msg = format!("zeta_+ term t^{i} {m:?} Phi_{} has degree {total}", j + 1);
                    if unf.strict_grading() {
                        return Err(Error::GradingViolation(msg));
                    }
                    pf.warnings.push(msg);
                }
            }
        }
    }
    Ok(())
}

/// Central reduction of `e^{(F-f)/t} rep` on the basis `phi`. With
/// `min_power`, terms that cannot reach t-powers `>= min_power` are skipped
/// before reduction (polynomial context only).
pub fn oscillator_class(
    unf: &UnfoldingData,
    rep: &BTreeMap<i32, RPoly>,
    reducer: &Reducer,
    min_power: Option<i32>,
) -> Result<LatticeVector<UnfoldRingElem>> {
    let base = unf.base;
    let zero = unf.zero();
    let powers = deformation_powers(unf)?;
    let mut e: BTreeMap<i32, RPoly> = BTreeMap::new();
    for (i, slice) in rep {
        for (mr, rr) in slice {
            for (p, pw) in powers.iter().enumerate() {
                let k = i - p as i32;
                for (mp, rp) in pw {
                    let m = mr.checked_mul(mp)?;
                    if let (Some(lo), false) = (min_power, base.is_laurent()) {
                        if m.exps().iter().any(|&x| x < 0) {
                            return Err(Error::LaurentModeRequired);
                        }
                        if k as i64 + m.weighted_degree(&base.weights).floor() < lo as i64 {
                            continue;
                        }
                    }
                    let slot = e.entry(k).or_default().entry(m).or_insert_with(|| zero.clone());
                    slot.add_mul(rr, rp);
                }
            }
        }
    }
    for s in e.values_mut() {
        s.retain(|_, r| !r.is_zero());
    }
    reducer.reduce_linear(&e, &zero)
}

/// Row vector times a t-matrix: coordinates on `phi` to coordinates on `Phi`.
fn to_phi_coordinates(x: &LatticeVector<UnfoldRingElem>, cinv: &TMatrix) -> LatticeVector<UnfoldRingElem> {
    let mut out = LatticeVector::new(x.mu(), x.zero_scalar().clone());
    for (k, v) in x.slices() {
        for (r, m) in cinv {
            for (i, vi) in v.iter().enumerate() {
                if vi.is_zero() {
                    continue;
                }
                for (j, mij) in m[i].iter().enumerate() {
                    if !mij.is_zero() {
                        out.add_at(k + r, j, &vi.scale(mij));
                    }
                }
            }
        }
    }
    out
}

/// Outcome of a primitivity check.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub pass: bool,
    /// Nonnegative-t part minus `e_1`, on the basis `Phi(c)`.
    pub defect: LatticeVector<UnfoldRingElem>,
}

/// Checks whether `e^{(F-f)/t} rep` lies in `1 + L(c) (x) R`: its
/// nonnegative-t part on `Phi(c)` must be exactly `Phi_1`.
pub fn verify_primitive(
    rep: &BTreeMap<i32, RPoly>,
    unf: &UnfoldingData,
    c: &OppositeParams,
    prune: bool,
) -> Result<Verification> {
    let (_, cinv) = opposite_basis_change(unf.base, c)?;
    let shift = cinv.keys().copied().max().unwrap_or(0);
    let reducer = Reducer::new(unf.base);
    let x = oscillator_class(unf, rep, &reducer, prune.then_some(-shift))?;
    let y = to_phi_coordinates(&x, &cinv);
    let mut defect = y.nonnegative_from(0);
    defect.add_at(0, 0, &UnfoldRingElem::one(unf.nparams(), unf.order).neg());
    Ok(Verification { pass: defect.is_zero(), defect })
}

/// Whether two representatives define the same class after the oscillator.
pub fn verify_class_equal(
    rep1: &BTreeMap<i32, RPoly>,
    rep2: &BTreeMap<i32, RPoly>,
    unf: &UnfoldingData,
) -> Result<bool> {
    let reducer = Reducer::new(unf.base);
    let a = oscillator_class(unf, rep1, &reducer, None)?;
    let b = oscillator_class(unf, rep2, &reducer, None)?;
    Ok(a == b)
}

/// A representative with a single t^0 term `r * z^m` per entry.
pub fn rep_from_terms(unf: &UnfoldingData, terms: &[(Monomial, UnfoldRingElem)]) -> BTreeMap<i32, RPoly> {
    let mut slice = RPoly::new();
    for (m, r) in terms {
        let slot = slice.entry(m.clone()).or_insert_with(|| unf.zero());
        slot.add_assign(r);
    }
    slice.retain(|_, r| !r.is_zero());
    BTreeMap::from([(0, slice)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singularity::tests::{a_m, e12, e6_elliptic};
    use crate::singularity::SingularityData;
    use crate::unfolding::{build_p1_unfolding, build_unfolding};
    use proptest::prelude::*;

    fn one_rep(unf: &UnfoldingData) -> BTreeMap<i32, RPoly> {
        let n = unf.base.f.nvars();
        rep_from_terms(unf, &[(Monomial::one(n), UnfoldRingElem::one(unf.nparams(), unf.order))])
    }

    fn is_trivial(pf: &PrimitiveFormExpansion) -> bool {
        let r = pf.records();
        r.len() == 1 && r[0].t_power == 0 && r[0].basis_index == 1 && r[0].coefficient.is_one()
            && r[0].u_monomial.iter().all(|e| *e == 0)
    }

    #[test]
    fn psi_vanishes_at_zero_order() {
        let d = a_m(2);
        let unf = build_unfolding(&d, 1, None, &BTreeMap::new()).unwrap();
        let osc = crate::unfolding::oscillator_matrices(&unf).unwrap();
        let psi = assemble_psi(&osc, &unf.zero());
        assert_eq!(psi.dim(), 2);
        assert!(psi.entries.iter().flatten().all(|e| e.is_zero()));
    }

    #[test]
    fn neumann_examples() {
        let zero = UnfoldRingElem::zero(1, 2);
        let psi = PsiMatrix { mu: 2, a: 0, entries: vec![vec![zero.clone(); 2]; 2] };
        let g = neumann_solve(&psi, &zero).unwrap();
        assert_eq!(g, vec![vec![UnfoldRingElem::one(1, 2), zero.clone()]]);
        let mut entries = vec![vec![zero.clone(); 2]; 2];
        entries[0][1] = UnfoldRingElem::var(1, 2, 0);
        let psi = PsiMatrix { mu: 2, a: 0, entries };
        let g = neumann_solve(&psi, &zero).unwrap();
        assert_eq!(g[0][1], UnfoldRingElem::var(1, 2, 0).neg());
    }

    #[test]
    fn ade_trivial() {
        for m in 2..=5 {
            let d = a_m(m);
            for n in [1u32, 3, 6] {
                let unf = build_unfolding(&d, n, None, &BTreeMap::new()).unwrap();
                let pf = primitive_form(&unf, &BTreeMap::new()).unwrap();
                assert!(is_trivial(&pf), "A_{m} N={n}: {:?}", pf.records());
                assert!(verify_primitive(&one_rep(&unf), &unf, &BTreeMap::new(), true).unwrap().pass);
            }
        }
    }

    #[test]
    fn e12_low_orders() {
        let d = e12();
        let unf = build_unfolding(&d, 2, None, &BTreeMap::new()).unwrap();
        assert!(verify_primitive(&one_rep(&unf), &unf, &BTreeMap::new(), true).unwrap().pass);
        let unf = build_unfolding(&d, 3, None, &BTreeMap::new()).unwrap();
        let v = verify_primitive(&one_rep(&unf), &unf, &BTreeMap::new(), true).unwrap();
        assert!(!v.pass);
        let pf = primitive_form(&unf, &BTreeMap::new()).unwrap();
        let mut m = UMono::one(12);
        m.0[10] = 1;
        m.0[11] = 2;
        assert_eq!(pf.coefficient(0, 0, &m), Rat::new(4, 147));
        // the defect of `1` is exactly what the correction term cancels
        assert_eq!(v.defect.coeff(0, 0).coeff(&m), Rat::new(-4, 147));
        let rep = pf.representative(&unf).unwrap();
        assert!(verify_primitive(&rep, &unf, &BTreeMap::new(), true).unwrap().pass);
        assert!(verify_primitive(&rep, &unf, &BTreeMap::new(), false).unwrap().pass);
    }

    #[test]
    fn class_equality() {
        let d = e12();
        let unf = build_unfolding(&d, 2, None, &BTreeMap::new()).unwrap();
        let one = one_rep(&unf);
        assert!(verify_class_equal(&one, &one, &unf).unwrap());
        let n = 2;
        let other = rep_from_terms(
            &unf,
            &[
                (Monomial::one(n), UnfoldRingElem::one(12, 2)),
                (Monomial::one(n), UnfoldRingElem::var(12, 2, 11)),
            ],
        );
        assert!(!verify_class_equal(&one, &other, &unf).unwrap());
    }

    #[test]
    fn p1_primitive() {
        for q in [1i64, 2, -3] {
            let d = SingularityData::laurent_p1(Rat::from_int(q)).unwrap();
            let unf = build_p1_unfolding(&d, 5).unwrap();
            assert!(verify_primitive(&one_rep(&unf), &unf, &BTreeMap::new(), true).unwrap().pass);
            let pf = primitive_form(&unf, &BTreeMap::new()).unwrap();
            assert!(is_trivial(&pf), "{:?}", pf.records());
        }
    }

    #[test]
    fn e6_with_c_consistent() {
        let d = e6_elliptic();
        let unf = build_unfolding(&d, 4, Some(&[7]), &BTreeMap::new()).unwrap();
        for cval in [0i64, 1, -2] {
            let c = BTreeMap::from([((8usize, 1usize), Rat::from_int(cval))]);
            let pf = primitive_form(&unf, &c).unwrap();
            let rep = pf.representative(&unf).unwrap();
            assert!(verify_primitive(&rep, &unf, &c, true).unwrap().pass, "c = {cval}");
            assert!(verify_primitive(&rep, &unf, &c, false).unwrap().pass, "c = {cval}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn truncation_stability(n in 2u32..5) {
            // E12 at order n truncated to order n-1 equals the (n-1) run
            let d = e12();
            let big = primitive_form(&build_unfolding(&d, n, None, &BTreeMap::new()).unwrap(), &BTreeMap::new()).unwrap();
            let small = primitive_form(&build_unfolding(&d, n - 1, None, &BTreeMap::new()).unwrap(), &BTreeMap::new()).unwrap();
            let tb: Vec<Vec<UnfoldRingElem>> = big.g.iter().map(|r| r.iter().map(|e| e.truncate(n - 1)).collect()).collect();
            let ts: Vec<Vec<UnfoldRingElem>> = small.g.iter().map(|r| r.iter().map(|e| e.truncate(n - 1)).collect()).collect();
            prop_assert_eq!(tb, ts);
        }
    }
}
