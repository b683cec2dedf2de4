//! Jacobian ring data for a weighted homogeneous singularity: validation,
//! Gröbner basis with cofactors, graded Milnor basis, classical residue and
//! the residue pairing, and orthogonalization of the basis.
//!
//! A univariate Laurent mode covers `f = z + q/z` on `C^*` with volume form
//! `dz/z`; there the basis is fixed to `{1, q/z}` and no Gröbner data exist.

mod groebner;

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::Signed;

pub use groebner::{divide, groebner_with_cofactors, Division, GroebnerElem};

use crate::error::{Error, Result};
use crate::exactalg::{identity, inverse, MPoly, Monomial, Rat, RatMatrix, WeightSystem};

/// Default bound on the number of standard monomials before the critical
/// point is declared non-isolated.
pub const DEFAULT_STANDARD_MONOMIAL_BOUND: usize = 10_000;

/// Division context of the Brieskorn lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    /// Polynomial `f` on `C^n`, volume form `dz_1 ... dz_n`.
    Polynomial,
    /// `f = z + q/z` on `C^*`, volume form `dz/z`, basis `{1, q/z}`.
    LaurentP1 { q: Rat },
}

#[derive(Debug, Clone)]
pub struct SingularityData {
    pub f: MPoly,
    pub weights: WeightSystem,
    pub mode: Mode,
    pub partials: Vec<MPoly>,
    pub groebner: Vec<GroebnerElem>,
    /// Standard monomials sorted by (weighted degree, monomial order).
    pub standard_monomials: Vec<Monomial>,
    /// The basis `phi_1..phi_mu`, each a combination of same-degree
    /// standard monomials.
    pub basis: Vec<MPoly>,
    pub degrees: Vec<Rat>,
    pub mu: usize,
    pub s: Rat,
    pub volume_twist: MPoly,
    pub residue_scale: Rat,
    /// Whether the residue pairing on `basis` is exactly anti-diagonal.
    pub anti_diagonal: bool,
    /// Row `i` gives `phi_i` in standard-monomial coordinates.
    basis_matrix: RatMatrix,
    /// Inverse of `basis_matrix`: monomial coordinates to basis coordinates.
    to_basis: RatMatrix,
    std_index: HashMap<Monomial, usize>,
}

/// Checks that `f` is weighted homogeneous of degree one with zero constant
/// term and returns the central charge `sum (1 - 2 q_i)`.
pub fn validate(f: &MPoly, w: &WeightSystem) -> Result<Rat> {
    if f.nvars() != w.len() {
        return Err(Error::WeightCount { expected: f.nvars(), got: w.len() });
    }
    if f.terms().any(|(m, _)| m.exps().iter().any(|&e| e < 0)) {
        return Err(Error::LaurentModeRequired);
    }
    if !f.constant_term().is_zero() {
        return Err(Error::ConstantTerm);
    }
    // Euler identity sum q_i z_i d_i f = f
    let mut euler = f.zero_like();
    for (i, q) in w.weights().iter().enumerate() {
        let zi_di = f.derivative(i).mul(&f.var_like(i))?;
        euler = euler.add(&zi_di.scale(q))?;
    }
    if euler != *f || f.is_zero() {
        return Err(Error::EulerIdentityViolated);
    }
    Ok(w.central_charge())
}

fn determinant(m: &[Vec<MPoly>]) -> Result<MPoly> {
    let n = m.len();
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = m[0][0].zero_like();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = m[0][j].mul(&determinant(&minor)?)?;
        acc = if j % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc)
}

/// Determinant of the matrix of second partial derivatives.
pub fn hessian(f: &MPoly) -> Result<MPoly> {
    let n = f.nvars();
    let rows: Vec<Vec<MPoly>> =
        (0..n).map(|i| (0..n).map(|j| f.derivative(i).derivative(j)).collect()).collect();
    determinant(&rows)
}

fn rational_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.abs().sqrt(), d.sqrt());
    if &rn * &rn == n && &rd * &rd == d {
        Some(Rat::from_bigints(rn, rd))
    } else {
        None
    }
}

fn bilinear(g: &RatMatrix, u: &[Rat], v: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (i, ui) in u.iter().enumerate() {
        if ui.is_zero() {
            continue;
        }
        for (j, vj) in v.iter().enumerate() {
            if !vj.is_zero() && !g[i][j].is_zero() {
                acc += &(&(ui * &g[i][j]) * vj);
            }
        }
    }
    acc
}

fn axpy(y: &mut [Rat], a: &Rat, x: &[Rat]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += &(a * xi);
    }
}

fn is_anti_diagonal(g: &RatMatrix) -> bool {
    let k = g.len();
    (0..k).all(|a| (0..k).all(|b| a + b + 1 == k || g[a][b].is_zero()))
}

/// Finds a basis of a self-paired slice in which the symmetric Gram matrix
/// `g` is anti-diagonal. Rows of the result are the new vectors in old
/// coordinates. Returns `None` when no rational isotropic splitting is found.
pub fn anti_diagonalize_symmetric(g: &RatMatrix) -> Option<RatMatrix> {
    let k = g.len();
    let mut vecs = identity(k);
    if is_anti_diagonal(g) {
        return Some(vecs);
    }
    let form = |u: &[Rat], v: &[Rat]| bilinear(g, u, v);
    let (mut lo, mut hi) = (0usize, k.saturating_sub(1));
    while lo < hi {
        let iso = |vecs: &RatMatrix, p: usize| form(&vecs[p], &vecs[p]).is_zero();
        let mut pos = [lo, hi].into_iter().chain(lo + 1..hi).find(|&p| iso(&vecs, p));
        if pos.is_none() {
            // look for a rational isotropic combination v_a + lambda v_b
            'search: for a in lo..=hi {
                for b in lo..=hi {
                    if a == b {
                        continue;
                    }
                    let gaa = form(&vecs[a], &vecs[a]);
                    let gab = form(&vecs[a], &vecs[b]);
                    let gbb = form(&vecs[b], &vecs[b]);
                    let disc = &(&gab * &gab) - &(&gaa * &gbb);
                    if let Some(r) = rational_sqrt(&disc) {
                        let lambda = &(&-gab + &r) / &gbb;
                        let vb = vecs[b].clone();
                        axpy(&mut vecs[a], &lambda, &vb);
                        pos = Some(a);
                        break 'search;
                    }
                }
            }
        }
        let p = pos?;
        let (anchor, other) = if p == hi {
            (hi, lo)
        } else {
            vecs.swap(lo, p);
            (lo, hi)
        };
        let u = vecs[anchor].clone();
        if form(&u, &vecs[other]).is_zero() {
            let j = (lo..=hi).find(|&j| j != anchor && !form(&u, &vecs[j]).is_zero())?;
            let vj = vecs[j].clone();
            axpy(&mut vecs[other], &Rat::one(), &vj);
        }
        let uw = form(&u, &vecs[other]);
        let ww = form(&vecs[other], &vecs[other]);
        let c = -(&ww / &(&Rat::from_int(2) * &uw));
        axpy(&mut vecs[other], &c, &u);
        let w = vecs[other].clone();
        for pidx in lo + 1..hi {
            let a = -(&form(&vecs[pidx], &w) / &uw);
            let b = -(&form(&vecs[pidx], &u) / &uw);
            let v = &mut vecs[pidx];
            axpy(v, &a, &u);
            axpy(v, &b, &w);
        }
        lo += 1;
        hi -= 1;
    }
    Some(vecs)
}

/// Orthogonalizes a graded basis so that the pairing `gram` becomes
/// anti-diagonal. `degrees` must be sorted and satisfy `d_i + d_{mu+1-i} = s`.
///
/// Returns the change of basis `T` (new `phi_i = sum_k T[i][k] old_k`) and
/// whether exact anti-diagonality was reached. For complementary degree
/// pairs `d < s - d` the lower-degree vectors are kept and their partners
/// are recombined; self-paired middle slices use an isotropic splitting.
pub fn orthogonalize(degrees: &[Rat], s: &Rat, gram: &RatMatrix) -> Result<(RatMatrix, bool)> {
    let mu = degrees.len();
    let mut t = identity(mu);
    let mut complete = true;
    let mut start = 0;
    while start < mu {
        let d = &degrees[start];
        let end = (start..mu).find(|&k| degrees[k] != *d).unwrap_or(mu);
        let block: Vec<usize> = (start..end).collect();
        let partner_deg = s - d;
        if *d < partner_deg {
            let partners: Vec<usize> = block.iter().map(|&i| mu - 1 - i).collect();
            if partners.iter().any(|&j| degrees[j] != partner_deg) {
                return Err(Error::Internal("degree symmetry broken in orthogonalization".into()));
            }
            let k = block.len();
            let p: RatMatrix = (0..k)
                .map(|a| (0..k).map(|b| pair(gram, &t, block[a], partners[b])).collect())
                .collect();
            let diagonal = (0..k).all(|a| (0..k).all(|b| a == b || p[a][b].is_zero()));
            if !diagonal {
                let pinv = inverse(&p).ok_or(Error::DegeneratePairing(block[0] + 1))?;
                let dvals: Vec<Rat> =
                    (0..k).map(|a| if p[a][a].is_zero() { Rat::one() } else { p[a][a].clone() }).collect();
                let old: Vec<Vec<Rat>> = partners.iter().map(|&j| t[j].clone()).collect();
                for b in 0..k {
                    let mut row = vec![Rat::zero(); mu];
                    for (bp, old_row) in old.iter().enumerate() {
                        axpy(&mut row, &(&pinv[bp][b] * &dvals[b]), old_row);
                    }
                    t[partners[b]] = row;
                }
            }
        } else if *d == partner_deg {
            let k = block.len();
            let g: RatMatrix =
                (0..k).map(|a| (0..k).map(|b| pair(gram, &t, block[a], block[b])).collect()).collect();
            match anti_diagonalize_symmetric(&g) {
                Some(x) => {
                    let old: Vec<Vec<Rat>> = block.iter().map(|&j| t[j].clone()).collect();
                    for a in 0..k {
                        let mut row = vec![Rat::zero(); mu];
                        for (b, old_row) in old.iter().enumerate() {
                            axpy(&mut row, &x[a][b], old_row);
                        }
                        t[block[a]] = row;
                    }
                }
                None => complete = false,
            }
        }
        start = end;
    }
    Ok((t, complete))
}

/// Pairing of the current vectors `i`, `j` given by rows of `t`.
fn pair(gram: &RatMatrix, t: &RatMatrix, i: usize, j: usize) -> Rat {
    bilinear(gram, &t[i], &t[j])
}

impl SingularityData {
    pub fn new(f: MPoly, weights: WeightSystem) -> Result<SingularityData> {
        Self::with_bound(f, weights, DEFAULT_STANDARD_MONOMIAL_BOUND)
    }

    pub fn with_bound(f: MPoly, weights: WeightSystem, bound: usize) -> Result<SingularityData> {
        let s = validate(&f, &weights)?;
        let n = f.nvars();
        let partials: Vec<MPoly> = (0..n).map(|i| f.derivative(i)).collect();
        let groebner = groebner_with_cofactors(&partials)?;
        let leads: Vec<Monomial> = groebner.iter().map(|g| g.poly.leading_term().unwrap().0.clone()).collect();

        // breadth-first enumeration of standard monomials
        let mut seen: HashSet<Monomial> = HashSet::new();
        let mut queue = VecDeque::from([Monomial::one(n)]);
        let mut standard = Vec::new();
        while let Some(m) = queue.pop_front() {
            if !seen.insert(m.clone()) || leads.iter().any(|l| l.divides(&m)) {
                continue;
            }
            standard.push(m.clone());
            if standard.len() > bound {
                return Err(Error::NonIsolated(bound));
            }
            for i in 0..n {
                queue.push_back(m.checked_mul(&Monomial::var(n, i, 1))?);
            }
        }
        standard.sort_by(|a, b| a.weighted_degree(&weights).cmp(&b.weighted_degree(&weights)).then(a.cmp(b)));
        let degrees: Vec<Rat> = standard.iter().map(|m| m.weighted_degree(&weights)).collect();
        let mu = standard.len();
        check_degree_symmetry(&degrees, &s)?;

        let std_index: HashMap<Monomial, usize> =
            standard.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut data = SingularityData {
            volume_twist: f.constant_like(Rat::one()),
            f,
            weights,
            mode: Mode::Polynomial,
            partials,
            groebner,
            basis: Vec::new(),
            standard_monomials: standard,
            degrees,
            mu,
            s,
            residue_scale: Rat::one(),
            anti_diagonal: false,
            basis_matrix: identity(mu),
            to_basis: identity(mu),
            std_index,
        };
        data.basis = data
            .standard_monomials
            .iter()
            .map(|m| data.f.monomial_like(m.clone(), Rat::one()))
            .collect::<Result<_>>()?;
        data.residue_scale = data.compute_residue_scale()?;
        let gram = data.residue_pairing_matrix()?;
        let (t, complete) = orthogonalize(&data.degrees, &data.s, &gram)?;
        data.set_basis_matrix(t)?;
        data.anti_diagonal = complete;
        data.residue_scale = data.compute_residue_scale()?;
        let gram = data.residue_pairing_matrix()?;
        if complete {
            for i in 0..mu {
                if gram[i][mu - 1 - i].is_zero() {
                    return Err(Error::DegeneratePairing(i + 1));
                }
            }
        } else if inverse(&gram).is_none() {
            return Err(Error::DegeneratePairing(mu));
        }
        Ok(data)
    }

    /// The Laurent context `f = z + q/z`, volume form `dz/z`, basis `{1, q/z}`.
    pub fn laurent_p1(q: Rat) -> Result<SingularityData> {
        if q.is_zero() {
            return Err(Error::InvalidParameter("q must be nonzero".into()));
        }
        let zero = MPoly::zero(&["z"]).with_laurent(0);
        let mut f = zero.clone();
        f.add_term(Monomial::from_exps(&[1]), Rat::one());
        f.add_term(Monomial::from_exps(&[-1]), q.clone());
        let one = zero.constant_like(Rat::one());
        let q_over_z = zero.monomial_like(Monomial::from_exps(&[-1]), q.clone())?;
        let partials = vec![f.derivative(0)];
        Ok(SingularityData {
            volume_twist: zero.var_like(0),
            weights: WeightSystem::unchecked(vec![Rat::zero()]),
            mode: Mode::LaurentP1 { q },
            partials,
            groebner: Vec::new(),
            standard_monomials: vec![Monomial::from_exps(&[0]), Monomial::from_exps(&[-1])],
            basis: vec![one, q_over_z],
            degrees: vec![Rat::zero(), Rat::one()],
            mu: 2,
            s: Rat::one(),
            residue_scale: Rat::one(),
            anti_diagonal: true,
            basis_matrix: identity(2),
            to_basis: identity(2),
            std_index: HashMap::new(),
            f,
        })
    }

    pub fn is_laurent(&self) -> bool {
        matches!(self.mode, Mode::LaurentP1 { .. })
    }

    fn set_basis_matrix(&mut self, t: RatMatrix) -> Result<()> {
        let inv = inverse(&t).ok_or_else(|| Error::Internal("singular basis change".into()))?;
        self.basis = t
            .iter()
            .map(|row| {
                let mut p = self.f.zero_like();
                for (k, c) in row.iter().enumerate() {
                    p.add_term(self.standard_monomials[k].clone(), c.clone());
                }
                p
            })
            .collect();
        self.basis_matrix = t;
        self.to_basis = inv;
        Ok(())
    }

    /// Rows give each basis vector in standard-monomial coordinates.
    pub fn basis_matrix(&self) -> &RatMatrix {
        &self.basis_matrix
    }

    /// Converts standard-monomial coordinates to basis coordinates.
    pub fn monomial_to_basis(&self, x: &[Rat]) -> Vec<Rat> {
        let mut y = vec![Rat::zero(); self.mu];
        for (k, xk) in x.iter().enumerate() {
            axpy(&mut y, xk, &self.to_basis[k]);
        }
        y
    }

    /// Coordinates of a remainder (supported on standard monomials) in the
    /// basis `phi`.
    pub fn remainder_coords(&self, r: &MPoly) -> Result<Vec<Rat>> {
        let mut x = vec![Rat::zero(); self.mu];
        for (m, c) in r.terms() {
            let k = self
                .std_index
                .get(m)
                .ok_or_else(|| Error::Internal(format!("non-standard monomial {m:?} in remainder")))?;
            x[*k] = c.clone();
        }
        Ok(self.monomial_to_basis(&x))
    }

    /// Divides `h` by the Jacobian ideal: returns the basis coordinates of
    /// the normal form and quotients `g_i` with `h = NF + sum g_i d_i f`.
    pub fn normal_form(&self, h: &MPoly) -> Result<(Vec<Rat>, Vec<MPoly>)> {
        if self.is_laurent() {
            return Err(Error::UnsupportedMode("laurent_p1"));
        }
        let d = divide(h, &self.groebner, self.partials.len())?;
        Ok((self.remainder_coords(&d.remainder)?, d.quotients))
    }

    fn compute_residue_scale(&self) -> Result<Rat> {
        let (y, _) = self.normal_form(&hessian(&self.f)?)?;
        let top = &y[self.mu - 1];
        if top.is_zero() {
            return Err(Error::DegeneratePairing(self.mu));
        }
        Ok(&Rat::from_int(self.mu as i64) / top)
    }

    /// Classical residue normalized so that `Res(hess f) = mu`.
    pub fn classical_residue(&self, g: &MPoly) -> Result<Rat> {
        let (y, _) = self.normal_form(g)?;
        Ok(&self.residue_scale * &y[self.mu - 1])
    }

    /// `M_ij = Res(phi_i phi_j)`.
    pub fn residue_pairing_matrix(&self) -> Result<RatMatrix> {
        let mu = self.mu;
        let mut m = vec![vec![Rat::zero(); mu]; mu];
        for i in 0..mu {
            for j in i..mu {
                // only products of top degree can pair nontrivially
                if &self.degrees[i] + &self.degrees[j] != self.s {
                    continue;
                }
                let r = self.classical_residue(&self.basis[i].mul(&self.basis[j])?)?;
                m[i][j] = r.clone();
                m[j][i] = r;
            }
        }
        Ok(m)
    }
}

fn check_degree_symmetry(degrees: &[Rat], s: &Rat) -> Result<()> {
    let mu = degrees.len();
    if mu == 0 || !degrees[0].is_zero() || degrees[mu - 1] != *s {
        return Err(Error::Internal("Milnor basis degrees do not span [0, s]".into()));
    }
    for i in 0..mu {
        if &degrees[i] + &degrees[mu - 1 - i] != *s {
            return Err(Error::Internal(format!("degree symmetry fails at position {}", i + 1)));
        }
    }
    Ok(())
}

/// The ordered basis with degrees.
pub fn milnor_basis(data: &SingularityData) -> Vec<(MPoly, Rat)> {
    data.basis.iter().cloned().zip(data.degrees.iter().cloned()).collect()
}

pub fn classical_residue(g: &MPoly, data: &SingularityData) -> Result<Rat> {
    data.classical_residue(g)
}

pub fn residue_pairing_matrix(data: &SingularityData) -> Result<RatMatrix> {
    data.residue_pairing_matrix()
}

/// The (already orthogonalized) basis of `data`.
pub fn orthogonalize_basis(data: &SingularityData) -> Vec<MPoly> {
    data.basis.clone()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn poly(vars: &[&str], terms: &[(&[i32], i64, i64)]) -> MPoly {
        let mut p = MPoly::zero(vars);
        for (e, n, d) in terms {
            p.add_term(Monomial::from_exps(e), Rat::new(*n, *d));
        }
        p
    }

    fn w(q: &[(i64, i64)]) -> WeightSystem {
        WeightSystem::new(q.iter().map(|(n, d)| Rat::new(*n, *d)).collect()).unwrap()
    }

    pub(crate) fn e12() -> SingularityData {
        SingularityData::new(poly(&["x", "y"], &[(&[3, 0], 1, 1), (&[0, 7], 1, 1)]), w(&[(1, 3), (1, 7)])).unwrap()
    }

    pub(crate) fn e6_elliptic() -> SingularityData {
        let f = poly(&["z1", "z2", "z3"], &[(&[3, 0, 0], 1, 3), (&[0, 3, 0], 1, 3), (&[0, 0, 3], 1, 3)]);
        SingularityData::new(f, w(&[(1, 3), (1, 3), (1, 3)])).unwrap()
    }

    pub(crate) fn a_m(m: i32) -> SingularityData {
        SingularityData::new(poly(&["z"], &[(&[m + 1], 1, 1)]), w(&[(1, m as i64 + 1)])).unwrap()
    }

    fn names(data: &SingularityData) -> Vec<String> {
        data.basis.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn central_charges() {
        assert_eq!(e12().s, Rat::new(22, 21));
        assert_eq!(e6_elliptic().s, Rat::one());
        for m in 1..=6 {
            // s = sum (1 - 2q) evaluated by hand: 1 - 2/(m+1)
            assert_eq!(a_m(m).s, Rat::new(m as i64 - 1, m as i64 + 1));
        }
    }

    #[test]
    fn rejects_inhomogeneous() {
        let f = poly(&["x", "y"], &[(&[3, 0], 1, 1), (&[0, 6], 1, 1)]);
        assert_eq!(validate(&f, &w(&[(1, 3), (1, 7)])), Err(Error::EulerIdentityViolated));
        let g = poly(&["x"], &[(&[0], 1, 1), (&[3], 1, 1)]);
        assert_eq!(validate(&g, &w(&[(1, 3)])), Err(Error::ConstantTerm));
    }

    #[test]
    fn non_isolated_detected() {
        // x^2 y has a non-isolated critical locus; weights (1/4, 1/2)
        let f = poly(&["x", "y"], &[(&[2, 1], 1, 1)]);
        let err = SingularityData::with_bound(f, w(&[(1, 4), (1, 2)]), 200).unwrap_err();
        assert_eq!(err, Error::NonIsolated(200));
    }

    #[test]
    fn e12_basis() {
        let d = e12();
        assert_eq!(d.mu, 12);
        assert_eq!(
            names(&d),
            ["1", "y", "y^2", "x", "y^3", "x*y", "y^4", "x*y^2", "y^5", "x*y^3", "x*y^4", "x*y^5"]
        );
        assert!(d.anti_diagonal);
    }

    #[test]
    fn e6_elliptic_basis_set() {
        let d = e6_elliptic();
        assert_eq!(d.mu, 8);
        let mut got = names(&d);
        got.sort();
        let mut want: Vec<String> =
            ["1", "z1", "z2", "z3", "z1*z2", "z2*z3", "z1*z3", "z1*z2*z3"].iter().map(|s| s.to_string()).collect();
        want.sort();
        assert_eq!(got, want);
        // monomial basis is already anti-diagonal: the basis stays monomial
        assert!(d.basis.iter().all(|p| p.len() == 1));
        assert_eq!(d.residue_scale, Rat::one());
    }

    #[test]
    fn a_m_basis() {
        for m in 1..=6 {
            let d = a_m(m);
            let want: Vec<MPoly> = (0..m).map(|k| poly(&["z"], &[(&[k], 1, 1)])).collect();
            assert_eq!(d.basis, want);
        }
    }

    #[test]
    fn a2_residue() {
        let d = a_m(2);
        let z = poly(&["z"], &[(&[1], 1, 1)]);
        assert_eq!(d.classical_residue(&z).unwrap(), Rat::new(1, 3));
        assert_eq!(d.classical_residue(&hessian(&d.f).unwrap()).unwrap(), Rat::from_int(2));
        assert!(d.classical_residue(&poly(&["z"], &[(&[0], 1, 1)])).unwrap().is_zero());
        let m = d.residue_pairing_matrix().unwrap();
        assert!(m[0][0].is_zero());
        assert_eq!(m[0][1], Rat::new(1, 3));
    }

    #[test]
    fn milnor_number_formula() {
        // mu = prod (1/q_i - 1)
        let cases = vec![e12(), e6_elliptic(), a_m(2), a_m(5)];
        for d in cases {
            let prod = d.weights.weights().iter().fold(Rat::one(), |acc, q| &acc * &(&q.recip() - &Rat::one()));
            assert_eq!(prod, Rat::from_int(d.mu as i64));
        }
        let e13 = SingularityData::new(poly(&["x", "y"], &[(&[3, 0], 1, 1), (&[1, 5], 1, 1)]), w(&[(1, 3), (2, 15)]))
            .unwrap();
        assert_eq!(e13.mu, 13);
        assert!(e13.anti_diagonal);
    }

    #[test]
    fn pairing_anti_triangular_and_anti_diagonal() {
        for d in [e12(), e6_elliptic(), a_m(4)] {
            let m = d.residue_pairing_matrix().unwrap();
            for i in 0..d.mu {
                for j in 0..d.mu {
                    if i + j + 1 != d.mu {
                        assert!(m[i][j].is_zero(), "entry ({i},{j})");
                    } else {
                        assert!(!m[i][j].is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn synthetic_middle_slice() {
        let g = vec![vec![Rat::one(), Rat::one()], vec![Rat::one(), Rat::zero()]];
        let x = anti_diagonalize_symmetric(&g).unwrap();
        // the isotropic vector is kept, the other one is corrected
        assert_eq!(x[1], vec![Rat::zero(), Rat::one()]);
        assert_eq!(x[0], vec![Rat::one(), Rat::new(-1, 2)]);
        let new: RatMatrix = (0..2).map(|a| (0..2).map(|b| bilinear(&g, &x[a], &x[b])).collect()).collect();
        assert!(is_anti_diagonal(&new));
        assert!(!new[0][1].is_zero());
    }

    #[test]
    fn anisotropic_middle_slice_is_flagged() {
        // x^3 + x y^2: the middle slice carries the form diag(c, -c/3)
        let f = poly(&["x", "y"], &[(&[3, 0], 1, 1), (&[1, 2], 1, 1)]);
        let d = SingularityData::new(f, w(&[(1, 3), (1, 3)])).unwrap();
        assert_eq!(d.mu, 4);
        assert!(!d.anti_diagonal);
    }

    #[test]
    fn mixed_degree_block_is_orthogonalized() {
        // x^3 + y^3 + x^2 y has self-paired middle degree with cross terms
        let f = poly(&["x", "y"], &[(&[3, 0], 1, 1), (&[0, 3], 1, 1), (&[2, 1], 1, 1)]);
        let d = SingularityData::new(f, w(&[(1, 3), (1, 3)])).unwrap();
        let m = d.residue_pairing_matrix().unwrap();
        if d.anti_diagonal {
            for i in 0..d.mu {
                for j in 0..d.mu {
                    assert_eq!(i + j + 1 != d.mu, m[i][j].is_zero());
                }
            }
        }
        for (p, deg) in d.basis.iter().zip(&d.degrees) {
            assert_eq!(p.weighted_degree(&d.weights), crate::exactalg::WeightedDegree::Homogeneous(deg.clone()));
        }
    }

    proptest! {
        #[test]
        fn residue_annihilates_jacobian_ideal(
            terms in prop::collection::vec(((0i32..6, 0i32..9), -5i64..6), 1..6),
            i in 0usize..2,
        ) {
            let d = e12();
            let mut g = MPoly::zero(&["x", "y"]);
            for ((a, b), c) in terms {
                g.add_term(Monomial::from_exps(&[a, b]), Rat::from_int(c));
            }
            let h = g.mul(&d.partials[i]).unwrap();
            prop_assert!(d.classical_residue(&h).unwrap().is_zero());
            let (nf, _) = d.normal_form(&h).unwrap();
            prop_assert!(nf.iter().all(|c| c.is_zero()));
        }

        #[test]
        fn residue_is_linear(a in -20i64..20, b in 1i64..9, ea in 0i32..4, eb in 0i32..9) {
            let d = e12();
            let p = poly(&["x", "y"], &[(&[ea, eb], a, b)]);
            let q = poly(&["x", "y"], &[(&[1, 5], 1, 1)]);
            let lhs = d.classical_residue(&p.add(&q).unwrap()).unwrap();
            let rhs = &d.classical_residue(&p).unwrap() + &d.classical_residue(&q).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
