//! Buchberger's algorithm over `Q` with cofactor tracking.
//!
//! Every basis element carries a row of cofactors expressing it as a
//! combination of the original generators, so that a division by the basis
//! can be folded back into quotients over the generators.

use crate::error::Result;
use crate::exactalg::{MPoly, Monomial, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerElem {
    pub poly: MPoly,
    /// `poly == sum_i cofactors[i] * gens[i]`.
    pub cofactors: Vec<MPoly>,
}

/// Outcome of dividing a polynomial by a Gröbner basis.
#[derive(Debug, Clone)]
pub struct Division {
    pub remainder: MPoly,
    /// Quotients over the original generators: `h = remainder + sum q_i gens[i]`.
    pub quotients: Vec<MPoly>,
}

fn combine(rows: &[(&[MPoly], MPoly)], zero: &MPoly, n: usize) -> Result<Vec<MPoly>> {
    let mut out = vec![zero.clone(); n];
    for (row, mult) in rows {
        for (o, r) in out.iter_mut().zip(row.iter()) {
            if !r.is_zero() && !mult.is_zero() {
                *o = o.add(&r.mul(mult)?)?;
            }
        }
    }
    Ok(out)
}

/// Reduces `h` by `basis`, recording quotients per basis element.
fn divide_raw(h: &MPoly, basis: &[GroebnerElem]) -> Result<(MPoly, Vec<MPoly>)> {
    let mut p = h.clone();
    let mut rem = h.zero_like();
    let mut quots = vec![h.zero_like(); basis.len()];
    let leads: Vec<(Monomial, Rat)> = basis
        .iter()
        .map(|g| {
            let (m, c) = g.poly.leading_term().expect("zero basis element");
            (m.clone(), c.clone())
        })
        .collect();
    while let Some((lm, lc)) = p.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
        let hit = leads.iter().enumerate().find_map(|(k, (gm, gc))| {
            if lm.exps().iter().any(|&e| e < 0) {
                return None;
            }
            lm.divide(gm).map(|q| (k, q, &lc / gc))
        });
        match hit {
            Some((k, qm, qc)) => {
                let sub = basis[k].poly.mul_term(&qm, &qc)?;
                p = p.sub(&sub)?;
                quots[k].add_term(qm, qc);
            }
            None => {
                rem.add_term(lm.clone(), lc.clone());
                let mut lead = p.zero_like();
                lead.add_term(lm, lc);
                p = p.sub(&lead)?;
            }
        }
    }
    Ok((rem, quots))
}

/// Computes a Gröbner basis of the ideal generated by `gens`, each element
/// with its cofactor row over `gens`. Input generators are kept verbatim;
/// new elements are made monic. The result is minimal (no leading monomial
/// divides another).
pub fn groebner_with_cofactors(gens: &[MPoly]) -> Result<Vec<GroebnerElem>> {
    let n = gens.len();
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let zero = first.zero_like();
    let one = zero.constant_like(Rat::one());
    let mut basis: Vec<GroebnerElem> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let mut cof = vec![zero.clone(); n];
        cof[i] = one.clone();
        basis.push(GroebnerElem { poly: g.clone(), cofactors: cof });
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop() {
        let (mi, ci) = basis[i].poly.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let (mj, cj) = basis[j].poly.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let l = mi.lcm(&mj);
        // coprime leading monomials: the S-polynomial reduces to zero
        if l.total_degree() == mi.total_degree() + mj.total_degree() {
            continue;
        }
        let ti = l.divide(&mi).unwrap();
        let tj = l.divide(&mj).unwrap();
        let si = basis[i].poly.mul_term(&ti, &ci.recip())?;
        let sj = basis[j].poly.mul_term(&tj, &cj.recip())?;
        let s = si.sub(&sj)?;
        let (rem, quots) = divide_raw(&s, &basis)?;
        if rem.is_zero() {
            continue;
        }
        // rem = s - sum quots_k basis_k, expressed over the generators
        let mut rows: Vec<(&[MPoly], MPoly)> = Vec::new();
        let ti_p = zero.monomial_like(ti, ci.recip())?;
        let tj_p = zero.monomial_like(tj, -cj.recip())?;
        rows.push((&basis[i].cofactors, ti_p));
        rows.push((&basis[j].cofactors, tj_p));
        for (k, q) in quots.iter().enumerate() {
            if !q.is_zero() {
                rows.push((&basis[k].cofactors, q.neg()));
            }
        }
        let cof = combine(&rows, &zero, n)?;
        let lc = rem.leading_term().unwrap().1.recip();
        let elem = GroebnerElem {
            poly: rem.scale(&lc),
            cofactors: cof.iter().map(|c| c.scale(&lc)).collect(),
        };
        let new = basis.len();
        basis.push(elem);
        for i in 0..new {
            pairs.push((i, new));
        }
    }
    // minimalize
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        let mi = basis[i].poly.leading_term().unwrap().0;
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let mj = basis[j].poly.leading_term().unwrap().0;
            if mj.divides(mi) && (mj != mi || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    Ok(basis.into_iter().zip(keep).filter(|(_, k)| *k).map(|(b, _)| b).collect())
}

/// Divides `h` by the basis and folds the quotients back onto the generators.
pub fn divide(h: &MPoly, basis: &[GroebnerElem], ngens: usize) -> Result<Division> {
    let (remainder, quots) = divide_raw(h, basis)?;
    let zero = h.zero_like();
    let rows: Vec<(&[MPoly], MPoly)> = quots
        .into_iter()
        .enumerate()
        .filter(|(_, q)| !q.is_zero())
        .map(|(k, q)| (basis[k].cofactors.as_slice(), q))
        .collect();
    let quotients = combine(&rows, &zero, ngens)?;
    Ok(Division { remainder, quotients })
}
