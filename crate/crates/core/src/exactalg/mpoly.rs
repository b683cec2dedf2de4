//! Sparse multivariate (optionally Laurent) polynomials over `Rat`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use super::{Rat, WeightSystem};
use crate::error::{Error, Result};

/// Exponent vector. Ordered by graded reverse lexicographic order on the
/// total degree, ties broken by variable index.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub SmallVec<[i32; 4]>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exps(exps: &[i32]) -> Monomial {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn var(nvars: usize, i: usize, e: i32) -> Monomial {
        let mut m = Monomial::one(nvars);
        m.0[i] = e;
        m
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial> {
        debug_assert_eq!(self.nvars(), other.nvars());
        let mut out = self.0.clone();
        for (a, b) in out.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).ok_or(Error::ExponentOverflow)?;
        }
        Ok(Monomial(out))
    }

    /// `self / other` if `other` divides `self` with nonnegative result.
    pub fn divide(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.0.clone();
        for (a, b) in out.iter_mut().zip(other.0.iter()) {
            if *a < *b {
                return None;
            }
            *a -= *b;
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn weighted_degree(&self, w: &WeightSystem) -> Rat {
        let mut d = Rat::zero();
        for (e, q) in self.0.iter().zip(w.weights()) {
            if *e != 0 {
                d += &(q * &Rat::from_int(*e as i64));
            }
        }
        d
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(other.0.iter()).rev() {
            if a != b {
                // a smaller exponent in the last differing variable is larger
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Result of a weighted-degree query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightedDegree {
    Homogeneous(Rat),
    Inhomogeneous,
    /// The zero polynomial is homogeneous of every degree.
    Zero,
}

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    vars: Arc<[String]>,
    laurent: Arc<[bool]>,
    terms: BTreeMap<Monomial, Rat>,
}

impl MPoly {
    pub fn zero(vars: &[&str]) -> MPoly {
        MPoly::zero_in(
            vars.iter().map(|s| s.to_string()).collect(),
            vec![false; vars.len()].into(),
        )
    }

    pub fn zero_in(vars: Arc<[String]>, laurent: Arc<[bool]>) -> MPoly {
        assert_eq!(vars.len(), laurent.len());
        MPoly { vars, laurent, terms: BTreeMap::new() }
    }

    /// Zero polynomial with the same variables and Laurent flags as `self`.
    pub fn zero_like(&self) -> MPoly {
        MPoly::zero_in(self.vars.clone(), self.laurent.clone())
    }

    /// Marks variable `i` as Laurent (negative exponents allowed).
    pub fn with_laurent(mut self, i: usize) -> MPoly {
        let mut flags = self.laurent.to_vec();
        flags[i] = true;
        self.laurent = flags.into();
        self
    }

    pub fn constant_like(&self, c: Rat) -> MPoly {
        let mut p = self.zero_like();
        p.add_term(Monomial::one(self.nvars()), c);
        p
    }

    pub fn monomial_like(&self, m: Monomial, c: Rat) -> Result<MPoly> {
        let mut p = self.zero_like();
        p.check_monomial(&m)?;
        p.add_term(m, c);
        Ok(p)
    }

    /// The polynomial `x_i`.
    pub fn var_like(&self, i: usize) -> MPoly {
        let mut p = self.zero_like();
        p.add_term(Monomial::var(self.nvars(), i, 1), Rat::one());
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn vars_arc(&self) -> Arc<[String]> {
        self.vars.clone()
    }

    pub fn laurent_flags(&self) -> &[bool] {
        &self.laurent
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Leading term under the global monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one(self.nvars()))
    }

    fn check_monomial(&self, m: &Monomial) -> Result<()> {
        for (i, &e) in m.exps().iter().enumerate() {
            if e < 0 && !self.laurent[i] {
                return Err(Error::LaurentNotAllowed(self.vars[i].clone()));
            }
        }
        Ok(())
    }

    /// Adds `c * m` in place; keeps the term map free of zeros.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        debug_assert!(self.check_monomial(&m).is_ok());
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &MPoly) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch(self.vars.to_vec(), other.vars.to_vec()));
        }
        Ok(())
    }

    pub fn add(&self, other: &MPoly) -> Result<MPoly> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.merge_laurent(other);
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MPoly) -> Result<MPoly> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.merge_laurent(other);
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    fn merge_laurent(&mut self, other: &MPoly) {
        if self.laurent != other.laurent {
            let flags: Vec<bool> =
                self.laurent.iter().zip(other.laurent.iter()).map(|(a, b)| *a || *b).collect();
            self.laurent = flags.into();
        }
    }

    pub fn neg(&self) -> MPoly {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        let mut out = self.zero_like();
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect();
        out
    }

    pub fn mul(&self, other: &MPoly) -> Result<MPoly> {
        self.check_same(other)?;
        let mut out = self.zero_like();
        out.merge_laurent(other);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.checked_mul(mb)?, ca * cb);
            }
        }
        Ok(out)
    }

    /// Multiplies by `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &Rat) -> Result<MPoly> {
        let mut out = self.zero_like();
        if c.is_zero() {
            return Ok(out);
        }
        for (ma, ca) in self.terms() {
            let p = ma.checked_mul(m)?;
            out.check_monomial(&p)?;
            out.terms.insert(p, ca * c);
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<MPoly> {
        let mut acc = self.constant_like(Rat::one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> MPoly {
        let mut out = self.zero_like();
        for (m, c) in self.terms() {
            let e = m.0[i];
            if e != 0 {
                let mut m2 = m.clone();
                m2.0[i] -= 1;
                out.add_term(m2, c * &Rat::from_int(e as i64));
            }
        }
        out
    }

    pub fn max_total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Largest weighted degree among the terms.
    pub fn max_weighted_degree(&self, w: &WeightSystem) -> Option<Rat> {
        self.terms.keys().map(|m| m.weighted_degree(w)).max()
    }

    pub fn weighted_degree(&self, w: &WeightSystem) -> WeightedDegree {
        let mut it = self.terms.keys().map(|m| m.weighted_degree(w));
        let Some(first) = it.next() else {
            return WeightedDegree::Zero;
        };
        for d in it {
            if d != first {
                return WeightedDegree::Inhomogeneous;
            }
        }
        WeightedDegree::Homogeneous(first)
    }

    /// Re-expresses the polynomial over a larger variable list (by name).
    pub fn embed(&self, vars: Arc<[String]>, laurent: Arc<[bool]>) -> Result<MPoly> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter().position(|w| w == v).ok_or_else(|| Error::UnknownVariable(v.clone()))
            })
            .collect::<Result<_>>()?;
        let mut out = MPoly::zero_in(vars, laurent);
        for (m, c) in self.terms() {
            let mut e = Monomial::one(out.nvars());
            for (i, &j) in map.iter().enumerate() {
                e.0[j] = m.0[i];
            }
            out.check_monomial(&e)?;
            out.add_term(e, c.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut coeff = c.clone();
            if k > 0 {
                if c.is_negative() {
                    write!(f, " - ")?;
                    coeff = -c;
                } else {
                    write!(f, " + ")?;
                }
            } else if c.is_negative() {
                write!(f, "-")?;
                coeff = -c;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", coeff, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}
