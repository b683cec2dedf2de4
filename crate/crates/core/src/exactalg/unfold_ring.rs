//! The truncated parameter ring `Q[u_1..u_m] / m^{N+1}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use smallvec::SmallVec;

use super::Rat;
use crate::error::{Error, Result};

/// Exponent vector in the parameters `u`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UMono(pub SmallVec<[u8; 16]>);

impl UMono {
    pub fn one(nvars: usize) -> UMono {
        UMono(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> UMono {
        let mut m = UMono::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn from_exps(e: &[u8]) -> UMono {
        UMono(SmallVec::from_slice(e))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exps(&self) -> &[u8] {
        &self.0
    }

    fn mul(&self, other: &UMono) -> UMono {
        UMono(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for UMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Element of `Q[u] / m^{N+1}`: every stored monomial has total degree `<= N`.
#[derive(Clone, PartialEq, Eq)]
pub struct UnfoldRingElem {
    nvars: usize,
    order: u32,
    terms: BTreeMap<UMono, Rat>,
}

impl UnfoldRingElem {
    pub fn zero(nvars: usize, order: u32) -> Self {
        UnfoldRingElem { nvars, order, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, order: u32, c: Rat) -> Self {
        let mut r = Self::zero(nvars, order);
        r.add_term(UMono::one(nvars), c);
        r
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::constant(nvars, order, Rat::one())
    }

    pub fn var(nvars: usize, order: u32, i: usize) -> Self {
        let mut r = Self::zero(nvars, order);
        r.add_term(UMono::var(nvars, i), Rat::one());
        r
    }

    pub fn from_terms(nvars: usize, order: u32, terms: impl IntoIterator<Item = (UMono, Rat)>) -> Self {
        let mut r = Self::zero(nvars, order);
        for (m, c) in terms {
            r.add_term(m, c);
        }
        r
    }

    pub fn zero_like(&self) -> Self {
        Self::zero(self.nvars, self.order)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UMono, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &UMono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&UMono::one(self.nvars))
    }

    /// Lowest total degree of a stored monomial.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    /// Adds `c * m`, dropping it if `m` lies beyond the truncation.
    pub fn add_term(&mut self, m: UMono, c: Rat) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() || m.degree() > self.order {
            return;
        }
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

    fn check(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::TruncationMismatch(self.order, other.order));
        }
        if self.nvars != other.nvars {
            return Err(Error::ParameterCountMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    /// In-place addition; panics on mismatched rings (internal use).
    pub fn add_assign(&mut self, other: &Self) {
        debug_assert!(self.check(other).is_ok());
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &Rat) {
        debug_assert!(self.check(other).is_ok());
        if c.is_zero() {
            return;
        }
        for (m, a) in other.terms() {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &-Rat::one());
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = self.zero_like();
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect();
        }
        out
    }

    /// Truncated product; all terms of total degree `> N` are discarded.
    pub fn trunc_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.zero_like();
        out.add_mul(self, other);
        Ok(out)
    }

    /// `self += a * b` (truncated).
    pub fn add_mul(&mut self, a: &Self, b: &Self) {
        debug_assert!(self.check(a).is_ok() && self.check(b).is_ok());
        if a.is_zero() || b.is_zero() {
            return;
        }
        let n = self.order;
        let bterms: Vec<(&UMono, u32, &Rat)> = b.terms.iter().map(|(m, c)| (m, m.degree(), c)).collect();
        let mut acc: HashMap<UMono, Rat> = HashMap::new();
        for (ma, ca) in a.terms() {
            let da = ma.degree();
            if da > n {
                continue;
            }
            for (mb, db, cb) in &bterms {
                if da + db > n {
                    continue;
                }
                let p = ma.mul(mb);
                let c = ca * *cb;
                acc.entry(p).and_modify(|x| *x += &c).or_insert(c);
            }
        }
        for (m, c) in acc {
            self.add_term(m, c);
        }
    }

    /// Drops all terms of total degree `> order` and relabels the ring.
    pub fn truncate(&self, order: u32) -> Self {
        let mut out = Self::zero(self.nvars, order);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// `exp(u_i) - 1` truncated at the ring order.
    pub fn exp_minus_one(nvars: usize, order: u32, i: usize) -> Self {
        let mut out = Self::zero(nvars, order);
        for k in 1..=order {
            let mut m = UMono::one(nvars);
            m.0[i] = k as u8;
            out.add_term(m, Rat::factorial(k).recip());
        }
        out
    }

    /// Keeps only the given variables (in order), dropping every term that
    /// involves another variable.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut out = Self::zero(keep.len(), self.order);
        'terms: for (m, c) in self.terms() {
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 && !keep.contains(&i) {
                    continue 'terms;
                }
            }
            out.add_term(UMono(keep.iter().map(|&i| m.0[i]).collect()), c.clone());
        }
        out
    }
}

impl fmt::Debug for UnfoldRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mons: Vec<String> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { format!("u{}", i + 1) } else { format!("u{}^{}", i + 1, e) })
                    .collect();
                if mons.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", mons.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
