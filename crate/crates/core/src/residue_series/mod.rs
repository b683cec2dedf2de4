//! Exact higher residue pairings for univariate singularities.
//!
//! Two evaluators serve as mutual oracles: the closed form for
//! `f = z^{m+1}/(m+1)` and a Laurent-series evaluator summing
//! `(-t)^r Res (1/g) b [(D o 1/g)^r a] vol` over the poles at `0` (and `inf`
//! for the mirror of P^1), where `D` is the derivation dual to the volume
//! form and `g = D f`.
//!
//! The derivation acts on the first argument; with this choice
//! `pairing(h, 1)` reproduces the closed form and `K(a,b)(t) = K(b,a)(-t)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::Rat;

/// A finitely supported series in `t`: power -> coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct TLaurentValue(pub BTreeMap<i32, Rat>);

impl TLaurentValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeff(&self, k: i32) -> Rat {
        self.0.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> Vec<i32> {
        self.0.keys().copied().collect()
    }

    fn add_term(&mut self, k: i32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(k).or_insert_with(Rat::zero);
        *e += &c;
        if e.is_zero() {
            self.0.remove(&k);
        }
    }

    /// `t -> -t`.
    pub fn conjugate(&self) -> Self {
        Self(self.0.iter().map(|(k, c)| (*k, if k % 2 == 0 { c.clone() } else { -c })).collect())
    }
}

impl fmt::Display for TLaurentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Sum_{r <= t_order} (-t)^r Prod_{k<r}(m + k(m+1)) Res_{z=0} h dz / z^{r(m+1)+m}`
/// for `h = Sum h_j z^j`.
pub fn higher_residue_am(h: &BTreeMap<i32, Rat>, m: u32, t_order: u32) -> TLaurentValue {
    assert!(m >= 1, "m must be positive");
    let m = m as i64;
    let mut out = TLaurentValue::zero();
    let mut prod = Rat::one();
    for r in 0..=t_order as i64 {
        if r > 0 {
            prod = &prod * &Rat::from_int(m + (r - 1) * (m + 1));
        }
        // Res z^j / z^{r(m+1)+m} picks j = r(m+1) + m - 1
        let j = r * (m + 1) + m - 1;
        if let Some(c) = h.get(&(j as i32)) {
            let sign = if r % 2 == 0 { Rat::one() } else { -Rat::one() };
            out.add_term(r as i32, &(&sign * &prod) * c);
        }
    }
    out
}

/// Pairing contexts with their volume forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairingContext {
    /// `f = z^{m+1}/(m+1)` on C with volume `dz`.
    Am { m: u32 },
    /// `f = z + q/z` on C^* with volume `dz/z`.
    P1 { q: Rat },
}

/// Truncated Laurent series in a local coordinate: coefficients are exact
/// for exponents `< prec` (`None`: exact everywhere).
#[derive(Debug, Clone, PartialEq)]
struct Series {
    coeffs: BTreeMap<i32, Rat>,
    prec: Option<i32>,
}

impl Series {
    fn exact(coeffs: BTreeMap<i32, Rat>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self { coeffs, prec: None }
    }

    fn valuation(&self) -> Option<i32> {
        self.coeffs.keys().next().copied().or(self.prec)
    }

    fn mul(&self, other: &Self) -> Self {
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (Some(p), None) => other.valuation().map(|v| p.saturating_add(v)).or(Some(i32::MAX)),
            (None, Some(p)) => self.valuation().map(|v| p.saturating_add(v)).or(Some(i32::MAX)),
            (Some(p), Some(q)) => {
                let a = other.valuation().map_or(i32::MAX, |v| p.saturating_add(v));
                let b = self.valuation().map_or(i32::MAX, |v| q.saturating_add(v));
                Some(a.min(b))
            }
        };
        let mut coeffs: BTreeMap<i32, Rat> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let k = i + j;
                if prec.is_some_and(|p| k >= p) {
                    continue;
                }
                *coeffs.entry(k).or_insert_with(Rat::zero) += &(a * b);
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self { coeffs, prec }
    }

    fn scale(&self, c: &Rat) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, v)| (*k, v * c)).filter(|(_, v)| !v.is_zero()).collect();
        Self { coeffs, prec: self.prec }
    }

    /// `x d/dx`.
    fn euler(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| **k != 0)
            .map(|(k, v)| (*k, v * &Rat::from_int(*k as i64)))
            .collect();
        Self { coeffs, prec: self.prec }
    }

    /// `d/dx`.
    fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| **k != 0)
            .map(|(k, v)| (k - 1, v * &Rat::from_int(*k as i64)))
            .collect();
        Self { coeffs, prec: self.prec.map(|p| p.saturating_sub(1)) }
    }

    /// Drops exponents `>= cap`, lowering the precision accordingly.
    fn truncate(&mut self, cap: i32) {
        self.coeffs.retain(|k, _| *k < cap);
        self.prec = Some(self.prec.map_or(cap, |p| p.min(cap)));
    }

    /// Coefficient of `x^k`, or `None` when beyond the precision.
    fn coeff(&self, k: i32) -> Option<Rat> {
        if self.prec.is_some_and(|p| k >= p) {
            return None;
        }
        Some(self.coeffs.get(&k).cloned().unwrap_or_else(Rat::zero))
    }
}

/// One pole of the integrand in a local coordinate `x`.
struct Chart {
    /// `1/g` expanded in `x`.
    kernel: Series,
    /// `a(z)` and `b(z)` pulled back.
    a: Series,
    b: Series,
    /// Derivation: plain `d/dx` or `sign * x d/dx`.
    euler_sign: Option<Rat>,
    /// Volume form `sign * x^{shift} dx`.
    vol_shift: i32,
    vol_sign: Rat,
}

impl Chart {
    fn apply(&self, s: &Series) -> Series {
        let v = self.kernel.mul(s);
        match &self.euler_sign {
            None => v.derivative(),
            Some(sign) => v.euler().scale(sign),
        }
    }

    /// Residues of the `r`-th terms, `r = 0..=t_order`.
    fn residues(&self, t_order: u32) -> Option<Vec<Rat>> {
        let mut out = Vec::new();
        let target = -1 - self.vol_shift;
        let kb = self.kernel.mul(&self.b);
        // With a regular kernel and an Euler derivation exponents never
        // decrease, so terms of `cur` at or above `cap` cannot reach `target`.
        let cap = match (&self.euler_sign, self.kernel.valuation(), kb.valuation()) {
            (Some(_), Some(vk), Some(v)) if vk >= 0 => Some(target.saturating_sub(v).saturating_add(1)),
            _ => None,
        };
        let mut cur = self.a.clone();
        for r in 0..=t_order {
            if r > 0 {
                cur = self.apply(&cur);
            }
            if let Some(cap) = cap {
                cur.truncate(cap);
            }
            let integrand = kb.mul(&cur);
            let c = integrand.coeff(-1 - self.vol_shift)?;
            out.push(&c * &self.vol_sign);
        }
        Some(out)
    }
}

fn check_laurent(p: &BTreeMap<i32, Rat>, context: &PairingContext) -> Result<()> {
    if matches!(context, PairingContext::Am { .. }) && p.iter().any(|(k, c)| *k < 0 && !c.is_zero()) {
        return Err(Error::InvalidParameter("negative exponents need the laurent_p1 context".into()));
    }
    Ok(())
}

fn charts(a: &BTreeMap<i32, Rat>, b: &BTreeMap<i32, Rat>, context: &PairingContext, depth: usize) -> Vec<Chart> {
    match context {
        PairingContext::Am { m } => vec![Chart {
            kernel: Series::exact(BTreeMap::from([(-(*m as i32), Rat::one())])),
            a: Series::exact(a.clone()),
            b: Series::exact(b.clone()),
            euler_sign: None,
            vol_shift: 0,
            vol_sign: Rat::one(),
        }],
        PairingContext::P1 { q } => {
            let inv = q.recip();
            let depth = depth as i32;
            // at 0: 1/(z - q/z) = -(z/q) Sum (z^2/q)^n
            let mut k0 = BTreeMap::new();
            let mut c = -inv.clone();
            for n in 0..depth {
                k0.insert(2 * n + 1, c.clone());
                c = &c * &inv;
            }
            // at inf, x = 1/z: 1/(1/x - q x) = x Sum (q x^2)^n
            let mut kinf = BTreeMap::new();
            let mut c = Rat::one();
            for n in 0..depth {
                kinf.insert(2 * n + 1, c.clone());
                c = &c * q;
            }
            let flip = |p: &BTreeMap<i32, Rat>| Series::exact(p.iter().map(|(k, v)| (-k, v.clone())).collect());
            vec![
                Chart {
                    kernel: Series { coeffs: k0, prec: Some(2 * depth + 1) },
                    a: Series::exact(a.clone()),
                    b: Series::exact(b.clone()),
                    euler_sign: Some(Rat::one()),
                    vol_shift: -1,
                    vol_sign: Rat::one(),
                },
                // z d/dz = -x d/dx and dz/z = -dx/x
                Chart {
                    kernel: Series { coeffs: kinf, prec: Some(2 * depth + 1) },
                    a: flip(a),
                    b: flip(b),
                    euler_sign: Some(-Rat::one()),
                    vol_shift: -1,
                    vol_sign: -Rat::one(),
                },
            ]
        }
    }
}

/// Higher residue pairing `K(a, b)` of Laurent polynomials through
/// `t^{t_order}`. Kernels are expanded to a depth that is doubled until the
/// tracked precision covers every residue.
pub fn pairing_univariate(
    a: &BTreeMap<i32, Rat>,
    b: &BTreeMap<i32, Rat>,
    context: &PairingContext,
    t_order: u32,
) -> Result<TLaurentValue> {
    pairing_with_depth(a, b, context, t_order, None, 1 << 16)
}

/// As [`pairing_univariate`] with an explicit starting depth and cap.
pub fn pairing_with_depth(
    a: &BTreeMap<i32, Rat>,
    b: &BTreeMap<i32, Rat>,
    context: &PairingContext,
    t_order: u32,
    start: Option<usize>,
    max_depth: usize,
) -> Result<TLaurentValue> {
    check_laurent(a, context)?;
    check_laurent(b, context)?;
    if let PairingContext::P1 { q } = context {
        if q.is_zero() {
            return Err(Error::InvalidParameter("q must be nonzero".into()));
        }
    }
    // the a-posteriori precision check certifies any depth, so start small
    let span = a.keys().chain(b.keys()).map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
    let mut depth = start.unwrap_or(t_order as usize + span + 2).max(1);
    loop {
        let mut total: Option<Vec<Rat>> = Some(vec![Rat::zero(); t_order as usize + 1]);
        for chart in charts(a, b, context, depth) {
            total = match (total, chart.residues(t_order)) {
                (Some(acc), Some(r)) => Some(acc.iter().zip(&r).map(|(x, y)| x + y).collect()),
                _ => None,
            };
        }
        if let Some(vals) = total {
            let mut out = TLaurentValue::zero();
            for (r, v) in vals.into_iter().enumerate() {
                let v = if r % 2 == 0 { v } else { -v };
                out.add_term(r as i32, v);
            }
            return Ok(out);
        }
        if depth >= max_depth {
            return Err(Error::ExpansionDepthInsufficient(depth));
        }
        depth = (depth * 2).min(max_depth);
    }
}
