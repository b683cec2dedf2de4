//! Good opposite filtrations of a weighted homogeneous singularity: the step
//! table `r(i,j) = d_i - d_j`, the dimension `D`, and the classification of
//! the opposite-basis parameters `c_ij` by the isotropy constraints
//! `K(Phi_i, Phi_{mu+1-j}) in C`.
//!
//! Higher pairing constants `a_kl` (`k + l > mu + 1`) are carried as symbols
//! unless supplied.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::Rat;
use crate::singularity::SingularityData;

/// `r(i,j) = d_i - d_j` (0-based storage).
pub fn step_table(degrees: &[Rat]) -> Vec<Vec<Rat>> {
    degrees.iter().map(|di| degrees.iter().map(|dj| di - dj).collect()).collect()
}

fn positive_integer(r: &Rat) -> Option<i64> {
    (r.is_integer() && r.is_positive()).then(|| r.to_i64().expect("small step"))
}

/// `#{r(i,j) in Z_{>0}, i+j < mu+1} + #{r(i,j) odd positive, i+j = mu+1}`.
pub fn dimension_d(degrees: &[Rat]) -> usize {
    let mu = degrees.len();
    let mut count = 0;
    for i in 1..=mu {
        for j in 1..=mu {
            let Some(r) = positive_integer(&(&degrees[i - 1] - &degrees[j - 1])) else { continue };
            if i + j < mu + 1 || (i + j == mu + 1 && r % 2 == 1) {
                count += 1;
            }
        }
    }
    count
}

/// A symbol of the constraint polynomials (1-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// Opposite-basis parameter `c_ij`.
    C(usize, usize),
    /// Pairing constant `a_kl` with `k <= l`.
    A(usize, usize),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::C(i, j) => write!(f, "c[{i},{j}]"),
            Symbol::A(k, l) => write!(f, "a[{k},{l}]"),
        }
    }
}

/// Polynomial over `Q` in [`Symbol`]s.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymPoly {
    terms: BTreeMap<Vec<(Symbol, u32)>, Rat>,
}

impl SymPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![(s, 1)], Rat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Vec<(Symbol, u32)>, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Rat::zero);
        *e += &c;
        if e.is_zero() {
            let key: Vec<_> = self.terms.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).unwrap();
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m: BTreeMap<Symbol, u32> = ma.iter().copied().collect();
                for (s, e) in mb {
                    *m.entry(*s).or_insert(0) += e;
                }
                out.add_term(m.into_iter().collect(), ca * cb);
            }
        }
        out
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.iter().map(|(s, _)| *s)).collect()
    }

    /// Splits `self = alpha * s + beta` when `self` is affine in `s`.
    fn split_linear(&self, s: Symbol) -> Option<(SymPoly, SymPoly)> {
        let (mut alpha, mut beta) = (Self::zero(), Self::zero());
        for (m, c) in &self.terms {
            match m.iter().find(|(x, _)| *x == s) {
                None => beta.add_term(m.clone(), c.clone()),
                Some((_, 1)) => alpha.add_term(m.iter().filter(|(x, _)| *x != s).copied().collect(), c.clone()),
                Some(_) => return None,
            }
        }
        Some((alpha, beta))
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
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
            let factors: Vec<String> =
                m.iter().map(|(s, e)| if *e == 1 { s.to_string() } else { format!("{s}^{e}") }).collect();
            if factors.is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A parameter fixed by an isotropy constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Determined {
    pub param: (usize, usize),
    /// `(i, j)` of the constraint `K(Phi_i, Phi_{mu+1-j}) in C`.
    pub constraint: (usize, usize),
    #[serde(serialize_with = "display")]
    pub expression: SymPoly,
    /// Unknown pairing constants the expression references.
    pub constants: Vec<(usize, usize)>,
}

fn display<S: serde::Serializer>(p: &SymPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuliReport {
    pub mu: usize,
    pub steps: Vec<Vec<Rat>>,
    pub d: usize,
    pub free: Vec<(usize, usize)>,
    pub determined: Vec<Determined>,
    pub auto_vanishing: Vec<(usize, usize)>,
    pub unknown_constants: Vec<(usize, usize)>,
}

impl ModuliReport {
    /// Every admissible `(i, j)` with `r(i,j)` a positive integer.
    pub fn support(&self) -> BTreeSet<(usize, usize)> {
        let mut s: BTreeSet<_> = self.free.iter().copied().collect();
        s.extend(self.determined.iter().map(|d| d.param));
        s.extend(self.auto_vanishing.iter().copied());
        s
    }
}

enum Status {
    Free,
    Determined(SymPoly),
    Vanishing,
}

struct Context<'a> {
    degrees: &'a [Rat],
    s: &'a Rat,
    mu: usize,
    classical: &'a [Rat],
    known: BTreeMap<(usize, usize), Rat>,
    status: BTreeMap<(usize, usize), Status>,
}

impl Context<'_> {
    fn pairing_degree(&self, k: usize, l: usize) -> Rat {
        &(&self.degrees[k - 1] + &self.degrees[l - 1]) - self.s
    }

    /// `a_kl(t)`'s coefficient: zero, known, or a symbol (with the sign of
    /// `a_lk(t) = a_kl(-t)`).
    fn a_value(&self, k: usize, l: usize) -> SymPoly {
        let mu = self.mu;
        if k + l < mu + 1 {
            return SymPoly::zero();
        }
        if k + l == mu + 1 {
            return SymPoly::constant(self.classical[k - 1].clone());
        }
        let deg = self.pairing_degree(k, l);
        // degree 0 is the classical residue, anti-diagonal in this basis
        if !deg.is_integer() || !deg.is_positive() {
            return SymPoly::zero();
        }
        let odd = deg.to_i64().expect("small degree") % 2 != 0;
        if k == l && odd {
            return SymPoly::zero();
        }
        let (lo, hi) = (k.min(l), k.max(l));
        let sign = if k > l && odd { -Rat::one() } else { Rat::one() };
        match self.known.get(&(lo, hi)) {
            Some(v) => SymPoly::constant(v * &sign),
            None => SymPoly::symbol(Symbol::A(lo, hi)).scale(&sign),
        }
    }

    /// `d_ij` as a symbolic value (the `t`-power is implicit).
    fn c_value(&self, i: usize, j: usize, target: (usize, usize)) -> Result<SymPoly> {
        if i == j {
            return Ok(SymPoly::constant(Rat::one()));
        }
        if positive_integer(&(&self.degrees[i - 1] - &self.degrees[j - 1])).is_none() {
            return Ok(SymPoly::zero());
        }
        if (i, j) == target {
            return Ok(SymPoly::symbol(Symbol::C(i, j)));
        }
        match self.status.get(&(i, j)) {
            Some(Status::Free) => Ok(SymPoly::symbol(Symbol::C(i, j))),
            Some(Status::Determined(e)) => Ok(e.clone()),
            Some(Status::Vanishing) => Ok(SymPoly::zero()),
            None => Err(Error::Internal(format!("c[{i},{j}] referenced before its step was resolved"))),
        }
    }

    /// Top coefficient of `K(Phi_i, Phi_{mu+1-j})`, with `target` symbolic.
    fn constraint(&self, i: usize, j: usize, target: (usize, usize)) -> Result<SymPoly> {
        let mu = self.mu;
        let jj = mu + 1 - j;
        let mut acc = SymPoly::zero();
        for k in j..=i {
            let left = self.c_value(i, k, target)?;
            if left.is_zero() {
                continue;
            }
            for l in (mu + 1 - i)..=jj {
                let a = self.a_value(k, l);
                if a.is_zero() {
                    continue;
                }
                let right = self.c_value(jj, l, target)?;
                if right.is_zero() {
                    continue;
                }
                // d_{jj,l}(-t) contributes (-1)^{r(jj,l)}
                let r = &self.degrees[jj - 1] - &self.degrees[l - 1];
                let sign = if l != jj && r.to_i64().is_some_and(|x| x % 2 != 0) { -Rat::one() } else { Rat::one() };
                acc = acc.add(&left.mul(&a).mul(&right).scale(&sign));
            }
        }
        Ok(acc)
    }
}

/// Classifies every admissible `c_ij`. `classical[i]` is
/// `a_{i+1, mu-i} = Res(phi_{i+1} phi_{mu-i})`; `constants` supplies higher
/// (or overriding classical) pairing constants `a_kl`, 1-based.
pub fn y_constraints_raw(
    degrees: &[Rat],
    s: &Rat,
    classical: &[Rat],
    constants: &BTreeMap<(usize, usize), Rat>,
) -> Result<ModuliReport> {
    let mu = degrees.len();
    let mut classical = classical.to_vec();
    let mut known: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    for ((k, l), v) in constants {
        let (k, l) = (*k, *l);
        if k < 1 || l < 1 || k > mu || l > mu {
            return Err(Error::InconsistentConstants(k, l, format!("index out of range 1..{mu}")));
        }
        let deg = &(&degrees[k - 1] + &degrees[l - 1]) - s;
        if v.is_zero() {
            if k + l == mu + 1 {
                return Err(Error::InconsistentConstants(k, l, "classical pairing must be nonzero".into()));
            }
            known.insert((k.min(l), k.max(l)), Rat::zero());
            continue;
        }
        if k + l < mu + 1 {
            return Err(Error::InconsistentConstants(k, l, "pairing vanishes below the anti-diagonal".into()));
        }
        if !deg.is_integer() || deg.is_negative() {
            return Err(Error::InconsistentConstants(k, l, format!("t-degree {deg} is not a nonnegative integer")));
        }
        if deg.is_zero() && k + l != mu + 1 {
            return Err(Error::InconsistentConstants(k, l, "classical pairing is anti-diagonal".into()));
        }
        let odd = deg.to_i64().expect("small degree") % 2 != 0;
        if k == l && odd {
            return Err(Error::InconsistentConstants(k, l, "odd self-pairing must vanish".into()));
        }
        // store in the canonical orientation k <= l
        let canon = if k > l && odd { -v } else { v.clone() };
        let key = (k.min(l), k.max(l));
        if let Some(prev) = known.get(&key) {
            if *prev != canon {
                return Err(Error::InconsistentConstants(k, l, "conflicts with the transposed constant".into()));
            }
        }
        if k + l == mu + 1 {
            classical[k - 1] = v.clone();
            classical[l - 1] = if odd { -v } else { v.clone() };
        } else {
            known.insert(key, canon);
        }
    }
    let mut ctx = Context { degrees, s, mu, classical: &classical, known, status: BTreeMap::new() };

    // constraints (i, j): r(i,j) in Z_{>0}, i + j <= mu + 1, by step then index
    let mut order: Vec<(usize, usize)> = Vec::new();
    for i in 1..=mu {
        for j in 1..i {
            if i + j <= mu + 1 && positive_integer(&(&degrees[i - 1] - &degrees[j - 1])).is_some() {
                order.push((i, j));
            }
        }
    }
    order.sort_by_key(|&(i, j)| (i - j, i, j));

    let mut free = Vec::new();
    let mut determined = Vec::new();
    let mut auto_vanishing = Vec::new();
    for (i, j) in order {
        let r = positive_integer(&(&degrees[i - 1] - &degrees[j - 1])).unwrap();
        let step = i - j;
        if i + j < mu + 1 {
            ctx.status.insert((i, j), Status::Free);
            free.push((i, j));
            let target = (mu + 1 - j, mu + 1 - i);
            let k = ctx.constraint(i, j, target)?;
            let (alpha, beta) = k
                .split_linear(Symbol::C(target.0, target.1))
                .ok_or_else(|| Error::Internal(format!("constraint ({i},{j}) is not affine in its target")))?;
            let alpha = alpha
                .as_constant()
                .filter(|a| !a.is_zero())
                .ok_or_else(|| Error::Internal(format!("constraint ({i},{j}) has a degenerate leading coefficient")))?;
            let expr = beta.scale(&-alpha.recip());
            check_references(&expr, step, Some((i, j)), mu)?;
            record(&mut ctx, &mut determined, &mut auto_vanishing, target, (i, j), expr);
        } else if r % 2 == 1 {
            ctx.status.insert((i, j), Status::Free);
            free.push((i, j));
        } else {
            let k = ctx.constraint(i, j, (i, j))?;
            let (alpha, beta) = k
                .split_linear(Symbol::C(i, j))
                .ok_or_else(|| Error::Internal(format!("constraint ({i},{j}) is not affine in c[{i},{j}]")))?;
            let alpha = alpha
                .as_constant()
                .filter(|a| !a.is_zero())
                .ok_or_else(|| Error::Internal(format!("constraint ({i},{j}) has a degenerate leading coefficient")))?;
            let expr = beta.scale(&-alpha.recip());
            check_references(&expr, step, None, mu)?;
            record(&mut ctx, &mut determined, &mut auto_vanishing, (i, j), (i, j), expr);
        }
    }
    let key = |p: &(usize, usize)| (p.0 - p.1, p.0, p.1);
    free.sort_by_key(key);
    auto_vanishing.sort_by_key(key);
    determined.sort_by_key(|d: &Determined| key(&d.param));
    let unknown: BTreeSet<(usize, usize)> = determined.iter().flat_map(|d| d.constants.iter().copied()).collect();
    let report = ModuliReport {
        mu,
        steps: step_table(degrees),
        d: dimension_d(degrees),
        free,
        determined,
        auto_vanishing,
        unknown_constants: unknown.into_iter().collect(),
    };
    if report.free.len() != report.d {
        return Err(Error::Internal(format!("{} free parameters but D = {}", report.free.len(), report.d)));
    }
    Ok(report)
}

fn record(
    ctx: &mut Context,
    determined: &mut Vec<Determined>,
    auto_vanishing: &mut Vec<(usize, usize)>,
    param: (usize, usize),
    constraint: (usize, usize),
    expr: SymPoly,
) {
    if expr.is_zero() {
        ctx.status.insert(param, Status::Vanishing);
        auto_vanishing.push(param);
        return;
    }
    let constants = expr
        .symbols()
        .into_iter()
        .filter_map(|s| match s {
            Symbol::A(k, l) => Some((k, l)),
            Symbol::C(..) => None,
        })
        .collect();
    ctx.status.insert(param, Status::Determined(expr.clone()));
    determined.push(Determined { param, constraint, expression: expr, constants });
}

/// Determined expressions reference free parameters of strictly smaller
/// step (besides the source parameter of their constraint) and only higher
/// pairing constants.
fn check_references(expr: &SymPoly, step: usize, source: Option<(usize, usize)>, mu: usize) -> Result<()> {
    for s in expr.symbols() {
        match s {
            Symbol::C(i, j) => {
                if Some((i, j)) != source && i - j >= step {
                    return Err(Error::Internal(format!("c[{i},{j}] does not have a smaller step than {step}")));
                }
            }
            Symbol::A(k, l) => {
                if k + l <= mu + 1 {
                    return Err(Error::Internal(format!("a[{k},{l}] is not a higher pairing constant")));
                }
            }
        }
    }
    Ok(())
}

/// Report for a singularity; the basis must be anti-diagonal for the
/// residue pairing.
pub fn y_constraints(data: &SingularityData, constants: &BTreeMap<(usize, usize), Rat>) -> Result<ModuliReport> {
    if data.is_laurent() {
        return Err(Error::UnsupportedMode("laurent_p1"));
    }
    if !data.anti_diagonal {
        return Err(Error::InvalidParameter(
            "the residue pairing could not be anti-diagonalized over Q for this basis".into(),
        ));
    }
    let m = data.residue_pairing_matrix()?;
    let classical: Vec<Rat> = (0..data.mu).map(|i| m[i][data.mu - 1 - i].clone()).collect();
    y_constraints_raw(&data.degrees, &data.s, &classical, constants)
}
