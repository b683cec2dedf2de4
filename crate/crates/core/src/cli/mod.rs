//! Job documents, command orchestration and the JSON result format.

pub mod parse;

use std::collections::BTreeMap;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::brieskorn::{RPoly, Reducer};
use crate::error::{Error, Result};
use crate::exactalg::{MPoly, Monomial, Rat, UMono, UnfoldRingElem, WeightSystem};
use crate::moduli::{dimension_d, y_constraints};
use crate::primitive::{primitive_form_with, verify_primitive, OppositeParams, Record};
use crate::residue_series::{pairing_univariate, PairingContext, TLaurentValue};
use crate::singularity::SingularityData;
use crate::unfolding::{build_p1_unfolding, build_unfolding, UnfoldingData};

pub use parse::parse_polynomial;

pub const SCHEMA: &str = "saito-forms/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Moduli,
    PrimitiveForm,
    Pairing,
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Moduli => "moduli",
            Command::PrimitiveForm => "primitive-form",
            Command::Pairing => "pairing",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Polynomial,
    LaurentP1,
}

fn is_default<T: Default + PartialEq>(x: &T) -> bool {
    *x == T::default()
}

/// A job document. Indices (`c`, `mask`, `constants`) are 1-based;
/// rationals are `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub mode: ModeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    /// Opposite parameters `{"i,j": "p/q"}`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub c: BTreeMap<String, Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub no_prune: bool,
    /// Higher pairing constants `{"k,l": "p/q"}` for `moduli`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, Rat>,
    /// Laurent polynomial pairs for `pairing`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_order: Option<u32>,
    /// Representative over the variables and parameters for `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representative: Option<String>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            variables: Vec::new(),
            weights: Vec::new(),
            polynomial: None,
            mode: ModeSpec::Polynomial,
            q: None,
            order: None,
            c: BTreeMap::new(),
            mask: None,
            no_prune: false,
            constants: BTreeMap::new(),
            pairs: Vec::new(),
            t_order: None,
            representative: None,
        }
    }
}

fn parse_pair_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidJob(format!("index pair `{key}` is not of the form `i,j`"));
    let (i, j) = key.split_once(',').ok_or_else(bad)?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let j: usize = j.trim().parse().map_err(|_| bad())?;
    if i == 0 || j == 0 {
        return Err(bad());
    }
    Ok((i, j))
}

fn pair_map(m: &BTreeMap<String, Rat>) -> Result<BTreeMap<(usize, usize), Rat>> {
    m.iter().map(|(k, v)| Ok((parse_pair_key(k)?, v.clone()))).collect()
}

fn singularity(job: &JobSpec) -> Result<SingularityData> {
    match job.mode {
        ModeSpec::Polynomial => {
            if job.q.is_some() {
                return Err(Error::InvalidJob("`q` applies to the laurent_p1 mode only".into()));
            }
            let text = job.polynomial.as_deref().ok_or_else(|| Error::InvalidJob("missing `polynomial`".into()))?;
            let f = parse_polynomial(text, &job.variables, &[])?;
            SingularityData::new(f, WeightSystem::new(job.weights.clone())?)
        }
        ModeSpec::LaurentP1 => {
            let q = job.q.clone().ok_or_else(|| Error::InvalidJob("laurent_p1 mode needs `q`".into()))?;
            if job.variables.len() != 1 {
                return Err(Error::InvalidJob("laurent_p1 mode needs exactly one variable".into()));
            }
            let data = SingularityData::laurent_p1(q)?;
            if let Some(text) = &job.polynomial {
                let f = parse_polynomial(text, &job.variables, &[true])?;
                if f.terms().map(|(m, c)| (m.clone(), c.clone())).collect::<Vec<_>>()
                    != data.f.terms().map(|(m, c)| (m.clone(), c.clone())).collect::<Vec<_>>()
                {
                    return Err(Error::InvalidJob("laurent_p1 mode expects f = z + q*z^-1".into()));
                }
            }
            Ok(data)
        }
    }
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn analyze(data: &SingularityData) -> Result<Value> {
    let residue: Vec<Vec<String>> = if data.is_laurent() {
        let basis: Vec<BTreeMap<i32, Rat>> = data.basis.iter().map(laurent_coeffs).collect::<Result<_>>()?;
        let mut rows = Vec::new();
        for a in &basis {
            let mut row = Vec::new();
            for b in &basis {
                row.push(pairing_univariate(a, b, &PairingContext::P1 { q: p1_q(data) }, 0)?.coeff(0).to_string());
            }
            rows.push(row);
        }
        rows
    } else {
        data.residue_pairing_matrix()?.iter().map(|r| strings(r)).collect()
    };
    let mut out = json!({
        "mode": if data.is_laurent() { "laurent_p1" } else { "polynomial" },
        "mu": data.mu,
        "s": data.s,
        "basis": strings(&data.basis),
        "degrees": strings(&data.degrees),
        "residue_matrix": residue,
        "anti_diagonal": data.anti_diagonal,
    });
    if !data.is_laurent() {
        out["weights"] = json!(strings(data.weights.weights()));
        out["D"] = json!(dimension_d(&data.degrees));
    }
    Ok(out)
}

fn p1_q(data: &SingularityData) -> Rat {
    match &data.mode {
        crate::singularity::Mode::LaurentP1 { q } => q.clone(),
        crate::singularity::Mode::Polynomial => unreachable!("laurent mode checked"),
    }
}

fn laurent_coeffs(p: &MPoly) -> Result<BTreeMap<i32, Rat>> {
    if p.nvars() != 1 {
        return Err(Error::InvalidJob("pairings need a univariate context".into()));
    }
    Ok(p.terms().map(|(m, c)| (m.exps()[0], c.clone())).collect())
}

fn moduli(job: &JobSpec, data: &SingularityData) -> Result<Value> {
    let report = y_constraints(data, &pair_map(&job.constants)?)?;
    Ok(serde_json::to_value(&report).expect("report serializes"))
}

fn unfolding<'a>(job: &JobSpec, data: &'a SingularityData) -> Result<UnfoldingData<'a>> {
    let order = job.order.ok_or_else(|| Error::InvalidJob("missing truncation `order`".into()))?;
    if data.is_laurent() {
        if job.mask.is_some() {
            return Err(Error::InvalidJob("laurent_p1 mode deforms both directions; `mask` is not allowed".into()));
        }
        return build_p1_unfolding(data, order);
    }
    let mask: Option<Vec<usize>> = match &job.mask {
        Some(m) => Some(
            m.iter()
                .map(|&j| j.checked_sub(1).ok_or_else(|| Error::InvalidJob("mask directions are 1-based".into())))
                .collect::<Result<_>>()?,
        ),
        None => None,
    };
    build_unfolding(data, order, mask.as_deref(), &BTreeMap::new())
}

/// Parameter names: `u1..u_mu`, or `u0, u1` for the Laurent context.
fn param_names(data: &SingularityData) -> Vec<String> {
    if data.is_laurent() {
        vec!["u0".into(), "u1".into()]
    } else {
        (1..=data.mu).map(|k| format!("u{k}")).collect()
    }
}

fn pretty_umono(m: &[u8], names: &[String]) -> String {
    let parts: Vec<String> = m
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    parts.join("*")
}

fn pretty_records(records: &[Record], names: &[String]) -> String {
    if records.is_empty() {
        return "0".into();
    }
    let terms: Vec<String> = records
        .iter()
        .map(|r| {
            let mut s = format!("({})", r.coefficient);
            if r.t_power != 0 {
                s += &format!("*t^{}", r.t_power);
            }
            let u = pretty_umono(&r.u_monomial, names);
            if !u.is_empty() {
                s += &format!("*{u}");
            }
            s + &format!("*Phi{}", r.basis_index)
        })
        .collect();
    terms.join(" + ")
}

fn primitive(job: &JobSpec, data: &SingularityData) -> Result<Value> {
    let unf = unfolding(job, data)?;
    let c: OppositeParams = pair_map(&job.c)?;
    let reducer = Reducer::new(data);
    let exp = primitive_form_with(&unf, &c, &reducer, !job.no_prune)?;
    let records = exp.records();
    let names = param_names(data);
    Ok(json!({
        "order": exp.order,
        "a": exp.a,
        "c": job.c,
        "parameters": names,
        "records": records,
        "pretty": pretty_records(&records, &names),
        "warnings": exp.warnings,
    }))
}

fn pairing(job: &JobSpec, data: &SingularityData) -> Result<Value> {
    let context = if data.is_laurent() {
        PairingContext::P1 { q: p1_q(data) }
    } else {
        // only f = z^{m+1}/(m+1)
        let terms: Vec<_> = data.f.terms().collect();
        let m = match terms.as_slice() {
            [(mono, c)] if data.f.nvars() == 1 && mono.exps()[0] >= 2 && **c == Rat::new(1, mono.exps()[0] as i64) => {
                mono.exps()[0] as u32 - 1
            }
            _ => return Err(Error::InvalidJob("pairing needs f = z^(m+1)/(m+1) or the laurent_p1 mode".into())),
        };
        PairingContext::Am { m }
    };
    let t_order = job.t_order.unwrap_or(8);
    let laurent = [data.is_laurent()];
    let mut values = Vec::new();
    for (a, b) in &job.pairs {
        let pa = laurent_coeffs(&parse_polynomial(a, &job.variables, &laurent)?)?;
        let pb = laurent_coeffs(&parse_polynomial(b, &job.variables, &laurent)?)?;
        let v: TLaurentValue = pairing_univariate(&pa, &pb, &context, t_order)?;
        values.push(json!({ "a": a, "b": b, "value": v, "pretty": v.to_string() }));
    }
    Ok(json!({
        "context": match &context { PairingContext::Am { m } => format!("A{m}"), PairingContext::P1 { q } => format!("P1(q={q})") },
        "t_order": t_order,
        "values": values,
    }))
}

fn representative(text: &str, job: &JobSpec, unf: &UnfoldingData) -> Result<BTreeMap<i32, RPoly>> {
    let data = unf.base;
    let n = job.variables.len();
    let names = param_names(data);
    let mut vars = job.variables.clone();
    vars.extend(names.iter().cloned());
    let mut laurent = vec![data.is_laurent(); n];
    laurent.extend(vec![false; names.len()]);
    let p = parse_polynomial(text, &vars, &laurent)?;
    let mut slice = RPoly::new();
    for (m, c) in p.terms() {
        let e = m.exps();
        let z = Monomial::from_exps(&e[..n]);
        let u: Vec<u8> = e[n..]
            .iter()
            .map(|&x| u8::try_from(x).map_err(|_| Error::InvalidJob("parameter exponent out of range".into())))
            .collect::<Result<_>>()?;
        let slot = slice.entry(z).or_insert_with(|| unf.zero());
        let mut term = UnfoldRingElem::zero(unf.nparams(), unf.order);
        term.add_term(UMono::from_exps(&u), c.clone());
        slot.add_assign(&term);
    }
    slice.retain(|_, r| !r.is_zero());
    Ok(BTreeMap::from([(0, slice)]))
}

fn verify(job: &JobSpec, data: &SingularityData) -> Result<Value> {
    let unf = unfolding(job, data)?;
    let text = job.representative.as_deref().ok_or_else(|| Error::InvalidJob("missing `representative`".into()))?;
    let rep = representative(text, job, &unf)?;
    let c: OppositeParams = pair_map(&job.c)?;
    let v = verify_primitive(&rep, &unf, &c, !job.no_prune)?;
    let mut defect = Vec::new();
    for (k, row) in v.defect.slices() {
        for (j, e) in row.iter().enumerate() {
            for (m, coeff) in e.terms() {
                defect.push(Record { t_power: k, basis_index: j + 1, u_monomial: m.exps().to_vec(), coefficient: coeff.clone() });
            }
        }
    }
    Ok(json!({ "order": unf.order, "pass": v.pass, "defect": defect }))
}

/// Runs a job, returning the `result` payload.
pub fn run(job: &JobSpec) -> Result<Value> {
    let data = singularity(job)?;
    match job.command {
        Command::Analyze => analyze(&data),
        Command::Moduli => {
            if data.is_laurent() {
                return Err(Error::UnsupportedMode("laurent_p1"));
            }
            moduli(job, &data)
        }
        Command::PrimitiveForm => primitive(job, &data),
        Command::Pairing => pairing(job, &data),
        Command::Verify => verify(job, &data),
    }
}

/// The full output document for a job (success or structured error).
pub fn document(job: &JobSpec) -> (Value, bool) {
    match run(job) {
        Ok(result) => (json!({ "schema": SCHEMA, "command": job.command.name(), "result": result }), true),
        Err(e) => (error_document(&e), false),
    }
}

pub fn error_document(e: &Error) -> Value {
    json!({
        "schema": SCHEMA,
        "error": { "code": e.code(), "module": e.module(), "message": e.to_string() },
    })
}

/// Command-line flags.
#[derive(Debug, Parser)]
#[command(name = "primform", about = "Exact Taylor expansions of primitive forms")]
pub struct Cli {
    /// Job document (JSON).
    #[arg(long)]
    pub job: std::path::PathBuf,
    /// Overrides the job's command.
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Truncation order N.
    #[arg(long)]
    pub order: Option<u32>,
    /// Opposite parameter `i,j=p/q` (repeatable).
    #[arg(long = "set-c")]
    pub set_c: Vec<String>,
    /// Active deformation directions `j1,j2,...` (1-based).
    #[arg(long)]
    pub mask: Option<String>,
    /// Disables pruning (oracle mode).
    #[arg(long)]
    pub no_prune: bool,
}

impl Cli {
    /// Reads the job and applies the flag overrides.
    pub fn job(&self) -> Result<JobSpec> {
        let text = std::fs::read_to_string(&self.job)
            .map_err(|e| Error::InvalidJob(format!("cannot read {}: {e}", self.job.display())))?;
        let mut job: JobSpec = serde_json::from_str(&text).map_err(|e| Error::InvalidJob(e.to_string()))?;
        if let Some(c) = self.command {
            job.command = c;
        }
        if let Some(n) = self.order {
            job.order = Some(n);
        }
        for s in &self.set_c {
            let (k, v) = s.split_once('=').ok_or_else(|| Error::InvalidJob(format!("--set-c `{s}` needs i,j=p/q")))?;
            parse_pair_key(k)?;
            let v: Rat = v.parse().map_err(|_| Error::InvalidJob(format!("bad rational in --set-c `{s}`")))?;
            job.c.insert(k.trim().replace(' ', ""), v);
        }
        if let Some(m) = &self.mask {
            let dirs = m
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| Error::InvalidJob(format!("bad --mask `{m}`"))))
                .collect::<Result<Vec<usize>>>()?;
            job.mask = Some(dirs);
        }
        if self.no_prune {
            job.no_prune = true;
        }
        Ok(job)
    }

    /// Executes the invocation: the document text and the exit code.
    pub fn execute(&self) -> (String, i32) {
        let (doc, ok) = match self.job() {
            Ok(job) => document(&job),
            Err(e) => (error_document(&e), false),
        };
        let text = serde_json::to_string_pretty(&doc).expect("documents serialize") + "\n";
        (text, if ok { 0 } else { 1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(command: Command, vars: &[&str], weights: &[&str], f: &str) -> JobSpec {
        let mut j = JobSpec::new(command);
        j.variables = vars.iter().map(|s| s.to_string()).collect();
        j.weights = weights.iter().map(|w| w.parse().unwrap()).collect();
        j.polynomial = Some(f.into());
        j
    }

    #[test]
    fn analyze_e12() {
        let v = run(&job(Command::Analyze, &["x", "y"], &["1/3", "1/7"], "x^3 + y^7")).unwrap();
        assert_eq!(v["mu"], json!(12));
        assert_eq!(v["s"], json!("22/21"));
        assert_eq!(v["D"], json!(0));
    }

    #[test]
    fn primitive_form_a3() {
        let mut j = job(Command::PrimitiveForm, &["z"], &["1/4"], "z^4");
        j.order = Some(5);
        let v = run(&j).unwrap();
        assert_eq!(
            v["records"],
            json!([{ "t_power": 0, "basis_index": 1, "u_monomial": [0, 0, 0], "coefficient": "1" }])
        );
    }

    #[test]
    fn moduli_e6() {
        let j = job(
            Command::Moduli,
            &["z1", "z2", "z3"],
            &["1/3", "1/3", "1/3"],
            "1/3*z1^3 + 1/3*z2^3 + 1/3*z3^3",
        );
        let v = run(&j).unwrap();
        assert_eq!(v["d"], json!(1));
        assert_eq!(v["free"], json!([[8, 1]]));
    }

    #[test]
    fn pairing_p1() {
        let mut j = JobSpec::new(Command::Pairing);
        j.variables = vec!["z".into()];
        j.mode = ModeSpec::LaurentP1;
        j.q = Some(Rat::from_int(2));
        j.pairs = vec![("1".into(), "2*z^-1".into()), ("1".into(), "1".into())];
        let v = run(&j).unwrap();
        assert_eq!(v["values"][0]["value"], json!({ "0": "-1" }));
        assert_eq!(v["values"][1]["value"], json!({}));
    }

    #[test]
    fn verify_p1_one() {
        let mut j = JobSpec::new(Command::Verify);
        j.variables = vec!["z".into()];
        j.mode = ModeSpec::LaurentP1;
        j.q = Some(Rat::from_int(-3));
        j.order = Some(4);
        j.representative = Some("1".into());
        assert_eq!(run(&j).unwrap()["pass"], json!(true));
    }

    #[test]
    fn structured_errors() {
        let (doc, ok) = document(&job(Command::Analyze, &["x"], &["1/3"], "x^3 +"));
        assert!(!ok);
        assert_eq!(doc["error"]["code"], json!("SyntaxError"));
        assert_eq!(doc["error"]["module"], json!("cli"));
        let (doc, _) = document(&job(Command::Analyze, &["x", "y"], &["1/3", "1/3"], "x^3"));
        assert_eq!(doc["schema"], json!(SCHEMA));
        assert!(doc["error"]["code"].is_string());
    }

    #[test]
    fn job_round_trip() {
        let mut j = job(Command::PrimitiveForm, &["x", "y"], &["1/3", "1/7"], "x^3 + y^7");
        j.order = Some(6);
        j.c.insert("2,1".into(), Rat::new(-1, 2));
        j.mask = Some(vec![1, 12]);
        let text = serde_json::to_string(&j).unwrap();
        let back: JobSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn byte_stable() {
        let mut j = job(Command::PrimitiveForm, &["x", "y"], &["1/3", "1/7"], "x^3 + y^7");
        j.order = Some(3);
        let a = serde_json::to_string_pretty(&document(&j).0).unwrap();
        let b = serde_json::to_string_pretty(&document(&j).0).unwrap();
        assert_eq!(a, b);
    }
}
