//! Orchestration: enumerate admissible pairs, run both correspondences on each,
//! compare, and emit a deterministic report.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::characters::{delta_twist, AdmissiblePair, LevelChar, UnitGroupModel, DEFAULT_BUDGET};
use crate::conjugation::{self, ConjugationData};
use crate::error::{Error, Result};
use crate::field::FieldParams;
use crate::local::{default_precision, LocalElem, LocalField, PresentationKind, XiConvention};
use crate::scalar::RootOfUnity;
use crate::torus::{chi_phi, ChainOptions, TorusChar};
use crate::weil::{induce_parameter, FiniteWeilQuotient, ORACLE_BUDGET};

/// Environment variable that overrides the enumeration budget.
pub const BUDGET_ENV: &str = "TAMELLC_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// `chi_phi = chi Delta_chi` on the torus; always run.
    Agreement,
    /// `chi_lambda` through `Ad(p_lambda)^{-1}` on sampled torus elements.
    Conjugation,
    /// `<Ind chi, Ind chi> = 1` on the finite Weil quotient.
    Mackey,
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "agreement" => Ok(Check::Agreement),
            "conjugation" => Ok(Check::Conjugation),
            "mackey" => Ok(Check::Mackey),
            other => Err(Error::Parse(format!("unknown check {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub p: u64,
    pub e: u32,
    pub ell: u64,
    pub r: u32,
    /// `chi(varpi)` ranges over `mu_N`.
    pub varpi_order: u64,
    /// Working precision; `None` picks `2(r + 1) + 1`.
    pub precision: Option<u32>,
    pub checks: BTreeSet<Check>,
    pub output: Option<String>,
    pub format: OutputFormat,
    pub budget: u64,
    pub convention: XiConvention,
    pub presentation: PresentationKind,
    /// Torus elements sampled per pair for `chi_lambda`.
    pub samples: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 3,
            e: 1,
            ell: 2,
            r: 0,
            varpi_order: 4,
            precision: None,
            checks: [Check::Agreement, Check::Conjugation, Check::Mackey].into_iter().collect(),
            output: None,
            format: OutputFormat::Json,
            budget: DEFAULT_BUDGET,
            convention: XiConvention::default(),
            presentation: PresentationKind::Auto,
            samples: 4,
            seed: 0x5eed,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
}

impl RunConfig {
    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    pub fn precision(&self) -> u32 {
        self.precision.unwrap_or_else(|| default_precision(self.r))
    }

    /// Sets one `key = value` entry. Keys: `p e ell r N k checks output format
    /// budget convention presentation samples seed` (`q` is accepted for `p`
    /// when `e = 1`).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "p" | "q" => self.p = parse(key, value)?,
            "e" => self.e = parse(key, value)?,
            "ell" | "l" => self.ell = parse(key, value)?,
            "r" | "level" => self.r = parse(key, value)?,
            "N" | "varpi_order" => self.varpi_order = parse(key, value)?,
            "k" | "precision" => self.precision = Some(parse(key, value)?),
            "checks" => {
                let mut set: BTreeSet<Check> =
                    value.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
                set.insert(Check::Agreement);
                self.checks = set;
            }
            "output" => self.output = Some(value.trim().to_string()),
            "format" => self.format = value.parse()?,
            "budget" => self.budget = parse(key, value)?,
            "convention" => self.convention = value.trim().parse()?,
            "presentation" => self.presentation = value.trim().parse()?,
            "samples" => self.samples = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Applies [`BUDGET_ENV`] if it is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            self.budget = parse(BUDGET_ENV, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.varpi_order == 0 {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        if self.precision() < self.r + 1 {
            return Err(Error::InvalidParams(format!("precision {} is below r + 1", self.precision())));
        }
        Ok(())
    }

    /// The field, allowing `p = l` so that the character-level checks can run
    /// there; the conjugation layer then reports an unsupported presentation.
    pub fn field(&self) -> Result<LocalField> {
        self.validate()?;
        let params = FieldParams::new_allowing_wild(self.p, self.e, self.ell)?;
        LocalField::new(params, self.precision(), self.presentation, self.convention)
    }
}

/// One sampled value of `chi_lambda` against the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaSample {
    pub valuation: i64,
    pub unit_coeffs: Vec<i64>,
    pub chi_lambda: RootOfUnity,
    pub expected: RootOfUnity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRecord {
    pub pair: serde_json::Value,
    pub trselp: serde_json::Value,
    pub chi_phi: TorusChar,
    pub chi_s_chain: Vec<u64>,
    pub chi_s_closed_form: Vec<u64>,
    pub chi_tau: RootOfUnity,
    pub path: String,
    pub preimages_checked: u64,
    pub moy_target: TorusChar,
    pub chi_lambda_samples: Vec<LambdaSample>,
    pub mackey_norm: Option<i64>,
    pub verdict: String,
}

impl PairRecord {
    pub fn agrees(&self) -> bool {
        self.verdict == "agree"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub q: u64,
    pub ell: u64,
    pub r: u32,
    pub varpi_order: u64,
    pub unit_group_order: u64,
    pub admissible_unit_characters: usize,
    pub pairs: usize,
    pub agree: usize,
    pub galois_orbits: usize,
    pub preimages_checked: u64,
    pub mackey_checked: usize,
    pub lambda_samples: usize,
    /// `"verified"`, `"skipped"`, or the reason it is unavailable.
    pub conjugation: String,
    pub packet_size: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementReport {
    pub config: RunConfig,
    pub summary: Summary,
    pub conjugation_data: Option<ConjugationData>,
    pub records: Vec<PairRecord>,
}

impl AgreementReport {
    pub fn all_agree(&self) -> bool {
        self.records.iter().all(PairRecord::agrees)
    }

    /// Canonical JSON: object keys sorted, fixed indentation.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    /// Header plus one row per pair.
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![["index", "unit_exponents", "varpi_value", "chi_phi_varpi", "target_varpi", "path", "mackey_norm", "verdict"]
            .map(String::from)
            .to_vec()];
        for (i, r) in self.records.iter().enumerate() {
            rows.push(vec![
                i.to_string(),
                r.pair["unit_exponents"].to_string(),
                r.pair["varpi_value"].as_str().unwrap_or_default().to_string(),
                r.chi_phi.varpi_value.to_string(),
                r.moy_target.varpi_value.to_string(),
                r.path.clone(),
                r.mackey_norm.map(|n| n.to_string()).unwrap_or_default(),
                r.verdict.clone(),
            ]);
        }
        rows
    }
}

/// Everything built once per run.
struct Context<'a> {
    config: &'a RunConfig,
    field: &'a LocalField,
    group: &'a UnitGroupModel,
    conjugation: Option<&'a ConjugationData>,
    quotient: Option<&'a FiniteWeilQuotient<'a>>,
}

fn run_pair(ctx: &Context, index: usize, pair: &AdmissiblePair) -> Result<PairRecord> {
    let group = ctx.group;
    let phi = induce_parameter(group, pair)?;
    let dbr = chi_phi(group, &phi, ChainOptions { seed: ctx.config.seed ^ index as u64, ..ChainOptions::default() })?;
    let target: LevelChar = group.chi_times(&pair.chi, &delta_twist(group, pair));
    let moy_target = TorusChar::from_level_char(&target);
    let mut agree = dbr.chi_phi == moy_target;

    let mut samples = Vec::new();
    if let Some(data) = ctx.conjugation {
        let f = ctx.field;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed.wrapping_add(index as u64));
        let mut points: Vec<(i64, LocalElem)> = vec![(1, f.one())];
        for i in 0..ctx.config.samples {
            points.push((i as i64 % 3 - 1, f.random_unit(&mut rng)));
        }
        for (n, u) in points {
            let t = LocalElem { valuation: n, coeffs: u.coeffs.clone() };
            let rt = conjugation::embed_torus(f, &t)?;
            let value = conjugation::transport_character(f, group, &dbr.chi_phi, data, &rt)?;
            let expected = group.eval(&target, n, group.id_of_unit(&u)?);
            agree &= value == expected;
            samples.push(LambdaSample { valuation: n, unit_coeffs: u.coeffs, chi_lambda: value, expected });
        }
    }

    let mackey_norm = match ctx.quotient {
        Some(w) => {
            let x = w.induced_character(&pair.chi)?;
            let norm = w.inner_product(&x, &x)?;
            agree &= norm == 1;
            Some(norm)
        }
        None => None,
    };

    Ok(PairRecord {
        pair: pair.to_json(),
        trselp: phi.to_json(),
        chi_phi: dbr.chi_phi,
        chi_s_chain: dbr.chi_s_chain,
        chi_s_closed_form: dbr.chi_s_closed_form,
        chi_tau: dbr.chi_tau,
        path: dbr.path,
        preimages_checked: dbr.preimages_checked,
        moy_target,
        chi_lambda_samples: samples,
        mackey_norm,
        verdict: if agree { "agree" } else { "disagree" }.to_string(),
    })
}

fn map_pairs<T: Send, F>(pairs: &[AdmissiblePair], f: F) -> Vec<T>
where
    F: Fn(usize, &AdmissiblePair) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        pairs.par_iter().enumerate().map(|(i, p)| f(i, p)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        pairs.iter().enumerate().map(|(i, p)| f(i, p)).collect()
    }
}

/// Runs every enumerated admissible pair through both sides.
///
/// A module error aborts with the failing pair named. A disagreement aborts
/// with [`Error::Disagreement`] carrying the full record of the first
/// offending pair in enumeration order.
pub fn run_verification(config: &RunConfig) -> Result<AgreementReport> {
    let field = config.field()?;
    let group = UnitGroupModel::build(&field, config.r, config.budget)?;
    let pairs = group.enumerate_admissible(config.varpi_order);

    let (conjugation_data, conjugation_status) = if !config.checks.contains(&Check::Conjugation) {
        (None, "skipped".to_string())
    } else if !field.is_kummer() {
        (None, format!("unavailable: {}", conjugation::build_conjugation(&field).unwrap_err()))
    } else {
        (Some(conjugation::build_conjugation(&field)?), "verified".to_string())
    };

    let quotient_order = config.ell * config.varpi_order * group.order();
    let quotient = if config.checks.contains(&Check::Mackey) && quotient_order <= ORACLE_BUDGET {
        Some(FiniteWeilQuotient::new(&group, config.varpi_order, ORACLE_BUDGET)?)
    } else {
        None
    };

    let ctx = Context {
        config,
        field: &field,
        group: &group,
        conjugation: conjugation_data.as_ref(),
        quotient: quotient.as_ref(),
    };
    let results = map_pairs(&pairs, |i, p| run_pair(&ctx, i, p));
    let mut records = Vec::with_capacity(results.len());
    for (pair, res) in pairs.iter().zip(results) {
        let rec = res.map_err(|e| Error::PairFailed { pair: pair.to_json().to_string(), source: Box::new(e) })?;
        if !rec.agrees() {
            let dump = serde_json::to_string(&rec).expect("record serializes");
            return Err(Error::Disagreement(dump));
        }
        records.push(rec);
    }

    let summary = Summary {
        q: config.q(),
        ell: config.ell,
        r: config.r,
        varpi_order: config.varpi_order,
        unit_group_order: group.order(),
        admissible_unit_characters: group.admissible_unit_characters().len(),
        pairs: records.len(),
        agree: records.iter().filter(|r| r.agrees()).count(),
        galois_orbits: group.orbit_representatives(&pairs).len(),
        preimages_checked: records.iter().map(|r| r.preimages_checked).sum(),
        mackey_checked: records.iter().filter(|r| r.mackey_norm.is_some()).count(),
        lambda_samples: records.iter().map(|r| r.chi_lambda_samples.len()).sum(),
        conjugation: conjugation_status,
        packet_size: conjugation::packet_size(config.ell as usize),
    };
    Ok(AgreementReport { config: config.clone(), summary, conjugation_data, records })
}

/// Both factorizations of the correspondence for one pair: Moy passes
/// through `(E/F, chi)`, the torus construction through `(E/F, chi Delta_chi)`,
/// and both land on `pi_{chi Delta_chi}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationRecord {
    pub pair: serde_json::Value,
    pub moy_intermediate: TorusChar,
    pub dbr_intermediate: TorusChar,
    pub delta_chi_varpi: RootOfUnity,
    pub final_target: TorusChar,
    pub intermediates_differ: bool,
    pub same_target: bool,
}

pub fn factorization_demo(group: &UnitGroupModel, pair: &AdmissiblePair) -> Result<FactorizationRecord> {
    if !group.is_admissible(&pair.chi) {
        return Err(Error::NotAdmissible);
    }
    let phi = induce_parameter(group, pair)?;
    let dbr = chi_phi(group, &phi, ChainOptions::default())?;
    let delta = delta_twist(group, pair);
    let target = TorusChar::from_level_char(&group.chi_times(&pair.chi, &delta));
    let moy = TorusChar::from_level_char(&pair.chi);
    Ok(FactorizationRecord {
        pair: pair.to_json(),
        intermediates_differ: moy != dbr.chi_phi,
        same_target: dbr.chi_phi == target,
        moy_intermediate: moy,
        dbr_intermediate: dbr.chi_phi,
        delta_chi_varpi: delta.varpi_value,
        final_target: target,
    })
}
