use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tamellc::characters::{delta_twist, AdmissiblePair, UnitGroupModel};
use tamellc::conjugation::build_conjugation;
use tamellc::dl::{cuspidal_table, dl_metadata, table_json, verify_cuspidal, Gl2ClassData};
use tamellc::scalar::RootOfUnity;
use tamellc::torus::{chi_phi, ChainOptions, TorusChar};
use tamellc::weil::{classify, induce_parameter};
use tamellc::workbench::{factorization_demo, run_verification, OutputFormat, RunConfig};

/// Exact workbench for the tame local Langlands correspondence of GL(l).
#[derive(Parser)]
#[command(name = "tamellc", version)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

/// Run parameters. Precedence: defaults, then `--config`, then the
/// `TAMELLC_BUDGET` environment variable, then flags.
#[derive(Args, Default)]
struct ConfigArgs {
    /// key = value file (keys: p e ell r N k checks output format budget convention presentation samples seed)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Residue characteristic (q = p^e; only e = 1 is supported)
    #[arg(short, long, global = true)]
    p: Option<u64>,
    #[arg(long, global = true)]
    e: Option<u32>,
    /// Degree l of E/F, a prime
    #[arg(short = 'l', long, global = true)]
    ell: Option<u64>,
    /// Level r of the characters
    #[arg(short, long, global = true)]
    r: Option<u32>,
    /// chi(varpi) ranges over mu_N
    #[arg(short = 'N', long = "varpi-order", global = true)]
    varpi_order: Option<u64>,
    /// Working precision k (coefficients mod p^k)
    #[arg(short = 'k', long, global = true)]
    precision: Option<u32>,
    /// Comma-separated extra checks for verify: conjugation, mackey
    #[arg(long, global = true)]
    checks: Option<String>,
    #[arg(short, long, global = true)]
    output: Option<String>,
    /// json or csv
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// inverse-frobenius (default) or frobenius
    #[arg(long, global = true)]
    convention: Option<String>,
    /// auto, kummer or polynomial
    #[arg(long, global = true)]
    presentation: Option<String>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                RunConfig::from_kv(&text)?
            }
            None => RunConfig::default(),
        };
        cfg.apply_env()?;
        let flags: [(&str, Option<String>); 14] = [
            ("p", self.p.map(|v| v.to_string())),
            ("e", self.e.map(|v| v.to_string())),
            ("ell", self.ell.map(|v| v.to_string())),
            ("r", self.r.map(|v| v.to_string())),
            ("N", self.varpi_order.map(|v| v.to_string())),
            ("k", self.precision.map(|v| v.to_string())),
            ("checks", self.checks.clone()),
            ("output", self.output.clone()),
            ("format", self.format.clone()),
            ("budget", self.budget.map(|v| v.to_string())),
            ("convention", self.convention.clone()),
            ("presentation", self.presentation.clone()),
            ("samples", self.samples.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Selects one admissible pair: explicit exponents, or an index into the
/// enumeration.
#[derive(Args)]
struct PairArgs {
    /// Unit-character exponents, comma separated
    #[arg(long, value_delimiter = ',')]
    exponents: Option<Vec<u64>>,
    /// chi(varpi) as n/d
    #[arg(long, default_value = "0/1")]
    varpi: RootOfUnity,
    /// Position in the enumeration (used when --exponents is absent)
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Subcommand)]
enum Command {
    /// List admissible pairs of exact level r with chi(varpi) in mu_N
    EnumeratePairs {
        /// Only one pair per Galois orbit
        #[arg(long)]
        orbits: bool,
    },
    /// Build the parameter Ind(chi) of a pair
    Induce(PairArgs),
    /// Compute the torus character chi_phi of the induced parameter
    ChiPhi(PairArgs),
    /// Dump the conjugation data p_lambda, w_dot, Vandermonde
    Conjugation,
    /// Cuspidal character table of GL(2, f_q), or dimension data for odd l
    DlTable,
    /// Run every pair through both sides and compare
    Verify,
    /// Show both factorizations of the correspondence for a pair
    DemoFactorization(PairArgs),
}

fn group(cfg: &RunConfig) -> Result<UnitGroupModel> {
    Ok(UnitGroupModel::build(&cfg.field()?, cfg.r, cfg.budget)?)
}

fn select_pair(group: &UnitGroupModel, cfg: &RunConfig, sel: &PairArgs) -> Result<AdmissiblePair> {
    match &sel.exponents {
        Some(exps) => Ok(group.admissible_pair(group.character(exps.clone(), sel.varpi)?)?),
        None => {
            let pairs = group.enumerate_admissible(cfg.varpi_order);
            let n = pairs.len();
            pairs
                .into_iter()
                .nth(sel.index)
                .with_context(|| format!("index {} out of range: there are {n} pairs", sel.index))
        }
    }
}

fn write_output(cfg: &RunConfig, json: &Value, csv_rows: Option<Vec<Vec<String>>>) -> Result<()> {
    let mut out: Box<dyn Write> = match &cfg.output {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("creating {path}"))?),
        None => Box::new(std::io::stdout().lock()),
    };
    match (cfg.format, csv_rows) {
        (OutputFormat::Csv, Some(rows)) => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        (OutputFormat::Csv, None) => bail!("this subcommand has no CSV form"),
        (OutputFormat::Json, _) => {
            serde_json::to_writer_pretty(&mut out, json)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn enumerate_pairs(cfg: &RunConfig, orbits: bool) -> Result<()> {
    let g = group(cfg)?;
    let mut pairs = g.enumerate_admissible(cfg.varpi_order);
    if orbits {
        pairs = g.orbit_representatives(&pairs);
    }
    let json = Value::Array(pairs.iter().map(AdmissiblePair::to_json).collect());
    let mut rows = vec![vec!["q", "ell", "r", "unit_exponents", "varpi_value", "orbit_representative"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>()];
    for p in &pairs {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        rows.push(vec![
            p.q.to_string(),
            p.ell.to_string(),
            p.chi.level.to_string(),
            join(&p.chi.unit_exponents),
            p.chi.varpi_value.to_string(),
            join(&g.orbit_representative(&p.chi).unit_exponents),
        ]);
    }
    write_output(cfg, &json, Some(rows))
}

fn induce(cfg: &RunConfig, sel: &PairArgs) -> Result<()> {
    let g = group(cfg)?;
    let pair = select_pair(&g, cfg, sel)?;
    let phi = induce_parameter(&g, &pair)?;
    let json = json!({
        "pair": pair.to_json(),
        "trselp": phi.to_json(),
        "orbit_representative": classify(&g, &phi)?.unit_exponents,
    });
    write_output(cfg, &json, None)
}

fn chi_phi_cmd(cfg: &RunConfig, sel: &PairArgs) -> Result<()> {
    let g = group(cfg)?;
    let pair = select_pair(&g, cfg, sel)?;
    let phi = induce_parameter(&g, &pair)?;
    let dbr = chi_phi(&g, &phi, ChainOptions { seed: cfg.seed, ..ChainOptions::default() })?;
    let target = TorusChar::from_level_char(&g.chi_times(&pair.chi, &delta_twist(&g, &pair)));
    let json = json!({
        "pair": pair.to_json(),
        "dbr": dbr,
        "moy_target": target,
        "agree": dbr.chi_phi == target,
    });
    write_output(cfg, &json, None)
}

fn conjugation(cfg: &RunConfig) -> Result<()> {
    let data = build_conjugation(&cfg.field()?)?;
    write_output(cfg, &data.to_json(), None)
}

fn dl_table(cfg: &RunConfig) -> Result<()> {
    let q = cfg.q();
    if cfg.ell == 2 {
        let classes = Gl2ClassData::new(q)?;
        let rows = cuspidal_table(&classes)?;
        if let Some(bad) = rows.iter().find(|r| !verify_cuspidal(&classes, r)) {
            bail!("row for chi_o = {} fails the cuspidality checks", bad.chi_o);
        }
        let mut csv_rows = vec![["class", "size"].map(String::from).to_vec()];
        csv_rows[0].extend(rows.iter().map(|r| format!("chi_o={}", r.chi_o)));
        for (i, (c, s)) in classes.classes.iter().zip(&classes.sizes).enumerate() {
            let mut line = vec![c.label(), s.to_string()];
            line.extend(rows.iter().map(|r| serde_json::to_string(&r.values[i]).expect("values serialize")));
            csv_rows.push(line);
        }
        write_output(cfg, &table_json(&classes, &rows), Some(csv_rows))
    } else {
        let n = q.pow(cfg.ell as u32) - 1;
        let mut seen = std::collections::BTreeSet::new();
        let mut metas = Vec::new();
        for e in 0..n {
            if let Ok(m) = dl_metadata(q, cfg.ell, e) {
                if seen.insert(m.orbit.clone()) {
                    metas.push(m);
                }
            }
        }
        let mut csv_rows = vec![["q", "ell", "chi_o", "orbit", "dim"].map(String::from).to_vec()];
        for m in &metas {
            let orbit = m.orbit.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
            csv_rows.push(vec![m.q.to_string(), m.ell.to_string(), m.chi_o.to_string(), orbit, m.dim.to_string()]);
        }
        write_output(cfg, &serde_json::to_value(&metas)?, Some(csv_rows))
    }
}

fn verify(cfg: &RunConfig) -> Result<()> {
    let report = run_verification(cfg)?;
    let s = &report.summary;
    eprintln!(
        "q={} l={} r={} N={}: {}/{} pairs agree, {} Galois orbits, conjugation {}, packet size {}",
        s.q, s.ell, s.r, s.varpi_order, s.agree, s.pairs, s.galois_orbits, s.conjugation, s.packet_size
    );
    let json: Value = serde_json::from_str(&report.to_json())?;
    write_output(cfg, &json, Some(report.csv_rows()))?;
    if !report.all_agree() {
        bail!("some pairs disagree");
    }
    Ok(())
}

fn demo_factorization(cfg: &RunConfig, sel: &PairArgs) -> Result<()> {
    let g = group(cfg)?;
    let pair = select_pair(&g, cfg, sel)?;
    let rec = factorization_demo(&g, &pair)?;
    write_output(cfg, &serde_json::to_value(rec)?, None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.config.resolve().and_then(|cfg| match &cli.command {
        Command::EnumeratePairs { orbits } => enumerate_pairs(&cfg, *orbits),
        Command::Induce(sel) => induce(&cfg, sel),
        Command::ChiPhi(sel) => chi_phi_cmd(&cfg, sel),
        Command::Conjugation => conjugation(&cfg),
        Command::DlTable => dl_table(&cfg),
        Command::Verify => verify(&cfg),
        Command::DemoFactorization(sel) => demo_factorization(&cfg, sel),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
