//! Subcommand implementations and their report records.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use gfdiv::bounds::{self, BoundResult, Direction};
use gfdiv::divergence::f_div_detail;
use gfdiv::exponent::{classical_sp_oracle, exponent_curve, PowerFamily};
use gfdiv::generators::{curve, generator, AdmissiblePair};
use gfdiv::information::{igf_info, max_igf_over_input, SolverOpts};
use gfdiv::subadditivity::{
    binary_gap_scan, check_inv_gprime_concave, check_t, check_tminus, check_tplus, stationary_roots, ScanReport,
    Verdict,
};
use gfdiv::{make_pair, Error, Params, Result};

use crate::cli::{BoundKind, CheckClass, Cli, Command, DirectionArg, PairArgs, WhichTable};
use crate::input;
use crate::output::{num, nums, opt_num, round_value, Envelope, Format};

/// A report row. `failed` drives `--strict`.
pub trait Record: Serialize + DeserializeOwned {
    fn failed(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivRecord {
    pub g: String,
    pub f: String,
    #[serde(with = "nums")]
    pub p: Vec<f64>,
    #[serde(with = "nums")]
    pub q: Vec<f64>,
    #[serde(with = "num")]
    pub f_divergence: f64,
    #[serde(with = "num")]
    pub value: f64,
    pub used_slope_extension: bool,
}

impl Record for DivRecord {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoRecord {
    pub g: String,
    pub f: String,
    #[serde(with = "nums")]
    pub input: Vec<f64>,
    #[serde(with = "num")]
    pub value: f64,
    #[serde(with = "nums")]
    pub output: Vec<f64>,
    #[serde(with = "opt_num", default, skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<f64>,
    #[serde(with = "num")]
    pub certified_gap: f64,
    #[serde(with = "num")]
    pub kkt_residual: f64,
    pub certified: bool,
    pub solver_iters: usize,
    pub restarts_used: usize,
}

impl Record for InfoRecord {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub target: String,
    pub subject: String,
    pub verdict: String,
    #[serde(with = "num")]
    pub min_gap: f64,
    #[serde(with = "nums")]
    pub witness: Vec<f64>,
    pub samples: u64,
    pub grid_res: u64,
    #[serde(with = "num")]
    pub tol: f64,
    pub nonfinite: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl From<ScanReport> for ScanRecord {
    fn from(r: ScanReport) -> Self {
        ScanRecord {
            target: r.target,
            subject: r.subject,
            verdict: r.verdict.as_str().to_string(),
            min_gap: r.min_gap,
            witness: r.witness,
            samples: r.samples,
            grid_res: r.grid_res,
            tol: r.tol,
            nonfinite: r.nonfinite,
            note: r.note,
        }
    }
}

impl Record for ScanRecord {
    fn failed(&self) -> bool {
        self.verdict == Verdict::Fail.as_str()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub g: String,
    pub f: String,
    pub class_t: String,
    pub scan: String,
    #[serde(with = "num")]
    pub scan_min_gap: f64,
    #[serde(with = "nums")]
    pub witness: Vec<f64>,
}

impl Record for MatrixRecord {
    fn failed(&self) -> bool {
        self.scan == Verdict::Fail.as_str()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootsRecord {
    pub f: String,
    #[serde(with = "num")]
    pub lambda: f64,
    #[serde(with = "num")]
    pub a: f64,
    #[serde(with = "num")]
    pub b: f64,
    pub count: usize,
    #[serde(with = "nums")]
    pub roots: Vec<f64>,
}

impl Record for RootsRecord {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub kind: String,
    #[serde(with = "num")]
    pub value: f64,
    pub inputs: Map<String, Value>,
    pub conditions: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundRecord {
    fn new(kind: &str, r: BoundResult) -> Self {
        BoundRecord {
            kind: kind.to_string(),
            value: r.value,
            inputs: r.inputs_echo.into_iter().map(|(k, v)| (k, round_value(v))).collect(),
            conditions: r.side_conditions.into_iter().map(|c| (c.name, Value::Bool(c.holds))).collect(),
            note: r.note,
        }
    }
}

impl Record for BoundRecord {
    fn failed(&self) -> bool {
        ["bound_holds", "slack_nonnegative"].iter().any(|k| self.conditions.get(*k) == Some(&Value::Bool(false)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentRecord {
    #[serde(rename = "R", with = "num")]
    pub rate: f64,
    #[serde(rename = "E", with = "num")]
    pub exponent: f64,
    #[serde(with = "num")]
    pub s: f64,
    #[serde(with = "nums")]
    pub p: Vec<f64>,
    #[serde(with = "nums")]
    pub q: Vec<f64>,
    #[serde(with = "num")]
    pub lower: f64,
    #[serde(with = "num")]
    pub upper: f64,
    pub converged: bool,
    pub rounds: usize,
    #[serde(with = "opt_num", default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
}

impl Record for ExponentRecord {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRecord {
    pub table: u8,
    pub row: String,
    pub expected: String,
    pub computed: String,
    #[serde(with = "num")]
    pub min_gap: f64,
    pub matches: bool,
}

impl Record for TableRecord {
    fn failed(&self) -> bool {
        !self.matches
    }
}

/// Rendered report plus whether any record failed.
pub struct Rendered {
    pub text: String,
    pub failed: bool,
}

fn emit<R: Record>(command: &str, records: Vec<R>, format: Format) -> Result<Rendered> {
    let failed = records.iter().any(Record::failed);
    let text = Envelope { command: command.to_string(), records }.render(format)?;
    Ok(Rendered { text, failed })
}

fn pair_of(a: &PairArgs) -> Result<AdmissiblePair> {
    make_pair(input::g_transform(&a.g, &a.g_params)?, input::f_generator(&a.f, &a.f_params)?)
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::InvalidInput(format!("--{flag} is required here")))
}

fn need_num(v: Option<f64>, flag: &str) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidInput(format!("--{flag} is required here")))
}

const LN2: f64 = std::f64::consts::LN_2;

pub fn run(cli: &Cli) -> Result<Rendered> {
    let g = &cli.global;
    let opts = SolverOpts {
        restarts: g.restarts,
        max_iters: g.max_iters,
        tol: g.tol,
        seed: g.seed,
        assume_permutation_invariant: g.assume_permutation_invariant,
    };
    let unit = if g.bits { 1.0 / LN2 } else { 1.0 };
    let fmt = g.format;
    match &cli.command {
        Command::Div { pair, p, q } => {
            let pr = pair_of(pair)?;
            let (p, q) = (input::dist(p)?, input::dist(q)?);
            let d = f_div_detail(&p, &q, &pr.f)?;
            let rec = DivRecord {
                g: pr.g.name.clone(),
                f: pr.f.name.clone(),
                p: p.probs().to_vec(),
                q: q.probs().to_vec(),
                f_divergence: d.value,
                value: pr.g.eval(d.value),
                used_slope_extension: d.used_slope_extension,
            };
            emit("div", vec![rec], fmt)
        }
        Command::Info { pair, channel, p, max } => {
            let pr = pair_of(pair)?;
            let w = input::channel(channel)?;
            let (input, upper) = if *max {
                let m = max_igf_over_input(&w, &pr, &opts)?;
                (m.input, Some(m.upper_bound * unit))
            } else {
                (input::dist(need(p, "p")?)?, None)
            };
            let r = igf_info(&input, &w, &pr, &opts)?;
            let rec = InfoRecord {
                g: pr.g.name.clone(),
                f: pr.f.name.clone(),
                input: input.probs().to_vec(),
                value: r.value * unit,
                output: r.argmin_q.probs().to_vec(),
                upper_bound: upper,
                certified_gap: r.certified_gap * unit,
                kkt_residual: r.kkt_residual,
                certified: r.certified,
                solver_iters: r.solver_iters,
                restarts_used: r.restarts_used,
            };
            emit("info", vec![rec], fmt)
        }
        Command::Subadd { pair, grid_res, samples, matrix } => {
            if *grid_res < 2 {
                return Err(Error::ParameterOutOfRange { name: "grid_res".into(), detail: "must be at least 2".into() });
            }
            if !*matrix {
                let pr = pair_of(pair)?;
                let r = binary_gap_scan(&pr, *grid_res, *samples, g.seed);
                return emit("subadd", vec![ScanRecord::from(r)], fmt);
            }
            let gt = input::g_transform(&pair.g, &pair.g_params)?;
            let mut rows = Vec::new();
            for (_, name, ps) in table_one_rows().into_iter().chain(extra_rows()) {
                let f = generator(name, &ps)?;
                let t = check_t(&f)?.verdict.as_str().to_string();
                let pr = match make_pair(gt.clone(), f) {
                    Ok(pr) => pr,
                    Err(Error::DomainViolation { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let s = binary_gap_scan(&pr, *grid_res, *samples, g.seed);
                rows.push(MatrixRecord {
                    g: pr.g.name.clone(),
                    f: pr.f.name.clone(),
                    class_t: t,
                    scan: s.verdict.as_str().to_string(),
                    scan_min_gap: s.min_gap,
                    witness: s.witness,
                });
            }
            emit("subadd", rows, fmt)
        }
        Command::Check { class, pair, curve: cname, curve_params, qz, rz, lambda, a, b } => {
            let shape = || -> Result<gfdiv::Curve> {
                match cname {
                    Some(n) => curve(n, &input::params(curve_params)?),
                    None => {
                        let f = input::f_generator(&pair.f, &pair.f_params)?;
                        if !f.has_d2() {
                            return Err(Error::MissingDerivative(f.name.clone()));
                        }
                        Ok(f.g_curve())
                    }
                }
            };
            let report = match class {
                CheckClass::T => match cname {
                    Some(_) => gfdiv::subadditivity::check_concave_curve(&shape()?, "class_T"),
                    None => check_t(&input::f_generator(&pair.f, &pair.f_params)?)?,
                },
                CheckClass::Tplus => check_tplus(&shape()?),
                CheckClass::Tminus => check_tminus(&shape()?),
                CheckClass::InvGprime => check_inv_gprime_concave(&input::g_transform(&pair.g, &pair.g_params)?)?,
                CheckClass::Roots => {
                    let f = input::f_generator(&pair.f, &pair.f_params)?;
                    let (qz, rz) = (input::dist(need(qz, "qz")?)?, input::dist(need(rz, "rz")?)?);
                    let roots = stationary_roots(&f, &qz, &rz, *lambda, *a, *b)?;
                    let rec = RootsRecord { f: f.name.clone(), lambda: *lambda, a: *a, b: *b, count: roots.len(), roots };
                    return emit("check", vec![rec], fmt);
                }
            };
            emit("check", vec![ScanRecord::from(report)], fmt)
        }
        Command::Bounds { kind, pair, m, eps, channel, assume_subadditive, p, q, n, alpha, beta, s, c, direction } => {
            let (name, r) = match kind {
                BoundKind::Fano => ("fano", bounds::fano_lower(&pair_of(pair)?, *m, *eps)?),
                BoundKind::Blocklength => {
                    let w = input::channel(need(channel, "channel")?)?;
                    ("blocklength", bounds::blocklength_lower(&pair_of(pair)?, *m, *eps, &w, &opts, *assume_subadditive)?)
                }
                BoundKind::Ht => {
                    let (p, q) = (input::dist(need(p, "p")?)?, input::dist(need(q, "q")?)?);
                    let (al, be) = (need_num(*alpha, "alpha")?, need_num(*beta, "beta")?);
                    ("ht", bounds::ht_bound_check(&pair_of(pair)?, &p, &q, *n, al, be, *assume_subadditive)?)
                }
                BoundKind::Klcmp => {
                    let f = input::f_generator(&pair.f, &pair.f_params)?;
                    let (p, q) = (input::dist(need(p, "p")?)?, input::dist(need(q, "q")?)?);
                    let dir = match direction {
                        DirectionArg::Plus => Direction::Plus,
                        DirectionArg::Minus => Direction::Minus,
                    };
                    ("klcmp", bounds::kl_comparison(&f, need_num(*s, "s")?, *c, &p, &q, dir)?)
                }
            };
            emit("bounds", vec![BoundRecord::new(name, r)], fmt)
        }
        Command::Exponent { channel, rates, family, oracle } => {
            if family != "power" {
                return Err(Error::UnknownName(family.clone()));
            }
            let w = input::channel(channel)?;
            let rates: Vec<f64> = input::reals(rates)?.into_iter().map(|r| r / unit).collect();
            let curve = exponent_curve(&w, &rates, &PowerFamily, &opts)?;
            let mut rows = Vec::new();
            for pt in curve.per_point {
                let o = if *oracle { Some(classical_sp_oracle(&w, pt.rate)?.value * unit) } else { None };
                rows.push(ExponentRecord {
                    rate: pt.rate * unit,
                    exponent: pt.value * unit,
                    s: pt.s,
                    p: pt.input.probs().to_vec(),
                    q: pt.output.probs().to_vec(),
                    lower: pt.lower * unit,
                    upper: pt.upper * unit,
                    converged: pt.converged,
                    rounds: pt.rounds,
                    oracle: o,
                });
            }
            emit("exponent", rows, fmt)
        }
        Command::Tables { which } => {
            let mut rows = Vec::new();
            if matches!(which, WhichTable::One | WhichTable::All) {
                rows.extend(table_one()?);
            }
            if matches!(which, WhichTable::Two | WhichTable::All) {
                rows.extend(table_two()?);
            }
            emit("tables", rows, fmt)
        }
    }
}

fn p1(k: &str, v: f64) -> Params {
    [(k.to_string(), v)].into_iter().collect()
}

/// `(label, registry name, params)` for the eight class-T rows, in order.
pub fn table_one_rows() -> Vec<(&'static str, &'static str, Params)> {
    vec![
        ("KL", "kl", Params::new()),
        ("Reverse KL", "reverse_kl", Params::new()),
        ("Squared Hellinger", "squared_hellinger", Params::new()),
        ("Jensen-Shannon", "jensen_shannon", Params::new()),
        ("alpha-divergence (alpha=0.5)", "alpha", p1("alpha", 0.5)),
        ("Pearson chi2", "pearson", Params::new()),
        ("Triangular", "triangular", Params::new()),
        ("Le Cam", "le_cam", Params::new()),
    ]
}

fn extra_rows() -> Vec<(&'static str, &'static str, Params)> {
    vec![
        ("1 - sqrt(x)", "one_minus_sqrt", Params::new()),
        ("Hellinger order 2", "hellinger_order", p1("alpha", 2.0)),
    ]
}

const TABLE_ONE_EXPECTED: [bool; 8] = [true, true, true, true, true, false, false, false];

fn yes_no(b: bool) -> String {
    if b { "Yes" } else { "No" }.to_string()
}

pub fn table_one() -> Result<Vec<TableRecord>> {
    table_one_rows()
        .into_iter()
        .zip(TABLE_ONE_EXPECTED)
        .map(|((label, name, ps), want)| {
            let r = check_t(&generator(name, &ps)?)?;
            let got = r.verdict == Verdict::Pass;
            Ok(TableRecord {
                table: 1,
                row: label.to_string(),
                expected: yes_no(want),
                computed: yes_no(got),
                min_gap: r.min_gap,
                matches: got == want,
            })
        })
        .collect()
}

pub fn table_two() -> Result<Vec<TableRecord>> {
    [("Pearson chi2", "pearson", true), ("Triangular", "triangular", false), ("Le Cam", "le_cam", false)]
        .into_iter()
        .map(|(label, name, want)| {
            let f = generator(name, &Params::new())?;
            let r = check_tplus(&f.g_curve());
            let got = r.verdict == Verdict::Pass;
            Ok(TableRecord {
                table: 2,
                row: label.to_string(),
                expected: yes_no(want),
                computed: yes_no(got),
                min_gap: r.min_gap,
                matches: got == want,
            })
        })
        .collect()
}
