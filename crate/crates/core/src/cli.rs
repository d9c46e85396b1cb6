//! The `xsep` command line: state files, subcommands and reports.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::XsepError;
use crate::index::{dim, Index};
use crate::multiset::{enumerate_irreducible, recursive_catalog, MultisetCatalog};
use crate::norms::{
    delta_cap_detailed, delta_detailed, dual_norm_detailed, xnorm_detailed, OptimConfig,
};
use crate::oracle;
use crate::phase::{
    basic_family, identity_sum, phase_difference, satisfies_phase_identities, IDENTITY_TOL,
};
use crate::separability::{
    boundary_family, check_general, check_witness, corank2_check, decide_xstate, ghz_diag_test,
    half_rank_test, normalize_half_rank, Outcome, Verdict, WitnessCandidate, WitnessStatus,
};
use crate::xstate::{ghz_diagonal, DenseState, DiagVec, HermVec, PhaseVec, XState, STATE_TOL};

pub const EXIT_SEPARABLE: i32 = 0;
pub const EXIT_ENTANGLED: i32 = 1;
pub const EXIT_PPT_ENTANGLED: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;
/// Unreadable or malformed input.
pub const EXIT_INPUT: i32 = 10;
/// Input violates the preconditions of the subcommand.
pub const EXIT_PRECONDITION: i32 = 11;
/// A cost guard refused the computation.
pub const EXIT_COST: i32 = 12;
/// Numerical failure.
pub const EXIT_INTERNAL: i32 = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    X,
    Dense,
}

/// On-disk state. Complex numbers are `[re, im]` pairs; entries follow the
/// lexicographic order of indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n: usize,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anti: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A parsed state: either X-shaped parts or a dense matrix.
#[derive(Clone, Debug)]
pub enum LoadedState {
    X(DiagVec, HermVec),
    Dense(DenseState),
}

impl LoadedState {
    /// The pair `(a, c)`, taking the X-part of dense matrices.
    pub fn parts(&self) -> (DiagVec, HermVec) {
        match self {
            LoadedState::X(a, c) => (a.clone(), c.clone()),
            LoadedState::Dense(rho) => rho.xpart_parts(),
        }
    }
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text)
            .map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))
    }

    pub fn from_x(a: &DiagVec, c: &HermVec, label: Option<String>) -> Self {
        Self {
            n: a.n(),
            kind: StateKind::X,
            diag: Some(a.values().to_vec()),
            anti: Some(c.to_full().iter().map(|z| [z.re, z.im]).collect()),
            matrix: None,
            label,
            seed: None,
        }
    }

    pub fn from_dense(rho: &DenseState, label: Option<String>, seed: Option<u64>) -> Self {
        let m = rho.matrix();
        Self {
            n: rho.n(),
            kind: StateKind::Dense,
            diag: None,
            anti: None,
            matrix: Some(
                (0..m.nrows())
                    .map(|r| {
                        (0..m.ncols())
                            .map(|c| [m[(r, c)].re, m[(r, c)].im])
                            .collect()
                    })
                    .collect(),
            ),
            label,
            seed,
        }
    }

    /// Validates shapes and pairing and builds the state.
    pub fn load(&self, tol: f64) -> Result<LoadedState, String> {
        crate::index::check_qubits(self.n).map_err(|e| format!("field `n`: {e}"))?;
        let d = dim(self.n);
        match self.kind {
            StateKind::X => {
                let diag = self
                    .diag
                    .as_ref()
                    .ok_or("field `diag` is required for kind \"x\"")?;
                let anti = self
                    .anti
                    .as_ref()
                    .ok_or("field `anti` is required for kind \"x\"")?;
                if self.matrix.is_some() {
                    return Err("field `matrix` is not allowed for kind \"x\"".into());
                }
                if diag.len() != d {
                    return Err(format!(
                        "field `diag`: expected {d} entries, got {}",
                        diag.len()
                    ));
                }
                if anti.len() != d {
                    return Err(format!(
                        "field `anti`: expected {d} entries, got {}",
                        anti.len()
                    ));
                }
                let a =
                    DiagVec::new(self.n, diag.clone()).map_err(|e| format!("field `diag`: {e}"))?;
                let full: Vec<Complex64> =
                    anti.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                let c = HermVec::from_full(self.n, &full, tol)
                    .map_err(|e| format!("field `anti`: {e}"))?;
                Ok(LoadedState::X(a, c))
            }
            StateKind::Dense => {
                let rows = self
                    .matrix
                    .as_ref()
                    .ok_or("field `matrix` is required for kind \"dense\"")?;
                if self.diag.is_some() || self.anti.is_some() {
                    return Err("fields `diag`/`anti` are not allowed for kind \"dense\"".into());
                }
                if rows.len() != d {
                    return Err(format!(
                        "field `matrix`: expected {d} rows, got {}",
                        rows.len()
                    ));
                }
                if let Some(r) = rows.iter().position(|row| row.len() != d) {
                    return Err(format!("field `matrix`, row {r}: expected {d} entries"));
                }
                let m = DMatrix::from_fn(d, d, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1]));
                let rho =
                    DenseState::new(self.n, m, tol).map_err(|e| format!("field `matrix`: {e}"))?;
                Ok(LoadedState::Dense(rho))
            }
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "xsep", version, about = "Separability of multi-qubit X-states")]
pub struct Cli {
    /// Tolerance for trace, Hermiticity and pairing checks of input files.
    #[arg(long, global = true, default_value_t = STATE_TOL)]
    pub tol: f64,
    /// Initial subdivisions per angle in torus searches.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Random restarts in heuristic searches.
    #[arg(long, global = true)]
    pub multistart: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide separability (X-state) or apply the necessary criterion (dense).
    Check { file: PathBuf },
    /// δ_n(a), ‖c‖_X_n, Δ_n(a) and ‖c‖′_X_n as enclosures.
    Norms { file: PathBuf },
    /// Block-positivity of the witness X(s, u) stored as an X-state file.
    Witness {
        file: PathBuf,
        /// Also pair the witness with this state.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Exact test for half-rank X-states.
    Halfrank {
        file: PathBuf,
        /// Rescale so that a_i a_ī = |c_i|^2 = 1 first.
        #[arg(long)]
        normalize: bool,
    },
    /// States with symmetric diagonal, such as GHZ-diagonal states.
    Ghz(GhzArgs),
    /// Phase identities and the phase difference of the anti-diagonal.
    Phase {
        file: PathBuf,
        /// Compare sums to zero exactly instead of modulo 2π.
        #[arg(long)]
        exact: bool,
    },
    /// Irreducible balanced multisets.
    Multisets(MultisetArgs),
    /// The family 2^{-n} X(1, t c) for unit-modulus c.
    Boundary(BoundaryArgs),
    /// Brute-force reference computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Identities forced by two saturated blocks.
    Corank2 { file: PathBuf },
}

#[derive(Args, Debug)]
pub struct GhzArgs {
    /// X-state file with a_i = a_ī.
    #[arg(required_unless_present = "probs")]
    pub file: Option<PathBuf>,
    /// Comma-separated GHZ-basis probabilities instead of a file.
    #[arg(long, value_delimiter = ',', requires = "n")]
    pub probs: Option<Vec<f64>>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MultisetArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub max_order: usize,
    /// Order-4 family from the lifting recursion instead of direct search.
    #[arg(long)]
    pub recursive: bool,
    /// Print every member, not just the counts.
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Debug)]
pub struct BoundaryArgs {
    #[arg(long, required_unless_present = "file")]
    pub n: Option<usize>,
    /// Phases as `index=angle` pairs, e.g. `011=pi,101=pi/2`; unlisted
    /// representatives get phase 0 and conjugates the negated phase.
    #[arg(long, default_value = "")]
    pub phase_spec: String,
    /// Take the phases of the anti-diagonal of an X-state file instead.
    #[arg(long, conflicts_with = "phase_spec")]
    pub file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Grid minimum of Σ a_i r^i over log r in [-L, L]^n.
    GridDelta {
        file: PathBuf,
        #[arg(long, default_value_t = 6.0)]
        radius: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Grid maximum of Σ c_i α^i over the torus.
    GridXnorm {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// A random mixture of product states, written as a dense state file.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Two-qubit separability from the dense partial transpose.
    TwoQubit { file: PathBuf },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<XsepError> for Failure {
    fn from(e: XsepError) -> Self {
        let code = match e {
            XsepError::CostGuard { .. } => EXIT_COST,
            XsepError::Precondition(_) | XsepError::InvalidState(_) => EXIT_PRECONDITION,
            XsepError::Lp(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// A finished command: exit code, JSON result and human-readable lines.
struct Output {
    code: i32,
    result: Value,
    text: Vec<String>,
}

fn outcome_code(v: &Verdict) -> i32 {
    match v.outcome {
        Outcome::Separable => EXIT_SEPARABLE,
        Outcome::Entangled => EXIT_ENTANGLED,
        Outcome::PptEntangled => EXIT_PPT_ENTANGLED,
        Outcome::Undecided if v.criterion_passed => EXIT_SEPARABLE,
        Outcome::Undecided => EXIT_UNDECIDED,
    }
}

fn read_state(path: &Path, tol: f64) -> Result<(StateFile, LoadedState), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let file =
        StateFile::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let state = file
        .load(tol)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok((file, state))
}

fn read_xstate(path: &Path, tol: f64) -> Result<(StateFile, XState), Failure> {
    let (file, state) = read_state(path, tol)?;
    let (a, c) = state.parts();
    Ok((file, XState::new(a, c)?))
}

fn interval(b: &crate::norms::BoundInterval) -> String {
    if b.is_exact() {
        format!("{:.12} ({})", b.lower, b.lower_method.tag())
    } else {
        format!(
            "[{:.12}, {:.12}] ({} / {})",
            b.lower,
            b.upper,
            b.lower_method.tag(),
            b.upper_method.tag()
        )
    }
}

fn verdict_lines(v: &Verdict) -> Vec<String> {
    let mut out = vec![format!("verdict: {}", v.outcome.label())];
    if v.criterion_passed {
        out.push("criterion: passed (X-part separable)".into());
    }
    if let Some(d) = &v.delta {
        out.push(format!("Δ_n(a)  = {}", interval(d)));
    }
    if let Some(d) = &v.dual_norm {
        out.push(format!("‖c‖′    = {}", interval(d)));
    }
    if let Some(c) = &v.certificate {
        let kind = serde_json::to_value(c)
            .ok()
            .and_then(|x| x.get("kind").cloned());
        out.push(format!(
            "certificate: {}",
            kind.and_then(|k| k.as_str().map(String::from))
                .unwrap_or_default()
        ));
        if let crate::separability::Certificate::Witness { value, .. } = c {
            out.push(format!("  <state, witness> = {value:e}"));
        }
    }
    out.extend(v.notes.iter().map(|n| format!("note: {n}")));
    out
}

fn config_from(cli: &Cli) -> OptimConfig {
    let mut cfg = OptimConfig::with_seed(cli.seed);
    if let Some(g) = cli.grid {
        cfg.grid = g.max(1);
    }
    if let Some(m) = cli.multistart {
        cfg.multistart = m.max(1);
    }
    cfg
}

/// Parses `pi`, `-pi/2`, `3*pi/4`, `0.5`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().replace(' ', "");
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (
            a.to_string(),
            b.parse::<f64>().map_err(|_| format!("bad angle {s:?}"))?,
        ),
        None => (t.clone(), 1.0),
    };
    let (sign, body) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest.to_string()),
        None => (1.0, num),
    };
    let coef = match body.as_str() {
        "pi" => 1.0,
        other => match other
            .strip_suffix("*pi")
            .or_else(|| other.strip_suffix("pi"))
        {
            Some(c) => c.parse::<f64>().map_err(|_| format!("bad angle {s:?}"))?,
            None => return Err(format!("bad angle {s:?}")),
        },
    };
    Ok(sign * coef * std::f64::consts::PI / den)
}

fn parse_phase_spec(n: usize, spec: &str) -> Result<PhaseVec, String> {
    let mut values = vec![0.0; dim(n)];
    let mut set = vec![false; dim(n)];
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (idx, ang) = item
            .split_once('=')
            .ok_or_else(|| format!("expected index=angle, got {item:?}"))?;
        let i: Index = idx.trim().parse().map_err(|e: XsepError| e.to_string())?;
        if i.n() != n {
            return Err(format!("index {idx} has {} digits, expected {n}", i.n()));
        }
        let theta = parse_angle(ang)?;
        for (j, t) in [(i, theta), (i.complement(), -theta)] {
            if set[j.rank()] && (values[j.rank()] - t).abs() > 1e-15 {
                return Err(format!("conflicting phases for index {j}"));
            }
            values[j.rank()] = t;
            set[j.rank()] = true;
        }
    }
    PhaseVec::new(n, values, 0.0).map_err(|e| e.to_string())
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    let cfg = config_from(cli);
    let tol = cli.tol;
    match &cli.command {
        Command::Check { file } => {
            let (_, state) = read_state(file, tol)?;
            let v = match &state {
                LoadedState::X(a, c) => {
                    let x = XState::new(a.clone(), c.clone())?;
                    x.validate_state(tol)?;
                    decide_xstate(&x, &cfg)?
                }
                LoadedState::Dense(rho) => check_general(rho, &cfg)?,
            };
            Ok(Output {
                code: outcome_code(&v),
                text: verdict_lines(&v),
                result: serde_json::to_value(&v).expect("verdict serializes"),
            })
        }
        Command::Norms { file } => {
            let (_, state) = read_state(file, tol)?;
            let (a, c) = state.parts();
            let d = delta_detailed(&a, &cfg)?.bound;
            let x = xnorm_detailed(&c, &cfg).bound;
            let cap = delta_cap_detailed(&a, &cfg)?;
            let dual = dual_norm_detailed(&c, &cfg)?.bound;
            let mut text = vec![
                format!("δ_n(a)     = {}", interval(&d)),
                format!("‖c‖_X_n    = {}", interval(&x)),
                format!("Δ_n(a)     = {}", interval(&cap.bound)),
                format!("‖c‖′_X_n   = {}", interval(&dual)),
            ];
            if let Some((t, m)) = &cap.tilde {
                text.push(format!(
                    "Δ̃_n(a)     = {t:.12} at {m}{}",
                    if cap.tilde_complete {
                        ""
                    } else {
                        " (partial catalog)"
                    }
                ));
            }
            if cap.below_tilde(1e-6) {
                text.push("note: the optimization bound for Δ_n lies strictly below Δ̃_n".into());
            }
            Ok(Output {
                code: 0,
                text,
                result: json!({
                    "delta": d,
                    "xnorm": x,
                    "delta_cap": cap.bound,
                    "tilde_delta": cap.tilde.as_ref().map(|(t, m)| json!({"value": t, "multiset": m, "complete": cap.tilde_complete})),
                    "delta_cap_optimization": cap.optimization,
                    "below_tilde": cap.below_tilde(1e-6),
                    "dual_norm": dual,
                }),
            })
        }
        Command::Witness { file, state } => {
            let (_, loaded) = read_state(file, tol)?;
            let (s, u) = loaded.parts();
            if !s.is_nonnegative() {
                return Err(XsepError::Precondition(
                    "the diagonal of a witness must be nonnegative".into(),
                )
                .into());
            }
            let w = WitnessCandidate::new(s, u)?;
            let check = check_witness(&w, &cfg)?;
            let mut text = vec![
                format!("status: {:?}", check.status),
                format!("δ_n(s)  = {}", interval(&check.delta)),
                format!("‖u‖_X_n = {}", interval(&check.xnorm)),
            ];
            let mut result = json!({ "check": check });
            if let Some(p) = state {
                let (_, x) = read_xstate(p, tol)?;
                if x.n() != w.s.n() {
                    return Err(XsepError::MixedQubits(x.n(), w.s.n()).into());
                }
                let value = w.pairing(&x);
                text.push(format!("<state, witness> = {value:e}"));
                result["pairing"] = json!(value);
            }
            let code = match check.status {
                WitnessStatus::BlockPositive => 0,
                WitnessStatus::NotBlockPositive => 1,
                WitnessStatus::Undecided => EXIT_UNDECIDED,
            };
            Ok(Output { code, text, result })
        }
        Command::Halfrank { file, normalize } => {
            let (_, mut x) = read_xstate(file, tol)?;
            if *normalize {
                x = normalize_half_rank(&x, crate::separability::HALF_RANK_TOL)?;
            }
            let v = half_rank_test(&x)?;
            Ok(Output {
                code: outcome_code(&v),
                text: verdict_lines(&v),
                result: serde_json::to_value(&v).expect("verdict serializes"),
            })
        }
        Command::Ghz(args) => {
            let x = match (&args.file, &args.probs) {
                (_, Some(p)) => ghz_diagonal(args.n.expect("clap enforces --n"), p)?,
                (Some(f), None) => read_xstate(f, tol)?.1,
                (None, None) => unreachable!("clap enforces one input"),
            };
            let v = ghz_diag_test(&x, &cfg)?;
            Ok(Output {
                code: outcome_code(&v),
                text: verdict_lines(&v),
                result: serde_json::to_value(&v).expect("verdict serializes"),
            })
        }
        Command::Phase { file, exact } => {
            let (_, loaded) = read_state(file, tol)?;
            let (_, c) = loaded.parts();
            let n = c.n();
            if n > crate::phase::MAX_PHASE_QUBITS {
                return Err(XsepError::QubitCount {
                    n,
                    max: crate::phase::MAX_PHASE_QUBITS,
                }
                .into());
            }
            let theta = c.phase_part();
            let family = basic_family(n)?;
            let mut text = vec![format!("basic family: {} identities", family.len())];
            let mut rows = Vec::new();
            for m in &family {
                let sum = identity_sum(&theta, &m.multiset);
                text.push(format!("  T_{} = {}: {:+.12}", m.index, m.multiset, sum));
                rows.push(json!({"label": m.index, "multiset": m.multiset, "sum": sum}));
            }
            let holds = satisfies_phase_identities(&theta, !exact, IDENTITY_TOL)?;
            text.push(format!(
                "identities hold ({}): {holds}",
                if *exact { "exact" } else { "mod 2π" }
            ));
            let pd = if c.first_zero().is_none() {
                let pd = phase_difference(&c)?;
                text.push(format!("phase difference: {:?}", pd.coefficients));
                Some(pd)
            } else {
                text.push("phase difference: undefined (zero entry)".into());
                None
            };
            Ok(Output {
                code: 0,
                text,
                result: json!({
                    "identities": rows,
                    "holds": holds,
                    "mode": if *exact { "exact" } else { "mod-2pi" },
                    "phase_difference": pd,
                }),
            })
        }
        Command::Multisets(args) => {
            let catalog: MultisetCatalog = if args.recursive {
                recursive_catalog(args.n)?
            } else {
                enumerate_irreducible(args.n, args.max_order)?
            };
            let mut text = vec![format!("n = {} ({:?})", catalog.n, catalog.method)];
            let mut order = 2;
            while order <= args.max_order {
                if catalog.counts.contains_key(&order) || !args.recursive {
                    text.push(format!("order {order}: {}", catalog.count(order)));
                }
                if args.list {
                    for m in catalog.family(order) {
                        text.push(format!("  {m}"));
                    }
                }
                order += 2;
            }
            let counts: serde_json::Map<String, Value> = catalog
                .counts
                .iter()
                .filter(|(o, _)| **o <= args.max_order)
                .map(|(o, c)| (o.to_string(), json!(c)))
                .collect();
            let mut result = json!({"n": catalog.n, "method": catalog.method, "counts": counts});
            if args.list {
                result["families"] = serde_json::to_value(&catalog.families).expect("serializes");
            }
            Ok(Output {
                code: 0,
                text,
                result,
            })
        }
        Command::Boundary(args) => {
            let c = match &args.file {
                Some(f) => {
                    let (_, loaded) = read_state(f, tol)?;
                    let (_, c) = loaded.parts();
                    HermVec::from_phases(&c.phase_part())
                }
                None => {
                    let n = args.n.expect("clap enforces --n");
                    crate::index::check_qubits(n)?;
                    HermVec::from_phases(
                        &parse_phase_spec(n, &args.phase_spec).map_err(Failure::input)?,
                    )
                }
            };
            let r = boundary_family(&c, &cfg)?;
            let mut text = vec![
                format!("‖c‖′ = {}", interval(&r.dual_norm)),
                format!("t0 in [{:.12}, {:.12}]", r.t0[0], r.t0[1]),
                format!("ϱ_1 is PPT: {}", r.ppt_at_one),
            ];
            if let Some(pd) = &r.phase_difference {
                text.push(format!("phase difference: {pd:?}"));
            }
            for s in &r.samples {
                let label = s
                    .verdict
                    .as_ref()
                    .map(|v| v.outcome.label())
                    .unwrap_or("not a state");
                text.push(format!("t = {:.12}: PPT {}, {label}", s.t, s.ppt));
            }
            match r.ppt_entangled_at {
                Some(t) => text.push(format!("certified PPT entanglement at t = {t:.12}")),
                None => text.push("no PPT-entangled member certified".into()),
            }
            Ok(Output {
                code: 0,
                text,
                result: serde_json::to_value(&r).expect("report serializes"),
            })
        }
        Command::Corank2 { file } => {
            let (_, x) = read_xstate(file, tol)?;
            let entries = corank2_check(&x, 1e-9)?;
            let failed = entries.iter().any(|e| !e.modulus_ok || !e.phase_ok);
            let mut text = vec![format!("{} identities checked", entries.len())];
            for e in &entries {
                text.push(format!(
                    "  {{{}, {}}} via {}: |c_{}| = |c_{}| {}, phases {}",
                    e.i1,
                    e.i2,
                    e.multiset,
                    e.j1,
                    e.j2,
                    if e.modulus_ok { "ok" } else { "FAILS" },
                    if e.phase_ok { "ok" } else { "FAIL" }
                ));
            }
            if failed {
                text.push("a necessary identity fails: the state is entangled".into());
            }
            Ok(Output {
                code: if failed { EXIT_ENTANGLED } else { 0 },
                text,
                result: json!({"entries": entries, "entangled": failed}),
            })
        }
        Command::Oracle(cmd) => oracle_command(cmd, cli, tol),
    }
}

fn oracle_command(cmd: &OracleCommand, cli: &Cli, tol: f64) -> Result<Output, Failure> {
    match cmd {
        OracleCommand::GridDelta {
            file,
            radius,
            points,
        } => {
            let (_, loaded) = read_state(file, tol)?;
            let (a, _) = loaded.parts();
            let v = oracle::grid_delta(&a, *radius, *points)?;
            Ok(Output {
                code: 0,
                text: vec![format!("grid minimum: {v:.12}")],
                result: json!({"grid_delta": v, "radius": radius, "points": points}),
            })
        }
        OracleCommand::GridXnorm { file, points } => {
            let (_, loaded) = read_state(file, tol)?;
            let (_, c) = loaded.parts();
            let v = oracle::grid_xnorm(&c, *points)?;
            Ok(Output {
                code: 0,
                text: vec![format!("grid maximum: {v:.12}")],
                result: json!({"grid_xnorm": v, "points": points}),
            })
        }
        OracleCommand::Sample { n, k } => {
            let rho = oracle::sample_separable(*n, *k, cli.seed)?;
            let file = StateFile::from_dense(
                &rho,
                Some(format!("mixture of {k} product states")),
                Some(cli.seed),
            );
            let text = serde_json::to_string_pretty(&file).expect("serializes");
            Ok(Output {
                code: 0,
                text: vec![text],
                result: serde_json::to_value(&file).expect("serializes"),
            })
        }
        OracleCommand::TwoQubit { file } => {
            let (_, x) = read_xstate(file, tol)?;
            let sep = oracle::two_qubit_oracle(&x)?;
            Ok(Output {
                code: if sep { EXIT_SEPARABLE } else { EXIT_ENTANGLED },
                text: vec![format!("separable: {sep}")],
                result: json!({"separable": sep}),
            })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Norms { .. } => "norms",
        Command::Witness { .. } => "witness",
        Command::Halfrank { .. } => "halfrank",
        Command::Ghz(_) => "ghz",
        Command::Phase { .. } => "phase",
        Command::Multisets(_) => "multisets",
        Command::Boundary(_) => "boundary",
        Command::Oracle(_) => "oracle",
        Command::Corank2 { .. } => "corank2",
    }
}

/// Runs the command line, writing the report to `out` and diagnostics to
/// `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_INPUT,
            };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            if cli.json {
                let report = json!({
                    "command": command_name(&cli.command),
                    "seed": cli.seed,
                    "tol": cli.tol,
                    "config": config_from(&cli),
                    "exit_code": o.code,
                    "result": o.result,
                });
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializes")
                );
            } else {
                for line in &o.text {
                    let _ = writeln!(out, "{line}");
                }
            }
            o.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
