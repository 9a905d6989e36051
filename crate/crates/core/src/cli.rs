//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain or configuration error, 2 a verification
//! check failed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::densities::{ClosedForm, DensityHandle, StableIndex};
use crate::error::{LevyError, Result};
use crate::laplace::{
    laplace_density, verify_char, verify_commute, verify_efros, verify_scaling_k0, Metric, VerifyReport,
};
use crate::subord::{
    msd_exponent, n_mass, propagator_mass, subordinate_free_diffusion, verify_levy2_relation, SubordinationRequest,
};
use crate::transform::{cache_dir, cache_load, cache_save, compose, synthesize, MAX_CHAIN_DEPTH};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "levy", version, about = "One-sided stable densities and the Lévy2 transform")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate g_alpha on an x grid.
    Eval {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0.1:10:25log", allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate the composition L_alpha[g_beta] = g_{alpha beta}.
    Compose {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value = "0.05:20:40log", allow_hyphen_values = true)]
        x: String,
        /// Closed-form index to compare against (exit 2 on mismatch).
        #[arg(long)]
        check_against: Option<String>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Numerical Laplace transform of g_alpha next to exp(-p^alpha).
    Laplace {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0.1:10:6log", allow_hyphen_values = true)]
        p: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run identity checks and print a JSON report.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Restrict the suite to one index.
        #[arg(long)]
        alpha: Option<String>,
        /// Override every tolerance in the suite.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// P_alpha(x, tau) for free diffusion subordinated by the inverse stable clock.
    Subordinate {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value = "-5:5:101", allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Save or inspect tabulated densities under $LEVY_CACHE_DIR.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
enum CacheAction {
    /// Synthesize and write a tabulated density.
    Save {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        path: Option<PathBuf>,
    },
    /// Read a cache file back and print its summary.
    Load {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        path: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Char,
    Scaling,
    Commute,
    Efros,
    Subord,
    All,
}

enum Failure {
    Error(LevyError),
    Check(String),
}

impl From<LevyError> for Failure {
    fn from(e: LevyError) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Check(msg)) => {
            eprintln!("verification failed: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Eval { alpha, x, out } => {
            let d = resolve(&parse_index(&alpha)?)?;
            let xs = parse_grid(&x)?;
            let rows = xs.iter().map(|&x| Ok(vec![x, d.pdf(x)?])).collect::<Result<Vec<_>>>()?;
            let meta = vec![("command", "eval".into()), ("alpha", d.alpha().to_string()), ("form", form_name(&d))];
            emit(&out, &Table { meta, columns: vec!["x", "g_alpha"], rows })?;
        }
        Command::Compose { alpha, beta, x, check_against, tol, out } => {
            let a = parse_index(&alpha)?;
            let b = resolve(&parse_index(&beta)?)?;
            let composed = compose(a, &b)?;
            let xs = parse_grid(&x)?;
            let mut meta = vec![
                ("command", "compose".to_string()),
                ("alpha", a.to_string()),
                ("beta", b.alpha().to_string()),
                ("product", composed.alpha().to_string()),
            ];
            let reference = match &check_against {
                Some(r) => {
                    let r = parse_index(r)?;
                    if r != composed.alpha() {
                        return Err(LevyError::Config(format!(
                            "{a} * {} = {}, which is not the reference index {r}",
                            b.alpha(),
                            composed.alpha()
                        ))
                        .into());
                    }
                    meta.push(("check_against", r.to_string()));
                    meta.push(("tol", fmt_f64(tol)));
                    Some(DensityHandle::for_index(r)?)
                }
                None => None,
            };
            let mut rows = Vec::with_capacity(xs.len());
            let mut worst = 0.0f64;
            for &x in &xs {
                let g = composed.pdf(x)?;
                match &reference {
                    Some(r) => {
                        let want = r.pdf(x)?;
                        let rel = (g - want).abs() / want.abs();
                        worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
                        rows.push(vec![x, g, want, rel]);
                    }
                    None => rows.push(vec![x, g]),
                }
            }
            let columns = if reference.is_some() { vec!["x", "g", "reference", "rel_err"] } else { vec!["x", "g"] };
            emit(&out, &Table { meta, columns, rows })?;
            if reference.is_some() {
                if worst > tol {
                    return Err(Failure::Check(format!("max relative error {worst:e} exceeds {tol:e}")));
                }
                eprintln!("max relative error {worst:e} within {tol:e}");
            }
        }
        Command::Laplace { alpha, p, out } => {
            let d = resolve(&parse_index(&alpha)?)?;
            let a = d.alpha().value();
            let ps = parse_grid(&p)?;
            let rows = ps
                .iter()
                .map(|&p| {
                    let got = laplace_density(&d, p)?;
                    let want = (-p.powf(a)).exp();
                    Ok(vec![p, got, want, (got - want).abs()])
                })
                .collect::<Result<Vec<_>>>()?;
            let meta = vec![
                ("command", "laplace".into()),
                ("alpha", d.alpha().to_string()),
                ("form", form_name(&d)),
                ("rel_tol", "1e-12".into()),
            ];
            emit(&out, &Table { meta, columns: vec!["p", "laplace", "exp_neg_p_alpha", "abs_err"], rows })?;
        }
        Command::Verify { suite, alpha, tol, output } => {
            let alpha = alpha.as_deref().map(parse_index).transpose()?;
            if let Some(t) = tol {
                if !(t > 0.0) {
                    return Err(LevyError::Config(format!("tolerance {t} must be positive")).into());
                }
            }
            let reports = run_suite(suite, alpha, tol)?;
            let failures: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.identity_id.as_str()).collect();
            let doc = json!({
                "tool": format!("levy {VERSION}"),
                "suite": format!("{suite:?}").to_lowercase(),
                "passed": failures.is_empty(),
                "failures": failures,
                "reports": reports,
            });
            let text = serde_json::to_string_pretty(&doc).map_err(|e| LevyError::Config(e.to_string()))? + "\n";
            write_out(output.as_deref(), &text)?;
            if !failures.is_empty() {
                return Err(Failure::Check(format!("{} of {} checks failed", failures.len(), reports.len())));
            }
        }
        Command::Subordinate { alpha, tau, x, out } => {
            let a = parse_index(&alpha)?;
            let req = SubordinationRequest::new(a, tau, parse_grid(&x)?);
            let points = subordinate_free_diffusion(&req)?;
            if let Some(p) = points.iter().find(|p| !p.converged) {
                return Err(LevyError::Quadrature { value: p.value, est_error: f64::NAN }.into());
            }
            let meta = vec![
                ("command", "subordinate".into()),
                ("alpha", a.to_string()),
                ("tau", fmt_f64(tau)),
                ("abs_tol", fmt_f64(req.plan.abs_tol)),
                ("rel_tol", fmt_f64(req.plan.rel_tol)),
            ];
            let rows = points.iter().map(|p| vec![p.x, p.value]).collect();
            emit(&out, &Table { meta, columns: vec!["x", "p_alpha"], rows })?;
        }
        Command::Cache { action } => match action {
            CacheAction::Save { alpha, path } => {
                let a = parse_index(&alpha)?;
                if ClosedForm::from_index(a).is_ok() {
                    return Err(LevyError::Config(format!("{a} has a closed form; nothing to cache")).into());
                }
                let d = synthesize_chain(a)?;
                let path = path.unwrap_or_else(|| cache_path(a));
                cache_save(&d, &path)?;
                println!("{}", path.display());
            }
            CacheAction::Load { alpha, path } => {
                let a = parse_index(&alpha)?;
                let path = path.unwrap_or_else(|| cache_path(a));
                let d = cache_load(&path)?;
                if d.alpha() != a {
                    return Err(LevyError::Cache { path, detail: format!("holds {}, not {a}", d.alpha()) }.into());
                }
                let interp = d.interpolant().expect("cache files hold tabulated densities");
                let chain: Vec<String> = d.chain().iter().map(|s| s.to_string()).collect();
                let doc = json!({
                    "path": path.display().to_string(),
                    "alpha": a.to_string(),
                    "chain": chain,
                    "nodes": interp.coeffs.len(),
                    "u_lo": interp.u_lo,
                    "u_hi": interp.u_hi,
                    "tail_exponent": interp.tail_exponent,
                });
                println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| LevyError::Config(e.to_string()))?);
            }
        },
    }
    Ok(())
}

fn parse_index(s: &str) -> Result<StableIndex> {
    s.parse()
}

/// `lo:hi:n` (linear), `lo:hi:nlog` (geometric), a comma list, or one number.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| LevyError::Config(format!("grid {s:?}: {why}"));
    let num = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi, n] => {
            let lo = num(lo).ok_or_else(|| bad("bad lower bound"))?;
            let hi = num(hi).ok_or_else(|| bad("bad upper bound"))?;
            let n = n.trim();
            let (count, log) = match n.strip_suffix("log") {
                Some(c) => (c, true),
                None => (n, false),
            };
            let count: usize = count.parse().map_err(|_| bad("bad point count"))?;
            if count == 0 {
                return Err(bad("need at least one point"));
            }
            if !(lo <= hi) {
                return Err(bad("lower bound exceeds upper bound"));
            }
            if log && !(lo > 0.0) {
                return Err(bad("log spacing needs a positive lower bound"));
            }
            if count == 1 {
                return Ok(vec![lo]);
            }
            let m = (count - 1) as f64;
            Ok((0..count)
                .map(|i| {
                    let f = i as f64 / m;
                    if i == 0 {
                        lo
                    } else if i == count - 1 {
                        hi
                    } else if log {
                        (lo.ln() + f * (hi.ln() - lo.ln())).exp()
                    } else {
                        lo + f * (hi - lo)
                    }
                })
                .collect())
        }
        [single] => single.split(',').map(|t| num(t).ok_or_else(|| bad("not a number"))).collect(),
        _ => Err(bad("expected lo:hi:n, lo:hi:nlog or a comma list")),
    }
}

/// Shortest round-trip decimal, in exponent form outside `[1e-5, 1e16)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn form_name(d: &DensityHandle) -> String {
    if d.is_closed() {
        "closed".into()
    } else {
        let chain: Vec<String> = d.chain().iter().map(|s| s.to_string()).collect();
        format!("synthesized({})", chain.join("*"))
    }
}

fn cache_path(a: StableIndex) -> PathBuf {
    cache_dir().join(format!("g-{}-{}.json", a.l(), a.k()))
}

/// Closed form if there is one; else a cache file for the index if present;
/// else a synthesized composition of closed forms.
fn resolve(a: &StableIndex) -> Result<DensityHandle> {
    if ClosedForm::from_index(*a).is_ok() {
        return DensityHandle::for_index(*a);
    }
    let path = cache_path(*a);
    if path.exists() {
        let d = cache_load(&path)?;
        if d.alpha() != *a {
            return Err(LevyError::Cache { path, detail: format!("holds {}, not {a}", d.alpha()) });
        }
        return Ok(d);
    }
    synthesize_chain(*a)
}

/// Shortest product of closed-form indices equal to `a`, searched in a fixed
/// order so that the result is deterministic.
fn closed_chain(a: StableIndex) -> Option<Vec<StableIndex>> {
    fn search(target: StableIndex, acc: Option<StableIndex>, depth: u32, chain: &mut Vec<StableIndex>) -> bool {
        if depth == 0 {
            return acc == Some(target);
        }
        for c in ClosedForm::ALL {
            let next = match acc {
                None => Some(c.index()),
                Some(v) => v.times(c.index()).ok(),
            };
            let Some(next) = next else { continue };
            if next.value() < target.value() * (1.0 - 1e-12) {
                continue;
            }
            chain.push(c.index());
            if search(target, Some(next), depth - 1, chain) {
                return true;
            }
            chain.pop();
        }
        false
    }
    (2..=MAX_CHAIN_DEPTH).find_map(|depth| {
        let mut chain = Vec::new();
        search(a, None, depth, &mut chain).then_some(chain)
    })
}

fn synthesize_chain(a: StableIndex) -> Result<DensityHandle> {
    let chain = closed_chain(a).ok_or_else(|| {
        LevyError::UnsupportedIndex(format!(
            "{a} (not a product of at most {MAX_CHAIN_DEPTH} of the closed-form indices)"
        ))
    })?;
    let (last, rest) = chain.split_last().expect("chains have at least two links");
    let mut current = DensityHandle::for_index(*last)?;
    for c in rest.iter().rev() {
        current = synthesize(&compose(*c, &current)?)?;
    }
    Ok(current)
}

fn run_suite(suite: Suite, alpha: Option<StableIndex>, tol: Option<f64>) -> Result<Vec<VerifyReport>> {
    let t = |default: f64| tol.unwrap_or(default);
    let pick = |defaults: &[(i64, i64)]| -> Result<Vec<StableIndex>> {
        match alpha {
            Some(a) => Ok(vec![a]),
            None => defaults.iter().map(|&(l, k)| StableIndex::new(l, k)).collect(),
        }
    };
    type Pair = ((i64, i64), (i64, i64));
    let pairs = |defaults: &[Pair]| -> Result<Vec<(StableIndex, StableIndex)>> {
        let all = defaults
            .iter()
            .map(|&((l1, k1), (l2, k2))| Ok((StableIndex::new(l1, k1)?, StableIndex::new(l2, k2)?)))
            .collect::<Result<Vec<_>>>()?;
        match alpha {
            None => Ok(all),
            Some(a) => {
                let kept: Vec<_> = all.into_iter().filter(|(x, y)| *x == a || *y == a).collect();
                if kept.is_empty() {
                    return Err(LevyError::Config(format!("no pair in this suite involves {a}")));
                }
                Ok(kept)
            }
        }
    };
    let composition_pairs = [((1, 2), (1, 2)), ((1, 2), (1, 3)), ((1, 2), (2, 3))];
    let mut out = Vec::new();
    if matches!(suite, Suite::Char | Suite::All) {
        for a in pick(&[(1, 2), (1, 3), (2, 3), (1, 4), (1, 6)])? {
            out.push(verify_char(&resolve(&a)?, &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0], t(1e-8)));
        }
    }
    if matches!(suite, Suite::Scaling | Suite::All) {
        for a in pick(&[(1, 2), (1, 3)])? {
            let grid: &[f64] = if a == StableIndex::new(1, 3)? { &[0.2, 0.5, 0.8] } else { &[0.25, 0.5, 2.0, 4.0] };
            out.push(verify_scaling_k0(a, grid, t(1e-5)));
        }
    }
    if matches!(suite, Suite::Commute | Suite::All) {
        let xs = parse_grid("0.1:20:10log")?;
        for (a, b) in pairs(&composition_pairs)? {
            out.push(verify_commute(a, b, &xs, t(1e-6)));
        }
    }
    if matches!(suite, Suite::Efros | Suite::All) {
        for (a, b) in pairs(&[((1, 2), (1, 2)), ((1, 2), (1, 3)), ((1, 3), (2, 3))])? {
            out.push(verify_efros(a, b, &[0.5, 1.0, 2.0], t(1e-6)));
        }
    }
    if matches!(suite, Suite::Subord | Suite::All) {
        for a in pick(&[(1, 2), (1, 3)])? {
            let taus = [0.5, 1.0, 2.0];
            let pairs = taus.iter().map(|&tau| Ok((n_mass(a, tau)?, 1.0))).collect();
            out.push(VerifyReport::build(format!("n mass alpha={a}"), &taus, pairs, t(1e-8), Metric::Abs));
            let mass = propagator_mass(a, 1.0, 0.02).map(|(_, m)| (m, 1.0));
            out.push(VerifyReport::build(format!("propagator mass alpha={a}"), &[1.0], vec![mass], t(1e-6), Metric::Abs));
            let taus = [0.1, 0.3, 1.0, 3.0, 10.0];
            let slope = msd_exponent(a, &taus).map(|s| (s, a.value()));
            out.push(VerifyReport::build(format!("msd exponent alpha={a}"), &taus, vec![slope], t(0.02), Metric::Abs));
            out.push(verify_levy2_relation(a, 1.7, "exp", |s| (-s).exp(), t(1e-8)));
        }
    }
    Ok(out)
}

struct Table {
    meta: Vec<(&'static str, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    tool: String,
    meta: serde_json::Map<String, serde_json::Value>,
    columns: &'a [&'static str],
    rows: &'a [Vec<f64>],
}

fn emit(out: &OutputArgs, table: &Table) -> Result<()> {
    let text = match out.format {
        Format::Csv => {
            let mut s = format!("# levy {VERSION}");
            for (k, v) in &table.meta {
                s.push_str(&format!(" {k}={v}"));
            }
            s.push('\n');
            s.push_str(&table.columns.join(","));
            s.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let meta = table.meta.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            let doc = JsonTable { tool: format!("levy {VERSION}"), meta, columns: &table.columns, rows: &table.rows };
            serde_json::to_string_pretty(&doc).map_err(|e| LevyError::Config(e.to_string()))? + "\n"
        }
    };
    write_out(out.output.as_deref(), &text)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
