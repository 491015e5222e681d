//! `crgc`: bounds, tradeoff curves, and cluster simulation for concurrent
//! regenerating codes.
//!
//! Exit codes: 0 success, 1 invariant/assertion failure, 2 input error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crgc_core::bounds::{
    bruteforce_argmin, capacity_closed_form_with_argmin, coop_denominator, enumerate_compositions,
    fmt_frac, frac, frac_int, mb_point, q_coeff, tradeoff_curve, CodeParams, Frac,
};
use crgc_core::cluster::{compare_mechanisms, run_with_seed, Scenario};
use crgc_core::gf::{PrimeField, DEFAULT_PRIME};
use crgc_core::matrix::{example_repair_matrix, GfMatrix};

const EXIT_INVARIANT: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "crgc",
    about = "Concurrent regenerating codes: capacity bounds, storage-bandwidth tradeoffs, and a cluster simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Total number of nodes
    #[arg(long)]
    n: usize,
    /// Reconstruction threshold
    #[arg(long)]
    k: usize,
    /// Helper count per repair
    #[arg(long)]
    d: usize,
    /// Concurrent-repair group size
    #[arg(long)]
    t: usize,
    /// File size in packets (integer or num/den)
    #[arg(long, short = 'B', default_value = "1")]
    b: String,
}

impl ParamArgs {
    fn build(&self) -> Result<CodeParams, CliError> {
        let b = parse_frac(&self.b).map_err(CliError::input)?;
        CodeParams::new(b, self.n, self.k, self.d, self.t).map_err(CliError::input)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit the storage-bandwidth tradeoff curve as CSV (MS point first, MB point last)
    Tradeoff {
        #[command(flatten)]
        params: ParamArgs,
        /// Number of curve points (>= 2)
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Add decimal convenience columns next to the exact rationals
        #[arg(long)]
        float: bool,
        /// Write output to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cut-set capacity at a given (alpha, beta), with the minimizing scenario
    Capacity {
        #[command(flatten)]
        params: ParamArgs,
        /// Per-node storage (integer or num/den)
        #[arg(long)]
        alpha: String,
        /// Per-helper bandwidth (integer or num/den)
        #[arg(long)]
        beta: String,
        /// Also run the brute-force enumeration and report agreement
        #[arg(long)]
        brute: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario file through the simulator and print the report
    Simulate {
        /// Path to a `schema: 1` scenario file
        scenario: PathBuf,
        /// Override the scenario's randomness seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare repair mechanisms (bandwidth and links) at minimum storage
    Compare {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the published worked examples and report a pass/fail checklist
    VerifyPaper {
        /// Field modulus for the randomized scenario check
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        field: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }

    fn invariant(e: impl std::fmt::Display) -> Self {
        CliError {
            code: EXIT_INVARIANT,
            message: e.to_string(),
        }
    }
}

fn parse_frac(s: &str) -> Result<Frac, String> {
    let parse_int = |v: &str| -> Result<i128, String> {
        v.trim()
            .parse()
            .map_err(|_| format!("'{s}' is not an integer or num/den rational"))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den == 0 {
                return Err(format!("'{s}' has a zero denominator"));
            }
            Ok(frac(parse_int(num)?, den))
        }
        None => Ok(frac_int(parse_int(s)?)),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn frac_f64(v: &Frac) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Tradeoff {
            params,
            points,
            float,
            out,
        } => cmd_tradeoff(&params.build()?, points, float, out.as_ref()),
        Command::Capacity {
            params,
            alpha,
            beta,
            brute,
            out,
        } => {
            let p = params.build()?;
            let alpha = parse_frac(&alpha).map_err(CliError::input)?;
            let beta = parse_frac(&beta).map_err(CliError::input)?;
            cmd_capacity(&p, alpha, beta, brute, out.as_ref())
        }
        Command::Simulate {
            scenario,
            seed,
            out,
        } => cmd_simulate(&scenario, seed, out.as_ref()),
        Command::Compare { params, out } => {
            let p = params.build()?;
            let mut text = String::from("mechanism,bandwidth,links\n");
            for row in compare_mechanisms(&p) {
                let _ = writeln!(
                    text,
                    "{},{},{}",
                    row.mechanism,
                    fmt_frac(&row.bandwidth),
                    row.links
                );
            }
            emit(out.as_ref(), &text)
        }
        Command::VerifyPaper { field, out } => cmd_verify_paper(field, out.as_ref()),
    }
}

fn cmd_tradeoff(
    params: &CodeParams,
    points: usize,
    float: bool,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let curve = tradeoff_curve(params, points).map_err(CliError::input)?;
    let mut text = String::from(if float {
        "gamma,alpha,regime,gamma_float,alpha_float\n"
    } else {
        "gamma,alpha,regime\n"
    });
    for pt in curve {
        if float {
            let _ = writeln!(
                text,
                "{},{},{},{:.6},{:.6}",
                fmt_frac(&pt.gamma),
                fmt_frac(&pt.alpha),
                pt.regime,
                frac_f64(&pt.gamma),
                frac_f64(&pt.alpha)
            );
        } else {
            let _ = writeln!(
                text,
                "{},{},{}",
                fmt_frac(&pt.gamma),
                fmt_frac(&pt.alpha),
                pt.regime
            );
        }
    }
    emit(out, &text)
}

fn cmd_capacity(
    params: &CodeParams,
    alpha: Frac,
    beta: Frac,
    brute: bool,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let (closed, argmin) = capacity_closed_form_with_argmin(params, alpha.clone(), beta.clone())
        .map_err(CliError::input)?;
    let mut text = format!("capacity: {}\n", fmt_frac(&closed));
    let _ = writeln!(text, "composition: {argmin}");
    if brute {
        let (bruteval, brute_argmin) =
            bruteforce_argmin(params, alpha, beta).map_err(CliError::input)?;
        let _ = writeln!(text, "bruteforce: {}", fmt_frac(&bruteval));
        let _ = writeln!(
            text,
            "bruteforce_argmin: {}",
            brute_argmin
                .iter()
                .map(|u| u.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        let agree = bruteval == closed;
        let _ = writeln!(text, "agreement: {agree}");
        emit(out, &text)?;
        if !agree {
            return Err(CliError::invariant(
                "closed form disagrees with the brute-force oracle",
            ));
        }
        return Ok(());
    }
    emit(out, &text)
}

fn cmd_simulate(
    path: &PathBuf,
    seed: Option<u64>,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let scenario = Scenario::parse(&text).map_err(CliError::input)?;
    let seed = seed.unwrap_or(scenario.seed);
    let report = run_with_seed(&scenario, seed).map_err(CliError::invariant)?;
    emit(out, &report.to_text())
}

fn record_check(
    text: &mut String,
    all_pass: &mut bool,
    name: &str,
    result: Result<bool, String>,
) {
    let line = match result {
        Ok(true) => format!("check {name}: pass\n"),
        Ok(false) => {
            *all_pass = false;
            format!("check {name}: FAIL\n")
        }
        Err(e) => {
            *all_pass = false;
            format!("check {name}: FAIL ({e})\n")
        }
    };
    text.push_str(&line);
}

fn cmd_verify_paper(field: u32, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut text = String::new();
    let mut all_pass = true;
    macro_rules! check {
        ($name:expr, $result:expr) => {
            record_check(&mut text, &mut all_pass, $name, $result)
        };
    }

    // 6x6 coefficient matrix over F_7: nonsingular, invertible
    check!("coefficient-matrix-nonsingular", (|| {
        let f7 = PrimeField::new(7).map_err(|e| e.to_string())?;
        let a = example_repair_matrix(f7);
        let det = a.det().map_err(|e| e.to_string())?;
        let inv = a.inverse().map_err(|e| e.to_string())?;
        let prod = a.matmul(&inv).map_err(|e| e.to_string())?;
        Ok(a.rank() == 6 && !det.is_zero() && prod == GfMatrix::identity(6, f7))
    })());

    // capacity regimes at (k=6, d=10, t=3), beta = 1
    check!("capacity-regimes-k6", (|| {
        let p = CodeParams::new(frac_int(18), 14, 6, 10, 3).map_err(|e| e.to_string())?;
        for (alpha, want) in [(2, 12), (3, 16), (4, 17)] {
            let (closed, _) =
                capacity_closed_form_with_argmin(&p, frac_int(alpha), frac_int(1))
                    .map_err(|e| e.to_string())?;
            let (brute, _) = bruteforce_argmin(&p, frac_int(alpha), frac_int(1))
                .map_err(|e| e.to_string())?;
            if closed != frac_int(want) || brute != closed {
                return Ok(false);
            }
        }
        Ok(true)
    })());

    // closed form vs oracle at (k=7, d=10, t=3)
    check!("capacity-regimes-k7", (|| {
        let p = CodeParams::new(frac_int(21), 14, 7, 10, 3).map_err(|e| e.to_string())?;
        for alpha in [2, 3, 9, 11] {
            let (closed, _) =
                capacity_closed_form_with_argmin(&p, frac_int(alpha), frac_int(1))
                    .map_err(|e| e.to_string())?;
            let (brute, _) = bruteforce_argmin(&p, frac_int(alpha), frac_int(1))
                .map_err(|e| e.to_string())?;
            if brute != closed {
                return Ok(false);
            }
        }
        Ok(true)
    })());

    // composition census for k=7, t=3
    check!("composition-census", (|| {
        let all = enumerate_compositions(7, 3).map_err(|e| e.to_string())?;
        if all.len() != 44 {
            return Ok(false);
        }
        let mut by_groups = std::collections::BTreeMap::new();
        for u in &all {
            *by_groups.entry(u.groups()).or_insert(0usize) += 1;
        }
        let want: std::collections::BTreeMap<usize, usize> =
            [(7, 1), (6, 6), (5, 15), (4, 16), (3, 6)].into_iter().collect();
        Ok(by_groups == want)
    })());

    // minimum-bandwidth storage comparison: concurrent t=6 vs one-by-one t=1
    let mb_result = (|| {
        let conc = CodeParams::new(frac_int(1), 19, 10, 13, 6).map_err(|e| e.to_string())?;
        let single = CodeParams::new(frac_int(1), 19, 10, 18, 1).map_err(|e| e.to_string())?;
        let a_conc = mb_point(&conc).alpha;
        let a_single = mb_point(&single).alpha;
        Ok::<_, String>((
            a_conc == frac(26, 220) && a_single == frac(36, 270),
            a_conc,
            a_single,
        ))
    })();
    match mb_result {
        Ok((pass, a_conc, a_single)) => {
            check!("mb-storage-comparison", Ok(pass));
            let (fc, fs) = (frac_f64(&a_conc), frac_f64(&a_single));
            let _ = writeln!(
                text,
                "  note: alpha {}B = {:.4}B vs {}B = {:.4}B; relative saving {:.1}% \
                 (prose rounds this to 12.7%)",
                fmt_frac(&a_conc),
                fc,
                fmt_frac(&a_single),
                fs,
                (fs - fc) / fc * 100.0
            );
        }
        Err(e) => check!("mb-storage-comparison", Err(e)),
    }

    // q(i) t d equals the cooperative denominator D_{i-1} when t | k
    check!("coop-denominator-identity", (|| {
        for g in 1..=5usize {
            for t in 1..=5usize {
                let k = g * t;
                for d in k..=15 {
                    let p = CodeParams::new(frac_int(1), d + t, k, d, t)
                        .map_err(|e| e.to_string())?;
                    for i in 1..=g {
                        let lhs = q_coeff(&p, i) * frac_int((t * d) as i128);
                        if lhs != coop_denominator(&p, i - 1) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    })());

    // end-to-end scenario ledger: repair 10 packets, upgrades 6 and 10
    check!("scenario-ledger", (|| {
        let mut src = Scenario::parse(include_str!("../scenarios/example3.scenario"))
            .map_err(|e| e.to_string())?;
        src.field = field;
        let report = run_with_seed(&src, src.seed).map_err(|e| e.to_string())?;
        let ingress: Vec<usize> = report
            .entries
            .iter()
            .map(|e| e.helper_to_engine)
            .collect();
        Ok(ingress == vec![0, 10, 6, 10, 12])
    })());

    let _ = writeln!(text, "overall: {}", if all_pass { "pass" } else { "FAIL" });
    emit(out, &text)?;
    if all_pass {
        Ok(())
    } else {
        Err(CliError::invariant("one or more checks failed"))
    }
}
