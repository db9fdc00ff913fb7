use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anf_sat_core::coeff::{DecideConfig, DEFAULT_FRONTIER_CAP};
use anf_sat_core::descriptor::{profile_csv, summary_csv, DEFAULT_CAP};
use anf_sat_core::falsify::{self, ClaimId, ClaimParams, GenConfig};
use anf_sat_core::oracle::{self, brute_solutions};
use anf_sat_core::*;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::result::Result;

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_CAP: u8 = 30;
const EXIT_FINDINGS: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(
    name = "anf-sat-lab",
    version,
    about = "Descriptor functions and indicator polynomials for 3-CNF"
)]
struct Cli {
    /// Worker threads (output does not depend on it).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse DIMACS and print it normalized, optionally relabeled and sorted.
    Parse {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        sort: bool,
        /// Rename variables by descending occurrence count.
        #[arg(long)]
        relabel: bool,
        #[arg(long, value_enum, default_value_t = Format::Dimacs)]
        format: Format,
    },
    /// Build the descriptor by merging sorted clauses.
    Build {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        caps: MergeCap,
        /// Write the per-step profile CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the per-variable summary CSV here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// List every solution as a `v` line.
    Enumerate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        caps: MergeCap,
        #[arg(long, default_value_t = 1 << 20, value_parser = positive)]
        max_solutions: usize,
        /// Enumerate by brute force instead of the descriptor.
        #[arg(long)]
        oracle: bool,
    },
    /// Print an indicator polynomial.
    Indicator {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        caps: MergeCap,
        #[arg(long, value_enum, default_value_t = Mode::Gf2)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Form::Clauses)]
        form: Form,
    },
    /// Coefficient of one monomial in the product of the factors.
    Coeff {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        caps: MergeCap,
        #[arg(long, value_enum, default_value_t = Mode::Gf2)]
        mode: Mode,
        /// 1-based variables of the monomial, comma separated; all variables if absent.
        #[arg(long, value_delimiter = ',')]
        delta: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_FRONTIER_CAP, value_parser = positive)]
        frontier_cap: usize,
    },
    /// Decide satisfiability assuming at most 2^k solutions.
    Decide {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        caps: MergeCap,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Mode::Gf2)]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_FRONTIER_CAP, value_parser = positive)]
        frontier_cap: usize,
    },
    /// Profile the descriptor build as CSV.
    Profile {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        caps: MergeCap,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Check the monitored claims on random instances against the oracle.
    Falsify {
        /// `all` or a comma separated list of claim ids.
        #[arg(long, default_value = "all")]
        claims: String,
        #[arg(long, default_value_t = 500, value_parser = positive)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, conflicts_with = "m")]
        ratio: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
        cap: usize,
        #[arg(long)]
        report_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// DIMACS file; stdin when absent or `-`.
    input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
struct MergeCap {
    /// Largest len(h_t) tolerated while merging.
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
    cap: usize,
}

impl MergeCap {
    fn build(self) -> BuildConfig {
        BuildConfig { cap: self.cap }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Dimacs,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Gf2,
    Int,
}

impl From<Mode> for Arith {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Gf2 => Arith::Gf2,
            Mode::Int => Arith::Int,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Form {
    /// Product of the clause factors.
    Clauses,
    /// Product of (h_i + x_i + 1) over the built descriptor.
    Descriptor,
    /// Expanded product of the per-variable factors g_t.
    Product,
    /// The sub-descriptor cells and factors g_t, one per line.
    Factors,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug)]
enum Fail {
    Usage(String),
    Io(String, io::Error),
    Input(Error),
    Cap(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceCap { .. } => Fail::Cap(e),
            e => Fail::Input(e),
        }
    }
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn read_input(input: &Input) -> Result<Formula, Fail> {
    let mut text = String::new();
    match input.input.as_deref() {
        None => io::stdin().read_to_string(&mut text).map(|_| ()),
        Some(p) if p == Path::new("-") => io::stdin().read_to_string(&mut text).map(|_| ()),
        Some(p) => std::fs::read_to_string(p).map(|t| text = t),
    }
    .map_err(|e| Fail::Io(describe(input), e))?;
    Ok(parse_dimacs(&text)?)
}

fn describe(input: &Input) -> String {
    input
        .input
        .as_ref()
        .map_or_else(|| "<stdin>".to_string(), |p| p.display().to_string())
}

fn write_file(path: &Path, body: &str) -> Result<(), Fail> {
    std::fs::write(path, body).map_err(|e| Fail::Io(path.display().to_string(), e))
}

fn json_line(v: &serde_json::Value) -> String {
    serde_json::to_string(v).expect("json values serialize") + "\n"
}

fn run(cli: Cli) -> Result<Output, Fail> {
    match cli.cmd {
        Cmd::Parse {
            input,
            sort,
            relabel,
            format,
        } => {
            let mut f = read_input(&input)?;
            let mut map: Vec<usize> = (0..f.n()).collect();
            if relabel {
                (f, map) = relabel_by_frequency(&f);
            }
            let witness: Vec<usize>;
            if sort {
                let s = sort_clauses(&f);
                witness = s.witness().to_vec();
                f = s.formula().clone();
            } else {
                witness = (0..f.m()).collect();
            }
            Ok(Output::ok(match format {
                Format::Dimacs => f.to_dimacs(),
                Format::Json => json_line(&json!({
                    "n": f.n(),
                    "m": f.m(),
                    "ratio": f.delta_f64(),
                    "clauses": f.clauses().iter().map(|c| c.to_dimacs()).collect::<Vec<_>>(),
                    "clause_origin": witness.iter().map(|w| w + 1).collect::<Vec<_>>(),
                    "variable_origin": map.iter().map(|v| v + 1).collect::<Vec<_>>(),
                })),
            }))
        }
        Cmd::Build {
            input,
            caps,
            trace,
            summary,
        } => {
            let f = read_input(&input)?;
            let b = build(&sort_clauses(&f), caps.build());
            if let Some(p) = trace {
                write_file(&p, &profile_csv(&b.trace))?;
            }
            if let Some(p) = summary {
                write_file(&p, &summary_csv(&b.trace))?;
            }
            let v = match b.result? {
                Outcome::Descriptor(h) => json!({
                    "status": "descriptor",
                    "n": h.n(),
                    "h": h.to_texts(),
                    "max_len": h.max_len(),
                }),
                Outcome::Unsat { clause_index } => json!({
                    "status": "unsat",
                    "clause": clause_index + 1,
                }),
            };
            Ok(Output::ok(json_line(&v)))
        }
        Cmd::Enumerate {
            input,
            caps,
            max_solutions,
            oracle,
        } => {
            let f = read_input(&input)?;
            let set = if oracle {
                brute_solutions(&f)?
            } else {
                match build(&sort_clauses(&f), caps.build()).result? {
                    Outcome::Descriptor(h) => list_solutions(
                        &h,
                        Caps {
                            solutions: max_solutions,
                            ..Caps::default()
                        },
                    ),
                    Outcome::Unsat { .. } => SolutionSet::from_sorted(f.n(), vec![]),
                }
            };
            let mut out = String::new();
            out.push_str(if set.is_empty() {
                "s UNSATISFIABLE\n"
            } else {
                "s SATISFIABLE\n"
            });
            out.push_str(&set.to_v_lines());
            writeln!(out, "c solutions {}", set.count()).unwrap();
            if let Some(t) = set.truncated {
                writeln!(out, "c truncated {t:?}").unwrap();
            }
            Ok(Output::ok(out))
        }
        Cmd::Indicator {
            input,
            caps,
            mode,
            form,
        } => {
            let f = read_input(&input)?;
            let mode = Arith::from(mode);
            let text = match form {
                Form::Clauses => indicator_from_clauses(&f, mode, caps.cap)?.to_text(),
                Form::Descriptor => match build(&sort_clauses(&f), caps.build()).result? {
                    Outcome::Descriptor(h) => {
                        let p = indicator_from_descriptor(&h, caps.cap)?;
                        match mode {
                            Arith::Gf2 => p.to_text('x'),
                            Arith::Int => int_lift(&p).to_text('x'),
                        }
                    }
                    Outcome::Unsat { .. } => "0".into(),
                },
                Form::Product => {
                    let fs = factor_sequence(&sort_clauses(&f), caps.build())?;
                    oracle::expand_product(&fs, mode)?.to_text()
                }
                Form::Factors => {
                    let fs = factor_sequence(&sort_clauses(&f), caps.build())?;
                    let mut s = String::new();
                    for fac in &fs.factors {
                        let t = fac.t + 1;
                        let cell = |h: Option<&AnfPoly>| {
                            h.map_or_else(|| "-".to_string(), |p| p.to_text('x'))
                        };
                        writeln!(s, "h{t}+ = {}", cell(fac.h_plus())).unwrap();
                        writeln!(s, "h{t}- = {}", cell(fac.h_minus())).unwrap();
                        writeln!(s, "g{t} = {}", fac.expanded(mode).to_text()).unwrap();
                    }
                    s.pop();
                    s
                }
            };
            Ok(Output::ok(text + "\n"))
        }
        Cmd::Coeff {
            input,
            caps,
            mode,
            delta,
            frontier_cap,
        } => {
            let f = read_input(&input)?;
            let n = f.n();
            let delta = delta.unwrap_or_else(|| (1..=n).collect());
            if let Some(&bad) = delta.iter().find(|&&v| v == 0 || v > n) {
                return Err(Fail::Input(Error::VarOutOfRange { var: bad as i64, n }));
            }
            let fs = factor_sequence(&sort_clauses(&f), caps.build())?;
            let mut eng = CoeffEngine::new(&fs, mode.into(), frontier_cap);
            let m = Monomial::from_vars(delta.iter().map(|v| v - 1));
            let c = eng.coefficient(&m)?;
            Ok(Output::ok(json_line(&json!({
                "delta": m.vars().map(|v| v + 1).collect::<Vec<_>>(),
                "mode": Arith::from(mode),
                "coefficient": c.to_string(),
                "work": eng.work(),
            }))))
        }
        Cmd::Decide {
            input,
            caps,
            k,
            mode,
            frontier_cap,
        } => {
            let f = read_input(&input)?;
            let cfg = DecideConfig {
                mode: mode.into(),
                build: caps.build(),
                frontier_cap,
            };
            match decide_sat_bounded(&f, k, cfg) {
                Ok(v) => {
                    let (line, code) = match v.verdict {
                        Verdict::Sat => ("s SATISFIABLE".to_string(), EXIT_SAT),
                        Verdict::UnsatUnderAssumption => (
                            format!("s UNSATISFIABLE (under #S<=2^{k} assumption)"),
                            EXIT_UNSAT,
                        ),
                    };
                    let body = serde_json::to_string(&v).expect("verdict serializes");
                    Ok(Output {
                        text: format!("{line}\n{body}\n"),
                        code,
                    })
                }
                Err(e @ Error::ResourceCap { .. }) => Ok(Output {
                    text: format!(
                        "s UNKNOWN\n{}",
                        json_line(
                            &json!({"verdict": "ResourceCap", "k": k, "error": e.to_string()})
                        )
                    ),
                    code: EXIT_CAP,
                }),
                Err(e) => Err(e.into()),
            }
        }
        Cmd::Profile {
            input,
            caps,
            out,
            summary,
        } => {
            let f = read_input(&input)?;
            let b = build(&sort_clauses(&f), caps.build());
            let csv = profile_csv(&b.trace);
            if let Some(p) = summary {
                write_file(&p, &summary_csv(&b.trace))?;
            }
            match out {
                Some(p) => {
                    write_file(&p, &csv)?;
                    Ok(Output::ok(String::new()))
                }
                None => Ok(Output::ok(csv)),
            }
        }
        Cmd::Falsify {
            claims,
            count,
            n,
            ratio,
            m,
            k,
            cap,
            report_dir,
        } => {
            let ids: Vec<ClaimId> = if claims == "all" {
                ClaimId::ALL.to_vec()
            } else {
                claims
                    .split(',')
                    .map(|s| {
                        ClaimId::parse(s.trim())
                            .ok_or_else(|| Fail::Usage(format!("unknown claim `{s}`")))
                    })
                    .collect::<Result<_, _>>()?
            };
            let m = m.unwrap_or_else(|| oracle::clauses_for_ratio(n, ratio.unwrap_or(4.26)));
            let inst = falsify::generate(&GenConfig {
                n,
                m,
                count,
                seed: cli.seed,
            })?;
            let boxed: Vec<_> = ids
                .iter()
                .map(|&id| falsify::builtin_claim(id, ClaimParams { k, cap }))
                .collect();
            let refs: Vec<&dyn falsify::Claim> = boxed.iter().map(|b| b.as_ref()).collect();
            let run = falsify::falsify(&refs, &inst);
            if let Some(dir) = report_dir {
                falsify::write_reports(&dir, &run.reports)
                    .map_err(|e| Fail::Io(dir.display().to_string(), e))?;
            }
            let mut out = String::new();
            for s in &run.stats {
                out.push_str(&json_line(
                    &serde_json::to_value(s).expect("stats serialize"),
                ));
            }
            for r in &run.reports {
                out.push_str(&json_line(
                    &serde_json::to_value(r).expect("report serializes"),
                ));
            }
            let code = if run.reports.is_empty() {
                0
            } else {
                EXIT_FINDINGS
            };
            Ok(Output { text: out, code })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        // A second initialization can only fail if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global();
    }
    let is_decide = matches!(cli.cmd, Cmd::Decide { .. });
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(out.text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(EXIT_IO);
            }
            ExitCode::from(out.code)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Fail::Io(what, e)) => {
            eprintln!("error: {what}: {e}");
            ExitCode::from(EXIT_IO)
        }
        Err(Fail::Cap(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_decide { EXIT_CAP } else { 1 })
        }
        Err(Fail::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
