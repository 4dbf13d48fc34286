use std::io::Read;
use std::process::ExitCode;

use catbracket::kauffman::{bracket_coeff, coeff_first_row, max_cells, Convention, FirstRowMemo};
use catbracket::plucking::{coeff_no_bottom_returns, coeff_no_top_returns};
use catbracket::{Connection, FinSet, LaurentPoly, ThetaEngine, ThetaError};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod verify;

#[derive(Parser)]
#[command(name = "catbracket", version, about = "Coefficients of Catalan states of lattice crossings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the coefficient C(A) of a Catalan state.
    Coeff {
        /// State literal such as `conn nt=1 nb=1 ht=1: T1-R1, B1-L1`, or `-` for stdin.
        state: String,
        /// Number of rows; inferred from the state when omitted.
        #[arg(long)]
        m: Option<usize>,
        /// Number of columns; inferred from the state when omitted.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Run every applicable method and exit with status 3 if they disagree.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print a Theta-state expansion of a roof state.
    Expand {
        /// Roof state literal, or `-` for stdin.
        state: String,
        /// Return-index set such as `{1,3}`.
        #[arg(long, default_value = "{}")]
        set: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in verification suites.
    Verify {
        /// Largest lattice size `mn` swept by the state-based suites.
        #[arg(long, default_value_t = 12)]
        max_cells: usize,
        /// Comma-separated subset of: lattice, oracle, realizability, plucking, sets, symmetry, unimodal.
        #[arg(long, value_delimiter = ',')]
        suites: Vec<String>,
        /// Restrict sweeps to this number of rows.
        #[arg(long)]
        m: Option<usize>,
        /// Restrict sweeps to this number of columns.
        #[arg(long)]
        n: Option<usize>,
        /// State examined by the unimodal suite, or `-` for stdin.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, hide = true)]
        flip_markers: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Method {
    Brute,
    Firstrow,
    Plucking,
    Theta,
    Auto,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Firstrow => "firstrow",
            Method::Plucking => "plucking",
            Method::Theta => "theta",
            Method::Auto => "auto",
        }
    }
}

pub enum CliError {
    Input(String),
    Mismatch(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }
}

fn input(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

pub fn read_arg(s: &str) -> Result<String, CliError> {
    if s != "-" {
        return Ok(s.to_string());
    }
    let mut buf = String::new();
    std::io::stdin().read_to_string(&mut buf).map_err(input)?;
    Ok(buf.trim().to_string())
}

pub fn parse_state(s: &str) -> Result<Connection, CliError> {
    let text = read_arg(s)?;
    text.parse::<Connection>().map_err(|e| CliError::Input(format!("cannot parse state: {e}")))
}

/// Checks that the state lies in `Cat(m,n)`, filling in whichever of `m`, `n` is missing.
pub fn dims(c: &Connection, m: Option<usize>, n: Option<usize>) -> Result<(usize, usize), CliError> {
    if !c.is_catalan() {
        return Err(CliError::Input(format!("not a Catalan state: {} top points, {} bottom points", c.nt(), c.nb())));
    }
    let (m0, n0) = (c.ht(), c.nt());
    match (m, n) {
        (Some(m), _) if m != m0 => Err(CliError::Input(format!("state has {m0} rows, --m says {m}"))),
        (_, Some(n)) if n != n0 => Err(CliError::Input(format!("state has {n0} columns, --n says {n}"))),
        _ => Ok((m0, n0)),
    }
}

fn theta_err(e: ThetaError) -> CliError {
    input(e)
}

fn run_method(method: Method, c: &Connection, m: usize, n: usize) -> Result<LaurentPoly, CliError> {
    match method {
        Method::Brute => bracket_coeff(c, m, n).map_err(input),
        Method::Firstrow => coeff_first_row(c, m, n, &mut FirstRowMemo::new()).map_err(input),
        Method::Plucking => {
            if c.bottom_returns() == 0 {
                coeff_no_bottom_returns(c, m, n).map_err(input)
            } else if c.top_returns() == 0 {
                coeff_no_top_returns(c, m, n).map_err(input)
            } else {
                Err(CliError::Input("plucking needs a state without top or without bottom returns".into()))
            }
        }
        Method::Theta | Method::Auto => ThetaEngine::new().coeff_any(c, m, n).map_err(theta_err),
    }
}

fn applicable(c: &Connection, m: usize, n: usize) -> Vec<Method> {
    let mut v = Vec::new();
    if m * n <= max_cells() {
        v.push(Method::Brute);
    }
    v.push(Method::Firstrow);
    if c.bottom_returns() == 0 || c.top_returns() == 0 {
        v.push(Method::Plucking);
    }
    v.push(Method::Theta);
    v
}

fn cmd_coeff(state: &str, m: Option<usize>, n: Option<usize>, method: Method, check: bool, json: bool) -> Result<(), CliError> {
    let c = parse_state(state)?;
    let (m, n) = dims(&c, m, n)?;
    let value = run_method(method, &c, m, n)?;
    let mut others = Vec::new();
    if check {
        for k in applicable(&c, m, n).into_iter().filter(|&k| k != method) {
            others.push((k, run_method(k, &c, m, n)?));
        }
    }
    let agree = others.iter().all(|(_, v)| *v == value);
    if json {
        let checks: serde_json::Map<String, Value> = others.iter().map(|(k, v)| (k.name().to_string(), json!(v.to_string()))).collect();
        let doc = json!({
            "v": 1,
            "command": "coeff",
            "state": c.to_string(),
            "m": m,
            "n": n,
            "method": method.name(),
            "text": value.to_string(),
            "coeff": value.to_json(),
            "check": checks,
            "agree": agree,
        });
        println!("{doc}");
    } else {
        println!("{value}");
        for (k, v) in &others {
            eprintln!("{}: {v}", k.name());
        }
    }
    if agree {
        Ok(())
    } else {
        Err(CliError::Mismatch("methods disagree".into()))
    }
}

fn cmd_expand(state: &str, set: &str, json: bool) -> Result<(), CliError> {
    let r = parse_state(state)?;
    let i: FinSet = set.parse().map_err(|e| CliError::Input(format!("cannot parse set: {e}")))?;
    let e = ThetaEngine::new().expand(&r, &i).map_err(theta_err)?;
    if json {
        let mut doc = e.to_json();
        doc["v"] = json!(1);
        doc["command"] = json!("expand");
        println!("{doc}");
    } else {
        print!("{e}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Coeff { state, m, n, method, check, json } => cmd_coeff(&state, m, n, method, check, json),
        Command::Expand { state, set, json } => cmd_expand(&state, &set, json),
        Command::Verify { max_cells, suites, m, n, state, flip_markers, json } => {
            let conv = if flip_markers { Convention::Flipped } else { Convention::Standard };
            let opts = verify::Options { max_cells, suites, m, n, state, conv };
            verify::run(&opts, json)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Input(msg) => eprintln!("error: {msg}"),
                CliError::Mismatch(msg) => eprintln!("mismatch: {msg}"),
            }
            ExitCode::from(e.code())
        }
    }
}
