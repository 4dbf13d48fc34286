use std::collections::HashMap;

use catbracket::finsets::{enumerate_bn, enumerate_ln, in_ln, n_min, ominus, oplus, phi, phi_inv, preceq};
use catbracket::kauffman::{coeff_first_row, coeff_table_with, enumerate_catalan, max_cells, Convention, FirstRowMemo};
use catbracket::plucking::{build_tree, coeff_no_bottom_returns, plucking_poly};
use catbracket::{unimodality, vprod, Connection, LaurentPoly, ThetaEngine};
use serde_json::{json, Value};

use crate::{dims, parse_state, CliError};

const ALL: [&str; 6] = ["lattice", "oracle", "realizability", "plucking", "sets", "symmetry"];

pub struct Options {
    pub max_cells: usize,
    pub suites: Vec<String>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub state: Option<String>,
    pub conv: Convention,
}

#[derive(Default)]
struct Report {
    passed: usize,
    failed: usize,
    notes: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.notes.len() < 5 {
                self.notes.push(what());
            }
        }
    }
}

type Table = HashMap<Connection, LaurentPoly>;

struct Ctx<'a> {
    opts: &'a Options,
    tables: HashMap<(usize, usize), Table>,
}

impl Ctx<'_> {
    fn dims(&self, cap: usize) -> Vec<(usize, usize)> {
        let cap = cap.min(self.opts.max_cells);
        let mut v = Vec::new();
        for m in 1..=cap {
            for n in 1..=cap / m {
                let wanted = self.opts.m.is_none_or(|x| x == m) && self.opts.n.is_none_or(|x| x == n);
                let pinned = self.opts.m.is_some() && self.opts.n.is_some();
                if wanted && (pinned || m + n <= 8) {
                    v.push((m, n));
                }
            }
        }
        v
    }

    fn table(&mut self, m: usize, n: usize) -> Result<&Table, CliError> {
        if !self.tables.contains_key(&(m, n)) {
            let t = coeff_table_with(m, n, self.opts.conv, max_cells().max(self.opts.max_cells))
                .map_err(|e| CliError::Input(e.to_string()))?
                .into_iter()
                .map(|(c, e)| (c, e.coeff))
                .collect();
            self.tables.insert((m, n), t);
        }
        Ok(&self.tables[&(m, n)])
    }
}

fn lattice(ctx: &mut Ctx) -> Result<Report, CliError> {
    let mut r = Report::default();
    let plus: Connection = "conn nt=1 nb=1 ht=1: T1-R1, B1-L1".parse().expect("fixture");
    let minus: Connection = "conn nt=1 nb=1 ht=1: T1-L1, B1-R1".parse().expect("fixture");
    let t = ctx.table(1, 1)?;
    let get = |c: &Connection| t.get(c).cloned().unwrap_or_else(LaurentPoly::zero);
    r.check(get(&plus) == LaurentPoly::a_pow(1), || format!("L(1,1) positive smoothing gave {}", get(&plus)));
    r.check(get(&minus) == LaurentPoly::a_pow(-1), || format!("L(1,1) negative smoothing gave {}", get(&minus)));
    let all = enumerate_catalan(2, 2);
    r.check(all.len() == 14, || format!("Cat(2,2) has {} states", all.len()));
    let t = ctx.table(2, 2)?;
    r.check(t.keys().all(|c| all.contains(c)), || "L(2,2) smoothing left Cat(2,2)".into());
    Ok(r)
}

struct Row {
    state: Connection,
    brute: LaurentPoly,
}

fn rows(ctx: &mut Ctx, cap: usize) -> Result<Vec<(usize, usize, Vec<Row>)>, CliError> {
    let mut out = Vec::new();
    for (m, n) in ctx.dims(cap) {
        let t = ctx.table(m, n)?;
        let rs = enumerate_catalan(m, n)
            .into_iter()
            .map(|c| Row { brute: t.get(&c).cloned().unwrap_or_else(LaurentPoly::zero), state: c })
            .collect();
        out.push((m, n, rs));
    }
    Ok(out)
}

fn oracle(ctx: &mut Ctx) -> Result<Report, CliError> {
    let mut r = Report::default();
    for (m, n, rs) in rows(ctx, 12)? {
        let mut memo = FirstRowMemo::new();
        let mut eng = ThetaEngine::new();
        for row in rs {
            let c = &row.state;
            let fr = coeff_first_row(c, m, n, &mut memo).map_err(|e| CliError::Input(e.to_string()))?;
            r.check(fr == row.brute, || format!("first-row {fr} vs state sum {} on {c}", row.brute));
            let th = eng.coeff_any(c, m, n).map_err(|e| CliError::Input(e.to_string()))?;
            r.check(th == row.brute, || format!("theta {th} vs state sum {} on {c}", row.brute));
            if c.bottom_returns() == 0 {
                let pl = coeff_no_bottom_returns(c, m, n).map_err(|e| CliError::Input(e.to_string()))?;
                r.check(pl == row.brute, || format!("plucking {pl} vs state sum {} on {c}", row.brute));
            }
        }
    }
    Ok(r)
}

fn realizability(ctx: &mut Ctx) -> Result<Report, CliError> {
    let mut r = Report::default();
    for (_, _, rs) in rows(ctx, 12)? {
        for row in rs {
            let c = &row.state;
            r.check(c.line_conditions_hold() != row.brute.is_zero(), || format!("line conditions disagree with C(A) = {} on {c}", row.brute));
            r.check(row.brute.is_nonneg_integral(), || format!("coefficient {} on {c}", row.brute));
        }
    }
    Ok(r)
}

fn plucking(ctx: &mut Ctx) -> Result<Report, CliError> {
    let mut r = Report::default();
    for (_, _, rs) in rows(ctx, 12)? {
        for row in rs.iter().filter(|row| row.state.bottom_returns() == 0) {
            let c = &row.state;
            let q = plucking_poly(&build_tree(c).map_err(|e| CliError::Input(e.to_string()))?);
            r.check(q.is_zero() != c.line_conditions_hold(), || format!("plucking polynomial {q} on {c}"));
        }
    }
    Ok(r)
}

fn sets() -> Report {
    let mut r = Report::default();
    for n in 0..=8 {
        let ln = enumerate_ln(n);
        for i in &ln {
            for j in &ln {
                let s = oplus(i, j);
                r.check(n_min(&s) == (n_min(i) + 2 * j.len()).max(n_min(j)), || format!("n_min({s})"));
                r.check(ominus(&s, j).ok().as_ref() == Some(i), || format!("({i} + {j}) - {j}"));
                r.check(preceq(j, &s), || format!("{j} not below {s}"));
                if n >= 2 * j.len() && in_ln(i, n - 2 * j.len()) {
                    let lhs = phi_inv(&s, n).ok();
                    let rhs = vprod(&phi_inv(i, n - 2 * j.len()).unwrap(), &phi_inv(j, n).unwrap()).map(|x| x.0);
                    r.check(lhs == rhs, || format!("factorization of {s} at n={n}"));
                }
            }
        }
    }
    for n in 0..=10 {
        let bn = enumerate_bn(n);
        let binom = (0..n / 2).fold(1u64, |acc, t| acc * (n - t) as u64 / (t + 1) as u64);
        r.check(bn.len() as u64 == binom, || format!("|B_{n}| = {}", bn.len()));
        for f in bn {
            r.check(phi_inv(&phi(&f), n).ok() == Some(f.clone()), || format!("phi round trip on {f}"));
        }
    }
    r
}

fn symmetry(ctx: &mut Ctx) -> Result<Report, CliError> {
    let mut r = Report::default();
    for (m, n) in ctx.dims(9) {
        let t = ctx.table(m, n)?;
        let get = |c: &Connection| t.get(c).cloned().unwrap_or_else(LaurentPoly::zero);
        for c in enumerate_catalan(m, n) {
            let base = get(&c);
            r.check(get(&c.reflect()) == base.invert_variable(), || format!("reflection of {c}"));
            r.check(get(&c.rotate()) == base, || format!("rotation of {c}"));
        }
    }
    Ok(r)
}

fn unimodal(opts: &Options) -> Result<Report, CliError> {
    let Some(s) = &opts.state else {
        return Err(CliError::Input("the unimodal suite needs --state".into()));
    };
    let c = parse_state(s)?;
    let (m, n) = dims(&c, opts.m, opts.n)?;
    let value = ThetaEngine::new().coeff_any(&c, m, n).map_err(|e| CliError::Input(e.to_string()))?;
    let (seq, ok) = unimodality(&value);
    let seq: Vec<String> = seq.iter().map(|x| x.to_string()).collect();
    let mut r = Report { passed: 1, ..Report::default() };
    r.notes.push(format!("C(A) = {value}"));
    r.notes.push(format!("{}unimodal, sequence {}", if ok { "" } else { "non-" }, seq.join(",")));
    Ok(r)
}

pub fn run(opts: &Options, json: bool) -> Result<(), CliError> {
    let mut names: Vec<String> = if opts.suites.is_empty() {
        let mut v: Vec<String> = ALL.iter().map(|s| s.to_string()).collect();
        if opts.state.is_some() {
            v.push("unimodal".into());
        }
        v
    } else {
        opts.suites.clone()
    };
    names.dedup();
    let mut ctx = Ctx { opts, tables: HashMap::new() };
    let mut out = Vec::new();
    for name in &names {
        let report = match name.as_str() {
            "lattice" => lattice(&mut ctx)?,
            "oracle" => oracle(&mut ctx)?,
            "realizability" => realizability(&mut ctx)?,
            "plucking" => plucking(&mut ctx)?,
            "sets" => sets(),
            "symmetry" => symmetry(&mut ctx)?,
            "unimodal" => unimodal(opts)?,
            other => return Err(CliError::Input(format!("unknown suite `{other}`"))),
        };
        out.push((name.clone(), report));
    }
    let failed = out.iter().any(|(_, r)| r.failed > 0);
    if json {
        let suites: Vec<Value> = out
            .iter()
            .map(|(name, r)| json!({"name": name, "passed": r.passed, "failed": r.failed, "notes": r.notes}))
            .collect();
        println!("{}", json!({"v": 1, "command": "verify", "suites": suites, "ok": !failed}));
    } else {
        for (name, r) in &out {
            let status = if r.failed == 0 { "ok" } else { "FAILED" };
            println!("{name}: {} passed, {} failed [{status}]", r.passed, r.failed);
            for note in &r.notes {
                println!("  {note}");
            }
        }
    }
    if failed {
        Err(CliError::Mismatch("verification failed".into()))
    } else {
        Ok(())
    }
}
