//! Theta-state expansions: the relation `⊴`, first-row expansions, the special
//! states `R_{n,k}`, `R'_{n,k,l}`, `R''_{n,k,l}`, `M_{n,k}`, `T_{n,j,u}`, the
//! recursive expansion procedure, and coefficients of arbitrary Catalan states.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::exact_arith::{rf_to_laurent, ArithError, LaurentPoly, RationalFn};
use crate::finsets::{enumerate_h, enumerate_ln, in_ln, ominus, oplus, phi, phi_inv, preceq, psi_inv, FinSet};
use crate::planar::{bottom_quotient, top_row_quotient, vprod, Connection, Extended, Point};
use crate::plucking::{coeff_no_top_returns, PluckingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThetaError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("transform precondition failed: {0}")]
    ModePrecondition(String),
    #[error("not a roof state")]
    NotRoof,
    #[error("not a top state")]
    NotTopState,
    #[error("state is not in Cat({m},{n})")]
    NotCatalan { m: usize, n: usize },
    #[error(transparent)]
    Plucking(#[from] PluckingError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A pair `(R, I)` of a roof state and a return-index set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WPair {
    pub state: Connection,
    pub set: FinSet,
}

impl WPair {
    pub fn new(state: Connection, set: FinSet) -> Self {
        Self { state, set }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThetaTerm {
    pub coeff: RationalFn,
    pub state: Connection,
    pub set: FinSet,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThetaExpansion {
    pub source: WPair,
    pub terms: Vec<ThetaTerm>,
}

type Terms = BTreeMap<(Connection, FinSet), RationalFn>;

fn add_scaled(acc: &mut Terms, src: &Terms, c: &RationalFn) {
    for (key, q) in src {
        let e = acc.entry(key.clone()).or_insert_with(RationalFn::zero);
        *e += &(q * c);
    }
}

fn prune(mut t: Terms) -> Terms {
    t.retain(|_, q| !q.is_zero());
    t
}

fn single(state: Connection, set: FinSet) -> Terms {
    let mut t = Terms::new();
    t.insert((state, set), RationalFn::one());
    t
}

fn a_pow(e: i64) -> RationalFn {
    RationalFn::from(LaurentPoly::a_pow(e))
}

impl ThetaExpansion {
    fn from_terms(source: WPair, t: Terms) -> Self {
        let mut terms: Vec<ThetaTerm> = prune(t)
            .into_iter()
            .map(|((state, set), coeff)| ThetaTerm { coeff, state, set })
            .collect();
        terms.sort_by_cached_key(|t| (t.state.to_string(), t.set.clone()));
        Self { source, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// All terms are middle states, dominate the source, and have nonzero coefficients.
    pub fn is_final(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.state.is_middle() && !t.coeff.is_zero() && triangle_leq(&self.source, &WPair::new(t.state.clone(), t.set.clone())))
    }

    /// `sum Q * Theta(R', I'; F)` with the given bracket for the inner Catalan states.
    pub fn evaluate(&self, f: &Extended, bracket: &mut dyn FnMut(&Connection) -> LaurentPoly) -> RationalFn {
        let mut acc = RationalFn::zero();
        for t in &self.terms {
            let v = theta_eval_with(&t.state, &t.set, f, bracket);
            if !v.is_zero() {
                acc += &t.coeff.mul_poly(&v);
            }
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": {"state": self.source.state.to_string(), "set": self.source.set.to_string()},
            "terms": self.terms.iter().map(|t| json!({
                "coeff": t.coeff.to_json(),
                "state": t.state.to_string(),
                "set": t.set.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for ThetaExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for t in &self.terms {
            writeln!(f, "{} * Theta({}, {})", t.coeff, t.state, t.set)?;
        }
        Ok(())
    }
}

/// `(R, I) ⊴ (R', I')`.
pub fn triangle_leq(a: &WPair, b: &WPair) -> bool {
    let (r, r2) = (&a.state, &b.state);
    if r.nt() + 2 * a.set.len() != r2.nt() + 2 * b.set.len() || r.nb() != r2.nb() {
        return false;
    }
    if !preceq(&a.set, &b.set) {
        return false;
    }
    match ominus(&b.set, &a.set) {
        Ok(d) => in_ln(&d, r.nt()),
        Err(_) => false,
    }
}

/// `Theta(R, I; F) = [[R *_v F_I]]`, zero when the product is `K0` or not Catalan.
pub fn theta_eval_with(r: &Connection, i: &FinSet, f: &Extended, bracket: &mut dyn FnMut(&Connection) -> LaurentPoly) -> LaurentPoly {
    let Some(f) = f.conn() else {
        return LaurentPoly::zero();
    };
    let Some(fi) = bottom_quotient(f, i) else {
        return LaurentPoly::zero();
    };
    match vprod(r, &fi) {
        Some((c, 0)) if c.is_catalan() => bracket(&c),
        _ => LaurentPoly::zero(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpecialState {
    Rnk { n: usize, k: usize },
    RPrime { n: usize, k: usize, l: usize },
    RDouble { n: usize, k: usize, l: usize },
    Mnk { n: usize, k: usize },
    Tnju { n: usize, j: usize, u: usize },
}

pub fn special_state(kind: SpecialState) -> Result<Connection, ThetaError> {
    match kind {
        SpecialState::Rnk { n, k } => r_nk(n, k),
        SpecialState::RPrime { n, k, l } => r_prime(n, k, l),
        SpecialState::RDouble { n, k, l } => r_double(n, k, l),
        SpecialState::Mnk { n, k } => m_nk(n, k),
        SpecialState::Tnju { n, j, u } => t_nju(n, j, u),
    }
}

fn bad(msg: String) -> ThetaError {
    ThetaError::BadParams(msg)
}

/// Middle state of height `n`: the first `n - k` top points run to the left side,
/// the last `k` to the right side, the remaining side points pair across or drop to the bottom corner.
pub fn r_nk(n: usize, k: usize) -> Result<Connection, ThetaError> {
    if k > n {
        return Err(bad(format!("R_{{n,k}} needs k <= n, got n={n} k={k}")));
    }
    let mut arcs = Vec::new();
    for i in 1..=n - k {
        arcs.push((Point::Top(i), Point::Left(i)));
    }
    for i in 1..=k {
        arcs.push((Point::Top(n + 1 - i), Point::Right(i)));
    }
    let across = k.min(n - k);
    for i in 1..=across {
        arcs.push((Point::Left(n - k + i), Point::Right(k + i)));
    }
    let nb = n.abs_diff(2 * k);
    if 2 * k < n {
        for t in 1..=nb {
            arcs.push((Point::Right(2 * k + t), Point::Bottom(t)));
        }
    } else {
        for t in 1..=nb {
            arcs.push((Point::Left(2 * (n - k) + t), Point::Bottom(nb + 1 - t)));
        }
    }
    Ok(Connection::from_points(n, nb, n, &arcs).expect("R_{n,k} is planar"))
}

/// Top state with `min(K, N-K)` nested caps around `e_K` where `N = n - 2l`, `K = k - l`.
pub fn r_prime(n: usize, k: usize, l: usize) -> Result<Connection, ThetaError> {
    if k > n || l > k.min(n - k) {
        return Err(bad(format!("R'_{{n,k,l}} needs k <= n and l <= min(k, n-k), got n={n} k={k} l={l}")));
    }
    let (big_n, big_k) = (n - 2 * l, k - l);
    Ok(nested_caps(big_n, big_k, big_k.min(big_n - big_k)))
}

fn nested_caps(n: usize, j: usize, u: usize) -> Connection {
    let mut arcs = Vec::new();
    let mut capped = vec![false; n + 1];
    for t in 1..=u {
        arcs.push((Point::Top(j + 1 - t), Point::Top(j + t)));
        capped[j + 1 - t] = true;
        capped[j + t] = true;
    }
    let mut b = 0;
    for (x, _) in capped.iter().enumerate().skip(1).filter(|(_, &c)| !c) {
        b += 1;
        arcs.push((Point::Top(x), Point::Bottom(b)));
    }
    Connection::from_points(n, b, 0, &arcs).expect("nested caps are planar")
}

/// Middle state with `n - 2k` top points: the `k` bottom points at each corner run to the sides.
pub fn m_nk(n: usize, k: usize) -> Result<Connection, ThetaError> {
    if 2 * k > n {
        return Err(bad(format!("M_{{n,k}} needs 2k <= n, got n={n} k={k}")));
    }
    let mut arcs = Vec::new();
    for i in 1..=k {
        arcs.push((Point::Bottom(i), Point::Left(k + 1 - i)));
        arcs.push((Point::Bottom(n + 1 - i), Point::Right(k + 1 - i)));
    }
    for i in 1..=n - 2 * k {
        arcs.push((Point::Top(i), Point::Bottom(k + i)));
    }
    Ok(Connection::from_points(n - 2 * k, n, k, &arcs).expect("M_{n,k} is planar"))
}

/// `R_{n,k} *_v M_{n-2l, min(k,n-k)-l}`.
pub fn r_double(n: usize, k: usize, l: usize) -> Result<Connection, ThetaError> {
    if k > n || l > k.min(n - k) {
        return Err(bad(format!("R''_{{n,k,l}} needs k <= n and l <= min(k, n-k), got n={n} k={k} l={l}")));
    }
    let kp = k.min(n - k);
    let top = r_nk(n, k)?;
    let mid = m_nk(n - 2 * l, kp - l)?;
    Ok(vprod(&top, &mid).expect("arities agree").0)
}

/// Top state with `u` nested caps around `e_j`.
pub fn t_nju(n: usize, j: usize, u: usize) -> Result<Connection, ThetaError> {
    if j == 0 || j >= n || u == 0 || u > j.min(n - j) {
        return Err(bad(format!("T_{{n,j,u}} needs 1 <= j < n and 1 <= u <= min(j, n-j), got n={n} j={j} u={u}")));
    }
    Ok(nested_caps(n, j, u))
}

/// The termination measure of a top state.
pub fn q_measure(r: &Connection) -> Result<usize, ThetaError> {
    if r.ht() != 0 || !r.is_roof() {
        return Err(ThetaError::NotTopState);
    }
    let n = r.nt();
    let js = r.arcs_j();
    let Some(j) = js.smallest() else {
        return Ok(0);
    };
    let u = phi(&r.flip()).iter().filter(|&&i| i <= j).count();
    let v = js.iter().copied().chain(std::iter::once(n)).filter(|&x| x != j).min().unwrap_or(n);
    Ok(j.min(n - j) + n - u - v)
}

/// First-row expansion of `(R, I~)` over `H(R)`, like terms collected.
pub fn first_row_expansion(r: &Connection, tilde: &FinSet) -> Result<ThetaExpansion, ThetaError> {
    if !r.is_roof() {
        return Err(ThetaError::NotRoof);
    }
    if r.ht() == 0 {
        return Err(bad("first-row expansion needs ht >= 1".into()));
    }
    let n = r.nt();
    let mut t = Terms::new();
    for pair in enumerate_h(r) {
        let Some(rj) = top_row_quotient(r, &pair.j) else { continue };
        let key = (rj, oplus(&pair.i, tilde));
        let e = t.entry(key).or_insert_with(RationalFn::zero);
        *e += &a_pow(pair.weight_exponent(n));
    }
    Ok(ThetaExpansion::from_terms(WPair::new(r.clone(), tilde.clone()), t))
}

#[derive(Clone, Debug)]
pub enum Transform {
    Shift(FinSet),
    AppendMiddle(Connection),
    Reflect,
}

/// Shifts, extends by a middle state, or reflects an expansion, after dropping terms not above the source.
pub fn expansion_transform(e: &ThetaExpansion, mode: &Transform) -> Result<ThetaExpansion, ThetaError> {
    let kept = e.terms.iter().filter(|t| triangle_leq(&e.source, &WPair::new(t.state.clone(), t.set.clone())));
    let src = &e.source;
    let mut out = Terms::new();
    let source = match mode {
        Transform::Shift(j) => {
            for t in kept {
                *out.entry((t.state.clone(), oplus(&t.set, j))).or_insert_with(RationalFn::zero) += &t.coeff;
            }
            WPair::new(src.state.clone(), oplus(&src.set, j))
        }
        Transform::AppendMiddle(m) => {
            if !m.is_middle() || m.nt() != src.state.nb() {
                return Err(ThetaError::ModePrecondition("need a middle state whose top matches the source bottom".into()));
            }
            for t in kept {
                let (c, _) = vprod(&t.state, m).expect("dominating terms share the bottom arity");
                *out.entry((c, t.set.clone())).or_insert_with(RationalFn::zero) += &t.coeff;
            }
            WPair::new(vprod(&src.state, m).expect("arities agree").0, src.set.clone())
        }
        Transform::Reflect => {
            if !src.set.is_empty() {
                return Err(ThetaError::ModePrecondition("reflection needs an empty source set".into()));
            }
            let n = src.state.nt();
            for t in kept {
                let f = phi_inv(&t.set, n).expect("dominating sets lie in L_n");
                let key = (t.state.reflect(), phi(&f.reflect()));
                *out.entry(key).or_insert_with(RationalFn::zero) += &t.coeff.invert_variable();
            }
            WPair::new(src.state.reflect(), FinSet::empty())
        }
    };
    Ok(ThetaExpansion::from_terms(source, out))
}

/// Memo tables shared across expansions, `Z` values, and inner brackets.
#[derive(Default)]
pub struct ThetaEngine {
    expansions: HashMap<(Connection, FinSet), Terms>,
    z: HashMap<(usize, usize, FinSet), LaurentPoly>,
    brackets: HashMap<Connection, LaurentPoly>,
}

impl ThetaEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Coefficient of a Catalan state without top returns, cached.
    pub fn no_top_bracket(&mut self, c: &Connection) -> Result<LaurentPoly, ThetaError> {
        if let Some(v) = self.brackets.get(c) {
            return Ok(v.clone());
        }
        let v = coeff_no_top_returns(c, c.ht(), c.nt())?;
        self.brackets.insert(c.clone(), v.clone());
        Ok(v)
    }

    /// `Z_{R'_{n,k,|I|}, I} = A^{(n-2k)(k'-|I|)} [[R''_{n,k,|I|} *_v phi_n^{-1}(I)]]`.
    pub fn z_coeff(&mut self, n: usize, k: usize, i: &FinSet) -> Result<LaurentPoly, ThetaError> {
        let key = (n, k, i.clone());
        if let Some(v) = self.z.get(&key) {
            return Ok(v.clone());
        }
        if k > n {
            return Err(bad(format!("Z needs k <= n, got n={n} k={k}")));
        }
        let kp = k.min(n - k);
        if !in_ln(i, n) || i.len() > kp {
            return Err(bad(format!("Z needs I in L_{n} with |I| <= {kp}, got {i}")));
        }
        let top = r_double(n, k, i.len())?;
        let f = phi_inv(i, n).expect("checked membership");
        let (c, _) = vprod(&top, &f).expect("arities agree");
        let inner = self.no_top_bracket(&c)?;
        let e = (n as i64 - 2 * k as i64) * (kp - i.len()) as i64;
        let v = inner.shift(e);
        self.z.insert(key, v.clone());
        Ok(v)
    }

    /// The expansion of `(R_{n,k}, ∅)` over `(R'_{n,k,|I|}, I)`.
    pub fn rnk_expansion(&mut self, n: usize, k: usize) -> Result<ThetaExpansion, ThetaError> {
        let source = WPair::new(r_nk(n, k)?, FinSet::empty());
        let kp = k.min(n - k);
        let mut t = Terms::new();
        for i in enumerate_ln(n).into_iter().filter(|i| i.len() <= kp) {
            let z = self.z_coeff(n, k, &i)?;
            t.insert((r_prime(n, k, i.len())?, i), RationalFn::from(z));
        }
        Ok(ThetaExpansion::from_terms(source, t))
    }

    /// Theta-state expansion of `(R, I)`.
    pub fn expand(&mut self, r: &Connection, i: &FinSet) -> Result<ThetaExpansion, ThetaError> {
        let t = self.theta_rec(r, i)?;
        Ok(ThetaExpansion::from_terms(WPair::new(r.clone(), i.clone()), t))
    }

    fn theta_rec(&mut self, r: &Connection, i: &FinSet) -> Result<Terms, ThetaError> {
        if !r.is_roof() {
            return Err(ThetaError::NotRoof);
        }
        let key = (r.clone(), i.clone());
        if let Some(t) = self.expansions.get(&key) {
            return Ok(t.clone());
        }
        let t = prune(self.theta_step(r, i)?);
        self.expansions.insert(key, t.clone());
        Ok(t)
    }

    fn theta_step(&mut self, r: &Connection, i: &FinSet) -> Result<Terms, ThetaError> {
        let n = r.nt();
        if !r.horizontal_conditions_hold() {
            return Ok(Terms::new());
        }
        if r.is_middle() {
            return Ok(single(r.clone(), i.clone()));
        }
        if r.ht() > 0 {
            let (top, m) = r.split(0);
            let sub = self.theta_rec(&top, i)?;
            let mut out = Terms::new();
            for ((state, set), q) in sub {
                let (c, _) = vprod(&state, &m).expect("bottom arity is preserved");
                *out.entry((c, set)).or_insert_with(RationalFn::zero) += &q;
            }
            return Ok(out);
        }
        let j = r.arcs_j().smallest().expect("a top state with returns has an innermost cap");
        let mut sum = Terms::new();
        if *r == r_prime(n, j, 0)? {
            sum.insert((r_nk(n, j)?, i.clone()), RationalFn::one());
            let kp = j.min(n - j);
            for ip in enumerate_ln(n).into_iter().filter(|s| !s.is_empty() && s.len() <= kp) {
                let z = RationalFn::from(self.z_coeff(n, j, &ip)?);
                let sub = self.theta_rec(&r_prime(n, j, ip.len())?, &oplus(&ip, i))?;
                add_scaled(&mut sum, &sub, &-z);
            }
            let z0 = RationalFn::from(self.z_coeff(n, j, &FinSet::empty())?).recip()?;
            let mut out = Terms::new();
            add_scaled(&mut out, &sum, &z0);
            return Ok(out);
        }
        let row = psi_inv(&FinSet::singleton(j), n).expect("single cap row");
        let (rt, _) = vprod(&row, r).expect("row bottom matches top");
        add_scaled(&mut sum, &self.theta_rec(&rt, i)?, &RationalFn::one());
        let skip = FinSet::singleton(j);
        for pair in enumerate_h(&rt) {
            if pair.j == skip && pair.i.is_empty() {
                continue;
            }
            let Some(rj) = top_row_quotient(&rt, &pair.j) else { continue };
            let sub = self.theta_rec(&rj, &oplus(&pair.i, i))?;
            add_scaled(&mut sum, &sub, &-a_pow(pair.weight_exponent(n)));
        }
        let mut out = Terms::new();
        add_scaled(&mut out, &sum, &a_pow(n as i64 - 2 * j as i64));
        Ok(out)
    }

    /// The chain-sum expansion of `(T_{n,j,u}, ∅)`.
    pub fn tnju_expansion(&mut self, n: usize, j: usize, u: usize) -> Result<ThetaExpansion, ThetaError> {
        let source = WPair::new(t_nju(n, j, u)?, FinSet::empty());
        let d = j.min(n - j) - u;
        let sets: Vec<FinSet> = enumerate_ln(n).into_iter().filter(|s| s.len() <= u).collect();
        let mut chains = Vec::new();
        let mut stack = vec![vec![FinSet::empty()]];
        while let Some(c) = stack.pop() {
            let last = c.last().expect("chains are nonempty").clone();
            for s in sets.iter().filter(|s| s.len() > last.len() && preceq(&last, s)) {
                let mut next = c.clone();
                next.push(s.clone());
                stack.push(next);
            }
            chains.push(c);
        }
        let mid = m_nk(n - 2 * u, d)?;
        let scale = a_pow((n as i64 - 2 * j as i64) * d as i64);
        let mut t = Terms::new();
        for c in chains {
            let ic = c.last().expect("nonempty").clone();
            let (nc, jc) = (n - 2 * ic.len(), j - ic.len());
            let mut pi = RationalFn::from(self.z_coeff(nc, jc, &FinSet::empty())?).recip()?;
            for w in c.windows(2) {
                let (ni, ji) = (n - 2 * w[0].len(), j - w[0].len());
                let diff = ominus(&w[1], &w[0]).expect("chain steps are comparable");
                let num = RationalFn::from(self.z_coeff(ni, ji, &diff)?);
                let den = RationalFn::from(self.z_coeff(ni, ji, &FinSet::empty())?);
                pi = &pi * &-(num.div(&den)?);
            }
            let (state, _) = vprod(&r_nk(nc, jc)?, &mid).expect("arities agree");
            *t.entry((state, ic)).or_insert_with(RationalFn::zero) += &(&pi * &scale);
        }
        Ok(ThetaExpansion::from_terms(source, t))
    }

    /// `Theta(R, I; F)` with inner brackets by the closed formula or, failing that, this pipeline.
    pub fn theta_eval(&mut self, r: &Connection, i: &FinSet, f: &Extended) -> Result<LaurentPoly, ThetaError> {
        let Some(f) = f.conn() else {
            return Ok(LaurentPoly::zero());
        };
        let Some(fi) = bottom_quotient(f, i) else {
            return Ok(LaurentPoly::zero());
        };
        match vprod(r, &fi) {
            Some((c, 0)) if c.is_catalan() => {
                let (m, n) = (c.ht(), c.nt());
                self.coeff_any(&c, m, n)
            }
            _ => Ok(LaurentPoly::zero()),
        }
    }

    /// `C(A)` for any Catalan state: cut off the top row of points, expand, and evaluate.
    pub fn coeff_any(&mut self, c: &Connection, m: usize, n: usize) -> Result<LaurentPoly, ThetaError> {
        if !c.is_catalan() || c.ht() != m || c.nt() != n {
            return Err(ThetaError::NotCatalan { m, n });
        }
        if m == 0 {
            return Ok(if *c == Connection::identity(n) { LaurentPoly::one() } else { LaurentPoly::zero() });
        }
        if c.top_returns() == 0 {
            return self.no_top_bracket(c);
        }
        if c.bottom_returns() == 0 {
            return Ok(crate::plucking::coeff_no_bottom_returns(c, m, n)?);
        }
        let (r, f) = c.split(0);
        let e = self.expand(&r, &FinSet::empty())?;
        let mut acc = RationalFn::zero();
        for t in &e.terms {
            let Some(fi) = bottom_quotient(&f, &t.set) else { continue };
            let Some((inner, 0)) = vprod(&t.state, &fi) else { continue };
            if !inner.is_catalan() {
                continue;
            }
            let v = self.no_top_bracket(&inner)?;
            if !v.is_zero() {
                acc += &t.coeff.mul_poly(&v);
            }
        }
        Ok(rf_to_laurent(&acc)?)
    }
}

pub fn theta_expand(r: &Connection, i: &FinSet) -> Result<ThetaExpansion, ThetaError> {
    ThetaEngine::new().expand(r, i)
}

pub fn z_coeff(n: usize, k: usize, i: &FinSet) -> Result<LaurentPoly, ThetaError> {
    ThetaEngine::new().z_coeff(n, k, i)
}

pub fn rnk_expansion(n: usize, k: usize) -> Result<ThetaExpansion, ThetaError> {
    ThetaEngine::new().rnk_expansion(n, k)
}

pub fn tnju_expansion(n: usize, j: usize, u: usize) -> Result<ThetaExpansion, ThetaError> {
    ThetaEngine::new().tnju_expansion(n, j, u)
}

pub fn coeff_any(c: &Connection, m: usize, n: usize) -> Result<LaurentPoly, ThetaError> {
    ThetaEngine::new().coeff_any(c, m, n)
}

pub fn theta_eval(r: &Connection, i: &FinSet, f: &Extended) -> Result<LaurentPoly, ThetaError> {
    ThetaEngine::new().theta_eval(r, i, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kauffman::bracket_coeff;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn set(s: &str) -> FinSet {
        s.parse().unwrap()
    }

    #[test]
    fn z_values_n3() {
        let cases = [
            (1, "{}", "A^-7 + A^-3 + A"),
            (1, "{1}", "A^-5 + A^-1"),
            (1, "{2}", "A^-3"),
            (2, "{}", "A^-1 + A^3 + A^7"),
            (2, "{1}", "A^3"),
            (2, "{2}", "A + A^5"),
        ];
        for (k, i, want) in cases {
            assert_eq!(z_coeff(3, k, &set(i)).unwrap(), p(want), "k={k} I={i}");
        }
    }

    #[test]
    fn z_values_n5() {
        assert_eq!(z_coeff(5, 1, &set("{}")).unwrap(), p("A^-23 + A^-19 + A^-15 + A^-11 + A^-7"));
        assert_eq!(z_coeff(5, 1, &set("{4}")).unwrap(), p("A^-15"));
    }

    #[test]
    fn special_state_identities() {
        assert_eq!(r_prime(4, 2, 1).unwrap(), r_prime(2, 1, 0).unwrap());
        assert_eq!(r_prime(4, 2, 2).unwrap(), Connection::empty());
        assert_eq!(r_prime(2, 1, 1).unwrap(), r_nk(0, 0).unwrap());
        let m = m_nk(2, 1).unwrap().rotate();
        assert_eq!(vprod(&r_prime(4, 1, 1).unwrap(), &m).unwrap().0, m);
        for n in 0..=6 {
            for k in 0..=n {
                let r = r_nk(n, k).unwrap();
                assert!(r.is_middle() && r.ht() == n && r.nb() == n.abs_diff(2 * k), "{r}");
                for l in 0..=k.min(n - k) {
                    let rp = r_prime(n, k, l).unwrap();
                    assert_eq!((rp.nt(), rp.ht(), rp.nb()), (n - 2 * l, 0, n.abs_diff(2 * k)));
                    assert!(r_double(n, k, l).unwrap().is_middle());
                }
            }
        }
        assert!(r_nk(2, 3).is_err());
        assert!(t_nju(4, 2, 3).is_err());
    }

    #[test]
    fn measure() {
        assert_eq!(q_measure(&Connection::identity(4)).unwrap(), 0);
        for n in 2..=6 {
            for j in 1..n {
                assert_eq!(q_measure(&r_prime(n, j, 0).unwrap()).unwrap(), 0);
            }
        }
        assert!(q_measure(&r_nk(2, 1).unwrap()).is_err());
    }

    fn two_caps() -> Connection {
        "conn nt=4 nb=0 ht=0: T1-T2, T3-T4".parse().unwrap()
    }

    fn example_floor() -> Connection {
        "conn nt=0 nb=4 ht=5: R1-R2, R3-L5, R4-R5, B4-B3, B2-B1, L4-L1, L3-L2".parse().unwrap()
    }

    #[test]
    fn two_caps_expansion() {
        let e = theta_expand(&two_caps(), &FinSet::empty()).unwrap();
        assert!(e.is_final());
        assert_eq!(e.terms.len(), 10);
        let lead = e.terms.iter().find(|t| t.set.is_empty() && t.state.ht() == 5).unwrap();
        let q4 = crate::exact_arith::qint(4).unwrap();
        assert_eq!(lead.coeff, crate::exact_arith::rf_make(&LaurentPoly::a_pow(16), &q4).unwrap());
        let c = vprod(&two_caps(), &example_floor()).unwrap().0;
        let want = p("A^-8 + 4*A^-4 + 4 + A^4");
        assert_eq!(bracket_coeff(&c, 5, 4).unwrap(), want);
        assert_eq!(coeff_any(&c, 5, 4).unwrap(), want);
    }

    fn example_nonunimodal() -> Connection {
        "conn nt=5 nb=5 ht=9: T1-T2, T3-L3, T4-L4, T5-R1, R2-L7, R3-L8, R4-R5, R6-B2, R7-B3, R8-R9, B5-B4, B1-L9, L6-L5, L2-L1"
            .parse()
            .unwrap()
    }

    #[test]
    fn nonunimodal_state() {
        let c = example_nonunimodal();
        let want = p("A^-37 + 2*A^-33 + 3*A^-29 + 7*A^-25 + 8*A^-21 + 7*A^-17 + 9*A^-13 + 5*A^-9 + A^-5");
        assert_eq!(coeff_any(&c, 9, 5).unwrap(), want);
        let mut memo = crate::kauffman::FirstRowMemo::new();
        assert_eq!(crate::kauffman::coeff_first_row(&c, 9, 5, &mut memo).unwrap(), want);
        assert!(!crate::exact_arith::unimodality(&want).1);
        let (top, f) = c.split(0);
        assert_eq!(top, r_prime(5, 1, 0).unwrap());
        let fe = Extended::Conn(f.clone());
        let mut eng = ThetaEngine::new();
        let base = p("A^-12 + A^-8 + A^-4 + 2 + A^4");
        assert_eq!(eng.theta_eval(&r_nk(5, 1).unwrap(), &set("{}"), &fe).unwrap(), base.pow(3).shift(-24));
        assert_eq!(eng.theta_eval(&r_prime(5, 1, 1).unwrap(), &set("{4}"), &fe).unwrap(), p("A^-9"));
        for i in enumerate_ln(5) {
            let alive = bottom_quotient(&f, &i).is_some();
            assert_eq!(alive, i.is_empty() || i == set("{4}"), "{i}");
        }
    }

    fn brute(c: &Connection) -> LaurentPoly {
        bracket_coeff(c, c.ht(), c.nt()).unwrap()
    }

    /// Checks `sum Q Theta(R', I'; F) = Theta(R, I; F)` over every floor up to the given height.
    fn assert_sound(e: &ThetaExpansion, max_ht: usize) {
        let mut memo = crate::kauffman::FirstRowMemo::new();
        let mut fr = |c: &Connection| crate::kauffman::coeff_first_row(c, c.ht(), c.nt(), &mut memo).unwrap();
        let (r, i) = (&e.source.state, &e.source.set);
        let nb = r.nt() + 2 * i.len();
        for h in 0..=max_ht {
            for f in crate::planar::enumerate_connections(r.nb(), nb, h) {
                if !f.is_floor() {
                    continue;
                }
                let fe = Extended::Conn(f.clone());
                let lhs = rf_to_laurent(&e.evaluate(&fe, &mut fr)).unwrap();
                let rhs = theta_eval_with(r, i, &fe, &mut brute);
                assert_eq!(lhs, rhs, "source {r} {i}, floor {f}");
            }
        }
    }

    #[test]
    fn expansions_are_sound_for_small_roofs() {
        let mut eng = ThetaEngine::new();
        for nt in 1..=4 {
            for nb in 0..=nt {
                for ht in 0..=2 {
                    for r in crate::planar::enumerate_connections(nt, nb, ht) {
                        if !r.is_roof() {
                            continue;
                        }
                        let e = eng.expand(&r, &FinSet::empty()).unwrap();
                        assert!(e.terms.iter().all(|t| t.state.is_middle()), "{r}");
                        assert_sound(&e, 2.min((12 / nt).saturating_sub(ht)));
                    }
                }
            }
        }
    }

    #[test]
    fn expansions_with_nonempty_sets() {
        let r: Connection = "conn nt=2 nb=0 ht=0: T1-T2".parse().unwrap();
        for i in ["{1}", "{2}", "{3}"] {
            let e = theta_expand(&r, &set(i)).unwrap();
            assert!(e.is_final());
            assert_sound(&e, 2);
        }
    }

    #[test]
    fn first_row_expansions_are_sound() {
        for r in crate::planar::enumerate_connections(3, 1, 1).into_iter().filter(|r| r.is_roof()) {
            let e = first_row_expansion(&r, &FinSet::empty()).unwrap();
            assert_sound(&e, 2);
        }
        assert!(first_row_expansion(&two_caps(), &FinSet::empty()).is_err());
    }

    #[test]
    fn rnk_expansion_n3() {
        for k in 1..=2 {
            let e = rnk_expansion(3, k).unwrap();
            assert_eq!(e.terms.len(), 3);
            for t in &e.terms {
                assert_eq!(t.state, r_prime(3, k, t.set.len()).unwrap());
                assert_eq!(t.coeff, RationalFn::from(z_coeff(3, k, &t.set).unwrap()));
            }
            assert_sound(&e, 2);
        }
    }

    #[test]
    fn tnju_agrees_with_recursion() {
        let mut eng = ThetaEngine::new();
        let mut memo = crate::kauffman::FirstRowMemo::new();
        let mut fr = |c: &Connection| crate::kauffman::coeff_first_row(c, c.ht(), c.nt(), &mut memo).unwrap();
        for n in 2..=5 {
            for j in 1..n {
                for u in 1..=j.min(n - j) {
                    let a = eng.tnju_expansion(n, j, u).unwrap();
                    let b = eng.expand(&t_nju(n, j, u).unwrap(), &FinSet::empty()).unwrap();
                    assert!(a.terms.iter().all(|t| t.state.is_middle()));
                    for h in 0..=2 {
                        for f in crate::planar::enumerate_connections(a.source.state.nb(), n, h) {
                            if !f.is_floor() {
                                continue;
                            }
                            let fe = Extended::Conn(f.clone());
                            let lhs = rf_to_laurent(&a.evaluate(&fe, &mut fr)).unwrap();
                            let rhs = rf_to_laurent(&b.evaluate(&fe, &mut fr)).unwrap();
                            assert_eq!(lhs, rhs, "n={n} j={j} u={u} floor {f}");
                            assert_eq!(lhs, theta_eval_with(&a.source.state, &FinSet::empty(), &fe, &mut fr));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn transforms_preserve_soundness() {
        let r: Connection = "conn nt=3 nb=1 ht=0: T1-T2, T3-B1".parse().unwrap();
        let e = theta_expand(&r, &FinSet::empty()).unwrap();
        let shifted = expansion_transform(&e, &Transform::Shift(set("{1}"))).unwrap();
        assert_eq!(shifted.source.set, set("{1}"));
        assert_sound(&shifted, 1);
        let m = r_nk(1, 0).unwrap();
        let appended = expansion_transform(&e, &Transform::AppendMiddle(m)).unwrap();
        assert_sound(&appended, 1);
        let reflected = expansion_transform(&e, &Transform::Reflect).unwrap();
        assert_eq!(reflected.source.state, r.reflect());
        assert_sound(&reflected, 2);
        assert!(matches!(
            expansion_transform(&shifted, &Transform::Reflect),
            Err(ThetaError::ModePrecondition(_))
        ));
        assert!(matches!(
            expansion_transform(&e, &Transform::AppendMiddle(r.clone())),
            Err(ThetaError::ModePrecondition(_))
        ));
    }

    #[test]
    fn rejects_bad_input() {
        let floor: Connection = "conn nt=0 nb=2 ht=0: B1-B2".parse().unwrap();
        assert_eq!(theta_expand(&floor, &FinSet::empty()).unwrap_err(), ThetaError::NotRoof);
        assert!(matches!(coeff_any(&two_caps(), 1, 4), Err(ThetaError::NotCatalan { .. })));
        assert!(z_coeff(3, 1, &set("{1,2}")).is_err());
    }

    proptest::proptest! {
        #[test]
        fn triangle_is_reflexive_and_stable(n in 2usize..7, kk in 1usize..6, pick in 0usize..64) {
            let k = 1 + kk % (n - 1);
            let kp = k.min(n - k);
            let sets: Vec<FinSet> = enumerate_ln(n).into_iter().filter(|s| s.len() <= kp).collect();
            let i = sets[pick % sets.len()].clone();
            let a = WPair::new(r_prime(n, k, 0).unwrap(), FinSet::empty());
            proptest::prop_assert!(triangle_leq(&a, &a));
            let c = WPair::new(r_prime(n, k, i.len()).unwrap(), i.clone());
            proptest::prop_assert!(triangle_leq(&a, &c));
            if !i.is_empty() {
                proptest::prop_assert!(!triangle_leq(&c, &a));
            }
        }
    }
}
