//! Plane rooted trees with delay, the plucking polynomial, and the closed
//! formula for coefficients of Catalan states without bottom returns.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::exact_arith::LaurentPoly;
use crate::finsets::{psi_inv, FinSet};
use crate::planar::{vprod, Connection, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PluckingError {
    #[error("state has bottom returns")]
    HasBottomReturns,
    #[error("state has top returns")]
    HasTopReturns,
    #[error("state is not in Cat({m},{n})")]
    NotCatalan { m: usize, n: usize },
    #[error("bad tree literal: {0}")]
    Parse(String),
}

/// A plane rooted tree; vertex 0 is the root and children are ordered left to right.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PlaneRootedTree {
    children: Vec<Vec<usize>>,
    delay: Vec<usize>,
}

impl PlaneRootedTree {
    pub fn root_only() -> Self {
        Self { children: vec![Vec::new()], delay: vec![1] }
    }

    /// Builds from a parent list (`parents[k]` is the parent of vertex `k + 1`);
    /// children keep the order in which they appear. Delays apply to leaves only.
    pub fn from_parents(parents: &[usize], delay: &[usize]) -> Self {
        let n = parents.len() + 1;
        let mut children = vec![Vec::new(); n];
        for (k, &p) in parents.iter().enumerate() {
            assert!(p <= k, "parents must precede children");
            children[p].push(k + 1);
        }
        let mut d = vec![1; n];
        for v in 1..n {
            if children[v].is_empty() {
                d[v] = delay.get(v - 1).copied().unwrap_or(1).max(1);
            }
        }
        Self { children, delay: d }
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn delay(&self, v: usize) -> usize {
        self.delay[v]
    }

    pub fn leaves(&self) -> Vec<usize> {
        (1..self.len()).filter(|&v| self.children[v].is_empty()).collect()
    }

    fn fmt_vertex(&self, v: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(v{v}")?;
        if v != 0 && self.children[v].is_empty() && self.delay[v] != 1 {
            write!(f, ":{}", self.delay[v])?;
        }
        for &c in &self.children[v] {
            write!(f, " ")?;
            self.fmt_vertex(c, f)?;
        }
        write!(f, ")")
    }

    /// Renumbers vertices in preorder.
    fn canonical(&self) -> Self {
        let mut order = Vec::new();
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        let mut new_id = vec![0; self.len()];
        for (k, &v) in order.iter().enumerate() {
            new_id[v] = k;
        }
        let mut children = vec![Vec::new(); self.len()];
        let mut delay = vec![1; self.len()];
        for &v in &order {
            children[new_id[v]] = self.children[v].iter().map(|&c| new_id[c]).collect();
            delay[new_id[v]] = self.delay[v];
        }
        Self { children, delay }
    }
}

impl fmt::Display for PlaneRootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.canonical().fmt_vertex(0, f)
    }
}

impl FromStr for PlaneRootedTree {
    type Err = PluckingError;

    /// Parses `(v0 (a (c:2) (d)) (b))`; labels are ignored, `:k` sets a leaf delay.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: &str| PluckingError::Parse(m.to_string());
        let b = s.as_bytes();
        let mut pos = 0;
        let mut parents: Vec<usize> = Vec::new();
        let mut delays: Vec<usize> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut next = 0usize;
        while pos < b.len() {
            match b[pos] {
                b'(' => {
                    pos += 1;
                    let start = pos;
                    while pos < b.len() && !b"() ".contains(&b[pos]) {
                        pos += 1;
                    }
                    let label = &s[start..pos];
                    let delay = match label.split_once(':') {
                        Some((_, d)) => d.parse::<usize>().map_err(|_| err("bad delay"))?,
                        None => 1,
                    };
                    if delay == 0 {
                        return Err(err("delays are positive"));
                    }
                    if let Some(&p) = stack.last() {
                        parents.push(p);
                        delays.push(delay);
                    } else if next != 0 {
                        return Err(err("more than one root"));
                    }
                    stack.push(next);
                    next += 1;
                }
                b')' => {
                    stack.pop().ok_or_else(|| err("unbalanced ')'"))?;
                    pos += 1;
                }
                c if c.is_ascii_whitespace() => pos += 1,
                _ => return Err(err("unexpected character")),
            }
        }
        if next == 0 || !stack.is_empty() {
            return Err(err("unbalanced parentheses"));
        }
        Ok(PlaneRootedTree::from_parents(&parents, &delays))
    }
}

/// `T(C)`: one vertex per arc avoiding the bottom side, nested under the
/// innermost enclosing such arc, ordered left to right.
pub fn build_tree(c: &Connection) -> Result<PlaneRootedTree, PluckingError> {
    if c.bottom_returns() > 0 {
        return Err(PluckingError::HasBottomReturns);
    }
    let m = c.ht();
    let total = c.total();
    let is_bottom = |k: usize| matches!(c.point(k), Point::Bottom(_));
    // position along y_m..y_1, x_1..x_n, y'_1..y'_m
    let pos = |k: usize| (k + m) % total;
    let mut arcs: Vec<(usize, usize, usize)> = c
        .pairs()
        .into_iter()
        .filter(|&(a, b)| !is_bottom(a) && !is_bottom(b))
        .map(|(a, b)| {
            let (pa, pb) = (pos(a), pos(b));
            let (lo, hi, lo_k, hi_k) = if pa < pb { (pa, pb, a, b) } else { (pb, pa, b, a) };
            let delay = match (c.point(lo_k), c.point(hi_k)) {
                (Point::Left(r), Point::Left(s)) | (Point::Right(r), Point::Right(s)) => r.max(s),
                _ => 1,
            };
            (lo, hi, delay)
        })
        .collect();
    arcs.sort();
    // arcs sorted by left end give a preorder; a stack recovers the nesting
    let mut parents = Vec::with_capacity(arcs.len());
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for (k, &(lo, hi, _)) in arcs.iter().enumerate() {
        while stack.last().is_some_and(|&(_, end)| end < lo) {
            stack.pop();
        }
        parents.push(stack.last().map_or(0, |&(v, _)| v));
        stack.push((k + 1, hi));
    }
    let delays: Vec<usize> = arcs.iter().map(|a| a.2).collect();
    Ok(PlaneRootedTree::from_parents(&parents, &delays))
}

/// Memoized evaluation of the plucking polynomial; the result is a polynomial in `q`
/// stored as a [`LaurentPoly`] whose exponents are powers of `q`.
pub fn plucking_poly(t: &PlaneRootedTree) -> LaurentPoly {
    let n = t.len();
    assert!(n <= 64, "plucking_poly supports at most 64 vertices");
    let mut parent = vec![usize::MAX; n];
    for v in 0..n {
        for &c in t.children(v) {
            parent[c] = v;
        }
    }
    let mut subtree = vec![0u64; n];
    for v in (0..n).rev() {
        subtree[v] |= 1 << v;
        if v > 0 {
            let s = subtree[v];
            subtree[parent[v]] |= s;
        }
    }
    // right[v]: vertices in subtrees of right siblings along the root-to-v path
    let mut right = vec![0u64; n];
    for (v, r) in right.iter_mut().enumerate().skip(1) {
        let mut u = v;
        while u != 0 {
            let p = parent[u];
            let sibs = t.children(p);
            let at = sibs.iter().position(|&x| x == u).unwrap();
            for &s in &sibs[at + 1..] {
                *r |= subtree[s];
            }
            u = p;
        }
    }
    let mut memo: HashMap<(u64, Vec<u8>), LaurentPoly> = HashMap::new();
    let alive = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let delays: Vec<u8> = (0..n).map(|v| t.delay(v).min(255) as u8).collect();
    pluck_rec(t, &parent, &right, alive, delays, &mut memo)
}

fn pluck_rec(
    t: &PlaneRootedTree,
    parent: &[usize],
    right: &[u64],
    alive: u64,
    delays: Vec<u8>,
    memo: &mut HashMap<(u64, Vec<u8>), LaurentPoly>,
) -> LaurentPoly {
    if alive == 1 {
        return LaurentPoly::one();
    }
    let key = (alive, delays);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let delays = &key.1;
    let is_leaf = |v: usize| v != 0 && alive >> v & 1 == 1 && t.children(v).iter().all(|&c| alive >> c & 1 == 0);
    let leaves: Vec<usize> = (1..t.len()).filter(|&v| is_leaf(v)).collect();
    let mut out = LaurentPoly::zero();
    for &v in &leaves {
        if delays[v] != 1 {
            continue;
        }
        let next_alive = alive & !(1u64 << v);
        let mut next = delays.clone();
        for &u in &leaves {
            if u != v {
                next[u] = next[u].saturating_sub(1).max(1);
            }
        }
        let p = parent[v];
        if p != 0 && t.children(p).iter().all(|&c| next_alive >> c & 1 == 0) {
            next[p] = 1;
        }
        let r = (right[v] & alive).count_ones() as i64;
        let sub = pluck_rec(t, parent, right, next_alive, next, memo);
        out += &sub.shift(r);
    }
    memo.insert(key, out.clone());
    out
}

/// Straightforward recursion on explicit trees; used to cross-check the memoized version.
pub fn plucking_poly_naive(t: &PlaneRootedTree) -> LaurentPoly {
    if t.len() == 1 {
        return LaurentPoly::one();
    }
    let mut out = LaurentPoly::zero();
    for v in t.leaves() {
        if t.delay(v) != 1 {
            continue;
        }
        let (smaller, r) = pluck_vertex(t, v);
        out += &plucking_poly_naive(&smaller).shift(r as i64);
    }
    out
}

fn pluck_vertex(t: &PlaneRootedTree, v: usize) -> (PlaneRootedTree, usize) {
    let n = t.len();
    let mut parent = vec![usize::MAX; n];
    for u in 0..n {
        for &c in t.children(u) {
            parent[c] = u;
        }
    }
    let count = |mut stack: Vec<usize>| {
        let mut k = 0;
        while let Some(u) = stack.pop() {
            k += 1;
            stack.extend(t.children(u));
        }
        k
    };
    let mut r = 0;
    let mut u = v;
    while u != 0 {
        let p = parent[u];
        let sibs = t.children(p);
        let at = sibs.iter().position(|&x| x == u).unwrap();
        r += count(sibs[at + 1..].to_vec());
        u = p;
    }
    let old_leaves = t.leaves();
    let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
    let new_id: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, &u)| (u, k)).collect();
    let mut children = vec![Vec::new(); n - 1];
    let mut delay = vec![1; n - 1];
    for &u in &keep {
        children[new_id[&u]] = t.children(u).iter().filter(|&&c| c != v).map(|c| new_id[c]).collect();
        if old_leaves.contains(&u) {
            delay[new_id[&u]] = t.delay(u).saturating_sub(1).max(1);
        }
    }
    (PlaneRootedTree { children, delay }, r)
}

/// Realizing staircase sequences `b`: row `i` has `b_i` positive markers followed by negative ones.
pub fn realizing_sequences(c: &Connection) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let (m, n) = (c.ht(), c.nt());
    if !c.is_catalan() {
        return out;
    }
    let mut prefix = Vec::new();
    seq_rec(c, m, n, &Connection::identity(n), &mut prefix, &mut |b| out.push(b.to_vec()));
    out
}

fn row_state(b: usize, n: usize) -> Connection {
    psi_inv(&FinSet::singleton(b), n).expect("single arc row")
}

// Arcs of `partial` that avoid its bottom are final and must already be arcs of `c`.
fn consistent(c: &Connection, partial: &Connection) -> bool {
    partial.pairs().into_iter().all(|(a, b)| {
        let (p, q) = (partial.point(a), partial.point(b));
        matches!(p, Point::Bottom(_)) || matches!(q, Point::Bottom(_)) || c.joins(p, q)
    })
}

fn seq_rec(
    c: &Connection,
    m: usize,
    n: usize,
    partial: &Connection,
    prefix: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if prefix.len() == m {
        let done = if m == 0 { Connection::identity(n) } else { partial.clone() };
        if done == *c {
            emit(prefix);
        }
        return;
    }
    for b in 0..=n {
        let next = if prefix.is_empty() {
            row_state(b, n)
        } else {
            vprod(partial, &row_state(b, n)).expect("rows stack").0
        };
        if !consistent(c, &next) {
            continue;
        }
        prefix.push(b);
        seq_rec(c, m, n, &next, prefix, emit);
        prefix.pop();
    }
}

/// Largest `b_1 + ... + b_m` over realizing staircase sequences; `None` when there are none.
pub fn beta(c: &Connection) -> Option<usize> {
    let (m, n) = (c.ht(), c.nt());
    if !c.is_catalan() {
        return None;
    }
    if m == 0 {
        return (*c == Connection::identity(n)).then_some(0);
    }
    let mut memo: HashMap<Connection, Option<usize>> = HashMap::new();
    let mut best = None;
    for b in 0..=n {
        let first = row_state(b, n);
        if let Some(rest) = beta_rec(c, m, n, &first, &mut memo) {
            best = best.max(Some(b + rest));
        }
    }
    best
}

fn beta_rec(c: &Connection, m: usize, n: usize, partial: &Connection, memo: &mut HashMap<Connection, Option<usize>>) -> Option<usize> {
    if !consistent(c, partial) {
        return None;
    }
    if partial.ht() == m {
        return (partial == c).then_some(0);
    }
    if let Some(&v) = memo.get(partial) {
        return v;
    }
    let mut best = None;
    for b in 0..=n {
        let next = vprod(partial, &row_state(b, n)).expect("rows stack").0;
        if let Some(rest) = beta_rec(c, m, n, &next, memo) {
            best = best.max(Some(b + rest));
        }
    }
    memo.insert(partial.clone(), best);
    best
}

fn check_dims(c: &Connection, m: usize, n: usize) -> Result<(), PluckingError> {
    if c.nt() != n || c.nb() != n || c.ht() != m {
        return Err(PluckingError::NotCatalan { m, n });
    }
    Ok(())
}

/// `A^{2 beta - mn} Q*_{A^-4}` for Catalan states without bottom returns; zero when not realizable.
pub fn coeff_no_bottom_returns(c: &Connection, m: usize, n: usize) -> Result<LaurentPoly, PluckingError> {
    check_dims(c, m, n)?;
    let tree = build_tree(c)?;
    let q = plucking_poly(&tree);
    let Some(low) = q.min_exp() else {
        return Ok(LaurentPoly::zero());
    };
    let Some(b) = beta(c) else {
        return Ok(LaurentPoly::zero());
    };
    let normalized = q.shift(-low).scale_exponents(-4);
    Ok(normalized.shift(2 * b as i64 - (m * n) as i64))
}

/// Same formula after a rotation by pi, for Catalan states without top returns.
pub fn coeff_no_top_returns(c: &Connection, m: usize, n: usize) -> Result<LaurentPoly, PluckingError> {
    check_dims(c, m, n)?;
    if c.top_returns() > 0 {
        return Err(PluckingError::HasTopReturns);
    }
    coeff_no_bottom_returns(&c.rotate(), m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tree(s: &str) -> PlaneRootedTree {
        s.parse().unwrap()
    }

    #[test]
    fn small_trees() {
        assert_eq!(plucking_poly(&PlaneRootedTree::root_only()), LaurentPoly::one());
        assert_eq!(plucking_poly(&tree("(r (a) (b))")), LaurentPoly::from_ints(&[(0, 1), (1, 1)]));
        assert!(plucking_poly(&tree("(r (a:2) (b:3))")).is_zero());
        // a path plucks in one order only
        assert_eq!(plucking_poly(&tree("(r (a (b (c))))")), LaurentPoly::one());
        // three leaves: [3]_q! = (1+q)(1+q+q^2)
        let want = LaurentPoly::from_ints(&[(0, 1), (1, 2), (2, 2), (3, 1)]);
        assert_eq!(plucking_poly(&tree("(r (a) (b) (c))")), want);
    }

    #[test]
    fn delays_shift_order() {
        // the delayed leaf must wait for one pluck
        assert_eq!(plucking_poly(&tree("(r (a:2) (b))")), LaurentPoly::a_pow(0));
        assert_eq!(plucking_poly(&tree("(r (a) (b:2))")), LaurentPoly::a_pow(1));
    }

    #[test]
    fn tree_literals() {
        let t = tree("(v0 (a (c:2) (d)) (b))");
        assert_eq!(t.to_string(), "(v0 (v1 (v2:2) (v3)) (v4))");
        assert_eq!(tree(&t.to_string()), t);
        assert!("(v0 (a)".parse::<PlaneRootedTree>().is_err());
        assert!("(v0) (v1)".parse::<PlaneRootedTree>().is_err());
        assert!("(v0 (a:0))".parse::<PlaneRootedTree>().is_err());
    }

    #[test]
    fn trees_of_small_states() {
        let c: Connection = "conn nt=2 nb=2 ht=1: T1-T2, R1-B2, B1-L1".parse().unwrap();
        assert_eq!(build_tree(&c).unwrap().to_string(), "(v0 (v1))");
        let c: Connection = "conn nt=0 nb=0 ht=0:".parse().unwrap();
        assert_eq!(build_tree(&c).unwrap(), PlaneRootedTree::root_only());
        let c: Connection = "conn nt=1 nb=1 ht=2: T1-B1, R2-R1, L1-L2".parse().unwrap();
        assert_eq!(build_tree(&c).unwrap().to_string(), "(v0 (v1:2) (v2:2))");
        let bad: Connection = "conn nt=2 nb=2 ht=0: T1-T2, B2-B1".parse().unwrap();
        assert_eq!(build_tree(&bad), Err(PluckingError::HasBottomReturns));
    }

    #[test]
    fn beta_single_crossing() {
        let plus: Connection = "conn nt=1 nb=1 ht=1: T1-R1, B1-L1".parse().unwrap();
        assert_eq!(beta(&plus), Some(1));
        assert_eq!(realizing_sequences(&plus), vec![vec![1]]);
        assert_eq!(coeff_no_bottom_returns(&plus, 1, 1).unwrap(), LaurentPoly::a_pow(1));
        let minus: Connection = "conn nt=1 nb=1 ht=1: T1-L1, R1-B1".parse().unwrap();
        assert_eq!(beta(&minus), Some(0));
        assert_eq!(coeff_no_top_returns(&minus, 1, 1).unwrap(), LaurentPoly::a_pow(-1));
    }

    #[test]
    fn closed_formula_matches_state_sum() {
        use crate::kauffman::{coeff_table, enumerate_catalan};
        for m in 0..=4 {
            for n in 0..=4 {
                if m * n > 12 {
                    continue;
                }
                let table = coeff_table(m, n).unwrap();
                for c in enumerate_catalan(m, n) {
                    let want = table.get(&c).map(|e| e.coeff.clone()).unwrap_or_else(LaurentPoly::zero);
                    if c.bottom_returns() == 0 {
                        assert_eq!(coeff_no_bottom_returns(&c, m, n).unwrap(), want, "{c}");
                    }
                    if c.top_returns() == 0 {
                        assert_eq!(coeff_no_top_returns(&c, m, n).unwrap(), want, "{c}");
                    }
                }
            }
        }
    }

    fn arb_tree() -> impl Strategy<Value = PlaneRootedTree> {
        prop::collection::vec((0usize..100, 1usize..4), 0..8).prop_map(|v| {
            let parents: Vec<usize> = v.iter().enumerate().map(|(k, &(p, _))| p % (k + 1)).collect();
            let delays: Vec<usize> = v.iter().map(|&(_, d)| d).collect();
            PlaneRootedTree::from_parents(&parents, &delays)
        })
    }

    proptest! {
        #[test]
        fn memo_matches_naive(t in arb_tree()) {
            let q = plucking_poly(&t);
            prop_assert_eq!(&q, &plucking_poly_naive(&t));
            prop_assert!(q.is_nonneg_integral());
            prop_assert_eq!(tree(&t.to_string()).to_string(), t.to_string());
        }
    }
}
