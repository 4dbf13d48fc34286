//! Index sets of bottom returns and first-row arcs.
//!
//! `phi_n` sends a bottom state with `n` bottom points to the left ends of its
//! bottom returns; `L_n` is its image. `psi_n` sends a height-one roof state to
//! its first-row arc set. The operations `oplus`, `ominus` and `preceq` are
//! computed geometrically from these bijections.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::planar::{bottom_quotient, enumerate_connections, vprod, Connection, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FinSetError {
    #[error("{set} is not in L_{n}")]
    NotInLn { set: FinSet, n: usize },
    #[error("{below} is not below {above}")]
    NotBelow { below: FinSet, above: FinSet },
    #[error("{set} is not in U_{n}")]
    NotInUn { set: FinSet, n: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A finite set of non-negative integers, stored increasing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FinSet(Vec<usize>);

impl FinSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_sorted(v: Vec<usize>) -> Self {
        assert!(v.windows(2).all(|w| w[0] < w[1]), "FinSet elements must increase: {v:?}");
        Self(v)
    }

    pub fn singleton(i: usize) -> Self {
        Self(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Sum of the elements.
    pub fn norm(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn largest(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn smallest(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }
}

impl FromIterator<usize> for FinSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl<'a> IntoIterator for &'a FinSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for FinSet {
    type Err = FinSetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = |pos: usize, msg: &str| FinSetError::Parse { pos, msg: msg.to_string() };
        let inner = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| err(0, "expected {...}"))?;
        if inner.trim().is_empty() {
            return Ok(FinSet::empty());
        }
        let mut v = Vec::new();
        let mut pos = 1;
        for part in inner.split(',') {
            let x = part.trim().parse::<usize>().map_err(|_| err(pos, "expected a non-negative integer"))?;
            if v.last().is_some_and(|&l| l >= x) {
                return Err(err(pos, "elements must be strictly increasing"));
            }
            v.push(x);
            pos += part.len() + 1;
        }
        Ok(FinSet(v))
    }
}

/// The bottom state `phi_n^{-1}({i})`: one return at `(i, i+1)`.
fn single_return(i: usize, n: usize) -> Connection {
    let mut arcs = vec![(Point::Bottom(i), Point::Bottom(i + 1))];
    for k in 1..i {
        arcs.push((Point::Top(k), Point::Bottom(k)));
    }
    for k in i + 2..=n {
        arcs.push((Point::Top(k - 2), Point::Bottom(k)));
    }
    Connection::from_points(n - 2, n, 0, &arcs).expect("single return state")
}

/// `phi_n^{-1}(I)` as the stack of single-return states.
pub fn phi_inv(set: &FinSet, n: usize) -> Result<Connection, FinSetError> {
    let t = set.len();
    let not_in = || FinSetError::NotInLn { set: set.clone(), n };
    if 2 * t > n || set.smallest() == Some(0) {
        return Err(not_in());
    }
    let mut acc = Connection::identity(n - 2 * t);
    for (k, &i) in set.iter().enumerate() {
        let size = n - 2 * t + 2 * (k + 1);
        if i + 1 > size {
            return Err(not_in());
        }
        acc = vprod(&acc, &single_return(i, size)).expect("arities chain").0;
    }
    Ok(acc)
}

/// `phi_n(F)` for a bottom state `F`.
pub fn phi(f: &Connection) -> FinSet {
    f.bottom_return_left_ends()
}

/// Least `n` with `I` in `L_n`, read off the right ends of the returns.
pub fn n_min(set: &FinSet) -> usize {
    let Some(mx) = set.largest() else {
        return 0;
    };
    let f = phi_inv(set, mx + set.len()).expect("I lies in L_{max I + |I|}");
    f.right_ends_of_bottom_returns().into_iter().max().unwrap_or(0)
}

pub fn in_ln(set: &FinSet, n: usize) -> bool {
    set.smallest() != Some(0) && n >= n_min(set)
}

/// `L_n` in lexicographic order.
pub fn enumerate_ln(n: usize) -> Vec<FinSet> {
    let m = n.saturating_sub(1);
    let mut out: Vec<FinSet> = (0u64..1 << m)
        .map(|mask| (1..=m).filter(|&i| mask >> (i - 1) & 1 == 1).collect::<FinSet>())
        .filter(|s| in_ln(s, n))
        .collect();
    out.sort();
    out
}

/// All bottom states with `n` bottom points.
pub fn enumerate_bn(n: usize) -> Vec<Connection> {
    (0..=n / 2)
        .flat_map(|k| enumerate_connections(n - 2 * k, n, 0))
        .filter(|c| c.is_floor())
        .collect()
}

pub fn oplus(a: &FinSet, b: &FinSet) -> FinSet {
    let n = (n_min(a) + 2 * b.len()).max(n_min(b));
    let top = phi_inv(a, n - 2 * b.len()).expect("n* large enough");
    let bot = phi_inv(b, n).expect("n* large enough");
    phi(&vprod(&top, &bot).expect("arities match").0)
}

/// `J <= I`, decided at `n = n_I`.
pub fn preceq(j: &FinSet, i: &FinSet) -> bool {
    preceq_at(j, i, n_min(i))
}

/// `J <=_n I`; false when `I` is not in `L_n`.
pub fn preceq_at(j: &FinSet, i: &FinSet, n: usize) -> bool {
    match phi_inv(i, n) {
        Ok(f) => bottom_quotient(&f, j).is_some(),
        Err(_) => false,
    }
}

pub fn ominus(i: &FinSet, j: &FinSet) -> Result<FinSet, FinSetError> {
    let f = phi_inv(i, n_min(i)).expect("I in L_{n_I}");
    match bottom_quotient(&f, j) {
        Some(q) => Ok(phi(&q)),
        None => Err(FinSetError::NotBelow { below: j.clone(), above: i.clone() }),
    }
}

/// Membership in `U_n`: elements in `0..=n` with gaps larger than one.
pub fn in_un(set: &FinSet, n: usize) -> bool {
    set.largest().is_none_or(|m| m <= n) && set.as_slice().windows(2).all(|w| w[1] - w[0] > 1)
}

/// The height-one roof state with first-row arcs exactly `e_j`, `j` in `J`.
pub fn psi_inv(set: &FinSet, n: usize) -> Result<Connection, FinSetError> {
    if !in_un(set, n) {
        return Err(FinSetError::NotInUn { set: set.clone(), n });
    }
    let row: Vec<Point> = std::iter::once(Point::Left(1))
        .chain((1..=n).map(Point::Top))
        .chain(std::iter::once(Point::Right(1)))
        .collect();
    let mut used = vec![false; row.len()];
    let mut arcs = Vec::new();
    for &j in set {
        arcs.push((row[j], row[j + 1]));
        used[j] = true;
        used[j + 1] = true;
    }
    let mut b = 0;
    for (k, &p) in row.iter().enumerate() {
        if !used[k] {
            b += 1;
            arcs.push((p, Point::Bottom(b)));
        }
    }
    Ok(Connection::from_points(n, b, 1, &arcs).expect("psi inverse is planar"))
}

/// A pair `(J, I)` with `j_1 < i_1 < j_2 < ... < i_t < j_{t+1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RowPair {
    pub j: FinSet,
    pub i: FinSet,
}

impl RowPair {
    pub fn new(j: FinSet, i: FinSet) -> Self {
        Self { j, i }
    }

    /// Membership in `D_n`.
    pub fn in_dn(&self, n: usize) -> bool {
        if self.j.len() != self.i.len() + 1 || self.j.largest().is_some_and(|m| m > n) {
            return false;
        }
        let js = self.j.as_slice();
        self.i.iter().enumerate().all(|(k, &i)| js[k] < i && i < js[k + 1])
    }

    /// Exponent `-n + 2(||J|| - ||I||)` of the first-row weight.
    pub fn weight_exponent(&self, n: usize) -> i64 {
        -(n as i64) + 2 * (self.j.norm() as i64 - self.i.norm() as i64)
    }
}

impl fmt::Display for RowPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.j, self.i)
    }
}

impl FromStr for RowPair {
    type Err = FinSetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = |msg: &str| FinSetError::Parse { pos: 0, msg: msg.to_string() };
        let inner = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(|| err("expected (J,I)"))?;
        let close = inner.find('}').ok_or_else(|| err("expected {"))?;
        let (a, b) = inner.split_at(close + 1);
        let b = b.trim_start().strip_prefix(',').ok_or_else(|| err("expected ','"))?;
        Ok(RowPair::new(a.parse()?, b.parse()?))
    }
}

/// All `(J, I)` in `D_n` with `J` inside `allowed`, in lexicographic order.
pub fn enumerate_pairs(allowed: &FinSet, n: usize) -> Vec<RowPair> {
    let js: Vec<usize> = allowed.iter().copied().filter(|&j| j <= n).collect();
    let mut out = Vec::new();
    for mask in 1u64..1 << js.len() {
        let j: Vec<usize> = (0..js.len()).filter(|&k| mask >> k & 1 == 1).map(|k| js[k]).collect();
        if j.windows(2).any(|w| w[1] - w[0] < 2) {
            continue;
        }
        let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
        for w in j.windows(2) {
            choices = choices
                .into_iter()
                .flat_map(|c| {
                    (w[0] + 1..w[1]).map(move |a| {
                        let mut c = c.clone();
                        c.push(a);
                        c
                    })
                })
                .collect();
        }
        for i in choices {
            out.push(RowPair::new(FinSet(j.clone()), FinSet(i)));
        }
    }
    out.sort();
    out
}

/// `H(R)`: the pairs of `D_n` whose `J` lies in the first-row arc set of `r`.
pub fn enumerate_h(r: &Connection) -> Vec<RowPair> {
    assert!(r.ht() >= 1, "H(R) needs a first row");
    enumerate_pairs(&r.arcs_j(), r.nt())
}

/// The row of markers `s(J, I)` of length `n`.
pub fn s_of(p: &RowPair, n: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(n);
    let js = p.j.as_slice();
    let is = p.i.as_slice();
    let mut prev = 0;
    for k in 0..js.len() {
        out.extend(std::iter::repeat_n(1, js[k] - prev));
        let end = if k < is.len() { is[k] } else { n };
        out.extend(std::iter::repeat_n(-1, end - js[k]));
        prev = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::vprod;
    use proptest::prelude::*;

    fn fs(v: &[usize]) -> FinSet {
        FinSet::from_sorted(v.to_vec())
    }

    // Greedy bracket matching: members of I open, other positions close the
    // innermost open bracket. Independent of the stacking construction.
    fn greedy_n_min(set: &FinSet) -> usize {
        let mut open = 0usize;
        let mut last_close = 0;
        let mut pos = 1;
        let mut pending = set.len();
        while pending > 0 || open > 0 {
            if set.contains(pos) {
                open += 1;
                pending -= 1;
            } else if open > 0 {
                open -= 1;
                last_close = pos;
            }
            pos += 1;
        }
        last_close
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn n_min_values() {
        assert_eq!(n_min(&fs(&[])), 0);
        for i in 1..8 {
            assert_eq!(n_min(&fs(&[i])), i + 1);
        }
        assert_eq!(n_min(&fs(&[3, 4])), 6);
        assert_eq!(n_min(&fs(&[1, 4])), 5);
        assert!(in_ln(&fs(&[]), 0));
        assert!(!in_ln(&fs(&[2]), 2));
        assert!(in_ln(&fs(&[2]), 3));
        assert_eq!(enumerate_ln(3), vec![fs(&[]), fs(&[1]), fs(&[2])]);
    }

    #[test]
    fn n_min_matches_greedy_brackets() {
        for n in 0..=10 {
            for s in enumerate_ln(n) {
                assert_eq!(n_min(&s), greedy_n_min(&s), "{s}");
            }
        }
    }

    #[test]
    fn phi_round_trip_and_counts() {
        for n in 0..=8 {
            for s in enumerate_ln(n) {
                let f = phi_inv(&s, n).unwrap();
                assert!(f.classify().is_bottom);
                assert_eq!(phi(&f), s);
            }
        }
        for n in 0..=10 {
            let bn = enumerate_bn(n);
            assert_eq!(bn.len(), binom(n, n / 2), "n = {n}");
            assert_eq!(enumerate_ln(n).len(), bn.len());
        }
        assert_eq!(phi_inv(&fs(&[]), 4).unwrap(), Connection::identity(4));
        assert!(phi_inv(&fs(&[3]), 3).is_err());
    }

    #[test]
    fn phi_inv_single_and_reflection() {
        for n in 2..=6 {
            for i in 1..n {
                let f = phi_inv(&fs(&[i]), n).unwrap();
                assert!(f.joins(Point::Bottom(i), Point::Bottom(i + 1)));
                assert_eq!(f.reflect(), phi_inv(&fs(&[n - i]), n).unwrap());
            }
        }
        let f = phi_inv(&fs(&[3, 4]), 7).unwrap();
        assert_eq!(f.to_string(), "conn nt=3 nb=7 ht=0: T1-B1, T2-B2, T3-B7, B6-B3, B5-B4");
    }

    #[test]
    fn oplus_ominus_examples() {
        assert_eq!(oplus(&fs(&[1]), &fs(&[2])), fs(&[1, 2]));
        assert_eq!(oplus(&fs(&[2]), &fs(&[1])), fs(&[1, 4]));
        assert_eq!(oplus(&fs(&[3]), &fs(&[])), fs(&[3]));
        assert_eq!(oplus(&fs(&[]), &fs(&[3])), fs(&[3]));
        assert_eq!(ominus(&fs(&[1, 4]), &fs(&[1])).unwrap(), fs(&[2]));
        assert!(ominus(&fs(&[1, 2]), &fs(&[3])).is_err());
        for n in 0..=6 {
            for i in enumerate_ln(n) {
                assert_eq!(ominus(&i, &i).unwrap(), fs(&[]));
            }
        }
    }

    #[test]
    fn remark_index_formulas() {
        for i in 1..8 {
            for j in 1..8 {
                let want = if i < j { fs(&[i, j]) } else { fs(&[j, i + 2]) };
                assert_eq!(oplus(&fs(&[i]), &fs(&[j])), want);
            }
        }
    }

    #[test]
    fn poset_of_l4() {
        let l4 = enumerate_ln(4);
        assert_eq!(l4, vec![fs(&[]), fs(&[1]), fs(&[1, 2]), fs(&[1, 3]), fs(&[2]), fs(&[3])]);
        let covers: Vec<(FinSet, FinSet)> = l4
            .iter()
            .flat_map(|a| l4.iter().map(move |b| (a.clone(), b.clone())))
            .filter(|(a, b)| a != b && preceq(a, b))
            .collect();
        assert!(covers.contains(&(fs(&[2]), fs(&[1, 2]))));
        assert!(!covers.contains(&(fs(&[1]), fs(&[1, 2]))));
        assert!(covers.contains(&(fs(&[1]), fs(&[1, 3]))));
        assert!(covers.contains(&(fs(&[3]), fs(&[1, 3]))));
        assert!(!covers.contains(&(fs(&[2]), fs(&[1, 3]))));
        assert_eq!(covers.len(), 8);
    }

    #[test]
    fn preceq_is_partial_order_and_stable() {
        for n in 0..=6 {
            let ln = enumerate_ln(n);
            for a in &ln {
                assert!(preceq(a, a));
                for b in &ln {
                    if a != b && preceq(a, b) {
                        assert!(!preceq(b, a));
                    }
                    for c in &ln {
                        if preceq(a, b) && preceq(b, c) {
                            assert!(preceq(a, c));
                        }
                    }
                    let base = preceq(a, b);
                    for m in n_min(b)..=n_min(b) + 4 {
                        assert_eq!(preceq_at(a, b, m), base);
                    }
                }
            }
        }
    }

    #[test]
    fn psi_inv_properties() {
        for n in 0..=6 {
            for mask in 0u32..1 << (n + 1) {
                let j: FinSet = (0..=n).filter(|&k| mask >> k & 1 == 1).collect();
                match psi_inv(&j, n) {
                    Ok(r) => {
                        assert!(in_un(&j, n));
                        assert_eq!(r.arcs_j(), j);
                        assert_eq!(r.nb(), n + 2 - 2 * j.len());
                        assert!(r.is_roof());
                    }
                    Err(_) => assert!(!in_un(&j, n)),
                }
            }
        }
    }

    #[test]
    fn h_sets() {
        let r = psi_inv(&fs(&[2]), 4).unwrap();
        assert_eq!(enumerate_h(&r), vec![RowPair::new(fs(&[2]), fs(&[]))]);
        let r = psi_inv(&fs(&[1, 4]), 5).unwrap();
        let h = enumerate_h(&r);
        let want: Vec<RowPair> = vec![
            RowPair::new(fs(&[1]), fs(&[])),
            RowPair::new(fs(&[1, 4]), fs(&[2])),
            RowPair::new(fs(&[1, 4]), fs(&[3])),
            RowPair::new(fs(&[4]), fs(&[])),
        ];
        assert_eq!(h, want);
        let big = enumerate_pairs(&fs(&[0, 4, 6]), 6);
        assert!(big.iter().all(|p| p.in_dn(6)));
        // 3 singletons, 3 + 5 + 1 pairs, 3 * 1 triples
        assert_eq!(big.len(), 3 + 3 + 5 + 1 + 3);
    }

    #[test]
    fn s_sequences() {
        assert_eq!(s_of(&RowPair::new(fs(&[3]), fs(&[])), 3), vec![1, 1, 1]);
        assert_eq!(s_of(&RowPair::new(fs(&[0]), fs(&[])), 3), vec![-1, -1, -1]);
        assert_eq!(s_of(&RowPair::new(fs(&[0, 2]), fs(&[1])), 2), vec![-1, 1]);
        for n in 0..=7 {
            let all = enumerate_pairs(&(0..=n).collect(), n);
            let seqs: std::collections::HashSet<Vec<i8>> = all.iter().map(|p| s_of(p, n)).collect();
            assert_eq!(seqs.len(), all.len());
            assert_eq!(seqs.len(), 1 << n);
        }
    }

    #[test]
    fn literals() {
        assert_eq!(fs(&[]).to_string(), "{}");
        assert_eq!("{3,4}".parse::<FinSet>().unwrap(), fs(&[3, 4]));
        assert_eq!(" { 3 , 4 } ".parse::<FinSet>().unwrap(), fs(&[3, 4]));
        assert!("{4,3}".parse::<FinSet>().is_err());
        assert!("3,4".parse::<FinSet>().is_err());
        let p: RowPair = "({0,2},{1})".parse().unwrap();
        assert_eq!(p, RowPair::new(fs(&[0, 2]), fs(&[1])));
        assert_eq!(p.to_string(), "({0,2},{1})");
    }

    #[test]
    fn set_algebra_exhaustive() {
        for n in 0..=8 {
            let ln = enumerate_ln(n);
            for i in &ln {
                for j in &ln {
                    let s = oplus(i, j);
                    assert_eq!(s.len(), i.len() + j.len());
                    assert_eq!(n_min(&s), (n_min(i) + 2 * j.len()).max(n_min(j)));
                    assert!(preceq(j, &s));
                    assert_eq!(ominus(&s, j).unwrap(), *i);
                    if n >= 2 * j.len() && in_ln(i, n - 2 * j.len()) {
                        let lhs = phi_inv(&s, n).unwrap();
                        let rhs = vprod(&phi_inv(i, n - 2 * j.len()).unwrap(), &phi_inv(j, n).unwrap()).unwrap().0;
                        assert_eq!(lhs, rhs);
                        assert!(in_ln(&s, n));
                    }
                }
            }
        }
    }

    fn arb_ln() -> impl Strategy<Value = FinSet> {
        (9usize..14).prop_flat_map(|n| {
            prop::collection::vec(1..n, 0..5).prop_map(move |v| {
                let s: FinSet = v.into_iter().collect();
                if in_ln(&s, n) { s } else { FinSet::empty() }
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn ominus_laws(k in arb_ln(), i in arb_ln(), j in arb_ln()) {
            let ki = oplus(&k, &i);
            prop_assert_eq!(ominus(&ki, &i).unwrap(), k.clone());
            if preceq(&j, &i) {
                let ij = ominus(&i, &j).unwrap();
                prop_assert_eq!(oplus(&ij, &j), i.clone());
                prop_assert_eq!(ominus(&oplus(&k, &i), &j).unwrap(), oplus(&k, &ij));
                prop_assert_eq!(ominus(&oplus(&i, &k), &oplus(&j, &k)).unwrap(), ij);
            }
        }
    }
}
