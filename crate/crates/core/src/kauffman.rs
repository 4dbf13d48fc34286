//! Kauffman states of the lattice crossing `L(m,n)` and two independent ways
//! of computing coefficients: the full state sum and the first-row recursion.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::exact_arith::LaurentPoly;
use crate::finsets::enumerate_pairs;
use crate::planar::{bottom_quotient, enumerate_connections, make_connection, top_row_quotient, Connection, Point};

pub const DEFAULT_MAX_CELLS: usize = 24;
pub const MAX_CELLS_ENV: &str = "CATBRACKET_MAX_CELLS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KauffmanError {
    #[error("{m}x{n} lattice has {} crossings, above the brute-force limit {limit}", m * n)]
    TooLarge { m: usize, n: usize, limit: usize },
    #[error("state is not in Cat({m},{n})")]
    NotCatalan { m: usize, n: usize },
    #[error("bad Kauffman state literal: {0}")]
    Parse(String),
}

/// The brute-force size guard, overridable through `CATBRACKET_MAX_CELLS`.
pub fn max_cells() -> usize {
    std::env::var(MAX_CELLS_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MAX_CELLS)
}

/// Which pair of ports a marker joins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convention {
    /// `+` joins N-E and S-W, `-` joins N-W and S-E.
    #[default]
    Standard,
    /// The two smoothings swapped; only useful as a negative control.
    Flipped,
}

const N: usize = 0;
const E: usize = 1;
const S: usize = 2;
const W: usize = 3;

// SMOOTHING[0] is the positive marker, SMOOTHING[1] the negative one.
const SMOOTHING: [[(usize, usize); 2]; 2] = [[(N, E), (S, W)], [(N, W), (S, E)]];

/// Markers of `L(m,n)`, row-major from the top-left crossing.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KauffmanState {
    m: usize,
    n: usize,
    markers: Vec<i8>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmoothingResult {
    pub state: Connection,
    pub loops: usize,
}

impl KauffmanState {
    pub fn new(m: usize, n: usize, markers: Vec<i8>) -> Self {
        assert_eq!(markers.len(), m * n);
        assert!(markers.iter().all(|&x| x == 1 || x == -1));
        Self { m, n, markers }
    }

    /// The state whose bits (row-major, bit set = negative) are `bits`.
    pub fn from_bits(m: usize, n: usize, bits: u64) -> Self {
        let markers = (0..m * n).map(|k| if bits >> k & 1 == 1 { -1 } else { 1 }).collect();
        Self { m, n, markers }
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        Self::new(m, n, rows.concat())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marker(&self, r: usize, c: usize) -> i8 {
        self.markers[r * self.n + c]
    }

    pub fn positive(&self) -> usize {
        self.markers.iter().filter(|&&x| x == 1).count()
    }

    pub fn negative(&self) -> usize {
        self.markers.len() - self.positive()
    }

    /// Exponent `p(s) - n(s)` of the state weight.
    pub fn weight_exponent(&self) -> i64 {
        self.positive() as i64 - self.negative() as i64
    }
}

impl fmt::Display for KauffmanState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .markers
            .chunks(self.n.max(1))
            .map(|r| r.iter().map(|&x| if x == 1 { '+' } else { '-' }).collect())
            .collect();
        write!(f, "{}", rows.join("/"))
    }
}

impl FromStr for KauffmanState {
    type Err = KauffmanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows: Vec<Vec<i8>> = s
            .trim()
            .split('/')
            .map(|r| {
                r.trim()
                    .chars()
                    .map(|c| match c {
                        '+' => Ok(1),
                        '-' => Ok(-1),
                        other => Err(KauffmanError::Parse(format!("unexpected '{other}'"))),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        if rows.iter().any(|r| r.len() != rows[0].len() || r.is_empty()) {
            return Err(KauffmanError::Parse("rows must be nonempty and of equal length".into()));
        }
        Ok(Self::from_rows(&rows))
    }
}

pub fn smooth(s: &KauffmanState) -> SmoothingResult {
    smooth_with(s, Convention::Standard)
}

/// Resolves every crossing and traces strands; ports of crossing `(r,c)` are
/// numbered `4(rn + c) + {N,E,S,W}`.
pub fn smooth_with(s: &KauffmanState, conv: Convention) -> SmoothingResult {
    let (m, n) = (s.m, s.n);
    if m == 0 || n == 0 {
        let arcs: Vec<(Point, Point)> = (1..=n)
            .map(|i| (Point::Top(i), Point::Bottom(i)))
            .chain((1..=m).map(|r| (Point::Left(r), Point::Right(r))))
            .collect();
        let state = Connection::from_points(n, n, m, &arcs).expect("trivial lattice");
        return SmoothingResult { state, loops: 0 };
    }
    let port =|r: usize, c: usize, d: usize| 4 * (r * n + c) + d;
    let np = 4 * m * n;
    let mut inner = vec![0usize; np];
    for r in 0..m {
        for c in 0..n {
            let mut k = usize::from(s.marker(r, c) == -1);
            if conv == Convention::Flipped {
                k = 1 - k;
            }
            for (a, b) in SMOOTHING[k] {
                inner[port(r, c, a)] = port(r, c, b);
                inner[port(r, c, b)] = port(r, c, a);
            }
        }
    }
    // outer[p]: the neighbouring port, or the boundary index when p lies on the boundary
    const BOUNDARY: usize = 1 << 40;
    let bidx = |p: Point| crate::planar::point_index(n, n, m, p);
    let mut outer = vec![0usize; np];
    for r in 0..m {
        for c in 0..n {
            outer[port(r, c, N)] = if r == 0 { BOUNDARY + bidx(Point::Top(c + 1)) } else { port(r - 1, c, S) };
            outer[port(r, c, S)] = if r + 1 == m { BOUNDARY + bidx(Point::Bottom(c + 1)) } else { port(r + 1, c, N) };
            outer[port(r, c, W)] = if c == 0 { BOUNDARY + bidx(Point::Left(r + 1)) } else { port(r, c - 1, E) };
            outer[port(r, c, E)] = if c + 1 == n { BOUNDARY + bidx(Point::Right(r + 1)) } else { port(r, c + 1, W) };
        }
    }
    let total = 2 * (m + n);
    let mut entry = vec![usize::MAX; total];
    for (p, &o) in outer.iter().enumerate() {
        if o >= BOUNDARY {
            entry[o - BOUNDARY] = p;
        }
    }
    let mut visited = vec![false; np];
    let mut pairs = Vec::with_capacity(m + n);
    let mut mate = vec![usize::MAX; total];
    for b in 0..total {
        if mate[b] != usize::MAX {
            continue;
        }
        let mut p = entry[b];
        loop {
            visited[p] = true;
            let q = inner[p];
            visited[q] = true;
            let o = outer[q];
            if o >= BOUNDARY {
                mate[b] = o - BOUNDARY;
                mate[o - BOUNDARY] = b;
                pairs.push((b, o - BOUNDARY));
                break;
            }
            p = o;
        }
    }
    let mut loops = 0;
    for start in 0..np {
        if visited[start] {
            continue;
        }
        loops += 1;
        let mut p = start;
        loop {
            visited[p] = true;
            let q = inner[p];
            visited[q] = true;
            p = outer[q];
            if p == start {
                break;
            }
        }
    }
    let state = make_connection(n, n, m, &pairs).expect("smoothing is planar");
    SmoothingResult { state, loops }
}

/// `(-A^2 - A^-2)^k`.
pub fn loop_factor(k: usize) -> LaurentPoly {
    LaurentPoly::from_ints(&[(2, -1), (-2, -1)]).pow(k as u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub coeff: LaurentPoly,
    /// Number of Kauffman states smoothing to this Catalan state.
    pub states: u64,
}

/// Coefficients of every realizable Catalan state of `L(m,n)` from one pass over all `2^{mn}` states.
pub fn coeff_table(m: usize, n: usize) -> Result<HashMap<Connection, TableEntry>, KauffmanError> {
    coeff_table_with(m, n, Convention::Standard, max_cells())
}

pub fn coeff_table_with(
    m: usize,
    n: usize,
    conv: Convention,
    limit: usize,
) -> Result<HashMap<Connection, TableEntry>, KauffmanError> {
    if m * n > limit || m * n > 40 {
        return Err(KauffmanError::TooLarge { m, n, limit });
    }
    let mut raw: HashMap<Connection, HashMap<(i64, usize), u64>> = HashMap::new();
    for bits in 0u64..1 << (m * n) {
        let s = KauffmanState::from_bits(m, n, bits);
        let r = smooth_with(&s, conv);
        *raw.entry(r.state).or_default().entry((s.weight_exponent(), r.loops)).or_default() += 1;
    }
    let max_loops = raw.values().flat_map(|h| h.keys().map(|k| k.1)).max().unwrap_or(0);
    let factors: Vec<LaurentPoly> = (0..=max_loops).map(loop_factor).collect();
    Ok(raw
        .into_iter()
        .map(|(c, h)| {
            let mut coeff = LaurentPoly::zero();
            let mut states = 0;
            for ((e, l), k) in h {
                coeff += &(&factors[l] * &LaurentPoly::from_ints(&[(e, k as i64)]));
                states += k;
            }
            (c, TableEntry { coeff, states })
        })
        .collect())
}

fn check_catalan(c: &Connection, m: usize, n: usize) -> Result<(), KauffmanError> {
    if c.nt() != n || c.nb() != n || c.ht() != m {
        return Err(KauffmanError::NotCatalan { m, n });
    }
    Ok(())
}

/// State-sum coefficient of a single Catalan state.
pub fn bracket_coeff(c: &Connection, m: usize, n: usize) -> Result<LaurentPoly, KauffmanError> {
    check_catalan(c, m, n)?;
    let limit = max_cells();
    if m * n > limit {
        return Err(KauffmanError::TooLarge { m, n, limit });
    }
    let table = coeff_table_with(m, n, Convention::Standard, limit)?;
    Ok(table.get(c).map_or_else(LaurentPoly::zero, |e| e.coeff.clone()))
}

/// All crossingless connections with `nt = nb = n` and `ht = m`.
pub fn enumerate_catalan(m: usize, n: usize) -> Vec<Connection> {
    enumerate_connections(n, n, m)
}

/// Memo for [`coeff_first_row`], keyed by the state (which carries its height).
#[derive(Default)]
pub struct FirstRowMemo {
    map: HashMap<Connection, LaurentPoly>,
}

impl FirstRowMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Coefficient by recursive expansion of the first row.
pub fn coeff_first_row(c: &Connection, m: usize, n: usize, memo: &mut FirstRowMemo) -> Result<LaurentPoly, KauffmanError> {
    check_catalan(c, m, n)?;
    Ok(first_row_rec(c, memo))
}

fn first_row_rec(c: &Connection, memo: &mut FirstRowMemo) -> LaurentPoly {
    if c.ht() == 0 {
        return if *c == Connection::identity(c.nt()) { LaurentPoly::one() } else { LaurentPoly::zero() };
    }
    if let Some(v) = memo.map.get(c) {
        return v.clone();
    }
    let n = c.nt();
    let mut total = LaurentPoly::zero();
    let mut last_j = None;
    let mut cj = None;
    for pair in enumerate_pairs(&c.arcs_j(), n) {
        if last_j.as_ref() != Some(&pair.j) {
            cj = top_row_quotient(c, &pair.j);
            last_j = Some(pair.j.clone());
        }
        let Some(cj) = &cj else { continue };
        let Some(cji) = bottom_quotient(cj, &pair.i) else { continue };
        let sub = first_row_rec(&cji, memo);
        if !sub.is_zero() {
            total += &sub.shift(pair.weight_exponent(n));
        }
    }
    memo.map.insert(c.clone(), total.clone());
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finsets::{enumerate_pairs, phi_inv, psi_inv, s_of};
    use crate::planar::vprod;

    fn c(s: &str) -> Connection {
        s.parse().unwrap()
    }

    #[test]
    fn single_crossing() {
        let plus = smooth(&"+".parse().unwrap());
        let minus = smooth(&"-".parse().unwrap());
        assert_eq!(plus.state, c("conn nt=1 nb=1 ht=1: T1-R1, B1-L1"));
        assert_eq!(minus.state, c("conn nt=1 nb=1 ht=1: T1-L1, R1-B1"));
        assert_eq!((plus.loops, minus.loops), (0, 0));
        let t = coeff_table(1, 1).unwrap();
        assert_eq!(t[&plus.state].coeff, LaurentPoly::a_pow(1));
        assert_eq!(t[&minus.state].coeff, LaurentPoly::a_pow(-1));
        let flipped = smooth_with(&"+".parse().unwrap(), Convention::Flipped);
        assert_eq!(flipped.state, minus.state);
    }

    #[test]
    fn state_literals() {
        let s: KauffmanState = "+-/-+".parse().unwrap();
        assert_eq!((s.m(), s.n()), (2, 2));
        assert_eq!(s.to_string(), "+-/-+");
        assert!("+-/+".parse::<KauffmanState>().is_err());
        assert!("+x".parse::<KauffmanState>().is_err());
    }

    #[test]
    fn row_smoothing_matches_psi_phi() {
        for n in 1..=6 {
            for p in enumerate_pairs(&(0..=n).collect(), n) {
                let s = KauffmanState::from_rows(&[s_of(&p, n)]);
                let r = smooth(&s);
                let want = vprod(&psi_inv(&p.j, n).unwrap(), &phi_inv(&p.i, n).unwrap()).unwrap();
                assert_eq!((r.state, r.loops), want, "{p}");
            }
        }
    }

    #[test]
    fn catalan_counts_and_partition() {
        assert_eq!(enumerate_catalan(1, 1).len(), 2);
        assert_eq!(enumerate_catalan(2, 2).len(), 14);
        for (m, n) in [(1, 1), (1, 3), (2, 2), (3, 2), (3, 3), (1, 9), (2, 4)] {
            let t = coeff_table(m, n).unwrap();
            assert_eq!(t.values().map(|e| e.states).sum::<u64>(), 1 << (m * n));
        }
    }

    #[test]
    fn zero_rows() {
        let mut memo = FirstRowMemo::new();
        assert_eq!(coeff_first_row(&Connection::identity(3), 0, 3, &mut memo).unwrap(), LaurentPoly::one());
        let cap_cup = c("conn nt=2 nb=2 ht=0: T1-T2, B2-B1");
        assert!(coeff_first_row(&cap_cup, 0, 2, &mut memo).unwrap().is_zero());
        assert!(coeff_first_row(&cap_cup, 1, 2, &mut memo).is_err());
    }

    #[test]
    fn first_row_agrees_with_state_sum() {
        for (m, n) in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (4, 2)] {
            let t = coeff_table(m, n).unwrap();
            let mut memo = FirstRowMemo::new();
            for x in enumerate_catalan(m, n) {
                let want = t.get(&x).map_or_else(LaurentPoly::zero, |e| e.coeff.clone());
                assert_eq!(coeff_first_row(&x, m, n, &mut memo).unwrap(), want, "{x}");
            }
        }
    }

    #[test]
    fn guard() {
        let err = coeff_table_with(5, 5, Convention::Standard, 12).unwrap_err();
        assert_eq!(err, KauffmanError::TooLarge { m: 5, n: 5, limit: 12 });
    }
}
