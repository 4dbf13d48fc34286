//! Crossingless connections in a rectangle with `nt` top, `nb` bottom and
//! `ht` points on each of the left and right sides.
//!
//! Boundary points are indexed clockwise from the top-left corner: top
//! `x_1..x_nt` left to right, right `y'_1..y'_ht` top to bottom, bottom
//! `x'_nb..x'_1` right to left, left `y_ht..y_1` bottom to top.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::finsets::{phi_inv, psi_inv, FinSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanarError {
    #[error("arcs {0:?} and {1:?} cross")]
    Crossing((usize, usize), (usize, usize)),
    #[error("bad arity: {0}")]
    BadArity(String),
    #[error("boundary point {0} is unmatched or matched twice")]
    NotInvolution(usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("not a {0}")]
    WrongKind(&'static str),
}

/// A named boundary point; all indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Top(usize),
    Right(usize),
    Bottom(usize),
    Left(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Connection {
    nt: usize,
    nb: usize,
    ht: usize,
    mate: Vec<u16>,
}

/// A connection or the absorbing null value `K0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Extended {
    Conn(Connection),
    K0,
}

impl From<Option<Connection>> for Extended {
    fn from(c: Option<Connection>) -> Self {
        c.map_or(Extended::K0, Extended::Conn)
    }
}

impl Extended {
    pub fn conn(&self) -> Option<&Connection> {
        match self {
            Extended::Conn(c) => Some(c),
            Extended::K0 => None,
        }
    }

    pub fn is_k0(&self) -> bool {
        matches!(self, Extended::K0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Flags {
    pub is_catalan: bool,
    pub is_roof: bool,
    pub is_floor: bool,
    pub is_middle: bool,
    pub is_top: bool,
    pub is_bottom: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryLine {
    /// `l^h_i`: separates the top side and the first `i` side pairs from the rest.
    Horizontal(usize),
    /// `l^v_j`: separates `x_1..x_j`, `x'_1..x'_j` and the left side from the rest.
    Vertical(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// Reflection about a vertical line.
    Reflect,
    /// Rotation by pi.
    Rotate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side {
    Top,
    Right,
    Bottom,
    Left,
}

impl Connection {
    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn ht(&self) -> usize {
        self.ht
    }

    pub fn total(&self) -> usize {
        self.mate.len()
    }

    pub fn mate(&self, i: usize) -> usize {
        self.mate[i] as usize
    }

    pub fn index(&self, p: Point) -> usize {
        point_index(self.nt, self.nb, self.ht, p)
    }

    pub fn point(&self, i: usize) -> Point {
        let (nt, nb, ht) = (self.nt, self.nb, self.ht);
        if i < nt {
            Point::Top(i + 1)
        } else if i < nt + ht {
            Point::Right(i - nt + 1)
        } else if i < nt + ht + nb {
            Point::Bottom(nt + ht + nb - i)
        } else {
            Point::Left(nt + 2 * ht + nb - i)
        }
    }

    fn side(&self, i: usize) -> Side {
        match self.point(i) {
            Point::Top(_) => Side::Top,
            Point::Right(_) => Side::Right,
            Point::Bottom(_) => Side::Bottom,
            Point::Left(_) => Side::Left,
        }
    }

    pub fn mate_of(&self, p: Point) -> Point {
        self.point(self.mate(self.index(p)))
    }

    pub fn joins(&self, p: Point, q: Point) -> bool {
        self.mate(self.index(p)) == self.index(q)
    }

    /// Arcs as index pairs `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.total()).filter(|&a| self.mate(a) > a).map(|a| (a, self.mate(a))).collect()
    }

    /// `L(0,n)`: `n` vertical strands.
    pub fn identity(n: usize) -> Self {
        let pairs: Vec<(Point, Point)> = (1..=n).map(|i| (Point::Top(i), Point::Bottom(i))).collect();
        Self::from_points(n, n, 0, &pairs).unwrap()
    }

    pub fn empty() -> Self {
        Self::identity(0)
    }

    pub fn from_points(nt: usize, nb: usize, ht: usize, arcs: &[(Point, Point)]) -> Result<Self, PlanarError> {
        for &(p, q) in arcs {
            for x in [p, q] {
                let ok = match x {
                    Point::Top(i) => (1..=nt).contains(&i),
                    Point::Bottom(i) => (1..=nb).contains(&i),
                    Point::Left(i) | Point::Right(i) => (1..=ht).contains(&i),
                };
                if !ok {
                    return Err(PlanarError::BadArity(format!("{x:?} outside nt={nt} nb={nb} ht={ht}")));
                }
            }
        }
        let pairs: Vec<(usize, usize)> = arcs
            .iter()
            .map(|&(p, q)| (point_index(nt, nb, ht, p), point_index(nt, nb, ht, q)))
            .collect();
        make_connection(nt, nb, ht, &pairs)
    }

    // Internal constructor for matchings known to be valid.
    fn from_mate(nt: usize, nb: usize, ht: usize, mate: Vec<usize>) -> Self {
        debug_assert_eq!(mate.len(), nt + nb + 2 * ht);
        let c = Self { nt, nb, ht, mate: mate.into_iter().map(|m| m as u16).collect() };
        debug_assert!(c.validate().is_ok(), "invalid internal connection {c}");
        c
    }

    fn validate(&self) -> Result<(), PlanarError> {
        let n = self.total();
        for i in 0..n {
            let m = self.mate(i);
            if m >= n || m == i || self.mate(m) != i {
                return Err(PlanarError::NotInvolution(i));
            }
        }
        let mut stack: Vec<usize> = Vec::new();
        for i in 0..n {
            let m = self.mate(i);
            if m > i {
                stack.push(i);
            } else {
                let top = stack.pop().expect("closing before opening");
                if top != m {
                    let a = (top, self.mate(top));
                    return Err(PlanarError::Crossing(a, (m, i)));
                }
            }
        }
        Ok(())
    }

    fn count_side(&self, a: Side, b: Side) -> usize {
        self.pairs()
            .into_iter()
            .filter(|&(x, y)| {
                let (s, t) = (self.side(x), self.side(y));
                (s, t) == (a, b) || (s, t) == (b, a)
            })
            .count()
    }

    pub fn top_returns(&self) -> usize {
        self.count_side(Side::Top, Side::Top)
    }

    pub fn bottom_returns(&self) -> usize {
        self.count_side(Side::Bottom, Side::Bottom)
    }

    /// Left/right returns plus arcs joining the two sides.
    pub fn side_arcs(&self) -> usize {
        self.count_side(Side::Left, Side::Left)
            + self.count_side(Side::Right, Side::Right)
            + self.count_side(Side::Left, Side::Right)
    }

    pub fn is_roof(&self) -> bool {
        self.bottom_returns() == 0
    }

    pub fn is_floor(&self) -> bool {
        self.top_returns() == 0
    }

    pub fn is_middle(&self) -> bool {
        self.is_roof() && self.is_floor()
    }

    pub fn is_catalan(&self) -> bool {
        self.nt == self.nb
    }

    pub fn classify(&self) -> Flags {
        let roof = self.is_roof();
        let floor = self.is_floor();
        Flags {
            is_catalan: self.is_catalan(),
            is_roof: roof,
            is_floor: floor,
            is_middle: roof && floor,
            is_top: roof && self.ht == 0,
            is_bottom: floor && self.ht == 0,
        }
    }

    /// Left ends of the bottom returns, numbered left to right (`phi_n`).
    pub fn bottom_return_left_ends(&self) -> FinSet {
        let mut out = Vec::new();
        for i in 1..=self.nb {
            if let Point::Bottom(j) = self.mate_of(Point::Bottom(i)) {
                if j > i {
                    out.push(i);
                }
            }
        }
        FinSet::from_sorted(out)
    }

    pub fn right_ends_of_bottom_returns(&self) -> Vec<usize> {
        (1..=self.nb)
            .filter(|&i| matches!(self.mate_of(Point::Bottom(i)), Point::Bottom(j) if j < i))
            .collect()
    }

    /// The first row sequence `(y_1, x_1, ..., x_n, y'_1)` when `ht >= 1`.
    fn first_row(&self) -> Vec<usize> {
        let mut s = vec![self.index(Point::Left(1))];
        s.extend(0..self.nt);
        s.push(self.index(Point::Right(1)));
        s
    }

    /// The set of `j` such that the arc `e_j` belongs to the connection.
    pub fn arcs_j(&self) -> FinSet {
        if self.ht == 0 {
            let js = (1..self.nt).filter(|&j| self.mate(j - 1) == j).collect();
            return FinSet::from_sorted(js);
        }
        let s = self.first_row();
        FinSet::from_sorted((0..=self.nt).filter(|&j| self.mate(s[j]) == s[j + 1]).collect())
    }

    pub fn line_cross_count(&self, l: BoundaryLine) -> usize {
        let inside: Vec<bool> = (0..self.total())
            .map(|k| match (l, self.point(k)) {
                (BoundaryLine::Horizontal(_), Point::Top(_)) => true,
                (BoundaryLine::Horizontal(i), Point::Left(r) | Point::Right(r)) => r <= i,
                (BoundaryLine::Horizontal(_), Point::Bottom(_)) => false,
                (BoundaryLine::Vertical(j), Point::Top(t) | Point::Bottom(t)) => t <= j,
                (BoundaryLine::Vertical(_), Point::Left(_)) => true,
                (BoundaryLine::Vertical(_), Point::Right(_)) => false,
            })
            .collect();
        self.pairs().into_iter().filter(|&(a, b)| inside[a] != inside[b]).count()
    }

    /// Cuts along `l^h_i` into a roof part above and a floor part below.
    pub fn split(&self, i: usize) -> (Connection, Connection) {
        assert!(i <= self.ht, "line index {i} above ht {}", self.ht);
        let total = self.total();
        let upper = |k: usize| match self.point(k) {
            Point::Top(_) => true,
            Point::Left(r) | Point::Right(r) => r <= i,
            Point::Bottom(_) => false,
        };
        // cut arcs ordered left to right by their upper endpoints
        let mut cut: Vec<(usize, usize)> = self
            .pairs()
            .into_iter()
            .filter_map(|(a, b)| match (upper(a), upper(b)) {
                (true, false) => Some((a, b)),
                (false, true) => Some((b, a)),
                _ => None,
            })
            .collect();
        cut.sort_by_key(|&(u, _)| (u + i) % total);
        let k = cut.len();

        let mut up = Vec::new();
        let mut down = Vec::new();
        for (a, b) in self.pairs() {
            if upper(a) && upper(b) {
                up.push((self.point(a), self.point(b)));
            } else if !upper(a) && !upper(b) {
                down.push((lower_point(self.point(a), i), lower_point(self.point(b), i)));
            }
        }
        for (r, &(u, d)) in cut.iter().enumerate() {
            up.push((self.point(u), Point::Bottom(r + 1)));
            down.push((Point::Top(r + 1), lower_point(self.point(d), i)));
        }
        let c1 = Connection::from_points(self.nt, k, i, &up).expect("upper split part");
        let c2 = Connection::from_points(k, self.nb, self.ht - i, &down).expect("lower split part");
        (c1, c2)
    }

    pub fn reflect(&self) -> Connection {
        let t = self.total();
        let f = |p: usize| (self.nt + t - 1 - p) % t;
        self.relabel(self.nt, self.nb, self.ht, f)
    }

    pub fn rotate(&self) -> Connection {
        let t = self.total();
        let f = |p: usize| (p + t - (self.nt + self.ht)) % t;
        self.relabel(self.nb, self.nt, self.ht, f)
    }

    /// Reflection about a horizontal line.
    pub fn flip(&self) -> Connection {
        self.rotate().reflect()
    }

    pub fn symmetry(&self, kind: Symmetry) -> Connection {
        match kind {
            Symmetry::Reflect => self.reflect(),
            Symmetry::Rotate => self.rotate(),
        }
    }

    fn relabel(&self, nt: usize, nb: usize, ht: usize, f: impl Fn(usize) -> usize) -> Connection {
        let mut mate = vec![0; self.total()];
        for a in 0..self.total() {
            mate[f(a)] = f(self.mate(a));
        }
        Connection::from_mate(nt, nb, ht, mate)
    }

    /// Line conditions of a Catalan state of `L(ht, nt)`.
    pub fn line_conditions_hold(&self) -> bool {
        let (m, n) = (self.ht, self.nt);
        (1..m).all(|i| self.line_cross_count(BoundaryLine::Horizontal(i)) <= n)
            && (1..n).all(|j| self.line_cross_count(BoundaryLine::Vertical(j)) <= m)
    }

    /// Horizontal-line conditions used to prune roof states.
    pub fn horizontal_conditions_hold(&self) -> bool {
        (1..=self.ht).all(|i| self.line_cross_count(BoundaryLine::Horizontal(i)) <= self.nt)
    }
}

fn lower_point(p: Point, i: usize) -> Point {
    match p {
        Point::Left(r) => Point::Left(r - i),
        Point::Right(r) => Point::Right(r - i),
        other => other,
    }
}

pub fn point_index(nt: usize, nb: usize, ht: usize, p: Point) -> usize {
    match p {
        Point::Top(i) => i - 1,
        Point::Right(r) => nt + r - 1,
        Point::Bottom(i) => nt + ht + nb - i,
        Point::Left(r) => nt + 2 * ht + nb - r,
    }
}

/// Validates a matching given as clockwise index pairs.
pub fn make_connection(nt: usize, nb: usize, ht: usize, pairs: &[(usize, usize)]) -> Result<Connection, PlanarError> {
    let total = nt + nb + 2 * ht;
    if !total.is_multiple_of(2) {
        return Err(PlanarError::BadArity(format!("odd number of boundary points {total}")));
    }
    if total > u16::MAX as usize {
        return Err(PlanarError::BadArity(format!("too many boundary points {total}")));
    }
    if pairs.len() * 2 != total {
        return Err(PlanarError::BadArity(format!("{} arcs for {total} points", pairs.len())));
    }
    let mut mate = vec![usize::MAX; total];
    for &(a, b) in pairs {
        for x in [a, b] {
            if x >= total {
                return Err(PlanarError::BadArity(format!("index {x} out of range")));
            }
            if mate[x] != usize::MAX || a == b {
                return Err(PlanarError::NotInvolution(x));
            }
        }
        mate[a] = b;
        mate[b] = a;
    }
    let c = Connection { nt, nb, ht, mate: mate.into_iter().map(|m| m as u16).collect() };
    c.validate()?;
    Ok(c)
}

// Endpoint of a piece taking part in a gluing.
type Slot = (usize, usize);

/// Glues pieces along seams, returning the outer connection and closed loops.
fn glue(
    pieces: &[&Connection],
    outer: &[Slot],
    seams: &[(Slot, Slot)],
    dims: (usize, usize, usize),
) -> (Connection, usize) {
    let mut offs = vec![0];
    for p in pieces {
        offs.push(offs.last().unwrap() + p.total());
    }
    let n = *offs.last().unwrap();
    let gid = |s: Slot| offs[s.0] + s.1;
    let mut inner_mate = vec![0usize; n];
    for (k, p) in pieces.iter().enumerate() {
        for a in 0..p.total() {
            inner_mate[offs[k] + a] = offs[k] + p.mate(a);
        }
    }
    let mut seam = vec![usize::MAX; n];
    for &(a, b) in seams {
        seam[gid(a)] = gid(b);
        seam[gid(b)] = gid(a);
    }
    let mut outer_of = vec![usize::MAX; n];
    for (k, &s) in outer.iter().enumerate() {
        outer_of[gid(s)] = k;
    }
    let mut visited = vec![false; n];
    let mut mate = vec![usize::MAX; outer.len()];
    for (k, &s) in outer.iter().enumerate() {
        if mate[k] != usize::MAX {
            continue;
        }
        let mut cur = gid(s);
        loop {
            visited[cur] = true;
            let m = inner_mate[cur];
            visited[m] = true;
            if outer_of[m] != usize::MAX {
                mate[k] = outer_of[m];
                mate[outer_of[m]] = k;
                break;
            }
            cur = seam[m];
        }
    }
    let mut loops = 0;
    for start in 0..n {
        if visited[start] || seam[start] == usize::MAX {
            continue;
        }
        loops += 1;
        let mut cur = start;
        loop {
            visited[cur] = true;
            let m = inner_mate[cur];
            visited[m] = true;
            cur = seam[m];
            if cur == start {
                break;
            }
        }
    }
    (Connection::from_mate(dims.0, dims.1, dims.2, mate), loops)
}

/// Vertical product `t1 *_v t2` (`t1` on top) with the number of closed loops.
pub fn vprod(t1: &Connection, t2: &Connection) -> Option<(Connection, usize)> {
    if t1.nb != t2.nt {
        return None;
    }
    let (nt, nb, ht) = (t1.nt, t2.nb, t1.ht + t2.ht);
    let outer: Vec<Slot> = (0..nt + nb + 2 * ht)
        .map(|k| match Connection::point_of(nt, nb, ht, k) {
            Point::Top(i) => (0, t1.index(Point::Top(i))),
            Point::Bottom(i) => (1, t2.index(Point::Bottom(i))),
            Point::Left(r) if r <= t1.ht => (0, t1.index(Point::Left(r))),
            Point::Left(r) => (1, t2.index(Point::Left(r - t1.ht))),
            Point::Right(r) if r <= t1.ht => (0, t1.index(Point::Right(r))),
            Point::Right(r) => (1, t2.index(Point::Right(r - t1.ht))),
        })
        .collect();
    let seams: Vec<(Slot, Slot)> = (1..=t1.nb)
        .map(|i| ((0, t1.index(Point::Bottom(i))), (1, t2.index(Point::Top(i)))))
        .collect();
    Some(glue(&[t1, t2], &outer, &seams, (nt, nb, ht)))
}

/// Horizontal product `t1 *_h t2` (`t1` on the left) with the number of closed loops.
pub fn hprod(t1: &Connection, t2: &Connection) -> Option<(Connection, usize)> {
    if t1.ht != t2.ht {
        return None;
    }
    let (nt, nb, ht) = (t1.nt + t2.nt, t1.nb + t2.nb, t1.ht);
    let outer: Vec<Slot> = (0..nt + nb + 2 * ht)
        .map(|k| match Connection::point_of(nt, nb, ht, k) {
            Point::Top(i) if i <= t1.nt => (0, t1.index(Point::Top(i))),
            Point::Top(i) => (1, t2.index(Point::Top(i - t1.nt))),
            Point::Bottom(i) if i <= t1.nb => (0, t1.index(Point::Bottom(i))),
            Point::Bottom(i) => (1, t2.index(Point::Bottom(i - t1.nb))),
            Point::Left(r) => (0, t1.index(Point::Left(r))),
            Point::Right(r) => (1, t2.index(Point::Right(r))),
        })
        .collect();
    let seams: Vec<(Slot, Slot)> = (1..=ht)
        .map(|r| ((0, t1.index(Point::Right(r))), (1, t2.index(Point::Left(r)))))
        .collect();
    Some(glue(&[t1, t2], &outer, &seams, (nt, nb, ht)))
}

impl Connection {
    fn point_of(nt: usize, nb: usize, ht: usize, k: usize) -> Point {
        Connection { nt, nb, ht, mate: Vec::new() }.point(k)
    }
}

pub fn vprod_ext(t1: &Extended, t2: &Extended) -> (Extended, usize) {
    match (t1, t2) {
        (Extended::Conn(a), Extended::Conn(b)) => match vprod(a, b) {
            Some((c, l)) => (Extended::Conn(c), l),
            None => (Extended::K0, 0),
        },
        _ => (Extended::K0, 0),
    }
}

pub fn hprod_ext(t1: &Extended, t2: &Extended) -> (Extended, usize) {
    match (t1, t2) {
        (Extended::Conn(a), Extended::Conn(b)) => match hprod(a, b) {
            Some((c, l)) => (Extended::Conn(c), l),
            None => (Extended::K0, 0),
        },
        _ => (Extended::K0, 0),
    }
}

pub fn symmetry(c: &Extended, kind: Symmetry) -> Extended {
    match c {
        Extended::Conn(c) => Extended::Conn(c.symmetry(kind)),
        Extended::K0 => Extended::K0,
    }
}

/// `C_I`: removes the bottom returns of `phi_n^{-1}(I)` from `c`.
pub fn bottom_quotient(c: &Connection, set: &FinSet) -> Option<Connection> {
    if set.is_empty() {
        return Some(c.clone());
    }
    let b = phi_inv(set, c.nb).ok()?;
    let mut removed = vec![false; c.nb + 1];
    for (i, gone) in removed.iter_mut().enumerate().skip(1) {
        if let Point::Bottom(j) = b.mate_of(Point::Bottom(i)) {
            if !c.joins(Point::Bottom(i), Point::Bottom(j)) {
                return None;
            }
            *gone = true;
        }
    }
    let mut relabel = vec![0; c.nb + 1];
    let mut next = 0;
    for i in 1..=c.nb {
        if !removed[i] {
            next += 1;
            relabel[i] = next;
        }
    }
    let map = |p: Point| match p {
        Point::Bottom(i) => Point::Bottom(relabel[i]),
        other => other,
    };
    let arcs: Vec<(Point, Point)> = c
        .pairs()
        .into_iter()
        .map(|(a, b)| (c.point(a), c.point(b)))
        .filter(|&(p, q)| !matches!((p, q), (Point::Bottom(i), Point::Bottom(_)) if removed[i]))
        .map(|(p, q)| (map(p), map(q)))
        .collect();
    Some(Connection::from_points(c.nt, next, c.ht, &arcs).expect("quotient stays planar"))
}

pub fn bottom_quotient_ext(c: &Extended, set: &FinSet) -> Extended {
    c.conn().and_then(|c| bottom_quotient(c, set)).into()
}

/// `C^J`: removes the first-row arcs `e_j`, `j` in `J`, and lowers the sides by one row.
pub fn top_row_quotient(c: &Connection, set: &FinSet) -> Option<Connection> {
    if c.ht == 0 {
        return None;
    }
    psi_inv(set, c.nt).ok()?;
    let s = c.first_row();
    let mut removed = vec![false; s.len()];
    for &j in set.iter() {
        if c.mate(s[j]) != s[j + 1] {
            return None;
        }
        removed[j] = true;
        removed[j + 1] = true;
    }
    let mut new_top = vec![None; c.total()];
    let mut next = 0;
    for (pos, &k) in s.iter().enumerate() {
        if !removed[pos] {
            next += 1;
            new_top[k] = Some(next);
        }
    }
    let map = |k: usize| -> Point {
        if let Some(t) = new_top[k] {
            return Point::Top(t);
        }
        match c.point(k) {
            Point::Left(r) => Point::Left(r - 1),
            Point::Right(r) => Point::Right(r - 1),
            other => other,
        }
    };
    let row: HashSet<usize> = s.iter().enumerate().filter(|(p, _)| removed[*p]).map(|(_, &k)| k).collect();
    let arcs: Vec<(Point, Point)> = c
        .pairs()
        .into_iter()
        .filter(|(a, _)| !row.contains(a))
        .map(|(a, b)| (map(a), map(b)))
        .collect();
    Some(Connection::from_points(next, c.nb, c.ht - 1, &arcs).expect("quotient stays planar"))
}

pub fn top_row_quotient_ext(c: &Extended, set: &FinSet) -> Extended {
    c.conn().and_then(|c| top_row_quotient(c, set)).into()
}

/// Realizability via the line conditions.
pub fn realizable(c: &Connection) -> bool {
    c.is_catalan() && c.line_conditions_hold()
}

/// All noncrossing perfect matchings on `nt + nb + 2 ht` points, in a fixed order.
pub fn enumerate_connections(nt: usize, nb: usize, ht: usize) -> Vec<Connection> {
    let total = nt + nb + 2 * ht;
    if !total.is_multiple_of(2) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut mate = vec![0usize; total];
    fn rec(lo: usize, hi: usize, mate: &mut Vec<usize>, k: &mut dyn FnMut(&mut Vec<usize>), rest: &mut Vec<(usize, usize)>) {
        if lo >= hi {
            if let Some((a, b)) = rest.pop() {
                rec(a, b, mate, k, rest);
                rest.push((a, b));
            } else {
                k(mate);
            }
            return;
        }
        let mut j = lo + 1;
        while j < hi {
            mate[lo] = j;
            mate[j] = lo;
            rest.push((j + 1, hi));
            rec(lo + 1, j, mate, k, rest);
            rest.pop();
            j += 2;
        }
    }
    let mut emit = |m: &mut Vec<usize>| out.push(Connection::from_mate(nt, nb, ht, m.clone()));
    rec(0, total, &mut mate, &mut emit, &mut Vec::new());
    out
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Top(i) => write!(f, "T{i}"),
            Point::Right(i) => write!(f, "R{i}"),
            Point::Bottom(i) => write!(f, "B{i}"),
            Point::Left(i) => write!(f, "L{i}"),
        }
    }
}

impl fmt::Display for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conn nt={} nb={} ht={}:", self.nt, self.nb, self.ht)?;
        for (k, (a, b)) in self.pairs().into_iter().enumerate() {
            let sep = if k == 0 { " " } else { ", " };
            write!(f, "{sep}{}-{}", self.point(a), self.point(b))?;
        }
        Ok(())
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Conn(c) => write!(f, "{c}"),
            Extended::K0 => write!(f, "K0"),
        }
    }
}

fn parse_err<T>(pos: usize, msg: impl Into<String>) -> Result<T, PlanarError> {
    Err(PlanarError::Parse { pos, msg: msg.into() })
}

fn parse_point(tok: &str, pos: usize) -> Result<Point, PlanarError> {
    let tok = tok.trim();
    let mut chars = tok.chars();
    let kind = chars.next();
    let Ok(i) = chars.as_str().parse::<usize>() else {
        return parse_err(pos, format!("bad point '{tok}'"));
    };
    if i == 0 {
        return parse_err(pos, format!("point indices start at 1: '{tok}'"));
    }
    match kind {
        Some('T') => Ok(Point::Top(i)),
        Some('B') => Ok(Point::Bottom(i)),
        Some('L') => Ok(Point::Left(i)),
        Some('R') => Ok(Point::Right(i)),
        _ => parse_err(pos, format!("bad point '{tok}'")),
    }
}

impl FromStr for Connection {
    type Err = PlanarError;

    /// Parses `conn nt=2 nb=2 ht=1: T1-T2, R1-B2, B1-L1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let Some(rest) = s.strip_prefix("conn") else {
            return parse_err(0, "expected 'conn'");
        };
        let Some(colon) = rest.find(':') else {
            return parse_err(s.len(), "expected ':'");
        };
        let mut dims = [None; 3];
        for tok in rest[..colon].split_whitespace() {
            let pos = s.find(tok).unwrap_or(0);
            let Some((key, val)) = tok.split_once('=') else {
                return parse_err(pos, format!("expected key=value, got '{tok}'"));
            };
            let slot = match key {
                "nt" => 0,
                "nb" => 1,
                "ht" => 2,
                _ => return parse_err(pos, format!("unknown key '{key}'")),
            };
            match val.parse::<usize>() {
                Ok(v) => dims[slot] = Some(v),
                Err(_) => return parse_err(pos, format!("bad number '{val}'")),
            }
        }
        let [Some(nt), Some(nb), Some(ht)] = dims else {
            return parse_err(4, "missing nt, nb or ht");
        };
        let body_start = 4 + colon + 1;
        let body = &rest[colon + 1..];
        let mut arcs = Vec::new();
        let mut offset = body_start;
        for part in body.split(',') {
            let here = offset;
            offset += part.len() + 1;
            if part.trim().is_empty() {
                if body.trim().is_empty() {
                    break;
                }
                return parse_err(here, "empty arc");
            }
            let Some((p, q)) = part.split_once('-') else {
                return parse_err(here, format!("expected P-Q, got '{}'", part.trim()));
            };
            arcs.push((parse_point(p, here)?, parse_point(q, here)?));
        }
        Connection::from_points(nt, nb, ht, &arcs)
    }
}

impl FromStr for Extended {
    type Err = PlanarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "K0" {
            Ok(Extended::K0)
        } else {
            s.parse().map(Extended::Conn)
        }
    }
}
