//! Finite frames (complete Heyting algebras) given by an explicit order, with
//! meet and join tables, Heyting operations, the Boolean algebra of
//! `¬¬`-fixpoints, open complements, the Barr cover and finite Stone duality.

mod json;
mod stone;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::category::Violation;

pub use json::FrameSpec;
pub use stone::{frame_from_opens, stone_space, FiniteSpace, StoneDuality};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("invalid frame document: {0}")]
    Parse(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    Duplicate(String),
    #[error("empty carrier")]
    Empty,
    #[error("not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("not a lattice: {0}")]
    NotLattice(String),
    #[error("not distributive: {0}")]
    NotDistributive(String),
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error("not a Boolean algebra: {0}")]
    NotBoolean(String),
}

/// A finite distributive lattice. Finite means every subset has a join, so
/// the frame law reduces to binary distributivity plus `a ∧ 0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub elements: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    pub top: usize,
    pub bottom: usize,
}

impl Frame {
    /// Builds a frame from the generating pairs `a ≤ b`; reflexive and
    /// transitive closure is taken.
    pub fn new(elements: Vec<String>, pairs: &[(usize, usize)]) -> Result<Frame, FrameError> {
        let n = elements.len();
        if n == 0 {
            return Err(FrameError::Empty);
        }
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !seen.insert(e) {
                return Err(FrameError::Duplicate(e.clone()));
            }
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(FrameError::NotPartialOrder(format!("{} and {} are distinct but equivalent", elements[i], elements[j])));
                }
            }
        }
        // least upper bound: the upper bound below every other upper bound
        let bound = |i: usize, j: usize, up: bool| -> Option<usize> {
            let rel = |a: usize, b: usize| if up { leq[a][b] } else { leq[b][a] };
            let bounds: Vec<usize> = (0..n).filter(|&k| rel(i, k) && rel(j, k)).collect();
            bounds.iter().copied().find(|&k| bounds.iter().all(|&m| rel(k, m)))
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                join[i][j] = bound(i, j, true)
                    .ok_or_else(|| FrameError::NotLattice(format!("no join of {} and {}", elements[i], elements[j])))?;
                meet[i][j] = bound(i, j, false)
                    .ok_or_else(|| FrameError::NotLattice(format!("no meet of {} and {}", elements[i], elements[j])))?;
            }
        }
        let top = (0..n).find(|&t| (0..n).all(|i| leq[i][t])).ok_or_else(|| FrameError::NotLattice("no top".into()))?;
        let bottom =
            (0..n).find(|&b| (0..n).all(|i| leq[b][i])).ok_or_else(|| FrameError::NotLattice("no bottom".into()))?;
        let f = Frame { elements, leq, meet, join, top, bottom };
        if let Some(w) = f.distributivity_failure() {
            return Err(FrameError::NotDistributive(w));
        }
        Ok(f)
    }

    fn distributivity_failure(&self) -> Option<String> {
        for a in self.iter() {
            for b in self.iter() {
                for c in self.iter() {
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c)) {
                        let e = &self.elements;
                        return Some(format!("{} ∧ ({} ∨ {})", e[a], e[b], e[c]));
                    }
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Covering pairs `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in self.iter() {
            for b in self.iter() {
                if a != b
                    && self.leq(a, b)
                    && !self.iter().any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// The subposet on `keep`, with its own lattice structure.
    pub fn restrict(&self, keep: &[usize]) -> Result<Frame, FrameError> {
        let elements = keep.iter().map(|&i| self.elements[i].clone()).collect();
        let mut pairs = Vec::new();
        for (x, &i) in keep.iter().enumerate() {
            for (y, &j) in keep.iter().enumerate() {
                if self.leq(i, j) {
                    pairs.push((x, y));
                }
            }
        }
        Frame::new(elements, &pairs)
    }

    pub fn is_boolean(&self) -> bool {
        self.iter().all(|a| self.join(a, negation(self, a)) == self.top)
    }
}

/// `u ⇒ v = ⋁{w | w ∧ u ≤ v}`.
pub fn heyting_implication(f: &Frame, u: usize, v: usize) -> usize {
    f.join_all(f.iter().filter(|&w| f.leq(f.meet(w, u), v)))
}

/// `¬u = u ⇒ 0`.
pub fn negation(f: &Frame, u: usize) -> usize {
    heyting_implication(f, u, f.bottom)
}

pub fn double_negation(f: &Frame, u: usize) -> usize {
    negation(f, negation(f, u))
}

/// A Boolean algebra: a frame with its complement table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanAlgebraView {
    pub frame: Frame,
    pub complement: Vec<usize>,
}

impl BooleanAlgebraView {
    /// Complements are unique in a distributive lattice, so they are
    /// recovered from the order alone.
    pub fn from_frame(f: Frame) -> Result<BooleanAlgebraView, FrameError> {
        let mut complement = Vec::new();
        for a in f.iter() {
            let c = f
                .iter()
                .find(|&b| f.meet(a, b) == f.bottom && f.join(a, b) == f.top)
                .ok_or_else(|| FrameError::NotBoolean(format!("{} has no complement", f.name(a))))?;
            complement.push(c);
        }
        Ok(BooleanAlgebraView { frame: f, complement })
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let f = &self.frame;
        f.iter()
            .filter(|&a| {
                let c = self.complement[a];
                f.meet(a, c) != f.bottom || f.join(a, c) != f.top
            })
            .map(|a| Violation { law: "complement", witness: f.name(a).to_string() })
            .collect()
    }

    /// Elements covering the bottom.
    pub fn atoms(&self) -> Vec<usize> {
        let f = &self.frame;
        f.covers().into_iter().filter(|&(a, _)| a == f.bottom).map(|(_, b)| b).collect()
    }
}

/// `{u | ¬¬u = u}` with the inherited order: meets agree with the frame,
/// joins are `¬¬(u ∨ v)` and the complement is `¬`.
pub fn double_negation_fixpoints(f: &Frame) -> BooleanAlgebraView {
    let keep: Vec<usize> = f.iter().filter(|&u| double_negation(f, u) == u).collect();
    let sub = f.restrict(&keep).expect("¬¬-fixpoints form a Boolean algebra");
    let complement = keep
        .iter()
        .map(|&u| keep.iter().position(|&v| v == negation(f, u)).expect("¬u is a fixpoint"))
        .collect();
    BooleanAlgebraView { frame: sub, complement }
}

/// Element map between frames, by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameMap {
    pub map: Vec<usize>,
}

impl FrameMap {
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_injective(&self) -> bool {
        self.map.iter().collect::<BTreeSet<_>>().len() == self.map.len()
    }

    pub fn is_surjective(&self, target: &Frame) -> bool {
        self.map.iter().collect::<BTreeSet<_>>().len() == target.len()
    }
}

/// Finite meets and joins, top and bottom. Preserving binary joins and the
/// bottom gives every join of a finite frame.
pub fn check_frame_map(src: &Frame, dst: &Frame, h: &FrameMap) -> Vec<Violation> {
    let mut out = Vec::new();
    if h.map.len() != src.len() || h.map.iter().any(|&x| x >= dst.len()) {
        out.push(Violation { law: "map shape", witness: "one target element per source element".into() });
        return out;
    }
    if h.apply(src.top) != dst.top {
        out.push(Violation { law: "top", witness: src.name(src.top).to_string() });
    }
    if h.apply(src.bottom) != dst.bottom {
        out.push(Violation { law: "bottom", witness: src.name(src.bottom).to_string() });
    }
    for a in src.iter() {
        for b in src.iter() {
            if h.apply(src.meet(a, b)) != dst.meet(h.apply(a), h.apply(b)) {
                out.push(Violation { law: "meet", witness: format!("{} ∧ {}", src.name(a), src.name(b)) });
            }
            if h.apply(src.join(a, b)) != dst.join(h.apply(a), h.apply(b)) {
                out.push(Violation { law: "join", witness: format!("{} ∨ {}", src.name(a), src.name(b)) });
            }
        }
    }
    out
}

/// The closed sublocale complementary to the open `u`: the up-set `↑u`,
/// and the surjection `w ↦ w ∨ u`.
pub fn open_complement_frame(f: &Frame, u: usize) -> (Frame, FrameMap) {
    let keep: Vec<usize> = f.iter().filter(|&v| f.leq(u, v)).collect();
    let sub = f.restrict(&keep).expect("up-sets of a frame are frames");
    let map = f.iter().map(|w| keep.iter().position(|&v| v == f.join(w, u)).expect("w ∨ u ≥ u")).collect();
    (sub, FrameMap { map })
}

/// One factor `(X − U)_¬¬` of the Barr cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarrComponent {
    pub open: usize,
    pub algebra: BooleanAlgebraView,
    /// `w ↦ ¬¬(w ∨ u)` computed in `↑u`, as an index into `algebra`.
    pub map: FrameMap,
}

/// The product `∏_U (X − U)_¬¬`, kept as its list of factors. Elements of
/// the product are tuples and all operations act componentwise, so the
/// product itself is never materialised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarrCover {
    pub components: Vec<BarrComponent>,
}

impl BarrCover {
    /// Number of elements of the product, saturating.
    pub fn size(&self) -> u128 {
        self.components.iter().fold(1u128, |acc, c| acc.saturating_mul(c.algebra.len() as u128))
    }

    pub fn image(&self, w: usize) -> Vec<usize> {
        self.components.iter().map(|c| c.map.apply(w)).collect()
    }

    pub fn is_injective(&self, f: &Frame) -> bool {
        f.iter().map(|w| self.image(w)).collect::<BTreeSet<_>>().len() == f.len()
    }

    /// Frame-map laws of the tuple map, checked factor by factor.
    pub fn map_violations(&self, f: &Frame) -> Vec<Violation> {
        let mut out = Vec::new();
        for c in &self.components {
            for v in check_frame_map(f, &c.algebra.frame, &c.map) {
                out.push(Violation { law: v.law, witness: format!("factor {}: {}", f.name(c.open), v.witness) });
            }
        }
        out
    }
}

pub fn barr_cover_frame(f: &Frame) -> BarrCover {
    let components = f
        .iter()
        .map(|u| {
            let (up, to_up) = open_complement_frame(f, u);
            let algebra = double_negation_fixpoints(&up);
            let fixed: Vec<usize> = up.iter().filter(|&x| double_negation(&up, x) == x).collect();
            let map = f
                .iter()
                .map(|w| {
                    let nn = double_negation(&up, to_up.apply(w));
                    fixed.iter().position(|&x| x == nn).expect("¬¬ lands in its fixpoints")
                })
                .collect();
            BarrComponent { open: u, algebra, map: FrameMap { map } }
        })
        .collect();
    BarrCover { components }
}

/// Heyting adjunction, nucleus laws for `¬¬` and Boolean fixpoints.
pub fn frame_law_violations(f: &Frame) -> Vec<Violation> {
    let mut out = Vec::new();
    let e = &f.elements;
    for u in f.iter() {
        for v in f.iter() {
            let imp = heyting_implication(f, u, v);
            for w in f.iter() {
                if f.leq(w, imp) != f.leq(f.meet(w, u), v) {
                    out.push(Violation { law: "heyting adjunction", witness: format!("w={} u={} v={}", e[w], e[u], e[v]) });
                }
            }
            if double_negation(f, f.meet(u, v)) != f.meet(double_negation(f, u), double_negation(f, v)) {
                out.push(Violation { law: "¬¬ preserves meets", witness: format!("{} ∧ {}", e[u], e[v]) });
            }
        }
        let nn = double_negation(f, u);
        if !f.leq(u, nn) {
            out.push(Violation { law: "¬¬ inflationary", witness: e[u].clone() });
        }
        if double_negation(f, nn) != nn {
            out.push(Violation { law: "¬¬ idempotent", witness: e[u].clone() });
        }
    }
    out.extend(double_negation_fixpoints(f).validate());
    out
}
