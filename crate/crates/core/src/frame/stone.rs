use std::collections::BTreeSet;

use crate::category::Violation;

use super::{check_frame_map, BooleanAlgebraView, Frame, FrameError, FrameMap};

/// A finite topological space: points and the list of open sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    pub points: Vec<String>,
    pub opens: Vec<BTreeSet<usize>>,
}

impl FiniteSpace {
    pub fn discrete(points: Vec<String>) -> FiniteSpace {
        let n = points.len();
        let opens = (0..1usize << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect();
        FiniteSpace { points, opens }
    }

    pub fn open_name(&self, u: &BTreeSet<usize>) -> String {
        let inner: Vec<&str> = u.iter().map(|&i| self.points[i].as_str()).collect();
        format!("{{{}}}", inner.join(","))
    }

    /// The frame of opens ordered by inclusion. Opens are listed by size and
    /// then lexicographically, and named in set notation.
    pub fn frame(&self) -> Result<(Frame, Vec<BTreeSet<usize>>), FrameError> {
        let n = self.points.len();
        let opens: BTreeSet<BTreeSet<usize>> = self.opens.iter().cloned().collect();
        if let Some(u) = opens.iter().find(|u| u.iter().any(|&i| i >= n)) {
            return Err(FrameError::NotATopology(format!("open set {u:?} mentions an unknown point")));
        }
        let full: BTreeSet<usize> = (0..n).collect();
        if !opens.contains(&BTreeSet::new()) {
            return Err(FrameError::NotATopology("the empty set is not open".into()));
        }
        if !opens.contains(&full) {
            return Err(FrameError::NotATopology("the whole space is not open".into()));
        }
        for u in &opens {
            for v in &opens {
                let cap: BTreeSet<usize> = u.intersection(v).copied().collect();
                if !opens.contains(&cap) {
                    return Err(FrameError::NotATopology(format!(
                        "{} ∩ {} is not open",
                        self.open_name(u),
                        self.open_name(v)
                    )));
                }
                let cup: BTreeSet<usize> = u.union(v).copied().collect();
                if !opens.contains(&cup) {
                    return Err(FrameError::NotATopology(format!(
                        "{} ∪ {} is not open",
                        self.open_name(u),
                        self.open_name(v)
                    )));
                }
            }
        }
        let mut sorted: Vec<BTreeSet<usize>> = opens.into_iter().collect();
        sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let names = sorted.iter().map(|u| self.open_name(u)).collect();
        let mut pairs = Vec::new();
        for (i, u) in sorted.iter().enumerate() {
            for (j, v) in sorted.iter().enumerate() {
                if u.is_subset(v) {
                    pairs.push((i, j));
                }
            }
        }
        Ok((Frame::new(names, &pairs)?, sorted))
    }
}

pub fn frame_from_opens(points: Vec<String>, opens: Vec<BTreeSet<usize>>) -> Result<Frame, FrameError> {
    FiniteSpace { points, opens }.frame().map(|(f, _)| f)
}

/// A finite Boolean algebra next to the discrete space on its atoms, with
/// `φ(S) = ⋁S` from the opens to the algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoneDuality {
    pub space: FiniteSpace,
    pub opens: Frame,
    pub phi: FrameMap,
}

impl StoneDuality {
    /// `φ` must be a bijective frame map that also preserves complements.
    pub fn violations(&self, b: &BooleanAlgebraView) -> Vec<Violation> {
        let mut out = check_frame_map(&self.opens, &b.frame, &self.phi);
        if !out.is_empty() {
            return out;
        }
        if !self.phi.is_injective() {
            out.push(Violation { law: "injective", witness: "two open sets share a join".into() });
        }
        if !self.phi.is_surjective(&b.frame) {
            out.push(Violation { law: "surjective", witness: "some element is not a join of atoms".into() });
        }
        let full = self.opens.top;
        for s in self.opens.iter() {
            // the complement of an open in a discrete space is the unique open meeting it in ∅ and joining to everything
            let c = self.opens.iter().find(|&t| self.opens.meet(s, t) == self.opens.bottom && self.opens.join(s, t) == full);
            match c {
                Some(t) if self.phi.apply(t) == b.complement[self.phi.apply(s)] => {}
                _ => out.push(Violation { law: "complement", witness: self.opens.name(s).to_string() }),
            }
        }
        out
    }
}

pub fn stone_space(b: &BooleanAlgebraView) -> StoneDuality {
    let atoms = b.atoms();
    let points = atoms.iter().map(|&a| b.frame.name(a).to_string()).collect();
    let space = FiniteSpace::discrete(points);
    let (opens, sets) = space.frame().expect("a discrete space is a topology");
    let phi = sets.iter().map(|s| b.frame.join_all(s.iter().map(|&i| atoms[i]))).collect();
    StoneDuality { space, opens, phi: FrameMap { map: phi } }
}
