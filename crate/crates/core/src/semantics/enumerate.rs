use std::collections::{BTreeMap, BTreeSet};

use super::{is_model, product, Interpretation, SemanticsError};
use crate::syntax::{Signature, Theory};

/// Candidate interpretations allowed before enumeration refuses to start.
pub const DEFAULT_CEILING: u128 = 10_000_000;

/// The same bound `n` for every sort.
pub fn uniform_bound(sig: &Signature, n: usize) -> BTreeMap<String, usize> {
    sig.sorts.iter().map(|s| (s.clone(), n)).collect()
}

/// Carrier size vectors (sorts in name order) within the bound, by total
/// size and then lexicographically.
fn size_vectors(sig: &Signature, bound: &BTreeMap<String, usize>) -> Vec<Vec<usize>> {
    let limits: Vec<usize> = sig.sorts.iter().map(|s| bound.get(s).copied().unwrap_or(0) + 1).collect();
    let mut all = product(&limits);
    all.sort_by_key(|v| (v.iter().sum::<usize>(), v.clone()));
    all
}

/// Digit layout of the candidates over one choice of carriers.
struct Layout {
    carriers: BTreeMap<String, usize>,
    constants: Vec<(String, usize)>,
    functions: Vec<(String, Vec<usize>, usize)>,
    relations: Vec<(String, Vec<usize>)>,
}

impl Layout {
    fn new(sig: &Signature, sizes: &[usize]) -> Layout {
        let carriers: BTreeMap<String, usize> = sig.sorts.iter().cloned().zip(sizes.iter().copied()).collect();
        let size = |s: &String| carriers[s];
        let constants = sig.constants.iter().map(|(c, s)| (c.clone(), size(s))).collect();
        let mut functions = Vec::new();
        for (f, (args, res)) in &sig.functions {
            let dom: Vec<usize> = args.iter().map(size).collect();
            for a in product(&dom) {
                functions.push((f.clone(), a, size(res)));
            }
        }
        let mut relations = Vec::new();
        for (r, args) in &sig.relations {
            let dom: Vec<usize> = args.iter().map(size).collect();
            for a in product(&dom) {
                relations.push((r.clone(), a));
            }
        }
        Layout { carriers, constants, functions, relations }
    }

    fn radices(&self) -> Vec<usize> {
        self.constants
            .iter()
            .map(|c| c.1)
            .chain(self.functions.iter().map(|f| f.2))
            .chain(self.relations.iter().map(|_| 2))
            .collect()
    }

    fn count(&self) -> u128 {
        self.radices().iter().fold(1u128, |acc, &r| acc.saturating_mul(r as u128))
    }

    fn build(&self, sig: &Signature, digits: &[usize]) -> Interpretation {
        let mut m = Interpretation { carriers: self.carriers.clone(), ..Interpretation::default() };
        let mut d = digits.iter();
        for (c, _) in &self.constants {
            m.constants.insert(c.clone(), *d.next().unwrap());
        }
        for f in sig.functions.keys() {
            m.functions.insert(f.clone(), BTreeMap::new());
        }
        for (f, args, _) in &self.functions {
            m.functions.get_mut(f).unwrap().insert(args.clone(), *d.next().unwrap());
        }
        for r in sig.relations.keys() {
            m.relations.insert(r.clone(), BTreeSet::new());
        }
        for (r, args) in &self.relations {
            if *d.next().unwrap() == 1 {
                m.relations.get_mut(r).unwrap().insert(args.clone());
            }
        }
        m
    }
}

/// Number of candidate interpretations within the bound, saturating.
pub fn candidate_count(t: &Theory, bound: &BTreeMap<String, usize>) -> u128 {
    size_vectors(&t.signature, bound)
        .iter()
        .map(|v| Layout::new(&t.signature, v).count())
        .fold(0u128, u128::saturating_add)
}

/// Lazily enumerated models, in the canonical order: carrier sizes first,
/// then an odometer over constants, function entries and relation bits with
/// the last digit moving fastest.
pub struct ModelStream {
    theory: Theory,
    sizes: std::vec::IntoIter<Vec<usize>>,
    current: Option<(Layout, Vec<usize>, Vec<usize>)>,
    checked: u128,
}

impl ModelStream {
    /// Candidates examined so far.
    pub fn checked(&self) -> u128 {
        self.checked
    }
}

impl Iterator for ModelStream {
    type Item = Interpretation;

    fn next(&mut self) -> Option<Interpretation> {
        loop {
            if self.current.is_none() {
                let v = self.sizes.next()?;
                let layout = Layout::new(&self.theory.signature, &v);
                let radices = layout.radices();
                if radices.contains(&0) {
                    continue;
                }
                let digits = vec![0; radices.len()];
                self.current = Some((layout, radices, digits));
            }
            let (layout, radices, digits) = self.current.as_mut().unwrap();
            let m = layout.build(&self.theory.signature, digits);
            self.checked += 1;
            let mut k = digits.len();
            let exhausted = loop {
                if k == 0 {
                    break true;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < radices[k] {
                    break false;
                }
                digits[k] = 0;
            };
            if exhausted {
                self.current = None;
            }
            if is_model(&m, &self.theory) {
                return Some(m);
            }
        }
    }
}

pub fn enumerate_models_with_ceiling(
    t: &Theory,
    bound: &BTreeMap<String, usize>,
    ceiling: u128,
) -> Result<ModelStream, SemanticsError> {
    let candidates = candidate_count(t, bound);
    if candidates > ceiling {
        return Err(SemanticsError::ResourceLimit { candidates, ceiling });
    }
    Ok(ModelStream {
        theory: t.clone(),
        sizes: size_vectors(&t.signature, bound).into_iter(),
        current: None,
        checked: 0,
    })
}

/// All models within the bound, with the default ceiling.
pub fn enumerate_models(t: &Theory, bound: &BTreeMap<String, usize>) -> Result<Vec<Interpretation>, SemanticsError> {
    Ok(enumerate_models_with_ceiling(t, bound, DEFAULT_CEILING)?.collect())
}
