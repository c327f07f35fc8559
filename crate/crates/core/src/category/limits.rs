use serde::Serialize;

use super::{Arr, FiniteCategory, Obj};

/// Which finite limits exist, by exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteLimitReport {
    pub terminal: Option<String>,
    pub binary_products: bool,
    pub equalizers: bool,
    /// First pair or parallel pair lacking a limit, if any.
    pub missing: Option<String>,
}

impl FiniteLimitReport {
    pub fn has_finite_limits(&self) -> bool {
        self.terminal.is_some() && self.binary_products && self.equalizers
    }
}

fn is_terminal(c: &FiniteCategory, t: Obj) -> bool {
    c.objects().all(|o| c.hom(o, t).len() == 1)
}

fn is_product(c: &FiniteCategory, p1: Arr, p2: Arr) -> bool {
    let p = c.dom(p1);
    c.objects().all(|x| {
        c.hom(x, c.cod(p1)).into_iter().all(|f| {
            c.hom(x, c.cod(p2)).into_iter().all(|g| {
                c.hom(x, p).into_iter().filter(|&h| c.then(p1, h) == f && c.then(p2, h) == g).count() == 1
            })
        })
    })
}

fn is_equalizer(c: &FiniteCategory, e: Arr, f: Arr, g: Arr) -> bool {
    if c.then(f, e) != c.then(g, e) {
        return false;
    }
    let q = c.dom(e);
    c.objects().all(|x| {
        c.hom(x, c.dom(f)).into_iter().filter(|&k| c.then(f, k) == c.then(g, k)).all(|k| {
            c.hom(x, q).into_iter().filter(|&h| c.then(e, h) == k).count() == 1
        })
    })
}

pub fn finite_limits(c: &FiniteCategory) -> FiniteLimitReport {
    let terminal = c.objects().find(|&t| is_terminal(c, t)).map(|t| c.obj_name(t).to_string());
    let mut missing = None;
    let mut binary_products = true;
    'pairs: for a in c.objects() {
        for b in c.objects() {
            let found = c.objects().any(|p| {
                c.hom(p, a).into_iter().any(|p1| c.hom(p, b).into_iter().any(|p2| is_product(c, p1, p2)))
            });
            if !found {
                binary_products = false;
                missing = Some(format!("product of {} and {}", c.obj_name(a), c.obj_name(b)));
                break 'pairs;
            }
        }
    }
    let mut equalizers = true;
    'par: for f in c.arrows() {
        for g in c.hom(c.dom(f), c.cod(f)) {
            let found = c.arrows_into(c.dom(f)).into_iter().any(|e| is_equalizer(c, e, f, g));
            if !found {
                equalizers = false;
                missing.get_or_insert(format!("equalizer of {} and {}", c.arr_name(f), c.arr_name(g)));
                break 'par;
            }
        }
    }
    FiniteLimitReport { terminal, binary_products, equalizers, missing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::tests::{diamond, names};

    #[test]
    fn lattice_has_finite_limits() {
        let r = finite_limits(&diamond());
        assert_eq!(r.terminal.as_deref(), Some("1"));
        assert!(r.has_finite_limits());
    }

    #[test]
    fn two_points_lack_a_terminal_object() {
        let r = finite_limits(&FiniteCategory::discrete(&names(&["p", "q"])));
        assert!(r.terminal.is_none());
        assert!(!r.binary_products);
        assert!(r.equalizers);
    }
}
