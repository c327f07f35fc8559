use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{stone::FiniteSpace, BooleanAlgebraView, Frame, FrameError};

/// A frame either as elements with generating pairs `[a, b]` for `a ≤ b`, or
/// as the opens of a finite space. Boolean views carry a complement map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub leq: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub opens: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<BTreeMap<String, String>>,
}

impl FrameSpec {
    pub fn from_json_str(text: &str) -> Result<FrameSpec, FrameError> {
        serde_json::from_str(text).map_err(|e| FrameError::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<Frame, FrameError> {
        if !self.points.is_empty() || !self.opens.is_empty() {
            if !self.elements.is_empty() {
                return Err(FrameError::Parse("give either elements or points and opens".into()));
            }
            let mut opens = Vec::new();
            for u in &self.opens {
                let mut set = BTreeSet::new();
                for p in u {
                    let i = self.points.iter().position(|q| q == p).ok_or_else(|| FrameError::UnknownElement(p.clone()))?;
                    set.insert(i);
                }
                opens.push(set);
            }
            return FiniteSpace { points: self.points.clone(), opens }.frame().map(|(f, _)| f);
        }
        let idx = |n: &String| self.elements.iter().position(|e| e == n).ok_or_else(|| FrameError::UnknownElement(n.clone()));
        let pairs = self.leq.iter().map(|[a, b]| Ok((idx(a)?, idx(b)?))).collect::<Result<Vec<_>, FrameError>>()?;
        Frame::new(self.elements.clone(), &pairs)
    }

    /// Builds a Boolean algebra; a supplied complement map must agree with
    /// the order.
    pub fn build_boolean(&self) -> Result<BooleanAlgebraView, FrameError> {
        let b = BooleanAlgebraView::from_frame(self.build()?)?;
        if let Some(c) = &self.complement {
            for (a, na) in c {
                let i = b.frame.index(a).ok_or_else(|| FrameError::UnknownElement(a.clone()))?;
                let j = b.frame.index(na).ok_or_else(|| FrameError::UnknownElement(na.clone()))?;
                if b.complement[i] != j {
                    return Err(FrameError::NotBoolean(format!("{na} is not the complement of {a}")));
                }
            }
        }
        Ok(b)
    }

    /// Elements and covering pairs.
    pub fn from_frame(f: &Frame) -> FrameSpec {
        FrameSpec {
            elements: f.elements.clone(),
            leq: f.covers().into_iter().map(|(a, b)| [f.name(a).to_string(), f.name(b).to_string()]).collect(),
            ..FrameSpec::default()
        }
    }

    pub fn from_boolean(b: &BooleanAlgebraView) -> FrameSpec {
        let f = &b.frame;
        FrameSpec {
            complement: Some(f.iter().map(|a| (f.name(a).to_string(), f.name(b.complement[a]).to_string())).collect()),
            ..FrameSpec::from_frame(f)
        }
    }
}
