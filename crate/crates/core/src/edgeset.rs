use std::fmt;

use crate::graph::EdgeId;

/// A set of edge ids kept as a sorted vector.
///
/// Set algebra is linear in the operand sizes, which is all the dynamic
/// structures need at the sizes they run at.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct EdgeSet(Vec<EdgeId>);

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet(Vec::new())
    }

    pub fn singleton(e: EdgeId) -> Self {
        EdgeSet(vec![e])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        match self.0.binary_search(&e) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, e);
                true
            }
        }
    }

    pub fn remove(&mut self, e: EdgeId) -> bool {
        match self.0.binary_search(&e) {
            Ok(i) => {
                self.0.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = EdgeId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[EdgeId] {
        &self.0
    }

    fn merge(
        &self,
        other: &EdgeSet,
        keep_left: bool,
        keep_both: bool,
        keep_right: bool,
    ) -> EdgeSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    if keep_left {
                        out.push(a[i]);
                    }
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    if keep_right {
                        out.push(b[j]);
                    }
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if keep_both {
                        out.push(a[i]);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        if keep_left {
            out.extend_from_slice(&a[i..]);
        }
        if keep_right {
            out.extend_from_slice(&b[j..]);
        }
        EdgeSet(out)
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        self.merge(other, true, true, true)
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        self.merge(other, false, true, false)
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        self.merge(other, true, false, false)
    }

    pub fn symmetric_difference(&self, other: &EdgeSet) -> EdgeSet {
        self.merge(other, true, false, true)
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.difference(other).is_empty()
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        let mut v: Vec<EdgeId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        EdgeSet(v)
    }
}

impl<'a> IntoIterator for &'a EdgeSet {
    type Item = &'a EdgeId;
    type IntoIter = std::slice::Iter<'a, EdgeId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter().map(|e| e.0)).finish()
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e.0)?;
        }
        write!(f, "]")
    }
}
