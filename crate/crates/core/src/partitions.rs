//! Set partitions, non-crossing partitions `NC(n)` and interval partitions
//! `Int(n)`, with the inner/outer classification of non-crossing classes.
//!
//! Elements are 0-based internally; [`SetPartition::from_one_based`] and the
//! JSON form use `1..=n`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MAX_ENUMERATION_SIZE: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n: usize,
    classes: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionKind {
    All,
    NonCrossing,
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassRole {
    Inner,
    Outer,
}

/// Position of an outer class relative to a chosen set `S` of outer classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OuterRelation {
    InS,
    /// Some element lies left of an element of a class in `S`.
    BelowS,
    /// Every element lies right of every element of every class in `S`.
    AboveS,
}

impl SetPartition {
    /// Validates and canonicalizes a partition of `{0, .., n-1}`.
    pub fn new(n: usize, classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut classes = classes;
        for c in &mut classes {
            if c.is_empty() {
                return Err(Error::InvalidParameter("empty class".into()));
            }
            c.sort_unstable();
            for &e in c.iter() {
                if e >= n {
                    return Err(Error::InvalidParameter(format!(
                        "element {} outside 1..={n}",
                        e + 1
                    )));
                }
                if seen[e] {
                    return Err(Error::InvalidParameter(format!(
                        "element {} repeated",
                        e + 1
                    )));
                }
                seen[e] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "element {} not covered",
                missing + 1
            )));
        }
        classes.sort_by_key(|c| c[0]);
        Ok(SetPartition { n, classes })
    }

    /// From 1-based classes; `n` is the largest element.
    pub fn from_one_based(classes: &[Vec<usize>]) -> Result<Self> {
        let n = classes.iter().flatten().copied().max().unwrap_or(0);
        if classes.iter().flatten().any(|&e| e == 0) {
            return Err(Error::InvalidParameter(
                "elements are numbered from 1".into(),
            ));
        }
        let count = classes.iter().map(|c| c.len()).sum::<usize>();
        if n > count {
            return Err(Error::InvalidParameter(format!(
                "classes do not cover 1..={n}"
            )));
        }
        Self::new(
            n,
            classes
                .iter()
                .map(|c| c.iter().map(|e| e - 1).collect())
                .collect(),
        )
    }

    /// From a restricted-growth string: `labels[k]` is the class of element `k`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (k, &l) in labels.iter().enumerate() {
            if l == classes.len() {
                classes.push(Vec::new());
            }
            classes[l].push(k);
        }
        SetPartition {
            n: labels.len(),
            classes,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.classes
            .iter()
            .map(|c| c.iter().map(|e| e + 1).collect())
            .collect()
    }

    /// Class label of each element.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for (k, c) in self.classes.iter().enumerate() {
            for &e in c {
                labels[e] = k;
            }
        }
        labels
    }

    pub fn is_noncrossing(&self) -> bool {
        // a < b < c < d with a, c in one class and b, d in another.
        for (i, a) in self.classes.iter().enumerate() {
            for b in &self.classes[i + 1..] {
                if interleave(a, b) || interleave(b, a) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_interval(&self) -> bool {
        self.classes
            .iter()
            .all(|c| c.windows(2).all(|p| p[1] == p[0] + 1))
    }

    /// Tags each class inner or outer. A class is inner when some other class
    /// has elements strictly on both sides of it.
    pub fn classify_classes(&self) -> Result<Vec<ClassRole>> {
        if !self.is_noncrossing() {
            return Err(Error::Crossing);
        }
        Ok(self.classify_unchecked())
    }

    fn classify_unchecked(&self) -> Vec<ClassRole> {
        self.classes
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let j = b[0];
                let nested =
                    self.classes.iter().enumerate().any(|(l, c)| {
                        l != k && c.iter().any(|&i| i < j) && c.iter().any(|&i| i > j)
                    });
                if nested {
                    ClassRole::Inner
                } else {
                    ClassRole::Outer
                }
            })
            .collect()
    }

    /// Indices of the one-element classes, in canonical order.
    pub fn singletons(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&k| self.classes[k].len() == 1)
            .collect()
    }

    /// Tags every outer class relative to the set `s` of outer class indices;
    /// inner classes get `None`. With `s` empty every outer class is `AboveS`.
    pub fn outer_order_relations(&self, s: &[usize]) -> Result<Vec<Option<OuterRelation>>> {
        let roles = self.classify_classes()?;
        for &k in s {
            if k >= self.classes.len() {
                return Err(Error::InvalidParameter(format!(
                    "class index {k} out of range"
                )));
            }
            if roles[k] == ClassRole::Inner {
                return Err(Error::InnerClassSelected);
            }
        }
        Ok(self.outer_relations_unchecked(&roles, s))
    }

    pub(crate) fn outer_relations_unchecked(
        &self,
        roles: &[ClassRole],
        s: &[usize],
    ) -> Vec<Option<OuterRelation>> {
        let max_in_s = s.iter().map(|&k| *self.classes[k].last().unwrap()).max();
        (0..self.classes.len())
            .map(|k| {
                if roles[k] == ClassRole::Inner {
                    None
                } else if s.contains(&k) {
                    Some(OuterRelation::InS)
                } else {
                    match max_in_s {
                        Some(m) if self.classes[k][0] < m => Some(OuterRelation::BelowS),
                        _ => Some(OuterRelation::AboveS),
                    }
                }
            })
            .collect()
    }
}

fn interleave(a: &[usize], b: &[usize]) -> bool {
    // Exists a1 < b1 < a2 < b2.
    b.iter().enumerate().any(|(i, &b1)| {
        b[i + 1..]
            .iter()
            .any(|&b2| a.iter().any(|&x| x < b1) && a.iter().any(|&x| x > b1 && x < b2))
    })
}

/// Complete, duplicate-free enumeration for `1 <= n <= 12`, in
/// restricted-growth-string lexicographic order.
pub fn enumerate(kind: PartitionKind, n: usize) -> Result<Vec<SetPartition>> {
    if n == 0 || n > MAX_ENUMERATION_SIZE {
        return Err(Error::SizeOutOfRange {
            n,
            min: 1,
            max: MAX_ENUMERATION_SIZE,
        });
    }
    Ok(generate(kind, n))
}

fn generate(kind: PartitionKind, n: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    let mut labels = Vec::with_capacity(n);
    let mut lasts: Vec<usize> = Vec::new();
    let mut mins: Vec<usize> = Vec::new();
    rgs(kind, n, &mut labels, &mut lasts, &mut mins, &mut out);
    out
}

fn rgs(
    kind: PartitionKind,
    n: usize,
    labels: &mut Vec<usize>,
    lasts: &mut Vec<usize>,
    mins: &mut Vec<usize>,
    out: &mut Vec<SetPartition>,
) {
    let k = labels.len();
    if k == n {
        out.push(SetPartition::from_labels(labels));
        return;
    }
    for c in 0..=lasts.len() {
        let fresh = c == lasts.len();
        if !fresh {
            let allowed = match kind {
                PartitionKind::All => true,
                PartitionKind::Interval => lasts[c] == k - 1,
                // Joining c is crossing-free iff every element between its last
                // element and k belongs to a class opened after that element.
                PartitionKind::NonCrossing => (lasts[c] + 1..k).all(|m| mins[labels[m]] > lasts[c]),
            };
            if !allowed {
                continue;
            }
        }
        labels.push(c);
        let saved = if fresh {
            lasts.push(k);
            mins.push(k);
            None
        } else {
            Some(std::mem::replace(&mut lasts[c], k))
        };
        rgs(kind, n, labels, lasts, mins, out);
        labels.pop();
        match saved {
            None => {
                lasts.pop();
                mins.pop();
            }
            Some(prev) => lasts[c] = prev,
        }
    }
}

/// A non-crossing partition with its class roles precomputed.
#[derive(Clone, Debug)]
pub struct ClassifiedPartition {
    pub partition: SetPartition,
    pub roles: Vec<ClassRole>,
}

const CACHE_LIMIT: usize = MAX_ENUMERATION_SIZE;

/// Cached `NC(n)` with roles, `0 <= n <= 12`; `NC(0)` is the empty partition.
pub fn noncrossing_classified(n: usize) -> &'static [ClassifiedPartition] {
    static CACHE: [OnceLock<Vec<ClassifiedPartition>>; CACHE_LIMIT + 1] =
        [const { OnceLock::new() }; CACHE_LIMIT + 1];
    assert!(n <= CACHE_LIMIT, "NC({n}) exceeds the cached range");
    CACHE[n].get_or_init(|| {
        let parts = if n == 0 {
            vec![SetPartition {
                n: 0,
                classes: Vec::new(),
            }]
        } else {
            generate(PartitionKind::NonCrossing, n)
        };
        parts
            .into_iter()
            .map(|p| {
                let roles = p.classify_unchecked();
                ClassifiedPartition {
                    partition: p,
                    roles,
                }
            })
            .collect()
    })
}

/// Cached `Int(n)`, `0 <= n <= 12`.
pub fn interval_partitions(n: usize) -> &'static [SetPartition] {
    static CACHE: [OnceLock<Vec<SetPartition>>; CACHE_LIMIT + 1] =
        [const { OnceLock::new() }; CACHE_LIMIT + 1];
    assert!(n <= CACHE_LIMIT, "Int({n}) exceeds the cached range");
    CACHE[n].get_or_init(|| {
        if n == 0 {
            vec![SetPartition {
                n: 0,
                classes: Vec::new(),
            }]
        } else {
            generate(PartitionKind::Interval, n)
        }
    })
}
