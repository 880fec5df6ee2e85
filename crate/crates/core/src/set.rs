//! Subsets of a finite abelian group, backed by a sorted member list and a
//! membership bitset.

use std::fmt::Write as _;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Group, MAX_MEMBERSHIP_ORDER};
use crate::harmonic::FunctionTable;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSet {
    group: Group,
    members: Vec<usize>,
    bits: Vec<u64>,
}

impl GroupSet {
    pub fn new(group: Group, members: impl IntoIterator<Item = usize>) -> Result<GroupSet> {
        let n = group.order();
        if n > MAX_MEMBERSHIP_ORDER {
            return Err(Error::SizeLimit {
                what: "membership table",
                limit: MAX_MEMBERSHIP_ORDER,
                actual: n,
            });
        }
        let mut bits = vec![0u64; n.div_ceil(64)];
        for m in members {
            if m >= n {
                return Err(Error::IndexOutOfRange { index: m, order: n });
            }
            bits[m / 64] |= 1 << (m % 64);
        }
        Ok(GroupSet::from_bits(group, bits))
    }

    fn from_bits(group: Group, bits: Vec<u64>) -> GroupSet {
        let mut members = Vec::new();
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                members.push(w * 64 + b);
                word &= word - 1;
            }
        }
        GroupSet {
            group,
            members,
            bits,
        }
    }

    pub fn empty(group: Group) -> Result<GroupSet> {
        GroupSet::new(group, std::iter::empty())
    }

    pub fn full(group: Group) -> Result<GroupSet> {
        let n = group.order();
        GroupSet::new(group, 0..n)
    }

    pub fn from_predicate(group: Group, pred: impl Fn(usize) -> bool) -> Result<GroupSet> {
        let n = group.order();
        GroupSet::new(group, (0..n).filter(|&i| pred(i)))
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.group.order() && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn indicator(&self) -> FunctionTable {
        FunctionTable::indicator(self.group.clone(), &self.members)
            .expect("members are in range by construction")
    }

    pub fn negate(&self) -> GroupSet {
        let g = &self.group;
        GroupSet::new(g.clone(), self.iter().map(|a| g.neg_idx(a))).expect("in range")
    }

    /// `A + z`.
    pub fn translate(&self, z: usize) -> GroupSet {
        let g = &self.group;
        GroupSet::new(g.clone(), self.iter().map(|a| g.add_idx(a, z))).expect("in range")
    }

    pub fn intersect(&self, other: &GroupSet) -> Result<GroupSet> {
        self.group.ensure_same(&other.group)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect();
        Ok(GroupSet::from_bits(self.group.clone(), bits))
    }

    pub fn union(&self, other: &GroupSet) -> Result<GroupSet> {
        self.group.ensure_same(&other.group)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect();
        Ok(GroupSet::from_bits(self.group.clone(), bits))
    }

    pub fn is_subset(&self, other: &GroupSet) -> bool {
        self.group == other.group && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection_len(&self, other: &GroupSet) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Set file: group spec on the first line, then one element per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.group);
        for m in self.iter() {
            writeln!(out, "{}", self.group.format_element(m)).expect("String write");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<GroupSet> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty set file".into()))?;
        let group: Group = header.parse()?;
        let members = lines
            .map(|l| group.parse_element(l))
            .collect::<Result<Vec<_>>>()?;
        GroupSet::new(group, members)
    }
}

impl Serialize for GroupSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GroupSet", 3)?;
        st.serialize_field("group", &self.group.to_string())?;
        st.serialize_field("size", &self.len())?;
        st.serialize_field("members", &self.members)?;
        st.end()
    }
}

/// Subgroup generated by `gens` (closure under addition).
pub fn generated_subgroup(group: &Group, gens: &[usize]) -> Result<GroupSet> {
    let n = group.order();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut members = vec![0usize];
    let mut frontier = vec![0usize];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = group.add_idx(x, g);
            if !seen[y] {
                seen[y] = true;
                members.push(y);
                frontier.push(y);
            }
        }
    }
    GroupSet::new(group.clone(), members)
}
