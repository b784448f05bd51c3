//! Degree bookkeeping shared by the growth models and the Gini formulas.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Node counts keyed by degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeMultiset {
    counts: BTreeMap<u64, u64>,
    order: u64,
}

impl DegreeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_degrees<I: IntoIterator<Item = u64>>(degrees: I) -> Self {
        let mut m = Self::new();
        for d in degrees {
            m.add(d, 1);
        }
        m
    }

    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(counts: I) -> Self {
        let mut m = Self::new();
        for (d, c) in counts {
            m.add(d, c);
        }
        m
    }

    /// Adds `count` nodes of degree `degree`. Zero counts are not stored.
    pub fn add(&mut self, degree: u64, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(degree).or_insert(0) += count;
        self.order += count;
    }

    pub fn count(&self, degree: u64) -> u64 {
        self.counts.get(&degree).copied().unwrap_or(0)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn degree_sum(&self) -> u64 {
        self.counts.iter().map(|(d, c)| d * c).sum()
    }

    /// `(degree, count)` pairs in ascending degree order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&d, &c)| (d, c))
    }

    pub fn distinct_degrees(&self) -> usize {
        self.counts.len()
    }

    /// The same nodes with every degree multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        Self::from_counts(self.iter().map(|(d, c)| (d * factor, c)))
    }

    pub fn as_map(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Tree handshake identity: degree sum equals `2(order - 1)`.
    pub fn is_tree_profile(&self) -> bool {
        self.order >= 1 && self.degree_sum() == 2 * (self.order - 1)
    }
}

/// The two binary growth rules. They share degree updates and differ only in
/// how many insertion slots hang under an outdegree-0 node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinaryModel {
    Bst,
    Pyramid,
}

impl BinaryModel {
    /// White slots carried by a node of outdegree 0.
    pub fn whites_per_leaf(self) -> u64 {
        match self {
            BinaryModel::Bst => 2,
            BinaryModel::Pyramid => 1,
        }
    }
}

/// A slot chosen for the next insertion. The index is the position within
/// its color; blue index 0 is the root's slot whenever the root has exactly
/// one child.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotPick {
    White(u64),
    Blue(u64),
}

/// Degree and insertion-slot counts of a growing binary tree.
///
/// Degrees are graph degrees with the root included, so a root with `k`
/// children has degree `k` and every other node has degree `outdegree + 1`.
/// White slots hang under outdegree-0 nodes, blue slots under outdegree-1
/// nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryTreeState {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    pub white_slots: u64,
    pub blue_slots: u64,
    pub size: u64,
    pub root_outdegree: u8,
}

impl BinaryTreeState {
    /// A lone root with its empty slots.
    pub fn root(model: BinaryModel) -> Self {
        Self {
            n1: 0,
            n2: 0,
            n3: 0,
            white_slots: model.whites_per_leaf(),
            blue_slots: 0,
            size: 1,
            root_outdegree: 0,
        }
    }

    pub fn slot_count(&self) -> u64 {
        self.white_slots + self.blue_slots
    }

    /// Maps a uniform index in `[0, slot_count)` to a slot.
    #[inline]
    pub fn slot_at(&self, index: u64) -> SlotPick {
        if index < self.white_slots {
            SlotPick::White(index)
        } else {
            SlotPick::Blue(index - self.white_slots)
        }
    }

    /// Hangs a new leaf in the chosen slot.
    pub fn insert(&mut self, model: BinaryModel, pick: SlotPick) {
        let whites = model.whites_per_leaf();
        match pick {
            SlotPick::White(_) => {
                debug_assert!(self.white_slots >= whites);
                if self.root_outdegree == 0 {
                    // root: degree 0 -> 1
                    self.n1 += 1;
                    self.root_outdegree = 1;
                } else {
                    self.n1 -= 1;
                    self.n2 += 1;
                }
                // the parent's remaining white slots turn blue (BST) or it
                // gains a blue slot (pyramid); either way the new leaf
                // restores the whites
                self.blue_slots += 1;
            }
            SlotPick::Blue(index) => {
                debug_assert!(self.blue_slots >= 1);
                if self.root_outdegree == 1 && index == 0 {
                    self.n1 -= 1;
                    self.n2 += 1;
                    self.root_outdegree = 2;
                } else {
                    self.n2 -= 1;
                    self.n3 += 1;
                }
                self.blue_slots -= 1;
                self.white_slots += whites;
            }
        }
        self.n1 += 1;
        self.size += 1;
    }

    /// Node counts by outdegree `[o0, o1, o2]`.
    pub fn outdegree_counts(&self) -> [u64; 3] {
        let root = self.root_outdegree;
        let leaves = self.n1 - u64::from(root == 1) + u64::from(root == 0);
        let one_child = self.n2 - u64::from(root == 2) + u64::from(root == 1);
        let two_children = self.n3 + u64::from(root == 2);
        [leaves, one_child, two_children]
    }

    pub fn degree_multiset(&self) -> DegreeMultiset {
        degree_multiset_from_binary(self)
    }

    /// Checks the counting invariants for the given growth rule.
    pub fn check_invariants(&self, model: BinaryModel) -> bool {
        let counted = self.n1 + self.n2 + self.n3;
        let sizes_ok = if self.size == 1 {
            counted == 0 && self.root_outdegree == 0
        } else {
            counted == self.size
        };
        let handshake = self.n1 + 2 * self.n2 + 3 * self.n3 == 2 * (self.size - 1);
        let [o0, o1, o2] = self.outdegree_counts();
        let slots = self.white_slots == model.whites_per_leaf() * o0 && self.blue_slots == o1;
        sizes_ok && handshake && slots && o0 + o1 + o2 == self.size
    }
}

/// Degree multiset of a binary tree; a lone root contributes one node of
/// degree 0.
pub fn degree_multiset_from_binary(state: &BinaryTreeState) -> DegreeMultiset {
    if state.size == 1 {
        return DegreeMultiset::from_counts([(0, 1)]);
    }
    DegreeMultiset::from_counts([(1, state.n1), (2, state.n2), (3, state.n3)])
}

/// Attachment counts per spine node of a caterpillar, in spine order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpineState {
    attachments: Vec<u64>,
}

impl SpineState {
    pub fn new(spine: u64) -> Result<Self> {
        if spine == 0 {
            return Err(invalid("spine length must be at least 1"));
        }
        Ok(Self { attachments: vec![0; spine as usize] })
    }

    pub fn from_attachments(attachments: Vec<u64>) -> Result<Self> {
        if attachments.is_empty() {
            return Err(invalid("spine length must be at least 1"));
        }
        Ok(Self { attachments })
    }

    pub fn spine(&self) -> u64 {
        self.attachments.len() as u64
    }

    pub fn attachments(&self) -> &[u64] {
        &self.attachments
    }

    #[inline]
    pub fn attach(&mut self, node: usize) {
        self.attachments[node] += 1;
    }

    pub fn total(&self) -> u64 {
        self.attachments.iter().sum()
    }

    pub fn order(&self) -> u64 {
        self.spine() + self.total()
    }

    pub fn degree_multiset(&self) -> DegreeMultiset {
        degree_multiset_from_spine(self)
    }
}

/// Degree multiset of a caterpillar: spine ends have degree `X + 1`,
/// interior spine nodes `X + 2`, attachments degree 1. A one-node spine is a
/// star.
pub fn degree_multiset_from_spine(state: &SpineState) -> DegreeMultiset {
    let x = state.attachments();
    let mut m = DegreeMultiset::new();
    match x.len() {
        1 => m.add(x[0], 1),
        len => {
            m.add(x[0] + 1, 1);
            m.add(x[len - 1] + 1, 1);
            for &xi in &x[1..len - 1] {
                m.add(xi + 2, 1);
            }
        }
    }
    m.add(1, state.total());
    m
}
