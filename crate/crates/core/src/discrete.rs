//! Discrete-time growth: one node per step.

use crate::error::{invalid, Result};
use crate::rng::RandomSource;
use crate::types::{BinaryModel, BinaryTreeState, SlotPick, SpineState};
use crate::urn::{draw_ball, Color};

/// Inserts one node into a uniformly chosen slot.
#[inline]
pub fn step_binary(model: BinaryModel, state: &mut BinaryTreeState, rng: &mut RandomSource) {
    let (color, index) = draw_ball(rng, state.white_slots, state.blue_slots);
    let pick = match color {
        Color::White => SlotPick::White(index),
        Color::Blue => SlotPick::Blue(index),
    };
    state.insert(model, pick);
}

/// Grows a binary tree of `n` nodes from a lone root.
pub fn grow_binary(model: BinaryModel, n: u64, rng: &mut RandomSource) -> Result<BinaryTreeState> {
    if n == 0 {
        return Err(invalid("tree order n must be at least 1"));
    }
    let mut state = BinaryTreeState::root(model);
    for _ in 1..n {
        step_binary(model, &mut state, rng);
    }
    Ok(state)
}

/// Random binary search tree of order `n`, grown by uniform slot selection.
pub fn grow_bst(n: u64, rng: &mut RandomSource) -> Result<BinaryTreeState> {
    grow_binary(BinaryModel::Bst, n, rng)
}

/// Random binary pyramid of order `n`: each recruit joins a uniformly
/// chosen unsaturated node.
pub fn grow_pyramid(n: u64, rng: &mut RandomSource) -> Result<BinaryTreeState> {
    grow_binary(BinaryModel::Pyramid, n, rng)
}

/// BST built by key comparisons from a uniform random permutation of
/// `1..=n`. Kept as a distributional cross-check of [`grow_bst`].
pub fn grow_bst_via_permutation(n: u64, rng: &mut RandomSource) -> Result<BinaryTreeState> {
    if n == 0 {
        return Err(invalid("tree order n must be at least 1"));
    }
    let mut keys: Vec<u64> = (1..=n).collect();
    for i in (1..keys.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        keys.swap(i, j);
    }
    bst_from_permutation(&keys)
}

/// Inserts `keys` in order into an empty BST and summarizes it.
pub fn bst_from_permutation(keys: &[u64]) -> Result<BinaryTreeState> {
    if keys.is_empty() {
        return Err(invalid("permutation must be nonempty"));
    }
    let children = bst_children(keys);
    let mut outdeg = [0u64; 3];
    for (i, c) in children.iter().enumerate() {
        let k = c.iter().filter(|x| x.is_some()).count();
        if i > 0 {
            outdeg[k] += 1;
        }
    }
    let root = children[0].iter().filter(|x| x.is_some()).count() as u8;
    // non-root nodes have degree outdegree + 1; the root has degree = outdegree
    let mut n = [0u64; 4];
    n[1] = outdeg[0];
    n[2] = outdeg[1];
    n[3] = outdeg[2];
    n[root as usize] += 1;
    let leaves = outdeg[0] + u64::from(root == 0);
    let one_child = outdeg[1] + u64::from(root == 1);
    Ok(BinaryTreeState {
        n1: n[1],
        n2: n[2],
        n3: n[3],
        white_slots: 2 * leaves,
        blue_slots: one_child,
        size: keys.len() as u64,
        root_outdegree: root,
    })
}

/// Left/right child indices of the BST built from `keys`, node `i` holding
/// `keys[i]`.
pub(crate) fn bst_children(keys: &[u64]) -> Vec<[Option<usize>; 2]> {
    let mut children: Vec<[Option<usize>; 2]> = vec![[None, None]; keys.len()];
    for (i, &key) in keys.iter().enumerate().skip(1) {
        let mut at = 0;
        loop {
            let side = usize::from(key >= keys[at]);
            match children[at][side] {
                Some(next) => at = next,
                None => {
                    children[at][side] = Some(i);
                    break;
                }
            }
        }
    }
    children
}

/// Uniform caterpillar: each of `n` attachments picks a spine node
/// uniformly.
pub fn grow_caterpillar_uniform(spine: u64, n: u64, rng: &mut RandomSource) -> Result<SpineState> {
    let mut state = SpineState::new(spine)?;
    for _ in 0..n {
        state.attach(rng.below(spine) as usize);
    }
    Ok(state)
}

/// Attachment weight of spine node `i`: its degree, `X_i + 1` at the ends
/// and `X_i + 2` inside.
#[inline]
pub fn pa_weight(attachments: &[u64], i: usize) -> u64 {
    let s = attachments.len();
    if s == 1 || i == 0 || i == s - 1 {
        attachments[i] + 1
    } else {
        attachments[i] + 2
    }
}

pub fn pa_weights(state: &SpineState) -> Vec<u64> {
    let x = state.attachments();
    (0..x.len()).map(|i| pa_weight(x, i)).collect()
}

/// Fenwick tree over integer weights with sampling by prefix descent.
#[derive(Debug, Clone)]
pub(crate) struct WeightTree {
    tree: Vec<u64>,
    total: u64,
}

impl WeightTree {
    pub(crate) fn new(weights: &[u64]) -> Self {
        let n = weights.len();
        let mut tree = vec![0u64; n + 1];
        for (i, &w) in weights.iter().enumerate() {
            let mut j = i + 1;
            while j <= n {
                tree[j] += w;
                j += j & j.wrapping_neg();
            }
        }
        Self { tree, total: weights.iter().sum() }
    }

    pub(crate) fn total(&self) -> u64 {
        self.total
    }

    pub(crate) fn increment(&mut self, index: usize) {
        let n = self.tree.len() - 1;
        let mut j = index + 1;
        while j <= n {
            self.tree[j] += 1;
            j += j & j.wrapping_neg();
        }
        self.total += 1;
    }

    /// Index `i` with `prefix(i) <= target < prefix(i + 1)`.
    pub(crate) fn find(&self, mut target: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }

    /// Weighted draw of one index.
    #[inline]
    pub(crate) fn sample(&self, rng: &mut RandomSource) -> usize {
        self.find(rng.below(self.total))
    }
}

/// Preferential-attachment caterpillar: spine node `i` attracts the next
/// attachment with probability proportional to its current degree. A
/// one-node spine takes every attachment.
pub fn grow_caterpillar_pa(spine: u64, n: u64, rng: &mut RandomSource) -> Result<SpineState> {
    let mut state = SpineState::new(spine)?;
    extend_caterpillar_pa(&mut state, n, rng);
    Ok(state)
}

/// Adds `n` preferential attachments to an existing caterpillar.
pub fn extend_caterpillar_pa(state: &mut SpineState, n: u64, rng: &mut RandomSource) {
    if state.spine() == 1 {
        for _ in 0..n {
            state.attach(0);
        }
        return;
    }
    let mut weights = WeightTree::new(&pa_weights(state));
    for _ in 0..n {
        let i = weights.sample(rng);
        state.attach(i);
        weights.increment(i);
    }
}
