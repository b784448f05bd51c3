//! Exact expectations for small orders by exhaustive enumeration.
//!
//! These build every tree explicitly (node lists and edges, not slot
//! counts) and evaluate the Gini index with the quadratic pairwise loop in
//! exact rational arithmetic, so they share no code path with the growth
//! models or the fast Gini routines they check.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::discrete::bst_children;
use crate::error::{invalid, Error, Result};
use crate::experiments::TreeClass;

pub type Exact = Ratio<i128>;

pub const MAX_BRUTE_FORCE_ORDER: u64 = 8;

/// Enumerations larger than this many leaves are refused.
pub const MAX_CATERPILLAR_HISTORIES: u64 = 1 << 20;

pub const MAX_CATERPILLAR_ATTACHMENTS: u64 = 20;

pub fn exact_to_f64(x: &Exact) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Degree Gini of an explicit degree list via the quadratic pairwise loop.
pub fn exact_gini(degrees: &[u64]) -> Result<Exact> {
    let n = degrees.len() as i128;
    let total: i128 = degrees.iter().map(|&d| d as i128).sum();
    if n == 0 || total == 0 {
        return Err(Error::UndefinedIndex);
    }
    let mut pairs: i128 = 0;
    for i in 0..degrees.len() {
        for j in i + 1..degrees.len() {
            pairs += (degrees[i] as i128 - degrees[j] as i128).abs();
        }
    }
    Ok(Exact::new(pairs, n * total))
}

/// Degrees from an undirected edge list over nodes `0..n`.
pub fn degrees_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<u64> {
    let mut deg = vec![0u64; n];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg
}

fn check_order(n: u64) -> Result<()> {
    if (1..=MAX_BRUTE_FORCE_ORDER).contains(&n) {
        Ok(())
    } else {
        Err(invalid(format!("brute force needs 1 <= n <= {MAX_BRUTE_FORCE_ORDER}, got {n}")))
    }
}

fn permutations(n: usize) -> Vec<Vec<u64>> {
    fn go(prefix: &mut Vec<u64>, used: &mut [bool], out: &mut Vec<Vec<u64>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k as u64 + 1);
                go(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn bst_edges(keys: &[u64]) -> Vec<(usize, usize)> {
    bst_children(keys)
        .iter()
        .enumerate()
        .flat_map(|(p, c)| c.iter().flatten().map(move |&ch| (p, ch)))
        .collect()
}

fn bst_shape(children: &[[Option<usize>; 2]], at: Option<usize>) -> String {
    match at {
        None => ".".to_string(),
        Some(i) => format!(
            "({},{})",
            bst_shape(children, children[i][0]),
            bst_shape(children, children[i][1])
        ),
    }
}

/// Exact expected degree Gini of a random BST of order `n`, averaged over
/// all `n!` insertion orders. Order 1 is undefined (a lone root has degree 0).
pub fn brute_force_bst(n: u64) -> Result<Exact> {
    check_order(n)?;
    let perms = permutations(n as usize);
    let mut sum = Exact::from_integer(0);
    for p in &perms {
        sum += exact_gini(&degrees_from_edges(p.len(), &bst_edges(p)))?;
    }
    Ok(sum / Exact::from_integer(perms.len() as i128))
}

/// Probability of each BST shape of order `n`. Shapes are written
/// `(left,right)` with `.` for an empty subtree.
pub fn bst_shape_distribution(n: u64) -> Result<BTreeMap<String, Exact>> {
    check_order(n)?;
    let perms = permutations(n as usize);
    let weight = Exact::new(1, perms.len() as i128);
    let mut out = BTreeMap::new();
    for p in &perms {
        let children = bst_children(p);
        *out.entry(bst_shape(&children, Some(0))).or_insert(Exact::from_integer(0)) += weight;
    }
    Ok(out)
}

/// Every recruitment history of a binary pyramid of order `n` with its
/// probability. A history is the parent of each recruit, nodes numbered
/// `1..=n` by arrival.
pub fn pyramid_histories(n: u64) -> Result<Vec<(Vec<usize>, Exact)>> {
    check_order(n)?;
    fn go(
        n: usize,
        parents: &mut Vec<usize>,
        outdeg: &mut Vec<u8>,
        prob: Exact,
        out: &mut Vec<(Vec<usize>, Exact)>,
    ) {
        if outdeg.len() == n {
            out.push((parents.clone(), prob));
            return;
        }
        let open: Vec<usize> = (0..outdeg.len()).filter(|&i| outdeg[i] < 2).collect();
        let branch = prob / Exact::from_integer(open.len() as i128);
        for &p in &open {
            outdeg[p] += 1;
            outdeg.push(0);
            parents.push(p + 1);
            go(n, parents, outdeg, branch, out);
            parents.pop();
            outdeg.pop();
            outdeg[p] -= 1;
        }
    }
    let mut out = Vec::new();
    go(n as usize, &mut Vec::new(), &mut vec![0], Exact::from_integer(1), &mut out);
    Ok(out)
}

/// Exact expected degree Gini of a random binary pyramid of order `n`.
pub fn brute_force_pyramid(n: u64) -> Result<Exact> {
    let mut sum = Exact::from_integer(0);
    for (parents, prob) in pyramid_histories(n)? {
        let edges: Vec<(usize, usize)> =
            parents.iter().enumerate().map(|(i, &p)| (p - 1, i + 1)).collect();
        sum += prob * exact_gini(&degrees_from_edges(parents.len() + 1, &edges))?;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaterpillarRule {
    Uniform,
    Preferential,
}

/// Caterpillar built explicitly: spine path `0..s`, then one leaf per
/// attachment.
pub fn caterpillar_edges(attachments: &[u64]) -> (usize, Vec<(usize, usize)>) {
    let s = attachments.len();
    let mut edges: Vec<(usize, usize)> = (1..s).map(|i| (i - 1, i)).collect();
    let mut next = s;
    for (i, &x) in attachments.iter().enumerate() {
        for _ in 0..x {
            edges.push((i, next));
            next += 1;
        }
    }
    (next, edges)
}

/// Exact expected degree Gini of a caterpillar with spine `s` after `n`
/// attachments, over every attachment sequence.
pub fn brute_force_caterpillar(rule: CaterpillarRule, spine: u64, n: u64) -> Result<Exact> {
    if spine == 0 {
        return Err(invalid("spine length must be at least 1"));
    }
    if n > MAX_CATERPILLAR_ATTACHMENTS {
        return Err(invalid(format!("at most {MAX_CATERPILLAR_ATTACHMENTS} attachments can be enumerated, got {n}")));
    }
    if spine.checked_pow(n as u32).is_none_or(|h| h > MAX_CATERPILLAR_HISTORIES) {
        return Err(invalid(format!("{spine}^{n} histories exceed the enumeration cap")));
    }
    fn go(
        rule: CaterpillarRule,
        left: u64,
        x: &mut Vec<u64>,
        prob: Exact,
        sum: &mut Exact,
    ) -> Result<()> {
        if left == 0 {
            let (order, edges) = caterpillar_edges(x);
            *sum += prob * exact_gini(&degrees_from_edges(order, &edges))?;
            return Ok(());
        }
        let s = x.len();
        // current spine degrees from the explicit caterpillar
        let weights: Vec<i128> = match rule {
            CaterpillarRule::Uniform => vec![1; s],
            CaterpillarRule::Preferential => {
                let (order, edges) = caterpillar_edges(x);
                let deg = degrees_from_edges(order, &edges);
                // a one-node spine holds degree X_1; give it X_1 + 1 like an end
                deg[..s].iter().map(|&d| d as i128 + i128::from(s == 1)).collect()
            }
        };
        let total: i128 = weights.iter().sum();
        for i in 0..s {
            x[i] += 1;
            go(rule, left - 1, x, prob * Exact::new(weights[i], total), sum)?;
            x[i] -= 1;
        }
        Ok(())
    }
    let mut sum = Exact::from_integer(0);
    go(rule, n, &mut vec![0; spine as usize], Exact::from_integer(1), &mut sum)?;
    Ok(sum)
}

/// Exact expected degree Gini of one class at order `n` (binary classes) or
/// after `n` attachments to a spine of length `spine` (caterpillars).
pub fn exact_expectation(class: TreeClass, n: u64, spine: u64) -> Result<Exact> {
    match class {
        TreeClass::Bst => brute_force_bst(n),
        TreeClass::Pyramid => brute_force_pyramid(n),
        TreeClass::CaterpillarUniform => brute_force_caterpillar(CaterpillarRule::Uniform, spine, n),
        TreeClass::CaterpillarPa => brute_force_caterpillar(CaterpillarRule::Preferential, spine, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bst_small() {
        assert_eq!(brute_force_bst(2).unwrap(), Exact::from_integer(0));
        assert_eq!(brute_force_bst(3).unwrap(), Exact::new(1, 6));
        assert!(matches!(brute_force_bst(1), Err(Error::UndefinedIndex)));
        assert!(brute_force_bst(0).is_err());
        assert!(brute_force_bst(9).is_err());
    }

    #[test]
    fn bst_order_three_shapes() {
        let d = bst_shape_distribution(3).unwrap();
        assert_eq!(d.len(), 5);
        let mut probs: Vec<Exact> = d.values().copied().collect();
        probs.sort();
        let sixth = Exact::new(1, 6);
        assert_eq!(probs, vec![sixth, sixth, sixth, sixth, Exact::new(2, 6)]);
        assert_eq!(d["((.,.),(.,.))"], Exact::new(1, 3));
    }

    #[test]
    fn pyramid_order_four_histories() {
        let h: BTreeMap<Vec<usize>, Exact> = pyramid_histories(4).unwrap().into_iter().collect();
        let sixth = Exact::new(1, 6);
        let quarter = Exact::new(1, 4);
        assert_eq!(h.len(), 5);
        assert_eq!(h[&vec![1, 2, 3]], sixth);
        assert_eq!(h[&vec![1, 2, 2]], sixth);
        assert_eq!(h[&vec![1, 2, 1]], sixth);
        assert_eq!(h[&vec![1, 1, 2]], quarter);
        assert_eq!(h[&vec![1, 1, 3]], quarter);
    }

    #[test]
    fn pyramid_small() {
        assert_eq!(brute_force_pyramid(2).unwrap(), Exact::from_integer(0));
        assert_eq!(brute_force_pyramid(3).unwrap(), Exact::new(1, 6));
        // shapes at order 4: chain 1/6, star-under-2 1/4, others 1/6
        // chain {1:2,2:2} -> 4/24; a degree-3 node {3:1,1:3} -> 1/4
        let expected = Exact::new(1, 6) * Exact::new(1, 6)      // chain 1-2-3-4
            + Exact::new(1, 6) * Exact::new(1, 4)               // 2 saturated
            + Exact::new(1, 6) * Exact::new(1, 6)               // 1-2-3, 1-4
            + Exact::new(1, 4) * Exact::new(1, 6)               // 1-2-4, 1-3
            + Exact::new(1, 4) * Exact::new(1, 6); // 1-2, 1-3-4
        assert_eq!(brute_force_pyramid(4).unwrap(), expected);
    }

    #[test]
    fn enumeration_caps() {
        assert!(brute_force_caterpillar(CaterpillarRule::Uniform, 1, 21).is_err());
        assert!(brute_force_caterpillar(CaterpillarRule::Uniform, 1, 20).is_ok());
        assert!(brute_force_caterpillar(CaterpillarRule::Uniform, 3, 13).is_err());
    }

    #[test]
    fn bare_spine_is_a_path() {
        let path = brute_force_caterpillar(CaterpillarRule::Uniform, 3, 0).unwrap();
        assert_eq!(path, Exact::new(1, 6));
    }

    #[test]
    fn caterpillar_one_attachment() {
        // s = 2, one attachment: always a 3-node path
        for rule in [CaterpillarRule::Uniform, CaterpillarRule::Preferential] {
            assert_eq!(brute_force_caterpillar(rule, 2, 1).unwrap(), Exact::new(1, 6));
        }
    }

    #[test]
    fn exact_gini_examples() {
        assert_eq!(exact_gini(&[3, 1, 1, 1]).unwrap(), Exact::new(1, 4));
        assert_eq!(exact_gini(&[1, 2, 1]).unwrap(), Exact::new(1, 6));
        assert!(exact_gini(&[0]).is_err());
    }
}
