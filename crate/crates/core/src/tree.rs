//! Full binary ordered trees with a canonical preorder bit code
//! (`1` = internal node, `0` = leaf).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedTree {
    code: String,
}

impl OrderedTree {
    /// The trivial tree: a single root.
    pub fn leaf() -> Self {
        OrderedTree { code: "0".to_string() }
    }

    pub fn join(left: &OrderedTree, right: &OrderedTree) -> Self {
        let mut code = String::with_capacity(1 + left.code.len() + right.code.len());
        code.push('1');
        code.push_str(&left.code);
        code.push_str(&right.code);
        OrderedTree { code }
    }

    /// Parses and validates a preorder code.
    pub fn from_code(code: &str) -> Result<Self> {
        if valid_code(code.as_bytes()) {
            Ok(OrderedTree { code: code.to_string() })
        } else {
            Err(Error::InvalidTreeCode(code.to_string()))
        }
    }

    pub(crate) fn from_code_unchecked(code: String) -> Self {
        debug_assert!(valid_code(code.as_bytes()), "{code}");
        OrderedTree { code }
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn is_leaf(&self) -> bool {
        self.code == "0"
    }

    pub fn node_count(&self) -> usize {
        self.code.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.code.bytes().filter(|&b| b == b'0').count()
    }

    pub fn internal_count(&self) -> usize {
        self.code.len() - self.leaf_count()
    }

    /// Left and right subtrees of the root, `None` for the trivial tree.
    pub fn children(&self) -> Option<(OrderedTree, OrderedTree)> {
        if self.is_leaf() {
            return None;
        }
        let bytes = self.code.as_bytes();
        let split = 1 + subtree_len(&bytes[1..]);
        Some((
            OrderedTree { code: self.code[1..split].to_string() },
            OrderedTree { code: self.code[split..].to_string() },
        ))
    }

    pub fn left(&self) -> Option<OrderedTree> {
        self.children().map(|c| c.0)
    }

    pub fn right(&self) -> Option<OrderedTree> {
        self.children().map(|c| c.1)
    }

    /// Depth of the deepest leaf (the trivial tree has depth 0).
    pub fn depth(&self) -> usize {
        match self.children() {
            None => 0,
            Some((l, r)) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Probability that the uniform-split recursion (pick the left leaf count
    /// uniformly in `1..l`) produces this tree, given its leaf count `l`.
    pub fn split_probability(&self) -> f64 {
        match self.children() {
            None => 1.0,
            Some((l, r)) => {
                let leaves = l.leaf_count() + r.leaf_count();
                l.split_probability() * r.split_probability() / (leaves - 1) as f64
            }
        }
    }
}

// Length of the first complete subtree encoded at the start of `bytes`.
fn subtree_len(bytes: &[u8]) -> usize {
    let mut need = 1usize;
    for (i, &b) in bytes.iter().enumerate() {
        need -= 1;
        if b == b'1' {
            need += 2;
        }
        if need == 0 {
            return i + 1;
        }
    }
    bytes.len()
}

fn valid_code(bytes: &[u8]) -> bool {
    let mut need = 1usize;
    for &b in bytes {
        if need == 0 {
            return false;
        }
        match b {
            b'0' => need -= 1,
            b'1' => need += 1,
            _ => return false,
        }
    }
    need == 0
}

impl fmt::Display for OrderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl FromStr for OrderedTree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OrderedTree::from_code(s)
    }
}

/// All trees with exactly `leaves` leaves.
pub fn trees_with_leaves(leaves: usize) -> Vec<OrderedTree> {
    let mut by_leaves: Vec<Vec<OrderedTree>> = vec![Vec::new(), vec![OrderedTree::leaf()]];
    for l in 2..=leaves {
        let mut out = Vec::new();
        for k in 1..l {
            for a in &by_leaves[k] {
                for b in &by_leaves[l - k] {
                    out.push(OrderedTree::join(a, b));
                }
            }
        }
        by_leaves.push(out);
    }
    if leaves == 0 {
        return Vec::new();
    }
    by_leaves.swap_remove(leaves)
}

/// Every full binary ordered tree with at most `max_nodes` nodes, in
/// lexicographic order of their codes.
pub fn enumerate_trees(max_nodes: usize) -> Vec<OrderedTree> {
    assert!(max_nodes >= 1);
    let max_leaves = max_nodes.div_ceil(2);
    let mut all: Vec<OrderedTree> = (1..=max_leaves).flat_map(trees_with_leaves).collect();
    all.sort();
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_trees(1), vec![OrderedTree::leaf()]);
        assert_eq!(enumerate_trees(2).len(), 1);
        assert_eq!(enumerate_trees(3).len(), 2);
        assert_eq!(enumerate_trees(7).len(), 9);
        let codes: Vec<String> = enumerate_trees(5).iter().map(|t| t.to_string()).collect();
        assert_eq!(codes, vec!["0", "100", "10100", "11000"]);
    }

    #[test]
    fn children_of_left_comb() {
        let t = OrderedTree::from_code("11000").unwrap();
        let (l, r) = t.children().unwrap();
        assert_eq!(l.code(), "100");
        assert_eq!(r.code(), "0");
        assert_eq!(t.depth(), 2);
        assert!(OrderedTree::leaf().children().is_none());
    }

    #[test]
    fn rejects_invalid_codes() {
        for bad in ["", "1", "00", "10", "1000", "102", "0100"] {
            assert!(OrderedTree::from_code(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn split_probabilities_sum_to_one() {
        for l in 1..=8 {
            let s: f64 = trees_with_leaves(l).iter().map(|t| t.split_probability()).sum();
            assert!((s - 1.0).abs() < 1e-12, "{l}: {s}");
        }
    }
}
