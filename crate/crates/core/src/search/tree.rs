//! Decision trees over Boolean variables, with an optional interval-query
//! node kind for tensor selector blocks.
//!
//! Text form, one node per line in preorder with the root first; children are
//! referred to by 0-based line numbers:
//!
//! ```text
//! V <var> <child if 0> <child if 1>
//! B <block> <coord> <lo> <hi> <child if yes> <child if no>
//! L <label>
//! ```

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::Assignment;
use crate::lifting::TensorParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Query {
        var: u32,
        zero: usize,
        one: usize,
    },
    /// Yes iff some `y_{block,coord,a}` with `a` in `lo..=hi` is set.
    Interval {
        block: u32,
        coord: u32,
        lo: u32,
        hi: u32,
        yes: usize,
        no: usize,
    },
    Leaf(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("interval nodes need a tensor layout")]
    MissingLayout,
}

/// One step of an evaluation path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Var {
        var: u32,
        value: bool,
    },
    Interval {
        block: u32,
        coord: u32,
        lo: u32,
        hi: u32,
        yes: bool,
    },
}

/// A decision tree stored as an arena; `root` indexes into `nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    root: usize,
    tensor: Option<TensorParams>,
}

impl DecisionTree {
    pub fn leaf(label: usize) -> Self {
        DecisionTree {
            nodes: vec![Node::Leaf(label)],
            root: 0,
            tensor: None,
        }
    }

    /// A tree from an arena and its root. Panics on dangling children.
    pub fn from_nodes(nodes: Vec<Node>, root: usize) -> Self {
        for node in &nodes {
            let kids = match *node {
                Node::Query { zero, one, .. } => [zero, one],
                Node::Interval { yes, no, .. } => [yes, no],
                Node::Leaf(_) => continue,
            };
            assert!(kids.iter().all(|&c| c < nodes.len()), "dangling child");
        }
        assert!(root < nodes.len());
        DecisionTree {
            nodes,
            root,
            tensor: None,
        }
    }

    /// Attaches the tensor layout used to evaluate interval nodes.
    pub fn with_tensor_layout(mut self, params: TensorParams) -> Self {
        self.tensor = Some(params);
        self
    }

    pub fn tensor_layout(&self) -> Option<TensorParams> {
        self.tensor
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, index: usize) -> Node {
        self.nodes[index]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn has_interval_nodes(&self) -> bool {
        self.nodes
            .iter()
            .any(|n| matches!(n, Node::Interval { .. }))
    }

    /// Length of the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        let mut memo = vec![None; self.nodes.len()];
        self.height_from(self.root, &mut memo)
    }

    fn height_from(&self, idx: usize, memo: &mut Vec<Option<u32>>) -> u32 {
        if let Some(h) = memo[idx] {
            return h;
        }
        let h = match self.nodes[idx] {
            Node::Leaf(_) => 0,
            Node::Query {
                zero: a, one: b, ..
            }
            | Node::Interval { yes: a, no: b, .. } => {
                1 + self.height_from(a, memo).max(self.height_from(b, memo))
            }
        };
        memo[idx] = Some(h);
        h
    }

    fn interval_var(&self, block: u32, coord: u32, a: u32) -> u32 {
        let p = self.tensor.expect("interval node without tensor layout");
        let cells = p.ell.pow(p.k);
        (block - 1) * (cells + p.k * p.ell) + cells + (coord - 1) * p.ell + a
    }

    /// Leaf label reached by `alpha`.
    pub fn eval(&self, alpha: &Assignment) -> usize {
        self.eval_path(alpha).0
    }

    /// Leaf label and the steps taken to reach it.
    pub fn eval_path(&self, alpha: &Assignment) -> (usize, Vec<Step>) {
        let mut idx = self.root;
        let mut steps = Vec::new();
        loop {
            match self.nodes[idx] {
                Node::Leaf(label) => return (label, steps),
                Node::Query { var, zero, one } => {
                    let value = alpha.value(var);
                    steps.push(Step::Var { var, value });
                    idx = if value { one } else { zero };
                }
                Node::Interval {
                    block,
                    coord,
                    lo,
                    hi,
                    yes,
                    no,
                } => {
                    let hit = (lo..=hi).any(|a| alpha.value(self.interval_var(block, coord, a)));
                    steps.push(Step::Interval {
                        block,
                        coord,
                        lo,
                        hi,
                        yes: hit,
                    });
                    idx = if hit { yes } else { no };
                }
            }
        }
    }

    /// Removes queries to variables already fixed on the path and drops
    /// unreachable nodes. Never increases height.
    pub fn prune_repeated_queries(&self) -> DecisionTree {
        let mut out = Vec::new();
        let mut fixed = HashMap::new();
        let root = self.prune_from(self.root, &mut fixed, &mut out);
        DecisionTree {
            nodes: out,
            root,
            tensor: self.tensor,
        }
    }

    fn prune_from(&self, idx: usize, fixed: &mut HashMap<u32, bool>, out: &mut Vec<Node>) -> usize {
        match self.nodes[idx] {
            Node::Leaf(label) => {
                out.push(Node::Leaf(label));
                out.len() - 1
            }
            Node::Query { var, zero, one } => {
                if let Some(&v) = fixed.get(&var) {
                    return self.prune_from(if v { one } else { zero }, fixed, out);
                }
                fixed.insert(var, false);
                let z = self.prune_from(zero, fixed, out);
                fixed.insert(var, true);
                let o = self.prune_from(one, fixed, out);
                fixed.remove(&var);
                out.push(Node::Query {
                    var,
                    zero: z,
                    one: o,
                });
                out.len() - 1
            }
            Node::Interval {
                block,
                coord,
                lo,
                hi,
                yes,
                no,
            } => {
                let y = self.prune_from(yes, fixed, out);
                let n = self.prune_from(no, fixed, out);
                out.push(Node::Interval {
                    block,
                    coord,
                    lo,
                    hi,
                    yes: y,
                    no: n,
                });
                out.len() - 1
            }
        }
    }

    /// Serialises the reachable part of the tree in preorder.
    pub fn to_text(&self) -> String {
        // A node shared by several parents is written once per occurrence.
        let mut lines: Vec<(usize, Vec<usize>)> = Vec::new();
        self.emit(self.root, &mut lines);
        let mut out = String::new();
        for (node_idx, kids) in &lines {
            match self.nodes[*node_idx] {
                Node::Leaf(label) => out.push_str(&format!("L {label}\n")),
                Node::Query { var, .. } => {
                    out.push_str(&format!("V {var} {} {}\n", kids[0], kids[1]))
                }
                Node::Interval {
                    block,
                    coord,
                    lo,
                    hi,
                    ..
                } => out.push_str(&format!(
                    "B {block} {coord} {lo} {hi} {} {}\n",
                    kids[0], kids[1]
                )),
            }
        }
        out
    }

    fn emit(&self, idx: usize, lines: &mut Vec<(usize, Vec<usize>)>) -> usize {
        let me = lines.len();
        lines.push((idx, Vec::new()));
        let kids = match self.nodes[idx] {
            Node::Leaf(_) => return me,
            Node::Query { zero, one, .. } => [zero, one],
            Node::Interval { yes, no, .. } => [yes, no],
        };
        let a = self.emit(kids[0], lines);
        let b = self.emit(kids[1], lines);
        lines[me].1 = vec![a, b];
        me
    }

    /// Parses the text form. Interval nodes require `tensor`.
    pub fn parse_text(text: &str, tensor: Option<TensorParams>) -> Result<DecisionTree, TreeError> {
        let mut nodes = Vec::new();
        let mut line_nos = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let fields: Vec<&str> = raw.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let line = i + 1;
            let err = |message: String| TreeError::Parse { line, message };
            let nums = |fs: &[&str]| -> Result<Vec<usize>, TreeError> {
                fs.iter()
                    .map(|f| {
                        f.parse::<usize>()
                            .map_err(|_| err(format!("invalid number `{f}`")))
                    })
                    .collect()
            };
            let node = match (fields[0], fields.len()) {
                ("L", 2) => Node::Leaf(nums(&fields[1..])?[0]),
                ("V", 4) => {
                    let v = nums(&fields[1..])?;
                    if v[0] == 0 {
                        return Err(err("variable 0".into()));
                    }
                    Node::Query {
                        var: v[0] as u32,
                        zero: v[1],
                        one: v[2],
                    }
                }
                ("B", 7) => {
                    let v = nums(&fields[1..])?;
                    if tensor.is_none() {
                        return Err(TreeError::MissingLayout);
                    }
                    if v[0] == 0 || v[1] == 0 || v[2] == 0 || v[2] > v[3] {
                        return Err(err("malformed interval".into()));
                    }
                    Node::Interval {
                        block: v[0] as u32,
                        coord: v[1] as u32,
                        lo: v[2] as u32,
                        hi: v[3] as u32,
                        yes: v[4],
                        no: v[5],
                    }
                }
                _ => return Err(err(format!("unrecognised node `{raw}`"))),
            };
            nodes.push(node);
            line_nos.push(line);
        }
        if nodes.is_empty() {
            return Err(TreeError::Parse {
                line: 1,
                message: "empty tree".into(),
            });
        }
        for (pos, node) in nodes.iter().enumerate() {
            let kids = match *node {
                Node::Query { zero, one, .. } => [zero, one],
                Node::Interval { yes, no, .. } => [yes, no],
                Node::Leaf(_) => continue,
            };
            if kids.iter().any(|&c| c <= pos || c >= nodes.len()) {
                return Err(TreeError::Parse {
                    line: line_nos[pos],
                    message: "children must follow their parent".into(),
                });
            }
        }
        Ok(DecisionTree {
            nodes,
            root: 0,
            tensor,
        })
    }
}

/// Incrementally builds an arena; children are pushed before parents.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder::default()
    }

    pub fn leaf(&mut self, label: usize) -> usize {
        self.nodes.push(Node::Leaf(label));
        self.nodes.len() - 1
    }

    pub fn query(&mut self, var: u32, zero: usize, one: usize) -> usize {
        self.nodes.push(Node::Query { var, zero, one });
        self.nodes.len() - 1
    }

    pub fn interval(
        &mut self,
        block: u32,
        coord: u32,
        lo: u32,
        hi: u32,
        yes: usize,
        no: usize,
    ) -> usize {
        self.nodes.push(Node::Interval {
            block,
            coord,
            lo,
            hi,
            yes,
            no,
        });
        self.nodes.len() - 1
    }

    /// Copies the subtree of `tree` at `idx`, replacing each leaf label via
    /// `on_leaf` (which may build arbitrary subtrees).
    pub fn graft(
        &mut self,
        tree: &DecisionTree,
        idx: usize,
        on_leaf: &mut dyn FnMut(&mut Self, usize) -> usize,
    ) -> usize {
        match tree.node(idx) {
            Node::Leaf(label) => on_leaf(self, label),
            Node::Query { var, zero, one } => {
                let z = self.graft(tree, zero, on_leaf);
                let o = self.graft(tree, one, on_leaf);
                self.query(var, z, o)
            }
            Node::Interval {
                block,
                coord,
                lo,
                hi,
                yes,
                no,
            } => {
                let y = self.graft(tree, yes, on_leaf);
                let n = self.graft(tree, no, on_leaf);
                self.interval(block, coord, lo, hi, y, n)
            }
        }
    }

    pub fn finish(self, root: usize) -> DecisionTree {
        DecisionTree::from_nodes(self.nodes, root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x1_tree() -> DecisionTree {
        let mut b = TreeBuilder::new();
        let z = b.leaf(0);
        let o = b.leaf(1);
        let r = b.query(1, z, o);
        b.finish(r)
    }

    #[test]
    fn single_leaf_and_query() {
        let t = DecisionTree::leaf(7);
        assert_eq!(t.eval(&Assignment::new(vec![true])), 7);
        assert_eq!(t.height(), 0);
        let t = x1_tree();
        assert_eq!(t.eval(&Assignment::new(vec![false])), 0);
        assert_eq!(t.eval(&Assignment::new(vec![true])), 1);
        assert_eq!(t.height(), 1);
    }

    #[test]
    fn text_round_trip() {
        let mut b = TreeBuilder::new();
        let l3 = b.leaf(3);
        let l1 = b.leaf(1);
        let l2 = b.leaf(2);
        let inner = b.query(2, l2, l3);
        let root = b.query(1, l1, inner);
        let t = b.finish(root);
        let text = t.to_text();
        assert_eq!(text, "V 1 1 2\nL 1\nV 2 3 4\nL 2\nL 3\n");
        let back = DecisionTree::parse_text(&text, None).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.height(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(DecisionTree::parse_text("V 1 0 1\nL 0\n", None).is_err());
        assert_eq!(
            DecisionTree::parse_text("B 1 1 1 1 1 2\nL 0\nL 1\n", None),
            Err(TreeError::MissingLayout)
        );
        assert!(matches!(
            DecisionTree::parse_text("X\n", None),
            Err(TreeError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn interval_nodes_read_selector_block() {
        let p = TensorParams::new(1, 3).unwrap();
        // block 1: x1..x3, y4..y6
        let t = DecisionTree::parse_text("B 1 1 1 2 1 2\nL 1\nL 0\n", Some(p)).unwrap();
        let mut a = Assignment::all_false(6);
        assert_eq!(t.eval(&a), 0);
        a.set(5, true);
        assert_eq!(t.eval(&a), 1);
    }

    #[test]
    fn pruning_follows_fixed_values() {
        let mut b = TreeBuilder::new();
        let l0 = b.leaf(0);
        let l1 = b.leaf(1);
        let l2 = b.leaf(2);
        let again = b.query(1, l0, l1);
        let root = b.query(1, l2, again);
        let t = b.finish(root).prune_repeated_queries();
        assert_eq!(t.height(), 1);
        assert_eq!(t.eval(&Assignment::new(vec![true])), 1);
        assert_eq!(t.eval(&Assignment::new(vec![false])), 2);
    }
}
