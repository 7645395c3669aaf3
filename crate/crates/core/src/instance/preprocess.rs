use std::collections::BTreeMap;

use super::{Instance, VertexId};
use crate::rational::Rational;

/// A normalized instance together with the original vertex behind each new one.
///
/// Terminals always map to the original terminal whose demand they carry.
/// Splitter vertices introduced by binarization map to `None`.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub instance: Instance,
    pub origin: Vec<Option<VertexId>>,
}

impl Preprocessed {
    pub fn original_terminal(&self, v: VertexId) -> VertexId {
        self.origin[v].expect("terminals keep their origin")
    }
}

struct Arena {
    parent: Vec<Option<usize>>,
    weight: Vec<Rational>,
    demand: Vec<Option<Rational>>,
    children: Vec<Vec<usize>>,
    origin: Vec<Option<VertexId>>,
    alive: Vec<bool>,
}

impl Arena {
    fn push(
        &mut self,
        parent: usize,
        weight: Rational,
        demand: Option<Rational>,
        origin: Option<VertexId>,
    ) -> usize {
        let id = self.parent.len();
        self.parent.push(Some(parent));
        self.weight.push(weight);
        self.demand.push(demand);
        self.children.push(Vec::new());
        self.origin.push(origin);
        self.alive.push(true);
        id
    }

    fn detach(&mut self, v: usize) {
        if let Some(p) = self.parent[v] {
            self.children[p].retain(|&c| c != v);
        }
    }
}

/// Rewrites the tree so that terminals are exactly the leaves, every
/// non-root internal vertex has two children and the root has at most two.
///
/// Tour costs are preserved: a terminal set on the result costs the same as
/// its image under `origin` on the input.
pub fn preprocess(inst: &Instance) -> Preprocessed {
    let n = inst.len();
    let mut a = Arena {
        parent: inst.parents().to_vec(),
        weight: inst.weights().to_vec(),
        demand: (0..n).map(|v| inst.demand(v).cloned()).collect(),
        children: (0..n).map(|v| inst.children(v).to_vec()).collect(),
        origin: (0..n).map(Some).collect(),
        alive: vec![true; n],
    };
    let root = inst.root();

    for v in 0..n {
        if a.demand[v].is_some() && (v == root || !a.children[v].is_empty()) {
            let d = a.demand[v].take();
            let leaf = a.push(v, Rational::zero(), d, Some(v));
            a.children[v].push(leaf);
        }
    }

    // Post-order pruning of non-terminal leaves.
    for &v in inst.preorder().iter().rev() {
        if v != root && a.children[v].is_empty() && a.demand[v].is_none() {
            a.detach(v);
            a.alive[v] = false;
        }
    }

    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if a.children[v].len() >= 3 {
            let rest = a.children[v].split_off(1);
            let s = a.push(v, Rational::zero(), None, None);
            for &c in &rest {
                a.parent[c] = Some(s);
            }
            a.children[s] = rest;
            a.children[v].push(s);
        }
        stack.extend(a.children[v].iter().copied());
    }

    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if v != root && a.demand[v].is_none() && a.children[v].len() == 1 {
            let c = a.children[v][0];
            let p = a.parent[v].unwrap();
            let w = a.weight[v].clone();
            a.weight[c] += &w;
            a.parent[c] = Some(p);
            let slot = a.children[p].iter().position(|&x| x == v).unwrap();
            a.children[p][slot] = c;
            a.alive[v] = false;
            stack.push(c);
            continue;
        }
        stack.extend(a.children[v].iter().rev().copied());
    }

    // Renumber in preorder.
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(a.children[v].iter().rev().copied());
    }
    let mut new_id = vec![usize::MAX; a.parent.len()];
    for (i, &v) in order.iter().enumerate() {
        new_id[v] = i;
    }
    let parent = order
        .iter()
        .map(|&v| a.parent[v].map(|p| new_id[p]))
        .collect();
    let weight = order.iter().map(|&v| a.weight[v].clone()).collect();
    let demands: BTreeMap<VertexId, Rational> = order
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| a.demand[v].clone().map(|d| (i, d)))
        .collect();
    let origin = order.iter().map(|&v| a.origin[v]).collect();
    let instance =
        Instance::new(parent, weight, demands).expect("preprocessing keeps a valid tree");
    Preprocessed { instance, origin }
}
