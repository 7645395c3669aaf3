//! Splitting a rooted region into pieces of bounded demand: leaf pieces at
//! the deepest heavy subtrees, internal pieces peeled bottom-up between
//! consecutive key vertices of the backbone.

use std::collections::{BTreeMap, BTreeSet};

use crate::instance::{Instance, VertexId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Piece {
    pub root: VertexId,
    pub exit: Option<VertexId>,
    pub edges: BTreeSet<VertexId>,
}

/// The region is given by its root, its edge set (child endpoints) and an
/// optional exit; terminals at the root or exit do not count toward demand.
pub(crate) fn partition(
    inst: &Instance,
    root: VertexId,
    edges: &BTreeSet<VertexId>,
    exit: Option<VertexId>,
    theta: &Rational,
) -> Vec<Piece> {
    let kids = |v: VertexId| {
        inst.children(v)
            .iter()
            .copied()
            .filter(|c| edges.contains(c))
    };

    // Preorder of the region and subtree demands.
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(kids(v));
    }
    let mut sub: BTreeMap<VertexId, Rational> = BTreeMap::new();
    for &v in order.iter().rev() {
        let own = if v != root && Some(v) != exit {
            inst.demand_or_zero(v)
        } else {
            Rational::zero()
        };
        let total = kids(v).fold(own, |acc, c| acc + &sub[&c]);
        sub.insert(v, total);
    }
    let below = |v: VertexId| -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<VertexId> = kids(v).collect();
        while let Some(u) = stack.pop() {
            out.insert(u);
            stack.extend(kids(u));
        }
        out
    };

    let mut leaf_roots: Vec<VertexId> = order
        .iter()
        .copied()
        .filter(|&v| {
            let mut ks = kids(v).peekable();
            ks.peek().is_some()
                && &sub[&v] >= theta
                && ks
                    .filter(|&c| kids(c).next().is_some())
                    .all(|c| &sub[&c] < theta)
        })
        .collect();
    leaf_roots.sort_unstable();
    let mut pieces: Vec<Piece> = leaf_roots
        .iter()
        .map(|&v| Piece {
            root: v,
            exit: None,
            edges: below(v),
        })
        .collect();
    if let Some(e) = exit {
        match pieces.iter_mut().find(|p| p.edges.contains(&e)) {
            Some(p) => p.exit = Some(e),
            None => {
                pieces.push(Piece {
                    root: e,
                    exit: Some(e),
                    edges: BTreeSet::new(),
                });
                leaf_roots.push(e);
            }
        }
    }
    if leaf_roots.is_empty() {
        return vec![Piece {
            root,
            exit,
            edges: edges.clone(),
        }];
    }

    let mut backbone: BTreeSet<VertexId> = BTreeSet::new();
    for &l in &leaf_roots {
        let mut v = l;
        while backbone.insert(v) && v != root {
            v = inst.parent(v).expect("region vertex below root");
        }
    }
    let mut keys: BTreeSet<VertexId> = leaf_roots.iter().copied().collect();
    keys.insert(root);
    for &v in &backbone {
        if kids(v).filter(|c| backbone.contains(c)).count() >= 2 {
            keys.insert(v);
        }
    }

    let mut upmost_at: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &v2 in keys.iter().filter(|&&k| k != root) {
        // Path from the child of v1 down to v2.
        let mut path = vec![v2];
        let mut v = v2;
        let v1 = loop {
            let p = inst.parent(v).expect("key vertex below root");
            if keys.contains(&p) {
                break p;
            }
            path.push(p);
            v = p;
        };
        path.reverse();
        let top = path[0];
        let mut x_idx = path.len() - 1;
        while &sub[&top] - &sub[&path[x_idx]] >= *theta {
            let x = path[x_idx];
            let v_idx = (0..x_idx)
                .rev()
                .find(|&i| &sub[&path[i]] - &sub[&x] >= *theta)
                .expect("top qualifies");
            let v = path[v_idx];
            let edges: BTreeSet<_> = below(v).difference(&below(x)).copied().collect();
            pieces.push(Piece {
                root: v,
                exit: Some(x),
                edges,
            });
            x_idx = v_idx;
        }
        let x = path[x_idx];
        let mut up: BTreeSet<_> = below(top).difference(&below(x)).copied().collect();
        up.insert(top);
        upmost_at.entry(v1).or_insert(pieces.len());
        pieces.push(Piece {
            root: v1,
            exit: Some(x),
            edges: up,
        });
    }

    // Child subtrees of key vertices that reach no leaf piece join the upmost piece there.
    let covered: BTreeSet<VertexId> = pieces
        .iter()
        .flat_map(|p| p.edges.iter().copied())
        .collect();
    for &k in &keys {
        for c in kids(k).filter(|c| !covered.contains(c)).collect::<Vec<_>>() {
            let mut extra = below(c);
            extra.insert(c);
            match upmost_at.get(&k) {
                Some(&i) => pieces[i].edges.extend(extra),
                None => {
                    upmost_at.insert(k, pieces.len());
                    pieces.push(Piece {
                        root: k,
                        exit: None,
                        edges: extra,
                    });
                }
            }
        }
    }
    let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    pieces.sort_by_key(|p| (pos[&p.root], p.edges.iter().next().map(|e| pos[e]), p.exit));
    debug_assert_eq!(
        pieces.iter().map(|p| p.edges.len()).sum::<usize>(),
        edges.len()
    );
    pieces
}
