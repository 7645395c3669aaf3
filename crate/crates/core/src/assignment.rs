//! Integral rounding of a fractional star cover: every `b` picks one
//! neighbour `a` so that no `a` receives more than its incident edge weight
//! plus one largest `w(b)`.

use std::collections::{BTreeMap, BTreeSet};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignError {
    #[error("target {0} has no neighbour")]
    Isolated(usize),
    #[error("target {b}: weight {weight} exceeds its incident edge weight {incident}")]
    Overweight {
        b: usize,
        weight: Rational,
        incident: Rational,
    },
    #[error("negative weight on {0}")]
    Negative(String),
    #[error("edge ({a},{b}) refers to a missing vertex")]
    OutOfRange { a: usize, b: usize },
}

/// Bipartite graph with sides `0..a_count` and `0..b_weight.len()`.
#[derive(Debug, Clone, Default)]
pub struct BipartiteWeights {
    pub a_count: usize,
    pub edges: BTreeMap<(usize, usize), Rational>,
    pub b_weight: Vec<Rational>,
}

impl BipartiteWeights {
    pub fn new(a_count: usize, b_weight: Vec<Rational>) -> Self {
        BipartiteWeights {
            a_count,
            edges: BTreeMap::new(),
            b_weight,
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize, w: Rational) {
        self.edges.insert((a, b), w);
    }

    /// `sum_{f(b)=a} w(b) - sum_{(a,b)} w(a,b)` for every `a`.
    pub fn excess(&self, f: &[usize]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.a_count];
        for (b, &a) in f.iter().enumerate() {
            out[a] += &self.b_weight[b];
        }
        for (&(a, _), w) in &self.edges {
            out[a] -= w;
        }
        out
    }

    pub fn max_b_weight(&self) -> Rational {
        self.b_weight
            .iter()
            .cloned()
            .fold(Rational::zero(), Rational::max)
    }

    fn validate(&self) -> Result<(), AssignError> {
        let mut incident = vec![Rational::zero(); self.b_weight.len()];
        let mut has_edge = vec![false; self.b_weight.len()];
        for (&(a, b), w) in &self.edges {
            if a >= self.a_count || b >= self.b_weight.len() {
                return Err(AssignError::OutOfRange { a, b });
            }
            if w.is_negative() {
                return Err(AssignError::Negative(format!("edge ({a},{b})")));
            }
            incident[b] += w;
            has_edge[b] = true;
        }
        for (b, w) in self.b_weight.iter().enumerate() {
            if w.is_negative() {
                return Err(AssignError::Negative(format!("target {b}")));
            }
            if !has_edge[b] {
                return Err(AssignError::Isolated(b));
            }
            if w > &incident[b] {
                return Err(AssignError::Overweight {
                    b,
                    weight: w.clone(),
                    incident: incident[b].clone(),
                });
            }
        }
        Ok(())
    }
}

/// Node ids in the support graph: `a` sides first, then `b` sides.
fn find_cycle(adj: &BTreeMap<usize, BTreeSet<usize>>) -> Option<Vec<usize>> {
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut visited = BTreeSet::new();
    for &start in adj.keys() {
        if visited.contains(&start) {
            continue;
        }
        let mut stack = vec![(start, usize::MAX)];
        while let Some((v, from)) = stack.pop() {
            if !visited.insert(v) {
                continue;
            }
            if from != usize::MAX {
                parent.insert(v, from);
            }
            for &u in &adj[&v] {
                if u == from {
                    continue;
                }
                if visited.contains(&u) {
                    // u is an ancestor-side vertex already in the tree: close the cycle.
                    let mut up_v = vec![v];
                    let mut x = v;
                    while let Some(&p) = parent.get(&x) {
                        up_v.push(p);
                        x = p;
                    }
                    let mut up_u = vec![u];
                    let mut y = u;
                    while let Some(&p) = parent.get(&y) {
                        up_u.push(p);
                        y = p;
                    }
                    let lca = *up_v.iter().find(|z| up_u.contains(z)).expect("same tree");
                    let mut cycle: Vec<usize> =
                        up_v.iter().copied().take_while(|&z| z != lca).collect();
                    cycle.push(lca);
                    let tail: Vec<usize> = up_u.iter().copied().take_while(|&z| z != lca).collect();
                    cycle.extend(tail.into_iter().rev());
                    return Some(cycle);
                }
                stack.push((u, v));
            }
        }
    }
    None
}

/// Assigns each `b` to a neighbour `a` with
/// `sum_{f(b)=a} w(b) - sum_{(a,b)} w(a,b) <= max_b w(b)` for all `a`.
///
/// Starts from the proportional fractional assignment, cancels cycles in its
/// support until it is a forest, then sends each `b` to a child in the
/// rooted forest when it has one and to its parent otherwise.
pub fn assign(g: &BipartiteWeights) -> Result<Vec<usize>, AssignError> {
    g.validate()?;
    let na = g.a_count;
    let nb = g.b_weight.len();
    let mut incident = vec![Rational::zero(); nb];
    for (&(_, b), w) in &g.edges {
        incident[b] += w;
    }
    // Fractional amounts on support edges, keyed by (a, b).
    let mut x: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (&(a, b), w) in &g.edges {
        if incident[b].is_positive() {
            let amount = &g.b_weight[b] * w / &incident[b];
            if amount.is_positive() {
                x.insert((a, b), amount);
            }
        }
    }

    loop {
        let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &(a, b) in x.keys() {
            adj.entry(a).or_default().insert(na + b);
            adj.entry(na + b).or_default().insert(a);
        }
        let Some(cycle) = find_cycle(&adj) else { break };
        let key = |u: usize, v: usize| if u < na { (u, v - na) } else { (v, u - na) };
        let k = cycle.len();
        let cycle_edges: Vec<(usize, usize)> =
            (0..k).map(|i| key(cycle[i], cycle[(i + 1) % k])).collect();
        let delta = cycle_edges
            .iter()
            .skip(1)
            .step_by(2)
            .map(|e| x[e].clone())
            .min()
            .expect("even cycle");
        for (i, e) in cycle_edges.iter().enumerate() {
            let v = x.get_mut(e).unwrap();
            if i % 2 == 0 {
                *v += &delta;
            } else {
                *v -= &delta;
            }
        }
        x.retain(|_, v| v.is_positive());
    }

    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(a, b) in x.keys() {
        adj.entry(a).or_default().insert(na + b);
        adj.entry(na + b).or_default().insert(a);
    }
    let mut f: Vec<Option<usize>> = vec![None; nb];
    let mut visited = BTreeSet::new();
    for a0 in 0..na {
        if !adj.contains_key(&a0) || visited.contains(&a0) {
            continue;
        }
        let mut stack = vec![(a0, usize::MAX)];
        while let Some((v, from)) = stack.pop() {
            visited.insert(v);
            let children: Vec<usize> = adj[&v].iter().copied().filter(|&u| u != from).collect();
            if v >= na {
                f[v - na] = Some(children.first().copied().unwrap_or(from));
            }
            stack.extend(children.into_iter().rev().map(|u| (u, v)));
        }
    }
    let out: Vec<usize> = f
        .into_iter()
        .enumerate()
        .map(|(b, a)| {
            a.unwrap_or_else(|| {
                g.edges
                    .keys()
                    .find(|&&(_, bb)| bb == b)
                    .expect("validated")
                    .0
            })
        })
        .collect();
    let bound = g.max_b_weight();
    debug_assert!(g.excess(&out).iter().all(|e| e <= &bound));
    Ok(out)
}
