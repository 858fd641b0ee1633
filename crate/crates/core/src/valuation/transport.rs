//! Stochastic ordering of simple valuations as a transport problem.
//!
//! `μ ≤ ν` iff the mass of `μ` can be moved upward onto `ν`: there is a plan
//! `t_{x,y} ≥ 0`, supported on `x ≤ y`, whose row sums are the weights of `μ`
//! and whose column sums stay below the weights of `ν`. Feasibility is a
//! maximum-flow question, answered here with Edmonds–Karp over exact
//! rationals. This path never enumerates open sets.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};

use super::SimpleValuation;
use crate::order::FinitePoset;
use crate::rational::Rational;

pub fn stochastic_leq_transport(mu: &SimpleValuation, nu: &SimpleValuation, poset: &FinitePoset) -> bool {
    let supply = mu.mass();
    if supply > nu.mass() {
        return false;
    }
    if supply.is_zero() {
        return true;
    }
    let n = poset.size();
    // source, n supply nodes, n demand nodes, sink
    let source = 0;
    let sink = 2 * n + 1;
    let mut cap = vec![vec![Rational::zero(); 2 * n + 2]; 2 * n + 2];
    for (x, a) in mu.weights() {
        cap[source][1 + x] = a.clone();
    }
    for (y, b) in nu.weights() {
        cap[1 + n + y][sink] = b.clone();
    }
    for x in mu.support() {
        for y in poset.up_of(x).iter() {
            // Never binding: no more than the whole supply crosses one edge.
            cap[1 + x][1 + n + y] = supply.clone();
        }
    }
    max_flow(&mut cap, source, sink) == supply
}

fn max_flow(residual: &mut [Vec<Rational>], source: usize, sink: usize) -> Rational {
    let nodes = residual.len();
    let mut flow = Rational::zero();
    loop {
        let mut parent = vec![usize::MAX; nodes];
        parent[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..nodes {
                if parent[v] == usize::MAX && residual[u][v].is_positive() {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            return flow;
        }
        let mut bottleneck: Option<Rational> = None;
        let mut v = sink;
        while v != source {
            let u = parent[v];
            let c = &residual[u][v];
            if bottleneck.as_ref().is_none_or(|b| c < b) {
                bottleneck = Some(c.clone());
            }
            v = u;
        }
        let push = bottleneck.expect("augmenting path has an edge");
        let mut v = sink;
        while v != source {
            let u = parent[v];
            residual[u][v] -= &push;
            residual[v][u] += &push;
            v = u;
        }
        flow += push;
    }
}
