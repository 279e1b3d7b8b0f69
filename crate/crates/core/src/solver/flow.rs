//! Min-cost max-flow on a bipartite network, primal-dual style: Dijkstra on
//! reduced costs to update potentials, then blocking flows on the arcs of
//! zero reduced cost.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    cap: i64,
    cost: i64,
}

struct Network {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, cost });
        self.arcs.push(Arc { to: from, cap: 0, cost: -cost });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    fn reduced(&self, from: usize, id: usize, pi: &[i64]) -> i64 {
        let a = self.arcs[id];
        a.cost + pi[from] - pi[a.to]
    }
}

/// Outcome of [`max_weight_flow`].
#[derive(Debug, Clone)]
pub(crate) struct FlowOutcome {
    /// Selected `(left, right)` edges in input order.
    pub pairs: Vec<(usize, usize)>,
    /// Units received by each right node.
    pub right_filled: Vec<usize>,
}

/// Among all maximum flows from left nodes (capacity `left_cap`) through
/// unit edges to right nodes (capacity `right_cap`), returns one of maximum
/// total weight. Weights must be non-negative.
pub(crate) fn max_weight_flow(
    left_cap: &[usize],
    right_cap: &[usize],
    edges: &[(usize, usize, i64)],
) -> FlowOutcome {
    let nl = left_cap.len();
    let nr = right_cap.len();
    let source = 0;
    let sink = nl + nr + 1;
    let mut net = Network::new(nl + nr + 2);
    for (l, &c) in left_cap.iter().enumerate() {
        net.add(source, 1 + l, c as i64, 0);
    }
    let top = edges.iter().map(|e| e.2).max().unwrap_or(0);
    let edge_ids: Vec<usize> = edges
        .iter()
        .map(|&(l, r, w)| {
            debug_assert!(w >= 0);
            net.add(1 + l, 1 + nl + r, 1, top - w)
        })
        .collect();
    let sink_ids: Vec<usize> = right_cap
        .iter()
        .enumerate()
        .map(|(r, &c)| net.add(1 + nl + r, sink, c as i64, 0))
        .collect();

    let nodes = nl + nr + 2;
    let mut pi = vec![0i64; nodes];
    let mut dist = vec![i64::MAX; nodes];
    let mut done = vec![false; nodes];
    let mut level = vec![usize::MAX; nodes];
    let mut cursor = vec![0usize; nodes];
    loop {
        // Dijkstra on reduced costs, stopped once the sink is settled.
        dist.fill(i64::MAX);
        done.fill(false);
        dist[source] = 0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0i64, source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == sink {
                break;
            }
            for &id in &net.adj[u] {
                let a = net.arcs[id];
                if a.cap > 0 && !done[a.to] {
                    let nd = d + net.reduced(u, id, &pi);
                    if nd < dist[a.to] {
                        dist[a.to] = nd;
                        heap.push(Reverse((nd, a.to)));
                    }
                }
            }
        }
        if !done[sink] {
            break;
        }
        let dt = dist[sink];
        for v in 0..nodes {
            pi[v] += if done[v] { dist[v].min(dt) } else { dt };
        }

        // Blocking flows on the admissible subgraph until the sink is cut off.
        loop {
            level.fill(usize::MAX);
            level[source] = 0;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                for &id in &net.adj[u] {
                    let a = net.arcs[id];
                    if a.cap > 0 && level[a.to] == usize::MAX && net.reduced(u, id, &pi) == 0 {
                        level[a.to] = level[u] + 1;
                        queue.push_back(a.to);
                    }
                }
            }
            if level[sink] == usize::MAX {
                break;
            }
            cursor.fill(0);
            while push(&mut net, &pi, &level, &mut cursor, source, sink, i64::MAX) > 0 {}
        }
    }

    let mut pairs = Vec::new();
    for (e, &id) in edges.iter().zip(&edge_ids) {
        if net.arcs[id].cap == 0 {
            pairs.push((e.0, e.1));
        }
    }
    let right_filled = sink_ids
        .iter()
        .map(|&id| net.arcs[id ^ 1].cap as usize)
        .collect();
    FlowOutcome { pairs, right_filled }
}

fn push(net: &mut Network, pi: &[i64], level: &[usize], cursor: &mut [usize], u: usize, sink: usize, limit: i64) -> i64 {
    if u == sink {
        return limit;
    }
    while cursor[u] < net.adj[u].len() {
        let id = net.adj[u][cursor[u]];
        let a = net.arcs[id];
        if a.cap > 0 && level[a.to] == level[u] + 1 && net.reduced(u, id, pi) == 0 {
            let got = push(net, pi, level, cursor, a.to, sink, limit.min(a.cap));
            if got > 0 {
                net.arcs[id].cap -= got;
                net.arcs[id ^ 1].cap += got;
                return got;
            }
        }
        cursor[u] += 1;
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_heavier_matching() {
        // 2x2: diagonal weights 5+5 beat anti-diagonal 9+0
        let edges = [(0, 0, 5), (0, 1, 9), (1, 0, 0), (1, 1, 5)];
        let out = max_weight_flow(&[1, 1], &[1, 1], &edges);
        assert_eq!(out.pairs, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn maximises_flow_before_weight() {
        // taking the single heavy edge (0,0) would block paper 1
        let edges = [(0, 0, 10), (0, 1, 1), (1, 0, 1)];
        let out = max_weight_flow(&[1, 1], &[1, 1], &edges);
        assert_eq!(out.pairs, vec![(0, 1), (1, 0)]);
        assert_eq!(out.right_filled, vec![1, 1]);
    }

    #[test]
    fn reports_shortfall() {
        let edges = [(0, 0, 3), (1, 0, 4)];
        let out = max_weight_flow(&[1, 1], &[1, 1], &edges);
        assert_eq!(out.right_filled, vec![1, 0]);
        assert_eq!(out.pairs, vec![(1, 0)]);
    }
}
