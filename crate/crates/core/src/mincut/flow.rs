//! Integer max-flow by shortest augmenting paths (Edmonds–Karp).

use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Arc {
    to: usize,
    /// Remaining capacity.
    residual: u64,
}

/// Arcs are stored in pairs: `2k` and `2k + 1` are each other's reverse.
#[derive(Clone, Debug, Default)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adjacency: Vec<Vec<usize>>,
    capacity: Vec<u64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { arcs: Vec::new(), adjacency: vec![Vec::new(); nodes], capacity: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    fn push_pair(&mut self, u: usize, v: usize, forward: u64, backward: u64) -> usize {
        let id = self.arcs.len() / 2;
        self.adjacency[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, residual: forward });
        self.capacity.push(forward);
        self.adjacency[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, residual: backward });
        self.capacity.push(backward);
        id
    }

    /// Adds `u → v`; returns the arc-pair id.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: u64) -> usize {
        self.push_pair(u, v, cap, 0)
    }

    /// Adds an undirected edge usable in either direction up to `cap`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: u64) -> usize {
        self.push_pair(u, v, cap, cap)
    }

    /// Net flow on pair `id` in its forward direction.
    pub fn flow(&self, id: usize) -> i64 {
        self.capacity[2 * id] as i64 - self.arcs[2 * id].residual as i64
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> u64 {
        assert_ne!(source, sink);
        let n = self.node_count();
        let mut total = 0u64;
        loop {
            let mut via = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &a in &self.adjacency[u] {
                    let arc = &self.arcs[a];
                    if arc.residual > 0 && !seen[arc.to] {
                        seen[arc.to] = true;
                        via[arc.to] = a;
                        queue.push_back(arc.to);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            let mut bottleneck = u64::MAX;
            let mut v = sink;
            while v != source {
                let a = via[v];
                bottleneck = bottleneck.min(self.arcs[a].residual);
                v = self.arcs[a ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let a = via[v];
                self.arcs[a].residual -= bottleneck;
                self.arcs[a ^ 1].residual += bottleneck;
                v = self.arcs[a ^ 1].to;
            }
            total += bottleneck;
        }
    }

    /// Nodes reachable from `source` in the residual network.
    pub fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(u) = stack.pop() {
            for &a in &self.adjacency[u] {
                let arc = &self.arcs[a];
                if arc.residual > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}
