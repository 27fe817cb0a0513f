use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
}

/// Residual graph for unit-capacity max-flow by BFS augmenting paths.
///
/// Adjacency lists keep insertion order, so BFS explores arcs in the order
/// they were added and the resulting flow is reproducible.
#[derive(Debug, Clone)]
pub(crate) struct FlowGraph {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
            arcs: Vec::new(),
        }
    }

    /// Adds `u -> v` and returns the forward arc's handle.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: u32) -> usize {
        let fwd = self.arcs.len();
        self.arcs.push(Arc {
            to: v,
            cap,
            rev: fwd + 1,
        });
        self.arcs.push(Arc {
            to: u,
            cap: 0,
            rev: fwd,
        });
        self.adj[u].push(fwd);
        self.adj[v].push(fwd + 1);
        fwd
    }

    /// Remaining capacity on an arc.
    pub fn residual(&self, arc: usize) -> u32 {
        self.arcs[arc].cap
    }

    fn augment_once(&mut self, s: usize, t: usize) -> bool {
        let mut parent: Vec<Option<usize>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    parent[arc.to] = Some(a);
                    queue.push_back(arc.to);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut v = t;
        while let Some(a) = parent[v] {
            self.arcs[a].cap -= 1;
            let rev = self.arcs[a].rev;
            self.arcs[rev].cap += 1;
            v = self.arcs[rev].to;
        }
        true
    }

    /// Pushes unit augmenting paths until none remain or `limit` is reached.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: Option<usize>) -> usize {
        if s == t {
            return 0;
        }
        let mut flow = 0;
        while limit.is_none_or(|l| flow < l) && self.augment_once(s, t) {
            flow += 1;
        }
        flow
    }
}
