//! Dinic's blocking-flow max-flow on real capacities.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cap: f64,
}

#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    pub nodes: usize,
    pub arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { nodes, arcs: Vec::new() }
    }

    /// Adds a directed arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: f64) -> usize {
        assert!(cap >= 0.0, "capacities must be nonnegative");
        self.arcs.push(Arc { from, to, cap });
        self.arcs.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxFlow {
    pub value: f64,
    /// Indices of arcs leaving the source side of the residual graph.
    pub min_cut: Vec<usize>,
    pub flow: Vec<f64>,
}

struct Residual {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
}

impl Residual {
    fn build(net: &FlowNetwork) -> Self {
        let mut r = Residual { head: vec![Vec::new(); net.nodes], to: Vec::new(), cap: Vec::new() };
        for a in &net.arcs {
            r.head[a.from].push(r.to.len());
            r.to.push(a.to);
            r.cap.push(a.cap);
            r.head[a.to].push(r.to.len());
            r.to.push(a.from);
            r.cap.push(0.0);
        }
        r
    }

    fn levels(&self, s: usize, eps: f64) -> Vec<i64> {
        let mut level = vec![-1; self.head.len()];
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > eps && level[v] < 0 {
                    level[v] = level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, limit: f64, level: &[i64], it: &mut [usize], eps: f64) -> f64 {
        if u == t {
            return limit;
        }
        while it[u] < self.head[u].len() {
            let e = self.head[u][it[u]];
            let v = self.to[e];
            if self.cap[e] > eps && level[v] == level[u] + 1 {
                let got = self.push(v, t, limit.min(self.cap[e]), level, it, eps);
                if got > 0.0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            it[u] += 1;
        }
        0.0
    }
}

/// Maximum `s`-`t` flow and a minimum cut taken from residual reachability.
pub fn max_flow(net: &FlowNetwork, s: usize, t: usize) -> MaxFlow {
    let mut r = Residual::build(net);
    let total: f64 = net.arcs.iter().map(|a| a.cap).sum();
    let eps = 1e-14 * total.max(1.0);
    let mut value = 0.0;
    if s != t {
        loop {
            let level = r.levels(s, eps);
            if level[t] < 0 {
                break;
            }
            let mut it = vec![0; net.nodes];
            loop {
                let f = r.push(s, t, f64::INFINITY, &level, &mut it, eps);
                if f <= 0.0 {
                    break;
                }
                value += f;
            }
        }
    }
    let reach = r.levels(s, eps);
    let min_cut = net
        .arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| reach[a.from] >= 0 && reach[a.to] < 0)
        .map(|(i, _)| i)
        .collect();
    let flow = net.arcs.iter().enumerate().map(|(i, a)| a.cap - r.cap[2 * i]).collect();
    MaxFlow { value, min_cut, flow }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_bottleneck() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 0.3);
        net.add_arc(1, 2, 0.3);
        net.add_arc(2, 3, 10.0);
        let mf = max_flow(&net, 0, 3);
        assert!((mf.value - 0.3).abs() < 1e-15);
        assert_eq!(mf.min_cut, vec![0]);
    }

    #[test]
    fn star_and_zero_caps() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 1.0);
        net.add_arc(0, 2, 1.0);
        net.add_arc(1, 3, 5.0);
        net.add_arc(2, 3, 5.0);
        assert!((max_flow(&net, 0, 3).value - 2.0).abs() < 1e-15);

        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 0.0);
        net.add_arc(0, 2, 0.0);
        let mf = max_flow(&net, 0, 2);
        assert_eq!(mf.value, 0.0);
        assert_eq!(mf.min_cut, vec![0, 1]);
    }
}
