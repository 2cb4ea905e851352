use std::collections::VecDeque;
use std::path::Path;

use crate::domain::{ConstraintSet, Direction, Point};
use crate::error::{check_dim, Error, Result};

const EPS: f64 = 1e-12;

/// Unit-capacity `s → t` flows of fixed value `a`:
/// `{x ∈ [0,1]^{|E|} : conservation at internal vertices, net supply a at s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowNetwork {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
    source: usize,
    sink: usize,
    value: f64,
}

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: f64,
    cost: f64,
}

/// Residual graph stored as paired arcs: arc `2e` is forward, `2e + 1` its reverse.
struct Residual {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Residual {
            arcs: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: f64, cost: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap, cost });
        self.arcs.push(Arc {
            to: u,
            cap: 0.0,
            cost: -cost,
        });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    fn push(&mut self, arc: usize, amount: f64) {
        self.arcs[arc].cap -= amount;
        self.arcs[arc ^ 1].cap += amount;
    }

    /// Label-correcting shortest paths from `s`; returns the incoming arc per node.
    fn shortest_paths(&self, s: usize) -> Vec<Option<usize>> {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![None; n];
        let mut queued = vec![false; n];
        let mut queue = VecDeque::new();
        dist[s] = 0.0;
        queue.push_back(s);
        queued[s] = true;
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap <= EPS {
                    continue;
                }
                let nd = dist[u] + arc.cost;
                if nd < dist[arc.to] - 1e-12 {
                    dist[arc.to] = nd;
                    parent[arc.to] = Some(a);
                    if !queued[arc.to] {
                        queued[arc.to] = true;
                        queue.push_back(arc.to);
                    }
                }
            }
        }
        parent
    }

    fn path_to(&self, parent: &[Option<usize>], s: usize, t: usize) -> Option<Vec<usize>> {
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let a = parent[v]?;
            path.push(a);
            v = self.arcs[a ^ 1].to;
        }
        Some(path)
    }
}

impl FlowNetwork {
    pub fn new(
        n_nodes: usize,
        edges: Vec<(usize, usize)>,
        source: usize,
        sink: usize,
        value: f64,
    ) -> Result<Self> {
        let net = Self::unchecked(n_nodes, edges, source, sink, value)?;
        let max = net.max_flow();
        if value > max + 1e-9 {
            return Err(Error::Infeasible(format!(
                "flow value {value} exceeds max flow {max}"
            )));
        }
        Ok(net)
    }

    /// Network with the flow value set to `⌈max-flow / 2⌉`.
    pub fn with_default_value(
        n_nodes: usize,
        edges: Vec<(usize, usize)>,
        source: usize,
        sink: usize,
    ) -> Result<Self> {
        let mut net = Self::unchecked(n_nodes, edges, source, sink, 0.0)?;
        net.value = (net.max_flow() / 2.0).ceil();
        Ok(net)
    }

    fn unchecked(
        n_nodes: usize,
        edges: Vec<(usize, usize)>,
        source: usize,
        sink: usize,
        value: f64,
    ) -> Result<Self> {
        if source >= n_nodes || sink >= n_nodes || source == sink {
            return Err(Error::invalid("source and sink must be distinct vertices"));
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n_nodes || v >= n_nodes) {
            return Err(Error::invalid(format!("edge ({u}, {v}) out of range")));
        }
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::invalid("flow value must be finite and nonnegative"));
        }
        Ok(FlowNetwork {
            n_nodes,
            edges,
            source,
            sink,
            value,
        })
    }

    /// Parses the edge-list format: a header `n m s t a` followed by `m`
    /// lines `u v` with 0-indexed vertices.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (row, header) = lines.next().ok_or(Error::Parse {
            row: 1,
            msg: "missing header `n m s t a`".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                row,
                msg: format!("header needs 5 fields, found {}", fields.len()),
            });
        }
        let int = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                row,
                msg: format!("bad integer `{s}`: {e}"),
            })
        };
        let (n, m, s, t) = (int(fields[0])?, int(fields[1])?, int(fields[2])?, int(fields[3])?);
        let a: f64 = fields[4].parse().map_err(|e| Error::Parse {
            row,
            msg: format!("bad flow value `{}`: {e}", fields[4]),
        })?;
        let mut edges = Vec::with_capacity(m);
        for (row, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Parse {
                    row,
                    msg: "edge line needs `u v`".into(),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    row,
                    msg: format!("bad vertex `{s}`: {e}"),
                })
            };
            edges.push((parse(parts[0])?, parse(parts[1])?));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                row: 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, edges, s, t, a)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Copy of the network with a different required flow value.
    pub fn with_value(&self, value: f64) -> Result<Self> {
        Self::new(self.n_nodes, self.edges.clone(), self.source, self.sink, value)
    }

    /// Maximum `s → t` flow with unit capacities (shortest augmenting paths).
    pub fn max_flow(&self) -> f64 {
        let mut g = Residual::new(self.n_nodes);
        for &(u, v) in &self.edges {
            g.add(u, v, 1.0, 0.0);
        }
        let mut total = 0.0;
        loop {
            let mut parent = vec![None; self.n_nodes];
            let mut seen = vec![false; self.n_nodes];
            seen[self.source] = true;
            let mut queue = VecDeque::from([self.source]);
            while let Some(u) = queue.pop_front() {
                for &a in &g.adj[u] {
                    let to = g.arcs[a].to;
                    if g.arcs[a].cap > EPS && !seen[to] {
                        seen[to] = true;
                        parent[to] = Some(a);
                        queue.push_back(to);
                    }
                }
            }
            let Some(path) = g.path_to(&parent, self.source, self.sink) else {
                break;
            };
            let bottleneck = path.iter().map(|&a| g.arcs[a].cap).fold(f64::INFINITY, f64::min);
            for a in path {
                g.push(a, bottleneck);
            }
            total += bottleneck;
        }
        total
    }

    /// Minimum-cost flow of the required value under edge costs `costs`.
    ///
    /// Negative-cost edges are saturated up front, which leaves a residual
    /// graph with nonnegative costs; the remaining imbalances are then routed
    /// from a super source to a super sink by successive shortest paths.
    pub fn min_cost_flow(&self, costs: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.edges.len(), costs.len())?;
        let super_s = self.n_nodes;
        let super_t = self.n_nodes + 1;
        let mut g = Residual::new(self.n_nodes + 2);
        let mut supply = vec![0.0; self.n_nodes];
        supply[self.source] += self.value;
        supply[self.sink] -= self.value;

        let mut arc_of_edge = Vec::with_capacity(self.edges.len());
        for (&(u, v), &c) in self.edges.iter().zip(costs) {
            let id = g.add(u, v, 1.0, c);
            if c < 0.0 {
                g.push(id, 1.0);
                supply[u] -= 1.0;
                supply[v] += 1.0;
            }
            arc_of_edge.push(id);
        }
        let mut required = 0.0;
        for (z, &b) in supply.iter().enumerate() {
            if b > EPS {
                g.add(super_s, z, b, 0.0);
                required += b;
            } else if b < -EPS {
                g.add(z, super_t, -b, 0.0);
            }
        }

        let mut sent = 0.0;
        while sent < required - 1e-9 {
            let parent = g.shortest_paths(super_s);
            let Some(path) = g.path_to(&parent, super_s, super_t) else {
                break;
            };
            let bottleneck = path
                .iter()
                .map(|&a| g.arcs[a].cap)
                .fold(required - sent, f64::min);
            for a in path {
                g.push(a, bottleneck);
            }
            sent += bottleneck;
        }
        if sent < required - 1e-9 {
            return Err(Error::Infeasible(format!(
                "could not route flow value {} from {} to {}",
                self.value, self.source, self.sink
            )));
        }
        Ok(arc_of_edge
            .iter()
            .map(|&a| g.arcs[a ^ 1].cap.clamp(0.0, 1.0))
            .collect())
    }

    /// Net outflow minus required supply, per vertex.
    fn imbalance(&self, x: &[f64]) -> Vec<f64> {
        let mut net = vec![0.0; self.n_nodes];
        for (&(u, v), &f) in self.edges.iter().zip(x) {
            net[u] += f;
            net[v] -= f;
        }
        net[self.source] -= self.value;
        net[self.sink] += self.value;
        net
    }
}

impl ConstraintSet for FlowNetwork {
    fn dim(&self) -> usize {
        self.edges.len()
    }

    fn diameter(&self) -> f64 {
        (self.edges.len() as f64).sqrt()
    }

    fn radius(&self) -> f64 {
        (self.edges.len() as f64).sqrt()
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.edges.len()
            && x.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
            && self.imbalance(x).iter().all(|r| r.abs() <= tol.max(1e-12))
    }

    fn linear_opt(&self, d: &[f64], direction: Direction) -> Result<Point> {
        let flow = match direction {
            Direction::Minimize => self.min_cost_flow(d)?,
            Direction::Maximize => {
                check_dim(self.edges.len(), d.len())?;
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                self.min_cost_flow(&neg)?
            }
        };
        Ok(Point::from_vec(flow))
    }

    fn name(&self) -> &'static str {
        "flow network"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{dot, stream_rng};
    use rand::Rng;

    fn parallel(a: f64) -> FlowNetwork {
        FlowNetwork::new(2, vec![(0, 1), (0, 1)], 0, 1, a).unwrap()
    }

    #[test]
    fn parallel_edges() {
        let x = parallel(1.0).min_cost_flow(&[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.0]);
        let x = parallel(2.0).min_cost_flow(&[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
        assert_eq!(dot(&x, &[2.0, 3.0]), 5.0);
    }

    #[test]
    fn infeasible_value() {
        assert!(matches!(
            FlowNetwork::new(2, vec![(0, 1)], 0, 1, 2.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn negative_cycle_is_used() {
        // s→t directly, plus a cycle 1→2→1 with negative total cost.
        let net = FlowNetwork::new(3, vec![(0, 1), (1, 2), (2, 1)], 0, 1, 1.0).unwrap();
        let x = net.min_cost_flow(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(x, vec![1.0, 1.0, 1.0]);
        assert!(net.contains(&x, 1e-12));
    }

    fn brute_min(net: &FlowNetwork, costs: &[f64]) -> f64 {
        let m = net.edges().len();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << m) {
            let x: Vec<f64> = (0..m).map(|i| (mask >> i & 1) as f64).collect();
            if net.contains(&x, 1e-12) {
                best = best.min(dot(&x, costs));
            }
        }
        best
    }

    #[test]
    fn random_dag_matches_enumeration() {
        let mut rng = stream_rng(23, 0);
        let mut checked = 0;
        while checked < 30 {
            let mut edges = Vec::new();
            for u in 0..8 {
                for v in u + 1..8 {
                    if edges.len() < 16 && rng.random_bool(0.35) {
                        edges.push((u, v));
                    }
                }
            }
            let Ok(net) = FlowNetwork::new(8, edges, 0, 7, 2.0) else {
                continue;
            };
            let costs: Vec<f64> = (0..net.edges().len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = net.min_cost_flow(&costs).unwrap();
            assert!(net.contains(&x, 1e-9));
            assert!((dot(&x, &costs) - brute_min(&net, &costs)).abs() < 1e-9);
            checked += 1;
        }
    }

    #[test]
    fn parse_and_default_value() {
        let net = FlowNetwork::parse_edge_list("3 3 0 2 1\n0 1\n1 2\n0 2\n").unwrap();
        assert_eq!(net.edges().len(), 3);
        assert_eq!(net.max_flow(), 2.0);
        let d = FlowNetwork::with_default_value(3, net.edges().to_vec(), 0, 2).unwrap();
        assert_eq!(d.value(), 1.0);
        assert!(matches!(
            FlowNetwork::parse_edge_list("3 2 0 2 1\n0 1\n1 x\n"),
            Err(Error::Parse { row: 3, .. })
        ));
        assert!(FlowNetwork::parse_edge_list("3 3 0 2 1\n0 1\n").is_err());
    }
}
