//! Metric graphs: every edge is a segment of the given length, and points
//! may sit anywhere along an edge.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphPos {
    Node(usize),
    /// Interior point of `edge`, at distance `offset` from its first endpoint.
    Edge {
        edge: usize,
        offset: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricGraph {
    /// Node names, sorted so that index order is lexicographic order.
    pub nodes: Vec<String>,
    pub edges: Vec<GraphEdge>,
    #[serde(skip)]
    apsp: Vec<f64>,
    /// `pred[s * n + v]`: predecessor of `v` on the chosen path from `s`.
    #[serde(skip)]
    pred: Vec<usize>,
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl MetricGraph {
    pub fn new(edge_list: &[(String, String, f64)]) -> Result<Self> {
        let mut nodes: Vec<String> = edge_list
            .iter()
            .flat_map(|(a, b, _)| [a.clone(), b.clone()])
            .collect();
        nodes.sort();
        nodes.dedup();
        let index = |name: &str| nodes.binary_search_by(|x| x.as_str().cmp(name)).unwrap();
        let mut edges = Vec::with_capacity(edge_list.len());
        for (a, b, len) in edge_list {
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at `{a}`")));
            }
            if !(len.is_finite() && *len > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "edge {a}-{b} has non-positive length {len}"
                )));
            }
            let (ia, ib) = (index(a), index(b));
            edges.push(GraphEdge {
                a: ia.min(ib),
                b: ia.max(ib),
                length: *len,
            });
        }
        let n = nodes.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for e in &edges {
            adj[e.a].push((e.b, e.length));
            adj[e.b].push((e.a, e.length));
        }
        let mut apsp = vec![f64::INFINITY; n * n];
        let mut pred = vec![usize::MAX; n * n];
        for s in 0..n {
            let dist = &mut apsp[s * n..(s + 1) * n];
            let pr = &mut pred[s * n..(s + 1) * n];
            dist[s] = 0.0;
            let mut heap = BinaryHeap::new();
            heap.push(Item(0.0, s));
            while let Some(Item(d, u)) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &(v, w) in &adj[u] {
                    let nd = d + w;
                    // ties go to the smaller predecessor index
                    if nd < dist[v] || (nd == dist[v] && u < pr[v]) {
                        let improved = nd < dist[v];
                        dist[v] = nd;
                        pr[v] = u;
                        if improved {
                            heap.push(Item(nd, v));
                        }
                    }
                }
            }
        }
        if apsp.iter().any(|d| d.is_infinite()) {
            return Err(Error::InvalidParameter("graph is disconnected".into()));
        }
        Ok(MetricGraph {
            nodes,
            edges,
            apsp,
            pred,
        })
    }

    /// Three unit edges `hub–leaf1`, `hub–leaf2`, `hub–leaf3`.
    pub fn tripod() -> Self {
        let e = |l: &str| ("hub".to_string(), l.to_string(), 1.0);
        MetricGraph::new(&[e("leaf1"), e("leaf2"), e("leaf3")]).unwrap()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_dist(&self, u: usize, v: usize) -> f64 {
        self.apsp[u * self.n() + v]
    }

    /// Canonical form: interior offsets at an endpoint become nodes.
    pub fn normalize(&self, p: GraphPos) -> GraphPos {
        match p {
            GraphPos::Edge { edge, offset } => {
                let e = &self.edges[edge];
                if offset <= 0.0 {
                    GraphPos::Node(e.a)
                } else if offset >= e.length {
                    GraphPos::Node(e.b)
                } else {
                    p
                }
            }
            node => node,
        }
    }

    fn ends(&self, p: &GraphPos) -> Vec<(usize, f64)> {
        match *p {
            GraphPos::Node(u) => vec![(u, 0.0)],
            GraphPos::Edge { edge, offset } => {
                let e = &self.edges[edge];
                vec![(e.a, offset), (e.b, e.length - offset)]
            }
        }
    }

    pub fn dist(&self, x: &GraphPos, y: &GraphPos) -> f64 {
        let (x, y) = (self.normalize(*x), self.normalize(*y));
        let mut best = f64::INFINITY;
        if let Some(d) = self.same_edge_gap(&x, &y) {
            best = d;
        }
        for (u, du) in self.ends(&x) {
            for (v, dv) in self.ends(&y) {
                best = best.min(du + self.node_dist(u, v) + dv);
            }
        }
        best
    }

    fn same_edge_gap(&self, x: &GraphPos, y: &GraphPos) -> Option<f64> {
        match (x, y) {
            (
                GraphPos::Edge {
                    edge: e1,
                    offset: o1,
                },
                GraphPos::Edge {
                    edge: e2,
                    offset: o2,
                },
            ) if e1 == e2 => Some((o1 - o2).abs()),
            _ => None,
        }
    }

    /// Node path from `u` to `v` (inclusive) along the chosen shortest path.
    pub fn node_path(&self, u: usize, v: usize) -> Vec<usize> {
        let n = self.n();
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            cur = self.pred[u * n + cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Breakpoints of the chosen geodesic from `x` to `y`: `x`, the nodes it
    /// passes through, `y`. Consecutive breakpoints share an edge.
    pub fn breakpoints(&self, x: &GraphPos, y: &GraphPos) -> Vec<GraphPos> {
        let (x, y) = (self.normalize(*x), self.normalize(*y));
        let mut best: Option<(f64, Option<(usize, usize)>)> =
            self.same_edge_gap(&x, &y).map(|d| (d, None));
        for (u, du) in self.ends(&x) {
            for (v, dv) in self.ends(&y) {
                let d = du + self.node_dist(u, v) + dv;
                if best.is_none_or(|(b, _)| d < b) {
                    best = Some((d, Some((u, v))));
                }
            }
        }
        let mut out = vec![x];
        if let Some((_, Some((u, v)))) = best {
            for node in self.node_path(u, v) {
                let p = GraphPos::Node(node);
                if out.last() != Some(&p) {
                    out.push(p);
                }
            }
        }
        if out.last() != Some(&y) {
            out.push(y);
        }
        out
    }

    /// Edge shared by two positions, with their offsets along it.
    pub fn common_edge(&self, x: &GraphPos, y: &GraphPos) -> Option<(usize, f64, f64)> {
        let offset_on = |p: &GraphPos, e: usize| -> Option<f64> {
            let edge = &self.edges[e];
            match *p {
                GraphPos::Edge { edge: pe, offset } if pe == e => Some(offset),
                GraphPos::Node(u) if u == edge.a => Some(0.0),
                GraphPos::Node(u) if u == edge.b => Some(edge.length),
                _ => None,
            }
        };
        let mut best: Option<(usize, f64, f64)> = None;
        for e in 0..self.edges.len() {
            if let (Some(ox), Some(oy)) = (offset_on(x, e), offset_on(y, e)) {
                let better =
                    best.is_none_or(|(be, _, _)| self.edges[e].length < self.edges[be].length);
                if better {
                    best = Some((e, ox, oy));
                }
            }
        }
        best
    }

    /// Point at distance `t` from `x` towards `y`, where both lie on one edge.
    pub fn interpolate(&self, x: &GraphPos, y: &GraphPos, t: f64) -> GraphPos {
        match self.common_edge(x, y) {
            Some((e, ox, oy)) => {
                let dir = if oy >= ox { 1.0 } else { -1.0 };
                let off = (ox + dir * t).clamp(ox.min(oy), ox.max(oy));
                self.normalize(GraphPos::Edge {
                    edge: e,
                    offset: off,
                })
            }
            None => *x,
        }
    }

    /// Nodes and edge points at spacing at most `step`, each edge subdivided
    /// into equal parts.
    pub fn subdivision(&self, step: f64) -> Vec<(String, GraphPos)> {
        let mut out: Vec<(String, GraphPos)> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), GraphPos::Node(i)))
            .collect();
        for (ei, e) in self.edges.iter().enumerate() {
            let parts = (e.length / step).ceil().max(1.0) as usize;
            for k in 1..parts {
                let offset = e.length * k as f64 / parts as f64;
                out.push((
                    format!("{}-{}@{:.3}", self.nodes[e.a], self.nodes[e.b], offset),
                    GraphPos::Edge { edge: ei, offset },
                ));
            }
        }
        out
    }

    /// Deterministic points of each edge within distance `< radius` of `center`.
    pub fn ball_points(&self, center: &GraphPos, radius: f64) -> Vec<GraphPos> {
        let mut out = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            let mut offsets = Vec::new();
            for k in 1..8 {
                offsets.push(e.length * k as f64 / 8.0);
            }
            // reach into the edge from each endpoint inside the ball
            let da = self.dist(center, &GraphPos::Node(e.a));
            let db = self.dist(center, &GraphPos::Node(e.b));
            if da < radius {
                offsets.push(0.5 * (radius - da));
            }
            if db < radius {
                offsets.push(e.length - 0.5 * (radius - db));
            }
            if let GraphPos::Edge { edge, offset } = *center {
                if edge == ei {
                    offsets.push(offset - 0.5 * radius);
                    offsets.push(offset + 0.5 * radius);
                }
            }
            offsets.sort_by(f64::total_cmp);
            offsets.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            for off in offsets {
                if off <= 0.0 || off >= e.length {
                    continue;
                }
                let p = GraphPos::Edge {
                    edge: ei,
                    offset: off,
                };
                if self.dist(center, &p) < radius {
                    out.push(p);
                }
            }
        }
        out
    }
}
