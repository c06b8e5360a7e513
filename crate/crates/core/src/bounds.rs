//! Endpoint-count bounds for graphs of valency at most three, the
//! nail/fork reduction to extremal trees, random test graphs, and the
//! bound verdicts for classifying graphs.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::graph::ClassifyingGraph;

pub const PART_A: u8 = 0;
pub const PART_B: u8 = 1;

/// Undirected multigraph with loops and half-edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    pub vertex_count: usize,
    /// `(u, v, multiplicity)` with `u <= v`; `u == v` is a loop.
    pub edges: Vec<(usize, usize, usize)>,
    /// Vertices carrying a half-edge, repeated per half-edge.
    pub half_edges: Vec<usize>,
    /// Optional bipartition, `PART_A` or `PART_B` per vertex.
    pub parts: Option<Vec<u8>>,
}

impl MultiGraph {
    pub fn new(vertex_count: usize) -> Self {
        MultiGraph {
            vertex_count,
            edges: Vec::new(),
            half_edges: Vec::new(),
            parts: None,
        }
    }

    pub fn add_vertex(&mut self, part: Option<u8>) -> usize {
        if let (Some(parts), Some(p)) = (self.parts.as_mut(), part) {
            parts.push(p);
        }
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        let (a, b) = (u.min(v), u.max(v));
        match self.edges.iter_mut().find(|e| e.0 == a && e.1 == b) {
            Some(e) => e.2 += 1,
            None => self.edges.push((a, b, 1)),
        }
    }

    fn remove_edge(&mut self, u: usize, v: usize) {
        let (a, b) = (u.min(v), u.max(v));
        if let Some(k) = self.edges.iter().position(|e| e.0 == a && e.1 == b) {
            self.edges[k].2 -= 1;
            if self.edges[k].2 == 0 {
                self.edges.remove(k);
            }
        }
    }

    /// Loops count 2, half-edges 1.
    pub fn valencies(&self) -> Vec<usize> {
        let mut val = vec![0; self.vertex_count];
        for &(u, v, m) in &self.edges {
            val[u] += m;
            val[v] += m;
        }
        for &h in &self.half_edges {
            val[h] += 1;
        }
        val
    }

    /// Number of full edges, loops included, counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn max_valency(&self) -> usize {
        self.valencies().into_iter().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertex_count];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// Connected, no loops or half-edges, and exactly `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        self.half_edges.is_empty()
            && self.edges.iter().all(|e| e.0 != e.1)
            && self.edge_count() + 1 == self.vertex_count
            && self.is_connected()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v, _) in &self.edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        adj
    }

    fn part(&self, v: usize) -> Option<u8> {
        self.parts.as_ref().map(|p| p[v])
    }

    /// Proper bipartition: parts present, every edge joins A to B, no
    /// loops or half-edges.
    pub fn is_properly_bipartite(&self) -> bool {
        let Some(parts) = &self.parts else {
            return false;
        };
        parts.len() == self.vertex_count
            && self.half_edges.is_empty()
            && self.edges.iter().all(|&(u, v, _)| parts[u] != parts[v])
    }

    /// Graph of a classifying graph: inverted edges become half-edges.
    pub fn from_classifying(g: &ClassifyingGraph) -> Self {
        let mut m = MultiGraph::new(g.vertices.len());
        for e in &g.edges {
            if e.inverted {
                m.half_edges
                    .extend(std::iter::repeat_n(e.u, e.multiplicity));
            } else {
                for _ in 0..e.multiplicity {
                    m.add_edge(e.u, e.v);
                }
            }
        }
        m.edges.sort_unstable();
        if g.bipartite {
            m.parts = g.vertices.iter().map(|v| v.part).collect();
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    /// A-vertices with zero, one, two and three neighboring B-endpoints.
    pub m: usize,
    pub p: usize,
    pub s: usize,
    pub q3: usize,
    pub bound_holds: bool,
    pub equality: bool,
    /// Whether the graph has the extremal shape.
    pub characterization: bool,
    /// `equality == characterization`.
    pub equality_characterization_holds: bool,
    /// Intermediate inequalities (general case) or counting identities
    /// (bipartite extremal case); true when not applicable.
    pub proof_steps_hold: bool,
}

/// `r <= t + 2` for a connected graph of valency at most three, with
/// equality exactly for trees whose valencies are all 1 or 3.
pub fn check_endpoint_bound(g: &MultiGraph) -> Result<BoundReport> {
    if !g.is_connected() {
        return Err(precondition("graph is not connected"));
    }
    let val = g.valencies();
    if val.iter().any(|&d| d > 3) {
        return Err(precondition("a vertex has valency above 3"));
    }
    let n = g.vertex_count;
    let r = val.iter().filter(|&&d| d == 1).count();
    let t = n - r;
    let v = g.edge_count();
    let proof_steps_hold = v + 1 >= n && 3 * t + r >= 2 * v;
    let equality = r == t + 2;
    let characterization = g.is_tree() && val.iter().all(|&d| d == 1 || d == 3);
    Ok(BoundReport {
        n,
        r,
        t,
        m: 0,
        p: 0,
        s: 0,
        q3: 0,
        bound_holds: r <= t + 2,
        equality,
        characterization,
        equality_characterization_holds: equality == characterization,
        proof_steps_hold,
    })
}

fn bipartite_checks(g: &MultiGraph) -> Result<Vec<usize>> {
    if !g.is_properly_bipartite() {
        return Err(precondition("graph is not bipartite as presented"));
    }
    let val = g.valencies();
    if val.iter().any(|&d| d > 3) {
        return Err(precondition("a vertex has valency above 3"));
    }
    Ok(val)
}

/// `r <= 3(n + 1)/4` where `n` and `r` count B-vertices and B-endpoints.
/// On extremal trees the counting identities behind `r = 3(t + 1)` are
/// verified as well.
pub fn check_bipartite_bound(g: &MultiGraph) -> Result<BoundReport> {
    let val = bipartite_checks(g)?;
    let parts = g.parts.as_ref().expect("checked");
    let in_b = |v: usize| parts[v] == PART_B;
    let n = (0..g.vertex_count).filter(|&v| in_b(v)).count();
    let r = (0..g.vertex_count)
        .filter(|&v| in_b(v) && val[v] == 1)
        .count();
    let t = n - r;
    let characterization = g.is_tree()
        && (0..g.vertex_count).all(|v| {
            if in_b(v) {
                val[v] == 1 || val[v] == 3
            } else {
                val[v] == 3
            }
        });
    let equality = 4 * r == 3 * (n + 1);

    let mut counts = [0usize; 4];
    let adj = g.adjacency();
    for a in (0..g.vertex_count).filter(|&v| !in_b(v)) {
        let k = adj[a].iter().filter(|&&w| val[w] == 1).count();
        counts[k.min(3)] += 1;
    }
    let [m, p, s, q3] = counts;
    let proof_steps_hold = !characterization
        || (r == t + m + p + s + q3 + 2
            && r == p + 2 * s + 3 * q3
            && 3 * t == 3 * m + 2 * p + s
            && r == 3 * (t + 1));
    Ok(BoundReport {
        n,
        r,
        t,
        m,
        p,
        s,
        q3,
        bound_holds: 4 * r <= 3 * (n + 1),
        equality,
        characterization,
        equality_characterization_holds: equality == characterization,
        proof_steps_hold,
    })
}

/// Hangs a fork (an A-vertex with two B-leaves) on the B-vertex `b`.
fn add_fork(g: &mut MultiGraph, b: usize) {
    let a = g.add_vertex(Some(PART_A));
    g.add_edge(b, a);
    for _ in 0..2 {
        let leaf = g.add_vertex(Some(PART_B));
        g.add_edge(a, leaf);
    }
}

/// Hangs a nail (a B-leaf) on the A-vertex `a`.
fn add_nail(g: &mut MultiGraph, a: usize) {
    let leaf = g.add_vertex(Some(PART_B));
    g.add_edge(a, leaf);
}

/// An edge lying on a cycle, if any: a repeated edge or a non-bridge.
fn cycle_edge(g: &MultiGraph) -> Option<(usize, usize)> {
    if let Some(&(u, v, _)) = g.edges.iter().find(|e| e.2 > 1) {
        return Some((u, v));
    }
    let adj = g.adjacency();
    for &(u, v, _) in &g.edges {
        // Is v reachable from u without the edge (u, v)?
        let mut seen = vec![false; g.vertex_count];
        seen[u] = true;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &w in &adj[x] {
                if (x == u && w == v) || (x == v && w == u) || seen[w] {
                    continue;
                }
                if w == v {
                    return Some((u, v));
                }
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Turns a connected bipartite graph into a tree with A-valencies 3 and
/// B-valencies 1 or 3: cycles are cut by replacing an edge with a
/// nail-fork pair, then forks are hung on B-vertices of valency 2 and
/// nails on A-vertices of valency below 3. Original vertices keep their
/// indices.
pub fn nailfork_reduce(g: &MultiGraph) -> Result<MultiGraph> {
    bipartite_checks(g)?;
    if !g.is_connected() {
        return Err(precondition("graph is not connected"));
    }
    if g.edge_count() == 0 {
        return Err(precondition("graph has no edges"));
    }
    let mut out = g.clone();
    while let Some((u, v)) = cycle_edge(&out) {
        let (a, b) = if out.part(u) == Some(PART_A) {
            (u, v)
        } else {
            (v, u)
        };
        out.remove_edge(a, b);
        add_fork(&mut out, b);
        add_nail(&mut out, a);
    }
    let val = out.valencies();
    for x in 0..out.vertex_count {
        match (out.part(x), val[x]) {
            (Some(PART_B), 2) => add_fork(&mut out, x),
            (Some(PART_A), d) if d < 3 => {
                for _ in d..3 {
                    add_nail(&mut out, x);
                }
            }
            _ => {}
        }
    }
    out.edges.sort_unstable();
    Ok(out)
}

fn attachable(val: &[usize], cap: usize, candidates: impl Iterator<Item = usize>) -> Vec<usize> {
    candidates.filter(|&v| val[v] < cap).collect()
}

/// Connected random multigraph with valency at most `max_valency`: a random
/// spanning tree plus random extra edges, loops and half-edges.
pub fn random_graph(n: usize, max_valency: usize, seed: u64) -> Result<MultiGraph> {
    if n == 0 {
        return Err(precondition("need at least one vertex"));
    }
    if max_valency < 2 && n > 2 {
        return Err(precondition(format!(
            "valency cap {max_valency} cannot connect {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = MultiGraph::new(n);
    let mut val = vec![0usize; n];
    for k in 1..n {
        let open = attachable(&val, max_valency, 0..k);
        let &u = open
            .choose(&mut rng)
            .ok_or_else(|| precondition("valency cap too small"))?;
        g.add_edge(u, k);
        val[u] += 1;
        val[k] += 1;
    }
    let extras = rng.gen_range(0..=n);
    for _ in 0..extras {
        let open = attachable(&val, max_valency, 0..n);
        if open.is_empty() {
            break;
        }
        let u = *open.choose(&mut rng).expect("nonempty");
        match rng.gen_range(0..10) {
            0 => {
                g.half_edges.push(u);
                val[u] += 1;
            }
            1 if val[u] + 2 <= max_valency => {
                g.add_edge(u, u);
                val[u] += 2;
            }
            _ => {
                let v = *open.choose(&mut rng).expect("nonempty");
                if u != v {
                    g.add_edge(u, v);
                    val[u] += 1;
                    val[v] += 1;
                }
            }
        }
    }
    g.edges.sort_unstable();
    g.half_edges.sort_unstable();
    Ok(g)
}

/// Connected random bipartite multigraph with `n_a` A-vertices (indices
/// first) and `n_b` B-vertices, valency at most 3.
pub fn random_bipartite(n_a: usize, n_b: usize, seed: u64) -> Result<MultiGraph> {
    let total = n_a + n_b;
    if n_b == 0 || total < 1 || total - 1 > 3 * n_a.min(n_b) && total > 1 {
        return Err(precondition(format!(
            "no connected bipartite graph with parts {n_a}, {n_b} and valency <= 3"
        )));
    }
    let parts: Vec<u8> = (0..total)
        .map(|v| if v < n_a { PART_A } else { PART_B })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..1000 {
        let mut g = MultiGraph::new(total);
        g.parts = Some(parts.clone());
        let mut val = vec![0usize; total];
        let mut placed = vec![false; total];
        let mut order: Vec<usize> = (0..total).collect();
        order.shuffle(&mut rng);
        placed[order[0]] = true;
        let mut pending: Vec<usize> = order[1..].to_vec();
        while !pending.is_empty() {
            let options: Vec<(usize, Vec<usize>)> = pending
                .iter()
                .enumerate()
                .filter_map(|(i, &x)| {
                    let open: Vec<usize> = (0..total)
                        .filter(|&y| placed[y] && parts[y] != parts[x] && val[y] < 3)
                        .collect();
                    (!open.is_empty()).then_some((i, open))
                })
                .collect();
            let Some((i, open)) = options.choose(&mut rng) else {
                continue 'attempt;
            };
            let x = pending.swap_remove(*i);
            let y = *open.choose(&mut rng).expect("nonempty");
            g.add_edge(x, y);
            val[x] += 1;
            val[y] += 1;
            placed[x] = true;
        }
        let extras = rng.gen_range(0..=total / 2);
        for _ in 0..extras {
            let a_open: Vec<usize> = (0..n_a).filter(|&v| val[v] < 3).collect();
            let b_open: Vec<usize> = (n_a..total).filter(|&v| val[v] < 3).collect();
            let (Some(&a), Some(&b)) = (a_open.choose(&mut rng), b_open.choose(&mut rng)) else {
                break;
            };
            g.add_edge(a, b);
            val[a] += 1;
            val[b] += 1;
        }
        g.edges.sort_unstable();
        return Ok(g);
    }
    Err(precondition("random construction failed"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selectivity {
    /// The cubic roots of unity embed into some classes but not all.
    Selective,
    /// They embed into every class.
    NotSelective,
    /// They embed into no class.
    NotRepresented,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartBound {
    pub part: u8,
    pub n: usize,
    pub r: usize,
    pub bound_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundVerdicts {
    pub n: usize,
    pub r: usize,
    /// `r <= n/2 + 1`.
    pub half_bound_holds: bool,
    /// Per-part `r_B <= 3(n_B + 1)/4`, when the graph is bipartite.
    pub part_bounds: Option<Vec<PartBound>>,
    /// A bipartite graph with cubic roots of unity in both parts, all of
    /// them at endpoints, has exactly two vertices.
    pub two_vertex_consistent: bool,
    pub omega_classes: usize,
    pub selectivity: Selectivity,
    /// Every vertex is an endpoint or adjacent to one.
    pub all_near_endpoints: bool,
    pub bound_holds: bool,
}

pub fn bound_verdicts(g: &ClassifyingGraph) -> BoundVerdicts {
    let n = g.vertices.len();
    let r = g.vertices.iter().filter(|v| v.is_endpoint).count();
    let half_bound_holds = 2 * r <= n + 2;
    let part_bounds = g.bipartite.then(|| {
        [0u8, 1]
            .into_iter()
            .map(|part| {
                let vs: Vec<_> = g.vertices.iter().filter(|v| v.part == Some(part)).collect();
                let rb = vs.iter().filter(|v| v.is_endpoint).count();
                PartBound {
                    part,
                    n: vs.len(),
                    r: rb,
                    bound_holds: 4 * rb <= 3 * (vs.len() + 1),
                }
            })
            .collect::<Vec<_>>()
    });
    let omega_in_part = |part: u8| {
        g.vertices
            .iter()
            .any(|v| v.part == Some(part) && v.omega_embeds)
    };
    let premise = g.bipartite
        && omega_in_part(0)
        && omega_in_part(1)
        && g.vertices
            .iter()
            .filter(|v| v.omega_embeds)
            .all(|v| v.is_endpoint);
    let two_vertex_consistent = !premise || n == 2;
    let omega_classes = g.omega_count();
    let selectivity = match omega_classes {
        0 => Selectivity::NotRepresented,
        c if c == n => Selectivity::NotSelective,
        _ => Selectivity::Selective,
    };
    let adj = g.adjacency();
    let all_near_endpoints = g
        .vertices
        .iter()
        .all(|v| v.is_endpoint || adj[v.id].iter().any(|&w| g.vertices[w].is_endpoint));
    let bound_holds = half_bound_holds
        && part_bounds
            .as_ref()
            .is_none_or(|ps| ps.iter().all(|b| b.bound_holds))
        && two_vertex_consistent;
    BoundVerdicts {
        n,
        r,
        half_bound_holds,
        part_bounds,
        two_vertex_consistent,
        omega_classes,
        selectivity,
        all_near_endpoints,
        bound_holds,
    }
}
