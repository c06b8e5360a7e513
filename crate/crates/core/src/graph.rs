//! Quotients of the tree by the stabilizer of an order away from `p`.
//!
//! Vertices are conjugacy classes of orders in the genus; directed edges
//! out of a vertex are the orbits of its normalizer on the `p + 1`
//! neighbors. An orbit whose neighbor is conjugate back to the vertex is
//! either an inverted edge (drawn to a virtual vertex) or one end of a loop.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{QuatElement, QuaternionAlgebra};
use crate::arith::{rat, vectors_up_to, BigRat};
use crate::error::{internal, precondition, Error, Result};
use crate::ideal::{connecting_ideal, embed_quadratic, find_conjugator};
use crate::order::QuatOrder;
use crate::tree::{neighbor_orders_with, split_residue, Mat2, ResidueSplitting};

const CLASS_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct ClassVertex {
    pub id: usize,
    pub representative: QuatOrder,
    /// `|units| / 2`.
    pub unit_order: usize,
    /// Norms `d` of the normalizer elements found (always contains 1).
    pub normalizer_norms: Vec<u64>,
    pub valency: usize,
    pub is_endpoint: bool,
    pub omega_embeds: bool,
    pub omega_witness: Option<QuatElement>,
    pub part: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QuotientEdge {
    pub u: usize,
    pub v: usize,
    pub multiplicity: usize,
    pub inverted: bool,
}

#[derive(Clone, Debug)]
pub struct ClassifyingGraph {
    pub algebra: QuaternionAlgebra,
    pub p: u64,
    pub level: u64,
    pub root: usize,
    pub vertices: Vec<ClassVertex>,
    pub edges: Vec<QuotientEdge>,
    pub bipartite: bool,
    pub n: usize,
    pub r: usize,
}

impl ClassifyingGraph {
    /// Number of inverted half-edges, i.e. drawn virtual endpoints.
    pub fn virtual_endpoints(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.inverted)
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn omega_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.omega_embeds).count()
    }

    /// Neighbor lists of distinct vertices (loops and half-edges dropped).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            if e.u != e.v {
                adj[e.u].push(e.v);
                adj[e.v].push(e.u);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }
}

/// Per-class data gathered while exploring.
struct Explored {
    order: QuatOrder,
    theta: Vec<usize>,
    normalizer: Vec<(u64, QuatElement)>,
    unit_order: usize,
}

fn theta_series(o: &QuatOrder, up_to: i64) -> Result<Vec<usize>> {
    let g = o.lattice().gram_form();
    let bound = (rat(up_to) / &g.scale).floor().to_integer();
    let mut counts = vec![0usize; up_to as usize + 1];
    for (_, val) in vectors_up_to(&g, &bound)? {
        let n: BigRat = &g.scale * BigRat::from_integer(val);
        if n.is_integer() {
            if let Some(k) = n.to_integer().to_usize() {
                counts[k] += 1;
            }
        }
    }
    Ok(counts)
}

fn explore(order: QuatOrder, norms: &[u64]) -> Result<Explored> {
    let theta = theta_series(&order, 4)?;
    let normalizer = order.normalizer_elements(norms)?;
    let unit_order = order.unit_order_mod_sign()?;
    Ok(Explored {
        order,
        theta,
        normalizer,
        unit_order,
    })
}

/// Images in `GL_2(F_p)` of normalizer elements.
fn residue_images(s: &ResidueSplitting, elems: &[(u64, QuatElement)]) -> Result<Vec<Mat2>> {
    elems
        .iter()
        .map(|(_, x)| {
            s.image(x)
                .ok_or_else(|| internal("normalizer element is not integral at p"))
        })
        .collect()
}

/// Orbits of the lines under the given matrices, each as a sorted list of
/// line indices; orbits ordered by smallest member.
fn line_orbits(s: &ResidueSplitting, mats: &[Mat2]) -> Result<Vec<Vec<usize>>> {
    let lines = s.lines();
    let mut comp: Vec<usize> = (0..lines.len()).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for g in mats {
        for (idx, &v) in lines.iter().enumerate() {
            let img = s
                .act_on_line(g, v)
                .ok_or_else(|| internal("element not invertible modulo p"))?;
            let (a, b) = (find(&mut comp, idx), find(&mut comp, img));
            if a != b {
                comp[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for idx in 0..lines.len() {
        let r = find(&mut comp, idx);
        groups.entry(r).or_default().push(idx);
    }
    Ok(groups.into_values().collect())
}

/// The permutations of the neighbors of `o` induced by its normalizer,
/// computed twice: through the residue matrices acting on lines, and by
/// conjugating the neighbor orders directly.
pub fn neighbor_permutations(o: &QuatOrder, p: u64) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    let s = split_residue(o, p)?;
    let norms = o.normalizer_norms()?;
    let elems = o.normalizer_elements(&norms)?;
    let mats = residue_images(&s, &elems)?;
    let lines = s.lines();
    let via_residue = mats
        .iter()
        .map(|g| {
            lines
                .iter()
                .map(|&v| s.act_on_line(g, v).expect("invertible"))
                .collect()
        })
        .collect();
    let nbrs = neighbor_orders_with(&s)?;
    let mut via_conjugation = Vec::new();
    for (_, x) in &elems {
        let mut perm = Vec::new();
        for n in &nbrs {
            let c = n.conjugated_by(x)?;
            perm.push(
                nbrs.iter()
                    .position(|m| *m == c)
                    .ok_or_else(|| internal("conjugate is not a neighbor"))?,
            );
        }
        via_conjugation.push(perm);
    }
    Ok((via_residue, via_conjugation))
}

/// An element swapping the adjacent orders `d1` and `d2` by conjugation.
/// Candidates have norm `p * d` for the normalizer norms `d` and are taken
/// from `d1 ∩ d2` and from both connecting ideals.
pub fn inversion_test(d1: &QuatOrder, d2: &QuatOrder, p: u64) -> Result<Option<QuatElement>> {
    let norms = d1.normalizer_norms()?;
    let meet = d1.intersection(d2)?;
    let lattices = [
        meet.lattice().clone(),
        connecting_ideal(d1, d2)?.lattice,
        connecting_ideal(d2, d1)?.lattice,
    ];
    for lattice in &lattices {
        for &d in &norms {
            for x in lattice.elements_of_norm(&rat((p * d) as i64))? {
                if d1.conjugated_by(&x)? == *d2 && d2.conjugated_by(&x)? == *d1 {
                    return Ok(Some(x));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug)]
struct DirectedOrbit {
    target: usize,
    inverted: bool,
}

/// Breadth-first construction of the classifying graph of `d` at `p`.
pub fn build_classifying_graph(d: &QuatOrder, p: u64) -> Result<ClassifyingGraph> {
    let alg = d.algebra().clone();
    if !alg.is_definite() {
        return Err(Error::Indefinite);
    }
    if alg.is_ramified_at(p) {
        return Err(Error::Ramified(p));
    }
    if !d.is_maximal_at(p) {
        return Err(Error::NotMaximalAt(p));
    }
    let norms = d.normalizer_norms()?;
    let level = d
        .level()
        .to_u64()
        .ok_or_else(|| precondition("level too large"))?;

    let mut classes: Vec<Explored> = vec![explore(d.clone(), &norms)?];
    let mut orbits: Vec<Vec<DirectedOrbit>> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        let s = split_residue(&classes[i].order, p)?;
        let mats = residue_images(&s, &classes[i].normalizer)?;
        let groups = line_orbits(&s, &mats)?;
        let lines = s.lines();
        let mut out = Vec::new();
        for group in groups {
            let lattice = s.line_ideal(lines[group[0]])?;
            let nbr = crate::order::right_order_of(&lattice)?;
            let theta = theta_series(&nbr, 4)?;
            let mut target = None;
            for (k, c) in classes.iter().enumerate() {
                if c.theta != theta {
                    continue;
                }
                if find_conjugator(&c.order, &nbr, &norms)?.is_some() {
                    target = Some(k);
                    break;
                }
            }
            let target = match target {
                Some(k) => k,
                None => {
                    if classes.len() >= CLASS_LIMIT {
                        return Err(internal("class limit exceeded"));
                    }
                    classes.push(explore(nbr.clone(), &norms)?);
                    queue.push_back(classes.len() - 1);
                    classes.len() - 1
                }
            };
            let inverted = target == i && inversion_test(&classes[i].order, &nbr, p)?.is_some();
            out.push(DirectedOrbit { target, inverted });
        }
        if orbits.len() <= i {
            orbits.resize_with(i + 1, Vec::new);
        }
        orbits[i] = out;
    }
    orbits.resize_with(classes.len(), Vec::new);

    let raw_edges = assemble_edges(&orbits)?;

    // Renumber by canonical key of the representatives.
    let mut order_idx: Vec<usize> = (0..classes.len()).collect();
    order_idx.sort_by(|&a, &b| classes[a].order.cmp(&classes[b].order));
    let mut new_id = vec![0usize; classes.len()];
    for (new, &old) in order_idx.iter().enumerate() {
        new_id[old] = new;
    }
    let mut edges: Vec<QuotientEdge> = raw_edges
        .into_iter()
        .map(|e| {
            let (a, b) = (new_id[e.u], new_id[e.v]);
            QuotientEdge {
                u: a.min(b),
                v: a.max(b),
                ..e
            }
        })
        .collect();
    edges.sort();

    let mut vertices = Vec::with_capacity(classes.len());
    for (new, &old) in order_idx.iter().enumerate() {
        let c = &classes[old];
        let valency = orbits[old].len();
        let omega_witness = embed_quadratic(&c.order, -1, 1)?;
        let mut nn: Vec<u64> = c.normalizer.iter().map(|(d, _)| *d).collect();
        nn.sort_unstable();
        nn.dedup();
        vertices.push(ClassVertex {
            id: new,
            representative: c.order.clone(),
            unit_order: c.unit_order,
            normalizer_norms: nn,
            valency,
            is_endpoint: valency == 1,
            omega_embeds: omega_witness.is_some(),
            omega_witness,
            part: None,
        });
    }
    let n = vertices.len();
    let r = vertices.iter().filter(|v| v.is_endpoint).count();
    let mut g = ClassifyingGraph {
        algebra: alg,
        p,
        level,
        root: new_id[0],
        vertices,
        edges,
        bipartite: false,
        n,
        r,
    };
    if let Some(parts) = spinor_partition(&g) {
        for (v, part) in g.vertices.iter_mut().zip(parts) {
            v.part = Some(part);
        }
        g.bipartite = true;
    }
    Ok(g)
}

fn assemble_edges(orbits: &[Vec<DirectedOrbit>]) -> Result<Vec<QuotientEdge>> {
    let n = orbits.len();
    let mut count = vec![vec![0usize; n]; n];
    let mut half = vec![0usize; n];
    for (i, out) in orbits.iter().enumerate() {
        for o in out {
            if o.inverted {
                half[i] += 1;
            } else {
                count[i][o.target] += 1;
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        if half[i] > 0 {
            edges.push(QuotientEdge {
                u: i,
                v: i,
                multiplicity: half[i],
                inverted: true,
            });
        }
        if !count[i][i].is_multiple_of(2) {
            return Err(internal(format!("odd number of loop ends at class {i}")));
        }
        if count[i][i] > 0 {
            edges.push(QuotientEdge {
                u: i,
                v: i,
                multiplicity: count[i][i] / 2,
                inverted: false,
            });
        }
        for j in i + 1..n {
            if count[i][j] != count[j][i] {
                return Err(internal(format!(
                    "edges between classes {i} and {j} do not reconcile ({} vs {})",
                    count[i][j], count[j][i]
                )));
            }
            if count[i][j] > 0 {
                edges.push(QuotientEdge {
                    u: i,
                    v: j,
                    multiplicity: count[i][j],
                    inverted: false,
                });
            }
        }
    }
    Ok(edges)
}

/// Two-coloring by distance parity from the root, if the graph has no odd
/// closed walk (a loop or a half-edge counts as one).
pub fn spinor_partition(g: &ClassifyingGraph) -> Option<Vec<u8>> {
    if g.edges.iter().any(|e| e.u == e.v) {
        return None;
    }
    let n = g.vertices.len();
    let adj = g.adjacency();
    let mut color: Vec<Option<u8>> = vec![None; n];
    let mut queue = VecDeque::new();
    for start in std::iter::once(g.root).chain(0..n) {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(0);
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].expect("colored");
            for &w in &adj[u] {
                match color[w] {
                    None => {
                        color[w] = Some(1 - cu);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cu => return None,
                    _ => {}
                }
            }
        }
    }
    Some(color.into_iter().map(|c| c.expect("colored")).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointViolation {
    pub vertex: usize,
    pub is_endpoint: bool,
    pub omega_embeds: bool,
}

/// Vertices where "valency one" and "contains a cubic root of unity" disagree.
pub fn endpoints_cross_check(g: &ClassifyingGraph) -> Result<Vec<EndpointViolation>> {
    if g.p != 2 {
        return Err(precondition("the endpoint criterion is stated at p = 2"));
    }
    Ok(g.vertices
        .iter()
        .filter(|v| v.is_endpoint != v.omega_embeds)
        .map(|v| EndpointViolation {
            vertex: v.id,
            is_endpoint: v.is_endpoint,
            omega_embeds: v.omega_embeds,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassReport {
    /// Sum over classes of `c_i / w_i`, with `c_i` the number of ideal
    /// classes whose right order is the class representative.
    pub computed: BigRat,
    pub expected: BigRat,
    pub unit_orders: Vec<usize>,
    pub ideal_class_counts: Vec<usize>,
    pub ok: bool,
}

/// Compares the class data with the Eichler mass formula
/// `(1/12) * prod_{ramified q} (q - 1) * prod_{q | level} (q + 1)`.
pub fn mass_check(g: &ClassifyingGraph) -> Result<MassReport> {
    let ram = &g.algebra.ramified_places().primes;
    let level_primes = crate::arith::prime_factors(&BigInt::from(g.level));
    let mut expected = BigRat::new(BigInt::from(1), BigInt::from(12));
    for &q in ram {
        expected *= rat(q as i64 - 1);
    }
    for &q in &level_primes {
        expected *= rat(q as i64 + 1);
    }
    let two_sided = 1usize << (ram.len() + level_primes.len());
    let mut computed = BigRat::zero();
    let mut counts = Vec::new();
    for v in &g.vertices {
        let c = two_sided / v.normalizer_norms.len();
        counts.push(c);
        computed += BigRat::new(BigInt::from(c), BigInt::from(v.unit_order));
    }
    Ok(MassReport {
        ok: computed == expected,
        computed,
        expected,
        unit_orders: g.vertices.iter().map(|v| v.unit_order).collect(),
        ideal_class_counts: counts,
    })
}

#[derive(Clone, Debug)]
pub struct OmegaDepthReport {
    pub rho: usize,
    pub distances: Vec<usize>,
    /// `(t, n)` of the polynomial embedded in every class.
    pub polynomial: (i64, i64),
    pub witnesses: Vec<Option<QuatElement>>,
    pub all_embed: bool,
}

/// Largest distance to the endpoint set, and the embedding of
/// `Z[2^(rho-1) sqrt(-3)]` (or of the cubic roots of unity when `rho = 0`)
/// into every class.
pub fn omega_depth(g: &ClassifyingGraph) -> Result<OmegaDepthReport> {
    let sources: Vec<usize> = g
        .vertices
        .iter()
        .filter(|v| v.is_endpoint)
        .map(|v| v.id)
        .collect();
    if sources.is_empty() {
        return Err(precondition("graph has no endpoint"));
    }
    let adj = g.adjacency();
    let mut dist = vec![usize::MAX; g.vertices.len()];
    let mut queue = VecDeque::new();
    for s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let rho = *dist.iter().max().expect("nonempty");
    let polynomial = if rho == 0 {
        (-1, 1)
    } else {
        (0, 3 * 4i64.pow(rho as u32 - 1))
    };
    let witnesses: Vec<Option<QuatElement>> = g
        .vertices
        .iter()
        .map(|v| embed_quadratic(&v.representative, polynomial.0, polynomial.1))
        .collect::<Result<_>>()?;
    let all_embed = witnesses.iter().all(Option::is_some);
    Ok(OmegaDepthReport {
        rho,
        distances: dist,
        polynomial,
        witnesses,
        all_embed,
    })
}

/// Genus of maximal orders of the algebra ramified at `{q, inf}`.
pub fn maximal_order_graph(q: u64) -> Result<ClassifyingGraph> {
    let alg = crate::algebra::algebra_for_ramification(q)?;
    let o = crate::order::maximal_order(&alg)?;
    build_classifying_graph(&o, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::maximal_order;

    #[test]
    fn small_ramified_primes() {
        for (q, half_edges) in [(3, 1), (5, 1), (7, 2), (13, 2)] {
            let g = maximal_order_graph(q).unwrap();
            assert_eq!(g.n, 1, "q={q}");
            assert_eq!(g.virtual_endpoints(), half_edges, "q={q}");
            assert!(mass_check(&g).unwrap().ok, "q={q}");
            assert!(endpoints_cross_check(&g).unwrap().is_empty(), "q={q}");
            assert!(!g.bipartite);
        }
    }

    #[test]
    fn residue_and_conjugation_actions_agree() {
        let o = maximal_order(&QuaternionAlgebra::from_ints(-1, -3).unwrap()).unwrap();
        let (a, b) = neighbor_permutations(&o, 2).unwrap();
        assert_eq!(a, b);
        let o = maximal_order(&QuaternionAlgebra::from_ints(-1, -7).unwrap()).unwrap();
        let (a, b) = neighbor_permutations(&o, 2).unwrap();
        assert_eq!(a, b);
    }
}
