//! Sets of tree vertices whose orders contain a given set of elements.

use std::collections::HashMap;

use num_traits::Zero;

use crate::algebra::QuatElement;
use crate::arith::{prime_factors, rat};
use crate::error::{precondition, Error, Result};
use crate::graph::inversion_test;
use crate::ideal::contains_all;
use crate::order::{conductor_exponent, maximalize, QuatOrder};
use crate::tree::neighbor_orders;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocusShape {
    Empty,
    SingleVertex,
    EdgePair,
    BoundedSet,
    UnboundedPath,
}

impl LocusShape {
    pub fn as_str(self) -> &'static str {
        match self {
            LocusShape::Empty => "empty",
            LocusShape::SingleVertex => "single-vertex",
            LocusShape::EdgePair => "edge-pair",
            LocusShape::BoundedSet => "bounded-set",
            LocusShape::UnboundedPath => "unbounded-path",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocusReport {
    pub p: u64,
    /// Locus vertices with their distance from the root, in discovery order.
    pub vertices: Vec<(QuatOrder, u32)>,
    /// Tree edges between locus vertices (indices into `vertices`).
    pub edges: Vec<(usize, usize)>,
    pub shape: LocusShape,
    pub radius_searched: u32,
    pub boundary_certified: bool,
    /// For path-shaped loci, the vertices in order along the path.
    pub path: Option<Vec<usize>>,
}

impl LocusReport {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn path_orders(&self) -> Option<Vec<QuatOrder>> {
        self.path
            .as_ref()
            .map(|p| p.iter().map(|&i| self.vertices[i].0.clone()).collect())
    }
}

/// Breadth-first search in the tree at `p` around `root` for orders
/// containing every element of `gens`, up to distance `radius`.
///
/// When the root contains the generators only locus vertices are expanded
/// (the locus is connected); otherwise the whole ball is searched. The
/// boundary is certified when no locus vertex sits at distance `radius`.
pub fn containment_locus(
    gens: &[QuatElement],
    root: &QuatOrder,
    p: u64,
    radius: u32,
) -> Result<LocusReport> {
    for g in gens {
        if !g.trd().is_integer() || !g.nrd().is_integer() {
            return Err(Error::NotIntegral(format!("generator {g} is not integral")));
        }
    }
    if !root.is_maximal_at(p) {
        return Err(Error::NotMaximalAt(p));
    }
    let root_in = contains_all(root, gens);
    let mut seen: HashMap<QuatOrder, usize> = HashMap::new();
    // (order, depth, parent)
    let mut nodes: Vec<(QuatOrder, u32, Option<usize>)> = vec![(root.clone(), 0, None)];
    seen.insert(root.clone(), 0);
    let mut head = 0;
    while head < nodes.len() {
        let (order, depth, _) = nodes[head].clone();
        let expand = depth < radius && (!root_in || contains_all(&order, gens));
        if expand {
            for n in neighbor_orders(&order, p)? {
                if seen.contains_key(&n) {
                    continue;
                }
                if root_in && !contains_all(&n, gens) {
                    continue;
                }
                seen.insert(n.clone(), nodes.len());
                nodes.push((n, depth + 1, Some(head)));
            }
        }
        head += 1;
    }

    let mut index = vec![None; nodes.len()];
    let mut vertices = Vec::new();
    for (k, (o, d, _)) in nodes.iter().enumerate() {
        if contains_all(o, gens) {
            index[k] = Some(vertices.len());
            vertices.push((o.clone(), *d));
        }
    }
    // Search trees never revisit a vertex, so locus edges are parent links.
    let mut edges = Vec::new();
    for (k, (_, _, parent)) in nodes.iter().enumerate() {
        if let (Some(a), Some(pa)) = (index[k], parent.and_then(|q| index[q])) {
            edges.push((pa.min(a), pa.max(a)));
        }
    }
    edges.sort_unstable();
    let touches_boundary = vertices.iter().any(|(_, d)| *d == radius);
    let boundary_certified = !vertices.is_empty() && !touches_boundary;

    let path = as_path(vertices.len(), &edges);
    let shape = match vertices.len() {
        0 => LocusShape::Empty,
        1 => LocusShape::SingleVertex,
        2 => LocusShape::EdgePair,
        _ => match &path {
            Some(pv)
                if !boundary_certified
                    && vertices[pv[0]].1 == radius
                    && vertices[*pv.last().expect("nonempty")].1 == radius =>
            {
                LocusShape::UnboundedPath
            }
            _ => LocusShape::BoundedSet,
        },
    };
    Ok(LocusReport {
        p,
        vertices,
        edges,
        shape,
        radius_searched: radius,
        boundary_certified,
        path,
    })
}

/// Vertex order along the path if the edge set forms a single path.
fn as_path(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    if n == 0 || edges.len() + 1 != n {
        return None;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    if adj.iter().any(|a| a.len() > 2) {
        return None;
    }
    let start = (0..n).find(|&v| adj[v].len() <= 1)?;
    let mut out = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
        out.push(next);
        prev = cur;
        cur = next;
    }
    (out.len() == n).then_some(out)
}

/// True when conjugation by `u` moves every interior vertex of the path
/// one step along it, all in the same direction.
pub fn shift_check(u: &QuatElement, locus: &LocusReport) -> Result<bool> {
    let path = locus
        .path_orders()
        .ok_or_else(|| precondition("locus is not a path"))?;
    if !u.trd().is_integer() || u.nrd() != rat(locus.p as i64) {
        return Err(precondition(format!(
            "shift element must be integral of norm {}",
            locus.p
        )));
    }
    if path.len() < 3 {
        return Err(precondition("path too short to test a shift"));
    }
    let images: Vec<QuatOrder> = path[1..path.len() - 1]
        .iter()
        .map(|d| d.conjugated_by(u))
        .collect::<Result<_>>()?;
    let forward = images
        .iter()
        .enumerate()
        .all(|(k, img)| *img == path[k + 2]);
    let backward = images.iter().enumerate().all(|(k, img)| *img == path[k]);
    Ok(forward || backward)
}

/// An edge of the path inverted by conjugation.
#[derive(Clone, Debug)]
pub struct EdgeReflection {
    /// The edge joins path positions `edge` and `edge + 1`.
    pub edge: usize,
    pub element: QuatElement,
    /// Reduced trace zero, so conjugation is an involution.
    pub pure: bool,
    /// Conjugation maps path position `k` to `2 * edge + 1 - k` wherever
    /// both lie on the searched path.
    pub reverses_path: bool,
}

/// The first path edge, scanning outward from the middle, that some
/// element swaps by conjugation.
pub fn edge_reflection(locus: &LocusReport) -> Result<Option<EdgeReflection>> {
    let path = locus
        .path_orders()
        .ok_or_else(|| precondition("locus is not a path"))?;
    if path.len() < 2 {
        return Ok(None);
    }
    let mid = (path.len() - 2) / 2;
    let mut order: Vec<usize> = (0..path.len() - 1).collect();
    order.sort_by_key(|&k| (k.abs_diff(mid), k));
    for edge in order {
        let Some(x) = inversion_test(&path[edge], &path[edge + 1], locus.p)? else {
            continue;
        };
        let mut reverses_path = true;
        for (k, d) in path.iter().enumerate() {
            let Some(img) = (2 * edge + 1).checked_sub(k).filter(|&m| m < path.len()) else {
                continue;
            };
            if d.conjugated_by(&x)? != path[img] {
                reverses_path = false;
                break;
            }
        }
        let pure = x.trd().is_zero();
        return Ok(Some(EdgeReflection {
            edge,
            element: x,
            pure,
            reverses_path,
        }));
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuperorderCount {
    Finite(u64),
    Infinite,
}

/// Number of maximal orders containing `o`: a product over the primes of
/// the discriminant of local containment-locus sizes.
pub fn count_maximal_superorders(o: &QuatOrder) -> Result<SuperorderCount> {
    if !o.algebra().is_definite() {
        return Err(Error::Indefinite);
    }
    let top = maximalize(o)?;
    let gens = o.basis_elements();
    let mut total = 1u64;
    for q in prime_factors(o.reduced_discriminant()) {
        if o.algebra().is_ramified_at(q) {
            continue;
        }
        let k = conductor_exponent(o, &top, q);
        let locus = containment_locus(&gens, &top, q, k + 1)?;
        if locus.shape == LocusShape::UnboundedPath || !locus.boundary_certified {
            return Ok(SuperorderCount::Infinite);
        }
        total *= locus.len() as u64;
    }
    Ok(SuperorderCount::Finite(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::QuaternionAlgebra;
    use crate::arith::rat_frac;
    use crate::ideal::embed_quadratic;
    use crate::order::{maximal_order, order_from_generators};

    #[test]
    fn cubic_root_locus_is_one_vertex() {
        let alg = QuaternionAlgebra::from_ints(-3, -3).unwrap();
        let o = maximal_order(&alg).unwrap();
        let half = rat_frac(1, 2);
        let omega = alg.element([-half.clone(), rat(0), half, rat(0)]);
        let l = containment_locus(&[omega], &o, 2, 4).unwrap();
        assert_eq!(l.shape, LocusShape::SingleVertex);
        assert!(l.boundary_certified);
    }

    #[test]
    fn superorder_counts() {
        let alg = QuaternionAlgebra::from_ints(-3, -3).unwrap();
        let half = rat_frac(1, 2);
        let eta = alg.element([-half.clone(), half, rat(0), rat(0)]);
        let zeta = order_from_generators(&alg, &[eta, alg.j()]).unwrap();
        assert_eq!(
            count_maximal_superorders(&zeta).unwrap(),
            SuperorderCount::Finite(1)
        );
        let zij = order_from_generators(&alg, &[alg.i(), alg.j()]).unwrap();
        assert_eq!(
            count_maximal_superorders(&zij).unwrap(),
            SuperorderCount::Finite(2)
        );
        let o = maximal_order(&alg).unwrap();
        assert_eq!(
            count_maximal_superorders(&o).unwrap(),
            SuperorderCount::Finite(1)
        );
        let l = containment_locus(&[alg.i(), alg.j()], &o, 2, 4).unwrap();
        assert_eq!(l.shape, LocusShape::EdgePair);
    }

    #[test]
    fn split_quadratic_locus_is_a_path() {
        let alg = QuaternionAlgebra::from_ints(-1, -7).unwrap();
        let o = maximal_order(&alg).unwrap();
        let u = embed_quadratic(&o, 1, 2).unwrap().unwrap();
        let l = containment_locus(std::slice::from_ref(&u), &o, 2, 4).unwrap();
        assert_eq!(l.shape, LocusShape::UnboundedPath);
        assert_eq!(l.len(), 9);
        assert!(!l.boundary_certified);
        assert!(shift_check(&u, &l).unwrap());
        let u2 = &u * &u;
        assert!(shift_check(&u2, &l).is_err() || !shift_check(&u2, &l).unwrap());
        let refl = edge_reflection(&l).unwrap().unwrap();
        assert!(refl.pure && refl.reverses_path);
        let x = &refl.element;
        assert_eq!(&x.conjugate(&u).unwrap() + &u, alg.one());
    }
}
