//! Serializable documents for graphs, loci and bound checks, DOT output,
//! and the command entry points used by the command-line tool.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{algebra_for_ramification, QuatElement, QuaternionAlgebra};
use crate::arith::{is_prime, rat_frac, BigRat};
use crate::bounds::{
    bound_verdicts, check_bipartite_bound, check_endpoint_bound, nailfork_reduce, random_bipartite,
    random_graph, BoundVerdicts,
};
use crate::error::{precondition, Error, Result};
use crate::graph::{
    build_classifying_graph, endpoints_cross_check, mass_check, omega_depth, ClassifyingGraph,
};
use crate::ideal::{contains_all, eichler_order, embed_quadratic};
use crate::locus::{
    containment_locus, count_maximal_superorders, edge_reflection, shift_check, LocusReport,
    SuperorderCount,
};
use crate::order::{maximal_order, maximalize, order_from_generators, QuatOrder};

/// Integer written as a JSON number when it fits in `i64`, else as a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(JsonInt(BigInt::from(v))),
            Raw::Str(s) => s.parse().map(JsonInt).map_err(serde::de::Error::custom),
        }
    }
}

impl From<&BigInt> for JsonInt {
    fn from(v: &BigInt) -> Self {
        JsonInt(v.clone())
    }
}

fn rat_string(x: &BigRat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn element_strings(x: &QuatElement) -> Vec<String> {
    x.coords().iter().map(rat_string).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub a: String,
    pub b: String,
    pub ramified: Vec<u64>,
    pub infinite: bool,
    pub definite: bool,
}

impl AlgebraDoc {
    pub fn of(alg: &QuaternionAlgebra) -> Self {
        let places = alg.ramified_places();
        AlgebraDoc {
            a: rat_string(alg.a()),
            b: rat_string(alg.b()),
            ramified: places.primes.clone(),
            infinite: places.infinite,
            definite: alg.is_definite(),
        }
    }
}

/// An order as its common denominator and the 16 entries of its
/// Hermite-normal-form basis (rows are coordinates in 1, i, j, k).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderDoc {
    pub denom: JsonInt,
    pub basis: Vec<JsonInt>,
}

impl OrderDoc {
    pub fn of(o: &QuatOrder) -> Self {
        let l = o.lattice();
        OrderDoc {
            denom: l.denom().into(),
            basis: l.basis().entries().iter().map(JsonInt::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: usize,
    pub basis: OrderDoc,
    pub unit_order: usize,
    pub normalizer_norms: Vec<u64>,
    pub valency: usize,
    pub endpoint: bool,
    pub omega: bool,
    pub part: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub u: usize,
    pub v: usize,
    pub mult: usize,
    pub inverted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub algebra: AlgebraDoc,
    pub p: u64,
    pub level: u64,
    pub root: usize,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    pub bipartite: bool,
    pub n: usize,
    pub r: usize,
    pub virtual_endpoints: usize,
    pub verdicts: BoundVerdicts,
}

impl GraphDoc {
    pub fn of(g: &ClassifyingGraph) -> Self {
        GraphDoc {
            algebra: AlgebraDoc::of(&g.algebra),
            p: g.p,
            level: g.level,
            root: g.root,
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexDoc {
                    id: v.id,
                    basis: OrderDoc::of(&v.representative),
                    unit_order: v.unit_order,
                    normalizer_norms: v.normalizer_norms.clone(),
                    valency: v.valency,
                    endpoint: v.is_endpoint,
                    omega: v.omega_embeds,
                    part: v.part,
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    u: e.u,
                    v: e.v,
                    mult: e.multiplicity,
                    inverted: e.inverted,
                })
                .collect(),
            bipartite: g.bipartite,
            n: g.n,
            r: g.r,
            virtual_endpoints: g.virtual_endpoints(),
            verdicts: bound_verdicts(g),
        }
    }

    /// Graphviz drawing: real vertices as filled circles, one starred
    /// virtual node per inverted edge.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("graph classifying {\n");
        out.push_str("  node [shape=circle, style=filled, fixedsize=true, width=0.3];\n");
        for v in &self.vertices {
            let color = if v.endpoint { "black" } else { "gray60" };
            let _ = writeln!(
                out,
                "  v{} [label=\"\", xlabel=\"{}\", fillcolor={}];",
                v.id, v.id, color
            );
        }
        let mut star = 0;
        for e in &self.edges {
            for _ in 0..e.mult {
                if e.inverted {
                    let _ = writeln!(out, "  s{star} [shape=plaintext, style=\"\", label=\"*\"];");
                    let _ = writeln!(out, "  v{} -- s{star};", e.u);
                    star += 1;
                } else {
                    let _ = writeln!(out, "  v{} -- v{};", e.u, e.v);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusVertexDoc {
    pub depth: u32,
    pub basis: OrderDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionDoc {
    pub edge: usize,
    pub element: Vec<String>,
    pub pure: bool,
    pub reverses_path: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusDoc {
    pub algebra: AlgebraDoc,
    pub p: u64,
    pub generators: Vec<Vec<String>>,
    pub shape: String,
    pub size: usize,
    pub radius_searched: u32,
    pub boundary_certified: bool,
    pub vertices: Vec<LocusVertexDoc>,
    pub edges: Vec<(usize, usize)>,
    pub path: Option<Vec<usize>>,
    /// Conjugation by the single generator shifts the path.
    pub shift: Option<bool>,
    pub reflection: Option<ReflectionDoc>,
    /// Number of maximal orders containing the generated order, when the
    /// generators span an order.
    pub maximal_superorders: Option<SuperorderDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuperorderDoc {
    Finite(u64),
    Infinite,
}

impl LocusDoc {
    fn of(locus: &LocusReport, alg: &QuaternionAlgebra, gens: &[QuatElement]) -> Result<Self> {
        let shift = match (gens, locus.path.as_ref()) {
            ([u], Some(path))
                if path.len() >= 3 && u.nrd() == crate::arith::rat(locus.p as i64) =>
            {
                Some(shift_check(u, locus)?)
            }
            _ => None,
        };
        let reflection = match &locus.path {
            Some(path) if path.len() >= 2 => edge_reflection(locus)?.map(|r| ReflectionDoc {
                edge: r.edge,
                element: element_strings(&r.element),
                pure: r.pure,
                reverses_path: r.reverses_path,
            }),
            _ => None,
        };
        let maximal_superorders = match order_from_generators(alg, gens) {
            Ok(o) => Some(match count_maximal_superorders(&o)? {
                SuperorderCount::Finite(c) => SuperorderDoc::Finite(c),
                SuperorderCount::Infinite => SuperorderDoc::Infinite,
            }),
            Err(_) => None,
        };
        Ok(LocusDoc {
            algebra: AlgebraDoc::of(alg),
            p: locus.p,
            generators: gens.iter().map(element_strings).collect(),
            shape: locus.shape.as_str().to_string(),
            size: locus.len(),
            radius_searched: locus.radius_searched,
            boundary_certified: locus.boundary_certified,
            vertices: locus
                .vertices
                .iter()
                .map(|(o, d)| LocusVertexDoc {
                    depth: *d,
                    basis: OrderDoc::of(o),
                })
                .collect(),
            edges: locus.edges.clone(),
            path: locus.path.clone(),
            shift,
            reflection,
            maximal_superorders,
        })
    }
}

/// How the algebra is chosen on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraSpec {
    Pair(i64, i64),
    RamifiedPrime(u64),
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<QuaternionAlgebra> {
        match *self {
            AlgebraSpec::Pair(a, b) => QuaternionAlgebra::from_ints(a, b),
            AlgebraSpec::RamifiedPrime(q) => algebra_for_ramification(q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub algebra: AlgebraSpec,
    pub prime: u64,
    pub level: u64,
    pub radius: u32,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algebra: AlgebraSpec::RamifiedPrime(3),
            prime: 2,
            level: 1,
            radius: 6,
            seed: 0,
        }
    }
}

const MAX_RADIUS: u32 = 12;

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.prime) {
            return Err(precondition(format!("{} is not prime", self.prime)));
        }
        if self.level == 0 {
            return Err(precondition("level must be positive"));
        }
        if self.radius > MAX_RADIUS {
            return Err(precondition(format!(
                "radius {} exceeds {MAX_RADIUS}",
                self.radius
            )));
        }
        if let AlgebraSpec::RamifiedPrime(q) = self.algebra {
            if !is_prime(q) {
                return Err(precondition(format!("{q} is not prime")));
            }
        }
        Ok(())
    }

    /// Maximal order of the configured algebra, refined to an Eichler
    /// order when a level is given.
    pub fn base_order(&self) -> Result<QuatOrder> {
        let alg = self.algebra.build()?;
        if !alg.is_definite() {
            return Err(Error::Indefinite);
        }
        let o = maximal_order(&alg)?;
        if self.level == 1 {
            Ok(o)
        } else {
            eichler_order(&o, self.level)
        }
    }
}

/// `{a, b, ramified, infinite, definite}`.
pub fn cmd_ramify(a: i64, b: i64) -> Result<AlgebraDoc> {
    Ok(AlgebraDoc::of(&QuaternionAlgebra::from_ints(a, b)?))
}

pub fn cmd_graph(config: &RunConfig) -> Result<(GraphDoc, String)> {
    config.validate()?;
    let g = build_classifying_graph(&config.base_order()?, config.prime)?;
    let doc = GraphDoc::of(&g);
    let dot = doc.to_dot();
    Ok((doc, dot))
}

/// What to look for in the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocusTarget {
    /// A root of `x^2 - t x + n`.
    Polynomial { trace: i64, norm: i64 },
    /// Explicit elements, coordinates in 1, i, j, k as `(num, den)` pairs.
    Generators(Vec<[(i64, i64); 4]>),
}

pub fn cmd_locus(config: &RunConfig, target: &LocusTarget) -> Result<LocusDoc> {
    config.validate()?;
    let alg = config.algebra.build()?;
    if !alg.is_definite() {
        return Err(Error::Indefinite);
    }
    let base = maximal_order(&alg)?;
    let (gens, root) = match target {
        LocusTarget::Polynomial { trace, norm } => {
            let x = embed_quadratic(&base, *trace, *norm)?.ok_or_else(|| {
                precondition(format!(
                    "x^2 - {trace}x + {norm} has no root in the base maximal order"
                ))
            })?;
            (vec![x], base)
        }
        LocusTarget::Generators(list) => {
            if list.is_empty() {
                return Err(precondition("no generators given"));
            }
            let gens: Vec<QuatElement> = list
                .iter()
                .map(|c| {
                    if c.iter().any(|&(_, d)| d == 0) {
                        return Err(precondition("zero denominator"));
                    }
                    Ok(alg.element(c.map(|(n, d)| rat_frac(n, d))))
                })
                .collect::<Result<_>>()?;
            let root = if contains_all(&base, &gens) {
                base
            } else {
                match order_from_generators(&alg, &gens) {
                    Ok(o) => maximalize(&o)?,
                    Err(_) => base,
                }
            };
            (gens, root)
        }
    };
    let locus = containment_locus(&gens, &root, config.prime, config.radius)?;
    LocusDoc::of(&locus, &alg, &gens)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundProp {
    #[serde(rename = "general")]
    General,
    #[serde(rename = "bipartite")]
    Bipartite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityCase {
    pub sample: usize,
    pub n: usize,
    pub r: usize,
    pub t: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropsDoc {
    pub prop: BoundProp,
    pub samples: usize,
    pub seed: u64,
    pub violations: usize,
    pub characterization_failures: usize,
    pub proof_step_failures: usize,
    /// Reductions that failed to reach the extremal shape, changed `t`, or
    /// lowered `r` (bipartite suite only).
    pub reduction_failures: usize,
    pub equality_cases: Vec<EqualityCase>,
}

/// Random sample `k` of the general or bipartite suite.
pub fn sample_graph(prop: BoundProp, seed: u64, k: usize) -> Result<crate::bounds::MultiGraph> {
    let s = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(k as u64);
    match prop {
        BoundProp::General => random_graph(1 + (s % 40) as usize, 3, s),
        BoundProp::Bipartite => {
            let n_b = 1 + (s % 20) as usize;
            // A tree with all edges between the parts needs
            // n_a + n_b - 1 <= 3 * min(n_a, n_b).
            let lo = n_b.saturating_sub(1).div_ceil(2).max(1);
            let hi = (2 * n_b + 1).min(20).max(lo);
            let n_a = lo + (s / 20) as usize % (hi - lo + 1);
            random_bipartite(n_a, n_b, s)
        }
    }
}

pub fn cmd_props(prop: BoundProp, samples: usize, seed: u64) -> Result<PropsDoc> {
    let mut doc = PropsDoc {
        prop,
        samples,
        seed,
        violations: 0,
        characterization_failures: 0,
        proof_step_failures: 0,
        reduction_failures: 0,
        equality_cases: Vec::new(),
    };
    for k in 0..samples {
        let g = sample_graph(prop, seed, k)?;
        let r = match prop {
            BoundProp::General => check_endpoint_bound(&g)?,
            BoundProp::Bipartite => check_bipartite_bound(&g)?,
        };
        doc.violations += usize::from(!r.bound_holds);
        doc.characterization_failures += usize::from(!r.equality_characterization_holds);
        doc.proof_step_failures += usize::from(!r.proof_steps_hold);
        if r.equality {
            doc.equality_cases.push(EqualityCase {
                sample: k,
                n: r.n,
                r: r.r,
                t: r.t,
            });
        }
        if prop == BoundProp::Bipartite && g.edge_count() > 0 {
            let after = check_bipartite_bound(&nailfork_reduce(&g)?)?;
            let ok = after.characterization && after.equality && after.t == r.t && after.r >= r.r;
            doc.reduction_failures += usize::from(!ok);
        }
    }
    Ok(doc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MassDoc {
    pub computed: String,
    pub expected: String,
    pub unit_orders: Vec<usize>,
    pub ideal_class_counts: Vec<usize>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaDepthDoc {
    pub rho: usize,
    pub distances: Vec<usize>,
    pub polynomial: (i64, i64),
    pub all_embed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLocusDoc {
    pub vertex: usize,
    pub shape: String,
    pub size: usize,
    pub boundary_certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub ramified_prime: u64,
    pub graph: GraphDoc,
    pub endpoint_violations: Vec<usize>,
    pub mass: MassDoc,
    pub omega_depth: Option<OmegaDepthDoc>,
    /// Locus at 2 of the cubic root of unity found in each class that has one.
    pub omega_loci: Vec<ClassLocusDoc>,
}

/// Radius used for the per-class cubic-root loci in reports.
pub const REPORT_LOCUS_RADIUS: u32 = 3;

/// The full pipeline for the maximal orders of the definite algebra
/// ramified at `{q, inf}`, at the prime 2.
pub fn cmd_report(q: u64) -> Result<(ReportDoc, String)> {
    if q == 2 || !is_prime(q) {
        return Err(precondition(format!("{q} must be an odd prime")));
    }
    let alg = algebra_for_ramification(q)?;
    let g = build_classifying_graph(&maximal_order(&alg)?, 2)?;
    let graph = GraphDoc::of(&g);
    let endpoint_violations = endpoints_cross_check(&g)?
        .into_iter()
        .map(|v| v.vertex)
        .collect();
    let m = mass_check(&g)?;
    let mass = MassDoc {
        computed: rat_string(&m.computed),
        expected: rat_string(&m.expected),
        unit_orders: m.unit_orders,
        ideal_class_counts: m.ideal_class_counts,
        ok: m.ok,
    };
    let omega_depth = if g.vertices.iter().any(|v| v.is_endpoint) {
        let d = omega_depth(&g)?;
        Some(OmegaDepthDoc {
            rho: d.rho,
            distances: d.distances,
            polynomial: d.polynomial,
            all_embed: d.all_embed,
        })
    } else {
        None
    };
    let mut omega_loci = Vec::new();
    for v in &g.vertices {
        if let Some(w) = &v.omega_witness {
            let l = containment_locus(
                std::slice::from_ref(w),
                &v.representative,
                2,
                REPORT_LOCUS_RADIUS,
            )?;
            omega_loci.push(ClassLocusDoc {
                vertex: v.id,
                shape: l.shape.as_str().to_string(),
                size: l.len(),
                boundary_certified: l.boundary_certified,
            });
        }
    }
    let dot = graph.to_dot();
    Ok((
        ReportDoc {
            ramified_prime: q,
            graph,
            endpoint_violations,
            mass,
            omega_depth,
            omega_loci,
        },
        dot,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_ints_switch_to_strings() {
        let small = serde_json::to_string(&JsonInt(BigInt::from(-7))).unwrap();
        assert_eq!(small, "-7");
        let big = JsonInt(BigInt::from(i64::MAX) * 4);
        let s = serde_json::to_string(&big).unwrap();
        assert!(s.starts_with('"'));
        assert_eq!(serde_json::from_str::<JsonInt>(&s).unwrap(), big);
        assert_eq!(
            serde_json::from_str::<JsonInt>("12").unwrap(),
            JsonInt(BigInt::from(12))
        );
    }

    #[test]
    fn ramify_docs() {
        let d = cmd_ramify(-3, -3).unwrap();
        assert_eq!(
            (d.ramified.clone(), d.infinite, d.definite),
            (vec![3], true, true)
        );
        let d = cmd_ramify(1, 1).unwrap();
        assert_eq!((d.ramified.clone(), d.infinite), (vec![], false));
        let d = cmd_ramify(-1, -1).unwrap();
        assert_eq!((d.ramified.clone(), d.infinite), (vec![2], true));
    }

    #[test]
    fn graph_doc_round_trip_and_stable_dot() {
        let config = RunConfig {
            algebra: AlgebraSpec::RamifiedPrime(13),
            ..RunConfig::default()
        };
        let (doc, dot) = cmd_graph(&config).unwrap();
        assert_eq!((doc.n, doc.virtual_endpoints), (1, 2));
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(serde_json::from_str::<GraphDoc>(&text).unwrap(), doc);
        assert_eq!(cmd_graph(&config).unwrap().1, dot);
        assert_eq!(dot.matches("label=\"*\"").count(), 2);
    }

    #[test]
    fn report_rejects_two() {
        assert!(matches!(cmd_report(2), Err(Error::Precondition(_))));
    }

    #[test]
    fn props_are_seed_stable() {
        let a = cmd_props(BoundProp::General, 200, 3).unwrap();
        assert_eq!(a, cmd_props(BoundProp::General, 200, 3).unwrap());
        assert_eq!((a.violations, a.characterization_failures), (0, 0));
        let b = cmd_props(BoundProp::Bipartite, 200, 3).unwrap();
        assert_eq!(
            (
                b.violations,
                b.characterization_failures,
                b.reduction_failures
            ),
            (0, 0, 0)
        );
    }
}
