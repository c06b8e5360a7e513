//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line; exits nonzero on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use quatgraph_core::arith::{is_prime, kronecker, rat, rat_frac, BigRat};
use quatgraph_core::bounds::{check_bipartite_bound, random_bipartite};
use quatgraph_core::graph::{endpoints_cross_check, mass_check, omega_depth};
use quatgraph_core::locus::edge_reflection;
use quatgraph_core::report::{cmd_props, BoundProp};
use quatgraph_core::{
    algebra_for_ramification, bound_verdicts, build_classifying_graph, containment_locus,
    count_maximal_superorders, eichler_order, embed_quadratic, locus::SuperorderCount,
    maximal_order, maximal_order_graph, order_from_generators, shift_check, ClassifyingGraph,
    LocusShape, QuaternionAlgebra, Selectivity,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn odd_primes_below(n: u64) -> Vec<u64> {
    (3..n).filter(|&q| is_prime(q)).collect()
}

/// Graphs shared between criteria.
struct Computed {
    maximal: Vec<(u64, ClassifyingGraph, Duration)>,
    eichler: Vec<(u64, u64, ClassifyingGraph)>,
}

fn compute() -> Result<Computed, String> {
    let mut maximal = Vec::new();
    for q in odd_primes_below(100) {
        let t = Instant::now();
        let g = maximal_order_graph(q).map_err(|e| format!("q={q}: {e}"))?;
        maximal.push((q, g, t.elapsed()));
    }
    let mut eichler = Vec::new();
    for q in [3u64, 5, 7] {
        let alg = algebra_for_ramification(q).map_err(|e| e.to_string())?;
        let o = maximal_order(&alg).map_err(|e| e.to_string())?;
        for level in [3u64, 5, 7, 11, 13, 15] {
            if level % q == 0 {
                continue;
            }
            let e = eichler_order(&o, level).map_err(|e| format!("q={q} N={level}: {e}"))?;
            let g = build_classifying_graph(&e, 2).map_err(|e| format!("q={q} N={level}: {e}"))?;
            eichler.push((q, level, g));
        }
    }
    Ok(Computed { maximal, eichler })
}

fn graph_for(c: &Computed, q: u64) -> &(u64, ClassifyingGraph, Duration) {
    c.maximal
        .iter()
        .find(|(p, _, _)| *p == q)
        .expect("computed")
}

fn small_graphs(c: &Computed) -> Outcome {
    for (q, stars) in [(3, 1), (5, 1), (7, 2), (13, 2)] {
        let (_, g, t) = graph_for(c, q);
        ensure(g.vertices.len() == 1, || {
            format!("q={q}: {} real vertices", g.vertices.len())
        })?;
        ensure(g.virtual_endpoints() == stars, || {
            format!("q={q}: {} virtual endpoints", g.virtual_endpoints())
        })?;
        ensure(*t < Duration::from_secs(10), || {
            format!("q={q}: took {t:?}")
        })?;
    }
    let worst = [3, 5, 7, 13]
        .iter()
        .map(|&q| graph_for(c, q).2)
        .max()
        .unwrap();
    Ok(format!(
        "vertices/virtual endpoints 1/1, 1/1, 1/2, 1/2; slowest {worst:.2?}"
    ))
}

fn type_numbers(c: &Computed) -> Outcome {
    for q in [3, 5, 7, 13] {
        let (_, g, _) = graph_for(c, q);
        let m = mass_check(g).map_err(|e| e.to_string())?;
        let classes: usize = m.ideal_class_counts.iter().sum();
        ensure(g.n == 1 && classes == 1, || {
            format!("q={q}: n={}, ideal classes {classes}", g.n)
        })?;
    }
    Ok("one class of maximal orders and one ideal class for q = 3, 5, 7, 13".into())
}

fn superorder_counts() -> Outcome {
    let t = Instant::now();
    let alg = QuaternionAlgebra::from_ints(-3, -3).map_err(|e| e.to_string())?;
    let half = rat_frac(1, 2);
    let eta = alg.element([-half.clone(), half, rat(0), rat(0)]);
    let count = |gens: &[_]| -> Result<SuperorderCount, String> {
        let o = order_from_generators(&alg, gens).map_err(|e| e.to_string())?;
        count_maximal_superorders(&o).map_err(|e| e.to_string())
    };
    let a = count(&[eta, alg.j()])?;
    let b = count(&[alg.i(), alg.j()])?;
    ensure(a == SuperorderCount::Finite(1), || {
        format!("Z[eta,j]: {a:?}")
    })?;
    ensure(b == SuperorderCount::Finite(2), || format!("Z[i,j]: {b:?}"))?;
    let g = build_classifying_graph(&maximal_order(&alg).map_err(|e| e.to_string())?, 2)
        .map_err(|e| e.to_string())?;
    ensure(g.n == 1, || {
        format!("{} conjugacy classes of maximal orders", g.n)
    })?;
    let t = t.elapsed();
    ensure(t < Duration::from_secs(5), || format!("took {t:?}"))?;
    Ok(format!(
        "Z[eta,j] in 1, Z[i,j] in 2, one conjugacy class; {t:.2?}"
    ))
}

fn endpoint_equivalence(c: &Computed, total: Duration) -> Outcome {
    let mut classes = 0;
    for (q, g, _) in &c.maximal {
        let bad = endpoints_cross_check(g).map_err(|e| e.to_string())?;
        ensure(bad.is_empty(), || format!("q={q}: {bad:?}"))?;
        classes += g.vertices.len();
    }
    for (q, level, g) in &c.eichler {
        let bad = endpoints_cross_check(g).map_err(|e| e.to_string())?;
        ensure(bad.is_empty(), || format!("q={q} N={level}: {bad:?}"))?;
        classes += g.vertices.len();
    }
    ensure(total < Duration::from_secs(600), || {
        format!("took {total:?}")
    })?;
    Ok(format!(
        "{} maximal and {} Eichler genera, {classes} classes, 0 violations; {total:.1?}",
        c.maximal.len(),
        c.eichler.len()
    ))
}

fn half_bound(c: &Computed) -> Outcome {
    let graphs = c
        .maximal
        .iter()
        .map(|(q, g, _)| (*q, 1, g))
        .chain(c.eichler.iter().map(|(q, n, g)| (*q, *n, g)));
    let mut count = 0;
    for (q, level, g) in graphs {
        let v = bound_verdicts(g);
        ensure(v.half_bound_holds, || {
            format!("q={q} N={level}: r={} n={}", v.r, v.n)
        })?;
        count += 1;
    }
    Ok(format!("r <= n/2 + 1 on all {count} graphs"))
}

/// Eichler's class number formula for the maximal orders of the algebra
/// ramified at `{q, inf}`.
fn class_number_formula(q: u64) -> BigRat {
    let q = q as i64;
    let mut h = rat_frac(q - 1, 12);
    h += rat_frac(1 - kronecker(-4, q) as i64, 4);
    h += rat_frac(1 - kronecker(-3, q) as i64, 3);
    h
}

fn mass(c: &Computed) -> Outcome {
    for (q, g, _) in &c.maximal {
        let m = mass_check(g).map_err(|e| e.to_string())?;
        let expected = rat_frac(*q as i64 - 1, 12);
        ensure(m.expected == expected, || {
            format!("q={q}: formula gives {}", m.expected)
        })?;
        ensure(m.computed == expected, || {
            format!("q={q}: sum {} != {expected}", m.computed)
        })?;
        let classes: usize = m.ideal_class_counts.iter().sum();
        let h = class_number_formula(*q);
        ensure(BigRat::from_integer(BigInt::from(classes)) == h, || {
            format!("q={q}: {classes} ideal classes, formula {h}")
        })?;
    }
    Ok(format!(
        "mass (q-1)/12 and class number exact for {} primes",
        c.maximal.len()
    ))
}

fn bound_suites() -> Outcome {
    let t = Instant::now();
    let general = cmd_props(BoundProp::General, 10_000, 2024).map_err(|e| e.to_string())?;
    ensure(general.violations == 0, || {
        format!("{} general violations", general.violations)
    })?;
    ensure(general.characterization_failures == 0, || {
        "general equality characterization fails".into()
    })?;
    ensure(general.proof_step_failures == 0, || {
        "general proof inequalities fail".into()
    })?;
    let bip = cmd_props(BoundProp::Bipartite, 10_000, 2024).map_err(|e| e.to_string())?;
    ensure(bip.violations == 0, || {
        format!("{} bipartite violations", bip.violations)
    })?;
    ensure(bip.characterization_failures == 0, || {
        "bipartite equality characterization fails".into()
    })?;
    ensure(bip.proof_step_failures == 0, || {
        "bipartite identities fail".into()
    })?;
    ensure(bip.reduction_failures == 0, || {
        format!("{} reductions fail", bip.reduction_failures)
    })?;
    let t = t.elapsed();
    ensure(t < Duration::from_secs(120), || format!("took {t:?}"))?;
    Ok(format!(
        "10000 + 10000 samples, 0 violations, {} + {} equality cases, 10000 reductions clean; {t:.1?}",
        general.equality_cases.len(),
        bip.equality_cases.len()
    ))
}

fn split_path() -> Outcome {
    let t = Instant::now();
    let alg = algebra_for_ramification(7).map_err(|e| e.to_string())?;
    let o = maximal_order(&alg).map_err(|e| e.to_string())?;
    let u = embed_quadratic(&o, 1, 2)
        .map_err(|e| e.to_string())?
        .ok_or("no root of x^2 - x + 2")?;
    let l = containment_locus(std::slice::from_ref(&u), &o, 2, 4).map_err(|e| e.to_string())?;
    ensure(
        l.shape == LocusShape::UnboundedPath && l.len() == 9 && !l.boundary_certified,
        || {
            format!(
                "{:?} with {} vertices, certified {}",
                l.shape,
                l.len(),
                l.boundary_certified
            )
        },
    )?;
    ensure(shift_check(&u, &l).map_err(|e| e.to_string())?, || {
        "u does not shift the path".into()
    })?;
    let r = edge_reflection(&l)
        .map_err(|e| e.to_string())?
        .ok_or("no path edge is inverted")?;
    let x = &r.element;
    let square = x * x;
    ensure(
        r.pure && square.is_scalar() && square.coords()[0] < rat(0),
        || format!("{x} is not pure"),
    )?;
    ensure(r.reverses_path, || {
        "the inversion does not reverse the path".into()
    })?;
    // Conjugation by x fixes Z[u] and swaps u with its conjugate.
    let image = x.conjugate(&u).map_err(|e| e.to_string())?;
    ensure(image == u.conj(), || {
        "conjugation does not send u to its conjugate".into()
    })?;
    let t = t.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!(
        "9-vertex path, uncertified, shift ok, pure involution {x} inverts edge {}; {t:.2?}",
        r.edge
    ))
}

fn omega_depth_all(c: &Computed) -> Outcome {
    let mut checked = 0;
    let mut deepest = 0;
    for (q, g, _) in &c.maximal {
        if !g.vertices.iter().any(|v| v.is_endpoint) {
            continue;
        }
        let d = omega_depth(g).map_err(|e| e.to_string())?;
        ensure(d.all_embed, || {
            format!(
                "q={q}: rho={} polynomial {:?} misses a class",
                d.rho, d.polynomial
            )
        })?;
        checked += 1;
        deepest = deepest.max(d.rho);
    }
    Ok(format!(
        "{checked} graphs with endpoints, max depth {deepest}, all classes embed"
    ))
}

fn selectivity(c: &Computed) -> Outcome {
    let mut witnesses = Vec::new();
    for (q, g, _) in &c.maximal {
        let v = bound_verdicts(g);
        if v.n >= 3 && v.selectivity == Selectivity::NotSelective {
            return Err(format!(
                "q={q}: n={} with the cubic roots in every class",
                v.n
            ));
        }
        if v.n >= 3 && v.selectivity == Selectivity::Selective {
            witnesses.push(*q);
        }
    }
    ensure(!witnesses.is_empty(), || "no selective genus found".into())?;
    Ok(format!(
        "selective for q in {witnesses:?}; no non-selective genus with n >= 3"
    ))
}

fn general_settings(c: &Computed) -> Outcome {
    for k in 0..1000u64 {
        let n_b = 1 + (k % 15) as usize;
        let g = random_bipartite(n_b.div_ceil(2).max(1), n_b, k).map_err(|e| e.to_string())?;
        let r = check_bipartite_bound(&g).map_err(|e| e.to_string())?;
        ensure(r.bound_holds && r.equality_characterization_holds, || {
            format!("sample {k}: {r:?}")
        })?;
    }
    for (q, g, _) in &c.maximal {
        let v = bound_verdicts(g);
        ensure(v.bound_holds, || format!("q={q}: {v:?}"))?;
    }
    for (q, level, g) in &c.eichler {
        let v = bound_verdicts(g);
        ensure(v.bound_holds, || format!("q={q} N={level}: {v:?}"))?;
    }
    Ok("all computations desk-scale; part bounds and two-vertex check hold on constructed and computed graphs".into())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let computed = compute();
    let compute_time = start.elapsed();
    let with = |f: &dyn Fn(&Computed) -> Outcome| -> Outcome {
        match &computed {
            Ok(c) => f(c),
            Err(e) => Err(format!("graph computation failed: {e}")),
        }
    };
    let results: Vec<(u32, Outcome)> = vec![
        (1, with(&small_graphs)),
        (2, with(&type_numbers)),
        (3, superorder_counts()),
        (4, with(&|c| endpoint_equivalence(c, compute_time))),
        (5, with(&half_bound)),
        (6, with(&mass)),
        (7, bound_suites()),
        (8, split_path()),
        (9, with(&omega_depth_all)),
        (10, with(&selectivity)),
        (11, with(&general_settings)),
    ];
    let mut failed = 0;
    for (k, r) in &results {
        match r {
            Ok(msg) => println!("criterion {k:>2}: PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {k:>2}: FAIL  {msg}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1?}",
        results.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
