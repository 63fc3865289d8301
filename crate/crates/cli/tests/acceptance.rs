//! Acceptance suite. Runs without the libtest harness so that the one-line
//! verdict of every criterion is always printed.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gapclique_core::cnf::{
    parse_dimacs, random_normalized_cnf, sat_bruteforce, tovey_normalize, CnfFormula,
};
use gapclique_core::expander::{
    soundness_bound, walk_bound, walk_hitting_fraction, ProductGraph, RegularGraph, WalkMode,
};
use gapclique_core::ff::{poly_eval, FieldVec, PrimeField};
use gapclique_core::grouped::{
    materialize, witness_from_text, witness_to_text, BipartiteGroupedGraph, GroupedGraph,
    MaterializedGraph, Side,
};
use gapclique_core::ldt::{
    distance_to_degree, ldt_coefficients, line_test, reject_rate, Distance, LdtParams, RateMode,
    RejectRate, TabulatedFunction, VecPoly,
};
use gapclique_core::oracles::{
    densest_grouped_subgraph, max_clique_materialized, max_grouped_biclique, max_grouped_clique,
};
use gapclique_core::pihchain::{
    decode_biclique, densest_no_bound, densest_yes_count, kst_bound, kst_holds_a2, make_disperser,
    make_disperser_clamped, max_c4_free_edges, planted_edges, verify_disperser, CliqueBiclique,
    CompressedBiclique, DensestGraph, Disperser, DisperserMode,
};
use gapclique_core::rmcsp::{certify_soundness, witness_clique, GroupInfo, RmCsp, TestFamily};
use gapclique_core::vectorsum::{
    check_gadget_properties, reduce_sat_to_vectorsum, solve_vectorsum_bruteforce, VectorSumInstance,
};
use gapclique_core::Fraction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const F5: PrimeField = PrimeField::F5;

type Verdict = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Verdict); 11] = [
        (
            "LDT completeness",
            Duration::from_secs(60),
            ldt_completeness,
        ),
        (
            "interpolation identity",
            Duration::MAX,
            interpolation_identity,
        ),
        ("LDT soundness", Duration::MAX, ldt_soundness),
        (
            "reduction oracle agreement",
            Duration::from_secs(300),
            reduction_agreement,
        ),
        ("RM completeness", Duration::MAX, rm_completeness),
        ("RM soundness", Duration::MAX, rm_soundness),
        (
            "expander walk bound",
            Duration::from_secs(120),
            walk_bound_exhaustive,
        ),
        ("graph product", Duration::from_secs(300), graph_product),
        ("disperser", Duration::MAX, disperser_seeds),
        ("biclique chain", Duration::from_secs(600), biclique_chain),
        ("determinism and round trips", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut verdict = run();
        let elapsed = start.elapsed();
        if verdict.is_ok() && elapsed > *limit {
            verdict = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
        }
        match verdict {
            Ok(detail) => println!(
                "criterion {:>2} {name}: PASS ({detail}) [{elapsed:.2?}]",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} {name}: FAIL ({detail}) [{elapsed:.2?}]",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ldt_completeness() -> Verdict {
    let mut checked = 0u64;
    for m in 1..=2 {
        for d in 0..=2 {
            let params = LdtParams::new(F5, d).map_err(|e| e.to_string())?;
            let count = VecPoly::count(F5, m, 1, d).ok_or("family too large")?;
            for idx in 0..count {
                let f = VecPoly::from_index(F5, m, 1, d, idx).tabulate();
                let rate = reject_rate(&f, &params, RateMode::Exhaustive { budget: 1 << 20 })
                    .map_err(|e| e.to_string())?;
                check(rate == RejectRate::Exact(Fraction::new(0, 1)), || {
                    format!("m={m} d={d} ell=1 index {idx} rejected")
                })?;
                checked += 1;
            }
            // ell = 2 directly where the family is small.
            let count2 = VecPoly::count(F5, m, 2, d).ok_or("family too large")?;
            check(count2 == count * count, || {
                "ell=2 family is not the square of ell=1".into()
            })?;
            if m == 1 {
                for idx in 0..count2 {
                    let f = VecPoly::from_index(F5, m, 2, d, idx).tabulate();
                    let rate = reject_rate(&f, &params, RateMode::Exhaustive { budget: 1 << 20 })
                        .map_err(|e| e.to_string())?;
                    check(rate == RejectRate::Exact(Fraction::new(0, 1)), || {
                        format!("m=1 d={d} ell=2 index {idx} rejected")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    // For ell = 2 with m = 2 the test is componentwise: a vector map is
    // rejected on (x, h) exactly when one of its coordinates is. Check that
    // identity on every (x, h) for sampled maps; the exhaustive ell = 1 pass
    // above then covers every ell = 2 map.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = LdtParams::new(F5, 2).map_err(|e| e.to_string())?;
    for _ in 0..200 {
        let table: Vec<u32> = (0..25 * 2).map(|_| rng.gen_range(0..5)).collect();
        let f = TabulatedFunction::new(F5, 2, 2, table).map_err(|e| e.to_string())?;
        let parts: Vec<TabulatedFunction> = (0..2)
            .map(|c| TabulatedFunction::from_fn(F5, 2, 1, |x| vec![f.at(x)[c]]).unwrap())
            .collect();
        for x in 0..25u32 {
            for h in 0..25u32 {
                let (x, h) = ([x % 5, x / 5], [h % 5, h / 5]);
                let whole = line_test(&f, &x, &h, &params);
                let split = parts.iter().all(|g| line_test(g, &x, &h, &params));
                check(whole == split, || {
                    "componentwise decomposition fails".into()
                })?;
            }
        }
    }
    Ok(format!(
        "{checked} polynomials, zero rejections; ell=2, m=2 via componentwise identity"
    ))
}

fn interpolation_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..1000 {
        let f = PrimeField::new(if trial % 2 == 0 { 5 } else { 7 }).map_err(|e| e.to_string())?;
        let d = rng.gen_range(0..=2u32);
        let coeffs: Vec<FieldVec> = (0..=d)
            .map(|_| FieldVec::new(f, [rng.gen_range(0..f.modulus())]))
            .collect();
        let alphas = ldt_coefficients(d, f).map_err(|e| e.to_string())?;
        for e in f.elements() {
            let mut acc = FieldVec::zeros(f, 1);
            for (i, &a) in alphas.iter().enumerate() {
                acc.add_scaled(
                    a,
                    &poly_eval(&coeffs, f.add(e, i as u32)).map_err(|e| e.to_string())?,
                );
            }
            check(acc.is_zero(), || {
                format!("trial {trial}: nonzero sum at e={e}")
            })?;
        }
    }
    Ok("1000 polynomials, every shift sums to zero".into())
}

fn ldt_soundness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = LdtParams::new(F5, 1).map_err(|e| e.to_string())?;
    let mut min_margin = None::<Fraction>;
    for i in 0..50 {
        let table: Vec<u32> = if i < 25 {
            // Corrupt a line in 1 + i % 3 points.
            let (a, b) = (rng.gen_range(0..5u32), rng.gen_range(0..5u32));
            let mut t: Vec<u32> = (0..5).map(|x| (a + b * x) % 5).collect();
            for _ in 0..=(i % 3) {
                let x = rng.gen_range(0..5);
                t[x] = rng.gen_range(0..5);
            }
            t
        } else {
            (0..5).map(|_| rng.gen_range(0..5)).collect()
        };
        let f = TabulatedFunction::new(F5, 1, 1, table).map_err(|e| e.to_string())?;
        let delta = match distance_to_degree(&f, 1, 1 << 20).map_err(|e| e.to_string())? {
            Distance::Exact(x) => x,
            Distance::Estimated(_) => return Err("distance not exact".into()),
        };
        let rate = match reject_rate(&f, &params, RateMode::Exhaustive { budget: 1 << 20 })
            .map_err(|e| e.to_string())?
        {
            RejectRate::Exact(r) => r,
            _ => return Err("rate not exact".into()),
        };
        let need = delta.min(Fraction::new(1, 9)) / Fraction::new(2, 1);
        check(rate >= need, || {
            format!("function {i}: rate {rate} < {need} (delta {delta})")
        })?;
        let margin = rate - need;
        min_margin = Some(min_margin.map_or(margin, |m| m.min(margin)));
    }
    Ok(format!(
        "50 functions, smallest slack {}",
        min_margin.unwrap_or_default()
    ))
}

fn reduction_agreement() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut sat, mut done) = (0, 0);
    while done < 200 {
        let n = rng.gen_range(3..=12u32);
        let k = rng.gen_range(2..=3usize);
        let f = if done % 2 == 0 {
            let m = rng.gen_range(k..=(n as usize + 2));
            random_normalized_cnf(n, m, &[2, 3], &mut rng)
        } else {
            // Random normalized formulas are nearly always satisfiable. The
            // four sign patterns on (x1, x2), each kept with probability 0.7,
            // are unsatisfiable whenever all four survive.
            let mut clauses: Vec<Vec<i32>> = [[1, 2], [-1, 2], [1, -2], [-1, -2]]
                .into_iter()
                .filter(|_| rng.gen_bool(0.7))
                .map(|c| c.to_vec())
                .collect();
            let a = rng.gen_range(1..=2i32);
            clauses.push(vec![
                if rng.gen() { a } else { -a },
                if rng.gen() { 3 } else { -3 },
            ]);
            let vars = 3u32;
            let g = tovey_normalize(&CnfFormula::new(vars, clauses).map_err(|e| e.to_string())?);
            if g.num_vars() > 12 {
                continue;
            }
            g
        };
        if f.num_clauses() < k {
            continue;
        }
        let red = reduce_sat_to_vectorsum(&f, k).map_err(|e| e.to_string())?;
        let a = sat_bruteforce(&f).map_err(|e| e.to_string())?;
        let b = solve_vectorsum_bruteforce(&red.instance, 1 << 30).map_err(|e| e.to_string())?;
        check(a.is_some() == b.is_some(), || {
            format!("disagreement on {}", f.to_dimacs())
        })?;
        check(check_gadget_properties(&red.instance).passed(), || {
            "P3/P4 fail".into()
        })?;
        let dim = red.layout.x_vars().len() + 2 * red.layout.y_vars().len();
        check(red.instance.dim() == dim, || {
            format!("d = {} != |X| + 2|Y| = {dim}", red.instance.dim())
        })?;
        sat += usize::from(a.is_some());
        done += 1;
    }
    Ok(format!(
        "200/200 agree ({sat} satisfiable), P3/P4 and d = |X| + 2|Y| hold"
    ))
}

fn instance(d: usize, vecs: &[&[u32]]) -> VectorSumInstance {
    let g = vecs
        .iter()
        .map(|v| FieldVec::new(F5, v.iter().copied()))
        .collect();
    VectorSumInstance::with_zero_target(F5, d, vec![g]).expect("valid instance")
}

fn rm_completeness() -> Verdict {
    let yes: Vec<VectorSumInstance> = vec![
        instance(1, &[&[0]]),
        instance(1, &[&[1], &[0]]),
        instance(2, &[&[1, 0], &[0, 0], &[0, 1]]),
        instance(2, &[&[0, 0], &[1, 1]]),
        instance(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]),
    ];
    let mut pairs = 0u64;
    for (n, inst) in yes.into_iter().enumerate() {
        let witness = vec![inst.groups()[0]
            .iter()
            .position(|v| v.is_zero())
            .ok_or("no zero vector")?];
        let csp = RmCsp::sample(inst, 4, 100 + n as u64, 100).map_err(|e| e.to_string())?;
        let (p, k) = (5u64, csp.k() as u32);
        let q4 = p.pow(4 * k);
        check(csp.group_count_u64() == 8 * q4, || "8 p^(4k)".into())?;
        check(csp.test_count(TestFamily::LowDegree) == q4, || {
            "p^(4k)".into()
        })?;
        let lin =
            csp.test_count(TestFamily::LinearityAlpha) + csp.test_count(TestFamily::LinearityBeta);
        check(lin == 2 * p.pow(3 * k), || "2 p^(3k)".into())?;
        check(
            csp.test_count(TestFamily::Neighbor) == k as u64 * p.pow(2 * k),
            || "k p^(2k)".into(),
        )?;
        check(csp.test_count(TestFamily::Wrap) == p.pow(2 * k), || {
            "p^(2k)".into()
        })?;
        let (mut low, mut linear, mut var) = (0u64, 0u64, 0u64);
        for g in 0..csp.group_count() {
            match csp.group_info(g) {
                GroupInfo::Test { test, .. } if test.kind.family() == TestFamily::LowDegree => {
                    low += 1
                }
                GroupInfo::Test { .. } => linear += 1,
                GroupInfo::Variable { .. } => var += 1,
            }
        }
        check(low == 2 * q4 && linear == 2 * q4 && var == 4 * q4, || {
            "group type counts".into()
        })?;

        let clique = witness_clique(&csp, &witness).map_err(|e| e.to_string())?;
        check(clique.size() as u64 == 8 * q4, || {
            "clique does not cover every group".into()
        })?;
        let verts: Vec<_> = clique.vertices().collect();
        check(verts.iter().all(|v| csp.contains(v)), || {
            "vertex outside its group".into()
        })?;
        let type3 = (4 * q4) as usize..verts.len();
        for a in type3.clone() {
            for b in a + 1..verts.len() {
                check(csp.adjacent(&verts[a], &verts[b]), || {
                    format!("type-3 groups {a}, {b} not adjacent")
                })?;
                pairs += 1;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(200 + n as u64);
        let mut sampled = 0;
        while sampled < 100_000 {
            let a = rng.gen_range(0..type3.start);
            let b = rng.gen_range(0..verts.len());
            if a == b {
                continue;
            }
            check(csp.adjacent(&verts[a], &verts[b]), || {
                format!("groups {a}, {b} not adjacent")
            })?;
            sampled += 1;
        }
    }
    Ok(format!("5 instances, {pairs} type-3 pairs and 5 x 10^5 mixed pairs adjacent, count identities exact"))
}

fn rm_soundness() -> Verdict {
    let no = [
        instance(1, &[&[1]]),
        instance(1, &[&[1], &[2]]),
        instance(2, &[&[1, 0], &[0, 1]]),
        instance(2, &[&[1, 1]]),
    ];
    let mut families = Vec::new();
    for (n, inst) in no.into_iter().enumerate() {
        check(
            solve_vectorsum_bruteforce(&inst, 1 << 20)
                .map_err(|e| e.to_string())?
                .is_none(),
            || "not a no-instance".into(),
        )?;
        let csp = RmCsp::sample(inst, 2, 300 + n as u64, 100).map_err(|e| e.to_string())?;
        let cert = certify_soundness(&csp, 1 << 16, 1 << 14).map_err(|e| e.to_string())?;
        check(cert.decided, || format!("instance {n}: undecided"))?;
        check(!cert.full_clique_exists, || {
            format!("instance {n}: full clique exists")
        })?;
        check(!cert.failing_families.is_empty(), || {
            format!("instance {n}: no failing family")
        })?;
        families.push(
            cert.failing_families
                .iter()
                .map(|f| f.name())
                .collect::<Vec<_>>()
                .join("+"),
        );
    }
    Ok(format!(
        "4 no-instances, no full clique; failing families: {}",
        families.join(", ")
    ))
}

fn walk_bound_exhaustive() -> Verdict {
    let mut graphs = vec![
        ("K4", RegularGraph::complete(4).map_err(|e| e.to_string())?),
        ("K8", RegularGraph::complete(8).map_err(|e| e.to_string())?),
        ("C8", RegularGraph::cycle(8).map_err(|e| e.to_string())?),
    ];
    for seed in 0..3 {
        graphs.push((
            "R3",
            RegularGraph::random_regular(8, 3, seed).map_err(|e| e.to_string())?,
        ));
    }
    let mut cases = 0;
    let mut worst = f64::NEG_INFINITY;
    for (name, g) in &graphs {
        let n = g.n();
        for mask in 0u32..(1 << n) {
            let set: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            let eps = mask.count_ones() as f64 / n as f64;
            for t in 1..=4 {
                let frac = walk_hitting_fraction(g, &set, t, WalkMode::Exact { budget: 1 << 20 })
                    .map_err(|e| e.to_string())?
                    .as_f64();
                let bound = walk_bound(g.lambda(), eps, t);
                check(frac <= bound + 1e-9, || {
                    format!("{name} B={mask:b} t={t}: {frac} > {bound}")
                })?;
                worst = worst.max(frac - bound);
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} cases, max(fraction - bound) = {worst:.3e}"
    ))
}

fn planted(
    seed: u64,
    sizes: &[usize],
    planted_groups: &[usize],
    density: f64,
) -> MaterializedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = planted_edges(&mut rng, sizes, planted_groups, density);
    MaterializedGraph::from_edges(sizes, &edges).expect("valid graph")
}

fn group_firsts(g: &MaterializedGraph) -> Vec<u32> {
    g.groups().iter().map(|r| r.start).collect()
}

fn graph_product() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sizes: Vec<usize> = (0..6).map(|_| rng.gen_range(2..=4)).collect();
    let yes = planted(81, &sizes, &[0, 1, 2, 3, 4, 5], 0.3);
    let h = RegularGraph::complete(6).map_err(|e| e.to_string())?;

    let p1 = ProductGraph::expander(&yes, &h, 1, 1 << 20).map_err(|e| e.to_string())?;
    let (m1, v1) = materialize(&p1, 1 << 20).map_err(|e| e.to_string())?;
    check(m1.n() == yes.n() && m1.groups() == yes.groups(), || {
        "t=1 vertex sets differ".into()
    })?;
    for (i, a) in v1.iter().enumerate() {
        for (j, b) in v1.iter().enumerate() {
            check(
                a.parts.len() == 1
                    && m1.has_edge(i as u32, j as u32) == yes.has_edge(a.parts[0], b.parts[0]),
                || "t=1 product is not the source graph".into(),
            )?;
        }
    }

    let p2 = ProductGraph::expander(&yes, &h, 2, 1 << 20).map_err(|e| e.to_string())?;
    let firsts = group_firsts(&yes);
    let lifted: Vec<_> = (0..p2.group_count()).map(|g| p2.lift(g, &firsts)).collect();
    for a in 0..lifted.len() {
        for b in a + 1..lifted.len() {
            check(p2.adjacent(&lifted[a], &lifted[b]), || {
                format!("lifted groups {a}, {b} not adjacent")
            })?;
        }
    }
    let kd = 6 * h.d();
    check(lifted.len() == kd && kd == 30, || {
        format!("lifted clique has {} groups", lifted.len())
    })?;

    let no = planted(82, &[2; 6], &[0, 1, 2], 0.3);
    let base = max_clique_materialized(&no, u64::MAX);
    check(base.exact, || "base oracle not exact".into())?;
    let eps = base.size() as f64 / 6.0;
    let pn = ProductGraph::expander(&no, &h, 2, 1 << 20).map_err(|e| e.to_string())?;
    let best = max_grouped_clique(&pn, 1 << 20, 1 << 34).map_err(|e| e.to_string())?;
    check(best.exact, || "product oracle not exact".into())?;
    let bound: f64 = soundness_bound(6, h.d(), 2, h.lambda(), eps);
    check(best.size() <= bound.floor() as usize, || {
        format!("product clique {} > bound {bound}", best.size())
    })?;
    Ok(format!(
        "t=1 isomorphic; planted clique lifts to {kd} groups; no-instance omega={} gives product {} <= {bound:.3}",
        base.size(),
        best.size()
    ))
}

fn disperser_seeds() -> Verdict {
    let mut failures = 0;
    let mut clamped = false;
    for seed in 0..100 {
        let mut d = make_disperser_clamped(30, 8, 4, 0.5, seed).map_err(|e| e.to_string())?;
        clamped |= d.clamped;
        let rep = d
            .verify(DisperserMode::Exact { budget: 1 << 20 })
            .map_err(|e| e.to_string())?;
        failures += usize::from(rep.violations > 0);
    }
    check(failures <= 1, || format!("{failures} failing seeds"))?;
    Ok(format!(
        "100 seeds, {failures} failures; ell = ceil(3m/(eps r)) = 45 > m = 30, clamped = {clamped}"
    ))
}

/// Largest number of cross pairs `(L_i, R_j)` adjacent in the biclique
/// instance, over all choices of one vertex per group, by enumeration.
fn max_cross_edges(b: &CliqueBiclique<'_, MaterializedGraph>) -> usize {
    let k = b.groups(Side::Left);
    let choices: Vec<Vec<u32>> = (0..k)
        .map(|g| b.vertices(Side::Left, g).collect())
        .collect();
    let total: usize = choices.iter().map(Vec::len).product();
    let decode = |mut i: usize| -> Vec<u32> {
        choices
            .iter()
            .map(|c| {
                let v = c[i % c.len()];
                i /= c.len();
                v
            })
            .collect()
    };
    let mut best = 0;
    for a in 0..total {
        let l = decode(a);
        for c in 0..total {
            let r = decode(c);
            let e = l
                .iter()
                .map(|x| r.iter().filter(|y| b.cross_adjacent(x, y)).count())
                .sum();
            best = best.max(e);
        }
    }
    best
}

fn biclique_chain() -> Verdict {
    let k = 6usize;
    let mut runs = 0;
    for seed in 0..3u64 {
        for yes in [true, false] {
            let groups: Vec<usize> = if yes { (0..k).collect() } else { vec![0, 1, 2] };
            let g = planted(
                1000 + seed,
                &vec![2; k],
                &groups,
                if yes { 0.3 } else { 0.25 },
            );
            let b = CliqueBiclique::new(&g);
            let clique = group_firsts(&g);
            if yes {
                for l in &clique {
                    for r in &clique {
                        check(b.cross_adjacent(l, r), || {
                            "clique does not give a biclique".into()
                        })?;
                    }
                }
            }

            let mut disp = make_disperser(k, 4, 4, 0.9, seed).map_err(|e| e.to_string())?;
            let rep = disp
                .verify(DisperserMode::Exact { budget: 1 << 20 })
                .map_err(|e| e.to_string())?;
            check(rep.violations == 0, || "disperser fails".into())?;
            let c = CompressedBiclique::new(&b, &disp).map_err(|e| e.to_string())?;
            if yes {
                let tuples: Vec<_> = (0..disp.k).map(|t| c.restrict(t, &clique)).collect();
                for l in &tuples {
                    for r in &tuples {
                        check(c.cross_adjacent(l, r), || {
                            "compressed completeness fails".into()
                        })?;
                    }
                }
            }

            let src = max_grouped_biclique(&b, 1 << 20, 1 << 30).map_err(|e| e.to_string())?;
            let best = max_grouped_biclique(&c, 1 << 20, 1 << 30).map_err(|e| e.to_string())?;
            check(src.exact && best.exact, || {
                "biclique oracle not exact".into()
            })?;
            let dec = decode_biclique(&c, &best.left, &best.right);
            let pairs_ok = dec
                .left
                .iter()
                .all(|(_, a)| dec.right.iter().all(|(_, r)| g.has_edge(*a, *r) || a == r));
            check(dec.is_biclique && pairs_ok, || {
                "decoded witness is not a biclique".into()
            })?;
            let cover = dec.left.len().min(dec.right.len());
            check(cover <= src.cover().0, || {
                format!(
                    "decoded cover {cover} beats source optimum {}",
                    src.cover().0
                )
            })?;
            if yes {
                check(best.cover() == (disp.k, disp.k), || {
                    "compressed optimum is not full".into()
                })?;
            }

            let dg = DensestGraph::new(&b);
            let dense =
                densest_grouped_subgraph(&dg, 1 << 20, 1 << 30).map_err(|e| e.to_string())?;
            check(dense.exact, || "densest oracle not exact".into())?;
            let kk = k as u64;
            let same_side = (k * (k - 1)) as usize;
            if yes {
                check(dense.edges as u64 == densest_yes_count(kk), || {
                    format!("yes count {} != C(2k,2)", dense.edges)
                })?;
            } else {
                let cross = max_cross_edges(&b);
                let eps_prime = cross as f64 / (kk * kk) as f64;
                check(dense.edges == cross + same_side, || {
                    "densest oracle disagrees with enumeration".into()
                })?;
                check(
                    dense.edges as f64 <= densest_no_bound(kk, eps_prime) + 1e-9,
                    || "no-instance bound fails".into(),
                )?;
                check((dense.edges as u64) < densest_yes_count(kk), || {
                    "no-instance reaches the yes count".into()
                })?;
            }
            runs += 1;
        }
    }
    let mut kst = Vec::new();
    for n in 1..=8u64 {
        let ex = max_c4_free_edges(n as usize).map_err(|e| e.to_string())?;
        let bound: f64 = kst_bound(n, 2).map_err(|e| e.to_string())?;
        check(kst_holds_a2(n, ex) && ex as f64 <= bound + 1e-9, || {
            format!("KST violated at n={n}")
        })?;
        kst.push(ex.to_string());
    }
    Ok(format!(
        "{runs} instances (3 yes, 3 no) verified; ex(n, C4) for n=1..8: {}",
        kst.join(",")
    ))
}

fn run_cli(dir: &Path, args: &[&str]) -> (Vec<u8>, Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_gapclique"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.stderr, out.status.code().unwrap_or(-1))
}

fn determinism() -> Verdict {
    let dirs = [
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cnf = random_normalized_cnf(8, 6, &[2, 3], &mut rng);
    let graph = planted(5, &[2, 2, 2, 2], &[0, 1, 2, 3], 0.4);
    let script: &[&[&str]] = &[
        &["reduce", "sat2vs", "f.cnf", "--k", "2", "-o", "vs.txt"],
        &[
            "reduce",
            "vs2clique",
            "vs.txt",
            "--seed",
            "9",
            "-o",
            "rm.txt",
        ],
        &["verify", "instance", "rm.txt"],
        &[
            "reduce", "amplify", "g.txt", "--t", "2", "--degree", "3", "--seed", "9", "-o",
            "amp.txt",
        ],
        &["reduce", "clique2biclique", "g.txt", "-o", "bi.txt"],
        &[
            "reduce", "compress", "bi.txt", "--k", "3", "--r", "3", "--eps", "0.9", "--seed", "9",
            "-o", "cmp.txt",
        ],
        &["reduce", "biclique2densest", "bi.txt", "-o", "dense.txt"],
        &["oracle", "sat", "f.cnf", "-o", "sat.txt"],
        &["oracle", "vectorsum", "vs.txt", "-o", "vsw.txt"],
        &["oracle", "clique", "amp.txt", "-o", "cw.txt"],
        &["oracle", "biclique", "cmp.txt", "-o", "bw.txt"],
        &["oracle", "densest", "dense.txt", "-o", "dw.txt"],
        &["verify", "witness", "amp.txt", "cw.txt"],
    ];
    let mut transcripts: [Vec<u8>; 2] = [Vec::new(), Vec::new()];
    for (dir, log) in dirs.iter().zip(transcripts.iter_mut()) {
        fs::write(dir.path().join("f.cnf"), cnf.to_dimacs()).map_err(|e| e.to_string())?;
        fs::write(dir.path().join("g.txt"), graph.to_text()).map_err(|e| e.to_string())?;
        for args in script {
            let (out, err, code) = run_cli(dir.path(), args);
            check(code == 0, || {
                format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err))
            })?;
            log.extend(out);
            log.extend(err);
        }
        let mut names: Vec<_> = fs::read_dir(dir.path())
            .map_err(|e| e.to_string())?
            .map(|e| e.map(|e| e.file_name()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        names.sort();
        for n in names {
            log.extend(n.to_string_lossy().bytes());
            log.extend(fs::read(dir.path().join(n)).map_err(|e| e.to_string())?);
        }
    }
    check(transcripts[0] == transcripts[1], || {
        "outputs differ between runs".into()
    })?;

    // Format round trips.
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_normalized_cnf(
            rng.gen_range(1..12),
            rng.gen_range(0..15),
            &[2, 3],
            &mut rng,
        );
        let text = f.to_dimacs();
        let back = parse_dimacs(&text).map_err(|e| e.to_string())?;
        check(back == f && back.to_dimacs() == text, || {
            "DIMACS round trip".into()
        })?;
        if f.num_clauses() >= 2 {
            let inst = reduce_sat_to_vectorsum(&f, 2)
                .map_err(|e| e.to_string())?
                .instance;
            let t = inst.to_text();
            let back = VectorSumInstance::from_text(&t).map_err(|e| e.to_string())?;
            check(back == inst && back.to_text() == t, || {
                "vectorsum round trip".into()
            })?;
        }
        let g = planted(seed, &[1, 2, 3], &[0, 2], 0.5);
        let t = g.to_text();
        check(
            MaterializedGraph::from_text(&t)
                .map_err(|e| e.to_string())?
                .to_text()
                == t,
            || "graph round trip".into(),
        )?;
        let h = RegularGraph::random_regular(8, 3, seed).map_err(|e| e.to_string())?;
        let t = h.to_text();
        check(
            RegularGraph::from_text(&t)
                .map_err(|e| e.to_string())?
                .to_text()
                == t,
            || "rotation map round trip".into(),
        )?;
        let d = make_disperser(12, 4, 4, 0.9, seed).map_err(|e| e.to_string())?;
        let t = d.to_text();
        let back = Disperser::from_text(&t).map_err(|e| e.to_string())?;
        check(back.subsets == d.subsets && back.to_text() == t, || {
            "disperser round trip".into()
        })?;
        check(
            verify_disperser(&back, DisperserMode::Exact { budget: 100 }).is_ok(),
            || "disperser reparse".into(),
        )?;
        let w = vec![(0usize, 0u32), (2, 4)];
        check(
            witness_from_text(&witness_to_text(&w)).map_err(|e| e.to_string())? == w,
            || "witness round trip".into(),
        )?;
    }
    let rm = fs::read_to_string(dirs[0].path().join("rm.txt")).map_err(|e| e.to_string())?;
    let csp = RmCsp::from_text(&rm).map_err(|e| e.to_string())?;
    check(csp.to_text() == rm, || "rmcsp round trip".into())?;
    Ok(format!(
        "{} commands byte-identical across two runs; 6 text formats round-trip",
        script.len()
    ))
}
