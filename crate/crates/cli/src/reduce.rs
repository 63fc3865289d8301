use std::path::Path;

use gapclique_core::cnf::{parse_dimacs, tovey_normalize};
use gapclique_core::expander::{soundness_bound, ProductGraph, RegularGraph};
use gapclique_core::grouped::{
    materialize, materialize_bipartite, GroupedGraph, MaterializedGraph, SidedView,
};
use gapclique_core::oracles::max_clique_materialized;
use gapclique_core::pihchain::{
    densest_yes_count, make_disperser_clamped, CliqueBiclique, CompressedBiclique, DensestGraph,
    DisperserMode,
};
use gapclique_core::rmcsp::{default_ell, RmCsp, TestFamily};
use gapclique_core::vectorsum::{
    check_gadget_properties, reduce_sat_to_vectorsum_with, VectorSumInstance,
    DEFAULT_PART_VAR_LIMIT,
};
use gapclique_core::Error;

use crate::{read_file, write_file, Chain, CliError, Outcome, PipelineConfig, Report};

pub(crate) fn run(
    cfg: &PipelineConfig,
    chain: Chain,
    input: &Path,
    disperser_out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let text = read_file(input)?;
    match chain {
        Chain::Sat2vs => sat2vs(cfg, &text),
        Chain::Vs2clique => vs2clique(cfg, &text),
        Chain::Amplify => amplify(cfg, &text),
        Chain::Clique2biclique => clique2biclique(cfg, &text),
        Chain::Compress => compress(cfg, &text, disperser_out),
        Chain::Biclique2densest => biclique2densest(cfg, &text),
    }
}

fn sat2vs(cfg: &PipelineConfig, text: &str) -> Result<Outcome, CliError> {
    let f = parse_dimacs(text)?;
    let k = cfg.args.k.unwrap_or(2);
    let normalized = f.is_normalized();
    let g = if normalized {
        f.clone()
    } else {
        tovey_normalize(&f)
    };
    let red = reduce_sat_to_vectorsum_with(&g, k, cfg.field, DEFAULT_PART_VAR_LIMIT)?;
    let gadget = check_gadget_properties(&red.instance);
    let (x, y) = (red.layout.x_vars().len(), red.layout.y_vars().len());
    let mut r = Report::new();
    r.value("chain", "sat2vs")
        .value("vars", f.num_vars())
        .value("clauses", f.num_clauses())
        .value("normalized_input", normalized)
        .value("normalized_vars", g.num_vars())
        .value("normalized_clauses", g.num_clauses())
        .value("k", k)
        .value("p", cfg.field.modulus())
        .value("x_vars", x)
        .value("y_vars", y)
        .with_formula("d", red.instance.dim(), "|X| + 2|Y|")
        .value("vectors", red.instance.size())
        .value("empty_parts", red.empty_parts.len())
        .value("p3", gadget.p3)
        .value("p4", gadget.p4);
    r.summary(format!(
        "sat2vs k={k} d={} vectors={} P3/P4 {}",
        red.instance.dim(),
        red.instance.size(),
        pass(gadget.passed())
    ));
    let code = if gadget.passed() {
        0
    } else {
        crate::EXIT_VERIFY
    };
    Ok(Outcome {
        artifact: Some(red.instance.to_text()),
        report: r,
        code,
    })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn pow_u128(base: u64, exp: usize) -> Option<u128> {
    (base as u128).checked_pow(exp as u32)
}

fn show(v: Option<u128>) -> String {
    v.map_or_else(|| "overflow".to_string(), |x| x.to_string())
}

fn vs2clique(cfg: &PipelineConfig, text: &str) -> Result<Outcome, CliError> {
    let inst = VectorSumInstance::from_text(text)?;
    let (ell, ell_formula) = match cfg.args.ell {
        Some(l) => (l, "set by --ell"),
        None => (default_ell(&inst), "2k + 4 ceil(log2 n)"),
    };
    let csp = RmCsp::sample(inst, ell, cfg.stream("vs2clique"), cfg.args.max_retries)?;
    let (p, k) = (csp.field().modulus() as u64, csp.k());
    let q4 = csp.q().pow(4);
    let mut r = Report::new();
    r.value("chain", "vs2clique")
        .value("k", k)
        .value("d", csp.source().dim())
        .value("p", p)
        .value("n", csp.source().size())
        .with_formula("ell", ell, ell_formula)
        .with_formula("q", csp.q(), "p^k")
        .with_formula("k_prime", csp.group_count_u64(), "8 p^(4k)")
        .with_formula("groups.type1", 2 * q4, "2 p^(4k)")
        .with_formula("groups.type2", 2 * q4, "2 p^(4k)")
        .with_formula("groups.type3", 4 * q4, "4 p^(4k)")
        .with_formula(
            "tests.low_degree",
            csp.test_count(TestFamily::LowDegree),
            "p^(4k)",
        )
        .with_formula(
            "tests.linearity",
            csp.test_count(TestFamily::LinearityAlpha) + csp.test_count(TestFamily::LinearityBeta),
            "2 p^(3k)",
        )
        .with_formula(
            "tests.neighbor",
            csp.test_count(TestFamily::Neighbor),
            "k p^(2k)",
        )
        .with_formula("tests.wrap", csp.test_count(TestFamily::Wrap), "p^(2k)")
        .with_formula("values_per_variable", show(pow_u128(p, ell)), "p^ell")
        .value("vertices_upper_bound", csp.vertex_count_bound())
        .value("matrix.prop1", true)
        .value("matrix.prop2", true)
        .value("matrix.prop3", true);
    r.summary(format!(
        "vs2clique k'={} ell={ell} matrix properties pass",
        csp.group_count_u64()
    ));
    Ok(Outcome::ok(Some(csp.to_text()), r))
}

fn amplify(cfg: &PipelineConfig, text: &str) -> Result<Outcome, CliError> {
    let g = MaterializedGraph::from_text(text)?;
    let k = g.group_count();
    let t = cfg.args.t.unwrap_or(2);
    if t == 0 {
        return Err(CliError::usage("--t must be at least 1"));
    }
    let base = max_clique_materialized(&g, cfg.args.budget_oracle);
    crate::search_budget(base.exact, base.nodes, cfg.args.budget_oracle)?;
    let eps = base.size() as f64 / k.max(1) as f64;
    let mut r = Report::new();
    r.value("chain", "amplify").value("k", k).value("t", t);
    r.value("base.clique", base.size())
        .with_formula("eps", eps, "omega / k");
    let (product, groups) = if cfg.args.tensor {
        let p = ProductGraph::tensor(&g, t, cfg.args.budget_materialize)?;
        r.value("mode", "tensor");
        r.with_formula("k_prime", p.group_count(), "k^t");
        let m = materialize(&p, cfg.args.budget_materialize)?.0;
        (m, p.group_count())
    } else {
        let h = match cfg.args.degree {
            Some(d) => RegularGraph::random_regular(k, d, cfg.stream("amplify-expander"))?,
            None => RegularGraph::complete(k)?,
        };
        let d = h.d();
        let lambda = h.lambda();
        let p = ProductGraph::expander(&g, &h, t, cfg.args.budget_materialize)?;
        r.value("mode", "walk")
            .value(
                "expander",
                if cfg.args.degree.is_some() {
                    "random-regular"
                } else {
                    "complete"
                },
            )
            .value("d", d)
            .with_formula("lambda", lambda, "max |eigenvalue| of A/d - J/n")
            .with_formula("k_prime", p.group_count(), "k d^(t-1)")
            .with_formula("completeness_clique", p.group_count(), "k d^(t-1)")
            .with_formula(
                "soundness_bound",
                soundness_bound(k, d, t, lambda, eps),
                "k d^(t-1) ((1 - lambda) sqrt(eps) + lambda)^(t-1)",
            );
        let m = materialize(&p, cfg.args.budget_materialize)?.0;
        (m, p.group_count())
    };
    r.value("vertices", product.n())
        .value("edges", product.edge_count());
    if t == 1 {
        r.summary(format!("amplify t=1: identity product, k'={groups}"));
    } else {
        r.summary(format!(
            "amplify t={t} k'={groups} vertices={}",
            product.n()
        ));
    }
    Ok(Outcome::ok(Some(product.to_text()), r))
}

fn clique2biclique(cfg: &PipelineConfig, text: &str) -> Result<Outcome, CliError> {
    let g = MaterializedGraph::from_text(text)?;
    let b = CliqueBiclique::new(&g);
    let (m, _) = materialize_bipartite(&b, cfg.args.budget_materialize)?;
    let k = g.group_count();
    let mut r = Report::new();
    r.value("chain", "clique2biclique")
        .value("k", k)
        .value("groups_per_side", k)
        .value("vertices", m.n())
        .value("edges", m.edge_count())
        .with_formula(
            "completeness_biclique",
            format!("K_{{{k},{k}}}"),
            "k-clique -> K_{k,k}",
        );
    r.summary(format!("clique2biclique k={k} vertices={}", m.n()));
    Ok(Outcome::ok(Some(m.to_text()), r))
}

fn compress(
    cfg: &PipelineConfig,
    text: &str,
    disperser_out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let g = MaterializedGraph::from_text(text)?;
    let view = SidedView::new(&g)?;
    let m = gapclique_core::grouped::BipartiteGroupedGraph::groups(
        &view,
        gapclique_core::grouped::Side::Left,
    );
    let k_out = cfg.args.k.unwrap_or(m);
    let (r_sub, r_formula) = match cfg.args.r {
        Some(r) => (r, "set by --r"),
        None => {
            let r = (cfg.args.c_log * (k_out.max(2) as f64).ln() / cfg.args.log_base.ln()).ceil()
                as usize;
            (r.clamp(1, k_out.max(1)), "ceil(c log_base k')")
        }
    };
    let eps = cfg.args.eps.unwrap_or(0.5);
    let mut disperser = make_disperser_clamped(m, k_out, r_sub, eps, cfg.stream("disperser"))?;
    let mode = if cfg.montecarlo() {
        DisperserMode::MonteCarlo {
            trials: cfg.args.trials,
            seed: cfg.stream("disperser-verify"),
        }
    } else {
        DisperserMode::Exact {
            budget: cfg.args.budget_enum,
        }
    };
    let check = disperser.verify(mode)?;
    let mut r = Report::new();
    r.value("chain", "compress")
        .value("m", m)
        .value("k_prime", k_out)
        .with_formula("r", r_sub, r_formula)
        .value("eps", eps)
        .with_formula("ell_formula", disperser.ell_formula, "ceil(3m / (eps r))")
        .value("ell", disperser.ell)
        .value("clamped", disperser.clamped)
        .with_formula("threshold", disperser.threshold(), "ceil((1 - eps) m)")
        .value("disperser.checked", check.checked)
        .value("disperser.violations", check.violations)
        .value("disperser.min_union", check.min_union);
    if check.violations > 0 {
        return Err(Error::SamplingFailed {
            attempts: 1,
            reason: format!(
                "disperser violates the union bound on r-subset {:?}",
                check.first_violation.unwrap_or_default()
            ),
        }
        .into());
    }
    if let Some(path) = disperser_out {
        write_file(path, &disperser.to_text())?;
    }
    let c = CompressedBiclique::new(&view, &disperser)?;
    let (out, _) = materialize_bipartite(&c, cfg.args.budget_materialize)?;
    r.value("vertices", out.n())
        .value("edges", out.edge_count());
    r.summary(format!(
        "compress m={m} -> k'={k_out} ell={}{} disperser pass",
        disperser.ell,
        if disperser.clamped { " (clamped)" } else { "" }
    ));
    Ok(Outcome::ok(Some(out.to_text()), r))
}

fn biclique2densest(cfg: &PipelineConfig, text: &str) -> Result<Outcome, CliError> {
    let g = MaterializedGraph::from_text(text)?;
    let view = SidedView::new(&g)?;
    let d = DensestGraph::new(&view);
    let (out, _) = materialize(&d, cfg.args.budget_materialize)?;
    let k = g.side_groups(gapclique_core::grouped::Side::Left).len();
    let mut r = Report::new();
    r.value("chain", "biclique2densest")
        .value("k", k)
        .value("groups", out.groups().len())
        .value("vertices", out.n())
        .value("edges", out.edge_count())
        .with_formula("yes_edges", densest_yes_count(k as u64), "C(2k, 2)");
    r.summary(format!(
        "biclique2densest k={k} groups={}",
        out.groups().len()
    ));
    Ok(Outcome::ok(Some(out.to_text()), r))
}
