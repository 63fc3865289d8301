use std::path::Path;

use gapclique_core::cnf::sat_bruteforce;
use gapclique_core::grouped::{witness_to_text, MaterializedGraph};
use gapclique_core::oracles::{
    densest_materialized, max_biclique_materialized, max_clique_materialized,
};
use gapclique_core::vectorsum::solve_vectorsum_bruteforce;

use crate::verify::Artifact;
use crate::{read_file, search_budget, CliError, Outcome, PipelineConfig, Problem, Report};

pub(crate) fn run(
    cfg: &PipelineConfig,
    problem: Problem,
    input: &Path,
) -> Result<Outcome, CliError> {
    let art = Artifact::parse(&read_file(input)?)?;
    let budget = cfg.args.budget_oracle;
    let mut r = Report::new();
    r.value("problem", format!("{problem:?}").to_lowercase());
    let artifact = match (problem, art) {
        (Problem::Sat, Artifact::Cnf(f)) => {
            let model = sat_bruteforce(&f)?;
            r.value("satisfiable", model.is_some());
            match model {
                Some(a) => {
                    let lits: Vec<String> = a
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| {
                            if b {
                                format!("{}", i + 1)
                            } else {
                                format!("-{}", i + 1)
                            }
                        })
                        .collect();
                    r.summary("sat: satisfiable (lexicographically first model)");
                    Some(format!("v {} 0\n", lits.join(" ")))
                }
                None => {
                    r.summary("sat: unsatisfiable");
                    None
                }
            }
        }
        (Problem::Vectorsum, Artifact::VectorSum(inst)) => {
            let w = solve_vectorsum_bruteforce(&inst, cfg.args.budget_enum)?;
            r.value("k", inst.k()).value("solvable", w.is_some());
            match w {
                Some(w) => {
                    let s: Vec<String> = w.iter().map(usize::to_string).collect();
                    r.summary("vectorsum: witness found");
                    Some(format!("{}\n", s.join(" ")))
                }
                None => {
                    r.summary("vectorsum: no witness");
                    None
                }
            }
        }
        (Problem::Clique, Artifact::Graph(g)) => {
            let w = max_clique_materialized(&g, budget);
            search_budget(w.exact, w.nodes, budget)?;
            r.value("groups", g.groups().len())
                .value("max_clique", w.size())
                .value("nodes", w.nodes);
            r.summary(format!(
                "clique: maximum {} of {} groups",
                w.size(),
                g.groups().len()
            ));
            Some(pairs(&g, &w.vertices))
        }
        (Problem::Biclique, Artifact::Graph(g)) => {
            if g.sides().is_none() {
                return Err(CliError::usage("biclique oracle needs a sided graph"));
            }
            let w = max_biclique_materialized(&g, budget);
            search_budget(w.exact, w.nodes, budget)?;
            let (a, b) = w.cover();
            r.value("left", a).value("right", b).value("nodes", w.nodes);
            r.summary(format!("biclique: maximum K_{{{a},{b}}}"));
            let all: Vec<u32> = w.left.iter().chain(&w.right).copied().collect();
            Some(pairs(&g, &all))
        }
        (Problem::Densest, Artifact::Graph(g)) => {
            let w = densest_materialized(&g, budget);
            search_budget(w.exact, w.nodes, budget)?;
            r.value("groups", g.groups().len())
                .value("edges", w.edges)
                .value("nodes", w.nodes);
            r.summary(format!(
                "densest: {} edges with one vertex per group",
                w.edges
            ));
            Some(pairs(&g, &w.vertices))
        }
        (p, _) => {
            return Err(CliError::usage(format!(
                "input does not match the {p:?} oracle"
            )))
        }
    };
    Ok(Outcome::ok(artifact, r))
}

fn pairs(g: &MaterializedGraph, vs: &[u32]) -> String {
    let p: Vec<(usize, u32)> = vs.iter().map(|&v| (g.group_of_id(v), v)).collect();
    witness_to_text(&p)
}
