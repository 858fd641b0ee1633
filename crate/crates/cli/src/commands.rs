use std::fs;
use std::path::Path;

use powerval::alpha::counterexample_witness;
use powerval::lp::{decompose_capacity, matrix_game, max_min_value, min_max_value, DecomposeError};
use powerval::powerdomain::{verify_sandwich, PowerdomainError, SandwichOptions, WeakOpen};
use powerval::rational::Rational;
use powerval::report::Report;
use powerval::suites::{self, SuiteConfig};
use powerval::text::{parse_alpha_conjuncts, parse_document, parse_matrix, parse_poset, Document};
use powerval::valuation::{
    choquet_integral, stochastic_leq, stochastic_leq_transport, Dominance, Flavor, SimpleValuation,
};

use crate::{Failure, Outcome};

type Run = Result<Outcome, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn document(path: &Path, max_size: usize) -> Result<Document, Failure> {
    parse_document(&read(path)?, max_size).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn vector(xs: &[Rational]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(","))
}

pub fn order(path: &Path, max_size: usize) -> Run {
    let p = parse_poset(&read(path)?, max_size).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let opens = p.enumerate_opens();
    let sobriety = p.is_sober();
    let mut r = Report::new();
    r.push("elements", p.size());
    r.push("names", p.format_set(p.all()));
    let covers: Vec<String> = p
        .covers()
        .iter()
        .map(|&(x, y)| format!("{}<{}", p.name(x), p.name(y)))
        .collect();
    r.push("covers", covers.join(" "));
    r.push("opens", opens.len());
    r.push("irreducible_closed", sobriety.generic_points.len());
    r.push("sober", sobriety.sober);
    for x in 0..p.size() {
        let up = p.up_open(p.up_of(x));
        let basis = p.finitary_basis_at(x, up).map_err(|e| usage(e.to_string()))?;
        r.push(format!("basis[{}]", p.name(x)), p.format_set(basis));
    }
    let topology = opens.contains(&p.whole())
        && opens.iter().all(|a| {
            opens
                .iter()
                .all(|b| opens.contains(&a.union(*b)) && opens.contains(&a.intersection(*b)))
        });
    r.push("check.topology", topology);
    Ok(Outcome {
        report: r,
        pass: topology,
    })
}

fn two_valuations(doc: &Document) -> Result<(&SimpleValuation, &SimpleValuation), Failure> {
    match doc.valuations.as_slice() {
        [(_, mu), (_, nu), ..] => Ok((mu, nu)),
        _ => Err(usage("expected two `val` lines")),
    }
}

pub fn leq(path: &Path, max_size: usize) -> Run {
    let doc = document(path, max_size)?;
    let p = &doc.poset;
    let (mu, nu) = two_valuations(&doc)?;
    let verdict = stochastic_leq(mu, nu, p);
    let transport = stochastic_leq_transport(mu, nu, p);
    let mut r = Report::new();
    r.push("mu", mu.display(p));
    r.push("nu", nu.display(p));
    r.push("leq", verdict.holds());
    if let Dominance::Violated(u) = verdict {
        r.push("open", p.format_set(u.members()));
        r.push("mu(open)", mu.eval(u));
        r.push("nu(open)", nu.eval(u));
    }
    r.push("check.transport_agrees", transport == verdict.holds());
    Ok(Outcome {
        pass: verdict.holds() && transport == verdict.holds(),
        report: r,
    })
}

pub fn choquet(path: &Path, max_size: usize) -> Run {
    let doc = document(path, max_size)?;
    let p = &doc.poset;
    if doc.steps.is_empty() {
        return Err(usage("expected at least one `step` line"));
    }
    let mut r = Report::new();
    let mut pass = true;
    for (i, h) in doc.steps.iter().enumerate() {
        for (j, (_, nu)) in doc.valuations.iter().enumerate() {
            let value = choquet_integral(h, nu, p).map_err(|e| usage(format!("step {i}: {e}")))?;
            let linear: Rational = nu.weights().map(|(x, a)| a * h.value(x)).sum();
            pass &= value == linear;
            r.push(format!("integral[{i}].val[{j}]"), &value);
            r.push(format!("check.linear[{i}].val[{j}]"), value == linear);
        }
        for (j, kappa) in doc.capacities.iter().enumerate() {
            let value = choquet_integral(h, kappa, p).map_err(|e| usage(format!("step {i}: {e}")))?;
            let closed = kappa.min_formula(h);
            pass &= value == closed;
            r.push(format!("integral[{i}].cap[{j}]"), &value);
            r.push(format!("check.min_formula[{i}].cap[{j}]"), value == closed);
        }
    }
    Ok(Outcome { report: r, pass })
}

pub fn decompose(path: &Path, max_size: usize) -> Run {
    let doc = document(path, max_size)?;
    let p = &doc.poset;
    let kappa = doc.capacities.first().ok_or_else(|| usage("expected a `cap` line"))?;
    let (_, nu) = doc.valuations.first().ok_or_else(|| usage("expected a `val` line"))?;
    let mut r = Report::new();
    r.push("kappa", kappa.display(p));
    r.push("nu", nu.display(p));
    match decompose_capacity(kappa, nu, p) {
        Ok(d) => {
            let below = stochastic_leq(&d.mixture, nu, p).holds();
            r.push("strategies", d.space.len());
            r.push("beta", vector(d.beta.weights()));
            r.push("mixture", d.mixture.display(p));
            r.push("check.mixture_le_nu", below);
            Ok(Outcome { report: r, pass: below })
        }
        Err(DecomposeError::NotDominated(u)) => {
            r.push("check.kappa_le_nu", false);
            r.push("open", p.format_set(u.members()));
            r.push("kappa(open)", kappa.eval(u));
            r.push("nu(open)", nu.eval(u));
            Ok(Outcome { report: r, pass: false })
        }
        Err(e) => Err(usage(e.to_string())),
    }
}

fn flavor_of(doc: &Document, flag: Option<Flavor>) -> Flavor {
    flag.or_else(|| doc.valuations.first().and_then(|(f, _)| *f))
        .unwrap_or(Flavor::Plain)
}

pub fn witness(path: &Path, max_size: usize, grid: u64, flag: Option<Flavor>) -> Run {
    let doc = document(path, max_size)?;
    let (_, nu) = doc.valuations.first().ok_or_else(|| usage("expected a `val` line"))?;
    let flavor = flavor_of(&doc, flag);
    let u = WeakOpen::new(doc.conjuncts.clone(), flavor);
    let opts = SandwichOptions {
        grid,
        ..SandwichOptions::default()
    };
    match verify_sandwich(&doc.poset, nu, &u, &opts) {
        Ok((bundle, verdicts)) => Ok(Outcome {
            report: bundle.report(&verdicts),
            pass: verdicts.all_pass(),
        }),
        Err(PowerdomainError::TheoremViolation(msg)) => {
            let mut r = Report::new();
            r.push("flavor", flavor);
            r.push("failure[0]", msg);
            Ok(Outcome { report: r, pass: false })
        }
        Err(e) => Err(usage(e.to_string())),
    }
}

pub fn counterexample(tokens: &[String]) -> Run {
    let conjuncts = parse_alpha_conjuncts(tokens).map_err(|e| usage(e.to_string()))?;
    let c = counterexample_witness(&conjuncts).map_err(|e| usage(e.to_string()))?;
    Ok(Outcome {
        pass: c.separates(),
        report: c.report(),
    })
}

pub fn game(path: &Path) -> Run {
    let m = parse_matrix(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let (lower, _) = max_min_value(&m).map_err(|e| usage(e.to_string()))?;
    let (upper, _) = min_max_value(&m).map_err(|e| usage(e.to_string()))?;
    let sol = matrix_game(&m).map_err(|e| usage(e.to_string()))?;
    let certified = sol.verify(&m);
    let mut r = Report::new();
    r.push("rows", m.rows());
    r.push("cols", m.cols());
    r.push("value", &sol.value);
    r.push("max_min", &lower);
    r.push("min_max", &upper);
    r.push("row_strategy", vector(&sol.row_strategy));
    r.push("col_strategy", vector(&sol.col_strategy));
    r.push("check.minimax", lower == upper);
    r.push("check.certified", certified);
    Ok(Outcome {
        pass: lower == upper && certified,
        report: r,
    })
}

pub fn selftest(seed: u64, max_size: usize, grid: u64, sandwich_cases: usize) -> Run {
    let cfg = SuiteConfig {
        seed,
        max_size,
        grid,
        sandwich_cases,
        ..SuiteConfig::default()
    };
    let mut r = Report::new();
    r.push("seed", seed);
    r.push("max_size", max_size);
    r.push("grid", grid);
    let mut pass = true;
    for suite in suites::run_all(&cfg) {
        pass &= suite.pass();
        r.extend(suite.report());
    }
    r.push("selftest", if pass { "pass" } else { "fail" });
    Ok(Outcome { report: r, pass })
}
