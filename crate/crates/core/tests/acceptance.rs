//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use prefplan::cli::{self, SchemeArg, SolveArgs};
use prefplan::files;
use prefplan::mdp::{is_proper, MemorylessPolicy, Tlmdp, TransitionSystem};
use prefplan::momdp::{
    pareto_dominates, pareto_front, sample_weights, Momdp, SolverOptions, ValueVector, WeightScheme,
};
use prefplan::oracle::{check_theorem1, enumerate_solutions, random_instance, random_pair, OracleCap, RandomConfig};
use prefplan::order::{dominates_weak_stochastic, Dominance, OutcomeDistribution, PartialOrder};
use prefplan::product::build_product;
use prefplan::scenarios::{build_garden, build_garden_mini, garden_pdfa, preset};

use common::{check_product, garden_r_by_hand, mat_vec, max_abs_diff, REFERENCE_ROWS};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let order = PartialOrder::from_pairs(
        ["a", "b", "c", "d"],
        &[("a", "b"), ("b", "d"), ("c", "d"), ("a", "c"), ("a", "d")],
    )
    .map_err(|e| e.to_string())?;
    let family = order.weak_order_family().map_err(|e| e.to_string())?;
    let sets = family.named_sets();
    let want: Vec<Vec<&str>> = vec![vec!["a"], vec!["a", "b"], vec!["a", "c"], vec!["a", "b", "c", "d"], vec![]];
    ensure(sets == want, || format!("family {sets:?}"))?;

    let p1 = OutcomeDistribution::new([("a", 0.5), ("b", 0.5)]);
    let p2 = OutcomeDistribution::new([("a", 0.5), ("c", 0.5)]);
    let p3 = OutcomeDistribution::new([("a", 0.5), ("d", 0.5)]);
    let proj = |p: &OutcomeDistribution| family.project(p).map_err(|e| e.to_string());
    ensure(proj(&p1)? == [0.5, 1.0, 0.5, 1.0, 0.0], || "P1 projection".into())?;
    ensure(proj(&p2)? == [0.5, 0.5, 1.0, 1.0, 0.0], || "P2 projection".into())?;
    ensure(proj(&p3)? == [0.5, 0.5, 0.5, 1.0, 0.0], || "P3 projection".into())?;

    let dom = |a: &OutcomeDistribution, b: &OutcomeDistribution| {
        dominates_weak_stochastic(a, b, &order, 0.0).map_err(|e| e.to_string())
    };
    ensure(dom(&p1, &p3)? == Dominance::Dominates, || "P1 > P3".into())?;
    ensure(dom(&p2, &p3)? == Dominance::Dominates, || "P2 > P3".into())?;
    ensure(dom(&p1, &p2)? == Dominance::Neither, || "P1 || P2".into())?;
    Ok("family and projections exact; P1 > P3, P2 > P3, P1 || P2".into())
}

fn criterion_2() -> Outcome {
    let pdfa = garden_pdfa().map_err(|e| e.to_string())?;
    let r = pdfa.reachability().matrix();
    ensure(r == garden_r_by_hand(), || format!("R = {r:?}"))?;
    let mut worst: f64 = 0.0;
    for (k, (_, v, p)) in REFERENCE_ROWS.iter().enumerate() {
        let gap = max_abs_diff(&mat_vec(&r, p), v);
        ensure(gap <= 0.011, || format!("row {} gap {gap}", k + 1))?;
        worst = worst.max(gap);
    }
    Ok(format!("10 rows, max |V - R p| = {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let (mdp, pdfa) = build_garden_mini("4x4").map_err(|e| e.to_string())?;
    let momdp = Momdp::new(build_product(&mdp, &pdfa).map_err(|e| e.to_string())?);
    let weights = sample_weights(25, momdp.num_objectives(), 2024, WeightScheme::Dirichlet);
    ensure(weights.iter().all(|w| w.is_strictly_positive()), || "zero weight".into())?;
    let front = pareto_front(&momdp, &weights, &SolverOptions::default(), 1e-9).map_err(|e| e.to_string())?;
    let values: Vec<&ValueVector> = (0..weights.len()).map(|k| &front.for_weight(k).value).collect();
    for (i, a) in values.iter().enumerate() {
        for (j, b) in values.iter().enumerate() {
            let d = pareto_dominates(a, b, 1e-9).map_err(|e| e.to_string())?;
            ensure(d != Dominance::Dominates, || format!("weight {} dominates weight {}", i + 1, j + 1))?;
        }
    }
    ensure(front.is_mutually_nondominated(), || "front reports dominated pairs".into())?;
    Ok(format!("25 weights, {} distinct vectors, none dominated", front.solutions.len()))
}

fn criterion_4() -> Outcome {
    let mut nondominated = 0;
    let mut converse = 0;
    let mut policies = 0;
    let mut run = |momdp: &Momdp, label: &str| -> Result<(), String> {
        let e = enumerate_solutions(momdp, OracleCap::default()).map_err(|e| format!("{label}: {e}"))?;
        let pi_ok = e.solutions.iter().all(|s| {
            let mut actions = vec![0; momdp.product().num_states()];
            for (&x, &a) in e.decision_states.iter().zip(&s.actions) {
                actions[x] = a;
            }
            MemorylessPolicy::deterministic(momdp.product(), &actions)
                .and_then(|pi| is_proper(momdp.product(), &pi))
                .unwrap_or(false)
        });
        ensure(pi_ok, || format!("{label}: enumerated an improper policy"))?;
        let r = check_theorem1(momdp, &e).map_err(|e| e.to_string())?;
        ensure(r.forward_violations.is_empty(), || {
            format!("{label}: {} forward violations", r.forward_violations.len())
        })?;
        ensure(r.route_mismatches == 0, || format!("{label}: {} route mismatches", r.route_mismatches))?;
        ensure(r.identity_gap <= 1e-9, || format!("{label}: identity gap {}", r.identity_gap))?;
        nondominated += r.pareto_nondominated;
        converse += r.converse_violations.len();
        policies += r.policies;
        Ok(())
    };
    for seed in 0..200 {
        let m = random_instance(seed, 6).map_err(|e| e.to_string())?;
        let p = m.product();
        let decision = (0..p.num_states()).filter(|&x| !p.is_terminal(x)).count();
        ensure(decision <= 6 && p.num_classes() <= 3, || format!("seed {seed} over limits"))?;
        ensure((0..p.num_states()).all(|x| p.actions(x).len() <= 3), || format!("seed {seed} actions"))?;
        run(&m, &format!("seed {seed}"))?;
    }
    let (mdp, pdfa) = build_garden_mini("3x3").map_err(|e| e.to_string())?;
    let mini = Momdp::new(build_product(&mdp, &pdfa).map_err(|e| e.to_string())?);
    run(&mini, "3x3")?;
    Ok(format!(
        "201 instances, {policies} policies, {nondominated} nondominated outcomes, 0 violations (converse: {converse})"
    ))
}

fn criterion_5() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checked = 0;
    for name in ["3x3", "4x4"] {
        let (mdp, pdfa) = build_garden_mini(name).map_err(|e| e.to_string())?;
        let product = build_product(&mdp, &pdfa).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("{name}.json"));
        files::write_product(&path, &product).map_err(|e| e.to_string())?;
        let args = SolveArgs {
            product: path.clone(),
            weights: None,
            normalize: false,
            num_weights: 30,
            seed: 5,
            scheme: SchemeArg::Dirichlet,
            tol: 1e-10,
            max_iters: 1_000_000,
            eps: 1e-9,
            out: Some(dir.path().join(format!("{name}.csv"))),
            policies: Some(dir.path().join(name)),
        };
        let mut sink = Vec::new();
        cli::cmd_solve(&args, &mut sink).map_err(|e| e.to_string())?;
        let meta: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(cli::sidecar(args.out.as_ref().unwrap())).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let gap = meta["max_identity_gap"].as_f64().unwrap_or(f64::INFINITY);
        ensure(gap <= 1e-9, || format!("{name}: reported gap {gap}"))?;

        // Re-evaluate every emitted policy and apply R independently.
        let momdp = Momdp::new(product);
        let r = garden_r_by_hand();
        for entry in std::fs::read_dir(dir.path().join(name)).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let pi = files::read_policy(&path, momdp.product()).map_err(|e| e.to_string())?;
            let sol = prefplan::momdp::evaluate_policy(&momdp, &pi).map_err(|e| e.to_string())?;
            let gap = max_abs_diff(&mat_vec(&r, &sol.outcome_probs), &sol.value.0);
            ensure(gap <= 1e-9, || format!("{}: gap {gap}", path.display()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} emitted policies satisfy V = R p within 1e-9"))
}

fn criterion_6() -> Outcome {
    let cfg = RandomConfig {
        mdp_states: (2, 8),
        automaton_states: (2, 5),
        ..RandomConfig::default()
    };
    let mut states = 0;
    for seed in 0..50 {
        let (mdp, pdfa) = random_pair(10_000 + seed, &cfg).map_err(|e| e.to_string())?;
        let p = build_product(&mdp, &pdfa).map_err(|e| e.to_string())?;
        check_product(&mdp, &pdfa, &p).map_err(|e| format!("seed {seed}: {e}"))?;
        states += p.num_states();
    }
    Ok(format!("50 random pairs, {states} product states verified"))
}

fn criterion_7() -> Outcome {
    let mut lines = Vec::new();
    for name in ["full", "full-stochastic"] {
        let t = Instant::now();
        let (mdp, pdfa) = build_garden(&preset(name).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(mdp.validate().is_valid(), || format!("{name}: MDP has violations"))?;
        let product = build_product(&mdp, &pdfa).map_err(|e| e.to_string())?;
        let n = product.num_states();
        ensure((3_665..=366_490).contains(&n), || format!("{name}: product has {n} states"))?;
        let build = t.elapsed();
        let momdp = Momdp::new(product);
        let t = Instant::now();
        let weights = sample_weights(100, 4, 7, WeightScheme::Dirichlet);
        let front = pareto_front(&momdp, &weights, &SolverOptions::default(), 1e-9).map_err(|e| e.to_string())?;
        ensure(front.is_mutually_nondominated(), || format!("{name}: dominated pair in the front"))?;
        let r = momdp.reachability_matrix();
        let gap = front.solutions.iter().map(|s| s.identity_gap(&r)).fold(0.0, f64::max);
        ensure(gap <= 1e-9, || format!("{name}: identity gap {gap}"))?;
        ensure(front.solutions.iter().all(|s| (s.value.0[3] - 1.0).abs() < 1e-9), || format!("{name}: v_p4 != 1"))?;
        lines.push(format!(
            "{name}: MDP {} states / {} transitions, product {n} states, {} distinct vectors, build {:.1}s, solve {:.1}s",
            mdp.num_states(),
            mdp.num_transitions(),
            front.solutions.len(),
            build.as_secs_f64(),
            t.elapsed().as_secs_f64()
        ));
    }
    Ok(lines.join("; "))
}

fn criterion_8() -> Outcome {
    // s0 --go--> s1, s1 --loop--> s2 --back--> s1 never reaches the sink;
    // s1 --stop--> sink does.
    let m = Tlmdp::builder()
        .states(["s0", "s1", "s2", "sink"])
        .initial("s0")
        .sink("sink")
        .transition("s0", "go", "s1", 1.0)
        .transition("s1", "loop", "s2", 1.0)
        .transition("s1", "stop", "sink", 1.0)
        .transition("s2", "back", "s1", 1.0)
        .build()
        .map_err(|e| e.to_string())?;
    let report = m.validate();
    ensure(report.is_valid(), || format!("unexpected violations: {report}"))?;
    ensure(report.has_improper_warning(), || "no improper-policy warning".into())?;
    let trapped = MemorylessPolicy::deterministic(&m, &[0, 0, 0, 0]).map_err(|e| e.to_string())?;
    ensure(!is_proper(&m, &trapped).map_err(|e| e.to_string())?, || "trapped policy reported proper".into())?;
    let escaping = MemorylessPolicy::deterministic(&m, &[0, 1, 0, 0]).map_err(|e| e.to_string())?;
    ensure(is_proper(&m, &escaping).map_err(|e| e.to_string())?, || "escaping policy reported improper".into())?;
    Ok("end component {s1, s2} warned; trapped policy improper".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("1 upper-set family of the four-element order", criterion_1, Duration::from_secs(1)),
        ("2 garden reference rows satisfy V = R p", criterion_2, Duration::from_secs(1)),
        ("3 mutual nondominance on 4x4", criterion_3, Duration::from_secs(30)),
        ("4 dominance-route oracle suite", criterion_4, Duration::from_secs(300)),
        ("5 R p identity on solve output", criterion_5, Duration::from_secs(60)),
        ("6 product correctness", criterion_6, Duration::from_secs(60)),
        ("7 full-size garden", criterion_7, Duration::from_secs(1800)),
        ("8 proper-policy guard", criterion_8, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = t.elapsed();
        let outcome = outcome.and_then(|s| {
            if elapsed <= budget {
                Ok(s)
            } else {
                Err(format!("{s}; took {:.1}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs()))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({:.2}s)", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} ({:.2}s)", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
