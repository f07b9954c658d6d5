//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 5 and 7 are strict expected failures. The component-sum bracket
//! is false for outer exponents above one, and the first diagonal operator of
//! the smoothness example is smooth. The target errors out if either ever
//! passes or if any other criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{brute_norm, certificate_residuals, distance_lower_bound, brute_at, random_real_operator, rng};
use rand::Rng;
use tuplenorm::approx::{bj_orthogonal, distance_to_diagonal_subspace, distance_to_line, BJDecision};
use tuplenorm::derivatives::{rho_operator, smoothness_of_operator, GateauxPair};
use tuplenorm::normcalc::{attainment_set, joint_attainment_check, operator_norm, tuple_norm};
use tuplenorm::theorems::{
    diagonal_smoothness_example, gen_example_a_with, gen_example_b_with, gen_functionals, gen_random,
    golden_counterexample, run_check, CheckReport, CheckSettings, GenOptions, Instance, Status, TheoremId,
};
use tuplenorm::{Config, Exponent, Field, LpSpace, OperatorTuple, C64};

const EXPECTED_FAILURES: [u8; 2] = [5, 7];

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    details: Vec<String>,
    elapsed: Duration,
}

/// Orthogonal instances collected for criterion 8.
#[derive(Default)]
struct Pool {
    orthogonal: Vec<(String, OperatorTuple, OperatorTuple, BJDecision)>,
}

impl Pool {
    fn offer(&mut self, inst: &Instance, d: BJDecision) {
        if d.orthogonal {
            self.orthogonal.push((inst.label(), inst.t.clone(), inst.s.clone(), d));
        }
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn failures(r: &CheckReport, names: &[&str]) -> Vec<String> {
    r.conclusions
        .iter()
        .filter(|c| names.iter().any(|n| c.name.starts_with(n)) && !c.holds)
        .map(|c| format!("{} {}: {} (lhs {:.3e}, rhs {:.3e})", r.instance, c.name, c.gap, c.lhs, c.rhs))
        .collect()
}

fn orbit_matches(x: &[C64], target: &[f64]) -> bool {
    let dot: f64 = x.iter().zip(target).map(|(a, b)| a.re * b).sum();
    (dot.abs() - 1.0).abs() < 1e-6
}

fn criterion_1(cfg: &Config, pool: &mut Pool) -> Outcome {
    let start = Instant::now();
    let g = golden_counterexample();
    let target = 5f64.sqrt() / 2.0;
    let mut d = Vec::new();
    let norm = tuple_norm(&g.t, cfg).value;
    d.push(format!("norm {norm:.12}"));
    let bj = bj_orthogonal(&g.t, &g.s, cfg).expect("golden bj");
    d.push(format!("dist {:.12}", bj.distance.value));
    let mut pass = close(norm, target, 1e-6) && close(bj.distance.value, target, 1e-6);
    for i in 0..2 {
        let r = distance_to_line(g.t.component(i), g.s.component(i), cfg);
        let z = r.minimizer_z.z[0];
        d.push(format!("dist(T{},S{})^2 {:.12}, z {:.9}", i + 1, i + 1, r.value * r.value, z.re));
        pass &= close(r.value * r.value, 0.625, 1e-6) && close(z.re, -0.5, 1e-5) && z.im == 0.0;
    }
    for (i, target) in [[0.0, 1.0], [1.0, 0.0]].iter().enumerate() {
        let m = attainment_set(&OperatorTuple::single(g.t.component(i).clone()), cfg);
        let ok = m.orbits() == 1 && orbit_matches(m.representatives[0].entries(), target);
        d.push(format!("M_T{} orbits {} matches ±{:?}: {ok}", i + 1, m.orbits(), target));
        pass &= ok;
    }
    let joint = joint_attainment_check(&g.t, cfg);
    d.push(format!("joint attainment {} (margin {:.3e})", joint.nonempty, joint.margin));
    pass &= !joint.nonempty;
    pool.offer(&g, bj);
    let elapsed = start.elapsed();
    d.push(format!("runtime {:.2}s (limit 5s)", elapsed.as_secs_f64()));
    pass &= elapsed < Duration::from_secs(5);
    Outcome { id: 1, title: "golden counterexample", pass, details: d, elapsed }
}

fn criterion_2(cfg: &Config, pool: &mut Pool) -> Outcome {
    let start = Instant::now();
    let generic = cfg.generic();
    let ps = [1.0, 2.0, 3.0, f64::INFINITY];
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for k in 0..200u64 {
        let mut r = rng(0xC2 ^ (k << 8));
        let dim = r.gen_range(1..=4);
        let d = r.gen_range(2..=3);
        let inst = gen_random(dim, d, ps[(k % 4) as usize], Exponent::Infinity, Field::Real, 0xC2_0000 + k).unwrap();
        let decision = bj_orthogonal(&inst.t, &inst.s, &generic).unwrap();
        let formula = inst
            .t
            .components()
            .iter()
            .zip(inst.s.components())
            .map(|(a, b)| distance_to_line(a, b, cfg).value)
            .fold(0.0, f64::max);
        let gap = (decision.distance.value - formula).abs();
        worst = worst.max(gap);
        if gap > 1e-5 {
            bad.push(format!("{}: generic {:.9} vs formula {:.9}", inst.label(), decision.distance.value, formula));
        }
        pool.offer(&inst, decision);
    }
    let elapsed = start.elapsed();
    let mut d = vec![
        format!("200 instances, worst |generic − max formula| = {worst:.3e} (tol 1e-5)"),
        format!("runtime {:.1}s (limit 120s)", elapsed.as_secs_f64()),
    ];
    let pass = bad.is_empty() && elapsed < Duration::from_secs(120);
    d.extend(bad);
    Outcome { id: 2, title: "sup-norm max formula", pass, details: d, elapsed }
}

fn example_instances() -> Vec<Instance> {
    let outers = [Exponent::One, Exponent::TWO, Exponent::new(3.0).unwrap()];
    let mut out = Vec::new();
    for i in 0..50usize {
        let opts = GenOptions {
            domain_p: [2.0, 3.0, 1.5][i % 3],
            codomain_p: [2.0, 1.5, 3.0, 4.0][(i / 3) % 4],
            outer: outers[i % 3],
            field: Field::Real,
        };
        out.push(gen_example_a_with(2 + i % 3, 1 + (i / 2) % 3, 0xA000 + i as u64, &opts).unwrap());
    }
    for i in 0..50usize {
        let opts = GenOptions {
            domain_p: [3.0, 1.5, 2.0, 4.0][i % 4],
            codomain_p: 0.0,
            outer: outers[(i / 4) % 3],
            field: if i % 5 == 4 { Field::Complex } else { Field::Real },
        };
        out.push(gen_example_b_with(2 + i % 3, 1 + (i / 3) % 3, 0xB000 + i as u64, &opts).unwrap());
    }
    out
}

fn outer_p(t: &OperatorTuple) -> f64 {
    if t.d() == 1 {
        1.0
    } else {
        t.outer().value()
    }
}

fn criterion_3(cfg: &Config, examples: &[Instance], pool: &mut Pool) -> Outcome {
    let start = Instant::now();
    let settings = CheckSettings::default();
    let mut bad = Vec::new();
    let mut worst_b: f64 = 0.0;
    let mut not_applicable = 0;
    for inst in examples {
        let r = run_check(TheoremId::SumDistance, inst, cfg, &settings).unwrap();
        if r.status == Status::Vacuous {
            not_applicable += 1;
            bad.push(format!("{}: hypotheses unmet", inst.label()));
        }
        bad.extend(failures(&r, &["sum_identity", "component_distance"]));
        if inst.meta.generator == "example_b" {
            let dist = distance_to_diagonal_subspace(&inst.t, &inst.s, cfg).unwrap().value;
            let gap = (dist.powf(outer_p(&inst.t)) - inst.t.d() as f64).abs();
            worst_b = worst_b.max(gap);
            if gap > 1e-6 {
                bad.push(format!("{}: dist^p = {:.9}, d = {}", inst.label(), dist.powf(outer_p(&inst.t)), inst.t.d()));
            }
        }
        pool.offer(inst, bj_orthogonal(&inst.t, &inst.s, cfg).unwrap());
    }
    let mut d = vec![
        format!("{} instances, {} with unmet hypotheses", examples.len(), not_applicable),
        format!("worst |dist^p − d| on the diagonal family {worst_b:.3e} (tol 1e-6)"),
    ];
    let pass = bad.is_empty();
    d.extend(bad);
    Outcome { id: 3, title: "sum-distance identity", pass, details: d, elapsed: start.elapsed() }
}

fn criterion_4(cfg: &Config, pool: &mut Pool) -> Outcome {
    let start = Instant::now();
    let settings = CheckSettings::default();
    let mut bad = Vec::new();
    let (mut equal, mut orth) = (0, 0);
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let p = [2.0, 3.0][(k % 2) as usize];
        let d = 2 + (k / 2 % 2) as usize;
        let equal_norms = k % 4 < 2 || k % 7 == 0;
        let inst = gen_functionals(3, d, p, 0x4000 + k, equal_norms).unwrap();
        let r = run_check(TheoremId::KernelDistance, &inst, cfg, &settings).unwrap();
        let c = r.conclusion("kernel_formula").unwrap();
        worst = worst.max(c.gap);
        bad.extend(failures(&r, &["kernel_formula"]));
        if r.hypotheses.iter().any(|h| h.name == "equal_norms" && h.satisfied) {
            equal += 1;
            bad.extend(failures(&r, &["equal_norm_biconditional"]));
        }
        let decision = bj_orthogonal(&inst.t, &inst.s, &cfg.generic()).unwrap();
        orth += usize::from(decision.orthogonal);
        pool.offer(&inst, decision);
    }
    let mut d = vec![
        format!("100 instances on ℓ_2^3 and ℓ_3^3, worst kernel-vs-generic gap {worst:.3e} (tol 1e-5)"),
        format!("{equal} equal-norm instances checked for the biconditional, {orth} orthogonal"),
    ];
    let pass = bad.is_empty();
    d.extend(bad);
    Outcome { id: 4, title: "kernel restriction formula", pass, details: d, elapsed: start.elapsed() }
}

fn track(g: &GateauxPair, calls: &mut usize, broken: &mut Vec<String>, label: &str) {
    *calls += 1;
    if !g.ordered() || !g.monotone {
        broken.push(format!("{label}: ordered {} monotone {}", g.ordered(), g.monotone));
    }
}

fn criterion_5(cfg: &Config, examples: &[Instance]) -> Outcome {
    let start = Instant::now();
    let settings = CheckSettings::default();
    let mut calls = 0;
    let mut broken = Vec::new();
    let mut infty_bad = Vec::new();
    let mut worst_infty: f64 = 0.0;
    for k in 0..200u64 {
        let mut r = rng(0xC5 ^ (k << 8));
        let inst = gen_random(r.gen_range(2..=3), r.gen_range(2..=3), [1.0, 2.0, 3.0, f64::INFINITY][(k % 4) as usize], Exponent::Infinity, Field::Real, 0x5000 + k).unwrap();
        let rep = run_check(TheoremId::RhoInfty, &inst, cfg, &settings).unwrap();
        for name in ["rho_plus", "rho_minus"] {
            worst_infty = worst_infty.max(rep.conclusion(name).unwrap().gap);
        }
        infty_bad.extend(failures(&rep, &["rho_plus", "rho_minus"]));
        calls += 2;
        broken.extend(failures(&rep, &["tuple_", "formula_"]));
    }

    let mut native_bad = Vec::new();
    let mut flipped_bad = Vec::new();
    let mut weighted_bad = Vec::new();
    let mut joint_instances = 0;
    for inst in examples.iter().filter(|i| i.t.d() > 1) {
        if !joint_attainment_check(&inst.t, cfg).nonempty {
            continue;
        }
        joint_instances += 1;
        let directions = [
            ("native", inst.s.clone()),
            ("+T", inst.t.clone()),
            ("-T", inst.t.scaled(C64::new(-1.0, 0.0))),
        ];
        for (name, s) in directions {
            let case = inst.with_direction(s).unwrap();
            let rep = run_check(TheoremId::RhoSandwich, &case, cfg, &settings).unwrap();
            calls += 1 + case.t.d();
            broken.extend(failures(&rep, &["tuple_", "component_"]));
            let label = format!("{} ({name}, outer p = {})", case.label(), outer_p(&case.t));
            let miss: Vec<String> = ["lower_bound", "upper_bound"]
                .iter()
                .filter_map(|n| rep.conclusion(n).filter(|c| !c.holds).map(|c| format!("{label} {n} by {:.3e}", c.gap)))
                .collect();
            if name == "native" {
                native_bad.extend(miss);
            } else {
                flipped_bad.extend(miss);
            }
            weighted_bad.extend(failures(&rep, &["weighted_"]));
        }
    }
    let g = golden_counterexample();
    let gp = rho_operator(&g.t, &g.s, cfg).unwrap();
    track(&gp, &mut calls, &mut broken, "golden");

    let mut d = vec![
        format!("{calls} derivative evaluations, {} with ρ− > ρ+ or non-monotone quotients", broken.len()),
        format!("sup-norm component formula vs quotients on 200 instances: worst gap {worst_infty:.3e} (tol 1e-4), {} misses", infty_bad.len()),
        format!(
            "component-sum bracket on {joint_instances} joint-attainment tuples: native directions {} misses, ±𝒯 directions {} misses",
            native_bad.len(),
            flipped_bad.len()
        ),
        format!("Hölder-weighted bracket (reported only): {} misses", weighted_bad.len()),
    ];
    let pass = broken.is_empty() && infty_bad.is_empty() && native_bad.is_empty() && flipped_bad.is_empty();
    d.extend(broken.into_iter().take(5));
    d.extend(infty_bad.into_iter().take(5));
    d.extend(native_bad.into_iter().take(5));
    d.extend(flipped_bad.into_iter().take(8));
    Outcome { id: 5, title: "one-sided derivatives", pass, details: d, elapsed: start.elapsed() }
}

fn criterion_6(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let ps = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
    let outers = [Exponent::One, Exponent::TWO, Exponent::Infinity];
    let mut bad = Vec::new();
    let (mut worst_norm, mut worst_dist): (f64, f64) = (0.0, 0.0);
    for k in 0..200u64 {
        let mut r = rng(0xC6 ^ (k << 8));
        let dim = 2 + (k % 2) as usize;
        let domain = LpSpace::real(dim, ps[r.gen_range(0..ps.len())]).unwrap();
        let d = if k % 4 == 0 { 1 } else { 1 + r.gen_range(1..=(if dim == 2 { 3 } else { 2 })) };
        let mut ts = Vec::new();
        let mut ss = Vec::new();
        for _ in 0..d {
            let rows = r.gen_range(1..=3);
            let q = ps[r.gen_range(0..ps.len())];
            ts.push(random_real_operator(&mut r, rows, domain, q));
            let s = random_real_operator(&mut r, rows, domain, q);
            ss.push(s);
        }
        let outer = outers[r.gen_range(0..outers.len())];
        let t = OperatorTuple::new(ts, outer).unwrap();
        let s = OperatorTuple::new(ss, outer).unwrap();
        let norm = if d == 1 { operator_norm(t.component(0), cfg).value } else { tuple_norm(&t, cfg).value };
        let oracle = brute_norm(&t);
        worst_norm = worst_norm.max((norm - oracle).abs());
        if (norm - oracle).abs() > 1e-5 {
            bad.push(format!("instance {k}: norm {norm:.9} vs oracle {oracle:.9}"));
        }
        let r = distance_to_diagonal_subspace(&t, &s, cfg).unwrap();
        let dist = r.value;
        let z0: Vec<f64> = r.minimizer_z.z.iter().map(|c| c.re).collect();
        let at_z = brute_at(&t, &s, &z0);
        let lower = distance_lower_bound(&t, &s, &z0, dist, 1e-6, 150);
        let gap = (dist - at_z).abs().max(dist - lower);
        worst_dist = worst_dist.max(gap);
        if gap > 1e-5 {
            bad.push(format!(
                "instance {k} (dim {dim}, d {d}): dist {dist:.9}, oracle at our z {at_z:.9}, oracle lower bound {lower:.9}"
            ));
        }
    }
    let mut d = vec![
        format!("200 instances, worst norm gap {worst_norm:.3e}, worst distance gap {worst_dist:.3e} (tol 1e-5)"),
        "distance oracle: brute-force norm at our minimizer, and a cutting-plane lower bound from brute-force maximizers".into(),
    ];
    let pass = bad.is_empty();
    d.extend(bad);
    Outcome { id: 6, title: "brute-force oracle agreement", pass, details: d, elapsed: start.elapsed() }
}

fn criterion_7(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let mut d = Vec::new();
    let inst = diagonal_smoothness_example(3.0, 3).unwrap();
    let mut pass = true;
    let mut later = true;
    for (i, c) in inst.t.components().iter().enumerate() {
        let r = smoothness_of_operator(&OperatorTuple::single(c.clone()), cfg).unwrap();
        d.push(format!("T{} smooth {} with {} orbits", i + 1, r.smooth, r.attainment_orbits));
        pass &= !r.smooth && r.attainment_orbits > 1;
        if i > 0 {
            later &= !r.smooth;
        }
    }
    d.push(format!("components after the first all non-smooth: {later}"));
    let r = smoothness_of_operator(&inst.t, cfg).unwrap();
    let e1 = r.witness.as_ref().is_some_and(|w| orbit_matches(w.entries(), &[1.0, 0.0, 0.0]));
    d.push(format!("tuple smooth {} with {} orbit(s), witness ±e1 {e1}", r.smooth, r.attainment_orbits));
    pass &= r.smooth && r.attainment_orbits == 1 && e1;

    let mut all = 0;
    for k in 0..5u64 {
        let opts = GenOptions { domain_p: 2.0, codomain_p: 2.0, outer: Exponent::TWO, field: Field::Real };
        let inst = gen_example_a_with(3, 3, 0x7000 + k, &opts).unwrap();
        let comps = inst
            .t
            .components()
            .iter()
            .all(|c| smoothness_of_operator(&OperatorTuple::single(c.clone()), cfg).unwrap().smooth);
        let tuple = smoothness_of_operator(&inst.t, cfg).unwrap().smooth;
        all += usize::from(comps && tuple);
    }
    d.push(format!("ℓ_2-domain generated tuples with smooth components and smooth tuple: {all}/5"));
    pass &= all == 5;
    Outcome { id: 7, title: "smoothness classification", pass, details: d, elapsed: start.elapsed() }
}

fn criterion_8(cfg: &Config, pool: &Pool) -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    let mut max_h = 0;
    for (label, t, s, decision) in &pool.orthogonal {
        let Some(c) = &decision.certificate else {
            bad.push(format!("{label}: no certificate ({})", decision.certificate_error.clone().unwrap_or_default()));
            continue;
        };
        let check = c.verify(t, s, cfg);
        let limit = (t.d() * t.field().real_dim()) + 1;
        let ind = certificate_residuals(c, t, s);
        let residual = ind.annihilation.max(ind.weight_sum);
        worst = worst.max(residual);
        max_h = max_h.max(c.h);
        if !check.valid {
            bad.push(format!("{label}: invariants fail: {:?}", check.failures));
        }
        if c.h > limit || c.entries.len() != c.h {
            bad.push(format!("{label}: h = {} exceeds {limit}", c.h));
        }
        if residual > 1e-8 || ind.min_weight < 0.0 {
            bad.push(format!("{label}: independent residual {residual:.3e}, min weight {:.3e}", ind.min_weight));
        }
        if ind.norming > cfg.tau_cert || ind.units > cfg.tau_cert {
            bad.push(format!("{label}: norming error {:.3e}, unit error {:.3e}", ind.norming, ind.units));
        }
    }
    let mut d = vec![format!(
        "{} orthogonal instances, largest h {max_h}, worst independent residual {worst:.3e} (tol 1e-8)",
        pool.orthogonal.len()
    )];
    let pass = bad.is_empty() && !pool.orthogonal.is_empty();
    d.extend(bad);
    Outcome { id: 8, title: "Singer certificates", pass, details: d, elapsed: start.elapsed() }
}

fn main() {
    let cfg = Config::default();
    let mut pool = Pool::default();
    let examples = example_instances();
    let run = std::env::args().skip(1).find_map(|a| a.parse::<u8>().ok());
    let wanted = |id: u8| run.is_none_or(|r| r == id);
    let mut outcomes = Vec::new();
    if wanted(1) || wanted(8) {
        outcomes.push(criterion_1(&cfg, &mut pool));
    }
    if wanted(2) || wanted(8) {
        outcomes.push(criterion_2(&cfg, &mut pool));
    }
    if wanted(3) || wanted(8) {
        outcomes.push(criterion_3(&cfg, &examples, &mut pool));
    }
    if wanted(4) || wanted(8) {
        outcomes.push(criterion_4(&cfg, &mut pool));
    }
    if wanted(5) {
        outcomes.push(criterion_5(&cfg, &examples));
    }
    if wanted(6) {
        outcomes.push(criterion_6(&cfg));
    }
    if wanted(7) {
        outcomes.push(criterion_7(&cfg));
    }
    if wanted(8) {
        outcomes.push(criterion_8(&cfg, &pool));
    }
    outcomes.retain(|o| wanted(o.id));

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let expected_fail = EXPECTED_FAILURES.contains(&o.id);
        println!(
            "{} criterion {}: {} [{:.1}s]{}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.elapsed.as_secs_f64(),
            if expected_fail && !o.pass { " (expected failure)" } else { "" }
        );
        for line in &o.details {
            println!("    {line}");
        }
        if o.pass == expected_fail {
            unexpected.push(o.id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
