//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fail.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rwmp::classical::{
    build_mean_system, direct_solve, jacobi_gs_embedding_check, mean_sweep_equivalence_check,
};
use rwmp::covers::{
    adversarial_two_cover, bipartite_half_step, fiber_messages, kronecker_double_cover,
    lift_parameters, lift_state,
};
use rwmp::diagnostics::{
    adversarial_witness, build_computation_tree, exact_tree_elimination, find_uniform_r,
    positive_definite_check, walk_summability, WALK_TOL,
};
use rwmp::engine::{beliefs, run, sync_step, Curvature, MessageState, Schedule};
use rwmp::experiments::{
    c_grid, four_chord, pd_triangle, random_four, sweep_c, SweepRecord, VARIANCE_ONLY_P,
};
use rwmp::{Matrix, Model, Params, Report};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn random_model(rng: &mut ChaCha8Rng, n: usize) -> Model {
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = rng.gen_range(0.5..2.0);
        for j in i + 1..n {
            let v = rng.gen_range(-1.0..1.0);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let h = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Model::new(g, h).unwrap()
}

fn corpus() -> Vec<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = vec![four_chord(0.4), random_four()];
    out.extend((0..20).map(|_| random_model(&mut rng, 5)));
    out
}

/// Runs tightly enough that the mean-system residual can be checked too.
const RUN_TOL: f64 = 1e-10;
const MAX_ITER: usize = 10_000;

fn converges_to_truth(m: &Model, c: f64, schedule: &Schedule<f64>) -> Result<Report, String> {
    let params = Params::uniform(m, c).map_err(|e| e.to_string())?;
    let rep = run(m, &params, schedule, RUN_TOL, MAX_ITER).map_err(|e| e.to_string())?;
    let truth = direct_solve(m).map_err(|e| e.to_string())?;
    let means = rep.final_means().ok_or("beliefs not decodable")?;
    check(
        rep.converged,
        format!("no convergence after {} iterations", rep.iterations),
    )?;
    let err = max_err(&means, &truth);
    check(err <= 1e-6, format!("error {err:e} vs direct solve"))?;
    Ok(rep)
}

fn mean_system_ok(m: &Model, c: f64, rep: &Report) -> Result<f64, String> {
    let params = Params::uniform(m, c).unwrap();
    let sys = build_mean_system(m, &params, &rep.final_state).map_err(|e| e.to_string())?;
    let r = sys.residual(&rep.final_state.b);
    check(r <= 1e-8, format!("|Mb* - d| = {r:e}"))?;
    Ok(r)
}

fn c1_min_sum_threshold() -> Outcome {
    for p in [0.30, 0.39] {
        converges_to_truth(&four_chord(p), 1.0, &Schedule::Synchronous)
            .map_err(|e| format!("p={p}: {e}"))?;
    }
    let m = four_chord(0.40);
    let rep = run(
        &m,
        &Params::min_sum(&m),
        &Schedule::Synchronous,
        1e-6,
        MAX_ITER,
    )
    .unwrap();
    check(!rep.converged, "p=0.40 converged")?;
    Ok(format!(
        "p=0.40 stopped after {} iterations (unbounded: {})",
        rep.iterations, rep.unbounded
    ))
}

fn reweighted_runs_c2() -> Result<Vec<(Model, Report)>, String> {
    let mut out = Vec::new();
    for p in [0.3, 0.398, 0.4] {
        let m = four_chord(p);
        for schedule in [Schedule::Synchronous, Schedule::asynchronous(4)] {
            let rep = converges_to_truth(&m, 2.0, &schedule)
                .map_err(|e| format!("p={p} {schedule:?}: {e}"))?;
            out.push((m.clone(), rep));
        }
    }
    Ok(out)
}

fn c2_reweighted() -> Outcome {
    let runs = reweighted_runs_c2()?;
    let worst = runs.iter().map(|(_, r)| r.iterations).max().unwrap();
    Ok(format!("6 runs, at most {worst} iterations"))
}

fn wide_range_runs() -> Result<Vec<(Model, Report)>, String> {
    let mut out = Vec::new();
    for k in -49..=49 {
        let p = k as f64 / 100.0;
        let m = four_chord(p);
        for schedule in [Schedule::Synchronous, Schedule::asynchronous(4)] {
            let rep = converges_to_truth(&m, 3.0, &schedule)
                .map_err(|e| format!("p={p} {schedule:?}: {e}"))?;
            out.push((m.clone(), rep));
        }
    }
    Ok(out)
}

fn c3_wide_range() -> Outcome {
    let start = Instant::now();
    let runs = wide_range_runs()?;
    let secs = start.elapsed().as_secs_f64();
    check(secs < 120.0, format!("took {secs:.1}s"))?;
    Ok(format!("{} runs in {secs:.1}s", runs.len()))
}

fn c4_cover_witness() -> Outcome {
    let m: Model = pd_triangle();
    let (pd, l) = positive_definite_check(&m);
    check(pd && (l - 0.4).abs() <= 1e-8, format!("lambda_min {l}"))?;
    let w = walk_summability(&m, WALK_TOL).unwrap();
    check(
        !w.is_walk_summable() && (w.rho - 1.2).abs() <= 1e-8,
        format!("rho {}", w.rho),
    )?;
    let cover = adversarial_two_cover(&m);
    let lc = rwmp::dense::min_eigenvalue(cover.model().gamma());
    check(lc <= -0.2 + 1e-6, format!("cover lambda_min {lc}"))?;
    let z = adversarial_witness(&m).unwrap();
    let q = cover.model().gamma().quadratic_form(&z);
    check((q - (1.0 - w.rho)).abs() <= 1e-8, format!("z'Gz = {q}"))?;
    Ok(format!(
        "lambda_min={l:.10}, rho={:.10}, cover lambda_min={lc:.6}",
        w.rho
    ))
}

fn monotone_iterations(
    m: &Model,
    c: &Params,
    steps: usize,
    mut check_state: impl FnMut(&MessageState<f64>, &MessageState<f64>) -> bool,
) -> bool {
    let mut s = MessageState::zeros(m);
    for _ in 0..steps {
        let next = sync_step(&s, m, c);
        if !check_state(&s, &next) {
            return false;
        }
        s = next;
    }
    true
}

fn c5_monotone() -> Outcome {
    let mut models = vec![four_chord(0.4)];
    models.extend(corpus().into_iter().skip(2));
    for (idx, m) in models.iter().enumerate() {
        let c = Params::uniform(m, 2.0).unwrap();
        let ok = monotone_iterations(m, &c, 1000, |old, new| {
            new.a
                .iter()
                .zip(&old.a)
                .all(|(n, o)| n <= o && *n <= Curvature::Finite(0.0))
        });
        check(ok, format!("model {idx} violated a^t <= a^(t-1) <= 0"))?;
    }
    Ok(format!("{} models, 1000 sync steps each", models.len()))
}

fn c6_negative_c() -> Outcome {
    let models = corpus();
    for (idx, m) in models.iter().enumerate() {
        let c = Params::uniform(m, -1.0).unwrap();
        let ok = monotone_iterations(m, &c, 1000, |_, new| {
            let b = beliefs(new, m, &c);
            new.a
                .iter()
                .all(|a| matches!(a, Curvature::Finite(v) if *v <= 0.0))
                && (0..m.n())
                    .all(|i| matches!(b.curvature[i], Curvature::Finite(v) if v >= m.diag(i)))
        });
        check(ok, format!("model {idx} violated a <= 0 or A_i >= G_ii"))?;
    }
    Ok(format!("{} models, 1000 sync steps each", models.len()))
}

fn c7_tree_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut compared = 0;
    for _ in 0..5 {
        let m = random_model(&mut rng, 4);
        for cval in [1.0, 2.0, -1.0] {
            let c = Params::uniform(&m, cval).unwrap();
            let mut s = MessageState::zeros(&m);
            for depth in 0..=6 {
                let b = beliefs(&s, &m, &c);
                for root in 0..4 {
                    let sol = exact_tree_elimination(&build_computation_tree(&m, &c, root, depth));
                    let close = |x: f64, y: f64| (x - y).abs() <= 1e-10 * x.abs().max(1.0);
                    let ok = match (b.curvature[root], sol.curvature) {
                        (Curvature::Finite(x), Curvature::Finite(y)) => {
                            close(x, y) && close(b.linear[root], sol.linear)
                        }
                        (Curvature::Unbounded, Curvature::Unbounded) => true,
                        _ => false,
                    };
                    check(
                        ok,
                        format!(
                            "c={cval} depth={depth} root={root}: {:?} vs {:?}",
                            b.curvature[root], sol.curvature
                        ),
                    )?;
                    compared += 1;
                }
                s = sync_step(&s, &m, &c);
            }
        }
    }
    Ok(format!("{compared} root marginals compared"))
}

fn c8_kronecker_bridge() -> Outcome {
    let m = four_chord(0.4);
    let c = Params::uniform(&m, 2.0).unwrap();
    let cover = kronecker_double_cover(&m);
    let cc = lift_parameters(&c, &cover).unwrap();
    let mut base = vec![MessageState::zeros(&m)];
    for _ in 0..40 {
        let next = sync_step(base.last().unwrap(), &m, &c);
        base.push(next);
    }
    let mut h = lift_state(&MessageState::zeros(&m), &cover).unwrap();
    let diff = |x: &MessageState<f64>, y: &MessageState<f64>| x.sup_change(y);
    let mut worst: f64 = 0.0;
    for t in 1..=20 {
        bipartite_half_step(&mut h, &cover, &cc, 0);
        let (p0, p1) = (
            fiber_messages(&h, &cover, 0).unwrap(),
            fiber_messages(&h, &cover, 1).unwrap(),
        );
        worst = worst
            .max(diff(&p0, &base[2 * t - 1]))
            .max(diff(&p1, &base[2 * t - 2]));
        bipartite_half_step(&mut h, &cover, &cc, 1);
        let p1 = fiber_messages(&h, &cover, 1).unwrap();
        worst = worst.max(diff(&p1, &base[2 * t]));
    }
    check(worst <= 1e-12, format!("max deviation {worst:e}"))?;
    Ok(format!("t <= 20, max deviation {worst:e}"))
}

fn c9_jacobi_embedding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut models: Vec<Model> = (0..10).map(|_| random_model(&mut rng, 4)).collect();
    models.push(four_chord(0.4));
    let mut worst: f64 = 0.0;
    for m in &models {
        let x0: Vec<f64> = (0..m.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = jacobi_gs_embedding_check(m, &x0, 10).map_err(|e| e.to_string())?;
        check(a.holds, format!("deviation {:e}", a.max_deviation))?;
        worst = worst.max(a.max_deviation);
    }
    Ok(format!(
        "{} models, t <= 10, max relative deviation {worst:e}",
        models.len()
    ))
}

fn c10_mean_system() -> Outcome {
    let mut runs = reweighted_runs_c2()?
        .into_iter()
        .map(|(m, r)| (m, 2.0, r))
        .collect::<Vec<_>>();
    runs.extend(wide_range_runs()?.into_iter().map(|(m, r)| (m, 3.0, r)));
    let mut worst: f64 = 0.0;
    for (m, c, rep) in &runs {
        worst = worst.max(mean_system_ok(m, *c, rep)?);
    }
    // one asynchronous b-sweep from zero b against one Gauss-Seidel sweep
    let (m, c, rep) = &runs[1];
    let params = Params::uniform(m, *c).unwrap();
    let mut start = rep.final_state.clone();
    start.b.iter_mut().for_each(|b| *b = 0.0);
    let order: Vec<usize> = (0..m.n()).collect();
    let a = mean_sweep_equivalence_check(m, &params, &rep.final_state, &start, &order)
        .map_err(|e| e.to_string())?;
    check(a.holds, format!("sweep deviation {:e}", a.max_deviation))?;
    Ok(format!(
        "{} runs, max |Mb*-d| {worst:e}, sweep deviation {:e}",
        runs.len(),
        a.max_deviation
    ))
}

fn c11_certificate() -> Outcome {
    let start = Instant::now();
    let cases = [
        ("triangle", pd_triangle()),
        ("chord 0.45", four_chord(0.45)),
        ("random four", random_four()),
        ("chord 0.39866", four_chord(VARIANCE_ONLY_P)),
    ];
    let mut found = Vec::new();
    for (name, m) in &cases {
        let cert = find_uniform_r(m, 1024.0).ok_or(format!("{name}: no r found"))?;
        let c = Params::uniform(m, cert.r).unwrap();
        for root in 0..m.n() {
            for depth in 0..=8 {
                let l = build_computation_tree(m, &c, root, depth).lambda_min();
                check(
                    l > 0.0,
                    format!("{name}: root {root} depth {depth} lambda_min {l}"),
                )?;
            }
        }
        found.push(format!("{name} r={}", cert.r));
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!("{} in {secs:.1}s", found.join(", ")))
}

fn c12_variances_without_means() -> Outcome {
    let m = four_chord(VARIANCE_ONLY_P);
    let rep = run(
        &m,
        &Params::min_sum(&m),
        &Schedule::Synchronous,
        1e-6,
        MAX_ITER,
    )
    .unwrap();
    let a_res = *rep.a_residual_history.last().unwrap();
    check(!rep.converged, "means converged")?;
    check(a_res < 1e-10, format!("a residual {a_res:e}"))?;
    Ok(format!(
        "a residual {a_res:e}, mean change {:e}",
        rep.last_residual().unwrap()
    ))
}

fn c13_small_c() -> Outcome {
    let m = four_chord(0.4);
    let c = Params::uniform(&m, 0.3).unwrap();
    for schedule in [Schedule::Synchronous, Schedule::asynchronous(4)] {
        let rep = run(&m, &c, &schedule, 1e-6, MAX_ITER).unwrap();
        check(
            !(rep.converged && rep.final_beliefs.is_decodable()),
            format!("{schedule:?} converged"),
        )?;
    }
    Ok("no decodable fixed point reached".into())
}

/// Non-convergent grid points form one contiguous run containing `must`
/// (when given) and both grid extremes converge.
fn band(
    records: &[SweepRecord],
    pick: impl Fn(&SweepRecord) -> Option<usize>,
    must: Option<f64>,
) -> Result<String, String> {
    let bad: Vec<usize> = (0..records.len())
        .filter(|&i| pick(&records[i]).is_none())
        .collect();
    check(!bad.is_empty(), "no gap")?;
    check(
        bad.windows(2).all(|w| w[1] == w[0] + 1),
        "gap not contiguous",
    )?;
    let (lo, hi) = (records[bad[0]].c, records[*bad.last().unwrap()].c);
    if let Some(c) = must {
        check(lo <= c && c <= hi, format!("gap [{lo}, {hi}] misses c={c}"))?;
    }
    check(
        pick(&records[0]).is_some() && pick(records.last().unwrap()).is_some(),
        "grid extremes did not converge",
    )?;
    Ok(format!("[{lo}, {hi}]"))
}

fn c14_sweep_gap() -> Outcome {
    let start = Instant::now();
    let chord = sweep_c(
        &four_chord(0.4),
        &c_grid(-3.0, 3.0, 0.1).unwrap(),
        1e-6,
        MAX_ITER,
    );
    let s = band(&chord, |r| r.sync_iters, Some(1.0)).map_err(|e| format!("chord sync: {e}"))?;
    let a = band(&chord, |r| r.async_iters, Some(1.0)).map_err(|e| format!("chord async: {e}"))?;
    let rnd = sweep_c(
        &random_four(),
        &c_grid(-5.0, 5.0, 0.1).unwrap(),
        1e-6,
        MAX_ITER,
    );
    let r = band(&rnd, |r| r.async_iters, None).map_err(|e| format!("random four async: {e}"))?;
    let sync_any = rnd.iter().any(|r| r.sync_iters.is_some());
    let secs = start.elapsed().as_secs_f64();
    check(secs < 300.0, format!("took {secs:.1}s"))?;
    Ok(format!(
        "chord gaps sync {s} async {a}; random four async gap {r}, sync converged anywhere: {sync_any}; {secs:.1}s"
    ))
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("min-sum threshold", c1_min_sum_threshold),
        ("reweighted convergence c=2", c2_reweighted),
        ("wide-range convergence c=3", c3_wide_range),
        ("2-cover witness", c4_cover_witness),
        ("variance monotonicity", c5_monotone),
        ("negative-c positivity", c6_negative_c),
        ("tree/engine equivalence", c7_tree_equivalence),
        ("Kronecker bridge", c8_kronecker_bridge),
        ("Jacobi/Gauss-Seidel embedding", c9_jacobi_embedding),
        ("mean system", c10_mean_system),
        ("certificate soundness", c11_certificate),
        ("variances without means", c12_variances_without_means),
        ("small-c probe", c13_small_c),
        ("sweep gap", c14_sweep_gap),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
