//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng as _;

use ptc_forge::cli::execute_search;
use ptc_forge::cost::{cd_ee, layout_crossing_array};
use ptc_forge::device::mmi_transfer;
use ptc_forge::evolution::{
    crossover_blocks, crossover_cr, crossover_dc, dc_applicable, cr_applicable, block_applicable, mutate_blocks,
    mutate_cr, mutate_dc, random_gene, MutationOp, SearchSpace,
};
use ptc_forge::linalg::C64;
use ptc_forge::pdk::Pdk;
use ptc_forge::proxy::{
    accuracy_score, loss, phase_gradients, random_phases, spearman, Batch, ProxyConfig, ProxyWeights, Readout,
    ScoreBundle,
};
use ptc_forge::rng::{seeded, Rng};
use ptc_forge::search::{
    default_baselines, equal_budget, hypervolume, nondominated_sort, objective_points, random_search, run_search,
    select_survivors, shared_reference, SearchConfig,
};
use ptc_forge::topology::{count_crossings, Gene};

type Outcome = Result<String, String>;

fn space(k: usize, pdk: &Pdk) -> SearchSpace {
    let (lo, hi) = SearchSpace::default_block_range(k);
    SearchSpace::new(k, lo, hi, SearchSpace::default_ports(k, pdk), pdk).expect("default space")
}

// (K, design, optical area, electrical area, power mW, latency ps, CD, EE, AEE)
const TABLE: [(usize, &str, f64, f64, f64, f64, f64, f64, f64); 21] = [
    (8, "MZI", 3.79, 8.18, 141.09, 100.69, 0.106, 9.010, 0.753),
    (8, "Butterfly", 0.92, 8.18, 141.48, 100.00, 0.141, 9.047, 0.995),
    (8, "MMI", 3.57, 8.18, 141.45, 100.00, 0.109, 9.049, 0.770),
    (8, "a0", 0.73, 8.18, 141.92, 100.00, 0.144, 9.019, 1.012),
    (8, "a1", 0.83, 8.18, 141.32, 100.00, 0.142, 9.058, 1.005),
    (8, "a2", 0.94, 8.18, 141.98, 100.00, 0.140, 9.016, 0.988),
    (8, "a3", 1.57, 8.18, 142.74, 100.00, 0.131, 8.967, 0.920),
    (16, "MZI", 15.32, 16.36, 209.83, 147.25, 0.110, 16.570, 0.523),
    (16, "Butterfly", 2.43, 16.36, 283.15, 100.00, 0.272, 18.081, 0.962),
    (16, "MMI", 21.16, 16.36, 266.64, 107.38, 0.127, 17.883, 0.477),
    (16, "a0", 2.37, 16.36, 282.19, 100.00, 0.273, 18.144, 0.969),
    (16, "a1", 2.39, 16.36, 282.20, 100.00, 0.273, 18.143, 0.968),
    (16, "a2", 3.38, 16.36, 284.18, 100.00, 0.259, 18.017, 0.913),
    (16, "a3", 3.44, 16.36, 284.48, 100.00, 0.259, 17.997, 0.909),
    (32, "MZI", 61.56, 32.72, 316.34, 240.37, 0.090, 26.934, 0.286),
    (32, "Butterfly", 6.11, 32.72, 487.36, 122.13, 0.432, 34.407, 0.886),
    (32, "MMI", 142.58, 32.72, 394.52, 158.26, 0.074, 32.802, 0.187),
    (32, "a0", 5.62, 32.72, 563.50, 100.00, 0.534, 36.344, 0.948),
    (32, "a1", 6.46, 32.72, 563.52, 100.00, 0.523, 36.343, 0.928),
    (32, "a2", 8.53, 32.72, 563.69, 100.00, 0.497, 36.332, 0.881),
    (32, "a3", 9.77, 32.72, 563.71, 100.00, 0.482, 36.332, 0.855),
];

fn efficiency_arithmetic() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for &(k, name, ao, ae, p, tau, cd, ee, aee) in &TABLE {
        let e = cd_ee(ao + ae, p, tau, k).map_err(|e| e.to_string())?;
        for (label, got, want) in [("CD", e.cd, cd), ("EE", e.ee, ee), ("AEE", e.aee, aee)] {
            let rel = (got / want - 1.0).abs();
            worst = worst.max(rel);
            if rel > 0.005 {
                bad.push(format!("K={k} {name} {label} {got:.4} vs {want}"));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("63 cells, worst relative error {:.3}%", worst * 100.0))
    } else {
        Err(bad.join("; "))
    }
}

fn unitarity() -> Outcome {
    let pdk = Pdk::gf();
    let mut worst: f64 = 0.0;
    for k in [4, 8, 16, 32] {
        let s = space(k, &pdk);
        let mut rng = seeded(0xA11 + k as u64);
        for _ in 0..500 {
            let g = random_gene(&s, &mut rng);
            s.check(&g).map_err(|e| e.to_string())?;
            let t = g.decode().map_err(|e| e.to_string())?;
            let phases = random_phases(&t, &mut rng);
            let (pu, pv) = phases.split_at(t.u_blocks.len());
            for m in [t.unitary_u(pu), t.unitary_v(pv)] {
                worst = worst.max(m.map_err(|e| e.to_string())?.unitarity_error());
            }
        }
    }
    let mut mmi_worst: f64 = 0.0;
    for n in 1..=16 {
        mmi_worst = mmi_worst.max(mmi_transfer(n).map_err(|e| e.to_string())?.unitarity_error());
    }
    let msg = format!("genes worst {worst:.2e}, MMI worst {mmi_worst:.2e}");
    if worst <= 1e-9 && mmi_worst <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, k - 1);
            out.push(q);
        }
    }
    out
}

fn crossing_oracle() -> Outcome {
    let mut checked = 0;
    for k in 1..=6 {
        for p in permutations(k) {
            let brute = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let counted = count_crossings(&p).map_err(|e| e.to_string())?;
            let laid = layout_crossing_array(&p).total_swaps;
            if counted != brute || laid != brute {
                return Err(format!("{p:?}: brute {brute}, counted {counted}, layout {laid}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} permutations"))
}

const CLOSURE_TRIALS: usize = 10_000;

/// Apply `op` until it has succeeded `CLOSURE_TRIALS` times.
fn closure_of(op: MutationOp, spaces: &[SearchSpace], rng: &mut Rng) -> Result<(), String> {
    let mut done = 0;
    while done < CLOSURE_TRIALS {
        let s = &spaces[rng.gen_range(0..spaces.len())];
        let mut g = random_gene(s, rng);
        let bi = rng.gen_range(0..g.active_blocks);
        let cap = s.cap();
        if MutationOp::BLOCK.contains(&op) {
            if !block_applicable(&g, op, s) {
                continue;
            }
            g = mutate_blocks(&g, op, s, rng).map_err(|e| e.to_string())?;
        } else if MutationOp::DC.contains(&op) {
            if !dc_applicable(&g.blocks[bi].dc, op, &s.ports) {
                continue;
            }
            g.blocks[bi].dc = mutate_dc(&g.blocks[bi].dc, op, &s.ports, rng).map_err(|e| e.to_string())?;
        } else {
            if !cr_applicable(&g.blocks[bi].cr, op, cap) {
                continue;
            }
            g.blocks[bi].cr = mutate_cr(&g.blocks[bi].cr, op, cap, rng).map_err(|e| e.to_string())?;
            if op == MutationOp::AddCR && count_crossings(&g.blocks[bi].cr).unwrap() > cap {
                return Err(format!("AddCR exceeded cap {cap}"));
            }
        }
        s.check(&g).map_err(|e| format!("{op}: {e}"))?;
        done += 1;
    }
    Ok(())
}

fn crossover_closure(kind: &str, spaces: &[SearchSpace], rng: &mut Rng) -> Result<(), String> {
    for _ in 0..CLOSURE_TRIALS {
        let s = &spaces[rng.gen_range(0..spaces.len())];
        let a = random_gene(s, rng);
        let b = random_gene(s, rng);
        let (x, y): (Gene, Gene) = match kind {
            "blocks" => crossover_blocks(&a, &b, rng),
            _ => {
                let mut x = a.clone();
                let mut y = b.clone();
                let i = rng.gen_range(0..a.active_blocks.min(b.active_blocks));
                if kind == "dc" {
                    let (p, q) = crossover_dc(&a.blocks[i].dc, &b.blocks[i].dc, rng);
                    x.blocks[i].dc = p;
                    y.blocks[i].dc = q;
                } else {
                    let (p, q) = crossover_cr(&a.blocks[i].cr, &b.blocks[i].cr, s.cap(), rng);
                    x.blocks[i].cr = p;
                    y.blocks[i].cr = q;
                }
                (x, y)
            }
        };
        for c in [&x, &y] {
            s.check(c).map_err(|e| format!("{kind} crossover: {e}"))?;
        }
    }
    Ok(())
}

fn operator_closure() -> Outcome {
    let pdk = Pdk::gf();
    let spaces: Vec<SearchSpace> = [4, 8, 16].iter().map(|&k| space(k, &pdk)).collect();
    let mut rng = seeded(0xC105);
    for op in MutationOp::ALL {
        closure_of(op, &spaces, &mut rng)?;
    }
    for kind in ["dc", "cr", "blocks"] {
        crossover_closure(kind, &spaces, &mut rng)?;
    }
    Ok(format!(
        "{} operators and 3 crossovers x {CLOSURE_TRIALS}, all legal",
        MutationOp::ALL.len()
    ))
}

fn gradient_check() -> Outcome {
    let pdk = Pdk::gf();
    let mut worst: f64 = 0.0;
    for trial in 0..50u64 {
        let mut rng = seeded(0x6AD + trial);
        let k = [4, 8, 12, 16][trial as usize % 4];
        let readout = if trial % 2 == 0 { Readout::Field } else { Readout::Intensity };
        let t = random_gene(&space(k, &pdk), &mut rng).decode().map_err(|e| e.to_string())?;
        let phases = random_phases(&t, &mut rng);
        let sigma: Vec<C64> = (0..k).map(|_| C64::new(rng.gen_range(0.2..1.5), rng.gen_range(-0.5..0.5))).collect();
        let batch = Batch::gaussian(k, 4, &mut rng);
        let (_, analytic) = phase_gradients(&t, &phases, &sigma, &batch, readout).map_err(|e| e.to_string())?;
        let h = 1e-6;
        let (mut diff, mut norm) = (0.0, 0.0);
        for c in 0..phases.len() {
            for r in 0..k {
                let mut p = phases.clone();
                p[c][r] += h;
                let up = loss(&t, &p, &sigma, &batch, readout).map_err(|e| e.to_string())?;
                p[c][r] -= 2.0 * h;
                let down = loss(&t, &p, &sigma, &batch, readout).map_err(|e| e.to_string())?;
                let fd = (up - down) / (2.0 * h);
                diff += (fd - analytic[c][r]).powi(2);
                norm += fd * fd;
            }
        }
        worst = worst.max((diff / norm.max(1e-300)).sqrt());
    }
    let msg = format!("50 triples, worst relative error {worst:.2e}");
    if worst <= 1e-5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn dominates(a: &[f64; 3], b: &[f64; 3]) -> bool {
    (0..3).all(|m| a[m] >= b[m]) && (0..3).any(|m| a[m] > b[m])
}

fn brute_ranks(points: &[[f64; 3]]) -> Vec<usize> {
    let mut rank = vec![usize::MAX; points.len()];
    let mut r = 0;
    while rank.contains(&usize::MAX) {
        let layer: Vec<usize> = (0..points.len())
            .filter(|&i| rank[i] == usize::MAX)
            .filter(|&i| !(0..points.len()).any(|j| rank[j] == usize::MAX && dominates(&points[j], &points[i])))
            .collect();
        for i in layer {
            rank[i] = r;
        }
        r += 1;
    }
    rank
}

fn nsga_oracle() -> Outcome {
    let mut rng = seeded(0x45A);
    for inst in 0..100 {
        let points: Vec<[f64; 3]> = (0..200)
            .map(|_| {
                if inst % 2 == 0 {
                    [rng.gen(), rng.gen(), rng.gen()]
                } else {
                    // coarse grid for ties
                    [0, 1, 2].map(|_| rng.gen_range(0..8) as f64)
                }
            })
            .collect();
        let expect = brute_ranks(&points);
        let fronts = nondominated_sort(&points).map_err(|e| e.to_string())?;
        for (r, f) in fronts.iter().enumerate() {
            if f.iter().any(|&i| expect[i] != r) {
                return Err(format!("instance {inst}: front {r} differs"));
            }
        }
        let (chosen, rank, crowd) = select_survivors(&points, 100).map_err(|e| e.to_string())?;
        if chosen.len() != 100 || rank != expect {
            return Err(format!("instance {inst}: survivor count or ranks wrong"));
        }
        let kept: BTreeSet<usize> = chosen.iter().copied().collect();
        for &c in &chosen {
            for u in (0..points.len()).filter(|u| !kept.contains(u)) {
                let worse = rank[u] < rank[c] || (rank[u] == rank[c] && crowd[u] > crowd[c]);
                if worse {
                    return Err(format!("instance {inst}: dropped {u} outranks kept {c}"));
                }
            }
        }
    }
    Ok("100 instances of n=200, fronts and survivor audit agree".into())
}

const SEEDS: u64 = 10;

struct SearchRuns {
    wins: usize,
    detail: Vec<String>,
    slowest_search: Duration,
    evaluations: usize,
    budget: usize,
}

fn evolution_vs_random() -> Result<SearchRuns, String> {
    let pdk = Pdk::gf();
    let mut runs = SearchRuns {
        wins: 0,
        detail: Vec::new(),
        slowest_search: Duration::ZERO,
        evaluations: 0,
        budget: 0,
    };
    for seed in 0..SEEDS {
        let mut cfg = SearchConfig::new(16);
        cfg.seed = seed;
        let t = Instant::now();
        let evo = run_search(&cfg, &pdk, &default_baselines(16)).map_err(|e| e.to_string())?;
        runs.slowest_search = runs.slowest_search.max(t.elapsed());
        runs.evaluations = runs.evaluations.max(evo.evaluations);
        runs.budget = equal_budget(&cfg);
        let rnd = random_search(&cfg, &pdk, runs.budget).map_err(|e| e.to_string())?;
        let a = objective_points(&evo.front);
        let b = objective_points(&rnd);
        let r = shared_reference(&a, &b);
        let (ha, hb) = (hypervolume(&a, r), hypervolume(&b, r));
        if ha > hb {
            runs.wins += 1;
        }
        runs.detail.push(format!("{:.2}", ha / hb.max(f64::MIN_POSITIVE)));
    }
    Ok(runs)
}

fn determinism() -> Outcome {
    let pdk = Pdk::gf();
    let mut cfg = SearchConfig::new(16);
    cfg.seed = 2024;
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    execute_search(&cfg, &pdk, a.path(), true).map_err(|e| e.to_string())?;
    execute_search(&cfg, &pdk, b.path(), true).map_err(|e| e.to_string())?;
    for f in ["front.json", "history.jsonl", "trace.log"] {
        let x = std::fs::read(a.path().join(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.path().join(f)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{f} differs between runs"));
        }
    }
    Ok("front.json, history.jsonl and trace.log byte-identical".into())
}

fn proxy_weights() -> Outcome {
    let w = ProxyWeights::default();
    let b = ScoreBundle::new(&w, 10.0, 0.5, 0.9);
    let want = 0.015 * 10.0 + 0.561 * 0.5 + 0.175 * 0.9;
    if (b.combined - want).abs() > 1e-15 || (b.combined - 0.588).abs() > 1e-12 {
        return Err(format!("combined {} vs {want}", b.combined));
    }
    let pdk = Pdk::gf();
    let mut rng = seeded(10);
    for _ in 0..5 {
        let t = random_gene(&space(8, &pdk), &mut rng).decode().map_err(|e| e.to_string())?;
        let s = accuracy_score(&t, &ProxyConfig::default(), rng.gen()).map_err(|e| e.to_string())?;
        let want = 0.015 * s.s_zico + 0.561 * s.s_param + 0.175 * s.s_sparsity;
        if (s.combined - want).abs() > 1e-12 * want.abs().max(1.0) {
            return Err(format!("accuracy_score combined {} vs {want}", s.combined));
        }
    }
    let mut worst: f64 = 0.0;
    for n in [2usize, 3, 7, 20, 50] {
        for _ in 0..40 {
            let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
            let mut ys: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            if rng.gen_bool(0.3) {
                ys.shuffle(&mut rng);
                ys.truncate(n / 2);
                ys.resize(n, 0.5);
            }
            let got = spearman(&xs, &ys).map_err(|e| e.to_string())?;
            worst = worst.max((got - brute_spearman(&xs, &ys)).abs());
        }
    }
    let msg = format!("weighted sum 0.588, spearman worst deviation {worst:.1e}");
    if worst <= 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn brute_ranks_avg(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let less = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn brute_spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (brute_ranks_avg(xs), brute_ranks_avg(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

fn report(n: usize, name: &str, budget: &str, elapsed: Duration, limit: Option<Duration>, outcome: &Outcome) -> bool {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let ok = outcome.is_ok() && in_time;
    let detail = match outcome {
        Ok(m) => m.clone(),
        Err(m) => m.clone(),
    };
    let timing = if in_time { String::new() } else { " [over time budget]".to_string() };
    println!(
        "{} {n:>2} {name}: {detail} ({:.2}s, budget {budget}){timing}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

fn main() {
    let secs = Duration::from_secs;
    let mut all = true;
    let checks: [(&str, &str, Option<Duration>, fn() -> Outcome); 6] = [
        ("cost arithmetic", "1s", Some(secs(1)), efficiency_arithmetic),
        ("unitarity", "1min", Some(secs(60)), unitarity),
        ("crossing oracle", "5s", Some(secs(5)), crossing_oracle),
        ("operator closure", "1min", Some(secs(60)), operator_closure),
        ("gradient check", "1min", Some(secs(60)), gradient_check),
        ("nsga-ii oracle", "30s", Some(secs(30)), nsga_oracle),
    ];
    for (i, (name, budget, limit, f)) in checks.into_iter().enumerate() {
        let (o, t) = timed(f);
        all &= report(i + 1, name, budget, t, limit, &o);
    }

    let t = Instant::now();
    let runs = evolution_vs_random();
    let elapsed = t.elapsed();
    let (o7, o9) = match &runs {
        Ok(r) => {
            let msg = format!("evolution wins {}/{SEEDS} (HV ratios {})", r.wins, r.detail.join(" "));
            let o7 = if r.wins >= 9 { Ok(msg) } else { Err(msg) };
            let msg9 = format!(
                "slowest 40x80 K=16 search {:.1}s, {} unique evaluations within a budget of {}",
                r.slowest_search.as_secs_f64(),
                r.evaluations,
                r.budget
            );
            let o9 = if r.slowest_search <= secs(1800) { Ok(msg9) } else { Err(msg9) };
            (o7, o9)
        }
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    all &= report(7, "search beats random", "15min", elapsed, Some(secs(900)), &o7);

    let (o, t) = timed(determinism);
    all &= report(8, "determinism", "none", t, None, &o);

    let slowest = runs.as_ref().map(|r| r.slowest_search).unwrap_or(elapsed);
    all &= report(9, "end-to-end budget", "30min", slowest, Some(secs(1800)), &o9);

    let (o, t) = timed(proxy_weights);
    all &= report(10, "proxy weights and spearman", "none", t, None, &o);

    if !all {
        std::process::exit(1);
    }
}
