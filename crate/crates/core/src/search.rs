//! NSGA-II search over PTC topologies with a two-stage mutation schedule.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::f64::consts::PI;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{evaluate_cost, Constraints, CostReport};
use crate::error::{Error, Result};
use crate::evolution::{
    make_offspring, random_init, CrossoverConfig, Feasibility, MutationConfig, MutationOp,
    SearchSpace, TraceEntry, INIT_RETRIES,
};
use crate::pdk::Pdk;
use crate::proxy::{accuracy_score, ProxyConfig, ScoreBundle};
use crate::rng::fnv1a;
use crate::topology::{make_baseline, BaselineStyle, Gene};

/// Accuracy score, compute density, energy efficiency; all maximized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub score: f64,
    pub cd: f64,
    pub ee: f64,
}

impl ObjectiveVector {
    pub fn as_array(&self) -> [f64; 3] {
        [self.score, self.cd, self.ee]
    }

    pub fn product(&self) -> f64 {
        self.score * self.cd * self.ee
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub gene: Gene,
    pub objectives: ObjectiveVector,
    pub scores: ScoreBundle,
    pub cost: CostReport,
    pub rank: usize,
    pub crowding: f64,
}

/// Mutation-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheduler {
    /// Cosine decay, then a local-search phase at a fixed low rate.
    TwoStage,
    /// `p_mu0` for every iteration with every operator enabled.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub k: usize,
    pub pop_size: usize,
    pub max_iters: usize,
    pub phase2_iters: usize,
    pub p_mu0: f64,
    pub p_mu_final: f64,
    pub p_co: f64,
    pub b_range: (usize, usize),
    pub ports: Vec<usize>,
    pub constraints: Option<Constraints>,
    pub seed: u64,
    pub scheduler: Scheduler,
    /// Operators removed for the whole run.
    pub disabled_ops: BTreeSet<MutationOp>,
    pub include_baselines: bool,
    pub proxy: ProxyConfig,
    pub trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self::new(16)
    }
}

impl SearchConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            pop_size: 40,
            max_iters: 80,
            phase2_iters: 20,
            p_mu0: 0.1,
            p_mu_final: 0.02,
            p_co: 0.5,
            b_range: SearchSpace::default_block_range(k),
            ports: Vec::new(),
            constraints: None,
            seed: 0,
            scheduler: Scheduler::TwoStage,
            disabled_ops: BTreeSet::new(),
            include_baselines: true,
            proxy: ProxyConfig::default(),
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {p} is not a probability")))
            }
        };
        prob("p_mu0", self.p_mu0)?;
        prob("p_mu_final", self.p_mu_final)?;
        prob("p_co", self.p_co)?;
        if self.k < 2 {
            return Err(Error::Config(format!("k = {} must be at least 2", self.k)));
        }
        if self.pop_size == 0 {
            return Err(Error::Config("pop_size must be positive".into()));
        }
        if self.max_iters > 0 && self.phase2_iters >= self.max_iters {
            return Err(Error::Config(format!(
                "phase2_iters = {} must be below max_iters = {}",
                self.phase2_iters, self.max_iters
            )));
        }
        if let Some(c) = &self.constraints {
            c.validate()?;
        }
        self.proxy.weights.validate()
    }

    pub fn space(&self, pdk: &Pdk) -> Result<SearchSpace> {
        let ports = if self.ports.is_empty() {
            SearchSpace::default_ports(self.k, pdk)
        } else {
            self.ports.clone()
        };
        SearchSpace::new(self.k, self.b_range.0, self.b_range.1, ports, pdk)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn constraints(&self, pdk: &Pdk) -> Result<Constraints> {
        match self.constraints {
            Some(c) => Ok(c),
            None => Constraints::derived(self.k, pdk),
        }
    }

    fn phase1_iters(&self) -> usize {
        self.max_iters - self.phase2_iters
    }
}

/// Mutation rate and operator set for iteration `iter` (1-based).
pub fn mutation_rate(iter: usize, cfg: &SearchConfig) -> Result<MutationConfig> {
    if iter == 0 || iter > cfg.max_iters {
        return Err(Error::InvalidArgument(format!(
            "iteration {iter} outside [1, {}]",
            cfg.max_iters
        )));
    }
    let mut mc = match cfg.scheduler {
        Scheduler::Constant => MutationConfig::all(cfg.p_mu0),
        Scheduler::TwoStage => {
            let n1 = cfg.phase1_iters();
            if iter <= n1 {
                let t = if n1 > 1 {
                    (iter - 1) as f64 / (n1 - 1) as f64
                } else {
                    0.0
                };
                let p = cfg.p_mu_final + 0.5 * (cfg.p_mu0 - cfg.p_mu_final) * (1.0 + (PI * t).cos());
                MutationConfig::all(p)
            } else {
                MutationConfig::phase2(cfg.p_mu_final)
            }
        }
    };
    mc.enabled_ops.retain(|op| !cfg.disabled_ops.contains(op));
    Ok(mc)
}

fn dominates(a: &[f64; 3], b: &[f64; 3]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

/// Fronts of mutually non-dominated points, best first, for maximization.
pub fn nondominated_sort(points: &[[f64; 3]]) -> Result<Vec<Vec<usize>>> {
    if points.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("NaN objective".into()));
    }
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    Ok(fronts)
}

/// Crowding distance of every point of one front.
pub fn crowding_distance(points: &[[f64; 3]]) -> Vec<f64> {
    let n = points.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut d = vec![0.0; n];
    for m in 0..3 {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| points[a][m].total_cmp(&points[b][m]).then(a.cmp(&b)));
        let lo = points[idx[0]][m];
        let hi = points[idx[n - 1]][m];
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        d[idx[0]] = f64::INFINITY;
        d[idx[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            d[idx[w]] += (points[idx[w + 1]][m] - points[idx[w - 1]][m]) / range;
        }
    }
    d
}

/// Indices of the `n` survivors, ascending, plus rank and crowding for
/// every input point.
pub fn select_survivors(points: &[[f64; 3]], n: usize) -> Result<(Vec<usize>, Vec<usize>, Vec<f64>)> {
    let fronts = nondominated_sort(points)?;
    let mut rank = vec![0; points.len()];
    let mut crowd = vec![0.0; points.len()];
    let mut chosen = Vec::with_capacity(n);
    for (r, front) in fronts.iter().enumerate() {
        let fp: Vec<[f64; 3]> = front.iter().map(|&i| points[i]).collect();
        let cd = crowding_distance(&fp);
        for (&i, &c) in front.iter().zip(&cd) {
            rank[i] = r;
            crowd[i] = c;
        }
        let room = n - chosen.len();
        if room == 0 {
            continue;
        }
        if front.len() <= room {
            chosen.extend(front);
        } else {
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]).then(front[a].cmp(&front[b])));
            chosen.extend(order.into_iter().take(room).map(|p| front[p]));
        }
    }
    chosen.sort_unstable();
    Ok((chosen, rank, crowd))
}

/// Active blocks only, in text form; the inactive tail has no effect on any
/// objective.
pub fn canonical_key(gene: &Gene) -> String {
    let mut g = gene.clone();
    g.blocks.truncate(g.active_blocks);
    g.to_text()
}

/// Evaluates genes once per canonical key.
pub struct Evaluator<'a> {
    pub pdk: &'a Pdk,
    pub proxy: &'a ProxyConfig,
    cache: Mutex<HashMap<String, (ObjectiveVector, ScoreBundle, CostReport)>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(pdk: &'a Pdk, proxy: &'a ProxyConfig) -> Self {
        Self {
            pdk,
            proxy,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Distinct genes evaluated so far.
    pub fn evaluations(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    pub fn evaluate(&self, gene: &Gene) -> Result<Individual> {
        let key = canonical_key(gene);
        let hit = self.cache.lock().expect("cache lock").get(&key).cloned();
        let (objectives, scores, cost) = match hit {
            Some(v) => v,
            None => {
                let t = gene.decode()?;
                let cost = evaluate_cost(&t, self.pdk)?;
                let scores = accuracy_score(&t, self.proxy, fnv1a(key.as_bytes()))?;
                let obj = ObjectiveVector {
                    score: scores.combined,
                    cd: cost.cd,
                    ee: cost.ee,
                };
                for v in obj.as_array() {
                    if !v.is_finite() {
                        return Err(Error::InvalidArgument(format!("non-finite objective for {key}")));
                    }
                }
                let v = (obj, scores, cost);
                self.cache.lock().expect("cache lock").insert(key, v.clone());
                v
            }
        };
        Ok(Individual {
            gene: gene.clone(),
            objectives,
            scores,
            cost,
            rank: 0,
            crowding: 0.0,
        })
    }

    /// Evaluate in parallel; results keep input order.
    pub fn evaluate_all(&self, genes: &[Gene]) -> Result<Vec<Individual>> {
        genes.par_iter().map(|g| self.evaluate(g)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestObjectives {
    pub score: f64,
    pub cd: f64,
    pub ee: f64,
}

/// One line of the history file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub iter: usize,
    pub p_mu: f64,
    pub front0_size: usize,
    pub best: BestObjectives,
    pub p_avg: f64,
}

fn history_entry(iter: usize, p_mu: f64, pop: &[Individual]) -> HistoryEntry {
    let max = |f: fn(&ObjectiveVector) -> f64| {
        pop.iter().map(|i| f(&i.objectives)).fold(f64::NEG_INFINITY, f64::max)
    };
    HistoryEntry {
        iter,
        p_mu,
        front0_size: pop.iter().filter(|i| i.rank == 0).count(),
        best: BestObjectives {
            score: max(|o| o.score),
            cd: max(|o| o.cd),
            ee: max(|o| o.ee),
        },
        p_avg: pop.iter().map(|i| i.objectives.product()).sum::<f64>() / pop.len().max(1) as f64,
    }
}

/// One entry of the front file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMember {
    pub gene: Gene,
    pub objectives: ObjectiveVector,
    pub cost: CostReport,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub front: Vec<Individual>,
    pub population: Vec<Individual>,
    pub history: Vec<HistoryEntry>,
    pub trace: Vec<TraceEntry>,
    pub evaluations: usize,
}

impl SearchResult {
    pub fn front_members(&self) -> Vec<FrontMember> {
        self.front
            .iter()
            .map(|i| FrontMember {
                gene: i.gene.clone(),
                objectives: i.objectives,
                cost: i.cost.clone(),
            })
            .collect()
    }

    pub fn front_json(&self) -> String {
        serde_json::to_string_pretty(&self.front_members()).expect("front serializes") + "\n"
    }

    pub fn history_jsonl(&self) -> String {
        self.history
            .iter()
            .map(|h| serde_json::to_string(h).expect("history serializes") + "\n")
            .collect()
    }

    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|t| format!("{t}\n")).collect()
    }
}

/// Manual designs for `k` that can be encoded.
pub fn default_baselines(k: usize) -> Vec<Gene> {
    BaselineStyle::ALL
        .iter()
        .filter_map(|&s| make_baseline(s, k).ok())
        .collect()
}

/// Keep the first copy of each canonical gene; refill to `min_len` with
/// duplicates in order when too few are distinct.
fn dedup(pop: Vec<Individual>, min_len: usize) -> Vec<Individual> {
    let mut seen = HashSet::new();
    let (mut unique, mut dups) = (Vec::new(), Vec::new());
    for ind in pop {
        if seen.insert(canonical_key(&ind.gene)) {
            unique.push(ind);
        } else {
            dups.push(ind);
        }
    }
    let missing = min_len.saturating_sub(unique.len());
    unique.extend(dups.into_iter().take(missing));
    unique
}

fn rank_population(pop: &mut Vec<Individual>, keep: usize) -> Result<()> {
    let points: Vec<[f64; 3]> = pop.iter().map(|i| i.objectives.as_array()).collect();
    let (chosen, rank, crowd) = select_survivors(&points, keep.min(pop.len()))?;
    for (i, ind) in pop.iter_mut().enumerate() {
        ind.rank = rank[i];
        ind.crowding = crowd[i];
    }
    let mut keep_mask = vec![false; pop.len()];
    for i in chosen {
        keep_mask[i] = true;
    }
    let mut it = keep_mask.into_iter();
    pop.retain(|_| it.next().unwrap_or(false));
    // ranks are relative to the merged set; recompute for the survivors
    let points: Vec<[f64; 3]> = pop.iter().map(|i| i.objectives.as_array()).collect();
    let fronts = nondominated_sort(&points)?;
    for (r, front) in fronts.iter().enumerate() {
        let fp: Vec<[f64; 3]> = front.iter().map(|&i| points[i]).collect();
        for (&i, c) in front.iter().zip(crowding_distance(&fp)) {
            pop[i].rank = r;
            pop[i].crowding = c;
        }
    }
    Ok(())
}

/// Members of rank 0, one per canonical gene.
fn front_of(pop: &[Individual]) -> Vec<Individual> {
    let mut seen = HashSet::new();
    pop.iter()
        .filter(|i| i.rank == 0 && seen.insert(canonical_key(&i.gene)))
        .cloned()
        .collect()
}

/// The full evolutionary loop.
pub fn run_search(cfg: &SearchConfig, pdk: &Pdk, baselines: &[Gene]) -> Result<SearchResult> {
    cfg.validate()?;
    let space = cfg.space(pdk)?;
    let constraints = cfg.constraints(pdk)?;
    let feasibility = Feasibility {
        pdk,
        constraints: &constraints,
    };
    let evaluator = Evaluator::new(pdk, &cfg.proxy);
    let seeds: &[Gene] = if cfg.include_baselines { baselines } else { &[] };

    let init = random_init(cfg.pop_size, &space, &feasibility, seeds, cfg.seed, INIT_RETRIES)?;
    let mut pop = evaluator.evaluate_all(&init)?;
    let n = pop.len();
    rank_population(&mut pop, n)?;
    let mut history = vec![history_entry(0, 0.0, &pop)];
    let mut trace = Vec::new();
    let co = CrossoverConfig { p_co: cfg.p_co };

    for iter in 1..=cfg.max_iters {
        let mc = mutation_rate(iter, cfg)?;
        let genes: Vec<Gene> = pop.iter().map(|i| i.gene.clone()).collect();
        let off = make_offspring(&genes, &mc, &co, &space, &feasibility, cfg.seed, iter);
        if cfg.trace {
            trace.extend(off.trace);
        }
        let children = evaluator.evaluate_all(&off.genes)?;
        let mut merged = pop;
        merged.extend(children);
        let mut merged = dedup(merged, cfg.pop_size);
        rank_population(&mut merged, cfg.pop_size)?;
        pop = merged;
        history.push(history_entry(iter, mc.p_mu, &pop));
        log::info!(
            "iter {iter}: p_mu {:.4}, front {} / {}",
            mc.p_mu,
            history[iter].front0_size,
            pop.len()
        );
    }

    Ok(SearchResult {
        front: front_of(&pop),
        population: pop,
        history,
        trace,
        evaluations: evaluator.evaluations(),
    })
}

/// Pure random sampling of `budget` feasible genes; returns the
/// non-dominated ones.
pub fn random_search(cfg: &SearchConfig, pdk: &Pdk, budget: usize) -> Result<Vec<Individual>> {
    cfg.validate()?;
    let space = cfg.space(pdk)?;
    let constraints = cfg.constraints(pdk)?;
    let feasibility = Feasibility {
        pdk,
        constraints: &constraints,
    };
    let evaluator = Evaluator::new(pdk, &cfg.proxy);
    let genes = random_init(
        budget,
        &space,
        &feasibility,
        &[],
        cfg.seed ^ 0x5EED_0F_4A4D,
        INIT_RETRIES,
    )?;
    let mut pop = evaluator.evaluate_all(&genes)?;
    let n = pop.len();
    rank_population(&mut pop, n)?;
    Ok(front_of(&pop))
}

/// Evaluations that match a search of `cfg`: the initial population plus
/// one offspring set per iteration.
pub fn equal_budget(cfg: &SearchConfig) -> usize {
    cfg.pop_size * (cfg.max_iters + 1)
}

/// Dominated volume above `reference` for maximization. Points not strictly
/// above the reference on every axis contribute nothing.
pub fn hypervolume(points: &[[f64; 3]], reference: [f64; 3]) -> f64 {
    let mut pts: Vec<[f64; 3]> = points
        .iter()
        .filter(|p| p.iter().zip(&reference).all(|(v, r)| v > r))
        .copied()
        .collect();
    if pts.is_empty() {
        return 0.0;
    }
    pts.sort_by(|a, b| b[2].total_cmp(&a[2]));
    let mut volume = 0.0;
    for i in 0..pts.len() {
        let next_z = pts.get(i + 1).map_or(reference[2], |p| p[2]);
        let dz = pts[i][2] - next_z;
        if dz > 0.0 {
            volume += area_2d(&pts[..=i], [reference[0], reference[1]]) * dz;
        }
    }
    volume
}

fn area_2d(points: &[[f64; 3]], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| b[0].total_cmp(&a[0]));
    let mut area = 0.0;
    let mut ymax = reference[1];
    for i in 0..pts.len() {
        ymax = ymax.max(pts[i][1]);
        let next_x = pts.get(i + 1).map_or(reference[0], |p| p[0]);
        area += (pts[i][0] - next_x) * (ymax - reference[1]);
    }
    area
}

/// Component-wise minimum over both point sets.
pub fn shared_reference(a: &[[f64; 3]], b: &[[f64; 3]]) -> [f64; 3] {
    let mut r = [f64::INFINITY; 3];
    for p in a.iter().chain(b) {
        for m in 0..3 {
            r[m] = r[m].min(p[m]);
        }
    }
    r
}

pub fn objective_points(inds: &[Individual]) -> Vec<[f64; 3]> {
    inds.iter().map(|i| i.objectives.as_array()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_endpoints() {
        let cfg = SearchConfig::new(16);
        assert!((mutation_rate(1, &cfg).unwrap().p_mu - 0.1).abs() < 1e-15);
        assert!((mutation_rate(60, &cfg).unwrap().p_mu - 0.02).abs() < 1e-15);
        let p2 = mutation_rate(61, &cfg).unwrap();
        assert_eq!(p2.p_mu, 0.02);
        assert!(!p2.enabled_ops.contains(&MutationOp::AddBlock));
        let mut last = 1.0;
        for i in 1..=80 {
            let p = mutation_rate(i, &cfg).unwrap().p_mu;
            assert!(p <= last + 1e-15);
            last = p;
        }
        assert!(mutation_rate(0, &cfg).is_err());
        assert!(mutation_rate(81, &cfg).is_err());
    }

    #[test]
    fn sort_small_cases() {
        assert_eq!(nondominated_sort(&[[1.0, 1.0, 1.0]]).unwrap(), vec![vec![0]]);
        assert_eq!(
            nondominated_sort(&[[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]]).unwrap(),
            vec![vec![1], vec![0]]
        );
        assert!(nondominated_sort(&[[f64::NAN, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn crowding_examples() {
        assert!(crowding_distance(&[[0.0; 3], [1.0; 3]]).iter().all(|d| d.is_infinite()));
        let d = crowding_distance(&[[0.0, 5.0, 5.0], [1.0, 5.0, 5.0], [2.0, 5.0, 5.0]]);
        assert_eq!(d[1], 1.0);
        assert!(d[0].is_infinite() && d[2].is_infinite());
    }

    #[test]
    fn survivors_prefer_dominating_half() {
        let pts: Vec<[f64; 3]> = (0..8)
            .map(|i| {
                let x = i as f64;
                if i < 4 {
                    [x, 10.0 - x, 1.0]
                } else {
                    [x - 4.0, 6.0 - (x - 4.0), 0.0]
                }
            })
            .collect();
        let (chosen, _, _) = select_survivors(&pts, 4).unwrap();
        assert_eq!(chosen, vec![0, 1, 2, 3]);
        let (all, _, _) = select_survivors(&pts, 8).unwrap();
        assert_eq!(all, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn hypervolume_boxes() {
        let r = [0.0; 3];
        assert_eq!(hypervolume(&[[1.0, 2.0, 3.0]], r), 6.0);
        // two unit-overlapping boxes: 2*1*1 + 1*2*1 - 1*1*1
        assert_eq!(hypervolume(&[[2.0, 1.0, 1.0], [1.0, 2.0, 1.0]], r), 3.0);
        assert_eq!(hypervolume(&[], r), 0.0);
        assert_eq!(hypervolume(&[[1.0, 0.0, 1.0]], r), 0.0);
    }

    #[test]
    fn evaluator_caches_by_active_blocks() {
        let pdk = Pdk::gf();
        let proxy = ProxyConfig::default();
        let ev = Evaluator::new(&pdk, &proxy);
        let g = make_baseline(BaselineStyle::Butterfly, 8).unwrap();
        let a = ev.evaluate(&g).unwrap();
        let padded = g.clone().with_capacity(16).unwrap();
        let b = ev.evaluate(&padded).unwrap();
        assert_eq!(ev.evaluations(), 1);
        assert_eq!(a.objectives, b.objectives);
    }

    #[test]
    fn tiny_search_runs() {
        let pdk = Pdk::gf();
        let mut cfg = SearchConfig::new(8);
        cfg.pop_size = 8;
        cfg.max_iters = 4;
        cfg.phase2_iters = 1;
        cfg.seed = 3;
        let baselines = default_baselines(8);
        let r = run_search(&cfg, &pdk, &baselines).unwrap();
        assert_eq!(r.population.len(), 8);
        assert_eq!(r.history.len(), 5);
        assert!(!r.front.is_empty());
        let again = run_search(&cfg, &pdk, &baselines).unwrap();
        assert_eq!(r.front_json(), again.front_json());
        assert_eq!(r.history_jsonl(), again.history_jsonl());

        cfg.max_iters = 0;
        cfg.phase2_iters = 0;
        let r0 = run_search(&cfg, &pdk, &baselines).unwrap();
        assert_eq!(r0.history.len(), 1);
    }
}
