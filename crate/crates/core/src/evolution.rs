//! Population initialization, mutation and crossover operators.
//!
//! Every operator maps a legal gene segment to a legal gene segment or
//! reports [`Error::NotApplicable`] without touching its input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{check_constraints, evaluate_cost, Constraints, Verdict};
use crate::error::{Error, Result};
use crate::pdk::Pdk;
use crate::rng::{stream, Rng};
use crate::topology::{crossing_cap, inversions, BlockGene, Gene};

/// Offspring regeneration attempts before a parent is cloned instead.
pub const OFFSPRING_ATTEMPTS: usize = 50;
/// Default sampling attempts per initial individual.
pub const INIT_RETRIES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MutationOp {
    R2A1,
    A2R1,
    Move,
    RS,
    AddCR,
    ReduceCR,
    AddBlock,
    ReduceBlock,
}

impl MutationOp {
    pub const ALL: [MutationOp; 8] = [
        MutationOp::R2A1,
        MutationOp::A2R1,
        MutationOp::Move,
        MutationOp::RS,
        MutationOp::AddCR,
        MutationOp::ReduceCR,
        MutationOp::AddBlock,
        MutationOp::ReduceBlock,
    ];
    pub const DC: [MutationOp; 4] = [
        MutationOp::R2A1,
        MutationOp::A2R1,
        MutationOp::Move,
        MutationOp::RS,
    ];
    pub const CR: [MutationOp; 2] = [MutationOp::AddCR, MutationOp::ReduceCR];
    pub const BLOCK: [MutationOp; 2] = [MutationOp::AddBlock, MutationOp::ReduceBlock];

    pub fn name(self) -> &'static str {
        match self {
            MutationOp::R2A1 => "R2A1",
            MutationOp::A2R1 => "A2R1",
            MutationOp::Move => "Move",
            MutationOp::RS => "RS",
            MutationOp::AddCR => "AddCR",
            MutationOp::ReduceCR => "ReduceCR",
            MutationOp::AddBlock => "AddBlock",
            MutationOp::ReduceBlock => "ReduceBlock",
        }
    }

    /// Operators kept in the local-search phase.
    pub fn phase2_set() -> BTreeSet<MutationOp> {
        Self::ALL
            .into_iter()
            .filter(|op| {
                !matches!(
                    op,
                    MutationOp::AddBlock | MutationOp::ReduceBlock | MutationOp::RS
                )
            })
            .collect()
    }

    pub fn all_set() -> BTreeSet<MutationOp> {
        Self::ALL.into_iter().collect()
    }
}

impl fmt::Display for MutationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MutationOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|op| op.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mutation operator `{s}`")))
    }
}

/// The legal region of the gene space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub k: usize,
    pub b_min: usize,
    pub b_max: usize,
    /// Multi-port coupler sizes that sampling and mutation may place.
    pub ports: Vec<usize>,
    /// Multi-port coupler sizes accepted by the legality check.
    pub supported: Vec<usize>,
}

impl SearchSpace {
    pub fn new(k: usize, b_min: usize, b_max: usize, ports: Vec<usize>, pdk: &Pdk) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("K must be at least 2, got {k}")));
        }
        if b_min % 2 != 0 || b_max % 2 != 0 || b_min > b_max || b_max == 0 {
            return Err(Error::InvalidArgument(format!(
                "block range [{b_min}, {b_max}] must be even and ordered"
            )));
        }
        for &p in &ports {
            if p < 2 || p > k {
                return Err(Error::InvalidArgument(format!(
                    "coupler size {p} outside [2, {k}]"
                )));
            }
            if pdk.coupler(p).is_none() {
                return Err(Error::MissingPdkEntry(p));
            }
        }
        let mut ports = ports;
        ports.sort_unstable();
        ports.dedup();
        Ok(Self {
            k,
            b_min,
            b_max,
            ports,
            supported: pdk.port_counts(),
        })
    }

    /// Coupler sizes used for `K` = 8, 16, 32 in the reference setup; other
    /// sizes get `{2, K/2}` restricted to what the kit provides.
    pub fn default_ports(k: usize, pdk: &Pdk) -> Vec<usize> {
        let wanted: Vec<usize> = match k {
            8 => vec![2, 4],
            16 => vec![2, 8],
            32 => vec![4, 16],
            _ => vec![2, k / 2],
        };
        let mut v: Vec<usize> = wanted
            .into_iter()
            .filter(|&p| p >= 2 && p <= k && pdk.coupler(p).is_some())
            .collect();
        v.dedup();
        v
    }

    /// `[2, 2K]` blocks in total.
    pub fn default_block_range(k: usize) -> (usize, usize) {
        (2, 2 * k)
    }

    pub fn cap(&self) -> usize {
        crossing_cap(self.k)
    }

    /// Full legality check; the error names the first violated rule.
    pub fn check(&self, gene: &Gene) -> Result<()> {
        if gene.k != self.k {
            return Err(Error::IllegalGene(format!("K = {} but the space has K = {}", gene.k, self.k)));
        }
        gene.check_structure()?;
        if gene.blocks.len() != self.b_max {
            return Err(Error::IllegalGene(format!(
                "{} encoded blocks, expected {}",
                gene.blocks.len(),
                self.b_max
            )));
        }
        if gene.active_blocks < self.b_min || gene.active_blocks > self.b_max {
            return Err(Error::IllegalGene(format!(
                "B = {} outside [{}, {}]",
                gene.active_blocks, self.b_min, self.b_max
            )));
        }
        for (i, b) in gene.blocks.iter().enumerate() {
            if let Some(&p) = b
                .dc
                .iter()
                .find(|&&p| p != 1 && !self.supported.contains(&p))
            {
                return Err(Error::IllegalGene(format!(
                    "block {i}: no {p}-port coupler in the PDK"
                )));
            }
        }
        Ok(())
    }

    pub fn is_legal(&self, gene: &Gene) -> bool {
        self.check(gene).is_ok()
    }
}

// Coupler-layer helpers. Positions below are wire offsets.

fn offsets(partition: &[usize]) -> Vec<usize> {
    partition
        .iter()
        .scan(0, |off, &n| {
            let o = *off;
            *off += n;
            Some(o)
        })
        .collect()
}

/// Replace entry `idx` by bare waveguides.
fn expand(partition: &[usize], idx: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(partition.len() + partition[idx]);
    out.extend_from_slice(&partition[..idx]);
    out.extend(std::iter::repeat_n(1, partition[idx]));
    out.extend_from_slice(&partition[idx + 1..]);
    out
}

/// Every `(ports, wire offset)` where a coupler fits on bare waveguides.
fn placements(partition: &[usize], ports: &[usize]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut wire = 0;
    let mut run_start = None;
    for &n in partition {
        if n == 1 {
            run_start.get_or_insert(wire);
        } else if let Some(s) = run_start.take() {
            runs.push((s, wire - s));
        }
        wire += n;
    }
    if let Some(s) = run_start {
        runs.push((s, wire - s));
    }
    let mut out = Vec::new();
    for &p in ports {
        for &(s, len) in &runs {
            if len >= p {
                out.extend((s..=s + len - p).map(|o| (p, o)));
            }
        }
    }
    out
}

/// Put a `ports`-wide coupler at wire `offset`, which must be bare waveguide.
fn place(partition: &[usize], ports: usize, offset: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(partition.len());
    let mut wire = 0;
    let mut skip = 0;
    for &n in partition {
        if skip > 0 {
            debug_assert_eq!(n, 1);
            skip -= 1;
        } else if wire == offset {
            debug_assert_eq!(n, 1);
            out.push(ports);
            skip = ports - 1;
        } else {
            out.push(n);
        }
        wire += n;
    }
    out
}

fn multi_indices(partition: &[usize]) -> Vec<usize> {
    partition
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 1)
        .map(|(i, _)| i)
        .collect()
}

/// Uniform fill of `k` wires by sizes drawn from `{1} u ports`, redrawing
/// whenever a draw overflows the remaining width.
pub fn resample_partition(k: usize, ports: &[usize], rng: &mut Rng) -> Vec<usize> {
    let mut choices = vec![1];
    choices.extend(ports.iter().copied().filter(|&p| p > 1));
    let mut out = Vec::new();
    let mut left = k;
    while left > 0 {
        let p = *choices.choose(rng).expect("non-empty");
        if p <= left {
            out.push(p);
            left -= p;
        }
    }
    out
}

fn r2a1_candidates(partition: &[usize], ports: &[usize]) -> Vec<(usize, usize)> {
    let multi = multi_indices(partition);
    let mut pairs = Vec::new();
    for (a, &i) in multi.iter().enumerate() {
        for &j in &multi[a + 1..] {
            let freed = expand(&expand(partition, j), i);
            if !placements(&freed, ports).is_empty() {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

fn a2r1_candidates(partition: &[usize], ports: &[usize]) -> Vec<(usize, usize)> {
    placements(partition, ports)
        .into_iter()
        .filter(|&(p, o)| !placements(&place(partition, p, o), ports).is_empty())
        .collect()
}

fn move_candidates(partition: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let offs = offsets(partition);
    multi_indices(partition)
        .into_iter()
        .filter_map(|i| {
            let freed = expand(partition, i);
            let p = partition[i];
            let targets: Vec<usize> = placements(&freed, &[p])
                .into_iter()
                .map(|(_, o)| o)
                .filter(|&o| o != offs[i])
                .collect();
            (!targets.is_empty()).then_some((i, targets))
        })
        .collect()
}

/// Whether a coupler-layer operator can act on `partition`.
pub fn dc_applicable(partition: &[usize], op: MutationOp, ports: &[usize]) -> bool {
    match op {
        MutationOp::R2A1 => !r2a1_candidates(partition, ports).is_empty(),
        MutationOp::A2R1 => !a2r1_candidates(partition, ports).is_empty(),
        MutationOp::Move => !move_candidates(partition).is_empty(),
        MutationOp::RS => true,
        _ => false,
    }
}

/// Coupler-layer mutation. `ports` are the multi-port sizes that may be
/// placed.
pub fn mutate_dc(
    partition: &[usize],
    op: MutationOp,
    ports: &[usize],
    rng: &mut Rng,
) -> Result<Vec<usize>> {
    let k: usize = partition.iter().sum();
    match op {
        MutationOp::R2A1 => {
            let pairs = r2a1_candidates(partition, ports);
            let &(i, j) = pairs.choose(rng).ok_or(Error::NotApplicable("R2A1"))?;
            let freed = expand(&expand(partition, j), i);
            let (p, o) = pick_placement(&freed, ports, rng).ok_or(Error::NotApplicable("R2A1"))?;
            Ok(place(&freed, p, o))
        }
        MutationOp::A2R1 => {
            let firsts = a2r1_candidates(partition, ports);
            let &(p1, o1) = firsts.choose(rng).ok_or(Error::NotApplicable("A2R1"))?;
            let one = place(partition, p1, o1);
            let (p2, o2) = pick_placement(&one, ports, rng).ok_or(Error::NotApplicable("A2R1"))?;
            let two = place(&one, p2, o2);
            let multi = multi_indices(&two);
            let &drop = multi.choose(rng).expect("two couplers were just added");
            Ok(expand(&two, drop))
        }
        MutationOp::Move => {
            let moves = move_candidates(partition);
            let (i, targets) = moves.choose(rng).ok_or(Error::NotApplicable("Move"))?;
            let o = *targets.choose(rng).expect("non-empty targets");
            Ok(place(&expand(partition, *i), partition[*i], o))
        }
        MutationOp::RS => Ok(resample_partition(k, ports, rng)),
        other => Err(Error::InvalidArgument(format!("{other} is not a coupler operator"))),
    }
}

/// Choose a coupler size uniformly among those that fit, then an offset.
fn pick_placement(partition: &[usize], ports: &[usize], rng: &mut Rng) -> Option<(usize, usize)> {
    let all = placements(partition, ports);
    let mut by_port: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (p, o) in all {
        by_port.entry(p).or_default().push(o);
    }
    let sizes: Vec<usize> = by_port.keys().copied().collect();
    let p = *sizes.choose(rng)?;
    let o = *by_port[&p].choose(rng)?;
    Some((p, o))
}

/// Apply `delta` adjacent swaps that each add one crossing.
pub fn add_crossings(cr: &[usize], delta: usize, rng: &mut Rng) -> Vec<usize> {
    let mut p = cr.to_vec();
    for _ in 0..delta {
        let ascents: Vec<usize> = (0..p.len().saturating_sub(1))
            .filter(|&i| p[i] < p[i + 1])
            .collect();
        match ascents.choose(rng) {
            Some(&i) => p.swap(i, i + 1),
            None => break,
        }
    }
    p
}

/// Apply `delta` descending bubble-sort swaps, each removing one crossing.
pub fn reduce_crossings(cr: &[usize], delta: usize, rng: &mut Rng) -> Vec<usize> {
    let mut p = cr.to_vec();
    for _ in 0..delta {
        let descents: Vec<usize> = (0..p.len().saturating_sub(1))
            .filter(|&i| p[i] > p[i + 1])
            .collect();
        match descents.choose(rng) {
            Some(&i) => p.swap(i, i + 1),
            None => break,
        }
    }
    p
}

pub fn cr_applicable(cr: &[usize], op: MutationOp, cap: usize) -> bool {
    let n = inversions(cr);
    match op {
        MutationOp::AddCR => n < cap,
        MutationOp::ReduceCR => n > 0,
        _ => false,
    }
}

/// Crossing-layer mutation by a random number of crossings.
pub fn mutate_cr(cr: &[usize], op: MutationOp, cap: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    let n = inversions(cr);
    match op {
        MutationOp::AddCR => {
            if n >= cap {
                return Err(Error::NotApplicable("AddCR"));
            }
            let delta = rng.gen_range(1..=cap - n);
            Ok(add_crossings(cr, delta, rng))
        }
        MutationOp::ReduceCR => {
            if n == 0 {
                return Err(Error::NotApplicable("ReduceCR"));
            }
            let delta = rng.gen_range(1..=n);
            Ok(reduce_crossings(cr, delta, rng))
        }
        other => Err(Error::InvalidArgument(format!("{other} is not a crossing operator"))),
    }
}

pub fn block_applicable(gene: &Gene, op: MutationOp, space: &SearchSpace) -> bool {
    match op {
        MutationOp::AddBlock => gene.active_blocks + 2 <= space.b_max,
        MutationOp::ReduceBlock => gene.active_blocks >= space.b_min + 2,
        _ => false,
    }
}

/// Grow by copying the first `m` blocks behind the active ones.
pub fn add_blocks(gene: &Gene, m: usize) -> Gene {
    let mut g = gene.clone();
    let b = g.active_blocks;
    let src_len = b.max(1);
    for i in 0..m {
        g.blocks[b + i] = gene.blocks[i % src_len].clone();
    }
    g.active_blocks += m;
    g
}

pub fn mutate_blocks(gene: &Gene, op: MutationOp, space: &SearchSpace, rng: &mut Rng) -> Result<Gene> {
    match op {
        MutationOp::AddBlock => {
            let room = space.b_max.saturating_sub(gene.active_blocks) / 2;
            if room == 0 {
                return Err(Error::NotApplicable("AddBlock"));
            }
            let m = 2 * rng.gen_range(1..=room);
            Ok(add_blocks(gene, m))
        }
        MutationOp::ReduceBlock => {
            let room = gene.active_blocks.saturating_sub(space.b_min) / 2;
            if room == 0 {
                return Err(Error::NotApplicable("ReduceBlock"));
            }
            let m = 2 * rng.gen_range(1..=room);
            let mut g = gene.clone();
            g.active_blocks -= m;
            Ok(g)
        }
        other => Err(Error::InvalidArgument(format!("{other} is not a block operator"))),
    }
}

fn borders(partition: &[usize]) -> BTreeSet<usize> {
    let k: usize = partition.iter().sum();
    offsets(partition).into_iter().filter(|&o| o > 0 && o < k).collect()
}

/// Sub-partition covering wires `[lo, hi)`, which must be segment borders.
fn slice_partition(partition: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    partition
        .iter()
        .zip(offsets(partition))
        .filter(|&(_, o)| o >= lo && o < hi)
        .map(|(&n, _)| n)
        .collect()
}

/// Wire positions that are segment borders in both parents.
pub fn common_cuts(a: &[usize], b: &[usize]) -> Vec<usize> {
    borders(a).intersection(&borders(b)).copied().collect()
}

/// Border-aligned segment exchange of two coupler layers.
pub fn crossover_dc(a: &[usize], b: &[usize], rng: &mut Rng) -> (Vec<usize>, Vec<usize>) {
    let k: usize = a.iter().sum();
    let mut cuts = vec![0];
    cuts.extend(common_cuts(a, b));
    cuts.push(k);
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    for w in cuts.windows(2) {
        let sa = slice_partition(a, w[0], w[1]);
        let sb = slice_partition(b, w[0], w[1]);
        if rng.gen_bool(0.5) {
            ca.extend(sb);
            cb.extend(sa);
        } else {
            ca.extend(sa);
            cb.extend(sb);
        }
    }
    (ca, cb)
}

/// Refill the positions of `own` holding values in `subset` with those
/// values in `other`'s relative order.
pub fn exchange_values(own: &[usize], other: &[usize], subset: &BTreeSet<usize>) -> Vec<usize> {
    let mut donor = other.iter().filter(|v| subset.contains(v));
    own.iter()
        .map(|v| {
            if subset.contains(v) {
                *donor.next().expect("both parents hold every value")
            } else {
                *v
            }
        })
        .collect()
}

/// Order-preserving crossover of two routing layers. A child that would
/// exceed `cap` crossings falls back to its own parent.
pub fn crossover_cr(a: &[usize], b: &[usize], cap: usize, rng: &mut Rng) -> (Vec<usize>, Vec<usize>) {
    let k = a.len();
    let size = 2 * rng.gen_range(0..=k / 2);
    let mut values: Vec<usize> = (0..k).collect();
    values.shuffle(rng);
    let subset: BTreeSet<usize> = values.into_iter().take(size).collect();
    let ca = exchange_values(a, b, &subset);
    let cb = exchange_values(b, a, &subset);
    let ca = if inversions(&ca) <= cap { ca } else { a.to_vec() };
    let cb = if inversions(&cb) <= cap { cb } else { b.to_vec() };
    (ca, cb)
}

/// Swap whole active blocks at shared positions with probability 0.5.
pub fn crossover_blocks(a: &Gene, b: &Gene, rng: &mut Rng) -> (Gene, Gene) {
    let (mut ca, mut cb) = (a.clone(), b.clone());
    let shared = a.active_blocks.min(b.active_blocks);
    for i in 0..shared {
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut ca.blocks[i], &mut cb.blocks[i]);
        }
    }
    (ca, cb)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossoverKind {
    Dc,
    Cr,
    Block,
}

/// One crossover event: a kind drawn uniformly, coupler and crossing
/// crossovers applied at every shared active position.
pub fn crossover(a: &Gene, b: &Gene, cap: usize, rng: &mut Rng) -> (Gene, Gene, CrossoverKind) {
    let kind = *[CrossoverKind::Dc, CrossoverKind::Cr, CrossoverKind::Block]
        .choose(rng)
        .expect("non-empty");
    let shared = a.active_blocks.min(b.active_blocks);
    let (mut ca, mut cb) = (a.clone(), b.clone());
    match kind {
        CrossoverKind::Block => return {
            let (x, y) = crossover_blocks(a, b, rng);
            (x, y, kind)
        },
        CrossoverKind::Dc => {
            for i in 0..shared {
                let (x, y) = crossover_dc(&a.blocks[i].dc, &b.blocks[i].dc, rng);
                ca.blocks[i].dc = x;
                cb.blocks[i].dc = y;
            }
        }
        CrossoverKind::Cr => {
            for i in 0..shared {
                let (x, y) = crossover_cr(&a.blocks[i].cr, &b.blocks[i].cr, cap, rng);
                ca.blocks[i].cr = x;
                cb.blocks[i].cr = y;
            }
        }
    }
    (ca, cb, kind)
}

/// Mutation settings for one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationConfig {
    pub p_mu: f64,
    pub enabled_ops: BTreeSet<MutationOp>,
}

impl MutationConfig {
    pub fn all(p_mu: f64) -> Self {
        Self {
            p_mu,
            enabled_ops: MutationOp::all_set(),
        }
    }

    pub fn phase2(p_mu: f64) -> Self {
        Self {
            p_mu,
            enabled_ops: MutationOp::phase2_set(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverConfig {
    pub p_co: f64,
}

/// Mutate one gene.
///
/// The block count is mutated with probability `p_mu`; then each active
/// block's coupler layer and crossing layer are each mutated with
/// probability `p_mu`. Every mutation draws one operator uniformly from the
/// enabled operators that pass the legality check for that segment.
pub fn mutate_gene(
    gene: &Gene,
    cfg: &MutationConfig,
    space: &SearchSpace,
    rng: &mut Rng,
    applied: &mut Vec<MutationOp>,
) -> Gene {
    let mut g = gene.clone();
    let enabled = |set: &[MutationOp]| -> Vec<MutationOp> {
        set.iter().copied().filter(|op| cfg.enabled_ops.contains(op)).collect()
    };
    let block_ops = enabled(&MutationOp::BLOCK);
    let dc_ops = enabled(&MutationOp::DC);
    let cr_ops = enabled(&MutationOp::CR);
    let cap = space.cap();

    if rng.gen_bool(cfg.p_mu) {
        let legal: Vec<MutationOp> = block_ops
            .iter()
            .copied()
            .filter(|&op| block_applicable(&g, op, space))
            .collect();
        if let Some(&op) = legal.choose(rng) {
            if let Ok(next) = mutate_blocks(&g, op, space, rng) {
                g = next;
                applied.push(op);
            }
        }
    }
    for i in 0..g.active_blocks {
        if rng.gen_bool(cfg.p_mu) {
            let legal: Vec<MutationOp> = dc_ops
                .iter()
                .copied()
                .filter(|&op| dc_applicable(&g.blocks[i].dc, op, &space.ports))
                .collect();
            if let Some(&op) = legal.choose(rng) {
                if let Ok(dc) = mutate_dc(&g.blocks[i].dc, op, &space.ports, rng) {
                    g.blocks[i].dc = dc;
                    applied.push(op);
                }
            }
        }
        if rng.gen_bool(cfg.p_mu) {
            let legal: Vec<MutationOp> = cr_ops
                .iter()
                .copied()
                .filter(|&op| cr_applicable(&g.blocks[i].cr, op, cap))
                .collect();
            if let Some(&op) = legal.choose(rng) {
                if let Ok(cr) = mutate_cr(&g.blocks[i].cr, op, cap, rng) {
                    g.blocks[i].cr = cr;
                    applied.push(op);
                }
            }
        }
    }
    g
}

/// Cost-based hardware constraint gate.
pub struct Feasibility<'a> {
    pub pdk: &'a Pdk,
    pub constraints: &'a Constraints,
}

impl Feasibility<'_> {
    pub fn verdict(&self, gene: &Gene) -> Result<Verdict> {
        let t = gene.decode()?;
        let report = evaluate_cost(&t, self.pdk)?;
        Ok(check_constraints(&report, self.constraints))
    }

    pub fn feasible(&self, gene: &Gene) -> bool {
        self.verdict(gene).map(|v| v.feasible).unwrap_or(false)
    }
}

/// Random legal gene; crossing layers get a uniform crossing count in
/// `[0, cap]` reached by random ascending swaps.
pub fn random_gene(space: &SearchSpace, rng: &mut Rng) -> Gene {
    let k = space.k;
    let cap = space.cap();
    let half_min = space.b_min / 2;
    let half_max = space.b_max / 2;
    let active = 2 * rng.gen_range(half_min..=half_max);
    let identity: Vec<usize> = (0..k).collect();
    let blocks = (0..space.b_max)
        .map(|_| {
            let dc = resample_partition(k, &space.ports, rng);
            let t = rng.gen_range(0..=cap);
            let cr = add_crossings(&identity, t, rng);
            BlockGene::new(dc, cr)
        })
        .collect();
    Gene::new(k, active, blocks)
}

/// Fit a manual design into the gene length of `space`, or `None` when its
/// block count or couplers fall outside it.
pub fn adapt_baseline(gene: &Gene, space: &SearchSpace) -> Option<Gene> {
    if gene.k != space.k || gene.active_blocks > space.b_max || gene.active_blocks < space.b_min {
        return None;
    }
    let g = gene.clone().with_capacity(space.b_max).ok()?;
    space.is_legal(&g).then_some(g)
}

/// Initial population: feasible baselines first, then `pop_size` random
/// genes that honor every hardware constraint.
pub fn random_init(
    pop_size: usize,
    space: &SearchSpace,
    feasibility: &Feasibility<'_>,
    baselines: &[Gene],
    seed: u64,
    retries: usize,
) -> Result<Vec<Gene>> {
    let mut out: Vec<Gene> = baselines
        .iter()
        .filter_map(|b| adapt_baseline(b, space))
        .filter(|g| feasibility.feasible(g))
        .collect();
    let sampled: Vec<std::result::Result<Gene, BTreeMap<String, usize>>> = (0..pop_size)
        .into_par_iter()
        .map(|idx| {
            let mut rng = stream(seed, 0x1417, idx as u64);
            let mut misses: BTreeMap<String, usize> = BTreeMap::new();
            for _ in 0..retries {
                let g = random_gene(space, &mut rng);
                match feasibility.verdict(&g) {
                    Ok(v) if v.feasible => return Ok(g),
                    Ok(v) => {
                        for axis in v.violated {
                            *misses.entry(axis).or_default() += 1;
                        }
                    }
                    Err(e) => *misses.entry(e.to_string()).or_default() += 1,
                }
            }
            Err(misses)
        })
        .collect();
    for r in sampled {
        match r {
            Ok(g) => out.push(g),
            Err(misses) => {
                let binding = misses
                    .iter()
                    .max_by_key(|(_, &n)| n)
                    .map(|(axis, n)| format!("{axis} ({n} of {retries} samples rejected)"))
                    .unwrap_or_else(|| "no samples drawn".into());
                return Err(Error::InfeasibleConstraints { binding });
            }
        }
    }
    Ok(out)
}

/// One line of the operator trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub generation: usize,
    pub individual: usize,
    pub operator: String,
    pub accepted: bool,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.generation,
            self.individual,
            self.operator,
            if self.accepted { "accepted" } else { "rejected" }
        )
    }
}

/// Offspring of one generation plus the operator trace.
pub struct Offspring {
    pub genes: Vec<Gene>,
    pub trace: Vec<TraceEntry>,
}

/// Generate `population.len()` legal, feasible offspring.
///
/// Parents are paired after a uniform shuffle; each pair is crossed over
/// with probability `p_co` and each child is then mutated. A child that
/// violates the constraints is regenerated, up to [`OFFSPRING_ATTEMPTS`]
/// times, before its parent is cloned instead.
pub fn make_offspring(
    population: &[Gene],
    mutation: &MutationConfig,
    co: &CrossoverConfig,
    space: &SearchSpace,
    feasibility: &Feasibility<'_>,
    seed: u64,
    generation: usize,
) -> Offspring {
    let gen = generation as u64;
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.shuffle(&mut stream(seed, gen, u64::MAX));
    let cap = space.cap();
    let pairs: Vec<&[usize]> = order.chunks(2).collect();

    let results: Vec<(Vec<Gene>, Vec<TraceEntry>)> = pairs
        .par_iter()
        .enumerate()
        .map(|(pair_idx, idx)| {
            let mut rng = stream(seed, gen, pair_idx as u64);
            let parents: Vec<&Gene> = idx.iter().map(|&i| &population[i]).collect();
            let mut slots: Vec<Option<Gene>> = vec![None; parents.len()];
            let mut trace = Vec::new();
            for _ in 0..OFFSPRING_ATTEMPTS {
                let mut children: Vec<(Gene, Vec<String>)> =
                    parents.iter().map(|g| ((*g).clone(), Vec::new())).collect();
                if parents.len() == 2 && rng.gen_bool(co.p_co) {
                    let (a, b, kind) = crossover(parents[0], parents[1], cap, &mut rng);
                    let name = format!("Crossover{kind:?}");
                    children = vec![(a, vec![name.clone()]), (b, vec![name])];
                }
                for (slot, (child, ops)) in children.into_iter().enumerate() {
                    if slots[slot].is_some() {
                        continue;
                    }
                    let mut applied = Vec::new();
                    let child = mutate_gene(&child, mutation, space, &mut rng, &mut applied);
                    let ok = space.is_legal(&child) && feasibility.feasible(&child);
                    let individual = idx[slot];
                    for op in ops.iter().cloned().chain(applied.iter().map(|o| o.to_string())) {
                        trace.push(TraceEntry {
                            generation,
                            individual,
                            operator: op,
                            accepted: ok,
                        });
                    }
                    if ok {
                        slots[slot] = Some(child);
                    }
                }
                if slots.iter().all(Option::is_some) {
                    break;
                }
            }
            let genes = slots
                .into_iter()
                .zip(&parents)
                .map(|(s, p)| s.unwrap_or_else(|| (*p).clone()))
                .collect();
            (genes, trace)
        })
        .collect();

    let mut genes = Vec::with_capacity(population.len());
    let mut trace = Vec::new();
    for (g, t) in results {
        genes.extend(g);
        trace.extend(t);
    }
    Offspring { genes, trace }
}
