//! Training-free accuracy proxy: parameter count, weight density and a
//! gradient signal-to-noise score, combined with fixed weights.

use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::rng::{stream, Rng};
use crate::topology::{apply_couplers, apply_phases, apply_routing, BlockGene, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxyWeights {
    pub c_zico: f64,
    pub c_param: f64,
    pub c_sparsity: f64,
}

impl Default for ProxyWeights {
    fn default() -> Self {
        Self {
            c_zico: 0.015,
            c_param: 0.561,
            c_sparsity: 0.175,
        }
    }
}

impl ProxyWeights {
    pub fn new(c_zico: f64, c_param: f64, c_sparsity: f64) -> Result<Self> {
        let w = Self {
            c_zico,
            c_param,
            c_sparsity,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if [self.c_zico, self.c_param, self.c_sparsity]
            .iter()
            .all(|c| c.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidArgument("proxy weights must be finite".into()))
        }
    }

    pub fn combine(&self, s_zico: f64, s_param: f64, s_sparsity: f64) -> f64 {
        self.c_zico * s_zico + self.c_param * s_param + self.c_sparsity * s_sparsity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBundle {
    pub s_zico: f64,
    pub s_param: f64,
    pub s_sparsity: f64,
    pub combined: f64,
}

impl ScoreBundle {
    pub fn new(weights: &ProxyWeights, s_zico: f64, s_param: f64, s_sparsity: f64) -> Self {
        Self {
            s_zico,
            s_param,
            s_sparsity,
            combined: weights.combine(s_zico, s_param, s_sparsity),
        }
    }

    pub fn reweight(&self, weights: &ProxyWeights) -> Self {
        Self::new(weights, self.s_zico, self.s_param, self.s_sparsity)
    }
}

/// How the loss reads the output field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    /// Squared error on the complex field.
    #[default]
    Field,
    /// Squared error on detected power `|z|^2` against `|y|^2`.
    Intensity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyConfig {
    pub weights: ProxyWeights,
    pub sparsity_samples: usize,
    pub sparsity_threshold: f64,
    pub n_batches: usize,
    pub batch_size: usize,
    pub readout: Readout,
}

impl Default for ProxyConfig {
    fn default() -> Self {
        Self {
            weights: ProxyWeights::default(),
            sparsity_samples: 8,
            sparsity_threshold: 1e-8,
            n_batches: 4,
            batch_size: 16,
            readout: Readout::Field,
        }
    }
}

/// Effective phase shifters over `K^2`.
///
/// A phase shifter on a bare waveguide commutes through the crossing layer
/// and merges with the next column of the same unitary.
pub fn param_score(topology: &Topology) -> f64 {
    let k = topology.k;
    if k == 0 {
        return 0.0;
    }
    let merged = |blocks: &[BlockGene]| -> usize {
        blocks
            .iter()
            .take(blocks.len().saturating_sub(1))
            .map(|b| b.dc.iter().filter(|&&n| n == 1).count())
            .sum()
    };
    let total = topology.block_count() * k;
    let effective = total - merged(&topology.u_blocks) - merged(&topology.v_blocks);
    effective as f64 / (k * k) as f64
}

pub fn random_phases(topology: &Topology, rng: &mut Rng) -> Vec<Vec<f64>> {
    (0..topology.block_count())
        .map(|_| (0..topology.k).map(|_| rng.gen_range(0.0..2.0 * PI)).collect())
        .collect()
}

/// Mean fraction of `|U V|` entries above `threshold` under random phases.
pub fn sparsity_score(topology: &Topology, rng: &mut Rng, samples: usize, threshold: f64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sparsity needs at least one sample".into()));
    }
    let k = topology.k;
    let ones = vec![C64::new(1.0, 0.0); k];
    let mut total = 0.0;
    for _ in 0..samples {
        let phases = random_phases(topology, rng);
        let w = topology.assemble_weight(&phases, &ones)?;
        let dense = w.as_slice().iter().filter(|z| z.norm() > threshold).count();
        total += dense as f64 / (k * k) as f64;
    }
    Ok(total / samples as f64)
}

/// Inputs and targets, one sample per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub inputs: ComplexMatrix,
    pub targets: ComplexMatrix,
}

impl Batch {
    pub fn new(inputs: ComplexMatrix, targets: ComplexMatrix) -> Result<Self> {
        if inputs.rows() != targets.rows() || inputs.cols() != targets.cols() || inputs.cols() == 0 {
            return Err(Error::InvalidArgument(format!(
                "batch shapes {}x{} and {}x{}",
                inputs.rows(),
                inputs.cols(),
                targets.rows(),
                targets.cols()
            )));
        }
        Ok(Self { inputs, targets })
    }

    /// Complex Gaussian inputs and targets.
    pub fn gaussian(k: usize, size: usize, rng: &mut Rng) -> Self {
        let mut draw = || {
            let data = (0..k * size)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            ComplexMatrix::from_vec(k, size, data).expect("shape matches")
        };
        let inputs = draw();
        let targets = draw();
        Self { inputs, targets }
    }

    pub fn size(&self) -> usize {
        self.inputs.cols()
    }
}

enum Stage<'a> {
    Block { block: &'a BlockGene, col: usize },
    Sigma,
}

/// Light order: `V` blocks, `sigma`, then `U` blocks. Columns index the
/// phase list, which is `U` first.
fn stages(topology: &Topology) -> Vec<Stage<'_>> {
    let nu = topology.u_blocks.len();
    let mut out: Vec<Stage<'_>> = topology
        .v_blocks
        .iter()
        .enumerate()
        .map(|(i, block)| Stage::Block { block, col: nu + i })
        .collect();
    out.push(Stage::Sigma);
    out.extend(
        topology
            .u_blocks
            .iter()
            .enumerate()
            .map(|(i, block)| Stage::Block { block, col: i }),
    );
    out
}

fn check_shapes(topology: &Topology, phases: &[Vec<f64>], sigma: &[C64], batch: &Batch) -> Result<()> {
    let k = topology.k;
    if phases.len() != topology.block_count() || phases.iter().any(|p| p.len() != k) {
        return Err(Error::InvalidArgument(format!(
            "phases must be {} columns of {k}",
            topology.block_count()
        )));
    }
    if sigma.len() != k {
        return Err(Error::InvalidArgument(format!("{} singular values for K = {k}", sigma.len())));
    }
    if batch.inputs.rows() != k || batch.targets.rows() != k {
        return Err(Error::InvalidArgument(format!(
            "batch has {} rows for K = {k}",
            batch.inputs.rows()
        )));
    }
    if batch.size() == 0 {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    Ok(())
}

fn scale_rows(state: &mut ComplexMatrix, factors: impl Iterator<Item = C64>) {
    for (r, f) in factors.enumerate() {
        for z in state.row_mut(r) {
            *z *= f;
        }
    }
}

/// Forward pass; returns the output and, when `keep`, the state right after
/// each phase column.
fn forward(
    topology: &Topology,
    phases: &[Vec<f64>],
    sigma: &[C64],
    inputs: &ComplexMatrix,
    keep: bool,
) -> (ComplexMatrix, Vec<Option<ComplexMatrix>>) {
    let mut saved = vec![None; phases.len()];
    let mut state = inputs.clone();
    for stage in stages(topology) {
        match stage {
            Stage::Block { block, col } => {
                apply_phases(&mut state, &phases[col]);
                if keep {
                    saved[col] = Some(state.clone());
                }
                apply_couplers(&mut state, block, false);
                apply_routing(&mut state, &block.cr, false);
            }
            Stage::Sigma => scale_rows(&mut state, sigma.iter().copied()),
        }
    }
    (state, saved)
}

/// Loss and its gradient with respect to the output field, written as
/// `dL/dRe z + j dL/dIm z`.
fn loss_and_seed(out: &ComplexMatrix, targets: &ComplexMatrix, readout: Readout) -> (f64, ComplexMatrix) {
    let n = out.cols() as f64;
    let mut grad = ComplexMatrix::zeros(out.rows(), out.cols());
    let mut loss = 0.0;
    for r in 0..out.rows() {
        for c in 0..out.cols() {
            let z = out[(r, c)];
            let y = targets[(r, c)];
            match readout {
                Readout::Field => {
                    let d = z - y;
                    loss += d.norm_sqr();
                    grad[(r, c)] = d * (2.0 / n);
                }
                Readout::Intensity => {
                    let d = z.norm_sqr() - y.norm_sqr();
                    loss += d * d;
                    grad[(r, c)] = z * (4.0 * d / n);
                }
            }
        }
    }
    (loss / n, grad)
}

/// Mean squared error of the circuit on `batch`.
pub fn loss(
    topology: &Topology,
    phases: &[Vec<f64>],
    sigma: &[C64],
    batch: &Batch,
    readout: Readout,
) -> Result<f64> {
    check_shapes(topology, phases, sigma, batch)?;
    let (out, _) = forward(topology, phases, sigma, &batch.inputs, false);
    Ok(loss_and_seed(&out, &batch.targets, readout).0)
}

/// Loss and its exact gradient with respect to every phase, laid out like
/// `phases`.
pub fn phase_gradients(
    topology: &Topology,
    phases: &[Vec<f64>],
    sigma: &[C64],
    batch: &Batch,
    readout: Readout,
) -> Result<(f64, Vec<Vec<f64>>)> {
    check_shapes(topology, phases, sigma, batch)?;
    let (out, saved) = forward(topology, phases, sigma, &batch.inputs, true);
    let (l, mut g) = loss_and_seed(&out, &batch.targets, readout);
    let mut grads = vec![vec![0.0; topology.k]; phases.len()];
    for stage in stages(topology).into_iter().rev() {
        match stage {
            Stage::Block { block, col } => {
                apply_routing(&mut g, &block.cr, true);
                apply_couplers(&mut g, block, true);
                let z = saved[col].as_ref().expect("saved in forward pass");
                for (r, slot) in grads[col].iter_mut().enumerate() {
                    *slot = g
                        .row(r)
                        .iter()
                        .zip(z.row(r))
                        .map(|(gi, zi)| (gi.conj() * C64::new(0.0, -1.0) * zi).re)
                        .sum();
                }
                scale_rows(&mut g, phases[col].iter().map(|&p| C64::from_polar(1.0, p)));
            }
            Stage::Sigma => scale_rows(&mut g, sigma.iter().map(|s| s.conj())),
        }
    }
    Ok((l, grads))
}

/// Gradient signal-to-noise score over synthetic batches at fixed random
/// phases, one parameter group per phase column.
pub fn zico_score(
    topology: &Topology,
    rng: &mut Rng,
    n_batches: usize,
    batch_size: usize,
    readout: Readout,
) -> Result<f64> {
    if n_batches < 2 {
        return Err(Error::InvalidArgument(format!(
            "zico needs at least 2 batches, got {n_batches}"
        )));
    }
    if batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    let k = topology.k;
    let cols = topology.block_count();
    if cols == 0 {
        return Ok(0.0);
    }
    let phases = random_phases(topology, rng);
    let sigma = vec![C64::new(1.0, 0.0); k];
    let mut per_batch = Vec::with_capacity(n_batches);
    for _ in 0..n_batches {
        let batch = Batch::gaussian(k, batch_size, rng);
        per_batch.push(phase_gradients(topology, &phases, &sigma, &batch, readout)?.1);
    }
    Ok(zico_from_gradients(&per_batch))
}

/// `sum_groups log(sum_theta mean|g| / std(g))` with the population standard
/// deviation; zero-deviation parameters and empty groups are skipped.
pub fn zico_from_gradients(per_batch: &[Vec<Vec<f64>>]) -> f64 {
    let Some(first) = per_batch.first() else {
        return 0.0;
    };
    let n = per_batch.len() as f64;
    let mut score = 0.0;
    for (col, group) in first.iter().enumerate() {
        let mut sum = 0.0;
        for p in 0..group.len() {
            let vals: Vec<f64> = per_batch.iter().map(|g| g[col][p]).collect();
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            if std > 0.0 && std.is_finite() {
                sum += vals.iter().map(|v| v.abs()).sum::<f64>() / n / std;
            }
        }
        if sum > 0.0 {
            score += sum.ln();
        }
    }
    score
}

/// All three sub-scores and their weighted sum. Sub-scores draw from
/// independent streams of `seed`.
pub fn accuracy_score(topology: &Topology, cfg: &ProxyConfig, seed: u64) -> Result<ScoreBundle> {
    cfg.weights.validate()?;
    let s_param = param_score(topology);
    let s_sparsity = sparsity_score(
        topology,
        &mut stream(seed, 1, 0),
        cfg.sparsity_samples,
        cfg.sparsity_threshold,
    )?;
    let s_zico = zico_score(
        topology,
        &mut stream(seed, 2, 0),
        cfg.n_batches,
        cfg.batch_size,
        cfg.readout,
    )?;
    Ok(ScoreBundle::new(&cfg.weights, s_zico, s_param, s_sparsity))
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &t in &idx[i..=j] {
            ranks[t] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

/// Spearman rank correlation; a constant input gives 0.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("spearman needs at least 2 points".into()));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("NaN in spearman input".into()));
    }
    Ok(pearson(&average_ranks(xs), &average_ranks(ys)).clamp(-1.0, 1.0))
}

/// A topology's sub-scores paired with its measured accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSample {
    pub id: String,
    pub accuracy: f64,
    pub scores: ScoreBundle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub weights: ProxyWeights,
    pub spearman: f64,
    pub default_spearman: f64,
    pub grid_points: usize,
}

/// Best Spearman over non-negative weights on the simplex with spacing
/// `1/steps` (the ranking is scale invariant).
pub fn calibrate(samples: &[CalibrationSample], steps: usize) -> Result<CalibrationResult> {
    if steps == 0 {
        return Err(Error::InvalidArgument("grid needs at least one step".into()));
    }
    let acc: Vec<f64> = samples.iter().map(|s| s.accuracy).collect();
    let rho = |w: &ProxyWeights| -> Result<f64> {
        let combined: Vec<f64> = samples
            .iter()
            .map(|s| w.combine(s.scores.s_zico, s.scores.s_param, s.scores.s_sparsity))
            .collect();
        spearman(&combined, &acc)
    };
    let default_spearman = rho(&ProxyWeights::default())?;
    let mut best: Option<(ProxyWeights, f64)> = None;
    let mut grid_points = 0;
    for i in 0..=steps {
        for j in 0..=steps - i {
            let l = steps - i - j;
            let w = ProxyWeights {
                c_zico: i as f64 / steps as f64,
                c_param: j as f64 / steps as f64,
                c_sparsity: l as f64 / steps as f64,
            };
            let r = rho(&w)?;
            grid_points += 1;
            if best.map_or(true, |(_, b)| r > b) {
                best = Some((w, r));
            }
        }
    }
    let (weights, spearman) = best.expect("grid is non-empty");
    Ok(CalibrationResult {
        weights,
        spearman,
        default_spearman,
        grid_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::topology::{make_baseline, BaselineStyle, Gene};

    fn topo(k: usize, blocks: Vec<BlockGene>) -> Topology {
        let b = blocks.len();
        Gene::new(k, b, blocks).decode().unwrap()
    }

    #[test]
    fn param_score_merging() {
        let k = 8;
        let one = Topology {
            k,
            u_blocks: vec![BlockGene::new(vec![2; 4], (0..k).collect())],
            v_blocks: vec![],
        };
        assert!((param_score(&one) - 1.0 / 8.0).abs() < 1e-15);

        let bare = Topology {
            k,
            u_blocks: vec![BlockGene::identity(k); 2],
            v_blocks: vec![],
        };
        assert!((param_score(&bare) - 1.0 / 8.0).abs() < 1e-15);

        let coupled = Topology {
            k,
            u_blocks: vec![BlockGene::new(vec![2; 4], (0..k).collect()); 2],
            v_blocks: vec![],
        };
        assert!((param_score(&coupled) - 2.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn sparsity_extremes() {
        let mut rng = seeded(1);
        let empty = Topology::empty(8);
        assert_eq!(sparsity_score(&empty, &mut rng, 8, 1e-8).unwrap(), 1.0 / 8.0);

        let mmi = Topology {
            k: 8,
            u_blocks: vec![BlockGene::new(vec![8], (0..8).collect())],
            v_blocks: vec![],
        };
        assert_eq!(sparsity_score(&mmi, &mut rng, 4, 1e-8).unwrap(), 1.0);

        let bf = make_baseline(BaselineStyle::Butterfly, 16).unwrap().decode().unwrap();
        assert_eq!(sparsity_score(&bf, &mut rng, 4, 1e-8).unwrap(), 1.0);
    }

    #[test]
    fn zero_residual_has_zero_gradient() {
        let t = make_baseline(BaselineStyle::Butterfly, 4).unwrap().decode().unwrap();
        let mut rng = seeded(2);
        let phases = random_phases(&t, &mut rng);
        let sigma = vec![C64::new(0.7, 0.1); 4];
        let x = Batch::gaussian(4, 5, &mut rng).inputs;
        let (y, _) = forward(&t, &phases, &sigma, &x, false);
        let batch = Batch::new(x, y).unwrap();
        let (l, g) = phase_gradients(&t, &phases, &sigma, &batch, Readout::Field).unwrap();
        assert!(l < 1e-24);
        assert!(g.iter().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn duplicated_batch_keeps_gradient() {
        let t = make_baseline(BaselineStyle::MmiInterlaced, 8).unwrap().decode().unwrap();
        let mut rng = seeded(3);
        let phases = random_phases(&t, &mut rng);
        let sigma = vec![C64::new(1.0, 0.0); 8];
        let b = Batch::gaussian(8, 3, &mut rng);
        let cat = |m: &ComplexMatrix| {
            let mut data = Vec::new();
            for r in 0..m.rows() {
                data.extend_from_slice(m.row(r));
                data.extend_from_slice(m.row(r));
            }
            ComplexMatrix::from_vec(m.rows(), 2 * m.cols(), data).unwrap()
        };
        let doubled = Batch::new(cat(&b.inputs), cat(&b.targets)).unwrap();
        let (_, g1) = phase_gradients(&t, &phases, &sigma, &b, Readout::Field).unwrap();
        let (_, g2) = phase_gradients(&t, &phases, &sigma, &doubled, Readout::Field).unwrap();
        for (a, b) in g1.iter().flatten().zip(g2.iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_shape_errors() {
        let t = make_baseline(BaselineStyle::Butterfly, 4).unwrap().decode().unwrap();
        let mut rng = seeded(0);
        let batch = Batch::gaussian(4, 2, &mut rng);
        let sigma = vec![C64::new(1.0, 0.0); 4];
        assert!(phase_gradients(&t, &[], &sigma, &batch, Readout::Field).is_err());
        let phases = random_phases(&t, &mut rng);
        assert!(phase_gradients(&t, &phases, &sigma[..3], &batch, Readout::Field).is_err());
    }

    #[test]
    fn zico_edge_cases() {
        let mut rng = seeded(4);
        assert_eq!(zico_score(&Topology::empty(8), &mut rng, 4, 8, Readout::Field).unwrap(), 0.0);
        let t = topo(4, vec![BlockGene::new(vec![2, 2], vec![0, 1, 2, 3]); 2]);
        assert!(zico_score(&t, &mut rng, 1, 8, Readout::Field).is_err());

        let g = vec![
            vec![vec![1.0, 2.0]],
            vec![vec![3.0, 2.0]],
        ];
        // mean|g| = 2, std = 1 for the first entry; the second has zero std.
        assert!((zico_from_gradients(&g) - 2f64.ln()).abs() < 1e-15);
        let swapped = vec![g[1].clone(), g[0].clone()];
        assert_eq!(zico_from_gradients(&g), zico_from_gradients(&swapped));
    }

    #[test]
    fn weighted_sum() {
        let b = ScoreBundle::new(&ProxyWeights::default(), 10.0, 0.5, 0.9);
        assert!((b.combined - 0.588).abs() < 1e-12);
        let p = ScoreBundle::new(&ProxyWeights::new(0.0, 1.0, 0.0).unwrap(), 10.0, 0.5, 0.9);
        assert_eq!(p.combined, 0.5);
        assert!(ProxyWeights::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn accuracy_score_is_deterministic() {
        let t = make_baseline(BaselineStyle::Butterfly, 8).unwrap().decode().unwrap();
        let cfg = ProxyConfig::default();
        let a = accuracy_score(&t, &cfg, 42).unwrap();
        let b = accuracy_score(&t, &cfg, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.s_zico.is_finite());
    }

    #[test]
    fn spearman_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((spearman(&xs, &xs).unwrap() - 1.0).abs() < 1e-15);
        let rev: Vec<f64> = xs.iter().rev().copied().collect();
        assert!((spearman(&xs, &rev).unwrap() + 1.0).abs() < 1e-15);
        let ys = [2.0, 1.0, 4.0, 3.0, 5.0];
        assert!((spearman(&xs, &ys).unwrap() - 0.8).abs() < 1e-12);
        assert!(spearman(&xs, &ys[..4]).is_err());
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn calibration_finds_the_informative_score() {
        let samples: Vec<CalibrationSample> = (0..12)
            .map(|i| {
                let x = i as f64;
                CalibrationSample {
                    id: format!("g{i}"),
                    accuracy: x,
                    scores: ScoreBundle::new(&ProxyWeights::default(), -x * 3.0, (x * 1.7).sin(), x),
                }
            })
            .collect();
        let r = calibrate(&samples, 10).unwrap();
        assert_eq!(r.grid_points, 66);
        assert!((r.spearman - 1.0).abs() < 1e-12);
        assert!(r.weights.c_sparsity > 0.0);
    }
}
