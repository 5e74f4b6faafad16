//! Gene encoding of PTC topologies and circuit assembly.
//!
//! A gene is `B` followed by a fixed-length list of block encodings. Each
//! block is a phase-shifter column, a coupler layer (`dc`, a partition of the
//! `K` wires into coupler port counts) and a crossing layer (`cr`, a
//! permutation). The first `B/2` blocks form `U`, the next `B/2` form `V`,
//! and the rest of the list is an inactive tail.
//!
//! Light traverses blocks in list order and, inside a block, the phase
//! column, the coupler layer and the crossing layer in that order, so a
//! unitary is `M_last * ... * M_0` with `M_b = P_b T_b R_b`. The weight is
//! `W = U diag(sigma) V`: light enters `V` first.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::device::{validate_partition, validate_permutation};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// One block of the gene: coupler partition plus crossing permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockGene {
    pub dc: Vec<usize>,
    pub cr: Vec<usize>,
}

impl BlockGene {
    /// Bare waveguides and no crossings.
    pub fn identity(k: usize) -> Self {
        Self {
            dc: vec![1; k],
            cr: (0..k).collect(),
        }
    }

    pub fn new(dc: Vec<usize>, cr: Vec<usize>) -> Self {
        Self { dc, cr }
    }

    fn check(&self, k: usize) -> Result<()> {
        validate_partition(&self.dc, k)?;
        if self.cr.len() != k {
            return Err(Error::InvalidPermutation(format!(
                "{} crossing indices for {k} wires",
                self.cr.len()
            )));
        }
        validate_permutation(&self.cr)
    }

    /// `(offset, ports)` of every coupler-layer entry.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.dc.iter().scan(0usize, |off, &n| {
            let s = (*off, n);
            *off += n;
            Some(s)
        })
    }
}

/// Compact integer encoding of a topology.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gene {
    pub k: usize,
    #[serde(rename = "B")]
    pub active_blocks: usize,
    pub blocks: Vec<BlockGene>,
}

/// Decoded circuit: the `U` and `V` block lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    pub k: usize,
    pub u_blocks: Vec<BlockGene>,
    pub v_blocks: Vec<BlockGene>,
}

/// Maximum crossings per layer, `K(K/2 - 1)/4` (a full perfect shuffle).
pub fn crossing_cap(k: usize) -> usize {
    let half = k / 2;
    if k % 2 == 0 {
        half * half.saturating_sub(1) / 2
    } else {
        // K(K/2 - 1)/4 rounded down for odd K
        let v = k as f64 * (k as f64 / 2.0 - 1.0) / 4.0;
        v.max(0.0).floor() as usize
    }
}

/// Number of waveguide crossings of a routing layer (its inversion count).
pub fn count_crossings(cr: &[usize]) -> Result<usize> {
    validate_permutation(cr)?;
    Ok(inversions(cr))
}

pub(crate) fn inversions(p: &[usize]) -> usize {
    let mut n = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                n += 1;
            }
        }
    }
    n
}

impl Gene {
    pub fn new(k: usize, active_blocks: usize, blocks: Vec<BlockGene>) -> Self {
        Self {
            k,
            active_blocks,
            blocks,
        }
    }

    pub fn capacity(&self) -> usize {
        self.blocks.len()
    }

    pub fn active(&self) -> &[BlockGene] {
        &self.blocks[..self.active_blocks.min(self.blocks.len())]
    }

    /// Structural checks shared by every consumer: block shapes, even `B`
    /// within the list length and the per-layer crossing cap.
    pub fn check_structure(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::IllegalGene("K must be at least 1".into()));
        }
        if self.active_blocks % 2 != 0 {
            return Err(Error::IllegalGene(format!(
                "B = {} is odd",
                self.active_blocks
            )));
        }
        if self.active_blocks > self.blocks.len() {
            return Err(Error::IllegalGene(format!(
                "B = {} exceeds the {} encoded blocks",
                self.active_blocks,
                self.blocks.len()
            )));
        }
        let cap = crossing_cap(self.k);
        for (i, b) in self.blocks.iter().enumerate() {
            b.check(self.k)
                .map_err(|e| Error::IllegalGene(format!("block {i}: {e}")))?;
            let c = inversions(&b.cr);
            if c > cap {
                return Err(Error::IllegalGene(format!(
                    "block {i}: {c} crossings exceed the cap of {cap}"
                )));
            }
        }
        Ok(())
    }

    pub fn decode(&self) -> Result<Topology> {
        self.check_structure()?;
        let half = self.active_blocks / 2;
        Ok(Topology {
            k: self.k,
            u_blocks: self.blocks[..half].to_vec(),
            v_blocks: self.blocks[half..self.active_blocks].to_vec(),
        })
    }

    /// Resize the block list to `capacity`, refilling a grown tail with
    /// copies of the front blocks.
    pub fn with_capacity(mut self, capacity: usize) -> Result<Gene> {
        if capacity < self.active_blocks {
            return Err(Error::IllegalGene(format!(
                "capacity {capacity} below B = {}",
                self.active_blocks
            )));
        }
        if self.blocks.is_empty() && capacity > 0 {
            self.blocks.push(BlockGene::identity(self.k));
        }
        let n = self.blocks.len();
        for i in n..capacity {
            let src = self.blocks[i % n].clone();
            self.blocks.push(src);
        }
        self.blocks.truncate(capacity);
        Ok(self)
    }

    /// Single-line log form `B | dc;cr | dc;cr | ...`.
    pub fn to_text(&self) -> String {
        let mut s = self.active_blocks.to_string();
        if self.blocks.is_empty() {
            s.push_str(&format!(" | k={}", self.k));
        }
        for b in &self.blocks {
            s.push_str(" | ");
            s.push_str(&join(&b.dc));
            s.push(';');
            s.push_str(&join(&b.cr));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Gene> {
        let bad = |msg: &str| Error::Config(format!("gene text `{text}`: {msg}"));
        let mut parts = text.split('|').map(str::trim);
        let active_blocks = parts
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| bad("missing B"))?;
        let mut blocks = Vec::new();
        let mut k = None;
        for part in parts {
            if let Some(kk) = part.strip_prefix("k=") {
                k = Some(kk.parse::<usize>().map_err(|_| bad("bad k"))?);
                continue;
            }
            let (dc, cr) = part.split_once(';').ok_or_else(|| bad("block without `;`"))?;
            let block = BlockGene {
                dc: split_nums(dc).ok_or_else(|| bad("bad dc entry"))?,
                cr: split_nums(cr).ok_or_else(|| bad("bad cr entry"))?,
            };
            k.get_or_insert(block.cr.len());
            blocks.push(block);
        }
        let k = k.ok_or_else(|| bad("cannot infer K"))?;
        let gene = Gene::new(k, active_blocks, blocks);
        gene.check_structure()?;
        Ok(gene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("gene serializes")
    }

    pub fn from_json(text: &str) -> Result<Gene> {
        let gene: Gene =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("gene JSON: {e}")))?;
        gene.check_structure()?;
        Ok(gene)
    }
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn split_nums(s: &str) -> Option<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

impl fmt::Display for Gene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Gene {
    type Err = Error;

    fn from_str(s: &str) -> Result<Gene> {
        Gene::from_text(s)
    }
}

impl Topology {
    pub fn empty(k: usize) -> Self {
        Self {
            k,
            u_blocks: Vec::new(),
            v_blocks: Vec::new(),
        }
    }

    pub fn block_count(&self) -> usize {
        self.u_blocks.len() + self.v_blocks.len()
    }

    /// All blocks, `U` first.
    pub fn blocks(&self) -> impl Iterator<Item = &BlockGene> {
        self.u_blocks.iter().chain(&self.v_blocks)
    }

    pub fn encode(&self) -> Gene {
        Gene::new(self.k, self.block_count(), self.blocks().cloned().collect())
    }

    /// Transfer matrix of the `U` half.
    pub fn unitary_u(&self, phases: &[Vec<f64>]) -> Result<ComplexMatrix> {
        assemble_unitary(self.k, &self.u_blocks, phases)
    }

    /// Transfer matrix of the `V` half.
    pub fn unitary_v(&self, phases: &[Vec<f64>]) -> Result<ComplexMatrix> {
        assemble_unitary(self.k, &self.v_blocks, phases)
    }

    /// `W = U diag(sigma) V`; `phases` lists one column per block, `U` first.
    pub fn assemble_weight(&self, phases: &[Vec<f64>], sigma: &[C64]) -> Result<ComplexMatrix> {
        if phases.len() != self.block_count() {
            return Err(Error::InvalidArgument(format!(
                "{} phase columns for {} blocks",
                phases.len(),
                self.block_count()
            )));
        }
        if sigma.len() != self.k {
            return Err(Error::InvalidArgument(format!(
                "{} singular values for K = {}",
                sigma.len(),
                self.k
            )));
        }
        if sigma.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidArgument("non-finite sigma".into()));
        }
        let (pu, pv) = phases.split_at(self.u_blocks.len());
        let mut state = self.unitary_v(pv)?;
        for (r, s) in sigma.iter().enumerate() {
            for z in state.row_mut(r) {
                *z *= s;
            }
        }
        apply_blocks(&mut state, &self.u_blocks, pu)?;
        Ok(state)
    }
}

static MMI_BANK: OnceLock<Vec<ComplexMatrix>> = OnceLock::new();
const MMI_BANK_SIZE: usize = 64;

/// Cached MMI transfer matrix.
pub(crate) fn mmi(n: usize) -> std::borrow::Cow<'static, ComplexMatrix> {
    let bank = MMI_BANK.get_or_init(|| {
        (1..=MMI_BANK_SIZE)
            .map(|n| crate::device::mmi_transfer(n).expect("n >= 1"))
            .collect()
    });
    match bank.get(n.wrapping_sub(1)) {
        Some(m) => std::borrow::Cow::Borrowed(m),
        None => std::borrow::Cow::Owned(crate::device::mmi_transfer(n).expect("n >= 1")),
    }
}

/// Apply the phase column of one block to the rows of `state`.
pub(crate) fn apply_phases(state: &mut ComplexMatrix, phases: &[f64]) {
    for (r, &phi) in phases.iter().enumerate() {
        let rot = C64::from_polar(1.0, -phi);
        for z in state.row_mut(r) {
            *z *= rot;
        }
    }
}

/// Apply a coupler layer; `adjoint` applies `T^H` instead of `T`.
pub(crate) fn apply_couplers(state: &mut ComplexMatrix, block: &BlockGene, adjoint: bool) {
    let cols = state.cols();
    let mut tmp = vec![C64::new(0.0, 0.0); cols];
    let mut seg_rows: Vec<Vec<C64>> = Vec::new();
    for (off, n) in block.segments() {
        let m = mmi(n);
        seg_rows.clear();
        seg_rows.extend((0..n).map(|r| state.row(off + r).to_vec()));
        for l in 0..n {
            tmp.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for (kk, src) in seg_rows.iter().enumerate() {
                let coef = if adjoint { m[(kk, l)].conj() } else { m[(l, kk)] };
                for (t, s) in tmp.iter_mut().zip(src) {
                    *t += coef * s;
                }
            }
            state.row_mut(off + l).copy_from_slice(&tmp);
        }
    }
}

/// Route rows: row `i` moves to row `cr[i]` (or back, for the adjoint).
pub(crate) fn apply_routing(state: &mut ComplexMatrix, cr: &[usize], adjoint: bool) {
    let old = state.clone();
    for (i, &o) in cr.iter().enumerate() {
        let (dst, src) = if adjoint { (i, o) } else { (o, i) };
        state.row_mut(dst).copy_from_slice(old.row(src));
    }
}

pub(crate) fn apply_block(state: &mut ComplexMatrix, block: &BlockGene, phases: &[f64]) {
    apply_phases(state, phases);
    apply_couplers(state, block, false);
    apply_routing(state, &block.cr, false);
}

fn apply_blocks(state: &mut ComplexMatrix, blocks: &[BlockGene], phases: &[Vec<f64>]) -> Result<()> {
    for (b, p) in blocks.iter().zip(phases) {
        apply_block(state, b, p);
    }
    Ok(())
}

fn check_phase_shapes(k: usize, blocks: &[BlockGene], phases: &[Vec<f64>]) -> Result<()> {
    if phases.len() != blocks.len() {
        return Err(Error::InvalidArgument(format!(
            "{} phase columns for {} blocks",
            phases.len(),
            blocks.len()
        )));
    }
    for (i, (b, p)) in blocks.iter().zip(phases).enumerate() {
        if p.len() != k {
            return Err(Error::InvalidArgument(format!(
                "phase column {i} has {} entries, expected {k}",
                p.len()
            )));
        }
        b.check(k)?;
    }
    Ok(())
}

/// Product of the block transfer matrices in circuit order.
pub fn assemble_unitary(
    k: usize,
    blocks: &[BlockGene],
    phases: &[Vec<f64>],
) -> Result<ComplexMatrix> {
    check_phase_shapes(k, blocks, phases)?;
    let mut state = ComplexMatrix::identity(k);
    apply_blocks(&mut state, blocks, phases)?;
    Ok(state)
}

/// Manual designs expressed in the block skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineStyle {
    MziClements,
    Butterfly,
    MmiInterlaced,
}

impl BaselineStyle {
    pub const ALL: [BaselineStyle; 3] = [
        BaselineStyle::MziClements,
        BaselineStyle::Butterfly,
        BaselineStyle::MmiInterlaced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineStyle::MziClements => "mzi-clements",
            BaselineStyle::Butterfly => "butterfly",
            BaselineStyle::MmiInterlaced => "mmi-interlaced",
        }
    }
}

impl FromStr for BaselineStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mzi-clements" | "mzi" => Ok(BaselineStyle::MziClements),
            "butterfly" => Ok(BaselineStyle::Butterfly),
            "mmi-interlaced" | "mmi" => Ok(BaselineStyle::MmiInterlaced),
            other => Err(Error::InvalidArgument(format!("unknown baseline `{other}`"))),
        }
    }
}

impl fmt::Display for BaselineStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pairs of adjacent wires starting at `start`, bare waveguides at the edges.
fn pair_layer(k: usize, start: usize) -> Vec<usize> {
    let mut dc = vec![1; start.min(k)];
    let mut left = k - dc.len();
    while left >= 2 {
        dc.push(2);
        left -= 2;
    }
    dc.extend(std::iter::repeat(1).take(left));
    dc
}

/// Perfect shuffle applied independently inside each group of `group` wires.
fn grouped_shuffle(k: usize, group: usize) -> Vec<usize> {
    let half = group / 2;
    (0..k)
        .map(|x| {
            let base = x - x % group;
            let r = x % group;
            if r < half {
                base + 2 * r
            } else {
                base + 2 * (r - half) + 1
            }
        })
        .collect()
}

/// Build the gene of a manual design.
///
/// * `mzi-clements`: `K` MZI columns per unitary, each two blocks of 2-port
///   couplers on even (then odd) wire pairs, no crossings.
/// * `butterfly`: `log2 K` blocks per unitary of dense 2-port couplers; the
///   crossing layer after stage `s` is a perfect shuffle inside groups of
///   `2^(s+2)` wires, the last stage has none.
/// * `mmi-interlaced`: `ceil(log2 K)` blocks per unitary, each a single
///   `K`-port MMI without crossings.
pub fn make_baseline(style: BaselineStyle, k: usize) -> Result<Gene> {
    let per_unitary: Vec<BlockGene> = match style {
        BaselineStyle::MziClements => {
            if k < 2 {
                return Err(Error::InvalidArgument("MZI mesh needs K >= 2".into()));
            }
            (0..k)
                .flat_map(|col| {
                    let b = BlockGene::new(pair_layer(k, col % 2), (0..k).collect());
                    [b.clone(), b]
                })
                .collect()
        }
        BaselineStyle::Butterfly => {
            if k < 2 || !k.is_power_of_two() {
                return Err(Error::InvalidArgument(format!(
                    "butterfly mesh needs a power-of-two K >= 2, got {k}"
                )));
            }
            let stages = k.trailing_zeros() as usize;
            (0..stages)
                .map(|s| {
                    let cr = if s + 1 < stages {
                        grouped_shuffle(k, 1 << (s + 2))
                    } else {
                        (0..k).collect()
                    };
                    BlockGene::new(vec![2; k / 2], cr)
                })
                .collect()
        }
        BaselineStyle::MmiInterlaced => {
            if k < 2 {
                return Err(Error::InvalidArgument("MMI array needs K >= 2".into()));
            }
            let depth = (usize::BITS - (k - 1).leading_zeros()) as usize;
            vec![BlockGene::new(vec![k], (0..k).collect()); depth.max(1)]
        }
    };
    let mut blocks = per_unitary.clone();
    blocks.extend(per_unitary);
    let gene = Gene::new(k, blocks.len(), blocks);
    gene.check_structure()?;
    Ok(gene)
}
