//! Transfer matrices of the photonic primitives.
//!
//! All matrices act on column vectors (`out = M * in`). A circuit stage that
//! light reaches first is the rightmost factor of a product.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Transmission of an `n_ports`-port general-interference MMI coupler.
///
/// Entry `(l, k)` (1-indexed) is
/// `(-1)^(l+k) j e^{j pi/4} sqrt(1/N) exp(-j ((l-1/2) - (-1)^(l+k) (k-1/2))^2 pi / (4N))`.
/// A single port degenerates to the pure phase `e^{j 3pi/4}`.
pub fn mmi_transfer(n_ports: usize) -> Result<ComplexMatrix> {
    if n_ports == 0 {
        return Err(Error::InvalidArgument("MMI needs at least one port".into()));
    }
    let n = n_ports as f64;
    let prefactor = C64::new(0.0, 1.0) * C64::from_polar(1.0, FRAC_PI_4) * (1.0 / n).sqrt();
    let mut m = ComplexMatrix::zeros(n_ports, n_ports);
    for l in 1..=n_ports {
        for k in 1..=n_ports {
            let sign = if (l + k) % 2 == 0 { 1.0 } else { -1.0 };
            let arg = (l as f64 - 0.5) - sign * (k as f64 - 0.5);
            let phase = -arg * arg * PI / (4.0 * n);
            m[(l - 1, k - 1)] = prefactor * sign * C64::from_polar(1.0, phase);
        }
    }
    Ok(m)
}

/// `diag(e^{-j phi_1}, ..., e^{-j phi_K})`.
pub fn phase_shifter_column(phases: &[f64]) -> Result<ComplexMatrix> {
    if phases.is_empty() {
        return Err(Error::InvalidArgument("empty phase column".into()));
    }
    if let Some(p) = phases.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite phase {p}")));
    }
    let diag: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, -p)).collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// Check that `indices` is a bijection on `0..indices.len()`.
pub fn validate_permutation(indices: &[usize]) -> Result<()> {
    let mut seen = vec![false; indices.len()];
    for &i in indices {
        if i >= indices.len() {
            return Err(Error::InvalidPermutation(format!(
                "index {i} out of range for {} wires",
                indices.len()
            )));
        }
        if seen[i] {
            return Err(Error::InvalidPermutation(format!("index {i} repeated")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// 0/1 routing matrix sending input wire `i` to output position `indices[i]`.
///
/// With this orientation, a layer `p` followed by a layer `q` equals
/// `permutation_matrix(q) * permutation_matrix(p)`, i.e. the composed map
/// `i -> q[p[i]]`.
pub fn permutation_matrix(indices: &[usize]) -> Result<ComplexMatrix> {
    if indices.is_empty() {
        return Err(Error::InvalidPermutation("empty permutation".into()));
    }
    validate_permutation(indices)?;
    let mut m = ComplexMatrix::zeros(indices.len(), indices.len());
    for (i, &o) in indices.iter().enumerate() {
        m[(o, i)] = C64::new(1.0, 0.0);
    }
    Ok(m)
}

/// Check that a coupler partition covers exactly `k` wires.
pub fn validate_partition(partition: &[usize], k: usize) -> Result<()> {
    if partition.contains(&0) {
        return Err(Error::InvalidPartition(format!(
            "zero-port entry in {partition:?}"
        )));
    }
    let sum: usize = partition.iter().sum();
    if sum != k {
        return Err(Error::InvalidPartition(format!(
            "{partition:?} sums to {sum}, expected {k}"
        )));
    }
    Ok(())
}

/// Block-diagonal coupler layer built from one MMI per partition entry.
pub fn coupler_layer_matrix(partition: &[usize], k: usize) -> Result<ComplexMatrix> {
    validate_partition(partition, k)?;
    let blocks = partition
        .iter()
        .map(|&n| mmi_transfer(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexMatrix::block_diagonal(&blocks))
}
