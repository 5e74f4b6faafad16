//! Layout-aware area, power and latency estimates.
//!
//! Geometry is computed in um and um^2 and reported in mm^2; powers are mW,
//! latencies ps, losses dB. Compute density is TOPS/mm^2 and energy
//! efficiency TOPS/W.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pdk::Pdk;
use crate::topology::{make_baseline, BaselineStyle, BlockGene, Topology};

const UM2_PER_MM2: f64 = 1e6;

/// Placement of a crossing layer on the compact crossing array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingLayout {
    pub n_cols: usize,
    pub n_rows: usize,
    pub worst_wire_crossings: usize,
    pub total_swaps: usize,
}

/// Decompose a routing permutation into adjacent crossings.
///
/// Crossings come from odd-even transposition sorting of the destination
/// indices, then each crossing is pushed into the leftmost column not
/// blocked by an earlier crossing on the same wires.
pub fn layout_crossing_array(cr: &[usize]) -> CrossingLayout {
    let k = cr.len();
    let mut arr = cr.to_vec();
    let mut ready = vec![0usize; k];
    let mut per_col: Vec<usize> = Vec::new();
    let mut total = 0;
    let mut quiet = 0;
    let mut parity = 0;
    while quiet < 2 && k > 1 {
        let mut swapped = false;
        let mut i = parity;
        while i + 1 < k {
            if arr[i] > arr[i + 1] {
                arr.swap(i, i + 1);
                let col = ready[i].max(ready[i + 1]);
                ready[i] = col + 1;
                ready[i + 1] = col + 1;
                if per_col.len() <= col {
                    per_col.resize(col + 1, 0);
                }
                per_col[col] += 1;
                total += 1;
                swapped = true;
            }
            i += 2;
        }
        quiet = if swapped { 0 } else { quiet + 1 };
        parity ^= 1;
    }
    let worst = (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| (i < j && cr[i] > cr[j]) || (j < i && cr[j] > cr[i]))
                .count()
        })
        .max()
        .unwrap_or(0);
    CrossingLayout {
        n_cols: per_col.len(),
        n_rows: per_col.iter().copied().max().unwrap_or(0),
        worst_wire_crossings: worst,
        total_swaps: total,
    }
}

/// Longitudinal extent of a crossing array in um.
fn crossing_extent(layout: &CrossingLayout, pdk: &Pdk) -> f64 {
    if layout.n_cols == 0 {
        return 0.0;
    }
    let nc = layout.n_cols as f64;
    nc * pdk.cr.length + (nc - 1.0) * pdk.spacing.dl_cr
}

fn crossing_area(layout: &CrossingLayout, pdk: &Pdk) -> f64 {
    if layout.n_cols == 0 {
        return 0.0;
    }
    let nr = layout.n_rows as f64;
    crossing_extent(layout, pdk) * (nr * pdk.cr.width + (nr - 1.0) * pdk.spacing.dw_cr)
}

/// Length and loss of the longest coupler in a layer (zero for bare waveguides).
fn coupler_max(block: &BlockGene, pdk: &Pdk) -> Result<(f64, f64)> {
    let mut len: f64 = 0.0;
    let mut il: f64 = 0.0;
    for &n in &block.dc {
        if n == 1 {
            continue;
        }
        let c = pdk.coupler(n).ok_or(Error::MissingPdkEntry(n))?;
        len = len.max(c.length);
        il = il.max(c.insertion_loss);
    }
    Ok((len, il))
}

/// Footprint of the diagonal modulator column, in um^2.
fn sigma_area_um2(k: f64, pdk: &Pdk) -> f64 {
    let (dl, dw) = (pdk.spacing.dl, pdk.spacing.dw);
    let ly = pdk.ybranch.length;
    ((2.0 * k - 1.0) * dw + pdk.ps.width) * (pdk.ps.length + 2.0 * dl)
        + ((k - 1.0) * dw + ly) * (2.0 * ly + dw)
}

fn sigma_length(pdk: &Pdk) -> f64 {
    pdk.ps.length + 2.0 * pdk.spacing.dl + 2.0 * pdk.ybranch.length + pdk.spacing.dw
}

fn block_area_um2(k: f64, block: &BlockGene, pdk: &Pdk) -> Result<f64> {
    let (dl, dw) = (pdk.spacing.dl, pdk.spacing.dw);
    let (l_dc, _) = coupler_max(block, pdk)?;
    let layout = layout_crossing_array(&block.cr);
    Ok(pdk.ps.length * (pdk.ps.width + (k - 1.0) * dw)
        + l_dc * (k - 1.0) * dw
        + crossing_area(&layout, pdk)
        + (3.0 * (k - 1.0) * dw * dl + pdk.ps.width * dl))
}

/// Optical and electrical area in mm^2.
pub fn area(topology: &Topology, pdk: &Pdk) -> Result<(f64, f64)> {
    let k = topology.k as f64;
    let mut optical = sigma_area_um2(k, pdk);
    for b in topology.blocks() {
        optical += block_area_um2(k, b, pdk)?;
    }
    let e = &pdk.electrical;
    let electrical = k * (e.a_tia + e.a_pd + e.a_mzm + e.a_dac + e.a_adc);
    Ok((optical / UM2_PER_MM2, electrical))
}

/// Worst-case path loss in dB.
pub fn insertion_loss(topology: &Topology, pdk: &Pdk) -> Result<f64> {
    let mut il = pdk.ps.insertion_loss + 2.0 * pdk.ybranch.insertion_loss;
    for b in topology.blocks() {
        let (_, dc_il) = coupler_max(b, pdk)?;
        let worst = layout_crossing_array(&b.cr).worst_wire_crossings as f64;
        il += pdk.ps.insertion_loss + dc_il + worst * pdk.cr.insertion_loss;
    }
    Ok(il)
}

/// Longest optical path in um.
pub fn longest_path(topology: &Topology, pdk: &Pdk) -> Result<f64> {
    let mut len = sigma_length(pdk);
    for b in topology.blocks() {
        let (l_dc, _) = coupler_max(b, pdk)?;
        let ext = crossing_extent(&layout_crossing_array(&b.cr), pdk);
        len += pdk.ps.length + l_dc + ext + 3.0 * pdk.spacing.dl;
    }
    Ok(len)
}

/// `max(1/f, n_g L / c0 + tau_DAC + tau_PD)` in ps.
pub fn latency_for_path(path_um: f64, pdk: &Pdk) -> f64 {
    let cycle = 1000.0 / pdk.system.f;
    let optical = pdk.optics.n_g * path_um / pdk.optics.c0;
    cycle.max(optical + pdk.electrical.tau_dac + pdk.electrical.tau_pd)
}

pub fn latency(topology: &Topology, pdk: &Pdk) -> Result<f64> {
    Ok(latency_for_path(longest_path(topology, pdk)?, pdk))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub laser: f64,
    pub dac: f64,
    pub adc: f64,
    pub static_ps: f64,
    pub total: f64,
}

pub fn laser_power(il_db: f64, pdk: &Pdk) -> f64 {
    let b = pdk.system.b as f64;
    2f64.powf(b) * 10f64.powf((pdk.optics.s_pd + il_db) / 10.0) / pdk.optics.eta
}

/// Per-channel DAC and ADC power scaled from their reference operating point.
pub fn converter_power(pdk: &Pdk) -> (f64, f64) {
    let e = &pdk.electrical;
    let (b, b0) = (pdk.system.b as f64, e.b0 as f64);
    let (f, fs) = (pdk.system.f, e.f_s);
    let dac = b0 * 2f64.powf(b) * f / (b * 2f64.powf(b0) * fs) * e.p_dac0;
    let adc = b0 * f / (b * fs) * e.p_adc0;
    (dac, adc)
}

pub fn power(topology: &Topology, pdk: &Pdk) -> Result<PowerBreakdown> {
    if !(pdk.optics.eta > 0.0) || !(pdk.electrical.f_s > 0.0) {
        return Err(Error::InvalidPdk("eta and f_s must be positive".into()));
    }
    let il = insertion_loss(topology, pdk)?;
    Ok(power_with_il(topology, pdk, il))
}

fn power_with_il(topology: &Topology, pdk: &Pdk, il: f64) -> PowerBreakdown {
    let k = topology.k as f64;
    let e = &pdk.electrical;
    let laser = laser_power(il, pdk);
    let (dac, adc) = converter_power(pdk);
    let n_ps = (topology.block_count() + 1) as f64 * k;
    let static_ps = n_ps * pdk.ps.static_power;
    let total = laser + k * (e.p_mzm + dac + adc + e.p_tia + e.p_pd) + static_ps;
    PowerBreakdown {
        laser,
        dac,
        adc,
        static_ps,
        total,
    }
}

/// Compute density, energy efficiency and area-energy efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub cd: f64,
    pub ee: f64,
    pub aee: f64,
}

/// `CD = 2K^2 / (A tau)`, `EE = 2K^2 / (P tau)`, `AEE = EE / A` with `A` in
/// mm^2, `P` in mW and `tau` in ps.
pub fn cd_ee(area_total: f64, power_mw: f64, latency_ps: f64, k: usize) -> Result<Efficiency> {
    for (name, v) in [
        ("area", area_total),
        ("power", power_mw),
        ("latency", latency_ps),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    let ops = 2.0 * (k as f64) * (k as f64);
    let cd = ops / (area_total * latency_ps);
    let ee = ops * 1000.0 / (power_mw * latency_ps);
    Ok(Efficiency {
        cd,
        ee,
        aee: ee / area_total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub k: usize,
    pub area_optical: f64,
    pub area_electrical: f64,
    pub power: f64,
    pub laser_power: f64,
    pub latency: f64,
    pub insertion_loss: f64,
    pub longest_path: f64,
    pub cd: f64,
    pub ee: f64,
    pub aee: f64,
}

impl CostReport {
    pub fn area_total(&self) -> f64 {
        self.area_optical + self.area_electrical
    }

    /// Header matching [`CostReport::table_row`].
    pub fn table_header() -> &'static str {
        "K    Area(O+E)        Power     Latency   CD      EE       AEE"
    }

    /// One text row: area (optical+electrical), power, latency, CD, EE, AEE.
    pub fn table_row(&self) -> String {
        format!(
            "{:<4} {:>6.2}+{:<8.2} {:>8.2}  {:>7.2}  {:.3}  {:>7.3}  {:.3}",
            self.k,
            self.area_optical,
            self.area_electrical,
            self.power,
            self.latency,
            self.cd,
            self.ee,
            self.aee
        )
    }
}

/// Full cost evaluation of a decoded topology.
pub fn evaluate_cost(topology: &Topology, pdk: &Pdk) -> Result<CostReport> {
    let (area_optical, area_electrical) = area(topology, pdk)?;
    let il = insertion_loss(topology, pdk)?;
    let p = power_with_il(topology, pdk, il);
    let path = longest_path(topology, pdk)?;
    let tau = latency_for_path(path, pdk);
    let eff = cd_ee(area_optical + area_electrical, p.total, tau, topology.k)?;
    Ok(CostReport {
        k: topology.k,
        area_optical,
        area_electrical,
        power: p.total,
        laser_power: p.laser,
        latency: tau,
        insertion_loss: il,
        longest_path: path,
        cd: eff.cd,
        ee: eff.ee,
        aee: eff.aee,
    })
}

/// Closed interval `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    /// Distance to the nearest bound, negative when outside.
    pub fn slack(&self, v: f64) -> f64 {
        (v - self.min).min(self.max - v)
    }
}

/// Hardware constraints on total area (mm^2), power (mW) and latency (ps).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub area: Range,
    pub power: Range,
    pub latency: Range,
}

impl Constraints {
    pub fn unbounded() -> Self {
        let r = Range::new(0.0, f64::MAX);
        Self {
            area: r,
            power: r,
            latency: r,
        }
    }

    /// The 16x16 setting: area [18.31, 24.02] mm^2, power [50, 1000] mW,
    /// latency [100, 1000] ps.
    pub fn reference_k16() -> Self {
        Self {
            area: Range::new(18.31, 24.02),
            power: Range::new(50.0, 1000.0),
            latency: Range::new(100.0, 1000.0),
        }
    }

    /// Area window from 80% of the butterfly optical area to 50% of the
    /// MZI-mesh optical area (both plus electrical area); power and latency
    /// as in [`Constraints::reference_k16`].
    pub fn derived(k: usize, pdk: &Pdk) -> Result<Self> {
        let optical = |style| -> Result<(f64, f64)> {
            let t = make_baseline(style, k)?.decode()?;
            area(&t, pdk)
        };
        let (mzi_o, elec) = optical(BaselineStyle::MziClements)?;
        let low = match optical(BaselineStyle::Butterfly) {
            Ok((bfly_o, _)) => 0.8 * bfly_o,
            Err(_) => 0.0,
        };
        Ok(Self {
            area: Range::new(low + elec, 0.5 * mzi_o + elec),
            ..Self::reference_k16()
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in self.axes() {
            if !(r.min <= r.max) {
                return Err(Error::Config(format!(
                    "{name} constraint min {} exceeds max {}",
                    r.min, r.max
                )));
            }
        }
        Ok(())
    }

    fn axes(&self) -> [(&'static str, Range); 3] {
        [
            ("area", self.area),
            ("power", self.power),
            ("latency", self.latency),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSlack {
    pub axis: String,
    pub value: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub feasible: bool,
    pub violated: Vec<String>,
    pub slacks: Vec<AxisSlack>,
}

pub fn check_constraints(report: &CostReport, c: &Constraints) -> Verdict {
    let values = [report.area_total(), report.power, report.latency];
    let mut violated = Vec::new();
    let mut slacks = Vec::new();
    for ((name, range), v) in c.axes().into_iter().zip(values) {
        if !range.contains(v) {
            violated.push(name.to_string());
        }
        slacks.push(AxisSlack {
            axis: name.to_string(),
            value: v,
            slack: range.slack(v),
        });
    }
    Verdict {
        feasible: violated.is_empty(),
        violated,
        slacks,
    }
}
