//! C ABI over `ptc_forge`.
//!
//! Objects are opaque handles released with their `_free` function. Every
//! fallible call returns a [`PtcStatus`]; after a failure,
//! [`ptc_last_error`] describes it. Strings returned by the library are
//! released with [`ptc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ptc_forge::cli::execute_search;
use ptc_forge::cost::{check_constraints, evaluate_cost, Constraints, Range};
use ptc_forge::pdk::Pdk;
use ptc_forge::proxy::{accuracy_score, ProxyConfig};
use ptc_forge::search::{default_baselines, run_search, SearchConfig};
use ptc_forge::topology::{make_baseline, BaselineStyle, Gene};
use ptc_forge::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Infeasible = 3,
    Internal = 4,
}

/// Manual design families.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtcBaseline {
    MziClements = 0,
    Butterfly = 1,
    MmiInterlaced = 2,
}

/// Opaque process design kit.
pub struct PtcPdk(Pdk);

/// Opaque gene.
pub struct PtcGene(Gene);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PtcCost {
    pub area_optical: f64,
    pub area_electrical: f64,
    pub power: f64,
    pub latency: f64,
    pub insertion_loss: f64,
    pub cd: f64,
    pub ee: f64,
    pub aee: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PtcScores {
    pub s_zico: f64,
    pub s_param: f64,
    pub s_sparsity: f64,
    pub combined: f64,
}

/// Closed ranges on total area (mm^2), power (mW) and latency (ps).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtcConstraints {
    pub area_min: f64,
    pub area_max: f64,
    pub power_min: f64,
    pub power_max: f64,
    pub latency_min: f64,
    pub latency_max: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtcSearchParams {
    pub k: usize,
    pub pop_size: usize,
    pub max_iters: usize,
    pub phase2_iters: usize,
    pub p_mu0: f64,
    pub p_co: f64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PtcStatus {
    match e {
        Error::InfeasibleConstraints { .. } => PtcStatus::Infeasible,
        Error::NotApplicable(_) | Error::Io(_) => PtcStatus::Internal,
        _ => PtcStatus::InvalidArgument,
    }
}

/// Run `f`, recording the error message and mapping panics to `Internal`.
fn guard(f: impl FnOnce() -> Result<(), (PtcStatus, String)>) -> PtcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PtcStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            PtcStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (PtcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PtcStatus, String) {
    (PtcStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (PtcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (PtcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (PtcStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer is valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ptc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ptc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a preset (`gf`, `custom`) or a TOML/JSON file.
///
/// # Safety
/// `name_or_path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ptc_pdk_load(name_or_path: *const c_char, out: *mut *mut PtcPdk) -> PtcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = read_str(name_or_path, "name_or_path")?;
        let pdk = Pdk::resolve(name).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PtcPdk(pdk)));
        Ok(())
    })
}

/// # Safety
/// `pdk` must be NULL or a handle from [`ptc_pdk_load`].
#[no_mangle]
pub unsafe extern "C" fn ptc_pdk_free(pdk: *mut PtcPdk) {
    if !pdk.is_null() {
        drop(Box::from_raw(pdk));
    }
}

/// Parse a gene from its JSON object or single-line text form.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ptc_gene_parse(text: *const c_char, out: *mut *mut PtcGene) -> PtcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = read_str(text, "text")?.trim();
        let gene = if t.starts_with('{') {
            Gene::from_json(t)
        } else {
            Gene::from_text(t)
        }
        .map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PtcGene(gene)));
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ptc_gene_baseline(style: PtcBaseline, k: usize, out: *mut *mut PtcGene) -> PtcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let style = match style {
            PtcBaseline::MziClements => BaselineStyle::MziClements,
            PtcBaseline::Butterfly => BaselineStyle::Butterfly,
            PtcBaseline::MmiInterlaced => BaselineStyle::MmiInterlaced,
        };
        let gene = make_baseline(style, k).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PtcGene(gene)));
        Ok(())
    })
}

/// # Safety
/// `gene` must be NULL or a gene handle.
#[no_mangle]
pub unsafe extern "C" fn ptc_gene_free(gene: *mut PtcGene) {
    if !gene.is_null() {
        drop(Box::from_raw(gene));
    }
}

/// Matrix size of a gene, or 0 for NULL.
///
/// # Safety
/// `gene` must be NULL or a gene handle.
#[no_mangle]
pub unsafe extern "C" fn ptc_gene_k(gene: *const PtcGene) -> usize {
    gene.as_ref().map_or(0, |g| g.0.k)
}

/// Active block count, or 0 for NULL.
///
/// # Safety
/// `gene` must be NULL or a gene handle.
#[no_mangle]
pub unsafe extern "C" fn ptc_gene_active_blocks(gene: *const PtcGene) -> usize {
    gene.as_ref().map_or(0, |g| g.0.active_blocks)
}

/// Text form of a gene; free with [`ptc_string_free`]. NULL on error.
///
/// # Safety
/// `gene` must be NULL or a gene handle.
#[no_mangle]
pub unsafe extern "C" fn ptc_gene_to_text(gene: *const PtcGene) -> *mut c_char {
    match gene.as_ref() {
        Some(g) => into_c_string(g.0.to_text()),
        None => {
            set_error("gene is NULL");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ptc_cost(gene: *const PtcGene, pdk: *const PtcPdk, out: *mut PtcCost) -> PtcStatus {
    guard(|| {
        let g = deref(gene, "gene")?;
        let p = deref(pdk, "pdk")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = g.0.decode().map_err(lib_err)?;
        let r = evaluate_cost(&t, &p.0).map_err(lib_err)?;
        *out = PtcCost {
            area_optical: r.area_optical,
            area_electrical: r.area_electrical,
            power: r.power,
            latency: r.latency,
            insertion_loss: r.insertion_loss,
            cd: r.cd,
            ee: r.ee,
            aee: r.aee,
        };
        Ok(())
    })
}

fn to_constraints(c: &PtcConstraints) -> Constraints {
    Constraints {
        area: Range::new(c.area_min, c.area_max),
        power: Range::new(c.power_min, c.power_max),
        latency: Range::new(c.latency_min, c.latency_max),
    }
}

/// Default constraint window for `k` on this PDK.
///
/// # Safety
/// `pdk` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ptc_constraints_default(pdk: *const PtcPdk, k: usize, out: *mut PtcConstraints) -> PtcStatus {
    guard(|| {
        let p = deref(pdk, "pdk")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = Constraints::derived(k, &p.0).map_err(lib_err)?;
        *out = PtcConstraints {
            area_min: c.area.min,
            area_max: c.area.max,
            power_min: c.power.min,
            power_max: c.power.max,
            latency_min: c.latency.min,
            latency_max: c.latency.max,
        };
        Ok(())
    })
}

/// Whether a gene satisfies `constraints`.
///
/// # Safety
/// Handles must be valid; `feasible` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ptc_check_constraints(
    gene: *const PtcGene,
    pdk: *const PtcPdk,
    constraints: *const PtcConstraints,
    feasible: *mut bool,
) -> PtcStatus {
    guard(|| {
        let g = deref(gene, "gene")?;
        let p = deref(pdk, "pdk")?;
        let c = to_constraints(deref(constraints, "constraints")?);
        if feasible.is_null() {
            return Err(null("feasible"));
        }
        let r = evaluate_cost(&g.0.decode().map_err(lib_err)?, &p.0).map_err(lib_err)?;
        *feasible = check_constraints(&r, &c).feasible;
        Ok(())
    })
}

/// Proxy scores with the default weights.
///
/// # Safety
/// `gene` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ptc_score(gene: *const PtcGene, seed: u64, out: *mut PtcScores) -> PtcStatus {
    guard(|| {
        let g = deref(gene, "gene")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = g.0.decode().map_err(lib_err)?;
        let b = accuracy_score(&t, &ProxyConfig::default(), seed).map_err(lib_err)?;
        *out = PtcScores {
            s_zico: b.s_zico,
            s_param: b.s_param,
            s_sparsity: b.s_sparsity,
            combined: b.combined,
        };
        Ok(())
    })
}

/// Default search parameters for matrix size `k`.
#[no_mangle]
pub extern "C" fn ptc_search_params_default(k: usize) -> PtcSearchParams {
    let c = SearchConfig::new(k);
    PtcSearchParams {
        k,
        pop_size: c.pop_size,
        max_iters: c.max_iters,
        phase2_iters: c.phase2_iters,
        p_mu0: c.p_mu0,
        p_co: c.p_co,
        seed: c.seed,
    }
}

/// Run a search. `constraints` may be NULL for the default window and
/// `out_dir` may be NULL to skip writing files. On success `front_json`
/// receives the final front as a JSON array (free with
/// [`ptc_string_free`]).
///
/// # Safety
/// Pointers must be valid or NULL where allowed.
#[no_mangle]
pub unsafe extern "C" fn ptc_search(
    pdk: *const PtcPdk,
    params: *const PtcSearchParams,
    constraints: *const PtcConstraints,
    out_dir: *const c_char,
    front_json: *mut *mut c_char,
) -> PtcStatus {
    guard(|| {
        let p = deref(pdk, "pdk")?;
        let sp = deref(params, "params")?;
        if front_json.is_null() {
            return Err(null("front_json"));
        }
        let mut cfg = SearchConfig::new(sp.k);
        cfg.pop_size = sp.pop_size;
        cfg.max_iters = sp.max_iters;
        cfg.phase2_iters = sp.phase2_iters;
        cfg.p_mu0 = sp.p_mu0;
        cfg.p_co = sp.p_co;
        cfg.seed = sp.seed;
        cfg.constraints = constraints.as_ref().map(to_constraints);
        let result = if out_dir.is_null() {
            run_search(&cfg, &p.0, &default_baselines(cfg.k)).map_err(lib_err)?
        } else {
            let dir = read_str(out_dir, "out_dir")?;
            execute_search(&cfg, &p.0, Path::new(dir), false)
                .map_err(lib_err)?
                .0
        };
        let json = serde_json::to_string(&result.front_members())
            .map_err(|e| (PtcStatus::Internal, e.to_string()))?;
        *front_json = into_c_string(json);
        Ok(())
    })
}
