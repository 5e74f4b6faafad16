use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use ptc_forge_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ptc_last_error()) }.to_string_lossy().into_owned()
}

fn pdk(name: &str) -> *mut PtcPdk {
    let c = CString::new(name).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ptc_pdk_load(c.as_ptr(), &mut out) }, PtcStatus::Ok);
    out
}

#[test]
fn cost_of_butterfly_matches_core() {
    let p = pdk("gf");
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(ptc_gene_baseline(PtcBaseline::Butterfly, 16, &mut g), PtcStatus::Ok);
        assert_eq!(ptc_gene_k(g), 16);
        assert_eq!(ptc_gene_active_blocks(g), 8);
        let mut cost = PtcCost::default();
        assert_eq!(ptc_cost(g, p, &mut cost), PtcStatus::Ok);

        let core_gene =
            ptc_forge::topology::make_baseline(ptc_forge::topology::BaselineStyle::Butterfly, 16).unwrap();
        let r = ptc_forge::cost::evaluate_cost(&core_gene.decode().unwrap(), &ptc_forge::pdk::Pdk::gf()).unwrap();
        assert_eq!(cost.cd, r.cd);
        assert_eq!(cost.ee, r.ee);
        assert_eq!(cost.area_optical, r.area_optical);

        let mut c = std::mem::zeroed::<PtcConstraints>();
        assert_eq!(ptc_constraints_default(p, 16, &mut c), PtcStatus::Ok);
        let mut feasible = false;
        assert_eq!(ptc_check_constraints(g, p, &c, &mut feasible), PtcStatus::Ok);
        assert!(feasible);

        ptc_gene_free(g);
        ptc_pdk_free(p);
    }
}

#[test]
fn gene_text_round_trip_and_scores() {
    let text = CString::new("2 | 2,2;0,2,1,3 | 2,2;0,1,2,3").unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(ptc_gene_parse(text.as_ptr(), &mut g), PtcStatus::Ok);
        let s = ptc_gene_to_text(g);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), text.to_str().unwrap());
        ptc_string_free(s);

        let mut a = PtcScores::default();
        let mut b = PtcScores::default();
        assert_eq!(ptc_score(g, 5, &mut a), PtcStatus::Ok);
        assert_eq!(ptc_score(g, 5, &mut b), PtcStatus::Ok);
        assert_eq!(a, b);
        assert!((a.s_param - 0.5).abs() < 1e-15);
        ptc_gene_free(g);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut g = ptr::null_mut();
    let bad = CString::new("3 | 2,2;0,1,2,3").unwrap();
    unsafe {
        assert_eq!(ptc_gene_parse(bad.as_ptr(), &mut g), PtcStatus::InvalidArgument);
        assert!(last_error().contains("odd"), "{}", last_error());
        assert!(g.is_null());

        assert_eq!(ptc_gene_parse(ptr::null(), &mut g), PtcStatus::NullPointer);
        assert_eq!(ptc_gene_baseline(PtcBaseline::Butterfly, 6, &mut g), PtcStatus::InvalidArgument);

        let missing = CString::new("/no/such/pdk.toml").unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(ptc_pdk_load(missing.as_ptr(), &mut p), PtcStatus::InvalidArgument);
        assert!(!last_error().is_empty());

        let mut cost = PtcCost::default();
        assert_eq!(ptc_cost(ptr::null(), ptr::null(), &mut cost), PtcStatus::NullPointer);

        ptc_gene_free(ptr::null_mut());
        ptc_pdk_free(ptr::null_mut());
        ptc_string_free(ptr::null_mut());
    }
}

#[test]
fn small_search_and_infeasible_window() {
    let p = pdk("gf");
    let mut params = ptc_search_params_default(8);
    assert_eq!((params.pop_size, params.max_iters, params.phase2_iters), (40, 80, 20));
    params.pop_size = 6;
    params.max_iters = 3;
    params.phase2_iters = 1;
    params.seed = 9;
    let dir = tempfile::tempdir().unwrap();
    let d = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(ptc_search(p, &params, ptr::null(), d.as_ptr(), &mut json), PtcStatus::Ok);
        let front: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert!(!front.as_array().unwrap().is_empty());
        ptc_string_free(json);
        assert!(dir.path().join("front.json").exists());
        assert!(dir.path().join("manifest.json").exists());

        let empty = PtcConstraints {
            area_min: 0.0,
            area_max: 0.0,
            power_min: 0.0,
            power_max: 1e9,
            latency_min: 0.0,
            latency_max: 1e9,
        };
        let mut json = ptr::null_mut();
        assert_eq!(ptc_search(p, &params, &empty, ptr::null(), &mut json), PtcStatus::Infeasible);
        assert!(last_error().contains("area"));
        ptc_pdk_free(p);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ptc_forge.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["ptc_cost", "ptc_score", "ptc_search", "ptc_last_error", "PTC_STATUS_INFEASIBLE"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"ptc_forge.h\"\nint main(void) { PtcSearchParams p = ptc_search_params_default(8); return (int)p.k - 8; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; skipped syntax check"),
    }
}
