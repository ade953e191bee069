use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use openmap_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(om_last_error_message()) }.to_str().unwrap().to_owned()
}

fn preset(name: &str) -> *mut OmScenario {
    let name = CString::new(name).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { om_scenario_preset(name.as_ptr(), &mut s) }, OmStatus::Ok);
    assert!(!s.is_null());
    s
}

fn run(s: *const OmScenario) -> *mut OmResult {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { om_scenario_run(s, &mut r) }, OmStatus::Ok, "{}", last_error());
    r
}

#[test]
fn fig1_round_trip() {
    let s = preset("fig1");
    let r = run(s);
    let mut len = 0;
    unsafe {
        assert_eq!(om_result_len(r, &mut len), OmStatus::Ok);
        assert_eq!(len, 33);
        for i in 0..len {
            let mut t = 0.0;
            let mut xyz = [0.0; 3];
            let mut ev = [0.0; 4];
            let mut g2 = 0.0;
            assert_eq!(om_result_time(r, i, &mut t), OmStatus::Ok);
            assert_eq!(om_result_bloch(r, i, xyz.as_mut_ptr()), OmStatus::Ok);
            assert_eq!(om_result_map_eigenvalues(r, i, ev.as_mut_ptr()), OmStatus::Ok);
            assert_eq!(om_result_g2(r, i, &mut g2), OmStatus::Ok);
            assert!(xyz[0].abs() < 1e-15 && xyz[1].abs() < 1e-15);
            assert!(ev.iter().all(|&x| (-1e-10..=1.0 + 1e-10).contains(&x)));
            assert!((ev.iter().sum::<f64>() - 2.0).abs() < 1e-12);
            assert!(ev.windows(2).all(|w| w[0] >= w[1]));
            // |0> state: g2 equals the z population (1 + b3) / 2
            assert!((g2 - 0.5 * (1.0 + xyz[2])).abs() < 1e-12);
            assert!(t > 0.0);
        }
        let mut t = 0.0;
        assert_eq!(om_result_time(r, len, &mut t), OmStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        om_result_free(r);
        om_scenario_free(s);
    }
}

#[test]
fn fig4_map_has_negative_eigenvalue_matching_closed_form() {
    let s = preset("fig4");
    unsafe { assert_eq!(om_scenario_set_grid(s, 0.3, 0.3, 1), OmStatus::Ok) };
    let r = run(s);
    let mut xyz = [0.0; 3];
    let mut ev = [0.0; 4];
    let mut closed = [0.0; 4];
    unsafe {
        assert_eq!(om_result_bloch(r, 0, xyz.as_mut_ptr()), OmStatus::Ok);
        assert_eq!(om_result_map_eigenvalues(r, 0, ev.as_mut_ptr()), OmStatus::Ok);
        assert_eq!(om_closed_form_eigs(0.2, xyz[0], xyz[1], xyz[2], closed.as_mut_ptr()), OmStatus::Ok);
        om_result_free(r);
        om_scenario_free(s);
    }
    closed.sort_by(|a, b| b.total_cmp(a));
    for (a, b) in ev.iter().zip(closed) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(ev[3] < 0.0);
}

#[test]
fn json_scenarios_and_errors() {
    let good = CString::new(r#"{"preset": "fig2", "grid": {"start": 0.1, "end": 0.5, "steps": 5}}"#).unwrap();
    let bad = CString::new(r#"{"preset": "fig2", "colour": 1}"#).unwrap();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(om_scenario_from_json(bad.as_ptr(), &mut s), OmStatus::InvalidArgument);
        assert!(s.is_null());
        assert!(last_error().contains("colour"));

        assert_eq!(om_scenario_from_json(good.as_ptr(), &mut s), OmStatus::Ok);
        assert_eq!(last_error(), "");
        let r = run(s);
        let mut len = 0;
        om_result_len(r, &mut len);
        assert_eq!(len, 5);
        om_result_free(r);

        assert_eq!(om_scenario_set_grid(s, 1.0, 0.0, 3), OmStatus::InvalidArgument);
        om_scenario_free(s);

        assert_eq!(om_scenario_from_json(ptr::null(), &mut s), OmStatus::NullPointer);
        let name = CString::new("nope").unwrap();
        assert_eq!(om_scenario_preset(name.as_ptr(), &mut s), OmStatus::InvalidArgument);
        assert_eq!(om_result_len(ptr::null(), ptr::null_mut()), OmStatus::NullPointer);
        om_scenario_free(ptr::null_mut());
        om_result_free(ptr::null_mut());
    }
}

#[test]
fn out_of_plane_initial_state_map_is_unsupported() {
    let json = CString::new(
        r#"{"preset": "A3-mixture", "initial_state": {"family": {"mixture": {"p": 0.5,
            "state_i": [{"x": 0, "y": 0.6, "z": 0}, {"x": 0, "y": 0, "z": 1}]}}}}"#,
    )
    .unwrap();
    let mut s = ptr::null_mut();
    let mut ev = [0.0; 4];
    let mut g2 = 0.0;
    unsafe {
        assert_eq!(om_scenario_from_json(json.as_ptr(), &mut s), OmStatus::Ok, "{}", last_error());
        let r = run(s);
        assert_eq!(om_result_map_eigenvalues(r, 0, ev.as_mut_ptr()), OmStatus::Unsupported);
        assert!(last_error().contains("a_y"));
        assert_eq!(om_result_g2(r, 0, &mut g2), OmStatus::Ok);
        om_result_free(r);
        om_scenario_free(s);
    }
}

#[test]
fn discord_of_bell_state_is_one_bit() {
    let mut re = [0.0; 16];
    let im = [0.0; 16];
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        re[4 * i + j] = 0.5;
    }
    let mut d = 0.0;
    unsafe {
        assert_eq!(om_discord(re.as_ptr(), im.as_ptr(), OmMeasured::Environment, &mut d), OmStatus::Ok);
        assert!((d - 1.0).abs() < 1e-6);
        assert_eq!(om_discord(re.as_ptr(), im.as_ptr(), OmMeasured::System, &mut d), OmStatus::Ok);
        assert!((d - 1.0).abs() < 1e-6);
        re[0] = 1.0;
        assert_eq!(om_discord(re.as_ptr(), im.as_ptr(), OmMeasured::System, &mut d), OmStatus::InvalidArgument);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(om_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/openmap.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["om_scenario_run", "om_result_map_eigenvalues", "om_discord", "OM_STATUS_UNSUPPORTED"] {
        assert!(text.contains(f), "{f}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{}\"\nint main(void) {{ OmScenario *s = 0; OmStatus st = om_scenario_preset(\"fig1\", &s); om_scenario_free(s); return st == OM_STATUS_OK ? 0 : 1; }}\n",
            header.display()
        ),
    )
    .unwrap();
    match Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]).arg(&src).status() {
        Ok(status) => assert!(status.success()),
        Err(_) => eprintln!("no C compiler found, skipping syntax check"),
    }
}
