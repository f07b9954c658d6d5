use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use tuplenorm_ffi::*;

const EXAMPLE: &str = r#"{"domain": {"dim": 2, "p": 2}, "outer_p": 2,
  "T": [{"codomain": {"dim": 2, "p": 2}, "matrix": [[1, 0], [0, 0]]},
        {"codomain": {"dim": 2, "p": 2}, "matrix": [[1, 0], [0, 0.5]]}],
  "S": [{"codomain": {"dim": 2, "p": 2}, "matrix": [[0, 0], [0, 1]]},
        {"codomain": {"dim": 2, "p": 2}, "matrix": [[0, 1], [0, 0]]}]}"#;

fn load(doc: &str) -> *mut TnInstance {
    let c = CString::new(doc).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tn_instance_from_json(c.as_ptr(), &mut out) }, TnStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = tn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn golden_distance_and_norm() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(tn_instance_golden(&mut g), TnStatus::Ok);
        let (mut dist, mut norm) = (0.0, 0.0);
        assert_eq!(tn_dist(g, ptr::null(), &mut dist), TnStatus::Ok);
        assert_eq!(tn_norm(g, ptr::null(), &mut norm), TnStatus::Ok);
        assert!((dist - 5f64.sqrt() / 2.0).abs() < 1e-6);
        assert!((norm - 5f64.sqrt() / 2.0).abs() < 1e-9);
        let (mut orth, mut margin, mut cert) = (0, 1.0, 0);
        assert_eq!(tn_bj(g, ptr::null(), &mut orth, &mut margin, &mut cert), TnStatus::Ok);
        assert_eq!((orth, cert), (1, 1));
        let (mut d, mut dim) = (0, 0);
        assert_eq!(tn_instance_shape(g, &mut d, &mut dim), TnStatus::Ok);
        assert_eq!((d, dim), (2, 2));
        tn_instance_free(g);
    }
}

#[test]
fn derivatives_and_smoothness() {
    let inst = load(EXAMPLE);
    unsafe {
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(tn_rho(inst, ptr::null(), &mut lo, &mut hi), TnStatus::Ok);
        // 𝒯 attains only at ±e1, where 𝒮e1 = 0.
        assert!(lo.abs() < 1e-4 && hi.abs() < 1e-4, "{lo} {hi}");
        let mut smooth = -1;
        assert_eq!(tn_smooth(inst, ptr::null(), &mut smooth), TnStatus::Ok);
        assert_eq!(smooth, 1);
        tn_instance_free(inst);
    }
}

#[test]
fn json_round_trip_and_reports() {
    let inst = load(EXAMPLE);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(tn_instance_to_json(inst, &mut s), TnStatus::Ok);
        let doc = CStr::from_ptr(s).to_str().unwrap().to_owned();
        tn_string_free(s);
        let again = load(&doc);
        for cmd in [TnCommand::Norm, TnCommand::Dist, TnCommand::Bj, TnCommand::Rho, TnCommand::Smooth] {
            let mut out = ptr::null_mut();
            assert_eq!(tn_report_json(again, cmd as i32, ptr::null(), &mut out), TnStatus::Ok);
            let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
            assert!(v.is_object());
            tn_string_free(out);
        }
        let mut out = ptr::null_mut();
        assert_eq!(tn_report_json(again, 17, ptr::null(), &mut out), TnStatus::InvalidArgument);
        assert!(last_error().contains("17"));
        tn_instance_free(again);
        tn_instance_free(inst);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut out = ptr::null_mut();
        let bad = CString::new(r#"{"domain": {"dim": 2, "p": 2}, "T": [{"codomain": {"dim": 1, "p": 2}, "matrix": [[1, "x"]]}]}"#).unwrap();
        assert_eq!(tn_instance_from_json(bad.as_ptr(), &mut out), TnStatus::Parse);
        assert!(last_error().contains("$.T[0].matrix[0][1]"));
        assert_eq!(tn_instance_from_json(ptr::null(), &mut out), TnStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(tn_norm(ptr::null(), ptr::null(), &mut v), TnStatus::NullPointer);

        let no_direction = load(r#"{"domain": {"dim": 1, "p": 2}, "T": [{"codomain": {"dim": 1, "p": 2}, "matrix": [[1]]}]}"#);
        assert_eq!(tn_dist(no_direction, ptr::null(), &mut v), TnStatus::InvalidArgument);
        assert_eq!(tn_norm(no_direction, ptr::null(), ptr::null_mut()), TnStatus::NullPointer);
        assert_eq!(tn_norm(no_direction, ptr::null(), &mut v), TnStatus::Ok);
        assert!(tn_last_error().is_null());
        tn_instance_free(no_direction);

        let zero = load(r#"{"domain": {"dim": 1, "p": 2}, "T": [{"codomain": {"dim": 1, "p": 2}, "matrix": [[0]]}],
            "S": [{"codomain": {"dim": 1, "p": 2}, "matrix": [[1]]}]}"#);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(tn_rho(zero, ptr::null(), &mut lo, &mut hi), TnStatus::Degenerate);
        tn_instance_free(zero);
        tn_instance_free(ptr::null_mut());
        tn_string_free(ptr::null_mut());
    }
}

#[test]
fn options_change_the_seed_only() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(tn_instance_golden(&mut g), TnStatus::Ok);
        let opts = TnOptions { seed: 9, starts: 8, tol: 1e-6 };
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(tn_dist(g, &opts, &mut a), TnStatus::Ok);
        assert_eq!(tn_dist(g, ptr::null(), &mut b), TnStatus::Ok);
        assert!((a - b).abs() < 1e-6);
        tn_instance_free(g);
    }
}

/// Compile `examples/smoke.c` against the generated header and the static
/// library from this build.
#[test]
fn c_program_links_against_the_header() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/tuplenorm.h");
    assert!(header.exists(), "header not generated");
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libtuplenorm_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("tuplenorm_smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("examples/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler named cc");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke exited with {:?}", out.status.code());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("error=$.domain"), "{text}");
}
