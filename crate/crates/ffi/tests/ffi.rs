use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use ectower_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = ect_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    ect_string_free(s);
    out
}

const TOWER: &str = "tower H { base: group F2 { generators: a, b; relators: ; }; level { letter: t; center_of: a; } }";

#[test]
fn word_reduce() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(
            ect_word_reduce(c("a b b^-1 [a,b]").as_ptr(), &mut out),
            EctStatus::Ok
        );
        assert_eq!(take(out), "b^-1 a b");
    }
}

#[test]
fn group_handle_lifecycle() {
    let mut g = ptr::null_mut();
    let mut trivial: c_int = -1;
    unsafe {
        let src = c("group S { generators: a, b, c, d; relators: [a,b][c,d]; }");
        assert_eq!(ect_group_parse(src.as_ptr(), &mut g), EctStatus::Ok);
        assert_eq!(
            ect_group_wp(g, c("b^-1 a b [c,d]").as_ptr(), &mut trivial),
            EctStatus::Ok
        );
        assert_eq!(trivial, 0);
        assert_eq!(
            ect_group_wp(g, c("[c,d] [a,b]").as_ptr(), &mut trivial),
            EctStatus::Ok
        );
        assert_eq!(trivial, 1);
        let mut t = ptr::null_mut();
        assert_eq!(ect_tower_from_group(g, &mut t), EctStatus::Ok);
        assert_eq!(ect_tower_height(t), 0);
        ect_tower_free(t);
        ect_group_free(g);
    }
}

#[test]
fn tower_wp_and_reduce() {
    let mut t = ptr::null_mut();
    let mut trivial: c_int = -1;
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(ect_tower_parse(c(TOWER).as_ptr(), &mut t), EctStatus::Ok);
        assert_eq!(ect_tower_height(t), 1);
        assert_eq!(
            ect_tower_wp(t, c("t a t^-1 a^-1").as_ptr(), &mut trivial),
            EctStatus::Ok
        );
        assert_eq!(trivial, 1);
        assert_eq!(
            ect_tower_britton_reduce(t, c("b t a t^-1").as_ptr(), &mut out),
            EctStatus::Ok
        );
        assert_eq!(take(out), "b a");
        ect_tower_free(t);
    }
}

#[test]
fn error_codes() {
    let mut g = ptr::null_mut();
    let mut trivial: c_int = 0;
    unsafe {
        let bad = c("group G {\n generators: a;\n relators: a^;\n}");
        assert_eq!(ect_group_parse(bad.as_ptr(), &mut g), EctStatus::Parse);
        assert!(last_error().contains("3:"), "{}", last_error());
        assert!(g.is_null());
        assert_eq!(ect_group_parse(ptr::null(), &mut g), EctStatus::Null);
        assert_eq!(
            ect_group_wp(ptr::null(), c("a").as_ptr(), &mut trivial),
            EctStatus::Null
        );

        // a presentation whose word problem the library does not decide
        let src = c("group B { generators: a, b; relators: a^-1 b^2 a b^-3; }");
        assert_eq!(ect_group_parse(src.as_ptr(), &mut g), EctStatus::Ok);
        assert_eq!(
            ect_group_wp(g, c("a b").as_ptr(), &mut trivial),
            EctStatus::Unsupported
        );
        ect_group_free(g);
    }
}

#[test]
fn header_is_generated() {
    let h =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ectower.h")).unwrap();
    for name in [
        "ect_group_parse",
        "ect_tower_britton_reduce",
        "ect_last_error_message",
        "typedef struct EctTower EctTower",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

/// Compiles `tests/c/smoke.c` against the generated header and the static
/// library, then runs it.
#[test]
fn c_program_links_and_runs() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let target_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = target_dir.join("libectower_ffi.a");
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );
    let exe = std::env::temp_dir().join(format!("ectower-c-smoke-{}", std::process::id()));
    let status = std::process::Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler");
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "c smoke ok");
}
