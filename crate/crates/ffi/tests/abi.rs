use std::ffi::{CStr, CString};
use std::ptr;

use ising_storage_ffi::*;

fn last_error() -> String {
    let p = is_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn zero_temperature() -> IsDynamics {
    IsDynamics {
        beta: f64::INFINITY,
        field: 0,
        per_system_clock: false,
        freeze_minus: false,
    }
}

#[test]
fn lattice_and_config_lifecycle() {
    unsafe {
        let mut l = ptr::null_mut();
        assert_eq!(is_lattice_square(5, IsBoundary::MinusFrame, &mut l), IsStatus::Ok);
        assert_eq!(is_lattice_site_count(l), 25);

        let mut c = ptr::null_mut();
        assert_eq!(is_config_uniform(l, true, &mut c), IsStatus::Ok);
        assert_eq!(is_config_plus_count(c), 25);
        let mut stable = true;
        assert_eq!(is_config_is_stable(c, &mut stable), IsStatus::Ok);
        // Corners of an all-plus grid in a minus frame tie.
        assert!(!stable);

        assert_eq!(is_config_set(c, 0, -1), IsStatus::Ok);
        let mut s = 0i8;
        assert_eq!(is_config_spin(c, 0, &mut s), IsStatus::Ok);
        assert_eq!(s, -1);
        assert_eq!(is_config_set(c, 0, 3), IsStatus::InvalidArgument);
        assert_eq!(is_config_spin(c, 99, &mut s), IsStatus::InvalidArgument);

        let json = is_config_to_json(c);
        assert!(!json.is_null());
        let mut back = ptr::null_mut();
        assert_eq!(is_config_from_json(json, &mut back), IsStatus::Ok);
        assert_eq!(is_config_plus_count(back), 24);
        is_string_free(json);

        let mut events = 0u64;
        let p = zero_temperature();
        assert_eq!(is_run_continuous(back, 1e4, &p, 7, &mut events), IsStatus::Ok);
        assert!(events > 0);
        assert_eq!(is_config_plus_count(back), 0);

        is_config_free(back);
        is_config_free(c);
        is_lattice_free(l);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut l = ptr::null_mut();
        assert_eq!(is_lattice_square(1, IsBoundary::Free, &mut l), IsStatus::InvalidArgument);
        assert!(l.is_null());
        assert!(last_error().contains("invalid lattice"));

        assert_eq!(is_config_uniform(ptr::null(), true, ptr::null_mut()), IsStatus::NullPointer);
        assert!(last_error().contains("null"));

        let bad = CString::new(r#"{"scheme":"droplet","k":5,"area":4}"#).unwrap();
        let mut codec = ptr::null_mut();
        assert_eq!(is_codec_from_json(bad.as_ptr(), &mut codec), IsStatus::InfeasibleGeometry);
        let bad = CString::new("{").unwrap();
        assert_eq!(is_codec_from_json(bad.as_ptr(), &mut codec), IsStatus::Parse);

        let mut q = 0.0;
        assert_eq!(is_z_capacity(1.5, &mut q), IsStatus::InvalidArgument);

        assert_eq!(is_lattice_square(3, IsBoundary::Free, &mut l), IsStatus::Ok);
        let mut c = ptr::null_mut();
        assert_eq!(is_config_uniform(l, false, &mut c), IsStatus::Ok);
        let hot_field = IsDynamics {
            beta: 1.0,
            field: 1,
            ..zero_temperature()
        };
        assert_eq!(is_run_discrete(c, 10, &hot_field, 1), IsStatus::InvalidArgument);
        let bad_field = IsDynamics {
            field: 2,
            ..zero_temperature()
        };
        assert_eq!(is_run_discrete(c, 10, &bad_field, 1), IsStatus::InvalidArgument);
        is_config_free(c);
        is_lattice_free(l);

        // Null handles are tolerated by the free functions and counters.
        is_config_free(ptr::null_mut());
        is_codec_free(ptr::null_mut());
        assert_eq!(is_codec_capacity(ptr::null()), 0);
        assert!(is_config_to_json(ptr::null()).is_null());
    }
}

#[test]
fn codec_round_trip_through_dynamics() {
    unsafe {
        let spec = CString::new(r#"{"scheme":"field_droplet","k":14,"field":"plus"}"#).unwrap();
        let mut codec = ptr::null_mut();
        assert_eq!(is_codec_from_json(spec.as_ptr(), &mut codec), IsStatus::Ok);
        assert_eq!(is_codec_capacity(codec), 9);
        let mut p = zero_temperature();
        assert_eq!(is_codec_dynamics(codec, &mut p), IsStatus::Ok);
        assert_eq!(p.field, 1);

        let msg = [1u8, 0, 1, 1, 0, 0, 1, 0, 1];
        let mut cfg = ptr::null_mut();
        assert_eq!(is_codec_encode(codec, msg.as_ptr(), msg.len(), &mut cfg), IsStatus::Ok);
        assert_eq!(is_run_discrete(cfg, 1_000_000, &p, 3), IsStatus::Ok);
        let mut out = [9u8; 9];
        assert_eq!(is_codec_decode(codec, cfg, out.as_mut_ptr(), 9), IsStatus::Ok);
        assert_eq!(out, msg);
        assert_eq!(is_codec_decode(codec, cfg, out.as_mut_ptr(), 10), IsStatus::MessageTooLong);
        let long = [1u8; 10];
        let mut other = ptr::null_mut();
        assert_eq!(is_codec_encode(codec, long.as_ptr(), 10, &mut other), IsStatus::MessageTooLong);

        let mut cap = 0.0;
        assert_eq!(is_binary_channel_capacity(0.0, 0.5, &mut cap), IsStatus::Ok);
        assert!((cap - 1.25f64.log2()).abs() < 1e-12);
        is_config_free(cfg);
        is_codec_free(codec);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ising_storage.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .filter_map(|rest| rest.split('(').next())
        .collect();
    assert!(exports.len() >= 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct IsConfig IsConfig;"));
}
