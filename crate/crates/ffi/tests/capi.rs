//! Exercises the C ABI through the exported symbols, exactly as a C caller
//! would: raw pointers in, status codes out.

use kerrline_ffi::*;
use std::ptr;

const L_LINE: f64 = 5e-7;
const C_LINE: f64 = 2e-10;
const LEN: f64 = 0.01;
const C_J: f64 = 1.9e-12;

unsafe fn demo_device(i_c: f64, n_modes: usize) -> *mut KlDevice {
    let mut dev: *mut KlDevice = ptr::null_mut();
    let st = kl_device_new(L_LINE, C_LINE, LEN, C_J, i_c, 0.0, n_modes, &mut dev);
    assert_eq!(st, KlStatus::KlOk);
    assert!(!dev.is_null());
    dev
}

#[test]
fn device_round_trip() {
    unsafe {
        let dev = demo_device(1e-6, 10);
        let mut count = 0usize;
        assert_eq!(kl_mode_count(dev, &mut count), KlStatus::KlOk);
        assert_eq!(count, 10);

        let mut omega = 0.0;
        assert_eq!(kl_mode_frequency(dev, 0, &mut omega), KlStatus::KlOk);
        assert!((omega - 27_881_932_456.0).abs() / omega < 1e-9);

        let mut lambda = 0.0;
        assert_eq!(kl_mode_lambda(dev, 0, &mut lambda), KlStatus::KlOk);
        assert!((lambda - 0.0398497818623557).abs() < 1e-9);

        let mut eta = 0.0;
        assert_eq!(kl_mode_eta(dev, 0, &mut eta), KlStatus::KlOk);
        assert!((eta - 1.35896044189203e-12).abs() / eta < 1e-8);

        let mut residual = 1.0;
        assert_eq!(kl_mode_residual(dev, 3, &mut residual), KlStatus::KlOk);
        assert!(residual.abs() < 1e-10);

        let (mut shift, mut u, mut pf) = (0.0, 0.0, 0.0);
        assert_eq!(kl_kerr(dev, &mut shift, &mut u, &mut pf), KlStatus::KlOk);
        assert!((u - 1_961_375.718).abs() / u < 1e-8);
        assert!((shift - 15_297_087.539).abs() / shift < 1e-8);
        assert!((pf - 0.996913279939637).abs() < 1e-9);
        // Optional outputs may each be null.
        assert_eq!(
            kl_kerr(dev, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()),
            KlStatus::KlOk
        );

        let mut di = 0.0;
        assert_eq!(kl_junction_current_variance(dev, 0, &mut di), KlStatus::KlOk);
        assert!(di > 0.0 && di < 1e-6);
        assert_eq!(
            kl_junction_current_variance(dev, 3, &mut di),
            KlStatus::KlInvalidArgument
        );

        kl_device_free(dev);
    }
}

#[test]
fn status_codes() {
    unsafe {
        // Null handling.
        assert_eq!(
            kl_device_new(L_LINE, C_LINE, LEN, C_J, 1e-6, 0.0, 10, ptr::null_mut()),
            KlStatus::KlNullArgument
        );
        let mut x = 0.0;
        assert_eq!(kl_mode_frequency(ptr::null(), 0, &mut x), KlStatus::KlNullArgument);
        let mut count = 0usize;
        assert_eq!(kl_mode_count(ptr::null(), &mut count), KlStatus::KlNullArgument);
        kl_device_free(ptr::null_mut());

        // Invalid circuit parameters.
        let mut dev: *mut KlDevice = ptr::null_mut();
        assert_eq!(
            kl_device_new(-1.0, C_LINE, LEN, C_J, 1e-6, 0.0, 10, &mut dev),
            KlStatus::KlInvalidArgument
        );
        assert!(dev.is_null());
        assert_eq!(
            kl_device_new(L_LINE, C_LINE, LEN, C_J, 1e-6, 0.0, 0, &mut dev),
            KlStatus::KlInvalidArgument
        );

        // Index past the mode count.
        let dev = demo_device(1e-6, 4);
        assert_eq!(kl_mode_frequency(dev, 4, &mut x), KlStatus::KlOutOfRange);
        assert_eq!(kl_mode_eta(dev, 4, &mut x), KlStatus::KlOutOfRange);
        assert_eq!(kl_mode_frequency(dev, 0, ptr::null_mut()), KlStatus::KlNullArgument);

        // A shallow mode set builds, but the Kerr gate refuses it.
        let (mut s, mut u, mut pf) = (0.0, 0.0, 0.0);
        assert_eq!(kl_kerr(dev, &mut s, &mut u, &mut pf), KlStatus::KlNotConverged);
        kl_device_free(dev);
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { std::ffi::CStr::from_ptr(kl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));

    // The build script regenerates the C header next to the crate.
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("kerrline.h");
    let text = std::fs::read_to_string(header).expect("generated header");
    for decl in [
        "typedef struct KlDevice KlDevice;",
        "kl_device_new",
        "kl_device_free",
        "kl_mode_frequency",
        "kl_kerr",
        "kl_junction_current_variance",
        "KlNotConverged",
    ] {
        assert!(text.contains(decl), "header missing {decl}");
    }
}
