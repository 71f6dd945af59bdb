use std::ffi::{CStr, CString};
use std::ptr;

use varlearn_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(vl_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn babelian3() -> *mut VlMatrix {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { vl_matrix_babelian(3, 0.1, &mut m) }, VlStatus::Ok);
    m
}

#[test]
fn constructors_and_entries() {
    let flat = [0.0, 0.1, 0.2, 0.0];
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(vl_matrix_new(flat.as_ptr(), 2, &mut m), VlStatus::Ok);
        assert_eq!(vl_matrix_dim(m), 2);
        let mut out = [0.0; 4];
        assert_eq!(vl_matrix_entries(m, out.as_mut_ptr(), 4), VlStatus::Ok);
        assert_eq!(out, flat);
        assert_eq!(vl_matrix_entries(m, out.as_mut_ptr(), 3), VlStatus::BufferTooSmall);
        let mut proper = false;
        assert_eq!(vl_matrix_is_proper(m, &mut proper), VlStatus::Ok);
        assert!(proper);
        vl_matrix_free(m);

        let bad = [0.1, 0.1, 0.2, 0.0];
        assert_eq!(vl_matrix_new(bad.as_ptr(), 2, &mut m), VlStatus::InvalidMatrix);
        assert!(!last_error().is_empty());
        assert_eq!(vl_matrix_babelian(3, 0.0, &mut m), VlStatus::InvalidArgument);
        assert_eq!(vl_matrix_two_grammar(0.2, 0.1, ptr::null_mut()), VlStatus::NullPointer);
        assert_eq!(vl_matrix_dim(ptr::null()), 0);
        vl_matrix_free(ptr::null_mut());
    }
}

#[test]
fn json_matrices() {
    let json = CString::new(r#"{"n": 2, "entries": [[0, 0.1], [0.2, 0]]}"#).unwrap();
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(vl_matrix_from_json(json.as_ptr(), &mut m), VlStatus::Ok);
        let mut out = [0.0; 2];
        assert_eq!(vl_penalties(m, [0.5, 0.5].as_ptr(), 2, out.as_mut_ptr()), VlStatus::Ok);
        assert!((out[0] - 0.05).abs() < 1e-15 && (out[1] - 0.1).abs() < 1e-15);
        vl_matrix_free(m);
        let broken = CString::new("{\"n\": 2}").unwrap();
        assert_eq!(vl_matrix_from_json(broken.as_ptr(), &mut m), VlStatus::InvalidMatrix);
        assert_eq!(vl_matrix_from_json(ptr::null(), &mut m), VlStatus::NullPointer);
    }
}

#[test]
fn maps_and_errors() {
    let m = babelian3();
    let mut out = [0.0; 3];
    unsafe {
        let p = [0.5, 0.3, 0.2];
        assert_eq!(vl_reliable_map(m, p.as_ptr(), 3, out.as_mut_ptr()), VlStatus::Ok);
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(
            vl_reliable_map(m, p.as_ptr(), 2, out.as_mut_ptr()),
            VlStatus::InvalidArgument
        );
        assert_eq!(
            vl_reliable_map(m, [0.5, 0.5].as_ptr(), 2, out.as_mut_ptr()),
            VlStatus::DimensionMismatch
        );
        assert!(last_error().contains("dimension"));
        assert_eq!(
            vl_reliable_map(ptr::null(), p.as_ptr(), 3, out.as_mut_ptr()),
            VlStatus::NullPointer
        );
        assert_eq!(vl_reliable_map(m, p.as_ptr(), 3, out.as_mut_ptr()), VlStatus::Ok);
        assert!(last_error().is_empty());

        let mut moduli = [0.0; 2];
        let centroid = [1.0 / 3.0; 3];
        assert_eq!(vl_eigen_moduli(m, centroid.as_ptr(), 3, moduli.as_mut_ptr()), VlStatus::Ok);
        assert!((moduli[0] - 0.5).abs() < 1e-4);
        vl_matrix_free(m);

        let improper = [0.0, 0.0, 0.1, 0.0];
        let mut im = ptr::null_mut();
        assert_eq!(vl_matrix_new(improper.as_ptr(), 2, &mut im), VlStatus::Ok);
        assert_eq!(
            vl_reliable_map(im, [0.5, 0.5].as_ptr(), 2, out.as_mut_ptr()),
            VlStatus::ImproperMatrix
        );
        vl_matrix_free(im);
    }
}

#[test]
fn stochastic_calls_are_seeded() {
    let m = babelian3();
    let p = [0.5, 0.3, 0.2];
    let run = |seed| {
        let mut out = [0.0; 3];
        let status = unsafe { vl_lrp_learner(m, p.as_ptr(), 3, 0.01, 10_000, seed, out.as_mut_ptr()) };
        assert_eq!(status, VlStatus::Ok);
        out
    };
    assert_eq!(run(1), run(1));
    assert_ne!(run(1), run(2));

    let mut traj = [0.0; 9];
    unsafe {
        assert_eq!(
            vl_generational_simulation(m, p.as_ptr(), 3, 2, 0.01, 5_000, 3, 7, traj.as_mut_ptr(), 9),
            VlStatus::Ok
        );
        assert_eq!(&traj[..3], &p);
        assert_eq!(
            vl_generational_simulation(m, p.as_ptr(), 3, 2, 0.0, 5_000, 3, 7, traj.as_mut_ptr(), 9),
            VlStatus::InvalidArgument
        );
        vl_matrix_free(m);
    }
}

#[test]
fn rest_point_handles() {
    let m = babelian3();
    let mut rp = ptr::null_mut();
    unsafe {
        assert_eq!(vl_rest_points_find(m, 1e-12, &mut rp), VlStatus::Ok);
        assert_eq!(vl_rest_points_count(rp), 4);
        let mut info = VlRestPointInfo {
            kind: VlStateKind::Vertex,
            classification: VlClassification::Inconclusive,
            residual: 0.0,
            largest_modulus: 0.0,
        };
        assert_eq!(vl_rest_points_info(rp, 3, &mut info), VlStatus::Ok);
        assert_eq!(info.kind, VlStateKind::Interior);
        assert_eq!(info.classification, VlClassification::AsymptoticallyStable);
        assert!((info.largest_modulus - 0.5).abs() < 1e-4);
        assert_eq!(vl_rest_points_info(rp, 0, &mut info), VlStatus::Ok);
        assert_eq!(info.classification, VlClassification::Unstable);
        let mut loc = [0.0; 3];
        assert_eq!(vl_rest_points_location(rp, 3, loc.as_mut_ptr(), 3), VlStatus::Ok);
        assert!(loc.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-9));
        assert_eq!(
            vl_rest_points_location(rp, 4, loc.as_mut_ptr(), 3),
            VlStatus::IndexOutOfRange
        );
        assert_eq!(vl_rest_points_count(ptr::null()), 0);
        vl_rest_points_free(rp);
        vl_matrix_free(m);
    }
}

#[test]
fn sweep_and_npl() {
    let rho = [0.5, 2.5];
    let mut limits = [0.0; 6];
    let mut estimate = 0.0;
    unsafe {
        let start = [0.98, 0.01, 0.01];
        assert_eq!(
            vl_bifurcation_sweep(0.1, rho.as_ptr(), 2, 10_000, start.as_ptr(), limits.as_mut_ptr(), 6, &mut estimate),
            VlStatus::Ok
        );
        assert!((limits[0] - 0.25).abs() < 1e-9);
        assert!((limits[3] - 1.0).abs() < 1e-9);
        assert_eq!(estimate, 2.5);
        assert_eq!(
            vl_bifurcation_sweep(0.1, rho.as_ptr(), 1, 10_000, start.as_ptr(), limits.as_mut_ptr(), 3, &mut estimate),
            VlStatus::Ok
        );
        assert!(estimate.is_nan());

        let mut c = [0.0; 4];
        assert_eq!(vl_npl_penalties(0.0, 1.0, c.as_mut_ptr()), VlStatus::Ok);
        assert_eq!(c, [0.0, 1.0, 0.0, 1.0]);
        assert_eq!(vl_npl_penalties(1.5, 1.0, c.as_mut_ptr()), VlStatus::InvalidArgument);

        let mut xs = [0.0; 6];
        let x0 = [0.3, 0.6];
        assert_eq!(
            vl_npl_generations(x0.as_ptr(), 2, 0.01, 2_000, 4, 3, xs.as_mut_ptr(), 6),
            VlStatus::Ok
        );
        assert_eq!(&xs[..2], &x0);
        assert!(xs.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(vl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
