use std::ffi::{CStr, CString};
use std::ptr;

use lapdict_ffi::*;

fn last_error() -> String {
    let p = ld_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

const CONFIG: &str = r#"{"experiment":"exp2","scale":0.01,"seed":7}"#;

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ld_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn dataset_round_trip() {
    let signals = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let labels = [0u32, 1, 1];
    let mut ds = ptr::null_mut();
    let st = unsafe { ld_dataset_new(signals.as_ptr(), 2, 3, labels.as_ptr(), LdLayout::GraphSignal, &mut ds) };
    assert_eq!(st, LdStatus::Ok);
    assert!(ld_last_error().is_null());
    unsafe {
        assert_eq!(ld_dataset_len(ds), 3);
        assert_eq!(ld_dataset_dim(ds), 2);
        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("d.lds").to_str().unwrap()).unwrap();
        assert_eq!(ld_dataset_save(ds, path.as_ptr()), LdStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(ld_dataset_load(path.as_ptr(), &mut back), LdStatus::Ok);
        let mut got = [0.0; 6];
        let mut got_labels = [9u32; 3];
        assert_eq!(ld_dataset_signals(back, got.as_mut_ptr(), 6), LdStatus::Ok);
        assert_eq!(ld_dataset_labels(back, got_labels.as_mut_ptr(), 3), LdStatus::Ok);
        assert_eq!(got, signals);
        assert_eq!(got_labels, labels);
        assert_eq!(ld_dataset_signals(back, got.as_mut_ptr(), 5), LdStatus::DimensionMismatch);
        ld_dataset_free(back);
        ld_dataset_free(ds);
    }
}

#[test]
fn errors_are_reported() {
    let mut ds = ptr::null_mut();
    let st = unsafe { ld_dataset_new(ptr::null(), 2, 3, ptr::null(), LdLayout::GraphSignal, &mut ds) };
    assert_eq!(st, LdStatus::NullPointer);
    assert!(last_error().contains("signals"));
    assert!(ds.is_null());

    let path = CString::new("/nonexistent/dir/x.lds").unwrap();
    assert_eq!(unsafe { ld_dataset_load(path.as_ptr(), &mut ds) }, LdStatus::Io);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.lds");
    std::fs::write(&bad, b"XXXX0000").unwrap();
    let bad = CString::new(bad.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { ld_dataset_load(bad.as_ptr(), &mut ds) }, LdStatus::Format);

    let config = CString::new(r#"{"experiment":"exp2","scale":-1}"#).unwrap();
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { ld_generate(config.as_ptr(), &mut a, &mut b) }, LdStatus::InvalidArgument);

    let v = [1.0, 2.0];
    let mut out = [0.0; 2];
    assert_eq!(unsafe { ld_project_simplex_type(v.as_ptr(), 2, 2, out.as_mut_ptr()) }, LdStatus::InvalidArgument);
    unsafe {
        ld_dataset_free(ptr::null_mut());
        ld_model_free(ptr::null_mut());
    }
}

#[test]
fn train_classify_save_load() {
    let config = CString::new(CONFIG).unwrap();
    let (mut train, mut test) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(ld_generate(config.as_ptr(), &mut train, &mut test), LdStatus::Ok);
        let n = ld_dataset_len(test);
        let mut truth = vec![0u32; n];
        assert_eq!(ld_dataset_labels(test, truth.as_mut_ptr(), n), LdStatus::Ok);
        for method in ["src", "sbo"] {
            let name = CString::new(method).unwrap();
            let mut model = ptr::null_mut();
            assert_eq!(ld_model_train(config.as_ptr(), name.as_ptr(), train, &mut model), LdStatus::Ok, "{}", method);
            assert_eq!(ld_model_class_count(model), 2);
            let mut pred = vec![0u32; n];
            assert_eq!(ld_model_classify(model, test, pred.as_mut_ptr(), n), LdStatus::Ok);
            let mut acc = 0.0;
            assert_eq!(ld_evaluate(truth.as_ptr(), pred.as_ptr(), n, &mut acc), LdStatus::Ok);
            assert!((0.0..=1.0).contains(&acc));

            let dir = tempfile::tempdir().unwrap();
            let dir_c = CString::new(dir.path().to_str().unwrap()).unwrap();
            assert_eq!(ld_model_save(model, dir_c.as_ptr()), LdStatus::Ok);
            let mut loaded = ptr::null_mut();
            assert_eq!(ld_model_load(dir_c.as_ptr(), &mut loaded), LdStatus::Ok);
            let mut again = vec![9u32; n];
            assert_eq!(ld_model_classify(loaded, test, again.as_mut_ptr(), n), LdStatus::Ok);
            assert_eq!(pred, again);
            ld_model_free(loaded);
            ld_model_free(model);
        }
        let bogus = CString::new("kmeans").unwrap();
        let mut model = ptr::null_mut();
        assert_eq!(ld_model_train(config.as_ptr(), bogus.as_ptr(), train, &mut model), LdStatus::InvalidArgument);
        ld_dataset_free(train);
        ld_dataset_free(test);
    }
}

#[test]
fn omp_recovers_a_two_sparse_code() {
    // identity plus one normalized diagonal atom
    let s = 0.5f64.sqrt();
    let d = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, s, s, 0.0];
    let y = [3.0, 0.0, -2.0];
    let mut x = [f64::NAN; 4];
    assert_eq!(unsafe { ld_omp(d.as_ptr(), 3, 4, y.as_ptr(), 2, x.as_mut_ptr()) }, LdStatus::Ok);
    assert_eq!(x, [3.0, 0.0, -2.0, 0.0]);
}

#[test]
fn projection_lands_in_the_row_set() {
    let v = [0.3, 1.0, -0.2, 0.4];
    let mut p = [0.0; 4];
    assert_eq!(unsafe { ld_project_simplex_type(v.as_ptr(), 4, 1, p.as_mut_ptr()) }, LdStatus::Ok);
    assert!(p.iter().sum::<f64>().abs() < 1e-12);
    assert!(p[1] >= 0.0 && [0, 2, 3].iter().all(|&j| p[j] <= 0.0));
}
