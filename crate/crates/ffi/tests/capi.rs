use std::ffi::{CStr, CString};
use std::ptr;

use tssr_ffi::*;

const DISCRETE: &str = r#"{
  "time": "discrete",
  "state_shape": [2],
  "input_shape": [1],
  "output_shape": [1],
  "schedule": [{"start": 0,
    "A": {"shape": [2, 2], "data": [0.5, 0, 0, 0.25]},
    "B": {"shape": [2, 1], "data": [1, 1]},
    "C": {"shape": [1, 2], "data": [1, 1]}}],
  "x0": {"shape": [2], "data": [1, 1]},
  "input": {"kind": "zero"}
}"#;

const MULTIRATE: &str = r#"{"kind": "multirate",
  "A": {"shape": [2, 2], "data": [1, 1, 0, 1]},
  "clocks": [2, 3],
  "boundary": [{"kind": "index"}, {"kind": "constant", "value": 1}]}"#;

fn last_error() -> String {
    let p = tssr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn tensor(shape: &[usize], data: &[f64]) -> *mut TssrTensor {
    let mut out = ptr::null_mut();
    assert_eq!(
        tssr_tensor_new(shape.as_ptr(), shape.len(), data.as_ptr(), data.len(), &mut out),
        TssrStatus::Ok
    );
    out
}

unsafe fn data_of(t: *const TssrTensor) -> Vec<f64> {
    let mut buf = vec![0.0; tssr_tensor_len(t)];
    assert_eq!(tssr_tensor_data(t, buf.as_mut_ptr(), buf.len()), TssrStatus::Ok);
    buf
}

#[test]
fn tensor_contraction_through_handles() {
    unsafe {
        let a = tensor(&[2, 2, 2, 2], &(1..=16).map(f64::from).collect::<Vec<_>>());
        let x = tensor(&[2, 2], &[1.0, 0.0, 0.0, 1.0]);
        let mut y = ptr::null_mut();
        assert_eq!(tssr_contract_last(a, x, &mut y), TssrStatus::Ok);
        assert_eq!(tssr_tensor_order(y), 2);
        let mut shape = [0usize; 2];
        assert_eq!(tssr_tensor_shape(y, shape.as_mut_ptr(), 2), TssrStatus::Ok);
        assert_eq!(shape, [2, 2]);
        assert_eq!(data_of(y), vec![5.0, 13.0, 21.0, 29.0]);

        let mut tr = ptr::null_mut();
        assert_eq!(tssr_contract_pair(x, 0, 1, &mut tr), TssrStatus::Ok);
        assert_eq!(data_of(tr), vec![2.0]);

        let mut e = ptr::null_mut();
        assert_eq!(tssr_outer_product(a, x, &mut e), TssrStatus::Ok);
        assert_eq!(tssr_tensor_order(e), 6);

        let mut m = ptr::null_mut();
        assert_eq!(tssr_unfold(a, 2, &mut m), TssrStatus::Ok);
        assert_eq!(tssr_tensor_len(m), 16);

        for h in [a, x, y, tr, e, m] {
            tssr_tensor_free(h);
        }
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut out = ptr::null_mut();
        let status = tssr_tensor_new([2usize, 3].as_ptr(), 2, [0.0; 5].as_ptr(), 5, &mut out);
        assert_eq!(status, TssrStatus::ShapeError);
        assert!(out.is_null());
        assert!(last_error().contains("needs 6 entries"));

        let nan = [f64::NAN];
        assert_eq!(
            tssr_tensor_new([1usize].as_ptr(), 1, nan.as_ptr(), 1, &mut out),
            TssrStatus::ValueError
        );

        assert_eq!(
            tssr_contract_last(ptr::null(), ptr::null(), &mut out),
            TssrStatus::NullPointer
        );

        let x = tensor(&[2, 3], &[0.0; 6]);
        assert_eq!(tssr_contract_pair(x, 0, 1, &mut out), TssrStatus::ShapeError);
        assert_eq!(tssr_contract_pair(x, 0, 0, &mut out), TssrStatus::ArgumentError);
        let mut small = [0.0; 2];
        assert_eq!(tssr_tensor_data(x, small.as_mut_ptr(), 2), TssrStatus::ArgumentError);
        tssr_tensor_free(x);

        let bad = CString::new("{ not json").unwrap();
        let mut model = ptr::null_mut();
        assert_eq!(tssr_model_from_json(bad.as_ptr(), &mut model), TssrStatus::ParseError);
        assert!(last_error().contains("<json>:1:"));
    }
}

#[test]
fn discrete_model_simulation_and_csv() {
    unsafe {
        let json = CString::new(DISCRETE).unwrap();
        let mut model = ptr::null_mut();
        assert_eq!(tssr_model_from_json(json.as_ptr(), &mut model), TssrStatus::Ok);
        assert_eq!(tssr_model_state_dim(model), 2);

        let mut traj = ptr::null_mut();
        assert_eq!(tssr_model_simulate_discrete(model, 3, &mut traj), TssrStatus::Ok);
        assert_eq!(tssr_trajectory_len(traj), 4);
        let mut t = 0.0;
        assert_eq!(tssr_trajectory_time(traj, 3, &mut t), TssrStatus::Ok);
        assert_eq!(t, 3.0);
        let mut state = ptr::null_mut();
        assert_eq!(tssr_trajectory_state(traj, 3, &mut state), TssrStatus::Ok);
        assert_eq!(data_of(state), vec![0.125, 0.015625]);
        let mut output = ptr::null_mut();
        assert_eq!(tssr_trajectory_output(traj, 3, &mut output), TssrStatus::Ok);
        assert_eq!(data_of(output), vec![0.140625]);
        assert_eq!(tssr_trajectory_state(traj, 4, &mut state), TssrStatus::ArgumentError);

        let csv = tssr_trajectory_to_csv(traj, 1);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        tssr_string_free(csv);
        assert!(text.starts_with("t,x_0,x_1,y_0\n0,"));
        assert_eq!(text.lines().count(), 5);

        // continuous simulation of a discrete model is an argument error
        let mut other = ptr::null_mut();
        assert_eq!(
            tssr_model_simulate_continuous(model, 1.0, 0.1, 1, &mut other),
            TssrStatus::ArgumentError
        );

        let round = tssr_model_to_json(model);
        let mut again = ptr::null_mut();
        assert_eq!(tssr_model_from_json(round, &mut again), TssrStatus::Ok);
        let round2 = tssr_model_to_json(again);
        assert_eq!(CStr::from_ptr(round), CStr::from_ptr(round2));
        tssr_string_free(round);
        tssr_string_free(round2);

        tssr_tensor_free(state);
        tssr_tensor_free(output);
        tssr_trajectory_free(traj);
        tssr_model_free(model);
        tssr_model_free(again);
    }
}

#[test]
fn continuous_exact_decay() {
    let json = CString::new(
        r#"{"time": "continuous", "state_shape": [1],
            "schedule": [{"start": 0, "A": {"shape": [1, 1], "data": [-1]}}],
            "x0": {"shape": [1], "data": [1]}}"#,
    )
    .unwrap();
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(tssr_model_from_json(json.as_ptr(), &mut model), TssrStatus::Ok);
        let mut traj = ptr::null_mut();
        assert_eq!(
            tssr_model_simulate_continuous(model, 1.0, 0.5, 1, &mut traj),
            TssrStatus::Ok
        );
        let mut last = ptr::null_mut();
        assert_eq!(
            tssr_trajectory_state(traj, tssr_trajectory_len(traj) - 1, &mut last),
            TssrStatus::Ok
        );
        assert!((data_of(last)[0] - 0.36787944117144233).abs() <= 1e-15);

        let mut report = std::mem::zeroed::<TssrReport>();
        assert_eq!(tssr_model_analyze(model, 0.0, 0.0, &mut report), TssrStatus::Ok);
        assert_eq!(report.stability, TssrStability::Stable);
        assert_eq!(report.max_real_part, -1.0);
        assert_eq!(report.controllability_rank, -1);

        tssr_tensor_free(last);
        tssr_trajectory_free(traj);
        tssr_model_free(model);
    }
}

#[test]
fn analysis_report_struct() {
    let json = CString::new(DISCRETE).unwrap();
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(tssr_model_from_json(json.as_ptr(), &mut model), TssrStatus::Ok);
        let mut report = std::mem::zeroed::<TssrReport>();
        assert_eq!(tssr_model_analyze(model, 0.0, 0.0, &mut report), TssrStatus::Ok);
        assert_eq!(report.state_dim, 2);
        assert!((report.spectral_radius - 0.5).abs() < 1e-12);
        assert!(report.max_real_part.is_nan());
        assert_eq!(report.stability, TssrStability::Stable);
        assert_eq!(report.controllability_rank, 2);
        assert_eq!(report.observability_rank, 2);
        tssr_model_free(model);
    }
}

#[test]
fn multirate_handles() {
    unsafe {
        let clocks = [2u64, 3];
        let (mut d, mut f) = (0u64, [0u64; 2]);
        assert_eq!(
            tssr_global_clock(clocks.as_ptr(), 2, &mut d, f.as_mut_ptr()),
            TssrStatus::Ok
        );
        assert_eq!((d, f), (6, [3, 2]));
        assert_eq!(
            tssr_global_clock([1u64, 3].as_ptr(), 2, &mut d, f.as_mut_ptr()),
            TssrStatus::ArgumentError
        );

        let json = CString::new(MULTIRATE).unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(tssr_multirate_from_json(json.as_ptr(), &mut m), TssrStatus::Ok);
        assert_eq!(tssr_multirate_processes(m), 2);
        for (n, expected) in [(6, 4.0), (18, 10.0), (36, 11.0)] {
            let mut x = 0.0;
            assert_eq!(tssr_multirate_eval(m, 0, n, &mut x), TssrStatus::Ok);
            assert_eq!(x, expected);
        }
        let mut x = 0.0;
        assert_eq!(tssr_multirate_eval(m, 0, -6, &mut x), TssrStatus::ArgumentError);

        let mut grid = [0.0; 8];
        assert_eq!(tssr_multirate_grid(m, 3, grid.as_mut_ptr(), grid.len()), TssrStatus::Ok);
        assert_eq!(grid[2], 4.0);
        tssr_multirate_free(m);

        let missing = CString::new(MULTIRATE.replace(
            r#"{"kind": "constant", "value": 1}"#,
            r#"{"kind": "table", "values": []}"#,
        ))
        .unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(tssr_multirate_from_json(missing.as_ptr(), &mut m), TssrStatus::Ok);
        assert_eq!(tssr_multirate_eval(m, 0, 6, &mut x), TssrStatus::MissingData);
        assert!(last_error().contains("process 1 at index 2"));
        tssr_multirate_free(m);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tssr.h")).unwrap();
    for name in [
        "tssr_last_error_message",
        "tssr_string_free",
        "tssr_tensor_new",
        "tssr_tensor_free",
        "tssr_contract_last",
        "tssr_contract_pair",
        "tssr_outer_product",
        "tssr_unfold",
        "tssr_model_from_json",
        "tssr_model_simulate_discrete",
        "tssr_model_simulate_continuous",
        "tssr_model_analyze",
        "tssr_trajectory_to_csv",
        "tssr_global_clock",
        "tssr_multirate_eval",
        "tssr_multirate_grid",
        "typedef struct TssrTensor TssrTensor",
        "TSSR_STATUS_MISSING_DATA = 7",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
