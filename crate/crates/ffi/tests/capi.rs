use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use edgesched_ffi::*;

const E2_JSON: &str = r#"{"m":1,"n":2,"accuracies":[0.5,1.0],"times":[[0.6,0.6],[0.6,0.6]],"T":0.9}"#;

fn last_error() -> String {
    let p = es_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn e2() -> *mut EsInstance {
    let json = CString::new(E2_JSON).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { es_instance_from_json(json.as_ptr(), &mut inst) }, EsStatus::Ok);
    inst
}

#[test]
fn exact_on_e2_through_the_c_abi() {
    let inst = e2();
    unsafe {
        assert_eq!(es_instance_jobs(inst), 2);
        assert_eq!(es_instance_models(inst), 1);
        let mut report = ptr::null_mut();
        assert_eq!(es_solve(inst, EsAlgorithm::Exact, 0.0, &mut report), EsStatus::Ok);
        assert_eq!(es_report_total_accuracy(report), 1.5);
        assert_eq!(es_report_makespan(report), 0.6);
        assert!(es_report_lp_objective(report).is_nan());
        let mut buf = [9usize; 2];
        assert_eq!(es_report_assignment(report, buf.as_mut_ptr(), 2), EsStatus::Ok);
        assert_eq!(buf, [0, 1]);
        assert_eq!(es_report_assignment(report, buf.as_mut_ptr(), 1), EsStatus::BufferTooSmall);
        es_report_free(report);
        es_instance_free(inst);
    }
}

#[test]
fn amr2_reports_lp_value() {
    let inst = e2();
    unsafe {
        let mut report = ptr::null_mut();
        assert_eq!(es_solve(inst, EsAlgorithm::Amr2, 0.0, &mut report), EsStatus::Ok);
        assert!((es_report_lp_objective(report) - 1.75).abs() < 1e-9);
        assert_eq!(es_report_fractional_jobs(report), 1);
        assert!(es_report_makespan(report) <= 1.8 + 1e-9);
        es_report_free(report);
        es_instance_free(inst);
    }
}

#[test]
fn instance_from_arrays() {
    let acc = [0.4, 0.6, 0.8];
    let times = [0.2, 0.2, 0.2, 0.2, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0];
    let mut inst = ptr::null_mut();
    unsafe {
        let status = es_instance_new(2, 4, acc.as_ptr(), times.as_ptr(), ptr::null(), 2.0, &mut inst);
        assert_eq!(status, EsStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(es_solve(inst, EsAlgorithm::Amdp, 0.1, &mut report), EsStatus::Ok);
        assert!((es_report_total_accuracy(report) - 2.8).abs() < 1e-12);
        assert_eq!(es_report_es_load(report), 2.0);
        assert_eq!(es_report_violation_pct(report), 0.0);
        es_report_free(report);

        assert_eq!(es_solve(inst, EsAlgorithm::AmdpHetero, 0.0, &mut report), EsStatus::Precondition);
        assert!(report.is_null());
        assert!(last_error().contains("communication"), "{}", last_error());
        es_instance_free(inst);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let bad = CString::new(r#"{"m":1,"n":1,"accuracies":[0.9,0.5],"times":[[0.1],[0.1]],"T":1}"#).unwrap();
        let mut inst = ptr::null_mut();
        assert_eq!(es_instance_from_json(bad.as_ptr(), &mut inst), EsStatus::InvalidInput);
        assert!(inst.is_null());
        assert!(last_error().contains("NonMonotoneAccuracy"), "{}", last_error());

        assert_eq!(es_instance_from_json(ptr::null(), &mut inst), EsStatus::NullPointer);
        let mut report = ptr::null_mut();
        assert_eq!(es_solve(ptr::null(), EsAlgorithm::Greedy, 0.0, &mut report), EsStatus::NullPointer);

        let tight = CString::new(r#"{"m":1,"n":1,"accuracies":[0.5,0.9],"times":[[2.0],[3.0]],"T":1}"#).unwrap();
        assert_eq!(es_instance_from_json(tight.as_ptr(), &mut inst), EsStatus::Ok);
        assert_eq!(es_solve(inst, EsAlgorithm::Exact, 0.0, &mut report), EsStatus::Infeasible);
        assert_eq!(es_solve(inst, EsAlgorithm::Greedy, 0.0, &mut report), EsStatus::Ok);
        assert!(es_report_violation_pct(report) > 0.0);
        es_report_free(report);
        es_instance_free(inst);

        es_instance_free(ptr::null_mut());
        es_report_free(ptr::null_mut());
        assert!(es_report_total_accuracy(ptr::null()).is_nan());
        assert!(!CStr::from_ptr(es_version()).to_bytes().is_empty());
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/edgesched.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct EsInstance EsInstance;",
        "typedef struct EsReport EsReport;",
        "ES_STATUS_INFEASIBLE = 1",
        "ES_ALGORITHM_AMDP_HETERO = 2",
        "es_instance_new(",
        "es_instance_from_json(",
        "es_solve(",
        "es_report_assignment(",
        "es_last_error_message(",
        "es_report_free(",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"edgesched.h\"\n\
         int main(void) {\n\
           EsInstance *inst = 0; EsReport *rep = 0;\n\
           EsStatus s = es_instance_from_json(\"{}\", &inst);\n\
           if (s == ES_STATUS_OK) { es_solve(inst, ES_ALGORITHM_AMR2, 0.0, &rep); es_report_free(rep); }\n\
           es_instance_free(inst);\n\
           return (int)s;\n\
         }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
}
