//! Every runnable example also runs as a test.

#[allow(dead_code)]
#[path = "../examples/simulate_reach.rs"]
mod simulate_reach;
#[allow(dead_code)]
#[path = "../examples/exact_analysis.rs"]
mod exact_analysis;
#[allow(dead_code)]
#[path = "../examples/oracle_confidence.rs"]
mod oracle_confidence;
#[allow(dead_code)]
#[path = "../examples/sketches.rs"]
mod sketches;
#[allow(dead_code)]
#[path = "../examples/maximize.rs"]
mod maximize;
#[allow(dead_code)]
#[path = "../examples/adaptive.rs"]
mod adaptive;
#[allow(dead_code)]
#[path = "../examples/rrs_bias.rs"]
mod rrs_bias;
#[allow(dead_code)]
#[path = "../examples/model_files.rs"]
mod model_files;
#[allow(dead_code)]
#[path = "../examples/depth_horizon.rs"]
mod depth_horizon;

#[test]
fn simulate_reach_runs() {
    assert_eq!(simulate_reach::run_example().unwrap().lines().count(), 5);
}

#[test]
fn exact_analysis_runs() {
    let out = exact_analysis::run_example().unwrap();
    assert!(out.contains("I = 5 (formula 5), Var = 15 (formula 15)"), "{out}");
}

#[test]
fn oracle_confidence_runs() {
    assert!(oracle_confidence::run_example().unwrap().contains("MedianOfAverages"));
}

#[test]
fn sketches_run() {
    sketches::run_example().unwrap();
}

#[test]
fn maximize_runs() {
    assert!(maximize::run_example().unwrap().contains("greedy adds"));
}

#[test]
fn adaptive_runs() {
    assert!(adaptive::run_example().unwrap().contains("accepted true"));
}

#[test]
fn rrs_bias_runs() {
    assert!(rrs_bias::run_example().unwrap().contains("argmax: full-sim 0, marginal 9"));
}

#[test]
fn model_files_run() {
    model_files::run_example().unwrap();
}

#[test]
fn depth_horizon_runs() {
    depth_horizon::run_example().unwrap();
}
