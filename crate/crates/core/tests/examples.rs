//! Every example under `examples/` runs to completion.

macro_rules! example {
    ($test:ident, $module:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $module;

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(verify_file_runs, verify_file, "../examples/verify_file.rs");
example!(compare_modes_runs, compare_modes, "../examples/compare_modes.rs");
example!(bench_suite_runs, bench_suite, "../examples/bench_suite.rs");
example!(oracle_check_runs, oracle_check, "../examples/oracle_check.rs");
example!(smt_export_runs, smt_export, "../examples/smt_export.rs");
example!(build_system_runs, build_system, "../examples/build_system.rs");
example!(external_solver_runs, external_solver, "../examples/external_solver.rs");
example!(proof_paths_runs, proof_paths, "../examples/proof_paths.rs");
example!(witness_replay_runs, witness_replay, "../examples/witness_replay.rs");

#[test]
fn traffic_light_bug_needs_one_press() {
    let sys = build_system::traffic_light();
    let r = kindmc::engine::run(&sys, &kindmc::engine::EngineConfig::plain()).unwrap();
    let w = r.witness.unwrap();
    assert_eq!(w.len(), 2);
    assert_eq!(w.inputs[0].get("press"), Some(kindmc::ir::Value::Bool(true)));
}
