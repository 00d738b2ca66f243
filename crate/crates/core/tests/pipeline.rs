use quench_core::experiments::{sample_curve, FigureId};
use quench_core::io::{parse_config, write_csv, RunConfig};
use quench_core::{ChainF32, LambdaPolicy, Schedule, ScheduleF32, Solution, SolutionF32};

#[test]
fn single_and_double_precision_agree() {
    let s64 = Schedule::periodic(
        quench_core::Chain::new(16, 1.0, 0.5).unwrap(),
        &[(2.0, 0.5), (1.0, 0.5), (0.0, 0.5)],
        3.0,
        true,
    )
    .unwrap();
    let s32 = ScheduleF32::periodic(
        ChainF32::new(16, 1.0, 0.5).unwrap(),
        &[(2.0, 0.5), (1.0, 0.5), (0.0, 0.5)],
        3.0,
        true,
    )
    .unwrap();
    let (a, b) = (Solution::new(&s64).unwrap(), SolutionF32::new(&s32).unwrap());
    for k in 0..40 {
        let t = 0.3 * k as f64;
        let c64 = a.complexity_at(t, LambdaPolicy::FixedInitial).unwrap().total;
        let c32 = b.complexity_at(t as f32, LambdaPolicy::FixedInitial).unwrap().total;
        assert!((c64 - c32 as f64).abs() < 1e-4 * (1.0 + c64), "t = {t}: {c64} vs {c32}");
    }
}

#[test]
fn config_to_csv() {
    let text = "[chain]\nn = 4\nomega0 = 3.0\nk0 = 2.0\n[[segments]]\nomega = 0.3\nk = 2.5\n[grid]\nstart = 0.0\nend = 1000.0\nsamples = 2001\n";
    let sc = parse_config(text).unwrap();
    let preset = quench_core::experiments::figure_preset(FigureId::Fig1, 1).unwrap();
    assert_eq!(sc.schedule, preset.schedule);
    assert_eq!(sc.grid, preset.grid);

    let curve = sample_curve(&sc).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_csv(&mut a, &curve).unwrap();
    write_csv(&mut b, &sample_curve(&preset).unwrap()).unwrap();
    assert_eq!(a, b);

    let back = RunConfig::parse(&RunConfig::from_scenario(&sc).emit()).unwrap().to_scenario().unwrap();
    assert_eq!(back.schedule, sc.schedule);
}
