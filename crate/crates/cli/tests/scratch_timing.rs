// scratch instrumentation
use rena_cli::commands::{run_bench_time, BenchTimeArgs};
use rena_cli::methods::Method;

#[test]
fn timing_probe() {
    for round in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("t.csv");
        let args = BenchTimeArgs {
            dims_grid: vec![vec![8, 8, 8], vec![16, 16, 16], vec![32, 32, 32]],
            methods: vec![Method::Rena],
            repeats: 10,
            n: 10,
            fwhm: 8.0,
            snr_db: 2.06,
            seed: 8,
            out: out.clone(),
        };
        run_bench_time(&args).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        let mut by_p: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            by_p.entry(f[1].parse().unwrap()).or_default().push(f[4].parse().unwrap());
        }
        for (p, times) in &by_p {
            let best = times.iter().cloned().fold(f64::INFINITY, f64::min);
            println!("round {round} p={p} best={:.4}ms all={:?}", best * 1000.0,
                times.iter().map(|t| (t * 1000.0 * 100.0).round() / 100.0).collect::<Vec<_>>());
        }
    }
}
