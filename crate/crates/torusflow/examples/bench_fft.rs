use std::time::Instant;
use torusflow::fft::Fft;
use torusflow::field::ScalarField;
use torusflow::grid::GridSpec;

fn main() {
    for n in [128usize, 256] {
        let grid = GridSpec::new(2, n).unwrap();
        let fft = Fft::<f64>::new(grid);
        let f = ScalarField::<f64>::from_fn(grid, |p| (13.0 * p[0]).sin() * (7.0 * p[1]).cos());
        let mut buf: Vec<num_complex::Complex<f64>> =
            f.values().iter().map(|&v| num_complex::Complex::new(v, 0.0)).collect();
        // warmup
        for _ in 0..5 {
            fft.transform(&mut buf, false);
            fft.transform(&mut buf, true);
        }
        let reps = 200;
        let t0 = Instant::now();
        for _ in 0..reps {
            fft.transform(&mut buf, false);
            fft.transform(&mut buf, true);
        }
        let el = t0.elapsed().as_secs_f64();
        println!("N={n}: {:.3} ms per 2-d transform", el / (2.0 * reps as f64) * 1e3);
    }
}
