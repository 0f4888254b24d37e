use univalens::corpus;
use univalens::riccati::{monodromy, fixed_point_census, MonodromyOpts};
use std::time::Instant;
fn main() {
    let eq = corpus::wittich_equation();
    println!("singular times: {:?}", eq.singular_times);
    let loops = corpus::wittich_loops();
    let t0 = Instant::now();
    let rep = monodromy(&eq, &loops, &MonodromyOpts::new(1e-9)).unwrap();
    for (i, g) in rep.generators.iter().enumerate() {
        println!("loop {}: psl distance to id = {:.3e}, err_est {:.3e}", i, g.matrix.psl_distance_to_identity(), g.error_estimate);
    }
    let census = fixed_point_census(&rep, 1e-6).unwrap();
    println!("verdict: {:?} notes: {:?}", census.verdict, census.notes);
    println!("elapsed: {:?}", t0.elapsed());
}
