use biext_core::verify::{run_verify, RunConfig};

fn main() {
    let t0 = std::time::Instant::now();
    let summary = run_verify(&RunConfig::default()).unwrap();
    let dt = t0.elapsed();
    for s in &summary.suites {
        println!("{:32} {} ({})", s.name, if s.pass { "PASS" } else { "FAIL" }, s.detail);
    }
    println!("total: {} in {dt:?}", if summary.pass { "PASS" } else { "FAIL" });
}
