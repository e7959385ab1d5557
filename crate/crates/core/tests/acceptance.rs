use cpint::selftest::{run_acceptance, seed_from_env};

fn main() {
    let seed = seed_from_env();
    println!("acceptance suite, seed {seed}");
    let results = run_acceptance(seed, 1e-10);
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
