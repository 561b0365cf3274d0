use lumistack::intrinsic::*;
use lumistack::synth::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut r = ChaCha8Rng::seed_from_u64(29);
    let scene = PlanckianScene::random(40, 40, 3, 5200.0, &mut r);
    let base = render_planckian(&scene);
    let chi = project_chi(&log_chromaticity_float(&base));
    // print cluster positions (distinct chi up to 1e-9)
    let mut reps: Vec<[f64;2]> = Vec::new();
    for p in chi.points() {
        if !reps.iter().any(|q| (q[0]-p[0]).abs()<1e-9 && (q[1]-p[1]).abs()<1e-9) { reps.push(*p); }
    }
    println!("clusters: {reps:?}");
    let scan = min_entropy_angle(&chi).unwrap();
    let min = scan.entropies.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = scan.entropies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!("min {min:.6} max {max:.6} best {}", scan.best_angle);
    for w in (1..=180).step_by(6) {
        println!("w={w:3} eta={:.6}", scan.entropies[w-1]);
    }
}
