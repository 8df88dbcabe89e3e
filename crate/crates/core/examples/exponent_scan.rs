//! Log-log fit of pattern copies against surviving vertices over several q.

use algturan::analysis::exponent_scan;
use algturan::construction::{derive_params, Budget, Overrides};
use algturan::Pattern;

fn main() {
    let overrides = Overrides { bad_threshold: Some(7), ..Overrides::default() };
    let params = derive_params(&[2], &Pattern::edge(2), (3, 1), &overrides).unwrap();
    let scan = exponent_scan(&params, &[3, 4, 5, 7, 8, 9], 4, 0, &Budget::default()).unwrap();
    for p in &scan.points {
        println!(
            "q = {}: mean |V'| = {:6.1}, mean copies = {:8.1}, retention >= {:.3}",
            p.q, p.mean_vertices_after, p.mean_copies, p.min_retention
        );
    }
    println!("slope = {:.4}, target = {} ({:.4})", scan.slope, scan.target_exact, scan.target);
}
