//! Histogram of extension-set sizes at q = 49 and the threshold it suggests.

use algturan::analysis::dichotomy_scan;
use algturan::construction::{derive_params, Budget, FSource, Overrides};
use algturan::Pattern;

fn main() {
    let overrides = Overrides { bad_threshold: Some(1), ..Overrides::default() };
    let params = derive_params(&[2], &Pattern::edge(2), (7, 2), &overrides).unwrap();
    let rep = dichotomy_scan(&params, 1000, 0, &Budget::default(), &FSource::Random).unwrap();
    for (size, count) in &rep.histogram {
        println!("|W| = {size:2}: {count}");
    }
    println!("c_est = {}, band = ({:.1}, {:.1}), empty = {}", rep.c_est, rep.band.0, rep.band.1, rep.band_empty);
    for w in &rep.warnings {
        println!("warning: {w}");
    }
}
