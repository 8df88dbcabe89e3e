//! Exact extremal numbers for small graphs.

use algturan::oracle::{exact_turan, TuranInstance, DEFAULT_SLOT_CAP};
use algturan::Pattern;

fn main() {
    for forbid in ["K3", "K2,2", "P4"] {
        let values: Vec<u64> = (2..=7)
            .map(|n| {
                let inst = TuranInstance::new(n, Pattern::parse(forbid, 2).unwrap(), Pattern::edge(2)).unwrap();
                exact_turan(&inst, DEFAULT_SLOT_CAP).unwrap().max_count
            })
            .collect();
        println!("ex(n, {forbid:4}) for n = 2..7: {values:?}");
    }
    let inst = TuranInstance::new(6, Pattern::parse("K2,2", 2).unwrap(), Pattern::clique(2, 3)).unwrap();
    let res = exact_turan(&inst, DEFAULT_SLOT_CAP).unwrap();
    println!("most triangles in a C4-free graph on 6 vertices: {}\n{}", res.max_count, res.witness.to_text());
}
