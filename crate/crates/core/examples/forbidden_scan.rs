//! Looks for complete partite subgraphs through extension sets.

use algturan::hypergraph::{extension_set, find_forbidden, GroupedSequence};
use algturan::Hypergraph;

fn main() {
    // K^{(3)}_{2,2,5}: parts {0,1}, {2,3}, {4..8}.
    let g = Hypergraph::complete_partite(&[2, 2, 5]);
    let seq = GroupedSequence::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
    println!("W({:?}) = {:?}", seq.groups(), extension_set(&g, &seq).unwrap().members);
    for p in [5, 6] {
        match find_forbidden(&g, &[2, 2], p, u128::MAX).unwrap() {
            Some(w) => println!("p = {p}: witness {:?} + tail {:?}", w.sequence.groups(), w.tail),
            None => println!("p = {p}: no K_(2,2,{p})"),
        }
    }
}
