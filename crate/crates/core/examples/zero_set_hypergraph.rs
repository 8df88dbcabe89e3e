//! Builds the zero-set hypergraph of a random polynomial and counts copies of
//! a few small patterns in it.

use std::sync::Arc;

use algturan::hypergraph::{build_from_polynomial, count_pattern, BuildCaps};
use algturan::poly::{enumerate_orbit_basis, DEFAULT_BASIS_CAP};
use algturan::{rng, BlockShape, FieldCtx, Pattern};

fn main() {
    let ctx = Arc::new(FieldCtx::with_order(7).unwrap());
    let shape = BlockShape::new(2, 2, 4).unwrap();
    let f = enumerate_orbit_basis(shape, DEFAULT_BASIS_CAP).unwrap().sample(&ctx, &mut rng::stream(3, "example", 0));
    let g = build_from_polynomial(&f, BuildCaps::default()).unwrap();
    println!("G_f: {} vertices, {} edges (C(N,2)/q = {:.1})", g.vertex_count(), g.edge_count(), 49.0 * 48.0 / 2.0 / 7.0);
    for name in ["edge", "K3", "P4", "K2,2"] {
        let h = Pattern::parse(name, 2).unwrap();
        let c = count_pattern(&g, &h).unwrap();
        println!("  {name:5} copies = {:6}  embeddings = {:7}  |Aut| = {}", c.unordered_copies, c.labeled_embeddings, c.automorphisms);
    }
}
