//! One run of the deletion construction for K_{2,c}-free graphs over F_7.

use algturan::construction::{derive_params, run_construction, Budget, FSource, Overrides};
use algturan::Pattern;

fn main() {
    let overrides = Overrides { bad_threshold: Some(4), ..Overrides::default() };
    let params = derive_params(&[2], &Pattern::edge(2), (7, 1), &overrides).unwrap();
    println!("b = {}, t = {}, s = {}, degree = {}, N = {}", params.b, params.t, params.s, params.degree, params.vertex_count());
    let res = run_construction(&params, 2024, &Budget::default(), &FSource::Random).unwrap();
    let s = &res.summary;
    println!("G_f: {} vertices, {} edges", s.vertices, s.edges);
    println!("bad sequences: {}, removed vertices: {}", s.bad_sequences, s.removed_vertices);
    for (seq, size) in res.report.bad.iter().take(5) {
        println!("  {:?} has |W| = {size}", seq.groups());
    }
    println!("G': {} vertices, {} edges, certificate = {}", s.vertices_after, s.edges_after, s.certificate);
    for t in &res.timings {
        println!("  {:8} {:.4}s", t.stage, t.seconds);
    }
}
