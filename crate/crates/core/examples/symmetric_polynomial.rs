//! Samples a symmetric block polynomial and checks that swapping blocks
//! leaves its value unchanged.

use std::sync::Arc;

use algturan::poly::{enumerate_orbit_basis, DEFAULT_BASIS_CAP};
use algturan::{rng, BlockShape, FieldCtx, PointBlock};

fn main() {
    let ctx = Arc::new(FieldCtx::with_order(5).unwrap());
    let shape = BlockShape::new(2, 2, 2).unwrap();
    let basis = enumerate_orbit_basis(shape, DEFAULT_BASIS_CAP).unwrap();
    println!("{} block monomials, {} orbit representatives", shape.block_monomial_count(), basis.len());
    let f = basis.sample(&ctx, &mut rng::stream(1, "example", 0));
    println!("f has {} nonzero orbit terms:\n{}", f.term_count(), f.to_text());

    let x = PointBlock(vec![ctx.from_int(1), ctx.from_int(3)]);
    let y = PointBlock(vec![ctx.from_int(4), ctx.from_int(2)]);
    let a = f.eval(&[x.clone(), y.clone()]).unwrap();
    let b = f.eval(&[y, x]).unwrap();
    println!("f(x, y) = {}, f(y, x) = {}", a.value(), b.value());
    assert_eq!(a, b);
}
