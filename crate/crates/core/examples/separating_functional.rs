//! A linear map F_q^b -> F_q^b whose first coordinate separates a point set.

use algturan::analysis::find_separating_functional;
use algturan::{FieldCtx, PointBlock};

fn main() {
    let ctx = FieldCtx::with_order(11).unwrap();
    // Both coordinate projections collide, so u must mix the coordinates.
    let points: Vec<PointBlock> = [(1, 0), (1, 3), (4, 3), (4, 0)]
        .into_iter()
        .map(|(a, b)| PointBlock(vec![ctx.from_int(a), ctx.from_int(b)]))
        .collect();
    let sep = find_separating_functional(&ctx, 2, &points).unwrap();
    println!("u = {:?}", sep.u.iter().map(|c| c.value()).collect::<Vec<_>>());
    for p in &points {
        let image = sep.apply(&ctx, p);
        println!("{:?} -> {:?}", p.coords().iter().map(|c| c.value()).collect::<Vec<_>>(), image.coords().iter().map(|c| c.value()).collect::<Vec<_>>());
    }
}
