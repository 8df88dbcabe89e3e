//! Arithmetic in a few small fields, including the extension fields F_4 and F_9.

use algturan::FieldCtx;

fn main() {
    for q in [7u64, 4, 9] {
        let f = FieldCtx::with_order(q).expect("prime power");
        println!("F_{q}: p = {}, k = {}, modulus (low to high) = {:?}", f.characteristic(), f.degree(), f.modulus());
        let g = f.elements().skip(1).find(|&a| (1..q - 1).all(|e| f.pow(a, e) != f.one())).expect("cyclic group");
        let powers: Vec<u32> = (0..q - 1).map(|e| f.pow(g, e).value()).collect();
        println!("  generator {} has powers {powers:?}", g.value());
        for a in f.elements().skip(1) {
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv), f.one());
        }
    }
}
