//! Leading terms of the upper bound on copies of K_{a_1,...,a_r}.

use algturan::oracle::upper_bound_leading;

fn main() {
    let cases: [(&[usize], &[usize]); 5] = [
        (&[1, 1], &[2, 2]),
        (&[1, 1], &[3, 3]),
        (&[1, 1, 1], &[2, 2, 2]),
        (&[1, 1], &[1, 5]),
        (&[1, 2], &[2, 3]),
    ];
    for (a, s) in cases {
        match upper_bound_leading(a, s) {
            Ok(t) => println!("a = {a:?}, s = {s:?}: {:.4} * n^({}), gamma = {}", t.coefficient, t.exponent, t.gamma),
            Err(e) => println!("a = {a:?}, s = {s:?}: {e}"),
        }
    }
}
