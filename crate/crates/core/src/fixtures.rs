//! Small algebras used throughout the tests and shipped as JSON under
//! `fixtures/`. In each of them the element 0 is the constant 1 unless noted.

use crate::algebra::FiniteAlgebra;

/// One-element algebra with no operations.
pub fn triv1() -> FiniteAlgebra {
    FiniteAlgebra::new("TRIV1", 1, 0, vec![]).expect("fixture")
}

/// Three-element implication algebra `{1, a, b}` (indices 0, 1, 2) with
/// `x -> y = 1` when `x = y` and `y` otherwise.
pub fn hilb3() -> FiniteAlgebra {
    let table = (0..9)
        .map(|i| {
            let (x, y) = (i / 3, i % 3);
            if x == y {
                0
            } else {
                y
            }
        })
        .collect();
    FiniteAlgebra::new("HILB3", 3, 0, vec![("->", 2, table)]).expect("fixture")
}

/// Two-element lattice with meet and join; the constant is the top, 1.
pub fn lat2() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "LAT2",
        2,
        1,
        vec![("meet", 2, vec![0, 0, 0, 1]), ("join", 2, vec![0, 1, 1, 1])],
    )
    .expect("fixture")
}

fn xor_group(name: &str, bits: u32) -> FiniteAlgebra {
    let n = 1usize << bits;
    let table = (0..n * n).map(|i| (i / n) ^ (i % n)).collect();
    FiniteAlgebra::new(name, n, 0, vec![("*", 2, table)]).expect("fixture")
}

/// Klein four-group `{1, x, y, z}` (indices 0..3) as bitwise xor.
pub fn bg4() -> FiniteAlgebra {
    xor_group("BG4", 2)
}

/// Elementary abelian group of order 8 as bitwise xor.
pub fn bg8() -> FiniteAlgebra {
    xor_group("BG8", 3)
}

/// Cyclic group of order 4 with addition; constant 0.
pub fn z4() -> FiniteAlgebra {
    let table = (0..16).map(|i| (i / 4 + i % 4) % 4).collect();
    FiniteAlgebra::new("Z4", 4, 0, vec![("+", 2, table)]).expect("fixture")
}

/// All shipped fixtures with their file stems.
pub fn all() -> Vec<(&'static str, FiniteAlgebra)> {
    vec![
        ("triv1", triv1()),
        ("hilb3", hilb3()),
        ("lat2", lat2()),
        ("bg4", bg4()),
        ("bg8", bg8()),
        ("z4", z4()),
    ]
}

pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    let key = name.to_ascii_lowercase();
    all().into_iter().find(|(n, _)| *n == key).map(|(_, a)| a)
}
