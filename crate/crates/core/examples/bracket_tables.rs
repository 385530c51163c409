//! Prints the bracket table of each geometry and checks it against the matrix commutator.

use darboux::liealg::{bracket, matrix_bracket, AlgebraElement, SpaceForm};

const NAMES: [&str; 6] = ["A1", "A2", "A3", "B1", "B2", "B3"];

fn label(x: &AlgebraElement) -> String {
    let terms: Vec<String> = x
        .to_array()
        .iter()
        .zip(NAMES)
        .filter(|(c, _)| **c != 0.0)
        .map(|(c, n)| {
            if *c == 1.0 {
                n.to_string()
            } else if *c == -1.0 {
                format!("-{n}")
            } else {
                format!("{c}{n}")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

fn main() {
    for form in SpaceForm::ALL {
        println!("eps = {}", form.epsilon());
        for i in 0..6 {
            let row: Vec<String> = (0..6)
                .map(|j| {
                    format!(
                        "{:>6}",
                        label(&bracket(
                            &AlgebraElement::basis(i),
                            &AlgebraElement::basis(j),
                            form
                        ))
                    )
                })
                .collect();
            println!("  {:>3} | {}", NAMES[i], row.join(" "));
        }
    }
    let mut worst = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            let (x, y) = (AlgebraElement::basis(i), AlgebraElement::basis(j));
            let m = matrix_bracket(&x.to_matrix(), &y.to_matrix());
            worst = worst.max(m.dist(&bracket(&x, &y, SpaceForm::Hyperbolic).to_matrix()));
        }
    }
    println!("matrix commutator agreement on sl2(C): {worst:.1e}");
}
