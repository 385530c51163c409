//! Evaluates f0..f3 on a helix and a random field, and the bracket {f0, f1}.

use std::f64::consts::TAU;

use darboux::grid::PeriodicGrid;
use darboux::hierarchy::{functionals_of_spin, poisson_bracket_f0_f1};
use darboux::liealg::SpaceForm;
use darboux::samples::{helix, random_spin_field, rng};

fn main() -> darboux::Result<()> {
    let grid = PeriodicGrid::periodic(TAU, 256)?;
    let fields = [
        ("helix", helix(grid, SpaceForm::Euclidean, 0.6, 2.0)?),
        (
            "random",
            random_spin_field(grid, SpaceForm::Spherical, 3, 0.3, &mut rng(4))?,
        ),
    ];
    for (name, f) in fields {
        let r = functionals_of_spin(&f)?;
        println!(
            "{name:<7} f0 {:.8} f1 {:.8} (triple {:?}) f2 {:.8} f3 {:?} | scaled {{f0, f1}} {:.1e}",
            r.values.f0,
            r.values.f1,
            r.f1_triple,
            r.values.f2,
            r.values.f3,
            poisson_bracket_f0_f1(&f)?.scaled()
        );
    }
    Ok(())
}
