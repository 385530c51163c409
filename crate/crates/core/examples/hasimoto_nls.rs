//! Maps a Heisenberg trajectory to a complex curvature field and measures how well
//! it satisfies the cubic NLS; also checks the closed-form solutions.

use std::f64::consts::TAU;

use darboux::grid::PeriodicGrid;
use darboux::hasimoto::{nls_check, nls_residual, ComplexField};
use darboux::liealg::{SpaceForm, C64};
use darboux::magnetic::{evolve_with, EvolveOptions};
use darboux::samples::{random_spin_field, rng};

fn main() -> darboux::Result<()> {
    for (n, dt) in [(32, 1e-3), (64, 5e-4), (128, 2.5e-4)] {
        let f = random_spin_field(
            PeriodicGrid::periodic(TAU, n)?,
            SpaceForm::Euclidean,
            3,
            0.25,
            &mut rng(3),
        )?;
        let traj = evolve_with(
            &f,
            0.1,
            dt,
            EvolveOptions {
                stability: 0.2,
                record_every: 1,
            },
        )?;
        let c = nls_check(&traj)?;
        println!(
            "N = {n:>3}: NLS residual {:.3e}, Heisenberg residual {:.3e}",
            c.nls, c.heisenberg
        );
    }
    let times = [0.0, 1e-5, 2e-5];
    let zero = C64::new(0.0, 0.0);
    let plane = ComplexField::plane_wave(PeriodicGrid::periodic(TAU, 512)?, &times, 1.3, 3.0);
    let sech = ComplexField::sech_soliton(PeriodicGrid::periodic(60.0, 512)?, &times, 1.0, 30.0);
    println!(
        "plane wave {:.3e}, sech soliton {:.3e}",
        nls_residual(&plane, zero)?,
        nls_residual(&sech, zero)?
    );
    Ok(())
}
