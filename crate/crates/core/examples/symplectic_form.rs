//! Evaluates the symplectic form on a random spin field and checks that rotating a
//! perturbation by the field pairs it with its own squared norm.

use std::f64::consts::TAU;

use darboux::grid::PeriodicGrid;
use darboux::liealg::{dot, scale, sub3, SpaceForm};
use darboux::samples::{random_spin_field, rng};
use darboux::symplectic::{moment_map, omega, tangent_partner, TangentPerturbation};

fn main() -> darboux::Result<()> {
    let grid = PeriodicGrid::periodic(TAU, 128)?;
    for form in SpaceForm::ALL {
        let lam = random_spin_field(grid, form, 3, 0.3, &mut rng(1))?;
        // a tangent perturbation vanishing at the anchor s = 0
        let coords: Vec<[f64; 3]> = grid
            .nodes()
            .iter()
            .zip(&lam.lam)
            .map(|(&s, l)| {
                let raw = [s.cos(), (2.0 * s).sin(), 0.5];
                scale((0.5 * s).sin().powi(2), sub3(raw, scale(dot(raw, *l), *l)))
            })
            .collect();
        let u = TangentPerturbation::from_coords(grid, form, &coords)?;
        let pair = omega(&lam, &u, &tangent_partner(&lam, &u), form)?;
        let norm2 = grid.integrate(&coords.iter().map(|c| dot(*c, *c)).collect::<Vec<_>>());
        println!(
            "{:<10} omega(U, [Lambda, U]) = {pair:.12}, int |U|^2 = {norm2:.12}, moment map {:?}",
            form.name(),
            moment_map(&lam).to_array().map(|x| (x * 1e6).round() / 1e6)
        );
    }
    Ok(())
}
