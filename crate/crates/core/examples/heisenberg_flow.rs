//! Runs the magnetic (Heisenberg) flow from a random field and from a magnon.

use std::f64::consts::PI;

use darboux::grid::PeriodicGrid;
use darboux::liealg::SpaceForm;
use darboux::magnetic::{evolve, functionals};
use darboux::samples::{magnon, random_spin_field, rng};

fn main() -> darboux::Result<()> {
    let grid = PeriodicGrid::periodic(8.0 * PI, 256)?;
    let f = random_spin_field(grid, SpaceForm::Spherical, 4, 0.4, &mut rng(2))?;
    let traj = evolve(&f, 1.0, 1e-3)?;
    let (a, b) = (functionals(&f), functionals(traj.last()));
    println!("f0 {:.12} -> {:.12}", a.f0, b.f0);
    println!("f1 {:.12} -> {:.12}", a.f1, b.f1);
    println!("f2 {:.12} -> {:.12}", a.f2, b.f2);

    let (k, theta0) = (0.5, 0.7f64);
    let m = evolve(&magnon(grid, SpaceForm::Spherical, k, theta0)?, 1.0, 1e-3)?;
    let end = m.last();
    let rate = end.lam[0][1].atan2(end.lam[0][0]).abs();
    println!(
        "magnon precession rate {rate:.10}, k^2 cos(theta0) = {:.10}",
        k * k * theta0.cos()
    );
    Ok(())
}
