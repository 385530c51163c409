//! Integrates the extremal equations and prints the invariants and reduction residuals.

use darboux::elastica::{extremal_report, integrate_extremal, invariants, ExtremalState};
use darboux::liealg::SpaceForm;

fn main() -> darboux::Result<()> {
    for form in SpaceForm::ALL {
        let x = ExtremalState::new([0.3, -0.2, 0.5], [0.4, 0.6, -0.1], form);
        let inv = invariants(&x);
        let rep = extremal_report(&integrate_extremal(&x, 50.0, 1e-12)?, 2001)?;
        println!(
            "{:<10} H {:.6} H1 {:.6} I1 {:.6} I2 {:.6} | drift {:.1e} cubic {:.1e} sphere {:.1e}",
            form.name(),
            inv.hamiltonian,
            inv.momentum,
            inv.i1,
            inv.i2,
            rep.invariant_drift,
            rep.cubic_residual,
            rep.sphere_residual
        );
    }
    Ok(())
}
