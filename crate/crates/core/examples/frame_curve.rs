//! Integrates a helical control signal, lifts it to each geometry and reports the
//! curvature and torsion read off from the controls.

use darboux::frames::{
    geometric_invariants, horizontal_lift, integrate_frame_with, project_base, ControlSignal,
    Scheme,
};
use darboux::grid::PeriodicGrid;
use darboux::liealg::SpaceForm;

fn main() -> darboux::Result<()> {
    let u = ControlSignal::from_fn(PeriodicGrid::open(6.0, 600)?, |_| [0.8, 0.0, 1.2]);
    for form in SpaceForm::ALL {
        let frame = integrate_frame_with(&u, Scheme::Magnus4);
        let base = project_base(&horizontal_lift(&frame, form), form)?.rows();
        let inv = geometric_invariants(&u, form);
        let end: Vec<String> = base
            .last()
            .unwrap()
            .iter()
            .map(|x| format!("{x:.6}"))
            .collect();
        println!(
            "{:<10} kappa {:.3} tau {:?} endpoint ({})",
            form.name(),
            inv.kappa[0],
            inv.tau[0],
            end.join(", ")
        );
    }
    Ok(())
}
