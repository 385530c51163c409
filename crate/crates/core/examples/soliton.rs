//! Builds a travelling-wave candidate on the H = -1 level and compares its NLS
//! residual at the soliton speed with a perturbed speed.

use darboux::elastica::{soliton_candidate, travelling_wave_residuals, Resolution, SolitonTargets};
use darboux::liealg::SpaceForm;

fn main() -> darboux::Result<()> {
    let t = SolitonTargets {
        momentum: 0.4,
        i1: 3.0,
        i2: 0.3,
        h1: None,
    };
    let c = soliton_candidate(&t, SpaceForm::Hyperbolic, 40.0, 400, 1e-12)?;
    let levels = [
        Resolution { n: 100, slices: 5 },
        Resolution { n: 200, slices: 9 },
        Resolution { n: 400, slices: 17 },
    ];
    for (name, xi) in [("xi = -H1", c.xi), ("1.1 xi", 1.1 * c.xi)] {
        println!("{name}:");
        for r in travelling_wave_residuals(&c, xi, 20.0, 0.08, &levels)? {
            println!("  residual {:.3e} order {:?}", r.residual, r.order);
        }
    }
    Ok(())
}
