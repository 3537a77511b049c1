//! The Schwarzian tensor as a Möbius detector: the conformal factor that
//! maps the flat plane onto the round sphere (stereographically) has
//! vanishing Schwarzian tensor, while a generic cubic factor does not.

use finsler::fields::ScalarField;
use finsler::metrics::MetricSpec;
use finsler::sample;
use finsler::schwarzian::{c_conformal_residual, mobius_residual, schwarzian_tensor};
use finsler::Result;

fn main() -> Result<()> {
    let flat = MetricSpec::euclidean(2)?;
    let pts = sample::tangent_points(&flat, 40, 1.5, 42)?;

    let stereo = ScalarField::parse("0 - ln(1 + (x_1^2 + x_2^2) / 4)")?;
    let cubic = ScalarField::parse("x_1^3")?;
    let constant = ScalarField::constant(0.7);

    for (name, phi) in [
        ("stereographic factor -ln(1 + |x|^2/4)", &stereo),
        ("cubic factor x_1^3", &cubic),
        ("constant factor 0.7", &constant),
    ] {
        let sup = mobius_residual(&flat, phi, &pts)?;
        println!(
            "{name}: sup |B(phi)| = {sup:.3e} -> {}",
            if sup <= 1e-6 {
                "Möbius"
            } else {
                "not Möbius"
            }
        );
    }

    // Traceless symmetric structure at one point, on a genuinely Finsler
    // metric, plus the C-conformal residual.
    let funk = MetricSpec::funk(2)?;
    let tp = sample::tangent_points(&funk, 1, 0.7, 7)?.remove(0);
    let phi = ScalarField::parse("x_1")?;
    let b = schwarzian_tensor(&funk, &phi, &tp)?;
    let ginv = funk.inverse_metric(&tp)?;
    let mut trace = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            trace += ginv.get(&[i, j]) * b.get(&[i, j]);
        }
    }
    println!();
    println!("funk(2), phi = x_1 at x = {:?}:", tp.x());
    println!("  symmetry defect of B = {:.3e}", b.symmetry_defect(0, 1));
    println!("  g-trace of B         = {trace:.3e}");
    let c = c_conformal_residual(&funk, &phi, &tp)?;
    println!(
        "  |C^h_ij phi_h|       = {:.3e} (nonzero: phi is not Möbius here)",
        c.sup_norm()
    );
    Ok(())
}
