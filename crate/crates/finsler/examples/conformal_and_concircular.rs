//! Conformal changes of a Finsler metric and the concircular equation:
//! the fundamental tensor rescales by e^{2 phi}, constant factors are
//! homothetic (same spray), and the sphere's height function solves
//! Hess(rho) + rho g = 0.

use finsler::connection::spray;
use finsler::fields::ScalarField;
use finsler::metrics::MetricSpec;
use finsler::sample;
use finsler::schwarzian::{concircular_residual, conformal_change};
use finsler::Result;

fn main() -> Result<()> {
    let funk = MetricSpec::funk(2)?;
    let phi = ScalarField::parse("0.3 * x_1 * x_2")?;
    let changed = conformal_change(&funk, &phi)?;
    let tp = sample::tangent_points(&funk, 1, 0.7, 42)?.remove(0);
    let scale = (2.0 * phi.eval(tp.x())?).exp();
    let g = funk.fundamental_tensor(&tp)?;
    let gbar = changed.fundamental_tensor(&tp)?;
    println!(
        "conformal rule at x = ({:+.3}, {:+.3}):",
        tp.x()[0],
        tp.x()[1]
    );
    for i in 0..2 {
        for j in 0..2 {
            println!(
                "  gbar_{i}{j} = {:+.9}, e^(2 phi) g_{i}{j} = {:+.9}",
                gbar.get(&[i, j]),
                scale * g.get(&[i, j])
            );
        }
    }

    let homothety = conformal_change(&funk, &ScalarField::constant(0.8))?;
    let ga = spray(&funk, &tp)?;
    let gb = spray(&homothety, &tp)?;
    println!(
        "homothety leaves the spray fixed: |G - Gbar| = {:.3e}",
        ga.iter()
            .zip(&gb)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    );

    // Concircular equation on the round sphere: the height function
    // rho = (1 - |x|^2)/(1 + |x|^2) with c = 1.
    let sphere = MetricSpec::sphere(2, 1.0)?;
    let rho = ScalarField::parse("(1 - x_1^2 - x_2^2) / (1 + x_1^2 + x_2^2)")?;
    let mut worst = 0.0f64;
    for tp in sample::tangent_points(&sphere, 30, 1.0, 7)? {
        worst = worst.max(concircular_residual(&sphere, &rho, 1.0, &tp)?.sup_norm());
    }
    println!("concircular residual of the height function on sphere(2): sup = {worst:.3e}");

    // The same function on flat space is not concircular with c = 1.
    let flat = MetricSpec::euclidean(2)?;
    let tp = sample::tangent_points(&flat, 1, 1.0, 9)?.remove(0);
    println!(
        "same rho on flat space with c = 1: residual = {:.3e} (nonzero, as it should be)",
        concircular_residual(&flat, &rho, 1.0, &tp)?.sup_norm()
    );
    Ok(())
}
