//! Evaluate the full tensor apparatus of each catalog metric at one
//! tangent point: F, g, spray, connection coefficients, torsion, curvature.

use finsler::connection;
use finsler::curvature::{self, CurvatureData};
use finsler::metrics::{MetricSpec, TangentPoint};
use finsler::Result;

fn main() -> Result<()> {
    let metrics = [
        MetricSpec::euclidean(2)?,
        MetricSpec::sphere(2, 1.0)?,
        MetricSpec::hyperbolic(2)?,
        MetricSpec::funk(2)?,
        MetricSpec::randers_const(vec![0.4, 0.1])?,
    ];
    let tp = TangentPoint::new(vec![0.25, -0.15], vec![1.0, 0.4])?;

    for spec in &metrics {
        let f = spec.eval_f(&tp)?;
        let g = spec.fundamental_tensor(&tp)?;
        let cd = connection::cartan_coefficients(spec, &tp)?;
        let cv = CurvatureData::compute(spec, &tp)?;
        let flag = curvature::flag_curvature(spec, &tp, &[0.0, 1.0])?;

        println!("== {}", spec.name());
        println!("   F           = {f:.9}");
        println!(
            "   g           = [{:+.6} {:+.6}; {:+.6} {:+.6}]",
            g.get(&[0, 0]),
            g.get(&[0, 1]),
            g.get(&[1, 0]),
            g.get(&[1, 1])
        );
        println!(
            "   spray G^i   = [{:+.6}, {:+.6}]",
            cd.spray[0], cd.spray[1]
        );
        println!("   |Gamma|     = {:.6}", cd.gamma.sup_norm());
        println!(
            "   |C^i_jk|    = {:.6}   (zero iff Riemannian)",
            cd.cartan_upper.sup_norm()
        );
        println!("   |R^i_jkm|   = {:.6}", cv.chern.sup_norm());
        println!("   Ric / F^2   = {:+.6}", cv.ricci / (f * f));
        println!("   flag kappa  = {flag:+.6}");
    }
    Ok(())
}
