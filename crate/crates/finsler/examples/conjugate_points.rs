//! Jacobi fields and conjugate points: det J(s) sweeps, the pi/sqrt(kappa)
//! law on spheres of three curvatures, and the Bonnet-Myers check with its
//! hypothesis violation on flat space.

use finsler::dynamics::{
    bonnet_myers_check, conjugate_search, geodesic, jacobi_field, unit_direction, BonnetOptions,
};
use finsler::metrics::MetricSpec;
use finsler::Result;

fn main() -> Result<()> {
    // det J along a unit-sphere geodesic: zero exactly at s = pi.
    let sphere = MetricSpec::sphere(2, 1.0)?;
    let x0 = [1.0, 0.0];
    let y0 = unit_direction(&sphere, &x0, &[0.1, 1.0])?;
    let traj = geodesic(&sphere, &x0, &y0, 3.4, 2e-3)?;
    let jac = jacobi_field(&sphere, &traj)?;
    println!("det J(s) along a unit-sphere geodesic:");
    for frac in [0.25, 0.5, 0.75, 0.92, 1.0] {
        let idx = ((jac.s.len() - 1) as f64 * frac) as usize;
        println!("  s = {:.3}: det J = {:+.6}", jac.s[idx], jac.det_j[idx]);
    }

    for kappa in [0.25, 1.0, 4.0] {
        let spec = MetricSpec::sphere(2, kappa)?;
        let x0 = [1.0 / kappa.sqrt(), 0.0];
        let y0 = unit_direction(&spec, &x0, &[0.1, 1.0])?;
        let length = 1.2 * std::f64::consts::PI / kappa.sqrt();
        let traj = geodesic(&spec, &x0, &y0, length, 2e-3)?;
        let s = conjugate_search(&spec, &traj)?.expect("positive curvature");
        println!(
            "sphere(kappa = {kappa}): first conjugate point at {s:.6} \
             (pi/sqrt(kappa) = {:.6})",
            std::f64::consts::PI / kappa.sqrt()
        );
    }

    // Hyperbolic space has no conjugate points.
    let hyper = MetricSpec::hyperbolic(2)?;
    let y0 = unit_direction(&hyper, &[0.0, 0.0], &[1.0, 0.1])?;
    let traj = geodesic(&hyper, &[0.0, 0.0], &y0, 10.0, 2e-3)?;
    println!(
        "hyperbolic(2): conjugate point up to length 10 -> {:?}",
        conjugate_search(&hyper, &traj)?
    );

    // Bonnet-Myers on the unit sphere, and the violated hypothesis on flat
    // space.
    let opts = BonnetOptions {
        n_geodesics: 4,
        step: 4e-3,
        start: Some(vec![1.0, 0.0]),
        ..BonnetOptions::default()
    };
    let report = bonnet_myers_check(&sphere, 1.0, &opts)?;
    println!(
        "sphere(2) lambda = 1: bound {:.6}, all geodesics pass = {}",
        report.bound, report.all_pass
    );
    let flat = MetricSpec::euclidean(2)?;
    let report = bonnet_myers_check(
        &flat,
        1.0,
        &BonnetOptions {
            n_geodesics: 2,
            length: Some(1.0),
            step: 5e-3,
            ..BonnetOptions::default()
        },
    )?;
    println!(
        "euclidean(2) lambda = 1: hypothesis violated = {}",
        report.hypothesis_violated
    );
    Ok(())
}
