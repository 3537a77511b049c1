//! The projective-parameter ODE p''' = 3/2 (p'')^2/p' + S(s) p' with the
//! Ricci source S = 2 Ric / (n-1): p = s on flat space, p = tan(s) on the
//! unit sphere (escaping at pi/2), and Möbius-gauge covariance of the
//! solutions.

use finsler::dynamics::{
    geodesic, projective_parameter, projective_parameter_with_gauge, schwarzian_residual,
    unit_direction,
};
use finsler::metrics::MetricSpec;
use finsler::Result;

fn main() -> Result<()> {
    let flat = MetricSpec::euclidean(2)?;
    let y0 = unit_direction(&flat, &[0.0, 0.0], &[1.0, 1.0])?;
    let traj = geodesic(&flat, &[0.0, 0.0], &y0, 2.0, 1e-3)?;
    let pp = projective_parameter(&flat, &traj)?;
    let drift =
        pp.s.iter()
            .zip(&pp.p)
            .fold(0.0f64, |m, (s, p)| m.max((p - s).abs()));
    println!("flat: p(s) = s with drift {drift:.3e}");

    let sphere = MetricSpec::sphere(2, 1.0)?;
    let x0 = [0.7, -0.1];
    let y0 = unit_direction(&sphere, &x0, &[1.0, 0.3])?;
    let traj = geodesic(&sphere, &x0, &y0, 1.4, 1e-3)?;
    let pp = projective_parameter(&sphere, &traj)?;
    println!("sphere, p vs tan:");
    for frac in [0.25, 0.5, 0.75, 1.0] {
        let i = ((pp.s.len() - 1) as f64 * frac) as usize;
        println!(
            "  s = {:.3}: p = {:+.9}, tan(s) = {:+.9}",
            pp.s[i],
            pp.p[i],
            pp.s[i].tan()
        );
    }
    println!(
        "re-substitution residual sup |S_measured - 2 Ric/(n-1)| = {:.3e}",
        schwarzian_residual(&sphere, &traj, &pp)?
    );

    // Longer run: tan escapes through the pole, flagged as blow-up.
    let traj_long = geodesic(&sphere, &x0, &y0, 2.5, 1e-3)?;
    let pp_long = projective_parameter(&sphere, &traj_long)?;
    println!(
        "length 2.5 run: blow-up flag at s = {:?} (pi/2 = {:.6})",
        pp_long.blow_up,
        std::f64::consts::FRAC_PI_2
    );

    // Gauge freedom: initial data pushed through T(p) = (2p+1)/(p+3) stays
    // related by T.
    let t = |p: f64| (2.0 * p + 1.0) / (p + 3.0);
    let gauged = projective_parameter_with_gauge(&sphere, &traj, t(0.0), 5.0 / 9.0, -10.0 / 27.0)?;
    let mut worst = 0.0f64;
    for i in 0..gauged.s.len().min(pp.s.len()) {
        worst = worst.max((gauged.p[i] - t(pp.p[i])).abs());
    }
    println!("Möbius gauge covariance: sup |p_T - T(p)| = {worst:.3e}");
    Ok(())
}
