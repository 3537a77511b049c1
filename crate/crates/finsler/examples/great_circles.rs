//! Geodesic integration on the stereographic sphere chart: unit speed is
//! conserved, and great circles close up after arc length 2 pi.

use finsler::dynamics::{geodesic, unit_direction};
use finsler::metrics::{MetricSpec, TangentPoint};
use finsler::Result;

fn main() -> Result<()> {
    let sphere = MetricSpec::sphere(2, 1.0)?;
    let x0 = [0.3, 0.1];
    let y0 = unit_direction(&sphere, &x0, &[1.0, 0.4])?;
    let traj = geodesic(&sphere, &x0, &y0, 6.4, 1e-3)?;

    let mut drift = 0.0f64;
    for i in 0..traj.len() {
        let tp = TangentPoint::new(traj.x_at(i).to_vec(), traj.v_at(i).to_vec())?;
        drift = drift.max((sphere.eval_f(&tp)? - 1.0).abs());
    }
    println!(
        "integrated {} samples, unit-speed drift {:.3e}",
        traj.len(),
        drift
    );

    // Distance back to the start near s = 2 pi.
    for target in [std::f64::consts::PI, std::f64::consts::TAU] {
        let idx = traj
            .s
            .iter()
            .position(|s| *s >= target)
            .unwrap_or(traj.len() - 1);
        let dist: f64 = traj
            .x_at(idx)
            .iter()
            .zip(&x0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        println!(
            "chart distance to start at s = {:.3}: {dist:.6}",
            traj.s[idx]
        );
    }

    // The same start on the flat plane just runs off in a straight line.
    let flat = MetricSpec::euclidean(2)?;
    let y0 = unit_direction(&flat, &x0, &[1.0, 0.4])?;
    let line = geodesic(&flat, &x0, &y0, 6.4, 1e-3)?;
    let end = line.x_at(line.len() - 1);
    println!(
        "flat endpoint after the same length: ({:+.4}, {:+.4})",
        end[0], end[1]
    );
    Ok(())
}
