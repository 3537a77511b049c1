//! Define a metric through the expression grammar (here a quartic-root
//! norm, a genuinely non-Riemannian example), load another one from a JSON
//! config string, and cross-check the engine's derivatives against the
//! finite-difference oracle.

use finsler::connection;
use finsler::diffengine::{fd_default_step, fd_partial, MultiIndex};
use finsler::expr::Expr;
use finsler::metrics::{MetricSpec, TangentPoint};
use finsler::Result;

fn main() -> Result<()> {
    // F = (y_1^4 + y_2^4)^(1/4): smooth and strongly convex off the axes.
    let quartic = MetricSpec::custom(
        "quartic-norm",
        Expr::parse("pow(y_1^4 + y_2^4, 0.25)")?,
        2,
        f64::INFINITY,
    )?;
    let tp = TangentPoint::new(vec![0.2, -0.1], vec![1.0, 0.7])?;
    println!("{}: F = {:.9}", quartic.name(), quartic.eval_f(&tp)?);
    let g = quartic.fundamental_tensor(&tp)?;
    println!(
        "g = [{:+.6} {:+.6}; {:+.6} {:+.6}] (y-dependent)",
        g.get(&[0, 0]),
        g.get(&[0, 1]),
        g.get(&[1, 0]),
        g.get(&[1, 1])
    );
    let cd = connection::cartan_coefficients(&quartic, &tp)?;
    println!(
        "|C^i_jk| = {:.6} (nonzero: not Riemannian)",
        cd.cartan_upper.sup_norm()
    );

    // The same machinery from a config string.
    let cfg = r#"{
        "kind": "randers", "dimension": 2,
        "params": {
            "a": [["1 + 0.2 * x_2^2", "0"], ["0", "1"]],
            "b": ["0.3 * cos(x_2)", "0"]
        },
        "domain_radius": 2.0
    }"#;
    let randers = MetricSpec::from_config_str(cfg)?;
    println!(
        "\nloaded {} from config, F = {:.9}",
        randers.name(),
        randers.eval_f(&tp)?
    );

    // Automatic vs finite-difference derivatives of a spray component.
    let idx = MultiIndex::new(vec![0, 1, 1, 0]);
    let auto = connection::spray_partial(&randers, &tp, 0, &idx)?;
    let spec = randers.clone();
    let f = move |w: &[f64]| {
        let q = TangentPoint::new(w[..2].to_vec(), w[2..].to_vec()).unwrap();
        connection::spray(&spec, &q).unwrap()[0]
    };
    let z: Vec<f64> = tp.x().iter().chain(tp.y()).copied().collect();
    let fd = fd_partial(&f, &z, &idx, fd_default_step(&z, idx.total()));
    println!("d^2 G^1/dx_2 dy_1: jet engine {auto:+.9}, fd oracle {fd:+.9}");
    Ok(())
}
