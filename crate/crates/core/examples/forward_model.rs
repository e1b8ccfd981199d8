//! Forward model checks: a point source against the closed-form field, the
//! FFT volume potential against dense quadrature, and the Lippmann–Schwinger
//! solve in the bump medium.
//!
//! cargo run --release --example forward_model

use std::time::Instant;

use num_complex::Complex64;
use sparse_source::forward::{fundamental_solution, ForwardModel, Grid, ReceiverSet, VolumePotential, DATA_TOL};
use sparse_source::phantoms::{make_medium, make_phantom, PhantomSpec};

fn main() -> sparse_source::Result<()> {
    let k = 6.0;

    let g = Grid::new(2, 64, 1.0)?;
    let vp = VolumePotential::new(&g, k)?;
    let src = g.linear_index([32, 32, 0]);
    let mut h = vec![Complex64::new(0.0, 0.0); g.len()];
    h[src] = Complex64::new(1.0 / g.cell_volume(), 0.0);
    let field = vp.apply_fft(&h)?;
    let y0 = g.node(src);
    println!("point source on 64², k = {k}");
    for cells in [3usize, 8, 20] {
        let i = g.linear_index([32 + cells, 32, 0]);
        let r = g.node(i)[0] - y0[0];
        let exact = fundamental_solution(k, r, 2)? * (k * k);
        println!("  r = {r:.4}: computed {:.6e}, k²Φ {:.6e}", field[i], exact);
    }

    let g = Grid::new(2, 32, 1.5)?;
    let vp = VolumePotential::new(&g, k)?;
    let w: Vec<Complex64> = g.nodes().map(|p| Complex64::new((2.0 * p[0]).cos(), p[1] * p[0])).collect();
    let t = Instant::now();
    let dense = vp.apply_dense(&w)?;
    let t_dense = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let fast = vp.apply_fft(&w)?;
    let t_fft = t.elapsed().as_secs_f64();
    let diff = dense.iter().zip(&fast).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = dense.iter().map(|a| a.norm()).fold(0.0, f64::max);
    println!("volume potential on 32²: max |dense - fft| / max |dense| = {:.2e} ({t_dense:.3}s dense, {t_fft:.4}s fft)", diff / scale);

    let g = Grid::new(2, 64, 3.0)?;
    let receivers = ReceiverSet::uniform(&g, 64)?;
    let mu = make_phantom(&PhantomSpec::dirac_peaks(2, 1.0), &g)?;
    for inhomogeneous in [false, true] {
        let medium = make_medium(&g, k, inhomogeneous)?;
        let model = ForwardModel::new(&g, &medium)?;
        let t = Instant::now();
        let data = model.source_to_measurement(&receivers, &mu, DATA_TOL)?;
        println!(
            "{} medium: ‖u_b‖ = {:.4e} at {} receivers ({:.3}s)",
            if inhomogeneous { "bump" } else { "homogeneous" },
            data.norm(),
            receivers.len(),
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
