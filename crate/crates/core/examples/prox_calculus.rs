//! The proximal map of `p(μ) = α‖μ‖₁ + α₀/2‖μ‖²`, its Moreau complement and
//! the conjugate `p*`, evaluated on a few inputs.
//!
//! cargo run --example prox_calculus

use nalgebra::DVector;
use sparse_source::prox::{moreau_complement, prox_p, soft_threshold, RegParams};

fn main() -> sparse_source::Result<()> {
    let reg = RegParams::new(0.5, 0.25)?;
    let sigma = 2.0;
    let x = DVector::from_vec(vec![-3.0, -1.0, -0.2, 0.0, 0.6, 1.0, 2.5]);

    let st = soft_threshold(&x, reg.alpha * sigma);
    let p = prox_p(&x, sigma, &reg);
    let c = moreau_complement(&x, sigma, &reg);
    println!("alpha = {}, alpha0 = {}, sigma = {sigma}", reg.alpha, reg.alpha0);
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "x", "S(x)", "prox_p", "x - prox", "sum");
    for i in 0..x.len() {
        println!("{:>6.2} {:>10.4} {:>10.4} {:>10.4} {:>10.2e}", x[i], st[i], p[i], c[i], p[i] + c[i] - x[i]);
    }

    // Fenchel–Young holds with equality at z ∈ ∂p(μ).
    let mu = p.clone();
    let z = &c / sigma;
    let lhs = reg.penalty(&mu) + reg.penalty_conjugate(&z);
    println!("p(μ) + p*(z) = {lhs:.12}, ⟨μ, z⟩ = {:.12}", mu.dot(&z));
    Ok(())
}
