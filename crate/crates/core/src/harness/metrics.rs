//! Noise model, grid transfer and the reconstruction error.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_pcg::Pcg64;

use crate::error::{Error, Result};
use crate::forward::Grid;
use crate::realfield::RealifiedVector;

/// Name of the generator behind every random stream, recorded with results.
pub const RNG_NAME: &str = "pcg64-mcg128xsl64";

pub fn rng_from_seed(seed: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed)
}

/// `u^δ = u + δ‖u‖₂ (N_re + i N_im)` with standard normal `N_re` then `N_im`
/// drawn from `rng`.
pub fn add_noise_with(u_b: &RealifiedVector, delta: f64, rng: &mut Pcg64) -> Result<RealifiedVector> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise level must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(u_b.clone());
    }
    let scale = delta * u_b.norm();
    let noise = DVector::from_iterator(u_b.len(), (0..u_b.len()).map(|_| StandardNormal.sample(rng)));
    RealifiedVector::from_raw(u_b.as_dvector() + noise * scale)
}

pub fn add_noise(u_b: &RealifiedVector, delta: f64, seed: u64) -> Result<RealifiedVector> {
    add_noise_with(u_b, delta, &mut rng_from_seed(seed))
}

/// `‖μ_rec - μ_exa‖₂ / ‖μ_exa‖₂`.
pub fn n_error(mu_rec: &RealifiedVector, mu_exact: &RealifiedVector) -> Result<f64> {
    if mu_rec.len() != mu_exact.len() {
        return Err(Error::Dimension(format!(
            "reconstruction has {} entries, reference {}",
            mu_rec.len(),
            mu_exact.len()
        )));
    }
    let denom = mu_exact.norm();
    if denom == 0.0 {
        return Err(Error::InvalidParameter("reference source is zero".into()));
    }
    Ok((mu_rec.as_dvector() - mu_exact.as_dvector()).norm() / denom)
}

/// Overlap weights `w[j][i] = |cell_i^fine ∩ cell_j^coarse| / h_coarse` along one axis.
fn axis_weights(fine: &Grid, coarse: &Grid) -> Vec<Vec<(usize, f64)>> {
    let (hf, hc) = (fine.spacing(), coarse.spacing());
    let r = fine.half_width();
    (0..coarse.n_per_axis())
        .map(|j| {
            let (a, b) = (-r + j as f64 * hc, -r + (j + 1) as f64 * hc);
            let first = (((a + r) / hf).floor().max(0.0) as usize).saturating_sub(1);
            (first..fine.n_per_axis())
                .map(|i| {
                    let (c, d) = (-r + i as f64 * hf, -r + (i + 1) as f64 * hf);
                    (i, (b.min(d) - a.max(c)).max(0.0) / hc)
                })
                .take_while(|(i, _)| -r + *i as f64 * hf < b)
                .filter(|(_, w)| *w > 0.0)
                .collect()
        })
        .collect()
}

/// Cell-average restriction of a fine-grid field onto a coarser grid over the same box.
///
/// Conserves `Σ μ h^d`.
pub fn restrict(values: &[f64], fine: &Grid, coarse: &Grid) -> Result<Vec<f64>> {
    if fine.dim() != coarse.dim() || (fine.half_width() - coarse.half_width()).abs() > 1e-12 * fine.half_width() {
        return Err(Error::InvalidParameter("grids must cover the same box".into()));
    }
    if values.len() != fine.len() {
        return Err(Error::Dimension(format!("field has {} samples, grid has {} nodes", values.len(), fine.len())));
    }
    let w = axis_weights(fine, coarse);
    let dim = fine.dim();
    Ok((0..coarse.len())
        .map(|jc| {
            let j = coarse.multi_index(jc);
            let mut acc = 0.0;
            for &(ix, wx) in &w[j[0]] {
                for &(iy, wy) in &w[j[1]] {
                    if dim == 2 {
                        acc += wx * wy * values[fine.linear_index([ix, iy, 0])];
                    } else {
                        for &(iz, wz) in &w[j[2]] {
                            acc += wx * wy * wz * values[fine.linear_index([ix, iy, iz])];
                        }
                    }
                }
            }
            acc
        })
        .collect())
}

/// Restriction applied to both blocks of a realified field.
pub fn restrict_realified(mu: &RealifiedVector, fine: &Grid, coarse: &Grid) -> Result<RealifiedVector> {
    let re = restrict(mu.re(), fine, coarse)?;
    let im = restrict(mu.im(), fine, coarse)?;
    RealifiedVector::from_parts(&re, &im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_is_identity_and_seeds_reproduce() {
        let u = RealifiedVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        assert_eq!(add_noise(&u, 0.0, 9).unwrap(), u);
        assert_eq!(add_noise(&u, 0.1, 9).unwrap(), add_noise(&u, 0.1, 9).unwrap());
        assert_ne!(add_noise(&u, 0.1, 9).unwrap(), add_noise(&u, 0.1, 10).unwrap());
        assert!(add_noise(&u, -0.1, 9).is_err());
    }

    #[test]
    fn n_error_cases() {
        let a = RealifiedVector::from_vec(vec![1.0, 0.0, 2.0, 0.0]).unwrap();
        assert_eq!(n_error(&a, &a).unwrap(), 0.0);
        assert_eq!(n_error(&RealifiedVector::zeros(2), &a).unwrap(), 1.0);
        assert!(n_error(&a, &RealifiedVector::zeros(2)).is_err());
    }

    #[test]
    fn restriction_conserves_mass() {
        for (dim, nf, nc) in [(2, 96, 64), (2, 30, 20), (3, 12, 8), (2, 10, 7)] {
            let f = Grid::new(dim, nf, 1.5).unwrap();
            let c = Grid::new(dim, nc, 1.5).unwrap();
            let v: Vec<f64> = (0..f.len()).map(|i| ((i * 7919) % 13) as f64 - 4.0).collect();
            let r = restrict(&v, &f, &c).unwrap();
            let mf: f64 = v.iter().sum::<f64>() * f.cell_volume();
            let mc: f64 = r.iter().sum::<f64>() * c.cell_volume();
            assert!((mf - mc).abs() <= 1e-10 * mf.abs().max(1.0), "{dim} {nf} {nc}");
        }
    }

    #[test]
    fn restriction_preserves_constants_and_contained_spikes() {
        let f = Grid::new(2, 96, 1.5).unwrap();
        let c = Grid::new(2, 64, 1.5).unwrap();
        let r = restrict(&vec![2.5; f.len()], &f, &c).unwrap();
        assert!(r.iter().all(|v| (v - 2.5).abs() < 1e-12));
        // Fine cell 48 sits inside coarse cell 32 on both axes.
        let mut spike = vec![0.0; f.len()];
        spike[f.linear_index([48, 48, 0])] = 1.0;
        let r = restrict(&spike, &f, &c).unwrap();
        assert_eq!(r.iter().filter(|v| **v != 0.0).count(), 1);
        assert!((r[c.linear_index([32, 32, 0])] - 4.0 / 9.0).abs() < 1e-14);
    }
}
