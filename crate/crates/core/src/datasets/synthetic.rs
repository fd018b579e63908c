use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::{norm, DenseMatrix};

/// Swiss roll `(t cos t, h, t sin t)` with `t ~ U[1.5π, 4.5π]`,
/// `h ~ U[0, 21]`, plus isotropic Gaussian noise. Labels are `t`.
pub fn gen_swiss_roll(n: usize, noise: f64, seed: u64) -> Result<LabeledDataset> {
    if n == 0 {
        return Err(Error::invalid("swiss roll needs n >= 1"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::invalid(format!("noise must be >= 0, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(3 * n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let t = rng.random_range(1.5 * PI..=4.5 * PI);
        let h = rng.random_range(0.0..=21.0);
        let mut p = [t * t.cos(), h, t * t.sin()];
        if noise > 0.0 {
            for v in &mut p {
                let z: f64 = rng.sample(StandardNormal);
                *v += noise * z;
            }
        }
        data.extend_from_slice(&p);
        labels.push(t);
    }
    LabeledDataset::new(DenseMatrix::from_vec(n, 3, data)?, Some(labels), "swiss-roll")
}

/// Uniform samples on the unit sphere `S^(dim−1)`: Gaussian draws scaled to
/// unit norm. With `radial_noise > 0` each radius is multiplied by
/// `1 + radial_noise·N(0,1)`.
pub fn gen_hypersphere(n: usize, dim: usize, radial_noise: f64, seed: u64) -> Result<LabeledDataset> {
    if n == 0 {
        return Err(Error::invalid("hypersphere needs n >= 1"));
    }
    if dim < 2 {
        return Err(Error::invalid(format!("hypersphere needs dim >= 2, got {dim}")));
    }
    if !(radial_noise >= 0.0 && radial_noise.is_finite()) {
        return Err(Error::invalid(format!("radial noise must be >= 0, got {radial_noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * dim);
    let mut x = vec![0.0; dim];
    for _ in 0..n {
        let len = loop {
            x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let len = norm(&x);
            if len > 0.0 {
                break len;
            }
        };
        let radius = if radial_noise > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            1.0 + radial_noise * z
        } else {
            1.0
        };
        data.extend(x.iter().map(|v| radius * v / len));
    }
    LabeledDataset::new(DenseMatrix::from_vec(n, dim, data)?, None, "hypersphere")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::centered_gram;
    use crate::linalg::{dense_eig_symmetric, row_norms_sq};
    use proptest::prelude::*;

    /// Two-sample Kolmogorov–Smirnov statistic.
    fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut worst) = (0, 0, 0.0_f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            worst = worst.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        worst
    }

    /// One-sample KS statistic against `U[lo, hi]`.
    fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> f64 {
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len() as f64;
        s.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = (x - lo) / (hi - lo);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn noiseless_roll_lies_on_spiral() {
        let ds = gen_swiss_roll(500, 0.0, 3).unwrap();
        let t = ds.labels.as_ref().unwrap();
        for (row, &t) in ds.data.rows_iter().zip(t) {
            assert!((row[0] * row[0] + row[2] * row[2] - t * t).abs() <= 1e-9);
            assert!((0.0..=21.0).contains(&row[1]));
        }
    }

    #[test]
    fn roll_labels_in_range() {
        let ds = gen_swiss_roll(1000, 0.5, 1).unwrap();
        assert_eq!(ds.data.shape(), (1000, 3));
        for &t in ds.labels.as_ref().unwrap() {
            assert!((1.5 * PI..=4.5 * PI).contains(&t));
        }
    }

    #[test]
    fn roll_seeds_share_label_distribution() {
        let a = gen_swiss_roll(2000, 0.1, 10).unwrap();
        let b = gen_swiss_roll(2000, 0.1, 11).unwrap();
        assert_ne!(a.data, b.data);
        let ks = ks_two_sample(a.labels.as_ref().unwrap(), b.labels.as_ref().unwrap());
        assert!(ks < 0.1, "KS = {ks}");
    }

    #[test]
    fn sphere_rows_have_unit_norm() {
        let ds = gen_hypersphere(300, 7, 0.0, 2).unwrap();
        assert!(ds.labels.is_none());
        for n2 in row_norms_sq(&ds.data) {
            assert!((n2.sqrt() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn circle_angles_are_uniform() {
        let ds = gen_hypersphere(5000, 2, 0.0, 4).unwrap();
        let angles: Vec<f64> = ds.data.rows_iter().map(|r| r[1].atan2(r[0])).collect();
        let ks = ks_uniform(&angles, -PI, PI);
        assert!(ks < 0.05, "KS = {ks}");
    }

    #[test]
    fn sphere_mean_concentrates() {
        for (n, dim, seed) in [(100, 3, 1), (400, 10, 2), (2000, 50, 3)] {
            let ds = gen_hypersphere(n, dim, 0.0, seed).unwrap();
            let mean = ds.data.col_means();
            assert!(norm(&mean) <= 4.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn sphere_spectrum_is_flat() {
        let dim = 6;
        let ds = gen_hypersphere(50 * dim, dim, 0.0, 5).unwrap();
        // covariance eigenvalues = nonzero eigenvalues of the centered Gram
        let eig = dense_eig_symmetric(&centered_gram(&ds.data).unwrap()).unwrap();
        let top = &eig.eigenvalues[..dim];
        assert!(top[dim - 1] > 0.0);
        assert!(top[0] / top[dim - 1] <= 3.0, "{top:?}");
    }

    #[test]
    fn radial_noise_spreads_norms() {
        let ds = gen_hypersphere(2000, 5, 0.05, 6).unwrap();
        let norms: Vec<f64> = row_norms_sq(&ds.data).into_iter().map(f64::sqrt).collect();
        let mean = norms.iter().sum::<f64>() / norms.len() as f64;
        let sd = (norms.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / norms.len() as f64).sqrt();
        assert!((mean - 1.0).abs() < 0.01);
        assert!((sd - 0.05).abs() < 0.01);
    }

    #[test]
    fn argument_validation() {
        assert!(gen_swiss_roll(0, 0.0, 0).is_err());
        assert!(gen_swiss_roll(5, -1.0, 0).is_err());
        assert!(gen_hypersphere(5, 1, 0.0, 0).is_err());
        assert!(gen_hypersphere(0, 3, 0.0, 0).is_err());
        assert!(gen_hypersphere(5, 3, f64::NAN, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn generators_are_pure(n in 1usize..50, dim in 2usize..8, seed in any::<u64>()) {
            prop_assert_eq!(gen_hypersphere(n, dim, 0.1, seed).unwrap(), gen_hypersphere(n, dim, 0.1, seed).unwrap());
            prop_assert_eq!(gen_swiss_roll(n, 0.2, seed).unwrap(), gen_swiss_roll(n, 0.2, seed).unwrap());
        }

        #[test]
        fn generated_values_are_finite(n in 1usize..40, dim in 2usize..6, seed in any::<u64>()) {
            prop_assert!(gen_hypersphere(n, dim, 0.3, seed).unwrap().data.as_slice().iter().all(|v| v.is_finite()));
            prop_assert!(gen_swiss_roll(n, 1.0, seed).unwrap().data.as_slice().iter().all(|v| v.is_finite()));
        }
    }
}
