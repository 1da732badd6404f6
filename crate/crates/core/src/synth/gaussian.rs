use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{BallPoint, Translation};
use crate::rng::child_rng;

const GRID_KNOTS: usize = 1 << 14;
const GRID_SPAN: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaussianMixtureSpec {
    pub num_classes: usize,
    pub points_per_class: usize,
    pub centroid_variance: f64,
    pub component_variance: f64,
    pub dim: usize,
    pub seed: u64,
}

impl Default for GaussianMixtureSpec {
    fn default() -> Self {
        Self {
            num_classes: 4,
            points_per_class: 100,
            centroid_variance: 1.5,
            component_variance: 1.0,
            dim: 2,
            seed: 0,
        }
    }
}

impl GaussianMixtureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_classes == 0 || self.points_per_class == 0 {
            return Err(Error::Invalid(
                "class and point counts must be positive".into(),
            ));
        }
        check_variance(self.centroid_variance)?;
        check_variance(self.component_variance)?;
        check_dim(self.dim)
    }
}

fn check_variance(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "variance must be positive, got {v}"
        )))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "hyperbolic Gaussian sampling is implemented for dim 2 only, got {dim}"
        )))
    }
}

/// Tabulated CDF of the radial density `sinh(r) exp(-r^2 / (2 v))`.
struct RadialCdf {
    step: f64,
    cdf: Vec<f64>,
}

impl RadialCdf {
    fn new(variance: f64) -> Self {
        let r_max = GRID_SPAN * variance.sqrt();
        let step = r_max / (GRID_KNOTS - 1) as f64;
        // ln sinh(r) = r + ln((1 - e^{-2r}) / 2), kept finite for large r.
        let log_density = |r: f64| r + (-(-2.0 * r).exp_m1() / 2.0).ln() - r * r / (2.0 * variance);
        let logs: Vec<f64> = (0..GRID_KNOTS)
            .map(|i| log_density(i as f64 * step))
            .collect();
        let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let density: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
        let mut cdf = Vec::with_capacity(GRID_KNOTS);
        cdf.push(0.0);
        for i in 1..GRID_KNOTS {
            let prev = cdf[i - 1];
            cdf.push(prev + 0.5 * step * (density[i - 1] + density[i]));
        }
        let total = cdf[GRID_KNOTS - 1];
        cdf.iter_mut().for_each(|c| *c /= total);
        Self { step, cdf }
    }

    fn invert(&self, u: f64) -> f64 {
        let hi = self
            .cdf
            .partition_point(|&c| c < u)
            .clamp(1, GRID_KNOTS - 1);
        let (c0, c1) = (self.cdf[hi - 1], self.cdf[hi]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        (hi as f64 - 1.0 + frac) * self.step
    }
}

/// Draws `count` i.i.d. points from the hyperbolic Gaussian with density
/// proportional to `exp(-d(x, centroid)^2 / (2 variance))` in the hyperbolic
/// area measure.
pub fn sample_hyperbolic_gaussian<R: Rng>(
    centroid: &BallPoint,
    variance: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<BallPoint>> {
    check_dim(centroid.dim())?;
    check_variance(variance)?;
    let table = RadialCdf::new(variance);
    let shift = Translation::new(centroid.clone());
    (0..count)
        .map(|_| {
            let r = table.invert(rng.gen::<f64>());
            let angle = rng.gen::<f64>() * TAU;
            let rho = (r / 2.0).tanh();
            let p = BallPoint::new(vec![rho * angle.cos(), rho * angle.sin()])?;
            shift.apply(&p)
        })
        .collect()
}

/// Single-label dataset with `per_class` points around each centroid,
/// stored in hyperboloid coordinates. Class `k` is named `"k"`.
pub fn gen_gaussian_clusters(
    centroids: &[BallPoint],
    per_class: usize,
    variance: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if centroids.is_empty() || per_class == 0 {
        return Err(Error::Empty("clusters"));
    }
    let mut points = Vec::with_capacity(centroids.len() * per_class);
    let mut labels = Vec::with_capacity(points.capacity());
    for (k, c) in centroids.iter().enumerate() {
        let mut rng = child_rng(seed, &[1, k as u64]);
        for p in sample_hyperbolic_gaussian(c, variance, per_class, &mut rng)? {
            points.push(p.to_hyperboloid());
            labels.push(vec![k]);
        }
    }
    let classes = (0..centroids.len()).map(|k| k.to_string()).collect();
    LabeledDataset::from_hyperboloid(points, classes, labels)
}

/// Centroids from the origin-centred Gaussian, then one cluster per centroid.
pub fn gen_gaussian_mixture(spec: &GaussianMixtureSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = child_rng(spec.seed, &[0]);
    let centroids = sample_hyperbolic_gaussian(
        &BallPoint::origin(spec.dim),
        spec.centroid_variance,
        spec.num_classes,
        &mut rng,
    )?;
    gen_gaussian_clusters(
        &centroids,
        spec.points_per_class,
        spec.component_variance,
        spec.seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ball_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Composite Simpson rule on `[0, hi]`.
    fn simpson(f: impl Fn(f64) -> f64, hi: f64, n: usize) -> f64 {
        let h = hi / n as f64;
        let mut s = f(0.0) + f(hi);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn second_moment_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let o = BallPoint::origin(2);
        let samples = sample_hyperbolic_gaussian(&o, 1.0, 100_000, &mut rng).unwrap();
        let emp = samples
            .iter()
            .map(|p| ball_distance(p, &o).unwrap().powi(2))
            .sum::<f64>()
            / samples.len() as f64;
        let w = |r: f64| r.sinh() * (-r * r / 2.0).exp();
        let expected = simpson(|r| r * r * w(r), 20.0, 20_000) / simpson(w, 20.0, 20_000);
        assert!((emp / expected - 1.0).abs() < 0.02, "{emp} vs {expected}");
    }

    #[test]
    fn angles_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let samples =
            sample_hyperbolic_gaussian(&BallPoint::origin(2), 1.0, 100_000, &mut rng).unwrap();
        let mut bins = [0usize; 16];
        for p in &samples {
            let a = p.coords()[1].atan2(p.coords()[0]).rem_euclid(TAU);
            bins[((a / TAU * 16.0) as usize).min(15)] += 1;
        }
        let e = samples.len() as f64 / 16.0;
        let chi2: f64 = bins.iter().map(|&b| (b as f64 - e).powi(2) / e).sum();
        // chi-square(15) upper 0.001 quantile
        assert!(chi2 < 37.69729821835383, "chi2 = {chi2}");
    }

    #[test]
    fn tiny_variance_concentrates_at_centroid() {
        let c = BallPoint::new(vec![0.3, -0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in sample_hyperbolic_gaussian(&c, 1e-8, 1000, &mut rng).unwrap() {
            assert!(ball_distance(&p, &c).unwrap() < 1e-2);
        }
    }

    #[test]
    fn seeded_and_dimension_checked() {
        let c = BallPoint::new(vec![0.1, 0.2]).unwrap();
        let a = sample_hyperbolic_gaussian(&c, 1.0, 50, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = sample_hyperbolic_gaussian(&c, 1.0, 50, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        let c3 = BallPoint::origin(3);
        assert!(matches!(
            sample_hyperbolic_gaussian(&c3, 1.0, 5, &mut ChaCha8Rng::seed_from_u64(1)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn mixture_shape_and_seeds() {
        let d = gen_gaussian_mixture(&GaussianMixtureSpec::default()).unwrap();
        assert_eq!(d.len(), 400);
        assert_eq!(d.num_classes(), 4);
        assert!((0..4).all(|k| d.positives(k) == 100));
        assert!(d.labels().iter().all(|l| l.len() == 1));

        let one = gen_gaussian_mixture(&GaussianMixtureSpec {
            num_classes: 1,
            points_per_class: 10,
            ..Default::default()
        })
        .unwrap();
        assert!(one.labels().iter().all(|l| l == &vec![0]));

        let a = gen_gaussian_mixture(&GaussianMixtureSpec {
            seed: 1,
            ..Default::default()
        })
        .unwrap();
        let b = gen_gaussian_mixture(&GaussianMixtureSpec {
            seed: 2,
            ..Default::default()
        })
        .unwrap();
        assert_ne!(a.rows()[0], b.rows()[0]);
        let a2 = gen_gaussian_mixture(&GaussianMixtureSpec {
            seed: 1,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(a, a2);
    }

    #[test]
    fn rejects_bad_specs() {
        for spec in [
            GaussianMixtureSpec {
                num_classes: 0,
                ..Default::default()
            },
            GaussianMixtureSpec {
                centroid_variance: 0.0,
                ..Default::default()
            },
            GaussianMixtureSpec {
                component_variance: -1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                gen_gaussian_mixture(&spec),
                Err(Error::Invalid(_))
            ));
        }
        let spec = GaussianMixtureSpec {
            dim: 3,
            ..Default::default()
        };
        assert!(matches!(
            gen_gaussian_mixture(&spec),
            Err(Error::Unsupported(_))
        ));
    }
}
