//! Hyperbolic space models with curvature fixed at -1.
//!
//! Three coordinate systems are supported:
//!
//! * the hyperboloid `L^n = { x in R^{n+1} : x*x = 1, x_0 > 0 }` where `*` is
//!   the Minkowski form `x_0 y_0 - x_1 y_1 - ... - x_n y_n`,
//! * the Poincaré ball `B^n = { b in R^n : |b| < 1 }`,
//! * the Poincaré half-space `H^n = { h in R^n : h_1 > 0 }`.
//!
//! The ball is the stereographic projection of `L^n` from `(-1, 0, ..., 0)`
//! and the half-space is the inversion of the ball in the sphere of radius
//! `sqrt(2)` centered at the boundary point `(-1, 0, ..., 0)`.

use crate::error::{Error, Result};

/// Tolerance on `x*x = 1` for hyperboloid points, relative to `max(1, x_0^2)`.
pub const MODEL_EPS: f64 = 1e-9;
/// Points of the ball with `|b|^2 >= 1 - BOUNDARY_EPS` are rejected.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Minkowski inner product `u_0 v_0 - sum_{i>=1} u_i v_i`.
pub fn minkowski_inner(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            got: v.len(),
        });
    }
    if u.len() < 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: u.len(),
        });
    }
    Ok(minkowski_dot(u, v))
}

/// Unchecked Minkowski inner product; callers guarantee equal lengths >= 1.
#[inline]
pub(crate) fn minkowski_dot(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let space: f64 = u[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
    u[0] * v[0] - space
}

#[inline]
pub(crate) fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

#[inline]
pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// A point on the upper sheet of the hyperboloid, stored by its `n+1`
/// ambient coordinates `x_0..x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint(Vec<f64>);

impl HyperboloidPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: coords.len(),
            });
        }
        if !coords.iter().all(|c| c.is_finite()) {
            return Err(Error::NotOnHyperboloid("non-finite coordinate".into()));
        }
        let x0 = coords[0];
        if x0 <= 0.0 {
            return Err(Error::NotOnHyperboloid(format!(
                "x_0 = {x0} is not positive"
            )));
        }
        let q = minkowski_dot(&coords, &coords);
        if (q - 1.0).abs() > MODEL_EPS * x0.powi(2).max(1.0) {
            return Err(Error::NotOnHyperboloid(format!("x*x = {q}")));
        }
        Ok(Self(coords))
    }

    /// Lifts spatial coordinates `x_1..x_n` onto the hyperboloid.
    pub fn from_spatial(spatial: &[f64]) -> Self {
        let mut coords = Vec::with_capacity(spatial.len() + 1);
        coords.push((1.0 + norm_sq(spatial)).sqrt());
        coords.extend_from_slice(spatial);
        Self(coords)
    }

    /// The base point `(1, 0, ..., 0)` of `L^n`.
    pub fn origin(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        Self(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Intrinsic dimension `n`.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn to_ball(&self) -> BallPoint {
        let denom = 1.0 + self.0[0];
        BallPoint(self.0[1..].iter().map(|x| x / denom).collect())
    }

    pub fn to_halfspace(&self) -> Result<HalfSpacePoint> {
        self.to_ball().to_halfspace()
    }
}

/// A point strictly inside the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint(Vec<f64>);

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Dimension {
                expected: 1,
                got: 0,
            });
        }
        let norm_sq = norm_sq(&coords);
        if !norm_sq.is_finite() || norm_sq >= 1.0 - BOUNDARY_EPS {
            return Err(Error::BoundaryProximity { norm_sq });
        }
        Ok(Self(coords))
    }

    pub fn origin(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.0)
    }

    pub fn to_hyperboloid(&self) -> HyperboloidPoint {
        let s = self.norm_sq();
        let denom = 1.0 - s;
        let mut coords = Vec::with_capacity(self.0.len() + 1);
        coords.push((1.0 + s) / denom);
        coords.extend(self.0.iter().map(|b| 2.0 * b / denom));
        HyperboloidPoint(coords)
    }

    pub fn to_halfspace(&self) -> Result<HalfSpacePoint> {
        let coords = invert_about_boundary(&self.0).ok_or(Error::DegeneratePoint)?;
        HalfSpacePoint::new(coords)
    }
}

/// A point of the upper half-space `h_1 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpacePoint(Vec<f64>);

impl HalfSpacePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        match coords.first() {
            None => Err(Error::Dimension {
                expected: 1,
                got: 0,
            }),
            Some(&h1) if h1 <= 0.0 || !h1.is_finite() => Err(Error::HalfSpaceDomain(h1)),
            Some(_) => Ok(Self(coords)),
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_ball(&self) -> Result<BallPoint> {
        // h_1 > 0 keeps the denominator above 1.
        let coords = invert_about_boundary(&self.0).ok_or(Error::DegeneratePoint)?;
        BallPoint::new(coords)
    }

    pub fn to_hyperboloid(&self) -> Result<HyperboloidPoint> {
        Ok(self.to_ball()?.to_hyperboloid())
    }
}

/// `p -> (1 - |p|^2, 2 p_2, ..., 2 p_n) / (1 + 2 p_1 + |p|^2)`.
///
/// Maps the ball onto the half-space and is its own inverse.
fn invert_about_boundary(p: &[f64]) -> Option<Vec<f64>> {
    let s = norm_sq(p);
    let denom = 1.0 + 2.0 * p[0] + s;
    if denom <= BOUNDARY_EPS {
        return None;
    }
    let mut out = Vec::with_capacity(p.len());
    out.push((1.0 - s) / denom);
    out.extend(p[1..].iter().map(|v| 2.0 * v / denom));
    Some(out)
}

/// `arcosh(x*y)`, clamping inner products in `[1 - 1e-9, 1)` to 1.
///
/// Nearby points use the equivalent chord form `2 arsinh(|x - y| / 2)`,
/// which stays accurate where `arcosh` is ill-conditioned.
pub fn hyperbolic_distance(x: &HyperboloidPoint, y: &HyperboloidPoint) -> Result<f64> {
    let inner = minkowski_inner(x.coords(), y.coords())?;
    if inner < 1.0 - MODEL_EPS {
        return Err(Error::DistanceDomain(inner));
    }
    if inner > 2.0 {
        return Ok(inner.acosh());
    }
    let diff: Vec<f64> = x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect();
    let chord_sq = -minkowski_dot(&diff, &diff);
    Ok(2.0 * (chord_sq.max(0.0).sqrt() / 2.0).asinh())
}

/// Distance in the ball model.
pub fn ball_distance(u: &BallPoint, v: &BallPoint) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::Dimension {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let diff: f64 = u.0.iter().zip(&v.0).map(|(a, b)| (a - b).powi(2)).sum();
    let arg = 1.0 + 2.0 * diff / ((1.0 - u.norm_sq()) * (1.0 - v.norm_sq()));
    Ok(arg.acosh())
}

/// Distance in the half-space model.
pub fn halfspace_distance(h: &HalfSpacePoint, g: &HalfSpacePoint) -> Result<f64> {
    if h.dim() != g.dim() {
        return Err(Error::Dimension {
            expected: h.dim(),
            got: g.dim(),
        });
    }
    let diff: f64 = h.0.iter().zip(&g.0).map(|(a, b)| (a - b).powi(2)).sum();
    Ok((1.0 + diff / (2.0 * h.0[0] * g.0[0])).acosh())
}

/// Möbius translation of the ball carrying the origin to `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    target: BallPoint,
}

/// Builds the isometry that moves `from` onto `target`.
///
/// The map is `p -> target (+) ((-from) (+) p)` in Möbius addition, so it
/// sends `from` to `target`; with `from` at the origin it is the plain
/// translation by `target`.
pub fn translate_to(from: &BallPoint, target: &BallPoint) -> Result<Isometry> {
    if from.dim() != target.dim() {
        return Err(Error::Dimension {
            expected: from.dim(),
            got: target.dim(),
        });
    }
    let neg: Vec<f64> = from.0.iter().map(|v| -v).collect();
    Ok(Isometry {
        first: Translation {
            target: BallPoint(neg),
        },
        second: Translation {
            target: target.clone(),
        },
    })
}

/// Composition of two Möbius translations, applied `first` then `second`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    first: Translation,
    second: Translation,
}

impl Isometry {
    pub fn apply(&self, p: &BallPoint) -> Result<BallPoint> {
        let mid = self.first.apply(p)?;
        self.second.apply(&mid)
    }
}

/// Shorthand for `iso.apply(p)`.
pub fn apply_isometry(iso: &Isometry, p: &BallPoint) -> Result<BallPoint> {
    iso.apply(p)
}

impl Translation {
    pub fn new(target: BallPoint) -> Self {
        Self { target }
    }

    /// Möbius addition `target (+) p`.
    pub fn apply(&self, p: &BallPoint) -> Result<BallPoint> {
        let a = &self.target.0;
        if a.len() != p.dim() {
            return Err(Error::Dimension {
                expected: a.len(),
                got: p.dim(),
            });
        }
        let ap = dot(a, &p.0);
        let aa = norm_sq(a);
        let pp = p.norm_sq();
        let ca = 1.0 + 2.0 * ap + pp;
        let cp = 1.0 - aa;
        let denom = 1.0 + 2.0 * ap + aa * pp;
        let coords = a
            .iter()
            .zip(&p.0)
            .map(|(ai, pi)| (ca * ai + cp * pi) / denom)
            .collect();
        BallPoint::new(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn random_ball(rng: &mut ChaCha8Rng, n: usize, max_norm: f64) -> BallPoint {
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if norm_sq(&v) <= max_norm * max_norm {
                return BallPoint::new(v).unwrap();
            }
        }
    }

    #[test]
    fn minkowski_examples() {
        assert_eq!(
            minkowski_inner(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(),
            1.0
        );
        assert_eq!(
            minkowski_inner(&[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(),
            -1.0
        );
        let v = minkowski_inner(&[5.0 / 3.0, 4.0 / 3.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            minkowski_inner(&[1.0, 0.0], &[1.0, 0.0, 0.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn hyperboloid_to_ball_examples() {
        let b = HyperboloidPoint::new(vec![1.0, 0.0, 0.0])
            .unwrap()
            .to_ball();
        assert_eq!(b.coords(), &[0.0, 0.0]);
        let b = HyperboloidPoint::new(vec![5.0 / 3.0, 4.0 / 3.0, 0.0])
            .unwrap()
            .to_ball();
        assert!(close(b.coords(), &[0.5, 0.0], 1e-15));
        let b = HyperboloidPoint::new(vec![5.0 / 3.0, 0.0, -4.0 / 3.0])
            .unwrap()
            .to_ball();
        assert!(close(b.coords(), &[0.0, -0.5], 1e-15));
    }

    #[test]
    fn ball_to_hyperboloid_examples() {
        let x = BallPoint::new(vec![0.0, 0.0]).unwrap().to_hyperboloid();
        assert_eq!(x.coords(), &[1.0, 0.0, 0.0]);
        let x = BallPoint::new(vec![0.5, 0.0]).unwrap().to_hyperboloid();
        assert!(close(x.coords(), &[5.0 / 3.0, 4.0 / 3.0, 0.0], 1e-15));
        assert!(matches!(
            BallPoint::new(vec![1.0, 0.0]),
            Err(Error::BoundaryProximity { .. })
        ));
        assert!(BallPoint::new(vec![(1.0f64 - 1e-13).sqrt(), 0.0]).is_err());
    }

    #[test]
    fn ball_halfspace_examples() {
        let h = BallPoint::new(vec![0.0, 0.0])
            .unwrap()
            .to_halfspace()
            .unwrap();
        assert!(close(h.coords(), &[1.0, 0.0], 1e-15));
        let h = BallPoint::new(vec![0.5, 0.0])
            .unwrap()
            .to_halfspace()
            .unwrap();
        assert!(close(h.coords(), &[1.0 / 3.0, 0.0], 1e-15));
        let h = BallPoint::new(vec![-0.5, 0.0])
            .unwrap()
            .to_halfspace()
            .unwrap();
        assert!(close(h.coords(), &[3.0, 0.0], 1e-14));

        let b = HalfSpacePoint::new(vec![1.0, 0.0])
            .unwrap()
            .to_ball()
            .unwrap();
        assert!(close(b.coords(), &[0.0, 0.0], 1e-15));
        let b = HalfSpacePoint::new(vec![1.0 / 3.0, 0.0])
            .unwrap()
            .to_ball()
            .unwrap();
        assert!(close(b.coords(), &[0.5, 0.0], 1e-15));
        assert!(matches!(
            HalfSpacePoint::new(vec![0.0, 1.0]),
            Err(Error::HalfSpaceDomain(_))
        ));
        assert!(matches!(
            HalfSpacePoint::new(vec![-2.0, 1.0]),
            Err(Error::HalfSpaceDomain(_))
        ));
    }

    #[test]
    fn inversion_center_is_degenerate() {
        assert!(invert_about_boundary(&[-1.0, 0.0]).is_none());
    }

    #[test]
    fn hyperboloid_validation() {
        assert!(HyperboloidPoint::new(vec![1.0, 0.1, 0.0]).is_err());
        assert!(HyperboloidPoint::new(vec![-1.0, 0.0, 0.0]).is_err());
        assert!(HyperboloidPoint::new(vec![1.0]).is_err());
        let x = HyperboloidPoint::from_spatial(&[3.0, -4.0]);
        assert!(HyperboloidPoint::new(x.coords().to_vec()).is_ok());
    }

    #[test]
    fn distance_examples() {
        let o = HyperboloidPoint::origin(2);
        assert_eq!(hyperbolic_distance(&o, &o).unwrap(), 0.0);
        let p = HyperboloidPoint::new(vec![1f64.cosh(), 1f64.sinh(), 0.0]).unwrap();
        assert!((hyperbolic_distance(&o, &p).unwrap() - 1.0).abs() < 1e-12);
        let far = HyperboloidPoint::from_spatial(&[40.0, 17.0]);
        assert_eq!(hyperbolic_distance(&far, &far).unwrap(), 0.0);
    }

    #[test]
    fn distance_domain_error() {
        // Lower sheet point bypassing validation.
        let x = HyperboloidPoint::origin(2);
        let y = HyperboloidPoint(vec![-1.0, 0.0, 0.0]);
        assert!(matches!(
            hyperbolic_distance(&x, &y),
            Err(Error::DistanceDomain(_))
        ));
    }

    #[test]
    fn translation_to_origin_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let iso = translate_to(&BallPoint::origin(2), &BallPoint::origin(2)).unwrap();
        for _ in 0..100 {
            let p = random_ball(&mut rng, 2, 0.99);
            let q = iso.apply(&p).unwrap();
            assert!(close(p.coords(), q.coords(), 1e-15));
        }
    }

    #[test]
    fn translation_moves_origin_to_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2usize, 3, 5] {
            for _ in 0..100 {
                let target = random_ball(&mut rng, n, 0.99);
                let iso = translate_to(&BallPoint::origin(n), &target).unwrap();
                let img = iso.apply(&BallPoint::origin(n)).unwrap();
                assert!(close(img.coords(), target.coords(), 1e-12));
            }
        }
    }

    #[test]
    fn translation_between_arbitrary_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let from = random_ball(&mut rng, 2, 0.9);
            let target = random_ball(&mut rng, 2, 0.9);
            let iso = translate_to(&from, &target).unwrap();
            let img = iso.apply(&from).unwrap();
            assert!(close(img.coords(), target.coords(), 1e-12));
        }
    }

    #[test]
    fn translation_preserves_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let target = random_ball(&mut rng, 2, 0.9);
            let iso = translate_to(&BallPoint::origin(2), &target).unwrap();
            let p = random_ball(&mut rng, 2, 0.9);
            let q = random_ball(&mut rng, 2, 0.9);
            let d0 = ball_distance(&p, &q).unwrap();
            let d1 = ball_distance(&iso.apply(&p).unwrap(), &iso.apply(&q).unwrap()).unwrap();
            assert!((d0 - d1).abs() <= 1e-9, "{d0} vs {d1}");
        }
    }
}
