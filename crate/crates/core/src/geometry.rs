//! Typical-cell deployments drawn from a Poisson point process.
//!
//! The serving base station sits at the origin and every sampled point is an
//! interferer. A user belongs to the serving cell when the origin is strictly
//! its nearest base station, so the cell is the Voronoi cell of the origin.
//! The disk of radius `rho / 2` is always inside that cell.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

/// Default cap on orientation redraws when placing the weak user.
pub const DEFAULT_PLACEMENT_ATTEMPTS: usize = 100;
/// Default cap on draws for a user inside a region of the cell.
pub const DEFAULT_SAMPLING_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("density must be positive and finite, got {0}")]
    InvalidDensity(f64),
    #[error("window radius must be positive and finite, got {0}")]
    InvalidWindow(f64),
    #[error("a realization needs at least one interferer")]
    NoInterferers,
    #[error("interferer ({x}, {y}) lies outside the window of radius {radius}")]
    OutsideWindow { x: f64, y: f64, radius: f64 },
    #[error("interferer ({x}, {y}) coincides with the serving base station")]
    CoincidentInterferer { x: f64, y: f64 },
    #[error("channel disparity must be a finite value >= 1, got {0}")]
    InvalidDisparity(f64),
    #[error("no in-cell point found after {0} attempts")]
    AttemptsExhausted(usize),
}

/// A point in the plane, in the same unit-free distance units as the window.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Self::new(radius * cos, radius * sin)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Distance to the origin.
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(self, other: Point) -> f64 {
        self.distance_sq(other).sqrt()
    }
}

/// One sampled deployment seen from the typical cell.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    interferers: Vec<Point>,
    rho: f64,
    window_radius: f64,
}

impl NetworkRealization {
    /// Builds a realization from explicit interferer positions.
    ///
    /// Rejects an empty set, points outside the window and points on top of
    /// the serving base station.
    pub fn from_interferers(
        interferers: Vec<Point>,
        window_radius: f64,
    ) -> Result<Self, GeometryError> {
        if !(window_radius.is_finite() && window_radius > 0.0) {
            return Err(GeometryError::InvalidWindow(window_radius));
        }
        if interferers.is_empty() {
            return Err(GeometryError::NoInterferers);
        }
        let window_sq = window_radius * window_radius;
        for p in &interferers {
            if p.norm_sq().is_nan() || p.norm_sq() > window_sq {
                return Err(GeometryError::OutsideWindow {
                    x: p.x,
                    y: p.y,
                    radius: window_radius,
                });
            }
            if p.norm_sq() == 0.0 {
                return Err(GeometryError::CoincidentInterferer { x: p.x, y: p.y });
            }
        }
        let rho = nearest_distance(&interferers);
        Ok(Self {
            interferers,
            rho,
            window_radius,
        })
    }

    pub fn interferers(&self) -> &[Point] {
        &self.interferers
    }

    /// Distance from the serving base station to its nearest interferer.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn serving_position(&self) -> Point {
        Point::ORIGIN
    }

    /// Nearest-base-station association test for the serving cell.
    ///
    /// Ties with an interferer resolve to `false`.
    pub fn in_cell(&self, point: Point) -> bool {
        let own = point.norm_sq();
        self.interferers.iter().all(|&x| own < point.distance_sq(x))
    }

    /// Vertices of the serving cell, counter-clockwise, clipped to the square
    /// circumscribing the window.
    pub fn cell_polygon(&self) -> Vec<Point> {
        let r = self.window_radius;
        let mut polygon = vec![
            Point::new(-r, -r),
            Point::new(r, -r),
            Point::new(r, r),
            Point::new(-r, r),
        ];
        for &x in &self.interferers {
            // Closer to the origin than to x: p . x < |x|^2 / 2.
            let bound = 0.5 * x.norm_sq();
            let excess = |p: Point| p.x * x.x + p.y * x.y - bound;
            let mut clipped = Vec::with_capacity(polygon.len() + 1);
            for (i, &a) in polygon.iter().enumerate() {
                let b = polygon[(i + 1) % polygon.len()];
                let (ea, eb) = (excess(a), excess(b));
                if ea <= 0.0 {
                    clipped.push(a);
                }
                if (ea <= 0.0) != (eb <= 0.0) {
                    let t = ea / (ea - eb);
                    clipped.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
                }
            }
            polygon = clipped;
        }
        polygon
    }
}

fn nearest_distance(points: &[Point]) -> f64 {
    points
        .iter()
        .map(|p| p.norm_sq())
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Free-function form of [`NetworkRealization::in_cell`].
pub fn in_cell(point: Point, realization: &NetworkRealization) -> bool {
    realization.in_cell(point)
}

/// Uniform point in the disk of the given radius centred at the origin.
pub fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    Point::from_polar(r, rng.random::<f64>() * TAU)
}

/// Uniform point in the annulus `inner <= |p| <= outer`.
pub fn uniform_in_annulus<R: Rng + ?Sized>(inner: f64, outer: f64, rng: &mut R) -> Point {
    let (a, b) = (inner * inner, outer * outer);
    let r = (a + (b - a) * rng.random::<f64>()).sqrt();
    Point::from_polar(r, rng.random::<f64>() * TAU)
}

/// Samples the interferers of a typical cell.
///
/// The point count is Poisson with mean `density * pi * window_radius^2` and
/// the points are uniform in the window. Empty draws are resampled.
pub fn sample_realization<R: Rng + ?Sized>(
    density: f64,
    window_radius: f64,
    rng: &mut R,
) -> Result<NetworkRealization, GeometryError> {
    if !(density.is_finite() && density > 0.0) {
        return Err(GeometryError::InvalidDensity(density));
    }
    if !(window_radius.is_finite() && window_radius > 0.0) {
        return Err(GeometryError::InvalidWindow(window_radius));
    }
    let mean = density * std::f64::consts::PI * window_radius * window_radius;
    let count_law = Poisson::new(mean).map_err(|_| GeometryError::InvalidDensity(density))?;
    loop {
        let count = count_law.sample(rng) as usize;
        if count == 0 {
            continue;
        }
        let interferers: Vec<Point> = (0..count)
            .map(|_| uniform_in_disk(window_radius, rng))
            .collect();
        // An interferer landing exactly on the origin has probability zero.
        if interferers.iter().any(|p| p.norm_sq() == 0.0) {
            continue;
        }
        let rho = nearest_distance(&interferers);
        return Ok(NetworkRealization {
            interferers,
            rho,
            window_radius,
        });
    }
}

/// Strong and weak user positions for one controlled-disparity trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementResult {
    pub strong_position: Point,
    pub weak_position: Point,
    /// Whether an in-cell orientation was found for the weak user.
    pub feasible: bool,
}

/// Places the strong user at `rho / 4` and the weak user at
/// `disparity * rho / 4`, both at uniform orientations.
///
/// The weak user's orientation is redrawn until it lands in the cell or
/// `max_attempts` draws have been used. The strong user is always in the cell.
pub fn place_disparity_pair<R: Rng + ?Sized>(
    realization: &NetworkRealization,
    disparity: f64,
    max_attempts: usize,
    rng: &mut R,
) -> Result<PlacementResult, GeometryError> {
    if !(disparity.is_finite() && disparity >= 1.0) {
        return Err(GeometryError::InvalidDisparity(disparity));
    }
    let strong_distance = realization.rho() / 4.0;
    let weak_distance = disparity * strong_distance;
    let strong_position = Point::from_polar(strong_distance, rng.random::<f64>() * TAU);

    let mut weak_position = strong_position;
    for _ in 0..max_attempts {
        weak_position = Point::from_polar(weak_distance, rng.random::<f64>() * TAU);
        if realization.in_cell(weak_position) {
            return Ok(PlacementResult {
                strong_position,
                weak_position,
                feasible: true,
            });
        }
    }
    Ok(PlacementResult {
        strong_position,
        weak_position,
        feasible: false,
    })
}

/// Draws a user uniformly over the serving cell.
///
/// Picks a triangle of the fan from the origin over [`NetworkRealization::cell_polygon`]
/// by area and a uniform point inside it. Draws that fail the strict
/// [`in_cell`] test through rounding, or leave the window, are redrawn.
pub fn sample_user_in_cell<R: Rng + ?Sized>(
    realization: &NetworkRealization,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Point, GeometryError> {
    let polygon = realization.cell_polygon();
    let mut cumulative = Vec::with_capacity(polygon.len());
    let mut total = 0.0;
    for (i, a) in polygon.iter().enumerate() {
        let b = polygon[(i + 1) % polygon.len()];
        total += 0.5 * (a.x * b.y - a.y * b.x).abs();
        cumulative.push(total);
    }
    let window_sq = realization.window_radius().powi(2);
    for _ in 0..max_attempts {
        let target = rng.random::<f64>() * total;
        let i = cumulative
            .partition_point(|&c| c <= target)
            .min(polygon.len() - 1);
        let (a, b) = (polygon[i], polygon[(i + 1) % polygon.len()]);
        let (mut u, mut v) = (rng.random::<f64>(), rng.random::<f64>());
        if u + v > 1.0 {
            (u, v) = (1.0 - u, 1.0 - v);
        }
        let p = Point::new(u * a.x + v * b.x, u * a.y + v * b.y);
        if p.norm_sq() <= window_sq && realization.in_cell(p) {
            return Ok(p);
        }
    }
    Err(GeometryError::AttemptsExhausted(max_attempts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single(x: f64, y: f64) -> NetworkRealization {
        NetworkRealization::from_interferers(vec![Point::new(x, y)], 15.0).unwrap()
    }

    #[test]
    fn rho_is_nearest_of_injected_points() {
        let r = NetworkRealization::from_interferers(
            vec![
                Point::new(1.0, 0.0),
                Point::new(3.0, 4.0),
                Point::new(-2.0, 1.0),
            ],
            15.0,
        )
        .unwrap();
        assert_eq!(r.rho(), 1.0);
        assert_eq!(r.serving_position(), Point::ORIGIN);
    }

    #[test]
    fn constructor_rejects_bad_sets() {
        assert_eq!(
            NetworkRealization::from_interferers(vec![], 1.0),
            Err(GeometryError::NoInterferers)
        );
        assert!(matches!(
            NetworkRealization::from_interferers(vec![Point::new(2.0, 0.0)], 1.0),
            Err(GeometryError::OutsideWindow { .. })
        ));
        assert!(matches!(
            NetworkRealization::from_interferers(vec![Point::ORIGIN], 1.0),
            Err(GeometryError::CoincidentInterferer { .. })
        ));
    }

    #[test]
    fn membership_on_axis() {
        let r = single(1.0, 0.0);
        assert!(r.in_cell(Point::new(0.4, 0.0)));
        assert!(!r.in_cell(Point::new(0.6, 0.0)));
        // bisector tie
        assert!(!r.in_cell(Point::new(0.5, 0.0)));
        assert!(in_cell(Point::new(-3.0, 0.0), &r));
    }

    #[test]
    fn sampling_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            sample_realization(0.0, 1.0, &mut rng),
            Err(GeometryError::InvalidDensity(_))
        ));
        assert!(matches!(
            sample_realization(1.0, f64::NAN, &mut rng),
            Err(GeometryError::InvalidWindow(_))
        ));
        assert!(matches!(
            sample_realization(f64::INFINITY, 1.0, &mut rng),
            Err(GeometryError::InvalidDensity(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_realization(1.0, 15.0, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = sample_realization(1.0, 15.0, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
        for p in a.interferers() {
            assert!(p.norm() <= 15.0);
        }
    }

    #[test]
    fn tiny_windows_are_resampled_until_nonempty() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let r = sample_realization(0.01, 1.0, &mut rng).unwrap();
            assert!(!r.interferers().is_empty());
        }
    }

    #[test]
    fn placement_rejects_sub_unit_disparity() {
        let r = single(1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            place_disparity_pair(&r, 0.99, 10, &mut rng),
            Err(GeometryError::InvalidDisparity(0.99))
        );
    }

    #[test]
    fn placement_low_disparity_is_always_feasible() {
        let r = single(1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &d in &[1.0, 1.8] {
            for _ in 0..1000 {
                let p = place_disparity_pair(&r, d, 1, &mut rng).unwrap();
                assert!(p.feasible);
                assert!((p.strong_position.norm() - 0.25).abs() <= 1e-12);
                assert!((p.weak_position.norm() - 0.25 * d).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn placement_large_disparity_finds_far_side() {
        // (-1.25, 0) is 2.25 from the interferer, so the far side is in the cell.
        let r = single(1.0, 0.0);
        assert!(r.in_cell(Point::new(-1.25, 0.0)));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = place_disparity_pair(&r, 5.0, 100, &mut rng).unwrap();
        assert!(p.feasible);
        assert!(r.in_cell(p.weak_position));
        assert!((p.weak_position.norm() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn uniform_in_cell_respects_half_plane() {
        let r = single(1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p = sample_user_in_cell(&r, &mut rng, DEFAULT_SAMPLING_ATTEMPTS).unwrap();
            assert!(p.x < 0.5);
            assert!(r.in_cell(p));
        }
        let a = sample_user_in_cell(&r, &mut ChaCha8Rng::seed_from_u64(2), 100).unwrap();
        let b = sample_user_in_cell(&r, &mut ChaCha8Rng::seed_from_u64(2), 100).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cell_polygon_of_square_lattice() {
        let pts = vec![
            Point::new(1.0, 0.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, -1.0),
            Point::new(2.0, 2.0),
        ];
        let r = NetworkRealization::from_interferers(pts, 15.0).unwrap();
        let polygon = r.cell_polygon();
        assert_eq!(polygon.len(), 4);
        for v in &polygon {
            assert!((v.x.abs() - 0.5).abs() < 1e-12 && (v.y.abs() - 0.5).abs() < 1e-12);
        }
        // Uniform on [-0.5, 0.5]^2: E[x] = 0, E[x^2] = 1/12.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let (mut sx, mut sxx) = (0.0, 0.0);
        for _ in 0..n {
            let p = sample_user_in_cell(&r, &mut rng, 10).unwrap();
            sx += p.x;
            sxx += p.x * p.x;
        }
        assert!((sx / n as f64).abs() < 0.01);
        assert!((sxx / n as f64 - 1.0 / 12.0).abs() < 0.003);
    }

    #[test]
    fn tiny_cells_are_still_sampled() {
        let pts = (0..64)
            .map(|i| Point::from_polar(1e-6, i as f64 * TAU / 64.0))
            .collect();
        let r = NetworkRealization::from_interferers(pts, 100.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = sample_user_in_cell(&r, &mut rng, 10).unwrap();
        assert!(p.norm() < 1e-6);
        assert_eq!(
            sample_user_in_cell(&r, &mut rng, 0),
            Err(GeometryError::AttemptsExhausted(0))
        );
    }

    #[test]
    fn annulus_samples_stay_in_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let p = uniform_in_annulus(0.3, 0.5, &mut rng);
            let r = p.norm();
            assert!((0.3 - 1e-12..=0.5 + 1e-12).contains(&r));
        }
    }
}
