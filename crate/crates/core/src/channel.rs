//! Power-law path loss, Rayleigh fading and intercell interference.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use thiserror::Error;

use crate::geometry::{NetworkRealization, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("path-loss exponent must exceed 2, got {0}")]
    InvalidPathLoss(f64),
    #[error("noise power must be finite and non-negative, got {0}")]
    InvalidNoise(f64),
    #[error("interferer power must be finite and positive, got {0}")]
    InvalidInterfererPower(f64),
    #[error("fixed fading power must be finite and positive, got {0}")]
    InvalidFading(f64),
    #[error("link distance must be finite and positive, got {0}")]
    InvalidDistance(f64),
}

/// Small-scale fading power on a link.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FadingModel {
    /// Unit-mean exponential power, independent per link.
    #[default]
    Rayleigh,
    /// Every link sees the same deterministic power. Used for fixtures.
    Fixed(f64),
}

impl FadingModel {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingModel::Rayleigh => Exp1.sample(rng),
            FadingModel::Fixed(h) => h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub path_loss_exponent: f64,
    /// Noise power relative to the power received at unit distance from a
    /// unit-power transmitter.
    pub noise_power: f64,
    /// Transmit power of every interfering base station.
    pub interferer_power: f64,
    pub fading: FadingModel,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            path_loss_exponent: 4.0,
            noise_power: 0.0,
            interferer_power: 1.0,
            fading: FadingModel::Rayleigh,
        }
    }
}

impl ChannelParams {
    pub fn new(
        path_loss_exponent: f64,
        noise_power: f64,
        interferer_power: f64,
    ) -> Result<Self, ChannelError> {
        let params = Self {
            path_loss_exponent,
            noise_power,
            interferer_power,
            fading: FadingModel::Rayleigh,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_fading(mut self, fading: FadingModel) -> Self {
        self.fading = fading;
        self
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.path_loss_exponent.is_finite() && self.path_loss_exponent > 2.0) {
            return Err(ChannelError::InvalidPathLoss(self.path_loss_exponent));
        }
        if !(self.noise_power.is_finite() && self.noise_power >= 0.0) {
            return Err(ChannelError::InvalidNoise(self.noise_power));
        }
        if !(self.interferer_power.is_finite() && self.interferer_power > 0.0) {
            return Err(ChannelError::InvalidInterfererPower(self.interferer_power));
        }
        if let FadingModel::Fixed(h) = self.fading {
            if !(h.is_finite() && h > 0.0) {
                return Err(ChannelError::InvalidFading(h));
            }
        }
        Ok(())
    }
}

/// `distance_sq^(-eta/2)`, with the common `eta = 4` case kept off `powf`.
#[inline]
fn path_loss_sq(distance_sq: f64, eta: f64) -> f64 {
    if eta == 4.0 {
        1.0 / (distance_sq * distance_sq)
    } else {
        distance_sq.powf(-0.5 * eta)
    }
}

/// `fading * distance^(-eta)`.
pub fn link_gain(distance: f64, fading: f64, eta: f64) -> Result<f64, ChannelError> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(ChannelError::InvalidDistance(distance));
    }
    if !(fading.is_finite() && fading > 0.0) {
        return Err(ChannelError::InvalidFading(fading));
    }
    Ok(fading * path_loss_sq(distance * distance, eta))
}

/// Interference-plus-noise at `position`, with a fresh fading draw on every
/// interferer link. All interferers transmit.
pub fn aggregate_interference<R: Rng + ?Sized>(
    position: Point,
    realization: &NetworkRealization,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<f64, ChannelError> {
    interference_terms(position, realization.interferers(), params, rng).map(|(w, _)| w)
}

/// Fading-averaged interference-plus-noise at `position`.
pub fn mean_interference(
    position: Point,
    realization: &NetworkRealization,
    params: &ChannelParams,
) -> Result<f64, ChannelError> {
    let eta = params.path_loss_exponent;
    let mut total = 0.0;
    for &x in realization.interferers() {
        let d2 = position.distance_sq(x);
        if d2 == 0.0 {
            return Err(ChannelError::InvalidDistance(0.0));
        }
        total += path_loss_sq(d2, eta);
    }
    Ok(params.noise_power + params.interferer_power * total)
}

/// Returns `(instantaneous, fading-averaged)` interference-plus-noise.
fn interference_terms<R: Rng + ?Sized>(
    position: Point,
    interferers: &[Point],
    params: &ChannelParams,
    rng: &mut R,
) -> Result<(f64, f64), ChannelError> {
    let eta = params.path_loss_exponent;
    let mut faded = 0.0;
    let mut mean = 0.0;
    for &x in interferers {
        let d2 = position.distance_sq(x);
        if d2 == 0.0 {
            return Err(ChannelError::InvalidDistance(0.0));
        }
        let loss = path_loss_sq(d2, eta);
        faded += params.fading.draw(rng) * loss;
        mean += loss;
    }
    Ok((
        params.noise_power + params.interferer_power * faded,
        params.noise_power + params.interferer_power * mean,
    ))
}

/// Everything the decoder and allocator need to know about one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserState {
    pub position: Point,
    pub link_distance: f64,
    /// Serving-link fading power `h`.
    pub fading: f64,
    /// Serving gain `G = h * r^(-eta)`.
    pub gain: f64,
    /// Fading-averaged serving gain `r^(-eta)`.
    pub mean_gain: f64,
    /// Interference-plus-noise `W` with instantaneous fading.
    pub interference_plus_noise: f64,
    /// Interference-plus-noise averaged over interferer fading.
    pub mean_interference_plus_noise: f64,
}

impl UserState {
    /// A user described only by its aggregates. Position is placed on the
    /// positive x-axis at `link_distance`.
    pub fn from_aggregates(link_distance: f64, gain: f64, interference_plus_noise: f64) -> Self {
        Self {
            position: Point::new(link_distance, 0.0),
            link_distance,
            fading: 1.0,
            gain,
            mean_gain: gain,
            interference_plus_noise,
            mean_interference_plus_noise: interference_plus_noise,
        }
    }

    /// `W / G`: the power needed per unit SINR with no intracell interference.
    pub fn normalized_interference(&self) -> f64 {
        self.interference_plus_noise / self.gain
    }

    /// Full-power single-user SINR, `G / W`.
    pub fn reference_sinr(&self) -> f64 {
        self.gain / self.interference_plus_noise
    }

    /// Fading-averaged received signal over fading-averaged interference.
    pub fn mean_signal_quality(&self) -> f64 {
        self.mean_gain / self.mean_interference_plus_noise
    }

    /// Same user as seen by an allocator that only knows distances.
    pub fn distance_only_view(&self) -> Self {
        Self {
            gain: self.mean_gain,
            interference_plus_noise: self.mean_interference_plus_noise,
            ..*self
        }
    }
}

/// Draws the serving fading and the interference for a user at `position`.
pub fn make_user_state<R: Rng + ?Sized>(
    position: Point,
    realization: &NetworkRealization,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<UserState, ChannelError> {
    let link_distance = position.norm();
    let fading = params.fading.draw(rng);
    let gain = link_gain(link_distance, fading, params.path_loss_exponent)?;
    let mean_gain = path_loss_sq(link_distance * link_distance, params.path_loss_exponent);
    let (w, w_mean) = interference_terms(position, realization.interferers(), params, rng)?;
    Ok(UserState {
        position,
        link_distance,
        fading,
        gain,
        mean_gain,
        interference_plus_noise: w,
        mean_interference_plus_noise: w_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn unit_fading() -> ChannelParams {
        ChannelParams::default().with_fading(FadingModel::Fixed(1.0))
    }

    #[test]
    fn link_gain_values() {
        assert_eq!(link_gain(1.0, 0.7, 4.0).unwrap(), 0.7);
        assert_eq!(link_gain(2.0, 1.0, 4.0).unwrap(), 0.0625);
        assert!(close(
            link_gain(4.0, 1.0, 2.5).unwrap(),
            4f64.powf(-2.5),
            1e-15
        ));
        assert_eq!(
            link_gain(0.0, 1.0, 4.0),
            Err(ChannelError::InvalidDistance(0.0))
        );
    }

    #[test]
    fn link_gain_eta_two_boundary_evaluates() {
        // eta = 2 is rejected by ChannelParams but the raw formula still holds.
        assert_eq!(link_gain(4.0, 1.0, 2.0).unwrap(), 0.0625);
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(4.0, 0.0, 1.0).is_ok());
        assert_eq!(
            ChannelParams::new(2.0, 0.0, 1.0),
            Err(ChannelError::InvalidPathLoss(2.0))
        );
        assert_eq!(
            ChannelParams::new(4.0, -1.0, 1.0),
            Err(ChannelError::InvalidNoise(-1.0))
        );
        assert_eq!(
            ChannelParams::new(4.0, 0.0, 0.0),
            Err(ChannelError::InvalidInterfererPower(0.0))
        );
    }

    #[test]
    fn interference_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let one = NetworkRealization::from_interferers(vec![Point::new(1.0, 0.0)], 15.0).unwrap();
        let w = aggregate_interference(Point::ORIGIN, &one, &unit_fading(), &mut rng).unwrap();
        assert_eq!(w, 1.0);

        let two = NetworkRealization::from_interferers(
            vec![Point::new(1.0, 0.0), Point::new(0.0, -2.0)],
            15.0,
        )
        .unwrap();
        let w = aggregate_interference(Point::ORIGIN, &two, &unit_fading(), &mut rng).unwrap();
        assert_eq!(w, 1.0625);

        let noisy = ChannelParams {
            noise_power: 0.01,
            ..unit_fading()
        };
        let far = NetworkRealization::from_interferers(vec![Point::new(1e6, 0.0)], 1e6).unwrap();
        let w = aggregate_interference(Point::ORIGIN, &far, &noisy, &mut rng).unwrap();
        assert!(close(w, 0.01, 1e-12));

        assert!(
            aggregate_interference(Point::new(1.0, 0.0), &one, &unit_fading(), &mut rng).is_err()
        );
    }

    #[test]
    fn user_state_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let one = NetworkRealization::from_interferers(vec![Point::new(1.0, 0.0)], 15.0).unwrap();

        let u = make_user_state(Point::new(0.25, 0.0), &one, &unit_fading(), &mut rng).unwrap();
        assert_eq!(u.link_distance, 0.25);
        assert_eq!(u.gain, 256.0);
        assert!(close(u.interference_plus_noise, 3.16049, 1e-5));
        assert!(close(u.interference_plus_noise, 0.75f64.powi(-4), 1e-14));

        let u = make_user_state(Point::new(-0.5, 0.0), &one, &unit_fading(), &mut rng).unwrap();
        assert_eq!(u.gain, 16.0);
        assert!(close(u.interference_plus_noise, 0.19753, 1e-5));

        let params = ChannelParams {
            noise_power: 0.1,
            fading: FadingModel::Fixed(0.5),
            ..ChannelParams::default()
        };
        let far = NetworkRealization::from_interferers(vec![Point::new(1e6, 0.0)], 1e6).unwrap();
        let u = make_user_state(Point::new(0.0, 1.0), &far, &params, &mut rng).unwrap();
        assert_eq!(u.gain, 0.5);
        assert!(close(u.interference_plus_noise, 0.1, 1e-12));
    }

    #[test]
    fn moving_an_interferer_away_never_raises_interference() {
        let near = NetworkRealization::from_interferers(
            vec![Point::new(1.0, 0.0), Point::new(-2.0, 1.0)],
            15.0,
        )
        .unwrap();
        let mut base = 1.0;
        for step in 0..20 {
            let x = 1.0 + 0.25 * step as f64;
            let r = NetworkRealization::from_interferers(
                vec![Point::new(x, 0.0), Point::new(-2.0, 1.0)],
                15.0,
            )
            .unwrap();
            let w = aggregate_interference(
                Point::new(0.1, 0.1),
                &r,
                &unit_fading(),
                &mut ChaCha8Rng::seed_from_u64(1),
            )
            .unwrap();
            if step > 0 {
                assert!(w <= base);
            }
            base = w;
        }
        assert!(mean_interference(Point::new(0.1, 0.1), &near, &unit_fading()).unwrap() >= base);
    }

    #[test]
    fn gain_scales_by_two_to_minus_eta() {
        for &eta in &[2.5, 3.0, 4.0, 5.5] {
            let g1 = link_gain(0.3, 0.8, eta).unwrap();
            let g2 = link_gain(0.6, 0.8, eta).unwrap();
            assert!(close(g2 / g1, 2f64.powf(-eta), 1e-13));
        }
    }

    #[test]
    fn rayleigh_power_has_unit_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| FadingModel::Rayleigh.draw(&mut rng))
            .sum::<f64>()
            / n as f64;
        assert!((0.99..=1.01).contains(&mean), "mean {mean}");
    }

    #[test]
    fn distance_only_view_uses_means() {
        let one = NetworkRealization::from_interferers(vec![Point::new(1.0, 0.0)], 15.0).unwrap();
        let u = make_user_state(
            Point::new(0.25, 0.0),
            &one,
            &ChannelParams::default(),
            &mut ChaCha8Rng::seed_from_u64(3),
        )
        .unwrap();
        let v = u.distance_only_view();
        assert_eq!(v.gain, 256.0);
        assert!(close(v.interference_plus_noise, 0.75f64.powi(-4), 1e-14));
    }
}
