//! Correlations smeared over spherical caps.
//!
//! Real polarizer settings are small solid angles rather than exact
//! directions. The smeared singlet correlation over caps
//! O_a = {u : |1 − u·a| ≤ ε_a}, O_b likewise, with inverse-area
//! normalisation, is
//!
//!   E = −(1/|O_a|)(1/|O_b|) ∬ u·v du dv = −(1 − ε_a/2)(1 − ε_b/2)(a·b),
//!
//! because u·a is uniform on [1−ε, 1] for the uniform cap measure. The
//! quadrature route below is cross-checked against that closed form, and the
//! closed form itself is validated by spherical Monte Carlo.

use rand::Rng;

use crate::rng::rng_from_seed;

use super::{QuantumError, Result, UnitVector3};

/// Cap around `axis` of half-width ε in the variable 1 − u·axis.
#[derive(Clone, Copy, Debug)]
pub struct SphericalCap {
    pub axis: UnitVector3,
    pub epsilon: f64,
}

impl SphericalCap {
    pub fn new(axis: UnitVector3, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 2.0) {
            return Err(QuantumError::EpsilonOutOfRange(epsilon));
        }
        Ok(SphericalCap { axis, epsilon })
    }

    /// Orthonormal frame (e1, e2, axis).
    fn frame(&self) -> ([f64; 3], [f64; 3]) {
        let [x, y, z] = self.axis.components();
        // Any direction not parallel to the axis.
        let helper = if x.abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let dot = helper[0] * x + helper[1] * y + helper[2] * z;
        let mut e1 = [helper[0] - dot * x, helper[1] - dot * y, helper[2] - dot * z];
        let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
        for v in e1.iter_mut() {
            *v /= n;
        }
        let e2 = [
            y * e1[2] - z * e1[1],
            z * e1[0] - x * e1[2],
            x * e1[1] - y * e1[0],
        ];
        (e1, e2)
    }

    /// Point on the cap with polar coordinate t = u·axis and azimuth φ.
    fn point(&self, t: f64, phi: f64, e1: &[f64; 3], e2: &[f64; 3]) -> [f64; 3] {
        let s = (1.0 - t * t).max(0.0).sqrt();
        let [ax, ay, az] = self.axis.components();
        [
            s * (phi.cos() * e1[0] + phi.sin() * e2[0]) + t * ax,
            s * (phi.cos() * e1[1] + phi.sin() * e2[1]) + t * ay,
            s * (phi.cos() * e1[2] + phi.sin() * e2[2]) + t * az,
        ]
    }

    /// Cap-average of the position vector u by product quadrature:
    /// Gauss–Legendre in t = u·axis over [1−ε, 1], uniform (trapezoidal)
    /// grid in the azimuth.
    fn mean_vector(&self, polar_order: usize, azimuthal_points: usize) -> [f64; 3] {
        let (e1, e2) = self.frame();
        let (nodes, weights) = gauss_legendre(polar_order);
        let lo = 1.0 - self.epsilon;
        let hi = 1.0;
        let mut acc = [0.0f64; 3];
        let mut total_weight = 0.0;
        for (node, w) in nodes.iter().zip(weights.iter()) {
            let t = 0.5 * (hi - lo) * node + 0.5 * (hi + lo);
            for j in 0..azimuthal_points {
                let phi = std::f64::consts::TAU * j as f64 / azimuthal_points as f64;
                let u = self.point(t, phi, &e1, &e2);
                for k in 0..3 {
                    acc[k] += w * u[k];
                }
                total_weight += w;
            }
        }
        // Dividing by the accumulated weight implements the inverse-area
        // normalisation η = 1/|O|.
        [acc[0] / total_weight, acc[1] / total_weight, acc[2] / total_weight]
    }

    /// Uniform sample from the cap: t uniform on [1−ε, 1], azimuth uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        let (e1, e2) = self.frame();
        let t = 1.0 - self.epsilon * rng.random::<f64>();
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        self.point(t, phi, &e1, &e2)
    }
}

/// Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const POLAR_ORDER: usize = 24;
const AZIMUTHAL_POINTS: usize = 48;

/// Smeared correlation by numerical integration over O_a × O_b.
pub fn smeared_correlation(cap_a: &SphericalCap, cap_b: &SphericalCap) -> f64 {
    // −∬ u·v factorises into −(mean u)·(mean v); each mean is a genuine 2-D
    // cap quadrature.
    let mu = cap_a.mean_vector(POLAR_ORDER, AZIMUTHAL_POINTS);
    let mv = cap_b.mean_vector(POLAR_ORDER, AZIMUTHAL_POINTS);
    -(mu[0] * mv[0] + mu[1] * mv[1] + mu[2] * mv[2])
}

/// Independent oracle: −(1 − ε_a/2)(1 − ε_b/2)(a·b).
pub fn smeared_correlation_closed_form(cap_a: &SphericalCap, cap_b: &SphericalCap) -> f64 {
    -(1.0 - cap_a.epsilon / 2.0) * (1.0 - cap_b.epsilon / 2.0) * cap_a.axis.dot(&cap_b.axis)
}

#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Brute-force spherical Monte Carlo of −u·v over the two caps; validates
/// the closed-form oracle.
pub fn smeared_correlation_monte_carlo(
    cap_a: &SphericalCap,
    cap_b: &SphericalCap,
    samples: u64,
    seed: u64,
) -> McEstimate {
    let mut rng = rng_from_seed(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let u = cap_a.sample(&mut rng);
        let v = cap_b.sample(&mut rng);
        let x = -(u[0] * v[0] + u[1] * v[1] + u[2] * v[2]);
        sum += x;
        sum_sq += x * x;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    McEstimate { mean, std_error: (var / n).sqrt(), samples }
}
