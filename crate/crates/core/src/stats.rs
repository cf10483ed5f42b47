//! Numerical primitives shared by the samplers.
//!
//! Everything stochastic takes an explicit [`RngStream`], so a draw is a pure
//! function of its parameters and the generator state.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{Error, Result};

/// Seeded, splittable random stream.
///
/// `substream(seed, id)` selects an independent ChaCha stream, so per-fold
/// chains can run on any thread and still reproduce bit for bit.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngStream {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u: f64 = self.inner.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn std_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn exp1(&mut self) -> f64 {
        Exp1.sample(&mut self.inner)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Standard normal CDF Φ(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail 1 − Φ(x), accurate far into the right tail.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse of Φ. Rational approximation refined by one Halley step.
pub fn std_normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    let x = if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = std_normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Draw from normal(mean, 1) restricted to the open interval (lo, hi).
///
/// Either bound may be infinite. Tails use exponential rejection, so
/// intervals many standard deviations from the mean stay exact.
pub fn truncated_normal_draw(mean: f64, lo: f64, hi: f64, rng: &mut RngStream) -> Result<f64> {
    truncated_normal_scaled(mean, 1.0, lo, hi, rng)
}

/// As [`truncated_normal_draw`] with standard deviation `sd`.
pub fn truncated_normal_scaled(
    mean: f64,
    sd: f64,
    lo: f64,
    hi: f64,
    rng: &mut RngStream,
) -> Result<f64> {
    if lo.is_nan() || hi.is_nan() || !(lo < hi) {
        return Err(Error::EmptyInterval { lo, hi });
    }
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    if !(a < b) {
        // interval narrower than rounding on the standardized scale
        return Ok(lo + (hi - lo) * rng.uniform_open());
    }
    for _ in 0..64 {
        let x = mean + sd * std_truncated(a, b, rng);
        if x > lo && x < hi {
            return Ok(x);
        }
    }
    Ok(lo + (hi - lo) * rng.uniform_open())
}

fn std_truncated(a: f64, b: f64, rng: &mut RngStream) -> f64 {
    if a >= 0.0 {
        right_tail(a, b, rng)
    } else if b <= 0.0 {
        -right_tail(-b, -a, rng)
    } else if std_normal_cdf(b) - std_normal_cdf(a) >= 0.3 {
        loop {
            let x = rng.std_normal();
            if x > a && x < b {
                return x;
            }
        }
    } else {
        // narrow interval around zero; density bounded by its value at 0
        loop {
            let x = a + (b - a) * rng.uniform_open();
            if rng.uniform_open() < (-0.5 * x * x).exp() {
                return x;
            }
        }
    }
}

// 0 <= a < b
fn right_tail(a: f64, b: f64, rng: &mut RngStream) -> f64 {
    if b.is_finite() && 0.5 * (b * b - a * a) < 1.1 {
        loop {
            let x = a + (b - a) * rng.uniform_open();
            if rng.uniform_open() < (0.5 * (a * a - x * x)).exp() {
                return x;
            }
        }
    } else if a < 0.3 {
        loop {
            let x = rng.std_normal().abs();
            if x > a && x < b {
                return x;
            }
        }
    } else {
        let rate = 0.5 * (a + (a * a + 4.0).sqrt());
        loop {
            let x = a + rng.exp1() / rate;
            if x <= a || x >= b {
                continue;
            }
            let d = x - rate;
            if rng.uniform_open() < (-0.5 * d * d).exp() {
                return x;
            }
        }
    }
}

/// Draw from normal(mean, precision⁻¹) through the Cholesky factor of the precision.
pub fn mvn_draw(
    mean: &DVector<f64>,
    precision: &DMatrix<f64>,
    rng: &mut RngStream,
) -> Result<DVector<f64>> {
    if precision.nrows() != mean.len() || precision.ncols() != mean.len() {
        return Err(Error::DimensionMismatch(format!(
            "mean has {} entries, precision is {}x{}",
            mean.len(),
            precision.nrows(),
            precision.ncols()
        )));
    }
    let l = cholesky_lower(precision)?;
    let xi = DVector::from_fn(mean.len(), |_, _| rng.std_normal());
    let noise = l
        .tr_solve_lower_triangular(&xi)
        .ok_or(Error::NotPositiveDefinite)?;
    Ok(mean + noise)
}

/// Draw from the Gaussian with density ∝ exp(−½xᵀPx + bᵀx), i.e. mean P⁻¹b.
///
/// This is the shape every conjugate full conditional in the samplers takes.
pub fn mvn_draw_canonical(
    precision: &DMatrix<f64>,
    linear: &DVector<f64>,
    rng: &mut RngStream,
) -> Result<DVector<f64>> {
    let l = cholesky_lower(precision)?;
    let w = l
        .solve_lower_triangular(linear)
        .ok_or(Error::NotPositiveDefinite)?;
    let xi = DVector::from_fn(linear.len(), |_, _| rng.std_normal());
    let v = w + xi;
    l.tr_solve_lower_triangular(&v)
        .ok_or(Error::NotPositiveDefinite)
}

fn cholesky_lower(precision: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = precision.nrows();
    if precision.ncols() != d {
        return Err(Error::NotPositiveDefinite);
    }
    let scale = precision.amax().max(1.0);
    for i in 0..d {
        for j in 0..i {
            if (precision[(i, j)] - precision[(j, i)]).abs() > 1e-9 * scale {
                return Err(Error::NotPositiveDefinite);
            }
        }
    }
    nalgebra::Cholesky::new(precision.clone())
        .map(|c| c.l())
        .ok_or(Error::NotPositiveDefinite)
}

/// Inverse-gamma draw: the reciprocal of a Gamma(shape, rate) variate.
pub fn inverse_gamma_draw(shape: f64, rate: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite() && rate > 0.0 && rate.is_finite()) {
        return Err(Error::invalid(format!(
            "inverse-gamma needs positive shape and rate, got ({shape}, {rate})"
        )));
    }
    let gamma = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::invalid(e.to_string()))?;
    loop {
        let g: f64 = gamma.sample(rng);
        if g > 0.0 {
            return Ok(1.0 / g);
        }
    }
}
