//! Latent class update with the class-effect matrix integrated out.
//!
//! Residuals in block `(a, b)` are `r = M_ab + e` with `M_ab ~ N(0, v)`.
//! Integrating `M_ab` leaves a marginal likelihood that depends on the block
//! only through its count and residual sum, so relabelling one node touches
//! `K` blocks per candidate class.

use super::Chain;
use crate::error::Result;
use crate::model::LatentState;
use crate::stats::inverse_gamma_draw;

/// Block log marginal likelihood, up to terms that do not depend on the partition.
#[inline]
pub(crate) fn block_log_marginal(count: f64, sum: f64, m_var: f64) -> f64 {
    let precision = count + 1.0 / m_var;
    -0.5 * (m_var * precision).ln() + 0.5 * sum * sum / precision
}

impl Chain<'_> {
    pub(crate) fn update_u_class(&mut self) -> Result<()> {
        let n = self.n();
        let LatentState::Class(state) = &self.state.latent else {
            unreachable!("class update on a non-class chain")
        };
        let k = state.k;
        let m_var = state.m_var;
        let mut labels = state.labels.clone();

        let mut count = vec![0.0; k * k];
        let mut sum = vec![0.0; k * k];
        for (d, &(i, j)) in self.pairs.iter().enumerate() {
            let (a, b) = (labels[i], labels[j]);
            let r = self.residual(d);
            count[a * k + b] += 1.0;
            sum[a * k + b] += r;
            if a != b {
                count[b * k + a] += 1.0;
                sum[b * k + a] += r;
            }
        }

        let mut nb_count = vec![0.0; k];
        let mut nb_sum = vec![0.0; k];
        let mut logw = vec![0.0; k];
        if k > 1 {
            for i in 0..n {
                nb_count.iter_mut().for_each(|v| *v = 0.0);
                nb_sum.iter_mut().for_each(|v| *v = 0.0);
                for j in (0..n).filter(|&j| j != i) {
                    let r = self.residual(self.index.index_unchecked(i, j));
                    nb_count[labels[j]] += 1.0;
                    nb_sum[labels[j]] += r;
                }
                // take node i out of its blocks
                let ci = labels[i];
                for c in 0..k {
                    add_block(&mut count, &mut sum, k, ci, c, -nb_count[c], -nb_sum[c]);
                }
                for (cand, w) in logw.iter_mut().enumerate() {
                    *w = (0..k)
                        .map(|c| {
                            let (n0, s0) = (count[cand * k + c], sum[cand * k + c]);
                            block_log_marginal(n0 + nb_count[c], s0 + nb_sum[c], m_var)
                                - block_log_marginal(n0, s0, m_var)
                        })
                        .sum();
                }
                let new = sample_log_weights(&logw, self.state.rng.uniform_open());
                for c in 0..k {
                    add_block(&mut count, &mut sum, k, new, c, nb_count[c], nb_sum[c]);
                }
                labels[i] = new;
            }
        }

        let mut m = vec![0.0; k * k];
        let mut sq = 0.0;
        for a in 0..k {
            for b in a..k {
                let precision = count[a * k + b] + 1.0 / m_var;
                let mean = sum[a * k + b] / precision;
                let v = mean + self.state.rng.std_normal() / precision.sqrt();
                m[a * k + b] = v;
                m[b * k + a] = v;
                sq += v * v;
            }
        }
        let blocks = (k * (k + 1) / 2) as f64;
        let m_var = inverse_gamma_draw(
            self.prior.var_shape + 0.5 * blocks,
            self.prior.m_var_rate + 0.5 * sq,
            &mut self.state.rng,
        )?;

        let LatentState::Class(state) = &mut self.state.latent else {
            unreachable!()
        };
        state.labels = labels;
        state.m = m;
        state.m_var = m_var;
        Ok(())
    }
}

// Adds (dn, ds) to the statistics of node-in-class `a` paired with class `c`;
// keeps the symmetric storage consistent, counting a diagonal block once.
#[inline]
fn add_block(count: &mut [f64], sum: &mut [f64], k: usize, a: usize, c: usize, dn: f64, ds: f64) {
    count[a * k + c] += dn;
    sum[a * k + c] += ds;
    if a != c {
        count[c * k + a] += dn;
        sum[c * k + a] += ds;
    }
}

/// Index drawn with probability proportional to `exp(logw)`, given `u ∈ (0,1)`.
pub(crate) fn sample_log_weights(logw: &[f64], u: f64) -> usize {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    let mut acc = 0.0;
    let target = u * total;
    for (idx, wi) in w.iter().enumerate() {
        acc += wi;
        if target < acc {
            return idx;
        }
    }
    w.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_marginal_matches_direct_integration() {
        // residuals (0.4, 1.1, -0.3) under M ~ N(0, v): compare against a
        // Riemann sum of prod N(r; M, 1) N(M; 0, v), after removing the
        // partition-independent factor exp(-0.5 Σr²) (2π)^{-N/2}.
        let r = [0.4, 1.1, -0.3];
        let v = 1.7;
        let (n, s) = (3.0, r.iter().sum::<f64>());
        let sumsq: f64 = r.iter().map(|x| x * x).sum();
        let h = 1e-4;
        let mut integral = 0.0;
        let mut m = -20.0;
        while m < 20.0 {
            let lik: f64 = r
                .iter()
                .map(|x| (-0.5 * (x - m) * (x - m)).exp() / (2.0 * std::f64::consts::PI).sqrt())
                .product();
            let prior = (-0.5 * m * m / v).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
            integral += lik * prior * h;
            m += h;
        }
        let direct = integral.ln() + 0.5 * sumsq + 1.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((direct - block_log_marginal(n, s, v)).abs() < 1e-6);
    }

    #[test]
    fn log_weight_sampling() {
        assert_eq!(sample_log_weights(&[0.0, -1e9], 0.999), 0);
        assert_eq!(sample_log_weights(&[-1e9, 0.0], 0.001), 1);
        assert_eq!(sample_log_weights(&[0.0, 0.0], 0.49), 0);
        assert_eq!(sample_log_weights(&[0.0, 0.0], 0.51), 1);
    }
}
