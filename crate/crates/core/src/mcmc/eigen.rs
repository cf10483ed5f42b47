use nalgebra::{DMatrix, DVector};

use super::Chain;
use crate::error::Result;
use crate::model::LatentState;
use crate::stats::mvn_draw_canonical;

impl Chain<'_> {
    /// Each `u_i` from its Gaussian full conditional (a regression of node
    /// `i`'s residuals on `diag(lambda) u_j`), then the population mean, then
    /// `lambda` by regressing all residuals on the products `u_ik u_jk`.
    pub(crate) fn update_u_eigen(&mut self) -> Result<()> {
        let n = self.n();
        let LatentState::Eigen(state) = &self.state.latent else {
            unreachable!("eigen update on a non-eigen chain")
        };
        let k = state.k;
        let lambda = state.lambda.clone();
        let mut mean = state.vec_mean.clone();
        let mut u = state.vectors.clone();
        let u_prec = 1.0 / self.prior.u_var;

        let mut precision = DMatrix::<f64>::zeros(k, k);
        let mut linear = DVector::<f64>::zeros(k);
        let mut w = vec![0.0; k];
        for i in 0..n {
            precision.fill(0.0);
            for a in 0..k {
                precision[(a, a)] = u_prec;
                linear[a] = mean[a] * u_prec;
            }
            for j in (0..n).filter(|&j| j != i) {
                let r = self.residual(self.index.index_unchecked(i, j));
                for a in 0..k {
                    w[a] = lambda[a] * u[j * k + a];
                }
                for a in 0..k {
                    linear[a] += w[a] * r;
                    for b in 0..=a {
                        precision[(a, b)] += w[a] * w[b];
                    }
                }
            }
            symmetrize(&mut precision);
            let draw = mvn_draw_canonical(&precision, &linear, &mut self.state.rng)?;
            u[i * k..(i + 1) * k].copy_from_slice(draw.as_slice());
        }

        if self.prior.mean_var > 0.0 {
            let post_prec = 1.0 / self.prior.mean_var + n as f64 * u_prec;
            for (a, m) in mean.iter_mut().enumerate() {
                let s: f64 = (0..n).map(|i| u[i * k + a]).sum();
                *m = s * u_prec / post_prec + self.state.rng.std_normal() / post_prec.sqrt();
            }
        }

        let lambda_var = self.prior.lambda_var_for(n);
        precision.fill(0.0);
        for a in 0..k {
            precision[(a, a)] = 1.0 / lambda_var;
            linear[a] = 0.0;
        }
        let mut q = vec![0.0; k];
        for (d, &(i, j)) in self.pairs.iter().enumerate() {
            let r = self.residual(d);
            for a in 0..k {
                q[a] = u[i * k + a] * u[j * k + a];
            }
            for a in 0..k {
                linear[a] += q[a] * r;
                for b in 0..=a {
                    precision[(a, b)] += q[a] * q[b];
                }
            }
        }
        symmetrize(&mut precision);
        let new_lambda = mvn_draw_canonical(&precision, &linear, &mut self.state.rng)?;

        let LatentState::Eigen(state) = &mut self.state.latent else {
            unreachable!()
        };
        state.vectors = u;
        state.vec_mean = mean;
        state.lambda = new_lambda.iter().copied().collect();
        Ok(())
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let k = m.nrows();
    for a in 0..k {
        for b in 0..a {
            m[(b, a)] = m[(a, b)];
        }
    }
}
