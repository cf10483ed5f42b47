use super::{Chain, TARGET_ACCEPTANCE};
use crate::error::Result;
use crate::model::{euclidean, LatentState};
use crate::stats::inverse_gamma_draw;

impl Chain<'_> {
    /// Random-walk Metropolis on each position in turn, then the per-coordinate
    /// population variances from their inverse-gamma full conditionals.
    pub(crate) fn update_u_distance(&mut self) -> Result<()> {
        let n = self.n();
        let step = self.mh_step;
        let LatentState::Distance(state) = &self.state.latent else {
            unreachable!("distance update on a non-distance chain")
        };
        let k = state.k;
        let pos_var = state.pos_var.clone();
        let mut positions = state.positions.clone();
        let mut proposal = vec![0.0; k];
        let mut accepted = 0;

        for i in 0..n {
            for (c, p) in proposal.iter_mut().enumerate() {
                *p = positions[i * k + c] + step * self.state.rng.std_normal();
            }
            let current = &positions[i * k..(i + 1) * k];
            let mut log_ratio = 0.0;
            for c in 0..k {
                log_ratio -= 0.5 * (proposal[c] * proposal[c] - current[c] * current[c]) / pos_var[c];
            }
            for j in (0..n).filter(|&j| j != i) {
                let r = self.residual(self.index.index_unchecked(i, j));
                let uj = &positions[j * k..(j + 1) * k];
                // alpha = -distance, so the residual after the kernel is r + distance
                let e_new = r + euclidean(&proposal, uj);
                let e_old = r + euclidean(current, uj);
                log_ratio -= 0.5 * (e_new * e_new - e_old * e_old);
            }
            if self.state.rng.uniform_open().ln() < log_ratio {
                positions[i * k..(i + 1) * k].copy_from_slice(&proposal);
                accepted += 1;
            }
        }

        let mut new_var = vec![0.0; k];
        for (c, v) in new_var.iter_mut().enumerate() {
            let ss: f64 = (0..n).map(|i| positions[i * k + c].powi(2)).sum();
            *v = inverse_gamma_draw(
                self.prior.var_shape + 0.5 * n as f64,
                self.prior.pos_var_rate + 0.5 * ss,
                &mut self.state.rng,
            )?;
        }

        self.sweep_accepted = accepted;
        self.sweep_proposed = n;
        if self.adapting() {
            let rate = accepted as f64 / n as f64;
            let gain = 1.0 / ((self.sweeps + 1) as f64).powf(0.6);
            self.mh_step = (self.mh_step.ln() + gain * (rate - TARGET_ACCEPTANCE)).exp();
        }

        let LatentState::Distance(state) = &mut self.state.latent else {
            unreachable!()
        };
        state.positions = positions;
        state.pos_var = new_var;
        Ok(())
    }
}
