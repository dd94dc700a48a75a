//! Classical rate equation for the four ground-state levels of the ion
//! (`|0>` dark, `|1>` bright qubit state, `|2>`, `|3>` the `m_F = -1, +1`
//! extra levels) under weak off-resonant illumination.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

pub const LEVELS: usize = 4;

/// Transition rates `R[a][b]` for `a -> b` in 1/s.
///
/// Diagonal entries are photon scattering events that return the ion to the
/// level it started in. They do not move population but they do dephase,
/// so they count toward the total scattering rate used for coherence damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateModel {
    pub rates: [[f64; LEVELS]; LEVELS],
}

/// Atomic couplings for the bright manifold. Each bright level is driven by
/// exactly one polarization component of the detection light:
/// `|1>` (m=0) by pi, `|2>` (m=-1) by sigma+, `|3>` (m=+1) by sigma-.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    /// Rabi rates (rad/s) of the (sigma+, sigma-, pi) components.
    pub rabi_plus: f64,
    pub rabi_minus: f64,
    pub rabi_pi: f64,
    /// Zeeman detunings (rad/s) of levels |1>, |2>, |3>.
    pub zeeman_detunings: [f64; 3],
    /// Excited-state linewidth (rad/s).
    pub linewidth: f64,
}

impl Couplings {
    /// Per-final-state scattering rate out of each bright level,
    /// `Omega_a^2 Gamma / (Gamma^2/4 + Delta_a^2)`.
    pub fn bright_rates(&self) -> Result<[f64; 3]> {
        if !(self.linewidth > 0.0) {
            return Err(param("linewidth must be > 0"));
        }
        let rabi = [self.rabi_pi, self.rabi_plus, self.rabi_minus];
        let g = self.linewidth;
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = rabi[i] * rabi[i] * g / (g * g / 4.0 + self.zeeman_detunings[i].powi(2));
        }
        Ok(out)
    }
}

impl RateModel {
    pub fn zero() -> Self {
        Self { rates: [[0.0; LEVELS]; LEVELS] }
    }

    /// Detection light with the same rate `gamma` between every pair of
    /// bright levels. `|0>` is uncoupled.
    pub fn equal(gamma: f64) -> Self {
        Self::measurement([gamma; 3])
    }

    /// Detection (cycling) light. `bright_rates[a]` is the per-final-state
    /// rate out of bright level `a + 1`; the excited state decays to each of
    /// the three bright levels with equal probability, never to `|0>`.
    pub fn measurement(bright_rates: [f64; 3]) -> Self {
        let mut m = Self::zero();
        for (a, rate) in bright_rates.iter().enumerate() {
            for b in 1..LEVELS {
                m.rates[a + 1][b] = *rate;
            }
        }
        m
    }

    /// Reset (optical pumping) light. Each bright level scatters at total
    /// rate `3 * bright_rates[a]`; a fraction `dark_branching` lands in `|0>`
    /// and the rest is spread equally over the bright levels.
    pub fn reset(bright_rates: [f64; 3], dark_branching: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&dark_branching) {
            return Err(param(format!("dark branching must lie in [0, 1], got {dark_branching}")));
        }
        let mut m = Self::zero();
        for (a, rate) in bright_rates.iter().enumerate() {
            m.rates[a + 1][0] = 3.0 * dark_branching * rate;
            for b in 1..LEVELS {
                m.rates[a + 1][b] = (1.0 - dark_branching) * rate;
            }
        }
        Ok(m)
    }

    pub fn from_couplings(c: &Couplings) -> Result<Self> {
        Ok(Self::measurement(c.bright_rates()?))
    }

    pub fn validate(&self) -> Result<()> {
        for row in &self.rates {
            for r in row {
                if !(*r >= 0.0) || !r.is_finite() {
                    return Err(param(format!("rates must be finite and >= 0, got {r}")));
                }
            }
        }
        Ok(())
    }

    /// Multiplies every rate by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut m = *self;
        for row in m.rates.iter_mut() {
            for r in row.iter_mut() {
                *r *= k;
            }
        }
        m
    }

    /// Total photon scattering rate out of each level, self-returns included.
    pub fn total_scattering(&self) -> [f64; LEVELS] {
        let mut s = [0.0; LEVELS];
        for (a, row) in self.rates.iter().enumerate() {
            s[a] = row.iter().sum();
        }
        s
    }

    /// Generator `Q` with `dP/dt = Q P`: `Q[b][a] = R[a -> b]` off the
    /// diagonal, columns summing to zero.
    pub fn generator(&self) -> Matrix4<f64> {
        let mut q = Matrix4::zeros();
        for a in 0..LEVELS {
            let mut out = 0.0;
            for b in 0..LEVELS {
                if a != b {
                    q[(b, a)] = self.rates[a][b];
                    out += self.rates[a][b];
                }
            }
            q[(a, a)] = -out;
        }
        q
    }

    /// Weights `pi` with `pi_a R[a->b] = pi_b R[b->a]` on every connected
    /// component, if such weights exist.
    fn detailed_balance_weights(&self) -> Option<[f64; LEVELS]> {
        let r = &self.rates;
        let mut pi = [0.0f64; LEVELS];
        let mut seen = [false; LEVELS];
        for root in 0..LEVELS {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            pi[root] = 1.0;
            let mut stack = vec![root];
            while let Some(a) = stack.pop() {
                for b in 0..LEVELS {
                    if a == b {
                        continue;
                    }
                    let (ab, ba) = (r[a][b], r[b][a]);
                    if ab == 0.0 && ba == 0.0 {
                        continue;
                    }
                    if ab == 0.0 || ba == 0.0 {
                        return None;
                    }
                    let implied = pi[a] * ab / ba;
                    if seen[b] {
                        if (implied - pi[b]).abs() > 1e-12 * implied.max(pi[b]) {
                            return None;
                        }
                    } else {
                        seen[b] = true;
                        pi[b] = implied;
                        stack.push(b);
                    }
                }
            }
        }
        Some(pi)
    }

    /// Population transfer matrix `T = exp(Q t)`, `T[b][a] = P(a -> b)`.
    ///
    /// Reversible models are solved exactly through the eigendecomposition of
    /// the symmetrised generator `D^-1 Q D`, `D = diag(sqrt(pi))`. Models with
    /// one-way pumping (reset into `|0>`, a dark bright level) have no such
    /// similarity and fall back to scaling-and-squaring Padé.
    pub fn transfer_matrix(&self, t: f64) -> Result<Matrix4<f64>> {
        self.validate()?;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(param(format!("evolution time must be finite and >= 0, got {t}")));
        }
        let q = self.generator();
        if t == 0.0 || q.amax() == 0.0 {
            return Ok(Matrix4::identity());
        }
        match self.detailed_balance_weights() {
            Some(pi) => {
                let sq = Vector4::from_iterator(pi.iter().map(|p| p.sqrt()));
                let mut sym = Matrix4::zeros();
                for a in 0..LEVELS {
                    for b in 0..LEVELS {
                        sym[(b, a)] = q[(b, a)] * sq[a] / sq[b];
                    }
                }
                let sym = (sym + sym.transpose()) * 0.5;
                let eig = SymmetricEigen::new(sym);
                let v = eig.eigenvectors;
                let exp_diag = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| (l * t).exp()));
                let e = v * exp_diag * v.transpose();
                let mut out = Matrix4::zeros();
                for a in 0..LEVELS {
                    for b in 0..LEVELS {
                        out[(b, a)] = e[(b, a)] * sq[b] / sq[a];
                    }
                }
                Ok(out)
            }
            None => Ok((q * t).exp()),
        }
    }
}

/// Level populations `P_0 ..= P_3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations(pub [f64; LEVELS]);

impl Populations {
    pub fn level(level: usize) -> Self {
        let mut p = [0.0; LEVELS];
        p[level] = 1.0;
        Self(p)
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.0 {
            if !(*p >= -1e-12 && *p <= 1.0 + 1e-12) {
                return Err(Error::State(format!("population {p} outside [0, 1]")));
            }
        }
        let s = self.total();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::State(format!("populations sum to {s}, expected 1")));
        }
        Ok(())
    }
}

/// Evolves level populations under the rate equation for time `t`.
pub fn rate_evolve(model: &RateModel, p0: &Populations, t: f64) -> Result<Populations> {
    p0.validate()?;
    let tm = model.transfer_matrix(t)?;
    let v = tm * Vector4::from(p0.0);
    Ok(Populations([v[0], v[1], v[2], v[3]]))
}

/// Bright-state depumping probability `(2/3)(1 - exp(-3 gamma t))` for
/// equal rates, starting in `|1>`.
pub fn depump_probability(gamma: f64, t: f64) -> f64 {
    -(2.0 / 3.0) * (-3.0 * gamma * t).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rates_leave_populations() {
        let p0 = Populations([0.1, 0.2, 0.3, 0.4]);
        let p = rate_evolve(&RateModel::equal(0.0), &p0, 12.0).unwrap();
        assert_eq!(p, p0);
    }

    #[test]
    fn closed_form_at_half_gamma_t() {
        let gamma = 250.0;
        let t = 0.5 / gamma;
        let p = rate_evolve(&RateModel::equal(gamma), &Populations::level(1), t).unwrap();
        let e = (-1.5f64).exp();
        assert!((p.0[1] - (2.0 / 3.0) * (e + 0.5)).abs() < 1e-10);
        assert!((p.0[2] - (1.0 - e) / 3.0).abs() < 1e-10);
        assert!((p.0[3] - (1.0 - e) / 3.0).abs() < 1e-10);
        assert_eq!(p.0[0], 0.0);
    }

    #[test]
    fn rejects_unnormalised_state() {
        let err = rate_evolve(&RateModel::equal(1.0), &Populations([0.5, 0.2, 0.0, 0.0]), 1.0);
        assert!(matches!(err, Err(Error::State(_))));
    }

    #[test]
    fn reset_is_not_reversible_but_conserves() {
        let m = RateModel::reset([1.0, 1.0, 1.0], 1.0 / 3.0).unwrap();
        assert!(m.detailed_balance_weights().is_none());
        let p = rate_evolve(&m, &Populations::level(2), 0.7).unwrap();
        assert!((p.total() - 1.0).abs() < 1e-12);
        assert!(p.0[0] > 0.5);
    }

    #[test]
    fn coupling_rates_follow_lorentzian() {
        let c = Couplings {
            rabi_plus: 2.0,
            rabi_minus: 1.0,
            rabi_pi: 1.0,
            zeeman_detunings: [0.0, 0.5, 0.0],
            linewidth: 1.0,
        };
        let r = c.bright_rates().unwrap();
        assert!((r[0] - 4.0).abs() < 1e-15);
        assert!((r[1] - 4.0 / 0.5).abs() < 1e-15);
        assert!((r[2] - 4.0).abs() < 1e-15);
    }
}
