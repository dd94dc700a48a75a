//! Leakage error channels for a probe qubit: builders from rate-equation
//! physics, the Clifford twirl and the two-level leakage/seepage
//! eigensystem.

use serde::{Deserialize, Serialize};

use crate::clifford;
use crate::error::{param, Error, Result};
use crate::liouville::{
    direct_sum, ket_bra, pauli2, Op2, Op4, SuperMatrix, SuperOperator, C64, COMPUTATIONAL, CROSS, EXTRA, IDX_ID_C,
    IDX_ID_E, IDX_X_C, IDX_Y_C, IDX_Z_C,
};
use crate::micromotion::RateModel;

/// Tolerance on couplings that must vanish for a channel to have the
/// incoherent leakage form.
pub const STRUCTURE_TOLERANCE: f64 = 1e-8;
pub const TP_TOLERANCE: f64 = 1e-10;

/// Relative weights of the (sigma-, pi, sigma+) components of the stray
/// light.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationWeights {
    pub w_minus: f64,
    pub w_pi: f64,
    pub w_plus: f64,
}

impl PolarizationWeights {
    pub fn new(w_minus: f64, w_pi: f64, w_plus: f64) -> Result<Self> {
        let w = Self { w_minus, w_pi, w_plus };
        w.validate()?;
        Ok(w)
    }

    /// Rescales non-negative raw weights to sum to one.
    pub fn normalized(w_minus: f64, w_pi: f64, w_plus: f64) -> Result<Self> {
        let s = w_minus + w_pi + w_plus;
        if !(s > 0.0) || w_minus < 0.0 || w_pi < 0.0 || w_plus < 0.0 {
            return Err(param("polarization weights must be >= 0 with a positive sum"));
        }
        Self::new(w_minus / s, w_pi / s, w_plus / s)
    }

    pub fn balanced() -> Self {
        Self { w_minus: 1.0 / 3.0, w_pi: 1.0 / 3.0, w_plus: 1.0 / 3.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let w = [self.w_minus, self.w_pi, self.w_plus];
        if w.iter().any(|x| !(*x >= 0.0)) {
            return Err(param("polarization weights must be >= 0"));
        }
        let s: f64 = w.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(param(format!("polarization weights sum to {s}, expected 1")));
        }
        Ok(())
    }

    /// Per-final-state rates out of `|1>, |2>, |3>` for scattering
    /// parameter `gamma`; balanced light gives `gamma` for each.
    pub fn bright_rates(&self, gamma: f64) -> [f64; 3] {
        [3.0 * self.w_pi * gamma, 3.0 * self.w_plus * gamma, 3.0 * self.w_minus * gamma]
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.w_minus, self.w_pi, self.w_plus]
    }
}

/// The five polarization mixtures of the imbalance study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationModel {
    Balanced,
    NoLeftCircular,
    NoRightCircular,
    NoLinear,
    LinearDoubleCircular,
}

impl PolarizationModel {
    pub const ALL: [PolarizationModel; 5] = [
        PolarizationModel::Balanced,
        PolarizationModel::NoLeftCircular,
        PolarizationModel::NoRightCircular,
        PolarizationModel::NoLinear,
        PolarizationModel::LinearDoubleCircular,
    ];

    pub fn weights(self) -> PolarizationWeights {
        let (m, p, q) = match self {
            PolarizationModel::Balanced => (1.0, 1.0, 1.0),
            PolarizationModel::NoLeftCircular => (0.0, 1.0, 1.0),
            PolarizationModel::NoRightCircular => (1.0, 1.0, 0.0),
            PolarizationModel::NoLinear => (1.0, 0.0, 1.0),
            PolarizationModel::LinearDoubleCircular => (1.0, 2.0, 1.0),
        };
        PolarizationWeights::normalized(m, p, q).expect("fixed weights are valid")
    }

    pub fn name(self) -> &'static str {
        match self {
            PolarizationModel::Balanced => "balanced",
            PolarizationModel::NoLeftCircular => "no_left_circular",
            PolarizationModel::NoRightCircular => "no_right_circular",
            PolarizationModel::NoLinear => "no_linear",
            PolarizationModel::LinearDoubleCircular => "linear_double_circular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Measurement,
    Reset,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Measurement => "measurement",
            ChannelKind::Reset => "reset",
        }
    }
}

fn default_polarization() -> [f64; 3] {
    [1.0 / 3.0; 3]
}

fn default_dark_branching() -> f64 {
    1.0 / 3.0
}

/// JSON description of a crosstalk channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub gamma_t: f64,
    /// `[w_minus, w_pi, w_plus]`.
    #[serde(default = "default_polarization")]
    pub polarization: [f64; 3],
    #[serde(default = "default_dark_branching")]
    pub dark_branching: f64,
}

impl ChannelConfig {
    pub fn measurement(gamma_t: f64) -> Self {
        Self {
            kind: ChannelKind::Measurement,
            gamma_t,
            polarization: default_polarization(),
            dark_branching: default_dark_branching(),
        }
    }

    pub fn reset(gamma_t: f64) -> Self {
        Self { kind: ChannelKind::Reset, ..Self::measurement(gamma_t) }
    }

    pub fn weights(&self) -> Result<PolarizationWeights> {
        let [m, p, q] = self.polarization;
        PolarizationWeights::new(m, p, q)
    }

    pub fn build(&self) -> Result<LeakageChannel> {
        let w = self.weights()?;
        match self.kind {
            ChannelKind::Measurement => measurement_crosstalk(self.gamma_t, &w),
            ChannelKind::Reset => reset_crosstalk(self.gamma_t, &w, self.dark_branching),
        }
    }
}

/// A trace-preserving channel with no coupling between computational and
/// cross operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageChannel {
    superop: SuperOperator,
    lambda_c_to_e: [f64; 2],
    lambda_e_to_c: [f64; 2],
}

impl LeakageChannel {
    pub fn new(superop: SuperOperator) -> Result<Self> {
        let tp = superop.trace_preservation_error();
        if tp > TP_TOLERANCE {
            return Err(Error::AssumptionViolation(vec![("trace preservation".into(), tp)]));
        }
        let mut bad = Vec::new();
        for c in COMPUTATIONAL {
            for x in CROSS {
                let m = superop.0[(x, c)].norm().max(superop.0[(c, x)].norm());
                if m > STRUCTURE_TOLERANCE {
                    bad.push((format!("computational {c} <-> cross {x}"), m));
                }
            }
        }
        if !bad.is_empty() {
            return Err(Error::AssumptionViolation(bad));
        }
        let m = &superop.0;
        Ok(Self {
            superop,
            lambda_c_to_e: [m[(IDX_ID_E, IDX_ID_C)].re, m[(IDX_ID_E, IDX_Z_C)].re],
            lambda_e_to_c: [m[(IDX_ID_C, IDX_ID_E)].re, m[(IDX_Z_C, IDX_ID_E)].re],
        })
    }

    pub fn identity() -> Self {
        Self::new(SuperOperator::identity()).expect("identity is a valid channel")
    }

    pub fn from_kraus(kraus: &[Op4]) -> Result<Self> {
        Self::new(SuperOperator::from_kraus(kraus)?)
    }

    /// Channel applying `V_c ⊕ W_e` after incoherent, symmetric population
    /// exchange: computational level `a` leaks with probability `leak[a]`
    /// (split evenly over `|2>, |3>`), and each extra level returns to
    /// computational level `c` with probability `seep[c]`.
    pub fn incoherent(v: &Op2, w: &Op2, leak: [f64; 2], seep: [f64; 2]) -> Result<Self> {
        if leak.iter().chain(seep.iter()).any(|x| !(0.0..=1.0).contains(x)) || seep[0] + seep[1] > 1.0 {
            return Err(param("leak and seep probabilities must lie in [0, 1] with seep summing to <= 1"));
        }
        let r = |x: f64| C64::new(x.sqrt(), 0.0);
        let keep = Op2::new(r(1.0 - leak[0]), C64::new(0.0, 0.0), C64::new(0.0, 0.0), r(1.0 - leak[1]));
        let mut kraus = vec![direct_sum(&(v * keep), &(w * r(1.0 - seep[0] - seep[1])))];
        for a in 0..2 {
            for e in 2..4 {
                kraus.push(ket_bra(e, a) * r(leak[a] / 2.0));
                kraus.push(ket_bra(a, e) * r(seep[a]));
            }
        }
        Self::from_kraus(&kraus)
    }

    pub fn superop(&self) -> &SuperOperator {
        &self.superop
    }

    /// `λ^{c→e}_i` for `i ∈ {1, Z}`.
    pub fn lambda_c_to_e(&self) -> [f64; 2] {
        self.lambda_c_to_e
    }

    /// `λ^{e→c}_i` for `i ∈ {1, Z}`.
    pub fn lambda_e_to_c(&self) -> [f64; 2] {
        self.lambda_e_to_c
    }

    /// 4x4 block acting within the computational operators.
    pub fn computational_block(&self) -> [[f64; 4]; 4] {
        self.block(COMPUTATIONAL.start)
    }

    /// 4x4 block acting within the extra-subspace operators.
    pub fn extra_block(&self) -> [[f64; 4]; 4] {
        self.block(EXTRA.start)
    }

    fn block(&self, start: usize) -> [[f64; 4]; 4] {
        let mut b = [[0.0; 4]; 4];
        for (i, row) in b.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.superop.0[(start + i, start + j)].re;
            }
        }
        b
    }

    /// `other ∘ self`: this channel first, then `other`.
    pub fn then(&self, other: &LeakageChannel) -> Result<LeakageChannel> {
        Self::new(other.superop.after(&self.superop))
    }

    /// Raw unit-normalised Pauli decay `(M_XX + M_YY + M_ZZ) / 3`.
    pub fn pauli_decay(&self) -> f64 {
        let m = &self.superop.0;
        (m[(IDX_X_C, IDX_X_C)].re + m[(IDX_Y_C, IDX_Y_C)].re + m[(IDX_Z_C, IDX_Z_C)].re) / 3.0
    }
}

/// Channel for a rate model acting over time `t`: populations move through
/// the transfer matrix and each coherence `rho_ab` decays at half the summed
/// total scattering rates of `a` and `b`.
pub fn rate_channel(model: &RateModel, t: f64) -> Result<LeakageChannel> {
    let transfer = model.transfer_matrix(t)?;
    let s = model.total_scattering();
    let damp: Vec<f64> = s.iter().map(|x| (-x * t / 2.0).exp()).collect();
    let superop = SuperOperator::from_linear_map(|rho| {
        let mut out = Op4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                if a == b {
                    for src in 0..4 {
                        out[(b, b)] += rho[(src, src)] * transfer[(b, src)];
                    }
                } else {
                    out[(a, b)] = rho[(a, b)] * (damp[a] * damp[b]);
                }
            }
        }
        out
    });
    LeakageChannel::new(superop)
}

fn check_gamma_t(gamma_t: f64) -> Result<()> {
    if !(gamma_t >= 0.0) || !gamma_t.is_finite() {
        return Err(param(format!("gamma_t must be finite and >= 0, got {gamma_t}")));
    }
    Ok(())
}

/// Crosstalk from stray detection light with scattering parameter `gamma_t`.
/// `|0>` is untouched; the bright levels exchange population.
pub fn measurement_crosstalk(gamma_t: f64, pol: &PolarizationWeights) -> Result<LeakageChannel> {
    check_gamma_t(gamma_t)?;
    pol.validate()?;
    rate_channel(&RateModel::measurement(pol.bright_rates(gamma_t)), 1.0)
}

/// Crosstalk from stray reset light; a fraction `dark_branching` of the
/// scattered population lands in `|0>`.
pub fn reset_crosstalk(gamma_t: f64, pol: &PolarizationWeights, dark_branching: f64) -> Result<LeakageChannel> {
    check_gamma_t(gamma_t)?;
    pol.validate()?;
    rate_channel(&RateModel::reset(pol.bright_rates(gamma_t), dark_branching)?, 1.0)
}

/// Depolarizing channel of strength `p` on the computational subspace;
/// Pauli coefficients decay to `1 - p`, the extra subspace is untouched.
pub fn depolarizing_computational(p: f64) -> Result<LeakageChannel> {
    if !(0.0..=4.0 / 3.0).contains(&p) {
        return Err(param(format!("depolarizing strength must lie in [0, 4/3], got {p}")));
    }
    let zero = Op2::zeros();
    let id = Op2::identity();
    let mut kraus = vec![direct_sum(&(id * C64::new((1.0 - 0.75 * p).sqrt(), 0.0)), &id)];
    for k in 1..4 {
        kraus.push(direct_sum(&(pauli2(k) * C64::new((p / 4.0).sqrt(), 0.0)), &zero));
    }
    LeakageChannel::from_kraus(&kraus)
}

/// Checks that every coupling outside the incoherent leakage form is below
/// `STRUCTURE_TOLERANCE`, listing offenders otherwise.
pub fn validate_structure(ch: &LeakageChannel) -> Result<()> {
    let m = &ch.superop().0;
    let e_pauli = 5..8;
    let mut bad: Vec<(String, f64)> = Vec::new();
    let mut check = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>, what: &str| {
        let mut worst = 0.0f64;
        for r in rows.clone() {
            for c in cols.clone() {
                worst = worst.max(m[(r, c)].norm());
            }
        }
        if worst > STRUCTURE_TOLERANCE {
            bad.push((what.to_string(), worst));
        }
    };
    check(CROSS, COMPUTATIONAL, "computational -> cross");
    check(COMPUTATIONAL, CROSS, "cross -> computational");
    check(CROSS, EXTRA, "extra -> cross");
    check(EXTRA, CROSS, "cross -> extra");
    check(e_pauli.clone(), COMPUTATIONAL, "computational -> extra Pauli");
    check(COMPUTATIONAL, e_pauli, "extra Pauli -> computational");
    check(IDX_ID_E..IDX_ID_E + 1, IDX_X_C..IDX_Z_C, "X_c/Y_c -> 1_e");
    check(IDX_X_C..IDX_Z_C, IDX_ID_E..IDX_ID_E + 1, "1_e -> X_c/Y_c");
    let im = ch.superop().max_imaginary();
    if im > STRUCTURE_TOLERANCE {
        bad.push(("imaginary part".into(), im));
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::AssumptionViolation(bad))
    }
}

/// Coefficients of a twirled leakage channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwirledChannel {
    pub decay_base: f64,
    pub leakage: f64,
    pub seepage: f64,
    pub t_c: f64,
    pub t_e: f64,
    pub t_minus: f64,
}

impl TwirledChannel {
    fn from_superop(m: &SuperMatrix) -> Self {
        let decay_base = (m[(IDX_X_C, IDX_X_C)].re + m[(IDX_Y_C, IDX_Y_C)].re + m[(IDX_Z_C, IDX_Z_C)].re) / 3.0;
        let leakage = m[(IDX_ID_E, IDX_ID_C)].re;
        let seepage = m[(IDX_ID_C, IDX_ID_E)].re;
        Self {
            decay_base,
            leakage,
            seepage,
            t_c: m[(IDX_ID_C, IDX_ID_C)].re,
            t_e: m[(IDX_ID_E, IDX_ID_E)].re,
            t_minus: 1.0 - leakage - seepage,
        }
    }

    /// Closed-form block on `{1_c, X_c, Y_c, Z_c, 1_e}`:
    /// `r P_c + t_c |1_c><1_c| + L |1_e><1_c| + S |1_c><1_e| + t_e |1_e><1_e|`.
    pub fn rb_block(&self) -> [[f64; 5]; 5] {
        let mut b = [[0.0; 5]; 5];
        b[0][0] = self.t_c;
        for (k, row) in b.iter_mut().enumerate().take(4).skip(1) {
            row[k] = self.decay_base;
        }
        b[4][0] = self.leakage;
        b[0][4] = self.seepage;
        b[4][4] = self.t_e;
        b
    }

    pub fn average_error(&self) -> f64 {
        (1.0 - self.decay_base + self.leakage) / 2.0
    }
}

/// `(1/24) sum_g D_g Λ D_g^†` over the Clifford superoperators.
pub fn twirl_superop(ch: &LeakageChannel) -> SuperOperator {
    let mut acc = SuperMatrix::zeros();
    for g in 0..clifford::GROUP_ORDER {
        let d = &clifford::superop(g).0;
        acc += d * ch.superop().0 * d.adjoint();
    }
    SuperOperator(acc / C64::new(clifford::GROUP_ORDER as f64, 0.0))
}

/// 5x5 block of a superoperator on `{1_c, X_c, Y_c, Z_c, 1_e}`.
pub fn rb_block_of(s: &SuperOperator) -> [[f64; 5]; 5] {
    let idx = [IDX_ID_C, IDX_X_C, IDX_Y_C, IDX_Z_C, IDX_ID_E];
    let mut b = [[0.0; 5]; 5];
    for (i, r) in idx.iter().enumerate() {
        for (j, c) in idx.iter().enumerate() {
            b[i][j] = s.0[(*r, *c)].re;
        }
    }
    b
}

/// Twirls a channel of the incoherent leakage form.
pub fn twirl(ch: &LeakageChannel) -> Result<TwirledChannel> {
    validate_structure(ch)?;
    Ok(TwirledChannel::from_superop(&twirl_superop(ch).0))
}

/// Twirl coefficients read directly off the untwirled channel: the Pauli
/// trace, `L`, `S` and the two identity diagonals are all twirl-invariant.
pub fn closed_form_twirl(ch: &LeakageChannel) -> Result<TwirledChannel> {
    validate_structure(ch)?;
    Ok(TwirledChannel::from_superop(&ch.superop().0))
}

/// Eigen-decomposition of the leakage/seepage transfer matrix
/// `[[1-L, S], [L, 1-S]] = t_+ Π_+ + t_- Π_-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEigensystem {
    pub t_plus: f64,
    pub t_minus: f64,
    /// `None` when `L = S = 0` and the projectors are undefined.
    pub pi_plus: Option<[[f64; 2]; 2]>,
    pub pi_minus: Option<[[f64; 2]; 2]>,
}

pub fn transfer_block(leakage: f64, seepage: f64) -> [[f64; 2]; 2] {
    [[1.0 - leakage, seepage], [leakage, 1.0 - seepage]]
}

pub fn decay_eigensystem(leakage: f64, seepage: f64) -> Result<DecayEigensystem> {
    if !(0.0..=1.0).contains(&leakage) || !(0.0..=1.0).contains(&seepage) {
        return Err(param("leakage and seepage must lie in [0, 1]"));
    }
    let t_minus = 1.0 - leakage - seepage;
    let sum = leakage + seepage;
    let (pi_plus, pi_minus) = if sum > 0.0 {
        let (l, s) = (leakage / sum, seepage / sum);
        (Some([[s, s], [l, l]]), Some([[l, -s], [-l, s]]))
    } else {
        (None, None)
    };
    Ok(DecayEigensystem { t_plus: 1.0, t_minus, pi_plus, pi_minus })
}

/// `(L, S)` from the trace definitions `L = ½Tr(Λ[1_c] 1_e)`,
/// `S = ½Tr(Λ[1_e] 1_c)`.
pub fn leakage_seepage(ch: &LeakageChannel) -> (f64, f64) {
    let id_c = direct_sum(&Op2::identity(), &Op2::zeros());
    let id_e = direct_sum(&Op2::zeros(), &Op2::identity());
    let l = (ch.superop().apply_operator(&id_c) * id_e).trace().re / 2.0;
    let s = (ch.superop().apply_operator(&id_e) * id_c).trace().re / 2.0;
    (l, s)
}

/// Average infidelity over computational pure states, `(1 - r + L) / 2`
/// with the raw Pauli decay and trace-definition leakage.
pub fn average_infidelity(ch: &LeakageChannel) -> f64 {
    let (l, _) = leakage_seepage(ch);
    (1.0 - ch.pauli_decay() + l) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gamma_is_identity() {
        for ch in [
            measurement_crosstalk(0.0, &PolarizationWeights::balanced()).unwrap(),
            reset_crosstalk(0.0, &PolarizationWeights::balanced(), 1.0 / 3.0).unwrap(),
        ] {
            assert!((ch.superop().0 - SuperMatrix::identity()).camax() < 1e-14);
        }
    }

    #[test]
    fn balanced_measurement_leakage_closed_form() {
        let gt = 0.5;
        let ch = measurement_crosstalk(gt, &PolarizationWeights::balanced()).unwrap();
        let (l, s) = leakage_seepage(&ch);
        // Only |1> leaks; half the computational identity sits there.
        let want = (1.0 - (-3.0 * gt).exp()) / 3.0;
        assert!((l - want).abs() < 1e-12);
        assert!((l - s).abs() < 1e-12);
    }

    #[test]
    fn hand_built_leak_gives_half() {
        let mut kraus = vec![ket_bra(0, 0), ket_bra(2, 1), ket_bra(2, 2), ket_bra(3, 3)];
        kraus.truncate(4);
        let ch = LeakageChannel::from_kraus(&kraus).unwrap();
        let (l, _) = leakage_seepage(&ch);
        assert!((l - 0.5).abs() < 1e-14);
    }

    #[test]
    fn supervector_and_trace_definitions_agree() {
        let ch = reset_crosstalk(0.2, &PolarizationModel::NoLeftCircular.weights(), 0.4).unwrap();
        let (l, s) = leakage_seepage(&ch);
        assert!((ch.superop().0[(IDX_ID_E, IDX_ID_C)].re - l).abs() < 1e-14);
        assert!((ch.superop().0[(IDX_ID_C, IDX_ID_E)].re - s).abs() < 1e-14);
    }

    #[test]
    fn identity_twirl() {
        let t = twirl(&LeakageChannel::identity()).unwrap();
        assert!((t.decay_base - 1.0).abs() < 1e-14);
        assert!(t.leakage.abs() < 1e-14 && t.seepage.abs() < 1e-14);
        assert!((t.t_minus - 1.0).abs() < 1e-14);
    }

    #[test]
    fn depolarizing_twirl() {
        let t = twirl(&depolarizing_computational(0.03).unwrap()).unwrap();
        assert!((t.decay_base - 0.97).abs() < 1e-13);
        assert!(t.leakage.abs() < 1e-14);
    }

    #[test]
    fn uneven_polarization_violates_twirl_form() {
        let ch = measurement_crosstalk(0.1, &PolarizationModel::NoLeftCircular.weights()).unwrap();
        assert!(matches!(twirl(&ch), Err(Error::AssumptionViolation(_))));
    }

    #[test]
    fn eigensystem_examples() {
        let e = decay_eigensystem(0.1, 0.1).unwrap();
        assert!((e.t_minus - 0.8).abs() < 1e-15);
        assert_eq!(e.pi_plus.unwrap(), [[0.5, 0.5], [0.5, 0.5]]);
        let e = decay_eigensystem(0.2, 0.0).unwrap();
        assert_eq!(e.pi_plus.unwrap(), [[0.0, 0.0], [1.0, 1.0]]);
        let e = decay_eigensystem(0.0, 0.0).unwrap();
        assert!(e.pi_plus.is_none());
        assert_eq!(e.t_minus, 1.0);
    }

    #[test]
    fn channel_config_json() {
        let c: ChannelConfig = serde_json::from_str(r#"{"kind":"reset","gamma_t":0.01}"#).unwrap();
        assert_eq!(c.kind, ChannelKind::Reset);
        assert_eq!(c.dark_branching, 1.0 / 3.0);
        let ch = c.build().unwrap();
        let (l, s) = leakage_seepage(&ch);
        assert!(l <= s);
        assert!(serde_json::from_str::<ChannelConfig>(r#"{"kind":"reset","gamma_t":0.01,"x":1}"#).is_err());
    }
}
