//! Seeded generation of true and estimated channel matrices.
//!
//! Every user link is i.i.d. Rayleigh, CN(0, 1) per entry. The BS–relay link
//! is Rician with a rank-one line-of-sight part known exactly at the BS, so
//! CSIT error only touches its scattered component. For a link with CSIT
//! quality ε the true channel is `ε·estimate + √(1−ε²)·error`, with estimate and
//! error independent CN(0, 1).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::{CsitModel, SystemConfig};

pub type Complex64 = Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Departure angle of the BS array line-of-sight steering vector.
pub const LOS_DEPARTURE_DEG: f64 = 30.0;
/// Arrival angle at the relay array.
pub const LOS_ARRIVAL_DEG: f64 = 45.0;

/// All channel matrices for one Monte Carlo draw.
///
/// Columns index receivers: column k of `h_bs_users` is h_{b,k} (length N),
/// column l of `h_bs_relay` is the BS channel to relay antenna l, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// N×K, BS → BS users.
    pub h_bs_users: CMatrix,
    pub h_bs_users_est: CMatrix,
    /// N×M, BS → relay antennas.
    pub h_bs_relay: CMatrix,
    pub h_bs_relay_est: CMatrix,
    /// M×L, relay → relay users.
    pub h_relay_rus: CMatrix,
    pub h_relay_rus_est: CMatrix,
    /// M×K, relay → BS users. Never estimated: the relay does not beamform
    /// toward BS users.
    pub h_relay_bus: CMatrix,
    /// CSIT quality used for the BS-side links (driven by P₁).
    pub epsilon_bs: f64,
    /// CSIT quality used for the relay-side links (driven by P₂).
    pub epsilon_relay: f64,
}

/// CSIT quality ε for a link transmitted at `power` (linear).
pub fn effective_epsilon(config: &SystemConfig, power: f64) -> f64 {
    match config.csit_model {
        CsitModel::Constant { epsilon } => epsilon,
        CsitModel::Scaling { tau } => (1.0 - power.powf(-tau)).clamp(0.0, 1.0).sqrt(),
    }
}

/// Matrix of i.i.d. CN(0, 1) entries, filled column by column.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
    })
}

/// `ε·estimate + √(1−ε²)·error`.
pub fn combine_csit(estimate: &CMatrix, error: &CMatrix, epsilon: f64) -> CMatrix {
    let a = (epsilon * epsilon).sqrt();
    let b = (1.0 - epsilon * epsilon).max(0.0).sqrt();
    estimate.map(|z| z * a).zip_map(error, |x, e| x + e * b)
}

/// Returns `(true, estimate)` for a Rayleigh link. Draws the estimate first,
/// then the error.
pub fn sample_rayleigh_with_csit<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    epsilon: f64,
    rng: &mut R,
) -> (CMatrix, CMatrix) {
    let estimate = complex_gaussian_matrix(rows, cols, rng);
    let error = complex_gaussian_matrix(rows, cols, rng);
    (combine_csit(&estimate, &error, epsilon), estimate)
}

fn ula_steering(len: usize, angle_deg: f64) -> CVector {
    // half-wavelength spacing: phase step π·sin θ
    let step = PI * angle_deg.to_radians().sin();
    CVector::from_fn(len, |i, _| Complex64::from_polar(1.0, step * i as f64))
}

/// Rank-one line-of-sight matrix `a_t · a_rᴴ` with unit-modulus entries.
pub fn los_matrix(n: usize, m: usize) -> CMatrix {
    let at = ula_steering(n, LOS_DEPARTURE_DEG);
    let ar = ula_steering(m, LOS_ARRIVAL_DEG);
    &at * ar.adjoint()
}

/// Returns `(true, estimate)` for the Rician BS–relay link.
pub fn sample_rician_with_csit<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rician_factor: f64,
    epsilon: f64,
    rng: &mut R,
) -> (CMatrix, CMatrix) {
    let (nlos, nlos_est) = sample_rayleigh_with_csit(n, m, epsilon, rng);
    let los_gain = (rician_factor / (rician_factor + 1.0)).sqrt();
    let nlos_gain = (1.0 / (rician_factor + 1.0)).sqrt();
    let los = los_matrix(n, m) * Complex64::from(los_gain);
    let truth = &los + nlos * Complex64::from(nlos_gain);
    let estimate = los + nlos_est * Complex64::from(nlos_gain);
    (truth, estimate)
}

/// Independent RNG stream for realization `index` under `seed`.
pub fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws every matrix of one realization. A pure function of
/// `(config, index)`.
pub fn draw_realization(config: &SystemConfig, index: u64) -> ChannelRealization {
    let mut rng = realization_rng(config.seed, index);
    let (n, m, k, l) = (
        config.n_bs_antennas,
        config.n_relay_antennas,
        config.n_bs_users,
        config.n_relay_users,
    );
    let epsilon_bs = effective_epsilon(config, config.p1);
    let epsilon_relay = effective_epsilon(config, config.p2);

    let (h_bs_users, h_bs_users_est) = sample_rayleigh_with_csit(n, k, epsilon_bs, &mut rng);
    let (h_bs_relay, h_bs_relay_est) =
        sample_rician_with_csit(n, m, config.rician_factor, epsilon_bs, &mut rng);
    let (h_relay_rus, h_relay_rus_est) = sample_rayleigh_with_csit(m, l, epsilon_relay, &mut rng);
    let h_relay_bus = complex_gaussian_matrix(m, k, &mut rng);

    ChannelRealization {
        h_bs_users,
        h_bs_users_est,
        h_bs_relay,
        h_bs_relay_est,
        h_relay_rus,
        h_relay_rus_est,
        h_relay_bus,
        epsilon_bs,
        epsilon_relay,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::db_to_linear;

    fn mean_power(mats: &[CMatrix]) -> (f64, f64) {
        let vals: Vec<f64> = mats.iter().flat_map(|m| m.iter().map(|z| z.norm_sqr())).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn epsilon_models() {
        let scaling = SystemConfig::default().with_csit(CsitModel::Scaling { tau: 0.1 });
        assert_eq!(effective_epsilon(&scaling, 1.0), 0.0);
        let want = (1.0 - 10f64.powf(-0.4)).sqrt();
        assert!((effective_epsilon(&scaling, 1e4) - want).abs() < 1e-15);
        assert!((want - 0.7756).abs() < 1e-3);
        let constant = SystemConfig::default().with_csit(CsitModel::Constant { epsilon: 0.3 });
        assert_eq!(effective_epsilon(&constant, 1e4), 0.3);
        assert_eq!(effective_epsilon(&constant, 0.5), 0.3);
        // below 0 dB the scaling formula would go negative; clamped
        assert_eq!(effective_epsilon(&scaling, 0.5), 0.0);
    }

    #[test]
    fn epsilon_monotone_in_power() {
        let cfg = SystemConfig::default().with_csit(CsitModel::Scaling { tau: 0.1 });
        let mut last = -1.0;
        for db in 0..=60 {
            let e = effective_epsilon(&cfg, db_to_linear(f64::from(db)));
            assert!(e >= last);
            last = e;
        }
    }

    #[test]
    fn perfect_csit_gives_identical_estimate() {
        let mut rng = realization_rng(7, 0);
        let (t, e) = sample_rayleigh_with_csit(6, 3, 1.0, &mut rng);
        assert_eq!(t, e);
    }

    #[test]
    fn reconstruction_is_exact() {
        for &eps in &[0.0, 0.3, 0.77, 1.0] {
            let mut a = realization_rng(11, 5);
            let mut b = a.clone();
            let (truth, est) = sample_rayleigh_with_csit(5, 4, eps, &mut a);
            let est2 = complex_gaussian_matrix(5, 4, &mut b);
            let err = complex_gaussian_matrix(5, 4, &mut b);
            assert_eq!(est, est2);
            assert_eq!(truth, combine_csit(&est2, &err, eps));
        }
    }

    #[test]
    fn csit_correlation_matches_epsilon() {
        let rows = 8;
        let draws = 10_000;
        let mut rng = realization_rng(3, 0);
        for &eps in &[0.0, 0.6] {
            let samples: Vec<f64> = (0..draws)
                .map(|_| {
                    let (t, e) = sample_rayleigh_with_csit(rows, 1, eps, &mut rng);
                    (e.adjoint() * t)[(0, 0)].re / rows as f64
                })
                .collect();
            let mean = samples.iter().sum::<f64>() / draws as f64;
            let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / draws as f64;
            let se = (var / draws as f64).sqrt();
            assert!((mean - eps).abs() < 3.0 * se, "eps {eps}: mean {mean} se {se}");
        }
    }

    #[test]
    fn rayleigh_unit_power() {
        let mut rng = realization_rng(21, 0);
        let mats: Vec<CMatrix> = (0..2500).map(|_| sample_rayleigh_with_csit(4, 1, 0.4, &mut rng).0).collect();
        let (mean, se) = mean_power(&mats);
        assert!((mean - 1.0).abs() < 4.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn los_matrix_properties() {
        let one = los_matrix(1, 1);
        assert!((one[(0, 0)].norm() - 1.0).abs() < 1e-15);
        let four = los_matrix(4, 4);
        assert!((four.norm_squared() - 16.0).abs() < 1e-12);
        assert_eq!(los_matrix(16, 8), los_matrix(16, 8));
        let svd = los_matrix(16, 8).svd(false, false);
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((s[0] - (16.0f64 * 8.0).sqrt()).abs() < 1e-9);
        assert!(s[1] < 1e-10);
    }

    #[test]
    fn rician_limits() {
        let mut rng = realization_rng(2, 0);
        let (t, e) = sample_rician_with_csit(16, 8, 1e9, 0.3, &mut rng);
        let los = los_matrix(16, 8);
        assert!((t - &los).iter().all(|z| z.norm() < 1e-4));
        assert!((e - &los).iter().all(|z| z.norm() < 1e-4));

        // K_R = 0 consumes the RNG exactly like the Rayleigh sampler
        let mut a = realization_rng(9, 1);
        let mut b = a.clone();
        assert_eq!(
            sample_rician_with_csit(6, 3, 0.0, 0.5, &mut a),
            sample_rayleigh_with_csit(6, 3, 0.5, &mut b)
        );
    }

    #[test]
    fn rician_unit_power() {
        for &kr in &[0.0, 1.0, 10.0] {
            let mut rng = realization_rng(4, 0);
            let mats: Vec<CMatrix> =
                (0..10_000).map(|_| sample_rician_with_csit(1, 1, kr, 0.3, &mut rng).0).collect();
            let (mean, se) = mean_power(&mats);
            assert!((mean - 1.0).abs() < 4.0 * se, "K_R {kr}: {mean} ± {se}");
        }
    }

    #[test]
    fn realization_is_deterministic() {
        let cfg = SystemConfig { seed: 42, ..SystemConfig::default() };
        assert_eq!(draw_realization(&cfg, 3), draw_realization(&cfg, 3));
        assert_ne!(draw_realization(&cfg, 3), draw_realization(&cfg, 4));
        let r = draw_realization(&cfg, 0);
        assert_eq!(r.h_bs_users.shape(), (16, 8));
        assert_eq!(r.h_bs_relay.shape(), (16, 8));
        assert_eq!(r.h_relay_rus.shape(), (8, 8));
        assert_eq!(r.h_relay_bus.shape(), (8, 8));
    }

    #[test]
    fn perfect_csit_realization() {
        let cfg = SystemConfig::default().with_csit(CsitModel::Constant { epsilon: 1.0 });
        let r = draw_realization(&cfg, 1);
        assert_eq!(r.h_bs_users, r.h_bs_users_est);
        assert_eq!(r.h_bs_relay, r.h_bs_relay_est);
        assert_eq!(r.h_relay_rus, r.h_relay_rus_est);
    }

    #[test]
    fn realizations_are_uncorrelated_across_indices() {
        let cfg = SystemConfig { seed: 5, ..SystemConfig::default() };
        let pairs = 2000;
        let samples: Vec<f64> = (0..pairs)
            .map(|i| {
                let a = draw_realization(&cfg, 2 * i);
                let b = draw_realization(&cfg, 2 * i + 1);
                (a.h_bs_users[(0, 0)].conj() * b.h_bs_users[(0, 0)]).re
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / pairs as f64;
        // each product has variance 1/2
        let se = (0.5 / pairs as f64).sqrt();
        assert!(mean.abs() < 4.0 * se, "{mean}");
    }
}
