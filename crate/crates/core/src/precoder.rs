//! Zero-forcing private precoders and dominant-eigenvector common precoders,
//! all designed on estimated channels.

use nalgebra::DMatrix;

use crate::channel::{CMatrix, CVector, ChannelRealization, Complex64};
use crate::config::SystemConfig;
use crate::error::{domain, Error, Result};

/// Singular-value ratio below which a channel stack is considered rank
/// deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Relative magnitude an entry needs to anchor the phase of a common precoder.
const PHASE_ANCHOR_TOLERANCE: f64 = 1e-8;

/// Relative tolerance for treating two singular values as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Every precoding vector used in both phases. All columns have unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    /// p_{c,b}, length N.
    pub bs_common: CVector,
    /// N×(K+L): BU columns first, then the relay-stream columns.
    pub bs_private: CMatrix,
    /// p_{c,r}, length M. All zeros when there are no relay users.
    pub relay_common: CVector,
    /// M×L.
    pub relay_private: CMatrix,
}

/// ZF precoders for the column stack `estimates` (one column per receiver).
///
/// Column g of the result is orthogonal to every other receiver's estimated
/// channel and has unit norm.
pub fn zf_precoders(estimates: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = estimates.shape();
    if cols == 0 {
        return Ok(CMatrix::zeros(rows, 0));
    }
    if cols > rows {
        return Err(domain(
            "zf_precoders",
            format!("{cols} streams cannot be zero-forced with {rows} antennas"),
        ));
    }
    // Ĥ (ĤᴴĤ)⁻¹ = U Σ⁻¹ Vᴴ for the thin SVD Ĥ = U Σ Vᴴ.
    let svd = estimates.clone().svd(true, true);
    let s = &svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    if !(smax > 0.0) || smin / smax < RANK_TOLERANCE {
        let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
        return Err(Error::Singular { ratio });
    }
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᴴ");
    let inv_s = DMatrix::from_diagonal(&s.map(|x| Complex64::from(1.0 / x)));
    let mut p = u * inv_s * v_t;
    for mut col in p.column_iter_mut() {
        let norm = col.norm();
        col /= Complex64::from(norm);
    }
    Ok(p)
}

/// Dominant left singular vector of `estimates`: the unit `u` maximizing
/// ‖uᴴĤ‖.
///
/// Ties between equal singular values go to the lowest index; the phase is
/// fixed so the first non-negligible entry is real and positive.
pub fn common_precoder(estimates: &CMatrix) -> Result<CVector> {
    if estimates.is_empty() || estimates.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(domain("common_precoder", "channel matrix is all zeros"));
    }
    let svd = estimates.clone().svd(true, false);
    let s = &svd.singular_values;
    let smax = s.max();
    let best = s
        .iter()
        .position(|&v| v >= smax * (1.0 - TIE_TOLERANCE))
        .expect("non-empty spectrum");
    let u = svd.u.expect("requested U");
    let mut v: CVector = u.column(best).into_owned();
    anchor_phase(&mut v);
    Ok(v)
}

fn anchor_phase(v: &mut CVector) {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(anchor) = v.iter().find(|z| z.norm() > PHASE_ANCHOR_TOLERANCE * peak) {
        let rot = anchor.conj() / anchor.norm();
        *v *= rot;
    }
}

/// Builds all precoders of one realization from its estimated channels.
///
/// The BS zero-forces over the K user estimates plus the first L columns of
/// the BS–relay estimate (the relay's serving antennas). The BS common
/// precoder only sees the BU estimates; the relay designs both of its
/// precoders on the relay-user estimates.
pub fn build_precoders(realization: &ChannelRealization, config: &SystemConfig) -> Result<PrecoderSet> {
    let (n, m, k, l) = (
        config.n_bs_antennas,
        config.n_relay_antennas,
        config.n_bs_users,
        config.n_relay_users,
    );
    let mut stack = CMatrix::zeros(n, k + l);
    stack.columns_mut(0, k).copy_from(&realization.h_bs_users_est);
    stack
        .columns_mut(k, l)
        .copy_from(&realization.h_bs_relay_est.columns(0, l));

    let bs_private = zf_precoders(&stack)?;
    let bs_common = common_precoder(&realization.h_bs_users_est)?;
    let (relay_private, relay_common) = if l == 0 {
        (CMatrix::zeros(m, 0), CVector::zeros(m))
    } else {
        (
            zf_precoders(&realization.h_relay_rus_est)?,
            common_precoder(&realization.h_relay_rus_est)?,
        )
    };
    Ok(PrecoderSet {
        bs_common,
        bs_private,
        relay_common,
        relay_private,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{complex_gaussian_matrix, draw_realization, realization_rng};
    use crate::config::CsitModel;
    use proptest::prelude::*;

    fn max_leakage(h: &CMatrix, p: &CMatrix) -> f64 {
        let g = h.adjoint() * p;
        let mut worst: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                if i != j {
                    worst = worst.max(g[(i, j)].norm());
                }
            }
        }
        worst
    }

    #[test]
    fn single_column_is_matched_filter() {
        let mut rng = realization_rng(1, 0);
        let h = complex_gaussian_matrix(6, 1, &mut rng);
        let p = zf_precoders(&h).unwrap();
        let want = &h / Complex64::from(h.norm());
        assert!((p - want).norm() < 1e-12);
    }

    #[test]
    fn orthonormal_input_is_returned() {
        let mut rng = realization_rng(2, 0);
        let a = complex_gaussian_matrix(5, 5, &mut rng);
        let q = a.qr().q();
        let cols = q.columns(0, 3).into_owned();
        let p = zf_precoders(&cols).unwrap();
        assert!((p - cols).norm() < 1e-12);
    }

    #[test]
    fn square_random_is_nulled() {
        let mut rng = realization_rng(3, 0);
        let h = complex_gaussian_matrix(16, 16, &mut rng);
        let p = zf_precoders(&h).unwrap();
        assert!(max_leakage(&h, &p) <= 1e-8);
        for c in p.column_iter() {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let mut rng = realization_rng(4, 0);
        let a = complex_gaussian_matrix(6, 1, &mut rng);
        let h = CMatrix::from_columns(&[a.column(0).into_owned(), a.column(0) * Complex64::new(0.0, 2.0)]);
        assert!(matches!(zf_precoders(&h), Err(Error::Singular { .. })));
        assert!(zf_precoders(&complex_gaussian_matrix(3, 4, &mut rng)).is_err());
    }

    #[test]
    fn common_precoder_rank_one() {
        let mut rng = realization_rng(5, 0);
        let a = complex_gaussian_matrix(8, 1, &mut rng);
        let b = complex_gaussian_matrix(4, 1, &mut rng);
        let u = common_precoder(&(&a * b.adjoint())).unwrap();
        let mut want: CVector = a.column(0) / Complex64::from(a.norm());
        anchor_phase(&mut want);
        assert!((u - want).norm() < 1e-10);
    }

    #[test]
    fn common_precoder_identity_picks_basis_vector() {
        let u = common_precoder(&CMatrix::identity(4, 4)).unwrap();
        let hits: Vec<usize> = (0..4).filter(|&i| (u[i].norm() - 1.0).abs() < 1e-12).collect();
        assert_eq!(hits.len(), 1);
        assert!((u[hits[0]] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn common_precoder_rejects_zero() {
        assert!(common_precoder(&CMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn common_precoder_maximizes_projection() {
        let mut rng = realization_rng(6, 0);
        let h = complex_gaussian_matrix(16, 8, &mut rng);
        let u = common_precoder(&h).unwrap();
        let gain = (u.adjoint() * &h).norm();
        let smax = h.singular_values().max();
        assert!((gain - smax).abs() < 1e-9 * smax);
        assert!((u.norm() - 1.0).abs() < 1e-12);
        assert!(u[0].im.abs() < 1e-15 && u[0].re > 0.0);
    }

    #[test]
    fn built_precoders_have_unit_norm_and_null() {
        let cfg = SystemConfig { seed: 17, ..SystemConfig::default() };
        for idx in 0..5 {
            let r = draw_realization(&cfg, idx);
            let p = build_precoders(&r, &cfg).unwrap();
            assert_eq!(p.bs_private.shape(), (16, 16));
            assert_eq!(p.relay_private.shape(), (8, 8));
            for c in p.bs_private.column_iter().chain(p.relay_private.column_iter()) {
                assert!((c.norm() - 1.0).abs() < 1e-9);
            }
            assert!((p.bs_common.norm() - 1.0).abs() < 1e-9);
            assert!((p.relay_common.norm() - 1.0).abs() < 1e-9);
            let mut stack = CMatrix::zeros(16, 16);
            stack.columns_mut(0, 8).copy_from(&r.h_bs_users_est);
            stack.columns_mut(8, 8).copy_from(&r.h_bs_relay_est);
            assert!(max_leakage(&stack, &p.bs_private) <= 1e-8);
            assert!(max_leakage(&r.h_relay_rus_est, &p.relay_private) <= 1e-8);
        }
    }

    #[test]
    fn no_relay_users_leaves_relay_idle() {
        let cfg = SystemConfig {
            n_bs_users: 1,
            n_relay_users: 0,
            csit_model: CsitModel::Constant { epsilon: 1.0 },
            ..SystemConfig::default()
        };
        let r = draw_realization(&cfg, 0);
        let p = build_precoders(&r, &cfg).unwrap();
        assert_eq!(p.bs_private.ncols(), 1);
        assert_eq!(p.relay_private.ncols(), 0);
        assert_eq!(p.relay_common.norm(), 0.0);
    }

    #[test]
    fn leakage_statistics_on_true_channels() {
        // Leakage onto true channels has mean (1 - eps^2); own gain mean is
        // N - G + 1 under perfect CSIT.
        let eps = 0.6;
        let cfg = SystemConfig {
            n_bs_antennas: 12,
            n_bs_users: 4,
            n_relay_users: 4,
            seed: 8,
            csit_model: CsitModel::Constant { epsilon: eps },
            ..SystemConfig::default()
        };
        let mut leak = Vec::new();
        for idx in 0..400 {
            let r = draw_realization(&cfg, idx);
            let p = build_precoders(&r, &cfg).unwrap();
            let g = r.h_bs_users.adjoint() * p.bs_private.columns(0, 4);
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        leak.push(g[(i, j)].norm_sqr());
                    }
                }
            }
        }
        let n = leak.len() as f64;
        let mean = leak.iter().sum::<f64>() / n;
        let sd = (leak.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!((mean - (1.0 - eps * eps)).abs() < 4.0 * sd / n.sqrt(), "{mean}");

        let perfect = SystemConfig { csit_model: CsitModel::Constant { epsilon: 1.0 }, ..cfg };
        let own: Vec<f64> = (0..1000)
            .map(|idx| {
                let r = draw_realization(&perfect, idx);
                let p = build_precoders(&r, &perfect).unwrap();
                (r.h_bs_users.column(0).adjoint() * p.bs_private.column(0))[(0, 0)].norm_sqr()
            })
            .collect();
        let m = own.iter().sum::<f64>() / own.len() as f64;
        // Gamma(5, 1): sd sqrt(5)
        assert!((m - 5.0).abs() < 4.0 * 5f64.sqrt() / (own.len() as f64).sqrt(), "{m}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn common_precoder_ignores_column_order(seed in 0u64..10_000, shift in 1usize..6) {
            let mut rng = realization_rng(seed, 0);
            let h = complex_gaussian_matrix(8, 6, &mut rng);
            let perm: Vec<_> = (0..6).map(|i| h.column((i + shift) % 6).into_owned()).collect();
            let hp = CMatrix::from_columns(&perm);
            let a = common_precoder(&h).unwrap();
            let b = common_precoder(&hp).unwrap();
            prop_assert!((a - b).norm() < 1e-9);
        }
    }
}
