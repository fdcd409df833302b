use num_complex::Complex64;
use num_rational::BigRational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use zeta_dqpt::circuit_sim::{evolution_apply, pi_scaled, AmplitudeState, FixedPointValue, LogOracle, Rounding};
use zeta_dqpt::dirichlet_engine::{
    alternating_partial_sum, direct_power_sum_dd, em_depth, em_min_start, euler_maclaurin_sum, partition_sum,
    SumWindow,
};
use zeta_dqpt::special_functions::{bernoulli, binomial, chi, log_gamma, rs_theta, rs_theta_dot};

#[test]
fn bernoulli_recurrence_exact() {
    for q in 1..=50u64 {
        let mut acc = BigRational::zero();
        for p in 0..=q {
            acc += BigRational::from_integer(binomial(q + 1, p)) * bernoulli(p as usize).unwrap();
        }
        assert!(acc.is_zero(), "q = {q}");
    }
}

#[test]
fn bernoulli_two_sided_bound() {
    // Near r = 25 the two sides differ by ~3^{-50} relatively, so compare
    // |B_2r| (2π)^{2r} / (2 (2r)!) exactly against a π enclosure.
    let bits = 400;
    let unit = BigRational::from_integer(BigInt::one() << bits);
    let pi_lo = BigRational::from_integer(pi_scaled(bits) - 1) / &unit;
    let pi_hi = BigRational::from_integer(pi_scaled(bits) + 1) / &unit;
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    for r in 1..=25u32 {
        let b = bernoulli(2 * r as usize).unwrap().abs();
        let fact: BigInt = (1..=2 * r as u64).map(BigInt::from).product();
        let scale = |pi: &BigRational| b.clone() * (&two * pi).pow(2 * r as i32) / (&two * BigRational::from_integer(fact.clone()));
        let lower = one.clone() / (&one - two.pow(-(2 * r as i32)));
        let upper = one.clone() / (&one - two.pow(1 - 2 * r as i32));
        assert!(scale(&pi_lo) > lower, "r = {r}");
        assert!(scale(&pi_hi) < upper, "r = {r}");
    }
}

#[test]
fn partition_density_approaches_limit() {
    for beta in [0.3, 0.5, 0.8] {
        let limit = (beta - 1.0) * std::f64::consts::LN_2;
        let gaps: Vec<f64> = (8..=20)
            .step_by(2)
            .map(|e| {
                let n = 1usize << e;
                let v = -partition_sum(beta, n).unwrap().ln() / (n as f64).log2();
                (v - limit).abs()
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "beta {beta}: {gaps:?}");
    }
}

#[test]
fn eta_modulus_bound() {
    let n = 1_000_000;
    for (beta, t) in [(0.5, 14.134725), (0.3, 100.0), (0.7, 5.0), (0.9, 2.0)] {
        let s = Complex64::new(beta, t);
        let v = alternating_partial_sum(s, n).unwrap().norm();
        let slack = 1.5 * ((n + 1) as f64).powf(-beta);
        assert!(v <= s.norm() / beta + slack);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_odd_and_derivative_even(t in 0.0f64..1e6) {
        prop_assert_eq!(rs_theta(-t), -rs_theta(t));
        prop_assert_eq!(rs_theta_dot(-t), rs_theta_dot(t));
    }

    #[test]
    fn log_gamma_recurrence(re in 0.05f64..6.0, im in -1e4f64..1e4) {
        let z = Complex64::new(re, im);
        let lhs = log_gamma(z + 1.0).unwrap();
        let rhs = log_gamma(z).unwrap() + z.ln();
        let d = lhs - rhs;
        let turns = (d.im / std::f64::consts::TAU).round();
        let scale = 1.0 + rhs.norm();
        prop_assert!(d.re.abs() <= 1e-12 * scale);
        prop_assert!((d.im - turns * std::f64::consts::TAU).abs() <= 1e-12 * scale);
    }

    #[test]
    fn fixed_point_rounding_error(x in -100.0f64..100.0, frac in 0u32..40) {
        let v = FixedPointValue::from_f64(x, 8, frac, Rounding::NearestEven).unwrap();
        prop_assert!((v.to_f64() - x).abs() <= 2f64.powi(-(frac as i32) - 1));
        let z = FixedPointValue::from_f64(x, 8, frac, Rounding::TowardZero).unwrap();
        prop_assert!(z.to_f64().abs() <= x.abs());
    }

    #[test]
    fn log_oracle_random_indices(n in 1u64..=(1 << 20), e in 4i32..30) {
        let eta = 2f64.powi(-e);
        let oracle = LogOracle::new(1 << 20, eta).unwrap();
        let v = oracle.evaluate(n).unwrap().to_f64();
        prop_assert!((v - (n as f64).log2()).abs() <= eta);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn chi_unimodular_on_critical_line(t in 1.0f64..1e6) {
        let c = chi(Complex64::new(0.5, t)).unwrap();
        prop_assert!((c.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn evolution_keeps_norm(t in -1e3f64..1e3, len in 2u64..2000) {
        let s = AmplitudeState::power_law(1, len, 0.5).unwrap();
        let e = evolution_apply(&s, t, 1e-6).unwrap();
        prop_assert!((e.state.norm_sqr() - 1.0).abs() <= 1e-14);
        prop_assert!(e.max_deviation <= e.bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn euler_maclaurin_within_half_eps(
        beta in prop_oneof![0.05f64..0.95, 1.05f64..3.0],
        offset in 0u64..500,
        len in 1u64..20_000,
        k in 0usize..3,
    ) {
        let eps = [1e-4, 1e-8, 1e-12][k];
        let a = em_min_start(beta, em_depth(eps)) + offset;
        let b = a + len;
        let em = euler_maclaurin_sum(SumWindow::new(a, b, beta).unwrap(), eps).unwrap();
        let diff = (em.value_dd - direct_power_sum_dd(a, b, beta)).to_f64();
        prop_assert!(diff.abs() < eps / 2.0, "a={} b={} beta={} eps={}", a, b, beta, eps);
    }
}
