//! Standard normal distribution function, density and quantile.
//!
//! The CDF is evaluated through a rational-approximation erfc
//! (Cody's CALERF scheme, relative error below 1e-15 in double
//! precision); the quantile uses Acklam's rational initializer refined
//! by one Newton step with the implemented CDF/PDF pair, which keeps the
//! two functions consistent to machine precision.

// Coefficients and reference values keep their published digits.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::numerics::Probability;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_68;

// Cody's rational coefficients for erf on |x| <= 0.46875.
const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_6e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_5e3,
    1.857_777_061_846_031_5e-1,
];
const ERF_B: [f64; 4] = [
    2.360_129_095_234_412_1e1,
    2.440_246_379_344_441_7e2,
    1.282_616_526_077_372_3e3,
    2.844_236_833_439_170_6e3,
];

// erfc on 0.46875 < x <= 4.
const ERFC_C: [f64; 9] = [
    5.641_884_969_886_700_9e-1,
    8.883_149_794_388_375_9e0,
    6.611_919_063_714_163e1,
    2.986_351_381_974_001_3e2,
    8.819_522_212_417_691e2,
    1.712_047_612_634_070_6e3,
    2.051_078_377_826_071_5e3,
    1.230_339_354_797_997_2e3,
    2.153_115_354_744_038_5e-8,
];
const ERFC_D: [f64; 8] = [
    1.574_492_611_070_983_5e1,
    1.176_939_508_913_125e2,
    5.371_811_018_620_098_6e2,
    1.621_389_574_566_690_2e3,
    3.290_799_235_733_459_7e3,
    4.362_619_090_143_247e3,
    3.439_367_674_143_721_6e3,
    1.230_339_354_803_749_4e3,
];

// erfc on x > 4, in terms of 1/x^2.
const ERFC_P: [f64; 6] = [
    3.053_266_349_612_323_4e-1,
    3.603_448_999_498_044_4e-1,
    1.257_817_261_112_292_5e-1,
    1.608_378_514_874_227_6e-2,
    6.587_491_615_298_378e-4,
    1.631_538_713_730_209_8e-2,
];
const ERFC_Q: [f64; 5] = [
    2.568_520_192_289_822_4e0,
    1.872_952_849_923_460_4e0,
    5.279_051_029_514_284_1e-1,
    6.051_834_131_244_131_9e-2,
    2.335_204_976_268_691_8e-3,
];

const FRAC_1_SQRT_PI: f64 = 5.641_895_835_477_562_9e-1;

/// erf(x) for |x| <= 0.46875.
fn erf_small(x: f64) -> f64 {
    let z = x * x;
    let mut num = ERF_A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + ERF_A[i]) * z;
        den = (den + ERF_B[i]) * z;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

/// exp(-y^2) with the argument split to limit cancellation, as in CALERF.
fn exp_neg_sq(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// Complementary error function, accurate over the full real line.
fn erfc(x: f64) -> f64 {
    let y = x.abs();
    let result = if y <= 0.46875 {
        return 1.0 - erf_small(x);
    } else if y <= 4.0 {
        let mut num = ERFC_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERFC_C[i]) * y;
            den = (den + ERFC_D[i]) * y;
        }
        exp_neg_sq(y) * (num + ERFC_C[7]) / (den + ERFC_D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut num = ERFC_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERFC_P[i]) * z;
            den = (den + ERFC_Q[i]) * z;
        }
        let tail = z * (num + ERFC_P[4]) / (den + ERFC_Q[4]);
        // Underflows to 0 beyond y ~ 26.6, which is the correct limit.
        exp_neg_sq(y) * (FRAC_1_SQRT_PI - tail) / y
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// Standard normal CDF on f64, total over the extended real line.
pub(crate) fn cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    // erfc keeps full relative accuracy in the tail that matters.
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density on f64.
pub(crate) fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

// Acklam's rational approximation to the normal quantile (relative
// error ~1.15e-9, refined below).
const ACK_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239e0,
];
const ACK_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const ACK_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838e0,
    -2.549_732_539_343_734e0,
    4.374_664_141_464_968e0,
    2.938_163_982_698_783e0,
];
const ACK_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996e0,
    3.754_408_661_907_416e0,
];

fn quantile_initial(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((ACK_C[0] * q + ACK_C[1]) * q + ACK_C[2]) * q + ACK_C[3]) * q + ACK_C[4]) * q
            + ACK_C[5])
            / ((((ACK_D[0] * q + ACK_D[1]) * q + ACK_D[2]) * q + ACK_D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((ACK_A[0] * r + ACK_A[1]) * r + ACK_A[2]) * r + ACK_A[3]) * r + ACK_A[4]) * r
            + ACK_A[5])
            * q
            / (((((ACK_B[0] * r + ACK_B[1]) * r + ACK_B[2]) * r + ACK_B[3]) * r + ACK_B[4]) * r
                + 1.0)
    } else {
        -quantile_initial(1.0 - p)
    }
}

/// Standard normal quantile on f64; requires `0 < p < 1`.
pub(crate) fn quantile(p: f64) -> f64 {
    let mut x = quantile_initial(p);
    // One Newton step against the implemented CDF pins the pair together.
    let err = cdf(x) - p;
    let d = pdf(x);
    if d > 0.0 {
        x -= err / d;
    }
    x
}

/// Standard normal distribution function Φ.
///
/// Absolute error below 1e-15; rejects non-finite input.
pub fn std_normal_cdf(x: f64) -> Result<Probability> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "standard normal CDF needs a finite argument, got {x}"
        )));
    }
    Ok(Probability::from_computed(cdf(x)))
}

/// Standard normal density φ.
pub fn std_normal_pdf(x: f64) -> f64 {
    pdf(x)
}

/// Inverse of [`std_normal_cdf`]; requires `p` strictly inside `(0, 1)`.
pub fn std_normal_quantile(p: Probability) -> Result<f64> {
    let v = p.value();
    if v <= 0.0 || v >= 1.0 {
        return Err(Error::Domain(format!(
            "standard normal quantile is defined on (0, 1), got {v}"
        )));
    }
    Ok(quantile(v))
}

#[cfg(test)]
#[allow(clippy::approx_constant)] // probes near sqrt(2) are intentional
mod tests {
    use super::*;

    // Reference values from a 40-digit erf evaluation.
    const CDF_REFERENCE: [(f64, f64); 13] = [
        (0.1, 0.539827837277028984),
        (0.46875, 0.680375828482882374),
        (0.5, 0.691462461274013104),
        (1.0, 0.841344746068542949),
        (1.5, 0.933192798731141934),
        (2.0, 0.977249868051820793),
        (3.0, 0.998650101968369905),
        (4.0, 0.999968328758166880),
        (5.0, 0.999999713348428121),
        (6.0, 0.999999999013412355),
        (-2.5, 0.00620966532577613517),
        (1.414214, 0.921350460702127619),
        (1.4142135623730951, 0.921350396474857447),
    ];

    #[test]
    fn cdf_matches_reference_to_1e15() {
        for &(x, want) in &CDF_REFERENCE {
            let got = std_normal_cdf(x).unwrap().value();
            assert!((got - want).abs() <= 1e-15, "Phi({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(std_normal_cdf(0.0).unwrap().value(), 0.5);
    }

    #[test]
    fn cdf_deep_left_tail() {
        // Tail bound from the erfc reference: Phi(-8) ~ 6.22e-16.
        let v = std_normal_cdf(-8.0).unwrap().value();
        assert!(v < 1e-14 && v > 0.0, "Phi(-8) = {v}");
        assert!((v - 6.220960574271784e-16).abs() < 1e-21);
        // Far tail keeps relative accuracy down to subnormal range.
        let far = std_normal_cdf(-37.6).unwrap().value();
        assert!((far / 1.07481124958704540e-309 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_rejects_non_finite() {
        assert!(std_normal_cdf(f64::NAN).is_err());
        assert!(std_normal_cdf(f64::INFINITY).is_err());
        assert!(std_normal_cdf(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn quantile_matches_reference() {
        let cases = [
            (0.001, -3.09023230616781354),
            (0.0013, -3.01145375849978402),
            (0.3, -0.524400512708040784),
            (0.75, 0.674489750196081743),
            (0.975, 1.95996398454005424),
            (0.999, 3.09023230616781354),
            (1e-10, -6.3613409024040562),
            (0.9987, 3.01145375849978402),
        ];
        for (p, want) in cases {
            let got = std_normal_quantile(Probability::new(p).unwrap()).unwrap();
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "quantile({p}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn quantile_of_half_is_zero() {
        let q = std_normal_quantile(Probability::new(0.5).unwrap()).unwrap();
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn quantile_rejects_endpoints() {
        assert!(std_normal_quantile(Probability::new(0.0).unwrap()).is_err());
        assert!(std_normal_quantile(Probability::new(1.0).unwrap()).is_err());
    }

    #[test]
    fn cdf_quantile_round_trip() {
        for &p in &[1e-9, 1e-4, 0.01, 0.3, 0.5, 0.7, 0.9987, 1.0 - 1e-9] {
            let x = std_normal_quantile(Probability::new(p).unwrap()).unwrap();
            let back = std_normal_cdf(x).unwrap().value();
            assert!((back - p).abs() <= 1e-12, "round trip at p={p}: got {back}");
        }
    }

    #[test]
    fn pdf_reference_values() {
        assert!((std_normal_pdf(0.0) - 0.398942280401432678).abs() < 1e-16);
        assert!((std_normal_pdf(1.0) - 0.24197072451914335).abs() < 1e-16);
        assert!((std_normal_pdf(-2.0) - 0.053990966513188052).abs() < 1e-16);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn cdf_symmetry(x in -40.0f64..40.0) {
            let a = cdf(x);
            let b = cdf(-x);
            prop_assert!((a + b - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn cdf_monotone(x in -40.0f64..40.0, step in 0.0f64..5.0) {
            prop_assert!(cdf(x) <= cdf(x + step));
        }

        #[test]
        fn quantile_inverts_cdf(p in 1e-12f64..1.0) {
            prop_assume!(p < 1.0);
            let x = quantile(p);
            prop_assert!((cdf(x) - p).abs() <= 1e-12);
        }
    }
}
