//! Scalar kernels that need cancellation-free evaluation.

/// `e^{-u} - 1 + u`, the integrand kernel of the branching mechanism.
///
/// Direct evaluation loses all significant digits for small `u`; below the
/// switch point a short Taylor series is exact to full double precision.
pub fn em1p(u: f64) -> f64 {
    debug_assert!(u >= 0.0);
    if u < 1e-2 {
        // u^2/2 - u^3/6 + u^4/24 - u^5/120 + u^6/720, truncation < 1e-18 rel.
        let u2 = u * u;
        u2 * (0.5 + u * (-1.0 / 6.0 + u * (1.0 / 24.0 + u * (-1.0 / 120.0 + u / 720.0))))
    } else {
        u + (-u).exp_m1()
    }
}

/// `ln(1-p) + p` (equals `-(p^2/2 + p^3/3 + ...)`), stable for small `p`.
pub fn ln1m_plus(p: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&p));
    if p < 1e-4 {
        let p2 = p * p;
        -p2 * (0.5 + p * (1.0 / 3.0 + p * (0.25 + p * 0.2)))
    } else {
        (-p).ln_1p() + p
    }
}

/// `ln(1+x) - x` (equals `-(x^2/2 - x^3/3 + ...)`), stable for small `x`.
pub fn ln1p_minus(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 1e-4 {
        let x2 = x * x;
        -x2 * (0.5 - x * (1.0 / 3.0 - x * 0.25))
    } else {
        x.ln_1p() - x
    }
}

/// `em1p(u) / u^2`, bounded by 1/2; tends to 1/2 as `u -> 0`.
pub fn em1p_ratio(u: f64) -> f64 {
    debug_assert!(u >= 0.0);
    if u == 0.0 {
        return 0.5;
    }
    if u < 1e-2 {
        0.5 + u * (-1.0 / 6.0 + u * (1.0 / 24.0 + u * (-1.0 / 120.0 + u / 720.0)))
    } else {
        em1p(u) / (u * u)
    }
}

/// `(ln(1-p) + p) / p^2`, i.e. `-(1/2 + p/3 + p^2/4 + ...)`.
pub fn ln1m_plus_ratio(p: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&p));
    if p < 1e-4 {
        -(0.5 + p * (1.0 / 3.0 + p * (0.25 + p * 0.2)))
    } else {
        ln1m_plus(p) / (p * p)
    }
}

/// `(ln(1+x) - x) / x^2`, i.e. `-(1/2 - x/3 + x^2/4 - ...)`.
pub fn ln1p_minus_ratio(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 1e-4 {
        -(0.5 - x * (1.0 / 3.0 - x * 0.25))
    } else {
        ln1p_minus(x) / (x * x)
    }
}

/// `1 - (1-p)^b - b p (1-p)^{b-1}`: probability that a binomial(b, p) draw
/// is at least 2. Stable down to `b p^2` scale.
pub fn prob_two_or_more(b: f64, p: f64) -> f64 {
    debug_assert!(b >= 0.0 && (0.0..=1.0).contains(&p));
    if p >= 1.0 {
        return 1.0;
    }
    if b < 2.0 {
        return 0.0;
    }
    // 1 - (1-p)^{b-1}(1 + (b-1)p) = -expm1((b-1)ln(1-p) + ln(1+(b-1)p)).
    let x = (b - 1.0) * p;
    let s = (b - 1.0) * ln1m_plus(p) + ln1p_minus(x);
    -s.exp_m1()
}

/// `prob_two_or_more(b, p) / p^2`, free of underflow/overflow for any `p` in
/// `(0, 1]`; tends to `C(b,2)` as `p -> 0`.
pub fn prob_two_or_more_ratio(b: f64, p: f64) -> f64 {
    debug_assert!(b >= 0.0 && 0.0 < p && p <= 1.0);
    if b < 2.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let bm = b - 1.0;
    let x = bm * p;
    let s_ratio = bm * ln1m_plus_ratio(p) + bm * bm * ln1p_minus_ratio(x); // s / p^2
    let s = s_ratio * p * p;
    if s.abs() < 1e-9 {
        // -expm1(s)/p^2 = -s/p^2 (1 + s/2 + ...)
        -s_ratio * (1.0 + 0.5 * s)
    } else {
        -s.exp_m1() / (p * p)
    }
}

/// `mean_excess_two_or_more(b, p) / p^2`; tends to `C(b,2)` as `p -> 0`.
pub fn mean_excess_ratio(b: f64, p: f64) -> f64 {
    debug_assert!(b >= 2.0 && 0.0 < p && p <= 1.0);
    if p >= 1.0 {
        return b - 1.0;
    }
    let w_over_p = if p < 1e-4 {
        b * (1.0 + p * (0.5 + p * (1.0 / 3.0 + p * 0.25)))
    } else {
        -b * (-p).ln_1p() / p
    };
    let w = w_over_p * p;
    let em_ratio = if w < 1e-2 {
        // em1p(w)/p^2 = (w/p)^2 (1/2 - w/6 + w^2/24 - ...)
        w_over_p * w_over_p * (0.5 + w * (-1.0 / 6.0 + w * (1.0 / 24.0 - w / 120.0)))
    } else {
        em1p(w) / (p * p)
    };
    em_ratio + b * ln1m_plus_ratio(p)
}

/// `b p - 1 + (1-p)^b`: the expectation `E[(K-1) 1_{K>=2}]` for `K ~ Bin(b, p)`.
/// This is the integrand of the Schweinsberg rate `sum_k (k-1) C(b,k) lambda_{b,k}`.
pub fn mean_excess_two_or_more(b: f64, p: f64) -> f64 {
    debug_assert!(b >= 2.0 && (0.0..=1.0).contains(&p));
    if p >= 1.0 {
        return b - 1.0;
    }
    // bp - 1 + e^{-w} with w = -b ln(1-p):
    //   = (e^{-w} - 1 + w) + (bp - w) = em1p(w) + b (ln(1-p) + p).
    let w = -b * (-p).ln_1p();
    em1p(w) + b * ln1m_plus(p)
}

/// Numerically stable log-sum: `ln(e^a + e^b)`.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn em1p_matches_direct_for_moderate_u() {
        for &u in &[0.05, 0.3, 1.0, 5.0, 40.0] {
            assert_relative_eq!(em1p(u), (-u).exp() - 1.0 + u, max_relative = 1e-13);
        }
    }

    #[test]
    fn em1p_small_u_series() {
        let u = 1e-6;
        assert_relative_eq!(em1p(u), u * u / 2.0 - u * u * u / 6.0, max_relative = 1e-12);
        assert_eq!(em1p(0.0), 0.0);
    }

    #[test]
    fn prob_two_or_more_small_p() {
        // ~ C(b,2) p^2 for small p.
        let b = 50.0;
        let p = 1e-7;
        let expect = b * (b - 1.0) / 2.0 * p * p;
        assert_relative_eq!(prob_two_or_more(b, p), expect, max_relative = 1e-4);
        // exact at p = 1
        assert_eq!(prob_two_or_more(10.0, 1.0), 1.0);
    }

    #[test]
    fn mean_excess_consistency() {
        // brute-force binomial sum oracle
        let b = 12usize;
        for &p in &[0.03f64, 0.2, 0.6] {
            let mut acc = 0.0;
            for k in 2..=b {
                let c = statrs::function::factorial::binomial(b as u64, k as u64);
                acc += (k as f64 - 1.0) * c * p.powi(k as i32) * (1.0 - p).powi((b - k) as i32);
            }
            assert_relative_eq!(
                mean_excess_two_or_more(b as f64, p),
                acc,
                max_relative = 1e-10
            );
        }
    }
}
