//! Tail-behavior classification shared by the Schweinsberg-sum and Grey-integral
//! verdicts.
//!
//! Both verdicts ask the same question of a positive series/integrand sampled at
//! desk scale: does `sum exp(y_i)` (with `y = ln term` against `x = ln b` or
//! `ln q`) behave like a convergent power tail, a divergent one, or sit on the
//! `term ~ 1/b` boundary? The decision rule is deliberately simple and fixed:
//!
//! 1. fit the local log-log slope on the last two decades and extrapolate the
//!    `slope(x) = a + c/x` drift to `x -> inf`;
//! 2. away from the boundary call it on the extrapolated slope `a` with a
//!    fixed margin;
//! 3. inside the boundary band, fit the logarithmic correction
//!    `term ~ x^{-1} (ln x + c)^{-sigma}` and call divergence iff `sigma <= 1`
//!    (again with a fixed band for "can't tell").
//!
//! The margins are constants of the artifact, not tunables.

/// Band half-width around slope -1 within which the power fit alone is not trusted.
pub const SLOPE_MARGIN: f64 = 0.05;
/// `sigma` thresholds for the logarithmic-correction stage.
pub const SIGMA_DIVERGES: f64 = 1.05;
pub const SIGMA_CONVERGES: f64 = 1.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct TailReport {
    pub verdict: TailVerdict,
    /// Extrapolated limiting slope of `ln term` vs `ln x`.
    pub slope: f64,
    /// Raw last-decade slope before the 1/x extrapolation.
    pub slope_last_decade: f64,
    /// Fitted log-correction exponent, when the boundary stage ran.
    pub sigma: Option<f64>,
}

/// Ordinary least squares `y = intercept + slope * x`. Returns `(intercept, slope)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

fn window(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let mut wx = Vec::new();
    let mut wy = Vec::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if x >= lo && x <= hi && y.is_finite() {
            wx.push(x);
            wy.push(y);
        }
    }
    (wx, wy)
}

/// Classify the tail of a positive summand/integrand from samples
/// `(x_i, y_i) = (ln abscissa, ln term)`, sorted by `x`.
pub fn tail_verdict(xs: &[f64], ys: &[f64]) -> TailReport {
    let inconclusive = TailReport {
        verdict: TailVerdict::Inconclusive,
        slope: f64::NAN,
        slope_last_decade: f64::NAN,
        sigma: None,
    };
    if xs.len() < 8 {
        return inconclusive;
    }
    let x_max = *xs.last().unwrap();
    let dec = std::f64::consts::LN_10;
    let (x1, y1) = window(xs, ys, x_max - dec, x_max);
    let (x2, y2) = window(xs, ys, x_max - 2.0 * dec, x_max - dec);
    if x1.len() < 3 || x2.len() < 3 {
        return inconclusive;
    }
    let (_, s1) = linear_fit(&x1, &y1);
    let (_, s2) = linear_fit(&x2, &y2);
    let c1 = x1.iter().sum::<f64>() / x1.len() as f64;
    let c2 = x2.iter().sum::<f64>() / x2.len() as f64;

    // slope(x) = a + c/x through the two window centers.
    let denom = 1.0 / c2 - 1.0 / c1;
    let drift = if denom.abs() > 1e-12 { (s2 - s1) / denom } else { 0.0 };
    let mut a = s1 - drift / c1;
    // Guard against wild extrapolation on structured (oscillatory) data.
    if (a - s1).abs() > 0.75 {
        a = s1;
    }

    if a < -1.0 - SLOPE_MARGIN {
        return TailReport {
            verdict: TailVerdict::Converges,
            slope: a,
            slope_last_decade: s1,
            sigma: None,
        };
    }
    if a > -1.0 + SLOPE_MARGIN {
        return TailReport {
            verdict: TailVerdict::Diverges,
            slope: a,
            slope_last_decade: s1,
            sigma: None,
        };
    }

    // Boundary band: term ~ x^{-1} (ln-correction)^{-sigma}. Fit
    // g = y + x = A - sigma ln(x + c) over the last two decades, scanning c.
    let (gx, gy): (Vec<f64>, Vec<f64>) = window(xs, ys, x_max - 2.0 * dec, x_max);
    let g: Vec<f64> = gx.iter().zip(&gy).map(|(&x, &y)| y + x).collect();
    let mut best: Option<(f64, f64)> = None; // (rss, sigma)
    let mut c_shift = -3.0;
    while c_shift <= 3.0 + 1e-9 {
        let x_min_w = gx.first().copied().unwrap_or(1.0);
        if x_min_w + c_shift > 0.5 {
            let lx: Vec<f64> = gx.iter().map(|&x| (x + c_shift).ln()).collect();
            let (b0, sl) = linear_fit(&lx, &g);
            let rss: f64 = lx
                .iter()
                .zip(&g)
                .map(|(&x, &y)| {
                    let r = y - (b0 + sl * x);
                    r * r
                })
                .sum();
            if best.map_or(true, |(r, _)| rss < r) {
                best = Some((rss, -sl));
            }
        }
        c_shift += 0.25;
    }
    let sigma = best.map(|(_, s)| s);
    let verdict = match sigma {
        Some(s) if s <= SIGMA_DIVERGES => TailVerdict::Diverges,
        Some(s) if s >= SIGMA_CONVERGES => TailVerdict::Converges,
        _ => TailVerdict::Inconclusive,
    };
    TailReport {
        verdict,
        slope: a,
        slope_last_decade: s1,
        sigma,
    }
}
