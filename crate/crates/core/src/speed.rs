//! The speed of coming down from infinity: `u(z) = ∫_z^∞ dq/ψ(q)`, its inverse
//! `v(t)` (computed by integrating `v' = -ψ(v)` from a bisection anchor), Grey's
//! extinction criterion, and the `(1±ε)`-scaled variants used by the coupling.

use crate::error::{Error, Result};
use crate::measure::LambdaMeasure;
use crate::numeric::fit::{self, TailReport, TailVerdict};
use crate::numeric::quad;
use crate::numeric::series::em1p_ratio;

/// Fixed default upper limit for the Grey verdict scan.
pub const GREY_Q_MAX_DEFAULT: f64 = 1e8;

/// What drives the speed computation: a measure's branching mechanism or a
/// synthetic closed-form `ψ(q) = coeff·q^alpha` used for exactness tests.
#[derive(Debug, Clone)]
pub enum PsiSource {
    Measure(LambdaMeasure),
    SyntheticPower { coeff: f64, alpha: f64 },
}

impl PsiSource {
    pub fn psi(&self, q: f64) -> f64 {
        match self {
            PsiSource::Measure(m) => m.psi(q),
            PsiSource::SyntheticPower { coeff, alpha } => {
                if q <= 0.0 {
                    0.0
                } else {
                    coeff * q.powf(*alpha)
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PsiSource::Measure(m) => m.is_zero(),
            PsiSource::SyntheticPower { coeff, .. } => *coeff <= 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreyVerdict {
    /// `∫^∞ dq/ψ < ∞`: the CSBP becomes extinct, the coalescent comes down.
    Extinct,
    NonExtinct,
    Inconclusive,
}

impl std::fmt::Display for GreyVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GreyVerdict::Extinct => write!(f, "extinct"),
            GreyVerdict::NonExtinct => write!(f, "non_extinct"),
            GreyVerdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GreyReport {
    pub verdict: GreyVerdict,
    pub tail: TailReport,
    /// `∫_1^{q_max} dq/ψ(q)`.
    pub integral_to_qmax: f64,
    pub q_max: f64,
}

/// Grey's criterion over the window `[1, q_max]`: integrates `1/ψ` and
/// classifies the integrand tail with the documented slope heuristic.
pub fn grey_verdict(source: &PsiSource, q_max: f64) -> Result<GreyReport> {
    if q_max < 1e6 {
        return Err(Error::invalid_argument("grey_verdict requires q_max >= 1e6"));
    }
    if source.is_zero() {
        return Err(Error::Degenerate("psi vanishes identically (zero measure)".into()));
    }
    let x_max = q_max.ln();
    let per_decade = 40usize;
    let n = (x_max / std::f64::consts::LN_10 * per_decade as f64).ceil() as usize;
    let mut xs = Vec::with_capacity(n + 1);
    let mut ys = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = x_max * i as f64 / n as f64;
        let psi = source.psi(x.exp());
        if psi > 0.0 {
            xs.push(x);
            ys.push(-psi.ln());
        }
    }
    let tail = fit::tail_verdict(&xs, &ys);
    let verdict = match tail.verdict {
        TailVerdict::Converges => GreyVerdict::Extinct,
        TailVerdict::Diverges => GreyVerdict::NonExtinct,
        TailVerdict::Inconclusive => GreyVerdict::Inconclusive,
    };
    let integral = quad::integrate_log(|q| 1.0 / source.psi(q), 1.0, q_max, 1e-10).value;
    Ok(GreyReport { verdict, tail, integral_to_qmax: integral, q_max })
}

/// Integrate `∫_z^∞ dq/ψ(q)` with direct `ψ` evaluations: adaptive log-space
/// quadrature to a moving upper limit plus a fitted power tail, grown until
/// the tail estimate is negligible. Returns `+∞` when the tail refuses to
/// close (non-extinct case).
///
/// `rel` is the quadrature tolerance; keep it well above the noise floor of
/// the underlying `ψ` quadratures (~1e-11) or the refinement loop spins.
fn u_direct_rel(source: &PsiSource, z: f64, rel: f64) -> f64 {
    debug_assert!(z > 0.0);
    let mut q_hi = z * 1e4;
    let mut acc = 0.0;
    let mut q_lo = z;
    for _ in 0..40 {
        acc += quad::integrate_log(|q| 1.0 / source.psi(q), q_lo, q_hi, rel).value;
        let psi_hi = source.psi(q_hi);
        if !psi_hi.is_finite() {
            // psi saturated f64: the remaining tail is < q_hi/f64::MAX
            return acc;
        }
        // local log-log slope of psi at q_hi
        let s = (psi_hi.ln() - source.psi(q_hi / std::f64::consts::E).ln()).max(0.0);
        if s > 1.01 {
            let tail = q_hi / (psi_hi * (s - 1.0));
            if tail < 0.1 * rel * acc {
                return acc + tail;
            }
        }
        q_lo = q_hi;
        q_hi *= 1e4;
        if q_hi > 1e280 {
            return f64::INFINITY;
        }
    }
    f64::INFINITY
}

fn u_direct(source: &PsiSource, z: f64) -> f64 {
    u_direct_rel(source, z, 1e-9)
}

/// Monotone cubic Hermite interpolant (Fritsch-Carlson) for `ln ψ` on `ln q`.
#[derive(Debug, Clone)]
struct LogLogSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl LogLogSpline {
    fn build(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 3);
        let mut slopes = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            slopes.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut ds = vec![0.0; n];
        ds[0] = slopes[0];
        ds[n - 1] = slopes[n - 2];
        for i in 1..n - 1 {
            let (s0, s1) = (slopes[i - 1], slopes[i]);
            ds[i] = if s0 * s1 <= 0.0 { 0.0 } else { 2.0 * s0 * s1 / (s0 + s1) };
        }
        // Fritsch-Carlson clamp
        for i in 0..n - 1 {
            let s = slopes[i];
            if s == 0.0 {
                ds[i] = 0.0;
                ds[i + 1] = 0.0;
            } else {
                let a = ds[i] / s;
                let b = ds[i + 1] / s;
                let r = a * a + b * b;
                if r > 9.0 {
                    let t = 3.0 / r.sqrt();
                    ds[i] = t * a * s;
                    ds[i + 1] = t * b * s;
                }
            }
        }
        LogLogSpline { xs, ys, ds }
    }

    fn min_x(&self) -> f64 {
        self.xs[0]
    }

    fn max_x(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        debug_assert!(x >= self.xs[0] - 1e-9 && x <= self.xs[n - 1] + 1e-9);
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = ((x - self.xs[i]) / h).clamp(0.0, 1.0);
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * h * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * h * (t3 - t2)
    }
}

/// Tabulated speed data for one `ψ`: a `ψ` spline on a log grid and the `v(t)`
/// curve obtained from the anchored ODE. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SpeedTable {
    source: PsiSource,
    pub grey: GreyReport,
    /// `None` when Grey fails: `v` is identically `+∞`.
    curve: Option<Curve>,
    t_lo: f64,
    t_hi: f64,
}

#[derive(Debug, Clone)]
struct Curve {
    psi_spline: LogLogSpline,
    /// nodes in `ln t`, strictly increasing
    ln_t: Vec<f64>,
    /// `ln v` at the nodes, strictly decreasing
    ln_v: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SpeedTableOptions {
    pub q_max_verdict: f64,
    pub nodes_per_decade: usize,
}

impl Default for SpeedTableOptions {
    fn default() -> Self {
        SpeedTableOptions { q_max_verdict: GREY_Q_MAX_DEFAULT, nodes_per_decade: 220 }
    }
}

impl SpeedTable {
    pub fn build(source: PsiSource, t_lo: f64, t_hi: f64) -> Result<Self> {
        Self::build_with(source, t_lo, t_hi, SpeedTableOptions::default())
    }

    pub fn build_with(
        source: PsiSource,
        t_lo: f64,
        t_hi: f64,
        opts: SpeedTableOptions,
    ) -> Result<Self> {
        if !(t_lo > 0.0 && t_lo < t_hi) {
            return Err(Error::invalid_argument("need 0 < t_lo < t_hi"));
        }
        let grey = grey_verdict(&source, opts.q_max_verdict)?;
        if grey.verdict != GreyVerdict::Extinct {
            return Ok(SpeedTable { source, grey, curve: None, t_lo, t_hi });
        }

        // Anchor both ends by bisection on u (direct psi route).
        let v_hi = bisect_u(&source, t_lo)?;
        let v_lo = bisect_u(&source, t_hi)?;

        // psi spline over the needed q range with margins.
        let q_min = (v_lo * 1e-3).max(1e-280);
        let q_max = v_hi * 1e3;
        let n_psi = 2400usize;
        let (lx0, lx1) = (q_min.ln(), q_max.ln());
        let mut xs = Vec::with_capacity(n_psi + 1);
        let mut ys = Vec::with_capacity(n_psi + 1);
        for i in 0..=n_psi {
            let x = lx0 + (lx1 - lx0) * i as f64 / n_psi as f64;
            let p = source.psi(x.exp());
            if p > 0.0 && p.is_finite() {
                xs.push(x);
                ys.push(p.ln());
            }
        }
        let spline = LogLogSpline::build(xs, ys);

        // March v' = -psi(v) across [t_lo, t_hi] on a log-t grid.
        let decades = (t_hi / t_lo).log10();
        let n_nodes = ((decades * opts.nodes_per_decade as f64).ceil() as usize).max(16);
        let mut ln_t = Vec::with_capacity(n_nodes + 1);
        let mut ln_v = Vec::with_capacity(n_nodes + 1);
        let (lt0, lt1) = (t_lo.ln(), t_hi.ln());
        let mut v = v_hi;
        ln_t.push(lt0);
        ln_v.push(v.ln());
        let psi_of = |lv: f64| -> f64 { spline.eval(lv).exp() };
        for i in 1..=n_nodes {
            let a = lt0 + (lt1 - lt0) * (i - 1) as f64 / n_nodes as f64;
            let b = lt0 + (lt1 - lt0) * i as f64 / n_nodes as f64;
            v = rk4_march(psi_of, a, b, v);
            ln_t.push(b);
            ln_v.push(v.ln());
        }
        let curve = Curve { psi_spline: spline, ln_t, ln_v };
        Ok(SpeedTable { source, grey, curve: Some(curve), t_lo, t_hi })
    }

    pub fn source(&self) -> &PsiSource {
        &self.source
    }

    pub fn grey_verdict(&self) -> GreyVerdict {
        self.grey.verdict
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    /// `v(t)`: the solution of `∫_{v}^∞ dq/ψ = t`. Returns `+∞` when Grey's
    /// condition fails. Errors on queries outside the tabulated range.
    pub fn v_of(&self, t: f64) -> Result<f64> {
        let curve = match &self.curve {
            None => return Ok(f64::INFINITY),
            Some(c) => c,
        };
        if !(t > 0.0) {
            return Err(Error::invalid_argument("v_of needs t > 0"));
        }
        if t < self.t_lo * (1.0 - 1e-12) || t > self.t_hi * (1.0 + 1e-12) {
            return Err(Error::Range(format!(
                "t={t} outside tabulated range [{}, {}]",
                self.t_lo, self.t_hi
            )));
        }
        let lt = t.ln().clamp(curve.ln_t[0], *curve.ln_t.last().unwrap());
        let i = match curve.ln_t.binary_search_by(|v| v.total_cmp(&lt)) {
            Ok(i) => return Ok(curve.ln_v[i].exp()),
            Err(i) => i.saturating_sub(1).min(curve.ln_t.len() - 2),
        };
        // re-integrate the short span from the nearest node
        let psi_of = |lv: f64| -> f64 { curve.psi_spline.eval(lv).exp() };
        let v = rk4_march(psi_of, curve.ln_t[i], lt, curve.ln_v[i].exp());
        Ok(v)
    }

    /// `u(z) = ∫_z^∞ dq/ψ(q)`, by quadrature (a route independent of the
    /// `v` ODE). Returns `+∞` when Grey's condition fails.
    pub fn u_of(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return Err(Error::invalid_argument("u_of needs z > 0"));
        }
        if self.curve.is_none() {
            return Ok(f64::INFINITY);
        }
        Ok(u_direct(&self.source, z))
    }

    /// `ψ(λ(1±ε))`, the scaled mechanism of the coupling.
    pub fn scaled_psi(&self, lambda: f64, eps: f64, plus: bool) -> Result<f64> {
        scaled_psi(&self.source, lambda, eps, plus)
    }

    /// `v_ε^±(t) = v(t(1±ε)) / (1±ε)`.
    pub fn scaled_v(&self, t: f64, eps: f64, plus: bool) -> Result<f64> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::invalid_argument("scaled_v needs eps in [0,1)"));
        }
        let f = if plus { 1.0 + eps } else { 1.0 - eps };
        Ok(self.v_of(t * f)? / f)
    }
}

/// `ψ(λ(1±ε))` evaluated through `psi` itself.
pub fn scaled_psi(source: &PsiSource, lambda: f64, eps: f64, plus: bool) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid_argument("scaled_psi needs eps in [0,1)"));
    }
    if lambda < 0.0 {
        return Err(Error::invalid_argument("scaled_psi needs lambda >= 0"));
    }
    let f = if plus { 1.0 + eps } else { 1.0 - eps };
    Ok(source.psi(lambda * f))
}

/// The same quantity through the pushforward-measure route:
/// `∫ em1p(λ(1±ε)x) x^{-2} Λ(dx)` by direct quadrature. Exposed so the
/// identity with `scaled_psi` can be tested as two independent evaluations.
pub fn scaled_psi_pushforward(m: &LambdaMeasure, lambda: f64, eps: f64, plus: bool) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid_argument("needs eps in [0,1)"));
    }
    let f = if plus { 1.0 + eps } else { 1.0 - eps };
    let lam = lambda * f;
    if lam == 0.0 {
        return Ok(0.0);
    }
    // em1p(lam x)/x^2 = lam^2 em1p_ratio(lam x)
    Ok(m.kingman_mass() * 0.5 * lam * lam
        + lam * lam * crate::measure::ratio_integral(m, |x| em1p_ratio(lam * x)))
}

/// Report from the `ψ(v(t))·t/v(t)` boundedness probe.
#[derive(Debug, Clone)]
pub struct CondReport {
    pub t: Vec<f64>,
    /// `ψ(v(t))·t / v(t)` per grid point.
    pub ratio: Vec<f64>,
    /// `v(t(1±ε))/v(t)` for ε in {0.1, 0.01}: [(minus_0.1, plus_0.1, minus_0.01, plus_0.01); n]
    pub v_ratios: Vec<[f64; 4]>,
    pub flag: CondFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondFlag {
    Bounded,
    Unbounded,
    Oscillating,
}

/// Probe the sufficient condition `ψ(v(t)) = O(v(t)/t)` on a decreasing grid.
pub fn cond_check(table: &SpeedTable, t_grid: &[f64]) -> Result<CondReport> {
    if table.grey_verdict() != GreyVerdict::Extinct {
        return Err(Error::configuration("cond_check needs an extinct (CDI) mechanism"));
    }
    let mut t = t_grid.to_vec();
    t.sort_by(|a, b| b.total_cmp(a)); // decreasing toward 0
    let mut ratio = Vec::with_capacity(t.len());
    let mut v_ratios = Vec::with_capacity(t.len());
    for &ti in &t {
        let v = table.v_of(ti)?;
        ratio.push(table.source.psi(v) * ti / v);
        let mut row = [0.0; 4];
        for (j, &(eps, plus)) in [(0.1, false), (0.1, true), (0.01, false), (0.01, true)]
            .iter()
            .enumerate()
        {
            let f = if plus { 1.0 + eps } else { 1.0 - eps };
            row[j] = table.v_of(ti * f)? / v;
        }
        v_ratios.push(row);
    }
    // trend of ln ratio against ln t
    let xs: Vec<f64> = t.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = ratio.iter().map(|x| x.ln()).collect();
    let (_, slope) = fit::linear_fit(&xs, &ys);
    let spread = ratio.iter().cloned().fold(f64::MIN, f64::max)
        / ratio.iter().cloned().fold(f64::MAX, f64::min);
    let flag = if slope < -0.02 && spread > 3.0 {
        CondFlag::Unbounded
    } else if spread <= 3.0 {
        CondFlag::Bounded
    } else {
        CondFlag::Oscillating
    };
    Ok(CondReport { t, ratio, v_ratios, flag })
}

/// CSV emitters with deterministic 17-significant-digit formatting.
pub fn write_psi_csv(table: &SpeedTable, qs: &[f64], out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "q,psi")?;
    for &q in qs {
        writeln!(out, "{:.16e},{:.16e}", q, table.source().psi(q))?;
    }
    Ok(())
}

pub fn write_v_csv(table: &SpeedTable, ts: &[f64], out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "t,v")?;
    for &t in ts {
        let v = table.v_of(t).unwrap_or(f64::NAN);
        writeln!(out, "{:.16e},{:.16e}", t, v)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------

/// Solve `u(z) = t` by bracketing + bisection + Newton polish. After the
/// bracket is found, each iterate only re-integrates the moving segment
/// `[z, hi]` on top of a cached `u(hi)`.
fn bisect_u(source: &PsiSource, t: f64) -> Result<f64> {
    let coarse = 1e-7;
    let mut lo = 1e-6f64;
    let mut hi = 1e6f64;
    let mut u_lo = u_direct_rel(source, lo, coarse);
    for _ in 0..60 {
        if u_lo > t {
            break;
        }
        lo /= 1e3;
        if lo < 1e-250 {
            return Err(Error::Degenerate("u(z) never exceeds target t".into()));
        }
        u_lo = u_direct_rel(source, lo, coarse);
    }
    let mut u_hi = u_direct_rel(source, hi, coarse);
    for _ in 0..60 {
        if u_hi < t {
            break;
        }
        hi *= 1e3;
        if hi > 1e250 {
            return Err(Error::Degenerate("u(z) never drops below target t".into()));
        }
        u_hi = u_direct_rel(source, hi, coarse);
    }
    // u(z) = u_ref + int_z^hi dq/psi, cached reference at the high bracket.
    let u_ref = u_direct_rel(source, hi, 3e-9);
    let u_of = |z: f64, rel: f64| -> f64 {
        u_ref + quad::integrate_log(|q| 1.0 / source.psi(q), z, hi, rel).value
    };
    let (mut llo, mut lhi) = (lo.ln(), hi.ln());
    for _ in 0..25 {
        let mid = 0.5 * (llo + lhi);
        if u_of(mid.exp(), 1e-7) > t {
            llo = mid;
        } else {
            lhi = mid;
        }
    }
    // Newton: z' = z + (u(z) - t)·psi(z); quadratic convergence from here.
    let mut z = (0.5 * (llo + lhi)).exp();
    for _ in 0..5 {
        let u = u_of(z, 3e-9);
        let step = (u - t) * source.psi(z);
        let z_new = (z + step).clamp(0.25 * z, 4.0 * z);
        if ((z_new - z) / z).abs() < 1e-11 {
            z = z_new;
            break;
        }
        z = z_new;
    }
    Ok(z)
}

/// March `dv/ds = -e^s ψ(v)` (with `s = ln t`) from `s=a` to `s=b` using RK4
/// with step-doubling control on the relative change of `v`.
fn rk4_march(psi_of: impl Fn(f64) -> f64, a: f64, b: f64, v0: f64) -> f64 {
    let f = |s: f64, v: f64| -> f64 { -s.exp() * psi_of(v.ln()) };
    let mut s = a;
    let mut v = v0;
    let mut h = (b - a).min(2e-3);
    while s < b - 1e-15 {
        h = h.min(b - s);
        // limit the relative move per step
        let dv = f(s, v);
        let rel = (dv * h / v).abs();
        if rel > 5e-3 {
            h *= 2.5e-3 / rel;
            continue;
        }
        let step = |h: f64, s: f64, v: f64| -> f64 {
            let k1 = f(s, v);
            let k2 = f(s + 0.5 * h, v + 0.5 * h * k1);
            let k3 = f(s + 0.5 * h, v + 0.5 * h * k2);
            let k4 = f(s + h, v + h * k3);
            v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        };
        let full = step(h, s, v);
        let half = step(0.5 * h, s + 0.5 * h, step(0.5 * h, s, v));
        let err = ((full - half) / half).abs();
        if err > 1e-12 && h > 1e-9 {
            h *= 0.5;
            continue;
        }
        v = half;
        s += h;
        if err < 1e-14 {
            h *= 1.8;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn synthetic(coeff: f64, alpha: f64) -> PsiSource {
        PsiSource::SyntheticPower { coeff, alpha }
    }

    #[test]
    fn grey_verdicts_for_families() {
        let beta = PsiSource::Measure(LambdaMeasure::beta_coalescent(1.5).unwrap());
        assert_eq!(grey_verdict(&beta, 1e8).unwrap().verdict, GreyVerdict::Extinct);
        let uni = PsiSource::Measure(LambdaMeasure::uniform());
        assert_eq!(grey_verdict(&uni, 1e8).unwrap().verdict, GreyVerdict::NonExtinct);
        let atom = PsiSource::Measure(LambdaMeasure::atom(0.5, 1.0).unwrap());
        assert_eq!(grey_verdict(&atom, 1e8).unwrap().verdict, GreyVerdict::NonExtinct);
        let zero = PsiSource::Measure(LambdaMeasure::zero());
        assert!(grey_verdict(&zero, 1e8).is_err());
    }

    #[test]
    fn v_closed_form_quadratic() {
        // psi = q^2  =>  v(t) = 1/t
        let table = SpeedTable::build(synthetic(1.0, 2.0), 1e-4, 1.0).unwrap();
        for &t in &[1e-4, 1e-3, 0.01, 0.1, 0.5, 1.0] {
            assert_relative_eq!(table.v_of(t).unwrap(), 1.0 / t, max_relative = 1e-7);
        }
        assert_relative_eq!(table.v_of(0.01).unwrap(), 100.0, max_relative = 1e-7);
    }

    #[test]
    fn v_closed_form_stable_exponent() {
        // psi = q^1.5  =>  v(t) = (0.5 t)^{-2}
        let table = SpeedTable::build(synthetic(1.0, 1.5), 1e-4, 1.0).unwrap();
        assert_relative_eq!(table.v_of(0.1).unwrap(), 400.0, max_relative = 1e-7);
        for &t in &[1e-4, 1e-2, 1.0] {
            assert_relative_eq!(
                table.v_of(t).unwrap(),
                (0.5 * t).powi(-2),
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn v_kingman_measure() {
        // Lambda = delta_0 (mass 1): psi = q^2/2, v(t) = 2/t
        let m = LambdaMeasure::kingman(1.0).unwrap();
        let table = SpeedTable::build(PsiSource::Measure(m), 1e-3, 1.0).unwrap();
        assert_relative_eq!(table.v_of(0.01).unwrap(), 200.0, max_relative = 1e-7);
    }

    #[test]
    fn v_non_extinct_sentinel() {
        let table = SpeedTable::build(PsiSource::Measure(LambdaMeasure::uniform()), 1e-3, 1.0)
            .unwrap();
        assert!(table.v_of(0.01).unwrap().is_infinite());
        assert!(table.u_of(10.0).unwrap().is_infinite());
    }

    #[test]
    fn v_beta_vs_bisection_oracle() {
        // independent oracle: bisection on the direct quadrature of u
        let m = LambdaMeasure::beta_coalescent(1.5).unwrap();
        let src = PsiSource::Measure(m);
        let table = SpeedTable::build(src.clone(), 1e-3, 0.5).unwrap();
        for &t in &[0.01, 0.1, 0.3] {
            let oracle = bisect_u(&src, t).unwrap();
            assert_relative_eq!(table.v_of(t).unwrap(), oracle, max_relative = 1e-5);
        }
    }

    #[test]
    fn u_v_round_trip() {
        let m = LambdaMeasure::beta_coalescent(1.5).unwrap();
        let table = SpeedTable::build(PsiSource::Measure(m), 1e-4, 0.5).unwrap();
        for &t in &[2e-4, 1e-3, 0.05, 0.4] {
            let v = table.v_of(t).unwrap();
            assert_relative_eq!(table.u_of(v).unwrap(), t, max_relative = 1e-6);
        }
    }

    #[test]
    fn v_out_of_range_errors() {
        let table = SpeedTable::build(synthetic(1.0, 2.0), 1e-3, 1.0).unwrap();
        assert!(matches!(table.v_of(1e-5), Err(Error::Range(_))));
        assert!(matches!(table.v_of(5.0), Err(Error::Range(_))));
    }

    #[test]
    fn scaled_psi_identities() {
        let m = LambdaMeasure::beta(0.5, 1.5).unwrap();
        let src = PsiSource::Measure(m.clone());
        // identity with eps=0
        assert_relative_eq!(
            scaled_psi(&src, 7.0, 0.0, true).unwrap(),
            m.psi(7.0),
            max_relative = 1e-14
        );
        // psi(12) through the scaled route
        assert_relative_eq!(
            scaled_psi(&src, 10.0, 0.2, true).unwrap(),
            m.psi(12.0),
            max_relative = 1e-10
        );
        // pushforward route agrees on pseudo-random (lambda, eps)
        let mut state = 1234567u64;
        for _ in 0..100 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let lambda = 0.1 + (state >> 40) as f64 / 160.0; // up to ~105
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let eps = ((state >> 40) as f64 / 16777216.0) * 0.8;
            for plus in [true, false] {
                let a = scaled_psi(&src, lambda, eps, plus).unwrap();
                let b = scaled_psi_pushforward(&m, lambda, eps, plus).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-8, epsilon = 1e-300);
            }
        }
    }

    #[test]
    fn scaled_v_identities() {
        let table = SpeedTable::build(synthetic(1.0, 2.0), 1e-4, 1.0).unwrap();
        // eps = 0 degenerates to v
        assert_relative_eq!(
            table.scaled_v(0.01, 0.0, true).unwrap(),
            table.v_of(0.01).unwrap(),
            max_relative = 1e-12
        );
        // psi=q^2: v_eps^+(t) = 1/(t (1+eps)^2)
        let eps = 0.25;
        assert_relative_eq!(
            table.scaled_v(0.01, eps, true).unwrap(),
            1.0 / (0.01 * (1.0 + eps) * (1.0 + eps)),
            max_relative = 1e-7
        );
        // table consistency for a measure
        let m = LambdaMeasure::beta_coalescent(1.5).unwrap();
        let tb = SpeedTable::build(PsiSource::Measure(m), 1e-3, 0.5).unwrap();
        assert_relative_eq!(
            tb.scaled_v(0.01, 0.1, true).unwrap(),
            tb.v_of(0.011).unwrap() / 1.1,
            max_relative = 1e-6
        );
    }

    #[test]
    fn monotone_coupling_of_speeds() {
        // v_eps^-(t) >= v(t) >= v_eps^+(t)
        let m = LambdaMeasure::beta_coalescent(1.5).unwrap();
        let table = SpeedTable::build(PsiSource::Measure(m), 1e-3, 0.8).unwrap();
        for &t in &[2e-3, 0.01, 0.1, 0.4] {
            for &eps in &[0.1, 0.3] {
                let v = table.v_of(t).unwrap();
                let vm = table.scaled_v(t, eps, false).unwrap();
                let vp = table.scaled_v(t, eps, true).unwrap();
                assert!(vm >= v && v >= vp, "t={t} eps={eps}: {vm} {v} {vp}");
            }
        }
    }

    #[test]
    fn cond_check_power_law_constant() {
        // psi = q^alpha: psi(v(t)) t / v(t) = 1/(alpha-1) exactly
        let table = SpeedTable::build(synthetic(1.0, 1.5), 1e-5, 0.1).unwrap();
        let grid: Vec<f64> = (1..=20).map(|i| 1e-4 * 1.3f64.powi(i)).collect();
        let rep = cond_check(&table, &grid).unwrap();
        for &r in &rep.ratio {
            assert_relative_eq!(r, 2.0, max_relative = 1e-5);
        }
        assert_eq!(rep.flag, CondFlag::Bounded);
    }

    #[test]
    fn cond_check_beta() {
        // Beta alpha=1.5: ratio ~= 2 across small t within 1%
        let m = LambdaMeasure::beta_coalescent(1.5).unwrap();
        let table = SpeedTable::build(PsiSource::Measure(m), 8e-7, 1.2e-2).unwrap();
        let grid: Vec<f64> = (0..=24).map(|i| 1e-6 * 10f64.powf(i as f64 / 6.0)).collect();
        let rep = cond_check(&table, &grid).unwrap();
        for (&t, &r) in rep.t.iter().zip(&rep.ratio) {
            assert!((r - 2.0).abs() < 0.02 * 2.0, "t={t}: ratio {r}");
        }
        assert_eq!(rep.flag, CondFlag::Bounded);
    }
}
pub fn debug_bisect_u(source: &PsiSource, t: f64) -> crate::Result<f64> { bisect_u(source, t) }
pub fn debug_u_direct(source: &PsiSource, z: f64, rel: f64) -> f64 { u_direct_rel(source, z, rel) }
