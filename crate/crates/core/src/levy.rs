//! Spectrally positive Lévy paths with Laplace exponent `ψ`, simulated as jump
//! skeletons (retained jumps above a cutoff plus compensating drift), the
//! Lamperti time change to the associated CSBP, and the point process `π^Z`
//! of normalized jump sizes.

use crate::error::{Error, Result};
use crate::measure::{LambdaMeasure, MeasureComponent, PowerPiece};
use rand::Rng;
use rand_distr::{Distribution, Exp};

/// A simulated spectrally positive Lévy path: `X_t = x0 + drift·t + Σ_{t_i<=t} Δ_i`.
#[derive(Debug, Clone)]
pub struct JumpSkeleton {
    pub x0: f64,
    /// Compensation of the retained jumps: `-∫_{[cutoff,1]} x ν(dx)`.
    pub drift: f64,
    pub cutoff: f64,
    pub horizon: f64,
    /// Strictly increasing jump times in `(0, horizon]`.
    pub times: Vec<f64>,
    pub sizes: Vec<f64>,
    /// `Σ_{j<=i} Δ_j` for O(1) path evaluation.
    cum_sizes: Vec<f64>,
    /// Variance of the dropped small-jump martingale: `horizon·∫_{(0,cutoff)} x²ν(dx)`.
    pub dropped_variance: f64,
}

impl JumpSkeleton {
    fn new(
        x0: f64,
        drift: f64,
        cutoff: f64,
        horizon: f64,
        times: Vec<f64>,
        sizes: Vec<f64>,
        dropped_variance: f64,
    ) -> Self {
        let mut cum = Vec::with_capacity(sizes.len());
        let mut acc = 0.0;
        for &s in &sizes {
            acc += s;
            cum.push(acc);
        }
        JumpSkeleton { x0, drift, cutoff, horizon, times, sizes, cum_sizes: cum, dropped_variance }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Right-continuous path value at `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0 && t <= self.horizon * (1.0 + 1e-12));
        let idx = self.times.partition_point(|&ti| ti <= t);
        let jumped = if idx == 0 { 0.0 } else { self.cum_sizes[idx - 1] };
        self.x0 + self.drift * t + jumped
    }

    /// Path value just before jump `i`.
    pub fn value_before(&self, i: usize) -> f64 {
        let jumped = if i == 0 { 0.0 } else { self.cum_sizes[i - 1] };
        self.x0 + self.drift * self.times[i] + jumped
    }

    /// Path value at jump `i` (post-jump).
    pub fn value_after(&self, i: usize) -> f64 {
        self.x0 + self.drift * self.times[i] + self.cum_sizes[i]
    }

    pub fn write_csv(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(
            out,
            "# x0={:.16e} drift={:.16e} cutoff={:.16e} horizon={:.16e} dropped_variance={:.16e}",
            self.x0, self.drift, self.cutoff, self.horizon, self.dropped_variance
        )?;
        writeln!(out, "t,delta")?;
        for (t, d) in self.times.iter().zip(&self.sizes) {
            writeln!(out, "{t:.16e},{d:.16e}")?;
        }
        Ok(())
    }
}

/// Exact sampler for `ν(dx) = x^{-2}Λ(dx)` restricted to `[cutoff, 1]` and
/// normalized: closed-form inverse CDFs per power piece, rejection from a
/// power envelope for Beta components.
#[derive(Debug, Clone)]
pub struct NuSampler {
    parts: Vec<(f64, PartSampler)>, // (nu-mass of part, sampler)
    total_rate: f64,
}

#[derive(Debug, Clone)]
enum PartSampler {
    Point { x: f64 },
    /// density ∝ x^e on [lo, hi]
    Power { lo: f64, hi: f64, e: f64 },
    /// Beta nu-density scale·x^{a-3}(1-x)^{b-1}/B on [lo, hi]; envelope x^{a-3}
    /// (hi <= 1/2) or (1-x)^{b-1} (lo >= 1/2).
    BetaLeft { lo: f64, hi: f64, a: f64, b: f64 },
    BetaRight { lo: f64, hi: f64, a: f64, b: f64 },
}

impl NuSampler {
    pub fn new(m: &LambdaMeasure, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::configuration("cutoff must lie in (0,1)"));
        }
        if m.kingman_mass() > 0.0 {
            return Err(Error::configuration(
                "Kingman atom has no jump representation; remove it or lower-bound jumps",
            ));
        }
        let mut parts = Vec::new();
        for comp in m.components() {
            match comp {
                MeasureComponent::KingmanAtom { .. } => unreachable!(),
                MeasureComponent::Atom { location, mass } => {
                    if *location >= cutoff {
                        parts.push((mass / (location * location), PartSampler::Point { x: *location }));
                    }
                }
                MeasureComponent::UniformOn01 => {
                    let w = 1.0 / cutoff - 1.0;
                    if w > 0.0 {
                        parts.push((w, PartSampler::Power { lo: cutoff, hi: 1.0, e: -2.0 }));
                    }
                }
                MeasureComponent::PowerLawPieces(ps) => {
                    for p in ps {
                        if p.upper > cutoff {
                            let lo = p.lower.max(cutoff);
                            let w = p.coeff * power_int(lo, p.upper, p.exponent - 2.0);
                            parts.push((w, PartSampler::Power { lo, hi: p.upper, e: p.exponent - 2.0 }));
                        }
                    }
                }
                MeasureComponent::Beta { shape_a, shape_b, scale } => {
                    let nu_mass = |l: f64, u: f64| -> f64 {
                        scale
                            * crate::measure::ratio_integral(
                                &LambdaMeasure::beta(*shape_a, *shape_b).unwrap(),
                                |_| 1.0,
                            )
                            .min(f64::INFINITY)
                            * 0.0
                            + comp_nu_mass_beta(*shape_a, *shape_b, *scale, l, u)
                    };
                    let mid = 0.5f64;
                    if cutoff < mid {
                        let w = nu_mass(cutoff, mid);
                        parts.push((
                            w,
                            PartSampler::BetaLeft { lo: cutoff, hi: mid, a: *shape_a, b: *shape_b },
                        ));
                    }
                    let lo2 = cutoff.max(mid);
                    let w2 = nu_mass(lo2, 1.0);
                    if w2 > 0.0 {
                        parts.push((
                            w2,
                            PartSampler::BetaRight { lo: lo2, hi: 1.0, a: *shape_a, b: *shape_b },
                        ));
                    }
                }
            }
        }
        let total_rate: f64 = parts.iter().map(|(w, _)| *w).sum();
        Ok(NuSampler { parts, total_rate })
    }

    /// `ν([cutoff, 1])`.
    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        debug_assert!(self.total_rate > 0.0);
        let mut u = rng.gen::<f64>() * self.total_rate;
        let mut idx = self.parts.len() - 1;
        for (i, (w, _)) in self.parts.iter().enumerate() {
            if u < *w {
                idx = i;
                break;
            }
            u -= w;
        }
        match &self.parts[idx].1 {
            PartSampler::Point { x } => *x,
            PartSampler::Power { lo, hi, e } => sample_power(rng, *lo, *hi, *e),
            PartSampler::BetaLeft { lo, hi, a, b } => loop {
                let x = sample_power(rng, *lo, *hi, a - 3.0);
                // accept w.p. ((1-x)/(1-ref))^{b-1} with ref the arg-max
                let accept = if *b >= 1.0 {
                    ((1.0 - x) / (1.0 - lo)).powf(b - 1.0)
                } else {
                    ((1.0 - x) / (1.0 - hi)).powf(b - 1.0)
                };
                if rng.gen::<f64>() < accept {
                    return x;
                }
            },
            PartSampler::BetaRight { lo, hi, a, b } => loop {
                // sample 1-x with density ∝ y^{b-1} on [1-hi, 1-lo]
                let y = sample_power(rng, (1.0 - hi).max(1e-300), 1.0 - lo, b - 1.0);
                let x = 1.0 - y;
                let accept = (x / lo).powf(a - 3.0); // a-3 < 0, x >= lo
                if rng.gen::<f64>() < accept {
                    return x;
                }
            },
        }
    }
}

fn comp_nu_mass_beta(a: f64, b: f64, scale: f64, l: f64, u: f64) -> f64 {
    use statrs::function::beta::ln_beta;
    let lb = ln_beta(a, b);
    crate::numeric::quad::integrate_log(
        move |x| scale * ((a - 3.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - lb).exp(),
        l,
        u,
        1e-11,
    )
    .value
}

fn power_int(lo: f64, hi: f64, e: f64) -> f64 {
    if lo >= hi {
        return 0.0;
    }
    if (e + 1.0).abs() < 1e-12 {
        (hi / lo).ln()
    } else {
        (hi.powf(e + 1.0) - lo.powf(e + 1.0)) / (e + 1.0)
    }
}

/// Inverse-CDF draw from density ∝ x^e on [lo, hi].
fn sample_power(rng: &mut impl Rng, lo: f64, hi: f64, e: f64) -> f64 {
    let u: f64 = rng.gen();
    if (e + 1.0).abs() < 1e-12 {
        // density ∝ 1/x: CDF ∝ ln
        (lo.ln() + u * (hi / lo).ln()).exp()
    } else {
        let s = e + 1.0;
        let (a, b) = (lo.powf(s), hi.powf(s));
        (a + u * (b - a)).powf(1.0 / s)
    }
}

/// Simulate the compensated jump skeleton of the `ψ`-Lévy process on
/// `[0, horizon]`: Poisson jump times at rate `ν([cutoff,1])`, i.i.d. sizes
/// from the restricted normalized `ν`, drift `-∫_{[cutoff,1]} x ν(dx)`.
pub fn simulate_levy(
    m: &LambdaMeasure,
    x0: f64,
    horizon: f64,
    cutoff: f64,
    rng: &mut impl Rng,
) -> Result<JumpSkeleton> {
    if !(horizon > 0.0) {
        return Err(Error::invalid_argument("horizon must be positive"));
    }
    if m.is_zero() {
        return Ok(JumpSkeleton::new(x0, 0.0, cutoff, horizon, vec![], vec![], 0.0));
    }
    let sampler = NuSampler::new(m, cutoff)?;
    let rate = sampler.total_rate();
    if !rate.is_finite() {
        return Err(Error::configuration("retained jump rate is not finite"));
    }
    let drift = -m.x_inv_moment_above(cutoff);
    let dropped_variance = horizon * m.mass_upto(cutoff * (1.0 - 1e-15));
    let mut times = Vec::new();
    let mut sizes = Vec::new();
    if rate > 0.0 {
        let exp = Exp::new(rate).unwrap();
        let mut t = 0.0;
        loop {
            t += exp.sample(rng);
            if t > horizon {
                break;
            }
            times.push(t);
            sizes.push(sampler.sample(rng));
        }
    }
    Ok(JumpSkeleton::new(x0, drift, cutoff, horizon, times, sizes, dropped_variance))
}

/// One linear segment of the time-changed pair `(X, Z)`.
#[derive(Debug, Clone, Copy)]
struct Segment {
    /// start in Lévy time
    t0: f64,
    /// start in CSBP time
    u0: f64,
    /// X value at segment start (post-jump)
    x0: f64,
    /// drift of X on the segment
    slope: f64,
    /// segment length in Lévy time (f64::INFINITY for the last one)
    len: f64,
}

/// The Lamperti transform of a skeleton: `Z_t = X_{U^{-1}(t)}` with
/// `U(s) = ∫_0^s du/X_u` in exact per-segment closed form (`X` is linear
/// between jumps, so each segment contributes a logarithm).
#[derive(Debug, Clone)]
pub struct CsbpPath {
    segments: Vec<Segment>,
    /// Z-time jump list: `(t̃_i, Δ_i, Z(t̃_i))` with `Z(t̃)` the post-jump value.
    pub z_times: Vec<f64>,
    pub z_sizes: Vec<f64>,
    pub z_after: Vec<f64>,
    /// CSBP extinction time (absorption at the floor), if reached within horizon.
    pub extinction_time: Option<f64>,
    /// Level at which the path is declared absorbed (the skeleton resolution).
    pub absorb_floor: f64,
    /// Z-time horizon actually covered: `U(levy horizon)` or the extinction time.
    pub z_horizon: f64,
}

impl CsbpPath {
    /// `U(s)` for `s` in Lévy time (before extinction).
    pub fn time_change(&self, s: f64) -> f64 {
        let seg = match self
            .segments
            .binary_search_by(|g| g.t0.total_cmp(&s))
        {
            Ok(i) => self.segments[i],
            Err(0) => self.segments[0],
            Err(i) => self.segments[i - 1],
        };
        let dt = (s - seg.t0).min(seg.len);
        seg.u0 + segment_u(seg.x0, seg.slope, dt)
    }

    /// `U^{-1}(t)` for `t` in CSBP time (before extinction).
    pub fn time_change_inverse(&self, t: f64) -> f64 {
        let seg = match self.segments.binary_search_by(|g| g.u0.total_cmp(&t)) {
            Ok(i) => self.segments[i],
            Err(0) => self.segments[0],
            Err(i) => self.segments[i - 1],
        };
        let du = t - seg.u0;
        seg.t0 + segment_u_inverse(seg.x0, seg.slope, du)
    }

    /// Z value at CSBP time `t` (0 after extinction).
    pub fn value_at(&self, t: f64) -> f64 {
        if let Some(zeta) = self.extinction_time {
            if t >= zeta {
                return 0.0;
            }
        }
        let seg = match self.segments.binary_search_by(|g| g.u0.total_cmp(&t)) {
            Ok(i) => self.segments[i],
            Err(0) => self.segments[0],
            Err(i) => self.segments[i - 1],
        };
        let ds = segment_u_inverse(seg.x0, seg.slope, t - seg.u0);
        seg.x0 + seg.slope * ds
    }

    pub fn is_extinct_by(&self, t: f64) -> bool {
        self.extinction_time.map_or(false, |z| z <= t)
    }

    pub fn write_csv(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "t_z,delta,z_after")?;
        for i in 0..self.z_times.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.z_times[i], self.z_sizes[i], self.z_after[i]
            )?;
        }
        Ok(())
    }
}

/// `∫_0^dt du/(x0 + slope·u)`.
fn segment_u(x0: f64, slope: f64, dt: f64) -> f64 {
    if dt <= 0.0 {
        return 0.0;
    }
    if slope == 0.0 {
        dt / x0
    } else {
        ((x0 + slope * dt) / x0).ln() / slope
    }
}

/// Inverse of `segment_u` in `dt`.
fn segment_u_inverse(x0: f64, slope: f64, du: f64) -> f64 {
    if du <= 0.0 {
        return 0.0;
    }
    if slope == 0.0 {
        du * x0
    } else {
        x0 * ((slope * du).exp() - 1.0) / slope
    }
}

/// Apply the Lamperti time change to a skeleton. The path is absorbed when
/// `X` drifts down to `absorb_floor` (the time-change integral of the exact
/// creeping passage diverges; the floor pins extinction at the skeleton's
/// resolution scale).
pub fn lamperti(skel: &JumpSkeleton, absorb_floor: f64) -> CsbpPath {
    let floor = absorb_floor.max(1e-12);
    let mut segments = Vec::with_capacity(skel.len() + 1);
    let mut z_times = Vec::with_capacity(skel.len());
    let mut z_sizes = Vec::with_capacity(skel.len());
    let mut z_after = Vec::with_capacity(skel.len());
    let mut t0 = 0.0;
    let mut u0 = 0.0;
    let mut x = skel.x0;
    let mut extinction = None;

    let n = skel.len();
    for i in 0..=n {
        let seg_end = if i < n { skel.times[i] } else { skel.horizon };
        let len = seg_end - t0;
        segments.push(Segment { t0, u0, x0: x, slope: skel.drift, len });
        // does X reach the floor inside this segment?
        let x_end = x + skel.drift * len;
        if x <= floor || (skel.drift < 0.0 && x_end < floor) {
            let dt_hit = if x <= floor { 0.0 } else { (floor - x) / skel.drift };
            let zeta = u0 + segment_u(x, skel.drift, dt_hit);
            extinction = Some(zeta);
            break;
        }
        u0 += segment_u(x, skel.drift, len);
        t0 = seg_end;
        if i < n {
            let size = skel.sizes[i];
            x = x_end + size;
            z_times.push(u0);
            z_sizes.push(size);
            z_after.push(x);
        } else {
            x = x_end;
        }
    }
    let z_horizon = extinction.unwrap_or(u0);
    CsbpPath {
        segments,
        z_times,
        z_sizes,
        z_after,
        extinction_time: extinction,
        absorb_floor: floor,
        z_horizon,
    }
}

/// The point process `π^Z` of normalized jump sizes: `(Δ_i / Z(t̃_i), t̃_i)`
/// for the true jumps before extinction.
pub fn pi_z(path: &CsbpPath) -> Vec<(f64, f64)> {
    path.z_times
        .iter()
        .zip(path.z_sizes.iter().zip(&path.z_after))
        .map(|(&t, (&d, &z))| (d / z, t))
        .collect()
}

/// Convenience: the raw jump point process `π^X = (Δ_i, t_i)`.
pub fn pi_x(skel: &JumpSkeleton) -> Vec<(f64, f64)> {
    skel.sizes.iter().cloned().zip(skel.times.iter().cloned()).collect()
}

pub use crate::measure::PowerPiece as _PowerPieceReexportGuard;
