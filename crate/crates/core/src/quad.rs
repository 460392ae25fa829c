//! One-dimensional quadrature: globally adaptive 21-point Gauss–Kronrod on
//! finite intervals, dyadic panel marching on half-lines, and a substitution
//! wrapper for integrable endpoint singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_139_886,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed nodes `XGK[1], XGK[3], ..., XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const MAX_SEGMENTS: usize = 20_000;
const MAX_PANELS: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub const fn rel(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error("subdivision limit reached with value {value:e} and error estimate {error:e}")]
    SubdivisionLimit { value: f64, error: f64 },
    #[error("half-line integral from {start} did not settle after {panels} panels (partial value {value:e})")]
    TailNotSettled { start: f64, panels: usize, value: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment, QuadError> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64, QuadError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };

    let fc = eval(centre)?;
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let (f1, f2) = (eval(centre - dx)?, eval(centre + dx)?);
        fv1[k] = f1;
        fv2[k] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[k] * (f1 + f2);
        resabs += WGK[k] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let (f1, f2) = (eval(centre - dx)?, eval(centre + dx)?);
        fv1[k] = f1;
        fv2[k] = f2;
        resk += WGK[k] * (f1 + f2);
        resabs += WGK[k] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for k in 0..10 {
        resasc += WGK[k] * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }
    let width = half.abs();
    let resabs = resabs * width;
    let resasc = resasc * width;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment { a, b, value: resk * half, error, resabs })
}

/// Single 21-point Kronrod rule on `[a, b]`, no refinement.
pub fn kronrod21<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> Result<Estimate, QuadError> {
    let s = gk21(&mut f, a, b)?;
    Ok(Estimate { value: s.value, error: s.error })
}

/// Globally adaptive integration over the finite interval `[a, b]`.
///
/// The worst segment is bisected until the summed error estimate meets the
/// tolerance. Requests below the round-off floor of the rule are clamped to it.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Estimate, QuadError> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let first = gk21(&mut f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut resabs = first.resabs;
    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    heap.push(first);

    loop {
        let floor = 100.0 * f64::EPSILON * resabs;
        if error <= tol.target(value).max(floor) {
            break;
        }
        if heap.len() + frozen.len() >= MAX_SEGMENTS {
            return Err(QuadError::SubdivisionLimit { value, error });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            frozen.push(worst);
            continue;
        }
        let left = gk21(&mut f, worst.a, mid)?;
        let right = gk21(&mut f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the incremental updates.
    let mut segments: Vec<Segment> = heap.into_vec();
    segments.extend(frozen);
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().map(|s| s.value).sum();
    let error = segments.iter().map(|s| s.error).sum();
    Ok(Estimate { value, error })
}

/// Integral over `[a, b]` for integrands with an integrable singularity of
/// power type at `a`: substitutes `x = a + (b - a) u^4`.
pub fn integrate_left_singular<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Estimate, QuadError> {
    let h = b - a;
    integrate(
        |u| {
            if u == 0.0 {
                return 0.0;
            }
            let u3 = u * u * u;
            4.0 * h * u3 * f(a + h * u3 * u)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integral over `[a, ∞)` by panels `[a, a+w], [a+w, a+3w], ...` of doubling
/// width.
///
/// Marching stops once three consecutive panels are negligible, or once the
/// panel contributions decay geometrically with a stable ratio, in which case
/// the remaining tail is summed as a geometric series. Power-law tails produce
/// exactly such ratios on dyadic panels.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    width: f64,
    tol: Tolerance,
) -> Result<Estimate, QuadError> {
    let mut lo = a;
    let mut w = width;
    let mut total: f64 = 0.0;
    let mut error = 0.0;
    let mut panels: Vec<f64> = Vec::new();
    let mut quiet = 0;
    for k in 0..MAX_PANELS {
        let hi = lo + w;
        let panel_tol = Tolerance::new(tol.abs.max(0.05 * tol.rel * total.abs()), 0.5 * tol.rel);
        let est = integrate(&mut f, lo, hi, panel_tol)?;
        total += est.value;
        error += est.error;
        panels.push(est.value);
        lo = hi;
        w *= 2.0;

        let target = tol.target(total);
        if est.value.abs() <= 1e-3 * target {
            quiet += 1;
            if quiet >= 3 && k >= 4 {
                return Ok(Estimate { value: total, error });
            }
        } else {
            quiet = 0;
        }

        let n = panels.len();
        if n >= 6 {
            let (p0, p1, p2) = (panels[n - 3], panels[n - 2], panels[n - 1]);
            if p0 != 0.0 && p1 != 0.0 && (p0 > 0.0) == (p1 > 0.0) && (p1 > 0.0) == (p2 > 0.0) {
                let r1 = p1 / p0;
                let r2 = p2 / p1;
                if r2 > 0.0 && r2 < 0.97 && r1 > 0.0 && r1 < 1.0 {
                    let tail = p2 * r2 / (1.0 - r2);
                    let tail_err = p2.abs() * (r2 - r1).abs() / ((1.0 - r2) * (1.0 - r2));
                    if tail_err <= 0.25 * tol.target(total + tail) {
                        return Ok(Estimate { value: total + tail, error: error + tail_err });
                    }
                }
            }
        }
    }
    Err(QuadError::TailNotSettled { start: a, panels: MAX_PANELS, value: total })
}

/// Composite Simpson rule with `intervals` (rounded up to even) subintervals.
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let y = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += y;
        } else {
            even += y;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Composite trapezoid rule on `points` equispaced nodes including endpoints.
pub fn trapezoid<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, points: usize) -> f64 {
    let n = points.max(2) - 1;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}
