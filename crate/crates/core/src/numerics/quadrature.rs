//! Globally adaptive 21-point Gauss–Kronrod quadrature with user breakpoints
//! and mapped infinite tails.
//!
//! Narrow resonances must be announced through breakpoints: the adaptive
//! refinement only bisects intervals it has already seen, so a peak much
//! narrower than the initial intervals can be missed entirely.

use alloc::vec::Vec;

use crate::{CoreError, Result};
#[allow(unused_imports)] // only unused when a dependency links std
use num_traits::Float;

/// Change of variables used on semi-infinite pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailMap {
    /// `ν = a + s·t/(1−t)`; exact for integrands decaying like `ν⁻²`.
    #[default]
    Algebraic,
    /// `ν = a − s·ln(1−t)`; suited to exponentially decaying integrands.
    Exponential,
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections.
    pub max_subdivisions: usize,
    pub tail_map: TailMap,
    /// Length scale `s` of the tail maps; derived from the breakpoints when `None`.
    pub tail_scale: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 0.0, max_subdivisions: 2000, tail_map: TailMap::Algebraic, tail_scale: None }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }
}

/// Value and error estimate of a converged integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

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

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
enum Piece {
    Finite,
    Upper { a: f64, s: f64 },
    Lower { a: f64, s: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    piece: Piece,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    splittable: bool,
}

struct Integrand<'f, F> {
    f: &'f F,
    map: TailMap,
    evaluations: usize,
    bad_value: bool,
}

impl<F: Fn(f64) -> f64> Integrand<'_, F> {
    fn eval(&mut self, piece: Piece, t: f64) -> f64 {
        self.evaluations += 1;
        let (x, jac) = match (piece, self.map) {
            (Piece::Finite, _) => (t, 1.0),
            (Piece::Upper { a, s }, TailMap::Algebraic) => {
                let u = 1.0 - t;
                (a + s * t / u, s / (u * u))
            }
            (Piece::Lower { a, s }, TailMap::Algebraic) => {
                let u = 1.0 - t;
                (a - s * t / u, s / (u * u))
            }
            (Piece::Upper { a, s }, TailMap::Exponential) => (a - s * (-t).ln_1p(), s / (1.0 - t)),
            (Piece::Lower { a, s }, TailMap::Exponential) => (a + s * (-t).ln_1p(), s / (1.0 - t)),
        };
        if !x.is_finite() || !jac.is_finite() {
            return 0.0;
        }
        let y = (self.f)(x);
        if !y.is_finite() {
            self.bad_value = true;
            return 0.0;
        }
        y * jac
    }

    /// One 21-point Kronrod panel on `[a, b]`, returning (integral, error).
    fn qk21(&mut self, piece: Piece, a: f64, b: f64) -> (f64, f64) {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let abs_half = half.abs();
        let fc = self.eval(piece, center);
        let mut resg = 0.0;
        let mut resk = WGK[10] * fc;
        let mut resabs = resk.abs();
        let mut fv1 = [0.0; 10];
        let mut fv2 = [0.0; 10];
        for j in 0..5 {
            let jtw = 2 * j + 1;
            let absc = half * XGK[jtw];
            let f1 = self.eval(piece, center - absc);
            let f2 = self.eval(piece, center + absc);
            fv1[jtw] = f1;
            fv2[jtw] = f2;
            resg += WG[j] * (f1 + f2);
            resk += WGK[jtw] * (f1 + f2);
            resabs += WGK[jtw] * (f1.abs() + f2.abs());
        }
        for j in 0..5 {
            let jtwm1 = 2 * j;
            let absc = half * XGK[jtwm1];
            let f1 = self.eval(piece, center - absc);
            let f2 = self.eval(piece, center + absc);
            fv1[jtwm1] = f1;
            fv2[jtwm1] = f2;
            resk += WGK[jtwm1] * (f1 + f2);
            resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
        }
        let reskh = 0.5 * resk;
        let mut resasc = WGK[10] * (fc - reskh).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
        }
        let result = resk * half;
        resabs *= abs_half;
        resasc *= abs_half;
        let mut err = ((resk - resg) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        (result, err)
    }
}

/// Integrates `f` over `[a, b]`, where `a` may be `-∞` and `b` may be `+∞`.
///
/// `breakpoints` outside `(a, b)` are ignored. The tails start at the outermost
/// breakpoint (or at 0 when there is none).
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    if a.is_nan() || b.is_nan() || !(a < b) {
        return Err(CoreError::Domain("integration bounds must satisfy a < b"));
    }
    if !(cfg.rel_tol >= 0.0 && cfg.abs_tol >= 0.0) || (cfg.rel_tol == 0.0 && cfg.abs_tol == 0.0) {
        return Err(CoreError::Domain("quadrature tolerances must be nonnegative and not both zero"));
    }
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|p| p.is_finite() && *p > a && *p < b).collect();
    if a.is_finite() {
        pts.push(a);
    }
    if b.is_finite() {
        pts.push(b);
    }
    if pts.is_empty() {
        pts.push(0.0);
    }
    pts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    pts.dedup();

    let lo = pts[0];
    let hi = pts[pts.len() - 1];
    let scale = cfg.tail_scale.unwrap_or_else(|| {
        let s = (hi - lo).max(lo.abs()).max(hi.abs());
        if s > 0.0 {
            s
        } else {
            1.0
        }
    });

    let mut segments: Vec<Segment> = Vec::with_capacity(pts.len() + 2 + cfg.max_subdivisions);
    let mut push = |piece: Piece, sa: f64, sb: f64| {
        segments.push(Segment { piece, a: sa, b: sb, value: 0.0, error: 0.0, splittable: true });
    };
    if a == f64::NEG_INFINITY {
        push(Piece::Lower { a: lo, s: scale }, 0.0, 1.0);
    }
    for w in pts.windows(2) {
        push(Piece::Finite, w[0], w[1]);
    }
    if b == f64::INFINITY {
        push(Piece::Upper { a: hi, s: scale }, 0.0, 1.0);
    }

    let mut integrand = Integrand { f: &f, map: cfg.tail_map, evaluations: 0, bad_value: false };
    for seg in segments.iter_mut() {
        let (v, e) = integrand.qk21(seg.piece, seg.a, seg.b);
        seg.value = v;
        seg.error = e;
    }

    let mut subdivisions = 0usize;
    loop {
        if integrand.bad_value {
            return Err(CoreError::Quadrature { value: f64::NAN, error: f64::INFINITY, subdivisions });
        }
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= target {
            return Ok(Quadrature { value: total, abs_error: total_err, evaluations: integrand.evaluations });
        }
        let worst = segments.iter().enumerate().filter(|(_, s)| s.splittable).fold(None::<(usize, f64)>, |acc, (i, s)| match acc {
            Some((_, e)) if e >= s.error => acc,
            _ => Some((i, s.error)),
        });
        let Some((idx, _)) = worst else {
            return Err(CoreError::Quadrature { value: total, error: total_err, subdivisions });
        };
        if subdivisions >= cfg.max_subdivisions {
            return Err(CoreError::Quadrature { value: total, error: total_err, subdivisions });
        }
        let seg = segments[idx];
        let mid = 0.5 * (seg.a + seg.b);
        let width = seg.b - seg.a;
        let tiny = 100.0 * f64::EPSILON * seg.a.abs().max(seg.b.abs()).max(f64::MIN_POSITIVE);
        if !(mid > seg.a && mid < seg.b) || width <= tiny {
            segments[idx].splittable = false;
            continue;
        }
        let (v1, e1) = integrand.qk21(seg.piece, seg.a, mid);
        let (v2, e2) = integrand.qk21(seg.piece, mid, seg.b);
        segments[idx] = Segment { piece: seg.piece, a: seg.a, b: mid, value: v1, error: e1, splittable: true };
        segments.push(Segment { piece: seg.piece, a: mid, b: seg.b, value: v2, error: e2, splittable: true });
        subdivisions += 1;
    }
}

/// Integrates `f` over the whole real line. The caller guarantees decay at
/// least as fast as `|ν|⁻²`.
pub fn integrate_real_line<F>(f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    integrate(f, f64::NEG_INFINITY, f64::INFINITY, breakpoints, cfg)
}

/// Appends `center` and `center ± h·4^k` for `k = 0, 1, …` while `h·4^k ≤ reach`.
///
/// Used to pre-split around a Lorentzian peak of half width `h`, so every
/// initial interval sees the peak on a comparable relative scale.
pub fn peak_breakpoints(center: f64, half_width: f64, reach: f64, out: &mut Vec<f64>) {
    out.push(center);
    if !(half_width > 0.0) || !half_width.is_finite() {
        return;
    }
    let mut d = half_width;
    while d <= reach {
        out.push(center - d);
        out.push(center + d);
        d *= 4.0;
    }
}
