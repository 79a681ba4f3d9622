//! Small numerical kernels: bracketing root finder, bracketed minimizer and
//! adaptive Gauss-Kronrod quadrature.

use alloc::vec::Vec;

use crate::math::{abs, sqrt};

const GOLDEN_SECTION: f64 = 0.381_966_011_250_105_1;

/// Brent's root finder on a bracket `[a, b]` with `f(a)·f(b) ≤ 0`.
///
/// Returns `None` when the bracket does not straddle a sign change.
pub fn brent_root<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.is_nan() || fb.is_nan() || (fa > 0.0) == (fb > 0.0) {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if abs(fc) < abs(fb) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * abs(b) + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if abs(m) <= tol || fb == 0.0 {
            return Some(b);
        }
        if abs(e) >= tol && abs(fa) > abs(fb) {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - abs(tol * q)).min(abs(e * q)) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if abs(d) > tol {
            d
        } else if m > 0.0 {
            tol
        } else {
            -tol
        };
        fb = f(b);
    }
    Some(b)
}

/// Brent's minimizer (golden section with parabolic steps) on `[a, b]`.
///
/// Returns `(argmin, min)`.
pub fn brent_minimize<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut x = a + GOLDEN_SECTION * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = sqrt(f64::EPSILON) * abs(x) + xtol / 3.0;
        let tol2 = 2.0 * tol1;
        if abs(x - xm) <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if abs(e) > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            if abs(p) < abs(0.5 * q * e) && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN_SECTION * e;
        }
        let u = if abs(d) >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    // The endpoints are never evaluated by the iteration itself.
    let (fa, fb) = (f(a), f(b));
    if fa < fx && fa <= fb {
        (a, fa)
    } else if fb < fx {
        (b, fb)
    } else {
        (x, fx)
    }
}

// QUADPACK qk15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod rule on `[a, b]`; returns `(integral, error estimate)`.
pub fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, abs((kronrod - gauss) * half))
}

/// Adaptive Gauss-Kronrod integration of `f` over the finite interval `[a, b]`.
///
/// Intervals are bisected until the summed error estimate falls below
/// `max(abs_tol, rel_tol·|I|)` or `max_intervals` is reached.
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_intervals: usize) -> f64
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let (first, err) = kronrod15(&mut f, a, b);
    let mut pieces: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(32);
    pieces.push((a, b, first, err));
    let mut total = first;
    let mut total_err = err;
    while total_err > abs_tol.max(rel_tol * abs(total)) && pieces.len() < max_intervals {
        // bisect the interval carrying the largest error
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, val, e) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (left, el) = kronrod15(&mut f, lo, mid);
        let (right, er) = kronrod15(&mut f, mid, hi);
        total += left + right - val;
        total_err += el + er - e;
        pieces.push((lo, mid, left, el));
        pieces.push((mid, hi, right, er));
    }
    // re-sum to shed the drift of the running update
    pieces.iter().map(|p| p.2).sum()
}
