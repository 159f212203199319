use super::{LocalResult, OptimizerConfig};

const GOLD: f64 = 1.618_033_988_749_895;
const CGOLD: f64 = 0.381_966_011_250_105;
const LINE_TOL: f64 = 1e-6;
const BRENT_ITERS: usize = 60;
const BRACKET_GROWTH: f64 = 100.0;

/// Powell's conjugate-direction method. Every line minimization counts as
/// one iteration against `max_iters`. A sweep over all directions that
/// lowers the value by at most `value_tol`, or moves the point by at most
/// `step_tol`, ends the search as converged.
pub fn powell(f: &dyn Fn(&[f64]) -> f64, x0: Vec<f64>, scale: f64, cfg: &OptimizerConfig) -> LocalResult {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    if n == 0 {
        return LocalResult { x, value: fx, iterations: 0, converged: true };
    }
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = scale;
            d
        })
        .collect();
    let mut iterations = 0;
    let mut converged = false;
    'outer: loop {
        let x_start = x.clone();
        let f_start = fx;
        let mut biggest = 0.0;
        let mut biggest_idx = 0;
        for (i, d) in dirs.iter().enumerate() {
            if iterations >= cfg.max_iters {
                break 'outer;
            }
            let before = fx;
            line_minimize(f, &mut x, &mut fx, d);
            iterations += 1;
            if before - fx > biggest {
                biggest = before - fx;
                biggest_idx = i;
            }
        }
        let moved = x.iter().zip(&x_start).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if f_start - fx <= cfg.value_tol || moved <= cfg.step_tol {
            converged = true;
            break;
        }
        let extrapolated: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| 2.0 * a - b).collect();
        let fe = f(&extrapolated);
        if fe < f_start {
            let t = 2.0 * (f_start - 2.0 * fx + fe) * (f_start - fx - biggest).powi(2)
                - biggest * (f_start - fe).powi(2);
            if t < 0.0 && iterations < cfg.max_iters {
                let d: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
                line_minimize(f, &mut x, &mut fx, &d);
                iterations += 1;
                dirs[biggest_idx] = dirs[n - 1].clone();
                dirs[n - 1] = d;
            }
        }
    }
    LocalResult { x, value: fx, iterations, converged }
}

/// Minimizes `t -> f(x + t d)` and moves `x` to the minimizer.
fn line_minimize(f: &dyn Fn(&[f64]) -> f64, x: &mut Vec<f64>, fx: &mut f64, d: &[f64]) {
    let point = |t: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + t * b).collect() };
    let g = |t: f64| f(&point(t));
    let (a, b, c, fb_bracket) = bracket(&g, 0.0, 1.0, *fx);
    let (t, ft) = brent(&g, a, b, c, fb_bracket);
    if ft < *fx {
        *x = point(t);
        *fx = ft;
    }
}

/// Golden-ratio bracketing with parabolic extrapolation. Returns
/// `(a, b, c, f(b))` with `b` between `a` and `c` and `f(b)` below both ends
/// when a bracket was found.
fn bracket(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, fa0: f64) -> (f64, f64, f64, f64) {
    let mut fa = fa0;
    let mut fb = g(b);
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + GOLD * (b - a);
    let mut fc = g(c);
    let mut guard = 0;
    while fb > fc && guard < 50 {
        guard += 1;
        let r = (b - a) * (fb - fc);
        let q = (b - c) * (fb - fa);
        let denom = 2.0 * (q - r).abs().max(1e-20) * (q - r).signum();
        let mut u = b - ((b - c) * q - (b - a) * r) / denom;
        let ulim = b + BRACKET_GROWTH * (c - b);
        let fu;
        if (b - u) * (u - c) > 0.0 {
            let fu_try = g(u);
            if fu_try < fc {
                return (b, u, c, fu_try);
            } else if fu_try > fb {
                return (a, b, u, fb);
            }
            u = c + GOLD * (c - b);
            fu = g(u);
        } else if (c - u) * (u - ulim) > 0.0 {
            let fu_try = g(u);
            if fu_try < fc {
                b = c;
                c = u;
                u = c + GOLD * (c - b);
                fb = fc;
                fc = fu_try;
                fu = g(u);
            } else {
                fu = fu_try;
            }
        } else if (u - ulim) * (ulim - c) >= 0.0 {
            u = ulim;
            fu = g(u);
        } else {
            u = c + GOLD * (c - b);
            fu = g(u);
        }
        a = b;
        b = c;
        c = u;
        fa = fb;
        fb = fc;
        fc = fu;
    }
    let _ = fa;
    (a, b, c, fb)
}

/// Brent's parabolic/golden-section minimization inside a bracket.
fn brent(g: &dyn Fn(f64) -> f64, a: f64, b: f64, c: f64, fb: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a < c { (a, c) } else { (c, a) };
    let (mut x, mut w, mut v) = (b, b, b);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let mut e: f64 = 0.0;
    let mut d: f64 = 0.0;
    for _ in 0..BRENT_ITERS {
        let xm = 0.5 * (lo + hi);
        let tol1 = LINE_TOL * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (lo - x) && p < q * (hi - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { lo - x } else { hi - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = g(u);
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
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
    (x, fx)
}
