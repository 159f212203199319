use super::{LocalResult, OptimizerConfig};

/// Simplex rebuilds around the incumbent after the first collapse.
const MAX_ROUNDS: usize = 4;

/// Nelder-Mead with the dimension-dependent coefficients of Gao and Han.
///
/// A round ends when the simplex values spread less than `value_tol` or its
/// diameter drops below `step_tol`. The simplex is then rebuilt at the best
/// vertex with the initial step; the search counts as converged once a
/// rebuilt round improves by no more than `value_tol`.
pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: Vec<f64>, scale: f64, cfg: &OptimizerConfig) -> LocalResult {
    let n = x0.len();
    let mut best_f = f(&x0);
    let mut best_x = x0;
    if n == 0 {
        return LocalResult { x: best_x, value: best_f, iterations: 0, converged: true };
    }
    let nf = n as f64;
    let alpha = 1.0;
    let gamma = 1.0 + 2.0 / nf;
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;

    let mut iterations = 0;
    let mut converged = false;
    for round in 0..MAX_ROUNDS {
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
        pts.push(best_x.clone());
        vals.push(best_f);
        for i in 0..n {
            let mut p = best_x.clone();
            p[i] += scale;
            vals.push(f(&p));
            pts.push(p);
        }
        let start_f = best_f;
        let mut round_done = false;
        let mut centroid = vec![0.0; n];
        while iterations < cfg.max_iters {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            pts = order.iter().map(|&i| std::mem::take(&mut pts[i])).collect();
            vals = order.iter().map(|&i| vals[i]).collect();

            let spread = vals[n] - vals[0];
            let diameter = pts[1..]
                .iter()
                .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= cfg.value_tol || diameter <= cfg.step_tol {
                round_done = true;
                break;
            }
            iterations += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for p in &pts[..n] {
                for (c, v) in centroid.iter_mut().zip(p) {
                    *c += v / nf;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (c - w)).collect()
            };
            let xr = along(alpha);
            let fr = f(&xr);
            if fr < vals[0] {
                let xe = along(alpha * gamma);
                let fe = f(&xe);
                if fe < fr {
                    pts[n] = xe;
                    vals[n] = fe;
                } else {
                    pts[n] = xr;
                    vals[n] = fr;
                }
            } else if fr < vals[n - 1] {
                pts[n] = xr;
                vals[n] = fr;
            } else {
                let (xc, fc, accept) = if fr < vals[n] {
                    let xc = along(alpha * rho);
                    let fc = f(&xc);
                    (xc, fc, fc <= fr)
                } else {
                    let xc = along(-rho);
                    let fc = f(&xc);
                    (xc, fc, fc < vals[n])
                };
                if accept {
                    pts[n] = xc;
                    vals[n] = fc;
                } else {
                    let anchor = pts[0].clone();
                    for i in 1..=n {
                        for (v, a) in pts[i].iter_mut().zip(&anchor) {
                            *v = a + sigma * (*v - a);
                        }
                        vals[i] = f(&pts[i]);
                    }
                }
            }
        }
        let (bi, &bf) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty simplex");
        if bf < best_f {
            best_f = bf;
            best_x = pts[bi].clone();
        }
        if !round_done {
            break;
        }
        if round > 0 && start_f - best_f <= cfg.value_tol {
            converged = true;
            break;
        }
        converged = round + 1 == MAX_ROUNDS;
    }
    LocalResult { x: best_x, value: best_f, iterations, converged }
}
