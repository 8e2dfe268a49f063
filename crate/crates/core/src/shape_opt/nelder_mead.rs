//! Nelder–Mead simplex search with an observer hook for early stopping.

#[derive(Debug, Clone, PartialEq)]
pub struct NmOptions {
    pub initial_step: f64,
    pub max_iter: usize,
    /// Stop when the simplex diameter falls below this.
    pub xtol: f64,
    /// Stop when the spread of simplex values falls below ftol·(|f_best| + 1e-300).
    pub ftol: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions { initial_step: 0.5, max_iter: 2000, xtol: 1e-10, ftol: 1e-14 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub stopped_by_observer: bool,
    /// Best value and simplex diameter after each iteration.
    pub trace: Vec<(f64, f64)>,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for a in simplex.iter().skip(1) {
        let s: f64 = a.iter().zip(&simplex[0]).map(|(x, y)| (x - y).powi(2)).sum();
        d = d.max(s.sqrt());
    }
    d
}

/// Minimizes f from x0. The observer sees the best point after every
/// iteration and returns true to stop.
pub fn nelder_mead<F, O>(mut f: F, x0: &[f64], opts: &NmOptions, mut observer: O) -> NmOutcome
where
    F: FnMut(&[f64]) -> f64,
    O: FnMut(&[f64], f64) -> bool,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut stopped = false;
    let mut iter = 0;
    while iter < opts.max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let diam = diameter(&simplex);
        trace.push((values[0], diam));
        if observer(&simplex[0], values[0]) {
            stopped = true;
            break;
        }
        let spread = values[n] - values[0];
        if n == 0 || diam < opts.xtol || (spread.is_finite() && spread <= opts.ftol * (values[0].abs() + 1e-300)) {
            converged = true;
            break;
        }
        iter += 1;
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|x| x[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let x: Vec<f64> = (0..n).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
            values[i] = eval(&x, &mut evals);
            simplex[i] = x;
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    NmOutcome {
        x: simplex[best].clone(),
        f: values[best],
        iterations: iter,
        evaluations: evals,
        converged,
        stopped_by_observer: stopped,
        trace,
    }
}

/// Golden-section minimization on [a, b]; returns (x, f(x)).
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
