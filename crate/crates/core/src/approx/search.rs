//! Derivative-free minimizers for convex objectives.

/// Golden-section search for a minimizer of a convex function on `[a, b]`.
pub(crate) fn golden_section(f: &mut dyn FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Poll directions: every nonzero vector of `{-1, 0, 1}^n` up to three
/// variables, otherwise coordinates and pairwise diagonals.
pub(crate) fn poll_directions(n: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    if n <= 3 {
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let d: Vec<f64> = (0..n)
                .map(|_| {
                    let v = (c % 3) as f64 - 1.0;
                    c /= 3;
                    v
                })
                .collect();
            if d.iter().any(|&v| v != 0.0) {
                dirs.push(d);
            }
        }
        // shortest moves first
        dirs.sort_by_key(|d| d.iter().filter(|&&v| v != 0.0).count());
    } else {
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut d = vec![0.0; n];
                d[i] = s;
                dirs.push(d);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut d = vec![0.0; n];
                    d[i] = si;
                    d[j] = sj;
                    dirs.push(d);
                }
            }
        }
    }
    dirs
}

pub(crate) struct PatternOptions {
    /// Initial step per coordinate.
    pub scale: Vec<f64>,
    /// Symmetric box `|v_j| <= bound_j`.
    pub bounds: Option<Vec<f64>>,
    /// Stop once the step multiplier falls below this.
    pub min_step: f64,
    pub max_evals: usize,
}

/// Compass search with opportunistic polling, expansion after a successful
/// poll and contraction after a failed one. `hint` may supply an extra
/// direction (in units of `scale`) tried first at the current point.
pub(crate) fn pattern_search(
    f: &mut dyn FnMut(&[f64]) -> f64,
    hint: &mut dyn FnMut(&[f64]) -> Option<Vec<f64>>,
    start: Vec<f64>,
    opts: &PatternOptions,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let dirs = poll_directions(n);
    let clamp = |v: &mut Vec<f64>| {
        if let Some(b) = &opts.bounds {
            for (x, &r) in v.iter_mut().zip(b) {
                *x = x.clamp(-r, r);
            }
        }
    };
    let mut x = start;
    clamp(&mut x);
    let mut fx = f(&x);
    let mut evals = 1;
    let mut h = 1.0;
    let mut first = 0;
    while h > opts.min_step && evals < opts.max_evals {
        let mut moved = false;
        let extra = hint(&x);
        let order = extra.iter().cloned().chain((0..dirs.len()).map(|k| dirs[(first + k) % dirs.len()].clone()));
        for (k, d) in order.enumerate() {
            let mut y: Vec<f64> = x.iter().zip(&d).zip(&opts.scale).map(|((a, b), s)| a + h * s * b).collect();
            clamp(&mut y);
            if y == x {
                continue;
            }
            let fy = f(&y);
            evals += 1;
            if fy < fx - 1e-15 * fx.abs().max(1.0) {
                x = y;
                fx = fy;
                moved = true;
                if extra.is_none() || k > 0 {
                    let idx = if extra.is_some() { k - 1 } else { k };
                    first = (first + idx) % dirs.len();
                }
                break;
            }
            if evals >= opts.max_evals {
                break;
            }
        }
        if moved {
            h = (h * 2.0).min(1.0);
        } else {
            h *= 0.5;
        }
    }
    (x, fx)
}
