//! Nelder–Mead simplex minimization with dimension-adaptive coefficients
//! (reflection 1, expansion 1 + 2/n, contraction 3/4 − 1/(2n),
//! shrink 1 − 1/n).

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn adaptive(n: usize) -> Self {
        let n = n as f64;
        Self {
            reflect: 1.0,
            expand: 1.0 + 2.0 / n,
            contract: 0.75 - 0.5 / n,
            shrink: 1.0 - 1.0 / n,
        }
    }
}

/// Largest Euclidean distance from the best vertex to any other vertex.
fn diameter(points: &[Vec<f64>]) -> f64 {
    let best = &points[0];
    points[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(best)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn affine(base: &[f64], toward: &[f64], t: f64) -> Vec<f64> {
    // base + t (toward - base)
    base.iter().zip(toward).map(|(b, w)| b + t * (w - b)).collect()
}

/// Minimizes `f` from an axis-aligned simplex of edge `step` around `x0`.
/// Stops once the simplex diameter falls below `tol` or after
/// `max_iterations` iterations.
pub fn minimize<F>(f: &F, x0: &[f64], step: f64, max_iterations: usize, tol: f64) -> LocalResult
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = x0.len();
    assert!(n >= 1, "Nelder-Mead needs at least one dimension");
    let coef = Coefficients::adaptive(n.max(2));

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    loop {
        // Order vertices best to worst. Stable sort keeps ties deterministic.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        points = order.iter().map(|&i| points[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if diameter(&points) < tol {
            converged = true;
            break;
        }
        if iterations >= max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for p in &points[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }

        let worst = points[n].clone();
        let reflected = affine(&centroid, &worst, -coef.reflect);
        let f_reflected = f(&reflected);

        if f_reflected < values[0] {
            let expanded = affine(&centroid, &worst, -coef.expand);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                points[n] = expanded;
                values[n] = f_expanded;
            } else {
                points[n] = reflected;
                values[n] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[n - 1] {
            points[n] = reflected;
            values[n] = f_reflected;
            continue;
        }

        let (candidate, f_candidate, threshold) = if f_reflected < values[n] {
            let outside = affine(&centroid, &reflected, coef.contract);
            let fo = f(&outside);
            (outside, fo, f_reflected)
        } else {
            let inside = affine(&centroid, &worst, coef.contract);
            let fi = f(&inside);
            (inside, fi, values[n])
        };
        if f_candidate <= threshold {
            points[n] = candidate;
            values[n] = f_candidate;
            continue;
        }

        let best = points[0].clone();
        for i in 1..=n {
            points[i] = affine(&best, &points[i], coef.shrink);
            values[i] = f(&points[i]);
        }
    }

    LocalResult {
        x: points.swap_remove(0),
        value: values[0],
        iterations,
        converged,
    }
}
