//! Independent reference implementation of the frame, written straight from
//! the defining formulas with plain floats and no shared code paths.

#![allow(dead_code)]

/// `(level, k, first_half)` of index `n ≥ 3`.
pub fn split(n: usize) -> (u32, usize, bool) {
    assert!(n >= 3);
    let m = usize::BITS - 1 - (n - 1).leading_zeros();
    let j = n - (1 << m);
    let half = 1usize << (m - 1);
    if j <= half {
        (m, j, true)
    } else {
        (m, j - half, false)
    }
}

/// `(left, peak, right)` of the hat carried by index `n ≥ 3`.
pub fn hat_points(n: usize) -> (f64, f64, f64) {
    let (m, k, _) = split(n);
    let scale = (1u64 << m) as f64;
    let k = k as f64;
    (
        (2.0 * k - 2.0) / scale,
        (2.0 * k - 1.0) / scale,
        2.0 * k / scale,
    )
}

pub fn phi(n: usize, x: f64) -> f64 {
    match n {
        1 => x,
        2 => 1.0 - x,
        _ => {
            let (l, p, r) = hat_points(n);
            if x <= l || x >= r {
                0.0
            } else if x <= p {
                (x - l) / (p - l)
            } else {
                (r - x) / (r - p)
            }
        }
    }
}

/// Coefficients `A_1(f), …, A_count(f)` by the recursive definition: each
/// functional subtracts the previous partial sum evaluated term by term.
pub fn coefficients(
    f: &dyn Fn(f64) -> f64,
    lambda: &dyn Fn(usize) -> f64,
    count: usize,
) -> Vec<f64> {
    let mut c: Vec<f64> = Vec::with_capacity(count);
    let partial =
        |c: &[f64], x: f64| -> f64 { c.iter().enumerate().map(|(i, a)| a * phi(i + 1, x)).sum() };
    for n in 1..=count {
        let value = match n {
            1 => f(1.0),
            2 => f(0.0),
            _ => {
                let (l, p, r) = hat_points(n);
                let (_, _, first) = split(n);
                let previous = partial(&c, p);
                if first {
                    let lam = lambda(n);
                    lam * f(l) + (1.0 - lam) * f(r) - previous
                } else {
                    f(p) - previous
                }
            }
        };
        c.push(value);
    }
    c
}

pub fn partial_sum(c: &[f64], x: f64) -> f64 {
    c.iter().enumerate().map(|(i, a)| a * phi(i + 1, x)).sum()
}

/// `max |f(x) − f(y)|` over grid pairs with `|x − y| ≤ delta`, by brute force.
pub fn modulus(f: &dyn Fn(f64) -> f64, delta: f64, level: u32) -> f64 {
    let n = 1usize << level;
    let values: Vec<f64> = (0..=n).map(|i| f(i as f64 / n as f64)).collect();
    let reach = ((delta * n as f64).floor() as usize).min(n);
    let mut best = 0.0f64;
    for i in 0..=n {
        for j in i..=(i + reach).min(n) {
            best = best.max((values[i] - values[j]).abs());
        }
    }
    best
}
