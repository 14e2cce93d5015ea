//! Spherical Bessel functions of real argument.
//!
//! `j_n` uses Miller's downward recurrence normalized against the closed form
//! of `j_0` or `j_1`; `y_n` uses the upward recurrence, which is stable for it.

/// `j_0(x) .. j_{n_max}(x)` for `x > 0`.
pub fn spherical_jn(n_max: usize, x: f64) -> Vec<f64> {
    assert!(x > 0.0, "spherical_jn needs x > 0, got {x}");
    let mut out = vec![0.0; n_max + 1];
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;

    let start = n_max.max(x as usize) + 16 + (4.0 * (n_max as f64 + x).sqrt()) as usize;
    let mut upper = 0.0f64;
    let mut current = 1e-300f64;
    for n in (1..=start).rev() {
        // j_{n-1} = (2n+1)/x j_n - j_{n+1}
        let lower = (2 * n + 1) as f64 / x * current - upper;
        upper = current;
        current = lower;
        if n - 1 <= n_max {
            out[n - 1] = current;
        }
        if n <= n_max {
            out[n] = upper;
        }
        if current.abs() > 1e250 {
            let scale = 1e-250;
            current *= scale;
            upper *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    // `current` holds the unnormalized j_0 and `upper` j_1.
    let norm = if j0.abs() >= j1.abs() {
        j0 / current
    } else {
        j1 / upper
    };
    for v in out.iter_mut() {
        *v *= norm;
    }
    out
}

/// `y_0(x) .. y_{n_max}(x)` for `x > 0`.
pub fn spherical_yn(n_max: usize, x: f64) -> Vec<f64> {
    assert!(x > 0.0, "spherical_yn needs x > 0, got {x}");
    let (s, c) = x.sin_cos();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(-c / x);
    if n_max >= 1 {
        out.push(-c / (x * x) - s / x);
    }
    for n in 1..n_max {
        let next = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
        out.push(next);
    }
    out
}
