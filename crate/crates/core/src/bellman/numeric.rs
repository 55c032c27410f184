//! Small numerical kernels shared by the certificates: symmetric 2x2
//! eigenvalues, central-difference Hessians with Richardson refinement, and
//! composite Gauss-Legendre quadrature.

/// Eigenvalues `(min, max)` of `[[a, b], [b, c]]`. The smaller one is taken
/// as `det / max` so that it keeps full relative accuracy when the two
/// eigenvalues differ by many orders of magnitude.
pub fn sym2_eigenvalues(a: f64, b: f64, c: f64) -> (f64, f64) {
    let half_tr = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let hi = half_tr + r;
    let lo = if hi > 0.0 { (a * c - b * b) / hi } else { half_tr - r };
    (lo, hi)
}

/// Central-difference Hessian with per-coordinate steps `h`.
pub fn fd_hessian<const D: usize>(f: &impl Fn(&[f64; D]) -> f64, x: &[f64; D], h: &[f64; D]) -> [[f64; D]; D] {
    let eval = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut p = *x;
        p[di] += si * h[di];
        p[dj] += sj * h[dj];
        f(&p)
    };
    let f0 = f(x);
    let mut out = [[0.0; D]; D];
    for i in 0..D {
        let mut plus = *x;
        plus[i] += h[i];
        let mut minus = *x;
        minus[i] -= h[i];
        out[i][i] = (f(&plus) - 2.0 * f0 + f(&minus)) / (h[i] * h[i]);
        for j in 0..i {
            let v = (eval(i, 1.0, j, 1.0) - eval(i, 1.0, j, -1.0) - eval(i, -1.0, j, 1.0)
                + eval(i, -1.0, j, -1.0))
                / (4.0 * h[i] * h[j]);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Richardson-extrapolated Hessian `(4 H(h/2) - H(h)) / 3`, fourth order.
pub fn fd_hessian_richardson<const D: usize>(
    f: &impl Fn(&[f64; D]) -> f64,
    x: &[f64; D],
    h: &[f64; D],
) -> [[f64; D]; D] {
    let coarse = fd_hessian(f, x, h);
    let half = h.map(|v| 0.5 * v);
    let fine = fd_hessian(f, x, &half);
    let mut out = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            out[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
        }
    }
    out
}

/// `max |S (A - B) S| / max |S B S|` with `S = diag(scale)`: the relative
/// discrepancy of two Hessians measured in coordinates rescaled to unit size.
pub fn scaled_relative_error<const D: usize>(
    approx: &[[f64; D]; D],
    exact: &[[f64; D]; D],
    scale: &[f64; D],
) -> f64 {
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..D {
        for j in 0..D {
            let s = scale[i] * scale[j];
            num = num.max(((approx[i][j] - exact[i][j]) * s).abs());
            den = den.max((exact[i][j] * s).abs());
        }
    }
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

const GL5_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

/// Composite five-point Gauss-Legendre rule on `[a, b]` with `panels` panels.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        let s: f64 = GL5_NODES
            .iter()
            .zip(GL5_WEIGHTS)
            .map(|(x, w)| w * f(mid + half * x))
            .sum();
        total += half * s;
    }
    total
}

/// `-(1/2) int_{-1}^{1} (1 - |t|) b''(t) dt`, which equals the midpoint gap
/// `b(0) - (b(1) + b(-1)) / 2` for a smooth `b`.
pub fn chord_gap_integral(second_derivative: impl Fn(f64) -> f64, panels: usize) -> f64 {
    let kernel = |t: f64| (1.0 - t.abs()) * second_derivative(t);
    -0.5 * (gauss_legendre(kernel, -1.0, 0.0, panels) + gauss_legendre(kernel, 0.0, 1.0, panels))
}
