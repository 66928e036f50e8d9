//! Numerical kernels shared by the analysis modules.
//!
//! Everything here works on arbitrarily spaced grids. Two conventions keep
//! roundoff from polluting high-accuracy identity checks:
//!
//! - stencil node offsets are assembled by summing per-interval increments,
//!   never by differencing large cumulative coordinates;
//! - stencil weights are applied to center-subtracted values, so exact
//!   cancellation of the O(f) parts happens in real arithmetic, not floating
//!   point.
//!
//! Differentiation uses 3-point (first derivative) and 4-point (second
//! derivative) stencils, which are exact on quadratics/cubics respectively
//! and second-order accurate on smooth profiles for any node layout.
//! Cumulative integration integrates the local cubic through four
//! neighboring nodes over each interval (two-point Gauss), making it exact
//! for polynomials up to degree three and fourth-order accurate globally.

/// Maximum stencil width used anywhere in the crate.
const MAX_STENCIL: usize = 8;

/// Finite-difference weights for the `m`-th derivative at offset 0,
/// given stencil node offsets (Fornberg's algorithm).
///
/// The returned weights `w` satisfy `f^(m)(0) ≈ Σ w[j] f(offsets[j])` and are
/// exact whenever `f` is a polynomial of degree < `offsets.len()`.
pub fn fd_weights(offsets: &[f64], m: usize) -> Vec<f64> {
    let n = offsets.len();
    assert!(n > m, "need at least m+1 nodes for an order-m derivative");
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Node offsets of `idx` relative to node `center`, assembled from the
/// per-interval increments `dx` (so `offsets` never differences large
/// cumulative coordinates).
fn offsets_from_increments(dx: &[f64], center: usize, idx: &[usize]) -> Vec<f64> {
    idx.iter()
        .map(|&j| {
            if j >= center {
                dx[center..j].iter().sum()
            } else {
                -dx[j..center].iter().sum::<f64>()
            }
        })
        .collect()
}

/// Stencil index window of width `w` around node `i` on a grid of `n` nodes,
/// centered where possible and clamped at the ends.
fn stencil_window(i: usize, n: usize, w: usize) -> std::ops::Range<usize> {
    debug_assert!(n >= w);
    let lo = i.saturating_sub((w - 1) / 2).min(n - w);
    lo..lo + w
}

/// `m`-th derivative of the sampled profile `f` at every node of the grid
/// whose per-interval increments are `dx` (`dx.len() == f.len() - 1`).
///
/// Uses 3-point stencils for `m == 1` and 4-point stencils for `m == 2`;
/// both are second-order accurate on smooth profiles for arbitrary node
/// spacing and exact on polynomials of degree ≤ 2 (resp. ≤ 3).
pub fn derivative_from_increments(dx: &[f64], f: &[f64], m: usize) -> Vec<f64> {
    let n = f.len();
    assert_eq!(dx.len() + 1, n, "increment array must have len(f) - 1 entries");
    assert!(m == 1 || m == 2, "only first and second derivatives are supported");
    let w = m + 2;
    assert!(n >= w, "need at least {w} samples");
    let mut out = Vec::with_capacity(n);
    let mut idx_buf = [0usize; MAX_STENCIL];
    for i in 0..n {
        let win = stencil_window(i, n, w);
        let idx = &mut idx_buf[..w];
        for (slot, j) in idx.iter_mut().zip(win.clone()) {
            *slot = j;
        }
        let offs = offsets_from_increments(dx, i, idx);
        let wts = fd_weights(&offs, m);
        let mut acc = 0.0;
        for (j, wt) in idx.iter().zip(wts.iter()) {
            acc += wt * (f[*j] - f[i]);
        }
        out.push(acc);
    }
    out
}

/// Convenience wrapper: derivatives on a grid given by node coordinates.
pub fn derivative_on_grid(x: &[f64], f: &[f64], m: usize) -> Vec<f64> {
    let dx: Vec<f64> = x.windows(2).map(|p| p[1] - p[0]).collect();
    derivative_from_increments(&dx, f, m)
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    /// Add one term.
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current compensated total.
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Per-interval integrals of the local cubic interpolant: entry `i` is
/// `∫ f dx` over `[x_i, x_{i+1}]` using the cubic through four neighboring
/// nodes, evaluated with two-point Gauss (exact for cubics).
///
/// Requires at least 4 samples.
pub fn quadrature_increments(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert_eq!(n, f.len());
    assert!(n >= 2, "need at least 2 samples for quadrature");
    const G: f64 = 0.577_350_269_189_625_7; // 1/sqrt(3)
    // short inputs fall back to the interpolant through all available nodes
    let width = n.min(4);
    let mut out = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let lo = i.saturating_sub(1).min(n - width);
        let idx: Vec<usize> = (lo..lo + width).collect();
        let (a, b) = (x[i], x[i + 1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for gp in [mid - half * G, mid + half * G] {
            acc += lagrange_eval(x, f, &idx, gp);
        }
        out.push(half * acc);
    }
    out
}

/// Compensated prefix sums of `inc`, starting at 0; output has one more
/// entry than the input.
pub fn prefix_sums(inc: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(inc.len() + 1);
    let mut acc = Compensated::default();
    out.push(0.0);
    for &d in inc {
        acc.add(d);
        out.push(acc.value());
    }
    out
}

/// Cumulative integral of the sampled profile `f` from `x[0]`, node by node.
pub fn cumulative_integral(x: &[f64], f: &[f64]) -> Vec<f64> {
    prefix_sums(&quadrature_increments(x, f))
}

/// Value at `xq` of the Lagrange polynomial through the nodes `idx`.
fn lagrange_eval(x: &[f64], f: &[f64], idx: &[usize], xq: f64) -> f64 {
    let mut acc = 0.0;
    for &j in idx {
        let mut lj = 1.0;
        for &k in idx {
            if k != j {
                lj *= (xq - x[k]) / (x[j] - x[k]);
            }
        }
        acc += lj * f[j];
    }
    acc
}

/// Derivative (order `m` ∈ {0,1,2}) at `xq` of the local cubic through the
/// four nodes nearest to `xq`. Panics if `xq` lies outside the grid by more
/// than a half-interval.
pub fn interp_local_cubic(x: &[f64], f: &[f64], xq: f64, m: usize) -> f64 {
    let n = x.len();
    assert!(n >= 4, "need at least 4 samples for cubic interpolation");
    let span = x[n - 1] - x[0];
    assert!(
        xq >= x[0] - 0.5 * span / (n as f64) && xq <= x[n - 1] + 0.5 * span / (n as f64),
        "query point {xq} outside tabulated range [{}, {}]",
        x[0],
        x[n - 1]
    );
    // window of 4 nodes surrounding xq
    let cell = match x.binary_search_by(|p| p.partial_cmp(&xq).unwrap()) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1),
    };
    let lo = cell.saturating_sub(1).min(n - 4);
    let idx = [lo, lo + 1, lo + 2, lo + 3];
    if m == 0 {
        return lagrange_eval(x, f, &idx, xq);
    }
    // differentiate the cubic: use FD weights exact on cubics, anchored at xq
    let offs: Vec<f64> = idx.iter().map(|&j| x[j] - xq).collect();
    let wts = fd_weights(&offs, m);
    let base = f[idx[1]];
    idx.iter().zip(wts.iter()).map(|(&j, wt)| wt * (f[j] - base)).sum::<f64>()
        + if m == 0 { base } else { 0.0 }
}

/// Bisection for a root of `f` inside the bracket `[a, b]` (`f(a)` and
/// `f(b)` must have opposite signs), refined to relative tolerance
/// `rel_tol` of the bracket midpoint.
pub fn bisect(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    let (mut flo, fhi) = (f(lo), f(hi));
    assert!(
        flo * fhi <= 0.0,
        "bisect requires a sign change on [{a}, {b}] (got {flo}, {fhi})"
    );
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// One-sided limit `f(0+)` by Neville extrapolation through samples on the
/// geometric ladder `h0, h0/2, …` (`levels` points). Assumes `f` is smooth
/// up to the boundary; the error is O(h0^levels).
pub fn limit_by_extrapolation(mut f: impl FnMut(f64) -> f64, h0: f64, levels: usize) -> f64 {
    assert!((2..=12).contains(&levels));
    let mut xs = Vec::with_capacity(levels);
    let mut t = Vec::with_capacity(levels);
    let mut h = h0;
    for _ in 0..levels {
        xs.push(h);
        t.push(f(h));
        h *= 0.5;
    }
    // Neville tableau evaluated at 0
    for k in 1..levels {
        for i in (k..levels).rev() {
            let xi = xs[i];
            let xik = xs[i - k];
            t[i] = (xik * t[i] - xi * t[i - 1]) / (xik - xi);
        }
    }
    t[levels - 1]
}

/// Quadratic extrapolation to `x = x0` through three samples.
pub fn extrapolate_quadratic(pts: [(f64, f64); 3], x0: f64) -> f64 {
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let f: Vec<f64> = pts.iter().map(|p| p.1).collect();
    lagrange_eval(&x, &f, &[0, 1, 2], x0)
}

/// Least-squares slope of `log(err)` against `log(h)` — the observed
/// convergence order. Returns `f64::INFINITY` when every error is below
/// `floor` (the sequence is exact to roundoff).
pub fn fit_order(hs: &[f64], errs: &[f64], floor: f64) -> f64 {
    assert_eq!(hs.len(), errs.len());
    assert!(hs.len() >= 2);
    if errs.iter().all(|&e| e <= floor) {
        return f64::INFINITY;
    }
    let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = errs.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(ly.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
