//! Reference computations written independently of the library.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C;

/// Dense scan of `[a, b]` followed by golden-section refinement.
pub fn minimize(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64) {
    let h = (b - a) / n as f64;
    let mut best = (a, f(a));
    for i in 1..=n {
        let x = a + h * i as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let (mut lo, mut hi) = ((best.0 - h).max(a), (best.0 + h).min(b));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let x = 0.5 * (lo + hi);
    let v = f(x);
    if v < best.1 {
        (x, v)
    } else {
        best
    }
}

/// `min_{t ≥ 0} |e^{iθ} + t| / (1 + t)`, the ellipticity constant of `λ + |ξ|^{2m}` on `Σ_θ`.
pub fn ellipticity_constant(theta: f64) -> f64 {
    let e = C::from_polar(1.0, theta);
    minimize(
        |u| {
            let t = u / (1.0 - u);
            (e + t).norm() / (1.0 + t)
        },
        0.0,
        0.999_999,
        200_000,
    )
    .1
}

/// `min_{r ∈ [0,1]} (r⁴ + (1-r)⁴ + 2cos δ r²(1-r)²)^{1/4}`: the smallest
/// `|a + b|^{1/2}` for `|a| = r²`, `|b| = (1-r)²` at angle at most `δ`.
pub fn root_lower_bound(delta: f64) -> f64 {
    minimize(
        |r| {
            let a = r * r;
            let b = (1.0 - r) * (1.0 - r);
            (a * a + b * b + 2.0 * delta.cos() * a * b).max(0.0).powf(0.25)
        },
        0.0,
        1.0,
        100_000,
    )
    .1
}

/// `min_{r ≥ 0} |1 + r e^{iφ}|`.
pub fn sector_distance(phi: f64) -> f64 {
    let e = C::from_polar(1.0, phi);
    minimize(|r| (1.0 + r * e).norm(), 0.0, 10.0, 100_000).1
}

/// `max_{t ≥ 1} (t^a - ε t^b)` by scanning `log t`.
pub fn interpolation_constant(a: f64, b: f64, eps: f64) -> f64 {
    let f = |s: f64| {
        let t = s.exp();
        -(t.powf(a) - eps * t.powf(b))
    };
    (-minimize(f, 0.0, 60.0, 600_000).1).max(0.0)
}

/// Fixed-Talbot inverse Laplace transform of a transform with real original.
pub fn talbot(f: impl Fn(C) -> C, t: f64, m: usize) -> f64 {
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (f(C::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let th = k as f64 * PI / m as f64;
        let cot = 1.0 / th.tan();
        let lam = C::new(r * th * cot, r * th);
        let sigma = th + (th * cot - 1.0) * cot;
        sum += ((t * lam).exp() * f(lam) * C::new(1.0, sigma)).re;
    }
    r / m as f64 * sum
}

/// Exponential sum `Σ d e^{-s x}` on the half-line.
#[derive(Clone, Debug, Default)]
pub struct Decaying {
    pub terms: Vec<(C, C)>,
}

impl Decaying {
    pub fn eval(&self, x: f64) -> C {
        self.terms.iter().map(|&(d, s)| d * (-s * x).exp()).sum()
    }

    /// `∫₀^∞ |Σ d e^{-sx}|² dx`
    pub fn norm_sq(&self) -> f64 {
        let mut total = C::new(0.0, 0.0);
        for &(di, si) in &self.terms {
            for &(dj, sj) in &self.terms {
                total += di * dj.conj() / (si + sj.conj());
            }
        }
        total.re
    }
}

/// One boundary mode `|k'| = κ` of the dynamic boundary resolvent for
/// `(λ + Δ²)u₁ = f`, `∂_νΔu₁ = 0`, `∂_νu₁ + (λ - Δ')u₂ = g`, `γ₀u₁ = u₂`,
/// with interior datum `f = c e^{-βx}`.
pub struct ChMode {
    pub u1: Decaying,
    pub u2: C,
}

pub fn ch_mode(kappa: f64, lambda: C, f: Option<(C, C)>, g: C) -> ChMode {
    let i = C::i();
    let q = i * lambda.sqrt();
    let k2 = kappa * kappa;
    let t1 = (k2 + q).sqrt();
    let t2 = (k2 - q).sqrt();
    let mut u1 = Decaying::default();
    let mut dn0 = C::new(0.0, 0.0);
    if let Some((c, beta)) = f {
        let b2 = beta * beta - k2;
        let p = c / (lambda + b2 * b2);
        // γ₀: p + a₁ + a₂ = 0;  ∂_νΔ: pβ(β²-κ²) + q(τ₁a₁ - τ₂a₂) = 0
        let a1 = (-p * beta * b2 - q * t2 * p) / (q * (t1 + t2));
        let a2 = -p - a1;
        dn0 = p * beta + a1 * t1 + a2 * t2;
        u1.terms.extend([(p, beta), (a1, t1), (a2, t2)]);
    }
    let gp = g - dn0;
    let u2 = gp / (lambda + k2 + 2.0 * t1 * t2 / (t1 + t2));
    u1.terms.push((t2 * u2 / (t1 + t2), t1));
    u1.terms.push((t1 * u2 / (t1 + t2), t2));
    ChMode { u1, u2 }
}

/// `|λ| ‖R(λ)(f, g)‖ / ‖(f, g)‖` for one mode.
pub fn ch_mode_gain(kappa: f64, lambda: C, f: Option<(C, C)>, g: C) -> f64 {
    let r = ch_mode(kappa, lambda, f, g);
    let data = f.map_or(0.0, |(c, beta)| c.norm_sqr() / (2.0 * beta.re)) + g.norm_sqr();
    lambda.norm() * ((r.u1.norm_sq() + r.u2.norm_sqr()) / data).sqrt()
}

/// Gaussian elimination with partial pivoting on a matrix stored as rows
/// `(first column, entries)`.
pub fn sparse_row_solve(mut rows: Vec<(usize, Vec<C>)>, mut rhs: Vec<C>) -> Vec<C> {
    let n = rows.len();
    let get = |row: &(usize, Vec<C>), c: usize| -> C {
        if c >= row.0 && c < row.0 + row.1.len() {
            row.1[c - row.0]
        } else {
            C::new(0.0, 0.0)
        }
    };
    for c in 0..n {
        let window = (c + 12).min(n);
        let p = (c..window)
            .max_by(|&a, &b| get(&rows[a], c).norm().total_cmp(&get(&rows[b], c).norm()))
            .unwrap();
        rows.swap(c, p);
        rhs.swap(c, p);
        let pivot = get(&rows[c], c);
        let prow = rows[c].clone();
        let pend = prow.0 + prow.1.len();
        for r in (c + 1)..window {
            let a = get(&rows[r], c);
            if a.norm() == 0.0 {
                continue;
            }
            let factor = a / pivot;
            let start = rows[r].0.min(c);
            let end = (rows[r].0 + rows[r].1.len()).max(pend);
            let mut vals = vec![C::new(0.0, 0.0); end - start];
            for (j, v) in vals.iter_mut().enumerate() {
                *v = get(&rows[r], start + j) - factor * get(&prow, start + j);
            }
            let skip = c + 1 - start;
            rows[r] = (c + 1, vals[skip..].to_vec());
            rhs[r] = rhs[r] - factor * rhs[c];
        }
    }
    let mut x = vec![C::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let row = &rows[r];
        let mut s = rhs[r];
        for c in (r + 1)..(row.0 + row.1.len()) {
            s -= get(row, c) * x[c];
        }
        x[r] = s / get(row, r);
    }
    x
}

/// Second-order finite differences for `λw + (κ² - d²/dx²)²w = 0` on `[0, X]`
/// with `w(0) = g₀`, `κ²w'(0) - w'''(0) = g₁` and `w = w' = 0` at `X`.
/// Returns the nodes `x_i = iX/n` and the values `w(x_i)`, `i = 0..=n`.
pub fn fd_biharmonic_mode(kappa: f64, lambda: C, g0: C, g1: C, x_max: f64, n: usize) -> (Vec<f64>, Vec<C>) {
    let h = x_max / n as f64;
    let k2 = kappa * kappa;
    let zero = C::new(0.0, 0.0);
    // unknown j holds w(x_{j-2}), j = 0..=n+2
    let col = |i: isize| (i + 2) as usize;
    let mut rows = Vec::with_capacity(n + 3);
    let mut rhs = Vec::with_capacity(n + 3);
    rows.push((col(0), vec![C::new(1.0, 0.0)]));
    rhs.push(g0);
    let h3 = 2.0 * h * h * h;
    rows.push((
        col(-2),
        vec![
            C::new(1.0 / h3, 0.0),
            C::new(-k2 / (2.0 * h) - 2.0 / h3, 0.0),
            zero,
            C::new(k2 / (2.0 * h) + 2.0 / h3, 0.0),
            C::new(-1.0 / h3, 0.0),
        ],
    ));
    rhs.push(g1);
    let h2 = h * h;
    let h4 = h2 * h2;
    for i in 0..(n as isize - 1) {
        let c1 = C::new(1.0 / h4, 0.0);
        let c2 = C::new(-4.0 / h4 - 2.0 * k2 / h2, 0.0);
        let c0 = lambda + k2 * k2 + 4.0 * k2 / h2 + 6.0 / h4;
        rows.push((col(i - 2), vec![c1, c2, c0, c2, c1]));
        rhs.push(zero);
    }
    rows.push((col(n as isize - 1), vec![C::new(1.0, 0.0)]));
    rhs.push(zero);
    rows.push((col(n as isize), vec![C::new(1.0, 0.0)]));
    rhs.push(zero);
    let w = sparse_row_solve(rows, rhs);
    let xs = (0..=n).map(|i| h * i as f64).collect();
    (xs, w[2..].to_vec())
}

/// Stable roots `τ` of `λ + (κ² - τ²)²` with `Re τ > 0`.
pub fn biharmonic_taus(kappa: f64, lambda: C) -> (C, C) {
    let q = C::i() * lambda.sqrt();
    ((kappa * kappa + q).sqrt(), (kappa * kappa - q).sqrt())
}
