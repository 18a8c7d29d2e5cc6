//! Real roots of low-degree univariate polynomials and exact recovery of
//! coefficients from samples.
//!
//! Isolation works by derivative subdivision: the real roots of `p'` cut the
//! real line into intervals on which `p` is monotone, so each interval holds
//! at most one simple root, found by safeguarded Newton inside the bracket.
//! A critical point where `p` vanishes is a multiple root. Sturm sequences
//! independently count the distinct real roots to certify that none was missed.

use thiserror::Error;

use crate::scalar::Real;

/// Highest degree the kernel accepts.
pub const MAX_DEGREE: usize = 8;

/// Relative threshold below which trailing coefficients are treated as zero.
pub const DEGREE_DROP: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("ZeroPolynomial")]
    ZeroPolynomial,
    #[error("NonFinite: coefficient or sample is not finite")]
    NonFinite,
    #[error("DegreeTooHigh: degree {0} exceeds {MAX_DEGREE}")]
    DegreeTooHigh(usize),
    #[error("DuplicateNodes: interpolation nodes {0} and {1} coincide")]
    DuplicateNodes(usize, usize),
    #[error("TooFewSamples: need {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("IllConditioned: condition estimate {0:e}")]
    IllConditioned(f64),
}

/// Real polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

/// A real root with its estimated multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot<T> {
    pub value: T,
    pub multiplicity: usize,
}

impl<T: Real> Poly<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self, PolyError> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(PolyError::DegreeTooHigh(coeffs.len() - 1));
        }
        Ok(Poly { coeffs })
    }

    /// Polynomial `∏ (x - r)`.
    pub fn from_roots(roots: &[T]) -> Result<Self, PolyError> {
        let mut c = vec![T::one()];
        for &r in roots {
            let mut next = vec![T::zero(); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] = next[i + 1] + ci;
                next[i] = next[i] - r * ci;
            }
            c = next;
        }
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Index of the last coefficient larger than `DEGREE_DROP · max|c|`;
    /// `None` for the zero polynomial.
    pub fn effective_degree(&self) -> Option<usize> {
        let scale = self.max_abs_coeff();
        if scale == T::zero() {
            return None;
        }
        let thresh = scale * T::lit(DEGREE_DROP);
        self.coeffs.iter().rposition(|c| c.abs() > thresh)
    }

    /// Copy truncated to the effective degree.
    pub fn trimmed(&self) -> Self {
        let n = self.effective_degree().map_or(0, |d| d + 1);
        Poly { coeffs: self.coeffs[..n.max(1).min(self.coeffs.len())].to_vec() }
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    /// Horner evaluation with an error-free-transformation correction term,
    /// about as accurate as evaluating in twice the working precision.
    pub fn eval_compensated(&self, x: T) -> T {
        let mut s = T::zero();
        let mut err = T::zero();
        for &c in self.coeffs.iter().rev() {
            let (p, pe) = two_prod(s, x);
            let (sum, se) = two_sum(p, c);
            s = sum;
            err = err * x + (pe + se);
        }
        s + err
    }

    /// `Σ |c_i| |x|^i`, the natural scale of rounding error at `x`.
    pub fn abs_bound(&self, x: T) -> T {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly { coeffs: vec![T::zero()] };
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * T::lit(i as f64)).collect();
        Poly { coeffs }
    }

    /// Cauchy bound: every root satisfies `|x| < bound`.
    pub fn root_bound(&self) -> T {
        let n = self.coeffs.len() - 1;
        let lead = self.coeffs[n].abs();
        let worst = self.coeffs[..n].iter().fold(T::zero(), |m, c| m.max(c.abs() / lead));
        T::one() + worst
    }
}

fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// All real roots in ascending order.
///
/// `tol` is the relative residual used to recognise a multiple root at a
/// critical point: `|p(x)| <= tol · Σ|c_i| max(1, |x|)^i`. Evaluation is compensated,
/// so for exact coefficients a `tol` near machine epsilon suffices; noisy
/// coefficients call for a looser value.
pub fn real_roots<T: Real>(poly: &Poly<T>, tol: T) -> Result<Vec<RealRoot<T>>, PolyError> {
    if poly.coeffs.iter().any(|c| !c.is_finite()) {
        return Err(PolyError::NonFinite);
    }
    if poly.effective_degree().is_none() {
        return Err(PolyError::ZeroPolynomial);
    }
    let q = poly.trimmed();
    Ok(roots_of_trimmed(&q, tol))
}

fn roots_of_trimmed<T: Real>(q: &Poly<T>, tol: T) -> Vec<RealRoot<T>> {
    let n = q.coeffs.len() - 1;
    match n {
        0 => return Vec::new(),
        1 => return vec![RealRoot { value: -q.coeffs[0] / q.coeffs[1], multiplicity: 1 }],
        _ => {}
    }
    let dq = q.derivative().trimmed();
    let crit = if dq.coeffs.len() > 1 { roots_of_trimmed(&dq, tol) } else { Vec::new() };
    let bound = q.root_bound();
    let is_zero_at = |x: T| q.eval_compensated(x).abs() <= tol * q.abs_bound(x.abs().max(T::one()));

    // breakpoints: -bound, critical points, +bound; each with p value or an exact zero marker
    let mut points: Vec<(T, Option<T>)> = Vec::with_capacity(crit.len() + 2);
    let mut roots = Vec::new();
    points.push((-bound, Some(q.eval_compensated(-bound))));
    for c in &crit {
        if c.value <= -bound || c.value >= bound {
            continue;
        }
        if is_zero_at(c.value) {
            roots.push(RealRoot { value: c.value, multiplicity: c.multiplicity + 1 });
            points.push((c.value, None));
        } else {
            points.push((c.value, Some(q.eval_compensated(c.value))));
        }
    }
    points.push((bound, Some(q.eval_compensated(bound))));

    for w in points.windows(2) {
        let ((lo, flo), (hi, fhi)) = (w[0], w[1]);
        let (Some(flo), Some(fhi)) = (flo, fhi) else { continue };
        if flo == T::zero() {
            if !roots.iter().any(|r: &RealRoot<T>| r.value == lo) {
                roots.push(RealRoot { value: lo, multiplicity: 1 });
            }
            continue;
        }
        if fhi == T::zero() {
            if !roots.iter().any(|r: &RealRoot<T>| r.value == hi) {
                roots.push(RealRoot { value: hi, multiplicity: 1 });
            }
            continue;
        }
        if (flo < T::zero()) != (fhi < T::zero()) {
            roots.push(RealRoot { value: refine_bracketed(q, &dq, lo, hi, flo), multiplicity: 1 });
        }
    }
    roots.sort_by(|a, b| a.value.partial_cmp(&b.value).expect("finite roots"));
    roots
}

/// Safeguarded Newton on a bracket `[lo, hi]` holding exactly one sign change.
fn refine_bracketed<T: Real>(q: &Poly<T>, dq: &Poly<T>, mut lo: T, mut hi: T, flo: T) -> T {
    let lo_negative = flo < T::zero();
    let mut x = lo + (hi - lo) * T::half();
    for _ in 0..200 {
        let fx = q.eval_compensated(x);
        if fx == T::zero() {
            return x;
        }
        if (fx < T::zero()) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let d = dq.eval(x);
        let mut next = if d != T::zero() { x - fx / d } else { lo + (hi - lo) * T::half() };
        if !(next > lo && next < hi) {
            next = lo + (hi - lo) * T::half();
        }
        if next == x || hi - lo <= T::epsilon() * x.abs().max(T::min_positive_value()) {
            return next;
        }
        x = next;
    }
    x
}

/// Refines a zero of an arbitrary continuous function near `x0`.
///
/// Looks for a sign change on `x0 ± h` with `h` growing from `step` up to
/// `max_step`, then shrinks the bracket with Illinois regula falsi to the
/// resolution of the scalar type. `None` when no sign change is found, which
/// is the expected outcome for a zero of even multiplicity.
pub fn refine_on_function<T: Real, F: Fn(T) -> T>(f: F, x0: T, step: T, max_step: T) -> Option<T> {
    let f0 = f(x0);
    if f0 == T::zero() {
        return Some(x0);
    }
    let mut h = step;
    while h <= max_step {
        for (a, b) in [(x0 - h, x0), (x0, x0 + h)] {
            let (fa, fb) = (if a == x0 { f0 } else { f(a) }, if b == x0 { f0 } else { f(b) });
            if fa == T::zero() {
                return Some(a);
            }
            if fb == T::zero() {
                return Some(b);
            }
            if (fa < T::zero()) != (fb < T::zero()) {
                return Some(illinois(&f, a, b, fa, fb));
            }
        }
        h = h * T::lit(4.0);
    }
    None
}

fn illinois<T: Real, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T, mut fa: T, mut fb: T) -> T {
    let mut side = 0i8;
    for _ in 0..200 {
        let width = (b - a).abs();
        if width <= T::epsilon() * T::two() * a.abs().max(b.abs()).max(T::min_positive_value()) {
            break;
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) {
            x = a + (b - a) * T::half();
        }
        let fx = f(x);
        if fx == T::zero() {
            return x;
        }
        if (fx < T::zero()) == (fa < T::zero()) {
            a = x;
            fa = fx;
            if side == -1 {
                fb = fb * T::half();
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa = fa * T::half();
            }
            side = 1;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

/// Sturm sequence `p, p', -rem(p, p'), ...`, each member rescaled to unit max coefficient.
pub fn sturm_sequence<T: Real>(poly: &Poly<T>) -> Vec<Poly<T>> {
    let p0 = normalize(poly.trimmed());
    let p1 = normalize(p0.derivative().trimmed());
    let mut seq = vec![p0, p1];
    let floor = T::lit(1e-9);
    loop {
        let n = seq.len();
        if seq[n - 1].coeffs.len() <= 1 {
            break;
        }
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        // remainder negligible relative to its dividend: exact division up to rounding
        if r.max_abs_coeff() <= floor * seq[n - 2].max_abs_coeff() {
            break;
        }
        let neg = Poly { coeffs: r.coeffs.iter().map(|&c| -c).collect() };
        seq.push(normalize(neg.trimmed()));
    }
    seq
}

fn normalize<T: Real>(p: Poly<T>) -> Poly<T> {
    let s = p.max_abs_coeff();
    if s == T::zero() {
        return p;
    }
    Poly { coeffs: p.coeffs.iter().map(|&c| c / s).collect() }
}

fn poly_rem<T: Real>(num: &Poly<T>, den: &Poly<T>) -> Poly<T> {
    let mut r = num.coeffs.clone();
    let dn = den.coeffs.len() - 1;
    let lead = den.coeffs[dn];
    while r.len() > dn {
        let k = r.len() - 1;
        let f = r[k] / lead;
        for i in 0..=dn {
            r[k - dn + i] = r[k - dn + i] - f * den.coeffs[i];
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(T::zero());
    }
    Poly { coeffs: r }
}

fn sign_changes<T: Real>(seq: &[Poly<T>], x: T) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        if v == T::zero() {
            continue;
        }
        let neg = v < T::zero();
        if let Some(l) = last {
            if l != neg {
                count += 1;
            }
        }
        last = Some(neg);
    }
    count
}

/// Number of distinct real roots in `(a, b]` according to the Sturm sequence.
pub fn sturm_count<T: Real>(poly: &Poly<T>, a: T, b: T) -> usize {
    let seq = sturm_sequence(poly);
    sign_changes(&seq, a).saturating_sub(sign_changes(&seq, b))
}

/// Outcome of checking a root list against the Sturm count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certification {
    pub sturm_count: usize,
    pub found: usize,
    pub missed: usize,
}

/// Compares the number of distinct roots found with the Sturm count over
/// the Cauchy interval.
pub fn certify<T: Real>(poly: &Poly<T>, roots: &[RealRoot<T>]) -> Certification {
    let q = poly.trimmed();
    if q.coeffs.len() <= 1 {
        return Certification { sturm_count: 0, found: roots.len(), missed: 0 };
    }
    let b = q.root_bound() * T::two();
    let sturm = sturm_count(&q, -b, b);
    Certification { sturm_count: sturm, found: roots.len(), missed: sturm.saturating_sub(roots.len()) }
}

/// `n` Chebyshev nodes of the first kind on `[-1, 1]`, ascending.
pub fn chebyshev_nodes<T: Real>(n: usize) -> Vec<T> {
    let mut v: Vec<T> = (0..n)
        .map(|k| (T::PI() * T::lit((2 * k + 1) as f64) / T::lit((2 * n) as f64)).cos())
        .collect();
    v.reverse();
    v
}

/// Condition estimate above which an interpolation is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Polynomial of degree ≤ `degree` through the samples (least squares when
/// more than `degree + 1` samples are given).
pub fn interpolate_coeffs<T: Real>(samples: &[(T, T)], degree: usize) -> Result<Poly<T>, PolyError> {
    if degree > MAX_DEGREE {
        return Err(PolyError::DegreeTooHigh(degree));
    }
    let cols = degree + 1;
    if samples.len() < cols {
        return Err(PolyError::TooFewSamples { need: cols, got: samples.len() });
    }
    if samples.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(PolyError::NonFinite);
    }
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let (a, b) = (samples[i].0, samples[j].0);
            if (a - b).abs() <= T::epsilon() * a.abs().max(b.abs()).max(T::one()) {
                return Err(PolyError::DuplicateNodes(i, j));
            }
        }
    }

    // column-equilibrated Vandermonde, solved by Householder QR
    let rows = samples.len();
    let mut a: Vec<Vec<T>> = samples
        .iter()
        .map(|&(x, _)| {
            let mut row = Vec::with_capacity(cols);
            let mut pw = T::one();
            for _ in 0..cols {
                row.push(pw);
                pw = pw * x;
            }
            row
        })
        .collect();
    let mut rhs: Vec<T> = samples.iter().map(|&(_, y)| y).collect();
    let mut col_scale = vec![T::one(); cols];
    for (j, cs) in col_scale.iter_mut().enumerate() {
        let norm = a.iter().map(|r| r[j] * r[j]).sum::<T>().sqrt();
        if norm > T::zero() {
            *cs = norm;
            for r in a.iter_mut() {
                r[j] = r[j] / norm;
            }
        }
    }
    for k in 0..cols {
        let norm = (k..rows).map(|i| a[i][k] * a[i][k]).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(PolyError::IllConditioned(f64::INFINITY));
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..rows).map(|i| a[i][k]).collect();
        v[0] = v[0] - alpha;
        let vnorm_sq: T = v.iter().map(|&t| t * t).sum();
        if vnorm_sq == T::zero() {
            continue;
        }
        for j in k..cols {
            let d: T = (k..rows).map(|i| v[i - k] * a[i][j]).sum();
            let f = T::two() * d / vnorm_sq;
            for i in k..rows {
                a[i][j] = a[i][j] - f * v[i - k];
            }
        }
        let d: T = (k..rows).map(|i| v[i - k] * rhs[i]).sum();
        let f = T::two() * d / vnorm_sq;
        for i in k..rows {
            rhs[i] = rhs[i] - f * v[i - k];
        }
    }
    let diag: Vec<T> = (0..cols).map(|k| a[k][k].abs()).collect();
    let dmax = diag.iter().fold(T::zero(), |m, &d| m.max(d));
    let dmin = diag.iter().fold(T::infinity(), |m, &d| m.min(d));
    let cond = dmax / dmin;
    if !(cond < T::lit(MAX_CONDITION)) {
        return Err(PolyError::IllConditioned(cond.to_f64().unwrap_or(f64::INFINITY)));
    }
    let mut sol = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let s: T = ((k + 1)..cols).map(|j| a[k][j] * sol[j]).sum();
        sol[k] = (rhs[k] - s) / a[k][k];
    }
    let coeffs = sol.iter().zip(&col_scale).map(|(&c, &s)| c / s).collect();
    Poly::new(coeffs)
}
