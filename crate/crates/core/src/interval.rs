//! The map induced on `[−1, 1]` by projecting the circle map through
//! `p(x) = exp(iπ(x − x₀) + i·arg z₀)`, its two inverse branches, and a
//! Chebyshev collocation of `L_I f = Σ_k Φ_k′·(f∘Φ_k)`.
//!
//! Everything is driven by the monotone lift
//! `G(y) = (ψ(θ(y)) − θ₀)/π − 1 − c`, `θ(y) = π(y + 1) + θ₀`, where `ψ` is
//! the circle lift and the even integer `c` normalizes `G(−1) = −1`. `G`
//! increases by 4 over `[−1, 1]`; `T` is `G` reduced into `[−1, 1]` and
//! `Φ_k` solves `G(y) = x + 2(k − 1)`.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::{branch_sum, circle_lift, circle_lift_deriv, fixed_point, tau_eval, BlaschkeParam};
use crate::qd::QuadDouble;
use crate::error::{Result, SpectreError};
use crate::fourier::TrigPoly;
use crate::linalg::CMatrix;
use crate::scalar::{carg, from_c64, to_c64, Real};
use crate::spectral::{
    modulus_then_phase, predicted_spectrum, Family, PredictedEigenvalue, SpectrumPrediction,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntervalMapContext {
    pub param: BlaschkeParam,
    pub x0: f64,
    pub x1: f64,
    #[serde(with = "crate::cjson")]
    pub z0: Complex64,
    /// `arg z₀`.
    pub phase: f64,
    #[serde(skip)]
    phase_qd: QuadDouble,
    #[serde(skip)]
    offset: f64,
}

impl IntervalMapContext {
    pub fn new(param: &BlaschkeParam) -> Self {
        let lam: Complex<QuadDouble> = from_c64(param.lambda());
        let one = Complex::new(QuadDouble::ONE, QuadDouble::ZERO);
        let z0 = (lam - one) / (one - lam.conj());
        let phase_qd = carg(z0);
        let phase = phase_qd.to_f64();
        let s = (circle_lift(param.lambda(), phase) - phase) / PI;
        let offset = 2.0 * (s / 2.0).round();
        Self {
            param: *param,
            x0: -1.0,
            x1: 1.0,
            z0: fixed_point(param),
            phase,
            phase_qd,
            offset,
        }
    }

    /// `p(x)`.
    pub fn project(&self, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, PI * (x - self.x0) + self.phase)
    }

    /// `p′(x) = iπ·p(x)`.
    pub fn project_deriv(&self, x: f64) -> Complex64 {
        Complex64::new(0.0, PI) * self.project(x)
    }

    fn check(&self, x: f64) -> Result<()> {
        if !(x >= self.x0 && x <= self.x1) {
            return Err(SpectreError::OutOfDomain {
                x,
                lo: self.x0,
                hi: self.x1,
            });
        }
        Ok(())
    }

    fn phase<T: Real>(&self) -> T {
        let [a, b, c, d] = self.phase_qd.limbs();
        T::from_f64(a) + T::from_f64(b) + T::from_f64(c) + T::from_f64(d)
    }

    fn theta<T: Real>(&self, y: T) -> T {
        T::pi() * (y + T::one()) + self.phase::<T>()
    }

    fn lift<T: Real>(&self, y: T) -> T {
        let lam: Complex<T> = from_c64(self.param.lambda());
        (circle_lift(lam, self.theta(y)) - self.phase::<T>()) / T::pi() - T::one() - T::from_f64(self.offset)
    }

    fn lift_deriv<T: Real>(&self, y: T) -> T {
        let lam: Complex<T> = from_c64(self.param.lambda());
        circle_lift_deriv(lam, self.theta(y))
    }

    /// Solves `G(y) = x + 2(k − 1)` by bisection in `f64` and Newton in `T`.
    /// `x` may lie slightly outside the interval (the branches extend
    /// analytically), which the finite-difference checks use.
    fn solve_branch<T: Real>(&self, k: usize, x: T) -> (T, T) {
        let target = x + T::from_f64(2.0 * (k as f64 - 1.0));
        let t64 = target.to_f64();
        let (mut lo, mut hi) = (-2.0_f64, 2.0_f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.lift(mid) < t64 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut y = T::from_f64(0.5 * (lo + hi));
        let steps = if T::EPSILON < 1e-50 { 4 } else if T::EPSILON < 1e-20 { 3 } else { 2 };
        for _ in 0..steps {
            y -= (self.lift(y) - target) / self.lift_deriv(y);
        }
        (y, T::one() / self.lift_deriv(y))
    }
}

fn check_label(k: usize) -> Result<()> {
    if k == 1 || k == 2 {
        Ok(())
    } else {
        Err(SpectreError::InvalidArgument(format!("branch label must be 1 or 2, got {k}")))
    }
}

/// `(Φ_k(x), Φ_k′(x))`.
pub fn interval_branch(ctx: &IntervalMapContext, k: usize, x: f64) -> Result<(f64, f64)> {
    check_label(k)?;
    ctx.check(x)?;
    let (y, d) = ctx.solve_branch(k, x);
    let y = match (k, x) {
        (1, x) if x == ctx.x0 => ctx.x0,
        (2, x) if x == ctx.x1 => ctx.x1,
        _ => y,
    };
    Ok((y, d))
}

/// Branch values on a set of query points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalBranches {
    pub k: usize,
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

pub fn branch_table(ctx: &IntervalMapContext, k: usize, points: &[f64]) -> Result<IntervalBranches> {
    let (values, derivatives) = points
        .iter()
        .map(|&x| interval_branch(ctx, k, x))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(IntervalBranches {
        k,
        points: points.to_vec(),
        values,
        derivatives,
    })
}

#[allow(non_snake_case)]
pub fn T_eval(ctx: &IntervalMapContext, x: f64) -> Result<f64> {
    ctx.check(x)?;
    if x == ctx.x0 {
        return Ok(ctx.x0);
    }
    let g = ctx.lift(QuadDouble::from_f64(x)).to_f64();
    let t = if g <= ctx.x1 { g } else { g - 2.0 };
    Ok(t.clamp(ctx.x0, ctx.x1))
}

/// `T′(x)`; the jump point takes the left-hand value.
#[allow(non_snake_case)]
pub fn T_deriv(ctx: &IntervalMapContext, x: f64) -> Result<f64> {
    ctx.check(x)?;
    Ok(ctx.lift_deriv(x))
}

#[allow(non_snake_case)]
pub fn T_deriv_at_fixed_point(ctx: &IntervalMapContext) -> f64 {
    ctx.lift_deriv(ctx.x0)
}

/// `M` Chebyshev–Lobatto points `cos(πj/(M−1))`, from `1` down to `−1`.
pub fn chebyshev_lobatto(m: usize) -> Vec<f64> {
    lobatto::<f64>(m)
}

fn lobatto<T: Real>(m: usize) -> Vec<T> {
    let denom = T::from_f64((m - 1) as f64);
    (0..m)
        .map(|j| {
            if j == 0 {
                T::one()
            } else if j == m - 1 {
                -T::one()
            } else if 2 * j + 1 == m {
                T::zero()
            } else {
                (T::pi() * T::from_f64(j as f64) / denom).sin_cos().1
            }
        })
        .collect()
}

/// Smallest collocation size accepted.
pub const MIN_NODES: usize = 8;
/// Default collocation size.
pub const DEFAULT_NODES: usize = 40;

/// Collocation matrix `A[j][i] = Σ_k Φ_k′(x_j)·ℓ_i(Φ_k(x_j))`, assembled and
/// stored in quad-double. The map is real, so the entries are real for
/// every λ.
#[derive(Clone, Debug)]
pub struct IntervalDiscretization {
    pub m: usize,
    pub nodes: Vec<f64>,
    pub context: IntervalMapContext,
    matrix: Vec<QuadDouble>,
}

impl IntervalDiscretization {
    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.matrix[j * self.m + i].to_f64()
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.m)
            .map(|j| (0..self.m).map(|i| self.get(j, i)).collect())
            .collect()
    }

    /// `A·v` for node samples `v`.
    pub fn apply(&self, samples: &[f64]) -> Vec<f64> {
        assert_eq!(samples.len(), self.m);
        (0..self.m)
            .map(|j| {
                let mut acc = QuadDouble::ZERO;
                for (i, s) in samples.iter().enumerate() {
                    acc += self.matrix[j * self.m + i] * QuadDouble::from_f64(*s);
                }
                acc.to_f64()
            })
            .collect()
    }

    /// All `M` eigenvalues, from a quad-double QR iteration, sorted by
    /// descending modulus then ascending phase.
    ///
    /// For real λ the map commutes with `x ↦ −x` and so does the matrix (the
    /// nodes are symmetric). The even and odd sectors are then solved
    /// separately: the double eigenvalues `λⁿ` have one copy in each, and an
    /// unstructured solve would split them into spurious complex pairs.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut ev: Vec<Complex64> = if self.is_reflection_symmetric() {
            let (even, odd) = self.sectors();
            let mut v = even.eigenvalues()?;
            v.extend(odd.eigenvalues()?);
            v.into_iter().map(to_c64).collect()
        } else {
            let a = CMatrix::from_fn(self.m, |j, i| {
                Complex::new(self.matrix[j * self.m + i], QuadDouble::ZERO)
            });
            a.eigenvalues()?.into_iter().map(to_c64).collect()
        };
        ev.sort_by(modulus_then_phase);
        Ok(ev)
    }

    fn entry(&self, j: usize, i: usize) -> QuadDouble {
        self.matrix[j * self.m + i]
    }

    fn is_reflection_symmetric(&self) -> bool {
        if !self.context.param.is_real() {
            return false;
        }
        let m = self.m;
        let scale = self.matrix.iter().map(|v| v.abs().to_f64()).fold(0.0, f64::max);
        (0..m).all(|j| {
            (0..m).all(|i| {
                (self.entry(j, i) - self.entry(m - 1 - j, m - 1 - i)).abs().to_f64() <= 1e-24 * scale
            })
        })
    }

    /// Restrictions to node samples with `v(−x) = v(x)` and `v(−x) = −v(x)`.
    fn sectors(&self) -> (CMatrix<QuadDouble>, CMatrix<QuadDouble>) {
        let m = self.m;
        let half = m / 2;
        let mid = (m % 2 == 1).then_some(half);
        let even_dim = half + mid.is_some() as usize;
        let even = CMatrix::from_fn(even_dim, |j, i| {
            let v = if Some(i) == mid {
                self.entry(j, i)
            } else {
                self.entry(j, i) + self.entry(j, m - 1 - i)
            };
            Complex::new(v, QuadDouble::ZERO)
        });
        let odd = CMatrix::from_fn(half, |j, i| {
            Complex::new(self.entry(j, i) - self.entry(j, m - 1 - i), QuadDouble::ZERO)
        });
        (even, odd)
    }
}

pub fn collocation_matrix(ctx: &IntervalMapContext, m: usize) -> Result<IntervalDiscretization> {
    if m < MIN_NODES {
        return Err(SpectreError::InvalidArgument(format!(
            "collocation needs at least {MIN_NODES} nodes, got {m}"
        )));
    }
    let nodes: Vec<QuadDouble> = lobatto(m);
    let mut weights: Vec<QuadDouble> = (0..m)
        .map(|j| QuadDouble::from_f64(if j % 2 == 0 { 1.0 } else { -1.0 }))
        .collect();
    weights[0] *= QuadDouble::from_f64(0.5);
    weights[m - 1] *= QuadDouble::from_f64(0.5);

    let rows: Vec<Vec<QuadDouble>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let x = nodes[j];
            let mut row = vec![QuadDouble::ZERO; m];
            for k in 1..=2 {
                let (mut y, d) = ctx.solve_branch(k, x);
                if (k == 1 && j == m - 1) || (k == 2 && j == 0) {
                    y = x;
                }
                match nodes.iter().position(|&xi| xi == y) {
                    Some(i) => row[i] += d,
                    None => {
                        let terms: Vec<QuadDouble> =
                            (0..m).map(|i| weights[i] / (y - nodes[i])).collect();
                        let total = terms.iter().fold(QuadDouble::ZERO, |a, &b| a + b);
                        for i in 0..m {
                            row[i] += d * terms[i] / total;
                        }
                    }
                }
            }
            row
        })
        .collect();
    Ok(IntervalDiscretization {
        m,
        nodes: nodes.iter().map(|x| x.to_f64()).collect(),
        context: *ctx,
        matrix: rows.into_iter().flatten().collect(),
    })
}

/// The circle prediction joined with the endpoint family `T′(x₀)^{−n}`.
pub fn interval_spectrum_predicted(ctx: &IntervalMapContext, n_max: u32) -> Result<SpectrumPrediction> {
    let mut prediction = predicted_spectrum(&ctx.param, n_max)?;
    let mu = 1.0 / T_deriv_at_fixed_point(ctx);
    for n in 1..=n_max {
        prediction.entries.push(PredictedEigenvalue {
            value: Complex64::new(mu.powi(n as i32), 0.0),
            multiplicity: 1,
            family: Family::Endpoint,
            power: n,
        });
    }
    Ok(prediction)
}

/// Number of leading eigenvalues compared against the prediction.
pub const TOP_EIGENVALUES: usize = 8;
/// Imaginary part above which an eigenvalue counts as non-real.
pub const NONREAL_TOL: f64 = 1e-6;
/// Modulus below which non-real pairs are counted in the Mayer summary.
pub const MAYER_MODULUS: f64 = 0.4;
/// Endpoint powers checked in the Mayer summary.
pub const MAYER_ENDPOINT_POWERS: u32 = 5;
/// Distance at which a computed eigenvalue counts as a predicted one.
pub const MAYER_MATCH_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopPair {
    #[serde(with = "crate::cjson")]
    pub computed: Complex64,
    #[serde(with = "crate::cjson")]
    pub predicted: Complex64,
    pub family: Family,
    pub error: f64,
}

/// Greedy pairing of the `k` largest computed and predicted eigenvalues:
/// each predicted value in turn takes the nearest unused computed one.
pub fn pair_top(computed: &[Complex64], prediction: &SpectrumPrediction, k: usize) -> Vec<TopPair> {
    let mut predicted: Vec<(Complex64, Family)> = prediction
        .entries
        .iter()
        .flat_map(|e| std::iter::repeat_n((e.value, e.family), e.multiplicity))
        .collect();
    predicted.sort_by(|a, b| modulus_then_phase(&a.0, &b.0));
    predicted.truncate(k);
    let mut top = computed.to_vec();
    top.sort_by(modulus_then_phase);
    top.truncate(k);
    let mut used = vec![false; top.len()];
    let mut pairs = Vec::new();
    for (p, family) in predicted {
        let best = (0..top.len())
            .filter(|&i| !used[i])
            .min_by(|&a, &b| (top[a] - p).norm().total_cmp(&(top[b] - p).norm()));
        if let Some(i) = best {
            used[i] = true;
            pairs.push(TopPair {
                computed: top[i],
                predicted: p,
                family,
                error: (top[i] - p).norm(),
            });
        }
    }
    pairs
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MayerSummary {
    /// Conjugate pairs with `|Im| > NONREAL_TOL` and modulus below `MAYER_MODULUS`.
    pub nonreal_pairs: usize,
    /// Those of the pairs lying within `MAYER_MATCH_TOL` of a predicted `λⁿ`, `λ̄ⁿ`.
    pub matched_nonreal_pairs: usize,
    pub smallest_nonreal_modulus: Option<f64>,
    /// `Φ₁′(x₀)` and `Φ₂′(x₁)`, the multipliers at the branch fixed points.
    pub fixed_point_multipliers: Vec<f64>,
    /// Largest distance from `T′(x₀)^{−n}`, `n = 1..=MAYER_ENDPOINT_POWERS`,
    /// to the nearest computed eigenvalue.
    pub endpoint_family_error: f64,
    /// Non-real eigenvalues exist below `MAYER_MODULUS` while every
    /// fixed-point multiplier is real.
    pub counterexample: bool,
}

pub fn mayer_summary(ctx: &IntervalMapContext, eigenvalues: &[Complex64]) -> MayerSummary {
    let upper: Vec<&Complex64> = eigenvalues
        .iter()
        .filter(|v| v.im > NONREAL_TOL && v.norm() < MAYER_MODULUS)
        .collect();
    let nonreal_pairs = upper
        .iter()
        .filter(|v| {
            eigenvalues
                .iter()
                .any(|w| (w - v.conj()).norm() <= 1e-9 * v.norm().max(1e-300) + 1e-14)
        })
        .count();
    let lam = ctx.param.lambda();
    let matched_nonreal_pairs = upper
        .iter()
        .filter(|v| {
            (1..=64).any(|n| {
                let p = lam.powi(n);
                (**v - p).norm() < MAYER_MATCH_TOL || (**v - p.conj()).norm() < MAYER_MATCH_TOL
            })
        })
        .count();
    let smallest_nonreal_modulus = eigenvalues
        .iter()
        .filter(|v| v.im.abs() > NONREAL_TOL)
        .map(|v| v.norm())
        .min_by(f64::total_cmp);
    let m1 = ctx.solve_branch::<f64>(1, ctx.x0).1;
    let m2 = ctx.solve_branch::<f64>(2, ctx.x1).1;
    let mu = 1.0 / T_deriv_at_fixed_point(ctx);
    let endpoint_family_error = (1..=MAYER_ENDPOINT_POWERS)
        .map(|n| {
            let target = mu.powi(n as i32);
            eigenvalues
                .iter()
                .map(|v| (v - target).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    MayerSummary {
        nonreal_pairs,
        matched_nonreal_pairs,
        smallest_nonreal_modulus,
        fixed_point_multipliers: vec![m1, m2],
        endpoint_family_error,
        // the multipliers are real by construction: T maps the interval to itself
        counterexample: nonreal_pairs > 0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpectrumReport {
    pub m: usize,
    #[serde(with = "crate::cjson::vec")]
    pub computed: Vec<Complex64>,
    pub prediction: SpectrumPrediction,
    pub pairs: Vec<TopPair>,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
    pub mayer: Option<MayerSummary>,
}

/// Collocation eigenvalues paired against the prediction; the Mayer summary is
/// attached for non-real λ.
pub fn interval_spectrum(ctx: &IntervalMapContext, m: usize, tol: f64) -> Result<IntervalSpectrumReport> {
    let disc = collocation_matrix(ctx, m)?;
    let computed = disc.eigenvalues()?;
    let prediction = interval_spectrum_predicted(ctx, TOP_EIGENVALUES as u32)?;
    let pairs = pair_top(&computed, &prediction, TOP_EIGENVALUES);
    let max_error = pairs.iter().map(|p| p.error).fold(0.0, f64::max);
    let mayer = (!ctx.param.is_real()).then(|| mayer_summary(ctx, &computed));
    Ok(IntervalSpectrumReport {
        m,
        pass: max_error < tol && pairs.len() == TOP_EIGENVALUES,
        computed,
        prediction,
        pairs,
        max_error,
        tol,
        mayer,
    })
}

/// Real polynomial in the monomial basis, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        }
    }
}

/// `(L_I f)(x)`; `x` may sit slightly outside the interval.
fn apply_interval(ctx: &IntervalMapContext, f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (1..=2)
        .map(|k| {
            let (y, d) = ctx.solve_branch::<f64>(k, x);
            d * f(y)
        })
        .sum()
}

/// `ℓ_n(f) = f⁽ⁿ⁾(x₁) − f⁽ⁿ⁾(x₀)`.
pub fn dual_functional(ctx: &IntervalMapContext, f: &Polynomial, n: usize) -> f64 {
    let mut g = f.clone();
    for _ in 0..n {
        g = g.derivative();
    }
    g.eval(ctx.x1) - g.eval(ctx.x0)
}

/// Maximum polynomial degree accepted by the dual-functional check.
pub const DUAL_MAX_DEGREE: usize = 12;
/// Step of the one-sided endpoint stencils.
pub const ENDPOINT_STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualFunctionalReport {
    pub order: usize,
    /// `ℓ_n(L_I f)`.
    pub lhs: f64,
    /// `Φ₁′(x₀)^{n+1}·ℓ_n(f)`.
    pub rhs: f64,
    pub functional: f64,
    pub factor: f64,
    pub residual: f64,
    pub tol: f64,
    /// Order 1 with `ℓ₀(f) ≠ 0`: the identity does not apply and nothing is checked.
    pub skipped: bool,
    pub pass: bool,
}

/// Fourth-order one-sided first derivative, stepping in direction `sign`.
fn one_sided_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64, sign: f64) -> f64 {
    let s = |j: f64| f(x + sign * j * h);
    sign * (-25.0 * s(0.0) + 48.0 * s(1.0) - 36.0 * s(2.0) + 16.0 * s(3.0) - 3.0 * s(4.0))
        / (12.0 * h)
}

pub fn dual_functional_check(
    ctx: &IntervalMapContext,
    f: &Polynomial,
    order: usize,
) -> Result<DualFunctionalReport> {
    if f.degree() > DUAL_MAX_DEGREE {
        return Err(SpectreError::InvalidArgument(format!(
            "polynomial degree {} exceeds {DUAL_MAX_DEGREE}",
            f.degree()
        )));
    }
    let factor = ctx.solve_branch::<f64>(1, ctx.x0).1;
    let lf = |x: f64| apply_interval(ctx, |y| f.eval(y), x);
    let (lhs, tol, skipped) = match order {
        0 => (lf(ctx.x1) - lf(ctx.x0), 1e-9, false),
        1 => {
            let right = one_sided_derivative(lf, ctx.x1, ENDPOINT_STEP, -1.0);
            let left = one_sided_derivative(lf, ctx.x0, ENDPOINT_STEP, 1.0);
            (right - left, 1e-8, dual_functional(ctx, f, 0).abs() > 1e-12)
        }
        _ => {
            return Err(SpectreError::InvalidArgument(format!(
                "dual functional order must be 0 or 1, got {order}"
            )))
        }
    };
    let functional = dual_functional(ctx, f, order);
    let rhs = factor.powi(order as i32 + 1) * functional;
    let residual = (lhs - rhs).abs();
    Ok(DualFunctionalReport {
        order,
        lhs,
        rhs,
        functional,
        factor,
        residual,
        tol,
        skipped,
        pass: skipped || residual < tol,
    })
}

/// Number of interval points in the intertwining check.
pub const INTERTWINE_POINTS: usize = 128;

/// `sup_x |(L_I Q_p f)(x) − (Q_p L_T f)(x)|` over an evenly spaced grid,
/// with `(Q_p f)(x) = p′(x)·f(p(x))`.
pub fn intertwine_check(ctx: &IntervalMapContext, f: &TrigPoly) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for j in 0..INTERTWINE_POINTS {
        let x = ctx.x0 + (ctx.x1 - ctx.x0) * j as f64 / (INTERTWINE_POINTS - 1) as f64;
        let mut left = Complex64::new(0.0, 0.0);
        for k in 1..=2 {
            let (y, d) = interval_branch(ctx, k, x)?;
            left += d * ctx.project_deriv(y) * f.eval(ctx.project(y));
        }
        let right = ctx.project_deriv(x) * branch_sum(&ctx.param, ctx.project(x), |z| f.eval(z))?;
        worst = worst.max((left - right).norm());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingCondition {
    pub name: String,
    pub order: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingReport {
    pub conditions: Vec<MatchingCondition>,
    pub pass: bool,
}

/// `Φ_k″` by Richardson-extrapolated central differences of `Φ_k′`.
fn branch_second_derivative(ctx: &IntervalMapContext, k: usize, x: f64) -> f64 {
    let d = |h: f64| {
        (ctx.solve_branch::<f64>(k, x + h).1 - ctx.solve_branch::<f64>(k, x - h).1) / (2.0 * h)
    };
    let h = ENDPOINT_STEP;
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// The endpoint matching conditions for two branches at derivative orders
/// 0, 1 and 2. At order 0 the conditions pairing `Φ₁(x₀)` with `Φ₂(x₁)` hold
/// modulo the identification `x₀ ~ x₁`, so they are compared mod 2.
pub fn branch_matching(ctx: &IntervalMapContext) -> MatchingReport {
    let (x0, x1) = (ctx.x0, ctx.x1);
    let value = |k: usize, x: f64, n: usize| match n {
        0 => ctx.solve_branch::<f64>(k, x).0,
        1 => ctx.solve_branch::<f64>(k, x).1,
        _ => branch_second_derivative(ctx, k, x),
    };
    let mut conditions = Vec::new();
    let mut push = |name: &str, order: usize, lhs: f64, rhs: f64, modulo: bool| {
        let mut residual = (lhs - rhs).abs();
        if modulo {
            residual = (residual - 2.0 * (residual / 2.0).round()).abs();
        }
        let tol = if order == 2 { 1e-6 } else { 1e-10 };
        conditions.push(MatchingCondition {
            name: name.to_string(),
            order,
            lhs,
            rhs,
            residual,
            tol,
            pass: residual < tol,
        });
    };
    push("Φ1(x0) = x0", 0, value(1, x0, 0), x0, false);
    push("Φ2(x1) = x1", 0, value(2, x1, 0), x1, false);
    for n in 0..=2 {
        push("Φ1^(n)(x0) = Φ2^(n)(x1)", n, value(1, x0, n), value(2, x1, n), n == 0);
        push("Φ2^(n)(x0) = Φ1^(n)(x1)", n, value(2, x0, n), value(1, x1, n), false);
    }
    let pass = conditions.iter().all(|c| c.pass);
    MatchingReport { conditions, pass }
}

/// `max_x |p(T(x)) − τ(p(x))|` over `n` evenly spaced points.
pub fn projection_residual(ctx: &IntervalMapContext, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let x = ctx.x0 + (ctx.x1 - ctx.x0) * j as f64 / (n - 1) as f64;
        let lhs = ctx.project(T_eval(ctx, x)?);
        let rhs = tau_eval(&ctx.param, ctx.project(x))?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}
