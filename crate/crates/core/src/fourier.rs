//! Fourier-basis matrix of the transfer operator.
//!
//! Entry `(n, l)` is `(1/2π) ∫ e^{i(l−n)θ} h(e^{iθ})ⁿ dθ` with
//! `h(z) = (1 − λ̄z)/(λ − z)`, i.e. the `n`-th Fourier coefficient of the
//! image of `zˡ` under the arc-length branch sum
//! [`crate::blaschke::branch_sum_arc`]. Indices run over the symmetric window
//! `−N..=N`.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::blaschke::{branch_sum, tau_eval, BlaschkeParam};
use crate::dd::DoubleDouble;
use crate::error::{Result, SpectreError};
use crate::linalg::CMatrix;
use crate::scalar::{cis, from_c64, to_c64};

type Cdd = num_complex::Complex<DoubleDouble>;

/// Largest `|n|`, `|l|` accepted by the entry routines.
pub const MAX_INDEX: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub min_points: usize,
    pub target_tol: f64,
    pub max_points: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            min_points: 256,
            target_tol: 1e-13,
            max_points: 1 << 20,
        }
    }
}

impl QuadratureSpec {
    pub fn new(min_points: usize, target_tol: f64, max_points: usize) -> Result<Self> {
        let spec = Self {
            min_points,
            target_tol,
            max_points,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_points < 64 {
            return Err(SpectreError::InvalidArgument(format!(
                "min_points must be at least 64, got {}",
                self.min_points
            )));
        }
        if !(self.target_tol >= 1e-14) {
            return Err(SpectreError::InvalidArgument(format!(
                "target_tol must be at least 1e-14, got {:e}",
                self.target_tol
            )));
        }
        if self.max_points < self.min_points {
            return Err(SpectreError::InvalidArgument(format!(
                "max_points {} is below min_points {}",
                self.max_points, self.min_points
            )));
        }
        Ok(())
    }

    fn start(&self, index_bound: i64) -> usize {
        self.min_points.max(8 * (index_bound as usize + 2))
    }
}

fn check_index(i: i64) -> Result<()> {
    if i.abs() > MAX_INDEX {
        return Err(SpectreError::IndexOutOfRange {
            index: i,
            max: MAX_INDEX,
        });
    }
    Ok(())
}

/// `e^{−inθ} h(e^{iθ})ⁿ`, the generator whose Fourier coefficients form row `n`.
fn row_generator(lambda: Complex64, n: i64, theta: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, theta);
    let h = (1.0 - lambda.conj() * z) / (lambda - z);
    h.powi(n as i32) * Complex64::from_polar(1.0, -(n as f64) * theta)
}

/// Trapezoid rule with midpoint doubling until two successive values differ
/// by less than `spec.target_tol`.
fn adaptive_trapezoid(
    spec: &QuadratureSpec,
    start: usize,
    f: impl Fn(f64) -> Complex64,
) -> Result<Complex64> {
    spec.validate()?;
    let mut m = start;
    let mut sum: Complex64 = (0..m).map(|j| f(TAU * j as f64 / m as f64)).sum();
    let mut value = sum / m as f64;
    loop {
        if 2 * m > spec.max_points {
            return Err(SpectreError::NonConvergence {
                points: m,
                change: f64::INFINITY,
                tol: spec.target_tol,
            });
        }
        let mid: Complex64 = (0..m)
            .map(|j| f(TAU * (j as f64 + 0.5) / m as f64))
            .sum();
        sum += mid;
        m *= 2;
        let next = sum / m as f64;
        let change = (next - value).norm();
        value = next;
        if change < spec.target_tol {
            return Ok(value);
        }
        if 2 * m > spec.max_points {
            return Err(SpectreError::NonConvergence {
                points: m,
                change,
                tol: spec.target_tol,
            });
        }
    }
}

pub fn entry_quadrature(
    param: &BlaschkeParam,
    n: i64,
    l: i64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    check_index(n)?;
    check_index(l)?;
    let lambda = param.lambda();
    adaptive_trapezoid(spec, spec.start(n.abs().max(l.abs())), |t| {
        row_generator(lambda, n, t) * Complex64::from_polar(1.0, l as f64 * t)
    })
}

/// Row `n` over columns `−N..=N` by the trapezoid rule evaluated in
/// double-double, doubling the node count until the row stabilizes.
///
/// Entries that vanish identically come out at the 1e-30 level instead of
/// f64 roundoff, which the dense eigensolver needs: the matrix is far from
/// normal and its small eigenvalues move by a fractional power of any
/// perturbation below the diagonal.
pub fn row_quadrature_dd(
    param: &BlaschkeParam,
    n: i64,
    order: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<Cdd>> {
    spec.validate()?;
    check_index(n)?;
    check_index(order as i64)?;
    let big_n = order as i64;
    let width = 2 * order + 1;
    let lam: Cdd = from_c64(param.lambda());
    let one = Cdd::new(DoubleDouble::ONE, DoubleDouble::ZERO);
    let add_nodes = |acc: &mut [Cdd], m: usize, shift: f64| {
        for j in 0..m {
            let frac = DoubleDouble::from_f64(2.0 * j as f64 + 2.0 * shift)
                / DoubleDouble::from_f64(m as f64);
            let z = cis(DoubleDouble::PI * frac);
            // h(z)/z has unit modulus on the circle, so its inverse is its conjugate
            let q = (one - lam.conj() * z) / (lam - z) * z.conj();
            let q = if n < 0 { q.conj() } else { q };
            let mut g = one;
            for _ in 0..n.unsigned_abs() {
                g *= q;
            }
            let mut e = one;
            for _ in 0..big_n {
                e *= z.conj();
            }
            for slot in acc.iter_mut() {
                *slot += g * e;
                e *= z;
            }
        }
    };
    let scale = |acc: &[Cdd], m: usize| -> Vec<Cdd> {
        let inv = DoubleDouble::ONE / DoubleDouble::from_f64(m as f64);
        acc.iter().map(|v| Cdd::new(v.re * inv, v.im * inv)).collect()
    };
    let mut m = spec.start(big_n.max(n.abs()));
    let mut acc = vec![Cdd::new(DoubleDouble::ZERO, DoubleDouble::ZERO); width];
    add_nodes(&mut acc, m, 0.0);
    let mut row = scale(&acc, m);
    let mut change = f64::INFINITY;
    loop {
        if 2 * m > spec.max_points {
            if change < spec.target_tol {
                return Ok(row);
            }
            return Err(SpectreError::NonConvergence {
                points: m,
                change,
                tol: spec.target_tol,
            });
        }
        add_nodes(&mut acc, m, 0.5);
        m *= 2;
        let next = scale(&acc, m);
        change = row
            .iter()
            .zip(&next)
            .map(|(a, b)| to_c64(*a - *b).norm())
            .fold(0.0, f64::max);
        row = next;
        // stop well past the f64 target so the vanishing entries are resolved too
        if change < spec.target_tol * 1e-3 {
            return Ok(row);
        }
    }
}

/// Row `n` over columns `−N..=N` from one FFT of the row generator, doubling
/// the sample count until the row stabilizes.
pub fn row_fft(
    param: &BlaschkeParam,
    n: i64,
    order: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    spec.validate()?;
    check_index(n)?;
    check_index(order as i64)?;
    let big_n = order as i64;
    let lambda = param.lambda();
    let mut planner = FftPlanner::<f64>::new();
    let mut m = spec.start(big_n.max(n.abs()));
    let mut prev: Option<Vec<Complex64>> = None;
    loop {
        let mut buf: Vec<Complex64> = (0..m)
            .map(|j| row_generator(lambda, n, TAU * j as f64 / m as f64))
            .collect();
        planner.plan_fft_forward(m).process(&mut buf);
        let row: Vec<Complex64> = (-big_n..=big_n)
            .map(|l| buf[(-l).rem_euclid(m as i64) as usize] / m as f64)
            .collect();
        if let Some(p) = &prev {
            let change = p
                .iter()
                .zip(&row)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if change < spec.target_tol {
                return Ok(row);
            }
            if 2 * m > spec.max_points {
                return Err(SpectreError::NonConvergence {
                    points: m,
                    change,
                    tol: spec.target_tol,
                });
            }
        } else if 2 * m > spec.max_points {
            return Err(SpectreError::NonConvergence {
                points: m,
                change: f64::INFINITY,
                tol: spec.target_tol,
            });
        }
        prev = Some(row);
        m *= 2;
    }
}

/// Exact binomial coefficient; errors instead of wrapping.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c·(n−i)/(i+1) with the division done first so only the result can overflow
        let d = i as u128 + 1;
        let g = gcd(c, d);
        let m = (n - i) as u128 / (d / g);
        c = (c / g)
            .checked_mul(m)
            .ok_or(SpectreError::BinomialOverflow { n })?;
    }
    Ok(c)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Whether the printed binomial formula needs a `(−1)ⁿ` row factor to agree
/// with the contour integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignConvention {
    AsPrinted,
    AlternatingRows,
}

/// Binomial-sum formula for `n > 0`, without any sign correction.
fn closed_form_raw(lambda: Complex64, n: i64, l: i64) -> Result<Complex64> {
    debug_assert!(n > 0);
    if l < n {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a2 = -lambda.norm_sqr();
    let term = |m: i64, e: i64| -> Result<f64> {
        let b1 = binomial((l - m - 1) as u64, (n - 1) as u64)?;
        let b2 = binomial(n as u64, m as u64)?;
        Ok(b1 as f64 * b2 as f64 * a2.powi(e as i32))
    };
    if l - n <= n {
        let mut s = 0.0;
        for m in 0..=(l - n) {
            s += term(m, l - n - m)?;
        }
        Ok((-lambda.conj()).powi((2 * n - l) as i32) * s)
    } else {
        let mut s = 0.0;
        for m in 0..=n {
            s += term(m, n - m)?;
        }
        Ok(lambda.powi((l - 2 * n) as i32) * s)
    }
}

static SIGN_CONVENTION: OnceLock<std::result::Result<SignConvention, SpectreError>> = OnceLock::new();

/// Compares the printed formula with quadrature on a 5×5 probe
/// (`λ = 0.3 + 0.2i`, `n = 1..=5`, `l = n..=n+4`). Computed once per process.
pub fn closed_form_sign_convention() -> Result<SignConvention> {
    SIGN_CONVENTION
        .get_or_init(probe_sign_convention)
        .clone()
}

fn probe_sign_convention() -> Result<SignConvention> {
    let param = BlaschkeParam::from_re_im(0.3, 0.2)?;
    let spec = QuadratureSpec::default();
    let (mut plain, mut flipped) = (0.0f64, 0.0f64);
    for n in 1..=5 {
        for l in n..=n + 4 {
            let q = entry_quadrature(&param, n, l, &spec)?;
            let raw = closed_form_raw(param.lambda(), n, l)?;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            plain = plain.max((raw - q).norm());
            flipped = flipped.max((raw * sign - q).norm());
        }
    }
    const PROBE_TOL: f64 = 1e-10;
    if plain < PROBE_TOL {
        Ok(SignConvention::AsPrinted)
    } else if flipped < PROBE_TOL {
        Ok(SignConvention::AlternatingRows)
    } else {
        Err(SpectreError::SignProbeFailed { plain, flipped })
    }
}

pub fn entry_closed_form(param: &BlaschkeParam, n: i64, l: i64) -> Result<Complex64> {
    check_index(n)?;
    check_index(l)?;
    let convention = closed_form_sign_convention()?;
    closed_form_with(param.lambda(), n, l, convention)
}

fn closed_form_with(
    lambda: Complex64,
    n: i64,
    l: i64,
    convention: SignConvention,
) -> Result<Complex64> {
    if n == 0 {
        return Ok(Complex64::new(if l == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    if n < 0 {
        return Ok(closed_form_with(lambda, -n, -l, convention)?.conj());
    }
    let raw = closed_form_raw(lambda, n, l)?;
    Ok(match convention {
        SignConvention::AlternatingRows if n % 2 == 1 => -raw,
        _ => raw,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyMethod {
    Quadrature,
    Fft,
    ClosedForm,
}

impl AssemblyMethod {
    pub fn name(&self) -> &'static str {
        match self {
            AssemblyMethod::Quadrature => "quadrature",
            AssemblyMethod::Fft => "fft",
            AssemblyMethod::ClosedForm => "closed_form",
        }
    }
}

/// `(2N+1)×(2N+1)` matrix over the index window `−N..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    order: usize,
    param: BlaschkeParam,
    method: AssemblyMethod,
    data: CMatrix<f64>,
    /// Double-double entries, kept for quadrature assembly.
    data_dd: Option<CMatrix<DoubleDouble>>,
}

impl TransferMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn param(&self) -> &BlaschkeParam {
        &self.param
    }

    pub fn method(&self) -> AssemblyMethod {
        self.method
    }

    pub fn dim(&self) -> usize {
        2 * self.order + 1
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -(self.order as i64)..=self.order as i64
    }

    /// Position of index `n` in the underlying array.
    pub fn position(&self, n: i64) -> usize {
        (n + self.order as i64) as usize
    }

    pub fn get(&self, n: i64, l: i64) -> Complex64 {
        assert!(
            n.unsigned_abs() as usize <= self.order && l.unsigned_abs() as usize <= self.order,
            "index ({n}, {l}) outside window ±{}",
            self.order
        );
        self.data[(self.position(n), self.position(l))]
    }

    pub fn as_matrix(&self) -> &CMatrix<f64> {
        &self.data
    }

    /// Entries in double-double: the stored extended-precision values when
    /// the assembly produced them, otherwise the f64 entries widened.
    pub fn as_matrix_dd(&self) -> CMatrix<DoubleDouble> {
        match &self.data_dd {
            Some(m) => m.clone(),
            None => CMatrix::from_fn(self.dim(), |i, j| from_c64(self.data[(i, j)])),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.indices().map(|n| self.get(n, n)).collect()
    }

    /// The `k`-window matrix sitting in the middle of this one.
    pub fn central(&self, k: usize) -> TransferMatrix {
        assert!(k <= self.order);
        let k = k as i64;
        let off = self.order - k as usize;
        let dim = 2 * k as usize + 1;
        let data = CMatrix::from_fn(dim, |i, j| self.data[(i + off, j + off)]);
        let data_dd = self
            .data_dd
            .as_ref()
            .map(|d| CMatrix::from_fn(dim, |i, j| d[(i + off, j + off)]));
        TransferMatrix {
            order: k as usize,
            param: self.param,
            method: self.method,
            data,
            data_dd,
        }
    }

    /// Copy with one entry replaced (fault injection for the structure checks).
    pub fn with_entry(&self, n: i64, l: i64, value: Complex64) -> TransferMatrix {
        let mut m = self.clone();
        let (i, j) = (m.position(n), m.position(l));
        m.data[(i, j)] = value;
        if let Some(d) = m.data_dd.as_mut() {
            d[(i, j)] = from_c64(value);
        }
        m
    }
}

pub fn assemble(
    param: &BlaschkeParam,
    order: usize,
    method: AssemblyMethod,
    spec: &QuadratureSpec,
) -> Result<TransferMatrix> {
    if order < 1 {
        return Err(SpectreError::InvalidArgument("order N must be at least 1".into()));
    }
    check_index(order as i64)?;
    spec.validate()?;
    let big_n = order as i64;
    if method == AssemblyMethod::ClosedForm {
        closed_form_sign_convention()?;
    }
    if method == AssemblyMethod::Quadrature {
        let rows: Vec<Vec<Cdd>> = (-big_n..=big_n)
            .into_par_iter()
            .map(|n| row_quadrature_dd(param, n, order, spec))
            .collect::<Result<_>>()?;
        let data_dd = CMatrix::from_rows(rows);
        let data = CMatrix::from_fn(data_dd.dim(), |i, j| to_c64(data_dd[(i, j)]));
        return Ok(TransferMatrix {
            order,
            param: *param,
            method,
            data,
            data_dd: Some(data_dd),
        });
    }
    let rows: Vec<Vec<Complex64>> = (-big_n..=big_n)
        .into_par_iter()
        .map(|n| match method {
            AssemblyMethod::Fft => row_fft(param, n, order, spec),
            _ => (-big_n..=big_n)
                .map(|l| entry_closed_form(param, n, l))
                .collect(),
        })
        .collect::<Result<_>>()?;
    Ok(TransferMatrix {
        order,
        param: *param,
        method,
        data: CMatrix::from_rows(rows),
        data_dd: None,
    })
}

/// Largest violation of each structural property over the window:
/// (a) `L₀₀ = 1`, (b) `L₀ₗ = 0` for `l ≠ 0`, (c) `L₋ₙ,₋ₗ = conj Lₙₗ`,
/// (d) `L₋ₙ,₋ₙ = λⁿ`, (e) `Lₙₗ = L₋ₙ,₋ₗ = 0` for `n ≥ 1`, `l < n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub tol: f64,
    pub pass: bool,
}

impl StructureReport {
    pub fn max_violation(&self) -> f64 {
        [self.a, self.b, self.c, self.d, self.e]
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Properties whose violation exceeds the tolerance, by letter.
    pub fn failures(&self) -> Vec<char> {
        [('a', self.a), ('b', self.b), ('c', self.c), ('d', self.d), ('e', self.e)]
            .into_iter()
            .filter(|(_, v)| !(*v <= self.tol))
            .map(|(k, _)| k)
            .collect()
    }
}

pub fn validate_structure(matrix: &TransferMatrix, tol: f64) -> StructureReport {
    let big_n = matrix.order as i64;
    let lambda = matrix.param.lambda();
    let one = Complex64::new(1.0, 0.0);

    let a = (matrix.get(0, 0) - one).norm();
    let b = (-big_n..=big_n)
        .filter(|&l| l != 0)
        .map(|l| matrix.get(0, l).norm())
        .fold(0.0, f64::max);
    let mut c = 0.0f64;
    for n in -big_n..=big_n {
        for l in -big_n..=big_n {
            c = c.max((matrix.get(-n, -l) - matrix.get(n, l).conj()).norm());
        }
    }
    let d = (0..=big_n)
        .map(|n| (matrix.get(-n, -n) - lambda.powi(n as i32)).norm())
        .fold(0.0, f64::max);
    let mut e = 0.0f64;
    for n in 1..=big_n {
        for l in -big_n..n {
            e = e.max(matrix.get(n, l).norm()).max(matrix.get(-n, -l).norm());
        }
    }
    let mut report = StructureReport {
        a,
        b,
        c,
        d,
        e,
        tol,
        pass: false,
    };
    report.pass = report.failures().is_empty();
    report
}

/// Finite Laurent polynomial `Σ cₖ z^{min_index + k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub min_index: i64,
    #[serde(with = "crate::cjson::vec")]
    pub coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn new(min_index: i64, coeffs: Vec<Complex64>) -> Self {
        Self { min_index, coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(k: i64) -> Self {
        Self::new(k, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn max_index(&self) -> i64 {
        self.min_index + self.coeffs.len() as i64 - 1
    }

    pub fn degree(&self) -> i64 {
        self.min_index.abs().max(self.max_index().abs())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let acc = self
            .coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
        acc * z.powi(self.min_index as i32)
    }

    pub fn derivative(&self) -> TrigPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (self.min_index + k as i64) as f64)
            .collect();
        TrigPoly::new(self.min_index - 1, coeffs)
    }
}

/// `|∫ (Lf) g dz − ∫ f·(g∘τ) dz|` over the unit circle, with `L` the
/// holomorphic branch sum and both sides by adaptive trapezoid quadrature.
pub fn duality_check(
    param: &BlaschkeParam,
    f: &TrigPoly,
    g: &TrigPoly,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let start = spec.start(2 * f.degree().max(g.degree()));
    let lhs_fail = std::cell::Cell::new(None);
    let lhs = adaptive_trapezoid(spec, start, |t| {
        let z = Complex64::from_polar(1.0, t);
        match branch_sum(param, z, |u| f.eval(u)) {
            Ok(lf) => lf * g.eval(z) * Complex64::new(0.0, TAU) * z,
            Err(e) => {
                lhs_fail.set(Some(e));
                Complex64::new(f64::NAN, 0.0)
            }
        }
    });
    if let Some(e) = lhs_fail.take() {
        return Err(e);
    }
    let lhs = lhs?;
    let rhs_fail = std::cell::Cell::new(None);
    let rhs = adaptive_trapezoid(spec, start, |t| {
        let z = Complex64::from_polar(1.0, t);
        match tau_eval(param, z) {
            Ok(w) => f.eval(z) * g.eval(w) * Complex64::new(0.0, TAU) * z,
            Err(e) => {
                rhs_fail.set(Some(e));
                Complex64::new(f64::NAN, 0.0)
            }
        }
    });
    if let Some(e) = rhs_fail.take() {
        return Err(e);
    }
    Ok((lhs - rhs?).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::branch_sum_arc;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn p(re: f64, im: f64) -> BlaschkeParam {
        BlaschkeParam::from_re_im(re, im).unwrap()
    }

    /// λ = 0: `L_{n,2n} = (−1)ⁿ`, all else zero.
    fn doubling(n: i64, l: i64) -> Complex64 {
        if l == 2 * n {
            c(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            c(0.0, 0.0)
        }
    }

    fn test_params() -> Vec<BlaschkeParam> {
        vec![
            p(0.2, 0.0),
            p(0.5, 0.0),
            p(0.8, 0.0),
            p(0.3, 0.4),
            BlaschkeParam::from_polar(0.7, -2.0137).unwrap(),
        ]
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(32, 1e-13, 1024).is_err());
        assert!(QuadratureSpec::new(256, 1e-15, 1024).is_err());
        assert!(QuadratureSpec::new(256, 1e-13, 128).is_err());
        assert!(QuadratureSpec::new(64, 1e-14, 64).is_ok());
    }

    #[test]
    fn quadrature_examples() {
        for lam in test_params() {
            assert!((entry_quadrature(&lam, 0, 0, &spec()).unwrap() - 1.0).norm() < 1e-15);
        }
        let v = entry_quadrature(&p(0.6, 0.0), -2, -2, &spec()).unwrap();
        assert!((v - 0.36).norm() < 1e-14);
        let v = entry_quadrature(&p(0.0, 0.0), 1, 2, &spec()).unwrap();
        assert!((v + 1.0).norm() < 1e-15);
    }

    #[test]
    fn quadrature_reports_budget_exhaustion() {
        let tight = QuadratureSpec::new(64, 1e-14, 128).unwrap();
        let err = entry_quadrature(&p(0.99, 0.0), 3, 5, &tight).unwrap_err();
        assert!(matches!(err, SpectreError::NonConvergence { .. }));
        assert!(matches!(
            entry_quadrature(&p(0.5, 0.0), 65, 0, &spec()),
            Err(SpectreError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn fft_row_examples() {
        let row = row_fft(&p(0.0, 0.0), 1, 4, &spec()).unwrap();
        for (k, v) in row.iter().enumerate() {
            let l = k as i64 - 4;
            assert!((v - doubling(1, l)).norm() < 1e-15, "l = {l}");
        }
        for lam in test_params() {
            let row = row_fft(&lam, 0, 4, &spec()).unwrap();
            for (k, v) in row.iter().enumerate() {
                let expect = if k == 4 { 1.0 } else { 0.0 };
                assert!((v - expect).norm() < 1e-15);
            }
        }
        let lam = p(0.4, 0.0);
        let row = row_fft(&lam, 2, 8, &spec()).unwrap();
        for (k, v) in row.iter().enumerate() {
            let q = entry_quadrature(&lam, 2, k as i64 - 8, &spec()).unwrap();
            assert!((v - q).norm() < 1e-12);
        }
    }

    #[test]
    fn sign_probe_picks_alternating_rows() {
        assert_eq!(
            closed_form_sign_convention().unwrap(),
            SignConvention::AlternatingRows
        );
    }

    #[test]
    fn closed_form_examples() {
        assert!((entry_closed_form(&p(0.0, 0.0), 2, 4).unwrap() - 1.0).norm() < 1e-15);
        assert!((entry_closed_form(&p(0.4, 0.0), 1, 2).unwrap() + 0.84).norm() < 1e-15);
        for lam in [0.3, -0.6, 0.75] {
            let v = entry_closed_form(&p(lam, 0.0), 1, 1).unwrap();
            let w = entry_closed_form(&p(lam, 0.0), -1, -1).unwrap();
            assert!((v - lam).norm() < 1e-15);
            assert!((v - w.conj()).norm() < 1e-15);
        }
        // the residue at z = λ gives L_{2,3} = −2λ̄(1 − |λ|²)
        let lam = p(0.3, 0.4);
        let v = entry_closed_form(&lam, 2, 3).unwrap();
        let expect = -2.0 * lam.lambda().conj() * (1.0 - lam.modulus().powi(2));
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn binomials_are_exact_and_overflow_loudly() {
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert_eq!(binomial(127, 63).unwrap(), 11_975_573_020_964_041_433_067_793_888_190_275_875);
        assert!(matches!(
            binomial(200, 100),
            Err(SpectreError::BinomialOverflow { .. })
        ));
    }

    #[test]
    fn methods_agree_on_the_index_grid() {
        for lam in test_params() {
            let q = assemble(&lam, 12, AssemblyMethod::Quadrature, &spec()).unwrap();
            let f = assemble(&lam, 12, AssemblyMethod::Fft, &spec()).unwrap();
            let cf = assemble(&lam, 12, AssemblyMethod::ClosedForm, &spec()).unwrap();
            for n in -12..=12 {
                for l in -12..=12 {
                    assert!((q.get(n, l) - cf.get(n, l)).norm() < 1e-11, "{lam:?} ({n},{l})");
                    assert!((q.get(n, l) - f.get(n, l)).norm() < 1e-12, "{lam:?} ({n},{l})");
                }
            }
        }
    }

    #[test]
    fn assembled_diagonals() {
        let m = assemble(&p(0.5, 0.0), 3, AssemblyMethod::Quadrature, &spec()).unwrap();
        let expect = [0.125, 0.25, 0.5, 1.0, 0.5, 0.25, 0.125];
        for (d, e) in m.diagonal().iter().zip(expect) {
            assert!((d - e).norm() < 1e-13);
        }
        let lam = p(0.3, 0.4);
        let m = assemble(&lam, 3, AssemblyMethod::Quadrature, &spec()).unwrap();
        let l = lam.lambda();
        let expect = [l.powi(3), l.powi(2), l, c(1.0, 0.0), l.conj(), l.conj().powi(2), l.conj().powi(3)];
        for (d, e) in m.diagonal().iter().zip(expect) {
            assert!((d - e).norm() < 1e-13);
        }
    }

    #[test]
    fn doubling_map_degeneration() {
        for method in [AssemblyMethod::Quadrature, AssemblyMethod::Fft, AssemblyMethod::ClosedForm] {
            let m = assemble(&p(0.0, 0.0), 6, method, &spec()).unwrap();
            for n in -6..=6 {
                for l in -6..=6 {
                    assert!((m.get(n, l) - doubling(n, l)).norm() < 1e-15, "{method:?} ({n},{l})");
                }
            }
            let r = validate_structure(&m.central(4), 1e-13);
            assert!(r.pass);
            assert!(r.max_violation() < 1e-15);
        }
    }

    #[test]
    fn structure_holds_and_faults_are_caught() {
        for lam in test_params() {
            let m = assemble(&lam, 8, AssemblyMethod::Quadrature, &spec()).unwrap();
            let r = validate_structure(&m, 1e-12);
            assert!(r.pass, "{r:?}");
            let bad = m.with_entry(1, 0, c(0.1, 0.0));
            let r = validate_structure(&bad, 1e-11);
            assert!(!r.pass);
            assert!(r.failures().contains(&'e'));
            assert!((r.e - 0.1).abs() < 1e-12);
        }
        let m = assemble(&p(0.5, 0.0), 4, AssemblyMethod::Fft, &spec()).unwrap();
        for (n, l, prop) in [(0, 0, 'a'), (0, 3, 'b'), (-2, -2, 'd'), (3, 4, 'c')] {
            let v = m.get(n, l) + 1e-6;
            let r = validate_structure(&m.with_entry(n, l, v), 1e-11);
            assert!(r.failures().contains(&prop), "({n},{l}) {r:?}");
        }
    }

    #[test]
    fn truncation_nests() {
        let lam = p(0.3, 0.4);
        let big = assemble(&lam, 10, AssemblyMethod::Quadrature, &spec()).unwrap();
        let small = assemble(&lam, 6, AssemblyMethod::Quadrature, &spec()).unwrap();
        let mid = big.central(6);
        for n in -6..=6 {
            for l in -6..=6 {
                assert!((mid.get(n, l) - small.get(n, l)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_is_the_arc_length_operator_in_the_monomial_basis() {
        // column l holds the Fourier coefficients of the branch sum applied to zˡ
        let lam = p(0.3, -0.5);
        let m = assemble(&lam, 6, AssemblyMethod::Fft, &spec()).unwrap();
        for l in -3..=3 {
            for j in 0..32 {
                let w = Complex64::from_polar(1.0, TAU * j as f64 / 32.0);
                let direct = branch_sum_arc(&lam, w, |z| z.powi(l as i32)).unwrap();
                // truncated series is exact here: columns −3..3 stay inside −6..6
                let series: Complex64 = (-6..=6).map(|n| m.get(n, l) * w.powi(n as i32)).sum();
                assert!((direct - series).norm() < 1e-12, "l = {l}");
            }
        }
    }

    #[test]
    fn duality_examples() {
        let one = TrigPoly::constant(c(1.0, 0.0));
        assert!(duality_check(&p(0.4, 0.0), &one, &one, &spec()).unwrap() < 1e-12);
        let f = TrigPoly::new(-1, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let g = TrigPoly::monomial(2);
        assert!(duality_check(&p(0.4, 0.0), &f, &g, &spec()).unwrap() < 1e-10);

        let lam = BlaschkeParam::from_polar(0.7, 1.318).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..5 {
            let mut rand_poly = || {
                TrigPoly::new(
                    -5,
                    (0..11)
                        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect(),
                )
            };
            let (f, g) = (rand_poly(), rand_poly());
            assert!(duality_check(&lam, &f, &g, &spec()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn trig_poly_evaluation() {
        let f = TrigPoly::new(-2, vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        let z = Complex64::from_polar(1.0, 0.7);
        let direct = z.powi(-2) + 2.0 * z.inv() + c(0.0, 1.0) * z;
        assert!((f.eval(z) - direct).norm() < 1e-15);
        let df = f.derivative();
        let direct = -2.0 * z.powi(-3) - 2.0 * z.powi(-2) + c(0.0, 1.0);
        assert!((df.eval(z) - direct).norm() < 1e-14);
        assert_eq!(f.degree(), 2);
    }
}
