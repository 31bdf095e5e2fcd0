//! Exact spectra, numerical eigenvalues of the Fourier matrix, and the
//! bookkeeping that pairs one against the other.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::{branch_sum_arc, BlaschkeParam};
use crate::error::{Result, SpectreError};
use crate::fourier::{assemble, validate_structure, AssemblyMethod, QuadratureSpec, TransferMatrix};
use crate::linalg::{bottleneck_pairing, CMatrix, Lu};
use crate::scalar::to_c64;

/// Which closed-form family a predicted eigenvalue belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// The eigenvalue 1.
    Leading,
    /// `λⁿ` (for real λ this carries both copies).
    Lambda,
    /// `λ̄ⁿ`, non-real λ only.
    LambdaConj,
    /// `T′(x₀)^{−n}`, interval maps only.
    Endpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedEigenvalue {
    #[serde(with = "crate::cjson")]
    pub value: Complex64,
    pub multiplicity: usize,
    pub family: Family,
    pub power: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPrediction {
    pub entries: Vec<PredictedEigenvalue>,
    pub param: BlaschkeParam,
    pub depth: u32,
}

impl SpectrumPrediction {
    /// Values repeated by multiplicity, in entry order.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
            .collect()
    }

    fn expanded_families(&self) -> Vec<Family> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.family, e.multiplicity))
            .collect()
    }

    /// The `k` largest values (by modulus, then phase), with multiplicity.
    pub fn top(&self, k: usize) -> Vec<Complex64> {
        let mut v = self.expanded();
        v.sort_by(modulus_then_phase);
        v.truncate(k);
        v
    }
}

/// Descending modulus, then ascending phase.
pub fn modulus_then_phase(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then_with(|| a.arg().total_cmp(&b.arg()))
}

/// Truncation of the circle spectrum to powers `≤ n_max`.
pub fn predicted_spectrum(param: &BlaschkeParam, n_max: u32) -> Result<SpectrumPrediction> {
    if n_max < 1 {
        return Err(SpectreError::InvalidArgument("n_max must be at least 1".into()));
    }
    let lam = param.lambda();
    let mut entries = vec![PredictedEigenvalue {
        value: Complex64::new(1.0, 0.0),
        multiplicity: 1,
        family: Family::Leading,
        power: 0,
    }];
    if param.modulus() > 0.0 {
        for n in 1..=n_max {
            let v = lam.powi(n as i32);
            if param.is_real() {
                entries.push(PredictedEigenvalue {
                    value: v,
                    multiplicity: 2,
                    family: Family::Lambda,
                    power: n,
                });
            } else {
                entries.push(PredictedEigenvalue {
                    value: v,
                    multiplicity: 1,
                    family: Family::Lambda,
                    power: n,
                });
                entries.push(PredictedEigenvalue {
                    value: v.conj(),
                    multiplicity: 1,
                    family: Family::LambdaConj,
                    power: n,
                });
            }
        }
    }
    Ok(SpectrumPrediction {
        entries,
        param: *param,
        depth: n_max,
    })
}

/// Structure tolerance under which the diagonal is taken as the spectrum.
pub const TRIANGULAR_TOL: f64 = 1e-10;

pub fn eigenvalues_triangular(matrix: &TransferMatrix) -> Result<Vec<Complex64>> {
    let report = validate_structure(matrix, TRIANGULAR_TOL);
    if !report.pass {
        return Err(SpectreError::StructureViolation(format!(
            "properties {:?} exceed {:e} (max violation {:e})",
            report.failures(),
            TRIANGULAR_TOL,
            report.max_violation()
        )));
    }
    Ok(matrix.diagonal())
}

/// Largest matrix handled by the dense solver.
pub const DENSE_MAX_DIM: usize = 129;

/// Eigenvalues of the full matrix by Hessenberg QR. When the matrix has the
/// triangular structure, the result must lie within `tol` of the diagonal
/// under optimal pairing, otherwise [`SpectreError::DenseMismatch`].
pub fn eigenvalues_dense(matrix: &TransferMatrix, tol: f64) -> Result<Vec<Complex64>> {
    if matrix.dim() > DENSE_MAX_DIM {
        return Err(SpectreError::InvalidArgument(format!(
            "dense eigensolver limited to dimension {DENSE_MAX_DIM}, got {}",
            matrix.dim()
        )));
    }
    let ev: Vec<Complex64> = matrix
        .as_matrix_dd()
        .eigenvalues()?
        .into_iter()
        .map(to_c64)
        .collect();
    if let Ok(diag) = eigenvalues_triangular(matrix) {
        let (distance, _) = bottleneck_pairing(&ev, &diag);
        if !(distance <= tol) {
            return Err(SpectreError::DenseMismatch { distance, tol });
        }
    }
    Ok(ev)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    #[serde(with = "crate::cjson::vec")]
    pub computed: Vec<Complex64>,
    pub predicted: SpectrumPrediction,
    /// Predicted values repeated by multiplicity; pairing indices refer here.
    #[serde(with = "crate::cjson::vec")]
    pub predicted_values: Vec<Complex64>,
    /// `(computed index, predicted index)`.
    pub pairing: Vec<(usize, usize)>,
    /// Computed values below `tol` in modulus, matched to the point 0.
    pub zero_cluster: Vec<usize>,
    pub max_pair_error: f64,
    pub unmatched_computed: Vec<usize>,
    pub unmatched_predicted: Vec<usize>,
    pub tol: f64,
    pub pass: bool,
}

/// One line of an eigenvalue table.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRow {
    pub value: Complex64,
    pub matched: Option<Complex64>,
    pub error: Option<f64>,
}

impl SpectrumReport {
    /// Computed values with their partners, sorted by descending modulus then
    /// ascending phase.
    pub fn rows(&self) -> Vec<SpectrumRow> {
        let mut rows: Vec<SpectrumRow> = self
            .computed
            .iter()
            .enumerate()
            .map(|(i, &value)| {
                let matched = self
                    .pairing
                    .iter()
                    .find(|(c, _)| *c == i)
                    .map(|&(_, p)| self.predicted_values[p])
                    .or_else(|| self.zero_cluster.contains(&i).then(|| Complex64::new(0.0, 0.0)));
                SpectrumRow {
                    value,
                    matched,
                    error: matched.map(|m| (value - m).norm()),
                }
            })
            .collect();
        rows.sort_by(|a, b| modulus_then_phase(&a.value, &b.value));
        rows
    }
}

/// Greedy pairing: predicted values in order of decreasing modulus (phase
/// breaks ties) each take the nearest unused computed value, provided it lies
/// within the capture radius `max(1e3·tol, 1e-6)`. Predicted values below
/// `tol` belong to the zero cluster and are not paired.
pub fn match_spectra(computed: &[Complex64], prediction: &SpectrumPrediction, tol: f64) -> SpectrumReport {
    let predicted_values = prediction.expanded();
    let mut order: Vec<usize> = (0..predicted_values.len()).collect();
    order.sort_by(|&a, &b| modulus_then_phase(&predicted_values[a], &predicted_values[b]));
    let capture = (1e3 * tol).max(1e-6);

    let mut used = vec![false; computed.len()];
    let mut pairing = Vec::new();
    let mut unmatched_predicted = Vec::new();
    let mut max_pair_error: f64 = 0.0;
    for &p in &order {
        let pv = predicted_values[p];
        if pv.norm() < tol {
            continue;
        }
        let nearest = computed
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, c)| (i, (c - pv).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((i, d)) if d < capture => {
                used[i] = true;
                pairing.push((i, p));
                max_pair_error = max_pair_error.max(d);
            }
            _ => unmatched_predicted.push(p),
        }
    }
    let mut zero_cluster = Vec::new();
    let mut unmatched_computed = Vec::new();
    for (i, c) in computed.iter().enumerate() {
        if used[i] {
            continue;
        }
        if c.norm() < tol {
            zero_cluster.push(i);
        } else {
            unmatched_computed.push(i);
        }
    }
    let pass = max_pair_error < tol && unmatched_predicted.is_empty();
    SpectrumReport {
        computed: computed.to_vec(),
        predicted: prediction.clone(),
        predicted_values,
        pairing,
        zero_cluster,
        max_pair_error,
        unmatched_computed,
        unmatched_predicted,
        tol,
        pass,
    }
}

impl SpectrumReport {
    /// Family of each paired predicted value, in pairing order.
    pub fn paired_families(&self) -> Vec<Family> {
        let fam = self.predicted.expanded_families();
        self.pairing.iter().map(|&(_, p)| fam[p]).collect()
    }
}

/// Number of circle sample points used for eigenfunction residuals.
pub const RESIDUAL_SAMPLES: usize = 256;
/// Residual bound for reconstructed eigenfunctions.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Distance within which a requested eigenvalue must match a matrix eigenvalue.
pub const EIGENVALUE_MATCH_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenFunction {
    /// Coefficients of `zⁿ` for `n = −N..=N`.
    #[serde(with = "crate::cjson::vec")]
    pub coeffs: Vec<Complex64>,
    #[serde(with = "crate::cjson")]
    pub eigenvalue: Complex64,
    /// Window index of the diagonal entry this eigenvector belongs to.
    pub index: i64,
    pub residual: f64,
}

impl EigenFunction {
    pub fn order(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let n = self.order() as i32;
        let zi = z.inv();
        let mut acc = Complex64::new(0.0, 0.0);
        // Horner in z for the non-negative part, in 1/z for the negative part
        for c in self.coeffs[n as usize..].iter().rev() {
            acc = acc * z + c;
        }
        let mut neg = Complex64::new(0.0, 0.0);
        for c in self.coeffs[..n as usize].iter() {
            neg = (neg + c) * zi;
        }
        acc + neg
    }
}

/// Eigenfunction for the first copy (ascending window index) of `eigenvalue`.
pub fn eigenfunction(matrix: &TransferMatrix, eigenvalue: Complex64) -> Result<EigenFunction> {
    Ok(eigenfunctions(matrix, eigenvalue)?.remove(0))
}

/// One eigenfunction per copy of `eigenvalue` on the diagonal, by ascending
/// window index. Falls back to inverse iteration when the matrix lacks the
/// triangular structure.
pub fn eigenfunctions(matrix: &TransferMatrix, eigenvalue: Complex64) -> Result<Vec<EigenFunction>> {
    let structured = validate_structure(matrix, TRIANGULAR_TOL).pass;
    let not_found = || SpectreError::NoSuchEigenvalue {
        re: eigenvalue.re,
        im: eigenvalue.im,
        tol: EIGENVALUE_MATCH_TOL,
    };
    let mut out = Vec::new();
    if structured {
        for n in matrix.indices() {
            let d = matrix.get(n, n);
            if (d - eigenvalue).norm() <= EIGENVALUE_MATCH_TOL {
                let coeffs = match triangular_eigenvector(matrix, n) {
                    Some(v) => v,
                    None => inverse_iteration(matrix, d)?,
                };
                out.push(finish(matrix, coeffs, d, n)?);
            }
        }
    } else {
        let ev = matrix.as_matrix().eigenvalues()?;
        let best = ev
            .iter()
            .copied()
            .min_by(|a, b| (a - eigenvalue).norm().total_cmp(&(b - eigenvalue).norm()))
            .filter(|e| (e - eigenvalue).norm() <= EIGENVALUE_MATCH_TOL)
            .ok_or_else(not_found)?;
        let coeffs = inverse_iteration(matrix, best)?;
        let index = dominant_index(matrix, &coeffs);
        out.push(finish(matrix, coeffs, best, index)?);
    }
    if out.is_empty() {
        return Err(not_found());
    }
    Ok(out)
}

fn dominant_index(matrix: &TransferMatrix, v: &[Complex64]) -> i64 {
    let (k, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("nonempty vector");
    k as i64 - matrix.order() as i64
}

/// Substitution within the diagonal block containing index `k`: the block of
/// positive indices is upper triangular (back substitution from `k` toward 1),
/// the block of negative indices lower triangular (forward substitution from
/// `k` toward −1), and index 0 is decoupled from both. Returns `None` when a
/// repeated diagonal value makes the substitution singular.
fn triangular_eigenvector(matrix: &TransferMatrix, k: i64) -> Option<Vec<Complex64>> {
    let mu = matrix.get(k, k);
    let mut v = vec![Complex64::new(0.0, 0.0); matrix.dim()];
    v[matrix.position(k)] = Complex64::new(1.0, 0.0);
    let floor = 1e-13 * matrix.as_matrix().norm().max(1.0);

    let rows: Vec<i64> = if k > 0 {
        (1..k).rev().collect()
    } else {
        (k + 1..0).collect()
    };
    for j in rows {
        let cols = if k > 0 { j + 1..k + 1 } else { k..j };
        let s: Complex64 = cols.map(|m| matrix.get(j, m) * v[matrix.position(m)]).sum();
        let piv = matrix.get(j, j) - mu;
        if piv.norm() < floor {
            if s.norm() < floor {
                continue;
            }
            return None;
        }
        v[matrix.position(j)] = -s / piv;
    }
    Some(v)
}

fn inverse_iteration(matrix: &TransferMatrix, mu: Complex64) -> Result<Vec<Complex64>> {
    let n = matrix.dim();
    let a = matrix.as_matrix();
    let shift = mu + Complex64::new(1e-12 * (1.0 + mu.norm()), 0.0);
    let shifted = CMatrix::from_fn(n, |i, j| if i == j { a[(i, j)] - shift } else { a[(i, j)] });
    let lu = Lu::new(shifted, 1e-300);
    let mut v = vec![Complex64::new(1.0, 0.0); n];
    for _ in 0..4 {
        v = lu.solve(&v);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(SpectreError::EigenSolverFailed("inverse iteration broke down".into()));
        }
        for z in &mut v {
            *z /= norm;
        }
    }
    Ok(v)
}

/// Normalizes to unit length with the largest coefficient real positive and
/// evaluates the branch-sum residual.
fn finish(matrix: &TransferMatrix, mut v: Vec<Complex64>, mu: Complex64, index: i64) -> Result<EigenFunction> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let big = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("nonempty vector");
    let phase = big / big.norm();
    for z in &mut v {
        *z /= phase * norm;
    }
    let mut ef = EigenFunction {
        coeffs: v,
        eigenvalue: mu,
        index,
        residual: 0.0,
    };
    ef.residual = eigen_residual(matrix.param(), &ef)?;
    Ok(ef)
}

/// `sup_w |(L u)(w) − μ u(w)|` over equispaced circle points.
pub fn eigen_residual(param: &BlaschkeParam, ef: &EigenFunction) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for j in 0..RESIDUAL_SAMPLES {
        let w = Complex64::from_polar(1.0, TAU * j as f64 / RESIDUAL_SAMPLES as f64);
        let lu = branch_sum_arc(param, w, |z| ef.eval(z))?;
        worst = worst.max((lu - ef.eigenvalue * ef.eval(w)).norm());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub order: usize,
    #[serde(with = "crate::cjson::vec")]
    pub top: Vec<Complex64>,
    /// Bottleneck distance to the previous row's list; absent on the first row.
    pub change: Option<f64>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub tol: f64,
    pub pass: bool,
}

/// Leading `2·min(N_list)+1` eigenvalues for each window and their drift
/// between consecutive windows.
pub fn convergence_study(
    param: &BlaschkeParam,
    orders: &[usize],
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<ConvergenceTable> {
    if orders.is_empty() {
        return Err(SpectreError::InvalidArgument("empty window list".into()));
    }
    if orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectreError::InvalidArgument("window list must increase".into()));
    }
    let k = 2 * orders[0] + 1;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &order in orders {
        let start = Instant::now();
        let m = assemble(param, order, AssemblyMethod::Quadrature, spec)?;
        let mut ev = eigenvalues_triangular(&m)?;
        ev.sort_by(modulus_then_phase);
        ev.truncate(k);
        let change = rows.last().map(|prev| bottleneck_pairing(&prev.top, &ev).0);
        rows.push(ConvergenceRow {
            order,
            top: ev,
            change,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    let pass = rows.iter().filter_map(|r| r.change).all(|c| c <= tol);
    Ok(ConvergenceTable { rows, tol, pass })
}
