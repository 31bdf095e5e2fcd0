//! Checks of the explicit real-λ construction: the branch identities
//! `Φ₁ + Φ₂ = x` and `sin πΦ₁ + sin πΦ₂ = λ sin πx`, the closed-form branch
//! `Φ(x) = x/2 − arccos(λ cos(πx/2))/π` as inverse of the lift `F`, and
//! `u(x) = cos πx` as an eigenfunction of `L_I` with eigenvalue `λ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::blaschke::{lift_F, BlaschkeParam};
use crate::error::{Result, SpectreError};
use crate::interval::{chebyshev_lobatto, interval_branch, IntervalMapContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `Φ₁(x) + Φ₂(x) = x`.
    BranchSum,
    /// `Φ₁′(x) + Φ₂′(x) = 1`.
    BranchDerivativeSum,
    /// `sin πΦ₁(x) + sin πΦ₂(x) = λ sin πx`.
    Sine,
    /// `F(Φ(x)) = x`.
    LiftInverse,
    /// `Σ_k Φ_k′(x) cos πΦ_k(x) = λ cos πx`.
    DesignedEigenfunction,
}

impl Equation {
    pub fn tolerance(self) -> f64 {
        match self {
            Equation::BranchSum => 1e-11,
            Equation::BranchDerivativeSum => 1e-10,
            Equation::Sine => 1e-10,
            Equation::LiftInverse => 1e-10,
            Equation::DesignedEigenfunction => 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalEquationReport {
    pub equation: Equation,
    pub lambda: f64,
    pub grid: Vec<f64>,
    pub max_residual: f64,
    pub tol: f64,
    /// Only meaningful for the lift inverse: `Φ` increases along the grid.
    pub monotone: bool,
    pub pass: bool,
}

/// Closed-form first branch for real λ.
pub fn phi_closed_form(lambda: f64, x: f64) -> f64 {
    x / 2.0 - (lambda * (PI * x / 2.0).cos()).acos() / PI
}

fn context(lambda: f64) -> Result<IntervalMapContext> {
    Ok(IntervalMapContext::new(&BlaschkeParam::real(lambda)?))
}

fn check_grid(grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(SpectreError::InvalidArgument(format!(
            "grid needs at least 2 points, got {grid_size}"
        )));
    }
    let mut grid = chebyshev_lobatto(grid_size);
    grid.reverse();
    Ok(grid)
}

fn report(
    equation: Equation,
    lambda: f64,
    grid: Vec<f64>,
    residuals: impl Iterator<Item = Result<f64>>,
    monotone: bool,
) -> Result<FunctionalEquationReport> {
    let mut max_residual: f64 = 0.0;
    for r in residuals {
        max_residual = max_residual.max(r?);
    }
    let tol = equation.tolerance();
    Ok(FunctionalEquationReport {
        equation,
        lambda,
        grid,
        max_residual,
        tol,
        monotone,
        pass: max_residual < tol && monotone,
    })
}

fn branch_pair(ctx: &IntervalMapContext, x: f64) -> Result<[(f64, f64); 2]> {
    Ok([interval_branch(ctx, 1, x)?, interval_branch(ctx, 2, x)?])
}

pub fn verify_sum_identity(lambda: f64, grid_size: usize) -> Result<FunctionalEquationReport> {
    let ctx = context(lambda)?;
    let grid = check_grid(grid_size)?;
    let residuals: Vec<_> = grid
        .iter()
        .map(|&x| {
            let [(a, _), (b, _)] = branch_pair(&ctx, x)?;
            Ok((a + b - x).abs())
        })
        .collect();
    report(Equation::BranchSum, lambda, grid, residuals.into_iter(), true)
}

pub fn verify_derivative_sum(lambda: f64, grid_size: usize) -> Result<FunctionalEquationReport> {
    let ctx = context(lambda)?;
    let grid = check_grid(grid_size)?;
    let residuals: Vec<_> = grid
        .iter()
        .map(|&x| {
            let [(_, a), (_, b)] = branch_pair(&ctx, x)?;
            Ok((a + b - 1.0).abs())
        })
        .collect();
    report(Equation::BranchDerivativeSum, lambda, grid, residuals.into_iter(), true)
}

pub fn verify_sine_identity(lambda: f64, grid_size: usize) -> Result<FunctionalEquationReport> {
    let ctx = context(lambda)?;
    let grid = check_grid(grid_size)?;
    let residuals: Vec<_> = grid
        .iter()
        .map(|&x| {
            let [(a, _), (b, _)] = branch_pair(&ctx, x)?;
            Ok(((PI * a).sin() + (PI * b).sin() - lambda * (PI * x).sin()).abs())
        })
        .collect();
    report(Equation::Sine, lambda, grid, residuals.into_iter(), true)
}

pub fn verify_lift_inverse(lambda: f64, grid_size: usize) -> Result<FunctionalEquationReport> {
    let param = BlaschkeParam::real(lambda)?;
    let grid = check_grid(grid_size)?;
    let values: Vec<f64> = grid.iter().map(|&x| phi_closed_form(lambda, x)).collect();
    let monotone = values.windows(2).all(|w| w[1] > w[0]);
    let residuals: Vec<_> = grid
        .iter()
        .zip(&values)
        .map(|(&x, &y)| Ok((lift_F(&param, y) - x).abs()))
        .collect();
    report(Equation::LiftInverse, lambda, grid, residuals.into_iter(), monotone)
}

pub fn verify_designed_eigenfunction(lambda: f64, grid_size: usize) -> Result<FunctionalEquationReport> {
    let ctx = context(lambda)?;
    let grid = check_grid(grid_size)?;
    let residuals: Vec<_> = grid
        .iter()
        .map(|&x| {
            let image: f64 = branch_pair(&ctx, x)?
                .iter()
                .map(|(y, d)| d * (PI * y).cos())
                .sum();
            Ok((image - lambda * (PI * x).cos()).abs())
        })
        .collect();
    report(Equation::DesignedEigenfunction, lambda, grid, residuals.into_iter(), true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseProblemSuite {
    pub lambda: f64,
    pub reports: Vec<FunctionalEquationReport>,
    pub pass: bool,
}

/// Grid size used by the suite.
pub const SUITE_GRID: usize = 257;

pub fn verify_all(lambda: f64, grid_size: usize) -> Result<InverseProblemSuite> {
    let reports = vec![
        verify_sum_identity(lambda, grid_size)?,
        verify_derivative_sum(lambda, grid_size)?,
        verify_sine_identity(lambda, grid_size)?,
        verify_lift_inverse(lambda, grid_size)?,
        verify_designed_eigenfunction(lambda, grid_size)?,
    ];
    let pass = reports.iter().all(|r| r.pass);
    Ok(InverseProblemSuite {
        lambda,
        reports,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAMBDAS: [f64; 7] = [-0.9, -0.7, -0.3, 0.0, 0.4, 0.7, 0.9];

    #[test]
    fn doubling_map_is_exact() {
        for r in verify_all(0.0, 65).unwrap().reports {
            assert!(r.max_residual < 1e-14, "{:?} {:e}", r.equation, r.max_residual);
        }
    }

    #[test]
    fn suite_passes_on_the_real_grid() {
        for lam in LAMBDAS {
            let s = verify_all(lam, SUITE_GRID).unwrap();
            for r in &s.reports {
                assert!(r.pass, "λ={lam} {:?} {:e}", r.equation, r.max_residual);
                assert_eq!(r.grid.len(), SUITE_GRID);
            }
            assert!(s.pass);
        }
    }

    #[test]
    fn grid_is_chebyshev_and_ordered() {
        let g = check_grid(5).unwrap();
        let expect = [-1.0, -(0.5_f64).sqrt(), 0.0, 0.5_f64.sqrt(), 1.0];
        for (a, b) in g.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(check_grid(1).is_err());
    }

    #[test]
    fn endpoints_of_the_sine_identity_vanish() {
        for lam in LAMBDAS {
            let ctx = context(lam).unwrap();
            for x in [-1.0, 1.0] {
                let [(a, _), (b, _)] = branch_pair(&ctx, x).unwrap();
                assert!(((PI * a).sin() + (PI * b).sin()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn closed_form_branch_agrees_with_the_interval_branch() {
        for lam in LAMBDAS {
            let ctx = context(lam).unwrap();
            for x in check_grid(65).unwrap() {
                let (v, _) = interval_branch(&ctx, 1, x).unwrap();
                assert!((v - phi_closed_form(lam, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complex_or_out_of_range_lambda_is_rejected() {
        assert!(verify_sum_identity(1.0, 9).is_err());
        assert!(verify_lift_inverse(-1.2, 9).is_err());
        assert!(verify_all(f64::NAN, 9).is_err());
    }

    #[test]
    fn a_wrong_eigenvalue_fails() {
        // cos πx is an eigenfunction for λ, not for any other value
        let ctx = context(0.4).unwrap();
        let grid = check_grid(33).unwrap();
        let worst = grid
            .iter()
            .map(|&x| {
                let image: f64 = branch_pair(&ctx, x).unwrap().iter().map(|(y, d)| d * (PI * y).cos()).sum();
                (image - 0.5 * (PI * x).cos()).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-2);
    }
}
