//! The degree-two circle maps `τ(z) = z(λ − z)/(1 − λ̄z)`, their inverse
//! branches, lifts, expansivity and invariant annuli, plus the branch sums
//! that define the transfer operator pointwise.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Result, SpectreError};
use crate::scalar::{cis, Real};

/// Smallest admissible `|1 − λ̄z|`.
pub const POLE_TOL: f64 = 1e-14;
/// Roots closer than this are reported as degenerate.
pub const BRANCH_SEPARATION_TOL: f64 = 1e-12;

/// The complex parameter `λ` with `|λ| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeParam {
    #[serde(with = "crate::cjson")]
    lambda: Complex64,
    modulus: f64,
    phase: f64,
}

impl BlaschkeParam {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(SpectreError::NonFiniteParameter(format!("λ = {lambda}")));
        }
        let modulus = lambda.norm();
        if modulus >= 1.0 {
            return Err(SpectreError::ParameterOutOfRange { modulus });
        }
        Ok(Self {
            lambda,
            modulus,
            phase: lambda.arg(),
        })
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(Complex64::new(re, 0.0))
    }

    /// `λ = modulus · e^{i·phase}`.
    pub fn from_polar(modulus: f64, phase: f64) -> Result<Self> {
        if !modulus.is_finite() || !phase.is_finite() {
            return Err(SpectreError::NonFiniteParameter(format!(
                "modulus {modulus}, phase {phase}"
            )));
        }
        if modulus < 0.0 {
            return Err(SpectreError::InvalidArgument(format!(
                "negative modulus {modulus}"
            )));
        }
        if modulus >= 1.0 {
            return Err(SpectreError::ParameterOutOfRange { modulus });
        }
        let lambda = Complex64::from_polar(modulus, phase);
        Ok(Self {
            lambda,
            modulus,
            phase: lambda.arg(),
        })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    /// `arg λ` in `(−π, π]`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn is_real(&self) -> bool {
        self.lambda.im == 0.0
    }
}

/// The two preimages of a point, ordered so that `z1` lies on the arc running
/// counterclockwise from the fixed point to `1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchPair {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl BranchPair {
    pub fn get(&self, k: usize) -> Complex64 {
        match k {
            1 => self.z1,
            2 => self.z2,
            _ => panic!("branch label must be 1 or 2, got {k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusBounds {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

fn pole_check(param: &BlaschkeParam, z: Complex64) -> Result<Complex64> {
    let d = Complex64::new(1.0, 0.0) - param.lambda.conj() * z;
    let distance = d.norm();
    if !(distance > POLE_TOL) {
        return Err(SpectreError::PoleProximity { distance });
    }
    Ok(d)
}

pub fn tau_eval(param: &BlaschkeParam, z: Complex64) -> Result<Complex64> {
    let d = pole_check(param, z)?;
    Ok(z * (param.lambda - z) / d)
}

pub fn tau_deriv(param: &BlaschkeParam, z: Complex64) -> Result<Complex64> {
    let d = pole_check(param, z)?;
    let lam = param.lambda;
    let lc = lam.conj();
    Ok(((lam - 2.0 * z) * d + lc * z * (lam - z)) / (d * d))
}

/// `z τ′(z)/τ(z)`, real and equal to `|τ′(z)|` on the unit circle.
pub fn log_derivative(param: &BlaschkeParam, z: Complex64) -> Complex64 {
    let lam = param.lambda;
    1.0 + z / (z - lam) + lam.conj() * z / (1.0 - lam.conj() * z)
}

/// `z₀ = (λ − 1)/(1 − λ̄)`, the unique fixed point of `τ` on the circle.
pub fn fixed_point(param: &BlaschkeParam) -> Complex64 {
    let lam = param.lambda;
    (lam - 1.0) / (1.0 - lam.conj())
}

pub fn inverse_branches(param: &BlaschkeParam, w: Complex64) -> Result<BranchPair> {
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(SpectreError::NonFiniteParameter(format!("w = {w}")));
    }
    let lam = param.lambda;
    // z² − b z + w = 0
    let b = lam + lam.conj() * w;
    let disc = (b * b - 4.0 * w).sqrt();
    let (p, q) = (b + disc, b - disc);
    let big = if p.norm() >= q.norm() { p } else { q } * 0.5;
    if big.norm() == 0.0 {
        return Err(SpectreError::DegenerateBranches { separation: 0.0 });
    }
    let small = w / big;
    let separation = (big - small).norm();
    if separation < BRANCH_SEPARATION_TOL {
        return Err(SpectreError::DegenerateBranches { separation });
    }

    let theta0 = fixed_point(param).arg();
    let offset = |z: Complex64| (z.arg() - theta0).rem_euclid(TAU);
    let turn = (-theta0).rem_euclid(TAU);
    let (ob, os) = (offset(big), offset(small));
    let big_first = match (ob < turn, os < turn) {
        (true, false) => true,
        (false, true) => false,
        // rounding at the arc ends: the smaller offset is nearer the start
        _ => ob <= os,
    };
    Ok(if big_first {
        BranchPair { z1: big, z2: small }
    } else {
        BranchPair { z1: small, z2: big }
    })
}

/// Minimum of `|τ′|` over `n_samples` equispaced circle points.
pub fn expansivity_margin(param: &BlaschkeParam, n_samples: usize) -> Result<f64> {
    if n_samples < 256 {
        return Err(SpectreError::InvalidArgument(format!(
            "expansivity sampling needs at least 256 points, got {n_samples}"
        )));
    }
    let mut min = f64::INFINITY;
    for j in 0..n_samples {
        let z = Complex64::from_polar(1.0, TAU * j as f64 / n_samples as f64);
        min = min.min(tau_deriv(param, z)?.norm());
    }
    Ok(min)
}

/// Sampling density and safety margin for annulus certificates.
pub const ANNULUS_SAMPLES: usize = 4096;
pub const ANNULUS_MARGIN: f64 = 1e-6;

/// Checks `sup_{|z|=r} |τ| < r` and `inf_{|z|=R} |τ| > R` on `n_samples` and
/// `2·n_samples` equispaced points, each with the safety margin.
pub fn certify_annulus(param: &BlaschkeParam, r: f64, big_r: f64, n_samples: usize) -> bool {
    if !(0.0 < r && r < 1.0 && 1.0 < big_r) {
        return false;
    }
    if r <= param.modulus || big_r * param.modulus >= 1.0 {
        return false;
    }
    [n_samples, 2 * n_samples].iter().all(|&n| {
        let mut sup_inner: f64 = 0.0;
        let mut inf_outer = f64::INFINITY;
        for j in 0..n {
            let u = Complex64::from_polar(1.0, TAU * j as f64 / n as f64);
            match (tau_eval(param, r * u), tau_eval(param, big_r * u)) {
                (Ok(a), Ok(b)) => {
                    sup_inner = sup_inner.max(a.norm());
                    inf_outer = inf_outer.min(b.norm());
                }
                _ => return false,
            }
        }
        sup_inner + ANNULUS_MARGIN < r && inf_outer - ANNULUS_MARGIN > big_r
    })
}

/// Scans `r = 0.99, 0.98, …, 0.50` with `R = 2 − r` and returns the widest
/// annulus of the unbroken certified run that starts nearest the circle.
pub fn find_annulus(param: &BlaschkeParam) -> Result<AnnulusBounds> {
    check_orientation(param)?;
    let mut best = None;
    for k in (50..=99).rev() {
        let r = k as f64 / 100.0;
        let big_r = 2.0 - r;
        if certify_annulus(param, r, big_r, ANNULUS_SAMPLES) {
            best = Some(AnnulusBounds { r, big_r });
        } else if best.is_some() {
            break;
        }
    }
    best.ok_or(SpectreError::AnnulusSearchFailed {
        modulus: param.modulus,
    })
}

/// The certificate search assumes `zτ′/τ > 0` on the circle.
fn check_orientation(param: &BlaschkeParam) -> Result<()> {
    let n = 1024;
    for j in 0..n {
        let z = Complex64::from_polar(1.0, TAU * j as f64 / n as f64);
        let g = log_derivative(param, z);
        if !(g.re > 0.0) || g.im.abs() > 1e-8 * g.re.max(1.0) {
            return Err(SpectreError::OrientationReversing);
        }
    }
    Ok(())
}

/// The real lift `F` with `e^{iπF(x)} = τ(e^{iπx})`.
#[allow(non_snake_case)]
pub fn lift_F(param: &BlaschkeParam, x: f64) -> f64 {
    let a = param.modulus;
    let s = PI * x - param.phase;
    2.0 * x + 1.0 + (2.0 / PI) * (a * s.sin() / (1.0 - a * s.cos())).atan()
}

/// Circle lift `ψ` with `τ(e^{iθ}) = e^{iψ(θ)}` and `ψ(θ + 2π) = ψ(θ) + 4π`.
pub fn circle_lift<T: Real>(lambda: Complex<T>, theta: T) -> T {
    // 1 − λ e^{−iθ} has positive real part, so its principal argument is continuous
    let e = cis(-theta);
    let w = Complex::new(T::one(), T::zero()) - lambda * e;
    theta + theta + T::pi() + T::from_f64(2.0) * w.im.atan2(w.re)
}

/// `ψ′(θ) = |τ′(e^{iθ})|`.
pub fn circle_lift_deriv<T: Real>(lambda: Complex<T>, theta: T) -> T {
    let z = cis(theta);
    let one = Complex::new(T::one(), T::zero());
    let lc = lambda.conj();
    let g = one + z / (z - lambda) + lc * z / (one - lc * z);
    g.re
}

/// Holomorphic branch sum `Σ_k u(φ_k(w))/τ′(φ_k(w))`.
pub fn branch_sum(
    param: &BlaschkeParam,
    w: Complex64,
    u: impl Fn(Complex64) -> Complex64,
) -> Result<Complex64> {
    let b = inverse_branches(param, w)?;
    let mut s = Complex64::new(0.0, 0.0);
    for z in [b.z1, b.z2] {
        s += u(z) / tau_deriv(param, z)?;
    }
    Ok(s)
}

/// Branch sum with arc-length weights, `Σ_k w·u(φ_k)/(φ_k τ′(φ_k))`; on the
/// circle the weights are `1/|τ′(φ_k)|`. Its Fourier matrix in the basis
/// `zˡ` is the one assembled in [`crate::fourier`].
pub fn branch_sum_arc(
    param: &BlaschkeParam,
    w: Complex64,
    u: impl Fn(Complex64) -> Complex64,
) -> Result<Complex64> {
    let b = inverse_branches(param, w)?;
    let mut s = Complex64::new(0.0, 0.0);
    for z in [b.z1, b.z2] {
        s += w * u(z) / (z * tau_deriv(param, z)?);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fig2_param() -> BlaschkeParam {
        BlaschkeParam::from_re_im(-0.3, -(0.4f64).sqrt()).unwrap()
    }

    fn mayer_param() -> BlaschkeParam {
        BlaschkeParam::from_re_im(0.1, (0.15f64).sqrt()).unwrap()
    }

    #[test]
    fn construction_rejects_the_closed_disc_complement() {
        assert!(matches!(
            BlaschkeParam::real(1.0),
            Err(SpectreError::ParameterOutOfRange { .. })
        ));
        assert!(BlaschkeParam::from_re_im(0.8, 0.6).is_err());
        assert!(BlaschkeParam::from_polar(1.0, 0.3).is_err());
        assert!(BlaschkeParam::from_re_im(f64::NAN, 0.0).is_err());
        let p = BlaschkeParam::from_polar(0.7, -2.0137).unwrap();
        assert!((p.modulus() - p.lambda().norm()).abs() < 1e-14);
        assert!((p.phase() - p.lambda().arg()).abs() < 1e-14);
        assert!((p.lambda() - fig2_param().lambda()).norm() < 1e-4);
    }

    #[test]
    fn tau_examples() {
        let p0 = BlaschkeParam::real(0.0).unwrap();
        assert!((tau_eval(&p0, c(0.0, 1.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let p4 = BlaschkeParam::real(0.4).unwrap();
        assert!((tau_eval(&p4, c(-1.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        let p5 = BlaschkeParam::real(0.5).unwrap();
        assert!((tau_eval(&p5, c(1.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tau_rejects_the_pole() {
        let p = BlaschkeParam::real(0.5).unwrap();
        assert!(matches!(
            tau_eval(&p, c(2.0, 0.0)),
            Err(SpectreError::PoleProximity { .. })
        ));
        assert!(tau_deriv(&p, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn derivative_examples() {
        let p0 = BlaschkeParam::real(0.0).unwrap();
        for j in 0..16 {
            let z = Complex64::from_polar(1.0, 0.4 * j as f64);
            assert!((tau_deriv(&p0, z).unwrap() + 2.0 * z).norm() < 1e-15);
        }
        let p4 = BlaschkeParam::real(0.4).unwrap();
        let d = tau_deriv(&p4, c(-1.0, 0.0)).unwrap();
        assert!((d - c(10.0 / 7.0, 0.0)).norm() < 1e-14);
        let pm = mayer_param();
        let z0 = fixed_point(&pm);
        let d = tau_deriv(&pm, z0).unwrap();
        assert!((d - c(15.0 / 7.0, 0.0)).norm() < 1e-13, "{d}");
        let h = 1e-5;
        let fd = (tau_eval(&pm, z0 + h).unwrap() - tau_eval(&pm, z0 - h).unwrap()) / (2.0 * h);
        assert!((fd - d).norm() < 1e-8);
    }

    #[test]
    fn derivative_matches_finite_differences_on_the_annulus() {
        let h = 1e-5;
        for p in [BlaschkeParam::real(0.4).unwrap(), fig2_param(), mayer_param()] {
            let a = find_annulus(&p).unwrap();
            for &rad in &[a.r, 1.0, a.big_r] {
                for j in 0..64 {
                    let z = Complex64::from_polar(rad, TAU * j as f64 / 64.0);
                    let fd = (tau_eval(&p, z + h).unwrap() - tau_eval(&p, z - h).unwrap()) / (2.0 * h);
                    let d = tau_deriv(&p, z).unwrap();
                    assert!((fd - d).norm() / d.norm() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn branch_examples() {
        let p0 = BlaschkeParam::real(0.0).unwrap();
        let b = inverse_branches(&p0, c(1.0, 0.0)).unwrap();
        let mut roots = [b.z1, b.z2];
        roots.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((roots[0] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((roots[1] - c(0.0, 1.0)).norm() < 1e-15);

        let p4 = BlaschkeParam::real(0.4).unwrap();
        let b = inverse_branches(&p4, c(-1.0, 0.0)).unwrap();
        // the fixed point −1 is on branch 1, the turning point 1 on branch 2
        assert!((b.z1 - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((b.z2 - c(1.0, 0.0)).norm() < 1e-15);
        for z in [b.z1, b.z2] {
            assert!((tau_eval(&p4, z).unwrap() + 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn branch_of_fixed_point_is_the_fixed_point() {
        for p in [BlaschkeParam::real(-0.7).unwrap(), fig2_param(), mayer_param()] {
            let z0 = fixed_point(&p);
            let b = inverse_branches(&p, z0).unwrap();
            assert!((b.z1 - z0).norm() < 1e-12);
            assert!((b.z2 - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_branches_are_reported() {
        // the roots coincide at the critical value w = τ(c) for the critical point c
        let p = BlaschkeParam::real(0.5).unwrap();
        // critical points solve λ̄z² − 2z + λ = 0
        let crit = (1.0 - (1.0f64 - 0.25).sqrt()) / 0.5;
        let w = tau_eval(&p, c(crit, 0.0)).unwrap();
        assert!(matches!(
            inverse_branches(&p, w),
            Err(SpectreError::DegenerateBranches { .. })
        ));
    }

    #[test]
    fn fixed_point_examples() {
        assert!((fixed_point(&BlaschkeParam::real(0.3).unwrap()) + 1.0).norm() < 1e-15);
        assert!((fixed_point(&BlaschkeParam::real(0.0).unwrap()) + 1.0).norm() < 1e-15);
        let p = BlaschkeParam::from_re_im(0.0, 0.5).unwrap();
        let z0 = fixed_point(&p);
        assert!((z0 - c(-0.6, 0.8)).norm() < 1e-15);
        assert!((tau_eval(&p, z0).unwrap() - z0).norm() < 1e-13);
    }

    #[test]
    fn expansivity_examples() {
        let p0 = BlaschkeParam::real(0.0).unwrap();
        assert!((expansivity_margin(&p0, 256).unwrap() - 2.0).abs() < 1e-15);
        let p4 = BlaschkeParam::real(0.4).unwrap();
        let e1 = expansivity_margin(&p4, 4096).unwrap();
        let e2 = expansivity_margin(&p4, 8192).unwrap();
        assert!(e1 > 1.0 && e1 <= 2.0);
        assert!((e1 - e2).abs() < 1e-10);
        // for real λ > 0, |τ′| = 1 + (1 − λ²)/|z − λ|² is smallest at z = −1, a sample point
        assert!((e1 - (1.0 + 0.6 / 1.4)).abs() < 1e-12);
        assert!(expansivity_margin(&fig2_param(), 4096).unwrap() > 1.0);
        assert!(expansivity_margin(&p4, 100).is_err());
    }

    #[test]
    fn expansivity_over_a_parameter_grid() {
        for &m in &[0.0, 0.2, 0.4, 0.6, 0.8] {
            for k in 0..8 {
                let p = BlaschkeParam::from_polar(m, TAU * k as f64 / 8.0).unwrap();
                assert!(expansivity_margin(&p, 1024).unwrap() > 1.0);
            }
        }
    }

    #[test]
    fn annulus_examples() {
        let p0 = BlaschkeParam::real(0.0).unwrap();
        assert!(certify_annulus(&p0, 0.9, 1.1, ANNULUS_SAMPLES));
        let a0 = find_annulus(&p0).unwrap();
        assert!(a0.r < 1.0 && a0.big_r > 1.0);

        let a4 = find_annulus(&BlaschkeParam::real(0.4).unwrap()).unwrap();
        assert!(a4.r <= 0.95 && a4.big_r >= 1.05, "{a4:?}");

        let a8 = find_annulus(&BlaschkeParam::real(0.8).unwrap()).unwrap();
        assert!(a8.r > a4.r && a8.big_r < a4.big_r, "{a8:?}");
        // regression fixtures, cross-checked with an independent numpy scan
        assert_eq!((a4.r, a4.big_r), (0.5, 1.5));
        assert_eq!((a8.r, a8.big_r), (0.81, 1.19));

        for a in [a0, a4, a8] {
            assert!(0.0 < a.r && a.r < 1.0 && 1.0 < a.big_r);
        }
    }

    #[test]
    fn annulus_search_fails_near_the_boundary() {
        let p = BlaschkeParam::real(0.999).unwrap();
        assert!(matches!(
            find_annulus(&p),
            Err(SpectreError::AnnulusSearchFailed { .. })
        ));
    }

    #[test]
    fn lift_examples() {
        let p0 = BlaschkeParam::real(0.0).unwrap();
        for &x in &[-3.2, -1.0, 0.0, 0.37, 5.5] {
            assert_eq!(lift_F(&p0, x), 2.0 * x + 1.0);
        }
        let p4 = BlaschkeParam::real(0.4).unwrap();
        assert!((lift_F(&p4, -1.0) + 1.0).abs() < 1e-15);
        let v = lift_F(&p4, 0.3);
        let lhs = Complex64::from_polar(1.0, PI * v);
        let rhs = tau_eval(&p4, Complex64::from_polar(1.0, 0.3 * PI)).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn lift_is_monotone_for_real_parameters() {
        for &lam in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
            let p = BlaschkeParam::real(lam).unwrap();
            let h = 1e-6;
            for j in 0..=400 {
                let x = -1.0 + j as f64 / 200.0;
                let d = (lift_F(&p, x + h) - lift_F(&p, x - h)) / (2.0 * h);
                assert!(d > 1.0, "λ = {lam}, x = {x}, F′ = {d}");
            }
        }
    }

    #[test]
    fn circle_lift_agrees_with_the_real_lift() {
        for p in [BlaschkeParam::real(0.4).unwrap(), fig2_param(), mayer_param()] {
            for j in 0..50 {
                let x = -2.0 + 0.08 * j as f64;
                let a = circle_lift(p.lambda(), PI * x) / PI;
                assert!((a - lift_F(&p, x)).abs() < 1e-13);
                let d = circle_lift_deriv(p.lambda(), PI * x);
                let z = Complex64::from_polar(1.0, PI * x);
                assert!((d - tau_deriv(&p, z).unwrap().norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn covering_property() {
        // branch images of an equispaced grid interleave: branch 1 covers
        // the arc from z₀ to 1, branch 2 the complementary arc
        for p in [BlaschkeParam::real(0.4).unwrap(), fig2_param(), mayer_param()] {
            let theta0 = fixed_point(&p).arg();
            let turn = (-theta0).rem_euclid(TAU);
            let n = 2048;
            let mut off1 = Vec::new();
            let mut off2 = Vec::new();
            for j in 0..n {
                let w = Complex64::from_polar(1.0, TAU * (j as f64 + 0.5) / n as f64);
                let b = inverse_branches(&p, w).unwrap();
                off1.push((b.z1.arg() - theta0).rem_euclid(TAU));
                off2.push((b.z2.arg() - theta0).rem_euclid(TAU));
            }
            assert!(off1.iter().all(|&o| o < turn));
            assert!(off2.iter().all(|&o| o > turn));
            // largest gap between consecutive sampled points must be small
            let mut all: Vec<f64> = off1.iter().chain(&off2).copied().collect();
            all.sort_by(f64::total_cmp);
            let mut gap = all[0] + TAU - all[all.len() - 1];
            for w in all.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
            assert!(gap < 8.0 * TAU / n as f64, "gap {gap}");
        }
    }

    #[test]
    fn arc_weights_make_lebesgue_measure_invariant() {
        for p in [BlaschkeParam::real(0.4).unwrap(), fig2_param(), mayer_param()] {
            for j in 0..64 {
                let w = Complex64::from_polar(1.0, TAU * j as f64 / 64.0);
                let v = branch_sum_arc(&p, w, |_| c(1.0, 0.0)).unwrap();
                assert!((v - 1.0).norm() < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn circle_is_preserved(m in 0.0f64..0.99, a in -PI..PI, th in prop::collection::vec(0.0..TAU, 150)) {
            let p = BlaschkeParam::from_polar(m, a).unwrap();
            for t in th {
                let v = tau_eval(&p, Complex64::from_polar(1.0, t)).unwrap();
                prop_assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn branches_round_trip(m in 0.0f64..0.95, a in -PI..PI, th in prop::collection::vec(0.0..TAU, 16)) {
            let p = BlaschkeParam::from_polar(m, a).unwrap();
            for t in th {
                let w = Complex64::from_polar(1.0, t);
                let b = inverse_branches(&p, w).unwrap();
                prop_assert!((b.z1 * b.z2 - w).norm() < 1e-12);
                prop_assert!((b.z1 - b.z2).norm() > 1e-6);
                for z in [b.z1, b.z2] {
                    prop_assert!((tau_eval(&p, z).unwrap() - w).norm() < 1e-12);
                    prop_assert!((z.norm() - 1.0).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn lift_projects_and_is_equivariant(m in 0.0f64..0.95, a in -PI..PI, x in -5.0f64..5.0) {
            let p = BlaschkeParam::from_polar(m, a).unwrap();
            prop_assert!((lift_F(&p, x + 2.0) - lift_F(&p, x) - 4.0).abs() < 1e-12);
            let lhs = Complex64::from_polar(1.0, PI * lift_F(&p, x));
            let rhs = tau_eval(&p, Complex64::from_polar(1.0, PI * x)).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
