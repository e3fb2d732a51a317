//! Gauge transformations of the potentials and the Higgs matrix, and the
//! covariance report.

use serde::Serialize;

use crate::action::{covariant_matrices, field_strength, sectors, spectral_action_direct, ActionPolynomial};
use crate::clifford::CliffordModule;
use crate::dirac::GaugeTriple;
use crate::error::{Error, Result};
use crate::fluct::{assemble_fluctuated, Fluctuation, OneFormSpace};
use crate::linalg::{eye, haar_unitary, kron, max_abs, max_abs_diff, rel_scalar, zeros, CMat, C64};
use crate::seed;

#[derive(Clone, Debug)]
pub struct GaugeElement {
    /// Unitary in `M_N ⊗ M_n`.
    pub u: CMat,
    /// `(u₁, u₂)` with `u = u₁ ⊗ u₂` when drawn in product form.
    pub factors: Option<(CMat, CMat)>,
}

impl GaugeElement {
    pub fn identity(n_base: usize, n: usize) -> Self {
        GaugeElement { u: eye(n_base * n), factors: Some((eye(n_base), eye(n))) }
    }

    /// `λ·1` with `|λ| = 1`.
    pub fn central(n_base: usize, n: usize, phase: C64) -> Self {
        GaugeElement { u: eye(n_base * n) * phase, factors: None }
    }

    pub fn unitarity_defect(&self) -> f64 {
        max_abs_diff(&(self.u.adjoint() * &self.u), &eye(self.u.nrows()))
    }
}

pub fn random_unitary(n_base: usize, n: usize, product_form: bool, seed: u64) -> GaugeElement {
    let mut rng = seed::stream(seed, "unitary", (n_base * n) as u64);
    if product_form {
        let u1 = haar_unitary(&mut rng, n_base);
        let u2 = haar_unitary(&mut rng, n);
        GaugeElement { u: kron(&u1, &u2), factors: Some((u1, u2)) }
    } else {
        GaugeElement { u: haar_unitary(&mut rng, n_base * n), factors: None }
    }
}

/// `𝖠^u_μ = u𝖠_μu* + u[𝖫_μ, u*]` and `φ^u = uφu* + u[1⊗D_F, u*]`.
pub fn transform(gt: &GaugeTriple, fl: &Fluctuation, g: &GaugeElement) -> Result<Fluctuation> {
    let sig = gt.sig();
    if !sig.is_riemannian() {
        return Err(Error::NotRiemannian { p: sig.p, q: sig.q });
    }
    if !fl.is_flat() || !gt.fuzzy.is_flat() {
        return Err(Error::NotFlat);
    }
    let m = gt.m();
    if g.u.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!("gauge element must be {m}x{m}")));
    }
    let u = &g.u;
    let us = u.adjoint();
    let inhom = |k: &CMat| u * (k * &us - &us * k);
    let a = std::array::from_fn(|mu| {
        let l = gt.fuzzy.singles[mu].as_ref().map(|k| gt.lift(k)).unwrap_or_else(|| zeros(m));
        u * &fl.a[mu] * &us + inhom(&l)
    });
    let phi = u * &fl.phi * &us + inhom(&gt.lifted_d_f());
    Ok(Fluctuation { a, s: None, phi })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SectorChanges {
    pub s_ym: f64,
    pub s_h: f64,
    pub s_gh: f64,
    pub s_theta: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CovarianceReport {
    /// `max_{μ<ν} ‖𝖥_{μν}(A^u) − u𝖥_{μν}(A)u*‖`.
    pub field_strength: f64,
    /// Relative change of each sector.
    pub sectors: SectorChanges,
    /// Relative change of `¼ Tr f(D_ω)`.
    pub action: f64,
    /// Deviation of `𝖳^u = Ad_u(𝖳) + Ad_u([𝖫_μ,𝖫_ν]) − [𝖫_μ,𝖫_ν]`, `𝖳 = 𝖥 − [𝖫,𝖫]`.
    pub ts_identity: f64,
    /// Part of `φ^u` outside `M_N ⊗ Ω¹_{D_F}`.
    pub higgs_leakage: f64,
}

pub fn covariance_report(
    gt: &GaugeTriple,
    fl: &Fluctuation,
    g: &GaugeElement,
    module: &CliffordModule,
    f: &ActionPolynomial,
) -> Result<CovarianceReport> {
    let flu = transform(gt, fl, g)?;
    let u = &g.u;
    let us = u.adjoint();
    let ad = |x: &CMat| u * x * &us;
    let m = gt.m();

    let fm = field_strength(gt, fl)?.f_matrix.expect("riemannian");
    let fmu = field_strength(gt, &flu)?.f_matrix.expect("riemannian");
    let ls: Vec<CMat> = (0..4)
        .map(|mu| gt.fuzzy.singles[mu].as_ref().map(|k| gt.lift(k)).unwrap_or_else(|| zeros(m)))
        .collect();
    let mut rep = CovarianceReport::default();
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            rep.field_strength = rep.field_strength.max(max_abs(&(&fmu[mu][nu] - ad(&fm[mu][nu]))));
            let ll = &ls[mu] * &ls[nu] - &ls[nu] * &ls[mu];
            let t = &fm[mu][nu] - &ll;
            let tu = &fmu[mu][nu] - &ll;
            let expected = ad(&t) + ad(&ll) - &ll;
            rep.ts_identity = rep.ts_identity.max(max_abs(&(tu - expected)));
        }
    }

    let before = sectors(gt, fl, f)?;
    let after = sectors(gt, &flu, f)?;
    rep.sectors = SectorChanges {
        s_ym: rel_scalar(after.s_ym, before.s_ym),
        s_h: rel_scalar(after.s_h, before.s_h),
        s_gh: rel_scalar(after.s_gh, before.s_gh),
        s_theta: rel_scalar(after.s_theta, before.s_theta),
    };
    let d0 = spectral_action_direct(&assemble_fluctuated(gt, fl, module)?, f)?;
    let d1 = spectral_action_direct(&assemble_fluctuated(gt, &flu, module)?, f)?;
    rep.action = rel_scalar(d1, d0);
    if !gt.yang_mills() {
        let space = OneFormSpace::new(&gt.finite.d_f, 0);
        rep.higgs_leakage = space.leakage(&flu.phi);
    }
    Ok(rep)
}

/// `𝖣^u_μ = u𝖣_μu*`: the covariant matrices transform homogeneously.
pub fn covariant_matrix_defect(gt: &GaugeTriple, fl: &Fluctuation, g: &GaugeElement) -> Result<f64> {
    let flu = transform(gt, fl, g)?;
    let before = covariant_matrices(gt, fl);
    let after = covariant_matrices(gt, &flu);
    let u = &g.u;
    Ok((0..4).fold(0.0, |m, mu| m.max(max_abs(&(&after[mu] - u * &before[mu] * u.adjoint())))))
}
