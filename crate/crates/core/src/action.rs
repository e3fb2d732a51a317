//! Field strength, `ϑ`, the closed-form traces of `D²` and `D⁴`, the
//! spectral action sectors and the brute-force spectral action.

use serde::{Deserialize, Serialize};

use crate::clifford::CliffordModule;
use crate::dirac::{lichnerowicz_form, ChiralTerm, GaugeTriple};
use crate::error::{Error, Result};
use crate::fluct::{covariant_superops, higgs_field, Fluctuation};
use crate::linalg::{c, eye, kron, self_adjoint_defect, CMat};
use crate::superop::SuperOp;

/// `f(x) = ½ Σ_{i≥1} a_i xⁱ`; `coeffs[0]` is `a_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionPolynomial {
    pub coeffs: Vec<f64>,
}

impl ActionPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidConfig("action polynomial needs at least a_1".into()));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidConfig("action polynomial coefficients must be finite".into()));
        }
        Ok(ActionPolynomial { coeffs })
    }

    /// `a_i` (1-based), zero past the stored degree.
    pub fn a(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.coeffs.get(i - 1).copied().unwrap_or(0.0)
        }
    }

    /// Highest index with a nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&a| a != 0.0).map_or(0, |i| i + 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        let mut xp = 1.0;
        for a in &self.coeffs {
            xp *= x;
            acc += a * xp;
        }
        0.5 * acc
    }

    /// `exp(−Tr f(D))` is normalizable only for an even top degree with a
    /// positive top coefficient.
    pub fn check_integrable(&self) -> Result<()> {
        let deg = self.degree();
        if deg == 0 || deg % 2 == 1 || self.a(deg) <= 0.0 {
            return Err(Error::NonIntegrable(format!(
                "top coefficient a_{deg} = {} must be positive at even degree",
                self.a(deg)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FieldStrength {
    /// `𝓕_{μν} = [𝖽_μ, 𝖽_ν]_∘`.
    pub f_super: Vec<Vec<SuperOp>>,
    /// `𝖥_{μν} = [L_μ⊗1 + A_μ, L_ν⊗1 + A_ν]`, Riemannian signature only.
    pub f_matrix: Option<Vec<Vec<CMat>>>,
}

fn require_flat(gt: &GaugeTriple, fl: &Fluctuation) -> Result<()> {
    if gt.fuzzy.is_flat() && fl.is_flat() {
        Ok(())
    } else {
        Err(Error::NotFlat)
    }
}

fn require_riemannian(gt: &GaugeTriple) -> Result<()> {
    let s = gt.sig();
    if s.is_riemannian() {
        Ok(())
    } else {
        Err(Error::NotRiemannian { p: s.p, q: s.q })
    }
}

/// Gauge potential matrices `𝖣_μ = K_μ ⊗ 1_n + A_μ`.
pub fn covariant_matrices(gt: &GaugeTriple, fl: &Fluctuation) -> [CMat; 4] {
    std::array::from_fn(|mu| match &gt.fuzzy.singles[mu] {
        Some(k) => gt.lift(k) + &fl.a[mu],
        None => fl.a[mu].clone(),
    })
}

pub fn field_strength(gt: &GaugeTriple, fl: &Fluctuation) -> Result<FieldStrength> {
    let (d, _) = covariant_superops(gt, fl);
    let f_super = (0..4).map(|mu| (0..4).map(|nu| d[mu].commutator(&d[nu])).collect()).collect();
    let f_matrix = gt.sig().is_riemannian().then(|| {
        let dm = covariant_matrices(gt, fl);
        (0..4)
            .map(|mu| (0..4).map(|nu| &dm[mu] * &dm[nu] - &dm[nu] * &dm[mu]).collect())
            .collect()
    });
    Ok(FieldStrength { f_super, f_matrix })
}

/// `ϑ = Σ η^{μν} 𝖽_μ ∘ 𝖽_ν`.
pub fn theta(gt: &GaugeTriple, fl: &Fluctuation) -> Result<SuperOp> {
    require_flat(gt, fl)?;
    let (d, _) = covariant_superops(gt, fl);
    Ok(theta_of(gt, &d))
}

fn theta_of(gt: &GaugeTriple, d: &[SuperOp; 4]) -> SuperOp {
    let sig = gt.sig();
    let mut th = SuperOp::zero(gt.m());
    for mu in 0..4 {
        th = &th + &(&(&d[mu] * &d[mu]) * sig.e_f(mu));
    }
    th
}

/// Operators shared by the closed-form traces.
struct ClosedForms {
    eta: [f64; 4],
    d: [SuperOp; 4],
    theta: SuperOp,
    phi: SuperOp,
    phi2: SuperOp,
    higgs_on: bool,
}

impl ClosedForms {
    fn new(gt: &GaugeTriple, fl: &Fluctuation) -> Result<Self> {
        require_flat(gt, fl)?;
        let (d, _) = covariant_superops(gt, fl);
        let theta = theta_of(gt, &d);
        let phi = higgs_field(fl, gt).phi;
        let phi2 = &phi * &phi;
        let higgs_on = phi.rep.iter().any(|z| z.norm() != 0.0);
        let eta = std::array::from_fn(|mu| gt.sig().e_f(mu));
        Ok(ClosedForms { eta, d, theta, phi, phi2, higgs_on })
    }

    /// `Σ η^{μμ}η^{νν} Tr(𝓕_{μν}𝓕_{μν})`
    fn tr_ff(&self) -> f64 {
        let mut acc = 0.0;
        for mu in 0..4 {
            for nu in (mu + 1)..4 {
                let f = self.d[mu].commutator(&self.d[nu]);
                acc += 2.0 * self.eta[mu] * self.eta[nu] * f.trace_of_product(&f).re;
            }
        }
        acc
    }

    /// `Σ η^{μμ} Tr([𝖽_μ,Φ][𝖽_μ,Φ])`
    fn tr_dphi_dphi(&self) -> f64 {
        if !self.higgs_on {
            return 0.0;
        }
        (0..4)
            .map(|mu| {
                let cmm = self.d[mu].commutator(&self.phi);
                self.eta[mu] * cmm.trace_of_product(&cmm).re
            })
            .sum()
    }

    /// `Σ η^{μμ} Tr(𝖽_μ Φ 𝖽_μ Φ)`
    fn tr_d_phi_d_phi(&self) -> f64 {
        if !self.higgs_on {
            return 0.0;
        }
        (0..4)
            .map(|mu| {
                let x = &self.d[mu] * &self.phi;
                self.eta[mu] * x.trace_of_product(&x).re
            })
            .sum()
    }

    fn tr_theta(&self) -> f64 {
        self.theta.trace().re
    }

    fn tr_theta2(&self) -> f64 {
        self.theta.trace_of_product(&self.theta).re
    }

    fn tr_phi2(&self) -> f64 {
        self.phi2.trace().re
    }

    fn tr_phi4(&self) -> f64 {
        self.phi2.trace_of_product(&self.phi2).re
    }

    fn tr_phi2_theta(&self) -> f64 {
        self.phi2.trace_of_product(&self.theta).re
    }
}

/// `¼ Tr D_ω² = Tr(ϑ + Φ²)` (flat data).
pub fn trace_d2_closed(gt: &GaugeTriple, fl: &Fluctuation) -> Result<f64> {
    let cf = ClosedForms::new(gt, fl)?;
    Ok(cf.tr_theta() + cf.tr_phi2())
}

/// `¼ Tr D_ω⁴ = −½ Tr 𝓕_{μν}𝓕^{μν} + Tr (ϑ + Φ²)² − η^{μν} Tr [𝖽_μ,Φ][𝖽_ν,Φ]`.
pub fn trace_d4_closed(gt: &GaugeTriple, fl: &Fluctuation) -> Result<f64> {
    let cf = ClosedForms::new(gt, fl)?;
    let sq = cf.tr_theta2() + 2.0 * cf.tr_phi2_theta() + cf.tr_phi4();
    Ok(-0.5 * cf.tr_ff() + sq - cf.tr_dphi_dphi())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ActionBreakdown {
    pub s_ym: f64,
    pub s_h: f64,
    pub s_gh: f64,
    pub s_theta: f64,
    pub total_closed: f64,
    pub total_direct: Option<f64>,
    pub rest: Option<f64>,
}

/// Sector decomposition of `¼ Tr f(D_ω)` for flat Riemannian data:
///
/// * `S_YM = −(a₄/4) Tr 𝓕_{μν}𝓕^{μν}`
/// * `S_H = Tr f_e(Φ)`
/// * `S_θ = (a₂/2) Tr ϑ + (a₄/2) Tr ϑ²`
/// * `S_gH = a₄ Tr(Φ²ϑ − ½[𝖽_μ,Φ][𝖽^μ,Φ])`
///
/// Their sum equals the degree ≤ 4 part of the spectral action exactly;
/// see [`gauge_higgs_printed`] for the shorter `−a₄ Tr(𝖽_μΦ𝖽^μΦ)` form.
pub fn sectors(gt: &GaugeTriple, fl: &Fluctuation, f: &ActionPolynomial) -> Result<ActionBreakdown> {
    require_riemannian(gt)?;
    let cf = ClosedForms::new(gt, fl)?;
    let (a2, a4) = (f.a(2), f.a(4));
    let s_ym = if a4 != 0.0 { -0.25 * a4 * cf.tr_ff() } else { 0.0 };
    let s_h = 0.5 * (a2 * cf.tr_phi2() + a4 * cf.tr_phi4());
    let s_theta = 0.5 * (a2 * cf.tr_theta() + a4 * cf.tr_theta2());
    let s_gh = a4 * (cf.tr_phi2_theta() - 0.5 * cf.tr_dphi_dphi());
    Ok(ActionBreakdown {
        s_ym,
        s_h,
        s_gh,
        s_theta,
        total_closed: s_ym + s_h + s_gh + s_theta,
        total_direct: None,
        rest: None,
    })
}

/// Adds the brute-force value `¼ Tr f(D_ω)` and the remainder.
pub fn with_direct(
    mut br: ActionBreakdown,
    gt: &GaugeTriple,
    fl: &Fluctuation,
    module: &CliffordModule,
    f: &ActionPolynomial,
) -> Result<ActionBreakdown> {
    let d = crate::fluct::assemble_fluctuated(gt, fl, module)?;
    let direct = spectral_action_direct(&d, f)?;
    br.total_direct = Some(direct);
    br.rest = Some(direct - br.total_closed);
    Ok(br)
}

/// `−a₄ Σ η^{μμ} Tr(𝖽_μ Φ 𝖽_μ Φ)`.
pub fn gauge_higgs_printed(gt: &GaugeTriple, fl: &Fluctuation, a4: f64) -> Result<f64> {
    let cf = ClosedForms::new(gt, fl)?;
    Ok(-a4 * cf.tr_d_phi_d_phi())
}

/// Both sides of the identity
/// `a₄ Tr(Φ²ϑ − ½[𝖽_μ,Φ][𝖽^μ,Φ]) = −a₄ Tr(𝖽_μΦ𝖽^μΦ)`,
/// plus `a₄ Tr(Φ²ϑ)` for diagnosis.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeHiggsIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub a4_tr_phi2_theta: f64,
}

pub fn gauge_higgs_identity(gt: &GaugeTriple, fl: &Fluctuation, a4: f64) -> Result<GaugeHiggsIdentity> {
    let cf = ClosedForms::new(gt, fl)?;
    Ok(GaugeHiggsIdentity {
        lhs: a4 * (cf.tr_phi2_theta() - 0.5 * cf.tr_dphi_dphi()),
        rhs: -a4 * cf.tr_d_phi_d_phi(),
        a4_tr_phi2_theta: a4 * cf.tr_phi2_theta(),
    })
}

const SELF_ADJOINT_TOL: f64 = 1e-9;

/// `¼ Σ_i (a_i/2) Tr(Dⁱ)` by repeated multiplication.
pub fn spectral_action_direct(d: &CMat, f: &ActionPolynomial) -> Result<f64> {
    let defect = self_adjoint_defect(d);
    if defect > SELF_ADJOINT_TOL {
        return Err(Error::NotSelfAdjoint(defect));
    }
    let mut acc = 0.0;
    let mut power = eye(d.nrows());
    for i in 1..=f.degree() {
        power = &power * d;
        let a = f.a(i);
        if a != 0.0 {
            acc += 0.5 * a * power.trace().re;
        }
    }
    Ok(0.25 * acc)
}

/// `(|Tr D|, |Tr D³|)`.
pub fn odd_traces(d: &CMat) -> (f64, f64) {
    let d3 = d * d * d;
    (d.trace().norm(), d3.trace().norm())
}

/// Tetrahedral observable `−½ Σ_{μ≠ν} Tr(𝗄_μ 𝗄_ν 𝗄^μ 𝗄^ν)`.
pub fn tetrahedral(sig: &crate::clifford::Signature, k: &[CMat; 4]) -> Result<f64> {
    let m = k[0].nrows();
    if k.iter().any(|x| x.shape() != (m, m)) {
        return Err(Error::DimensionMismatch("tetrahedral blocks must share one size".into()));
    }
    let ks: Vec<SuperOp> = (0..4).map(|mu| SuperOp::gen_comm(&k[mu], sig.e[mu])).collect::<Result<_>>()?;
    let mut acc = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            if mu != nu {
                let x = &ks[mu] * &ks[nu];
                acc += sig.e_f(mu) * sig.e_f(nu) * x.trace_of_product(&x).re;
            }
        }
    }
    Ok(-0.5 * acc)
}

/// Flat Weitzenböck form of `D_ω²`:
/// `½ Σ γ^μγ^ν ⊗ 𝓕_{μν} + 1 ⊗ (ϑ + Φ²) + Σ γ^μγ ⊗ [𝖽_μ, Φ]`.
pub fn weitzenbock_flat(gt: &GaugeTriple, fl: &Fluctuation, module: &CliffordModule) -> Result<CMat> {
    let cf = ClosedForms::new(gt, fl)?;
    let g = &module.gammas;
    let m2 = gt.m() * gt.m();
    let mut out = kron(&eye(4), &(&cf.theta + &cf.phi2).rep);
    for mu in 0..4 {
        for nu in 0..4 {
            if mu != nu {
                let f = cf.d[mu].commutator(&cf.d[nu]);
                out += kron(&(&g[mu] * &g[nu] * c(0.5, 0.0)), &f.rep);
            }
        }
        if cf.higgs_on {
            out += kron(&(&g[mu] * &module.chirality), &cf.d[mu].commutator(&cf.phi).rep);
        }
    }
    debug_assert_eq!(out.nrows(), 4 * m2);
    Ok(out)
}

/// Full Weitzenböck form of `D_ω²` with triple-index blocks (no Higgs):
/// the Lichnerowicz decomposition with `k → 𝗄 + 𝖺` and `x → 𝗑 + 𝗌`.
pub fn weitzenbock_full(gt: &GaugeTriple, fl: &Fluctuation, module: &CliffordModule) -> Result<CMat> {
    if !gt.yang_mills() || fl.phi.iter().any(|z| z.norm() != 0.0) {
        return Err(Error::InvalidConfig("the full Weitzenböck form is stated with the Higgs field off".into()));
    }
    let (d, x) = covariant_superops(gt, fl);
    Ok(lichnerowicz_form(module, &d, &x, ChiralTerm::Corrected))
}
