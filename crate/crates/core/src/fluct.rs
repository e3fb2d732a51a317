//! Connes one-forms, inner fluctuations, gauge potentials and the Higgs field.

use rand::Rng;

use crate::clifford::{gamma_product, CliffordModule, MultiIndex};
use crate::dirac::{assemble_from_superops, assemble_product_dirac, random_typed, rho, GaugeTriple, RealStructure};
use crate::error::{Error, Result};
use crate::linalg::{
    c, eye, frob, gaussian_matrix, hermitian_part, kron, max_abs, random_hermitian, self_adjoint_defect, trace_product,
    unvec, vec_of, zeros, CMat, ZERO,
};
use crate::seed;
use crate::superop::SuperOp;

#[derive(Clone, Debug, PartialEq)]
pub struct Fluctuation {
    /// `A_μ` with `(A_μ)* = e_μ A_μ`.
    pub a: [CMat; 4],
    /// `S_μ` with `(S_μ)* = e_{ĥμ} S_μ`; `None` in flat runs.
    pub s: Option<[CMat; 4]>,
    /// Self-adjoint Higgs matrix in `M_N ⊗ Ω¹_{D_F}`.
    pub phi: CMat,
}

impl Fluctuation {
    pub fn zero(m: usize) -> Self {
        Fluctuation { a: std::array::from_fn(|_| zeros(m)), s: None, phi: zeros(m) }
    }

    pub fn is_flat(&self) -> bool {
        self.s.as_ref().is_none_or(|s| s.iter().all(|x| max_abs(x) == 0.0))
    }

    /// Largest violation of the adjointness types for signature data `gt`.
    pub fn type_defect(&self, gt: &GaugeTriple) -> f64 {
        let sig = gt.sig();
        let mut d: f64 = 0.0;
        for mu in 0..4 {
            d = d.max(max_abs(&(self.a[mu].adjoint() - &self.a[mu] * c(sig.e_f(mu), 0.0))));
            if let Some(s) = &self.s {
                d = d.max(max_abs(&(s[mu].adjoint() - &s[mu] * c(sig.e_hat[mu] as f64, 0.0))));
            }
        }
        d.max(max_abs(&(self.phi.adjoint() - &self.phi)))
    }
}

/// `Φ = Left(1 ⊗ D_F + φ) + ε″ Right(φ)`.
#[derive(Clone, Debug)]
pub struct HiggsField {
    pub phi: SuperOp,
}

pub fn higgs_field(fl: &Fluctuation, gt: &GaugeTriple) -> HiggsField {
    let eps2 = gt.sig().eps_dblprime as f64;
    let left = SuperOp::left(&(gt.lifted_d_f() + &fl.phi)).expect("square");
    let right = SuperOp::right(&fl.phi).expect("square");
    HiggsField { phi: &left + &(&right * eps2) }
}

/// Orthonormal basis (Hilbert-Schmidt) of `Ω¹_{D_F} = span{a[D_F, c]}` in `M_n`.
#[derive(Clone, Debug)]
pub struct OneFormSpace {
    pub n: usize,
    pub basis: Vec<CMat>,
}

const RANK_TOL: f64 = 1e-10;

impl OneFormSpace {
    /// Rank-revealing Gram-Schmidt over `2n²` random products `a[D_F, c]`.
    pub fn new(d_f: &CMat, seed: u64) -> Self {
        let n = d_f.nrows();
        let mut rng = seed::stream(seed, "one-forms", n as u64);
        let scale = frob(d_f).max(f64::MIN_POSITIVE);
        let mut basis: Vec<CMat> = Vec::new();
        for _ in 0..2 * n * n {
            let a = gaussian_matrix(&mut rng, n, n, 1.0);
            let cc = gaussian_matrix(&mut rng, n, n, 1.0);
            let mut v = &a * (d_f * &cc - &cc * d_f);
            let norm0 = frob(&v);
            for b in &basis {
                let ov = trace_product(&b.adjoint(), &v);
                v -= b * ov;
            }
            // second pass for numerical orthogonality
            for b in &basis {
                let ov = trace_product(&b.adjoint(), &v);
                v -= b * ov;
            }
            let nv = frob(&v);
            if nv > RANK_TOL * norm0.max(scale) {
                basis.push(v / c(nv, 0.0));
            }
        }
        OneFormSpace { n, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn project_block(&self, psi: &CMat) -> CMat {
        let mut out = zeros(self.n);
        for b in &self.basis {
            out += b * trace_product(&b.adjoint(), psi);
        }
        out
    }

    /// Projection of `M_N ⊗ M_n ≅ M_{Nn}` onto `M_N ⊗ Ω¹_{D_F}`, block by block.
    pub fn project(&self, m: &CMat) -> CMat {
        let n = self.n;
        let big = m.nrows() / n;
        let mut out = zeros(m.nrows());
        for i in 0..big {
            for j in 0..big {
                let blk = m.view((i * n, j * n), (n, n)).into_owned();
                out.view_mut((i * n, j * n), (n, n)).copy_from(&self.project_block(&blk));
            }
        }
        out
    }

    /// Frobenius norm of the part of `m` outside `M_N ⊗ Ω¹_{D_F}`.
    pub fn leakage(&self, m: &CMat) -> f64 {
        frob(&(m - self.project(m)))
    }
}

/// `ω = Σ ρ(𝔞)[D, ρ(𝔠)]` for pairs `(𝔞, 𝔠)` in `M_N ⊗ M_n`.
pub fn connes_one_form(gt: &GaugeTriple, module: &CliffordModule, pairs: &[(CMat, CMat)]) -> Result<CMat> {
    let d = assemble_product_dirac(gt, module)?;
    let m = gt.m();
    let mut omega = zeros(d.nrows());
    for (a, cc) in pairs {
        if a.shape() != (m, m) || cc.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!("algebra elements must be {m}x{m}")));
        }
        let ra = rho(a);
        let rc = rho(cc);
        omega += &ra * (&d * &rc - &rc * &d);
    }
    Ok(omega)
}

const SELF_ADJOINT_TOL: f64 = 1e-9;

/// `D + ω + ε′ J ω J⁻¹`. With `symmetrize` the one-form is replaced by
/// `(ω + ω*)/2`; otherwise a non-self-adjoint `ω` is rejected.
pub fn fluctuate(d: &CMat, omega: &CMat, j: &RealStructure, eps_prime: i32, symmetrize: bool) -> Result<CMat> {
    let w = if symmetrize {
        hermitian_part(omega)
    } else {
        let defect = self_adjoint_defect(omega);
        if defect > SELF_ADJOINT_TOL {
            return Err(Error::NotSelfAdjoint(defect));
        }
        omega.clone()
    };
    Ok(d + &w + j.conjugate(&w) * c(eps_prime as f64, 0.0))
}

/// Coefficient `Ω_B ∈ End(M_m)` of `Γ_B` in `ω = Σ Γ_B ⊗ Ω_B`, using
/// `Tr_V(Γ_A* Γ_B) = 4 δ_AB`.
fn spinor_coefficient(omega: &CMat, gamma: &CMat) -> CMat {
    let w = omega.nrows() / 4;
    let mut out = zeros(w);
    for a in 0..4 {
        for b in 0..4 {
            let coef = gamma[(b, a)].conj();
            if coef != ZERO {
                out += omega.view((b * w, a * w), (w, w)) * (coef * c(0.25, 0.0));
            }
        }
    }
    out
}

/// Read `(A_μ, S_μ, φ)` off a self-adjoint one-form. Returns the fluctuation
/// and the relative residual of `ω` outside the span of
/// `γ^μ ⊗ Left(·)`, `γ^{ĥμ} ⊗ Left(·)`, `γ ⊗ Left(·)`.
pub fn extract_fluctuation(omega: &CMat, gt: &GaugeTriple, module: &CliffordModule) -> Result<(Fluctuation, f64)> {
    let m = gt.m();
    if omega.nrows() != 4 * m * m {
        return Err(Error::DimensionMismatch("one-form does not act on V ⊗ M_N ⊗ M_n".into()));
    }
    let unit = vec_of(&eye(m));
    let read = |g: &CMat| -> CMat { unvec(&(spinor_coefficient(omega, g) * &unit), m) };

    let mut rebuilt = zeros(omega.nrows());
    let mut put = |g: &CMat, coef: &CMat| {
        rebuilt += kron(g, &SuperOp::left(coef).expect("square").rep);
    };
    let a: [CMat; 4] = std::array::from_fn(|mu| read(&module.gammas[mu]));
    let s: [CMat; 4] = std::array::from_fn(|mu| read(&gamma_product(module, MultiIndex::Hat(mu))));
    let phi = read(&module.chirality);
    for mu in 0..4 {
        put(&module.gammas[mu], &a[mu]);
        put(&gamma_product(module, MultiIndex::Hat(mu)), &s[mu]);
    }
    put(&module.chirality, &phi);
    let scale = frob(omega);
    let residual = if scale > 0.0 { frob(&(omega - rebuilt)) / scale } else { 0.0 };
    let flat = s.iter().all(|x| max_abs(x) == 0.0);
    Ok((Fluctuation { a, s: (!flat).then_some(s), phi }, residual))
}

/// Covariant blocks `(𝗄_μ + 𝖺_μ, 𝗑_μ + 𝗌_μ)` on `M_N ⊗ M_n`.
pub fn covariant_superops(gt: &GaugeTriple, fl: &Fluctuation) -> ([SuperOp; 4], [SuperOp; 4]) {
    let sig = gt.sig();
    let m = gt.m();
    let lifted = |b: &Option<CMat>| b.as_ref().map(|k| gt.lift(k)).unwrap_or_else(|| zeros(m));
    let d = std::array::from_fn(|mu| {
        let k = lifted(&gt.fuzzy.singles[mu]) + &fl.a[mu];
        SuperOp::gen_comm(&k, sig.e[mu]).expect("square")
    });
    let x = std::array::from_fn(|mu| {
        let mut k = lifted(&gt.fuzzy.hats[mu]);
        if let Some(s) = &fl.s {
            k += &s[mu];
        }
        SuperOp::gen_comm(&k, sig.e_hat[mu]).expect("square")
    });
    (d, x)
}

fn check_sizes(gt: &GaugeTriple, fl: &Fluctuation) -> Result<()> {
    let m = gt.m();
    let ok = fl.a.iter().all(|x| x.shape() == (m, m))
        && fl.phi.shape() == (m, m)
        && fl.s.as_ref().is_none_or(|s| s.iter().all(|x| x.shape() == (m, m)));
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("fluctuation matrices must be {m}x{m}")))
    }
}

/// `D_ω = γ ⊗ Φ + Σ γ^μ ⊗ (𝗄_μ + 𝖺_μ) + γ^{ĥμ} ⊗ (𝗑_μ + 𝗌_μ)`.
pub fn assemble_fluctuated(gt: &GaugeTriple, fl: &Fluctuation, module: &CliffordModule) -> Result<CMat> {
    check_sizes(gt, fl)?;
    let (d, x) = covariant_superops(gt, fl);
    let higgs_on = !gt.yang_mills() || max_abs(&fl.phi) > 0.0;
    let h = higgs_on.then(|| higgs_field(fl, gt).phi);
    Ok(assemble_from_superops(module, &d, &x, h.as_ref()))
}

/// Random potentials of the right adjointness types and, when `D_F ≠ 0`,
/// a Higgs matrix `Σ_j X_j ⊗ a_j[D_F, c_j]` made self-adjoint.
pub fn random_fluctuation(gt: &GaugeTriple, scale: f64, seed: u64, include_s: bool) -> Fluctuation {
    let sig = gt.sig();
    let m = gt.m();
    let mut rng = seed::stream(seed, "fluctuation", m as u64);
    let a = std::array::from_fn(|mu| random_typed(&mut rng, m, scale, sig.e[mu]));
    let s: [CMat; 4] = std::array::from_fn(|mu| random_typed(&mut rng, m, scale, sig.e_hat[mu]));
    let phi = if gt.yang_mills() { zeros(m) } else { random_higgs(gt, scale, &mut rng) };
    Fluctuation { a, s: include_s.then_some(s), phi }
}

pub fn random_higgs<R: Rng + ?Sized>(gt: &GaugeTriple, scale: f64, rng: &mut R) -> CMat {
    let n = gt.finite.n;
    let nb = gt.fuzzy.n_base;
    let d_f = &gt.finite.d_f;
    let mut phi = zeros(gt.m());
    for _ in 0..n * n {
        let x = random_hermitian(rng, nb, scale);
        let a = gaussian_matrix(rng, n, n, 1.0);
        let cc = gaussian_matrix(rng, n, n, 1.0);
        phi += kron(&x, &(&a * (d_f * &cc - &cc * d_f)));
    }
    hermitian_part(&phi)
}

/// Sign `s` with `J (γ ⊗ Left(φ)) J⁻¹ = s γ ⊗ Right(φ)` for Hermitian `φ`,
/// together with the residual of the best sign.
pub fn higgs_conjugation_sign(module: &CliffordModule, m: usize, seed: u64) -> (i32, f64) {
    let mut rng = seed::stream(seed, "higgs-sign", m as u64);
    let phi = random_hermitian(&mut rng, m, 1.0);
    let j = RealStructure::new(module, m);
    let x = kron(&module.chirality, &SuperOp::left(&phi).expect("square").rep);
    let jx = j.conjugate(&x);
    let target = kron(&module.chirality, &SuperOp::right(&phi).expect("square").rep);
    let dp = max_abs(&(&jx - &target));
    let dm = max_abs(&(&jx + &target));
    if dp <= dm {
        (1, dp)
    } else {
        (-1, dm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{all_signatures, build_gammas, build_signature};
    use crate::dirac::{random_finite, random_fuzzy, FiniteData};
    use crate::linalg::{max_abs_diff, rel_frob};

    fn riemannian(nb: usize, n: usize, seed: u64, higgs: bool) -> (GaugeTriple, CliffordModule) {
        let s = build_signature(0, 4).unwrap();
        let m = build_gammas(&s).unwrap();
        let fin = if higgs { random_finite(n, seed) } else { FiniteData::trivial(n) };
        (GaugeTriple::new(random_fuzzy(nb, &s, 0.7, seed, false), fin), m)
    }

    fn random_pairs(m: usize, k: usize, seed: u64) -> Vec<(CMat, CMat)> {
        let mut rng = seed::stream(seed, "pairs", 0);
        (0..k).map(|_| (gaussian_matrix(&mut rng, m, m, 1.0), gaussian_matrix(&mut rng, m, m, 1.0))).collect()
    }

    #[test]
    fn unit_gives_zero_one_form() {
        let (gt, m) = riemannian(2, 2, 1, true);
        let pairs = vec![(gaussian_matrix(&mut seed::stream(1, "a", 0), 4, 4, 1.0), eye(4))];
        assert_eq!(max_abs(&connes_one_form(&gt, &m, &pairs).unwrap()), 0.0);
    }

    #[test]
    fn flat_single_pair_coefficient() {
        let (gt, m) = riemannian(2, 2, 2, false);
        let mut rng = seed::stream(2, "w", 0);
        let (w, t) = (gaussian_matrix(&mut rng, 2, 2, 1.0), gaussian_matrix(&mut rng, 2, 2, 1.0));
        let (a, b) = (gaussian_matrix(&mut rng, 2, 2, 1.0), gaussian_matrix(&mut rng, 2, 2, 1.0));
        let omega = connes_one_form(&gt, &m, &[(kron(&w, &a), kron(&t, &b))]).unwrap();
        let (fl, residual) = extract_fluctuation(&omega, &gt, &m).unwrap();
        assert!(residual < 1e-13);
        for mu in 0..4 {
            let k = gt.fuzzy.singles[mu].as_ref().unwrap();
            let expected = kron(&(&w * (k * &t - &t * k)), &(&a * &b));
            assert!(max_abs_diff(&fl.a[mu], &expected) < 1e-12);
        }
    }

    #[test]
    fn higgs_only_pair_is_pure_chirality_term() {
        let s = build_signature(0, 4).unwrap();
        let m = build_gammas(&s).unwrap();
        let gt = GaugeTriple::new(crate::dirac::FuzzyData::zero(2, &s), random_finite(2, 3));
        let mut rng = seed::stream(3, "w", 0);
        let (w, t) = (gaussian_matrix(&mut rng, 2, 2, 1.0), gaussian_matrix(&mut rng, 2, 2, 1.0));
        let (a, cc) = (gaussian_matrix(&mut rng, 2, 2, 1.0), gaussian_matrix(&mut rng, 2, 2, 1.0));
        let omega = connes_one_form(&gt, &m, &[(kron(&w, &a), kron(&t, &cc))]).unwrap();
        let d_f = &gt.finite.d_f;
        let coef = kron(&(&w * &t), &(&a * (d_f * &cc - &cc * d_f)));
        let expected = kron(&m.chirality, &SuperOp::left(&coef).unwrap().rep);
        assert!(max_abs_diff(&omega, &expected) < 1e-12);
    }

    #[test]
    fn fluctuate_rejects_non_self_adjoint() {
        let (gt, m) = riemannian(2, 2, 4, false);
        let d = assemble_product_dirac(&gt, &m).unwrap();
        let j = RealStructure::new(&m, 4);
        let omega = connes_one_form(&gt, &m, &random_pairs(4, 1, 4)).unwrap();
        assert!(matches!(fluctuate(&d, &omega, &j, 1, false), Err(Error::NotSelfAdjoint(_))));
        assert_eq!(fluctuate(&d, &zeros(64), &j, 1, false).unwrap(), d);
    }

    #[test]
    fn dual_path_all_signatures() {
        for sig in all_signatures() {
            let m = build_gammas(&sig).unwrap();
            for (higgs, with_x) in [(false, true), (true, false), (true, true)] {
                let fin = if higgs { random_finite(2, 5) } else { FiniteData::trivial(2) };
                let gt = GaugeTriple::new(random_fuzzy(2, &sig, 0.7, 5, with_x), fin);
                let d = assemble_product_dirac(&gt, &m).unwrap();
                let j = RealStructure::new(&m, gt.m());
                let omega = hermitian_part(&connes_one_form(&gt, &m, &random_pairs(4, 3, 5)).unwrap());
                let via_forms = fluctuate(&d, &omega, &j, sig.eps_prime, false).unwrap();
                let (fl, residual) = extract_fluctuation(&omega, &gt, &m).unwrap();
                assert!(residual < 1e-12);
                assert!(fl.type_defect(&gt) < 1e-12, "{}", sig.label());
                let closed = assemble_fluctuated(&gt, &fl, &m).unwrap();
                assert!(rel_frob(&closed, &via_forms) < 1e-12, "{} higgs={higgs}", sig.label());
            }
        }
    }

    #[test]
    fn zero_fluctuation_is_product_dirac() {
        let (gt, m) = riemannian(2, 2, 6, true);
        let a = assemble_fluctuated(&gt, &Fluctuation::zero(4), &m).unwrap();
        assert!(max_abs_diff(&a, &assemble_product_dirac(&gt, &m).unwrap()) < 1e-15);
    }

    #[test]
    fn random_fluctuation_types() {
        let (gt, _) = riemannian(2, 2, 7, false);
        let fl = random_fluctuation(&gt, 0.5, 7, false);
        assert_eq!(fl.phi, zeros(4));
        for a in &fl.a {
            assert!(max_abs_diff(&a.adjoint(), &(-a)) < 1e-15);
        }
        let s13 = build_signature(1, 3).unwrap();
        let gt13 = GaugeTriple::new(random_fuzzy(2, &s13, 0.7, 7, true), random_finite(2, 7));
        let fl = random_fluctuation(&gt13, 0.5, 7, true);
        assert!(max_abs_diff(&fl.a[0].adjoint(), &fl.a[0]) < 1e-15);
        for mu in 1..4 {
            assert!(max_abs_diff(&fl.a[mu].adjoint(), &(-&fl.a[mu])) < 1e-15);
        }
        assert!(fl.type_defect(&gt13) < 1e-15);
        let space = OneFormSpace::new(&gt13.finite.d_f, 7);
        assert!(space.leakage(&fl.phi) < 1e-12);
    }

    #[test]
    fn higgs_field_cases() {
        let (gt, _) = riemannian(2, 2, 8, true);
        let fl0 = Fluctuation::zero(4);
        let h = higgs_field(&fl0, &gt);
        assert_eq!(h.phi, SuperOp::left(&gt.lifted_d_f()).unwrap());
        let fl = random_fluctuation(&gt, 0.5, 8, false);
        let h = higgs_field(&fl, &gt);
        assert!(max_abs_diff(&h.phi.adjoint().rep, &h.phi.rep) < 1e-12);
        let (gt_ym, _) = riemannian(2, 2, 8, false);
        let mut fl2 = fl.clone();
        fl2.phi = random_hermitian(&mut seed::stream(8, "phi", 0), 4, 1.0);
        let h = higgs_field(&fl2, &gt_ym);
        let expected = &SuperOp::left(&fl2.phi).unwrap() + &SuperOp::right(&fl2.phi).unwrap();
        assert!(max_abs_diff(&h.phi.rep, &expected.rep) < 1e-15);
    }

    #[test]
    fn one_form_space_dimension() {
        let space = OneFormSpace::new(&(eye(3) * c(2.0, 0.0)), 1);
        assert_eq!(space.dim(), 0);
        let space = OneFormSpace::new(&random_finite(3, 1).d_f, 1);
        assert_eq!(space.dim(), 9);
    }

    #[test]
    fn higgs_sign_is_parity_of_q() {
        for sig in all_signatures() {
            let m = build_gammas(&sig).unwrap();
            let (s, res) = higgs_conjugation_sign(&m, 3, 1);
            assert!(res < 1e-13);
            let parity = if sig.q % 2 == 0 { 1 } else { -1 };
            assert_eq!(s, parity);
            assert_eq!(s, sig.eps_dblprime);
        }
    }
}
