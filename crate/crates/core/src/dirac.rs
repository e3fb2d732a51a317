//! Matrix data of fuzzy and gauge spectral triples and the Dirac operator
//! they define on `V ⊗ M_N ⊗ M_n`. Also home to the axiom checks and the
//! fuzzy Lichnerowicz decomposition of `D²`.

use rand::Rng;

use crate::clifford::{delta4, gamma_product, sgn, CliffordModule, MultiIndex, Signature};
use crate::error::{Error, Result};
use crate::linalg::{
    c, conj, eye, frob, gaussian_matrix, kron, max_abs, random_hermitian, transpose_permutation, zeros, CMat, I,
};
use crate::seed;
use crate::superop::SuperOp;

/// Tolerance used when validating adjointness types of user data.
const TYPE_TOL: f64 = 1e-9;

fn check_type(k: &CMat, e: i32, what: &str) -> Result<()> {
    let d = frob(&(k.adjoint() - k * c(e as f64, 0.0)));
    let s = frob(k).max(1.0);
    if d > TYPE_TOL * s {
        return Err(Error::InvalidConfig(format!(
            "{what} violates (K)* = {e:+}K by {d:.3e}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FuzzyData {
    pub n_base: usize,
    pub sig: Signature,
    /// `K_μ`; `None` means zero.
    pub singles: [Option<CMat>; 4],
    /// `K_{ĥμ}` (the `X_μ`); `None` means zero.
    pub hats: [Option<CMat>; 4],
}

impl FuzzyData {
    pub fn zero(n_base: usize, sig: &Signature) -> Self {
        FuzzyData { n_base, sig: sig.clone(), singles: Default::default(), hats: Default::default() }
    }

    /// Validating constructor: sizes `N × N` and `(K_I)* = e_I K_I`.
    pub fn new(
        n_base: usize,
        sig: &Signature,
        singles: [Option<CMat>; 4],
        hats: [Option<CMat>; 4],
    ) -> Result<Self> {
        let fz = FuzzyData { n_base, sig: sig.clone(), singles, hats };
        for idx in MultiIndex::all() {
            if let Some(k) = fz.get(idx) {
                if k.nrows() != n_base || k.ncols() != n_base {
                    return Err(Error::DimensionMismatch(format!(
                        "{idx:?} block is {}x{}, expected {n_base}x{n_base}",
                        k.nrows(),
                        k.ncols()
                    )));
                }
                check_type(k, idx.sign(sig), &format!("{idx:?}"))?;
            }
        }
        Ok(fz)
    }

    pub fn get(&self, idx: MultiIndex) -> Option<&CMat> {
        match idx {
            MultiIndex::Single(mu) => self.singles[mu].as_ref(),
            MultiIndex::Hat(mu) => self.hats[mu].as_ref(),
        }
    }

    pub fn single_or_zero(&self, mu: usize) -> CMat {
        self.singles[mu].clone().unwrap_or_else(|| zeros(self.n_base))
    }

    pub fn is_flat(&self) -> bool {
        self.hats.iter().all(|h| h.as_ref().is_none_or(|m| max_abs(m) == 0.0))
    }
}

#[derive(Clone, Debug)]
pub struct FiniteData {
    pub n: usize,
    pub d_f: CMat,
}

impl FiniteData {
    pub fn trivial(n: usize) -> Self {
        FiniteData { n, d_f: zeros(n) }
    }

    pub fn new(d_f: CMat) -> Result<Self> {
        if d_f.nrows() != d_f.ncols() {
            return Err(Error::DimensionMismatch("D_F must be square".into()));
        }
        check_type(&d_f, 1, "D_F")?;
        Ok(FiniteData { n: d_f.nrows(), d_f })
    }
}

#[derive(Clone, Debug)]
pub struct GaugeTriple {
    pub fuzzy: FuzzyData,
    pub finite: FiniteData,
}

impl GaugeTriple {
    pub fn new(fuzzy: FuzzyData, finite: FiniteData) -> Self {
        GaugeTriple { fuzzy, finite }
    }

    /// A bare fuzzy geometry viewed as a triple with trivial fiber `n = 1`.
    pub fn from_fuzzy(fuzzy: FuzzyData) -> Self {
        GaugeTriple { fuzzy, finite: FiniteData::trivial(1) }
    }

    pub fn sig(&self) -> &Signature {
        &self.fuzzy.sig
    }

    pub fn yang_mills(&self) -> bool {
        max_abs(&self.finite.d_f) == 0.0
    }

    /// Side dimension `N n` of the matrix factor.
    pub fn m(&self) -> usize {
        self.fuzzy.n_base * self.finite.n
    }

    pub fn hilbert_dim(&self) -> usize {
        4 * self.m() * self.m()
    }

    /// `K ⊗ 1_n`
    pub fn lift(&self, k: &CMat) -> CMat {
        kron(k, &eye(self.finite.n))
    }

    /// `1_N ⊗ D_F`
    pub fn lifted_d_f(&self) -> CMat {
        kron(&eye(self.fuzzy.n_base), &self.finite.d_f)
    }

    /// `(𝗄_μ, 𝗑_μ)` on `M_N ⊗ M_n`: generalized commutators of the lifted blocks.
    pub fn block_superops(&self) -> ([SuperOp; 4], [SuperOp; 4]) {
        let sig = self.sig();
        let m = self.m();
        let k = std::array::from_fn(|mu| match &self.fuzzy.singles[mu] {
            Some(b) => SuperOp::gen_comm(&self.lift(b), sig.e[mu]).expect("square"),
            None => SuperOp::zero(m),
        });
        let x = std::array::from_fn(|mu| match &self.fuzzy.hats[mu] {
            Some(b) => SuperOp::gen_comm(&self.lift(b), sig.e_hat[mu]).expect("square"),
            None => SuperOp::zero(m),
        });
        (k, x)
    }
}

/// Gaussian Hermitian `G` for `e = +1`, `iG` for `e = −1`.
pub fn random_typed<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64, e: i32) -> CMat {
    let g = random_hermitian(rng, n, scale);
    if e > 0 {
        g
    } else {
        g * I
    }
}

pub fn random_fuzzy(n_base: usize, sig: &Signature, scale: f64, seed: u64, include_x: bool) -> FuzzyData {
    let mut rng = seed::stream(seed, "fuzzy", n_base as u64);
    let singles = std::array::from_fn(|mu| Some(random_typed(&mut rng, n_base, scale, sig.e[mu])));
    let hats = std::array::from_fn(|mu| {
        let k = random_typed(&mut rng, n_base, scale, sig.e_hat[mu]);
        include_x.then_some(k)
    });
    FuzzyData { n_base, sig: sig.clone(), singles, hats }
}

/// Default Gaussian scale `1/√N`.
pub fn default_scale(n_base: usize) -> f64 {
    1.0 / (n_base as f64).sqrt()
}

/// Random Hermitian `D_F` with the default scale of the fiber.
pub fn random_finite(n: usize, seed: u64) -> FiniteData {
    let mut rng = seed::stream(seed, "finite", n as u64);
    FiniteData { n, d_f: random_hermitian(&mut rng, n, default_scale(n)) }
}

/// `Σ_μ γ^μ ⊗ k_μ + γ^{ĥμ} ⊗ x_μ (+ γ ⊗ Φ)`.
pub fn assemble_from_superops(
    module: &CliffordModule,
    k: &[SuperOp; 4],
    x: &[SuperOp; 4],
    higgs: Option<&SuperOp>,
) -> CMat {
    let m2 = k[0].rep.nrows();
    let mut d = zeros(4 * m2);
    for mu in 0..4 {
        if max_abs(&k[mu].rep) > 0.0 {
            d += kron(&module.gammas[mu], &k[mu].rep);
        }
        if max_abs(&x[mu].rep) > 0.0 {
            d += kron(&gamma_product(module, MultiIndex::Hat(mu)), &x[mu].rep);
        }
    }
    if let Some(phi) = higgs {
        d += kron(&module.chirality, &phi.rep);
    }
    d
}

fn check_module(sig: &Signature, module: &CliffordModule) -> Result<()> {
    if *sig != module.signature {
        return Err(Error::DimensionMismatch(format!(
            "data of signature {} with a Clifford module of signature {}",
            sig.label(),
            module.signature.label()
        )));
    }
    Ok(())
}

pub fn assemble_fuzzy_dirac(fz: &FuzzyData, module: &CliffordModule) -> Result<CMat> {
    assemble_product_dirac(&GaugeTriple::from_fuzzy(fz.clone()), module)
}

pub fn assemble_product_dirac(gt: &GaugeTriple, module: &CliffordModule) -> Result<CMat> {
    check_module(gt.sig(), module)?;
    let (k, x) = gt.block_superops();
    let higgs = if gt.yang_mills() { None } else { Some(SuperOp::left(&gt.lifted_d_f())?) };
    Ok(assemble_from_superops(module, &k, &x, higgs.as_ref()))
}

/// Real structure `J = M ∘ conj` on `V ⊗ M_m`, with
/// `M = U_C ⊗ P` and `P vec(T) = vec(Tᵀ)`, so that `J(v ⊗ T) = Cv ⊗ T*`.
#[derive(Clone, Debug)]
pub struct RealStructure {
    pub linear: CMat,
}

impl RealStructure {
    pub fn new(module: &CliffordModule, m: usize) -> Self {
        RealStructure { linear: kron(&module.conj_unitary, &transpose_permutation(m)) }
    }

    /// `J X J⁻¹ = M conj(X) M*` for a linear operator `X`.
    pub fn conjugate(&self, x: &CMat) -> CMat {
        &self.linear * conj(x) * self.linear.adjoint()
    }

    /// The linear operator `J²`.
    pub fn square(&self) -> CMat {
        &self.linear * conj(&self.linear)
    }
}

/// Representation `a ↦ 1_V ⊗ Left(a)` of `M_N ⊗ M_n`.
pub fn rho(a: &CMat) -> CMat {
    kron(&eye(4), &SuperOp::left(a).expect("square").rep)
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct AxiomReport {
    pub j_squared: f64,
    pub j_d: f64,
    /// `JD = ε′DJ` is only claimed for `D_F = 0`; with a left-acting `D_F`
    /// it is reported but not enforced.
    pub j_d_informational: bool,
    pub j_gamma: f64,
    /// `Dγ_f = −γ_f D`, only meaningful when `D_F = 0`.
    pub d_gamma: Option<f64>,
    pub order_one: f64,
    pub commutant: f64,
}

impl AxiomReport {
    /// Largest deviation among the enforced checks.
    pub fn max_enforced(&self) -> f64 {
        let mut m = self.j_squared.max(self.j_gamma).max(self.order_one).max(self.commutant);
        if !self.j_d_informational {
            m = m.max(self.j_d);
        }
        if let Some(d) = self.d_gamma {
            m = m.max(d);
        }
        m
    }
}

pub const AXIOM_PAIRS: usize = 20;

/// Axioms of a real even spectral triple, with 20 random algebra pairs.
pub fn check_axioms<R: Rng + ?Sized>(gt: &GaugeTriple, module: &CliffordModule, rng: &mut R) -> Result<AxiomReport> {
    let sig = gt.sig();
    let d = assemble_product_dirac(gt, module)?;
    let m = gt.m();
    let j = RealStructure::new(module, m);
    let dim = d.nrows();
    let one = eye(dim);
    let r = |x: i32| c(x as f64, 0.0);

    let mut rep = AxiomReport {
        j_squared: max_abs(&(j.square() - &one * r(sig.eps))),
        ..Default::default()
    };
    rep.j_d = max_abs(&(&j.linear * conj(&d) - &d * &j.linear * r(sig.eps_prime)));
    rep.j_d_informational = !gt.yang_mills();
    let gamma_f = kron(&module.chirality, &eye(m * m));
    rep.j_gamma = max_abs(&(&j.linear * conj(&gamma_f) - &gamma_f * &j.linear * r(sig.eps_dblprime)));
    if gt.yang_mills() {
        rep.d_gamma = Some(max_abs(&(&d * &gamma_f + &gamma_f * &d)));
    }

    for _ in 0..AXIOM_PAIRS {
        let a = gaussian_matrix(rng, m, m, 1.0);
        let b = gaussian_matrix(rng, m, m, 1.0);
        let ra = rho(&a);
        let jb = j.conjugate(&rho(&b));
        let da = &d * &ra - &ra * &d;
        rep.order_one = rep.order_one.max(max_abs(&(&da * &jb - &jb * &da)));
        let jbs = j.conjugate(&rho(&b.adjoint()));
        rep.commutant = rep.commutant.max(max_abs(&(&ra * &jbs - &jbs * &ra)));
    }
    Ok(rep)
}

/// `s_{μνασ} = e_μ (−1)^μ sgn(ν−μ) sgn(σ−α) δ_{μνασ}`.
pub fn sign_s(sig: &Signature, mu: usize, nu: usize, alpha: usize, sigma: usize) -> i32 {
    let pm = if mu.is_multiple_of(2) { 1.0 } else { -1.0 };
    let v = sig.e_f(mu) * pm * sgn(nu as i64 - mu as i64) * sgn(sigma as i64 - alpha as i64) * delta4(mu, nu, alpha, sigma);
    v as i32
}

/// `t_{μν} = Σ_{λ<ρ} (−1)^{1+|μ−ν|} δ_{μνλρ} e_λ e_ρ`.
pub fn sign_t(sig: &Signature, mu: usize, nu: usize) -> i32 {
    let pm = if (1 + (mu as i64 - nu as i64).abs()) % 2 == 0 { 1.0 } else { -1.0 };
    let mut v = 0.0;
    for lambda in 0..4 {
        for rho in (lambda + 1)..4 {
            v += pm * delta4(mu, nu, lambda, rho) * sig.e_f(lambda) * sig.e_f(rho);
        }
    }
    v as i32
}

/// Which ordering of the chiral cross term to use in [`lichnerowicz_form`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiralTerm {
    /// `(−1)^μ/σ(η) γ ⊗ [k_μ, x_μ]`, the ordering that squares correctly.
    Corrected,
    /// `(−1)^μ/σ(η) γ ⊗ [x_μ, k_μ]`, as usually printed.
    Printed,
}

/// Six-term decomposition of `(Σ γ^μ⊗k_μ + γ^{ĥμ}⊗x_μ)²`:
///
/// `Σ η^{μν} 1⊗k_μk_ν + ½γ^μγ^ν⊗[k_μ,k_ν] − Σ det(η) e_μ 1⊗x_μx_μ
///  + Σ_{μ<ν} t_{μν} γ^μγ^ν⊗[x_μ,x_ν] + ½ Σ s_{μνασ} γ^αγ^σ⊗{x_ν,k_μ}
///  + (1/σ(η)) Σ (−1)^μ γ⊗[k_μ,x_μ]`.
pub fn lichnerowicz_form(module: &CliffordModule, k: &[SuperOp; 4], x: &[SuperOp; 4], chiral: ChiralTerm) -> CMat {
    let sig = &module.signature;
    let g = &module.gammas;
    let m2 = k[0].rep.nrows();
    let one = eye(4);
    let mut scalar = SuperOp::zero(k[0].m);
    let mut out = zeros(4 * m2);

    for mu in 0..4 {
        scalar = &scalar + &(&(&k[mu] * &k[mu]) * sig.e_f(mu));
        scalar = &scalar - &(&(&x[mu] * &x[mu]) * (sig.det_eta() * sig.e_f(mu)));
        for nu in 0..4 {
            if mu != nu {
                out += kron(&(&g[mu] * &g[nu] * c(0.5, 0.0)), &k[mu].commutator(&k[nu]).rep);
            }
            if mu < nu {
                let t = sign_t(sig, mu, nu);
                if t != 0 {
                    out += kron(&(&g[mu] * &g[nu] * c(t as f64, 0.0)), &x[mu].commutator(&x[nu]).rep);
                }
            }
            for alpha in 0..4 {
                for sigma in 0..4 {
                    let s = sign_s(sig, mu, nu, alpha, sigma);
                    if s != 0 {
                        let coef = c(0.5 * s as f64, 0.0);
                        out += kron(&(&g[alpha] * &g[sigma] * coef), &x[nu].anticommutator(&k[mu]).rep);
                    }
                }
            }
        }
        let pm = if mu % 2 == 0 { 1.0 } else { -1.0 };
        let comm = match chiral {
            ChiralTerm::Corrected => k[mu].commutator(&x[mu]),
            ChiralTerm::Printed => x[mu].commutator(&k[mu]),
        };
        out += kron(&(&module.chirality * (c(pm, 0.0) / sig.sigma_eta)), &comm.rep);
    }
    out + kron(&one, &scalar.rep)
}

fn fuzzy_superops(fz: &FuzzyData) -> ([SuperOp; 4], [SuperOp; 4]) {
    GaugeTriple::from_fuzzy(fz.clone()).block_superops()
}

/// Right-hand side of the fuzzy Lichnerowicz formula.
pub fn lichnerowicz_rhs(fz: &FuzzyData, module: &CliffordModule) -> Result<CMat> {
    check_module(&fz.sig, module)?;
    let (k, x) = fuzzy_superops(fz);
    Ok(lichnerowicz_form(module, &k, &x, ChiralTerm::Corrected))
}

/// The same with the chiral cross term ordered `[x_μ, k_μ]`.
pub fn lichnerowicz_rhs_as_printed(fz: &FuzzyData, module: &CliffordModule) -> Result<CMat> {
    check_module(&fz.sig, module)?;
    let (k, x) = fuzzy_superops(fz);
    Ok(lichnerowicz_form(module, &k, &x, ChiralTerm::Printed))
}
