//! Signatures, gamma matrices, chirality and charge conjugation in four
//! dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, conj, dagger, eye, kron, max_abs, max_abs_diff, pauli, CMat, C64, I, ONE};

/// Rows s = 0..7 of the KO sign table: (ε, ε′, ε″).
const KO_TABLE: [(i32, i32, i32); 8] = [
    (1, 1, 1),
    (1, -1, -1),
    (-1, 1, -1),
    (-1, 1, 1),
    (-1, 1, 1),
    (-1, -1, 1),
    (1, 1, -1),
    (1, 1, 1),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub d: usize,
    /// KO-dimension `(q − p) mod 8`.
    pub s: usize,
    pub e: [i32; 4],
    pub e_hat: [i32; 4],
    pub eps: i32,
    pub eps_prime: i32,
    pub eps_dblprime: i32,
    /// `(−i)^{s(s+1)/2 mod 4}`, the phase in front of `γ⁰γ¹γ²γ³`.
    pub sigma_eta: C64,
}

pub fn build_signature(p: usize, q: usize) -> Result<Signature> {
    if p + q != 4 {
        return Err(Error::NonFourDimensional(p + q));
    }
    let s = ((q as i64 - p as i64).rem_euclid(8)) as usize;
    let mut e = [0i32; 4];
    for (mu, em) in e.iter_mut().enumerate() {
        *em = if mu < p { 1 } else { -1 };
    }
    let hat_factor = if (q + 1).is_multiple_of(2) { 1 } else { -1 };
    let e_hat = e.map(|x| x * hat_factor);
    let (eps, eps_prime, eps_dblprime) = KO_TABLE[s];
    let sigma_eta = match (s * (s + 1) / 2) % 4 {
        0 => ONE,
        1 => -I,
        2 => -ONE,
        _ => I,
    };
    Ok(Signature { p, q, d: 4, s, e, e_hat, eps, eps_prime, eps_dblprime, sigma_eta })
}

/// The four signatures with `p + q = 4`, in the order (0,4), (1,3), (2,2), (3,1).
pub fn all_signatures() -> Vec<Signature> {
    [(0, 4), (1, 3), (2, 2), (3, 1)]
        .iter()
        .map(|&(p, q)| build_signature(p, q).expect("d = 4"))
        .collect()
}

impl Signature {
    pub fn e_f(&self, mu: usize) -> f64 {
        self.e[mu] as f64
    }

    /// Diagonal metric entry `η^{μν}`.
    pub fn eta(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            self.e[mu] as f64
        } else {
            0.0
        }
    }

    pub fn det_eta(&self) -> f64 {
        self.e.iter().product::<i32>() as f64
    }

    pub fn is_riemannian(&self) -> bool {
        self.p == 0 && self.q == 4
    }

    pub fn label(&self) -> String {
        format!("({},{})", self.p, self.q)
    }
}

/// `γ^I` label: a single index or the hat of an index (product of the other three).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MultiIndex {
    Single(usize),
    Hat(usize),
}

impl MultiIndex {
    pub fn sign(&self, sig: &Signature) -> i32 {
        match *self {
            MultiIndex::Single(mu) => sig.e[mu],
            MultiIndex::Hat(mu) => sig.e_hat[mu],
        }
    }

    pub fn all() -> [MultiIndex; 8] {
        use MultiIndex::*;
        [Single(0), Single(1), Single(2), Single(3), Hat(0), Hat(1), Hat(2), Hat(3)]
    }
}

#[derive(Clone, Debug)]
pub struct CliffordModule {
    pub signature: Signature,
    pub dim_v: usize,
    pub gammas: [CMat; 4],
    pub chirality: CMat,
    /// `U_C` with `C = U_C ∘ conj`.
    pub conj_unitary: CMat,
}

/// Hermitian, pairwise anticommuting, square-one Pauli construction
/// `σ1⊗σ1, σ1⊗σ2, σ1⊗σ3, σ2⊗1`; its product is diagonal.
fn euclidean_gammas() -> [CMat; 4] {
    let s = pauli();
    [kron(&s[1], &s[1]), kron(&s[1], &s[2]), kron(&s[1], &s[3]), kron(&s[2], &s[0])]
}

const CONJ_TOL: f64 = 1e-12;

pub fn build_gammas(sig: &Signature) -> Result<CliffordModule> {
    if sig.d != 4 {
        return Err(Error::NonFourDimensional(sig.d));
    }
    let base = euclidean_gammas();
    let gammas: [CMat; 4] = std::array::from_fn(|mu| {
        if mu < sig.p {
            base[mu].clone()
        } else {
            &base[mu] * I
        }
    });
    let prod = &gammas[0] * &gammas[1] * &gammas[2] * &gammas[3];
    let chirality = prod * sig.sigma_eta;

    let eps = sig.eps as f64;
    let eps1 = sig.eps_prime as f64;
    let eps2 = sig.eps_dblprime as f64;
    let s = pauli();
    for a in 0..4 {
        for b in 0..4 {
            let u = kron(&s[a], &s[b]);
            let ok_sq = max_abs_diff(&(&u * conj(&u)), &(eye(4) * c(eps, 0.0))) < CONJ_TOL;
            let ok_g = gammas
                .iter()
                .all(|g| max_abs(&(&u * conj(g) - g * &u * c(eps1, 0.0))) < CONJ_TOL);
            let ok_chi = max_abs(&(&u * conj(&chirality) - &chirality * &u * c(eps2, 0.0))) < CONJ_TOL;
            if ok_sq && ok_g && ok_chi {
                return Ok(CliffordModule {
                    signature: sig.clone(),
                    dim_v: 4,
                    gammas,
                    chirality,
                    conj_unitary: u,
                });
            }
        }
    }
    Err(Error::ConjugationNotFound { p: sig.p, q: sig.q })
}

pub fn gamma_product(module: &CliffordModule, idx: MultiIndex) -> CMat {
    match idx {
        MultiIndex::Single(mu) => module.gammas[mu].clone(),
        MultiIndex::Hat(mu) => {
            let mut out = eye(module.dim_v);
            for nu in (0..4).filter(|&nu| nu != mu) {
                out *= &module.gammas[nu];
            }
            out
        }
    }
}

pub fn trace4(sig: &Signature, mu: usize, nu: usize, alpha: usize, rho: usize) -> f64 {
    let eta = |a, b| sig.eta(a, b);
    4.0 * (eta(mu, nu) * eta(alpha, rho) - eta(mu, alpha) * eta(nu, rho) + eta(mu, rho) * eta(nu, alpha))
}

/// 1 when the four indices are a permutation of 0..3, else 0.
pub fn delta4(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let mut seen = [false; 4];
    for x in [a, b, c, d] {
        if x > 3 || seen[x] {
            return 0.0;
        }
        seen[x] = true;
    }
    1.0
}

pub fn sgn(x: i64) -> f64 {
    (x.signum()) as f64
}

/// Maximum entrywise deviations of the gamma-algebra identities.
#[derive(Clone, Debug, Default, Serialize)]
pub struct GammaReport {
    pub anticommutation: f64,
    pub unitarity: f64,
    pub adjoint_type: f64,
    pub chirality: f64,
    pub charge_conjugation: f64,
    pub gammas13: f64,
    pub gammas13b: f64,
    pub gammas13c: f64,
    pub triples: f64,
    pub trace4: f64,
    pub odd_traces: f64,
}

impl GammaReport {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("clifford_anticommutation", self.anticommutation),
            ("gamma_unitarity", self.unitarity),
            ("gamma_adjoint_type", self.adjoint_type),
            ("chirality", self.chirality),
            ("charge_conjugation_signs", self.charge_conjugation),
            ("gamma_mu_gamma_hat_nu", self.gammas13),
            ("gamma_hat_mu_gamma_mu", self.gammas13b),
            ("gamma_hat_nu_gamma_mu_commute", self.gammas13c),
            ("gamma_hat_triples", self.triples),
            ("trace_four_gammas", self.trace4),
            ("odd_gamma_traces", self.odd_traces),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().iter().fold(0.0, |m, (_, v)| m.max(*v))
    }
}

pub fn verify_gamma_identities(module: &CliffordModule) -> GammaReport {
    let sig = &module.signature;
    let g = &module.gammas;
    let chi = &module.chirality;
    let one = eye(module.dim_v);
    let r = |x: f64| c(x, 0.0);
    let mut rep = GammaReport::default();

    for mu in 0..4 {
        for nu in 0..4 {
            let ac = &g[mu] * &g[nu] + &g[nu] * &g[mu];
            rep.anticommutation = rep.anticommutation.max(max_abs_diff(&ac, &(&one * r(2.0 * sig.eta(mu, nu)))));
        }
        rep.unitarity = rep.unitarity.max(max_abs_diff(&(dagger(&g[mu]) * &g[mu]), &one));
        rep.adjoint_type = rep.adjoint_type.max(max_abs_diff(&dagger(&g[mu]), &(&g[mu] * r(sig.e_f(mu)))));
        rep.chirality = rep.chirality.max(max_abs(&(chi * &g[mu] + &g[mu] * chi)));
    }
    for idx in MultiIndex::all() {
        let gi = gamma_product(module, idx);
        let d = max_abs_diff(&dagger(&gi), &(&gi * r(idx.sign(sig) as f64)));
        rep.adjoint_type = rep.adjoint_type.max(d);
    }
    rep.chirality = rep
        .chirality
        .max(max_abs_diff(&dagger(chi), chi))
        .max(max_abs_diff(&(chi * chi), &one));

    let u = &module.conj_unitary;
    let mut cc = max_abs_diff(&(u * conj(u)), &(&one * r(sig.eps as f64)));
    for gm in g.iter() {
        cc = cc.max(max_abs(&(u * conj(gm) - gm * u * r(sig.eps_prime as f64))));
    }
    cc = cc.max(max_abs(&(u * conj(chi) - chi * u * r(sig.eps_dblprime as f64))));
    rep.charge_conjugation = cc;

    let vol = &g[0] * &g[1] * &g[2] * &g[3];
    for mu in 0..4 {
        let hat_mu = gamma_product(module, MultiIndex::Hat(mu));
        let pm = if mu % 2 == 0 { 1.0 } else { -1.0 };
        for nu in 0..4 {
            let hat_nu = gamma_product(module, MultiIndex::Hat(nu));
            // γ^μ γ^{ĥν}
            let mut rhs = if mu == nu { vol.clone() } else { one.clone() * r(0.0) };
            for alpha in 0..4 {
                for sigma in (alpha + 1)..4 {
                    let dl = delta4(mu, nu, alpha, sigma);
                    if dl != 0.0 {
                        let coef = sgn(nu as i64 - mu as i64) * dl * sig.e_f(mu);
                        rhs += &g[alpha] * &g[sigma] * r(coef);
                    }
                }
            }
            rhs *= r(pm);
            rep.gammas13 = rep.gammas13.max(max_abs_diff(&(&g[mu] * &hat_nu), &rhs));

            if nu != mu {
                let d = max_abs_diff(&(&hat_nu * &g[mu]), &(&g[mu] * &hat_nu));
                rep.gammas13c = rep.gammas13c.max(d);
            }

            // γ^{ĥμ} γ^{ĥν}
            let pm2 = if (1 + (mu as i64 - nu as i64).abs()) % 2 == 0 { 1.0 } else { -1.0 };
            let mut coef = 0.0;
            for lambda in 0..4 {
                for rho in 0..4 {
                    coef += 0.5 * delta4(mu, nu, lambda, rho) * sig.e_f(lambda) * sig.e_f(rho);
                }
            }
            let mut rhs3 = &g[mu] * &g[nu] * r(pm2 * coef);
            if mu == nu {
                rhs3 -= &one * r(sig.e_f(mu) * sig.det_eta());
            }
            rep.triples = rep.triples.max(max_abs_diff(&(&hat_mu * &hat_nu), &rhs3));
        }
        let d = max_abs_diff(&(&hat_mu * &g[mu]), &(-(&g[mu] * &hat_mu)));
        rep.gammas13b = rep.gammas13b.max(d);
    }

    for mu in 0..4 {
        rep.odd_traces = rep.odd_traces.max(g[mu].trace().norm());
        for nu in 0..4 {
            for rho in 0..4 {
                let t3 = &g[mu] * &g[nu] * &g[rho];
                rep.odd_traces = rep.odd_traces.max(t3.trace().norm());
                rep.odd_traces = rep.odd_traces.max((&t3 * chi).trace().norm());
                for alpha in 0..4 {
                    let t4 = (&t3 * &g[alpha]).trace();
                    let d = (t4 - r(trace4(sig, mu, nu, rho, alpha))).norm();
                    rep.trace4 = rep.trace4.max(d);
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sgn_vec(v: [i32; 4]) -> String {
        v.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect()
    }

    #[test]
    fn riemannian_signature() {
        let s = build_signature(0, 4).unwrap();
        assert_eq!(s.s, 4);
        assert_eq!((s.eps, s.eps_prime, s.eps_dblprime), (-1, 1, 1));
        assert_eq!(sgn_vec(s.e), "----");
        assert_eq!(sgn_vec(s.e_hat), "++++");
        assert_eq!(s.sigma_eta, -ONE);
    }

    #[test]
    fn lorentzian_signature() {
        let s = build_signature(1, 3).unwrap();
        assert_eq!(s.s, 2);
        assert_eq!((s.eps, s.eps_prime, s.eps_dblprime), (-1, 1, -1));
        assert_eq!(sgn_vec(s.e), "+---");
        assert_eq!(s.e_hat, s.e);
        assert_eq!(s.sigma_eta, I);
    }

    #[test]
    fn signature_three_one_and_phases() {
        let s = build_signature(3, 1).unwrap();
        assert_eq!(s.s, 6);
        assert_eq!((s.eps, s.eps_prime, s.eps_dblprime), (1, 1, -1));
        let phases: Vec<C64> = all_signatures().iter().map(|s| s.sigma_eta).collect();
        assert_eq!(phases, vec![-ONE, I, ONE, -I]);
    }

    #[test]
    fn rejects_other_dimensions() {
        assert!(matches!(build_signature(0, 2), Err(Error::NonFourDimensional(2))));
        assert!(matches!(build_signature(1, 4), Err(Error::NonFourDimensional(5))));
    }

    #[test]
    fn riemannian_gammas() {
        let m = build_gammas(&build_signature(0, 4).unwrap()).unwrap();
        for mu in 0..4 {
            assert!(max_abs_diff(&dagger(&m.gammas[mu]), &(-&m.gammas[mu])) < 1e-15);
        }
        assert!(max_abs_diff(&(&m.conj_unitary * conj(&m.conj_unitary)), &(-eye(4))) < 1e-15);
        assert!(max_abs_diff(&(&m.chirality * &m.chirality), &eye(4)) < 1e-15);
    }

    #[test]
    fn split_signature_types() {
        let m = build_gammas(&build_signature(2, 2).unwrap()).unwrap();
        for mu in 0..2 {
            assert!(max_abs_diff(&dagger(&m.gammas[mu]), &m.gammas[mu]) < 1e-15);
        }
        for mu in 2..4 {
            assert!(max_abs_diff(&dagger(&m.gammas[mu]), &(-&m.gammas[mu])) < 1e-15);
        }
    }

    #[test]
    fn hat_products() {
        let m = build_gammas(&build_signature(0, 4).unwrap()).unwrap();
        let h0 = gamma_product(&m, MultiIndex::Hat(0));
        assert!(max_abs_diff(&h0, &(&m.gammas[1] * &m.gammas[2] * &m.gammas[3])) < 1e-15);
        assert!(max_abs_diff(&dagger(&h0), &h0) < 1e-15);
        for mu in 0..4 {
            let h = gamma_product(&m, MultiIndex::Hat(mu));
            assert!(max_abs_diff(&(&h * &h), &eye(4)) < 1e-14);
        }
        let m13 = build_gammas(&build_signature(1, 3).unwrap()).unwrap();
        let h = gamma_product(&m13, MultiIndex::Hat(0));
        assert!(max_abs_diff(&dagger(&h), &h) < 1e-15);
        assert_eq!(gamma_product(&m13, MultiIndex::Single(2)), m13.gammas[2]);
    }

    #[test]
    fn trace4_examples() {
        let r = build_signature(0, 4).unwrap();
        let l = build_signature(1, 3).unwrap();
        assert_eq!(trace4(&r, 0, 1, 2, 3), 0.0);
        assert_eq!(trace4(&r, 0, 1, 1, 0), 4.0);
        assert_eq!(trace4(&l, 0, 0, 1, 1), -4.0);
        // explicit product oracle
        let m = build_gammas(&r).unwrap();
        let t = (&m.gammas[0] * &m.gammas[1] * &m.gammas[1] * &m.gammas[0]).trace();
        assert!((t - c(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn identities_hold_in_all_signatures() {
        for sig in all_signatures() {
            let m = build_gammas(&sig).unwrap();
            let rep = verify_gamma_identities(&m);
            for (name, v) in rep.entries() {
                assert!(v <= 1e-12, "{} {}: {}", sig.label(), name, v);
            }
        }
    }

    #[test]
    fn lorentzian_coefficient_of_volume_element() {
        // μ = ν in the γ^μ γ^{ĥν} expansion: γ^μ γ^{ĥμ} = (−1)^μ γ⁰γ¹γ²γ³
        let m = build_gammas(&build_signature(1, 3).unwrap()).unwrap();
        let vol = &m.gammas[0] * &m.gammas[1] * &m.gammas[2] * &m.gammas[3];
        for mu in 0..4 {
            let lhs = &m.gammas[mu] * gamma_product(&m, MultiIndex::Hat(mu));
            let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
            assert!(max_abs_diff(&lhs, &(&vol * c(sign, 0.0))) < 1e-14);
        }
    }

    #[test]
    fn riemannian_hat_square_is_one() {
        let sig = build_signature(0, 4).unwrap();
        for mu in 0..4 {
            assert_eq!(-sig.e_f(mu) * sig.det_eta(), 1.0);
        }
    }
}
