//! Reference values checked against independent oracles such as a
//! hard-coded sign table or an analytic Gaussian moment.

use ncg_ymh::action::{sectors, spectral_action_direct, with_direct, ActionPolynomial};
use ncg_ymh::clifford::{all_signatures, build_gammas, build_signature, trace4};
use ncg_ymh::dirac::{assemble_product_dirac, random_fuzzy, FiniteData, FuzzyData, GaugeTriple};
use ncg_ymh::fluct::{assemble_fluctuated, Fluctuation};
use ncg_ymh::linalg::{c, eye, kron, max_abs, zeros, C64};
use ncg_ymh::sampler::{batch_means, eigen_histogram, run_chain, Ensemble, SamplerConfig};
use ncg_ymh::Error;

type SignRow = ((usize, usize), usize, (i32, i32, i32), C64);

#[test]
fn ko_sign_table() {
    // (p, q) -> s, (ε, ε′, ε″), σ(η)
    let table: [SignRow; 4] = [
        ((0, 4), 4, (-1, 1, 1), c(-1.0, 0.0)),
        ((1, 3), 2, (-1, 1, -1), c(0.0, 1.0)),
        ((2, 2), 0, (1, 1, 1), c(1.0, 0.0)),
        ((3, 1), 6, (1, 1, -1), c(0.0, -1.0)),
    ];
    for ((p, q), s, eps, sigma) in table {
        let sig = build_signature(p, q).unwrap();
        assert_eq!(sig.s, s);
        assert_eq!((sig.eps, sig.eps_prime, sig.eps_dblprime), eps, "({p},{q})");
        assert_eq!(sig.sigma_eta, sigma);
        for mu in 0..4 {
            assert_eq!(sig.e[mu], if mu < p { 1 } else { -1 });
            assert_eq!(sig.e_hat[mu], sig.e[mu] * if q % 2 == 0 { -1 } else { 1 });
        }
    }
    assert!(matches!(build_signature(1, 4), Err(Error::NonFourDimensional(5))));
}

#[test]
fn spinor_conjugation_squares_to_eps() {
    for sig in all_signatures() {
        let m = build_gammas(&sig).unwrap();
        let cc = &m.conj_unitary * m.conj_unitary.map(|z| z.conj());
        assert!(max_abs(&(cc - eye(4) * c(sig.eps as f64, 0.0))) < 1e-14);
    }
}

#[test]
fn trace4_against_metric_contractions() {
    // Tr(γ^μγ^νγ^αγ^ρ) = 4(η^{μν}η^{αρ} − η^{μα}η^{νρ} + η^{μρ}η^{να}); with four distinct
    // indices the product is a multiple of the traceless chirality
    for sig in all_signatures() {
        let eta = |a: usize, b: usize| if a == b { sig.e[a] as f64 } else { 0.0 };
        for t in 0..256usize {
            let (mu, nu, al, rho) = (t & 3, (t >> 2) & 3, (t >> 4) & 3, (t >> 6) & 3);
            let expected = 4.0 * (eta(mu, nu) * eta(al, rho) - eta(mu, al) * eta(nu, rho) + eta(mu, rho) * eta(nu, al));
            assert_eq!(trace4(&sig, mu, nu, al, rho), expected);
        }
    }
}

#[test]
fn zero_data_gives_zero_everything() {
    let sig = build_signature(0, 4).unwrap();
    let m = build_gammas(&sig).unwrap();
    let gt = GaugeTriple::new(FuzzyData::zero(2, &sig), FiniteData::trivial(2));
    let d = assemble_product_dirac(&gt, &m).unwrap();
    assert_eq!(d.nrows(), 64);
    assert_eq!(max_abs(&d), 0.0);
    let f = ActionPolynomial::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
    let br = with_direct(sectors(&gt, &Fluctuation::zero(4), &f).unwrap(), &gt, &Fluctuation::zero(4), &m, &f).unwrap();
    assert_eq!([br.s_ym, br.s_h, br.s_gh, br.s_theta, br.total_closed], [0.0; 5]);
    assert_eq!(br.total_direct, Some(0.0));
    let h = eigen_histogram(&d, 1).unwrap();
    assert_eq!(h.counts, vec![64]);
}

#[test]
fn spectral_action_of_scalar_operator() {
    // D = λ·1 on a 64-dimensional space: ¼·64·f(λ)
    let f = ActionPolynomial::new(vec![0.5, 1.0, -0.25, 2.0]).unwrap();
    let lam = 0.75;
    let d = eye(64) * c(lam, 0.0);
    let expected = 0.25 * 64.0 * 0.5 * (0.5 * lam + lam.powi(2) - 0.25 * lam.powi(3) + 2.0 * lam.powi(4));
    assert!((spectral_action_direct(&d, &f).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn gaussian_self_test_second_moment() {
    // exp(−Tr M²) over 2×2 Hermitian M: ⟨Tr M²⟩ = N²/2
    let mut cfg = SamplerConfig::new(2, 1, ActionPolynomial::new(vec![0.0, 2.0]).unwrap(), 11);
    cfg.ensemble = Ensemble::GaussianSelfTest;
    cfg.steps = 60_000;
    cfg.burn_in = 5_000;
    let sig = build_signature(0, 4).unwrap();
    let gt = GaugeTriple::new(FuzzyData::zero(2, &sig), FiniteData::trivial(1));
    let out = run_chain(&cfg, &gt, None).unwrap();
    let xs: Vec<f64> = out.records.iter().map(|r| r.total).collect();
    let (mean, se) = batch_means(&xs, 20);
    assert!((mean - 2.0).abs() < 4.0 * se, "mean {mean} se {se}");
    let acc = out.records.last().unwrap().acceptance;
    assert!((0.2..=0.6).contains(&acc), "{acc}");
}

#[test]
fn chiral_spectrum_pairs() {
    let sig = build_signature(0, 4).unwrap();
    let m = build_gammas(&sig).unwrap();
    let gt = GaugeTriple::new(random_fuzzy(3, &sig, 0.6, 4, false), FiniteData::trivial(2));
    let fl = ncg_ymh::fluct::random_fluctuation(&gt, 0.3, 4, false);
    let d = assemble_fluctuated(&gt, &fl, &m).unwrap();
    let g = kron(&m.chirality, &eye(36));
    assert!(max_abs(&(&d * &g + &g * &d)) < 1e-12);
    let ev = ncg_ymh::linalg::hermitian_eigenvalues(&d);
    let n = ev.len();
    for i in 0..n {
        assert!((ev[i] + ev[n - 1 - i]).abs() < 1e-10);
    }
    assert_eq!(zeros(1).nrows(), 1);
}
