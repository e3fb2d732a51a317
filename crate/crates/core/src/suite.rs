//! The identity suite behind `verify`: every algebraic identity evaluated
//! against brute force, one named check per line, grouped by signature.

use serde::{Deserialize, Serialize};

use crate::action::{
    gauge_higgs_identity, odd_traces, sectors, trace_d2_closed, trace_d4_closed, weitzenbock_flat, weitzenbock_full,
    with_direct, ActionPolynomial,
};
use crate::clifford::{build_gammas, verify_gamma_identities, CliffordModule, Signature};
use crate::dirac::{
    assemble_fuzzy_dirac, assemble_product_dirac, check_axioms, default_scale, lichnerowicz_rhs,
    lichnerowicz_rhs_as_printed, random_finite, random_fuzzy, FiniteData, FuzzyData, GaugeTriple, RealStructure,
};
use crate::error::Result;
use crate::fluct::{
    assemble_fluctuated, connes_one_form, extract_fluctuation, fluctuate, higgs_conjugation_sign, random_fluctuation,
    Fluctuation,
};
use crate::gauge::{covariance_report, random_unitary, transform, GaugeElement};
use crate::linalg::{frob, gaussian_matrix, hermitian_part, max_abs_diff, rel_frob, rel_scalar, I};
use crate::seed::{child_seed, stream};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Reported but excluded from the overall verdict.
    pub informational: bool,
}

impl Check {
    fn new(name: &str, deviation: f64, tolerance: f64) -> Self {
        Check { name: name.to_string(), deviation, tolerance, pass: deviation <= tolerance, informational: false }
    }

    fn info(name: &str, deviation: f64, tolerance: f64) -> Self {
        Check { informational: true, ..Check::new(name, deviation, tolerance) }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Section {
    pub signature: String,
    pub p: usize,
    pub q: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Section {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub sections: Vec<Section>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new(seed: u64, sections: Vec<Section>) -> Self {
        let pass = sections.iter().all(|s| s.pass);
        VerifyReport { seed, sections, pass }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Finite dimension `n`.
    pub n: usize,
    /// Base sizes used for the Lichnerowicz check.
    pub lichnerowicz_sizes: Vec<usize>,
    pub lichnerowicz_seeds: usize,
    pub dual_path_seeds: usize,
    /// Base sizes for the trace lemmas (Hilbert dimension `4N²n²`).
    pub trace_sizes: Vec<usize>,
    pub action_seeds: usize,
    pub gauge_unitaries: usize,
    /// Coefficients `a_1, a_2, …` of the test polynomial.
    pub poly: Vec<f64>,
    pub field_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            n: 2,
            lichnerowicz_sizes: vec![2, 3],
            lichnerowicz_seeds: 5,
            dual_path_seeds: 10,
            trace_sizes: vec![2, 3, 4],
            action_seeds: 20,
            gauge_unitaries: 10,
            poly: vec![0.3, 1.0, -0.2, 0.7],
            field_scale: 0.4,
        }
    }
}

pub const TOL_CLIFFORD: f64 = 1e-12;
pub const TOL_OPERATOR: f64 = 1e-10;
pub const TOL_TRACE: f64 = 1e-9;

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    sig: &'a Signature,
    module: CliffordModule,
}

impl Ctx<'_> {
    fn seed(&self, tag: &str, idx: u64) -> u64 {
        child_seed(self.cfg.seed, &format!("{tag}/{}", self.sig.label()), idx)
    }

    fn triple(&self, nb: usize, seed: u64, with_x: bool, higgs: bool) -> GaugeTriple {
        let fin = if higgs { random_finite(self.cfg.n, seed) } else { FiniteData::trivial(self.cfg.n) };
        GaugeTriple::new(random_fuzzy(nb, self.sig, default_scale(nb), seed, with_x), fin)
    }
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m: f64 = 0.0;
    for x in it {
        let x = x?;
        // NaN must not be swallowed by f64::max
        m = if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) };
    }
    Ok(m)
}

fn clifford_checks(ctx: &Ctx, out: &mut Vec<Check>) {
    for (name, dev) in verify_gamma_identities(&ctx.module).entries() {
        out.push(Check::new(name, dev, TOL_CLIFFORD));
    }
}

fn axiom_checks(ctx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let mut rng = stream(ctx.seed("axioms", 0), "pairs", 0);
    let ym = check_axioms(&ctx.triple(2, ctx.seed("axioms", 1), true, false), &ctx.module, &mut rng)?;
    let hg = check_axioms(&ctx.triple(2, ctx.seed("axioms", 2), false, true), &ctx.module, &mut rng)?;
    out.push(Check::new("axiom_order_one", ym.order_one.max(hg.order_one), TOL_OPERATOR));
    out.push(Check::new("axiom_commutant", ym.commutant.max(hg.commutant), TOL_OPERATOR));
    out.push(Check::new("axiom_j_squared", ym.j_squared, TOL_OPERATOR));
    out.push(Check::new("axiom_j_gamma", ym.j_gamma, TOL_OPERATOR));
    out.push(Check::new("axiom_j_d", ym.j_d, TOL_OPERATOR));
    out.push(Check::new("axiom_d_gamma", ym.d_gamma.unwrap_or(f64::NAN), TOL_OPERATOR));
    out.push(Check::info("axiom_j_d_with_finite_dirac", hg.j_d, TOL_OPERATOR));
    let (s, res) = higgs_conjugation_sign(&ctx.module, 2 * ctx.cfg.n, ctx.seed("higgs-sign", 0));
    let dev = if s == ctx.sig.eps_dblprime { res } else { f64::INFINITY };
    out.push(Check::new("higgs_conjugation_sign", dev, TOL_OPERATOR));
    Ok(())
}

fn lichnerowicz_checks(ctx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let mut corrected: f64 = 0.0;
    let mut printed: f64 = 0.0;
    for &nb in &ctx.cfg.lichnerowicz_sizes {
        for k in 0..ctx.cfg.lichnerowicz_seeds {
            let fz = random_fuzzy(nb, ctx.sig, default_scale(nb), ctx.seed("lichnerowicz", k as u64), true);
            let d = assemble_fuzzy_dirac(&fz, &ctx.module)?;
            let d2 = &d * &d;
            let scale = frob(&d2);
            corrected = corrected.max(frob(&(&d2 - lichnerowicz_rhs(&fz, &ctx.module)?)) / scale);
            printed = printed.max(frob(&(&d2 - lichnerowicz_rhs_as_printed(&fz, &ctx.module)?)) / scale);
        }
    }
    out.push(Check::new("lichnerowicz", corrected, TOL_OPERATOR));
    out.push(Check::info("lichnerowicz_as_printed", printed, TOL_OPERATOR));
    Ok(())
}

fn dual_path_checks(ctx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let mut worst: f64 = 0.0;
    let mut types: f64 = 0.0;
    for k in 0..ctx.cfg.dual_path_seeds {
        let seed = ctx.seed("dual-path", k as u64);
        // alternate Yang-Mills and Higgs data, X always on
        let gt = ctx.triple(2, seed, true, k % 2 == 1);
        let m = gt.m();
        let d = assemble_product_dirac(&gt, &ctx.module)?;
        let j = RealStructure::new(&ctx.module, m);
        let mut rng = stream(seed, "pairs", 0);
        let pairs: Vec<_> =
            (0..3).map(|_| (gaussian_matrix(&mut rng, m, m, 1.0), gaussian_matrix(&mut rng, m, m, 1.0))).collect();
        let omega = hermitian_part(&connes_one_form(&gt, &ctx.module, &pairs)?);
        let via_forms = fluctuate(&d, &omega, &j, ctx.sig.eps_prime, false)?;
        let (fl, residual) = extract_fluctuation(&omega, &gt, &ctx.module)?;
        let closed = assemble_fluctuated(&gt, &fl, &ctx.module)?;
        worst = worst.max(rel_frob(&closed, &via_forms)).max(residual);
        types = types.max(fl.type_defect(&gt));
    }
    out.push(Check::new("fluctuation_dual_path", worst, TOL_OPERATOR));
    out.push(Check::new("fluctuation_adjoint_types", types, TOL_OPERATOR));
    Ok(())
}

fn weitzenbock_full_check(ctx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let dev = max_of((0..ctx.cfg.lichnerowicz_seeds).map(|k| {
        let seed = ctx.seed("weitzenbock-full", k as u64);
        let gt = ctx.triple(2, seed, true, false);
        let fl = random_fluctuation(&gt, ctx.cfg.field_scale, seed, true);
        let d = assemble_fluctuated(&gt, &fl, &ctx.module)?;
        Ok(rel_frob(&weitzenbock_full(&gt, &fl, &ctx.module)?, &(&d * &d)))
    }))?;
    out.push(Check::new("weitzenbock_full", dev, TOL_OPERATOR));
    Ok(())
}

/// Checks that need flat Riemannian data.
fn riemannian_checks(ctx: &Ctx, out: &mut Vec<Check>) -> Result<()> {
    let cfg = ctx.cfg;
    let f = ActionPolynomial::new(cfg.poly.clone())?;
    let data = |tag: &str, k: usize, nb: usize, higgs: bool| {
        let seed = ctx.seed(tag, k as u64);
        let gt = ctx.triple(nb, seed, false, higgs);
        let fl = random_fluctuation(&gt, cfg.field_scale, seed, false);
        (gt, fl)
    };

    for (name, higgs) in [("weitzenbock_flat", false), ("weitzenbock_flat_higgs", true)] {
        let dev = max_of((0..cfg.lichnerowicz_seeds).map(|k| {
            let (gt, fl) = data(name, k, 2, higgs);
            let d = assemble_fluctuated(&gt, &fl, &ctx.module)?;
            Ok(rel_frob(&weitzenbock_flat(&gt, &fl, &ctx.module)?, &(&d * &d)))
        }))?;
        out.push(Check::new(name, dev, TOL_OPERATOR));
    }

    let mut t2: f64 = 0.0;
    let mut t4: f64 = 0.0;
    let mut gh: f64 = 0.0;
    let mut gh_printed: f64 = 0.0;
    for (k, &nb) in cfg.trace_sizes.iter().enumerate() {
        for higgs in [false, true] {
            let (gt, fl) = data("trace-lemmas", 2 * k + higgs as usize, nb, higgs);
            let d = assemble_fluctuated(&gt, &fl, &ctx.module)?;
            let d2 = &d * &d;
            t2 = t2.max(rel_scalar(trace_d2_closed(&gt, &fl)?, 0.25 * d2.trace().re));
            t4 = t4.max(rel_scalar(trace_d4_closed(&gt, &fl)?, 0.25 * (&d2 * &d2).trace().re));
            if higgs {
                let id = gauge_higgs_identity(&gt, &fl, f.a(4).max(1.0))?;
                gh = gh.max(rel_scalar(id.lhs, id.rhs + 2.0 * id.a4_tr_phi2_theta));
                gh_printed = gh_printed.max(rel_scalar(id.lhs, id.rhs));
            }
        }
    }
    out.push(Check::new("trace_d2_closed_form", t2, TOL_TRACE));
    out.push(Check::new("trace_d4_closed_form", t4, TOL_TRACE));
    out.push(Check::new("gauge_higgs_identity_corrected", gh, TOL_OPERATOR));
    out.push(Check::info("gauge_higgs_identity_as_printed", gh_printed, TOL_OPERATOR));

    let mut sum_dev: f64 = 0.0;
    let mut odd: f64 = 0.0;
    let mut negative: f64 = 0.0;
    let positivity_applies = f.a(2) >= 0.0 && f.a(4) >= 0.0;
    for k in 0..cfg.action_seeds {
        let (gt, fl) = data("sectors", k, 2, k % 2 == 1);
        let br = with_direct(sectors(&gt, &fl, &f)?, &gt, &fl, &ctx.module, &f)?;
        sum_dev = sum_dev.max(rel_scalar(br.total_closed, br.total_direct.unwrap_or(f64::NAN)));
        let d = assemble_fluctuated(&gt, &fl, &ctx.module)?;
        let (t1, t3) = odd_traces(&d);
        let norm = frob(&d);
        if norm > 0.0 {
            odd = odd.max(t1 / (norm * (d.nrows() as f64).sqrt())).max(t3 / norm.powi(3));
        }
        negative = negative.max(-br.s_theta.min(br.s_ym).min(br.s_h));
    }
    out.push(Check::new("sector_sum_equals_spectral_action", sum_dev, TOL_TRACE));
    out.push(Check::new("odd_traces_vanish", odd, TOL_TRACE));
    if positivity_applies {
        out.push(Check::new("sector_positivity", negative.max(0.0), TOL_OPERATOR));
    }

    let mut fs: f64 = 0.0;
    let mut act: f64 = 0.0;
    let mut act_higgs: f64 = 0.0;
    for k in 0..cfg.gauge_unitaries {
        let seed = ctx.seed("gauge", k as u64);
        let g = random_unitary(2, cfg.n, k % 2 == 0, seed);
        let (gt, fl) = data("gauge", k, 2, false);
        let rep = covariance_report(&gt, &fl, &g, &ctx.module, &f)?;
        fs = fs.max(rep.field_strength);
        act = act.max(rep.action);
        let (gth, flh) = data("gauge-higgs", k, 2, true);
        act_higgs = act_higgs.max(covariance_report(&gth, &flh, &g, &ctx.module, &f)?.action);
    }
    out.push(Check::new("gauge_field_strength_covariance", fs, TOL_OPERATOR));
    out.push(Check::new("gauge_action_invariance", act, TOL_TRACE));
    out.push(Check::info("gauge_action_invariance_with_higgs", act_higgs, TOL_TRACE));

    let (gt, fl) = data("central", 0, 2, false);
    let flu = transform(&gt, &fl, &GaugeElement::central(2, cfg.n, I))?;
    let central = (0..4).map(|mu| max_abs_diff(&flu.a[mu], &fl.a[mu])).fold(0.0, f64::max);
    out.push(Check::new("gauge_central_trivial", central, 0.0));
    let empty = GaugeTriple::new(FuzzyData::zero(2, ctx.sig), FiniteData::trivial(cfg.n));
    let br = sectors(&empty, &Fluctuation::zero(empty.m()), &f)?;
    let zero = [br.s_ym, br.s_h, br.s_gh, br.s_theta, br.total_closed].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    out.push(Check::new("zero_data_sectors", zero, 0.0));
    Ok(())
}

/// Run the whole suite for one signature.
pub fn run_signature(sig: &Signature, cfg: &SuiteConfig) -> Result<Section> {
    let module = build_gammas(sig)?;
    let ctx = Ctx { cfg, sig, module };
    let mut checks = Vec::new();
    clifford_checks(&ctx, &mut checks);
    axiom_checks(&ctx, &mut checks)?;
    lichnerowicz_checks(&ctx, &mut checks)?;
    dual_path_checks(&ctx, &mut checks)?;
    weitzenbock_full_check(&ctx, &mut checks)?;
    if sig.is_riemannian() {
        riemannian_checks(&ctx, &mut checks)?;
    }
    let pass = checks.iter().all(|c| c.pass || c.informational);
    Ok(Section { signature: sig.label(), p: sig.p, q: sig.q, checks, pass })
}
