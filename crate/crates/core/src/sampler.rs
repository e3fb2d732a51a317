//! Metropolis sampling of the matrix model with weight `exp(−¼ Tr f(D_ω))`
//! over `(L_μ, A_μ, φ)`, and a one-matrix Gaussian self-test ensemble.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::action::{sectors, ActionBreakdown, ActionPolynomial};
use crate::dirac::{FuzzyData, GaugeTriple};
use crate::error::{Error, Result};
use crate::fluct::{assemble_fluctuated, Fluctuation, OneFormSpace};
use crate::clifford::CliffordModule;
use crate::linalg::{
    anti_hermitian_part, hermitian_eigenvalues, hermitian_part, max_abs, random_hermitian, remove_trace,
    self_adjoint_defect, zeros, CMat, I,
};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSizes {
    pub l: f64,
    pub a: f64,
    pub phi: f64,
}

impl Default for StepSizes {
    fn default() -> Self {
        StepSizes { l: 0.1, a: 0.1, phi: 0.1 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    #[default]
    YangMillsHiggs,
    /// One `N × N` Hermitian matrix with weight `exp(−Tr f(M))`.
    GaussianSelfTest,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n_base: usize,
    pub n: usize,
    pub poly: ActionPolynomial,
    /// Total steps, burn-in included.
    pub steps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub step_sizes: StepSizes,
    pub target_acceptance: (f64, f64),
    pub autotune: bool,
    pub seed: u64,
    pub histogram_bins: Option<usize>,
    pub ensemble: Ensemble,
}

impl SamplerConfig {
    pub fn new(n_base: usize, n: usize, poly: ActionPolynomial, seed: u64) -> Self {
        SamplerConfig {
            n_base,
            n,
            poly,
            steps: 10_000,
            burn_in: 1_000,
            thin: 1,
            step_sizes: StepSizes::default(),
            target_acceptance: (0.2, 0.6),
            autotune: true,
            seed,
            histogram_bins: None,
            ensemble: Ensemble::YangMillsHiggs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.steps < self.burn_in {
            return bad("steps must be at least burn_in");
        }
        if self.thin == 0 {
            return bad("thin must be at least 1");
        }
        let s = self.step_sizes;
        if !(s.l > 0.0 && s.a > 0.0 && s.phi > 0.0) {
            return bad("step sizes must be positive");
        }
        let (lo, hi) = self.target_acceptance;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return bad("target acceptance window must satisfy 0 < lo < hi < 1");
        }
        if self.n_base == 0 || self.n == 0 {
            return bad("matrix sizes must be positive");
        }
        if self.histogram_bins == Some(0) {
            return bad("histogram needs at least one bin");
        }
        self.poly.check_integrable()
    }
}

/// Eigenvalue histogram over a symmetric range `[−R, R]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn eigen_histogram(d: &CMat, bins: usize) -> Result<Histogram> {
    let defect = self_adjoint_defect(d);
    if defect > 1e-9 {
        return Err(Error::NotSelfAdjoint(defect));
    }
    if bins == 0 {
        return Err(Error::InvalidConfig("histogram needs at least one bin".into()));
    }
    let ev = hermitian_eigenvalues(d);
    Ok(histogram_of(&ev, bins))
}

pub fn histogram_of(values: &[f64], bins: usize) -> Histogram {
    let top = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // a small margin keeps the extreme eigenvalues off the outer edges
    let r = if top > 0.0 { 1.05 * top } else { 1.0 };
    let w = 2.0 * r / bins as f64;
    let edges = (0..=bins).map(|i| -r + w * i as f64).collect();
    let mut counts = vec![0; bins];
    for &x in values {
        let k = (((x + r) / w).floor() as isize).clamp(0, bins as isize - 1) as usize;
        counts[k] += 1;
    }
    Histogram { edges, counts }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleRecord {
    pub step: usize,
    pub total: f64,
    pub s_ym: f64,
    pub s_h: f64,
    pub s_gh: f64,
    pub s_theta: f64,
    /// Acceptance rate of all post-burn-in proposals so far.
    pub acceptance: f64,
    pub histogram: Option<Histogram>,
}

#[derive(Clone, Debug)]
pub struct ChainState {
    /// `L_μ ∈ su(N)`.
    pub l: [CMat; 4],
    /// `A_μ ∈ u(Nn)`.
    pub a: [CMat; 4],
    /// Hermitian Higgs matrix in `M_N ⊗ Ω¹_{D_F}`.
    pub phi: CMat,
    /// The single matrix of the self-test ensemble.
    pub m: CMat,
    pub current: ActionBreakdown,
    pub accept_count: usize,
}

impl ChainState {
    /// Largest violation of the moduli-space constraints.
    pub fn subspace_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for mu in 0..4 {
            d = d.max(max_abs(&(self.l[mu].adjoint() + &self.l[mu])));
            d = d.max(self.l[mu].trace().norm());
            d = d.max(max_abs(&(self.a[mu].adjoint() + &self.a[mu])));
        }
        d.max(max_abs(&(self.phi.adjoint() - &self.phi)))
            .max(max_abs(&(self.m.adjoint() - &self.m)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainOutput {
    pub records: Vec<SampleRecord>,
    /// Step sizes in force after burn-in.
    pub step_sizes: StepSizes,
    /// Post-burn-in acceptance per field group, `None` for unused groups.
    pub group_acceptance: GroupAcceptance,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GroupAcceptance {
    pub l: Option<f64>,
    pub a: Option<f64>,
    pub phi: Option<f64>,
}

const UNSTABLE: f64 = 1e12;
const TUNE_WINDOW: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Group {
    L,
    A,
    Phi,
    Matrix,
}

#[derive(Clone, Copy, Default)]
struct Counter {
    accepted: usize,
    attempted: usize,
}

impl Counter {
    fn rate(&self) -> Option<f64> {
        (self.attempted > 0).then(|| self.accepted as f64 / self.attempted as f64)
    }
}

struct Model<'a> {
    cfg: &'a SamplerConfig,
    template: &'a GaugeTriple,
    module: Option<&'a CliffordModule>,
    space: Option<OneFormSpace>,
}

impl Model<'_> {
    fn triple(&self, st: &ChainState) -> GaugeTriple {
        let sig = self.template.sig();
        let fz = FuzzyData {
            n_base: self.cfg.n_base,
            sig: sig.clone(),
            singles: std::array::from_fn(|mu| Some(st.l[mu].clone())),
            hats: Default::default(),
        };
        GaugeTriple::new(fz, self.template.finite.clone())
    }

    fn fluctuation(st: &ChainState) -> Fluctuation {
        Fluctuation { a: st.a.clone(), s: None, phi: st.phi.clone() }
    }

    fn evaluate(&self, st: &ChainState) -> Result<ActionBreakdown> {
        match self.cfg.ensemble {
            Ensemble::YangMillsHiggs => sectors(&self.triple(st), &Self::fluctuation(st), &self.cfg.poly),
            Ensemble::GaussianSelfTest => {
                let f = &self.cfg.poly;
                let mut total = 0.0;
                let mut p = crate::linalg::eye(st.m.nrows());
                for i in 1..=f.degree() {
                    p = &p * &st.m;
                    total += 0.5 * f.a(i) * p.trace().re;
                }
                Ok(ActionBreakdown { total_closed: total, ..Default::default() })
            }
        }
    }

    fn groups(&self) -> Vec<Group> {
        match self.cfg.ensemble {
            Ensemble::GaussianSelfTest => vec![Group::Matrix],
            Ensemble::YangMillsHiggs => {
                let mut g = vec![Group::L, Group::A];
                if self.space.as_ref().is_some_and(|s| s.dim() > 0) {
                    g.push(Group::Phi);
                }
                g
            }
        }
    }

    fn propose<R: Rng + ?Sized>(&self, st: &ChainState, group: Group, steps: &StepSizes, rng: &mut R) -> ChainState {
        let mut next = st.clone();
        let nb = self.cfg.n_base;
        let m = nb * self.cfg.n;
        match group {
            Group::L => {
                for mu in 0..4 {
                    let inc = remove_trace(&(random_hermitian(rng, nb, steps.l) * I));
                    next.l[mu] = remove_trace(&anti_hermitian_part(&(&st.l[mu] + inc)));
                }
            }
            Group::A => {
                for mu in 0..4 {
                    let inc = random_hermitian(rng, m, steps.a) * I;
                    next.a[mu] = anti_hermitian_part(&(&st.a[mu] + inc));
                }
            }
            Group::Phi => {
                let space = self.space.as_ref().expect("phi group needs a one-form space");
                let inc = random_hermitian(rng, m, steps.phi);
                next.phi = hermitian_part(&space.project(&(&st.phi + inc)));
            }
            Group::Matrix => {
                let inc = random_hermitian(rng, st.m.nrows(), steps.l);
                next.m = hermitian_part(&(&st.m + inc));
            }
        }
        next
    }

    fn record(&self, step: usize, st: &ChainState, acceptance: f64) -> Result<SampleRecord> {
        let histogram = match (self.cfg.histogram_bins, self.module, self.cfg.ensemble) {
            (Some(bins), Some(module), Ensemble::YangMillsHiggs) => {
                let d = assemble_fluctuated(&self.triple(st), &Self::fluctuation(st), module)?;
                Some(eigen_histogram(&d, bins)?)
            }
            (Some(bins), _, Ensemble::GaussianSelfTest) => Some(histogram_of(&hermitian_eigenvalues(&st.m), bins)),
            _ => None,
        };
        let c = &st.current;
        Ok(SampleRecord {
            step,
            total: c.total_closed,
            s_ym: c.s_ym,
            s_h: c.s_h,
            s_gh: c.s_gh,
            s_theta: c.s_theta,
            acceptance,
            histogram,
        })
    }
}

fn step_of(steps: &mut StepSizes, g: Group) -> &mut f64 {
    match g {
        Group::L | Group::Matrix => &mut steps.l,
        Group::A => &mut steps.a,
        Group::Phi => &mut steps.phi,
    }
}

fn group_slot(g: Group) -> usize {
    match g {
        Group::L | Group::Matrix => 0,
        Group::A => 1,
        Group::Phi => 2,
    }
}

/// Run one Metropolis chain. The template supplies the signature (must be
/// (0,4)), `D_F` and the starting `L_μ` (projected to `su(N)`); potentials
/// and Higgs start at zero. `module` is needed only for histograms.
pub fn run_chain(cfg: &SamplerConfig, template: &GaugeTriple, module: Option<&CliffordModule>) -> Result<ChainOutput> {
    cfg.validate()?;
    let sig = template.sig();
    if !sig.is_riemannian() {
        return Err(Error::NotRiemannian { p: sig.p, q: sig.q });
    }
    if !template.fuzzy.is_flat() {
        return Err(Error::NotFlat);
    }
    if template.fuzzy.n_base != cfg.n_base || template.finite.n != cfg.n {
        return Err(Error::DimensionMismatch("template sizes differ from the sampler configuration".into()));
    }
    let m = cfg.n_base * cfg.n;
    let space = (!template.yang_mills()).then(|| OneFormSpace::new(&template.finite.d_f, cfg.seed));
    let model = Model { cfg, template, module, space };

    let mut st = ChainState {
        l: std::array::from_fn(|mu| remove_trace(&anti_hermitian_part(&template.fuzzy.single_or_zero(mu)))),
        a: std::array::from_fn(|_| zeros(m)),
        phi: zeros(m),
        m: zeros(cfg.n_base),
        current: ActionBreakdown::default(),
        accept_count: 0,
    };
    st.current = model.evaluate(&st)?;

    let mut rng = seed::stream(cfg.seed, "chain", 0);
    let mut steps = cfg.step_sizes;
    let groups = model.groups();
    let mut window = [Counter::default(); 3];
    let mut post = [Counter::default(); 3];
    let mut records = Vec::new();

    for step in 0..cfg.steps {
        let burning = step < cfg.burn_in;
        for &g in &groups {
            let proposal = model.propose(&st, g, &steps, &mut rng);
            let mut next = proposal;
            next.current = model.evaluate(&next)?;
            let ds = next.current.total_closed - st.current.total_closed;
            let u: f64 = rng.gen();
            let accept = ds.is_finite() && (ds <= 0.0 || u < (-ds).exp());
            let slot = group_slot(g);
            let counter = if burning { &mut window[slot] } else { &mut post[slot] };
            counter.attempted += 1;
            if accept {
                counter.accepted += 1;
                next.accept_count = st.accept_count + 1;
                st = next;
            }
        }
        let total = st.current.total_closed;
        if !total.is_finite() || total.abs() > UNSTABLE {
            return Err(Error::UnstableAction(total));
        }
        if burning {
            if cfg.autotune && (step + 1) % TUNE_WINDOW == 0 {
                for &g in &groups {
                    let slot = group_slot(g);
                    if let Some(rate) = window[slot].rate() {
                        let s = step_of(&mut steps, g);
                        if rate > 0.5 {
                            *s *= 1.25;
                        } else if rate < 0.3 {
                            *s *= 0.8;
                        }
                    }
                    window[slot] = Counter::default();
                }
            }
        } else if (step - cfg.burn_in).is_multiple_of(cfg.thin) {
            let acc: usize = post.iter().map(|c| c.accepted).sum();
            let att: usize = post.iter().map(|c| c.attempted).sum();
            records.push(model.record(step, &st, acc as f64 / att.max(1) as f64)?);
        }
    }

    let rate = |g: Group| groups.contains(&g).then(|| post[group_slot(g)].rate()).flatten();
    let group_acceptance = match cfg.ensemble {
        Ensemble::GaussianSelfTest => GroupAcceptance { l: rate(Group::Matrix), ..Default::default() },
        Ensemble::YangMillsHiggs => GroupAcceptance { l: rate(Group::L), a: rate(Group::A), phi: rate(Group::Phi) },
    };
    Ok(ChainOutput { records, step_sizes: steps, group_acceptance, seed: cfg.seed })
}

/// Mean and batch-means standard error (`batches` equal batches; the tail
/// that does not fill a batch is dropped).
pub fn batch_means(xs: &[f64], batches: usize) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let b = batches.min(n);
    if b < 2 {
        return (mean, f64::NAN);
    }
    let size = n / b;
    let means: Vec<f64> = (0..b).map(|k| xs[k * size..(k + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let grand = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|x| (x - grand).powi(2)).sum::<f64>() / (b - 1) as f64;
    (mean, (var / b as f64).sqrt())
}

pub const BATCHES: usize = 20;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Observables {
    pub s_total: f64,
    pub s_ym: f64,
    pub s_h: f64,
    pub s_gh: f64,
    pub s_theta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub samples: usize,
    pub means: Observables,
    pub std_errors: Observables,
    pub acceptance: Option<f64>,
    pub group_acceptance: GroupAcceptance,
    pub step_sizes: StepSizes,
    pub seed: u64,
}

pub fn summarize(out: &ChainOutput) -> ChainSummary {
    let col = |f: fn(&SampleRecord) -> f64| -> Vec<f64> { out.records.iter().map(f).collect() };
    let stats = |xs: Vec<f64>| batch_means(&xs, BATCHES);
    let t = stats(col(|r| r.total));
    let ym = stats(col(|r| r.s_ym));
    let h = stats(col(|r| r.s_h));
    let gh = stats(col(|r| r.s_gh));
    let th = stats(col(|r| r.s_theta));
    ChainSummary {
        samples: out.records.len(),
        means: Observables { s_total: t.0, s_ym: ym.0, s_h: h.0, s_gh: gh.0, s_theta: th.0 },
        std_errors: Observables { s_total: t.1, s_ym: ym.1, s_h: h.1, s_gh: gh.1, s_theta: th.1 },
        acceptance: out.records.last().map(|r| r.acceptance),
        group_acceptance: out.group_acceptance.clone(),
        step_sizes: out.step_sizes,
        seed: out.seed,
    }
}

pub const CSV_HEADER: &str = "step,S_total,S_ym,S_h,S_gh,S_theta,acceptance";

pub fn records_to_csv(records: &[SampleRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{},{:e},{:e},{:e},{:e},{:e},{}\n",
            r.step, r.total, r.s_ym, r.s_h, r.s_gh, r.s_theta, r.acceptance
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{build_gammas, build_signature};
    use crate::dirac::{random_finite, random_fuzzy, FiniteData};
    use crate::linalg::{eye, kron};

    fn template(higgs: bool) -> GaugeTriple {
        let s = build_signature(0, 4).unwrap();
        let fin = if higgs { random_finite(2, 1) } else { FiniteData::trivial(2) };
        GaugeTriple::new(FuzzyData::zero(2, &s), fin)
    }

    fn quartic() -> ActionPolynomial {
        ActionPolynomial::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn zero_steps_give_no_records() {
        let mut cfg = SamplerConfig::new(2, 2, quartic(), 1);
        cfg.steps = 0;
        cfg.burn_in = 0;
        assert!(run_chain(&cfg, &template(false), None).unwrap().records.is_empty());
        cfg.steps = 50;
        cfg.burn_in = 50;
        assert!(run_chain(&cfg, &template(false), None).unwrap().records.is_empty());
    }

    #[test]
    fn config_validation() {
        let mut cfg = SamplerConfig::new(2, 2, quartic(), 1);
        cfg.thin = 0;
        assert!(cfg.validate().is_err());
        let cfg = SamplerConfig::new(2, 2, ActionPolynomial::new(vec![0.0, 1.0, 1.0]).unwrap(), 1);
        assert!(matches!(cfg.validate(), Err(Error::NonIntegrable(_))));
        let mut cfg = SamplerConfig::new(2, 2, quartic(), 1);
        cfg.burn_in = cfg.steps + 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_non_riemannian_template() {
        let s = build_signature(1, 3).unwrap();
        let gt = GaugeTriple::new(FuzzyData::zero(2, &s), FiniteData::trivial(2));
        let cfg = SamplerConfig::new(2, 2, quartic(), 1);
        assert!(matches!(run_chain(&cfg, &gt, None), Err(Error::NotRiemannian { .. })));
    }

    #[test]
    fn deterministic_and_on_subspace() {
        let mut cfg = SamplerConfig::new(2, 2, quartic(), 9);
        cfg.steps = 300;
        cfg.burn_in = 100;
        let gt = template(true);
        let a = run_chain(&cfg, &gt, None).unwrap();
        let b = run_chain(&cfg, &gt, None).unwrap();
        assert_eq!(records_to_csv(&a.records), records_to_csv(&b.records));
        assert_eq!(a.records.len(), 200);
        for r in &a.records {
            let sum = r.s_ym + r.s_h + r.s_gh + r.s_theta;
            assert!((sum - r.total).abs() <= 1e-9 * r.total.abs().max(1.0));
        }
        assert!(a.group_acceptance.phi.is_some());
    }

    #[test]
    fn proposals_stay_on_moduli_space() {
        let cfg = SamplerConfig::new(2, 2, quartic(), 3);
        let gt = template(true);
        let space = OneFormSpace::new(&gt.finite.d_f, 3);
        let model = Model { cfg: &cfg, template: &gt, module: None, space: Some(space) };
        let mut st = ChainState {
            l: std::array::from_fn(|_| zeros(2)),
            a: std::array::from_fn(|_| zeros(4)),
            phi: zeros(4),
            m: zeros(2),
            current: ActionBreakdown::default(),
            accept_count: 0,
        };
        let mut rng = seed::stream(3, "t", 0);
        for _ in 0..20 {
            for g in [Group::L, Group::A, Group::Phi] {
                st = model.propose(&st, g, &StepSizes { l: 0.5, a: 0.5, phi: 0.5 }, &mut rng);
            }
        }
        assert!(st.subspace_defect() <= 1e-12);
    }

    #[test]
    fn histogram_cases() {
        let h = eigen_histogram(&zeros(8), 5).unwrap();
        assert_eq!(h.counts, vec![0, 0, 8, 0, 0]);
        let s = build_signature(0, 4).unwrap();
        let m = build_gammas(&s).unwrap();
        let gt = GaugeTriple::new(random_fuzzy(2, &s, 0.7, 2, false), FiniteData::trivial(2));
        let d = assemble_fluctuated(&gt, &Fluctuation::zero(4), &m).unwrap();
        let h = eigen_histogram(&d, 1).unwrap();
        assert_eq!(h.counts, vec![64]);
        let h = eigen_histogram(&d, 7).unwrap();
        let rev: Vec<usize> = h.counts.iter().rev().copied().collect();
        assert_eq!(h.counts, rev);
        let g = kron(&m.chirality, &eye(16));
        assert!(max_abs(&(&d * &g + &g * &d)) < 1e-12);
    }

    #[test]
    fn batch_means_of_constant() {
        let (m, se) = batch_means(&[2.0; 100], 20);
        assert_eq!(m, 2.0);
        assert_eq!(se, 0.0);
        assert!(batch_means(&[], 20).0.is_nan());
    }
}
