//! `RunConfig`: one JSON document describing geometry, fields, the action
//! polynomial, sampler settings and outputs. Every key has a default, so an
//! empty object `{}` is a valid configuration.

use std::path::{Path, PathBuf};

use ncg_ymh::action::ActionPolynomial;
use ncg_ymh::clifford::{build_signature, Signature};
use ncg_ymh::dirac::{default_scale, random_finite, random_fuzzy, FiniteData, FuzzyData, GaugeTriple};
use ncg_ymh::fluct::{random_fluctuation, Fluctuation, OneFormSpace};
use ncg_ymh::io::MatrixJson;
use ncg_ymh::sampler::{SamplerConfig, StepSizes};
use ncg_ymh::suite::SuiteConfig;
use ncg_ymh::{CMat, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Verify,
    Spectrum,
    Action,
    Sample,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Informational; the subcommand decides what runs.
    pub mode: Option<Mode>,
    pub seed: u64,
    pub geometry: Geometry,
    pub fields: FieldSource,
    /// `a_1, a_2, …` with `f(x) = ½ Σ a_i xⁱ`.
    pub poly: Vec<f64>,
    pub sampler: SamplerBlock,
    pub suite: SuiteConfig,
    pub output: Output,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: None,
            seed: 0,
            geometry: Geometry::default(),
            fields: FieldSource::default(),
            poly: vec![0.0, 1.0, 0.0, 1.0],
            sampler: SamplerBlock::default(),
            suite: SuiteConfig::default(),
            output: Output::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub p: usize,
    pub q: usize,
    #[serde(rename = "N")]
    pub n_base: usize,
    pub n: usize,
    pub fuzzy: FuzzySource,
    pub d_f: FiniteSource,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry { p: 0, q: 4, n_base: 2, n: 2, fuzzy: FuzzySource::default(), d_f: FiniteSource::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum FuzzySource {
    Zero,
    Random {
        /// Defaults to `1/√N`.
        #[serde(default)]
        scale: Option<f64>,
        #[serde(default)]
        include_x: bool,
    },
    /// JSON file `{"singles": [M, M, M, M], "hats": [M | null, ...]}`.
    File { path: PathBuf },
}

impl Default for FuzzySource {
    fn default() -> Self {
        FuzzySource::Random { scale: None, include_x: false }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum FiniteSource {
    #[default]
    Zero,
    Random,
    /// A matrix JSON file holding the Hermitian `n × n` matrix `D_F`.
    File { path: PathBuf },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    Zero,
    Random {
        scale: f64,
        #[serde(default)]
        include_s: bool,
    },
    /// JSON file `{"a": [M; 4], "s": [M; 4] | null, "phi": M | null}`.
    File { path: PathBuf },
}

impl Default for FieldSource {
    fn default() -> Self {
        FieldSource::Random { scale: 0.4, include_s: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerBlock {
    pub steps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub step_sizes: StepSizes,
    pub target_acceptance: (f64, f64),
    pub autotune: bool,
    pub histogram_bins: Option<usize>,
}

impl Default for SamplerBlock {
    fn default() -> Self {
        SamplerBlock {
            steps: 10_000,
            burn_in: 1_000,
            thin: 1,
            step_sizes: StepSizes::default(),
            target_acceptance: (0.2, 0.6),
            autotune: true,
            histogram_bins: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
    /// Emit an eigenvalue histogram next to the spectrum CSV.
    pub histogram_bins: Option<usize>,
}

impl Default for Output {
    fn default() -> Self {
        Output { dir: PathBuf::from("."), histogram_bins: None }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FuzzyFile {
    singles: [Option<MatrixJson>; 4],
    #[serde(default)]
    hats: [Option<MatrixJson>; 4],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldsFile {
    a: [MatrixJson; 4],
    #[serde(default)]
    s: Option<[MatrixJson; 4]>,
    #[serde(default)]
    phi: Option<MatrixJson>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn opt_matrix(m: &Option<MatrixJson>) -> Result<Option<CMat>> {
    m.as_ref().map(MatrixJson::to_matrix).transpose()
}

impl RunConfig {
    /// Load from `path`; relative file references are resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let FuzzySource::File { path } = &mut cfg.geometry.fuzzy {
            fix(path);
        }
        if let FiniteSource::File { path } = &mut cfg.geometry.d_f {
            fix(path);
        }
        if let FieldSource::File { path } = &mut cfg.fields {
            fix(path);
        }
        Ok(cfg)
    }

    pub fn signature(&self) -> Result<Signature> {
        build_signature(self.geometry.p, self.geometry.q)
    }

    pub fn polynomial(&self) -> Result<ActionPolynomial> {
        ActionPolynomial::new(self.poly.clone())
    }

    /// Structural checks that do not need any file contents.
    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if g.n_base == 0 || g.n == 0 {
            return Err(Error::InvalidConfig("N and n must be positive".into()));
        }
        self.signature()?;
        self.polynomial()?;
        for (name, p) in [
            ("fuzzy", matches!(&g.fuzzy, FuzzySource::File { path } if !path.exists())),
            ("d_f", matches!(&g.d_f, FiniteSource::File { path } if !path.exists())),
            ("fields", matches!(&self.fields, FieldSource::File { path } if !path.exists())),
        ] {
            if p {
                return Err(Error::InvalidConfig(format!("{name} file does not exist")));
            }
        }
        Ok(())
    }

    pub fn triple(&self) -> Result<GaugeTriple> {
        let g = &self.geometry;
        let sig = self.signature()?;
        let fuzzy = match &g.fuzzy {
            FuzzySource::Zero => FuzzyData::zero(g.n_base, &sig),
            FuzzySource::Random { scale, include_x } => {
                let scale = scale.unwrap_or_else(|| default_scale(g.n_base));
                random_fuzzy(g.n_base, &sig, scale, self.seed, *include_x)
            }
            FuzzySource::File { path } => {
                let f: FuzzyFile = read_json(path)?;
                let conv = |ms: &[Option<MatrixJson>; 4]| -> Result<[Option<CMat>; 4]> {
                    Ok([opt_matrix(&ms[0])?, opt_matrix(&ms[1])?, opt_matrix(&ms[2])?, opt_matrix(&ms[3])?])
                };
                FuzzyData::new(g.n_base, &sig, conv(&f.singles)?, conv(&f.hats)?)
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
            }
        };
        let finite = match &g.d_f {
            FiniteSource::Zero => FiniteData::trivial(g.n),
            FiniteSource::Random => random_finite(g.n, self.seed),
            FiniteSource::File { path } => {
                let d_f = ncg_ymh::io::read_matrix(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
                if d_f.nrows() != g.n || d_f.ncols() != g.n {
                    return Err(Error::InvalidConfig(format!("D_F must be {0}x{0}", g.n)));
                }
                FiniteData::new(d_f).map_err(|e| Error::InvalidConfig(e.to_string()))?
            }
        };
        Ok(GaugeTriple::new(fuzzy, finite))
    }

    pub fn fluctuation(&self, gt: &GaugeTriple) -> Result<Fluctuation> {
        let m = gt.m();
        match &self.fields {
            FieldSource::Zero => Ok(Fluctuation::zero(m)),
            FieldSource::Random { scale, include_s } => Ok(random_fluctuation(gt, *scale, self.seed, *include_s)),
            FieldSource::File { path } => {
                let f: FieldsFile = read_json(path)?;
                let a = [f.a[0].to_matrix()?, f.a[1].to_matrix()?, f.a[2].to_matrix()?, f.a[3].to_matrix()?];
                let s = match &f.s {
                    Some(s) => Some([s[0].to_matrix()?, s[1].to_matrix()?, s[2].to_matrix()?, s[3].to_matrix()?]),
                    None => None,
                };
                let phi = opt_matrix(&f.phi)?.unwrap_or_else(|| ncg_ymh::linalg::zeros(m));
                let all = a.iter().chain(s.iter().flatten()).chain(std::iter::once(&phi));
                if all.into_iter().any(|x| x.nrows() != m || x.ncols() != m) {
                    return Err(Error::InvalidConfig(format!("field matrices must be {m}x{m} (N·n)")));
                }
                let fl = Fluctuation { a, s, phi };
                let defect = fl.type_defect(gt);
                if defect > 1e-9 {
                    return Err(Error::InvalidConfig(format!("fields violate their adjointness types by {defect:.3e}")));
                }
                let space = OneFormSpace::new(&gt.finite.d_f, self.seed);
                if space.leakage(&fl.phi) > 1e-9 {
                    return Err(Error::InvalidConfig("phi lies outside the one-form span of D_F".into()));
                }
                Ok(fl)
            }
        }
    }

    pub fn sampler_config(&self, self_test: bool) -> Result<SamplerConfig> {
        let g = &self.geometry;
        let s = &self.sampler;
        // the self-test ensemble is pinned to f(x) = x²
        let poly = if self_test { ActionPolynomial::new(vec![0.0, 2.0])? } else { self.polynomial()? };
        let cfg = SamplerConfig {
            n_base: g.n_base,
            n: g.n,
            poly,
            steps: s.steps,
            burn_in: s.burn_in,
            thin: s.thin,
            step_sizes: s.step_sizes,
            target_acceptance: s.target_acceptance,
            autotune: s.autotune,
            seed: self.seed,
            histogram_bins: s.histogram_bins,
            ensemble: if self_test {
                ncg_ymh::sampler::Ensemble::GaussianSelfTest
            } else {
                ncg_ymh::sampler::Ensemble::YangMillsHiggs
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.geometry.q, 4);
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.triple().unwrap().hilbert_dim(), 64);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"geometri": {}}"#).is_err());
    }

    #[test]
    fn bad_signature_is_config_error() {
        let cfg: RunConfig = serde_json::from_str(r#"{"geometry": {"p": 1, "q": 4}}"#).unwrap();
        let e = cfg.validate().unwrap_err();
        assert!(e.is_config());
        assert!(e.to_string().contains("NonFourDimensional"));
    }

    #[test]
    fn tagged_sources() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"geometry": {"N": 3, "fuzzy": {"source": "zero"}, "d_f": {"source": "random"}},
                "fields": {"source": "zero"}}"#,
        )
        .unwrap();
        let gt = cfg.triple().unwrap();
        assert!(!gt.yang_mills());
        assert_eq!(gt.hilbert_dim(), 4 * 36);
        assert_eq!(cfg.fluctuation(&gt).unwrap(), Fluctuation::zero(6));
    }
}
