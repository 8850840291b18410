//! TOML experiment configuration and system assembly.

use std::path::PathBuf;

use serde::Deserialize;

use crate::coeffalg::{c, AlgAutomorphism, AlgElement, AlgebraSpec, C64};
use crate::crossed::CcElement;
use crate::decay::WeightKind;
use crate::error::{Error, Result};
use crate::grp::{Group, LengthFunction};
use crate::system::{presets, Action, Cocycle, TwistedSystem};

pub const EXPERIMENTS: [&str; 11] = [
    "validate",
    "arithmetic-suite",
    "norms",
    "fejer",
    "abel-poisson",
    "approx-net",
    "decay-probe",
    "content-probe",
    "commutative-inequality",
    "ideals",
    "psl-preset",
];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: Option<u64>,
    #[serde(default)]
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub preset: Option<String>,
    pub theta: Option<f64>,
    pub n: Option<u32>,
    pub k: Option<i64>,
    /// Block sizes.
    pub algebra: Option<Vec<usize>>,
    pub group: Option<Group>,
    pub action: Option<ActionConfig>,
    pub cocycle: Option<CocycleConfig>,
    pub perturb: Option<PerturbConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ActionConfig {
    Trivial,
    /// One block permutation per group generator.
    Permutations { generators: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CocycleConfig {
    Trivial,
    Bicharacter { theta: Vec<Vec<f64>> },
    Section,
}

/// Multiply `σ(g, h)` by `exp(2πi·phase)` at one pair.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbConfig {
    pub g: String,
    pub h: String,
    pub phase: f64,
}

/// `value` holds interleaved real and imaginary parts of every block,
/// row-major, or a single real number for a multiple of the unit.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub at: String,
    pub value: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub schedule: Vec<usize>,
    pub rates: Vec<f64>,
    pub radii: Vec<f64>,
    pub radius: f64,
    pub length: Option<LengthFunction>,
    pub budget: usize,
    pub samples: usize,
    pub target_error: Option<f64>,
    pub eps: f64,
    pub element: Option<Vec<TermConfig>>,
    pub weight: WeightKind,
    pub validation_radius: f64,
    pub validation_cap: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            schedule: vec![2, 4, 8, 16],
            rates: vec![0.5, 0.9, 0.99, 0.999],
            radii: vec![1.0, 2.0, 4.0],
            radius: 2.0,
            length: None,
            budget: 40,
            samples: 100,
            target_error: None,
            eps: 1e-8,
            element: None,
            weight: WeightKind::Power { s: 2.0 },
            validation_radius: 2.0,
            validation_cap: 4000,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if !EXPERIMENTS.contains(&cfg.experiment.as_str()) {
            return Err(Error::Config(format!("unknown experiment tag `{}`", cfg.experiment)));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn seed(&self, overridden: Option<u64>) -> Result<u64> {
        overridden
            .or(self.seed)
            .ok_or_else(|| Error::Config("`seed` is mandatory (in the config or via --seed)".into()))
    }

    pub fn system(&self) -> Result<TwistedSystem> {
        match (&self.system, self.experiment.as_str()) {
            (None, "psl-preset") => Ok(presets::psl_model()),
            (None, _) => Err(Error::Config("missing [system] block".into())),
            (Some(s), _) => s.build(),
        }
    }
}

pub const PRESETS: [(&str, &str); 6] = [
    ("matrix-line", "ℤ acting on M₂ ⊕ ℂ by a fixed inner automorphism, trivial cocycle"),
    ("rotation-algebra", "ℤ², A = ℂ, σ(m, n) = exp(2πiθ m₂n₁); `theta` (default 0.2)"),
    ("cyclic-bicharacter", "ℤ_n, A = ℂ, σ(m, n) = exp(2πi·k·mn/n); `n` (12), `k` (1)"),
    ("cyclic-swap", "ℤ_n swapping the points of ℂ², bicharacter k/n; `n` (12, even), `k` (1)"),
    ("psl", "ℤ₂∗ℤ₃ with the ℂ²-valued section cocycle of SL(2,ℤ), trivial action"),
    ("dihedral-inner", "dihedral group of order 2n on M₂ by Ad of a projective lift; `n` (4)"),
];

impl SystemConfig {
    pub fn build(&self) -> Result<TwistedSystem> {
        let base = match &self.preset {
            Some(name) => self.preset(name)?,
            None => self.explicit()?,
        };
        match &self.perturb {
            None => Ok(base),
            Some(p) => {
                let pair = (base.group.parse(&p.g)?, base.group.parse(&p.h)?);
                let factor = C64::from_polar(1.0, std::f64::consts::TAU * p.phase);
                TwistedSystem::new(
                    base.algebra,
                    base.group,
                    base.action,
                    Cocycle::Perturbed { base: Box::new(base.cocycle), pair, factor },
                )
            }
        }
    }

    fn preset(&self, name: &str) -> Result<TwistedSystem> {
        if self.algebra.is_some() || self.group.is_some() || self.action.is_some() || self.cocycle.is_some() {
            return Err(Error::Config("a preset cannot be combined with explicit system fields".into()));
        }
        let n = self.n.unwrap_or(12);
        let k = self.k.unwrap_or(1);
        Ok(match name {
            "matrix-line" => presets::matrix_line(),
            "rotation-algebra" => presets::rotation_algebra(self.theta.unwrap_or(0.2)),
            "cyclic-bicharacter" => TwistedSystem::new(
                AlgebraSpec::scalar(),
                Group::cyclic(n),
                Action::Trivial,
                Cocycle::Bicharacter { theta: vec![vec![k as f64 / n as f64]] },
            )?,
            "cyclic-swap" => {
                if n % 2 != 0 {
                    return Err(Error::Config("cyclic-swap needs an even n".into()));
                }
                presets::cyclic_swap(n, k)
            }
            "psl" => presets::psl_model(),
            "dihedral-inner" => presets::dihedral_inner(self.n.unwrap_or(4)),
            other => return Err(Error::Config(format!("unknown preset `{other}`"))),
        })
    }

    fn explicit(&self) -> Result<TwistedSystem> {
        let blocks = self.algebra.clone().ok_or_else(|| Error::Config("missing `algebra`".into()))?;
        let algebra = AlgebraSpec::new(blocks)?;
        let group = self.group.clone().ok_or_else(|| Error::Config("missing `group`".into()))?;
        let action = match &self.action {
            None | Some(ActionConfig::Trivial) => Action::Trivial,
            Some(ActionConfig::Permutations { generators }) => Action::Generators(
                generators
                    .iter()
                    .map(|p| {
                        let ones = algebra.blocks().iter().map(|&d| nalgebra::DMatrix::identity(d, d)).collect();
                        AlgAutomorphism::new(&algebra, p.clone(), ones)
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        let cocycle = match &self.cocycle {
            None | Some(CocycleConfig::Trivial) => Cocycle::Trivial,
            Some(CocycleConfig::Bicharacter { theta }) => Cocycle::Bicharacter { theta: theta.clone() },
            Some(CocycleConfig::Section) => Cocycle::Section(crate::system::SectionCocycle::sl2z()),
        };
        TwistedSystem::new(algebra, group, action, cocycle)
    }
}

/// The configured element, or `0.6·1 ⊙ δ_e` plus `0.4·1` spread evenly
/// over the rest of `ball(1)`, which has `‖f‖₁ = 1`.
pub fn element(sys: &TwistedSystem, terms: Option<&[TermConfig]>) -> Result<CcElement> {
    match terms {
        Some(terms) => {
            let parsed = terms
                .iter()
                .map(|t| {
                    let g = sys.group.parse(&t.at)?;
                    let a = match t.value.as_slice() {
                        [x] => AlgElement::scalar(&sys.algebra, c(*x, 0.0)),
                        v => AlgElement::from_interleaved(&sys.algebra, v)?,
                    };
                    Ok((g, a))
                })
                .collect::<Result<Vec<_>>>()?;
            CcElement::from_terms(&sys.algebra, parsed)
        }
        None => {
            let e = sys.group.identity();
            let ring: Vec<_> = sys
                .group
                .ball(1.0, crate::system::default_length(&sys.group))?
                .into_iter()
                .filter(|g| *g != e)
                .collect();
            let one_norm = AlgElement::one(&sys.algebra).norm();
            let mut terms = vec![(e, AlgElement::one(&sys.algebra).scale_real(0.6 / one_norm))];
            let share = 0.4 / ring.len().max(1) as f64 / one_norm;
            terms.extend(ring.into_iter().map(|g| (g, AlgElement::one(&sys.algebra).scale_real(share))));
            CcElement::from_terms(&sys.algebra, terms)
        }
    }
}
