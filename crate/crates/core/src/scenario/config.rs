use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::certify::{Direction, Theta, DEFAULT_E_GRID};
use crate::group::GroupSpec;
use crate::rational::{q, qi, serde_q, Q};
use crate::tree::{GraphOfGroupsSpec, TreeBuildParams};

/// One scenario: the space to build, the combing on it, and what to check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Root of every random stream; mandatory for sampled runs.
    #[serde(default)]
    pub seed: Option<u64>,
    pub space: SpaceSpec,
    #[serde(default)]
    pub combing: CombingChoice,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub probes: Vec<ProbeSpec>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombingChoice {
    #[default]
    Canonical,
    TransportedEquivariant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default = "default_exhaustive_limit")]
    pub exhaustive_limit: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_exhaustive_limit() -> usize {
    100_000
}

fn default_samples() -> usize {
    20_000
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { exhaustive_limit: default_exhaustive_limit(), samples: default_samples() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for reports; the command line overrides it.
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

fn one() -> Q {
    qi(1)
}

fn half() -> Q {
    q(1, 2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// Random tree on `vertices` vertices with edge lengths from `lengths`.
    RandomTree {
        vertices: usize,
        #[serde(default = "default_tree_lengths", with = "serde_q::vec")]
        lengths: Vec<Q>,
    },
    Cycle {
        n: usize,
        #[serde(default = "one", with = "serde_q")]
        length: Q,
    },
    /// Graph read from an interchange file.
    Interchange { path: PathBuf },
    /// Path `0..=4` with a pendant at 4 whose line from 0 to 4 runs out to the pendant and back.
    Detour,
    /// Two cycles glued at a point over a tree with two vertex spaces.
    GluedCycles {
        n: usize,
        #[serde(default = "one", with = "serde_q")]
        length: Q,
    },
    /// Cayley ball with one cone per coset of each peripheral subgroup.
    Coned {
        group: GroupSpec,
        #[serde(default)]
        names: Vec<String>,
        #[serde(default)]
        peripherals: Vec<Vec<String>>,
        radius: usize,
        /// Defaults to the largest fiber diameter plus one.
        #[serde(default, with = "serde_q::option")]
        cone_radius: Option<Q>,
        core_radius: usize,
        /// Add the apexes of cones meeting the core to the core.
        #[serde(default)]
        apexes: bool,
    },
    Pushout {
        spec: GraphOfGroupsSpec,
        #[serde(default)]
        params: TreeBuildParams,
        #[serde(with = "serde_q")]
        core_radius: Q,
    },
    Coalescence {
        spec: GraphOfGroupsSpec,
        #[serde(default)]
        params: TreeBuildParams,
        #[serde(with = "serde_q")]
        core_radius: Q,
    },
    /// Unit path with one spherical cone over the listed vertices.
    Spherical {
        path_length: usize,
        fiber: Vec<usize>,
        #[serde(with = "serde_q")]
        radius: Q,
    },
}

fn default_tree_lengths() -> Vec<Q> {
    vec![q(1, 2), qi(1), q(3, 2), qi(2)]
}

impl SpaceSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SpaceSpec::RandomTree { .. } => "random-tree",
            SpaceSpec::Cycle { .. } => "cycle",
            SpaceSpec::Interchange { .. } => "interchange",
            SpaceSpec::Detour => "detour",
            SpaceSpec::GluedCycles { .. } => "glued-cycles",
            SpaceSpec::Coned { .. } => "coned",
            SpaceSpec::Pushout { .. } => "pushout",
            SpaceSpec::Coalescence { .. } => "coalescence",
            SpaceSpec::Spherical { .. } => "spherical",
        }
    }

    /// Replaces the truncation radius; `false` when the space has none.
    pub fn set_radius(&mut self, r: usize) -> bool {
        match self {
            SpaceSpec::Coned { radius, core_radius, .. } => {
                *radius = r;
                *core_radius = (*core_radius).min(r / 2);
                true
            }
            SpaceSpec::Pushout { params, .. } | SpaceSpec::Coalescence { params, .. } => {
                params.radius = r;
                true
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CheckSpec {
    Geodesic,
    Quasigeodesic {
        #[serde(with = "serde_q")]
        lambda: Q,
        #[serde(with = "serde_q")]
        k: Q,
    },
    QuasigeodesicSweep {
        #[serde(default = "default_lambdas", with = "serde_q::vec")]
        lambdas: Vec<Q>,
    },
    Gcc {
        #[serde(with = "serde_q")]
        e: Q,
        #[serde(with = "serde_q")]
        c: Q,
    },
    /// Minimal `C` for each `E`; passes when some row meets the optional bounds.
    GccSweep {
        #[serde(default = "default_es", with = "serde_q::vec")]
        es: Vec<Q>,
        #[serde(default, with = "serde_q::option")]
        max_e: Option<Q>,
        #[serde(default, with = "serde_q::option")]
        max_c: Option<Q>,
    },
    Consistency {
        #[serde(with = "serde_q")]
        k: Q,
    },
    Forward {
        #[serde(with = "serde_q")]
        e: Q,
        #[serde(with = "serde_q")]
        c: Q,
    },
    Backward {
        #[serde(with = "serde_q")]
        e: Q,
        #[serde(with = "serde_q")]
        c: Q,
    },
    Bounded {
        #[serde(with = "serde_q")]
        lambda: Q,
        #[serde(with = "serde_q")]
        k: Q,
        #[serde(with = "serde_q")]
        c1: Q,
        #[serde(with = "serde_q")]
        c2: Q,
    },
    CcFull {
        #[serde(with = "serde_q")]
        lambda: Q,
        #[serde(with = "serde_q")]
        k: Q,
        #[serde(with = "serde_q")]
        e: Q,
        #[serde(with = "serde_q")]
        c: Q,
        theta: String,
    },
    Thinness {
        #[serde(with = "serde_q")]
        d: Q,
        direction: Direction,
        /// Convex subspace for plain graphs.
        #[serde(default)]
        subspace: Vec<usize>,
    },
    Sufficiency {
        #[serde(default = "default_es", with = "serde_q::vec")]
        es: Vec<Q>,
        #[serde(default, with = "serde_q::option")]
        d: Option<Q>,
        #[serde(default)]
        subspace: Vec<usize>,
    },
    /// Structural suite of a tree of spaces.
    Structural,
    /// Cone conditions, isometric embedding of the base and cone crossings.
    ConeValidation,
    /// Equivariance of the combing under tabled group elements.
    Equivariance {
        #[serde(default = "one_usize")]
        radius: usize,
    },
}

fn one_usize() -> usize {
    1
}

fn default_es() -> Vec<Q> {
    DEFAULT_E_GRID.iter().map(|&(n, d)| q(n, d)).collect()
}

fn default_lambdas() -> Vec<Q> {
    crate::group::probe::default_lambda_grid()
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::Geodesic => "geodesic",
            CheckSpec::Quasigeodesic { .. } => "quasigeodesic",
            CheckSpec::QuasigeodesicSweep { .. } => "quasigeodesic-sweep",
            CheckSpec::Gcc { .. } => "gcc",
            CheckSpec::GccSweep { .. } => "gcc-sweep",
            CheckSpec::Consistency { .. } => "consistency",
            CheckSpec::Forward { .. } => "forward",
            CheckSpec::Backward { .. } => "backward",
            CheckSpec::Bounded { .. } => "bounded",
            CheckSpec::CcFull { .. } => "cc-full",
            CheckSpec::Thinness { .. } => "thinness",
            CheckSpec::Sufficiency { .. } => "sufficiency",
            CheckSpec::Structural => "structural",
            CheckSpec::ConeValidation => "cone-validation",
            CheckSpec::Equivariance { .. } => "equivariance",
        }
    }

    /// Whether the check runs tuples through the certifier.
    pub fn uses_certifier(&self) -> bool {
        !matches!(self, CheckSpec::Structural | CheckSpec::ConeValidation | CheckSpec::Equivariance { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Growth {
    /// Relative diameter constant in the truncation radius.
    Bounded,
    /// Relative diameter strictly increasing in the truncation radius.
    Increasing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProbeSpec {
    /// Returning sets `V_r` of the action on a coned Cayley graph, measured in
    /// the graph coned along `reference` only, over several truncation radii.
    RelativeProperness {
        group: GroupSpec,
        #[serde(default)]
        names: Vec<String>,
        target: Vec<Vec<String>>,
        reference: Vec<Vec<String>>,
        truncation_radii: Vec<usize>,
        #[serde(default = "one", with = "serde_q")]
        probe_radius: Q,
        #[serde(default = "half", with = "serde_q")]
        cone_length: Q,
        expect: Growth,
    },
    /// Orbit map from a Cayley ball of `source` into a pushout space.
    Qi {
        source: GroupSpec,
        #[serde(default)]
        names: Vec<String>,
        target: GraphOfGroupsSpec,
        radii: Vec<usize>,
        #[serde(default = "default_tree_radius")]
        tree_radius: usize,
        /// Word-length radius of the source core; half the smallest radius by default.
        #[serde(default)]
        core_radius: Option<usize>,
        /// Largest acceptable additive constant at the best multiplicative one.
        #[serde(default, with = "serde_q::option")]
        max_k: Option<Q>,
    },
    /// Cone distance formula against planar development on random triples.
    SphericalFormula {
        #[serde(default = "default_triples")]
        triples: usize,
        #[serde(with = "serde_q")]
        radius: Q,
    },
}

fn default_tree_radius() -> usize {
    2
}

fn default_triples() -> usize {
    100
}

impl ProbeSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProbeSpec::RelativeProperness { .. } => "relative-properness",
            ProbeSpec::Qi { .. } => "qi",
            ProbeSpec::SphericalFormula { .. } => "spherical-formula",
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Config(m));
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("invalid scenario name `{}`", self.name));
        }
        if self.sampling.samples == 0 {
            return bad("sampling.samples must be positive".into());
        }
        match &self.space {
            SpaceSpec::RandomTree { vertices, lengths } => {
                if *vertices == 0 || lengths.is_empty() || lengths.iter().any(|l| *l <= qi(0)) {
                    return bad("random tree needs vertices and positive lengths".into());
                }
                if self.seed.is_none() {
                    return bad("random-tree spaces need a seed".into());
                }
            }
            SpaceSpec::Cycle { n, length } | SpaceSpec::GluedCycles { n, length } => {
                if *n < 3 || *length <= qi(0) {
                    return bad("cycles need n >= 3 and a positive length".into());
                }
            }
            SpaceSpec::Coned { core_radius, radius, .. } => {
                if 2 * core_radius > *radius {
                    return bad(format!("core radius {core_radius} exceeds half the radius {radius}"));
                }
            }
            SpaceSpec::Pushout { core_radius, .. } | SpaceSpec::Coalescence { core_radius, .. } => {
                if *core_radius < qi(0) {
                    return bad("core radius must be non-negative".into());
                }
            }
            SpaceSpec::Spherical { path_length, fiber, radius } => {
                if *path_length < 1 || fiber.iter().any(|&v| v > *path_length) || *radius <= qi(0) {
                    return bad("spherical fiber must lie on the path and the radius be positive".into());
                }
            }
            SpaceSpec::Interchange { .. } | SpaceSpec::Detour => {}
        }
        for c in &self.checks {
            if let CheckSpec::CcFull { theta, .. } = c {
                theta
                    .parse::<Theta>()
                    .and_then(|t| t.validate())
                    .map_err(|e| ScenarioError::Config(format!("theta `{theta}`: {e}")))?;
            }
        }
        for p in &self.probes {
            match p {
                ProbeSpec::RelativeProperness { truncation_radii, .. } if truncation_radii.len() < 2 => {
                    return bad("relative properness needs at least two truncation radii".into());
                }
                ProbeSpec::Qi { radii, .. } if radii.is_empty() => return bad("qi probe needs radii".into()),
                ProbeSpec::SphericalFormula { .. } if self.seed.is_none() => {
                    return bad("the spherical formula probe samples triples and needs a seed".into());
                }
                _ => {}
            }
        }
        Ok(())
    }
}
