use super::config::ScenarioConfig;
use super::ScenarioError;

/// A built-in scenario: its name, a prose description and its config.
#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

impl CatalogEntry {
    pub fn config(&self) -> ScenarioConfig {
        ScenarioConfig::from_toml(self.toml).expect("built-in scenarios parse")
    }
}

const TREE_SANITY: &str = r#"
name = "tree-sanity"
description = """
Random metric tree on 120 vertices with edge lengths in {1/2, 1, 3/2, 2}.
The canonical combing on a tree is geodesic and every constant vanishes:
gcc at (1, 0), consistency at 0, forward and backward convexity at (1, 0),
bounded at (1, 0, 1, 0)."""
seed = 7

[space]
kind = "random-tree"
vertices = 120

[[checks]]
property = "geodesic"

[[checks]]
property = "gcc"
e = 1
c = 0

[[checks]]
property = "consistency"
k = 0

[[checks]]
property = "forward"
e = 1
c = 0

[[checks]]
property = "backward"
e = 1
c = 0

[[checks]]
property = "bounded"
lambda = 1
k = 0
c1 = 1
c2 = 0
"#;

const SIX_CYCLE: &str = r#"
name = "six-cycle"
description = """
Unit 6-cycle with the canonical combing. Antipodal pairs have two geodesics
and the tie-break picks one, so the convexity constant is positive. The sweep
reports the minimal C for each E, and the sufficiency cross-check compares the
implied bounds with the measured constants."""

[space]
kind = "cycle"
n = 6

[[checks]]
property = "geodesic"

[[checks]]
property = "gcc-sweep"

[[checks]]
property = "consistency"
k = 0

[[checks]]
property = "quasigeodesic"
lambda = 1
k = 0

[[checks]]
property = "sufficiency"
es = [1, 2]
"#;

const DETOUR: &str = r#"
name = "detour"
description = """
Path of length 4 with a pendant vertex at its end. The line from 0 to 4 runs
out to the pendant and back, so the combing is quasi-geodesic but not
geodesic. The sweep reports the minimal additive constant k for each lambda."""

[space]
kind = "detour"

[[checks]]
property = "quasigeodesic-sweep"
lambdas = [1, 2, 3]

[[checks]]
property = "quasigeodesic"
lambda = 1
k = "5/3"
"#;

const F2XZ_CONED: &str = r#"
name = "f2xz-coned"
description = """
Coned-off construction on F2 x Z = <a, b> x <z> with the peripheral subgroup
<a>, truncated at word length 6. Each coset of <a> gets an apex joined to its
points by edges of length equal to the cone radius. The combing Γ̂ runs the
canonical combing of the coned graph. Checks: the cone conditions and the
isometric embedding of the Cayley ball, at most two cone crossings per line,
geodesicity, and gcc with E at most 3. The relative properness probe shows
the returning sets of <a> stay bounded as the truncation grows."""
seed = 1

[space]
kind = "coned"
group = { kind = "product", factors = [{ kind = "free", rank = 2 }, { kind = "free-abelian", rank = 1 }] }
names = ["a", "b", "z"]
peripherals = [["a"]]
radius = 6
core_radius = 3
apexes = true

[sampling]
samples = 4000

[[checks]]
property = "cone-validation"

[[checks]]
property = "geodesic"

[[checks]]
property = "gcc-sweep"
es = [1, 2, 3]
max_e = 3

[[probes]]
probe = "relative-properness"
group = { kind = "product", factors = [{ kind = "free", rank = 2 }, { kind = "free-abelian", rank = 1 }] }
names = ["a", "b", "z"]
target = [["a"]]
reference = [["a"]]
truncation_radii = [1, 2, 3, 4]
expect = "bounded"
"#;

const Z3_RELATIVE: &str = r#"
name = "z3-relative"
description = """
Z^3 = <x, y, w> acting on its Cayley graph coned along <x> and <y>, with
returning sets measured in the graph coned along <x> only. The built space is
the reference graph coned along <x>. The relative
diameter grows with the truncation radius, so the action is not relatively
properly discontinuous with respect to <x> alone."""

[space]
kind = "coned"
group = { kind = "free-abelian", rank = 3 }
names = ["x", "y", "w"]
peripherals = [["x"]]
radius = 2
core_radius = 1

[[checks]]
property = "cone-validation"

[[probes]]
probe = "relative-properness"
group = { kind = "free-abelian", rank = 3 }
names = ["x", "y", "w"]
target = [["x"], ["y"]]
reference = [["x"]]
truncation_radii = [1, 2, 3, 4]
expect = "increasing"
"#;

const AMALGAM_F2: &str = r#"
name = "amalgam-f2"
description = """
Pushout of two copies of Z over the trivial group, giving F2 = Z * Z acting
on a tree of spaces with one spike per vertex space. The combined combing
uses the transported equivariant family. Checks: the structural suite of the
tree of spaces, equivariance, geodesicity, convexity and thinness. The QI
probe measures the orbit map from the Cayley graph of F2 as the radius grows."""
seed = 3
combing = "transported-equivariant"

[space]
kind = "pushout"
core_radius = 2
spec = { kind = "amalgam", left = { group = { kind = "free-abelian", rank = 1 }, names = ["a"] }, right = { group = { kind = "free-abelian", rank = 1 }, names = ["b"] } }
params = { radius = 3, tree_radius = 2 }

[sampling]
samples = 4000

[[checks]]
property = "structural"

[[checks]]
property = "equivariance"

[[checks]]
property = "geodesic"

[[checks]]
property = "gcc-sweep"
es = [1, 2, 3]

[[checks]]
property = "consistency"
k = 0

[[probes]]
probe = "qi"
source = { kind = "free", rank = 2 }
names = ["a", "b"]
target = { kind = "amalgam", left = { group = { kind = "free-abelian", rank = 1 }, names = ["a"] }, right = { group = { kind = "free-abelian", rank = 1 }, names = ["b"] } }
radii = [3, 4, 5]
core_radius = 2
max_k = 0
"#;

const HNN_Z2: &str = r#"
name = "hnn-z2"
description = """
Coalescence of Z^2 = <x, y> along the trivial edge group, an HNN extension
with stable letter t. The basepoints are the identity and a pendant vertex at
it. Checks the structural suite and geodesicity of the combined combing."""
seed = 5

[space]
kind = "coalescence"
core_radius = 2
spec = { kind = "hnn", base = { group = { kind = "free-abelian", rank = 2 }, names = ["x", "y"] }, basepoints = { kind = "decorated" } }
params = { radius = 2, tree_radius = 2 }

[sampling]
samples = 4000

[[checks]]
property = "structural"

[[checks]]
property = "geodesic"

[[checks]]
property = "gcc-sweep"
es = [1, 2, 3]
"#;

const COMBINATION_CYCLES: &str = r#"
name = "combination-cycles"
description = """
Two unit 6-cycles glued at a point over a tree with two vertex spaces. The
combined combing runs through the glued point. Checks geodesicity, the
convexity sweep, consistency, and forward and backward thinness with respect
to the vertex spaces."""

[space]
kind = "glued-cycles"
n = 6

[[checks]]
property = "structural"

[[checks]]
property = "geodesic"

[[checks]]
property = "gcc-sweep"
es = [1, 2, 3]

[[checks]]
property = "consistency"
k = 0

[[checks]]
property = "thinness"
d = 0
direction = "forward"

[[checks]]
property = "thinness"
d = 0
direction = "backward"
"#;

const SPHERICAL_CONE: &str = r#"
name = "spherical-cone"
description = """
Unit path of length 4 with a spherical cone of radius 2 over vertices 0, 2
and 4. Checks the cone conditions, the length of cone geodesics, and the
closed distance formula against a planar development."""
seed = 9

[space]
kind = "spherical"
path_length = 4
fiber = [0, 2, 4]
radius = 2

[[checks]]
property = "cone-validation"

[[probes]]
probe = "spherical-formula"
triples = 100
radius = 1
"#;

const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { name: "tree-sanity", summary: "random tree, all constants zero", toml: TREE_SANITY },
    CatalogEntry { name: "six-cycle", summary: "6-cycle convexity sweep and sufficiency", toml: SIX_CYCLE },
    CatalogEntry { name: "detour", summary: "quasi-geodesic constants of a detour", toml: DETOUR },
    CatalogEntry { name: "f2xz-coned", summary: "coned-off F2 x Z along <a>", toml: F2XZ_CONED },
    CatalogEntry { name: "z3-relative", summary: "relative properness failure for Z^3", toml: Z3_RELATIVE },
    CatalogEntry { name: "amalgam-f2", summary: "pushout Z * Z as a tree of spaces", toml: AMALGAM_F2 },
    CatalogEntry { name: "hnn-z2", summary: "coalescence of Z^2 along the trivial group", toml: HNN_Z2 },
    CatalogEntry { name: "combination-cycles", summary: "two 6-cycles glued at a point", toml: COMBINATION_CYCLES },
    CatalogEntry { name: "spherical-cone", summary: "spherical cone distance formula", toml: SPHERICAL_CONE },
];

pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn builtin(name: &str) -> Result<ScenarioConfig, ScenarioError> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .map(CatalogEntry::config)
        .ok_or_else(|| ScenarioError::UnknownScenario(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses_and_validates() {
        for e in catalog() {
            let cfg = e.config();
            assert_eq!(cfg.name, e.name);
            cfg.validate().unwrap();
            assert_eq!(ScenarioConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert_eq!(builtin("nope").unwrap_err(), ScenarioError::UnknownScenario("nope".into()));
    }
}
