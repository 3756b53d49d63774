//! Scenario configurations shipped with the binary.

/// `(name, description, TOML text)`.
pub const SCENARIOS: &[(&str, &str, &str)] = &[
    (
        "schwarzschild-sphere",
        "every identity on a sphere of symmetry in Schwarzschild (m = 1)",
        include_str!("../scenarios/schwarzschild-sphere.toml"),
    ),
    (
        "random-graph",
        "Minkowski formula and the Schwarzschild integral identity on a random star-shaped Schwarzschild graph",
        include_str!("../scenarios/random-graph.toml"),
    ),
    (
        "flux-homologous",
        "the flux invariant on three homologous surfaces in Schwarzschild",
        include_str!("../scenarios/flux-homologous.toml"),
    ),
    (
        "constant-curvature",
        "higher-order Minkowski formulae on torsion-free surfaces in Minkowski and de Sitter",
        include_str!("../scenarios/constant-curvature.toml"),
    ),
    (
        "heintze-karcher",
        "Heintze-Karcher equality on cone sections and strictness on an ellipsoid",
        include_str!("../scenarios/heintze-karcher.toml"),
    ),
    (
        "null-flow",
        "monotone F along the null flow of a perturbed sphere in Schwarzschild",
        include_str!("../scenarios/null-flow.toml"),
    ),
    (
        "non-star-shaped",
        "an off-centre sphere violating the hypotheses of the Schwarzschild inequalities",
        include_str!("../scenarios/non-star-shaped.toml"),
    ),
    (
        "quadrature",
        "spectral convergence of the sphere quadrature alone",
        include_str!("../scenarios/quadrature.toml"),
    ),
    (
        "acceptance",
        "the full acceptance configuration: one scenario per verified statement",
        include_str!("../scenarios/acceptance.toml"),
    ),
];

pub fn get(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|s| s.0 == name).map(|s| s.2)
}
