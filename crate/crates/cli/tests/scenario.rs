mod common;

use coherent_cli::scenario::shipped;
use coherent_cli::{parse_scenario, CliError};
use coherent_core::network::{random_connected_edges, GeneratorModel, NetworkSpec};

const MINIMAL: &str = r#"
[generators]
m_hat = 0.2
d_hat = 0.1
units = [
    { kind = "swing_turbine", r_inv = 0.5, tau = 2.0 },
    { kind = "swing_turbine", r_inv = 0.4, tau = 3.0 },
]
"#;

#[test]
fn shipped_test_case() {
    let s = parse_scenario(shipped("testcase_table1").unwrap()).unwrap();
    assert_eq!(s.group.len(), 5);
    assert!(s
        .group
        .generators()
        .iter()
        .all(|g| matches!(g, GeneratorModel::SwingTurbine { .. })));
    assert_eq!(s.group.aggregate_inertia(), 0.0683);
    assert_eq!(s.group.aggregate_damping(), 0.0107);
    assert_eq!(s.requests.len(), 4);
    assert!(s.weights.contains_key("W_tb") && s.weights.contains_key("W_cl"));
    assert_eq!(s.simulation.amplitude, -0.1);
    assert!(s.network.is_none());
}

#[test]
fn defaults_are_filled() {
    let s = parse_scenario(MINIMAL).unwrap();
    assert_eq!(
        (s.simulation.amplitude, s.simulation.horizon, s.simulation.dt),
        (-0.1, 200.0, 1e-3)
    );
    assert!(s.requests.is_empty());
    assert!(s.weight("unity").is_some());
    match s.group.generators()[0] {
        GeneratorModel::SwingTurbine { m, d, .. } => assert_eq!((m, d), (0.1, 0.05)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn negative_time_constant_names_invariant() {
    let text = MINIMAL.replace("tau = 2.0", "tau = -1.0");
    match parse_scenario(&text) {
        Err(CliError::Validation { invariant, .. }) => assert_eq!(invariant, "τ > 0"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_key_is_a_parse_error_with_line() {
    let text = MINIMAL.replace("d_hat = 0.1", "d_hat = 0.1\nfoo = 1");
    match parse_scenario(&text) {
        Err(e @ CliError::Parse { line, .. }) => {
            assert_eq!(line, Some(5));
            assert_eq!(e.exit_code(), 2);
            assert!(e.to_string().contains("foo"), "{e}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_text_is_a_parse_error() {
    assert!(matches!(parse_scenario("[generators\n"), Err(CliError::Parse { .. })));
    assert!(matches!(parse_scenario(""), Err(CliError::Parse { .. })));
}

#[test]
fn network_needs_exactly_one_description() {
    let both = format!("{MINIMAL}\n[network]\nlaplacian = [[1.0, -1.0], [-1.0, 1.0]]\nedges = [{{ from = 0, to = 1, weight = 1.0 }}]\n");
    assert!(matches!(parse_scenario(&both), Err(CliError::Validation { .. })));
    let lap = format!("{MINIMAL}\n[network]\nlaplacian = [[1.0, -1.0], [-1.0, 1.0]]\n");
    let edges = format!("{MINIMAL}\n[network]\nedges = [{{ from = 0, to = 1, weight = 1.0 }}]\n");
    let a = parse_scenario(&lap).unwrap().network.unwrap();
    let b = parse_scenario(&edges).unwrap().network.unwrap();
    assert_eq!(a.laplacian(), b.laplacian());
}

#[test]
fn network_size_must_match_generators() {
    let text = format!("{MINIMAL}\n[network]\nedges = [{{ from = 0, to = 2, weight = 1.0 }}]\n");
    assert!(matches!(parse_scenario(&text), Err(CliError::Validation { .. })));
}

#[test]
fn improper_weight_is_rejected() {
    let text = format!("{MINIMAL}\n[weights]\nW = {{ num = [1.0, 0.0, 1.0], den = [1.0, 1.0] }}\n");
    assert!(matches!(parse_scenario(&text), Err(CliError::Validation { .. })));
}

#[test]
fn request_must_name_a_known_weight() {
    let text = format!("{MINIMAL}\n[reduction]\nrequests = [{{ path = \"tb\", order = 2, weight = \"W_x\" }}]\n");
    assert!(matches!(parse_scenario(&text), Err(CliError::Validation { .. })));
}

#[test]
fn random10_matches_its_generator() {
    let s = parse_scenario(shipped("random10").unwrap()).unwrap();
    let edges = random_connected_edges(10, 0.5, 0.5, 1.5, 1).unwrap();
    assert_eq!(edges.len(), 21);
    let expected = NetworkSpec::from_edges(10, &edges).unwrap();
    assert_eq!(s.network.unwrap().laplacian(), expected.laplacian());
}
