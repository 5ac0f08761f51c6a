mod common;

use common::*;
use std::path::{Path, PathBuf};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json")).display().to_string()
}

/// Runs twice in fresh directories; returns stdout after checking both runs agree on
/// exit code, output streams and written files, and that the command succeeded.
fn deterministic(args: &[&str], setup: fn(&Path)) -> String {
    let a = run_in_fresh_dir(args, &setup);
    let b = run_in_fresh_dir(args, &setup);
    assert_eq!(a, b, "{args:?}");
    assert_eq!(a.0, Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.2));
    String::from_utf8(a.1).unwrap()
}

#[test]
fn every_subcommand_is_repeatable() {
    for (args, setup) in cli_cases() {
        deterministic(&args, setup);
    }
}

#[test]
fn outputs_have_the_expected_shape() {
    assert!(deterministic(&["hnf", "2,1,0;0,3,1;1,0,1"], setup_nothing).contains("sheets"));
    let json = deterministic(&["crossing-number", "helix_pack"], setup_nothing);
    assert!(json.contains("\"status\": \"upper_bound\""));
    assert!(!json.contains("seconds"));
    assert!(deterministic(&["render", "d.json"], setup_layer_diagram).starts_with("<svg"));
    let names = deterministic(&["fixtures"], setup_nothing);
    assert_eq!(names.lines().count(), 6);
}

#[test]
fn fixture_files_match_the_builtin_cells() {
    for name in ["pi_plus", "sigma_plus", "layer_packing", "layer_packing_twisted", "z_line", "helix_pack"] {
        let from_file = deterministic(&["tridiagram", &fixture(name)], setup_nothing);
        let builtin = deterministic(&["tridiagram", name], setup_nothing);
        assert_eq!(from_file, builtin, "{name}");
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env_seed = tpt(&["project", "helix_pack"], dir.path());
    let flag_seed = tpt(&["project", "helix_pack", "--seed", "7"], dir.path());
    assert_eq!(env_seed.stdout, flag_seed.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(tpt(&["hnf", "1,2;3"], dir.path()).status.code(), Some(2));
    assert_eq!(tpt(&["hnf", "1,2,3;2,4,6;0,0,1"], dir.path()).status.code(), Some(1));
    assert_eq!(tpt(&["project", "no_such_cell"], dir.path()).status.code(), Some(2));
    assert_eq!(tpt(&["quotient", "z_line", "--t", "1/2,0,0", "--n", "2"], dir.path()).status.code(), Some(1));
    let out = tpt(&["crossing-number", "helix_pack", "--max-states", "1"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"budget_exhausted\": true"));
}
