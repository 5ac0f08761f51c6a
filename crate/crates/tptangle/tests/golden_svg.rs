use std::path::PathBuf;
use tptangle::diagram::{Axis, Orient};
use tptangle::fixtures::FixtureId;
use tptangle::io::svg::{render_diagram, render_tridiagram, RenderStyle};
use tptangle::projection::{make_regular, project, tridiagram, ProjectionSpec};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Set `UPDATE_GOLDEN=1` to rewrite the stored file after an intended change.
fn check(name: &str, svg: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, svg).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg, want, "{} changed", path.display());
}

#[test]
fn layer_view_along_z() {
    let s = ProjectionSpec::new(Axis::Z, Orient::Plus);
    let d = project(&make_regular(&FixtureId::LayerPacking.cell(), &s).unwrap(), &s).unwrap();
    let svg = render_diagram(&d, &RenderStyle::default()).unwrap();
    assert_eq!(svg.matches("class=\"gap\"").count(), 1);
    check("layer_z.svg", &svg);
}

#[test]
fn pi_plus_tridiagram() {
    let t = tridiagram(&FixtureId::PiPlus.cell(), &ProjectionSpec::new(Axis::Z, Orient::Plus)).unwrap();
    for d in &t.diagrams {
        assert_eq!(render_diagram(d, &RenderStyle::default()).unwrap().matches("class=\"gap\"").count(), 4);
    }
    let svg = render_tridiagram(&t, &RenderStyle::default()).unwrap();
    assert_eq!(svg.matches("class=\"gap\"").count(), 12);
    for label in ["front (y +)", "top (z -)", "right (x +)"] {
        assert!(svg.contains(label), "{label}");
    }
    check("pi_plus_tridiagram.svg", &svg);
}
