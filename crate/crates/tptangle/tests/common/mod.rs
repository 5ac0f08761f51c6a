#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};
use tptangle::diagram::layout::layout_issues;
use tptangle::diagram::{apply_move, apply_move_with_inverse, canonical_code, find_moves, MoveKind, MoveSite, TorusDiagram};
use tptangle::fixtures::diagram_corpus;
use tptangle::lattice::{HermiteData, IntMatrix3};

pub type M3 = [[i128; 3]; 3];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn det(m: &M3) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn mul(a: &M3, b: &M3) -> M3 {
    std::array::from_fn(|r| std::array::from_fn(|c| (0..3).map(|k| a[r][k] * b[k][c]).sum()))
}

pub fn to_m3(m: &IntMatrix3) -> M3 {
    std::array::from_fn(|r| std::array::from_fn(|c| m.0[r][c].to_i128().expect("small entries")))
}

pub fn to_int(m: &M3) -> IntMatrix3 {
    IntMatrix3(std::array::from_fn(|r| std::array::from_fn(|c| BigInt::from(m[r][c]))))
}

/// Nonsingular matrix with entries in `[-5, 5]`.
pub fn random_nonsingular(r: &mut ChaCha8Rng) -> M3 {
    loop {
        let m: M3 = std::array::from_fn(|_| std::array::from_fn(|_| r.gen_range(-5..=5)));
        if det(&m) != 0 {
            return m;
        }
    }
}

/// Lower-triangular column HNF by repeated remainders: in each row, keep subtracting
/// multiples of the column with the smallest nonzero entry until one column is left.
pub fn oracle_hnf(a: &M3) -> M3 {
    let mut h = *a;
    let col_axpy = |h: &mut M3, dst: usize, src: usize, k: i128| {
        for row in h.iter_mut() {
            row[dst] -= k * row[src];
        }
    };
    for i in 0..3 {
        loop {
            let nonzero: Vec<usize> = (i..3).filter(|&j| h[i][j] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&j| h[i][j].abs()).unwrap();
            for &j in &nonzero {
                if j != p {
                    let k = h[i][j].div_euclid(h[i][p]);
                    col_axpy(&mut h, j, p, k);
                }
            }
        }
        let p = (i..3).find(|&j| h[i][j] != 0).expect("nonsingular");
        for row in h.iter_mut() {
            row.swap(i, p);
        }
        if h[i][i] < 0 {
            for row in h.iter_mut() {
                row[i] = -row[i];
            }
        }
        for j in 0..i {
            let k = h[i][j].div_euclid(h[i][i]);
            col_axpy(&mut h, j, i, k);
        }
    }
    h
}

/// Every defining property of the Hermite data of `a`.
pub fn hermite_invariants_hold(a: &M3, hd: &HermiteData) -> bool {
    let h = to_m3(&hd.h);
    let u = to_m3(&hd.u);
    let lower = (0..3).all(|i| (i + 1..3).all(|j| h[i][j] == 0));
    let reduced = (0..3).all(|i| h[i][i] > 0 && (0..i).all(|j| 0 <= h[i][j] && h[i][j] < h[i][i]));
    mul(a, &u) == h && det(&u).abs() == 1 && lower && reduced && hd.sheets == BigInt::from(det(a).abs())
}

/// Applies the site, checks the full layout rules, the crossing delta, homology and component count, then undoes it.
pub fn check_site(d: &TorusDiagram, site: &MoveSite) -> Result<(), String> {
    let (e, inv) = apply_move_with_inverse(d, site).map_err(|err| format!("{site}: {err}"))?;
    let issues = layout_issues(e.strands().map_err(|err| err.to_string())?);
    if !issues.is_empty() {
        return Err(format!("{site}: result layout has {issues:?}"));
    }
    let delta = e.crossing_count() as i64 - d.crossing_count() as i64;
    if delta != site.kind.crossing_delta(site.dir) {
        return Err(format!("{site}: crossing delta {delta}"));
    }
    if e.sorted_homologies() != d.sorted_homologies() || e.component_count() != d.component_count() {
        return Err(format!("{site}: homology or components changed"));
    }
    let back = apply_move(&e, &inv).map_err(|err| format!("{site} then {inv}: {err}"))?;
    if canonical_code(&back) != canonical_code(d) {
        return Err(format!("{site} then {inv}: code differs"));
    }
    Ok(())
}

/// Every site on every corpus diagram; returns site counts per kind, or the failures.
pub fn corpus_move_suite() -> Result<BTreeMap<MoveKind, usize>, Vec<String>> {
    let mut seen: BTreeMap<MoveKind, usize> = BTreeMap::new();
    let mut failures = Vec::new();
    for (i, d) in diagram_corpus().iter().enumerate() {
        for site in find_moves(d) {
            *seen.entry(site.kind).or_default() += 1;
            if let Err(e) = check_site(d, &site) {
                failures.push(format!("diagram {i}: {e}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(seen)
    } else {
        Err(failures)
    }
}

/// Triangle sites appear one finger or curl away from the corpus.
pub fn triangle_suite() -> Result<usize, String> {
    let corpus = diagram_corpus();
    let mut checked = 0;
    for i in [0, 15, 18] {
        let d = &corpus[i];
        for first in find_moves(d) {
            let e = apply_move(d, &first).map_err(|err| format!("{first}: {err}"))?;
            for site in find_moves(&e).into_iter().filter(|s| s.kind == MoveKind::R3) {
                check_site(&e, &site).map_err(|err| format!("diagram {i} after {first}: {err}"))?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

pub fn tpt(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpt")).args(args).current_dir(dir).env("TPT_SEED", "7").output().unwrap()
}

/// Everything a run leaves behind: exit code, stdout, stderr and written files.
pub type RunRecord = (Option<i32>, Vec<u8>, Vec<u8>, Vec<(String, Vec<u8>)>);

pub fn run_in_fresh_dir(args: &[&str], setup: &dyn Fn(&Path)) -> RunRecord {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let before = files_under(dir.path());
    let out = tpt(args, dir.path());
    let files = files_under(dir.path()).into_iter().filter(|f| !before.contains(f)).collect();
    (out.status.code(), out.stdout, out.stderr, files)
}

fn files_under(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(p) = stack.pop() {
        for e in std::fs::read_dir(&p).unwrap() {
            let e = e.unwrap().path();
            if e.is_dir() {
                stack.push(e);
            } else {
                files.push((e.strip_prefix(root).unwrap().display().to_string(), std::fs::read(&e).unwrap()));
            }
        }
    }
    files.sort();
    files
}

pub fn setup_nothing(_: &Path) {}

pub fn setup_layer_diagram(dir: &Path) {
    assert_eq!(tpt(&["project", "layer_packing", "--out", "d.json"], dir).status.code(), Some(0));
}

pub fn setup_pi_tridiagram(dir: &Path) {
    assert_eq!(tpt(&["tridiagram", "pi_plus", "--out-dir", "t"], dir).status.code(), Some(0));
}

pub fn setup_z_cover(dir: &Path) {
    assert_eq!(tpt(&["cover", "z_line", "--matrix", "2,0,0;0,1,0;0,0,1", "--out", "c.json"], dir).status.code(), Some(0));
}

/// One invocation per subcommand, with the setup each needs.
pub fn cli_cases() -> Vec<(Vec<&'static str>, fn(&Path))> {
    vec![
        (vec!["hnf", "2,1,0;0,3,1;1,0,1"], setup_nothing),
        (vec!["decompose", "1,2,0;0,1,0;3,6,1"], setup_nothing),
        (vec!["project", "pi_plus", "--axis", "x", "--orient", "-"], setup_nothing),
        (vec!["tridiagram", "sigma_plus", "--out-dir", "t"], setup_nothing),
        (vec!["simplify", "d.json", "--out", "s.json"], setup_layer_diagram),
        (vec!["crossing-number", "helix_pack"], setup_nothing),
        (vec!["twist", "pi_plus", "--word", "1,-3"], setup_nothing),
        (vec!["cover", "z_line", "--matrix", "2,0,0;0,1,0;0,0,1"], setup_nothing),
        (vec!["quotient", "c.json", "--t", "1/2,0,0", "--n", "2"], setup_z_cover),
        (vec!["render", "t/tridiagram.json", "--out", "t.svg"], setup_pi_tridiagram),
        (vec!["render", "d.json"], setup_layer_diagram),
        (vec!["fixtures", "--out-dir", "f"], setup_nothing),
    ]
}
