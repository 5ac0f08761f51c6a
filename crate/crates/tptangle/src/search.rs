//! Bounded search for small crossing triplets.
//!
//! Everything reported here is an upper bound: the search explores a finite neighbourhood
//! of the input and keeps the best tridiagram it has actually constructed.

use crate::diagram::moves::{find_moves_filtered, SiteFilter};
use crate::diagram::{apply_move, canonical_code, MoveSite, TorusDiagram};
use crate::error::{Error, Result};
use crate::exact::*;
use crate::lattice::{recompose, ShearWord};
use crate::projection::{lift, tridiagram, ProjectionSpec, Tridiagram, TRIDIAGRAM_VIEWS};
use crate::unit_cell::{apply_twist, quotient, UnitCell};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::time::{Duration, Instant};

pub const STATUS_UPPER_BOUND: &str = "upper_bound";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub move_depth: u32,
    pub max_states: usize,
    pub twist_word_length: u32,
    /// Subset of {2, 3, 4}.
    pub quotient_divisors: Vec<u32>,
    pub seed: u64,
    /// Wall-clock limit in seconds for the whole search.
    pub time_budget: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { move_depth: 8, max_states: 50_000, twist_word_length: 0, quotient_divisors: vec![], seed: 0, time_budget: None }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_states == 0 {
            return Err(Error::InvalidCell("max_states must be positive".into()));
        }
        if let Some(d) = self.quotient_divisors.iter().find(|d| !(2..=4).contains(*d)) {
            return Err(Error::InvalidCell(format!("quotient divisor {d} is not in {{2,3,4}}")));
        }
        Ok(())
    }

    fn base_spec(&self) -> ProjectionSpec {
        let (_, axis, orient) = TRIDIAGRAM_VIEWS[0];
        ProjectionSpec::new(axis, orient).with_seed(self.seed)
    }
}

struct Clock {
    start: Instant,
    limit: Option<Duration>,
}

impl Clock {
    fn new(cfg: &SearchConfig) -> Self {
        Clock { start: Instant::now(), limit: cfg.time_budget.map(Duration::from_secs_f64) }
    }

    fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.start.elapsed() > l)
    }
}

#[derive(Clone, Debug)]
pub struct Simplified {
    pub diagram: TorusDiagram,
    pub moves: Vec<MoveSite>,
    /// Set when the state or time budget ran out before the search space was exhausted.
    pub budget_exhausted: bool,
    /// Distinct diagrams visited.
    pub states: usize,
}

fn rank(d: &TorusDiagram) -> (usize, usize, String) {
    (d.crossing_count(), d.n_count(), canonical_code(d))
}

/// Breadth-first search over crossing-non-increasing moves, deduplicated by code.
pub fn simplify_diagram(d: &TorusDiagram, cfg: &SearchConfig) -> Result<Simplified> {
    cfg.validate()?;
    simplify_with(d, cfg, &Clock::new(cfg))
}

fn simplify_with(d: &TorusDiagram, cfg: &SearchConfig, clock: &Clock) -> Result<Simplified> {
    d.strands()?;
    let mut visited: HashSet<String> = HashSet::new();
    let start = rank(d);
    visited.insert(start.2.clone());
    let mut best = (start, d.clone(), Vec::<MoveSite>::new());
    let mut frontier = vec![(d.clone(), Vec::<MoveSite>::new())];
    let mut exhausted = false;
    for _ in 0..cfg.move_depth {
        let mut next: Vec<((usize, usize, String), TorusDiagram, Vec<MoveSite>)> = Vec::new();
        'states: for (state, path) in &frontier {
            for site in find_moves_filtered(state, SiteFilter::SEARCH) {
                if clock.expired() {
                    exhausted = true;
                    break 'states;
                }
                let Ok(e) = apply_move(state, &site) else { continue };
                let r = rank(&e);
                if !visited.insert(r.2.clone()) {
                    continue;
                }
                let mut p = path.clone();
                p.push(site);
                if r < best.0 {
                    best = (r.clone(), e.clone(), p.clone());
                }
                next.push((r, e, p));
            }
        }
        if next.is_empty() || exhausted {
            break;
        }
        // keep the most promising states when the registry would overflow
        let room = cfg.max_states.saturating_sub(visited.len() - next.len());
        if next.len() > room {
            exhausted = true;
            next.sort_by(|a, b| a.0.cmp(&b.0));
            next.truncate(room);
        }
        if next.is_empty() {
            break;
        }
        frontier = next.into_iter().map(|(_, e, p)| (e, p)).collect();
    }
    Ok(Simplified { diagram: best.1, moves: best.2, budget_exhausted: exhausted, states: visited.len() })
}

/// One step of a search trace. Replaying the steps from the input cell rebuilds the witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum TraceStep {
    /// Change of lattice basis by the product of shear generators.
    Twist { word: String },
    /// Quotient by the translation `t` of order `n`.
    Quotient { t: [String; 3], n: u32 },
    /// Regular projection along the three views with the given seed.
    Tridiagram { seed: u64 },
    /// Moves applied to one view.
    Simplify { view: usize, moves: Vec<MoveSite> },
    /// The simplified view is lifted to a new cell, which is projected again.
    Lift { view: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct TripletResult {
    /// Crossing counts sorted ascending.
    pub triplet: [usize; 3],
    pub score: usize,
    pub trace: Vec<TraceStep>,
    pub witness: Tridiagram,
    pub budget_exhausted: bool,
}

impl TripletResult {
    pub fn status(&self) -> &'static str {
        STATUS_UPPER_BOUND
    }
}

pub fn score(t: &[usize; 3]) -> usize {
    t.iter().map(|x| x * x).sum()
}

fn sorted(mut t: [usize; 3]) -> [usize; 3] {
    t.sort();
    t
}

fn lift_seed(seed: u64, round: usize) -> u64 {
    seed.wrapping_add(1000 * (round as u64 + 1))
}

/// Upper bound on the crossing number of the cell by simplify-lift-reproject rounds.
pub fn crossing_triplet(cell: &UnitCell, cfg: &SearchConfig) -> Result<TripletResult> {
    cfg.validate()?;
    triplet_with(cell, cfg, &Clock::new(cfg), vec![])
}

fn triplet_with(cell: &UnitCell, cfg: &SearchConfig, clock: &Clock, prefix: Vec<TraceStep>) -> Result<TripletResult> {
    let mut trace = prefix;
    trace.push(TraceStep::Tridiagram { seed: cfg.seed });
    let mut current = tridiagram(cell, &cfg.base_spec())?;
    let mut exhausted = false;
    let mut round = 0;
    'rounds: loop {
        let counts = current.crossing_triplet();
        let now = score(&counts);
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
        for view in order {
            if counts[view] == 0 || clock.expired() {
                continue;
            }
            let s = simplify_with(&current.diagrams[view], cfg, clock)?;
            exhausted |= s.budget_exhausted;
            if s.moves.is_empty() || s.diagram.crossing_count() >= counts[view] {
                continue;
            }
            let seed = lift_seed(cfg.seed, round);
            let Ok(next) = relift(&s.diagram, seed) else { continue };
            if score(&next.crossing_triplet()) < now {
                trace.push(TraceStep::Simplify { view, moves: s.moves });
                trace.push(TraceStep::Lift { view, seed });
                current = next;
                round += 1;
                continue 'rounds;
            }
        }
        break;
    }
    exhausted |= clock.expired();
    let triplet = sorted(current.crossing_triplet());
    Ok(TripletResult { triplet, score: score(&triplet), trace, witness: current, budget_exhausted: exhausted })
}

fn relift(d: &TorusDiagram, seed: u64) -> Result<Tridiagram> {
    let cell = lift(d)?;
    let spec = {
        let (_, axis, orient) = TRIDIAGRAM_VIEWS[0];
        ProjectionSpec::new(axis, orient).with_seed(seed)
    };
    tridiagram(&cell, &spec)
}

/// Twist words over `M1..M6` and their inverses up to the given length, without
/// adjacent cancelling letters, in a fixed order.
pub fn twist_words(max_len: u32) -> Vec<ShearWord> {
    let letters: Vec<(u8, i64)> = (1..=6u8).flat_map(|g| [(g, 1), (g, -1)]).collect();
    let mut out = vec![ShearWord::new(vec![])];
    let mut layer = vec![Vec::<(u8, i64)>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last().is_some_and(|&(g, e)| g == l.0 && e == -l.1) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(ShearWord::new));
        layer = next;
    }
    out
}

/// Translations of order dividing `n`, excluding zero, in lexicographic order.
fn translations(n: u32) -> Vec<Q3> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if (a, b, c) != (0, 0, 0) {
                    out.push([q(a, n), q(b, n), q(c, n)]);
                }
            }
        }
    }
    out
}

/// Upper bound on the crossing number over twists and quotients of the cell.
pub fn tp_crossing_number(cell: &UnitCell, cfg: &SearchConfig) -> Result<TripletResult> {
    cfg.validate()?;
    let clock = Clock::new(cfg);
    let mut candidates: Vec<(UnitCell, Vec<TraceStep>)> = Vec::new();
    for w in twist_words(cfg.twist_word_length) {
        if w.is_empty() {
            candidates.push((cell.clone(), vec![]));
            continue;
        }
        if let Ok(c) = apply_twist(cell, &recompose(&w)) {
            candidates.push((c, vec![TraceStep::Twist { word: w.to_text() }]));
        }
    }
    let mut divisors = cfg.quotient_divisors.clone();
    divisors.sort();
    divisors.dedup();
    for n in divisors {
        for t in translations(n) {
            if let Ok(c) = quotient(cell, &t, n) {
                let t_text = t.clone().map(|x| fmt_q(&x));
                candidates.push((c, vec![TraceStep::Quotient { t: t_text, n }]));
            }
        }
    }
    let mut best: Option<TripletResult> = None;
    let mut exhausted = false;
    for (c, prefix) in candidates {
        if clock.expired() {
            exhausted = true;
            break;
        }
        let r = match triplet_with(&c, cfg, &clock, prefix) {
            Ok(r) => r,
            Err(e) if best.is_some() && matches!(e, Error::PerturbationFailed(_) | Error::NotRegular(_)) => continue,
            Err(e) => return Err(e),
        };
        exhausted |= r.budget_exhausted;
        if best.as_ref().map_or(true, |b| r.score < b.score) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or(Error::BudgetExhausted)?;
    best.budget_exhausted = exhausted;
    Ok(best)
}

/// Rebuilds the witness tridiagram of a trace from the input cell.
pub fn replay(cell: &UnitCell, trace: &[TraceStep]) -> Result<Tridiagram> {
    let mut cell = cell.clone();
    let mut current: Option<Tridiagram> = None;
    for step in trace {
        match step {
            TraceStep::Twist { word } => {
                cell = apply_twist(&cell, &recompose(&ShearWord::parse(word)?))?;
            }
            TraceStep::Quotient { t, n } => {
                let tq: Vec<Q> = t
                    .iter()
                    .map(|x| parse_q(x).ok_or_else(|| Error::parse(1, 1, format!("bad translation entry {x:?}"))))
                    .collect::<Result<_>>()?;
                cell = quotient(&cell, &[tq[0].clone(), tq[1].clone(), tq[2].clone()], *n)?;
            }
            TraceStep::Tridiagram { seed } => {
                let (_, axis, orient) = TRIDIAGRAM_VIEWS[0];
                current = Some(tridiagram(&cell, &ProjectionSpec::new(axis, orient).with_seed(*seed))?);
            }
            TraceStep::Simplify { view, moves } => {
                let t = current.as_mut().ok_or_else(|| Error::MalformedDiagram("trace simplifies before projecting".into()))?;
                let mut d = t.diagrams[*view].clone();
                for m in moves {
                    d = apply_move(&d, m)?;
                }
                t.diagrams[*view] = d;
            }
            TraceStep::Lift { view, seed } => {
                let t = current.as_ref().ok_or_else(|| Error::MalformedDiagram("trace lifts before projecting".into()))?;
                current = Some(relift(&t.diagrams[*view], *seed)?);
            }
        }
    }
    current.ok_or_else(|| Error::MalformedDiagram("trace never projects".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Anchor, MoveDir, MoveKind};
    use crate::fixtures::{self, FixtureId};

    fn codes(t: &Tridiagram) -> Vec<String> {
        t.diagrams.iter().map(canonical_code).collect()
    }

    #[test]
    fn score_is_sum_of_squares() {
        assert_eq!(score(&[4, 4, 4]), 48);
        assert_eq!(score(&[8, 8, 8]), 192);
        assert_eq!(score(&[1, 0, 0]), score(&[0, 0, 1]));
    }

    #[test]
    fn twist_word_counts() {
        assert_eq!(twist_words(0).len(), 1);
        assert_eq!(twist_words(1).len(), 13);
        assert_eq!(twist_words(2).len(), 13 + 12 * 11);
    }

    #[test]
    fn kink_is_removed() {
        let corpus = fixtures::diagram_corpus();
        let d = &corpus[18];
        assert_eq!(d.crossing_count(), 2);
        let s = simplify_diagram(d, &SearchConfig::default()).unwrap();
        assert_eq!(s.diagram.crossing_count(), 1);
        assert!(!s.budget_exhausted);
    }

    #[test]
    fn extra_bigon_is_removed() {
        let d = fixtures::diagram_corpus()[7].clone();
        let site = MoveSite {
            kind: MoveKind::R2,
            dir: MoveDir::Apply,
            anchor: Anchor::Finger { a: (0, 0), ta: q(1, 2), b: (1, 0), tb: q(1, 2), over: true },
        };
        let e = apply_move(&d, &site).unwrap();
        assert_eq!(e.crossing_count(), 3);
        let s = simplify_diagram(&e, &SearchConfig::default()).unwrap();
        assert_eq!(s.diagram.crossing_count(), 1);
    }

    #[test]
    fn layer_triplet_and_replay() {
        let cell = FixtureId::LayerPacking.cell();
        let r = crossing_triplet(&cell, &SearchConfig::default()).unwrap();
        assert_eq!(r.triplet, [0, 0, 1]);
        assert_eq!(r.score, 1);
        assert_eq!(r.status(), "upper_bound");
        assert_eq!(codes(&replay(&cell, &r.trace).unwrap()), codes(&r.witness));
    }

    #[test]
    fn untwisting_recovers_the_layers() {
        let cell = FixtureId::LayerPackingTwisted.cell();
        let base = crossing_triplet(&cell, &SearchConfig::default()).unwrap();
        assert_eq!(base.triplet, [0, 1, 1]);
        let cfg = SearchConfig { twist_word_length: 1, ..SearchConfig::default() };
        let r = tp_crossing_number(&cell, &cfg).unwrap();
        assert_eq!(r.triplet, [0, 0, 1]);
        assert!(matches!(r.trace[0], TraceStep::Twist { .. }));
        assert_eq!(codes(&replay(&cell, &r.trace).unwrap()), codes(&r.witness));
    }

    #[test]
    fn quotient_of_a_cover_is_found() {
        let cell = fixtures::layer_packing();
        let hd = crate::lattice::hnf(&crate::lattice::IntMatrix3::diag(2, 1, 1)).unwrap();
        let big = crate::unit_cell::cover(&cell, &hd);
        let cfg = SearchConfig { quotient_divisors: vec![2], ..SearchConfig::default() };
        let r = tp_crossing_number(&big, &cfg).unwrap();
        assert_eq!(r.triplet, [0, 0, 1]);
    }

    #[test]
    fn search_is_deterministic() {
        let cell = FixtureId::HelixPack.cell();
        let a = crossing_triplet(&cell, &SearchConfig::default()).unwrap();
        let b = crossing_triplet(&cell, &SearchConfig::default()).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(codes(&a.witness), codes(&b.witness));
    }
}
