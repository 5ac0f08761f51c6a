//! JSON formats for cells, diagrams, tridiagrams, Hermite data and search results.
//!
//! Rationals are written as `"p/q"` strings and big integers as decimal strings, so every
//! document parses back to an equal value.

use crate::diagram::{
    canonical_code, Axis, Component, Crossing, Event, FreeLoop, Layout, Mark, NPoint, Orient, Strand, TorusDiagram,
};
use crate::error::{Error, Result};
use crate::exact::*;
use crate::lattice::{HermiteData, IntMatrix3, RationalBasis3};
use crate::projection::{Tridiagram, TRIDIAGRAM_VIEWS};
use crate::search::{TraceStep, TripletResult, STATUS_UPPER_BOUND};
use crate::unit_cell::{PLCurve, UnitCell};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedDiagram(msg.into())
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))
}

fn rat(s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| Error::InvalidCell(format!("not a rational number: {s:?}")))
}

fn rat2(p: &[String; 2]) -> Result<Q2> {
    Ok([rat(&p[0])?, rat(&p[1])?])
}

fn str2(p: &Q2) -> [String; 2] {
    [fmt_q(&p[0]), fmt_q(&p[1])]
}

// ---------------------------------------------------------------- cells

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveDoc {
    pub vertices: Vec<[String; 3]>,
    pub wraps: Vec<[i64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDoc {
    /// Row-major; column `j` is the `j`-th basis vector.
    pub basis: [[String; 3]; 3],
    pub min_separation: String,
    pub components: Vec<CurveDoc>,
}

impl CellDoc {
    pub fn from_cell(c: &UnitCell) -> CellDoc {
        CellDoc {
            basis: c.basis.to_rows(),
            min_separation: fmt_q(&c.min_separation),
            components: c
                .components
                .iter()
                .map(|k| CurveDoc { vertices: k.vertices.iter().map(|v| v.clone().map(|x| fmt_q(&x))).collect(), wraps: k.wraps.clone() })
                .collect(),
        }
    }

    pub fn to_cell(&self) -> Result<UnitCell> {
        let mut columns: [[Q; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| zero()));
        for (i, row) in self.basis.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                columns[j][i] = rat(x)?;
            }
        }
        let basis = RationalBasis3 { columns };
        if !basis.det().is_positive() {
            return Err(Error::DegenerateBasis);
        }
        let min_separation = rat(&self.min_separation)?;
        if !min_separation.is_positive() {
            return Err(Error::InvalidCell("min_separation must be positive".into()));
        }
        let mut components = Vec::new();
        for (ci, k) in self.components.iter().enumerate() {
            if k.vertices.is_empty() || k.vertices.len() != k.wraps.len() {
                return Err(Error::InvalidCell(format!("component {ci}: need as many wraps as vertices, at least one")));
            }
            let vertices = k.vertices.iter().map(|v| Ok([rat(&v[0])?, rat(&v[1])?, rat(&v[2])?])).collect::<Result<_>>()?;
            components.push(PLCurve::new(vertices, k.wraps.clone()));
        }
        Ok(UnitCell { basis, components, min_separation })
    }
}

pub fn cell_to_json(c: &UnitCell) -> String {
    to_pretty(&CellDoc::from_cell(c))
}

pub fn cell_from_json(text: &str) -> Result<UnitCell> {
    from_str::<CellDoc>(text)?.to_cell()
}

// ---------------------------------------------------------------- diagrams

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingDoc {
    /// Slot of the over pass.
    pub over: u8,
    pub ccw: bool,
    /// `[component, event]` of the slot-0 and slot-1 passes.
    pub passes: [[usize; 2]; 2],
    pub pos: Option<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NPointDoc {
    pub ascending: bool,
    pub at: [usize; 2],
    pub pos: Option<[String; 2]>,
}

/// Arc from one event of a component to the next; ends are `[component, event]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcDoc {
    pub from: [usize; 2],
    pub to: [usize; 2],
    pub wrap: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeLoopDoc {
    pub homology: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrandDoc {
    pub pts: Vec<[String; 2]>,
    pub wraps: Vec<[i64; 2]>,
    pub marks: Vec<Mark>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutDoc {
    pub strands: Vec<StrandDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramDoc {
    pub axis: Axis,
    pub orient: Orient,
    pub code: String,
    pub crossings: Vec<CrossingDoc>,
    pub npoints: Vec<NPointDoc>,
    pub arcs: Vec<ArcDoc>,
    pub free_loops: Vec<FreeLoopDoc>,
    pub layout: Option<LayoutDoc>,
}

impl DiagramDoc {
    pub fn from_diagram(d: &TorusDiagram) -> DiagramDoc {
        let arcs = d
            .components
            .iter()
            .enumerate()
            .flat_map(|(ci, c)| {
                let n = c.events.len();
                (0..n).map(move |e| ArcDoc { from: [ci, e], to: [ci, (e + 1) % n], wrap: c.wraps[e] })
            })
            .collect();
        DiagramDoc {
            axis: d.axis,
            orient: d.orient,
            code: canonical_code(d),
            crossings: d
                .crossings
                .iter()
                .map(|c| CrossingDoc {
                    over: c.over,
                    ccw: c.ccw,
                    passes: c.passes.map(|(a, b)| [a, b]),
                    pos: c.pos.as_ref().map(str2),
                })
                .collect(),
            npoints: d
                .npoints
                .iter()
                .map(|n| NPointDoc { ascending: n.ascending, at: [n.at.0, n.at.1], pos: n.pos.as_ref().map(str2) })
                .collect(),
            arcs,
            free_loops: d.free_loops.iter().map(|f| FreeLoopDoc { homology: f.homology }).collect(),
            layout: d.layout.as_ref().map(|l| LayoutDoc {
                strands: l
                    .strands
                    .iter()
                    .map(|s| StrandDoc { pts: s.pts.iter().map(str2).collect(), wraps: s.wraps.clone(), marks: s.marks.clone() })
                    .collect(),
            }),
        }
    }

    /// Rebuilds the diagram from its layout when present, otherwise from the combinatorial
    /// fields. The stored code must match the rebuilt diagram.
    pub fn to_diagram(&self) -> Result<TorusDiagram> {
        let d = match &self.layout {
            Some(l) => {
                let strands = l
                    .strands
                    .iter()
                    .map(|s| {
                        Ok(Strand { pts: s.pts.iter().map(rat2).collect::<Result<_>>()?, wraps: s.wraps.clone(), marks: s.marks.clone() })
                    })
                    .collect::<Result<Vec<_>>>()?;
                TorusDiagram::from_layout(self.axis, self.orient, strands)?
            }
            None => self.combinatorial()?,
        };
        let code = canonical_code(&d);
        if code != self.code {
            return Err(malformed(format!("stored code {:?} does not match the diagram ({code:?})", self.code)));
        }
        Ok(d)
    }

    fn combinatorial(&self) -> Result<TorusDiagram> {
        let ncomp = self.arcs.iter().map(|a| a.from[0] + 1).max().unwrap_or(0);
        let mut wraps: Vec<Vec<Option<[i64; 2]>>> = vec![vec![]; ncomp];
        for a in &self.arcs {
            let w = &mut wraps[a.from[0]];
            if w.len() <= a.from[1] {
                w.resize(a.from[1] + 1, None);
            }
            if w[a.from[1]].replace(a.wrap).is_some() {
                return Err(malformed(format!("two arcs leave event {:?}", a.from)));
            }
        }
        for a in &self.arcs {
            let n = wraps[a.from[0]].len();
            if a.to != [a.from[0], (a.from[1] + 1) % n] {
                return Err(malformed(format!("arc from {:?} must end at the next event", a.from)));
            }
        }
        let mut events: Vec<Vec<Option<Event>>> = wraps.iter().map(|w| vec![None; w.len()]).collect();
        let mut place = |at: [usize; 2], ev: Event| -> Result<()> {
            let slot = events.get_mut(at[0]).and_then(|c| c.get_mut(at[1])).ok_or_else(|| malformed(format!("no event {at:?}")))?;
            if slot.replace(ev).is_some() {
                return Err(malformed(format!("event {at:?} is used twice")));
            }
            Ok(())
        };
        let mut crossings = Vec::new();
        for (i, c) in self.crossings.iter().enumerate() {
            if c.over > 1 {
                return Err(malformed(format!("crossing {i}: over slot must be 0 or 1")));
            }
            for slot in 0..2u8 {
                place(c.passes[slot as usize], Event::Pass { c: i, slot })?;
            }
            crossings.push(Crossing {
                over: c.over,
                ccw: c.ccw,
                passes: c.passes.map(|p| (p[0], p[1])),
                pos: c.pos.as_ref().map(rat2).transpose()?,
            });
        }
        let mut npoints = Vec::new();
        for (i, n) in self.npoints.iter().enumerate() {
            place(n.at, Event::N { n: i })?;
            npoints.push(NPoint { ascending: n.ascending, at: (n.at[0], n.at[1]), pos: n.pos.as_ref().map(rat2).transpose()? });
        }
        let mut components = Vec::new();
        for (ci, (ev, w)) in events.into_iter().zip(wraps).enumerate() {
            let ev: Option<Vec<Event>> = ev.into_iter().collect();
            let w: Option<Vec<[i64; 2]>> = w.into_iter().collect();
            match (ev, w) {
                (Some(events), Some(wraps)) if !events.is_empty() => {
                    components.push(Component { events, wraps, strand: None, vertex_of_event: vec![] })
                }
                _ => return Err(malformed(format!("component {ci} has a missing event or arc"))),
            }
        }
        let free_loops = self.free_loops.iter().map(|f| FreeLoop { homology: f.homology, strand: None }).collect();
        Ok(TorusDiagram { axis: self.axis, orient: self.orient, crossings, npoints, components, free_loops, layout: None::<Layout> })
    }
}

pub fn diagram_to_json(d: &TorusDiagram) -> String {
    to_pretty(&DiagramDoc::from_diagram(d))
}

pub fn diagram_from_json(text: &str) -> Result<TorusDiagram> {
    from_str::<DiagramDoc>(text)?.to_diagram()
}

// ---------------------------------------------------------------- tridiagrams

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewDoc {
    pub name: String,
    pub diagram: DiagramDoc,
    /// The perturbed cell this view was projected from.
    pub cell: CellDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagramDoc {
    pub crossings: [usize; 3],
    pub npoints: [usize; 3],
    pub views: Vec<ViewDoc>,
}

impl TridiagramDoc {
    pub fn from_tridiagram(t: &Tridiagram) -> TridiagramDoc {
        TridiagramDoc {
            crossings: t.crossing_triplet(),
            npoints: t.n_triplet(),
            views: (0..3)
                .map(|i| ViewDoc {
                    name: TRIDIAGRAM_VIEWS[i].0.to_string(),
                    diagram: DiagramDoc::from_diagram(&t.diagrams[i]),
                    cell: CellDoc::from_cell(&t.cells[i]),
                })
                .collect(),
        }
    }

    pub fn to_tridiagram(&self) -> Result<Tridiagram> {
        if self.views.len() != 3 {
            return Err(malformed("a tridiagram has three views"));
        }
        let mut diagrams = Vec::new();
        let mut cells = Vec::new();
        for (v, (name, axis, orient)) in self.views.iter().zip(TRIDIAGRAM_VIEWS) {
            let d = v.diagram.to_diagram()?;
            if v.name != name || d.axis != axis || d.orient != orient {
                return Err(malformed(format!("view {:?} is not the {name} view", v.name)));
            }
            diagrams.push(d);
            cells.push(v.cell.to_cell()?);
        }
        let t = Tridiagram {
            diagrams: diagrams.try_into().unwrap_or_else(|_| unreachable!()),
            cells: cells.try_into().unwrap_or_else(|_| unreachable!()),
        };
        if t.crossing_triplet() != self.crossings || t.n_triplet() != self.npoints {
            return Err(malformed("summary counts do not match the views"));
        }
        Ok(t)
    }
}

pub fn tridiagram_to_json(t: &Tridiagram) -> String {
    to_pretty(&TridiagramDoc::from_tridiagram(t))
}

pub fn tridiagram_from_json(text: &str) -> Result<Tridiagram> {
    from_str::<TridiagramDoc>(text)?.to_tridiagram()
}

// ---------------------------------------------------------------- Hermite data

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteDoc {
    pub h: String,
    pub u: String,
    pub sheets: String,
    /// `[h11, h21, h31, h22, h32, h33]`
    pub exponents: [String; 6],
    pub covering_map: String,
}

impl HermiteDoc {
    pub fn from_hermite(hd: &HermiteData) -> HermiteDoc {
        HermiteDoc {
            h: hd.h.to_text(),
            u: hd.u.to_text(),
            sheets: hd.sheets.to_string(),
            exponents: hd.exponents().map(|e| e.to_string()),
            covering_map: hd.covering_map_text(),
        }
    }

    /// Parses and checks the normal-form conditions; the input matrix is not recoverable
    /// and `u` is only checked to be unimodular.
    pub fn to_hermite(&self) -> Result<HermiteData> {
        let h = IntMatrix3::parse(&self.h)?;
        let u = IntMatrix3::parse(&self.u)?;
        let sheets = BigInt::from_str(self.sheets.trim()).map_err(|_| Error::parse(1, 1, format!("bad sheet count {:?}", self.sheets)))?;
        if !h.is_lower_triangular() {
            return Err(Error::InvalidHnf("h is not lower triangular".into()));
        }
        let mut prod = BigInt::one();
        for i in 0..3 {
            let d = h.get(i, i);
            if !d.is_positive() {
                return Err(Error::InvalidHnf(format!("diagonal entry {} is not positive", i + 1)));
            }
            prod *= d;
            for j in 0..i {
                let x = h.get(i, j);
                if x.is_negative() || x >= d {
                    return Err(Error::InvalidHnf(format!("entry ({},{}) is not reduced", i + 1, j + 1)));
                }
            }
        }
        if prod != sheets {
            return Err(Error::InvalidHnf("sheets is not the product of the diagonal".into()));
        }
        if u.det().abs() != BigInt::one() {
            return Err(Error::InvalidHnf("u is not unimodular".into()));
        }
        let hd = HermiteData { h, u, sheets };
        if self.exponents != hd.exponents().map(|e| e.to_string()) || self.covering_map != hd.covering_map_text() {
            return Err(Error::InvalidHnf("exponents or covering map disagree with h".into()));
        }
        Ok(hd)
    }
}

pub fn hermite_to_json(hd: &HermiteData) -> String {
    to_pretty(&HermiteDoc::from_hermite(hd))
}

pub fn hermite_from_json(text: &str) -> Result<HermiteData> {
    from_str::<HermiteDoc>(text)?.to_hermite()
}

// ---------------------------------------------------------------- search results

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingDoc {
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub status: String,
    pub triplet: [usize; 3],
    pub score: usize,
    pub budget_exhausted: bool,
    pub trace: Vec<TraceStep>,
    pub witness: TridiagramDoc,
    /// Only written on request, so that default output is reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingDoc>,
}

impl ResultDoc {
    pub fn from_result(r: &TripletResult, seconds: Option<f64>) -> ResultDoc {
        ResultDoc {
            status: r.status().to_string(),
            triplet: r.triplet,
            score: r.score,
            budget_exhausted: r.budget_exhausted,
            trace: r.trace.clone(),
            witness: TridiagramDoc::from_tridiagram(&r.witness),
            timing: seconds.map(|seconds| TimingDoc { seconds }),
        }
    }

    pub fn to_result(&self) -> Result<TripletResult> {
        if self.status != STATUS_UPPER_BOUND {
            return Err(malformed(format!("unknown status {:?}", self.status)));
        }
        let witness = self.witness.to_tridiagram()?;
        let mut t = witness.crossing_triplet();
        t.sort();
        if t != self.triplet || crate::search::score(&t) != self.score {
            return Err(malformed("triplet or score does not match the witness"));
        }
        Ok(TripletResult {
            triplet: self.triplet,
            score: self.score,
            trace: self.trace.clone(),
            witness,
            budget_exhausted: self.budget_exhausted,
        })
    }
}

pub fn result_to_json(r: &TripletResult, seconds: Option<f64>) -> String {
    to_pretty(&ResultDoc::from_result(r, seconds))
}

pub fn result_from_json(text: &str) -> Result<TripletResult> {
    from_str::<ResultDoc>(text)?.to_result()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, FixtureId};
    use crate::lattice::hnf;
    use crate::projection::{tridiagram, ProjectionSpec};

    #[test]
    fn cells_round_trip() {
        for f in FixtureId::ALL {
            let c = f.cell();
            let text = cell_to_json(&c);
            assert_eq!(cell_from_json(&text).unwrap(), c);
            assert_eq!(cell_to_json(&cell_from_json(&text).unwrap()), text);
        }
    }

    #[test]
    fn cell_vertices_are_fraction_strings() {
        let text = cell_to_json(&fixtures::layer_packing());
        assert!(text.contains("\"1/3\""));
        assert!(text.contains("\"min_separation\": \"1/4\""));
    }

    #[test]
    fn diagrams_round_trip() {
        for d in fixtures::diagram_corpus() {
            let text = diagram_to_json(&d);
            assert_eq!(diagram_from_json(&text).unwrap(), d);
        }
    }

    #[test]
    fn combinatorial_diagrams_round_trip() {
        for mut d in fixtures::diagram_corpus() {
            d.layout = None;
            for c in &mut d.components {
                c.strand = None;
                c.vertex_of_event.clear();
            }
            for f in &mut d.free_loops {
                f.strand = None;
            }
            let text = diagram_to_json(&d);
            assert_eq!(diagram_from_json(&text).unwrap(), d);
        }
    }

    #[test]
    fn tampered_code_is_rejected() {
        let d = &fixtures::diagram_corpus()[7];
        let mut doc = DiagramDoc::from_diagram(d);
        doc.code.push('x');
        assert!(doc.to_diagram().is_err());
    }

    #[test]
    fn syntax_errors_carry_a_position() {
        match cell_from_json("{\n  \"basis\": [1,\n") {
            Err(Error::Parse { line, .. }) => assert!(line >= 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hermite_round_trip() {
        let hd = hnf(&IntMatrix3::parse("2,1,0;0,3,1;1,0,2").unwrap()).unwrap();
        let text = hermite_to_json(&hd);
        assert_eq!(hermite_from_json(&text).unwrap(), hd);
        let mut doc: HermiteDoc = from_str(&text).unwrap();
        doc.sheets = "5".into();
        assert!(doc.to_hermite().is_err());
    }

    #[test]
    fn tridiagram_round_trip() {
        let t = tridiagram(&fixtures::pi_plus(), &ProjectionSpec::new(Axis::Z, Orient::Plus)).unwrap();
        let back = tridiagram_from_json(&tridiagram_to_json(&t)).unwrap();
        assert_eq!(back.diagrams, t.diagrams);
        assert_eq!(back.cells, t.cells);
    }

    #[test]
    fn result_round_trip() {
        let r = crate::search::crossing_triplet(&fixtures::layer_packing(), &Default::default()).unwrap();
        let text = result_to_json(&r, None);
        assert!(text.contains("\"status\": \"upper_bound\""));
        assert!(!text.contains("timing"));
        let back = result_from_json(&text).unwrap();
        assert_eq!(result_to_json(&back, None), text);
        assert!(result_to_json(&r, Some(1.5)).contains("\"seconds\": 1.5"));
    }
}
