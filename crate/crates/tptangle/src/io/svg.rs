//! SVG drawings of diagrams and tridiagrams.
//!
//! The square shows `u` to the right and `v` upwards. Under passes are drawn with a gap,
//! N-points as a filled dot inside an open circle.

use crate::diagram::{Mark, Strand, TorusDiagram};
use crate::error::{Error, Result};
use crate::exact::*;
use crate::projection::{Tridiagram, TRIDIAGRAM_VIEWS};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderStyle {
    pub cell_size_px: u32,
    pub margin_px: u32,
    pub stroke_px: f64,
    /// Total width of the break in an under strand.
    pub gap_px: f64,
    /// Radius of the filled dot of an N-point.
    pub f_point: f64,
    /// Radius of the open circle of an N-point.
    pub b_point: f64,
    /// Colour per component, reused cyclically.
    pub palette: Vec<String>,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            cell_size_px: 240,
            margin_px: 16,
            stroke_px: 2.0,
            gap_px: 12.0,
            f_point: 3.0,
            b_point: 6.0,
            palette: ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"].map(String::from).to_vec(),
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<()> {
        if self.cell_size_px == 0 || self.palette.is_empty() {
            return Err(Error::parse(1, 1, "style needs a positive cell size and a palette"));
        }
        if self.gap_px <= self.stroke_px {
            return Err(Error::parse(1, 1, "gap_px must exceed stroke_px"));
        }
        if self.f_point <= 0.0 || self.b_point <= self.f_point {
            return Err(Error::parse(1, 1, "need 0 < f_point < b_point"));
        }
        Ok(())
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

struct Square<'a> {
    style: &'a RenderStyle,
    x0: f64,
    y0: f64,
}

impl Square<'_> {
    fn size(&self) -> f64 {
        self.style.cell_size_px as f64
    }

    fn px(&self, p: &[f64; 2]) -> [f64; 2] {
        [self.x0 + p[0] * self.size(), self.y0 + (1.0 - p[1]) * self.size()]
    }
}

fn f2(p: &Q2) -> [f64; 2] {
    [to_f64(&p[0]), to_f64(&p[1])]
}

/// Draws one strand: each segment shifted by every lattice vector that brings part of it
/// into the square, with ends pulled back at under passes.
fn draw_strand(out: &mut String, sq: &Square, s: &Strand, colour: &str) {
    let n = s.len();
    let style = sq.style;
    if s.is_point() {
        draw_n(out, sq, &f2(&s.pts[0]), colour);
        return;
    }
    for i in 0..n {
        let (a, b) = s.segment(i);
        let (a, b) = (f2(&a), f2(&b));
        let len_px = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt() * sq.size();
        if len_px == 0.0 {
            continue;
        }
        let trim = (style.gap_px / 2.0 / len_px).min(0.45);
        let t0 = if s.marks[i] == Mark::Under { trim } else { 0.0 };
        let t1 = if s.marks[(i + 1) % n] == Mark::Under { 1.0 - trim } else { 1.0 };
        let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        let (p, q) = (at(t0), at(t1));
        let lo = [p[0].min(q[0]), p[1].min(q[1])];
        let hi = [p[0].max(q[0]), p[1].max(q[1])];
        for dx in -2i32..=1 {
            for dy in -2i32..=1 {
                let (dx, dy) = (dx as f64, dy as f64);
                if hi[0] + dx < 0.0 || lo[0] + dx > 1.0 || hi[1] + dy < 0.0 || lo[1] + dy > 1.0 {
                    continue;
                }
                let p = sq.px(&[p[0] + dx, p[1] + dy]);
                let q = sq.px(&[q[0] + dx, q[1] + dy]);
                let _ = writeln!(
                    out,
                    r#"    <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{colour}"/>"#,
                    num(p[0]),
                    num(p[1]),
                    num(q[0]),
                    num(q[1])
                );
            }
        }
    }
    for i in 0..n {
        match s.marks[i] {
            Mark::Up | Mark::Down => draw_n(out, sq, &f2(&s.pts[i]), colour),
            Mark::Under => {
                let c = sq.px(&f2(&s.pts[i]));
                let _ = writeln!(out, r#"    <circle class="gap" cx="{}" cy="{}" r="0"/>"#, num(c[0]), num(c[1]));
            }
            _ => {}
        }
    }
}

fn draw_n(out: &mut String, sq: &Square, p: &[f64; 2], colour: &str) {
    let c = sq.px(p);
    let (x, y) = (num(c[0]), num(c[1]));
    let st = sq.style;
    let _ = writeln!(out, r#"    <circle class="b-point" cx="{x}" cy="{y}" r="{}" fill="white" stroke="{colour}"/>"#, num(st.b_point));
    let _ = writeln!(out, r#"    <circle class="f-point" cx="{x}" cy="{y}" r="{}" fill="{colour}" stroke="none"/>"#, num(st.f_point));
}

fn draw_square(out: &mut String, sq: &Square, d: &TorusDiagram, id: usize, label: Option<&str>) -> Result<()> {
    let strands = d.strands()?;
    let (x, y, s) = (num(sq.x0), num(sq.y0), num(sq.size()));
    let _ = writeln!(out, r#"  <clipPath id="sq{id}"><rect x="{x}" y="{y}" width="{s}" height="{s}"/></clipPath>"#);
    let _ = writeln!(out, r#"  <rect x="{x}" y="{y}" width="{s}" height="{s}" fill="none" stroke="black" stroke-width="1"/>"#);
    if let Some(label) = label {
        let _ = writeln!(
            out,
            r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{label}</text>"#,
            num(sq.x0 + sq.size() / 2.0),
            num(sq.y0 + sq.size() + 14.0)
        );
    }
    let _ = writeln!(
        out,
        r#"  <g clip-path="url(#sq{id})" stroke-width="{}" stroke-linecap="round" fill="none">"#,
        num(sq.style.stroke_px)
    );
    for (k, st) in strands.iter().enumerate() {
        let colour = &sq.style.palette[k % sq.style.palette.len()];
        draw_strand(out, sq, st, colour);
    }
    out.push_str("  </g>\n");
    Ok(())
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(w),
        num(h),
        num(w),
        num(h)
    );
}

/// One diagram in a square. Needs a layout.
pub fn render_diagram(d: &TorusDiagram, style: &RenderStyle) -> Result<String> {
    style.validate()?;
    let m = style.margin_px as f64;
    let side = style.cell_size_px as f64 + 2.0 * m;
    let mut out = String::new();
    header(&mut out, side, side);
    draw_square(&mut out, &Square { style, x0: m, y0: m }, d, 0, None)?;
    out.push_str("</svg>\n");
    Ok(out)
}

/// The three views side by side in the order front, top, right.
pub fn render_tridiagram(t: &Tridiagram, style: &RenderStyle) -> Result<String> {
    style.validate()?;
    let m = style.margin_px as f64;
    let size = style.cell_size_px as f64;
    let mut out = String::new();
    header(&mut out, 3.0 * size + 4.0 * m, size + 2.0 * m + 20.0);
    for (i, d) in t.diagrams.iter().enumerate() {
        let label = format!("{} ({} {})", TRIDIAGRAM_VIEWS[i].0, d.axis.name(), d.orient.symbol());
        draw_square(&mut out, &Square { style, x0: m + i as f64 * (size + m), y0: m }, d, i, Some(&label))?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}
