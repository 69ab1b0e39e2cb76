//! SVG rendering: one rectangle per placed component with fill hue mapped
//! from its frequency, a substrate border, and optional red markers around
//! components involved in violations. Output is plain SVG 1.1 with no
//! external references.

use crate::error::Result;
use crate::layout::Layout;
use crate::netlist::CompId;
use crate::validate::ViolationReport;
use std::fmt::Write as _;
use std::path::Path;

const CELL_PX: f64 = 12.0;

fn hsl_to_hex(h: f64, s: f64, l: f64) -> String {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = (h.rem_euclid(360.0)) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let byte = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    format!("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b))
}

fn component_freq(layout: &Layout, id: CompId) -> f64 {
    match id {
        CompId::Qubit(q) => layout.net.qubit(q).freq_ghz,
        CompId::Block(b) => layout.net.block(b).freq_ghz,
    }
}

/// Blue for the lowest frequency in the netlist through red for the highest.
fn fill_color(layout: &Layout, id: CompId) -> String {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for q in &layout.net.qubits {
        lo = lo.min(q.freq_ghz);
        hi = hi.max(q.freq_ghz);
    }
    for e in &layout.net.edges {
        lo = lo.min(e.freq_ghz);
        hi = hi.max(e.freq_ghz);
    }
    let f = component_freq(layout, id);
    let t = if hi > lo { (f - lo) / (hi - lo) } else { 0.5 };
    hsl_to_hex(240.0 * (1.0 - t), 0.65, 0.55)
}

/// The layout as an SVG document string; `overlay` adds dashed red outlines
/// around every component named in a violation entry.
pub fn render_svg_string(layout: &Layout, overlay: Option<&ViolationReport>) -> String {
    let w = layout.width_cells as f64 * CELL_PX;
    let h = layout.height_cells as f64 * CELL_PX;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(
        out,
        "  <rect class=\"border\" x=\"0.5\" y=\"0.5\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>",
        w - 1.0,
        h - 1.0
    );
    // svg y runs downward; flip so cell (0,0) draws at the bottom left
    let place = |x: i32, y: i32, cw: i32, ch: i32| -> (f64, f64, f64, f64) {
        (
            x as f64 * CELL_PX,
            (layout.height_cells - y - ch) as f64 * CELL_PX,
            cw as f64 * CELL_PX,
            ch as f64 * CELL_PX,
        )
    };
    for id in layout.comp_ids() {
        let Some(rect) = layout.rect(id) else { continue };
        let (x, y, rw, rh) = place(rect.x, rect.y, rect.w, rect.h);
        let _ = writeln!(
            out,
            "  <rect class=\"comp\" x=\"{x}\" y=\"{y}\" width=\"{rw}\" height=\"{rh}\" fill=\"{}\" stroke=\"#222\" stroke-width=\"0.5\"><title>{id}</title></rect>",
            fill_color(layout, id)
        );
    }
    if let Some(report) = overlay {
        for entry in &report.entries {
            let mut marks = String::new();
            for &id in &entry.components {
                let Some(rect) = layout.rect(id) else { continue };
                let (x, y, rw, rh) = place(rect.x, rect.y, rect.w, rect.h);
                let _ = writeln!(
                    marks,
                    "    <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#d22\" stroke-width=\"2\" stroke-dasharray=\"4 2\"/>",
                    x - 1.0,
                    y - 1.0,
                    rw + 2.0,
                    rh + 2.0
                );
            }
            let _ = writeln!(
                out,
                "  <g class=\"violation\"><title>{entry}</title>\n{marks}  </g>"
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_svg(layout: &Layout, path: &Path, overlay: Option<&ViolationReport>) -> Result<()> {
    std::fs::write(path, render_svg_string(layout, overlay))?;
    Ok(())
}
