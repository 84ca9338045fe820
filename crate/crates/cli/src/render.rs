//! SVG drawing of a sample: Voronoi edges in red, Delaunay edges in blue,
//! both as geodesic arcs, inside the window circle.

use std::fmt::Write;

use hypvoro::hypgeo::{radius_h_to_e, Geodesic, GeodesicArc, HPoint};
use hypvoro::ppp::Sample;
use hypvoro::tess;

/// Default cap on the number of drawn edges of both kinds together.
pub const DEFAULT_MAX_EDGES: usize = 200_000;

const SIZE: f64 = 1000.0;
const SCALE: f64 = 490.0;

/// An SVG document with the path counts that went into it.
#[derive(Clone, Debug, PartialEq)]
pub struct Rendered {
    pub document: String,
    pub delaunay_edges: usize,
    pub voronoi_segments: usize,
    /// Paths actually drawn after the edge cap.
    pub blue_paths: usize,
    pub red_paths: usize,
}

fn sx(x: f64) -> f64 {
    SIZE / 2.0 + SCALE * x
}

fn sy(y: f64) -> f64 {
    SIZE / 2.0 - SCALE * y
}

/// Path data for the geodesic arc from `p` to `q`, 6 decimals.
pub fn arc_path(p: &HPoint, q: &HPoint) -> String {
    let g = Geodesic::through(p, q);
    let start = format!("M{:.6} {:.6}", sx(p.re()), sy(p.im()));
    match g.arc {
        GeodesicArc::Diameter => format!("{start} L{:.6} {:.6}", sx(q.re()), sy(q.im())),
        GeodesicArc::Circle { radius, .. } => {
            // The y flip turns a clockwise arc into SVG's positive sweep.
            let sweep = u8::from(!g.ccw());
            let r = SCALE * radius;
            format!("{start} A{r:.6} {r:.6} 0 0 {sweep} {:.6} {:.6}", sx(q.re()), sy(q.im()))
        }
    }
}

/// Keep every `stride`-th edge so that at most `cap` edges remain overall.
fn stride(total: usize, cap: usize) -> usize {
    if total <= cap || cap == 0 {
        1
    } else {
        total.div_ceil(cap)
    }
}

pub fn render_sample(s: &Sample, max_edges: usize) -> hypvoro::Result<Rendered> {
    let c = tess::delaunay(s)?;
    let cells = tess::voronoi_cells(&c);
    let pts = c.points();
    let blue: Vec<(HPoint, HPoint)> = c
        .valid_edges()
        .map(|(a, b)| (pts[a as usize], pts[b as usize]))
        .collect();
    let red: Vec<(HPoint, HPoint)> = cells.edges().into_iter().map(|(_, _, p, q)| (p, q)).collect();
    let step = stride(blue.len() + red.len(), max_edges);

    let mut doc = String::new();
    let _ = writeln!(
        doc,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    );
    let _ = writeln!(
        doc,
        r#"<circle class="window" cx="{:.6}" cy="{:.6}" r="{:.6}" fill="none" stroke="black" stroke-width="1"/>"#,
        sx(0.0),
        sy(0.0),
        SCALE * radius_h_to_e(s.window_r)
    );
    let mut counts = [0usize; 2];
    for (i, (class, color, edges)) in [("voronoi", "red", &red), ("delaunay", "blue", &blue)].into_iter().enumerate() {
        let _ = writeln!(
            doc,
            r#"<g class="{class}" data-edges="{}" fill="none" stroke="{color}" stroke-width="0.5">"#,
            edges.len()
        );
        // Voronoi edges come first in the global index used for the stride.
        let offset = if i == 0 { 0 } else { red.len() };
        for (j, (p, q)) in edges.iter().enumerate() {
            if (offset + j) % step == 0 {
                let _ = writeln!(doc, r#"<path d="{}"/>"#, arc_path(p, q));
                counts[i] += 1;
            }
        }
        doc.push_str("</g>\n");
    }
    doc.push_str("</svg>\n");
    Ok(Rendered {
        document: doc,
        delaunay_edges: blue.len(),
        voronoi_segments: red.len(),
        blue_paths: counts[1],
        red_paths: counts[0],
    })
}
