//! File formats: JSON for samples, graphs, schemes, reports and walk traces,
//! CSV for angle histograms.
//!
//! Floats are written with shortest round-trip precision, so writing the same
//! value twice gives the same bytes and reading it back gives the same bits.
//! Points are stored as `[rad_h, theta]`.

use serde::{Deserialize, Serialize};

use crate::graph::{DualGraph, ExpansionReport, GraphKind, SizeMinimum};
use crate::hypgeo::HPoint;
use crate::ppp::{Conditioning, Sample};
use crate::schemes::Scheme;
use crate::verify::VerificationReport;
use crate::walk::{AngleHistogram, SpeedEstimate, WalkTrace};
use crate::{Error, Result};

fn parse_err(e: serde_json::Error) -> Error {
    Error::invalid("json", e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn polar(p: &HPoint) -> [f64; 2] {
    [p.rad_h(), p.theta()]
}

fn from_polar(pts: &[[f64; 2]]) -> Result<Vec<HPoint>> {
    pts.iter().map(|&[r, t]| HPoint::checked_polar(r, t)).collect()
}

#[derive(Serialize, Deserialize)]
struct SampleFile {
    lambda: f64,
    window_r: f64,
    seed: u64,
    conditioning: String,
    points: Vec<[f64; 2]>,
}

pub fn sample_to_json(s: &Sample) -> String {
    to_json(&SampleFile {
        lambda: s.lambda,
        window_r: s.window_r,
        seed: s.seed,
        conditioning: s.conditioning.as_str().to_string(),
        points: s.points.iter().map(polar).collect(),
    })
}

pub fn sample_from_json(text: &str) -> Result<Sample> {
    let f: SampleFile = serde_json::from_str(text).map_err(parse_err)?;
    Sample::from_points(
        f.lambda,
        f.window_r,
        f.seed,
        Conditioning::parse(&f.conditioning)?,
        from_polar(&f.points)?,
    )
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    kind: String,
    root: u32,
    n: u32,
    adjacency: Vec<Vec<u32>>,
    core: Vec<bool>,
    geometry: Vec<[f64; 2]>,
}

pub fn graph_to_json(g: &DualGraph) -> String {
    to_json(&GraphFile {
        kind: g.kind().as_str().to_string(),
        root: g.root(),
        n: g.n() as u32,
        adjacency: (0..g.n() as u32).map(|v| g.neighbors(v).to_vec()).collect(),
        core: g.core_flags().to_vec(),
        geometry: g.geometry().iter().map(polar).collect(),
    })
}

pub fn graph_from_json(text: &str) -> Result<DualGraph> {
    let f: GraphFile = serde_json::from_str(text).map_err(parse_err)?;
    if f.adjacency.len() != f.n as usize {
        return Err(Error::invalid("n", format!("{} adjacency lists for n = {}", f.adjacency.len(), f.n)));
    }
    DualGraph::from_adjacency(
        GraphKind::parse(&f.kind)?,
        f.adjacency,
        f.root,
        f.core,
        from_polar(&f.geometry)?,
    )
}

#[derive(Serialize)]
struct SizeRow {
    size: usize,
    boundary: u64,
    volume: u64,
    ratio: f64,
    /// Exact ratio as `boundary/volume` in lowest terms.
    ratio_exact: String,
    witness: Vec<u32>,
}

fn size_rows(rows: &[Option<SizeMinimum>]) -> Vec<SizeRow> {
    rows.iter()
        .enumerate()
        .filter_map(|(i, m)| {
            m.as_ref().map(|m| SizeRow {
                size: i + 1,
                boundary: m.boundary,
                volume: m.volume,
                ratio: m.boundary as f64 / m.volume.max(1) as f64,
                ratio_exact: m.ratio().to_string(),
                witness: m.witness.clone(),
            })
        })
        .collect()
}

#[derive(Serialize)]
struct ExpansionFile {
    root: u32,
    max_size: usize,
    per_size: Vec<SizeRow>,
    per_size_noncore: Vec<SizeRow>,
    global: Option<SizeRow>,
    enumerated: u64,
    noncore_subsets: u64,
}

pub fn expansion_to_json(r: &ExpansionReport) -> String {
    let global = r.global.as_ref().map(|m| {
        let size = m.witness.len();
        let mut rows = vec![None; size];
        rows[size - 1] = Some(m.clone());
        size_rows(&rows).pop().expect("one row")
    });
    to_json(&ExpansionFile {
        root: r.root,
        max_size: r.max_size,
        per_size: size_rows(&r.per_size),
        per_size_noncore: size_rows(&r.per_size_noncore),
        global,
        enumerated: r.enumerated,
        noncore_subsets: r.noncore_subsets,
    })
}

#[derive(Serialize, Deserialize)]
struct SchemeFile {
    k: u32,
    f: Vec<[u32; 3]>,
}

pub fn scheme_to_json(s: &Scheme) -> String {
    to_json(&SchemeFile {
        k: s.k(),
        f: (3..=s.k()).map(|i| [i, s.f(i)[0], s.f(i)[1]]).collect(),
    })
}

pub fn scheme_from_json(text: &str) -> Result<Scheme> {
    let file: SchemeFile = serde_json::from_str(text).map_err(parse_err)?;
    let mut f = Vec::with_capacity(file.f.len());
    for (j, &[i, a, b]) in file.f.iter().enumerate() {
        if i != j as u32 + 3 {
            return Err(Error::invalid("f", format!("entry {j} is for i = {i}, expected {}", j + 3)));
        }
        f.push([a, b]);
    }
    Scheme::new(file.k, f)
}

pub fn report_to_json(r: &VerificationReport) -> String {
    to_json(r)
}

pub fn report_from_json(text: &str) -> Result<VerificationReport> {
    serde_json::from_str(text).map_err(parse_err)
}

#[derive(Serialize)]
struct TraceRow<'a> {
    vertices: &'a [u32],
    dist: &'a [u32],
    stop: &'static str,
    terminal_angle: Option<f64>,
}

#[derive(Serialize)]
struct TraceFile<'a> {
    root: u32,
    seed: u64,
    walks: Vec<TraceRow<'a>>,
}

pub fn traces_to_json(root: u32, seed: u64, traces: &[WalkTrace]) -> String {
    to_json(&TraceFile {
        root,
        seed,
        walks: traces
            .iter()
            .map(|t| TraceRow {
                vertices: &t.vertices,
                dist: &t.dist,
                stop: t.stop.as_str(),
                terminal_angle: t.terminal_angle(),
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct SpeedFile {
    k_eval: usize,
    mean: f64,
    ci_low: f64,
    ci_high: f64,
    eligible: usize,
    excluded: usize,
    valid: bool,
}

pub fn speed_to_json(s: &SpeedEstimate) -> String {
    to_json(&SpeedFile {
        k_eval: s.k_eval,
        mean: s.mean,
        ci_low: s.ci_low,
        ci_high: s.ci_high,
        eligible: s.eligible,
        excluded: s.excluded,
        valid: s.is_valid(),
    })
}

/// `angle_bin_center,mass` with a header line.
pub fn histogram_csv(h: &AngleHistogram) -> String {
    let mut out = String::from("angle_bin_center,mass\n");
    for (i, m) in h.mass().into_iter().enumerate() {
        out.push_str(&format!("{},{}\n", h.bin_center(i), m));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppp::{condition_root, sample_ball};
    use crate::tess;

    #[test]
    fn sample_round_trip_is_exact() {
        let s = condition_root(&sample_ball(1.0, 4.0, 3).unwrap()).unwrap();
        let text = sample_to_json(&s);
        let back = sample_from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(sample_to_json(&back), text);
    }

    #[test]
    fn graph_round_trip_is_exact() {
        let s = condition_root(&sample_ball(1.0, 5.0, 3).unwrap()).unwrap();
        let c = tess::delaunay(&s).unwrap();
        for g in [tess::dual_voronoi_graph(&c).unwrap(), tess::dual_delaunay_graph(&c).unwrap()] {
            let text = graph_to_json(&g);
            let back = graph_from_json(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(graph_to_json(&back), text);
        }
    }

    #[test]
    fn graph_rejects_bad_files() {
        let one_way = r#"{"kind":"synthetic","root":0,"n":2,"adjacency":[[1],[]],"core":[true,true],"geometry":[]}"#;
        assert_eq!(graph_from_json(one_way).unwrap_err().param(), "adjacency");
        let bad_kind = r#"{"kind":"mesh","root":0,"n":1,"adjacency":[[]],"core":[true],"geometry":[]}"#;
        assert_eq!(graph_from_json(bad_kind).unwrap_err().param(), "kind");
        assert_eq!(graph_from_json("{").unwrap_err().param(), "json");
    }

    #[test]
    fn scheme_round_trip() {
        let s = Scheme::strip(6).unwrap();
        let text = scheme_to_json(&s);
        assert!(text.contains("[\n      6,\n      4,\n      5\n    ]"));
        assert_eq!(scheme_from_json(&text).unwrap(), s);
        let invalid = r#"{"k":5,"f":[[3,1,2],[4,1,3],[5,1,3]]}"#;
        assert_eq!(scheme_from_json(invalid).unwrap_err().param(), "scheme");
    }

    #[test]
    fn histogram_csv_shape() {
        let h = AngleHistogram {
            counts: vec![1, 3],
            total: 4,
        };
        let csv = histogram_csv(&h);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "angle_bin_center,mass");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].ends_with(",0.75"));
    }
}
