//! Text and JSON formats for complexes, functions, metrics, tower specs,
//! mapper outputs and towers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{FiniteMetricSpace, PointId, Simplex, SimplicialComplex, VertexFunction, VertexId};
use crate::cover::{
    build_ball_tower, build_dyadic_tower, build_net_tower, Certificate, Codomain, Cover, CoverTower, DyadicOptions,
    Extent, Sample,
};
use crate::error::{Error, Result};
use crate::mapper::{ComplexTower, PullbackCover};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then_some((i + 1, l))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// One maximal simplex per line as whitespace-separated vertex ids.
pub fn parse_complex(text: &str, max_dim: Option<usize>) -> Result<SimplicialComplex> {
    let mut simplices = Vec::new();
    for (line, l) in content_lines(text) {
        let s = l
            .split_whitespace()
            .map(|t| t.parse::<VertexId>().map_err(|_| parse_err(line, format!("bad vertex id {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        simplices.push(s);
    }
    SimplicialComplex::from_maximal_capped(simplices, max_dim)
}

pub fn complex_to_text(k: &SimplicialComplex) -> String {
    let mut out = String::new();
    for s in k.maximal_simplices() {
        let strs: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", strs.join(" ")).unwrap();
    }
    out
}

fn parse_pairs<T: std::str::FromStr + Clone>(text: &str, what: &str) -> Result<VertexFunction<T>> {
    let mut values = BTreeMap::new();
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(line, format!("expected `vertex_id {what}`")));
        }
        let v: VertexId = fields[0].parse().map_err(|_| parse_err(line, format!("bad vertex id {:?}", fields[0])))?;
        let x: T = fields[1].parse().map_err(|_| parse_err(line, format!("bad {what} {:?}", fields[1])))?;
        if values.insert(v, x).is_some() {
            return Err(parse_err(line, format!("vertex {v} listed twice")));
        }
    }
    Ok(VertexFunction::new(values))
}

/// Lines `vertex_id value`.
pub fn parse_real_function(text: &str) -> Result<VertexFunction<f64>> {
    let f: VertexFunction<f64> = parse_pairs(text, "value")?;
    if let Some((v, _)) = f.values().iter().find(|(_, x)| !x.is_finite()) {
        return Err(Error::InvalidElement(format!("value of vertex {v} is not finite")));
    }
    Ok(f)
}

/// Lines `vertex_id point_id`.
pub fn parse_point_function(text: &str) -> Result<VertexFunction<PointId>> {
    parse_pairs(text, "point_id")
}

/// Checks that a function is defined exactly on the vertices of `k`.
pub fn check_same_vertices<T: Clone>(k: &SimplicialComplex, f: &VertexFunction<T>) -> Result<()> {
    f.check_total(k)?;
    if let Some(v) = f.values().keys().find(|v| !k.vertices().contains(v)) {
        return Err(Error::UnknownVertex(*v));
    }
    Ok(())
}

/// CSV: first row point ids, then the rows of the distance matrix.
pub fn parse_metric_csv(text: &str) -> Result<FiniteMetricSpace> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty metric file"))?;
    let ids = header
        .split(',')
        .map(|t| t.trim().parse::<PointId>().map_err(|_| parse_err(hl, format!("bad point id {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = Vec::with_capacity(ids.len() * ids.len());
    let mut rows = 0;
    for (line, l) in lines {
        let row = l
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| parse_err(line, format!("bad distance {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != ids.len() {
            return Err(parse_err(line, format!("expected {} entries, got {}", ids.len(), row.len())));
        }
        matrix.extend(row);
        rows += 1;
    }
    if rows != ids.len() {
        return Err(parse_err(hl, format!("expected {} rows, got {rows}", ids.len())));
    }
    FiniteMetricSpace::new(ids, matrix)
}

pub fn metric_to_csv(space: &FiniteMetricSpace) -> String {
    let ids: Vec<String> = space.ids().iter().map(|p| p.to_string()).collect();
    let mut out = ids.join(",") + "\n";
    for i in 0..space.len() {
        let row: Vec<String> = (0..space.len()).map(|j| space.dist_at(i, j).to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Tower spec file: `{"type": ..., "params": {...}, "scales": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub scales: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallParams {
    /// Sample points on the segment; absent for a metric codomain.
    #[serde(default)]
    points: Option<Vec<f64>>,
    #[serde(default)]
    lo: Option<f64>,
    #[serde(default)]
    hi: Option<f64>,
    /// Sample point ids in the metric codomain (all points if absent).
    #[serde(default)]
    point_ids: Option<Vec<PointId>>,
    nu: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetParams {
    #[serde(default)]
    point_ids: Option<Vec<PointId>>,
    #[serde(default = "default_rho")]
    rho: f64,
    nu: f64,
    #[serde(default)]
    levels: Option<usize>,
}

fn default_rho() -> f64 {
    11.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DyadicParams {
    m: f64,
    s: f64,
    #[serde(default)]
    thicken: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitParams {
    /// `[lo, hi]` for a segment codomain; absent for a metric codomain.
    #[serde(default)]
    segment: Option<[f64; 2]>,
    covers: Vec<Vec<Extent>>,
    maps: Vec<Vec<usize>>,
    #[serde(default)]
    certificate: Option<Certificate>,
}

fn params<T: serde::de::DeserializeOwned>(spec: &TowerSpec) -> Result<T> {
    serde_json::from_value(spec.params.clone())
        .map_err(|e| Error::InvalidTower(format!("bad params for {} tower: {e}", spec.kind)))
}

/// Builds the tower described by `spec`. `metric` is the codomain when the
/// function takes values in a finite metric space.
pub fn build_tower(spec: &TowerSpec, metric: Option<Arc<FiniteMetricSpace>>) -> Result<CoverTower> {
    let need_metric =
        || metric.clone().ok_or_else(|| Error::Precondition(format!("{} tower needs a codomain metric", spec.kind)));
    match spec.kind.as_str() {
        "balls" => {
            let p: BallParams = params(spec)?;
            let sample = match (p.points, &metric) {
                (Some(points), _) => {
                    let lo = p.lo.unwrap_or_else(|| points.iter().copied().fold(f64::INFINITY, f64::min));
                    let hi = p.hi.unwrap_or_else(|| points.iter().copied().fold(f64::NEG_INFINITY, f64::max));
                    Sample::Line { points, lo, hi }
                }
                (None, Some(space)) => {
                    let points = p.point_ids.unwrap_or_else(|| space.ids().to_vec());
                    Sample::Metric { space: space.clone(), points }
                }
                (None, None) => {
                    return Err(Error::InvalidTower("balls tower needs `points` or a codomain metric".into()))
                }
            };
            build_ball_tower(&sample, p.nu, &spec.scales)
        }
        "nets" => {
            let p: NetParams = params(spec)?;
            let space = need_metric()?;
            let points = p.point_ids.unwrap_or_else(|| space.ids().to_vec());
            build_net_tower(space, &points, p.rho, p.nu, p.levels)
        }
        "dyadic" => {
            let p: DyadicParams = params(spec)?;
            let scales = (!spec.scales.is_empty()).then(|| spec.scales.clone());
            build_dyadic_tower(p.m, p.s, &DyadicOptions { scales, thicken: p.thicken })
        }
        "explicit" => {
            let p: ExplicitParams = params(spec)?;
            let codomain = match p.segment {
                Some([lo, hi]) => Codomain::Segment { lo, hi },
                None => Codomain::Metric(need_metric()?),
            };
            let covers =
                p.covers.into_iter().map(|els| Cover::new(codomain.clone(), els)).collect::<Result<Vec<_>>>()?;
            CoverTower::new(spec.scales.clone(), covers, p.maps, p.certificate)
        }
        other => Err(Error::InvalidTower(format!("unknown tower type {other:?}"))),
    }
}

/// Label of a nerve vertex: parent element and component.
fn label(pc: &PullbackCover, v: VertexId) -> String {
    let e = &pc.elements()[v as usize];
    format!("{}.{}", e.parent, e.component)
}

/// DOT view of the 1-skeleton of the nerve of a pullback cover.
pub fn mapper_dot(pc: &PullbackCover, nerve: &SimplicialComplex) -> String {
    let mut out = String::from("graph mapper {\n");
    for &v in nerve.vertices() {
        writeln!(out, "  {v} [label=\"{}\"];", label(pc, v)).unwrap();
    }
    for e in nerve.simplices(1) {
        writeln!(out, "  {} -- {};", e[0], e[1]).unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct NodeJson<'a> {
    id: VertexId,
    label: String,
    parent: usize,
    component: usize,
    vertices: &'a [VertexId],
}

#[derive(Serialize)]
struct MapperJson<'a> {
    nodes: Vec<NodeJson<'a>>,
    simplices: Vec<&'a Simplex>,
}

/// JSON with the nerve nodes (and the domain vertices of each element) and
/// the full simplex list.
pub fn mapper_json(pc: &PullbackCover, nerve: &SimplicialComplex) -> String {
    let nodes = nerve
        .vertices()
        .iter()
        .map(|&v| {
            let e = &pc.elements()[v as usize];
            NodeJson { id: v, label: label(pc, v), parent: e.parent, component: e.component, vertices: e.vertices() }
        })
        .collect();
    let doc = MapperJson { nodes, simplices: nerve.all_simplices().collect() };
    serde_json::to_string_pretty(&doc).unwrap()
}

#[derive(Serialize, Deserialize)]
struct TowerLevel {
    scale: f64,
    complex: Vec<Simplex>,
    vertex_map_to_next: Option<BTreeMap<VertexId, VertexId>>,
}

/// JSON array of `{scale, complex, vertex_map_to_next}`; `complex` lists
/// every simplex and the last level has no map.
pub fn tower_to_json(t: &ComplexTower) -> String {
    let levels: Vec<TowerLevel> = (0..t.len())
        .map(|i| TowerLevel {
            scale: t.scales()[i],
            complex: t.complexes()[i].all_simplices().cloned().collect(),
            vertex_map_to_next: t.maps().get(i).map(|m| m.vertex_map().clone()),
        })
        .collect();
    serde_json::to_string_pretty(&levels).unwrap()
}

pub fn tower_from_json(text: &str) -> Result<ComplexTower> {
    let levels: Vec<TowerLevel> =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    let n = levels.len();
    let mut scales = Vec::with_capacity(n);
    let mut complexes = Vec::with_capacity(n);
    let mut maps = Vec::new();
    for (i, l) in levels.into_iter().enumerate() {
        scales.push(l.scale);
        complexes.push(SimplicialComplex::from_maximal(l.complex)?);
        if i + 1 < n {
            maps.push(l.vertex_map_to_next.ok_or_else(|| Error::InvalidTower(format!("level {i} has no map")))?);
        }
    }
    ComplexTower::from_vertex_maps(scales, complexes, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapper::{mapper, pullback, Lens, Mode};

    #[test]
    fn complex_round_trip() {
        let k = parse_complex("# a triangle and a tail\n0 1 2\n\n2 3\n", None).unwrap();
        assert_eq!(k.count(1), 4);
        assert_eq!(parse_complex(&complex_to_text(&k), None).unwrap(), k);
        assert!(matches!(parse_complex("0 1\n1 x\n", None), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn functions_and_vertex_checks() {
        let k = parse_complex("0 1\n", None).unwrap();
        let f = parse_real_function("0 0.5\n1 -2\n").unwrap();
        assert!(check_same_vertices(&k, &f).is_ok());
        let extra = parse_real_function("0 0.5\n1 -2\n7 1\n").unwrap();
        assert_eq!(check_same_vertices(&k, &extra), Err(Error::UnknownVertex(7)));
        let missing = parse_real_function("0 0.5\n").unwrap();
        assert!(check_same_vertices(&k, &missing).is_err());
        assert!(matches!(parse_real_function("0 1\n0 2\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(parse_point_function("3 10\n").unwrap().get(3).unwrap(), &10);
    }

    #[test]
    fn metric_round_trip() {
        let m = parse_metric_csv("5,6\n0,1.5\n1.5,0\n").unwrap();
        assert_eq!(m.dist(5, 6).unwrap(), 1.5);
        assert_eq!(parse_metric_csv(&metric_to_csv(&m)).unwrap().dist(6, 5).unwrap(), 1.5);
        assert!(matches!(parse_metric_csv("5,6\n0,1\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn tower_specs() {
        let spec: TowerSpec = serde_json::from_str(
            r#"{"type": "balls", "params": {"points": [0, 1, 2], "nu": 0.5}, "scales": [1, 2, 4]}"#,
        )
        .unwrap();
        let t = build_tower(&spec, None).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.certificate(), Some(Certificate { c: 3.0, s: 1.0 }));

        let dy: TowerSpec = serde_json::from_str(r#"{"type": "dyadic", "params": {"m": 16, "s": 1}}"#).unwrap();
        assert_eq!(build_tower(&dy, None).unwrap().scales(), &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0]);

        let ex: TowerSpec = serde_json::from_str(
            r#"{"type": "explicit", "scales": [1, 2],
                "params": {"segment": [0, 2],
                  "covers": [[{"kind": "interval", "lo": 0, "hi": 1.2, "lo_open": false, "hi_open": false},
                              {"kind": "interval", "lo": 0.8, "hi": 2, "lo_open": false, "hi_open": false}],
                             [{"kind": "interval", "lo": 0, "hi": 2, "lo_open": false, "hi_open": false}]],
                  "maps": [[0, 0]]}}"#,
        )
        .unwrap();
        assert_eq!(build_tower(&ex, None).unwrap().cover(0).len(), 2);

        let nets: TowerSpec = serde_json::from_str(r#"{"type": "nets", "params": {"nu": 0}}"#).unwrap();
        assert!(build_tower(&nets, None).is_err());
        let bad: TowerSpec = serde_json::from_str(r#"{"type": "cones"}"#).unwrap();
        assert!(build_tower(&bad, None).is_err());
    }

    #[test]
    fn mapper_outputs() {
        let k = parse_complex("0 1\n1 2\n", None).unwrap();
        let lens = Lens::Real(parse_real_function("0 0\n1 1\n2 2\n").unwrap());
        let cover = Cover::new(
            Codomain::Segment { lo: 0.0, hi: 2.0 },
            vec![
                Extent::Interval(crate::cover::Interval::closed(0.0, 1.0)),
                Extent::Interval(crate::cover::Interval::closed(1.0, 2.0)),
            ],
        )
        .unwrap();
        let pc = pullback(&k, &lens, &cover, Mode::Combinatorial).unwrap();
        let n = mapper(&k, &lens, &cover, Mode::Combinatorial, 2).unwrap();
        let dot = mapper_dot(&pc, &n);
        assert!(dot.contains("label=\"0.0\"") && dot.contains("0 -- 1"));
        let json: Value = serde_json::from_str(&mapper_json(&pc, &n)).unwrap();
        assert_eq!(json["nodes"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn tower_json_round_trip() {
        let k = parse_complex("0 1\n1 2\n0 2\n", None).unwrap();
        let t = ComplexTower::constant(vec![1.0, 2.0, 3.0], k).unwrap();
        let back = tower_from_json(&tower_to_json(&t)).unwrap();
        assert_eq!(back.scales(), t.scales());
        assert_eq!(back.complexes()[2], t.complexes()[2]);
        assert_eq!(back.maps()[0].vertex_map(), t.maps()[0].vertex_map());
    }
}
