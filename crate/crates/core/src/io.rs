//! Patch documents (canonical JSON, one tile per line) and SVG rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::derive::{Scheme, GROUPS_JSON};
use crate::golden::{LatticePoint, Placement};
use crate::subst::{Patch, PlacedTile, System};
use crate::tiles::{polygon, StrokeClass, TileKind, CATALOG_JSON};
use crate::verify::{census, Census, PERIODIC_JSON, VERTEX_FIGURES_JSON};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed document: {0}")]
    Json(String),
    #[error("unsupported format version {0}")]
    Format(u32),
    #[error("{path}: {msg}")]
    Field { path: String, msg: String },
}

fn field(path: impl Into<String>, msg: impl Into<String>) -> ParseError {
    ParseError::Field { path: path.into(), msg: msg.into() }
}

pub fn system_name(s: System) -> String {
    s.to_string()
}

pub fn parse_system(s: &str) -> Option<System> {
    match s {
        "p2" => Some(System::P2Half),
        "p3" => Some(System::P3Rhomb),
        "t12" => Some(System::T12WithGaps),
        _ => s.strip_prefix("composite:").and_then(|x| x.parse::<Scheme>().ok()).map(System::Composite),
    }
}

// ---------------------------------------------------------------- writing

fn write_tile(out: &mut String, t: &PlacedTile) {
    let c = t.frame.t.0;
    let parent = t.parent.map_or("null".to_string(), |p| p.to_string());
    let _ = write!(
        out,
        "{{\"kind\":\"{}\",\"rot\":{},\"refl\":{},\"t\":[{},{},{},{}],\"partial\":{},\"parent\":{}}}",
        t.kind, t.frame.rot, t.frame.refl, c[0], c[1], c[2], c[3], t.partial, parent
    );
}

fn write_census(out: &mut String, c: &Census, indent: &str) {
    let _ = write!(out, "{indent}\"census\": {{\"counts\": {{");
    for (i, (k, n)) in c.counts.iter().enumerate() {
        let _ = write!(out, "{}\"{k}\": {n}", if i > 0 { ", " } else { "" });
    }
    let _ = write!(out, "}}, \"partial\": {}, \"ratios\": [", c.partial);
    for (i, r) in c.ratios.iter().enumerate() {
        let _ = write!(
            out,
            "{}{{\"of\": \"{}/{}\", \"value\": {:.6}, \"deviation\": {:.6}}}",
            if i > 0 { ", " } else { "" },
            r.numerator,
            r.denominator,
            r.value,
            r.deviation
        );
    }
    out.push_str("]}");
}

fn write_doc(out: &mut String, p: &Patch, with_census: bool, depth: usize) {
    let ind = "  ".repeat(depth + 1);
    let close = "  ".repeat(depth);
    let _ = write!(
        out,
        "{{\n{ind}\"format\": {FORMAT_VERSION},\n{ind}\"system\": \"{}\",\n{ind}\"level\": {},\n{ind}\"denom\": {},\n",
        p.system,
        p.level,
        p.denom()
    );
    if p.tiles.is_empty() {
        let _ = write!(out, "{ind}\"tiles\": []");
    } else {
        let _ = writeln!(out, "{ind}\"tiles\": [");
        for (i, t) in p.tiles.iter().enumerate() {
            out.push_str(&ind);
            out.push_str("  ");
            write_tile(out, t);
            out.push_str(if i + 1 < p.tiles.len() { ",\n" } else { "\n" });
        }
        let _ = write!(out, "{ind}]");
    }
    if with_census {
        out.push_str(",\n");
        write_census(out, &census(p), &ind);
    }
    if let Some(src) = &p.source {
        let _ = write!(out, ",\n{ind}\"source\": ");
        write_doc(out, src, false, depth + 1);
    }
    let _ = write!(out, "\n{close}}}");
}

/// Canonical JSON text: tiles in canonical order, one per line, newline-terminated.
pub fn serialize(p: &Patch) -> String {
    serialize_with(p, false)
}

pub fn serialize_with(p: &Patch, with_census: bool) -> String {
    let mut q = p.clone();
    canonicalize_deep(&mut q);
    let mut out = String::new();
    write_doc(&mut out, &q, with_census, 0);
    out.push('\n');
    out
}

fn canonicalize_deep(p: &mut Patch) {
    p.canonicalize();
    if let Some(s) = p.source.as_mut() {
        canonicalize_deep(s);
    }
}

// ---------------------------------------------------------------- reading

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTile {
    kind: String,
    rot: i64,
    refl: bool,
    t: [i64; 4],
    partial: bool,
    parent: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    format: u32,
    system: String,
    level: u32,
    denom: i64,
    tiles: Vec<RawTile>,
    #[serde(default)]
    census: Option<serde_json::Value>,
    #[serde(default)]
    source: Option<Box<RawDoc>>,
}

fn convert(d: RawDoc, path: &str) -> Result<Patch, ParseError> {
    if d.format != FORMAT_VERSION {
        return Err(ParseError::Format(d.format));
    }
    let system = parse_system(&d.system)
        .ok_or_else(|| field(format!("{path}system"), format!("unknown system `{}`", d.system)))?;
    if d.denom != system.denom() {
        return Err(field(format!("{path}denom"), format!("{} patches use denom {}", system, system.denom())));
    }
    if let Some(c) = &d.census {
        if !c.is_object() {
            return Err(field(format!("{path}census"), "expected an object"));
        }
    }
    let source = d.source.map(|s| convert(*s, &format!("{path}source.")).map(Box::new)).transpose()?;
    let src_len = source.as_ref().map(|s| s.tiles.len());
    let mut tiles = Vec::with_capacity(d.tiles.len());
    for (i, t) in d.tiles.into_iter().enumerate() {
        let at = |f: &str| format!("{path}tiles[{i}].{f}");
        let kind: TileKind =
            t.kind.parse().map_err(|_| field(at("kind"), format!("unknown tile kind `{}`", t.kind)))?;
        if !(0..10).contains(&t.rot) {
            return Err(field(at("rot"), format!("rotation {} is outside 0..10", t.rot)));
        }
        if let (Some(p), Some(n)) = (t.parent, src_len) {
            if p as usize >= n {
                return Err(field(at("parent"), format!("index {p} beyond the {n} source tiles")));
            }
        }
        tiles.push(PlacedTile {
            kind,
            frame: Placement::new(t.rot as i32, t.refl, LatticePoint(t.t)),
            level: d.level,
            partial: t.partial,
            parent: t.parent,
        });
    }
    Ok(Patch { system, level: d.level, tiles, source })
}

pub fn parse(text: &str) -> Result<Patch, ParseError> {
    let raw: RawDoc = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    convert(raw, "")
}

// ---------------------------------------------------------------- data versions

/// (file, format version, first 16 hex digits of its SHA-256)
pub fn data_versions() -> Vec<(&'static str, u32, String)> {
    let hash = |s: &str| {
        let d = Sha256::digest(s.as_bytes());
        d.iter().take(8).map(|b| format!("{b:02x}")).collect::<String>()
    };
    vec![
        ("catalog.json", crate::tiles::catalog_version(), hash(CATALOG_JSON)),
        ("groups.json", crate::derive::groups_version(), hash(GROUPS_JSON)),
        ("periodic.json", crate::verify::periodic_version(), hash(PERIODIC_JSON)),
        ("vertex_figures.json", crate::verify::vertex_figures_version(), hash(VERTEX_FIGURES_JSON)),
    ]
}

// ---------------------------------------------------------------- SVG

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub decorations: bool,
    pub highlight_gaps: bool,
    pub stroke_width: f64,
    /// pixels per rhomb edge
    pub scale: f64,
    /// fill colour per kind; kinds not listed fall back to the built-in palette
    pub palette: BTreeMap<TileKind, String>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            decorations: false,
            highlight_gaps: false,
            stroke_width: 1.0,
            scale: 20.0,
            palette: BTreeMap::new(),
        }
    }
}

fn default_fill(k: TileKind) -> &'static str {
    use TileKind::*;
    match k {
        HalfKiteL | HalfKiteR | Kite => "#f2c14e",
        HalfDartL | HalfDartR | Dart => "#5b8e7d",
        ThinRhomb | HalfThinL | HalfThinR => "#e8e1d0",
        ThickRhomb | HalfThickL | HalfThickR => "#8da9c4",
        T1 | Snake | T8 | T10 => "#d98f6a",
        T2 | Dog | T9 | T11 => "#7fa7b8",
        T3 => "#b9a6d3",
        T12 => "#e9d8a6",
        T13 => "#94d2bd",
        T14 => "#0a9396",
        GapTriangle | GapQuad | RotorA | RotorB | RotorC => "#d9d9d9",
    }
}

fn gap_fill(k: TileKind) -> &'static str {
    match k {
        TileKind::GapTriangle => "#ae2012",
        TileKind::GapQuad => "#ee9b00",
        TileKind::RotorA => "#9b2226",
        TileKind::RotorB => "#bb3e03",
        _ => "#ca6702",
    }
}

fn coords(p: LatticePoint, denom: i64, scale: f64) -> (f64, f64) {
    let (x, y) = p.embed();
    let k = scale / denom as f64;
    // SVG's y axis points down
    (x * k, -y * k)
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// One closed path per tile; deterministic given the patch and options.
pub fn render_svg(p: &Patch, opts: &RenderOptions) -> String {
    let mut q = p.clone();
    q.canonicalize();
    let denom = q.denom();
    let polys: Vec<Vec<(f64, f64)>> = (0..q.tiles.len())
        .map(|i| q.tile_vertices(i).into_iter().map(|v| coords(v, denom, opts.scale)).collect())
        .collect();
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if let Some(first) = polys.iter().flatten().next() {
        (x0, y0, x1, y1) = (first.0, first.1, first.0, first.1);
    }
    for &(x, y) in polys.iter().flatten() {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let pad = 2.0 * opts.stroke_width + 1.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\">",
        num(x0 - pad),
        num(y0 - pad),
        num(x1 - x0 + 2.0 * pad),
        num(y1 - y0 + 2.0 * pad),
        num(x1 - x0 + 2.0 * pad),
        num(y1 - y0 + 2.0 * pad)
    );
    let _ = writeln!(s, "<g stroke=\"#222222\" stroke-width=\"{}\" stroke-linejoin=\"round\">", num(opts.stroke_width));
    for (t, poly) in q.tiles.iter().zip(&polys) {
        let fill = match opts.palette.get(&t.kind) {
            Some(c) => c.as_str(),
            None if opts.highlight_gaps && t.kind.is_gap() => gap_fill(t.kind),
            None => default_fill(t.kind),
        };
        let mut d = String::new();
        for (i, (x, y)) in poly.iter().enumerate() {
            let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, num(*x), num(*y));
        }
        d.push_str(" Z");
        let extra = if t.partial { " fill-opacity=\"0.45\"" } else { "" };
        let _ = writeln!(s, "<path class=\"{}\" d=\"{d}\" fill=\"{fill}\"{extra}/>", t.kind);
    }
    s.push_str("</g>\n");
    if opts.decorations {
        let _ =
            writeln!(s, "<g fill=\"none\" stroke-width=\"{}\" stroke-linecap=\"round\">", num(opts.stroke_width * 0.5));
        for t in &q.tiles {
            let r = polygon(t.kind);
            let k = denom / r.denom;
            for st in &r.decoration {
                let (ax, ay) = coords(t.frame.apply(st.from.scale(k)), denom, opts.scale);
                let (bx, by) = coords(t.frame.apply(st.to.scale(k)), denom, opts.scale);
                let colour = match st.class {
                    StrokeClass::RhombEdge => "#555555",
                    StrokeClass::Subdivision => "#1d3557",
                    StrokeClass::Axis => "#999999",
                };
                let _ = writeln!(
                    s,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{colour}\"/>",
                    num(ax),
                    num(ay),
                    num(bx),
                    num(by)
                );
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subst::{inflate, p2_seed, Seed};

    #[test]
    fn empty_patch_document() {
        let p = Patch::new(System::P3Rhomb, 0, vec![]);
        let text = serialize(&p);
        assert!(text.contains("\"tiles\": []"));
        assert!(text.ends_with("}\n"));
        assert_eq!(parse(&text).unwrap(), p);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let p = inflate(&p2_seed(Seed::Sun), 3).unwrap();
        let a = serialize(&p);
        let b = serialize(&parse(&a).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.lines().filter(|l| l.contains("\"kind\"")).count(), p.tiles.len());
    }

    #[test]
    fn rot_ten_is_rejected() {
        let text = serialize(&p2_seed(Seed::Kite));
        let i = text.find("\"rot\":").unwrap() + 6;
        let j = i + text[i..].find(',').unwrap();
        let forced = format!("{}10{}", &text[..i], &text[j..]);
        assert!(matches!(parse(&forced), Err(ParseError::Field { ref path, .. }) if path == "tiles[0].rot"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = serialize(&p2_seed(Seed::Kite)).replacen("\"format\"", "\"colour\": 1,\n  \"format\"", 1);
        assert!(matches!(parse(&text), Err(ParseError::Json(_))));
    }

    #[test]
    fn empty_svg_is_valid() {
        let s = render_svg(&Patch::new(System::P2Half, 0, vec![]), &RenderOptions::default());
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(!s.contains("<path"));
    }

    #[test]
    fn svg_has_one_path_per_tile() {
        let p = inflate(&p2_seed(Seed::Sun), 2).unwrap();
        let s = render_svg(&p, &RenderOptions { decorations: true, ..Default::default() });
        assert_eq!(s.matches("<path").count(), p.tiles.len());
        assert_eq!(s, render_svg(&p, &RenderOptions { decorations: true, ..Default::default() }));
    }

    #[test]
    fn systems_round_trip() {
        for s in [System::P2Half, System::P3Rhomb, System::T12WithGaps]
            .into_iter()
            .chain(Scheme::ALL.into_iter().map(System::Composite))
        {
            assert_eq!(parse_system(&system_name(s)), Some(s));
        }
    }
}
