//! Exact checkers: overlap and edge-to-edge matching, P2 vertex stars,
//! periodic constructions with a bounded periodicity search, and censuses.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Deserialize;

use crate::derive::{bbox, classify_gap, corner_units, p2_halves, pieces_disjoint, uncovered_faces, BoxGrid, Scheme};
use crate::golden::{angle_cmp, area2, cross, in_segment_interior, simplify, GoldenInt, LatticePoint, Placement};
use crate::subst::{Patch, PlacedTile, System};
use crate::tiles::TileKind;

pub const PERIODIC_JSON: &str = include_str!("../data/periodic.json");
pub const VERTEX_FIGURES_JSON: &str = include_str!("../data/vertex_figures.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Overlap,
    EdgeMismatch,
    IllegalVertexFigure,
    UnknownGap,
    PartitionHole,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::Overlap => "Overlap",
            ViolationKind::EdgeMismatch => "EdgeMismatch",
            ViolationKind::IllegalVertexFigure => "IllegalVertexFigure",
            ViolationKind::UnknownGap => "UnknownGap",
            ViolationKind::PartitionHole => "PartitionHole",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    /// a vertex of the offending tile(s), on the patch grid
    pub location: LatticePoint,
    pub detail: String,
    /// for an edge mismatch: the tile kind and edge index that has the stray vertex
    pub edge: Option<(TileKind, usize)>,
}

impl Violation {
    fn new(kind: ViolationKind, location: LatticePoint, detail: String) -> Self {
        Violation { kind, location, detail, edge: None }
    }

    /// The long edge of T9 (and of T11, same outline) is never matched by a
    /// single edge: its neighbours always split it into φ³ + φ² pieces. These
    /// T-junctions are counted but do not make a T8–T11 tiling invalid.
    pub fn is_incomplete_edge(&self) -> bool {
        matches!(self.edge, Some((TileKind::T9 | TileKind::T11, 1)))
    }
}

/// Violations that invalidate a patch of the given system. T12 patches are
/// never edge-to-edge (T12 corners land inside neighbouring edges), so only
/// overlaps and holes count there.
pub fn fatal(system: System, vs: &[Violation]) -> Vec<&Violation> {
    vs.iter()
        .filter(|v| match system {
            System::Composite(Scheme::T8T9 | Scheme::T10T11) => !v.is_incomplete_edge(),
            System::T12WithGaps => v.kind != ViolationKind::EdgeMismatch,
            _ => true,
        })
        .collect()
}

/// A T12 patch with its gap tiles must cover a region without holes: every
/// uncovered pocket is reported, as an unknown gap when its shape is not one of
/// the five, as a partition hole otherwise.
pub fn check_partition(p: &Patch) -> Vec<Violation> {
    if p.system != System::T12WithGaps {
        return Vec::new();
    }
    let polys = all_vertices(p);
    let mut out: Vec<Violation> = uncovered_faces(&polys)
        .into_iter()
        .filter(|f| area2(f).signum() > 0)
        .map(|f| {
            let at = *f.iter().min().unwrap();
            match classify_gap(&f, p.denom()) {
                None => Violation::new(
                    ViolationKind::UnknownGap,
                    at,
                    format!("{}-sided uncovered region", simplify(&f).len()),
                ),
                Some((k, _)) => Violation::new(ViolationKind::PartitionHole, at, format!("uncovered {k}")),
            }
        })
        .collect();
    out.sort();
    out
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}: {}", self.kind.name(), self.location.0, self.detail)
    }
}

fn tile_label(p: &Patch, i: usize) -> String {
    let t = &p.tiles[i];
    format!("#{i} {}@{}{}", t.kind, t.frame.rot, if t.frame.refl { "'" } else { "" })
}

fn all_vertices(p: &Patch) -> Vec<Vec<LatticePoint>> {
    (0..p.tiles.len()).into_par_iter().map(|i| p.tile_vertices(i)).collect()
}

/// Empty iff tiles are interior-disjoint and meet edge-to-edge: no vertex of
/// any tile lies strictly inside an edge of another.
pub fn check_edge_matching(p: &Patch) -> Vec<Violation> {
    let denom = p.denom();
    let polys = all_vertices(p);
    let cell = 4.0 * denom as f64;
    let boxes: Vec<_> = polys.iter().map(|v| bbox(v)).collect();
    let mut grid = BoxGrid::new(cell);
    for (i, b) in boxes.iter().enumerate() {
        grid.insert(i, *b);
    }
    let mut out: Vec<Violation> = (0..polys.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut v = Vec::new();
            for j in grid.query(boxes[i]) {
                if j <= i || !boxes_meet(boxes[i], boxes[j]) {
                    continue;
                }
                if !pieces_disjoint(&p.tiles[i], &p.tiles[j], denom) {
                    v.push(Violation::new(
                        ViolationKind::Overlap,
                        polys[i][0],
                        format!("{} overlaps {}", tile_label(p, i), tile_label(p, j)),
                    ));
                }
            }
            v
        })
        .collect();

    let mut pts: Vec<LatticePoint> = polys.iter().flatten().copied().collect();
    pts.sort_unstable();
    pts.dedup();
    let mut vgrid = BoxGrid::new(cell);
    for (i, q) in pts.iter().enumerate() {
        let (x, y) = q.embed();
        vgrid.insert(i, (x, y, x, y));
    }
    let tj: Vec<Violation> = (0..polys.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let poly = &polys[i];
            let n = poly.len();
            let mut v = Vec::new();
            for e in 0..n {
                let (a, b) = (poly[e], poly[(e + 1) % n]);
                for k in vgrid.query(bbox(&[a, b])) {
                    if in_segment_interior(pts[k], a, b) && !poly.contains(&pts[k]) {
                        v.push(Violation {
                            kind: ViolationKind::EdgeMismatch,
                            location: pts[k],
                            detail: format!("vertex lies inside edge {e} of {}", tile_label(p, i)),
                            edge: Some((p.tiles[i].kind, e)),
                        });
                    }
                }
            }
            v
        })
        .collect();
    out.extend(tj);
    out.sort();
    out
}

fn boxes_meet(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> bool {
    let e = 1e-6;
    a.0 <= b.2 + e && b.0 <= a.2 + e && a.1 <= b.3 + e && b.1 <= a.3 + e
}

// ---------------------------------------------------------------- vertex figures

#[derive(Deserialize)]
struct RawFigures {
    version: u32,
    figures: Vec<Vec<String>>,
}

struct Figures {
    version: u32,
    legal: HashSet<Vec<String>>,
}

fn canonical_cycle(seq: &[String]) -> Vec<String> {
    let n = seq.len();
    let mut rev = seq.to_vec();
    rev.reverse();
    let mut best: Option<Vec<String>> = None;
    for s in [seq.to_vec(), rev] {
        for r in 0..n.max(1) {
            let c: Vec<String> = s[r..].iter().chain(s[..r].iter()).cloned().collect();
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
    }
    best.unwrap_or_default()
}

fn figures() -> &'static Figures {
    static F: OnceLock<Figures> = OnceLock::new();
    F.get_or_init(|| {
        let raw: RawFigures = serde_json::from_str(VERTEX_FIGURES_JSON).expect("vertex_figures.json parses");
        Figures { version: raw.version, legal: raw.figures.iter().map(|f| canonical_cycle(f)).collect() }
    })
}

pub fn vertex_figures_version() -> u32 {
    figures().version
}

/// The seven legal P2 vertex stars, each as a canonical cyclic list of corner roles.
pub fn legal_vertex_figures() -> Vec<Vec<String>> {
    let mut v: Vec<_> = figures().legal.iter().cloned().collect();
    v.sort();
    v
}

struct Corner {
    role: &'static str,
    /// whole tile, for merging the two halves of a split corner
    owner: (bool, LatticePoint, LatticePoint),
    split: bool,
    start: LatticePoint,
}

/// Every vertex whose surrounding angle is a full turn must carry one of the
/// seven legal stars; boundary vertices are skipped.
pub fn check_vertex_figures(p: &Patch) -> Vec<Violation> {
    if p.system != System::P2Half {
        return Vec::new();
    }
    let halves = p2_halves(p);
    let mut at: HashMap<LatticePoint, Vec<Corner>> = HashMap::new();
    let mut angle: HashMap<LatticePoint, u32> = HashMap::new();
    for h in &halves {
        let units = corner_units(h.kite);
        let roles: [(&str, bool); 3] = if h.kite {
            [("kite-apex", true), ("kite-tail", true), ("kite-side", false)]
        } else {
            [("dart-reflex", true), ("dart-tip", true), ("dart-side", false)]
        };
        let corners = [h.apex, h.axis, h.side];
        for c in 0..3 {
            let v = corners[c];
            let (x, y) = (corners[(c + 1) % 3] - v, corners[(c + 2) % 3] - v);
            let start = if cross(x, y).signum() > 0 { x } else { y };
            *angle.entry(v).or_insert(0) += units[c];
            at.entry(v).or_default().push(Corner {
                role: roles[c].0,
                owner: (h.kite, h.apex, h.axis),
                split: roles[c].1,
                start,
            });
        }
    }
    let legal = &figures().legal;
    let mut out: Vec<Violation> = at
        .into_par_iter()
        .filter(|(v, _)| angle[v] == 10)
        .filter_map(|(v, mut cs)| {
            cs.sort_by(|a, b| angle_cmp(a.start, b.start));
            let n = cs.len();
            let seq: Vec<String> = (0..n)
                .filter(|&i| {
                    let prev = &cs[(i + n - 1) % n];
                    !(cs[i].split && prev.split && prev.owner == cs[i].owner && prev.role == cs[i].role)
                })
                .map(|i| cs[i].role.to_string())
                .collect();
            let canon = canonical_cycle(&seq);
            (!legal.contains(&canon)).then(|| Violation::new(ViolationKind::IllegalVertexFigure, v, canon.join(",")))
        })
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------- periodic constructions

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodicName {
    Fig9a,
    Fig9b,
}

impl PeriodicName {
    pub fn name(self) -> &'static str {
        match self {
            PeriodicName::Fig9a => "fig9a",
            PeriodicName::Fig9b => "fig9b",
        }
    }
}

impl std::str::FromStr for PeriodicName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig9a" => Ok(PeriodicName::Fig9a),
            "fig9b" => Ok(PeriodicName::Fig9b),
            _ => Err(format!("unknown periodic construction `{s}`")),
        }
    }
}

#[derive(Deserialize)]
struct RawTile {
    kind: String,
    rot: i32,
    refl: bool,
    t: [i64; 4],
}

#[derive(Deserialize)]
struct RawDomain {
    u: [i64; 4],
    v: [i64; 4],
    tiles: Vec<RawTile>,
}

#[derive(Deserialize)]
struct RawPeriodic {
    version: u32,
    domains: BTreeMap<String, RawDomain>,
}

pub struct Domain {
    pub u: LatticePoint,
    pub v: LatticePoint,
    pub tiles: Vec<(TileKind, Placement)>,
}

fn domains() -> &'static (u32, BTreeMap<String, Domain>) {
    static D: OnceLock<(u32, BTreeMap<String, Domain>)> = OnceLock::new();
    D.get_or_init(|| {
        let raw: RawPeriodic = serde_json::from_str(PERIODIC_JSON).expect("periodic.json parses");
        let d = raw
            .domains
            .into_iter()
            .map(|(k, d)| {
                let tiles = d
                    .tiles
                    .iter()
                    .map(|t| (t.kind.parse().expect("tile kind"), Placement::new(t.rot, t.refl, LatticePoint(t.t))))
                    .collect();
                (k, Domain { u: LatticePoint(d.u), v: LatticePoint(d.v), tiles })
            })
            .collect();
        (raw.version, d)
    })
}

pub fn periodic_version() -> u32 {
    domains().0
}

pub fn fundamental_domain(name: PeriodicName) -> &'static Domain {
    &domains().1[name.name()]
}

/// The fundamental domain repeated `a × b` times along its two periods.
pub fn periodic_tiling(name: PeriodicName, copies: (u32, u32)) -> Patch {
    let d = fundamental_domain(name);
    let system = match name {
        PeriodicName::Fig9a => System::Composite(Scheme::T8T9),
        PeriodicName::Fig9b => System::Composite(Scheme::T10T11),
    };
    let mut tiles = Vec::new();
    for i in 0..copies.0 as i64 {
        for j in 0..copies.1 as i64 {
            let shift = d.u.scale(i) + d.v.scale(j);
            for (kind, pl) in &d.tiles {
                tiles.push(PlacedTile::new(*kind, Placement { t: pl.t + shift, ..*pl }, 0));
            }
        }
    }
    let mut p = Patch::new(system, 0, tiles);
    p.canonicalize();
    p
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicityWitness {
    pub u: LatticePoint,
    pub v: LatticePoint,
    /// tiles of the core window, which both translations carry onto tiles
    pub domain: Vec<PlacedTile>,
}

#[derive(Debug, Clone, Copy)]
pub struct PeriodicitySearch {
    /// core window radius in patch units; `None` means half the inradius
    pub radius: Option<f64>,
    pub max_candidates: usize,
}

impl Default for PeriodicitySearch {
    fn default() -> Self {
        PeriodicitySearch { radius: None, max_candidates: 10_000 }
    }
}

/// Centre of the patch and the distance from it to the nearest point of the
/// patch boundary (outer boundary or hole).
pub fn inradius(p: &Patch) -> ((f64, f64), f64) {
    let polys = all_vertices(p);
    if polys.is_empty() {
        return ((0.0, 0.0), 0.0);
    }
    let n = polys.len() as f64;
    let (mut cx, mut cy) = (0.0, 0.0);
    for poly in &polys {
        let (x, y) = poly[0].embed();
        cx += x / n;
        cy += y / n;
    }
    let r = uncovered_faces(&polys)
        .iter()
        .flat_map(|f| (0..f.len()).map(move |i| (f[i].embed(), f[(i + 1) % f.len()].embed())))
        .map(|((ax, ay), (bx, by))| {
            let (dx, dy) = (bx - ax, by - ay);
            let s = (((cx - ax) * dx + (cy - ay) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            ((ax + s * dx - cx).powi(2) + (ay + s * dy - cy).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    ((cx, cy), if r.is_finite() { r } else { 0.0 })
}

/// Bounded search for two independent translations that carry every tile of a
/// central window onto a tile of the patch. `None` is evidence of
/// nonperiodicity at this radius, never proof.
pub fn find_periodicity(p: &Patch, opts: PeriodicitySearch) -> Option<PeriodicityWitness> {
    if p.tiles.len() < 2 {
        return None;
    }
    let ((cx, cy), r_in) = inradius(p);
    let radius = opts.radius.unwrap_or(r_in / 2.0);
    let present: HashSet<(TileKind, u8, bool, LatticePoint)> =
        p.tiles.iter().map(|t| (t.kind, t.frame.rot, t.frame.refl, t.frame.t)).collect();
    let dist = |q: LatticePoint| {
        let (x, y) = q.embed();
        ((x - cx).powi(2) + (y - cy).powi(2)).sqrt()
    };
    let core: Vec<&PlacedTile> = p.tiles.iter().filter(|t| dist(t.frame.t) <= radius).collect();
    let anchor = *core
        .iter()
        .min_by(|a, b| dist(a.frame.t).total_cmp(&dist(b.frame.t)).then(a.sort_key().cmp(&b.sort_key())))?;
    let mut cands: Vec<LatticePoint> = p
        .tiles
        .iter()
        .filter(|t| (t.kind, t.frame.rot, t.frame.refl) == (anchor.kind, anchor.frame.rot, anchor.frame.refl))
        .map(|t| t.frame.t - anchor.frame.t)
        .filter(|d| *d != LatticePoint::ZERO)
        .collect();
    let len = |d: &LatticePoint| d.norm2x().value();
    cands.sort_by(|a, b| len(a).total_cmp(&len(b)).then(a.cmp(b)));
    cands.truncate(opts.max_candidates);
    let periods: Vec<LatticePoint> = cands
        .par_iter()
        .filter(|d| core.iter().all(|t| present.contains(&(t.kind, t.frame.rot, t.frame.refl, t.frame.t + **d))))
        .copied()
        .collect();
    let u = *periods.first()?;
    let v = *periods.iter().find(|v| !cross(u, **v).is_zero())?;
    Some(PeriodicityWitness { u, v, domain: core.into_iter().copied().collect() })
}

// ---------------------------------------------------------------- census

#[derive(Debug, Clone, PartialEq)]
pub struct Ratio {
    pub numerator: &'static str,
    pub denominator: &'static str,
    pub value: f64,
    /// |value − φ| / φ
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Census {
    /// non-partial tiles per kind
    pub counts: BTreeMap<TileKind, usize>,
    pub partial: usize,
    pub ratios: Vec<Ratio>,
}

impl Census {
    pub fn get(&self, kind: TileKind) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn ratio(&self, numerator: &str) -> Option<&Ratio> {
        self.ratios.iter().find(|r| r.numerator == numerator)
    }
}

/// Pairs whose counts approach φ : 1 on large patches.
const RATIO_PAIRS: [(&str, &[TileKind], &str, &[TileKind]); 7] = [
    ("kite", &[TileKind::HalfKiteL, TileKind::HalfKiteR], "dart", &[TileKind::HalfDartL, TileKind::HalfDartR]),
    (
        "thick",
        &[TileKind::ThickRhomb, TileKind::HalfThickL, TileKind::HalfThickR],
        "thin",
        &[TileKind::ThinRhomb, TileKind::HalfThinL, TileKind::HalfThinR],
    ),
    ("T2", &[TileKind::T2], "T1", &[TileKind::T1]),
    ("T3", &[TileKind::T3], "T2", &[TileKind::T2]),
    ("Dog", &[TileKind::Dog], "Snake", &[TileKind::Snake]),
    ("T9", &[TileKind::T9], "T8", &[TileKind::T8]),
    ("T11", &[TileKind::T11], "T10", &[TileKind::T10]),
];

pub fn census(p: &Patch) -> Census {
    let mut c = Census::default();
    for t in &p.tiles {
        if t.partial {
            c.partial += 1;
        } else {
            *c.counts.entry(t.kind).or_insert(0) += 1;
        }
    }
    let phi = GoldenInt::PHI.value();
    for (num, nk, den, dk) in RATIO_PAIRS {
        // halves of P2 tiles and of P3 rhombs weigh one half
        let weight = |kinds: &[TileKind]| -> f64 {
            kinds
                .iter()
                .map(|k| c.get(*k) as f64 * if k.is_p2_half() || k.name().starts_with("Half") { 0.5 } else { 1.0 })
                .sum()
        };
        let (a, b) = (weight(nk), weight(dk));
        if a > 0.0 && b > 0.0 {
            let value = a / b;
            c.ratios.push(Ratio { numerator: num, denominator: den, value, deviation: (value - phi).abs() / phi });
        }
    }
    c
}
