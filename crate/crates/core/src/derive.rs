//! Local derivations: P2 → P3 stamping, regrouping into composite schemes,
//! T12 placement with gap classification, rotor subdivision and the
//! half-rhomb shifts between composite shapes.
//!
//! Everything here is driven by the parent tree: each P3 rhomb records the P2
//! half-tile it was stamped from, and composites are placed from the frames of
//! whole kites and darts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Deserialize;

use crate::golden::{
    angle_cmp, area2, convex_disjoint, cross, direction_index, dot2, in_segment_interior, locate, orient, simplify,
    GoldenInt, GoldenRat, LatticePoint, Location, Placement,
};
use crate::subst::{tile_vertices, whole_frame, Half, Patch, PlacedTile, System};
use crate::tiles::{
    area_units, polygon, robinson_decomposition, rotor_subdivision, shift_data, HalfRhombMove, TileKind,
};

pub const GROUPS_JSON: &str = include_str!("../data/groups.json");

/// Stamping deflates each P2 half this many times; P2 lengths scale by φ⁴ into rhomb units.
pub const STAMP_DEPTH: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeriveError {
    #[error("expected a {expected} patch, got {got}")]
    WrongSystem { expected: &'static str, got: System },
    #[error("patch has no source P2 patch to derive from")]
    NoSource,
    #[error("{0} interior half-rhombs could not be merged")]
    Unmergeable(usize),
    #[error("{0} interior rhomb triangles have no composite")]
    Unassigned(usize),
    #[error("{op} is not defined for {kind}")]
    Unsupported { op: &'static str, kind: TileKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    T1T2,
    T2T3,
    SnakeDog,
    T8T9,
    T10T11,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::T1T2, Scheme::T2T3, Scheme::SnakeDog, Scheme::T8T9, Scheme::T10T11];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::T1T2 => "t1t2",
            Scheme::T2T3 => "t2t3",
            Scheme::SnakeDog => "snakedog",
            Scheme::T8T9 => "t8t9",
            Scheme::T10T11 => "t10t11",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Scheme::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Deserialize)]
struct RawPl {
    kind: String,
    rot: i32,
    refl: bool,
    t: [i64; 4],
}

#[derive(Deserialize)]
struct RawSide {
    kite: Vec<RawPl>,
    dart: Vec<RawPl>,
}

#[derive(Deserialize)]
struct RawGroups {
    version: u32,
    schemes: BTreeMap<String, RawSide>,
    t12: RawSide,
}

struct Groups {
    version: u32,
    tables: HashMap<(Scheme, TileKind), Vec<(TileKind, Placement)>>,
    t12: HashMap<TileKind, (TileKind, Placement)>,
}

fn resolve(v: &[RawPl]) -> Vec<(TileKind, Placement)> {
    v.iter().map(|p| (p.kind.parse().expect("group kind"), Placement::new(p.rot, p.refl, LatticePoint(p.t)))).collect()
}

fn groups() -> &'static Groups {
    static G: OnceLock<Groups> = OnceLock::new();
    G.get_or_init(|| {
        let raw: RawGroups = serde_json::from_str(GROUPS_JSON).expect("groups.json parses");
        let mut tables = HashMap::new();
        for (name, side) in &raw.schemes {
            let s: Scheme = name.parse().expect("scheme");
            tables.insert((s, TileKind::Kite), resolve(&side.kite));
            tables.insert((s, TileKind::Dart), resolve(&side.dart));
        }
        let mut t12 = HashMap::new();
        t12.insert(TileKind::Kite, resolve(&raw.t12.kite)[0]);
        t12.insert(TileKind::Dart, resolve(&raw.t12.dart)[0]);
        Groups { version: raw.version, tables, t12 }
    })
}

pub fn groups_version() -> u32 {
    groups().version
}

/// Composites carried by a whole kite or dart in its rhomb-unit frame: kite apex
/// at the origin with its axis along ζ⁰ and long edge φ⁵; dart reflex corner at
/// the origin with its tip at φ⁴ζ⁰.
pub fn group_table(scheme: Scheme, parent: TileKind) -> &'static [(TileKind, Placement)] {
    &groups().tables[&(scheme, parent)]
}

/// The T12 carried by a whole kite or dart; translation in rhomb units, the T12
/// polygon itself on the 1/11 grid.
pub fn t12_table(parent: TileKind) -> (TileKind, Placement) {
    groups().t12[&parent]
}

// ---------------------------------------------------------------- P2 structure

/// A kite or dart assembled from its two halves.
#[derive(Debug, Clone)]
pub struct WholeTile {
    pub kind: TileKind,
    /// P2 units
    pub frame: Placement,
    pub halves: Vec<usize>,
    pub complete: bool,
    /// complete, and every corner is surrounded by complete tiles of the patch
    pub interior: bool,
}

/// Corner angles of a half-tile in units of 36°, for apex, axis end, side corner.
pub(crate) fn corner_units(kite: bool) -> [u32; 3] {
    if kite {
        [1, 2, 2]
    } else {
        [3, 1, 1]
    }
}

pub(crate) fn p2_halves(p: &Patch) -> Vec<Half> {
    p.tiles.iter().map(|t| Half::from_tile(t).expect("P2 half-tile")).collect()
}

/// Total angle (36° units) of all half-tiles meeting at each vertex.
pub(crate) fn vertex_angles(halves: &[Half]) -> HashMap<LatticePoint, u32> {
    let mut m = HashMap::new();
    for h in halves {
        let u = corner_units(h.kite);
        for (v, a) in [h.apex, h.axis, h.side].into_iter().zip(u) {
            *m.entry(v).or_insert(0) += a;
        }
    }
    m
}

/// Whole tiles of a P2 patch and, per half, the index of its whole tile.
pub fn whole_tiles(p: &Patch) -> (Vec<WholeTile>, Vec<usize>) {
    let halves = p2_halves(p);
    let angles = vertex_angles(&halves);
    let mut by_axis: BTreeMap<(bool, LatticePoint, LatticePoint), Vec<usize>> = BTreeMap::new();
    for (i, h) in halves.iter().enumerate() {
        by_axis.entry((h.kite, h.apex, h.axis)).or_default().push(i);
    }
    let mut wholes = Vec::new();
    let mut owner = vec![0; halves.len()];
    for ((kite, _, _), idx) in by_axis {
        for &i in &idx {
            owner[i] = wholes.len();
        }
        wholes.push(WholeTile {
            kind: if kite { TileKind::Kite } else { TileKind::Dart },
            frame: whole_frame(&halves[idx[0]]),
            complete: idx.len() == 2,
            halves: idx,
            interior: false,
        });
    }
    // a vertex is settled when it is surrounded and every tile at it is whole
    let mut settled: HashMap<LatticePoint, bool> = angles.iter().map(|(v, a)| (*v, *a == 10)).collect();
    for (i, h) in halves.iter().enumerate() {
        if !wholes[owner[i]].complete {
            for v in [h.apex, h.axis, h.side] {
                settled.insert(v, false);
            }
        }
    }
    for w in &mut wholes {
        w.interior = w.complete
            && w.halves.iter().all(|&i| {
                let h = &halves[i];
                [h.apex, h.axis, h.side].iter().all(|v| settled[v])
            });
    }
    (wholes, owner)
}

// ---------------------------------------------------------------- stamping

#[derive(Debug, Clone, Copy)]
struct Tri {
    thick: bool,
    a: LatticePoint,
    b: LatticePoint,
    c: LatticePoint,
    parent: u32,
}

fn ip(x: LatticePoint, y: LatticePoint) -> LatticePoint {
    x + (y - x).div_phi()
}

fn split(t: Tri, out: &mut Vec<Tri>) {
    let Tri { a, b, c, parent, .. } = t;
    if !t.thick {
        let p = ip(a, b);
        out.push(Tri { thick: false, a: c, b: p, c: b, parent });
        out.push(Tri { thick: true, a: p, b: c, c: a, parent });
    } else {
        let q = ip(b, a);
        let r = ip(b, c);
        out.push(Tri { thick: true, a: r, b: c, c: a, parent });
        out.push(Tri { thick: true, a: q, b: r, c: b, parent });
        out.push(Tri { thick: false, a: r, b: q, c: a, parent });
    }
}

fn stamp_half(h: &Half, parent: u32) -> Vec<Tri> {
    let s = GoldenInt::phi_pow(STAMP_DEPTH as i32);
    let (a, b, c) = (h.apex.mul_golden(s), h.axis.mul_golden(s), h.side.mul_golden(s));
    let mut cur = Vec::new();
    if h.kite {
        split(Tri { thick: false, a, b, c, parent }, &mut cur);
        // the split above emits one thick piece that must not be split again yet
    } else {
        cur.push(Tri { thick: true, a, b, c, parent });
    }
    for _ in 0..STAMP_DEPTH {
        let mut next = Vec::with_capacity(cur.len() * 3);
        for t in cur {
            split(t, &mut next);
        }
        cur = next;
    }
    cur
}

fn half_rhomb_tile(t: &Tri) -> PlacedTile {
    let left = orient(t.a, t.b, t.c) > 0;
    let kind = match (t.thick, left) {
        (false, true) => TileKind::HalfThinL,
        (false, false) => TileKind::HalfThinR,
        (true, true) => TileKind::HalfThickL,
        (true, false) => TileKind::HalfThickR,
    };
    let k = direction_index(t.b - t.a, 0).expect("unit half-rhomb");
    PlacedTile { kind, frame: Placement::new(k, false, t.a), level: 0, partial: true, parent: Some(t.parent) }
}

fn rhomb_tile(l: &Tri, r: &Tri) -> PlacedTile {
    let frame = if !l.thick {
        Placement::new(direction_index(l.b - l.a, 0).expect("unit thin"), false, l.a)
    } else {
        let (u, v) = (l.a - l.b, r.a - l.b);
        let k = if u.rotate(2) == v { direction_index(u, 0) } else { direction_index(v, 0) };
        Placement::new(k.expect("unit thick"), false, l.b)
    };
    let kind = if l.thick { TileKind::ThickRhomb } else { TileKind::ThinRhomb };
    PlacedTile { kind, frame, level: 0, partial: false, parent: Some(l.parent) }
}

/// Stamp a P2 half-tile patch into an exact P3 rhomb patch. Half-rhombs from
/// neighbouring half-tiles are merged across their split diagonal; only
/// boundary halves survive. Each output tile records its P2 parent.
pub fn stamp_p3(p: &Patch) -> Result<Patch, DeriveError> {
    if p.system != System::P2Half {
        return Err(DeriveError::WrongSystem { expected: "p2", got: p.system });
    }
    let mut src = p.clone();
    src.canonicalize();
    let halves = p2_halves(&src);
    let tris: Vec<Tri> = halves.par_iter().enumerate().flat_map_iter(|(i, h)| stamp_half(h, i as u32)).collect();
    let mut by_base: HashMap<(bool, LatticePoint, LatticePoint), Vec<usize>> = HashMap::with_capacity(tris.len());
    for (i, t) in tris.iter().enumerate() {
        let key = if t.b < t.c { (t.thick, t.b, t.c) } else { (t.thick, t.c, t.b) };
        by_base.entry(key).or_default().push(i);
    }
    let angles = vertex_angles(&halves);
    let scale = GoldenInt::phi_pow(STAMP_DEPTH as i32);
    let mut tiles = Vec::with_capacity(tris.len() / 2 + 64);
    let mut bad = 0;
    for idx in by_base.values() {
        match idx.as_slice() {
            [i, j] => {
                let (x, y) = (&tris[*i], &tris[*j]);
                let (l, r) = if orient(x.a, x.b, x.c) > 0 { (x, y) } else { (y, x) };
                tiles.push(rhomb_tile(l, r));
            }
            [i] => {
                // a lone half must lie on the outer boundary of the P2 patch
                let t = &tris[*i];
                let h = &halves[t.parent as usize];
                if !base_on_boundary(t, h, &angles, scale) {
                    bad += 1;
                }
                tiles.push(half_rhomb_tile(t));
            }
            _ => bad += 1,
        }
    }
    if bad > 0 {
        return Err(DeriveError::Unmergeable(bad));
    }
    for t in &mut tiles {
        t.level = p.level;
    }
    let mut out = Patch::new(System::P3Rhomb, p.level, tiles);
    out.canonicalize();
    out.source = Some(Box::new(src));
    Ok(out)
}

/// Is the base of `t` on an edge of its parent half whose far side is outside the patch?
fn base_on_boundary(t: &Tri, h: &Half, angles: &HashMap<LatticePoint, u32>, s: GoldenInt) -> bool {
    let corners = [h.apex, h.axis, h.side];
    (0..3).any(|i| {
        let (p, q) = (corners[i], corners[(i + 1) % 3]);
        let (ps, qs) = (p.mul_golden(s), q.mul_golden(s));
        let on = |v: LatticePoint| v == ps || v == qs || in_segment_interior(v, ps, qs);
        on(t.b) && on(t.c) && (angles[&p] < 10 || angles[&q] < 10)
    })
}

// ---------------------------------------------------------------- grouping

fn composites_for(src: &Patch, scheme: Scheme) -> Vec<PlacedTile> {
    let (wholes, _) = whole_tiles(src);
    let s = GoldenInt::phi_pow(STAMP_DEPTH as i32);
    let mut out = Vec::new();
    for w in wholes.iter().filter(|w| w.complete) {
        let frame = w.frame.scaled(s);
        for (kind, pl) in group_table(scheme, w.kind) {
            out.push(PlacedTile {
                kind: *kind,
                frame: frame.compose(pl),
                level: src.level,
                partial: !w.interior,
                parent: Some(w.halves[0] as u32),
            });
        }
    }
    out
}

/// Group a stamped P3 patch into a composite scheme. Composites come from the
/// frames of the whole kites and darts of the source P2 patch; those reaching
/// past the patch boundary are flagged partial.
pub fn group_composites(p: &Patch, scheme: Scheme) -> Result<Patch, DeriveError> {
    if p.system != System::P3Rhomb {
        return Err(DeriveError::WrongSystem { expected: "p3", got: p.system });
    }
    let src = p.source.as_deref().ok_or(DeriveError::NoSource)?;
    let mut out = Patch::new(System::Composite(scheme), p.level, composites_for(src, scheme));
    out.canonicalize();
    out.source = Some(Box::new(src.clone()));
    let rep = grouping_report(p, &out);
    if rep.uncovered > 0 {
        return Err(DeriveError::Unassigned(rep.uncovered));
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupingReport {
    /// rhomb triangles whose P2 parent tile has a complete neighbourhood
    pub interior: usize,
    pub covered_once: usize,
    /// centroid on a composite boundary and strictly inside none
    pub boundary_only: usize,
    pub uncovered: usize,
    pub multiply_covered: usize,
}

/// Uniform grid over float bounding boxes, used only to shortlist candidates
/// for the exact predicates.
pub(crate) struct BoxGrid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

pub(crate) fn bbox(pts: &[LatticePoint]) -> (f64, f64, f64, f64) {
    let mut b = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in pts {
        let (x, y) = p.embed();
        b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
    }
    b
}

impl BoxGrid {
    pub fn new(cell: f64) -> Self {
        BoxGrid { cell, cells: HashMap::new() }
    }

    fn span(&self, b: (f64, f64, f64, f64)) -> impl Iterator<Item = (i64, i64)> {
        let e = 1e-6;
        let (x0, y0) = (((b.0 - e) / self.cell).floor() as i64, ((b.1 - e) / self.cell).floor() as i64);
        let (x1, y1) = (((b.2 + e) / self.cell).floor() as i64, ((b.3 + e) / self.cell).floor() as i64);
        (x0..=x1).flat_map(move |x| (y0..=y1).map(move |y| (x, y)))
    }

    pub fn insert(&mut self, id: usize, b: (f64, f64, f64, f64)) {
        let keys: Vec<_> = self.span(b).collect();
        for k in keys {
            self.cells.entry(k).or_default().push(id);
        }
    }

    pub fn query(&self, b: (f64, f64, f64, f64)) -> Vec<usize> {
        let mut v: Vec<usize> = self.span(b).filter_map(|k| self.cells.get(&k)).flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Check that the composites of `grouped` cover every interior rhomb triangle of
/// `p3` exactly once (by exact centroid location).
pub fn grouping_report(p3: &Patch, grouped: &Patch) -> GroupingReport {
    let Some(src) = p3.source.as_deref() else { return GroupingReport::default() };
    let (wholes, owner) = whole_tiles(src);
    let polys: Vec<Vec<LatticePoint>> =
        (0..grouped.tiles.len()).map(|i| grouped.tile_vertices(i).iter().map(|v| v.scale(3)).collect()).collect();
    let mut grid = BoxGrid::new(6.0);
    for (i, p) in polys.iter().enumerate() {
        grid.insert(i, bbox(p));
    }
    let rows: Vec<(usize, usize)> = p3
        .tiles
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, t)| {
            let interior = t.parent.map(|h| wholes[owner[h as usize]].interior).unwrap_or(false);
            let verts = p3.tile_vertices(i);
            let pieces: Vec<[LatticePoint; 3]> = if verts.len() == 3 {
                vec![[verts[0], verts[1], verts[2]]]
            } else {
                robinson_decomposition(t.kind).unwrap().iter().map(|r| r.vertices().map(|v| t.frame.apply(v))).collect()
            };
            let mut out = Vec::new();
            if interior {
                for tri in pieces {
                    let c3 = tri[0] + tri[1] + tri[2];
                    let (x, y) = c3.embed();
                    let (mut inside, mut edge) = (0, 0);
                    for j in grid.query((x, y, x, y)) {
                        match locate(c3, &polys[j]) {
                            Location::Inside => inside += 1,
                            Location::Boundary => edge += 1,
                            Location::Outside => {}
                        }
                    }
                    out.push((inside, edge));
                }
            }
            out
        })
        .collect();
    let mut r = GroupingReport { interior: rows.len(), ..Default::default() };
    for (inside, edge) in rows {
        match (inside, edge) {
            (1, _) => r.covered_once += 1,
            (0, 0) => r.uncovered += 1,
            (0, _) => r.boundary_only += 1,
            _ => r.multiply_covered += 1,
        }
    }
    r
}

// ---------------------------------------------------------------- T12 and gaps

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub counts: BTreeMap<TileKind, usize>,
    pub unknown: usize,
    pub t12_count: usize,
    pub t12_area: GoldenRat,
    pub gap_area: GoldenRat,
    /// area enclosed by the outer boundary of the T12 cluster
    pub hull_area: GoldenRat,
    pub gap_fraction: f64,
}

impl GapReport {
    /// Σ T12 + Σ gaps = enclosed area, exactly.
    pub fn balanced(&self) -> bool {
        self.t12_area + self.gap_area == self.hull_area
    }
}

/// One T12 on every complete kite and dart of the grouping's source patch,
/// on the 1/11 grid.
pub fn place_t12(p: &Patch) -> Result<Vec<PlacedTile>, DeriveError> {
    if p.system != System::Composite(Scheme::T10T11) {
        return Err(DeriveError::WrongSystem { expected: "composite:t10t11", got: p.system });
    }
    let src = p.source.as_deref().ok_or(DeriveError::NoSource)?;
    let (wholes, _) = whole_tiles(src);
    let s = GoldenInt::phi_pow(STAMP_DEPTH as i32);
    let mut tiles = Vec::new();
    for w in wholes.iter().filter(|w| w.complete) {
        let (kind, pl) = t12_table(w.kind);
        let f = w.frame.scaled(s).compose(&pl);
        tiles.push(PlacedTile {
            kind,
            frame: Placement { t: f.t.scale(11), ..f },
            level: p.level,
            partial: !w.interior,
            parent: Some(w.halves[0] as u32),
        });
    }
    Ok(tiles)
}

/// Place the T12s and classify the uncovered regions between them.
pub fn pair_to_t12(p: &Patch) -> Result<(Patch, GapReport), DeriveError> {
    let mut tiles = place_t12(p)?;
    let src = p.source.as_deref().ok_or(DeriveError::NoSource)?;
    let polys: Vec<Vec<LatticePoint>> = tiles.iter().map(|t| tile_vertices(t, 11)).collect();
    let faces = uncovered_faces(&polys);
    let mut counts: BTreeMap<TileKind, usize> = TileKind::GAPS.iter().map(|k| (*k, 0)).collect();
    let mut unknown = 0;
    let mut gap_area = GoldenRat::zero();
    let mut hull = GoldenRat::zero();
    for f in &faces {
        let a = GoldenRat::new(area2(f), 2 * 121);
        if a.signum() < 0 {
            hull = hull - a;
            continue;
        }
        gap_area = gap_area + a;
        match classify_gap(f, 11) {
            Some((kind, frame)) => {
                *counts.get_mut(&kind).unwrap() += 1;
                tiles.push(PlacedTile { kind, frame, level: p.level, partial: false, parent: None });
            }
            None => unknown += 1,
        }
    }
    let t12_area = area_units(TileKind::T12).mul_int(polys.len() as i64);
    let report = GapReport {
        counts,
        unknown,
        t12_count: polys.len(),
        t12_area,
        gap_area,
        hull_area: hull,
        gap_fraction: gap_area.value() / hull.value().max(f64::MIN_POSITIVE),
    };
    let mut out = Patch::new(System::T12WithGaps, p.level, tiles);
    out.canonicalize();
    out.source = Some(Box::new(src.clone()));
    Ok((out, report))
}

/// Boundary cycles of the region not covered by the given counterclockwise
/// polygons. Cycles around holes come out counterclockwise (positive area), the
/// outer boundary of each connected cluster clockwise.
pub fn uncovered_faces(polys: &[Vec<LatticePoint>]) -> Vec<Vec<LatticePoint>> {
    let mut ids: HashMap<LatticePoint, usize> = HashMap::new();
    let mut pts: Vec<LatticePoint> = Vec::new();
    for p in polys {
        for v in p {
            ids.entry(*v).or_insert_with(|| {
                pts.push(*v);
                pts.len() - 1
            });
        }
    }
    let mut grid = BoxGrid::new(11.0);
    for (i, v) in pts.iter().enumerate() {
        let (x, y) = v.embed();
        grid.insert(i, (x, y, x, y));
    }
    // directed sub-edges of every polygon, split where another vertex lies on them
    let mut directed: HashSet<(usize, usize)> = HashSet::new();
    for p in polys {
        for i in 0..p.len() {
            let (a, b) = (p[i], p[(i + 1) % p.len()]);
            let mut on: Vec<usize> =
                grid.query(bbox(&[a, b])).into_iter().filter(|&j| in_segment_interior(pts[j], a, b)).collect();
            on.sort_by(|&x, &y| (dot2(pts[x] - a, b - a) - dot2(pts[y] - a, b - a)).signum().cmp(&0));
            let mut chain = vec![ids[&a]];
            chain.extend(on);
            chain.push(ids[&b]);
            for w in chain.windows(2) {
                directed.insert((w[0], w[1]));
            }
        }
    }
    let mut free: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut free_list: Vec<(usize, usize)> =
        directed.iter().filter(|(u, v)| !directed.contains(&(*v, *u))).map(|(u, v)| (*v, *u)).collect();
    free_list.sort_unstable();
    for (u, v) in &free_list {
        free.entry(*u).or_default().push(*v);
    }
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let mut faces = Vec::new();
    for &(s, t) in &free_list {
        if used.contains(&(s, t)) {
            continue;
        }
        let mut cyc = vec![pts[s]];
        let (mut u, mut v) = (s, t);
        loop {
            used.insert((u, v));
            if v == s {
                break;
            }
            cyc.push(pts[v]);
            let back = pts[u] - pts[v];
            let next = free[&v]
                .iter()
                .copied()
                .filter(|w| !used.contains(&(v, *w)))
                .max_by(|&x, &y| ccw_from(back, pts[x] - pts[v], pts[y] - pts[v]));
            let Some(next) = next else { unreachable!("free boundary edges form closed cycles") };
            u = v;
            v = next;
        }
        faces.push(cyc);
    }
    faces
}

/// Order directions by counterclockwise angle measured from `d0`, in [0, 2π).
fn ccw_from(d0: LatticePoint, x: LatticePoint, y: LatticePoint) -> std::cmp::Ordering {
    fn class(d0: LatticePoint, d: LatticePoint) -> u8 {
        match cross(d0, d).signum() {
            1 => 1,
            -1 => 3,
            _ if dot2(d0, d).signum() > 0 => 0,
            _ => 2,
        }
    }
    class(d0, x).cmp(&class(d0, y)).then_with(|| 0.cmp(&cross(x, y).signum()))
}

/// Match a region against the five gap shapes up to rigid motion; `denom` is the
/// grid of the region's coordinates.
pub fn classify_gap(region: &[LatticePoint], denom: i64) -> Option<(TileKind, Placement)> {
    let poly = simplify(region);
    let mut sorted = poly.clone();
    sorted.sort();
    for kind in TileKind::GAPS {
        let r = polygon(kind);
        if r.vertices.len() != poly.len() || denom % r.denom != 0 {
            continue;
        }
        let refv: Vec<LatticePoint> = r.vertices.iter().map(|v| v.scale(denom / r.denom)).collect();
        for refl in [false, true] {
            for k in 0..10 {
                let lin = Placement::new(k, refl, LatticePoint::ZERO);
                for &target in &poly {
                    let pl = Placement { t: target - lin.apply(refv[0]), ..lin };
                    let mut m: Vec<LatticePoint> = refv.iter().map(|v| pl.apply(*v)).collect();
                    m.sort();
                    if m == sorted {
                        return Some((kind, pl));
                    }
                }
            }
        }
    }
    None
}

pub fn subdivide_rotor(kind: TileKind) -> Result<Vec<(TileKind, Placement)>, DeriveError> {
    rotor_subdivision(kind).map(|v| v.to_vec()).map_err(|_| DeriveError::Unsupported { op: "subdivide_rotor", kind })
}

/// Outline of T13 and T14 glued along their long slanted edges.
pub fn t13_t14_rhombus() -> Option<Vec<LatticePoint>> {
    let a = &polygon(TileKind::T13).vertices;
    let b = &polygon(TileKind::T14).vertices;
    let (n, m) = (a.len(), b.len());
    let mut best: Option<Vec<LatticePoint>> = None;
    for i in 0..n {
        let (p, q) = (a[i], a[(i + 1) % n]);
        for j in 0..m {
            let (r, s) = (b[j], b[(j + 1) % m]);
            if (q - p).norm2x() != (s - r).norm2x() {
                continue;
            }
            // map r→q, s→p with a rotation
            for k in 0..10 {
                let lin = Placement::new(k, false, LatticePoint::ZERO);
                if lin.apply(s - r) != p - q {
                    continue;
                }
                let pl = Placement { t: q - lin.apply(r), ..lin };
                let bb: Vec<LatticePoint> = b.iter().map(|v| pl.apply(*v)).collect();
                let mut outline: Vec<LatticePoint> = Vec::new();
                for t in 0..n {
                    outline.push(a[(i + 1 + t) % n]);
                }
                outline.pop();
                for t in 0..m {
                    outline.push(bb[(j + 1 + t) % m]);
                }
                outline.pop();
                let o = simplify(&outline);
                if o.len() == 4 && best.is_none() {
                    best = Some(o);
                }
            }
        }
    }
    best
}

/// Half-rhomb moves turning `base` into `target`, in the base's reference frame.
pub fn shift_transform(base: TileKind, target: TileKind) -> Result<Vec<HalfRhombMove>, DeriveError> {
    shift_data(base, target)
        .map(|s| s.moves.clone())
        .ok_or(DeriveError::Unsupported { op: "shift_transform", kind: base })
}

/// Exact check that moving the listed pieces turns the base polygon into the
/// target polygon: every piece leaves the base and lands in the target, landing
/// spots are outside the base, and the areas balance.
pub fn verify_shift(base: TileKind, target: TileKind) -> bool {
    let Some(data) = shift_data(base, target) else { return false };
    let b = &polygon(base).vertices;
    let t: Vec<LatticePoint> = polygon(target).vertices.iter().map(|v| data.target_frame.apply(*v)).collect();
    let inside = |tri: &[LatticePoint; 3], poly: &[LatticePoint]| {
        let c = tri[0] + tri[1] + tri[2];
        let big: Vec<LatticePoint> = poly.iter().map(|v| v.scale(3)).collect();
        locate(c, &big) == Location::Inside && tri.iter().all(|v| locate(*v, poly) != Location::Outside)
    };
    let mut area = area2(b);
    let mut landed: Vec<[LatticePoint; 3]> = Vec::new();
    for m in &data.moves {
        let from = m.vertices;
        let to = from.map(|v| m.to.apply(v));
        if !inside(&from, b) || inside(&from, &t) || !inside(&to, &t) {
            return false;
        }
        let c = to[0] + to[1] + to[2];
        let big: Vec<LatticePoint> = b.iter().map(|v| v.scale(3)).collect();
        if locate(c, &big) != Location::Outside {
            return false;
        }
        let ccw = |x: [LatticePoint; 3]| if orient(x[0], x[1], x[2]) < 0 { [x[0], x[2], x[1]] } else { x };
        if landed.iter().any(|o| !convex_disjoint(&ccw(*o), &ccw(to))) {
            return false;
        }
        landed.push(to);
        area = area - area2(&ccw(from)) + area2(&ccw(to));
    }
    area == area2(&t)
}

/// Does the closed boundary of `a` meet the closed boundary of `b`? Returns
/// (any common point, a common segment of positive length).
pub fn boundary_contact(a: &[LatticePoint], b: &[LatticePoint]) -> (bool, bool) {
    let mut touch = false;
    let mut share = false;
    for i in 0..a.len() {
        let (p, q) = (a[i], a[(i + 1) % a.len()]);
        for j in 0..b.len() {
            let (r, s) = (b[j], b[(j + 1) % b.len()]);
            if crate::golden::segments_touch(p, q, r, s) {
                touch = true;
                if crate::golden::segments_overlap(p, q, r, s) {
                    share = true;
                    return (touch, share);
                }
            }
        }
    }
    (touch, share)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IsolationReport {
    pub instances: usize,
    /// pairs sharing at least one boundary point
    pub touching_pairs: usize,
    /// pairs sharing a boundary segment
    pub edge_sharing_pairs: usize,
}

/// Pairwise contact among the non-partial tiles of `kind` in a composite patch.
pub fn isolation(p: &Patch, kind: TileKind) -> IsolationReport {
    let idx: Vec<usize> = (0..p.tiles.len()).filter(|&i| p.tiles[i].kind == kind && !p.tiles[i].partial).collect();
    let polys: Vec<Vec<LatticePoint>> = idx.iter().map(|&i| p.tile_vertices(i)).collect();
    let mut grid = BoxGrid::new(8.0);
    for (i, q) in polys.iter().enumerate() {
        grid.insert(i, bbox(q));
    }
    let mut r = IsolationReport { instances: idx.len(), ..Default::default() };
    for (i, q) in polys.iter().enumerate() {
        for j in grid.query(bbox(q)) {
            if j <= i {
                continue;
            }
            let (t, s) = boundary_contact(q, &polys[j]);
            r.touching_pairs += t as usize;
            r.edge_sharing_pairs += s as usize;
        }
    }
    r
}

/// For each non-partial T3 of a T2T3 grouping, check that it is exactly the
/// union of one T1 and one T2 of the T1T2 grouping of the same patch, sharing
/// an edge. Returns (T3 instances checked, failures).
pub fn t3_pairs(t1t2: &Patch, t2t3: &Patch) -> (usize, usize) {
    use crate::tiles::rhomb_filling;
    let key = |r: &[LatticePoint]| {
        let mut v = r.to_vec();
        v.sort();
        v
    };
    let rhombs_of = |t: &PlacedTile| -> Vec<Vec<LatticePoint>> {
        rhomb_filling(t.kind)
            .unwrap()
            .iter()
            .map(|(_, r)| key(&r.iter().map(|v| t.frame.apply(*v)).collect::<Vec<_>>()))
            .collect()
    };
    let mut owner: HashMap<Vec<LatticePoint>, usize> = HashMap::new();
    for (i, t) in t1t2.tiles.iter().enumerate() {
        for r in rhombs_of(t) {
            owner.insert(r, i);
        }
    }
    let (mut n, mut bad) = (0, 0);
    for t in t2t3.tiles.iter().filter(|t| t.kind == TileKind::T3 && !t.partial) {
        n += 1;
        let rs = rhombs_of(t);
        let mut parts: Vec<usize> = rs.iter().filter_map(|r| owner.get(r).copied()).collect();
        parts.sort_unstable();
        parts.dedup();
        let ok = parts.len() == 2 && rs.iter().all(|r| owner.contains_key(r)) && {
            let mut kinds: Vec<TileKind> = parts.iter().map(|&i| t1t2.tiles[i].kind).collect();
            kinds.sort();
            let sizes: usize = parts.iter().map(|&i| rhomb_filling(t1t2.tiles[i].kind).unwrap().len()).sum();
            let (a, b) = (tile_vertices(&t1t2.tiles[parts[0]], 1), tile_vertices(&t1t2.tiles[parts[1]], 1));
            kinds == [TileKind::T1, TileKind::T2] && sizes == rs.len() && boundary_contact(&a, &b).1
        };
        bad += (!ok) as usize;
    }
    (n, bad)
}

/// Overlap check between two placed polygons via their convex pieces.
pub(crate) fn pieces_disjoint(a: &PlacedTile, b: &PlacedTile, denom: i64) -> bool {
    let pa = crate::tiles::convex_pieces(a.kind);
    let pb = crate::tiles::convex_pieces(b.kind);
    let place = |t: &PlacedTile, piece: &Vec<LatticePoint>| -> Vec<LatticePoint> {
        let k = denom / polygon(t.kind).denom;
        let mut v: Vec<LatticePoint> = piece.iter().map(|p| t.frame.apply(p.scale(k))).collect();
        if area2(&v).signum() < 0 {
            v.reverse();
        }
        v
    };
    let qa: Vec<Vec<LatticePoint>> = pa.iter().map(|x| place(a, x)).collect();
    let qb: Vec<Vec<LatticePoint>> = pb.iter().map(|x| place(b, x)).collect();
    qa.iter().all(|x| qb.iter().all(|y| convex_disjoint(x, y)))
}

#[allow(dead_code)]
fn angle_sorted(dirs: &mut [LatticePoint]) {
    dirs.sort_by(|a, b| angle_cmp(*a, *b));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subst::{inflate, p2_seed, Seed};

    #[test]
    fn single_kite_stamp_preserves_area() {
        let p = p2_seed(Seed::Kite);
        let q = stamp_p3(&p).unwrap();
        let scale = GoldenInt::phi_pow(8);
        assert_eq!(q.total_area(), p.total_area().mul_golden(scale));
    }

    #[test]
    fn sun_stamp_merges_everything_inside() {
        let p = inflate(&p2_seed(Seed::Sun), 3).unwrap();
        let q = stamp_p3(&p).unwrap();
        assert_eq!(q.total_area(), p.total_area().mul_golden(GoldenInt::phi_pow(8)));
        assert!(q.tiles.iter().all(|t| t.parent.is_some()));
    }

    #[test]
    fn rotor_subdivisions() {
        let count = |k| {
            let s = subdivide_rotor(k).unwrap();
            (s.iter().filter(|x| x.0 == TileKind::T13).count(), s.iter().filter(|x| x.0 == TileKind::T14).count())
        };
        assert_eq!(count(TileKind::RotorA), (1, 4));
        assert_eq!(count(TileKind::RotorB), (2, 3));
        assert_eq!(count(TileKind::RotorC), (0, 5));
        assert!(subdivide_rotor(TileKind::T12).is_err());
    }

    #[test]
    fn gap_shapes_classify_themselves() {
        for k in TileKind::GAPS {
            let r = polygon(k);
            let pl = Placement::new(3, true, LatticePoint::new(2, -1, 5, 0));
            let moved: Vec<LatticePoint> = r.vertices.iter().map(|v| pl.apply(v.scale(11 / r.denom))).collect();
            let (kind, _) = classify_gap(&moved, 11).unwrap();
            assert_eq!(kind, k);
        }
    }

    #[test]
    fn shifts_hold() {
        for (b, t) in [
            (TileKind::T1, TileKind::Snake),
            (TileKind::T2, TileKind::Dog),
            (TileKind::Snake, TileKind::T8),
            (TileKind::Dog, TileKind::T9),
        ] {
            assert!(verify_shift(b, t), "{b}->{t}");
        }
        assert_eq!(shift_transform(TileKind::T1, TileKind::Snake).unwrap().len(), 2);
        assert!(shift_transform(TileKind::T8, TileKind::T1).is_err());
    }
}
