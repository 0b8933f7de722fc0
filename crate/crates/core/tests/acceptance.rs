//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero only when a
//! result differs from what is expected; the T11 isolation check is known to
//! fail under the strict reading and is reported without failing the run.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use penrose_core::derive::{
    group_composites, grouping_report, isolation, pair_to_t12, stamp_p3, subdivide_rotor, t13_t14_rhombus, t3_pairs,
    Scheme,
};
use penrose_core::golden::{
    area2, convex_disjoint, cross, locate, GoldenInt, GoldenRat, LatticePoint, Location, Placement,
};
use penrose_core::io::{parse, serialize};
use penrose_core::subst::{inflate, p2_counts, p2_seed, Patch, Seed};
use penrose_core::tiles::{
    area_units, polygon, rhomb_census, robinson_decomposition, squared_length, t12_label, Robinson, TileKind,
};
use penrose_core::verify::{
    census, check_edge_matching, check_partition, check_vertex_figures, fatal, find_periodicity, periodic_tiling,
    PeriodicName, PeriodicitySearch,
};

const SEEDS: [Seed; 4] = [Seed::Sun, Seed::Star, Seed::Kite, Seed::Dart];
const MAX_N: u32 = 6;
const TIME_LIMIT_S: f64 = 10.0;
const RATIO_TOLERANCE: f64 = 0.05;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn g(a: i64, b: i64) -> GoldenInt {
    GoldenInt::new(a, b)
}

fn ccw(mut v: Vec<LatticePoint>) -> Vec<LatticePoint> {
    if area2(&v).signum() < 0 {
        v.reverse();
    }
    v
}

/// Pieces partition `poly`: every piece vertex lies in the closed polygon,
/// piece interiors are pairwise disjoint and the areas add up.
fn partitions(poly: &[LatticePoint], pieces: &[Vec<LatticePoint>]) -> bool {
    let pieces: Vec<_> = pieces.iter().map(|p| ccw(p.clone())).collect();
    let inside = pieces.iter().all(|p| p.iter().all(|v| locate(*v, poly) != Location::Outside));
    let disjoint = (0..pieces.len()).all(|i| (i + 1..pieces.len()).all(|j| convex_disjoint(&pieces[i], &pieces[j])));
    let sum = pieces.iter().fold(GoldenInt::ZERO, |s, p| s + area2(p));
    inside && disjoint && sum == area2(poly)
}

fn placed(kind: TileKind, pl: &Placement) -> Vec<LatticePoint> {
    polygon(kind).vertices.iter().map(|v| pl.apply(*v)).collect()
}

fn fatal_count(p: &Patch) -> usize {
    let mut vs = check_edge_matching(p);
    vs.extend(check_partition(p));
    fatal(p.system, &vs).len()
}

struct Run {
    p2: Patch,
    p3: Patch,
}

fn c1_censuses() -> Outcome {
    let want = [(TileKind::T1, 5, 8), (TileKind::T2, 8, 13), (TileKind::T3, 13, 21)];
    let mut got = Vec::new();
    let mut ok = true;
    for (k, thin, thick) in want {
        let c = rhomb_census(k).unwrap();
        ok &= (c.thin, c.thick) == (thin, thick);
        got.push(format!("{k}={}+{}", c.thin, c.thick));
    }
    outcome(ok, got.join(" "))
}

fn c2_balance() -> Outcome {
    let t1 = GoldenRat::int(g(5, 8));
    let t2 = GoldenRat::int(g(8, 13));
    let a = area_units;
    // the rhomb filling read off the catalog, thin = 1 and thick = φ
    let filled = |k| {
        let c = rhomb_census(k).unwrap();
        GoldenRat::int(g(c.thin as i64, c.thick as i64))
    };
    let ok = a(TileKind::T1) == t1
        && a(TileKind::Snake) == t1
        && a(TileKind::T8) == t1
        && filled(TileKind::T1) == t1
        && a(TileKind::T2) == t2
        && a(TileKind::Dog) == t2
        && a(TileKind::T9) == t2
        && filled(TileKind::T2) == t2;
    outcome(ok, format!("Snake=T1=T8={} Dog=T2=T9={}", a(TileKind::Snake), a(TileKind::Dog)))
}

fn c3_robinson() -> Outcome {
    let mut ok = true;
    let mut d = Vec::new();
    for (k, gn, gt) in [(TileKind::T8, 2, 2), (TileKind::T9, 4, 2)] {
        let r = robinson_decomposition(k).unwrap();
        let n_gn = r.iter().filter(|p| p.kind == Robinson::GoldenGnomon).count();
        let pieces: Vec<Vec<LatticePoint>> = r.iter().map(|p| p.vertices().to_vec()).collect();
        let part = partitions(&polygon(k).vertices, &pieces);
        ok &= (n_gn, r.len() - n_gn) == (gn, gt) && part;
        d.push(format!("{k}: {n_gn} gnomons + {} triangles, partition={part}", r.len() - n_gn));
    }
    outcome(ok, d.join("; "))
}

fn c4_substitution(runs: &mut BTreeMap<&'static str, Run>) -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut tiles6 = 0;
    for seed in SEEDS {
        let s = p2_seed(seed);
        let (mut k, mut d) = p2_counts(&s);
        let mut p = s.clone();
        for n in 0..=MAX_N {
            let t = Instant::now();
            if n > 0 {
                p = inflate(&p, 1).unwrap();
                (k, d) = (2 * k + d, k + d);
            }
            let area_ok = p.total_area() == s.total_area().mul_golden(GoldenInt::phi_pow(2 * n as i32));
            let clean = check_edge_matching(&p).is_empty() && check_vertex_figures(&p).is_empty();
            let dt = t.elapsed().as_secs_f64();
            if n == MAX_N {
                worst = worst.max(dt);
                tiles6 = tiles6.max(p.tiles.len());
            }
            if !(area_ok && clean && p2_counts(&p) == (k, d)) {
                ok = false;
                eprintln!("  substitution: {seed:?} n={n} area={area_ok} clean={clean}");
            }
        }
        runs.insert(seed_name(seed), Run { p2: p, p3: Patch::new(penrose_core::subst::System::P3Rhomb, 0, vec![]) });
    }
    ok &= worst < TIME_LIMIT_S;
    outcome(ok, format!("n=0..{MAX_N}, 4 seeds, up to {tiles6} halves, slowest n={MAX_N} step+check {worst:.2}s"))
}

fn seed_name(s: Seed) -> &'static str {
    match s {
        Seed::Sun => "sun",
        Seed::Star => "star",
        Seed::Kite => "kite",
        Seed::Dart => "dart",
    }
}

fn is_half_rhomb(k: TileKind) -> bool {
    matches!(k, TileKind::HalfThinL | TileKind::HalfThinR | TileKind::HalfThickL | TileKind::HalfThickR)
}

fn c5_stamp(runs: &mut BTreeMap<&'static str, Run>) -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut d = Vec::new();
    for (name, r) in runs.iter_mut() {
        let t = Instant::now();
        let p3 = match stamp_p3(&r.p2) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        let viol = check_edge_matching(&p3).len();
        worst = worst.max(t.elapsed().as_secs_f64());
        let interior_halves = p3.tiles.iter().filter(|t| is_half_rhomb(t.kind) && !t.partial).count();
        let area_ok = p3.total_area() == r.p2.total_area().mul_golden(GoldenInt::phi_pow(8));
        ok &= viol == 0 && interior_halves == 0 && area_ok;
        d.push(format!("{name}:{}", p3.tiles.len()));
        r.p3 = p3;
    }
    ok &= worst < TIME_LIMIT_S;
    outcome(ok, format!("rhombs {}; 0 interior halves, 0 violations; slowest {worst:.2}s", d.join(" ")))
}

fn c6_grouping(runs: &BTreeMap<&'static str, Run>) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, r) in runs {
        let mut by = BTreeMap::new();
        for scheme in Scheme::ALL {
            let gp = group_composites(&r.p3, scheme).unwrap();
            let rep = grouping_report(&r.p3, &gp);
            let good = rep.interior > 0 && rep.uncovered == 0 && rep.multiply_covered == 0 && fatal_count(&gp) == 0;
            if !good {
                ok = false;
                eprintln!("  grouping: {name} {scheme}: {rep:?}");
            }
            by.insert(scheme.name(), gp);
        }
        let (n, bad) = t3_pairs(&by["t1t2"], &by["t2t3"]);
        ok &= n > 0 && bad == 0;
        let c = census(&by["t1t2"]);
        let dev = c.ratio("T2").map_or(f64::INFINITY, |r| r.deviation);
        ok &= dev < RATIO_TOLERANCE;
        notes.push(format!("{name}: T3 pairs {n} ({bad} bad), T2/T1 off by {:.3}%", dev * 100.0));
    }
    outcome(ok, notes.join("; "))
}

fn c7_isolation(runs: &BTreeMap<&'static str, Run>) -> Outcome {
    let mut touching = 0;
    let mut sharing = 0;
    let mut n = 0;
    for r in runs.values() {
        let gp = group_composites(&r.p3, Scheme::T10T11).unwrap();
        let rep = isolation(&gp, TileKind::T11);
        n += rep.instances;
        touching += rep.touching_pairs;
        sharing += rep.edge_sharing_pairs;
    }
    outcome(
        touching == 0,
        format!(
            "{n} interior T11: {touching} pairs share a boundary point (strict reading), {sharing} share an edge (weak reading)"
        ),
    )
}

fn c8_gaps(runs: &BTreeMap<&'static str, Run>) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let sun = &runs["sun"].p2;
    for n in [5, MAX_N] {
        let p2 = if n == MAX_N { sun.clone() } else { inflate(&p2_seed(Seed::Sun), n).unwrap() };
        let p3 = stamp_p3(&p2).unwrap();
        let gp = group_composites(&p3, Scheme::T10T11).unwrap();
        let (t, rep) = pair_to_t12(&gp).unwrap();
        let five = TileKind::GAPS.iter().all(|k| rep.counts.get(k).copied().unwrap_or(0) > 0)
            && rep.counts.keys().all(|k| k.is_gap());
        ok &= five && rep.unknown == 0 && rep.balanced() && fatal_count(&t) == 0;
        let list: Vec<String> = rep.counts.iter().map(|(k, c)| format!("{k}={c}")).collect();
        notes.push(format!("n={n}: {} unknown={} balanced={}", list.join(","), rep.unknown, rep.balanced()));
    }

    let t13 = area_units(TileKind::T13);
    let t14 = area_units(TileKind::T14);
    for (rotor, a, b) in [(TileKind::RotorA, 1, 4), (TileKind::RotorB, 2, 3), (TileKind::RotorC, 0, 5)] {
        let ident = area_units(rotor) == t13.mul_int(a) + t14.mul_int(b);
        let sub = subdivide_rotor(rotor).unwrap();
        let pieces: Vec<_> = sub.iter().map(|(k, pl)| placed(*k, pl)).collect();
        let n13 = sub.iter().filter(|x| x.0 == TileKind::T13).count() as i64;
        let part = partitions(&polygon(rotor).vertices, &pieces);
        ok &= ident && part && n13 == a && sub.len() as i64 == a + b;
    }

    // reference rhombus: edge φ³ = 2φ+1; the pair closes up with a 72° corner
    let s = LatticePoint::phi_zeta(3, 0);
    let reference = [LatticePoint::ZERO, s, s + s.rotate(2), s.rotate(2)];
    let rh = t13_t14_rhombus();
    let congruent = rh.as_ref().is_some_and(|r| congruent(r, &reference));
    let area_ok = t13 + t14 == GoldenRat::new(area2(&reference), 2);
    ok &= congruent && area_ok;
    notes.push(format!("rotor identities hold; T13+T14 rhombus congruent={congruent}"));
    outcome(ok, notes.join("; "))
}

/// Some rotation, reflection and translation carries `a` onto `b` vertex for vertex.
fn congruent(a: &[LatticePoint], b: &[LatticePoint]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    (0..10).any(|rot| {
        [false, true].iter().any(|&refl| {
            let lin = Placement::new(rot, refl, LatticePoint::ZERO);
            let m: Vec<_> = a.iter().map(|v| lin.apply(*v)).collect();
            (0..n).any(|k| {
                let t = b[0] - m[k];
                let mut fwd: Vec<_> = (0..n).map(|i| m[(k + i) % n] + t).collect();
                if fwd == b {
                    return true;
                }
                fwd[1..].reverse();
                fwd == b
            })
        })
    })
}

fn c9_t12_edges() -> Outcome {
    let sq = |x: GoldenInt| GoldenRat::int(x * x);
    let table: [(GoldenInt, &[&str]); 4] = [
        (g(0, 1), &["fg", "ij", "pq"]),
        (g(1, 1), &["ab", "bc", "cd", "gh", "hi", "lo", "op", "pa", "pc", "qr", "fr"]),
        (g(1, 2), &["dr", "gr", "hj", "ir", "lr", "pr"]),
        (g(2, 0), &["de", "kl", "lm"]),
    ];
    let mut bad = Vec::new();
    let mut n = 0;
    for (len, pairs) in table {
        for pq in pairs {
            let (p, q) = (&pq[..1], &pq[1..]);
            n += 1;
            if squared_length(t12_label(p), t12_label(q), polygon(TileKind::T12).denom) != sq(len) {
                bad.push(pq.to_string());
            }
        }
    }
    outcome(bad.is_empty() && n == 23, format!("{n} labelled lengths, mismatched: {bad:?}"))
}

fn c10_periodic(runs: &BTreeMap<&'static str, Run>) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in [PeriodicName::Fig9a, PeriodicName::Fig9b] {
        let p = periodic_tiling(name, (3, 3));
        let clean = fatal_count(&p) == 0;
        let w = find_periodicity(&p, PeriodicitySearch::default());
        let indep = w.as_ref().is_some_and(|w| !cross(w.u, w.v).is_zero());
        ok &= clean && indep;
        notes.push(match w {
            Some(w) => format!("{}: u={} v={}", name.name(), w.u, w.v),
            None => format!("{}: no witness", name.name()),
        });
    }
    let mut found = 0;
    let mut searched = 0;
    for r in runs.values() {
        for scheme in Scheme::ALL {
            let gp = group_composites(&r.p3, scheme).unwrap();
            searched += 1;
            if find_periodicity(&gp, PeriodicitySearch::default()).is_some() {
                found += 1;
            }
        }
    }
    ok &= found == 0;
    notes.push(format!("{searched} grouped n={MAX_N} patches, {found} witnesses"));
    outcome(ok, notes.join("; "))
}

fn pipeline_bytes() -> Vec<String> {
    let p2 = inflate(&p2_seed(Seed::Sun), 5).unwrap();
    let p3 = stamp_p3(&p2).unwrap();
    let mut out = vec![serialize(&p2), serialize(&p3)];
    for scheme in Scheme::ALL {
        out.push(serialize(&group_composites(&p3, scheme).unwrap()));
    }
    let gp = group_composites(&p3, Scheme::T10T11).unwrap();
    out.push(serialize(&pair_to_t12(&gp).unwrap().0));
    out.push(serialize(&periodic_tiling(PeriodicName::Fig9b, (2, 2))));
    out
}

fn c11_determinism() -> Outcome {
    let run = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(pipeline_bytes);
    let base = run(1);
    let same = [run(1), run(4), run(16)].iter().all(|r| *r == base);
    let round = base.iter().all(|text| parse(text).map(|p| serialize(&p) == *text).unwrap_or(false));
    let bytes: usize = base.iter().map(|s| s.len()).sum();
    outcome(
        same && round,
        format!("{} documents, {bytes} bytes; threads 1/1/4/16 identical={same}, round-trip={round}", base.len()),
    )
}

fn main() -> ExitCode {
    let mut runs = BTreeMap::new();
    let timed = |f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let mut o = f();
        o.detail.push_str(&format!(" ({:.1}s)", t.elapsed().as_secs_f64()));
        o
    };
    let results: Vec<(u32, &str, bool, Outcome)> = vec![
        (1, "rhomb censuses", false, timed(&mut || c1_censuses())),
        (2, "area balance", false, timed(&mut || c2_balance())),
        (3, "Robinson decompositions", false, timed(&mut || c3_robinson())),
        (4, "substitution soundness", false, timed(&mut || c4_substitution(&mut runs))),
        (5, "exact P3 derivation", false, timed(&mut || c5_stamp(&mut runs))),
        (6, "grouping partition", false, timed(&mut || c6_grouping(&runs))),
        (7, "T11 isolation", true, timed(&mut || c7_isolation(&runs))),
        (8, "T12 gap taxonomy", false, timed(&mut || c8_gaps(&runs))),
        (9, "T12 edge lengths", false, timed(&mut || c9_t12_edges())),
        (10, "periodic counter-constructions", false, timed(&mut || c10_periodic(&runs))),
        (11, "round-trip and determinism", false, timed(&mut || c11_determinism())),
    ];
    let mut unexpected = 0;
    for (i, name, expect_fail, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = match (o.pass, expect_fail) {
            (false, true) => " [expected]",
            (true, true) => " [unexpected pass]",
            _ => "",
        };
        if !o.pass && !expect_fail {
            unexpected += 1;
        }
        println!("{tag} {i:>2} {name}{note}: {}", o.detail);
    }
    let passed = results.iter().filter(|r| r.3.pass).count();
    println!("{passed}/{} passed, {unexpected} unexpected failures", results.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
