use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::json;

use penrose_core::derive::{group_composites, pair_to_t12, stamp_p3, Scheme};
use penrose_core::io::{data_versions, parse, render_svg, serialize, RenderOptions};
use penrose_core::subst::{inflate, p2_seed, Patch, Seed, System};
use penrose_core::verify::{
    census, check_edge_matching, check_partition, check_vertex_figures, fatal, find_periodicity, periodic_tiling,
    PeriodicName, PeriodicitySearch,
};

#[derive(Parser)]
#[command(name = "penrose", version, about = "Exact Penrose substitution tilings and composite prototiles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Input {
    /// read the patch from FILE instead of stdin
    #[arg(short, long, value_name = "FILE")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// write to FILE instead of stdout
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inflate a P2 seed
    Gen {
        #[arg(long, value_parser = parse_seed)]
        seed: Seed,
        #[arg(long, default_value_t = 0)]
        steps: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Stamp a P2 patch into P3 rhombs
    Derive {
        #[arg(long, value_parser = ["p3"])]
        to: String,
        #[command(flatten)]
        inp: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Group a stamped P3 patch into composite prototiles
    Group {
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        #[command(flatten)]
        inp: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Place T12 tiles on a T10/T11 grouping and classify the gaps
    #[command(name = "pair-t12")]
    PairT12 {
        #[command(flatten)]
        inp: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Check a patch; violations go to stdout as JSON lines
    Verify {
        /// also check P2 vertex stars
        #[arg(long)]
        vertex_figures: bool,
        #[command(flatten)]
        inp: Input,
    },
    /// Tile census, ratios and an optional periodicity search
    Stats {
        #[arg(long)]
        periodicity: bool,
        /// core window radius in rhomb edges (default: half the inradius)
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        max_candidates: usize,
        #[command(flatten)]
        inp: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Periodic constructions with T8/T9 and with T11
    Periodic {
        #[arg(long, value_parser = parse_periodic)]
        name: PeriodicName,
        #[arg(long, default_value = "1x1", value_parser = parse_copies)]
        copies: (u32, u32),
        #[command(flatten)]
        out: Output,
    },
    /// Render a patch as SVG
    Render {
        #[arg(long)]
        decorations: bool,
        #[arg(long)]
        highlight_gaps: bool,
        #[arg(long, default_value_t = 1.0)]
        stroke_width: f64,
        /// pixels per rhomb edge
        #[arg(long, default_value_t = 20.0)]
        scale: f64,
        #[command(flatten)]
        inp: Input,
        #[command(flatten)]
        out: Output,
    },
}

fn parse_seed(s: &str) -> Result<Seed, String> {
    s.parse()
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse()
}

fn parse_periodic(s: &str) -> Result<PeriodicName, String> {
    s.parse()
}

fn parse_copies(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once('x').ok_or("expected AxB, e.g. 3x3")?;
    let a: u32 = a.parse().map_err(|_| format!("bad count `{a}`"))?;
    let b: u32 = b.parse().map_err(|_| format!("bad count `{b}`"))?;
    if a == 0 || b == 0 {
        return Err("copies must be at least 1x1".into());
    }
    Ok((a, b))
}

/// Input problems exit with 2, failed checks with 1.
enum Failure {
    Input(anyhow::Error),
    Violations,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn read_patch(inp: &Input) -> Result<Patch> {
    let text = match &inp.input {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            s
        }
    };
    parse(&text).map_err(|e| anyhow!("invalid patch document: {e}"))
}

fn write_out(out: &Output, text: &str) -> Result<()> {
    match &out.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut o = io::stdout().lock();
            o.write_all(text.as_bytes()).and_then(|_| o.flush()).context("writing stdout")
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Gen { seed, steps, out } => {
            let p = inflate(&p2_seed(seed), steps).map_err(|e| anyhow!(e))?;
            write_out(&out, &serialize(&p))?;
        }
        Cmd::Derive { to: _, inp, out } => {
            let p = stamp_p3(&read_patch(&inp)?).map_err(|e| anyhow!(e))?;
            write_out(&out, &serialize(&p))?;
        }
        Cmd::Group { scheme, inp, out } => {
            let p = group_composites(&read_patch(&inp)?, scheme).map_err(|e| anyhow!(e))?;
            write_out(&out, &serialize(&p))?;
        }
        Cmd::PairT12 { inp, out } => {
            let (p, rep) = pair_to_t12(&read_patch(&inp)?).map_err(|e| anyhow!(e))?;
            eprintln!(
                "t12: {} tiles, {} gaps ({} unclassified), gap fraction {:.6}, area balanced: {}",
                rep.t12_count,
                rep.counts.values().sum::<usize>(),
                rep.unknown,
                rep.gap_fraction,
                rep.balanced()
            );
            write_out(&out, &serialize(&p))?;
        }
        Cmd::Verify { vertex_figures, inp } => {
            let p = read_patch(&inp)?;
            if vertex_figures && p.system != System::P2Half {
                return Err(anyhow!("--vertex-figures needs a p2 patch, got {}", p.system).into());
            }
            let mut vs = check_edge_matching(&p);
            vs.extend(check_partition(&p));
            if vertex_figures {
                vs.extend(check_vertex_figures(&p));
            }
            vs.sort();
            let bad = fatal(p.system, &vs).len();
            let mut text = String::new();
            for v in &vs {
                let line = json!({
                    "kind": v.kind.name(),
                    "location": v.location.0,
                    "detail": v.detail,
                    "fatal": !fatal(p.system, std::slice::from_ref(v)).is_empty(),
                });
                text.push_str(&line.to_string());
                text.push('\n');
            }
            write_out(&Output { output: None }, &text)?;
            eprintln!("{} tiles, {} violations, {} fatal", p.tiles.len(), vs.len(), bad);
            if bad > 0 {
                return Err(Failure::Violations);
            }
        }
        Cmd::Stats { periodicity, radius, max_candidates, inp, out } => {
            let p = read_patch(&inp)?;
            let c = census(&p);
            let counts: serde_json::Map<String, serde_json::Value> =
                c.counts.iter().map(|(k, n)| (k.to_string(), json!(n))).collect();
            let ratios: Vec<_> = c
                .ratios
                .iter()
                .map(|r| {
                    json!({
                        "of": format!("{}/{}", r.numerator, r.denominator),
                        "value": round6(r.value),
                        "deviation_from_phi": round6(r.deviation),
                    })
                })
                .collect();
            let mut doc = json!({
                "system": p.system.to_string(),
                "level": p.level,
                "tiles": p.tiles.len(),
                "partial": c.partial,
                "counts": counts,
                "ratios": ratios,
            });
            if periodicity {
                let w = find_periodicity(&p, PeriodicitySearch { radius, max_candidates });
                doc["periodicity"] = match w {
                    Some(w) => json!({"u": w.u.0, "v": w.v.0, "window_tiles": w.domain.len()}),
                    None => serde_json::Value::Null,
                };
            }
            write_out(&out, &(serde_json::to_string_pretty(&doc).map_err(|e| anyhow!(e))? + "\n"))?;
        }
        Cmd::Periodic { name, copies, out } => {
            write_out(&out, &serialize(&periodic_tiling(name, copies)))?;
        }
        Cmd::Render { decorations, highlight_gaps, stroke_width, scale, inp, out } => {
            if !(stroke_width >= 0.0 && scale > 0.0) {
                return Err(anyhow!("stroke width must be non-negative and scale positive").into());
            }
            let p = read_patch(&inp)?;
            let opts = RenderOptions { decorations, highlight_gaps, stroke_width, scale, ..Default::default() };
            write_out(&out, &render_svg(&p, &opts))?;
        }
    }
    Ok(())
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn long_version() -> String {
    let mut s = format!("{}\n", env!("CARGO_PKG_VERSION"));
    for (file, v, hash) in data_versions() {
        s.push_str(&format!("{file} v{v} sha256:{hash}\n"));
    }
    s
}

fn main() -> ExitCode {
    let lv: &'static str = Box::leak(long_version().into_boxed_str());
    let matches = match Cli::command().long_version(lv).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
