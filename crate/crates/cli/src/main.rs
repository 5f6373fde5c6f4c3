mod render;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use itmlab_core::ghost::{ghost_tree, SignedDiscontinuity};
use itmlab_core::probe::{a3_breaking_perturbation, apply_directed, perturbation_probe, ProbeConfig, ProbeError};
use itmlab_core::{analyze, Analysis, ItmMap, Rational, Side};

use report::Header;

#[derive(Parser, Debug)]
#[command(name = "itmlab", version, about = "Exact analysis of interval translation maps")]
struct Cli {
    /// Override the attractor iteration cap (results are marked as capped).
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Print only the JSON document, without the summary on stderr.
    #[arg(long, global = true)]
    json_only: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Attractor, return maps, vectors, ghost graph and stability verdict.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random or directed perturbation of the parameters.
    Probe {
        file: PathBuf,
        #[arg(long, default_value = "1/1000")]
        eps: Rational,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
        samples: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Break the ghost cycle found by the A3 check instead of sampling.
        #[arg(long)]
        directed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the map or the orbit of one component as SVG.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Map)]
        kind: Kind,
        /// 1-based component index, for `--kind orbit`.
        #[arg(long, default_value_t = 1)]
        component: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Unroll the ghost tree at a signed discontinuity such as `b1-`.
    GhostTree {
        file: PathBuf,
        #[arg(long)]
        root: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First-return data for one component, or all of them.
    ReturnMap {
        file: PathBuf,
        #[arg(long)]
        component: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Map,
    Orbit,
}

enum Failure {
    Input(String),
    Degenerate(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Degenerate(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn load(path: &Path) -> Result<(Vec<u8>, ItmMap), Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Failure::Input(format!("{} is not UTF-8", path.display())))?;
    let map = ItmMap::from_json(text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((bytes, map))
}

fn run_analysis(map: &ItmMap, max_iter: Option<usize>) -> Result<Analysis, Failure> {
    analyze(map, max_iter).map_err(|e| Failure::Input(e.to_string()))
}

fn emit(doc: &Value, out: Option<&Path>) -> Outcome {
    let text = report::render_json(doc);
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summarize(quiet: bool, lines: &[String]) {
    if !quiet {
        for line in lines {
            eprintln!("{line}");
        }
    }
}

fn analysis_summary(an: &Analysis) -> Vec<String> {
    let mut lines = vec![format!(
        "attractor: {} ({} components, step {})",
        an.attractor.set,
        an.attractor.set.len(),
        an.attractor.step().map_or("capped".to_string(), |n| n.to_string())
    )];
    for (k, d) in an.return_maps.iter().enumerate() {
        lines.push(format!(
            "component {}: N = {}, return times {:?}, sigma {}",
            k + 1,
            d.n(),
            d.return_times,
            d.sigma_one_line()
        ));
    }
    let r = &an.report;
    let mark = |ok: bool| if ok { "holds" } else { "violated" };
    lines.push(format!(
        "A1 {}, A2 {}, A3 {}, matching {}, trivial components {}: {}",
        mark(r.a1.holds()),
        mark(r.a2.holds()),
        mark(r.a3.holds()),
        mark(r.matching.holds()),
        mark(r.trivial_components.holds()),
        if r.stable { "stable" } else { "unstable" }
    ));
    lines
}

fn cmd_analyze(cli: &Cli, file: &Path, out: Option<&Path>) -> Outcome {
    let (bytes, map) = load(file)?;
    let an = run_analysis(&map, cli.max_iter)?;
    let doc = report::analysis_document(&Header::new(&bytes, None, cli.max_iter), &an, cli.max_iter);
    emit(&doc, out)?;
    summarize(cli.json_only, &analysis_summary(&an));
    Ok(())
}

fn probe_threads() -> Result<Option<usize>, Failure> {
    match std::env::var("ITMLAB_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Failure::Input(format!("ITMLAB_THREADS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn probe_failure(e: ProbeError) -> Failure {
    match e {
        ProbeError::NoValidSamples(_) => Failure::Degenerate(e.to_string()),
        other => Failure::Input(other.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_probe(cli: &Cli, file: &Path, eps: &Rational, samples: u32, seed: u64, directed: bool, out: Option<&Path>) -> Outcome {
    if !eps.is_positive() {
        return Err(Failure::Input("--eps must be positive".into()));
    }
    let (bytes, map) = load(file)?;
    let an = run_analysis(&map, cli.max_iter)?;
    let mut doc;
    let mut lines = analysis_summary(&an);
    if directed {
        let Some(w) = an.report.a3.witness() else {
            return Err(Failure::Input("--directed needs a map whose A3 check is violated".into()));
        };
        let perturbation = a3_breaking_perturbation(&map, &w.cycle, eps).map_err(probe_failure)?;
        let outcome = apply_directed(&map, perturbation).map_err(probe_failure)?;
        doc = report::analysis_document(&Header::new(&bytes, None, cli.max_iter), &an, cli.max_iter);
        lines.push(format!(
            "directed: periodic interval {} of period {} (verified {}), Hausdorff jump {}",
            outcome.perturbation.periodic_interval,
            outcome.perturbation.period,
            outcome.periodic_interval_verified,
            outcome.hausdorff
        ));
        doc["probe"] = json!({"mode": "directed", "directed": report::directed_section(&outcome)});
    } else {
        let config = ProbeConfig {
            epsilon: eps.clone(),
            samples: samples as usize,
            seed,
            threads: probe_threads()?,
        };
        let result = perturbation_probe(&map, &config).map_err(probe_failure)?;
        doc = report::analysis_document(&Header::new(&bytes, Some(seed), cli.max_iter), &an, cli.max_iter);
        let agg = &result.aggregate;
        lines.push(format!(
            "probe: {} accepted, {} rejected, max Hausdorff {}, all preserved {}",
            agg.accepted, agg.rejected, agg.max_hausdorff, agg.all_preserved
        ));
        doc["probe"] = json!({"mode": "random", "result": report::probe_section(&result)});
    }
    emit(&doc, out)?;
    summarize(cli.json_only, &lines);
    Ok(())
}

fn cmd_render(cli: &Cli, file: &Path, kind: Kind, component: usize, out: &Path) -> Outcome {
    let (_, map) = load(file)?;
    let svg = match kind {
        Kind::Map => render::map_svg(&map),
        Kind::Orbit => {
            let an = run_analysis(&map, cli.max_iter)?;
            if !an.attractor.is_finite_type() {
                return Err(Failure::Input(
                    "the attractor did not stabilize (InfiniteTypeSuspected); no component orbits to draw".into(),
                ));
            }
            let count = an.return_maps.len();
            if component == 0 || component > count {
                return Err(Failure::Input(format!("component {component} does not exist (the attractor has {count})")));
            }
            render::orbit_svg(&map, component, &an.return_maps[component - 1])
        }
    };
    std::fs::write(out, svg).map_err(|e| Failure::Input(format!("cannot write {}: {e}", out.display())))?;
    summarize(cli.json_only, &[format!("wrote {}", out.display())]);
    Ok(())
}

fn parse_signed(map: &ItmMap, text: &str) -> Result<SignedDiscontinuity, Failure> {
    let bad = || Failure::Input(format!("--root expects b<i>+ or b<i>- with 1 <= i < {}, got {text:?}", map.r()));
    let body = text.strip_prefix('b').ok_or_else(bad)?;
    let (index, side) = match body.chars().last() {
        Some('+') => (&body[..body.len() - 1], Side::Plus),
        Some('-') => (&body[..body.len() - 1], Side::Minus),
        _ => return Err(bad()),
    };
    let index: usize = index.parse().map_err(|_| bad())?;
    if index == 0 || index >= map.r() {
        return Err(bad());
    }
    Ok(SignedDiscontinuity::new(index, side))
}

fn cmd_ghost_tree(cli: &Cli, file: &Path, root: &str, depth: Option<usize>, out: Option<&Path>) -> Outcome {
    let (bytes, map) = load(file)?;
    let root = parse_signed(&map, root)?;
    let an = run_analysis(&map, cli.max_iter)?;
    let depth = depth.unwrap_or(2 * (map.r() - 1) + 1);
    let tree = ghost_tree(&an.ghost, root, depth);
    let doc = json!({
        "header": Header::new(&bytes, None, cli.max_iter),
        "map": map.to_spec(),
        "depth": depth,
        "tree": report::tree_section(&tree),
    });
    emit(&doc, out)?;
    summarize(
        cli.json_only,
        &[format!("ghost tree at {root}: {} levels, root reappears at {:?}", tree.levels.len(), tree.root_reappearances())],
    );
    Ok(())
}

fn cmd_return_map(cli: &Cli, file: &Path, component: Option<usize>, out: Option<&Path>) -> Outcome {
    let (bytes, map) = load(file)?;
    let an = run_analysis(&map, cli.max_iter)?;
    if !an.attractor.is_finite_type() {
        return Err(Failure::Input("the attractor did not stabilize (InfiniteTypeSuspected)".into()));
    }
    let count = an.return_maps.len();
    let chosen: Vec<usize> = match component {
        Some(k) if k == 0 || k > count => {
            return Err(Failure::Input(format!("component {k} does not exist (the attractor has {count})")));
        }
        Some(k) => vec![k - 1],
        None => (0..count).collect(),
    };
    let doc = json!({
        "header": Header::new(&bytes, None, cli.max_iter),
        "map": map.to_spec(),
        "return_maps": chosen.iter().map(|&k| report::return_map_entry(&map, k, &an.return_maps[k])).collect::<Vec<_>>(),
        "vectors": chosen.iter().map(|&k| report::vectors_entry(&map, k, &an.return_maps[k])).collect::<Vec<_>>(),
    });
    emit(&doc, out)?;
    let summary = analysis_summary(&an);
    summarize(cli.json_only, &summary[1..summary.len() - 1]);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze { file, out } => cmd_analyze(&cli, file, out.as_deref()),
        Command::Probe {
            file,
            eps,
            samples,
            seed,
            directed,
            out,
        } => cmd_probe(&cli, file, eps, *samples, *seed, *directed, out.as_deref()),
        Command::Render {
            file,
            kind,
            component,
            out,
        } => cmd_render(&cli, file, *kind, *component, out),
        Command::GhostTree { file, root, depth, out } => cmd_ghost_tree(&cli, file, root, *depth, out.as_deref()),
        Command::ReturnMap { file, component, out } => cmd_return_map(&cli, file, *component, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(msg) | Failure::Degenerate(msg)) = &f;
            eprintln!("itmlab: {msg}");
            ExitCode::from(f.code())
        }
    }
}
