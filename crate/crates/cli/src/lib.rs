//! Command dispatch for the `sofic` binary. Every command writes a
//! line-oriented `key=value` report to the given writer and returns the
//! process exit status: 0 on success, 1 on violations, 2 on usage or parse
//! errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};

use sofic_core::format::parse_placements;
use sofic_core::simulation::verify_instances;
use sofic_core::tileset::{generate_tileset_traced, stage_view};
use sofic_core::{
    check_phase_coherence, check_port_condition, count_bound_first, count_bound_second,
    enumerate_macro_tiles, for_each_patch, hierarchy_decorate, hierarchy_to_grid,
    mutate_macro_neighbors, parse_spec, quotient_preimage, render_patch_svg, render_tile_svg,
    search_networks, validate_networks, validate_system, Boundary, CountParams, Error, GridPatch,
    Layout, PhaseTable, SpecDocument, TileId, Tileset,
};

#[derive(Parser, Debug)]
#[command(
    name = "sofic",
    version,
    about = "Self-simulating tilesets from combinatorial substitutions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the system, its networks and the port condition.
    Validate { spec: PathBuf },
    /// List every valid network of each rule.
    Networks {
        spec: PathBuf,
        #[arg(long)]
        rule: Option<String>,
    },
    /// Print the canonical tileset dump.
    Generate {
        spec: PathBuf,
        /// Show the decorations as they stand after step 1..=5.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        stage: Option<u8>,
        /// Print closure sizes instead of the dump.
        #[arg(long)]
        trace: bool,
    },
    /// Check conditions (1) and (3), plus patch-scale phase coherence.
    Verify {
        spec: PathBuf,
        /// Run against the tileset with every macro-facet neighbor-index
        /// replaced by `m`.
        #[arg(long)]
        mutated_control: bool,
    },
    /// Upper bounds on the tileset size.
    Count {
        spec: Option<PathBuf>,
        #[arg(long)]
        second: bool,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        c: Option<u64>,
        #[arg(long)]
        branches: Option<u64>,
    },
    /// Enumerate valid rectangular patches.
    Assemble {
        spec: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        /// File of `place <x> <y> <dump line>` lines.
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Expand a tile through several levels of substitution.
    Hierarchy {
        spec: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        rule: Option<String>,
        /// Index `j` of the top tile.
        #[arg(long)]
        top: Option<u32>,
        #[arg(long)]
        quiet: bool,
    },
    /// Draw a tile, a patch, a macro-tile or a hierarchy as SVG.
    Render {
        spec: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        /// Placements file, as for `assemble --seed`.
        #[arg(long, conflicts_with_all = ["tile", "instance", "hierarchy"])]
        patch: Option<PathBuf>,
        /// One canonical dump line.
        #[arg(long, conflicts_with_all = ["instance", "hierarchy"])]
        tile: Option<String>,
        /// Index of an enumerated macro-tile (the default is 0).
        #[arg(long, conflicts_with = "hierarchy")]
        instance: Option<usize>,
        /// Depth of a hierarchy patch to draw.
        #[arg(long)]
        hierarchy: Option<usize>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(
            Error::InvalidSystem(_)
            | Error::InvalidNetwork(_)
            | Error::MissingNetwork { .. }
            | Error::NoMacroTiles
            | Error::InconsistentGluing(_)
            | Error::PartialBlock(_)
            | Error::BoundViolated { .. },
        ) => 1,
        _ => 2,
    }
}

fn load(path: &Path) -> anyhow::Result<SpecDocument> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("{}", path.display()))
}

fn layout(doc: &SpecDocument) -> anyhow::Result<Layout> {
    Ok(Layout::from_document(doc)?)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cmd {
        Command::Validate { spec } => validate(&load(&spec)?, out),
        Command::Networks { spec, rule } => networks(&load(&spec)?, rule.as_deref(), out),
        Command::Generate { spec, stage, trace } => {
            let doc = load(&spec)?;
            let l = layout(&doc)?;
            let (tau, tr) = generate_tileset_traced(&l);
            if trace {
                let sizes: Vec<String> = tr.sizes.iter().map(|s| s.to_string()).collect();
                writeln!(out, "closure_sizes={}", sizes.join(","))?;
                writeln!(out, "size={}", tau.len())?;
            } else if let Some(stage) = stage {
                out.write_all(stage_view(&tau, &l, stage).as_bytes())?;
            } else {
                out.write_all(tau.dump().as_bytes())?;
            }
            Ok(0)
        }
        Command::Verify {
            spec,
            mutated_control,
        } => verify(&load(&spec)?, mutated_control, out),
        Command::Count {
            spec,
            second,
            r,
            n,
            m,
            p,
            q,
            c,
            branches,
        } => {
            let (mut params, size) = match &spec {
                Some(path) => {
                    let l = layout(&load(path)?)?;
                    let size = sofic_core::generate_tileset(&l).len();
                    (CountParams::from_layout(&l), Some(size))
                }
                None => {
                    let (Some(r), Some(n), Some(m), Some(p)) = (r, n, m, p) else {
                        bail!("without a spec file, --r --n --m --p are required");
                    };
                    (CountParams::first(r, n, m, p), None)
                }
            };
            params.r = r.unwrap_or(params.r);
            params.n = n.unwrap_or(params.n);
            params.m = m.unwrap_or(params.m);
            params.p = p.unwrap_or(params.p);
            params.q = q.or(params.q);
            params.c = c.or(params.c);
            params.branches = branches.unwrap_or(params.branches);
            count(&params, second, size, out)
        }
        Command::Assemble {
            spec,
            width,
            height,
            seed,
            count_only,
            limit,
        } => {
            let boundary = match seed {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    Boundary::Seeded(parse_placements(&text)?)
                }
                None => Boundary::Free,
            };
            let l = layout(&load(&spec)?)?;
            assemble(&l, width, height, &boundary, count_only, limit, out)
        }
        Command::Hierarchy {
            spec,
            depth,
            rule,
            top,
            quiet,
        } => {
            let l = layout(&load(&spec)?)?;
            hierarchy(&l, depth, rule, top, quiet, out)
        }
        Command::Render {
            spec,
            svg,
            patch,
            tile,
            instance,
            hierarchy,
        } => {
            let l = layout(&load(&spec)?)?;
            let text = if let Some(path) = patch {
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                render_patch_svg(&l, &placements_to_grid(&parse_placements(&text)?))?
            } else if let Some(line) = tile {
                let (t, _) = sofic_core::format::parse_dump_line(&line, 1)?;
                render_tile_svg(&l, &t)?
            } else if let Some(depth) = hierarchy {
                let table = PhaseTable::new(&l)?;
                let h = hierarchy_decorate(&l, &l.system.rules[0].name, depth, None)?;
                render_patch_svg(&l, &hierarchy_to_grid(&table, &h))?
            } else {
                let table = PhaseTable::new(&l)?;
                let tau = sofic_core::generate_tileset(&l);
                let instances = enumerate_macro_tiles(&l, &tau);
                let i = instance.unwrap_or(0);
                let q = instances.get(i).ok_or_else(|| {
                    anyhow!("instance {i} out of range ({} instances)", instances.len())
                })?;
                let mut grid = GridPatch::empty(table.width, table.height);
                for (c, t) in q.assignment.iter().enumerate() {
                    let (x, y) = table.positions[c];
                    grid.set(x, y, Some(t.clone()));
                }
                render_patch_svg(&l, &grid)?
            };
            fs::write(&svg, text).with_context(|| format!("cannot write {}", svg.display()))?;
            writeln!(out, "svg={}", svg.display())?;
            Ok(0)
        }
    }
}

fn validate(doc: &SpecDocument, out: &mut dyn Write) -> anyhow::Result<i32> {
    let mut report = validate_system(&doc.system);
    if report.is_valid() {
        report.merge(validate_networks(&doc.system, &doc.networks));
        report.merge(check_port_condition(&doc.system, &doc.networks));
    }
    write!(out, "{report}")?;
    writeln!(out, "consistent={}", doc.system.consistent)?;
    writeln!(out, "violations={}", report.violations.len())?;
    writeln!(out, "result={}", verdict(report.is_valid()))?;
    Ok(if report.is_valid() { 0 } else { 1 })
}

fn networks(doc: &SpecDocument, rule: Option<&str>, out: &mut dyn Write) -> anyhow::Result<i32> {
    let sys = &doc.system;
    let report = validate_system(sys);
    if !report.is_valid() {
        return Err(Error::InvalidSystem(report).into());
    }
    let rules: Vec<usize> = match rule {
        Some(name) => vec![sys
            .rule_index(name)
            .ok_or_else(|| Error::UnknownRule(name.to_string()))?],
        None => (0..sys.rules.len()).collect(),
    };
    let mut all_found = true;
    for ri in rules {
        let found = search_networks(sys, ri);
        let declared = doc.networks.get(ri);
        for net in &found {
            let tag = if Some(net) == declared {
                " declared"
            } else {
                ""
            };
            writeln!(out, "network {}{tag}", net.describe(sys))?;
        }
        writeln!(out, "rule={} networks={}", sys.rules[ri].name, found.len())?;
        all_found &= !found.is_empty();
    }
    Ok(if all_found { 0 } else { 1 })
}

fn verify(doc: &SpecDocument, mutated: bool, out: &mut dyn Write) -> anyhow::Result<i32> {
    let l = layout(doc)?;
    let mut tau = sofic_core::generate_tileset(&l);
    if mutated {
        tau = mutate_macro_neighbors(&tau);
        writeln!(out, "tileset=mutated size={}", tau.len())?;
    } else {
        writeln!(out, "tileset=generated size={}", tau.len())?;
    }
    let instances = enumerate_macro_tiles(&l, &tau);
    let report = verify_instances(&l, &tau, &instances)?;
    write!(out, "{report}")?;
    let mut ok = report.condition1() && report.condition3();
    match patch_scale(&l, &tau) {
        Ok((patches, incoherent)) => {
            let pass = incoherent == 0;
            writeln!(out, "patch_scale.patches={patches} incoherent={incoherent}")?;
            writeln!(out, "condition2=patch-scale evidence: {}", verdict(pass))?;
            ok &= pass;
        }
        Err(e @ (Error::NonSquareSystem | Error::UnsupportedLayout(_))) => {
            writeln!(out, "condition2=patch-scale evidence: SKIPPED ({e})")?;
        }
        Err(e) => return Err(e.into()),
    }
    writeln!(out, "result={}", verdict(ok))?;
    Ok(if ok { 0 } else { 1 })
}

/// Number of valid 2×2 patches and how many of them are phase-incoherent.
fn patch_scale(l: &Layout, tau: &Tileset) -> Result<(usize, usize), Error> {
    let table = PhaseTable::new(l)?;
    let (mut patches, mut incoherent) = (0, 0);
    for_each_patch(l, tau, 2, 2, &Boundary::Free, |p| {
        patches += 1;
        if !check_phase_coherence(&table, p).is_coherent() {
            incoherent += 1;
        }
        true
    })?;
    Ok((patches, incoherent))
}

fn count(
    params: &CountParams,
    second: bool,
    size: Option<usize>,
    out: &mut dyn Write,
) -> anyhow::Result<i32> {
    writeln!(
        out,
        "params r={} n={} m={} p={} q={} c={}",
        params.r,
        params.n,
        params.m,
        params.p,
        params.q.map_or("-".into(), |v| v.to_string()),
        params.c.map_or("-".into(), |v| v.to_string()),
    )?;
    let first = count_bound_first(params)?;
    writeln!(out, "{first}")?;
    if second {
        writeln!(out, "{}", count_bound_second(params)?)?;
    }
    if let Some(size) = size {
        let within = size as u128 <= first.bound;
        writeln!(out, "size={size} within={within}")?;
        if !within {
            return Ok(1);
        }
    }
    Ok(0)
}

fn placements_to_grid(list: &[(usize, usize, sofic_core::DecoratedTile)]) -> GridPatch {
    let w = list.iter().map(|p| p.0 + 1).max().unwrap_or(0);
    let h = list.iter().map(|p| p.1 + 1).max().unwrap_or(0);
    let mut grid = GridPatch::empty(w, h);
    for (x, y, t) in list {
        grid.set(*x, *y, Some(t.clone()));
    }
    grid
}

fn assemble(
    l: &Layout,
    width: usize,
    height: usize,
    boundary: &Boundary,
    count_only: bool,
    limit: Option<usize>,
    out: &mut dyn Write,
) -> anyhow::Result<i32> {
    let tau = sofic_core::generate_tileset(l);
    let table = PhaseTable::new(l).ok();
    let mut n = 0usize;
    let mut incoherent = 0usize;
    let mut io = Ok(());
    for_each_patch(l, &tau, width, height, boundary, |p| {
        if let Some(t) = &table {
            if !check_phase_coherence(t, p).is_coherent() {
                incoherent += 1;
            }
        }
        if !count_only {
            io = write_patch(out, n, p, &tau);
        }
        n += 1;
        io.is_ok() && limit.is_none_or(|lim| n < lim)
    })?;
    io?;
    writeln!(out, "patches={n}")?;
    if table.is_some() {
        // strips one cell thick may be incoherent without being extendable
        writeln!(out, "incoherent={incoherent}")?;
    }
    Ok(0)
}

fn write_patch(
    out: &mut dyn Write,
    index: usize,
    p: &GridPatch,
    tau: &Tileset,
) -> std::io::Result<()> {
    writeln!(out, "patch {index}")?;
    for y in 0..p.height {
        for x in 0..p.width {
            if let Some(t) = p.get(x, y) {
                let prov = tau
                    .position(t)
                    .map(|i| tau.entries()[i].1)
                    .expect("assembled tiles come from the tileset");
                writeln!(
                    out,
                    "place {x} {y} {}",
                    sofic_core::tileset::dump_line(t, prov)
                )?;
            }
        }
    }
    Ok(())
}

fn hierarchy(
    l: &Layout,
    depth: usize,
    rule: Option<String>,
    top: Option<u32>,
    quiet: bool,
    out: &mut dyn Write,
) -> anyhow::Result<i32> {
    let rule = match rule {
        Some(r) => r,
        None => l
            .system
            .rules
            .first()
            .map(|r| r.name.clone())
            .ok_or_else(|| anyhow!("the system has no rule"))?,
    };
    let h = hierarchy_decorate(l, &rule, depth, top.map(TileId))?;
    if !quiet {
        for t in &h.tiles {
            let path: Vec<String> = t.path.iter().map(|c| (c + 1).to_string()).collect();
            let triples: Vec<String> = t.tile.triples.iter().map(|x| x.to_string()).collect();
            writeln!(
                out,
                "tile path={} {} | {}",
                path.join("."),
                t.tile.base,
                triples.join(" ")
            )?;
        }
    }
    let undefined = h.undefined_slots();
    let union = h.network_union();
    let mismatches = h.mismatches();
    writeln!(out, "top={} depth={}", h.top, h.depth)?;
    writeln!(out, "tiles={} gluings={}", h.tiles.len(), h.gluings.len())?;
    writeln!(out, "mismatches={}", mismatches.len())?;
    for (level, slots) in h.network_slots.iter().enumerate() {
        writeln!(out, "network_slots.level{}={}", level + 1, slots.len())?;
    }
    writeln!(out, "network_slots.union={}", union.len())?;
    writeln!(out, "undefined_slots={}", undefined.len())?;
    let confined = h.undefined_confined();
    writeln!(out, "undefined_confined={}", verdict(confined))?;
    let mut ok = mismatches.is_empty() && confined;
    if depth >= 2 {
        let q = quotient_preimage(l, &h.decompose())?;
        let below = hierarchy_decorate(l, &rule, depth - 1, Some(h.top))?;
        let same = q.violations.is_empty() && q.graph.is_isomorphic(&below.graph());
        writeln!(out, "quotient.violations={}", q.violations.len())?;
        writeln!(out, "quotient=depth{} {}", depth - 1, verdict(same))?;
        ok &= same;
    }
    writeln!(out, "result={}", verdict(ok))?;
    Ok(if ok { 0 } else { 1 })
}
