use std::io::Write;
use std::path::Path;

use exporamsey_core::coloring::count::{count_mono_triples, parse_bound, CSV_HEADER};
use exporamsey_core::coloring::dimacs::export_dimacs;
use exporamsey_core::coloring::{check_coloring, parse_rule, Coloring, SolveOutcome, SolverRegistry};
use exporamsey_core::greedy::{
    greedy_fe, search_fegen, verify_fecor, Check, FSpec, FegenLimits, FegenOutcome, GreedyFe,
};
use exporamsey_core::ipsets::{
    find_geometric_progressions, find_power_progressions, find_seed, is_ip_star_window, transform, IpKind,
    SeedSearch, SetSpec, Transform, Verdict, Window, WindowSet,
};
use exporamsey_core::structures::{FeKind, GeneratorRegistry, SeedSequence};
use exporamsey_core::triples::{enumerate_triples, exp_closure, TripleHypergraph};
use exporamsey_core::{Caps, PowerForm};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::{
    ColorCommand, Command, FegenArgs, GreedyCommand, GreedyFeArgs, HypergraphSource, IpCommand, KindArg, SetInput,
    TriplesCommand,
};
use crate::CliError;

type Out<'a> = dyn Write + 'a;

fn emit<T: Serialize>(out: &mut Out<'_>, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

fn only_json(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    match cfg.format {
        Format::Json => Ok(()),
        other => Err(CliError::Usage(format!("{what} has no {other:?} output"))),
    }
}

fn naturals(items: &[String]) -> Result<Vec<BigUint>, CliError> {
    items
        .iter()
        .map(|s| {
            s.trim()
                .parse::<BigUint>()
                .map_err(|_| CliError::Usage(format!("not a natural number: {s:?}")))
        })
        .collect()
}

fn decimal(v: &PowerForm, caps: &Caps) -> String {
    v.try_value(caps).map_or_else(|| v.to_string(), |x| x.to_string())
}

fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn set_spec(text: &str) -> Result<SetSpec, CliError> {
    Ok(text.parse::<SetSpec>()?)
}

pub fn dispatch(command: Command, cfg: &RunConfig, out: &mut Out<'_>) -> Result<u8, CliError> {
    match command {
        Command::Structures { kind, seeds, depth } => structures(&kind, &seeds, depth, cfg, out),
        Command::Triples {
            command: TriplesCommand::Enum { max },
        } => triples_enum(&max, cfg, out),
        Command::Closure { seeds, depth } => {
            only_json(cfg, "closure")?;
            let h = exp_closure(&naturals(&seeds)?, depth, &cfg.closure_limits())?;
            emit(out, &h.to_json(&cfg.caps))?;
            Ok(0)
        }
        Command::Color { command } => color(command, cfg, out),
        Command::Ip { command } => ip(command, cfg, out),
        Command::Greedy { command } => greedy(command, cfg, out),
    }
}

fn structures(kind: &str, seeds: &[String], depth: Option<usize>, cfg: &RunConfig, out: &mut Out<'_>) -> Result<u8, CliError> {
    only_json(cfg, "structures")?;
    let generator = GeneratorRegistry::builtin().get(kind)?;
    if kind.starts_with("fe") && depth.is_none() {
        return Err(CliError::Usage(format!("{kind} needs --depth")));
    }
    let report = generator.generate(&naturals(seeds)?, depth, &cfg.caps)?;
    emit(out, &report)?;
    Ok(0)
}

/// Writes triples as they are formatted rather than building one document.
fn triples_enum(max: &str, cfg: &RunConfig, out: &mut Out<'_>) -> Result<u8, CliError> {
    let max = parse_bound(max)?;
    let triples = enumerate_triples(&max, &cfg.caps)?;
    let caps = &cfg.caps;
    match cfg.format {
        Format::Json => {
            write!(out, "[")?;
            for (i, t) in triples.iter().enumerate() {
                let sep = if i == 0 { "\n  " } else { ",\n  " };
                write!(
                    out,
                    "{sep}{{\"a\": \"{}\", \"b\": \"{}\", \"c\": \"{}\"}}",
                    decimal(&t.a, caps),
                    decimal(&t.b, caps),
                    decimal(&t.c, caps)
                )?;
            }
            writeln!(out, "{}]", if triples.is_empty() { "" } else { "\n" })?;
        }
        Format::Csv => {
            writeln!(out, "a,b,c")?;
            for t in &triples {
                writeln!(out, "{},{},{}", decimal(&t.a, caps), decimal(&t.b, caps), decimal(&t.c, caps))?;
            }
        }
        Format::Dimacs => return Err(CliError::Usage("triples have no dimacs output".into())),
    }
    Ok(0)
}

fn hypergraph(source: &HypergraphSource, cfg: &RunConfig) -> Result<TripleHypergraph, CliError> {
    match (&source.seeds, source.depth, &source.hypergraph) {
        (Some(seeds), Some(depth), None) => Ok(exp_closure(&naturals(seeds)?, depth, &cfg.closure_limits())?),
        (None, None, Some(path)) => Ok(TripleHypergraph::from_json(&read_json(path)?, &cfg.caps)?),
        _ => Err(CliError::Usage("give either --seeds with --depth, or --hypergraph".into())),
    }
}

fn edge_values(h: &TripleHypergraph, edge: &[usize; 3], caps: &Caps) -> [String; 3] {
    let t = h.triple(edge);
    [decimal(&t.a, caps), decimal(&t.b, caps), decimal(&t.c, caps)]
}

fn color(command: ColorCommand, cfg: &RunConfig, out: &mut Out<'_>) -> Result<u8, CliError> {
    match command {
        ColorCommand::Solve { source, k, method } => {
            only_json(cfg, "color solve")?;
            let h = hypergraph(&source, cfg)?;
            let registry = SolverRegistry::builtin();
            if registry.get(&method).is_err() {
                return Err(CliError::Usage(format!(
                    "unknown method {method:?}; available: {}",
                    registry.names().join(", ")
                )));
            }
            let report = match registry.solve(&h, k, &method, &cfg.solve)? {
                SolveOutcome::Sat(c) => json!({
                    "status": "sat", "k": k, "method": method,
                    "vertices": h.num_vertices(), "edges": h.edges().len(),
                    "coloring": c.to_json(&h),
                }),
                SolveOutcome::Unsat => json!({
                    "status": "unsat", "k": k, "method": method,
                    "vertices": h.num_vertices(), "edges": h.edges().len(),
                }),
            };
            emit(out, &report)?;
            Ok(0)
        }
        ColorCommand::ExportCnf { source, k } => {
            if !matches!(cfg.format, Format::Json | Format::Dimacs) {
                return Err(CliError::Usage("export-cnf writes DIMACS only".into()));
            }
            let h = hypergraph(&source, cfg)?;
            out.write_all(export_dimacs(&h, k)?.as_bytes())?;
            Ok(0)
        }
        ColorCommand::Check { source, coloring } => {
            only_json(cfg, "color check")?;
            let h = hypergraph(&source, cfg)?;
            let mut value = read_json(&coloring)?;
            // accept the whole `color solve` report as well as a bare coloring
            if let Some(inner) = value.get("coloring") {
                value = inner.clone();
            }
            let c = Coloring::from_json(&value, &h, &cfg.caps)?;
            let mono = check_coloring(&h, &c)?;
            let edges: Vec<[String; 3]> = mono.iter().map(|e| edge_values(&h, e, &cfg.caps)).collect();
            emit(out, &json!({"proper": mono.is_empty(), "monochromatic": edges}))?;
            Ok(0)
        }
        ColorCommand::RuleCount { rule, k, max } => {
            let rule = parse_rule(&rule, k)?;
            let mut counts = Vec::new();
            for m in &max {
                counts.push(count_mono_triples(&rule, &parse_bound(m)?, &cfg.caps)?);
            }
            match cfg.format {
                Format::Csv => {
                    writeln!(out, "{CSV_HEADER}")?;
                    for c in &counts {
                        for row in c.csv_rows() {
                            writeln!(out, "{row}")?;
                        }
                    }
                }
                Format::Json => emit(out, &json!({"rule": rule.source(), "k": k, "counts": counts}))?,
                Format::Dimacs => return Err(CliError::Usage("rule-count has no dimacs output".into())),
            }
            Ok(0)
        }
    }
}

fn window_set(input: &SetInput) -> Result<WindowSet, CliError> {
    if let Some(path) = &input.input {
        if input.lo.is_some() || input.hi.is_some() {
            return Err(CliError::Usage("--input carries its own window".into()));
        }
        return serde_json::from_value(read_json(path)?).map_err(|e| CliError::Input(e.to_string()));
    }
    let (Some(lo), Some(hi)) = (input.lo, input.hi) else {
        return Err(CliError::Usage("--lo and --hi are required with --members or --set".into()));
    };
    match (&input.members, &input.set) {
        (Some(members), None) => Ok(WindowSet::new(lo, hi, members.iter().copied())?),
        (None, Some(spec)) => {
            let spec = set_spec(spec)?;
            Ok(WindowSet::from_predicate(Window::new(lo, hi)?, |v| spec.contains_u64(v))?)
        }
        _ => Err(CliError::Usage("give one of --members, --set or --input".into())),
    }
}

fn ip_kind(k: KindArg) -> IpKind {
    match k {
        KindArg::Additive => IpKind::Additive,
        KindArg::Multiplicative => IpKind::Multiplicative,
    }
}

fn ip(command: IpCommand, cfg: &RunConfig, out: &mut Out<'_>) -> Result<u8, CliError> {
    only_json(cfg, "ip")?;
    match command {
        IpCommand::Transform { input, op } => {
            let op: Transform = op.parse().map_err(|e: exporamsey_core::Error| CliError::Usage(e.to_string()))?;
            emit(out, &transform(&window_set(&input)?, op)?)?;
            Ok(0)
        }
        IpCommand::FindSeed { input, kind, m } => {
            let found = find_seed(&window_set(&input)?, m, ip_kind(kind), cfg.search_budget)?;
            emit(out, &found)?;
            Ok(if found == SeedSearch::Inconclusive { 2 } else { 0 })
        }
        IpCommand::IpStar { set, kind, m, lo, hi } => {
            let verdict = is_ip_star_window(&set_spec(&set)?, ip_kind(kind), m, Window::new(lo, hi)?, cfg.search_budget)?;
            emit(out, &verdict)?;
            Ok(if verdict == Verdict::Inconclusive { 2 } else { 0 })
        }
        IpCommand::Gp { input, k } => {
            let found = find_geometric_progressions(&window_set(&input)?, k)?;
            let list: Vec<_> = found
                .iter()
                .map(|(a, h)| json!({"a": a.to_string(), "h": h.to_string()}))
                .collect();
            emit(out, &json!({"k": k, "progressions": list}))?;
            Ok(0)
        }
        IpCommand::Powerprog { input, k } => {
            let found = find_power_progressions(&window_set(&input)?, k)?;
            let list: Vec<String> = found.iter().map(ToString::to_string).collect();
            emit(out, &json!({"k": k, "h": list}))?;
            Ok(0)
        }
    }
}

fn fe_run(args: &GreedyFeArgs, kind: FeKind, cfg: &RunConfig, out: &mut Out<'_>) -> Result<u8, CliError> {
    let result = greedy_fe(&set_spec(&args.set)?, kind, args.depth, Window::new(args.lo, args.hi)?, &cfg.caps)?;
    emit(out, &result)?;
    Ok(match &result {
        GreedyFe::Failure { reason, .. } if reason == "oracle range" => 2,
        _ => 0,
    })
}

fn fegen_run(args: &FegenArgs, kind: FeKind, cfg: &RunConfig, out: &mut Out<'_>) -> Result<u8, CliError> {
    let f: FSpec = args.f.parse().map_err(|e: exporamsey_core::Error| CliError::Usage(e.to_string()))?;
    let limits = FegenLimits {
        max_block_size: args.max_block_size,
        max_index: args.max_index,
        budget: cfg.search_budget,
        ..FegenLimits::default()
    };
    let result = search_fegen(&set_spec(&args.set)?, kind, &naturals(&args.y)?, f, args.steps, &limits, &cfg.caps)?;
    emit(out, &result)?;
    Ok(if matches!(result, FegenOutcome::Inconclusive { .. }) { 2 } else { 0 })
}

fn seed_sequence(items: &Option<Vec<String>>, caps: &Caps) -> Result<Option<SeedSequence>, CliError> {
    let Some(items) = items else { return Ok(None) };
    let forms = items
        .iter()
        .map(|s| PowerForm::parse(s, caps))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(SeedSequence::new(forms)?))
}

fn greedy(command: GreedyCommand, cfg: &RunConfig, out: &mut Out<'_>) -> Result<u8, CliError> {
    only_json(cfg, "greedy")?;
    match command {
        GreedyCommand::Fe1(args) => fe_run(&args, FeKind::TypeI, cfg, out),
        GreedyCommand::Fe2(args) => fe_run(&args, FeKind::TypeII, cfg, out),
        GreedyCommand::Fegen1(args) => fegen_run(&args, FeKind::TypeI, cfg, out),
        GreedyCommand::Fegen2(args) => fegen_run(&args, FeKind::TypeII, cfg, out),
        GreedyCommand::Verify { set, x, y, depth } => {
            if x.is_none() && y.is_none() {
                return Err(CliError::Usage("give --x, --y or both".into()));
            }
            let report = verify_fecor(
                &set_spec(&set)?,
                seed_sequence(&x, &cfg.caps)?.as_ref(),
                seed_sequence(&y, &cfg.caps)?.as_ref(),
                depth,
                &cfg.caps,
            )?;
            emit(out, &report)?;
            let checks = [&report.fs, &report.fe1, &report.fp, &report.fe2];
            Ok(if checks.iter().any(|c| matches!(c, Check::Inconclusive { .. })) { 2 } else { 0 })
        }
    }
}
