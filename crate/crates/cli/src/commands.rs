use std::fmt::Write as _;
use std::fs;
use std::str::FromStr;

use mahler_core::cluster::{explore_mutation_tree, ExchangeMatrix, ExploreLimits, Seed, SeedFile};
use mahler_core::entropy::{compare_entropies, mahler_entropy_fit, rank2_entropy_exact, EntropyBudgets, FitField, FitKind};
use mahler_core::mahler::{
    markoff_recursion_sequence, orbit_mahler_sequence, somos4_recursion_sequence, FrozenParam, MahlerSequence,
    SamplerConfig, SamplerMode, GENERATOR,
};
use mahler_core::recurrence::{iterate, iterate_symbolic, RecurrenceDef, SymbolicBudget, System};
use mahler_core::special::{cstar_constant, markoff_x5_closed, mx4_closed, mx5_closed, smyth_constant, somos_x6_closed};
use mahler_core::{ExtC64, Rational};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::args::{
    ClosedFormArgs, ClusterArgs, EntropyArgs, Format, MahlerArgs, Method, OrbitArgs, OrbitMode, SystemSource,
};
use crate::failure::Failure;
use crate::output::{emit, sig12, Sidecar, SCHEMA_VERSION};

fn resolve(source: &SystemSource) -> Result<(RecurrenceDef, Option<System>), Failure> {
    match (&source.system, &source.recurrence) {
        (Some(name), _) => {
            let sys: System = name.parse()?;
            Ok((RecurrenceDef::builtin(sys), Some(sys)))
        }
        (_, Some(text)) => Ok((RecurrenceDef::parse(text)?, None)),
        _ => Err(Failure::Config("give --system or --recurrence".into())),
    }
}

fn rationals(texts: &[String], what: &str) -> Result<Vec<Rational>, Failure> {
    texts
        .iter()
        .map(|t| Rational::from_str(t.trim()).map_err(|_| Failure::Config(format!("{what}: `{t}` is not a rational number"))))
        .collect()
}

fn sized(values: Vec<Rational>, want: usize, what: &str) -> Result<Vec<Rational>, Failure> {
    if values.len() != want {
        return Err(Failure::Config(format!("{what}: expected {want} value(s), got {}", values.len())));
    }
    Ok(values)
}

fn sidecar<C: Serialize, E: Serialize>(rerun: Vec<String>, config: C, rows: usize, truncated: Option<String>, extra: E) -> Sidecar<C, E> {
    Sidecar { schema_version: SCHEMA_VERSION, tool_version: env!("CARGO_PKG_VERSION"), rerun, config, rows, truncated, extra }
}

/// Writes the rows, then turns a truncation into exit code 3.
fn finish<C: Serialize, E: Serialize>(a: Option<&std::path::Path>, csv: &str, side: &Sidecar<C, E>) -> Result<(), Failure> {
    emit(a, csv, side)?;
    match &side.truncated {
        Some(reason) => Err(Failure::Truncated(format!("{reason} ({} rows written)", side.rows))),
        None => Ok(()),
    }
}

pub fn orbit(a: OrbitArgs) -> Result<(), Failure> {
    let (def, _) = resolve(&a.source)?;
    let order = def.order();
    let one = || Rational::from_integer(1.into());
    let init = match &a.init {
        Some(t) => sized(rationals(t, "--init")?, order, "--init")?,
        None => vec![one(); order],
    };
    let params = match &a.params {
        Some(t) => sized(rationals(t, "--params")?, def.params().len(), "--params")?,
        None if a.mode == OrbitMode::Symbolic || def.params().is_empty() => Vec::new(),
        None => return Err(Failure::Config(format!("--params needs values for {}", def.params().join(", ")))),
    };
    let mut csv = String::from("n,value\n");
    let (rows, truncated) = match a.mode {
        OrbitMode::Rational => {
            let o = iterate(&def, &init, &params, a.n)?;
            for (i, v) in o.values.iter().enumerate() {
                writeln!(csv, "{},{}", i + 1, v).expect("string write");
            }
            (o.values.len(), o.halted.map(|e| e.to_string()))
        }
        OrbitMode::Numeric => {
            let to_ext = |q: &Rational| ExtC64::from_real(q.to_f64().unwrap_or(f64::NAN));
            let x: Vec<ExtC64> = init.iter().map(to_ext).collect();
            let p: Vec<ExtC64> = params.iter().map(to_ext).collect();
            let o = iterate(&def, &x, &p, a.n)?;
            for (i, v) in o.values.iter().enumerate() {
                writeln!(csv, "{},{}", i + 1, v).expect("string write");
            }
            (o.values.len(), o.halted.map(|e| e.to_string()))
        }
        OrbitMode::Symbolic => {
            if a.init.is_some() || a.params.is_some() {
                return Err(Failure::Config("symbolic mode iterates in the initial variables; drop --init/--params".into()));
            }
            let budget = SymbolicBudget { max_terms: a.max_terms, ..SymbolicBudget::default() };
            let o = iterate_symbolic(&def, a.n, budget)?;
            let mut names: Vec<String> = (1..=order).map(|i| format!("x{i}")).collect();
            names.extend(def.params().iter().cloned());
            for (i, v) in o.values.iter().enumerate() {
                writeln!(csv, "{},\"{}\"", i + 1, v.display_with(&names)).expect("string write");
            }
            let t = o.truncated.then(|| format!("term budget {} exceeded at n={}", a.max_terms, o.values.len() + 1));
            (o.values.len(), t)
        }
    };
    let side = sidecar(a.to_argv(), &a, rows, truncated, json!({ "recurrence": def.to_string() }));
    finish(a.output.as_deref(), &csv, &side)
}

fn frozen_params(def: &RecurrenceDef, given: &[String]) -> Result<Vec<FrozenParam>, Failure> {
    let mut out = vec![FrozenParam::Torus; def.params().len()];
    for g in given {
        let (name, value) =
            g.split_once('=').ok_or_else(|| Failure::Config(format!("--param `{g}`: expected NAME=torus or NAME=INTEGER")))?;
        let idx = def
            .params()
            .iter()
            .position(|p| p == name.trim())
            .ok_or_else(|| Failure::Config(format!("--param: no parameter `{name}` (have: {})", def.params().join(", "))))?;
        out[idx] = match value.trim() {
            "torus" => FrozenParam::Torus,
            v => FrozenParam::Fixed(v.parse().map_err(|_| Failure::Config(format!("--param `{g}`: `{v}` is not an integer")))?),
        };
    }
    Ok(out)
}

fn parse_window(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Config(format!("--fit `{s}`: expected LO:HI"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

pub fn mahler(a: MahlerArgs) -> Result<(), Failure> {
    let (def, system) = resolve(&a.source)?;
    let cfg = SamplerConfig {
        mode: if a.lattice.is_some() { SamplerMode::Lattice } else { SamplerMode::MonteCarlo },
        sample_count: a.samples,
        lattice_m: a.lattice.unwrap_or(SamplerConfig::default().lattice_m),
        rng_seed: a.seed,
        torus_dim: None,
        zero_threshold: a.zero_threshold,
    };
    cfg.validate()?;
    let window = a.fit.as_deref().map(parse_window).transpose()?;
    let seq: MahlerSequence<f64> = match (a.method, system) {
        (Method::Direct, _) => orbit_mahler_sequence(&def, a.n, &cfg, &frozen_params(&def, &a.params)?)?,
        (Method::Reduced, Some(System::Markoff)) => markoff_recursion_sequence(a.n, &cfg)?,
        (Method::Reduced, Some(System::Somos4)) => somos4_recursion_sequence(a.n, &cfg)?,
        (Method::Reduced, _) => return Err(Failure::Config("--method reduced exists for markoff and somos4 only".into())),
    };
    let mut csv = String::from("n,value,stderr,skipped,samples_used\n");
    for (i, e) in seq.estimates.iter().enumerate() {
        writeln!(csv, "{},{:e},{:e},{},{}", i + 1, e.value, e.stderr, e.skipped, e.samples_used).expect("string write");
    }
    let fit = match window {
        Some(w) => match mahler_entropy_fit(&seq, FitKind::Linear, Some(w)) {
            Ok(f) => {
                eprintln!("slope over [{}, {}]: {} (two-point {:?})", w.0, w.1, f.slope, f.two_point);
                Some(f)
            }
            Err(e) => {
                eprintln!("fit over [{}, {}] failed: {e}", w.0, w.1);
                None
            }
        },
        None => None,
    };
    let extra = json!({
        "system": seq.system,
        "generator": GENERATOR,
        "sampler": seq.config,
        "torus_dim": seq.torus_dim,
        "params": seq.params,
        "fit": fit,
    });
    let side = sidecar(a.to_argv(), &a, seq.len(), seq.truncated.clone(), extra);
    finish(a.output.as_deref(), &csv, &side)
}

fn field_line(name: &str, f: &FitField) -> String {
    let mut s = format!("{name:<12}");
    match (&f.fit, &f.error) {
        (Some(fit), _) => {
            write!(s, "{:<16} window {}-{}", sig12(fit.slope), fit.window.0, fit.window.1).expect("string write");
            if let Some(tp) = fit.two_point {
                write!(s, "  two-point {}", sig12(tp)).expect("string write");
            }
        }
        (None, Some(e)) => s.push_str(&format!("unavailable: {e}")),
        (None, None) => s.push_str("unavailable"),
    }
    if let Some(g) = &f.growth {
        write!(s, "  (zero entropy; best growth {:?}, coefficient {})", g.kind, sig12(g.slope)).expect("string write");
    }
    s
}

pub fn entropy(a: EntropyArgs) -> Result<(), Failure> {
    let system: System = a.system.parse()?;
    let mut budgets = EntropyBudgets::for_system(system);
    if let Some(s) = a.samples {
        budgets.sampler.sample_count = s;
    }
    if let Some(s) = a.seed {
        budgets.sampler.rng_seed = s;
    }
    if let Some(n) = a.mahler_n {
        budgets.mahler_n = n;
        budgets.mahler_window = budgets.mahler_window.filter(|w| w.1 <= n);
    }
    if let Some(n) = a.degree_n {
        budgets.degree_n = n;
    }
    if let Some(n) = a.height_n {
        budgets.height_n = n;
    }
    budgets.sampler.validate()?;
    let report = compare_entropies(system, &budgets);
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    if let Some(p) = &a.json {
        fs::write(p, format!("{json}\n"))?;
    }
    match a.format {
        Format::Json => println!("{json}"),
        Format::Table => {
            println!("{:<12}{}", "system", report.system);
            if let Some(x) = report.exact_reference {
                println!("{:<12}{}", "exact", sig12(x));
            }
            println!("{}", field_line("algebraic", &report.algebraic));
            println!("{}", field_line("diophantine", &report.diophantine));
            println!("{}", field_line("mahler", &report.mahler));
            let ord = match report.ordering_holds {
                Some(true) => "mahler <= diophantine + 5e-3",
                Some(false) => "VIOLATED: mahler > diophantine + 5e-3",
                None => "not checked",
            };
            println!("{:<12}{ord}", "ordering");
            for note in &report.assumptions {
                println!("note: {note}");
            }
        }
    }
    Ok(())
}

const CLOSED_FORMS: &str = "smyth, mx4:R, mx5:R, cstar:M, rank2-entropy:R, markoff-x5, somos-x6";

fn closed_value(name: &str) -> Result<f64, Failure> {
    let unknown = || Failure::Config(format!("unknown constant `{name}`; valid names: {CLOSED_FORMS}"));
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a.trim().parse::<u32>().map_err(|_| Failure::Config(format!("`{name}`: bad argument")))?)),
        None => (name, None),
    };
    Ok(match (head, arg) {
        ("smyth", None) => smyth_constant(),
        ("markoff-x5", None) => markoff_x5_closed(),
        ("somos-x6", None) => somos_x6_closed(),
        ("mx4", Some(r)) => mx4_closed(r),
        ("mx5", Some(r)) => mx5_closed(r)?,
        ("cstar", Some(m)) => cstar_constant(m as usize)?,
        ("rank2-entropy", Some(r)) => rank2_entropy_exact(r),
        _ => return Err(unknown()),
    })
}

pub fn closed_form(a: ClosedFormArgs) -> Result<(), Failure> {
    let values = a.names.iter().map(|n| closed_value(n.trim())).collect::<Result<Vec<_>, _>>()?;
    for v in values {
        println!("{}", sig12(v));
    }
    Ok(())
}

fn builtin_seed(name: &str) -> Result<Seed, Failure> {
    let m = match name.trim().to_ascii_lowercase().as_str() {
        "a2" => ExchangeMatrix::a2(),
        "markoff" => ExchangeMatrix::markoff(),
        "somos4" => ExchangeMatrix::somos4(),
        other => match other.strip_prefix("rank2:").map(str::parse::<i64>) {
            Some(Ok(r)) => ExchangeMatrix::rank2(r),
            _ => return Err(Failure::Config(format!("unknown seed `{name}`; valid: a2, markoff, somos4, rank2:R"))),
        },
    };
    Ok(Seed::initial(m))
}

fn show(seed: &Seed) -> String {
    seed.cluster().iter().map(ToString::to_string).collect::<Vec<_>>().join(" ; ")
}

pub fn cluster(a: ClusterArgs) -> Result<(), Failure> {
    let start = match (&a.seed, &a.builtin) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)?;
            let file: SeedFile = serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            file.into_seed()?
        }
        (_, Some(name)) => builtin_seed(name)?,
        _ => return Err(Failure::Config("give --seed or --builtin".into())),
    };
    println!("step 0: {}", show(&start));
    let mut seed = start.clone();
    let mut period = None;
    for (i, &k) in a.sequence.iter().enumerate() {
        seed = seed.mutate(k)?;
        println!("step {} (mu_{k}): {}", i + 1, show(&seed));
        if period.is_none() {
            if let Some(perm) = start.relabeling_to(&seed) {
                period = Some((i + 1, perm));
            }
        }
    }
    if a.check_period {
        match &period {
            Some((p, perm)) => {
                let perm: Vec<String> = perm.iter().map(|i| (i + 1).to_string()).collect();
                println!("period {p}: the seed returns to the start, relabeled by ({})", perm.join(" "));
            }
            None => println!("no return to the start within {} mutations", a.sequence.len()),
        }
    }
    if let Some(d) = a.depth {
        let tree = explore_mutation_tree(&seed, d, ExploreLimits::default())?;
        for level in &tree.levels {
            println!("depth {}: max degree {}, new seeds {}", level.depth, level.max_degree.rational_degree, level.new_seeds);
        }
        if tree.truncated {
            return Err(Failure::Truncated(format!("mutation tree stopped at depth {}", tree.levels.len() - 1)));
        }
    }
    if let Some(p) = &a.output {
        let json = serde_json::to_string_pretty(&SeedFile::from_seed(&seed)).map_err(|e| Failure::Internal(e.to_string()))?;
        fs::write(p, format!("{json}\n"))?;
    }
    Ok(())
}
