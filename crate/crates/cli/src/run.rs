use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use superw::dump::{describe, generator_dump, parse_dump};
use superw::exec::Mode;
use superw::invariants::{ComputedGenerators, GeneratorSource, OverrideGenerators, TCache};
use superw::verify::{self, CheckResult, Status, VerificationReport, VerifyError};
use superw::{CompositionShape, Pyramid, SuperAlgebra};

use crate::{Cli, Command, Format, Suite};

pub fn load_pyramid(path: &Path) -> Result<Pyramid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Pyramid::from_json_str(&text).with_context(|| format!("parsing pyramid {}", path.display()))
}

fn parse_shape(s: &str, p: &Pyramid) -> Result<CompositionShape> {
    if s == "min" {
        return Ok(p.shift_matrix().minimal_shape());
    }
    let parts = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| anyhow!("bad shape `{s}`: expected `min` or parts like 1,2")))
        .collect::<Result<Vec<_>>>()?;
    let mu = CompositionShape::new(parts, p.height())?;
    if !p.shift_matrix().is_admissible(&mu) {
        bail!("shape {mu} is not admissible for this pyramid");
    }
    Ok(mu)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// `Ok(true)` iff nothing failed.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Describe { common } => {
            let p = load_pyramid(&common.pyramid)?;
            let d = describe(&p);
            let text = match common.format {
                Format::Json => pretty(&d),
                Format::Text => describe_text(&d),
            };
            emit(common.out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Generators { common, shape, rmax } => {
            let p = load_pyramid(&common.pyramid)?;
            let mu = parse_shape(&shape, &p)?;
            let src = ComputedGenerators::new(&p, mu)?;
            let entries = generator_dump(&src, rmax, Mode::Parallel);
            let text = match common.format {
                Format::Json => serde_json::to_string_pretty(&entries)?,
                Format::Text => entries
                    .iter()
                    .map(|e| format!("{} = {}", e.key().label(), e.element))
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            emit(common.out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Verify {
            common,
            suite,
            shape,
            rmax,
            dmax,
            bound,
            generators,
            shifted,
            split,
            sample,
            seed,
            jobs,
            sequential,
        } => {
            let p = load_pyramid(&common.pyramid)?;
            let mu = parse_shape(&shape, &p)?;
            let base = ComputedGenerators::new(&p, mu.clone())?;
            let src: Box<dyn GeneratorSource> = match &generators {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    let over = parse_dump(&base, &text).with_context(|| format!("parsing dump {}", path.display()))?;
                    Box::new(OverrideGenerators::new(base, over))
                }
                None => Box::new(base),
            };
            let shifted = shifted.as_deref().map(load_pyramid).transpose()?;
            let split = split.as_deref().map(parse_split).transpose()?;
            let mode = if sequential { Mode::Sequential } else { Mode::Parallel };
            let cfg = Config { p: &p, mu: &mu, src: &*src, rmax, dmax, bound, shifted: shifted.as_ref(), split, sample, seed, mode };
            let rep = mode.install(jobs, || run_suites(&cfg, suite))?;
            let text = match common.format {
                Format::Json => {
                    let mut v = rep.to_json();
                    v["timing"] = rep.timing_json();
                    pretty(&v)
                }
                Format::Text => report_text(&rep),
            };
            emit(common.out.as_deref(), &text)?;
            eprintln!("{}", rep.summary());
            Ok(rep.ok())
        }
    }
}

fn parse_split(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("bad split `{s}`: expected p,x"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

struct Config<'a> {
    p: &'a Pyramid,
    mu: &'a CompositionShape,
    src: &'a dyn GeneratorSource,
    rmax: usize,
    dmax: usize,
    bound: usize,
    shifted: Option<&'a Pyramid>,
    split: Option<(usize, usize)>,
    sample: Option<usize>,
    seed: u64,
    mode: Mode,
}

const ALL: [Suite; 11] = [
    Suite::Relations,
    Suite::Invariance,
    Suite::Truncation,
    Suite::Pbw,
    Suite::TSeries,
    Suite::Roots,
    Suite::Refine,
    Suite::Eval,
    Suite::Iota,
    Suite::Psi,
    Suite::Baby,
];

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Relations => "relations",
        Suite::Invariance => "invariance",
        Suite::Truncation => "truncation",
        Suite::Pbw => "pbw",
        Suite::Psi => "psi",
        Suite::Baby => "baby",
        Suite::TSeries => "tseries",
        Suite::Refine => "refine",
        Suite::Roots => "roots",
        Suite::Iota => "iota",
        Suite::Eval => "eval",
        Suite::All => "all",
    }
}

fn run_suites(cfg: &Config, suite: Suite) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(cfg.p, cfg.bound);
    if suite != Suite::All {
        rep.extend(run_one(cfg, suite)?);
        return Ok(rep);
    }
    for s in ALL {
        match run_one(cfg, s) {
            Ok(r) => rep.extend(r),
            Err(e) => match e.downcast_ref::<VerifyError>() {
                Some(VerifyError::Unsupported(why)) => rep.push(CheckResult::skip(suite_name(s), why)),
                _ => return Err(e),
            },
        }
    }
    Ok(rep)
}

fn timed(p: &Pyramid, bound: usize, name: &str, f: impl FnOnce() -> Vec<CheckResult>) -> VerificationReport {
    let start = std::time::Instant::now();
    let mut rep = VerificationReport::new(p, bound);
    rep.checks = f();
    rep.timing.push((name.into(), start.elapsed()));
    rep
}

fn run_one(cfg: &Config, suite: Suite) -> Result<VerificationReport> {
    let (p, mode) = (cfg.p, cfg.mode);
    let name = suite_name(suite);
    Ok(match suite {
        Suite::Relations => relations(cfg)?,
        Suite::Invariance => timed(p, cfg.rmax, name, || verify::verify_m_invariance(cfg.src, cfg.rmax, mode)),
        Suite::Truncation => timed(p, 3, name, || verify::truncation_check(cfg.src, &p.p_tuple(), 3)),
        Suite::Pbw => {
            let checks = verify::pbw_rank_table(cfg.src, p, cfg.dmax, mode)?;
            timed(p, cfg.dmax, name, || checks)
        }
        Suite::TSeries => {
            let cache = TCache::new(p.clone(), SuperAlgebra::for_pyramid(p));
            timed(p, cfg.rmax, name, || verify::t_series_check(&cache, cfg.rmax, mode))
        }
        Suite::Roots => timed(p, cfg.rmax, name, || verify::k_independence_check(cfg.src, cfg.rmax, mode)),
        Suite::Refine => {
            let (b, x) = match cfg.split {
                Some(s) => s,
                None => {
                    let b = (1..=cfg.mu.len())
                        .find(|&a| cfg.mu.part(a) >= 2)
                        .ok_or_else(|| VerifyError::Unsupported(format!("shape {} has no block to split", cfg.mu)))?;
                    (b, 1)
                }
            };
            let checks = verify::shape_refinement_check(p, cfg.mu, b, x, cfg.rmax, mode)?;
            timed(p, cfg.rmax, name, || checks)
        }
        Suite::Eval => verify::evaluation_consistency(p, cfg.rmax, mode)?,
        Suite::Iota => {
            let q = cfg.shifted.ok_or_else(|| VerifyError::Unsupported("no --shifted pyramid given".into()))?;
            verify::iota_consistency(p, q, cfg.bound, mode)?
        }
        Suite::Psi => verify::psi_check(p, cfg.rmax, cfg.dmax, mode)?,
        Suite::Baby => verify::baby_comult_consistency(p, cfg.rmax, cfg.dmax, mode)?,
        Suite::All => unreachable!("expanded by run_suites"),
    })
}

fn relations(cfg: &Config) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let p = cfg.p;
    let ones_shape = CompositionShape::ones(p.height());
    let ones_owned;
    let ones: &dyn GeneratorSource = if *cfg.mu == ones_shape {
        cfg.src
    } else {
        ones_owned = ComputedGenerators::new(p, ones_shape)?;
        &ones_owned
    };
    let mut rep = VerificationReport::new(p, cfg.bound);
    match cfg.sample {
        None => {
            rep.checks.extend(verify::verify_d_family(ones, cfg.bound, cfg.mode));
            rep.checks.extend(verify::verify_p_family(cfg.src, cfg.bound, cfg.mode));
        }
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for (src, drinfeld) in [(ones, true), (cfg.src, false)] {
                let all = verify::enumerate(src.data(), cfg.bound, drinfeld);
                let mut picked: Vec<usize> = sample(&mut rng, all.len(), n.min(all.len())).into_vec();
                picked.sort_unstable();
                let insts: Vec<_> = picked.into_iter().map(|i| all[i].clone()).collect();
                rep.checks.extend(verify::run_instances(src, &insts, cfg.mode));
            }
        }
    }
    rep.timing.push(("relations".into(), start.elapsed()));
    Ok(rep)
}

fn describe_text(d: &Value) -> String {
    let mut lines = Vec::new();
    if let Value::Object(m) = d {
        for (k, v) in m {
            lines.push(format!("{k}: {}", serde_json::to_string(v).expect("serializable")));
        }
    }
    lines.join("\n")
}

/// A check's parameters in the usual notation where it names a generator.
fn check_label(c: &CheckResult) -> String {
    let get = |k: &str| c.params.iter().find(|(n, _)| n == k).map(|(_, v)| v);
    if let (Some(Value::String(f)), Some(a), Some(i), Some(j), Some(r)) = (get("family"), get("a"), get("i"), get("j"), get("r")) {
        let rest: Vec<String> = c
            .params
            .iter()
            .filter(|(n, _)| !["family", "a", "i", "j", "r"].contains(&n.as_str()))
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        let g = format!("{f}_{{{a};{i},{j}}}^{{({r})}}");
        return if rest.is_empty() { g } else { format!("{g} {}", rest.join(" ")) };
    }
    c.params.iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(" ")
}

fn report_text(rep: &VerificationReport) -> String {
    let mut out = vec![format!("pyramid {}", json!(rep.pyramid))];
    for c in &rep.checks {
        let mut line = format!("{:<4} {:<16} {}", c.status.as_str(), c.id, check_label(c));
        if c.status == Status::Fail {
            if let Some(r) = &c.residual {
                line.push_str(&format!("\n     residual: {r}"));
            }
        }
        out.push(line);
    }
    out.push(rep.summary());
    out.join("\n")
}
