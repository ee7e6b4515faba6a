use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use serde_json::{json, Value};

use equibs_core::canonical::{root_restrict, rooted_distance, RootedDistance, RootedGComplex, BEAM_CAP};
use equibs_core::generators::{Family, FamilySpec};
use equibs_core::induction::induced_criterion_report;
use equibs_core::io::{load_action, resolve_group, write_action};
use equibs_core::measure::{check_unimodular, convergence_report, WeightedEnsemble};
use equibs_core::spectra::{
    fk_determinant, moment, multiplicity, reciprocity_check, spectral_measure, DEFAULT_SPECTRAL_CAP, MAX_POWER,
};
use equibs_core::{CatalogGroup, Error, Group, GroupAction, SubgroupEmbedding};

use crate::{Command, FamilyArgs, OutArgs};

/// 1 for computational infeasibility, 2 for input errors.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_infeasible() => 1,
        Some(Error::InternalInconsistency(_) | Error::NotRational(_)) => 1,
        _ => 2,
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate { family, out } => generate(&family, &out),
        Command::Multiplicity { actions, n, rho, out } => moments_table(&actions, n, &rho, None, &out),
        Command::Spectrum { action, n, rho, out } => spectrum(&action, n, rho, &out),
        Command::Moments {
            actions,
            n,
            rho,
            r_max,
            out,
        } => moments_table(&actions, n, &rho, Some(r_max), &out),
        Command::Converge { family, r, out } => converge(&family, &r, &out),
        Command::Criterion {
            family,
            h,
            c_max,
            tolerance,
            out,
        } => criterion(&family, &h, c_max, tolerance, &out),
        Command::Reciprocity { g, h, action, n, out } => reciprocity(&g, &h, &action, n, &out),
        Command::UnimodularCheck { action, depth, out } => unimodular(&action, depth, &out),
        Command::Induce {
            g,
            h,
            action,
            out,
            stem,
        } => induce(&g, &h, &action, &out, &stem),
        Command::Distance {
            action,
            root,
            other_action,
            other_root,
            r_max,
            out,
        } => distance(&action, root, &other_action, other_root, r_max, &out),
    }
}

fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || anyhow!(Error::Parse(format!("bad range `{s}`")));
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let a: usize = a.parse().map_err(|_| bad())?;
        let b: usize = b.parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![s.parse().map_err(|_| bad())?])
    }
}

fn param<T: std::str::FromStr>(args: &FamilyArgs, i: usize, what: &str) -> Result<T> {
    let raw = args
        .params
        .get(i)
        .ok_or_else(|| anyhow!(Error::Parse(format!("{} needs parameter {what}", args.family))))?;
    raw.parse()
        .map_err(|_| anyhow!(Error::Parse(format!("bad {what} `{raw}`"))))
}

fn parse_family(args: &FamilyArgs) -> Result<(Family, String)> {
    let expect = |k: usize| -> Result<()> {
        if args.params.len() != k {
            bail!(Error::Parse(format!(
                "{} takes {k} parameter(s), got {}",
                args.family,
                args.params.len()
            )));
        }
        Ok(())
    };
    Ok(match args.family.as_str() {
        "sierpinski" => {
            expect(0)?;
            (Family::Sierpinski, "sierpinski".into())
        }
        "cycle-rotation" => {
            expect(1)?;
            let k: usize = param(args, 0, "k")?;
            (Family::CycleRotation { k }, format!("cycle-rotation-k{k}"))
        }
        "cycle-reflection" => {
            expect(0)?;
            (Family::CycleReflection, "cycle-reflection".into())
        }
        "prism" => {
            expect(0)?;
            (Family::Prism, "prism".into())
        }
        "random" => {
            expect(3)?;
            let degree_bound: usize = param(args, 0, "degree bound")?;
            let group: CatalogGroup = args.params[1].parse()?;
            let seed: u64 = param(args, 2, "seed")?;
            let slug = format!("random-d{degree_bound}-{}-s{seed}", group.to_string().replace(':', ""));
            (
                Family::Random {
                    degree_bound,
                    group,
                    seed,
                },
                slug,
            )
        }
        other => bail!(Error::Parse(format!("unknown family `{other}`"))),
    })
}

fn build_family(args: &FamilyArgs) -> Result<(Vec<(usize, GroupAction)>, String)> {
    let (family, slug) = parse_family(args)?;
    let members = parse_range(&args.range)?
        .into_iter()
        .map(|i| Ok((i, FamilySpec::new(family.clone(), i).build()?)))
        .collect::<Result<_>>()?;
    Ok((members, slug))
}

fn sink(out: &str) -> Result<Box<dyn Write>> {
    if out == "-" {
        Ok(Box::new(BufWriter::new(io::stdout())))
    } else {
        let f = File::create(out).with_context(|| format!("cannot create {out}"))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn sidecar(out: &OutArgs, subcommand: &str, parameters: Value) -> Result<()> {
    if !out.sidecar || out.out == "-" {
        return Ok(());
    }
    let meta = json!({
        "tool": "equibs",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "parameters": parameters,
        "caps": {
            "spectral_simplices": DEFAULT_SPECTRAL_CAP,
            "moment_power": MAX_POWER,
            "canonical_beam": BEAM_CAP,
        },
    });
    let path = format!("{}.json", out.out);
    std::fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n").with_context(|| format!("cannot write {path}"))?;
    Ok(())
}

fn verdict(out: &OutArgs, line: &str) {
    if out.out == "-" {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn csv_writer(out: &str) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::Writer::from_writer(sink(out)?))
}

fn generate(args: &FamilyArgs, dir: &Path) -> Result<()> {
    let (members, slug) = build_family(args)?;
    for (i, action) in &members {
        let path = write_action(action, dir, &format!("{slug}-{i}"))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn rho_list(action: &GroupAction, rho: &str) -> Result<Vec<usize>> {
    let count = action.group().character_table()?.len();
    if rho == "all" {
        return Ok((0..count).collect());
    }
    let r: usize = rho
        .parse()
        .map_err(|_| anyhow!(Error::Parse(format!("bad character index `{rho}`"))))?;
    if r >= count {
        bail!(Error::CharacterOutOfRange(r));
    }
    Ok(vec![r])
}

fn moments_table(paths: &[std::path::PathBuf], n: usize, rho: &str, r_max: Option<usize>, out: &OutArgs) -> Result<()> {
    let actions: Vec<GroupAction> = paths.iter().map(|p| load_action(p)).collect::<equibs_core::Result<_>>()?;
    if let Some(r) = r_max {
        if r > MAX_POWER {
            bail!(Error::PowerCapExceeded(r, MAX_POWER));
        }
    }
    let mut w = csv_writer(&out.out)?;
    let mut header: Vec<String> = ["index", "n", "rho", "m", "m2", "kernel_dim"].map(String::from).to_vec();
    if let Some(r) = r_max {
        header.push("fk_det".into());
        header.extend((0..=r).map(|k| format!("moment_{k}")));
    }
    w.write_record(&header)?;
    for (index, action) in actions.iter().enumerate() {
        for r in rho_list(action, rho)? {
            let m = multiplicity(action, n, r)?;
            let mut row = vec![
                index.to_string(),
                n.to_string(),
                r.to_string(),
                m.multiplicity.to_string(),
                rational(&m.l2),
                m.kernel_dim.to_string(),
            ];
            if let Some(r_max) = r_max {
                let fk = if n <= action.complex().dim() {
                    fk_determinant(&spectral_measure(action, n, r)?)
                } else {
                    1.0
                };
                row.push(format!("{fk}"));
                for k in 0..=r_max {
                    row.push(rational(&moment(action, n, r, k)?));
                }
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    let name = if r_max.is_some() { "moments" } else { "multiplicity" };
    sidecar(
        out,
        name,
        json!({"actions": paths, "n": n, "rho": rho, "r_max": r_max}),
    )
}

fn spectrum(path: &Path, n: usize, rho: usize, out: &OutArgs) -> Result<()> {
    let action = load_action(path)?;
    let nu = spectral_measure(&action, n, rho)?;
    nu.write_csv(sink(&out.out)?)?;
    sidecar(
        out,
        "spectrum",
        json!({"action": path, "n": n, "rho": rho, "fk_determinant": fk_determinant(&nu)}),
    )
}

fn parse_radii(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| anyhow!(Error::Parse(format!("bad radius `{t}`"))))
        })
        .collect()
}

fn converge(args: &FamilyArgs, r: &str, out: &OutArgs) -> Result<()> {
    let (members, _) = build_family(args)?;
    let radii = parse_radii(r)?;
    let report = convergence_report(&members, &radii)?;
    report.write_csv(sink(&out.out)?)?;
    sidecar(
        out,
        "converge",
        json!({"family": args.family, "range": args.range, "params": args.params, "radii": radii}),
    )
}

fn subgroup_elements(group: &Arc<Group>, spec: &str) -> Result<Vec<usize>> {
    Ok(embedding(group, spec)?.elements().to_vec())
}

fn embedding(group: &Arc<Group>, spec: &str) -> Result<SubgroupEmbedding> {
    match spec {
        "trivial" => Ok(SubgroupEmbedding::trivial(group.clone())),
        "all" => Ok(SubgroupEmbedding::identity(group.clone())),
        _ if spec.contains(',') || spec.chars().all(|c| c.is_ascii_digit()) => {
            let elements: Vec<usize> = spec
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| anyhow!(Error::Parse(format!("bad element `{t}`"))))
                })
                .collect::<Result<_>>()?;
            Ok(SubgroupEmbedding::from_elements(group.clone(), &elements)?)
        }
        _ => {
            let sub = Arc::new(Group::catalog(spec.parse()?)?);
            Ok(SubgroupEmbedding::find(group.clone(), sub)?)
        }
    }
}

fn criterion(args: &FamilyArgs, h: &str, c_max: usize, tolerance: f64, out: &OutArgs) -> Result<()> {
    if !(tolerance > 0.0) {
        bail!(Error::Parse(format!("tolerance must be positive, got {tolerance}")));
    }
    let (members, _) = build_family(args)?;
    let group = members
        .first()
        .map(|(_, a)| a.group().clone())
        .ok_or_else(|| anyhow!(Error::Parse("empty family".into())))?;
    let elements = subgroup_elements(&group, h)?;
    let report = induced_criterion_report(&members, &elements, c_max, tolerance)?;
    report.write_csv(sink(&out.out)?)?;
    sidecar(
        out,
        "criterion",
        json!({"family": args.family, "range": args.range, "params": args.params,
               "H": elements, "Cmax": c_max, "tolerance": tolerance, "consistent": report.consistent}),
    )?;
    verdict(out, &report.verdict_line());
    Ok(())
}

fn reciprocity(g: &str, h: &str, path: &Path, n: usize, out: &OutArgs) -> Result<()> {
    let group = resolve_group(g, Path::new("."))?;
    let emb = embedding(&group, h)?;
    let action = load_action(path)?;
    if action.group().as_ref() != emb.sub().as_ref() {
        bail!(Error::GroupMismatch);
    }
    let report = reciprocity_check(&emb, &action, n)?;
    let mut w = csv_writer(&out.out)?;
    w.write_record(["rho", "lhs", "rhs", "equal"])?;
    for row in &report.rows {
        w.write_record([
            row.rho.to_string(),
            rational(&row.lhs),
            rational(&row.rhs),
            (row.lhs == row.rhs).to_string(),
        ])?;
    }
    w.flush()?;
    sidecar(out, "reciprocity", json!({"G": g, "H": h, "action": path, "n": n}))?;
    let line = if report.all_equal() { "all-equal" } else { "mismatch" };
    verdict(out, &format!("reciprocity: {line}"));
    Ok(())
}

fn unimodular(path: &Path, depth: usize, out: &OutArgs) -> Result<()> {
    let action = load_action(path)?;
    let ensemble = WeightedEnsemble::from_action(&action)?;
    let mut w = csv_writer(&out.out)?;
    w.write_record(["depth", "pass", "max_violation", "classes"])?;
    let mut all = true;
    for d in 1..=depth {
        let rep = check_unimodular(&ensemble, d)?;
        all &= rep.pass;
        w.write_record([
            d.to_string(),
            rep.pass.to_string(),
            rational(&rep.max_violation),
            rep.classes.to_string(),
        ])?;
    }
    w.flush()?;
    sidecar(out, "unimodular-check", json!({"action": path, "depth": depth}))?;
    verdict(out, &format!("unimodular: {}", if all { "pass" } else { "fail" }));
    Ok(())
}

fn induce(g: &str, h: &str, path: &Path, dir: &Path, stem: &str) -> Result<()> {
    let group = resolve_group(g, Path::new("."))?;
    let emb = embedding(&group, h)?;
    let action = load_action(path)?;
    let induced = equibs_core::induce_complex(&emb, &action)?;
    println!("{}", write_action(&induced, dir, stem)?.display());
    Ok(())
}

fn rooted(action: GroupAction, root: usize) -> Result<RootedGComplex> {
    if root >= action.complex().vertex_count() {
        bail!(Error::VertexOutOfRange(root));
    }
    Ok(root_restrict(&action, root)?)
}

fn distance(a: &Path, ra: usize, b: &Path, rb: usize, r_max: usize, out: &OutArgs) -> Result<()> {
    let x = rooted(load_action(a)?, ra)?;
    let y = rooted(load_action(b)?, rb)?;
    let d = rooted_distance(&x, &y, r_max)?;
    let (kind, exponent) = match d {
        RootedDistance::Infinite => ("infinite", String::new()),
        RootedDistance::Exact(r) => ("exact", r.to_string()),
        RootedDistance::AtLeast(r) => ("at-most", r.to_string()),
    };
    let mut w = csv_writer(&out.out)?;
    w.write_record(["r_max", "kind", "exponent", "value"])?;
    w.write_record([r_max.to_string(), kind.to_string(), exponent, format!("{}", d.value())])?;
    w.flush()?;
    sidecar(
        out,
        "distance",
        json!({"action": a, "root": ra, "other_action": b, "other_root": rb, "r_max": r_max}),
    )
}
