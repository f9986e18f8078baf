use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use arclen::rng::ChaChaSource;
use arclen::sampler::{build_plan, draw_parameter, SamplerPlan};
use arclen::validation::{check_certificates, tv_report};
use arclen::Curve;
use rand::Rng;

use crate::{epsilon_to_ell, CliError, Format, PreprocessArgs, SampleArgs, ValidateArgs};

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::new(2, format!("cannot open {what} {}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::new(2, format!("cannot parse {what} {}: {e}", path.display())))
}

pub fn read_curve(path: &Path) -> Result<Curve, CliError> {
    read_json(path, "curve file")
}

pub fn read_plan(path: &Path) -> Result<SamplerPlan, CliError> {
    let plan: SamplerPlan = read_json(path, "plan file")?;
    plan.validate()
        .map_err(|e| CliError::new(2, format!("malformed plan {}: {e}", path.display())))?;
    Ok(plan)
}

fn resolve_seed(seed: u64) -> u64 {
    if seed == 0 {
        rand::rng().random()
    } else {
        seed
    }
}

pub fn preprocess(args: PreprocessArgs) -> Result<(), CliError> {
    let ell = match args.epsilon {
        Some(eps) => epsilon_to_ell(eps)?,
        None => args.ell,
    };
    let curve = read_curve(&args.curve)?.rescale_to_unit()?;

    let start = Instant::now();
    let plan = build_plan(&curve, ell, args.splits)?;
    let elapsed = start.elapsed().as_secs_f64();

    for (i, (piece, report)) in plan.pieces().iter().zip(plan.reports()).enumerate() {
        let [a, b] = piece.interval();
        println!(
            "piece {i}: [{a:+.6}, {b:+.6}]  k = {}  rho* = {:.6}  M = {:.4e}  depth = {}  p = {:.6}",
            report.degree,
            report.rho_star,
            report.ellipse_sup,
            piece.bisect_depth(),
            piece.probability(),
        );
    }
    println!(
        "plan: {} piece(s), ell = {ell} (TV budget {:.3e}), preprocess time {:.3} s",
        plan.pieces().len(),
        0.5f64.powi(ell as i32),
        elapsed
    );

    let out = File::create(&args.out)?;
    serde_json::to_writer(BufWriter::new(out), &plan)
        .map_err(|e| CliError::new(1, format!("cannot write plan: {e}")))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

pub fn sample(args: SampleArgs) -> Result<(), CliError> {
    let plan = read_plan(&args.plan)?;
    let seed = resolve_seed(args.seed);
    let mut rng = ChaChaSource::seeded(seed);
    let dim = plan.curve().dimension();

    let out = File::create(&args.out)?;
    let mut w = BufWriter::new(out);
    if args.format == Format::Csv {
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=dim).map(|i| format!("x{i}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
    }

    let start = Instant::now();
    for _ in 0..args.count {
        let t = draw_parameter(&plan, &mut rng);
        let point = plan.curve().point_at(t);
        match args.format {
            Format::Csv => {
                write!(w, "{t:.16e}")?;
                for x in &point {
                    write!(w, ",{x:.16e}")?;
                }
                writeln!(w)?;
            }
            Format::Jsonl => {
                writeln!(
                    w,
                    "{{\"t\":{},\"x\":{}}}",
                    serde_json::to_string(&t).unwrap(),
                    serde_json::to_string(&point).unwrap()
                )?;
            }
        }
    }
    w.flush()?;
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "{} sample(s) with seed {seed}: {:.3e} s/sample, wrote {}",
        args.count,
        elapsed / args.count as f64,
        args.out.display()
    );
    Ok(())
}

pub fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let plan = read_plan(&args.plan)?;
    let curve = read_curve(&args.curve)?.rescale_to_unit()?;
    let seed = resolve_seed(args.seed);
    let mut rng = ChaChaSource::seeded(seed);

    let samples: Vec<f64> = (0..args.count)
        .map(|_| draw_parameter(&plan, &mut rng))
        .collect();
    let report = tv_report(&plan, &curve, &samples, args.bins as usize);
    println!(
        "l1_density_error = {:.4e}  binned_tv = {:.4e}  ks = {:.4e}  budget = {:.4e}",
        report.l1_density_error, report.binned_tv, report.ks_stat, report.budget
    );

    let checks = check_certificates(&plan, &curve);
    let mut all_passed = true;
    for c in &checks {
        println!(
            "{} {}: observed {:.4e}, bound {:.4e}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.observed,
            c.bound
        );
        all_passed &= c.passed;
    }

    let out = File::create(&args.out)?;
    serde_json::to_writer_pretty(BufWriter::new(out), &report)
        .map_err(|e| CliError::new(1, format!("cannot write report: {e}")))?;
    println!("wrote {}", args.out.display());

    if all_passed {
        Ok(())
    } else {
        Err(CliError::new(5, "certificate check failed".to_string()))
    }
}

/// Shared by tests: count data rows of a CSV file (excluding header).
#[allow(dead_code)]
pub fn csv_data_rows(path: &Path) -> Result<usize, CliError> {
    let file = File::open(path)?;
    Ok(BufReader::new(file).lines().count().saturating_sub(1))
}
