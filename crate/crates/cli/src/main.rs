//! `sic`: command-line front end for the sic-core pipeline.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use sic_core::fiducial::{
    eigenspace_decomposition, find_fiducial, frame_potential, frame_potential_minimum, sic_residual, SearchConfig,
    SymmetryType,
};
use sic_core::io::{self, parse_json, to_pretty};
use sic_core::number_theory::{dimension_sequence, dimension_towers, sic_discriminant};
use sic_core::overlaps::{compute_overlaps, overlap_orbit_partition, partition_tolerance, stability_group};
use sic_core::recognition::{default_max_degree, phase_relation_rank, recognize_overlap_phases, RecognitionConfig};
use sic_core::wh_group::{dprime, fa_matrix, symplectic_order, zauner_matrix};
use sic_core::{clifford_unitary, make_context, projective_order, with_real, Real, SicError, DEFAULT_PRECISION_BITS};

use manifest::RunManifest;

/// Cap on the default recognition degree bound.
const CLI_MAX_DEGREE_CAP: usize = 64;

#[derive(Parser)]
#[command(name = "sic", version, about = "SIC fiducials, overlaps, stabilizers, dimension towers and phase recognition")]
struct Cli {
    /// Working precision in bits (rounded up to 53, 128, 256, ..., 4096).
    #[arg(long, global = true, env = "SIC_PRECISION_BITS")]
    bits: Option<u32>,

    /// Write the JSON artifact here (plus `<out>.manifest.json`) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Eigenspace {
    Z,
    A,
    None,
}

#[derive(Subcommand)]
enum Command {
    /// Random-restart search for a fiducial, polished to --bits.
    Search(SearchArgs),
    /// Recompute the residual of a fiducial file.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        target_residual: f64,
    },
    /// Overlap table of a fiducial file.
    Overlaps { file: PathBuf },
    /// Stability group and overlap orbits of a fiducial file.
    Stabilizer { file: PathBuf },
    /// Dimension sequence and towers for a discriminant.
    Tower(TowerArgs),
    /// Recognize the overlap phases of an overlaps file.
    Recognize {
        #[arg(long)]
        input: PathBuf,
        /// Degree bound (default 2 d' phi(d'), capped at 64 and at bits/16).
        #[arg(long)]
        max_degree: Option<usize>,
        /// Also estimate the multiplicative rank of the phases.
        #[arg(long)]
        rank: bool,
    },
    /// Context summary for dimension d.
    Info { d: usize },
}

#[derive(Args)]
struct SearchArgs {
    d: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    max_restarts: Option<usize>,
    #[arg(long)]
    target_residual: Option<f64>,
    #[arg(long, value_enum, default_value_t = Eigenspace::Z)]
    eigenspace: Eigenspace,
}

#[derive(Args)]
struct TowerArgs {
    /// Discriminant (square-free part of (d-3)(d+1)).
    #[arg(long = "D", conflicts_with = "d")]
    discriminant: Option<u64>,
    /// Take the discriminant of this dimension.
    #[arg(long)]
    d: Option<u64>,
    #[arg(long, default_value_t = 12)]
    count: usize,
    /// Longest tower to report (default: count).
    #[arg(long)]
    max_len: Option<usize>,
    /// Add d' for every term.
    #[arg(long)]
    use_dprime: bool,
}

/// What a command produced.
struct Outcome {
    artifact: Value,
    /// Result is honest but not converged or not certified.
    incomplete: bool,
    summary: String,
}

fn read_json(path: &Path, manifest: &mut RunManifest) -> Result<Value> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    manifest.add_input(path, &bytes);
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    parse_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn bits_or_default(bits: Option<u32>) -> u32 {
    bits.unwrap_or(DEFAULT_PRECISION_BITS)
}

fn cmd_search(args: &SearchArgs, bits: u32, manifest: &mut RunManifest) -> Result<Outcome> {
    let mut cfg = SearchConfig { rng_seed: args.seed, polish_precision_bits: bits, ..SearchConfig::default() };
    if let Some(n) = args.max_restarts {
        cfg.max_restarts = n;
    }
    if let Some(r) = args.target_residual {
        cfg.target_residual = r;
    }
    match args.eigenspace {
        Eigenspace::Z => cfg.symmetry = SymmetryType::TypeZ,
        Eigenspace::A => cfg.symmetry = SymmetryType::TypeA,
        Eigenspace::None => {
            cfg.eigenspace_restriction = false;
            cfg.symmetry = SymmetryType::Unknown;
        }
    }
    manifest.config = serde_json::to_value(&cfg)?;
    manifest.seed = Some(args.seed);
    let (artifact, converged, residual) = with_real!(bits, T => {
        let ctx = make_context::<T>(args.d)?;
        let f = find_fiducial(&ctx, &cfg)?;
        (io::fiducial_to_json(&f), f.converged, f.residual.to_f64())
    })?;
    Ok(Outcome {
        artifact,
        incomplete: !converged,
        summary: format!("d={} residual={residual:e} converged={converged}", args.d),
    })
}

fn cmd_verify(file: &Path, target: f64, manifest: &mut RunManifest) -> Result<Outcome> {
    let v = read_json(file, manifest)?;
    manifest.config = json!({ "target_residual": target });
    let bits = io::precision_of(&v)?;
    let (artifact, residual) = with_real!(bits, T => {
        let f = io::fiducial_from_json::<T>(&v)?;
        let ctx = make_context::<T>(f.dimension)?;
        let residual = sic_residual(&ctx, &f.vector)?;
        let fp_error = (frame_potential(&ctx, &f.vector) - frame_potential_minimum::<T>(f.dimension)).abs();
        let artifact = json!({
            "format_version": io::FORMAT_VERSION,
            "kind": "verification",
            "d": f.dimension,
            "precision_bits": T::PREC_BITS,
            "residual": residual.to_decimal(),
            "recorded_residual": f.residual.to_decimal(),
            "frame_potential_error": fp_error.to_decimal(),
            "target_residual": format!("{target:e}"),
            "passed": residual.to_f64() <= target,
        });
        (artifact, residual.to_f64())
    })?;
    let passed = residual <= target;
    Ok(Outcome {
        artifact,
        incomplete: !passed,
        summary: format!("residual={residual:e} target={target:e} {}", if passed { "ok" } else { "FAILED" }),
    })
}

fn cmd_overlaps(file: &Path, manifest: &mut RunManifest) -> Result<Outcome> {
    let v = read_json(file, manifest)?;
    let bits = io::precision_of(&v)?;
    let (artifact, defect, n) = with_real!(bits, T => {
        let f = io::fiducial_from_json::<T>(&v)?;
        let ctx = make_context::<T>(f.dimension)?;
        let f = sic_core::Fiducial::from_vector(&ctx, f.vector, f.seed, f.symmetry_type)?;
        let t = compute_overlaps(&ctx, &f)?;
        (io::overlaps_to_json(&t), t.magnitude_defect().to_f64(), t.entries.len())
    })?;
    Ok(Outcome { artifact, incomplete: false, summary: format!("{n} overlaps, max magnitude defect {defect:e}") })
}

fn cmd_stabilizer(file: &Path, manifest: &mut RunManifest) -> Result<Outcome> {
    let v = read_json(file, manifest)?;
    let bits = io::precision_of(&v)?;
    let (artifact, summary) = with_real!(bits, T => {
        let f = io::fiducial_from_json::<T>(&v)?;
        let ctx = make_context::<T>(f.dimension)?;
        let f = sic_core::Fiducial::from_vector(&ctx, f.vector, f.seed, f.symmetry_type)?;
        let report = stability_group(&ctx, &f, &sic_core::overlaps::default_tolerance(&f.residual))?;
        let t = compute_overlaps(&ctx, &f)?;
        let partition = overlap_orbit_partition(&t, &report.overlap_stabilizers, &partition_tolerance(&f.residual));
        let summary = format!(
            "|S0|={} cyclic={} centred={} order-3={} orbits={} violations={}",
            report.symplectic_stabilizers.len(),
            report.cyclic,
            report.centred,
            report.canonical_order3_present,
            partition.parts.len(),
            partition.violations.len()
        );
        (io::stability_to_json(f.dimension, &report, &partition), summary)
    })?;
    Ok(Outcome { artifact, incomplete: false, summary })
}

fn cmd_tower(args: &TowerArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let discriminant = match (args.discriminant, args.d) {
        (Some(dd), _) => dd,
        (None, Some(d)) => sic_discriminant(d)?.discriminant,
        (None, None) => bail!(SicError::Domain("give --D or --d".into())),
    };
    let max_len = args.max_len.unwrap_or(args.count);
    manifest.config = json!({ "D": discriminant, "count": args.count, "max_len": max_len, "use_dprime": args.use_dprime });
    let seq = dimension_sequence(discriminant, args.count)?;
    let towers = dimension_towers(&seq.terms, max_len);
    let artifact = io::tower_to_json(&seq, &towers, args.use_dprime);

    let mut table = format!("D = {discriminant}, d1 = {}\n", seq.d1);
    table.push_str(if args.use_dprime { "  j  d_j  m_j  d'_j\n" } else { "  j  d_j  m_j\n" });
    for (j, (d, m)) in seq.terms.iter().zip(&seq.m_values).enumerate() {
        if args.use_dprime {
            table.push_str(&format!("  {}  {d}  {m}  {}\n", j + 1, sic_core::number_theory::dprime(d)));
        } else {
            table.push_str(&format!("  {}  {d}  {m}\n", j + 1));
        }
    }
    for t in &towers {
        let parts: Vec<String> = t.iter().map(BigInt::to_string).collect();
        table.push_str(&format!("  tower {}\n", parts.join("|")));
    }
    Ok(Outcome { artifact, incomplete: false, summary: table.trim_end().to_string() })
}

fn cmd_recognize(input: &Path, bits: Option<u32>, max_degree: Option<usize>, rank: bool, manifest: &mut RunManifest) -> Result<Outcome> {
    let v = read_json(input, manifest)?;
    let input_bits = io::precision_of(&v)?;
    let bits = bits.unwrap_or(input_bits / 2);
    let (artifact, summary, incomplete) = with_real!(input_bits, T => {
        let t = io::overlaps_from_json::<T>(&v)?;
        let max_degree = max_degree
            .unwrap_or_else(|| default_max_degree(t.d).min(CLI_MAX_DEGREE_CAP).min(bits as usize / 16).max(1));
        let cfg = RecognitionConfig::new(max_degree, bits);
        manifest.config = json!({
            "max_degree": cfg.max_degree,
            "precision_bits": cfg.precision_bits,
            "lattice_scale_exponent": cfg.lattice_scale_exponent,
            "rank": rank,
        });
        let report = recognize_overlap_phases(&t, &cfg)?;
        let estimate = if rank { Some(phase_relation_rank(&t, &cfg)?) } else { None };
        let s = &report.summary;
        let summary = format!(
            "{} phases: {} recognized, {} units, {} certified non-units, {} failures, {} distinct polynomials",
            s.total, s.recognized, s.units, s.certified_non_units, s.failures, s.distinct_polynomials
        );
        (io::recognition_to_json(&report, estimate.as_ref()), summary, s.failures > 0)
    })?;
    Ok(Outcome { artifact, incomplete, summary })
}

fn cmd_info(d: usize, manifest: &mut RunManifest) -> Result<Outcome> {
    manifest.config = json!({ "d": d });
    let ctx = make_context::<f64>(d)?;
    let fz = zauner_matrix(&ctx);
    let fa = fa_matrix(&ctx).ok();
    let discriminant = if d >= 4 { Some(sic_discriminant(d as u64)?.discriminant) } else { None };
    let eig = eigenspace_decomposition(&ctx, &fz)?;
    let matrix = |f: &sic_core::SymplecticMatrix| json!(f.entries());
    let artifact = json!({
        "format_version": io::FORMAT_VERSION,
        "kind": "info",
        "d": d,
        "d_prime": dprime(d),
        "D": discriminant,
        "F_z": matrix(&fz),
        "F_z_matrix_order": symplectic_order(&fz, &ctx)?,
        "U_F_z_projective_order": projective_order(&ctx, &clifford_unitary(&ctx, &fz)?)?,
        "F_a": fa.as_ref().map(matrix),
        "zauner_eigenspace_dimensions": eig.multiplicities,
        "zauner_eigenspace_chosen": eig.chosen,
    });
    let summary = format!(
        "d={d} d'={} D={} F_z={fz}{}",
        dprime(d),
        discriminant.map_or("-".to_string(), |x| x.to_string()),
        fa.map_or(String::new(), |f| format!(" F_a={f}"))
    );
    Ok(Outcome { artifact, incomplete: false, summary })
}

fn write_outputs(out: Option<&Path>, mut manifest: RunManifest, outcome: &Outcome) -> Result<()> {
    let mut artifact = outcome.artifact.clone();
    if let Some(m) = artifact.as_object_mut() {
        m.insert("manifest_digest".into(), json!(manifest.digest()));
    }
    let text = to_pretty(&artifact);
    match out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            manifest.outputs.insert(path.display().to_string(), manifest::sha256_hex(text.as_bytes()));
            manifest.finish();
            let mpath = PathBuf::from(format!("{}.manifest.json", path.display()));
            fs::write(&mpath, to_pretty(&manifest.to_json())).with_context(|| format!("writing {}", mpath.display()))?;
            println!("{}", outcome.summary);
        }
        None => {
            print!("{text}");
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(())
}

/// 2 for honest non-convergence or missing certification, 1 otherwise.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<SicError>() {
        Some(SicError::Unconverged(_)) | Some(SicError::PolishFailure(_)) | Some(SicError::Recognition(_)) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<bool> {
    let command_line: Vec<String> = std::env::args().skip(1).collect();
    let mut manifest = RunManifest::new(command_line);
    let outcome = match &cli.command {
        Command::Search(args) => cmd_search(args, bits_or_default(cli.bits), &mut manifest)?,
        Command::Verify { file, target_residual } => cmd_verify(file, *target_residual, &mut manifest)?,
        Command::Overlaps { file } => cmd_overlaps(file, &mut manifest)?,
        Command::Stabilizer { file } => cmd_stabilizer(file, &mut manifest)?,
        Command::Tower(args) => cmd_tower(args, &mut manifest)?,
        Command::Recognize { input, max_degree, rank } => cmd_recognize(input, cli.bits, *max_degree, *rank, &mut manifest)?,
        Command::Info { d } => cmd_info(*d, &mut manifest)?,
    };
    write_outputs(cli.out.as_deref(), manifest, &outcome)?;
    Ok(!outcome.incomplete)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
