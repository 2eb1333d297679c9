use std::f64::consts::PI;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gordian_core::cones::{Cone, FourPointReport, DEFAULT_LENGTH_TOL};
use gordian_core::constructions::{make_from_plan, verify as verify_generated, BetaShape, GordianLink, WeavePlan};
use gordian_core::curves::DEFAULT_RESOLUTION;
use gordian_core::io::{link_to_json, marks_path, read_link, read_marks, to_json_pretty, trace_csv, write_atomic, MarksFile};
use gordian_core::isotopy::{
    certify_trace, evolve, monitor, transversality_check, CertificateStatus, EvolveConfig, LemmaReport, MonitorConfig, Objective, Roles,
    TraceStatus, Transversality,
};
use gordian_core::mesh::{development_svg, tube_mesh};
use gordian_core::thickness::{reach, ReachBreakdown, DEFAULT_THICKNESS_TOL};
use gordian_core::topology::{crossing_linking, gauss_linking, marks_on_cone};
use gordian_core::{GordianError, Point3, Similarity, ThickLink};

#[derive(Parser)]
#[command(name = "gordian", version, about = "Thick links that cannot be split without stretching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the link L(m, n), verify it and write it with its marks.
    Generate(GenerateArgs),
    /// Check thickness and the five conditions for every β of a link file.
    Verify(VerifyArgs),
    /// Run a thickness- and length-constrained evolution.
    Evolve(EvolveArgs),
    /// Write tube meshes of a link.
    Export(ExportArgs),
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, allow_negative_numbers = true)]
    m: i32,
    #[arg(long, allow_negative_numbers = true)]
    n: i32,
    /// Total number of components (α plus stacked β copies).
    #[arg(long, default_value_t = 2)]
    components: usize,
    /// Parallelogram angle of β, in radians.
    #[arg(long, default_value_t = PI / 2.0)]
    phi: f64,
    /// Vertices of each β.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    segments: usize,
    /// Rescale every β to this length (experiment; the result is re-verified).
    #[arg(long)]
    beta_length: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Report path; defaults to FILE.report.json.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THICKNESS_TOL)]
    thickness_tol: f64,
    #[arg(long, default_value_t = 1e-3)]
    angle_tol: f64,
    #[arg(long, default_value_t = DEFAULT_LENGTH_TOL)]
    length_tol: f64,
    /// Write the development of the first β's cone as SVG.
    #[arg(long)]
    dump_development: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveName {
    Split,
    Shorten,
    Jiggle,
}

#[derive(clap::Args)]
struct EvolveArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    objective: ObjectiveName,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trace: PathBuf,
    /// Directory for numbered JSON snapshots.
    #[arg(long)]
    snapshots: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    snapshot_every: usize,
    /// Largest vertex displacement per step.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = DEFAULT_THICKNESS_TOL)]
    thickness_tol: f64,
    /// Component shortened by the shorten objective.
    #[arg(long, default_value_t = 0)]
    component: usize,
    /// Component monitored as β.
    #[arg(long, default_value_t = 1)]
    beta: usize,
    /// Write the trace certificate as JSON.
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeshFormat {
    Obj,
}

#[derive(clap::Args)]
struct ExportArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "obj")]
    format: MeshFormat,
    /// Tube radius; defaults to the link thickness.
    #[arg(long)]
    tube_radius: Option<f64>,
    /// Vertices per tube cross-section.
    #[arg(long, default_value_t = 16)]
    ring: usize,
    /// Mesh path; defaults to FILE.obj.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the development of this component's cone as SVG.
    #[arg(long)]
    dump_development: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    development_component: usize,
}

/// A failed run: exit code 1 for failed checks, 2 for bad usage or input.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    fn check(message: impl Display) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }
}

impl From<GordianError> for Failure {
    fn from(e: GordianError) -> Self {
        let code = match e {
            GordianError::InvalidArgument(_)
            | GordianError::OutOfRange(_)
            | GordianError::Format(_)
            | GordianError::Json(_)
            | GordianError::Io(_)
            | GordianError::MissingComponent(_)
            | GordianError::BadMark { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn positive(name: &str, v: f64) -> Outcome {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!("--{name} must be positive, got {v}")))
    }
}

fn check_threads() -> Outcome {
    match std::env::var("GORDIAN_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Ok(v) if v.trim().parse::<usize>().is_ok_and(|n| n >= 1) => Ok(()),
        Ok(v) => Err(Failure::usage(format!("GORDIAN_THREADS must be a positive integer, got {v:?}"))),
        Err(e) => Err(Failure::usage(format!("GORDIAN_THREADS: {e}"))),
    }
}

fn write(path: &Path, contents: &str) -> Outcome {
    write_atomic(path, contents.as_bytes()).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ThickLink, Failure> {
    read_link(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn fmt_point(p: Point3) -> String {
    format!("({:.4}, {:.4}, {:.4})", p.x, p.y, p.z)
}

fn rescale_betas(g: &mut GordianLink, length: f64) -> Outcome {
    positive("beta-length", length)?;
    let mut components = g.link.components.clone();
    for c in components.iter_mut().skip(1) {
        let centre = c.centroid();
        let map =
            Similarity::translation(centre).compose(&Similarity::scaling(length / c.length())?.compose(&Similarity::translation(-centre)));
        *c = c.transform(&map);
    }
    g.link = ThickLink::new(components, g.link.thickness)?;
    Ok(())
}

fn generate(args: &GenerateArgs) -> Outcome {
    if args.m == 0 {
        return Err(Failure::usage("m ≠ 0 is required (got --m 0)"));
    }
    if args.n == 0 {
        return Err(Failure::usage("n ≠ 0 is required (got --n 0)"));
    }
    if args.components < 2 {
        return Err(Failure::usage(format!("--components must be at least 2, got {}", args.components)));
    }
    let plan = WeavePlan {
        m: args.m,
        n: args.n,
        beta: BetaShape {
            phi: args.phi,
            resolution: args.segments,
        },
        copies: args.components - 1,
    };
    let mut g = make_from_plan(&plan)?;
    let reports = match args.beta_length {
        Some(l) => {
            rescale_betas(&mut g, l)?;
            verify_generated(&g)?
        }
        None => verify_generated(&g)?,
    };
    write(&args.out, &link_to_json(&g.link))?;
    let mpath = marks_path(&args.out);
    write(&mpath, &to_json_pretty(&MarksFile::new(g.marks.clone()))?)?;

    let b = reach(&g.link)?;
    println!("wrote {} and {}", args.out.display(), mpath.display());
    println!(
        "link L({}, {}) with {} components, thickness {}",
        args.m,
        args.n,
        g.link.len(),
        g.link.thickness
    );
    println!(
        "reach {:.6} (local {:.6}, pairs {:.6})",
        b.reach, b.min_local_radius, b.min_doubly_critical_half_distance
    );
    for (i, c) in g.link.components.iter().enumerate() {
        println!("component {i}: {} vertices, length {:.6}", c.len(), c.length());
    }
    for (j, (rep, marks)) in reports.iter().zip(&g.marks).enumerate() {
        println!("beta {}:", j + 1);
        for (k, &s) in marks.iter().enumerate() {
            println!("  p{} at s = {:.6}: {}", k + 1, s, fmt_point(g.alpha().point_at(s)));
        }
        let lk = |v: Option<i64>| v.map_or("-".to_string(), |x| x.to_string());
        println!("  lk=({},{})", lk(rep.lk13), lk(rep.lk24));
        println!(
            "  arc lengths {:?}",
            rep.arc_lengths.iter().map(|l| format!("{l:.4}")).collect::<Vec<_>>()
        );
        println!(
            "  cone angle {:.9}, hull sides {:?}",
            rep.theta,
            rep.hull_sides.iter().map(|l| format!("{l:.4}")).collect::<Vec<_>>()
        );
        println!(
            "  conditions 1-5: {} {} {} {} {}",
            rep.cond1, rep.cond2, rep.cond3, rep.cond4, rep.cond5
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ConeData {
    theta: f64,
    apex: Point3,
    disk_area: f64,
    isoperimetric_ratio: f64,
    four_point: Option<FourPointReport>,
}

#[derive(Serialize)]
struct BetaReport {
    component: usize,
    lemma: LemmaReport,
    cone: ConeData,
    transversality: Option<Transversality>,
}

#[derive(Serialize)]
struct PairLinking {
    a: usize,
    b: usize,
    gauss: Option<f64>,
    residual: Option<f64>,
    crossing: Option<i64>,
}

#[derive(Serialize)]
struct VerifyReport {
    input: String,
    thickness: f64,
    lengths: Vec<f64>,
    reach: ReachBreakdown,
    betas: Vec<BetaReport>,
    linking: Vec<PairLinking>,
    failures: Vec<String>,
    pass: bool,
}

fn verify(args: &VerifyArgs) -> Outcome {
    positive("thickness-tol", args.thickness_tol)?;
    positive("angle-tol", args.angle_tol)?;
    positive("length-tol", args.length_tol)?;
    let link = load(&args.file)?;
    let mpath = marks_path(&args.file);
    let hints = if mpath.exists() {
        Some(
            read_marks(&mpath)
                .map_err(|e| Failure::usage(format!("{}: {e}", mpath.display())))?
                .marks,
        )
    } else {
        None
    };

    let mut failures = Vec::new();
    let b = reach(&link)?;
    let required = link.thickness * (1.0 - args.thickness_tol);
    if b.reach < required {
        failures.push(format!("thickness: reach {:.6} below {:.6}", b.reach, required));
    }
    let cfg = MonitorConfig {
        thickness_tol: args.thickness_tol,
        theta_tol: args.angle_tol,
        ..MonitorConfig::default()
    };
    let mut betas = Vec::new();
    for j in 1..link.len() {
        let roles = Roles { alpha: 0, beta: j };
        let hint = hints.as_ref().and_then(|h| h.get(j - 1));
        let lemma = monitor(&link, roles, hint, &cfg)?;
        let cone = Cone::new(&link.components[j])?;
        for name in lemma.failures() {
            failures.push(format!("beta {j}: {name}"));
        }
        let four_point = match lemma.marks {
            Some(marks) => {
                let pts = marks_on_cone(&link.components[0], &cone, &marks, cfg.mark_tol)?;
                let fp = cone.four_point_property(&pts, args.length_tol)?;
                if fp.min_pairwise < 2.0 - args.length_tol {
                    failures.push(format!(
                        "beta {j}: four_point_property pairwise distance {:.6} below 2",
                        fp.min_pairwise
                    ));
                }
                if fp.min_to_base < 2.0 - args.length_tol {
                    failures.push(format!(
                        "beta {j}: four_point_property distance to the curve {:.6} below 2",
                        fp.min_to_base
                    ));
                }
                if !fp.hull.convex || !fp.hull.apex_inside {
                    failures.push(format!("beta {j}: four_point_property hull not convex around the apex"));
                }
                Some(fp)
            }
            None => None,
        };
        if lemma.all_conditions() && !lemma.theta_flat {
            failures.push(format!("beta {j}: cone angle {:.9} differs from 2pi", lemma.theta));
        }
        if lemma.all_conditions() && !lemma.arcs_long {
            failures.push(format!(
                "beta {j}: shortest arc {:.6} below {}",
                lemma.min_arc_length, lemma.thresholds.arc_conclusion
            ));
        }
        let transversality = if lemma.intersections.is_empty() {
            None
        } else {
            Some(transversality_check(&link, roles, &lemma)?)
        };
        let (ratio, _) = cone.isoperimetric_check(0.0);
        betas.push(BetaReport {
            component: j,
            cone: ConeData {
                theta: cone.cone_angle(),
                apex: cone.apex(),
                disk_area: cone.disk_area(),
                isoperimetric_ratio: ratio,
                four_point,
            },
            lemma,
            transversality,
        });
    }
    let mut linking = Vec::new();
    for a in 0..link.len() {
        for bb in a + 1..link.len() {
            let (ca, cb) = (&link.components[a], &link.components[bb]);
            let g = gauss_linking(ca, cb).ok();
            let crossing = crossing_linking(ca, cb, Point3::new(0.3, 0.2, 1.0)).ok();
            linking.push(PairLinking {
                a,
                b: bb,
                gauss: g.map(|g| g.value),
                residual: g.map(|g| g.residual),
                crossing,
            });
        }
    }
    if let Some(svg) = &args.dump_development {
        let j = if link.len() > 1 { 1 } else { 0 };
        write(svg, &development_svg(&Cone::new(&link.components[j])?))?;
    }
    let report = VerifyReport {
        input: args.file.display().to_string(),
        thickness: link.thickness,
        lengths: link.lengths(),
        reach: b,
        betas,
        linking,
        pass: failures.is_empty(),
        failures,
    };
    let rpath = args.report.clone().unwrap_or_else(|| with_suffix(&args.file, ".report.json"));
    write(&rpath, &to_json_pretty(&report)?)?;

    println!("wrote {}", rpath.display());
    println!("reach {:.6}", report.reach.reach);
    for br in &report.betas {
        let l = &br.lemma;
        println!(
            "beta {}: {} crossings, lk=({},{}), theta {:.9}, min arc {:.4}, conditions {} {} {} {} {}",
            br.component,
            l.intersections.len(),
            l.lk13.map_or("-".into(), |x| x.to_string()),
            l.lk24.map_or("-".into(), |x| x.to_string()),
            l.theta,
            l.min_arc_length,
            l.cond1,
            l.cond2,
            l.cond3,
            l.cond4,
            l.cond5
        );
    }
    if report.pass {
        println!("all checks pass");
        Ok(())
    } else {
        Err(Failure::check(format!("verification failed:\n  {}", report.failures.join("\n  "))))
    }
}

fn run_evolve(args: &EvolveArgs) -> Outcome {
    positive("step", args.step)?;
    positive("thickness-tol", args.thickness_tol)?;
    let link = load(&args.file)?;
    let objective = match args.objective {
        ObjectiveName::Split => Objective::split_default(),
        ObjectiveName::Shorten => Objective::Shorten { component: args.component },
        ObjectiveName::Jiggle => Objective::Jiggle,
    };
    let cfg = EvolveConfig {
        step: args.step,
        tol: args.thickness_tol,
        seed: args.seed,
        snapshot_every: args.snapshot_every,
        keep_snapshots: args.snapshots.is_some(),
        roles: Roles { alpha: 0, beta: args.beta },
        ..EvolveConfig::default()
    };
    let trace = evolve(&link, &objective, args.steps, &cfg)?;
    write(&args.trace, &trace_csv(&trace))?;
    if let Some(dir) = &args.snapshots {
        fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
        for (i, snap) in trace.snapshots.iter().enumerate() {
            write(&dir.join(format!("snapshot_{i:05}.json")), &link_to_json(snap))?;
        }
    }
    let cert = certify_trace(&trace, args.thickness_tol);
    if let Some(path) = &args.certificate {
        write(path, &to_json_pretty(&cert)?)?;
    }
    let last = trace.rows.last().map_or(0, |r| r.step);
    println!("status {} after {} steps", trace.status.as_str(), last);
    println!(
        "min reach {:.6}, relative length drift {:.3e}",
        trace.min_reach(),
        trace.length_drift(None)
    );
    if let Some(m) = trace.separating_margin {
        println!("separating plane found with margin {m:.6}");
    }
    match &cert.status {
        CertificateStatus::Holds => println!("certificate holds on {} of {} states", cert.steps_in_w, cert.steps),
        CertificateStatus::NotApplicable => println!("certificate not applicable: the conditions never held"),
        CertificateStatus::Violated { step, reason } => {
            return Err(Failure::check(format!("certificate violated at step {step}: {reason}")));
        }
    }
    if trace.status == TraceStatus::Stuck {
        return Err(Failure::check(format!("evolution stuck at step {last}: no admissible step found")));
    }
    Ok(())
}

fn export(args: &ExportArgs) -> Outcome {
    let link = load(&args.file)?;
    let radius = args.tube_radius.unwrap_or(link.thickness);
    positive("tube-radius", radius)?;
    let mesh = tube_mesh(&link, radius, args.ring)?;
    let out = args.out.clone().unwrap_or_else(|| with_suffix(&args.file, ".obj"));
    match args.format {
        MeshFormat::Obj => write(&out, &mesh.to_obj())?,
    }
    println!(
        "wrote {} ({} vertices, {} triangles)",
        out.display(),
        mesh.vertices.len(),
        mesh.triangles.len()
    );
    if let Some(svg) = &args.dump_development {
        let c = link.components.get(args.development_component).ok_or_else(|| {
            Failure::usage(format!(
                "no component {} in a {}-component link",
                args.development_component,
                link.len()
            ))
        })?;
        write(svg, &development_svg(&Cone::new(c)?))?;
        println!("wrote {}", svg.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = check_threads().and_then(|_| match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify(a),
        Command::Evolve(a) => run_evolve(a),
        Command::Export(a) => export(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
