use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use gqdham::abelian_core::FiniteAbelianGroup;
use gqdham::cayley::{build_window_with_budget, classify_case, torsion_census, CayleyWindow, GenSet};
use gqdham::gqd_group::{GqdElem, GqdGroup, Word};
use gqdham::hamilton::{hamiltonian_circle, hamiltonian_double_ray, GroupDoubleRay, HamCircle};
use gqdham::verify::{verify_circle, verify_ray, VerifyReport};
use gqdham::walls::{
    column, cylinder_double_ray, cylinder_two_rays, cylinder_window, iso_rows, CoordDoubleRay, CylinderParams,
    WallVertex, WallWindow,
};
use gqdham::Error;

#[derive(Parser)]
#[command(name = "gqdham", version, about = "Hamiltonian double rays and circles in two-ended GQD Cayley graphs")]
struct Cli {
    /// Seed for randomized commands (none of the current commands sample).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Show {
    Column,
    IsoRows,
    DoubleRay,
    TwoRays,
}

#[derive(clap::Args)]
struct WindowArgs {
    /// Radius of the Cayley-graph window.
    #[arg(long, default_value_t = 12)]
    radius: i64,
    /// Word-length radius that must be covered exactly once.
    #[arg(long, default_value_t = 10)]
    inner_radius: i64,
    /// Maximum number of window vertices.
    #[arg(long, default_value_t = gqdham::cayley::WINDOW_BUDGET)]
    budget: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Summarise the group and generating set of a job file.
    GroupInfo {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Construct and verify a Hamiltonian double ray.
    HamRay {
        spec: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Construct and verify a Hamiltonian circle.
    HamCircle {
        spec: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Render a twisted cylinder window with a construction highlighted.
    Wall {
        #[arg(long)]
        k: i64,
        #[arg(long, default_value_t = 0)]
        l: i64,
        #[arg(long, value_enum, default_value = "double-ray")]
        show: Show,
        #[arg(long, default_value_t = -8, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, default_value_t = 8, allow_hyphen_values = true)]
        to: i64,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// Verify a ray or circle (JSON) against a job file.
    Verify {
        spec: PathBuf,
        /// Ray, circle, or the output of `ham-ray` / `ham-circle`.
        #[arg(long)]
        ray: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
    },
}

enum Fail {
    Input(String),
    Construction(String),
    Verification(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::SearchExhausted(_) | Error::Construction(_) | Error::Overflow => Fail::Construction(e.to_string()),
            _ => Fail::Input(e.to_string()),
        }
    }
}

#[derive(Deserialize)]
struct GroupSpec {
    invariant_factors: Vec<i64>,
    #[serde(default)]
    beta: Option<Vec<i64>>,
}

/// A generator given either as an element record or as a word.
#[derive(Deserialize)]
#[serde(untagged)]
enum GenSpec {
    Elem(GqdElem),
    Word(String),
}

#[derive(Deserialize)]
struct JobSpec {
    group: GroupSpec,
    gens: Vec<GenSpec>,
}

struct Job {
    group: GqdGroup,
    gens: GenSet,
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn load_job(path: &Path) -> Result<Job, Fail> {
    let text = read(path)?;
    let spec: JobSpec =
        serde_json::from_str(&text).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))?;
    let k = FiniteAbelianGroup::new(spec.group.invariant_factors)?;
    let beta = match spec.group.beta {
        Some(b) => k.elem(b)?,
        None => k.zero(),
    };
    let group = GqdGroup::new(k, beta)?;
    let mut elems = Vec::new();
    for (j, g) in spec.gens.into_iter().enumerate() {
        let x = match g {
            GenSpec::Elem(x) => x,
            GenSpec::Word(w) => group.normalize_word(&Word::parse(&w)?)?,
        };
        if !group.contains(&x) {
            return Err(Fail::Input(format!("gens[{j}]: {x} is not a group element")));
        }
        elems.push(x);
    }
    let gens = GenSet::symmetric_closure(&group, &elems)?;
    Ok(Job { group, gens })
}

fn window(job: &Job, w: &WindowArgs) -> Result<CayleyWindow, Fail> {
    if w.inner_radius > w.radius {
        return Err(Fail::Input("--inner-radius exceeds --radius".into()));
    }
    Ok(build_window_with_budget(&job.group, &job.gens, w.radius, w.budget)?)
}

fn ray_edges(g: &GqdGroup, w: &CayleyWindow, r: &GroupDoubleRay) -> Vec<(GqdElem, GqdElem)> {
    let p = r.len() as i64;
    let reach = w.vertices.iter().map(|v| v.i.abs()).max().unwrap_or(0);
    let q = (reach + r.motif.iter().map(|v| v.i.abs()).max().unwrap_or(0)) / r.period.i.abs().max(1) + 1;
    let verts = r.expand(g, -q * p, q * p + 1);
    verts
        .windows(2)
        .filter(|e| w.contains(&e[0]) && w.contains(&e[1]))
        .map(|e| (e[0].clone(), e[1].clone()))
        .collect()
}

fn finish(report: &VerifyReport) -> Result<(), Fail> {
    if report.passed {
        Ok(())
    } else {
        Err(Fail::Verification("verification failed".into()))
    }
}

fn group_info(path: &Path, format: Format) -> Result<(), Fail> {
    let job = load_job(path)?;
    let g = &job.group;
    let case = if job.gens.len() >= 3 {
        classify_case(g, &job.gens)?.name().to_string()
    } else {
        "base".to_string()
    };
    let census = torsion_census(g, &job.gens);
    let info = json!({
        "invariant_factors": g.k_group().invariant_factors(),
        "beta": g.beta(),
        "order_k": g.k_group().order(),
        "infinite_dihedral": g.is_infinite_dihedral(),
        "gens": job.gens.gens().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "case": case,
        "torsion": census,
    });
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&info).expect("serializable"));
    } else {
        println!("K = Z{:?}, |K| = {}", g.k_group().invariant_factors(), g.k_group().order());
        println!("beta = {:?}", g.beta().coords());
        if g.is_infinite_dihedral() {
            println!("group: infinite dihedral");
        }
        println!("generators ({}):", job.gens.len());
        for x in job.gens.gens() {
            println!("  {x}");
        }
        println!("case: {case}");
        for (k, n) in census {
            println!("  {k}: {n}");
        }
    }
    Ok(())
}

fn ham_ray(path: &Path, w: &WindowArgs, format: Format) -> Result<(), Fail> {
    let job = load_job(path)?;
    let win = window(&job, w)?;
    let ray = hamiltonian_double_ray(&job.group, &job.gens)?;
    let report = verify_ray(&win, &ray, w.inner_radius)?;
    if format == Format::Dot {
        print!("{}", win.to_dot(&[ray_edges(&job.group, &win, &ray)]));
    } else {
        let out = json!({ "ray": ray, "report": report });
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    }
    finish(&report)
}

fn ham_circle(path: &Path, w: &WindowArgs, format: Format) -> Result<(), Fail> {
    let job = load_job(path)?;
    if job.gens.len() < 3 {
        return Err(Fail::Input("degree < 3: no Hamiltonian circle".into()));
    }
    let win = window(&job, w)?;
    let circle = hamiltonian_circle(&job.group, &job.gens)?;
    let report = verify_circle(&win, &circle, w.inner_radius)?;
    if format == Format::Dot {
        let hl: Vec<_> = circle.rays.iter().map(|r| ray_edges(&job.group, &win, r)).collect();
        print!("{}", win.to_dot(&hl));
    } else {
        let out = json!({ "circle": circle, "report": report });
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    }
    finish(&report)
}

fn coord_edges(w: &WallWindow, r: &CoordDoubleRay) -> Vec<(WallVertex, WallVertex)> {
    let p = r.period() as i64;
    let reach = w.n_lo.abs().max(w.n_hi.abs()) + r.motif.iter().map(|v| v.n.abs()).max().unwrap_or(0);
    let q = reach / r.shift.abs().max(1) + 1;
    (-q * p..q * p)
        .map(|j| (r.vertex(j), r.vertex(j + 1)))
        .filter(|(u, v)| w.in_range(*u) && w.in_range(*v))
        .collect()
}

fn wall(k: i64, l: i64, show: Show, from: i64, to: i64, format: Format) -> Result<(), Fail> {
    let p = CylinderParams::new(k, l)?;
    let win = cylinder_window(p, from, to)?;
    let paths: Vec<Vec<(WallVertex, WallVertex)>> = match show {
        Show::Column => {
            let c = column(p, 0);
            vec![c.windows(2).map(|e| (e[0], e[1])).filter(|(u, v)| win.in_range(*u) && win.in_range(*v)).collect()]
        }
        Show::IsoRows => iso_rows(p).iter().map(|r| coord_edges(&win, r)).collect(),
        Show::DoubleRay => vec![coord_edges(&win, &cylinder_double_ray(p)?)],
        Show::TwoRays => {
            let (a, b) = cylinder_two_rays(p)?;
            vec![coord_edges(&win, &a), coord_edges(&win, &b)]
        }
    };
    if format == Format::Json {
        let out = json!({
            "window": win,
            "paths": paths.iter().map(|es| es.iter().map(|(u, v)| [[u.n, u.m], [v.n, v.m]]).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        print!("{}", win.to_dot(&paths));
    }
    Ok(())
}

fn verify(path: &Path, ray_path: &Path, w: &WindowArgs) -> Result<(), Fail> {
    let job = load_job(path)?;
    let text = read(ray_path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Fail::Input(format!("{}: {e}", ray_path.display())))?;
    let bad = |e: serde_json::Error| Fail::Input(format!("{}: {e}", ray_path.display()));
    let win = window(&job, w)?;
    let report = if let Some(r) = v.get("ray") {
        verify_ray(&win, &serde_json::from_value::<GroupDoubleRay>(r.clone()).map_err(bad)?, w.inner_radius)?
    } else if let Some(c) = v.get("circle") {
        verify_circle(&win, &serde_json::from_value::<HamCircle>(c.clone()).map_err(bad)?, w.inner_radius)?
    } else if v.get("rays").is_some() {
        verify_circle(&win, &serde_json::from_value::<HamCircle>(v).map_err(bad)?, w.inner_radius)?
    } else {
        verify_ray(&win, &serde_json::from_value::<GroupDoubleRay>(v).map_err(bad)?, w.inner_radius)?
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    finish(&report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::GroupInfo { spec, format } => group_info(spec, *format),
        Cmd::HamRay { spec, window, format } => ham_ray(spec, window, *format),
        Cmd::HamCircle { spec, window, format } => ham_circle(spec, window, *format),
        Cmd::Wall { k, l, show, from, to, format } => wall(*k, *l, *show, *from, *to, *format),
        Cmd::Verify { spec, ray, window } => verify(spec, ray, window),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Construction(m)) => {
            eprintln!("error: construction failed: {m}");
            ExitCode::from(3)
        }
    }
}
